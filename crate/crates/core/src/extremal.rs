//! Outer min-max search for maximally entangled symmetric states and the
//! library of named extremal states.
//!
//! The objective is `G(ψ) = max_σ g(σ)`, minimized over normalized states by
//! Nelder–Mead. Positive families evaluate `G` on one meridian; the other
//! families use a warm-started lattice ascent that escalates to a full
//! multistart every `full_search_every` outer iterations.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometric::{
    find_cpps, fibonacci_lattice, grid_max, overlap, overlap_amplitude, positive_g_max, CppAnalysis, InnerConfig,
    OverlapCharts, DEDUP_ANGLE,
};
use crate::majorana::{points_to_state, state_to_points};
use crate::nelder_mead::{minimize, minimize_tracked, NelderMeadOptions};
use crate::state::{SpherePoint, SymmetricState};

/// Parameter family of the outer search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ansatz {
    PositiveFull,
    PositiveSparse(Vec<usize>),
    RealFull,
    ComplexFull,
}

impl Ansatz {
    pub fn label(&self) -> String {
        match self {
            Ansatz::PositiveFull => "positive".into(),
            Ansatz::PositiveSparse(s) => format!(
                "positive-sparse[{}]",
                s.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")
            ),
            Ansatz::RealFull => "real".into(),
            Ansatz::ComplexFull => "complex".into(),
        }
    }

    pub fn is_positive(&self) -> bool {
        matches!(self, Ansatz::PositiveFull | Ansatz::PositiveSparse(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub seed: u64,
    /// Random (Latin-hypercube) restarts; warm starts come on top.
    pub restarts: usize,
    pub ansatz: Ansatz,
    pub inner: InnerConfig,
    /// Nelder–Mead tolerance on the objective.
    pub outer_tol: f64,
    /// Objective evaluations per descent stage.
    pub max_evals: usize,
    /// Outer iterations between full multistart inner searches.
    pub full_search_every: usize,
    /// Seed restarts with the known sparse supports for `n`.
    pub warm_starts: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            seed: 20_100_301,
            restarts: 4,
            ansatz: Ansatz::PositiveFull,
            inner: InnerConfig::default(),
            outer_tol: 1e-13,
            max_evals: 20_000,
            full_search_every: 25,
            warm_starts: true,
        }
    }
}

impl SearchConfig {
    pub fn with_ansatz(ansatz: Ansatz) -> Self {
        SearchConfig {
            ansatz,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 && !self.warm_starts {
            return domain("restarts must be at least 1");
        }
        if !(self.outer_tol > 0.0) {
            return domain("outer_tol must be positive");
        }
        if self.full_search_every == 0 || self.max_evals == 0 {
            return domain("search budgets must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtremalResult {
    pub state: SymmetricState,
    pub analysis: CppAnalysis,
    pub ansatz: Ansatz,
    pub e_g: f64,
    pub converged: bool,
    /// Grid-and-polish maximum of g minus the reported `g_max`.
    pub certificate: f64,
    pub evaluations: usize,
    pub seed: u64,
}

/// Best known E_G of positive symmetric states, in bits.
pub fn table_positive(n: usize) -> Option<f64> {
    Some(match n {
        2 => 1.0,
        3 => (9.0f64 / 4.0).log2(),
        4 => 3f64.log2(),
        5 => 1.742268948,
        6 => 2.0 * 3f64.log2() - 1.0,
        7 => 2.298691396,
        8 => 2.445210159,
        9 => 2.553960277,
        10 => 2.679763092,
        11 => 2.773622669,
        12 => 2.993524700,
        _ => return None,
    })
}

/// Best known E_G of general symmetric states where it exceeds the
/// positive value, in bits.
pub fn table_general(n: usize) -> Option<f64> {
    Some(match n {
        10 => 2.737432003,
        11 => 2.817698505,
        12 => (243.0f64 / 28.0).log2(),
        _ => return None,
    })
}

/// Sparse supports of known positive optima.
fn positive_supports(n: usize) -> Vec<Vec<usize>> {
    match n {
        4 => vec![vec![0, 3]],
        5 => vec![vec![0, 4], vec![1, 4]],
        6 => vec![vec![1, 5]],
        7 => vec![vec![1, 6]],
        8 => vec![vec![1, 6]],
        9 => vec![vec![2, 7]],
        10 => vec![vec![0, 4, 9], vec![2, 8]],
        11 => vec![vec![1, 5, 10]],
        12 => vec![vec![1, 6, 11]],
        _ => Vec::new(),
    }
}

/// Signed sparse starting points of known non-positive candidates.
fn signed_starts(n: usize) -> Vec<Vec<(usize, f64)>> {
    match n {
        10 => vec![vec![(1, 0.5), (5, 0.7), (9, -0.5)]],
        11 => vec![vec![(0, 0.45), (5, 0.77), (10, -0.45)]],
        12 => vec![vec![(1, 0.53), (6, -0.66), (11, -0.53)]],
        _ => Vec::new(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Positive,
    Real,
    Complex,
}

/// Parameter space: a coefficient kind on a support.
#[derive(Debug, Clone)]
struct Family {
    n: usize,
    kind: Kind,
    support: Vec<usize>,
}

impl Family {
    fn full(n: usize, kind: Kind) -> Self {
        Family {
            n,
            kind,
            support: (0..=n).collect(),
        }
    }

    fn dim(&self) -> usize {
        match self.kind {
            Kind::Complex => 2 * self.support.len() - 1,
            _ => self.support.len(),
        }
    }

    /// Normalized coefficients, or `None` for the zero vector.
    fn decode(&self, x: &[f64]) -> Option<Vec<Complex64>> {
        let mut a = vec![Complex64::new(0.0, 0.0); self.n + 1];
        for (i, &k) in self.support.iter().enumerate() {
            a[k] = match self.kind {
                Kind::Positive => Complex64::new(x[i].abs(), 0.0),
                Kind::Real => Complex64::new(x[i], 0.0),
                Kind::Complex if i == 0 => Complex64::new(x[0].abs(), 0.0),
                Kind::Complex => Complex64::new(x[2 * i - 1], x[2 * i]),
            };
        }
        let norm = a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 1e-150) || !norm.is_finite() {
            return None;
        }
        Some(a.into_iter().map(|c| c / norm).collect())
    }

    /// Parameters of `coeffs` restricted to the support, gauge-fixed.
    fn encode(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let pivot = coeffs[self.support[0]];
        let phase = match self.kind {
            Kind::Complex if pivot.norm() > 0.0 => pivot.conj() / pivot.norm(),
            _ => Complex64::new(1.0, 0.0),
        };
        let mut x = Vec::with_capacity(self.dim());
        for (i, &k) in self.support.iter().enumerate() {
            let c = coeffs[k] * phase;
            match self.kind {
                Kind::Positive => x.push(c.norm()),
                Kind::Real => x.push(c.re),
                Kind::Complex if i == 0 => x.push(c.re.abs()),
                Kind::Complex => {
                    x.push(c.re);
                    x.push(c.im);
                }
            }
        }
        x
    }
}

/// `max_σ g(σ)` for arbitrary states, reusing the previous maxima as warm
/// starts between full lattice searches.
pub(crate) struct OverlapMaximizer {
    lattice: Vec<SpherePoint>,
    neighbors: Vec<Vec<usize>>,
    warm: Vec<SpherePoint>,
    cfg: InnerConfig,
    cap: usize,
}

impl OverlapMaximizer {
    pub(crate) fn new(n: usize, cfg: InnerConfig) -> Self {
        let lattice = fibonacci_lattice((cfg.starts_per_qubit * n).max(40 * n));
        let bloch: Vec<[f64; 3]> = lattice.iter().map(|p| p.bloch()).collect();
        let neighbors = bloch
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let mut d: Vec<(f64, usize)> = bloch
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(j, b)| (-(a[0] * b[0] + a[1] * b[1] + a[2] * b[2]), j))
                    .collect();
                d.sort_by(|x, y| x.0.total_cmp(&y.0));
                d.into_iter().take(6).map(|(_, j)| j).collect()
            })
            .collect();
        OverlapMaximizer {
            lattice,
            neighbors,
            warm: Vec::new(),
            cfg,
            cap: 4 * n,
        }
    }

    /// `full` forces a search from every lattice point; otherwise only the
    /// previous maxima and the lattice's discrete local maxima are ascended.
    pub(crate) fn g_max(&mut self, coeffs: &[Complex64], full: bool) -> f64 {
        let charts = OverlapCharts::new(coeffs);
        let full = full || self.warm.is_empty();
        let starts: Vec<SpherePoint> = if full {
            self.lattice.clone()
        } else {
            let vals: Vec<f64> = self
                .lattice
                .iter()
                .map(|p| overlap_amplitude(coeffs, p).norm_sqr())
                .collect();
            let mut s = self.warm.clone();
            s.extend(
                (0..self.lattice.len())
                    .filter(|&i| self.neighbors[i].iter().all(|&j| vals[i] >= vals[j]))
                    .map(|i| self.lattice[i]),
            );
            s
        };
        let mut found: Vec<(SpherePoint, f64)> =
            starts.iter().filter_map(|s| charts.ascend(s, &self.cfg)).map(|m| (m.0, m.1)).collect();
        found.sort_by(|a, b| b.1.total_cmp(&a.1));
        let best = found.first().map(|m| m.1).unwrap_or(0.0);
        self.warm.clear();
        for (p, _) in found {
            if self.warm.len() >= self.cap {
                break;
            }
            if !self.warm.iter().any(|q| q.angular_distance(&p) <= DEDUP_ANGLE) {
                self.warm.push(p);
            }
        }
        best
    }
}

/// Objective `G` over a family, counting evaluations.
struct Objective {
    maximizer: Option<OverlapMaximizer>,
    full_every: usize,
    last_full: Option<usize>,
    evaluations: usize,
}

impl Objective {
    fn new(n: usize, kind: Kind, cfg: &SearchConfig) -> Self {
        Objective {
            maximizer: (kind != Kind::Positive).then(|| OverlapMaximizer::new(n, cfg.inner)),
            full_every: cfg.full_search_every.max(1),
            last_full: None,
            evaluations: 0,
        }
    }

    /// A descent stage restarts the iteration count.
    fn new_stage(&mut self) {
        self.last_full = None;
    }

    fn eval(&mut self, family: &Family, x: &[f64], iteration: usize) -> f64 {
        self.evaluations += 1;
        let Some(a) = family.decode(x) else {
            return f64::INFINITY;
        };
        if family.kind == Kind::Positive {
            return positive_g_max(&a.iter().map(|c| c.re).collect::<Vec<_>>());
        }
        let slot = iteration / self.full_every;
        let full = self.last_full != Some(slot);
        self.last_full = Some(slot);
        let n = family.n;
        let inner = self.maximizer.get_or_insert_with(|| OverlapMaximizer::new(n, InnerConfig::default()));
        inner.g_max(&a, full)
    }
}

/// Nelder–Mead with restarts from the incumbent until it stops improving.
fn descend(
    family: &Family,
    x0: &[f64],
    objective: &mut Objective,
    cfg: &SearchConfig,
    step: f64,
) -> (Vec<f64>, f64, bool) {
    let opts = NelderMeadOptions {
        max_evals: cfg.max_evals,
        f_tol: cfg.outer_tol,
        x_tol: 1e-10,
        initial_step: step,
    };
    let mut x = x0.to_vec();
    let mut best = f64::INFINITY;
    let mut converged = false;
    let mut step_now = step;
    for _ in 0..4 {
        objective.new_stage();
        let r = minimize_tracked(
            |p, it| objective.eval(family, p, it),
            &x,
            &NelderMeadOptions { initial_step: step_now, ..opts },
        );
        let improved = r.f < best - 1e-14;
        if r.f <= best {
            x = r.x;
            best = r.f;
        }
        converged = r.converged;
        if !improved {
            break;
        }
        step_now = (step_now * 0.3).max(1e-4);
    }
    (x, best, converged)
}

enum Plan {
    Warm { kind: Kind, start: Vec<(usize, f64)> },
    Random { row: Vec<f64> },
}

struct Candidate {
    coeffs: Vec<Complex64>,
    g: f64,
    converged: bool,
    evaluations: usize,
}

fn full_kind(ansatz: &Ansatz) -> Kind {
    match ansatz {
        Ansatz::PositiveFull | Ansatz::PositiveSparse(_) => Kind::Positive,
        Ansatz::RealFull => Kind::Real,
        Ansatz::ComplexFull => Kind::Complex,
    }
}

fn full_family(n: usize, ansatz: &Ansatz) -> Family {
    match ansatz {
        Ansatz::PositiveSparse(s) => Family {
            n,
            kind: Kind::Positive,
            support: s.clone(),
        },
        a => Family::full(n, full_kind(a)),
    }
}

fn latin_hypercube(rows: usize, dim: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; dim]; rows];
    for d in 0..dim {
        let mut strata: Vec<usize> = (0..rows).collect();
        strata.shuffle(rng);
        for (r, &s) in strata.iter().enumerate() {
            out[r][d] = (s as f64 + rng.gen::<f64>()) / rows as f64;
        }
    }
    out
}

fn run_plan(n: usize, plan: &Plan, cfg: &SearchConfig, index: usize) -> Candidate {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64 + 1);
    let family = full_family(n, &cfg.ansatz);
    let mut objective = Objective::new(n, family.kind, cfg);

    let (mut x, mut g, mut converged) = match plan {
        Plan::Warm { kind, start } => {
            let sparse = Family {
                n,
                kind: *kind,
                support: start.iter().map(|t| t.0).collect(),
            };
            let x0: Vec<f64> = start.iter().map(|t| t.1 * (1.0 + 0.02 * (rng.gen::<f64>() - 0.5))).collect();
            let (xs, _, _) = descend(&sparse, &x0, &mut objective, cfg, 0.1);
            let a = sparse.decode(&xs).expect("nonzero sparse optimum");
            let xf = family.encode(&a);
            descend(&family, &xf, &mut objective, cfg, 0.02)
        }
        Plan::Random { row } => {
            let x0: Vec<f64> = row
                .iter()
                .map(|&u| if family.kind == Kind::Positive { u } else { 2.0 * u - 1.0 })
                .collect();
            descend(&family, &x0, &mut objective, cfg, 0.25)
        }
    };

    // Drop coefficients that the optimum does not need.
    if let Some(a) = family.decode(&x) {
        let support: Vec<usize> = family.support.iter().copied().filter(|&k| a[k].norm() > 1e-4).collect();
        if !support.is_empty() && support.len() < family.support.len() {
            let sparse = Family {
                n,
                kind: family.kind,
                support,
            };
            let (xs, gs, cs) = descend(&sparse, &sparse.encode(&a), &mut objective, cfg, 0.01);
            if gs <= g + 1e-13 {
                x = family.encode(&sparse.decode(&xs).expect("nonzero"));
                g = gs;
                converged = cs;
            }
        }
    }
    Candidate {
        coeffs: family.decode(&x).unwrap_or_else(|| {
            let mut v = vec![Complex64::new(0.0, 0.0); n + 1];
            v[0] = Complex64::new(1.0, 0.0);
            v
        }),
        g,
        converged,
        evaluations: objective.evaluations,
    }
}

fn lexicographic(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o.is_ne() {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

/// Searches for the most entangled `n`-qubit symmetric state within the
/// configured ansatz. Restarts run in parallel; the result depends only on
/// the seed.
pub fn maximize_entanglement(n: usize, cfg: &SearchConfig) -> Result<ExtremalResult> {
    if !(2..=16).contains(&n) {
        return domain(format!("n = {n} outside the supported range 2..=16"));
    }
    cfg.validate()?;
    if let Ansatz::PositiveSparse(s) = &cfg.ansatz {
        if s.is_empty() || s.iter().any(|&k| k > n) {
            return domain("sparse support must be nonempty and within 0..=n");
        }
    }

    let family = full_family(n, &cfg.ansatz);
    let mut plans = Vec::new();
    if cfg.warm_starts && !matches!(cfg.ansatz, Ansatz::PositiveSparse(_)) {
        let sparse_kind = if family.kind == Kind::Positive { Kind::Positive } else { Kind::Real };
        for s in positive_supports(n) {
            let v = 1.0 / (s.len() as f64).sqrt();
            plans.push(Plan::Warm {
                kind: sparse_kind,
                start: s.iter().map(|&k| (k, v)).collect(),
            });
        }
        if family.kind != Kind::Positive {
            for start in signed_starts(n) {
                plans.push(Plan::Warm { kind: Kind::Real, start });
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for row in latin_hypercube(cfg.restarts, family.dim(), &mut rng) {
        plans.push(Plan::Random { row });
    }

    let candidates: Vec<Candidate> = plans
        .par_iter()
        .enumerate()
        .map(|(i, p)| run_plan(n, p, cfg, i))
        .collect();
    let evaluations = candidates.iter().map(|c| c.evaluations).sum();
    let best = candidates
        .into_iter()
        .min_by(|a, b| a.g.total_cmp(&b.g).then(lexicographic(&a.coeffs, &b.coeffs)))
        .expect("at least one plan");

    let state = SymmetricState::new(best.coeffs)?;
    let analysis = find_cpps(&state, &cfg.inner)?;
    let certificate = certificate(&state, &analysis);
    Ok(ExtremalResult {
        e_g: analysis.e_g,
        state,
        analysis,
        ansatz: cfg.ansatz.clone(),
        converged: best.converged,
        certificate,
        evaluations,
        seed: cfg.seed,
    })
}

/// Brute-force maximum of g: a 201×400 grid scan whose local maxima are
/// polished by Nelder–Mead in (θ, φ). Independent of the chart ascent.
pub fn polished_grid_max(state: &SymmetricState, n_theta: usize, n_phi: usize) -> f64 {
    let theta_at = |i: usize| PI * i as f64 / (n_theta - 1) as f64;
    let phi_at = |j: usize| 2.0 * PI * j as f64 / n_phi as f64;
    let vals: Vec<Vec<f64>> = (0..n_theta)
        .into_par_iter()
        .map(|i| {
            (0..n_phi)
                .map(|j| overlap(state, &SpherePoint { theta: theta_at(i), phi: phi_at(j) }))
                .collect()
        })
        .collect();
    let mut peaks = Vec::new();
    for i in 0..n_theta {
        for j in 0..n_phi {
            let v = vals[i][j];
            let mut is_peak = true;
            for di in [-1i64, 0, 1] {
                for dj in [-1i64, 0, 1] {
                    let ii = i as i64 + di;
                    if (di == 0 && dj == 0) || ii < 0 || ii >= n_theta as i64 {
                        continue;
                    }
                    let jj = (j as i64 + dj).rem_euclid(n_phi as i64) as usize;
                    if vals[ii as usize][jj] > v {
                        is_peak = false;
                    }
                }
            }
            if is_peak && (i != 0 && i != n_theta - 1 || j == 0) {
                peaks.push((v, theta_at(i), phi_at(j)));
            }
        }
    }
    peaks.sort_by(|a, b| b.0.total_cmp(&a.0));
    peaks.truncate(64);
    let opts = NelderMeadOptions {
        max_evals: 2000,
        f_tol: 1e-16,
        x_tol: 1e-12,
        initial_step: PI / n_theta as f64,
    };
    peaks
        .par_iter()
        .map(|&(v, t, p)| {
            let r = minimize(
                |x| -overlap(state, &SpherePoint { theta: x[0], phi: x[1] }),
                &[t, p],
                &opts,
            );
            v.max(-r.f)
        })
        .reduce(|| 0.0, f64::max)
}

/// `polished_grid_max − g_max`; near zero when no maximum was missed.
pub fn certificate(state: &SymmetricState, analysis: &CppAnalysis) -> f64 {
    polished_grid_max(state, 201, 400) - analysis.g_max
}

/// Names accepted by [`named_state`].
pub const NAMED_STATES: [&str; 16] = [
    "bell",
    "w3",
    "ghz3",
    "tetrahedron",
    "trigonal-bipyramid",
    "square-pyramid",
    "octahedron",
    "pentagonal-dipyramid-7",
    "cube",
    "asym-pentagonal-dipyramid-8",
    "pentagonal-dipyramid-9",
    "psi10-pos-sym",
    "psi10-candidate",
    "psi11-candidate",
    "icosahedron",
    "icosa-positive-12",
];

/// Real root of `p` (ascending coefficients) inside `[lo, hi]`.
fn real_root_in(p: &[f64], lo: f64, hi: f64) -> Result<f64> {
    let pc: Vec<Complex64> = p.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    crate::poly::aberth(&pc)?
        .into_iter()
        .filter(|z| z.im.abs() < 1e-9 && z.re >= lo && z.re <= hi)
        .map(|z| z.re)
        .next()
        .ok_or_else(|| Error::Numeric {
            message: format!("no real root in [{lo}, {hi}]"),
            residual: f64::NAN,
        })
}

/// Amplitude ratio `A` of the square-pyramid state `(|S0⟩ + A|S4⟩)/√(1+A²)`.
pub fn square_pyramid_amplitude() -> Result<f64> {
    let x = real_root_in(&[-1.0, -1.0, 4.0, 4.0, 4.0], 0.0, 1.0)?;
    Ok((1.0 - x.powi(5)) / (5f64.sqrt() * x * (1.0 - x * x).powi(2)))
}

/// `E_G` of `(|S_j⟩ + |S_{n−j}⟩)/√2` from the CPP latitude `x = cos²θ`.
fn dipyramid_e_g(n: usize, j: usize, x: f64) -> f64 {
    let state = SymmetricState::from_sparse(n, &[(j, 1.0), (n - j, 1.0)]).expect("valid");
    let g = overlap(&state, &SpherePoint::new(x.sqrt().acos(), 0.0));
    -2.0 * g.log2()
}

/// Closed-form `E_G` of the named states that have one, in bits.
pub fn closed_form_e_g(name: &str) -> Result<Option<f64>> {
    Ok(Some(match name {
        "bell" | "ghz3" => 1.0,
        "w3" => (9.0f64 / 4.0).log2(),
        "tetrahedron" => 3f64.log2(),
        "trigonal-bipyramid" => (16.0f64 / 5.0).log2(),
        "square-pyramid" => (1.0 + square_pyramid_amplitude()?.powi(2)).log2(),
        "octahedron" => (9.0f64 / 2.0).log2(),
        "pentagonal-dipyramid-7" => dipyramid_e_g(7, 1, real_root_in(&[55.0, -205.0, 165.0, 49.0], 0.0, 0.5)?),
        "cube" => (24.0f64 / 5.0).log2(),
        "pentagonal-dipyramid-9" => dipyramid_e_g(9, 2, real_root_in(&[35.0, -245.0, 385.0, 81.0], 0.0, 0.3)?),
        "psi10-pos-sym" => (32.0f64 / 5.0).log2(),
        "icosahedron" => (243.0f64 / 28.0).log2(),
        n if NAMED_STATES.contains(&n) => return Ok(None),
        other => return domain(format!("unknown state name '{other}'")),
    }))
}

/// Re-optimizes a sparse state from `start` (signed values on a support).
fn reoptimize(n: usize, start: &[(usize, f64)], kind: Kind) -> Result<SymmetricState> {
    let family = Family {
        n,
        kind,
        support: start.iter().map(|t| t.0).collect(),
    };
    let cfg = SearchConfig::default();
    let mut objective = Objective::new(n, kind, &cfg);
    let x0: Vec<f64> = start.iter().map(|t| t.1).collect();
    let (x, _, _) = descend(&family, &x0, &mut objective, &cfg, 0.05);
    SymmetricState::new(family.decode(&x).expect("nonzero"))
}

fn icosahedron_points() -> Vec<SpherePoint> {
    let upper = 2.0 * (2.0 / (5.0 + 5f64.sqrt())).sqrt().asin();
    let mut pts = vec![SpherePoint::NORTH, SpherePoint::SOUTH];
    for k in 0..5 {
        let kappa = 2.0 * PI * k as f64 / 5.0;
        pts.push(SpherePoint::new(upper, kappa));
        pts.push(SpherePoint::new(PI - upper, kappa + PI / 5.0));
    }
    pts
}

fn cube_points() -> Vec<SpherePoint> {
    let t = (1.0f64 / 3.0).sqrt().acos();
    (0..4)
        .flat_map(|k| {
            let phi = PI / 4.0 + k as f64 * PI / 2.0;
            [SpherePoint::new(t, phi), SpherePoint::new(PI - t, phi)]
        })
        .collect()
}

/// Constructs one of the named extremal states.
pub fn named_state(name: &str) -> Result<SymmetricState> {
    let h = FRAC_1_SQRT_2;
    match name {
        "bell" => SymmetricState::from_sparse(2, &[(1, 1.0)]),
        "w3" => SymmetricState::from_sparse(3, &[(1, 1.0)]),
        "ghz3" => SymmetricState::from_sparse(3, &[(0, h), (3, h)]),
        "tetrahedron" => SymmetricState::from_sparse(4, &[(0, (1.0f64 / 3.0).sqrt()), (3, (2.0f64 / 3.0).sqrt())]),
        "trigonal-bipyramid" => SymmetricState::from_sparse(5, &[(1, h), (4, h)]),
        "square-pyramid" => {
            let a = square_pyramid_amplitude()?;
            SymmetricState::from_sparse(5, &[(0, 1.0), (4, a)])
        }
        "octahedron" => SymmetricState::from_sparse(6, &[(1, h), (5, h)]),
        "pentagonal-dipyramid-7" => SymmetricState::from_sparse(7, &[(1, h), (6, h)]),
        "cube" => Ok(points_to_state(&cube_points(), 8)?.0),
        "asym-pentagonal-dipyramid-8" => reoptimize(8, &[(1, 0.672), (6, 0.741)], Kind::Positive),
        "pentagonal-dipyramid-9" => SymmetricState::from_sparse(9, &[(2, h), (7, h)]),
        "psi10-pos-sym" => SymmetricState::from_sparse(10, &[(2, h), (8, h)]),
        "psi10-candidate" => reoptimize(10, &signed_starts(10)[0], Kind::Real),
        "psi11-candidate" => reoptimize(11, &signed_starts(11)[0], Kind::Real),
        "icosahedron" => {
            let (s, _) = points_to_state(&icosahedron_points(), 12)?;
            // present it in the real gauge: a_1 > 0
            let a1 = s.coeffs()[1];
            SymmetricState::new(s.coeffs().iter().map(|c| c * a1.conj() / a1.norm()).collect())
        }
        "icosa-positive-12" => reoptimize(12, &[(1, 0.5), (6, 0.7), (11, 0.5)], Kind::Positive),
        other => domain(format!("unknown state name '{other}'; known: {}", NAMED_STATES.join(", "))),
    }
}

/// Outcome of random perturbations around a result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbReport {
    pub trials: usize,
    pub improving: usize,
    pub improving_fraction: f64,
    pub cpp_count: Option<usize>,
    /// At least two CPPs (or a continuum).
    pub has_two_cpps: bool,
    /// Largest E_G gain seen, bits (negative if none improved).
    pub best_gain: f64,
}

/// Perturbs the coefficients by random vectors of norm `1e-3` within the
/// result's ansatz and counts how many raise E_G by more than 1e-10.
pub fn perturb_check(result: &ExtremalResult, trials: usize, seed: u64) -> Result<PerturbReport> {
    const SIZE: f64 = 1e-3;
    let n = result.state.n();
    let base = result.e_g;
    let kind = full_kind(&result.ansatz);
    let support: Vec<usize> = match &result.ansatz {
        Ansatz::PositiveSparse(s) => s.clone(),
        _ => (0..=n).collect(),
    };
    let gains: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let mut delta = vec![Complex64::new(0.0, 0.0); n + 1];
            for &k in &support {
                let re = rng.gen::<f64>() * 2.0 - 1.0;
                let im = if kind == Kind::Complex { rng.gen::<f64>() * 2.0 - 1.0 } else { 0.0 };
                delta[k] = Complex64::new(re, im);
            }
            let dn = delta.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let coeffs: Vec<Complex64> = result
                .state
                .coeffs()
                .iter()
                .zip(&delta)
                .map(|(a, d)| {
                    let c = a + d * (SIZE / dn);
                    if kind == Kind::Positive {
                        Complex64::new(c.re.abs(), 0.0)
                    } else {
                        c
                    }
                })
                .collect();
            let perturbed = SymmetricState::new(coeffs)?;
            Ok(find_cpps(&perturbed, &InnerConfig::default())?.e_g - base)
        })
        .collect::<Result<Vec<f64>>>()?;
    let improving = gains.iter().filter(|&&g| g > 1e-10).count();
    let cpp_count = result.analysis.cpps.count();
    Ok(PerturbReport {
        trials,
        improving,
        improving_fraction: if trials == 0 { 0.0 } else { improving as f64 / trials as f64 },
        cpp_count,
        has_two_cpps: cpp_count.map_or(true, |c| c >= 2),
        best_gain: gains.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Wraps an existing state as a result for checks and export.
pub fn result_from_state(state: SymmetricState, ansatz: Ansatz, inner: &InnerConfig) -> Result<ExtremalResult> {
    let analysis = find_cpps(&state, inner)?;
    let certificate = certificate(&state, &analysis);
    Ok(ExtremalResult {
        e_g: analysis.e_g,
        state,
        analysis,
        ansatz,
        converged: true,
        certificate,
        evaluations: 0,
        seed: 0,
    })
}

/// JSON bundle: state, CPPs, MPs, E_G, certificate, config echo and seed.
pub fn result_bundle(result: &ExtremalResult, config: &SearchConfig) -> Result<serde_json::Value> {
    let mps = state_to_points(&result.state)?;
    Ok(serde_json::json!({
        "n": result.state.n(),
        "coeffs": result.state.coeffs().iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
        "e_g": result.e_g,
        "g_max": result.analysis.g_max,
        "cpps": result.analysis.cpps,
        "local_maxima": result.analysis.local_maxima,
        "majorana_points": mps.points,
        "k_norm": mps.k_norm,
        "certificate": result.certificate,
        "converged": result.converged,
        "evaluations": result.evaluations,
        "ansatz": result.ansatz.label(),
        "config": config,
        "seed": config.seed,
    }))
}

/// Dense-grid maximum location, for diagnostics.
pub fn grid_peak(state: &SymmetricState) -> (SpherePoint, f64) {
    grid_max(state, 201, 400)
}
