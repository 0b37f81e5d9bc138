//! Overlap function on the sphere, closest product points (CPPs) and the
//! geometric measure of entanglement `E_G = −2 log2 max_σ g(σ)`.
//!
//! `g(σ) = |⟨σ|^{⊗n}|ψ⟩|`. Local ascents run on `log g²` in stereographic
//! charts: the north chart uses `w = e^{−iφ} tan(θ/2)` with
//! `g² = |Q(w)|²/(1+|w|²)^n`, the south chart `u = 1/w` with the reversed
//! polynomial. Both are smooth through their pole, so neither pole is a
//! coordinate singularity.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::majorana::MajoranaDistribution;
use crate::poly::eval;
use crate::quadrature::gauss_legendre;
use crate::state::{classify, SpherePoint, SymmetricState};
use crate::{binomial, fmt_sig};

/// A local maximum is a CPP iff `g ≥ g_max·(1 − CPP_REL_TOL)`.
pub const CPP_REL_TOL: f64 = 1e-9;
/// Maxima closer than this angle are the same point.
pub const DEDUP_ANGLE: f64 = 1e-5;

/// How the CPPs were located.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Dicke state, possibly in a rotated frame: analytic ring (or point).
    Dicke,
    /// Positive (possibly after a Z-rotation gauge): one meridian, maxima
    /// replicated over the rotational order.
    Meridian,
    /// Multistart ascent over the whole sphere.
    Multistart,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CppSet {
    Discrete { points: Vec<SpherePoint> },
    /// Every φ at polar angle `theta`.
    Ring { theta: f64 },
    /// Every point at angular distance `angle` from `axis`: the ring of a
    /// Dicke state seen in a rotated frame.
    Circle { axis: SpherePoint, angle: f64 },
}

impl CppSet {
    /// Number of CPPs, `None` for a continuum.
    pub fn count(&self) -> Option<usize> {
        match self {
            CppSet::Discrete { points } => Some(points.len()),
            CppSet::Ring { .. } | CppSet::Circle { .. } => None,
        }
    }

    /// Representative points: the discrete set, or `samples` points on a ring.
    pub fn sample(&self, samples: usize) -> Vec<SpherePoint> {
        match self {
            CppSet::Discrete { points } => points.clone(),
            CppSet::Ring { theta } => (0..samples)
                .map(|j| SpherePoint::new(*theta, TAU * j as f64 / samples as f64))
                .collect(),
            CppSet::Circle { axis, angle } => {
                let a = axis.bloch();
                // any unit vector orthogonal to the axis, then the third leg
                let helper = if a[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
                let e1 = normalize(cross(a, helper));
                let e2 = cross(a, e1);
                let (c, s) = (angle.cos(), angle.sin());
                (0..samples)
                    .map(|j| {
                        let t = TAU * j as f64 / samples as f64;
                        let v: [f64; 3] =
                            std::array::from_fn(|d| c * a[d] + s * (t.cos() * e1[d] + t.sin() * e2[d]));
                        SpherePoint::from_bloch(v)
                    })
                    .collect()
            }
        }
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / r, v[1] / r, v[2] / r]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CppAnalysis {
    pub cpps: CppSet,
    pub g_max: f64,
    /// Bits.
    pub e_g: f64,
    /// Non-global local maxima with their g values.
    pub local_maxima: Vec<(SpherePoint, f64)>,
    pub strategy: Strategy,
}

/// Budget of the CPP search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerConfig {
    /// Fibonacci-lattice starts per qubit for the unrestricted search.
    pub starts_per_qubit: usize,
    pub max_iterations: usize,
    /// Convergence on the chart gradient of log g².
    pub grad_tol: f64,
}

impl Default for InnerConfig {
    fn default() -> Self {
        InnerConfig {
            starts_per_qubit: 40,
            max_iterations: 100,
            grad_tol: 1e-10,
        }
    }
}

/// `E_G` in bits from the maximal overlap.
pub fn entanglement_from_overlap(g_max: f64) -> f64 {
    -2.0 * g_max.log2()
}

/// `g(σ)` from the Dicke coefficients.
pub fn overlap(state: &SymmetricState, sigma: &SpherePoint) -> f64 {
    overlap_amplitude(state.coeffs(), sigma).norm()
}

/// `⟨σ|^{⊗n}|ψ⟩ = Σ a_k √C(n,k) c^{n−k} (e^{−iφ}s)^k`.
pub fn overlap_amplitude(coeffs: &[Complex64], sigma: &SpherePoint) -> Complex64 {
    let n = coeffs.len() - 1;
    let (s, c) = (0.5 * sigma.theta).sin_cos();
    let e = Complex64::from_polar(s, -sigma.phi);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut ep = Complex64::new(1.0, 0.0);
    for (k, &a) in coeffs.iter().enumerate() {
        if a.norm() > 0.0 {
            acc += a * binomial(n, k).sqrt() * c.powi((n - k) as i32) * ep;
        }
        ep *= e;
    }
    acc
}

/// `g(σ) = n!/√K Π|⟨σ|φ_i⟩|` from the Majorana points.
pub fn overlap_from_points(dist: &MajoranaDistribution, sigma: &SpherePoint) -> f64 {
    let (sc, ss) = sigma.amplitudes();
    let nf: f64 = (1..=dist.n).map(|i| i as f64).product();
    let prod: f64 = dist
        .points
        .iter()
        .map(|p| {
            let (c, s) = p.amplitudes();
            (sc.conj() * c + ss.conj() * s).norm()
        })
        .product();
    nf / dist.k_norm.sqrt() * prod
}

/// Stereographic chart of the overlap function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Chart {
    North,
    South,
}

/// Chart polynomials of a state: `b_k = a_k √C(n,k)` and its reversal.
#[derive(Debug, Clone)]
pub(crate) struct OverlapCharts {
    n: usize,
    north: [Vec<Complex64>; 3],
    south: [Vec<Complex64>; 3],
}

fn with_derivatives(p: Vec<Complex64>) -> [Vec<Complex64>; 3] {
    let d1 = crate::poly::derivative(&p);
    let d2 = crate::poly::derivative(&d1);
    [p, d1, d2]
}

impl OverlapCharts {
    pub(crate) fn new(coeffs: &[Complex64]) -> Self {
        let n = coeffs.len() - 1;
        let b: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .map(|(k, &a)| a * binomial(n, k).sqrt())
            .collect();
        let rev: Vec<Complex64> = b.iter().rev().copied().collect();
        OverlapCharts {
            n,
            north: with_derivatives(b),
            south: with_derivatives(rev),
        }
    }

    fn polys(&self, chart: Chart) -> &[Vec<Complex64>; 3] {
        match chart {
            Chart::North => &self.north,
            Chart::South => &self.south,
        }
    }

    fn to_chart(p: &SpherePoint) -> (Chart, Complex64) {
        if p.theta <= PI / 2.0 {
            (Chart::North, Complex64::from_polar((0.5 * p.theta).tan(), -p.phi))
        } else {
            (Chart::South, Complex64::from_polar(1.0 / (0.5 * p.theta).tan(), p.phi))
        }
    }

    fn to_sphere(chart: Chart, z: Complex64) -> SpherePoint {
        let r = z.norm();
        match chart {
            Chart::North => SpherePoint::new(2.0 * r.atan(), -z.arg()),
            Chart::South => SpherePoint::new(PI - 2.0 * r.atan(), z.arg()),
        }
    }

    /// `log g²` with its chart gradient and Hessian.
    fn log_g2(&self, chart: Chart, z: Complex64) -> (f64, [f64; 2], [[f64; 3]; 1]) {
        let [p, d1, d2] = self.polys(chart);
        let pv = eval(p, z);
        let n = self.n as f64;
        let r2 = z.norm_sqr();
        let value = pv.norm_sqr().ln() - n * (1.0 + r2).ln();
        let h = eval(d1, z) / pv;
        let hp = eval(d2, z) / pv - h * h;
        let (x, y) = (z.re, z.im);
        let q = 1.0 + r2;
        let grad = [
            2.0 * h.re - 2.0 * n * x / q,
            -2.0 * h.im - 2.0 * n * y / q,
        ];
        let hxx = 2.0 * hp.re - 2.0 * n * (q - 2.0 * x * x) / (q * q);
        let hyy = -2.0 * hp.re - 2.0 * n * (q - 2.0 * y * y) / (q * q);
        let hxy = -2.0 * hp.im + 4.0 * n * x * y / (q * q);
        (value, grad, [[hxx, hxy, hyy]])
    }

    fn g(&self, chart: Chart, z: Complex64) -> f64 {
        let p = &self.polys(chart)[0];
        (eval(p, z).norm_sqr() / (1.0 + z.norm_sqr()).powi(self.n as i32)).sqrt()
    }

    /// Damped Newton ascent on `log g²` from `start`. Returns the local
    /// maximum, its g value and whether the gradient tolerance was met.
    pub(crate) fn ascend(&self, start: &SpherePoint, cfg: &InnerConfig) -> Option<(SpherePoint, f64, bool)> {
        let (mut chart, mut z) = Self::to_chart(start);
        let (mut val, mut grad, mut hess) = self.log_g2(chart, z);
        if !val.is_finite() {
            // started on a zero of g: step off it
            z += Complex64::new(1e-3, 7e-4);
            let r = self.log_g2(chart, z);
            val = r.0;
            grad = r.1;
            hess = r.2;
            if !val.is_finite() {
                return None;
            }
        }
        let mut converged = false;
        for _ in 0..cfg.max_iterations {
            let gnorm = grad[0].hypot(grad[1]);
            if gnorm < cfg.grad_tol {
                converged = true;
                break;
            }
            let [[hxx, hxy, hyy]] = hess;
            let det = hxx * hyy - hxy * hxy;
            let mut step = if hxx < 0.0 && det > 0.0 {
                // Newton: −H⁻¹∇
                [
                    -(hyy * grad[0] - hxy * grad[1]) / det,
                    -(-hxy * grad[0] + hxx * grad[1]) / det,
                ]
            } else {
                let scale = 0.1 / gnorm.max(1.0);
                [grad[0] * scale, grad[1] * scale]
            };
            let len = step[0].hypot(step[1]);
            if len > 0.5 {
                step = [step[0] * 0.5 / len, step[1] * 0.5 / len];
            }
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let cand = z + Complex64::new(t * step[0], t * step[1]);
                let (cv, cg, ch) = self.log_g2(chart, cand);
                let slope = grad[0] * step[0] + grad[1] * step[1];
                if cv.is_finite() && cv >= val + 1e-4 * t * slope.min(0.0).abs().min(slope.abs()) - 1e-15 * val.abs() {
                    z = cand;
                    val = cv;
                    grad = cg;
                    hess = ch;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                // no ascent possible at double precision
                converged = grad[0].hypot(grad[1]) < cfg.grad_tol.sqrt();
                break;
            }
            if z.norm() > 1.0 {
                let p = Self::to_sphere(chart, z);
                let (c2, z2) = Self::to_chart(&p);
                if c2 != chart {
                    chart = c2;
                    z = z2;
                    let r = self.log_g2(chart, z);
                    val = r.0;
                    grad = r.1;
                    hess = r.2;
                }
            }
        }
        let p = Self::to_sphere(chart, z);
        Some((p, self.g(chart, z), converged))
    }

    /// Norm of the gradient of g on the unit sphere at `p`.
    pub(crate) fn sphere_gradient_norm(&self, p: &SpherePoint) -> f64 {
        let (chart, z) = Self::to_chart(p);
        let g = self.g(chart, z);
        let (_, grad, _) = self.log_g2(chart, z);
        // ∇g = g/2 ∇log g²; stereographic metric factor 2/(1+|z|²)
        0.5 * g * grad[0].hypot(grad[1]) * (1.0 + z.norm_sqr()) / 2.0
    }
}

/// Sphere gradient norm of g at `p`.
pub fn overlap_gradient_norm(state: &SymmetricState, p: &SpherePoint) -> f64 {
    OverlapCharts::new(state.coeffs()).sphere_gradient_norm(p)
}

/// `n` points of the Fibonacci lattice on the sphere.
pub fn fibonacci_lattice(count: usize) -> Vec<SpherePoint> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            SpherePoint::new(z.clamp(-1.0, 1.0).acos(), golden * i as f64)
        })
        .collect()
}

/// Local maxima of `f(θ) = Σ b_k cos(θ/2)^{n−k} sin(θ/2)^k` on [0, π] for
/// real coefficients `b`, as `(θ, f)` pairs including the endpoints.
///
/// Interior critical points are the positive real roots of
/// `D(t) = P'(t)(1+t²) − n t P(t)`, `t = tan(θ/2)`; roots with `t > 1` are
/// polished in the reversed chart `1/t`.
pub fn meridian_critical_points(b: &[f64]) -> Vec<(f64, f64)> {
    let n = b.len() - 1;
    let f = |theta: f64| -> f64 {
        let (s, c) = (0.5 * theta).sin_cos();
        b.iter()
            .enumerate()
            .filter(|(_, &bk)| bk != 0.0)
            .map(|(k, &bk)| bk * c.powi((n - k) as i32) * s.powi(k as i32))
            .sum()
    };
    let crit = |coef: &[f64]| -> Vec<f64> {
        let get = |k: isize| -> f64 {
            if k < 0 || k as usize > n {
                0.0
            } else {
                coef[k as usize]
            }
        };
        (0..=n + 1)
            .map(|j| {
                let j = j as isize;
                (j + 1) as f64 * get(j + 1) + (j - 1 - n as isize) as f64 * get(j - 1)
            })
            .collect()
    };
    let d_north = crit(b);
    let b_rev: Vec<f64> = b.iter().rev().copied().collect();
    let d_south = crit(&b_rev);

    let mut thetas = vec![0.0, PI];
    let roots = {
        let dc: Vec<Complex64> = d_north.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        crate::poly::roots_with_ends(&dc, 1e-15).ok().map(|r| r.0)
    };
    match roots {
        Some(roots) => {
            for t in roots {
                // multiple roots are only resolved to ~ε^{1/m}
                if t.re <= 0.0 || t.im.abs() > 1e-3 * (1.0 + t.norm()) {
                    continue;
                }
                let theta = if t.re <= 1.0 {
                    2.0 * newton_real(&d_north, t.re).atan()
                } else {
                    PI - 2.0 * newton_real(&d_south, 1.0 / t.re).atan()
                };
                if theta > 0.0 && theta < PI {
                    thetas.push(theta);
                }
            }
        }
        None => thetas.extend(sampled_meridian_maxima(&f, 64 * (n + 1))),
    }
    let is_peak = |theta: f64| -> bool {
        let h = 1e-5;
        let v = f(theta);
        let left = if theta > 0.0 { f((theta - h).max(0.0)) } else { f64::NEG_INFINITY };
        let right = if theta < PI { f((theta + h).min(PI)) } else { f64::NEG_INFINITY };
        let slack = 4.0 * f64::EPSILON * v.abs();
        v + slack >= left && v + slack >= right
    };
    let mut out: Vec<(f64, f64)> = Vec::new();
    for mut theta in thetas {
        if !is_peak(theta) {
            if theta == 0.0 || theta == PI {
                continue;
            }
            // degenerate critical point: refine on f directly
            theta = golden_max(&f, (theta - 1e-3).max(0.0), (theta + 1e-3).min(PI));
            if !is_peak(theta) {
                continue;
            }
        }
        if !out.iter().any(|(t, _)| (t - theta).abs() < 1e-9) {
            out.push((theta, f(theta)));
        }
    }
    out
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

fn newton_real(p: &[f64], mut x: f64) -> f64 {
    for _ in 0..8 {
        let (mut v, mut d) = (0.0, 0.0);
        for &c in p.iter().rev() {
            d = d * x + v;
            v = v * x + c;
        }
        if d == 0.0 {
            break;
        }
        let step = v / d;
        x -= step;
        if step.abs() <= 1e-16 * x.abs().max(1e-300) {
            break;
        }
    }
    x
}

fn sampled_meridian_maxima(f: &dyn Fn(f64) -> f64, samples: usize) -> Vec<f64> {
    let grid: Vec<f64> = (0..=samples).map(|i| PI * i as f64 / samples as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
    let mut out = Vec::new();
    for i in 1..samples {
        if vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1] {
            out.push(golden_max(f, grid[i - 1], grid[i + 1]));
        }
    }
    out
}

/// Maximal overlap of a positive state from its nonnegative coefficients.
pub fn positive_g_max(a: &[f64]) -> f64 {
    let n = a.len() - 1;
    let b: Vec<f64> = a
        .iter()
        .enumerate()
        .map(|(k, &x)| x * binomial(n, k).sqrt())
        .collect();
    meridian_critical_points(&b)
        .into_iter()
        .map(|(_, v)| v)
        .fold(0.0, f64::max)
}

fn sort_points(points: &mut [(SpherePoint, f64)]) {
    points.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then(a.0.theta.total_cmp(&b.0.theta))
            .then(a.0.phi.total_cmp(&b.0.phi))
    });
}

fn dedup_points(points: Vec<(SpherePoint, f64)>) -> Vec<(SpherePoint, f64)> {
    let mut out: Vec<(SpherePoint, f64)> = Vec::new();
    for (p, v) in points {
        if !out.iter().any(|(q, _)| q.angular_distance(&p) <= DEDUP_ANGLE) {
            out.push((p, v));
        }
    }
    out
}

fn split_maxima(
    mut maxima: Vec<(SpherePoint, f64)>,
    strategy: Strategy,
    state: &SymmetricState,
) -> Result<CppAnalysis> {
    sort_points(&mut maxima);
    let maxima = dedup_points(maxima);
    let g_max = maxima
        .first()
        .map(|m| m.1)
        .ok_or_else(|| Error::Numeric {
            message: format!(
                "no local maximum of the overlap converged ({strategy:?} search, coefficients {:?})",
                state.coeffs()
            ),
            residual: f64::NAN,
        })?;
    let threshold = g_max * (1.0 - CPP_REL_TOL);
    let (cpps, others): (Vec<_>, Vec<_>) = maxima.into_iter().partition(|m| m.1 >= threshold);
    Ok(CppAnalysis {
        cpps: CppSet::Discrete {
            points: cpps.into_iter().map(|m| m.0).collect(),
        },
        g_max,
        e_g: entanglement_from_overlap(g_max),
        local_maxima: others,
        strategy,
    })
}

/// Locates all closest product points of `state`.
///
/// Dicke states get the analytic ring; states that are positive (up to a
/// Z-rotation gauge) are searched on one meridian with maxima replicated
/// over the rotational order; anything else gets a multistart ascent from
/// a Fibonacci lattice.
pub fn find_cpps(state: &SymmetricState, cfg: &InnerConfig) -> Result<CppAnalysis> {
    if !state.is_normalized() {
        return domain("find_cpps requires a normalized state");
    }
    let n = state.n();
    let snapped = state.snapped();
    let info = classify(&snapped);

    if let Some(k) = info.dicke_index {
        let c2 = (n - k) as f64 / n as f64;
        let g = (binomial(n, k) * c2.powi((n - k) as i32) * (1.0 - c2).powi(k as i32)).sqrt();
        let cpps = if k == 0 {
            CppSet::Discrete { points: vec![SpherePoint::NORTH] }
        } else if k == n {
            CppSet::Discrete { points: vec![SpherePoint::SOUTH] }
        } else {
            CppSet::Ring { theta: 2.0 * c2.sqrt().acos() }
        };
        return Ok(CppAnalysis {
            cpps,
            g_max: g,
            e_g: dicke_entanglement(n, k)?,
            local_maxima: Vec::new(),
            strategy: Strategy::Dicke,
        });
    }

    if let Some(a) = rotated_dicke(&snapped)? {
        return Ok(a);
    }

    if let Some(beta) = info.positive_gauge {
        let rotated = snapped.rotate_z(beta);
        let pivot = rotated
            .coeffs()
            .iter()
            .copied()
            .fold(Complex64::new(0.0, 0.0), |b, c| if c.norm() > b.norm() { c } else { b });
        let phase = pivot.conj() / pivot.norm();
        let b: Vec<f64> = rotated
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, &c)| (c * phase).re.max(0.0) * binomial(n, k).sqrt())
            .collect();
        let m = info.rotational_order.max(1);
        let mut maxima = Vec::new();
        for (theta, _) in meridian_critical_points(&b) {
            for r in 0..m {
                let p = SpherePoint::new(theta, TAU * r as f64 / m as f64 - beta);
                // re-evaluate on the original state
                maxima.push((p, overlap(state, &p)));
            }
        }
        return split_maxima(maxima, Strategy::Meridian, state);
    }

    multistart(state, cfg)
}

/// Closest product points by unrestricted multistart ascent only, ignoring
/// any symmetry shortcut. Used to cross-check the shortcuts.
pub fn multistart_cpps(state: &SymmetricState, cfg: &InnerConfig) -> Result<CppAnalysis> {
    if !state.is_normalized() {
        return domain("multistart_cpps requires a normalized state");
    }
    multistart(state, cfg)
}

fn multistart(state: &SymmetricState, cfg: &InnerConfig) -> Result<CppAnalysis> {
    let n = state.n();
    let count = (cfg.starts_per_qubit * n).max(40 * n);
    let starts = fibonacci_lattice(count);
    let charts = OverlapCharts::new(state.coeffs());
    let maxima: Vec<(SpherePoint, f64)> = starts
        .par_iter()
        .filter_map(|s| charts.ascend(s, cfg))
        .filter(|m| m.2)
        .map(|m| snap_to_pole(state, m.0, m.1))
        .collect();
    split_maxima(maxima, Strategy::Multistart, state)
}

/// Recognizes a Dicke state in a rotated frame: its Majorana points sit in
/// two antipodal clusters. Accepted only if the state equals the rebuilt
/// Dicke state to fidelity 1 − 1e-12.
fn rotated_dicke(state: &SymmetricState) -> Result<Option<CppAnalysis>> {
    let n = state.n();
    let pts: Vec<[f64; 3]> = crate::majorana::state_to_points(state)?
        .points
        .iter()
        .map(SpherePoint::bloch)
        .collect();
    let u = pts[0];
    let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    // multiple roots split by about eps^(1/k), so the clusters are loose
    if pts.iter().any(|p| dot(p, &u).abs() < 0.99) {
        return Ok(None);
    }
    let mut sum = [0.0; 3];
    let mut k = 0;
    for p in &pts {
        let sign = if dot(p, &u) > 0.0 { 1.0 } else { -1.0 };
        k += (sign < 0.0) as usize;
        for d in 0..3 {
            sum[d] += sign * p[d];
        }
    }
    let loss = |a: [f64; 3]| -> Result<f64> {
        let axis = SpherePoint::from_bloch(a);
        let mut rebuilt = vec![axis; n - k];
        rebuilt.extend(std::iter::repeat(axis.antipode()).take(k));
        let (candidate, _) = crate::majorana::points_to_state(&rebuilt, n)?;
        Ok(1.0 - state.fidelity(&candidate)?)
    };
    // the cluster mean is off by about the root splitting; the loss is
    // quadratic in the tangent offset, so Newton steps recover the axis
    let mut a = normalize(sum);
    for _ in 0..2 {
        let helper = if a[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let e1 = normalize(cross(a, helper));
        let e2 = cross(a, e1);
        let at = |u: f64, v: f64| normalize(std::array::from_fn(|d| a[d] + u * e1[d] + v * e2[d]));
        let h = 1e-3;
        let f0 = loss(a)?;
        let (fp0, fm0, f0p, f0m) = (loss(at(h, 0.0))?, loss(at(-h, 0.0))?, loss(at(0.0, h))?, loss(at(0.0, -h))?);
        let fpp = loss(at(h, h))?;
        let fmm = loss(at(-h, -h))?;
        let (gu, gv) = ((fp0 - fm0) / (2.0 * h), (f0p - f0m) / (2.0 * h));
        let huu = (fp0 - 2.0 * f0 + fm0) / (h * h);
        let hvv = (f0p - 2.0 * f0 + f0m) / (h * h);
        let huv = (fpp + fmm + 2.0 * f0 - fp0 - fm0 - f0p - f0m) / (2.0 * h * h);
        let det = huu * hvv - huv * huv;
        if !(det > 0.0 && huu > 0.0) {
            break;
        }
        let du = -(hvv * gu - huv * gv) / det;
        let dv = -(huu * gv - huv * gu) / det;
        if (du * du + dv * dv).sqrt() > 1e-2 {
            break;
        }
        let next = at(du, dv);
        if loss(next)? > f0 {
            break;
        }
        a = next;
    }
    if loss(a)? > 1e-12 {
        return Ok(None);
    }
    let axis = SpherePoint::from_bloch(a);
    let c2 = (n - k) as f64 / n as f64;
    let cpps = match k {
        0 => CppSet::Discrete { points: vec![axis] },
        k if k == n => CppSet::Discrete { points: vec![axis.antipode()] },
        _ => CppSet::Circle { axis, angle: 2.0 * c2.sqrt().acos() },
    };
    let g_max = cpps.sample(1).iter().map(|p| overlap(state, p)).fold(0.0, f64::max);
    Ok(Some(CppAnalysis {
        cpps,
        g_max,
        e_g: entanglement_from_overlap(g_max),
        local_maxima: Vec::new(),
        strategy: Strategy::Dicke,
    }))
}

/// A maximum within 1e-6 rad of a pole is moved onto it when g there is
/// at least as large, which fixes the otherwise arbitrary azimuth.
fn snap_to_pole(state: &SymmetricState, p: SpherePoint, g: f64) -> (SpherePoint, f64) {
    for pole in [SpherePoint::NORTH, SpherePoint::SOUTH] {
        if p.angular_distance(&pole) < 1e-6 {
            let gp = overlap(state, &pole);
            if gp >= g * (1.0 - 1e-12) {
                return (pole, gp);
            }
        }
    }
    (p, g)
}

/// `E_G` with the default search budget.
pub fn geometric_measure(state: &SymmetricState) -> Result<f64> {
    find_cpps(state, &InnerConfig::default()).map(|a| a.e_g)
}

/// Closed form for `|S_{n,k}⟩` in bits.
pub fn dicke_entanglement(n: usize, k: usize) -> Result<f64> {
    if k > n {
        return domain(format!("Dicke index k = {k} out of range 0..={n}"));
    }
    if k == 0 || k == n {
        return Ok(0.0);
    }
    let (nf, kf) = (n as f64, k as f64);
    Ok(kf * (nf / kf).log2() + (nf - kf) * (nf / (nf - kf)).log2() - binomial(n, k).log2())
}

/// Mean of g² over the sphere by a Gauss–Legendre (in cos θ) × uniform-φ
/// product rule. Equals `1/(n+1)` for every state.
pub fn sphere_mean_g2(state: &SymmetricState, quadrature_order: usize) -> f64 {
    let n = state.n();
    let (nodes, weights) = gauss_legendre(quadrature_order.max(1));
    let nphi = (2 * quadrature_order).max(n + 1);
    let mut total = 0.0;
    for (&x, &w) in nodes.iter().zip(&weights) {
        let theta = x.clamp(-1.0, 1.0).acos();
        let ring: f64 = (0..nphi)
            .map(|j| {
                let p = SpherePoint { theta, phi: TAU * j as f64 / nphi as f64 };
                overlap_amplitude(state.coeffs(), &p).norm_sqr()
            })
            .sum();
        total += w * ring / nphi as f64;
    }
    total / 2.0
}

/// Reference bounds on symmetric entanglement for `n` qubits, in bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub n: usize,
    /// `log2(n+1)`.
    pub upper: f64,
    /// Most entangled Dicke state.
    pub dicke_lower: f64,
    /// `log2 √(nπ/2)`.
    pub stirling_approx: f64,
    /// `n/2`, attainable by non-symmetric states.
    pub general_lower: f64,
    /// `n − 1`, general-state upper bound; informational only.
    pub general_upper: f64,
}

pub fn bounds(n: usize) -> Result<BoundsReport> {
    if n == 0 {
        return domain("n must be at least 1");
    }
    let dicke_lower = (0..=n)
        .map(|k| dicke_entanglement(n, k).unwrap_or(0.0))
        .fold(0.0, f64::max);
    Ok(BoundsReport {
        n,
        upper: ((n + 1) as f64).log2(),
        dicke_lower,
        stirling_approx: (n as f64 * PI / 2.0).sqrt().log2(),
        general_lower: n as f64 / 2.0,
        general_upper: n as f64 - 1.0,
    })
}

/// g² on a regular θ×φ grid as CSV rows `theta,phi,g2`.
pub fn g2_grid_csv(state: &SymmetricState, n_theta: usize, n_phi: usize) -> String {
    let mut out = String::from("theta,phi,g2\n");
    for i in 0..n_theta {
        let theta = if n_theta > 1 { PI * i as f64 / (n_theta - 1) as f64 } else { 0.0 };
        for j in 0..n_phi {
            let phi = TAU * j as f64 / n_phi as f64;
            let g2 = overlap_amplitude(state.coeffs(), &SpherePoint { theta, phi }).norm_sqr();
            let _ = writeln!(out, "{},{},{}", fmt_sig(theta), fmt_sig(phi), fmt_sig(g2));
        }
    }
    out
}

/// Maximum of g over a dense θ×φ grid (brute-force reference).
pub fn grid_max(state: &SymmetricState, n_theta: usize, n_phi: usize) -> (SpherePoint, f64) {
    (0..n_theta)
        .into_par_iter()
        .map(|i| {
            let theta = PI * i as f64 / (n_theta - 1) as f64;
            (0..n_phi)
                .map(|j| {
                    let p = SpherePoint { theta, phi: TAU * j as f64 / n_phi as f64 };
                    (p, overlap(state, &p))
                })
                .fold((SpherePoint::NORTH, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
        })
        .reduce(
            || (SpherePoint::NORTH, f64::NEG_INFINITY),
            |a, b| if b.1 > a.1 || (b.1 == a.1 && b.0.theta < a.0.theta) { b } else { a },
        )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotated_dicke_has_circle_of_cpps() {
        let d = crate::state::make_dicke(6, 2).unwrap();
        let s = d.rotate_y(0.7).rotate_z(1.1);
        let a = find_cpps(&s, &InnerConfig::default()).unwrap();
        assert!(matches!(a.cpps, CppSet::Circle { .. }), "{:?}", a.cpps);
        assert!((a.e_g - dicke_entanglement(6, 2).unwrap()).abs() < 1e-10);
        for p in a.cpps.sample(16) {
            assert!((overlap(&s, &p) - a.g_max).abs() < 1e-10);
        }
        // a rotated product state has one CPP, and GHZ on two qubits a circle
        let prod = crate::state::make_dicke(5, 0).unwrap().rotate_y(1.3);
        let a = find_cpps(&prod, &InnerConfig::default()).unwrap();
        assert_eq!(a.cpps.count(), Some(1));
        assert!(a.e_g.abs() < 1e-12);
        let ghz2 = SymmetricState::from_sparse(2, &[(0, 1.0), (2, 1.0)]).unwrap();
        let a = find_cpps(&ghz2, &InnerConfig::default()).unwrap();
        assert_eq!(a.cpps.count(), None);
        assert!((a.e_g - 1.0).abs() < 1e-12);
    }
    use crate::majorana::state_to_points;
    use crate::state::make_dicke;
    use approx::assert_abs_diff_eq;

    fn ghz3() -> SymmetricState {
        SymmetricState::from_sparse(3, &[(0, 1.0), (3, 1.0)]).unwrap()
    }

    #[test]
    fn overlap_examples() {
        let w = make_dicke(3, 1).unwrap();
        let sigma = SpherePoint::new(2.0 * (2.0f64 / 3.0).sqrt().acos(), 0.0);
        assert_abs_diff_eq!(overlap(&w, &sigma), 2.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(overlap(&make_dicke(5, 0).unwrap(), &SpherePoint::NORTH), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(overlap(&ghz3(), &SpherePoint::NORTH), 1.0 / 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn point_form_agrees() {
        let s = SymmetricState::new(vec![
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.2, 0.5),
            Complex64::new(0.4, -0.3),
            Complex64::new(0.1, 0.2),
        ])
        .unwrap();
        let d = state_to_points(&s).unwrap();
        for p in fibonacci_lattice(50) {
            assert_abs_diff_eq!(overlap(&s, &p), overlap_from_points(&d, &p), epsilon = 1e-12);
        }
    }

    #[test]
    fn dicke_closed_form() {
        assert_abs_diff_eq!(dicke_entanglement(3, 1).unwrap(), (9.0f64 / 4.0).log2(), epsilon = 1e-14);
        assert_eq!(dicke_entanglement(7, 0).unwrap(), 0.0);
        assert_eq!(dicke_entanglement(7, 7).unwrap(), 0.0);
        assert_abs_diff_eq!(dicke_entanglement(4, 2).unwrap(), (8.0f64 / 3.0).log2(), epsilon = 1e-14);
        assert!(dicke_entanglement(3, 4).is_err());
    }

    #[test]
    fn dicke_ring() {
        let a = find_cpps(&make_dicke(6, 3).unwrap(), &InnerConfig::default()).unwrap();
        match a.cpps {
            CppSet::Ring { theta } => assert_abs_diff_eq!(theta, PI / 2.0, epsilon = 1e-14),
            _ => panic!("expected a ring"),
        }
        let p = find_cpps(&make_dicke(4, 0).unwrap(), &InnerConfig::default()).unwrap();
        assert_eq!(p.cpps, CppSet::Discrete { points: vec![SpherePoint::NORTH] });
        assert_eq!(p.e_g, 0.0);
    }

    #[test]
    fn ghz_has_two_polar_cpps() {
        let a = find_cpps(&ghz3(), &InnerConfig::default()).unwrap();
        assert_abs_diff_eq!(a.e_g, 1.0, epsilon = 1e-12);
        let pts = a.cpps.sample(0);
        assert_eq!(pts.len(), 2);
        assert!(pts.iter().all(|p| p.is_pole()));
    }

    #[test]
    fn tetrahedron_cpps_at_vertices() {
        let t = SymmetricState::from_sparse(4, &[(0, (1.0f64 / 3.0).sqrt()), (3, (2.0f64 / 3.0).sqrt())]).unwrap();
        let a = find_cpps(&t, &InnerConfig::default()).unwrap();
        assert_abs_diff_eq!(a.e_g, 3f64.log2(), epsilon = 1e-12);
        assert_eq!(a.cpps.count(), Some(4));
        let mps = state_to_points(&t).unwrap().points;
        let cpps = a.cpps.sample(0);
        assert!(crate::assignment::matched_max_distance(&mps, &cpps) < 1e-7);
    }

    #[test]
    fn multistart_matches_meridian_for_rotated_positive_state() {
        // a positive state hidden by a Y rotation must give the same E_G
        let t = SymmetricState::from_real(&[0.3, 0.0, 0.5, 0.2, 0.6, 0.1]).unwrap();
        let e0 = find_cpps(&t, &InnerConfig::default()).unwrap();
        assert_eq!(e0.strategy, Strategy::Meridian);
        let r = t.rotate_y(0.9).rotate_z(0.4);
        let e1 = find_cpps(&r, &InnerConfig::default()).unwrap();
        assert_eq!(e1.strategy, Strategy::Multistart);
        assert_abs_diff_eq!(e0.e_g, e1.e_g, epsilon = 1e-10);
    }

    #[test]
    fn cpps_are_stationary() {
        let s = SymmetricState::new(vec![
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.2, 0.5),
            Complex64::new(0.4, -0.3),
            Complex64::new(0.1, 0.2),
            Complex64::new(0.2, 0.0),
        ])
        .unwrap();
        let a = find_cpps(&s, &InnerConfig::default()).unwrap();
        for p in a.cpps.sample(0) {
            assert!(overlap_gradient_norm(&s, &p) < 1e-8);
            assert!(overlap(&s, &p) >= a.g_max * (1.0 - 1e-9));
        }
        let (_, gm) = grid_max(&s, 201, 400);
        assert!(gm <= a.g_max + 1e-12);
        assert!(a.g_max - gm < 1e-3);
    }

    #[test]
    fn sphere_mean_examples() {
        assert_abs_diff_eq!(sphere_mean_g2(&make_dicke(1, 0).unwrap(), 4), 0.5, epsilon = 1e-14);
        let s = SymmetricState::from_real(&[0.1, 0.7, -0.2, 0.3, 0.5]).unwrap();
        assert_abs_diff_eq!(sphere_mean_g2(&s, 12), 0.2, epsilon = 1e-12);
    }

    #[test]
    fn bounds_examples() {
        let b3 = bounds(3).unwrap();
        assert_abs_diff_eq!(b3.upper, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b3.dicke_lower, (9.0f64 / 4.0).log2(), epsilon = 1e-14);
        let b2 = bounds(2).unwrap();
        assert_abs_diff_eq!(b2.upper, 3f64.log2(), epsilon = 1e-15);
        assert_abs_diff_eq!(b2.dicke_lower, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(bounds(12).unwrap().upper, 13f64.log2(), epsilon = 1e-15);
        assert!(bounds(0).is_err());
    }

    #[test]
    fn grid_csv_shape() {
        let csv = g2_grid_csv(&ghz3(), 5, 8);
        assert_eq!(csv.lines().count(), 41);
        assert!(csv.starts_with("theta,phi,g2\n"));
    }
}
