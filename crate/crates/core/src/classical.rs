//! Thomson (minimum Coulomb energy) and Tóth (maximin distance) point
//! configurations on the unit sphere, and their use as Majorana points.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::extremal::SearchConfig;
use crate::geometric::{bounds, find_cpps};
use crate::majorana::points_to_state;
use crate::state::{SpherePoint, SymmetricState};
use crate::{fmt_sig, InnerConfig};

type Vec3 = [f64; 3];

fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn normalized(a: Vec3) -> Vec3 {
    let r = norm(&a);
    [a[0] / r, a[1] / r, a[2] / r]
}

/// Minimum pairwise Euclidean distance.
pub fn toth_cost(points: &[Vec3]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            m = m.min(norm(&sub(&points[i], &points[j])));
        }
    }
    m
}

/// `Σ_{i<j} 1/|r_i − r_j|`.
pub fn thomson_cost(points: &[Vec3]) -> f64 {
    let mut e = 0.0;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            e += 1.0 / norm(&sub(&points[i], &points[j]));
        }
    }
    e
}

/// `n` unit vectors with both classical costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalConfiguration {
    pub points: Vec<Vec3>,
    pub toth_cost: f64,
    pub thomson_cost: f64,
    pub converged: bool,
}

impl ClassicalConfiguration {
    /// Normalizes the vectors and computes both costs.
    pub fn from_vectors(points: Vec<Vec3>) -> Result<Self> {
        if points.len() < 2 {
            return domain("a configuration needs at least two points");
        }
        if points.iter().any(|p| !(norm(p) > 0.0) || !norm(p).is_finite()) {
            return domain("configuration vectors must be finite and nonzero");
        }
        let points: Vec<Vec3> = points.into_iter().map(normalized).collect();
        Ok(ClassicalConfiguration {
            toth_cost: toth_cost(&points),
            thomson_cost: thomson_cost(&points),
            points,
            converged: true,
        })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn sphere_points(&self) -> Vec<SpherePoint> {
        self.points.iter().map(|&p| SpherePoint::from_bloch(p)).collect()
    }

    pub fn centroid(&self) -> Vec3 {
        let n = self.n() as f64;
        let mut c = [0.0; 3];
        for p in &self.points {
            for d in 0..3 {
                c[d] += p[d] / n;
            }
        }
        c
    }

    /// Rotated so a nonzero centroid points to +z and the first non-polar
    /// point (in input order) lies on φ = 0. Costs are recomputed.
    pub fn canonicalize(&self) -> ClassicalConfiguration {
        let c = self.centroid();
        let mut pts = self.points.clone();
        if norm(&c) > 1e-9 {
            let r = rotation_to_z(normalized(c));
            pts = pts.iter().map(|p| apply(&r, p)).collect();
        }
        if let Some(p) = pts.iter().find(|p| p[0].hypot(p[1]) > 1e-9) {
            let a = -p[1].atan2(p[0]);
            let r = [[a.cos(), -a.sin(), 0.0], [a.sin(), a.cos(), 0.0], [0.0, 0.0, 1.0]];
            pts = pts.iter().map(|p| normalized(apply(&r, p))).collect();
        }
        ClassicalConfiguration {
            toth_cost: toth_cost(&pts),
            thomson_cost: thomson_cost(&pts),
            points: pts,
            converged: self.converged,
        }
    }

    /// CSV rows `index,theta,phi,x,y,z`.
    pub fn to_csv(&self) -> String {
        crate::majorana::points_csv(&self.sphere_points())
    }
}

fn apply(r: &[[f64; 3]; 3], p: &Vec3) -> Vec3 {
    [dot(&r[0], p), dot(&r[1], p), dot(&r[2], p)]
}

/// Rotation taking unit vector `u` to +z (Rodrigues).
fn rotation_to_z(u: Vec3) -> [[f64; 3]; 3] {
    let z = [0.0, 0.0, 1.0];
    let c = dot(&u, &z);
    if c > 1.0 - 1e-15 {
        return [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    }
    if c < -1.0 + 1e-15 {
        return [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]];
    }
    let v = [u[1] * z[2] - u[2] * z[1], u[2] * z[0] - u[0] * z[2], u[0] * z[1] - u[1] * z[0]];
    let k = 1.0 / (1.0 + c);
    let vx = [[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]];
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let vx2: f64 = (0..3).map(|m| vx[i][m] * vx[m][j]).sum();
            r[i][j] = if i == j { 1.0 } else { 0.0 } + vx[i][j] + k * vx2;
        }
    }
    r
}

fn random_points(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec3> {
    (0..n)
        .map(|_| {
            let z: f64 = rng.gen::<f64>() * 2.0 - 1.0;
            let phi: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
            let r = (1.0 - z * z).sqrt();
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Riemannian descent: tangent-projected gradient, renormalized step,
/// backtracking with step growth. Minimizes `cost`.
fn riemannian_descent(
    mut pts: Vec<Vec3>,
    cost: &dyn Fn(&[Vec3]) -> f64,
    grad: &dyn Fn(&[Vec3]) -> Vec<Vec3>,
    max_iter: usize,
    tol: f64,
) -> (Vec<Vec3>, bool) {
    let mut f = cost(&pts);
    let mut step = 0.1;
    for _ in 0..max_iter {
        let g = grad(&pts);
        let pg: Vec<Vec3> = pts
            .iter()
            .zip(&g)
            .map(|(p, gi)| {
                let d = dot(gi, p);
                [gi[0] - d * p[0], gi[1] - d * p[1], gi[2] - d * p[2]]
            })
            .collect();
        let gnorm = pg.iter().map(norm).fold(0.0, f64::max);
        if gnorm < tol {
            return (pts, true);
        }
        let mut accepted = false;
        while step > 1e-18 {
            let cand: Vec<Vec3> = pts
                .iter()
                .zip(&pg)
                .map(|(p, d)| normalized([p[0] - step * d[0], p[1] - step * d[1], p[2] - step * d[2]]))
                .collect();
            let fc = cost(&cand);
            if fc < f {
                pts = cand;
                f = fc;
                accepted = true;
                step *= 1.5;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return gradient_polish(pts, grad, max_iter, tol);
        }
    }
    (pts, false)
}

fn projected_gradient(pts: &[Vec3], grad: &dyn Fn(&[Vec3]) -> Vec<Vec3>) -> (Vec<Vec3>, f64) {
    let pg: Vec<Vec3> = pts
        .iter()
        .zip(grad(pts))
        .map(|(p, gi)| {
            let d = dot(&gi, p);
            [gi[0] - d * p[0], gi[1] - d * p[1], gi[2] - d * p[2]]
        })
        .collect();
    let gnorm = pg.iter().map(norm).fold(0.0, f64::max);
    (pg, gnorm)
}

/// Once cost differences drown in rounding, steps are accepted when they
/// shrink the projected gradient instead.
fn gradient_polish(
    mut pts: Vec<Vec3>,
    grad: &dyn Fn(&[Vec3]) -> Vec<Vec3>,
    max_iter: usize,
    tol: f64,
) -> (Vec<Vec3>, bool) {
    let (mut pg, mut gnorm) = projected_gradient(&pts, grad);
    let mut step = 0.1;
    for _ in 0..max_iter {
        if gnorm < tol {
            return (pts, true);
        }
        let mut accepted = false;
        while step > 1e-18 {
            let cand: Vec<Vec3> = pts
                .iter()
                .zip(&pg)
                .map(|(p, d)| normalized([p[0] - step * d[0], p[1] - step * d[1], p[2] - step * d[2]]))
                .collect();
            let (cg, cn) = projected_gradient(&cand, grad);
            if cn < gnorm {
                pts = cand;
                pg = cg;
                gnorm = cn;
                accepted = true;
                step *= 1.5;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (pts, gnorm < tol.sqrt())
}

fn thomson_gradient(pts: &[Vec3]) -> Vec<Vec3> {
    let n = pts.len();
    let mut g = vec![[0.0; 3]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = sub(&pts[i], &pts[j]);
            let r = norm(&d);
            let s = 1.0 / (r * r * r);
            for k in 0..3 {
                g[i][k] -= d[k] * s;
                g[j][k] += d[k] * s;
            }
        }
    }
    g
}

fn best_of<F>(n: usize, cfg: &SearchConfig, run: F, better: fn(&ClassicalConfiguration) -> f64) -> Result<ClassicalConfiguration>
where
    F: Fn(Vec<Vec3>) -> (Vec<Vec3>, bool) + Sync,
{
    if n < 2 {
        return domain("classical problems need n ≥ 2");
    }
    let restarts = cfg.restarts.max(1);
    let results: Vec<ClassicalConfiguration> = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i as u64 + 1);
            let (pts, converged) = run(random_points(n, &mut rng));
            let mut c = ClassicalConfiguration::from_vectors(pts).expect("unit vectors");
            c.converged = converged;
            c
        })
        .collect();
    Ok(results
        .into_iter()
        .min_by(|a, b| better(a).total_cmp(&better(b)))
        .expect("at least one restart"))
}

/// Multistart Riemannian gradient descent on the Coulomb energy.
pub fn solve_thomson(n: usize, cfg: &SearchConfig) -> Result<ClassicalConfiguration> {
    best_of(
        n,
        cfg,
        |p| riemannian_descent(p, &thomson_cost, &thomson_gradient, 20_000, 1e-10),
        |c| c.thomson_cost,
    )
}

/// `−(1/β) log Σ exp(−β d_ij)`, stabilized; negated for minimization.
fn neg_softmin(pts: &[Vec3], beta: f64) -> f64 {
    let dmin = toth_cost(pts);
    let mut s = 0.0;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            s += (-beta * (norm(&sub(&pts[i], &pts[j])) - dmin)).exp();
        }
    }
    -(dmin - s.ln() / beta)
}

fn neg_softmin_gradient(pts: &[Vec3], beta: f64) -> Vec<Vec3> {
    let n = pts.len();
    let dmin = toth_cost(pts);
    let mut total = 0.0;
    let mut g = vec![[0.0; 3]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = sub(&pts[i], &pts[j]);
            let r = norm(&d);
            let w = (-beta * (r - dmin)).exp();
            total += w;
            for k in 0..3 {
                // ascent direction of d_ij, negated
                g[i][k] -= w * d[k] / r;
                g[j][k] += w * d[k] / r;
            }
        }
    }
    for gi in g.iter_mut() {
        for v in gi.iter_mut() {
            *v /= total;
        }
    }
    g
}

/// Soft-min continuation for the maximin distance: β doubles from 32 to
/// 4096, then keeps doubling to 2²⁰ as the final polish.
pub fn solve_toth(n: usize, cfg: &SearchConfig) -> Result<ClassicalConfiguration> {
    best_of(
        n,
        cfg,
        |mut p| {
            // spread first so no pair starts nearly coincident
            p = riemannian_descent(p, &thomson_cost, &thomson_gradient, 200, 1e-6).0;
            let mut beta = 32.0;
            let mut history = Vec::new();
            while beta <= (1u64 << 20) as f64 {
                p = riemannian_descent(
                    p,
                    &|x: &[Vec3]| neg_softmin(x, beta),
                    &|x: &[Vec3]| neg_softmin_gradient(x, beta),
                    if beta <= 4096.0 { 3000 } else { 1500 },
                    1e-12,
                )
                .0;
                history.push(toth_cost(&p));
                beta *= 2.0;
            }
            // converged once the maximin distance moves less than the
            // softmin bias ln(pairs)/β over the last two doublings
            let k = history.len();
            let pairs = (n * (n - 1) / 2) as f64;
            let bias = pairs.ln().max(1.0) / (beta / 2.0);
            let converged = (history[k - 1] - history[k - 3]).abs() <= 4.0 * bias;
            (p, converged)
        },
        |c| -c.toth_cost,
    )
}

/// Uses the configuration's points as Majorana points.
pub fn to_symmetric_state(config: &ClassicalConfiguration) -> Result<SymmetricState> {
    Ok(points_to_state(&config.sphere_points(), config.n())?.0)
}

/// One row of the entanglement-scaling table, bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub n: usize,
    pub toth_eg: f64,
    pub thomson_eg: f64,
    pub dicke_lower: f64,
    pub upper: f64,
}

/// E_G of the Tóth and Thomson solutions for n = 2..=n_max, with the Dicke
/// lower bound and the `log2(n+1)` upper bound.
pub fn lower_bound_curve(n_max: usize, cfg: &SearchConfig) -> Result<Vec<CurveRow>> {
    if !(2..=16).contains(&n_max) {
        return domain("n_max must lie in 2..=16");
    }
    let inner = InnerConfig::default();
    (2..=n_max)
        .map(|n| {
            let toth = to_symmetric_state(&solve_toth(n, cfg)?)?;
            let thomson = to_symmetric_state(&solve_thomson(n, cfg)?)?;
            let b = bounds(n)?;
            Ok(CurveRow {
                n,
                toth_eg: find_cpps(&toth, &inner)?.e_g,
                thomson_eg: find_cpps(&thomson, &inner)?.e_g,
                dicke_lower: b.dicke_lower,
                upper: b.upper,
            })
        })
        .collect()
}

pub fn curve_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from("n,toth_eg,thomson_eg,dicke_lower,upper\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            fmt_sig(r.toth_eg),
            fmt_sig(r.thomson_eg),
            fmt_sig(r.dicke_lower),
            fmt_sig(r.upper)
        );
    }
    out
}
