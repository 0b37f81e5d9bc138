//! Complex polynomial root finding (Aberth–Ehrlich) and helpers.
//!
//! Polynomials are coefficient slices in ascending order:
//! `p(x) = c[0] + c[1] x + ... + c[d] x^d`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 200;
pub const RESIDUAL_TOL: f64 = 1e-12;

/// Evaluates `p` and `p'` at `x` by Horner's rule.
pub fn eval_with_derivative(p: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut val = Complex64::new(0.0, 0.0);
    let mut der = Complex64::new(0.0, 0.0);
    for &c in p.iter().rev() {
        der = der * x + val;
        val = val * x + c;
    }
    (val, der)
}

pub fn eval(p: &[Complex64], x: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

pub fn derivative(p: &[Complex64]) -> Vec<Complex64> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as f64)
        .collect()
}

/// Running error bound of Horner evaluation, used as the stopping scale.
fn horner_error_scale(p: &[Complex64], x: Complex64) -> f64 {
    let r = x.norm();
    p.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

/// Roots of a polynomial whose leading and trailing coefficients are
/// nonzero, by simultaneous Aberth–Ehrlich iteration.
///
/// Initial guesses sit on a circle whose radius is the geometric mean of
/// the root moduli, bounded by the Cauchy radius. Each converged root gets
/// one Newton polish step at the end.
pub fn aberth(p: &[Complex64]) -> Result<Vec<Complex64>> {
    let degree = p.len() - 1;
    if degree == 0 {
        return Ok(Vec::new());
    }
    let lead = p[degree];
    if degree == 1 {
        return Ok(vec![-p[0] / lead]);
    }
    let cauchy = 1.0
        + p[..degree]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);
    let mean_radius = (p[0].norm() / lead.norm()).powf(1.0 / degree as f64);
    let radius = mean_radius.clamp(1e-8, cauchy);
    let mut z: Vec<Complex64> = (0..degree)
        .map(|j| Complex64::from_polar(radius, TAU * j as f64 / degree as f64 + 0.4))
        .collect();
    let mut done = vec![false; degree];

    for _ in 0..MAX_ITERATIONS {
        let mut all_done = true;
        for i in 0..degree {
            if done[i] {
                continue;
            }
            let (val, der) = eval_with_derivative(p, z[i]);
            let scale = horner_error_scale(p, z[i]);
            if val.norm() <= 4.0 * f64::EPSILON * scale {
                done[i] = true;
                continue;
            }
            all_done = false;
            let ratio = val / der;
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let denom = Complex64::new(1.0, 0.0) - ratio * repulsion;
            let step = if denom.norm() == 0.0 || !denom.re.is_finite() {
                ratio
            } else {
                ratio / denom
            };
            if !step.re.is_finite() || !step.im.is_finite() {
                // der vanished: nudge off the critical point
                let bump = Complex64::new(1e-8 * (1.0 + z[i].norm()), 1e-8);
                z[i] += bump;
                continue;
            }
            z[i] -= step;
            if step.norm() <= RESIDUAL_TOL * z[i].norm().max(1e-300) {
                done[i] = true;
            }
        }
        if all_done {
            break;
        }
    }

    // polish
    for zi in z.iter_mut() {
        let (val, der) = eval_with_derivative(p, *zi);
        if der.norm() > 0.0 {
            let cand = *zi - val / der;
            if eval(p, cand).norm() <= val.norm() {
                *zi = cand;
            }
        }
    }

    let worst = z
        .iter()
        .map(|&zi| eval(p, zi).norm() / horner_error_scale(p, zi).max(1e-300))
        .fold(0.0, f64::max);
    // Clustered roots can only be resolved to ~ε^{1/m}; the relative
    // residual stays tiny regardless, so that is what is checked.
    if !(worst <= 1e-9) {
        return Err(Error::Numeric {
            message: format!("Aberth iteration did not converge for degree {degree}"),
            residual: worst,
        });
    }
    Ok(z)
}

/// All roots of `p`, allowing zero leading and trailing coefficients.
///
/// Returns `(roots, at_zero, at_infinity)`: explicit finite nonzero roots,
/// the multiplicity of the root at 0 and the degree deficit (roots at
/// infinity) relative to `p.len() - 1`. Coefficients with modulus below
/// `zero_tol · max|c|` count as absent at either end.
pub fn roots_with_ends(p: &[Complex64], zero_tol: f64) -> Result<(Vec<Complex64>, usize, usize)> {
    let scale = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::Domain("zero polynomial has no well-defined roots".into()));
    }
    let thr = zero_tol * scale;
    let lo = p.iter().position(|c| c.norm() > thr).unwrap();
    let hi = p.iter().rposition(|c| c.norm() > thr).unwrap();
    let core = &p[lo..=hi];
    let roots = aberth(core)?;
    Ok((roots, lo, p.len() - 1 - hi))
}

/// Groups values within `tol` of each other (single linkage) and returns
/// each cluster's mean with its multiplicity.
pub fn cluster(points: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let m = points.len();
    let mut label: Vec<usize> = (0..m).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..m {
        for j in (i + 1)..m {
            if (points[i] - points[j]).norm() <= tol {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<(usize, Complex64, usize)> = Vec::new();
    for i in 0..m {
        let r = find(&mut label, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += points[i];
                g.2 += 1;
            }
            None => groups.push((r, points[i], 1)),
        }
    }
    groups
        .into_iter()
        .map(|(_, sum, count)| (sum / count as f64, count))
        .collect()
}

/// Coefficients of `Π (a_i + b_i x)`.
pub fn product_of_linear(factors: &[(Complex64, Complex64)]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    for &(a, b) in factors {
        let mut next = vec![Complex64::new(0.0, 0.0); out.len() + 1];
        for (k, &c) in out.iter().enumerate() {
            next[k] += c * a;
            next[k + 1] += c * b;
        }
        out = next;
    }
    out
}
