//! The Majorana map between Dicke coefficients and point multisets.
//!
//! Conventions: the amplitude of a symmetric product state `|σ⟩^{⊗n}`,
//! `σ = (θ, φ)`, is `cos(θ/2)^n Q(w)` with `w = e^{−iφ} tan(θ/2)` and
//! `Q(w) = Σ a_k √C(n,k) w^k`. Zeros of `Q` are the antipodes of the
//! Majorana points; missing top-degree terms are zeros at the south pole,
//! so they place Majorana points on the north pole.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::permanent::permanent;
use crate::poly::{product_of_linear, roots_with_ends};
use crate::state::{SpherePoint, SymmetricState};
use crate::{binomial, fmt_sig};

/// Majorana points closer than this angle are reported as one point with
/// multiplicity.
pub const CLUSTER_TOL: f64 = 1e-6;

/// The n Majorana points of a state together with the normalization
/// constant `K = n!·perm(⟨φ_i|φ_j⟩)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajoranaDistribution {
    pub n: usize,
    pub points: Vec<SpherePoint>,
    pub k_norm: f64,
}

impl MajoranaDistribution {
    /// Builds the distribution for a point multiset, computing `K`.
    pub fn from_points(points: Vec<SpherePoint>) -> Result<Self> {
        if points.is_empty() {
            return domain("need at least one Majorana point");
        }
        let k_norm = normalization_constant(&points);
        Ok(MajoranaDistribution {
            n: points.len(),
            points,
            k_norm,
        })
    }

    /// Distinct points with their multiplicities (angular tolerance 1e-6).
    pub fn multiplicities(&self) -> Vec<(SpherePoint, usize)> {
        let mut out: Vec<(SpherePoint, usize)> = Vec::new();
        for p in &self.points {
            match out.iter_mut().find(|(q, _)| q.angular_distance(p) <= CLUSTER_TOL) {
                Some(entry) => entry.1 += 1,
                None => out.push((*p, 1)),
            }
        }
        out
    }

    /// Number of points within [`CLUSTER_TOL`] of the north / south pole.
    pub fn pole_counts(&self) -> (usize, usize) {
        let north = self
            .points
            .iter()
            .filter(|p| p.theta <= CLUSTER_TOL)
            .count();
        let south = self
            .points
            .iter()
            .filter(|p| PI - p.theta <= CLUSTER_TOL)
            .count();
        (north, south)
    }

    /// CSV rows `index,theta,phi,x,y,z`.
    pub fn to_csv(&self) -> String {
        points_csv(&self.points)
    }
}

/// CSV rows `index,theta,phi,x,y,z` with 12 significant digits.
pub fn points_csv(points: &[SpherePoint]) -> String {
    let mut out = String::from("index,theta,phi,x,y,z\n");
    for (i, p) in points.iter().enumerate() {
        let [x, y, z] = p.bloch();
        let _ = writeln!(
            out,
            "{i},{},{},{},{},{}",
            fmt_sig(p.theta),
            fmt_sig(p.phi),
            fmt_sig(x),
            fmt_sig(y),
            fmt_sig(z)
        );
    }
    out
}

/// Gram matrix `G_ij = ⟨φ_i|φ_j⟩`.
fn gram(points: &[SpherePoint]) -> Vec<Vec<Complex64>> {
    let amps: Vec<(Complex64, Complex64)> = points.iter().map(SpherePoint::amplitudes).collect();
    amps.iter()
        .map(|(ci, si)| {
            amps.iter()
                .map(|(cj, sj)| ci.conj() * cj + si.conj() * sj)
                .collect()
        })
        .collect()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `K = n! · perm(Gram)`; the permanent of a Gram matrix is real and
/// nonnegative, the imaginary residue is dropped.
pub fn normalization_constant(points: &[SpherePoint]) -> f64 {
    let p = permanent(&gram(points));
    factorial(points.len()) * p.re
}

/// Unnormalized coefficients `n!·E_k/√C(n,k)` where
/// `Π_i (C_i + S_i x) = Σ E_k x^k`.
fn raw_coefficients(points: &[SpherePoint]) -> Vec<Complex64> {
    let n = points.len();
    let factors: Vec<(Complex64, Complex64)> = points.iter().map(SpherePoint::amplitudes).collect();
    let e = product_of_linear(&factors);
    let nf = factorial(n);
    e.iter()
        .enumerate()
        .map(|(k, &ek)| ek * nf / binomial(n, k).sqrt())
        .collect()
}

/// Assembles the normalized state from its Majorana points.
pub fn points_to_state(points: &[SpherePoint], n: usize) -> Result<(SymmetricState, MajoranaDistribution)> {
    if points.len() != n {
        return domain(format!("expected {n} Majorana points, got {}", points.len()));
    }
    if n == 0 {
        return domain("n must be at least 1");
    }
    let raw = raw_coefficients(points);
    let state = SymmetricState::new(raw)?;
    let dist = MajoranaDistribution::from_points(points.to_vec())?;
    Ok((state, dist))
}

/// Squared norm of the unnormalized permutation sum; equals `K`.
pub fn raw_norm_sqr(points: &[SpherePoint]) -> f64 {
    raw_coefficients(points).iter().map(|c| c.norm_sqr()).sum()
}

/// Majorana point whose antipode has stereographic amplitude coordinate `w`.
fn point_from_amplitude_zero(w: Complex64) -> SpherePoint {
    let r = w.norm();
    SpherePoint::new(2.0 * (1.0 / r).atan(), PI - w.arg())
}

/// Single-linkage clustering by angular distance; each cluster becomes the
/// normalized mean of its Bloch vectors.
fn cluster_points(points: &[SpherePoint], tol: f64) -> Vec<(SpherePoint, usize)> {
    let m = points.len();
    let mut label: Vec<usize> = (0..m).collect();
    for i in 0..m {
        for j in (i + 1)..m {
            if points[i].angular_distance(&points[j]) <= tol {
                let (a, b) = (label[i], label[j]);
                if a != b {
                    for l in label.iter_mut() {
                        if *l == b {
                            *l = a;
                        }
                    }
                }
            }
        }
    }
    let mut roots: Vec<usize> = label.clone();
    roots.sort_unstable();
    roots.dedup();
    roots
        .into_iter()
        .map(|r| {
            let members: Vec<&SpherePoint> = (0..m).filter(|&i| label[i] == r).map(|i| &points[i]).collect();
            if members.len() == 1 {
                return (*members[0], 1);
            }
            let mut v = [0.0; 3];
            for p in &members {
                let b = p.bloch();
                for d in 0..3 {
                    v[d] += b[d];
                }
            }
            (SpherePoint::from_bloch(v), members.len())
        })
        .collect()
}

/// Computes the Majorana points of a state.
pub fn state_to_points(state: &SymmetricState) -> Result<MajoranaDistribution> {
    let n = state.n();
    let b: Vec<Complex64> = state
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, &a)| a * binomial(n, k).sqrt())
        .collect();
    let (roots, at_zero, at_infinity) = roots_with_ends(&b, 1e-14)?;
    let mut points = Vec::with_capacity(n);
    points.extend(std::iter::repeat(SpherePoint::NORTH).take(at_infinity));
    points.extend(std::iter::repeat(SpherePoint::SOUTH).take(at_zero));
    // a split multiple root is replaced by its centroid
    let finite: Vec<SpherePoint> = roots.into_iter().map(point_from_amplitude_zero).collect();
    for (p, mult) in cluster_points(&finite, CLUSTER_TOL) {
        points.extend(std::iter::repeat(p).take(mult));
    }
    MajoranaDistribution::from_points(points)
}

/// Maps every point to its mirror image through the X-Z plane; this is the
/// distribution of the complex-conjugated state.
pub fn reflect_conjugate(dist: &MajoranaDistribution) -> MajoranaDistribution {
    MajoranaDistribution {
        n: dist.n,
        points: dist.points.iter().map(SpherePoint::conjugate).collect(),
        k_norm: dist.k_norm,
    }
}

/// Applies a rotation of the Bloch sphere (3×3 matrix) to every point.
pub fn rotate_points(points: &[SpherePoint], r: [[f64; 3]; 3]) -> Vec<SpherePoint> {
    points
        .iter()
        .map(|p| {
            let v = p.bloch();
            let w = [
                r[0][0] * v[0] + r[0][1] * v[1] + r[0][2] * v[2],
                r[1][0] * v[0] + r[1][1] * v[1] + r[1][2] * v[2],
                r[2][0] * v[0] + r[2][1] * v[1] + r[2][2] * v[2],
            ];
            SpherePoint::from_bloch(w)
        })
        .collect()
}

/// Bloch-sphere rotation about +y by `angle` (image of `R_y(angle)`).
pub fn y_rotation(angle: f64) -> [[f64; 3]; 3] {
    let (s, c) = angle.sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

/// `R_y(angle)^{⊗n}` computed by rotating the Majorana points.
pub fn rotate_y_via_points(state: &SymmetricState, angle: f64) -> Result<SymmetricState> {
    let dist = state_to_points(state)?;
    let rotated = rotate_points(&dist.points, y_rotation(angle));
    Ok(points_to_state(&rotated, state.n())?.0)
}
