//! Symmetric states in the Dicke basis and points on the Bloch sphere.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::binomial;

/// Tolerance on `Σ|a_k|² = 1`.
pub const NORM_TOL: f64 = 1e-10;
/// Coefficients with modulus below this are treated as structurally zero.
pub const SUPPORT_TOL: f64 = 1e-12;
/// Tolerance for the real / positive predicates.
pub const PHASE_TOL: f64 = 1e-10;

/// A point on the unit sphere, equivalently the single-qubit state
/// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub theta: f64,
    pub phi: f64,
}

impl SpherePoint {
    pub const NORTH: SpherePoint = SpherePoint { theta: 0.0, phi: 0.0 };
    pub const SOUTH: SpherePoint = SpherePoint { theta: PI, phi: 0.0 };

    /// Builds a canonical point: θ clamped to [0, π], φ wrapped into
    /// [0, 2π), φ = 0 at the poles.
    pub fn new(theta: f64, phi: f64) -> Self {
        let theta = theta.clamp(0.0, PI);
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        if theta == 0.0 || theta == PI {
            phi = 0.0;
        }
        SpherePoint { theta, phi }
    }

    /// Point from a (not necessarily normalized) Bloch vector.
    pub fn from_bloch(v: [f64; 3]) -> Self {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let z = (v[2] / r).clamp(-1.0, 1.0);
        let rho = v[0].hypot(v[1]);
        if rho <= 1e-300 {
            return if z > 0.0 { Self::NORTH } else { Self::SOUTH };
        }
        Self::new(rho.atan2(v[2]), v[1].atan2(v[0]))
    }

    pub fn bloch(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Qubit amplitudes `(cos θ/2, e^{iφ} sin θ/2)`.
    pub fn amplitudes(&self) -> (Complex64, Complex64) {
        let (s, c) = (0.5 * self.theta).sin_cos();
        (Complex64::new(c, 0.0), Complex64::from_polar(s, self.phi))
    }

    pub fn antipode(&self) -> Self {
        Self::new(PI - self.theta, self.phi + PI)
    }

    /// Reflection through the X-Z plane (complex conjugation of the qubit).
    pub fn conjugate(&self) -> Self {
        Self::new(self.theta, -self.phi)
    }

    /// Great-circle distance in radians.
    pub fn angular_distance(&self, other: &SpherePoint) -> f64 {
        let a = self.bloch();
        let b = other.bloch();
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let cx = a[1] * b[2] - a[2] * b[1];
        let cy = a[2] * b[0] - a[0] * b[2];
        let cz = a[0] * b[1] - a[1] * b[0];
        (cx * cx + cy * cy + cz * cz).sqrt().atan2(dot)
    }

    pub fn is_pole(&self) -> bool {
        self.theta == 0.0 || self.theta == PI
    }
}

/// A normalized permutation-symmetric state of `n` qubits, stored by its
/// Dicke coefficients `a_0 .. a_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "StateJson", try_from = "StateJson")]
pub struct SymmetricState {
    n: usize,
    coeffs: Vec<Complex64>,
}

impl SymmetricState {
    /// Normalizes `coeffs` (length `n + 1`) into a state.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        Self::with_correction(coeffs).map(|(s, _)| s)
    }

    /// Like [`SymmetricState::new`] but also returns the factor the input
    /// was multiplied by.
    pub fn with_correction(mut coeffs: Vec<Complex64>) -> Result<(Self, f64)> {
        if coeffs.len() < 2 {
            return domain("a symmetric state needs n >= 1, i.e. at least two coefficients");
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return domain("non-finite coefficient");
        }
        let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 1e-150 {
            return domain("zero vector cannot be normalized");
        }
        let factor = 1.0 / norm;
        for c in coeffs.iter_mut() {
            *c *= factor;
        }
        Ok((
            SymmetricState {
                n: coeffs.len() - 1,
                coeffs,
            },
            factor,
        ))
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Builds a state from `(k, amplitude)` pairs; other coefficients vanish.
    pub fn from_sparse(n: usize, terms: &[(usize, f64)]) -> Result<Self> {
        let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
        for &(k, v) in terms {
            if k > n {
                return domain(format!("Dicke index {k} exceeds n = {n}"));
            }
            c[k] += v;
        }
        Self::new(c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    /// Indices of the structurally nonzero coefficients.
    pub fn support(&self) -> Vec<usize> {
        (0..=self.n)
            .filter(|&k| self.coeffs[k].norm() > SUPPORT_TOL)
            .collect()
    }

    /// Copy with coefficients below [`SUPPORT_TOL`] set to zero.
    pub fn snapped(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| if c.norm() > SUPPORT_TOL { c } else { Complex64::new(0.0, 0.0) })
            .collect();
        Self::new(coeffs).expect("snapping cannot remove every coefficient of a normalized state")
    }

    /// `|⟨self|other⟩|`.
    pub fn fidelity(&self, other: &SymmetricState) -> Result<f64> {
        inner(self, other).map(|z| z.norm())
    }

    /// Applies `U^{⊗n}` for a single-qubit matrix `u` (row-major).
    ///
    /// Works on the state as a homogeneous polynomial
    /// `Σ a_k √C(n,k) x0^{n-k} x1^k`, substituting `x_i → Σ_l u[l][i] x_l`.
    pub fn apply_local_unitary(&self, u: [[Complex64; 2]; 2]) -> SymmetricState {
        let n = self.n;
        let zero = Complex64::new(0.0, 0.0);
        // Powers of the two substituted linear forms, as coefficient lists in
        // x1 (degree index), the x0 power being implied by homogeneity.
        let pow = |a: Complex64, b: Complex64| -> Vec<Vec<Complex64>> {
            let mut out = vec![vec![Complex64::new(1.0, 0.0)]];
            for p in 1..=n {
                let prev = &out[p - 1];
                let mut next = vec![zero; p + 1];
                for (j, &c) in prev.iter().enumerate() {
                    next[j] += c * a;
                    next[j + 1] += c * b;
                }
                out.push(next);
            }
            out
        };
        let zero_pows = pow(u[0][0], u[1][0]);
        let one_pows = pow(u[0][1], u[1][1]);
        let mut out = vec![zero; n + 1];
        for k in 0..=n {
            let ak = self.coeffs[k];
            if ak == zero {
                continue;
            }
            let w = ak * binomial(n, k).sqrt();
            let left = &zero_pows[n - k];
            let right = &one_pows[k];
            for (i, &l) in left.iter().enumerate() {
                for (j, &r) in right.iter().enumerate() {
                    out[i + j] += w * l * r;
                }
            }
        }
        for (k, c) in out.iter_mut().enumerate() {
            *c /= binomial(n, k).sqrt();
        }
        SymmetricState::new(out).expect("unitary image of a normalized state is nonzero")
    }

    /// `R_z(angle)^{⊗n}`: coefficient k picks up `e^{i k angle}`.
    pub fn rotate_z(&self, angle: f64) -> SymmetricState {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c * Complex64::from_polar(1.0, k as f64 * angle))
            .collect();
        SymmetricState { n: self.n, coeffs }
    }

    /// `R_y(angle)^{⊗n}` computed in coefficient space.
    pub fn rotate_y(&self, angle: f64) -> SymmetricState {
        self.apply_local_unitary(ry_matrix(angle))
    }

    pub fn classify(&self) -> SymmetryInfo {
        classify(self)
    }

    /// Complex conjugate of every coefficient.
    pub fn conjugate(&self) -> SymmetricState {
        SymmetricState {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }
}

/// Single-qubit Y rotation `[[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]]`.
pub fn ry_matrix(angle: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (0.5 * angle).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

/// Dicke state `|S_{n,k}⟩`.
pub fn make_dicke(n: usize, k: usize) -> Result<SymmetricState> {
    if n == 0 {
        return domain("n must be at least 1");
    }
    if k > n {
        return domain(format!("Dicke index k = {k} out of range 0..={n}"));
    }
    let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
    c[k] = Complex64::new(1.0, 0.0);
    SymmetricState::new(c)
}

/// `Σ conj(a_k) b_k`.
pub fn inner(a: &SymmetricState, b: &SymmetricState) -> Result<Complex64> {
    if a.n != b.n {
        return domain(format!("dimension mismatch: n = {} vs n = {}", a.n, b.n));
    }
    Ok(a.coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Support-based symmetry data of a state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryInfo {
    /// Largest m in (1, n] for which the state is invariant (up to phase)
    /// under a Z rotation by 2π/m; 1 when there is none.
    pub rotational_order: usize,
    pub is_real: bool,
    /// Nonnegative in the given basis, up to a global phase.
    pub is_positive: bool,
    /// Z-rotation angle β such that `rotate_z(β)` is positive up to a global
    /// phase. Searched exhaustively when at most four coefficients are
    /// nonzero; otherwise only β = 0 is tried.
    pub positive_gauge: Option<f64>,
    pub dicke_index: Option<usize>,
    pub support: Vec<usize>,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Removes the global phase so that the largest coefficient is real positive.
fn dephased(coeffs: &[Complex64]) -> Vec<Complex64> {
    let pivot = coeffs
        .iter()
        .copied()
        .fold(Complex64::new(0.0, 0.0), |best, c| if c.norm() > best.norm() { c } else { best });
    let phase = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { Complex64::new(1.0, 0.0) };
    coeffs.iter().map(|&c| c * phase).collect()
}

fn positive_up_to_phase(coeffs: &[Complex64]) -> bool {
    dephased(coeffs)
        .iter()
        .all(|c| c.im.abs() <= PHASE_TOL && c.re >= -PHASE_TOL)
}

/// Classifies the symmetries of a state from its (snapped) support.
pub fn classify(state: &SymmetricState) -> SymmetryInfo {
    let n = state.n();
    let support = state.support();
    let dicke_index = if support.len() == 1 { Some(support[0]) } else { None };

    let rotational_order = if support.len() == 1 {
        if n >= 2 {
            n
        } else {
            1
        }
    } else {
        let g = support.windows(2).fold(0, |g, w| gcd(g, w[1] - w[0]));
        if g >= 2 && g <= n {
            g
        } else {
            1
        }
    };

    let snapped: Vec<Complex64> = state
        .coeffs()
        .iter()
        .map(|&c| if c.norm() > SUPPORT_TOL { c } else { Complex64::new(0.0, 0.0) })
        .collect();
    let is_real = dephased(&snapped).iter().all(|c| c.im.abs() <= PHASE_TOL);
    let is_positive = positive_up_to_phase(&snapped);

    let positive_gauge = if is_positive {
        Some(0.0)
    } else if support.len() <= 4 {
        find_positive_gauge(&snapped, &support)
    } else {
        None
    };

    SymmetryInfo {
        rotational_order,
        is_real,
        is_positive,
        positive_gauge,
        dicke_index,
        support,
    }
}

/// Searches β with `a_k e^{ikβ}` all sharing one phase. The first two
/// support indices fix β up to the 2π/(k₂ − k₁) ambiguity, which is
/// enumerated.
fn find_positive_gauge(coeffs: &[Complex64], support: &[usize]) -> Option<f64> {
    if support.len() < 2 {
        return Some(0.0);
    }
    let (k1, k2) = (support[0], support[1]);
    let gap = (k2 - k1) as f64;
    let rel = (coeffs[k1] / coeffs[k2]).arg();
    for j in 0..(k2 - k1) {
        let beta = (rel + TAU * j as f64) / gap;
        let rotated: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c * Complex64::from_polar(1.0, k as f64 * beta))
            .collect();
        if positive_up_to_phase(&rotated) {
            return Some(beta.rem_euclid(TAU));
        }
    }
    None
}

/// On-disk JSON form: `{ "n": 3, "coeffs": [[re, im], ...] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateJson {
    pub n: usize,
    pub coeffs: Vec<[f64; 2]>,
}

impl From<&SymmetricState> for StateJson {
    fn from(s: &SymmetricState) -> Self {
        StateJson {
            n: s.n,
            coeffs: s.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl From<SymmetricState> for StateJson {
    fn from(s: SymmetricState) -> Self {
        StateJson::from(&s)
    }
}

impl TryFrom<StateJson> for SymmetricState {
    type Error = Error;

    fn try_from(raw: StateJson) -> Result<Self> {
        raw.into_state().map(|(s, _)| s)
    }
}

impl StateJson {
    /// Validates and renormalizes. Returns the state and the applied factor.
    pub fn into_state(self) -> Result<(SymmetricState, f64)> {
        if self.coeffs.len() != self.n + 1 {
            return Err(Error::Parse(format!(
                "expected n + 1 = {} coefficients, found {}",
                self.n + 1,
                self.coeffs.len()
            )));
        }
        SymmetricState::with_correction(
            self.coeffs
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}

pub fn read_state_json(text: &str) -> Result<(SymmetricState, f64)> {
    let raw: StateJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    raw.into_state()
}

pub fn write_state_json(state: &SymmetricState) -> String {
    serde_json::to_string_pretty(&StateJson::from(state)).expect("state serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ghz3() -> SymmetricState {
        SymmetricState::from_sparse(3, &[(0, 1.0), (3, 1.0)]).unwrap()
    }

    #[test]
    fn dicke_construction() {
        let w = make_dicke(3, 1).unwrap();
        assert_eq!(w.coeffs()[1], Complex64::new(1.0, 0.0));
        assert_eq!(w.support(), vec![1]);
        let p = make_dicke(4, 0).unwrap();
        assert_eq!(p.support(), vec![0]);
        let q = make_dicke(5, 5).unwrap();
        assert_eq!(q.coeffs().len(), 6);
        assert_eq!(q.support(), vec![5]);
        assert!(make_dicke(3, 4).is_err());
        assert!(make_dicke(0, 0).is_err());
    }

    #[test]
    fn zero_vector_rejected() {
        assert!(SymmetricState::from_real(&[0.0, 0.0, 0.0]).is_err());
        assert!(SymmetricState::from_real(&[1.0]).is_err());
    }

    #[test]
    fn rotate_z_examples() {
        let g = ghz3();
        let r = g.rotate_z(TAU / 3.0);
        assert_abs_diff_eq!(r.coeffs()[3].re, 1.0 / 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(r.fidelity(&g).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(g.rotate_z(0.0), g);
        let w = make_dicke(3, 1).unwrap();
        for t in [0.3, 1.7, -2.0] {
            let r = w.rotate_z(t);
            assert_abs_diff_eq!(r.coeffs()[1].arg(), t, epsilon = 1e-12);
            assert_abs_diff_eq!(r.fidelity(&w).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rotate_y_single_qubit_flip() {
        let zero = make_dicke(1, 0).unwrap();
        let one = make_dicke(1, 1).unwrap();
        let r = zero.rotate_y(PI);
        assert_abs_diff_eq!(r.fidelity(&one).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rotate_y_matches_explicit_tensor_power() {
        // Two qubits: build R_y ⊗ R_y on |S_{2,1}⟩ by hand.
        let bell = make_dicke(2, 1).unwrap();
        let t: f64 = 0.7;
        let (s, c) = (0.5 * t).sin_cos();
        // |01⟩+|10⟩ over √2, each qubit |0⟩→c|0⟩+s|1⟩, |1⟩→−s|0⟩+c|1⟩.
        // amplitude on |00⟩: 2·c·(−s)/√2, on |11⟩: 2·s·c/√2, on |01⟩+|10⟩: (c²−s²)/√2 each.
        let a0 = -2.0 * c * s / 2f64.sqrt();
        let a1 = (c * c - s * s) / 2f64.sqrt() * 2f64.sqrt();
        let a2 = 2.0 * s * c / 2f64.sqrt();
        let r = bell.rotate_y(t);
        assert_abs_diff_eq!(r.coeffs()[0].re, a0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.coeffs()[1].re, a1, epsilon = 1e-12);
        assert_abs_diff_eq!(r.coeffs()[2].re, a2, epsilon = 1e-12);
    }

    #[test]
    fn classify_examples() {
        let tetra = SymmetricState::from_sparse(4, &[(0, (1.0f64 / 3.0).sqrt()), (3, (2.0f64 / 3.0).sqrt())]).unwrap();
        let info = classify(&tetra);
        assert_eq!(info.rotational_order, 3);
        assert!(info.is_positive && info.is_real);

        let p7 = SymmetricState::from_sparse(7, &[(1, 1.0), (6, 1.0)]).unwrap();
        assert_eq!(classify(&p7).rotational_order, 5);

        let s15 = SymmetricState::from_sparse(15, &[(3, 0.3), (7, 0.5), (15, 0.8)]).unwrap();
        assert_eq!(classify(&s15).rotational_order, 4);

        let generic = SymmetricState::from_real(&[0.2, 0.5, 0.1, 0.7]).unwrap();
        assert_eq!(classify(&generic).rotational_order, 1);
    }

    #[test]
    fn classify_dicke_index() {
        for n in 1..=12 {
            for k in 0..=n {
                let info = classify(&make_dicke(n, k).unwrap());
                assert_eq!(info.dicke_index, Some(k));
            }
        }
    }

    #[test]
    fn positivity_and_gauge() {
        let oct_neg = SymmetricState::from_sparse(6, &[(1, 1.0), (5, -1.0)]).unwrap();
        let info = classify(&oct_neg);
        assert!(info.is_real);
        assert!(!info.is_positive);
        let beta = info.positive_gauge.expect("two-term support is always gaugeable");
        assert!(classify(&oct_neg.rotate_z(beta)).is_positive);

        // Global phase is removable.
        let phased = SymmetricState::new(vec![
            Complex64::from_polar(0.6, 1.1),
            Complex64::from_polar(0.8, 1.1),
        ])
        .unwrap();
        assert!(classify(&phased).is_positive);

        // Three terms whose phases are not affine in k.
        let bad = SymmetricState::new(vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.5),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.0),
        ])
        .unwrap();
        assert_eq!(classify(&bad).positive_gauge, None);
    }

    #[test]
    fn inner_products() {
        let g = ghz3();
        let w = make_dicke(3, 1).unwrap();
        assert_abs_diff_eq!(inner(&g, &g).unwrap().re, 1.0, epsilon = 1e-14);
        assert_eq!(inner(&g, &w).unwrap().norm(), 0.0);
        let s0 = make_dicke(3, 0).unwrap();
        let s1 = make_dicke(3, 1).unwrap();
        assert_eq!(inner(&s0, &s1).unwrap().norm(), 0.0);
        assert!(inner(&g, &make_dicke(2, 1).unwrap()).is_err());
    }

    #[test]
    fn json_round_trip_records_correction() {
        let (s, f) = read_state_json(r#"{"n": 1, "coeffs": [[3, 0], [0, 4]]}"#).unwrap();
        assert_abs_diff_eq!(f, 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(s.coeffs()[1].im, 0.8, epsilon = 1e-15);
        let back = read_state_json(&write_state_json(&s)).unwrap().0;
        assert_abs_diff_eq!(back.fidelity(&s).unwrap(), 1.0, epsilon = 1e-14);
        assert!(read_state_json(r#"{"n": 2, "coeffs": [[1, 0]]}"#).is_err());
        assert!(read_state_json(r#"{"n": 1, "coeffs": [[0, 0], [0, 0]]}"#).is_err());
        assert!(read_state_json("not json").is_err());
    }

    #[test]
    fn sphere_point_canonical() {
        let p = SpherePoint::new(0.0, 2.0);
        assert_eq!(p.phi, 0.0);
        let q = SpherePoint::new(1.0, -0.5);
        assert!(q.phi >= 0.0 && q.phi < TAU);
        assert_abs_diff_eq!(SpherePoint::NORTH.angular_distance(&SpherePoint::SOUTH), PI, epsilon = 1e-15);
        let r = SpherePoint::new(PI / 2.0, PI / 2.0).conjugate();
        assert_abs_diff_eq!(r.phi, 1.5 * PI, epsilon = 1e-15);
        let b = SpherePoint::from_bloch(SpherePoint::new(1.2, 4.0).bloch());
        assert_abs_diff_eq!(b.theta, 1.2, epsilon = 1e-12);
        assert_abs_diff_eq!(b.phi, 4.0, epsilon = 1e-12);
    }
}
