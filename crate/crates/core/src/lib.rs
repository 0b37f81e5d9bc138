//! Geometric measure of entanglement for permutation-symmetric multiqubit
//! states, computed through the Majorana stellar representation.
//!
//! The crate is organized bottom-up:
//!
//! * [`state`]: Dicke-basis algebra, symmetric local rotations and the
//!   support-based symmetry predicates.
//! * [`majorana`]: the bidirectional map between Dicke coefficients and the
//!   multiset of Majorana points, including the normalization constant.
//! * [`geometric`]: the overlap function on the sphere, closest product
//!   points and the geometric measure itself.
//! * [`extremal`]: the outer min-max search for maximally entangled states
//!   and the catalogue of named extremal states.
//! * [`classical`]: Thomson and Tóth point configurations and their
//!   entanglement when read as Majorana points.
//!
//! Numerical building blocks (polynomial roots, permanents, quadrature,
//! Nelder–Mead, assignment) live in their own modules.

pub mod assignment;
pub mod classical;
pub mod error;
pub mod extremal;
pub mod geometric;
pub mod majorana;
pub mod nelder_mead;
pub mod permanent;
pub mod poly;
pub mod quadrature;
pub mod state;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use classical::{ClassicalConfiguration, CurveRow};
pub use extremal::{Ansatz, ExtremalResult, SearchConfig};
pub use geometric::{BoundsReport, CppAnalysis, CppSet, InnerConfig};
pub use majorana::MajoranaDistribution;
pub use state::{SpherePoint, SymmetricState, SymmetryInfo};

/// Binomial coefficient as a float. Exact for the sizes used here.
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Formats with 12 significant digits, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".to_string() } else { x.to_string() };
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..15).contains(&mag) {
        let decimals = (11 - mag).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".to_string()
        } else {
            s
        }
    } else {
        format!("{:.11e}", x)
    }
}
