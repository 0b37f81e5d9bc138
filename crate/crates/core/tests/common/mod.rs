#![allow(dead_code)]

use majorana::{Complex64, SymmetricState};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Standard normal sample (Box–Muller).
pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.gen::<f64>().max(1e-300);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

/// Haar-like random symmetric state: i.i.d. complex Gaussian coefficients.
pub fn random_state(n: usize, rng: &mut ChaCha8Rng) -> SymmetricState {
    let c = (0..=n).map(|_| Complex64::new(normal(rng), normal(rng))).collect();
    SymmetricState::new(c).expect("nonzero")
}

pub fn random_real_state(n: usize, rng: &mut ChaCha8Rng) -> SymmetricState {
    let c: Vec<f64> = (0..=n).map(|_| normal(rng)).collect();
    SymmetricState::from_real(&c).expect("nonzero")
}

/// Nonnegative state on a random support `offset + m·j` with at least two
/// terms, so it is never a Dicke state. `m = 1` gives a generic support.
pub fn random_positive_state(n: usize, m: usize, rng: &mut ChaCha8Rng) -> SymmetricState {
    let offset = rng.gen_range(0..=(n - m).min(m - 1));
    let slots: Vec<usize> = (offset..=n).step_by(m).collect();
    assert!(slots.len() >= 2, "support too small");
    loop {
        let mut terms = Vec::new();
        for &k in &slots {
            if rng.gen_bool(0.6) {
                terms.push((k, 0.05 + rng.gen::<f64>()));
            }
        }
        if terms.len() < 2 {
            continue;
        }
        return SymmetricState::from_sparse(n, &terms).expect("nonzero");
    }
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Largest m with all support gaps divisible by m (0 for a single term).
pub fn gap_gcd(support: &[usize]) -> usize {
    support.windows(2).fold(0, |g, w| gcd(g, w[1] - w[0]))
}
