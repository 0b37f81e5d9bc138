//! Matrix permanent by Ryser's formula, subsets visited in Gray-code order.

use num_complex::Complex64;

/// Permanent of a square complex matrix given as rows.
///
/// `perm(A) = (−1)^n Σ_{S ⊆ cols} (−1)^{|S|} Π_i Σ_{j∈S} a_ij`, with the row
/// sums updated by one column per step along a Gray code. O(2ⁿ·n).
pub fn permanent(a: &[Vec<Complex64>]) -> Complex64 {
    let n = a.len();
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    assert!(a.iter().all(|row| row.len() == n), "matrix must be square");
    assert!(n < 31, "permanent size limited to n < 31");

    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut prev_gray = 0u32;
    for step in 1u32..(1u32 << n) {
        let gray = step ^ (step >> 1);
        let changed = (gray ^ prev_gray).trailing_zeros() as usize;
        let added = gray & (1 << changed) != 0;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if added {
                *s += a[i][changed];
            } else {
                *s -= a[i][changed];
            }
        }
        prev_gray = gray;
        let prod: Complex64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}
