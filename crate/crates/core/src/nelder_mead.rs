//! Derivative-free Nelder–Mead minimization.

/// Stopping rules and initial simplex size.
#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    /// Stop when `f_worst − f_best` falls below this.
    pub f_tol: f64,
    /// ...and the simplex diameter below this.
    pub x_tol: f64,
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            max_evals: 20_000,
            f_tol: 1e-13,
            x_tol: 1e-10,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Minimizes `f` from `x0` with the adaptive coefficients of Gao & Han
/// (dimension-dependent expansion, contraction and shrink factors).
pub fn minimize<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    minimize_tracked(|x, _| f(x), x0, opts)
}

/// As [`minimize`], but `f` also receives the current iteration index
/// (0 while the initial simplex is built).
pub fn minimize_tracked<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: FnMut(&[f64], usize) -> f64,
{
    let dim = x0.len();
    assert!(dim >= 1, "Nelder-Mead needs at least one parameter");
    let d = dim.max(1) as f64;
    let (alpha, beta, gamma, delta) = if dim >= 2 {
        (1.0, 1.0 + 2.0 / d, 0.75 - 1.0 / (2.0 * d), 1.0 - 1.0 / d)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };

    let mut evals = 0usize;
    let mut iteration = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize, iteration: usize| {
        *evals += 1;
        let v = f(x, iteration);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let f0 = eval(x0, &mut evals, 0);
    simplex.push((x0.to_vec(), f0));
    for i in 0..dim {
        let mut x = x0.to_vec();
        let step = if x[i].abs() > 1e-3 { opts.initial_step * x[i].abs().max(0.25) } else { opts.initial_step };
        x[i] += step;
        let fx = eval(&x, &mut evals, 0);
        simplex.push((x, fx));
    }

    let mut converged = false;
    while evals < opts.max_evals {
        iteration += 1;
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if (worst - best).abs() <= opts.f_tol && diameter <= opts.x_tol {
            converged = true;
            break;
        }
        if diameter <= 1e-15 {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / d;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(alpha);
        let fr = eval(&xr, &mut evals, iteration);
        if fr < simplex[0].1 {
            let xe = along(beta);
            let fe = eval(&xe, &mut evals, iteration);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst {
            let xc = along(alpha * gamma);
            let fc = eval(&xc, &mut evals, iteration);
            (xc, fc)
        } else {
            let xc = along(-gamma);
            let fc = eval(&xc, &mut evals, iteration);
            (xc, fc)
        };
        if fc < worst.min(fr) {
            simplex[dim] = (xc, fc);
            continue;
        }
        // shrink towards the best vertex
        let x_best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = x_best
                .iter()
                .zip(&vertex.0)
                .map(|(b, v)| b + delta * (v - b))
                .collect();
            let fx = eval(&x, &mut evals, iteration);
            *vertex = (x, fx);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, f) = simplex.swap_remove(0);
    NelderMeadResult {
        x,
        f,
        evals,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = minimize(f, &[-1.2, 1.0], &NelderMeadOptions::default());
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6, "{:?}", r.x);
    }

    #[test]
    fn nonsmooth_max_of_planes() {
        // min over x of max(|x0 − 1|, |x1 + 2|, ...) has a kink at the optimum
        let f = |x: &[f64]| (x[0] - 1.0).abs().max((x[1] + 2.0).abs()).max((x[2] - 0.5).abs());
        let r = minimize(f, &[0.0, 0.0, 0.0], &NelderMeadOptions::default());
        assert!(r.f < 1e-8, "f = {}", r.f);
    }

    #[test]
    fn one_dimensional() {
        let r = minimize(|x: &[f64]| (x[0] - 3.0).powi(2), &[0.0], &NelderMeadOptions::default());
        assert!((r.x[0] - 3.0).abs() < 1e-6);
    }
}
