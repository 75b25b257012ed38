//! Downhill simplex minimization with restarts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NelderMeadParams {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    pub max_iters: usize,
    /// Stop when the spread of simplex values falls below this.
    pub f_tol: f64,
    /// Fresh simplices built around the incumbent after convergence.
    pub restarts: usize,
}

impl Default for NelderMeadParams {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            initial_step: 0.5,
            max_iters: 400,
            f_tol: 1e-10,
            restarts: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

fn combine(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    // a + t (b − a)
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// Minimizes `f` from `x0`. `on_iter(iteration, best_f)` runs after every
/// simplex iteration.
pub fn nelder_mead<F, C>(
    mut f: F,
    x0: &[f64],
    params: &NelderMeadParams,
    mut on_iter: C,
) -> Result<NelderMeadResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
    C: FnMut(usize, f64) -> Result<()>,
{
    if x0.is_empty() {
        return Err(Error::param("x0", "at least one coordinate is required"));
    }
    let dim = x0.len();
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64], evaluations: &mut usize| -> Result<f64> {
        *evaluations += 1;
        f(x)
    };
    let mut best_x = x0.to_vec();
    let mut best_f = eval(&best_x, &mut evaluations)?;
    let mut iterations = 0usize;
    let mut converged = false;

    for _round in 0..=params.restarts {
        let mut simplex: Vec<(Vec<f64>, f64)> = vec![(best_x.clone(), best_f)];
        for i in 0..dim {
            let mut v = best_x.clone();
            v[i] += params.initial_step;
            let fv = eval(&v, &mut evaluations)?;
            simplex.push((v, fv));
        }
        converged = false;
        while iterations < params.max_iters {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if simplex[dim].1 - simplex[0].1 <= params.f_tol {
                converged = true;
                break;
            }
            iterations += 1;
            let centroid: Vec<f64> = (0..dim)
                .map(|c| simplex[..dim].iter().map(|(v, _)| v[c]).sum::<f64>() / dim as f64)
                .collect();
            let worst = simplex[dim].clone();
            let xr = combine(&centroid, &worst.0, -params.reflection);
            let fr = eval(&xr, &mut evaluations)?;
            if fr < simplex[0].1 {
                let xe = combine(&centroid, &worst.0, -params.expansion);
                let fe = eval(&xe, &mut evaluations)?;
                simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[dim - 1].1 {
                simplex[dim] = (xr, fr);
            } else {
                let (xc, fc) = if fr < worst.1 {
                    let xc = combine(&centroid, &xr, params.contraction);
                    let fc = eval(&xc, &mut evaluations)?;
                    (xc, fc)
                } else {
                    let xc = combine(&centroid, &worst.0, params.contraction);
                    let fc = eval(&xc, &mut evaluations)?;
                    (xc, fc)
                };
                if fc < fr.min(worst.1) {
                    simplex[dim] = (xc, fc);
                } else {
                    let anchor = simplex[0].0.clone();
                    for entry in simplex.iter_mut().skip(1) {
                        let v = combine(&anchor, &entry.0, params.shrink);
                        let fv = eval(&v, &mut evaluations)?;
                        *entry = (v, fv);
                    }
                }
            }
            let round_best = simplex.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
            on_iter(iterations, round_best.min(best_f))?;
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[0].1 < best_f {
            best_x = simplex[0].0.clone();
            best_f = simplex[0].1;
        }
        if iterations >= params.max_iters {
            break;
        }
    }
    Ok(NelderMeadResult {
        x: best_x,
        f: best_f,
        iterations,
        evaluations,
        converged,
    })
}
