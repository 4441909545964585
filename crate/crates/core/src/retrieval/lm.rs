use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{invalid, Result};

const POLISH_STEPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Converged when ‖δp‖ < xtol·(‖p‖ + xtol).
    pub xtol: f64,
    /// Converged when the relative cost decrease of a step is below this.
    pub ftol: f64,
    /// Central-difference step relative to max(|p|, 1).
    pub fd_step: f64,
    /// Initial damping relative to the largest diagonal of JᵀJ.
    pub initial_damping: f64,
    pub confidence_level: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            xtol: 1e-8,
            ftol: 1e-10,
            fd_step: 1e-6,
            initial_damping: 1e-9,
            confidence_level: 0.95,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmResult {
    pub params: Vec<f64>,
    /// (JᵀJ)⁻¹·s², s² = Σr²/(m − p).
    pub covariance: DMatrix<f64>,
    /// ‖r‖₂ at the solution.
    pub residual_norm: f64,
    /// Accepted steps.
    pub iterations: usize,
    pub converged: bool,
    pub confidence_level: f64,
    /// Half-widths of the linearized confidence intervals.
    pub half_widths: Vec<f64>,
    pub warnings: Vec<String>,
}

impl LmResult {
    pub fn sigma(&self, k: usize) -> f64 {
        self.covariance[(k, k)].max(0.0).sqrt()
    }
}

/// Central finite-difference Jacobian (m × p).
fn jacobian<F>(f: &F, p: &[f64], m: usize, step: f64) -> DMatrix<f64>
where
    F: Fn(&[f64], &mut [f64]),
{
    let mut jac = DMatrix::zeros(m, p.len());
    let mut plus = vec![0.0; m];
    let mut minus = vec![0.0; m];
    let mut q = p.to_vec();
    for k in 0..p.len() {
        let h = step * p[k].abs().max(1.0);
        q[k] = p[k] + h;
        f(&q, &mut plus);
        q[k] = p[k] - h;
        f(&q, &mut minus);
        q[k] = p[k];
        let inv = 1.0 / (2.0 * h);
        for i in 0..m {
            jac[(i, k)] = (plus[i] - minus[i]) * inv;
        }
    }
    jac
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Pseudo-inverse of a symmetric matrix, plus whether it was singular.
fn pseudo_inverse(a: &DMatrix<f64>) -> (DMatrix<f64>, bool) {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let singular = svd.singular_values.min() <= 1e-12 * smax;
    let inv = svd
        .pseudo_inverse(1e-12 * smax)
        .unwrap_or_else(|_| DMatrix::zeros(a.nrows(), a.ncols()));
    (inv, singular)
}

/// Minimizes ½‖r(p)‖² for the residual `f(p, r)` with `m` components.
pub fn levenberg_marquardt<F>(f: F, p0: &[f64], m: usize, opts: &LmOptions) -> Result<LmResult>
where
    F: Fn(&[f64], &mut [f64]),
{
    let np = p0.len();
    if np == 0 || m <= np {
        return Err(invalid(format!("need more residuals ({m}) than parameters ({np})")));
    }
    if p0.iter().any(|v| !v.is_finite()) {
        return Err(invalid("initial parameters must be finite"));
    }
    if !(opts.confidence_level > 0.0 && opts.confidence_level < 1.0) {
        return Err(invalid("confidence level must lie in (0, 1)"));
    }
    let mut warnings = Vec::new();
    let mut p = p0.to_vec();
    let mut r = vec![0.0; m];
    f(&p, &mut r);
    if r.iter().any(|v| !v.is_finite()) {
        return Err(invalid("residuals are not finite at the initial point"));
    }
    let mut cost = norm2(&r);
    let mut iterations = 0;
    let mut converged = false;
    let mut lambda = f64::NAN;
    let mut trial = vec![0.0; m];
    let mut attempts = 0;
    let mut warned_singular = false;

    'outer: while iterations < opts.max_iterations {
        if cost == 0.0 {
            converged = true;
            break;
        }
        let jac = jacobian(&f, &p, m, opts.fd_step);
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * DVector::from_column_slice(&r);
        if lambda.is_nan() {
            lambda = opts.initial_damping * jtj.diagonal().max();
        }
        loop {
            attempts += 1;
            if attempts > 10 * opts.max_iterations {
                break 'outer;
            }
            let mut a = jtj.clone();
            for k in 0..np {
                a[(k, k)] += lambda * jtj[(k, k)].max(f64::MIN_POSITIVE);
            }
            let step = match a.clone().cholesky() {
                Some(ch) => -ch.solve(&g),
                None => {
                    if !warned_singular {
                        warnings.push("singular normal matrix, using damped pseudo-inverse".into());
                        warned_singular = true;
                    }
                    -(pseudo_inverse(&a).0 * &g)
                }
            };
            let pnorm = norm2(&p).sqrt();
            if step.norm() <= opts.xtol * (pnorm + opts.xtol) {
                converged = true;
                break 'outer;
            }
            let cand: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            f(&cand, &mut trial);
            let new_cost = norm2(&trial);
            if new_cost.is_finite() && new_cost < cost {
                let rel = (cost - new_cost) / cost;
                p = cand;
                std::mem::swap(&mut r, &mut trial);
                cost = new_cost;
                iterations += 1;
                lambda /= 10.0;
                if rel < opts.ftol || step.norm() <= opts.xtol * (norm2(&p).sqrt() + opts.xtol) {
                    converged = true;
                    break 'outer;
                }
                break;
            }
            lambda *= 10.0;
            if lambda > 1e20 {
                // no downhill step exists at working precision
                converged = true;
                break 'outer;
            }
        }
    }
    if converged {
        // The cost test can stop a few steps short of the minimum, so the end
        // point depends on the path. Undamped Gauss-Newton steps from there
        // land on the minimum itself (quadratically, as long as it is
        // well-conditioned). Near the minimum the cost is flat to rounding, so
        // a tie is accepted.
        for _ in 0..POLISH_STEPS {
            let jac = jacobian(&f, &p, m, opts.fd_step);
            let Some(ch) = (jac.transpose() * &jac).cholesky() else { break };
            let step = -ch.solve(&(jac.transpose() * DVector::from_column_slice(&r)));
            let cand: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            f(&cand, &mut trial);
            let new_cost = norm2(&trial);
            if !(new_cost <= cost * (1.0 + 1e-12)) {
                break;
            }
            p = cand;
            std::mem::swap(&mut r, &mut trial);
            cost = new_cost;
            if step.norm() <= f64::EPSILON * (norm2(&p).sqrt() + 1.0) {
                break;
            }
        }
    } else {
        warnings.push(format!("no convergence after {iterations} iterations"));
    }

    let jac = jacobian(&f, &p, m, opts.fd_step);
    let (inv, singular) = pseudo_inverse(&(jac.transpose() * &jac));
    if singular {
        warnings.push("JᵀJ is singular at the solution; covariance from pseudo-inverse".into());
    }
    let dof = (m - np) as f64;
    let s2 = cost / dof;
    let covariance = inv * s2;
    let t = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| invalid(e.to_string()))?
        .inverse_cdf(0.5 + opts.confidence_level / 2.0);
    let half_widths = (0..np).map(|k| t * covariance[(k, k)].max(0.0).sqrt()).collect();
    Ok(LmResult {
        params: p,
        covariance,
        residual_norm: cost.sqrt(),
        iterations,
        converged,
        confidence_level: opts.confidence_level,
        half_widths,
        warnings,
    })
}
