//! Quasi-Newton minimization used to slide points downhill.
//!
//! [`minimize`] is a full-memory BFGS with Armijo backtracking. It is
//! generic over the objective so tests can exercise it on closed-form
//! functions; [`descend_point`] binds it to a [`PotentialField`].
//!
//! Every run is sequential and allocation-order stable, so the same inputs
//! produce bitwise-identical iterates.

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{QcError, Result};
use crate::potential::PotentialField;

const ARMIJO_C: f64 = 1e-4;
const BACKTRACK_FACTOR: f64 = 0.5;

/// Tolerances and budget for one [`minimize`] run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfgsConfig {
    /// Stop when the Euclidean gradient norm falls to this value or below.
    pub grad_tol: f64,
    /// Stop when backtracking can no longer move the iterate farther than
    /// this distance; the current point is then reported as converged.
    pub step_tol: f64,
    /// Iteration budget; exceeding it reports `converged = false` together
    /// with the best iterate found.
    pub max_iters: usize,
}

impl Default for BfgsConfig {
    fn default() -> Self {
        BfgsConfig {
            grad_tol: 1e-7,
            step_tol: 1e-10,
            max_iters: 200,
        }
    }
}

impl BfgsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.grad_tol.is_finite() && self.grad_tol > 0.0) {
            return Err(QcError::invalid(
                "grad_tol",
                format!("must be finite and > 0, got {}", self.grad_tol),
            ));
        }
        if !(self.step_tol.is_finite() && self.step_tol > 0.0) {
            return Err(QcError::invalid(
                "step_tol",
                format!("must be finite and > 0, got {}", self.step_tol),
            ));
        }
        if self.max_iters == 0 {
            return Err(QcError::invalid("max_iters", "must be at least 1"));
        }
        Ok(())
    }
}

/// Where a run of [`minimize`] ended up.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeOutcome {
    pub x_star: Array1<f64>,
    pub f_star: f64,
    pub iterations: usize,
    /// True when a stationarity test fired (small gradient, or the line
    /// search could no longer make representable progress); false when the
    /// iteration budget ran out first.
    pub converged: bool,
}

fn norm2(v: &Array1<f64>) -> f64 {
    v.dot(v).sqrt()
}

fn eval_objective<F>(f: &mut F, x: &Array1<f64>) -> Result<f64>
where
    F: FnMut(&Array1<f64>) -> Result<f64>,
{
    let value = f(x)?;
    if !value.is_finite() {
        return Err(QcError::NonFiniteEvaluation {
            what: "objective",
            at: x.to_vec(),
        });
    }
    Ok(value)
}

fn eval_gradient<G>(grad: &mut G, x: &Array1<f64>, d: usize) -> Result<Array1<f64>>
where
    G: FnMut(&Array1<f64>) -> Result<Array1<f64>>,
{
    let g = grad(x)?;
    if g.len() != d {
        return Err(QcError::DimensionMismatch {
            expected: d,
            got: g.len(),
        });
    }
    if g.iter().any(|v| !v.is_finite()) {
        return Err(QcError::NonFiniteEvaluation {
            what: "gradient",
            at: x.to_vec(),
        });
    }
    Ok(g)
}

/// Minimizes `f` starting from `x0` with BFGS.
///
/// The inverse Hessian estimate starts at the identity and is rebuilt from
/// the identity whenever a step fails the curvature condition, so the
/// search direction is always a descent direction (with a steepest-descent
/// fallback as a final guard). Step lengths come from Armijo backtracking
/// starting at 1.
///
/// Returns an error if the configuration is invalid or if `f` or `grad`
/// produces a non-finite value anywhere the search evaluates them.
pub fn minimize<F, G>(
    mut f: F,
    mut grad: G,
    x0: ArrayView1<'_, f64>,
    cfg: &BfgsConfig,
) -> Result<MinimizeOutcome>
where
    F: FnMut(&Array1<f64>) -> Result<f64>,
    G: FnMut(&Array1<f64>) -> Result<Array1<f64>>,
{
    cfg.validate()?;
    if x0.is_empty() {
        return Err(QcError::EmptyInput {
            context: "starting point",
        });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(QcError::NonFinite {
            context: "starting point",
        });
    }
    let d = x0.len();
    let mut x = x0.to_owned();
    let mut fx = eval_objective(&mut f, &x)?;
    let mut g = eval_gradient(&mut grad, &x, d)?;
    let mut h = Array2::<f64>::eye(d);

    for iter in 0..cfg.max_iters {
        if norm2(&g) <= cfg.grad_tol {
            return Ok(MinimizeOutcome {
                x_star: x,
                f_star: fx,
                iterations: iter,
                converged: true,
            });
        }

        let mut p = -h.dot(&g);
        let mut slope = p.dot(&g);
        if !(slope < 0.0) {
            // Numerical damage left h indefinite; fall back to steepest
            // descent, whose slope -|g|^2 is strictly negative here.
            p = -g.clone();
            slope = p.dot(&g);
        }

        let p_norm = norm2(&p);
        let mut alpha = 1.0;
        let (x_new, f_new) = loop {
            if alpha * p_norm <= cfg.step_tol {
                // No representable step makes sufficient progress; treat
                // the current iterate as the floor of this basin.
                return Ok(MinimizeOutcome {
                    x_star: x,
                    f_star: fx,
                    iterations: iter,
                    converged: true,
                });
            }
            let trial = &x + &(alpha * &p);
            let f_trial = eval_objective(&mut f, &trial)?;
            if f_trial <= fx + ARMIJO_C * alpha * slope {
                break (trial, f_trial);
            }
            alpha *= BACKTRACK_FACTOR;
        };

        let g_new = eval_gradient(&mut grad, &x_new, d)?;
        let s = &x_new - &x;
        let y = &g_new - &g;
        let sy = s.dot(&y);
        if sy <= 1e-12 * norm2(&s) * norm2(&y) {
            // Curvature too weak to keep the estimate positive definite.
            h = Array2::eye(d);
        } else {
            let hy = h.dot(&y);
            let yhy = y.dot(&hy);
            let c1 = (sy + yhy) / (sy * sy);
            for i in 0..d {
                for j in 0..d {
                    h[[i, j]] += c1 * s[i] * s[j] - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                }
            }
        }
        x = x_new;
        fx = f_new;
        g = g_new;
    }

    Ok(MinimizeOutcome {
        x_star: x,
        f_star: fx,
        iterations: cfg.max_iters,
        converged: false,
    })
}

/// Slides one query point downhill on `field` and reports where it settles.
///
/// In direct mode the point descends toward a potential minimum; in inverse
/// mode the field is negated, so the point climbs toward a potential
/// maximum instead.
pub fn descend_point(
    field: &PotentialField<'_>,
    x0: ArrayView1<'_, f64>,
    cfg: &BfgsConfig,
) -> Result<MinimizeOutcome> {
    field.check_query(x0)?;
    minimize(
        |x| field.potential_unchecked(x.view()),
        |x| field.gradient_unchecked(x.view()),
        x0,
        cfg,
    )
}
