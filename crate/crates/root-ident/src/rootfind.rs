//! Classical root computation, for contrasting identification (a yes/no
//! question) with actually locating the root: tangent-line iteration for
//! deterministic functions, stochastic approximation for the noisy model,
//! and a sign-change bracket check.

use crate::error::{Error, Result};
use crate::model::UniformRootModel;

/// Outcome of a root-finding run.
#[derive(Debug, Clone, PartialEq)]
pub struct RootResult {
    pub estimate: f64,
    pub iterations: usize,
    /// Residual at the estimate: `f(x)` for deterministic solvers, the mean
    /// response `M(x) - alpha` for the stochastic recursion.
    pub residual: f64,
    /// Iterates visited, starting point included.
    pub trajectory: Option<Vec<f64>>,
    /// Deterministic case: residual met the tolerance. Stochastic case: the
    /// full step budget ran.
    pub converged: bool,
}

/// Step-size schedule for the stochastic recursion. The built-in `c/n` form
/// satisfies the classic requirements: positive steps that vanish, with a
/// divergent sum and a convergent sum of squares.
#[derive(Debug, Clone, PartialEq)]
pub enum StepSchedule {
    COverN { c: f64 },
    Custom(Vec<f64>),
}

impl StepSchedule {
    pub fn c_over_n(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "step constant c must be positive, got {c}"
            )));
        }
        Ok(StepSchedule::COverN { c })
    }

    pub fn custom(steps: Vec<f64>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidArgument(
                "custom schedule must be nonempty".into(),
            ));
        }
        if let Some(bad) = steps.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "custom schedule steps must be positive, got {bad}"
            )));
        }
        Ok(StepSchedule::Custom(steps))
    }

    /// Step size for 1-based step index `k`.
    pub fn step(&self, k: usize) -> Option<f64> {
        match self {
            StepSchedule::COverN { c } => Some(c / k as f64),
            StepSchedule::Custom(steps) => steps.get(k - 1).copied(),
        }
    }
}

/// Tangent-line iteration `x <- x - f(x)/f'(x)` until `|f(x)| <= tol` or the
/// budget runs out. The returned result is `Ok` with `converged = false` on
/// budget exhaustion; zero derivatives and non-finite iterates are errors
/// carrying the iterate index.
pub fn newton_raphson<F, D>(
    f: F,
    f_prime: D,
    x1: f64,
    tol: f64,
    max_iter: usize,
) -> Result<RootResult>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tol must be positive, got {tol}"
        )));
    }
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    if !x1.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "starting point must be finite, got {x1}"
        )));
    }

    let mut x = x1;
    let mut trajectory = vec![x];
    let mut fx = f(x);
    for iteration in 0..max_iter {
        if fx.abs() <= tol {
            return Ok(RootResult {
                estimate: x,
                iterations: iteration,
                residual: fx,
                trajectory: Some(trajectory),
                converged: true,
            });
        }
        let dfx = f_prime(x);
        if dfx == 0.0 {
            return Err(Error::ZeroDerivative { iteration, x });
        }
        x -= fx / dfx;
        if !x.is_finite() {
            return Err(Error::Divergence {
                iteration: iteration + 1,
                x,
            });
        }
        trajectory.push(x);
        fx = f(x);
    }
    let converged = fx.abs() <= tol;
    Ok(RootResult {
        estimate: x,
        iterations: max_iter,
        residual: fx,
        trajectory: Some(trajectory),
        converged,
    })
}

/// Stochastic approximation of the root of `M(x) = alpha` from one noisy
/// observation per step: `X_{k+1} = X_k - a_k (Y_{X_k} - alpha)`.
///
/// Observations come from the model's counter streams (step k uses trial
/// index k-1), so a run is fully determined by the model seed.
pub fn robbins_monro(
    model: &UniformRootModel,
    alpha: f64,
    x1: f64,
    schedule: &StepSchedule,
    n_steps: usize,
    record_trajectory: bool,
) -> Result<RootResult> {
    if n_steps == 0 {
        return Err(Error::InvalidArgument("n_steps must be at least 1".into()));
    }
    if !alpha.is_finite() || !x1.is_finite() {
        return Err(Error::InvalidArgument(
            "alpha and x1 must be finite".into(),
        ));
    }
    if let StepSchedule::Custom(steps) = schedule {
        if steps.len() < n_steps {
            return Err(Error::InvalidArgument(format!(
                "custom schedule has {} steps, run needs {n_steps}",
                steps.len()
            )));
        }
    }

    let mut x = x1;
    let mut trajectory = record_trajectory.then(|| {
        let mut t = Vec::with_capacity(n_steps + 1);
        t.push(x);
        t
    });
    for k in 1..=n_steps {
        let a_k = schedule.step(k).expect("schedule length checked");
        let y = model.observation(x, (k - 1) as u64, 0);
        x -= a_k * (y - alpha);
        if let Some(t) = trajectory.as_mut() {
            t.push(x);
        }
    }
    Ok(RootResult {
        estimate: x,
        iterations: n_steps,
        residual: model.expected_value(x) - alpha,
        trajectory,
        converged: true,
    })
}

/// Sign-change bracket check: true iff `f(a) * f(b) < 0`, a sufficient (not
/// necessary) condition for a continuous `f` to have a root in `(a, b)`.
pub fn bracket_has_root<F>(f: F, a: f64, b: f64) -> Result<bool>
where
    F: Fn(f64) -> f64,
{
    if !(a < b) {
        return Err(Error::InvalidArgument(format!(
            "bracket requires a < b, got a = {a}, b = {b}"
        )));
    }
    let (fa, fb) = (f(a), f(b));
    if !fa.is_finite() || !fb.is_finite() {
        return Err(Error::InvalidArgument(
            "f must be finite at both bracket endpoints".into(),
        ));
    }
    Ok(fa * fb < 0.0)
}
