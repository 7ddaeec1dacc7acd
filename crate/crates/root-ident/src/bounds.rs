//! Lower bounds on the number of observations any valid identification test
//! must spend, plus comparison and curve emission helpers.
//!
//! All bounds depend on the gap-to-noise ratios `eps/(2 delta)` only and are
//! evaluated with natural logarithms (the quotients are base-free). The
//! two-error and `eps1 = 0` bounds invert in closed form; the three-error
//! bound is inverted numerically by exploiting strict monotonicity of
//! `n -> 2(1-r1)^n + (1-r2)^n`.

use crate::error::{Error, Result};

/// Outcome of a bound evaluation.
///
/// `vacuous` marks parameter regimes where the inequality imposes no
/// positive constraint on `n`; `n_min` is 0 there and `raw_value` records
/// the (non-positive) formula value. Vacuous results are reported, never
/// clamped into fake requirements.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    /// Un-rounded bound value.
    pub raw_value: f64,
    /// Smallest admissible observation count; 0 when vacuous.
    pub n_min: u64,
    pub vacuous: bool,
    pub domain_note: Option<String>,
}

impl BoundResult {
    fn vacuous_with(raw: f64, note: &str) -> Self {
        Self {
            raw_value: if raw == 0.0 { 0.0 } else { raw },
            n_min: 0,
            vacuous: true,
            domain_note: Some(note.to_string()),
        }
    }
}

/// `(1 - ratio)^n`, exact at `n = 0`, evaluated in log space so that large
/// `n` underflow gracefully instead of overflowing an integer power.
pub(crate) fn pow_one_minus(ratio: f64, n: u64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    (n as f64 * (-ratio).ln_1p()).exp()
}

/// Ceiling with a relative tolerance of 1e-9: values that close to an
/// integer round to it instead of picking up a spurious +1 from floating
/// point noise.
fn ceil_with_tolerance(x: f64) -> u64 {
    if x <= 0.0 {
        return 0;
    }
    let nearest = x.round();
    let tol = 1e-9 * x.abs().max(1.0);
    let v = if (x - nearest).abs() <= tol {
        nearest
    } else {
        x.ceil()
    };
    v as u64
}

fn check_ratio(name: &str, eps: f64, delta: f64) -> Result<f64> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must be positive, got {delta}"
        )));
    }
    if !(eps > 0.0 && eps < 2.0 * delta) {
        return Err(Error::InvalidArgument(format!(
            "requires 0 < {name} < 2*delta, got {name} = {eps}, delta = {delta}"
        )));
    }
    Ok(eps / (2.0 * delta))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda must lie in (0, 1), got {lambda}"
        )));
    }
    Ok(())
}

// The bound inequality stays meaningful for any 0 < eps1 <= eps2 < 2*delta,
// and the eps1 = eps2 reduction onto the two-error bound needs exactly that,
// so the domain here is wider than the strict test-geometry hypothesis
// 2*eps1 < eps2 enforced by ThreeErrorSpec.
fn check_three_error_gaps(eps1: f64, eps2: f64, delta: f64) -> Result<(f64, f64)> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must be positive, got {delta}"
        )));
    }
    if !(eps1 > 0.0 && eps1 <= eps2 && eps2 < 2.0 * delta) {
        return Err(Error::InvalidArgument(format!(
            "requires 0 < eps1 <= eps2 < 2*delta, got eps1 = {eps1}, eps2 = {eps2}, delta = {delta}"
        )));
    }
    Ok((eps1 / (2.0 * delta), eps2 / (2.0 * delta)))
}

const VACUOUS_TWO_ERROR: &str =
    "no positive constraint for lambda >= 1/2; two observations are known to suffice there";
const VACUOUS_THREE_ERROR: &str = "no positive constraint: 6*lambda >= 3 already at n = 0";
const VACUOUS_EPS1_ZERO: &str = "no positive constraint for lambda >= 1/2";

/// Minimum observations of the two-error test:
/// `n >= log(2 lambda) / log(1 - eps/(2 delta))`.
pub fn min_obs_two_error(eps: f64, delta: f64, lambda: f64) -> Result<BoundResult> {
    let r = check_ratio("eps", eps, delta)?;
    check_lambda(lambda)?;
    let raw = (2.0 * lambda).ln() / (-r).ln_1p();
    if lambda >= 0.5 {
        return Ok(BoundResult::vacuous_with(raw, VACUOUS_TWO_ERROR));
    }
    Ok(BoundResult {
        raw_value: raw,
        n_min: ceil_with_tolerance(raw),
        vacuous: false,
        domain_note: None,
    })
}

/// Necessary condition for an `n`-observation three-error test to exist:
/// `6 lambda >= 2 (1 - eps1/(2 delta))^n + (1 - eps2/(2 delta))^n`.
pub fn three_error_necessary_holds(
    n: u64,
    eps1: f64,
    eps2: f64,
    delta: f64,
    lambda: f64,
) -> Result<bool> {
    let (r1, r2) = check_three_error_gaps(eps1, eps2, delta)?;
    check_lambda(lambda)?;
    Ok(6.0 * lambda >= 2.0 * pow_one_minus(r1, n) + pow_one_minus(r2, n))
}

/// Smallest `n` at which the three-error necessary condition holds, found by
/// exponential bracketing followed by binary search (the right-hand side is
/// strictly decreasing in `n`). `raw_value` is the real-valued crossing
/// point located by bisection, so `n_min = ceil(raw_value)`.
pub fn min_obs_three_error(eps1: f64, eps2: f64, delta: f64, lambda: f64) -> Result<BoundResult> {
    let (r1, r2) = check_three_error_gaps(eps1, eps2, delta)?;
    check_lambda(lambda)?;
    let target = 6.0 * lambda;
    let rhs = |n: u64| 2.0 * pow_one_minus(r1, n) + pow_one_minus(r2, n);

    if target >= rhs(0) {
        return Ok(BoundResult::vacuous_with(0.0, VACUOUS_THREE_ERROR));
    }

    let mut hi = 1u64;
    while rhs(hi) > target {
        hi = hi.checked_mul(2).ok_or_else(|| {
            Error::InvalidArgument("three-error bound exceeds representable n".into())
        })?;
    }
    let mut lo = hi / 2; // rhs(lo) > target (or lo == 0)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if rhs(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let n_min = hi;

    // real-valued crossing point in (n_min - 1, n_min]
    let g = |x: f64| 2.0 * (x * (-r1).ln_1p()).exp() + (x * (-r2).ln_1p()).exp();
    let (mut xlo, mut xhi) = ((n_min - 1) as f64, n_min as f64);
    for _ in 0..80 {
        let mid = 0.5 * (xlo + xhi);
        if g(mid) <= target {
            xhi = mid;
        } else {
            xlo = mid;
        }
    }

    Ok(BoundResult {
        raw_value: xhi,
        n_min,
        vacuous: false,
        domain_note: None,
    })
}

/// Degenerate three-error bound with the inner gap closed (`eps1 = 0`):
/// `n >= log(6 lambda - 2) / log(1 - eps2/(2 delta))`. Requires
/// `lambda > 1/3` for the logarithm to exist; vacuous for `lambda >= 1/2`.
pub fn min_obs_eps1_zero(eps2: f64, delta: f64, lambda: f64) -> Result<BoundResult> {
    let r2 = check_ratio("eps2", eps2, delta)?;
    check_lambda(lambda)?;
    if lambda <= 1.0 / 3.0 {
        return Err(Error::UndefinedLogarithm(format!(
            "6*lambda - 2 must be positive, got lambda = {lambda} (requires lambda > 1/3)"
        )));
    }
    let raw = (6.0 * lambda - 2.0).ln() / (-r2).ln_1p();
    if lambda >= 0.5 {
        return Ok(BoundResult::vacuous_with(raw, VACUOUS_EPS1_ZERO));
    }
    Ok(BoundResult {
        raw_value: raw,
        n_min: ceil_with_tolerance(raw),
        vacuous: false,
        domain_note: None,
    })
}

/// A bound that may be undefined in part of the parameter window.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundStatus {
    Defined(BoundResult),
    Undefined(String),
}

impl BoundStatus {
    pub fn as_defined(&self) -> Option<&BoundResult> {
        match self {
            BoundStatus::Defined(r) => Some(r),
            BoundStatus::Undefined(_) => None,
        }
    }
}

/// Which bound demands more observations at a grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Larger {
    Old,
    New,
    Equal,
    Undefined,
}

impl std::fmt::Display for Larger {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Larger::Old => "old",
            Larger::New => "new",
            Larger::Equal => "equal",
            Larger::Undefined => "undefined",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub lambda: f64,
    pub old: BoundResult,
    pub new: BoundStatus,
    pub larger: Larger,
    pub note: Option<String>,
}

/// Per-lambda comparison of the one-gap bound (with `eps`) against the
/// two-gap bound (with `eps1`, `eps2`; `eps1 = 0` selects the closed-form
/// degenerate bound, which is undefined for `lambda <= 1/3`).
pub fn compare_bounds(
    eps: f64,
    eps1: f64,
    eps2: f64,
    delta: f64,
    lambda_grid: &[f64],
) -> Result<Vec<ComparisonRow>> {
    if lambda_grid.is_empty() {
        return Err(Error::InvalidArgument("lambda grid must be nonempty".into()));
    }
    check_ratio("eps", eps, delta)?;
    if eps1 == 0.0 {
        check_ratio("eps2", eps2, delta)?;
    } else {
        check_three_error_gaps(eps1, eps2, delta)?;
    }

    let mut rows = Vec::with_capacity(lambda_grid.len());
    for &lambda in lambda_grid {
        check_lambda(lambda)?;
        let old = min_obs_two_error(eps, delta, lambda)?;
        let new = if eps1 == 0.0 {
            match min_obs_eps1_zero(eps2, delta, lambda) {
                Ok(r) => BoundStatus::Defined(r),
                Err(Error::UndefinedLogarithm(msg)) => BoundStatus::Undefined(msg),
                Err(e) => return Err(e),
            }
        } else {
            BoundStatus::Defined(min_obs_three_error(eps1, eps2, delta, lambda)?)
        };

        let larger = match new.as_defined() {
            None => Larger::Undefined,
            Some(n) => {
                let diff = n.raw_value - old.raw_value;
                if diff.abs() <= 1e-9 * old.raw_value.abs().max(1.0) {
                    Larger::Equal
                } else if diff > 0.0 {
                    Larger::New
                } else {
                    Larger::Old
                }
            }
        };

        let note = if eps1 == 0.0 && (lambda - 0.5).abs() <= 1e-9 {
            Some("crossover: both raw bounds vanish at lambda = 1/2".to_string())
        } else {
            None
        };

        rows.push(ComparisonRow {
            lambda,
            old,
            new,
            larger,
            note,
        });
    }
    Ok(rows)
}

/// Configuration of a bound-curve emission.
#[derive(Debug, Clone)]
pub struct CurveConfig {
    pub lambda_grid: Vec<f64>,
    pub eps: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub delta: f64,
}

/// One row of curve data behind the bound plots.
#[derive(Debug, Clone)]
pub struct CurveRow {
    pub lambda: f64,
    pub n_old_raw: f64,
    pub n_old_min: u64,
    pub old_vacuous: bool,
    /// NaN when the new bound is undefined at this lambda.
    pub n_new_raw: f64,
    pub n_new_min: u64,
    pub new_vacuous: bool,
    pub new_undefined: bool,
    /// Reference curve: ceil(log2 of the first-order raw bound), clipped at
    /// 0. A plumbing visual aid, not a bound from the theory.
    pub n_reference: u64,
}

/// Evaluates both bound curves over the lambda grid. An empty grid yields
/// an empty table (the CLI then emits a header-only file).
pub fn bound_curves(config: &CurveConfig) -> Result<Vec<CurveRow>> {
    check_ratio("eps", config.eps, config.delta)?;
    if config.eps1 == 0.0 {
        check_ratio("eps2", config.eps2, config.delta)?;
    } else {
        check_three_error_gaps(config.eps1, config.eps2, config.delta)?;
    }
    let mut rows = Vec::with_capacity(config.lambda_grid.len());
    for &lambda in &config.lambda_grid {
        check_lambda(lambda)?;
        let old = min_obs_two_error(config.eps, config.delta, lambda)?;
        let new = if config.eps1 == 0.0 {
            match min_obs_eps1_zero(config.eps2, config.delta, lambda) {
                Ok(r) => BoundStatus::Defined(r),
                Err(Error::UndefinedLogarithm(msg)) => BoundStatus::Undefined(msg),
                Err(e) => return Err(e),
            }
        } else {
            BoundStatus::Defined(min_obs_three_error(
                config.eps1,
                config.eps2,
                config.delta,
                lambda,
            )?)
        };

        let n_reference = if old.raw_value > 1.0 {
            ceil_with_tolerance(old.raw_value.log2())
        } else {
            0
        };

        let (n_new_raw, n_new_min, new_vacuous, new_undefined) = match &new {
            BoundStatus::Defined(r) => (r.raw_value, r.n_min, r.vacuous, false),
            BoundStatus::Undefined(_) => (f64::NAN, 0, false, true),
        };

        rows.push(CurveRow {
            lambda,
            n_old_raw: old.raw_value,
            n_old_min: old.n_min,
            old_vacuous: old.vacuous,
            n_new_raw,
            n_new_min,
            new_vacuous,
            new_undefined,
            n_reference,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_error_bound_examples() {
        // ratio 0.5, lambda 0.05 -> raw 3.3219, n_min 4
        let r = min_obs_two_error(0.5, 0.5, 0.05).unwrap();
        assert!((r.raw_value - 3.321928094887362).abs() < 1e-12);
        assert_eq!(r.n_min, 4);
        assert!(!r.vacuous);

        // ratio 0.27, lambda 0.2 -> n_min 3
        let r = min_obs_two_error(0.27, 0.5, 0.2).unwrap();
        assert!((r.raw_value - 2.911533040731968).abs() < 1e-12);
        assert_eq!(r.n_min, 3);

        // lambda 0.5 -> vacuous with raw 0
        let r = min_obs_two_error(0.5, 0.5, 0.5).unwrap();
        assert!(r.vacuous);
        assert_eq!(r.raw_value, 0.0);
        assert_eq!(r.n_min, 0);
        assert!(r.domain_note.is_some());

        // lambda above 1/2 stays vacuous with a negative raw value
        let r = min_obs_two_error(0.5, 0.5, 0.7).unwrap();
        assert!(r.vacuous && r.raw_value < 0.0);
    }

    #[test]
    fn two_error_bound_domain() {
        assert!(min_obs_two_error(1.1, 0.5, 0.1).is_err());
        assert!(min_obs_two_error(0.0, 0.5, 0.1).is_err());
        assert!(min_obs_two_error(0.5, 0.0, 0.1).is_err());
        assert!(min_obs_two_error(0.5, 0.5, 0.0).is_err());
        assert!(min_obs_two_error(0.5, 0.5, 1.0).is_err());
    }

    #[test]
    fn necessary_condition_examples() {
        // ratios 0.25 / 0.5 at delta 0.5 -> eps1 = 0.25, eps2 = 0.5
        assert!(three_error_necessary_holds(1, 0.25, 0.5, 0.5, 0.4).unwrap());
        assert!(!three_error_necessary_holds(0, 0.25, 0.5, 0.5, 0.4).unwrap());
        assert!(!three_error_necessary_holds(4, 0.25, 0.5, 0.5, 0.1).unwrap());
        assert!(three_error_necessary_holds(5, 0.25, 0.5, 0.5, 0.1).unwrap());
    }

    #[test]
    fn three_error_inversion_examples() {
        let r = min_obs_three_error(0.25, 0.5, 0.5, 0.1).unwrap();
        assert_eq!(r.n_min, 5);
        assert!(!r.vacuous);
        assert!(r.raw_value > 4.0 && r.raw_value <= 5.0);

        // vacuous exactly at lambda = 1/2
        let r = min_obs_three_error(0.25, 0.5, 0.5, 0.5).unwrap();
        assert!(r.vacuous);
        assert_eq!(r.n_min, 0);
    }

    #[test]
    fn raw_value_is_the_continuous_crossing() {
        let r = min_obs_three_error(0.25, 0.5, 0.5, 0.1).unwrap();
        let g = |x: f64| 2.0 * (x * (1.0f64 - 0.25).ln()).exp() + (x * (1.0f64 - 0.5).ln()).exp();
        assert!((g(r.raw_value) - 0.6).abs() < 1e-9);
        assert_eq!(r.n_min, r.raw_value.ceil() as u64);
    }

    #[test]
    fn reduction_recovers_two_error_bound() {
        // equal gaps collapse the three-error bound onto the two-error one
        let three = min_obs_three_error(0.5, 0.5, 0.5, 0.05).unwrap();
        let two = min_obs_two_error(0.5, 0.5, 0.05).unwrap();
        assert_eq!(three.n_min, two.n_min);
        assert_eq!(three.n_min, 4);
    }

    #[test]
    fn eps1_zero_bound_examples() {
        let r = min_obs_eps1_zero(0.5, 0.5, 0.4).unwrap();
        assert!((r.raw_value - 1.321928094887361).abs() < 1e-12);
        assert_eq!(r.n_min, 2);

        assert!(matches!(
            min_obs_eps1_zero(0.5, 0.5, 1.0 / 3.0),
            Err(Error::UndefinedLogarithm(_))
        ));
        assert!(matches!(
            min_obs_eps1_zero(0.5, 0.5, 0.2),
            Err(Error::UndefinedLogarithm(_))
        ));

        let r = min_obs_eps1_zero(0.5, 0.5, 0.5).unwrap();
        assert!(r.vacuous);

        // lambda = 0.49: raw = ln(0.94)/ln(0.5) = 0.0893 -> n_min = 1,
        // confirmed by the inequality itself at n = 0 and n = 1
        let r = min_obs_eps1_zero(0.5, 0.5, 0.49).unwrap();
        assert_eq!(r.n_min, 1);
        let holds = |n: u64| 6.0 * 0.49 >= 2.0 + pow_one_minus(0.5, n);
        assert!(!holds(0));
        assert!(holds(1));
    }

    #[test]
    fn comparison_rows() {
        let rows = compare_bounds(0.5, 0.0, 0.5, 0.5, &[0.45, 0.5, 0.2]).unwrap();

        let r = &rows[0];
        assert!((r.old.raw_value - 0.15200309344504997).abs() < 1e-12);
        let new = r.new.as_defined().unwrap();
        assert!((new.raw_value - 0.5145731728297579).abs() < 1e-12);
        assert_eq!(r.larger, Larger::New);

        let r = &rows[1];
        assert!(r.old.vacuous);
        assert!(r.new.as_defined().unwrap().vacuous);
        assert_eq!(r.larger, Larger::Equal);
        assert!(r.note.as_deref().unwrap().contains("crossover"));

        let r = &rows[2];
        assert!(matches!(r.new, BoundStatus::Undefined(_)));
        assert!(!r.old.vacuous);
        assert_eq!(r.larger, Larger::Undefined);

        assert!(compare_bounds(0.5, 0.0, 0.5, 0.5, &[]).is_err());
    }

    #[test]
    fn crossover_sign_flips_at_one_half() {
        // eps1 = 0, eps2 = eps: new - old is positive below 1/2, negative above
        for &(lambda, expect_new_larger) in
            &[(0.45, true), (0.49, true), (0.499, true), (0.51, false)]
        {
            let old = min_obs_two_error(0.5, 0.5, lambda).unwrap();
            let new = min_obs_eps1_zero(0.5, 0.5, lambda).unwrap();
            let diff = new.raw_value - old.raw_value;
            assert_eq!(diff > 0.0, expect_new_larger, "lambda = {lambda}");
        }
        let old = min_obs_two_error(0.5, 0.5, 0.5).unwrap();
        let new = min_obs_eps1_zero(0.5, 0.5, 0.5).unwrap();
        assert!((new.raw_value - old.raw_value).abs() <= 1e-9);
    }

    #[test]
    fn curve_rows_match_schema_examples() {
        let grid: Vec<f64> = (1..=9).map(|k| 0.05 * k as f64).collect();
        let config = CurveConfig {
            lambda_grid: grid,
            eps: 0.5,
            eps1: 0.0,
            eps2: 0.5,
            delta: 0.5,
        };
        let rows = bound_curves(&config).unwrap();
        assert_eq!(rows.len(), 9);
        // n_old strictly decreasing in lambda
        for pair in rows.windows(2) {
            assert!(pair[0].n_old_raw > pair[1].n_old_raw);
        }
        assert_eq!(rows[0].n_old_min, 4);
        assert_eq!(rows[0].n_reference, 2);
        assert!(rows[0].new_undefined); // lambda 0.05 <= 1/3

        let empty = bound_curves(&CurveConfig {
            lambda_grid: vec![],
            eps: 0.5,
            eps1: 0.0,
            eps2: 0.5,
            delta: 0.5,
        })
        .unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn minimality_of_searched_bound() {
        // inequality fails at n_min - 1, holds at n_min, on a spread of tuples
        let cases = [
            (0.1, 0.3, 0.5, 0.05),
            (0.05, 0.8, 0.5, 0.2),
            (0.2, 0.9, 0.5, 0.01),
            (0.01, 0.5, 0.5, 0.45),
            (0.001, 0.01, 0.5, 0.3),
        ];
        for &(e1, e2, d, lam) in &cases {
            let r = min_obs_three_error(e1, e2, d, lam).unwrap();
            assert!(!r.vacuous);
            assert!(three_error_necessary_holds(r.n_min, e1, e2, d, lam).unwrap());
            assert!(!three_error_necessary_holds(r.n_min - 1, e1, e2, d, lam).unwrap());
        }
    }

    #[test]
    fn rhs_strictly_decreases_in_n() {
        for &(r1, r2) in &[(0.01, 0.02), (0.1, 0.5), (0.45, 0.9), (0.001, 0.999)] {
            let g = |n: u64| 2.0 * pow_one_minus(r1, n) + pow_one_minus(r2, n);
            let mut prev = g(0);
            for n in [1u64, 2, 3, 5, 10, 50, 100, 1_000, 10_000] {
                let cur = g(n);
                assert!(
                    cur < prev || (cur == 0.0 && prev == 0.0),
                    "g not decreasing at n = {n} for r1 = {r1}, r2 = {r2}"
                );
                prev = cur;
            }
        }
    }

    #[test]
    fn bounds_are_scale_invariant() {
        for &scale in &[2.0, 4.0, 0.5, 3.0] {
            let base = min_obs_two_error(0.3, 0.4, 0.07).unwrap();
            let scaled = min_obs_two_error(0.3 * scale, 0.4 * scale, 0.07).unwrap();
            assert_eq!(base.n_min, scaled.n_min);
            assert!((base.raw_value - scaled.raw_value).abs() < 1e-9 * base.raw_value);

            let base = min_obs_three_error(0.1, 0.3, 0.4, 0.07).unwrap();
            let scaled = min_obs_three_error(0.1 * scale, 0.3 * scale, 0.4 * scale, 0.07).unwrap();
            assert_eq!(base.n_min, scaled.n_min);
            assert!((base.raw_value - scaled.raw_value).abs() < 1e-9 * base.raw_value);
        }
    }

    #[test]
    fn eps2_to_zero_blows_up_the_bound() {
        let mut last = 0u64;
        for &eps2 in &[0.1, 0.01, 0.001, 0.0001] {
            let r = min_obs_eps1_zero(eps2, 0.5, 0.4).unwrap();
            assert!(r.n_min > last, "n_min should grow as eps2 shrinks");
            last = r.n_min;
        }
        assert!(last > 9_000);
    }
}
