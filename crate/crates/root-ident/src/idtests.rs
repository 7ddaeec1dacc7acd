//! Executable identification tests.
//!
//! A test reads `n` noisy observations and declares whether the unknown
//! root lies in a target interval `[a, b]`. The decision statistic is the
//! *feasible interval*: the set of root locations consistent with every
//! observation under noise of half-width `delta`. It always contains the
//! true root, which pins the in-target miss probability of the two-error
//! test at exactly zero and makes worst-case errors analytically tractable.
//!
//! Two constructions are provided:
//!
//! * [`TwoErrorSpec`] — one gap pair of width `eps` around the target;
//!   answers 1 iff the feasible interval reaches the `eps/2`-widened target.
//! * [`ThreeErrorSpec`] — two gap pairs (`eps1` inner, `eps2` outer) plus
//!   "ring" zones that must still be answered 1; answers 1 iff the feasible
//!   midpoint lies within the outer-gap midlines.

use crate::error::{Error, Result};
use crate::model::Interval;

/// Parameter regions a test is judged on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionKind {
    /// Root inside `[a, b]`; the test must answer 1.
    Target,
    /// Root beyond the outermost gap; the test must answer 0.
    Reject,
    /// Intermediate zones of the three-error test that must answer 1.
    Ring,
}

impl std::fmt::Display for RegionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RegionKind::Target => "target",
            RegionKind::Reject => "reject",
            RegionKind::Ring => "ring",
        };
        f.write_str(s)
    }
}

/// Outcome of one test evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    /// 1 = root declared inside the target, 0 = declared outside.
    pub bit: u8,
    /// Root locations consistent with the observations.
    pub feasible: Interval,
}

/// Intersection of the per-observation constraints `root in [-y-delta, -y+delta]`
/// for observations taken at query level 0.
///
/// Contains the true root with probability 1 when the observations come from
/// the uniform model. Foreign data whose spread exceeds `2 delta` is
/// consistent with no root at all and is rejected.
pub fn feasible_interval(obs: &[f64], delta: f64) -> Result<Interval> {
    if obs.is_empty() {
        return Err(Error::InvalidArgument(
            "feasible interval needs at least one observation".into(),
        ));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &y in obs {
        if !y.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "observations must be finite, got {y}"
            )));
        }
        min = min.min(y);
        max = max.max(y);
    }
    if max - min > 2.0 * delta {
        return Err(Error::InconsistentData(format!(
            "observation spread {} exceeds noise support width {}",
            max - min,
            2.0 * delta
        )));
    }
    let lo = -min - delta;
    let hi = -max + delta;
    if lo <= hi {
        Ok(Interval::ordered(lo, hi))
    } else {
        // spread == 2 delta up to rounding; collapse to the midpoint
        let mid = 0.5 * (lo + hi);
        Ok(Interval::ordered(mid, mid))
    }
}

/// Common surface the Monte Carlo harness drives tests through.
pub trait IdentTest: Clone + Send + Sync {
    fn observation_count(&self) -> usize;
    fn noise_half_width(&self) -> f64;
    fn decide(&self, obs: &[f64]) -> Result<Verdict>;
    /// Regions this test is specified on.
    fn regions(&self) -> &'static [RegionKind];
    /// Required output bit in `region`, if the region applies.
    fn desired_bit(&self, region: RegionKind) -> Option<u8>;
    /// Error budget in `region`, if the region applies.
    fn budget(&self, region: RegionKind) -> Option<f64>;
    /// Membership in the (untruncated) region.
    fn region_contains(&self, region: RegionKind, kappa: f64) -> bool;
    /// Finite segments to sweep; unbounded regions are truncated where the
    /// error of the feasible-interval construction is exactly zero.
    fn sweep_segments(&self, region: RegionKind) -> Vec<Interval>;
    fn with_observation_count(&self, n: usize) -> Self
    where
        Self: Sized;
}

/// Two-error identification test: gap `eps`, budgets `lambda1` (miss) and
/// `lambda2` (false alarm).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoErrorSpec {
    a: f64,
    b: f64,
    eps: f64,
    delta: f64,
    n: usize,
    lambda1: f64,
    lambda2: f64,
}

impl TwoErrorSpec {
    pub fn new(
        a: f64,
        b: f64,
        eps: f64,
        delta: f64,
        n: usize,
        lambda1: f64,
        lambda2: f64,
    ) -> Result<Self> {
        check_target(a, b)?;
        check_delta(delta)?;
        if !(eps > 0.0 && eps < 2.0 * delta) {
            return Err(Error::InvalidArgument(format!(
                "requires 0 < eps < 2*delta, got eps = {eps}, delta = {delta}"
            )));
        }
        check_lambda("lambda1", lambda1)?;
        check_lambda("lambda2", lambda2)?;
        check_n(n)?;
        Ok(Self {
            a,
            b,
            eps,
            delta,
            n,
            lambda1,
            lambda2,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }
    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    /// Target widened by `eps/2` on both sides: the decision threshold sits
    /// at the midline of each silent gap.
    pub fn widened_target(&self) -> Interval {
        Interval::ordered(self.a - 0.5 * self.eps, self.b + 0.5 * self.eps)
    }

    pub fn decide(&self, obs: &[f64]) -> Result<Verdict> {
        if obs.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "expected {} observations, got {}",
                self.n,
                obs.len()
            )));
        }
        let feasible = feasible_interval(obs, self.delta)?;
        let bit = u8::from(feasible.intersects(&self.widened_target()));
        Ok(Verdict { bit, feasible })
    }
}

impl IdentTest for TwoErrorSpec {
    fn observation_count(&self) -> usize {
        self.n
    }

    fn noise_half_width(&self) -> f64 {
        self.delta
    }

    fn decide(&self, obs: &[f64]) -> Result<Verdict> {
        TwoErrorSpec::decide(self, obs)
    }

    fn regions(&self) -> &'static [RegionKind] {
        &[RegionKind::Target, RegionKind::Reject]
    }

    fn desired_bit(&self, region: RegionKind) -> Option<u8> {
        match region {
            RegionKind::Target => Some(1),
            RegionKind::Reject => Some(0),
            RegionKind::Ring => None,
        }
    }

    fn budget(&self, region: RegionKind) -> Option<f64> {
        match region {
            RegionKind::Target => Some(self.lambda1),
            RegionKind::Reject => Some(self.lambda2),
            RegionKind::Ring => None,
        }
    }

    fn region_contains(&self, region: RegionKind, kappa: f64) -> bool {
        match region {
            RegionKind::Target => self.a <= kappa && kappa <= self.b,
            RegionKind::Reject => kappa <= self.a - self.eps || kappa >= self.b + self.eps,
            RegionKind::Ring => false,
        }
    }

    fn sweep_segments(&self, region: RegionKind) -> Vec<Interval> {
        let reach = 2.0 * self.delta;
        match region {
            RegionKind::Target => vec![Interval::ordered(self.a, self.b)],
            RegionKind::Reject => vec![
                Interval::ordered(self.a - self.eps - reach, self.a - self.eps),
                Interval::ordered(self.b + self.eps, self.b + self.eps + reach),
            ],
            RegionKind::Ring => vec![],
        }
    }

    fn with_observation_count(&self, n: usize) -> Self {
        Self { n, ..*self }
    }
}

/// Three-error identification test: inner gap `eps1`, outer gap `eps2`,
/// budgets `lambda1` (target miss), `lambda2` (false alarm), `lambda3`
/// (ring miss).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeErrorSpec {
    a: f64,
    b: f64,
    eps1: f64,
    eps2: f64,
    delta: f64,
    n: usize,
    lambda1: f64,
    lambda2: f64,
    lambda3: f64,
}

impl ThreeErrorSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: f64,
        b: f64,
        eps1: f64,
        eps2: f64,
        delta: f64,
        n: usize,
        lambda1: f64,
        lambda2: f64,
        lambda3: f64,
    ) -> Result<Self> {
        check_target(a, b)?;
        check_delta(delta)?;
        if !(eps1 > 0.0 && 2.0 * eps1 < eps2 && eps2 < 2.0 * delta) {
            return Err(Error::InvalidArgument(format!(
                "requires 0 < 2*eps1 < eps2 < 2*delta, got eps1 = {eps1}, eps2 = {eps2}, delta = {delta}"
            )));
        }
        check_lambda("lambda1", lambda1)?;
        check_lambda("lambda2", lambda2)?;
        check_lambda("lambda3", lambda3)?;
        check_n(n)?;
        Ok(Self {
            a,
            b,
            eps1,
            eps2,
            delta,
            n,
            lambda1,
            lambda2,
            lambda3,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn eps1(&self) -> f64 {
        self.eps1
    }
    pub fn eps2(&self) -> f64 {
        self.eps2
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }
    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }
    pub fn lambda3(&self) -> f64 {
        self.lambda3
    }

    /// Feasible-midpoint acceptance band; its edges sit at the midlines of
    /// the outer silent gaps.
    pub fn decision_band(&self) -> Interval {
        Interval::ordered(
            self.a - self.eps2 + 0.5 * self.eps1,
            self.b + self.eps2 - 0.5 * self.eps1,
        )
    }

    /// Ring segments that must answer 1.
    ///
    /// The symmetric reading mirrors the left ring: `[b+eps1, b+eps2-eps1]`.
    /// With `literal_right = true` the right segment is `[b+eps1,
    /// b+eps2+eps1]`, which overlaps the must-answer-0 region beyond
    /// `b+eps2`; it is exposed for error-budget accounting only and never
    /// used for decisions.
    pub fn ring_segments(&self, literal_right: bool) -> [Interval; 2] {
        let left = Interval::ordered(self.a - self.eps2 + self.eps1, self.a - self.eps1);
        let right_hi = if literal_right {
            self.b + self.eps2 + self.eps1
        } else {
            self.b + self.eps2 - self.eps1
        };
        let right = Interval::ordered(self.b + self.eps1, right_hi);
        [left, right]
    }

    pub fn decide(&self, obs: &[f64]) -> Result<Verdict> {
        if obs.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "expected {} observations, got {}",
                self.n,
                obs.len()
            )));
        }
        let feasible = feasible_interval(obs, self.delta)?;
        let bit = u8::from(self.decision_band().contains(feasible.midpoint()));
        Ok(Verdict { bit, feasible })
    }
}

impl IdentTest for ThreeErrorSpec {
    fn observation_count(&self) -> usize {
        self.n
    }

    fn noise_half_width(&self) -> f64 {
        self.delta
    }

    fn decide(&self, obs: &[f64]) -> Result<Verdict> {
        ThreeErrorSpec::decide(self, obs)
    }

    fn regions(&self) -> &'static [RegionKind] {
        &[RegionKind::Target, RegionKind::Reject, RegionKind::Ring]
    }

    fn desired_bit(&self, region: RegionKind) -> Option<u8> {
        match region {
            RegionKind::Target | RegionKind::Ring => Some(1),
            RegionKind::Reject => Some(0),
        }
    }

    fn budget(&self, region: RegionKind) -> Option<f64> {
        match region {
            RegionKind::Target => Some(self.lambda1),
            RegionKind::Reject => Some(self.lambda2),
            RegionKind::Ring => Some(self.lambda3),
        }
    }

    fn region_contains(&self, region: RegionKind, kappa: f64) -> bool {
        match region {
            RegionKind::Target => self.a <= kappa && kappa <= self.b,
            RegionKind::Reject => kappa <= self.a - self.eps2 || kappa >= self.b + self.eps2,
            RegionKind::Ring => self
                .ring_segments(false)
                .iter()
                .any(|seg| seg.contains(kappa)),
        }
    }

    fn sweep_segments(&self, region: RegionKind) -> Vec<Interval> {
        let reach = 2.0 * self.delta;
        match region {
            RegionKind::Target => vec![Interval::ordered(self.a, self.b)],
            RegionKind::Reject => vec![
                Interval::ordered(self.a - self.eps2 - reach, self.a - self.eps2),
                Interval::ordered(self.b + self.eps2, self.b + self.eps2 + reach),
            ],
            RegionKind::Ring => self.ring_segments(false).to_vec(),
        }
    }

    fn with_observation_count(&self, n: usize) -> Self {
        Self { n, ..*self }
    }
}

fn check_target(a: f64, b: f64) -> Result<()> {
    if !a.is_finite() || !b.is_finite() || a > b {
        return Err(Error::InvalidArgument(format!(
            "target interval requires finite a <= b, got a = {a}, b = {b}"
        )));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must be positive, got {delta}"
        )));
    }
    Ok(())
}

fn check_lambda(name: &str, lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "{name} must lie in (0, 1), got {lambda}"
        )));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "observation count n must be at least 1".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::model::UniformRootModel;
    use proptest::prelude::*;

    fn two_spec(n: usize) -> TwoErrorSpec {
        TwoErrorSpec::new(0.0, 1.0, 0.5, 0.5, n, 0.1, 0.1).unwrap()
    }

    fn three_spec(n: usize) -> ThreeErrorSpec {
        ThreeErrorSpec::new(0.0, 1.0, 0.1, 0.4, 0.5, n, 0.1, 0.1, 0.1).unwrap()
    }

    #[test]
    fn feasible_interval_examples() {
        let f = feasible_interval(&[0.0], 0.5).unwrap();
        assert_eq!((f.lo(), f.hi()), (-0.5, 0.5));

        let f = feasible_interval(&[-1.2, -0.8], 0.5).unwrap();
        assert!((f.lo() - 0.7).abs() < 1e-12 && (f.hi() - 1.3).abs() < 1e-12);

        assert!(matches!(
            feasible_interval(&[0.0, 2.0], 0.5),
            Err(Error::InconsistentData(_))
        ));
        assert!(matches!(
            feasible_interval(&[], 0.5),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn feasible_interval_always_covers_the_root() {
        let model = UniformRootModel::new(0.37, 0.5, 11).unwrap();
        for trial in 0..100_000u64 {
            let obs = model.observations(0.0, 5, trial).unwrap();
            let f = feasible_interval(&obs, 0.5).unwrap();
            assert!(f.contains(0.37), "trial {trial}: {f} misses root");
        }
    }

    #[test]
    fn spec_constructors_validate() {
        assert!(TwoErrorSpec::new(1.0, 0.0, 0.5, 0.5, 2, 0.1, 0.1).is_err());
        assert!(TwoErrorSpec::new(0.0, 1.0, 1.1, 0.5, 2, 0.1, 0.1).is_err()); // eps >= 2 delta
        assert!(TwoErrorSpec::new(0.0, 1.0, 0.5, 0.5, 0, 0.1, 0.1).is_err());
        assert!(TwoErrorSpec::new(0.0, 1.0, 0.5, 0.5, 2, 0.0, 0.1).is_err());
        assert!(ThreeErrorSpec::new(0.0, 1.0, 0.2, 0.4, 0.5, 2, 0.1, 0.1, 0.1).is_err()); // 2 eps1 = eps2
        assert!(ThreeErrorSpec::new(0.0, 1.0, 0.1, 1.0, 0.5, 2, 0.1, 0.1, 0.1).is_err()); // eps2 = 2 delta
    }

    #[test]
    fn two_error_never_misses_in_target() {
        let spec = two_spec(2);
        let model = UniformRootModel::new(0.5, 0.5, 23).unwrap();
        for trial in 0..1_000_000u64 {
            let obs = model.observations(0.0, 2, trial).unwrap();
            assert_eq!(spec.decide(&obs).unwrap().bit, 1, "miss at trial {trial}");
        }
    }

    #[test]
    fn two_error_rejects_distant_observations() {
        let spec = two_spec(3);
        let verdict = spec.decide(&[10.0, 10.1, 10.2]).unwrap();
        assert_eq!(verdict.bit, 0);
    }

    #[test]
    fn two_error_wrong_count_is_invalid() {
        let spec = two_spec(3);
        assert!(matches!(
            spec.decide(&[0.0]),
            Err(Error::InvalidArgument(_))
        ));
    }

    /// Deterministic quadrature oracle for the n = 1 acceptance probability:
    /// midpoint rule over the observation density at root `kappa`.
    fn accept_prob_n1_quadrature(spec: &TwoErrorSpec, kappa: f64) -> f64 {
        let cells = 1_000_000usize;
        let lo = -kappa - spec.delta();
        let width = 2.0 * spec.delta();
        let step = width / cells as f64;
        let mut hits = 0u64;
        for i in 0..cells {
            let y = lo + (i as f64 + 0.5) * step;
            if spec.decide(&[y]).unwrap().bit == 1 {
                hits += 1;
            }
        }
        hits as f64 / cells as f64
    }

    #[test]
    fn two_error_worst_false_alarm_matches_quadrature() {
        // at kappa = a - eps the acceptance probability is 1 - eps/(4 delta)
        let spec = two_spec(1);
        let kappa = spec.a() - spec.eps();
        let oracle = accept_prob_n1_quadrature(&spec, kappa);
        assert!((oracle - 0.75).abs() < 1e-4, "quadrature gave {oracle}");
        let closed_form = 1.0 - spec.eps() / (4.0 * spec.delta());
        assert!((oracle - closed_form).abs() < 1e-4);
    }

    #[test]
    fn three_error_always_accepts_central_root() {
        let spec = three_spec(4);
        let model = UniformRootModel::new(0.5, 0.5, 31).unwrap();
        for trial in 0..100_000u64 {
            let obs = model.observations(0.0, 4, trial).unwrap();
            assert_eq!(spec.decide(&obs).unwrap().bit, 1);
        }
    }

    #[test]
    fn three_error_rejects_far_root_with_certainty() {
        // kappa = a - eps2 - 1: feasible midpoint sits at least 1 - delta
        // beyond the decision edge, so the verdict is structurally 0
        let spec = three_spec(4);
        let model = UniformRootModel::new(-1.4, 0.5, 5).unwrap();
        for trial in 0..100_000u64 {
            let obs = model.observations(0.0, 4, trial).unwrap();
            assert_eq!(spec.decide(&obs).unwrap().bit, 0);
        }
    }

    #[test]
    fn ring_segments_symmetric_and_literal() {
        let spec = three_spec(4);
        let [left, right] = spec.ring_segments(false);
        assert!((left.lo() - (-0.3)).abs() < 1e-12);
        assert!((left.hi() - (-0.1)).abs() < 1e-12);
        assert!((right.lo() - 1.1).abs() < 1e-12);
        assert!((right.hi() - 1.3).abs() < 1e-12);

        // the literal right segment runs past b + eps2 into the reject region
        let [_, literal] = spec.ring_segments(true);
        assert!(literal.hi() > spec.b() + spec.eps2());
    }

    #[test]
    fn region_membership() {
        let spec = three_spec(4);
        assert!(spec.region_contains(RegionKind::Target, 0.5));
        assert!(spec.region_contains(RegionKind::Reject, -0.4));
        assert!(spec.region_contains(RegionKind::Ring, -0.3));
        assert!(spec.region_contains(RegionKind::Ring, -0.1));
        assert!(!spec.region_contains(RegionKind::Ring, -0.05));

        let two = two_spec(2);
        assert!(!two.region_contains(RegionKind::Ring, 0.0));
        assert!(two.desired_bit(RegionKind::Ring).is_none());
    }

    proptest! {
        #[test]
        fn verdicts_are_translation_invariant(
            kappa in -2.0f64..3.0,
            shift in -5.0f64..5.0,
            trial in 0u64..10_000,
        ) {
            let spec = two_spec(3);
            let shifted = TwoErrorSpec::new(
                spec.a() + shift, spec.b() + shift, spec.eps(), spec.delta(),
                spec.n(), spec.lambda1(), spec.lambda2(),
            ).unwrap();
            let model = UniformRootModel::new(kappa, spec.delta(), 77).unwrap();
            let obs = model.observations(0.0, 3, trial).unwrap();
            let moved: Vec<f64> = obs.iter().map(|y| y - shift).collect();
            prop_assert_eq!(
                spec.decide(&obs).unwrap().bit,
                shifted.decide(&moved).unwrap().bit
            );
        }

        #[test]
        fn three_error_translation_invariant(
            kappa in -2.0f64..3.0,
            shift in -4.0f64..4.0,
            trial in 0u64..10_000,
        ) {
            let spec = three_spec(5);
            let shifted = ThreeErrorSpec::new(
                spec.a() + shift, spec.b() + shift, spec.eps1(), spec.eps2(),
                spec.delta(), spec.n(), spec.lambda1(), spec.lambda2(), spec.lambda3(),
            ).unwrap();
            let model = UniformRootModel::new(kappa, spec.delta(), 78).unwrap();
            let obs = model.observations(0.0, 5, trial).unwrap();
            let moved: Vec<f64> = obs.iter().map(|y| y - shift).collect();
            prop_assert_eq!(
                spec.decide(&obs).unwrap().bit,
                shifted.decide(&moved).unwrap().bit
            );
        }
    }
}
