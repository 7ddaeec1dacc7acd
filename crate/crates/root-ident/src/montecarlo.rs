//! Empirical error estimation for the identification tests.
//!
//! Error probabilities are estimated by running a concrete test on fresh
//! observation vectors and counting region-inappropriate verdicts. Every
//! estimate carries an exact binomial (Clopper-Pearson) confidence
//! interval; achievability decisions use the interval's upper bound so that
//! empirical claims stay conservative against the theoretical lower bounds.
//!
//! Trials are seeded per index by the counter scheme in [`crate::rng`], so
//! splitting a trial range across rayon workers cannot change any count.

use rayon::prelude::*;
use statrs::distribution::{Beta, ContinuousCDF};

use crate::error::{Error, Result};
use crate::idtests::{IdentTest, RegionKind, ThreeErrorSpec};
use crate::model::{box_intersection_measure, Interval, UniformRootModel};

/// Binomial proportion estimate with an exact confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorEstimate {
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub trials: u64,
    pub failures: u64,
}

/// Exact binomial (Clopper-Pearson) interval at the given confidence level,
/// via the beta quantile representation of the binomial tail.
pub fn clopper_pearson(failures: u64, trials: u64, confidence: f64) -> Result<ErrorEstimate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if failures > trials {
        return Err(Error::InvalidArgument(format!(
            "failures ({failures}) exceed trials ({trials})"
        )));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "confidence must lie in (0, 1), got {confidence}"
        )));
    }
    let alpha = 1.0 - confidence;
    let (k, n) = (failures as f64, trials as f64);
    let ci_lo = if failures == 0 {
        0.0
    } else {
        Beta::new(k, n - k + 1.0)
            .expect("valid beta shape")
            .inverse_cdf(alpha / 2.0)
    };
    let ci_hi = if failures == trials {
        1.0
    } else {
        Beta::new(k + 1.0, n - k)
            .expect("valid beta shape")
            .inverse_cdf(1.0 - alpha / 2.0)
    };
    Ok(ErrorEstimate {
        p_hat: k / n,
        ci_lo,
        ci_hi,
        trials,
        failures,
    })
}

fn count_failures<T: IdentTest>(
    test: &T,
    model: &UniformRootModel,
    desired: u8,
    trials: u64,
) -> u64 {
    let n = test.observation_count();
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let obs = model
                .observations(0.0, n, trial)
                .expect("n >= 1 by construction");
            let verdict = test
                .decide(&obs)
                .expect("model observations are always consistent");
            u64::from(verdict.bit != desired)
        })
        .sum()
}

/// Estimates the probability of the region-inappropriate verdict when the
/// root sits at `kappa`: a 0-verdict in target/ring regions, a 1-verdict in
/// the reject region.
pub fn estimate_error_probability<T: IdentTest>(
    test: &T,
    kappa: f64,
    region: RegionKind,
    trials: u64,
    seed: u64,
    confidence: f64,
) -> Result<ErrorEstimate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let desired = test.desired_bit(region).ok_or_else(|| {
        Error::InvalidArgument(format!("region {region} does not apply to this test"))
    })?;
    if !test.region_contains(region, kappa) {
        return Err(Error::InvalidArgument(format!(
            "kappa = {kappa} lies outside the {region} region"
        )));
    }
    let model = UniformRootModel::new(kappa, test.noise_half_width(), seed)?;
    let failures = count_failures(test, &model, desired, trials);
    clopper_pearson(failures, trials, confidence)
}

/// Worst case over a sweep of root positions.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub worst_kappa: f64,
    pub worst_estimate: ErrorEstimate,
    pub grid: Vec<(f64, ErrorEstimate)>,
}

/// Lays `grid_points` positions over the region's segments (every segment
/// endpoint included) and estimates the error at each. All positions share
/// the same trial noise streams, which keeps sweeps reproducible under any
/// partitioning and lets positions be compared on common draws.
pub fn worst_case_error<T: IdentTest>(
    test: &T,
    region: RegionKind,
    grid_points: usize,
    trials: u64,
    seed: u64,
    confidence: f64,
) -> Result<SweepReport> {
    if grid_points < 2 {
        return Err(Error::InvalidArgument(
            "grid_points must be at least 2".into(),
        ));
    }
    let segments = test.sweep_segments(region);
    if segments.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "region {region} is empty for this test"
        )));
    }
    let kappas = region_grid(&segments, grid_points);
    let mut grid = Vec::with_capacity(kappas.len());
    let mut worst: Option<(f64, ErrorEstimate)> = None;
    for kappa in kappas {
        let est = estimate_error_probability(test, kappa, region, trials, seed, confidence)?;
        if worst.as_ref().is_none_or(|(_, w)| est.p_hat > w.p_hat) {
            worst = Some((kappa, est));
        }
        grid.push((kappa, est));
    }
    let (worst_kappa, worst_estimate) = worst.expect("at least one grid point");
    Ok(SweepReport {
        worst_kappa,
        worst_estimate,
        grid,
    })
}

/// Distributes points over segments proportionally to width, always keeping
/// both endpoints of every segment.
fn region_grid(segments: &[Interval], grid_points: usize) -> Vec<f64> {
    let total_width: f64 = segments.iter().map(Interval::width).sum();
    let mut kappas = Vec::new();
    for seg in segments {
        let share = if total_width > 0.0 {
            (grid_points as f64 * seg.width() / total_width).round() as usize
        } else {
            grid_points / segments.len()
        };
        let points = share.max(2);
        for i in 0..points {
            let t = i as f64 / (points - 1) as f64;
            kappas.push(seg.lo() + t * seg.width());
        }
    }
    kappas.dedup();
    kappas
}

/// Smallest observation count whose worst-case empirical error, judged by
/// the CI upper bound across every region of the test, stays within
/// `lambda_target`. Scans n = 1..=search_cap; on exhaustion reports the best
/// attempt inside the error.
#[allow(clippy::too_many_arguments)]
pub fn achievable_n<T: IdentTest>(
    family: &T,
    lambda_target: f64,
    search_cap: usize,
    grid_points: usize,
    trials: u64,
    seed: u64,
    confidence: f64,
) -> Result<usize> {
    if !(lambda_target > 0.0 && lambda_target < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda_target must lie in (0, 1), got {lambda_target}"
        )));
    }
    if search_cap == 0 {
        return Err(Error::InvalidArgument("search_cap must be at least 1".into()));
    }
    let mut best: Option<(usize, ErrorEstimate)> = None;
    for n in 1..=search_cap {
        let test = family.with_observation_count(n);
        let mut worst: Option<ErrorEstimate> = None;
        for &region in test.regions() {
            let report = worst_case_error(&test, region, grid_points, trials, seed, confidence)?;
            if worst
                .as_ref()
                .is_none_or(|w| report.worst_estimate.ci_hi > w.ci_hi)
            {
                worst = Some(report.worst_estimate);
            }
        }
        let worst = worst.expect("tests have at least one region");
        if worst.ci_hi <= lambda_target {
            return Ok(n);
        }
        if best.as_ref().is_none_or(|(_, b)| worst.ci_hi < b.ci_hi) {
            best = Some((n, worst));
        }
    }
    let (best_n, best_estimate) = best.expect("search_cap >= 1");
    Err(Error::CapExhausted {
        cap: search_cap,
        best_n,
        best_estimate,
    })
}

/// Analytic overlap cap for one pair of root positions the test has to
/// distinguish: the normalized measure of the intersection of their
/// observation boxes.
#[derive(Debug, Clone, Copy)]
pub struct PairCap {
    pub lhs: f64,
    pub rhs: f64,
    pub separation: f64,
    /// `box_intersection_measure(lhs, rhs, delta, n) / (2 delta)^n`.
    pub normalized_cap: f64,
}

/// Empirical check of one box-measure inequality for the three-error test.
#[derive(Debug, Clone)]
pub struct MeasureReport {
    /// Root position probed.
    pub c: f64,
    pub region: RegionKind,
    pub desired_bit: u8,
    /// Error budget of the region.
    pub budget: f64,
    /// Frequency of the desired verdict under uniform sampling of the
    /// observation box of `c`; equals the normalized measure of the
    /// verdict's preimage inside that box.
    pub ratio: ErrorEstimate,
    /// Whether `ratio > 1 - budget` held empirically (point estimate).
    pub holds: bool,
    /// Whether it holds even at the conservative CI lower end.
    pub holds_at_ci_lo: bool,
    /// Analytic caps for the three adjacent pairs the test distinguishes:
    /// (a, a-eps1), (a-eps2+eps1, a-eps2), (a, a-eps2).
    pub caps: [PairCap; 3],
}

/// Estimates the normalized measure of the test's verdict preimage inside
/// the observation box of root position `c`, and reports it against the
/// region's error budget. Observation vectors drawn from the model at root
/// `c` are exactly uniform on that box, so the frequency of the desired
/// verdict estimates `m(preimage ∩ box) / (2 delta)^n`.
pub fn verify_measure_inequalities(
    spec: &ThreeErrorSpec,
    c: f64,
    trials: u64,
    seed: u64,
    confidence: f64,
) -> Result<MeasureReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    // membership via the truncated sweep segments: past them the box no
    // longer meets any decision boundary and the check is trivially 1
    let region = [RegionKind::Target, RegionKind::Ring, RegionKind::Reject]
        .into_iter()
        .find(|&r| spec.sweep_segments(r).iter().any(|seg| seg.contains(c)))
        .ok_or_else(|| {
            Error::InvalidArgument(format!(
                "c = {c} lies in no verifiable region of the test"
            ))
        })?;
    let desired = spec.desired_bit(region).expect("three-error regions all apply");
    let budget = spec.budget(region).expect("three-error regions all apply");

    let model = UniformRootModel::new(c, spec.delta(), seed)?;
    let failures = count_failures(spec, &model, desired, trials);
    let successes = trials - failures;
    let ratio = clopper_pearson(successes, trials, confidence)?;

    let n = u32::try_from(spec.n())
        .map_err(|_| Error::InvalidArgument("observation count exceeds u32".into()))?;
    let full = box_intersection_measure(0.0, 0.0, spec.delta(), n)?;
    let cap = |lhs: f64, rhs: f64| -> Result<PairCap> {
        Ok(PairCap {
            lhs,
            rhs,
            separation: (lhs - rhs).abs(),
            normalized_cap: box_intersection_measure(lhs, rhs, spec.delta(), n)? / full,
        })
    };
    let a = spec.a();
    let caps = [
        cap(a, a - spec.eps1())?,
        cap(a - spec.eps2() + spec.eps1(), a - spec.eps2())?,
        cap(a, a - spec.eps2())?,
    ];

    Ok(MeasureReport {
        c,
        region,
        desired_bit: desired,
        budget,
        holds: ratio.p_hat > 1.0 - budget,
        holds_at_ci_lo: ratio.ci_lo > 1.0 - budget,
        ratio,
        caps,
    })
}
