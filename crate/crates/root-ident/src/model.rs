//! Observation model and interval/box geometry.
//!
//! The unknown function is observed only through noisy samples: a query at
//! level `x` returns a value drawn uniformly from `[x-kappa-delta,
//! x-kappa+delta]`, so the mean response is `M(x) = x - kappa` and the root
//! of `M` is the unknown `kappa`. Boxes (n-fold products of one interval)
//! and their Lebesgue measures back the measure-theoretic checks in
//! [`crate::montecarlo`].

use crate::error::{Error, Result};
use crate::rng;

/// Noisy-root observation model: root `kappa`, uniform noise half-width
/// `delta`, and the seed of its counter-based sample streams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformRootModel {
    kappa: f64,
    delta: f64,
    seed: u64,
}

impl UniformRootModel {
    pub fn new(kappa: f64, delta: f64, seed: u64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "kappa must be finite, got {kappa}"
            )));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "delta must be positive and finite, got {delta}"
            )));
        }
        Ok(Self { kappa, delta, seed })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Mean response `M(x) = x - kappa`; the root of `M` is `kappa`.
    pub fn expected_value(&self, x: f64) -> f64 {
        x - self.kappa
    }

    /// One observation at level `x`, keyed by `(seed, trial, draw)`.
    ///
    /// The underlying noise depends only on the key; `x` and `kappa` just
    /// translate the support, so shifted queries see identical noise.
    pub fn observation(&self, x: f64, trial: u64, draw: u64) -> f64 {
        let center = x - self.kappa;
        rng::draw_uniform(
            self.seed,
            trial,
            draw,
            center - self.delta,
            center + self.delta,
        )
    }

    /// `n` independent observations at level `x` for the given trial.
    ///
    /// Bit-identical for identical `(seed, x, n, trial)` no matter how
    /// trials are partitioned across workers.
    pub fn observations(&self, x: f64, n: usize, trial: u64) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "observation count n must be at least 1".into(),
            ));
        }
        Ok((0..n)
            .map(|draw| self.observation(x, trial, draw as u64))
            .collect())
    }
}

/// Closed real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidArgument(format!(
                "interval requires lo <= hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// Known-ordered construction for internal call sites.
    pub(crate) fn ordered(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// `n`-fold product of one interval, `[center-half_width, center+half_width]^n`,
/// with its Lebesgue measure `(2 half_width)^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hypercube {
    center: f64,
    half_width: f64,
    dim: u32,
}

impl Hypercube {
    pub fn new(center: f64, half_width: f64, dim: u32) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "box center must be finite, got {center}"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "box half-width must be positive, got {half_width}"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidArgument("box dimension must be >= 1".into()));
        }
        Ok(Self {
            center,
            half_width,
            dim,
        })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// The per-axis interval.
    pub fn side(&self) -> Interval {
        Interval::ordered(self.center - self.half_width, self.center + self.half_width)
    }

    /// Lebesgue measure `(2 half_width)^dim`.
    pub fn measure(&self) -> f64 {
        pow_overlap(2.0 * self.half_width, self.dim)
    }

    /// Natural log of the measure; never underflows.
    pub fn ln_measure(&self) -> f64 {
        self.dim as f64 * (2.0 * self.half_width).ln()
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dim as usize && point.iter().all(|&x| self.side().contains(x))
    }
}

fn pow_overlap(base: f64, n: u32) -> f64 {
    if base <= 0.0 {
        return 0.0;
    }
    if n <= i32::MAX as u32 {
        base.powi(n as i32)
    } else {
        // log-space fallback once powi's exponent range is exceeded
        (n as f64 * base.ln()).exp()
    }
}

/// Lebesgue measure of `[c1-delta,c1+delta]^n ∩ [c2-delta,c2+delta]^n`,
/// which is `max(0, 2 delta - |c1 - c2|)^n`.
pub fn box_intersection_measure(c1: f64, c2: f64, delta: f64, n: u32) -> Result<f64> {
    check_intersection_args(c1, c2, delta, n)?;
    Ok(pow_overlap(2.0 * delta - (c1 - c2).abs(), n))
}

/// Log-space variant of [`box_intersection_measure`]; `-inf` for disjoint
/// boxes. Use this where `n ln(2 delta - d)` would underflow the linear form.
pub fn ln_box_intersection_measure(c1: f64, c2: f64, delta: f64, n: u32) -> Result<f64> {
    check_intersection_args(c1, c2, delta, n)?;
    let overlap = 2.0 * delta - (c1 - c2).abs();
    if overlap <= 0.0 {
        Ok(f64::NEG_INFINITY)
    } else {
        Ok(n as f64 * overlap.ln())
    }
}

fn check_intersection_args(c1: f64, c2: f64, delta: f64, n: u32) -> Result<()> {
    if !c1.is_finite() || !c2.is_finite() {
        return Err(Error::InvalidArgument(
            "box centers must be finite".into(),
        ));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must be positive, got {delta}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("dimension n must be >= 1".into()));
    }
    Ok(())
}
