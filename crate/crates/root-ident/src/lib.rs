//! Laboratory for root identification of noisy functions.
//!
//! Deciding *whether* the root of an unknown function lies in an interval
//! is cheaper than computing the root, but not free: with bounded uniform
//! observation noise, any reliable yes/no test needs a number of
//! observations logarithmic in its error budget and gap-to-noise ratio.
//! This crate makes that whole story executable:
//!
//! * [`model`] — the uniform observation model plus interval/box geometry;
//! * [`idtests`] — concrete two-error and three-error identification tests;
//! * [`bounds`] — the logarithmic lower bounds, their numerical inversion,
//!   comparisons and curve data;
//! * [`montecarlo`] — error estimation with exact binomial confidence
//!   intervals, worst-case sweeps, achievability searches, and box-measure
//!   inequality checks;
//! * [`rootfind`] — Newton-Raphson and Robbins-Monro for the contrast
//!   between identifying and computing a root;
//! * [`idcodes`] — toy coloring-scheme identification codes exhibiting the
//!   doubly exponential growth that root identification lacks;
//! * [`cli`] — the `root-ident` command-line front end emitting
//!   reproducible tabular artifacts.
//!
//! All randomness is counter-based (keyed draws, no generator state), so
//! every experiment is reproducible bit-for-bit under any worker-thread
//! partitioning.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod idcodes;
pub mod idtests;
pub mod model;
pub mod montecarlo;
pub mod rng;
pub mod rootfind;

pub use error::{Error, Result};
pub use idtests::{feasible_interval, IdentTest, RegionKind, ThreeErrorSpec, TwoErrorSpec, Verdict};
pub use model::{box_intersection_measure, Hypercube, Interval, UniformRootModel};
