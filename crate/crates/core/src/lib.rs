//! Rate-equivocation analysis for relay channels with confidential messages.
//!
//! A relay channel with confidential messages (RCC) carries a common message
//! to a relay and a receiver plus a private message to the receiver alone,
//! where the relay doubles as a wire-tapper. This crate computes, at desk
//! scale:
//!
//! * finite-alphabet channel objects and degradedness classification
//!   ([`prob`]),
//! * entropies, conditional mutual informations, and per-sequence
//!   information densities ([`info`]),
//! * per-distribution inner/outer rate-equivocation bounds, membership
//!   search over auxiliary input distributions, and secrecy-capacity
//!   bounds ([`regions`]),
//! * closed-form Gaussian rate-equivocation regions and secrecy
//!   capacities ([`gaussian`]),
//! * a Monte Carlo simulator of the block-Markov achievability scheme
//!   with information-density threshold decoders ([`sim`]).
//!
//! All rates are in bits per channel use (logarithms base 2).
//!
//! The numeric core is generic over the floating-point scalar via the
//! [`Real`] trait; `f64` aliases are exported at the crate root and are what
//! the CLI uses.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub mod check;
pub mod gaussian;
pub mod info;
pub mod io;
pub mod prob;
pub mod regions;
pub mod sim;

/// Floating-point scalar for probabilities and rates: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + Sum + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

/// Shorthand for converting an `f64` literal into the working scalar.
pub(crate) fn real<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("literal representable in scalar type")
}

pub use gaussian::{GaussianParams, GaussianRegionId, GaussianSpec};
pub use info::{DensityKind, Var, VarSet};
pub use prob::{AuxInput, AuxInputV, ClassificationReport, JointDist, RelayChannel};
pub use regions::{BoundId, RateTriple, SearchConfig, Slice, Witness};
pub use sim::{Codebook, SimConfig, SimRates, SimReport, TrialOutcome};

/// `f64` aliases, the precision used by the CLI and the test suites.
pub type Channel = RelayChannel<f64>;
pub type Input = AuxInput<f64>;
pub type InputV = AuxInputV<f64>;
pub type Joint = JointDist<f64>;
pub type Rates = RateTriple<f64>;
pub type Gaussian = GaussianSpec<f64>;

/// `f32` aliases for callers trading precision for footprint.
pub type Channel32 = RelayChannel<f32>;
pub type Input32 = AuxInput<f32>;
pub type Joint32 = JointDist<f32>;
