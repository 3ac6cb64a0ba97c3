//! The lattice model `Γ = SL(2,Z) ⋉ Z²` acting on `T³` through the embedding
//! `(A, v) ↦ [[A, v], [0, 1]]`, with exact and Monte Carlo evaluation of
//! multiple correlations.
//!
//! Characters `e_m` with `(m₁, m₂) = (0, 0)` are fixed by every element, so
//! correlation inputs must have spectral support off that line.

mod affine;
mod cartan;
mod correlation;
mod montecarlo;
mod presets;
mod sweep;

use thiserror::Error;

pub use affine::AffineLatticeElement;
pub use cartan::{cartan_proxy, CartanProxy};
pub use correlation::{
    check_zero_mean, exact_multicorrelation, exact_multicorrelation_with, k_orbit_dimension,
    support_escape_power, DEFAULT_CONVOLUTION_BUDGET,
};
pub use montecarlo::{mc_multicorrelation, McEstimate, MC_SHARDS};
pub use presets::{smooth_box, Preset};
pub use sweep::{
    decay_sweep, reports_to_csv, CorrelationReport, FunctionDescriptor, SweepConfig, CSV_HEADER,
    REPORT_SCHEMA_VERSION,
};

use crate::bounds::BoundError;
use crate::lattice::Freq;
use crate::repdata::RepError;
use crate::specproj::SpecError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TorusError {
    #[error("not an element of SL(2,Z) ⋉ Z²: {0}")]
    NotAffine(String),
    #[error("frequencies on T³ have 3 coordinates, found {0}")]
    Dimension(usize),
    #[error("expected {expected} functions for {elements} acting elements, found {found}")]
    Arity { expected: usize, elements: usize, found: usize },
    #[error("function {slot} has frequency {witness} on the invariant line (m₁, m₂) = (0, 0)")]
    InvariantFrequency { slot: usize, witness: Freq },
    #[error("Monte Carlo needs at least 2 samples, got {0}")]
    TooFewSamples(u64),
    #[error("invalid power tuple {0:?}: powers must be nonnegative and nondecreasing")]
    InvalidPowers(Vec<i64>),
    #[error("could not certify orbit escape within {0} powers")]
    EscapeNotCertified(u32),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Bound(#[from] BoundError),
}
