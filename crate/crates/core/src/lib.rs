//! Exact discrete Okounkov bodies and the threshold invariants of graded linear series.
//!
//! The crate is organized bottom-up:
//!
//! - [`geometry`]: rational polytopes with synchronized vertex and halfspace
//!   representations, volumes, barycenters, slices, cones and inscribed balls.
//! - [`lattice`]: enumeration and counting of `Z^n/k` points, discrepancies and
//!   shift-minimized counts.
//! - [`series`]: graded-series models (toric, curve, canonical curve, synthetic)
//!   producing discrete bodies `Δ_k` and their gap sets.
//! - [`thresholds`]: jumping numbers, `S_{k,m}`, quantiles, `S_τ` and restricted
//!   stability thresholds over explicit valuation families.
//! - [`estimates`]: sweeps that check lattice-count and convergence inequalities.
//!
//! Every quantity is an exact rational except the exponent returned by
//! [`estimates::rate_fit`].

pub mod catalog;
pub mod estimates;
pub mod geometry;
pub mod io;
pub mod lattice;
pub mod par;
pub mod rational;
pub mod series;
pub mod thresholds;

pub use geometry::{AffineFunctional, ConcavePL, ConvexBody, HalfSpace, Point};
pub use lattice::PointCloud;
pub use rational::{Int, Rat};
pub use series::GradedSeriesModel;
pub use thresholds::ValuationModel;

/// Errors raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("degenerate body: {0}")]
    Degenerate(String),
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("malformed rational {0:?}")]
    Parse(String),
    #[error("{0}")]
    Domain(String),
    #[error("level k = {0} is not in N(L)")]
    LevelOutOfSeries(u64),
    #[error("m = {m} outside 1..={max}")]
    OutOfRange { m: usize, max: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("malformed input: {0}")]
    Input(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by malformed input files or arguments.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Input(_) | Error::Json(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
