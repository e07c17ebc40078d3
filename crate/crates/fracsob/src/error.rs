//! Error type shared by all modules of the crate.
//!
//! Every failure mode carries the data needed to act on it (offending
//! value, location, threshold), so callers can render a precise message
//! or branch on the variant without string matching.

use std::fmt;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Structured failure for grid construction, sampling, and norm evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Grid constructor got a non-positive spacing, zero node count,
    /// or an unsupported dimension (only 1 and 2 are handled).
    InvalidGrid { reason: String },
    /// A norm/operator parameter is outside its admissible range.
    InvalidParams { reason: String },
    /// A closed form evaluated to a non-finite value at a grid node.
    NonFiniteSample { point: Vec<f64>, id: String },
    /// The closed form has no analytic continuation off the real axis,
    /// so strip-line evaluation is not defined for it.
    NotAnalytic { id: String },
    /// Requested restriction window does not intersect the grid.
    EmptyRestriction,
    /// Requested domain is not covered by the grid of the operand.
    DomainNotCovered { requested: Vec<(f64, f64)>, available: Vec<(f64, f64)> },
    /// Grids of two operands (or a grid and a domain) do not line up.
    GridMismatch { reason: String },
    /// Too few nodes per axis for a pair-sum quadrature to make sense.
    GridTooCoarse { nodes: usize, required: usize },
    /// Boundary values of the input are not below the decay threshold;
    /// raised only in strict mode, otherwise recorded as a warning.
    BoundaryDecay { max_boundary: f64, threshold: f64 },
    /// Derivative order outside the supported range.
    OrderTooHigh { order: u32, max: u32 },
    /// Zero extension requires the support to sit strictly inside the
    /// source domain; the violating node is reported.
    SupportNotCompact { point: Vec<f64>, value: f64 },
    /// Mollification radius too small for the grid spacing.
    RadiusTooSmall { epsilon: f64, min: f64 },
    /// Cutoff construction needs the inner box strictly inside the outer
    /// one with a minimum margin.
    MarginTooSmall { margin: f64, min: f64 },
    /// Corpus manifest problems: unknown id, bad parameters, version skew.
    Corpus { reason: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGrid { reason } => write!(f, "invalid grid: {reason}"),
            Error::InvalidParams { reason } => write!(f, "invalid parameters: {reason}"),
            Error::NonFiniteSample { point, id } => {
                write!(f, "closed form '{id}' is not finite at {point:?}")
            }
            Error::NotAnalytic { id } => {
                write!(f, "closed form '{id}' has no analytic continuation off the real axis")
            }
            Error::EmptyRestriction => write!(f, "restriction window contains no grid nodes"),
            Error::DomainNotCovered { requested, available } => write!(
                f,
                "requested domain {requested:?} is not covered by the grid extent {available:?}"
            ),
            Error::GridMismatch { reason } => write!(f, "grid mismatch: {reason}"),
            Error::GridTooCoarse { nodes, required } => write!(
                f,
                "grid too coarse: {nodes} nodes per axis, at least {required} required"
            ),
            Error::BoundaryDecay { max_boundary, threshold } => write!(
                f,
                "boundary values do not decay: max |u| = {max_boundary:.3e} on the outermost ring, threshold {threshold:.1e}"
            ),
            Error::OrderTooHigh { order, max } => {
                write!(f, "derivative order {order} exceeds the supported maximum {max}")
            }
            Error::SupportNotCompact { point, value } => write!(
                f,
                "support not compact in the source domain: |u| = {value:.3e} at {point:?} within the boundary ring"
            ),
            Error::RadiusTooSmall { epsilon, min } => write!(
                f,
                "mollification radius {epsilon} below the resolvable minimum {min} (two grid cells)"
            ),
            Error::MarginTooSmall { margin, min } => write!(
                f,
                "cutoff margin {margin} below the minimum {min} (four grid cells)"
            ),
            Error::Corpus { reason } => write!(f, "corpus: {reason}"),
        }
    }
}

impl std::error::Error for Error {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_carries_the_offending_data() {
        let e = Error::SupportNotCompact { point: vec![1.0, 2.0], value: 3.5e-2 };
        let msg = e.to_string();
        assert!(msg.contains("support not compact"));
        assert!(msg.contains("3.5"));
        assert!(msg.contains("[1.0, 2.0]"));
    }

    #[test]
    fn errors_compare_structurally() {
        assert_eq!(Error::EmptyRestriction, Error::EmptyRestriction);
        assert_ne!(
            Error::GridTooCoarse { nodes: 2, required: 4 },
            Error::GridTooCoarse { nodes: 3, required: 4 }
        );
    }
}
