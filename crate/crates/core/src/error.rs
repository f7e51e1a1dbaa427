use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("could not parse permutation: {0}")]
    Parse(String),
    #[error("value {0} appears more than once")]
    DuplicateValue(usize),
    #[error("value {value} is outside 1..={n}")]
    ValueOutOfRange { value: usize, n: usize },
    #[error("position {index} is outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("positions must be distinct, got {0} twice")]
    SamePosition(usize),
    #[error("operation requires a nonempty permutation")]
    EmptyPermutation,
    #[error("points are not in general position")]
    GeneralPosition,
    #[error("invalid region corners: need a1 < a2 and b2 < b1 inside [0,1]")]
    InvalidRegion,
    #[error("point lies on a region boundary")]
    RegionBoundary,
    #[error("{what} = {value} exceeds the enumeration guard {guard}")]
    GuardExceeded { what: &'static str, value: usize, guard: usize },
    #[error("vertex set is not contained in the complex")]
    NotSubset,
    #[error("connectivity level {0} is below -1")]
    InvalidLevel(i64),
    #[error("cannot wedge with the empty space")]
    WedgeWithEmpty,
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
