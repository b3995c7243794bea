use thiserror::Error;

use crate::enumeration::Verdict;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the engine can report.
///
/// All variants are domain errors except [`Error::Schema`], which covers
/// malformed or inconsistent input documents.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("quiver has an edge loop at vertex {0}")]
    EdgeLoop(String),
    #[error("permutation is not an automorphism of the quiver: {0}")]
    NotAutomorphism(String),
    #[error("an arrow joins two vertices of the same orbit ({0} -> {1})")]
    ArrowInsideOrbit(String, String),
    #[error("Cartan matrix is singular; cannot convert to coroot coordinates")]
    NonInvertibleCartan,
    #[error("Cartan matrix is not of finite type")]
    NotFiniteType,
    #[error("no highest root: the quiver is not of untwisted affine ADE type")]
    NoHighestRoot,
    #[error("level must be positive, got {0}")]
    NonpositiveLevel(i64),
    #[error("levels differ: {0} vs {1}")]
    LevelMismatch(i64, i64),
    #[error("result {0} is not an integer")]
    NonIntegerResult(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("coweight is not dominant")]
    NotDominant,
    #[error("grading `{0}` needs an alpha vector")]
    MissingAlpha(String),
    #[error("exponent function is not proper ({0:?}); supply a radius override")]
    NotProper(Verdict),
    #[error("enumeration radius {radius} exceeds the cap {cap}")]
    Overflow { radius: u64, cap: u64 },
    #[error("series have different variable sets ({0} vs {1} z-variables)")]
    VariableMismatch(usize, usize),
    #[error("degrees must be positive, got {0}")]
    NonpositiveDegree(i64),
    #[error("series order {0} is below the minimum of {1}")]
    InsufficientOrder(i64, i64),
    #[error("series is not a one-variable series with nonnegative coefficients")]
    UnsupportedSeries,
    #[error("mu is not below lambda in the dominance order")]
    NonComparable,
    #[error("affine weight is not dominant")]
    NotAffineDominant,
    #[error("alpha has a negative entry")]
    NegativeAlpha,
    #[error("affine leaf intervals need an energy bound")]
    MissingEnergyBound,
    #[error("malformed series file: {0}")]
    Format(String),
    #[error("invalid input: {0}")]
    Schema(String),
}

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EdgeLoop(_) => "EdgeLoop",
            Error::NotAutomorphism(_) => "NotAutomorphism",
            Error::ArrowInsideOrbit(..) => "ArrowInsideOrbit",
            Error::NonInvertibleCartan => "NonInvertibleCartan",
            Error::NotFiniteType => "NotFiniteType",
            Error::NoHighestRoot => "NoHighestRoot",
            Error::NonpositiveLevel(_) => "NonpositiveLevel",
            Error::LevelMismatch(..) => "LevelMismatch",
            Error::NonIntegerResult(_) => "NonIntegerResult",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::NotDominant => "NotDominant",
            Error::MissingAlpha(_) => "MissingAlpha",
            Error::NotProper(_) => "NotProper",
            Error::Overflow { .. } => "Overflow",
            Error::VariableMismatch(..) => "VariableMismatch",
            Error::NonpositiveDegree(_) => "NonpositiveDegree",
            Error::InsufficientOrder(..) => "InsufficientOrder",
            Error::UnsupportedSeries => "UnsupportedSeries",
            Error::NonComparable => "NonComparable",
            Error::NotAffineDominant => "NotAffineDominant",
            Error::NegativeAlpha => "NegativeAlpha",
            Error::MissingEnergyBound => "MissingEnergyBound",
            Error::Format(_) => "FormatError",
            Error::Schema(_) => "SchemaError",
        }
    }

    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::Schema(_) | Error::Format(_))
    }
}
