use thiserror::Error;

use crate::expr::EvalError;
use crate::field::Point;

/// Which chart of the sphere atlas a feature or failure belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Chart {
    North,
    South,
}

impl Chart {
    pub fn name(self) -> &'static str {
        match self {
            Chart::North => "north",
            Chart::South => "south",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("evaluation failed at ({:.6}, {:.6}): {source}", at[0], at[1])]
    Eval { at: Point, source: EvalError },

    // level sets
    #[error("zero level set is not regular near ({:.6}, {:.6}): |grad f| = {grad_norm:.3e}", at[0], at[1])]
    NonRegularLevelSet { at: Point, grad_norm: f64 },
    #[error("ambiguous marching-squares cell at ({:.6}, {:.6}) unresolved after subdivision", at[0], at[1])]
    AmbiguousCell { at: Point },
    #[error("level set has more than {limit} components")]
    TooManyComponents { limit: usize },
    #[error("orientation of J grad f along the ring is not uniform ({positive} positive, {negative} negative vertices)")]
    InconsistentOrientation { positive: usize, negative: usize },

    // ring index
    #[error("JE is tangent to the ring almost everywhere (reducible degeneracy)")]
    ReducibleDegeneracy,
    #[error("<JE, grad f> touches zero without changing sign near arc length {position:.6}")]
    NonSimpleTangency { position: f64 },
    #[error("E vanishes on the degeneracy ring near ({:.6}, {:.6})", at[0], at[1])]
    ZeroOnRing { at: Point },
    #[error("angle steps of E stay >= pi/2 after densifying to {samples} samples")]
    StepTooCoarse { samples: usize },
    #[error("ring index cross-check failed: {0}")]
    CrossCheckMismatch(String),
    #[error("ring count changes from {from} to {to} between s = {s_from} and s = {s_to}")]
    RingBifurcation { from: usize, to: usize, s_from: f64, s_to: f64 },
    #[error("at s = {s}: {source}")]
    AtSample { s: f64, source: Box<Error> },

    // equilibria
    #[error("E vanishes on the index circle around ({:.6}, {:.6})", at[0], at[1])]
    ZeroOnCircle { at: Point },
    #[error("Poincare index around ({:.6}, {:.6}) depends on the radius", at[0], at[1])]
    AmbiguousRadius { at: Point },
    #[error("linearization at ({:.6}, {:.6}) has an eigenvalue with vanishing real part", at[0], at[1])]
    MarginalLinearization { at: Point },

    // sphere atlas
    #[error("not compactifiable: {0}")]
    NotCompactifiable(String),
    #[error("south chart level set through the pole is not regular")]
    SouthPoleDegenerate,
    #[error("charts disagree on the overlap at |z| = {radius:.4}: {reason}")]
    OverlapMismatch { radius: f64, reason: String },
    #[error("{chart} chart: {source}", chart = chart.name())]
    InChart { chart: Chart, source: Box<Error> },
    #[error("component of the degeneracy set leaves both charts near ({:.6}, {:.6})", at[0], at[1])]
    UncoveredComponent { at: Point },

    // degeneracy index
    #[error("no degeneracy index is defined for zero at ({:.6}, {:.6}) (neither source nor sink)", at[0], at[1])]
    UnsupportedZeroKind { at: Point },
    #[error("catalog is incomplete: {0}")]
    IncompleteCatalog(String),

    // flow
    #[error("initial point lies on the degeneracy set (|f| = {f_abs:.3e})")]
    StartsOnRing { f_abs: f64 },
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
}

impl Error {
    pub(crate) fn eval(at: Point) -> impl FnOnce(EvalError) -> Error {
        move |source| Error::Eval { at, source }
    }

    pub fn at_sample(self, s: f64) -> Error {
        Error::AtSample { s, source: Box::new(self) }
    }

    pub fn in_chart(self, chart: Chart) -> Error {
        Error::InChart { chart, source: Box::new(self) }
    }

    /// Stable machine-readable name of the innermost failure.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDomain(_) => "InvalidDomain",
            Error::Eval { .. } => "DomainError",
            Error::NonRegularLevelSet { .. } => "NonRegularLevelSet",
            Error::AmbiguousCell { .. } => "AmbiguousCell",
            Error::TooManyComponents { .. } => "TooManyComponents",
            Error::InconsistentOrientation { .. } => "InconsistentOrientation",
            Error::ReducibleDegeneracy => "ReducibleDegeneracy",
            Error::NonSimpleTangency { .. } => "NonSimpleTangency",
            Error::ZeroOnRing { .. } => "ZeroOnRing",
            Error::StepTooCoarse { .. } => "StepTooCoarse",
            Error::CrossCheckMismatch(_) => "CrossCheckMismatch",
            Error::RingBifurcation { .. } => "RingBifurcation",
            Error::AtSample { source, .. } | Error::InChart { source, .. } => source.kind(),
            Error::ZeroOnCircle { .. } => "ZeroOnCircle",
            Error::AmbiguousRadius { .. } => "AmbiguousRadius",
            Error::MarginalLinearization { .. } => "MarginalLinearization",
            Error::NotCompactifiable(_) => "NotCompactifiable",
            Error::SouthPoleDegenerate => "SouthPoleDegenerate",
            Error::OverlapMismatch { .. } => "OverlapMismatch",
            Error::UncoveredComponent { .. } => "UncoveredComponent",
            Error::UnsupportedZeroKind { .. } => "UnsupportedZeroKind",
            Error::IncompleteCatalog(_) => "IncompleteCatalog",
            Error::StartsOnRing { .. } => "StartsOnRing",
            Error::StepUnderflow { .. } => "StepUnderflow",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
