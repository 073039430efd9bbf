use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the law being evaluated.
    Domain(&'static str),
    /// The corroded section cannot develop a moment above its cracking moment.
    SectionExhausted,
    /// The moment-damage curve has no stationary point in (0, 1).
    NoInflexion,
    /// A hinge reached total damage or the element flexibility became singular.
    HingeCollapsed,
    /// The moment-damage radicand is negative: the resistance is exhausted.
    NegativeRadicand,
    /// The elastic tangent is singular: the supports do not prevent rigid-body motion.
    UnconstrainedStructure,
    /// Newton iteration failed to reach equilibrium.
    NonConvergence { iterations: usize },
    /// The model description is inconsistent.
    InvalidModel(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(what) => write!(f, "domain error: {what}"),
            Error::SectionExhausted => write!(f, "section exhausted: ultimate moment does not exceed cracking moment"),
            Error::NoInflexion => write!(f, "moment-damage curve has no inflexion point in (0, 1)"),
            Error::HingeCollapsed => write!(f, "hinge collapsed"),
            Error::NegativeRadicand => write!(f, "negative radicand in moment-damage relation"),
            Error::UnconstrainedStructure => write!(f, "structure is not sufficiently constrained"),
            Error::NonConvergence { iterations } => {
                write!(f, "equilibrium iteration did not converge after {iterations} iterations")
            }
            Error::InvalidModel(what) => write!(f, "invalid model: {what}"),
        }
    }
}

impl core::error::Error for Error {}
