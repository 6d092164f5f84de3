use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("duplicate declaration of {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("subsumption cycle through type `{0}`")]
    Cycle(String),

    /// `approp(general, attr)` is defined and `general` subsumes `specific`,
    /// but `approp(specific, attr)` is missing or does not refine it.
    #[error("appropriateness monotonicity violated at ({general}, {specific}, {attr}): {detail}")]
    Monotonicity {
        general: String,
        specific: String,
        attr: String,
        detail: String,
    },

    #[error("appropriateness value {value} of ({species}, {attr}) refines to no species")]
    Irrational {
        species: String,
        attr: String,
        value: String,
    },

    #[error("state `{0}` is unreachable from the root")]
    Unreachable(String),

    #[error("missing `root` declaration")]
    MissingRoot,

    #[error("`{name}` is typed `{ty}`, which is not a species")]
    NotSpecies { name: String, ty: String },

    #[error("ill-typed edge {state} --{attr}--> {target}: {detail}")]
    IllTyped {
        state: String,
        attr: String,
        target: String,
        detail: String,
    },

    #[error(
        "object `{object}` of species `{species}` has no value for appropriate attribute `{attr}`"
    )]
    MissingValue {
        object: String,
        species: String,
        attr: String,
    },

    #[error("{candidates} candidate assignments exceed the naive enumeration bound of {bound}")]
    TooManyCandidates { candidates: u128, bound: u128 },

    #[error("resolvant sets were built over different signatures")]
    SignatureMismatch,

    #[error("malformed structure: {0}")]
    Malformed(String),
}
