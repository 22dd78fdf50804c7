use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsafe variable {variable} in rule `{rule}` (line {line})")]
    UnsafeVariable {
        rule: String,
        variable: String,
        line: usize,
    },

    #[error("probability {prob} of `{atom}` is outside [0, 1]")]
    ProbabilityOutOfRange { atom: String, prob: f64 },

    #[error("probabilistic fact `{atom}` is not ground")]
    NonGroundProbFact { atom: String },

    #[error("probabilistic fact `{atom}` is declared more than once")]
    DuplicateProbFact { atom: String },

    #[error("probabilistic fact `{atom}` unifies with the head of rule `{rule}`")]
    ProbFactUnifiesWithHead { atom: String, rule: String },

    #[error("query `{atom}` is not ground")]
    NonGroundQuery { atom: String },

    #[error("complement atom `{atom}` already occurs in the program")]
    FreshNameCollision { atom: String },

    #[error("odd loop over negation: {witness}")]
    Olon { witness: String },

    #[error("credal semantics undefined: world {world} has no answer set")]
    CredalUndefined { world: String },

    #[error("{count} probabilistic facts exceed the limit of {limit}; extract the residual program first")]
    TooManyProbFacts { count: usize, limit: usize },

    #[error("{count} undefined atoms exceed the enumeration limit of {limit}")]
    TooManyUndefined { count: usize, limit: usize },

    #[error("least model requested for a program with negation")]
    NotPositive,

    #[error("evaluation interrupted")]
    Interrupted,

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
