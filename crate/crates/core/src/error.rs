use thiserror::Error;

/// Errors raised by the vector, word, encoding and search layers.
///
/// Every variant describes an invalid input or a violated precondition;
/// "not found" outcomes (exhausted searches, words outside a span) are
/// ordinary return values, not errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty vector: a block vector needs at least one nonzero entry")]
    EmptyVector,
    #[error("positions must be strictly increasing (got {prev} then {next})")]
    UnsortedPositions { prev: usize, next: usize },
    #[error("value {value} at position {position} is outside the range allowed for k = {k} ({mode})")]
    ValueOutOfRange {
        position: usize,
        value: i32,
        k: u32,
        mode: crate::Mode,
    },
    #[error("vector does not attain magnitude k = {k}")]
    NotAttained { k: u32 },
    #[error("k must be positive")]
    ZeroK,
    #[error("k mismatch: {0} vs {1}")]
    KMismatch(u32, u32),
    #[error("mode mismatch: {0} vs {1}")]
    ModeMismatch(crate::Mode, crate::Mode),
    #[error("operands are not block ordered (max support {left_max} >= min support {right_min})")]
    NotBlockOrdered { left_max: usize, right_min: usize },
    #[error("tetris is undefined on k = 1 (FIN_0 is not modelled)")]
    TetrisAtLevelOne,
    #[error("operation requires signed mode")]
    RequiresSigned,
    #[error("empty sequence")]
    EmptySequence,
    #[error("delta = {delta} does not satisfy (1+delta)^(1-k) < delta for k = {k}")]
    NetPrecondition { delta: f64, k: u32 },
    #[error("invalid real parameter: {0}")]
    InvalidReal(String),

    #[error("variable index {index} out of range for k = {k} ({mode})")]
    VariableOutOfRange {
        index: i32,
        k: u32,
        mode: crate::Mode,
    },
    #[error("empty word")]
    EmptyWord,
    #[error("letter bit {0} exceeds the supported width of 64")]
    LetterTooWide(usize),
    #[error("letter bits must be 0 or 1 (got {0})")]
    InvalidBit(u64),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("letter {0} is not in the alphabet")]
    LetterNotInAlphabet(String),
    #[error("substitution arity {got} does not match expected {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("letter {letter} is not in level L_{level}")]
    Grading { letter: String, level: usize },
    #[error("generator index {index} out of range (sequence has {len} words)")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("generator indices must be strictly increasing")]
    UnorderedSegments,
    #[error("segment sign must be +1 or -1 (got {0})")]
    InvalidSign(i32),
    #[error("negative segment sign in unsigned mode")]
    SignInUnsignedMode,
    #[error("tetris exponent {shift} exceeds k = {k}")]
    ShiftOutOfRange { shift: u32, k: u32 },
    #[error("word {index} is not a v_k-variable word for k = {k}")]
    NotVariableWord { index: usize, k: u32 },
    #[error("sequence is not rapidly increasing at word {0}")]
    NotRapidlyIncreasing(usize),
    #[error("halving needs an even variable bound (got k = {0})")]
    OddHalvingBound(u32),
    #[error("word is not in the span of the generating sequence")]
    NotInSpan,

    #[error("sequence must have even length (got {0})")]
    OddLength(usize),
    #[error("expected {expected} substitution letters, got {got}")]
    SigmaCount { expected: usize, got: usize },
    #[error("string for perfect set P_{index} violates its constraints at position {position}")]
    PerfectSetViolation { index: usize, position: usize },
    #[error("string length {got} does not match ambient length {expected}")]
    AmbientLength { expected: usize, got: usize },
    #[error("block sequence is not a block subsequence of the derived sequence: {0}")]
    NotBlockSubsequence(String),

    #[error("colouring: {0}")]
    Colouring(String),
    #[error("search problem: {0}")]
    Problem(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
