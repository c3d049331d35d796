use thiserror::Error;

/// Errors raised while reading the text formats.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header: {msg}")]
    Header { line: usize, msg: String },
    #[error("line {line}: expected {expected} entries, found {found}")]
    RaggedRow { line: usize, expected: usize, found: usize },
    #[error("line {line}: color {value} outside 1..={c}")]
    ColorOutOfRange { line: usize, value: u64, c: u32 },
    #[error("line {line}: invalid cell {token:?}")]
    BadCell { line: usize, token: String },
    #[error("line {line}: expected {expected} rows, input ended")]
    MissingRows { line: usize, expected: usize },
    #[error("line {line}: unexpected trailing content")]
    TrailingContent { line: usize },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match *self {
            ParseError::Header { line, .. }
            | ParseError::RaggedRow { line, .. }
            | ParseError::ColorOutOfRange { line, .. }
            | ParseError::BadCell { line, .. }
            | ParseError::MissingRows { line, .. }
            | ParseError::TrailingContent { line } => line,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("grid dimensions must be positive, got {n}x{m}")]
    EmptyDims { n: usize, m: usize },
    #[error("palette size must be positive")]
    EmptyPalette,
    #[error("cell matrix has {found} entries, expected {expected}")]
    Shape { expected: usize, found: usize },
    #[error("cell ({row},{col}) has color {value} outside 1..={c}")]
    ColorOutOfRange { row: usize, col: usize, value: u32, c: u32 },
    #[error("cell ({row},{col}) outside {n}x{m}")]
    CellOutOfRange { row: usize, col: usize, n: usize, m: usize },
    #[error("at most {max} columns allowed, got {got}")]
    TooManyColumns { max: usize, got: usize },
    #[error("column {0} repeated or out of range")]
    BadColumn(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("bound undefined for {n}x{m}: {msg}")]
    Domain { n: u64, m: u64, msg: &'static str },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field parameters out of range: {0}")]
    Parameters(String),
    #[error("input is not a strong ({c},{c_prime})-coloring")]
    NotStrong { c: u32, c_prime: u32 },
    #[error("partition premise violated: {0}")]
    Partition(String),
    #[error("unknown bundled item {0:?}")]
    UnknownBundled(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("budget fields must be positive: {0}")]
    InvalidBudget(&'static str),
    #[error("search supports at most {max} rows and columns, got {n}x{m}")]
    TooLarge { n: usize, m: usize, max: usize },
}
