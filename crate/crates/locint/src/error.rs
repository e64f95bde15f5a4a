use thiserror::Error;

/// Errors raised by the analysis library.
///
/// The CLI maps [`Error::Parse`] and [`Error::Config`] to exit code 2 and
/// everything else to exit code 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid model: {0}")]
    Model(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("symbol {symbol} out of range for node `{node}`")]
    UnknownSymbol { node: String, symbol: u32 },
    #[error("pattern does not assign every node")]
    PartialAssignment,
    #[error("state-space product {size} exceeds cap {cap}")]
    StateCap { size: u128, cap: u128 },
    #[error("ground set of size {size} exceeds partition cap {cap}")]
    PartitionCap { size: usize, cap: usize },
    #[error("group closure exceeds cap {0}")]
    GroupCap(usize),
    #[error("conditioning on a probability-0 pattern")]
    ZeroConditioning,
    #[error("pattern impossible: p(x_O) = 0 while some block is possible")]
    ImpossiblePattern,
    #[error("net is not deterministic with uniform roots: {0}")]
    NotDeterministic(String),
    #[error("partition does not match: {0}")]
    PartitionMismatch(String),
    #[error("complete local integration is undefined for patterns with fewer than two nodes")]
    SingletonCli,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("permutation acts across nodes with different state spaces: {0}")]
    HeterogeneousStates(String),
    #[error("perception not uniquely defined: co-perception entities {0} and {1} are not mutually exclusive; choose a proxy set")]
    NotMutuallyExclusive(String, String),
    #[error("{0}")]
    Agency(String),
}

impl Error {
    /// True for errors caused by the user's input rather than by the analysis.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Config(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
