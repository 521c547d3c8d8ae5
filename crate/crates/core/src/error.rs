use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{n} qubits exceeds the limit of {limit}")]
    DimensionTooLarge { n: usize, limit: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("qubit index {index} out of range for {n} qubits")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("operator is not Hermitian")]
    NotHermitian,
    #[error("matrix is not an infinitesimal stochastic generator: {0}")]
    NotStochasticGenerator(String),
    #[error("trotter step count must be positive")]
    InvalidSteps,
    #[error("invalid pauli word: {0}")]
    BadWord(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("truth table has {got} entries, expected {expected}")]
    IncompleteTable { expected: usize, got: usize },
    #[error("unsupported formula node: {0}")]
    UnsupportedNode(String),
    #[error("malformed DIMACS header at line {line}")]
    MalformedHeader { line: usize },
    #[error("variable {var} out of range at line {line}")]
    VariableOutOfRange { line: usize, var: i64 },
    #[error("clause not terminated by 0")]
    UnterminatedClause,
    #[error("instance contains no clauses and no header")]
    EmptyInstance,
    #[error("clause at line {line} repeats variable {var}")]
    RepeatedVariable { line: usize, var: usize },

    #[error("penalty scale must be positive")]
    NonpositiveDelta,
    #[error("xor chain needs k >= 3")]
    KTooSmall,
    #[error("problem too large for exhaustive synthesis: {0}")]
    TooLarge(String),
    #[error("invalid target kernel: {0}")]
    InvalidKernel(String),

    #[error("gadget coupling alpha must be nonzero")]
    ZeroCoupling,
    #[error("operator norm {0} differs from 1")]
    NotUnitNorm(f64),
    #[error("z = {z} too close to the pole region (|z| must stay below {limit})")]
    ZNearPole { z: f64, limit: f64 },
    #[error("projected resolvent is singular")]
    SingularProjection,
    #[error("no bracket: {0}")]
    NoBracket(String),

    #[error("cost operator is not diagonal")]
    NonDiagonalCost,
    #[error("bipartition must be a proper nonempty subset")]
    BadBipartition,
    #[error("ground state is degenerate")]
    DegenerateGround,
    #[error("trial energy {energy} is not below the gap {gap}")]
    EnergyAboveGap { energy: f64, gap: f64 },
    #[error("parameter vector has length {got}, ansatz expects {expected}")]
    ParameterCount { expected: usize, got: usize },
    #[error("rotation axis is not normalized")]
    BadAxis,

    #[error("clock weights must be positive")]
    InvalidWeights,
    #[error("non-Clifford gate count {count} exceeds bound {bound}")]
    CardinalityBlowup { count: usize, bound: usize },
    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),
    #[error("matrix is not unitary")]
    NotUnitary,

    #[error("graph is disconnected")]
    DisconnectedGraph,
    #[error("node {0} has zero degree")]
    ZeroDegreeNode(usize),
    #[error("matrix is not a generalized Laplacian")]
    NotLaplacian,
    #[error("matrix is not column stochastic")]
    NotStochastic,
    #[error("state is not an eigenvector (residual {0})")]
    NotEigenvector(f64),
    #[error("time grid risks aliasing (fit residual {0})")]
    AliasRisk(f64),
    #[error("{n} variables exceeds the enumeration limit of {limit}")]
    TooManyVariables { n: usize, limit: usize },
}

impl Error {
    /// Errors that stem from size limits rather than bad input.
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            Error::DimensionTooLarge { .. }
                | Error::TooManyVariables { .. }
                | Error::TooLarge(_)
                | Error::CardinalityBlowup { .. }
        )
    }
}
