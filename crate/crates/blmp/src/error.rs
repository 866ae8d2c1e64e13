use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by near-zero constant term (|{0:.3e}| <= div floor)")]
    DivisionNearSingularity(f64),
    #[error("constant term {0} lies on the branch cut of {1}")]
    BranchCutViolation(num_complex::Complex64, &'static str),
    #[error("requested partial ({0},{1},{2}) exceeds jet order ({3},{4},{5})")]
    OrderExceeded(usize, usize, usize, usize, usize, usize),
    #[error("generator sets differ between operands")]
    GeneratorSetMismatch,
    #[error("too many Grassmann generators: {0} (capacity 16)")]
    GeneratorCapacity(usize),
    #[error("duplicate generator label `{0}`")]
    DuplicateGenerator(String),
    #[error("unknown generator label `{0}`")]
    UnknownGenerator(String),
    #[error("parity of a mixed-parity element is undefined")]
    ParityUndefined,
    #[error("parity mismatch: {0}")]
    ParityMismatch(String),
    #[error("missing evaluation for symbol {0}")]
    MissingSymbol(String),
    #[error("Bell polynomial order cap exceeded: total order {0} > {1}")]
    OrderCapExceeded(usize, usize),
    #[error("Yablonskii-Vorob'ev cap exceeded: n = {0} > {1}")]
    CapExceeded(usize, usize),
    #[error("non-exact division in Yablonskii-Vorob'ev recursion at n = {0}")]
    NonExactDivision(usize),
    #[error("evaluation hit a solution singularity")]
    SingularPoint,
    #[error("invalid soliton wave numbers: {0}")]
    InvalidKappa(String),
    #[error("parameter invariant violated: {0}")]
    InvariantViolation(String),
    #[error("Wronskian determinant vanishes at the sample point")]
    DegenerateWronskian,
    #[error("q'(y) = {0} is not positive on the sample box")]
    NegativeQPrime(f64),
    #[error("Backlund search did not converge (best residual {0:.3e})")]
    NoConvergence(f64),
    #[error("descriptor error: {0}")]
    Descriptor(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
