use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {0} is below the supported minimum of 5")]
    PrimeTooSmall(u64),
    #[error("prime {0} exceeds the supported maximum of 2^61 - 1")]
    PrimeTooLarge(u64),
    #[error("zero has no multiplicative inverse or order")]
    Zero,
    #[error("element does not have norm one")]
    NotNormOne,
    #[error("{m} does not divide the group order {n}")]
    NotADivisor { m: u64, n: u64 },
    #[error("coordinate is parabolic; rotation is not diagonalizable")]
    ParabolicCoordinate,
    #[error("the slice at value zero is excluded from conic machinery")]
    ZeroSlice,
    #[error("point is not on the Markoff surface")]
    NotOnSurface,
    #[error("alpha1 * alpha2 = 1 gives a reducible curve")]
    DegenerateCurve,
    #[error("sigma = 1 is excluded")]
    SigmaIsOne,
    #[error("b = 1 is excluded")]
    BIsOne,
    #[error("transformation is the identity in PGL2")]
    IdentityTransform,
    #[error("matrix is singular")]
    Singular,
    #[error("linear system has only the trivial solution")]
    NoKernel,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("conductor {0} exceeds the supported maximum of 30")]
    ConductorTooLarge(u64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
