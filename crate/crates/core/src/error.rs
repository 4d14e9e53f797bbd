use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("odd dart count {0}")]
    OddDartCount(usize),
    #[error("{which} has length {len}, expected {expected}")]
    Length {
        which: &'static str,
        len: usize,
        expected: usize,
    },
    #[error("{which} is not a permutation (dart {dart})")]
    NotPermutation { which: &'static str, dart: usize },
    #[error("alpha fixed point at dart {0}")]
    AlphaFixedPoint(usize),
    #[error("alpha is not an involution at dart {0}")]
    AlphaNotInvolution(usize),
    #[error("root dart {0} out of range")]
    RootOutOfRange(usize),
    #[error("disconnected: dart {0} unreachable from the root")]
    Disconnected(usize),
    #[error("face degree {degree} != 4 at dart {dart}")]
    FaceDegree { dart: usize, degree: usize },
    #[error("no bipartite coloring: odd cycle through dart {0}")]
    NotBipartite(usize),
    #[error("expected one face, found {0}")]
    NotUnicellular(usize),
    #[error("hole through dart {0} is not simple")]
    NonSimpleHole(usize),
    #[error("hole dart {0} out of range or repeated")]
    BadHole(usize),
    #[error("map has holes but profile {0} forbids them")]
    UnexpectedHoles(&'static str),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid map: {0}")]
    Map(#[from] MapError),
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("non-exact division at (n={n}, g={g})")]
    InexactDivision { n: usize, g: usize },
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("attempt budget of {attempts} exhausted at (n={n}, g={g}); measured acceptance {accepted}/{attempts}")]
    Budget {
        n: usize,
        g: usize,
        attempts: u64,
        accepted: u64,
    },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
