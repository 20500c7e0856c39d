use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("group has no elements")]
    Empty,
    #[error("order {order} exceeds the supported maximum {max}")]
    TooLarge { order: usize, max: usize },
    #[error("table is not {order}x{order}")]
    Shape { order: usize },
    #[error("entry ({a},{b}) = {value} is out of range")]
    OutOfRange { a: usize, b: usize, value: usize },
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("no two-sided identity")]
    NoIdentity,
    #[error("element {element} has no inverse")]
    NoInverse { element: usize },
    #[error("table is not associative at ({a},{b},{c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("group is not nilpotent: {0}")]
    NotNilpotent(String),
    #[error("invalid group specifier: {0}")]
    BadSpec(String),
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepError {
    #[error("{0} matrices given for a group of order {1}")]
    Count(usize, usize),
    #[error("matrix for element {0} is not {1}x{1}")]
    Shape(usize, usize),
    #[error("matrix for element {element} is not unitary (deviation {deviation:.3e})")]
    NotUnitary { element: usize, deviation: f64 },
    #[error("not a homomorphism at ({a},{b}) (deviation {deviation:.3e})")]
    NotHomomorphism { a: usize, b: usize, deviation: f64 },
    #[error("subgroup belongs to a different group")]
    ForeignSubgroup,
    #[error("window has length {got}, expected {expected}")]
    WindowLength { expected: usize, got: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KirillovError {
    #[error("group is abelian")]
    Abelian,
    #[error("group order is not a prime power")]
    NotPGroup,
    #[error("center is not cyclic")]
    NonCyclicCenter,
    #[error("constraint is inconsistent: {0}")]
    ConstraintInconsistent(String),
    #[error("triple is not split")]
    NotSplit,
    #[error("restriction to the center is not scalar")]
    RestrictionNotScalar,
    #[error("stabilizer of the extended character is not the centralizer")]
    StabilizerMismatch,
    #[error("character value inconsistency: {0}")]
    Character(String),
    #[error("built representation is reducible (norm {0:.6})")]
    Reducible(f64),
    #[error("chain length bound violated: 1 + {k} > {bound}")]
    ChainBound { k: usize, bound: u32 },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Rep(#[from] RepError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("window has length {got}, expected {expected}")]
    WindowLength { expected: usize, got: usize },
    #[error("window is zero")]
    ZeroWindow,
    #[error("measurement vector has length {got}, expected {expected}")]
    MeasurementLength { expected: usize, got: usize },
    #[error("for n = {0} the contragredient of the Schrödinger representation is equivalent to it; n must exceed 2")]
    NonContragredientInequivalent(usize),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Kirillov(#[from] KirillovError),
}
