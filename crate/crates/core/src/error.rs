use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(String),
    #[error("element is not integral")]
    NotIntegral,
    #[error("element is not totally positive")]
    NotTotallyPositive,
    #[error("delta is not congruent to a square modulo 4")]
    NoSquareClass,
    #[error("delta is a square in the base field")]
    DegenerateSquare,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("unit coordinates exceed the scalar range")]
    UnitTooLarge,
    #[error("not a unit: {0}")]
    NotAUnit(String),
    #[error("unit generators have rank below 3")]
    RankDeficient,
    #[error("exponent recovery failed: {0}")]
    ExponentRecoveryFailed(String),
    #[error("discriminants {0} and {1} are not coprime")]
    NotCoprime(String, String),
    #[error("{0} is not squarefree")]
    NotSquarefree(String),
    #[error("e = 5 is excluded from the generic witness construction")]
    ESpecialFive,
    #[error("{0} is divisible by 5")]
    DivisibleBy5(String),
    #[error("class number of Q(sqrt {0}) is not known to be 1")]
    ClassNumberNotOne(String),
    #[error("no unit data for D = {d}, delta = {delta}")]
    NeedsUnits { d: String, delta: String },
    #[error("invalid data: {0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, Error>;
