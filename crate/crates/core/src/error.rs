use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid prime context: {0}")]
    InvalidContext(String),
    #[error("element is a square in the base field: {0}")]
    IsSquare(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("field not in tower: {0}")]
    NotInTower(String),
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("enumeration budget exceeded: group of order {cardinality} (budget {budget})")]
    BudgetExceeded { cardinality: u64, budget: u64 },
    #[error("tower has the wrong class: {0}")]
    WrongClass(String),
    #[error("inadmissible representation: {0}")]
    Inadmissible(String),
    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
