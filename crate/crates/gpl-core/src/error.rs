//! Error type shared by all engine modules.

use thiserror::Error;

/// Errors produced by the algebra engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Two scalars from different coefficient rings were combined.
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    /// An operation specific to one ring kind was applied to another.
    #[error("wrong ring kind: expected {expected}, got {got}")]
    WrongRingKind { expected: String, got: String },
    /// A ring descriptor failed validation.
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    /// A scalar literal could not be parsed.
    #[error("bad scalar literal `{0}`")]
    BadScalar(String),

    /// Permutation or degree-sequence sizes disagree.
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    /// A pointed shuffle was requested with an empty block.
    #[error("empty block in pointed shuffle type")]
    EmptyBlock,

    /// A decoration refers to a generator that was never declared.
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    /// A vertex id is out of range for the tree it addresses.
    #[error("bad vertex {0}")]
    BadVertex(usize),
    /// An enumeration cap or weight cap was exceeded.
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    /// A partial-composition index is out of range.
    #[error("bad composition index {index} for arity {arity}")]
    BadIndex { index: usize, arity: usize },
    /// Operad element arities do not match the requested operation.
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),

    /// An odd-degree slot received weight >= 2 over a ring of characteristic != 2.
    #[error("odd-degree slot with weight {weight} >= 2 (characteristic != 2)")]
    OddWeightViolation { weight: u32 },
    /// The unit of the extended algebra appeared in an argument slot.
    #[error("the unit element is not allowed in argument slots")]
    UnitArgument,
    /// An element has the wrong cohomological degree for the operation.
    #[error("degree error: {0}")]
    DegreeError(String),
    /// An element claimed to be Maurer-Cartan fails the equation.
    #[error("not a Maurer-Cartan element: residual {0}")]
    NotMaurerCartan(String),
    /// A differential table fails d^2 = 0 or degree bookkeeping.
    #[error("invalid differential: {0}")]
    InvalidDifferential(String),

    /// Exhaustive enumeration would exceed the configured budget.
    #[error("budget exceeded: would enumerate {need} > budget {budget}")]
    BudgetExceeded { need: u128, budget: u128 },
    /// Enumeration requires a finite coefficient field.
    #[error("not a finite field: {0}")]
    NotFiniteField(String),
    /// The ideal condition I * m_A = 0 required by obstruction theory fails.
    #[error("ideal condition violated: {0}")]
    IdealConditionViolated(String),
    /// Fiber membership conditions for o1/o0 fail.
    #[error("fiber condition violated: {0}")]
    FiberConditionViolated(String),
    /// A chain complex fails d^2 = 0.
    #[error("not a complex: {0}")]
    NotAComplex(String),
    /// A brace-algebra model was used with incompatible data.
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
    /// A circular-product operand does not restrict to the unit in arity 1.
    #[error("not unital: {0}")]
    NotUnital(String),
    /// Operad or cooperad data failed a structure check.
    #[error("invalid operad data: {0}")]
    InvalidOperadData(String),

    /// A DSL source string failed to parse.
    #[error("syntax error at {line}:{col}: {msg}")]
    SyntaxError { line: usize, col: usize, msg: String },
    /// An identifier in an expression is not bound by the algebra spec.
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
}

pub type Result<T> = std::result::Result<T, Error>;
