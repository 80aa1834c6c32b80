use thiserror::Error;

use crate::geometry::Conic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Each variant has a stable numeric [`code`](Error::code) (used by the C
/// ABI) and a stable [`kind`](Error::kind) name (used in JSON error objects).
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("leading coefficient is zero; the equation is linear")]
    DegenerateQuadratic,
    #[error("insufficient precision: {available} digits available, {needed} needed")]
    InsufficientPrecision { needed: u32, available: u32 },
    #[error("radicands {0} and {1} generate different quadratic fields")]
    IncompatibleRadicands(String, String),
    #[error("result leaves the quadratic closure: {0}")]
    LeavesQuadraticClosure(String),
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("the line is a component of the conic")]
    LineOnConic,
    #[error("invalid moduli: {0}")]
    InvalidModuli(String),
    #[error("closed-form conic disagrees projectively with the determinant conic")]
    ClosedFormMismatch {
        closed_form: Box<Conic>,
        determinant: Box<Conic>,
    },
    #[error("a2 != a1*a3, the moduli point is not on the H4 component")]
    NotOnH4,
    #[error("the moduli point lies on the H5 locus; s6_1 = s6_2 and the cycle degenerates")]
    OnH5Locus,
    #[error("the conic is not transversal to l4 and l5 at q45 (slope {0})")]
    NonTransversal(String),
    #[error("zero denominator: {0}")]
    ZeroDenominator(String),
    #[error("evaluation at the pole of f_P")]
    PoleEvaluation,
    #[error("the pipeline quadratic has a repeated root")]
    RepeatedRoot,
    #[error("intersection point at a ramification point: {0}")]
    BranchAtRamification(String),
    #[error("incompatible Hom modules: {0}")]
    IncompatibleModules(String),
    #[error("argument is singular: {0}")]
    SingularArgument(String),
    #[error("evaluation point lies on the singular locus{}", .m.map(|m| format!(" of T_{m}")).unwrap_or_default())]
    OnSingularLocus { m: Option<u64> },
    #[error("refinement budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("division by a value indistinguishable from zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegenerateQuadratic => "DegenerateQuadratic",
            Error::InsufficientPrecision { .. } => "InsufficientPrecision",
            Error::IncompatibleRadicands(..) => "IncompatibleRadicands",
            Error::LeavesQuadraticClosure(_) => "LeavesQuadraticClosure",
            Error::DegenerateConfiguration(_) => "DegenerateConfiguration",
            Error::LineOnConic => "LineOnConic",
            Error::InvalidModuli(_) => "InvalidModuli",
            Error::ClosedFormMismatch { .. } => "ClosedFormMismatch",
            Error::NotOnH4 => "NotOnH4",
            Error::OnH5Locus => "OnH5Locus",
            Error::NonTransversal(_) => "NonTransversal",
            Error::ZeroDenominator(_) => "ZeroDenominator",
            Error::PoleEvaluation => "PoleEvaluation",
            Error::RepeatedRoot => "RepeatedRoot",
            Error::BranchAtRamification(_) => "BranchAtRamification",
            Error::IncompatibleModules(_) => "IncompatibleModules",
            Error::SingularArgument(_) => "SingularArgument",
            Error::OnSingularLocus { .. } => "OnSingularLocus",
            Error::BudgetExceeded(_) => "BudgetExceeded",
            Error::DivisionByZero => "DivisionByZero",
            Error::Parse(_) => "Parse",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }

    /// Stable numeric code. Zero is reserved for success.
    pub fn code(&self) -> i32 {
        match self {
            Error::DegenerateQuadratic => 1,
            Error::InsufficientPrecision { .. } => 2,
            Error::IncompatibleRadicands(..) => 3,
            Error::LeavesQuadraticClosure(_) => 4,
            Error::DegenerateConfiguration(_) => 5,
            Error::LineOnConic => 6,
            Error::InvalidModuli(_) => 7,
            Error::ClosedFormMismatch { .. } => 8,
            Error::NotOnH4 => 9,
            Error::OnH5Locus => 10,
            Error::NonTransversal(_) => 11,
            Error::ZeroDenominator(_) => 12,
            Error::PoleEvaluation => 13,
            Error::RepeatedRoot => 14,
            Error::BranchAtRamification(_) => 15,
            Error::IncompatibleModules(_) => 16,
            Error::SingularArgument(_) => 17,
            Error::OnSingularLocus { .. } => 18,
            Error::BudgetExceeded(_) => 19,
            Error::DivisionByZero => 20,
            Error::Parse(_) => 21,
            Error::InvalidArgument(_) => 22,
        }
    }

    /// Machine-readable error object.
    pub fn to_json(&self) -> serde_json::Value {
        let mut obj = serde_json::json!({
            "error": self.kind(),
            "code": self.code(),
            "message": self.to_string(),
        });
        match self {
            Error::ClosedFormMismatch {
                closed_form,
                determinant,
            } => {
                obj["closed_form"] = serde_json::to_value(closed_form).unwrap_or_default();
                obj["determinant"] = serde_json::to_value(determinant).unwrap_or_default();
            }
            Error::OnSingularLocus { m: Some(m) } => {
                obj["m"] = (*m).into();
            }
            _ => {}
        }
        obj
    }
}
