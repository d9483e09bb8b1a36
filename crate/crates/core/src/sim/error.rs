use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("step {step}: unknown action '{name}'")]
    UnknownAction { step: String, name: String },
    #[error("step {step}: expected {expected} argument(s), found {found}")]
    WrongArgCount { step: String, expected: usize, found: usize },
    #[error("step {step}: argument '{arg}' has type '{actual}', which is incompatible with '{expected}'")]
    ArgTypeIncompatible { step: String, arg: String, expected: String, actual: String },
    #[error("step {step}: unknown object '{object}'")]
    UnknownObject { step: String, object: String },
    #[error("fluent {fluent} is read before it is initialized")]
    UninitializedFluent { fluent: String },
    #[error("division by zero in {expr}")]
    DivisionByZero { expr: String },
    #[error("{what} index {index} is out of range (valid: {range})")]
    IndexOutOfRange { what: &'static str, index: usize, range: String },
    #[error("simulation cancelled")]
    Cancelled,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

impl SimError {
    pub fn code(&self) -> &'static str {
        match self {
            SimError::UnknownAction { .. } => "unknown-action",
            SimError::WrongArgCount { .. } => "wrong-arg-count",
            SimError::ArgTypeIncompatible { .. } => "arg-type-incompatible",
            SimError::UnknownObject { .. } => "unknown-object",
            SimError::UninitializedFluent { .. } => "uninitialized-fluent",
            SimError::DivisionByZero { .. } => "division-by-zero",
            SimError::IndexOutOfRange { .. } => "index-out-of-range",
            SimError::Cancelled => "cancelled",
            SimError::Inconsistent(_) => "internal-inconsistency",
        }
    }

    pub(crate) fn out_of_range(what: &'static str, index: usize, len: usize) -> Self {
        let range = if len == 0 { "none, the list is empty".to_string() } else { format!("0..={}", len - 1) };
        SimError::IndexOutOfRange { what, index, range }
    }
}

impl serde::Serialize for SimError {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("SimError", 2)?;
        s.serialize_field("code", self.code())?;
        s.serialize_field("message", &self.to_string())?;
        s.end()
    }
}
