use serde::Serialize;

use crate::sdp::SolveStatus;

/// A named scalar lower bound with the context needed to report it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundValue {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverInfo>,
}

/// Outcome of the SDP solve behind a bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverInfo {
    pub backend: String,
    pub status: SolveStatus,
    pub residual: f64,
    pub iterations: u32,
}

impl BoundValue {
    pub fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        BoundValue { name: name.into(), value, lambda: None, tolerance, notes: Vec::new(), solver: None }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_solver(mut self, info: SolverInfo) -> Self {
        self.solver = Some(info);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}
