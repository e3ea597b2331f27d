//! Request and response bodies of the HTTP interface.
//!
//! Numbers and formulas travel as strings in the DSL's own syntax. The
//! field names here are the wire contract; `docs/schema.md` describes them.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::program::{
    AgreementReport, EvalError, Independence, IndependenceEntry, ParseError, ProgramError,
    SymbolicResult, Trace,
};
use crate::worksheet::{CellError, SessionEvent, Worksheet, WorksheetError};

/// Every error response body.
pub type ApiError = CellError;

impl From<&ParseError> for ApiError {
    fn from(e: &ParseError) -> Self {
        CellError {
            step: None,
            cell: None,
            code: e.code().to_string(),
            message: e.to_string(),
        }
    }
}

impl From<&EvalError> for ApiError {
    fn from(e: &EvalError) -> Self {
        CellError {
            step: e.step.clone(),
            cell: e.step.clone(),
            code: e.code().to_string(),
            message: e.to_string(),
        }
    }
}

impl From<&ProgramError> for ApiError {
    fn from(e: &ProgramError) -> Self {
        match e {
            ProgramError::Parse(e) => e.into(),
            ProgramError::Eval(e) => e.into(),
        }
    }
}

impl From<&WorksheetError> for ApiError {
    fn from(e: &WorksheetError) -> Self {
        CellError {
            step: None,
            cell: e.cell().map(str::to_string),
            code: e.code().to_string(),
            message: e.to_string(),
        }
    }
}

/// `POST /worksheets`. Exactly one of `source`, `fixture` or `document`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateWorksheet {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    /// A saved document, as returned by `GET /worksheets/{id}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub document: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
}

/// `POST /worksheets/{id}/cells/{cid}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetCell {
    pub content: String,
    /// If given, the edit is refused unless it matches the current revision.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub revision: Option<u64>,
}

/// `POST /worksheets/{id}/symbolize`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Symbolize {
    pub cell: String,
    /// Defaults to the cell id.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub letter: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub revision: Option<u64>,
}

/// Body of every worksheet response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorksheetResponse {
    pub id: String,
    /// The saved document (`save` output, parsed).
    pub document: serde_json::Value,
    /// Present on mutations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event: Option<SessionEvent>,
}

impl WorksheetResponse {
    pub fn worksheet(&self) -> Result<Worksheet, WorksheetError> {
        crate::worksheet::load(&self.document.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorksheetSummary {
    pub id: String,
    pub title: String,
    pub revision: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureSummary {
    pub name: String,
    pub title: String,
    pub source: String,
}

/// `POST /programs/run`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunProgram {
    pub source: String,
    /// Declaration name to quantity literal, e.g. `"C": "48 cherry"`.
    #[serde(default)]
    pub overrides: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedValue {
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub name: String,
    pub question: Option<String>,
    pub value: String,
    pub equation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceResponse {
    pub inputs: Vec<NamedValue>,
    pub steps: Vec<TraceStep>,
    pub target: String,
    pub answer: String,
    /// Plain-text rendering, one line per step.
    pub text: String,
}

impl From<&Trace> for TraceResponse {
    fn from(t: &Trace) -> Self {
        TraceResponse {
            inputs: t
                .inputs
                .iter()
                .map(|(name, q)| NamedValue {
                    name: name.clone(),
                    value: q.to_string(),
                })
                .collect(),
            steps: t
                .entries
                .iter()
                .map(|e| TraceStep {
                    name: e.name.clone(),
                    question: e.question.clone(),
                    value: e.value.to_string(),
                    equation: e.equation.clone(),
                })
                .collect(),
            target: t.target.clone(),
            answer: t.answer.to_string(),
            text: t.to_string(),
        }
    }
}

/// `POST /programs/solve`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveProgram {
    pub source: String,
    /// Declarations to replace by symbols named after them.
    #[serde(default)]
    pub symbolize: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicStepResponse {
    pub name: String,
    pub question: Option<String>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionResponse {
    pub step: String,
    /// `P > 0`.
    pub condition: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResponse {
    /// The answer with its unit, e.g. `A*B/(A + B) min`.
    pub answer: String,
    pub formula: String,
    pub unit: String,
    pub dimension: String,
    pub eliminated: Vec<String>,
    pub conditions: Vec<ConditionResponse>,
    pub steps: Vec<SymbolicStepResponse>,
    pub text: String,
}

impl From<&SymbolicResult> for SolveResponse {
    fn from(r: &SymbolicResult) -> Self {
        SolveResponse {
            answer: r.answer_text(),
            formula: r.answer.to_string(),
            unit: r.unit.to_string(),
            dimension: r.answer.dim().to_string(),
            eliminated: r.eliminated.iter().cloned().collect(),
            conditions: r
                .conditions
                .iter()
                .map(|c| ConditionResponse {
                    step: c.step.clone(),
                    condition: c.to_string(),
                })
                .collect(),
            steps: r
                .steps
                .iter()
                .map(|s| SymbolicStepResponse {
                    name: s.name.clone(),
                    question: s.question.clone(),
                    value: s.text(),
                })
                .collect(),
            text: r.to_string(),
        }
    }
}

/// `POST /programs/check`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckProgram {
    pub source: String,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_trials() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceResponse {
    pub name: String,
    /// `independent` or `entangled`.
    pub verdict: String,
    pub absent_from_answer: bool,
    pub disjoint_classes: bool,
    pub dimension: String,
    pub answer_dimension: String,
    pub text: String,
}

impl From<&IndependenceEntry> for IndependenceResponse {
    fn from(e: &IndependenceEntry) -> Self {
        IndependenceResponse {
            name: e.name.clone(),
            verdict: match e.verdict {
                Independence::Independent => "independent",
                Independence::Entangled => "entangled",
            }
            .to_string(),
            absent_from_answer: e.absent_from_answer,
            disjoint_classes: e.disjoint_classes,
            dimension: e.dimension.to_string(),
            answer_dimension: e.answer_dimension.to_string(),
            text: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementResponse {
    pub passed: bool,
    pub requested: usize,
    pub agreed: usize,
    pub infeasible: usize,
    pub counterexamples: Vec<String>,
}

impl From<&AgreementReport> for AgreementResponse {
    fn from(r: &AgreementReport) -> Self {
        AgreementResponse {
            passed: r.passed(),
            requested: r.requested,
            agreed: r.agreed,
            infeasible: r.infeasible,
            counterexamples: r.counterexamples.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResponse {
    /// Absent when the program cannot be evaluated symbolically.
    pub independence: Option<Vec<IndependenceResponse>>,
    pub independence_error: Option<ApiError>,
    pub agreement: AgreementResponse,
}

/// `POST /programs/fmt`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FmtProgram {
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FmtResponse {
    pub source: String,
}
