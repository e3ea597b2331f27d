//! Worksheets: a program laid out as editable cells.
//!
//! Data and helpful declarations become editable cells; steps and the
//! answer are computed. A worksheet is stored as a versioned JSON document
//! in which every number is a string in the DSL's literal syntax, so
//! nothing is rounded on the way to disk or to a client.


use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::program::{
    eval_by_name, eval_by_value, parse, parse_decl_value, DeclValue, ParseError, Role,
    StepProgram, Stmt, SymbolicResult, Trace,
};
use crate::units::is_identifier;

/// Current document format.
pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellKind {
    Data,
    Helpful,
    Step,
    Answer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cell {
    /// The declared or assigned name; `answer` for the answer cell.
    pub id: String,
    pub kind: CellKind,
    /// Question text, if any.
    pub label: Option<String>,
    /// A quantity literal or `letter unit` for inputs, an expression for
    /// steps, the target name for the answer.
    pub content: String,
    /// Input content as first loaded, for resets.
    pub original: Option<String>,
    /// Rendered value after the last run.
    pub computed: Option<String>,
    /// The step's expression with values substituted (value runs only).
    pub equation: Option<String>,
    pub editable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    Value,
    Name,
}

/// An evaluation or parse failure located at a cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellError {
    pub step: Option<String>,
    pub cell: Option<String>,
    pub code: String,
    pub message: String,
}

impl fmt::Display for CellError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Outcome of the last run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunResult {
    pub mode: RunMode,
    pub answer: Option<String>,
    /// Sign conditions the symbolic answer depends on, as `P > 0`.
    pub conditions: Vec<String>,
    /// Helpful names absent from the symbolic answer.
    pub eliminated: Vec<String>,
    pub error: Option<CellError>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Worksheet {
    pub title: String,
    pub problem: String,
    /// `unit` and `rate` statements.
    pub units: Vec<String>,
    pub cells: Vec<Cell>,
    pub result: Option<RunResult>,
    pub revision: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    CellEdited,
    RunCompleted,
    Symbolized,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionEvent {
    pub kind: EventKind,
    pub payload: serde_json::Value,
    /// Worksheet revision after the event.
    pub revision: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorksheetError {
    #[error("no cell `{0}`")]
    UnknownCell(String),
    #[error("cell `{0}` is computed and cannot be edited")]
    NotEditable(String),
    #[error("`{0}` is not a valid letter")]
    InvalidLetter(String),
    #[error("{source}")]
    Parse { cell: Option<String>, source: ParseError },
    #[error("document version {found} is not supported (expected {SCHEMA_VERSION})")]
    SchemaVersionMismatch { found: String },
    #[error("invalid document: {0}")]
    InvalidDocument(String),
}

impl WorksheetError {
    pub fn code(&self) -> &'static str {
        match self {
            WorksheetError::UnknownCell(_) => "unknown_cell",
            WorksheetError::NotEditable(_) => "not_editable",
            WorksheetError::InvalidLetter(_) => "invalid_letter",
            WorksheetError::Parse { source, .. } => source.code(),
            WorksheetError::SchemaVersionMismatch { .. } => "schema_version_mismatch",
            WorksheetError::InvalidDocument(_) => "invalid_document",
        }
    }

    pub fn cell(&self) -> Option<&str> {
        match self {
            WorksheetError::UnknownCell(c)
            | WorksheetError::NotEditable(c)
            | WorksheetError::Parse { cell: Some(c), .. } => Some(c),
            _ => None,
        }
    }
}

/// `answer`, or `answer_`, `answer__`, ... if the program uses the name.
fn answer_id(p: &StepProgram) -> String {
    let mut id = String::from("answer");
    while p.decl(&id).is_some() || p.step(&id).is_some() {
        id.push('_');
    }
    id
}

fn role_kind(role: Role) -> CellKind {
    match role {
        Role::Data => CellKind::Data,
        Role::Helpful => CellKind::Helpful,
    }
}

/// Lays a program out as cells: one per declaration and step, then the
/// answer.
pub fn worksheet_from_program(p: &StepProgram, title: &str, problem: &str) -> Worksheet {
    let mut cells = Vec::new();
    for item in p.items() {
        match &item.stmt {
            Stmt::Decl(d) => {
                let content = canonical(&d.value);
                cells.push(Cell {
                    id: d.name.clone(),
                    kind: role_kind(d.role),
                    label: d.question.clone(),
                    original: Some(content.clone()),
                    content,
                    computed: None,
                    equation: None,
                    editable: true,
                });
            }
            Stmt::Step(s) => cells.push(Cell {
                id: s.name.clone(),
                kind: CellKind::Step,
                label: s.question.clone(),
                content: s.expr.to_string(),
                original: None,
                computed: None,
                equation: None,
                editable: false,
            }),
            _ => {}
        }
    }
    cells.push(Cell {
        id: answer_id(p),
        kind: CellKind::Answer,
        label: None,
        content: p.target().to_string(),
        original: None,
        computed: None,
        equation: None,
        editable: false,
    });
    Worksheet {
        title: title.to_string(),
        problem: problem.to_string(),
        units: p.unit_decls(),
        cells,
        result: None,
        revision: 0,
    }
}

impl Worksheet {
    pub fn cell(&self, id: &str) -> Option<&Cell> {
        self.cells.iter().find(|c| c.id == id)
    }

    pub fn answer(&self) -> Option<&Cell> {
        self.cells.iter().find(|c| c.kind == CellKind::Answer)
    }

    /// Program text the cells describe.
    pub fn source(&self) -> String {
        let mut out = String::new();
        for u in &self.units {
            out.push_str(u);
            out.push('\n');
        }
        for c in &self.cells {
            if let Some(q) = &c.label {
                out.push_str(&format!("? {q}\n"));
            }
            let line = match c.kind {
                CellKind::Data => format!("data {} = {}", c.id, c.content),
                CellKind::Helpful => format!("helpful {} = {}", c.id, c.content),
                CellKind::Step => format!("{} := {}", c.id, c.content),
                CellKind::Answer => format!("return {}", c.content),
            };
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    pub fn program(&self) -> Result<StepProgram, WorksheetError> {
        parse(&self.source()).map_err(|source| WorksheetError::Parse {
            cell: self.cell_at_line(&source),
            source,
        })
    }

    fn cell_at_line(&self, e: &ParseError) -> Option<String> {
        let mut line = self.units.len();
        for c in &self.cells {
            line += 1 + usize::from(c.label.is_some());
            if e.line() == Some(line) {
                return Some(c.id.clone());
            }
        }
        None
    }

    fn input_mut(&mut self, id: &str) -> Result<&mut Cell, WorksheetError> {
        let cell = self
            .cells
            .iter_mut()
            .find(|c| c.id == id && c.kind != CellKind::Answer)
            .ok_or_else(|| WorksheetError::UnknownCell(id.to_string()))?;
        if !cell.editable {
            return Err(WorksheetError::NotEditable(id.to_string()));
        }
        Ok(cell)
    }

    fn invalidate(&mut self) {
        for c in &mut self.cells {
            c.computed = None;
            c.equation = None;
        }
        self.result = None;
        self.revision += 1;
    }
}

/// Full-precision source text of an input.
fn canonical(v: &DeclValue) -> String {
    match v {
        DeclValue::Quantity(q) => format!("{q:#}"),
        symbol => symbol.to_string(),
    }
}

fn parse_content(w: &Worksheet, id: &str, text: &str) -> Result<DeclValue, WorksheetError> {
    let reg = w.program()?.registry().clone();
    parse_decl_value(text, &reg).map_err(|source| WorksheetError::Parse {
        cell: Some(id.to_string()),
        source,
    })
}

fn apply(w: &Worksheet, id: &str, value: DeclValue, kind: EventKind) -> Result<(Worksheet, SessionEvent), WorksheetError> {
    let mut next = w.clone();
    let content = canonical(&value);
    next.input_mut(id)?.content = content.clone();
    next.invalidate();
    let event = SessionEvent {
        kind,
        payload: json!({ "cell": id, "content": content }),
        revision: next.revision,
    };
    Ok((next, event))
}

/// Replaces an input cell's content with a quantity literal or a
/// `letter unit` symbol.
pub fn set_cell(w: &Worksheet, id: &str, content: &str) -> Result<(Worksheet, SessionEvent), WorksheetError> {
    w.clone().input_mut(id)?;
    let value = parse_content(w, id, content)?;
    apply(w, id, value, EventKind::CellEdited)
}

/// Replaces an input cell's value by a letter, keeping its unit. The
/// letter defaults to the cell's name.
pub fn symbolize_cell(
    w: &Worksheet,
    id: &str,
    letter: Option<&str>,
) -> Result<(Worksheet, SessionEvent), WorksheetError> {
    let letter = letter.unwrap_or(id);
    if !is_identifier(letter) {
        return Err(WorksheetError::InvalidLetter(letter.to_string()));
    }
    let current = w.clone().input_mut(id)?.clone();
    let unit = parse_content(w, id, &current.content)?.unit().clone();
    let value = DeclValue::Symbol {
        letter: letter.to_string(),
        unit,
    };
    // Check that the letter reads back as a symbol rather than a number.
    let text = canonical(&value);
    if parse_content(w, id, &text)? != value {
        return Err(WorksheetError::InvalidLetter(letter.to_string()));
    }
    apply(w, id, value, EventKind::Symbolized)
}

/// Restores every input cell to its original content.
pub fn reset(w: &Worksheet) -> (Worksheet, SessionEvent) {
    let mut next = w.clone();
    let mut changed = Vec::new();
    for c in &mut next.cells {
        if let Some(orig) = &c.original {
            if *orig != c.content {
                c.content = orig.clone();
                changed.push(c.id.clone());
            }
        }
    }
    if !changed.is_empty() {
        next.invalidate();
    }
    let event = SessionEvent {
        kind: EventKind::CellEdited,
        payload: json!({ "reset": changed }),
        revision: next.revision,
    };
    (next, event)
}

fn fill_value(w: &mut Worksheet, t: &Trace) {
    for c in &mut w.cells {
        let entry = t.entries.iter().find(|e| e.name == c.id);
        match c.kind {
            CellKind::Data | CellKind::Helpful => {
                c.computed = t.value(&c.id).map(ToString::to_string);
            }
            CellKind::Step => {
                c.computed = entry.map(|e| e.value.to_string());
                c.equation = entry.map(|e| e.equation.clone());
            }
            CellKind::Answer => c.computed = Some(t.answer.to_string()),
        }
    }
    w.result = Some(RunResult {
        mode: RunMode::Value,
        answer: Some(t.answer.to_string()),
        conditions: Vec::new(),
        eliminated: Vec::new(),
        error: None,
    });
}

fn fill_name(w: &mut Worksheet, p: &StepProgram, r: &SymbolicResult) {
    for c in &mut w.cells {
        c.equation = None;
        c.computed = match c.kind {
            CellKind::Data | CellKind::Helpful => match &p.decl(&c.id).map(|d| &d.value) {
                Some(DeclValue::Quantity(q)) => Some(q.to_string()),
                Some(symbol) => Some(symbol.to_string()),
                None => None,
            },
            CellKind::Step => r.steps.iter().find(|s| s.name == c.id).map(|s| s.text()),
            CellKind::Answer => Some(r.answer_text()),
        };
    }
    w.result = Some(RunResult {
        mode: RunMode::Name,
        answer: Some(r.answer_text()),
        conditions: r.conditions.iter().map(ToString::to_string).collect(),
        eliminated: r.eliminated.iter().cloned().collect(),
        error: None,
    });
}

/// Evaluates the worksheet: symbolically when any input holds a letter,
/// otherwise on values. Evaluation failures are reported as an error event
/// and recorded in the result, not returned as `Err`. The revision moves
/// only when the computed state changes, so a second run is a no-op.
pub fn run(w: &Worksheet) -> Result<(Worksheet, SessionEvent), WorksheetError> {
    let p = w.program()?;
    let mut next = w.clone();
    let symbolic = p.decls().any(|d| d.value.is_symbolic());
    let outcome = if symbolic {
        eval_by_name(&p, &BTreeSet::new()).map(|r| fill_name(&mut next, &p, &r))
    } else {
        eval_by_value(&p, &Default::default()).map(|t| fill_value(&mut next, &t))
    };
    let event_kind = match outcome {
        Ok(()) => EventKind::RunCompleted,
        Err(e) => {
            for c in &mut next.cells {
                c.computed = None;
                c.equation = None;
            }
            next.result = Some(RunResult {
                mode: if symbolic { RunMode::Name } else { RunMode::Value },
                answer: None,
                conditions: Vec::new(),
                eliminated: Vec::new(),
                error: Some((&e).into()),
            });
            EventKind::Error
        }
    };
    if next != *w {
        next.revision += 1;
    }
    let payload = match &next.result {
        Some(RunResult { error: Some(e), .. }) => serde_json::to_value(e).expect("serializable"),
        Some(r) => json!({ "answer": r.answer, "mode": r.mode }),
        None => serde_json::Value::Null,
    };
    let event = SessionEvent {
        kind: event_kind,
        payload,
        revision: next.revision,
    };
    Ok((next, event))
}

/// Serializes to the versioned JSON document, ending in a newline.
pub fn save(w: &Worksheet) -> String {
    let mut doc = serde_json::to_value(w).expect("worksheets serialize");
    let obj = doc.as_object_mut().expect("a worksheet is an object");
    let mut out = serde_json::Map::new();
    out.insert("version".into(), SCHEMA_VERSION.into());
    out.append(obj);
    let mut text = serde_json::to_string_pretty(&out).expect("serializable");
    text.push('\n');
    text
}

/// Reads a document written by [`save`] and checks that its cells form a
/// valid program.
pub fn load(document: &str) -> Result<Worksheet, WorksheetError> {
    let mut doc: serde_json::Value =
        serde_json::from_str(document).map_err(|e| WorksheetError::InvalidDocument(e.to_string()))?;
    let obj = doc
        .as_object_mut()
        .ok_or_else(|| WorksheetError::InvalidDocument("expected a JSON object".into()))?;
    match obj.remove("version") {
        Some(v) if v.as_u64() == Some(SCHEMA_VERSION) => {}
        Some(v) => return Err(WorksheetError::SchemaVersionMismatch { found: v.to_string() }),
        None => return Err(WorksheetError::SchemaVersionMismatch { found: "none".into() }),
    }
    let w: Worksheet =
        serde_json::from_value(doc).map_err(|e| WorksheetError::InvalidDocument(e.to_string()))?;
    let answers = w.cells.iter().filter(|c| c.kind == CellKind::Answer).count();
    if answers != 1 {
        return Err(WorksheetError::InvalidDocument(format!(
            "expected one answer cell, found {answers}"
        )));
    }
    let mut ids = BTreeSet::new();
    if let Some(dup) = w.cells.iter().find(|c| !ids.insert(&c.id)) {
        return Err(WorksheetError::InvalidDocument(format!("duplicate cell id `{}`", dup.id)));
    }
    w.program()?;
    Ok(w)
}
