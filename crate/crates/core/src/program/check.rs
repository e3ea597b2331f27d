//! Helpful-number independence and cross-checking the two evaluators.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::name::eval_by_name_open;
use super::{eval_by_name, eval_by_value, EvalError, Role, StepProgram};
use crate::scalar::ExactScalar;
use crate::units::{Dimension, Quantity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Independence {
    Independent,
    Entangled,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependenceEntry {
    pub name: String,
    pub verdict: Independence,
    pub absent_from_answer: bool,
    pub disjoint_classes: bool,
    pub dimension: Dimension,
    pub answer_dimension: Dimension,
}

impl fmt::Display for IndependenceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match self.verdict {
            Independence::Independent => "independent",
            Independence::Entangled => "entangled",
        };
        let presence = if self.absent_from_answer {
            "absent from the answer"
        } else {
            "occurs in the answer"
        };
        let classes = if self.disjoint_classes {
            "shares no unit class with"
        } else {
            "shares a unit class with"
        };
        write!(
            f,
            "{}: {verdict} ({presence}; {} {classes} {})",
            self.name, self.dimension, self.answer_dimension
        )
    }
}

fn all_inputs(p: &StepProgram) -> BTreeSet<String> {
    p.decls().map(|d| d.name.clone()).collect()
}

/// One entry per helpful declaration, in program order.
pub fn check_helpful_independence(p: &StepProgram) -> Result<Vec<IndependenceEntry>, EvalError> {
    let result = eval_by_name(p, &all_inputs(p))?;
    let reg = p.registry();
    let answer_dimension = reg.dimension_of(&result.unit)?;
    let mut out = Vec::new();
    for d in p.decls().filter(|d| d.role == Role::Helpful) {
        let letter = &result.symbols[&d.name].name;
        let dimension = reg.dimension_of(d.value.unit())?;
        let absent_from_answer = !result.mentions(&result.answer, letter);
        let disjoint_classes = dimension.is_disjoint(&answer_dimension);
        let verdict = if absent_from_answer && disjoint_classes {
            Independence::Independent
        } else {
            Independence::Entangled
        };
        out.push(IndependenceEntry {
            name: d.name.clone(),
            verdict,
            absent_from_answer,
            disjoint_classes,
            dimension,
            answer_dimension: answer_dimension.clone(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AgreementReport {
    pub requested: usize,
    /// Assignments where both evaluators produced the same answer.
    pub agreed: usize,
    /// Assignments the value evaluator rejected as infeasible, each
    /// confirmed by a violated symbolic condition.
    pub infeasible: usize,
    pub counterexamples: Vec<String>,
}

impl AgreementReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty() && self.agreed == self.requested
    }
}

impl fmt::Display for AgreementReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{} assignments agree, {} infeasible",
            self.agreed, self.requested, self.infeasible
        )?;
        for c in &self.counterexamples {
            write!(f, "\ncounterexample: {c}")?;
        }
        Ok(())
    }
}

fn random_positive(rng: &mut StdRng) -> BigRational {
    BigRational::new(rng.gen_range(1..=60).into(), rng.gen_range(1..=12).into())
}

/// Draws random positive rational values for every data and helpful
/// declaration and checks that substituting them into the symbolic answer
/// gives exactly the call-by-value answer. Square roots over symbols are
/// kept as atoms and bound to their exact values at each draw. Draws the value evaluator rejects
/// as infeasible do not count towards `trials`, but each must violate one of
/// the recorded conditions.
pub fn agreement_check(p: &StepProgram, trials: usize, seed: u64) -> AgreementReport {
    let mut report = AgreementReport {
        requested: trials,
        ..Default::default()
    };
    let symbolic = match eval_by_name_open(p, &all_inputs(p)) {
        Ok(s) => s,
        Err(e) => {
            report.counterexamples.push(format!("symbolic evaluation failed: {e}"));
            return report;
        }
    };
    let reg = p.registry();
    let mut rng = StdRng::seed_from_u64(seed);
    let max_draws = trials.saturating_mul(20).max(100);
    for _ in 0..max_draws {
        if report.agreed == trials || report.counterexamples.len() >= 5 {
            break;
        }
        let values: BTreeMap<String, BigRational> = p
            .decls()
            .map(|d| (d.name.clone(), random_positive(&mut rng)))
            .collect();
        let overrides = p
            .decls()
            .map(|d| {
                let q = Quantity::new(
                    ExactScalar::from_rational(values[&d.name].clone()),
                    d.value.unit().clone(),
                );
                (d.name.clone(), q)
            })
            .collect();
        let point = symbolic.exact_point(&values);
        let shown = || {
            values
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let violated = symbolic
            .conditions
            .iter()
            .any(|c| c.holds_at_exact(&point) == Some(false));
        match eval_by_value(p, &overrides) {
            Err(e) if e.is_infeasible() => {
                if violated {
                    report.infeasible += 1;
                } else {
                    report
                        .counterexamples
                        .push(format!("{}: {e}, but every symbolic condition holds", shown()));
                }
            }
            Err(e) => report.counterexamples.push(format!("{}: {e}", shown())),
            Ok(trace) => {
                let by_name = symbolic.answer.eval_exact(&point);
                let by_value = reg.convert(&trace.answer, &symbolic.unit).ok();
                let same = match (&by_name, &by_value) {
                    (Some(n), Some(v)) => &v.magnitude == n,
                    _ => false,
                };
                if same && !violated {
                    report.agreed += 1;
                } else {
                    report.counterexamples.push(format!(
                        "{}: by value {}, by name {}{}",
                        shown(),
                        trace.answer,
                        by_name.map_or("undefined".into(), |n| format!("{n} {}", symbolic.unit)),
                        if violated { " (a condition fails)" } else { "" },
                    ));
                }
            }
        }
    }
    report
}
