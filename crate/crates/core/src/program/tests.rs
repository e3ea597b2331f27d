use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;

use super::*;
use crate::fixtures;
use crate::scalar::ExactScalar;
use crate::symbolic::rf_equal;

fn fixture(name: &str) -> StepProgram {
    parse(fixtures::get(name).unwrap().source).unwrap()
}

fn q(text: &str, p: &StepProgram) -> Quantity {
    match parse_decl_value(text, p.registry()).unwrap() {
        DeclValue::Quantity(q) => q,
        other => panic!("{other} is not a quantity"),
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn names(list: &[&str]) -> BTreeSet<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn shown(t: &Trace) -> Vec<String> {
    t.entries.iter().map(|e| e.value.to_string()).collect()
}

/// Symbolic answer of a one-line formula program, as an independent oracle.
fn formula(decls: &str, expr: &str) -> SymbolicResult {
    let src = format!("{decls}\nZ := {expr}\nreturn Z\n");
    eval_by_name(&parse(&src).unwrap(), &BTreeSet::new()).unwrap()
}

#[test]
fn cherries_parses_to_four_steps() {
    let p = fixture("cherries");
    assert_eq!(p.steps().count(), 4);
    assert_eq!(p.decls().count(), 3);
    assert_eq!(p.target(), "T");
    assert_eq!(p.unit_decls(), ["unit min", "unit cherry"]);
    assert_eq!(p.decl("C").unwrap().role, Role::Helpful);
    assert_eq!(
        p.step("U").unwrap().question.as_deref(),
        Some("What is Alice's picking speed?")
    );
}

#[test]
fn single_step_formula_parses() {
    let p = parse("unit min\ndata A = 24 min\ndata B = 8 min\nT := (A*B)/(A+B)\nreturn T").unwrap();
    assert_eq!(p.steps().count(), 1);
    assert_eq!(p.step("T").unwrap().expr.to_string(), "A*B/(A + B)");
}

#[test]
fn parse_errors() {
    let e = parse("U := C/A\ndata A = 1 min\nreturn U").unwrap_err();
    assert!(matches!(e, ParseError::UseBeforeDefinition { ref name, line: 1, col: 6 } if name == "C"));
    let e = parse("data A = 1\ndata A = 2\nreturn A").unwrap_err();
    assert!(matches!(e, ParseError::Redefinition { line: 2, .. }));
    let e = parse("data A = 1 furlong\nreturn A").unwrap_err();
    assert_eq!(e.code(), "unknown_unit");
    assert_eq!(parse("data A = 1").unwrap_err(), ParseError::MissingReturn);
    let e = parse("data A = 1\nB := A +\nreturn B").unwrap_err();
    assert_eq!((e.code(), e.line()), ("syntax_error", Some(2)));
    assert!(parse("data A = 1\nreturn A\nreturn A").is_err());
}

#[test]
fn colon_division_is_rejected() {
    assert_eq!(
        parse("data C = 1\ndata A = 2\nU := C:A\nreturn U").unwrap_err().code(),
        "syntax_error"
    );
}

#[test]
fn cherries_trace() {
    let p = fixture("cherries");
    let t = eval_by_value(&p, &BTreeMap::new()).unwrap();
    assert_eq!(shown(&t), ["3 cherry/min", "9 cherry/min", "12 cherry/min", "6 min"]);
    assert_eq!(t.answer, Quantity::of(6, "min"));
    assert_eq!(t.value("T"), Some(&t.answer));
    assert_eq!(t.entries[0].equation, "72 cherry/(24 min)");
    assert_eq!(t.entries[2].equation, "3 cherry/min + 9 cherry/min");

    let over = BTreeMap::from([("C".to_string(), q("48 cherry", &p))]);
    let t = eval_by_value(&p, &over).unwrap();
    assert_eq!(shown(&t), ["2 cherry/min", "6 cherry/min", "8 cherry/min", "6 min"]);
}

#[test]
fn trace_rendering() {
    let t = eval_by_value(&fixture("cherries"), &BTreeMap::new()).unwrap();
    let text = t.to_string();
    assert!(text.contains("What is their joint speed?\n  W = 12 cherry/min = 3 cherry/min + 9 cherry/min\n"));
    assert!(text.ends_with("Answer: T = 6 min"));
}

#[test]
fn rabbits_trace() {
    let t = eval_by_value(&fixture("rabbits"), &BTreeMap::new()).unwrap();
    assert_eq!(shown(&t), ["16 leg", "8 head", "4 head"]);
    let t = eval_by_value(&fixture("rabbits_alt"), &BTreeMap::new()).unwrap();
    assert_eq!(shown(&t), ["24 leg", "8 leg", "4 head"]);
}

#[test]
fn errors_name_the_step() {
    let p = fixture("cherries");
    let over = BTreeMap::from([("A".to_string(), q("0 min", &p))]);
    let e = eval_by_value(&p, &over).unwrap_err();
    assert_eq!(e.step.as_deref(), Some("U"));
    assert_eq!(e.code(), "division_by_zero");
    assert!(e.to_string().starts_with("step U (What is Alice's picking speed?)"));

    let p = parse("unit apple; unit people\ndata X = 10 apple\ndata Y = 10 people\nZ := X + Y\nreturn Z").unwrap();
    let e = eval_by_value(&p, &BTreeMap::new()).unwrap_err();
    assert_eq!((e.step.as_deref(), e.code()), (Some("Z"), "incommensurable_addition"));

    let p = parse("data X = 4 m\nZ := sqrt(X)\nreturn Z").unwrap();
    assert_eq!(eval_by_value(&p, &BTreeMap::new()).unwrap_err().code(), "odd_exponent");

    let e = eval_by_value(&fixture("cherries"), &BTreeMap::from([("T".to_string(), Quantity::of(1, "min"))]));
    assert_eq!(e.unwrap_err().code(), "not_input");
}

#[test]
fn cherries_symbolic() {
    let p = fixture("cherries");
    let r = eval_by_name(&p, &names(&["A", "B", "C"])).unwrap();
    assert_eq!(r.answer_text(), "A*B/(A + B) min");
    assert_eq!(r.unit, UnitExpr::atom("min"));
    assert_eq!(r.eliminated, names(&["C"]));
    assert!(r.conditions.is_empty());
    let oracle = formula("unit min\ndata A = A min\ndata B = B min", "1/(1/A + 1/B)");
    assert!(rf_equal(&r.answer, &oracle.answer));
    assert_eq!(r.answer.dim(), oracle.answer.dim());

    let r = eval_by_name(&p, &names(&["A"])).unwrap();
    assert_eq!(r.answer_text(), "8*A/(A + 8) min");
    assert!(r.eliminated.is_empty());
}

#[test]
fn letter_declarations_symbolize() {
    let src = fixtures::get("cherries").unwrap().source.replace("24 min", "A min");
    let r = eval_by_name(&parse(&src).unwrap(), &BTreeSet::new()).unwrap();
    assert_eq!(r.answer_text(), "8*A/(A + 8) min");
    let e = eval_by_value(&parse(&src).unwrap(), &BTreeMap::new()).unwrap_err();
    assert_eq!(e.code(), "not_concrete");
}

#[test]
fn symbol_clash() {
    let src = fixtures::get("cherries").unwrap().source.replace("24 min", "B min");
    let e = eval_by_name(&parse(&src).unwrap(), &names(&["B"])).unwrap_err();
    assert_eq!(e.code(), "symbol_clash");
}

#[test]
fn kevin() {
    let p = fixture("kevin");
    let r = eval_by_name(&p, &names(&["A", "B", "K"])).unwrap();
    let oracle = formula(
        "unit min\ndata A = A min\ndata B = B min\ndata K = K min",
        "A*B*K/(A*K + B*K - A*B)",
    );
    assert!(rf_equal(&r.answer, &oracle.answer));
    assert_eq!(r.answer_text(), "A*B*K/(-A*B + A*K + B*K) min");
    assert_eq!(r.conditions.len(), 1);
    assert_eq!(r.conditions[0].to_string(), "-A*B + A*K + B*K > 0");
    assert_eq!(r.conditions[0].step, "T");

    assert_eq!(eval_by_value(&p, &BTreeMap::new()).unwrap().answer, Quantity::of(12, "min"));
    // AB/(A + B) = 6 min: at and below it the bowl never fills.
    for k in ["6 min", "5 min", "1/2 min"] {
        let over = BTreeMap::from([("K".to_string(), q(k, &p))]);
        let e = eval_by_value(&p, &over).unwrap_err();
        assert!(e.is_infeasible(), "{k}: {e}");
        assert_eq!(e.step.as_deref(), Some("T"));
    }
    let over = BTreeMap::from([("K".to_string(), q("5 min", &p))]);
    assert_eq!(eval_by_value(&p, &over).unwrap_err().code(), "infeasible");
}

#[test]
fn raft_condition() {
    let r = eval_by_name(&fixture("raft"), &names(&["a", "b", "D"])).unwrap();
    assert_eq!(r.answer_text(), "2*a*b/(a - b) day");
    assert_eq!(r.conditions[0].to_string(), "a - b > 0");
    assert_eq!(r.eliminated, names(&["D"]));
}

#[test]
fn radicals_over_symbols() {
    let p = fixture("sunrise");
    assert_eq!(eval_by_value(&p, &BTreeMap::new()).unwrap().answer, Quantity::of(2, "hour"));
    let e = eval_by_name(&p, &names(&["a"])).unwrap_err();
    assert_eq!((e.code(), e.step.as_deref()), ("symbolic_radical_unsupported", Some("R")));
    let r = name::eval_by_name_open(&p, &names(&["a", "b"])).unwrap();
    assert_eq!(r.answer_text(), "a*sqrt(b/a) hour");
    assert_eq!(r.atoms.len(), 1);
    assert_eq!(r.atoms[0].symbol.name, "sqrt(b/a)");
    let point = r.exact_point(&[("a".to_string(), rat(1, 1)), ("b".to_string(), rat(4, 1))].into());
    assert_eq!(r.answer.eval_exact(&point), Some(ExactScalar::from_integer(2)));

    let p = parse("data X = 2\nZ := pi*X\nreturn Z").unwrap();
    let r = eval_by_name(&p, &names(&["X"])).unwrap();
    assert_eq!(r.answer.to_string(), "X*pi");
    assert_eq!(r.atoms[0].kind, AtomKind::Pi);
}

#[test]
fn squares_of_roots_reduce() {
    let p = parse("data X = 2 m^2\nY := sqrt(X)\nZ := Y*Y + Y^3/Y\nW := sqrt(8)*sqrt(8)\nreturn Z").unwrap();
    assert_eq!(eval_by_name(&p, &names(&["X"])).unwrap_err().code(), "symbolic_radical_unsupported");
    let r = name::eval_by_name_open(&p, &names(&["X"])).unwrap();
    assert_eq!(r.answer_text(), "2*X m^2");
    assert_eq!(r.steps[0].text(), "sqrt(X) m");
    assert_eq!(r.steps[2].text(), "8");
    let r = eval_by_name(&p, &BTreeSet::new()).unwrap();
    assert_eq!(r.answer_text(), "4 m^2");
    assert_eq!(r.steps[0].text(), "sqrt(2) m");
}

#[test]
fn radicands_are_conditions() {
    let p = parse("data a = 4 m^2\ndata b = 1 m^2\nR := sqrt(a - b)\nreturn R").unwrap();
    let r = name::eval_by_name_open(&p, &names(&["a", "b"])).unwrap();
    assert_eq!(r.answer_text(), "sqrt(a - b) m");
    assert_eq!(r.conditions[0].to_string(), "a - b > 0");
    let report = agreement_check(&p, 30, 1);
    assert!(report.passed(), "{report}");
    assert!(report.infeasible > 0);
}

#[test]
fn surds_stay_exact() {
    let p = parse("data X = 2 m^2\nY := sqrt(X)\nZ := Y*Y\nreturn Z").unwrap();
    let t = eval_by_value(&p, &BTreeMap::new()).unwrap();
    assert_eq!(t.entries[0].value.to_string(), "sqrt(2) m");
    assert_eq!(t.answer, Quantity::of(2, "m^2"));
}

#[test]
fn both_solutions_agree() {
    let all = names(&["A", "B"]);
    let four = eval_by_name(&fixture("cherries"), &names(&["A", "B", "C"])).unwrap();
    for other in ["cherries_ratio", "cherries_formula"] {
        let r = eval_by_name(&fixture(other), &all).unwrap();
        assert!(rf_equal(&four.answer, &r.answer), "{other}");
        assert_eq!(four.unit, r.unit);
    }
}

#[test]
fn independence() {
    let report = check_helpful_independence(&fixture("cherries")).unwrap();
    assert_eq!(report.len(), 1);
    assert_eq!(report[0].verdict, Independence::Independent);
    assert!(report[0].to_string().starts_with("C: independent"));

    let p = parse("unit cherry\nhelpful C = 72 cherry\nreturn C").unwrap();
    let report = check_helpful_independence(&p).unwrap();
    assert_eq!(report[0].verdict, Independence::Entangled);
    assert!(!report[0].absent_from_answer);

    assert!(check_helpful_independence(&fixture("rabbits")).unwrap().is_empty());

    // Absent from the answer but measured in miles, like the answer.
    let report = check_helpful_independence(&fixture("average_speed")).unwrap();
    assert_eq!(report[0].verdict, Independence::Entangled);
    assert!(report[0].absent_from_answer);
    assert!(!report[0].disjoint_classes);
}

#[test]
fn agreement() {
    for name in ["cherries", "kevin", "taps", "average_speed", "raft", "rabbits"] {
        let r = agreement_check(&fixture(name), 30, 7);
        assert!(r.passed(), "{name}: {r}");
    }
    let r = agreement_check(&fixture("kevin"), 30, 7);
    assert!(r.infeasible > 0);
    let r = agreement_check(&fixture("sunrise"), 30, 7);
    assert!(r.passed(), "sunrise: {r}");
}

#[test]
fn determinism() {
    let p = fixture("kevin");
    let a = eval_by_value(&p, &BTreeMap::new()).unwrap();
    let b = eval_by_value(&fixture("kevin"), &BTreeMap::new()).unwrap();
    assert_eq!(a, b);
    assert_eq!(agreement_check(&p, 10, 3), agreement_check(&p, 10, 3));
}

#[test]
fn fmt_is_idempotent() {
    for f in fixtures::ALL {
        let p = parse(f.source).unwrap();
        let once = p.fmt();
        let again = parse(&once).unwrap();
        assert_eq!(again.fmt(), once, "{}", f.name);
        let exprs = |p: &StepProgram| p.steps().map(|s| s.expr.clone()).collect::<Vec<_>>();
        assert_eq!(exprs(&again), exprs(&p));
        assert_eq!(again.decls().collect::<Vec<_>>(), p.decls().collect::<Vec<_>>());
    }
    let messy = "unit min;unit cherry\ndata A=24 min\ndata B = 8min\n\n\n helpful C = 72 cherry %c\nU:=C/A ; V := C / B\nW := (U)+V\nT := C/W\nreturn T";
    let p = parse(messy).unwrap();
    assert_eq!(
        p.fmt(),
        "unit min\nunit cherry\ndata A = 24 min\ndata B = 8 min\n\nhelpful C = 72 cherry  % c\nU := C/A\nV := C/B\nW := U + V\nT := C/W\nreturn T\n"
    );
}

#[test]
fn printed_expressions_reparse() {
    let src = "data X = 2\ndata Y = 3\nZ := -(X - Y)*(X + Y)/(X*Y)^2 - 1/2*X + 3 m/(2 s)*(1 s/m) + X/(-Y) - (-X)^2\nreturn Z";
    let p = parse(src).unwrap();
    let shown = p.step("Z").unwrap().expr.to_string();
    let q = parse(&format!("data X = 2\ndata Y = 3\nZ := {shown}\nreturn Z")).unwrap();
    assert_eq!(q.step("Z").unwrap().expr, p.step("Z").unwrap().expr, "{shown}");
}

#[test]
fn symbolic_answers_reparse() {
    for (name, symbols) in [
        ("cherries", &["A", "B", "C"][..]),
        ("kevin", &["A", "B", "K"]),
        ("raft", &["a", "b"]),
        ("average_speed", &["a", "b", "D"]),
    ] {
        let p = fixture(name);
        let r = eval_by_name(&p, &names(symbols)).unwrap();
        let decls: Vec<String> = p
            .decls()
            .filter(|d| symbols.contains(&d.name.as_str()))
            .map(|d| format!("data {} = {} {}", d.name, d.name, d.value.unit()))
            .collect();
        let header = format!("{}\n{}", p.unit_decls().join("\n"), decls.join("\n"));
        let back = formula(&header, &r.answer.to_string());
        assert!(rf_equal(&back.answer, &r.answer), "{name}: {}", r.answer);
    }
}

#[test]
fn decimals_are_exact() {
    let p = parse("data X = 0.1 m\ndata Y = 0.2 m\nZ := X + Y\nreturn Z").unwrap();
    let t = eval_by_value(&p, &BTreeMap::new()).unwrap();
    assert_eq!(
        t.answer.magnitude,
        ExactScalar::from_rational(BigRational::new(3.into(), 10.into()))
    );
}

#[test]
fn units_from_rates() {
    let p = parse("unit cm\nrate 1 m == 100 cm\ndata X = 1 m\ndata Y = 1 cm\nZ := X + Y\nreturn Z").unwrap();
    assert_eq!(eval_by_value(&p, &BTreeMap::new()).unwrap().answer, Quantity::of(101, "cm"));
}

