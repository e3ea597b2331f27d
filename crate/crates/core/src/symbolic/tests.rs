use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::*;

fn sym(name: &str, dim: &str) -> Symbol {
    let d = if dim.is_empty() {
        Dimension::dimensionless()
    } else {
        Dimension::of_class(dim)
    };
    Symbol::new(name, d)
}

fn s(name: &str) -> RationalFunction {
    RationalFunction::symbol(&sym(name, ""))
}

fn k(n: i64) -> RationalFunction {
    RationalFunction::integer(n)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn ab_over_sum() -> RationalFunction {
    let (a, b) = (s("A"), s("B"));
    a.mul(&b).checked_div(&a.checked_add(&b).unwrap()).unwrap()
}

#[test]
fn cherries_simplifications() {
    let (a, b, c) = (s("A"), s("B"), s("C"));
    let v = c.checked_div(&a).unwrap().checked_add(&c.checked_div(&b).unwrap()).unwrap();
    let t = c.checked_div(&v).unwrap();
    assert_eq!(t, ab_over_sum());
    assert_eq!(t.to_string(), "A*B/(A + B)");

    let alt = a.checked_div(&a.checked_div(&b).unwrap().checked_add(&k(1)).unwrap()).unwrap();
    assert!(rf_equal(&alt, &ab_over_sum()));

    let harmonic = k(1)
        .checked_div(&k(1).checked_div(&a).unwrap().checked_add(&k(1).checked_div(&b).unwrap()).unwrap())
        .unwrap();
    assert!(rf_equal(&harmonic, &ab_over_sum()));
}

#[test]
fn inverse_cancellation() {
    let (x, y) = (s("x"), s("y"));
    let p = x.checked_div(&y).unwrap().mul(&y.checked_div(&x).unwrap());
    assert_eq!(p, k(1));
    assert_eq!(p.to_string(), "1");
}

#[test]
fn equality_by_cross_multiplication() {
    let (a, b) = (s("A"), s("B"));
    let ba = b.mul(&a).checked_div(&b.checked_add(&a).unwrap()).unwrap();
    assert!(rf_equal(&ab_over_sum(), &ba));
    assert!(!rf_equal(&ab_over_sum(), &ab_over_sum().mul(&k(2))));
}

#[test]
fn substitution() {
    let min = "min";
    let a = sym("A", min);
    let b = sym("B", min);
    let f = RationalFunction::symbol(&a)
        .mul(&RationalFunction::symbol(&b))
        .checked_div(&RationalFunction::symbol(&a).checked_add(&RationalFunction::symbol(&b)).unwrap())
        .unwrap();
    assert_eq!(f.dim(), &Dimension::of_class(min));

    let eight = RationalFunction::constant(rat(8, 1), Dimension::of_class(min));
    let g = f.substitute(&BTreeMap::from([(b.clone(), eight.clone())])).unwrap();
    assert_eq!(g.to_string(), "8*A/(A + 8)");
    assert_eq!(g.dim(), &Dimension::of_class(min));

    let both = BTreeMap::from([
        (a.clone(), RationalFunction::constant(rat(24, 1), Dimension::of_class(min))),
        (b.clone(), eight),
    ]);
    assert_eq!(f.substitute(&both).unwrap().as_constant(), Some(rat(6, 1)));
    assert_eq!(f.substitute(&BTreeMap::new()).unwrap(), f);

    let wrong = BTreeMap::from([(a.clone(), k(3))]);
    assert!(matches!(f.substitute(&wrong), Err(SymbolicError::DimensionMismatch { .. })));

    // A + B vanishes identically at A = -B
    let den = RationalFunction::symbol(&a).checked_add(&RationalFunction::symbol(&b)).unwrap();
    let r = k(1).checked_div(&den).unwrap();
    let neg_b = BTreeMap::from([(a, RationalFunction::symbol(&b).neg())]);
    assert_eq!(r.substitute(&neg_b), Err(SymbolicError::DivisionByZero));
}

#[test]
fn dimension_checks() {
    let a = RationalFunction::symbol(&sym("A", "m"));
    let t = RationalFunction::symbol(&sym("T", "s"));
    assert!(matches!(a.checked_add(&t), Err(SymbolicError::DimensionMismatch { .. })));
    let v = a.checked_div(&t).unwrap();
    assert_eq!(v.dim(), &Dimension::from_pairs([("m", 1), ("s", -1)]));
    assert_eq!(a.checked_div(&k(0)), Err(SymbolicError::DivisionByZero));
    assert_eq!(a.powi(-2).unwrap().dim(), &Dimension::from_pairs([("m", -2)]));
}

#[test]
fn canonical_rendering() {
    let (a, b) = (s("a"), s("b"));
    let raft = k(2).mul(&a).mul(&b).checked_div(&a.checked_sub(&b).unwrap()).unwrap();
    assert_eq!(raft.to_string(), "2*a*b/(a - b)");
    assert_eq!(a.checked_div(&k(2)).unwrap().to_string(), "a/2");
    assert_eq!(k(1).checked_div(&k(2).mul(&a)).unwrap().to_string(), "1/(2*a)");
    assert_eq!(a.checked_add(&b).unwrap().checked_div(&a.mul(&b)).unwrap().to_string(), "(a + b)/(a*b)");
    assert_eq!(a.powi(-2).unwrap().to_string(), "1/a^2");
    assert_eq!(k(0).to_string(), "0");
}

#[derive(Debug, Clone)]
enum Tree {
    Var(usize),
    Const(BigRational),
    Add(Box<Tree>, Box<Tree>),
    Sub(Box<Tree>, Box<Tree>),
    Mul(Box<Tree>, Box<Tree>),
    Div(Box<Tree>, Box<Tree>),
}

const VARS: [&str; 3] = ["x", "y", "z"];

fn random_tree(rng: &mut StdRng, depth: u32) -> Tree {
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.6) {
            Tree::Var(rng.gen_range(0..VARS.len()))
        } else {
            Tree::Const(rat(rng.gen_range(-5..=5), rng.gen_range(1..=4)))
        };
    }
    let l = Box::new(random_tree(rng, depth - 1));
    let r = Box::new(random_tree(rng, depth - 1));
    match rng.gen_range(0..4) {
        0 => Tree::Add(l, r),
        1 => Tree::Sub(l, r),
        2 => Tree::Mul(l, r),
        _ => Tree::Div(l, r),
    }
}

/// Direct evaluation, the oracle.
fn eval_tree(t: &Tree, pt: &[BigRational]) -> Option<BigRational> {
    Some(match t {
        Tree::Var(i) => pt[*i].clone(),
        Tree::Const(c) => c.clone(),
        Tree::Add(a, b) => eval_tree(a, pt)? + eval_tree(b, pt)?,
        Tree::Sub(a, b) => eval_tree(a, pt)? - eval_tree(b, pt)?,
        Tree::Mul(a, b) => eval_tree(a, pt)? * eval_tree(b, pt)?,
        Tree::Div(a, b) => {
            let d = eval_tree(b, pt)?;
            if d.is_zero() {
                return None;
            }
            eval_tree(a, pt)? / d
        }
    })
}

fn build(t: &Tree) -> Option<RationalFunction> {
    Some(match t {
        Tree::Var(i) => s(VARS[*i]),
        Tree::Const(c) => RationalFunction::constant(c.clone(), Dimension::dimensionless()),
        Tree::Add(a, b) => build(a)?.checked_add(&build(b)?).ok()?,
        Tree::Sub(a, b) => build(a)?.checked_sub(&build(b)?).ok()?,
        Tree::Mul(a, b) => build(a)?.mul(&build(b)?),
        Tree::Div(a, b) => build(a)?.checked_div(&build(b)?).ok()?,
    })
}

#[test]
fn normal_form_agrees_with_direct_evaluation() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..300 {
        let tree = random_tree(&mut rng, 4);
        let Some(rf) = build(&tree) else { continue };
        assert!(rf.den().leading_coeff() == rat(1, 1));
        assert!(gcd(rf.num(), rf.den()).is_one() || rf.is_zero());
        for _ in 0..20 {
            let pt: Vec<BigRational> = (0..VARS.len())
                .map(|_| rat(rng.gen_range(-20..=20), rng.gen_range(1..=7)))
                .collect();
            let Some(expected) = eval_tree(&tree, &pt) else { continue };
            let point = VARS.iter().map(|v| v.to_string()).zip(pt.iter().cloned()).collect();
            assert_eq!(rf.eval(&point), Some(expected), "{tree:?}");
        }
    }
}

#[test]
fn divmod_identity_on_random_inputs() {
    let mut rng = StdRng::seed_from_u64(11);
    let x = Polynomial::var("x");
    let rand_poly = |rng: &mut StdRng, deg: u32| {
        let mut p = Polynomial::zero();
        for e in 0..=deg {
            let c = Polynomial::constant(rat(rng.gen_range(-9..=9), rng.gen_range(1..=3)));
            p = &p + &(&c * &x.pow(e));
        }
        p
    };
    for _ in 0..200 {
        let (da, dd) = (rng.gen_range(0..12), rng.gen_range(0..5));
        let a = rand_poly(&mut rng, da);
        let d = rand_poly(&mut rng, dd);
        if d.is_zero() {
            continue;
        }
        let (q, r) = poly_divmod(&a, &d).unwrap();
        assert_eq!(&(&q * &d) + &r, a);
        assert!(r.is_zero() || r.degree_in("x") < d.degree_in("x") || d.degree_in("x") == 0);
    }
}

#[test]
fn field_axioms() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..100 {
        let [a, b, c] = [0, 0, 0].map(|_| build(&random_tree(&mut rng, 2)));
        let (Some(a), Some(b), Some(c)) = (a, b, c) else { continue };
        let add = |p: &RationalFunction, q: &RationalFunction| p.checked_add(q).unwrap();
        assert!(rf_equal(&add(&a, &b), &add(&b, &a)));
        assert!(rf_equal(&add(&add(&a, &b), &c), &add(&a, &add(&b, &c))));
        assert!(rf_equal(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c))));
        assert!(rf_equal(&a.mul(&add(&b, &c)), &add(&a.mul(&b), &a.mul(&c))));
        assert!(add(&a, &a.neg()).is_zero());
        if !a.is_zero() {
            assert_eq!(a.mul(&a.recip().unwrap()), k(1));
        }
    }
}
