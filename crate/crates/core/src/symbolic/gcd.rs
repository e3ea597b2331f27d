//! Multivariate gcd by recursive content and primitive-part extraction.

use num_rational::BigRational;
use num_traits::One;

use super::poly::{PowerProduct, Polynomial};

/// Monic greatest common divisor; `gcd(0, 0) = 0`.
pub fn gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.as_constant().is_some() || b.as_constant().is_some() {
        return Polynomial::one();
    }
    if a.is_monomial() {
        return monomial_gcd(a, b);
    }
    if b.is_monomial() {
        return monomial_gcd(b, a);
    }
    let (va, vb) = (a.vars(), b.vars());
    if let Some(x) = va.symmetric_difference(&vb).next() {
        // The gcd cannot involve x, so it divides every x-coefficient.
        let (p, q) = if a.contains_var(x) { (a, b) } else { (b, a) };
        let mut g = q.clone();
        for c in p.coeffs_in(x).values() {
            g = gcd(&g, c);
            if g.is_one() {
                break;
            }
        }
        return g;
    }
    let x = va.first().expect("nonconstant").clone();
    let (ca, cb) = (content(a, &x), content(b, &x));
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let c = gcd(&ca, &cb);
    (&c * &primitive_gcd(pa, pb, &x)).monic()
}

fn monomial_gcd(m: &Polynomial, p: &Polynomial) -> Polynomial {
    let (mpp, _) = m.leading().expect("nonzero");
    let g = p.terms().fold(mpp.clone(), |acc, (pp, _)| acc.gcd(pp));
    Polynomial::monomial(BigRational::one(), g)
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `x`.
pub(crate) fn content(p: &Polynomial, x: &str) -> Polynomial {
    let mut g = Polynomial::zero();
    for c in p.coeffs_in(x).values() {
        g = gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn primitive_part(p: &Polynomial, x: &str) -> Polynomial {
    let c = content(p, x);
    integer_primitive(&p.div_exact(&c).expect("content divides"))
}

/// Rescales to coprime integer coefficients, keeping the sign.
pub(crate) fn integer_primitive(p: &Polynomial) -> Polynomial {
    if p.is_zero() {
        return p.clone();
    }
    let scaled = p.scale(&BigRational::from_integer(p.denominator_lcm()));
    let g = scaled.numerator_gcd();
    scaled.scale(&BigRational::new(One::one(), g))
}

/// Pseudo-remainder of `f` by `g` in `x`.
fn prem(f: &Polynomial, g: &Polynomial, x: &str) -> Polynomial {
    let dg = g.degree_in(x);
    let lg = g.leading_coeff_in(x);
    let mut r = f.clone();
    while !r.is_zero() && r.degree_in(x) >= dg {
        let dr = r.degree_in(x);
        let lr = r.leading_coeff_in(x);
        let shift = PowerProduct::from_pairs([(x, dr - dg)]);
        r = &(&lg * &r) - &(&lr * &g.mul_pp(&shift));
    }
    r
}

/// Gcd of two polynomials primitive in `x`, by a primitive remainder sequence.
fn primitive_gcd(a: Polynomial, b: Polynomial, x: &str) -> Polynomial {
    let (mut f, mut g) = if a.degree_in(x) >= b.degree_in(x) {
        (a, b)
    } else {
        (b, a)
    };
    while !g.is_zero() {
        let r = prem(&f, &g, x);
        f = g;
        g = if r.is_zero() { r } else { primitive_part(&r, x) };
    }
    if f.degree_in(x) == 0 {
        return Polynomial::one();
    }
    primitive_part(&f, x)
}
