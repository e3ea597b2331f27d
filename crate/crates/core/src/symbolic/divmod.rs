//! Univariate division with remainder.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{PowerProduct, Polynomial};
use super::SymbolicError;

/// Dense coefficients, index = degree, no trailing zeros.
type Dense = Vec<BigRational>;

fn trim(mut p: Dense) -> Dense {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn to_dense(p: &Polynomial, x: &str) -> Dense {
    let mut out = vec![BigRational::zero(); p.degree_in(x) as usize + 1];
    for (pp, c) in p.terms() {
        out[pp.exponent(x) as usize] += c;
    }
    trim(out)
}

fn from_dense(p: &[BigRational], x: &str) -> Polynomial {
    Polynomial::from_terms(
        p.iter()
            .enumerate()
            .map(|(k, c)| (PowerProduct::from_pairs([(x, k as u32)]), c.clone())),
    )
}

/// Remainder of a dense polynomial modulo a divisor with nonzero leading
/// coefficient.
fn rem_dense(mut p: Dense, d: &[BigRational]) -> Dense {
    let dd = d.len() - 1;
    let lead = d[dd].clone();
    while p.len() > dd {
        let top = p.len() - 1;
        let q = &p[top] / &lead;
        if !q.is_zero() {
            for (i, c) in d.iter().enumerate() {
                p[top - dd + i] -= &q * c;
            }
        }
        p.pop();
        p = trim(p);
    }
    p
}

fn mul_dense(a: &[BigRational], b: &[BigRational]) -> Dense {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

/// `x^k mod d` by square-and-multiply.
fn xpow_mod(k: u64, d: &[BigRational]) -> Dense {
    let mut result = rem_dense(vec![BigRational::one()], d);
    let mut base = rem_dense(vec![BigRational::zero(), BigRational::one()], d);
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            result = rem_dense(mul_dense(&result, &base), d);
        }
        k >>= 1;
        if k > 0 {
            base = rem_dense(mul_dense(&base, &base), d);
        }
    }
    result
}

/// The shared variable, or an error if the operands are not univariate in
/// one symbol. `None` means both are constants.
fn common_var(a: &Polynomial, b: &Polynomial) -> Result<Option<String>, SymbolicError> {
    let mut vars = a.vars();
    vars.extend(b.vars());
    match vars.len() {
        0 => Ok(None),
        1 => Ok(vars.pop_first()),
        _ => Err(SymbolicError::NotUnivariate(vars.into_iter().collect())),
    }
}

/// Remainder only. Each term `c*x^k` of the dividend is reduced on its own,
/// so sparse high-degree dividends never get expanded densely.
pub fn poly_rem(dividend: &Polynomial, divisor: &Polynomial) -> Result<Polynomial, SymbolicError> {
    if divisor.is_zero() {
        return Err(SymbolicError::DivisionByZero);
    }
    let Some(x) = common_var(dividend, divisor)? else {
        return Ok(Polynomial::zero());
    };
    let d = to_dense(divisor, &x);
    if d.len() == 1 {
        return Ok(Polynomial::zero());
    }
    let mut acc: Dense = Vec::new();
    for (pp, c) in dividend.terms() {
        let reduced = xpow_mod(pp.exponent(&x) as u64, &d);
        if acc.len() < reduced.len() {
            acc.resize(reduced.len(), BigRational::zero());
        }
        for (i, r) in reduced.iter().enumerate() {
            acc[i] += c * r;
        }
    }
    Ok(from_dense(&trim(acc), &x))
}

/// Quotient and remainder: `dividend = q*divisor + r` with
/// `deg r < deg divisor`.
pub fn poly_divmod(
    dividend: &Polynomial,
    divisor: &Polynomial,
) -> Result<(Polynomial, Polynomial), SymbolicError> {
    let r = poly_rem(dividend, divisor)?;
    let q = (dividend - &r)
        .div_exact(divisor)
        .expect("divisor divides dividend minus remainder");
    Ok((q, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Polynomial {
        Polynomial::var("x")
    }
    fn c(n: i64) -> Polynomial {
        Polynomial::constant(BigRational::from_integer(n.into()))
    }

    #[test]
    fn high_power_remainder() {
        let dividend = &x().pow(2023) + &c(1);
        let divisor = &x().pow(2) - &c(4);
        let r = poly_rem(&dividend, &divisor).unwrap();
        assert_eq!(r.to_string(), "2^2022*x + 1");
        let two = BigRational::from_integer(2.into());
        let expected = &Polynomial::monomial(
            num_traits::pow(two, 2022),
            PowerProduct::var("x"),
        ) + &c(1);
        assert_eq!(r, expected);
    }

    #[test]
    fn exact_and_trivial_cases() {
        let (q, r) = poly_divmod(&x().pow(2), &x().pow(2)).unwrap();
        assert_eq!((q, r), (c(1), Polynomial::zero()));
        let f = &(&x().pow(2) + &(&c(3) * &x())) + &c(2);
        let (q, r) = poly_divmod(&f, &(&x() + &c(1))).unwrap();
        assert_eq!(q, &x() + &c(2));
        assert!(r.is_zero());
        let (q, r) = poly_divmod(&f, &c(2)).unwrap();
        assert_eq!(&q * &c(2), f);
        assert!(r.is_zero());
    }

    #[test]
    fn errors() {
        let xy = &x() * &Polynomial::var("y");
        assert!(matches!(poly_divmod(&xy, &x()), Err(SymbolicError::NotUnivariate(_))));
        assert!(matches!(
            poly_divmod(&x(), &Polynomial::zero()),
            Err(SymbolicError::DivisionByZero)
        ));
    }
}
