use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{ExactScalar, ScalarError};

/// Trial division bound. Cofactors below `BOUND^3` with no prime factor
/// under `BOUND` are either prime, a product of two distinct primes, or a
/// prime square, so they can be classified exactly.
const BOUND: u32 = 100_000;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = BOUND as usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= n {
            if sieve[i] {
                let mut j = i * i;
                while j <= n {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        (2..=n).filter(|&k| sieve[k]).map(|k| k as u32).collect()
    })
}

/// Splits `n` as `outside^2 * inside` with `inside` square-free.
pub fn square_free_split(n: &BigUint) -> Result<(BigUint, BigUint), ScalarError> {
    if n.is_zero() {
        return Ok((BigUint::one(), BigUint::zero()));
    }
    let mut rest = n.clone();
    let mut outside = BigUint::one();
    let mut inside = BigUint::one();
    for &p in small_primes() {
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut count = 0u32;
        while (&rest % p).is_zero() {
            rest /= p;
            count += 1;
        }
        if count > 0 {
            outside *= pb.pow(count / 2);
            if count % 2 == 1 {
                inside *= &pb;
            }
        }
    }
    if rest.is_one() {
        return Ok((outside, inside));
    }
    let root = rest.sqrt();
    if &root * &root == rest {
        outside *= root;
        return Ok((outside, inside));
    }
    let bound = BigUint::from(BOUND);
    let small_factor_done = {
        // trial division passed sqrt(rest), or rest is below BOUND^3
        let last = BigUint::from(*small_primes().last().unwrap());
        &last * &last >= rest || rest < bound.pow(3)
    };
    if !small_factor_done {
        return Err(ScalarError::RadicandTooLarge(n.to_string()));
    }
    inside *= rest;
    Ok((outside, inside))
}

pub(crate) fn is_square_free(n: &BigUint) -> bool {
    match square_free_split(n) {
        Ok((outside, _)) => outside.is_one(),
        Err(_) => false,
    }
}

/// `sqrt(n)` as `q * sqrt(d)` with `d` square-free.
pub fn normalize_sqrt(n: &BigRational) -> Result<ExactScalar, ScalarError> {
    if n.is_negative() {
        return Err(ScalarError::NegativeRadicand(super::fmt_rational(n, false)));
    }
    if n.is_zero() {
        return Ok(ExactScalar::zero());
    }
    // sqrt(p/q) = sqrt(p*q)/q
    let p = n.numer().to_biguint().unwrap();
    let q = n.denom().to_biguint().unwrap();
    let (outside, inside) = square_free_split(&(&p * &q))?;
    let coeff = BigRational::new(BigInt::from(outside), BigInt::from(q));
    Ok(ExactScalar::single(coeff, inside, 0, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn extracts_square_factors() {
        assert_eq!(normalize_sqrt(&rat(12, 1)).unwrap().to_string(), "2*sqrt(3)");
        assert_eq!(normalize_sqrt(&rat(9, 4)).unwrap().to_string(), "3/2");
        assert_eq!(normalize_sqrt(&rat(3, 1)).unwrap().to_string(), "sqrt(3)");
        assert_eq!(normalize_sqrt(&rat(1, 2)).unwrap().to_string(), "1/2*sqrt(2)");
        assert!(matches!(
            normalize_sqrt(&rat(-1, 1)),
            Err(ScalarError::NegativeRadicand(_))
        ));
    }

    #[test]
    fn large_prime_square_is_detected() {
        // 1_000_003 is prime and above the trial-division bound
        let p = BigUint::from(1_000_003u64);
        let (out, ins) = square_free_split(&(&p * &p * 6u32)).unwrap();
        assert_eq!(out, p);
        assert_eq!(ins, BigUint::from(6u32));
    }

    #[test]
    fn square_free_check() {
        assert!(is_square_free(&BigUint::from(30u32)));
        assert!(!is_square_free(&BigUint::from(18u32)));
        assert!(is_square_free(&BigUint::from(1u32)));
    }
}
