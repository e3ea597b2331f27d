use num_rational::BigRational;
use num_traits::Zero;

use super::{Dimension, Exponents, UnitError, UnitRegistry};

/// Finds rational exponents `x` with `sum x_i * basis_i = target`.
///
/// The system is solved by Gauss-Jordan elimination over the rationals.
/// Only a unique solution is returned.
pub fn solve_dimensions(
    reg: &UnitRegistry,
    target: &Dimension,
    basis: &[Dimension],
) -> Result<Exponents, UnitError> {
    if basis.is_empty() {
        return Err(UnitError::EmptyBasis);
    }
    let mut classes: Vec<&str> = Vec::new();
    for d in basis.iter().chain([target]) {
        for c in d.classes() {
            if !reg.is_class(c) {
                return Err(UnitError::UnknownUnit(c.to_string()));
            }
            if !classes.contains(&c) {
                classes.push(c);
            }
        }
    }
    let n = basis.len();
    // augmented matrix: one row per class, one column per basis vector
    let mut rows: Vec<Vec<BigRational>> = classes
        .iter()
        .map(|c| {
            basis
                .iter()
                .map(|d| rat(d.exponent(c)))
                .chain([rat(target.exponent(c))])
                .collect()
        })
        .collect();

    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let k = row[col].clone();
                for (v, p) in row.iter_mut().zip(&pivot) {
                    *v -= &k * p;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[n].is_zero()) {
        return Err(UnitError::NoSolution);
    }
    if pivots.len() < n {
        return Err(UnitError::Underdetermined(n - pivots.len()));
    }
    let mut x = vec![BigRational::zero(); n];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = rows[i][n].clone();
    }
    Ok(x)
}

fn rat(v: i32) -> BigRational {
    BigRational::from_integer(v.into())
}
