use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed};

use super::expr::is_identifier;
use super::{Dimension, Quantity, UnitError, UnitExpr};

/// SI base atoms preloaded into [`UnitRegistry::new`].
pub const SI_BASE: [&str; 7] = ["m", "kg", "s", "A", "K", "mol", "cd"];

#[derive(Debug, Clone, PartialEq, Eq)]
struct Atom {
    /// Representative atom of the commensurability class.
    class: String,
    /// `1 atom = factor * class`.
    factor: BigRational,
    builtin: bool,
    /// A builtin atom may be claimed once by an explicit `unit` declaration.
    claimed: bool,
}

/// Declared unit atoms and the exchange rates between them.
///
/// Registries are values: every declaration returns a new registry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitRegistry {
    atoms: BTreeMap<String, Atom>,
}

impl Default for UnitRegistry {
    fn default() -> Self {
        Self::new()
    }
}

impl UnitRegistry {
    /// No atoms at all.
    pub fn empty() -> Self {
        UnitRegistry {
            atoms: BTreeMap::new(),
        }
    }

    /// SI base atoms plus `min`, with `1 min == 60 s`.
    pub fn new() -> Self {
        let mut reg = Self::empty();
        for name in SI_BASE.iter().copied().chain(["min"]) {
            reg.atoms.insert(
                name.to_string(),
                Atom {
                    class: name.to_string(),
                    factor: BigRational::one(),
                    builtin: true,
                    claimed: false,
                },
            );
        }
        reg.merge("min", "s", BigRational::from_integer(60.into()))
            .expect("builtin rates are consistent");
        reg
    }

    pub fn contains(&self, name: &str) -> bool {
        self.atoms.contains_key(name)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &str> {
        self.atoms.keys().map(String::as_str)
    }

    pub fn is_builtin(&self, name: &str) -> bool {
        self.atoms.get(name).is_some_and(|a| a.builtin)
    }

    fn atom(&self, name: &str) -> Result<&Atom, UnitError> {
        self.atoms
            .get(name)
            .ok_or_else(|| UnitError::UnknownUnit(name.to_string()))
    }

    /// Representative atom naming the commensurability class of `name`.
    pub fn class_of(&self, name: &str) -> Result<&str, UnitError> {
        Ok(&self.atom(name)?.class)
    }

    /// `1 name = factor * class_of(name)`.
    pub fn factor(&self, name: &str) -> Result<&BigRational, UnitError> {
        Ok(&self.atom(name)?.factor)
    }

    pub fn is_class(&self, class: &str) -> bool {
        self.atoms.get(class).is_some_and(|a| a.class == class)
    }

    /// Adds `name` as a new atom in its own class. A builtin atom can be
    /// declared once without error; declaring it again is a duplicate.
    pub fn declare_unit(&self, name: &str) -> Result<UnitRegistry, UnitError> {
        if !is_identifier(name) {
            return Err(UnitError::InvalidName(name.to_string()));
        }
        let mut next = self.clone();
        match next.atoms.get_mut(name) {
            Some(atom) if atom.builtin && !atom.claimed => {
                atom.claimed = true;
            }
            Some(_) => return Err(UnitError::DuplicateUnit(name.to_string())),
            None => {
                next.atoms.insert(
                    name.to_string(),
                    Atom {
                        class: name.to_string(),
                        factor: BigRational::one(),
                        builtin: false,
                        claimed: true,
                    },
                );
            }
        }
        Ok(next)
    }

    /// Removes an atom. Other members of its class are re-rooted.
    pub fn without_unit(&self, name: &str) -> Result<UnitRegistry, UnitError> {
        let removed = self.atom(name)?.clone();
        let mut next = self.clone();
        next.atoms.remove(name);
        if removed.class == name {
            let members: Vec<String> = next
                .atoms
                .iter()
                .filter(|(_, a)| a.class == name)
                .map(|(k, _)| k.clone())
                .collect();
            if let Some(new_rep) = members.first() {
                let base = next.atoms[new_rep].factor.clone();
                for m in &members {
                    let atom = next.atoms.get_mut(m).unwrap();
                    atom.class = new_rep.clone();
                    atom.factor = &atom.factor / &base;
                }
            }
        }
        Ok(next)
    }

    /// Declares `lhs == rhs`, e.g. `1 ducat == 5 piastre`, merging the two
    /// atoms' classes.
    pub fn declare_rate(&self, lhs: &Quantity, rhs: &Quantity) -> Result<UnitRegistry, UnitError> {
        let (a, x) = rate_side(lhs)?;
        let (b, y) = rate_side(rhs)?;
        self.atom(&x)?;
        self.atom(&y)?;
        // a x = b y, so 1 x = (b/a) y
        let mut next = self.clone();
        next.merge(&x, &y, b / a)?;
        Ok(next)
    }

    /// Records `1 x = ratio * y`.
    fn merge(&mut self, x: &str, y: &str, ratio: BigRational) -> Result<(), UnitError> {
        let ax = self.atoms[x].clone();
        let ay = self.atoms[y].clone();
        if ax.class == ay.class {
            // 1 x = fx rep and 1 y = fy rep, so the implied ratio is fx / fy
            let implied = &ax.factor / &ay.factor;
            if implied != ratio {
                return Err(UnitError::InconsistentRate {
                    lhs: x.to_string(),
                    rhs: y.to_string(),
                    existing: crate::scalar::fmt_rational(&implied, false),
                    declared: crate::scalar::fmt_rational(&ratio, false),
                });
            }
            return Ok(());
        }
        // Keep the lexicographically smaller representative.
        let (keep, fold, fold_ratio) = if ax.class <= ay.class {
            // 1 y = (1/ratio) x = fx/ratio keep
            (ax.class.clone(), ay.clone(), ax.factor / (ratio * &ay.factor))
        } else {
            (ay.class.clone(), ax.clone(), ay.factor * ratio / &ax.factor)
        };
        // `fold_ratio` is the number of `keep` units in one old representative.
        for atom in self.atoms.values_mut() {
            if atom.class == fold.class {
                atom.class = keep.clone();
                atom.factor = &atom.factor * &fold_ratio;
            }
        }
        Ok(())
    }

    /// Re-keys exponents by commensurability class.
    pub fn dimension_of(&self, unit: &UnitExpr) -> Result<Dimension, UnitError> {
        let mut dim = Dimension::dimensionless();
        for (name, exp) in unit.exponents() {
            dim.add_exponent(self.class_of(name)?, exp);
        }
        Ok(dim)
    }

    /// How many class-representative units one `unit` is worth.
    pub fn to_base_factor(&self, unit: &UnitExpr) -> Result<BigRational, UnitError> {
        let mut f = BigRational::one();
        for (name, exp) in unit.exponents() {
            f *= pow_rational(self.factor(name)?, exp);
        }
        Ok(f)
    }

    /// The atom used for `class` when combining the given units: the finest
    /// one present (smallest factor), ties broken by name.
    fn finest_in(&self, class: &str, units: &[&UnitExpr]) -> Result<String, UnitError> {
        let mut best: Option<(&BigRational, &str)> = None;
        for u in units {
            for (name, _) in u.exponents() {
                let atom = self.atom(name)?;
                if atom.class != class {
                    continue;
                }
                let cand = (&atom.factor, name);
                best = match best {
                    Some(b) if (b.0, b.1) <= (cand.0, cand.1) => Some(b),
                    _ => Some(cand),
                };
            }
        }
        Ok(best.expect("class taken from one of the units").1.to_string())
    }

    /// Rewrites every unit over a common choice of atom per class.
    ///
    /// Returns, for each input, the rewritten unit and the factor by which
    /// a magnitude in the old unit must be multiplied.
    pub fn align(&self, units: &[&UnitExpr]) -> Result<Vec<(UnitExpr, BigRational)>, UnitError> {
        let mut chosen: BTreeMap<String, String> = BTreeMap::new();
        for u in units {
            for (name, _) in u.exponents() {
                let class = self.class_of(name)?.to_string();
                if let Entry::Vacant(slot) = chosen.entry(class) {
                    let atom = self.finest_in(slot.key(), units)?;
                    slot.insert(atom);
                }
            }
        }
        units
            .iter()
            .map(|u| {
                let mut out = UnitExpr::dimensionless();
                let mut factor = BigRational::one();
                for (name, exp) in u.exponents() {
                    let atom = self.atom(name)?;
                    let target = &chosen[&atom.class];
                    let ratio = &atom.factor / self.factor(target)?;
                    factor *= pow_rational(&ratio, exp);
                    out.add_exponent(target, exp);
                }
                Ok((out, factor))
            })
            .collect()
    }

    /// Converts a quantity to `target`, which must have the same dimension.
    pub fn convert(&self, q: &Quantity, target: &UnitExpr) -> Result<Quantity, UnitError> {
        let from = self.dimension_of(&q.unit)?;
        let to = self.dimension_of(target)?;
        if from != to {
            return Err(UnitError::IncommensurableConversion {
                from: q.unit.clone(),
                to: target.clone(),
            });
        }
        let ratio = self.to_base_factor(&q.unit)? / self.to_base_factor(target)?;
        Ok(Quantity::new(
            &q.magnitude * &crate::scalar::ExactScalar::from_rational(ratio),
            target.clone(),
        ))
    }
}

fn rate_side(q: &Quantity) -> Result<(BigRational, String), UnitError> {
    let mut atoms = q.unit.exponents();
    let single = match (atoms.next(), atoms.next()) {
        (Some((name, 1)), None) => name.to_string(),
        _ => return Err(UnitError::RateNotSingleAtom(q.unit.clone())),
    };
    let mag = q
        .magnitude
        .as_rational()
        .ok_or_else(|| UnitError::NonRationalRate(q.magnitude.to_string()))?;
    if !mag.is_positive() {
        return Err(UnitError::NonRationalRate(q.magnitude.to_string()));
    }
    Ok((mag, single))
}

pub(crate) fn pow_rational(q: &BigRational, exp: i32) -> BigRational {
    let base = if exp < 0 { q.recip() } else { q.clone() };
    let mut out = BigRational::one();
    for _ in 0..exp.unsigned_abs() {
        out *= &base;
    }
    out
}
