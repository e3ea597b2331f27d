use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Product of unit atoms with nonzero integer exponents. Empty means
/// dimensionless.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UnitExpr {
    exponents: BTreeMap<String, i32>,
}

impl UnitExpr {
    pub fn dimensionless() -> Self {
        Self::default()
    }

    pub fn atom(name: &str) -> Self {
        Self::default().with(name, 1)
    }

    /// Multiplies in `name^exp`.
    pub fn with(mut self, name: &str, exp: i32) -> Self {
        self.add_exponent(name, exp);
        self
    }

    pub(crate) fn add_exponent(&mut self, name: &str, exp: i32) {
        if exp == 0 {
            return;
        }
        let slot = self.exponents.entry(name.to_string()).or_insert(0);
        *slot += exp;
        if *slot == 0 {
            self.exponents.remove(name);
        }
    }

    pub fn is_dimensionless(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> impl Iterator<Item = (&str, i32)> + Clone {
        self.exponents.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn exponent(&self, name: &str) -> i32 {
        self.exponents.get(name).copied().unwrap_or(0)
    }

    pub fn mul(&self, other: &UnitExpr) -> UnitExpr {
        let mut out = self.clone();
        for (k, v) in other.exponents() {
            out.add_exponent(k, v);
        }
        out
    }

    pub fn div(&self, other: &UnitExpr) -> UnitExpr {
        self.mul(&other.powi(-1))
    }

    pub fn powi(&self, k: i32) -> UnitExpr {
        let mut out = UnitExpr::default();
        for (name, e) in self.exponents() {
            out.add_exponent(name, e * k);
        }
        out
    }

    /// Halves every exponent, or `None` if one is odd.
    pub fn half(&self) -> Option<UnitExpr> {
        let mut out = UnitExpr::default();
        for (name, e) in self.exponents() {
            if e % 2 != 0 {
                return None;
            }
            out.add_exponent(name, e / 2);
        }
        Some(out)
    }

    /// Parses `atom(^int)?((*|/)atom(^int)?)*`, left to right.
    pub fn parse(s: &str) -> Option<UnitExpr> {
        let mut out = UnitExpr::default();
        let mut sign = 1;
        let mut rest = s.trim();
        if rest.is_empty() {
            return Some(out);
        }
        loop {
            let end = rest.find(['*', '/']).unwrap_or(rest.len());
            let piece = rest[..end].trim();
            let (name, exp) = match piece.split_once('^') {
                Some((n, e)) => (n.trim(), e.trim().parse::<i32>().ok()?),
                None => (piece, 1),
            };
            if !is_identifier(name) {
                return None;
            }
            out.add_exponent(name, sign * exp);
            if end == rest.len() {
                return Some(out);
            }
            sign = if rest[end..].starts_with('*') { 1 } else { -1 };
            rest = &rest[end + 1..];
        }
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

fn write_factor(f: &mut fmt::Formatter<'_>, name: &str, exp: i32) -> fmt::Result {
    if exp == 1 {
        write!(f, "{name}")
    } else {
        write!(f, "{name}^{exp}")
    }
}

/// `kg*m/s^2`; all-negative expressions print as `s^-1`.
pub(crate) fn fmt_exponents<'a>(
    f: &mut fmt::Formatter<'_>,
    items: impl Iterator<Item = (&'a str, i32)> + Clone,
) -> fmt::Result {
    let has_numerator = items.clone().any(|(_, e)| e > 0);
    if !has_numerator {
        for (i, (name, e)) in items.enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write_factor(f, name, e)?;
        }
        return Ok(());
    }
    for (i, (name, e)) in items.clone().filter(|(_, e)| *e > 0).enumerate() {
        if i > 0 {
            f.write_str("*")?;
        }
        write_factor(f, name, e)?;
    }
    for (name, e) in items.filter(|(_, e)| *e < 0) {
        f.write_str("/")?;
        write_factor(f, name, -e)?;
    }
    Ok(())
}

impl fmt::Display for UnitExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_exponents(f, self.exponents())
    }
}

/// Integer exponents over commensurability classes, each class named by its
/// representative atom.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dimension {
    exponents: BTreeMap<String, i32>,
}

impl Dimension {
    pub fn dimensionless() -> Self {
        Self::default()
    }

    pub fn of_class(class: &str) -> Self {
        Self::from_pairs([(class, 1)])
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, i32)>) -> Self {
        let mut d = Dimension::default();
        for (k, v) in pairs {
            d.add_exponent(k, v);
        }
        d
    }

    pub(crate) fn add_exponent(&mut self, class: &str, exp: i32) {
        if exp == 0 {
            return;
        }
        let slot = self.exponents.entry(class.to_string()).or_insert(0);
        *slot += exp;
        if *slot == 0 {
            self.exponents.remove(class);
        }
    }

    pub fn is_dimensionless(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> impl Iterator<Item = (&str, i32)> + Clone {
        self.exponents.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn exponent(&self, class: &str) -> i32 {
        self.exponents.get(class).copied().unwrap_or(0)
    }

    pub fn classes(&self) -> impl Iterator<Item = &str> {
        self.exponents.keys().map(String::as_str)
    }

    pub fn mul(&self, other: &Dimension) -> Dimension {
        let mut out = self.clone();
        for (k, v) in other.exponents() {
            out.add_exponent(k, v);
        }
        out
    }

    pub fn div(&self, other: &Dimension) -> Dimension {
        self.mul(&other.powi(-1))
    }

    pub fn powi(&self, k: i32) -> Dimension {
        let mut out = Dimension::default();
        for (c, e) in self.exponents() {
            out.add_exponent(c, e * k);
        }
        out
    }

    pub fn half(&self) -> Option<Dimension> {
        let mut out = Dimension::default();
        for (c, e) in self.exponents() {
            if e % 2 != 0 {
                return None;
            }
            out.add_exponent(c, e / 2);
        }
        Some(out)
    }

    pub fn is_disjoint(&self, other: &Dimension) -> bool {
        self.classes().all(|c| other.exponent(c) == 0)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_dimensionless() {
            return f.write_str("1");
        }
        fmt_exponents(f, self.exponents())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_units() {
        let cpm = UnitExpr::atom("cherry").with("min", -1);
        assert_eq!(cpm.to_string(), "cherry/min");
        let acc = UnitExpr::atom("m").with("s", -2);
        assert_eq!(acc.to_string(), "m/s^2");
        assert_eq!(UnitExpr::atom("m").with("m", 1).to_string(), "m^2");
        assert_eq!(UnitExpr::atom("s").powi(-2).to_string(), "s^-2");
        assert_eq!(UnitExpr::atom("kg").with("m", 1).with("s", -2).to_string(), "kg*m/s^2");
    }

    #[test]
    fn parses_units() {
        assert_eq!(UnitExpr::parse("leg/head"), Some(UnitExpr::atom("leg").with("head", -1)));
        assert_eq!(UnitExpr::parse("m/s^2"), Some(UnitExpr::atom("m").with("s", -2)));
        assert_eq!(UnitExpr::parse("s^-2"), Some(UnitExpr::dimensionless().with("s", -2)));
        assert_eq!(UnitExpr::parse(""), Some(UnitExpr::dimensionless()));
        assert_eq!(UnitExpr::parse("m//s"), None);
        for u in ["cherry/min", "kg*m/s^2", "m^2", "s^-2", "a/b/c"] {
            let parsed = UnitExpr::parse(u).unwrap();
            assert_eq!(UnitExpr::parse(&parsed.to_string()), Some(parsed));
        }
    }

    #[test]
    fn zero_exponents_are_dropped() {
        let u = UnitExpr::atom("apple").div(&UnitExpr::atom("apple"));
        assert!(u.is_dimensionless());
        assert_eq!(UnitExpr::atom("m").half(), None);
    }
}
