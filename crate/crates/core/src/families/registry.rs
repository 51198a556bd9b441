use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::{enumerate_multiplicative, FnRule, ScalarFunction, MULTIPLICATIVE_ORDER_BOUND};
use crate::scalar::c;
use crate::semigroup::Carrier;

/// A function named in a descriptor: the k-th enumerated multiplicative
/// function of a finite carrier, a registry or built-in name, or an inline
/// function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionRef {
    Character { character: usize },
    Named { name: String },
    Inline(ScalarFunction),
}

impl FunctionRef {
    pub fn named(name: &str) -> Self {
        FunctionRef::Named { name: name.to_string() }
    }
}

impl From<ScalarFunction> for FunctionRef {
    fn from(f: ScalarFunction) -> Self {
        FunctionRef::Inline(f)
    }
}

/// Names available on every carrier of a given kind.
///
/// * everywhere: `one`, `zero`
/// * finite carriers: `chi0`, `chi1`, … in the enumeration order
/// * naturals: `parity`, `a<p>` (multiplicity of the prime p)
pub fn builtin_function(s: &Carrier, name: &str, exact: bool) -> Result<Option<ScalarFunction>> {
    let kind = s.name();
    match name {
        "one" => Some(ScalarFunction::constant(c(1.0, 0.0))),
        "zero" => Some(ScalarFunction::constant(c(0.0, 0.0))),
        "parity" if kind == "naturals-from-2" => Some(ScalarFunction::Rule(FnRule::Parity)),
        _ if kind == "naturals-from-2" && name.starts_with('a') => match name[1..].parse::<u64>() {
            Ok(prime) => Some(ScalarFunction::Rule(FnRule::PAdicCount { prime })),
            Err(_) => None,
        },
        _ if s.is_finite() && name.starts_with("chi") => match name[3..].parse::<usize>() {
            Ok(k) => Some(character(s, k, exact)?),
            Err(_) => None,
        },
        _ => None,
    }
    .map(|f| densify(s, f, exact))
    .transpose()
}

fn character(s: &Carrier, k: usize, exact: bool) -> Result<ScalarFunction> {
    let chars = enumerate_multiplicative(s.finite()?, MULTIPLICATIVE_ORDER_BOUND)?;
    let ch = chars.get(k).ok_or_else(|| Error::UnknownName(format!("character {k}")))?;
    Ok(if exact { ch.to_exact_function() } else { ch.to_function() })
}

/// Finite carriers get dense values (exact ones in exact mode).
fn densify(s: &Carrier, f: ScalarFunction, exact: bool) -> Result<ScalarFunction> {
    if !s.is_finite() {
        return Ok(f);
    }
    Ok(match (exact, &f) {
        (true, ScalarFunction::Exact { .. }) | (false, ScalarFunction::Dense(_)) => f,
        (true, _) => ScalarFunction::exact(f.exact_values(s)?),
        (false, _) => ScalarFunction::Dense(f.dense_values(s)?),
    })
}

/// Named functions of a session.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Registry {
    functions: BTreeMap<String, ScalarFunction>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: &str, f: ScalarFunction) -> Result<()> {
        if self.functions.contains_key(name) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        self.functions.insert(name.to_string(), f);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&ScalarFunction> {
        self.functions.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.functions.keys().map(String::as_str)
    }

    /// Resolves a reference; registry names shadow built-in ones.
    pub fn resolve(&self, s: &Carrier, r: &FunctionRef, exact: bool) -> Result<ScalarFunction> {
        match r {
            FunctionRef::Character { character: k } => character(s, *k, exact),
            FunctionRef::Named { name } => match self.get(name) {
                Some(f) => densify(s, f.clone(), exact),
                None => builtin_function(s, name, exact)?.ok_or_else(|| Error::UnknownName(name.clone())),
            },
            FunctionRef::Inline(f) => densify(s, f.clone(), exact),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::{finite_fixture, Element, FixtureId};

    #[test]
    fn names_are_unique() {
        let mut reg = Registry::new();
        reg.register("f", ScalarFunction::constant(c(1.0, 0.0))).unwrap();
        assert!(matches!(reg.register("f", ScalarFunction::constant(c(2.0, 0.0))), Err(Error::DuplicateName(_))));
    }

    #[test]
    fn resolves_builtins() {
        let reg = Registry::new();
        let c3 = Carrier::Finite(finite_fixture("c3").unwrap());
        let chi = reg.resolve(&c3, &FunctionRef::named("chi2"), false).unwrap();
        assert_eq!(chi, reg.resolve(&c3, &FunctionRef::Character { character: 2 }, false).unwrap());
        assert!(matches!(reg.resolve(&c3, &FunctionRef::Character { character: 4 }, true), Err(Error::UnknownName(_))));
        let nat = FixtureId::NaturalsFrom2.carrier(None).unwrap();
        let p = reg.resolve(&nat, &FunctionRef::named("parity"), false).unwrap();
        assert_eq!(p.eval(&nat, &Element::Nat(7)).unwrap(), c(1.0, 0.0));
        assert!(reg.resolve(&nat, &FunctionRef::named("nope"), false).is_err());
        let json = serde_json::to_string(&FunctionRef::Character { character: 1 }).unwrap();
        assert_eq!(json, r#"{"character":1}"#);
        let back: FunctionRef = serde_json::from_str(r#"{"name":"parity"}"#).unwrap();
        assert_eq!(back, FunctionRef::named("parity"));
    }
}
