//! Complex-valued functions on a carrier.
//!
//! Finite carriers use dense value vectors (float or exact); procedural
//! carriers use small expression trees of named rules. Rule evaluation is
//! carried out in double-double precision so that identity checks on
//! large-magnitude exponentials keep absolute accuracy.

mod character;
mod nullsets;
mod ops;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::scalar::{c, DdComplex, C64};
use crate::semigroup::{Carrier, Element, Involution};

pub use character::{enumerate_multiplicative, root_of_unity_c64, Character, MULTIPLICATIVE_ORDER_BOUND};
pub use nullsets::{check_pchi_lemma, null_sets, NullSets, PchiLemmaReport};
pub use ops::{
    additive_basis, even_part, is_abelian_fn, linear_combination, is_additive, is_central, is_even, is_multiplicative,
    is_multiplicative_exact, is_odd, odd_part, star, AdditiveFunction, MultiplicativeFunction,
};

/// A function S → ℂ.
///
/// Serializes as a JSON array of `[re, im]` pairs (dense), as
/// `{"exact": [...]}` (exact dense values) or as a rule object such as
/// `{"rule": "exp", "lambda": [0.0, 1.0]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarFunction {
    Dense(Vec<C64>),
    Exact { exact: Vec<Cyclotomic> },
    Rule(FnRule),
}

/// Named evaluation rules for procedural carriers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum FnRule {
    Const { value: C64 },
    /// x ↦ e^{iλx} on the real line.
    Exp { lambda: C64 },
    /// x ↦ δ·x on the real line.
    RealLinear { slope: C64 },
    /// (x, y, z) ↦ e^{ax+by} on H₃.
    HeisExp { a: C64, b: C64 },
    /// (x, y, z) ↦ ax + by on H₃.
    HeisLinear { a: C64, b: C64 },
    /// 1 on odd naturals, 0 on even ones.
    Parity,
    /// Multiplicity of `prime` in the factorization.
    PAdicCount { prime: u64 },
    /// n ↦ n^s on the naturals.
    Power { exponent: C64 },
    /// Listed values, zero elsewhere.
    Sparse { entries: Vec<(Element, C64)> },
    /// inner ∘ σ
    Star { sigma: Involution, inner: Box<ScalarFunction> },
    Linear { terms: Vec<(C64, ScalarFunction)> },
    Product { factors: Vec<ScalarFunction> },
    /// χA off the null set of χ, ρ on P_χ, 0 on the rest of I_χ.
    /// `seeds` lists P_χ within the window; elements outside the window
    /// belong to P_χ when they factor as (P_χ)·(S∖I_χ) or (S∖I_χ)·(P_χ).
    NullSplit {
        chi: Box<ScalarFunction>,
        additive: Box<ScalarFunction>,
        rho: Box<ScalarFunction>,
        seeds: Vec<Element>,
    },
}

fn dd_real(x: f64) -> TwoFloat {
    TwoFloat::from(x)
}

/// (u + iv)·t exactly representable as double-double.
fn dd_scale(z: C64, t: f64) -> DdComplex {
    DdComplex {
        re: TwoFloat::new_mul(z.re, t),
        im: TwoFloat::new_mul(z.im, t),
    }
}

impl ScalarFunction {
    pub fn constant(value: C64) -> Self {
        ScalarFunction::Rule(FnRule::Const { value })
    }

    pub fn zero_dense(n: usize) -> Self {
        ScalarFunction::Dense(vec![c(0.0, 0.0); n])
    }

    pub fn exact(values: Vec<Cyclotomic>) -> Self {
        ScalarFunction::Exact { exact: values }
    }

    pub fn linear(terms: Vec<(C64, ScalarFunction)>) -> Self {
        ScalarFunction::Rule(FnRule::Linear { terms })
    }

    pub fn is_dense(&self) -> bool {
        !matches!(self, ScalarFunction::Rule(_))
    }

    pub fn eval(&self, s: &Carrier, x: &Element) -> Result<C64> {
        Ok(self.eval_dd(s, x)?.to_c64())
    }

    pub fn eval_dd(&self, s: &Carrier, x: &Element) -> Result<DdComplex> {
        let shape = |what: &str| Error::FunctionShape(format!("{what} cannot be evaluated at {x}"));
        match self {
            ScalarFunction::Dense(v) => match x {
                Element::Index(i) => v.get(*i).map(|z| DdComplex::from(*z)).ok_or_else(|| shape("dense function")),
                _ => Err(shape("dense function")),
            },
            ScalarFunction::Exact { exact } => match x {
                Element::Index(i) => exact
                    .get(*i)
                    .map(|z| DdComplex::from(z.to_c64()))
                    .ok_or_else(|| shape("exact function")),
                _ => Err(shape("exact function")),
            },
            ScalarFunction::Rule(rule) => rule.eval_dd(s, x),
        }
    }

    /// Values at every element of a finite carrier.
    pub fn dense_values(&self, s: &Carrier) -> Result<Vec<C64>> {
        match self {
            ScalarFunction::Dense(v) => {
                let n = s.finite()?.order();
                if v.len() != n {
                    return Err(Error::FunctionShape(format!("{} values for a carrier of order {n}", v.len())));
                }
                Ok(v.clone())
            }
            _ => (0..s.finite()?.order()).map(|i| self.eval(s, &Element::Index(i))).collect(),
        }
    }

    /// Exact values, for exact functions and for dense floats (read as the
    /// exact binary values they store).
    pub fn exact_values(&self, s: &Carrier) -> Result<Vec<Cyclotomic>> {
        match self {
            ScalarFunction::Exact { exact } => Ok(exact.clone()),
            ScalarFunction::Dense(v) => Ok(v.iter().map(|z| Cyclotomic::from_c64(*z)).collect()),
            ScalarFunction::Rule(_) => Ok(self.dense_values(s)?.into_iter().map(Cyclotomic::from_c64).collect()),
        }
    }

    /// Window values as a dense vector (in window order).
    pub fn window_values(&self, s: &Carrier) -> Result<Vec<C64>> {
        s.window().iter().map(|x| self.eval(s, x)).collect()
    }
}

impl FnRule {
    fn eval_dd(&self, s: &Carrier, x: &Element) -> Result<DdComplex> {
        let shape = |what: &str| Error::FunctionShape(format!("rule `{what}` cannot be evaluated at {x}"));
        Ok(match self {
            FnRule::Const { value } => DdComplex::from(*value),
            FnRule::Exp { lambda } => {
                let Element::Real(t) = x else { return Err(shape("exp")) };
                // iλt = −Im(λ)t + i·Re(λ)t
                dd_scale(c(-lambda.im, lambda.re), *t).exp()
            }
            FnRule::RealLinear { slope } => {
                let Element::Real(t) = x else { return Err(shape("real_linear")) };
                dd_scale(*slope, *t)
            }
            FnRule::HeisExp { a, b } => {
                let Element::Heis([hx, hy, _]) = x else { return Err(shape("heis_exp")) };
                (dd_scale(*a, *hx as f64) + dd_scale(*b, *hy as f64)).exp()
            }
            FnRule::HeisLinear { a, b } => {
                let Element::Heis([hx, hy, _]) = x else { return Err(shape("heis_linear")) };
                dd_scale(*a, *hx as f64) + dd_scale(*b, *hy as f64)
            }
            FnRule::Parity => {
                let Element::Nat(n) = x else { return Err(shape("parity")) };
                DdComplex {
                    re: dd_real((n % 2) as f64),
                    im: dd_real(0.0),
                }
            }
            FnRule::PAdicCount { prime } => {
                let Element::Nat(n) = x else { return Err(shape("p_adic_count")) };
                if *prime < 2 {
                    return Err(shape("p_adic_count"));
                }
                let (mut m, mut k) = (*n, 0u32);
                while m > 0 && m % prime == 0 {
                    m /= prime;
                    k += 1;
                }
                DdComplex::from(c(k as f64, 0.0))
            }
            FnRule::Power { exponent } => {
                let Element::Nat(n) = x else { return Err(shape("power")) };
                let ln = crate::transcendental::ln(TwoFloat::from(*n as f64));
                let e = DdComplex::from(*exponent);
                DdComplex { re: e.re * ln, im: e.im * ln }.exp()
            }
            FnRule::Sparse { entries } => entries
                .iter()
                .find(|(e, _)| e.approx_eq(x))
                .map(|(_, v)| DdComplex::from(*v))
                .unwrap_or_default(),
            FnRule::Star { sigma, inner } => inner.eval_dd(s, &sigma.apply(x)?)?,
            FnRule::Linear { terms } => {
                let mut acc = DdComplex::zero();
                for (coef, term) in terms {
                    acc = acc + DdComplex::from(*coef) * term.eval_dd(s, x)?;
                }
                acc
            }
            FnRule::Product { factors } => {
                let mut acc = DdComplex::one();
                for f in factors {
                    acc = acc * f.eval_dd(s, x)?;
                }
                acc
            }
            FnRule::NullSplit { chi, additive, rho, seeds } => {
                let chi_x = chi.eval_dd(s, x)?;
                if chi_x != DdComplex::zero() {
                    chi_x * additive.eval_dd(s, x)?
                } else if in_extended_p(s, chi, seeds, x, 0)? {
                    rho.eval_dd(s, x)?
                } else {
                    DdComplex::zero()
                }
            }
        })
    }
}

fn is_null(s: &Carrier, chi: &ScalarFunction, x: &Element) -> Result<bool> {
    Ok(chi.eval(s, x)? == c(0.0, 0.0))
}

/// x ∈ I_χ² decided from the carrier's factorizations, or from the window
/// when the carrier cannot factor.
pub(crate) fn in_null_square(s: &Carrier, chi: &ScalarFunction, x: &Element) -> Result<bool> {
    match s.factor_pairs(x) {
        Some(pairs) => {
            for (a, b) in pairs {
                if is_null(s, chi, &a)? && is_null(s, chi, &b)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        None => {
            let nulls: Vec<Element> = s
                .window()
                .into_iter()
                .filter(|w| is_null(s, chi, w).unwrap_or(false))
                .collect();
            for a in &nulls {
                for b in &nulls {
                    if s.compose(a, b)?.approx_eq(x) {
                        return Ok(true);
                    }
                }
            }
            Ok(false)
        }
    }
}

fn in_extended_p(s: &Carrier, chi: &ScalarFunction, seeds: &[Element], x: &Element, depth: usize) -> Result<bool> {
    if seeds.contains(x) {
        return Ok(true);
    }
    if s.in_window(x) || depth > 64 || !is_null(s, chi, x)? {
        return Ok(false);
    }
    if in_null_square(s, chi, x)? {
        return Ok(false);
    }
    let Some(pairs) = s.factor_pairs(x) else { return Ok(false) };
    for (a, b) in pairs {
        let left = !is_null(s, chi, &b)? && in_extended_p(s, chi, seeds, &a, depth + 1)?;
        if left || (!is_null(s, chi, &a)? && in_extended_p(s, chi, seeds, &b, depth + 1)?) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Memoized double-double evaluation of one function.
pub struct Evaluator<'a> {
    f: &'a ScalarFunction,
    s: &'a Carrier,
    cache: HashMap<Element, DdComplex>,
}

impl<'a> Evaluator<'a> {
    pub fn new(s: &'a Carrier, f: &'a ScalarFunction) -> Self {
        Evaluator { f, s, cache: HashMap::new() }
    }

    pub fn get(&mut self, x: &Element) -> Result<DdComplex> {
        if let Some(v) = self.cache.get(x) {
            return Ok(*v);
        }
        let v = self.f.eval_dd(self.s, x)?;
        self.cache.insert(*x, v);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::{FixtureId, ProceduralSemigroup};

    #[test]
    fn json_shapes() {
        let dense = ScalarFunction::Dense(vec![c(1.0, 0.0), c(0.0, -1.0)]);
        assert_eq!(serde_json::to_string(&dense).unwrap(), "[[1.0,0.0],[0.0,-1.0]]");
        let rule = ScalarFunction::Rule(FnRule::Exp { lambda: c(0.0, 1.0) });
        assert_eq!(serde_json::to_string(&rule).unwrap(), r#"{"rule":"exp","lambda":[0.0,1.0]}"#);
        let back: ScalarFunction = serde_json::from_str(r#"{"rule":"exp","lambda":[0.0,1.0]}"#).unwrap();
        assert_eq!(back, rule);
        let back: ScalarFunction = serde_json::from_str("[[1.0,0.0],[0.0,-1.0]]").unwrap();
        assert_eq!(back, dense);
        let exact = ScalarFunction::exact(vec![Cyclotomic::root_of_unity(1, 3)]);
        let back: ScalarFunction = serde_json::from_str(&serde_json::to_string(&exact).unwrap()).unwrap();
        assert_eq!(back, exact);
    }

    #[test]
    fn rules_evaluate() {
        let real = FixtureId::RealLine.carrier(None).unwrap();
        let chi = ScalarFunction::Rule(FnRule::Exp { lambda: c(1.0, 0.0) });
        let v = chi.eval(&real, &Element::Real(0.5)).unwrap();
        assert!((v - c(0.5f64.cos(), 0.5f64.sin())).norm() < 1e-15);
        let nat = Carrier::Procedural(ProceduralSemigroup::naturals(2, 50));
        let a5 = ScalarFunction::Rule(FnRule::PAdicCount { prime: 5 });
        assert_eq!(a5.eval(&nat, &Element::Nat(75)).unwrap(), c(2.0, 0.0));
        assert_eq!(ScalarFunction::Rule(FnRule::Parity).eval(&nat, &Element::Nat(9)).unwrap(), c(1.0, 0.0));
        assert!(chi.eval(&nat, &Element::Nat(3)).is_err());
    }
}
