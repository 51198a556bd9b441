use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Evaluator, FnRule, ScalarFunction};
use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::linalg::rational_nullspace;
use crate::scalar::{c, tol, DdComplex, C64};
use crate::semigroup::{Carrier, ElementSubset, Involution};

fn dd_close(a: DdComplex, b: DdComplex, tol: f64) -> bool {
    let d = (a - b).to_c64();
    d.re.abs() <= tol && d.im.abs() <= tol
}

/// Σ cᵢ fᵢ. Dense inputs on a finite carrier give a dense result (exact if
/// any input is exact); anything else gives a rule.
pub fn linear_combination(s: &Carrier, terms: &[(C64, &ScalarFunction)]) -> Result<ScalarFunction> {
    if s.is_finite() && terms.iter().all(|(_, f)| f.is_dense()) {
        let n = s.finite()?.order();
        if terms.iter().any(|(_, f)| matches!(f, ScalarFunction::Exact { .. })) {
            let mut acc = vec![Cyclotomic::zero(); n];
            for (coef, f) in terms {
                let k = Cyclotomic::from_c64(*coef);
                for (a, v) in acc.iter_mut().zip(f.exact_values(s)?) {
                    *a = a.clone() + k.clone() * v;
                }
            }
            return Ok(ScalarFunction::exact(acc));
        }
        let mut acc = vec![c(0.0, 0.0); n];
        for (coef, f) in terms {
            for (a, v) in acc.iter_mut().zip(f.dense_values(s)?) {
                *a += coef * v;
            }
        }
        return Ok(ScalarFunction::Dense(acc));
    }
    Ok(ScalarFunction::linear(terms.iter().map(|(k, f)| (*k, (*f).clone())).collect()))
}

/// f* = f∘σ.
pub fn star(f: &ScalarFunction, sigma: &Involution) -> Result<ScalarFunction> {
    if sigma.is_identity() {
        return Ok(f.clone());
    }
    let perm = |n: usize| -> Result<&Vec<usize>> {
        match sigma {
            Involution::Permutation(p) if p.len() == n => Ok(p),
            _ => Err(Error::FunctionShape(format!("{} does not act on {n} dense values", sigma.name()))),
        }
    };
    Ok(match f {
        ScalarFunction::Dense(v) => ScalarFunction::Dense(perm(v.len())?.iter().map(|&j| v[j]).collect()),
        ScalarFunction::Exact { exact } => {
            ScalarFunction::exact(perm(exact.len())?.iter().map(|&j| exact[j].clone()).collect())
        }
        ScalarFunction::Rule(FnRule::Star { sigma: inner_sigma, inner }) if inner_sigma == sigma => (**inner).clone(),
        ScalarFunction::Rule(_) => ScalarFunction::Rule(FnRule::Star {
            sigma: sigma.clone(),
            inner: Box::new(f.clone()),
        }),
    })
}

/// fᵉ = (f + f*)/2.
pub fn even_part(s: &Carrier, f: &ScalarFunction, sigma: &Involution) -> Result<ScalarFunction> {
    let fs = star(f, sigma)?;
    linear_combination(s, &[(c(0.5, 0.0), f), (c(0.5, 0.0), &fs)])
}

/// f° = (f − f*)/2.
pub fn odd_part(s: &Carrier, f: &ScalarFunction, sigma: &Involution) -> Result<ScalarFunction> {
    let fs = star(f, sigma)?;
    linear_combination(s, &[(c(0.5, 0.0), f), (c(-0.5, 0.0), &fs)])
}

fn parity_holds(s: &Carrier, f: &ScalarFunction, sigma: &Involution, sign: f64) -> Result<bool> {
    if let ScalarFunction::Exact { exact } = f {
        let Involution::Permutation(p) = sigma else { return Ok(sigma.is_identity() && sign > 0.0) };
        return Ok(p.iter().enumerate().all(|(i, &j)| {
            if sign > 0.0 {
                exact[j] == exact[i]
            } else {
                exact[j] == -exact[i].clone()
            }
        }));
    }
    let mut ev = Evaluator::new(s, f);
    for x in s.window() {
        let a = ev.get(&x)?;
        let b = ev.get(&sigma.apply(&x)?)?;
        if !dd_close(b, a.scale(sign), tol::IDENTITY) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// f* = f on the carrier (window).
pub fn is_even(s: &Carrier, f: &ScalarFunction, sigma: &Involution) -> Result<bool> {
    parity_holds(s, f, sigma, 1.0)
}

/// f* = −f on the carrier (window).
pub fn is_odd(s: &Carrier, f: &ScalarFunction, sigma: &Involution) -> Result<bool> {
    parity_holds(s, f, sigma, -1.0)
}

/// χ(xy) = χ(x)χ(y) on all pairs, exactly.
pub fn is_multiplicative_exact(s: &Carrier, values: &[Cyclotomic]) -> Result<bool> {
    let fs = s.finite()?;
    let n = fs.order();
    if values.len() != n {
        return Err(Error::FunctionShape(format!("{} values for order {n}", values.len())));
    }
    Ok((0..n).all(|x| (0..n).all(|y| values[fs.mul(x, y)] == values[x].clone() * values[y].clone())))
}

/// χ(xy) = χ(x)χ(y) on all (window) pairs; exact for exact functions.
pub fn is_multiplicative(s: &Carrier, f: &ScalarFunction) -> Result<bool> {
    if let ScalarFunction::Exact { exact } = f {
        return is_multiplicative_exact(s, exact);
    }
    let table = s.window_table()?;
    let v: Vec<DdComplex> = table.elements.iter().map(|x| f.eval_dd(s, x)).collect::<Result<_>>()?;
    let n = table.window_len;
    Ok((0..n).all(|i| (0..n).all(|j| dd_close(v[table.product(i, j)], v[i] * v[j], tol::IDENTITY))))
}

/// A(xy) = A(x) + A(y) for x, y in the window part of `sub` with xy ∈ sub.
pub fn is_additive(s: &Carrier, sub: &ElementSubset, f: &ScalarFunction) -> Result<bool> {
    let members = sub.materialize(s)?;
    let mut ev = Evaluator::new(s, f);
    for x in &members {
        for y in &members {
            let xy = s.compose(x, y)?;
            if !sub.contains(s, &xy)? {
                continue;
            }
            if !dd_close(ev.get(&xy)?, ev.get(x)? + ev.get(y)?, tol::IDENTITY) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// f(xy) = f(yx) on all (window) pairs.
pub fn is_central(s: &Carrier, f: &ScalarFunction) -> Result<bool> {
    let w = s.window();
    let mut ev = Evaluator::new(s, f);
    for x in &w {
        for y in &w {
            if !dd_close(ev.get(&s.compose(x, y)?)?, ev.get(&s.compose(y, x)?)?, tol::IDENTITY) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Central, and f(xyz) = f(xzy) on all triples of the triple window.
pub fn is_abelian_fn(s: &Carrier, f: &ScalarFunction) -> Result<bool> {
    if !is_central(s, f)? {
        return Ok(false);
    }
    let w = s.triple_window();
    let mut ev = Evaluator::new(s, f);
    for x in &w {
        for y in &w {
            let xy = s.compose(x, y)?;
            for z in &w {
                let xz = s.compose(x, z)?;
                if !dd_close(ev.get(&s.compose(&xy, z)?)?, ev.get(&s.compose(&xz, y)?)?, tol::IDENTITY) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Basis of the additive functions on a subsemigroup `sub` of a finite
/// carrier, over ℚ. Always empty: xⁱ = xʲ with i < j forces (j−i)A(x) = 0.
pub fn additive_basis(s: &Carrier, sub: &[usize]) -> Result<Vec<Vec<BigRational>>> {
    let fs = s.finite()?;
    let col = |x: usize| sub.iter().position(|&e| e == x);
    let mut rows = Vec::new();
    for (i, &x) in sub.iter().enumerate() {
        for (j, &y) in sub.iter().enumerate() {
            let Some(k) = col(fs.mul(x, y)) else { continue };
            let mut row = vec![BigRational::zero(); sub.len()];
            row[k] += BigRational::one();
            row[i] -= BigRational::one();
            row[j] -= BigRational::one();
            rows.push(row);
        }
    }
    Ok(rational_nullspace(rows, sub.len()))
}

/// A validated multiplicative function.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicativeFunction {
    function: ScalarFunction,
    nonzero: bool,
}

impl MultiplicativeFunction {
    pub fn new(s: &Carrier, f: ScalarFunction) -> Result<Self> {
        if !is_multiplicative(s, &f)? {
            return Err(Error::NotMultiplicative(format!("on {}", s.name())));
        }
        let mut nonzero = false;
        for x in s.window() {
            if f.eval(s, &x)? != c(0.0, 0.0) {
                nonzero = true;
                break;
            }
        }
        Ok(MultiplicativeFunction { function: f, nonzero })
    }

    /// Like [`MultiplicativeFunction::new`] but rejects the zero function.
    pub fn nonzero(s: &Carrier, f: ScalarFunction) -> Result<Self> {
        let m = Self::new(s, f)?;
        if !m.nonzero {
            return Err(Error::ZeroCharacter);
        }
        Ok(m)
    }

    pub fn is_nonzero(&self) -> bool {
        self.nonzero
    }

    pub fn function(&self) -> &ScalarFunction {
        &self.function
    }

    pub fn into_function(self) -> ScalarFunction {
        self.function
    }
}

/// A function validated as additive on a sub-carrier.
#[derive(Clone, Debug)]
pub struct AdditiveFunction {
    function: ScalarFunction,
    domain: ElementSubset,
}

impl AdditiveFunction {
    pub fn new(s: &Carrier, domain: ElementSubset, f: ScalarFunction) -> Result<Self> {
        if !is_additive(s, &domain, &f)? {
            return Err(Error::FunctionShape(format!("function is not additive on the given part of {}", s.name())));
        }
        Ok(AdditiveFunction { function: f, domain })
    }

    pub fn function(&self) -> &ScalarFunction {
        &self.function
    }

    pub fn domain(&self) -> &ElementSubset {
        &self.domain
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::{finite_fixture, Element, FixtureId, ProceduralSemigroup};

    fn real() -> Carrier {
        FixtureId::RealLine.carrier(None).unwrap()
    }

    fn exp(lambda: C64) -> ScalarFunction {
        ScalarFunction::Rule(FnRule::Exp { lambda })
    }

    #[test]
    fn star_of_exponential_reverses_frequency() {
        let s = real();
        let f = exp(c(1.5, 0.0));
        let fs = star(&f, &Involution::Negation).unwrap();
        for x in s.window() {
            let Element::Real(t) = x else { unreachable!() };
            let want = C64::from_polar(1.0, -1.5 * t);
            assert!((fs.eval(&s, &x).unwrap() - want).norm() < 1e-14);
        }
        assert_eq!(star(&fs, &Involution::Negation).unwrap(), f);
        assert_eq!(star(&f, &Involution::Identity).unwrap(), f);
    }

    #[test]
    fn euler_parts() {
        let s = real();
        let f = exp(c(2.0, 0.0));
        let e = even_part(&s, &f, &Involution::Negation).unwrap();
        let o = odd_part(&s, &f, &Involution::Negation).unwrap();
        for x in s.window() {
            let Element::Real(t) = x else { unreachable!() };
            assert!((e.eval(&s, &x).unwrap() - c((2.0 * t).cos(), 0.0)).norm() < 1e-14);
            assert!((o.eval(&s, &x).unwrap() - c(0.0, (2.0 * t).sin())).norm() < 1e-14);
        }
        assert!(is_even(&s, &e, &Involution::Negation).unwrap());
        assert!(is_odd(&s, &o, &Involution::Negation).unwrap());
        let eo = even_part(&s, &o, &Involution::Negation).unwrap();
        for x in s.window() {
            assert!(eo.eval(&s, &x).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn multiplicative_and_additive_on_naturals() {
        let s = Carrier::Procedural(ProceduralSemigroup::naturals(2, 60));
        let parity = ScalarFunction::Rule(FnRule::Parity);
        assert!(is_multiplicative(&s, &parity).unwrap());
        let odds = ElementSubset::SupportOf(parity);
        let a5 = ScalarFunction::Rule(FnRule::PAdicCount { prime: 5 });
        assert!(is_additive(&s, &odds, &a5).unwrap());
        assert!(is_multiplicative(&s, &ScalarFunction::constant(c(0.0, 0.0))).unwrap());
        assert!(!is_multiplicative(&s, &a5).unwrap());
    }

    #[test]
    fn centrality() {
        let lz = Carrier::Finite(finite_fixture("leftzero2").unwrap());
        let f = ScalarFunction::Dense(vec![c(1.0, 0.0), c(2.0, 0.0)]);
        assert!(!is_central(&lz, &f).unwrap());
        let k = ScalarFunction::Dense(vec![c(3.0, 0.0); 2]);
        assert!(is_central(&lz, &k).unwrap() && is_abelian_fn(&lz, &k).unwrap());
    }

    #[test]
    fn finite_additive_functions_vanish() {
        for name in crate::semigroup::FINITE_FIXTURES {
            let s = Carrier::Finite(finite_fixture(name).unwrap());
            let all: Vec<usize> = (0..s.finite().unwrap().order()).collect();
            assert!(additive_basis(&s, &all).unwrap().is_empty(), "{name}");
        }
    }
}
