//! Verification of the equation and the structural checks used to
//! falsify the classification at desk scale.

mod classify;
mod lemmas;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::Cyclotomic;
use crate::error::Result;
use crate::families::Mode;
use crate::functions::ScalarFunction;
use crate::scalar::{DdComplex, C64};
use crate::semigroup::{Carrier, Element, Involution};

pub use classify::{classify, ClassificationResult, Verdict};
pub use lemmas::{
    check_g_properties, check_linear_dependence, check_two_character_parity, check_vanishing_dependence,
    DependenceReport, GPropertiesReport, ParityReport, VanishingReport,
};

/// Outcome of a residual check over all (window) pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub max_residual: f64,
    pub worst_pair: Option<(Element, Element)>,
    pub pair_count: usize,
    pub mode: Mode,
}

impl VerificationReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual <= tol
    }
}

/// Double-double values of `f` at every element of `elems`, computed in parallel.
pub(crate) fn eval_many(
    s: &Carrier,
    f: &ScalarFunction,
    elems: impl IntoIterator<Item = Element>,
) -> Result<HashMap<Element, DdComplex>> {
    let mut unique: Vec<Element> = elems.into_iter().collect();
    unique.sort();
    unique.dedup();
    unique
        .into_par_iter()
        .map(|x| Ok((x, f.eval_dd(s, &x)?)))
        .collect()
}

/// The products x·σ(y) over all window pairs, in row-major order.
pub(crate) fn twisted_products(s: &Carrier, sigma: &Involution) -> Result<Vec<(Element, Element, Element)>> {
    let window = s.window();
    let sigmas: Vec<Element> = window.iter().map(|y| sigma.apply(y)).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(window.len() * window.len());
    for x in &window {
        for (y, sy) in window.iter().zip(&sigmas) {
            out.push((*x, *y, s.compose(x, sy)?));
        }
    }
    Ok(out)
}

/// The pairs (x, y) of the window with their products x·σ(y), indexed
/// into a list of distinct elements. Reusable across residual checks on
/// the same carrier and involution.
#[derive(Clone, Debug)]
pub struct PairPlan {
    elements: Vec<Element>,
    /// (x, y, xσ(y)) as indices into `elements`.
    rows: Vec<(u32, u32, u32)>,
}

impl PairPlan {
    pub fn new(s: &Carrier, sigma: &Involution) -> Result<Self> {
        let mut index: HashMap<Element, u32> = HashMap::new();
        let mut elements = Vec::new();
        let mut id = |e: Element| -> u32 {
            *index.entry(e).or_insert_with(|| {
                elements.push(e);
                (elements.len() - 1) as u32
            })
        };
        let rows = twisted_products(s, sigma)?
            .into_iter()
            .map(|(x, y, m)| (id(x), id(y), id(m)))
            .collect();
        Ok(PairPlan { elements, rows })
    }

    pub fn pair_count(&self) -> usize {
        self.rows.len()
    }

    fn values(&self, s: &Carrier, f: &ScalarFunction) -> Result<Vec<DdComplex>> {
        self.elements.par_iter().map(|x| f.eval_dd(s, x)).collect()
    }
}

/// max over pairs of |g(xσ(y)) − g(x)g(y) + f(x)f(y) − α f(xσ(y))|.
///
/// Exact when both functions carry exact values on a finite carrier;
/// otherwise evaluated in double-double.
pub fn residual(
    s: &Carrier,
    sigma: &Involution,
    alpha: C64,
    g: &ScalarFunction,
    f: &ScalarFunction,
) -> Result<VerificationReport> {
    residual_with(&PairPlan::new(s, sigma)?, s, alpha, g, f)
}

pub fn residual_with(
    plan: &PairPlan,
    s: &Carrier,
    alpha: C64,
    g: &ScalarFunction,
    f: &ScalarFunction,
) -> Result<VerificationReport> {
    let pair_count = plan.pair_count();
    let pair_of = |x: u32, y: u32| (plan.elements[x as usize], plan.elements[y as usize]);
    if let (ScalarFunction::Exact { .. }, ScalarFunction::Exact { .. }, true) = (g, f, s.is_finite()) {
        let gv = g.exact_values(s)?;
        let fv = f.exact_values(s)?;
        let at = |v: &[Cyclotomic], k: u32| v[plan.elements[k as usize].index().expect("finite element")].clone();
        let a = Cyclotomic::from_c64(alpha);
        let mut report = VerificationReport {
            max_residual: 0.0,
            worst_pair: None,
            pair_count,
            mode: Mode::Exact,
        };
        for &(x, y, m) in &plan.rows {
            let d = at(&gv, m) - at(&gv, x) * at(&gv, y) + at(&fv, x) * at(&fv, y) - a.clone() * at(&fv, m);
            if !d.is_zero() {
                let mag = d.to_c64().norm().max(f64::MIN_POSITIVE);
                if mag > report.max_residual {
                    report.max_residual = mag;
                    report.worst_pair = Some(pair_of(x, y));
                }
            }
        }
        return Ok(report);
    }
    let gv = plan.values(s, g)?;
    let fv = plan.values(s, f)?;
    let a = DdComplex::from(alpha);
    let mut report = VerificationReport {
        max_residual: 0.0,
        worst_pair: None,
        pair_count,
        mode: Mode::Float,
    };
    for &(x, y, m) in &plan.rows {
        let (x, y, m) = (x as usize, y as usize, m as usize);
        let d = gv[m] - gv[x] * gv[y] + fv[x] * fv[y] - a * fv[m];
        let mag = d.to_c64().norm();
        if report.worst_pair.is_none() || mag > report.max_residual {
            report.max_residual = mag;
            report.worst_pair = Some(pair_of(x as u32, y as u32));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{construct, FamilyDescriptor, Registry};
    use crate::functions::{enumerate_multiplicative, FnRule};
    use crate::scalar::c;
    use crate::semigroup::{finite_fixture, ProceduralSemigroup};

    #[test]
    fn zero_pair_has_zero_residual() {
        let s = Carrier::Finite(finite_fixture("bool-mult").unwrap());
        let z = ScalarFunction::zero_dense(2);
        let r = residual(&s, &Involution::identity_for(&s), c(0.3, -2.0), &z, &z).unwrap();
        assert_eq!(r.max_residual, 0.0);
        assert_eq!(r.pair_count, 4);
    }

    #[test]
    fn even_character_alone_solves() {
        let s = Carrier::Finite(finite_fixture("c3").unwrap());
        let sigma = Involution::Permutation(vec![0, 2, 1]);
        let chars = enumerate_multiplicative(s.finite().unwrap(), 6).unwrap();
        let one = chars.iter().find(|ch| ch.values.iter().all(|v| *v == Some(0))).unwrap();
        let g = one.to_exact_function();
        let f = ScalarFunction::exact(vec![Cyclotomic::zero(); 3]);
        let r = residual(&s, &sigma, c(5.0, 1.0), &g, &f).unwrap();
        assert_eq!(r.mode, Mode::Exact);
        assert_eq!(r.max_residual, 0.0);
    }

    #[test]
    fn exact_family_eight_on_c3() {
        let s = Carrier::Finite(finite_fixture("c3").unwrap());
        let sigma = Involution::Permutation(vec![0, 2, 1]);
        let d = FamilyDescriptor::new(8, c(2.0, 0.0)).with_chi(2usize);
        let pair = construct(&s, &sigma, &d, None, &Registry::new(), Mode::Exact).unwrap();
        let r = residual(&s, &sigma, pair.alpha, &pair.g, &pair.f).unwrap();
        assert_eq!(r.mode, Mode::Exact);
        assert_eq!(r.max_residual, 0.0);
        assert_eq!(r.pair_count, 9);
        // perturbing one value breaks it and names a pair
        let ScalarFunction::Exact { exact } = &pair.g else { panic!() };
        let mut broken = exact.clone();
        broken[1] = broken[1].clone() + Cyclotomic::one();
        let r = residual(&s, &sigma, pair.alpha, &ScalarFunction::exact(broken), &pair.f).unwrap();
        assert!(r.max_residual > 0.5);
        assert!(r.worst_pair.is_some());
    }

    #[test]
    fn rule_residual_on_the_line() {
        let s = Carrier::Procedural(ProceduralSemigroup::real_line(64));
        let chi = ScalarFunction::Rule(FnRule::Exp { lambda: c(1.0, 0.0) });
        let r = residual(&s, &Involution::Negation, c(0.0, 0.0), &chi, &ScalarFunction::constant(c(0.0, 0.0))).unwrap();
        // e^{i(x-y)} != e^{ix}e^{iy}
        assert!(r.max_residual > 0.1);
        let r = residual(&s, &Involution::Identity, c(0.0, 0.0), &chi, &ScalarFunction::constant(c(0.0, 0.0))).unwrap();
        assert!(r.max_residual < 1e-15);
        assert_eq!(r.pair_count, 64 * 64);
    }
}
