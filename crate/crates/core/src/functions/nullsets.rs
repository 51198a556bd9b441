use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::{in_null_square, star, ScalarFunction};
use crate::error::{Error, Result};
use crate::scalar::c;
use crate::semigroup::{Carrier, Element, Involution};

/// I_χ, I_χ² and P_χ, restricted to the window on procedural carriers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NullSets {
    pub i_chi: BTreeSet<Element>,
    pub i_chi_sq: BTreeSet<Element>,
    pub p_chi: BTreeSet<Element>,
    /// Set when the quantifiers in P_χ ranged over a window only.
    pub window_certified: bool,
}

/// Membership tests for I_χ and I_χ² at arbitrary carrier elements.
struct NullOracle<'a> {
    s: &'a Carrier,
    chi: &'a ScalarFunction,
    square: HashMap<Element, bool>,
}

impl<'a> NullOracle<'a> {
    fn new(s: &'a Carrier, chi: &'a ScalarFunction) -> Self {
        NullOracle {
            s,
            chi,
            square: HashMap::new(),
        }
    }

    fn in_i(&self, x: &Element) -> Result<bool> {
        Ok(self.chi.eval(self.s, x)? == c(0.0, 0.0))
    }

    fn in_i_sq(&mut self, x: &Element) -> Result<bool> {
        if let Some(&v) = self.square.get(x) {
            return Ok(v);
        }
        let v = in_null_square(self.s, self.chi, x)?;
        self.square.insert(*x, v);
        Ok(v)
    }

    /// x ∈ I_χ ∖ I_χ²
    fn in_gap(&mut self, x: &Element) -> Result<bool> {
        Ok(self.in_i(x)? && !self.in_i_sq(x)?)
    }
}

fn p_member(s: &Carrier, chi: &ScalarFunction, p: &Element, units: &[Element]) -> Result<bool> {
    let mut oracle = NullOracle::new(s, chi);
    for u in units {
        let up = s.compose(u, p)?;
        if !oracle.in_gap(&up)? || !oracle.in_gap(&s.compose(p, u)?)? {
            return Ok(false);
        }
        for v in units {
            if !oracle.in_gap(&s.compose(&up, v)?)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// I_χ = {χ = 0}, I_χ² and
/// P_χ = {p ∈ I_χ∖I_χ² | up, pv, upv ∈ I_χ∖I_χ² for all u, v ∉ I_χ}.
///
/// On procedural carriers u and v range over the window; products may
/// leave it.
pub fn null_sets(s: &Carrier, chi: &ScalarFunction) -> Result<NullSets> {
    let window = s.window();
    let mut oracle = NullOracle::new(s, chi);
    let mut i_chi = BTreeSet::new();
    let mut units = Vec::new();
    for x in &window {
        if oracle.in_i(x)? {
            i_chi.insert(*x);
        } else {
            units.push(*x);
        }
    }
    if units.is_empty() {
        return Err(Error::ZeroCharacter);
    }
    let mut i_chi_sq = BTreeSet::new();
    for x in &i_chi {
        if oracle.in_i_sq(x)? {
            i_chi_sq.insert(*x);
        }
    }
    let candidates: Vec<Element> = i_chi.difference(&i_chi_sq).copied().collect();
    let flags: Vec<bool> = candidates
        .par_iter()
        .map(|p| p_member(s, chi, p, &units))
        .collect::<Result<_>>()?;
    let p_chi = candidates.into_iter().zip(flags).filter(|(_, keep)| *keep).map(|(p, _)| p).collect();
    Ok(NullSets {
        i_chi,
        i_chi_sq,
        p_chi,
        window_certified: !s.is_finite(),
    })
}

/// Counterexamples to: (a) u ∉ I_χ, p ∈ P_χ ⇒ up, pu ∈ P_χ and
/// (b) σ(P_χ) = P_{χ*}.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PchiLemmaReport {
    pub translate_failures: Vec<(Element, Element)>,
    pub sigma_failures: Vec<Element>,
    /// Pairs (u, p) whose products left the window and were not checked.
    pub skipped: usize,
}

impl PchiLemmaReport {
    pub fn holds(&self) -> bool {
        self.translate_failures.is_empty() && self.sigma_failures.is_empty()
    }
}

pub fn check_pchi_lemma(s: &Carrier, sigma: &Involution, chi: &ScalarFunction) -> Result<PchiLemmaReport> {
    let sets = null_sets(s, chi)?;
    let mut report = PchiLemmaReport::default();
    let units: Vec<Element> = s.window().into_iter().filter(|x| !sets.i_chi.contains(x)).collect();
    for p in &sets.p_chi {
        for u in &units {
            for prod in [s.compose(u, p)?, s.compose(p, u)?] {
                if !s.in_window(&prod) {
                    report.skipped += 1;
                } else if !sets.p_chi.contains(&prod) {
                    report.translate_failures.push((*u, *p));
                }
            }
        }
    }
    let starred = null_sets(s, &star(chi, sigma)?)?;
    let mut image = BTreeSet::new();
    for p in &sets.p_chi {
        let q = sigma.apply(p)?;
        if s.in_window(&q) {
            image.insert(q);
        }
    }
    report.sigma_failures = image.symmetric_difference(&starred.p_chi).copied().collect();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{enumerate_multiplicative, FnRule};
    use crate::semigroup::{finite_fixture, ProceduralSemigroup, FINITE_FIXTURES};

    #[test]
    fn nowhere_zero_character() {
        let s = Carrier::Finite(finite_fixture("c3").unwrap());
        let sets = null_sets(&s, &ScalarFunction::Dense(vec![c(1.0, 0.0); 3])).unwrap();
        assert!(sets.i_chi.is_empty() && sets.p_chi.is_empty());
        assert!(matches!(
            null_sets(&s, &ScalarFunction::Dense(vec![c(0.0, 0.0); 3])),
            Err(Error::ZeroCharacter)
        ));
    }

    #[test]
    fn bool_mult_null_sets() {
        let s = Carrier::Finite(finite_fixture("bool-mult").unwrap());
        let sets = null_sets(&s, &ScalarFunction::Dense(vec![c(0.0, 0.0), c(1.0, 0.0)])).unwrap();
        let zero: BTreeSet<Element> = [Element::Index(0)].into();
        assert_eq!(sets.i_chi, zero);
        assert_eq!(sets.i_chi_sq, zero);
        assert!(sets.p_chi.is_empty());
        assert!(!sets.window_certified);
    }

    #[test]
    fn naturals_parity() {
        let s = Carrier::Procedural(ProceduralSemigroup::naturals(2, 60));
        let sets = null_sets(&s, &ScalarFunction::Rule(FnRule::Parity)).unwrap();
        let evens: BTreeSet<Element> = (2..=60).step_by(2).map(Element::Nat).collect();
        let p: BTreeSet<Element> = (2..=60).step_by(4).map(Element::Nat).collect();
        assert_eq!(sets.i_chi, evens);
        assert_eq!(sets.p_chi, p);
        assert!(sets.window_certified);
        let report = check_pchi_lemma(&s, &Involution::Identity, &ScalarFunction::Rule(FnRule::Parity)).unwrap();
        assert!(report.holds());
    }

    #[test]
    fn lemma_on_all_finite_fixtures() {
        for name in FINITE_FIXTURES {
            let fs = finite_fixture(name).unwrap();
            let s = Carrier::Finite(fs.clone());
            for chi in enumerate_multiplicative(&fs, 6).unwrap() {
                if chi.is_zero() {
                    continue;
                }
                for sigma in s.involutions().unwrap() {
                    let report = check_pchi_lemma(&s, &sigma, &chi.to_function()).unwrap();
                    assert!(report.holds(), "{name} {chi:?} {sigma:?}: {report:?}");
                }
            }
        }
    }

    #[test]
    fn nilmonoid_has_a_nonempty_p() {
        let fs = finite_fixture("nilmonoid3").unwrap();
        let s = Carrier::Finite(fs);
        let chi = ScalarFunction::Dense(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let sets = null_sets(&s, &chi).unwrap();
        assert_eq!(sets.p_chi, [Element::Index(1)].into());
    }
}
