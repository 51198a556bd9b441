use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{eval_many, residual, twisted_products};
use crate::error::Result;
use crate::functions::{is_even, is_multiplicative, is_odd, ScalarFunction};
use crate::scalar::{c, close, tol, DdComplex, C64};
use crate::semigroup::{Carrier, Element, Involution};

fn dd_close(a: DdComplex, b: DdComplex, eps: f64) -> bool {
    let d = (a - b).to_c64();
    d.re.abs() <= eps && d.im.abs() <= eps
}

/// Counterexamples to the structural properties of solutions, with
/// G = g − αf.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GPropertiesReport {
    /// False when (g, f) is not a solution; nothing else is asserted then.
    pub hypothesis_holds: bool,
    pub max_residual: f64,
    /// Pairs with G(xσ(y)) != G(yσ(x)).
    pub symmetry: Vec<(Element, Element)>,
    /// Triples with G(xyz) != G(σ(xyz)).
    pub star_on_cubes: Vec<(Element, Element, Element)>,
    /// Triples with gᵉ(x)g°(yz) != fᵉ(x)f°(yz).
    pub l1: Vec<(Element, Element, Element)>,
    /// Triples with gᵉ(yz)g°(x) != fᵉ(yz)f°(x).
    pub l2: Vec<(Element, Element, Element)>,
}

impl GPropertiesReport {
    pub fn counterexamples(&self) -> usize {
        self.symmetry.len() + self.star_on_cubes.len() + self.l1.len() + self.l2.len()
    }

    pub fn holds(&self) -> bool {
        !self.hypothesis_holds || self.counterexamples() == 0
    }
}

pub fn check_g_properties(
    s: &Carrier,
    sigma: &Involution,
    alpha: C64,
    g: &ScalarFunction,
    f: &ScalarFunction,
) -> Result<GPropertiesReport> {
    let res = residual(s, sigma, alpha, g, f)?;
    let mut report = GPropertiesReport {
        hypothesis_holds: res.max_residual <= tol::IDENTITY,
        max_residual: res.max_residual,
        ..Default::default()
    };
    if !report.hypothesis_holds {
        return Ok(report);
    }
    let a = DdComplex::from(alpha);
    let half = DdComplex::from(c(0.5, 0.0));

    let pairs = twisted_products(s, sigma)?;
    let window = s.window();
    let mut reversed = Vec::with_capacity(pairs.len());
    for (x, y, _) in &pairs {
        reversed.push(s.compose(y, &sigma.apply(x)?)?);
    }

    let t = s.triple_window();
    let mut triples = Vec::with_capacity(t.len().pow(3));
    for x in &t {
        for y in &t {
            let yz_row: Vec<Element> = t.iter().map(|z| s.compose(y, z)).collect::<Result<_>>()?;
            for (z, yz) in t.iter().zip(yz_row) {
                let xyz = s.compose(x, &yz)?;
                triples.push((*x, *y, *z, yz, xyz));
            }
        }
    }

    let mut needed: Vec<Element> = window.clone();
    needed.extend(pairs.iter().map(|p| p.2));
    needed.extend(reversed.iter().copied());
    for (x, _, _, yz, xyz) in &triples {
        needed.extend([*x, *yz, *xyz]);
    }
    let mut with_sigma = needed.clone();
    for x in &needed {
        with_sigma.push(sigma.apply(x)?);
    }
    let gv = eval_many(s, g, with_sigma.iter().copied())?;
    let fv = eval_many(s, f, with_sigma.iter().copied())?;
    let big_g = |x: &Element| gv[x] - a * fv[x];

    for ((x, y, m), r) in pairs.iter().zip(&reversed) {
        if !dd_close(big_g(m), big_g(r), tol::IDENTITY) {
            report.symmetry.push((*x, *y));
        }
    }
    let parts = |v: &std::collections::HashMap<Element, DdComplex>, x: &Element| -> Result<(DdComplex, DdComplex)> {
        let sx = sigma.apply(x)?;
        Ok(((v[x] + v[&sx]) * half, (v[x] - v[&sx]) * half))
    };
    for (x, y, z, yz, xyz) in &triples {
        let sxyz = sigma.apply(xyz)?;
        if !dd_close(big_g(xyz), big_g(&sxyz), tol::IDENTITY) {
            report.star_on_cubes.push((*x, *y, *z));
        }
        let (ge_x, go_x) = parts(&gv, x)?;
        let (fe_x, fo_x) = parts(&fv, x)?;
        let (ge_yz, go_yz) = parts(&gv, yz)?;
        let (fe_yz, fo_yz) = parts(&fv, yz)?;
        if !dd_close(ge_x * go_yz, fe_x * fo_yz, tol::IDENTITY) {
            report.l1.push((*x, *y, *z));
        }
        if !dd_close(ge_yz * go_x, fe_yz * fo_x, tol::IDENTITY) {
            report.l2.push((*x, *y, *z));
        }
    }
    Ok(report)
}

/// Rank test of the 2×n value matrix of (f, g) over the carrier (window).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DependenceReport {
    pub dependent: bool,
    /// (c₁, c₂) with c₁f + c₂g = 0, when dependent.
    pub witness: Option<(C64, C64)>,
    /// Smallest over largest singular value (0 when both vanish).
    pub singular_ratio: f64,
}

pub fn check_linear_dependence(s: &Carrier, f: &ScalarFunction, g: &ScalarFunction) -> Result<DependenceReport> {
    let fv = f.window_values(s)?;
    let gv = g.window_values(s)?;
    let n = fv.len();
    let m = DMatrix::<C64>::from_fn(n, 2, |i, j| if j == 0 { fv[i] } else { gv[i] });
    let sv = m.singular_values();
    let (hi, lo) = (sv[0].max(sv[1]), sv[0].min(sv[1]));
    if hi == 0.0 {
        return Ok(DependenceReport {
            dependent: true,
            witness: Some((c(1.0, 0.0), c(0.0, 0.0))),
            singular_ratio: 0.0,
        });
    }
    let ratio = lo / hi;
    let dependent = ratio < tol::RANK;
    let norm = |v: &[C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let witness = dependent.then(|| {
        if norm(&fv) <= tol::RANK * hi {
            (c(1.0, 0.0), c(0.0, 0.0))
        } else if norm(&gv) <= tol::RANK * hi {
            (c(0.0, 0.0), c(1.0, 0.0))
        } else {
            let num: C64 = gv.iter().zip(&fv).map(|(g, f)| g.conj() * f).sum();
            let den: f64 = gv.iter().map(|z| z.norm_sqr()).sum();
            (c(1.0, 0.0), -num / den)
        }
    });
    Ok(DependenceReport {
        dependent,
        witness,
        singular_ratio: ratio,
    })
}

/// Falsification harness for: if g ≠ 0 vanishes on S², β ≠ 0 and
/// f(xσ(y)) = βf(x)f(y) − βg(x)g(y) on all pairs, then f and g are
/// linearly dependent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VanishingReport {
    /// Why the hypothesis fails, if it does.
    pub hypothesis_failure: Option<String>,
    pub equation_residual: f64,
    pub dependence: Option<DependenceReport>,
}

impl VanishingReport {
    pub fn applies(&self) -> bool {
        self.hypothesis_failure.is_none() && self.equation_residual <= tol::IDENTITY
    }

    pub fn holds(&self) -> bool {
        !self.applies() || self.dependence.as_ref().is_some_and(|d| d.dependent)
    }
}

pub fn check_vanishing_dependence(
    s: &Carrier,
    sigma: &Involution,
    beta: C64,
    f: &ScalarFunction,
    g: &ScalarFunction,
) -> Result<VanishingReport> {
    let mut report = VanishingReport {
        hypothesis_failure: None,
        equation_residual: f64::INFINITY,
        dependence: None,
    };
    let window = s.window();
    let square = s.square()?;
    let gw = g.window_values(s)?;
    if beta == c(0.0, 0.0) {
        report.hypothesis_failure = Some("beta is zero".into());
    } else if gw.iter().all(|z| z.norm() == 0.0) {
        report.hypothesis_failure = Some("g is zero".into());
    } else if let Some(x) = window.iter().find(|x| square.contains(x) && g.eval(s, x).map(|v| !close(v, c(0.0, 0.0), tol::IDENTITY)).unwrap_or(true)) {
        report.hypothesis_failure = Some(format!("g does not vanish on S^2 at {x}"));
    }
    if report.hypothesis_failure.is_some() {
        return Ok(report);
    }
    let pairs = twisted_products(s, sigma)?;
    let elems = || pairs.iter().flat_map(|(x, y, m)| [*x, *y, *m]);
    let fv = eval_many(s, f, elems())?;
    let gv = eval_many(s, g, elems())?;
    let b = DdComplex::from(beta);
    report.equation_residual = pairs
        .iter()
        .map(|(x, y, m)| (fv[m] - b * (fv[x] * fv[y] - gv[x] * gv[y])).to_c64().norm())
        .fold(0.0, f64::max);
    if report.equation_residual <= tol::IDENTITY {
        report.dependence = Some(check_linear_dependence(s, f, g)?);
    }
    Ok(report)
}

/// Falsification harness for the parity statement about
/// f = a₁χ₁ + a₂χ₂ and g = b₁χ₁ + b₂χ₂.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParityReport {
    pub hypothesis_failure: Option<String>,
    /// 1 when f is even and g odd, 2 when f is odd and g even.
    pub case: Option<u8>,
    pub conclusion_holds: bool,
}

impl ParityReport {
    pub fn holds(&self) -> bool {
        self.hypothesis_failure.is_some() || self.case.is_none() || self.conclusion_holds
    }
}

#[allow(clippy::too_many_arguments)]
pub fn check_two_character_parity(
    s: &Carrier,
    sigma: &Involution,
    chi1: &ScalarFunction,
    chi2: &ScalarFunction,
    a: (C64, C64),
    b: (C64, C64),
) -> Result<ParityReport> {
    let mut report = ParityReport {
        hypothesis_failure: None,
        case: None,
        conclusion_holds: true,
    };
    let v1 = chi1.window_values(s)?;
    let v2 = chi2.window_values(s)?;
    let zero = c(0.0, 0.0);
    let is_zero = |v: &[C64]| v.iter().all(|z| close(*z, zero, tol::IDENTITY));
    let gv: Vec<C64> = v1.iter().zip(&v2).map(|(x, y)| b.0 * x + b.1 * y).collect();
    let failure = if is_zero(&v1) || is_zero(&v2) {
        Some("a character is zero")
    } else if v1.iter().zip(&v2).all(|(x, y)| close(*x, *y, tol::IDENTITY)) {
        Some("the characters coincide")
    } else if !is_multiplicative(s, chi1)? || !is_multiplicative(s, chi2)? {
        Some("a character is not multiplicative")
    } else if close(a.0, zero, tol::IDENTITY) || close(a.1, zero, tol::IDENTITY) {
        Some("a coefficient of f is zero")
    } else if is_zero(&gv) {
        Some("g is zero")
    } else {
        None
    };
    if let Some(why) = failure {
        report.hypothesis_failure = Some(why.to_string());
        return Ok(report);
    }
    let f = ScalarFunction::linear(vec![(a.0, chi1.clone()), (a.1, chi2.clone())]);
    let g = ScalarFunction::linear(vec![(b.0, chi1.clone()), (b.1, chi2.clone())]);
    let eq = |u: C64, v: C64| close(u, v, tol::IDENTITY);
    if is_even(s, &f, sigma)? && is_odd(s, &g, sigma)? {
        report.case = Some(1);
        report.conclusion_holds = eq(a.0, a.1) && eq(b.0 + b.1, zero);
    } else if is_odd(s, &f, sigma)? && is_even(s, &g, sigma)? {
        report.case = Some(2);
        report.conclusion_holds = eq(a.0 + a.1, zero) && eq(b.0, b.1);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{catalogue, construct, Mode, Registry};
    use crate::functions::{enumerate_multiplicative, FnRule};
    use crate::semigroup::{enumerate_involutive_automorphisms, finite_fixture, ProceduralSemigroup, FINITE_FIXTURES};

    fn finite(name: &str) -> Carrier {
        Carrier::Finite(finite_fixture(name).unwrap())
    }

    #[test]
    fn dependence_witnesses() {
        let s = finite("c3");
        let g = ScalarFunction::Dense(vec![c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 1.0)]);
        let f = ScalarFunction::Dense(vec![c(3.0, 0.0), c(0.0, 6.0), c(-3.0, 3.0)]);
        let r = check_linear_dependence(&s, &f, &g).unwrap();
        assert!(r.dependent);
        let (c1, c2) = r.witness.unwrap();
        assert!(close(c1, c(1.0, 0.0), 1e-12) && close(c2, c(-3.0, 0.0), 1e-12));

        let zero = ScalarFunction::zero_dense(3);
        let r = check_linear_dependence(&s, &zero, &g).unwrap();
        assert_eq!(r.witness, Some((c(1.0, 0.0), c(0.0, 0.0))));
    }

    #[test]
    fn distinct_characters_on_c2_are_independent() {
        let s = finite("c2");
        let chars = enumerate_multiplicative(s.finite().unwrap(), 6).unwrap();
        let nz: Vec<_> = chars.iter().filter(|ch| !ch.is_zero()).collect();
        assert_eq!(nz.len(), 2);
        let (a, b) = (nz[0].to_c64(), nz[1].to_c64());
        // oracle: 2x2 determinant
        let det = a[0] * b[1] - a[1] * b[0];
        assert!(det.norm() > 0.5);
        let r = check_linear_dependence(&s, &nz[0].to_function(), &nz[1].to_function()).unwrap();
        assert!(!r.dependent && r.witness.is_none());
    }

    #[test]
    fn g_properties_on_catalogue_solutions() {
        for name in FINITE_FIXTURES {
            let s = finite(name);
            for sigma in enumerate_involutive_automorphisms(s.finite().unwrap(), 8).unwrap() {
                for alpha in [c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0)] {
                    for e in catalogue(&s, &sigma, alpha).unwrap() {
                        let pair = construct(&s, &sigma, &e.descriptor, e.free.as_ref(), &Registry::new(), Mode::Float).unwrap();
                        let r = check_g_properties(&s, &sigma, alpha, &pair.g, &pair.f).unwrap();
                        assert!(r.hypothesis_holds, "{name} {:?}", e.descriptor);
                        assert_eq!(r.counterexamples(), 0, "{name} {:?}", e.descriptor);
                    }
                }
            }
        }
    }

    #[test]
    fn g_properties_flag_non_solutions() {
        let s = finite("c2");
        let g = ScalarFunction::Dense(vec![c(0.3, 0.0), c(2.0, 1.0)]);
        let f = ScalarFunction::Dense(vec![c(1.0, 0.0), c(-1.0, 0.0)]);
        let r = check_g_properties(&s, &Involution::identity_for(&s), c(0.5, 0.0), &g, &f).unwrap();
        assert!(!r.hypothesis_holds);
        assert!(r.holds());
    }

    /// All (f, g) on null3 with σ = id, β = 1, values on a small grid,
    /// g ≠ 0 vanishing at z, satisfying the nine constraints.
    #[test]
    fn vanishing_dependence_grid_on_null3() {
        let s = finite("null3");
        let sigma = Involution::identity_for(&s);
        let grid = [-1.0, 0.0, 1.0, 2.0];
        let mut solutions = 0;
        for &f0 in &grid {
            for &f1 in &grid {
                for &f2 in &grid {
                    for &g0 in &grid {
                        for &g1 in &grid {
                            let f = [f0, f1, f2];
                            let g = [g0, g1, 0.0];
                            if g0 == 0.0 && g1 == 0.0 {
                                continue;
                            }
                            // every product is z = 2: f(z) = f(x)f(y) − g(x)g(y)
                            let ok = (0..3).all(|x| (0..3).all(|y| f[2] == f[x] * f[y] - g[x] * g[y]));
                            if !ok {
                                continue;
                            }
                            solutions += 1;
                            let fd = ScalarFunction::Dense(f.iter().map(|v| c(*v, 0.0)).collect());
                            let gd = ScalarFunction::Dense(g.iter().map(|v| c(*v, 0.0)).collect());
                            let r = check_vanishing_dependence(&s, &sigma, c(1.0, 0.0), &fd, &gd).unwrap();
                            assert!(r.applies());
                            assert!(r.holds(), "f={f:?} g={g:?}");
                        }
                    }
                }
            }
        }
        assert!(solutions > 0);
    }

    #[test]
    fn vanishing_dependence_vacuous_cases() {
        let s = finite("null3");
        let sigma = Involution::identity_for(&s);
        let z = ScalarFunction::zero_dense(3);
        let r = check_vanishing_dependence(&s, &sigma, c(1.0, 0.0), &z, &z).unwrap();
        assert!(r.hypothesis_failure.is_some() && r.holds());
        let g = ScalarFunction::Dense(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        // f = 0 forces g(x)g(y) = 0, so the equation fails and the check is vacuous
        let r = check_vanishing_dependence(&s, &sigma, c(2.0, 0.0), &z, &g).unwrap();
        assert!(r.hypothesis_failure.is_none() && !r.applies() && r.holds());
        assert!(check_linear_dependence(&s, &z, &g).unwrap().dependent);
    }

    #[test]
    fn parity_on_the_line() {
        let s = Carrier::Procedural(ProceduralSemigroup::real_line(64));
        let chi1 = ScalarFunction::Rule(FnRule::Exp { lambda: c(1.0, 0.0) });
        let chi2 = ScalarFunction::Rule(FnRule::Exp { lambda: c(-1.0, 0.0) });
        let one = c(1.0, 0.0);
        let r = check_two_character_parity(&s, &Involution::Negation, &chi1, &chi2, (one, one), (one, -one)).unwrap();
        assert_eq!(r.case, Some(1));
        assert!(r.conclusion_holds);
        let r = check_two_character_parity(&s, &Involution::Negation, &chi1, &chi2, (one, -one), (one, one)).unwrap();
        assert_eq!(r.case, Some(2));
        assert!(r.conclusion_holds);
        // no odd function is non-zero under the identity
        let r = check_two_character_parity(&s, &Involution::Identity, &chi1, &chi2, (one, one), (one, -one)).unwrap();
        assert_eq!(r.case, None);
        assert!(r.holds());
    }
}
