//! The eight solution families and their constructors.

mod catalogue;
mod h;
mod registry;

use serde::{Deserialize, Serialize};

use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::functions::{is_even, is_multiplicative, linear_combination, star, Evaluator, ScalarFunction};
use crate::scalar::{c, close, tol, C64};
use crate::semigroup::{Carrier, Involution};

pub use catalogue::{catalogue, random_descriptor, vanishing_on_square, CatalogueEntry};
pub use h::{assemble_h, build_h, check_h, rho_space, HReport, HSpec};
pub use registry::{builtin_function, FunctionRef, Registry};

/// Float or exact (cyclotomic) arithmetic for dense constructions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Float,
    Exact,
}

/// A parametrized member of one of the eight families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyDescriptor {
    pub family_tag: u8,
    pub alpha: C64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign_branch: Option<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<FunctionRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi1: Option<FunctionRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi2: Option<FunctionRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_spec: Option<HSpec>,
}

impl FamilyDescriptor {
    pub fn new(family_tag: u8, alpha: C64) -> Self {
        FamilyDescriptor {
            family_tag,
            alpha,
            q: None,
            sign_branch: None,
            chi: None,
            chi1: None,
            chi2: None,
            h_spec: None,
        }
    }

    pub fn with_q(mut self, q: C64) -> Self {
        self.q = Some(q);
        self
    }

    pub fn with_branch(mut self, branch: i8) -> Self {
        self.sign_branch = Some(branch);
        self
    }

    pub fn with_chi(mut self, chi: impl Into<FunctionRef>) -> Self {
        self.chi = Some(chi.into());
        self
    }

    pub fn with_chis(mut self, chi1: impl Into<FunctionRef>, chi2: impl Into<FunctionRef>) -> Self {
        self.chi1 = Some(chi1.into());
        self.chi2 = Some(chi2.into());
        self
    }

    pub fn with_h(mut self, h: HSpec) -> Self {
        self.h_spec = Some(h);
        self
    }

    /// Whether the family takes a caller-supplied function.
    pub fn needs_free_function(&self) -> bool {
        matches!(self.family_tag, 1..=3)
    }
}

impl From<usize> for FunctionRef {
    fn from(k: usize) -> Self {
        FunctionRef::Character { character: k }
    }
}

/// A candidate solution (g, f) for a given α.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionPair {
    pub g: ScalarFunction,
    pub f: ScalarFunction,
    pub alpha: C64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<FamilyDescriptor>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Basis {
    Chi,
    ChiStar,
    Chi1,
    Chi2,
    H,
    Free,
}

type Recipe<F> = Vec<(F, Basis)>;

fn param<F: Field>(z: Option<C64>, what: &str) -> Result<F> {
    z.map(F::from_c64).ok_or_else(|| Error::Descriptor(format!("missing parameter {what}")))
}

fn branch_of(d: &FamilyDescriptor) -> Result<i8> {
    match d.sign_branch {
        Some(b @ (1 | -1)) => Ok(b),
        Some(b) => Err(Error::Descriptor(format!("sign_branch must be +1 or -1, got {b}"))),
        None => Err(Error::Descriptor("missing sign_branch".into())),
    }
}

/// Coefficients of (g, f) in the basis functions of the family.
fn recipe<F: Field>(d: &FamilyDescriptor) -> Result<(Recipe<F>, Recipe<F>)> {
    use Basis::*;
    let one = F::one();
    let half = F::half();
    let alpha = F::from_c64(d.alpha);
    let root = |q: &F| -> Result<F> {
        let z = one.clone() + q.clone() * q.clone() - alpha.clone() * alpha.clone();
        z.sqrt_branch(branch_of(d)?)
            .ok_or_else(|| Error::Inexact(format!("square root of {:?}", z.to_c64())))
    };
    Ok(match d.family_tag {
        1 => (vec![(alpha, Free)], vec![(one, Free)]),
        2 => (vec![(one.clone(), Free)], vec![(one, Free)]),
        3 => (vec![(one.clone(), Free)], vec![(-one, Free)]),
        4 => {
            let q: F = param(d.q, "q")?;
            let s = root(&q)?;
            (vec![(half.clone() * (one + s), Chi)], vec![(half * (q + alpha), Chi)])
        }
        5 => {
            let q: F = param(d.q, "q")?;
            let s = root(&q)?;
            (
                vec![
                    (half.clone() * (one.clone() + s.clone()), Chi1),
                    (half.clone() * (one - s), Chi2),
                ],
                vec![
                    (half.clone() * (alpha.clone() + q.clone()), Chi1),
                    (half * (alpha - q), Chi2),
                ],
            )
        }
        6 => (vec![(one, Chi2)], vec![(alpha, Chi1)]),
        7 => {
            let sign = if branch_of(d)? > 0 { one.clone() } else { -one.clone() };
            (vec![(one.clone(), Chi), (sign, H)], vec![(alpha, Chi), (one, H)])
        }
        8 => {
            let plus = half.clone() * (one.clone() + alpha.clone());
            let minus = half * (one - alpha);
            (
                vec![(plus.clone(), Chi), (minus.clone(), ChiStar)],
                vec![(plus, Chi), (-minus, ChiStar)],
            )
        }
        t => return Err(Error::Descriptor(format!("family_tag must be 1..8, got {t}"))),
    })
}

fn window_max_abs(s: &Carrier, f: &ScalarFunction) -> Result<f64> {
    let mut ev = Evaluator::new(s, f);
    let mut m: f64 = 0.0;
    for x in s.window() {
        let v = ev.get(&x)?.to_c64();
        m = m.max(v.re.abs()).max(v.im.abs());
    }
    Ok(m)
}

fn distinct(s: &Carrier, a: &ScalarFunction, b: &ScalarFunction) -> Result<bool> {
    let mut ea = Evaluator::new(s, a);
    let mut eb = Evaluator::new(s, b);
    for x in s.window() {
        if !close(ea.get(&x)?.to_c64(), eb.get(&x)?.to_c64(), tol::IDENTITY) {
            return Ok(true);
        }
    }
    Ok(false)
}

fn require(ok: bool, msg: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Descriptor(msg.into()))
    }
}

fn require_even_character(s: &Carrier, sigma: &Involution, chi: &ScalarFunction, what: &str) -> Result<()> {
    if !is_multiplicative(s, chi)? {
        return Err(Error::NotMultiplicative(what.to_string()));
    }
    if window_max_abs(s, chi)? == 0.0 {
        return Err(Error::ZeroCharacter);
    }
    require(is_even(s, chi, sigma)?, format!("{what} is not sigma-even"))
}

const PARAM_TOL: f64 = 1e-12;

/// The pair (g, f) of the family named by `d`, after checking the
/// family's side conditions. `free` is f for family 1 and g for families
/// 2 and 3.
pub fn construct(
    s: &Carrier,
    sigma: &Involution,
    d: &FamilyDescriptor,
    free: Option<&ScalarFunction>,
    registry: &Registry,
    mode: Mode,
) -> Result<SolutionPair> {
    let exact = mode == Mode::Exact;
    if exact && !s.is_finite() {
        return Err(Error::RequiresFinite);
    }
    let violations = sigma.violations(s)?;
    if let Some(v) = violations.first() {
        return Err(Error::NotAnInvolution(v.clone()));
    }
    let alpha = d.alpha;
    let resolve = |r: &Option<FunctionRef>, what: &str| -> Result<ScalarFunction> {
        let r = r.as_ref().ok_or_else(|| Error::Descriptor(format!("family {} needs {what}", d.family_tag)))?;
        registry.resolve(s, r, exact)
    };
    let is_pm_one = close(alpha, c(1.0, 0.0), PARAM_TOL) || close(alpha, c(-1.0, 0.0), PARAM_TOL);

    let mut free_fn = None;
    let (mut chi, mut chi_star, mut chi1, mut chi2, mut h) = (None, None, None, None, None);
    let mut provenance = d.clone();
    match d.family_tag {
        1..=3 => {
            let f = free.ok_or_else(|| Error::Descriptor(format!("family {} needs a free function", d.family_tag)))?;
            let f = registry.resolve(s, &FunctionRef::Inline(f.clone()), exact)?;
            require(window_max_abs(s, &f)? > 0.0, "the free function must be non-zero")?;
            match d.family_tag {
                1 => require(is_pm_one, "family 1 needs alpha = 1 or alpha = -1")?,
                2 => require(!close(alpha, c(1.0, 0.0), PARAM_TOL), "family 2 needs alpha != 1")?,
                _ => require(!close(alpha, c(-1.0, 0.0), PARAM_TOL), "family 3 needs alpha != -1")?,
            }
            if d.family_tag != 1 {
                for x in s.square()? {
                    let v = f.eval(s, &x)?;
                    if !close(v, c(0.0, 0.0), tol::IDENTITY) {
                        return Err(Error::NotVanishingOnSquare(x));
                    }
                }
            }
            free_fn = Some(f);
        }
        4 => {
            let x = resolve(&d.chi, "chi")?;
            require_even_character(s, sigma, &x, "chi")?;
            chi = Some(x);
        }
        5 | 6 => {
            let a = resolve(&d.chi1, "chi1")?;
            let b = resolve(&d.chi2, "chi2")?;
            require_even_character(s, sigma, &a, "chi1")?;
            require_even_character(s, sigma, &b, "chi2")?;
            require(distinct(s, &a, &b)?, "chi1 and chi2 must differ")?;
            if d.family_tag == 5 {
                let q = d.q.ok_or_else(|| Error::Descriptor("missing parameter q".into()))?;
                require(
                    !close(q, alpha, PARAM_TOL) && !close(q, -alpha, PARAM_TOL),
                    "family 5 needs q != alpha and q != -alpha",
                )?;
            } else {
                require(!close(alpha, c(0.0, 0.0), PARAM_TOL), "family 6 needs alpha != 0")?;
            }
            chi1 = Some(a);
            chi2 = Some(b);
        }
        7 => {
            let x = resolve(&d.chi, "chi")?;
            require_even_character(s, sigma, &x, "chi")?;
            let spec = d.h_spec.as_ref().ok_or_else(|| Error::Descriptor("family 7 needs h_spec".into()))?;
            let additive = registry.resolve(s, &spec.additive, exact)?;
            let rho = registry.resolve(s, &spec.rho, exact)?;
            let (hf, report) = build_h(s, sigma, &x, &additive, &rho)?;
            let mut spec = spec.clone();
            spec.additive_even = report.additive_even;
            spec.rho_even = report.rho_even;
            provenance.h_spec = Some(spec);
            chi = Some(x);
            h = Some(hf);
        }
        8 => {
            require(!is_pm_one, "family 8 needs alpha != 1 and alpha != -1")?;
            let x = resolve(&d.chi, "chi")?;
            if !is_multiplicative(s, &x)? {
                return Err(Error::NotMultiplicative("chi".into()));
            }
            let xs = star(&x, sigma)?;
            require(distinct(s, &x, &xs)?, "family 8 needs chi != chi*")?;
            chi = Some(x);
            chi_star = Some(xs);
        }
        t => return Err(Error::Descriptor(format!("family_tag must be 1..8, got {t}"))),
    }

    let basis = |b: Basis| -> &ScalarFunction {
        let slot = match b {
            Basis::Chi => &chi,
            Basis::ChiStar => &chi_star,
            Basis::Chi1 => &chi1,
            Basis::Chi2 => &chi2,
            Basis::H => &h,
            Basis::Free => &free_fn,
        };
        slot.as_ref().expect("basis function resolved above")
    };

    let (g, f) = if exact {
        let (rg, rf) = recipe::<Cyclotomic>(d)?;
        let n = s.finite()?.order();
        let build = |r: &Recipe<Cyclotomic>| -> Result<ScalarFunction> {
            let mut acc = vec![Cyclotomic::zero(); n];
            for (k, b) in r {
                for (a, v) in acc.iter_mut().zip(basis(*b).exact_values(s)?) {
                    *a = a.clone() + k.clone() * v;
                }
            }
            Ok(ScalarFunction::exact(acc))
        };
        (build(&rg)?, build(&rf)?)
    } else {
        let (rg, rf) = recipe::<C64>(d)?;
        let build = |r: &Recipe<C64>| -> Result<ScalarFunction> {
            let terms: Vec<(C64, &ScalarFunction)> = r.iter().map(|(k, b)| (*k, basis(*b))).collect();
            linear_combination(s, &terms)
        };
        (build(&rg)?, build(&rf)?)
    };
    Ok(SolutionPair {
        g,
        f,
        alpha,
        provenance: Some(provenance),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::FnRule;
    use crate::semigroup::{finite_fixture, Element, FixtureId};

    fn trivial() -> Carrier {
        Carrier::Finite(finite_fixture("trivial").unwrap())
    }

    #[test]
    fn family_four_on_a_point() {
        let s = trivial();
        let sigma = Involution::Permutation(vec![0]);
        let (alpha, q) = (c(0.5, 1.0), c(-2.0, 0.25));
        for branch in [1, -1] {
            let d = FamilyDescriptor::new(4, alpha).with_q(q).with_branch(branch).with_chi(FunctionRef::named("one"));
            let pair = construct(&s, &sigma, &d, None, &Registry::new(), Mode::Float).unwrap();
            let root = crate::scalar::sqrt_branch(c(1.0, 0.0) + q * q - alpha * alpha, branch);
            let g = pair.g.eval(&s, &Element::Index(0)).unwrap();
            let f = pair.f.eval(&s, &Element::Index(0)).unwrap();
            assert!((f - (q + alpha) / 2.0).norm() < 1e-15);
            assert!((g - (1.0 + root) / 2.0).norm() < 1e-15);
            assert!((g - g * g + f * f - alpha * f).norm() < 1e-14);
        }
    }

    #[test]
    fn family_eight_on_the_line() {
        let s = FixtureId::RealLine.carrier(None).unwrap();
        let lambda = c(2.0, 1.0);
        let alpha = c(0.0, 1.0);
        let d = FamilyDescriptor::new(8, alpha).with_chi(ScalarFunction::Rule(FnRule::Exp { lambda }));
        let pair = construct(&s, &Involution::Negation, &d, None, &Registry::new(), Mode::Float).unwrap();
        let i = c(0.0, 1.0);
        for x in s.window() {
            let Element::Real(t) = x else { unreachable!() };
            let (cs, sn) = ((lambda * t).cos(), (lambda * t).sin());
            let got = pair.f.eval(&s, &x).unwrap();
            assert!((got - (alpha * cs + i * sn)).norm() < 1e-12, "{t}: {got} vs {}", alpha * cs + i * sn);
            assert!((pair.g.eval(&s, &x).unwrap() - (cs + i * alpha * sn)).norm() < 1e-12);
        }
    }

    #[test]
    fn side_conditions() {
        let s = Carrier::Finite(finite_fixture("c3").unwrap());
        let inv = Involution::Permutation(vec![0, 2, 1]);
        let reg = Registry::new();
        let bad = |d: FamilyDescriptor, free: Option<&ScalarFunction>| construct(&s, &inv, &d, free, &reg, Mode::Float);
        assert!(bad(FamilyDescriptor::new(8, c(1.0, 0.0)).with_chi(1usize), None).is_err());
        // the trivial character is even, so chi = chi* is rejected
        assert!(bad(FamilyDescriptor::new(8, c(2.0, 0.0)).with_chi(1usize), None).is_err());
        assert!(bad(FamilyDescriptor::new(8, c(2.0, 0.0)).with_chi(2usize), None).is_ok());
        // the cube-root characters are not even under inversion
        assert!(bad(FamilyDescriptor::new(4, c(2.0, 0.0)).with_q(c(0.0, 0.0)).with_branch(1).with_chi(2usize), None).is_err());
        let f = ScalarFunction::Dense(vec![c(1.0, 0.0); 3]);
        assert!(matches!(bad(FamilyDescriptor::new(2, c(0.0, 0.0)), Some(&f)), Err(Error::NotVanishingOnSquare(_))));
        assert!(bad(FamilyDescriptor::new(1, c(0.5, 0.0)), Some(&f)).is_err());
        assert!(bad(FamilyDescriptor::new(1, c(-1.0, 0.0)), Some(&f)).is_ok());
        assert!(bad(FamilyDescriptor::new(9, c(0.0, 0.0)), None).is_err());
    }

    #[test]
    fn exact_family_eight_on_c3() {
        let s = Carrier::Finite(finite_fixture("c3").unwrap());
        let inv = Involution::Permutation(vec![0, 2, 1]);
        let d = FamilyDescriptor::new(8, c(2.0, 0.0)).with_chi(2usize);
        let pair = construct(&s, &inv, &d, None, &Registry::new(), Mode::Exact).unwrap();
        let (ScalarFunction::Exact { exact: g }, ScalarFunction::Exact { exact: f }) = (&pair.g, &pair.f) else {
            panic!("exact mode gives exact functions")
        };
        let fs = s.finite().unwrap();
        let alpha = Cyclotomic::from_integer(2);
        for x in 0..3 {
            for y in 0..3 {
                let m = fs.mul(x, inv_apply(y));
                let lhs = g[m].clone();
                let rhs = g[x].clone() * g[y].clone() - f[x].clone() * f[y].clone() + alpha.clone() * f[m].clone();
                assert_eq!(lhs, rhs);
            }
        }
        fn inv_apply(y: usize) -> usize {
            [0, 2, 1][y]
        }
    }

    #[test]
    fn descriptor_json() {
        let d = FamilyDescriptor::new(5, c(2.0, 0.0)).with_q(c(0.0, 1.0)).with_branch(-1).with_chis(1usize, FunctionRef::named("one"));
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(
            json,
            r#"{"family_tag":5,"alpha":[2.0,0.0],"q":[0.0,1.0],"sign_branch":-1,"chi1":{"character":1},"chi2":{"name":"one"}}"#
        );
        assert_eq!(serde_json::from_str::<FamilyDescriptor>(&json).unwrap(), d);
    }
}
