use rand::Rng;

use super::{rho_space, FamilyDescriptor, FunctionRef, HSpec};
use crate::error::Result;
use crate::functions::{enumerate_multiplicative, star, FnRule, ScalarFunction, MULTIPLICATIVE_ORDER_BOUND};
use crate::scalar::{c, close, C64};
use crate::semigroup::{Carrier, Element, Involution, ProceduralKind};

/// A descriptor together with the free function it needs, if any.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogueEntry {
    pub descriptor: FamilyDescriptor,
    pub free: Option<ScalarFunction>,
}

impl CatalogueEntry {
    fn new(descriptor: FamilyDescriptor) -> Self {
        CatalogueEntry { descriptor, free: None }
    }

    fn with_free(descriptor: FamilyDescriptor, free: ScalarFunction) -> Self {
        CatalogueEntry {
            descriptor,
            free: Some(free),
        }
    }
}

/// `value(x)` on S∖S² and zero on S² (window-restricted on procedural carriers).
pub fn vanishing_on_square(s: &Carrier, mut value: impl FnMut(&Element) -> C64) -> Result<ScalarFunction> {
    let square = s.square()?;
    if s.is_finite() {
        return Ok(ScalarFunction::Dense(
            s.window()
                .iter()
                .map(|x| if square.contains(x) { c(0.0, 0.0) } else { value(x) })
                .collect(),
        ));
    }
    Ok(ScalarFunction::Rule(FnRule::Sparse {
        entries: s
            .window()
            .into_iter()
            .filter(|x| !square.contains(x))
            .map(|x| (x, value(&x)))
            .collect(),
    }))
}

/// Non-zero multiplicative functions known on a carrier: all of them on a
/// finite carrier, a fixed sample of the continuous ones otherwise.
fn characters(s: &Carrier) -> Result<Vec<(FunctionRef, ScalarFunction)>> {
    if let Some(fs) = s.as_finite() {
        return Ok(enumerate_multiplicative(fs, MULTIPLICATIVE_ORDER_BOUND)?
            .into_iter()
            .enumerate()
            .filter(|(_, ch)| !ch.is_zero())
            .map(|(k, ch)| (FunctionRef::Character { character: k }, ch.to_function()))
            .collect());
    }
    let rules: Vec<FnRule> = match s {
        Carrier::Procedural(ps) => match ps.kind() {
            ProceduralKind::RealLine => [c(0.0, 0.0), c(1.0, 0.0), c(2.0, 1.0), c(-0.5, 0.0)]
                .into_iter()
                .map(|lambda| FnRule::Exp { lambda })
                .collect(),
            ProceduralKind::Heisenberg => [(0.0, 0.0), (1.0, 0.0), (1.0, 2.0), (-0.5, 0.25)]
                .into_iter()
                .map(|(a, b)| FnRule::HeisExp { a: c(a, 0.0), b: c(b, 0.0) })
                .collect(),
            ProceduralKind::NaturalsFrom2 => vec![
                FnRule::Const { value: c(1.0, 0.0) },
                FnRule::Parity,
                FnRule::Power { exponent: c(0.0, 0.5) },
            ],
        },
        Carrier::Finite(_) => unreachable!(),
    };
    Ok(rules
        .into_iter()
        .map(|r| {
            let f = ScalarFunction::Rule(r);
            (FunctionRef::Inline(f.clone()), f)
        })
        .collect())
}

fn differs(s: &Carrier, a: &ScalarFunction, b: &ScalarFunction) -> Result<bool> {
    for x in s.window() {
        if !close(a.eval(s, &x)?, b.eval(s, &x)?, 1e-9) {
            return Ok(true);
        }
    }
    Ok(false)
}

type NamedFunctions = Vec<(FunctionRef, ScalarFunction)>;

fn even_and_odd_characters(s: &Carrier, sigma: &Involution) -> Result<(NamedFunctions, NamedFunctions)> {
    let mut even = Vec::new();
    let mut other = Vec::new();
    for (r, f) in characters(s)? {
        if differs(s, &f, &star(&f, sigma)?)? {
            other.push((r, f));
        } else {
            even.push((r, f));
        }
    }
    Ok((even, other))
}

/// A fixed non-zero function for family 1.
fn sample_free(s: &Carrier) -> ScalarFunction {
    match s {
        Carrier::Finite(fs) => ScalarFunction::Dense((0..fs.order()).map(|k| c(1.0 + k as f64, 0.5 - k as f64)).collect()),
        Carrier::Procedural(ps) => ScalarFunction::Rule(match ps.kind() {
            ProceduralKind::RealLine => FnRule::RealLinear { slope: c(0.75, -0.25) },
            ProceduralKind::Heisenberg => FnRule::HeisLinear { a: c(1.0, 0.0), b: c(-0.5, 0.5) },
            ProceduralKind::NaturalsFrom2 => FnRule::PAdicCount { prime: 3 },
        }),
    }
}

fn has_non_products(s: &Carrier) -> Result<bool> {
    Ok(match s {
        Carrier::Finite(_) => s.square()?.len() < s.window().len(),
        Carrier::Procedural(ps) => ps.kind() == ProceduralKind::NaturalsFrom2,
    })
}

/// h-data for family 7 with a given even χ.
fn h_specs(s: &Carrier, sigma: &Involution, chi: &ScalarFunction) -> Result<Vec<HSpec>> {
    let zero = FunctionRef::named("zero");
    if s.is_finite() {
        let mut out = vec![HSpec::new(zero.clone(), zero.clone())];
        for v in rho_space(s, sigma, chi)? {
            out.push(HSpec::new(zero.clone(), ScalarFunction::Dense(v).into()));
        }
        return Ok(out);
    }
    let mut out = vec![HSpec::new(zero.clone(), zero)];
    if s.name() == "naturals-from-2" {
        let a5 = FunctionRef::Inline(ScalarFunction::Rule(FnRule::PAdicCount { prime: 5 }));
        out.push(HSpec::new(a5, ScalarFunction::constant(c(0.5, -1.0)).into()));
    }
    Ok(out)
}

/// q = (t + (α²−1)/t)/2, for which 1 + q² − α² = ((t − (α²−1)/t)/2)².
/// With t a power of two and α dyadic, q and the root are exact binary
/// numbers.
fn exact_root_q(alpha: C64, t: f64) -> C64 {
    (c(t, 0.0) + (alpha * alpha - 1.0) / t) / 2.0
}

/// Representatives of every family that applies to (s, σ, α), with fixed
/// parameters. Families 1–3 and the curves in q of families 4 and 5 are
/// represented by a few points each.
pub fn catalogue(s: &Carrier, sigma: &Involution, alpha: C64) -> Result<Vec<CatalogueEntry>> {
    let mut out = Vec::new();
    let one = c(1.0, 0.0);
    let is_pm_one = close(alpha, one, 1e-12) || close(alpha, -one, 1e-12);
    if is_pm_one {
        out.push(CatalogueEntry::with_free(FamilyDescriptor::new(1, alpha), sample_free(s)));
    }
    if has_non_products(s)? {
        let mut k = 0.0;
        let free = vanishing_on_square(s, |_| {
            k += 1.0;
            c(k, 1.0 - k)
        })?;
        if !close(alpha, one, 1e-12) {
            out.push(CatalogueEntry::with_free(FamilyDescriptor::new(2, alpha), free.clone()));
        }
        if !close(alpha, -one, 1e-12) {
            out.push(CatalogueEntry::with_free(FamilyDescriptor::new(3, alpha), free));
        }
    }
    let (even, odd) = even_and_odd_characters(s, sigma)?;
    let curve = [exact_root_q(alpha, 2.0), exact_root_q(alpha, 0.5)];
    let mut qs = vec![alpha, -alpha];
    for q in curve {
        if !qs.iter().any(|p| close(*p, q, 1e-12)) {
            qs.push(q);
        }
    }
    for (r, _) in &even {
        for &q in &qs {
            for branch in [1, -1] {
                out.push(CatalogueEntry::new(
                    FamilyDescriptor::new(4, alpha).with_q(q).with_branch(branch).with_chi(r.clone()),
                ));
            }
        }
    }
    for (i, (r1, _)) in even.iter().enumerate() {
        for (j, (r2, _)) in even.iter().enumerate() {
            if i == j {
                continue;
            }
            if !close(alpha, c(0.0, 0.0), 1e-12) {
                out.push(CatalogueEntry::new(FamilyDescriptor::new(6, alpha).with_chis(r1.clone(), r2.clone())));
            }
            if i < j {
                for q in curve {
                    if close(q, alpha, 1e-12) || close(q, -alpha, 1e-12) {
                        continue;
                    }
                    for branch in [1, -1] {
                        out.push(CatalogueEntry::new(
                            FamilyDescriptor::new(5, alpha)
                                .with_q(q)
                                .with_branch(branch)
                                .with_chis(r1.clone(), r2.clone()),
                        ));
                    }
                }
            }
        }
    }
    for (r, chi) in &even {
        for spec in h_specs(s, sigma, chi)? {
            for branch in [1, -1] {
                out.push(CatalogueEntry::new(
                    FamilyDescriptor::new(7, alpha).with_branch(branch).with_chi(r.clone()).with_h(spec.clone()),
                ));
            }
        }
    }
    if !is_pm_one {
        for (r, _) in &odd {
            out.push(CatalogueEntry::new(FamilyDescriptor::new(8, alpha).with_chi(r.clone())));
        }
    }
    Ok(out)
}

fn random_c64(rng: &mut impl Rng, radius: f64) -> C64 {
    loop {
        let z = c(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius));
        if z.norm() <= radius {
            return z;
        }
    }
}

/// A random valid descriptor on a finite carrier, uniformly over the
/// families that apply, with continuous random parameters.
pub fn random_descriptor(s: &Carrier, sigma: &Involution, rng: &mut impl Rng) -> Result<CatalogueEntry> {
    let n = s.finite()?.order();
    let (even, odd) = even_and_odd_characters(s, sigma)?;
    let mut families = vec![1u8, 4, 7];
    if has_non_products(s)? {
        families.extend([2, 3]);
    }
    if even.len() >= 2 {
        families.extend([5, 6]);
    }
    if !odd.is_empty() {
        families.push(8);
    }
    families.sort_unstable();
    let tag = families[rng.gen_range(0..families.len())];
    let mut alpha = random_c64(rng, 2.0);
    let branch = if rng.gen_bool(0.5) { 1 } else { -1 };
    let pick = |rng: &mut dyn rand::RngCore, list: &[(FunctionRef, ScalarFunction)]| {
        list[rng.gen_range(0..list.len())].clone()
    };
    let d = FamilyDescriptor::new(tag, alpha);
    Ok(match tag {
        1 => {
            alpha = if rng.gen_bool(0.5) { c(1.0, 0.0) } else { c(-1.0, 0.0) };
            let free = ScalarFunction::Dense((0..n).map(|_| random_c64(rng, 2.0)).collect());
            CatalogueEntry::with_free(FamilyDescriptor::new(1, alpha), free)
        }
        2 | 3 => {
            let free = vanishing_on_square(s, |_| random_c64(rng, 2.0))?;
            CatalogueEntry::with_free(d, free)
        }
        4 => {
            let (r, _) = pick(rng, &even);
            CatalogueEntry::new(d.with_q(random_c64(rng, 2.0)).with_branch(branch).with_chi(r))
        }
        5 | 6 => {
            let i = rng.gen_range(0..even.len());
            let mut j = rng.gen_range(0..even.len() - 1);
            if j >= i {
                j += 1;
            }
            let d = d.with_chis(even[i].0.clone(), even[j].0.clone());
            if tag == 5 {
                CatalogueEntry::new(d.with_q(random_c64(rng, 2.0)).with_branch(branch))
            } else {
                CatalogueEntry::new(d)
            }
        }
        7 => {
            let (r, chi) = pick(rng, &even);
            let basis = rho_space(s, sigma, &chi)?;
            let mut rho = vec![c(0.0, 0.0); n];
            for v in &basis {
                let k = random_c64(rng, 2.0);
                for (a, b) in rho.iter_mut().zip(v) {
                    *a += k * b;
                }
            }
            let zero = FunctionRef::named("zero");
            CatalogueEntry::new(
                d.with_branch(branch)
                    .with_chi(r)
                    .with_h(HSpec::new(zero, ScalarFunction::Dense(rho).into())),
            )
        }
        _ => {
            let (r, _) = pick(rng, &odd);
            CatalogueEntry::new(d.with_chi(r))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{construct, Mode, Registry};
    use crate::semigroup::{finite_fixture, FixtureId, FINITE_FIXTURES};
    use rand::SeedableRng;

    #[test]
    fn catalogue_entries_construct() {
        let reg = Registry::new();
        for name in FINITE_FIXTURES {
            let s = Carrier::Finite(finite_fixture(name).unwrap());
            for sigma in s.involutions().unwrap() {
                for alpha in [c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0)] {
                    for e in catalogue(&s, &sigma, alpha).unwrap() {
                        construct(&s, &sigma, &e.descriptor, e.free.as_ref(), &reg, Mode::Float)
                            .unwrap_or_else(|err| panic!("{name} {e:?}: {err}"));
                    }
                }
            }
        }
    }

    #[test]
    fn procedural_catalogue_constructs() {
        let reg = Registry::new();
        for id in [FixtureId::RealLine, FixtureId::NaturalsFrom2] {
            let s = id.carrier(Some(if id == FixtureId::RealLine { 16 } else { 40 })).unwrap();
            for sigma in s.involutions().unwrap() {
                for e in catalogue(&s, &sigma, c(2.0, 0.0)).unwrap() {
                    construct(&s, &sigma, &e.descriptor, e.free.as_ref(), &reg, Mode::Float)
                        .unwrap_or_else(|err| panic!("{id} {e:?}: {err}"));
                }
            }
        }
    }

    #[test]
    fn random_descriptors_are_valid() {
        let reg = Registry::new();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for name in FINITE_FIXTURES {
            let s = Carrier::Finite(finite_fixture(name).unwrap());
            for sigma in s.involutions().unwrap() {
                for _ in 0..20 {
                    let e = random_descriptor(&s, &sigma, &mut rng).unwrap();
                    construct(&s, &sigma, &e.descriptor, e.free.as_ref(), &reg, Mode::Float)
                        .unwrap_or_else(|err| panic!("{name} {e:?}: {err}"));
                }
            }
        }
    }

    #[test]
    fn square_vanishing_helper() {
        let s = Carrier::Finite(finite_fixture("null3").unwrap());
        let f = vanishing_on_square(&s, |_| c(2.0, 0.0)).unwrap();
        assert_eq!(f, ScalarFunction::Dense(vec![c(2.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]));
    }
}
