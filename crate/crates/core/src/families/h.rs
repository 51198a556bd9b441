use serde::{Deserialize, Serialize};

use super::FunctionRef;
use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::functions::{is_additive, null_sets, Evaluator, FnRule, NullSets, ScalarFunction};
use crate::linalg::complex_nullspace;
use crate::scalar::{c, tol, DdComplex, C64};
use crate::semigroup::{Carrier, Element, ElementSubset, Involution};

/// The data of h in the expanded form of the sine-law family: A on S∖I_χ
/// and ρ on P_χ. The evenness flags are filled in by [`build_h`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HSpec {
    pub additive: FunctionRef,
    pub rho: FunctionRef,
    #[serde(default)]
    pub additive_even: bool,
    #[serde(default)]
    pub rho_even: bool,
}

impl HSpec {
    pub fn new(additive: FunctionRef, rho: FunctionRef) -> Self {
        HSpec {
            additive,
            rho,
            additive_even: false,
            rho_even: false,
        }
    }
}

/// Counterexamples found while validating h. Each entry names the
/// offending elements.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct HReport {
    pub p_chi: Vec<Element>,
    pub window_certified: bool,
    pub additivity: Vec<String>,
    pub parity: Vec<String>,
    pub condition_i: Vec<String>,
    pub condition_ii: Vec<String>,
    pub sine_law: Vec<String>,
    pub additive_even: bool,
    pub rho_even: bool,
}

impl HReport {
    pub fn holds(&self) -> bool {
        self.additivity.is_empty()
            && self.parity.is_empty()
            && self.condition_i.is_empty()
            && self.condition_ii.is_empty()
            && self.sine_law.is_empty()
    }

    fn first_error(&self) -> Option<Error> {
        let lists: [(&'static str, &Vec<String>); 5] = [
            ("additivity", &self.additivity),
            ("parity", &self.parity),
            ("(I)", &self.condition_i),
            ("(II)", &self.condition_ii),
            ("sine law", &self.sine_law),
        ];
        lists.into_iter().find(|(_, v)| !v.is_empty()).map(|(condition, v)| Error::HCondition {
            condition,
            detail: format!("{} ({} counterexamples)", v[0], v.len()),
        })
    }
}

fn dd_close(a: DdComplex, b: DdComplex) -> bool {
    let d = (a - b).to_c64();
    d.re.abs() <= tol::IDENTITY && d.im.abs() <= tol::IDENTITY
}

/// χA on S∖I_χ, 0 on I_χ∖P_χ, ρ on P_χ.
pub fn assemble_h(
    s: &Carrier,
    chi: &ScalarFunction,
    additive: &ScalarFunction,
    rho: &ScalarFunction,
    sets: &NullSets,
) -> Result<ScalarFunction> {
    if !s.is_finite() {
        return Ok(ScalarFunction::Rule(FnRule::NullSplit {
            chi: Box::new(chi.clone()),
            additive: Box::new(additive.clone()),
            rho: Box::new(rho.clone()),
            seeds: sets.p_chi.iter().copied().collect(),
        }));
    }
    let n = s.finite()?.order();
    if let ScalarFunction::Exact { exact: chi_v } = chi {
        let a = additive.exact_values(s)?;
        let r = rho.exact_values(s)?;
        let values = (0..n)
            .map(|i| {
                let x = Element::Index(i);
                if !chi_v[i].is_zero() {
                    chi_v[i].clone() * a[i].clone()
                } else if sets.p_chi.contains(&x) {
                    r[i].clone()
                } else {
                    Cyclotomic::zero()
                }
            })
            .collect();
        return Ok(ScalarFunction::exact(values));
    }
    let chi_v = chi.dense_values(s)?;
    let a = additive.dense_values(s)?;
    let r = rho.dense_values(s)?;
    Ok(ScalarFunction::Dense(
        (0..n)
            .map(|i| {
                if chi_v[i] != c(0.0, 0.0) {
                    chi_v[i] * a[i]
                } else if sets.p_chi.contains(&Element::Index(i)) {
                    r[i]
                } else {
                    c(0.0, 0.0)
                }
            })
            .collect(),
    ))
}

/// Validates an assembled h. Triples (u, p, v) range over the triple
/// window on procedural carriers; pairs range over the whole window.
pub fn check_h(
    s: &Carrier,
    sigma: &Involution,
    chi: &ScalarFunction,
    additive: &ScalarFunction,
    rho: &ScalarFunction,
    h: &ScalarFunction,
    sets: &NullSets,
) -> Result<HReport> {
    let mut report = HReport {
        p_chi: sets.p_chi.iter().copied().collect(),
        window_certified: sets.window_certified,
        ..Default::default()
    };
    let window = s.window();
    let units: Vec<Element> = window.iter().filter(|x| !sets.i_chi.contains(x)).copied().collect();
    let triple_units: Vec<Element> = if s.is_finite() {
        units.clone()
    } else {
        s.triple_window().into_iter().filter(|x| !sets.i_chi.contains(x)).collect()
    };
    let mut hv = Evaluator::new(s, h);
    let mut cv = Evaluator::new(s, chi);
    let mut av = Evaluator::new(s, additive);
    let mut rv = Evaluator::new(s, rho);

    if !is_additive(s, &ElementSubset::SupportOf(chi.clone()), additive)? {
        report.additivity.push("A(xy) != A(x) + A(y) on S minus I_chi".into());
    }
    for u in &units {
        if !dd_close(av.get(&sigma.apply(u)?)?, av.get(u)?) {
            report.parity.push(format!("A(sigma({u})) != A({u})"));
        }
    }
    for p in &sets.p_chi {
        if !dd_close(rv.get(&sigma.apply(p)?)?, rv.get(p)?) {
            report.parity.push(format!("rho(sigma({p})) != rho({p})"));
        }
    }
    for x in &window {
        if !dd_close(hv.get(&sigma.apply(x)?)?, hv.get(x)?) {
            report.parity.push(format!("h(sigma({x})) != h({x})"));
        }
    }

    for p in &sets.p_chi {
        let rp = rv.get(p)?;
        for u in &units {
            let want = rp * cv.get(u)?;
            if !dd_close(hv.get(&s.compose(u, p)?)?, want) {
                report.condition_i.push(format!("rho({u}*{p}) != rho({p}) chi({u})"));
            }
            if !dd_close(hv.get(&s.compose(p, u)?)?, want) {
                report.condition_i.push(format!("rho({p}*{u}) != rho({p}) chi({u})"));
            }
        }
        for u in &triple_units {
            let up = s.compose(u, p)?;
            for v in &triple_units {
                let uv = s.compose(u, v)?;
                if !dd_close(hv.get(&s.compose(&up, v)?)?, rp * cv.get(&uv)?) {
                    report.condition_i.push(format!("rho({u}*{p}*{v}) != rho({p}) chi({u}*{v})"));
                }
            }
        }
    }

    for x in sets.i_chi.difference(&sets.p_chi) {
        for y in &units {
            for prod in [s.compose(x, y)?, s.compose(y, x)?] {
                if !dd_close(hv.get(&prod)?, DdComplex::zero()) {
                    report.condition_ii.push(format!("h({prod}) != 0 for {x} in I_chi minus P_chi, {y} not in I_chi"));
                }
            }
        }
    }

    for x in &window {
        for y in &window {
            let lhs = hv.get(&s.compose(x, y)?)?;
            let rhs = hv.get(x)? * cv.get(y)? + hv.get(y)? * cv.get(x)?;
            if !dd_close(lhs, rhs) {
                report.sine_law.push(format!("h({x}*{y}) != h({x})chi({y}) + h({y})chi({x})"));
            }
        }
    }
    report.additive_even = !report.parity.iter().any(|m| m.starts_with("A("));
    report.rho_even = !report.parity.iter().any(|m| m.starts_with("rho("));
    Ok(report)
}

/// Assembles h from (χ, A, ρ) and rejects it unless every condition holds.
pub fn build_h(
    s: &Carrier,
    sigma: &Involution,
    chi: &ScalarFunction,
    additive: &ScalarFunction,
    rho: &ScalarFunction,
) -> Result<(ScalarFunction, HReport)> {
    let sets = null_sets(s, chi)?;
    let h = assemble_h(s, chi, additive, rho, &sets)?;
    let report = check_h(s, sigma, chi, additive, rho, &h, &sets)?;
    match report.first_error() {
        Some(e) => Err(e),
        None => Ok((h, report)),
    }
}

/// Basis of the admissible ρ on a finite carrier (A = 0 there), as dense
/// vectors supported on P_χ.
pub fn rho_space(s: &Carrier, sigma: &Involution, chi: &ScalarFunction) -> Result<Vec<Vec<C64>>> {
    let fs = s.finite()?;
    let n = fs.order();
    let sets = null_sets(s, chi)?;
    let p: Vec<usize> = sets.p_chi.iter().filter_map(Element::index).collect();
    if p.is_empty() {
        return Ok(Vec::new());
    }
    let chi_v = chi.dense_values(s)?;
    let col = |x: usize| p.iter().position(|&q| q == x);
    let mut rows: Vec<Vec<C64>> = Vec::new();
    let mut push = |terms: &[(usize, C64)]| {
        let mut row = vec![c(0.0, 0.0); p.len()];
        for &(x, k) in terms {
            if let Some(j) = col(x) {
                row[j] += k;
            }
        }
        rows.push(row);
    };
    let one = c(1.0, 0.0);
    for x in 0..n {
        for y in 0..n {
            push(&[(fs.mul(x, y), one), (x, -chi_v[y]), (y, -chi_v[x])]);
        }
        if let Element::Index(sx) = sigma.apply(&Element::Index(x))? {
            push(&[(sx, one), (x, -one)]);
        }
    }
    let units: Vec<usize> = (0..n).filter(|&x| chi_v[x] != c(0.0, 0.0)).collect();
    for &q in &p {
        for &u in &units {
            push(&[(fs.mul(u, q), one), (q, -chi_v[u])]);
            push(&[(fs.mul(q, u), one), (q, -chi_v[u])]);
            for &v in &units {
                push(&[(fs.mul(fs.mul(u, q), v), one), (q, -chi_v[fs.mul(u, v)])]);
            }
        }
    }
    for x in sets.i_chi.iter().filter_map(Element::index).filter(|x| !p.contains(x)) {
        for &y in &units {
            push(&[(fs.mul(x, y), one)]);
            push(&[(fs.mul(y, x), one)]);
        }
    }
    let m = nalgebra::DMatrix::from_fn(rows.len(), p.len(), |i, j| rows[i][j]);
    let basis = complex_nullspace(&m, tol::RANK);
    Ok(basis
        .into_iter()
        .map(|v| {
            let mut full = vec![c(0.0, 0.0); n];
            for (j, &q) in p.iter().enumerate() {
                full[q] = v[j];
            }
            full
        })
        .collect())
}
