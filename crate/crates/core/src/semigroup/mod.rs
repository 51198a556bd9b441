//! Carriers: finite Cayley-table semigroups and rule-defined (procedural)
//! semigroups sampled on a finite window, with their involutions.

mod finite;
mod fixtures;
mod format;
mod procedural;

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::ScalarFunction;

pub use finite::{enumerate_involutive_automorphisms, validate_table, FiniteSemigroup, AUTOMORPHISM_ORDER_BOUND};
pub use fixtures::{finite_fixture, FixtureId, FINITE_FIXTURES};
pub use format::{load_semigroup, parse_semigroup};
pub use procedural::{ProceduralKind, ProceduralSemigroup, DEFAULT_WINDOW};

/// An element of some carrier. Finite carriers use indices; the procedural
/// fixtures use their natural coordinates.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Element {
    Index(usize),
    Real(f64),
    /// Heisenberg coordinates (x, y, z) of the upper unitriangular matrix.
    Heis([i64; 3]),
    Nat(u64),
}

impl Element {
    fn rank(&self) -> u8 {
        match self {
            Element::Index(_) => 0,
            Element::Real(_) => 1,
            Element::Heis(_) => 2,
            Element::Nat(_) => 3,
        }
    }

    pub fn index(&self) -> Option<usize> {
        match self {
            Element::Index(i) => Some(*i),
            _ => None,
        }
    }

    /// Equality up to floating-point rounding for real-line elements.
    pub fn approx_eq(&self, other: &Element) -> bool {
        match (self, other) {
            (Element::Real(a), Element::Real(b)) => (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs())),
            _ => self == other,
        }
    }
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Element {}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Element::Index(a), Element::Index(b)) => a.cmp(b),
            (Element::Real(a), Element::Real(b)) => a.total_cmp(b),
            (Element::Heis(a), Element::Heis(b)) => a.cmp(b),
            (Element::Nat(a), Element::Nat(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl Hash for Element {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Element::Index(i) => i.hash(state),
            Element::Real(x) => x.to_bits().hash(state),
            Element::Heis(v) => v.hash(state),
            Element::Nat(n) => n.hash(state),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Index(i) => write!(f, "{i}"),
            Element::Real(x) => write!(f, "{x:.6}"),
            Element::Heis([x, y, z]) => write!(f, "({x},{y},{z})"),
            Element::Nat(n) => write!(f, "{n}"),
        }
    }
}

/// The map σ. Finite carriers use a permutation of indices; procedural ones
/// use one of the built-in rules.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Involution {
    Permutation(Vec<usize>),
    Identity,
    /// x ↦ −x on the real line.
    Negation,
    /// (x, y, z) ↦ (−x, −y, z) on the Heisenberg group.
    HeisenbergFlip,
}

impl Involution {
    pub fn identity_for(s: &Carrier) -> Involution {
        match s {
            Carrier::Finite(fs) => Involution::Permutation((0..fs.order()).collect()),
            Carrier::Procedural(_) => Involution::Identity,
        }
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        let bad = |reason: &str| Error::DomainViolation {
            element: *x,
            reason: reason.to_string(),
        };
        match (self, x) {
            (Involution::Identity, _) => Ok(*x),
            (Involution::Permutation(p), Element::Index(i)) => p
                .get(*i)
                .map(|j| Element::Index(*j))
                .ok_or(Error::IndexOutOfRange { index: *i, order: p.len() }),
            (Involution::Negation, Element::Real(v)) => Ok(Element::Real(-v)),
            (Involution::HeisenbergFlip, Element::Heis([a, b, z])) => Ok(Element::Heis([-a, -b, *z])),
            _ => Err(bad("involution does not act on this element kind")),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Involution::Identity => true,
            Involution::Permutation(p) => p.iter().enumerate().all(|(i, &j)| i == j),
            _ => false,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Involution::Permutation(p) => {
                let body: Vec<String> = p.iter().map(|j| j.to_string()).collect();
                format!("perm[{}]", body.join(" "))
            }
            Involution::Identity => "identity".into(),
            Involution::Negation => "negation".into(),
            Involution::HeisenbergFlip => "heisenberg-flip".into(),
        }
    }

    /// Violations of σ∘σ = id and σ(xy) = σ(x)σ(y) on the carrier (window).
    pub fn violations(&self, s: &Carrier) -> Result<Vec<String>> {
        if let (Involution::Permutation(p), Carrier::Finite(fs)) = (self, s) {
            if p.len() != fs.order() {
                return Ok(vec![format!("permutation length {} != order {}", p.len(), fs.order())]);
            }
            let mut seen = vec![false; p.len()];
            for &j in p {
                if j >= p.len() || seen[j] {
                    return Ok(vec![format!("{p:?} is not a permutation")]);
                }
                seen[j] = true;
            }
        }
        let window = s.window();
        let mut out = Vec::new();
        for x in &window {
            let back = self.apply(&self.apply(x)?)?;
            if !back.approx_eq(x) {
                out.push(format!("sigma(sigma({x})) = {back}"));
            }
        }
        let table = s.window_table()?;
        let images: Vec<Element> = table.elements.iter().map(|x| self.apply(x)).collect::<Result<_>>()?;
        let position: HashMap<Element, usize> = window.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let in_window: Option<Vec<usize>> = images[..table.window_len].iter().map(|e| position.get(e).copied()).collect();
        let n = table.window_len;
        for i in 0..n {
            for j in 0..n {
                let lhs = &images[table.product(i, j)];
                let rhs = match &in_window {
                    Some(p) => table.elements[table.product(p[i], p[j])],
                    None => s.compose(&images[i], &images[j])?,
                };
                if !lhs.approx_eq(&rhs) {
                    let (x, y) = (&window[i], &window[j]);
                    out.push(format!("sigma({x}*{y}) = {lhs} but sigma({x})*sigma({y}) = {rhs}"));
                }
            }
        }
        Ok(out)
    }
}

/// Products of all window pairs, by index.
#[derive(Debug)]
pub struct WindowTable {
    /// The window first, then products that fall outside it.
    pub elements: Vec<Element>,
    pub window_len: usize,
    /// `products[i * window_len + j]` indexes the product of window
    /// elements i and j.
    pub products: Vec<u32>,
}

impl WindowTable {
    fn build(s: &Carrier) -> Result<Self> {
        let mut elements = s.window();
        let window_len = elements.len();
        let mut index: HashMap<Element, u32> = elements.iter().enumerate().map(|(i, e)| (*e, i as u32)).collect();
        let mut products = Vec::with_capacity(window_len * window_len);
        for i in 0..window_len {
            for j in 0..window_len {
                let xy = s.compose(&elements[i], &elements[j])?;
                let k = *index.entry(xy).or_insert_with(|| {
                    elements.push(xy);
                    (elements.len() - 1) as u32
                });
                products.push(k);
            }
        }
        Ok(WindowTable {
            elements,
            window_len,
            products,
        })
    }

    pub fn product(&self, i: usize, j: usize) -> usize {
        self.products[i * self.window_len + j] as usize
    }
}

type TableCache = Mutex<HashMap<(String, Vec<Element>), Arc<WindowTable>>>;

/// A semigroup: finite (exact) or procedural (window-sampled).
#[derive(Clone, Debug)]
pub enum Carrier {
    Finite(FiniteSemigroup),
    Procedural(ProceduralSemigroup),
}

/// Outcome of an axiom check. Violations are data.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    /// Table entries (x, y) whose value is not an element index.
    pub closure: Vec<(usize, usize)>,
    /// Triples (x, y, z) with (xy)z != x(yz).
    pub associativity: Vec<(Element, Element, Element)>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.closure.is_empty() && self.associativity.is_empty()
    }
}

impl Carrier {
    pub fn name(&self) -> String {
        match self {
            Carrier::Finite(fs) => fs.name().unwrap_or("finite").to_string(),
            Carrier::Procedural(ps) => ps.kind().name().to_string(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Carrier::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&FiniteSemigroup> {
        match self {
            Carrier::Finite(fs) => Some(fs),
            Carrier::Procedural(_) => None,
        }
    }

    pub fn finite(&self) -> Result<&FiniteSemigroup> {
        self.as_finite().ok_or(Error::RequiresFinite)
    }

    pub fn compose(&self, x: &Element, y: &Element) -> Result<Element> {
        match self {
            Carrier::Finite(fs) => fs.compose(x, y),
            Carrier::Procedural(ps) => ps.compose(x, y),
        }
    }

    /// All elements of a finite carrier, or the sample window.
    pub fn window(&self) -> Vec<Element> {
        match self {
            Carrier::Finite(fs) => (0..fs.order()).map(Element::Index).collect(),
            Carrier::Procedural(ps) => ps.window().to_vec(),
        }
    }

    /// The window product table, cached per procedural carrier.
    pub fn window_table(&self) -> Result<Arc<WindowTable>> {
        if self.is_finite() {
            return Ok(Arc::new(WindowTable::build(self)?));
        }
        static CACHE: OnceLock<TableCache> = OnceLock::new();
        let key = (self.name(), self.window());
        let cache = CACHE.get_or_init(Default::default);
        if let Some(t) = cache.lock().expect("table cache").get(&key) {
            return Ok(t.clone());
        }
        let table = Arc::new(WindowTable::build(self)?);
        cache.lock().expect("table cache").insert(key, table.clone());
        Ok(table)
    }

    /// Elements quantified over by triple-based checks.
    pub fn triple_window(&self) -> Vec<Element> {
        match self {
            Carrier::Finite(_) => self.window(),
            Carrier::Procedural(ps) => ps.triple_window(),
        }
    }

    pub fn contains(&self, x: &Element) -> bool {
        match self {
            Carrier::Finite(fs) => matches!(x, Element::Index(i) if *i < fs.order()),
            Carrier::Procedural(ps) => ps.contains(x),
        }
    }

    pub fn in_window(&self, x: &Element) -> bool {
        match self {
            Carrier::Finite(_) => self.contains(x),
            Carrier::Procedural(ps) => ps.in_window(x),
        }
    }

    /// Every factorization x = ab in the carrier, when the carrier can list them.
    pub fn factor_pairs(&self, x: &Element) -> Option<Vec<(Element, Element)>> {
        match self {
            Carrier::Finite(fs) => {
                let target = x.index()?;
                let n = fs.order();
                Some(
                    (0..n)
                        .flat_map(|a| (0..n).map(move |b| (a, b)))
                        .filter(|&(a, b)| fs.mul(a, b) == target)
                        .map(|(a, b)| (Element::Index(a), Element::Index(b)))
                        .collect(),
                )
            }
            Carrier::Procedural(ps) => ps.factor_pairs(x),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        match self {
            Carrier::Finite(fs) => fs.validate(),
            Carrier::Procedural(ps) => ps.validate(),
        }
    }

    /// T² = {xy | x, y ∈ T}, intersected with the window on procedural carriers.
    pub fn product_set(&self, t: &BTreeSet<Element>) -> Result<BTreeSet<Element>> {
        let mut out = BTreeSet::new();
        for x in t {
            for y in t {
                let p = self.compose(x, y)?;
                if self.in_window(&p) {
                    out.insert(p);
                }
            }
        }
        Ok(out)
    }

    /// S² restricted to the window. The real line and H₃ are groups, so
    /// there S² = S.
    pub fn square(&self) -> Result<BTreeSet<Element>> {
        match self {
            Carrier::Procedural(ps) if ps.kind() != ProceduralKind::NaturalsFrom2 => Ok(self.window().into_iter().collect()),
            _ => self.product_set(&self.window().into_iter().collect()),
        }
    }

    /// Involutions to iterate over: all involutive automorphisms of a finite
    /// carrier, or the fixture's documented list.
    pub fn involutions(&self) -> Result<Vec<Involution>> {
        match self {
            Carrier::Finite(fs) => enumerate_involutive_automorphisms(fs, AUTOMORPHISM_ORDER_BOUND),
            Carrier::Procedural(ps) => Ok(ps.kind().involutions()),
        }
    }
}

/// A subset of the carrier: explicit, or the zero set / support of a function.
#[derive(Clone, Debug)]
pub enum ElementSubset {
    Set(BTreeSet<Element>),
    ZeroSetOf(ScalarFunction),
    SupportOf(ScalarFunction),
}

impl ElementSubset {
    pub fn contains(&self, s: &Carrier, x: &Element) -> Result<bool> {
        match self {
            ElementSubset::Set(set) => Ok(set.contains(x)),
            ElementSubset::ZeroSetOf(f) => Ok(f.eval(s, x)? == crate::scalar::c(0.0, 0.0)),
            ElementSubset::SupportOf(f) => Ok(f.eval(s, x)? != crate::scalar::c(0.0, 0.0)),
        }
    }

    /// Members within the window.
    pub fn materialize(&self, s: &Carrier) -> Result<BTreeSet<Element>> {
        let mut out = BTreeSet::new();
        for x in s.window() {
            if self.contains(s, &x)? {
                out.insert(x);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_order_and_equality() {
        assert!(Element::Index(1) < Element::Index(2));
        assert!(Element::Real(-1.0) < Element::Real(0.5));
        assert_eq!(Element::Nat(6), Element::Nat(6));
        assert!(Element::Real(0.1 + 0.2).approx_eq(&Element::Real(0.3)));
        assert_ne!(Element::Real(0.1 + 0.2), Element::Real(0.3));
    }

    #[test]
    fn involution_actions() {
        assert_eq!(Involution::Negation.apply(&Element::Real(2.0)).unwrap(), Element::Real(-2.0));
        assert_eq!(
            Involution::HeisenbergFlip.apply(&Element::Heis([1, -2, 3])).unwrap(),
            Element::Heis([-1, 2, 3])
        );
        assert!(Involution::Negation.apply(&Element::Nat(2)).is_err());
        assert!(Involution::Permutation(vec![0, 1]).is_identity());
    }
}
