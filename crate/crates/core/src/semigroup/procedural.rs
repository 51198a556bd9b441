use std::collections::HashSet;

use super::{Element, Involution, ValidationReport};
use crate::error::{Error, Result};

/// Default number of sample points for the procedural fixtures.
pub const DEFAULT_WINDOW: usize = 64;

/// Cap on the number of window elements used by triple-quantified checks.
const TRIPLE_LIMIT: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProceduralKind {
    /// (ℝ, +)
    RealLine,
    /// H₃ with (x,y,z)·(x',y',z') = (x+x', y+y', z+z'+xy').
    Heisenberg,
    /// (ℕ∖{1}, ·)
    NaturalsFrom2,
}

impl ProceduralKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProceduralKind::RealLine => "real-line",
            ProceduralKind::Heisenberg => "heisenberg",
            ProceduralKind::NaturalsFrom2 => "naturals-from-2",
        }
    }

    pub fn involutions(&self) -> Vec<Involution> {
        match self {
            ProceduralKind::RealLine => vec![Involution::Identity, Involution::Negation],
            ProceduralKind::Heisenberg => vec![Involution::Identity, Involution::HeisenbergFlip],
            ProceduralKind::NaturalsFrom2 => vec![Involution::Identity],
        }
    }
}

/// A rule-defined semigroup together with the finite window on which
/// universally quantified statements are checked.
#[derive(Clone, Debug)]
pub struct ProceduralSemigroup {
    kind: ProceduralKind,
    window: Vec<Element>,
    members: HashSet<Element>,
}

impl ProceduralSemigroup {
    fn from_window(kind: ProceduralKind, window: Vec<Element>) -> Self {
        let members = window.iter().copied().collect();
        ProceduralSemigroup { kind, window, members }
    }

    /// `points` uniform samples of [−π, π], symmetric under negation.
    pub fn real_line(points: usize) -> Self {
        let points = points.max(2);
        let step = std::f64::consts::TAU / (points - 1) as f64;
        let mut xs = vec![0.0; points];
        for k in 0..points.div_ceil(2) {
            let x = -std::f64::consts::PI + step * k as f64;
            xs[k] = x;
            xs[points - 1 - k] = -x;
        }
        if points % 2 == 1 {
            xs[points / 2] = 0.0;
        }
        Self::from_window(ProceduralKind::RealLine, xs.into_iter().map(Element::Real).collect())
    }

    /// Integer triples in [−radius, radius]³.
    pub fn heisenberg(radius: i64) -> Self {
        let r = radius.max(0);
        let mut window = Vec::new();
        for x in -r..=r {
            for y in -r..=r {
                for z in -r..=r {
                    window.push(Element::Heis([x, y, z]));
                }
            }
        }
        Self::from_window(ProceduralKind::Heisenberg, window)
    }

    /// The integers lo..=hi (lo at least 2).
    pub fn naturals(lo: u64, hi: u64) -> Self {
        let lo = lo.max(2);
        Self::from_window(ProceduralKind::NaturalsFrom2, (lo..=hi.max(lo)).map(Element::Nat).collect())
    }

    pub fn kind(&self) -> ProceduralKind {
        self.kind
    }

    pub fn window(&self) -> &[Element] {
        &self.window
    }

    pub fn in_window(&self, x: &Element) -> bool {
        self.members.contains(x)
    }

    /// Evenly strided subset of the window, at most `TRIPLE_LIMIT` elements.
    pub fn triple_window(&self) -> Vec<Element> {
        let n = self.window.len();
        if n <= TRIPLE_LIMIT {
            return self.window.clone();
        }
        (0..TRIPLE_LIMIT)
            .map(|k| self.window[k * (n - 1) / (TRIPLE_LIMIT - 1)])
            .collect()
    }

    pub fn contains(&self, x: &Element) -> bool {
        match (self.kind, x) {
            (ProceduralKind::RealLine, Element::Real(v)) => v.is_finite(),
            (ProceduralKind::Heisenberg, Element::Heis(_)) => true,
            (ProceduralKind::NaturalsFrom2, Element::Nat(n)) => *n >= 2,
            _ => false,
        }
    }

    pub fn compose(&self, x: &Element, y: &Element) -> Result<Element> {
        for e in [x, y] {
            if !self.contains(e) {
                return Err(Error::DomainViolation {
                    element: *e,
                    reason: format!("not an element of {}", self.kind.name()),
                });
            }
        }
        Ok(match (x, y) {
            (Element::Real(a), Element::Real(b)) => Element::Real(a + b),
            (Element::Heis([a, b, c]), Element::Heis([d, e, f])) => Element::Heis([a + d, b + e, c + f + a * e]),
            (Element::Nat(a), Element::Nat(b)) => Element::Nat(a.checked_mul(*b).ok_or(Error::DomainViolation {
                element: *x,
                reason: format!("product with {b} overflows u64"),
            })?),
            _ => unreachable!("kinds checked above"),
        })
    }

    /// All ordered factorizations x = ab; only the naturals can list them.
    pub fn factor_pairs(&self, x: &Element) -> Option<Vec<(Element, Element)>> {
        let Element::Nat(n) = *x else { return None };
        if self.kind != ProceduralKind::NaturalsFrom2 {
            return None;
        }
        let mut divisors = vec![1u64];
        let mut m = n;
        let mut d = 2u64;
        while d * d <= m {
            if m % d == 0 {
                let mut k = 0;
                while m % d == 0 {
                    m /= d;
                    k += 1;
                }
                let base = divisors.len();
                let mut pow = 1;
                for _ in 0..k {
                    pow *= d;
                    for i in 0..base {
                        divisors.push(divisors[i] * pow);
                    }
                }
            }
            d += if d == 2 { 1 } else { 2 };
        }
        if m > 1 {
            let base = divisors.len();
            for i in 0..base {
                divisors.push(divisors[i] * m);
            }
        }
        divisors.sort_unstable();
        let out = divisors
            .into_iter()
            .filter(|&a| a >= 2 && n / a >= 2)
            .map(|a| (Element::Nat(a), Element::Nat(n / a)))
            .collect();
        Some(out)
    }

    /// Associativity on all triples of the triple window.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let w = self.triple_window();
        for x in &w {
            for y in &w {
                for z in &w {
                    let left = self.compose(x, y).and_then(|xy| self.compose(&xy, z));
                    let right = self.compose(y, z).and_then(|yz| self.compose(x, &yz));
                    match (left, right) {
                        (Ok(l), Ok(r)) if l.approx_eq(&r) => {}
                        _ => report.associativity.push((*x, *y, *z)),
                    }
                }
            }
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_compositions() {
        let nat = ProceduralSemigroup::naturals(2, 50);
        assert_eq!(nat.compose(&Element::Nat(2), &Element::Nat(3)).unwrap(), Element::Nat(6));
        assert!(nat.compose(&Element::Nat(1), &Element::Nat(3)).is_err());
        let h = ProceduralSemigroup::heisenberg(3);
        assert_eq!(
            h.compose(&Element::Heis([1, 0, 0]), &Element::Heis([0, 1, 0])).unwrap(),
            Element::Heis([1, 1, 1])
        );
        assert_eq!(
            h.compose(&Element::Heis([0, 1, 0]), &Element::Heis([1, 0, 0])).unwrap(),
            Element::Heis([1, 1, 0])
        );
    }

    #[test]
    fn windows() {
        let r = ProceduralSemigroup::real_line(64);
        assert_eq!(r.window().len(), 64);
        for (k, x) in r.window().iter().enumerate() {
            let Element::Real(v) = x else { panic!() };
            let Element::Real(w) = r.window()[63 - k] else { panic!() };
            assert_eq!(*v, -w);
        }
        assert_eq!(ProceduralSemigroup::heisenberg(3).window().len(), 343);
        assert_eq!(ProceduralSemigroup::naturals(2, 200).window().len(), 199);
        assert_eq!(ProceduralSemigroup::heisenberg(3).triple_window().len(), 24);
    }

    #[test]
    fn factorizations_of_naturals() {
        let nat = ProceduralSemigroup::naturals(2, 50);
        let mut f = nat.factor_pairs(&Element::Nat(12)).unwrap();
        f.sort();
        let nums: Vec<(u64, u64)> = f
            .into_iter()
            .map(|(a, b)| match (a, b) {
                (Element::Nat(a), Element::Nat(b)) => (a, b),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(nums, vec![(2, 6), (3, 4), (4, 3), (6, 2)]);
        assert!(nat.factor_pairs(&Element::Nat(7)).unwrap().is_empty());
    }
}
