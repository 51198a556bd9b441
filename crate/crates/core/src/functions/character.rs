use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::ScalarFunction;
use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::scalar::{c, C64};
use crate::semigroup::{FiniteSemigroup, Involution};

/// Default cap on the order for multiplicative-function enumeration.
pub const MULTIPLICATIVE_ORDER_BOUND: usize = 6;

/// e^{2πik/n}, exact in every component for n dividing 12.
pub fn root_of_unity_c64(k: u32, n: u32) -> C64 {
    let n = n.max(1);
    let k = k % n;
    let g = k.gcd(&n).max(1);
    let (k, n) = (k / g, n / g);
    let h = 3f64.sqrt() / 2.0;
    match (k * (12 / n.min(12)), 12 % n == 0) {
        (0, true) => c(1.0, 0.0),
        (1, true) => c(h, 0.5),
        (2, true) => c(0.5, h),
        (3, true) => c(0.0, 1.0),
        (4, true) => c(-0.5, h),
        (5, true) => c(-h, 0.5),
        (6, true) => c(-1.0, 0.0),
        (7, true) => c(-h, -0.5),
        (8, true) => c(-0.5, -h),
        (9, true) => c(0.0, -1.0),
        (10, true) => c(0.5, -h),
        (11, true) => c(h, -0.5),
        _ => {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            c(t.cos(), t.sin())
        }
    }
}

/// A multiplicative function on a finite semigroup whose values are 0 or
/// roots of unity: `values[x] = Some(k)` stands for e^{2πik/conductor}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Character {
    pub conductor: u32,
    pub values: Vec<Option<u32>>,
}

impl Character {
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Option::is_none)
    }

    pub fn to_exact(&self) -> Vec<Cyclotomic> {
        self.values
            .iter()
            .map(|v| match v {
                None => Cyclotomic::zero(),
                Some(k) => Cyclotomic::root_of_unity(*k, self.conductor),
            })
            .collect()
    }

    pub fn to_c64(&self) -> Vec<C64> {
        self.values
            .iter()
            .map(|v| match v {
                None => c(0.0, 0.0),
                Some(k) => root_of_unity_c64(*k, self.conductor),
            })
            .collect()
    }

    pub fn to_function(&self) -> ScalarFunction {
        ScalarFunction::Dense(self.to_c64())
    }

    pub fn to_exact_function(&self) -> ScalarFunction {
        ScalarFunction::exact(self.to_exact())
    }

    /// χ∘σ for a permutation σ.
    pub fn star(&self, sigma: &Involution) -> Result<Character> {
        let Involution::Permutation(p) = sigma else {
            return if sigma.is_identity() {
                Ok(self.clone())
            } else {
                Err(Error::NotAnInvolution(format!("{} on a finite carrier", sigma.name())))
            };
        };
        if p.len() != self.values.len() {
            return Err(Error::NotAnInvolution(format!("permutation length {} != {}", p.len(), self.values.len())));
        }
        Ok(Character {
            conductor: self.conductor,
            values: p.iter().map(|&j| self.values[j]).collect(),
        })
    }

    pub fn is_even(&self, sigma: &Involution) -> Result<bool> {
        Ok(self.star(sigma)? == *self)
    }

    /// Compact display: `0` for a zero value, `z^k/n` otherwise.
    pub fn describe(&self) -> String {
        let body: Vec<String> = self.to_c64().iter().map(|z| crate::scalar::format_complex(*z)).collect();
        format!("({})", body.join(", "))
    }
}

/// Every multiplicative function S → ℂ, the zero function included, in the
/// canonical order: lexicographic in the values with 0 < ζ⁰ < ζ¹ < ….
///
/// A non-zero value at x generates a finite subgroup of ℂ∖{0}, so it is a
/// root of unity of order dividing the period of x.
pub fn enumerate_multiplicative(s: &FiniteSemigroup, bound: usize) -> Result<Vec<Character>> {
    let n = s.order();
    if n > bound {
        return Err(Error::OrderTooLarge { order: n, bound });
    }
    let periods: Vec<u32> = (0..n).map(|x| s.index_and_period(x).1 as u32).collect();
    let conductor = periods.iter().fold(1u32, |acc, &r| acc.lcm(&r));
    let mut out = Vec::new();
    let mut values: Vec<Option<u32>> = Vec::with_capacity(n);
    search(s, conductor, &periods, &mut values, &mut out);
    Ok(out)
}

/// Checks every pair whose factors and product are assigned and which
/// involves the latest assignment.
fn consistent(s: &FiniteSemigroup, conductor: u32, values: &[Option<u32>]) -> bool {
    let m = values.len();
    let x = m - 1;
    for a in 0..m {
        for b in 0..m {
            let p = s.mul(a, b);
            if p >= m || (a != x && b != x && p != x) {
                continue;
            }
            let expected = match (values[a], values[b]) {
                (Some(i), Some(j)) => Some((i + j) % conductor),
                _ => None,
            };
            if values[p] != expected {
                return false;
            }
        }
    }
    true
}

fn search(s: &FiniteSemigroup, conductor: u32, periods: &[u32], values: &mut Vec<Option<u32>>, out: &mut Vec<Character>) {
    let x = values.len();
    if x == s.order() {
        out.push(Character {
            conductor,
            values: values.clone(),
        });
        return;
    }
    let step = conductor / periods[x];
    let candidates = std::iter::once(None).chain((0..periods[x]).map(|j| Some(j * step)));
    for v in candidates {
        values.push(v);
        if consistent(s, conductor, values) {
            search(s, conductor, periods, values, out);
        }
        values.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::finite_fixture;

    fn brute_force(s: &FiniteSemigroup, conductor: u32) -> Vec<Vec<Option<u32>>> {
        let n = s.order();
        let choices: Vec<Option<u32>> = std::iter::once(None).chain((0..conductor).map(Some)).collect();
        let mut out = Vec::new();
        let total = choices.len().pow(n as u32);
        for mut code in 0..total {
            let vals: Vec<Option<u32>> = (0..n)
                .map(|_| {
                    let v = choices[code % choices.len()];
                    code /= choices.len();
                    v
                })
                .collect();
            let ok = (0..n).all(|x| {
                (0..n).all(|y| {
                    let want = match (vals[x], vals[y]) {
                        (Some(i), Some(j)) => Some((i + j) % conductor),
                        _ => None,
                    };
                    vals[s.mul(x, y)] == want
                })
            });
            if ok {
                out.push(vals);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn matches_brute_force() {
        for name in ["trivial", "c2", "c3", "leftzero2", "null3", "bool-mult", "nilmonoid3"] {
            let s = finite_fixture(name).unwrap();
            let got = enumerate_multiplicative(&s, 6).unwrap();
            let conductor = got[0].conductor;
            let mut values: Vec<_> = got.iter().map(|ch| ch.values.clone()).collect();
            let sorted = {
                let mut v = values.clone();
                v.sort();
                v
            };
            assert_eq!(values, sorted, "{name} not canonical");
            values.sort();
            assert_eq!(values, brute_force(&s, conductor), "{name}");
        }
    }

    #[test]
    fn counts() {
        let count = |name| enumerate_multiplicative(&finite_fixture(name).unwrap(), 6).unwrap().len();
        assert_eq!(count("bool-mult"), 3);
        assert_eq!(count("c2"), 3);
        assert_eq!(count("c3"), 4);
    }

    #[test]
    fn snapped_roots() {
        assert_eq!(root_of_unity_c64(1, 4), c(0.0, 1.0));
        assert_eq!(root_of_unity_c64(2, 4), c(-1.0, 0.0));
        assert_eq!(root_of_unity_c64(1, 3), c(-0.5, 3f64.sqrt() / 2.0));
        assert!((root_of_unity_c64(1, 5) - C64::from_polar(1.0, std::f64::consts::TAU / 5.0)).norm() < 1e-15);
    }
}
