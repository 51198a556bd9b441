use std::fmt;
use std::str::FromStr;

use super::{Carrier, FiniteSemigroup, ProceduralSemigroup};
use crate::error::{Error, Result};

/// Names of the built-in finite fixtures.
pub const FINITE_FIXTURES: [&str; 7] = ["trivial", "c2", "c3", "leftzero2", "null3", "bool-mult", "nilmonoid3"];

/// Built-in carriers, selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixtureId {
    RealLine,
    Heisenberg,
    NaturalsFrom2,
    Finite(&'static str),
}

impl FixtureId {
    /// Resolves to a carrier; `window` overrides the procedural sample size
    /// (real-line points, Heisenberg cube radius, or upper bound of the naturals).
    pub fn carrier(&self, window: Option<usize>) -> Result<Carrier> {
        Ok(match self {
            FixtureId::RealLine => Carrier::Procedural(ProceduralSemigroup::real_line(window.unwrap_or(64))),
            FixtureId::Heisenberg => Carrier::Procedural(ProceduralSemigroup::heisenberg(window.unwrap_or(3) as i64)),
            FixtureId::NaturalsFrom2 => {
                Carrier::Procedural(ProceduralSemigroup::naturals(2, window.map(|w| w as u64).unwrap_or(65)))
            }
            FixtureId::Finite(name) => Carrier::Finite(finite_fixture(name)?),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            FixtureId::RealLine => "real-line",
            FixtureId::Heisenberg => "heisenberg",
            FixtureId::NaturalsFrom2 => "naturals-from-2",
            FixtureId::Finite(name) => name,
        }
    }
}

impl fmt::Display for FixtureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FixtureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real-line" => Ok(FixtureId::RealLine),
            "heisenberg" => Ok(FixtureId::Heisenberg),
            "naturals-from-2" => Ok(FixtureId::NaturalsFrom2),
            other => FINITE_FIXTURES
                .iter()
                .find(|&&n| n == other)
                .map(|&n| FixtureId::Finite(n))
                .ok_or_else(|| Error::UnknownName(other.to_string())),
        }
    }
}

fn labelled(table: Vec<Vec<usize>>, name: &str, labels: &[&str]) -> FiniteSemigroup {
    FiniteSemigroup::new(table)
        .expect("fixture table")
        .with_name(name)
        .with_labels(labels.iter().map(|s| s.to_string()).collect())
}

/// The built-in finite semigroups.
///
/// * `trivial`: one element.
/// * `c2`, `c3`: cyclic groups, identity at index 0.
/// * `leftzero2`: xy = x.
/// * `null3`: {a, b, z}, every product is z.
/// * `bool-mult`: ({0, 1}, ·).
/// * `nilmonoid3`: {e, p, z} with e the identity, p² = z, z absorbing.
pub fn finite_fixture(name: &str) -> Result<FiniteSemigroup> {
    Ok(match name {
        "trivial" => labelled(vec![vec![0]], name, &["e"]),
        "c2" => labelled(vec![vec![0, 1], vec![1, 0]], name, &["e", "g"]),
        "c3" => labelled(
            (0..3).map(|i| (0..3).map(|j| (i + j) % 3).collect()).collect(),
            name,
            &["e", "g", "g2"],
        ),
        "leftzero2" => labelled(vec![vec![0, 0], vec![1, 1]], name, &["a", "b"]),
        "null3" => labelled(vec![vec![2; 3]; 3], name, &["a", "b", "z"]),
        "bool-mult" => labelled(vec![vec![0, 0], vec![0, 1]], name, &["0", "1"]),
        "nilmonoid3" => labelled(vec![vec![0, 1, 2], vec![1, 2, 2], vec![2, 2, 2]], name, &["e", "p", "z"]),
        other => return Err(Error::UnknownName(other.to_string())),
    })
}
