use serde::{Deserialize, Serialize};

use super::{Element, Involution, ValidationReport};
use crate::error::{Error, Result};

/// Default cap on the order for brute-force automorphism enumeration.
pub const AUTOMORPHISM_ORDER_BOUND: usize = 8;

/// A semigroup on {0, …, n−1} given by its Cayley table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteSemigroup {
    table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

/// Closure and associativity violations of a raw table.
pub fn validate_table(table: &[Vec<usize>]) -> ValidationReport {
    let n = table.len();
    let mut report = ValidationReport::default();
    for (x, row) in table.iter().enumerate() {
        for (y, &v) in row.iter().enumerate() {
            if v >= n {
                report.closure.push((x, y));
            }
        }
        if row.len() != n {
            report.closure.push((x, row.len()));
        }
    }
    if !report.closure.is_empty() {
        return report;
    }
    for x in 0..n {
        for y in 0..n {
            let xy = table[x][y];
            for z in 0..n {
                if table[xy][z] != table[x][table[y][z]] {
                    report
                        .associativity
                        .push((Element::Index(x), Element::Index(y), Element::Index(z)));
                }
            }
        }
    }
    report
}

impl FiniteSemigroup {
    /// Builds from a square table whose entries are element indices.
    /// Associativity is not checked here; see [`FiniteSemigroup::checked`].
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::Parse { line: 0, message: "empty table".into() });
        }
        for row in &table {
            if row.len() != n {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("row of length {} in a table of order {n}", row.len()),
                });
            }
            if let Some(&bad) = row.iter().find(|&&v| v >= n) {
                return Err(Error::IndexOutOfRange { index: bad, order: n });
            }
        }
        Ok(FiniteSemigroup { table, labels: None, name: None })
    }

    /// Builds and rejects non-associative tables with a witness triple.
    pub fn checked(table: Vec<Vec<usize>>) -> Result<Self> {
        let s = Self::new(table)?;
        if let Some((x, y, z)) = s.validate().associativity.first() {
            return Err(Error::NotAssociative(
                x.index().unwrap(),
                y.index().unwrap(),
                z.index().unwrap(),
            ));
        }
        Ok(s)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        self.labels
            .as_ref()
            .and_then(|l| l.get(i).cloned())
            .unwrap_or_else(|| i.to_string())
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// Unchecked product of two indices.
    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x][y]
    }

    pub fn compose(&self, x: &Element, y: &Element) -> Result<Element> {
        let n = self.order();
        let idx = |e: &Element| match e {
            Element::Index(i) if *i < n => Ok(*i),
            Element::Index(i) => Err(Error::IndexOutOfRange { index: *i, order: n }),
            other => Err(Error::DomainViolation {
                element: *other,
                reason: "finite carriers use index elements".into(),
            }),
        };
        Ok(Element::Index(self.mul(idx(x)?, idx(y)?)))
    }

    pub fn validate(&self) -> ValidationReport {
        validate_table(&self.table)
    }

    /// Products of the elements of `t` (indices).
    pub fn product_indices(&self, t: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = t
            .iter()
            .flat_map(|&x| t.iter().map(move |&y| (x, y)))
            .map(|(x, y)| self.mul(x, y))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Indices of S².
    pub fn square_indices(&self) -> Vec<usize> {
        self.product_indices(&(0..self.order()).collect::<Vec<_>>())
    }

    pub fn is_automorphism(&self, p: &[usize]) -> bool {
        let n = self.order();
        (0..n).all(|x| (0..n).all(|y| p[self.mul(x, y)] == self.mul(p[x], p[y])))
    }

    /// Cyclic subsemigroup data of x: (index m, period r) with x^{m+r} = x^m.
    pub fn index_and_period(&self, x: usize) -> (usize, usize) {
        let mut powers = vec![x];
        loop {
            let next = self.mul(*powers.last().unwrap(), x);
            if let Some(pos) = powers.iter().position(|&p| p == next) {
                return (pos + 1, powers.len() - pos);
            }
            powers.push(next);
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All involutive automorphisms, in lexicographic order of the permutation
/// (the identity comes first).
pub fn enumerate_involutive_automorphisms(s: &FiniteSemigroup, bound: usize) -> Result<Vec<Involution>> {
    let n = s.order();
    if n > bound {
        return Err(Error::OrderTooLarge { order: n, bound });
    }
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    loop {
        if (0..n).all(|i| p[p[i]] == i) && s.is_automorphism(&p) {
            out.push(Involution::Permutation(p.clone()));
        }
        if !next_permutation(&mut p) {
            break;
        }
    }
    Ok(out)
}
