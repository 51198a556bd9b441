use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::residual;
use crate::error::{Error, Result};
use crate::families::{construct, FamilyDescriptor, FunctionRef, HSpec, Mode, Registry, SolutionPair};
use crate::functions::{enumerate_multiplicative, Character, ScalarFunction, MULTIPLICATIVE_ORDER_BOUND};
use crate::linalg::least_squares;
use crate::scalar::{c, sqrt_branch, tol, C64};
use crate::semigroup::{Carrier, Involution};

/// A family number, or no match.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Family(u8),
    Unclassified,
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Verdict::Family(k) => s.serialize_u8(*k),
            Verdict::Unclassified => s.serialize_str("unclassified"),
        }
    }
}

impl<'de> Deserialize<'de> for Verdict {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Tag(u8),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Tag(k @ 1..=8) => Ok(Verdict::Family(k)),
            Raw::Text(t) if t == "unclassified" => Ok(Verdict::Unclassified),
            _ => Err(serde::de::Error::custom("expected a family number 1..8 or \"unclassified\"")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub family_tag: Verdict,
    /// The recovered descriptor.
    pub params: Option<FamilyDescriptor>,
    /// The free function of families 1 to 3.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free: Option<ScalarFunction>,
    /// Max pointwise distance between the input and the reconstructed pair
    /// (the closest rejected candidate when unclassified).
    pub match_residual: Option<f64>,
    pub max_residual: f64,
}

impl ClassificationResult {
    pub fn is_classified(&self) -> bool {
        self.family_tag != Verdict::Unclassified
    }

    /// Rebuilds the pair from the recovered descriptor.
    pub fn reconstruct(&self, s: &Carrier, sigma: &Involution) -> Result<Option<SolutionPair>> {
        self.params
            .as_ref()
            .filter(|_| self.is_classified())
            .map(|d| construct(s, sigma, d, self.free.as_ref(), &Registry::new(), Mode::Float))
            .transpose()
    }
}

struct Candidates<'a> {
    s: &'a Carrier,
    sigma: &'a Involution,
    g: Vec<C64>,
    f: Vec<C64>,
    best: Option<f64>,
    registry: Registry,
}

impl Candidates<'_> {
    /// Match distance of the candidate, if it constructs at all.
    fn attempt(&mut self, d: &FamilyDescriptor, free: Option<&ScalarFunction>) -> Option<f64> {
        let pair = construct(self.s, self.sigma, d, free, &self.registry, Mode::Float).ok()?;
        let gv = pair.g.dense_values(self.s).ok()?;
        let fv = pair.f.dense_values(self.s).ok()?;
        let dist = gv
            .iter()
            .zip(&self.g)
            .chain(fv.iter().zip(&self.f))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        self.best = Some(self.best.map_or(dist, |b| b.min(dist)));
        Some(dist)
    }
}

fn proj(basis: &[C64], target: &[C64]) -> C64 {
    let (coef, _) = least_squares(&[basis], target);
    coef[0]
}

/// Branch (+1 or −1) of √(1+q²−α²) closest to `s`.
fn branch_for(s: C64, q: C64, alpha: C64) -> i8 {
    let root = sqrt_branch(c(1.0, 0.0) + q * q - alpha * alpha, 1);
    if (s - root).norm() <= (s + root).norm() {
        1
    } else {
        -1
    }
}

/// Finds the first family, in the order 1, 2, 3, 4, 6, 8, 5, 7, whose
/// reconstruction from recovered parameters matches (g, f) within the
/// classification tolerance.
pub fn classify(
    s: &Carrier,
    sigma: &Involution,
    alpha: C64,
    g: &ScalarFunction,
    f: &ScalarFunction,
) -> Result<ClassificationResult> {
    let fs = s.finite()?;
    let max_residual = residual(s, sigma, alpha, g, f)?.max_residual;
    if max_residual > tol::IDENTITY {
        return Err(Error::NotASolution(max_residual));
    }
    let chars: Vec<Character> = enumerate_multiplicative(fs, MULTIPLICATIVE_ORDER_BOUND)?;
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for (k, ch) in chars.iter().enumerate() {
        if ch.is_zero() {
            continue;
        }
        if ch.is_even(sigma)? {
            even.push((k, ch.to_c64()));
        } else {
            odd.push(k);
        }
    }

    let mut cands = Candidates {
        s,
        sigma,
        g: g.dense_values(s)?,
        f: f.dense_values(s)?,
        best: None,
        registry: Registry::new(),
    };
    let found = |d: FamilyDescriptor, free: Option<ScalarFunction>, dist: f64| {
        Ok(ClassificationResult {
            family_tag: Verdict::Family(d.family_tag),
            params: Some(d),
            free,
            match_residual: Some(dist),
            max_residual,
        })
    };
    macro_rules! try_candidate {
        ($d:expr, $free:expr) => {{
            let d: FamilyDescriptor = $d;
            let free: Option<ScalarFunction> = $free;
            if let Some(dist) = cands.attempt(&d, free.as_ref()) {
                if dist < tol::CLASSIFY {
                    return found(d, free, dist);
                }
            }
        }};
    }

    let g_dense = ScalarFunction::Dense(cands.g.clone());
    let f_dense = ScalarFunction::Dense(cands.f.clone());
    try_candidate!(FamilyDescriptor::new(1, alpha), Some(f_dense.clone()));
    try_candidate!(FamilyDescriptor::new(2, alpha), Some(g_dense.clone()));
    try_candidate!(FamilyDescriptor::new(3, alpha), Some(g_dense.clone()));

    for (k, chi) in &even {
        let a = proj(chi, &cands.g);
        let b = proj(chi, &cands.f);
        let q = b * 2.0 - alpha;
        let branch = branch_for(a * 2.0 - 1.0, q, alpha);
        try_candidate!(
            FamilyDescriptor::new(4, alpha).with_q(q).with_branch(branch).with_chi(*k),
            None
        );
    }

    for (i, _) in &even {
        for (j, _) in &even {
            if i != j {
                try_candidate!(FamilyDescriptor::new(6, alpha).with_chis(*i, *j), None);
            }
        }
    }

    for k in &odd {
        try_candidate!(FamilyDescriptor::new(8, alpha).with_chi(*k), None);
    }

    for (a, (i, chi_i)) in even.iter().enumerate() {
        for (j, chi_j) in &even[a + 1..] {
            let (cf, _) = least_squares(&[chi_i, chi_j], &cands.f);
            let (cg, _) = least_squares(&[chi_i, chi_j], &cands.g);
            let q = cf[0] - cf[1];
            let branch = branch_for(cg[0] - cg[1], q, alpha);
            try_candidate!(
                FamilyDescriptor::new(5, alpha).with_q(q).with_branch(branch).with_chis(*i, *j),
                None
            );
        }
    }

    let n = fs.order();
    for (k, chi) in &even {
        let h: Vec<C64> = cands.f.iter().zip(chi).map(|(fv, x)| fv - alpha * x).collect();
        let near = |sign: f64| {
            cands
                .g
                .iter()
                .zip(chi)
                .zip(&h)
                .all(|((gv, x), hv)| (gv - (x + hv * sign)).norm() < tol::CLASSIFY)
        };
        let branch = if near(1.0) {
            1
        } else if near(-1.0) {
            -1
        } else {
            continue;
        };
        let spec = HSpec::new(
            FunctionRef::Inline(ScalarFunction::zero_dense(n)),
            FunctionRef::Inline(ScalarFunction::Dense(h)),
        );
        try_candidate!(FamilyDescriptor::new(7, alpha).with_branch(branch).with_chi(*k).with_h(spec), None);
    }

    Ok(ClassificationResult {
        family_tag: Verdict::Unclassified,
        params: None,
        free: None,
        match_residual: cands.best,
        max_residual,
    })
}
