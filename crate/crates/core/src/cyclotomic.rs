//! Exact arithmetic in cyclotomic fields Q(ζ_n).
//!
//! An element is stored at some order `n` as rational coordinates in the
//! power basis 1, ζ, …, ζ^{φ(n)-1}, reduced modulo the n-th cyclotomic
//! polynomial. Mixed-order operations lift both sides to the lcm order.
//! Gaussian rationals live at order 4, plain rationals at order 1, and the
//! values of characters of finite semigroups are roots of unity, so the
//! exact mode covers every dense function built from them.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{LazyLock, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::{c, sqrt_branch, C64};

static CYCLOTOMIC_POLYS: LazyLock<Mutex<HashMap<u32, Vec<BigInt>>>> = LazyLock::new(Default::default);

/// Coefficients (ascending) of the n-th cyclotomic polynomial.
fn cyclotomic_poly(n: u32) -> Vec<BigInt> {
    if let Some(p) = CYCLOTOMIC_POLYS.lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Φ_d for every proper divisor d.
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = exact_div_monic(&num, &cyclotomic_poly(d));
        }
    }
    CYCLOTOMIC_POLYS.lock().unwrap().insert(n, num.clone());
    num
}

fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let coef = rem[k + dd].clone();
        if coef.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[k + j] -= &coef * dj;
        }
        quot[k] = coef;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

fn totient(n: u32) -> usize {
    (1..=n).filter(|k| k.gcd(&n) == 1).count()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Cyclotomic {
    order: u32,
    #[serde(with = "rational_strings")]
    coeffs: Vec<BigRational>,
}

/// Rationals as `"p/q"` strings.
mod rational_strings {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|q| q.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| t.parse::<BigRational>().map_err(D::Error::custom))
            .collect()
    }
}

impl Cyclotomic {
    /// Builds from coefficients of ζ_n^k, k = 0..len (any length; exponents fold mod n).
    pub fn from_powers(order: u32, powers: &[BigRational]) -> Self {
        assert!(order > 0);
        let n = order as usize;
        let mut raw = vec![BigRational::zero(); n];
        for (k, v) in powers.iter().enumerate() {
            raw[k % n] += v;
        }
        let phi = cyclotomic_poly(order);
        let deg = phi.len() - 1;
        for k in (deg..n).rev() {
            let coef = std::mem::replace(&mut raw[k], BigRational::zero());
            if coef.is_zero() {
                continue;
            }
            for (j, pj) in phi.iter().enumerate().take(deg) {
                raw[k - deg + j] -= &coef * BigRational::from_integer(pj.clone());
            }
        }
        raw.truncate(deg);
        debug_assert_eq!(deg, totient(order));
        Cyclotomic { order, coeffs: raw }
    }

    pub fn rational(q: BigRational) -> Self {
        Cyclotomic {
            order: 1,
            coeffs: vec![q],
        }
    }

    pub fn from_integer(k: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(k)))
    }

    pub fn gaussian(re: BigRational, im: BigRational) -> Self {
        if im.is_zero() {
            Self::rational(re)
        } else {
            Cyclotomic {
                order: 4,
                coeffs: vec![re, im],
            }
        }
    }

    /// ζ_n^k.
    pub fn root_of_unity(k: u32, n: u32) -> Self {
        let mut powers = vec![BigRational::zero(); n as usize];
        powers[(k % n) as usize] = BigRational::one();
        Self::from_powers(n, &powers)
    }

    /// Exact value of the binary floating-point components.
    pub fn from_c64(z: C64) -> Self {
        let re = BigRational::from_float(z.re).expect("finite real part");
        let im = BigRational::from_float(z.im).expect("finite imaginary part");
        Self::gaussian(re, im)
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn lift(&self, m: u32) -> Self {
        if m == self.order {
            return self.clone();
        }
        let step = (m / self.order) as usize;
        let mut powers = vec![BigRational::zero(); m as usize];
        for (k, v) in self.coeffs.iter().enumerate() {
            powers[k * step] = v.clone();
        }
        Self::from_powers(m, &powers)
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let m = self.order.lcm(&other.order);
        (self.lift(m), other.lift(m))
    }

    pub fn to_c64(&self) -> C64 {
        self.coeffs
            .iter()
            .enumerate()
            .fold(c(0.0, 0.0), |acc, (k, v)| {
                acc + unit(k as u32, self.order) * v.to_f64().unwrap_or(f64::NAN)
            })
    }

    /// Exact square root times `branch`, when the value is a square of a
    /// Gaussian rational with modest denominators; `None` otherwise.
    pub fn sqrt_branch(&self, branch: i8) -> Option<Self> {
        let approx = sqrt_branch(self.to_c64(), 1);
        let re = approximate_rational(approx.re, 1 << 20)?;
        let im = approximate_rational(approx.im, 1 << 20)?;
        let root = Self::gaussian(re, im);
        if (root.clone() * root.clone()) != *self {
            return None;
        }
        Some(if branch < 0 { -root } else { root })
    }
}

/// Best rational approximation with denominator at most `max_den`
/// (continued fractions).
fn approximate_rational(x: f64, max_den: i64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let negative = x < 0.0;
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e15 {
            break;
        }
        let a = a as i128;
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        if q2 > max_den as i128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = v - a as f64;
        if frac < 1e-12 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    let r = BigRational::new(BigInt::from(p1), BigInt::from(q1));
    Some(if negative { -r } else { r })
}

/// ζ_n^k in floating point, exact at quarter turns.
fn unit(k: u32, n: u32) -> C64 {
    if (4 * k).is_multiple_of(n) {
        return [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][(4 * k / n) as usize % 4];
    }
    C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64)
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.common(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for Cyclotomic {}

impl Add for Cyclotomic {
    type Output = Self;
    fn add(self, other: Self) -> Self {
        let (mut a, b) = self.common(&other);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs) {
            *x += y;
        }
        a
    }
}

impl Sub for Cyclotomic {
    type Output = Self;
    fn sub(self, other: Self) -> Self {
        self + (-other)
    }
}

impl Neg for Cyclotomic {
    type Output = Self;
    fn neg(mut self) -> Self {
        for x in self.coeffs.iter_mut() {
            *x = -x.clone();
        }
        self
    }
}

impl Mul for Cyclotomic {
    type Output = Self;
    fn mul(self, other: Self) -> Self {
        let (a, b) = self.common(&other);
        let mut powers = vec![BigRational::zero(); a.coeffs.len() + b.coeffs.len()];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                powers[i + j] += x * y;
            }
        }
        Self::from_powers(a.order, &powers)
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, v) in self.coeffs.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let coef = if v.is_negative() {
                format!("({v})")
            } else {
                v.to_string()
            };
            terms.push(match k {
                0 => coef,
                1 => format!("{coef}·ζ{}", self.order),
                _ => format!("{coef}·ζ{}^{k}", self.order),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn cyclotomic_polynomials() {
        let as_i64 = |n| -> Vec<i64> {
            cyclotomic_poly(n).iter().map(|b| b.to_i64().unwrap()).collect()
        };
        assert_eq!(as_i64(1), vec![-1, 1]);
        assert_eq!(as_i64(3), vec![1, 1, 1]);
        assert_eq!(as_i64(4), vec![1, 0, 1]);
        assert_eq!(as_i64(6), vec![1, -1, 1]);
        assert_eq!(as_i64(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn roots_of_unity_relations() {
        let w = Cyclotomic::root_of_unity(1, 3);
        let sum = Cyclotomic::one() + w.clone() + w.clone() * w.clone();
        assert!(sum.is_zero());
        assert_eq!(w.clone() * w.clone() * w.clone(), Cyclotomic::one());
        // ζ_12^3 = i, ζ_12^4 = ω
        let i = Cyclotomic::gaussian(q(0, 1), q(1, 1));
        assert_eq!(Cyclotomic::root_of_unity(3, 12), i);
        assert_eq!(Cyclotomic::root_of_unity(4, 12), w);
        assert_eq!(i.clone() * i, Cyclotomic::from_integer(-1));
    }

    #[test]
    fn float_image() {
        let w = Cyclotomic::root_of_unity(2, 3);
        let z = w.to_c64();
        assert!((z - C64::from_polar(1.0, 2.0 * std::f64::consts::TAU / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn exact_square_roots() {
        let z = Cyclotomic::gaussian(q(-3, 1), q(4, 1)); // (1+2i)^2
        assert_eq!(z.sqrt_branch(1).unwrap(), Cyclotomic::gaussian(q(1, 1), q(2, 1)));
        assert_eq!(z.sqrt_branch(-1).unwrap(), Cyclotomic::gaussian(q(-1, 1), q(-2, 1)));
        let minus_one = Cyclotomic::from_integer(-1);
        assert_eq!(minus_one.sqrt_branch(1).unwrap(), Cyclotomic::gaussian(q(0, 1), q(1, 1)));
        assert_eq!(Cyclotomic::rational(q(25, 16)).sqrt_branch(1).unwrap(), Cyclotomic::rational(q(5, 4)));
        assert!(Cyclotomic::from_integer(2).sqrt_branch(1).is_none());
    }
}
