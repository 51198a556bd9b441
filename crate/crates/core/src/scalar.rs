//! Complex scalars: the working `f64` type, a double-double complex used by
//! rule-defined functions, literal parsing and the square-root branch rule.

use std::cell::RefCell;
use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use twofloat::TwoFloat;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Pinned numeric tolerances.
pub mod tol {
    /// Absolute tolerance for identity checks in float mode, per complex component.
    pub const IDENTITY: f64 = 1e-9;
    /// Maximum pointwise distance accepted by the classifier.
    pub const CLASSIFY: f64 = 1e-7;
    /// Relative singular-value cutoff for rank decisions.
    pub const RANK: f64 = 1e-9;
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Component-wise closeness: both |re| and |im| of the difference within `tol`.
pub fn close(a: C64, b: C64, tol: f64) -> bool {
    let d = a - b;
    d.re.abs() <= tol && d.im.abs() <= tol
}

pub fn max_component(z: C64) -> f64 {
    z.re.abs().max(z.im.abs())
}

/// Principal square root (non-negative real part, non-negative imaginary
/// part on the imaginary axis) multiplied by `branch`.
pub fn sqrt_branch(z: C64, branch: i8) -> C64 {
    let mut s = z.sqrt();
    if s.re == 0.0 && s.im < 0.0 {
        s = -s;
    }
    if s.re == 0.0 {
        s.re = 0.0;
    }
    if branch < 0 {
        -s
    } else {
        s
    }
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (decimal reals; `i` alone means `1i`).
pub fn parse_complex(text: &str) -> Result<C64> {
    let err = || Error::ComplexLiteral(text.to_string());
    let s: String = text.chars().filter(|ch| !ch.is_whitespace()).collect();
    if s.is_empty() {
        return Err(err());
    }
    let parse_real = |t: &str| -> Result<f64> {
        if t.is_empty() || t.contains(['i', 'n', 'N', 'I']) {
            return Err(err());
        }
        t.parse::<f64>().map_err(|_| err())
    };
    let parse_imag = |t: &str| -> Result<f64> {
        let body = t.strip_suffix('i').ok_or_else(err)?;
        match body {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => parse_real(body),
        }
    };
    if !s.ends_with('i') {
        return Ok(c(parse_real(&s)?, 0.0));
    }
    // Split at the last sign that is not part of an exponent or the leading sign.
    let bytes = s.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }
    match split {
        None => Ok(c(0.0, parse_imag(&s)?)),
        Some(k) => Ok(c(parse_real(&s[..k])?, parse_imag(&s[k..])?)),
    }
}

pub fn format_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Complex number with double-double components.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DdComplex {
    pub re: TwoFloat,
    pub im: TwoFloat,
}

impl DdComplex {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from(c(1.0, 0.0))
    }

    pub fn to_c64(self) -> C64 {
        c(f64::from(self.re), f64::from(self.im))
    }

    /// e^z, memoized per thread on the exact argument.
    pub fn exp(self) -> Self {
        const CAP: usize = 1 << 21;
        thread_local! {
            static CACHE: RefCell<HashMap<[u64; 4], DdComplex>> = RefCell::new(HashMap::new());
        }
        let key = [self.re.hi(), self.re.lo(), self.im.hi(), self.im.lo()].map(f64::to_bits);
        if let Some(v) = CACHE.with(|c| c.borrow().get(&key).copied()) {
            return v;
        }
        let v = self.exp_uncached();
        CACHE.with(|c| {
            let mut c = c.borrow_mut();
            if c.len() >= CAP {
                c.clear();
            }
            c.insert(key, v);
        });
        v
    }

    fn exp_uncached(self) -> Self {
        let m = crate::transcendental::exp(self.re);
        if self.im.hi() == 0.0 {
            return DdComplex { re: m, im: self.im };
        }
        let (cos, sin) = crate::transcendental::cos_sin(self.im);
        DdComplex {
            re: m * cos,
            im: m * sin,
        }
    }

    pub fn scale(self, k: f64) -> Self {
        DdComplex {
            re: self.re * k,
            im: self.im * k,
        }
    }
}

impl From<C64> for DdComplex {
    fn from(z: C64) -> Self {
        DdComplex {
            re: TwoFloat::from(z.re),
            im: TwoFloat::from(z.im),
        }
    }
}

impl Add for DdComplex {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        DdComplex {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Sub for DdComplex {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        DdComplex {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl Mul for DdComplex {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        DdComplex {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl Neg for DdComplex {
    type Output = Self;
    fn neg(self) -> Self {
        DdComplex {
            re: -self.re,
            im: -self.im,
        }
    }
}
