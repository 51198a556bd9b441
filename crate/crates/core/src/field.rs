//! Scalar fields shared by the dense (finite-carrier) code paths: `f64`
//! complex numbers for float mode and [`Cyclotomic`] for exact mode.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use crate::cyclotomic::Cyclotomic;
use crate::scalar::{self, C64};

pub trait Field:
    Clone
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn half() -> Self;
    fn from_c64(z: C64) -> Self;
    fn to_c64(&self) -> C64;
    /// Zero test: exact equality, or component-wise within `tol` in float mode.
    fn is_zero_within(&self, tol: f64) -> bool;
    fn sqrt_branch(&self, branch: i8) -> Option<Self>;

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.clone() - other.clone()).is_zero_within(tol)
    }

    /// Magnitude used when reporting a residual.
    fn magnitude(&self) -> f64 {
        if Self::EXACT && self.is_zero_within(0.0) {
            0.0
        } else {
            self.to_c64().norm()
        }
    }
}

impl Field for C64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        scalar::c(0.0, 0.0)
    }
    fn one() -> Self {
        scalar::c(1.0, 0.0)
    }
    fn half() -> Self {
        scalar::c(0.5, 0.0)
    }
    fn from_c64(z: C64) -> Self {
        z
    }
    fn to_c64(&self) -> C64 {
        *self
    }
    fn is_zero_within(&self, tol: f64) -> bool {
        scalar::max_component(*self) <= tol
    }
    fn sqrt_branch(&self, branch: i8) -> Option<Self> {
        Some(scalar::sqrt_branch(*self, branch))
    }
}

impl Field for Cyclotomic {
    const EXACT: bool = true;

    fn zero() -> Self {
        Cyclotomic::zero()
    }
    fn one() -> Self {
        Cyclotomic::one()
    }
    fn half() -> Self {
        Cyclotomic::from_c64(scalar::c(0.5, 0.0))
    }
    fn from_c64(z: C64) -> Self {
        Cyclotomic::from_c64(z)
    }
    fn to_c64(&self) -> C64 {
        Cyclotomic::to_c64(self)
    }
    fn is_zero_within(&self, _tol: f64) -> bool {
        self.is_zero()
    }
    fn sqrt_branch(&self, branch: i8) -> Option<Self> {
        Cyclotomic::sqrt_branch(self, branch)
    }
}
