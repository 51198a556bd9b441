//! exp, ln, sin and cos at double-double accuracy, evaluated in 128-bit
//! binary floating point (MPFR) and rounded back to a (hi, lo) pair.

use rug::Float;
use twofloat::TwoFloat;

const PRECISION: u32 = 128;

fn to_big(x: TwoFloat) -> Float {
    Float::with_val(PRECISION, x.hi()) + x.lo()
}

fn from_big(x: &Float) -> TwoFloat {
    let hi = x.to_f64();
    if !hi.is_finite() {
        return TwoFloat::from(hi);
    }
    let lo = Float::with_val(PRECISION, x - hi).to_f64();
    TwoFloat::new_add(hi, lo)
}

pub fn exp(x: TwoFloat) -> TwoFloat {
    from_big(&to_big(x).exp())
}

pub fn ln(x: TwoFloat) -> TwoFloat {
    from_big(&to_big(x).ln())
}

pub fn cos_sin(x: TwoFloat) -> (TwoFloat, TwoFloat) {
    if x.hi() == 0.0 {
        return (TwoFloat::from(1.0), TwoFloat::from(0.0));
    }
    let (sin, cos) = to_big(x).sin_cos(Float::new(PRECISION));
    (from_big(&cos), from_big(&sin))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value(t: TwoFloat) -> (f64, f64) {
        (t.hi(), t.lo())
    }

    fn close(t: TwoFloat, hi: f64, lo: f64, tol: f64) {
        let d = (t - TwoFloat::new_add(hi, lo)).hi().abs();
        assert!(d <= tol * hi.abs(), "{:?} vs ({hi}, {lo})", value(t));
    }

    // (hi, lo) references from a 50-digit evaluation.
    #[test]
    fn matches_reference_digits() {
        close(exp(TwoFloat::from(18.0)), 65659969.13733051, 1.4165536846555444e-09, 1e-30);
        let (c, s) = cos_sin(TwoFloat::from(-1.8949289021652716));
        close(c, -0.3184866502516839, -1.1412632125952406e-17, 1e-30);
        close(s, -0.9479273461671319, -1.3180573437681203e-17, 1e-30);
        close(ln(TwoFloat::from(2.0)), std::f64::consts::LN_2, 2.3190468138462996e-17, 1e-30);
        close(ln(TwoFloat::from(7.0)), 1.9459101490553132, 7.323586207904907e-17, 1e-30);
        assert_eq!(value(exp(TwoFloat::from(0.0))), (1.0, 0.0));
    }
}
