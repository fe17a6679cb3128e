//! Complex error-ball arithmetic: arbitrary-precision midpoint plus a
//! certified absolute error radius.
//!
//! Every operation returns a radius at least as large as the exactly
//! propagated input error plus a bound on the midpoint rounding error.
//! Radii are low-precision floats and all radius arithmetic rounds up.

use rug::float::{Round, Special};
use rug::{Assign, Complex, Float, Integer};
use std::cmp::Ordering;

/// Bits carried by radius values; they only need a couple of safe digits.
pub const RADIUS_PREC: u32 = 32;

/// Upward-rounded radius evaluation of a rug incomplete-computation value.
fn rup<S>(src: S) -> Float
where
    Float: rug::ops::AssignRound<S, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(RADIUS_PREC, src, Round::Up).0
}

fn rzero() -> Float {
    Float::new(RADIUS_PREC)
}

/// 2^(e_max - prec + slack): bound for the componentwise rounding error of a
/// freshly rounded midpoint `m` at precision `prec`.
fn ulp_rad(m: &Complex, slack: u32) -> Float {
    let e_re = m.real().get_exp();
    let e_im = m.imag().get_exp();
    let e = match (e_re, e_im) {
        (Some(a), Some(b)) => a.max(b),
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => return rzero(),
    };
    let prec = m.prec().0.min(m.prec().1) as i32;
    Float::with_val(RADIUS_PREC, Float::i_exp(1, e - prec + slack as i32))
}

#[derive(Clone, Debug)]
pub struct ErrorBall {
    pub mid: Complex,
    pub rad: Float,
}

impl ErrorBall {
    pub fn zero(prec: u32) -> Self {
        ErrorBall { mid: Complex::new(prec), rad: rzero() }
    }

    pub fn exact_u32(v: u32, prec: u32) -> Self {
        ErrorBall { mid: Complex::with_val(prec, v), rad: rzero() }
    }

    pub fn exact_integer(v: &Integer, prec: u32) -> Self {
        let mid = Complex::with_val(prec, v);
        // an integer wider than prec does round
        let rad = ulp_rad(&mid, 1);
        ErrorBall { mid, rad }
    }

    /// Midpoint taken as exact (used for freshly computed correctly rounded
    /// library values); radius = one ulp.
    pub fn from_mid(mid: Complex) -> Self {
        let rad = ulp_rad(&mid, 1);
        ErrorBall { mid, rad }
    }

    pub fn from_parts(mid: Complex, rad: Float) -> Self {
        debug_assert!(rad.is_sign_positive() || rad.is_zero());
        ErrorBall { mid, rad }
    }

    /// π as a ball.
    pub fn pi(prec: u32) -> Self {
        let mid = Complex::with_val(prec, (Float::with_val(prec, rug::float::Constant::Pi), 0));
        let rad = ulp_rad(&mid, 1);
        ErrorBall { mid, rad }
    }

    pub fn prec(&self) -> u32 {
        self.mid.prec().0.max(self.mid.prec().1)
    }

    /// Upper bound for |mid|.
    pub fn mag_mid_ub(&self) -> Float {
        let r2 = rup(self.mid.real() * self.mid.real());
        let i2 = rup(self.mid.imag() * self.mid.imag());
        let mut s = rup(&r2 + &i2);
        s.sqrt_round(Round::Up);
        s
    }

    /// Lower bound for |mid|.
    pub fn mag_mid_lb(&self) -> Float {
        let r2 = Float::with_val_round(RADIUS_PREC, self.mid.real() * self.mid.real(), Round::Down).0;
        let i2 = Float::with_val_round(RADIUS_PREC, self.mid.imag() * self.mid.imag(), Round::Down).0;
        let mut s = Float::with_val_round(RADIUS_PREC, &r2 + &i2, Round::Down).0;
        s.sqrt_round(Round::Down);
        if s.is_sign_negative() {
            s.assign(0);
        }
        s
    }

    /// Upper bound for |value| over the whole ball.
    pub fn mag_ub(&self) -> Float {
        rup(&self.mag_mid_ub() + &self.rad)
    }

    /// True iff |midpoint| <= radius.
    pub fn contains_zero(&self) -> bool {
        self.mag_mid_lb() <= self.rad
    }

    pub fn is_finite(&self) -> bool {
        self.rad.is_finite() && self.mid.real().is_finite() && self.mid.imag().is_finite()
    }

    pub fn add(&self, rhs: &ErrorBall) -> ErrorBall {
        let prec = self.prec().max(rhs.prec());
        let mid = Complex::with_val(prec, &self.mid + &rhs.mid);
        let rad = rup(rup(&self.rad + &rhs.rad) + ulp_rad(&mid, 1));
        ErrorBall { mid, rad }
    }

    pub fn sub(&self, rhs: &ErrorBall) -> ErrorBall {
        let prec = self.prec().max(rhs.prec());
        let mid = Complex::with_val(prec, &self.mid - &rhs.mid);
        let rad = rup(rup(&self.rad + &rhs.rad) + ulp_rad(&mid, 1));
        ErrorBall { mid, rad }
    }

    pub fn neg(&self) -> ErrorBall {
        let mid = Complex::with_val(self.prec(), -&self.mid);
        ErrorBall { mid, rad: self.rad.clone() }
    }

    pub fn mul(&self, rhs: &ErrorBall) -> ErrorBall {
        let prec = self.prec().max(rhs.prec());
        let mid = Complex::with_val(prec, &self.mid * &rhs.mid);
        let ma = self.mag_mid_ub();
        let mb = rhs.mag_mid_ub();
        // |a db| + |b da| + |da db|, then complex-multiplication rounding
        let prop = rup(rup(&ma * &rhs.rad) + rup(&mb * &self.rad));
        let prop = rup(&prop + &rup(&self.rad * &rhs.rad));
        let rad = rup(&prop + &ulp_rad(&mid, 3));
        ErrorBall { mid, rad }
    }

    /// Division; if the denominator ball straddles zero the radius becomes +inf.
    pub fn div(&self, rhs: &ErrorBall) -> ErrorBall {
        let prec = self.prec().max(rhs.prec());
        let mid = Complex::with_val(prec, &self.mid / &rhs.mid);
        let blb = rhs.mag_mid_lb();
        let denom = Float::with_val_round(RADIUS_PREC, &blb - &rhs.rad, Round::Down).0;
        if !(denom > 0) {
            return ErrorBall { mid, rad: Float::with_val(RADIUS_PREC, Special::Infinity) };
        }
        let qub = {
            let q = ErrorBall { mid: mid.clone(), rad: rzero() };
            q.mag_mid_ub()
        };
        let num = rup(&self.rad + &rup(&qub * &rhs.rad));
        let prop = rup(&num / &denom);
        let rad = rup(&prop + &ulp_rad(&mid, 3));
        ErrorBall { mid, rad }
    }

    pub fn mul_integer(&self, n: &Integer) -> ErrorBall {
        let mid = Complex::with_val(self.prec(), &self.mid * n);
        let nn = rup(Float::with_val_round(RADIUS_PREC, n, Round::Up).0.abs());
        let rad = rup(rup(&self.rad * &nn) + ulp_rad(&mid, 2));
        ErrorBall { mid, rad }
    }

    /// Multiply by an exact real scalar.
    pub fn mul_float(&self, f: &Float) -> ErrorBall {
        let mid = Complex::with_val(self.prec(), &self.mid * f);
        let fa = rup(f.abs_ref());
        let rad = rup(rup(&self.rad * &fa) + ulp_rad(&mid, 2));
        ErrorBall { mid, rad }
    }

    /// Widen the radius by an extra absolute allowance.
    pub fn add_rad(&mut self, extra: &Float) {
        self.rad = rup(&self.rad + extra);
    }

    /// Drop the imaginary midpoint (for sums known to be real); the radius
    /// already covers whatever was there.
    pub fn real_only(&self) -> ErrorBall {
        let prec = self.prec();
        let mid = Complex::with_val(prec, (Float::with_val(prec, self.mid.real()), Float::new(prec)));
        ErrorBall { mid, rad: self.rad.clone() }
    }

    /// Multiply by i (exact rotation).
    pub fn mul_i(&self) -> ErrorBall {
        let mid = Complex::with_val(
            self.prec(),
            (Float::with_val(self.prec(), -self.mid.imag()), Float::with_val(self.prec(), self.mid.real())),
        );
        ErrorBall { mid, rad: self.rad.clone() }
    }

    pub fn conj(&self) -> ErrorBall {
        let mut mid = self.mid.clone();
        mid.conj_mut();
        ErrorBall { mid, rad: self.rad.clone() }
    }

    /// Integer power by binary exponentiation over ball multiplication.
    pub fn powi(&self, mut e: u32) -> ErrorBall {
        let mut base = self.clone();
        let mut acc = ErrorBall::exact_u32(1, self.prec());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Complex exponential: |exp(z+d) - exp(z)| <= exp(Re z + |d|) * |d|.
    pub fn exp(&self) -> ErrorBall {
        let prec = self.prec();
        let mid = Complex::with_val(prec, self.mid.exp_ref());
        let re_ub = rup(self.mid.real() + &self.rad);
        let mut eub = rup(re_ub.exp_ref());
        eub = rup(&eub * &self.rad);
        let rad = rup(&eub + &ulp_rad(&mid, 3));
        ErrorBall { mid, rad }
    }

    /// Real part as a (midpoint, radius) pair.
    pub fn real_part(&self) -> (Float, Float) {
        (Float::with_val(self.prec(), self.mid.real()), self.rad.clone())
    }

    /// Imaginary part ball contains zero?
    pub fn imag_contains_zero(&self) -> bool {
        let m = rup(self.mid.imag().abs_ref());
        m <= self.rad
    }

    /// Decimal string of a Float with `digits` significant digits (deterministic).
    pub fn float_dec(x: &Float, digits: usize) -> String {
        if x.is_zero() {
            return "0".to_string();
        }
        let s = x.to_string_radix(10, Some(digits));
        s
    }

    /// Deterministic decimal rendering of the midpoint and radius.
    pub fn decimal_parts(&self, digits: usize) -> (String, String, String) {
        (
            Self::float_dec(&Float::with_val(self.prec(), self.mid.real()), digits),
            Self::float_dec(&Float::with_val(self.prec(), self.mid.imag()), digits),
            Self::float_dec(&self.rad, 3),
        )
    }
}

/// Working precision in bits for a decimal-digit request, with guard bits.
pub fn digits_to_prec(digits: u32) -> u32 {
    ((digits as f64) * std::f64::consts::LN_10 / std::f64::consts::LN_2).ceil() as u32 + 32
}
