//! Arbitrary-precision complex numbers over `astro_float::BigFloat`.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::BigInt;
use num_traits::Zero;

use crate::arithmetic::ExactRational;
use crate::error::{Error, Result};

pub(crate) const RM: RoundingMode = RoundingMode::ToEven;

/// Smallest accepted mantissa width.
pub const MIN_BITS: usize = 53;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

pub(crate) fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

pub(crate) fn ln(x: &BigFloat, bits: usize) -> BigFloat {
    with_consts(|cc| x.ln(bits, RM, cc))
}

pub(crate) fn pi(bits: usize) -> BigFloat {
    with_consts(|cc| cc.pi(bits, RM))
}

pub(crate) fn from_u64(v: u64, bits: usize) -> BigFloat {
    BigFloat::from_u64(v, bits)
}

pub(crate) fn from_bigint(n: &BigInt, bits: usize) -> BigFloat {
    let (sign, words) = n.to_u64_digits();
    if words.is_empty() {
        return BigFloat::new(bits);
    }
    let s = match sign {
        num_bigint::Sign::Minus => Sign::Neg,
        _ => Sign::Pos,
    };
    let mut x = BigFloat::from_words(&words, s, (words.len() * 64) as i32);
    x.set_precision(bits, RM).expect("valid precision");
    x
}

pub(crate) fn from_rational(q: &ExactRational, bits: usize) -> BigFloat {
    let n = from_bigint(q.numer(), bits + 64);
    let d = from_bigint(q.denom(), bits + 64);
    n.div(&d, bits, RM)
}

/// `ldexp` without going through a platform libm.
fn scale_pow2(mut v: f64, mut e: i64) -> f64 {
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
        if v.is_infinite() {
            return v;
        }
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
        if v == 0.0 {
            return v;
        }
    }
    v * 2f64.powi(e as i32)
}

/// Nearest-ish `f64` (to within a couple of ulps); saturates to `±inf`/`0`.
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if x.is_nan() {
        return f64::NAN;
    }
    let Some((m, _, s, e, _)) = x.as_raw_parts() else {
        return if x.is_inf_neg() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
    };
    let top = m[m.len() - 1] as f64;
    let next = if m.len() > 1 {
        m[m.len() - 2] as f64
    } else {
        0.0
    };
    let frac = (top + next / 18446744073709551616.0) / 18446744073709551616.0;
    let v = scale_pow2(frac, e as i64);
    if s == Sign::Neg {
        -v
    } else {
        v
    }
}

/// `log2 |x|` as an `f64`, valid far outside the `f64` exponent range.
pub fn log2_abs(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let Some((m, _, _, e, _)) = x.as_raw_parts() else {
        return f64::INFINITY;
    };
    let top = m[m.len() - 1] as f64 / 18446744073709551616.0;
    e as f64 + top.log2()
}

pub(crate) fn cmp(a: &BigFloat, b: &BigFloat) -> Ordering {
    match a.cmp(b) {
        Some(c) if c < 0 => Ordering::Less,
        Some(c) if c > 0 => Ordering::Greater,
        _ => Ordering::Equal,
    }
}

/// Complex number with `bits` of binary mantissa in each component.
#[derive(Clone)]
pub struct BigComplex {
    re: BigFloat,
    im: BigFloat,
    bits: usize,
}

impl BigComplex {
    /// Rejects non-finite parts and widths below [`MIN_BITS`].
    pub fn new(re: BigFloat, im: BigFloat, bits: usize) -> Result<Self> {
        if bits < MIN_BITS {
            return Err(Error::invalid(format!(
                "precision {bits} bits is below {MIN_BITS}"
            )));
        }
        if re.is_nan() || im.is_nan() || re.is_inf() || im.is_inf() {
            return Err(Error::NumericalFailure("non-finite complex value".into()));
        }
        Ok(BigComplex { re, im, bits }.rounded())
    }

    fn raw(re: BigFloat, im: BigFloat, bits: usize) -> Self {
        BigComplex { re, im, bits }
    }

    fn rounded(mut self) -> Self {
        let _ = self.re.set_precision(self.bits, RM);
        let _ = self.im.set_precision(self.bits, RM);
        self
    }

    pub fn zero(bits: usize) -> Self {
        Self::raw(BigFloat::new(bits), BigFloat::new(bits), bits)
    }

    pub fn from_f64(re: f64, im: f64, bits: usize) -> Self {
        Self::raw(
            BigFloat::from_f64(re, bits),
            BigFloat::from_f64(im, bits),
            bits,
        )
    }

    pub fn from_int(re: i64, bits: usize) -> Self {
        Self::raw(BigFloat::from_i64(re, bits), BigFloat::new(bits), bits)
    }

    pub fn from_rationals(re: &ExactRational, im: &ExactRational, bits: usize) -> Self {
        Self::raw(from_rational(re, bits), from_rational(im, bits), bits)
    }

    pub fn from_bigint(re: &BigInt, bits: usize) -> Self {
        Self::raw(from_bigint(re, bits), BigFloat::new(bits), bits)
    }

    /// `exp(2 pi i j / m)`.
    pub fn unit_root(j: u64, m: u64, bits: usize) -> Self {
        let w = bits + 32;
        let angle = pi(w)
            .mul(&from_u64(2 * j, w), w, RM)
            .div(&from_u64(m, w), w, RM);
        let (c, s) = with_consts(|cc| (angle.cos(w, RM, cc), angle.sin(w, RM, cc)));
        Self::raw(c, s, bits).rounded()
    }

    pub fn re(&self) -> &BigFloat {
        &self.re
    }

    pub fn im(&self) -> &BigFloat {
        &self.im
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Same value re-rounded to `bits`.
    pub fn with_bits(&self, bits: usize) -> Self {
        Self::raw(self.re.clone(), self.im.clone(), bits).rounded()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !(self.re.is_nan() || self.im.is_nan() || self.re.is_inf() || self.im.is_inf())
    }

    pub fn add(&self, o: &Self) -> Self {
        let b = self.bits;
        Self::raw(self.re.add(&o.re, b, RM), self.im.add(&o.im, b, RM), b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let b = self.bits;
        Self::raw(self.re.sub(&o.re, b, RM), self.im.sub(&o.im, b, RM), b)
    }

    pub fn neg(&self) -> Self {
        Self::raw(self.re.neg(), self.im.neg(), self.bits)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let b = self.bits;
        let w = b + 8;
        let re = self
            .re
            .mul(&o.re, w, RM)
            .sub(&self.im.mul(&o.im, w, RM), b, RM);
        let im = self
            .re
            .mul(&o.im, w, RM)
            .add(&self.im.mul(&o.re, w, RM), b, RM);
        Self::raw(re, im, b)
    }

    pub fn scale(&self, k: &BigFloat) -> Self {
        let b = self.bits;
        Self::raw(self.re.mul(k, b, RM), self.im.mul(k, b, RM), b)
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&BigFloat::from_i64(k, 64))
    }

    pub fn div_int(&self, k: i64) -> Self {
        let b = self.bits;
        let d = BigFloat::from_i64(k, 64);
        Self::raw(self.re.div(&d, b, RM), self.im.div(&d, b, RM), b)
    }

    /// `self / o`; a zero divisor yields a non-finite value (check with [`Self::is_finite`]).
    pub fn div(&self, o: &Self) -> Self {
        let b = self.bits;
        let w = b + 16;
        let den = o.norm_sqr_at(w);
        let re = self
            .re
            .mul(&o.re, w, RM)
            .add(&self.im.mul(&o.im, w, RM), w, RM);
        let im = self
            .im
            .mul(&o.re, w, RM)
            .sub(&self.re.mul(&o.im, w, RM), w, RM);
        Self::raw(re.div(&den, b, RM), im.div(&den, b, RM), b)
    }

    pub fn recip(&self) -> Self {
        let one = Self::from_int(1, self.bits);
        one.div(self)
    }

    fn norm_sqr_at(&self, w: usize) -> BigFloat {
        self.re
            .mul(&self.re, w, RM)
            .add(&self.im.mul(&self.im, w, RM), w, RM)
    }

    pub fn norm_sqr(&self) -> BigFloat {
        self.norm_sqr_at(self.bits)
    }

    pub fn abs(&self) -> BigFloat {
        self.norm_sqr_at(self.bits + 8).sqrt(self.bits, RM)
    }

    pub fn abs_f64(&self) -> f64 {
        to_f64(&self.abs())
    }

    /// `log2 |z|` as `f64`, safe for magnitudes beyond the `f64` range.
    pub fn log2_abs(&self) -> f64 {
        let a = log2_abs(&self.re);
        let b = log2_abs(&self.im);
        let hi = a.max(b);
        if hi == f64::NEG_INFINITY {
            return hi;
        }
        let lo = a.min(b);
        hi + 0.5 * (1.0 + 2f64.powf(2.0 * (lo - hi))).log2()
    }

    /// `ln |z|` at working precision.
    pub fn ln_abs(&self) -> BigFloat {
        let w = self.bits + 16;
        let half = BigFloat::from_f64(0.5, 64);
        ln(&self.norm_sqr_at(w), w).mul(&half, self.bits, RM)
    }

    /// `z^n` by repeated squaring.
    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::from_int(1, self.bits);
        let mut base = self.clone();
        let mut e = n;
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

    /// Lexicographic `(re, im)` order on exact big-float values.
    pub fn cmp_lex(&self, o: &Self) -> Ordering {
        cmp(&self.re, &o.re).then_with(|| cmp(&self.im, &o.im))
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (to_f64(&self.re), to_f64(&self.im))
    }

    /// Decimal rendering of both parts with `digits` significant digits.
    pub fn to_decimal_strings(&self, digits: usize) -> (String, String) {
        (decimal(&self.re, digits), decimal(&self.im, digits))
    }
}

/// Scientific-notation decimal string with `digits` significant digits.
pub fn decimal(x: &BigFloat, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    // Exact scaling by a power of ten, then integer rounding.
    let bits = ((digits as f64) * 3.33) as usize + 64;
    let neg = x.is_negative();
    let ax = x.abs();
    let e10 = (log2_abs(&ax) * std::f64::consts::LOG10_2).floor() as i64;
    let shift = digits as i64 - 1 - e10;
    let ten = from_u64(10, 64);
    let p = if shift >= 0 {
        ax.mul(&ten.powi(shift as usize, bits, RM), bits, RM)
    } else {
        ax.div(&ten.powi((-shift) as usize, bits, RM), bits, RM)
    };
    let rounded = p.add(&BigFloat::from_f64(0.5, 64), bits, RM).floor();
    let mut int = bigfloat_to_bigint(&rounded);
    let mut exp = e10;
    let limit = BigInt::from(10u32).pow(digits as u32);
    if int >= limit {
        int /= 10u32;
        exp += 1;
    }
    let s = int.to_string();
    let (head, tail) = s.split_at(1);
    let sign = if neg { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{exp}")
    } else {
        format!("{sign}{head}.{tail}e{exp}")
    }
}

fn bigfloat_to_bigint(x: &BigFloat) -> BigInt {
    if x.is_zero() {
        return BigInt::zero();
    }
    let (m, _, s, e, _) = x.as_raw_parts().expect("finite");
    let mut mag = num_bigint::BigUint::zero();
    for w in m.iter().rev() {
        mag = (mag << 64u32) + num_bigint::BigUint::from(*w);
    }
    let shift = e as i64 - (m.len() as i64) * 64;
    let mag = if shift >= 0 {
        mag << shift as u64
    } else {
        mag >> (-shift) as u64
    };
    let v = BigInt::from(mag);
    if s == Sign::Neg {
        -v
    } else {
        v
    }
}

impl PartialEq for BigComplex {
    fn eq(&self, o: &Self) -> bool {
        self.cmp_lex(o) == Ordering::Equal
    }
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_decimal_strings(20);
        write!(f, "({re}, {im})")
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
