//! Exact rational and integer polynomials.
//!
//! Builds the map `phi_p(x) = (x^p - x)/p`, its iterates, and the monic
//! integral model `F_n = p^{e_n} (phi_p^n(x) - 1)` with `e_n = (p^n - 1)/(p - 1)`.
//! These are small-`n` oracles; the orbit modules are the scalable route.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Trial-division primality test. Inputs are tiny.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn check_prime(p: u32) -> Result<()> {
    if is_prime(p as u64) {
        Ok(())
    } else {
        Err(Error::invalid(format!("p = {p} is not a prime >= 2")))
    }
}

/// Resource caps shared by the exact and orbit computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest polynomial degree produced by composition.
    pub max_degree: u64,
    /// Largest bit length of any exact coefficient.
    pub max_coeff_bits: u64,
    /// Largest number of backward-orbit leaves.
    pub max_orbit: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_degree: 1 << 16,
            max_coeff_bits: 1 << 26,
            max_orbit: 1 << 16,
        }
    }
}

impl Caps {
    /// `p^n`, or a resource-limit error if it exceeds `cap`.
    pub(crate) fn power_within(p: u32, n: u32, cap: u64, what: &str) -> Result<u64> {
        let mut acc: u64 = 1;
        for _ in 0..n {
            acc = acc
                .checked_mul(p as u64)
                .filter(|&v| v <= cap)
                .ok_or_else(|| Error::limit(format!("{what} {p}^{n}"), cap))?;
        }
        if acc > cap {
            return Err(Error::limit(format!("{what} {p}^{n}"), cap));
        }
        Ok(acc)
    }
}

/// Exact rational in canonical form (positive denominator, reduced).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let d = denom.into();
        if d.is_zero() {
            return Err(Error::invalid("zero denominator"));
        }
        Ok(ExactRational(BigRational::new(numer.into(), d)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        ExactRational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        ExactRational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactRational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    /// Bit length of the larger of numerator and denominator.
    pub fn bits(&self) -> u64 {
        self.0.numer().bits().max(self.0.denom().bits())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl From<BigRational> for ExactRational {
    fn from(r: BigRational) -> Self {
        ExactRational(r)
    }
}

impl From<i64> for ExactRational {
    fn from(n: i64) -> Self {
        ExactRational::from_integer(n)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `"a"` or `"a/b"` with integer `a`, `b`.
impl FromStr for ExactRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::invalid(format!("not an exact rational: {s:?}")))
        };
        match s.split_once('/') {
            Some((n, d)) => ExactRational::new(parse(n)?, parse(d)?),
            None => Ok(ExactRational::from_integer(parse(s)?)),
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for &ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: &ExactRational) -> ExactRational {
                ExactRational((&self.0).$m(&rhs.0))
            }
        }
        impl $tr for ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0.$m(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

/// Dense polynomial with exact rational coefficients, low degree first.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RationalPoly {
    coeffs: Vec<ExactRational>,
}

/// Dense polynomial with integer coefficients, low degree first.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<ExactRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    /// The identity polynomial `x`.
    pub fn identity() -> Self {
        RationalPoly::new(vec![ExactRational::zero(), ExactRational::one()])
    }

    pub fn constant(c: ExactRational) -> Self {
        RationalPoly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn max_coeff_bits(&self) -> u64 {
        self.coeffs
            .iter()
            .map(ExactRational::bits)
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = ExactRational::zero();
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).unwrap_or(&zero);
                let b = other.coeffs.get(i).unwrap_or(&zero);
                a + b
            })
            .collect();
        RationalPoly::new(coeffs)
    }

    pub fn mul(&self, other: &RationalPoly) -> RationalPoly {
        if self.is_zero() || other.is_zero() {
            return RationalPoly::default();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += &a.0 * &b.0;
            }
        }
        RationalPoly::new(out.into_iter().map(ExactRational).collect())
    }

    /// `self(inner(x))` by Horner's rule with a polynomial argument.
    pub fn compose(&self, inner: &RationalPoly) -> RationalPoly {
        let mut acc = RationalPoly::default();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&RationalPoly::constant(c.clone()));
        }
        acc
    }

    pub fn eval(&self, x: &ExactRational) -> ExactRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * &x.0 + &c.0;
        }
        ExactRational(acc)
    }
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    pub fn max_coeff_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.bits()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &ExactRational) -> ExactRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * &x.0 + BigRational::from_integer(c.clone());
        }
        ExactRational(acc)
    }

    fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return IntPoly::default();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    fn pow(&self, e: u32) -> IntPoly {
        let mut acc = IntPoly::new(vec![BigInt::one()]);
        let mut base = self.clone();
        let mut e = e;
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

    /// Lifts to a rational polynomial with the same coefficients.
    pub fn to_rational(&self) -> RationalPoly {
        RationalPoly::new(
            self.coeffs
                .iter()
                .map(|c| ExactRational::from_integer(c.clone()))
                .collect(),
        )
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.coeffs.iter().map(|c| (c.is_zero(), c.to_string())))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.coeffs.iter().map(|c| (c.is_zero(), c.to_string())))
    }
}

fn write_terms(
    f: &mut fmt::Formatter<'_>,
    terms: impl DoubleEndedIterator<Item = (bool, String)> + ExactSizeIterator,
) -> fmt::Result {
    let n = terms.len();
    let mut first = true;
    for (i, (zero, c)) in terms.enumerate().rev() {
        if zero {
            continue;
        }
        if !first {
            write!(f, " + ")?;
        }
        first = false;
        match i {
            0 => write!(f, "({c})")?,
            1 => write!(f, "({c})x")?,
            _ => write!(f, "({c})x^{i}")?,
        }
    }
    if first || n == 0 {
        write!(f, "0")?;
    }
    Ok(())
}

/// Anything that can be evaluated exactly at a rational point.
pub trait ExactEval {
    fn eval_at(&self, x: &ExactRational) -> ExactRational;
}

impl ExactEval for RationalPoly {
    fn eval_at(&self, x: &ExactRational) -> ExactRational {
        self.eval(x)
    }
}

impl ExactEval for IntPoly {
    fn eval_at(&self, x: &ExactRational) -> ExactRational {
        self.eval(x)
    }
}

/// Exact Horner evaluation.
pub fn eval_poly<P: ExactEval + ?Sized>(f: &P, x: &ExactRational) -> ExactRational {
    f.eval_at(x)
}

/// `phi_p(x) = (x^p - x)/p`.
pub fn phi_step_poly(p: u32) -> Result<RationalPoly> {
    check_prime(p)?;
    let inv_p = ExactRational::new(1, p)?;
    let mut coeffs = vec![ExactRational::zero(); p as usize + 1];
    coeffs[1] = -inv_p.clone();
    coeffs[p as usize] = inv_p;
    Ok(RationalPoly::new(coeffs))
}

/// `n`-fold composition of `f`; `n = 0` gives the identity.
pub fn iterate_poly(f: &RationalPoly, n: u32, caps: &Caps) -> Result<RationalPoly> {
    if n == 0 {
        return Ok(RationalPoly::identity());
    }
    let d = f.degree().unwrap_or(0) as u64;
    if d >= 2 {
        let d32 = u32::try_from(d).map_err(|_| Error::limit("degree", caps.max_degree))?;
        Caps::power_within(d32, n, caps.max_degree, "iterate degree")?;
    }
    let mut acc = f.clone();
    for _ in 1..n {
        acc = f.compose(&acc);
        if acc.max_coeff_bits() > caps.max_coeff_bits {
            return Err(Error::limit(
                "iterate coefficient bits",
                caps.max_coeff_bits,
            ));
        }
    }
    Ok(acc)
}

/// `e_n = (p^n - 1)/(p - 1)`, the power of `p` clearing the denominators of `phi_p^n`.
pub fn denominator_exponent(p: u32, n: u32) -> BigInt {
    let pn = BigInt::from(p).pow(n);
    (pn - 1u32) / BigInt::from(p - 1)
}

/// Monic integer model `F_n = p^{e_n} (phi_p^n(x) - 1)`.
///
/// Computed through `G_{k+1} = G_k^p - p^{(p-1) e_k} G_k` with `G_k = p^{e_k} phi_p^k`,
/// which keeps every intermediate in `Z[x]`.
pub fn integral_model(p: u32, n: u32, caps: &Caps) -> Result<IntPoly> {
    check_prime(p)?;
    if n == 0 {
        return Err(Error::invalid("integral model needs n >= 1"));
    }
    Caps::power_within(p, n, caps.max_degree, "model degree")?;
    // Rough size of the constant term p^{e_n}; reject before doing any work.
    let projected_bits = denominator_exponent(p, n)
        .to_f64()
        .map(|e| e * (p as f64).log2())
        .unwrap_or(f64::INFINITY);
    if projected_bits > caps.max_coeff_bits as f64 {
        return Err(Error::limit("model coefficient bits", caps.max_coeff_bits));
    }

    let bp = BigInt::from(p);
    let mut g = IntPoly::new(vec![BigInt::zero(), BigInt::one()]);
    let mut e = BigInt::zero();
    for _ in 0..n {
        let shift_exp = ((p - 1) as u64 * e.to_u64().expect("bounded by caps")) as u32;
        let scale = bp.clone().pow(shift_exp);
        let gp = g.pow(p);
        let mut coeffs = gp.coeffs;
        for (i, c) in g.coeffs.iter().enumerate() {
            coeffs[i] -= &scale * c;
        }
        g = IntPoly::new(coeffs);
        e = e * &bp + 1u32;
        if g.max_coeff_bits() > caps.max_coeff_bits {
            return Err(Error::limit("model coefficient bits", caps.max_coeff_bits));
        }
    }
    let constant = bp.pow(e.to_u32().expect("bounded by caps"));
    let mut coeffs = g.coeffs;
    coeffs[0] -= constant;
    Ok(IntPoly::new(coeffs))
}

/// Outcome of checking that `F_n` is monic with the forced constant term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralityCertificate {
    pub p: u32,
    pub n: u32,
    /// Largest depth at which `F_k` was built and inspected coefficient by coefficient.
    pub explicit_depth: u32,
    pub monic: bool,
    pub degree_ok: bool,
    pub constant_term_ok: bool,
}

impl IntegralityCertificate {
    pub fn holds(&self) -> bool {
        self.monic && self.degree_ok && self.constant_term_ok
    }

    pub fn status(&self) -> String {
        if !self.holds() {
            "failed".to_string()
        } else if self.explicit_depth >= self.n {
            "explicit".to_string()
        } else {
            format!("inductive(explicit to depth {})", self.explicit_depth)
        }
    }
}

/// Builds `F_k` for every `k <= n` small enough to expand (degree at most
/// `explicit_degree`) and checks monicity, degree and constant term. Larger
/// depths follow from the integral recursion used by [`integral_model`].
pub fn certify_integral_model(
    p: u32,
    n: u32,
    explicit_degree: u64,
    caps: &Caps,
) -> Result<IntegralityCertificate> {
    check_prime(p)?;
    let mut cert = IntegralityCertificate {
        p,
        n,
        explicit_depth: 0,
        monic: true,
        degree_ok: true,
        constant_term_ok: true,
    };
    for k in 1..=n {
        if Caps::power_within(p, k, explicit_degree, "").is_err() {
            break;
        }
        let f = integral_model(p, k, caps)?;
        cert.monic &= f.is_monic();
        cert.degree_ok &= f.degree() == Some(p.pow(k) as usize);
        let expected = -BigInt::from(p).pow(denominator_exponent(p, k).to_u32().unwrap_or(0));
        cert.constant_term_ok &= f.coeffs().first() == Some(&expected);
        cert.explicit_depth = k;
    }
    Ok(cert)
}

/// Forward orbit of a rational start point under `phi_p`, classified exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreperiodicOrbit {
    pub orbit: Vec<ExactRational>,
    /// `Some((preperiod, period))` once a repeat is seen.
    pub cycle: Option<(usize, usize)>,
}

/// Iterates `phi_p` from `start` in exact arithmetic until a value repeats,
/// `max_steps` are spent, or a coefficient outgrows `max_bits`.
pub fn exact_forward_orbit(
    p: u32,
    start: &ExactRational,
    max_steps: usize,
    max_bits: u64,
) -> Result<PreperiodicOrbit> {
    let phi = phi_step_poly(p)?;
    let mut orbit = vec![start.clone()];
    let mut seen = std::collections::HashMap::new();
    seen.insert(start.clone(), 0usize);
    for step in 1..=max_steps {
        let next = phi.eval(orbit.last().expect("nonempty"));
        if let Some(&first) = seen.get(&next) {
            orbit.push(next);
            return Ok(PreperiodicOrbit {
                orbit,
                cycle: Some((first, step - first)),
            });
        }
        if next.bits() > max_bits {
            orbit.push(next);
            break;
        }
        seen.insert(next.clone(), step);
        orbit.push(next);
    }
    Ok(PreperiodicOrbit { orbit, cycle: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn phi_coefficients() {
        for p in [2u32, 3, 5] {
            let f = phi_step_poly(p).unwrap();
            assert_eq!(f.degree(), Some(p as usize));
            let inv = ExactRational::new(1, p).unwrap();
            for (i, c) in f.coeffs().iter().enumerate() {
                let expect = match i {
                    1 => -inv.clone(),
                    i if i == p as usize => inv.clone(),
                    _ => ExactRational::zero(),
                };
                assert_eq!(c, &expect, "p={p} degree {i}");
            }
        }
    }

    #[test]
    fn phi_rejects_non_primes() {
        for p in [0u32, 1, 4, 9] {
            assert!(matches!(phi_step_poly(p), Err(Error::InvalidParameter(_))));
        }
    }

    #[test]
    fn second_iterate_of_phi2() {
        let phi = phi_step_poly(2).unwrap();
        assert_eq!(
            iterate_poly(&phi, 0, &Caps::default()).unwrap(),
            RationalPoly::identity()
        );
        let f2 = iterate_poly(&phi, 2, &Caps::default()).unwrap();
        let expect = RationalPoly::new(
            ["0", "2/8", "-1/8", "-2/8", "1/8"]
                .iter()
                .map(|s| q(s))
                .collect(),
        );
        assert_eq!(f2, expect);
        // phi_2(-1) = 1, phi_2(1) = 0
        assert_eq!(f2.eval(&q("-1")), ExactRational::zero());
    }

    #[test]
    fn degree_cap_is_enforced() {
        let phi = phi_step_poly(2).unwrap();
        let caps = Caps {
            max_degree: 1 << 4,
            ..Caps::default()
        };
        assert!(iterate_poly(&phi, 4, &caps).is_ok());
        match iterate_poly(&phi, 5, &caps) {
            Err(Error::ResourceLimit { cap, .. }) => assert_eq!(cap, 16),
            other => panic!("expected limit error, got {other:?}"),
        }
        assert!(integral_model(2, 5, &caps).is_err());
    }

    #[test]
    fn coefficient_cap_is_enforced() {
        let caps = Caps {
            max_coeff_bits: 10,
            ..Caps::default()
        };
        assert!(matches!(
            integral_model(2, 5, &caps),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn integral_models_small() {
        let caps = Caps::default();
        assert_eq!(
            integral_model(2, 1, &caps).unwrap().coeffs(),
            &ints(&[-2, -1, 1])[..]
        );
        assert_eq!(
            integral_model(2, 2, &caps).unwrap().coeffs(),
            &ints(&[-8, 2, -1, -2, 1])[..]
        );
        assert_eq!(
            integral_model(3, 2, &caps).unwrap().coeffs()[0],
            BigInt::from(-81)
        );
    }

    #[test]
    fn integral_model_matches_rational_iterate() {
        // Denominator clearing by p^{e_n}, checked coefficientwise for p = 2, 3, n <= 4.
        let caps = Caps::default();
        for p in [2u32, 3] {
            let phi = phi_step_poly(p).unwrap();
            for n in 1..=4 {
                let it = iterate_poly(&phi, n, &caps).unwrap();
                let scale = ExactRational::from_integer(
                    BigInt::from(p).pow(denominator_exponent(p, n).to_u32().unwrap()),
                );
                let shifted = it.add(&RationalPoly::constant(-ExactRational::one()));
                let scaled: Vec<_> = shifted.coeffs().iter().map(|c| c * &scale).collect();
                let f = integral_model(p, n, &caps).unwrap();
                assert_eq!(RationalPoly::new(scaled), f.to_rational(), "p={p} n={n}");
                assert!(f.is_monic());
            }
        }
    }

    #[test]
    fn eval_examples() {
        let f1 = integral_model(2, 1, &Caps::default()).unwrap();
        assert!(eval_poly(&f1, &q("2")).is_zero());
        let phi = phi_step_poly(2).unwrap();
        assert!(eval_poly(&phi, &q("1")).is_zero());
        assert!(eval_poly(&phi, &q("0")).is_zero());
    }

    #[test]
    fn one_is_strictly_preperiodic() {
        for p in [2u32, 3, 5, 7] {
            let phi = phi_step_poly(p).unwrap();
            for n in 1..=3 {
                let it = iterate_poly(&phi, n, &Caps::default()).unwrap();
                assert!(it.eval(&ExactRational::one()).is_zero());
            }
            let orb = exact_forward_orbit(p, &ExactRational::one(), 16, 1 << 12).unwrap();
            assert_eq!(orb.cycle, Some((1, 1)));
        }
    }

    #[test]
    fn certificate_small() {
        let c = certify_integral_model(2, 10, 64, &Caps::default()).unwrap();
        assert!(c.holds());
        assert_eq!(c.explicit_depth, 6);
        assert!(c.status().starts_with("inductive"));
        let c = certify_integral_model(3, 2, 64, &Caps::default()).unwrap();
        assert_eq!(c.status(), "explicit");
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(q("41/100").to_string(), "41/100");
        assert_eq!(q("-6/4").to_string(), "-3/2");
        assert_eq!(q("7").to_string(), "7");
        assert!("1/0".parse::<ExactRational>().is_err());
        assert!("x".parse::<ExactRational>().is_err());
    }
}
