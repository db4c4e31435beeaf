//! Fixed-modulus p-adic integers and the p-adic backward orbit of 1.
//!
//! Values live in `Z/p^K` with a separate count of trusted base-p digits.
//! Preimages under `phi_p` come from Newton (Hensel) lifting of
//! `g(x) = x^p - x - p*beta` from each residue `a mod p`: `g(a) = 0 mod p` by
//! Fermat and `g'(a) = p a^{p-1} - 1` is a unit, so every residue class lifts
//! to exactly one root.
//!
//! Precision bookkeeping: if `beta` is trusted to `e` digits then `p*beta` is
//! trusted to `e + 1`, and since `g'` is a unit the lifted root is trusted to
//! `min(e + 1, K)` digits. Applying `phi_p` divides by `p` and costs one digit.
//!
//! Distinctness of leaves is certified exactly by their addresses: two leaves
//! with different residue choices at some level have images that differ mod p
//! at that level. The mantissa comparison is a numerical cross-check only.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arithmetic::{check_prime, Caps};
use crate::error::{Error, Result};
use crate::par::*;

/// Digits beyond the depth that a backward orbit must keep in reserve.
pub const DEFAULT_MARGIN: u32 = 16;

/// Default working precision for depth `n`.
pub fn default_digits(n: u32) -> u32 {
    64 + n
}

/// Element of `Z/p^K` with `precision` trusted base-p digits.
#[derive(Clone)]
pub struct PadicNumber {
    p: u32,
    k: u32,
    modulus: Arc<BigUint>,
    mantissa: BigUint,
    precision: u32,
}

impl PadicNumber {
    /// The exact integer `value` reduced mod `p^k`, trusted to all `k` digits.
    pub fn from_integer(p: u32, k: u32, value: &BigInt) -> Result<Self> {
        check_prime(p)?;
        if k == 0 {
            return Err(Error::invalid("p-adic working precision must be positive"));
        }
        let modulus = Arc::new(BigUint::from(p).pow(k));
        Ok(Self::reduced(p, k, modulus, value, k))
    }

    fn reduced(p: u32, k: u32, modulus: Arc<BigUint>, value: &BigInt, precision: u32) -> Self {
        let m = BigInt::from((*modulus).clone());
        let r = value.mod_floor(&m);
        PadicNumber {
            p,
            k,
            mantissa: r.to_biguint().expect("nonnegative"),
            modulus,
            precision,
        }
    }

    fn sibling(&self, mantissa: BigUint, precision: u32) -> Self {
        PadicNumber {
            p: self.p,
            k: self.k,
            modulus: Arc::clone(&self.modulus),
            mantissa,
            precision,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Working modulus exponent `K`.
    pub fn working_digits(&self) -> u32 {
        self.k
    }

    pub fn mantissa(&self) -> &BigUint {
        &self.mantissa
    }

    /// Trusted base-p digits.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Same mantissa with fewer trusted digits.
    pub fn truncated(&self, digits: u32) -> Self {
        self.sibling(self.mantissa.clone(), digits.min(self.precision))
    }

    pub fn is_unit(&self) -> bool {
        !(&self.mantissa % self.p).is_zero()
    }

    fn check_compatible(&self, o: &Self) -> Result<()> {
        if self.p != o.p || self.k != o.k {
            return Err(Error::invalid(format!(
                "mixed p-adic rings: (p={}, K={}) vs (p={}, K={})",
                self.p, self.k, o.p, o.k
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_compatible(o)?;
        let m = (&self.mantissa + &o.mantissa) % &*self.modulus;
        Ok(self.sibling(m, self.precision.min(o.precision)))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check_compatible(o)?;
        let m = (&self.mantissa + &*self.modulus - &o.mantissa) % &*self.modulus;
        Ok(self.sibling(m, self.precision.min(o.precision)))
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check_compatible(o)?;
        let m = (&self.mantissa * &o.mantissa) % &*self.modulus;
        Ok(self.sibling(m, self.precision.min(o.precision)))
    }

    /// `self / o` for a unit `o`.
    pub fn div_unit(&self, o: &Self) -> Result<Self> {
        self.check_compatible(o)?;
        let inv = o.mantissa.modinv(&self.modulus).ok_or_else(|| {
            Error::PrecisionViolation(format!("division by a non-unit in Z/{}^{}", self.p, self.k))
        })?;
        let m = (&self.mantissa * inv) % &*self.modulus;
        Ok(self.sibling(m, self.precision.min(o.precision)))
    }

    /// `phi_p(self) = (self^p - self)/p`, trusted to one digit fewer.
    pub fn apply_phi(&self) -> Result<Self> {
        if self.precision < 2 {
            return Err(Error::PrecisionViolation(format!(
                "applying phi_{} needs 2 trusted digits, have {}",
                self.p, self.precision
            )));
        }
        let m = &*self.modulus;
        let num = (self.mantissa.modpow(&BigUint::from(self.p), m) + m - &self.mantissa) % m;
        debug_assert!((&num % self.p).is_zero(), "Fermat: x^p - x = 0 mod p");
        Ok(self.sibling(num / self.p, self.precision - 1))
    }

    /// Equality of the lowest `digits` base-p digits.
    pub fn agrees_to(&self, o: &Self, digits: u32) -> bool {
        let m = BigUint::from(self.p).pow(digits);
        &self.mantissa % &m == &o.mantissa % &m
    }

    /// `v_p(self - o)` capped at the shared trusted precision.
    pub fn difference_valuation(&self, o: &Self) -> u32 {
        let cap = self.precision.min(o.precision);
        let m = &*self.modulus;
        let mut d = (&self.mantissa + m - &o.mantissa) % m;
        let mut v = 0;
        while v < cap && !d.is_zero() && (&d % self.p).is_zero() {
            d /= self.p;
            v += 1;
        }
        if d.is_zero() {
            cap
        } else {
            v.min(cap)
        }
    }

    /// All `K` base-p digits, most significant first.
    pub fn base_p_digits(&self) -> String {
        let mut digits = Vec::with_capacity(self.k as usize);
        let mut x = self.mantissa.clone();
        for _ in 0..self.k {
            let (q, r) = x.div_rem(&BigUint::from(self.p));
            digits.push(r.to_u32().expect("digit < p"));
            x = q;
        }
        digits.reverse();
        join_digits(&digits, self.p)
    }
}

fn join_digits(d: &[u32], p: u32) -> String {
    if p <= 10 {
        d.iter()
            .map(|x| char::from_digit(*x, 10).expect("digit"))
            .collect()
    } else {
        d.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }
}

impl PartialEq for PadicNumber {
    fn eq(&self, o: &Self) -> bool {
        self.p == o.p
            && self.k == o.k
            && self.mantissa == o.mantissa
            && self.precision == o.precision
    }
}

impl fmt::Debug for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} mod {}^{} ({} digits)",
            self.mantissa, self.p, self.k, self.precision
        )
    }
}

/// The `p` roots of `phi_p(x) = beta` in `Z_p`, ordered by residue mod p.
pub fn padic_preimages(beta: &PadicNumber) -> Result<Vec<PadicNumber>> {
    if beta.precision < 2 {
        return Err(Error::PrecisionViolation(format!(
            "preimages need 2 trusted digits of the target, have {}",
            beta.precision
        )));
    }
    let p = beta.p;
    let m = &*beta.modulus;
    let bp = BigUint::from(p);
    let p_beta = (&beta.mantissa * &bp) % m;
    let exp_p = BigUint::from(p);
    let exp_pm1 = BigUint::from(p - 1);
    let g = |x: &BigUint| (x.modpow(&exp_p, m) + m * 2u32 - x - &p_beta) % m;
    let dg = |x: &BigUint| (&bp * x.modpow(&exp_pm1, m) + m - 1u32) % m;

    // Quadratic convergence from one correct digit.
    let cap = (u32::BITS - beta.k.leading_zeros()) + 2;
    let precision = (beta.precision + 1).min(beta.k);
    (0..p)
        .map(|a| {
            let mut x = BigUint::from(a);
            for _ in 0..=cap {
                let gx = g(&x);
                if gx.is_zero() {
                    return Ok(beta.sibling(x, precision));
                }
                let inv = dg(&x).modinv(m).ok_or_else(|| {
                    Error::Internal("g'(x) is not a unit; Hensel hypothesis violated".into())
                })?;
                x = (&x + m - (gx * inv) % m) % m;
            }
            Err(Error::Internal(format!(
                "Hensel lift from residue {a} did not converge in {cap} steps"
            )))
        })
        .collect()
}

/// One leaf of the p-adic backward orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct PadicLeaf {
    pub value: PadicNumber,
    /// Residue choices from the target outward; the last digit is `value mod p`.
    pub address: Vec<u32>,
}

impl PadicLeaf {
    pub fn address_string(&self) -> String {
        join_digits(&self.address, self.value.p)
    }
}

/// Depth-`n` leaves of the backward orbit of 1, in address order.
#[derive(Clone, Debug)]
pub struct PadicOrbit {
    pub p: u32,
    pub depth: u32,
    pub working_digits: u32,
    pub leaves: Vec<PadicLeaf>,
    /// Per leaf: `v_p(phi_p^n(leaf) - 1)`, capped at the digits trusted after `n` steps.
    pub residual_valuations: Vec<u32>,
}

/// Breadth-first fiber expansion of `phi_p^{-n}(1)` in `Z/p^K`.
pub fn backward_orbit_padic(p: u32, n: u32, digits: u32, caps: &Caps) -> Result<PadicOrbit> {
    backward_orbit_padic_with_margin(p, n, digits, DEFAULT_MARGIN, caps)
}

pub fn backward_orbit_padic_with_margin(
    p: u32,
    n: u32,
    digits: u32,
    margin: u32,
    caps: &Caps,
) -> Result<PadicOrbit> {
    check_prime(p)?;
    if n == 0 {
        return Err(Error::invalid("orbit depth must be positive"));
    }
    Caps::power_within(p, n, caps.max_orbit, "orbit size")?;
    if digits < n + margin {
        return Err(Error::PrecisionViolation(format!(
            "{digits} digits cannot carry depth {n}; use at least {} (depth + margin {margin})",
            n + margin
        )));
    }
    let root = PadicLeaf {
        value: PadicNumber::from_integer(p, digits, &BigInt::one())?,
        address: Vec::new(),
    };
    let mut level = vec![root];
    for _ in 0..n {
        let children: Vec<Result<Vec<PadicLeaf>>> = level
            .par_iter()
            .map(|leaf| {
                let pre = padic_preimages(&leaf.value)?;
                Ok(pre
                    .into_iter()
                    .enumerate()
                    .map(|(a, value)| {
                        let mut address = leaf.address.clone();
                        address.push(a as u32);
                        PadicLeaf { value, address }
                    })
                    .collect())
            })
            .collect();
        let mut next = Vec::with_capacity(level.len() * p as usize);
        for c in children {
            next.extend(c?);
        }
        level = next;
    }
    let one = PadicNumber::from_integer(p, digits, &BigInt::one())?;
    let residual_valuations = level
        .par_iter()
        .map(|leaf| {
            let mut x = leaf.value.clone();
            for _ in 0..n {
                x = x.apply_phi()?;
            }
            Ok(x.difference_valuation(&one))
        })
        .collect::<Result<Vec<u32>>>()?;
    Ok(PadicOrbit {
        p,
        depth: n,
        working_digits: digits,
        leaves: level,
        residual_valuations,
    })
}

/// Outcome of the total-splitting check; failures are reported, not raised.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingReport {
    pub p: u32,
    pub n: u32,
    pub count: u64,
    pub expected_count: u64,
    /// Leaves pairwise distinct modulo `p^distinct_modulus_digits`.
    pub distinct: bool,
    pub distinct_modulus_digits: u32,
    /// Addresses pairwise distinct and of full length (the exact certificate).
    pub addresses_distinct: bool,
    /// Fewest trusted digits in any `phi_p^n(leaf)`.
    pub min_forward_digits: u32,
    /// Largest shortfall of `v_p(phi_p^n(leaf) - 1)` below the trusted digits.
    pub max_residual_deficit: u32,
    pub holds: bool,
}

pub fn verify_total_splitting(orbit: &PadicOrbit) -> SplittingReport {
    let p = orbit.p;
    let expected = (p as u64).pow(orbit.depth);
    let count = orbit.leaves.len() as u64;
    let digits = orbit
        .leaves
        .iter()
        .map(|l| l.value.precision)
        .min()
        .unwrap_or(0);
    let modulus = BigUint::from(p).pow(digits);
    let mut reduced: Vec<BigUint> = orbit
        .leaves
        .iter()
        .map(|l| &l.value.mantissa % &modulus)
        .collect();
    reduced.sort();
    let distinct = reduced.windows(2).all(|w| w[0] != w[1]);

    let mut addresses: Vec<&Vec<u32>> = orbit.leaves.iter().map(|l| &l.address).collect();
    addresses.sort();
    let addresses_distinct = addresses.windows(2).all(|w| w[0] != w[1])
        && addresses.iter().all(|a| a.len() == orbit.depth as usize);

    let mut min_forward = u32::MAX;
    let mut deficit = 0;
    for (leaf, &v) in orbit.leaves.iter().zip(&orbit.residual_valuations) {
        let trusted = leaf.value.precision.saturating_sub(orbit.depth);
        min_forward = min_forward.min(trusted);
        deficit = deficit.max(trusted.saturating_sub(v));
    }
    if orbit.leaves.is_empty() {
        min_forward = 0;
    }
    let holds = count == expected
        && distinct
        && addresses_distinct
        && deficit == 0
        && orbit.residual_valuations.len() == orbit.leaves.len();
    SplittingReport {
        p,
        n: orbit.depth,
        count,
        expected_count: expected,
        distinct,
        distinct_modulus_digits: digits,
        addresses_distinct,
        min_forward_digits: min_forward,
        max_residual_deficit: deficit,
        holds,
    }
}
