//! Archimedean dynamics of `phi_p(x) = (x^p - x)/p`.
//!
//! Backward orbits are grown one fiber at a time: each node `c` has the `p`
//! children solving `x^p - x - p c = 0`, found by simultaneous iteration.
//! Leaves are re-verified by forward iteration, never trusted from the solver.
//!
//! The Green's function (archimedean canonical local height) uses the escape
//! radius `(p+1)^{1/(p-1)}`: beyond it `|phi_p(x)| >= (1 + eps)|x|`, so an
//! orbit that never leaves that disc within the step budget is classified as
//! bounded. Escaping orbits are summed with the telescoping series
//! `G(z) = p^{-k} (log|z_k| - log p/(p-1) + sum_j p^{-(j+1)} log|1 - z_{k+j}^{1-p}|)`.

use std::cmp::Ordering;

use astro_float::BigFloat;
use serde::{Deserialize, Serialize};

use crate::arithmetic::{check_prime, Caps};
use crate::error::{Error, Result};
use crate::mp::{self, BigComplex, MIN_BITS, RM};
use crate::par::*;
use crate::roots::{horner, simultaneous_roots};

/// Default mantissa width for complex work.
pub const DEFAULT_BITS: usize = 128;

const FIBER_MAX_ITER: usize = 200;

/// `phi_p(z) = (z^p - z)/p`.
pub fn phi(z: &BigComplex, p: u32) -> BigComplex {
    z.powi(p).sub(z).div_int(p as i64)
}

/// Coefficients of `x^p - x - p c`, low degree first.
pub fn fiber_polynomial(c: &BigComplex, p: u32) -> Vec<BigComplex> {
    let bits = c.bits();
    let mut coeffs = vec![BigComplex::zero(bits); p as usize + 1];
    coeffs[0] = c.scale_int(-(p as i64));
    coeffs[1] = BigComplex::from_int(-1, bits);
    coeffs[p as usize] = BigComplex::from_int(1, bits);
    coeffs
}

/// Default absolute fiber residual tolerance `2^{-(B-16)}`.
pub fn default_fiber_tolerance(bits: usize) -> f64 {
    2f64.powi(-(bits as i32 - 16))
}

/// Default orbit acceptance threshold `2^{-(B/2)}` on the re-verified residual.
pub fn default_orbit_tolerance(bits: usize) -> f64 {
    2f64.powi(-(bits as i32 / 2))
}

/// A fiber solve that did not meet its tolerance at the requested precision.
#[derive(Debug, Clone, PartialEq)]
pub struct NeedsMorePrecision {
    pub bits: usize,
    pub residual: f64,
}

/// The `p` roots of `x^p - x - p c`, sorted by `(re, im)`.
///
/// Residuals are measured against `tol * max(1, |p c|)`.
pub fn solve_fiber(
    c: &BigComplex,
    p: u32,
    bits: usize,
    tol: f64,
) -> std::result::Result<Vec<BigComplex>, NeedsMorePrecision> {
    let c = c.with_bits(bits);
    let coeffs = fiber_polynomial(&c, p);
    let scale = (c.abs_f64() * p as f64).max(1.0);
    let mut roots =
        simultaneous_roots(&coeffs, bits, FIBER_MAX_ITER).map_err(|e| NeedsMorePrecision {
            bits,
            residual: e.last_correction,
        })?;
    let worst = roots
        .iter()
        .map(|r| horner(&coeffs, r).abs_f64())
        .fold(0.0, f64::max);
    if worst.is_nan() || worst >= tol * scale {
        return Err(NeedsMorePrecision {
            bits,
            residual: worst,
        });
    }
    roots.sort_by(|a, b| a.cmp_lex(b));
    Ok(roots)
}

/// [`solve_fiber`] with one automatic retry at twice the precision.
pub fn solve_fiber_escalating(
    c: &BigComplex,
    p: u32,
    bits: usize,
    tol: f64,
) -> Result<Vec<BigComplex>> {
    match solve_fiber(c, p, bits, tol) {
        Ok(r) => Ok(r),
        Err(_) => {
            let mut roots = solve_fiber(c, p, 2 * bits, tol).map_err(|e| {
                Error::NumericalFailure(format!(
                    "fiber over {c} did not converge at {} bits (residual {:e})",
                    e.bits, e.residual
                ))
            })?;
            for r in roots.iter_mut() {
                *r = r.with_bits(bits);
            }
            roots.sort_by(|a, b| a.cmp_lex(b));
            Ok(roots)
        }
    }
}

/// A backward-orbit leaf and its fiber address (root indices from the target outward).
#[derive(Clone, Debug)]
pub struct OrbitLeaf {
    pub value: BigComplex,
    pub address: Vec<u32>,
}

impl OrbitLeaf {
    pub fn address_string(&self) -> String {
        self.address
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(if self.address.iter().any(|&d| d > 9) {
                "."
            } else {
                ""
            })
    }
}

/// Leaves of `phi_p^{-n}(target)` in canonical `(re, im)` order.
#[derive(Clone, Debug)]
pub struct ComplexOrbit {
    pub p: u32,
    pub depth: u32,
    pub target: BigComplex,
    pub bits: usize,
    pub leaves: Vec<OrbitLeaf>,
    /// Max over leaves of `|phi_p^n(leaf) - target|`, by forward iteration.
    pub max_residual: f64,
}

/// Tunables for orbit construction.
#[derive(Debug, Clone, Copy)]
pub struct OrbitOptions {
    pub fiber_tolerance: f64,
    pub orbit_tolerance: f64,
    pub caps: Caps,
}

impl OrbitOptions {
    pub fn for_bits(bits: usize) -> Self {
        OrbitOptions {
            fiber_tolerance: default_fiber_tolerance(bits),
            orbit_tolerance: default_orbit_tolerance(bits),
            caps: Caps::default(),
        }
    }
}

impl ComplexOrbit {
    /// The depth-0 orbit: the target itself.
    pub fn root(p: u32, target: &BigComplex, bits: usize) -> Result<Self> {
        check_prime(p)?;
        if bits < MIN_BITS {
            return Err(Error::invalid(format!(
                "precision {bits} bits is below {MIN_BITS}"
            )));
        }
        let target = target.with_bits(bits);
        Ok(ComplexOrbit {
            p,
            depth: 0,
            leaves: vec![OrbitLeaf {
                value: target.clone(),
                address: Vec::new(),
            }],
            target,
            bits,
            max_residual: 0.0,
        })
    }

    /// The next depth, grown from these leaves and re-verified.
    pub fn extend(&self, opts: &OrbitOptions) -> Result<Self> {
        Caps::power_within(self.p, self.depth + 1, opts.caps.max_orbit, "orbit size")?;
        let p = self.p;
        let bits = self.bits;
        let children: Vec<Result<Vec<OrbitLeaf>>> = self
            .leaves
            .par_iter()
            .map(|leaf| {
                let roots = solve_fiber_escalating(&leaf.value, p, bits, opts.fiber_tolerance)?;
                Ok(roots
                    .into_iter()
                    .enumerate()
                    .map(|(i, value)| {
                        let mut address = leaf.address.clone();
                        address.push(i as u32);
                        OrbitLeaf { value, address }
                    })
                    .collect())
            })
            .collect();
        let mut leaves = Vec::with_capacity(self.leaves.len() * p as usize);
        for c in children {
            leaves.extend(c?);
        }
        leaves.sort_by(|a, b| {
            a.value
                .cmp_lex(&b.value)
                .then_with(|| a.address.cmp(&b.address))
        });
        let mut next = ComplexOrbit {
            p,
            depth: self.depth + 1,
            target: self.target.clone(),
            bits,
            leaves,
            max_residual: 0.0,
        };
        next.max_residual = next.forward_residual();
        if next.max_residual.is_nan() || next.max_residual >= opts.orbit_tolerance {
            return Err(Error::NumericalFailure(format!(
                "depth-{} orbit residual {:e} exceeds {:e}; raise the precision",
                next.depth, next.max_residual, opts.orbit_tolerance
            )));
        }
        Ok(next)
    }

    /// `|phi_p^n(leaf) - target|` per leaf, by forward iteration.
    pub fn leaf_residuals(&self) -> Vec<f64> {
        let p = self.p;
        let n = self.depth;
        let target = &self.target;
        self.leaves
            .par_iter()
            .map(|leaf| {
                let mut z = leaf.value.clone();
                for _ in 0..n {
                    z = phi(&z, p);
                }
                z.sub(target).abs_f64()
            })
            .collect()
    }

    pub fn forward_residual(&self) -> f64 {
        self.leaf_residuals().into_iter().fold(0.0, f64::max)
    }

    /// `(1/p^n) sum_leaves f(leaf)`, summed in canonical order at working precision.
    pub fn average<F>(&self, f: F) -> BigFloat
    where
        F: Fn(&BigComplex) -> BigFloat + Sync + Send,
    {
        let bits = self.bits + 16;
        let terms: Vec<BigFloat> = self.leaves.par_iter().map(|l| f(&l.value)).collect();
        let mut acc = BigFloat::new(bits);
        for t in &terms {
            acc = acc.add(t, bits, RM);
        }
        acc.div(&mp::from_u64(self.leaves.len() as u64, 64), self.bits, RM)
    }
}

/// `phi_p^{-n}(target)` by breadth-first fiber expansion.
pub fn backward_orbit_complex(
    p: u32,
    n: u32,
    target: &BigComplex,
    bits: usize,
) -> Result<ComplexOrbit> {
    backward_orbit_complex_with(p, n, target, bits, &OrbitOptions::for_bits(bits))
}

pub fn backward_orbit_complex_with(
    p: u32,
    n: u32,
    target: &BigComplex,
    bits: usize,
    opts: &OrbitOptions,
) -> Result<ComplexOrbit> {
    check_prime(p)?;
    Caps::power_within(p, n, opts.caps.max_orbit, "orbit size")?;
    let mut orbit = ComplexOrbit::root(p, target, bits)?;
    for _ in 0..n {
        orbit = orbit.extend(opts)?;
    }
    Ok(orbit)
}

/// `log^+ |z|` at the precision of `z`.
pub fn log_plus(z: &BigComplex) -> BigFloat {
    if z.log2_abs() <= 0.0 {
        // |z| <= 1 up to the f64 estimate; settle the boundary exactly.
        let n = z.norm_sqr();
        if mp::cmp(&n, &mp::from_u64(1, 64)) != Ordering::Greater {
            return BigFloat::new(z.bits());
        }
    }
    z.ln_abs()
}

/// `(p+1)^{1/(p-1)}`, beyond which every orbit escapes.
pub fn escape_radius(p: u32) -> f64 {
    ((p + 1) as f64).powf(1.0 / (p - 1) as f64)
}

/// Status of a Green's function evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GreenStatus {
    BoundedCertified,
    EscapedCertified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenValue {
    pub value: f64,
    pub status: GreenStatus,
    pub iterations_used: usize,
    /// Bound on the neglected tail of the telescoping series (0 when bounded).
    pub truncation_bound: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct GreenOptions {
    /// Radius past which the telescoping tail takes over.
    pub big_radius: f64,
    /// Forward-step budget before a bounded verdict.
    pub max_steps: usize,
    /// Relative slack on the escape radius.
    pub margin: f64,
}

impl Default for GreenOptions {
    fn default() -> Self {
        GreenOptions {
            big_radius: 1e6,
            max_steps: 256,
            margin: 2f64.powi(-20),
        }
    }
}

struct GreenEval {
    value: BigFloat,
    status: GreenStatus,
    steps: usize,
    truncation: f64,
}

fn green_eval(z: &BigComplex, p: u32, bits: usize, opts: &GreenOptions) -> Result<GreenEval> {
    check_prime(p)?;
    if bits < MIN_BITS {
        return Err(Error::invalid(format!(
            "precision {bits} bits is below {MIN_BITS}"
        )));
    }
    let log2_big = opts.big_radius.log2();
    let log2_escape = (escape_radius(p) * (1.0 + opts.margin)).log2();
    let mut z = z.with_bits(bits);
    let mut budget = opts.max_steps;
    let mut escalated = false;
    let mut k = 0usize;
    loop {
        let l2 = z.log2_abs();
        if l2 > log2_big {
            break;
        }
        if k == budget {
            if l2 <= log2_escape {
                return Ok(GreenEval {
                    value: BigFloat::new(bits),
                    status: GreenStatus::BoundedCertified,
                    steps: k,
                    truncation: 0.0,
                });
            }
            if escalated {
                return Err(Error::NumericalFailure(format!(
                    "orbit hovers between the escape radius and {} after {k} steps",
                    opts.big_radius
                )));
            }
            escalated = true;
            budget *= 4;
        }
        z = phi(&z, p);
        k += 1;
    }

    // Escaped at step k: log|z_k| - log p/(p-1) + telescoping corrections.
    let w = bits + 32;
    let z = z.with_bits(w);
    let ln_p = mp::ln(&mp::from_u64(p as u64, 64), w);
    let mut sum = z
        .ln_abs()
        .sub(&ln_p.div(&mp::from_u64((p - 1) as u64, 64), w, RM), w, RM);
    let one = BigComplex::from_int(1, w);
    let mut weight = 1.0f64 / p as f64;
    let mut zj = z;
    let mut weight_big = mp::from_u64(1, 64).div(&mp::from_u64(p as u64, 64), w, RM);
    let truncation;
    loop {
        let inv = zj.powi(p - 1).recip();
        let term = one.sub(&inv).ln_abs().mul(&weight_big, w, RM);
        sum = sum.add(&term, w, RM);
        zj = phi(&zj, p);
        weight /= p as f64;
        weight_big = weight_big.div(&mp::from_u64(p as u64, 64), w, RM);
        // Remaining terms shrink at least geometrically: bound by twice the next one.
        let log2_next = -((p - 1) as f64) * zj.log2_abs();
        if log2_next < -((bits + 8) as f64) {
            truncation = 4.0 * weight * 2f64.powf(log2_next);
            break;
        }
    }
    let scale = mp::from_u64(p as u64, 64).powi(k, w, RM);
    let value = sum.div(&scale, bits, RM);
    Ok(GreenEval {
        value,
        status: GreenStatus::EscapedCertified,
        steps: k,
        truncation: truncation / (p as f64).powi(k as i32),
    })
}

/// Archimedean canonical local height `lim p^{-n} log^+ |phi_p^n(z)|`.
pub fn green_function(z: &BigComplex, p: u32, bits: usize) -> Result<GreenValue> {
    green_function_with(z, p, bits, &GreenOptions::default())
}

pub fn green_function_with(
    z: &BigComplex,
    p: u32,
    bits: usize,
    opts: &GreenOptions,
) -> Result<GreenValue> {
    let e = green_eval(z, p, bits, opts)?;
    Ok(GreenValue {
        value: mp::to_f64(&e.value),
        status: e.status,
        iterations_used: e.steps,
        truncation_bound: e.truncation,
    })
}

/// `G(z) - log|z| + log p/(p-1)`, evaluated at full working precision.
/// Tends to 0 like `|z|^{1-p}/p` as `z -> infinity`.
pub fn green_asymptotic_offset(z: &BigComplex, p: u32, bits: usize) -> Result<f64> {
    let e = green_eval(z, p, bits, &GreenOptions::default())?;
    let w = bits + 32;
    let ln_p = mp::ln(&mp::from_u64(p as u64, 64), w);
    let off = e.value.sub(&z.with_bits(w).ln_abs(), w, RM).add(
        &ln_p.div(&mp::from_u64((p - 1) as u64, 64), w, RM),
        w,
        RM,
    );
    Ok(mp::to_f64(&off))
}

/// Membership in the filled Julia set (bounded forward orbit).
pub fn in_filled_julia(z: &BigComplex, p: u32, bits: usize) -> Result<bool> {
    Ok(green_function(z, p, bits)?.status == GreenStatus::BoundedCertified)
}

/// `|G(phi_p(z)) - p G(z)| / max(1, p G(z))` for an escaping `z`.
pub fn functional_equation_check(z: &BigComplex, p: u32, bits: usize) -> Result<f64> {
    let opts = GreenOptions::default();
    let g = green_eval(z, p, bits, &opts)?;
    if g.status == GreenStatus::BoundedCertified {
        return Err(Error::invalid(
            "functional equation check needs an escaping point",
        ));
    }
    let gphi = green_eval(&phi(&z.with_bits(bits), p), p, bits, &opts)?;
    let w = bits + 16;
    let pg = g.value.mul(&mp::from_u64(p as u64, 64), w, RM);
    let diff = gphi.value.sub(&pg, w, RM).abs();
    let den = mp::to_f64(&pg).max(1.0);
    Ok(mp::to_f64(&diff) / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64(re, im, DEFAULT_BITS)
    }

    fn pairs(v: &[BigComplex]) -> Vec<(f64, f64)> {
        v.iter().map(|z| z.to_f64_pair()).collect()
    }

    #[test]
    fn fiber_examples() {
        let tol = default_fiber_tolerance(128);
        let r = pairs(&solve_fiber(&c(1.0, 0.0), 2, 128, tol).unwrap());
        assert!((r[0].0 + 1.0).abs() < 1e-30 && (r[1].0 - 2.0).abs() < 1e-30);
        let r = pairs(&solve_fiber(&c(0.0, 0.0), 2, 128, tol).unwrap());
        assert!(r[0].0.abs() < 1e-30 && (r[1].0 - 1.0).abs() < 1e-30);
        let r = pairs(&solve_fiber(&c(0.0, 0.0), 3, 128, tol).unwrap());
        for (got, want) in r.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got.0 - want).abs() < 1e-30 && got.1.abs() < 1e-30);
        }
    }

    #[test]
    fn impossible_tolerance_escalates_then_fails() {
        assert!(solve_fiber(&c(0.3, 0.2), 3, 128, 1e-300).is_err());
        assert!(matches!(
            solve_fiber_escalating(&c(0.3, 0.2), 3, 64, 1e-300),
            Err(Error::NumericalFailure(_))
        ));
        // 64 bits cannot meet 2^-100 but 128 can.
        let r = solve_fiber_escalating(&c(0.3, 0.2), 3, 64, 2f64.powi(-100)).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r[0].bits(), 64);
    }

    #[test]
    fn depth_one_and_two() {
        let o = backward_orbit_complex(2, 1, &c(1.0, 0.0), 128).unwrap();
        let v = pairs(&o.leaves.iter().map(|l| l.value.clone()).collect::<Vec<_>>());
        assert!((v[0].0 + 1.0).abs() < 1e-30 && (v[1].0 - 2.0).abs() < 1e-30);
        assert!(o.max_residual < 1e-30);

        let o = backward_orbit_complex(2, 2, &c(1.0, 0.0), 128).unwrap();
        let mut moduli: Vec<f64> = o.leaves.iter().map(|l| l.value.abs_f64()).collect();
        moduli.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let s17 = 17f64.sqrt();
        let want = [
            (1.0 + s17) / 2.0,
            (s17 - 1.0) / 2.0,
            2f64.sqrt(),
            2f64.sqrt(),
        ];
        for (g, w) in moduli.iter().zip(want) {
            assert!((g - w).abs() < 1e-12, "{g} vs {w}");
        }
        // (1 +- i sqrt 7)/2 appear as a conjugate pair.
        let complex: Vec<_> = o
            .leaves
            .iter()
            .map(|l| l.value.to_f64_pair())
            .filter(|z| z.1.abs() > 1e-20)
            .collect();
        assert_eq!(complex.len(), 2);
        for z in complex {
            assert!((z.0 - 0.5).abs() < 1e-15 && (z.1.abs() - 7f64.sqrt() / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn addresses_are_distinct_and_full_length() {
        let o = backward_orbit_complex(3, 3, &c(1.0, 0.0), 128).unwrap();
        let mut a: Vec<_> = o.leaves.iter().map(|l| l.address.clone()).collect();
        assert!(a.iter().all(|x| x.len() == 3));
        a.sort();
        a.dedup();
        assert_eq!(a.len(), 27);
    }

    #[test]
    fn orbit_cap() {
        let opts = OrbitOptions {
            caps: Caps {
                max_orbit: 8,
                ..Caps::default()
            },
            ..OrbitOptions::for_bits(128)
        };
        assert!(matches!(
            backward_orbit_complex_with(2, 4, &c(1.0, 0.0), 128, &opts),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn green_examples() {
        for z in [
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 1.0),
            c(2.0, 0.0),
            c(3.0, 0.0),
        ] {
            let g = green_function(&z, 2, 128).unwrap();
            assert_eq!(g.status, GreenStatus::BoundedCertified, "{z}");
            assert_eq!(g.value, 0.0);
        }
        assert!(!in_filled_julia(&c(4.0, 0.0), 2, 128).unwrap());
        assert!(in_filled_julia(&c(0.0, 1.0), 2, 128).unwrap());
        let g = green_function(&c(1e8, 0.0), 2, 128).unwrap();
        assert_eq!(g.status, GreenStatus::EscapedCertified);
        assert!((g.value - (1e8f64.ln() - 2f64.ln())).abs() < 1e-8);
    }

    #[test]
    fn green_matches_direct_limit() {
        // p^{-n} (log|phi^n(z)| - log p) at n = 20; the neglected tail is ~|z_20|^{-1}.
        let p = 2;
        let z = BigComplex::from_f64(1e8, 0.0, 256);
        let mut x = z.clone();
        for _ in 0..20 {
            x = phi(&x, p);
        }
        let direct = (mp::to_f64(&x.ln_abs()) - 2f64.ln()) / 2f64.powi(20);
        let g = green_function(&c(1e8, 0.0), p, 128).unwrap();
        assert!((g.value - direct).abs() < 1e-10, "{} vs {direct}", g.value);
    }

    #[test]
    fn functional_equation_small() {
        assert!(functional_equation_check(&c(10.0, 0.0), 2, 128).unwrap() < 1e-12);
        assert!(functional_equation_check(&c(5.0, 5.0), 3, 128).unwrap() < 1e-12);
        assert!(matches!(
            functional_equation_check(&c(2.0, 0.0), 2, 128),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn log_plus_values() {
        assert!(log_plus(&c(0.5, 0.5)).is_zero());
        assert!(log_plus(&c(1.0, 0.0)).is_zero());
        assert!((mp::to_f64(&log_plus(&c(2.0, 0.0))) - 2f64.ln()).abs() < 1e-16);
    }
}
