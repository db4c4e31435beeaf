//! Averaged Weil heights of the roots of `phi_p^n(x) = 1`.
//!
//! Only the archimedean place is summed numerically. The finite places
//! contribute nothing because `F_n` is monic with integer coefficients and
//! its roots all lie in `Z_p`; both facts are checked once per `(p, n)` and
//! recorded on the report.

use std::time::Instant;

use astro_float::BigFloat;
use serde::{Deserialize, Serialize};

use crate::arithmetic::{
    certify_integral_model, check_prime, exact_forward_orbit, Caps, ExactRational, IntPoly,
};
use crate::complexdyn::{log_plus, ComplexOrbit, OrbitOptions};
use crate::error::{Error, Result};
use crate::mp::{self, BigComplex, RM};
use crate::padic::{backward_orbit_padic, default_digits, verify_total_splitting};
use crate::roots::{evaluation_scale, horner, simultaneous_roots};

/// `log(p+1)/(p-1)`, the uniform upper bound on the heights.
pub fn height_bound(p: u32) -> f64 {
    ((p + 1) as f64).ln() / (p - 1) as f64
}

/// `log p/(p-1)`, the limiting height.
pub fn height_limit(p: u32) -> f64 {
    (p as f64).ln() / (p - 1) as f64
}

/// Status of the finite-place checks behind a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteCertificates {
    /// `explicit`, `inductive(explicit to depth k)`, `failed` or `skipped`.
    pub integrality: String,
    /// `verified(K digits)`, `failed` or `skipped`.
    pub splitting: String,
}

impl FiniteCertificates {
    pub fn skipped() -> Self {
        FiniteCertificates {
            integrality: "skipped".into(),
            splitting: "skipped".into(),
        }
    }

    pub fn failed(&self) -> bool {
        self.integrality == "failed" || self.splitting == "failed"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightReport {
    pub p: u32,
    pub n: u32,
    pub count: u64,
    pub avg_height: f64,
    pub bound: f64,
    pub limit: f64,
    pub max_residual: f64,
    pub elapsed_ms: u64,
    pub certificates: FiniteCertificates,
}

impl HeightReport {
    pub fn abs_error(&self) -> f64 {
        (self.avg_height - self.limit).abs()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct HeightOptions {
    pub bits: usize,
    /// Run the integrality and p-adic splitting checks.
    pub certify: bool,
    /// Largest degree of `F_k` expanded explicitly by the integrality check.
    pub explicit_degree: u64,
    /// p-adic working digits; `None` means `64 + n`.
    pub digits: Option<u32>,
    pub caps: Caps,
}

impl HeightOptions {
    pub fn new(bits: usize) -> Self {
        HeightOptions {
            bits,
            certify: true,
            explicit_degree: 64,
            digits: None,
            caps: Caps::default(),
        }
    }
}

/// Finite-place certificates for depth `n`.
pub fn certify_finite_places(p: u32, n: u32, opts: &HeightOptions) -> Result<FiniteCertificates> {
    if !opts.certify {
        return Ok(FiniteCertificates::skipped());
    }
    let integral = certify_integral_model(p, n, opts.explicit_degree, &opts.caps)?;
    let digits = opts.digits.unwrap_or_else(|| default_digits(n));
    let split = verify_total_splitting(&backward_orbit_padic(p, n, digits, &opts.caps)?);
    Ok(FiniteCertificates {
        integrality: integral.status(),
        splitting: if split.holds {
            format!("verified({} digits)", split.min_forward_digits)
        } else {
            "failed".into()
        },
    })
}

fn report_for(
    orbit: &ComplexOrbit,
    opts: &HeightOptions,
    started: Instant,
) -> Result<HeightReport> {
    let p = orbit.p;
    let n = orbit.depth;
    let avg = mp::to_f64(&orbit.average(log_plus));
    let certificates = certify_finite_places(p, n, opts)?;
    if certificates.failed() {
        return Err(Error::Internal(format!(
            "finite-place certificate failed at p={p}, n={n}: {certificates:?}"
        )));
    }
    Ok(HeightReport {
        p,
        n,
        count: orbit.leaves.len() as u64,
        avg_height: avg,
        bound: height_bound(p),
        limit: height_limit(p),
        max_residual: orbit.max_residual,
        elapsed_ms: started.elapsed().as_millis() as u64,
        certificates,
    })
}

/// `(1/p^n) sum log^+|beta|` over the roots of `phi_p^n(x) = 1`.
pub fn average_height(p: u32, n: u32, bits: usize) -> Result<HeightReport> {
    average_height_with(p, n, &HeightOptions::new(bits))
}

pub fn average_height_with(p: u32, n: u32, opts: &HeightOptions) -> Result<HeightReport> {
    let started = Instant::now();
    check_prime(p)?;
    Caps::power_within(p, n, opts.caps.max_orbit, "orbit size")?;
    let orbit_opts = OrbitOptions {
        caps: opts.caps,
        ..OrbitOptions::for_bits(opts.bits)
    };
    let mut orbit = ComplexOrbit::root(p, &BigComplex::from_int(1, opts.bits), opts.bits)?;
    for _ in 0..n {
        orbit = orbit.extend(&orbit_opts)?;
    }
    report_for(&orbit, opts, started)
}

/// Reports for `n = 1..=n_max`, each depth grown from the previous one.
pub fn height_sequence(p: u32, n_max: u32, bits: usize) -> Result<Vec<HeightReport>> {
    height_sequence_with(p, n_max, &HeightOptions::new(bits))
}

pub fn height_sequence_with(p: u32, n_max: u32, opts: &HeightOptions) -> Result<Vec<HeightReport>> {
    check_prime(p)?;
    Caps::power_within(p, n_max, opts.caps.max_orbit, "orbit size")?;
    let orbit_opts = OrbitOptions {
        caps: opts.caps,
        ..OrbitOptions::for_bits(opts.bits)
    };
    let mut orbit = ComplexOrbit::root(p, &BigComplex::from_int(1, opts.bits), opts.bits)?;
    let mut out = Vec::with_capacity(n_max as usize);
    for _ in 0..n_max {
        let started = Instant::now();
        orbit = orbit.extend(&orbit_opts)?;
        out.push(report_for(&orbit, opts, started)?);
    }
    Ok(out)
}

/// `log M(F)` with the roots found directly from `F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MahlerMeasure {
    pub log_measure: f64,
    pub degree: usize,
    /// Largest `|F(root)| / sum |a_i| |root|^i`.
    pub max_relative_residual: f64,
}

impl MahlerMeasure {
    pub fn measure(&self) -> f64 {
        self.log_measure.exp()
    }
}

pub const MAHLER_MAX_DEGREE: usize = 1 << 12;

fn mahler_at(f: &IntPoly, bits: usize) -> Result<(BigFloat, f64)> {
    let coeffs: Vec<BigComplex> = f
        .coeffs()
        .iter()
        .map(|c| BigComplex::from_bigint(c, bits))
        .collect();
    let lead = coeffs.last().expect("nonzero polynomial");
    let w = bits + 16;
    let mut acc = lead.ln_abs().with_precision(w);
    let max_iter = 100 + 4 * coeffs.len();
    let roots = simultaneous_roots(&coeffs, bits, max_iter).map_err(|e| {
        Error::NumericalFailure(format!(
            "root iteration for the Mahler measure stalled after {} sweeps",
            e.iterations
        ))
    })?;
    let mut worst = 0.0f64;
    for r in &roots {
        let rel =
            horner(&coeffs, r).abs_f64() / evaluation_scale(&coeffs, r).max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
        acc = acc.add(&log_plus(r), w, RM);
    }
    Ok((acc, worst))
}

/// Mahler measure of a nonzero integer polynomial.
pub fn mahler_measure(f: &IntPoly, bits: usize) -> Result<MahlerMeasure> {
    let degree = f
        .degree()
        .ok_or_else(|| Error::invalid("Mahler measure of the zero polynomial"))?;
    if degree > MAHLER_MAX_DEGREE {
        return Err(Error::limit("Mahler degree", MAHLER_MAX_DEGREE as u64));
    }
    let tol = |b: usize| 2f64.powi(-(b as i32) / 2);
    let (mut value, mut worst) = mahler_at(f, bits)?;
    if worst.is_nan() || worst >= tol(bits) {
        (value, worst) = mahler_at(f, 2 * bits)?;
        if worst.is_nan() || worst >= tol(2 * bits) {
            return Err(Error::NumericalFailure(format!(
                "Mahler measure roots have relative residual {worst:e}"
            )));
        }
    }
    Ok(MahlerMeasure {
        log_measure: mp::to_f64(&value),
        degree,
        max_relative_residual: worst,
    })
}

trait WithPrecision {
    fn with_precision(self, bits: usize) -> Self;
}

impl WithPrecision for BigFloat {
    fn with_precision(mut self, bits: usize) -> Self {
        let _ = self.set_precision(bits, RM);
        self
    }
}

/// How the canonical height of a rational point was settled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PreperiodicStatus {
    Preperiodic { preperiod: usize, period: usize },
    NotPreperiodicAtCap { steps: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalHeight {
    pub p: u32,
    pub start: ExactRational,
    /// `Some(0.0)` when preperiodic; unknown otherwise.
    pub value: Option<f64>,
    pub status: PreperiodicStatus,
    pub orbit: Vec<ExactRational>,
}

pub const CANONICAL_STEP_CAP: usize = 64;

/// Canonical height of a rational point, settled by exact cycle detection.
pub fn canonical_height(
    p: u32,
    start: &ExactRational,
    max_steps: usize,
    caps: &Caps,
) -> Result<CanonicalHeight> {
    let orbit = exact_forward_orbit(p, start, max_steps, caps.max_coeff_bits)?;
    let (value, status) = match orbit.cycle {
        Some((preperiod, period)) => (
            Some(0.0),
            PreperiodicStatus::Preperiodic { preperiod, period },
        ),
        None => (
            None,
            PreperiodicStatus::NotPreperiodicAtCap {
                steps: orbit.orbit.len() - 1,
            },
        ),
    };
    Ok(CanonicalHeight {
        p,
        start: start.clone(),
        value,
        status,
        orbit: orbit.orbit,
    })
}

pub fn canonical_height_of_one(p: u32) -> Result<CanonicalHeight> {
    canonical_height(
        p,
        &ExactRational::one(),
        CANONICAL_STEP_CAP,
        &Caps::default(),
    )
}
