//! The Arakelov-Zhang pairing of `sigma(x) = x^2` with `phi_p`, two ways.
//!
//! Pullback: integrate `log^+|x|` against the equilibrium measure of `phi_p`,
//! sampled by backward orbits of a base point.
//!
//! Decomposition: `f_inf(inf) = -log|a|/(d-1)` for leading coefficient `a`,
//! plus the average of the Green's function over the unit circle, minus two
//! terms that vanish identically and are certified rather than integrated.

use std::time::Instant;

use astro_float::BigFloat;
use serde::{Deserialize, Serialize};

use crate::arithmetic::{check_prime, phi_step_poly, Caps, ExactRational};
use crate::complexdyn::{
    escape_radius, green_function, log_plus, ComplexOrbit, GreenStatus, OrbitOptions,
};
use crate::error::{Error, Result};
use crate::heights::height_limit;
use crate::mp::{self, BigComplex, RM};
use crate::padic::{backward_orbit_padic, default_digits, verify_total_splitting};
use crate::par::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairingMethod {
    Pullback,
    Decomposition,
}

/// A term of the decomposition that is known in closed form or vanishes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssertedTerm {
    pub name: String,
    pub value: f64,
    pub certificate: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PairingParameters {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub depth: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub base_re: Option<ExactRational>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub base_im: Option<ExactRational>,
    pub bits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingReport {
    pub p: u32,
    pub method: PairingMethod,
    pub estimate: f64,
    pub target: f64,
    pub abs_error: f64,
    pub parameters: PairingParameters,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub certificates: Vec<AssertedTerm>,
    pub elapsed_ms: u64,
}

/// A rational base point `re + i im`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasePoint {
    pub re: ExactRational,
    pub im: ExactRational,
}

impl BasePoint {
    pub fn new(re: ExactRational, im: ExactRational) -> Self {
        BasePoint { re, im }
    }

    /// `41/100 + 37/100 i`.
    pub fn generic() -> Self {
        BasePoint::new(
            ExactRational::new(41, 100).expect("nonzero denominator"),
            ExactRational::new(37, 100).expect("nonzero denominator"),
        )
    }

    /// `-3/10 + 7/10 i`, a second generic choice.
    pub fn alternate() -> Self {
        BasePoint::new(
            ExactRational::new(-3, 10).expect("nonzero denominator"),
            ExactRational::new(7, 10).expect("nonzero denominator"),
        )
    }

    pub fn one() -> Self {
        BasePoint::new(ExactRational::one(), ExactRational::zero())
    }

    pub fn to_complex(&self, bits: usize) -> BigComplex {
        BigComplex::from_rationals(&self.re, &self.im, bits)
    }
}

/// Points standing in for one of the two archimedean measures.
#[derive(Debug, Clone)]
pub enum MeasureSample {
    /// `e^{2 pi i j/M}`, the Haar measure on the circle.
    UnitCircle(Vec<BigComplex>),
    /// Backward-orbit leaves, the equilibrium measure of `phi_p`.
    BackwardOrbit(Vec<BigComplex>),
}

impl MeasureSample {
    pub fn unit_circle(m: u64, bits: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("sample count must be at least 1"));
        }
        let pts = (0..m)
            .into_par_iter()
            .map(|j| BigComplex::unit_root(j, m, bits))
            .collect();
        Ok(MeasureSample::UnitCircle(pts))
    }

    pub fn backward_orbit(orbit: &ComplexOrbit) -> Self {
        MeasureSample::BackwardOrbit(orbit.leaves.iter().map(|l| l.value.clone()).collect())
    }

    pub fn points(&self) -> &[BigComplex] {
        match self {
            MeasureSample::UnitCircle(v) | MeasureSample::BackwardOrbit(v) => v,
        }
    }

    /// Largest `| |z| - 1 |` over the points.
    pub fn max_modulus_defect(&self) -> f64 {
        self.points()
            .iter()
            .map(|z| (mp::to_f64(&z.abs()) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Mean of `f` over the points, summed in order.
    pub fn average<F>(&self, f: F, bits: usize) -> Result<BigFloat>
    where
        F: Fn(&BigComplex) -> Result<BigFloat> + Sync + Send,
    {
        let pts = self.points();
        let vals: Vec<Result<BigFloat>> = pts.par_iter().map(f).collect();
        let w = bits + 16;
        let mut acc = BigFloat::new(w);
        for v in vals {
            acc = acc.add(&v?, w, RM);
        }
        Ok(acc.div(&mp::from_u64(pts.len() as u64, 64), bits, RM))
    }
}

fn pullback_report(orbit: &ComplexOrbit, base: &BasePoint, started: Instant) -> PairingReport {
    let estimate = mp::to_f64(&orbit.average(log_plus));
    let target = height_limit(orbit.p);
    PairingReport {
        p: orbit.p,
        method: PairingMethod::Pullback,
        estimate,
        target,
        abs_error: (estimate - target).abs(),
        parameters: PairingParameters {
            depth: Some(orbit.depth),
            base_re: Some(base.re.clone()),
            base_im: Some(base.im.clone()),
            bits: orbit.bits,
            ..Default::default()
        },
        max_residual: Some(orbit.max_residual),
        certificates: Vec::new(),
        elapsed_ms: started.elapsed().as_millis() as u64,
    }
}

/// `(1/p^n) sum log^+|beta|` over `phi_p^{-n}(z0)`.
pub fn az_pullback_estimate(
    p: u32,
    n: u32,
    base: &BasePoint,
    bits: usize,
) -> Result<PairingReport> {
    let started = Instant::now();
    let orbit = base_orbit(p, n, base, bits, &Caps::default())?;
    Ok(pullback_report(&orbit, base, started))
}

/// Pullback estimates at depths `1..=n_max`, reusing each level.
pub fn az_pullback_sequence(
    p: u32,
    n_max: u32,
    base: &BasePoint,
    bits: usize,
    caps: &Caps,
) -> Result<Vec<PairingReport>> {
    check_prime(p)?;
    Caps::power_within(p, n_max, caps.max_orbit, "orbit size")?;
    let opts = OrbitOptions {
        caps: *caps,
        ..OrbitOptions::for_bits(bits)
    };
    let mut orbit = ComplexOrbit::root(p, &base.to_complex(bits), bits)?;
    let mut out = Vec::new();
    for _ in 0..n_max {
        let started = Instant::now();
        orbit = orbit.extend(&opts)?;
        out.push(pullback_report(&orbit, base, started));
    }
    Ok(out)
}

fn base_orbit(p: u32, n: u32, base: &BasePoint, bits: usize, caps: &Caps) -> Result<ComplexOrbit> {
    check_prime(p)?;
    Caps::power_within(p, n, caps.max_orbit, "orbit size")?;
    let opts = OrbitOptions {
        caps: *caps,
        ..OrbitOptions::for_bits(bits)
    };
    let mut orbit = ComplexOrbit::root(p, &base.to_complex(bits), bits)?;
    for _ in 0..n {
        orbit = orbit.extend(&opts)?;
    }
    Ok(orbit)
}

/// Green's function at one circle sample, rejecting anything not certified.
fn circle_green(z: &BigComplex, p: u32, bits: usize) -> Result<BigFloat> {
    let g = green_function(z, p, bits)?;
    if g.status != GreenStatus::BoundedCertified {
        return Err(Error::NumericalFailure(format!(
            "unit-circle sample {z} escaped under phi_{p}"
        )));
    }
    Ok(BigFloat::new(bits))
}

/// `(1/M) sum_j G(e^{2 pi i j/M})`.
pub fn circle_average_green(p: u32, m: u64, bits: usize) -> Result<f64> {
    check_prime(p)?;
    let sample = MeasureSample::unit_circle(m, bits)?;
    Ok(mp::to_f64(
        &sample.average(|z| circle_green(z, p, bits), bits)?,
    ))
}

/// `-log|a|/(d-1)` for the leading coefficient `a` of `phi_p`, evaluated exactly.
pub fn f_infinity_at_infinity(p: u32, bits: usize) -> Result<f64> {
    let phi = phi_step_poly(p)?;
    let d = phi.degree().expect("phi_p is nonconstant");
    let a = mp::from_rational(&phi.coeffs()[d], bits + 16);
    let v = mp::ln(&a.abs(), bits + 16)
        .neg()
        .div(&mp::from_u64((d - 1) as u64, 64), bits, RM);
    Ok(mp::to_f64(&v))
}

/// Depth of the small orbits used to back the vanishing-term certificates.
const CERTIFICATE_DEPTH: u32 = 4;

fn vanishing_terms(p: u32, bits: usize) -> Result<Vec<AssertedTerm>> {
    let orbit = base_orbit(
        p,
        CERTIFICATE_DEPTH,
        &BasePoint::one(),
        bits,
        &Caps::default(),
    )?;
    let bounded = orbit
        .leaves
        .par_iter()
        .map(|l| {
            green_function(&l.value, p, bits).map(|g| g.status == GreenStatus::BoundedCertified)
        })
        .collect::<Vec<Result<bool>>>()
        .into_iter()
        .collect::<Result<Vec<bool>>>()?;
    let all_bounded = bounded.iter().all(|&b| b);

    let padic = backward_orbit_padic(
        p,
        CERTIFICATE_DEPTH,
        default_digits(CERTIFICATE_DEPTH),
        &Caps::default(),
    )?;
    let split = verify_total_splitting(&padic);

    if !all_bounded || !split.holds {
        return Err(Error::Internal(format!(
            "vanishing-term certificate failed for p={p} (archimedean {all_bounded}, p-adic {})",
            split.holds
        )));
    }
    Ok(vec![
        AssertedTerm {
            name: "green_against_own_measure".into(),
            value: 0.0,
            certificate: format!(
                "G vanishes on the filled Julia set; bounded-certified at all {} depth-{CERTIFICATE_DEPTH} leaves over 1",
                orbit.leaves.len()
            ),
        },
        AssertedTerm {
            name: "p_adic_integral".into(),
            value: 0.0,
            certificate: format!(
                "support in the unit disc of Z_{p}; depth-{CERTIFICATE_DEPTH} orbit totally split with {} trusted digits",
                split.min_forward_digits
            ),
        },
    ])
}

/// `f_inf(inf) + (1/M) sum G(e^{2 pi i j/M}) - 0 - 0`.
pub fn az_decomposition_estimate(p: u32, m: u64, bits: usize) -> Result<PairingReport> {
    let started = Instant::now();
    check_prime(p)?;
    let f_inf = f_infinity_at_infinity(p, bits)?;
    let circle = circle_average_green(p, m, bits)?;
    let mut certificates = vec![
        AssertedTerm {
            name: "f_infinity_at_infinity".into(),
            value: f_inf,
            certificate: format!("-log|a|/(d-1) with a = 1/{p}, d = {p}"),
        },
        AssertedTerm {
            name: "circle_average_green".into(),
            value: circle,
            certificate: format!("bounded-certified at all {m} unit-circle samples"),
        },
    ];
    certificates.extend(vanishing_terms(p, bits)?);
    let estimate = f_inf + circle;
    let target = height_limit(p);
    Ok(PairingReport {
        p,
        method: PairingMethod::Decomposition,
        estimate,
        target,
        abs_error: (estimate - target).abs(),
        parameters: PairingParameters {
            samples: Some(m),
            bits,
            ..Default::default()
        },
        max_residual: None,
        certificates,
        elapsed_ms: started.elapsed().as_millis() as u64,
    })
}

/// `|(1/p^n) sum log|w - beta| - (G(w) + log p/(p-1))|` over `phi_p^{-n}(1)`.
pub fn potential_consistency(p: u32, n: u32, w: &BigComplex, bits: usize) -> Result<f64> {
    check_prime(p)?;
    let orbit = base_orbit(p, n, &BasePoint::one(), bits, &Caps::default())?;
    potential_consistency_for(&orbit, w)
}

/// [`potential_consistency`] against an existing orbit.
pub fn potential_consistency_for(orbit: &ComplexOrbit, w: &BigComplex) -> Result<f64> {
    let p = orbit.p;
    let bits = orbit.bits;
    let r = w.abs_f64();
    if r.is_nan() || r <= escape_radius(p) + 1.0 {
        return Err(Error::invalid(format!(
            "w must satisfy |w| > {:.6}",
            escape_radius(p) + 1.0
        )));
    }
    let w = w.with_bits(bits);
    let lhs = orbit.average(|b| w.sub(b).ln_abs());
    let g = green_function(&w, p, bits)?;
    let rhs = g.value + height_limit(p);
    Ok((mp::to_f64(&lhs) - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decomposition_is_closed_form() {
        for p in [2, 3, 5] {
            let r = az_decomposition_estimate(p, 64, 128).unwrap();
            assert!(r.abs_error < 1e-12, "p={p}: {}", r.abs_error);
            assert_eq!(r.certificates.len(), 4);
        }
        let r = az_decomposition_estimate(2, 1, 128).unwrap();
        assert!((r.estimate - 2f64.ln()).abs() < 1e-15);
        assert!(az_decomposition_estimate(2, 0, 128).is_err());
    }

    #[test]
    fn circle_samples() {
        let s = MeasureSample::unit_circle(64, 128).unwrap();
        assert_eq!(s.points().len(), 64);
        assert!(s.max_modulus_defect() < 1e-30);
        for p in [2, 3, 5] {
            assert_eq!(circle_average_green(p, 32, 128).unwrap(), 0.0);
        }
    }

    #[test]
    fn pullback_from_one_is_the_height() {
        let r = az_pullback_estimate(2, 2, &BasePoint::one(), 128).unwrap();
        assert!((r.estimate - 0.75 * 2f64.ln()).abs() < 1e-15);
        assert_eq!(r.target, 2f64.ln());
    }

    #[test]
    fn potential_precondition() {
        let w = BigComplex::from_f64(1.0, 0.0, 128);
        assert!(matches!(
            potential_consistency(2, 2, &w, 128),
            Err(Error::InvalidParameter(_))
        ));
        let w = BigComplex::from_f64(5.0, 0.0, 128);
        assert!(potential_consistency(2, 6, &w, 128).unwrap() < 1e-6);
    }
}
