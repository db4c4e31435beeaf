//! Simultaneous polynomial root iteration (Aberth-Ehrlich correction of the
//! Weierstrass/Durand-Kerner scheme) in arbitrary precision.

use crate::mp::BigComplex;
use crate::par::*;

/// Why a solve stopped without converging.
#[derive(Debug, Clone, PartialEq)]
pub struct NotConverged {
    pub iterations: usize,
    /// Largest relative correction at the last sweep.
    pub last_correction: f64,
}

/// `(f(z), f'(z))` by Horner's rule; coefficients low degree first.
pub(crate) fn horner_with_derivative(
    coeffs: &[BigComplex],
    z: &BigComplex,
) -> (BigComplex, BigComplex) {
    let bits = z.bits();
    let mut f = BigComplex::zero(bits);
    let mut df = BigComplex::zero(bits);
    for c in coeffs.iter().rev() {
        df = df.mul(z).add(&f);
        f = f.mul(z).add(c);
    }
    (f, df)
}

pub(crate) fn horner(coeffs: &[BigComplex], z: &BigComplex) -> BigComplex {
    let mut f = BigComplex::zero(z.bits());
    for c in coeffs.iter().rev() {
        f = f.mul(z).add(c);
    }
    f
}

/// `sum |a_i| |z|^i`, the natural scale for a relative residual.
pub(crate) fn evaluation_scale(coeffs: &[BigComplex], z: &BigComplex) -> f64 {
    let r = z.abs_f64();
    let mut acc = 0.0;
    for c in coeffs.iter().rev() {
        acc = acc * r + c.abs_f64();
    }
    acc
}

/// `log2` of a radius enclosing every root: the smaller of the Cauchy and
/// Fujiwara bounds, computed from coefficient magnitudes in the log domain.
fn log2_root_radius(coeffs: &[BigComplex]) -> f64 {
    let d = coeffs.len() - 1;
    let lead = coeffs[d].log2_abs();
    let rel: Vec<f64> = coeffs.iter().map(|c| c.log2_abs() - lead).collect();
    let cauchy_max = rel[..d].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let cauchy = if cauchy_max > 60.0 {
        cauchy_max
    } else {
        (1.0 + 2f64.powf(cauchy_max)).log2()
    };
    let mut fujiwara = f64::NEG_INFINITY;
    for k in 1..=d {
        let mut r = rel[d - k];
        if k == d {
            r -= 1.0;
        }
        fujiwara = fujiwara.max(r / k as f64);
    }
    let fujiwara = 1.0 + fujiwara;
    cauchy.min(fujiwara).max(-60.0)
}

/// Starting points: `d` perturbed `d`-th roots of unity on the root-bound circle.
pub(crate) fn initial_guesses(coeffs: &[BigComplex], bits: usize) -> Vec<BigComplex> {
    let d = coeffs.len() - 1;
    let radius = 2f64.powf(log2_root_radius(coeffs));
    (0..d)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / d as f64 + 0.4;
            // Slightly uneven radii break symmetric stalls.
            let r = radius * (1.0 + 0.01 * ((k % 3) as f64));
            BigComplex::from_f64(r * theta.cos(), r * theta.sin(), bits)
        })
        .collect()
}

/// All roots of `sum coeffs[i] x^i` (nonzero leading coefficient), iterated
/// at `bits` of precision. Stops once every relative correction drops below
/// `2^{-bits/2}` and then performs one polishing sweep, which the cubic
/// local convergence carries to working precision.
pub fn simultaneous_roots(
    coeffs: &[BigComplex],
    bits: usize,
    max_iter: usize,
) -> Result<Vec<BigComplex>, NotConverged> {
    assert!(
        coeffs.last().is_some_and(|c| !c.is_zero()),
        "leading coefficient must be nonzero"
    );
    let coeffs: Vec<BigComplex> = coeffs.iter().map(|c| c.with_bits(bits)).collect();
    let d = coeffs.len() - 1;
    match d {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![coeffs[0].neg().div(&coeffs[1])]),
        _ => {}
    }
    let threshold = 2f64.powf(-(bits as f64) / 2.0);
    let mut z = initial_guesses(&coeffs, bits);
    let mut polishing = false;
    let mut last = f64::INFINITY;
    for it in 0..max_iter {
        let updates: Vec<(BigComplex, f64)> = (0..d)
            .into_par_iter()
            .map(|i| aberth_update(&coeffs, &z, i))
            .collect();
        last = updates.iter().map(|u| u.1).fold(0.0, f64::max);
        z = updates.into_iter().map(|u| u.0).collect();
        if z.iter().any(|r| !r.is_finite()) {
            return Err(NotConverged {
                iterations: it + 1,
                last_correction: f64::INFINITY,
            });
        }
        if polishing {
            return Ok(z);
        }
        if last < threshold {
            polishing = true;
        }
    }
    Err(NotConverged {
        iterations: max_iter,
        last_correction: last,
    })
}

fn aberth_update(coeffs: &[BigComplex], z: &[BigComplex], i: usize) -> (BigComplex, f64) {
    let zi = &z[i];
    let bits = zi.bits();
    let (f, df) = horner_with_derivative(coeffs, zi);
    if f.is_zero() {
        return (zi.clone(), 0.0);
    }
    let mut repulsion = BigComplex::zero(bits);
    for (j, zj) in z.iter().enumerate() {
        if j != i {
            let diff = zi.sub(zj);
            if !diff.is_zero() {
                repulsion = repulsion.add(&diff.recip());
            }
        }
    }
    let correction = if df.is_zero() {
        // Stationary point: plain residual step to move off it.
        f.clone()
    } else {
        let w = f.div(&df);
        let denom = BigComplex::from_int(1, bits).sub(&w.mul(&repulsion));
        if denom.is_zero() {
            w
        } else {
            w.div(&denom)
        }
    };
    let rel = correction.abs_f64() / zi.abs_f64().max(1.0);
    (zi.sub(&correction), rel)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[f64], bits: usize) -> Vec<BigComplex> {
        c.iter()
            .map(|&v| BigComplex::from_f64(v, 0.0, bits))
            .collect()
    }

    fn sorted(mut r: Vec<BigComplex>) -> Vec<(f64, f64)> {
        r.sort_by(|a, b| a.cmp_lex(b));
        r.iter().map(|z| z.to_f64_pair()).collect()
    }

    #[test]
    fn quadratic() {
        let r = simultaneous_roots(&poly(&[-2.0, -1.0, 1.0], 128), 128, 100).unwrap();
        let r = sorted(r);
        assert!((r[0].0 + 1.0).abs() < 1e-30 && r[0].1.abs() < 1e-30);
        assert!((r[1].0 - 2.0).abs() < 1e-30 && r[1].1.abs() < 1e-30);
    }

    #[test]
    fn cubic_with_complex_pair() {
        // x^3 - 1
        let r = simultaneous_roots(&poly(&[-1.0, 0.0, 0.0, 1.0], 128), 128, 100).unwrap();
        for z in &r {
            let res = horner(&poly(&[-1.0, 0.0, 0.0, 1.0], 128), z);
            assert!(res.abs_f64() < 1e-35);
        }
        let s = sorted(r);
        assert!((s[0].0 + 0.5).abs() < 1e-30);
        assert!((s[0].1 + 3f64.sqrt() / 2.0).abs() < 1e-30);
        assert!((s[2].0 - 1.0).abs() < 1e-30);
    }

    #[test]
    fn zero_root_and_linear() {
        let r = simultaneous_roots(&poly(&[0.0, 1.0], 64), 64, 10).unwrap();
        assert!(r[0].is_zero());
        let r = simultaneous_roots(&poly(&[0.0, -1.0, 0.0, 1.0], 128), 128, 100).unwrap();
        let s = sorted(r);
        assert!(s[1].0.abs() < 1e-30 && s[1].1.abs() < 1e-30);
    }

    #[test]
    fn radius_bound_encloses_roots() {
        let c = poly(&[-8.0, 2.0, -1.0, -2.0, 1.0], 64);
        // largest root (1 + sqrt 17)/2
        assert!(2f64.powf(log2_root_radius(&c)) >= 2.5615528);
    }

    #[test]
    fn iteration_cap_reports() {
        let err =
            simultaneous_roots(&poly(&[-1.0, 0.0, 0.0, 0.0, 0.0, 1.0], 128), 128, 1).unwrap_err();
        assert_eq!(err.iterations, 1);
    }
}
