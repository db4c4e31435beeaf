use dynheight::arithmetic::{
    denominator_exponent, eval_poly, integral_model, iterate_poly, phi_step_poly, Caps,
    ExactRational,
};
use dynheight::complexdyn::{default_fiber_tolerance, functional_equation_check, phi, solve_fiber};
use dynheight::mp::BigComplex;
use dynheight::padic::{padic_preimages, PadicNumber};
use num_bigint::BigInt;
use num_traits::{Pow, ToPrimitive};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = ExactRational> {
    (-50i64..50, 1i64..20).prop_map(|(a, b)| ExactRational::new(a, b).unwrap())
}

fn prime() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 3, 5])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn integral_model_is_scaled_iterate(p in prop::sample::select(vec![2u32, 3]), n in 1u32..4, x in rational()) {
        let f = integral_model(p, n, &Caps::default()).unwrap();
        let phi = phi_step_poly(p).unwrap();
        let mut y = x.clone();
        for _ in 0..n {
            y = phi.eval(&y);
        }
        let e = denominator_exponent(p, n).to_u32().unwrap();
        let scale = ExactRational::from_integer(BigInt::from(p).pow(e));
        prop_assert_eq!(eval_poly(&f, &x), scale * (y - ExactRational::one()));
    }

    #[test]
    fn iterates_compose(p in prime(), m in 0u32..3, n in 0u32..3, x in rational()) {
        let phi = phi_step_poly(p).unwrap();
        let caps = Caps::default();
        let whole = iterate_poly(&phi, m + n, &caps).unwrap();
        let split = iterate_poly(&phi, m, &caps).unwrap().compose(&iterate_poly(&phi, n, &caps).unwrap());
        prop_assert_eq!(whole.eval(&x), split.eval(&x));
    }

    #[test]
    fn rationals_round_trip(x in rational()) {
        let back: ExactRational = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn padic_preimages_map_back(p in prime(), a in -10_000i64..10_000, k in 4u32..40) {
        let beta = PadicNumber::from_integer(p, k, &BigInt::from(a)).unwrap();
        let roots = padic_preimages(&beta).unwrap();
        prop_assert_eq!(roots.len(), p as usize);
        for r in &roots {
            prop_assert!(r.precision() >= beta.precision().min(k));
            let image = r.apply_phi().unwrap();
            prop_assert!(image.agrees_to(&beta, image.precision()));
        }
    }

    #[test]
    fn fiber_roots_map_to_center(p in prime(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let c = BigComplex::from_f64(re, im, 128);
        let roots = solve_fiber(&c, p, 128, default_fiber_tolerance(128)).unwrap();
        prop_assert_eq!(roots.len(), p as usize);
        for r in &roots {
            prop_assert!(phi(r, p).sub(&c).abs_f64() < 1e-30);
        }
    }

    #[test]
    fn green_functional_equation(p in prime(), r in 4.0f64..1e6, theta in 0.0f64..std::f64::consts::TAU) {
        let z = BigComplex::from_f64(r * theta.cos(), r * theta.sin(), 128);
        prop_assert!(functional_equation_check(&z, p, 128).unwrap() < 1e-12);
    }
}
