use dynheight::arithmetic::{integral_model, Caps};
use dynheight::complexdyn::{backward_orbit_complex, log_plus};
use dynheight::heights::{average_height, height_bound, height_sequence, mahler_measure};
use dynheight::mp::{to_f64, BigComplex};

#[test]
fn mahler_oracle_matches_orbit_average() {
    let s = height_sequence(2, 6, 128).unwrap();
    for r in &s {
        let f = integral_model(2, r.n, &Caps::default()).unwrap();
        let m = mahler_measure(&f, 192).unwrap();
        let oracle = m.log_measure / 2f64.powi(r.n as i32);
        assert!(
            (r.avg_height - oracle).abs() < 1e-9,
            "n={}: {} vs {oracle}",
            r.n,
            r.avg_height
        );
    }
}

#[test]
fn bound_holds_for_small_primes() {
    for (p, n_max) in [(2, 8), (3, 5), (5, 3)] {
        for r in height_sequence(p, n_max, 128).unwrap() {
            assert!(r.avg_height >= 0.0);
            assert!(r.avg_height <= height_bound(p) + 1e-9, "p={p} n={}", r.n);
            assert_eq!(r.count, (p as u64).pow(r.n));
        }
    }
}

#[test]
fn approach_from_below() {
    let s = height_sequence(2, 9, 128).unwrap();
    for w in s.windows(2) {
        assert!(w[1].abs_error() < w[0].abs_error());
        assert!(w[1].avg_height < w[1].limit);
    }
}

#[test]
fn single_depth_matches_sequence() {
    let s = height_sequence(3, 3, 128).unwrap();
    let r = average_height(3, 3, 128).unwrap();
    assert_eq!(s[2].avg_height, r.avg_height);
}

#[test]
fn base_point_matters_less_with_depth() {
    let diff = |n| {
        let a = backward_orbit_complex(2, n, &BigComplex::from_int(1, 128), 128).unwrap();
        let b = backward_orbit_complex(2, n, &BigComplex::from_f64(0.41, 0.37, 128), 128).unwrap();
        (to_f64(&a.average(log_plus)) - to_f64(&b.average(log_plus))).abs()
    };
    assert!(diff(10) < diff(6));
}
