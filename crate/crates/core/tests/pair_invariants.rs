use lap_lchs::pairs::*;
use lap_lchs::Complex64;
use proptest::prelude::*;

fn catalogue() -> Vec<LaplacePair> {
    vec![
        pair_inhomogeneous(2.0).unwrap(),
        pair_inverse_power(1.0, 1.0).unwrap(),
        pair_inverse_power(0.7, 0.5).unwrap(),
        pair_inverse_power(1.5, 2.5).unwrap(),
        pair_mass_first_with_inverse(1.0, 0.5).unwrap(),
        pair_mass_first_no_inverse(1.0, 1.0).unwrap(),
        pair_second_order(1.0, 0.0).unwrap(),
        pair_second_order(1.0, 0.5).unwrap(),
        pair_second_order_mass(1.0, 1.0).unwrap(),
    ]
}

#[test]
fn every_pair_reproduces_its_transform() {
    for pair in catalogue() {
        let report = pair_validate(&pair, &standard_z_samples(), 1e-6).unwrap();
        assert!(report.pass, "{}: max deviation {:e}", report.pair, report.max_deviation);
    }
}

#[test]
fn l1_norm_dominates_integrated_mass() {
    for pair in catalogue() {
        // the unshifted second-order tail is too slow for 1e-10; use the cap
        let tp = tail_truncation_time(&pair, 1e-10).unwrap_or(1e6);
        let mass = pair.integrate_abs(0.0, tp).unwrap();
        assert!(mass <= pair.l1.value + 1e-6, "{}: {mass} > {}", pair.name(), pair.l1.value);
    }
}

#[test]
fn tail_bound_dominates_integrated_tail() {
    for pair in catalogue() {
        for &tp in &[0.5, 2.0, 8.0] {
            let tail = pair.integrate_abs(tp, 10.0 * tp).unwrap();
            assert!(tail <= pair.tail_bound(tp) * (1.0 + 1e-3), "{} at {tp}", pair.name());
        }
    }
}

#[test]
fn tail_bound_nonincreasing() {
    for pair in catalogue() {
        let mut prev = f64::INFINITY;
        for i in 0..200 {
            let b = pair.tail_bound(i as f64 * 0.25);
            assert!(b <= prev, "{}", pair.name());
            prev = b;
        }
    }
}

proptest! {
    #[test]
    fn phase_has_unit_modulus(k in -1e3f64..1e3, t in 0f64..1e3) {
        for pair in catalogue().iter().filter(|p| p.shift != 0.0) {
            prop_assert!((pair.phase(k, t).norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn shifted_mass_pair_matches_direct_formula(re in 0f64..5.0, im in -5f64..5.0, t in 0.1f64..3.0, gamma in 0.1f64..2.0) {
        let pair = pair_mass_first_with_inverse(t, gamma).unwrap();
        let z = Complex64::new(re, im);
        let s = z + gamma;
        let direct = (-t / s).exp() / s;
        prop_assert!((pair.h(z) - direct).norm() <= 1e-13 * direct.norm().max(1.0));
    }

    #[test]
    fn target_undoes_the_shift(re in 0.1f64..5.0, im in -5f64..5.0) {
        let pair = pair_mass_first_no_inverse(1.0, 1.0).unwrap();
        let lam = Complex64::new(re, im);
        let want = (-1.0 / lam).exp();
        prop_assert!((pair.target(lam).unwrap() - want).norm() < 1e-13);
    }
}
