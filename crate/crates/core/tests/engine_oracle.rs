use lap_lchs::engine::*;
use lap_lchs::kernel::Kernel;
use lap_lchs::linalg::testmat::dissipative;
use lap_lchs::linalg::{cartesian_decompose, vec_norm, vec_sub};
use lap_lchs::pairs::*;
use lap_lchs::quadrature::{build_grid, Scheme};
use lap_lchs::{Complex64, Error};
use proptest::prelude::*;

fn fixed_grid() -> SolveOptions {
    SolveOptions {
        policy: GridPolicy::Adaptive(GridSpec { k_max: Some(30.0), t_prime: Some(12.0), m_k: Some(300), m_t: Some(240) }),
        oracle: false,
        ..SolveOptions::default()
    }
}

fn vec_strategy() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3).prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn state_transform_is_linear(x in vec_strategy(), y in vec_strategy(), s in -2.0f64..2.0) {
        prop_assume!(vec_norm(&x) > 1e-3 && vec_norm(&y) > 1e-3);
        let a = dissipative(3, 0.4, 0.8, 0.5, 11).unwrap();
        let pair = pair_inverse_power(1.0, 1.0).unwrap();
        let opts = fixed_grid();
        let combo: Vec<Complex64> = x.iter().zip(&y).map(|(p, q)| p + q * s).collect();
        prop_assume!(vec_norm(&combo) > 1e-3);
        let hx = transform(&a, Some(&x), &pair, 1e-3, &opts).unwrap().state.unwrap();
        let hy = transform(&a, Some(&y), &pair, 1e-3, &opts).unwrap().state.unwrap();
        let hc = transform(&a, Some(&combo), &pair, 1e-3, &opts).unwrap().state.unwrap();
        let expect: Vec<Complex64> = hx.iter().zip(&hy).map(|(p, q)| p + q * s).collect();
        prop_assert!(vec_norm(&vec_sub(&hc, &expect)) <= 1e-12 * (1.0 + vec_norm(&expect)));
    }

    #[test]
    fn phase_factor_equals_shifted_evolution(k in -20.0f64..20.0, t in 0.0f64..15.0, g in 0.0f64..1.0) {
        let a = dissipative(3, 1.0, 0.5, 0.5, 5).unwrap();
        let parts = cartesian_decompose(&a).unwrap();
        let pair = pair_mass_first_with_inverse(1.0, g).unwrap();
        let lhs = lap_lchs::linalg::hermitian_evolution(&parts.hamiltonian(k), t).unwrap().scale(pair.phase(k, t));
        let shifted = parts.hamiltonian(k).shift_diag(Complex64::new(-k * g, 0.0));
        let rhs = lap_lchs::linalg::hermitian_evolution(&shifted, t).unwrap();
        prop_assert!((&lhs - &rhs).max_abs() <= 1e-10 * (1.0 + (k * t).abs()));
    }
}

#[test]
fn apply_matches_matrix_times_state() {
    let a = dissipative(4, 0.5, 1.0, 0.5, 21).unwrap();
    let parts = cartesian_decompose(&a).unwrap();
    let kernel = Kernel::new(0.8).unwrap();
    let pair = pair_mass_first_no_inverse(1.0, 0.5).unwrap();
    let grid = build_grid(&pair, &kernel, 20.0, 30.0, 200, 400, Scheme::Midpoint).unwrap();
    let cache = KEigenCache::build(&parts, &grid.k_nodes).unwrap();
    let psi = vec![Complex64::new(0.5, 0.0); 4];
    let m = lap_lchs_matrix(&parts, &pair, &kernel, &grid, &cache).unwrap().matrix.unwrap();
    let s = lap_lchs_apply(&parts, &pair, &kernel, &grid, &cache, &psi).unwrap().state.unwrap();
    assert!(vec_norm(&vec_sub(&m.try_matvec(&psi).unwrap(), &s)) < 1e-12);
    assert!(cache.max_reconstruction_error(&parts) < 1e-12);
}

#[test]
fn repeated_runs_are_bitwise_identical() {
    let a = dissipative(4, 0.5, 1.0, 0.5, 22).unwrap();
    let pair = pair_second_order(1.0, 0.5).unwrap();
    let opts = SolveOptions::default();
    let r1 = transform(&a, None, &pair, 1e-3, &opts).unwrap();
    let r2 = transform(&a, None, &pair, 1e-3, &opts).unwrap();
    assert_eq!(r1.matrix.unwrap().as_slice(), r2.matrix.unwrap().as_slice());
    assert_eq!(r1.error_vs_oracle, r2.error_vs_oracle);
}

#[test]
fn solvers_reach_their_targets() {
    let a = dissipative(3, 0.5, 1.0, 0.4, 23).unwrap();
    let u0 = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-0.5, 0.0)];
    let opts = SolveOptions::default();
    let checks = [
        solve_inhomogeneous(&a, Some(&u0), 1.0, 1e-4, &opts).unwrap(),
        apply_inverse_power(&a, Some(&u0), 1.0, 2.0, 1e-4, &opts).unwrap(),
        solve_mass_first(&a, Some(&u0), 1.0, MassMode::WithInverse, 1e-3, &opts).unwrap(),
        solve_second_order(&a, Some(&u0), 1.0, true, 1e-3, &opts).unwrap(),
    ];
    for r in &checks {
        let err = r.error_vs_oracle.unwrap();
        assert!(err <= 1e-3 * vec_norm(&u0), "{}: {err}", r.pair);
    }
}

#[test]
fn contract_errors() {
    let a = dissipative(3, 0.2, 1.0, 0.4, 24).unwrap();
    // a shift larger than the spectrum of L allows
    let pair = pair_mass_first_with_inverse(1.0, 0.5).unwrap();
    let err = transform(&a, None, &pair, 1e-3, &SolveOptions::default()).unwrap_err();
    assert!(matches!(err, Error::Contract(_)));
    // literal Riemann counts exceed the work cap
    let lemma = SolveOptions { policy: GridPolicy::Lemma { multiplier: 1.0 }, ..SolveOptions::default() };
    let err = transform(&a, None, &pair_inverse_power(1.0, 1.0).unwrap(), 1e-4, &lemma).unwrap_err();
    assert_eq!(err.exit_code(), 3);
    // not dissipative
    let neg = a.scale_real(-1.0);
    assert!(matches!(
        transform(&neg, None, &pair_inverse_power(1.0, 1.0).unwrap(), 1e-3, &SolveOptions::default()),
        Err(Error::NotDissipative { .. })
    ));
}
