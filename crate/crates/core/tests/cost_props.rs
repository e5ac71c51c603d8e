use lap_lchs::cost::{
    comparison_table, cor12_cor13_crossover, cost_application, cost_block_encoding, cost_state_prep,
    loglog_slope_vs_inverse_eps, CostModel, Table, APPLICATIONS,
};
use proptest::prelude::*;

fn model() -> impl Strategy<Value = CostModel> {
    (0.1f64..10.0, 0.1f64..20.0, 1e-9f64..0.5, 0.01f64..1.0, 0.05f64..2.0, 0.2f64..1.0, 0.3f64..0.95).prop_map(
        |(alpha_a, t_final, eps, u, gamma, eta, beta)| CostModel {
            alpha_a,
            t_final,
            eps,
            h_psi_norm: u,
            gamma,
            eta,
            beta,
            k_max: 3.0,
            ..CostModel::default()
        },
    )
}

proptest! {
    #[test]
    fn every_formula_grows_as_eps_shrinks(m in model(), shrink in 1.5f64..100.0) {
        let tighter = CostModel { eps: m.eps / shrink, ..m };
        for app in APPLICATIONS {
            let a = cost_application(app, &m).unwrap().matrix_queries;
            let b = cost_application(app, &tighter).unwrap().matrix_queries;
            prop_assert!(b > a, "{app}: {a} -> {b}");
        }
        prop_assert!(cost_block_encoding(&tighter).unwrap().matrix_queries > cost_block_encoding(&m).unwrap().matrix_queries);
        prop_assert!(cost_state_prep(&tighter).unwrap().matrix_queries > cost_state_prep(&m).unwrap().matrix_queries);
    }

    #[test]
    fn every_formula_grows_with_alpha(m in model(), grow in 1.1f64..10.0) {
        let bigger = CostModel { alpha_a: m.alpha_a * grow, ..m };
        for app in APPLICATIONS {
            let a = cost_application(app, &m).unwrap();
            let b = cost_application(app, &bigger).unwrap();
            prop_assert!(b.matrix_queries > a.matrix_queries);
            prop_assert_eq!(b.state_queries, a.state_queries);
        }
    }

    #[test]
    fn smaller_output_norm_costs_more(m in model(), shrink in 1.1f64..10.0) {
        let smaller = CostModel { h_psi_norm: m.h_psi_norm / shrink, ..m };
        for app in APPLICATIONS {
            let a = cost_application(app, &m).unwrap();
            let b = cost_application(app, &smaller).unwrap();
            prop_assert!(b.matrix_queries > a.matrix_queries, "{app}");
            prop_assert!(b.state_queries >= a.state_queries, "{app}");
        }
    }

    #[test]
    fn multiplier_is_linear(m in model(), c in 0.5f64..20.0) {
        let scaled = CostModel { multiplier: c, ..m };
        for app in APPLICATIONS {
            let a = cost_application(app, &m).unwrap().matrix_queries;
            let b = cost_application(app, &scaled).unwrap().matrix_queries;
            prop_assert!((b / a - c).abs() < 1e-9 * c);
        }
    }

    #[test]
    fn cor12_grows_faster_in_t_than_cor13(m in model()) {
        // cor13 does not depend on T at all; cor12 is quadratic in it
        let later = CostModel { t_final: m.t_final * 2.0, ..m };
        let r12 = cost_application("cor12", &later).unwrap().matrix_queries / cost_application("cor12", &m).unwrap().matrix_queries;
        let r13 = cost_application("cor13", &later).unwrap().matrix_queries / cost_application("cor13", &m).unwrap().matrix_queries;
        prop_assert!((r12 - 4.0).abs() < 1e-9);
        prop_assert!((r13 - 1.0).abs() < 1e-12);
    }
}

#[test]
fn cor12_slope_close_to_two_when_log_factor_is_flat() {
    // decaying branch with A = I over T = 10: ‖u(T)‖ = e^{-10}
    let m = CostModel { alpha_a: 1.0, t_final: 10.0, h_psi_norm: (-10.0f64).exp(), ..CostModel::default() };
    let s = loglog_slope_vs_inverse_eps("cor12", &m, &[1e-1, 1e-2, 1e-3, 1e-4]).unwrap();
    assert!((s - 2.0).abs() <= 0.1, "slope {s}");
}

#[test]
fn cor12_slope_exceeds_two_by_the_log_factor() {
    let m = CostModel { t_final: 10.0, h_psi_norm: 1.0, ..CostModel::default() };
    let s = loglog_slope_vs_inverse_eps("cor12", &m, &[1e-1, 1e-2, 1e-3, 1e-4]).unwrap();
    assert!(s > 2.0 && s < 2.4, "slope {s}");
}

#[test]
fn crossover_exists_for_small_gamma_gap() {
    let m = CostModel { gamma: 0.1, eps: 1e-2, h_psi_norm: 0.9, ..CostModel::default() };
    let t = cor12_cor13_crossover(&m, 1e-3, 1e4).unwrap();
    assert!(t.is_some());
}

#[test]
fn cor9_at_unit_power_is_shifted_solve_shape() {
    // p = 1: α/(η²‖x‖)·log^{1+1/β}, state 1/(η‖x‖)
    let m = CostModel { eta: 0.25, p: 1.0, h_psi_norm: 0.5, eps: 1e-4, ..CostModel::default() };
    let r = cost_application("cor9", &m).unwrap();
    let l = (std::f64::consts::E + 1.0 / (1e-4 * 0.25 * 0.5)).ln();
    let expect = 1.0 / (0.0625 * 0.5) * l.powf(1.0 + 1.0 / 0.8);
    assert!((r.matrix_queries / expect - 1.0).abs() < 1e-12);
    assert!((r.state_queries - 8.0).abs() < 1e-12);
}

#[test]
fn table2_reference_point_favours_laplace_method() {
    let m = CostModel { gamma: 0.5, t_final: 10.0, eps: 1e-6, ..CostModel::default() };
    let rows = comparison_table(Table::Table2, &m, None).unwrap();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert!(r.lap_matrix_smaller() && r.lap_state_smaller(), "{r:?}");
    }
}
