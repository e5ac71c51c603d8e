//! Query-count formulas with all big-O constants set to a single multiplier.
//!
//! These are shapes, not absolute counts. Logarithms are natural and guarded
//! as ln(e + x), so every factor stays ≥ 1 and strictly monotone even when
//! the argument drops below one.

use std::f64::consts::E;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};

pub const SHAPE_NOTICE: &str = "query counts are asymptotic shapes with all constants = multiplier, not absolute gate counts";

fn lg(x: f64) -> f64 {
    (E + x).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostModel {
    pub alpha_a: f64,
    pub t_final: f64,
    pub k_max: f64,
    pub eps: f64,
    pub l1_f: f64,
    pub l1_g: f64,
    /// ‖h(A)ψ‖; also ‖u(T)‖ or ‖x‖ in the application formulas.
    pub h_psi_norm: f64,
    pub gamma: f64,
    pub eta: f64,
    pub p: f64,
    pub beta: f64,
    pub u0_norm: f64,
    /// max_t ‖u(t)‖, used by the Taylor column.
    pub u_max: f64,
    /// ‖A⁻¹‖; 1/γ when absent.
    pub a_inv_norm: Option<f64>,
    pub multiplier: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self {
            alpha_a: 1.0,
            t_final: 1.0,
            k_max: 1.0,
            eps: 1e-6,
            l1_f: 1.0,
            l1_g: 1.0,
            h_psi_norm: 1.0,
            gamma: 1.0,
            eta: 1.0,
            p: 1.0,
            beta: crate::kernel::DEFAULT_BETA,
            u0_norm: 1.0,
            u_max: 1.0,
            a_inv_norm: None,
            multiplier: 1.0,
        }
    }
}

impl CostModel {
    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::Contract(format!("eps must lie in (0, 1), got {}", self.eps)));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::Domain(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        let named = [
            ("alpha_a", self.alpha_a),
            ("T", self.t_final),
            ("K", self.k_max),
            ("l1_f", self.l1_f),
            ("l1_g", self.l1_g),
            ("h_psi_norm", self.h_psi_norm),
            ("gamma", self.gamma),
            ("eta", self.eta),
            ("p", self.p),
            ("u0_norm", self.u0_norm),
            ("u_max", self.u_max),
            ("multiplier", self.multiplier),
            ("a_inv_norm", self.a_inv()),
        ];
        for (name, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Contract(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    fn a_inv(&self) -> f64 {
        self.a_inv_norm.unwrap_or(1.0 / self.gamma)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub formula_id: String,
    pub matrix_queries: f64,
    pub state_queries: f64,
    pub inputs: CostModel,
    pub notice: &'static str,
}

fn report(id: &str, m: &CostModel, matrix: f64, state: f64) -> CostReport {
    CostReport {
        formula_id: id.to_string(),
        matrix_queries: matrix * m.multiplier,
        state_queries: state * m.multiplier,
        inputs: *m,
        notice: SHAPE_NOTICE,
    }
}

/// One block encoding of h(A): α_A·K·T + log(‖f‖₁‖g‖₁/ε).
pub fn cost_block_encoding(m: &CostModel) -> Result<CostReport> {
    m.validate()?;
    let q = m.alpha_a * m.k_max * m.t_final + lg(m.l1_f * m.l1_g / m.eps);
    Ok(report("block_encoding", m, q, 1.0))
}

/// Normalized state h(A)ψ/‖h(A)ψ‖ with amplitude amplification.
pub fn cost_state_prep(m: &CostModel) -> Result<CostReport> {
    m.validate()?;
    let amp = m.l1_f * m.l1_g / m.h_psi_norm;
    let per_run = m.alpha_a * m.k_max * m.t_final + lg(amp / m.eps);
    Ok(report("state_prep", m, amp * per_run, amp.ceil()))
}

pub const APPLICATIONS: [&str; 6] = ["cor7", "cor9", "cor10", "cor11", "cor12", "cor13"];

/// The application formulas, read literally.
pub fn cost_application(app: &str, m: &CostModel) -> Result<CostReport> {
    m.validate()?;
    let u = m.h_psi_norm;
    let ib = 1.0 / m.beta;
    let r = m.u0_norm / u;
    let (matrix, state) = match app {
        // inhomogeneous first-order ODE
        "cor7" => (
            m.alpha_a * m.t_final.powi(2) / u * lg(m.t_final / (u * m.eps)).powf(ib),
            m.t_final / u,
        ),
        // (ηI + A)^{-p} b
        "cor9" => (
            m.alpha_a / (m.eta.powf(m.p + 1.0) * u) * lg(1.0 / (m.eps * m.eta * u)).powf(1.0 + ib),
            1.0 / (m.eta.powf(m.p) * u),
        ),
        // mass matrix, initial condition through A^{-1}
        "cor10" => (
            r * m.alpha_a / m.gamma.powi(2) * lg(r / (m.eps * m.gamma)).powf(1.0 + ib),
            r / m.gamma,
        ),
        // mass matrix, plain initial condition
        "cor11" => {
            let s = 1.0 + (m.t_final / m.gamma).sqrt();
            (
                r * m.alpha_a / m.gamma * s * lg(m.t_final * r / (m.eps * m.gamma)).powf(1.0 + ib),
                r * s,
            )
        }
        // second order, decaying branch
        "cor12" => (
            m.alpha_a * m.t_final.powi(2) / (u.powi(3) * m.eps.powi(2)) * lg(1.0 / (u * m.eps)).powf(ib),
            1.0 / u,
        ),
        // second order with L ⪰ γ
        "cor13" => (m.alpha_a / (u * m.gamma) * lg(1.0 / (u * m.eps)).powf(1.0 + ib), 1.0 / u),
        other => {
            return Err(Error::Contract(format!(
                "unknown application '{other}' (expected one of {})",
                APPLICATIONS.join(", ")
            )))
        }
    };
    Ok(report(app, m, matrix, state))
}

/// Least-squares slope of ln(cost) against ln(1/ε).
pub fn loglog_slope_vs_inverse_eps(app: &str, base: &CostModel, eps_values: &[f64]) -> Result<f64> {
    if eps_values.len() < 2 {
        return Err(Error::Contract("slope needs at least two eps values".into()));
    }
    let mut pts = Vec::with_capacity(eps_values.len());
    for &e in eps_values {
        let r = cost_application(app, &CostModel { eps: e, ..*base })?;
        pts.push(((1.0 / e).ln(), r.matrix_queries.ln()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Smallest T in [lo, hi] where the cor12 matrix cost exceeds cor13's, by
/// bisection. Both use the same ‖u(T)‖, so the comparison is in T alone.
pub fn cor12_cor13_crossover(base: &CostModel, lo: f64, hi: f64) -> Result<Option<f64>> {
    let gap = |t: f64| -> Result<f64> {
        let m = CostModel { t_final: t, ..*base };
        Ok(cost_application("cor12", &m)?.matrix_queries - cost_application("cor13", &m)?.matrix_queries)
    };
    if gap(lo)? > 0.0 {
        return Ok(Some(lo));
    }
    if gap(hi)? <= 0.0 {
        return Ok(None);
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > 1e-12 * b {
        let mid = 0.5 * (a + b);
        if gap(mid)? > 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(Some(b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table {
    /// Inhomogeneous ODE: this method vs truncated Taylor series.
    Table1,
    /// Mass-matrix ODE: this method vs QSVT inversion + Dyson series.
    Table2,
}

impl Table {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "table1" => Ok(Self::Table1),
            "table2" => Ok(Self::Table2),
            other => Err(Error::Contract(format!("unknown table '{other}' (expected table1 or table2)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub case: &'static str,
    pub sweep_value: f64,
    pub lap_matrix: f64,
    pub lap_state: f64,
    pub other_method: &'static str,
    pub other_matrix: f64,
    pub other_state: f64,
}

impl ComparisonRow {
    pub fn lap_matrix_smaller(&self) -> bool {
        self.lap_matrix < self.other_matrix
    }
    pub fn lap_state_smaller(&self) -> bool {
        self.lap_state < self.other_state
    }
}

/// "name=start:end:count" with linear spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: String,
    pub values: Vec<f64>,
}

impl Sweep {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("sweep '{s}' is not of the form name=start:end:count"));
        let (name, range) = s.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let end: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if count == 0 {
            return Err(bad());
        }
        let values = if count == 1 {
            vec![start]
        } else {
            (0..count).map(|i| start + (end - start) * i as f64 / (count - 1) as f64).collect()
        };
        Ok(Self { param: name.trim().to_string(), values })
    }

    fn apply(&self, m: &CostModel, v: f64) -> Result<CostModel> {
        let mut m = *m;
        match self.param.as_str() {
            "alpha_a" => m.alpha_a = v,
            "T" | "t" => m.t_final = v,
            "eps" => m.eps = v,
            "gamma" => m.gamma = v,
            "u_norm" => m.h_psi_norm = v,
            "u0_norm" => m.u0_norm = v,
            "u_max" => m.u_max = v,
            "beta" => m.beta = v,
            "a_inv_norm" => m.a_inv_norm = Some(v),
            other => return Err(Error::Contract(format!("cannot sweep over '{other}'"))),
        }
        Ok(m)
    }
}

pub fn comparison_table(table: Table, base: &CostModel, sweep: Option<&Sweep>) -> Result<Vec<ComparisonRow>> {
    let points: Vec<(f64, CostModel)> = match sweep {
        Some(s) => s.values.iter().map(|&v| Ok((v, s.apply(base, v)?))).collect::<Result<_>>()?,
        None => vec![(f64::NAN, *base)],
    };
    let mut rows = Vec::new();
    for (v, m) in points {
        m.validate()?;
        let l = lg(1.0 / m.eps);
        let ib = 1.0 / m.beta;
        let mul = m.multiplier;
        match table {
            Table::Table1 => {
                let u = m.h_psi_norm;
                let w = m.u_max / u;
                rows.push(ComparisonRow {
                    case: "inhomogeneous",
                    sweep_value: v,
                    lap_matrix: mul * m.alpha_a * m.t_final.powi(2) / u * l.powf(ib),
                    lap_state: mul * m.t_final / u,
                    other_method: "taylor",
                    other_matrix: mul * w * m.alpha_a * m.t_final * l.powi(2),
                    other_state: mul * w * m.alpha_a * m.t_final * l,
                });
            }
            Table::Table2 => {
                let r = m.u0_norm / m.h_psi_norm;
                let ai = m.a_inv();
                rows.push(ComparisonRow {
                    case: "with_inverse",
                    sweep_value: v,
                    lap_matrix: mul * r * m.alpha_a / m.gamma.powi(2) * l.powf(1.0 + ib),
                    lap_state: mul * r / m.gamma,
                    other_method: "qsvt+dyson",
                    other_matrix: mul * r * m.alpha_a * ai.powi(3) * m.t_final * l.powi(3),
                    other_state: mul * r * m.alpha_a * ai.powi(3) * m.t_final * l.powi(2),
                });
                rows.push(ComparisonRow {
                    case: "no_inverse",
                    sweep_value: v,
                    lap_matrix: mul * r * m.alpha_a * m.gamma.powf(-1.5) * m.t_final.sqrt() * l.powf(1.0 + ib),
                    lap_state: mul * r * (m.t_final / m.gamma).sqrt(),
                    other_method: "qsvt+dyson",
                    other_matrix: mul * r * m.alpha_a * ai.powi(2) * m.t_final * l.powi(3),
                    other_state: mul * r * ai * m.t_final * l,
                });
            }
        }
    }
    Ok(rows)
}

pub const TABLE_CSV_HEADER: &str =
    "case,sweep_param,sweep_value,lap_matrix_queries,lap_state_queries,other_method,other_matrix_queries,other_state_queries,lap_matrix_smaller,lap_state_smaller";

pub fn comparison_csv(rows: &[ComparisonRow], sweep_param: &str) -> String {
    let mut out = String::new();
    writeln!(out, "{TABLE_CSV_HEADER}").unwrap();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{:.6e},{:.6e},{},{:.6e},{:.6e},{},{}",
            r.case,
            sweep_param,
            r.sweep_value,
            r.lap_matrix,
            r.lap_state,
            r.other_method,
            r.other_matrix,
            r.other_state,
            r.lap_matrix_smaller(),
            r.lap_state_smaller()
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_encoding_scaling() {
        let m = CostModel { alpha_a: 2.0, t_final: 3.0, k_max: 5.0, ..CostModel::default() };
        let a = cost_block_encoding(&m).unwrap().matrix_queries;
        let b = cost_block_encoding(&CostModel { t_final: 6.0, ..m }).unwrap().matrix_queries;
        assert!((b - a - 30.0).abs() < 1e-12);
        let c = cost_block_encoding(&CostModel { eps: m.eps / 10.0, ..m }).unwrap().matrix_queries;
        assert!((c - a - 10f64.ln()).abs() < 1e-5);
    }

    #[test]
    fn state_prep_basics() {
        let m = CostModel::default();
        assert_eq!(cost_state_prep(&m).unwrap().state_queries, 1.0);
        let half = cost_state_prep(&CostModel { h_psi_norm: 0.5, ..m }).unwrap();
        assert_eq!(half.state_queries, 2.0);
    }

    #[test]
    fn mass_cost_quadruples_when_gamma_halves() {
        // with the log argument pinned, γ ↦ γ/2 scales the prefactor by 4
        let m = CostModel { gamma: 0.5, ..CostModel::default() };
        let a = cost_application("cor10", &m).unwrap().matrix_queries;
        let b = cost_application("cor10", &CostModel { gamma: 0.25, eps: m.eps * 2.0, ..m }).unwrap().matrix_queries;
        assert!((b / a - 4.0).abs() < 1e-3);
    }

    #[test]
    fn cor12_leading_term_scales_as_inverse_eps_squared() {
        let m = CostModel { eps: 1e-3, ..CostModel::default() };
        let a = cost_application("cor12", &m).unwrap().matrix_queries;
        let b = cost_application("cor12", &CostModel { eps: 1e-4, ..m }).unwrap().matrix_queries;
        let ratio = b / a;
        assert!(ratio > 100.0 && ratio < 100.0 * 1.5);
    }

    #[test]
    fn unknown_names_rejected() {
        assert!(cost_application("cor8", &CostModel::default()).is_err());
        assert!(Table::parse("table3").is_err());
        assert!(Sweep::parse("gamma=1:2").is_err());
        assert!(cost_application("cor7", &CostModel { eps: 1.5, ..CostModel::default() }).is_err());
    }

    #[test]
    fn sweep_parsing() {
        let s = Sweep::parse("gamma=0.1:1:10").unwrap();
        assert_eq!(s.values.len(), 10);
        assert!((s.values[9] - 1.0).abs() < 1e-15);
        let one = Sweep::parse("T=5:9:1").unwrap();
        let rows = comparison_table(Table::Table1, &CostModel::default(), Some(&one)).unwrap();
        assert_eq!(rows.len(), 1);
    }

    #[test]
    fn crossover_matches_direct_comparison() {
        let m = CostModel { gamma: 0.5, eps: 1e-3, h_psi_norm: 0.5, ..CostModel::default() };
        let t = cor12_cor13_crossover(&m, 1e-6, 1e3).unwrap().unwrap();
        let at = |t: f64, app: &str| cost_application(app, &CostModel { t_final: t, ..m }).unwrap().matrix_queries;
        assert!(at(t * 0.999, "cor12") <= at(t * 0.999, "cor13"));
        assert!(at(t * 1.001, "cor12") > at(t * 1.001, "cor13"));
    }

    #[test]
    fn table1_lap_state_independent_of_eps() {
        let m = CostModel { t_final: 4.0, h_psi_norm: 0.5, ..CostModel::default() };
        let a = comparison_table(Table::Table1, &m, None).unwrap();
        let b = comparison_table(Table::Table1, &CostModel { eps: 1e-12, ..m }, None).unwrap();
        assert_eq!(a[0].lap_state, 8.0);
        assert_eq!(a[0].lap_state, b[0].lap_state);
    }
}
