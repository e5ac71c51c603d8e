//! Truncated Riemann-sum grids over (k, t) and their a-priori error bounds.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::pairs::{tail_truncation_time, LaplacePair, PairKind};
use crate::tolerances::{SUP_NORM_SAFETY, SUP_NORM_SAMPLES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Left endpoints in both k and t.
    Left,
    /// Midpoints in both k and t.
    Midpoint,
    /// Midpoints in k; midpoints in u with t = u², which turns the
    /// integrable t^{p−1} singularity at the origin into a bounded integrand.
    SqrtGraded,
}

impl Scheme {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Self::Left),
            "midpoint" => Ok(Self::Midpoint),
            "sqrt-graded" => Ok(Self::SqrtGraded),
            other => Err(Error::Contract(format!(
                "unknown scheme '{other}' (expected left, midpoint or sqrt-graded)"
            ))),
        }
    }

    /// Default scheme for a pair: midpoint (second order for smooth g),
    /// graded when g blows up at t = 0.
    pub fn default_for(pair: &LaplacePair) -> Self {
        if pair.singular_at_zero {
            Self::SqrtGraded
        } else {
            Self::Midpoint
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadratureGrid {
    pub k_max: f64,
    pub t_prime: f64,
    pub m_k: usize,
    pub m_t: usize,
    pub h_k: f64,
    pub h_t: f64,
    pub scheme: Scheme,
    #[serde(skip)]
    pub k_nodes: Vec<f64>,
    #[serde(skip)]
    pub t_nodes: Vec<f64>,
    #[serde(skip)]
    pub c: Vec<Complex64>,
    #[serde(skip)]
    pub c_hat: Vec<Complex64>,
    pub c_l1: f64,
    pub c_hat_l1: f64,
}

impl QuadratureGrid {
    pub fn terms(&self) -> f64 {
        self.m_k as f64 * self.m_t as f64
    }
}

/// Lay out nodes and coefficients. Kernel weights are already normalized.
pub fn build_grid(
    pair: &LaplacePair,
    kernel: &Kernel,
    k_max: f64,
    t_prime: f64,
    m_k: usize,
    m_t: usize,
    scheme: Scheme,
) -> Result<QuadratureGrid> {
    if m_k == 0 || m_t == 0 {
        return Err(Error::Contract("grid sizes must be at least 1".into()));
    }
    if !(k_max > 0.0 && t_prime > 0.0) || !k_max.is_finite() || !t_prime.is_finite() {
        return Err(Error::Contract(format!("truncation K = {k_max}, T' = {t_prime} must be positive")));
    }
    if scheme == Scheme::Left && pair.singular_at_zero {
        return Err(Error::Contract(format!(
            "{} pair is singular at t = 0; the left rule would evaluate g there",
            pair.name()
        )));
    }
    let h_k = 2.0 * k_max / m_k as f64;
    let h_t = t_prime / m_t as f64;
    let k_off = if scheme == Scheme::Left { 0.0 } else { 0.5 };
    let k_nodes: Vec<f64> = (0..m_k).map(|j| -k_max + (j as f64 + k_off) * h_k).collect();
    let c: Vec<Complex64> = k_nodes.iter().map(|&k| kernel.weight(k) * h_k).collect();
    let (t_nodes, c_hat): (Vec<f64>, Vec<Complex64>) = match scheme {
        Scheme::Left | Scheme::Midpoint => {
            let off = if scheme == Scheme::Left { 0.0 } else { 0.5 };
            (0..m_t)
                .map(|l| {
                    let t = (l as f64 + off) * h_t;
                    (t, Complex64::new(h_t * pair.g(t), 0.0))
                })
                .unzip()
        }
        Scheme::SqrtGraded => {
            let h_u = t_prime.sqrt() / m_t as f64;
            (0..m_t)
                .map(|l| {
                    let u = (l as f64 + 0.5) * h_u;
                    let t = u * u;
                    (t, Complex64::new(h_u * 2.0 * u * pair.g(t), 0.0))
                })
                .unzip()
        }
    };
    let c_l1 = c.iter().map(|z| z.norm()).sum();
    let c_hat_l1 = c_hat.iter().map(|z| z.norm()).sum();
    Ok(QuadratureGrid { k_max, t_prime, m_k, m_t, h_k, h_t, scheme, k_nodes, t_nodes, c, c_hat, c_l1, c_hat_l1 })
}

/// Sampled sup norms (each times the safety factor, except ‖f‖_∞ which is exact).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupNorms {
    pub f_inf: f64,
    pub f_prime_inf: f64,
    pub g_inf: f64,
    pub g_prime_inf: f64,
    pub tg_inf: f64,
}

impl SupNorms {
    pub fn is_finite(&self) -> bool {
        [self.f_inf, self.f_prime_inf, self.g_inf, self.g_prime_inf, self.tg_inf]
            .iter()
            .all(|x| x.is_finite())
    }
}

pub fn sup_norms(pair: &LaplacePair, kernel: &Kernel, k_max: f64, t_prime: f64) -> SupNorms {
    let n = SUP_NORM_SAMPLES;
    let f_prime_inf = (0..=n)
        .map(|i| kernel.f_prime(-k_max + 2.0 * k_max * i as f64 / n as f64).norm())
        .fold(0.0, f64::max);
    let ts: Vec<f64> = (0..=n).map(|i| t_prime * i as f64 / n as f64).collect();
    let g_inf = ts.iter().map(|&t| pair.g(t).abs()).fold(0.0, f64::max);
    let tg_inf = ts.iter().map(|&t| (t * pair.g(t)).abs()).fold(0.0, f64::max);
    let delta = t_prime / n as f64;
    let g_prime_inf = if pair.singular_at_zero {
        f64::INFINITY
    } else {
        (0..=n)
            .map(|i| 2.0 * delta + (t_prime - 4.0 * delta) * i as f64 / n as f64)
            .map(|t| ((pair.g(t + delta) - pair.g(t - delta)) / (2.0 * delta)).abs())
            .fold(0.0, f64::max)
    };
    SupNorms {
        f_inf: kernel.f_sup(),
        f_prime_inf: SUP_NORM_SAFETY * f_prime_inf,
        g_inf: SUP_NORM_SAFETY * g_inf,
        g_prime_inf: SUP_NORM_SAFETY * g_prime_inf,
        tg_inf: SUP_NORM_SAFETY * tg_inf,
    }
}

/// ‖f‖_{L¹}·tail_g(T′) + tail_f(K)·‖g‖_{L¹}.
pub fn truncation_error_bound(pair: &LaplacePair, kernel: &Kernel, k_max: f64, t_prime: f64) -> Result<f64> {
    Ok(kernel.l1_norm * pair.tail_bound(t_prime) + kernel.tail_mass(k_max)? * pair.l1.value)
}

/// The Riemann-sum error bound for step sizes h_k, h_t.
pub fn quadrature_error_bound(k_max: f64, t_prime: f64, h_k: f64, h_t: f64, s: &SupNorms, a_norm: f64) -> f64 {
    let kt = 2.0 * k_max * t_prime;
    kt * h_k * (s.f_inf * s.tg_inf * a_norm + (s.f_prime_inf + s.f_inf) * s.g_inf)
        + kt * h_t * (2.0 * s.f_inf * s.g_inf * a_norm + s.f_inf * s.g_prime_inf)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorBudget {
    pub truncation_bound: f64,
    /// None where the Riemann bound does not apply (graded grids, unbounded g).
    pub quadrature_bound: Option<f64>,
    pub sup_norms: SupNorms,
    pub a_norm: f64,
    pub total: Option<f64>,
}

/// Budget for a built grid. `a_norm` should include the shift carried by the
/// phase factor.
pub fn error_budget(pair: &LaplacePair, kernel: &Kernel, grid: &QuadratureGrid, a_norm: f64) -> Result<ErrorBudget> {
    if let PairKind::Inhomogeneous { t_final } = pair.kind {
        if grid.t_prime != t_final {
            return Err(Error::Contract(format!(
                "indicator pair needs T' = T = {t_final} so the jump of g sits on the grid boundary (got {})",
                grid.t_prime
            )));
        }
    }
    let sup = sup_norms(pair, kernel, grid.k_max, grid.t_prime);
    let truncation_bound = truncation_error_bound(pair, kernel, grid.k_max, grid.t_prime)?;
    let quadrature_bound = (grid.scheme != Scheme::SqrtGraded && sup.is_finite())
        .then(|| quadrature_error_bound(grid.k_max, grid.t_prime, grid.h_k, grid.h_t, &sup, a_norm));
    Ok(ErrorBudget {
        truncation_bound,
        quadrature_bound,
        sup_norms: sup,
        a_norm,
        total: quadrature_bound.map(|q| q + truncation_bound),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridParameters {
    pub k_max: f64,
    pub t_prime: f64,
    pub m_k: u64,
    pub m_t: u64,
}

/// Truncation and grid sizes from the Lemma-style counts, constants set to 1
/// and scaled by `multiplier`. Counts can be astronomically large; callers
/// check them against a work cap before building anything.
pub fn select_parameters(
    pair: &LaplacePair,
    kernel: &Kernel,
    a_norm: f64,
    eps: f64,
    multiplier: f64,
) -> Result<GridParameters> {
    if !(eps > 0.0) {
        return Err(Error::Contract(format!("eps must be positive, got {eps}")));
    }
    if !(multiplier > 0.0) {
        return Err(Error::Contract("constant multiplier must be positive".into()));
    }
    let k_max = kernel.choose_k(eps / (2.0 * pair.l1.value))?;
    let t_prime = tail_truncation_time(pair, eps / (2.0 * kernel.l1_norm))?;
    let t_prime = if t_prime > 0.0 { t_prime } else { 1.0 };
    let s = sup_norms(pair, kernel, k_max, t_prime);
    let xk = s.f_inf * s.tg_inf * a_norm + (s.f_prime_inf + s.f_inf) * s.g_inf;
    let xt = s.f_inf * s.g_inf * a_norm + s.f_inf * s.g_prime_inf;
    let count = |x: f64| -> Result<u64> {
        let m = (x * multiplier).ceil().max(1.0);
        if !m.is_finite() {
            return Err(Error::Cap(format!(
                "{} pair has unbounded sampled sup norms; the Riemann counts do not exist",
                pair.name()
            )));
        }
        Ok(if m >= u64::MAX as f64 { u64::MAX } else { m as u64 })
    };
    Ok(GridParameters {
        k_max,
        t_prime,
        m_k: count(k_max * k_max * t_prime / eps * xk)?,
        m_t: count(k_max * t_prime * t_prime / eps * xt)?,
    })
}

/// k-step that resolves the oscillation e^{−itkα} over t ≤ T′ (the t-sum
/// is smooth in k with frequencies up to T′α), with log(1/eps) margin.
pub fn resolution_m_k(k_max: f64, t_prime: f64, alpha: f64, eps: f64) -> usize {
    let h_k = 2.0 * std::f64::consts::PI / (t_prime * alpha + (1.0 / eps).ln().max(1.0) + 4.0);
    ((2.0 * k_max / h_k).ceil() as usize).max(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{geometric_breaks, integrate_real, IntegrationOptions};
    use crate::pairs::*;

    fn kern() -> Kernel {
        Kernel::new(0.8).unwrap()
    }

    #[test]
    fn node_layouts() {
        let k = kern();
        let p = pair_inverse_power(1.0, 1.0).unwrap();
        let g = build_grid(&p, &k, 1.0, 1.0, 2, 2, Scheme::Left).unwrap();
        assert_eq!(g.k_nodes, vec![-1.0, 0.0]);
        assert_eq!(g.t_nodes, vec![0.0, 0.5]);
        let g = build_grid(&p, &k, 1.0, 1.0, 2, 2, Scheme::Midpoint).unwrap();
        assert_eq!(g.t_nodes, vec![0.25, 0.75]);
        assert_eq!(g.h_k * g.m_k as f64, 2.0);
        assert_eq!(g.h_t * g.m_t as f64, 1.0);
        let g = build_grid(&p, &k, 1.0, 4.0, 2, 2, Scheme::SqrtGraded).unwrap();
        assert_eq!(g.t_nodes, vec![0.25, 2.25]);
    }

    #[test]
    fn left_rule_rejected_for_singular_pairs() {
        let p = pair_inverse_power(1.0, 0.5).unwrap();
        assert!(matches!(build_grid(&p, &kern(), 1.0, 1.0, 4, 4, Scheme::Left), Err(Error::Contract(_))));
        assert!(build_grid(&p, &kern(), 1.0, 1.0, 4, 4, Scheme::Midpoint).is_ok());
        assert!(build_grid(&p, &kern(), 1.0, 1.0, 0, 4, Scheme::Midpoint).is_err());
    }

    #[test]
    fn c_l1_matches_weight_integral() {
        let k = kern();
        let p = pair_inverse_power(1.0, 1.0).unwrap();
        let g = build_grid(&p, &k, 10.0, 1.0, 4000, 1, Scheme::Left).unwrap();
        let mut breaks: Vec<f64> = geometric_breaks(0.0, 10.0, 0.5).iter().rev().map(|x| -x).collect();
        breaks.pop();
        breaks.extend(geometric_breaks(0.0, 10.0, 0.5));
        let oracle = integrate_real(|x| k.weight(x).norm(), &breaks, IntegrationOptions::default()).unwrap();
        assert!((g.c_l1 - oracle).abs() < 1e-3);
        assert!(g.c_l1 <= k.l1_norm + 0.1);
    }

    #[test]
    fn truncation_bound_properties() {
        let k = kern();
        let ind = pair_inhomogeneous(2.0).unwrap();
        assert!(truncation_error_bound(&ind, &k, 1e5, 2.0).unwrap() < 1e-12);
        let p = pair_inverse_power(1.0, 1.0).unwrap();
        let b = truncation_error_bound(&p, &k, 15.0, 40.0).unwrap();
        // direct tails: ∫_{40}^∞ e^{−t} and 2∫_{15}^∞|f|
        let direct = k.l1_norm * (-40.0f64).exp() + k.tail_mass(15.0).unwrap();
        assert!(b >= direct);
        let mut prev = f64::INFINITY;
        for i in 1..20 {
            let v = truncation_error_bound(&p, &k, 2.0 * i as f64, 3.0 * i as f64).unwrap();
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn quadrature_bound_is_linear_in_steps() {
        let s = SupNorms { f_inf: 0.3, f_prime_inf: 0.4, g_inf: 1.0, g_prime_inf: 2.0, tg_inf: 0.5 };
        let b1 = quadrature_error_bound(5.0, 3.0, 0.1, 0.0, &s, 2.0);
        let b2 = quadrature_error_bound(5.0, 3.0, 0.05, 0.0, &s, 2.0);
        assert!((b1 - 2.0 * b2).abs() < 1e-12 * b1);
        assert_eq!(quadrature_error_bound(5.0, 3.0, 0.0, 0.0, &s, 2.0), 0.0);
    }

    #[test]
    fn indicator_budget_needs_t_prime_equal_t() {
        let k = kern();
        let ind = pair_inhomogeneous(2.0).unwrap();
        let g = build_grid(&ind, &k, 5.0, 3.0, 10, 10, Scheme::Left).unwrap();
        assert!(matches!(error_budget(&ind, &k, &g, 1.0), Err(Error::Contract(_))));
        let g = build_grid(&ind, &k, 5.0, 2.0, 10, 10, Scheme::Left).unwrap();
        let b = error_budget(&ind, &k, &g, 1.0).unwrap();
        assert_eq!(b.sup_norms.g_prime_inf, 0.0);
        assert!(b.total.is_some());
    }

    #[test]
    fn selected_counts_scale_inversely_with_eps() {
        let k = kern();
        let p = pair_inverse_power(1.0, 1.0).unwrap();
        let a = select_parameters(&p, &k, 1.0, 1e-2, 1.0).unwrap();
        let b = select_parameters(&p, &k, 1.0, 5e-3, 1.0).unwrap();
        assert!(b.m_k >= 2 * a.m_k - 1 && b.m_t >= 2 * a.m_t - 1);
        let z = select_parameters(&p, &k, 0.0, 1e-2, 1.0).unwrap();
        assert!(z.m_k < a.m_k);
        let ind = pair_inhomogeneous(2.0).unwrap();
        let s = select_parameters(&ind, &k, 1.0, 1e-2, 1.0).unwrap();
        assert_eq!(s.t_prime, 2.0);
    }

    #[test]
    fn resolution_rule_grows_with_time_window() {
        assert!(resolution_m_k(10.0, 100.0, 1.0, 1e-6) > resolution_m_k(10.0, 10.0, 1.0, 1e-6));
    }
}
