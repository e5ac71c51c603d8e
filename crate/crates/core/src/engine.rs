//! h(A) ≈ Σ_j Σ_l c_j ĉ_l φ(k_j, t_l) e^{−it_l(k_jL+H)}, evaluated one k-node at
//! a time through the eigendecomposition of k_jL + H.
//!
//! For a fixed j the t-sum is diagonal in the eigenbasis, so the whole double
//! sum costs M_k decompositions plus M_k·M_t·n scalar phases. Nodes are
//! grouped in fixed blocks; blocks may run in parallel but are always reduced
//! in index order with compensated sums, so results do not depend on the
//! number of workers.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::linalg::{
    cartesian_decompose, dissipativity_check, hermitian_eigen, matrix_function_oracle, spectral_norm, vec_norm,
    vec_sub, CartesianParts, ComplexMatrix, DiagonalizableTestMatrix, HermitianEigenSystem,
};
use crate::pairs::{
    pair_inhomogeneous, pair_inverse_power, pair_mass_first_no_inverse, pair_mass_first_with_inverse,
    pair_second_order, pair_second_order_mass, tail_truncation_time, LaplacePair, PostOp,
};
use crate::par::map_ordered;
use crate::quadrature::{
    build_grid, error_budget, resolution_m_k, select_parameters, ErrorBudget, QuadratureGrid, Scheme,
};
use crate::summation::CompensatedSum;
use crate::tolerances::{DEFAULT_WORK_CAP, SHIFT_SLACK};

const BLOCK: usize = 16;
// Phases along a uniform t-grid are advanced by multiplication and
// re-anchored from scratch this often.
const REANCHOR: usize = 64;

/// Eigendecompositions of k_j·L + H, one per k-node.
#[derive(Debug, Clone)]
pub struct KEigenCache {
    pub k_nodes: Vec<f64>,
    pub systems: Vec<HermitianEigenSystem>,
}

impl KEigenCache {
    pub fn build(parts: &CartesianParts, k_nodes: &[f64]) -> Result<Self> {
        let systems = map_ordered(k_nodes.len(), |j| hermitian_eigen(&parts.hamiltonian(k_nodes[j])));
        Ok(Self { k_nodes: k_nodes.to_vec(), systems: systems.into_iter().collect::<Result<_>>()? })
    }

    pub fn len(&self) -> usize {
        self.systems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.systems.is_empty()
    }

    /// Largest entrywise reconstruction error of k_jL + H over all nodes.
    pub fn max_reconstruction_error(&self, parts: &CartesianParts) -> f64 {
        self.systems
            .iter()
            .zip(&self.k_nodes)
            .map(|(s, &k)| (&s.reconstruct() - &parts.hamiltonian(k)).max_abs())
            .fold(0.0, f64::max)
    }
}

struct Accumulated {
    matrix: Option<ComplexMatrix>,
    state: Option<Vec<Complex64>>,
}

/// Σ_j coeff_j·V_j diag(d_j) V_j† (and/or its action on psi), where d_j comes
/// from `d_of(j, eigenvalues)`.
fn accumulate<D>(
    n: usize,
    cache: &KEigenCache,
    coeff: &[Complex64],
    d_of: D,
    want_matrix: bool,
    psi: Option<&[Complex64]>,
) -> Accumulated
where
    D: Fn(usize, &[f64]) -> Vec<Complex64> + Sync + Send,
{
    let m = cache.len();
    let blocks = m.div_ceil(BLOCK);
    let msize = if want_matrix { n * n } else { 0 };
    let vsize = if psi.is_some() { n } else { 0 };
    let partial = map_ordered(blocks, |b| {
        let mut acc_m = vec![CompensatedSum::new(); msize];
        let mut acc_v = vec![CompensatedSum::new(); vsize];
        let mut s = vec![Complex64::new(0.0, 0.0); n];
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for j in b * BLOCK..((b + 1) * BLOCK).min(m) {
            let sys = &cache.systems[j];
            let v = &sys.eigenvectors;
            let d = d_of(j, &sys.eigenvalues);
            for (sm, dm) in s.iter_mut().zip(&d) {
                *sm = coeff[j] * dm;
            }
            if want_matrix {
                for a in 0..n {
                    for bcol in 0..n {
                        let mut e = Complex64::new(0.0, 0.0);
                        for (k, sk) in s.iter().enumerate() {
                            e += v[(a, k)] * sk * v[(bcol, k)].conj();
                        }
                        acc_m[a * n + bcol].add(e);
                    }
                }
            }
            if let Some(psi) = psi {
                for (k, yk) in y.iter_mut().enumerate() {
                    let mut e = Complex64::new(0.0, 0.0);
                    for (bi, p) in psi.iter().enumerate() {
                        e += v[(bi, k)].conj() * p;
                    }
                    *yk = s[k] * e;
                }
                for (a, acc) in acc_v.iter_mut().enumerate() {
                    let mut e = Complex64::new(0.0, 0.0);
                    for (k, yk) in y.iter().enumerate() {
                        e += v[(a, k)] * yk;
                    }
                    acc.add(e);
                }
            }
        }
        (acc_m.iter().map(|c| c.value()).collect::<Vec<_>>(), acc_v.iter().map(|c| c.value()).collect::<Vec<_>>())
    });
    let mut tot_m = vec![CompensatedSum::new(); msize];
    let mut tot_v = vec![CompensatedSum::new(); vsize];
    for (pm, pv) in &partial {
        for (t, x) in tot_m.iter_mut().zip(pm) {
            t.add(*x);
        }
        for (t, x) in tot_v.iter_mut().zip(pv) {
            t.add(*x);
        }
    }
    Accumulated {
        matrix: want_matrix.then(|| {
            ComplexMatrix::new(n, n, tot_m.iter().map(|c| c.value()).collect()).expect("square by construction")
        }),
        state: psi.map(|_| tot_v.iter().map(|c| c.value()).collect()),
    }
}

/// d_m = Σ_l ĉ_l e^{−i t_l (λ_m − k·shift)}.
fn t_sums(lams: &[f64], k: f64, shift: f64, grid: &QuadratureGrid) -> Vec<Complex64> {
    let uniform = grid.scheme != Scheme::SqrtGraded;
    lams.iter()
        .map(|&lam| {
            let omega = lam - k * shift;
            let mut sum = CompensatedSum::new();
            if uniform {
                let step = Complex64::from_polar(1.0, -omega * grid.h_t);
                let mut z = Complex64::new(1.0, 0.0);
                for (l, (&t, &ch)) in grid.t_nodes.iter().zip(&grid.c_hat).enumerate() {
                    if l % REANCHOR == 0 {
                        z = Complex64::from_polar(1.0, -omega * t);
                    }
                    sum.add(ch * z);
                    z *= step;
                }
            } else {
                for (&t, &ch) in grid.t_nodes.iter().zip(&grid.c_hat) {
                    sum.add(ch * Complex64::from_polar(1.0, -omega * t));
                }
            }
            sum.value()
        })
        .collect()
}

fn require_dissipative(parts: &CartesianParts) -> Result<()> {
    let d = dissipativity_check(parts)?;
    if !d.is_psd {
        return Err(Error::NotDissipative { min_eig: d.min_eig });
    }
    Ok(())
}

/// Σ_j c_j e^{−it(k_jL+H)} ≈ e^{−At}, on a left-endpoint k-grid.
pub fn lchs_expm(parts: &CartesianParts, t: f64, kernel: &Kernel, k_max: f64, m_k: usize) -> Result<ComplexMatrix> {
    if !(t >= 0.0) {
        return Err(Error::Contract(format!("evolution time must be nonnegative, got {t}")));
    }
    if m_k == 0 || !(k_max > 0.0) {
        return Err(Error::Contract("need K > 0 and M_k >= 1".into()));
    }
    require_dissipative(parts)?;
    let h_k = 2.0 * k_max / m_k as f64;
    let k_nodes: Vec<f64> = (0..m_k).map(|j| -k_max + j as f64 * h_k).collect();
    let c: Vec<Complex64> = k_nodes.iter().map(|&k| kernel.weight(k) * h_k).collect();
    let cache = KEigenCache::build(parts, &k_nodes)?;
    let d_of = |_: usize, lams: &[f64]| lams.iter().map(|&l| Complex64::from_polar(1.0, -l * t)).collect();
    Ok(accumulate(parts.dim(), &cache, &c, d_of, true, None).matrix.expect("requested"))
}

/// Outcome of one transform: the matrix and/or state plus its bookkeeping.
#[derive(Debug, Clone)]
pub struct TransformResult {
    pub pair: &'static str,
    pub matrix: Option<ComplexMatrix>,
    /// Unnormalized h(A)ψ.
    pub state: Option<Vec<Complex64>>,
    pub state_norm: Option<f64>,
    pub normalized_state: Option<Vec<Complex64>>,
    pub error_vs_oracle: Option<f64>,
    pub budget: ErrorBudget,
    pub grid: QuadratureGrid,
    /// Σ|c_j|·Σ|ĉ_l|, plus 1 when the identity is added back.
    pub alpha: f64,
    pub refinements: Vec<Refinement>,
}

/// One step of the adaptive M_t doubling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Refinement {
    pub m_k: usize,
    pub m_t: usize,
    pub cauchy_difference: f64,
}

fn check_transform_inputs(parts: &CartesianParts, pair: &LaplacePair, grid: &QuadratureGrid, cache: &KEigenCache) -> Result<()> {
    require_dissipative(parts)?;
    if pair.gamma() > parts.gamma + SHIFT_SLACK {
        return Err(Error::Contract(format!(
            "{} pair shifts by gamma = {} but the spectrum of L only starts at {}; \
             the shifted evolution would not be dissipative",
            pair.name(),
            pair.gamma(),
            parts.gamma
        )));
    }
    if cache.k_nodes != grid.k_nodes {
        return Err(Error::Contract("eigen cache was built for a different k-grid".into()));
    }
    Ok(())
}

fn raw_transform(
    parts: &CartesianParts,
    pair: &LaplacePair,
    kernel: &Kernel,
    grid: &QuadratureGrid,
    cache: &KEigenCache,
    want_matrix: bool,
    psi: Option<&[Complex64]>,
) -> Result<TransformResult> {
    check_transform_inputs(parts, pair, grid, cache)?;
    let n = parts.dim();
    if let Some(p) = psi {
        if p.len() != n {
            return Err(Error::Dimension(format!("state has length {} but A is {n}x{n}", p.len())));
        }
    }
    let shift = pair.shift;
    let d_of = |j: usize, lams: &[f64]| t_sums(lams, grid.k_nodes[j], shift, grid);
    let mut acc = accumulate(n, cache, &grid.c, d_of, want_matrix, psi);
    let add_id = pair.post_op == PostOp::AddIdentity;
    if add_id {
        if let Some(m) = acc.matrix.as_mut() {
            *m = m.shift_diag(Complex64::new(1.0, 0.0));
        }
        if let (Some(s), Some(p)) = (acc.state.as_mut(), psi) {
            s.iter_mut().zip(p).for_each(|(x, y)| *x += y);
        }
    }
    let budget = error_budget(pair, kernel, grid, parts.alpha_a + shift)?;
    let state_norm = acc.state.as_ref().map(|s| vec_norm(s));
    let normalized_state = match (&acc.state, state_norm) {
        (Some(s), Some(nrm)) if nrm > 0.0 => Some(s.iter().map(|z| z / nrm).collect()),
        _ => None,
    };
    Ok(TransformResult {
        pair: pair.name(),
        matrix: acc.matrix,
        state: acc.state,
        state_norm,
        normalized_state,
        error_vs_oracle: None,
        budget,
        grid: grid.clone(),
        alpha: grid.c_l1 * grid.c_hat_l1 + if add_id { 1.0 } else { 0.0 },
        refinements: Vec::new(),
    })
}

/// The full matrix h(A) (target function of A for shifted pairs).
pub fn lap_lchs_matrix(
    parts: &CartesianParts,
    pair: &LaplacePair,
    kernel: &Kernel,
    grid: &QuadratureGrid,
    cache: &KEigenCache,
) -> Result<TransformResult> {
    raw_transform(parts, pair, kernel, grid, cache, true, None)
}

/// h(A)ψ for a unit vector ψ, without forming the matrix.
pub fn lap_lchs_apply(
    parts: &CartesianParts,
    pair: &LaplacePair,
    kernel: &Kernel,
    grid: &QuadratureGrid,
    cache: &KEigenCache,
    psi: &[Complex64],
) -> Result<TransformResult> {
    let nrm = vec_norm(psi);
    if (nrm - 1.0).abs() > 1e-12 {
        return Err(Error::Contract(format!("state must be normalized, got norm {nrm}")));
    }
    raw_transform(parts, pair, kernel, grid, cache, false, Some(psi))
}

/// Partially specified grid. Missing entries are chosen by the policy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct GridSpec {
    pub k_max: Option<f64>,
    pub t_prime: Option<f64>,
    pub m_k: Option<usize>,
    pub m_t: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum GridPolicy {
    /// Counts from the a-priori Riemann bound, constants 1 times the multiplier.
    Lemma { multiplier: f64 },
    /// K and T′ from the tails; M_k from the k-resolution rule; M_t doubled
    /// until successive results differ by at most eps/2. Given fields are kept.
    Adaptive(GridSpec),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub beta: f64,
    pub policy: GridPolicy,
    pub scheme: Option<Scheme>,
    /// Overrides the γ read off the spectrum of L.
    pub gamma: Option<f64>,
    pub oracle: bool,
    /// Also form the full matrix when a state is given.
    pub materialize: bool,
    /// Upper limit on M_k·M_t·n.
    pub work_cap: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            beta: crate::kernel::DEFAULT_BETA,
            policy: GridPolicy::Adaptive(GridSpec::default()),
            scheme: None,
            gamma: None,
            oracle: true,
            materialize: false,
            work_cap: DEFAULT_WORK_CAP,
        }
    }
}

fn check_work(m_k: f64, m_t: f64, n: usize, cap: f64) -> Result<()> {
    let work = m_k * m_t * n as f64;
    if work > cap {
        return Err(Error::Cap(format!(
            "grid M_k = {m_k:.3e}, M_t = {m_t:.3e} needs {work:.3e} phase evaluations, above the cap {cap:.1e}; \
             loosen eps, pass an explicit grid, or use a shifted pair"
        )));
    }
    Ok(())
}

/// Evaluate `pair` on A under the chosen grid policy.
pub fn transform(
    a: &ComplexMatrix,
    psi: Option<&[Complex64]>,
    pair: &LaplacePair,
    eps: f64,
    opts: &SolveOptions,
) -> Result<TransformResult> {
    let parts = cartesian_decompose(a)?;
    let parts = match opts.gamma {
        Some(g) => parts.with_gamma(g),
        None => parts,
    };
    transform_parts(a, &parts, psi, pair, eps, opts)
}

fn transform_parts(
    a: &ComplexMatrix,
    parts: &CartesianParts,
    psi: Option<&[Complex64]>,
    pair: &LaplacePair,
    eps: f64,
    opts: &SolveOptions,
) -> Result<TransformResult> {
    if !(eps > 0.0) {
        return Err(Error::Contract(format!("eps must be positive, got {eps}")));
    }
    require_dissipative(parts)?;
    let n = parts.dim();
    // Solvers accept any nonzero state; the transform is linear.
    let (unit, scale) = match psi {
        Some(p) => {
            if p.len() != n {
                return Err(Error::Dimension(format!("state has length {} but A is {n}x{n}", p.len())));
            }
            let nrm = vec_norm(p);
            if nrm == 0.0 {
                return Err(Error::Contract("state is the zero vector".into()));
            }
            (Some(p.iter().map(|z| z / nrm).collect::<Vec<_>>()), nrm)
        }
        None => (None, 1.0),
    };
    let want_matrix = psi.is_none() || opts.materialize;
    let kernel = Kernel::new(opts.beta)?;
    let scheme = opts.scheme.unwrap_or_else(|| Scheme::default_for(pair));
    let eval = |grid: &QuadratureGrid| -> Result<TransformResult> {
        let cache = KEigenCache::build(parts, &grid.k_nodes)?;
        raw_transform(parts, pair, &kernel, grid, &cache, want_matrix, unit.as_deref())
    };
    let mut result = match opts.policy {
        GridPolicy::Lemma { multiplier } => {
            let p = select_parameters(pair, &kernel, parts.alpha_a + pair.shift, eps, multiplier)?;
            check_work(p.m_k as f64, p.m_t as f64, n, opts.work_cap)?;
            let grid = build_grid(pair, &kernel, p.k_max, p.t_prime, p.m_k as usize, p.m_t as usize, scheme)?;
            eval(&grid)?
        }
        GridPolicy::Adaptive(spec) => adaptive(parts, pair, &kernel, eps, spec, scheme, opts.work_cap, &eval)?,
    };
    if scale != 1.0 {
        if let Some(s) = result.state.as_mut() {
            s.iter_mut().for_each(|z| *z *= scale);
            result.state_norm = Some(vec_norm(s));
        }
    }
    if opts.oracle {
        result.error_vs_oracle = Some(oracle_error(a, pair, &result, psi)?);
    }
    Ok(result)
}

fn adaptive(
    parts: &CartesianParts,
    pair: &LaplacePair,
    kernel: &Kernel,
    eps: f64,
    spec: GridSpec,
    scheme: Scheme,
    work_cap: f64,
    eval: &dyn Fn(&QuadratureGrid) -> Result<TransformResult>,
) -> Result<TransformResult> {
    let n = parts.dim();
    let k_max = match spec.k_max {
        Some(k) => k,
        None => kernel.choose_k(eps / (4.0 * pair.l1.value))?,
    };
    let t_prime = match spec.t_prime {
        Some(t) => t,
        None => {
            let t = tail_truncation_time(pair, eps / (4.0 * kernel.l1_norm))?;
            if t > 0.0 {
                t
            } else {
                1.0
            }
        }
    };
    let m_k = spec.m_k.unwrap_or_else(|| resolution_m_k(k_max, t_prime, parts.alpha_l, eps));
    let build = |m_t: usize| {
        check_work(m_k as f64, m_t as f64, n, work_cap)?;
        build_grid(pair, kernel, k_max, t_prime, m_k, m_t, scheme)
    };
    if let Some(m_t) = spec.m_t {
        return eval(&build(m_t)?);
    }
    // Start near the Nyquist count of the fastest t-oscillation.
    let freq = k_max * parts.alpha_l + parts.alpha_h + k_max * pair.shift;
    let mut m_t = ((t_prime * freq / std::f64::consts::PI).ceil() as usize).max(16);
    let mut prev = eval(&build(m_t)?)?;
    let mut steps = Vec::new();
    loop {
        m_t *= 2;
        let next = eval(&build(m_t)?)?;
        let diff = difference(&prev, &next);
        steps.push(Refinement { m_k, m_t, cauchy_difference: diff });
        if diff <= 0.5 * eps {
            let mut out = next;
            out.refinements = steps;
            return Ok(out);
        }
        prev = next;
    }
}

fn difference(a: &TransformResult, b: &TransformResult) -> f64 {
    match (&a.state, &b.state, &a.matrix, &b.matrix) {
        (Some(x), Some(y), _, _) => vec_norm(&vec_sub(x, y)),
        (_, _, Some(x), Some(y)) => spectral_norm(&(x - y)),
        _ => f64::INFINITY,
    }
}

/// Spectral-norm (or vector-norm) deviation from V·target(D)·V⁻¹.
pub fn oracle_error(
    a: &ComplexMatrix,
    pair: &LaplacePair,
    result: &TransformResult,
    psi: Option<&[Complex64]>,
) -> Result<f64> {
    let tm = DiagonalizableTestMatrix::from_matrix(a)?;
    let exact = matrix_function_oracle(&tm, |z| pair.target(z))?;
    if let (Some(s), Some(p)) = (&result.state, psi) {
        return Ok(vec_norm(&vec_sub(s, &exact.try_matvec(p)?)));
    }
    match &result.matrix {
        Some(m) => Ok(spectral_norm(&(m - &exact))),
        None => Err(Error::Contract("nothing to compare against the oracle".into())),
    }
}

/// u(T) = ∫₀^T e^{−A(T−s)}ψ ds.
pub fn solve_inhomogeneous(
    a: &ComplexMatrix,
    psi: Option<&[Complex64]>,
    t_final: f64,
    eps: f64,
    opts: &SolveOptions,
) -> Result<TransformResult> {
    transform(a, psi, &pair_inhomogeneous(t_final)?, eps, opts)
}

/// (ηI + A)^{−p}ψ.
pub fn apply_inverse_power(
    a: &ComplexMatrix,
    psi: Option<&[Complex64]>,
    eta: f64,
    p: f64,
    eps: f64,
    opts: &SolveOptions,
) -> Result<TransformResult> {
    transform(a, psi, &pair_inverse_power(eta, p)?, eps, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MassMode {
    /// e^{−TA⁻¹}A⁻¹u₀.
    WithInverse,
    /// e^{−TA⁻¹}u₀, with the identity added back.
    NoInverse,
}

fn gamma_for(a: &ComplexMatrix, opts: &SolveOptions) -> Result<(CartesianParts, f64)> {
    let parts = cartesian_decompose(a)?;
    let gamma = opts.gamma.unwrap_or(parts.gamma);
    if !(gamma > 0.0) {
        return Err(Error::Contract(format!(
            "this solver needs L ⪰ γI with γ > 0 (got γ = {gamma}); the shifted pair is not integrable otherwise"
        )));
    }
    Ok((parts.with_gamma(gamma), gamma))
}

pub fn solve_mass_first(
    a: &ComplexMatrix,
    u0: Option<&[Complex64]>,
    t_final: f64,
    mode: MassMode,
    eps: f64,
    opts: &SolveOptions,
) -> Result<TransformResult> {
    let (parts, gamma) = gamma_for(a, opts)?;
    let pair = match mode {
        MassMode::WithInverse => pair_mass_first_with_inverse(t_final, gamma)?,
        MassMode::NoInverse => pair_mass_first_no_inverse(t_final, gamma)?,
    };
    transform_parts(a, &parts, u0, &pair, eps, opts)
}

/// e^{−T√A}u₀, principal square root.
pub fn solve_second_order(
    a: &ComplexMatrix,
    u0: Option<&[Complex64]>,
    t_final: f64,
    shifted: bool,
    eps: f64,
    opts: &SolveOptions,
) -> Result<TransformResult> {
    if shifted {
        let (parts, gamma) = gamma_for(a, opts)?;
        transform_parts(a, &parts, u0, &pair_second_order(t_final, gamma)?, eps, opts)
    } else {
        transform(a, u0, &pair_second_order(t_final, 0.0)?, eps, opts)
    }
}

/// e^{−T·A^{−1/2}}u₀.
pub fn solve_second_order_mass(
    a: &ComplexMatrix,
    u0: Option<&[Complex64]>,
    t_final: f64,
    eps: f64,
    opts: &SolveOptions,
) -> Result<TransformResult> {
    let (parts, gamma) = gamma_for(a, opts)?;
    transform_parts(a, &parts, u0, &pair_second_order_mass(t_final, gamma)?, eps, opts)
}
