use std::fmt::Write as _;
use std::time::Instant;

use lap_lchs::cost::{self, CostModel, Sweep, Table};
use lap_lchs::engine::{transform, GridPolicy, GridSpec, SolveOptions, TransformResult};
use lap_lchs::kernel::Kernel;
use lap_lchs::lcu::{assemble_lcu, build_prepare_pair, build_select, build_tklh_chain, direct_lcu_sum, postselection_stats};
use lap_lchs::linalg::io::{matrix_to_json, read_matrix, read_vector};
use lap_lchs::linalg::testmat::{dissipative, hermitian_psd, DiagonalizableTestMatrix};
use lap_lchs::linalg::{cartesian_decompose, spectral_norm, vec_norm, ComplexMatrix};
use lap_lchs::pairs::{pair_by_name, pair_validate, standard_z_samples, LaplacePair};
use lap_lchs::quadrature::{build_grid, Scheme};
use lap_lchs::summation::CompensatedSum;
use lap_lchs::{Complex64, Error, Result};
use serde_json::{json, Value};

use crate::{Cli, Command, EstimateArgs, GridArgs, MatrixKind, PairArgs};

const MAX_GEN_DIM: usize = 64;
const LCU_TOL: f64 = 1e-10;

pub fn run(cli: &Cli) -> Result<()> {
    let text = match &cli.command {
        Command::GenMatrix { n, kind, gamma } => gen_matrix(*n, *kind, *gamma, cli.seed)?,
        Command::Transform { pair, grid, matrix, state, eps, lemma_grid, constant_multiplier } => {
            let a = read_matrix(matrix)?;
            let psi = state.as_deref().map(read_vector).transpose()?;
            let pair = resolve_pair(pair, Some(&a))?;
            let mut opts = solve_options(grid)?;
            if *lemma_grid {
                opts.policy = GridPolicy::Lemma { multiplier: *constant_multiplier };
            }
            let r = transform(&a, psi.as_deref(), &pair, *eps, &opts)?;
            pretty(&transform_json(&r, *eps))
        }
        Command::Converge { pair, grid, matrix, eps, levels } => {
            let a = read_matrix(matrix)?;
            let pair = resolve_pair(pair, Some(&a))?;
            converge(&a, &pair, grid, *eps, *levels, cli.deterministic)?
        }
        Command::KernelCheck { beta, eps, mk } => kernel_check(*beta, *eps, *mk)?,
        Command::PairCheck { pair, tol } => pair_check(pair, *tol)?,
        Command::LcuVerify { pair, matrix, state, mk, mt, k_max, t_prime, beta, scheme } => {
            let a = read_matrix(matrix)?;
            let pair = resolve_pair(pair, Some(&a))?;
            let psi = state.as_deref().map(read_vector).transpose()?;
            let scheme = match scheme {
                Some(s) => Scheme::parse(s)?,
                None => Scheme::default_for(&pair),
            };
            lcu_verify(&a, &pair, psi, *mk, *mt, *k_max, *t_prime, *beta, scheme)?
        }
        Command::Estimate(args) => estimate(args)?,
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("plain JSON values serialize") + "\n"
}

fn check_failed(what: String) -> Error {
    Error::Convergence(format!("check failed: {what}"))
}

fn gen_matrix(n: usize, kind: MatrixKind, gamma: f64, seed: u64) -> Result<String> {
    if n == 0 || n > MAX_GEN_DIM {
        return Err(Error::Contract(format!("n must lie in 1..={MAX_GEN_DIM}, got {n}")));
    }
    if !(gamma >= 0.0) {
        return Err(Error::Contract(format!("gamma must be nonnegative, got {gamma}")));
    }
    let m = match kind {
        MatrixKind::HermitianPsd => hermitian_psd(n, gamma, gamma + 1.0, seed)?,
        MatrixKind::Dissipative => dissipative(n, gamma, 1.0, 0.5, seed)?,
        MatrixKind::TestDiagonalizable => DiagonalizableTestMatrix::seeded(n, gamma, gamma + 1.0, 0.5, 4.0, seed).matrix(),
    };
    Ok(matrix_to_json(&m) + "\n")
}

fn needs_gamma(args: &PairArgs) -> bool {
    matches!(args.pair.as_str(), "mass-with-inverse" | "mass-no-inverse" | "second-order-mass")
        || (args.pair == "second-order" && args.shifted)
}

/// Build the pair, reading γ off the real part of `a` when it is needed and
/// not given.
fn resolve_pair(args: &PairArgs, a: Option<&ComplexMatrix>) -> Result<LaplacePair> {
    if args.shifted && args.pair != "second-order" {
        return Err(Error::Contract("--shifted only applies to the second-order pair".into()));
    }
    let gamma = if needs_gamma(args) {
        match (args.gamma, a) {
            (Some(g), _) => g,
            (None, Some(a)) => cartesian_decompose(a)?.gamma,
            (None, None) => 0.5,
        }
    } else {
        0.0
    };
    pair_by_name(&args.pair, args.t_final, args.eta, args.p, gamma)
}

fn solve_options(g: &GridArgs) -> Result<SolveOptions> {
    let scheme = g.scheme.as_deref().map(Scheme::parse).transpose()?;
    Ok(SolveOptions {
        beta: g.beta,
        policy: GridPolicy::Adaptive(GridSpec { k_max: g.k_max, t_prime: g.t_prime, m_k: g.mk, m_t: g.mt }),
        scheme,
        ..SolveOptions::default()
    })
}

fn matrix_value(m: &ComplexMatrix) -> Value {
    serde_json::from_str(&matrix_to_json(m)).expect("writer emits valid JSON")
}

fn column_value(v: &[Complex64]) -> Value {
    matrix_value(&ComplexMatrix::column(v))
}

fn transform_json(r: &TransformResult, eps: f64) -> Value {
    json!({
        "pair": r.pair,
        "eps": eps,
        "alpha": r.alpha,
        "error_vs_oracle": r.error_vs_oracle,
        "grid": {
            "k_max": r.grid.k_max, "t_prime": r.grid.t_prime,
            "m_k": r.grid.m_k, "m_t": r.grid.m_t, "scheme": r.grid.scheme,
        },
        "budget": r.budget,
        "refinements": r.refinements,
        "matrix": r.matrix.as_ref().map(matrix_value),
        "state": r.state.as_deref().map(column_value),
        "state_norm": r.state_norm,
        "normalized_state": r.normalized_state.as_deref().map(column_value),
    })
}

pub const CONVERGE_HEADER: &str = "K,T_prime,M_k,M_t,measured_error,truncation_bound,quadrature_bound,wall_time_ms";

fn converge(a: &ComplexMatrix, pair: &LaplacePair, g: &GridArgs, eps: f64, levels: usize, deterministic: bool) -> Result<String> {
    if levels == 0 {
        return Err(Error::Contract("--levels must be at least 1".into()));
    }
    let mut opts = solve_options(g)?;
    // Fix the coarsest grid first, then double both counts per level.
    let base = match (g.k_max, g.t_prime, g.mk, g.mt) {
        (Some(k), Some(t), Some(mk), Some(mt)) => GridSpec { k_max: Some(k), t_prime: Some(t), m_k: Some(mk), m_t: Some(mt) },
        _ => {
            let probe = transform(a, None, pair, eps, &SolveOptions { oracle: false, ..opts })?;
            GridSpec {
                k_max: Some(probe.grid.k_max),
                t_prime: Some(probe.grid.t_prime),
                m_k: Some(probe.grid.m_k),
                m_t: Some(probe.grid.m_t),
            }
        }
    };
    let mut out = String::new();
    writeln!(out, "{CONVERGE_HEADER}").unwrap();
    for level in 0..levels {
        let spec = GridSpec {
            m_k: base.m_k.map(|m| m << level),
            m_t: base.m_t.map(|m| m << level),
            ..base
        };
        opts.policy = GridPolicy::Adaptive(spec);
        let start = Instant::now();
        let r = transform(a, None, pair, eps, &opts)?;
        let ms = if deterministic { 0.0 } else { start.elapsed().as_secs_f64() * 1e3 };
        let q = r.budget.quadrature_bound.map(|q| format!("{q:.6e}")).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{:.6e},{:.6e},{q},{ms:.1}",
            r.grid.k_max,
            r.grid.t_prime,
            r.grid.m_k,
            r.grid.m_t,
            r.error_vs_oracle.unwrap_or(f64::NAN),
            r.budget.truncation_bound
        )
        .unwrap();
    }
    Ok(out)
}

pub const KERNEL_HEADER: &str = "beta,eps,norm_constant_re,norm_constant_im,k_max,tail_mass,m_k,sum_deviation";

fn kernel_check(beta: f64, eps: f64, m_k: usize) -> Result<String> {
    if m_k == 0 {
        return Err(Error::Contract("--mk must be at least 1".into()));
    }
    let kernel = Kernel::new(beta)?;
    let k_max = kernel.choose_k(eps)?;
    let tail = kernel.tail_mass(k_max)?;
    let h = 2.0 * k_max / m_k as f64;
    let mut s = CompensatedSum::new();
    for j in 0..m_k {
        s.add(kernel.weight(-k_max + (j as f64 + 0.5) * h) * h);
    }
    let dev = (s.value() - 1.0).norm();
    Ok(format!(
        "{KERNEL_HEADER}\n{beta},{eps:e},{:.16e},{:.16e},{k_max},{tail:.6e},{m_k},{dev:.6e}\n",
        kernel.norm_constant.re, kernel.norm_constant.im
    ))
}

pub const PAIR_HEADER: &str = "pair,z_re,z_im,numeric_re,numeric_im,reference_re,reference_im,deviation,pass";

fn pair_check(args: &PairArgs, tol: f64) -> Result<String> {
    let pair = resolve_pair(args, None)?;
    let rep = pair_validate(&pair, &standard_z_samples(), tol)?;
    let mut out = String::new();
    writeln!(out, "{PAIR_HEADER}").unwrap();
    for r in &rep.rows {
        writeln!(
            out,
            "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.3e},{}",
            rep.pair, r.z[0], r.z[1], r.numeric[0], r.numeric[1], r.reference[0], r.reference[1], r.deviation, r.pass
        )
        .unwrap();
    }
    if !rep.pass {
        eprint!("{out}");
        return Err(check_failed(format!("{} deviates by {:.3e} > {tol:e}", rep.pair, rep.max_deviation)));
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn lcu_verify(
    a: &ComplexMatrix,
    pair: &LaplacePair,
    psi: Option<Vec<Complex64>>,
    m_k: usize,
    m_t: usize,
    k_max: f64,
    t_prime: f64,
    beta: f64,
    scheme: Scheme,
) -> Result<String> {
    let parts = cartesian_decompose(a)?;
    let kernel = Kernel::new(beta)?;
    let grid = build_grid(pair, &kernel, k_max, t_prime, m_k, m_t, scheme)?;
    let select = build_select(&grid, &parts, pair)?;
    let asm = assemble_lcu(&build_prepare_pair(&grid.c)?, &build_prepare_pair(&grid.c_hat)?, &select)?;
    let direct = direct_lcu_sum(&grid, &parts, pair)?;
    let residual = spectral_norm(&(&asm.top_left_block.scale_real(asm.alpha) - &direct));

    let denom = t_prime * (parts.alpha_l * k_max + parts.alpha_h);
    let mut chain = 0.0f64;
    if parts.dim() <= 8 {
        for &k in &grid.k_nodes {
            for &t in &grid.t_nodes {
                let block = build_tklh_chain(&parts, k_max, t_prime, k, t)?;
                chain = chain.max(spectral_norm(&(&block - &parts.hamiltonian(k).scale_real(t / denom))));
            }
        }
    }
    let n = parts.dim();
    let psi = psi.unwrap_or_else(|| vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n]);
    let nrm = vec_norm(&psi);
    if nrm == 0.0 {
        return Err(Error::Contract("state is the zero vector".into()));
    }
    let unit: Vec<Complex64> = psi.iter().map(|z| z / nrm).collect();
    let stats = postselection_stats(&asm, &unit)?;
    let out = pretty(&json!({
        "pair": pair.name(),
        "m_k": m_k, "m_t": m_t, "k_max": k_max, "t_prime": t_prime,
        "alpha": asm.alpha,
        "assembly_residual": residual,
        "chain_residual": if n <= 8 { json!(chain) } else { Value::Null },
        "postselection": stats,
    }));
    if residual > LCU_TOL || chain > LCU_TOL {
        eprint!("{out}");
        return Err(check_failed(format!("LCU residuals {residual:.3e}, {chain:.3e} exceed {LCU_TOL:e}")));
    }
    Ok(out)
}

fn estimate(args: &EstimateArgs) -> Result<String> {
    let model = CostModel {
        alpha_a: args.alpha_a,
        t_final: args.t_final,
        k_max: args.k_max,
        eps: args.eps,
        l1_f: args.l1_f,
        l1_g: args.l1_g,
        h_psi_norm: args.output_norm,
        gamma: args.gamma,
        eta: args.eta,
        p: args.p,
        beta: args.beta,
        u0_norm: args.u0_norm,
        u_max: args.u_max,
        a_inv_norm: args.a_inv_norm,
        multiplier: args.constant_multiplier,
    };
    if let Some(table) = &args.table {
        let table = Table::parse(table)?;
        let sweep = args.sweep.as_deref().map(Sweep::parse).transpose()?;
        let rows = cost::comparison_table(table, &model, sweep.as_ref())?;
        let name = sweep.as_ref().map(|s| s.param.as_str()).unwrap_or("none");
        // CSV starts with its header row, so the caveat goes to stderr
        eprintln!("note: {}", cost::SHAPE_NOTICE);
        return Ok(cost::comparison_csv(&rows, name));
    }
    let app = args.app.as_deref().expect("clap requires --app or --table");
    let report = match app {
        "block-encoding" => cost::cost_block_encoding(&model)?,
        "state-prep" => cost::cost_state_prep(&model)?,
        other => cost::cost_application(other, &model)?,
    };
    Ok(pretty(&serde_json::to_value(report).expect("report serializes")))
}
