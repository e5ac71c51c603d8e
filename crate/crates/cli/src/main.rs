use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "lap-lchs", version, about = "Eigenvalue transformations h(A) via Laplace-weighted Hamiltonian simulation, checked against exact oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for generated matrices.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Suppress wall-clock columns so identical inputs give identical bytes.
    #[arg(long, global = true)]
    deterministic: bool,

    /// Worker threads for the engine (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Write to this file instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a seeded test matrix in the shared JSON format.
    GenMatrix {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        kind: MatrixKind,
        /// Lower edge of the spectrum of the real part.
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
    },
    /// Apply a Laplace pair to a matrix (and optionally a state); JSON out.
    Transform {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        /// Use the literal Riemann-bound grid counts instead of the adaptive policy.
        #[arg(long)]
        lemma_grid: bool,
        #[arg(long, default_value_t = 1.0)]
        constant_multiplier: f64,
    },
    /// Error and bounds under repeated dyadic refinement of (M_k, M_t); CSV out.
    Converge {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        /// Number of grids (each doubles both counts).
        #[arg(long, default_value_t = 4)]
        levels: usize,
    },
    /// Kernel normalization, truncation and discrete-sum check; CSV out.
    KernelCheck {
        #[arg(long, default_value_t = 0.8)]
        beta: f64,
        #[arg(long, default_value_t = 1e-8)]
        eps: f64,
        /// Midpoint nodes for the discrete sum.
        #[arg(long, default_value_t = 100_000)]
        mk: usize,
    },
    /// Compare the numeric Laplace transform of g with h at sample points; CSV out.
    PairCheck {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Explicit LCU simulation residuals on a small system; JSON out.
    LcuVerify {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        mk: usize,
        #[arg(long, default_value_t = 4)]
        mt: usize,
        #[arg(long, default_value_t = 4.0)]
        k_max: f64,
        #[arg(long, default_value_t = 3.0)]
        t_prime: f64,
        #[arg(long, default_value_t = 0.8)]
        beta: f64,
        #[arg(long)]
        scheme: Option<String>,
    },
    /// Query-count shapes (JSON) or a comparison table (CSV).
    Estimate(EstimateArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
#[value(rename_all = "snake_case")]
enum MatrixKind {
    HermitianPsd,
    Dissipative,
    TestDiagonalizable,
}

#[derive(Args, Debug, Clone)]
struct PairArgs {
    /// inhomogeneous, inverse-power, mass-with-inverse, mass-no-inverse, second-order, second-order-mass
    #[arg(long)]
    pair: String,
    #[arg(long = "t-final", default_value_t = 1.0)]
    t_final: f64,
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Shift γ; read off the spectrum of the real part when omitted.
    #[arg(long)]
    gamma: Option<f64>,
    /// Shifted variant of the second-order pair.
    #[arg(long)]
    shifted: bool,
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    #[arg(long, default_value_t = 0.8)]
    beta: f64,
    #[arg(long)]
    mk: Option<usize>,
    #[arg(long)]
    mt: Option<usize>,
    #[arg(long)]
    k_max: Option<f64>,
    #[arg(long)]
    t_prime: Option<f64>,
    /// left, midpoint or sqrt-graded
    #[arg(long)]
    scheme: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct EstimateArgs {
    /// cor7, cor9, cor10, cor11, cor12, cor13, block-encoding or state-prep
    #[arg(long, conflicts_with = "table", required_unless_present = "table")]
    app: Option<String>,
    /// table1 or table2
    #[arg(long)]
    table: Option<String>,
    /// name=start:end:count
    #[arg(long, requires = "table")]
    sweep: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    alpha_a: f64,
    #[arg(long = "t-final", default_value_t = 1.0)]
    t_final: f64,
    #[arg(long, default_value_t = 1.0)]
    k_max: f64,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, default_value_t = 1.0)]
    l1_f: f64,
    #[arg(long, default_value_t = 1.0)]
    l1_g: f64,
    /// ‖h(A)ψ‖, i.e. ‖u(T)‖ or ‖x‖ for the applications.
    #[arg(long, default_value_t = 1.0)]
    output_norm: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 0.8)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    u0_norm: f64,
    #[arg(long, default_value_t = 1.0)]
    u_max: f64,
    #[arg(long)]
    a_inv_norm: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    constant_multiplier: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
