use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "dwit", version, about = "Evaluate the four-copy quantum discord witness and its bounds")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Seed for generators, optimizer restarts and shot sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Tolerance on |ρ - ρ^H| when validating input states.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_herm: f64,

    /// Tolerance on |Tr ρ - 1|.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_trace: f64,

    /// Most negative eigenvalue accepted (and clamped) in input states.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_psd: f64,

    /// Eigenvalues below this count as zero in entropies.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol_spec: f64,

    /// Largest four-copy dimension evaluated by index contraction.
    #[arg(long, global = true, default_value_t = discord_witness::DEFAULT_SIZE_CAP)]
    pub size_cap: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for sweeps and shot sampling (all cores when unset).
    #[arg(long, global = true, env = "DWIT_THREADS")]
    pub threads: Option<usize>,

    /// Include wall-clock timings (makes reports differ between runs).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Exactly one source for the input state.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct InputArgs {
    /// State file in the `{"dims": [dA, dB], "matrix": ...}` format.
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Generated state: bell, werner:P, mixed:DAxDB, random:DAxDB[:RANK], cq:DAxDB.
    #[arg(long = "gen", value_name = "SPEC")]
    pub generator: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    RMatrix,
    Permutation,
    Circuit,
    TwoSetting,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CircuitMode {
    Exact,
    Sampled,
    TwoSetting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Werner,
    Random,
    Cq,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate Tr(Wρ⊗4) by one or more routes and cross-check them.
    Witness {
        #[command(flatten)]
        input: InputArgs,

        #[arg(long, value_enum, value_delimiter = ',', default_value = "r-matrix")]
        route: Vec<RouteArg>,
    },
    /// Entropies, Q(ρ) and the discord and geometric-discord lower bounds.
    Bounds {
        #[command(flatten)]
        input: InputArgs,

        /// Also run the brute-force oracles and report the gaps.
        #[arg(long)]
        oracle: bool,

        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },
    /// Brute-force discord and geometric discord over von Neumann measurements.
    Oracle {
        #[command(flatten)]
        input: InputArgs,

        #[arg(long, default_value_t = 32)]
        restarts: usize,

        /// Cross-check qubit optimizations on a Bloch-sphere grid.
        #[arg(long)]
        grid: bool,
    },
    /// The one-clean-qubit output state and its closed-form witness.
    Dqc1 {
        /// Number of register qubits.
        #[arg(long)]
        n: usize,

        /// Polarization of the clean qubit.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,

        /// identity, hadamard-tensor, fourier, random:SEED or diag:DEG,DEG,...
        #[arg(long, required_unless_present = "unitary_file", conflicts_with = "unitary_file")]
        unitary: Option<String>,

        /// Unitary in the state-file matrix format.
        #[arg(long)]
        unitary_file: Option<PathBuf>,

        /// Also run the discord oracle on the output state.
        #[arg(long)]
        oracle: bool,
    },
    /// Simulate the ancilla circuit or the two-setting measurement.
    Circuit {
        #[command(flatten)]
        input: InputArgs,

        #[arg(long, value_enum, default_value_t = CircuitMode::Exact)]
        mode: CircuitMode,

        #[arg(long, default_value_t = 100_000)]
        shots: u64,
    },
    /// Evaluate a family of states and summarize invariant violations.
    Sweep {
        #[arg(long, value_enum)]
        family: Family,

        #[arg(long, default_value_t = 21)]
        count: usize,

        #[arg(long = "dA", default_value_t = 2)]
        d_a: usize,

        #[arg(long = "dB", default_value_t = 2)]
        d_b: usize,

        /// Rank of random states; cycles through all ranks when omitted.
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Write a generated state as a state file.
    Gen {
        #[arg(long = "gen", value_name = "SPEC")]
        generator: String,
    },
}
