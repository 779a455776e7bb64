use discord_witness::circuit::{
    exact_ancilla_expectations, reconstruct_witness, sample_circuit, two_setting_measurement, ShotRecord,
    TwoSettingResult,
};
use discord_witness::dqc1::{self, Dqc1Config, NormalizedTrace, SquarePhaseFit, UnitarySpec};
use discord_witness::linalg::von_neumann_entropy_with;
use discord_witness::oracle::{discord_vn, geometric_discord, OptimizationResult, OptimizerConfig};
use discord_witness::perm::witness_term_traces;
use discord_witness::witness::{
    tilde_purity, witness_via_permutation_capped, witness_via_r, Route, WitnessReport,
};
use discord_witness::{io, BipartiteState, Error, NumericConfig};
use serde::Serialize;

use crate::args::{CircuitMode, GlobalOpts, InputArgs, RouteArg};
use crate::input::{self, InputInfo};
use crate::report::{document, tagged, CliError, Output, Tagged, ROUTE_GAP_LIMIT};

/// Square-phase fits closer than this count as `U² ∝ I`.
const PHASE_FIT_TOL: f64 = 1e-10;

#[derive(Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

pub const TOOL: ToolInfo = ToolInfo { name: "dwit", version: env!("CARGO_PKG_VERSION") };

pub fn numeric_config(g: &GlobalOpts) -> NumericConfig {
    NumericConfig {
        herm: g.tol_herm,
        trace: g.tol_trace,
        psd: g.tol_psd,
        spectral_floor: g.tol_spec,
        size_cap: g.size_cap,
        ..NumericConfig::default()
    }
}

fn optimizer_config(restarts: usize, seed: u64, grid: bool) -> OptimizerConfig {
    let cfg = OptimizerConfig { restarts, seed, ..OptimizerConfig::default() };
    if grid {
        cfg.with_grid()
    } else {
        cfg
    }
}

#[derive(Debug, Serialize)]
struct RouteValue {
    route: &'static str,
    witness: Option<f64>,
    skipped: Option<String>,
}

#[derive(Debug, Serialize)]
struct WitnessOutput {
    tool: ToolInfo,
    input: InputInfo,
    routes: Vec<RouteValue>,
    report: WitnessReport,
    max_discrepancy: Option<Tagged>,
}

fn evaluate_route(state: &BipartiteState, route: Route, cap: usize) -> Result<f64, Error> {
    match route {
        Route::RMatrix => Ok(witness_via_r(state)),
        Route::Permutation => witness_via_permutation_capped(state, cap),
        Route::Circuit => Ok(reconstruct_witness(&exact_ancilla_expectations(state, cap)?, state.d_a())),
        Route::TwoSetting => Ok(two_setting_measurement(state, cap)?.witness),
    }
}

pub fn witness(g: &GlobalOpts, input: &InputArgs, routes: &[RouteArg]) -> Result<Output, CliError> {
    let cfg = numeric_config(g);
    let (state, info) = input::load(input, g.seed, &cfg)?;
    let all = [Route::RMatrix, Route::Permutation, Route::Circuit, Route::TwoSetting];
    let explicit = !routes.contains(&RouteArg::All);
    let mut selected: Vec<Route> = if explicit {
        routes
            .iter()
            .map(|r| match r {
                RouteArg::RMatrix => Route::RMatrix,
                RouteArg::Permutation => Route::Permutation,
                RouteArg::Circuit => Route::Circuit,
                RouteArg::TwoSetting => Route::TwoSetting,
                RouteArg::All => unreachable!(),
            })
            .collect()
    } else {
        all.to_vec()
    };
    selected.dedup();

    let mut values = Vec::new();
    let mut evaluated = Vec::new();
    for route in selected {
        match evaluate_route(&state, route, cfg.size_cap) {
            Ok(w) => {
                values.push(RouteValue { route: route.name(), witness: Some(w), skipped: None });
                evaluated.push((route, w));
            }
            // With --route all, routes too large for the cap are reported as skipped.
            Err(e @ Error::SizeOverflow { .. }) if !explicit => {
                values.push(RouteValue { route: route.name(), witness: None, skipped: Some(e.to_string()) })
            }
            Err(e) => return Err(e.into()),
        }
    }
    let (primary_route, primary) = evaluated[0];
    let report = WitnessReport::from_value(&state, primary, primary_route)?;
    let gap = (evaluated.len() > 1).then(|| {
        let max = evaluated.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
        let min = evaluated.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
        max - min
    });
    let failure = gap.filter(|&g| g > ROUTE_GAP_LIMIT).map(|gap| CliError::RouteDisagreement { gap });
    let out = WitnessOutput {
        tool: TOOL,
        input: info,
        routes: values,
        report,
        max_discrepancy: gap.map(|g| tagged(g, "cross-route")),
    };
    Ok(Output::Document { value: document(&out), failure })
}

#[derive(Debug, Serialize)]
struct OracleComparison {
    discord: Tagged,
    geometric_discord: Tagged,
    discord_minus_bound: Tagged,
    geometric_discord_minus_bound: Tagged,
}

#[derive(Debug, Serialize)]
struct BoundsOutput {
    tool: ToolInfo,
    input: InputInfo,
    entropy_a: Tagged,
    entropy: Tagged,
    purity: Tagged,
    tilde_purity: Tagged,
    witness: Tagged,
    q: Tagged,
    discord_lower_bound: Tagged,
    geo_discord_lower_bound: Tagged,
    oracle: Option<OracleComparison>,
}

pub fn bounds(g: &GlobalOpts, input: &InputArgs, oracle: bool, restarts: usize) -> Result<Output, CliError> {
    let cfg = numeric_config(g);
    let (state, info) = input::load(input, g.seed, &cfg)?;
    let report = WitnessReport::evaluate(&state, Route::RMatrix)?;
    let comparison = if oracle {
        let ocfg = optimizer_config(restarts, g.seed, false);
        let d = discord_vn(&state, &ocfg)?.value;
        let gd = geometric_discord(&state, &ocfg)?.value;
        Some(OracleComparison {
            discord: tagged(d, "nelder-mead"),
            geometric_discord: tagged(gd, "nelder-mead"),
            discord_minus_bound: tagged(d - report.discord_lower_bound, "nelder-mead minus r-matrix"),
            geometric_discord_minus_bound: tagged(gd - report.geo_discord_lower_bound, "nelder-mead minus r-matrix"),
        })
    } else {
        None
    };
    let out = BoundsOutput {
        tool: TOOL,
        input: info,
        entropy_a: tagged(von_neumann_entropy_with(&state.reduced_a(), &cfg)?, "spectrum"),
        entropy: tagged(von_neumann_entropy_with(state.matrix(), &cfg)?, "spectrum"),
        purity: tagged(state.purity(), "direct"),
        tilde_purity: tagged(tilde_purity(&state), "direct"),
        witness: tagged(report.witness_value, "r-matrix"),
        q: tagged(report.q, "r-matrix"),
        discord_lower_bound: tagged(report.discord_lower_bound, "r-matrix"),
        geo_discord_lower_bound: tagged(report.geo_discord_lower_bound, "r-matrix"),
        oracle: comparison,
    };
    Ok(Output::Document { value: document(&out), failure: None })
}

#[derive(Debug, Serialize)]
struct OracleOutput {
    tool: ToolInfo,
    input: InputInfo,
    optimizer: OptimizerConfig,
    discord: OptimizationResult,
    geometric_discord: OptimizationResult,
}

pub fn oracle(g: &GlobalOpts, input: &InputArgs, restarts: usize, grid: bool) -> Result<Output, CliError> {
    let cfg = numeric_config(g);
    let (state, info) = input::load(input, g.seed, &cfg)?;
    let ocfg = optimizer_config(restarts, g.seed, grid && state.d_a() == 2);
    let out = OracleOutput {
        tool: TOOL,
        input: info,
        optimizer: ocfg,
        discord: discord_vn(&state, &ocfg)?,
        geometric_discord: geometric_discord(&state, &ocfg)?,
    };
    Ok(Output::Document { value: document(&out), failure: None })
}

#[derive(Debug, Serialize)]
struct TermTraces {
    source: &'static str,
    values: [f64; 4],
}

#[derive(Debug, Serialize)]
struct GenericCheck {
    witness: Tagged,
    term_traces: TermTraces,
    max_gap: Tagged,
}

#[derive(Debug, Serialize)]
struct Dqc1Output {
    tool: ToolInfo,
    n: usize,
    alpha: f64,
    unitary: String,
    witness: Tagged,
    term_traces: TermTraces,
    generic: Option<GenericCheck>,
    generic_skipped: Option<String>,
    discord_bound: Option<Tagged>,
    warning: Option<String>,
    normalized_trace: NormalizedTrace,
    square_phase_fit: SquarePhaseFit,
    flags: Vec<&'static str>,
    discord_oracle: Option<Tagged>,
}

pub struct Dqc1Args<'a> {
    pub n: usize,
    pub alpha: f64,
    pub unitary: Option<&'a str>,
    pub unitary_file: Option<&'a std::path::Path>,
    pub oracle: bool,
}

pub fn dqc1_cmd(g: &GlobalOpts, a: &Dqc1Args) -> Result<Output, CliError> {
    if a.n == 0 || a.n > 12 {
        return Err(Error::InvalidParameter(format!("n = {} outside 1..=12", a.n)).into());
    }
    let (u, label) = match (a.unitary, a.unitary_file) {
        (Some(spec), _) => (spec.parse::<UnitarySpec>()?.build(a.n)?, spec.to_string()),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
            (io::parse_matrix_file(&text)?.0, format!("file:{}", path.display()))
        }
        (None, None) => unreachable!("clap requires a unitary"),
    };
    let cfg = Dqc1Config::new(a.n, a.alpha, u)?;
    let w = dqc1::witness_closed_form(&cfg);
    let closed_terms = dqc1::term_traces_closed_form(&cfg);
    let rho = dqc1::output_state(&cfg)?;

    let mut failure = None;
    let (generic, generic_skipped) = match witness_term_traces(&rho, g.size_cap) {
        Ok(t) => {
            let wp = witness_via_permutation_capped(&rho, g.size_cap)?;
            let gap = (0..4).map(|k| (t[k] - closed_terms[k]).abs()).fold((wp - w).abs(), f64::max);
            if gap > ROUTE_GAP_LIMIT {
                failure = Some(CliError::RouteDisagreement { gap });
            }
            let check = GenericCheck {
                witness: tagged(wp, "permutation"),
                term_traces: TermTraces { source: "permutation", values: t },
                max_gap: tagged(gap, "closed-form vs permutation"),
            };
            (Some(check), None)
        }
        Err(e @ Error::SizeOverflow { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let (bound, warning) = match dqc1::discord_bound(&cfg, w) {
        Ok(b) => (Some(tagged(b, "closed-form")), None),
        Err(Error::RegimeViolation(msg)) => (None, Some(format!("discord bound not applicable: {msg}"))),
        Err(e) => return Err(e.into()),
    };
    let fit = dqc1::square_phase_fit(&cfg, PHASE_FIT_TOL);
    let mut flags = Vec::new();
    if fit.proportional_to_identity {
        flags.push("U²∝identity");
    }
    let discord_oracle = if a.oracle {
        Some(tagged(discord_vn(&rho, &optimizer_config(32, g.seed, false))?.value, "nelder-mead"))
    } else {
        None
    };
    let out = Dqc1Output {
        tool: TOOL,
        n: a.n,
        alpha: a.alpha,
        unitary: label,
        witness: tagged(w, "closed-form"),
        term_traces: TermTraces { source: "closed-form", values: closed_terms },
        generic,
        generic_skipped,
        discord_bound: bound,
        warning,
        normalized_trace: dqc1::normalized_trace(&cfg)?,
        square_phase_fit: fit,
        flags,
        discord_oracle,
    };
    Ok(Output::Document { value: document(&out), failure })
}

#[derive(Debug, Serialize)]
struct ExactCircuit {
    expectations: [f64; 4],
    witness: Tagged,
}

#[derive(Debug, Serialize)]
struct CircuitOutput {
    tool: ToolInfo,
    input: InputInfo,
    mode: &'static str,
    exact: Option<ExactCircuit>,
    sampled: Option<ShotRecord>,
    two_setting: Option<TwoSettingResult>,
    reference_witness: Tagged,
}

pub fn circuit(g: &GlobalOpts, input: &InputArgs, mode: CircuitMode, shots: u64) -> Result<Output, CliError> {
    let cfg = numeric_config(g);
    let (state, info) = input::load(input, g.seed, &cfg)?;
    let cap = cfg.size_cap;
    let exact = |state: &BipartiteState| -> Result<ExactCircuit, Error> {
        let e = exact_ancilla_expectations(state, cap)?;
        Ok(ExactCircuit { expectations: e, witness: tagged(reconstruct_witness(&e, state.d_a()), "circuit") })
    };
    let mut out = CircuitOutput {
        tool: TOOL,
        input: info,
        mode: "",
        exact: None,
        sampled: None,
        two_setting: None,
        reference_witness: tagged(witness_via_r(&state), "r-matrix"),
    };
    match mode {
        CircuitMode::Exact => {
            out.mode = "exact";
            out.exact = Some(exact(&state)?);
        }
        CircuitMode::Sampled => {
            out.mode = "sampled";
            out.exact = Some(exact(&state)?);
            out.sampled = Some(sample_circuit(&state, shots, g.seed, cap)?);
        }
        CircuitMode::TwoSetting => {
            out.mode = "two-setting";
            out.two_setting = Some(two_setting_measurement(&state, cap)?);
        }
    }
    Ok(Output::Document { value: document(&out), failure: None })
}

pub fn gen(g: &GlobalOpts, spec: &str) -> Result<Output, CliError> {
    let state = input::generate(spec, g.seed)?;
    Ok(Output::Text(io::state_to_json(&state) + "\n"))
}
