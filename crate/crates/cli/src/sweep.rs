use discord_witness::linalg::random_state;
use discord_witness::oracle::random_classical_quantum;
use discord_witness::witness::{witness_via_permutation_capped, witness_via_r, WitnessReport, Route};
use discord_witness::{io, states, BipartiteState, Error};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{Family, Format, GlobalOpts};
use crate::input::fingerprint;
use crate::report::{csv_field, CliError};

/// Column layout of the CSV output, version 1.
pub const CSV_COLUMNS: [&str; 14] = [
    "index",
    "family",
    "param",
    "seed",
    "d_a",
    "d_b",
    "witness_r",
    "witness_perm",
    "q",
    "discord_lower_bound",
    "geo_discord_lower_bound",
    "violations",
    "fingerprint",
    "error",
];

const ROUTE_TOL: f64 = 1e-9;
const CQ_TOL: f64 = 1e-10;
const WERNER_TOL: f64 = 1e-9;

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub family: &'static str,
    pub param: Option<f64>,
    pub seed: Option<u64>,
    pub d_a: usize,
    pub d_b: usize,
    pub witness_r: Option<f64>,
    pub witness_perm: Option<f64>,
    pub q: Option<f64>,
    pub discord_lower_bound: Option<f64>,
    pub geo_discord_lower_bound: Option<f64>,
    pub violations: Vec<&'static str>,
    pub fingerprint: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Default, Serialize)]
pub struct SweepSummary {
    pub states: usize,
    pub errors: usize,
    pub non_positivity: usize,
    pub route_agreement: usize,
    pub cq_zero: usize,
    pub werner_closed_form: usize,
    pub max_route_gap: f64,
}

pub struct SweepSpec {
    pub family: Family,
    pub count: usize,
    pub d_a: usize,
    pub d_b: usize,
    pub rank: Option<usize>,
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Werner => "werner",
        Family::Random => "random",
        Family::Cq => "cq",
    }
}

/// The `index`-th member of the family. Random members use seed `seed + index`.
fn member(spec: &SweepSpec, index: usize, seed: u64) -> (Option<f64>, Option<u64>, Result<BipartiteState, Error>) {
    let seed = seed.wrapping_add(index as u64);
    match spec.family {
        Family::Werner => {
            let p = if spec.count > 1 { index as f64 / (spec.count - 1) as f64 } else { 1.0 };
            (Some(p), None, states::werner(p))
        }
        Family::Random => {
            let full = spec.d_a * spec.d_b;
            let rank = spec.rank.unwrap_or(1 + index % full);
            (Some(rank as f64), Some(seed), random_state(spec.d_a, spec.d_b, rank, seed))
        }
        Family::Cq => (None, Some(seed), random_classical_quantum(spec.d_a, spec.d_b, spec.d_a, seed)),
    }
}

fn evaluate(spec: &SweepSpec, index: usize, seed: u64, cap: usize) -> SweepRow {
    let (param, seed, state) = member(spec, index, seed);
    let (d_a, d_b) = if spec.family == Family::Werner { (2, 2) } else { (spec.d_a, spec.d_b) };
    let mut row = SweepRow {
        index,
        family: family_name(spec.family),
        param,
        seed,
        d_a,
        d_b,
        witness_r: None,
        witness_perm: None,
        q: None,
        discord_lower_bound: None,
        geo_discord_lower_bound: None,
        violations: Vec::new(),
        fingerprint: None,
        error: None,
    };
    let result = state.and_then(|s| {
        row.fingerprint = Some(fingerprint(&s));
        let w = witness_via_r(&s);
        let report = WitnessReport::from_value(&s, w, Route::RMatrix)?;
        Ok((w, witness_via_permutation_capped(&s, cap)?, report))
    });
    match result {
        Ok((w, wp, report)) => {
            if !report.non_positive {
                row.violations.push("non-positivity");
            }
            if (w - wp).abs() > ROUTE_TOL {
                row.violations.push("route-agreement");
            }
            if spec.family == Family::Cq && w.abs() >= CQ_TOL {
                row.violations.push("cq-zero");
            }
            if let (Family::Werner, Some(p)) = (spec.family, param) {
                if (w + 3.0 * p.powi(4) / 8.0).abs() > WERNER_TOL {
                    row.violations.push("werner-closed-form");
                }
            }
            row.witness_r = Some(w);
            row.witness_perm = Some(wp);
            row.q = Some(report.q);
            row.discord_lower_bound = Some(report.discord_lower_bound);
            row.geo_discord_lower_bound = Some(report.geo_discord_lower_bound);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

pub fn summarize(rows: &[SweepRow]) -> SweepSummary {
    let mut s = SweepSummary { states: rows.len(), ..SweepSummary::default() };
    for r in rows {
        if r.error.is_some() {
            s.errors += 1;
        }
        for v in &r.violations {
            match *v {
                "non-positivity" => s.non_positivity += 1,
                "route-agreement" => s.route_agreement += 1,
                "cq-zero" => s.cq_zero += 1,
                _ => s.werner_closed_form += 1,
            }
        }
        if let (Some(a), Some(b)) = (r.witness_r, r.witness_perm) {
            s.max_route_gap = s.max_route_gap.max((a - b).abs());
        }
    }
    s
}

fn num(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.16e}")).unwrap_or_default()
}

fn csv_row(r: &SweepRow) -> String {
    let fields = [
        r.index.to_string(),
        r.family.to_string(),
        num(r.param),
        r.seed.map(|s| s.to_string()).unwrap_or_default(),
        r.d_a.to_string(),
        r.d_b.to_string(),
        num(r.witness_r),
        num(r.witness_perm),
        num(r.q),
        num(r.discord_lower_bound),
        num(r.geo_discord_lower_bound),
        r.violations.join(";"),
        r.fingerprint.clone().unwrap_or_default(),
        csv_field(r.error.as_deref().unwrap_or("")),
    ];
    fields.join(",")
}

pub fn run(g: &GlobalOpts, spec: &SweepSpec) -> Result<String, CliError> {
    if spec.count == 0 {
        return Err(Error::InvalidParameter("--count must be at least 1".into()).into());
    }
    let rows: Vec<SweepRow> =
        (0..spec.count).into_par_iter().map(|i| evaluate(spec, i, g.seed, g.size_cap)).collect();
    let summary = summarize(&rows);
    let mut out = String::new();
    match g.format {
        Format::Csv => {
            out.push_str(&CSV_COLUMNS.join(","));
            out.push('\n');
            for r in &rows {
                out.push_str(&csv_row(r));
                out.push('\n');
            }
            out.push_str(&format!(
                "# summary states={} errors={} non-positivity={} route-agreement={} cq-zero={} werner-closed-form={} max_route_gap={:.16e}\n",
                summary.states,
                summary.errors,
                summary.non_positivity,
                summary.route_agreement,
                summary.cq_zero,
                summary.werner_closed_form,
                summary.max_route_gap
            ));
        }
        Format::Json => {
            for r in &rows {
                out.push_str(&io::to_json_line(r));
                out.push('\n');
            }
            out.push_str(&io::to_json_line(&serde_json::json!({ "summary": summary })));
            out.push('\n');
        }
    }
    Ok(out)
}
