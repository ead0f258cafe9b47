//! Command-line driver: a registry of seeded experiments plus the resource
//! calculator subcommands.
//!
//! Exit codes: 0 on success, 1 when an experiment misses its target, 2 on
//! usage errors (bad flags, unknown names, unparsable input).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::concentration::{chebyshev_window_bound, chernoff_window_bound, concentrate, copies, exact_oracle, SchmidtSpectrum};
use crate::error::{Error, Result};
use crate::gates::{gate_by_name, v_m};
use crate::infomeasures::{
    delta_ie, fannes_gap_check, message_ensemble, mutual_info_xbb, cond_entropy_bb_given_x, output_distance,
    random_ensemble, superposition_ensemble, with_bob_rotation, PureEnsemble,
};
use crate::montecarlo::{haar_state, run_trials, trial_rng};
use crate::protocols::{
    backcomm_uxoxo, backcomm_uxoxo_exchanged, bits_of, coherent_erasure_2bit, erasure_basis_input, erasure_input,
    nisan_compare, ordering_name, otp_report, randomized_cost, rsp_moment_check, rsp_montecarlo, simulate_vm,
    simulate_vm_dag, split_qubit, vm_basis_input, BaseExchange, ConstantGarbageExchange, ProtocolResult, XoxoExchange,
};
use crate::resources::{caret_diagnostic, expr_equal, parse_expr, parse_statement, region_reverse, CapacityTriple};
use crate::simcore::{c64, make_basis_state, BlockOp, Party, QState, Wire, C64};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "GATECOMM_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gatecomm", version, about = "Bipartite gate communication experiments and resource calculus")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a registered experiment; extra parameters go as `--key value`.
    Run {
        experiment: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        params: Vec<String>,
    },
    /// Canonicalize a resource expression.
    Rewrite {
        expr: Option<String>,
        #[arg(long)]
        reverse: bool,
        #[arg(long)]
        exchange: bool,
        /// Decide an identity `lhs = rhs`.
        #[arg(long, conflicts_with = "expr")]
        check: Option<String>,
    },
    /// Map an achievable `(C1, C2, E)` point.
    Region {
        #[arg(allow_hyphen_values = true)]
        c1: f64,
        #[arg(allow_hyphen_values = true)]
        c2: f64,
        #[arg(allow_hyphen_values = true)]
        e: f64,
        #[arg(long)]
        reverse: bool,
        /// Print the point and its reverse.
        #[arg(long)]
        table: bool,
    },
    /// Apply a registered gate to a basis state and print the output amplitudes.
    Apply {
        gate: String,
        /// One label per gate factor, comma separated.
        #[arg(long)]
        input: String,
    },
    /// List registered experiments.
    List,
}

/// Experiment parameters given as `--key value`.
#[derive(Debug, Clone, Default)]
pub struct Params {
    values: BTreeMap<String, String>,
    pub seed: u64,
    pub trials: Option<u64>,
}

impl Params {
    pub fn new(seed: u64, trials: Option<u64>) -> Self {
        Params { values: BTreeMap::new(), seed, trials }
    }

    pub fn set(mut self, key: &str, value: &str) -> Self {
        self.values.insert(key.to_string(), value.to_string());
        self
    }

    fn parse_args(args: &[String], seed: u64, trials: Option<u64>) -> Result<Self> {
        let mut p = Params::new(seed, trials);
        let mut it = args.iter();
        while let Some(k) = it.next() {
            let Some(key) = k.strip_prefix("--") else {
                return usage(format!("expected `--key value`, found `{k}`"));
            };
            let Some(v) = it.next() else {
                return usage(format!("missing value for `--{key}`"));
            };
            p.values.insert(key.to_string(), v.clone());
        }
        Ok(p)
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn get<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse().or_else(|_| usage(format!("bad value `{v}` for `--{key}`"))),
        }
    }

    fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.raw(key).unwrap_or(default)
    }

    fn trials_or(&self, default: u64) -> u64 {
        self.trials.unwrap_or(default)
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

/// Result of one experiment run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: Value,
    /// Per-case records, one CSV row each.
    pub rows: Option<Vec<Value>>,
    /// False when the experiment missed its target.
    pub ok: bool,
}

impl Outcome {
    fn summary(summary: Value, ok: bool) -> Self {
        Outcome { summary, rows: None, ok }
    }

    fn table(summary: Value, rows: Vec<Value>, ok: bool) -> Self {
        Outcome { summary, rows: Some(rows), ok }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut v = self.summary.clone();
                if let (Some(rows), Value::Object(m)) = (&self.rows, &mut v) {
                    m.insert("rows".into(), Value::Array(rows.clone()));
                }
                let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
                s.push('\n');
                s
            }
            Format::Csv => match &self.rows {
                Some(rows) => csv_rows(rows),
                None => {
                    let mut flat = Vec::new();
                    flatten("", &self.summary, &mut flat);
                    let rows: Vec<Value> = flat.into_iter().map(|(k, v)| json!({"field": k, "value": v})).collect();
                    csv_rows(&rows)
                }
            },
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&join(k), v, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| flatten(&join(&i.to_string()), v, out)),
        other => out.push((prefix.to_string(), other.clone())),
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
        Value::Number(n) => format!("{:.16e}", n.as_f64().unwrap_or(f64::NAN)),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => csv_cell(&Value::String(other.to_string())),
    }
}

fn csv_rows(rows: &[Value]) -> String {
    let Some(Value::Object(first)) = rows.first() else {
        return String::new();
    };
    let cols: Vec<&String> = first.keys().collect();
    let mut s = cols.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(",");
    s.push('\n');
    for r in rows {
        let line: Vec<String> = cols.iter().map(|c| csv_cell(r.get(c.as_str()).unwrap_or(&Value::Null))).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

/// A registered experiment.
pub struct Experiment {
    pub name: &'static str,
    pub about: &'static str,
    /// Accepted `--key` parameters.
    pub params: &'static [&'static str],
    pub default_format: Format,
    pub run: fn(&Params) -> Result<Outcome>,
}

pub fn registry() -> &'static [Experiment] {
    const R: &[Experiment] = &[
        Experiment { name: "backcomm", about: "U_XOXO back-communication for every message", params: &["m", "b", "exchanged"], default_format: Format::Csv, run: exp_backcomm },
        Experiment { name: "vm-sim", about: "V_m simulation on all basis pairs", params: &["m"], default_format: Format::Csv, run: exp_vm },
        Experiment { name: "vmdag-sim", about: "V_m^dag simulation on all basis pairs", params: &["m"], default_format: Format::Csv, run: exp_vmdag },
        Experiment { name: "coherent-erasure", about: "two-bit coherent erasure on basis and superposed inputs", params: &[], default_format: Format::Csv, run: exp_erasure },
        Experiment { name: "split-qubit", about: "cobit then co-cobit on random reference-entangled qubits", params: &[], default_format: Format::Csv, run: exp_split },
        Experiment { name: "rsp-montecarlo", about: "mean RSP fidelity over Haar targets", params: &["d", "kappa"], default_format: Format::Json, run: exp_rsp },
        Experiment { name: "rsp-moments", about: "first two moments of tr(P alpha)", params: &["d", "kappa"], default_format: Format::Json, run: exp_rsp_moments },
        Experiment { name: "concentrate", about: "entanglement concentration report and exact cross-check", params: &["spectrum", "n", "delta"], default_format: Format::Json, run: exp_concentrate },
        Experiment { name: "nisan", about: "randomized comparison of random m-bit pairs", params: &["m", "eps"], default_format: Format::Csv, run: exp_nisan },
        Experiment { name: "delta-ie", about: "mutual-information and entropy gains of V_m on an ensemble", params: &["m", "ensemble", "k"], default_format: Format::Json, run: exp_delta_ie },
        Experiment { name: "fannes", about: "continuity bounds for V_2 against a perturbed copy", params: &["theta", "k"], default_format: Format::Csv, run: exp_fannes },
        Experiment { name: "one-time-pad", about: "coherent one-time pad around a two-way base exchange", params: &["base", "theta", "epsilon"], default_format: Format::Json, run: exp_otp },
    ];
    R
}

pub fn find_experiment(name: &str) -> Result<&'static Experiment> {
    registry().iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownName(name.to_string()))
}

fn registered_names() -> String {
    registry().iter().map(|e| e.name).collect::<Vec<_>>().join(", ")
}

/// Runs an experiment after checking its parameter names.
pub fn run_experiment(name: &str, params: &Params) -> Result<Outcome> {
    let exp = find_experiment(name)?;
    if let Some(k) = params.values.keys().find(|k| !exp.params.contains(&k.as_str())) {
        return usage(format!("`{name}` takes no parameter `--{k}` (accepted: {})", exp.params.join(", ")));
    }
    (exp.run)(params)
}

fn protocol_row(r: &ProtocolResult) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("fidelity".into(), json!(r.fidelity_vs_target));
    m.insert("clean".into(), json!(r.clean));
    m.insert("consumed".into(), json!(r.ledger.consumed.to_string()));
    m.insert("produced".into(), json!(r.ledger.produced.to_string()));
    m
}

const EXACT: f64 = 1e-10;

fn exp_backcomm(p: &Params) -> Result<Outcome> {
    let m: u32 = p.get("m", 2)?;
    let exchanged: bool = p.get("exchanged", false)?;
    let messages: Vec<Vec<bool>> = match p.str_or("b", "all") {
        "all" => (0..1usize << m).map(|v| bits_of(v, m as usize)).collect(),
        s if s.len() == m as usize && s.chars().all(|c| c == '0' || c == '1') => vec![s.chars().map(|c| c == '1').collect()],
        s => return usage(format!("`--b` must be `all` or {m} binary digits, got `{s}`")),
    };
    let mut rows = Vec::new();
    let mut ok = true;
    for b in &messages {
        let r = if exchanged { backcomm_uxoxo_exchanged(m, b)? } else { backcomm_uxoxo(m, b)? };
        ok &= (r.fidelity_vs_target - 1.0).abs() <= EXACT;
        let mut row = Map::new();
        row.insert("b".into(), json!(b.iter().map(|&x| if x { '1' } else { '0' }).collect::<String>()));
        row.extend(protocol_row(&r));
        row.insert("ebits_consumed".into(), json!(r.ledger.consumed.ebits_f64()));
        row.insert("gate_uses".into(), json!(r.ledger.gate_uses.values().sum::<u64>()));
        rows.push(Value::Object(row));
    }
    Ok(Outcome::table(json!({"experiment": "backcomm", "m": m, "exchanged": exchanged, "ok": ok}), rows, ok))
}

fn exp_vm_generic(p: &Params, dag: bool) -> Result<Outcome> {
    let m: u32 = p.get("m", 2)?;
    let n = 1usize << m;
    let oracle = if dag { v_m(m)?.adjoint() } else { v_m(m)? };
    let table = oracle.permutation().expect("V_m is a permutation").to_vec();
    let mut rows = Vec::new();
    let mut ok = true;
    let mut first: Option<ProtocolResult> = None;
    for x in 0..n {
        for y in 0..n {
            let input = vm_basis_input(m, x, y)?;
            let r = if dag { simulate_vm_dag(m, &input)? } else { simulate_vm(m, &input)? };
            let out = r.final_state.reordered(&["A1", "B1"])?.argmax();
            let want = table[x * n + y];
            let good = out == want && (r.fidelity_vs_target - 1.0).abs() <= EXACT && r.clean;
            ok &= good;
            rows.push(json!({
                "x": x, "y": y, "out_x": out / n, "out_y": out % n,
                "expected_x": want / n, "expected_y": want % n,
                "fidelity": r.fidelity_vs_target, "clean": r.clean, "match": good,
            }));
            first.get_or_insert(r);
        }
    }
    let r = first.expect("at least one basis pair");
    let summary = json!({
        "experiment": if dag { "vmdag-sim" } else { "vm-sim" },
        "m": m,
        "ledger": r.ledger.report(),
        "notes": r.notes,
        "ok": ok,
    });
    Ok(Outcome::table(summary, rows, ok))
}

fn exp_vm(p: &Params) -> Result<Outcome> {
    exp_vm_generic(p, false)
}

fn exp_vmdag(p: &Params) -> Result<Outcome> {
    exp_vm_generic(p, true)
}

fn exp_erasure(_: &Params) -> Result<Outcome> {
    let mut cases: Vec<(String, QState)> = (0..4)
        .map(|x| Ok((format!("{}{}", x >> 1, x & 1), erasure_basis_input(x >> 1, x & 1)?)))
        .collect::<Result<_>>()?;
    let uniform: Vec<(usize, C64)> = (0..4).map(|x| (x, c64(0.5, 0.0))).collect();
    cases.push(("uniform".into(), erasure_input(&uniform)?));
    let mut rows = Vec::new();
    let mut ok = true;
    for (label, input) in cases {
        let r = coherent_erasure_2bit(&input)?;
        ok &= (r.fidelity_vs_target - 1.0).abs() <= EXACT;
        let mut row = Map::new();
        row.insert("input".into(), json!(label));
        row.extend(protocol_row(&r));
        rows.push(Value::Object(row));
    }
    Ok(Outcome::table(json!({"experiment": "coherent-erasure", "ok": ok}), rows, ok))
}

fn exp_split(p: &Params) -> Result<Outcome> {
    let trials = p.trials_or(100);
    let wires = vec![Wire::qubit("R", Party::Reference), Wire::qubit("A", Party::Alice)];
    let fids = run_trials(p.seed, trials, |rng| -> Result<f64> {
        let input = QState::new(wires.clone(), haar_state(4, rng))?;
        Ok(split_qubit(&input)?.fidelity_vs_target)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let min = fids.iter().copied().fold(1.0, f64::min);
    let ok = min >= 1.0 - EXACT;
    let rows = fids.iter().enumerate().map(|(t, f)| json!({"trial": t, "fidelity": f})).collect();
    Ok(Outcome::table(json!({"experiment": "split-qubit", "seed": p.seed, "trials": trials, "min_fidelity": min, "ok": ok}), rows, ok))
}

fn exp_rsp(p: &Params) -> Result<Outcome> {
    let (d, kappa) = (p.get("d", 64usize)?, p.get("kappa", 8usize)?);
    let trials = p.trials_or(2000);
    let r = rsp_montecarlo(d, kappa, trials, p.seed)?;
    let summary = json!({
        "experiment": "rsp-montecarlo", "d": d, "kappa": kappa, "trials": trials, "seed": p.seed,
        "mean_F": r.f_beta.mean, "std": r.f_beta.std, "se": r.f_beta.se,
        "bound": r.bound, "pass": r.passes,
    });
    Ok(Outcome::summary(summary, r.passes))
}

fn exp_rsp_moments(p: &Params) -> Result<Outcome> {
    let (d, kappa) = (p.get("d", 64usize)?, p.get("kappa", 8usize)?);
    let trials = p.trials_or(100_000);
    let r = rsp_moment_check(d, kappa, trials, p.seed)?;
    let ok = r.within;
    let mut v = serde_json::to_value(&r).expect("report serializes");
    v["experiment"] = json!("rsp-moments");
    v["trials"] = json!(trials);
    Ok(Outcome::summary(v, ok))
}

fn exp_concentrate(p: &Params) -> Result<Outcome> {
    let probs: Vec<f64> = p
        .str_or("spectrum", "0.6,0.4")
        .split(',')
        .map(|s| s.trim().parse::<f64>().or_else(|_| usage(format!("bad spectrum entry `{s}`"))))
        .collect::<Result<_>>()?;
    let (n, delta) = (p.get("n", 20usize)?, p.get("delta", 0.3f64)?);
    let spectra = copies(&SchmidtSpectrum::from_probs(&probs)?, n);
    let report = concentrate(&spectra, delta)?;
    let oracle = exact_oracle(&spectra, delta)?;
    let diff = report.differing_fields(&oracle, 1e-9);
    let summary = json!({
        "experiment": "concentrate",
        "spectrum": probs,
        "report": report,
        "oracle": oracle,
        "differing_fields": diff,
        "matches_oracle": diff.is_empty(),
        "chernoff_window_bound": chernoff_window_bound(&spectra, delta, report.gamma),
        "chebyshev_window_bound": chebyshev_window_bound(&spectra, delta),
    });
    Ok(Outcome::summary(summary, true))
}

fn exp_nisan(p: &Params) -> Result<Outcome> {
    let (m, eps) = (p.get("m", 60u32)?, p.get("eps", 0.1f64)?);
    if !(1..=63).contains(&m) {
        return usage(format!("m = {m} outside 1..=63"));
    }
    let trials = p.trials_or(200);
    let mask = (1u64 << m) - 1;
    let results = run_trials(p.seed, trials, |rng| -> Result<Value> {
        use rand::Rng;
        let x = rng.random::<u64>() & mask;
        // a third of the pairs share a long prefix, a third are equal
        let y = match rng.random_range(0..3) {
            0 => rng.random::<u64>() & mask,
            1 => x ^ (1u64 << rng.random_range(0..m.min(8))),
            _ => x,
        };
        let o = nisan_compare(x, y, m, eps, rng)?;
        Ok(json!({
            "x": x, "y": y, "claimed": ordering_name(o.ordering), "truth": ordering_name(x.cmp(&y)),
            "correct": o.ordering == x.cmp(&y), "bits": o.bits_exchanged,
        }))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let errors = results.iter().filter(|r| r["correct"] == json!(false)).count();
    let summary = json!({
        "experiment": "nisan", "m": m, "eps": eps, "trials": trials, "seed": p.seed,
        "error_rate": errors as f64 / trials.max(1) as f64,
        "bits_per_run": randomized_cost(m, eps).min(m as u64 + 2),
        "direct_bits": m as u64 + 2,
    });
    Ok(Outcome::table(summary, results, true))
}

fn exp_delta_ie(p: &Params) -> Result<Outcome> {
    let m: u32 = p.get("m", 2)?;
    let kind = p.str_or("ensemble", "message");
    let e: PureEnsemble = match kind {
        "message" => message_ensemble(m)?,
        "superposition" => superposition_ensemble(m)?,
        "random" => {
            let k = p.get("k", 4usize)?;
            random_ensemble(k, 1 << m, 1 << m, &mut trial_rng(p.seed, 0))?
        }
        other => return usage(format!("unknown ensemble `{other}` (message, superposition, random)")),
    };
    let u = v_m(m)?;
    let out = e.apply(&u)?;
    let (di, dh) = delta_ie(&u, &e)?;
    let summary = json!({
        "experiment": "delta-ie", "m": m, "ensemble": kind,
        "before": {"mutual_info": mutual_info_xbb(&e)?, "cond_entropy": cond_entropy_bb_given_x(&e)?},
        "after": {"mutual_info": mutual_info_xbb(&out)?, "cond_entropy": cond_entropy_bb_given_x(&out)?},
        "delta_i": di, "delta_h": dh,
    });
    Ok(Outcome::summary(summary, true))
}

fn exp_fannes(p: &Params) -> Result<Outcome> {
    let theta = p.get("theta", 0.01f64)?;
    let k = p.get("k", 4usize)?;
    let trials = p.trials_or(500);
    let u = v_m(2)?;
    let v = with_bob_rotation(&u, theta)?;
    let rows = run_trials(p.seed, trials, |rng| -> Result<Value> {
        let e = random_ensemble(k, 4, 4, rng)?;
        let eps = output_distance(&u, &v, &e)?;
        Ok(serde_json::to_value(fannes_gap_check(&u, &v, &e, eps)?).expect("check serializes"))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let violations = rows.iter().filter(|r| r["pass"] != json!(true)).count();
    let summary = json!({
        "experiment": "fannes", "theta": theta, "k": k, "trials": trials, "seed": p.seed,
        "violations": violations, "ok": violations == 0,
    });
    Ok(Outcome::table(summary, rows, violations == 0))
}

fn exp_otp(p: &Params) -> Result<Outcome> {
    let base: Box<dyn BaseExchange> = match p.str_or("base", "xoxo") {
        "constant" => Box::new(ConstantGarbageExchange),
        "xoxo" => {
            let mut b = XoxoExchange::new(p.get("theta", 0.0f64)?);
            b.declared_epsilon = p.get("epsilon", b.declared_epsilon)?;
            Box::new(b)
        }
        other => return usage(format!("unknown base `{other}` (constant, xoxo)")),
    };
    let r = otp_report(base.as_ref())?;
    let floor = 1.0 - 2.0 * r.epsilon.sqrt() - 1e-9;
    let ok = r.min_fidelity >= floor;
    let mut v = serde_json::to_value(&r).expect("report serializes");
    v["experiment"] = json!("one-time-pad");
    v["fidelity_floor"] = json!(floor);
    v["ok"] = json!(ok);
    Ok(Outcome::summary(v, ok))
}

fn with_caret(src: &str, e: Error) -> Error {
    match e {
        Error::Parse { pos, .. } => Error::Parse { pos, msg: format!("\n{}", caret_diagnostic(src, &e)) },
        other => other,
    }
}

fn rewrite_cmd(expr: Option<String>, reverse: bool, exchange: bool, check: Option<String>) -> Result<String> {
    if let Some(src) = check {
        let st = parse_statement(&src).map_err(|e| with_caret(&src, e))?;
        return Ok(format!("{}\n", expr_equal(&st.lhs, &st.rhs)));
    }
    let Some(src) = expr else {
        return usage("give an expression or `--check`");
    };
    let mut e = parse_expr(&src).map_err(|e| with_caret(&src, e))?;
    if exchange {
        e = e.exchange();
    }
    if reverse {
        e = e.reverse()?;
    }
    Ok(format!("{}\n", e.canonicalize()))
}

fn fmt_num(x: f64) -> String {
    format!("{}", x + 0.0)
}

fn fmt_triple(t: CapacityTriple) -> String {
    format!("{} {} {}", fmt_num(t.c1), fmt_num(t.c2), fmt_num(t.e))
}

fn region_cmd(t: CapacityTriple, reverse: bool, table: bool) -> Result<String> {
    if ![t.c1, t.c2, t.e].iter().all(|x| x.is_finite()) {
        return usage("triple entries must be finite");
    }
    Ok(if table {
        format!("U {}\nU^dag {}\n", fmt_triple(t), fmt_triple(region_reverse(t)))
    } else if reverse {
        format!("{}\n", fmt_triple(region_reverse(t)))
    } else {
        format!("{}\n", fmt_triple(t))
    })
}

fn apply_cmd(gate: &str, input: &str) -> Result<String> {
    let g = gate_by_name(gate)?;
    let dims = g.factor_dims();
    let labels: Vec<usize> = input
        .split(',')
        .map(|s| s.trim().parse().or_else(|_| usage(format!("bad label `{s}`"))))
        .collect::<Result<_>>()?;
    if labels.len() != dims.len() {
        return usage(format!("`{gate}` has {} factors, got {} labels", dims.len(), labels.len()));
    }
    let na = g.alice_dims.len();
    let wires: Vec<Wire> = dims
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let (id, party) = if i < na { (format!("A{i}"), Party::Alice) } else { (format!("B{}", i - na), Party::Bob) };
            Wire::new(id, party, d)
        })
        .collect();
    let ids: Vec<String> = wires.iter().map(|w| w.id.clone()).collect();
    let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
    let out = make_basis_state(wires, &labels)?.apply(&g, &refs)?;
    let mut s = String::new();
    for (i, a) in out.amplitudes().iter().enumerate() {
        if a.norm() > 1e-12 {
            let l: Vec<String> = out.labels_of(i).iter().map(usize::to_string).collect();
            s.push_str(&format!("|{}> {:.12} {:+.12}i\n", l.join(","), a.re, a.im));
        }
    }
    Ok(s)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Contract(_) => 1,
        _ => 2,
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(stdout, "{e}") } else { write!(stderr, "{e}") };
            return code;
        }
    };
    let res: Result<(String, Option<PathBuf>, i32)> = match cli.cmd {
        Command::Run { experiment, seed, output, format, trials, params } => (|| {
            let exp = find_experiment(&experiment)
                .map_err(|_| Error::Domain(format!("unknown experiment `{experiment}`; registered: {}", registered_names())))?;
            let mut params = Params::parse_args(&params, seed, trials)?;
            // driver flags may also follow the experiment name
            if let Some(v) = params.values.remove("seed") {
                params.seed = v.parse().or_else(|_| usage(format!("bad seed `{v}`")))?;
            }
            if let Some(v) = params.values.remove("trials") {
                params.trials = Some(v.parse().or_else(|_| usage(format!("bad trial count `{v}`")))?);
            }
            let output = output.or_else(|| params.values.remove("output").map(PathBuf::from));
            let format = match params.values.remove("format") {
                Some(f) => Format::from_str(&f, true).or_else(|_| usage(format!("unknown format `{f}`")))?,
                None => format.unwrap_or(exp.default_format),
            };
            let outcome = run_experiment(&experiment, &params)?;
            let path = output.or_else(|| {
                std::env::var_os(OUT_DIR_ENV).map(|d| PathBuf::from(d).join(format!("{experiment}.{}", format.ext())))
            });
            Ok((outcome.render(format), path, if outcome.ok { 0 } else { 1 }))
        })(),
        Command::Rewrite { expr, reverse, exchange, check } => rewrite_cmd(expr, reverse, exchange, check).map(|s| (s, None, 0)),
        Command::Region { c1, c2, e, reverse, table } => {
            region_cmd(CapacityTriple::new(c1, c2, e), reverse, table).map(|s| (s, None, 0))
        }
        Command::Apply { gate, input } => apply_cmd(&gate, &input).map(|s| (s, None, 0)),
        Command::List => Ok((
            registry().iter().map(|e| format!("{:<18} {}\n", e.name, e.about)).collect(),
            None,
            0,
        )),
    };
    match res {
        Ok((text, None, code)) => {
            let _ = stdout.write_all(text.as_bytes());
            code
        }
        Ok((text, Some(path), code)) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                if let Err(e) = std::fs::create_dir_all(dir) {
                    let _ = writeln!(stderr, "cannot create {}: {e}", dir.display());
                    return 2;
                }
            }
            match std::fs::write(&path, text) {
                Ok(()) => code,
                Err(e) => {
                    let _ = writeln!(stderr, "cannot write {}: {e}", path.display());
                    2
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
