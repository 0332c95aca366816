//! Command implementations behind the `pas-exponents` binary.
//!
//! Each command returns its whole standard output as a string: a JSON
//! document echoing the resolved configuration, optionally followed by CSV.
//! Any flag may also come from a JSON file passed with `--config`, using the
//! flag name with underscores as key; flags win over the file.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::channel::{make_ask_awgn, make_bsc, maxwell_boltzmann, product_input, AskAwgn, Dmc, FactoredDmc};
use crate::error::Error;
use crate::exponents::{
    alpha_n, dms_renyi, exponent_eg, exponent_em, exponent_es, exponent_esm, rate_thresholds_em, rate_thresholds_es,
    ExponentResult,
};
use crate::format::{fmt_sig, round_json};
use crate::optimize::{
    blahut_arimoto, maximize_product_mi_seeded, project_to_ntype_design, DEFAULT_MAX_ITER, DEFAULT_RESTARTS,
    DEFAULT_SEED, DEFAULT_TOLERANCE,
};
use crate::prob::{entropy, index_labels, kl_divergence, mutual_information, Pmf};
use crate::simulate::{run_ensemble_experiment, Ensemble, EvalMode, Setup, SimConfig, SimReport};
use crate::typeclass::quantize_to_ntype;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags, unreadable input or a violated precondition.
    Usage(String),
    /// Failure writing results.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// What a run printed and how it exited.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "pas-exponents", version, about = "Achievable rates and error exponents for probabilistic amplitude shaping")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Channel capacity by Blahut-Arimoto.
    Capacity(CapacityArgs),
    /// One of the error exponents with its rho curve.
    Exponent(ExponentArgs),
    /// Mutual information, mismatch penalty and rate limit over an ASK parameter grid.
    Ratesweep(RatesweepArgs),
    /// Optimize P_A x P_S, then quantize P_A to an n-type.
    Design(DesignArgs),
    /// Random-code ensemble experiment checked against 2^(-nE).
    Simulate(SimulateArgs),
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CapacityArgs {
    /// bsc:P, pbsc:P, ask:M:SNR_DB[:BINS], id:K, or a channel JSON file.
    #[arg(long)]
    pub channel: Option<String>,
    /// Stop when the capacity bounds are this close (bits).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// JSON file supplying any of the other flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExponentArgs {
    /// eg, es, em or esm.
    #[arg(long)]
    pub which: Option<String>,
    #[arg(long)]
    pub channel: Option<String>,
    /// Amplitude (or source) law: uniform, mb:NU, or a list such as 3/4,1/4.
    #[arg(long)]
    pub pa: Option<String>,
    /// Parity law on S; defaults to uniform.
    #[arg(long)]
    pub ps: Option<String>,
    /// Input law on X for eg and em; defaults to uniform.
    #[arg(long)]
    pub px: Option<String>,
    /// Type of the transmitted sequences for em and esm.
    #[arg(long)]
    pub pbar: Option<String>,
    /// Blocklength, required by esm.
    #[arg(long)]
    pub n: Option<u64>,
    /// Write the rho curve here instead of after the JSON.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RatesweepArgs {
    /// nu (Maxwell-Boltzmann parameter) or snr (dB).
    #[arg(long)]
    pub sweep: Option<String>,
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    /// Number of intervals; the grid has steps + 1 points.
    #[arg(long)]
    pub steps: Option<usize>,
    /// 2^m-ASK.
    #[arg(long)]
    pub ask_m: Option<u32>,
    /// SNR in dB held fixed during a nu sweep.
    #[arg(long)]
    pub snr: Option<f64>,
    /// nu held fixed during an snr sweep.
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub bins: Option<usize>,
    /// Quantize P_A to an n-type and charge D(P_bar||P_A); without it the
    /// penalty is zero.
    #[arg(long)]
    pub pbar_n: Option<u64>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignArgs {
    #[arg(long)]
    pub channel: Option<String>,
    /// Blocklength of the n-type.
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Random starting points besides the uniform one.
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateArgs {
    /// classical, systematic, mismatched or pas.
    #[arg(long)]
    pub setup: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub channel: Option<String>,
    #[arg(long)]
    pub pa: Option<String>,
    #[arg(long)]
    pub ps: Option<String>,
    #[arg(long)]
    pub px: Option<String>,
    #[arg(long)]
    pub pbar: Option<String>,
    /// Fraction of the type class carrying the source, in (0, 1].
    #[arg(long)]
    pub q_support_fraction: Option<f64>,
    /// iid or affine-binary.
    #[arg(long)]
    pub ensemble: Option<String>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub permuter: Option<bool>,
    #[arg(long)]
    pub num_codes: Option<usize>,
    #[arg(long)]
    pub trials_per_code: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// auto, exact or monte-carlo.
    #[arg(long)]
    pub mode: Option<String>,
    /// Append the result row to this CSV file instead of printing it.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    match execute(&cli.command) {
        Ok(stdout) => Outcome { code: EXIT_OK, stdout, stderr: String::new() },
        Err(e) => Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

pub fn execute(command: &Command) -> CliResult<String> {
    match command {
        Command::Capacity(a) => cmd_capacity(&resolve(a, a.config.as_deref())?),
        Command::Exponent(a) => cmd_exponent(&resolve(a, a.config.as_deref())?),
        Command::Ratesweep(a) => cmd_ratesweep(&resolve(a, a.config.as_deref())?),
        Command::Design(a) => cmd_design(&resolve(a, a.config.as_deref())?),
        Command::Simulate(a) => cmd_simulate(&resolve(a, a.config.as_deref())?),
    }
}

/// Overlays the flags that were given onto the config file's values.
fn resolve<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Path>) -> CliResult<T> {
    let flag_values = serde_json::to_value(flags).map_err(|e| CliError::Internal(e.to_string()))?;
    let Some(path) = config else {
        return serde_json::from_value(flag_values).map_err(|e| CliError::Internal(e.to_string()));
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut merged: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    let target = merged
        .as_object_mut()
        .ok_or_else(|| CliError::Usage("config file must hold a JSON object".into()))?;
    if let Value::Object(given) = flag_values {
        for (k, v) in given {
            if !v.is_null() {
                target.insert(k, v);
            }
        }
    }
    serde_json::from_value(merged).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}

fn required<T: Clone>(value: &Option<T>, name: &str) -> CliResult<T> {
    value.clone().ok_or_else(|| CliError::Usage(format!("missing --{}", name.replace('_', "-"))))
}

fn parse_number<T: std::str::FromStr>(text: &str, what: &str) -> CliResult<T> {
    text.trim().parse().map_err(|_| CliError::Usage(format!("cannot parse {what} from '{text}'")))
}

/// `bsc:P`, `pbsc:P` (two BSCs in parallel, `A` on the first and `S` on
/// the second), `ask:M:SNR_DB[:BINS]`, `id:K`, or a path to a channel
/// document.
pub fn parse_channel(spec: &str) -> CliResult<FactoredDmc> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["bsc", p] => Ok(FactoredDmc::unfactored(make_bsc(parse_number(p, "crossover")?)?)),
        ["pbsc", p] => {
            let b = make_bsc(parse_number(p, "crossover")?)?;
            Ok(FactoredDmc::parallel(&b, &b)?)
        }
        ["ask", m, snr] | ["ask", m, snr, _] => {
            let bins = match parts.get(3) {
                Some(b) => parse_number(b, "bins")?,
                None => AskAwgn::DEFAULT_BINS,
            };
            Ok(make_ask_awgn(
                parse_number(m, "ASK order")?,
                parse_number(snr, "SNR")?,
                bins,
                AskAwgn::DEFAULT_SPAN_SIGMAS,
            )?)
        }
        ["id", k] => Ok(FactoredDmc::unfactored(Dmc::identity(parse_number(k, "alphabet size")?)?)),
        _ => {
            let text = fs::read_to_string(spec)
                .map_err(|e| CliError::Usage(format!("channel '{spec}' is neither a builtin nor a readable file: {e}")))?;
            Ok(FactoredDmc::from_json(&text)?)
        }
    }
}

fn parse_fraction(text: &str) -> CliResult<f64> {
    match text.split_once('/') {
        Some((num, den)) => {
            let (num, den): (f64, f64) = (parse_number(num, "numerator")?, parse_number(den, "denominator")?);
            if den == 0.0 {
                return Err(CliError::Usage(format!("zero denominator in '{text}'")));
            }
            Ok(num / den)
        }
        None => parse_number(text, "probability"),
    }
}

/// `uniform`, `mb:NU` (Maxwell-Boltzmann over numeric labels), or a comma
/// list of probabilities or fractions. A list of a different length than
/// `labels` gets the labels `0, 1, ...`.
pub fn parse_pmf(spec: &str, labels: &[String]) -> CliResult<Pmf> {
    let spec = spec.trim();
    if spec == "uniform" {
        return Ok(Pmf::uniform(labels.to_vec())?);
    }
    if let Some(nu) = spec.strip_prefix("mb:") {
        let amplitudes = labels
            .iter()
            .map(|l| parse_number::<f64>(l, "amplitude label"))
            .collect::<CliResult<Vec<f64>>>()?;
        let mb = maxwell_boltzmann(&amplitudes, parse_number(nu, "nu")?)?;
        return Ok(Pmf::new(labels.to_vec(), mb.probs().to_vec())?);
    }
    let probs = spec.split(',').map(parse_fraction).collect::<CliResult<Vec<f64>>>()?;
    let labels = if probs.len() == labels.len() { labels.to_vec() } else { index_labels(probs.len()) };
    Ok(Pmf::new(labels, probs)?)
}

fn optional_pmf(spec: &Option<String>, labels: &[String]) -> CliResult<Pmf> {
    parse_pmf(spec.as_deref().unwrap_or("uniform"), labels)
}

fn render(mut value: Value) -> String {
    round_json(&mut value);
    let mut text = serde_json::to_string_pretty(&value).expect("JSON values serialize");
    text.push('\n');
    text
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

fn exponent_summary(r: &ExponentResult) -> Value {
    json!({ "exponent": r.exponent, "rho_star": r.rho_star })
}

pub fn cmd_capacity(args: &CapacityArgs) -> CliResult<String> {
    let spec = required(&args.channel, "channel")?;
    let fd = parse_channel(&spec)?;
    let tol = args.tol.unwrap_or(DEFAULT_TOLERANCE);
    let max_iter = args.max_iter.unwrap_or(DEFAULT_MAX_ITER);
    let r = blahut_arimoto(fd.base(), tol, max_iter)?;
    Ok(render(json!({
        "command": "capacity",
        "config": { "channel": spec, "tol": tol, "max_iter": max_iter },
        "result": r.to_json(),
    })))
}

pub fn cmd_exponent(args: &ExponentArgs) -> CliResult<String> {
    let which = required(&args.which, "which")?;
    let spec = required(&args.channel, "channel")?;
    let fd = parse_channel(&spec)?;
    let w = fd.base();
    let a_labels = fd.a_labels().to_vec();
    let mut config = json!({ "which": which, "channel": spec });
    let (result, mut summary) = match which.as_str() {
        "eg" => {
            let pa = parse_pmf(&required(&args.pa, "pa")?, &a_labels)?;
            let px = optional_pmf(&args.px, w.input_labels())?;
            let r = exponent_eg(&px, w, dms_renyi(&pa))?;
            let mut s = exponent_summary(&r);
            s["mutual_info"] = json!(mutual_information(&px, w)?);
            s["source_entropy"] = json!(entropy(&pa));
            config["pa"] = json!(pa);
            config["px"] = json!(px);
            (r, s)
        }
        "es" => {
            let pa = parse_pmf(&required(&args.pa, "pa")?, &a_labels)?;
            let ps = optional_pmf(&args.ps, fd.s_labels())?;
            let r = exponent_es(&pa, &ps, &fd)?;
            let mut s = exponent_summary(&r);
            s["thresholds"] = serde_json::to_value(rate_thresholds_es(&pa, &ps, &fd)?).expect("serializable");
            config["pa"] = json!(pa);
            config["ps"] = json!(ps);
            (r, s)
        }
        "em" => {
            let pbar = parse_pmf(&required(&args.pbar, "pbar")?, &a_labels)?;
            let pa = parse_pmf(&required(&args.pa, "pa")?, pbar.labels())?;
            let px = optional_pmf(&args.px, w.input_labels())?;
            let r = exponent_em(&pbar, &pa, &px, w)?;
            let th = rate_thresholds_em(&pbar, &pa, &px, w)?;
            let mut s = exponent_summary(&r);
            s["penalty"] = json!(th.penalty);
            s["thresholds"] = serde_json::to_value(th).expect("serializable");
            config["pbar"] = json!(pbar);
            config["pa"] = json!(pa);
            config["px"] = json!(px);
            (r, s)
        }
        "esm" => {
            let n = required(&args.n, "n")?;
            let pbar = parse_pmf(&required(&args.pbar, "pbar")?, &a_labels)?;
            let pa = parse_pmf(&required(&args.pa, "pa")?, &a_labels)?;
            let ps = optional_pmf(&args.ps, fd.s_labels())?;
            let r = exponent_esm(n, &pbar, &pa, &ps, &fd)?;
            let mut s = exponent_summary(&r);
            s["alpha_n"] = json!(alpha_n(n, fd.num_a()));
            s["penalty"] = json!(kl_divergence(&pbar, &pa)?);
            s["bound"] = json!(r.bound(n));
            s["negative"] = json!(r.is_negative());
            config["n"] = json!(n);
            config["pbar"] = json!(pbar);
            config["pa"] = json!(pa);
            config["ps"] = json!(ps);
            (r, s)
        }
        other => return Err(CliError::Usage(format!("--which must be eg, es, em or esm, not '{other}'"))),
    };
    let curve = result.curve.to_csv_string();
    let mut out = String::new();
    if let Some(path) = &args.csv {
        config["csv"] = json!(path.display().to_string());
        write_file(path, &curve)?;
    }
    summary["curve_points"] = json!(result.curve.len());
    out.push_str(&render(json!({ "command": "exponent", "config": config, "result": summary })));
    if args.csv.is_none() {
        out.push_str(&curve);
    }
    Ok(out)
}

pub const RATESWEEP_HEADER: [&str; 4] = ["param", "mutual_info", "penalty", "rate_limit"];

pub fn cmd_ratesweep(args: &RatesweepArgs) -> CliResult<String> {
    let sweep = args.sweep.clone().unwrap_or_else(|| "nu".into());
    let (from, to) = (required(&args.from, "from")?, required(&args.to, "to")?);
    let steps = args.steps.unwrap_or(10);
    let m = args.ask_m.unwrap_or(2);
    let snr = args.snr.unwrap_or(8.0);
    let nu = args.nu.unwrap_or(0.0);
    let bins = args.bins.unwrap_or(AskAwgn::DEFAULT_BINS);
    if !(from.is_finite() && to.is_finite()) || from > to || steps == 0 {
        return Err(CliError::Usage(format!("invalid grid: from={from}, to={to}, steps={steps}")));
    }
    if sweep != "nu" && sweep != "snr" {
        return Err(CliError::Usage(format!("--sweep must be nu or snr, not '{sweep}'")));
    }
    let mut table = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Internal(e.to_string());
    table.write_record(RATESWEEP_HEADER).map_err(csv_err)?;
    for k in 0..=steps {
        let param = from + (to - from) * k as f64 / steps as f64;
        let (row_snr, row_nu) = if sweep == "nu" { (snr, param) } else { (param, nu) };
        let fd = make_ask_awgn(m, row_snr, bins, AskAwgn::DEFAULT_SPAN_SIGMAS)?;
        let amplitudes: Vec<f64> = AskAwgn::new(m, row_snr).amplitudes();
        let pa = Pmf::new(fd.a_labels().to_vec(), maxwell_boltzmann(&amplitudes, row_nu)?.probs().to_vec())?;
        let ps = Pmf::uniform(fd.s_labels().to_vec())?;
        let mi = mutual_information(&product_input(&pa, &ps, &fd)?, fd.base())?;
        let pbar = match args.pbar_n {
            Some(n) => quantize_to_ntype(&pa, n)?.as_pmf(),
            None => pa.clone(),
        };
        let penalty = kl_divergence(&pbar, &pa)?;
        table
            .write_record([fmt_sig(param), fmt_sig(mi), fmt_sig(penalty), fmt_sig(mi - penalty)])
            .map_err(csv_err)?;
    }
    let csv_text = String::from_utf8(table.into_inner().map_err(|e| CliError::Internal(e.to_string()))?)
        .expect("csv is utf-8");
    let mut config = json!({
        "sweep": sweep, "from": from, "to": to, "steps": steps, "ask_m": m, "bins": bins,
        "snr": snr, "nu": nu, "pbar_n": args.pbar_n,
    });
    if let Some(path) = &args.csv {
        config["csv"] = json!(path.display().to_string());
        write_file(path, &csv_text)?;
    }
    let mut out = render(json!({ "command": "ratesweep", "config": config, "result": { "rows": steps + 1 } }));
    if args.csv.is_none() {
        out.push_str(&csv_text);
    }
    Ok(out)
}

pub fn cmd_design(args: &DesignArgs) -> CliResult<String> {
    let spec = required(&args.channel, "channel")?;
    let n = required(&args.n, "n")?;
    let fd = parse_channel(&spec)?;
    let tol = args.tol.unwrap_or(DEFAULT_TOLERANCE);
    let max_iter = args.max_iter.unwrap_or(DEFAULT_MAX_ITER);
    let restarts = args.restarts.unwrap_or(DEFAULT_RESTARTS);
    let seed = args.seed.unwrap_or(DEFAULT_SEED);
    let opt = maximize_product_mi_seeded(&fd, tol, max_iter, restarts, seed)?;
    let t = project_to_ntype_design(&opt.pa_star, n)?;
    let pbar = t.as_pmf();
    let px = product_input(&opt.pa_star, &opt.ps_star, &fd)?;
    let thresholds = rate_thresholds_em(&pbar, &opt.pa_star, &px, fd.base())?;
    let divergence = kl_divergence(&pbar, &opt.pa_star)?;
    Ok(render(json!({
        "command": "design",
        "config": {
            "channel": spec, "n": n, "tol": tol, "max_iter": max_iter, "restarts": restarts, "seed": seed,
        },
        "result": {
            "mutual_info": opt.mi,
            "converged": opt.converged,
            "pa_star": opt.pa_star,
            "ps_star": opt.ps_star,
            "pbar": { "labels": t.alphabet(), "counts": t.counts(), "probs": pbar.probs() },
            "divergence": divergence,
            "support_loss": pbar.support().len() < opt.pa_star.support().len(),
            "thresholds": thresholds,
        },
    })))
}

fn parse_text<T: std::str::FromStr<Err = Error>>(value: &Option<String>, default: &str) -> CliResult<T> {
    Ok(value.as_deref().unwrap_or(default).parse::<T>()?)
}

/// Builds the experiment described by the flags and config file.
pub fn simulation_config(args: &SimulateArgs) -> CliResult<(SimConfig, Value)> {
    let setup: Setup = required(&args.setup, "setup")?.parse()?;
    let n = required(&args.n, "n")?;
    let spec = required(&args.channel, "channel")?;
    let fd = parse_channel(&spec)?;
    let a_labels = fd.a_labels().to_vec();
    let pa = parse_pmf(&required(&args.pa, "pa")?, &a_labels)?;
    let mut cfg = SimConfig::new(setup, n, fd.clone(), pa.clone());
    cfg.ps = Some(optional_pmf(&args.ps, fd.s_labels())?);
    cfg.px = Some(optional_pmf(&args.px, fd.base().input_labels())?);
    cfg.pbar = match &args.pbar {
        Some(s) => Some(parse_pmf(s, pa.labels())?),
        None => None,
    };
    if let Some(f) = args.q_support_fraction {
        cfg.q_support_fraction = f;
    }
    cfg.ensemble = parse_text::<Ensemble>(&args.ensemble, "iid")?;
    cfg.permuter_enabled = args.permuter.unwrap_or(false);
    cfg.num_codes = args.num_codes.unwrap_or(cfg.num_codes);
    cfg.trials_per_code = args.trials_per_code.unwrap_or(cfg.trials_per_code);
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    cfg.mode = parse_text::<EvalMode>(&args.mode, "auto")?;
    let echo = json!({
        "setup": setup.to_string(),
        "n": n,
        "channel": spec,
        "pa": cfg.pa,
        "ps": cfg.ps,
        "px": cfg.px,
        "pbar": cfg.pbar,
        "q_support_fraction": cfg.q_support_fraction,
        "ensemble": cfg.ensemble.to_string(),
        "permuter": cfg.permuter_enabled,
        "num_codes": cfg.num_codes,
        "trials_per_code": cfg.trials_per_code,
        "seed": cfg.seed,
        "mode": cfg.mode.to_string(),
    });
    Ok((cfg, echo))
}

fn csv_row_text(report: &SimReport, with_header: bool) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Internal(e.to_string());
    if with_header {
        w.write_record(SimReport::CSV_HEADER).map_err(csv_err)?;
    }
    w.write_record(report.csv_record()).map_err(csv_err)?;
    Ok(String::from_utf8(w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?).expect("csv is utf-8"))
}

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<String> {
    let (cfg, mut echo) = simulation_config(args)?;
    let report = run_ensemble_experiment(&cfg)?;
    let mut out;
    match &args.csv {
        Some(path) => {
            echo["csv"] = json!(path.display().to_string());
            let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
            let row = csv_row_text(&report, fresh)?;
            let mut file = fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|e| CliError::Internal(format!("cannot open {}: {e}", path.display())))?;
            file.write_all(row.as_bytes())
                .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
            out = render(json!({ "command": "simulate", "config": echo, "report": report }));
        }
        None => {
            out = render(json!({ "command": "simulate", "config": echo, "report": report }));
            out.push_str(&csv_row_text(&report, true)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(k: usize) -> Vec<String> {
        index_labels(k)
    }

    #[test]
    fn channel_specs() {
        assert_eq!(parse_channel("bsc:0.1").unwrap().base().num_inputs(), 2);
        let p = parse_channel("pbsc:0.05").unwrap();
        assert_eq!((p.num_a(), p.num_s(), p.base().num_outputs()), (2, 2, 4));
        let a = parse_channel("ask:2:8").unwrap();
        assert_eq!(a.base().num_outputs(), AskAwgn::DEFAULT_BINS + 2);
        assert_eq!(parse_channel("ask:1:3:16").unwrap().base().num_outputs(), 18);
        assert_eq!(parse_channel("id:3").unwrap().base().num_inputs(), 3);
        assert!(matches!(parse_channel("bsc:0.7"), Err(CliError::Usage(_))));
        assert!(parse_channel("bsc:x").is_err());
        assert!(parse_channel("/no/such/file.json").is_err());
    }

    #[test]
    fn pmf_specs() {
        let p = parse_pmf("1/4, 3/4", &labels(2)).unwrap();
        assert_eq!(p.probs(), &[0.25, 0.75]);
        let u = parse_pmf("uniform", &labels(4)).unwrap();
        assert_eq!(u.probs(), &[0.25; 4]);
        let amps: Vec<String> = ["1", "3"].iter().map(|s| s.to_string()).collect();
        let mb = parse_pmf("mb:0.1", &amps).unwrap();
        assert!((mb.prob(0) / mb.prob(1) - (0.8f64).exp()).abs() < 1e-12);
        assert_eq!(mb.labels(), amps.as_slice());
        assert!(parse_pmf("mb:0.1", &labels(2)).is_ok(), "index labels are numeric too");
        assert_eq!(parse_pmf("0.2,0.3,0.5", &labels(2)).unwrap().len(), 3);
        assert!(parse_pmf("0.5,0.6", &labels(2)).is_err());
        assert!(parse_pmf("1/0,1", &labels(2)).is_err());
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"channel": "bsc:0.2", "tol": 1e-6}"#).unwrap();
        let flags = CapacityArgs { tol: Some(1e-8), ..Default::default() };
        let merged = resolve(&flags, Some(&path)).unwrap();
        assert_eq!(merged.channel.as_deref(), Some("bsc:0.2"));
        assert_eq!(merged.tol, Some(1e-8));
        fs::write(&path, r#"{"chanel": "bsc:0.2"}"#).unwrap();
        assert!(matches!(resolve(&flags, Some(&path)), Err(CliError::Usage(_))));
    }

    #[test]
    fn exit_codes() {
        let ok = run(["pas-exponents", "capacity", "--channel", "bsc:0.5"]);
        assert_eq!(ok.code, EXIT_OK, "{}", ok.stderr);
        let v: Value = serde_json::from_str(&ok.stdout).unwrap();
        assert_eq!(v["result"]["capacity_bits"], json!(0.0));
        assert_eq!(run(["pas-exponents", "capacity"]).code, EXIT_USAGE);
        assert_eq!(run(["pas-exponents", "frobnicate"]).code, EXIT_USAGE);
        assert_eq!(run(["pas-exponents", "--help"]).code, EXIT_OK);
        let bad = run(["pas-exponents", "exponent", "--which", "zz", "--channel", "bsc:0.1"]);
        assert_eq!(bad.code, EXIT_USAGE);
        assert!(bad.stderr.contains("--which"));
    }
}
