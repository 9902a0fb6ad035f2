//! The `swf` command line: argument parsing, file formats, and one `cmd_*`
//! function per subcommand. `main` only forwards to [`run`].

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use swf_core::axioms::{
    check_pareto, check_pr, check_ta, classify_consistent, BordaKind, GroupFile, MarginWitness, PermutationGroup,
};
use swf_core::domain::{check_triple_consistency, evaluate_swf};
use swf_core::doubleslice::{
    t_operator_check, verify_stab12_bounds, verify_two_slice, CrossSpectrum, DoubleSliceConfig,
};
use swf_core::exact::rat_to_string;
use swf_core::families::{nonborda_construction, FamilyKind};
use swf_core::search::{
    conjecture_scan_with, merge_reports, run_search, Checkpoint, SearchFilters, SearchMode, SearchOptions,
    SearchReport, Shard,
};
use swf_core::slice::{verify_slice_bounds, ScanMode, SliceSpectrum};
use swf_core::{Election, RelResult, SetFunctionWTL, SwfError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Largest `n` for which `verify` runs the `3^n` partition scan.
pub const MAX_VERIFY_N: usize = 20;

/// Default table budget when `SWF_BUDGET_MB` is unset.
pub const DEFAULT_BUDGET_MB: u64 = 1024;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] SwfError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("usage: {0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(SwfError::BudgetExceeded(_)) => EXIT_BUDGET,
            CliError::Core(SwfError::InconsistentTriple | SwfError::PrViolation) => EXIT_VIOLATION,
            _ => EXIT_USAGE,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "swf", about = "Construct and verify SWFs on the three-candidate cycle domain")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Omit `generated_at` so output is byte-reproducible.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit the strongly non-Borda set function for n.
    Construct {
        #[arg(long)]
        n: usize,
    },
    /// Check consistency, TA, P and PR, then classify.
    Verify {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        group: Option<PathBuf>,
        /// Expected n; a mismatch is an error.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Slice eigenvalues alpha_0..alpha_k.
    Spectral {
        #[arg(long)]
        k: usize,
    },
    /// Probability, stability and inconsistency bounds on the middle slice.
    Slicebounds {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: SliceMode,
    },
    /// Double-slice checks.
    Doubleslice {
        #[arg(long)]
        n: Option<usize>,
        /// Upper end of the k range for `stab12`.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value = "table")]
        mode: DoubleMode,
    },
    /// Enumerate consistent functions invariant under a group (default Z_n).
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(long)]
        decreasing: bool,
        #[arg(long)]
        pareto: bool,
        #[arg(long)]
        shard: Option<Shard>,
        /// Resume from and save progress to this file.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Scan consistent decreasing Z_n-invariant functions for excluded values.
    Conjecture {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        shard: Option<Shard>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Fold shard reports of one search into the unsharded report.
    Merge { reports: Vec<PathBuf> },
    /// Evaluate the SWF of (g, g, g) on an election such as "1231".
    Eval {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        election: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SliceMode {
    Exhaustive,
    InvariantOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DoubleMode {
    Table,
    Stab12,
    TwoSlice,
    Operator,
}

/// How a set function was built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: String,
    pub k: usize,
    /// 1-based voters of the family's base set.
    pub base: Vec<usize>,
}

/// Set-function file: `values[U]` for every mask `U`, as `W`/`T`/`L`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetFunctionFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    pub values: String,
}

impl SetFunctionFile {
    pub fn to_set_function(&self) -> CliResult<SetFunctionWTL> {
        check_table_budget(self.n)?;
        Ok(SetFunctionWTL::parse_values(self.n, &self.values)?)
    }
}

/// Output of one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmdOutput {
    pub body: String,
    pub exit: i32,
}

fn budget_bytes() -> u64 {
    std::env::var("SWF_BUDGET_MB")
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .unwrap_or(DEFAULT_BUDGET_MB)
        .saturating_mul(1 << 20)
}

/// A `2^n` table costs one byte per entry.
pub fn check_table_budget(n: usize) -> CliResult<()> {
    let need = 1u64.checked_shl(n as u32).unwrap_or(u64::MAX);
    if n > 63 || need > budget_bytes() {
        return Err(SwfError::BudgetExceeded(format!(
            "a 2^{n}-entry table exceeds SWF_BUDGET_MB = {} MB",
            budget_bytes() >> 20
        ))
        .into());
    }
    Ok(())
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write_file(path: &Path, body: &str) -> CliResult<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, body)
        .and_then(|_| fs::rename(&tmp, path))
        .map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn load_set_function(path: &Path) -> CliResult<SetFunctionWTL> {
    let file: SetFunctionFile = serde_json::from_str(&read_file(path)?)?;
    file.to_set_function()
}

pub fn load_group(path: &Path) -> CliResult<PermutationGroup> {
    let file: GroupFile = serde_json::from_str(&read_file(path)?)?;
    Ok(PermutationGroup::from_file(&file)?)
}

/// Serializes `report`, adding `generated_at` unless suppressed.
fn json_body<T: Serialize>(report: &T, timestamp: bool) -> CliResult<String> {
    let mut v = serde_json::to_value(report)?;
    if let (true, Value::Object(map)) = (timestamp, &mut v) {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        map.insert("generated_at".into(), Value::from(now));
    }
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

fn exit_for(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}

fn render<T: Serialize>(report: &T, format: Format, timestamp: bool, text: impl FnOnce() -> String) -> CliResult<String> {
    match format {
        Format::Json => json_body(report, timestamp),
        Format::Text => Ok(text()),
        Format::Csv => Err(CliError::Usage("this command has no CSV output".into())),
    }
}

pub fn cmd_construct(n: usize, timestamp: bool) -> CliResult<CmdOutput> {
    check_table_budget(n)?;
    let c = nonborda_construction(n)?;
    let file = SetFunctionFile {
        n,
        provenance: Some(Provenance {
            construction: match c.kind {
                FamilyKind::A => "family-A".into(),
                FamilyKind::B => "family-B".into(),
            },
            k: c.k,
            base: c.family.base().voters(),
        }),
        values: c.g.values_string(),
    };
    Ok(CmdOutput { body: json_body(&file, timestamp)?, exit: EXIT_OK })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessOut {
    /// 1-based voters of `U`.
    pub voters: Vec<usize>,
    pub forward: bool,
    pub margin: i64,
    pub result: RelResult,
    /// Per-voter values of the relative election.
    pub election: Vec<i8>,
}

impl From<&MarginWitness> for WitnessOut {
    fn from(w: &MarginWitness) -> Self {
        WitnessOut {
            voters: w.mask.voters(),
            forward: w.forward,
            margin: w.margin,
            result: w.result,
            election: w.election.values().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub n: usize,
    pub group: GroupFile,
    pub consistency: bool,
    /// First violating `(V1, V2, V3)`, 1-based.
    pub consistency_witness: Option<[Vec<usize>; 3]>,
    /// Ordered partitions scanned.
    pub partitions: u64,
    pub ta: bool,
    pub pareto: bool,
    pub pr: bool,
    /// Present when the function is consistent.
    pub classification: Option<BordaKind>,
    pub margin_witnesses: Option<[WitnessOut; 2]>,
    pub passed: bool,
}

pub fn verify_report(g: &SetFunctionWTL, group: &PermutationGroup) -> CliResult<VerifyReport> {
    let n = g.n();
    if n > MAX_VERIFY_N {
        return Err(SwfError::BudgetExceeded(format!("3^{n} partition scan (limit n = {MAX_VERIFY_N})")).into());
    }
    if group.n() != n {
        return Err(SwfError::LengthMismatch { expected: n, found: group.n() }.into());
    }
    let witness = check_triple_consistency(g, g, g)?;
    let consistency = witness.is_none();
    let ta = check_ta(g, group)?;
    let pareto = check_pareto(g);
    let pr = check_pr(g);
    let (classification, margin_witnesses) = if consistency {
        let c = classify_consistent(g)?;
        let kind = if ta { c.kind } else { BordaKind::UnclassifiedWithoutTa };
        (Some(kind), c.witnesses.filter(|_| ta).map(|(w, l)| [WitnessOut::from(&w), WitnessOut::from(&l)]))
    } else {
        (None, None)
    };
    Ok(VerifyReport {
        n,
        group: group.to_file(),
        consistency,
        consistency_witness: witness.map(|w| w.0.map(|m| m.voters())),
        partitions: 3u64.pow(n as u32),
        ta,
        pareto,
        pr,
        classification,
        margin_witnesses,
        passed: consistency && ta && pareto && pr,
    })
}

pub fn cmd_verify(
    g: &Path,
    group: Option<&Path>,
    n: Option<usize>,
    format: Format,
    timestamp: bool,
) -> CliResult<CmdOutput> {
    let g = load_set_function(g)?;
    if let Some(n) = n.filter(|&n| n != g.n()) {
        return Err(SwfError::LengthMismatch { expected: n, found: g.n() }.into());
    }
    let group = match group {
        Some(p) => load_group(p)?,
        None => PermutationGroup::cyclic(g.n())?,
    };
    let r = verify_report(&g, &group)?;
    let body = render(&r, format, timestamp, || {
        let mark = |b: bool| if b { "pass" } else { "FAIL" };
        format!(
            "n = {}\nconsistency: {}\nTA: {}\nPareto: {}\nPR: {}\nclassification: {}\n",
            r.n,
            mark(r.consistency),
            mark(r.ta),
            mark(r.pareto),
            mark(r.pr),
            r.classification.map(|k| format!("{k:?}")).unwrap_or_else(|| "none (inconsistent)".into())
        )
    })?;
    Ok(CmdOutput { body, exit: exit_for(r.passed) })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub spectrum: SliceSpectrum,
    pub recursion: bool,
    pub bounds: bool,
    pub alternating: bool,
}

pub fn cmd_spectral(k: usize, format: Format, timestamp: bool) -> CliResult<CmdOutput> {
    if k == 0 {
        return Err(CliError::Usage("--k must be positive".into()));
    }
    let spectrum = SliceSpectrum::new(k)?;
    let r = SpectralReport {
        recursion: spectrum.recursion_holds(),
        bounds: spectrum.bounds_hold(),
        alternating: spectrum.alternating_decreasing(),
        spectrum,
    };
    let ok = r.recursion && r.bounds && r.alternating;
    let body = match format {
        Format::Csv => {
            let mut s = String::from("k,d,alpha\n");
            for (d, a) in r.spectrum.alphas.iter().enumerate() {
                s += &format!("{k},{d},{}\n", rat_to_string(a));
            }
            s
        }
        _ => render(&r, format, timestamp, || {
            let alphas: Vec<String> = r.spectrum.alphas.iter().map(rat_to_string).collect();
            format!("k = {k}\nalpha: {}\nrecursion: {}\nbounds: {}\n", alphas.join(", "), r.recursion, r.bounds)
        })?,
    };
    Ok(CmdOutput { body, exit: exit_for(ok) })
}

pub fn cmd_slicebounds(n: usize, mode: SliceMode, format: Format, timestamp: bool) -> CliResult<CmdOutput> {
    let mode = match mode {
        SliceMode::Exhaustive => ScanMode::Exhaustive,
        SliceMode::InvariantOnly => ScanMode::InvariantOnly,
    };
    let r = verify_slice_bounds(n, mode)?;
    let opt = |x: &Option<swf_core::Rational>| x.as_ref().map(rat_to_string).unwrap_or_else(|| "-".into());
    let body = render(&r, format, timestamp, || {
        format!(
            "n = {}\nBoolean: {} examined, {} egalitarian\nWTL: {} examined, {} egalitarian\nviolations: {}\n\
             min Prob(A) slack: {}\nmin Prob(A): {}\nbound minimum {} at p = {}\n",
            r.n,
            r.boolean_examined,
            r.boolean_egalitarian,
            r.wtl_examined,
            r.wtl_egalitarian,
            r.violation_count(),
            opt(&r.min_prob_a_slack),
            opt(&r.min_prob_a),
            rat_to_string(&r.bound_minimum),
            rat_to_string(&r.bound_argmin)
        )
    })?;
    Ok(CmdOutput { body, exit: exit_for(r.violation_count() == 0) })
}

fn need_n(n: Option<usize>, what: &str) -> CliResult<usize> {
    n.ok_or_else(|| CliError::Usage(format!("{what} needs --n")))
}

pub fn cmd_doubleslice(
    n: Option<usize>,
    k: Option<usize>,
    mode: DoubleMode,
    format: Format,
    timestamp: bool,
) -> CliResult<CmdOutput> {
    match mode {
        DoubleMode::Table => {
            let cfg = DoubleSliceConfig::new(need_n(n, "table")?)?;
            let s = CrossSpectrum::new(&cfg)?;
            let body = match format {
                Format::Csv => {
                    let mut out = String::from("n,d,alpha_12,alpha_21,alpha_22,s,t,u\n");
                    for r in &s.rows {
                        out += &format!(
                            "{},{},{},{},{},{},{},{}\n",
                            cfg.n,
                            r.d,
                            rat_to_string(&r.alpha_12),
                            rat_to_string(&r.alpha_21),
                            rat_to_string(&r.alpha_22),
                            rat_to_string(&r.lambda.s),
                            rat_to_string(&r.lambda.t),
                            r.lambda.u
                        );
                    }
                    out
                }
                _ => render(&s, format, timestamp, || {
                    let mut out = format!("n = {} (k1 = {}, k2 = {})\n", cfg.n, cfg.k1, cfg.k2);
                    for r in &s.rows {
                        out += &format!("d = {}: lambda+ = {}, lambda- = {}\n", r.d, r.lambda.plus(), r.lambda.minus());
                    }
                    out + &format!("lambda_(k+1) = {}\n", rat_to_string(&s.lambda_top))
                })?,
            };
            Ok(CmdOutput { body, exit: EXIT_OK })
        }
        DoubleMode::Stab12 => {
            let r = verify_stab12_bounds(2, k.unwrap_or(50))?;
            let body = render(&r, format, timestamp, || {
                format!(
                    "k = {}..{}\nquadratics: {}\nviolations: {}\nmin lower margin: {:.6}\n",
                    r.k_min,
                    r.k_max,
                    r.quadratics_checked,
                    r.violation_count(),
                    r.min_lower_margin
                )
            })?;
            Ok(CmdOutput { body, exit: exit_for(r.violation_count() == 0) })
        }
        DoubleMode::TwoSlice => {
            let r = verify_two_slice(need_n(n, "two-slice")?)?;
            let body = render(&r, format, timestamp, || {
                format!(
                    "n = {}\nqualifying: {}\nviolations: {}\nmin (p1 - 1/2)^2: {}\n",
                    r.n,
                    r.qualifying,
                    r.violation_count(),
                    r.min_p1_offset_sq.as_ref().map(rat_to_string).unwrap_or_else(|| "-".into())
                )
            })?;
            Ok(CmdOutput { body, exit: exit_for(r.violation_count() == 0) })
        }
        DoubleMode::Operator => {
            let cfg = DoubleSliceConfig::new(need_n(n, "operator")?)?;
            let r = t_operator_check(&cfg, 100, 0)?;
            let body = render(&r, format, timestamp, || format!("n = {}\npassed: {}\n", r.n, r.passed()))?;
            Ok(CmdOutput { body, exit: exit_for(r.passed()) })
        }
    }
}

fn load_checkpoint(path: Option<&Path>) -> CliResult<Option<Checkpoint>> {
    match path {
        Some(p) if p.exists() => Ok(Some(serde_json::from_str(&read_file(p)?)?)),
        _ => Ok(None),
    }
}

fn saver(path: Option<&Path>) -> impl FnMut(&Checkpoint) -> swf_core::Result<()> + '_ {
    move |cp| match path {
        Some(p) => {
            let body = serde_json::to_string(cp).map_err(|e| SwfError::Parse(e.to_string()))?;
            write_file(p, &body).map_err(|e| SwfError::Parse(e.to_string()))
        }
        None => Ok(()),
    }
}

fn search_text(r: &SearchReport) -> String {
    let mut s = format!(
        "n = {}\nmode: {:?}\norbits: {}\nnodes: {}\nfunctions: {}\n",
        r.n,
        r.mode,
        r.orbit_count,
        r.candidates_examined,
        r.functions.len()
    );
    for f in &r.functions {
        s += &format!("  {} {:?}\n", f.orbit_values, f.kind);
    }
    if let Some(c) = &r.counterexamples {
        s += &format!("counterexamples (observational): {}\n", c.len());
    }
    s
}

fn search_exit(r: &SearchReport) -> i32 {
    let ce_ok = r.counterexamples.as_ref().map(|c| c.iter().all(|x| x.reverified)).unwrap_or(true);
    exit_for(r.reverified && ce_ok)
}

pub fn cmd_search(
    n: usize,
    group: Option<&Path>,
    filters: SearchFilters,
    shard: Option<Shard>,
    checkpoint: Option<&Path>,
    format: Format,
    timestamp: bool,
) -> CliResult<CmdOutput> {
    let group = match group {
        Some(p) => load_group(p)?,
        None => PermutationGroup::cyclic(n)?,
    };
    let options = SearchOptions { filters, shard, ..Default::default() };
    let r = run_search(n, &group, SearchMode::Enumerate, &options, load_checkpoint(checkpoint)?, &mut saver(checkpoint))?;
    let body = render(&r, format, timestamp, || search_text(&r))?;
    Ok(CmdOutput { body, exit: search_exit(&r) })
}

pub fn cmd_conjecture(
    n: usize,
    shard: Option<Shard>,
    checkpoint: Option<&Path>,
    format: Format,
    timestamp: bool,
) -> CliResult<CmdOutput> {
    let options = SearchOptions { shard, ..Default::default() };
    let r = conjecture_scan_with(n, &options, load_checkpoint(checkpoint)?, &mut saver(checkpoint))?;
    let body = render(&r, format, timestamp, || search_text(&r))?;
    Ok(CmdOutput { body, exit: search_exit(&r) })
}

/// Parses a search report, ignoring a `generated_at` field.
pub fn parse_report(body: &str) -> CliResult<SearchReport> {
    let mut v: Value = serde_json::from_str(body)?;
    if let Value::Object(map) = &mut v {
        map.remove("generated_at");
    }
    Ok(serde_json::from_value(v)?)
}

pub fn cmd_merge(paths: &[PathBuf], format: Format, timestamp: bool) -> CliResult<CmdOutput> {
    let parts = paths.iter().map(|p| parse_report(&read_file(p)?)).collect::<CliResult<Vec<_>>>()?;
    let r = merge_reports(&parts)?;
    let body = render(&r, format, timestamp, || search_text(&r))?;
    Ok(CmdOutput { body, exit: search_exit(&r) })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalReport {
    pub election: String,
    pub ordering: String,
}

pub fn cmd_eval(g: &Path, election: &str, format: Format, timestamp: bool) -> CliResult<CmdOutput> {
    let g = load_set_function(g)?;
    let e = Election::parse(election)?;
    let o = evaluate_swf(&g, &e)?;
    let r = EvalReport { election: e.to_string(), ordering: o.to_string() };
    let body = render(&r, format, timestamp, || format!("{}\n", r.ordering))?;
    Ok(CmdOutput { body, exit: EXIT_OK })
}

pub fn dispatch(cli: &Cli) -> CliResult<CmdOutput> {
    let ts = !cli.no_timestamp;
    let f = cli.format;
    match &cli.command {
        Command::Construct { n } => cmd_construct(*n, ts),
        Command::Verify { g, group, n } => cmd_verify(g, group.as_deref(), *n, f, ts),
        Command::Spectral { k } => cmd_spectral(*k, f, ts),
        Command::Slicebounds { n, mode } => cmd_slicebounds(*n, *mode, f, ts),
        Command::Doubleslice { n, k, mode } => cmd_doubleslice(*n, *k, *mode, f, ts),
        Command::Search { n, group, decreasing, pareto, shard, checkpoint } => cmd_search(
            *n,
            group.as_deref(),
            SearchFilters { decreasing: *decreasing, pareto: *pareto },
            *shard,
            checkpoint.as_deref(),
            f,
            ts,
        ),
        Command::Conjecture { n, shard, checkpoint } => cmd_conjecture(*n, *shard, checkpoint.as_deref(), f, ts),
        Command::Merge { reports } => cmd_merge(reports, f, ts),
        Command::Eval { g, election } => cmd_eval(g, election, f, ts),
    }
}

/// Result of a full invocation: exit code, stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invocation {
    pub exit: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, S>(args: I) -> Invocation
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let exit = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if exit == EXIT_OK {
                Invocation { exit, stdout: text, stderr: String::new() }
            } else {
                Invocation { exit, stdout: String::new(), stderr: text }
            };
        }
    };
    let out = dispatch(&cli).and_then(|o| match &cli.out {
        Some(p) => write_file(p, &o.body).map(|_| CmdOutput { body: String::new(), exit: o.exit }),
        None => Ok(o),
    });
    match out {
        Ok(o) => Invocation { exit: o.exit, stdout: o.body, stderr: String::new() },
        Err(e) => Invocation { exit: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from(SwfError::BudgetExceeded("x".into())).exit_code(), EXIT_BUDGET);
        assert_eq!(CliError::from(SwfError::InconsistentTriple).exit_code(), EXIT_VIOLATION);
        assert_eq!(CliError::from(SwfError::Parse("x".into())).exit_code(), EXIT_USAGE);
        assert_eq!(CliError::Usage("x".into()).exit_code(), EXIT_USAGE);
    }

    #[test]
    fn table_budget() {
        assert!(check_table_budget(20).is_ok());
        assert!(matches!(check_table_budget(64), Err(CliError::Core(SwfError::BudgetExceeded(_)))));
    }

    #[test]
    fn timestamp_is_added_and_stripped() {
        let r = swf_core::search::enumerate_consistent(
            3,
            &PermutationGroup::cyclic(3).unwrap(),
            SearchFilters::default(),
        )
        .unwrap();
        let body = json_body(&r, true).unwrap();
        assert!(body.contains("generated_at"));
        assert_eq!(parse_report(&body).unwrap(), r);
        assert!(!json_body(&r, false).unwrap().contains("generated_at"));
    }

    #[test]
    fn csv_only_where_defined() {
        assert!(cmd_spectral(3, Format::Csv, false).is_ok());
        assert!(matches!(cmd_slicebounds(6, SliceMode::InvariantOnly, Format::Csv, false), Err(CliError::Usage(_))));
    }
}
