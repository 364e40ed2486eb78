//! `coset` — Schreier automata, coset partitions, and counterexample
//! search in free groups.
//!
//! Five subcommands: `build` a subgroup's coset automaton, `verify` a
//! candidate coset partition (with optional brute-force cross-check),
//! `analyze` its period/multiplicity structure, `genfun` its exact
//! generating-function identity, and `search` index multisets for
//! distinct-index partitions.
//!
//! Every command emits one JSON report embedding a run manifest.  With
//! `--output PATH` the JSON goes to the file and a plain-text summary to
//! standard output; without it, the JSON goes to standard output and the
//! summary to standard error, so stdout is always machine-readable.
//!
//! Exit codes: 0 success (and no counterexample), 1 invalid input,
//! 2 infinite index, 3 invalid partition, 4 counterexample found,
//! 5 resource bound hit (partial report).

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use coset_core::io::{
    self, build_partition, build_subgroup, rational_matrix_value, IoError, PartitionInput,
    SubgroupInput,
};
use coset_core::partition::{
    build_c_matrix, build_d_matrix, density_check, genfun_identity_check,
    period_repetition_checks, theorem1_analyze, verify_partition, PeriodAnalysis,
};
use coset_core::schreier::SchreierError;
use coset_core::search::{resume_search, SearchConfig, SearchError, SearchState};
use coset_core::spectral::{divisibility_check, TransitionMatrix};
use coset_core::CosetPartition;

const EXIT_OK: u8 = 0;
const EXIT_INVALID_INPUT: u8 = 1;
const EXIT_INFINITE_INDEX: u8 = 2;
const EXIT_INVALID_PARTITION: u8 = 3;
const EXIT_COUNTEREXAMPLE: u8 = 4;
const EXIT_RESOURCE_BOUND: u8 = 5;

/// Environment variable giving the default shard (thread) count for
/// `search`.
const THREADS_ENV: &str = "COSET_THREADS";

#[derive(Parser)]
#[command(
    name = "coset",
    version,
    about = "Schreier automata, coset partitions, and counterexample search in free groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a subgroup's coset automaton and report its spectral data.
    Build(BuildArgs),
    /// Verify a coset partition and run the full analysis suite.
    Verify(VerifyArgs),
    /// Period and multiplicity analysis of a valid partition.
    Analyze(AnalyzeArgs),
    /// Exact generating functions of the parts and the sum identity.
    Genfun(GenfunArgs),
    /// Exhaustive partition search over subgroup index multisets.
    Search(SearchArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// Subgroup JSON file: {"alphabet": 2, "generators": ["aa", "ab"]}.
    #[arg(long)]
    input: PathBuf,
    /// Write the JSON report here (summary then goes to stdout).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Partition JSON file: {"alphabet", "subgroups", "parts"}.
    #[arg(long)]
    input: PathBuf,
    /// Cross-check with the brute-force oracle on all positive words up
    /// to this length.
    #[arg(long)]
    max_oracle_len: Option<usize>,
    /// Write the JSON report here (summary then goes to stdout).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Partition JSON file: {"alphabet", "subgroups", "parts"}.
    #[arg(long)]
    input: PathBuf,
    /// Widen two-period tables to 2·h·h' columns instead of lcm(h, h').
    #[arg(long)]
    full_d: bool,
    /// Write the JSON report here (summary then goes to stdout).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenfunArgs {
    /// Partition JSON file: {"alphabet", "subgroups", "parts"}.
    #[arg(long)]
    input: PathBuf,
    /// Check series coefficients up to this length.
    #[arg(long, default_value_t = 20)]
    series: usize,
    /// Write the JSON report here (summary then goes to stdout).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    /// Rank of the free group.
    #[arg(long)]
    rank: usize,
    /// Explicit index multiset, comma-separated (e.g. 2,3,6).
    #[arg(long, value_delimiter = ',', conflicts_with = "max_index")]
    indices: Option<Vec<usize>>,
    /// Enumerate all index multisets with entries up to this bound and
    /// reciprocal sum 1.
    #[arg(long)]
    max_index: Option<usize>,
    /// Allow repeated entries in enumerated multisets.
    #[arg(long)]
    include_repeats: bool,
    /// Cap on the number of parts of enumerated multisets.
    #[arg(long, default_value_t = 12)]
    max_parts: usize,
    /// Select at most one coset per subgroup (the counterexample hunt).
    #[arg(long)]
    distinct_only: bool,
    /// Number of deterministic shards (default: COSET_THREADS or 1).
    #[arg(long)]
    shards: Option<usize>,
    /// Process at most this many new tuples, then stop with a partial
    /// report (exit code 5) and a resumable checkpoint.
    #[arg(long)]
    tuple_budget: Option<usize>,
    /// Resume from a checkpoint file written by --checkpoint.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Write the post-run search state here for later --resume.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Write the JSON report here (summary then goes to stdout).
    #[arg(long)]
    output: Option<PathBuf>,
}

/// A fatal error carrying its exit code.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn input(message: impl fmt::Display) -> CliError {
        CliError { code: EXIT_INVALID_INPUT, message: message.to_string() }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> CliError {
        let code = match &e {
            IoError::Schreier(SchreierError::InfiniteIndex { .. }) => EXIT_INFINITE_INDEX,
            _ => EXIT_INVALID_INPUT,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> CliError {
        CliError::input(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Clap would exit with its own code 2, which this tool
            // reserves for infinite index; usage errors are invalid input.
            let code = if e.use_stderr() { EXIT_INVALID_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Build(args) => cmd_build(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Genfun(args) => cmd_genfun(&args),
        Command::Search(args) => cmd_search(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

// -------------------------------------------------------------------
// Plumbing: manifest, report emission, input loading
// -------------------------------------------------------------------

/// The reproducibility stamp embedded in every report.
fn manifest(
    command: &str,
    inputs: &[&Path],
    output: &Option<PathBuf>,
    flags: &BTreeMap<&str, String>,
    shards: Option<usize>,
) -> Value {
    let mut flag_map = Map::new();
    for (k, v) in flags {
        flag_map.insert((*k).to_string(), Value::String(v.clone()));
    }
    json!({
        "command": command,
        "inputs": inputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "output": output.as_ref().map(|p| p.display().to_string()),
        "flags": Value::Object(flag_map),
        "shards": shards,
        "tool_version": env!("CARGO_PKG_VERSION"),
    })
}

/// Writes the JSON report and the plain-text summary per the output
/// contract: JSON to `--output` (summary to stdout), or JSON to stdout
/// (summary to stderr).
fn emit(report: &Value, output: &Option<PathBuf>, summary: &str) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report).map_err(CliError::input)?;
    text.push('\n');
    match output {
        Some(path) => {
            fs::write(path, text).map_err(|e| {
                CliError::input(format!("cannot write {}: {e}", path.display()))
            })?;
            print!("{summary}");
        }
        None => {
            print!("{text}");
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

fn load_partition(path: &Path) -> Result<CosetPartition, CliError> {
    let text = read_input(path)?;
    let input: PartitionInput = serde_json::from_str(&text).map_err(CliError::input)?;
    build_partition(&input).map_err(CliError::from)
}

/// The parts of a partition as a compact JSON block.
fn partition_value(p: &CosetPartition) -> Value {
    let parts: Vec<Value> = p
        .parts()
        .iter()
        .map(|part| {
            json!({
                "subgroup": part.name,
                "rep": part.rep_or_computed().to_string(),
                "index": part.index(),
            })
        })
        .collect();
    json!({
        "alphabet": p.alphabet().names(),
        "parts": parts,
    })
}

/// Residue tables: one C matrix per period value, one D matrix per
/// ordered pair `h' < h` of period values.
fn residue_tables(
    p: &CosetPartition,
    analysis: &PeriodAnalysis,
    full_d: bool,
) -> (Vec<Value>, Vec<Value>) {
    let mut c_matrices = Vec::new();
    for &h in &analysis.h_set {
        if let Ok(m) = build_c_matrix(p, h) {
            c_matrices.push(json!({ "h": h, "matrix": rational_matrix_value(&m) }));
        }
    }
    let mut d_matrices = Vec::new();
    for &h in &analysis.h_set {
        for &h_prime in &analysis.h_set {
            if h_prime >= h {
                continue;
            }
            if let Ok(m) = build_d_matrix(p, h, h_prime, full_d) {
                let columns = m.first().map_or(0, Vec::len);
                d_matrices.push(json!({
                    "h": h,
                    "h_prime": h_prime,
                    "columns": columns,
                    "matrix": rational_matrix_value(&m),
                }));
            }
        }
    }
    (c_matrices, d_matrices)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

// -------------------------------------------------------------------
// build
// -------------------------------------------------------------------

fn cmd_build(args: &BuildArgs) -> Result<u8, CliError> {
    let text = read_input(&args.input)?;
    let input: SubgroupInput = serde_json::from_str(&text).map_err(CliError::input)?;
    let graph = build_subgroup(&input)?;

    let a = TransitionMatrix::from_graph(&graph);
    let period = a.period().expect("subgroup graphs are irreducible");
    let m = a.min_exponents().expect("subgroup graphs are irreducible");
    let divisibility = divisibility_check(&graph);

    let report = json!({
        "manifest": manifest("build", &[&args.input], &args.output, &BTreeMap::new(), None),
        "graph": io::graph_value(&graph),
        "d": graph.d(),
        "period": period,
        "min_exponents_from_base": m.row(0),
        "divisibility": to_value(&divisibility),
    });
    let summary = format!(
        "subgroup graph: {} state(s) over alphabet {{{}}}\nperiod: {} (divides index: {})\n",
        graph.d(),
        graph.alphabet().names().join(", "),
        period,
        divisibility.divides,
    );
    emit(&report, &args.output, &summary)?;
    Ok(EXIT_OK)
}

// -------------------------------------------------------------------
// verify
// -------------------------------------------------------------------

fn cmd_verify(args: &VerifyArgs) -> Result<u8, CliError> {
    let p = load_partition(&args.input)?;

    let verification = verify_partition(&p);
    let density = density_check(&p);
    let analysis = PeriodAnalysis::of(&p);
    let (c_matrices, d_matrices) = residue_tables(&p, &analysis, false);
    let multiplicity = theorem1_analyze(&p).ok();
    let repetition = period_repetition_checks(&p).ok();
    let genfun = genfun_identity_check(&p, 20);

    let oracle = match args.max_oracle_len {
        None => Value::Null,
        Some(k) => {
            let check = coset_oracle::brute_partition_check(&p, k)
                .map_err(CliError::input)?;
            // The oracle sees only words up to length k, so a clean oracle
            // contradicts invalidity only when the witness is that short.
            let agrees = if !check.ok {
                !verification.valid
            } else {
                verification.valid
                    || verification
                        .witness
                        .as_ref()
                        .is_some_and(|w| w.word.len() > k)
            };
            json!({
                "max_len": k,
                "ok": check.ok,
                "witness": check.witness.as_ref().map(ToString::to_string),
                "witness_multiplicity": check.witness_multiplicity,
                "agrees": agrees,
            })
        }
    };

    let mut flags = BTreeMap::new();
    flags.insert(
        "max-oracle-len",
        args.max_oracle_len.map_or_else(|| "none".to_string(), |k| k.to_string()),
    );
    let report = json!({
        "manifest": manifest("verify", &[&args.input], &args.output, &flags, None),
        "partition": partition_value(&p),
        "verification": io::partition_report_value(&verification),
        "density": io::density_report_value(&density),
        "periods": to_value(&analysis),
        "c_matrices": c_matrices,
        "d_matrices": d_matrices,
        "multiplicity": multiplicity.as_ref().map_or(Value::Null, to_value),
        "repetition_checks": repetition.as_ref().map_or(Value::Null, to_value),
        "genfun": io::genfun_report_value(&genfun),
        "oracle": oracle,
    });

    let witness_line = match &verification.witness {
        Some(w) if w.covered_by.is_empty() => {
            format!("witness: \"{}\" covered by no part\n", w.word)
        }
        Some(w) => format!(
            "witness: \"{}\" covered by parts {:?}\n",
            w.word, w.covered_by
        ),
        None => String::new(),
    };
    let oracle_line = match (args.max_oracle_len, &oracle) {
        (Some(k), Value::Object(o)) => format!(
            "oracle (length <= {k}): {}\n",
            if o["agrees"] == Value::Bool(true) { "agrees" } else { "DISAGREES" }
        ),
        _ => String::new(),
    };
    let summary = format!(
        "partition candidate: {} part(s), indices {:?}\nvalid: {}\n{}periods: {:?}; index multiplicity: {}\ngenerating-function identity: {}\n{}",
        verification.parts,
        verification.indices,
        verification.valid,
        witness_line,
        analysis.periods,
        verification.multiplicity,
        if genfun.holds { "holds" } else { "FAILS" },
        oracle_line,
    );
    emit(&report, &args.output, &summary)?;
    Ok(if verification.valid { EXIT_OK } else { EXIT_INVALID_PARTITION })
}

// -------------------------------------------------------------------
// analyze
// -------------------------------------------------------------------

fn cmd_analyze(args: &AnalyzeArgs) -> Result<u8, CliError> {
    let p = load_partition(&args.input)?;

    let mut flags = BTreeMap::new();
    flags.insert("full-d", args.full_d.to_string());
    let stamp = manifest("analyze", &[&args.input], &args.output, &flags, None);

    let verification = verify_partition(&p);
    if !verification.valid {
        let report = json!({
            "manifest": stamp,
            "partition": partition_value(&p),
            "verification": io::partition_report_value(&verification),
            "error": "not a partition; analysis requires a valid one",
        });
        emit(&report, &args.output, "not a partition: analysis skipped\n")?;
        return Ok(EXIT_INVALID_PARTITION);
    }

    let analysis = PeriodAnalysis::of(&p);
    let (c_matrices, d_matrices) = residue_tables(&p, &analysis, args.full_d);
    let multiplicity = theorem1_analyze(&p).expect("partition was just verified");
    let repetition = period_repetition_checks(&p).expect("partition was just verified");
    let divisibility: Vec<Value> = p
        .parts()
        .iter()
        .map(|part| to_value(&divisibility_check(part.automaton.graph())))
        .collect();

    let report = json!({
        "manifest": stamp,
        "partition": partition_value(&p),
        "periods": to_value(&analysis),
        "divisibility": divisibility,
        "c_matrices": c_matrices,
        "d_matrices": d_matrices,
        "multiplicity": to_value(&multiplicity),
        "repetition_checks": to_value(&repetition),
    });
    let summary = format!(
        "indices: {:?}; periods: {:?}\nanalyzer applicable: {}; predicts multiplicity: {}; actual: {}; falsifier: {}\nrepetition laws: {}\n",
        multiplicity.indices,
        analysis.periods,
        multiplicity.applicable,
        multiplicity.predicts_multiplicity,
        multiplicity.actual_multiplicity,
        multiplicity.falsifier,
        if repetition.pass { "pass" } else { "FAIL" },
    );
    emit(&report, &args.output, &summary)?;
    Ok(EXIT_OK)
}

// -------------------------------------------------------------------
// genfun
// -------------------------------------------------------------------

fn cmd_genfun(args: &GenfunArgs) -> Result<u8, CliError> {
    let p = load_partition(&args.input)?;
    let genfun = genfun_identity_check(&p, args.series);

    let mut flags = BTreeMap::new();
    flags.insert("series", args.series.to_string());
    let report = json!({
        "manifest": manifest("genfun", &[&args.input], &args.output, &flags, None),
        "partition": partition_value(&p),
        "genfun": io::genfun_report_value(&genfun),
    });
    let summary = format!(
        "sum of part series: {}\nexpected: {}\nidentity: {}; coefficients to {}: {}\n",
        genfun.sum,
        genfun.expected,
        if genfun.identity { "holds" } else { "FAILS" },
        genfun.checked_to,
        if genfun.coefficients_ok { "ok" } else { "MISMATCH" },
    );
    emit(&report, &args.output, &summary)?;
    Ok(EXIT_OK)
}

// -------------------------------------------------------------------
// search
// -------------------------------------------------------------------

fn default_shards() -> Result<usize, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(text) => text.parse().map_err(|_| {
            CliError::input(format!("{THREADS_ENV} must be a positive integer, got {text:?}"))
        }),
        Err(_) => Ok(1),
    }
}

fn cmd_search(args: &SearchArgs) -> Result<u8, CliError> {
    let shards = match args.shards {
        Some(s) => s,
        None => default_shards()?,
    };
    let cfg = SearchConfig {
        rank: args.rank,
        indices: args.indices.clone(),
        max_index: args.max_index,
        include_repeats: args.include_repeats,
        max_parts: args.max_parts,
        distinct_only: args.distinct_only,
        shards,
        tuple_budget: args.tuple_budget,
    };

    let state = match &args.resume {
        None => SearchState::empty(shards),
        Some(path) => {
            let text = read_input(path)?;
            let value: Value = serde_json::from_str(&text).map_err(CliError::input)?;
            io::search_state_from_value(value)?
        }
    };

    let (report, new_state) = resume_search(&cfg, state)?;

    if let Some(path) = &args.checkpoint {
        let mut text = serde_json::to_string_pretty(&io::search_state_value(&new_state))
            .map_err(CliError::input)?;
        text.push('\n');
        fs::write(path, text).map_err(|e| {
            CliError::input(format!("cannot write {}: {e}", path.display()))
        })?;
    }

    let mut flags = BTreeMap::new();
    flags.insert("rank", args.rank.to_string());
    flags.insert(
        "indices",
        args.indices.as_ref().map_or_else(
            || "none".to_string(),
            |v| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
        ),
    );
    flags.insert(
        "max-index",
        args.max_index.map_or_else(|| "none".to_string(), |v| v.to_string()),
    );
    flags.insert("include-repeats", args.include_repeats.to_string());
    flags.insert("max-parts", args.max_parts.to_string());
    flags.insert("distinct-only", args.distinct_only.to_string());
    flags.insert(
        "tuple-budget",
        args.tuple_budget.map_or_else(|| "none".to_string(), |v| v.to_string()),
    );
    flags.insert(
        "resume",
        args.resume
            .as_ref()
            .map_or_else(|| "none".to_string(), |p| p.display().to_string()),
    );
    flags.insert(
        "checkpoint",
        args.checkpoint
            .as_ref()
            .map_or_else(|| "none".to_string(), |p| p.display().to_string()),
    );
    let inputs: Vec<&Path> = args.resume.iter().map(PathBuf::as_path).collect();

    let doc = json!({
        "manifest": manifest("search", &inputs, &args.output, &flags, Some(shards)),
        "report": to_value(&report),
    });
    let summary = format!(
        "searched {} / {} tuple(s) over {} multiset(s) ({})\npartitions found: {}; distinct-index counterexamples: {}\n",
        report.tuples_processed,
        report.total_tuples,
        report.multisets.len(),
        if report.complete { "complete" } else { "incomplete" },
        report.partitions.len(),
        report.counterexamples.len(),
    );
    emit(&doc, &args.output, &summary)?;

    Ok(if !report.counterexamples.is_empty() {
        EXIT_COUNTEREXAMPLE
    } else if !report.complete {
        EXIT_RESOURCE_BOUND
    } else {
        EXIT_OK
    })
}
