//! Command-line surface. Exit codes: 0 ok, 1 a computed difference or failed
//! check, 2 usage error or anything that could not be computed.
//!
//! Stdout gets a short plain-text summary. `--out PATH` writes the structured
//! records there (`-` for stdout, replacing the summary) plus a manifest at
//! `PATH.manifest.json`; without `--out` the manifest goes to stderr as one line.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cache::{table_via, TableCache};
use crate::error::{Error, Result};
use crate::form::{join_coeffs, parse_coeffs, MGonalForm};
use crate::identity::{recompute_s_sets, verify_builtin_sets};
use crate::lab;
use crate::polygonal::{enumerate_values, eval_polygonal, polygonal_index_of};
use crate::report::{
    encode, sha256_hex, unix_ms, CensusCount, DiffRecord, EvalRecord, Format, GridRecord, IdentityRecord,
    LeafRecord, MultiplesRecord, NodeLine, NodePropRecord, PrefixRecord, RunManifest, StabilizeRecord,
    TreeRecord, TruantRecord, ValueRecord, VerdictRecord,
};
use crate::tree::{
    build_tree, build_tree_with, leaf_census, stabilize_gamma, LeafFilter, SearchConfig, DEFAULT_C,
    DEFAULT_DEPTH_BUDGET, DEFAULT_DOUBLINGS, DEFAULT_NODE_BUDGET,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIFFERS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser, Serialize)]
#[command(name = "polyform", version, about = "Escalator trees and truants for m-gonal forms")]
pub struct Cli {
    /// Write structured records here (`-` for stdout).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Lines)]
    pub format: OutFormat,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    Lines,
    Csv,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Lines => Format::Lines,
            OutFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// P_m(x)
    Eval {
        #[arg(long)]
        m: u32,
        #[arg(long, allow_hyphen_values = true)]
        x: i64,
    },
    /// Values of P_m up to B
    Values {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        bound: u64,
    },
    /// Representability table of a form; prints the gaps
    Table(FormArgs),
    /// Least unrepresented integer in [1, B]
    Truant(FormArgs),
    /// Escalator tree statistics
    Tree(TreeArgs),
    /// Leaves of the escalator tree
    Census {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long, conflicts_with_all = ["max_rank", "prefix"])]
        rank: Option<usize>,
        #[arg(long)]
        max_rank: bool,
        #[arg(long, conflicts_with = "max_rank")]
        prefix: Option<String>,
    },
    /// Double B until the tree shape stops changing
    Stabilize {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long, default_value_t = DEFAULT_DOUBLINGS)]
        doublings: u32,
    },
    /// Exact check of every built-in identity set
    VerifyIdentities,
    /// Residue-system grid and its diff against the transcribed tables
    RecomputeS,
    /// Conjecture checks
    #[command(subcommand)]
    Lab(LabCommand),
}

#[derive(Debug, Args, Serialize)]
pub struct FormArgs {
    #[arg(long)]
    pub m: u32,
    /// Comma-separated, non-decreasing.
    #[arg(long, default_value = "")]
    pub coeffs: String,
    #[arg(long)]
    pub bound: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct TreeArgs {
    #[arg(long)]
    pub m: u32,
    #[arg(long, default_value_t = 1000)]
    pub bound: u64,
    #[arg(long, default_value_t = DEFAULT_C)]
    pub c_const: u64,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub node_budget: u64,
    #[arg(long, default_value_t = DEFAULT_DEPTH_BUDGET)]
    pub depth_budget: usize,
}

impl TreeArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            bound: self.bound,
            c_const: self.c_const,
            node_budget: self.node_budget,
            depth_budget: self.depth_budget,
            doublings: DEFAULT_DOUBLINGS,
        }
    }
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabCommand {
    /// Minimal all-ones universal rank against its formula
    Ell {
        /// `3..30` or `3,7,12`
        #[arg(long, default_value = "3..30")]
        ms: String,
        #[arg(long, default_value_t = 100_000)]
        bound: u64,
    },
    /// Power-of-two forms and the short forms' truants
    Pow2 {
        #[arg(long, default_value = "30,31,32,33,34,35")]
        ms: String,
        #[arg(long, default_value_t = 100_000)]
        bound: u64,
    },
    /// Tree leaf-rank extremes against the rank formulas
    Extremes {
        #[arg(long, default_value = "5..10")]
        ms: String,
        #[command(flatten)]
        tree: LabTreeArgs,
    },
    /// Five copies of A*P_m against multiples of A(m-2)
    Multiples {
        #[arg(long, default_value = "1..12")]
        a: String,
        #[arg(long, default_value = "3..30")]
        ms: String,
        #[arg(long, default_value_t = 20)]
        count: u64,
    },
    /// Threes-run and all-ones leaf families
    Families {
        #[arg(long, default_value = "9..15")]
        ms: String,
        #[arg(long, default_value_t = 100_000)]
        bound: u64,
    },
    /// Every node covers [1, min(sum of coefficients, B)]
    Nodeprop {
        #[arg(long)]
        m: u32,
        #[command(flatten)]
        tree: LabTreeArgs,
        /// Sample size; omit to check every node.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Minimal universal rank for each prefix-table row
    Table1 {
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 20_000)]
        bound: u64,
        #[arg(long, default_value_t = 40)]
        max_extra: usize,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct LabTreeArgs {
    #[arg(long, default_value_t = 1000)]
    pub bound: u64,
    #[arg(long, default_value_t = DEFAULT_C)]
    pub c_const: u64,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub node_budget: u64,
}

impl LabTreeArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            bound: self.bound,
            c_const: self.c_const,
            node_budget: self.node_budget,
            ..SearchConfig::default()
        }
    }
}

/// `a..b` (inclusive), or a comma list.
pub fn parse_list(s: &str) -> Result<Vec<u64>> {
    let bad = |e: std::num::ParseIntError| Error::Parse(format!("list {s:?}: {e}"));
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(bad)?;
        let b: u64 = b.trim().parse().map_err(bad)?;
        if a > b {
            return Err(Error::Parse(format!("empty range {s:?}")));
        }
        return Ok((a..=b).collect());
    }
    let v = parse_coeffs(s)?;
    if v.is_empty() {
        return Err(Error::Parse("empty list".into()));
    }
    Ok(v)
}

fn parse_ms(s: &str) -> Result<Vec<u32>> {
    parse_list(s)?
        .into_iter()
        .map(|m| u32::try_from(m).map_err(|_| Error::Parse(format!("m = {m} too large"))))
        .collect()
}

/// What one command produced.
struct Outcome {
    summary: String,
    payload: Vec<u8>,
    /// Extra files: (suffix, bytes).
    extra: Vec<(String, Vec<u8>)>,
    exit: i32,
}

impl Outcome {
    fn ok(summary: String, payload: Vec<u8>) -> Self {
        Outcome {
            summary,
            payload,
            extra: Vec::new(),
            exit: EXIT_OK,
        }
    }

    fn gate(mut self, failed: bool) -> Self {
        if failed {
            self.exit = EXIT_DIFFERS;
        }
        self
    }
}

fn form_of(m: u32, coeffs: &str) -> Result<MGonalForm> {
    MGonalForm::new(m, parse_coeffs(coeffs)?)
}

fn execute(cmd: &Command, fmt: Format) -> Result<Outcome> {
    let cache = TableCache::from_env()?;
    Ok(match cmd {
        Command::Eval { m, x } => {
            let value = eval_polygonal(*m, *x)?;
            let rec = EvalRecord { m: *m, x: *x, value };
            Outcome::ok(value.to_string(), encode(&[rec], fmt)?)
        }
        Command::Values { m, bound } => {
            let vals = enumerate_values(*m, *bound)?;
            let recs = vals
                .iter()
                .map(|v| {
                    Ok(ValueRecord {
                        m: *m,
                        bound: *bound,
                        value: v,
                        index: polygonal_index_of(*m, v)?.expect("enumerated value has an index"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let summary = vals.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
            Outcome::ok(summary, encode(&recs, fmt)?)
        }
        Command::Table(a) | Command::Truant(a) => {
            let form = form_of(a.m, &a.coeffs)?;
            let t = table_via(cache.as_ref(), &form, a.bound)?;
            let tr = t.truant();
            let rec = TruantRecord {
                m: a.m,
                coeffs: form.coeffs_string(),
                bound: a.bound,
                truant: tr.truant(),
                b_universal: tr.is_b_universal(),
                represented: t.bits().count_ones(),
            };
            let summary = match cmd {
                Command::Table(_) => {
                    let gaps = t.gaps();
                    format!(
                        "{} of {} integers in [0, {}] represented; gaps: {}",
                        rec.represented,
                        a.bound + 1,
                        a.bound,
                        if gaps.is_empty() {
                            "none".to_string()
                        } else {
                            gaps.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
                        }
                    )
                }
                _ => tr.truant().map_or("B-universal".to_string(), |v| v.to_string()),
            };
            Outcome::ok(summary, encode(&[rec], fmt)?)
        }
        Command::Tree(t) => {
            let mut nodes = Vec::new();
            let out = build_tree_with(t.m, &t.config(), |n, _| {
                nodes.push(NodeLine {
                    m: n.m,
                    coeffs: join_coeffs(&n.coeffs),
                    rank: n.rank,
                    truant: n.truant,
                    leaf: n.leaf,
                })
            })?;
            let rec = TreeRecord::from(&out.report);
            let summary = format!(
                "m={} B={} gamma_B={} nodes={} leaves={} leaf ranks {}..{} by rank {}{}",
                rec.m,
                rec.bound,
                rec.gamma_b,
                rec.node_count,
                rec.leaf_count,
                fmt_opt(rec.min_leaf_rank),
                fmt_opt(rec.max_leaf_rank),
                rec.leaf_counts,
                if rec.truncated { " (truncated)" } else { "" }
            );
            let mut o = Outcome::ok(summary, encode(&[rec], fmt)?);
            o.extra.push(("nodes".into(), encode(&nodes, fmt)?));
            o
        }
        Command::Census {
            tree,
            rank,
            max_rank,
            prefix,
        } => {
            let out = build_tree(tree.m, &tree.config())?;
            let filter = match (rank, max_rank, prefix) {
                (Some(r), _, _) => LeafFilter::Rank(*r),
                (_, true, _) => LeafFilter::MaxRank,
                (_, _, Some(p)) => LeafFilter::Prefix(parse_coeffs(p)?),
                _ => LeafFilter::All,
            };
            match leaf_census(&out, &filter) {
                Ok(c) => {
                    let recs: Vec<LeafRecord> = c
                        .forms
                        .iter()
                        .map(|f| LeafRecord {
                            m: f.m(),
                            rank: f.rank(),
                            coeffs: f.coeffs_string(),
                        })
                        .collect();
                    let mut summary = format!("{} leaves", recs.len());
                    for (r, n) in &c.count_by_rank {
                        summary.push_str(&format!("; rank {r}: {n}"));
                    }
                    let counts: Vec<CensusCount> = c
                        .count_by_rank
                        .iter()
                        .map(|(&rank, &count)| CensusCount { m: c.m, rank, count })
                        .collect();
                    let mut o = Outcome::ok(summary, encode(&recs, fmt)?);
                    o.extra.push(("counts".into(), encode(&counts, fmt)?));
                    o
                }
                Err(Error::Truncated(msg)) => {
                    Outcome::ok(format!("truncated: {msg}"), encode::<LeafRecord>(&[], fmt)?)
                }
                Err(e) => return Err(e),
            }
        }
        Command::Stabilize { tree, doublings } => {
            let s = stabilize_gamma(tree.m, tree.bound, *doublings, &tree.config())?;
            let recs = StabilizeRecord::from_history(&s.history);
            let summary = format!(
                "gamma_B={} at B={} ({})",
                s.report.gamma_b,
                s.bound,
                if s.converged { "stable" } else { "not converged" }
            );
            Outcome::ok(summary, encode(&recs, fmt)?)
        }
        Command::VerifyIdentities => {
            let sets = verify_builtin_sets();
            let recs = IdentityRecord::from_sets(&sets);
            let failed = recs.iter().filter(|r| !r.passed).count();
            let summary = format!(
                "{} sets, {} checks, {} failed",
                sets.len(),
                recs.len(),
                failed
            );
            Outcome::ok(summary, encode(&recs, fmt)?).gate(failed > 0)
        }
        Command::RecomputeS => {
            let rec = recompute_s_sets()?;
            let grid: Vec<GridRecord> = rec.grid.cells().iter().map(GridRecord::from).collect();
            let diff: Vec<DiffRecord> = rec.diff.entries.iter().map(DiffRecord::from).collect();
            let unexplained = diff.iter().filter(|d| !d.documented).count();
            let summary = format!(
                "{} cells; {} differences from the transcribed tables, {} undocumented",
                grid.len(),
                diff.len(),
                unexplained
            );
            let mut o = Outcome::ok(summary, encode(&grid, fmt)?).gate(unexplained > 0);
            o.extra.push(("diff".into(), encode(&diff, fmt)?));
            o
        }
        Command::Lab(l) => run_lab(l, fmt)?,
    })
}

fn fmt_opt(x: Option<usize>) -> String {
    x.map_or_else(|| "-".into(), |v| v.to_string())
}

fn report_outcome(r: &lab::ConjectureReport, fmt: Format) -> Result<Outcome> {
    let recs = VerdictRecord::from_report(r);
    Ok(Outcome::ok(r.summary(), encode(&recs, fmt)?).gate(r.any_differs()))
}

fn run_lab(cmd: &LabCommand, fmt: Format) -> Result<Outcome> {
    match cmd {
        LabCommand::Ell { ms, bound } => report_outcome(&lab::check_ell(&parse_ms(ms)?, *bound)?, fmt),
        LabCommand::Pow2 { ms, bound } => {
            report_outcome(&lab::check_power2_forms(&parse_ms(ms)?, *bound)?, fmt)
        }
        LabCommand::Extremes { ms, tree } => {
            report_outcome(&lab::check_rank_extremes(&parse_ms(ms)?, &tree.config())?, fmt)
        }
        LabCommand::Families { ms, bound } => {
            report_outcome(&lab::check_leaf_families_range(&parse_ms(ms)?, *bound)?, fmt)
        }
        LabCommand::Multiples { a, ms, count } => {
            let mut recs = Vec::new();
            for &a in &parse_list(a)? {
                for &m in &parse_ms(ms)? {
                    recs.push(MultiplesRecord::from(&lab::check_multiples_lemma(a, m, *count)?));
                }
            }
            let failed = recs.iter().filter(|r| !r.passed).count();
            let summary = format!("{} (A, m) pairs, {} failed", recs.len(), failed);
            Ok(Outcome::ok(summary, encode(&recs, fmt)?).gate(failed > 0))
        }
        LabCommand::Nodeprop {
            m,
            tree,
            sample,
            seed,
        } => {
            let o = lab::check_node_proposition(*m, &tree.config(), *sample, *seed)?;
            let rec = NodePropRecord::from(&o);
            let summary = format!(
                "m={} checked {} of {} nodes: {}{}",
                o.m,
                o.checked,
                o.visited,
                if o.passed { "pass" } else { "fail" },
                if o.truncated { " (truncated)" } else { "" }
            );
            Ok(Outcome::ok(summary, encode(&[rec], fmt)?).gate(!o.passed))
        }
        LabCommand::Table1 {
            m,
            bound,
            max_extra,
        } => {
            let rows = lab::check_prefix_table(*m, *bound, *max_extra)?;
            let recs: Vec<PrefixRecord> = rows.iter().map(|r| PrefixRecord::new(*m, *bound, r)).collect();
            let differs = recs.iter().filter(|r| r.verdict == "differs").count();
            let found = recs.iter().filter(|r| r.min_n.is_some()).count();
            let summary = format!(
                "{} rows, {} with a B-universal extension, {} differ from the closed form",
                recs.len(),
                found,
                differs
            );
            Ok(Outcome::ok(summary, encode(&recs, fmt)?).gate(differs > 0))
        }
    }
}

fn config_echo(cli: &Cli) -> BTreeMap<String, String> {
    fn walk(prefix: &str, v: &serde_json::Value, out: &mut BTreeMap<String, String>) {
        match v {
            serde_json::Value::Object(map) => {
                for (k, v) in map {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&key, v, out);
                }
            }
            serde_json::Value::String(s) => {
                out.insert(prefix.to_string(), s.clone());
            }
            other => {
                out.insert(prefix.to_string(), other.to_string());
            }
        }
    }
    let mut out = BTreeMap::new();
    if let Ok(v) = serde_json::to_value(cli) {
        walk("", &v, &mut out);
    }
    out
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Eval { .. } => "eval",
        Command::Values { .. } => "values",
        Command::Table(_) => "table",
        Command::Truant(_) => "truant",
        Command::Tree(_) => "tree",
        Command::Census { .. } => "census",
        Command::Stabilize { .. } => "stabilize",
        Command::VerifyIdentities => "verify-identities",
        Command::RecomputeS => "recompute-s",
        Command::Lab(l) => match l {
            LabCommand::Ell { .. } => "lab ell",
            LabCommand::Pow2 { .. } => "lab pow2",
            LabCommand::Extremes { .. } => "lab extremes",
            LabCommand::Multiples { .. } => "lab multiples",
            LabCommand::Families { .. } => "lab families",
            LabCommand::Nodeprop { .. } => "lab nodeprop",
            LabCommand::Table1 { .. } => "lab table1",
        },
    }
}

/// `report.csv` + `diff` -> `report.diff.csv`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{suffix}"),
    };
    path.with_file_name(name)
}

fn manifest_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    let started = unix_ms();
    let fmt = Format::from(cli.format);
    let outcome = match execute(&cli.cmd, fmt) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };

    let mut manifest = RunManifest::new(command_name(&cli.cmd), config_echo(&cli), started);
    manifest.payload_hash = sha256_hex(&outcome.payload);
    manifest.exit_code = outcome.exit;

    let written = match &cli.out {
        Some(p) if p.as_os_str() == "-" => {
            let _ = stdout.write_all(&outcome.payload);
            for (_, bytes) in &outcome.extra {
                let _ = stdout.write_all(bytes);
            }
            manifest.outputs.push("-".into());
            Ok(None)
        }
        Some(p) => write_outputs(p, &outcome, &mut manifest).map(|_| Some(p.clone())),
        None => {
            let _ = writeln!(stdout, "{}", outcome.summary);
            Ok(None)
        }
    };
    manifest.finished_unix_ms = unix_ms();
    let result = written.and_then(|p| {
        let json = serde_json::to_string(&manifest)?;
        match p {
            Some(p) => {
                let _ = writeln!(stdout, "{}", outcome.summary);
                fs::write(manifest_path(&p), json + "\n")?;
            }
            None => {
                let _ = writeln!(stderr, "{json}");
            }
        }
        Ok(())
    });
    match result {
        Ok(()) => outcome.exit,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn write_outputs(path: &Path, o: &Outcome, manifest: &mut RunManifest) -> Result<()> {
    fs::write(path, &o.payload)?;
    manifest.outputs.push(path.display().to_string());
    for (suffix, bytes) in &o.extra {
        let p = sibling(path, suffix);
        fs::write(&p, bytes)?;
        manifest.outputs.push(p.display().to_string());
    }
    Ok(())
}

pub fn run() -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists() {
        assert_eq!(parse_list("3..5").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_list("30,60,100").unwrap(), vec![30, 60, 100]);
        assert!(parse_list("5..3").is_err());
        assert!(parse_list("").is_err());
    }

    #[test]
    fn sibling_names() {
        assert_eq!(sibling(Path::new("/t/s.csv"), "diff"), PathBuf::from("/t/s.diff.csv"));
        assert_eq!(sibling(Path::new("s"), "diff"), PathBuf::from("s.diff"));
        assert_eq!(manifest_path(Path::new("s.csv")), PathBuf::from("s.csv.manifest.json"));
    }
}
