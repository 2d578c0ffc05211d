//! Command-line front end and the summary, raw and plot-data file formats.
//!
//! Exit codes: 0 on success, 1 when a sample trips an internal assertion,
//! 2 for usage, parse and input errors.

use std::cmp::Reverse;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::abelian::Partition;
use crate::error::{invalid, Error, Result};
use crate::exactla::IntMatrix;
use crate::graphgen::{AdjacencyMatrix, ModelSpec, Prob};
use crate::invariants::{compute_invariant, KInvariant, Verdict};
use crate::montecarlo::{ci, run_with_sink, sylow_theory, CiReport, Comparison, RunConfig, SampleRecord, TallySheet, Workers};
use crate::theory::{named_constant, ConstantArgs, CONSTANT_NAMES};

/// Version tag of the summary JSON layout.
pub const SCHEMA_VERSION: &str = "kgraph-summary/1";

#[derive(Debug, Parser)]
#[command(name = "kgraph", version, about = "K-theory statistics of random graph C*-algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a random graph model and tally its invariants.
    Simulate(SimulateArgs),
    /// Print limit constants.
    Theory(TheoryArgs),
    /// Classify the graph of one adjacency matrix.
    Inspect(InspectArgs),
    /// Export per-group frequencies of a run as CSV.
    Plotdata(PlotdataArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Bernoulli,
    Erdos,
    Regular,
    Shifted,
    Uniform,
    Polygon,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Edge probability, `a/b` or decimal.
    #[arg(long)]
    pub q: Option<Prob>,
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub m1: Option<usize>,
    #[arg(long)]
    pub m2: Option<usize>,
    /// Polygon multiplicities, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub mbar: Vec<u32>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub primes: Option<Vec<u64>>,
    #[arg(long)]
    pub max_exp: Option<u32>,
    /// Summary JSON path.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-sample CSV path.
    #[arg(long)]
    pub raw: Option<PathBuf>,
    /// Thread count, or `auto`.
    #[arg(long)]
    pub workers: Option<Workers>,
    /// Replay the configuration of a previous summary (or a bare config JSON).
    #[arg(long, conflicts_with_all = ["model", "n", "q", "r", "m1", "m2", "mbar", "samples", "seed", "primes", "max_exp"])]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    /// Constant name; see `--list`.
    pub name: Option<String>,
    #[arg(long)]
    pub list: bool,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub r: Option<u64>,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    /// Adjacency matrix in the text format.
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotStat {
    Sylow,
}

#[derive(Debug, Args)]
pub struct PlotdataArgs {
    /// Summary JSON written by `simulate`.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub stat: PlotStat,
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Reproduction data stored with every summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub model_label: String,
    pub config: RunConfig,
    pub wall_time_s: f64,
    /// `sha256:` digest of the compact JSON of tallies, cis and comparison.
    pub content_hash: String,
    pub raw: Option<RawManifest>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawManifest {
    pub path: String,
    pub rows: u64,
    pub sha256: String,
}

/// The summary JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: String,
    pub manifest: RunManifest,
    pub tallies: TallySheet,
    pub cis: CiReport,
    pub theory_comparison: Vec<Comparison>,
}

impl Summary {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let s: Summary = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        if s.schema_version != SCHEMA_VERSION {
            return invalid(format!("unsupported schema version {:?}", s.schema_version));
        }
        Ok(s)
    }
}

/// Digest over the statistical content of a summary.
pub fn content_hash(tallies: &TallySheet, cis: &CiReport, comparison: &[Comparison]) -> String {
    let body = json!({ "tallies": tallies, "cis": cis, "theory_comparison": comparison });
    let digest = Sha256::digest(body.to_string().as_bytes());
    format!("sha256:{digest:x}")
}

/// Runs the CLI on `args`, writing to the given streams; returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return if code == 0 { 0 } else { 2 };
        }
    };
    let res = match cli.command {
        Command::Simulate(a) => cmd_simulate(&a, out),
        Command::Theory(a) => cmd_theory(&a, out),
        Command::Inspect(a) => cmd_inspect(&a, out),
        Command::Plotdata(a) => cmd_plotdata(&a, out),
    };
    match res {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Assertion { .. } => 1,
        _ => 2,
    }
}

fn require<T>(x: Option<T>, flag: &str, kind: ModelKind) -> Result<T> {
    x.ok_or_else(|| Error::InvalidInput(format!("--{flag} is required for --model {}", kind_name(kind))))
}

fn kind_name(k: ModelKind) -> &'static str {
    match k {
        ModelKind::Bernoulli => "bernoulli",
        ModelKind::Erdos => "erdos",
        ModelKind::Regular => "regular",
        ModelKind::Shifted => "shifted",
        ModelKind::Uniform => "uniform",
        ModelKind::Polygon => "polygon",
    }
}

/// Assembles the model from flags, rejecting parameters it does not take.
pub fn model_from_args(a: &SimulateArgs) -> Result<ModelSpec> {
    let kind = a
        .model
        .ok_or_else(|| Error::InvalidInput("--model is required".into()))?;
    let given = [
        ("n", a.n.is_some()),
        ("q", a.q.is_some()),
        ("r", a.r.is_some()),
        ("m1", a.m1.is_some()),
        ("m2", a.m2.is_some()),
        ("mbar", !a.mbar.is_empty()),
    ];
    let allowed: &[&str] = match kind {
        ModelKind::Bernoulli | ModelKind::Erdos | ModelKind::Shifted => &["n", "q"],
        ModelKind::Regular => &["n", "r"],
        ModelKind::Uniform => &["n", "m1", "m2"],
        ModelKind::Polygon => &["mbar"],
    };
    if let Some((flag, _)) = given.iter().find(|(f, g)| *g && !allowed.contains(f)) {
        return invalid(format!("--{flag} does not apply to --model {}", kind_name(kind)));
    }
    Ok(match kind {
        ModelKind::Bernoulli => ModelSpec::Bernoulli {
            n: require(a.n, "n", kind)?,
            q: require(a.q, "q", kind)?,
        },
        ModelKind::Erdos => ModelSpec::ErdosLoops {
            n: require(a.n, "n", kind)?,
            q: require(a.q, "q", kind)?,
        },
        ModelKind::Shifted => ModelSpec::ShiftedBernoulli {
            n: require(a.n, "n", kind)?,
            q: require(a.q, "q", kind)?,
        },
        ModelKind::Regular => ModelSpec::RegularMatchings {
            n: require(a.n, "n", kind)?,
            r: require(a.r, "r", kind)?,
        },
        ModelKind::Uniform => ModelSpec::UniformCounts {
            n: require(a.n, "n", kind)?,
            m1: require(a.m1, "m1", kind)?,
            m2: require(a.m2, "m2", kind)?,
        },
        ModelKind::Polygon => {
            if a.mbar.is_empty() {
                return invalid("--mbar is required for --model polygon");
            }
            ModelSpec::CuntzPolygon { mbar: a.mbar.clone() }
        }
    })
}

/// The run configuration described by `simulate` flags.
pub fn config_from_args(a: &SimulateArgs) -> Result<RunConfig> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let v: Value = serde_json::from_str(&text)
                .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
            let v = match v.get("manifest") {
                Some(m) => m.get("config").cloned().unwrap_or(Value::Null),
                None => v,
            };
            serde_json::from_value(v).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?
        }
        None => {
            let model = model_from_args(a)?;
            let samples = a
                .samples
                .ok_or_else(|| Error::InvalidInput("--samples is required".into()))?;
            let mut c = RunConfig::new(model, samples, a.seed.unwrap_or(0));
            if let Some(p) = &a.primes {
                c.primes = p.clone();
            }
            if let Some(e) = a.max_exp {
                c.max_exp = e;
            }
            c
        }
    };
    if let Some(w) = a.workers {
        cfg.workers = w;
    }
    cfg.emit_raw = a.raw.is_some();
    cfg.validate()?;
    Ok(cfg)
}

/// Writer that hashes everything passing through it.
struct HashingWriter<W: Write> {
    inner: W,
    hasher: Sha256,
}

impl<W: Write> Write for HashingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Runs a simulation, streaming raw rows to `raw` when given.
pub fn simulate(cfg: &RunConfig, raw: Option<&Path>) -> Result<Summary> {
    let start = Instant::now();
    let mut writer = match raw {
        Some(path) => {
            let file = BufWriter::new(File::create(path)?);
            let mut w = csv::Writer::from_writer(HashingWriter {
                inner: file,
                hasher: Sha256::new(),
            });
            w.write_record(SampleRecord::csv_header(&cfg.primes)).map_err(csv_err)?;
            Some(w)
        }
        None => None,
    };
    let mut rows = 0u64;
    let output = run_with_sink(cfg, |rec| {
        if let Some(w) = writer.as_mut() {
            w.write_record(rec.csv_row()).map_err(csv_err)?;
            rows += 1;
        }
        Ok(())
    })?;
    let raw_manifest = match (writer, raw) {
        (Some(w), Some(path)) => {
            let mut hw = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
            hw.flush()?;
            Some(RawManifest {
                path: path.display().to_string(),
                rows,
                sha256: format!("{:x}", hw.hasher.finalize()),
            })
        }
        _ => None,
    };
    let hash = content_hash(&output.tally, &output.cis, &output.comparison);
    Ok(Summary {
        schema_version: SCHEMA_VERSION.to_string(),
        manifest: RunManifest {
            tool: "kgraph".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            model_label: cfg.model.to_string(),
            config: cfg.clone(),
            wall_time_s: start.elapsed().as_secs_f64(),
            content_hash: hash,
            raw: raw_manifest,
        },
        tallies: output.tally,
        cis: output.cis,
        theory_comparison: output.comparison,
    })
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = config_from_args(a)?;
    let summary = simulate(&cfg, a.raw.as_deref())?;
    let text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(&a.out, text + "\n")?;
    write!(out, "{}", format_report(&summary))?;
    Ok(())
}

fn opt_f(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.5}")).unwrap_or_else(|| "-".to_string())
}

/// Human-readable table of a summary.
pub fn format_report(s: &Summary) -> String {
    let cfg = &s.manifest.config;
    let mut text = format!(
        "{}: {} samples, seed {}, {:.1} s\n",
        s.manifest.model_label, cfg.samples, cfg.master_seed, s.manifest.wall_time_s
    );
    text += &format!(
        "{:<26} {:>8}  {:<20} {:>8}  {:<11} {}\n",
        "statistic", "estimate", "99% interval", "limit", "status", "check"
    );
    let compared: std::collections::BTreeMap<&str, &Comparison> =
        s.theory_comparison.iter().map(|c| (c.stat.as_str(), c)).collect();
    for (stat, c) in &s.cis {
        let (limit, status, check) = match compared.get(stat.as_str()) {
            Some(cmp) => {
                let status = match &cmp.symbol {
                    Some(sym) => format!("{} ({sym})", cmp.status),
                    None => cmp.status.to_string(),
                };
                let check = match cmp.pass {
                    Some(true) => "ok",
                    Some(false) => "off",
                    None => "",
                };
                (opt_f(cmp.theory), status, check)
            }
            None => ("-".to_string(), String::new(), ""),
        };
        text += &format!(
            "{:<26} {:>8.5}  [{:.5}, {:.5}] {:>9}  {:<11} {}\n",
            stat, c.p_hat, c.lo, c.hi, limit, status, check
        );
    }
    text
}

fn cmd_theory(a: &TheoryArgs, out: &mut dyn Write) -> Result<()> {
    let args = ConstantArgs { p: a.p, r: a.r };
    if a.list {
        let mut all = serde_json::Map::new();
        for name in CONSTANT_NAMES {
            match named_constant(name, args) {
                Ok(v) => {
                    if a.json {
                        all.insert(name.to_string(), json!(v));
                    } else {
                        writeln!(out, "{name:<24} {:.10}  ({})", v.value, v.status)?;
                    }
                }
                Err(e) if !a.json => writeln!(out, "{name:<24} -  ({e})")?,
                Err(_) => {}
            }
        }
        if a.json {
            writeln!(out, "{}", Value::Object(all))?;
        }
        return Ok(());
    }
    let Some(name) = &a.name else {
        return invalid("give a constant name or --list");
    };
    let v = named_constant(name, args)?;
    if a.json {
        writeln!(out, "{}", json!({ "name": name, "value": v.value, "status": v.status }))?;
    } else {
        writeln!(out, "{name} = {:.10} ({})", v.value, v.status)?;
    }
    Ok(())
}

/// Reads an adjacency matrix in the text format.
pub fn read_matrix(path: &Path) -> Result<AdjacencyMatrix> {
    let text = std::fs::read_to_string(path)?;
    AdjacencyMatrix::from_int_matrix(&IntMatrix::parse(&text)?)
}

fn yes_no(v: Verdict) -> String {
    match v.reason {
        None => "yes".to_string(),
        Some(r) => format!("no ({r})"),
    }
}

/// Text report for one graph.
pub fn format_inspect(inv: &KInvariant) -> String {
    let mut t = String::new();
    let b = |x: bool| if x { "yes" } else { "no" };
    let diag: Vec<String> = inv.snf_diagonal.iter().map(|d| d.to_string()).collect();
    t += &format!("vertices: {}\n", inv.n);
    t += &format!("strongly connected: {}\n", b(inv.strongly_connected));
    if inv.has_sink {
        t += "sinks: yes (K-theory formula assumes no sinks)\n";
    }
    t += &format!("SNF diagonal of A^t-I: {}\n", diag.join(" "));
    t += &format!("K0={}\n", inv.k0);
    if inv.k1_rank > 0 {
        t += &format!("K1 rank {}, no classification\n", inv.k1_rank);
    } else {
        t += "K1=0\n";
    }
    if let Some(u) = &inv.unit_class {
        let coords = u.coords();
        let label = match coords.len() {
            0 => "0".to_string(),
            1 => coords[0].to_string(),
            _ => u.to_string(),
        };
        t += &format!("unit={label}\n");
    }
    t += &format!("det(I-A)={} (sign {})\n", inv.det_i_minus_a, inv.det_sign());
    t += &format!("stably Cuntz polygon: {}\n", yes_no(inv.stably_cuntz_polygon()));
    t += &format!("stably Cuntz algebra: {}\n", yes_no(inv.stably_cuntz_algebra()));
    t += &format!("exactly Cuntz polygon: {}\n", yes_no(inv.exactly_cuntz_polygon()));
    match inv.cuntz_index() {
        Some(k) => t += &format!("exactly Cuntz: O_{k}\n"),
        None => t += &format!("exactly Cuntz: {}\n", yes_no(inv.exactly_cuntz_algebra())),
    }
    t += &format!("full shift: {}\n", yes_no(inv.flow_equiv_full_shift()));
    t
}

fn cmd_inspect(a: &InspectArgs, out: &mut dyn Write) -> Result<()> {
    let inv = compute_invariant(&read_matrix(&a.matrix)?);
    if a.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&inv.to_json()).expect("json"))?;
    } else {
        write!(out, "{}", format_inspect(&inv))?;
    }
    Ok(())
}

/// One row of the plot-data CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotRow {
    pub group_label: String,
    pub empirical_freq: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub theory_value: Option<f64>,
    pub theory_status: String,
}

/// Sylow `p` frequencies of a run, ordered by group order then partition.
pub fn sylow_plot_rows(s: &Summary, p: u64) -> Result<Vec<PlotRow>> {
    let Some(t) = s.tallies.primes.get(&p) else {
        return invalid(format!("prime {p} was not profiled in this run"));
    };
    let mut entries: Vec<(Partition, u64)> = t
        .histogram
        .iter()
        .map(|(label, &c)| Ok((label.parse::<Partition>()?, c)))
        .collect::<Result<_>>()?;
    entries.sort_by_key(|(part, _)| (part.size(), Reverse(part.clone())));
    entries
        .into_iter()
        .map(|(part, count)| {
            let c = ci(count, s.tallies.m)?;
            let th = sylow_theory(&s.manifest.config.model, p, &part);
            Ok(PlotRow {
                group_label: part.group_label(p),
                empirical_freq: c.p_hat,
                ci_lo: c.lo,
                ci_hi: c.hi,
                theory_value: th.map(|x| x.value),
                theory_status: th.map(|x| x.status.to_string()).unwrap_or_else(|| "none".into()),
            })
        })
        .collect()
}

/// Writes plot rows as CSV; an empty list gives the header alone.
pub fn write_plot_csv<W: Write>(rows: &[PlotRow], w: W) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wr.write_record(["group_label", "empirical_freq", "ci_lo", "ci_hi", "theory_value", "theory_status"])
        .map_err(csv_err)?;
    for r in rows {
        wr.serialize(r).map_err(csv_err)?;
    }
    wr.flush()?;
    Ok(())
}

fn cmd_plotdata(a: &PlotdataArgs, out: &mut dyn Write) -> Result<()> {
    let s = Summary::load(&a.input)?;
    let rows = match a.stat {
        PlotStat::Sylow => sylow_plot_rows(&s, a.p)?,
    };
    match &a.out {
        Some(path) => write_plot_csv(&rows, BufWriter::new(File::create(path)?)),
        None => write_plot_csv(&rows, out),
    }
}
