//! Command-line driver: searches, deformations, distance, metrics, graphs
//! and CSV export over JSON encoding documents.

pub mod config;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use fermenc::connectivity::{build_graph, build_graph_on_patch, max_degree, thickness_upper_bound, to_dot, to_json};
use fermenc::distance::{DistanceBudget, DistanceEngine};
use fermenc::document::{word_to_sparse, EncodingDocument, MetricsDoc, Provenance};
use fermenc::encoding::{compute_metrics, Metrics};
use fermenc::exec;
use fermenc::fermion::HamiltonianSpec;
use fermenc::search::{
    brute_force_search, clifford_deform_search, CliffordConfig, Found, HoppingCapMode, SearchConfig, SearchReport,
};
use fermenc::{EdgeSet, EncodingCandidate, Error, Scheme, UnitCellLayout};

use config::FlatConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_TRUNCATED: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Core(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dot,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "fermenc", version, about = "Search and analyse fermion-to-qubit encodings")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (default 1).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides rng_seed from the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Largest error weight the distance search tries.
    #[arg(long = "w-max", global = true)]
    w_max: Option<u32>,
    /// Output path (default stdout).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Brute-force search driven by a config file.
    Search { config: PathBuf },
    /// Clifford deformation of a base encoding, driven by a config file.
    Deform { config: PathBuf },
    /// Code distance of an encoding document.
    Distance { encoding: PathBuf },
    /// Weights, distance and connectivity of an encoding document.
    Metrics {
        encoding: PathBuf,
        /// Hopping, next-nearest hopping and on-site strengths: t,tprime,U.
        #[arg(long, default_value = "1,0,1")]
        hamiltonian: String,
    },
    /// Qubit-connectivity graph of an encoding document.
    Graph {
        encoding: PathBuf,
        #[arg(long, default_value = "1,0,1")]
        hamiltonian: String,
        /// Side of the square block of anchor cells.
        #[arg(long, default_value_t = 3)]
        patch: usize,
    },
    /// Table of a front file (JSON lines of encoding documents).
    Export {
        front: PathBuf,
        /// Shorthand for --format csv.
        #[arg(long)]
        csv: bool,
    },
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if let CliError::Core(Error::Invalid(violations)) = &e {
                for v in violations {
                    let _ = writeln!(stderr, "  {v}");
                }
            }
            EXIT_INPUT
        }
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Search { config } => cmd_search(cli, config, stdout, stderr),
        Command::Deform { config } => cmd_deform(cli, config, stdout, stderr),
        Command::Distance { encoding } => cmd_distance(cli, encoding, stdout),
        Command::Metrics { encoding, hamiltonian } => cmd_metrics(cli, encoding, hamiltonian, stdout),
        Command::Graph {
            encoding,
            hamiltonian,
            patch,
        } => cmd_graph(cli, encoding, hamiltonian, *patch, stdout),
        Command::Export { front, csv } => cmd_export(cli, front, *csv, stdout),
    }
}

fn open_output<'a>(path: Option<&Path>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(stdout),
    })
}

/// `--output` wins; else the config's `output` key, relative to the config file.
fn output_path(cli: &Cli, cfg: &mut FlatConfig) -> Result<Option<PathBuf>, CliError> {
    let from_cfg: Option<String> = cfg.get("output")?;
    Ok(cli
        .output
        .clone()
        .or_else(|| from_cfg.map(|p| cfg.base_dir().join(p))))
}

fn read_document(path: &Path) -> Result<EncodingDocument, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    EncodingDocument::from_json(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_encoding(path: &Path) -> Result<(EncodingDocument, EncodingCandidate), CliError> {
    let doc = read_document(path)?;
    let enc = doc.import()?;
    Ok((doc, enc))
}

pub fn parse_hamiltonian(s: &str) -> Result<HamiltonianSpec, CliError> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Input(format!("--hamiltonian expects t,tprime,U; got {s:?}")))?;
    match parts[..] {
        [t, t_prime, u] => Ok(HamiltonianSpec { t, t_prime, u }),
        _ => Err(CliError::Input(format!("--hamiltonian expects three numbers; got {s:?}"))),
    }
}

fn layout_from(cfg: &mut FlatConfig) -> Result<UnitCellLayout, CliError> {
    let n: usize = cfg.require("qubits_per_cell")?;
    let scheme: Scheme = cfg.get_or("scheme", Scheme::TwoGrids)?;
    let edges: EdgeSet = cfg.get_or("edge_set", EdgeSet::NNSquare)?;
    UnitCellLayout::new(n, scheme, edges).map_err(|e| cfg.blame("qubits_per_cell", e))
}

/// Read a search config; exposed for tests.
pub fn search_config(cfg: &mut FlatConfig) -> Result<SearchConfig, CliError> {
    let mut sc = SearchConfig::new(layout_from(cfg)?);
    sc.max_vertex_weight = cfg.get_or("max_vertex_weight", sc.max_vertex_weight)?;
    sc.max_edge_or_hopping_weight = cfg.get_or("max_edge_or_hopping_weight", sc.max_edge_or_hopping_weight)?;
    sc.hopping_cap_mode = cfg.get_or("hopping_cap_mode", HoppingCapMode::Nn)?;
    sc.min_distance_filter = cfg.get_or("min_distance_filter", sc.min_distance_filter)?;
    sc.min_logical_weight_filter = cfg.get("min_logical_weight_filter")?;
    sc.max_stabilizer_weight = cfg.get("max_stabilizer_weight")?;
    sc.acceptance_probability = cfg.get_or("acceptance_probability", sc.acceptance_probability)?;
    sc.rng_seed = cfg.get_or("rng_seed", sc.rng_seed)?;
    sc.node_budget = cfg.get("node_budget")?;
    sc.distance_w_max = cfg.get_or("distance_w_max", sc.distance_w_max)?;
    sc.threads = cfg.get_or("threads", 1)?;
    if let Err(e) = sc.check() {
        let key = ["acceptance_probability", "max_vertex_weight", "max_edge_or_hopping_weight", "min_distance_filter", "distance_w_max"]
            .into_iter()
            .find(|k| e.to_string().contains(k))
            .unwrap_or("qubits_per_cell");
        return Err(cfg.blame(key, e));
    }
    Ok(sc)
}

/// Read a deformation config; `base` is resolved against the config file.
pub fn deform_config(cfg: &mut FlatConfig) -> Result<CliffordConfig, CliError> {
    let base: String = cfg.require("base")?;
    let (_, enc) = load_encoding(&cfg.base_dir().join(&base))?;
    let mut cc = CliffordConfig::new(enc);
    cc.n_single_qubit_samples = cfg.get_or("n_single_qubit_samples", cc.n_single_qubit_samples)?;
    cc.n_cnot_pairs = cfg.get_or("n_cnot_pairs", cc.n_cnot_pairs)?;
    cc.max_sequence_length = cfg.get_or("max_sequence_length", cc.max_sequence_length)?;
    cc.rng_seed = cfg.get_or("rng_seed", cc.rng_seed)?;
    cc.min_distance_filter = cfg.get_or("min_distance_filter", cc.min_distance_filter)?;
    cc.max_vertex_weight = cfg.get("max_vertex_weight")?;
    cc.max_hopping_weight = cfg.get("max_hopping_weight")?;
    cc.distance_w_max = cfg.get_or("distance_w_max", cc.distance_w_max)?;
    cc.max_sequences = cfg.get("max_sequences")?;
    cc.threads = cfg.get_or("threads", 1)?;
    if cc.min_distance_filter == 0 {
        return Err(cfg.blame("min_distance_filter", "must be at least 1"));
    }
    Ok(cc)
}

fn apply_overrides(cli: &Cli, cfg: &mut FlatConfig) {
    if let Some(s) = cli.seed {
        cfg.set("rng_seed", s);
    }
    if let Some(t) = cli.threads {
        cfg.set("threads", t);
    }
    if let Some(w) = cli.w_max {
        cfg.set("distance_w_max", w);
    }
}

fn report_json(report: &SearchReport, source: &str, hash: &str) -> serde_json::Value {
    json!({
        "kind": "report",
        "source": source,
        "config_hash": hash,
        "nodes": report.nodes,
        "completions": report.completions,
        "passed": report.passed,
        "accepted": report.accepted,
        "truncated": report.truncated,
        "best_distance": report.best_distance.map(|d| d.to_string()),
        "front_size": report.front_size,
    })
}

fn found_document(f: &Found, source: &str, hash: &str) -> EncodingDocument {
    let prov = Provenance {
        source: Some(source.into()),
        config_hash: Some(hash.into()),
        index: Some(f.index),
        gates: f.gates.iter().map(|g| g.to_string()).collect(),
    };
    EncodingDocument::from_encoding(&f.encoding, Some(&f.metrics), Some(prov))
}

/// Stream JSON lines, then write the report next to the output (or to stderr).
fn finish_stream(
    out_path: Option<&Path>,
    report: &SearchReport,
    source: &str,
    hash: &str,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let line = report_json(report, source, hash).to_string();
    match out_path {
        Some(p) => {
            let mut rp = p.as_os_str().to_owned();
            rp.push(".report.json");
            std::fs::write(PathBuf::from(rp), format!("{line}\n"))?;
        }
        None => writeln!(stderr, "{line}")?,
    }
    Ok(if report.truncated { EXIT_TRUNCATED } else { EXIT_OK })
}

fn cmd_search(cli: &Cli, path: &Path, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let mut cfg = FlatConfig::load(path)?;
    apply_overrides(cli, &mut cfg);
    let out_path = output_path(cli, &mut cfg)?;
    let sc = search_config(&mut cfg)?;
    cfg.finish()?;
    let hash = cfg.hash();
    let mut out = open_output(out_path.as_deref(), stdout)?;
    let mut io_err = None;
    let outcome = brute_force_search(&sc, &mut |f| {
        if io_err.is_none() {
            if let Err(e) = writeln!(out, "{}", found_document(f, "search", &hash).to_json_line()).and_then(|_| out.flush()) {
                io_err = Some(e);
            }
        }
    })?;
    if let Some(e) = io_err {
        return Err(e.into());
    }
    out.flush()?;
    drop(out);
    finish_stream(out_path.as_deref(), &outcome.report, "search", &hash, stderr)
}

fn cmd_deform(cli: &Cli, path: &Path, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let mut cfg = FlatConfig::load(path)?;
    apply_overrides(cli, &mut cfg);
    let out_path = output_path(cli, &mut cfg)?;
    let cc = deform_config(&mut cfg)?;
    cfg.finish()?;
    let hash = cfg.hash();
    let mut out = open_output(out_path.as_deref(), stdout)?;
    let mut io_err = None;
    let outcome = clifford_deform_search(&cc, &mut |f| {
        if io_err.is_none() {
            if let Err(e) = writeln!(out, "{}", found_document(f, "deform", &hash).to_json_line()).and_then(|_| out.flush()) {
                io_err = Some(e);
            }
        }
    })?;
    if let Some(e) = io_err {
        return Err(e.into());
    }
    out.flush()?;
    drop(out);
    finish_stream(out_path.as_deref(), &outcome.report, "deform", &hash, stderr)
}

fn cmd_distance(cli: &Cli, path: &Path, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let (_, enc) = load_encoding(path)?;
    let threads = cli.threads.unwrap_or(1);
    let budget = DistanceBudget::new(cli.w_max.unwrap_or(4)).with_workers(threads);
    let (d, witness) = exec::with_threads(threads, || DistanceEngine::new(&enc).map(|e| e.search(&budget)))?;
    let mut out = open_output(cli.output.as_deref(), stdout)?;
    match cli.format.unwrap_or(Format::Text) {
        Format::Json => {
            let v = json!({
                "distance": d.value(),
                "exact": d.is_exact(),
                "witness": witness.map(|w| word_to_sparse(&w, enc.layout())),
            });
            writeln!(out, "{v}")?;
        }
        Format::Text => writeln!(out, "{d}")?,
        f => return Err(CliError::Input(format!("distance does not support --format {f:?}"))),
    }
    Ok(EXIT_OK)
}

/// Metrics plus connectivity columns, in export column order.
pub struct Row {
    pub metrics: MetricsDoc,
    pub max_degree: usize,
    pub thickness_ub: usize,
}

pub const CSV_HEADER: &str = "distance,max_stab_weight,sigma_nn,sigma_nnn,qubit_ratio,max_degree,thickness_ub";

impl Row {
    fn new(enc: &EncodingCandidate, metrics: MetricsDoc, spec: &HamiltonianSpec) -> Result<Row, CliError> {
        let g = build_graph(enc, spec)?;
        Ok(Row {
            metrics,
            max_degree: max_degree(&g),
            thickness_ub: thickness_upper_bound(&g),
        })
    }

    pub fn csv(&self) -> String {
        let m = &self.metrics;
        format!(
            "{},{},{:.4},{:.4},{:.4},{},{}",
            m.distance, m.max_stab_weight, m.sigma_nn, m.sigma_nnn, m.qubit_ratio, self.max_degree, self.thickness_ub
        )
    }

    fn json(&self) -> serde_json::Value {
        json!({
            "metrics": self.metrics,
            "max_degree": self.max_degree,
            "thickness_ub": self.thickness_ub,
        })
    }
}

fn metrics_of(enc: &EncodingCandidate, w_max: u32, threads: usize) -> Result<Metrics, CliError> {
    let budget = DistanceBudget::new(w_max).with_workers(threads);
    Ok(exec::with_threads(threads, || compute_metrics(enc, &budget))?)
}

fn cmd_metrics(cli: &Cli, path: &Path, hamiltonian: &str, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let spec = parse_hamiltonian(hamiltonian)?;
    let (_, enc) = load_encoding(path)?;
    let m = metrics_of(&enc, cli.w_max.unwrap_or(4), cli.threads.unwrap_or(1))?;
    let mut doc = MetricsDoc::of(&m);
    if !spec.includes_nnn() {
        let nnn: Vec<String> = m.terms.iter().filter(|t| t.nnn).map(|t| t.label.clone()).collect();
        doc.terms.retain(|k, _| !nnn.contains(k));
    }
    let row = Row::new(&enc, doc, &spec)?;
    let mut out = open_output(cli.output.as_deref(), stdout)?;
    match cli.format.unwrap_or(Format::Text) {
        Format::Text => {
            writeln!(out, "distance        {}", m.distance)?;
            writeln!(out, "max_stab_weight {}", m.max_stab_weight)?;
            writeln!(out, "sigma_nn        {}", m.sigma_nn)?;
            if spec.includes_nnn() {
                writeln!(out, "sigma_nnn       {}", m.sigma_nnn)?;
            }
            writeln!(out, "qubit_ratio     {:.4}", m.qubit_ratio)?;
            writeln!(out, "max_degree      {}", row.max_degree)?;
            writeln!(out, "thickness_ub    {}", row.thickness_ub)?;
            for (label, w) in &row.metrics.terms {
                writeln!(out, "term {label} {w}")?;
            }
        }
        Format::Json => writeln!(out, "{}", row.json())?,
        Format::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            writeln!(out, "{}", row.csv())?;
        }
        Format::Dot => return Err(CliError::Input("metrics does not support --format dot".into())),
    }
    Ok(EXIT_OK)
}

fn cmd_graph(cli: &Cli, path: &Path, hamiltonian: &str, patch: usize, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let spec = parse_hamiltonian(hamiltonian)?;
    let (_, enc) = load_encoding(path)?;
    let g = build_graph_on_patch(&enc, &spec, patch)?;
    let mut out = open_output(cli.output.as_deref(), stdout)?;
    match cli.format.unwrap_or(Format::Dot) {
        Format::Dot => write!(out, "{}", to_dot(&g))?,
        Format::Json => writeln!(out, "{}", to_json(&g))?,
        Format::Text => {
            writeln!(out, "data_nodes    {}", g.data_nodes.len())?;
            writeln!(out, "ancilla_nodes {}", g.ancilla_nodes.len())?;
            writeln!(out, "edges         {}", g.edge_count())?;
            writeln!(out, "max_degree    {}", max_degree(&g))?;
            writeln!(out, "thickness_ub  {}", thickness_upper_bound(&g))?;
        }
        Format::Csv => return Err(CliError::Input("graph does not support --format csv".into())),
    }
    Ok(EXIT_OK)
}

fn cmd_export(cli: &Cli, path: &Path, csv: bool, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let spec = HamiltonianSpec::default();
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let at = |e: &dyn std::fmt::Display| CliError::Input(format!("{}:{}: {e}", path.display(), i + 1));
        let doc = EncodingDocument::from_json(line).map_err(|e| at(&e))?;
        let enc = doc.import().map_err(|e| at(&e))?;
        let metrics = match doc.metrics {
            Some(m) => m,
            None => MetricsDoc::of(&metrics_of(&enc, cli.w_max.unwrap_or(4), cli.threads.unwrap_or(1))?),
        };
        rows.push(Row::new(&enc, metrics, &spec)?);
    }
    let format = if csv { Format::Csv } else { cli.format.unwrap_or(Format::Csv) };
    let mut out = open_output(cli.output.as_deref(), stdout)?;
    match format {
        Format::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for r in &rows {
                writeln!(out, "{}", r.csv())?;
            }
        }
        Format::Json => {
            for r in &rows {
                writeln!(out, "{}", r.json())?;
            }
        }
        f => return Err(CliError::Input(format!("export does not support --format {f:?}"))),
    }
    Ok(EXIT_OK)
}
