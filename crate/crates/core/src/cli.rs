//! The `icn` command: space generation, learning, evaluation and solving.
//!
//! Every command that writes files also writes a `<file>.manifest` sidecar
//! (or `manifest` inside an output directory) holding the command, the full
//! configuration, the master seed, the tool version, and SHA-256 digests of
//! every input and output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use crate::concepts::{ConstraintInstance, ConstraintKind};
use crate::error::{Error, Result};
use crate::ga::{learn_runs, summarize, GaConfig};
use crate::hamming::{label_space_costs, label_space_reference_costs, SolutionSet};
use crate::icn::{self, normalized_mean_error, GenomeFile};
use crate::solver::{benchmark_sudoku, BenchReport, RunStats, Variant};
use crate::spaces::{
    enumerate_complete_with_cap, sample_balanced_with, LabeledSpace, SamplingOptions,
    DEFAULT_DRAW_BUDGET, DEFAULT_ENUMERATION_CAP,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(
    name = "icn",
    version,
    about = "Learn interpretable error functions for constraints"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a labeled assignment space with Hamming costs.
    GenSpace(GenSpaceArgs),
    /// Learn error functions on a space file.
    Learn(LearnArgs),
    /// Evaluate genome files on a space file.
    Eval(EvalArgs),
    /// Run the Sudoku benchmark.
    Solve(SolveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CostMode {
    /// Distance to the nearest of all enumerated solutions.
    Exact,
    /// Distance to the nearest solution present in the space.
    Nearest,
    /// Exact distance from a per-kind closed form or search.
    Reference,
    /// Leave costs empty.
    None,
}

#[derive(Debug, Args)]
pub struct GenSpaceArgs {
    #[arg(long)]
    pub kind: ConstraintKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub lo: i64,
    #[arg(long)]
    pub hi: i64,
    #[arg(long, default_value_t = 0)]
    pub p: i64,
    /// Enumerate every assignment.
    #[arg(long, conflicts_with = "sampled")]
    pub complete: bool,
    /// Sample `k` solutions and `k` non-solutions.
    #[arg(long, requires = "k")]
    pub sampled: bool,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to exact for complete spaces and nearest for sampled ones.
    #[arg(long, value_enum)]
    pub cost: Option<CostMode>,
    #[arg(long, default_value_t = DEFAULT_DRAW_BUDGET)]
    pub budget: u64,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u64,
    /// Latin hypercube batch size (defaults to the domain size).
    #[arg(long)]
    pub batch: Option<usize>,
    /// Draw solutions from a direct uniform generator where one exists.
    #[arg(long)]
    pub direct_solutions: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    #[arg(long)]
    pub space: PathBuf,
    /// `key=value` file overriding the GA defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// A genome file, or a directory of `*.genome` files.
    #[arg(long)]
    pub genome: PathBuf,
    #[arg(long)]
    pub space: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Block size: 3 for 9x9, 4 for 16x16.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// predicate, handcrafted, feedforward, hardcoded, or all.
    #[arg(long, default_value = "all")]
    pub variant: String,
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
    /// Per-run timeout in milliseconds.
    #[arg(long, default_value_t = 10_000)]
    pub timeout: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Genome file for the network variants (defaults to the known AllDifferent function).
    #[arg(long)]
    pub genome: Option<PathBuf>,
    /// Write per-run rows here instead of standard output.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenSpace(a) => gen_space(&a),
        Command::Learn(a) => learn(&a),
        Command::Eval(a) => eval(&a),
        Command::Solve(a) => solve(&a),
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

/// Provenance record written next to command outputs.
pub struct Manifest {
    command: String,
    seed: Option<u64>,
    config: Vec<(String, String)>,
    inputs: Vec<(String, String)>,
    outputs: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(command: &str, seed: Option<u64>) -> Self {
        Manifest {
            command: command.to_string(),
            seed,
            config: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn config(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.config.push((key.to_string(), value.to_string()));
        self
    }

    pub fn input(&mut self, path: &Path, bytes: &[u8]) -> &mut Self {
        self.inputs
            .push((path.display().to_string(), sha256_hex(bytes)));
        self
    }

    pub fn output(&mut self, path: &Path, bytes: &[u8]) -> &mut Self {
        self.outputs
            .push((path.display().to_string(), sha256_hex(bytes)));
        self
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("command={}\nversion={VERSION}\n", self.command);
        if let Some(s) = self.seed {
            writeln!(out, "seed={s}").unwrap();
        }
        for (k, v) in &self.config {
            writeln!(out, "config.{k}={v}").unwrap();
        }
        for (p, d) in &self.inputs {
            writeln!(out, "input {p} sha256={d}").unwrap();
        }
        for (p, d) in &self.outputs {
            writeln!(out, "output {p} sha256={d}").unwrap();
        }
        out
    }
}

/// `<file>.manifest` next to `path`.
pub fn manifest_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}

fn gen_space(a: &GenSpaceArgs) -> Result<()> {
    let c = ConstraintInstance::new(a.kind, a.n, a.lo, a.hi, a.p)?;
    let space = if a.complete {
        enumerate_complete_with_cap(&c, a.cap)?
    } else if a.sampled {
        let k = a.k.ok_or_else(|| Error::input("--sampled needs --k"))?;
        let opts = SamplingOptions {
            budget: a.budget,
            batch_size: a.batch,
            direct_solutions: a.direct_solutions,
        };
        sample_balanced_with(&c, k, a.seed, opts)?
    } else {
        return Err(Error::input("choose --complete or --sampled"));
    };
    let mode = a.cost.unwrap_or(if a.complete {
        CostMode::Exact
    } else {
        CostMode::Nearest
    });
    let space = match mode {
        CostMode::Exact => label_space_costs(&space, &SolutionSet::enumerate(&c, a.cap)?)?,
        CostMode::Nearest => label_space_costs(&space, &SolutionSet::from_space(&space))?,
        CostMode::Reference => label_space_reference_costs(&space)?,
        CostMode::None => space,
    };

    let text = space.to_text();
    write(&a.out, &text)?;
    let mut m = Manifest::new("gen-space", Some(a.seed));
    m.config("constraint", c)
        .config("mode", if a.complete { "complete" } else { "sampled" })
        .config("k", a.k.map_or("-".to_string(), |k| k.to_string()))
        .config("cost", format!("{mode:?}").to_lowercase())
        .config("budget", a.budget)
        .config("cap", a.cap)
        .config("batch", a.batch.map_or("-".to_string(), |b| b.to_string()))
        .config("direct_solutions", a.direct_solutions)
        .output(&a.out, text.as_bytes());
    write(&manifest_path(&a.out), &m.to_text())?;
    println!(
        "{}: {} entries, {} solutions",
        a.out.display(),
        space.len(),
        space.solution_count()
    );
    Ok(())
}

fn learn(a: &LearnArgs) -> Result<()> {
    let space_text = read(&a.space)?;
    let space = LabeledSpace::from_text(&space_text)?;
    let mut cfg = GaConfig::default();
    let mut m = Manifest::new("learn", Some(a.seed));
    m.input(&a.space, space_text.as_bytes());
    if let Some(path) = &a.config {
        let text = read(path)?;
        cfg = cfg.with_overrides(&text)?;
        m.input(path, text.as_bytes());
    }
    cfg.seed = a.seed;
    cfg.validate()?;
    if a.runs == 0 {
        return Err(Error::input("--runs must be at least 1"));
    }

    let results = learn_runs(&space, &cfg, a.runs, a.jobs)?;
    fs::create_dir_all(&a.out)?;
    for line in cfg.to_text().lines() {
        let (k, v) = line.split_once('=').expect("config lines are key=value");
        m.config(k, v);
    }
    m.config("runs", a.runs);
    for (i, r) in results.iter().enumerate() {
        let file = GenomeFile::for_constraint(r.best_genome, &space.constraint);
        let outputs = [
            (format!("run-{i:03}.genome"), file.to_text()),
            (format!("run-{i:03}.metrics"), r.metrics_text()),
            (format!("run-{i:03}.trace.csv"), r.trace_csv()),
        ];
        for (name, text) in outputs {
            let path = a.out.join(name);
            write(&path, &text)?;
            m.output(&path, text.as_bytes());
        }
    }
    let mut summary = String::from("count\tfunction\n");
    for (desc, count) in summarize(&results) {
        writeln!(summary, "{count}\t{desc}").unwrap();
    }
    let path = a.out.join("summary.txt");
    write(&path, &summary)?;
    m.output(&path, summary.as_bytes());
    write(&a.out.join("manifest"), &m.to_text())?;
    print!("{summary}");
    Ok(())
}

fn genome_files(path: &Path) -> Result<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    files.retain(|p| p.extension().is_some_and(|e| e == "genome"));
    files.sort();
    if files.is_empty() {
        return Err(Error::input(format!(
            "no .genome files in {}",
            path.display()
        )));
    }
    Ok(files)
}

fn eval(a: &EvalArgs) -> Result<()> {
    let space = LabeledSpace::from_text(&read(&a.space)?)?;
    let kind = space.constraint.kind();
    let mut errors = Vec::new();
    for path in genome_files(&a.genome)? {
        let file = GenomeFile::from_text(&read(&path)?)?;
        if let Some(k) = file.kind.filter(|k| *k != kind) {
            return Err(Error::input(format!(
                "{} was learned for {k}, the space is {kind}",
                path.display()
            )));
        }
        let nme = normalized_mean_error(&file.function()?, &space)?;
        println!("{}\t{nme}\t{}", path.display(), icn::describe(file.genome));
        errors.push(nme);
    }
    if errors.len() > 1 {
        let s = RunStats::of(&errors).expect("nonempty");
        println!("median={} mean={} std={}", s.median, s.mean, s.std_dev);
    }
    Ok(())
}

fn solve(a: &SolveArgs) -> Result<()> {
    let variants: Vec<Variant> = if a.variant == "all" {
        Variant::ALL.to_vec()
    } else {
        vec![a.variant.parse()?]
    };
    let mut m = Manifest::new("solve", Some(a.seed));
    let genome = match &a.genome {
        Some(path) => {
            let text = read(path)?;
            m.input(path, text.as_bytes());
            let file = GenomeFile::from_text(&text)?;
            if let Some(k) = file.kind.filter(|k| *k != ConstraintKind::AllDifferent) {
                return Err(Error::input(format!(
                    "{} holds a {k} genome",
                    path.display()
                )));
            }
            file.genome
        }
        None => icn::alldifferent_genome(),
    };
    let mut csv = format!("{}\n", BenchReport::csv_header());
    let mut summary = format!(
        "{:<7} {:<12} {:>10} {:>10} {:>10}\n",
        "grid", "variant", "mean_ms", "median_ms", "std_ms"
    );
    for v in variants {
        let g = v.needs_genome().then_some(genome);
        let report = benchmark_sudoku(a.k, v, g, a.runs, a.timeout, a.seed, a.jobs)?;
        csv.push_str(&report.csv_rows());
        writeln!(summary, "{}", report.summary_line()).unwrap();
    }
    match &a.csv {
        Some(path) => {
            write(path, &csv)?;
            m.config("k", a.k)
                .config("variant", &a.variant)
                .config("runs", a.runs)
                .config("timeout_ms", a.timeout)
                .config("genome", icn::describe(genome))
                .output(path, csv.as_bytes());
            write(&manifest_path(path), &m.to_text())?;
            print!("{summary}");
        }
        None => {
            print!("{csv}");
            eprint!("{summary}");
        }
    }
    Ok(())
}
