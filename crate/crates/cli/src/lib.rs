//! Command-line front end: dataset simulation, corpus ingestion, Dice scoring
//! of mask folders and conformance fixtures.

pub mod config;
pub mod fixtures;

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sonosim::datagen::{
    generate_sim_dataset, ingest_labeled_corpus, read_mask, stream_seed, subsample, DatasetKind, PairNaming,
    SimOptions, SplitPolicy, MANIFEST_FILE,
};
use sonosim::imgops::{dice, mean_std};
use sonosim::Error;

use config::FileConfig;
use fixtures::{format_mean_std, write_fixtures};

#[derive(Debug, Parser)]
#[command(name = "sonosim", version, about = "Simulated ultrasound segmentation dataset factory")]
pub struct Cli {
    /// TOML file with `phantom`, `acoustic`, `grid`, `simulate` and `ingest` sections.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker thread cap.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a B-mode dataset with lesion masks and a manifest.
    Simulate(SimulateArgs),
    /// Validate and import a folder of `<id>.png` / `<id>_mask.png` pairs.
    Ingest(IngestArgs),
    /// Score predicted masks against ground truth masks with matching file names.
    Dice(DiceArgs),
    /// Write golden files for conformance tests.
    Fixtures,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Number of images [default: 700].
    #[arg(long)]
    pub count: Option<usize>,
    /// Also write raw RF lines next to each image.
    #[arg(long)]
    pub dump_rf: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Invivo,
    Natural,
    Simulated,
}

impl From<KindArg> for DatasetKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Invivo => DatasetKind::Invivo,
            KindArg::Natural => DatasetKind::Natural,
            KindArg::Simulated => DatasetKind::Simulated,
        }
    }
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Corpus directory.
    pub dir: PathBuf,
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Training images [default: 19 in vivo, 6000 natural].
    #[arg(long)]
    pub train: Option<usize>,
    /// Validation images [default: 5 in vivo, 2500 natural].
    #[arg(long)]
    pub val: Option<usize>,
    /// Test images [default: the remainder].
    #[arg(long)]
    pub test: Option<usize>,
    /// Keep only this many training images.
    #[arg(long, value_name = "N")]
    pub subsample_train: Option<usize>,
    /// Suffix that marks mask files.
    #[arg(long)]
    pub mask_suffix: Option<String>,
}

#[derive(Debug, Args)]
pub struct DiceArgs {
    pub truth_dir: PathBuf,
    pub pred_dir: PathBuf,
}

/// Failure of a command, mapped to an exit code by [`CliError::exit_code`].
#[derive(Debug)]
pub enum CliError {
    /// Bad invocation; exit code 2.
    Usage(String),
    /// Domain or validation failure; exit code 1.
    Domain(Error),
    /// Files present in only one of the Dice directories; exit code 1.
    Unmatched { truth_only: Vec<String>, pred_only: Vec<String> },
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            _ => ExitCode::from(1),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Unmatched { truth_only, pred_only } => {
                write!(f, "unmatched mask files")?;
                for name in truth_only {
                    write!(f, "\n  only in truth: {name}")?;
                }
                for name in pred_only {
                    write!(f, "\n  only in pred: {name}")?;
                }
                Ok(())
            }
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Domain(Error::io("<stdout>", e))
    }
}

/// Global settings after merging the config file and flags.
struct Settings {
    file: FileConfig,
    seed: u64,
    out: Option<PathBuf>,
}

impl Settings {
    fn out(&self, command: &str) -> Result<&Path, CliError> {
        self.out.as_deref().ok_or_else(|| CliError::Usage(format!("`{command}` requires --out <DIR>")))
    }
}

/// Runs a parsed command line, writing the report to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let threads = cli.threads.map(usize::from).or(file.threads);
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::config("threads must be >= 1").into());
        }
        // Fails only if a global pool already exists, as when embedded in a larger program.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let settings = Settings {
        seed: cli.seed.or(file.seed).unwrap_or(0),
        out: cli.out.clone().or_else(|| file.out.clone()),
        file,
    };
    match cli.command {
        Command::Simulate(args) => cmd_simulate(&settings, &args, stdout),
        Command::Ingest(args) => cmd_ingest(&settings, &args, stdout),
        Command::Dice(args) => cmd_dice(&args.truth_dir, &args.pred_dir, stdout),
        Command::Fixtures => cmd_fixtures(&settings, stdout),
    }
}

/// Parses `std::env::args`, runs and reports errors on stderr.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match run(cli, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn cmd_simulate(s: &Settings, args: &SimulateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let out = s.out("simulate")?;
    let sim = s.file.simulation()?;
    let count = args.count.or(s.file.simulate.count).unwrap_or(700);
    let opts = SimOptions { dump_rf: args.dump_rf || s.file.simulate.dump_rf };
    let manifest = generate_sim_dataset(&sim, count, s.seed, out, &opts)?;
    writeln!(stdout, "manifest: {}", out.join(MANIFEST_FILE).display())?;
    writeln!(stdout, "{}", manifest.counts)?;
    Ok(())
}

fn cmd_ingest(s: &Settings, args: &IngestArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let out = s.out("ingest")?;
    let cfg = &s.file.ingest;
    let kind: DatasetKind = args.kind.into();
    let split_seed = stream_seed(s.seed, "split");
    let train = args.train.or(cfg.train);
    let val = args.val.or(cfg.val);
    let test = args.test.or(cfg.test);
    let policy = match (train, val) {
        (Some(train), Some(val)) => SplitPolicy::counts(train, val, test, split_seed),
        (None, None) if test.is_none() => match kind {
            DatasetKind::Invivo => SplitPolicy::counts(19, 5, None, split_seed),
            DatasetKind::Natural => SplitPolicy::counts(6000, 2500, Some(1500), split_seed),
            DatasetKind::Simulated => SplitPolicy::simulated(split_seed),
        },
        _ => return Err(CliError::Usage("--train and --val must be given together".into())),
    };
    let naming = PairNaming {
        mask_suffix: args.mask_suffix.clone().or_else(|| cfg.mask_suffix.clone()).unwrap_or_else(|| "_mask".into()),
        ..PairNaming::default()
    };
    if !args.dir.is_dir() {
        return Err(Error::io(&args.dir, std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory")).into());
    }
    let mut manifest = ingest_labeled_corpus(&args.dir, kind, &policy, out, &naming)?;
    if let Some(n) = args.subsample_train.or(cfg.subsample_train) {
        manifest = subsample(&manifest, n, stream_seed(s.seed, "subsample"))?;
        manifest.master_seed = s.seed;
        manifest.write(&out.join(MANIFEST_FILE))?;
    }
    writeln!(stdout, "manifest: {}", out.join(MANIFEST_FILE).display())?;
    writeln!(stdout, "{}", manifest.counts)?;
    Ok(())
}

fn png_names(dir: &Path) -> Result<BTreeSet<String>, CliError> {
    let mut names = BTreeSet::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_png = path.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if path.is_file() && is_png {
            if let Some(name) = path.file_name().and_then(|n| n.to_str()) {
                names.insert(name.to_string());
            }
        }
    }
    Ok(names)
}

/// Per-image DSC lines followed by `DSC m ± s (n = ...)` with the population standard deviation.
pub fn cmd_dice(truth_dir: &Path, pred_dir: &Path, stdout: &mut dyn Write) -> Result<(), CliError> {
    let truth = png_names(truth_dir)?;
    let pred = png_names(pred_dir)?;
    if truth != pred {
        return Err(CliError::Unmatched {
            truth_only: truth.difference(&pred).cloned().collect(),
            pred_only: pred.difference(&truth).cloned().collect(),
        });
    }
    if truth.is_empty() {
        return Err(Error::EmptyInput.into());
    }
    let mut scores = Vec::with_capacity(truth.len());
    for name in &truth {
        let t = read_mask(&truth_dir.join(name))?;
        let p = read_mask(&pred_dir.join(name))?;
        let d = dice(&t, &p)?;
        writeln!(stdout, "{name}\t{d:.4}")?;
        scores.push(d);
    }
    let (mean, std) = mean_std(&scores);
    writeln!(stdout, "DSC {} (n = {})", format_mean_std(mean, std), scores.len())?;
    Ok(())
}

fn cmd_fixtures(s: &Settings, stdout: &mut dyn Write) -> Result<(), CliError> {
    let out = s.out("fixtures")?;
    let summary = write_fixtures(out, s.seed, &s.file.simulation()?)?;
    for f in &summary.files {
        writeln!(stdout, "{}", out.join(f).display())?;
    }
    writeln!(stdout, "dice fixture: {}", summary.dice_summary)?;
    Ok(())
}
