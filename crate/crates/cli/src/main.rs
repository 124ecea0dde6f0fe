use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tubeloss_cli::commands::{load_materials, repetition_paths};
use tubeloss_cli::{
    cmd_bands, cmd_il, cmd_masslaw, cmd_stack, cmd_stl, cmd_synth, exit_code, BandRange, MassLawPoints, Options,
    RunReport,
};
use tubeloss_core::bands::{BandMode, Quantity, RepetitionMode};
use tubeloss_core::domain::FrequencyGrid;
use tubeloss_core::formats::write_atomic;
use tubeloss_core::models::MassLawConstant;
use tubeloss_core::Result;

#[derive(Parser)]
#[command(
    name = "tubeloss",
    version,
    about = "Impedance-tube transmission loss and band analysis"
)]
struct Cli {
    /// Tube and air configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Averaging inside a one-third-octave band.
    #[arg(long, global = true, value_enum, default_value_t = BandModeArg::Power)]
    band_mode: BandModeArg,
    /// Averaging across repetitions.
    #[arg(long, global = true, value_enum, default_value_t = RepModeArg::Db)]
    rep_mode: RepModeArg,
    /// Mass-law additive constant.
    #[arg(long, global = true, value_enum, default_value_t = ConstantArg::Paper)]
    masslaw_constant: ConstantArg,
    /// Noise seed; overrides the scenario seed for `synth`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BandModeArg {
    Power,
    Db,
}

#[derive(Clone, Copy, ValueEnum)]
enum RepModeArg {
    Db,
    Power,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstantArg {
    Paper,
    Normal,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuantityArg {
    Loss,
    Level,
}

#[derive(Args)]
struct Outputs {
    /// Write the text report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Narrowband CSV output.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Band-table CSV output.
    #[arg(long)]
    bands_csv: Option<PathBuf>,
}

#[derive(Args)]
struct BandArgs {
    /// Lowest nominal band center to report (Hz).
    #[arg(long, default_value_t = 100.0)]
    band_min: f64,
    /// Highest nominal band center to report (Hz).
    #[arg(long, default_value_t = 5000.0)]
    band_max: f64,
}

impl BandArgs {
    fn range(&self) -> BandRange {
        BandRange {
            min_hz: self.band_min,
            max_hz: self.band_max,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize four-microphone spectra from a scenario file.
    Synth {
        scenario: PathBuf,
        /// Mic-spectra CSV to write; with several repetitions, `stem_<i>.ext`.
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 1)]
        repetitions: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Transmission loss from one or more mic-spectra files (repetitions).
    Stl {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        bands: BandArgs,
        #[command(flatten)]
        out: Outputs,
    },
    /// Mass-law predictions for a material list.
    Masslaw {
        /// `[[material]]` TOML file; the built-in curtain catalogue if omitted.
        #[arg(long)]
        materials: Option<PathBuf>,
        /// Evaluate at these frequencies (Hz) instead of band centers.
        #[arg(long, value_delimiter = ',')]
        frequencies: Option<Vec<f64>>,
        #[command(flatten)]
        bands: BandArgs,
        #[command(flatten)]
        out: Outputs,
    },
    /// Insertion loss from receiver-room band tables without and with the sample.
    Il {
        without_sample: PathBuf,
        with_sample: PathBuf,
        #[command(flatten)]
        out: Outputs,
    },
    /// Transfer-matrix cascade of a layer stack.
    Stack {
        stack: PathBuf,
        #[arg(long, default_value_t = 100.0)]
        start: f64,
        #[arg(long, default_value_t = 5000.0)]
        stop: f64,
        #[arg(long, default_value_t = 10.0)]
        step: f64,
        #[command(flatten)]
        bands: BandArgs,
        #[command(flatten)]
        out: Outputs,
    },
    /// One-third-octave averages of a narrowband CSV.
    Bands {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = QuantityArg::Loss)]
        quantity: QuantityArg,
        #[command(flatten)]
        bands: BandArgs,
        #[command(flatten)]
        out: Outputs,
    },
}

fn options(cli: &Cli) -> Result<Options> {
    let opts = Options {
        band_mode: match cli.band_mode {
            BandModeArg::Power => BandMode::Power,
            BandModeArg::Db => BandMode::Db,
        },
        rep_mode: match cli.rep_mode {
            RepModeArg::Db => RepetitionMode::Db,
            RepModeArg::Power => RepetitionMode::Power,
        },
        masslaw_constant: match cli.masslaw_constant {
            ConstantArg::Paper => MassLawConstant::Paper,
            ConstantArg::Normal => MassLawConstant::Normal,
        },
        seed: cli.seed,
        ..Options::default()
    };
    match &cli.config {
        Some(p) => opts.with_config_file(p),
        None => Ok(opts),
    }
}

/// Collect every output, then write them all at the end.
fn emit(report: &RunReport, out: Option<&Outputs>, extra: Vec<(PathBuf, String)>) -> Result<()> {
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let mut files = extra;
    if let Some(o) = out {
        if let (Some(p), Some(text)) = (&o.csv, report.narrowband_csv()) {
            files.push((p.clone(), text));
        }
        if let (Some(p), Some(text)) = (&o.bands_csv, report.bands_csv()?) {
            files.push((p.clone(), text));
        }
    }
    let text = report.render_text();
    let report_path = out.and_then(|o| o.report.as_deref());
    for (p, contents) in &files {
        write_atomic(p, contents)?;
    }
    match report_path {
        Some(p) => write_atomic(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let opts = options(cli)?;
    match &cli.command {
        Command::Synth {
            scenario,
            output,
            repetitions,
            report,
        } => {
            let run = cmd_synth(scenario, *repetitions, &opts)?;
            let paths = repetition_paths(output, *repetitions);
            let files = paths
                .into_iter()
                .zip(run.files.iter().map(|f| f.to_csv_string()))
                .collect();
            let out = Outputs {
                report: report.clone(),
                csv: None,
                bands_csv: None,
            };
            emit(&run.report, Some(&out), files)
        }
        Command::Stl { inputs, bands, out } => emit(&cmd_stl(inputs, bands.range(), &opts)?, Some(out), Vec::new()),
        Command::Masslaw {
            materials,
            frequencies,
            bands,
            out,
        } => {
            let mats = load_materials(materials.as_deref().map(Path::new))?;
            let points = match frequencies {
                Some(f) => MassLawPoints::Frequencies(f.clone()),
                None => MassLawPoints::Bands(bands.range()),
            };
            emit(&cmd_masslaw(&mats, &points, &opts)?, Some(out), Vec::new())
        }
        Command::Il {
            without_sample,
            with_sample,
            out,
        } => emit(&cmd_il(without_sample, with_sample, &opts)?, Some(out), Vec::new()),
        Command::Stack {
            stack,
            start,
            stop,
            step,
            bands,
            out,
        } => {
            let grid = FrequencyGrid::linear(*start, *stop, *step)?;
            emit(&cmd_stack(stack, &grid, bands.range(), &opts)?, Some(out), Vec::new())
        }
        Command::Bands {
            input,
            quantity,
            bands,
            out,
        } => {
            let q = match quantity {
                QuantityArg::Loss => Quantity::Loss,
                QuantityArg::Level => Quantity::Level,
            };
            emit(&cmd_bands(input, q, bands.range(), &opts)?, Some(out), Vec::new())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::from(tubeloss_cli::EXIT_OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
