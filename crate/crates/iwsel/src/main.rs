use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use iwsel::formats::{self, parse_db, parse_occupancy};
use iwsel::harness::{self, Method, SnrGrid, SweepConfig};
use iwsel::Error;
use iwsel_core::channel::TapProfile;
use iwsel_core::link::{EstimationMode, McsTable, SlotConfig};
use iwsel_core::selector::{train, TrainConfig, TrainError};

#[derive(Parser)]
#[command(name = "iwsel", version, about = "Interference-whitening option selection: link simulation, datasets, training and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// BLER curves of one method over the scenario grid.
    Simulate {
        #[command(flatten)]
        grid: GridArgs,
        /// IWNRB, IWNBW or IWRB.
        #[arg(long, default_value = "IWRB")]
        method: String,
    },
    /// Labelled dataset from three-way decoding of every slot.
    GenDataset {
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Fits the selector network to a dataset.
    Train {
        /// Dataset CSV.
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        /// Model file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Paired BLER of the three options and the selector, SNR gaps and
    /// utilization; writes bler.csv, gap.csv and utilization.csv into --out.
    Evaluate {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        model: PathBuf,
    },
    /// Merges BLER CSVs and prints the SNR-gap table.
    Report {
        /// One or more BLER CSVs.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Gap CSV to write; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Slots per SNR point.
    #[arg(long, default_value_t = 500)]
    slots: usize,
    /// Resource blocks.
    #[arg(long, default_value_t = 20)]
    rb: usize,
    /// Receive antennas x layers, e.g. 4x4.
    #[arg(long, default_value = "2x2")]
    mimo: String,
    /// Interferer streams; defaults to the layer count.
    #[arg(long)]
    interferer_layers: Option<usize>,
    /// Comma-separated profile names (EPA-5, EVA-30, TDLA-30 or from --profiles).
    #[arg(long, default_value = "EPA-5")]
    channel: String,
    /// Comma-separated list of 1, 2, 3 or none.
    #[arg(long, default_value = "1")]
    occupancy: String,
    /// Comma-separated SIR values in dB, or inf.
    #[arg(long, default_value = "0")]
    sir: String,
    /// start:step:stop in dB.
    #[arg(long, default_value = "0:1:30")]
    snr: String,
    /// Comma-separated MCS indices.
    #[arg(long, default_value = "5")]
    mcs: String,
    /// Use the true channel instead of the DMRS estimate.
    #[arg(long)]
    genie_channel: bool,
    /// Covariance from per-half-RB channel fits instead of the smoothed fit.
    #[arg(long)]
    raw_residuals: bool,
    /// Key/value file with extra tap profiles and an MCS table.
    #[arg(long)]
    profiles: Option<PathBuf>,
    /// Output file (or directory for evaluate); stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty())
}

impl GridArgs {
    fn sweep(&self) -> Result<SweepConfig, Error> {
        let extra = match &self.profiles {
            Some(p) => formats::read_config(p)?,
            None => formats::ConfigFile::default(),
        };
        let table = extra.mcs_table()?.unwrap_or_else(McsTable::representative);
        let channels = list(&self.channel)
            .map(|name| {
                extra
                    .profiles
                    .iter()
                    .find(|p| p.name() == name)
                    .cloned()
                    .or_else(|| TapProfile::preset(name))
                    .ok_or_else(|| Error::Config(format!("unknown channel profile {name:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let occupancies = list(&self.occupancy).map(parse_occupancy).collect::<Result<Vec<_>, _>>()?;
        let sirs_db = list(&self.sir).map(parse_db).collect::<Result<Vec<_>, _>>()?;
        let mcs = list(&self.mcs)
            .map(|t| {
                t.parse::<u8>()
                    .ok()
                    .and_then(|i| table.get(i).ok())
                    .ok_or_else(|| Error::Config(format!("MCS {t:?} is not in the table")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let (rx, layers) = self
            .mimo
            .split_once(['x', 'X'])
            .and_then(|(a, b)| Some((a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)))
            .ok_or_else(|| Error::Config(format!("--mimo must look like 4x4, got {:?}", self.mimo)))?;
        let mut slot_config = SlotConfig::new(self.rb, rx, layers).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(mi) = self.interferer_layers {
            slot_config = slot_config
                .with_interferer_layers(mi)
                .map_err(|e| Error::Config(e.to_string()))?;
        }
        let estimation = match (self.genie_channel, self.raw_residuals) {
            (true, _) => EstimationMode::Genie,
            (false, true) => EstimationMode::LeastSquaresRaw,
            (false, false) => EstimationMode::LeastSquares,
        };
        let cfg = SweepConfig {
            channels,
            occupancies,
            sirs_db,
            mcs,
            snr: SnrGrid::parse(&self.snr)?,
            slots: self.slots,
            seed: self.seed,
            slot_config,
            estimation,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate { grid, method } => {
            let method = match Method::parse(&method) {
                Some(m @ Method::Fixed(_)) => m,
                _ => return Err(Error::Config(format!("--method must be IWNRB, IWNBW or IWRB, got {method:?}"))),
            };
            let cfg = grid.sweep()?;
            let curves: Vec<_> = harness::run_bler_sweep(&cfg, None)?
                .into_iter()
                .filter(|c| c.method == method)
                .collect();
            harness::write_bler_csv(&curves, output(grid.out.as_deref())?)?;
        }
        Command::GenDataset { grid } => {
            let cfg = grid.sweep()?;
            let run = harness::run_label_generation(&cfg)?;
            let rejected: usize = run.stats.iter().map(|s| s.rejected).sum();
            let total: usize = run.stats.iter().map(|s| s.total).sum();
            formats::write_dataset(&run.samples, output(grid.out.as_deref())?)?;
            eprintln!("{} samples written, {rejected} of {total} slots rejected", run.samples.len());
        }
        Command::Train {
            data,
            seed,
            max_iter,
            out,
        } => {
            let samples = formats::read_dataset(BufReader::new(File::open(&data)?))?;
            let cfg = TrainConfig {
                max_iterations: max_iter,
                seed,
                ..TrainConfig::default()
            };
            let rep = train(&samples, &cfg).map_err(|e| match e {
                TrainError::DegenerateDataset(_) => Error::Degenerate(e.to_string()),
                TrainError::BadConfig => Error::Config(e.to_string()),
            })?;
            formats::write_model(&rep.model, BufWriter::new(File::create(&out)?))?;
            eprintln!(
                "trained on {} samples: loss {:.6} -> {:.6} in {} iterations{}",
                samples.len(),
                rep.initial_loss,
                rep.final_loss,
                rep.iterations,
                if rep.line_search_failed { " (line search failed)" } else { "" }
            );
        }
        Command::Evaluate { grid, model } => {
            let cfg = grid.sweep()?;
            let model = formats::read_model(BufReader::new(File::open(&model)?))?;
            let evals = harness::run_evaluation(&cfg, Some(&model))?;
            let curves: Vec<_> = evals.iter().flat_map(|e| e.curves()).collect();
            let util: Vec<_> = evals.iter().flat_map(|e| e.utilization()).collect();
            let gaps = harness::compute_snr_gap(&curves);
            let dir = grid.out.clone().unwrap_or_else(|| PathBuf::from("."));
            std::fs::create_dir_all(&dir)?;
            harness::write_bler_csv(&curves, BufWriter::new(File::create(dir.join("bler.csv"))?))?;
            harness::write_gap_csv(&gaps, BufWriter::new(File::create(dir.join("gap.csv"))?))?;
            harness::write_utilization_csv(&util, BufWriter::new(File::create(dir.join("utilization.csv"))?))?;
            harness::write_gap_csv(&gaps, output(None)?)?;
        }
        Command::Report { inputs, out } => {
            let mut curves = Vec::new();
            for p in &inputs {
                curves.extend(harness::read_bler_csv(BufReader::new(File::open(p)?))?);
            }
            let gaps = harness::compute_snr_gap(&curves);
            harness::write_gap_csv(&gaps, output(out.as_deref())?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("iwsel: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
