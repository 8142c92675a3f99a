use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mgw_precoding::cooperation::{overhead_count, CooperationScheme, OverheadParams};
use mgw_precoding::harness::io::{write_json, write_results_csv, write_sweep_csv, MatrixFile, MatrixKind};
use mgw_precoding::harness::verify::{interlacing_suite, invariant_suite, ordering_suite};
use mgw_precoding::harness::{all_interferer_counts, run, sweep_interferers, sweep_power, Experiment, ExperimentConfig, Preset};
use mgw_precoding::metrics::{modcod_efficiency, ModcodTable};
use mgw_precoding::Error;

const EXIT_OTHER: u8 = 1;
const EXIT_CONFIG: u8 = 3;
const EXIT_DATA: u8 = 4;
const EXIT_NUMERICAL: u8 = 5;
const EXIT_VERIFY: u8 = 6;

#[derive(Parser)]
#[command(name = "mgw", version, about = "Multigateway precoding simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write user-link channel snapshots for a range of drops.
    GenChannel {
        #[command(flatten)]
        setup: Setup,
        #[arg(long, short, default_value = "channels")]
        out: PathBuf,
    },
    /// Run one cooperation scheme over all drops.
    Run {
        #[command(flatten)]
        setup: Setup,
        #[arg(long, short, default_value = "out")]
        out: PathBuf,
        /// Also write channel and precoder snapshots for every drop.
        #[arg(long)]
        snapshots: bool,
    },
    /// Efficiency versus transmit power or feeder interferer count.
    Sweep {
        #[command(flatten)]
        setup: Setup,
        #[command(subcommand)]
        axis: SweepAxis,
        #[arg(long, short, default_value = "sweep")]
        out: PathBuf,
    },
    /// Run the randomized property suites.
    Verify {
        #[arg(long, default_value_t = 1000)]
        instances: usize,
        #[arg(long, default_value_t = 500)]
        matrices: usize,
        /// Desk-scale drops for the precoder invariants.
        #[arg(long, default_value_t = 100)]
        drops: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Spectral efficiency of the best MODCOD for a SINR.
    Modcod {
        #[arg(long, allow_hyphen_values = true)]
        sinr_db: f64,
        /// Custom table (`mode,efficiency_bps,required_sinr_db`) instead of the built-in one.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Inter-gateway signalling volume in complex numbers.
    Overhead {
        #[arg(long)]
        ng: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        kg: u64,
        #[arg(long)]
        g: u64,
        #[arg(long)]
        scheme: CooperationScheme,
        /// Print the per-gateway figure instead of the total.
        #[arg(long)]
        per_gateway: bool,
    },
}

#[derive(Subcommand)]
enum SweepAxis {
    Power {
        /// Ascending list in dBW.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        powers: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "icm,4gc,gcm,ref")]
        schemes: Vec<CooperationScheme>,
    },
    Interferers {
        /// Interferer counts; defaults to every count the layout allows.
        #[arg(long, value_delimiter = ',')]
        counts: Vec<usize>,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, value_delimiter = ',', default_value = "gcm")]
        schemes: Vec<CooperationScheme>,
    },
}

#[derive(Args)]
struct Setup {
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long)]
    full_scale: bool,
    #[arg(long)]
    scheme: Option<CooperationScheme>,
    #[arg(long)]
    drops: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    power_dbw: Option<f64>,
}

impl Setup {
    fn load(&self) -> Result<ExperimentConfig, Error> {
        if self.full_scale && self.config.is_some() {
            return Err(Error::Config("--full-scale and --config are exclusive".into()));
        }
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None if self.full_scale => ExperimentConfig::preset(Preset::Full),
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.scheme {
            cfg.cooperation = s;
        }
        if let Some(d) = self.drops {
            cfg.run.drops = d;
        }
        if let Some(s) = self.seed {
            cfg.run.seed = s;
        }
        if let Some(p) = self.power_dbw {
            cfg.run.power_dbw = p;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

enum Failure {
    Lib(Error),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidParameter(_) | Error::InvalidLayout(_) | Error::Geometry(_) => EXIT_CONFIG,
        Error::Format(_) | Error::Csv(_) | Error::Json(_) => EXIT_DATA,
        Error::Singular { .. } | Error::Degenerate(_) | Error::DimensionMismatch(_) => EXIT_NUMERICAL,
        Error::Io(_) => EXIT_OTHER,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("mgw: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Verify(msg)) => {
            eprintln!("mgw: verification failed: {msg}");
            ExitCode::from(EXIT_VERIFY)
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::GenChannel { setup, out } => gen_channel(&setup.load()?, &out),
        Command::Run { setup, out, snapshots } => run_cmd(&setup.load()?, &out, snapshots),
        Command::Sweep { setup, axis, out } => sweep_cmd(&setup.load()?, axis, &out),
        Command::Verify {
            instances,
            matrices,
            drops,
            seed,
        } => verify_cmd(instances, matrices, drops, seed),
        Command::Modcod { sinr_db, table } => {
            let eff = match table {
                Some(path) => ModcodTable::from_csv(File::open(&path)?)?.efficiency(sinr_db),
                None => modcod_efficiency(sinr_db),
            };
            println!("{eff:.3}");
            Ok(())
        }
        Command::Overhead {
            ng,
            k,
            kg,
            g,
            scheme,
            per_gateway,
        } => {
            let o = overhead_count(
                scheme,
                OverheadParams {
                    feeds_per_gateway: ng,
                    num_beams: k,
                    beams_per_cluster: kg,
                    num_gateways: g,
                },
            )?;
            if per_gateway {
                println!("{}", o.per_gateway.first().copied().unwrap_or(0));
            } else {
                println!("{}", o.total);
            }
            Ok(())
        }
    }
}

fn gen_channel(cfg: &ExperimentConfig, out: &Path) -> Result<(), Failure> {
    fs::create_dir_all(out)?;
    let exp = Experiment::new(cfg.clone())?;
    let g = exp.layout().num_gateways();
    for d in 0..cfg.run.drops {
        let ch = exp.channel(d)?;
        let file = MatrixFile::new(MatrixKind::Channel, ch.seed, g, ch.user_link.entries());
        file.write(&out.join(format!("channel_{d:04}.json")))?;
    }
    println!("wrote {} channel drops to {}", cfg.run.drops, out.display());
    Ok(())
}

fn run_cmd(cfg: &ExperimentConfig, out: &Path, snapshots: bool) -> Result<(), Failure> {
    fs::create_dir_all(out)?;
    let output = run(cfg)?;
    write_results_csv(BufWriter::new(File::create(out.join("results.csv"))?), &output.results)?;
    write_json(&out.join("summary.json"), &output.summary)?;
    if snapshots {
        write_snapshots(cfg, &out.join("snapshots"))?;
    }
    let s = &output.summary;
    match &s.efficiency {
        Some(e) => println!(
            "{} ({}): {} drops, {} excluded, mean efficiency {:.4} bit/symbol per user",
            cfg.cooperation,
            s.scenario,
            s.drops_requested,
            s.excluded.len(),
            e.per_user.mean
        ),
        None => println!("{}: every drop was excluded", s.scenario),
    }
    Ok(())
}

fn write_snapshots(cfg: &ExperimentConfig, dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir)?;
    let exp = Experiment::new(cfg.clone())?;
    let g = exp.layout().num_gateways();
    let inner = cfg.inner_stage(cfg.cooperation, g);
    for d in 0..cfg.run.drops {
        let ch = exp.channel(d)?;
        MatrixFile::new(MatrixKind::Channel, ch.seed, g, ch.user_link.entries())
            .write(&dir.join(format!("channel_{d:04}.json")))?;
        // Excluded drops have no precoder to store.
        if let Ok(set) = exp.precoder(&ch, cfg.cooperation) {
            let mut f = MatrixFile::new(MatrixKind::Precoder, ch.seed, g, &set.total);
            f.flavor = Some(format!("{:?}", cfg.precoder.flavor).to_lowercase());
            f.alpha = inner.alpha();
            f.quantized = cfg.csi.quantized;
            f.write(&dir.join(format!("precoder_{d:04}.json")))?;
        }
    }
    Ok(())
}

fn sweep_cmd(cfg: &ExperimentConfig, axis: SweepAxis, out: &Path) -> Result<(), Failure> {
    fs::create_dir_all(out)?;
    let points = match axis {
        SweepAxis::Power { powers, schemes } => sweep_power(cfg, &powers, &schemes)?,
        SweepAxis::Interferers { counts, rho, schemes } => {
            let mut cfg = cfg.clone();
            cfg.feeder.rho = rho;
            cfg.validate()?;
            let counts = if counts.is_empty() { all_interferer_counts(&cfg)? } else { counts };
            sweep_interferers(&cfg, &counts, &schemes)?
        }
    };
    write_sweep_csv(BufWriter::new(File::create(out.join("sweep.csv"))?), &points)?;
    write_json(&out.join("sweep.json"), &points)?;
    for p in &points {
        let mean = p.summary.efficiency.map(|e| e.per_user.mean);
        println!(
            "{:<5} P={:>5.1} dBW m={} mean={}",
            p.summary.scenario,
            p.power_dbw,
            p.num_interferers,
            mean.map_or("n/a".to_string(), |m| format!("{m:.4}"))
        );
    }
    Ok(())
}

fn verify_cmd(instances: usize, matrices: usize, drops: usize, seed: u64) -> Result<(), Failure> {
    let ordering = ordering_suite(instances, seed)?;
    println!("{}/{} theorem instances hold", ordering.holding, ordering.instances);
    let inter = interlacing_suite(matrices, seed)?;
    println!(
        "{}/{} interlacing chains hold over {} matrices",
        inter.checks - inter.failures,
        inter.checks,
        inter.matrices
    );
    let mut cfg = ExperimentConfig::default();
    cfg.run.seed = seed;
    let inv = if drops > 0 { Some(invariant_suite(&cfg, drops)?) } else { None };
    if let Some(inv) = &inv {
        println!(
            "invariants over {} drops: null residual {:.2e}, ZF residual {:.2e}, power error {:.2e}",
            inv.drops,
            inv.worst_null_residual,
            inv.worst_zf_residual,
            inv.worst_gateway_power.max(inv.worst_total_power)
        );
    }
    let mut failed = Vec::new();
    if !ordering.all_hold() {
        failed.push(format!("{} SMSE ordering instances", ordering.instances - ordering.holding));
    }
    if inter.failures > 0 {
        failed.push(format!("{} interlacing chains", inter.failures));
    }
    if inv.as_ref().is_some_and(|i| !i.passes()) {
        failed.push("precoder invariants".into());
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verify(failed.join(", ")))
    }
}
