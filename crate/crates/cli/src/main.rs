//! `ladder`: steady-state observables, sweeps, figure data and self-checks.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ladder_core::config::{BathInput, PumpInput, RunConfig, ThermalInput};
use ladder_core::figure::emit_figure;
use ladder_core::oracle::is_exploratory;
use ladder_core::report::{write_csv, write_json, Row};
use ladder_core::reservoir::interference_applicability;
use ladder_core::sweep::{evaluate, run_sweep, Grid, SweepParameter, SweepSpec};
use ladder_core::verify::{run_verify, VerifyOptions};
use ladder_core::{DipoleMode, Error, ObservableReport, Source};

const EXIT_USAGE: u8 = 1;
const EXIT_COMPUTATION: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "ladder", version, about = "Exact steady state of N three-level ladder atoms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Level populations <S11>, <S22>, <S33>.
    Populations(PointArgs),
    /// Emitted intensities G1 (per channel or total field).
    Intensity(PointArgs),
    /// Zero-delay second-order correlation.
    G2 {
        #[arg(long, value_enum)]
        channel: G2Channel,
        #[command(flatten)]
        point: PointArgs,
    },
    /// One-parameter sweep; one row per grid point.
    Sweep {
        #[arg(long, default_value = "eta")]
        param: String,
        /// START:STOP:COUNT, endpoints included.
        #[arg(long, conflicts_with = "values")]
        grid: Option<String>,
        /// Comma-separated explicit grid.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        #[command(flatten)]
        point: PointArgs,
    },
    /// Data behind one of the four steady-state figures.
    Figure {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        id: u8,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the self-check suite.
    Verify {
        /// Largest N solved by the oracle.
        #[arg(long, default_value_t = 6)]
        oracle_max_atoms: usize,
        /// K:REL, scale basis weight K by 1 + REL (sensitivity test).
        #[arg(long, hide = true)]
        perturb_weight: Option<String>,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum G2Channel {
    #[value(name = "11")]
    C11,
    #[value(name = "22")]
    C22,
    #[value(name = "12")]
    C12,
    #[value(name = "21")]
    C21,
    Total,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum SourceArg {
    BasisSum,
    ClosedForm,
    Oracle,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct PointArgs {
    #[arg(long)]
    n_atoms: Option<usize>,
    /// Common pump parameter eta = nbar / (1 + nbar) in [0, 1].
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    eta1: Option<f64>,
    #[arg(long)]
    eta2: Option<f64>,
    /// Mean occupation of the upper-transition reservoir.
    #[arg(long)]
    nbar1: Option<f64>,
    #[arg(long)]
    nbar2: Option<f64>,
    /// OMEGA:T, thermal reservoir for both transitions (rad/s, K).
    #[arg(long)]
    thermal: Option<String>,
    /// R:D:G, incoherent pump for both transitions (SI units).
    #[arg(long)]
    pump: Option<String>,
    #[arg(long)]
    theta_deg: Option<f64>,
    #[arg(long)]
    mode: Option<String>,
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "basis-sum")]
    source: SourceArg,
    #[command(flatten)]
    out: OutputArgs,
}

/// Failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) => EXIT_USAGE,
            _ => EXIT_COMPUTATION,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn split_numbers(flag: &str, text: &str, n: usize) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || usage(format!("--{flag} expects {n} numbers separated by ':', got {text:?}"));
    if parts.len() != n {
        return Err(bad());
    }
    parts.iter().map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect()
}

impl PointArgs {
    fn run_config(&self) -> Result<RunConfig, Failure> {
        let base = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let mut bath: Option<BathInput> = None;
        let mut set_bath = |b: BathInput| -> Result<(), Failure> {
            if bath.replace(b).is_some() {
                return Err(usage("--thermal and --pump are mutually exclusive"));
            }
            Ok(())
        };
        if let Some(t) = &self.thermal {
            let v = split_numbers("thermal", t, 2)?;
            set_bath(BathInput::Thermal {
                thermal: ThermalInput {
                    omega: v[0],
                    temperature: v[1],
                },
            })?;
        }
        if let Some(p) = &self.pump {
            let v = split_numbers("pump", p, 3)?;
            set_bath(BathInput::Pump {
                pump: PumpInput {
                    rate: v[0],
                    dipole: v[1],
                    gamma: v[2],
                },
            })?;
        }
        let mode = self
            .mode
            .as_deref()
            .map(|m| m.parse::<DipoleMode>().map_err(|e| usage(e.to_string())))
            .transpose()?;
        let flags = RunConfig {
            n_atoms: self.n_atoms,
            eta: self.eta,
            eta1: self.eta1,
            eta2: self.eta2,
            nbar1: self.nbar1.map(BathInput::Nbar).or(bath),
            nbar2: self.nbar2.map(BathInput::Nbar).or(bath),
            theta_deg: self.theta_deg,
            mode,
            ..Default::default()
        };
        if bath.is_some() && (self.nbar1.is_some() || self.nbar2.is_some()) {
            return Err(usage("--thermal/--pump cannot be combined with --nbar1/--nbar2"));
        }
        Ok(base.overridden_by(flags))
    }

    fn source(&self) -> Source {
        match self.source {
            SourceArg::BasisSum => Source::BasisSum,
            SourceArg::ClosedForm => Source::ClosedForm,
            SourceArg::Oracle => Source::Oracle,
        }
    }
}

fn open_output(out: &OutputArgs) -> Result<Box<dyn Write>, Failure> {
    Ok(match &out.output {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| Failure {
            code: EXIT_COMPUTATION,
            message: format!("cannot create {}: {e}", path.display()),
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_rows(rows: &[Row], out: &OutputArgs) -> Result<(), Failure> {
    let mut w = open_output(out)?;
    match out.format {
        Format::Csv => write_csv(rows, &mut w)?,
        Format::Json => write_json(rows, &mut w)?,
    }
    w.flush().map_err(Error::from)?;
    Ok(())
}

fn warn_about(run: &RunConfig, source: Source) -> Result<(), Failure> {
    let Ok(cfg) = run.ensemble() else {
        return Ok(());
    };
    if source == Source::Oracle && is_exploratory(&cfg) {
        eprintln!("note: exploratory run, interfering dipoles with nbar1 != nbar2 have no exact solution");
    }
    if let (DipoleMode::Interfering, Some((w12, w23))) = (cfg.mode, run.frequencies()) {
        let a = interference_applicability(&cfg, w12, w23);
        if !a.applicable {
            eprintln!(
                "warning: detuning {:e} exceeds the effective width {:e}; cross damping should be dropped",
                a.detuning, a.gamma_eff
            );
        }
    }
    Ok(())
}

/// Evaluates one point and checks that `pick` is defined there.
fn point(args: &PointArgs, pick: impl Fn(&ObservableReport) -> Result<(), Failure>) -> Result<(), Failure> {
    let run = args.run_config()?;
    let cfg = run.ensemble()?;
    let source = args.source();
    warn_about(&run, source)?;
    let report = evaluate(&cfg, source)?;
    pick(&report)?;
    write_rows(&[Row::Report(report)], &args.out)
}

fn require(value: Option<f64>, what: &str, report: &ObservableReport) -> Result<(), Failure> {
    match value {
        Some(_) => Ok(()),
        None => Err(Failure {
            code: EXIT_COMPUTATION,
            message: format!(
                "{what} is undefined for {} dipoles at eta1 = {}, eta2 = {}",
                report.mode.as_str(),
                report.eta1,
                report.eta2
            ),
        }),
    }
}

fn intensity_defined(r: &ObservableReport) -> Result<(), Failure> {
    match r.mode {
        DipoleMode::Orthogonal => require(r.g1_1.and(r.g1_2), "intensity", r),
        DipoleMode::Interfering => require(r.g1_total, "total-field intensity", r),
    }
}

fn g2_defined(channel: G2Channel, r: &ObservableReport) -> Result<(), Failure> {
    let (value, needs) = match channel {
        G2Channel::C11 => (r.g2_11, DipoleMode::Orthogonal),
        G2Channel::C22 => (r.g2_22, DipoleMode::Orthogonal),
        G2Channel::C12 => (r.g2_12, DipoleMode::Orthogonal),
        G2Channel::C21 => (r.g2_21, DipoleMode::Orthogonal),
        G2Channel::Total => (r.g2_total, DipoleMode::Interfering),
    };
    if r.mode != needs {
        return Err(Failure {
            code: EXIT_COMPUTATION,
            message: format!("g2 channel {channel:?} needs {} dipoles", needs.as_str()),
        });
    }
    require(value, "g2", r)
}

fn sweep(param: &str, grid: Option<&str>, values: Option<&[f64]>, args: &PointArgs) -> Result<(), Failure> {
    let parameter: SweepParameter = param.parse().map_err(|e: Error| usage(e.to_string()))?;
    let grid = match (grid, values) {
        (Some(g), None) => Grid::parse(g).map_err(|e| usage(e.to_string()))?,
        (None, Some(v)) => Grid::Values(v.to_vec()),
        _ => return Err(usage("sweep needs --grid START:STOP:COUNT or --values V1,V2,...")),
    };
    let mut run = args.run_config()?;
    // The swept quantity needs no value of its own; fill a placeholder.
    match parameter {
        SweepParameter::Eta => {
            (run.eta, run.eta1, run.eta2, run.nbar1, run.nbar2) = (Some(0.0), None, None, None, None);
        }
        SweepParameter::Eta1 => (run.eta1, run.nbar1) = (Some(0.0), None),
        SweepParameter::Eta2 => (run.eta2, run.nbar2) = (Some(0.0), None),
        SweepParameter::Theta => {
            run.theta_deg = Some(90.0);
            run.mode.get_or_insert(DipoleMode::Interfering);
        }
        SweepParameter::NAtoms => run.n_atoms = Some(1),
    }
    if matches!(parameter, SweepParameter::Eta1 | SweepParameter::Eta2) && run.eta.is_some() {
        let e = run.eta.take();
        if parameter == SweepParameter::Eta1 {
            run.eta2 = e;
        } else {
            run.eta1 = e;
        }
    }
    let spec = SweepSpec {
        parameter,
        grid,
        base: run.ensemble()?,
        source: args.source(),
    };
    let rows = run_sweep(&spec, args.out.workers)?;
    for row in &rows {
        if let Row::Failed(f) = row {
            eprintln!("point failed: {}", f.error);
        }
    }
    write_rows(&rows, &args.out)
}

fn figure(id: u8, out: &OutputArgs) -> Result<(), Failure> {
    let data = emit_figure(id, out.workers)?;
    let mut w = open_output(out)?;
    match out.format {
        Format::Csv => data.write_csv(&mut w)?,
        Format::Json => data.write_json(&mut w)?,
    }
    w.flush().map_err(Error::from)?;
    Ok(())
}

fn verify(oracle_max_atoms: usize, perturb: Option<&str>) -> Result<(), Failure> {
    let perturb_weight = perturb
        .map(|p| {
            let (k, r) = p
                .split_once(':')
                .ok_or_else(|| usage("--perturb-weight expects K:REL"))?;
            let k = k.parse::<usize>().map_err(|_| usage("bad weight index"))?;
            let r = r.parse::<f64>().map_err(|_| usage("bad relative change"))?;
            Ok::<_, Failure>((k, r))
        })
        .transpose()?;
    if !(1..=ladder_core::oracle::DEFAULT_MAX_ATOMS).contains(&oracle_max_atoms) {
        return Err(usage(format!(
            "--oracle-max-atoms must be in 1..={}",
            ladder_core::oracle::DEFAULT_MAX_ATOMS
        )));
    }
    let report = run_verify(&VerifyOptions {
        perturb_weight,
        oracle_max_atoms,
    });
    for line in report.lines() {
        println!("{line}");
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_VERIFY,
            message: "verification failed".into(),
        })
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Populations(args) => point(args, |_| Ok(())),
        Command::Intensity(args) => point(args, intensity_defined),
        Command::G2 { channel, point: args } => point(args, |r| g2_defined(*channel, r)),
        Command::Sweep {
            param,
            grid,
            values,
            point,
        } => sweep(param, grid.as_deref(), values.as_deref(), point),
        Command::Figure { id, out } => figure(*id, out),
        Command::Verify {
            oracle_max_atoms,
            perturb_weight,
        } => verify(*oracle_max_atoms, perturb_weight.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
