//! Command-line front end for the `linopt` simulator.
//!
//! [`run`] takes the argument vector and two output streams and returns the
//! process exit code, so the binary is a thin wrapper and tests can drive the
//! whole tool in-process.

mod output;

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use linopt::circuits::{
    hom_2002, ideal_noon4, ideal_noon8, noon4, noon8, noon_state, spdc_noonlike, subtract_photon, HomVariant,
};
use linopt::detection::DetectorModel;
use linopt::grid::parse_grid;
use linopt::metrology::{
    fidelity_formula, heralded_noon4, sensitivity_bound, sweep, threshold_efficiency, SHOT_NOISE_N4,
};
use linopt::script::{parse_circuit, run_circuit, RunOptions};
use linopt::{PureState, StateEnsemble};

pub use output::{format_number, Format};
use output::{Cell, CircuitReport, Report, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_DOMAIN: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "linopt", version, about = "Exact simulation of linear-optical NOON-state circuits")]
struct Cli {
    /// Output format for the data stream.
    #[arg(long, value_enum, default_value = "csv", global = true)]
    format: Format,
    /// Write data here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum HomArg {
    Da,
    Lr,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Figure {
    Fig2,
    Fig4,
}

#[derive(Debug, Args)]
struct Herald {
    /// On-off detector efficiency for the heralding step.
    #[arg(long, value_parser = parse_eta)]
    eta: Option<f64>,
}

impl Herald {
    fn detector(&self) -> linopt::Result<DetectorModel> {
        self.eta.map_or(Ok(DetectorModel::Pnr), DetectorModel::on_off)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Polarization Hong-Ou-Mandel analog producing a 2002 state.
    Hom {
        #[arg(value_enum)]
        variant: HomArg,
    },
    /// Heralded 4004 source.
    Noon4 {
        /// Beam splitter intensity transmittance.
        #[arg(long, default_value_t = 0.5, value_parser = parse_unit)]
        t2: f64,
        #[arg(long, value_parser = parse_eta, conflicts_with = "pnr")]
        eta: Option<f64>,
        /// Number-resolving herald (the default).
        #[arg(long)]
        pnr: bool,
    },
    /// 8008 cascade from two heralded 4004 states.
    Noon8 {
        #[command(flatten)]
        herald: Herald,
    },
    /// Coherent photon subtraction from a NOON state over an efficiency grid.
    Subtract {
        /// Photon number of the input NOON state.
        #[arg(long)]
        n: u8,
        #[arg(long, default_value_t = 0.99, value_parser = parse_unit)]
        t2: f64,
        #[arg(long, value_parser = parse_grid_arg)]
        eta_grid: Grid,
    },
    /// NOON-like state from two down-conversion crystals.
    SpdcNoonlike {
        #[command(flatten)]
        herald: Herald,
    },
    /// Parity-readout sweep of the heralded 4004 state.
    Metrology {
        #[arg(long, value_parser = parse_grid_arg)]
        eta_grid: Grid,
        #[arg(long, value_parser = parse_grid_arg, default_value = "pi/8")]
        phi_grid: Grid,
    },
    /// Efficiency at which the sensitivity bound reaches the target.
    Threshold {
        #[arg(long, default_value_t = SHOT_NOISE_N4)]
        target: f64,
    },
    /// Runs a circuit script.
    Run {
        script: PathBuf,
        /// Replaces the detector of every `herald_none` step.
        #[command(flatten)]
        herald: Herald,
    },
    /// Figure data: fig2 (subtraction fidelity) or fig4 (sensitivity and fidelity).
    Figure {
        #[arg(value_enum)]
        name: Figure,
        /// Efficiency grid; defaults to 0.05:1:0.05 for fig2 and 0:1:0.01 for fig4.
        #[arg(long, value_parser = parse_grid_arg)]
        eta_grid: Option<Grid>,
        /// Subtraction tap transmittance for fig2.
        #[arg(long, default_value_t = 0.99, value_parser = parse_unit)]
        t2: f64,
    },
}

#[derive(Debug, Clone)]
struct Grid(Vec<f64>);

fn parse_grid_arg(s: &str) -> Result<Grid, String> {
    parse_grid(s).map(Grid).map_err(|e| e.to_string())
}

fn parse_unit(s: &str) -> Result<f64, String> {
    let x = linopt::grid::parse_number(s).ok_or_else(|| format!("invalid number {s:?}"))?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("{x} is outside [0, 1]"))
    }
}

fn parse_eta(s: &str) -> Result<f64, String> {
    parse_unit(s)
}

enum Failure {
    Parse(String),
    Domain(String),
    Usage(String),
}

impl From<linopt::Error> for Failure {
    fn from(e: linopt::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

fn fidelity(ens: &StateEnsemble, target: &PureState) -> Option<f64> {
    ens.normalize().ok().and_then(|n| n.fidelity_to_pure(target).ok())
}

fn circuit(result: linopt::circuits::CircuitResult, target: Option<&PureState>) -> Report {
    let mut summary = Vec::new();
    if let Some(f) = target.and_then(|t| fidelity(&result.output, t)) {
        summary.push(("fidelity", f));
    }
    Report::Circuit(CircuitReport { result, summary })
}

fn split(t2: f64) -> (f64, f64) {
    if t2 == 0.5 {
        (FRAC_1_SQRT_2, FRAC_1_SQRT_2)
    } else {
        (t2.sqrt(), (1.0 - t2).sqrt())
    }
}

fn subtraction_table(ns: &[u8], etas: &[f64], t2: f64, with_prob: bool) -> Result<Table, Failure> {
    let header =
        if with_prob { vec!["n", "eta", "t2", "success_prob", "fidelity"] } else { vec!["n", "eta", "t2", "fidelity"] };
    let mut t = Table::new(header);
    for &n in ns {
        if n == 0 {
            return Err(Failure::Domain("subtraction needs at least one photon".to_owned()));
        }
        let start = StateEnsemble::from(noon_state("a", n, PI)?);
        let target = noon_state("a", n - 1, PI)?;
        for &eta in etas {
            let res = subtract_photon(&start, "a", t2, DetectorModel::on_off(eta)?)?;
            let f = res.output.normalize()?.fidelity_to_pure(&target)?;
            let mut row = vec![Cell::Int(n.into()), eta.into(), t2.into()];
            if with_prob {
                row.push(res.success_prob.into());
            }
            row.push(f.into());
            t.push(row);
        }
    }
    Ok(t)
}

fn execute(command: Command) -> Result<Report, Failure> {
    Ok(match command {
        Command::Hom { variant } => {
            let (v, theta) = match variant {
                HomArg::Da => (HomVariant::DA, PI),
                HomArg::Lr => (HomVariant::LR, 0.0),
            };
            circuit(hom_2002(v), Some(&noon_state("a", 2, theta)?))
        }
        Command::Noon4 { t2, eta, .. } => {
            let (t, r) = split(t2);
            let detector = eta.map_or(Ok(DetectorModel::Pnr), DetectorModel::on_off)?;
            circuit(noon4(t, r, detector)?, Some(&ideal_noon4()))
        }
        Command::Noon8 { herald } => {
            let res = noon8(herald.detector()?)?;
            let conditional = res.steps.last().map(|s| s.probability);
            let mut report = circuit(res, Some(&ideal_noon8()));
            if let (Report::Circuit(c), Some(p)) = (&mut report, conditional) {
                c.summary.push(("conditional_prob", p));
            }
            report
        }
        Command::SpdcNoonlike { herald } => circuit(spdc_noonlike(herald.detector()?)?, Some(&ideal_noon4())),
        Command::Subtract { n, t2, eta_grid } => Report::Table(subtraction_table(&[n], &eta_grid.0, t2, true)?),
        Command::Metrology { eta_grid, phi_grid } => {
            let mut t = Table::new(vec![
                "eta",
                "phi",
                "parity",
                "delta_phi_numeric",
                "delta_phi_closed",
                "delta_phi_bound",
                "fidelity",
                "fringe_sign",
            ]);
            for r in sweep(&eta_grid.0, &phi_grid.0)? {
                t.push(vec![
                    r.eta.into(),
                    r.phi.into(),
                    r.parity.into(),
                    r.delta_phi_numeric.into(),
                    r.delta_phi_closed.into(),
                    r.delta_phi_bound.into(),
                    r.fidelity.into(),
                    r.fringe_sign.into(),
                ]);
            }
            Report::Table(t)
        }
        Command::Threshold { target } => {
            let eta = threshold_efficiency(target)?;
            let mut t = Table::new(vec!["target", "eta", "fidelity", "delta_phi_bound"]);
            t.push(vec![target.into(), eta.into(), fidelity_formula(eta)?.into(), sensitivity_bound(eta)?.into()]);
            Report::Table(t)
        }
        Command::Run { script, herald } => {
            let text = fs::read_to_string(&script)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", script.display())))?;
            let spec = parse_circuit(&text).map_err(|e| Failure::Parse(format!("{}: {e}", script.display())))?;
            let options = RunOptions { herald_detector: herald.eta.map(DetectorModel::on_off).transpose()? };
            circuit(run_circuit(&spec, &options)?, None)
        }
        Command::Figure { name: Figure::Fig2, eta_grid, t2 } => {
            let etas = eta_grid.map_or_else(|| parse_grid("0.05:1:0.05").expect("valid default"), |g| g.0);
            Report::Table(subtraction_table(&[2, 3, 4, 5, 6, 7, 8], &etas, t2, false)?)
        }
        Command::Figure { name: Figure::Fig4, eta_grid, .. } => {
            let etas = eta_grid.map_or_else(|| parse_grid("0:1:0.01").expect("valid default"), |g| g.0);
            let mut t = Table::new(vec!["eta", "delta_phi", "fidelity", "shot_noise"]);
            let target = ideal_noon4();
            for eta in etas {
                let f = heralded_noon4(eta)?.fidelity_to_pure(&target)?;
                t.push(vec![eta.into(), sensitivity_bound(eta)?.into(), f.into(), SHOT_NOISE_N4.into()]);
            }
            Report::Table(t)
        }
    })
}

/// Runs the tool on `args` (including the program name). Data goes to
/// `stdout` or the `--output` file, diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let stream: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = stream.write_all(text.as_bytes());
            return code;
        }
    };
    let report = match execute(cli.command) {
        Ok(report) => report,
        Err(failure) => {
            let (code, msg) = match failure {
                Failure::Parse(m) => (EXIT_PARSE, m),
                Failure::Domain(m) => (EXIT_DOMAIN, m),
                Failure::Usage(m) => (EXIT_USAGE, m),
            };
            let _ = writeln!(stderr, "linopt: error: {msg}");
            return code;
        }
    };
    let written = match &cli.output {
        Some(path) => fs::File::create(path).and_then(|mut f| report.write(cli.format, &mut f)),
        None => report.write(cli.format, stdout),
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "linopt: error: cannot write output: {e}");
            EXIT_DOMAIN
        }
    }
}
