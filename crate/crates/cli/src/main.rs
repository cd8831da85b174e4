use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use casimir_core::analysis::{
    decompose_raw, load_measurements, load_raw_record, residual, rlm_repair, Electrostatic, GridSpec,
    MeasurementFormat, Scenario, ScenarioConfig, Spacing,
};
use casimir_core::constants::{omega_to_wavelength, MICRO_OHM_CM};
use casimir_core::drude_fit::{fit_drude, FitOptions, WavelengthWindow, Weighting, DEFAULT_FLATNESS_THRESHOLD};
use casimir_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Casimir force between metal-coated bodies from the Lifshitz theory.
#[derive(Parser)]
#[command(name = "casimir", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Output {
    fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("creating {}", p.display()))?,
            )),
            None => Box::new(io::stdout().lock()),
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightingArg {
    Unweighted,
    Relative,
}

#[derive(Subcommand)]
enum Command {
    /// Fit Drude parameters to an infrared optical table.
    FitDrude {
        #[arg(long)]
        input: PathBuf,
        /// Shortest wavelength used, m.
        #[arg(long, default_value_t = 2e-6)]
        lambda_min: f64,
        /// Longest wavelength used, m.
        #[arg(long, default_value_t = 3.2e-5)]
        lambda_max: f64,
        #[arg(long, value_enum, default_value_t = WeightingArg::Unweighted)]
        weighting: WeightingArg,
        /// Relative resistivity spread above which the window is flagged as non-Drude.
        #[arg(long, default_value_t = DEFAULT_FLATNESS_THRESHOLD)]
        flatness_threshold: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Force curve for a scenario over a separation grid.
    Force {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, requires_all = ["a_max", "points"])]
        a_min: Option<f64>,
        #[arg(long)]
        a_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// Logarithmic instead of linear grid spacing.
        #[arg(long)]
        log: bool,
        /// Replace the Matsubara sum by the zero-temperature integral.
        #[arg(long)]
        zero_t: bool,
        /// Relative tolerance, overriding the config.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Measured force minus the scenario force on the measured grid.
    Residual {
        #[arg(long)]
        measured: PathBuf,
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        #[arg(long, value_parser = ScenarioConfig::PRESETS)]
        preset: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Shift separations by +2h to undo a top-layer-blind force extraction.
    RepairRlm {
        #[arg(long)]
        input: PathBuf,
        /// Top-layer thickness, m.
        #[arg(long)]
        h: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Upper-limit curve of a built-in experiment.
    Scenario {
        #[arg(long, value_parser = ScenarioConfig::PRESETS)]
        preset: String,
        /// Print the preset as scenario JSON instead of evaluating it.
        #[arg(long)]
        print_config: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Extract the Casimir force from raw cantilever data (a1_m,Fm_N[,Fe_N][,err_N]).
    DecomposeRaw {
        #[arg(long)]
        input: PathBuf,
        /// Separation offset a0, m.
        #[arg(long)]
        a0: f64,
        /// Light-coupling slope C, N/m.
        #[arg(long)]
        c: f64,
        /// Contact potential, V, for the sphere-plate capacitor force.
        #[arg(long, requires = "radius")]
        potential: Option<f64>,
        /// Sphere radius, m, for the capacitor force.
        #[arg(long, requires = "potential")]
        radius: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
}

fn load_scenario(path: &Path) -> Result<Scenario> {
    let cfg = ScenarioConfig::load(path).with_context(|| format!("reading scenario {}", path.display()))?;
    let scenario = cfg.resolve(path.parent())?;
    Ok(scenario)
}

fn report_notes(notes: &[String]) {
    for n in notes {
        eprintln!("warning: {n}");
    }
}

fn fit_drude_cmd(
    input: &Path,
    lambda_min: f64,
    lambda_max: f64,
    weighting: WeightingArg,
    flatness_threshold: f64,
    output: &Output,
) -> Result<()> {
    let samples = casimir_core::analysis::load_optics(input)?;
    let opts = FitOptions {
        window: WavelengthWindow::new(lambda_min, lambda_max)?,
        weighting: match weighting {
            WeightingArg::Unweighted => Weighting::Unweighted,
            WeightingArg::Relative => Weighting::Relative,
        },
        flatness_threshold,
        ..FitOptions::default()
    };
    let fit = fit_drude(&samples, &opts)?;
    let p = &fit.params;
    let sigma = |s: Option<f64>| s.map_or_else(|| "n/a".to_owned(), |v| format!("{v:.4e}"));
    eprintln!("input          = {}", input.display());
    eprintln!(
        "window_m       = {:.3e} .. {:.3e}",
        fit.window.lambda_min, fit.window.lambda_max
    );
    eprintln!("points_used    = {} of {}", fit.points_used, samples.len());
    eprintln!("omega_p        = {:.6e} rad/s (sigma {})", p.omega_p, sigma(p.sigma_p));
    eprintln!(
        "omega_tau      = {:.6e} rad/s (sigma {})",
        p.omega_tau,
        sigma(p.sigma_tau)
    );
    eprintln!("rho0           = {:.4} uOhm cm", p.resistivity() / MICRO_OHM_CM);
    eprintln!(
        "flatness       = {:.4} (threshold {})",
        fit.flatness.flatness, fit.flatness.threshold
    );
    if fit.flatness.non_drude {
        let (lo, hi) = fit
            .flatness
            .resistivity
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, r)| {
                (lo.min(r), hi.max(r))
            });
        eprintln!(
            "warning: resistivity varies from {:.3} to {:.3} uOhm cm across the window; the Drude form is doubtful here",
            lo / MICRO_OHM_CM,
            hi / MICRO_OHM_CM
        );
    }
    if let (Some(first), Some(last)) = (fit.residuals.first(), fit.residuals.last()) {
        eprintln!(
            "fitted span_m  = {:.3e} .. {:.3e}",
            omega_to_wavelength(last.omega),
            omega_to_wavelength(first.omega)
        );
    }
    let mut w = output.writer()?;
    writeln!(w, "{}", casimir_core::drude_fit::FitReport::CSV_HEADER)?;
    writeln!(w, "{}", fit.csv_row())?;
    w.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn force_cmd(
    config: &Path,
    a_min: Option<f64>,
    a_max: Option<f64>,
    points: Option<usize>,
    log: bool,
    zero_t: bool,
    tol: Option<f64>,
    output: &Output,
) -> Result<()> {
    let mut scenario = load_scenario(config)?;
    if zero_t {
        scenario.temperature = 0.0;
    }
    if let Some(t) = tol {
        if !(t > 0.0 && t < 1.0) {
            bail!("--tol must lie in (0, 1), got {t}");
        }
        scenario.tolerance = t;
    }
    let grid = match (a_min, a_max, points) {
        (Some(lo), Some(hi), Some(n)) => GridSpec {
            a_min_m: lo,
            a_max_m: hi,
            points: n,
            spacing: if log { Spacing::Log } else { Spacing::Linear },
        }
        .separations()?,
        _ => scenario
            .grid
            .clone()
            .context("no separation grid: pass --a-min, --a-max and --points or add \"grid\" to the config")?,
    };
    let curve = scenario.curve(&grid)?;
    report_notes(&curve.warnings);
    curve.write_csv(output.writer()?)?;
    eprintln!("evaluated {} separations", curve.points.len());
    Ok(())
}

fn residual_cmd(measured: &Path, config: Option<&Path>, preset: Option<&str>, output: &Output) -> Result<()> {
    let scenario = match (config, preset) {
        (Some(path), _) => load_scenario(path)?,
        (None, Some(name)) => ScenarioConfig::preset(name).context("unknown preset")?.resolve(None)?,
        (None, None) => bail!("either --config or --preset is required"),
    };
    let series = load_measurements(measured, MeasurementFormat::Auto)?;
    let limit = scenario.on_grid_of(&series)?;
    report_notes(&limit.warnings);
    let r = residual(&series, &limit.to_series(scenario.name.clone())?)?;
    r.write_csv(output.writer()?, "residual_N")?;
    Ok(())
}

fn repair_cmd(input: &Path, h: f64, output: &Output) -> Result<()> {
    let series = load_measurements(input, MeasurementFormat::Auto)?;
    let repaired = rlm_repair(&series, h)?;
    eprintln!("{}", repaired.provenance());
    repaired.write_csv(output.writer()?, "F_N")?;
    Ok(())
}

fn scenario_cmd(preset: &str, print_config: bool, output: &Output) -> Result<()> {
    let cfg = ScenarioConfig::preset(preset).context("unknown preset")?;
    let mut w = output.writer()?;
    if print_config {
        writeln!(w, "{}", cfg.to_json()?)?;
        return Ok(());
    }
    if let Some(d) = &cfg.description {
        eprintln!("{preset}: {d}");
    }
    let curve = casimir_core::analysis::upper_limit_curve(&cfg)?;
    report_notes(&curve.warnings);
    curve.write_csv(w)?;
    Ok(())
}

fn decompose_cmd(
    input: &Path,
    a0: f64,
    c: f64,
    potential: Option<f64>,
    radius: Option<f64>,
    output: &Output,
) -> Result<()> {
    let electrostatic = match (potential, radius) {
        (Some(potential), Some(radius)) => Some(Electrostatic::SphereCapacitor { radius, potential }),
        _ => None,
    };
    let record = load_raw_record(input, electrostatic, Some(c), Some(a0))?;
    if matches!(record.electrostatic, Electrostatic::None) {
        eprintln!("warning: no electrostatic force subtracted (no Fe_N column and no --potential)");
    }
    decompose_raw(&record)?.write_csv(output.writer()?, "F_N")?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::FitDrude {
            input,
            lambda_min,
            lambda_max,
            weighting,
            flatness_threshold,
            output,
        } => fit_drude_cmd(&input, lambda_min, lambda_max, weighting, flatness_threshold, &output),
        Command::Force {
            config,
            a_min,
            a_max,
            points,
            log,
            zero_t,
            tol,
            output,
        } => force_cmd(&config, a_min, a_max, points, log, zero_t, tol, &output),
        Command::Residual {
            measured,
            config,
            preset,
            output,
        } => residual_cmd(&measured, config.as_deref(), preset.as_deref(), &output),
        Command::RepairRlm { input, h, output } => repair_cmd(&input, h, &output),
        Command::Scenario {
            preset,
            print_config,
            output,
        } => scenario_cmd(&preset, print_config, &output),
        Command::DecomposeRaw {
            input,
            a0,
            c,
            potential,
            radius,
            output,
        } => decompose_cmd(&input, a0, c, potential, radius, &output),
    }
}

/// Exit status for numerical non-convergence, distinct from input errors.
const EXIT_NOT_CONVERGED: u8 = 3;

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let converged = !e
                .chain()
                .any(|c| matches!(c.downcast_ref::<Error>(), Some(Error::NonConvergence { .. })));
            ExitCode::from(if converged { 1 } else { EXIT_NOT_CONVERGED })
        }
    }
}
