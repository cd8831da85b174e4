//! Two-step linear extraction of Drude parameters from infrared data.
//!
//! The damping frequency comes from the slope of (1-ε′)/ε″ against ω, then
//! ω_p² from the slope of (1-ε′) against 1/(ω²+ω_τ²). Both are straight-line
//! fits through the origin. A separate flatness check of the
//! frequency-resolved resistivity tells whether the Drude form applies at all.

use serde::Serialize;

use crate::constants::{omega_to_wavelength, UM};
use crate::dielectric::{resistivity_from_sample, DrudeParams, OpticalSample};
use crate::error::{Error, Result};

/// Resistivity spread above which a dataset is flagged as non-Drude. There
/// is no published number for this; 0.5 separates the noble metals from Pd.
pub const DEFAULT_FLATNESS_THRESHOLD: f64 = 0.5;

/// Vacuum wavelength range (m) of samples used in a fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WavelengthWindow {
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl Default for WavelengthWindow {
    fn default() -> Self {
        Self {
            lambda_min: 2.0 * UM,
            lambda_max: 32.0 * UM,
        }
    }
}

impl WavelengthWindow {
    pub fn new(lambda_min: f64, lambda_max: f64) -> Result<Self> {
        if !(lambda_min >= 0.0 && lambda_max > lambda_min) {
            return Err(Error::Domain(format!(
                "invalid wavelength window [{lambda_min:e}, {lambda_max:e}] m"
            )));
        }
        Ok(Self { lambda_min, lambda_max })
    }

    /// Window that accepts every sample.
    pub fn unbounded() -> Self {
        Self {
            lambda_min: 0.0,
            lambda_max: f64::INFINITY,
        }
    }

    pub fn contains(&self, omega: f64) -> bool {
        let lambda = omega_to_wavelength(omega);
        lambda >= self.lambda_min && lambda <= self.lambda_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Weighting {
    /// Ordinary least squares.
    Unweighted,
    /// Weights 1/y², i.e. minimise relative residuals.
    Relative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitOptions {
    pub window: WavelengthWindow,
    pub min_points: usize,
    pub weighting: Weighting,
    pub flatness_threshold: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            window: WavelengthWindow::default(),
            min_points: 3,
            weighting: Weighting::Unweighted,
            flatness_threshold: DEFAULT_FLATNESS_THRESHOLD,
        }
    }
}

/// A fitted value with its 1-σ statistical error (absent with one point).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Slope {
    slope: f64,
    sigma: Option<f64>,
}

/// Least-squares line y = b·x through the origin.
fn slope_through_origin(points: &[(f64, f64)], weighting: Weighting) -> Result<Slope> {
    let weight = |y: f64| match weighting {
        Weighting::Unweighted => 1.0,
        Weighting::Relative => 1.0 / (y * y),
    };
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, y) in points {
        let w = weight(y);
        sxx += w * x * x;
        sxy += w * x * y;
    }
    if !(sxx > 0.0) || !sxx.is_finite() {
        return Err(Error::Fit("degenerate abscissae in linear fit".into()));
    }
    let slope = sxy / sxx;
    let sigma = if points.len() > 1 {
        let ss: f64 = points.iter().map(|&(x, y)| weight(y) * (y - slope * x).powi(2)).sum();
        Some((ss / (points.len() - 1) as f64 / sxx).sqrt())
    } else {
        None
    };
    Ok(Slope { slope, sigma })
}

fn in_window<'a>(samples: &'a [OpticalSample], opts: &FitOptions) -> Vec<&'a OpticalSample> {
    samples.iter().filter(|s| opts.window.contains(s.omega)).collect()
}

fn require_points(n: usize, opts: &FitOptions, what: &str) -> Result<()> {
    if n < opts.min_points.max(1) {
        return Err(Error::Fit(format!(
            "{what}: {n} usable points in window, need at least {}",
            opts.min_points.max(1)
        )));
    }
    Ok(())
}

fn damping_from(samples: &[&OpticalSample], opts: &FitOptions) -> Result<Estimate> {
    if samples.iter().any(|s| !(s.eps_im > 0.0)) {
        return Err(Error::Fit("ε″ must be positive on every fitted point".into()));
    }
    require_points(samples.len(), opts, "damping fit")?;
    let points: Vec<_> = samples.iter().map(|s| (s.omega, (1.0 - s.eps_re) / s.eps_im)).collect();
    let fit = slope_through_origin(&points, opts.weighting)?;
    if !(fit.slope > 0.0) {
        return Err(Error::Fit(format!("non-positive slope {:e} for (1-ε′)/ε″", fit.slope)));
    }
    let value = 1.0 / fit.slope;
    Ok(Estimate {
        value,
        sigma: fit.sigma.map(|s| s * value * value),
    })
}

fn plasma_from(samples: &[&OpticalSample], omega_tau: f64, opts: &FitOptions) -> Result<Estimate> {
    require_points(samples.len(), opts, "plasma fit")?;
    let points: Vec<_> = samples
        .iter()
        .map(|s| (1.0 / (s.omega * s.omega + omega_tau * omega_tau), 1.0 - s.eps_re))
        .collect();
    let fit = slope_through_origin(&points, opts.weighting)?;
    if !(fit.slope > 0.0) {
        return Err(Error::Fit(format!("negative slope {:e} for 1-ε′", fit.slope)));
    }
    let value = fit.slope.sqrt();
    Ok(Estimate {
        value,
        sigma: fit.sigma.map(|s| s / (2.0 * value)),
    })
}

/// ω_τ as the inverse slope of (1-ε′)/ε″ = ω/ω_τ over the window.
pub fn fit_damping(samples: &[OpticalSample], opts: &FitOptions) -> Result<Estimate> {
    damping_from(&in_window(samples, opts), opts)
}

/// ω_p from 1-ε′ = ω_p²/(ω²+ω_τ²) with ω_τ already known.
pub fn fit_plasma(samples: &[OpticalSample], omega_tau: f64, opts: &FitOptions) -> Result<Estimate> {
    plasma_from(&in_window(samples, opts), omega_tau, opts)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatnessReport {
    /// (ω, ρ(ω)) in rad/s and Ω·m.
    pub resistivity: Vec<(f64, f64)>,
    pub median: f64,
    /// (max - min)/median of ρ(ω) over the window.
    pub flatness: f64,
    pub threshold: f64,
    pub non_drude: bool,
}

/// Frequency-resolved resistivity over the window and its relative spread.
pub fn drude_validity(samples: &[OpticalSample], opts: &FitOptions) -> Result<FlatnessReport> {
    let used = in_window(samples, opts);
    if used.len() < 3 {
        return Err(Error::Fit(format!(
            "flatness check: {} points in window, need at least 3",
            used.len()
        )));
    }
    let resistivity = used
        .iter()
        .map(|s| Ok((s.omega, resistivity_from_sample(s)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut sorted: Vec<f64> = resistivity.iter().map(|r| r.1).collect();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let flatness = if median == 0.0 {
        if sorted[n - 1] == sorted[0] {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (sorted[n - 1] - sorted[0]) / median.abs()
    };
    Ok(FlatnessReport {
        resistivity,
        median,
        flatness,
        threshold: opts.flatness_threshold,
        non_drude: flatness > opts.flatness_threshold,
    })
}

/// Measured minus fitted permittivity at one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub omega: f64,
    pub eps_re: f64,
    pub eps_im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub params: DrudeParams,
    pub window: WavelengthWindow,
    pub points_used: usize,
    pub residuals: Vec<Residual>,
    pub flatness: FlatnessReport,
}

impl FitReport {
    /// Machine-readable CSV header matching [`FitReport::csv_row`].
    pub const CSV_HEADER: &'static str = "omega_p,sigma_p,omega_tau,sigma_tau,rho0_uOhm_cm,flatness";

    pub fn csv_row(&self) -> String {
        let fmt_sigma = |s: Option<f64>| s.map_or_else(|| "nan".to_owned(), |v| format!("{v:.6e}"));
        format!(
            "{:.6e},{},{:.6e},{},{:.6},{:.6}",
            self.params.omega_p,
            fmt_sigma(self.params.sigma_p),
            self.params.omega_tau,
            fmt_sigma(self.params.sigma_tau),
            self.params.resistivity() / crate::constants::MICRO_OHM_CM,
            self.flatness.flatness
        )
    }
}

/// Full two-step fit plus flatness check for one dataset.
pub fn fit_drude(samples: &[OpticalSample], opts: &FitOptions) -> Result<FitReport> {
    let used = in_window(samples, opts);
    let tau = damping_from(&used, opts)?;
    let plasma = plasma_from(&used, tau.value, opts)?;
    let mut params = DrudeParams::new(plasma.value, tau.value)?;
    params.sigma_p = plasma.sigma;
    params.sigma_tau = tau.sigma;
    let residuals = used
        .iter()
        .map(|s| {
            let (re, im) = params.eps_real_axis(s.omega);
            Residual {
                omega: s.omega,
                eps_re: s.eps_re - re,
                eps_im: s.eps_im - im,
            }
        })
        .collect();
    let flatness = drude_validity(samples, opts)?;
    Ok(FitReport {
        params,
        window: opts.window,
        points_used: used.len(),
        residuals,
        flatness,
    })
}
