//! Imaginary-axis permittivity from tabulated real-axis ε″ via
//!
//! ε(iζ) - 1 = (2/π) ∫₀^∞ ω ε″(ω)/(ω² + ζ²) dω.
//!
//! Between samples ε″ is interpolated linearly in log-log space (linearly in
//! ω when an endpoint is zero). Below the table a Drude form fitted to the
//! lowest decade of data is integrated analytically; above it ε″ ∝ ω⁻³.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2};

use serde::Serialize;

use crate::dielectric::{DrudeParams, OpticalSample};
use crate::drude_fit::{fit_damping, fit_plasma, FitOptions, WavelengthWindow};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};

/// Extension of ε″ below the lowest tabulated frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LowTail {
    Drude(DrudeParams),
    /// No usable Drude fit (e.g. insulating data); ε″ taken as zero.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailModel {
    pub low: LowTail,
    /// ε″(ω) = high_coefficient · ω⁻³ above the table.
    pub high_coefficient: f64,
}

/// Contributions to ε(iζ) - 1 from the three frequency ranges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KkEvaluation {
    pub value: f64,
    pub low_tail: f64,
    pub table: f64,
    pub high_tail: f64,
}

/// Validated ε″ table with its tail model, ready for repeated evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TabulatedDielectric {
    samples: Vec<OpticalSample>,
    tails: TailModel,
}

impl TabulatedDielectric {
    pub fn new(samples: Vec<OpticalSample>) -> Result<Self> {
        validate(&samples)?;
        let tails = TailModel {
            low: fit_low_tail(&samples),
            high_coefficient: {
                let last = samples[samples.len() - 1];
                last.eps_im * last.omega.powi(3)
            },
        };
        Ok(Self { samples, tails })
    }

    /// Uses an explicit tail model instead of the automatic one.
    pub fn with_tails(samples: Vec<OpticalSample>, tails: TailModel) -> Result<Self> {
        validate(&samples)?;
        Ok(Self { samples, tails })
    }

    pub fn samples(&self) -> &[OpticalSample] {
        &self.samples
    }

    pub fn tails(&self) -> &TailModel {
        &self.tails
    }

    pub fn eps_imag_axis(&self, zeta: f64) -> f64 {
        self.evaluate(zeta).value
    }

    pub fn evaluate(&self, zeta: f64) -> KkEvaluation {
        let w_min = self.samples[0].omega;
        let w_max = self.samples[self.samples.len() - 1].omega;
        let low_tail = match self.tails.low {
            LowTail::Drude(p) => drude_below(&p, w_min, zeta),
            LowTail::None => 0.0,
        };
        let table: f64 = self
            .samples
            .windows(2)
            .map(|pair| segment(&pair[0], &pair[1], zeta))
            .sum();
        let high_tail = self.tails.high_coefficient * inverse_cube_above(w_max, zeta);
        let (low_tail, table, high_tail) = (FRAC_2_PI * low_tail, FRAC_2_PI * table, FRAC_2_PI * high_tail);
        KkEvaluation {
            value: 1.0 + (low_tail + table + high_tail).max(0.0),
            low_tail,
            table,
            high_tail,
        }
    }
}

fn validate(samples: &[OpticalSample]) -> Result<()> {
    if samples.len() < 4 {
        return Err(Error::InvalidTable(format!(
            "{} samples, need at least 4",
            samples.len()
        )));
    }
    for (i, s) in samples.iter().enumerate() {
        if !(s.eps_im >= 0.0) {
            return Err(Error::InvalidTable(format!("negative ε″ at sample {i}")));
        }
        if !(s.omega > 0.0 && s.omega.is_finite()) {
            return Err(Error::InvalidTable(format!("non-positive frequency at sample {i}")));
        }
    }
    for (i, pair) in samples.windows(2).enumerate() {
        if !(pair[1].omega > pair[0].omega) {
            return Err(Error::InvalidTable(format!(
                "frequencies not strictly increasing at sample {}",
                i + 1
            )));
        }
    }
    Ok(())
}

fn fit_low_tail(samples: &[OpticalSample]) -> LowTail {
    let decade_end = 10.0 * samples[0].omega;
    let mut n = samples.iter().take_while(|s| s.omega <= decade_end).count();
    n = n.max(2).min(samples.len());
    let opts = FitOptions {
        window: WavelengthWindow::unbounded(),
        min_points: 2,
        ..FitOptions::default()
    };
    let lowest = &samples[..n];
    let fitted = fit_damping(lowest, &opts)
        .and_then(|tau| Ok((fit_plasma(lowest, tau.value, &opts)?, tau)))
        .and_then(|(p, tau)| DrudeParams::new(p.value, tau.value));
    match fitted {
        Ok(p) => LowTail::Drude(p),
        Err(_) => LowTail::None,
    }
}

/// ∫₀^W ω ε″_D(ω)/(ω²+ζ²) dω for the Drude ε″ = ω_p²ω_τ/(ω(ω²+ω_τ²)).
fn drude_below(p: &DrudeParams, w: f64, zeta: f64) -> f64 {
    let (a, b) = (p.omega_tau, zeta);
    let wp2 = p.omega_p * p.omega_p;
    if a == 0.0 {
        // plasma limit: all weight sits in the ω = 0 delta function
        return FRAC_PI_2 * wp2 / (b * b);
    }
    if (b - a).abs() <= 1e-6 * b {
        let at = (w / b).atan();
        return wp2 * a * (w / (b * b + w * w) + at / b) / (2.0 * b * b);
    }
    // ω_p² ω_τ ∫ dω /((ω²+a²)(ω²+b²)) = ω_p² [atan(W/a) - (a/b)atan(W/b)]/(b²-a²)
    wp2 * ((w / a).atan() - (a / b) * (w / b).atan()) / (b * b - a * a)
}

/// ∫_W^∞ ω·ω⁻³/(ω²+ζ²) dω = [1/W - atan(ζ/W)/ζ]/ζ².
fn inverse_cube_above(w: f64, zeta: f64) -> f64 {
    let t = zeta / w;
    if t < 1e-3 {
        let t2 = t * t;
        (1.0 / 3.0 - t2 / 5.0 + t2 * t2 / 7.0) / (w * w * w)
    } else {
        (1.0 / w - t.atan() / zeta) / (zeta * zeta)
    }
}

fn segment(lo: &OpticalSample, hi: &OpticalSample, zeta: f64) -> f64 {
    let (w1, w2) = (lo.omega, hi.omega);
    let (e1, e2) = (lo.eps_im, hi.eps_im);
    if e1 == 0.0 && e2 == 0.0 {
        return 0.0;
    }
    if e1 == 0.0 || e2 == 0.0 {
        // ε″ = α + βω, integrated in closed form
        let beta = (e2 - e1) / (w2 - w1);
        let alpha = e1 - beta * w1;
        let z2 = zeta * zeta;
        let log_part = 0.5 * ((w2 * w2 + z2) / (w1 * w1 + z2)).ln();
        let atan_part = (w2 - w1) - zeta * ((w2 / zeta).atan() - (w1 / zeta).atan());
        return alpha * log_part + beta * atan_part;
    }
    // log-log interpolation; integrate in u = ln ω
    let (u1, u2) = (w1.ln(), w2.ln());
    let m = (e2 / e1).ln() / (u2 - u1);
    let z2 = zeta * zeta;
    let q = integrate(
        |u| {
            let w = u.exp();
            let eps = e1 * (m * (u - u1)).exp();
            w * w * eps / (w * w + z2)
        },
        u1,
        u2,
        Tolerance::relative(1e-11),
        50,
    );
    q.value
}

/// ε(iζ) from an ordered optical table, with automatic tails.
pub fn kk_transform(samples: &[OpticalSample], zeta: f64) -> Result<f64> {
    if !(zeta > 0.0) {
        return Err(Error::Domain(format!("imaginary frequency must be > 0, got {zeta}")));
    }
    Ok(TabulatedDielectric::new(samples.to_vec())?.eps_imag_axis(zeta))
}
