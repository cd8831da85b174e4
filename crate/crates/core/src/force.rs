//! Lifshitz forces between identical walls: plate–plate pressure and
//! sphere–plate force in the proximity-force form, at finite temperature
//! (Matsubara sum) or at zero temperature (frequency integral).
//!
//! Every Matsubara term is integrated over x = 2pζₙa/c ∈ [xₙ, ∞) with
//! xₙ = 2ζₙa/c, so p = x/xₙ. The n = 0 term is never evaluated through
//! ε(iζ → 0): for metals it is the closed-form classical limit.
//!
//! All returned forces and pressures are positive magnitudes of attraction.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{matsubara_spacing, C, HBAR, K_B, ZETA_3};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_to_infinity, Quadrature, Tolerance};
use crate::reflection::{LayerStack, WallResponse};

/// Hard cap on Matsubara terms at 300 K; scaled as 1/T below that.
pub const MAX_TERMS_AT_300K: usize = 5000;
/// PFT accuracy degrades as a/R; above this ratio a warning is attached.
pub const PFT_WARNING_RATIO: f64 = 0.01;

const MAX_SEGMENTS: usize = 400;

/// Matsubara frequencies ζₙ = 2πnkT/ħ at one temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatsubaraGrid {
    temperature: f64,
    spacing: f64,
}

impl MatsubaraGrid {
    pub fn new(temperature: f64) -> Result<Self> {
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::Domain(format!("temperature must be > 0, got {temperature}")));
        }
        Ok(Self {
            temperature,
            spacing: matsubara_spacing(temperature),
        })
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn zeta(&self, n: usize) -> f64 {
        n as f64 * self.spacing
    }

    pub fn max_terms(&self) -> usize {
        let scale = (300.0 / self.temperature).max(1.0);
        (MAX_TERMS_AT_300K as f64 * scale).ceil() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum GeometryKind {
    PlatePlate,
    SpherePlate { radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Geometry {
    pub kind: GeometryKind,
    pub separation: f64,
}

impl Geometry {
    pub fn plate_plate(separation: f64) -> Result<Self> {
        check_separation(separation)?;
        Ok(Self {
            kind: GeometryKind::PlatePlate,
            separation,
        })
    }

    pub fn sphere_plate(separation: f64, radius: f64) -> Result<Self> {
        check_separation(separation)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!("sphere radius must be > 0, got {radius}")));
        }
        Ok(Self {
            kind: GeometryKind::SpherePlate { radius },
            separation,
        })
    }

    /// Warnings about the applicability of the geometry model.
    pub fn warnings(&self) -> Vec<String> {
        match self.kind {
            GeometryKind::SpherePlate { radius } if self.separation / radius > PFT_WARNING_RATIO => {
                vec![format!(
                    "a/R = {:.3e} exceeds {PFT_WARNING_RATIO}; proximity-force result is approximate",
                    self.separation / radius
                )]
            }
            _ => Vec::new(),
        }
    }
}

fn check_separation(a: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("separation must be > 0, got {a}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForceResult {
    /// N for sphere–plate, N/m² for plate–plate.
    pub value: f64,
    /// Estimated absolute numerical error, same unit as `value`.
    pub error: f64,
    /// Matsubara terms summed (including n = 0), or 0 for the zero-T integral.
    pub terms: usize,
    /// Fraction of `value` carried by the n = 0 classical term.
    pub classical_share: f64,
    pub warnings: Vec<String>,
}

/// Classical (n = 0) sphere–plate force kTRζ(3)/(4a²).
pub fn classical_term(a: f64, radius: f64, temperature: f64) -> f64 {
    K_B * temperature * radius * ZETA_3 / (4.0 * a * a)
}

/// Classical (n = 0) plate–plate pressure kTζ(3)/(4πa³).
pub fn classical_pressure(a: f64, temperature: f64) -> f64 {
    K_B * temperature * ZETA_3 / (4.0 * PI * a * a * a)
}

/// π²ħc/(240a⁴).
pub fn ideal_plate_plate(a: f64) -> f64 {
    PI * PI * HBAR * C / (240.0 * a.powi(4))
}

/// π³ħcR/(360a³).
pub fn ideal_sphere_plate(a: f64, radius: f64) -> f64 {
    PI.powi(3) * HBAR * C * radius / (360.0 * a.powi(3))
}

/// Proximity-force transform F(a) = 2πR ∫ₐ^{R+a} P(x) dx of a plate–plate
/// pressure, integrated in ln x.
pub fn pft_transform<P: FnMut(f64) -> f64>(mut pressure: P, radius: f64, a: f64, rel_tol: f64) -> Result<f64> {
    check_separation(a)?;
    let upper = ((radius + a) / a).ln();
    let q = integrate(
        |s| {
            let x = a * s.exp();
            x * pressure(x)
        },
        0.0,
        upper,
        Tolerance::relative(rel_tol),
        MAX_SEGMENTS,
    );
    if !q.converged {
        return Err(Error::NonConvergence {
            what: "proximity-force integral".into(),
            error: q.error,
            target: rel_tol * q.value.abs(),
        });
    }
    Ok(2.0 * PI * radius * q.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Observable {
    /// -x ln[(1-r₁²e⁻ˣ)(1-r₂²e⁻ˣ)]
    SpherePlate,
    /// x² Σ r²e⁻ˣ/(1-r²e⁻ˣ)
    PlatePlate,
}

impl Observable {
    #[inline]
    fn kernel(self, x: f64, r1: f64, r2: f64) -> f64 {
        let decay = (-x).exp();
        let y1 = r1 * r1 * decay;
        let y2 = r2 * r2 * decay;
        match self {
            Self::SpherePlate => -x * ((-y1).ln_1p() + (-y2).ln_1p()),
            Self::PlatePlate => x * x * (y1 / (1.0 - y1) + y2 / (1.0 - y2)),
        }
    }

    /// Multiplies kT·Σ′ of the dimensionless term integrals.
    fn prefactor(self, geometry: &Geometry) -> f64 {
        let a = geometry.separation;
        match (self, geometry.kind) {
            (Self::SpherePlate, GeometryKind::SpherePlate { radius }) => radius / (4.0 * a * a),
            _ => 1.0 / (8.0 * PI * a * a * a),
        }
    }

    fn of(geometry: &Geometry) -> Self {
        match geometry.kind {
            GeometryKind::PlatePlate => Self::PlatePlate,
            GeometryKind::SpherePlate { .. } => Self::SpherePlate,
        }
    }
}

/// ∫_ν^∞ kernel(x; p = x/ν) dx for a wall frozen at the frequency with 2ζa/c = ν.
fn term_integral(response: &WallResponse, observable: Observable, nu: f64, rel_tol: f64) -> Quadrature {
    integrate_to_infinity(
        |x| {
            let (r1, r2) = response.reflection(x / nu);
            observable.kernel(x, r1, r2)
        },
        nu,
        Tolerance::relative(rel_tol),
        MAX_SEGMENTS,
    )
}

fn not_converged(what: &str, q: &Quadrature, tol: f64) -> Error {
    Error::NonConvergence {
        what: what.to_owned(),
        error: q.error,
        target: tol * q.value.abs(),
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Domain(format!(
            "relative tolerance must be in (0, 1), got {tol}"
        )));
    }
    Ok(())
}

/// Finite-temperature Lifshitz force (Matsubara sum) for identical walls.
pub fn lifshitz_force(wall: &LayerStack, geometry: &Geometry, temperature: f64, tol: f64) -> Result<ForceResult> {
    check_tol(tol)?;
    let grid = MatsubaraGrid::new(temperature)?;
    let observable = Observable::of(geometry);
    let a = geometry.separation;
    let kt = K_B * temperature;
    let scale = kt * observable.prefactor(geometry);

    // n = 0: half weight of the ideal-metal integral, 2ζ(3) (sphere) or 4ζ(3) (plates)
    let classical = match observable {
        Observable::SpherePlate => scale * ZETA_3,
        Observable::PlatePlate => scale * 2.0 * ZETA_3,
    };

    let term_tol = tol / 10.0;
    let mut sum = 0.0;
    let mut error = 0.0;
    let mut recent = [0.0f64; 3];
    let mut n = 1;
    loop {
        if n >= grid.max_terms() {
            return Err(Error::NonConvergence {
                what: format!("Matsubara sum ({} terms)", n),
                error: error + recent[2],
                target: tol * (classical + sum),
            });
        }
        let zeta = grid.zeta(n);
        let nu = 2.0 * zeta * a / C;
        let response = wall.at_frequency(zeta)?;
        let q = term_integral(&response, observable, nu, term_tol);
        if !q.converged {
            return Err(not_converged(&format!("Matsubara term n = {n}"), &q, term_tol));
        }
        let term = scale * q.value;
        sum += term;
        error += scale * q.error;
        recent = [recent[1], recent[2], term];
        if n >= 3 {
            let ratio = (recent[2] / recent[1]).max(recent[1] / recent[0]);
            let tail = if ratio < 1.0 {
                recent[2] * ratio / (1.0 - ratio)
            } else {
                f64::INFINITY
            };
            let total = classical + sum;
            if tail < 0.5 * tol * total || term == 0.0 {
                let value = total;
                let error = error + tail.min(term * 1e3);
                return Ok(ForceResult {
                    value,
                    error,
                    terms: n + 1,
                    classical_share: classical / value,
                    warnings: geometry.warnings(),
                });
            }
        }
        n += 1;
    }
}

/// Zero-temperature limit: kTΣ′ₙ replaced by (ħ/2π)∫dζ.
pub fn lifshitz_force_zero_t(wall: &LayerStack, geometry: &Geometry, tol: f64) -> Result<ForceResult> {
    check_tol(tol)?;
    let observable = Observable::of(geometry);
    let a = geometry.separation;
    // dζ = c/(2a) dν
    let scale = HBAR / (2.0 * PI) * C / (2.0 * a) * observable.prefactor(geometry);
    let inner_tol = tol / 20.0;
    let mut failure: Option<Error> = None;
    let outer = integrate_to_infinity(
        |nu| {
            if failure.is_some() || nu <= 0.0 {
                return 0.0;
            }
            let zeta = nu * C / (2.0 * a);
            let response = match wall.at_frequency(zeta) {
                Ok(r) => r,
                Err(e) => {
                    failure = Some(e);
                    return 0.0;
                }
            };
            let q = term_integral(&response, observable, nu, inner_tol);
            if !q.converged {
                failure = Some(not_converged("zero-temperature inner integral", &q, inner_tol));
            }
            q.value
        },
        0.0,
        Tolerance::relative(tol / 10.0),
        MAX_SEGMENTS,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    if !outer.converged {
        return Err(not_converged("zero-temperature frequency integral", &outer, tol / 10.0));
    }
    let value = scale * outer.value;
    Ok(ForceResult {
        value,
        error: scale * outer.error + inner_tol * value,
        terms: 0,
        classical_share: 0.0,
        warnings: geometry.warnings(),
    })
}

/// Plate–plate pressure (N/m²) at temperature `temperature`.
pub fn plate_plate_force(wall: &LayerStack, a: f64, temperature: f64, tol: f64) -> Result<ForceResult> {
    lifshitz_force(wall, &Geometry::plate_plate(a)?, temperature, tol)
}

pub fn plate_plate_force_zero_t(wall: &LayerStack, a: f64, tol: f64) -> Result<ForceResult> {
    lifshitz_force_zero_t(wall, &Geometry::plate_plate(a)?, tol)
}

/// Sphere–plate force (N) in the proximity-force form at temperature `temperature`.
pub fn sphere_plate_force(wall: &LayerStack, a: f64, radius: f64, temperature: f64, tol: f64) -> Result<ForceResult> {
    lifshitz_force(wall, &Geometry::sphere_plate(a, radius)?, temperature, tol)
}

pub fn sphere_plate_force_zero_t(wall: &LayerStack, a: f64, radius: f64, tol: f64) -> Result<ForceResult> {
    lifshitz_force_zero_t(wall, &Geometry::sphere_plate(a, radius)?, tol)
}

/// Temperature treatment of a force evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Thermal {
    Finite(f64),
    ZeroTemperature,
}

/// Evaluates `geometry_at(a)` for every separation, in parallel. The output
/// order matches `separations`.
pub fn force_curve<G>(
    wall: &LayerStack,
    separations: &[f64],
    geometry_at: G,
    thermal: Thermal,
    tol: f64,
) -> Result<Vec<ForceResult>>
where
    G: Fn(f64) -> Result<Geometry> + Sync,
{
    separations
        .par_iter()
        .map(|&a| {
            let g = geometry_at(a)?;
            match thermal {
                Thermal::Finite(t) => lifshitz_force(wall, &g, t, tol),
                Thermal::ZeroTemperature => lifshitz_force_zero_t(wall, &g, tol),
            }
        })
        .collect()
}
