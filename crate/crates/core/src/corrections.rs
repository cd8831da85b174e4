//! Closed-form correction factors to the ideal Casimir force, the
//! finite-conductivity interpolation family, and discrete-level roughness
//! averaging.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{C, HBAR, K_B, NM, ZETA_3};
use crate::error::{Error, Result};
use crate::force::{ideal_plate_plate, ideal_sphere_plate};
use crate::quadrature::{integrate, Tolerance};

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::Domain(format!("{name} must be > 0, got {v}")));
    }
    Ok(())
}

/// 1 - 4δ + (72/5)δ² with δ = c/(aω_p).
pub fn conductivity_factor_2nd(a: f64, omega_p: f64) -> Result<f64> {
    check_positive("separation", a)?;
    check_positive("plasma frequency", omega_p)?;
    Ok(second_order(C / (a * omega_p)))
}

fn second_order(delta: f64) -> f64 {
    1.0 - 4.0 * delta + 72.0 / 5.0 * delta * delta
}

/// K(h) = (ω₁ + ω₂ tanh(hω₁/c)) / (ω₂ + ω₁ tanh(hω₁/c)) for a top layer
/// with plasma frequency `omega_1p` over a substrate with `omega_2p`.
pub fn layered_k(h: f64, omega_1p: f64, omega_2p: f64) -> Result<f64> {
    if !(h >= 0.0) {
        return Err(Error::Domain(format!("layer thickness must be >= 0, got {h}")));
    }
    check_positive("top-layer plasma frequency", omega_1p)?;
    check_positive("substrate plasma frequency", omega_2p)?;
    let th = (h * omega_1p / C).tanh();
    Ok((omega_1p + omega_2p * th) / (omega_2p + omega_1p * th))
}

/// Second-order conductivity factor for a layered wall, with δ = K(h)c/(aω₁p).
pub fn layered_factor_2nd(a: f64, h: f64, omega_1p: f64, omega_2p: f64) -> Result<f64> {
    check_positive("separation", a)?;
    let k = layered_k(h, omega_1p, omega_2p)?;
    Ok(second_order(k * C / (a * omega_1p)))
}

/// 1 + (720/π²) f(ξ), f(ξ) = ξ³ζ(3)/(2π) - ξ⁴π²/45, ξ = kTa/(ħc).
///
/// Only valid for ξ < 1/2; beyond that use the Matsubara sum.
pub fn temperature_factor_ideal(a: f64, temperature: f64) -> Result<f64> {
    check_positive("separation", a)?;
    if !(temperature >= 0.0) {
        return Err(Error::Domain(format!("temperature must be >= 0, got {temperature}")));
    }
    let xi = K_B * temperature * a / (HBAR * C);
    if xi >= 0.5 {
        return Err(Error::OutOfValidity(format!(
            "ξ = {xi:.4} >= 1/2; evaluate the full Matsubara sum instead"
        )));
    }
    let f = xi.powi(3) * ZETA_3 / (2.0 * PI) - xi.powi(4) * PI * PI / 45.0;
    Ok(1.0 + 720.0 / (PI * PI) * f)
}

/// Surface averages of the distortion shape functions of both bodies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionMoments {
    pub f1: f64,
    pub f2: f64,
    pub f1_sq: f64,
    pub f2_sq: f64,
    pub f1_f2: f64,
    /// Amplitudes, m.
    pub amplitude_1: f64,
    pub amplitude_2: f64,
}

impl DistortionMoments {
    pub fn validate(&self) -> Result<()> {
        if self.f1_sq < self.f1 * self.f1 || self.f2_sq < self.f2 * self.f2 {
            return Err(Error::Domain("⟨f²⟩ must be at least ⟨f⟩²".into()));
        }
        if self.f1_f2 * self.f1_f2 > self.f1_sq * self.f2_sq * (1.0 + 1e-12) {
            return Err(Error::Domain("⟨f₁f₂⟩² exceeds ⟨f₁²⟩⟨f₂²⟩".into()));
        }
        if self.amplitude_1 < 0.0 || self.amplitude_2 < 0.0 {
            return Err(Error::Domain("distortion amplitudes must be >= 0".into()));
        }
        Ok(())
    }
}

/// Relative amplitude above which the second-order expansion is not trusted.
pub const DISTORTION_AMPLITUDE_LIMIT: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistortionFactor {
    pub value: f64,
    /// Set when A/a ≥ [`DISTORTION_AMPLITUDE_LIMIT`] for either body.
    pub beyond_validity: bool,
}

/// Second-order distortion factor multiplying the ideal sphere–plate force.
pub fn distortion_factor(m: &DistortionMoments, a: f64) -> Result<DistortionFactor> {
    check_positive("separation", a)?;
    m.validate()?;
    let (r1, r2) = (m.amplitude_1 / a, m.amplitude_2 / a);
    let value =
        1.0 + 3.0 * (m.f1 * r1 - m.f2 * r2) + 6.0 * (m.f1_sq * r1 * r1 - 2.0 * m.f1_f2 * r1 * r2 + m.f2_sq * r2 * r2);
    Ok(DistortionFactor {
        value,
        beyond_validity: r1.max(r2) >= DISTORTION_AMPLITUDE_LIMIT,
    })
}

/// Members of the finite-conductivity interpolation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KrmmMode {
    /// Plate pressure P₀(a)(1 + (11/3)δ)^(-16/11), N/m².
    PlateInterp,
    /// Proximity-force integral of the plate interpolation, N.
    SphereIntegral,
    /// Fourth-order expansion of the sphere force, N.
    Series4,
}

/// Evaluates one member of the interpolation family at δ = c/(aω_p).
pub fn krmm_family(a: f64, omega_p: f64, radius: f64, mode: KrmmMode) -> Result<f64> {
    check_positive("separation", a)?;
    check_positive("plasma frequency", omega_p)?;
    let delta = C / (a * omega_p);
    match mode {
        KrmmMode::PlateInterp => Ok(ideal_plate_plate(a) * (1.0 + 11.0 / 3.0 * delta).powf(-16.0 / 11.0)),
        KrmmMode::SphereIntegral => {
            check_positive("sphere radius", radius)?;
            // x ∈ [1, ∞) mapped to u = 1/x ∈ (0, 1]
            let q = integrate(
                |u| u * u * (1.0 + 11.0 / 3.0 * delta * u).powf(-16.0 / 11.0),
                0.0,
                1.0,
                Tolerance::relative(1e-12),
                100,
            );
            if !q.converged {
                return Err(Error::NonConvergence {
                    what: "interpolation sphere integral".into(),
                    error: q.error,
                    target: 1e-12 * q.value,
                });
            }
            Ok(3.0 * ideal_sphere_plate(a, radius) * q.value)
        }
        KrmmMode::Series4 => {
            check_positive("sphere radius", radius)?;
            let d = delta;
            let bracket = 1.0 - 4.0 * d + 72.0 / 5.0 * d * d - 152.0 / 3.0 * d.powi(3) + 532.0 / 3.0 * d.powi(4);
            Ok(ideal_sphere_plate(a, radius) * bracket)
        }
    }
}

/// Relative distortion amplitude (1/2)ΔR/R of a parabolic lens whose
/// curvature radius is uncertain by ΔR.
pub fn parabolic_estimate(radius: f64, delta_r: f64) -> Result<f64> {
    check_positive("curvature radius", radius)?;
    if !(delta_r.abs() < radius) {
        return Err(Error::Domain(format!(
            "|ΔR| = {} must be below R = {radius}",
            delta_r.abs()
        )));
    }
    Ok(0.5 * delta_r / radius)
}

/// One discrete distortion level: its height above the body's base surface
/// and the fraction of surface it occupies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoughnessLevel {
    pub height: f64,
    pub probability: f64,
}

/// Discrete distortion heights shared by both bodies.
///
/// Heights are stored as given; averaging always uses heights measured from
/// the mean plane, dᵢ = hᵢ - Σvⱼhⱼ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoughnessProfile {
    pub name: String,
    pub levels: Vec<RoughnessLevel>,
    /// Published reduction a - a_min of the smallest local separation, m.
    #[serde(default)]
    pub anchor: Option<f64>,
}

/// A local separation between level `i` on one body and level `j` on the other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalSeparation {
    pub i: usize,
    pub j: usize,
    pub separation: f64,
    pub weight: f64,
}

impl RoughnessProfile {
    pub fn new(name: &str, levels: Vec<RoughnessLevel>) -> Result<Self> {
        let p = Self {
            name: name.to_owned(),
            levels,
            anchor: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Smooth surfaces.
    pub fn none() -> Self {
        Self {
            name: "none".into(),
            levels: vec![RoughnessLevel {
                height: 0.0,
                probability: 1.0,
            }],
            anchor: None,
        }
    }

    /// Al/AuPd surfaces of the 1998 AFM measurement: 40, 20 and 5 nm
    /// distortions covering 11, 25 and 64 % of the surface.
    pub fn afm_mr_1998() -> Self {
        Self {
            name: "afm-mr-1998".into(),
            levels: vec![
                RoughnessLevel {
                    height: 40.0 * NM,
                    probability: 0.11,
                },
                RoughnessLevel {
                    height: 20.0 * NM,
                    probability: 0.25,
                },
                RoughnessLevel {
                    height: 5.0 * NM,
                    probability: 0.64,
                },
            ],
            anchor: Some(54.8 * NM),
        }
    }

    /// Improved 1999 AFM surfaces: 14, 7 and 2 nm covering 5, 11 and 84 %.
    pub fn afm_rlm_1999() -> Self {
        Self {
            name: "afm-rlm-1999".into(),
            levels: vec![
                RoughnessLevel {
                    height: 14.0 * NM,
                    probability: 0.05,
                },
                RoughnessLevel {
                    height: 7.0 * NM,
                    probability: 0.11,
                },
                RoughnessLevel {
                    height: 2.0 * NM,
                    probability: 0.84,
                },
            ],
            anchor: None,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "none" => Some(Self::none()),
            "afm-mr-1998" => Some(Self::afm_mr_1998()),
            "afm-rlm-1999" => Some(Self::afm_rlm_1999()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::Roughness("no levels".into()));
        }
        let mut total = 0.0;
        for l in &self.levels {
            if !(l.probability >= 0.0) || !l.height.is_finite() {
                return Err(Error::Roughness(format!("invalid level {l:?}")));
            }
            total += l.probability;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Roughness(format!("probabilities sum to {total}, expected 1")));
        }
        Ok(())
    }

    /// Mean height Σvᵢhᵢ subtracted during centering.
    pub fn centering_offset(&self) -> f64 {
        self.levels.iter().map(|l| l.probability * l.height).sum()
    }

    /// Heights above the mean plane.
    pub fn centered_heights(&self) -> Vec<f64> {
        let offset = self.centering_offset();
        self.levels.iter().map(|l| l.height - offset).collect()
    }

    /// aᵢⱼ = a - (dᵢ + dⱼ) with joint weight vᵢvⱼ, for every level pair.
    pub fn local_separations(&self, a: f64) -> Vec<LocalSeparation> {
        let d = self.centered_heights();
        let mut out = Vec::with_capacity(d.len() * d.len());
        for (i, (di, li)) in d.iter().zip(&self.levels).enumerate() {
            for (j, (dj, lj)) in d.iter().zip(&self.levels).enumerate() {
                out.push(LocalSeparation {
                    i,
                    j,
                    separation: a - (di + dj),
                    weight: li.probability * lj.probability,
                });
            }
        }
        out
    }

    /// Reduction a - min aᵢⱼ of the closest local separation.
    pub fn minimal_reduction(&self) -> f64 {
        let d = self.centered_heights();
        2.0 * d.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Reports disagreement between the centered reconstruction and the
    /// published closest-approach anchor.
    pub fn warnings(&self) -> Vec<String> {
        match self.anchor {
            Some(anchor) if (self.minimal_reduction() - anchor).abs() > 0.05 * NM => vec![format!(
                "roughness '{}': reconstructed a - a_min = {:.2} nm differs from published {:.2} nm",
                self.name,
                self.minimal_reduction() / NM,
                anchor / NM
            )],
            _ => Vec::new(),
        }
    }
}

/// Σᵢⱼ vᵢvⱼ F(aᵢⱼ) over all pairs of distortion levels facing each other.
pub fn roughness_average<F>(mut force: F, a: f64, profile: &RoughnessProfile) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    check_positive("separation", a)?;
    profile.validate()?;
    let pairs = profile.local_separations(a);
    if let Some(bad) = pairs.iter().find(|p| p.separation <= 0.0) {
        return Err(Error::SurfacesInContact {
            separation: bad.separation,
            i: bad.i,
            j: bad.j,
        });
    }
    let mut total = 0.0;
    for p in pairs.iter().filter(|p| p.weight > 0.0) {
        total += p.weight * force(p.separation)?;
    }
    Ok(total)
}
