//! Permittivity models on the real and imaginary frequency axes.
//!
//! All frequencies are angular (rad/s) and all quantities are SI. The
//! imaginary-axis value ε(iζ) is what the Lifshitz force needs; real-axis
//! values are used for fitting and validation against optical data.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constants::{AMU, EPS_0, E_CHARGE, M_E};
use crate::error::{Error, Result};
use crate::kk::TabulatedDielectric;

/// Plasma and damping frequencies of a free-electron metal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrudeParams {
    pub omega_p: f64,
    pub omega_tau: f64,
    /// 1-σ uncertainty of `omega_p` when the parameters come from a fit.
    #[serde(default)]
    pub sigma_p: Option<f64>,
    #[serde(default)]
    pub sigma_tau: Option<f64>,
}

impl DrudeParams {
    pub fn new(omega_p: f64, omega_tau: f64) -> Result<Self> {
        if !(omega_p.is_finite() && omega_p > 0.0) {
            return Err(Error::Domain(format!("plasma frequency must be > 0, got {omega_p}")));
        }
        if !(omega_tau.is_finite() && omega_tau >= 0.0) {
            return Err(Error::Domain(format!(
                "damping frequency must be >= 0, got {omega_tau}"
            )));
        }
        Ok(Self {
            omega_p,
            omega_tau,
            sigma_p: None,
            sigma_tau: None,
        })
    }

    /// Builds parameters from a plasma frequency and a static resistivity
    /// `rho0` (Ω·m), inverting ρ₀ = ω_τ/(ε₀ω_p²).
    pub fn from_resistivity(omega_p: f64, rho0: f64) -> Result<Self> {
        if !(rho0.is_finite() && rho0 >= 0.0) {
            return Err(Error::Domain(format!("resistivity must be >= 0, got {rho0}")));
        }
        Self::new(omega_p, rho0 * EPS_0 * omega_p * omega_p)
    }

    pub fn with_uncertainties(mut self, sigma_p: f64, sigma_tau: f64) -> Self {
        self.sigma_p = Some(sigma_p);
        self.sigma_tau = Some(sigma_tau);
        self
    }

    /// Static (frequency independent) resistivity ω_τ/(ε₀ω_p²) in Ω·m.
    pub fn resistivity(&self) -> f64 {
        self.omega_tau / (EPS_0 * self.omega_p * self.omega_p)
    }

    /// ε′ and ε″ of the Drude function at real frequency `omega`.
    pub fn eps_real_axis(&self, omega: f64) -> (f64, f64) {
        let wp2 = self.omega_p * self.omega_p;
        let denom = omega * omega + self.omega_tau * self.omega_tau;
        (1.0 - wp2 / denom, wp2 * self.omega_tau / (omega * denom))
    }

    /// ε(iζ) = 1 + ω_p²/(ζ(ζ + ω_τ)).
    pub fn eps_imag_axis(&self, zeta: f64) -> f64 {
        1.0 + self.omega_p * self.omega_p / (zeta * (zeta + self.omega_tau))
    }
}

/// Frequency-resolved resistivity Im(1/(ε₀(1-ε)ω)) from one optical sample.
pub fn resistivity_from_sample(sample: &OpticalSample) -> Result<f64> {
    let re = 1.0 - sample.eps_re;
    let im = -sample.eps_im;
    let norm = re * re + im * im;
    if norm == 0.0 {
        return Err(Error::Singular(format!(
            "ε = 1 at ω = {:.4e} rad/s, resistivity undefined",
            sample.omega
        )));
    }
    // 1/(re + i·im) = (re - i·im)/norm
    Ok(-im / norm / (EPS_0 * sample.omega))
}

/// One point of optical data on the real frequency axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticalSample {
    pub omega: f64,
    pub eps_re: f64,
    pub eps_im: f64,
}

impl OpticalSample {
    pub fn new(omega: f64, eps_re: f64, eps_im: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::Domain(format!("frequency must be > 0, got {omega}")));
        }
        if !eps_re.is_finite() || !eps_im.is_finite() {
            return Err(Error::Domain("permittivity must be finite".into()));
        }
        if eps_im < 0.0 {
            return Err(Error::Domain(format!(
                "ε″ = {eps_im} < 0 at ω = {omega:.4e} (active medium)"
            )));
        }
        Ok(Self { omega, eps_re, eps_im })
    }

    /// From the complex refraction index n + iκ = √ε.
    pub fn from_refractive_index(omega: f64, n: f64, kappa: f64) -> Result<Self> {
        Self::new(omega, n * n - kappa * kappa, 2.0 * n * kappa)
    }
}

/// A permittivity model that can be evaluated on the imaginary axis.
#[derive(Debug, Clone, PartialEq)]
pub enum DielectricModel {
    /// Perfect conductor, the formal ε → ∞ limit.
    Ideal,
    Plasma {
        omega_p: f64,
    },
    Drude(DrudeParams),
    /// Measured ε″ on the real axis, continued to the imaginary axis by the
    /// dispersion relation.
    Tabulated(Arc<TabulatedDielectric>),
}

impl DielectricModel {
    pub fn plasma(omega_p: f64) -> Result<Self> {
        DrudeParams::new(omega_p, 0.0)?;
        Ok(Self::Plasma { omega_p })
    }

    pub fn drude(omega_p: f64, omega_tau: f64) -> Result<Self> {
        Ok(Self::Drude(DrudeParams::new(omega_p, omega_tau)?))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Ideal => "ideal",
            Self::Plasma { .. } => "plasma",
            Self::Drude(_) => "drude",
            Self::Tabulated(_) => "tabulated",
        }
    }

    pub fn is_ideal(&self) -> bool {
        matches!(self, Self::Ideal)
    }

    /// (ε′, ε″) at real frequency `omega`; only the closed-form models have one.
    pub fn eps_real_axis(&self, omega: f64) -> Result<(f64, f64)> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Domain(format!("real frequency must be > 0, got {omega}")));
        }
        match self {
            Self::Plasma { omega_p } => Ok((1.0 - omega_p * omega_p / (omega * omega), 0.0)),
            Self::Drude(p) => Ok(p.eps_real_axis(omega)),
            Self::Ideal | Self::Tabulated(_) => Err(Error::NoRealAxisForm(self.name())),
        }
    }

    /// ε(iζ) for ζ > 0. The ideal conductor evaluates to +∞; reflection code
    /// branches on [`DielectricModel::Ideal`] before ever using that value.
    pub fn eps_imag_axis(&self, zeta: f64) -> Result<f64> {
        if !(zeta > 0.0) || zeta.is_nan() {
            return Err(Error::Domain(format!(
                "imaginary frequency must be > 0, got {zeta} (ζ = 0 is the classical term)"
            )));
        }
        Ok(match self {
            Self::Ideal => f64::INFINITY,
            Self::Plasma { omega_p } => 1.0 + omega_p * omega_p / (zeta * zeta),
            Self::Drude(p) => p.eps_imag_axis(zeta),
            Self::Tabulated(t) => t.eps_imag_axis(zeta),
        })
    }
}

/// One constituent of a metal for the free-electron density estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Species {
    pub name: String,
    /// kg per atom.
    pub atomic_mass: f64,
    /// Density of the pure constituent, kg/m³.
    pub mass_density: f64,
    pub electrons_per_atom: f64,
    pub atom_fraction: f64,
}

impl Species {
    pub fn new(name: &str, atomic_mass_u: f64, density_g_cm3: f64, electrons: f64, fraction: f64) -> Self {
        Self {
            name: name.to_owned(),
            atomic_mass: atomic_mass_u * AMU,
            mass_density: density_g_cm3 * 1e3,
            electrons_per_atom: electrons,
            atom_fraction: fraction,
        }
    }

    /// Free electrons per m³ contributed by the pure constituent.
    fn electron_density(&self) -> f64 {
        self.electrons_per_atom * self.mass_density / self.atomic_mass
    }
}

/// Composition of a metal or alloy.
///
/// The free-electron density is the atom-fraction weighted sum of each
/// constituent's own electron density, n = Σ fᵢ zᵢ ρᵢ/Mᵢ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialComposition {
    pub species: Vec<Species>,
    /// m*/mₑ, at least 1 for the metals of interest.
    pub effective_mass_ratio: f64,
}

impl MaterialComposition {
    pub fn gold() -> Self {
        Self {
            species: vec![Species::new("Au", 196.966_57, 19.3, 1.0, 1.0)],
            effective_mass_ratio: 1.0,
        }
    }

    pub fn aluminium() -> Self {
        Self {
            species: vec![Species::new("Al", 26.981_538, 2.70, 3.0, 1.0)],
            effective_mass_ratio: 1.0,
        }
    }

    /// Au₀.₆Pd₀.₄ with one free electron per Au atom and two per Pd atom.
    pub fn gold_palladium() -> Self {
        Self {
            species: vec![
                Species::new("Au", 196.966_57, 19.3, 1.0, 0.6),
                Species::new("Pd", 106.42, 12.02, 2.0, 0.4),
            ],
            effective_mass_ratio: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.species.is_empty() {
            return Err(Error::Domain("composition has no species".into()));
        }
        if !(self.effective_mass_ratio >= 1.0) {
            return Err(Error::Domain(format!(
                "effective mass ratio must be >= 1, got {}",
                self.effective_mass_ratio
            )));
        }
        let mut total = 0.0;
        for s in &self.species {
            if !(s.atom_fraction >= 0.0 && s.electrons_per_atom >= 0.0) {
                return Err(Error::Domain(format!("negative count for species {}", s.name)));
            }
            if !(s.mass_density > 0.0) {
                return Err(Error::Domain(format!("zero density for species {}", s.name)));
            }
            if !(s.atomic_mass > 0.0) {
                return Err(Error::Domain(format!("zero atomic mass for species {}", s.name)));
            }
            total += s.atom_fraction;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("atom fractions sum to {total}, expected 1")));
        }
        Ok(())
    }

    /// Free-electron concentration, m⁻³.
    pub fn electron_density(&self) -> Result<f64> {
        self.validate()?;
        Ok(self
            .species
            .iter()
            .map(|s| s.atom_fraction * s.electron_density())
            .sum())
    }
}

/// ω_p = √(e²n/(m*ε₀)) from the free-electron density of `comp`.
pub fn plasma_from_composition(comp: &MaterialComposition) -> Result<f64> {
    let n = comp.electron_density()?;
    if n <= 0.0 {
        return Err(Error::Domain("composition yields no free electrons".into()));
    }
    let m_eff = comp.effective_mass_ratio * M_E;
    Ok((E_CHARGE * E_CHARGE * n / (m_eff * EPS_0)).sqrt())
}
