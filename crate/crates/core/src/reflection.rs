//! Reflection factors G₁ (TE) and G₂ (TM) of a wall made of a top layer of
//! thickness h on a semi-infinite substrate, at imaginary frequency ζ and
//! dimensionless wave-vector parameter p ≥ 1.
//!
//! The force only needs G⁻², so the code works with r = 1/G, which stays in
//! [-1, 1] and is finite when ε = 1. The layered expressions are divided
//! through by e^{ζs₁h/c} so that only q = e^{-2ζs₁h/c} ∈ (0, 1] appears.

use crate::constants::C;
use crate::dielectric::DielectricModel;
use crate::error::{Error, Result};

/// Top layer of thickness `thickness` (m) over a semi-infinite substrate.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    top: DielectricModel,
    thickness: f64,
    substrate: DielectricModel,
}

impl LayerStack {
    pub fn halfspace(model: DielectricModel) -> Self {
        Self {
            top: model.clone(),
            thickness: 0.0,
            substrate: model,
        }
    }

    pub fn coated(top: DielectricModel, thickness: f64, substrate: DielectricModel) -> Result<Self> {
        if !(thickness >= 0.0 && thickness.is_finite()) {
            return Err(Error::Domain(format!("layer thickness must be >= 0, got {thickness}")));
        }
        Ok(Self {
            top,
            thickness,
            substrate,
        })
    }

    pub fn top(&self) -> &DielectricModel {
        &self.top
    }

    pub fn substrate(&self) -> &DielectricModel {
        &self.substrate
    }

    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    /// Evaluates the permittivities once for frequency `zeta`; the returned
    /// response is then cheap to query at many `p`.
    pub fn at_frequency(&self, zeta: f64) -> Result<WallResponse> {
        if !(zeta > 0.0) || !zeta.is_finite() {
            return Err(Error::Domain(format!("imaginary frequency must be > 0, got {zeta}")));
        }
        let h = self.thickness;
        if h > 0.0 && self.top.is_ideal() {
            return Ok(WallResponse::Ideal);
        }
        if h == 0.0 {
            return halfspace_response(&self.substrate, zeta);
        }
        let eps1 = self.top.eps_imag_axis(zeta)?;
        if eps1.is_infinite() {
            return Ok(WallResponse::Ideal);
        }
        let phase = 2.0 * zeta * h / C;
        if self.substrate.is_ideal() {
            return Ok(WallResponse::OverIdeal { eps1, phase });
        }
        let eps2 = self.substrate.eps_imag_axis(zeta)?;
        if eps2.is_infinite() {
            return Ok(WallResponse::OverIdeal { eps1, phase });
        }
        if eps1 == eps2 {
            return Ok(WallResponse::Halfspace { eps: eps2 });
        }
        Ok(WallResponse::Layered { eps1, eps2, phase })
    }
}

fn halfspace_response(model: &DielectricModel, zeta: f64) -> Result<WallResponse> {
    Ok(match model {
        DielectricModel::Ideal => WallResponse::Ideal,
        m => match m.eps_imag_axis(zeta)? {
            eps if eps.is_infinite() => WallResponse::Ideal,
            eps => WallResponse::Halfspace { eps },
        },
    })
}

/// G₁ and G₂ at one (p, ζ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GFactors {
    pub g1: f64,
    pub g2: f64,
}

impl GFactors {
    /// G₁⁻² and G₂⁻².
    pub fn inverse_squares(&self) -> (f64, f64) {
        (1.0 / (self.g1 * self.g1), 1.0 / (self.g2 * self.g2))
    }
}

/// Wall permittivities frozen at one imaginary frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WallResponse {
    Ideal,
    Halfspace {
        eps: f64,
    },
    /// `phase` is 2ζh/c, so q = exp(-phase·s₁).
    Layered {
        eps1: f64,
        eps2: f64,
        phase: f64,
    },
    /// Finite top layer over a perfect conductor.
    OverIdeal {
        eps1: f64,
        phase: f64,
    },
}

impl WallResponse {
    /// (1/G₁, 1/G₂), each in [-1, 1].
    #[inline]
    pub fn reflection(&self, p: f64) -> (f64, f64) {
        match *self {
            Self::Ideal => (-1.0, 1.0),
            Self::Halfspace { eps } => {
                let em1 = eps - 1.0;
                let s = (em1 + p * p).sqrt();
                let te = -em1 / ((p + s) * (p + s));
                let tm = em1 * ((eps + 1.0) * p * p - 1.0) / ((eps * p + s) * (eps * p + s));
                (te, tm)
            }
            Self::Layered { eps1, eps2, phase } => {
                let p2 = p * p;
                let s1 = (eps1 - 1.0 + p2).sqrt();
                let s2 = (eps2 - 1.0 + p2).sqrt();
                let q = (-phase * s1).exp();

                let p_minus_s1 = -(eps1 - 1.0) / (p + s1);
                let s1_minus_s2 = (eps1 - eps2) / (s1 + s2);
                let te_num = (s1 + s2) * p_minus_s1 + s1_minus_s2 * (p + s1) * q;
                let te_den = (s1 + s2) * (p + s1) + s1_minus_s2 * p_minus_s1 * q;

                let a = eps2 * s1 + eps1 * s2;
                let b = (eps2 - eps1) * (eps1 * eps2 + (p2 - 1.0) * (eps1 + eps2)) / a;
                let c = eps1 * p + s1;
                let d = (eps1 - 1.0) * ((eps1 + 1.0) * p2 - 1.0) / c;
                let tm_num = a * d + b * c * q;
                let tm_den = a * c + b * d * q;
                (te_num / te_den, tm_num / tm_den)
            }
            Self::OverIdeal { eps1, phase } => {
                let p2 = p * p;
                let s1 = (eps1 - 1.0 + p2).sqrt();
                let q = (-phase * s1).exp();
                let p_minus_s1 = -(eps1 - 1.0) / (p + s1);
                let te = (p_minus_s1 - (p + s1) * q) / ((p + s1) - p_minus_s1 * q);
                let c = eps1 * p + s1;
                let d = (eps1 - 1.0) * ((eps1 + 1.0) * p2 - 1.0) / c;
                let tm = (d + c * q) / (c + d * q);
                (te, tm)
            }
        }
    }

    pub fn g_factors(&self, p: f64) -> GFactors {
        let (r1, r2) = self.reflection(p);
        GFactors {
            g1: 1.0 / r1,
            g2: 1.0 / r2,
        }
    }
}

/// G-factors of `stack` at (p, ζ).
pub fn g_factors(stack: &LayerStack, p: f64, zeta: f64) -> Result<GFactors> {
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("p must be >= 1, got {p}")));
    }
    Ok(stack.at_frequency(zeta)?.g_factors(p))
}
