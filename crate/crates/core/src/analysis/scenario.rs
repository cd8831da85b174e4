use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::measurement::{MeasurementPoint, MeasurementSeries};
use super::optics::load_optics;
use crate::constants::{MICRO_OHM_CM, NM};
use crate::corrections::{RoughnessLevel, RoughnessProfile};
use crate::dielectric::{DielectricModel, DrudeParams};
use crate::error::{Error, Result};
use crate::force::{lifshitz_force, lifshitz_force_zero_t, Geometry};
use crate::kk::TabulatedDielectric;
use crate::reflection::LayerStack;

pub const SCHEMA_VERSION: u32 = 1;

const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Single-crystal limit parameters (ω_p in rad/s, ρ₀ in Ω·m) of the metals
/// known to upper-limit scenarios.
pub fn limit_material(name: &str) -> Option<(f64, f64)> {
    match name {
        "Au" => Some((1.37e16, 2.25 * MICRO_OHM_CM)),
        "Al" => Some((2.40e16, 2.65 * MICRO_OHM_CM)),
        "AuPd" => Some((1.69e16, 30.0 * MICRO_OHM_CM)),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioGeometry {
    SpherePlate,
    PlatePlate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub kind: ScenarioGeometry,
    #[serde(rename = "R_m", default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallSpec {
    pub substrate: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top: Option<String>,
    #[serde(default)]
    pub thickness_m: f64,
}

/// Material parameters. Exactly one of: `omega_p` with `rho0` (Ω·m) or
/// `rho0_uOhm_cm`; `omega_p` with `omega_tau` (0 selects the plasma model);
/// or `optics`, a tabulated optical CSV.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    #[serde(rename = "rho0_uOhm_cm")]
    pub rho0_micro_ohm_cm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optics: Option<PathBuf>,
}

impl MaterialSpec {
    fn resolve(&self, name: &str, base: Option<&Path>) -> Result<DielectricModel> {
        let bad = |msg: &str| Error::Config(format!("material '{name}': {msg}"));
        match (
            self.omega_p,
            self.rho0,
            self.rho0_micro_ohm_cm,
            self.omega_tau,
            &self.optics,
        ) {
            (None, None, None, None, Some(path)) => {
                let path = match base {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path.clone(),
                };
                let table = TabulatedDielectric::new(load_optics(&path)?)?;
                Ok(DielectricModel::Tabulated(Arc::new(table)))
            }
            (Some(wp), Some(rho), None, None, None) => {
                Ok(DielectricModel::Drude(DrudeParams::from_resistivity(wp, rho)?))
            }
            (Some(wp), None, Some(rho), None, None) => Ok(DielectricModel::Drude(DrudeParams::from_resistivity(
                wp,
                rho * MICRO_OHM_CM,
            )?)),
            (Some(wp), None, None, Some(wt), None) => match wt {
                0.0 => DielectricModel::plasma(wp),
                _ => DielectricModel::drude(wp, wt),
            },
            _ => Err(bad(
                "give omega_p with one of rho0 | rho0_uOhm_cm | omega_tau, or optics alone",
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineRoughness {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub levels: Vec<InlineLevel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineLevel {
    pub height_m: f64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RoughnessSpec {
    Preset(String),
    Inline(InlineRoughness),
}

impl Default for RoughnessSpec {
    fn default() -> Self {
        Self::Preset("none".into())
    }
}

impl RoughnessSpec {
    fn resolve(&self) -> Result<RoughnessProfile> {
        match self {
            Self::Preset(name) => RoughnessProfile::preset(name)
                .ok_or_else(|| Error::Config(format!("unknown roughness preset '{name}'"))),
            Self::Inline(r) => RoughnessProfile::new(
                r.name.as_deref().unwrap_or("inline"),
                r.levels
                    .iter()
                    .map(|l| RoughnessLevel {
                        height: l.height_m,
                        probability: l.probability,
                    })
                    .collect(),
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Metals named Au, Al and AuPd take their single-crystal limit values.
    UpperLimit,
    /// Materials come from the `materials` table as given.
    Custom,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub a_min_m: f64,
    pub a_max_m: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn separations(&self) -> Result<Vec<f64>> {
        let (lo, hi, n) = (self.a_min_m, self.a_max_m, self.points);
        if !(lo > 0.0 && hi.is_finite() && (hi > lo || (hi == lo && n == 1))) || n == 0 {
            return Err(Error::Config(format!(
                "invalid separation grid [{lo}, {hi}] with {n} points"
            )));
        }
        if n == 1 {
            return Ok(vec![lo]);
        }
        let t = |i: usize| i as f64 / (n - 1) as f64;
        Ok(match self.spacing {
            Spacing::Linear => (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * t(i) })
                .collect(),
            Spacing::Log => (0..n)
                .map(|i| if i == n - 1 { hi } else { lo * (hi / lo).powf(t(i)) })
                .collect(),
        })
    }
}

/// Versioned scenario description, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub geometry: GeometrySpec,
    #[serde(rename = "T_K")]
    pub temperature: f64,
    pub wall: WallSpec,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub materials: BTreeMap<String, MaterialSpec>,
    #[serde(default)]
    pub roughness: RoughnessSpec,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        if cfg.version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported scenario version {} (this build reads version {SCHEMA_VERSION})",
                cfg.version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Torsion-pendulum experiment: Au-coated lens R = 12.5 cm against a plate.
    pub fn torsion_pendulum() -> Self {
        Self {
            version: SCHEMA_VERSION,
            name: Some("tp-lamoreaux".into()),
            description: Some("torsion pendulum, Au lens R = 12.5 cm; most sensitive range 0.6-3 um".into()),
            geometry: GeometrySpec {
                kind: ScenarioGeometry::SpherePlate,
                radius: Some(0.125),
            },
            temperature: 300.0,
            wall: WallSpec {
                substrate: "Au".into(),
                top: None,
                thickness_m: 0.0,
            },
            materials: BTreeMap::new(),
            roughness: RoughnessSpec::Preset("none".into()),
            mode: Mode::UpperLimit,
            grid: Some(GridSpec {
                a_min_m: 6e-7,
                a_max_m: 6e-6,
                points: 55,
                spacing: Spacing::Linear,
            }),
            tolerance: None,
        }
    }

    /// 1998 AFM experiment: AuPd (15 nm) over Al, sphere radius assumed 100 µm.
    pub fn afm_mr() -> Self {
        Self {
            name: Some("afm-mr".into()),
            description: Some("AFM, AuPd 15 nm over Al, R = 100 um (assumed)".into()),
            geometry: GeometrySpec {
                kind: ScenarioGeometry::SpherePlate,
                radius: Some(1e-4),
            },
            wall: WallSpec {
                substrate: "Al".into(),
                top: Some("AuPd".into()),
                thickness_m: 15e-9,
            },
            roughness: RoughnessSpec::Preset("afm-mr-1998".into()),
            grid: Some(GridSpec {
                a_min_m: 1.2e-7,
                a_max_m: 9e-7,
                points: 40,
                spacing: Spacing::Linear,
            }),
            ..Self::torsion_pendulum()
        }
    }

    /// Improved AFM experiment: AuPd (8 nm) over Al with reduced roughness.
    pub fn afm_rlm() -> Self {
        let mut cfg = Self::afm_mr();
        cfg.name = Some("afm-rlm".into());
        cfg.description = Some("AFM, AuPd 8 nm over Al, R = 100 um (assumed)".into());
        cfg.wall.thickness_m = 8e-9;
        cfg.roughness = RoughnessSpec::Preset("afm-rlm-1999".into());
        cfg.grid = Some(GridSpec {
            a_min_m: 1e-7,
            a_max_m: 9e-7,
            points: 41,
            spacing: Spacing::Linear,
        });
        cfg
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "tp-lamoreaux" => Some(Self::torsion_pendulum()),
            "afm-mr" => Some(Self::afm_mr()),
            "afm-rlm" => Some(Self::afm_rlm()),
            _ => None,
        }
    }

    pub const PRESETS: [&'static str; 3] = ["tp-lamoreaux", "afm-mr", "afm-rlm"];

    fn material(&self, name: &str, base: Option<&Path>, notes: &mut Vec<String>) -> Result<DielectricModel> {
        if name == "ideal" {
            return Ok(DielectricModel::Ideal);
        }
        let given = self.materials.get(name);
        match (self.mode, limit_material(name)) {
            (Mode::UpperLimit, Some((wp, rho))) => {
                if given.is_some() {
                    notes.push(format!("upper-limit mode: '{name}' parameters replaced by the single-crystal limit"));
                }
                Ok(DielectricModel::Drude(DrudeParams::from_resistivity(wp, rho)?))
            }
            (Mode::UpperLimit, None) => Err(Error::Config(format!(
                "upper-limit mode has no limit parameters for '{name}' (known: Au, Al, AuPd, ideal); use mode \"custom\""
            ))),
            (Mode::Custom, _) => given
                .ok_or_else(|| Error::Config(format!("material '{name}' is not defined in 'materials'")))?
                .resolve(name, base),
        }
    }

    /// Validates the configuration and builds the wall, geometry and
    /// roughness it describes. Relative optics paths resolve against `base`.
    pub fn resolve(&self, base: Option<&Path>) -> Result<Scenario> {
        let mut notes = Vec::new();
        let radius = match (self.geometry.kind, self.geometry.radius) {
            (ScenarioGeometry::SpherePlate, Some(r)) if r > 0.0 && r.is_finite() => Some(r),
            (ScenarioGeometry::SpherePlate, r) => {
                return Err(Error::Config(format!("sphere-plate geometry needs R_m > 0, got {r:?}")))
            }
            (ScenarioGeometry::PlatePlate, None) => None,
            (ScenarioGeometry::PlatePlate, Some(_)) => {
                return Err(Error::Config("plate-plate geometry takes no R_m".into()))
            }
        };
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(Error::Config(format!("T_K must be >= 0, got {}", self.temperature)));
        }
        let tolerance = self.tolerance.unwrap_or(DEFAULT_TOLERANCE);
        if !(tolerance > 0.0 && tolerance < 1.0) {
            return Err(Error::Config(format!("tolerance must lie in (0, 1), got {tolerance}")));
        }
        let substrate = self.material(&self.wall.substrate, base, &mut notes)?;
        let wall = match &self.wall.top {
            Some(top) => {
                if !(self.wall.thickness_m > 0.0) {
                    return Err(Error::Config(format!(
                        "top layer '{top}' needs thickness_m > 0, got {}",
                        self.wall.thickness_m
                    )));
                }
                let top = self.material(top, base, &mut notes)?;
                LayerStack::coated(top, self.wall.thickness_m, substrate)?
            }
            None if self.wall.thickness_m != 0.0 => {
                return Err(Error::Config("thickness_m given without a top layer".into()))
            }
            None => LayerStack::halfspace(substrate),
        };
        let roughness = self.roughness.resolve()?;
        if roughness.centering_offset() != 0.0 {
            notes.push(format!(
                "roughness '{}': heights centered by {:.3} nm",
                roughness.name,
                roughness.centering_offset() / NM
            ));
        }
        notes.extend(roughness.warnings());
        for name in self.materials.keys() {
            if *name != self.wall.substrate && self.wall.top.as_deref() != Some(name.as_str()) {
                notes.push(format!("material '{name}' is defined but not used by the wall"));
            }
        }
        Ok(Scenario {
            name: self.name.clone().unwrap_or_else(|| "scenario".into()),
            wall,
            radius,
            temperature: self.temperature,
            roughness,
            tolerance,
            grid: self.grid.as_ref().map(GridSpec::separations).transpose()?,
            notes,
        })
    }
}

/// A resolved scenario, ready to evaluate.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub wall: LayerStack,
    /// Sphere radius; `None` for plate–plate (pressure output).
    pub radius: Option<f64>,
    /// 0 selects the zero-temperature integral.
    pub temperature: f64,
    pub roughness: RoughnessProfile,
    pub tolerance: f64,
    pub grid: Option<Vec<f64>>,
    /// Non-fatal remarks gathered while resolving.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub separation: f64,
    pub force: f64,
    pub error: f64,
    pub classical_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForceCurve {
    pub points: Vec<CurvePoint>,
    pub warnings: Vec<String>,
}

impl ForceCurve {
    pub const CSV_HEADER: [&'static str; 4] = ["a_m", "force_N", "err_N", "classical_share"];

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(Self::CSV_HEADER).map_err(io)?;
        for p in &self.points {
            w.write_record([
                format!("{:e}", p.separation),
                format!("{:e}", p.force),
                format!("{:e}", p.error),
                format!("{:.6e}", p.classical_share),
            ])
            .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_series(&self, provenance: impl Into<String>) -> Result<MeasurementSeries> {
        MeasurementSeries::new(
            self.points
                .iter()
                .map(|p| MeasurementPoint {
                    separation: p.separation,
                    force: p.force,
                    error: Some(p.error),
                })
                .collect(),
            provenance,
        )
    }
}

impl Scenario {
    fn geometry(&self, a: f64) -> Result<Geometry> {
        match self.radius {
            Some(r) => Geometry::sphere_plate(a, r),
            None => Geometry::plate_plate(a),
        }
    }

    fn bare(&self, a: f64) -> Result<(crate::force::ForceResult, Vec<String>)> {
        let g = self.geometry(a)?;
        let r = if self.temperature > 0.0 {
            lifshitz_force(&self.wall, &g, self.temperature, self.tolerance)?
        } else {
            lifshitz_force_zero_t(&self.wall, &g, self.tolerance)?
        };
        let warnings = r.warnings.clone();
        Ok((r, warnings))
    }

    /// Force (or pressure) at mean separation `a`, averaged over roughness.
    pub fn point(&self, a: f64) -> Result<(CurvePoint, Vec<String>)> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!("separation must be > 0, got {a}")));
        }
        let pairs = self.roughness.local_separations(a);
        if let Some(bad) = pairs.iter().find(|p| p.separation <= 0.0) {
            return Err(Error::SurfacesInContact {
                separation: bad.separation,
                i: bad.i,
                j: bad.j,
            });
        }
        let (mut force, mut error, mut classical) = (0.0, 0.0, 0.0);
        let mut warnings = Vec::new();
        // (i, j) and (j, i) share a separation
        let mut cache: Vec<(f64, crate::force::ForceResult)> = Vec::new();
        for p in pairs.iter().filter(|p| p.weight > 0.0) {
            let r = match cache.iter().find(|(s, _)| *s == p.separation) {
                Some((_, r)) => r.clone(),
                None => {
                    let (r, w) = self.bare(p.separation)?;
                    for m in w {
                        if !warnings.contains(&m) {
                            warnings.push(m);
                        }
                    }
                    cache.push((p.separation, r.clone()));
                    r
                }
            };
            force += p.weight * r.value;
            error += p.weight * r.error;
            classical += p.weight * r.value * r.classical_share;
        }
        Ok((
            CurvePoint {
                separation: a,
                force,
                error,
                classical_share: classical / force,
            },
            warnings,
        ))
    }

    /// Evaluates every separation concurrently; output order follows input.
    pub fn curve(&self, separations: &[f64]) -> Result<ForceCurve> {
        let results: Vec<(CurvePoint, Vec<String>)> =
            separations.par_iter().map(|&a| self.point(a)).collect::<Result<_>>()?;
        let mut warnings = self.notes.clone();
        let mut points = Vec::with_capacity(results.len());
        for (p, w) in results {
            for m in w {
                if !warnings.contains(&m) {
                    warnings.push(m);
                }
            }
            points.push(p);
        }
        Ok(ForceCurve { points, warnings })
    }

    /// Re-evaluates the scenario on the grid of `series`.
    pub fn on_grid_of(&self, series: &MeasurementSeries) -> Result<ForceCurve> {
        self.curve(&series.separations())
    }
}

/// Upper-limit force on the configuration's own separation grid.
pub fn upper_limit_curve(config: &ScenarioConfig) -> Result<ForceCurve> {
    if config.mode != Mode::UpperLimit {
        return Err(Error::Config("upper_limit_curve needs mode \"upper-limit\"".into()));
    }
    let scenario = config.resolve(None)?;
    let grid = scenario
        .grid
        .as_ref()
        .ok_or_else(|| Error::Config("scenario has no separation grid".into()))?;
    scenario.curve(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn limit_damping_from_resistivity() {
        let (wp, rho) = limit_material("Au").unwrap();
        let d = DrudeParams::from_resistivity(wp, rho).unwrap();
        assert!((d.omega_tau / 3.74e13 - 1.0).abs() < 2e-3);
        assert!(limit_material("Cu").is_none());
    }

    #[test]
    fn presets_round_trip_through_json() {
        for name in ScenarioConfig::PRESETS {
            let cfg = ScenarioConfig::preset(name).unwrap();
            let back = ScenarioConfig::from_json(&cfg.to_json().unwrap()).unwrap();
            assert_eq!(back, cfg);
            let s = cfg.resolve(None).unwrap();
            assert!(s.grid.is_some());
        }
        assert!(ScenarioConfig::preset("nope").is_none());
    }

    #[test]
    fn unknown_keys_are_errors() {
        let mut v: serde_json::Value = serde_json::from_str(&ScenarioConfig::afm_mr().to_json().unwrap()).unwrap();
        v["colour"] = "blue".into();
        assert!(matches!(ScenarioConfig::from_json(&v.to_string()), Err(Error::Json(_))));
        let mut v: serde_json::Value = serde_json::from_str(&ScenarioConfig::afm_mr().to_json().unwrap()).unwrap();
        v["wall"]["thikness_m"] = 1e-9.into();
        assert!(ScenarioConfig::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn version_is_checked() {
        let mut cfg = ScenarioConfig::afm_mr();
        cfg.version = 2;
        assert!(matches!(
            ScenarioConfig::from_json(&cfg.to_json().unwrap()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn parses_documented_schema() {
        let text = r#"{
            "version": 1,
            "geometry": {"kind": "sphere-plate", "R_m": 1e-4},
            "T_K": 300,
            "wall": {"substrate": "Al", "top": "AuPd", "thickness_m": 1.5e-8},
            "materials": {
                "Al": {"omega_p": 2.2e16, "rho0": 2.9e-8},
                "AuPd": {"omega_p": 1.6e16, "omega_tau": 8e14}
            },
            "roughness": {"levels": [{"height_m": 1e-8, "probability": 0.5}, {"height_m": 0, "probability": 0.5}]},
            "mode": "custom"
        }"#;
        let cfg = ScenarioConfig::from_json(text).unwrap();
        let s = cfg.resolve(None).unwrap();
        match s.wall.substrate() {
            DielectricModel::Drude(p) => assert_relative_eq!(p.resistivity(), 2.9e-8, max_relative = 1e-12),
            m => panic!("{m:?}"),
        }
        assert_eq!(s.wall.thickness(), 1.5e-8);
        assert_relative_eq!(s.roughness.centering_offset(), 5e-9);
        assert!(s.grid.is_none());
    }

    #[test]
    fn upper_limit_mode_forces_limit_values() {
        let mut cfg = ScenarioConfig::afm_mr();
        cfg.materials.insert(
            "Al".into(),
            MaterialSpec {
                omega_p: Some(1e16),
                omega_tau: Some(1e14),
                ..Default::default()
            },
        );
        let s = cfg.resolve(None).unwrap();
        match s.wall.substrate() {
            DielectricModel::Drude(p) => assert_eq!(p.omega_p, 2.40e16),
            m => panic!("{m:?}"),
        }
        assert!(s.notes.iter().any(|n| n.contains("single-crystal")));
        cfg.wall.substrate = "Cu".into();
        assert!(matches!(cfg.resolve(None), Err(Error::Config(_))));
    }

    #[test]
    fn material_spec_forms() {
        let m = |s: &str| serde_json::from_str::<MaterialSpec>(s).unwrap().resolve("x", None);
        assert!(matches!(
            m(r#"{"omega_p": 1e16, "omega_tau": 0}"#).unwrap(),
            DielectricModel::Plasma { .. }
        ));
        match m(r#"{"omega_p": 1.37e16, "rho0_uOhm_cm": 2.25}"#).unwrap() {
            DielectricModel::Drude(p) => assert_relative_eq!(p.resistivity(), 2.25e-8, max_relative = 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(m(r#"{"omega_p": 1e16}"#).is_err());
        assert!(m(r#"{"omega_p": 1e16, "rho0": 1e-8, "omega_tau": 1e13}"#).is_err());
        assert!(serde_json::from_str::<MaterialSpec>(r#"{"omega_p": 1e16, "gamma": 1}"#).is_err());
    }

    #[test]
    fn custom_mode_needs_definitions() {
        let mut cfg = ScenarioConfig::torsion_pendulum();
        cfg.mode = Mode::Custom;
        assert!(matches!(cfg.resolve(None), Err(Error::Config(_))));
        cfg.wall.substrate = "ideal".into();
        assert!(cfg.resolve(None).unwrap().wall.substrate().is_ideal());
    }

    #[test]
    fn geometry_and_wall_validation() {
        let mut cfg = ScenarioConfig::torsion_pendulum();
        cfg.geometry.radius = None;
        assert!(cfg.resolve(None).is_err());
        cfg.geometry.kind = ScenarioGeometry::PlatePlate;
        assert!(cfg.resolve(None).unwrap().radius.is_none());
        let mut cfg = ScenarioConfig::afm_mr();
        cfg.wall.thickness_m = 0.0;
        assert!(cfg.resolve(None).is_err());
        let mut cfg = ScenarioConfig::torsion_pendulum();
        cfg.temperature = -1.0;
        assert!(cfg.resolve(None).is_err());
    }

    #[test]
    fn grid_spacing() {
        let g = GridSpec {
            a_min_m: 1e-7,
            a_max_m: 3e-6,
            points: 60,
            spacing: Spacing::Linear,
        };
        let s = g.separations().unwrap();
        assert_eq!((s.len(), s[0], s[59]), (60, 1e-7, 3e-6));
        let g = GridSpec {
            spacing: Spacing::Log,
            points: 3,
            a_max_m: 1e-5,
            ..g
        };
        let s = g.separations().unwrap();
        assert_relative_eq!(s[1], 1e-6, max_relative = 1e-12);
        assert!(GridSpec {
            a_min_m: 1e-6,
            a_max_m: 1e-7,
            points: 3,
            spacing: Spacing::Linear
        }
        .separations()
        .is_err());
    }

    #[test]
    fn smooth_ideal_scenario_matches_closed_form_at_zero_temperature() {
        let mut cfg = ScenarioConfig::torsion_pendulum();
        cfg.mode = Mode::Custom;
        cfg.wall.substrate = "ideal".into();
        cfg.temperature = 0.0;
        let s = cfg.resolve(None).unwrap();
        let c = s.curve(&[1e-6, 2e-6]).unwrap();
        for p in &c.points {
            let exact = crate::force::ideal_sphere_plate(p.separation, 0.125);
            assert_relative_eq!(p.force, exact, max_relative = 1e-5);
        }
    }

    #[test]
    fn roughness_contact_is_reported() {
        let s = ScenarioConfig::afm_mr().resolve(None).unwrap();
        assert!(matches!(s.point(50.0 * NM), Err(Error::SurfacesInContact { .. })));
    }
}
