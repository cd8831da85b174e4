//! Scenario orchestration, measurement ingestion, residual forces and the
//! raw-data corrections applied to published force series.

mod measurement;
mod optics;
mod scenario;

pub use measurement::{
    compose_raw, decompose_raw, load_measurements, load_raw_record, parse_measurements, residual, rlm_repair,
    Electrostatic, MeasurementFormat, MeasurementPoint, MeasurementSeries, RawForceRecord, REPAIR_LABEL,
};
pub use optics::{load_optics, parse_optics};
pub use scenario::{
    limit_material, upper_limit_curve, CurvePoint, ForceCurve, GeometrySpec, GridSpec, MaterialSpec, Mode,
    RoughnessSpec, Scenario, ScenarioConfig, ScenarioGeometry, Spacing, WallSpec, SCHEMA_VERSION,
};
