use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::constants::EPS_0;
use crate::error::{Error, Result};

/// One measured (or computed) force value at absolute separation `separation`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementPoint {
    pub separation: f64,
    pub force: f64,
    pub error: Option<f64>,
}

/// Force values on a strictly increasing separation grid.
///
/// Separation shifts are accumulated separately from the stored grid so that
/// repeated shifts by the same amount compose without extra rounding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementSeries {
    points: Vec<MeasurementPoint>,
    shift: f64,
    provenance: String,
}

impl MeasurementSeries {
    pub fn new(points: Vec<MeasurementPoint>, provenance: impl Into<String>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if !p.separation.is_finite() || !p.force.is_finite() {
                return Err(Error::Domain(format!("point {i}: non-finite value")));
            }
            if let Some(e) = p.error {
                if !(e >= 0.0 && e.is_finite()) {
                    return Err(Error::Domain(format!(
                        "point {i}: error must be finite and >= 0, got {e}"
                    )));
                }
            }
        }
        if let Some(i) = points.windows(2).position(|w| w[1].separation <= w[0].separation) {
            return Err(Error::Domain(format!(
                "separations must be strictly increasing; point {} ({}) follows {}",
                i + 1,
                points[i + 1].separation,
                points[i].separation
            )));
        }
        Ok(Self {
            points,
            shift: 0.0,
            provenance: provenance.into(),
        })
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points with any accumulated separation shift applied.
    pub fn points(&self) -> impl Iterator<Item = MeasurementPoint> + '_ {
        self.points.iter().map(|p| MeasurementPoint {
            separation: p.separation + self.shift,
            ..*p
        })
    }

    pub fn separations(&self) -> Vec<f64> {
        self.points().map(|p| p.separation).collect()
    }

    pub fn forces(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.force).collect()
    }

    /// Writes `a_m,<force_column>,err_N`; missing errors are left empty.
    pub fn write_csv<W: Write>(&self, out: W, force_column: &str) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["a_m", force_column, "err_N"]).map_err(csv_io)?;
        for p in self.points() {
            let err = p.error.map(|e| format!("{e:e}")).unwrap_or_default();
            w.write_record([format!("{:e}", p.separation), format!("{:e}", p.force), err])
                .map_err(csv_io)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Column units of a measurement table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementFormat {
    /// Detect from the header.
    Auto,
    /// `a_nm,F_pN[,err_pN]`
    NanometrePiconewton,
    /// `a_m,F_N[,err_N]`; `force_N` is accepted for `F_N`.
    Si,
}

pub fn load_measurements(path: &Path, format: MeasurementFormat) -> Result<MeasurementSeries> {
    let file = std::fs::File::open(path)?;
    parse_measurements(file, path, format)
}

pub fn parse_measurements<R: Read>(reader: R, path: &Path, format: MeasurementFormat) -> Result<MeasurementSeries> {
    let parse_err = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let header_line = header.position().map_or(1, |p| p.line());

    let find = |names: &[&str]| header.iter().position(|h| names.contains(&h));
    let nm = find(&["a_nm"]).is_some();
    let format = match format {
        MeasurementFormat::Auto if nm => MeasurementFormat::NanometrePiconewton,
        MeasurementFormat::Auto => MeasurementFormat::Si,
        f => f,
    };
    // divide by units-per-SI so that 120 nm maps to the correctly rounded 1.2e-7
    let (a_names, f_names, e_names, a_per_m, f_per_n): (&[&str], &[&str], &[&str], f64, f64) = match format {
        MeasurementFormat::NanometrePiconewton => (&["a_nm"], &["F_pN"], &["err_pN"], 1e9, 1e12),
        _ => (&["a_m"], &["F_N", "force_N"], &["err_N"], 1.0, 1.0),
    };
    let (Some(ia), Some(iforce)) = (find(a_names), find(f_names)) else {
        return Err(parse_err(
            header_line,
            format!(
                "expected columns {} and {}, got {}",
                a_names[0],
                f_names.join("|"),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    };
    let ierr = find(e_names);
    const IGNORED: &[&str] = &["classical_share"];
    if let Some(extra) = header
        .iter()
        .enumerate()
        .find(|(k, h)| ![Some(ia), Some(iforce), ierr].contains(&Some(*k)) && !IGNORED.contains(h))
    {
        return Err(parse_err(header_line, format!("unknown column '{}'", extra.1)));
    }

    let mut points = Vec::new();
    let mut prev: Option<f64> = None;
    for record in rdr.records() {
        let record = record.map_err(|e| parse_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let value = |k: usize| -> Result<f64> {
            let v: f64 = record[k]
                .parse()
                .map_err(|e| parse_err(line, format!("column {}: {e}", &header[k])))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("column {}: non-finite value", &header[k])));
            }
            Ok(v)
        };
        let a = value(ia)? / a_per_m;
        let force = value(iforce)? / f_per_n;
        let error = match ierr {
            Some(k) if !record[k].is_empty() => {
                let e = value(k)? / f_per_n;
                if e < 0.0 {
                    return Err(parse_err(line, format!("negative error {e}")));
                }
                Some(e)
            }
            _ => None,
        };
        if !(a > 0.0) {
            return Err(parse_err(line, format!("separation must be > 0, got {a:e} m")));
        }
        if let Some(p) = prev {
            if a <= p {
                return Err(parse_err(
                    line,
                    format!("separations not strictly increasing ({a:e} m after {p:e} m)"),
                ));
            }
        }
        prev = Some(a);
        points.push(MeasurementPoint {
            separation: a,
            force,
            error,
        });
    }
    if points.is_empty() {
        return Err(parse_err(header_line, "no data rows".into()));
    }
    MeasurementSeries::new(points, path.display().to_string())
}

/// Relative tolerance for two grids to count as the same.
const GRID_TOLERANCE: f64 = 1e-9;

/// ΔF(aᵢ) = F_measured(aᵢ) − F_limit(aᵢ). The limit must already be
/// evaluated on the measured grid; errors add in quadrature.
pub fn residual(measured: &MeasurementSeries, limit: &MeasurementSeries) -> Result<MeasurementSeries> {
    if measured.len() != limit.len() {
        return Err(Error::GridMismatch(format!(
            "{} measured points vs {} limit points",
            measured.len(),
            limit.len()
        )));
    }
    let mut out = Vec::with_capacity(measured.len());
    for (i, (m, l)) in measured.points().zip(limit.points()).enumerate() {
        if (m.separation - l.separation).abs() > GRID_TOLERANCE * m.separation.abs() {
            return Err(Error::GridMismatch(format!(
                "point {i}: measured at {} m, limit at {} m",
                m.separation, l.separation
            )));
        }
        let error = match (m.error, l.error) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(0.0).hypot(b.unwrap_or(0.0))),
        };
        out.push(MeasurementPoint {
            separation: m.separation,
            force: m.force - l.force,
            error,
        });
    }
    MeasurementSeries::new(
        out,
        format!("residual({} - {})", measured.provenance(), limit.provenance()),
    )
}

pub const REPAIR_LABEL: &str = "repaired(+2h)";

/// Undoes the +2h argument shift of a force extracted with the layer
/// thickness ignored: every separation moves by +2h, forces are unchanged.
pub fn rlm_repair(series: &MeasurementSeries, h: f64) -> Result<MeasurementSeries> {
    if !(h >= 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("layer thickness must be >= 0, got {h}")));
    }
    let mut out = series.clone();
    out.shift += 2.0 * h;
    out.provenance = format!("{}; {REPAIR_LABEL} h={h:e} m", series.provenance);
    Ok(out)
}

/// Electrostatic force model subtracted from raw data.
#[derive(Debug, Clone, PartialEq)]
pub enum Electrostatic {
    None,
    /// F_e at each grid point, N.
    Tabulated(Vec<f64>),
    /// Sphere–plate capacitor at contact potential V (volts), πε₀RV²/a.
    SphereCapacitor {
        radius: f64,
        potential: f64,
    },
}

impl Electrostatic {
    fn at(&self, i: usize, a: f64) -> f64 {
        match self {
            Self::None => 0.0,
            Self::Tabulated(v) => v[i],
            Self::SphereCapacitor { radius, potential } => {
                std::f64::consts::PI * EPS_0 * radius * potential * potential / a
            }
        }
    }
}

/// Raw cantilever force on the piezo grid a₁ with calibration constants.
#[derive(Debug, Clone, PartialEq)]
pub struct RawForceRecord {
    /// a₁ values, m.
    pub piezo_separation: Vec<f64>,
    /// F_m, N.
    pub raw_force: Vec<f64>,
    pub errors: Option<Vec<f64>>,
    pub electrostatic: Electrostatic,
    /// Light-coupling slope C, N/m.
    pub light_coupling: Option<f64>,
    /// a₀ such that a = a₁ + a₀, m.
    pub offset: Option<f64>,
}

impl RawForceRecord {
    fn validate(&self) -> Result<(f64, f64)> {
        let n = self.piezo_separation.len();
        if self.raw_force.len() != n {
            return Err(Error::GridMismatch(format!(
                "{} separations vs {} raw forces",
                n,
                self.raw_force.len()
            )));
        }
        if let Some(e) = &self.errors {
            if e.len() != n {
                return Err(Error::GridMismatch(format!("{} separations vs {} errors", n, e.len())));
            }
        }
        if let Electrostatic::Tabulated(v) = &self.electrostatic {
            if v.len() != n {
                return Err(Error::GridMismatch(format!(
                    "{} separations vs {} electrostatic values",
                    n,
                    v.len()
                )));
            }
        }
        let c = self
            .light_coupling
            .ok_or_else(|| Error::Config("light-coupling constant C is required".into()))?;
        let a0 = self
            .offset
            .ok_or_else(|| Error::Config("separation offset a0 is required".into()))?;
        Ok((c, a0))
    }
}

/// F_c(a) = F_m − F_e(a) − C·a on the absolute grid a = a₁ + a₀.
pub fn decompose_raw(record: &RawForceRecord) -> Result<MeasurementSeries> {
    let (c, a0) = record.validate()?;
    let points = record
        .piezo_separation
        .iter()
        .zip(&record.raw_force)
        .enumerate()
        .map(|(i, (&a1, &fm))| {
            let a = a1 + a0;
            MeasurementPoint {
                separation: a,
                force: fm - record.electrostatic.at(i, a) - c * a,
                error: record.errors.as_ref().map(|e| e[i]),
            }
        })
        .collect();
    MeasurementSeries::new(points, "decomposed raw force")
}

/// Reads `a1_m,Fm_N[,Fe_N][,err_N]`. A tabulated `Fe_N` column becomes the
/// electrostatic model unless `electrostatic` is given; `C` and `a0` are
/// calibration inputs supplied separately.
pub fn load_raw_record(
    path: &Path,
    electrostatic: Option<Electrostatic>,
    light_coupling: Option<f64>,
    offset: Option<f64>,
) -> Result<RawForceRecord> {
    let parse_err = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_io)?;
    let header = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let header_line = header.position().map_or(1, |p| p.line());
    let find = |name: &str| header.iter().position(|h| h == name);
    let (Some(ia), Some(im)) = (find("a1_m"), find("Fm_N")) else {
        return Err(parse_err(header_line, "expected columns a1_m and Fm_N".into()));
    };
    let (ie, ierr) = (find("Fe_N"), find("err_N"));
    if let Some(h) = header.iter().find(|h| !["a1_m", "Fm_N", "Fe_N", "err_N"].contains(h)) {
        return Err(parse_err(header_line, format!("unknown column '{h}'")));
    }
    if ie.is_some() && electrostatic.is_some() {
        return Err(Error::Config(
            "Fe_N column given together with an electrostatic model".into(),
        ));
    }
    let (mut a1, mut fm, mut fe, mut err) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for record in rdr.records() {
        let record = record.map_err(|e| parse_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let value = |k: usize| -> Result<f64> {
            record[k]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(line, format!("column {}: invalid number '{}'", &header[k], &record[k])))
        };
        a1.push(value(ia)?);
        fm.push(value(im)?);
        if let Some(k) = ie {
            fe.push(value(k)?);
        }
        if let Some(k) = ierr {
            err.push(value(k)?);
        }
    }
    let electrostatic = match (electrostatic, ie) {
        (Some(e), _) => e,
        (None, Some(_)) => Electrostatic::Tabulated(fe),
        (None, None) => Electrostatic::None,
    };
    Ok(RawForceRecord {
        piezo_separation: a1,
        raw_force: fm,
        errors: ierr.map(|_| err),
        electrostatic,
        light_coupling,
        offset,
    })
}

/// Builds the raw record F_m = F_c(a) + F_e(a) + C·a that [`decompose_raw`] inverts.
pub fn compose_raw<F: Fn(f64) -> f64>(
    casimir: F,
    piezo_separation: Vec<f64>,
    offset: f64,
    light_coupling: f64,
    electrostatic: Electrostatic,
) -> RawForceRecord {
    let raw_force = piezo_separation
        .iter()
        .enumerate()
        .map(|(i, &a1)| {
            let a = a1 + offset;
            casimir(a) + electrostatic.at(i, a) + light_coupling * a
        })
        .collect();
    RawForceRecord {
        piezo_separation,
        raw_force,
        errors: None,
        electrostatic,
        light_coupling: Some(light_coupling),
        offset: Some(offset),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn parse(text: &str) -> Result<MeasurementSeries> {
        parse_measurements(text.as_bytes(), Path::new("data.csv"), MeasurementFormat::Auto)
    }

    fn series(a: &[f64], f: &[f64]) -> MeasurementSeries {
        let pts = a
            .iter()
            .zip(f)
            .map(|(&separation, &force)| MeasurementPoint {
                separation,
                force,
                error: Some(1e-12),
            })
            .collect();
        MeasurementSeries::new(pts, "test").unwrap()
    }

    #[test]
    fn nanometre_piconewton_conversion() {
        let s = parse("a_nm,F_pN\n100,450\n").unwrap();
        let p = s.points().next().unwrap();
        assert_eq!(p.separation, 1.0e-7);
        assert_eq!(p.force, 4.50e-10);
        assert_eq!(p.error, None);
    }

    #[test]
    fn si_columns_with_errors() {
        let s = parse("# run 3\na_m,F_N,err_N\n1e-7,4e-10,1e-12\n2e-7,1e-10,\n").unwrap();
        let p: Vec<_> = s.points().collect();
        assert_eq!(p[0].error, Some(1e-12));
        assert_eq!(p[1].error, None);
        let s = parse("a_m,force_N,err_N,classical_share\n1e-7,4e-10,1e-12,0.01\n").unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn unsorted_rows_name_first_offending_line() {
        match parse("a_nm,F_pN\n100,450\n120,300\n110,350\n90,500\n") {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 4);
                assert!(message.contains("increasing"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn schema_violations() {
        assert!(matches!(
            parse("a_nm,F_pN,extra\n100,1,2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(parse("sep,force\n1,2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse("a_nm,F_pN\n100,abc\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(parse("a_nm,F_pN\n-1,2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse("a_nm,F_pN\n").is_err());
    }

    #[test]
    fn csv_round_trip() {
        let s = series(&[1e-7, 2e-7], &[4e-10, 1e-10]);
        let mut buf = Vec::new();
        s.write_csv(&mut buf, "F_N").unwrap();
        let back = parse(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.separations(), s.separations());
        assert_eq!(back.forces(), s.forces());
    }

    #[test]
    fn residual_of_self_is_zero() {
        let s = series(&[1e-7, 2e-7, 3e-7], &[4e-10, 1e-10, 5e-11]);
        let r = residual(&s, &s).unwrap();
        assert!(r.forces().iter().all(|&f| f == 0.0));
        assert_relative_eq!(r.points().next().unwrap().error.unwrap(), 2f64.sqrt() * 1e-12);
    }

    #[test]
    fn residual_rejects_grid_mismatch() {
        let s = series(&[1e-7, 2e-7], &[1.0, 2.0]);
        let t = series(&[1e-7, 2.1e-7], &[1.0, 2.0]);
        let u = series(&[1e-7], &[1.0]);
        assert!(matches!(residual(&s, &t), Err(Error::GridMismatch(_))));
        assert!(matches!(residual(&s, &u), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn repair_shifts_by_twice_the_layer() {
        let s = series(&[1e-7, 2e-7], &[4e-10, 1e-10]);
        let r = rlm_repair(&s, 8e-9).unwrap();
        for (a, b) in s.separations().iter().zip(r.separations()) {
            assert_eq!(b, a + 16e-9);
        }
        assert_eq!(r.forces(), s.forces());
        assert!(r.provenance().contains(REPAIR_LABEL));
        assert_eq!(rlm_repair(&s, 0.0).unwrap().separations(), s.separations());
        assert!(rlm_repair(&s, -1e-9).is_err());
    }

    #[test]
    fn unsorted_series_rejected() {
        let pts = vec![
            MeasurementPoint {
                separation: 2e-7,
                force: 1.0,
                error: None,
            },
            MeasurementPoint {
                separation: 1e-7,
                force: 1.0,
                error: None,
            },
        ];
        assert!(MeasurementSeries::new(pts, "x").is_err());
    }

    #[test]
    fn decompose_identity_and_missing_constants() {
        let rec = RawForceRecord {
            piezo_separation: vec![1e-7, 2e-7],
            raw_force: vec![3e-10, 1e-10],
            errors: None,
            electrostatic: Electrostatic::None,
            light_coupling: Some(0.0),
            offset: Some(0.0),
        };
        let s = decompose_raw(&rec).unwrap();
        assert_eq!(s.forces(), rec.raw_force);
        assert_eq!(s.separations(), rec.piezo_separation);
        assert!(matches!(
            decompose_raw(&RawForceRecord {
                light_coupling: None,
                ..rec.clone()
            }),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            decompose_raw(&RawForceRecord {
                offset: None,
                ..rec.clone()
            }),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            decompose_raw(&RawForceRecord {
                raw_force: vec![1.0],
                ..rec
            }),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn capacitor_force() {
        let e = Electrostatic::SphereCapacitor {
            radius: 1e-4,
            potential: 0.029,
        };
        assert_relative_eq!(
            e.at(0, 1e-7),
            std::f64::consts::PI * EPS_0 * 1e-4 * 0.029f64.powi(2) / 1e-7
        );
    }

    proptest! {
        #[test]
        fn residual_antisymmetric(f in proptest::collection::vec(-1e-9f64..1e-9, 5), g in proptest::collection::vec(-1e-9f64..1e-9, 5)) {
            let a = [1e-7, 2e-7, 3e-7, 4e-7, 5e-7];
            let (x, y) = (series(&a, &f), series(&a, &g));
            let r1 = residual(&x, &y).unwrap().forces();
            let r2 = residual(&y, &x).unwrap().forces();
            for (p, q) in r1.iter().zip(&r2) {
                prop_assert_eq!(*p, -*q);
            }
        }

        #[test]
        fn repair_composes(h in 0.0f64..5e-8, a0 in 5e-8f64..5e-7) {
            let s = series(&[a0, a0 * 1.5, a0 * 2.0], &[1.0, 0.5, 0.25]);
            let twice = rlm_repair(&rlm_repair(&s, h).unwrap(), h).unwrap();
            let once = rlm_repair(&s, 2.0 * h).unwrap();
            prop_assert_eq!(twice.separations(), once.separations());
        }

        #[test]
        fn decompose_inverts_compose(
            k in 1e-30f64..1e-27,
            c in -1e-3f64..1e-3,
            a0 in 1e-8f64..1e-7,
            v in 0.0f64..0.05,
        ) {
            let fc = |a: f64| k / a.powi(3);
            let grid: Vec<f64> = (0..20).map(|i| 5e-8 + 2e-8 * i as f64).collect();
            let e = Electrostatic::SphereCapacitor { radius: 1e-4, potential: v };
            let rec = compose_raw(fc, grid, a0, c, e);
            let s = decompose_raw(&rec).unwrap();
            for (p, fm) in s.points().zip(&rec.raw_force) {
                let expected = fc(p.separation);
                let scale = fm.abs() + (c * p.separation).abs() + expected.abs();
                prop_assert!((p.force - expected).abs() <= 4.0 * f64::EPSILON * scale);
            }
        }
    }
}
