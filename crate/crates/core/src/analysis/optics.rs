use std::io::Read;
use std::path::Path;

use crate::constants::wavelength_to_omega;
use crate::dielectric::OpticalSample;
use crate::error::{Error, Result};

enum Columns {
    Wavelength,
    Permittivity,
}

/// Reads an optical table, either `lambda_m,n,kappa` or
/// `omega_rad_s,eps_re,eps_im`, and returns it sorted by ascending ω.
pub fn load_optics(path: &Path) -> Result<Vec<OpticalSample>> {
    let file = std::fs::File::open(path)?;
    parse_optics(file, path)
}

pub fn parse_optics<R: Read>(reader: R, path: &Path) -> Result<Vec<OpticalSample>> {
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
    let headers: Vec<String> = header.iter().map(str::to_owned).collect();
    let columns = match headers.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["lambda_m", "n", "kappa"] => Columns::Wavelength,
        ["omega_rad_s", "eps_re", "eps_im"] => Columns::Permittivity,
        other => {
            return Err(parse_err(
                header_line,
                format!(
                    "expected header lambda_m,n,kappa or omega_rad_s,eps_re,eps_im, got {}",
                    other.join(",")
                ),
            ))
        }
    };

    let mut samples = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let mut vals = [0.0; 3];
        for (k, v) in vals.iter_mut().enumerate() {
            *v = record[k]
                .parse::<f64>()
                .map_err(|e| parse_err(line, format!("column {}: {e}", headers[k])))?;
        }
        let sample = match columns {
            Columns::Wavelength => {
                if !(vals[0] > 0.0) {
                    return Err(parse_err(line, format!("wavelength must be > 0, got {}", vals[0])));
                }
                OpticalSample::from_refractive_index(wavelength_to_omega(vals[0]), vals[1], vals[2])
            }
            Columns::Permittivity => OpticalSample::new(vals[0], vals[1], vals[2]),
        }
        .map_err(|e| parse_err(line, e.to_string()))?;
        samples.push((line, sample));
    }
    if samples.is_empty() {
        return Err(parse_err(header_line, "no data rows".into()));
    }
    samples.sort_by(|x, y| x.1.omega.total_cmp(&y.1.omega));
    if let Some(w) = samples.windows(2).find(|w| w[0].1.omega == w[1].1.omega) {
        return Err(parse_err(w[1].0, format!("duplicate frequency {} rad/s", w[1].1.omega)));
    }
    Ok(samples.into_iter().map(|(_, s)| s).collect())
}
