//! Flat rows and table rendering for the CSV and table formats.

use dynheight::complexdyn::ComplexOrbit;
use dynheight::heights::HeightReport;
use dynheight::padic::PadicOrbit;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct HeightRow {
    pub n: u32,
    pub avg_height: f64,
    pub bound: f64,
    pub limit: f64,
    pub abs_error: f64,
}

impl From<&HeightReport> for HeightRow {
    fn from(r: &HeightReport) -> Self {
        HeightRow {
            n: r.n,
            avg_height: r.avg_height,
            bound: r.bound,
            limit: r.limit,
            abs_error: r.abs_error(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PadicRow {
    pub address: String,
    pub mantissa_base_p: String,
    pub effective_precision: u32,
}

pub fn padic_rows(orbit: &PadicOrbit) -> Vec<PadicRow> {
    orbit
        .leaves
        .iter()
        .map(|l| PadicRow {
            address: l.address_string(),
            mantissa_base_p: l.value.base_p_digits(),
            effective_precision: l.value.precision(),
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct OrbitRow {
    pub address: String,
    pub re: String,
    pub im: String,
    pub residual: f64,
}

/// Significant decimal digits carried by `bits` of mantissa.
pub fn decimal_digits(bits: usize) -> usize {
    (bits as f64 * std::f64::consts::LOG10_2).ceil() as usize
}

pub fn orbit_rows(orbit: &ComplexOrbit) -> Vec<OrbitRow> {
    let digits = decimal_digits(orbit.bits);
    orbit
        .leaves
        .iter()
        .zip(orbit.leaf_residuals())
        .map(|(l, residual)| {
            let (re, im) = l.value.to_decimal_strings(digits);
            OrbitRow {
                address: l.address_string(),
                re,
                im,
                residual,
            }
        })
        .collect()
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Left-aligned columns separated by two spaces.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&width)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(header.to_vec());
    out.push('\n');
    for r in rows {
        out.push_str(&line(r.iter().map(|s| s.as_str()).collect()));
        out.push('\n');
    }
    out
}

/// `key  value` lines.
pub fn key_values(pairs: &[(&str, String)]) -> String {
    let w = pairs.iter().map(|p| p.0.len()).max().unwrap_or(0);
    pairs
        .iter()
        .map(|(k, v)| format!("{k:<w$}  {v}\n"))
        .collect()
}
