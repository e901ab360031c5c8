//! Plot-ready CSV for responses and the material table format.

use crate::error::{Error, Result};
use crate::material::{MaterialModel, MaterialSample};
use crate::touchstone::fmt_sig;
use crate::txline::{magnitude_db, FrequencyGrid, TwoPortResponse};
use crate::C64;

pub const RESPONSE_HEADER: &str = "freq_hz,s11_re,s11_im,s21_re,s21_im,s11_db,s21_db";
pub const MATERIAL_HEADER: &str = "f_hz,eps_rel,mu_rel,alpha_np_per_m";

fn push_row(out: &mut String, fields: &[f64]) {
    let row: Vec<String> = fields.iter().map(|&v| fmt_sig(v)).collect();
    out.push_str(&row.join(","));
    out.push('\n');
}

pub fn export_csv(resp: &TwoPortResponse) -> String {
    let mut out = String::from(RESPONSE_HEADER);
    out.push('\n');
    for (i, &f) in resp.grid.points().iter().enumerate() {
        let (s11, s21) = (resp.s11[i], resp.s21[i]);
        push_row(
            &mut out,
            &[f, s11.re, s11.im, s21.re, s21.im, magnitude_db(s11), magnitude_db(s21)],
        );
    }
    out
}

pub fn export_material_csv(mat: &MaterialModel) -> String {
    let mut out = String::from(MATERIAL_HEADER);
    out.push('\n');
    for s in mat.samples() {
        push_row(&mut out, &[s.f_hz, s.eps_rel, s.mu_rel, s.alpha_np_per_m]);
    }
    out
}

/// Reads rows of a CSV with an exact expected header. Line numbers in errors
/// are 1-based and count the header.
fn read_rows(text: &str, header: &str) -> Result<Vec<(usize, Vec<f64>)>> {
    let expected: Vec<&str> = header.split(',').collect();
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let got = rdr
        .headers()
        .map_err(|e| Error::parse(1, format!("bad CSV header: {e}")))?
        .clone();
    if got.iter().collect::<Vec<_>>() != expected {
        return Err(Error::parse(1, format!("expected header `{header}`")));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::parse(line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() != expected.len() {
            return Err(Error::parse(
                line,
                format!("expected {} fields, found {}", expected.len(), rec.len()),
            ));
        }
        let vals = rec
            .iter()
            .map(|t| {
                t.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::parse(line, format!("unparseable number `{t}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push((line, vals));
    }
    Ok(rows)
}

pub fn parse_material_csv(text: &str) -> Result<MaterialModel> {
    let rows = read_rows(text, MATERIAL_HEADER)?;
    let samples: Vec<MaterialSample> = rows
        .into_iter()
        .map(|(line, v)| {
            let s = MaterialSample::new(v[0], v[1], v[2], v[3]);
            s.validate().map_err(|e| Error::parse(line, e.to_string()))?;
            Ok(s)
        })
        .collect::<Result<_>>()?;
    MaterialModel::new(samples)
}

/// Reads a response CSV back. The dB columns are ignored; the reference
/// impedance is not stored in the file and is supplied by the caller.
pub fn parse_response_csv(text: &str, z0_ohm: f64) -> Result<TwoPortResponse> {
    let rows = read_rows(text, RESPONSE_HEADER)?;
    let mut freqs = Vec::with_capacity(rows.len());
    let mut s11 = Vec::with_capacity(rows.len());
    let mut s21 = Vec::with_capacity(rows.len());
    for (line, v) in rows {
        if v[0] <= 0.0 || freqs.last().is_some_and(|&p| v[0] <= p) {
            return Err(Error::parse(
                line,
                "frequencies must be positive and strictly increasing",
            ));
        }
        freqs.push(v[0]);
        s11.push(C64::new(v[1], v[2]));
        s21.push(C64::new(v[3], v[4]));
    }
    TwoPortResponse::new(FrequencyGrid::new(freqs)?, s11, s21, z0_ohm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matched_point_db() {
        let e1 = (-1.0f64).exp();
        let resp = TwoPortResponse::new(
            FrequencyGrid::new(vec![1e9]).unwrap(),
            vec![C64::new(0.0, 0.0)],
            vec![C64::new(e1, 0.0)],
            50.0,
        )
        .unwrap();
        let text = export_csv(&resp);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(RESPONSE_HEADER));
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|t| t.parse().unwrap()).collect();
        assert!((row[6] + 8.685_889_638).abs() < 1e-9);
        assert_eq!(row[5], -300.0);
        assert!(!text.contains('\r'));
        let back = parse_response_csv(&text, 50.0).unwrap();
        assert!((back.s21[0] - resp.s21[0]).norm() < 1e-12);
    }

    #[test]
    fn empty_response_is_header_only() {
        let resp = TwoPortResponse::new(FrequencyGrid::default(), vec![], vec![], 50.0).unwrap();
        assert_eq!(export_csv(&resp), format!("{RESPONSE_HEADER}\n"));
    }

    #[test]
    fn material_round_trip() {
        let m = MaterialModel::new(vec![
            MaterialSample::new(1e9, 4.0, 1.0, 2.5),
            MaterialSample::new(2e9, 4.1, 1.05, 5.0),
        ])
        .unwrap();
        let back = parse_material_csv(&export_material_csv(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn material_errors_name_lines() {
        let text = format!("{MATERIAL_HEADER}\n1e9,4,1,0\n2e9,0.5,1,0\n");
        assert!(matches!(parse_material_csv(&text), Err(Error::Parse { line: 3, .. })));
        let text = format!("{MATERIAL_HEADER}\n1e9,4,1,x\n");
        assert!(matches!(parse_material_csv(&text), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(
            parse_material_csv("f,eps\n1,2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
