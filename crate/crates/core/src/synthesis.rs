//! Design-direction solvers and compliance checks.

use std::f64::consts::PI;

use crate::constants::{eta0, DB_PER_NEPER};
use crate::error::{Error, Result};
use crate::material::MaterialModel;
use crate::txline::{magnitude_db, TwoPortResponse};

/// Relative residual below which tabulated α counts as affine in f.
pub const AFFINE_TOL: f64 = 1e-6;

/// Reflection and attenuation-slope targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplianceTargets {
    pub reflection_ceiling_db: f64,
    pub band_max_hz: f64,
    pub slope_target_db_per_ghz: f64,
    pub slope_tolerance_rel: f64,
}

impl Default for ComplianceTargets {
    fn default() -> Self {
        Self {
            reflection_ceiling_db: -20.0,
            band_max_hz: 20e9,
            slope_target_db_per_ghz: 1.0,
            slope_tolerance_rel: 0.1,
        }
    }
}

impl ComplianceTargets {
    pub fn validate(&self) -> Result<()> {
        if !(self.reflection_ceiling_db < 0.0) {
            return Err(Error::InvalidInput(format!(
                "reflection ceiling must be < 0 dB, got {}",
                self.reflection_ceiling_db
            )));
        }
        if !(self.band_max_hz > 0.0) {
            return Err(Error::InvalidInput(format!(
                "band_max_hz must be > 0, got {}",
                self.band_max_hz
            )));
        }
        if !(self.slope_target_db_per_ghz >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "slope target must be >= 0, got {}",
                self.slope_target_db_per_ghz
            )));
        }
        if !(self.slope_tolerance_rel >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "slope tolerance must be >= 0, got {}",
                self.slope_tolerance_rel
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplianceReport {
    pub reflection_pass: bool,
    pub worst_reflection_db: f64,
    pub worst_reflection_hz: f64,
    pub fitted_slope_db_per_ghz: f64,
    pub fitted_intercept_db: f64,
    pub max_linearity_residual_db: f64,
    pub slope_pass: bool,
    pub in_band_points: usize,
}

impl ComplianceReport {
    pub fn passed(&self) -> bool {
        self.reflection_pass && self.slope_pass
    }
}

/// Ordinary least-squares line `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// max |fit − y|.
    pub max_residual: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::InsufficientData(format!(
            "a line fit needs at least 2 points, got {n}"
        )));
    }
    let xm = x.iter().sum::<f64>() / n as f64;
    let ym = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        sxy += (xi - xm) * (yi - ym);
        sxx += (xi - xm) * (xi - xm);
    }
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all abscissae are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let max_residual = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (slope * xi + intercept - yi).abs())
        .fold(0.0, f64::max);
    Ok(LineFit {
        slope,
        intercept,
        max_residual,
    })
}

/// D/d giving characteristic impedance `target_z_ohm` at `f_ref_hz`.
pub fn solve_diameter_ratio(target_z_ohm: f64, mat: &MaterialModel, f_ref_hz: f64) -> Result<f64> {
    if !(target_z_ohm > 0.0 && target_z_ohm.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "target impedance must be > 0, got {target_z_ohm}"
        )));
    }
    let s = mat.eval(f_ref_hz)?;
    Ok((2.0 * PI * target_z_ohm / (eta0() * s.impedance_scale())).exp())
}

/// α(f) ≈ a0 + a1·f fitted over the material table, Np/m and Np/m/Hz.
pub fn affine_loss(mat: &MaterialModel) -> Result<(f64, f64)> {
    let samples = mat.samples();
    if samples.len() == 1 {
        return Ok((samples[0].alpha_np_per_m, 0.0));
    }
    let x: Vec<f64> = samples.iter().map(|s| s.f_hz).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.alpha_np_per_m).collect();
    let fit = fit_line(&x, &y)?;
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale > 0.0 && fit.max_residual / scale >= AFFINE_TOL {
        return Err(Error::UnsupportedMaterial(format!(
            "loss constant is not affine in frequency (relative residual {:.3e})",
            fit.max_residual / scale
        )));
    }
    let span = x[x.len() - 1] - x[0];
    // slope indistinguishable from rounding of a constant table
    if scale == 0.0 || (fit.slope * span).abs() <= 1e-12 * scale {
        return Ok((fit.intercept, 0.0));
    }
    Ok((fit.intercept, fit.slope))
}

/// Length giving a matched-line transmission slope of
/// `target_slope_db_per_ghz`.
pub fn solve_length_for_slope(target_slope_db_per_ghz: f64, mat: &MaterialModel) -> Result<f64> {
    if !(target_slope_db_per_ghz > 0.0 && target_slope_db_per_ghz.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "slope target must be > 0, got {target_slope_db_per_ghz}"
        )));
    }
    let (_, a1) = affine_loss(mat)?;
    if a1 <= 0.0 {
        return Err(Error::NoSolution(format!(
            "loss slope {a1:e} Np/m/Hz is not positive; no length produces a slope"
        )));
    }
    Ok(target_slope_db_per_ghz / (DB_PER_NEPER * a1 * 1e9))
}

pub fn check_compliance(resp: &TwoPortResponse, targets: &ComplianceTargets) -> Result<ComplianceReport> {
    targets.validate()?;
    let band: Vec<usize> = (0..resp.len())
        .filter(|&i| resp.grid.points()[i] <= targets.band_max_hz)
        .collect();
    if band.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} grid point(s) at or below {} Hz; need at least 2",
            band.len(),
            targets.band_max_hz
        )));
    }
    let f = resp.grid.points();
    let mut worst = f64::NEG_INFINITY;
    let mut worst_hz = f[band[0]];
    for &i in &band {
        let db = magnitude_db(resp.s11[i]);
        if db > worst {
            worst = db;
            worst_hz = f[i];
        }
    }
    let x: Vec<f64> = band.iter().map(|&i| f[i] / 1e9).collect();
    let y: Vec<f64> = band.iter().map(|&i| -magnitude_db(resp.s21[i])).collect();
    let fit = fit_line(&x, &y)?;
    let target = targets.slope_target_db_per_ghz;
    let slope_pass = if target > 0.0 {
        (fit.slope - target).abs() / target <= targets.slope_tolerance_rel
    } else {
        fit.slope.abs() <= targets.slope_tolerance_rel
    };
    Ok(ComplianceReport {
        reflection_pass: worst < targets.reflection_ceiling_db,
        worst_reflection_db: worst,
        worst_reflection_hz: worst_hz,
        fitted_slope_db_per_ghz: fit.slope,
        fitted_intercept_db: fit.intercept,
        max_linearity_residual_db: fit.max_residual,
        slope_pass,
        in_band_points: band.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::MaterialSample;
    use crate::txline::{characteristic_impedance, s_params_model, CoaxGeometry, FrequencyGrid};

    fn affine_material(a0: f64, a1: f64) -> MaterialModel {
        let s = (0..11)
            .map(|k| {
                let f = 1e7 + 2e9 * k as f64;
                MaterialSample::new(f, 4.0, 1.0, a0 + a1 * f)
            })
            .collect();
        MaterialModel::new(s).unwrap()
    }

    #[test]
    fn ratio_examples() {
        let vac = MaterialModel::constant(1.0, 1.0, 0.0).unwrap();
        let r = solve_diameter_ratio(eta0() / (2.0 * PI), &vac, 1e9).unwrap();
        assert!((r - std::f64::consts::E).abs() < 1e-14);
        let diel = MaterialModel::constant(4.0, 1.0, 0.0).unwrap();
        let r = solve_diameter_ratio(50.0, &diel, 1e9).unwrap();
        assert!((r - 5.300_602_403_213_33).abs() < 1e-12, "{r}");
        let g = CoaxGeometry::new(0.01, 1e-3, 1e-3 * r).unwrap();
        let z = characteristic_impedance(&g, &diel, 1e9).unwrap();
        assert!((z - 50.0).abs() < 1e-9 * 50.0);
    }

    #[test]
    fn slope_length_examples() {
        let a1 = 1.0 / (DB_PER_NEPER * 1e9 * 0.042);
        let m = affine_material(0.5, a1);
        let l = solve_length_for_slope(1.0, &m).unwrap();
        assert!((l - 0.042).abs() < 1e-12, "{l}");
        let l2 = solve_length_for_slope(2.0, &m).unwrap();
        assert!((l2 - 2.0 * l).abs() < 1e-15);
    }

    #[test]
    fn constant_loss_has_no_solution() {
        let m = affine_material(3.0, 0.0);
        assert!(matches!(solve_length_for_slope(1.0, &m), Err(Error::NoSolution(_))));
        let c = MaterialModel::constant(2.0, 1.0, 3.0).unwrap();
        assert!(matches!(solve_length_for_slope(1.0, &c), Err(Error::NoSolution(_))));
    }

    #[test]
    fn non_affine_loss_is_unsupported() {
        let s = (0..11)
            .map(|k| {
                let f = 1e7 + 2e9 * k as f64;
                MaterialSample::new(f, 4.0, 1.0, 1e-20 * f * f)
            })
            .collect();
        let m = MaterialModel::new(s).unwrap();
        assert!(matches!(
            solve_length_for_slope(1.0, &m),
            Err(Error::UnsupportedMaterial(_))
        ));
    }

    #[test]
    fn lossless_line_fails_slope() {
        let m = MaterialModel::constant(4.0, 1.0, 0.0).unwrap();
        let r = solve_diameter_ratio(50.0, &m, 1e9).unwrap();
        let g = CoaxGeometry::new(0.042, 1e-3, r * 1e-3).unwrap();
        let grid = FrequencyGrid::linear(1e7, 2e10, 201).unwrap();
        let resp = s_params_model(&g, &m, &grid, 50.0).unwrap();
        let rep = check_compliance(&resp, &ComplianceTargets::default()).unwrap();
        assert!(rep.fitted_slope_db_per_ghz.abs() < 1e-9);
        assert!(!rep.slope_pass);
        assert!(rep.reflection_pass);
    }

    #[test]
    fn too_few_points_in_band() {
        let m = MaterialModel::constant(4.0, 1.0, 0.0).unwrap();
        let g = CoaxGeometry::new(0.042, 1e-3, 5e-3).unwrap();
        let grid = FrequencyGrid::linear(1e9, 2e10, 20).unwrap();
        let resp = s_params_model(&g, &m, &grid, 50.0).unwrap();
        let t = ComplianceTargets {
            band_max_hz: 1.5e9,
            ..Default::default()
        };
        assert!(matches!(check_compliance(&resp, &t), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn fit_exact_on_affine() {
        let x: Vec<f64> = (0..50).map(|i| i as f64 * 0.4).collect();
        let y: Vec<f64> = x.iter().map(|v| 1.7 * v - 3.2).collect();
        let fit = fit_line(&x, &y).unwrap();
        assert!((fit.slope - 1.7).abs() < 1e-12);
        assert!((fit.intercept + 3.2).abs() < 1e-12);
        assert!(fit.max_residual < 1e-12);
    }
}
