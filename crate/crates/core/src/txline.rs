//! Forward model: a filter as a finite lossy coaxial line.
//!
//! Per frequency the line is described by a real characteristic impedance
//! `Z = (η0/2π)·√(μ/ε)·ln(D/d)` and a propagation constant
//! `γ = α + iω√(εμ)/c`. The two-port response of a line of length `l`
//! between `Z0` ports is
//!
//! ```text
//! S21 = 2 / (2·cosh(γl) + sinh(γl)·(r + 1/r))
//! S11 = (r − 1/r) / (2·coth(γl) + (r + 1/r)),   r = Z/Z0
//! ```
//!
//! The ABCD route ([`abcd_of_line`], [`Abcd::to_s`]) computes the same
//! response independently and is used as a cross-check.

use std::f64::consts::PI;

use crate::constants::{eta0, C0, DB_PER_NEPER};
use crate::error::{Error, Result};
use crate::material::MaterialModel;
use crate::C64;

/// Magnitudes at or below this level are reported as this many dB.
pub const FLOOR_DB: f64 = -300.0;

/// Above this value of `Re(γl)` the line is treated as opaque.
const OPAQUE_NEPERS: f64 = 700.0;

const SINGULAR_DENOMINATOR: f64 = 1e-30;

/// Physical dimensions of one filter, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoaxGeometry {
    pub length_m: f64,
    pub inner_d_m: f64,
    pub outer_d_m: f64,
}

impl CoaxGeometry {
    pub fn new(length_m: f64, inner_d_m: f64, outer_d_m: f64) -> Result<Self> {
        let g = Self {
            length_m,
            inner_d_m,
            outer_d_m,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length_m.is_finite() && self.length_m >= 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "length_m must be >= 0, got {}",
                self.length_m
            )));
        }
        if !(self.inner_d_m.is_finite() && self.inner_d_m > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "inner_d_m must be > 0, got {}",
                self.inner_d_m
            )));
        }
        if !(self.outer_d_m.is_finite() && self.outer_d_m > self.inner_d_m) {
            return Err(Error::InvalidGeometry(format!(
                "outer_d_m must exceed inner_d_m ({}), got {}",
                self.inner_d_m, self.outer_d_m
            )));
        }
        Ok(())
    }

    /// ln(D/d).
    pub fn log_ratio(&self) -> f64 {
        (self.outer_d_m / self.inner_d_m).ln()
    }

    pub fn with_length(&self, length_m: f64) -> Result<Self> {
        Self::new(length_m, self.inner_d_m, self.outer_d_m)
    }
}

/// Strictly increasing list of positive frequencies, Hz.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrequencyGrid(Vec<f64>);

impl FrequencyGrid {
    pub fn new(points_hz: Vec<f64>) -> Result<Self> {
        if let Some(&f) = points_hz.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
            return Err(Error::InvalidGrid(format!(
                "frequencies must be positive and finite, got {f}"
            )));
        }
        if let Some(w) = points_hz.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!(
                "frequencies must be strictly increasing ({} followed by {})",
                w[0], w[1]
            )));
        }
        Ok(Self(points_hz))
    }

    /// `n` evenly spaced points from `start` to `stop` inclusive.
    pub fn linear(start_hz: f64, stop_hz: f64, n: usize) -> Result<Self> {
        match n {
            0 => Err(Error::InvalidGrid("n_points must be >= 1".into())),
            1 if start_hz == stop_hz => Self::new(vec![start_hz]),
            1 => Err(Error::InvalidGrid(
                "a single-point grid needs f_start_hz == f_stop_hz".into(),
            )),
            _ => {
                if !(stop_hz > start_hz) {
                    return Err(Error::InvalidGrid(format!(
                        "f_stop_hz ({stop_hz}) must exceed f_start_hz ({start_hz})"
                    )));
                }
                let step = (stop_hz - start_hz) / (n - 1) as f64;
                let mut pts: Vec<f64> = (0..n).map(|i| start_hz + step * i as f64).collect();
                pts[n - 1] = stop_hz;
                Self::new(pts)
            }
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Derived line quantities at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinePointParams {
    pub f_hz: f64,
    pub z_ohm: f64,
    /// α + iβ, per meter.
    pub gamma: C64,
}

/// Symmetric reciprocal two-port response (S22 = S11, S12 = S21).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPortResponse {
    pub grid: FrequencyGrid,
    pub s11: Vec<C64>,
    pub s21: Vec<C64>,
    pub z0_ohm: f64,
}

impl TwoPortResponse {
    pub fn new(grid: FrequencyGrid, s11: Vec<C64>, s21: Vec<C64>, z0_ohm: f64) -> Result<Self> {
        if s11.len() != grid.len() || s21.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "response arrays ({}, {}) do not match grid length {}",
                s11.len(),
                s21.len(),
                grid.len()
            )));
        }
        check_z0(z0_ohm)?;
        Ok(Self {
            grid,
            s11,
            s21,
            z0_ohm,
        })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

fn check_z0(z0_ohm: f64) -> Result<()> {
    if z0_ohm.is_finite() && z0_ohm > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("z0 must be > 0, got {z0_ohm}")))
    }
}

/// γ(f) = α(f) + i·2πf·√(ε(f)μ(f))/c.
pub fn propagation_constant(mat: &MaterialModel, f_hz: f64) -> Result<C64> {
    let s = mat.eval(f_hz)?;
    Ok(C64::new(s.alpha_np_per_m, 2.0 * PI * f_hz * s.index() / C0))
}

/// Z(f) = (1/2π)·√(μμ0/(εε0))·ln(D/d).
pub fn characteristic_impedance(geom: &CoaxGeometry, mat: &MaterialModel, f_hz: f64) -> Result<f64> {
    let s = mat.eval(f_hz)?;
    Ok(eta0() / (2.0 * PI) * s.impedance_scale() * geom.log_ratio())
}

pub fn line_params(geom: &CoaxGeometry, mat: &MaterialModel, f_hz: f64) -> Result<LinePointParams> {
    Ok(LinePointParams {
        f_hz,
        z_ohm: characteristic_impedance(geom, mat, f_hz)?,
        gamma: propagation_constant(mat, f_hz)?,
    })
}

/// (S11, S21) of a line with impedance `z_ohm`, propagation constant `gamma`
/// and length `length_m`, between `z0_ohm` ports.
///
/// cosh/sinh are expanded in `e^(−γl)` only, so large losses underflow to
/// zero transmission instead of overflowing.
pub fn line_s_params(z_ohm: f64, gamma: C64, length_m: f64, z0_ohm: f64) -> (C64, C64) {
    if length_m == 0.0 {
        return (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    }
    let r = z_ohm / z0_ohm;
    let sum = r + 1.0 / r;
    let diff = r - 1.0 / r;
    let gl = gamma * length_m;
    if gl.re > OPAQUE_NEPERS {
        // coth → 1
        return (C64::new(diff / (2.0 + sum), 0.0), C64::new(0.0, 0.0));
    }
    let e = (-gl).exp();
    let e2 = e * e;
    let plus = 1.0 + e2;
    let minus = 1.0 - e2;
    let s21 = 2.0 * e / (plus + minus * (sum / 2.0));
    let s11 = minus * diff / (2.0 * plus + minus * sum);
    (s11, s21)
}

/// Two-port response of the filter over `grid`.
pub fn s_params_model(
    geom: &CoaxGeometry,
    mat: &MaterialModel,
    grid: &FrequencyGrid,
    z0_ohm: f64,
) -> Result<TwoPortResponse> {
    geom.validate()?;
    check_z0(z0_ohm)?;
    let mut s11 = Vec::with_capacity(grid.len());
    let mut s21 = Vec::with_capacity(grid.len());
    for &f in grid.points() {
        let p = line_params(geom, mat, f)?;
        let (a, b) = line_s_params(p.z_ohm, p.gamma, geom.length_m, z0_ohm);
        s11.push(a);
        s21.push(b);
    }
    TwoPortResponse::new(grid.clone(), s11, s21, z0_ohm)
}

/// Chain (ABCD) matrix of a two-port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abcd {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Abcd {
    pub fn identity() -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        Self {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    /// Uniform line section.
    pub fn line(z_ohm: f64, gamma: C64, length_m: f64) -> Self {
        let gl = gamma * length_m;
        let (ch, sh) = (gl.cosh(), gl.sinh());
        Self {
            a: ch,
            b: sh * z_ohm,
            c: sh / z_ohm,
            d: ch,
        }
    }

    /// `self` followed by `next`.
    pub fn cascade(&self, next: &Abcd) -> Abcd {
        Abcd {
            a: self.a * next.a + self.b * next.c,
            b: self.a * next.b + self.b * next.d,
            c: self.c * next.a + self.d * next.c,
            d: self.c * next.b + self.d * next.d,
        }
    }

    /// (S11, S21) referenced to `z0_ohm`.
    pub fn to_s(&self, z0_ohm: f64) -> Result<(C64, C64)> {
        check_z0(z0_ohm)?;
        let b = self.b / z0_ohm;
        let c = self.c * z0_ohm;
        let den = self.a + b + c + self.d;
        if den.norm() < SINGULAR_DENOMINATOR {
            return Err(Error::SingularNetwork(den.norm()));
        }
        Ok(((self.a + b - c - self.d) / den, 2.0 / den))
    }
}

pub fn abcd_of_line(geom: &CoaxGeometry, mat: &MaterialModel, f_hz: f64) -> Result<Abcd> {
    let p = line_params(geom, mat, f_hz)?;
    Ok(Abcd::line(p.z_ohm, p.gamma, geom.length_m))
}

pub fn abcd_to_s(abcd: &Abcd, z0_ohm: f64) -> Result<(C64, C64)> {
    abcd.to_s(z0_ohm)
}

pub fn cascade(first: &Abcd, second: &Abcd) -> Abcd {
    first.cascade(second)
}

/// 20·log10|s|, floored at [`FLOOR_DB`].
pub fn magnitude_db(s: C64) -> f64 {
    let m = s.norm();
    if m == 0.0 {
        return FLOOR_DB;
    }
    (DB_PER_NEPER * m.ln()).max(FLOOR_DB)
}
