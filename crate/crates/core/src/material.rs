//! Effective material parameters of the filter compound.
//!
//! The compound (metal powder in resin) is treated as a uniform medium with
//! real relative permittivity and permeability and a separate loss constant.
//! Values are tabulated per frequency and linearly interpolated between
//! samples. There is no extrapolation.

use crate::error::{Error, Result};

/// Slack allowed below `eps_rel = 1` so that a vacuum line survives
/// a numeric round trip.
const EPS_FLOOR_TOL: f64 = 1e-9;

/// Effective compound parameters at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialSample {
    pub f_hz: f64,
    pub eps_rel: f64,
    pub mu_rel: f64,
    /// Loss constant, Np/m.
    pub alpha_np_per_m: f64,
}

impl MaterialSample {
    pub fn new(f_hz: f64, eps_rel: f64, mu_rel: f64, alpha_np_per_m: f64) -> Self {
        Self {
            f_hz,
            eps_rel,
            mu_rel,
            alpha_np_per_m,
        }
    }

    /// Checks the physical invariants of a single sample.
    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::InvalidMaterial(format!("at {} Hz: {what}", self.f_hz)));
        if !(self.f_hz.is_finite() && self.f_hz > 0.0) {
            return Err(Error::InvalidMaterial(format!(
                "sample frequency must be positive and finite, got {}",
                self.f_hz
            )));
        }
        if !(self.eps_rel.is_finite() && self.eps_rel >= 1.0 - EPS_FLOOR_TOL) {
            return bad(format!("eps_rel must be >= 1, got {}", self.eps_rel));
        }
        if !(self.mu_rel.is_finite() && self.mu_rel > 0.0) {
            return bad(format!("mu_rel must be > 0, got {}", self.mu_rel));
        }
        if !(self.alpha_np_per_m.is_finite() && self.alpha_np_per_m >= 0.0) {
            return bad(format!(
                "alpha_np_per_m must be >= 0, got {}",
                self.alpha_np_per_m
            ));
        }
        Ok(())
    }

    /// √(εμ), the effective refractive index.
    pub fn index(&self) -> f64 {
        (self.eps_rel * self.mu_rel).sqrt()
    }

    /// √(μ/ε), the impedance scale relative to an air-filled line.
    pub fn impedance_scale(&self) -> f64 {
        (self.mu_rel / self.eps_rel).sqrt()
    }
}

/// Tabulated material on a strictly increasing frequency grid.
///
/// A single sample describes a frequency-independent material and can be
/// evaluated at any positive frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialModel {
    samples: Vec<MaterialSample>,
}

impl MaterialModel {
    pub fn new(samples: Vec<MaterialSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidMaterial("at least one sample is required".into()));
        }
        for s in &samples {
            s.validate()?;
        }
        for w in samples.windows(2) {
            if w[1].f_hz <= w[0].f_hz {
                return Err(Error::InvalidMaterial(format!(
                    "sample frequencies must be strictly increasing ({} Hz followed by {} Hz)",
                    w[0].f_hz, w[1].f_hz
                )));
            }
        }
        Ok(Self { samples })
    }

    /// Frequency-independent material.
    pub fn constant(eps_rel: f64, mu_rel: f64, alpha_np_per_m: f64) -> Result<Self> {
        Self::new(vec![MaterialSample::new(1.0, eps_rel, mu_rel, alpha_np_per_m)])
    }

    pub fn samples(&self) -> &[MaterialSample] {
        &self.samples
    }

    pub fn is_constant(&self) -> bool {
        self.samples.len() == 1
    }

    /// Inclusive frequency range covered by the table.
    pub fn range_hz(&self) -> (f64, f64) {
        if self.is_constant() {
            return (0.0, f64::INFINITY);
        }
        (self.samples[0].f_hz, self.samples[self.samples.len() - 1].f_hz)
    }

    pub fn covers(&self, f_hz: f64) -> bool {
        let (lo, hi) = self.range_hz();
        f_hz > 0.0 && f_hz >= lo && f_hz <= hi
    }

    /// Interpolated parameters at `f_hz`.
    pub fn eval(&self, f_hz: f64) -> Result<MaterialSample> {
        if self.is_constant() {
            if !(f_hz > 0.0 && f_hz.is_finite()) {
                return Err(Error::OutOfRange {
                    f_hz,
                    min_hz: 0.0,
                    max_hz: f64::INFINITY,
                });
            }
            return Ok(MaterialSample { f_hz, ..self.samples[0] });
        }
        let (lo, hi) = self.range_hz();
        if !(f_hz >= lo && f_hz <= hi) {
            return Err(Error::OutOfRange {
                f_hz,
                min_hz: lo,
                max_hz: hi,
            });
        }
        let idx = self.samples.partition_point(|s| s.f_hz < f_hz);
        let hi_s = self.samples[idx];
        if hi_s.f_hz == f_hz || idx == 0 {
            return Ok(hi_s);
        }
        let lo_s = self.samples[idx - 1];
        let t = (f_hz - lo_s.f_hz) / (hi_s.f_hz - lo_s.f_hz);
        let lerp = |a: f64, b: f64| a + t * (b - a);
        Ok(MaterialSample {
            f_hz,
            eps_rel: lerp(lo_s.eps_rel, hi_s.eps_rel),
            mu_rel: lerp(lo_s.mu_rel, hi_s.mu_rel),
            alpha_np_per_m: lerp(lo_s.alpha_np_per_m, hi_s.alpha_np_per_m),
        })
    }
}
