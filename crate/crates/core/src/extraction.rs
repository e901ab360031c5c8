//! Material extraction from a measured symmetric two-port.
//!
//! Each frequency is split into an interface reflection `Γ` and a
//! propagation factor `P = e^(−γl)` (Nicolson–Ross–Weir form). The phase of
//! `P` is unwrapped along the grid to recover `γ`, the reflection gives the
//! line impedance, and the pair `(γ, Z)` is mapped back to `(ε, μ, α)`.
//!
//! The unwrap assumes the lowest grid frequency sits on the principal
//! sheet, i.e. its electrical length `βl` lies in `(−π, π]`.

use std::f64::consts::PI;

use crate::constants::{eta0, C0};
use crate::error::{Error, Result};
use crate::material::{MaterialModel, MaterialSample};
use crate::touchstone::{symmetrize, RawTwoPort};
use crate::txline::{CoaxGeometry, FrequencyGrid, TwoPortResponse};
use crate::C64;

/// Below this |S11| the data is treated as perfectly matched.
pub const MATCHED_S11: f64 = 1e-8;
const PASSIVE_SLACK: f64 = 1e-6;
const SINGULAR_INVERSION: f64 = 1e-12;
const OPEN_CIRCUIT: f64 = 1e-12;
/// Negative `Re(γ)` down to this value is noise and clamped silently.
const ALPHA_CLAMP: f64 = -1e-9;
/// Wrapped phase steps this close to ±π cannot be attributed to a branch.
const BRANCH_MARGIN: f64 = 1e-6;

/// Per-frequency inversion intermediates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractionPoint {
    pub f_hz: f64,
    /// Interface reflection Γ.
    pub gamma_refl: C64,
    /// Propagation factor P = e^(−γl).
    pub prop_factor: C64,
    /// Recovered propagation constant, 1/m.
    pub gamma: C64,
    /// Recovered line impedance, Ω.
    pub z_ohm: C64,
    /// Number of 2π turns added to the principal phase of P.
    pub branch_index: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlagKind {
    /// Γ/P inversion failed (degenerate or non-passive data).
    NearSingular,
    /// The lowest frequency looks like it lies beyond the first phase wrap.
    BranchAmbiguity,
    /// |P| > 1 beyond noise: Re(γ) was clamped to zero.
    PassivityViolation,
    /// Recovered (γ, Z) maps to no physical material.
    Unphysical,
}

impl FlagKind {
    /// Whether a point carrying this flag is dropped from the material.
    pub fn is_unusable(self) -> bool {
        matches!(self, FlagKind::NearSingular | FlagKind::Unphysical)
    }

    pub fn label(self) -> &'static str {
        match self {
            FlagKind::NearSingular => "near-singular",
            FlagKind::BranchAmbiguity => "branch-ambiguity",
            FlagKind::PassivityViolation => "passivity",
            FlagKind::Unphysical => "unphysical",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointFlag {
    pub index: usize,
    pub f_hz: f64,
    pub kind: FlagKind,
    pub detail: String,
}

impl std::fmt::Display for PointFlag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "point {} ({} Hz): {}: {}",
            self.index,
            self.f_hz,
            self.kind.label(),
            self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionReport {
    /// One entry per frequency where Γ/P inversion succeeded.
    pub points: Vec<ExtractionPoint>,
    pub material: MaterialModel,
    pub asymmetry_max: f64,
    pub flags: Vec<PointFlag>,
    /// Size of the input grid.
    pub total_points: usize,
}

impl ExtractionReport {
    pub fn unusable_count(&self) -> usize {
        let mut idx: Vec<usize> = self
            .flags
            .iter()
            .filter(|f| f.kind.is_unusable())
            .map(|f| f.index)
            .collect();
        idx.dedup();
        idx.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtractOptions {
    /// Odd moving-median window applied to ε, μ, α. 1 disables smoothing.
    pub smooth_window: usize,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self { smooth_window: 1 }
    }
}

/// Splits (S11, S21) of a symmetric line into (Γ, P).
pub fn invert_point(s11: C64, s21: C64) -> Result<(C64, C64)> {
    if s11.norm() < MATCHED_S11 {
        return Ok((C64::new(0.0, 0.0), s21));
    }
    let k = (s11 * s11 - s21 * s21 + 1.0) / (2.0 * s11);
    let root = (k * k - 1.0).sqrt();
    // The two roots multiply to 1; take the small one from the large one
    // to avoid cancellation when K is large.
    let (r1, r2) = (k + root, k - root);
    let big = if r1.norm() >= r2.norm() { r1 } else { r2 };
    let gamma = 1.0 / big;
    if gamma.norm() > 1.0 + PASSIVE_SLACK {
        return Err(Error::NonPassiveData(gamma.norm()));
    }
    let sum = s11 + s21;
    let den = 1.0 - sum * gamma;
    if den.norm() < SINGULAR_INVERSION {
        return Err(Error::SingularInversion(den.norm()));
    }
    Ok((gamma, (sum - gamma) / den))
}

/// Result of unwrapping one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnwrappedPoint {
    pub gamma: C64,
    pub branch_index: i64,
    /// Re(γ) was below the noise clamp and forced to zero.
    pub clamped_loss: bool,
}

/// Recovers γ(f) = −(ln|P| + i·arg P)/l with arg P made continuous in f.
///
/// The first point's phase is taken in (−π, π].
pub fn unwrap_gamma(points: &[(f64, C64)], length_m: f64) -> Result<Vec<UnwrappedPoint>> {
    if !(length_m > 0.0 && length_m.is_finite()) {
        return Err(Error::InvalidGeometry(format!(
            "length must be > 0 for extraction, got {length_m}"
        )));
    }
    let mut out = Vec::with_capacity(points.len());
    let mut prev_principal = 0.0;
    let mut phase = 0.0;
    for (i, &(f, p)) in points.iter().enumerate() {
        let principal = p.arg();
        if i == 0 {
            phase = principal;
        } else {
            let raw = principal - prev_principal;
            let step = raw - 2.0 * PI * (raw / (2.0 * PI)).round();
            if step.abs() >= PI - BRANCH_MARGIN {
                return Err(Error::BranchAmbiguity {
                    index: i - 1,
                    f_lo_hz: points[i - 1].0,
                    f_hi_hz: f,
                    step_rad: step,
                });
            }
            phase += step;
        }
        prev_principal = principal;
        let branch_index = ((phase - principal) / (2.0 * PI)).round() as i64;
        let mut alpha = -p.norm().ln() / length_m;
        let mut clamped = false;
        if alpha < 0.0 {
            clamped = alpha < ALPHA_CLAMP;
            alpha = 0.0;
        }
        out.push(UnwrappedPoint {
            gamma: C64::new(alpha, -phase / length_m),
            branch_index,
            clamped_loss: clamped,
        });
    }
    Ok(out)
}

/// Z = z0·(1 + Γ)/(1 − Γ).
pub fn impedance_from_reflection(gamma_refl: C64, z0_ohm: f64) -> Result<C64> {
    let den = 1.0 - gamma_refl;
    if den.norm() <= OPEN_CIRCUIT {
        return Err(Error::OpenCircuit);
    }
    Ok(z0_ohm * (1.0 + gamma_refl) / den)
}

/// Maps a recovered (γ, Re Z) pair at `f_hz` to (ε, μ, α).
pub fn material_from_point(gamma: C64, z_re_ohm: f64, geom: &CoaxGeometry, f_hz: f64) -> Result<MaterialSample> {
    let unphysical = |reason: String| Error::UnphysicalPoint { f_hz, reason };
    let n = gamma.im * C0 / (2.0 * PI * f_hz);
    let w = 2.0 * PI * z_re_ohm / (eta0() * geom.log_ratio());
    if !(n > 0.0 && n.is_finite()) {
        return Err(unphysical(format!("√(εμ) = {n} is not positive")));
    }
    if !(w > 0.0 && w.is_finite()) {
        return Err(unphysical(format!("√(μ/ε) = {w} is not positive")));
    }
    let sample = MaterialSample::new(f_hz, n / w, n * w, gamma.re.max(0.0));
    sample
        .validate()
        .map_err(|e| unphysical(e.to_string()))?;
    Ok(sample)
}

/// Extracts the material of a measured file: symmetrizes first and reports
/// the raw asymmetry.
pub fn extract_from_raw(raw: &RawTwoPort, geom: &CoaxGeometry, opts: ExtractOptions) -> Result<ExtractionReport> {
    let (resp, asym) = symmetrize(raw);
    let mut report = extract_material(&resp, geom, opts)?;
    report.asymmetry_max = asym;
    Ok(report)
}

pub fn extract_material(
    measured: &TwoPortResponse,
    geom: &CoaxGeometry,
    opts: ExtractOptions,
) -> Result<ExtractionReport> {
    geom.validate()?;
    if geom.length_m <= 0.0 {
        return Err(Error::InvalidGeometry(
            "extraction needs a line of positive length".into(),
        ));
    }
    if opts.smooth_window == 0 || opts.smooth_window.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "smoothing window must be odd and >= 1, got {}",
            opts.smooth_window
        )));
    }
    let freqs = measured.grid.points();
    let total = freqs.len();
    let mut flags = Vec::new();

    // Γ/P per frequency; failures are dropped before unwrapping.
    let mut inverted: Vec<(usize, C64, C64)> = Vec::with_capacity(total);
    for i in 0..total {
        match invert_point(measured.s11[i], measured.s21[i]) {
            Ok((g, p)) => inverted.push((i, g, p)),
            Err(e) => flags.push(PointFlag {
                index: i,
                f_hz: freqs[i],
                kind: FlagKind::NearSingular,
                detail: e.to_string(),
            }),
        }
    }

    let fp: Vec<(f64, C64)> = inverted.iter().map(|&(i, _, p)| (freqs[i], p)).collect();
    let unwrapped = unwrap_gamma(&fp, geom.length_m)?;

    if let Some(&(i, _, p)) = inverted.first() {
        if let Some(flag) = start_sheet_flag(i, freqs[i], p) {
            flags.push(flag);
        }
    }

    let mut points = Vec::with_capacity(inverted.len());
    let mut usable = Vec::with_capacity(inverted.len());
    for (&(i, g, p), u) in inverted.iter().zip(&unwrapped) {
        let f = freqs[i];
        if u.clamped_loss {
            flags.push(PointFlag {
                index: i,
                f_hz: f,
                kind: FlagKind::PassivityViolation,
                detail: format!("|P| = {} > 1, loss clamped to 0", p.norm()),
            });
        }
        let z = match impedance_from_reflection(g, measured.z0_ohm) {
            Ok(z) => z,
            Err(e) => {
                flags.push(PointFlag {
                    index: i,
                    f_hz: f,
                    kind: FlagKind::NearSingular,
                    detail: e.to_string(),
                });
                continue;
            }
        };
        points.push(ExtractionPoint {
            f_hz: f,
            gamma_refl: g,
            prop_factor: p,
            gamma: u.gamma,
            z_ohm: z,
            branch_index: u.branch_index,
        });
        match material_from_point(u.gamma, z.re, geom, f) {
            Ok(s) => usable.push(s),
            Err(e) => flags.push(PointFlag {
                index: i,
                f_hz: f,
                kind: FlagKind::Unphysical,
                detail: match e {
                    Error::UnphysicalPoint { reason, .. } => reason,
                    other => other.to_string(),
                },
            }),
        }
    }
    flags.sort_by_key(|f| f.index);

    let unusable = total - usable.len();
    if total == 0 || unusable * 2 > total || usable.is_empty() {
        return Err(Error::ExtractionFailed {
            flagged: unusable,
            total,
            diagnostics: flags.iter().map(|f| f.to_string()).collect(),
        });
    }
    if opts.smooth_window > 1 {
        smooth_samples(&mut usable, opts.smooth_window);
    }
    let material = MaterialModel::new(usable)?;
    Ok(ExtractionReport {
        points,
        material,
        asymmetry_max: 0.0,
        flags,
        total_points: total,
    })
}

/// A first-point phase of P in (π/2, π] means βl is negative by more than a
/// quarter turn, which on a physical line only happens when the grid starts
/// above the first wrap.
fn start_sheet_flag(index: usize, f_hz: f64, p: C64) -> Option<PointFlag> {
    let arg = p.arg();
    (arg > PI / 2.0).then(|| PointFlag {
        index,
        f_hz,
        kind: FlagKind::BranchAmbiguity,
        detail: format!(
            "first-point phase {arg:.4} rad implies βl < -π/2; grid likely starts above the first wrap"
        ),
    })
}

/// Moving median of odd `window` over ε, μ, α. Windows are truncated at the
/// ends of the table.
fn smooth_samples(samples: &mut [MaterialSample], window: usize) {
    let half = window / 2;
    let n = samples.len();
    let orig = samples.to_vec();
    let mut buf = Vec::with_capacity(window);
    let mut med = |lo: usize, hi: usize, get: &dyn Fn(&MaterialSample) -> f64| {
        buf.clear();
        buf.extend(orig[lo..hi].iter().map(get));
        median(&mut buf)
    };
    for (i, s) in samples.iter_mut().enumerate() {
        let lo = i.saturating_sub(half);
        let hi = (i + half + 1).min(n);
        s.eps_rel = med(lo, hi, &|s| s.eps_rel);
        s.mu_rel = med(lo, hi, &|s| s.mu_rel);
        s.alpha_np_per_m = med(lo, hi, &|s| s.alpha_np_per_m);
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Response of a new filter built from an extracted material.
pub fn predict(
    material: &MaterialModel,
    new_geom: &CoaxGeometry,
    grid: &FrequencyGrid,
    z0_ohm: f64,
) -> Result<TwoPortResponse> {
    crate::txline::s_params_model(new_geom, material, grid, z0_ohm)
}
