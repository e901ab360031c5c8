//! `coaxfilt` command-line frontend.
//!
//! Exit codes: 0 success, 1 numeric error, 2 input error, 3 extraction
//! failure, 4 prediction tolerance exceeded, 5 synthesis unsupported,
//! 6 compliance failure. Reports go to stdout, diagnostics to stderr, data
//! only to `--out` paths.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::csv_io::{export_csv, export_material_csv, parse_material_csv, parse_response_csv};
use crate::design::DesignFile;
use crate::error::Error;
use crate::extraction::{extract_from_raw, predict, ExtractOptions};
use crate::material::MaterialModel;
use crate::synthesis::{
    affine_loss, check_compliance, fit_line, solve_diameter_ratio, solve_length_for_slope,
    ComplianceReport, ComplianceTargets,
};
use crate::touchstone::{parse_s2p, symmetrize, write_s2p, DataFormat, FreqUnit, RawTwoPort};
use crate::txline::{
    characteristic_impedance, magnitude_db, s_params_model, CoaxGeometry, FrequencyGrid,
    TwoPortResponse,
};
use crate::constants::DB_PER_NEPER;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_EXTRACTION: i32 = 3;
pub const EXIT_TOLERANCE: i32 = 4;
pub const EXIT_SYNTHESIS: i32 = 5;
pub const EXIT_COMPLIANCE: i32 = 6;

/// Default relative |S21| deviation accepted by `predict --compare`.
pub const DEFAULT_PREDICT_TOL: f64 = 0.10;

#[derive(Debug, Parser)]
#[command(
    name = "coaxfilt",
    version,
    about = "Model, invert, predict and synthesize matched coaxial powder filters"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the S-parameters of a filter described by a design file.
    Model(ModelArgs),
    /// Extract effective material parameters from a measured .s2p file.
    Extract(ExtractArgs),
    /// Predict the response of a filter of new dimensions from a material CSV.
    Predict(PredictArgs),
    /// Solve diameter ratio and/or length for impedance and slope targets.
    Synth(SynthArgs),
    /// Check a response against reflection and attenuation-slope targets.
    Check(CheckArgs),
    /// Convert a Touchstone file between data formats and frequency units.
    Convert(ConvertArgs),
}

#[derive(Debug, Args)]
struct GeometryArgs {
    /// Line length, meters.
    #[arg(long = "length", allow_negative_numbers = true)]
    length_m: f64,
    /// Inner conductor diameter, meters.
    #[arg(long = "inner-d", allow_negative_numbers = true)]
    inner_d_m: f64,
    /// Outer conductor diameter, meters.
    #[arg(long = "outer-d", allow_negative_numbers = true)]
    outer_d_m: f64,
}

impl GeometryArgs {
    fn geometry(&self) -> Result<CoaxGeometry, CliError> {
        CoaxGeometry::new(self.length_m, self.inner_d_m, self.outer_d_m).map_err(CliError::input)
    }
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Design file (TOML).
    design: PathBuf,
    /// Output path; `.s2p` writes Touchstone, anything else CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    /// Measured two-port Touchstone file.
    measured: PathBuf,
    #[command(flatten)]
    geometry: GeometryArgs,
    /// Odd moving-median window applied to the extracted table.
    #[arg(long, default_value_t = 1)]
    smooth_window: usize,
    /// Material CSV output path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PredictArgs {
    /// Material CSV (f_hz,eps_rel,mu_rel,alpha_np_per_m).
    material: PathBuf,
    #[command(flatten)]
    geometry: GeometryArgs,
    /// Frequency grid `START:STOP:N` in Hz, linear. Defaults to the
    /// material's own sample frequencies.
    #[arg(long)]
    grid: Option<String>,
    /// Reference impedance, ohms.
    #[arg(long, default_value_t = 50.0)]
    z0: f64,
    /// Output path; `.s2p` writes Touchstone, anything else CSV.
    #[arg(long)]
    out: PathBuf,
    /// Measured .s2p of the new filter to compare |S21| against.
    #[arg(long)]
    compare: Option<PathBuf>,
    /// Maximum accepted relative |S21| deviation for --compare.
    #[arg(long, default_value_t = DEFAULT_PREDICT_TOL)]
    tol: f64,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Material CSV.
    material: PathBuf,
    /// Target characteristic impedance, ohms.
    #[arg(long)]
    target_z: Option<f64>,
    /// Target transmission slope magnitude, dB/GHz (matched line).
    #[arg(long)]
    slope_db_per_ghz: Option<f64>,
    /// Frequency at which the impedance is solved. Defaults to the first
    /// material sample.
    #[arg(long)]
    f_ref: Option<f64>,
    /// Inner conductor diameter, meters; prints the matching outer diameter.
    #[arg(long = "inner-d")]
    inner_d_m: Option<f64>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Response file: `.csv` (response CSV) or Touchstone.
    response: PathBuf,
    #[arg(long, default_value_t = -20.0, allow_negative_numbers = true)]
    reflection_ceiling_db: f64,
    #[arg(long, default_value_t = 20e9)]
    band_max_hz: f64,
    #[arg(long, default_value_t = 1.0)]
    slope_db_per_ghz: f64,
    /// Relative tolerance on the fitted slope.
    #[arg(long)]
    slope_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Ri,
    Ma,
    Db,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum UnitArg {
    Hz,
    Khz,
    Mhz,
    Ghz,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    input: PathBuf,
    output: PathBuf,
    #[arg(long, value_enum, default_value = "ri")]
    to: FormatArg,
    #[arg(long, value_enum, default_value = "ghz")]
    unit: UnitArg,
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn input(e: impl std::fmt::Display) -> Self {
        Self::new(EXIT_INPUT, e.to_string())
    }

    /// Exit code for a library error outside any command-specific mapping.
    fn from_core(e: Error) -> Self {
        let code = match e {
            Error::SingularNetwork(_)
            | Error::SingularInversion(_)
            | Error::NonPassiveData(_)
            | Error::OpenCircuit
            | Error::UnphysicalPoint { .. } => EXIT_NUMERIC,
            Error::ExtractionFailed { .. } | Error::BranchAmbiguity { .. } => EXIT_EXTRACTION,
            Error::UnsupportedMaterial(_) | Error::NoSolution(_) => EXIT_SYNTHESIS,
            _ => EXIT_INPUT,
        };
        let mut message = e.to_string();
        if let Error::ExtractionFailed { diagnostics, .. } = &e {
            for d in diagnostics {
                message.push_str("\n  ");
                message.push_str(d);
            }
        }
        Self::new(code, message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::from_core(e)
    }
}

type CliResult = Result<i32, CliError>;

/// Parses `args` (including the program name) and runs one command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Model(a) => cmd_model(&a),
        Command::Extract(a) => cmd_extract(&a),
        Command::Predict(a) => cmd_predict(&a),
        Command::Synth(a) => cmd_synth(&a),
        Command::Check(a) => cmd_check(&a),
        Command::Convert(a) => cmd_convert(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn with_path(path: &Path, e: Error) -> CliError {
    let mut err = CliError::from_core(e);
    err.message = format!("{}: {}", path.display(), err.message);
    err
}

fn load_s2p(path: &Path) -> Result<RawTwoPort, CliError> {
    parse_s2p(&read_text(path)?).map_err(|e| with_path(path, e))
}

fn load_material(path: &Path) -> Result<MaterialModel, CliError> {
    parse_material_csv(&read_text(path)?).map_err(|e| with_path(path, e))
}

fn is_touchstone(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("s2p"))
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn write_response(path: &Path, resp: &TwoPortResponse) -> Result<(), CliError> {
    let text = if is_touchstone(path) {
        write_s2p(&RawTwoPort::from_symmetric(resp), FreqUnit::GHz, DataFormat::Ri)
    } else {
        export_csv(resp)
    };
    write_text(path, &text)
}

fn parse_grid_spec(spec: &str) -> Result<FrequencyGrid, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::input(format!("--grid expects START:STOP:N, got `{spec}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    FrequencyGrid::linear(start, stop, n).map_err(CliError::input)
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn summarize_response(out: &mut String, resp: &TwoPortResponse) {
    let f = resp.grid.points();
    if f.is_empty() {
        let _ = writeln!(out, "points: 0");
        return;
    }
    let worst = resp.s11.iter().map(|&s| magnitude_db(s)).fold(f64::NEG_INFINITY, f64::max);
    let _ = writeln!(out, "points: {}", f.len());
    let _ = writeln!(out, "band: {:.6e} Hz .. {:.6e} Hz", f[0], f[f.len() - 1]);
    let _ = writeln!(out, "z0: {} ohm", resp.z0_ohm);
    let _ = writeln!(out, "s21 at first point: {:.6} dB", magnitude_db(resp.s21[0]));
    let _ = writeln!(out, "s21 at last point: {:.6} dB", magnitude_db(resp.s21[f.len() - 1]));
    let _ = writeln!(out, "worst s11: {worst:.6} dB");
}

fn cmd_model(a: &ModelArgs) -> CliResult {
    let design = DesignFile::load(&a.design).map_err(CliError::input)?;
    let resp = s_params_model(&design.geometry, &design.material, &design.grid, design.z0_ohm)?;
    write_response(&a.out, &resp)?;
    let mut out = String::new();
    let _ = writeln!(out, "model: {}", a.design.display());
    let g = &design.geometry;
    let _ = writeln!(
        out,
        "geometry: length {} m, inner {} m, outer {} m",
        g.length_m, g.inner_d_m, g.outer_d_m
    );
    if let Some(&f0) = design.grid.points().first() {
        let z = characteristic_impedance(g, &design.material, f0)?;
        let _ = writeln!(out, "line impedance at first point: {z:.6} ohm");
    }
    summarize_response(&mut out, &resp);
    if let Ok(rep) = check_compliance(&resp, &design.targets) {
        let _ = writeln!(
            out,
            "design targets: reflection {}, slope {} ({:.6} dB/GHz)",
            pass_fail(rep.reflection_pass),
            pass_fail(rep.slope_pass),
            rep.fitted_slope_db_per_ghz
        );
    }
    let _ = writeln!(out, "wrote {}", a.out.display());
    print!("{out}");
    Ok(EXIT_OK)
}

fn cmd_extract(a: &ExtractArgs) -> CliResult {
    let geom = a.geometry.geometry()?;
    if geom.length_m <= 0.0 {
        return Err(CliError::input("--length must be > 0 for extraction"));
    }
    if a.smooth_window == 0 || a.smooth_window.is_multiple_of(2) {
        return Err(CliError::input(format!(
            "--smooth-window must be odd and >= 1, got {}",
            a.smooth_window
        )));
    }
    let raw = load_s2p(&a.measured)?;
    let opts = ExtractOptions {
        smooth_window: a.smooth_window,
    };
    let report = extract_from_raw(&raw, &geom, opts).map_err(|e| match e {
        Error::InvalidGeometry(_) | Error::InvalidInput(_) | Error::InvalidGrid(_) => CliError::input(e),
        other => {
            let mut err = CliError::from_core(other);
            err.code = EXIT_EXTRACTION;
            err
        }
    })?;
    write_text(&a.out, &export_material_csv(&report.material))?;
    let mut out = String::new();
    let _ = writeln!(out, "extract: {}", a.measured.display());
    let _ = writeln!(out, "points: {}", report.total_points);
    let _ = writeln!(out, "material samples: {}", report.material.samples().len());
    let _ = writeln!(out, "asymmetry_max: {:.6e}", report.asymmetry_max);
    let _ = writeln!(out, "flagged points: {}", report.flags.len());
    let _ = writeln!(out, "unusable points: {}", report.unusable_count());
    let _ = writeln!(out, "smoothing window: {}", a.smooth_window);
    for f in &report.flags {
        let _ = writeln!(out, "  {f}");
    }
    let _ = writeln!(out, "wrote {}", a.out.display());
    print!("{out}");
    Ok(EXIT_OK)
}

/// Max and mean relative |S21| deviation of `pred` from `meas` on the same grid.
pub fn s21_deviation(pred: &TwoPortResponse, meas: &TwoPortResponse) -> (f64, f64) {
    let mut max = 0f64;
    let mut sum = 0.0;
    for (p, m) in pred.s21.iter().zip(&meas.s21) {
        let dev = (p.norm() - m.norm()).abs() / m.norm();
        max = max.max(dev);
        sum += dev;
    }
    (max, sum / pred.s21.len().max(1) as f64)
}

fn cmd_predict(a: &PredictArgs) -> CliResult {
    let geom = a.geometry.geometry()?;
    let material = load_material(&a.material)?;
    if !(a.tol >= 0.0) {
        return Err(CliError::input(format!("--tol must be >= 0, got {}", a.tol)));
    }
    let grid = match &a.grid {
        Some(spec) => parse_grid_spec(spec)?,
        None if material.is_constant() => FrequencyGrid::linear(1e7, 2e10, 2001)?,
        None => FrequencyGrid::new(material.samples().iter().map(|s| s.f_hz).collect())?,
    };
    let resp = predict(&material, &geom, &grid, a.z0).map_err(CliError::input)?;
    write_response(&a.out, &resp)?;
    let mut out = String::new();
    let _ = writeln!(out, "predict: {}", a.material.display());
    let _ = writeln!(
        out,
        "geometry: length {} m, inner {} m, outer {} m",
        geom.length_m, geom.inner_d_m, geom.outer_d_m
    );
    summarize_response(&mut out, &resp);
    let _ = writeln!(out, "wrote {}", a.out.display());
    let mut code = EXIT_OK;
    if let Some(path) = &a.compare {
        let (full, _) = symmetrize(&load_s2p(path)?);
        // compare only where the material table is defined
        let keep: Vec<usize> = (0..full.len())
            .filter(|&i| material.covers(full.grid.points()[i]))
            .collect();
        if keep.is_empty() {
            return Err(CliError::input(format!(
                "{}: no comparison frequency lies inside the material range",
                path.display()
            )));
        }
        let meas = TwoPortResponse::new(
            FrequencyGrid::new(keep.iter().map(|&i| full.grid.points()[i]).collect())?,
            keep.iter().map(|&i| full.s11[i]).collect(),
            keep.iter().map(|&i| full.s21[i]).collect(),
            full.z0_ohm,
        )?;
        if meas.s21.iter().any(|s| s.norm() == 0.0) {
            return Err(CliError::input(format!(
                "{}: zero |S21| in comparison data",
                path.display()
            )));
        }
        let at_meas = predict(&material, &geom, &meas.grid, meas.z0_ohm).map_err(CliError::input)?;
        let (max, mean) = s21_deviation(&at_meas, &meas);
        let ok = max <= a.tol;
        let _ = writeln!(out, "compare: {} ({} of {} points)", path.display(), meas.len(), full.len());
        let _ = writeln!(out, "max relative |S21| deviation: {max:.6e}");
        let _ = writeln!(out, "mean relative |S21| deviation: {mean:.6e}");
        let _ = writeln!(out, "tolerance: {} -> {}", a.tol, pass_fail(ok));
        if !ok {
            code = EXIT_TOLERANCE;
        }
    }
    print!("{out}");
    Ok(code)
}

fn cmd_synth(a: &SynthArgs) -> CliResult {
    if a.target_z.is_none() && a.slope_db_per_ghz.is_none() {
        return Err(CliError::input(
            "nothing to solve: give --target-z and/or --slope-db-per-ghz",
        ));
    }
    let material = load_material(&a.material)?;
    let f_ref = a.f_ref.unwrap_or_else(|| {
        if material.is_constant() {
            1e9
        } else {
            material.samples()[0].f_hz
        }
    });
    let mut out = String::new();
    let _ = writeln!(out, "synth: {}", a.material.display());
    let _ = writeln!(out, "f_ref: {f_ref:.6e} Hz");
    if let Some(z) = a.target_z {
        let ratio = solve_diameter_ratio(z, &material, f_ref).map_err(CliError::input)?;
        // verify through the forward impedance formula
        let check = CoaxGeometry::new(1.0, 1.0, ratio)?;
        let z_back = characteristic_impedance(&check, &material, f_ref)?;
        let _ = writeln!(out, "diameter ratio D/d: {ratio:.12}");
        let _ = writeln!(out, "impedance at f_ref: {z_back:.9} ohm (target {z})");
        if let Some(d) = a.inner_d_m {
            let _ = writeln!(out, "outer diameter for inner {d} m: {:.9e} m", ratio * d);
        }
    }
    if let Some(slope) = a.slope_db_per_ghz {
        let length = solve_length_for_slope(slope, &material).map_err(|e| match e {
            Error::InvalidInput(_) => CliError::input(e),
            other => CliError::new(EXIT_SYNTHESIS, other.to_string()),
        })?;
        let (_, a1) = affine_loss(&material)?;
        let achieved = achieved_slope(&material, length)?;
        let _ = writeln!(out, "loss slope: {:.9e} Np/m/GHz", a1 * 1e9);
        let _ = writeln!(out, "length: {length:.9e} m");
        let _ = writeln!(out, "achieved slope: {achieved:.9} dB/GHz (target {slope})");
    }
    print!("{out}");
    Ok(EXIT_OK)
}

/// Matched-line dB slope of a line of `length_m` fitted over the material table.
fn achieved_slope(material: &MaterialModel, length_m: f64) -> Result<f64, CliError> {
    let x: Vec<f64> = material.samples().iter().map(|s| s.f_hz / 1e9).collect();
    let y: Vec<f64> = material
        .samples()
        .iter()
        .map(|s| DB_PER_NEPER * s.alpha_np_per_m * length_m)
        .collect();
    Ok(fit_line(&x, &y)?.slope)
}

fn format_report(out: &mut String, rep: &ComplianceReport, t: &ComplianceTargets, tol_default: bool) {
    let _ = writeln!(out, "in-band points: {} (f <= {:.6e} Hz)", rep.in_band_points, t.band_max_hz);
    let _ = writeln!(
        out,
        "reflection: worst {:.6} dB at {:.6e} Hz, ceiling {} dB -> {}",
        rep.worst_reflection_db,
        rep.worst_reflection_hz,
        t.reflection_ceiling_db,
        pass_fail(rep.reflection_pass)
    );
    let _ = writeln!(
        out,
        "slope: fitted {:.9} dB/GHz, intercept {:.6} dB, target {} dB/GHz -> {}",
        rep.fitted_slope_db_per_ghz,
        rep.fitted_intercept_db,
        t.slope_target_db_per_ghz,
        pass_fail(rep.slope_pass)
    );
    let _ = writeln!(out, "max linearity residual: {:.6} dB", rep.max_linearity_residual_db);
    let _ = writeln!(
        out,
        "slope tolerance: {}{}",
        t.slope_tolerance_rel,
        if tol_default {
            " (default; tool choice, not a published figure)"
        } else {
            ""
        }
    );
    let _ = writeln!(out, "overall: {}", pass_fail(rep.passed()));
}

fn load_response(path: &Path) -> Result<TwoPortResponse, CliError> {
    if is_csv(path) {
        parse_response_csv(&read_text(path)?, 50.0).map_err(|e| with_path(path, e))
    } else {
        Ok(symmetrize(&load_s2p(path)?).0)
    }
}

fn cmd_check(a: &CheckArgs) -> CliResult {
    let resp = load_response(&a.response)?;
    let targets = ComplianceTargets {
        reflection_ceiling_db: a.reflection_ceiling_db,
        band_max_hz: a.band_max_hz,
        slope_target_db_per_ghz: a.slope_db_per_ghz,
        slope_tolerance_rel: a.slope_tol.unwrap_or(ComplianceTargets::default().slope_tolerance_rel),
    };
    let rep = check_compliance(&resp, &targets).map_err(CliError::input)?;
    let mut out = String::new();
    let _ = writeln!(out, "check: {}", a.response.display());
    format_report(&mut out, &rep, &targets, a.slope_tol.is_none());
    print!("{out}");
    Ok(if rep.passed() { EXIT_OK } else { EXIT_COMPLIANCE })
}

fn cmd_convert(a: &ConvertArgs) -> CliResult {
    let raw = load_s2p(&a.input)?;
    let format = match a.to {
        FormatArg::Ri => DataFormat::Ri,
        FormatArg::Ma => DataFormat::Ma,
        FormatArg::Db => DataFormat::Db,
    };
    let unit = match a.unit {
        UnitArg::Hz => FreqUnit::Hz,
        UnitArg::Khz => FreqUnit::KHz,
        UnitArg::Mhz => FreqUnit::MHz,
        UnitArg::Ghz => FreqUnit::GHz,
    };
    write_text(&a.output, &write_s2p(&raw, unit, format))?;
    println!(
        "converted {} points to {} {} -> {}",
        raw.len(),
        format.keyword(),
        unit.keyword(),
        a.output.display()
    );
    Ok(EXIT_OK)
}
