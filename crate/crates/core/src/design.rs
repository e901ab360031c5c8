//! Design files.
//!
//! A design is a TOML document:
//!
//! ```toml
//! z0_ohm = 50.0                # optional, default 50
//!
//! [geometry]
//! length_m = 0.042
//! inner_d_m = 1.27e-3
//! outer_d_m = 6.73e-3
//!
//! [material]                   # either `path` or `samples`
//! path = "material.csv"        # relative to the design file
//! # samples = [{ f_hz = 1e9, eps_rel = 4.0, mu_rel = 1.0, alpha_np_per_m = 2.0 }]
//!
//! [grid]                       # optional, defaults shown
//! f_start_hz = 1e7
//! f_stop_hz = 2e10
//! n_points = 2001
//! spacing = "linear"
//!
//! [targets]                    # optional, defaults shown
//! reflection_ceiling_db = -20.0
//! band_max_hz = 2e10
//! slope_target_db_per_ghz = 1.0
//! slope_tolerance_rel = 0.1
//! ```
//!
//! Every error names the offending field by its dotted path.

use std::path::Path;

use toml::{Table, Value};

use crate::csv_io::parse_material_csv;
use crate::material::{MaterialModel, MaterialSample};
use crate::synthesis::ComplianceTargets;
use crate::txline::{CoaxGeometry, FrequencyGrid};

pub const DEFAULT_F_START_HZ: f64 = 1e7;
pub const DEFAULT_F_STOP_HZ: f64 = 2e10;
pub const DEFAULT_N_POINTS: usize = 2001;

#[derive(Debug, Clone, PartialEq)]
pub struct DesignFile {
    pub geometry: CoaxGeometry,
    pub material: MaterialModel,
    pub z0_ohm: f64,
    pub grid: FrequencyGrid,
    pub targets: ComplianceTargets,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{path}: {msg}")]
pub struct DesignError {
    pub path: String,
    pub msg: String,
}

fn err(path: impl Into<String>, msg: impl Into<String>) -> DesignError {
    DesignError {
        path: path.into(),
        msg: msg.into(),
    }
}

/// A table together with its dotted location in the document.
struct Section<'a> {
    table: &'a Table,
    prefix: String,
}

impl<'a> Section<'a> {
    fn path(&self, key: &str) -> String {
        if self.prefix.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.prefix)
        }
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.table.get(key)
    }

    fn opt_f64(&self, key: &str) -> Result<Option<f64>, DesignError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Float(v)) => Ok(Some(*v)),
            Some(Value::Integer(v)) => Ok(Some(*v as f64)),
            Some(other) => Err(err(
                self.path(key),
                format!("expected a number, found {}", other.type_str()),
            )),
        }
    }

    fn f64(&self, key: &str) -> Result<f64, DesignError> {
        self.opt_f64(key)?
            .ok_or_else(|| err(self.path(key), "missing required field"))
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, DesignError> {
        Ok(self.opt_f64(key)?.unwrap_or(default))
    }

    fn opt_str(&self, key: &str) -> Result<Option<&'a str>, DesignError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(err(
                self.path(key),
                format!("expected a string, found {}", other.type_str()),
            )),
        }
    }

    fn sub(&self, key: &str, required: bool) -> Result<Option<Section<'a>>, DesignError> {
        match self.get(key) {
            None if required => Err(err(self.path(key), "missing required section")),
            None => Ok(None),
            Some(Value::Table(t)) => Ok(Some(Section {
                table: t,
                prefix: self.path(key),
            })),
            Some(other) => Err(err(
                self.path(key),
                format!("expected a table, found {}", other.type_str()),
            )),
        }
    }

    fn reject_unknown(&self, known: &[&str]) -> Result<(), DesignError> {
        match self.table.keys().find(|k| !known.contains(&k.as_str())) {
            Some(k) => Err(err(self.path(k), "unknown field")),
            None => Ok(()),
        }
    }
}

impl DesignFile {
    pub fn load(path: &Path) -> Result<Self, DesignError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| err(path.display().to_string(), e.to_string()))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Parses a design document; material paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, DesignError> {
        let doc: Table = text
            .parse()
            .map_err(|e: toml::de::Error| err("<document>", e.message().to_string()))?;
        let root = Section {
            table: &doc,
            prefix: String::new(),
        };
        root.reject_unknown(&["z0_ohm", "geometry", "material", "grid", "targets"])?;

        let z0_ohm = root.f64_or("z0_ohm", 50.0)?;
        if !(z0_ohm > 0.0 && z0_ohm.is_finite()) {
            return Err(err("z0_ohm", format!("must be > 0, got {z0_ohm}")));
        }

        let g = root.sub("geometry", true)?.expect("required");
        g.reject_unknown(&["length_m", "inner_d_m", "outer_d_m"])?;
        let length_m = g.f64("length_m")?;
        let inner_d_m = g.f64("inner_d_m")?;
        let outer_d_m = g.f64("outer_d_m")?;
        if !(length_m >= 0.0 && length_m.is_finite()) {
            return Err(err(g.path("length_m"), format!("must be >= 0, got {length_m}")));
        }
        if !(inner_d_m > 0.0 && inner_d_m.is_finite()) {
            return Err(err(g.path("inner_d_m"), format!("must be > 0, got {inner_d_m}")));
        }
        if !(outer_d_m > inner_d_m && outer_d_m.is_finite()) {
            return Err(err(
                g.path("outer_d_m"),
                format!("must exceed inner_d_m ({inner_d_m}), got {outer_d_m}"),
            ));
        }
        let geometry = CoaxGeometry::new(length_m, inner_d_m, outer_d_m)
            .map_err(|e| err("geometry", e.to_string()))?;

        let material = parse_material(&root.sub("material", true)?.expect("required"), base_dir)?;
        let grid = parse_grid(root.sub("grid", false)?)?;
        let targets = parse_targets(root.sub("targets", false)?)?;

        Ok(Self {
            geometry,
            material,
            z0_ohm,
            grid,
            targets,
        })
    }
}

fn parse_material(m: &Section<'_>, base_dir: &Path) -> Result<MaterialModel, DesignError> {
    m.reject_unknown(&["path", "samples"])?;
    match (m.opt_str("path")?, m.get("samples")) {
        (Some(_), Some(_)) => Err(err(m.path("path"), "give either `path` or `samples`, not both")),
        (None, None) => Err(err(m.path("samples"), "missing: give `path` or `samples`")),
        (Some(p), None) => {
            let full = base_dir.join(p);
            let text = std::fs::read_to_string(&full)
                .map_err(|e| err(m.path("path"), format!("{}: {e}", full.display())))?;
            parse_material_csv(&text).map_err(|e| err(m.path("path"), format!("{}: {e}", full.display())))
        }
        (None, Some(Value::Array(items))) => {
            let mut samples = Vec::with_capacity(items.len());
            for (i, item) in items.iter().enumerate() {
                let prefix = format!("{}[{i}]", m.path("samples"));
                let Value::Table(t) = item else {
                    return Err(err(prefix, "expected a table"));
                };
                let s = Section { table: t, prefix };
                s.reject_unknown(&["f_hz", "eps_rel", "mu_rel", "alpha_np_per_m"])?;
                let sample = MaterialSample::new(
                    s.f64("f_hz")?,
                    s.f64("eps_rel")?,
                    s.f64("mu_rel")?,
                    s.f64("alpha_np_per_m")?,
                );
                sample.validate().map_err(|e| err(s.prefix.clone(), e.to_string()))?;
                samples.push(sample);
            }
            MaterialModel::new(samples).map_err(|e| err(m.path("samples"), e.to_string()))
        }
        (None, Some(other)) => Err(err(
            m.path("samples"),
            format!("expected an array of tables, found {}", other.type_str()),
        )),
    }
}

fn parse_grid(section: Option<Section<'_>>) -> Result<FrequencyGrid, DesignError> {
    let Some(g) = section else {
        return FrequencyGrid::linear(DEFAULT_F_START_HZ, DEFAULT_F_STOP_HZ, DEFAULT_N_POINTS)
            .map_err(|e| err("grid", e.to_string()));
    };
    g.reject_unknown(&["f_start_hz", "f_stop_hz", "n_points", "spacing"])?;
    let start = g.f64_or("f_start_hz", DEFAULT_F_START_HZ)?;
    let stop = g.f64_or("f_stop_hz", DEFAULT_F_STOP_HZ)?;
    if !(start > 0.0) {
        return Err(err(g.path("f_start_hz"), format!("must be > 0, got {start}")));
    }
    if !(stop >= start) {
        return Err(err(g.path("f_stop_hz"), format!("must be >= f_start_hz, got {stop}")));
    }
    let n = match g.get("n_points") {
        None => DEFAULT_N_POINTS,
        Some(Value::Integer(v)) if *v >= 1 => *v as usize,
        Some(v) => {
            return Err(err(
                g.path("n_points"),
                format!("expected a positive integer, found {v}"),
            ))
        }
    };
    match g.opt_str("spacing")? {
        None | Some("linear") => {}
        Some(other) => {
            return Err(err(
                g.path("spacing"),
                format!("only \"linear\" is supported, got \"{other}\""),
            ))
        }
    }
    FrequencyGrid::linear(start, stop, n).map_err(|e| err("grid", e.to_string()))
}

fn parse_targets(section: Option<Section<'_>>) -> Result<ComplianceTargets, DesignError> {
    let d = ComplianceTargets::default();
    let Some(t) = section else {
        return Ok(d);
    };
    t.reject_unknown(&[
        "reflection_ceiling_db",
        "band_max_hz",
        "slope_target_db_per_ghz",
        "slope_tolerance_rel",
    ])?;
    let targets = ComplianceTargets {
        reflection_ceiling_db: t.f64_or("reflection_ceiling_db", d.reflection_ceiling_db)?,
        band_max_hz: t.f64_or("band_max_hz", d.band_max_hz)?,
        slope_target_db_per_ghz: t.f64_or("slope_target_db_per_ghz", d.slope_target_db_per_ghz)?,
        slope_tolerance_rel: t.f64_or("slope_tolerance_rel", d.slope_tolerance_rel)?,
    };
    if !(targets.reflection_ceiling_db < 0.0) {
        return Err(err(t.path("reflection_ceiling_db"), "must be < 0"));
    }
    if !(targets.band_max_hz > 0.0) {
        return Err(err(t.path("band_max_hz"), "must be > 0"));
    }
    if !(targets.slope_target_db_per_ghz >= 0.0) {
        return Err(err(t.path("slope_target_db_per_ghz"), "must be >= 0"));
    }
    if !(targets.slope_tolerance_rel >= 0.0) {
        return Err(err(t.path("slope_tolerance_rel"), "must be >= 0"));
    }
    Ok(targets)
}
