//! Two-port Touchstone v1 (`.s2p`) reading and writing.
//!
//! Data rows are `f S11 S21 S12 S22`, each parameter a pair in the format
//! named by the option line (`RI`, `MA` or `DB`; angles in degrees).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::txline::{magnitude_db, FrequencyGrid, TwoPortResponse};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreqUnit {
    Hz,
    KHz,
    MHz,
    GHz,
}

impl FreqUnit {
    pub fn scale(self) -> f64 {
        match self {
            FreqUnit::Hz => 1.0,
            FreqUnit::KHz => 1e3,
            FreqUnit::MHz => 1e6,
            FreqUnit::GHz => 1e9,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            FreqUnit::Hz => "HZ",
            FreqUnit::KHz => "KHZ",
            FreqUnit::MHz => "MHZ",
            FreqUnit::GHz => "GHZ",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "HZ" => Some(FreqUnit::Hz),
            "KHZ" => Some(FreqUnit::KHz),
            "MHZ" => Some(FreqUnit::MHz),
            "GHZ" => Some(FreqUnit::GHz),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    /// Real, imaginary.
    Ri,
    /// Linear magnitude, angle in degrees.
    Ma,
    /// 20·log10 magnitude, angle in degrees.
    Db,
}

impl DataFormat {
    pub fn keyword(self) -> &'static str {
        match self {
            DataFormat::Ri => "RI",
            DataFormat::Ma => "MA",
            DataFormat::Db => "DB",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RI" => Some(DataFormat::Ri),
            "MA" => Some(DataFormat::Ma),
            "DB" => Some(DataFormat::Db),
            _ => None,
        }
    }

    fn decode(self, a: f64, b: f64) -> C64 {
        match self {
            DataFormat::Ri => C64::new(a, b),
            DataFormat::Ma => C64::from_polar(a, b.to_radians()),
            DataFormat::Db => C64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
        }
    }

    fn encode(self, s: C64) -> (f64, f64) {
        match self {
            DataFormat::Ri => (s.re, s.im),
            DataFormat::Ma => (s.norm(), s.arg().to_degrees()),
            DataFormat::Db => (magnitude_db(s), s.arg().to_degrees()),
        }
    }
}

/// Four-parameter two-port exactly as read from a file.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTwoPort {
    pub grid: FrequencyGrid,
    pub s11: Vec<C64>,
    pub s21: Vec<C64>,
    pub s12: Vec<C64>,
    pub s22: Vec<C64>,
    pub z0_ohm: f64,
}

impl RawTwoPort {
    /// Reciprocal symmetric two-port from a [`TwoPortResponse`].
    pub fn from_symmetric(resp: &TwoPortResponse) -> Self {
        Self {
            grid: resp.grid.clone(),
            s11: resp.s11.clone(),
            s21: resp.s21.clone(),
            s12: resp.s21.clone(),
            s22: resp.s11.clone(),
            z0_ohm: resp.z0_ohm,
        }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

struct OptionLine {
    unit: FreqUnit,
    format: DataFormat,
    z0: f64,
}

fn parse_option_line(body: &str, line: usize) -> Result<OptionLine> {
    let mut opt = OptionLine {
        unit: FreqUnit::GHz,
        format: DataFormat::Ma,
        z0: 50.0,
    };
    let mut tokens = body.split_whitespace();
    while let Some(tok) = tokens.next() {
        if let Some(u) = FreqUnit::from_keyword(tok) {
            opt.unit = u;
        } else if let Some(f) = DataFormat::from_keyword(tok) {
            opt.format = f;
        } else if tok.eq_ignore_ascii_case("S") {
        } else if matches!(tok.to_ascii_uppercase().as_str(), "Y" | "Z" | "H" | "G") {
            return Err(Error::parse(
                line,
                format!("unsupported parameter type `{tok}`, only S is accepted"),
            ));
        } else if tok.eq_ignore_ascii_case("R") {
            let v = tokens
                .next()
                .ok_or_else(|| Error::parse(line, "option `R` needs a reference impedance"))?;
            let z0: f64 = v
                .parse()
                .map_err(|_| Error::parse(line, format!("bad reference impedance `{v}`")))?;
            if !(z0 > 0.0 && z0.is_finite()) {
                return Err(Error::parse(line, format!("reference impedance must be > 0, got {v}")));
            }
            opt.z0 = z0;
        } else {
            return Err(Error::parse(line, format!("unknown option `{tok}`")));
        }
    }
    Ok(opt)
}

/// Parses a Touchstone v1 two-port file. Error line numbers are 1-based.
pub fn parse_s2p(text: &str) -> Result<RawTwoPort> {
    let mut option: Option<OptionLine> = None;
    let mut freqs = Vec::new();
    let (mut s11, mut s21, mut s12, mut s22) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('!').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(body) = content.strip_prefix('#') {
            if option.is_some() {
                return Err(Error::parse(line, "duplicate option line"));
            }
            option = Some(parse_option_line(body, line)?);
            continue;
        }
        let opt = option
            .as_ref()
            .ok_or_else(|| Error::parse(line, "data before option line (missing `#` line)"))?;
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.len() != 9 {
            return Err(Error::parse(
                line,
                format!("expected 9 values, found {}", tokens.len()),
            ));
        }
        let mut vals = [0f64; 9];
        for (v, t) in vals.iter_mut().zip(&tokens) {
            *v = t
                .parse()
                .ok()
                .filter(|x: &f64| x.is_finite())
                .ok_or_else(|| Error::parse(line, format!("unparseable number `{t}`")))?;
        }
        let f = vals[0] * opt.unit.scale();
        if f <= 0.0 {
            return Err(Error::parse(line, format!("frequency must be positive, got {}", vals[0])));
        }
        if let Some(&prev) = freqs.last() {
            if f <= prev {
                return Err(Error::parse(line, "frequency not strictly increasing"));
            }
        }
        freqs.push(f);
        let fmt = opt.format;
        s11.push(fmt.decode(vals[1], vals[2]));
        s21.push(fmt.decode(vals[3], vals[4]));
        s12.push(fmt.decode(vals[5], vals[6]));
        s22.push(fmt.decode(vals[7], vals[8]));
    }
    let opt = option.ok_or_else(|| Error::parse(text.lines().count().max(1), "missing option line"))?;
    Ok(RawTwoPort {
        grid: FrequencyGrid::new(freqs)?,
        s11,
        s21,
        s12,
        s22,
        z0_ohm: opt.z0,
    })
}

/// Formats `x` with 12 significant digits.
pub fn fmt_sig(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn write_s2p(raw: &RawTwoPort, unit: FreqUnit, format: DataFormat) -> String {
    let mut out = String::new();
    out.push_str("! two-port S-parameters written by coaxfilt\n");
    let _ = writeln!(
        out,
        "# {} S {} R {}",
        unit.keyword(),
        format.keyword(),
        raw.z0_ohm
    );
    for i in 0..raw.len() {
        out.push_str(&fmt_sig(raw.grid.points()[i] / unit.scale()));
        for s in [raw.s11[i], raw.s21[i], raw.s12[i], raw.s22[i]] {
            let (a, b) = format.encode(s);
            out.push(' ');
            out.push_str(&fmt_sig(a));
            out.push(' ');
            out.push_str(&fmt_sig(b));
        }
        out.push('\n');
    }
    out
}

/// Averages the reciprocal pairs and reports the largest deviation from
/// symmetry.
pub fn symmetrize(raw: &RawTwoPort) -> (TwoPortResponse, f64) {
    let mut asym = 0f64;
    let mut s11 = Vec::with_capacity(raw.len());
    let mut s21 = Vec::with_capacity(raw.len());
    for i in 0..raw.len() {
        asym = asym
            .max((raw.s11[i] - raw.s22[i]).norm())
            .max((raw.s21[i] - raw.s12[i]).norm());
        s11.push((raw.s11[i] + raw.s22[i]) * 0.5);
        s21.push((raw.s21[i] + raw.s12[i]) * 0.5);
    }
    let resp = TwoPortResponse {
        grid: raw.grid.clone(),
        s11,
        s21,
        z0_ohm: raw.z0_ohm,
    };
    (resp, asym)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn ri_example() {
        let raw = parse_s2p("# GHZ S RI R 50\n1.0 0.1 0 0.9 0 0.9 0 0.1 0\n").unwrap();
        assert_eq!(raw.grid.points(), &[1e9]);
        assert_eq!(raw.s11[0], c(0.1, 0.0));
        assert_eq!(raw.s21[0], c(0.9, 0.0));
        assert_eq!(raw.z0_ohm, 50.0);
    }

    #[test]
    fn db_example() {
        let raw = parse_s2p("# HZ S DB R 50\n2e9 -20 0 -3.0103 -90 -3.0103 -90 -20 0\n").unwrap();
        assert_eq!(raw.grid.points(), &[2e9]);
        assert!((raw.s11[0] - c(0.1, 0.0)).norm() < 1e-15);
        // -3.0103 dB is an amplitude of 1/√2 (0.5 is -6.0206 dB)
        assert!((raw.s21[0] - c(0.0, -0.707_106_777_656_652)).norm() < 1e-12, "{}", raw.s21[0]);
        let half = parse_s2p("# HZ S DB R 50\n2e9 -20 0 -6.0206 -90 -6.0206 -90 -20 0\n").unwrap();
        assert!((half.s21[0] - c(0.0, -0.5)).norm() < 1e-5);
    }

    #[test]
    fn defaults_and_case() {
        let raw = parse_s2p("!c\n#  ghz   s   ma\n1 1 0 0.5 90 0.5 90 1 0 ! tail\n").unwrap();
        assert_eq!(raw.z0_ohm, 50.0);
        assert!((raw.s21[0] - c(0.0, 0.5)).norm() < 1e-15);
        let raw = parse_s2p("#\n1 1 0 0.5 90 0.5 90 1 0\n").unwrap();
        assert_eq!(raw.grid.points(), &[1e9]);
    }

    #[test]
    fn short_line_names_line() {
        let err = parse_s2p("# GHZ S RI R 50\n1 0 0 0 0 0 0 0 0\n2 0 0 0 0 0 0 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn symmetrize_examples() {
        let raw = parse_s2p("# GHZ S RI R 50\n1 0.2 0 0.5 0 0.5 0 0.4 0\n").unwrap();
        let (resp, asym) = symmetrize(&raw);
        assert!((resp.s11[0] - c(0.3, 0.0)).norm() < 1e-15);
        assert!((asym - 0.2).abs() < 1e-15);
        let sym = RawTwoPort::from_symmetric(&resp);
        let (again, a2) = symmetrize(&sym);
        assert_eq!(again, resp);
        assert_eq!(a2, 0.0);
    }

    #[test]
    fn empty_round_trip() {
        let raw = RawTwoPort {
            grid: FrequencyGrid::default(),
            s11: vec![],
            s21: vec![],
            s12: vec![],
            s22: vec![],
            z0_ohm: 50.0,
        };
        let text = write_s2p(&raw, FreqUnit::GHz, DataFormat::Ri);
        assert_eq!(parse_s2p(&text).unwrap(), raw);
    }
}
