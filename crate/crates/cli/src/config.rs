//! Run configuration: `key=value` text or a flat JSON object.
//!
//! Every bench has a fixed key schema. Parsing rejects keys outside it,
//! checks every value and fills in the defaults, so a parsed config is
//! complete and serializes back to itself.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nosig_core::wedge::WedgeGeometry;
use nosig_core::AliceMode;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    /// 1-based line in the config text; `None` for command-line flags.
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: ")?,
            None => write!(f, "command line: ")?,
        }
        if let Some(k) = &self.key {
            write!(f, "key `{k}`: ")?;
        }
        f.write_str(&self.message)
    }
}

fn fail(line: Option<usize>, key: Option<&str>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        key: key.map(str::to_string),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BenchKind {
    Polar,
    Mz,
    Wedge,
    Sample,
    Chsh,
    Diffmap,
    Audit,
}

impl BenchKind {
    pub const ALL: [BenchKind; 7] = [
        Self::Polar,
        Self::Mz,
        Self::Wedge,
        Self::Sample,
        Self::Chsh,
        Self::Diffmap,
        Self::Audit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Polar => "polar",
            Self::Mz => "mz",
            Self::Wedge => "wedge",
            Self::Sample => "sample",
            Self::Chsh => "chsh",
            Self::Diffmap => "diffmap",
            Self::Audit => "audit",
        }
    }
}

impl FromStr for BenchKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| format!("unknown bench `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(format!("unknown format `{s}`, expected csv or json")),
        }
    }
}

/// Parses a decimal or a `π` multiple: `pi`, `-pi/4`, `3*pi/8`, `2pi`.
pub fn parse_angle(text: &str) -> Option<f64> {
    let t = text.trim();
    if let Ok(v) = t.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    let (sign, rest) = match t.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, t.strip_prefix('+').unwrap_or(t)),
    };
    let at = rest.find("pi")?;
    let coef = rest[..at].trim().trim_end_matches('*').trim();
    let coef = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().ok()? };
    let tail = rest[at + 2..].trim();
    let denom = if tail.is_empty() {
        1.0
    } else {
        tail.strip_prefix('/')?.trim().parse::<f64>().ok()?
    };
    let v = sign * coef * PI / denom;
    (v.is_finite() && denom != 0.0).then_some(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Angle,
    Angles,
    Count,
    Length,
    Real,
    Flag,
    Mode,
    Source,
    Target,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Angle(f64),
    Angles(Vec<f64>),
    Count(u64),
    Real(f64),
    Flag(bool),
    Word(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Angle(v) | Value::Real(v) => write!(f, "{v:?}"),
            Value::Angles(vs) => {
                let parts: Vec<String> = vs.iter().map(|v| format!("{v:?}")).collect();
                f.write_str(&parts.join(","))
            }
            Value::Count(n) => write!(f, "{n}"),
            Value::Flag(b) => write!(f, "{b}"),
            Value::Word(w) => f.write_str(w),
        }
    }
}

fn parse_value(kind: Kind, raw: &str) -> Result<Value, String> {
    let raw = raw.trim();
    match kind {
        Kind::Angle => parse_angle(raw)
            .map(Value::Angle)
            .ok_or_else(|| format!("`{raw}` is not an angle (decimal radians or k*pi/m)")),
        Kind::Angles => raw
            .split(',')
            .map(|p| parse_angle(p).ok_or_else(|| format!("`{}` is not an angle", p.trim())))
            .collect::<Result<Vec<_>, _>>()
            .map(Value::Angles),
        Kind::Count => raw
            .parse::<u64>()
            .map(Value::Count)
            .map_err(|_| format!("`{raw}` is not a non-negative integer")),
        Kind::Length | Kind::Real => match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Value::Real(v)),
            _ => Err(format!("`{raw}` is not a finite number")),
        },
        Kind::Flag => match raw {
            "true" | "1" | "yes" => Ok(Value::Flag(true)),
            "false" | "0" | "no" => Ok(Value::Flag(false)),
            _ => Err(format!("`{raw}` is not a boolean")),
        },
        Kind::Mode => parse_mode(raw).map(|_| Value::Word(raw.to_string())),
        Kind::Source => match raw {
            "polar" | "mz" => Ok(Value::Word(raw.to_string())),
            _ => Err(format!("`{raw}` is not a source, expected polar or mz")),
        },
        Kind::Target => match raw {
            "polar" | "mz" | "wedge" => Ok(Value::Word(raw.to_string())),
            _ => Err(format!("`{raw}` is not an audit target, expected polar, mz or wedge")),
        },
    }
}

pub fn parse_mode(raw: &str) -> Result<AliceMode, String> {
    AliceMode::ALL
        .into_iter()
        .find(|m| m.label() == raw)
        .ok_or_else(|| format!("`{raw}` is not a splitter mode, expected in, out or stop"))
}

struct KeySpec {
    key: &'static str,
    kind: Kind,
    default: Option<&'static str>,
}

const fn key(key: &'static str, kind: Kind, default: Option<&'static str>) -> KeySpec {
    KeySpec { key, kind, default }
}

const GEOMETRY_KEYS: [KeySpec; 9] = [
    key("wavelength", Kind::Length, None),
    key("beam_sigma", Kind::Length, None),
    key("aperture_halfwidth", Kind::Length, None),
    key("propagation_distance", Kind::Real, None),
    key("tilt_angle", Kind::Angle, None),
    key("detector_halfwidth", Kind::Length, None),
    key("samples_aperture", Kind::Count, None),
    key("samples_detector", Kind::Count, None),
    key("truncate", Kind::Flag, None),
];

fn schema(bench: BenchKind) -> Vec<KeySpec> {
    use Kind::*;
    let mut keys = match bench {
        BenchKind::Polar => vec![
            key("alpha", Angles, Some("0,pi/8,pi/4")),
            key("theta", Angles, None),
            key("grid", Count, Some("101")),
        ],
        BenchKind::Mz => vec![
            key("alpha", Angles, Some("0,pi/8,pi/4")),
            key("phi_a", Angle, Some("0")),
            key("phi_b", Angles, None),
            key("bs_a", Mode, Some("in")),
            key("grid", Count, Some("101")),
        ],
        BenchKind::Wedge => vec![
            key("alpha", Angle, Some("0")),
            key("phi_a", Angle, Some("0")),
            key("phi_b", Angle, Some("0")),
        ],
        BenchKind::Sample => vec![
            key("source", Source, Some("polar")),
            key("alpha", Angle, Some("0")),
            key("theta", Angle, Some("0")),
            key("phi_a", Angle, Some("0")),
            key("phi_b", Angle, Some("0")),
            key("bs_a", Mode, Some("in")),
            key("n", Count, Some("1000")),
            key("seed", Count, Some("0")),
        ],
        BenchKind::Chsh => vec![
            key("alpha", Angle, Some("0")),
            key("angles", Angles, Some("0,pi/8,pi/4,3*pi/8")),
            key("n", Count, Some("1000000")),
            key("seed", Count, Some("0")),
            key("analytic", Flag, Some("false")),
        ],
        BenchKind::Diffmap => vec![
            key("grid", Count, Some("20")),
            key("phi_a", Angle, Some("0")),
        ],
        BenchKind::Audit => vec![
            key("target", Target, None),
            key("grid", Count, None),
            key("tolerance", Real, None),
        ],
    };
    if matches!(bench, BenchKind::Wedge | BenchKind::Diffmap | BenchKind::Audit) {
        keys.extend(GEOMETRY_KEYS);
    }
    keys
}

/// One `key=value` assignment and where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub key: String,
    pub value: String,
    pub line: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub bench: BenchKind,
    pub parameters: BTreeMap<String, Value>,
    /// `-` writes to standard output.
    pub output_path: String,
    pub format: Format,
}

/// Splits config text into assignments without interpreting them.
pub fn parse_assignments(text: &str) -> Result<Vec<Assignment>, ConfigError> {
    if text.trim_start().starts_with('{') {
        return parse_json(text);
    }
    let mut out: Vec<Assignment> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = Some(i + 1);
        let content = raw.split('#').next().unwrap_or("");
        for token in content.split_whitespace() {
            let (k, v) = token
                .split_once('=')
                .ok_or_else(|| fail(line, None, format!("expected key=value, got `{token}`")))?;
            if k.is_empty() {
                return Err(fail(line, None, format!("empty key in `{token}`")));
            }
            if out.iter().any(|a| a.key == k) {
                return Err(fail(line, Some(k), "assigned twice"));
            }
            out.push(Assignment {
                key: k.to_string(),
                value: v.to_string(),
                line,
            });
        }
    }
    Ok(out)
}

fn parse_json(text: &str) -> Result<Vec<Assignment>, ConfigError> {
    let doc: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| fail(Some(e.line()), None, format!("invalid JSON: {e}")))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| fail(Some(1), None, "JSON config must be an object"))?;
    let line_of = |k: &str| {
        let quoted = format!("\"{k}\"");
        text.lines().position(|l| l.contains(&quoted)).map(|i| i + 1)
    };
    let scalar = |v: &serde_json::Value| match v {
        serde_json::Value::String(s) => Some(s.clone()),
        serde_json::Value::Number(n) => Some(n.to_string()),
        serde_json::Value::Bool(b) => Some(b.to_string()),
        _ => None,
    };
    obj.iter()
        .map(|(k, v)| {
            let value = match v {
                serde_json::Value::Array(items) => items
                    .iter()
                    .map(scalar)
                    .collect::<Option<Vec<_>>>()
                    .map(|parts| parts.join(",")),
                other => scalar(other),
            }
            .ok_or_else(|| fail(line_of(k), Some(k), "value must be a string, number, boolean or array of those"))?;
            Ok(Assignment {
                key: k.clone(),
                value,
                line: line_of(k),
            })
        })
        .collect()
}

impl RunConfig {
    /// Validates assignments against the bench schema and fills defaults.
    pub fn from_assignments(assignments: &[Assignment]) -> Result<Self, ConfigError> {
        let bench_assign = assignments
            .iter()
            .find(|a| a.key == "bench")
            .ok_or_else(|| fail(None, Some("bench"), "missing required key"))?;
        let bench: BenchKind = bench_assign
            .value
            .parse()
            .map_err(|e: String| fail(bench_assign.line, Some("bench"), e))?;
        let keys = schema(bench);

        let mut output_path = "-".to_string();
        let mut format = Format::Csv;
        let mut parameters = BTreeMap::new();
        for a in assignments {
            match a.key.as_str() {
                "bench" => {}
                "out" => {
                    if a.value.is_empty() {
                        return Err(fail(a.line, Some("out"), "empty output path"));
                    }
                    output_path = a.value.clone();
                }
                "format" => format = a.value.parse().map_err(|e: String| fail(a.line, Some("format"), e))?,
                k => {
                    let spec = keys.iter().find(|s| s.key == k).ok_or_else(|| {
                        fail(a.line, Some(k), format!("unknown key for bench `{}`", bench.name()))
                    })?;
                    let v = parse_value(spec.kind, &a.value).map_err(|e| fail(a.line, Some(k), e))?;
                    parameters.insert(k.to_string(), v);
                }
            }
        }
        for spec in &keys {
            if let (Some(d), false) = (spec.default, parameters.contains_key(spec.key)) {
                let v = parse_value(spec.kind, d).expect("schema defaults parse");
                parameters.insert(spec.key.to_string(), v);
            }
        }
        let mut cfg = RunConfig {
            bench,
            parameters,
            output_path,
            format,
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&mut self) -> Result<(), ConfigError> {
        let missing = |k: &str| fail(None, Some(k), "missing required key");
        match self.bench {
            BenchKind::Chsh => {
                if self.angles("angles").len() != 4 {
                    return Err(fail(None, Some("angles"), "needs exactly four angles a,b,a',b'"));
                }
            }
            BenchKind::Audit => {
                if !self.parameters.contains_key("target") {
                    return Err(missing("target"));
                }
            }
            _ => {}
        }
        if let Some(Value::Count(0)) = self.parameters.get("grid") {
            return Err(fail(None, Some("grid"), "must be at least 1"));
        }
        if matches!(self.bench, BenchKind::Wedge | BenchKind::Diffmap | BenchKind::Audit) {
            let g = self.geometry_from_parameters();
            for spec in GEOMETRY_KEYS {
                let v = match spec.key {
                    "wavelength" => Value::Real(g.wavelength),
                    "beam_sigma" => Value::Real(g.beam_sigma),
                    "aperture_halfwidth" => Value::Real(g.aperture_halfwidth),
                    "propagation_distance" => Value::Real(g.propagation_distance),
                    "tilt_angle" => Value::Angle(g.tilt_angle),
                    "detector_halfwidth" => Value::Real(g.detector_halfwidth),
                    "samples_aperture" => Value::Count(g.samples_aperture as u64),
                    "samples_detector" => Value::Count(g.samples_detector as u64),
                    _ => Value::Flag(g.truncate),
                };
                self.parameters.insert(spec.key.to_string(), v);
            }
            g.validate().map_err(|e| fail(None, None, format!("geometry: {e}")))?;
        }
        Ok(())
    }

    /// Geometry from the explicit keys over the defaults. Without an
    /// explicit tilt the beams are steered onto the detector centre.
    fn geometry_from_parameters(&self) -> WedgeGeometry<f64> {
        let d = WedgeGeometry::<f64>::default();
        let real = |k: &str, v: f64| match self.parameters.get(k) {
            Some(Value::Real(x)) => *x,
            _ => v,
        };
        let count = |k: &str, v: usize| match self.parameters.get(k) {
            Some(Value::Count(x)) => *x as usize,
            _ => v,
        };
        let mut g = WedgeGeometry {
            wavelength: real("wavelength", d.wavelength),
            beam_sigma: real("beam_sigma", d.beam_sigma),
            propagation_distance: real("propagation_distance", d.propagation_distance),
            samples_aperture: count("samples_aperture", d.samples_aperture),
            samples_detector: count("samples_detector", d.samples_detector),
            truncate: match self.parameters.get("truncate") {
                Some(Value::Flag(b)) => *b,
                _ => d.truncate,
            },
            ..d
        };
        g.aperture_halfwidth = real("aperture_halfwidth", 10.0 * g.beam_sigma);
        g.detector_halfwidth = real("detector_halfwidth", 12.0 * g.beam_sigma);
        g.tilt_angle = match self.parameters.get("tilt_angle") {
            Some(Value::Angle(t)) => *t,
            _ => g.converging_tilt(),
        };
        g
    }

    pub fn geometry(&self) -> WedgeGeometry<f64> {
        self.geometry_from_parameters()
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.parameters.get(key)
    }

    pub fn angle(&self, key: &str) -> f64 {
        match self.parameters.get(key) {
            Some(Value::Angle(v)) => *v,
            _ => 0.0,
        }
    }

    pub fn angles(&self, key: &str) -> Vec<f64> {
        match self.parameters.get(key) {
            Some(Value::Angles(v)) => v.clone(),
            _ => Vec::new(),
        }
    }

    pub fn optional_angles(&self, key: &str) -> Option<Vec<f64>> {
        match self.parameters.get(key) {
            Some(Value::Angles(v)) => Some(v.clone()),
            _ => None,
        }
    }

    pub fn count(&self, key: &str) -> Option<u64> {
        match self.parameters.get(key) {
            Some(Value::Count(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn real(&self, key: &str) -> Option<f64> {
        match self.parameters.get(key) {
            Some(Value::Real(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn flag(&self, key: &str) -> bool {
        matches!(self.parameters.get(key), Some(Value::Flag(true)))
    }

    pub fn word(&self, key: &str) -> Option<&str> {
        match self.parameters.get(key) {
            Some(Value::Word(w)) => Some(w),
            _ => None,
        }
    }

    pub fn alice_mode(&self) -> AliceMode {
        self.word("bs_a")
            .and_then(|w| parse_mode(w).ok())
            .unwrap_or(AliceMode::SplitterIn)
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    RunConfig::from_assignments(&parse_assignments(text)?)
}

/// `key=value` lines that [`parse_config`] reads back to the same config.
pub fn serialize(cfg: &RunConfig) -> String {
    let mut out = format!(
        "bench={}\nformat={}\nout={}\n",
        cfg.bench.name(),
        cfg.format.name(),
        cfg.output_path
    );
    for (k, v) in &cfg.parameters {
        out.push_str(&format!("{k}={v}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    #[test]
    fn angle_literals() {
        assert_eq!(parse_angle("0"), Some(0.0));
        assert_eq!(parse_angle("pi"), Some(PI));
        assert_eq!(parse_angle("pi/4"), Some(FRAC_PI_4));
        assert_eq!(parse_angle("-pi/4"), Some(-FRAC_PI_4));
        assert_eq!(parse_angle("3*pi/8"), Some(3.0 * PI / 8.0));
        assert_eq!(parse_angle("2pi"), Some(2.0 * PI));
        assert_eq!(parse_angle(" 0.25 "), Some(0.25));
        for bad in ["banana", "pi/0", "pi/", "x*pi", "inf", "NaN", ""] {
            assert_eq!(parse_angle(bad), None, "{bad}");
        }
    }

    #[test]
    fn polar_one_liner() {
        let cfg = parse_config("bench=polar alpha=0 theta=pi/8").unwrap();
        assert_eq!(cfg.bench, BenchKind::Polar);
        assert_eq!(cfg.angles("alpha"), vec![0.0]);
        assert_eq!(cfg.angles("theta"), vec![FRAC_PI_8]);
        assert_eq!(cfg.format, Format::Csv);
        assert_eq!(cfg.output_path, "-");
    }

    #[test]
    fn bad_angle_names_the_key() {
        let err = parse_config("bench=polar\nalpha=banana").unwrap_err();
        assert_eq!(err.key.as_deref(), Some("alpha"));
        assert_eq!(err.line, Some(2));
        assert!(err.to_string().contains("alpha"));
    }

    #[test]
    fn unknown_and_missing_keys() {
        let err = parse_config("bench=mz\n\nphi_c=1").unwrap_err();
        assert_eq!((err.key.as_deref(), err.line), (Some("phi_c"), Some(3)));
        let err = parse_config("alpha=0").unwrap_err();
        assert_eq!(err.key.as_deref(), Some("bench"));
        let err = parse_config("bench=audit").unwrap_err();
        assert_eq!(err.key.as_deref(), Some("target"));
        assert!(parse_config("bench=polar theta=1").unwrap().get("grid").is_some());
        assert!(parse_config("bench=polar theta=1 theta=2").is_err());
        assert!(parse_config("bench=chsh angles=0,1,2").is_err());
        assert!(parse_config("bench=warp").is_err());
    }

    #[test]
    fn wedge_defaults_carry_default_geometry() {
        let cfg = parse_config("bench=wedge").unwrap();
        assert_eq!(cfg.geometry(), WedgeGeometry::default());
        assert_eq!(cfg.real("wavelength"), Some(810e-9));
        assert_eq!(cfg.count("samples_detector"), Some(4097));
    }

    #[test]
    fn aperture_override_resteers_unless_tilt_given() {
        let cfg = parse_config("bench=diffmap aperture_halfwidth=0.001").unwrap();
        let g = cfg.geometry();
        assert!((g.tilt_angle.sin() - 0.001).abs() < 1e-15);
        let cfg = parse_config("bench=diffmap aperture_halfwidth=0.001 tilt_angle=0").unwrap();
        assert_eq!(cfg.geometry().tilt_angle, 0.0);
        assert!(parse_config("bench=diffmap aperture_halfwidth=0.0001").is_err());
    }

    #[test]
    fn json_documents() {
        let cfg = parse_config(
            "{\n  \"bench\": \"chsh\",\n  \"angles\": [0, \"pi/8\", \"pi/4\", \"3*pi/8\"],\n  \"n\": 20000\n}",
        )
        .unwrap();
        assert_eq!(cfg.count("n"), Some(20000));
        assert_eq!(cfg.angles("angles")[1], FRAC_PI_8);
        let err = parse_config("{\n  \"bench\": \"chsh\",\n  \"colour\": 3\n}").unwrap_err();
        assert_eq!((err.key.as_deref(), err.line), (Some("colour"), Some(3)));
        assert!(parse_config("{ \"bench\": ").is_err());
    }

    #[test]
    fn round_trip_every_bench() {
        let texts = [
            "bench=polar alpha=0,pi/8 theta=0.3 grid=7 format=json out=x.json",
            "bench=mz bs_a=stop phi_b=1,2,3",
            "bench=wedge alpha=pi/8 truncate=false tilt_angle=0",
            "bench=sample source=mz n=12 seed=18446744073709551615",
            "bench=chsh analytic=true",
            "bench=diffmap grid=3 beam_sigma=2e-4",
            "bench=audit target=wedge tolerance=1e-5",
        ];
        for t in texts {
            let cfg = parse_config(t).unwrap();
            let again = parse_config(&serialize(&cfg)).unwrap();
            assert_eq!(cfg, again, "{t}");
            assert_eq!(serialize(&cfg), serialize(&again));
        }
    }

    #[test]
    fn comments_and_lines() {
        let cfg = parse_config("# header\nbench=mz   # trailing\nalpha=pi/4\n").unwrap();
        assert_eq!(cfg.angles("alpha"), vec![FRAC_PI_4]);
        let err = parse_config("bench=mz\nalpha").unwrap_err();
        assert_eq!(err.line, Some(2));
    }
}
