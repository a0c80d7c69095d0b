//! Run configuration read from an INI file.
//!
//! ```ini
//! [analysis]
//! mode = sphere          # plane (default) or sphere
//!
//! [fields]
//! f  = "x1^2 + x2^2 - 1"
//! E1 = "-x2"
//! E2 = "x1"
//! family = false         # true: f and E may use s, with s_min <= s <= s_max
//!
//! [domain]
//! xmin = -2
//! xmax = 2
//! ymin = -2
//! ymax = 2
//! grid_n = 256
//!
//! [tolerances]           # optional overrides
//! eps_regular = 1e-6
//!
//! [south]                # optional explicit south chart
//! f  = "1 - x1^2 - x2^2"
//! E1 = "x2"
//! E2 = "-x1"
//! ```

use std::path::Path;

use degindex::{ChartFlow, Domain, ScalarField, Tolerances, VectorField};
use ini::{Ini, ParseOption, Properties};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing [{section}] {key}")]
    Missing { section: &'static str, key: &'static str },
    #[error("[{section}] {key}: {reason}")]
    Invalid { section: String, key: String, reason: String },
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Plane,
    Sphere,
}

#[derive(Debug, Clone)]
pub struct Config {
    pub mode: Mode,
    pub f: ScalarField,
    pub e: VectorField,
    /// Parameter range of a one-parameter family.
    pub family: Option<(f64, f64)>,
    pub domain: Domain,
    pub tolerances: Tolerances,
    pub south: Option<ChartFlow>,
}

pub fn load(path: &Path) -> Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
    parse(&text)
}

const SECTIONS: [&str; 5] = ["analysis", "fields", "domain", "tolerances", "south"];

pub fn parse(text: &str) -> Result<Config, ConfigError> {
    let opt = ParseOption { enabled_escape: false, ..ParseOption::default() };
    let ini = Ini::load_from_str_opt(text, opt)
        .map_err(|e| ConfigError::Syntax { line: e.line + 1, msg: e.msg.into_owned() })?;
    for name in ini.sections() {
        match name {
            Some(s) if SECTIONS.contains(&s) => {}
            Some(s) => return Err(ConfigError::Unsupported(format!("unknown section [{s}]"))),
            None if ini.general_section().is_empty() => {}
            None => return Err(ConfigError::Unsupported("keys outside any section".into())),
        }
    }
    let empty = Properties::new();
    let section = |name: &str| ini.section(Some(name)).unwrap_or(&empty);

    let analysis = Section::new("analysis", section("analysis"), &["mode"])?;
    let mode = match analysis.get("mode") {
        None | Some("plane") => Mode::Plane,
        Some("sphere") => Mode::Sphere,
        Some(other) => return Err(analysis.invalid("mode", format!("expected plane or sphere, got `{other}`"))),
    };

    let fields = Section::new("fields", section("fields"), &["f", "E1", "E2", "family", "s_min", "s_max"])?;
    let (f, e) = read_flow(&fields)?;
    let family = match fields.get("family") {
        None | Some("false") => None,
        Some("true") => Some((fields.number("s_min")?, fields.number("s_max")?)),
        Some(other) => return Err(fields.invalid("family", format!("expected true or false, got `{other}`"))),
    };
    if let Some((lo, hi)) = family {
        if lo >= hi {
            return Err(fields.invalid("s_max", "must exceed s_min".into()));
        }
    } else if f.has_param() || e.has_param() {
        return Err(ConfigError::Unsupported("fields use s but [fields] family is not true".into()));
    }

    let dom = Section::new("domain", section("domain"), &["xmin", "xmax", "ymin", "ymax", "grid_n"])?;
    let grid_n = dom.required("grid_n")?;
    let grid_n: usize = grid_n.parse().map_err(|_| dom.invalid("grid_n", format!("not a positive integer: `{grid_n}`")))?;
    let domain = Domain::new(dom.number("xmin")?, dom.number("xmax")?, dom.number("ymin")?, dom.number("ymax")?, grid_n)
        .map_err(|e| ConfigError::Invalid { section: "domain".into(), key: "grid".into(), reason: e.to_string() })?;

    let tolerances = read_tolerances(section("tolerances"))?;

    let south = match ini.section(Some("south")) {
        None => None,
        Some(props) => {
            let s = Section::new("south", props, &["f", "E1", "E2"])?;
            let (f, e) = read_flow(&s)?;
            if f.has_param() || e.has_param() {
                return Err(ConfigError::Unsupported("the south chart cannot use s".into()));
            }
            Some(ChartFlow { f, e })
        }
    };
    if south.is_some() && mode != Mode::Sphere {
        return Err(ConfigError::Unsupported("[south] requires mode = sphere".into()));
    }

    Ok(Config { mode, f, e, family, domain, tolerances, south })
}

struct Section<'a> {
    name: &'static str,
    props: &'a Properties,
}

impl<'a> Section<'a> {
    fn new(name: &'static str, props: &'a Properties, keys: &[&str]) -> Result<Self, ConfigError> {
        for (k, _) in props.iter() {
            if !keys.contains(&k) {
                return Err(ConfigError::Unsupported(format!("unknown key `{k}` in [{name}]")));
            }
        }
        Ok(Section { name, props })
    }

    fn get(&self, key: &str) -> Option<&'a str> {
        self.props.get(key).map(str::trim)
    }

    fn required(&self, key: &'static str) -> Result<&'a str, ConfigError> {
        self.get(key).ok_or(ConfigError::Missing { section: self.name, key })
    }

    fn number(&self, key: &'static str) -> Result<f64, ConfigError> {
        let raw = self.required(key)?;
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.invalid(key, format!("not a finite number: `{raw}`"))),
        }
    }

    fn invalid(&self, key: &str, reason: String) -> ConfigError {
        ConfigError::Invalid { section: self.name.into(), key: key.into(), reason }
    }
}

fn read_flow(s: &Section) -> Result<(ScalarField, VectorField), ConfigError> {
    let expr = |key: &'static str| {
        let src = s.required(key)?;
        degindex::expr::parse(src).map_err(|e| s.invalid(key, e.to_string()))
    };
    let f = ScalarField::new(expr("f")?);
    let e = VectorField::new(expr("E1")?, expr("E2")?);
    Ok((f, e))
}

fn read_tolerances(props: &Properties) -> Result<Tolerances, ConfigError> {
    let mut tol = Tolerances::default();
    for (key, raw) in props.iter() {
        let invalid = |reason: String| ConfigError::Invalid { section: "tolerances".into(), key: key.into(), reason };
        if key == "max_components" {
            tol.max_components = raw.trim().parse().map_err(|_| invalid(format!("not an integer: `{raw}`")))?;
            continue;
        }
        let slot = match key {
            "eps_regular" => &mut tol.eps_regular,
            "eps_f" => &mut tol.eps_f,
            "eps_e" => &mut tol.eps_e,
            "eps_reducible" => &mut tol.eps_reducible,
            "eps_tangency" => &mut tol.eps_tangency,
            "eps_zero" => &mut tol.eps_zero,
            "eps_eig" => &mut tol.eps_eig,
            "eps_ring" => &mut tol.eps_ring,
            "ring_clearance" => &mut tol.ring_clearance,
            "merge_radius" => &mut tol.merge_radius,
            _ => return Err(ConfigError::Unsupported(format!("unknown key `{key}` in [tolerances]"))),
        };
        *slot = match raw.trim().parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => v,
            _ => return Err(invalid(format!("not a positive number: `{raw}`"))),
        };
    }
    Ok(tol)
}
