//! Command implementations behind the `degindex` binary.
//!
//! Every command returns its standard output and exit code: 0 on success,
//! 2 when the analysis fails (the failure is part of the JSON report), and
//! 3 when a Poincaré–Hopf check completes but the sum is wrong. Unreadable
//! or invalid configurations are reported as [`ConfigError`], exit code 1.

pub mod config;
pub mod report;

use std::path::Path;

pub use config::{Config, ConfigError, Mode};
use degindex::{
    analyze_plane, analyze_sphere, check_homotopy, check_poincare_hopf, compactify, extract_level_set, integrate,
    render_svg, PhVerdict, Point, PortraitOptions, SphereFlow,
};
use report::{to_json, AnalyzeReport, HomotopyReport, PhReport, TrajectoryReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_ANALYSIS: i32 = 2;
pub const EXIT_PH_FAILS: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn json<T: serde::Serialize>(value: &T, code: i32) -> Self {
        Outcome { stdout: to_json(value), code }
    }
}

fn require_plain(cfg: &Config, command: &str) -> Result<(), ConfigError> {
    if cfg.family.is_some() {
        return Err(ConfigError::Unsupported(format!("{command} needs fixed fields; use homotopy for families")));
    }
    Ok(())
}

/// Plane analysis of the configured fields.
pub fn analyze(cfg: &Config) -> Result<Outcome, ConfigError> {
    require_plain(cfg, "analyze")?;
    Ok(match analyze_plane(&cfg.f, &cfg.e, &cfg.domain, &cfg.tolerances) {
        Ok(a) => {
            let code = if a.is_complete() { EXIT_OK } else { EXIT_ANALYSIS };
            Outcome::json(&AnalyzeReport::from_analysis(&a), code)
        }
        Err(e) => Outcome::json(&AnalyzeReport::failed(&e), EXIT_ANALYSIS),
    })
}

/// Sums the degeneracy indices over both charts of the sphere. Without a
/// `[south]` section the south chart is derived from the configured fields.
pub fn ph_check(cfg: &Config) -> Result<Outcome, ConfigError> {
    require_plain(cfg, "ph-check")?;
    let sf = match &cfg.south {
        Some(south) => Ok(SphereFlow {
            north: degindex::ChartFlow { f: cfg.f.clone(), e: cfg.e.clone() },
            south: south.clone(),
            dedup_radius: 1.0,
        }),
        None => compactify(&cfg.f, &cfg.e, &cfg.tolerances),
    };
    let catalog = match sf.and_then(|sf| analyze_sphere(&sf, &cfg.domain, &cfg.tolerances)) {
        Ok(c) => c,
        Err(e) => return Ok(Outcome::json(&PhReport::failed(&e), EXIT_ANALYSIS)),
    };
    let base = PhReport::new(&catalog.rings, &catalog.zeros, &catalog.warnings);
    Ok(match check_poincare_hopf(&catalog) {
        Ok(v) => Outcome::json(&base.with_verdict(&v), verdict_code(&v)),
        Err(e) => {
            let report = if catalog.failures.is_empty() { base.with_errors([&e]) } else { base.with_errors(&catalog.failures) };
            Outcome::json(&report, EXIT_ANALYSIS)
        }
    })
}

pub fn verdict_code(v: &PhVerdict) -> i32 {
    if v.holds {
        EXIT_OK
    } else {
        EXIT_PH_FAILS
    }
}

/// Renders the phase portrait to `out`. Partial analyses are still drawn,
/// with an error banner, and exit with code 2.
pub fn portrait(cfg: &Config, out: &Path) -> Result<Outcome, ConfigError> {
    require_plain(cfg, "portrait")?;
    let analysis = match analyze_plane(&cfg.f, &cfg.e, &cfg.domain, &cfg.tolerances) {
        Ok(a) => a,
        Err(e) => return Ok(Outcome::json(&AnalyzeReport::failed(&e), EXIT_ANALYSIS)),
    };
    let svg = render_svg(&cfg.f, &cfg.e, &cfg.domain, &analysis, &PortraitOptions::default());
    std::fs::write(out, svg).map_err(|source| ConfigError::Io { path: out.display().to_string(), source })?;
    let code = if analysis.is_complete() { EXIT_OK } else { EXIT_ANALYSIS };
    Ok(Outcome { stdout: String::new(), code })
}

/// Samples the configured family at `samples` evenly spaced parameters.
pub fn homotopy(cfg: &Config, samples: usize) -> Result<Outcome, ConfigError> {
    let Some(range) = cfg.family else {
        return Err(ConfigError::Unsupported("homotopy needs [fields] family = true with s_min and s_max".into()));
    };
    if samples < 2 {
        return Err(ConfigError::Unsupported("--samples must be at least 2".into()));
    }
    Ok(match check_homotopy(&cfg.f, &cfg.e, &cfg.domain, samples, range, &cfg.tolerances) {
        Ok(r) => Outcome::json(&HomotopyReport::from(&r), EXIT_OK),
        Err(e) => Outcome::json(&HomotopyReport::failed(&e), EXIT_ANALYSIS),
    })
}

/// Follows the flow from `x0`; ring hits are labeled by ring number when
/// the level set of the configured domain can be extracted.
pub fn integrate_from(cfg: &Config, x0: Point, t_max: f64, tol: f64) -> Result<Outcome, ConfigError> {
    require_plain(cfg, "integrate")?;
    if !(t_max > 0.0 && t_max.is_finite()) || !(tol > 0.0 && tol.is_finite()) {
        return Err(ConfigError::Unsupported("--t-max and --tol must be positive".into()));
    }
    Ok(match integrate(&cfg.f, &cfg.e, x0, t_max, tol) {
        Ok(mut tr) => {
            if let Ok(ls) = extract_level_set(&cfg.f, &cfg.domain, &cfg.tolerances) {
                tr.label_ring(&ls.rings);
            }
            Outcome::json(&TrajectoryReport::from(&tr), EXIT_OK)
        }
        Err(e) => Outcome::json(&TrajectoryReport::failed(&e), EXIT_ANALYSIS),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use degindex::IndexSum;

    #[test]
    fn verdict_exit_codes() {
        let mut v = PhVerdict { sum: IndexSum::SPHERE, holds: true, enclosure_violations: vec![], warnings: vec![] };
        assert_eq!(verdict_code(&v), EXIT_OK);
        v.sum = IndexSum::new(1, 0);
        v.holds = false;
        assert_eq!(verdict_code(&v), EXIT_PH_FAILS);
    }
}
