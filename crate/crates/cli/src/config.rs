//! Declarative sweep configuration: a single versioned JSON document naming
//! the symbol suite, the h sweep, the basis ladder, and the search policy.

use antiwick::{PolyTerm, RealPoly, SearchConfig, Symbol};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("config field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

/// Full sweep configuration (schema version 1).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub version: u32,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Default: 7 log-spaced points across 1e-3 .. 1.
    #[serde(default = "default_h_values")]
    pub h_values: Vec<f64>,
    #[serde(default = "default_nb_ladder")]
    pub nb_ladder: Vec<usize>,
    /// Wall-clock timings are left at 0 unless requested, keeping default
    /// reports byte-identical across runs.
    #[serde(default)]
    pub record_timings: bool,
    #[serde(default)]
    pub search: SearchSettings,
    pub symbols: Vec<SymbolSpec>,
}

fn default_seed() -> u64 {
    42
}

fn default_workers() -> usize {
    2
}

pub fn default_h_values() -> Vec<f64> {
    (0..7).map(|k| 10f64.powf(-3.0 + 0.5 * k as f64)).collect()
}

fn default_nb_ladder() -> Vec<usize> {
    vec![64, 128, 256]
}

/// Overridable subset of the estimator search policy.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSettings {
    pub box_halfwidth: Option<f64>,
    pub coarse_points: Option<usize>,
    pub max_refine_iter: Option<usize>,
    pub ball_shells: Option<usize>,
    pub ball_angles: Option<usize>,
    /// Liminf shell radii in units of √h (default 4, 8, 16, 32).
    pub shell_multiples: Option<Vec<f64>>,
}

impl SearchSettings {
    pub fn to_core(&self) -> SearchConfig {
        let mut cfg = SearchConfig::default();
        if let Some(v) = self.box_halfwidth {
            cfg.box_halfwidth = Some(v);
        }
        if let Some(v) = self.coarse_points {
            cfg.coarse_points = v;
        }
        if let Some(v) = self.max_refine_iter {
            cfg.max_refine_iter = v;
        }
        if let Some(v) = self.ball_shells {
            cfg.ball_shells = v;
        }
        if let Some(v) = self.ball_angles {
            cfg.ball_angles = v;
        }
        cfg
    }

    pub fn shells_for(&self, h: f64) -> Vec<f64> {
        match &self.shell_multiples {
            Some(m) => m.iter().map(|k| k * h.sqrt()).collect(),
            None => antiwick::default_shells(h),
        }
    }
}

/// One symbol of the suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSpec {
    pub id: String,
    pub kind: KindSpec,
    /// Known infimum of the symbol (0 unless the suite entry is an
    /// explicitly shifted symbol); ratios are formed on a − inf a.
    #[serde(default)]
    pub shift: f64,
    #[serde(default)]
    pub semiclassical: Option<SemiclassicalSpec>,
    /// Analytic bottom of the essential spectrum, when known:
    /// value = coeff · h^h_power.
    #[serde(default)]
    pub analytic_ess: Option<AnalyticEss>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemiclassicalSpec {
    pub m: f64,
    pub rho: f64,
    pub n0: u32,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyticEss {
    pub coeff: f64,
    pub h_power: f64,
}

impl AnalyticEss {
    pub fn value(&self, h: f64) -> f64 {
        self.coeff * h.powf(self.h_power)
    }
}

/// Coefficient written either as a real number or an [re, im] pair.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffSpec {
    Real(f64),
    Complex([f64; 2]),
}

impl CoeffSpec {
    fn to_complex(self) -> Complex64 {
        match self {
            CoeffSpec::Real(re) => Complex64::new(re, 0.0),
            CoeffSpec::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    pub coeff: CoeffSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealTermSpec {
    /// Exponents over the 2d phase-space coordinates (x then ω).
    pub powers: Vec<u32>,
    pub coeff: f64,
}

/// Symbol kinds constructible from configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KindSpec {
    Constant { value: f64 },
    Polynomial { terms: Vec<TermSpec> },
    AbsPower { poly: Vec<RealTermSpec>, exponent: f64 },
    RadialPower { exponent: f64 },
    /// e^{-(|x|²+|ω|²)}
    RadialGaussian,
    /// e^{|z|} — super-polynomial, for growth diagnostics only.
    RadialExpSqrt,
}

impl SymbolSpec {
    pub fn to_symbol(&self) -> Result<Symbol, ConfigError> {
        let field = |msg: String| ConfigError::Field {
            field: format!("symbols[{}]", self.id),
            message: msg,
        };
        let mut sym = match &self.kind {
            KindSpec::Constant { value } => {
                if !(*value >= 0.0) {
                    return Err(field(format!("constant symbol must be ≥ 0, got {value}")));
                }
                Symbol::constant(*value)
            }
            KindSpec::Polynomial { terms } => {
                let terms: Vec<PolyTerm> = terms
                    .iter()
                    .map(|t| PolyTerm {
                        alpha: t.alpha.clone(),
                        beta: t.beta.clone(),
                        coeff: t.coeff.to_complex(),
                    })
                    .collect();
                Symbol::polynomial(1, terms).map_err(|e| field(e.to_string()))?
            }
            KindSpec::AbsPower { poly, exponent } => {
                for t in poly {
                    if t.powers.len() != 2 {
                        return Err(field("abs_power terms need exactly 2 exponents (x, ω)".into()));
                    }
                }
                let poly = RealPoly {
                    terms: poly.iter().map(|t| (t.powers.clone(), t.coeff)).collect(),
                };
                Symbol::abs_power(1, poly, *exponent)
            }
            KindSpec::RadialPower { exponent } => Symbol::radial_power(*exponent),
            KindSpec::RadialGaussian => Symbol::radial("exp(-s)", |s| (-s).exp()),
            KindSpec::RadialExpSqrt => Symbol::radial("exp(sqrt(s))", |s| s.sqrt().exp()),
        };
        sym = sym.with_id(&self.id);
        if let Some(sc) = &self.semiclassical {
            sym = sym.with_semiclassical(sc.m, sc.rho, sc.n0);
        }
        Ok(sym)
    }
}

impl SweepConfig {
    /// Standard suite: constants, the oscillator symbol, the degenerate x²,
    /// radial powers across the A∞ range, and the shifted oscillator.
    pub fn default_suite() -> Self {
        let poly = |id: &str, terms: Vec<TermSpec>| SymbolSpec {
            id: id.into(),
            kind: KindSpec::Polynomial { terms },
            shift: 0.0,
            semiclassical: None,
            analytic_ess: None,
        };
        let term = |a: u32, b: u32, c: f64| TermSpec {
            alpha: vec![a],
            beta: vec![b],
            coeff: CoeffSpec::Real(c),
        };
        let mut hosc = poly("hosc", vec![term(1, 1, 1.0)]);
        hosc.semiclassical = Some(SemiclassicalSpec { m: 0.0, rho: 0.0, n0: 3 });
        let mut xsq = poly("xsq", vec![term(2, 0, 0.25), term(1, 1, 0.5), term(0, 2, 0.25)]);
        xsq.semiclassical = Some(SemiclassicalSpec { m: 0.0, rho: 0.0, n0: 3 });
        xsq.analytic_ess = Some(AnalyticEss { coeff: 0.5, h_power: 1.0 });
        let mut shifted = poly("hosc-shift", vec![term(1, 1, 1.0), term(0, 0, 5.0)]);
        shifted.shift = 5.0;
        SweepConfig {
            version: CONFIG_VERSION,
            seed: default_seed(),
            workers: default_workers(),
            h_values: default_h_values(),
            nb_ladder: default_nb_ladder(),
            record_timings: false,
            search: SearchSettings::default(),
            symbols: vec![
                SymbolSpec {
                    id: "one".into(),
                    kind: KindSpec::Constant { value: 1.0 },
                    shift: 0.0,
                    semiclassical: Some(SemiclassicalSpec { m: 0.0, rho: 0.0, n0: 1 }),
                    analytic_ess: Some(AnalyticEss { coeff: 1.0, h_power: 0.0 }),
                },
                hosc,
                xsq,
                SymbolSpec {
                    id: "pow-m04".into(),
                    kind: KindSpec::RadialPower { exponent: -0.4 },
                    shift: 0.0,
                    semiclassical: None,
                    analytic_ess: None,
                },
                SymbolSpec {
                    id: "pow-05".into(),
                    kind: KindSpec::RadialPower { exponent: 0.5 },
                    shift: 0.0,
                    semiclassical: None,
                    analytic_ess: None,
                },
                SymbolSpec {
                    id: "pow-2".into(),
                    kind: KindSpec::RadialPower { exponent: 2.0 },
                    shift: 0.0,
                    semiclassical: None,
                    analytic_ess: None,
                },
                shifted,
            ],
        }
    }

    /// Suite restricted to symbols carrying semiclassical metadata.
    pub fn default_semiclassical() -> Self {
        let mut cfg = Self::default_suite();
        cfg.symbols.retain(|s| s.semiclassical.is_some());
        cfg
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: SweepConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let field = |f: &str, m: String| Err(ConfigError::Field { field: f.into(), message: m });
        if self.version != CONFIG_VERSION {
            return field("version", format!("expected {CONFIG_VERSION}, got {}", self.version));
        }
        if self.h_values.is_empty() {
            return field("h_values", "at least one h value required".into());
        }
        for (i, &h) in self.h_values.iter().enumerate() {
            if !(h > 0.0) || !h.is_finite() {
                return field(&format!("h_values[{i}]"), format!("h must be positive, got {h}"));
            }
        }
        if self.nb_ladder.is_empty() {
            return field("nb_ladder", "at least one basis size required".into());
        }
        if self.nb_ladder.windows(2).any(|w| w[1] <= w[0]) {
            return field("nb_ladder", "basis ladder must be strictly increasing".into());
        }
        if *self.nb_ladder.last().unwrap() > 2048 {
            return field("nb_ladder", "basis sizes above 2048 are outside desk scale".into());
        }
        if self.symbols.is_empty() {
            return field("symbols", "at least one symbol required".into());
        }
        let mut seen = std::collections::HashSet::new();
        for (i, s) in self.symbols.iter().enumerate() {
            if !seen.insert(s.id.clone()) {
                return field(&format!("symbols[{i}].id"), format!("duplicate id `{}`", s.id));
            }
            if s.shift < 0.0 {
                return field(&format!("symbols[{i}].shift"), "shift must be ≥ 0".into());
            }
            if let Some(sc) = &s.semiclassical {
                if !(0.0..0.5).contains(&sc.rho) {
                    return field(
                        &format!("symbols[{i}].semiclassical.rho"),
                        format!("ρ must lie in [0, 1/2), got {}", sc.rho),
                    );
                }
            }
            s.to_symbol()?;
        }
        if let Some(p) = self.search.coarse_points {
            if p < 3 {
                return field("search.coarse_points", "need at least 3 points per axis".into());
            }
        }
        Ok(())
    }

    /// h values admissible for the semiclassical pipeline (h ∈ (0, 1]).
    pub fn validate_semiclassical(&self) -> Result<(), ConfigError> {
        for (i, &h) in self.h_values.iter().enumerate() {
            if h > 1.0 {
                return Err(ConfigError::Field {
                    field: format!("h_values[{i}]"),
                    message: format!("semiclassical sweeps need h ∈ (0, 1], got {h}"),
                });
            }
        }
        for (i, s) in self.symbols.iter().enumerate() {
            if s.semiclassical.is_none() {
                return Err(ConfigError::Field {
                    field: format!("symbols[{i}]"),
                    message: format!("symbol `{}` lacks semiclassical metadata (m, ρ, N₀)", s.id),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_validates_and_round_trips() {
        let cfg = SweepConfig::default_suite();
        cfg.validate().unwrap();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back = SweepConfig::from_json(&text).unwrap();
        assert_eq!(back.symbols.len(), cfg.symbols.len());
        assert_eq!(back.h_values, cfg.h_values);
    }

    #[test]
    fn default_h_sweep_is_three_decades() {
        let hs = default_h_values();
        assert_eq!(hs.len(), 7);
        assert!((hs[0] - 1e-3).abs() < 1e-15);
        assert!((hs[6] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parse_errors_carry_position() {
        let bad = "{\"version\": 1,\n \"symbols\": [}";
        match SweepConfig::from_json(bad) {
            Err(ConfigError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn semantic_errors_name_the_field() {
        let mut cfg = SweepConfig::default_suite();
        cfg.h_values = vec![0.1, -1.0];
        match cfg.validate() {
            Err(ConfigError::Field { field, .. }) => assert_eq!(field, "h_values[1]"),
            other => panic!("expected field error, got {other:?}"),
        }
        let mut cfg = SweepConfig::default_suite();
        cfg.nb_ladder = vec![64, 64];
        assert!(cfg.validate().is_err());
        let mut cfg = SweepConfig::default_suite();
        cfg.symbols[1].id = "one".into();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn semiclassical_validation_requires_metadata_and_small_h() {
        let cfg = SweepConfig::default_semiclassical();
        cfg.validate_semiclassical().unwrap();
        let mut cfg2 = cfg.clone();
        cfg2.h_values.push(2.0);
        assert!(cfg2.validate_semiclassical().is_err());
        let full = SweepConfig::default_suite();
        assert!(full.validate_semiclassical().is_err());
    }

    #[test]
    fn symbols_materialize_with_expected_values() {
        let cfg = SweepConfig::default_suite();
        let byid = |id: &str| {
            cfg.symbols
                .iter()
                .find(|s| s.id == id)
                .unwrap()
                .to_symbol()
                .unwrap()
        };
        let hosc = byid("hosc");
        assert!((hosc.eval(&[1.0], &[2.0], 1.0).unwrap() - 5.0).abs() < 1e-12);
        let xsq = byid("xsq");
        assert!((xsq.eval(&[3.0], &[-7.0], 1.0).unwrap() - 9.0).abs() < 1e-10);
        let shifted = byid("hosc-shift");
        assert!((shifted.eval(&[0.0], &[0.0], 1.0).unwrap() - 5.0).abs() < 1e-12);
        let pm = byid("pow-m04");
        assert!((pm.eval(&[1.0], &[0.0], 1.0).unwrap() - 1.0).abs() < 1e-12);
    }
}
