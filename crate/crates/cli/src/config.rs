//! Run configuration: a JSON document whose keys can be overridden by flags.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use zmstat::{MethodTag, PotentialSpec, QuadratureConfig};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GridScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub mass: f64,
    pub omega: f64,
    pub lambda: f64,
    pub tmin: f64,
    pub tmax: f64,
    pub tcount: usize,
    pub tscale: GridScale,
    pub methods: Vec<MethodTag>,
    pub format: Format,
    /// Standard output when absent.
    pub out: Option<PathBuf>,
    pub quadrature: QuadratureConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mass: 1.0,
            omega: 1.0,
            lambda: 0.4,
            tmin: 0.2,
            tmax: 10.0,
            tcount: 50,
            tscale: GridScale::Log,
            methods: MethodTag::ALL.to_vec(),
            format: Format::Csv,
            out: None,
            quadrature: QuadratureConfig::default(),
        }
    }
}

/// Flag values; `None` leaves the file (or default) value in place.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub mass: Option<f64>,
    pub omega: Option<f64>,
    pub lambda: Option<f64>,
    pub tmin: Option<f64>,
    pub tmax: Option<f64>,
    pub tcount: Option<usize>,
    pub tscale: Option<GridScale>,
    pub methods: Option<Vec<MethodTag>>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn apply(mut self, o: Overrides) -> Self {
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = o.$f { self.$f = v; } )* };
        }
        set!(mass, omega, lambda, tmin, tmax, tcount, tscale, methods, format);
        if o.out.is_some() {
            self.out = o.out;
        }
        self
    }

    pub fn spec(&self) -> Result<PotentialSpec, CliError> {
        PotentialSpec::new(self.mass, self.omega, self.lambda).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.spec()?;
        let bad = |m: String| Err(CliError::Config(m));
        if !(self.tmin > 0.0 && self.tmin.is_finite()) {
            return bad(format!("tmin must be positive, got {}", self.tmin));
        }
        if !self.tmax.is_finite() {
            return bad(format!("tmax must be finite, got {}", self.tmax));
        }
        if self.tcount == 0 {
            return bad("tcount must be at least 1".into());
        }
        if self.tcount > 1 && !(self.tmax > self.tmin) {
            return bad(format!("tmax ({}) must exceed tmin ({})", self.tmax, self.tmin));
        }
        if self.methods.is_empty() {
            return bad("at least one method is required".into());
        }
        self.quadrature.validate().map_err(|e| CliError::Config(e.to_string()))
    }

    /// Temperature grid, strictly increasing, ending exactly at `tmax`.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.tcount;
        if n == 1 {
            return vec![self.tmin];
        }
        let last = (n - 1) as f64;
        let mut g: Vec<f64> = (0..n)
            .map(|i| {
                let s = i as f64 / last;
                match self.tscale {
                    GridScale::Linear => self.tmin + s * (self.tmax - self.tmin),
                    GridScale::Log => (self.tmin.ln() + s * (self.tmax / self.tmin).ln()).exp(),
                }
            })
            .collect();
        g[0] = self.tmin;
        g[n - 1] = self.tmax;
        g
    }
}

/// Parses `a,b,c` into method tags.
pub fn parse_methods(s: &str) -> Result<Vec<MethodTag>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().map_err(|e: zmstat::Error| CliError::Config(e.to_string())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_keys() {
        assert!(RunConfig::from_json(r#"{"lambda": 1.0, "colour": "red"}"#).is_err());
        assert!(RunConfig::from_json(r#"{"quadrature": {"nodes": 3}}"#).is_err());
        let c = RunConfig::from_json(r#"{"lambda": 1.0, "methods": ["exact", "oneloop"]}"#).unwrap();
        assert_eq!(c.lambda, 1.0);
        assert_eq!(c.methods, vec![MethodTag::Exact, MethodTag::Oneloop]);
    }

    #[test]
    fn flags_override_file() {
        let c = RunConfig::from_json(r#"{"lambda": 1.0, "tcount": 7}"#)
            .unwrap()
            .apply(Overrides {
                lambda: Some(2.0),
                ..Default::default()
            });
        assert_eq!((c.lambda, c.tcount), (2.0, 7));
    }

    #[test]
    fn grids() {
        let c = RunConfig {
            tmin: 0.2,
            tmax: 10.0,
            tcount: 50,
            ..Default::default()
        };
        let g = c.grid();
        assert_eq!((g[0], g[49]), (0.2, 10.0));
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        let c = RunConfig {
            tscale: GridScale::Linear,
            tmin: 1.0,
            tmax: 3.0,
            tcount: 3,
            ..Default::default()
        };
        assert_eq!(c.grid(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn validation() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = [
            RunConfig {
                tmin: 0.0,
                ..Default::default()
            },
            RunConfig {
                tmax: 0.1,
                ..Default::default()
            },
            RunConfig {
                tcount: 0,
                ..Default::default()
            },
            RunConfig {
                methods: vec![],
                ..Default::default()
            },
            RunConfig {
                mass: -1.0,
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(CliError::Config(_))));
        }
        assert!(parse_methods("exact,1loop").is_err());
        assert_eq!(parse_methods("exact, quadratic").unwrap().len(), 2);
    }
}
