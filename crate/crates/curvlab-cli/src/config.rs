//! Run configuration: JSON file plus flag overrides (flags win).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use curvlab::chart::{chart_from_json, parse_spec, Chart};
use curvlab::suite::{Eq210Reading, IdentityId, SuiteConfig};

/// Where the chart comes from: a builtin spec string or a JSON file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ChartSource {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct PointsSpec {
    /// Explicit points; wins over the sampler when non-empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub list: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct IdentitySelection {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub include: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exclude: Vec<String>,
}

/// The full run configuration; serializes canonically (sorted maps, fixed
/// field order) so identical configs hash identically.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub chart: ChartSource,
    #[serde(default)]
    pub points: PointsSpec,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub identities: IdentitySelection,
    #[serde(default)]
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// Reading of the ambiguous parenthesis in the long nabla-Q lemma.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eq_2_10_reading: Option<String>,
}

fn default_h() -> f64 {
    1e-3
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            chart: ChartSource {
                spec: Some("flat(n=2)".to_string()),
                path: None,
            },
            points: PointsSpec::default(),
            h: default_h(),
            tolerances: BTreeMap::new(),
            identities: IdentitySelection::default(),
            seed: 0,
            output: None,
            eq_2_10_reading: None,
        }
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.h <= 0.0 {
            return Err(ConfigError("h must be positive".into()));
        }
        if self.chart.spec.is_none() && self.chart.path.is_none() {
            return Err(ConfigError("chart needs either spec or path".into()));
        }
        if let Some(c) = self.points.count {
            if c < 1 {
                return Err(ConfigError("points.count must be >= 1".into()));
            }
        }
        for name in self
            .identities
            .include
            .iter()
            .chain(&self.identities.exclude)
            .chain(self.tolerances.keys())
        {
            name.parse::<IdentityId>()
                .map_err(|e| ConfigError(e.to_string()))?;
        }
        if let Some(r) = &self.eq_2_10_reading {
            if r != "symmetric_pair" && r != "literal" {
                return Err(ConfigError(
                    "eq_2_10_reading must be 'symmetric_pair' or 'literal'".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn load_chart(&self) -> Result<Chart, ConfigError> {
        if let Some(path) = &self.chart.path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("reading {path}: {e}")))?;
            return chart_from_json(&text).map_err(|e| ConfigError(e.to_string()));
        }
        let spec = self.chart.spec.as_deref().expect("validated");
        parse_spec(spec, 2).map_err(|e| ConfigError(e.to_string()))
    }

    /// Points to evaluate: the explicit list, or the deterministic sampler.
    pub fn resolve_points(&self, chart: &Chart) -> Vec<Vec<f64>> {
        if !self.points.list.is_empty() {
            return self.points.list.clone();
        }
        let count = self.points.count.unwrap_or(1);
        let seed = self.points.seed.unwrap_or(self.seed);
        let margin = self.points.margin.unwrap_or(0.25);
        curvlab::suite::global::sample_points(chart, count, seed, margin)
    }

    pub fn suite_config(&self, stamp: Option<String>) -> SuiteConfig {
        let mut tolerances = BTreeMap::new();
        for (k, v) in &self.tolerances {
            tolerances.insert(k.parse::<IdentityId>().expect("validated"), *v);
        }
        let include: Option<BTreeSet<IdentityId>> = if self.identities.include.is_empty() {
            None
        } else {
            Some(
                self.identities
                    .include
                    .iter()
                    .map(|s| s.parse().expect("validated"))
                    .collect(),
            )
        };
        let exclude: BTreeSet<IdentityId> = self
            .identities
            .exclude
            .iter()
            .map(|s| s.parse().expect("validated"))
            .collect();
        SuiteConfig {
            h: self.h,
            seed: self.seed,
            tolerances,
            include,
            exclude,
            eq_2_10_reading: match self.eq_2_10_reading.as_deref() {
                Some("literal") => Eq210Reading::Literal,
                _ => Eq210Reading::SymmetricPair,
            },
            config_hash: curvlab::report::config_hash(&self.to_canonical_json()),
            timestamp: stamp,
            ..SuiteConfig::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.tolerances.insert("eq_2_13".to_string(), 1e-5);
        cfg.identities.include.push("eq_1_7".to_string());
        cfg.seed = 42;
        let json = cfg.to_canonical_json();
        let back = RunConfig::from_json(&json).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_canonical_json(), json);
    }

    #[test]
    fn unknown_identities_rejected() {
        let text = r#"{ "chart": {"spec": "flat(n=2)"}, "identities": {"include": ["eq_9_9"]} }"#;
        assert!(RunConfig::from_json(text).is_err());
    }
}
