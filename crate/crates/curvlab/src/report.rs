//! Structured identity reports with a canonical, deterministic JSON form.
//!
//! Two runs with identical configuration and seeds must serialize to
//! byte-identical documents, so entries are kept in a canonical order and
//! the timestamp is optional (callers that want wall-clock stamps opt in).

use serde::{Deserialize, Serialize};

/// Report schema version; bumped on any field change.
pub const REPORT_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Recorded but never fails a run.
    Exploratory,
}

/// Where a residual was measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Context {
    pub chart: String,
    pub point: Vec<f64>,
    pub h: f64,
    pub seed: u64,
    pub n: usize,
}

impl Context {
    pub fn algebra(n: usize, seed: u64) -> Self {
        Context {
            chart: "algebra".to_string(),
            point: Vec::new(),
            h: 0.0,
            seed,
            n,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Entry {
    pub identity_id: String,
    pub residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub context: Context,
    /// Largest individual term magnitude seen while assembling the
    /// identity; distinguishes a real cancellation from a vacuous 0 = 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_term: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Entry {
    pub fn new(id: &str, residual: f64, tolerance: f64, context: Context) -> Self {
        let verdict = if residual <= tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Entry {
            identity_id: id.to_string(),
            residual,
            tolerance,
            verdict,
            context,
            max_term: None,
            note: None,
        }
    }

    pub fn exploratory(id: &str, residual: f64, tolerance: f64, context: Context) -> Self {
        Entry {
            verdict: Verdict::Exploratory,
            ..Entry::new(id, residual, tolerance, context)
        }
    }

    pub fn with_max_term(mut self, m: f64) -> Self {
        self.max_term = Some(m);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub config_hash: String,
    /// Standing caveat about the regime the residuals were measured in.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Structured record of named residual norms, tolerances, verdicts and
/// provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityReport {
    pub entries: Vec<Entry>,
    pub metadata: Metadata,
}

impl IdentityReport {
    pub fn new(config_hash: impl Into<String>) -> Self {
        IdentityReport {
            entries: Vec::new(),
            metadata: Metadata {
                version: REPORT_VERSION.to_string(),
                timestamp: None,
                config_hash: config_hash.into(),
                note: None,
            },
        }
    }

    pub fn push(&mut self, entry: Entry) {
        self.entries.push(entry);
    }

    pub fn extend(&mut self, entries: impl IntoIterator<Item = Entry>) {
        self.entries.extend(entries);
    }

    /// Canonical entry order: identity id, then context fields.
    pub fn sort_canonical(&mut self) {
        self.entries.sort_by(|a, b| {
            (a.identity_id.as_str(), &a.context.chart, a.context.seed)
                .cmp(&(b.identity_id.as_str(), &b.context.chart, b.context.seed))
                .then_with(|| {
                    a.context
                        .point
                        .iter()
                        .map(|v| v.to_bits())
                        .cmp(b.context.point.iter().map(|v| v.to_bits()))
                })
        });
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.verdict != Verdict::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| e.verdict == Verdict::Fail)
    }

    /// Deterministic serialized form (sorted entries, two-space indent).
    pub fn to_json(&self) -> String {
        let mut doc = self.clone();
        doc.sort_canonical();
        serde_json::to_string_pretty(&doc).expect("report serialization cannot fail")
    }
}

/// Short hex hash for embedding configuration identity in reports.
pub fn config_hash(canonical: &str) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    let digest = hasher.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_tolerance() {
        let e = Entry::new("eq_1_7", 1e-13, 1e-12, Context::algebra(2, 0));
        assert_eq!(e.verdict, Verdict::Pass);
        let e = Entry::new("eq_1_7", 1e-3, 1e-12, Context::algebra(2, 0));
        assert_eq!(e.verdict, Verdict::Fail);
    }

    #[test]
    fn serialization_is_deterministic() {
        let build = || {
            let mut r = IdentityReport::new("cafe");
            r.push(Entry::new("eq_2_8", 0.0, 1e-12, Context::algebra(3, 1)));
            r.push(Entry::new("eq_1_6", 0.0, 1e-12, Context::algebra(3, 1)));
            r.to_json()
        };
        assert_eq!(build(), build());
        let json = build();
        // canonical order puts eq_1_6 first
        assert!(json.find("eq_1_6").unwrap() < json.find("eq_2_8").unwrap());
    }

    #[test]
    fn exploratory_never_fails() {
        let mut r = IdentityReport::new("00");
        r.push(Entry::exploratory("eq_2_15", 1.0, 1e-10, Context::algebra(4, 0)));
        assert!(r.all_pass());
    }
}
