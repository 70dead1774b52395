//! The identity catalog: every named residual the suite can evaluate.

use std::fmt;
use std::str::FromStr;

/// Identifier of one checkable identity. The numbering follows the crate's
/// internal catalog document; each id has exactly one evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IdentityId {
    Eq1_6,
    Eq1_7,
    Eq1_8,
    Eq1_9,
    Eq1_10,
    Eq2_2,
    Eq2_3,
    Eq2_4,
    Eq2_5,
    Eq2_6,
    Eq2_7,
    Eq2_8,
    Eq2_9,
    Eq2_10,
    Eq2_11,
    Eq2_12,
    Eq2_13,
    Eq2_14,
    Eq2_15,
    Eq2_16,
    Eq2_17,
    Eq2_18,
    Eq2_19,
    Eq3_1,
    Eq3_2,
    Eq3_3,
    Eq3_4,
    Prop1_2,
    Thm1,
}

/// All identity ids, in canonical order.
pub const CATALOG: [IdentityId; 29] = [
    IdentityId::Eq1_6,
    IdentityId::Eq1_7,
    IdentityId::Eq1_8,
    IdentityId::Eq1_9,
    IdentityId::Eq1_10,
    IdentityId::Eq2_2,
    IdentityId::Eq2_3,
    IdentityId::Eq2_4,
    IdentityId::Eq2_5,
    IdentityId::Eq2_6,
    IdentityId::Eq2_7,
    IdentityId::Eq2_8,
    IdentityId::Eq2_9,
    IdentityId::Eq2_10,
    IdentityId::Eq2_11,
    IdentityId::Eq2_12,
    IdentityId::Eq2_13,
    IdentityId::Eq2_14,
    IdentityId::Eq2_15,
    IdentityId::Eq2_16,
    IdentityId::Eq2_17,
    IdentityId::Eq2_18,
    IdentityId::Eq2_19,
    IdentityId::Eq3_1,
    IdentityId::Eq3_2,
    IdentityId::Eq3_3,
    IdentityId::Eq3_4,
    IdentityId::Prop1_2,
    IdentityId::Thm1,
];

impl IdentityId {
    pub fn as_str(self) -> &'static str {
        match self {
            IdentityId::Eq1_6 => "eq_1_6",
            IdentityId::Eq1_7 => "eq_1_7",
            IdentityId::Eq1_8 => "eq_1_8",
            IdentityId::Eq1_9 => "eq_1_9",
            IdentityId::Eq1_10 => "eq_1_10",
            IdentityId::Eq2_2 => "eq_2_2",
            IdentityId::Eq2_3 => "eq_2_3",
            IdentityId::Eq2_4 => "eq_2_4",
            IdentityId::Eq2_5 => "eq_2_5",
            IdentityId::Eq2_6 => "eq_2_6",
            IdentityId::Eq2_7 => "eq_2_7",
            IdentityId::Eq2_8 => "eq_2_8",
            IdentityId::Eq2_9 => "eq_2_9",
            IdentityId::Eq2_10 => "eq_2_10",
            IdentityId::Eq2_11 => "eq_2_11",
            IdentityId::Eq2_12 => "eq_2_12",
            IdentityId::Eq2_13 => "eq_2_13",
            IdentityId::Eq2_14 => "eq_2_14",
            IdentityId::Eq2_15 => "eq_2_15",
            IdentityId::Eq2_16 => "eq_2_16",
            IdentityId::Eq2_17 => "eq_2_17",
            IdentityId::Eq2_18 => "eq_2_18",
            IdentityId::Eq2_19 => "eq_2_19",
            IdentityId::Eq3_1 => "eq_3_1",
            IdentityId::Eq3_2 => "eq_3_2",
            IdentityId::Eq3_3 => "eq_3_3",
            IdentityId::Eq3_4 => "eq_3_4",
            IdentityId::Prop1_2 => "prop_1_2",
            IdentityId::Thm1 => "thm_1",
        }
    }

    /// Exploratory ids are recorded with fitted coefficients but never fail
    /// a run: the reduced forms of the S-combination identities, whose
    /// printed coefficients are adjudicated numerically at run time.
    pub fn is_exploratory(self) -> bool {
        matches!(
            self,
            IdentityId::Eq2_15 | IdentityId::Eq2_16 | IdentityId::Eq2_17 | IdentityId::Eq2_18
        )
    }

    /// Where the evaluator gets its data.
    pub fn kind(self) -> EvaluatorKind {
        use IdentityId::*;
        match self {
            Eq1_6 | Eq1_7 | Eq2_2 | Eq2_8 => EvaluatorKind::Scalar,
            Eq1_8 | Eq1_9 | Eq1_10 => EvaluatorKind::AlmostKahler,
            Eq2_3 | Eq2_4 | Eq2_5 | Eq2_6 | Eq2_7 | Eq2_15 | Eq2_16 | Eq2_17 | Eq2_18 => {
                EvaluatorKind::Algebra
            }
            Eq2_9 | Eq2_10 | Eq2_11 | Eq2_12 | Eq2_13 | Eq2_14 | Eq2_19 => EvaluatorKind::Lemma,
            Eq3_1 | Eq3_2 | Eq3_3 | Eq3_4 => EvaluatorKind::Section3,
            Prop1_2 => EvaluatorKind::Einstein,
            Thm1 => EvaluatorKind::Theorem1,
        }
    }

    /// Dimension gate from each identity's hypothesis.
    pub fn admits_n(self, n: usize) -> bool {
        match self {
            IdentityId::Eq2_13 => n >= 2 && n != 3,
            IdentityId::Eq2_14 | IdentityId::Eq2_15 | IdentityId::Eq2_16 => n >= 3,
            IdentityId::Eq2_17 | IdentityId::Eq2_18 | IdentityId::Eq2_19 => n >= 4,
            IdentityId::Thm1 => n >= 4,
            _ => n >= 2,
        }
    }
}

/// Evaluator families; the registry test asserts each id maps to exactly
/// one family, covering the whole catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvaluatorKind {
    /// Pointwise scalar identities of R (evaluated from a Curv4).
    Scalar,
    /// nabla-omega conditions (evaluated from a jet or constrained A).
    AlmostKahler,
    /// Pure-algebra consequences of the Q and A constraints.
    Algebra,
    /// The nabla-Q lemmas (jet data or synthetic lemma data).
    Lemma,
    /// The final-section identities built on rho_star(R - L3 R).
    Section3,
    /// Einstein versus holomorphic co-vanishing.
    Einstein,
    /// The endgame instance check.
    Theorem1,
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown identity id '{0}'")]
pub struct UnknownIdentity(pub String);

impl FromStr for IdentityId {
    type Err = UnknownIdentity;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CATALOG
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| UnknownIdentity(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_complete_and_unique() {
        let expected = [
            "eq_1_6", "eq_1_7", "eq_1_8", "eq_1_9", "eq_1_10", "eq_2_2", "eq_2_3", "eq_2_4",
            "eq_2_5", "eq_2_6", "eq_2_7", "eq_2_8", "eq_2_9", "eq_2_10", "eq_2_11", "eq_2_12",
            "eq_2_13", "eq_2_14", "eq_2_15", "eq_2_16", "eq_2_17", "eq_2_18", "eq_2_19",
            "eq_3_1", "eq_3_2", "eq_3_3", "eq_3_4", "prop_1_2", "thm_1",
        ];
        assert_eq!(CATALOG.len(), expected.len());
        for (id, want) in CATALOG.iter().zip(expected) {
            assert_eq!(id.as_str(), want);
        }
        let mut set = std::collections::BTreeSet::new();
        for id in CATALOG {
            assert!(set.insert(id.as_str()), "duplicate {id}");
        }
    }

    #[test]
    fn round_trip_from_str() {
        for id in CATALOG {
            assert_eq!(id.as_str().parse::<IdentityId>().unwrap(), id);
        }
        assert!("eq_9_9".parse::<IdentityId>().is_err());
    }
}
