//! Placement of a matrix relative to `Mal`, `Maj`, `M_n` and `Ari`.
//!
//! `M ⇒_lex Mal` fails exactly when every two-row selection of `M` is
//! anti-trivial. Two-row matrices are trivial, anti-trivial or equivalent to
//! `Mal`. For `n >= 3` rows, either `M ⇒_lex Mal` or `M_n ⇒_lex M`, never
//! both. In regular categories `M_n` is equivalent to `Maj`, which gives the
//! dichotomy `M ⇒_reg Mal` or `Maj ⇒_reg M`, and `Ari ⇒_reg M` for every
//! non-trivial `M`.

use serde::{Deserialize, Serialize};

use crate::degeneracy::{degeneracy_class, is_trivial, DegeneracyTag};
use crate::error::{Error, Result};
use crate::format::MatrixJson;
use crate::matrix::Matrix;

/// Row pairs `(i, j)` with `i <= j`, 1-based, in lexicographic order.
fn row_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=n).flat_map(move |i| (i..=n).map(move |j| (i, j)))
}

/// The first two-row selection (repeated rows included) that is not
/// anti-trivial.
pub fn non_anti_trivial_pair(m: &Matrix) -> Option<(usize, usize)> {
    row_pairs(m.rows()).find(|&(i, j)| {
        !m.select_rows(&[i, j])
            .expect("pairs are in range")
            .is_right_among_left()
    })
}

pub fn implies_mal_lex(m: &Matrix) -> bool {
    non_anti_trivial_pair(m).is_some()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TwoRowClass {
    Trivial,
    AntiTrivial,
    MalEquivalent,
}

pub fn two_row_class(m: &Matrix) -> Result<TwoRowClass> {
    if m.rows() != 2 {
        return Err(Error::Shape(format!(
            "two-row classification needs 2 rows, got {}",
            m.rows()
        )));
    }
    Ok(match degeneracy_class(m).tag {
        DegeneracyTag::Trivial => TwoRowClass::Trivial,
        DegeneracyTag::AntiTrivial => TwoRowClass::AntiTrivial,
        DegeneracyTag::NonDegenerate => TwoRowClass::MalEquivalent,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Alternative {
    /// `M ⇒_lex Mal`.
    MalSide,
    /// `M_n ⇒_lex M`.
    MnSide,
}

pub fn mal_or_mn_alternative(m: &Matrix) -> Result<Alternative> {
    if m.rows() < 3 {
        return Err(Error::Shape(format!(
            "the Mal/M_n alternative needs at least 3 rows, got {}",
            m.rows()
        )));
    }
    Ok(if implies_mal_lex(m) {
        Alternative::MalSide
    } else {
        Alternative::MnSide
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegularTag {
    Trivial,
    AntiTrivial,
    /// `M ⇒_reg Mal`.
    ImpliesMalReg,
    /// `Maj ⇒_reg M`.
    ImpliedByMajReg,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    None,
    /// A two-row selection that is not anti-trivial.
    NonAntiTrivialPair {
        rows: (usize, usize),
        matrix: Matrix,
    },
    /// Every two-row selection is anti-trivial; `pairs` of them were checked.
    AllPairsAntiTrivial {
        pairs: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularClassification {
    pub tag: RegularTag,
    pub evidence: Evidence,
}

impl RegularClassification {
    pub fn to_json(&self) -> serde_json::Value {
        let evidence = match &self.evidence {
            Evidence::None => serde_json::Value::Null,
            Evidence::NonAntiTrivialPair { rows, matrix } => serde_json::json!({
                "rows": [rows.0, rows.1],
                "matrix": MatrixJson::from(matrix),
            }),
            Evidence::AllPairsAntiTrivial { pairs } => serde_json::json!({
                "all_pairs_anti_trivial": pairs,
            }),
        };
        serde_json::json!({ "tag": self.tag, "evidence": evidence })
    }
}

pub fn classify_regular(m: &Matrix) -> RegularClassification {
    let plain = |tag| RegularClassification {
        tag,
        evidence: Evidence::None,
    };
    match degeneracy_class(m).tag {
        DegeneracyTag::Trivial => return plain(RegularTag::Trivial),
        DegeneracyTag::AntiTrivial => return plain(RegularTag::AntiTrivial),
        DegeneracyTag::NonDegenerate => {}
    }
    match non_anti_trivial_pair(m) {
        Some((i, j)) => RegularClassification {
            tag: RegularTag::ImpliesMalReg,
            evidence: Evidence::NonAntiTrivialPair {
                rows: (i, j),
                matrix: m.select_rows(&[i, j]).expect("pairs are in range"),
            },
        },
        None => {
            // A non-degenerate matrix with at most two rows always has a
            // non-anti-trivial pair: the selection of all its rows.
            debug_assert!(m.rows() >= 3);
            RegularClassification {
                tag: RegularTag::ImpliedByMajReg,
                evidence: Evidence::AllPairsAntiTrivial {
                    pairs: row_pairs(m.rows()).count(),
                },
            }
        }
    }
}

pub fn ari_implies_reg(m: &Matrix) -> bool {
    !is_trivial(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ari, gen_mn, maj, mal, validate};

    #[test]
    fn mal_criterion() {
        assert!(!implies_mal_lex(&maj()));
        assert!(implies_mal_lex(&ari()));
        assert_eq!(non_anti_trivial_pair(&ari()), Some((1, 2)));
        for n in 3..=6 {
            assert!(!implies_mal_lex(&gen_mn(n).unwrap()));
        }
    }

    #[test]
    fn two_rows() {
        assert_eq!(two_row_class(&mal()).unwrap(), TwoRowClass::MalEquivalent);
        let at = validate(&[vec![1, 1, 1], vec![1, 2, 2]]).unwrap();
        assert_eq!(two_row_class(&at).unwrap(), TwoRowClass::AntiTrivial);
        let tr = validate(&[vec![1, 2], vec![1, 2]]).unwrap();
        assert_eq!(two_row_class(&tr).unwrap(), TwoRowClass::Trivial);
        assert!(matches!(two_row_class(&maj()), Err(Error::Shape(_))));
    }

    #[test]
    fn alternative() {
        assert_eq!(mal_or_mn_alternative(&ari()).unwrap(), Alternative::MalSide);
        assert_eq!(mal_or_mn_alternative(&maj()).unwrap(), Alternative::MnSide);
        assert_eq!(
            mal_or_mn_alternative(&gen_mn(4).unwrap()).unwrap(),
            Alternative::MnSide
        );
        assert!(mal_or_mn_alternative(&mal()).is_err());
    }

    #[test]
    fn regular() {
        let c = classify_regular(&ari());
        assert_eq!(c.tag, RegularTag::ImpliesMalReg);
        match c.evidence {
            Evidence::NonAntiTrivialPair { rows, matrix } => {
                assert_eq!(rows, (1, 2));
                assert_eq!(matrix, mal());
            }
            other => panic!("unexpected evidence {other:?}"),
        }
        let c = classify_regular(&gen_mn(5).unwrap());
        assert_eq!(c.tag, RegularTag::ImpliedByMajReg);
        assert_eq!(c.evidence, Evidence::AllPairsAntiTrivial { pairs: 15 });
        let trivial = validate(&[vec![1, 2]]).unwrap();
        assert_eq!(classify_regular(&trivial).tag, RegularTag::Trivial);
        assert_eq!(classify_regular(&mal()).tag, RegularTag::ImpliesMalReg);
    }

    #[test]
    fn ari_minimality() {
        assert!(ari_implies_reg(&mal()));
        assert!(ari_implies_reg(&maj()));
        assert!(!ari_implies_reg(&validate(&[vec![1, 2]]).unwrap()));
        assert!(ari_implies_reg(&validate(&[vec![1, 1]]).unwrap()));
    }

    #[test]
    fn json_shape() {
        let v = classify_regular(&ari()).to_json();
        assert_eq!(v["tag"], "ImpliesMalReg");
        assert_eq!(v["evidence"]["rows"], serde_json::json!([1, 2]));
    }
}
