//! Trivial / anti-trivial / non-degenerate classification.
//!
//! A matrix is anti-trivial when its right column is one of its left
//! columns. It is trivial when no Boolean function `p` of arity `m`
//! satisfies `p(x_i1, ..., x_im) = y_i` for every row `i` under every
//! assignment of the variables to `{0, 1}`. Every Boolean function is a term
//! of the two-element Boolean algebra, so this is a consistency check on a
//! partial truth table.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;

/// One forced cell: under `assignment` (bit `v` holds the value of
/// `x_{v+1}`), row `row` (0-based) requires `p(input) = output`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub assignment: u64,
    pub row: usize,
    pub input: u64,
    pub output: bool,
}

/// A Boolean function of `arity` inputs. Input bit `l` is the value of left
/// column `l`. Only constrained cells are stored; the rest read as 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    arity: usize,
    cells: BTreeMap<u64, bool>,
}

impl TruthTable {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, input: u64) -> bool {
        self.cells.get(&input).copied().unwrap_or(false)
    }

    pub fn eval_bits(&self, bits: &[bool]) -> bool {
        debug_assert_eq!(bits.len(), self.arity);
        let input = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (l, &b)| acc | ((b as u64) << l));
        self.eval(input)
    }

    pub fn is_constrained(&self, input: u64) -> bool {
        self.cells.contains_key(&input)
    }

    pub fn constrained_cells(&self) -> impl Iterator<Item = (u64, bool)> + '_ {
        self.cells.iter().map(|(&i, &b)| (i, b))
    }

    /// The `2^arity`-bit value with cell 0 as the least significant bit, in
    /// big-endian hex.
    pub fn to_hex(&self) -> String {
        let bits = 1usize << self.arity;
        let digits = bits.div_ceil(4);
        let mut nibbles = vec![0u8; digits];
        for (&input, &b) in &self.cells {
            if b {
                nibbles[input as usize / 4] |= 1 << (input % 4);
            }
        }
        nibbles
            .iter()
            .rev()
            .map(|n| char::from_digit(*n as u32, 16).unwrap())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermSearch {
    Witness(TruthTable),
    Conflict(Constraint, Constraint),
}

pub fn is_anti_trivial(m: &Matrix) -> bool {
    m.is_right_among_left()
}

/// Builds the constraint table over all `2^k` assignments; stops at the
/// first cell forced to both values.
///
/// # Panics
/// If `k > 30` or `m > 63`.
pub fn solve_boolean_term(m: &Matrix) -> TermSearch {
    let k = m.var_count();
    let arity = m.left_count();
    assert!(k <= 30, "boolean term search supports at most 30 variables");
    assert!(
        arity <= 63,
        "boolean term search supports at most 63 left columns"
    );
    let rows: Vec<(Vec<usize>, usize)> = (0..m.rows())
        .map(|i| {
            (
                m.row_left(i).iter().map(|v| v.offset()).collect(),
                m.right_entry(i).offset(),
            )
        })
        .collect();
    let mut cells: BTreeMap<u64, Constraint> = BTreeMap::new();
    for assignment in 0..(1u64 << k) {
        let bit = |v: usize| (assignment >> v) & 1 == 1;
        for (row, (left, right)) in rows.iter().enumerate() {
            let input = left
                .iter()
                .enumerate()
                .fold(0u64, |acc, (l, &v)| acc | ((bit(v) as u64) << l));
            let c = Constraint {
                assignment,
                row,
                input,
                output: bit(*right),
            };
            match cells.get(&input) {
                Some(prev) if prev.output != c.output => {
                    return TermSearch::Conflict(*prev, c);
                }
                Some(_) => {}
                None => {
                    cells.insert(input, c);
                }
            }
        }
    }
    TermSearch::Witness(TruthTable {
        arity,
        cells: cells.into_iter().map(|(i, c)| (i, c.output)).collect(),
    })
}

pub fn boolean_term_witness(m: &Matrix) -> Option<TruthTable> {
    match solve_boolean_term(m) {
        TermSearch::Witness(t) => Some(t),
        TermSearch::Conflict(..) => None,
    }
}

pub fn is_trivial(m: &Matrix) -> bool {
    boolean_term_witness(m).is_none()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DegeneracyTag {
    Trivial,
    AntiTrivial,
    NonDegenerate,
}

impl DegeneracyTag {
    pub fn is_degenerate(self) -> bool {
        self != DegeneracyTag::NonDegenerate
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegeneracyVerdict {
    pub tag: DegeneracyTag,
    pub witness: Option<TruthTable>,
    pub conflict: Option<(Constraint, Constraint)>,
}

#[derive(Serialize)]
struct VerdictJson<'a> {
    tag: DegeneracyTag,
    witness: Option<String>,
    conflict: Option<&'a (Constraint, Constraint)>,
}

impl DegeneracyVerdict {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(VerdictJson {
            tag: self.tag,
            witness: self.witness.as_ref().map(TruthTable::to_hex),
            conflict: self.conflict.as_ref(),
        })
        .expect("verdict serializes")
    }
}

pub fn degeneracy_class(m: &Matrix) -> DegeneracyVerdict {
    let search = solve_boolean_term(m);
    if is_anti_trivial(m) {
        let witness = match search {
            TermSearch::Witness(t) => t,
            TermSearch::Conflict(..) => unreachable!("anti-trivial matrices admit a projection"),
        };
        return DegeneracyVerdict {
            tag: DegeneracyTag::AntiTrivial,
            witness: Some(witness),
            conflict: None,
        };
    }
    match search {
        TermSearch::Witness(t) => DegeneracyVerdict {
            tag: DegeneracyTag::NonDegenerate,
            witness: Some(t),
            conflict: None,
        },
        TermSearch::Conflict(a, b) => DegeneracyVerdict {
            tag: DegeneracyTag::Trivial,
            witness: None,
            conflict: Some((a, b)),
        },
    }
}
