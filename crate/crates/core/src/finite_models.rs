//! Brute-force semantics on finite relations.
//!
//! [`interp_closed`] checks strict closedness of a finite relation under a
//! matrix by scanning every row-wise interpretation. The Boolean oracle runs
//! that scan over compatible relations of the two-element Boolean algebra:
//! subalgebras of `2^J`, with the `J` coordinates grouped into one block per
//! row so that row `i` ranges over the Boolean algebra `2^{b_i}` (`b_i` may
//! be 0). These are independent of the term-based triviality test.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const DEFAULT_INTERP_CAP: u64 = 1 << 24;

/// A relation `R ⊆ X_1 × ... × X_n` with `X_i = {0, .., carriers[i] - 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteRelation {
    carriers: Vec<usize>,
    tuples: BTreeSet<Vec<usize>>,
}

impl FiniteRelation {
    pub fn new(carriers: Vec<usize>, tuples: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        let tuples: BTreeSet<Vec<usize>> = tuples.into_iter().collect();
        for t in &tuples {
            if t.len() != carriers.len() {
                return Err(Error::Shape(format!(
                    "tuple {t:?} has {} entries, arity is {}",
                    t.len(),
                    carriers.len()
                )));
            }
            if let Some(i) = (0..t.len()).find(|&i| t[i] >= carriers[i]) {
                return Err(Error::Domain(format!(
                    "tuple {t:?}: entry {} is outside carrier {i} of size {}",
                    t[i], carriers[i]
                )));
            }
        }
        Ok(FiniteRelation { carriers, tuples })
    }

    pub fn arity(&self) -> usize {
        self.carriers.len()
    }

    pub fn carriers(&self) -> &[usize] {
        &self.carriers
    }

    pub fn tuples(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.tuples.iter()
    }

    pub fn contains(&self, t: &[usize]) -> bool {
        self.tuples.contains(t)
    }

    /// Relation file: a header `arity c_1 .. c_n`, then one tuple per line.
    pub fn parse(text: &str) -> Result<FiniteRelation> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
            .filter(|(_, l)| !l.is_empty());
        let parse_nums = |line: usize, l: &str| -> Result<Vec<usize>> {
            l.split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| Error::Parse {
                        line,
                        column: l.find(tok).unwrap() + 1,
                        message: format!("expected a non-negative integer, got `{tok}`"),
                    })
                })
                .collect()
        };
        let (hl, header) = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            column: 1,
            message: "missing header `arity c_1 .. c_n`".into(),
        })?;
        let header = parse_nums(hl, header)?;
        let (&arity, carriers) = header.split_first().unwrap();
        if carriers.len() != arity {
            return Err(Error::Parse {
                line: hl,
                column: 1,
                message: format!("arity {arity} but {} carrier sizes", carriers.len()),
            });
        }
        let mut tuples = Vec::new();
        for (line, l) in lines {
            let t = parse_nums(line, l)?;
            if t.len() != arity {
                return Err(Error::Parse {
                    line,
                    column: 1,
                    message: format!("tuple has {} entries, arity is {arity}", t.len()),
                });
            }
            tuples.push(t);
        }
        FiniteRelation::new(carriers.to_vec(), tuples)
    }

    pub fn render(&self) -> String {
        let mut out = self.arity().to_string();
        for c in &self.carriers {
            out.push_str(&format!(" {c}"));
        }
        out.push('\n');
        for t in &self.tuples {
            let row: Vec<String> = t.iter().map(|v| v.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Interpretation functions `f_i(x_v)` (0-based values, one row per matrix
/// row) under which every left column lies in the relation but the right
/// column does not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub interps: Vec<Vec<usize>>,
    pub left: Vec<Vec<usize>>,
    pub right: Vec<usize>,
}

impl Counterexample {
    /// Recomputes the interpreted columns and checks membership.
    pub fn replays(&self, r: &FiniteRelation, m: &Matrix) -> bool {
        if self.interps.len() != m.rows() || r.arity() != m.rows() {
            return false;
        }
        for (i, f) in self.interps.iter().enumerate() {
            if f.len() != m.var_count() || f.iter().any(|&a| a >= r.carriers[i]) {
                return false;
            }
        }
        let (left, right) = interpret(m, &self.interps);
        left == self.left
            && right == self.right
            && left.iter().all(|c| r.contains(c))
            && !r.contains(&right)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosednessReport {
    pub closed: bool,
    pub counterexample: Option<Counterexample>,
}

fn interpret(m: &Matrix, interps: &[Vec<usize>]) -> (Vec<Vec<usize>>, Vec<usize>) {
    let left = (0..m.left_count())
        .map(|l| {
            (0..m.rows())
                .map(|i| interps[i][m.entry(i, l).offset()])
                .collect()
        })
        .collect();
    let right = (0..m.rows())
        .map(|i| interps[i][m.right_entry(i).offset()])
        .collect();
    (left, right)
}

/// Scans all `∏ |X_i|^k` interpretations in lexicographic order of
/// `(f_1(x_1), .., f_1(x_k), f_2(x_1), ..)` and reports the first
/// counterexample.
pub fn interp_closed(r: &FiniteRelation, m: &Matrix, cap: u64) -> Result<ClosednessReport> {
    if r.arity() != m.rows() {
        return Err(Error::Shape(format!(
            "relation arity {} does not match {} matrix rows",
            r.arity(),
            m.rows()
        )));
    }
    let k = m.var_count();
    let total = r.carriers.iter().try_fold(1u64, |acc, &c| {
        (0..k).try_fold(acc, |a, _| a.checked_mul(c as u64))
    });
    match total {
        Some(t) if t <= cap => {}
        _ => {
            return Err(Error::ResourceLimit {
                what: "interpretation scan".into(),
                limit: cap,
            })
        }
    }
    let closed = ClosednessReport {
        closed: true,
        counterexample: None,
    };
    if r.carriers.contains(&0) {
        return Ok(closed);
    }
    let mut interps = vec![vec![0usize; k]; m.rows()];
    loop {
        let (left, right) = interpret(m, &interps);
        if left.iter().all(|c| r.contains(c)) && !r.contains(&right) {
            return Ok(ClosednessReport {
                closed: false,
                counterexample: Some(Counterexample {
                    interps,
                    left,
                    right,
                }),
            });
        }
        if !advance(&mut interps, &r.carriers) {
            return Ok(closed);
        }
    }
}

fn advance(interps: &mut [Vec<usize>], carriers: &[usize]) -> bool {
    for i in (0..interps.len()).rev() {
        for v in (0..interps[i].len()).rev() {
            interps[i][v] += 1;
            if interps[i][v] < carriers[i] {
                return true;
            }
            interps[i][v] = 0;
        }
    }
    false
}

/// Subalgebras of `2^j` as sets of bitmask tuples (bit `p` is coordinate
/// `p`), in increasing order of their membership bitmask.
fn bool_subalgebras(j: usize) -> Vec<Vec<u32>> {
    let size = 1usize << j;
    let top = (size - 1) as u32;
    let mut out = Vec::new();
    for subset in 0u64..(1u64 << size) {
        let has = |t: u32| subset >> t & 1 == 1;
        if !has(0) || !has(top) {
            continue;
        }
        let members: Vec<u32> = (0..size as u32).filter(|&t| has(t)).collect();
        let closed = members
            .iter()
            .all(|&a| has(!a & top) && members.iter().all(|&b| has(a & b) && has(a | b)));
        if closed {
            out.push(members);
        }
    }
    out
}

/// The `j`-ary compatible relations of the two-element Boolean algebra.
pub fn enumerate_bool_relations(j: usize) -> Result<Vec<FiniteRelation>> {
    if j > 4 {
        return Err(Error::Domain(format!(
            "Boolean relations are enumerated up to arity 4, got {j}"
        )));
    }
    Ok(bool_subalgebras(j)
        .into_iter()
        .map(|members| {
            let tuples = members
                .iter()
                .map(|&t| (0..j).map(|p| (t >> p & 1) as usize).collect());
            FiniteRelation::new(vec![2; j], tuples).unwrap()
        })
        .collect())
}

/// Ways to write `total` as an ordered sum of `parts` non-negative integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    (0..=total)
        .flat_map(|first| {
            compositions(total - first, parts - 1)
                .into_iter()
                .map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
        })
        .collect()
}

/// Groups the coordinates of a subalgebra of `2^J` into blocks; block `i`
/// becomes one coordinate ranging over `2^{blocks[i]}`.
fn blocked_relation(members: &[u32], blocks: &[usize]) -> FiniteRelation {
    let carriers = blocks.iter().map(|&b| 1usize << b).collect();
    let tuples = members.iter().map(|&t| {
        let mut shift = 0;
        blocks
            .iter()
            .map(|&b| {
                let v = (t >> shift) as usize & ((1 << b) - 1);
                shift += b;
                v
            })
            .collect()
    });
    FiniteRelation::new(carriers, tuples).unwrap()
}

/// A compatible relation of the Boolean algebra that is not strictly
/// closed under `m`, searching subalgebras of `2^J` for `J <= arity_cap`.
pub fn bool_refutation(
    m: &Matrix,
    arity_cap: usize,
    interp_cap: u64,
) -> Result<Option<(FiniteRelation, Counterexample)>> {
    if m.rows() > 3 {
        return Err(Error::Shape(format!(
            "unchecked: exhaustive Boolean relations need at most 3 rows, got {}",
            m.rows()
        )));
    }
    if arity_cap > 3 {
        return Err(Error::Domain(format!(
            "Boolean relation arity cap is at most 3, got {arity_cap}"
        )));
    }
    for j in 1..=arity_cap {
        let algebras = bool_subalgebras(j);
        for blocks in compositions(j, m.rows()) {
            for members in &algebras {
                let r = blocked_relation(members, &blocks);
                let report = interp_closed(&r, m, interp_cap)?;
                if let Some(cx) = report.counterexample {
                    return Ok(Some((r, cx)));
                }
            }
        }
    }
    Ok(None)
}

pub fn bool_has_closed_relations(m: &Matrix, arity_cap: usize) -> Result<bool> {
    Ok(bool_refutation(m, arity_cap, DEFAULT_INTERP_CAP)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ari, maj, mal, validate};

    fn rel(tuples: &[[usize; 2]]) -> FiniteRelation {
        FiniteRelation::new(vec![2, 2], tuples.iter().map(|t| t.to_vec())).unwrap()
    }

    #[test]
    fn diagonal_is_difunctional() {
        let r = rel(&[[0, 0], [1, 1]]);
        assert!(
            interp_closed(&r, &mal(), DEFAULT_INTERP_CAP)
                .unwrap()
                .closed
        );
    }

    #[test]
    fn order_relation_is_not_difunctional() {
        let r = rel(&[[0, 0], [0, 1], [1, 1]]);
        let rep = interp_closed(&r, &mal(), DEFAULT_INTERP_CAP).unwrap();
        let cx = rep.counterexample.unwrap();
        assert_eq!(cx.interps, vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(cx.left, vec![vec![1, 1], vec![0, 1], vec![0, 0]]);
        assert_eq!(cx.right, vec![1, 0]);
        assert!(cx.replays(&r, &mal()));
    }

    #[test]
    fn anti_trivial_is_always_closed() {
        let m = validate(&[vec![1, 2, 2], vec![2, 1, 1]]).unwrap();
        let r = rel(&[[0, 1]]);
        assert!(interp_closed(&r, &m, DEFAULT_INTERP_CAP).unwrap().closed);
    }

    #[test]
    fn scan_cap() {
        let r = rel(&[[0, 0]]);
        assert!(matches!(
            interp_closed(&r, &mal(), 15),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn bool_relation_counts() {
        let one = enumerate_bool_relations(1).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].tuples().count(), 2);
        let two = enumerate_bool_relations(2).unwrap();
        assert_eq!(
            two,
            vec![
                rel(&[[0, 0], [1, 1]]),
                rel(&[[0, 0], [0, 1], [1, 0], [1, 1]])
            ]
        );
        // Subalgebras of 2^n correspond to partitions of the coordinates.
        assert_eq!(enumerate_bool_relations(3).unwrap().len(), 5);
        assert_eq!(enumerate_bool_relations(4).unwrap().len(), 15);
    }

    #[test]
    fn bool_oracle_on_named() {
        assert!(bool_has_closed_relations(&mal(), 3).unwrap());
        assert!(bool_has_closed_relations(&maj(), 3).unwrap());
        assert!(bool_has_closed_relations(&ari(), 3).unwrap());
        let trivial = validate(&[vec![1, 2]]).unwrap();
        assert!(!bool_has_closed_relations(&trivial, 3).unwrap());
    }

    #[test]
    fn bool_refutation_replays() {
        let trivial = validate(&[vec![1, 2]]).unwrap();
        let (r, cx) = bool_refutation(&trivial, 3, DEFAULT_INTERP_CAP)
            .unwrap()
            .unwrap();
        assert!(cx.replays(&r, &trivial));
        assert_eq!(r.carriers(), &[4]);
    }

    #[test]
    fn too_many_rows() {
        let m = crate::matrix::gen_mn(4).unwrap();
        assert!(matches!(
            bool_has_closed_relations(&m, 3),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn relation_file() {
        let r = FiniteRelation::parse("2 2 2\n0 0\n# comment\n1 1\n").unwrap();
        assert_eq!(r, rel(&[[0, 0], [1, 1]]));
        assert_eq!(FiniteRelation::parse(&r.render()).unwrap(), r);
        assert!(matches!(
            FiniteRelation::parse("2 2 2\n0 2\n"),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            FiniteRelation::parse("2 2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(3, 3).len(), 10);
        assert_eq!(compositions(2, 1), vec![vec![2]]);
    }
}
