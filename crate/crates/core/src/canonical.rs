//! Canonical forms up to row/left-column duplication, row and left-column
//! permutation, and bijective renaming of variables.
//!
//! The canonical form is the lexicographically least encoding
//! `right column ++ left columns` over all row orders and renamings, with
//! left columns sorted. For a fixed row order the least renaming is found
//! greedily: the right column is renamed by first occurrence, then the
//! smallest column under the partial renaming (fresh variables numbered by
//! first occurrence) is emitted next. Ties between columns branch.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;

use crate::matrix::{Column, Matrix, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalMatrix(Matrix);

impl CanonicalMatrix {
    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    fn key(&self) -> (usize, usize, usize, &Column, &[Column]) {
        (
            self.0.rows(),
            self.0.left_count(),
            self.0.var_count(),
            self.0.right(),
            self.0.left(),
        )
    }
}

impl Deref for CanonicalMatrix {
    type Target = Matrix;

    fn deref(&self) -> &Matrix {
        &self.0
    }
}

impl Ord for CanonicalMatrix {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for CanonicalMatrix {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CanonicalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Removes duplicate rows and duplicate left columns (keeping first
/// occurrences) until neither remains.
pub fn dedup(m: &Matrix) -> Matrix {
    let mut rows = m.to_rows();
    loop {
        let before = (rows.len(), rows[0].len());
        let mut seen = Vec::new();
        rows.retain(|r| {
            if seen.contains(r) {
                false
            } else {
                seen.push(r.clone());
                true
            }
        });
        let width = rows[0].len();
        let mut keep = Vec::new();
        let mut cols: Vec<Vec<u32>> = Vec::new();
        for l in 0..width - 1 {
            let c: Vec<u32> = rows.iter().map(|r| r[l]).collect();
            if !cols.contains(&c) {
                cols.push(c);
                keep.push(l);
            }
        }
        keep.push(width - 1);
        rows = rows
            .iter()
            .map(|r| keep.iter().map(|&l| r[l]).collect())
            .collect();
        if (rows.len(), rows[0].len()) == before {
            break;
        }
    }
    crate::matrix::validate(&rows).expect("dedup preserves shape")
}

pub fn canonicalize(m: &Matrix) -> CanonicalMatrix {
    let m = dedup(m);
    let n = m.rows();
    let mut best: Option<(Vec<usize>, Vec<u32>)> = None;
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let cols: Vec<Vec<u32>> = m
            .left()
            .iter()
            .map(|c| perm.iter().map(|&i| c.entries()[i].0).collect())
            .collect();
        let right: Vec<u32> = perm.iter().map(|&i| m.right_entry(i).0).collect();
        let mut search = Search {
            cols: &cols,
            best: best.as_ref().map(|(_, enc)| enc.clone()),
        };
        let mut rename = HashMap::new();
        let mut out = Vec::with_capacity(n * (cols.len() + 1));
        let mut next = 1;
        for &v in &right {
            out.push(label(&mut rename, &mut next, v));
        }
        let used = vec![false; cols.len()];
        let improved = search.run(&mut out, &mut rename, next, used);
        if improved {
            best = Some((perm.clone(), search.best.unwrap()));
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let (_, enc) = best.expect("at least one row order");
    let right = Column(enc[..n].iter().map(|&v| VarId(v)).collect());
    let left: Vec<Column> = enc[n..]
        .chunks(n)
        .map(|c| Column(c.iter().map(|&v| VarId(v)).collect()))
        .collect();
    let k = enc.iter().copied().max().unwrap_or(1) as usize;
    CanonicalMatrix(Matrix::from_parts(n, k, left, right))
}

fn label(rename: &mut HashMap<u32, u32>, next: &mut u32, v: u32) -> u32 {
    *rename.entry(v).or_insert_with(|| {
        *next += 1;
        *next - 1
    })
}

struct Search<'a> {
    cols: &'a [Vec<u32>],
    best: Option<Vec<u32>>,
}

impl Search<'_> {
    /// Extends `out` with the remaining columns; returns whether `best` was
    /// replaced by a strictly smaller encoding.
    fn run(
        &mut self,
        out: &mut Vec<u32>,
        rename: &mut HashMap<u32, u32>,
        next: u32,
        used: Vec<bool>,
    ) -> bool {
        if let Some(best) = &self.best {
            if out.as_slice() > &best[..out.len()] {
                return false;
            }
        }
        if used.iter().all(|&u| u) {
            if self
                .best
                .as_ref()
                .is_none_or(|b| out.as_slice() < b.as_slice())
            {
                self.best = Some(out.clone());
                return true;
            }
            return false;
        }
        let mut min: Option<Vec<u32>> = None;
        let mut ties = Vec::new();
        for (l, col) in self.cols.iter().enumerate() {
            if used[l] {
                continue;
            }
            let r = render(col, rename, next);
            match min.as_ref().map(|m| r.cmp(m)) {
                None | Some(Ordering::Less) => {
                    min = Some(r);
                    ties.clear();
                    ties.push(l);
                }
                Some(Ordering::Equal) => ties.push(l),
                Some(Ordering::Greater) => {}
            }
        }
        let rendered = min.unwrap();
        let mut improved = false;
        for l in ties {
            let mut rename = rename.clone();
            let mut next = next;
            for &v in &self.cols[l] {
                label(&mut rename, &mut next, v);
            }
            let mut used = used.clone();
            used[l] = true;
            let len = out.len();
            out.extend_from_slice(&rendered);
            improved |= self.run(out, &mut rename, next, used);
            out.truncate(len);
        }
        improved
    }
}

fn render(col: &[u32], rename: &HashMap<u32, u32>, mut next: u32) -> Vec<u32> {
    let mut fresh: Vec<(u32, u32)> = Vec::new();
    col.iter()
        .map(|v| {
            if let Some(&l) = rename.get(v) {
                l
            } else if let Some(&(_, l)) = fresh.iter().find(|(w, _)| w == v) {
                l
            } else {
                fresh.push((*v, next));
                next += 1;
                next - 1
            }
        })
        .collect()
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
