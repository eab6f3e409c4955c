//! Extended matrices of variables and the named generators.
//!
//! A matrix has `n` rows, `m` left columns and one right column; entries are
//! variables `x_1..x_k`, stored by their 1-based index.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A variable `x_i`, identified by its 1-based index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(pub u32);

impl VarId {
    pub const FIRST: VarId = VarId(1);

    pub fn index(self) -> u32 {
        self.0
    }

    /// 0-based position, as used for packed columns and assignments.
    pub fn offset(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_offset(offset: usize) -> VarId {
        VarId(offset as u32 + 1)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// One column of a matrix: an entry per row.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Column(pub Vec<VarId>);

impl Column {
    pub fn from_indices(indices: &[u32]) -> Column {
        Column(indices.iter().map(|&i| VarId(i)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[VarId] {
        &self.0
    }

    pub fn indices(&self) -> Vec<u32> {
        self.0.iter().map(|v| v.0).collect()
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v.0)?;
        }
        write!(f, ")")
    }
}

/// An extended matrix in `matr(n, m, k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    n: usize,
    k: usize,
    left: Vec<Column>,
    right: Column,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Named {
    Mal,
    Maj,
    Ari,
}

impl std::str::FromStr for Named {
    type Err = Error;

    fn from_str(s: &str) -> Result<Named> {
        match s.to_ascii_lowercase().as_str() {
            "mal" => Ok(Named::Mal),
            "maj" => Ok(Named::Maj),
            "ari" => Ok(Named::Ari),
            other => Err(Error::Domain(format!("unknown named matrix `{other}`"))),
        }
    }
}

/// Validates a row-major array. Each row lists its left entries followed by
/// the right entry. Variable indices are compacted, preserving order, so that
/// they form `1..=k`.
pub fn validate(rows: &[Vec<u32>]) -> Result<Matrix> {
    if rows.is_empty() {
        return Err(Error::Shape("matrix has no rows".into()));
    }
    let width = rows[0].len();
    if width == 0 {
        return Err(Error::Shape(
            "row 1 is empty; a right entry is required".into(),
        ));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(Error::Shape(format!(
                "row {} has {} entries, expected {}",
                i + 1,
                row.len(),
                width
            )));
        }
    }
    let m = width - 1;
    let left = (0..m)
        .map(|l| rows.iter().map(|r| r[l]).collect::<Vec<_>>())
        .collect();
    let right = rows.iter().map(|r| r[m]).collect();
    Matrix::from_columns(left, right)
}

impl Matrix {
    /// Builds a validated matrix from column-major data.
    pub fn from_columns(left: Vec<Vec<u32>>, right: Vec<u32>) -> Result<Matrix> {
        let n = right.len();
        if n == 0 {
            return Err(Error::Shape("matrix has no rows".into()));
        }
        for (l, col) in left.iter().enumerate() {
            if col.len() != n {
                return Err(Error::Shape(format!(
                    "left column {} has {} entries, expected {}",
                    l + 1,
                    col.len(),
                    n
                )));
            }
        }
        let mut used: Vec<u32> = left.iter().flatten().chain(right.iter()).copied().collect();
        if let Some(pos) = used.iter().position(|&v| v == 0) {
            return Err(Error::Variable(format!(
                "variable index 0 at position {pos}; indices are 1-based"
            )));
        }
        used.sort_unstable();
        used.dedup();
        if used.is_empty() {
            return Err(Error::Variable("matrix has no variables".into()));
        }
        let rename = |v: u32| VarId(used.binary_search(&v).unwrap() as u32 + 1);
        let left = left
            .iter()
            .map(|c| Column(c.iter().map(|&v| rename(v)).collect()))
            .collect();
        let right = Column(right.iter().map(|&v| rename(v)).collect());
        Ok(Matrix {
            n,
            k: used.len(),
            left,
            right,
        })
    }

    /// Builds a matrix without re-indexing. `k` must bound every entry.
    pub(crate) fn from_parts(n: usize, k: usize, left: Vec<Column>, right: Column) -> Matrix {
        debug_assert_eq!(right.len(), n);
        debug_assert!(left.iter().all(|c| c.len() == n));
        debug_assert!(left
            .iter()
            .chain(std::iter::once(&right))
            .flat_map(|c| c.0.iter())
            .all(|v| v.0 >= 1 && v.0 as usize <= k));
        Matrix { n, k, left, right }
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn left_count(&self) -> usize {
        self.left.len()
    }

    pub fn var_count(&self) -> usize {
        self.k
    }

    pub fn left(&self) -> &[Column] {
        &self.left
    }

    pub fn right(&self) -> &Column {
        &self.right
    }

    pub fn entry(&self, row: usize, col: usize) -> VarId {
        self.left[col].0[row]
    }

    pub fn right_entry(&self, row: usize) -> VarId {
        self.right.0[row]
    }

    /// Left part of a row (0-based).
    pub fn row_left(&self, row: usize) -> Vec<VarId> {
        self.left.iter().map(|c| c.0[row]).collect()
    }

    /// Row-major indices, right entry last.
    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.n)
            .map(|i| {
                let mut row: Vec<u32> = self.left.iter().map(|c| c.0[i].0).collect();
                row.push(self.right.0[i].0);
                row
            })
            .collect()
    }

    /// Matrix whose j-th row is row `idx[j]` (1-based) of `self`. Variables
    /// keep their indices and `k` is unchanged.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Matrix> {
        if idx.is_empty() {
            return Err(Error::Shape("row selection is empty".into()));
        }
        for &i in idx {
            if i == 0 || i > self.n {
                return Err(Error::Index {
                    index: i,
                    rows: self.n,
                });
            }
        }
        let pick = |c: &Column| Column(idx.iter().map(|&i| c.0[i - 1]).collect());
        Ok(Matrix::from_parts(
            idx.len(),
            self.k,
            self.left.iter().map(pick).collect(),
            pick(&self.right),
        ))
    }

    /// Appends a left column; used to weaken a matrix by adding premises.
    pub fn with_extra_left(&self, col: &[u32]) -> Result<Matrix> {
        let mut left: Vec<Vec<u32>> = self.left.iter().map(Column::indices).collect();
        left.push(col.to_vec());
        Matrix::from_columns(left, self.right.indices())
    }

    pub fn is_right_among_left(&self) -> bool {
        self.left.contains(&self.right)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::render_text(self))
    }
}

pub fn gen_named(name: Named) -> Matrix {
    let rows: &[&[u32]] = match name {
        Named::Mal => &[&[1, 2, 2, 1], &[2, 2, 1, 1]],
        Named::Maj => &[&[1, 1, 2, 1], &[1, 2, 1, 1], &[2, 1, 1, 1]],
        Named::Ari => &[&[1, 2, 2, 1], &[2, 2, 1, 1], &[1, 2, 1, 1]],
    };
    let rows: Vec<Vec<u32>> = rows.iter().map(|r| r.to_vec()).collect();
    validate(&rows).expect("named matrices are well formed")
}

pub fn mal() -> Matrix {
    gen_named(Named::Mal)
}

pub fn maj() -> Matrix {
    gen_named(Named::Maj)
}

pub fn ari() -> Matrix {
    gen_named(Named::Ari)
}

/// The matrix `M_n`: one left column per pair `i < j` (in lexicographic
/// order) carrying `x_1` at rows `i` and `j`, an all-`x_1` right column, and
/// the remaining slots of each row filled with `x_2, x_3, ...` left to right.
#[allow(clippy::needless_range_loop)]
pub fn gen_mn(n: usize) -> Result<Matrix> {
    if n < 3 {
        return Err(Error::Domain(format!("M_n is defined for n >= 3, got {n}")));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let k = (n - 1) * (n - 2) / 2 + 1;
    let mut left = vec![vec![0u32; n]; pairs.len()];
    for row in 0..n {
        let mut next = 2u32;
        for (l, &(i, j)) in pairs.iter().enumerate() {
            if row == i || row == j {
                left[l][row] = 1;
            } else {
                left[l][row] = next;
                next += 1;
            }
        }
        debug_assert_eq!(next as usize, k + 1);
    }
    let left = left
        .into_iter()
        .map(|c| Column(c.into_iter().map(VarId).collect()))
        .collect();
    Ok(Matrix::from_parts(
        n,
        k,
        left,
        Column(vec![VarId::FIRST; n]),
    ))
}
