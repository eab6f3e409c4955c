//! Text and JSON encodings of matrices.
//!
//! Text: one row per line, space-separated 1-based indices, with `|` before
//! the right entry, e.g. `1 2 2 | 1`. Blank lines and `#` comments are
//! ignored.
//!
//! JSON: `{"n":2,"k":2,"left":[[1,2],[2,2],[2,1]],"right":[1,1]}` with the
//! left part listed column by column.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{validate, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub k: usize,
    pub left: Vec<Vec<u32>>,
    pub right: Vec<u32>,
}

impl From<&Matrix> for MatrixJson {
    fn from(m: &Matrix) -> Self {
        MatrixJson {
            n: m.rows(),
            k: m.var_count(),
            left: m.left().iter().map(|c| c.indices()).collect(),
            right: m.right().indices(),
        }
    }
}

impl TryFrom<MatrixJson> for Matrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Matrix> {
        if j.right.len() != j.n {
            return Err(Error::Shape(format!(
                "right column has {} entries but n = {}",
                j.right.len(),
                j.n
            )));
        }
        Matrix::from_columns(j.left, j.right)
    }
}

pub fn render_text(m: &Matrix) -> String {
    let mut out = String::new();
    for row in m.to_rows() {
        let (right, left) = row.split_last().unwrap();
        for v in left {
            out.push_str(&v.to_string());
            out.push(' ');
        }
        out.push_str("| ");
        out.push_str(&right.to_string());
        out.push('\n');
    }
    out
}

pub fn render_json(m: &Matrix) -> String {
    serde_json::to_string(&MatrixJson::from(m)).expect("matrix serializes")
}

pub fn render_matrix(m: &Matrix, format: Format) -> String {
    match format {
        Format::Text => render_text(m),
        Format::Json => render_json(m),
    }
}

/// Parses either encoding; input starting with `{` is read as JSON.
pub fn parse_matrix(text: &str) -> Result<Matrix> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_text(text)
    }
}

pub fn parse_json(text: &str) -> Result<Matrix> {
    let j: MatrixJson = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Matrix::try_from(j)
}

pub fn parse_text(text: &str) -> Result<Matrix> {
    let mut rows = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.split('#').next().unwrap();
        if line.trim().is_empty() {
            continue;
        }
        let err = |column: usize, message: &str| Error::Parse {
            line: line_no,
            column,
            message: message.to_string(),
        };
        let bar = line
            .find('|')
            .ok_or_else(|| err(line.len() + 1, "missing `|` before the right entry"))?;
        let mut row = Vec::new();
        for (col, tok) in tokens(&line[..bar]) {
            row.push(parse_index(tok).ok_or_else(|| err(col, "expected a positive integer"))?);
        }
        let rest: Vec<_> = tokens(&line[bar + 1..])
            .map(|(c, t)| (c + bar + 1, t))
            .collect();
        match rest.as_slice() {
            [] => return Err(err(line.len() + 1, "missing right entry after `|`")),
            [(col, tok)] => {
                row.push(parse_index(tok).ok_or_else(|| err(*col, "expected a positive integer"))?)
            }
            [_, (col, _), ..] => return Err(err(*col, "more than one right entry")),
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Shape("matrix has no rows".into()));
    }
    validate(&rows)
}

/// Whitespace-separated tokens with their 1-based column.
fn tokens(s: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut offset = 0;
    s.split_whitespace().map(move |tok| {
        let at = s[offset..].find(tok).unwrap() + offset;
        offset = at + tok.len();
        (at + 1, tok)
    })
}

fn parse_index(tok: &str) -> Option<u32> {
    let tok = tok.strip_prefix('x').unwrap_or(tok);
    tok.parse::<u32>().ok().filter(|&v| v > 0)
}
