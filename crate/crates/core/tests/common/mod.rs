#![allow(dead_code)]

use std::collections::BTreeSet;

use mclex_core::{validate, Matrix};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

/// Every row-major `n x (m + 1)` array over `k` variables.
pub fn raw_matrices(n: usize, m: usize, k: usize) -> Vec<Vec<Vec<u32>>> {
    let cells = n * (m + 1);
    let total = (k as u64).pow(cells as u32);
    (0..total)
        .map(|mut code| {
            let mut flat = vec![0u32; cells];
            for e in flat.iter_mut() {
                *e = (code % k as u64) as u32 + 1;
                code /= k as u64;
            }
            flat.chunks(m + 1).map(|r| r.to_vec()).collect()
        })
        .collect()
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Rows with every row permuted by `rows` and every left column by `cols`.
pub fn permute(m: &Matrix, rows: &[usize], cols: &[usize]) -> Matrix {
    let src = m.to_rows();
    let out: Vec<Vec<u32>> = rows
        .iter()
        .map(|&r| {
            let mut row: Vec<u32> = cols.iter().map(|&c| src[r][c]).collect();
            row.push(*src[r].last().unwrap());
            row
        })
        .collect();
    validate(&out).unwrap()
}

/// Applies the variable bijection `x_{i+1} -> x_{perm[i]+1}`.
pub fn rename(m: &Matrix, perm: &[usize]) -> Matrix {
    let out: Vec<Vec<u32>> = m
        .to_rows()
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|v| perm[v as usize - 1] as u32 + 1)
                .collect()
        })
        .collect();
    validate(&out).unwrap()
}

pub fn duplicate_row(m: &Matrix, row: usize) -> Matrix {
    let mut rows = m.to_rows();
    rows.insert(row, rows[row].clone());
    validate(&rows).unwrap()
}

pub fn duplicate_left(m: &Matrix, col: usize) -> Matrix {
    let rows: Vec<Vec<u32>> = m
        .to_rows()
        .into_iter()
        .map(|mut r| {
            r.insert(col, r[col]);
            r
        })
        .collect();
    validate(&rows).unwrap()
}

/// Columns outside `closed` derivable in one step, by plain enumeration of
/// every row selection and every row-wise interpretation into the variables
/// of `target`.
pub fn brute_step(
    source: &Matrix,
    target: &Matrix,
    closed: &BTreeSet<Vec<u32>>,
) -> BTreeSet<Vec<u32>> {
    let (n_s, k_s) = (source.rows(), source.var_count());
    let (n_t, k_t) = (target.rows(), target.var_count());
    let src = source.to_rows();
    let m_s = source.left_count();
    let per_row = (k_t as u64).pow(k_s as u32);
    let mut new = BTreeSet::new();
    for sel in 0..(n_s as u64).pow(n_t as u32) {
        let rho: Vec<usize> = (0..n_t)
            .map(|i| (sel / (n_s as u64).pow(i as u32) % n_s as u64) as usize)
            .collect();
        for code in 0..per_row.pow(n_t as u32) {
            let f = |i: usize, v: u32| -> u32 {
                let row_code = code / per_row.pow(i as u32) % per_row;
                (row_code / (k_t as u64).pow(v - 1) % k_t as u64) as u32 + 1
            };
            let col = |l: usize| -> Vec<u32> { (0..n_t).map(|i| f(i, src[rho[i]][l])).collect() };
            if (0..m_s).all(|l| closed.contains(&col(l))) {
                let right = col(m_s);
                if !closed.contains(&right) {
                    new.insert(right);
                }
            }
        }
    }
    new
}

pub fn brute_closure(source: &Matrix, target: &Matrix) -> BTreeSet<Vec<u32>> {
    let mut closed: BTreeSet<Vec<u32>> = target.left().iter().map(|c| c.indices()).collect();
    loop {
        let new = brute_step(source, target, &closed);
        if new.is_empty() {
            return closed;
        }
        closed.extend(new);
    }
}

/// A matrix with uniformly random entries.
pub fn random_matrix(rng: &mut StdRng, n: usize, m: usize, k: usize) -> Matrix {
    let rows: Vec<Vec<u32>> = (0..n)
        .map(|_| (0..=m).map(|_| rng.random_range(1..=k as u32)).collect())
        .collect();
    validate(&rows).unwrap()
}

pub fn seeded(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
