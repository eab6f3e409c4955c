//! Table-constraint search for one row selection.
//!
//! Variables are the values `f_i(x_v)` for each target row `i` and each
//! variable `x_v` occurring in the selected source row. Every left column of
//! the source yields a constraint whose scope has one variable per target
//! row and whose table is the current column set. Domains are bitmasks over
//! the target's variables; constraints keep a bitset of still-supported
//! tuples, and propagation maintains generalized arc consistency.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::packing::Packer;

pub(crate) struct Table {
    n: usize,
    words: usize,
    digits: Vec<Vec<u8>>,
    /// `index[p][a]`: tuples whose entry at position `p` is `a`.
    index: Vec<Vec<Vec<u64>>>,
    members: HashSet<u64>,
}

impl Table {
    pub(crate) fn new(packer: &Packer, columns: &[u64]) -> Table {
        let n = packer.rows();
        let k = packer.base();
        let words = columns.len().div_ceil(64).max(1);
        let digits: Vec<Vec<u8>> = columns.iter().map(|&c| packer.unpack(c)).collect();
        let mut index = vec![vec![vec![0u64; words]; k]; n];
        for (t, d) in digits.iter().enumerate() {
            for (p, &a) in d.iter().enumerate() {
                index[p][a as usize][t / 64] |= 1 << (t % 64);
            }
        }
        Table {
            n,
            words,
            digits,
            index,
            members: columns.iter().copied().collect(),
        }
    }

    pub(crate) fn contains(&self, c: u64) -> bool {
        self.members.contains(&c)
    }

    fn full(&self) -> Vec<u64> {
        let mut v = vec![u64::MAX; self.words];
        let len = self.digits.len();
        if !len.is_multiple_of(64) {
            v[self.words - 1] = (1u64 << (len % 64)) - 1;
        }
        if len == 0 {
            v.iter_mut().for_each(|w| *w = 0);
        }
        v
    }
}

/// The search problem for one row selection `rho`.
pub(crate) struct Problem<'a> {
    table: &'a Table,
    full_domain: u64,
    scopes: Vec<Vec<usize>>,
    occurs: Vec<Vec<usize>>,
    right: Vec<usize>,
    /// `slot[i][v]`: variable id of `f_i(x_{v+1})`, if `x_{v+1}` occurs in
    /// the selected row.
    slot: Vec<Vec<Option<usize>>>,
}

#[derive(Clone)]
struct State {
    dom: Vec<u64>,
    alive: Vec<Vec<u64>>,
}

/// A solution: values (0-based) of `f_i(x_v)` per target row, `None` for
/// variables not occurring in the selected row.
pub(crate) type Interps = Vec<Vec<Option<u8>>>;

pub(crate) struct Budget {
    pub(crate) used: u64,
    pub(crate) limit: u64,
}

impl Budget {
    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            return Err(Error::ResourceLimit {
                what: "CSP nodes".into(),
                limit: self.limit,
            });
        }
        Ok(())
    }
}

impl<'a> Problem<'a> {
    pub(crate) fn new(source: &Matrix, rho: &[usize], table: &'a Table, k_target: usize) -> Self {
        let k_source = source.var_count();
        let mut slot = vec![vec![None; k_source]; rho.len()];
        let mut next = 0;
        let mut id = |i: usize, v: usize, slot: &mut Vec<Vec<Option<usize>>>| {
            *slot[i][v].get_or_insert_with(|| {
                next += 1;
                next - 1
            })
        };
        let mut right = Vec::with_capacity(rho.len());
        for (i, &r) in rho.iter().enumerate() {
            for v in source.row_left(r) {
                id(i, v.offset(), &mut slot);
            }
            right.push(id(i, source.right_entry(r).offset(), &mut slot));
        }
        let mut scopes: Vec<Vec<usize>> = (0..source.left_count())
            .map(|l| {
                rho.iter()
                    .enumerate()
                    .map(|(i, &r)| slot[i][source.entry(r, l).offset()].unwrap())
                    .collect()
            })
            .collect();
        scopes.sort();
        scopes.dedup();
        let mut occurs = vec![Vec::new(); next];
        for (c, scope) in scopes.iter().enumerate() {
            for &x in scope {
                occurs[x].push(c);
            }
        }
        debug_assert_eq!(table.n, rho.len());
        Problem {
            table,
            full_domain: if k_target == 64 {
                u64::MAX
            } else {
                (1u64 << k_target) - 1
            },
            scopes,
            occurs,
            right,
            slot,
        }
    }

    /// Every conclusion outside the table that some solution produces, each
    /// with the first solution found for it. Right-column variables are
    /// branched first; once they are fixed only one completion is sought.
    pub(crate) fn conclusions(
        &self,
        packer: &Packer,
        budget: &mut Budget,
    ) -> Result<Vec<(u64, Interps)>> {
        let mut st = State {
            dom: vec![self.full_domain; self.occurs.len()],
            alive: vec![self.table.full(); self.scopes.len()],
        };
        let mut out = Vec::new();
        budget.tick()?;
        if !self.propagate(&mut st, (0..self.scopes.len()).collect()) {
            return Ok(out);
        }
        let mut found = HashSet::new();
        self.branch_right(st, packer, budget, &mut found, &mut out)?;
        Ok(out)
    }

    fn branch_right(
        &self,
        st: State,
        packer: &Packer,
        budget: &mut Budget,
        found: &mut HashSet<u64>,
        out: &mut Vec<(u64, Interps)>,
    ) -> Result<()> {
        let pick = self
            .right
            .iter()
            .copied()
            .filter(|&x| st.dom[x].count_ones() > 1)
            .min_by_key(|&x| st.dom[x].count_ones());
        match pick {
            None => {
                let digits: Vec<u8> = self
                    .right
                    .iter()
                    .map(|&x| st.dom[x].trailing_zeros() as u8)
                    .collect();
                let c = packer.pack(&digits);
                if self.table.contains(c) || found.contains(&c) {
                    return Ok(());
                }
                if let Some(sol) = self.complete(st, budget)? {
                    found.insert(c);
                    out.push((c, self.interps(&sol)));
                }
                Ok(())
            }
            Some(x) => {
                for a in bits(st.dom[x]) {
                    budget.tick()?;
                    let mut next = st.clone();
                    if self.assign(&mut next, x, a) {
                        self.branch_right(next, packer, budget, found, out)?;
                    }
                }
                Ok(())
            }
        }
    }

    /// First solution extending `st`, smallest domain first, values ascending.
    fn complete(&self, st: State, budget: &mut Budget) -> Result<Option<Vec<u64>>> {
        let pick = (0..st.dom.len())
            .filter(|&x| st.dom[x].count_ones() > 1)
            .min_by_key(|&x| st.dom[x].count_ones());
        let Some(x) = pick else {
            return Ok(Some(st.dom));
        };
        for a in bits(st.dom[x]) {
            budget.tick()?;
            let mut next = st.clone();
            if self.assign(&mut next, x, a) {
                if let Some(sol) = self.complete(next, budget)? {
                    return Ok(Some(sol));
                }
            }
        }
        Ok(None)
    }

    fn assign(&self, st: &mut State, x: usize, a: u32) -> bool {
        st.dom[x] = 1 << a;
        self.propagate(st, self.occurs[x].clone())
    }

    fn propagate(&self, st: &mut State, mut queue: Vec<usize>) -> bool {
        let mut queued = vec![false; self.scopes.len()];
        for &c in &queue {
            queued[c] = true;
        }
        let words = self.table.words;
        let mut mask = vec![0u64; words];
        while let Some(c) = queue.pop() {
            queued[c] = false;
            let scope = &self.scopes[c];
            for (p, &x) in scope.iter().enumerate() {
                if st.dom[x] == self.full_domain {
                    continue;
                }
                mask.iter_mut().for_each(|w| *w = 0);
                for a in bits(st.dom[x]) {
                    let idx = &self.table.index[p][a as usize];
                    for (m, i) in mask.iter_mut().zip(idx) {
                        *m |= i;
                    }
                }
                for (live, m) in st.alive[c].iter_mut().zip(&mask) {
                    *live &= m;
                }
            }
            if st.alive[c].iter().all(|&w| w == 0) {
                return false;
            }
            for (p, &x) in scope.iter().enumerate() {
                let mut supported = 0u64;
                for a in bits(st.dom[x]) {
                    let idx = &self.table.index[p][a as usize];
                    if (0..words).any(|w| st.alive[c][w] & idx[w] != 0) {
                        supported |= 1 << a;
                    }
                }
                if supported != st.dom[x] {
                    if supported == 0 {
                        return false;
                    }
                    st.dom[x] = supported;
                    for &d in &self.occurs[x] {
                        if d != c && !queued[d] {
                            queued[d] = true;
                            queue.push(d);
                        }
                    }
                }
            }
        }
        true
    }

    fn interps(&self, sol: &[u64]) -> Interps {
        self.slot
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| s.map(|x| sol[x].trailing_zeros() as u8))
                    .collect()
            })
            .collect()
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = u32> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let a = m.trailing_zeros();
            m &= m - 1;
            Some(a)
        }
    })
}
