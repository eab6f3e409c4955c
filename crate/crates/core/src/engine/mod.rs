//! Deciding `M ⇒_lex N` by saturation.
//!
//! Starting from the left columns of `N`, a column `c` is derivable when some
//! matrix `M'` whose rows are rows of `M` (selected by `rho`, repetition
//! allowed) has a row-wise interpretation into `{x_1..x_kN}` sending every
//! left column of `M'` to a derivable column and the right column to `c`.
//! `M ⇒_lex N` holds exactly when the right column of `N` is derivable.
//!
//! Saturation runs in rounds. Each round solves one search problem per row
//! selection against a fixed snapshot of the column set, then merges the new
//! conclusions in row-selection order, so results do not depend on how the
//! selections are scheduled across threads.

mod csp;
mod packing;

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Column, Matrix, VarId};

use csp::{Budget, Interps, Problem, Table};
use packing::Packer;

pub const DEFAULT_CSP_NODES: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Cap on search nodes across one query.
    pub csp_nodes: u64,
    pub parallel: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            csp_nodes: DEFAULT_CSP_NODES,
            parallel: true,
        }
    }
}

/// One application of the derivation rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationStep {
    /// Source row (1-based) used for each target row.
    pub rho: Vec<usize>,
    /// `interps[i][v]` is `f_i(x_{v+1})`.
    pub interps: Vec<Vec<VarId>>,
    pub premises: Vec<Column>,
    pub conclusion: Column,
}

impl DerivationStep {
    pub fn new(source: &Matrix, rho: Vec<usize>, interps: Vec<Vec<VarId>>) -> DerivationStep {
        let (premises, conclusion) = apply(source, &rho, &interps);
        DerivationStep {
            rho,
            interps,
            premises,
            conclusion,
        }
    }

    /// Whether premises and conclusion are what `rho` and `interps` give.
    pub fn is_consistent(&self, source: &Matrix) -> bool {
        let rows_ok = self.rho.iter().all(|&r| r >= 1 && r <= source.rows());
        let shape_ok = self.interps.len() == self.rho.len()
            && self.interps.iter().all(|f| f.len() == source.var_count());
        if !(rows_ok && shape_ok) {
            return false;
        }
        let (premises, conclusion) = apply(source, &self.rho, &self.interps);
        premises == self.premises && conclusion == self.conclusion
    }
}

fn apply(source: &Matrix, rho: &[usize], interps: &[Vec<VarId>]) -> (Vec<Column>, Column) {
    let premises = (0..source.left_count())
        .map(|l| {
            Column(
                rho.iter()
                    .zip(interps)
                    .map(|(&r, f)| f[source.entry(r - 1, l).offset()])
                    .collect(),
            )
        })
        .collect();
    let conclusion = Column(
        rho.iter()
            .zip(interps)
            .map(|(&r, f)| f[source.right_entry(r - 1).offset()])
            .collect(),
    );
    (premises, conclusion)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub rounds: usize,
    pub derived: usize,
    pub rho_maps: u64,
    pub csp_nodes: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// The set of derivable columns reached so far, with a derivation for every
/// non-seed member.
#[derive(Debug, Clone)]
pub struct ClosureState {
    packer: Packer,
    columns: Vec<u64>,
    position: HashMap<u64, usize>,
    seed_len: usize,
    trace: HashMap<u64, DerivationStep>,
    frontier: Vec<u64>,
}

impl ClosureState {
    /// The left columns of `target`, over its variables.
    pub fn seed(target: &Matrix) -> Result<ClosureState> {
        let packer = Packer::new(target.rows(), target.var_count())?;
        let mut state = ClosureState {
            packer,
            columns: Vec::new(),
            position: HashMap::new(),
            seed_len: 0,
            trace: HashMap::new(),
            frontier: Vec::new(),
        };
        for col in target.left() {
            let c = state.packer.pack_column(col);
            if !state.position.contains_key(&c) {
                state.position.insert(c, state.columns.len());
                state.columns.push(c);
            }
        }
        state.seed_len = state.columns.len();
        state.frontier = state.columns.clone();
        Ok(state)
    }

    /// A state holding exactly `columns` (which must include the seed), for
    /// auditing a claimed closure.
    pub fn with_columns(target: &Matrix, columns: &[Column]) -> Result<ClosureState> {
        let mut state = ClosureState::seed(target)?;
        for col in columns {
            if col.len() != target.rows()
                || col
                    .entries()
                    .iter()
                    .any(|v| v.0 == 0 || v.offset() >= target.var_count())
            {
                return Err(Error::Shape(format!(
                    "column {col} is not over the target's rows and variables"
                )));
            }
            let c = state.packer.pack_column(col);
            if !state.position.contains_key(&c) {
                state.position.insert(c, state.columns.len());
                state.columns.push(c);
            }
        }
        Ok(state)
    }

    pub fn universe(&self) -> usize {
        self.packer.base()
    }

    pub fn rows(&self) -> usize {
        self.packer.rows()
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Members in insertion order, seed first.
    pub fn columns(&self) -> Vec<Column> {
        self.columns
            .iter()
            .map(|&c| self.packer.column(c))
            .collect()
    }

    pub fn seed_columns(&self) -> Vec<Column> {
        self.columns[..self.seed_len]
            .iter()
            .map(|&c| self.packer.column(c))
            .collect()
    }

    /// Columns added by the most recent round.
    pub fn frontier(&self) -> Vec<Column> {
        self.frontier
            .iter()
            .map(|&c| self.packer.column(c))
            .collect()
    }

    pub fn contains(&self, col: &Column) -> bool {
        col.len() == self.rows()
            && col
                .entries()
                .iter()
                .all(|v| v.0 >= 1 && v.offset() < self.universe())
            && self.position.contains_key(&self.packer.pack_column(col))
    }

    pub fn trace_of(&self, col: &Column) -> Option<&DerivationStep> {
        self.trace.get(&self.packer.pack_column(col))
    }

    /// The steps needed to derive `col`, in the order they were found.
    pub fn derivation_of(&self, col: &Column) -> Option<Vec<DerivationStep>> {
        if !self.contains(col) {
            return None;
        }
        let mut needed = HashSet::new();
        let mut stack = vec![self.packer.pack_column(col)];
        while let Some(c) = stack.pop() {
            if self.position[&c] < self.seed_len || !needed.insert(c) {
                continue;
            }
            for p in &self.trace[&c].premises {
                stack.push(self.packer.pack_column(p));
            }
        }
        let mut order: Vec<u64> = needed.into_iter().collect();
        order.sort_by_key(|c| self.position[c]);
        Some(order.iter().map(|c| self.trace[c].clone()).collect())
    }

    fn insert(&mut self, c: u64, step: DerivationStep) -> bool {
        if self.position.contains_key(&c) {
            return false;
        }
        self.position.insert(c, self.columns.len());
        self.columns.push(c);
        self.trace.insert(c, step);
        true
    }
}

/// Columns derivable in one step from `state` that are not yet members.
pub fn one_step(source: &Matrix, state: &ClosureState, limits: &Limits) -> Result<Vec<Column>> {
    let mut stats = Stats::default();
    let found = round(source, state, limits, &mut stats)?;
    Ok(found
        .into_iter()
        .map(|(c, _)| state.packer.column(c))
        .collect())
}

/// A row selection, its new conclusions and the nodes spent.
type Solved = (Vec<usize>, Vec<(u64, Interps)>, u64);

fn round(
    source: &Matrix,
    state: &ClosureState,
    limits: &Limits,
    stats: &mut Stats,
) -> Result<Vec<(u64, DerivationStep)>> {
    let n_target = state.rows();
    let n_source = source.rows() as u64;
    let selections = (0..n_target)
        .try_fold(1u64, |acc, _| acc.checked_mul(n_source))
        .filter(|&s| s <= limits.csp_nodes)
        .ok_or_else(|| Error::ResourceLimit {
            what: format!("row selections {}^{}", n_source, n_target),
            limit: limits.csp_nodes,
        })?;
    let table = Table::new(&state.packer, &state.columns);
    let remaining = limits.csp_nodes.saturating_sub(stats.csp_nodes);
    let k_target = state.universe();
    let solve = |s: u64| -> Result<Solved> {
        let mut rho = vec![0usize; n_target];
        let mut rest = s;
        for r in rho.iter_mut().rev() {
            *r = (rest % n_source) as usize;
            rest /= n_source;
        }
        let problem = Problem::new(source, &rho, &table, k_target);
        let mut budget = Budget {
            used: 0,
            limit: remaining,
        };
        let found = problem.conclusions(&state.packer, &mut budget)?;
        Ok((rho, found, budget.used))
    };
    let results: Vec<_> = if limits.parallel {
        (0..selections).into_par_iter().map(solve).collect()
    } else {
        (0..selections).map(solve).collect()
    };
    stats.rho_maps += selections;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for r in results {
        let (rho, found, used) = r?;
        stats.csp_nodes += used;
        if stats.csp_nodes > limits.csp_nodes {
            return Err(Error::ResourceLimit {
                what: "CSP nodes".into(),
                limit: limits.csp_nodes,
            });
        }
        for (c, interps) in found {
            if seen.insert(c) {
                let interps = interps
                    .into_iter()
                    .map(|row| {
                        row.into_iter()
                            .map(|v| VarId::from_offset(v.unwrap_or(0) as usize))
                            .collect()
                    })
                    .collect();
                let rho1 = rho.iter().map(|r| r + 1).collect();
                out.push((c, DerivationStep::new(source, rho1, interps)));
            }
        }
    }
    Ok(out)
}

fn saturate(
    source: &Matrix,
    target: &Matrix,
    limits: &Limits,
    stop_at: Option<&Column>,
) -> Result<(ClosureState, Stats)> {
    let start = Instant::now();
    let mut state = ClosureState::seed(target)?;
    let mut stats = Stats::default();
    let done = |s: &ClosureState| stop_at.is_some_and(|c| s.contains(c));
    while !done(&state) {
        stats.rounds += 1;
        let found = round(source, &state, limits, &mut stats)?;
        state.frontier.clear();
        for (c, step) in found {
            debug_assert!(step.is_consistent(source));
            if state.insert(c, step) {
                state.frontier.push(c);
            }
        }
        stats.derived += state.frontier.len();
        if state.frontier.is_empty() {
            break;
        }
    }
    stats.elapsed = start.elapsed();
    Ok((state, stats))
}

/// Least set of columns containing the left columns of `target` and closed
/// under derivation from `source`.
pub fn derive_closure(source: &Matrix, target: &Matrix, limits: &Limits) -> Result<ClosureState> {
    saturate(source, target, limits, None).map(|(s, _)| s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Steps deriving the target's right column from its left columns.
    Derivation { steps: Vec<DerivationStep> },
    /// A set closed under derivation that contains the target's left columns
    /// but not its right column.
    Closed { columns: Vec<Column> },
}

impl Certificate {
    /// Re-checks the certificate against `source` and `target`. Derivations
    /// are replayed step by step; closed sets are audited with one more
    /// round of derivation.
    pub fn replay(&self, source: &Matrix, target: &Matrix, limits: &Limits) -> Result<bool> {
        match self {
            Certificate::Derivation { steps } => {
                let mut have: HashSet<Column> = target.left().iter().cloned().collect();
                for step in steps {
                    if !step.is_consistent(source)
                        || step.rho.len() != target.rows()
                        || !step.premises.iter().all(|p| have.contains(p))
                    {
                        return Ok(false);
                    }
                    have.insert(step.conclusion.clone());
                }
                Ok(have.contains(target.right()))
            }
            Certificate::Closed { columns } => {
                let state = ClosureState::with_columns(target, columns)?;
                if state.len() != columns.len() || state.contains(target.right()) {
                    return Ok(false);
                }
                Ok(one_step(source, &state, limits)?.is_empty())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImplicationVerdict {
    pub holds: bool,
    pub certificate: Certificate,
    pub stats: Stats,
}

pub fn implies_lex(source: &Matrix, target: &Matrix) -> Result<ImplicationVerdict> {
    implies_lex_with(source, target, &Limits::default())
}

pub fn implies_lex_with(
    source: &Matrix,
    target: &Matrix,
    limits: &Limits,
) -> Result<ImplicationVerdict> {
    let (state, stats) = saturate(source, target, limits, Some(target.right()))?;
    let holds = state.contains(target.right());
    let certificate = if holds {
        Certificate::Derivation {
            steps: state.derivation_of(target.right()).unwrap(),
        }
    } else {
        Certificate::Closed {
            columns: state.columns(),
        }
    };
    Ok(ImplicationVerdict {
        holds,
        certificate,
        stats,
    })
}

pub fn equivalent_lex(a: &Matrix, b: &Matrix) -> Result<bool> {
    equivalent_lex_with(a, b, &Limits::default())
}

pub fn equivalent_lex_with(a: &Matrix, b: &Matrix, limits: &Limits) -> Result<bool> {
    Ok(implies_lex_with(a, b, limits)?.holds && implies_lex_with(b, a, limits)?.holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ari, gen_mn, maj, mal, validate};

    fn holds(a: &Matrix, b: &Matrix) -> bool {
        implies_lex(a, b).unwrap().holds
    }

    #[test]
    fn named_inclusions() {
        assert!(holds(&ari(), &mal()));
        assert!(holds(&ari(), &maj()));
        assert!(!holds(&maj(), &mal()));
        assert!(!holds(&mal(), &maj()));
    }

    #[test]
    fn m3_m4() {
        let m3 = gen_mn(3).unwrap();
        let m4 = gen_mn(4).unwrap();
        assert!(holds(&m4, &m3));
        assert!(!holds(&m3, &m4));
    }

    #[test]
    fn m3_to_m4_closure_is_the_seed() {
        let m3 = gen_mn(3).unwrap();
        let m4 = gen_mn(4).unwrap();
        let closure = derive_closure(&m3, &m4, &Limits::default()).unwrap();
        assert_eq!(closure.columns(), m4.left().to_vec());
    }

    #[test]
    fn reflexive_identity_step() {
        let s = ClosureState::seed(&mal()).unwrap();
        let new = one_step(&mal(), &s, &Limits::default()).unwrap();
        assert!(new.contains(mal().right()));
    }

    #[test]
    fn no_premises_derive_everything() {
        // Two rows with distinct right variables: every column over the
        // target's variables is one interpretation away.
        let source = validate(&[vec![1], vec![2]]).unwrap();
        let target = validate(&[vec![1, 2, 1], vec![2, 2, 1]]).unwrap();
        let s = ClosureState::seed(&target).unwrap();
        let new = one_step(&source, &s, &Limits::default()).unwrap();
        assert_eq!(new.len() + s.len(), 4);
    }

    #[test]
    fn certificates_replay() {
        let limits = Limits::default();
        for (a, b) in [(ari(), mal()), (maj(), mal()), (gen_mn(4).unwrap(), maj())] {
            let v = implies_lex(&a, &b).unwrap();
            assert!(v.certificate.replay(&a, &b, &limits).unwrap());
        }
    }

    #[test]
    fn tampered_certificate_fails() {
        let limits = Limits::default();
        let v = implies_lex(&ari(), &mal()).unwrap();
        let Certificate::Derivation { mut steps } = v.certificate else {
            panic!("expected a derivation");
        };
        steps[0].conclusion = Column::from_indices(&[2, 2]);
        let bad = Certificate::Derivation { steps };
        assert!(!bad.replay(&ari(), &mal(), &limits).unwrap());

        let v = implies_lex(&maj(), &mal()).unwrap();
        let Certificate::Closed { columns } = v.certificate else {
            panic!("expected a closed set");
        };
        let short = Certificate::Closed {
            columns: columns[..columns.len() - 1].to_vec(),
        };
        if columns.len() > mal().left_count() {
            assert!(!short.replay(&maj(), &mal(), &limits).unwrap());
        }
    }

    #[test]
    fn node_limit_is_reported() {
        let limits = Limits {
            csp_nodes: 10,
            parallel: false,
        };
        let m4 = gen_mn(4).unwrap();
        assert!(matches!(
            implies_lex_with(&m4, &maj(), &limits),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn sequential_matches_parallel() {
        let seq = Limits {
            parallel: false,
            ..Limits::default()
        };
        let par = Limits::default();
        let m4 = gen_mn(4).unwrap();
        for (a, b) in [(ari(), maj()), (m4.clone(), maj()), (maj(), m4)] {
            let x = implies_lex_with(&a, &b, &seq).unwrap();
            let y = implies_lex_with(&a, &b, &par).unwrap();
            assert_eq!(x.holds, y.holds);
            assert_eq!(x.certificate, y.certificate);
            assert_eq!(x.stats.csp_nodes, y.stats.csp_nodes);
        }
    }
}
