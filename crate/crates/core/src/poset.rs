//! Posets `Mclex[n, m, k]` of matrix classes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonical::{canonicalize, CanonicalMatrix};
use crate::degeneracy::{degeneracy_class, DegeneracyTag};
use crate::engine::{implies_lex_with, Limits};
use crate::error::{Error, Result};
use crate::format::{render_text, MatrixJson};
use crate::matrix::Matrix;

pub const DEFAULT_ENUM_CEILING: u64 = 10_000_000;

fn binomial(n: u64, r: u64) -> u64 {
    (0..r).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Canonical forms of all matrices in `matr(n, m, k)`, sorted.
///
/// Duplicate left columns vanish under canonicalization, so it is enough to
/// pair every right column with every non-empty set of at most `m` distinct
/// left columns (the empty set exactly when `m = 0`).
pub fn enumerate_canonical(
    n: usize,
    m: usize,
    k: usize,
    ceiling: u64,
) -> Result<Vec<CanonicalMatrix>> {
    if n == 0 || k == 0 {
        return Err(Error::Domain(format!("matr({n},{m},{k}) needs n, k > 0")));
    }
    let universe = (0..n).try_fold(1u64, |acc, _| acc.checked_mul(k as u64));
    let limit = |what: String| Error::ResourceLimit {
        what,
        limit: ceiling,
    };
    let universe = match universe {
        Some(u) if u <= 24 => u,
        _ => {
            return Err(limit(format!(
                "column universe {k}^{n} (at most 24 columns)"
            )))
        }
    };
    let max_left = (m as u64).min(universe);
    let sets: u64 = if m == 0 {
        1
    } else {
        (1..=max_left).map(|s| binomial(universe, s)).sum()
    };
    let raw = sets.saturating_mul(universe);
    if raw > ceiling {
        return Err(limit(format!("{raw} raw matrices in matr({n},{m},{k})")));
    }
    let columns: Vec<Vec<u32>> = (0..universe)
        .map(|mut c| {
            let mut col = vec![0u32; n];
            for e in col.iter_mut().rev() {
                *e = (c % k as u64) as u32 + 1;
                c /= k as u64;
            }
            col
        })
        .collect();
    let masks: Vec<u32> = if m == 0 {
        vec![0]
    } else {
        (1u32..(1u32 << universe))
            .filter(|s| s.count_ones() as u64 <= max_left)
            .collect()
    };
    let found: BTreeSet<CanonicalMatrix> = masks
        .par_iter()
        .flat_map_iter(|&mask| {
            let left: Vec<Vec<u32>> = (0..universe as usize)
                .filter(|&c| mask >> c & 1 == 1)
                .map(|c| columns[c].clone())
                .collect();
            columns.iter().map(move |right| {
                let raw = Matrix::from_columns(left.clone(), right.clone())
                    .expect("enumerated matrices are well formed");
                canonicalize(&raw)
            })
        })
        .collect();
    Ok(found.into_iter().collect())
}

/// Memoized implication verdicts keyed by the text of both matrices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerdictCache {
    entries: BTreeMap<(String, String), bool>,
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    source: String,
    target: String,
    holds: bool,
}

impl VerdictCache {
    pub fn get(&self, a: &Matrix, b: &Matrix) -> Option<bool> {
        self.entries.get(&(render_text(a), render_text(b))).copied()
    }

    pub fn insert(&mut self, a: &Matrix, b: &Matrix, holds: bool) {
        self.entries.insert((render_text(a), render_text(b)), holds);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_json(&self) -> String {
        let list: Vec<CacheEntry> = self
            .entries
            .iter()
            .map(|((s, t), &h)| CacheEntry {
                source: s.clone(),
                target: t.clone(),
                holds: h,
            })
            .collect();
        serde_json::to_string_pretty(&list).expect("cache serializes")
    }

    pub fn from_json(text: &str) -> Result<VerdictCache> {
        let list: Vec<CacheEntry> = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Ok(VerdictCache {
            entries: list
                .into_iter()
                .map(|e| ((e.source, e.target), e.holds))
                .collect(),
        })
    }

    /// Reads a cache file; a missing file gives an empty cache.
    pub fn load(path: &Path) -> Result<VerdictCache> {
        match std::fs::read_to_string(path) {
            Ok(text) => VerdictCache::from_json(&text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(VerdictCache::default()),
            Err(e) => Err(Error::Domain(format!(
                "cannot read {}: {e}",
                path.display()
            ))),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())
            .map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosetClass {
    /// Least member in canonical order: fewest rows, then fewest left
    /// columns, then fewest variables.
    pub representative: CanonicalMatrix,
    pub members: Vec<CanonicalMatrix>,
    pub degeneracy: DegeneracyTag,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub queries: usize,
    pub engine_calls: usize,
    pub cache_hits: usize,
    pub entailed: usize,
}

/// Classes ordered by inclusion: `leq(a, b)` when `mclex{a} ⊆ mclex{b}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    classes: Vec<PosetClass>,
    leq: Vec<Vec<bool>>,
    hasse: Vec<(usize, usize)>,
}

impl Poset {
    fn from_relation(classes: Vec<PosetClass>, leq: Vec<Vec<bool>>) -> Poset {
        let hasse = covering_pairs(&leq);
        Poset {
            classes,
            leq,
            hasse,
        }
    }

    pub fn classes(&self) -> &[PosetClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn less(&self, a: usize, b: usize) -> bool {
        a != b && self.leq[a][b]
    }

    pub fn hasse(&self) -> &[(usize, usize)] {
        &self.hasse
    }

    pub fn covers(&self, lower: usize, upper: usize) -> bool {
        self.hasse.binary_search(&(lower, upper)).is_ok()
    }

    /// Index of the class that has `m`'s canonical form as a member.
    pub fn class_of(&self, m: &Matrix) -> Option<usize> {
        let c = canonicalize(m);
        self.classes.iter().position(|cl| cl.members.contains(&c))
    }

    pub fn minimal(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&b| !(0..self.len()).any(|a| self.less(a, b)))
            .collect()
    }

    /// The least class, if one is below every other.
    pub fn minimum(&self) -> Option<usize> {
        (0..self.len()).find(|&a| (0..self.len()).all(|b| self.leq[a][b]))
    }

    /// The sub-poset on the classes accepted by `keep`.
    pub fn restrict(&self, keep: impl Fn(&PosetClass) -> bool) -> Poset {
        let idx: Vec<usize> = (0..self.len())
            .filter(|&i| keep(&self.classes[i]))
            .collect();
        let classes = idx.iter().map(|&i| self.classes[i].clone()).collect();
        let leq = idx
            .iter()
            .map(|&a| idx.iter().map(|&b| self.leq[a][b]).collect())
            .collect();
        Poset::from_relation(classes, leq)
    }

    pub fn nondegenerate(&self) -> Poset {
        self.restrict(|c| !c.degeneracy.is_degenerate())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let classes: Vec<_> = self
            .classes
            .iter()
            .enumerate()
            .map(|(i, c)| {
                serde_json::json!({
                    "id": i,
                    "representative": MatrixJson::from(c.representative.as_matrix()),
                    "text": render_text(c.representative.as_matrix()),
                    "members": c.members.len(),
                    "degeneracy": c.degeneracy,
                })
            })
            .collect();
        let leq: Vec<[usize; 2]> = (0..self.len())
            .flat_map(|a| (0..self.len()).map(move |b| (a, b)))
            .filter(|&(a, b)| self.leq[a][b])
            .map(|(a, b)| [a, b])
            .collect();
        let hasse: Vec<[usize; 2]> = self.hasse.iter().map(|&(a, b)| [a, b]).collect();
        serde_json::json!({ "classes": classes, "leq": leq, "hasse": hasse })
    }
}

/// Pairs `(a, b)` with `a < b` and nothing strictly between, sorted.
fn covering_pairs(leq: &[Vec<bool>]) -> Vec<(usize, usize)> {
    let n = leq.len();
    let less = |a: usize, b: usize| a != b && leq[a][b];
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if less(a, b) && !(0..n).any(|c| less(a, c) && less(c, b)) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Transitive reduction of a poset given by its order relation.
pub fn hasse(p: &Poset) -> Vec<(usize, usize)> {
    covering_pairs(&p.leq)
}

pub fn build_poset(
    ms: &[CanonicalMatrix],
    limits: &Limits,
    cache: &mut VerdictCache,
) -> Result<Poset> {
    build_poset_with_stats(ms, limits, cache).map(|(p, _)| p)
}

/// Decides all pairwise implications, skipping those entailed by earlier
/// verdicts: `a ⇒ c ⇒ b` gives `a ⇒ b`, and `c ⇒ a` with `c ⇏ b` gives
/// `a ⇏ b`. Queries for one source run in parallel against the verdicts of
/// earlier sources.
pub fn build_poset_with_stats(
    ms: &[CanonicalMatrix],
    limits: &Limits,
    cache: &mut VerdictCache,
) -> Result<(Poset, BuildStats)> {
    let mut ms: Vec<CanonicalMatrix> = ms.to_vec();
    ms.sort();
    ms.dedup();
    let n = ms.len();
    let mut known: Vec<Vec<Option<bool>>> = vec![vec![None; n]; n];
    let mut stats = BuildStats::default();
    for (a, row) in known.iter_mut().enumerate() {
        row[a] = Some(true);
    }
    for a in 0..n {
        let mut pending = Vec::new();
        for b in 0..n {
            if known[a][b].is_some() {
                continue;
            }
            stats.queries += 1;
            if let Some(h) = cache.get(&ms[a], &ms[b]) {
                stats.cache_hits += 1;
                known[a][b] = Some(h);
                continue;
            }
            let pos = (0..n).any(|c| known[a][c] == Some(true) && known[c][b] == Some(true));
            let neg = (0..n).any(|c| known[c][a] == Some(true) && known[c][b] == Some(false));
            if pos || neg {
                stats.entailed += 1;
                known[a][b] = Some(pos);
                continue;
            }
            pending.push(b);
        }
        let verdicts: Vec<Result<bool>> = pending
            .par_iter()
            .map(|&b| {
                implies_lex_with(&ms[a], &ms[b], limits)
                    .map(|v| v.holds)
                    .map_err(|e| match e {
                        Error::ResourceLimit { what, limit } => Error::ResourceLimit {
                            what: format!(
                                "{what} while deciding [{}] => [{}]",
                                render_text(&ms[a]).trim().replace('\n', "; "),
                                render_text(&ms[b]).trim().replace('\n', "; ")
                            ),
                            limit,
                        },
                        other => other,
                    })
            })
            .collect();
        for (&b, v) in pending.iter().zip(verdicts) {
            let h = v?;
            stats.engine_calls += 1;
            cache.insert(&ms[a], &ms[b], h);
            known[a][b] = Some(h);
        }
    }
    let leq: Vec<Vec<bool>> = known
        .iter()
        .map(|row| row.iter().map(|v| v.unwrap()).collect())
        .collect();

    let mut class_of = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for a in 0..n {
        if class_of[a] != usize::MAX {
            continue;
        }
        let id = groups.len();
        let members: Vec<usize> = (a..n).filter(|&b| leq[a][b] && leq[b][a]).collect();
        for &b in &members {
            class_of[b] = id;
        }
        groups.push(members);
    }
    let classes: Vec<PosetClass> = groups
        .iter()
        .map(|g| {
            let representative = ms[g[0]].clone();
            PosetClass {
                degeneracy: degeneracy_class(&representative).tag,
                representative,
                members: g.iter().map(|&i| ms[i].clone()).collect(),
            }
        })
        .collect();
    let class_leq = groups
        .iter()
        .map(|ga| groups.iter().map(|gb| leq[ga[0]][gb[0]]).collect())
        .collect();
    Ok((Poset::from_relation(classes, class_leq), stats))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DotOptions {
    pub nondegenerate_only: bool,
}

/// A `digraph` with one box per class, labelled by its representative, and
/// one edge per covering pair, drawn from the smaller class to the larger.
pub fn emit_dot(p: &Poset, options: DotOptions) -> String {
    let restricted;
    let p = if options.nondegenerate_only {
        restricted = p.nondegenerate();
        &restricted
    } else {
        p
    };
    let mut out = String::from("digraph mclex {\n");
    if !p.is_empty() {
        out.push_str("  rankdir=LR;\n");
        out.push_str("  node [shape=box, fontname=\"monospace\"];\n");
    }
    for (i, c) in p.classes.iter().enumerate() {
        let label: String = render_text(c.representative.as_matrix())
            .lines()
            .map(|l| format!("{l}\\l"))
            .collect();
        let _ = writeln!(out, "  c{i} [label=\"{label}\"];");
    }
    for &(a, b) in &p.hasse {
        let _ = writeln!(out, "  c{a} -> c{b};");
    }
    out.push_str("}\n");
    out
}
