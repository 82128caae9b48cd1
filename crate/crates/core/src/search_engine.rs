//! Exhaustive enumeration of minimum blockers.
//!
//! A minimum blocker is an irredundant hitting set of the family of avoider
//! cell sets: it meets every avoider, and each of its cells has a private
//! avoider that meets the set at that cell only. The search is a depth-first
//! branching on the lexicographically first avoider not yet hit. Every
//! chosen cell keeps a running set of its private-witness candidates, and a
//! branch dies as soon as one of those sets empties or the cardinality cap
//! is reached with avoiders still unhit.
//!
//! Cells are bits of a `u64` (row-major), so orders up to 8 fit; the edge
//! bitsets are sized for Catalan(7) = 429 avoiders, which caps the search at
//! order 7.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blocker_model::{Cell, PositionSet};
use crate::cardinality::max_cardinality;
use crate::error::{Error, Result};
use crate::oracle;
use crate::perm_core::{avoiders, Permutation, Symmetry};

/// Default largest order searched without opting in.
pub const DEFAULT_SEARCH_LIMIT: usize = 6;
/// Largest order the search can represent at all.
pub const MAX_SEARCH_ORDER: usize = 7;

const WORDS: usize = 7;

#[derive(Clone, Copy, PartialEq, Eq)]
struct EdgeSet([u64; WORDS]);

impl EdgeSet {
    const EMPTY: EdgeSet = EdgeSet([0; WORDS]);

    fn insert(&mut self, k: usize) {
        self.0[k / 64] |= 1 << (k % 64);
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn and(&self, other: &EdgeSet) -> EdgeSet {
        let mut out = *self;
        out.0.iter_mut().zip(other.0).for_each(|(a, b)| *a &= b);
        out
    }

    fn and_not(&self, other: &EdgeSet) -> EdgeSet {
        let mut out = *self;
        out.0.iter_mut().zip(other.0).for_each(|(a, b)| *a &= !b);
        out
    }
}

/// Avoider cell sets of one order, indexed both ways.
struct Hypergraph {
    n: usize,
    /// Cell mask of each avoider, in lexicographic order of the avoiders.
    edges: Vec<u64>,
    /// Avoiders passing through each cell.
    through: Vec<EdgeSet>,
}

impl Hypergraph {
    fn new(n: usize, list: &[Permutation]) -> Self {
        assert!(list.len() <= WORDS * 64, "too many avoiders for the edge bitset");
        let edges: Vec<u64> = list
            .iter()
            .map(|p| p.cells().fold(0u64, |m, c| m | 1 << c.index(n)))
            .collect();
        let mut through = vec![EdgeSet::EMPTY; n * n];
        for (k, &mask) in edges.iter().enumerate() {
            for (cell, set) in through.iter_mut().enumerate() {
                if mask >> cell & 1 == 1 {
                    set.insert(k);
                }
            }
        }
        Hypergraph { n, edges, through }
    }

    fn all_edges(&self) -> EdgeSet {
        let mut s = EdgeSet::EMPTY;
        (0..self.edges.len()).for_each(|k| s.insert(k));
        s
    }

    fn full_cells(&self) -> u64 {
        let cells = self.n * self.n;
        if cells == 64 {
            u64::MAX
        } else {
            (1u64 << cells) - 1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: usize,
    /// Largest cardinality explored; defaults to the largest flag cardinality.
    pub max_cardinality: Option<usize>,
    pub dedup_symmetry: bool,
    /// Cap on search-tree nodes.
    pub budget: Option<u64>,
    pub order_limit: usize,
    /// Order 7 is only searched with this set and a budget.
    pub allow_order_seven: bool,
}

impl SearchConfig {
    pub fn new(n: usize) -> Self {
        SearchConfig {
            n,
            max_cardinality: None,
            dedup_symmetry: true,
            budget: None,
            order_limit: DEFAULT_SEARCH_LIMIT,
            allow_order_seven: false,
        }
    }

    pub fn cap(&self) -> usize {
        self.max_cardinality
            .unwrap_or_else(|| max_cardinality(self.n) as usize)
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidConfig(format!(
                "order must be at least 2, got {}",
                self.n
            )));
        }
        if let Some(cap) = self.max_cardinality {
            if cap < self.n {
                return Err(Error::InvalidConfig(format!(
                    "cardinality cap {cap} is below the order {}; no blocker is that small",
                    self.n
                )));
            }
        }
        let limit = self.order_limit.min(MAX_SEARCH_ORDER);
        if self.n > limit {
            return Err(Error::OrderTooLarge { n: self.n, limit });
        }
        if self.n == MAX_SEARCH_ORDER && !(self.allow_order_seven && self.budget.is_some()) {
            return Err(Error::InvalidConfig(
                "order 7 needs the explicit opt-in and a node budget".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrivateWitness {
    pub cell: Cell,
    pub witness: Permutation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub blocker: PositionSet,
    pub cardinality: usize,
    pub is_verified_minimum: bool,
    /// One entry per cell, in row-major order.
    pub private_witnesses: Vec<PrivateWitness>,
    pub symmetry_class_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub n: usize,
    pub cap: usize,
    pub dedup_symmetry: bool,
    /// False when the node budget ran out; results are then partial.
    pub complete: bool,
    pub nodes: u64,
    pub results: Vec<SearchResult>,
}

impl SearchOutcome {
    pub fn max_found(&self) -> Option<usize> {
        self.results.iter().map(|r| r.cardinality).max()
    }
}

/// Progress record after each fully explored root branch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: usize,
    pub cap: usize,
    pub completed_root_branches: usize,
    pub root_branches: usize,
    pub nodes: u64,
    /// Every minimum blocker found so far, before symmetry reduction.
    pub found: Vec<PositionSet>,
}

struct Dfs<'a> {
    graph: &'a Hypergraph,
    cap: usize,
    budget: Option<u64>,
    nodes: u64,
    exhausted: bool,
    found: Vec<u64>,
}

impl Dfs<'_> {
    fn run(&mut self, set: u64, size: usize, cand: u64, crit: &[EdgeSet], uncovered: EdgeSet) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.budget.is_some_and(|b| self.nodes > b) {
            self.exhausted = true;
            return;
        }
        let Some(edge) = uncovered.first() else {
            self.found.push(set);
            return;
        };
        if size >= self.cap {
            return;
        }
        let mut cand = cand;
        let mut branch = self.graph.edges[edge] & cand;
        while branch != 0 {
            let bit = branch.trailing_zeros() as usize;
            branch &= branch - 1;
            self.try_add(set, size, cand, bit, crit, uncovered);
            cand &= !(1u64 << bit);
            if self.exhausted {
                return;
            }
        }
    }

    fn try_add(
        &mut self,
        set: u64,
        size: usize,
        cand: u64,
        bit: usize,
        crit: &[EdgeSet],
        uncovered: EdgeSet,
    ) {
        let through = &self.graph.through[bit];
        let mut next: Vec<EdgeSet> = Vec::with_capacity(crit.len() + 1);
        for c in crit.iter() {
            let kept = c.and_not(through);
            if kept.is_empty() {
                return;
            }
            next.push(kept);
        }
        next.push(uncovered.and(through));
        self.run(
            set | 1 << bit,
            size + 1,
            cand & !(1u64 << bit),
            &next,
            uncovered.and_not(through),
        );
    }
}

/// Root-level subproblems: the cells of the first avoider, each branch
/// excluding the cells of the branches before it.
fn root_branches(graph: &Hypergraph) -> Vec<(usize, u64)> {
    let first = graph.edges[0];
    let mut cand = graph.full_cells();
    let mut out = Vec::new();
    let mut rest = first;
    while rest != 0 {
        let bit = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        out.push((bit, cand));
        cand &= !(1u64 << bit);
    }
    out
}

fn explore_branch(
    graph: &Hypergraph,
    cap: usize,
    budget: Option<u64>,
    bit: usize,
    cand: u64,
) -> (Vec<u64>, u64, bool) {
    let mut dfs = Dfs {
        graph,
        cap,
        budget,
        nodes: 1,
        exhausted: false,
        found: Vec::new(),
    };
    dfs.try_add(0, 0, cand, bit, &[], graph.all_edges());
    (dfs.found, dfs.nodes, dfs.exhausted)
}

fn raw_masks(graph: &Hypergraph, cap: usize) -> (Vec<u64>, u64) {
    let per_branch: Vec<(Vec<u64>, u64, bool)> = root_branches(graph)
        .into_par_iter()
        .map(|(bit, cand)| explore_branch(graph, cap, None, bit, cand))
        .collect();
    let nodes = 1 + per_branch.iter().map(|b| b.1).sum::<u64>();
    (per_branch.into_iter().flat_map(|b| b.0).collect(), nodes)
}

/// Serialization order: row-major sorted cell lists compared lexicographically.
fn serial_key(mask: u64) -> Vec<u32> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        out.push(m.trailing_zeros());
        m &= m - 1;
    }
    out
}

fn map_mask(n: usize, mask: u64, sym: Symmetry) -> u64 {
    let mut out = 0u64;
    let mut m = mask;
    while m != 0 {
        let k = m.trailing_zeros() as usize;
        m &= m - 1;
        out |= 1 << sym.apply_cell(n, Cell::from_index(n, k)).index(n);
    }
    out
}

/// Orbit of a cell set under {id, transpose, Hankel transpose, rot180}.
fn orbit(n: usize, mask: u64) -> Vec<u64> {
    let mut out = vec![mask];
    out.extend(Symmetry::ALL.iter().map(|&s| map_mask(n, mask, s)));
    out.sort_unstable();
    out.dedup();
    out
}

fn canonical(n: usize, mask: u64) -> (u64, usize) {
    let orbit = orbit(n, mask);
    let rep = *orbit
        .iter()
        .min_by_key(|&&m| serial_key(m))
        .expect("orbit contains the set itself");
    (rep, orbit.len())
}

fn finish(
    n: usize,
    cap: usize,
    dedup: bool,
    masks: Vec<u64>,
    nodes: u64,
    complete: bool,
) -> Result<SearchOutcome> {
    let mut entries: Vec<(u64, usize)> = if dedup {
        let classes: BTreeMap<u64, usize> = masks.iter().map(|&m| canonical(n, m)).collect();
        classes.into_iter().collect()
    } else {
        masks.iter().map(|&m| (m, orbit(n, m).len())).collect()
    };
    entries.sort_by_cached_key(|&(m, _)| (m.count_ones(), serial_key(m)));
    entries.dedup();

    let results = entries
        .into_par_iter()
        .map(|(mask, class)| certify(n, mask, class))
        .collect::<Result<Vec<_>>>()?;
    Ok(SearchOutcome {
        n,
        cap,
        dedup_symmetry: dedup,
        complete,
        nodes,
        results,
    })
}

/// Re-derives minimum-ness and the per-cell witnesses with the oracle,
/// independently of the bitmask search.
fn certify(n: usize, mask: u64, class: usize) -> Result<SearchResult> {
    let blocker = PositionSet::from_mask(n, mask);
    let limit = n.max(1);
    let verified = oracle::is_minimum(&blocker, limit)?;
    let witnesses = oracle::private_witnesses(&blocker, limit)?;
    Ok(SearchResult {
        cardinality: blocker.len(),
        is_verified_minimum: verified && witnesses.len() == blocker.len(),
        private_witnesses: witnesses
            .into_iter()
            .map(|(cell, witness)| PrivateWitness { cell, witness })
            .collect(),
        symmetry_class_size: class,
        blocker,
    })
}

fn graph_for(cfg: &SearchConfig) -> Result<Hypergraph> {
    cfg.validate()?;
    let list = avoiders(cfg.n, cfg.n)?;
    Ok(Hypergraph::new(cfg.n, &list))
}

/// Every minimum blocker of order `cfg.n` with at most `cfg.cap()` cells, in
/// order of cardinality and then serialization.
pub fn enumerate_minimum_blockers(cfg: &SearchConfig) -> Result<SearchOutcome> {
    let graph = graph_for(cfg)?;
    let cap = cfg.cap();
    if cfg.budget.is_none() {
        let (masks, nodes) = raw_masks(&graph, cap);
        return finish(cfg.n, cap, cfg.dedup_symmetry, masks, nodes, true);
    }
    // Budgeted runs go branch by branch so truncation is reproducible.
    enumerate_resumable(cfg, None, |_| {}).map(|(outcome, _)| outcome)
}

/// Sequential root-branch search. `on_branch` receives a checkpoint after
/// every completed root branch; passing one back as `resume` skips the
/// branches it records. Returns the outcome and the last checkpoint.
pub fn enumerate_resumable(
    cfg: &SearchConfig,
    resume: Option<Checkpoint>,
    mut on_branch: impl FnMut(&Checkpoint),
) -> Result<(SearchOutcome, Checkpoint)> {
    let graph = graph_for(cfg)?;
    let cap = cfg.cap();
    let branches = root_branches(&graph);
    let mut cp = match resume {
        Some(cp) => {
            if cp.n != cfg.n || cp.cap != cap || cp.root_branches != branches.len() {
                return Err(Error::InvalidConfig(
                    "checkpoint does not match this search".into(),
                ));
            }
            if cp.found.iter().any(|b| b.n() != cfg.n) {
                return Err(Error::OrderMismatch {
                    expected: cfg.n,
                    found: cp
                        .found
                        .iter()
                        .map(PositionSet::n)
                        .find(|&k| k != cfg.n)
                        .unwrap_or(0),
                });
            }
            cp
        }
        None => Checkpoint {
            n: cfg.n,
            cap,
            completed_root_branches: 0,
            root_branches: branches.len(),
            nodes: 1,
            found: Vec::new(),
        },
    };
    for &(bit, cand) in branches.iter().skip(cp.completed_root_branches) {
        let remaining = cfg.budget.map(|b| b.saturating_sub(cp.nodes));
        let (found, nodes, exhausted) = explore_branch(&graph, cap, remaining, bit, cand);
        cp.nodes += nodes;
        if exhausted {
            // the partial branch shows up in the outcome but not in the checkpoint
            let masks = cp
                .found
                .iter()
                .filter_map(PositionSet::to_mask)
                .chain(found)
                .collect();
            let outcome = finish(cfg.n, cap, cfg.dedup_symmetry, masks, cp.nodes, false)?;
            return Ok((outcome, cp));
        }
        cp.found
            .extend(found.into_iter().map(|m| PositionSet::from_mask(cfg.n, m)));
        cp.completed_root_branches += 1;
        on_branch(&cp);
    }
    let masks = cp.found.iter().filter_map(PositionSet::to_mask).collect();
    let outcome = finish(cfg.n, cap, cfg.dedup_symmetry, masks, cp.nodes, true)?;
    Ok((outcome, cp))
}

/// r·s with r + s = n + 1 and |r - s| <= 1.
pub fn conjecture_target(n: usize) -> (usize, usize, usize) {
    let r = (n + 2) / 2;
    let s = n.div_ceil(2);
    (r, s, r * s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub target: usize,
    /// The search explores up to target + 1 cells, enough to see a violation.
    pub cap: usize,
    pub max_found: usize,
    pub witness: PositionSet,
    pub falsified: bool,
    pub complete: bool,
    pub nodes: u64,
    /// Symmetry classes found at each cardinality.
    pub classes_by_cardinality: BTreeMap<usize, usize>,
}

pub fn conjecture_probe(n: usize, budget: Option<u64>, allow_order_seven: bool) -> Result<ConjectureReport> {
    conjecture_probe_capped(n, None, budget, allow_order_seven)
}

/// Like [`conjecture_probe`] with an explicit cap in place of target + 1.
pub fn conjecture_probe_capped(
    n: usize,
    cap: Option<usize>,
    budget: Option<u64>,
    allow_order_seven: bool,
) -> Result<ConjectureReport> {
    let (r, s, target) = conjecture_target(n);
    let cap = cap.unwrap_or(target + 1);
    let cfg = SearchConfig {
        max_cardinality: Some(cap),
        budget,
        allow_order_seven,
        order_limit: if allow_order_seven {
            MAX_SEARCH_ORDER
        } else {
            DEFAULT_SEARCH_LIMIT
        },
        ..SearchConfig::new(n)
    };
    let outcome = enumerate_minimum_blockers(&cfg)?;
    let mut classes_by_cardinality = BTreeMap::new();
    for res in &outcome.results {
        *classes_by_cardinality.entry(res.cardinality).or_insert(0) += 1;
    }
    // results are sorted by cardinality, so the first maximal one is canonical
    let max_found = outcome.max_found().unwrap_or(0);
    let witness = outcome
        .results
        .iter()
        .find(|res| res.cardinality == max_found)
        .map(|res| res.blocker.clone())
        .unwrap_or_else(|| PositionSet::from_mask(n, 0));
    Ok(ConjectureReport {
        n,
        r,
        s,
        target,
        cap,
        max_found,
        witness,
        falsified: max_found > target,
        complete: outcome.complete,
        nodes: outcome.nodes,
        classes_by_cardinality,
    })
}
