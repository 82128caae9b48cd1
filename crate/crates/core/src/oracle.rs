//! Ground-truth predicates, decided by running over every 123-avoiding
//! permutation of the ambient order.
//!
//! Permutations containing a 123-pattern never matter here, so only the
//! avoider list (Catalan many) is scanned, never all of S_n.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::blocker_model::{Cell, PositionSet};
use crate::error::{Error, Result};
use crate::perm_core::{avoiders, hankel_label, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockerVerdict {
    pub is_blocker: bool,
    /// Lexicographically first avoider disjoint from the candidate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Permutation>,
}

fn check_same_order(p: &Permutation, b: &PositionSet) -> Result<()> {
    if p.n() != b.n() {
        return Err(Error::OrderMismatch {
            expected: b.n(),
            found: p.n(),
        });
    }
    Ok(())
}

fn hits(grid: &[bool], n: usize, p: &Permutation) -> usize {
    p.image()
        .iter()
        .enumerate()
        .filter(|&(i, &c)| grid[i * n + c - 1])
        .count()
}

pub fn intersection_count(p: &Permutation, b: &PositionSet) -> Result<usize> {
    check_same_order(p, b)?;
    Ok(p.cells().filter(|&c| b.contains(c)).count())
}

pub fn is_blocker(b: &PositionSet, limit: usize) -> Result<BlockerVerdict> {
    let n = b.n();
    let list = avoiders(n, limit)?;
    let grid = b.grid();
    let witness = list
        .iter()
        .find(|p| p.image().iter().enumerate().all(|(i, &c)| !grid[i * n + c - 1]))
        .cloned();
    Ok(BlockerVerdict {
        is_blocker: witness.is_none(),
        witness,
    })
}

/// Irredundance, called minimum here: a blocker from which no cell can be
/// removed. Decided by removal testing.
pub fn is_minimum(b: &PositionSet, limit: usize) -> Result<bool> {
    if !is_blocker(b, limit)?.is_blocker {
        return Ok(false);
    }
    for cell in b.iter() {
        if is_blocker(&b.without(cell), limit)?.is_blocker {
            return Ok(false);
        }
    }
    Ok(true)
}

/// For each cell, the lexicographically first avoider meeting `b` only there.
/// Cells without such an avoider are absent from the map.
pub fn private_witnesses(b: &PositionSet, limit: usize) -> Result<BTreeMap<Cell, Permutation>> {
    let n = b.n();
    let list = avoiders(n, limit)?;
    let grid = b.grid();
    let mut out = BTreeMap::new();
    for p in list.iter() {
        let mut hit = None;
        let mut count = 0;
        for c in p.cells() {
            if grid[c.index(n)] {
                count += 1;
                hit = Some(c);
            }
        }
        if count == 1 {
            out.entry(hit.expect("one hit recorded"))
                .or_insert_with(|| p.clone());
        }
    }
    Ok(out)
}

/// Certificate form of minimum-ness: `b` is a blocker and every cell has a
/// private witness. Returns the witnesses when it holds.
pub fn minimum_certificate(b: &PositionSet, limit: usize) -> Result<Option<BTreeMap<Cell, Permutation>>> {
    if !is_blocker(b, limit)?.is_blocker {
        return Ok(None);
    }
    let witnesses = private_witnesses(b, limit)?;
    Ok((witnesses.len() == b.len()).then_some(witnesses))
}

/// Smallest possible cardinality, called minimal here: a blocker with
/// exactly n cells.
pub fn is_minimal(b: &PositionSet, limit: usize) -> Result<bool> {
    Ok(is_blocker(b, limit)?.is_blocker && b.len() == b.n())
}

pub fn once_intersecting_avoiders(b: &PositionSet, limit: usize) -> Result<Vec<Permutation>> {
    let n = b.n();
    let list = avoiders(n, limit)?;
    let grid = b.grid();
    Ok(list.iter().filter(|p| hits(&grid, n, p) == 1).cloned().collect())
}

/// Number of cells of `b` on each cyclic-Hankel diagonal.
pub fn hankel_coverage(b: &PositionSet) -> Vec<usize> {
    let n = b.n();
    let mut counts = vec![0; n];
    for c in b.iter() {
        let label = hankel_label(n, c.row, c.col).expect("cells of a PositionSet are in range");
        counts[label.value()] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocker_model::{corner_forbidden_region, flag_positions, l_shape_positions, FlagSpec};
    use crate::perm_core::{apply_symmetry, enumerate_avoiders, Symmetry};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const LIMIT: usize = 12;

    fn p(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    fn spec(n: usize, m: usize, t: usize) -> FlagSpec {
        FlagSpec::new(n, m, t).unwrap()
    }

    #[test]
    fn intersection_examples() {
        assert_eq!(
            intersection_count(&p(&[1, 2, 3]), &PositionSet::empty(3).unwrap()).unwrap(),
            0
        );
        // label 8 ('i') of order 10: i + j = 10 for i <= 9, plus (10, 10)
        let diag: Vec<usize> = (1..=9).map(|i| 10 - i).chain([10]).collect();
        let diag = p(&diag);
        assert!(diag
            .cells()
            .all(|c| hankel_label(10, c.row, c.col).unwrap().value() == 8));
        assert!(!diag.contains_123());
        assert_eq!(
            intersection_count(&diag, &flag_positions(spec(10, 8, 3))).unwrap(),
            2
        );
        assert_eq!(
            intersection_count(&p(&[2, 1]), &PositionSet::new(2, [(1, 2)]).unwrap()).unwrap(),
            1
        );
        assert!(intersection_count(&p(&[2, 1]), &PositionSet::empty(3).unwrap()).is_err());
    }

    #[test]
    fn blocker_examples() {
        let l = l_shape_positions(6, 4, 3).unwrap();
        assert_eq!(
            is_blocker(&l, LIMIT).unwrap(),
            BlockerVerdict {
                is_blocker: true,
                witness: None
            }
        );
        let shifted = PositionSet::new(6, [(1, 4), (1, 5), (1, 6), (2, 2), (2, 6), (4, 5)]).unwrap();
        assert!(is_blocker(&shifted, LIMIT).unwrap().is_blocker);
        let v = is_blocker(&PositionSet::empty(2).unwrap(), LIMIT).unwrap();
        assert!(!v.is_blocker);
        assert_eq!(v.witness, Some(p(&[1, 2])));
    }

    #[test]
    fn witness_is_a_disjoint_avoider() {
        let b = PositionSet::new(5, [(1, 1), (2, 3), (5, 5)]).unwrap();
        let v = is_blocker(&b, LIMIT).unwrap();
        let w = v.witness.unwrap();
        assert!(!w.contains_123());
        assert_eq!(intersection_count(&w, &b).unwrap(), 0);
    }

    #[test]
    fn minimum_examples() {
        assert!(is_minimum(&flag_positions(spec(10, 7, 3)), LIMIT).unwrap());
        let col = PositionSet::column(4, 1).unwrap();
        assert!(is_minimum(&col, LIMIT).unwrap());
        assert!(!is_minimum(&col.with(Cell::new(2, 3)).unwrap(), LIMIT).unwrap());
        assert!(!is_minimum(&PositionSet::empty(3).unwrap(), LIMIT).unwrap());
    }

    #[test]
    fn minimal_examples() {
        assert!(is_minimal(&l_shape_positions(6, 4, 3).unwrap(), LIMIT).unwrap());
        assert!(!is_minimal(&flag_positions(spec(10, 7, 3)), LIMIT).unwrap());
        for n in 1..=7 {
            assert!(is_minimal(&PositionSet::row(n, 1).unwrap(), LIMIT).unwrap());
        }
    }

    #[test]
    fn order_limit_enforced() {
        let big = PositionSet::row(13, 1).unwrap();
        assert!(matches!(
            is_blocker(&big, LIMIT),
            Err(Error::OrderTooLarge { .. })
        ));
        assert!(is_minimum(&big, LIMIT).is_err());
        assert!(is_minimal(&big, LIMIT).is_err());
        assert!(once_intersecting_avoiders(&big, LIMIT).is_err());
        assert!(is_blocker(&PositionSet::row(5, 1).unwrap(), 4).is_err());
    }

    #[test]
    fn once_examples() {
        let all = enumerate_avoiders(3, LIMIT).unwrap();
        assert_eq!(
            once_intersecting_avoiders(&PositionSet::row(3, 1).unwrap(), LIMIT).unwrap(),
            all
        );
        assert!(once_intersecting_avoiders(&PositionSet::full(3).unwrap(), LIMIT)
            .unwrap()
            .is_empty());
        let s = spec(5, 4, 2);
        let corner = corner_forbidden_region(s);
        let once = once_intersecting_avoiders(&flag_positions(s), LIMIT).unwrap();
        assert!(!once.is_empty());
        assert!(once.iter().all(|q| q.cells().all(|c| !corner.contains(c))));
    }

    #[test]
    fn hankel_coverage_examples() {
        assert_eq!(hankel_coverage(&l_shape_positions(6, 4, 3).unwrap()), vec![1; 6]);
        for n in 1..=9 {
            assert_eq!(hankel_coverage(&PositionSet::row(n, 1).unwrap()), vec![1; n]);
        }
        let cov = hankel_coverage(&flag_positions(spec(10, 7, 3)));
        assert_eq!(cov.iter().sum::<usize>(), 19);
        assert!(cov.iter().all(|&k| k >= 1));
    }

    #[test]
    fn flags_are_blockers_up_to_eight() {
        for n in 1..=8 {
            for s in FlagSpec::all(n) {
                assert!(is_blocker(&flag_positions(s), LIMIT).unwrap().is_blocker, "{s}");
            }
        }
    }

    #[test]
    fn flags_are_minimum_up_to_seven() {
        for n in 1..=7 {
            for s in FlagSpec::all(n) {
                assert!(is_minimum(&flag_positions(s), LIMIT).unwrap(), "{s}");
            }
        }
    }

    #[test]
    fn certificate_form_agrees_with_removal_testing() {
        for n in 1..=6 {
            for s in FlagSpec::all(n) {
                let b = flag_positions(s);
                let cert = minimum_certificate(&b, LIMIT).unwrap();
                assert_eq!(cert.is_some(), is_minimum(&b, LIMIT).unwrap(), "{s}");
                for (cell, w) in cert.unwrap() {
                    let hit: Vec<Cell> = w.cells().filter(|&c| b.contains(c)).collect();
                    assert_eq!(hit, vec![cell]);
                }
            }
        }
        // also on redundant blockers
        let b = PositionSet::column(5, 2).unwrap().with(Cell::new(1, 1)).unwrap();
        assert!(minimum_certificate(&b, LIMIT).unwrap().is_none());
        assert!(!is_minimum(&b, LIMIT).unwrap());
    }

    #[test]
    fn blocker_status_invariant_under_symmetry() {
        for n in 1..=6 {
            for s in FlagSpec::all(n) {
                let b = flag_positions(s);
                for sym in Symmetry::ALL {
                    assert!(
                        is_blocker(&apply_symmetry(&b, sym), LIMIT).unwrap().is_blocker,
                        "{s} {sym:?}"
                    );
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut blockers = 0;
        for _ in 0..1000 {
            let n = rng.gen_range(2..=6);
            let density = rng.gen_range(0.1..0.6);
            let cells: Vec<(usize, usize)> = (1..=n)
                .flat_map(|i| (1..=n).map(move |j| (i, j)))
                .filter(|_| rng.gen_bool(density))
                .collect();
            let b = PositionSet::new(n, cells).unwrap();
            let base = is_blocker(&b, LIMIT).unwrap().is_blocker;
            blockers += base as usize;
            for sym in Symmetry::ALL {
                assert_eq!(
                    is_blocker(&apply_symmetry(&b, sym), LIMIT).unwrap().is_blocker,
                    base
                );
            }
        }
        // the sample must exercise both outcomes
        assert!(blockers > 0 && blockers < 1000);
    }

    fn subsets_of_size(universe: usize, k: usize, mut f: impl FnMut(&[usize])) {
        fn go(start: usize, universe: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
            if cur.len() == k {
                f(cur);
                return;
            }
            for x in start..universe {
                if universe - x < k - cur.len() {
                    break;
                }
                cur.push(x);
                go(x + 1, universe, k, cur, f);
                cur.pop();
            }
        }
        go(0, universe, k, &mut Vec::new(), &mut f);
    }

    #[test]
    fn minimal_implies_minimum_exhaustively() {
        for n in 1..=5 {
            let mut found = 0;
            subsets_of_size(n * n, n, |idx| {
                let b = PositionSet::new(n, idx.iter().map(|&k| Cell::from_index(n, k))).unwrap();
                if is_minimal(&b, LIMIT).unwrap() {
                    found += 1;
                    assert!(is_minimum(&b, LIMIT).unwrap(), "{b:?}");
                    assert_eq!(hankel_coverage(&b), vec![1; n]);
                }
            });
            let expected_at_least = if n == 1 { 1 } else { 2 * n };
            assert!(found >= expected_at_least, "n={n} found {found}");
        }
    }

    #[test]
    fn nothing_smaller_than_n_blocks() {
        for n in 1..=5 {
            subsets_of_size(n * n, n - 1, |idx| {
                let b = PositionSet::new(n, idx.iter().map(|&k| Cell::from_index(n, k))).unwrap();
                assert!(!is_blocker(&b, LIMIT).unwrap().is_blocker);
            });
        }
    }

    #[test]
    fn verdict_json() {
        let v = is_blocker(&PositionSet::empty(2).unwrap(), LIMIT).unwrap();
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"is_blocker":false,"witness":[1,2]}"#
        );
        let v = is_blocker(&PositionSet::row(2, 1).unwrap(), LIMIT).unwrap();
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"is_blocker":true}"#);
    }
}
