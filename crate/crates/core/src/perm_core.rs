//! Permutations in one-line notation, 123-pattern detection, enumeration of
//! 123-avoiding permutations and the cyclic-Hankel labeling of grid cells.
//!
//! Everything public is 1-based: `image[i - 1]` is the column of the 1 in
//! row `i` of the permutation matrix.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blocker_model::{Cell, PositionSet};
use crate::error::{Error, Result};

/// Default cap on the order accepted by enumeration and the oracles.
pub const DEFAULT_ORDER_LIMIT: usize = 12;

/// Hard ceiling independent of configuration; the enumerator packs used
/// columns into a `u64`.
const ABSOLUTE_ORDER_LIMIT: usize = 64;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("order must be at least 1".into()));
        }
        let mut seen = vec![false; n];
        for &v in &image {
            if v == 0 || v > n {
                return Err(Error::InvalidPermutation(format!("value {v} not in 1..={n}")));
            }
            if std::mem::replace(&mut seen[v - 1], true) {
                return Err(Error::InvalidPermutation(format!("value {v} repeated")));
            }
        }
        Ok(Permutation { image })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            image: (1..=n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// Column of the 1 in `row` (1-based).
    pub fn col_of(&self, row: usize) -> usize {
        self.image[row - 1]
    }

    /// The cells `(i, image[i])` of the permutation matrix, row by row.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.image.iter().enumerate().map(|(i, &c)| Cell::new(i + 1, c))
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.n()];
        for (i, &c) in self.image.iter().enumerate() {
            inv[c - 1] = i + 1;
        }
        Permutation { image: inv }
    }

    /// Length of the longest strictly increasing subsequence (patience sorting).
    pub fn lis_length(&self) -> usize {
        let mut tails: Vec<usize> = Vec::with_capacity(self.n());
        for &v in &self.image {
            match tails.binary_search(&v) {
                Ok(_) => {}
                Err(pos) if pos == tails.len() => tails.push(v),
                Err(pos) => tails[pos] = v,
            }
        }
        tails.len()
    }

    pub fn contains_123(&self) -> bool {
        // Single pass: track the smallest value seen and the smallest value
        // that ends an increasing pair; anything above the latter closes a triple.
        let mut min_first = usize::MAX;
        let mut min_second = usize::MAX;
        for &v in &self.image {
            if v > min_second {
                return true;
            }
            if v > min_first {
                min_second = min_second.min(v);
            } else {
                min_first = v;
            }
        }
        false
    }

    /// The permutation whose matrix is the image of this one under `sym`.
    pub fn apply_symmetry(&self, sym: Symmetry) -> Self {
        let n = self.n();
        match sym {
            Symmetry::Transpose => self.inverse(),
            Symmetry::Rot180 => Permutation {
                image: self.image.iter().rev().map(|&c| n + 1 - c).collect(),
            },
            Symmetry::HankelTranspose => {
                // (i, j) -> (n+1-j, n+1-i)
                let mut image = vec![0; n];
                for (i, &c) in self.image.iter().enumerate() {
                    image[n - c] = n - i;
                }
                Permutation { image }
            }
        }
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(image: Vec<usize>) -> Result<Self> {
        Permutation::new(image)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.image
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, v) in self.image.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// n-th Catalan number, exact for n <= 35.
pub fn catalan(n: usize) -> u64 {
    let mut c: u64 = 1;
    for k in 0..n as u64 {
        c = c * 2 * (2 * k + 1) / (k + 2);
    }
    c
}

fn check_order(n: usize, limit: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidPermutation("order must be at least 1".into()));
    }
    let limit = limit.min(ABSOLUTE_ORDER_LIMIT);
    if n > limit {
        return Err(Error::OrderTooLarge { n, limit });
    }
    Ok(())
}

/// Every 123-avoiding permutation of order `n`, in lexicographic order of
/// the image.
///
/// Rows are filled top to bottom and a branch is cut as soon as the prefix
/// contains an increasing triple.
pub fn enumerate_avoiders(n: usize, limit: usize) -> Result<Vec<Permutation>> {
    check_order(n, limit)?;

    let roots: Vec<usize> = (1..=n).collect();
    let per_root = |&first: &usize| {
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(n);
        prefix.push(first);
        let state = PrefixState {
            used: 1u64 << (first - 1),
            min_first: first,
            min_second: usize::MAX,
        };
        extend_avoiders(n, &mut prefix, state, &mut out);
        out
    };

    let chunks: Vec<Vec<Permutation>> = if n >= 9 {
        roots.par_iter().map(per_root).collect()
    } else {
        roots.iter().map(per_root).collect()
    };
    Ok(chunks.into_iter().flatten().collect())
}

#[derive(Clone, Copy)]
struct PrefixState {
    used: u64,
    min_first: usize,
    min_second: usize,
}

fn extend_avoiders(n: usize, prefix: &mut Vec<usize>, st: PrefixState, out: &mut Vec<Permutation>) {
    if prefix.len() == n {
        out.push(Permutation {
            image: prefix.clone(),
        });
        return;
    }
    // Values above min_second would complete a 123.
    let hi = st.min_second.min(n);
    for v in 1..=hi {
        if st.used & (1u64 << (v - 1)) != 0 || v == st.min_second {
            continue;
        }
        let next = if v > st.min_first {
            PrefixState {
                used: st.used | (1u64 << (v - 1)),
                min_first: st.min_first,
                min_second: st.min_second.min(v),
            }
        } else {
            PrefixState {
                used: st.used | (1u64 << (v - 1)),
                min_first: v,
                min_second: st.min_second,
            }
        };
        prefix.push(v);
        extend_avoiders(n, prefix, next, out);
        prefix.pop();
    }
}

type AvoiderTable = RwLock<HashMap<usize, Arc<[Permutation]>>>;

fn table() -> &'static AvoiderTable {
    static TABLE: OnceLock<AvoiderTable> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Shared, memoized avoider list for order `n`.
pub fn avoiders(n: usize, limit: usize) -> Result<Arc<[Permutation]>> {
    check_order(n, limit)?;
    if let Some(list) = table().read().expect("avoider table poisoned").get(&n) {
        return Ok(Arc::clone(list));
    }
    let list: Arc<[Permutation]> = enumerate_avoiders(n, limit)?.into();
    let mut guard = table().write().expect("avoider table poisoned");
    Ok(Arc::clone(guard.entry(n).or_insert(list)))
}

/// Seeds the memo with an externally stored list (e.g. a disk cache).
///
/// The list is checked before it is accepted: strictly increasing
/// lexicographic order, every entry 123-avoiding, and exactly Catalan(n)
/// entries. Together these force it to equal the enumerated list.
pub fn install_avoiders(n: usize, perms: Vec<Permutation>) -> Result<()> {
    if perms.len() as u64 != catalan(n) {
        return Err(Error::Parse(format!(
            "cached avoider list for n={n} has {} entries, expected {}",
            perms.len(),
            catalan(n)
        )));
    }
    for (k, p) in perms.iter().enumerate() {
        if p.n() != n {
            return Err(Error::OrderMismatch {
                expected: n,
                found: p.n(),
            });
        }
        if p.contains_123() {
            return Err(Error::Parse(format!("cached entry {p} contains a 123-pattern")));
        }
        if k > 0 && perms[k - 1] >= *p {
            return Err(Error::Parse("cached avoider list is not strictly sorted".into()));
        }
    }
    table()
        .write()
        .expect("avoider table poisoned")
        .entry(n)
        .or_insert_with(|| perms.into());
    Ok(())
}

/// Label of a cyclic-Hankel diagonal; 0 stands for the first letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HankelLabel(pub usize);

impl HankelLabel {
    pub fn value(self) -> usize {
        self.0
    }
}

pub fn hankel_label(n: usize, row: usize, col: usize) -> Result<HankelLabel> {
    if n == 0 || row == 0 || col == 0 || row > n || col > n {
        return Err(Error::IndexOutOfRange { n, row, col });
    }
    Ok(HankelLabel((row + col - 2) % n))
}

/// The three non-trivial symmetries of the square that preserve
/// 123-avoidance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    Transpose,
    HankelTranspose,
    Rot180,
}

impl Symmetry {
    pub const ALL: [Symmetry; 3] = [Symmetry::Transpose, Symmetry::HankelTranspose, Symmetry::Rot180];

    pub fn apply_cell(self, n: usize, cell: Cell) -> Cell {
        let (i, j) = (cell.row, cell.col);
        match self {
            Symmetry::Transpose => Cell::new(j, i),
            Symmetry::HankelTranspose => Cell::new(n + 1 - j, n + 1 - i),
            Symmetry::Rot180 => Cell::new(n + 1 - i, n + 1 - j),
        }
    }
}

pub fn apply_symmetry(cells: &PositionSet, sym: Symmetry) -> PositionSet {
    let n = cells.n();
    PositionSet::from_cells_unchecked(n, cells.iter().map(|c| sym.apply_cell(n, c)))
}
