//! Position sets on an n×n grid and the flag-shaped family built from them.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A grid cell, 1-based. Ordering is row-major.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }

    /// Row-major bit index on an n×n grid.
    pub fn index(self, n: usize) -> usize {
        (self.row - 1) * n + (self.col - 1)
    }

    pub fn from_index(n: usize, idx: usize) -> Self {
        Cell::new(idx / n + 1, idx % n + 1)
    }
}

impl From<(usize, usize)> for Cell {
    fn from((row, col): (usize, usize)) -> Self {
        Cell { row, col }
    }
}

impl From<Cell> for (usize, usize) {
    fn from(c: Cell) -> Self {
        (c.row, c.col)
    }
}

impl fmt::Debug for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A set of cells of an n×n grid. Iteration and serialization are row-major.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPositionSet", into = "RawPositionSet")]
pub struct PositionSet {
    n: usize,
    cells: BTreeSet<Cell>,
}

#[derive(Serialize, Deserialize)]
struct RawPositionSet {
    n: usize,
    cells: Vec<Cell>,
}

impl TryFrom<RawPositionSet> for PositionSet {
    type Error = Error;

    fn try_from(raw: RawPositionSet) -> Result<Self> {
        PositionSet::new(raw.n, raw.cells)
    }
}

impl From<PositionSet> for RawPositionSet {
    fn from(ps: PositionSet) -> Self {
        RawPositionSet {
            n: ps.n,
            cells: ps.cells.into_iter().collect(),
        }
    }
}

impl PositionSet {
    pub fn new<C: Into<Cell>>(n: usize, cells: impl IntoIterator<Item = C>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("grid order must be at least 1".into()));
        }
        let mut set = BTreeSet::new();
        for c in cells {
            let c = c.into();
            if c.row == 0 || c.col == 0 || c.row > n || c.col > n {
                return Err(Error::IndexOutOfRange {
                    n,
                    row: c.row,
                    col: c.col,
                });
            }
            set.insert(c);
        }
        Ok(PositionSet { n, cells: set })
    }

    pub fn empty(n: usize) -> Result<Self> {
        PositionSet::new::<Cell>(n, [])
    }

    /// Caller guarantees every cell is in range.
    pub(crate) fn from_cells_unchecked(n: usize, cells: impl IntoIterator<Item = Cell>) -> Self {
        let cells: BTreeSet<Cell> = cells.into_iter().collect();
        debug_assert!(cells
            .iter()
            .all(|c| (1..=n).contains(&c.row) && (1..=n).contains(&c.col)));
        PositionSet { n, cells }
    }

    /// Builds a set from a row-major bitmask (bit `(r-1)*n + (c-1)`).
    pub fn from_mask(n: usize, mask: u64) -> Self {
        PositionSet::from_cells_unchecked(
            n,
            (0..n * n)
                .filter(|&k| mask >> k & 1 == 1)
                .map(|k| Cell::from_index(n, k)),
        )
    }

    /// Row-major bitmask; `None` when n² > 64.
    pub fn to_mask(&self) -> Option<u64> {
        if self.n * self.n > 64 {
            return None;
        }
        Some(self.cells.iter().fold(0u64, |m, c| m | 1u64 << c.index(self.n)))
    }

    pub fn full(n: usize) -> Result<Self> {
        PositionSet::new(n, (1..=n).flat_map(|i| (1..=n).map(move |j| (i, j))))
    }

    pub fn row(n: usize, r: usize) -> Result<Self> {
        PositionSet::new(n, (1..=n).map(|j| (r, j)))
    }

    pub fn column(n: usize, c: usize) -> Result<Self> {
        PositionSet::new(n, (1..=n).map(|i| (i, c)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, cell: Cell) -> bool {
        self.cells.contains(&cell)
    }

    pub fn iter(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells.iter().copied()
    }

    pub fn without(&self, cell: Cell) -> Self {
        let mut cells = self.cells.clone();
        cells.remove(&cell);
        PositionSet { n: self.n, cells }
    }

    pub fn with(&self, cell: Cell) -> Result<Self> {
        PositionSet::new(self.n, self.cells.iter().copied().chain([cell]))
    }

    pub fn union(&self, other: &PositionSet) -> Result<Self> {
        self.same_order(other)?;
        Ok(PositionSet {
            n: self.n,
            cells: self.cells.union(&other.cells).copied().collect(),
        })
    }

    pub fn is_disjoint(&self, other: &PositionSet) -> Result<bool> {
        self.same_order(other)?;
        Ok(self.cells.is_disjoint(&other.cells))
    }

    fn same_order(&self, other: &PositionSet) -> Result<()> {
        if self.n != other.n {
            return Err(Error::OrderMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    /// Dense row-major membership table, for hot loops.
    pub fn grid(&self) -> Vec<bool> {
        let mut g = vec![false; self.n * self.n];
        for c in &self.cells {
            g[c.index(self.n)] = true;
        }
        g
    }

    /// Parses `n` lines of `n` characters, `X` for a member cell and `.` otherwise.
    /// Blank lines and trailing whitespace are ignored.
    pub fn from_grid(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text
            .lines()
            .map(str::trim_end)
            .filter(|l| !l.is_empty())
            .collect();
        let n = lines.len();
        if n == 0 {
            return Err(Error::Parse("empty grid".into()));
        }
        let mut cells = Vec::new();
        for (i, line) in lines.iter().enumerate() {
            let chars: Vec<char> = line.chars().collect();
            if chars.len() != n {
                return Err(Error::Parse(format!(
                    "grid line {} has {} characters, expected {n}",
                    i + 1,
                    chars.len()
                )));
            }
            for (j, ch) in chars.into_iter().enumerate() {
                match ch {
                    'X' | 'x' => cells.push((i + 1, j + 1)),
                    '.' => {}
                    other => {
                        return Err(Error::Parse(format!(
                            "unexpected character {other:?} at line {}",
                            i + 1
                        )))
                    }
                }
            }
        }
        PositionSet::new(n, cells)
    }

    pub fn to_grid(&self) -> String {
        let mut out = String::with_capacity(self.n * (self.n + 1));
        for i in 1..=self.n {
            for j in 1..=self.n {
                out.push(if self.contains(Cell::new(i, j)) { 'X' } else { '.' });
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for PositionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PositionSet(n={}, {:?})", self.n, self.cells)
    }
}

/// The triple (n, m, t) of a flag-shaped blocker: pole in column `m`,
/// `t` unoccupied rows below it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawFlagSpec", into = "RawFlagSpec")]
pub struct FlagSpec {
    n: usize,
    m: usize,
    t: usize,
}

#[derive(Serialize, Deserialize)]
struct RawFlagSpec {
    n: usize,
    m: usize,
    t: usize,
}

impl TryFrom<RawFlagSpec> for FlagSpec {
    type Error = Error;

    fn try_from(r: RawFlagSpec) -> Result<Self> {
        FlagSpec::new(r.n, r.m, r.t)
    }
}

impl From<FlagSpec> for RawFlagSpec {
    fn from(s: FlagSpec) -> Self {
        RawFlagSpec {
            n: s.n,
            m: s.m,
            t: s.t,
        }
    }
}

impl FlagSpec {
    pub fn new(n: usize, m: usize, t: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("n must be at least 1".into()));
        }
        if m == 0 || m > n {
            return Err(Error::InvalidSpec(format!("m={m} not in 1..={n}")));
        }
        if t >= m {
            return Err(Error::InvalidSpec(format!("t={t} must be at most m-1={}", m - 1)));
        }
        Ok(FlagSpec { n, m, t })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Every valid spec of order `n`, ordered by (m, t).
    pub fn all(n: usize) -> impl Iterator<Item = FlagSpec> {
        (1..=n).flat_map(move |m| (0..m).map(move |t| FlagSpec { n, m, t }))
    }

    /// Specs with t = m-1, whose flag and pole form a full rectangle.
    pub fn is_rectangular(&self) -> bool {
        self.t + 1 == self.m
    }

    /// n + t(n-m)
    pub fn expected_cardinality(&self) -> usize {
        self.n + self.t * (self.n - self.m)
    }

    /// The spec whose flag equals `ps` cell-for-cell, if any.
    pub fn recognize(ps: &PositionSet) -> Option<FlagSpec> {
        FlagSpec::all(ps.n())
            .filter(|s| s.expected_cardinality() == ps.len())
            .find(|s| flag_positions(*s) == *ps)
    }
}

impl fmt::Display for FlagSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B_{}({},{})", self.n, self.m, self.t)
    }
}

/// Pole `{(i, m) : i <= n-t}` plus flag `{(i, j) : i <= n-m+1, m-t <= j <= m-1}`.
pub fn flag_positions(spec: FlagSpec) -> PositionSet {
    let FlagSpec { n, m, t } = spec;
    let pole = (1..=n - t).map(move |i| Cell::new(i, m));
    let flag = (1..=n - m + 1).flat_map(move |i| (m - t..m).map(move |j| Cell::new(i, j)));
    PositionSet::from_cells_unchecked(n, pole.chain(flag))
}

/// The L-shaped blocker of width `s` and height `r` anchored at (1, n).
pub fn l_shape_positions(n: usize, s: usize, r: usize) -> Result<PositionSet> {
    if s == 0 || r == 0 || r + s != n + 1 {
        return Err(Error::InvalidSpec(format!(
            "L-shape needs s, r >= 1 and r + s = n + 1 (got n={n}, s={s}, r={r})"
        )));
    }
    Ok(flag_positions(FlagSpec::new(n, n, s - 1)?))
}

/// The t × (n-m) block in the lower right corner: rows n-t+1..=n, columns m+1..=n.
pub fn corner_forbidden_region(spec: FlagSpec) -> PositionSet {
    let FlagSpec { n, m, t } = spec;
    PositionSet::from_cells_unchecked(
        n,
        (n - t + 1..=n).flat_map(move |i| (m + 1..=n).map(move |j| Cell::new(i, j))),
    )
}

pub fn cardinality(ps: &PositionSet) -> usize {
    ps.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(n: usize, m: usize, t: usize) -> FlagSpec {
        FlagSpec::new(n, m, t).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(FlagSpec::new(5, 3, 3).is_err());
        assert!(FlagSpec::new(5, 0, 0).is_err());
        assert!(FlagSpec::new(5, 6, 0).is_err());
        assert!(FlagSpec::new(0, 1, 0).is_err());
        assert!(FlagSpec::new(5, 1, 0).is_ok());
        assert!(serde_json::from_str::<FlagSpec>(r#"{"n":4,"m":2,"t":2}"#).is_err());
    }

    #[test]
    fn worked_flag_10_7_3() {
        let b = flag_positions(spec(10, 7, 3));
        assert_eq!(cardinality(&b), 19);
        assert!(b.contains(Cell::new(1, 4)));
        assert!(b.contains(Cell::new(7, 7)));
        assert!(!b.contains(Cell::new(5, 4)));
        assert!(!b.contains(Cell::new(8, 7)));
    }

    #[test]
    fn bare_column_when_t_zero_and_m_n() {
        for n in 1..=8 {
            assert_eq!(flag_positions(spec(n, n, 0)), PositionSet::column(n, n).unwrap());
        }
    }

    #[test]
    fn l_shape_of_order_six() {
        let expected = PositionSet::new(6, [(1, 3), (1, 4), (1, 5), (1, 6), (2, 6), (3, 6)]).unwrap();
        assert_eq!(flag_positions(spec(6, 6, 3)), expected);
        assert_eq!(l_shape_positions(6, 4, 3).unwrap(), expected);
    }

    #[test]
    fn l_shape_extremes() {
        for n in 1..=7 {
            assert_eq!(
                l_shape_positions(n, 1, n).unwrap(),
                PositionSet::column(n, n).unwrap()
            );
            assert_eq!(
                l_shape_positions(n, n, 1).unwrap(),
                PositionSet::row(n, 1).unwrap()
            );
        }
        assert!(l_shape_positions(6, 3, 3).is_err());
        assert!(l_shape_positions(6, 0, 7).is_err());
    }

    #[test]
    fn l_shape_equals_flag_with_m_n() {
        for n in 1..=10 {
            for s in 1..=n {
                let r = n + 1 - s;
                assert_eq!(
                    l_shape_positions(n, s, r).unwrap(),
                    flag_positions(spec(n, n, s - 1))
                );
            }
        }
    }

    #[test]
    fn corner_examples() {
        let c = corner_forbidden_region(spec(10, 8, 3));
        let expected: Vec<Cell> = (8..=10)
            .flat_map(|i| (9..=10).map(move |j| Cell::new(i, j)))
            .collect();
        assert_eq!(c.iter().collect::<Vec<_>>(), expected);
        assert!(corner_forbidden_region(spec(10, 10, 3)).is_empty());
        assert_eq!(
            corner_forbidden_region(spec(5, 4, 2)),
            PositionSet::new(5, [(4, 5), (5, 5)]).unwrap()
        );
        assert!(corner_forbidden_region(spec(5, 3, 0)).is_empty());
    }

    #[test]
    fn cardinality_examples() {
        assert_eq!(cardinality(&PositionSet::empty(4).unwrap()), 0);
        assert_eq!(cardinality(&flag_positions(spec(10, 5, 4))), 30);
    }

    #[test]
    fn cardinality_formula_up_to_thirty() {
        for n in 1..=30 {
            for s in FlagSpec::all(n) {
                assert_eq!(flag_positions(s).len(), s.n() + s.t() * (s.n() - s.m()), "{s}");
            }
        }
    }

    #[test]
    fn rectangular_flags_are_rectangles() {
        for n in 1..=12 {
            for s in FlagSpec::all(n) {
                let (m, t) = (s.m(), s.t());
                let rect = (1..=n - m + 1).flat_map(|i| (1..=m).map(move |j| (i, j)));
                let tail: Vec<(usize, usize)> = (n - m + 2..=n - t).map(|i| (i, m)).collect();
                if s.is_rectangular() {
                    assert!(tail.is_empty());
                    assert_eq!(flag_positions(s), PositionSet::new(n, rect).unwrap(), "{s}");
                } else {
                    assert!(!tail.is_empty(), "{s}");
                }
            }
        }
    }

    #[test]
    fn corner_disjoint_from_flag() {
        for n in 1..=15 {
            for s in FlagSpec::all(n) {
                assert!(corner_forbidden_region(s)
                    .is_disjoint(&flag_positions(s))
                    .unwrap());
                assert_eq!(corner_forbidden_region(s).len(), s.t() * (n - s.m()));
            }
        }
    }

    #[test]
    fn recognize_finds_every_flag() {
        for n in 1..=9 {
            for s in FlagSpec::all(n) {
                assert_eq!(FlagSpec::recognize(&flag_positions(s)), Some(s));
            }
        }
        assert_eq!(FlagSpec::recognize(&PositionSet::row(4, 2).unwrap()), None);
    }

    #[test]
    fn order_mismatch_is_an_error() {
        let a = PositionSet::row(3, 1).unwrap();
        let b = PositionSet::row(4, 1).unwrap();
        assert_eq!(
            a.union(&b),
            Err(Error::OrderMismatch {
                expected: 3,
                found: 4
            })
        );
    }

    #[test]
    fn json_layout() {
        let b = PositionSet::new(3, [(2, 1), (1, 3), (1, 1)]).unwrap();
        assert_eq!(
            serde_json::to_string(&b).unwrap(),
            r#"{"n":3,"cells":[[1,1],[1,3],[2,1]]}"#
        );
        assert!(serde_json::from_str::<PositionSet>(r#"{"n":2,"cells":[[3,1]]}"#).is_err());
        assert!(serde_json::from_str::<PositionSet>(r#"{"n":0,"cells":[]}"#).is_err());
    }

    #[test]
    fn grid_parse_errors() {
        assert!(PositionSet::from_grid("").is_err());
        assert!(PositionSet::from_grid("X.\n.").is_err());
        assert!(PositionSet::from_grid("X?\n..").is_err());
        let g = PositionSet::from_grid("..X\n...\nX..\n").unwrap();
        assert_eq!(g, PositionSet::new(3, [(1, 3), (3, 1)]).unwrap());
    }

    fn arb_set() -> impl Strategy<Value = PositionSet> {
        (1usize..=8).prop_flat_map(|n| {
            proptest::collection::vec((1..=n, 1..=n), 0..=n * n)
                .prop_map(move |cells| PositionSet::new(n, cells).unwrap())
        })
    }

    proptest! {
        #[test]
        fn grid_and_json_roundtrip(ps in arb_set()) {
            prop_assert_eq!(PositionSet::from_grid(&ps.to_grid()).unwrap(), ps.clone());
            let text = serde_json::to_string(&ps).unwrap();
            prop_assert_eq!(serde_json::from_str::<PositionSet>(&text).unwrap(), ps.clone());
            if let Some(mask) = ps.to_mask() {
                prop_assert_eq!(PositionSet::from_mask(ps.n(), mask), ps);
            }
        }
    }
}
