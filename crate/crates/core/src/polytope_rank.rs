//! Exact rank of sets of permutation matrices and the face ranks of
//! flag-shaped blockers.
//!
//! Matrices are flattened row-major into vectors of length n² and reduced
//! with fraction-free elimination over arbitrary-precision integers. No
//! floating point is involved anywhere.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::blocker_model::{corner_forbidden_region, flag_positions, FlagSpec, PositionSet};
use crate::error::{Error, Result};
use crate::oracle::once_intersecting_avoiders;
use crate::perm_core::Permutation;

/// Incremental row echelon basis over the integers.
///
/// Each stored row is primitive (content 1) with a positive pivot, and is
/// zero on the pivot columns of every earlier row.
#[derive(Debug, Default, Clone)]
pub struct IntegerBasis {
    rows: Vec<(usize, Vec<BigInt>)>,
    width: usize,
}

impl IntegerBasis {
    pub fn new(width: usize) -> Self {
        IntegerBasis {
            rows: Vec::new(),
            width,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis; keeps it if anything survives.
    /// Returns whether the rank grew.
    pub fn insert(&mut self, v: &[i64]) -> bool {
        assert_eq!(v.len(), self.width, "vector width mismatch");
        let mut v: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        for (pivot, row) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            // v <- row[p] * v - v[p] * row
            let a = row[*pivot].clone();
            let b = v[*pivot].clone();
            for (x, r) in v.iter_mut().zip(row) {
                *x = &a * &*x - &b * r;
            }
            make_primitive(&mut v);
        }
        match v.iter().position(|x| !x.is_zero()) {
            Some(pivot) => {
                if v[pivot].is_negative() {
                    v.iter_mut().for_each(|x| *x = -&*x);
                }
                self.rows.push((pivot, v));
                true
            }
            None => false,
        }
    }
}

fn make_primitive(v: &mut [BigInt]) {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        v.iter_mut().for_each(|x| *x = &*x / &g);
    }
}

/// Row-major 0/1 flattening of a permutation matrix.
pub fn flatten(p: &Permutation) -> Vec<i64> {
    let n = p.n();
    let mut v = vec![0; n * n];
    for c in p.cells() {
        v[c.index(n)] = 1;
    }
    v
}

/// Linear rank over the rationals of the permutation matrices as vectors in
/// Q^(n²).
pub fn rank_of_matrices(perms: &[Permutation], n: usize) -> Result<usize> {
    let mut basis = IntegerBasis::new(n * n);
    for p in perms {
        if p.n() != n {
            return Err(Error::OrderMismatch {
                expected: n,
                found: p.n(),
            });
        }
        basis.insert(&flatten(p));
    }
    Ok(basis.rank())
}

/// Linear rank spanned by all n×n permutation matrices: (n-1)² + 1.
pub fn ambient_rank(n: usize) -> i64 {
    let k = n as i64 - 1;
    k * k + 1
}

/// (n-1)² + 1 - t(n-m)
pub fn upper_bound(spec: FlagSpec) -> i64 {
    ambient_rank(spec.n()) - (spec.t() * (spec.n() - spec.m())) as i64
}

/// (n-1)² + 1 - (t+2)(n-m)
pub fn lower_bound(spec: FlagSpec) -> i64 {
    ambient_rank(spec.n()) - ((spec.t() + 2) * (spec.n() - spec.m())) as i64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceReport {
    pub n: usize,
    pub spec: Option<FlagSpec>,
    /// Linear rank of the once-intersecting avoider matrices.
    pub rank: usize,
    /// rank - 1, the affine dimension of their convex hull; absent when rank is 0.
    pub affine_dimension: Option<usize>,
    pub once_count: usize,
    /// (n-1)² + 1, the linear rank of every permutation matrix of order n.
    pub ambient_rank: i64,
    /// (n-1)², the affine dimension of the avoider polytope.
    pub polytope_dimension: i64,
    pub upper_bound: Option<i64>,
    pub lower_bound: Option<i64>,
    pub meets_upper: Option<bool>,
    pub within_bounds: Option<bool>,
}

impl FaceReport {
    /// `n,m,t,once_count,rank,lower,upper,meets_upper,within_bounds`
    pub const CSV_HEADER: &'static str = "n,m,t,once_count,rank,lower,upper,meets_upper,within_bounds";

    /// One CSV row; non-flag inputs leave the spec and bound columns empty.
    pub fn csv_row(&self) -> String {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            opt(self.spec.map(|s| s.m())),
            opt(self.spec.map(|s| s.t())),
            self.once_count,
            self.rank,
            opt(self.lower_bound),
            opt(self.upper_bound),
            opt(self.meets_upper),
            opt(self.within_bounds),
        )
    }
}

/// Face rank of an arbitrary position set. Bounds are filled in when the
/// set is recognisably a flag in the standard orientation.
pub fn face_rank(b: &PositionSet, limit: usize) -> Result<FaceReport> {
    build_report(b, FlagSpec::recognize(b), limit)
}

pub fn face_rank_of_flag(spec: FlagSpec, limit: usize) -> Result<FaceReport> {
    build_report(&flag_positions(spec), Some(spec), limit)
}

fn build_report(b: &PositionSet, spec: Option<FlagSpec>, limit: usize) -> Result<FaceReport> {
    let n = b.n();
    let once = once_intersecting_avoiders(b, limit)?;
    let rank = rank_of_matrices(&once, n)?;
    let upper = spec.map(upper_bound);
    let lower = spec.map(lower_bound);
    let r = rank as i64;
    Ok(FaceReport {
        n,
        spec,
        rank,
        affine_dimension: rank.checked_sub(1),
        once_count: once.len(),
        ambient_rank: ambient_rank(n),
        polytope_dimension: (n as i64 - 1).pow(2),
        upper_bound: upper,
        lower_bound: lower,
        meets_upper: upper.map(|u| r == u),
        within_bounds: upper.zip(lower).map(|(u, l)| l <= r && r <= u),
    })
}

/// Whether no avoider meeting the flag exactly once uses a cell of the
/// lower-right t × (n-m) corner.
pub fn check_forbidden_corner(spec: FlagSpec, limit: usize) -> Result<bool> {
    let corner = corner_forbidden_region(spec);
    if corner.is_empty() {
        // still honour the order limit
        crate::perm_core::avoiders(spec.n(), limit)?;
        return Ok(true);
    }
    let once = once_intersecting_avoiders(&flag_positions(spec), limit)?;
    Ok(once.iter().all(|p| p.cells().all(|c| !corner.contains(c))))
}
