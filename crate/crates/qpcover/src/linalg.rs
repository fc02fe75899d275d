//! Exact linear algebra: sparse echelon forms keyed by the largest index, and small dense
//! routines (rank, row reduction, null spaces).

use std::collections::{BTreeMap, HashMap};

use crate::scalar::Scalar;

/// Sparse vector with coordinates in increasing index order.
pub type SparseVec<S> = BTreeMap<usize, S>;

/// Adds `c * row` to `v`, dropping cancelled entries.
pub fn axpy<S: Scalar>(v: &mut SparseVec<S>, c: &S, row: &[(usize, S)]) {
    for (i, x) in row {
        let add = c.clone() * x.clone();
        match v.get_mut(i) {
            Some(e) => {
                *e += &add;
                if e.is_zero() {
                    v.remove(i);
                }
            }
            None => {
                if !add.is_zero() {
                    v.insert(*i, add);
                }
            }
        }
    }
}

/// Row space in echelon form where every row is normalised so that its largest index (the
/// pivot) has coefficient one.
///
/// Reducing by such rows rewrites late indices in terms of earlier ones, so the indices that
/// never become pivots are exactly the greedy earliest complement.
#[derive(Clone, Debug)]
pub struct SparseEchelon<S> {
    rows: HashMap<usize, Vec<(usize, S)>>,
}

impl<S: Scalar> Default for SparseEchelon<S> {
    fn default() -> Self {
        SparseEchelon { rows: HashMap::new() }
    }
}

impl<S: Scalar> SparseEchelon<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, i: usize) -> bool {
        self.rows.contains_key(&i)
    }

    pub fn pivots(&self) -> impl Iterator<Item = &usize> {
        self.rows.keys()
    }

    /// Fully reduces `v` against the stored rows.
    pub fn reduce(&self, mut v: SparseVec<S>) -> SparseVec<S> {
        let mut upper = usize::MAX;
        loop {
            let next = v
                .range(..upper)
                .rev()
                .find(|(i, _)| self.rows.contains_key(i))
                .map(|(i, c)| (*i, c.clone()));
            let Some((p, c)) = next else { break };
            let row = &self.rows[&p];
            axpy(&mut v, &(-c), row);
            upper = p;
        }
        v
    }

    /// Reduces only the leading terms of `v` until the leading index is not a pivot.
    fn reduce_leading(&self, mut v: SparseVec<S>) -> SparseVec<S> {
        while let Some((&p, c)) = v.iter().next_back() {
            match self.rows.get(&p) {
                Some(row) => {
                    let c = -c.clone();
                    axpy(&mut v, &c, row);
                }
                None => break,
            }
        }
        v
    }

    /// Inserts `v` into the row space; returns whether the rank grew.
    pub fn insert(&mut self, v: SparseVec<S>) -> bool {
        let v = self.reduce_leading(v);
        let Some((&p, lead)) = v.iter().next_back() else {
            return false;
        };
        let inv = lead.inverse().expect("nonzero leading coefficient");
        let row: Vec<(usize, S)> = v.iter().map(|(i, x)| (*i, x.clone() * inv.clone())).collect();
        self.rows.insert(p, row);
        true
    }
}

/// Dense matrix stored row-major.
pub type Matrix<S> = Vec<Vec<S>>;

pub fn zeros<S: Scalar>(rows: usize, cols: usize) -> Matrix<S> {
    vec![vec![S::zero(); cols]; rows]
}

pub fn mat_mul<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Matrix<S> {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = zeros(n, m);
    for (i, row) in a.iter().enumerate() {
        for (k, x) in row.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b[k].iter().enumerate() {
                if !y.is_zero() {
                    out[i][j] += &(x.clone() * y.clone());
                }
            }
        }
    }
    out
}

pub fn is_zero_matrix<S: Scalar>(a: &Matrix<S>) -> bool {
    a.iter().all(|r| r.iter().all(|x| x.is_zero()))
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<S: Scalar>(a: &mut Matrix<S>) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].inverse().expect("nonzero pivot");
        for x in a[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let sub = f.clone() * a[r][j].clone();
                    a[i][j] = a[i][j].clone() - sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<S: Scalar>(a: &Matrix<S>) -> usize {
    let mut m = a.clone();
    rref(&mut m).len()
}

/// Basis of the right null space `{x : a x = 0}`.
pub fn nullspace<S: Scalar>(a: &Matrix<S>, cols: usize) -> Vec<Vec<S>> {
    let mut m = a.clone();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero(); cols];
            v[f] = S::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::Zero;

    type Q = BigRational;

    fn q(v: i64) -> Q {
        Q::from_i64(v)
    }

    fn sv(entries: &[(usize, i64)]) -> SparseVec<Q> {
        entries.iter().map(|&(i, v)| (i, q(v))).collect()
    }

    #[test]
    fn echelon_keeps_earliest_complement() {
        let mut e = SparseEchelon::new();
        assert!(e.insert(sv(&[(0, 1), (2, -1)])));
        assert!(e.insert(sv(&[(1, 1), (2, 1)])));
        assert!(!e.insert(sv(&[(0, 1), (1, 1)])));
        assert_eq!(e.rank(), 2);
        let pivots: Vec<usize> = {
            let mut p: Vec<usize> = e.pivots().copied().collect();
            p.sort();
            p
        };
        assert_eq!(pivots, vec![1, 2]);
        assert_eq!(e.reduce(sv(&[(2, 1)])), sv(&[(0, 1)]));
        assert_eq!(e.reduce(sv(&[(1, 1)])), sv(&[(0, -1)]));
    }

    #[test]
    fn nullspace_of_rank_one() {
        let a = vec![vec![q(1), q(2), q(3)]];
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            let dot = v.iter().zip(&a[0]).fold(q(0), |s, (x, y)| s + x.clone() * y.clone());
            assert!(dot.is_zero());
        }
    }
}
