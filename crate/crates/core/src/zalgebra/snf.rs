//! Smith normal form.
//!
//! Two independent eliminations: a sparse one that only tracks the diagonal
//! (used for homology, where matrices are large and mostly ±1), and a dense
//! one that also accumulates the unimodular transforms.
//!
//! The dense path pivots on the nonzero entry of smallest absolute value,
//! lowest `(row, col)` first. The sparse path first exhausts unit pivots,
//! taking the shortest row and the sparsest column within it; what is left
//! is reduced with the smallest-absolute-value rule, ties broken by
//! Markowitz cost `(row_len-1)(col_len-1)`.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use num_bigint::BigInt;

use super::{IntScalar, SparseMat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult<T> {
    /// Positive invariant factors `d₁ | d₂ | … | d_r`.
    pub invariant_factors: Vec<T>,
    pub rank: usize,
    /// `(U, V)` with `U·A·V = diag(d₁, …, d_r, 0, …)`.
    pub transforms: Option<(SparseMat<T>, SparseMat<T>)>,
}

impl<T: IntScalar> SnfResult<T> {
    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<T> {
        self.invariant_factors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

pub fn snf<T: IntScalar>(a: &SparseMat<T>, want_transforms: bool) -> SnfResult<T> {
    if want_transforms {
        snf_dense(a)
    } else {
        snf_sparse(a)
    }
}

/// Turns an arbitrary diagonal into the divisibility chain with the same
/// elementary divisors, by repeated `(a, b) ↦ (gcd, lcm)`.
pub fn invariant_factors_of_diagonal<T: IntScalar>(diag: Vec<T>) -> Vec<T> {
    let mut units = 0usize;
    let mut rest: Vec<T> = Vec::new();
    for d in diag {
        let d = d.abs();
        if d.is_zero() {
            continue;
        }
        if d.is_one() {
            units += 1;
        } else {
            rest.push(d);
        }
    }
    for i in 0..rest.len() {
        for j in i + 1..rest.len() {
            let g = rest[i].gcd(&rest[j]);
            let l = rest[i].lcm(&rest[j]);
            rest[i] = g;
            rest[j] = l;
        }
    }
    // gcd steps may have produced further units
    rest.sort();
    let mut out = vec![T::one(); units];
    out.extend(rest);
    out
}

struct SparseElim<T> {
    rows: Vec<Vec<(usize, T)>>,
    col_rows: Vec<BTreeSet<usize>>,
    alive: Vec<bool>,
    /// Rows by current length, possibly stale; candidates for unit pivots.
    queue: BinaryHeap<Reverse<(usize, usize)>>,
}

/// Overflow of a fixed-width scalar.
struct Overflow;

impl<T: IntScalar> SparseElim<T> {
    fn new(a: &SparseMat<T>) -> Self {
        let rows = a.row_vectors();
        let mut col_rows = vec![BTreeSet::new(); a.cols()];
        for (r, row) in rows.iter().enumerate() {
            for (c, _) in row {
                col_rows[*c].insert(r);
            }
        }
        let alive = rows.iter().map(|r| !r.is_empty()).collect();
        let queue =
            rows.iter().enumerate().filter(|(_, r)| !r.is_empty()).map(|(i, r)| Reverse((r.len(), i))).collect();
        SparseElim { rows, col_rows, alive, queue }
    }

    fn value(&self, r: usize, c: usize) -> Option<&T> {
        let row = &self.rows[r];
        row.binary_search_by_key(&c, |e| e.0).ok().map(|i| &row[i].1)
    }

    /// Entries are kept below half the type's range so that negation,
    /// `abs` and floor division cannot overflow.
    fn check(v: T) -> Result<T, Overflow> {
        let two = T::one() + T::one();
        v.checked_mul(&two).map(|_| v).ok_or(Overflow)
    }

    /// Shortest live row holding a unit; within it the unit whose column is
    /// sparsest.
    fn next_unit_pivot(&mut self) -> Option<(usize, usize)> {
        while let Some(Reverse((len, r))) = self.queue.pop() {
            if !self.alive[r] || self.rows[r].len() != len {
                continue;
            }
            let best =
                self.rows[r].iter().filter(|(_, v)| v.abs().is_one()).map(|(c, _)| (self.col_rows[*c].len(), *c)).min();
            if let Some((_, c)) = best {
                return Some((r, c));
            }
        }
        None
    }

    /// Minimal `|value|`, then Markowitz cost, then lowest `(row, col)`.
    fn pick_pivot(&self) -> Option<(usize, usize)> {
        let mut best: Option<(T, usize, usize, usize)> = None;
        for (r, row) in self.rows.iter().enumerate() {
            if !self.alive[r] {
                continue;
            }
            let rlen = row.len() - 1;
            for (c, v) in row {
                let abs = v.abs();
                let cost = rlen * (self.col_rows[*c].len() - 1);
                let better = match &best {
                    None => true,
                    Some((ba, bc, _, _)) => abs < *ba || (abs == *ba && cost < *bc),
                };
                if better {
                    let done = abs.is_one() && cost == 0;
                    best = Some((abs, cost, r, *c));
                    if done {
                        return Some((r, *c));
                    }
                }
            }
        }
        best.map(|(_, _, r, c)| (r, c))
    }

    /// `row[k] -= q * row[p]`
    fn row_sub(&mut self, k: usize, p: usize, q: &T) -> Result<(), Overflow> {
        let src = std::mem::take(&mut self.rows[k]);
        let piv = &self.rows[p];
        let mut out = Vec::with_capacity(src.len() + piv.len());
        let (mut i, mut j) = (0, 0);
        while i < src.len() || j < piv.len() {
            let take_src = j >= piv.len() || (i < src.len() && src[i].0 < piv[j].0);
            let take_piv = i >= src.len() || (j < piv.len() && piv[j].0 < src[i].0);
            if take_src {
                out.push(src[i].clone());
                i += 1;
            } else if take_piv {
                let c = piv[j].0;
                let prod = q.checked_mul(&piv[j].1).ok_or(Overflow)?;
                out.push((c, Self::check(-prod)?));
                self.col_rows[c].insert(k);
                j += 1;
            } else {
                let c = src[i].0;
                let prod = q.checked_mul(&piv[j].1).ok_or(Overflow)?;
                let v = Self::check(src[i].1.checked_sub(&prod).ok_or(Overflow)?)?;
                if v.is_zero() {
                    self.col_rows[c].remove(&k);
                } else {
                    out.push((c, v));
                }
                i += 1;
                j += 1;
            }
        }
        self.rows[k] = out;
        if self.rows[k].is_empty() {
            self.alive[k] = false;
        } else {
            self.queue.push(Reverse((self.rows[k].len(), k)));
        }
        Ok(())
    }

    fn retire_row(&mut self, r: usize) {
        for (c, _) in &self.rows[r] {
            self.col_rows[*c].remove(&r);
        }
        self.rows[r].clear();
        self.alive[r] = false;
    }

    /// Clears column `pc` below/above the pivot. Returns whether the column
    /// now holds the pivot alone.
    fn clear_column(&mut self, pr: usize, pc: usize, pv: &T) -> Result<bool, Overflow> {
        let mut clean = true;
        let others: Vec<usize> = self.col_rows[pc].iter().copied().filter(|&k| k != pr).collect();
        for k in others {
            let a = self.value(k, pc).cloned().expect("column entry");
            let q = a.div_floor(pv);
            self.row_sub(k, pr, &q)?;
            if self.value(k, pc).is_some() {
                clean = false;
            }
        }
        Ok(clean)
    }

    fn run(mut self) -> Result<Vec<T>, Overflow> {
        let mut diag = Vec::new();
        // unit pivots first: no divisibility bookkeeping, and the bulk of
        // every differential is eliminated here
        while let Some((pr, pc)) = self.next_unit_pivot() {
            let pv = self.value(pr, pc).cloned().expect("pivot entry");
            self.clear_column(pr, pc, &pv)?;
            diag.push(T::one());
            self.retire_row(pr);
        }
        while let Some((pr, pc)) = self.pick_pivot() {
            let pv = self.value(pr, pc).cloned().expect("pivot entry");
            if !self.clear_column(pr, pc, &pv)? {
                continue;
            }
            // column pc now holds only the pivot, so column operations
            // against it touch row pr alone
            let divisible = self.rows[pr].iter().all(|(_, v)| v.mod_floor(&pv).is_zero());
            if divisible {
                diag.push(pv);
                self.retire_row(pr);
            } else {
                let row = std::mem::take(&mut self.rows[pr]);
                let mut out = Vec::with_capacity(row.len());
                for (c, v) in row {
                    let v = if c == pc { v } else { v.mod_floor(&pv) };
                    if v.is_zero() {
                        self.col_rows[c].remove(&pr);
                    } else {
                        out.push((c, v));
                    }
                }
                self.rows[pr] = out;
            }
        }
        Ok(diag)
    }
}

/// Invariant factors by sparse elimination, or `None` if a fixed-width
/// scalar would overflow.
pub fn try_snf_sparse<T: IntScalar>(a: &SparseMat<T>) -> Option<SnfResult<T>> {
    let diag = SparseElim::new(a).run().ok()?;
    let invariant_factors = invariant_factors_of_diagonal(diag);
    Some(SnfResult { rank: invariant_factors.len(), invariant_factors, transforms: None })
}

/// Invariant factors only, by sparse elimination.
///
/// # Panics
/// On overflow of a fixed-width scalar; use [`snf_sparse_promoting`] or an
/// arbitrary-precision type when entries may grow.
pub fn snf_sparse<T: IntScalar>(a: &SparseMat<T>) -> SnfResult<T> {
    try_snf_sparse(a).expect("integer overflow in sparse Smith normal form")
}

/// Machine-word elimination, redone with `BigInt` if it overflows.
pub fn snf_sparse_promoting(a: &SparseMat<i64>) -> SnfResult<BigInt> {
    match try_snf_sparse(a) {
        Some(r) => SnfResult {
            invariant_factors: r.invariant_factors.into_iter().map(BigInt::from).collect(),
            rank: r.rank,
            transforms: None,
        },
        None => snf_sparse(&a.map(|&v| BigInt::from(v))),
    }
}

/// Dense elimination that also returns `U` and `V`.
pub fn snf_dense<T: IntScalar>(a: &SparseMat<T>) -> SnfResult<T> {
    let (nr, nc) = (a.rows(), a.cols());
    let mut m = a.to_dense();
    let mut u = SparseMat::<T>::identity(nr).to_dense();
    let mut v = SparseMat::<T>::identity(nc).to_dense();

    fn swap_cols<T>(m: &mut [Vec<T>], a: usize, b: usize) {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    }
    // row[k] -= q * row[p]
    fn row_axpy<T: IntScalar>(m: &mut [Vec<T>], k: usize, p: usize, q: &T) {
        for c in 0..m[k].len() {
            if !m[p][c].is_zero() {
                let d = q.clone() * m[p][c].clone();
                m[k][c] = m[k][c].clone() - d;
            }
        }
    }
    // col[k] -= q * col[p]
    fn col_axpy<T: IntScalar>(m: &mut [Vec<T>], k: usize, p: usize, q: &T) {
        for row in m.iter_mut() {
            if !row[p].is_zero() {
                let d = q.clone() * row[p].clone();
                row[k] = row[k].clone() - d;
            }
        }
    }

    // quotient rounded to nearest, so remainders stay within |p|/2
    fn nearest_quotient<T: IntScalar>(a: &T, p: &T) -> T {
        let q = a.div_floor(p);
        let r = a.clone() - q.clone() * p.clone();
        if (r.clone() + r).abs() > p.abs() {
            q + T::one()
        } else {
            q
        }
    }

    let mut t = 0;
    while t < nr.min(nc) {
        loop {
            // smallest nonzero in the trailing block, re-picked every round
            let mut best: Option<(T, usize, usize)> = None;
            for (r, row) in m.iter().enumerate().skip(t) {
                for (c, x) in row.iter().enumerate().skip(t) {
                    if x.is_zero() {
                        continue;
                    }
                    let ax = x.abs();
                    if best.as_ref().is_none_or(|(b, _, _)| ax < *b) {
                        best = Some((ax, r, c));
                    }
                }
            }
            let Some((_, pr, pc)) = best else { break };
            m.swap(t, pr);
            u.swap(t, pr);
            swap_cols(&mut m, t, pc);
            swap_cols(&mut v, t, pc);

            let p = m[t][t].clone();
            let mut settled = true;
            for r in t + 1..nr {
                if m[r][t].is_zero() {
                    continue;
                }
                let q = nearest_quotient(&m[r][t], &p);
                row_axpy(&mut m, r, t, &q);
                row_axpy(&mut u, r, t, &q);
                settled &= m[r][t].is_zero();
            }
            for c in t + 1..nc {
                if m[t][c].is_zero() {
                    continue;
                }
                let q = nearest_quotient(&m[t][c], &p);
                col_axpy(&mut m, c, t, &q);
                col_axpy(&mut v, c, t, &q);
                settled &= m[t][c].is_zero();
            }
            if !settled {
                continue;
            }
            // enforce divisibility of the trailing block by the pivot
            let bad = (t + 1..nr).find(|&r| (t + 1..nc).any(|c| !m[r][c].mod_floor(&p).is_zero()));
            match bad {
                Some(r) => {
                    let minus_one = -T::one();
                    row_axpy(&mut m, t, r, &minus_one);
                    row_axpy(&mut u, t, r, &minus_one);
                }
                None => break,
            }
        }
        if m[t][t].is_zero() {
            break;
        }
        if m[t][t].is_negative() {
            for x in m[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
        t += 1;
    }

    let invariant_factors: Vec<T> = (0..nr.min(nc)).map(|i| m[i][i].clone()).take_while(|d| !d.is_zero()).collect();
    SnfResult {
        rank: invariant_factors.len(),
        invariant_factors,
        transforms: Some((SparseMat::from_dense(&u), SparseMat::from_dense(&v))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn big(rows: &[&[i64]]) -> SparseMat<BigInt> {
        let d: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        SparseMat::from_dense(&d)
    }

    fn ints(v: &[BigInt]) -> Vec<i64> {
        v.iter().map(|x| i64::try_from(x).unwrap()).collect()
    }

    #[test]
    fn identity_and_zero() {
        let id = SparseMat::<BigInt>::identity(3);
        for want in [false, true] {
            let r = snf(&id, want);
            assert_eq!(ints(&r.invariant_factors), vec![1, 1, 1]);
            assert_eq!(r.rank, 3);
        }
        let z = SparseMat::<BigInt>::zeros(2, 5);
        assert_eq!(snf(&z, false).rank, 0);
        assert_eq!(snf(&z, true).invariant_factors, vec![]);
        let empty = SparseMat::<BigInt>::zeros(0, 0);
        assert_eq!(snf(&empty, true).rank, 0);
    }

    #[test]
    fn two_by_two() {
        let a = big(&[&[2, 4], &[6, 8]]);
        assert_eq!(ints(&snf(&a, false).invariant_factors), vec![2, 4]);
        let r = snf(&a, true);
        assert_eq!(ints(&r.invariant_factors), vec![2, 4]);
        let (u, v) = r.transforms.unwrap();
        let d = u.mul(&a).mul(&v);
        assert_eq!(d, big(&[&[2, 0], &[0, 4]]));
    }

    #[test]
    fn diagonal_normalization() {
        let f = invariant_factors_of_diagonal(vec![6i64, 4, -1, 0, 10]);
        assert_eq!(f, vec![1, 2, 2, 60]);
        let f = invariant_factors_of_diagonal(vec![2i64, 3]);
        assert_eq!(f, vec![1, 6]);
    }

    #[test]
    fn overflow_is_reported_and_promoted() {
        let big_entry = i64::MAX / 3;
        let a = SparseMat::from_dense(&[vec![2i64, big_entry], vec![big_entry, 3]]);
        assert!(try_snf_sparse(&a).is_none());
        let r = snf_sparse_promoting(&a);
        let exact = snf_sparse(&a.map(|&v| BigInt::from(v)));
        assert_eq!(r, exact);
        assert_eq!(r.rank, 2);
    }

    #[test]
    fn works_with_machine_integers() {
        let a = SparseMat::from_dense(&[vec![2i64, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        assert_eq!(snf_sparse(&a).invariant_factors, vec![2, 6, 12]);
        assert_eq!(snf_dense(&a).invariant_factors, vec![2, 6, 12]);
    }
}
