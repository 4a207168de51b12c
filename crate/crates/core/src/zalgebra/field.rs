use std::collections::BTreeMap;

use super::{FieldScalar, SparseMat};

type SparseRow<F> = Vec<(usize, F)>;

/// Reduced row echelon form of a matrix over a field. Each basis row has a
/// unit pivot and is zero in every other pivot column.
#[derive(Debug, Clone)]
pub struct Rref<F> {
    pub cols: usize,
    /// pivot column → reduced row
    pub rows: BTreeMap<usize, SparseRow<F>>,
}

impl<F: FieldScalar> Rref<F> {
    pub fn of(a: &SparseMat<F>) -> Self {
        let mut basis: BTreeMap<usize, SparseRow<F>> = BTreeMap::new();
        for row in a.row_vectors() {
            let mut row = row;
            // reduce the leading entry until it lands in a free column
            loop {
                let Some((lead, lv)) = row.first().cloned() else { break };
                match basis.get(&lead) {
                    Some(b) => row = axpy(&row, &lv, b),
                    None => {
                        let inv = F::one() / lv;
                        let row: SparseRow<F> = row.into_iter().map(|(c, v)| (c, v * inv.clone())).collect();
                        basis.insert(lead, row);
                        break;
                    }
                }
            }
        }
        // back substitution, highest pivot first
        let pivots: Vec<usize> = basis.keys().rev().copied().collect();
        for &p in &pivots {
            let prow = basis[&p].clone();
            for (&q, row) in basis.range_mut(..p) {
                debug_assert!(q < p);
                if let Ok(i) = row.binary_search_by_key(&p, |e| e.0) {
                    let f = row[i].1.clone();
                    *row = axpy(row, &f, &prow);
                }
            }
        }
        Rref { cols: a.cols(), rows: basis }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.rows.keys().copied().collect()
    }
}

/// `row - f * other`, both sorted by column.
fn axpy<F: FieldScalar>(row: &[(usize, F)], f: &F, other: &[(usize, F)]) -> SparseRow<F> {
    let mut out = Vec::with_capacity(row.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < other.len() {
        if j >= other.len() || (i < row.len() && row[i].0 < other[j].0) {
            out.push(row[i].clone());
            i += 1;
        } else if i >= row.len() || other[j].0 < row[i].0 {
            out.push((other[j].0, -(f.clone() * other[j].1.clone())));
            j += 1;
        } else {
            let v = row[i].1.clone() - f.clone() * other[j].1.clone();
            if !v.is_zero() {
                out.push((row[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn rank_over_field<F: FieldScalar>(a: &SparseMat<F>) -> usize {
    Rref::of(a).rank()
}

/// Null space basis, one vector per free column.
pub fn kernel_basis<F: FieldScalar>(a: &SparseMat<F>) -> Vec<Vec<F>> {
    let rref = Rref::of(a);
    let n = a.cols();
    let mut free_index = vec![None; n];
    let mut basis = Vec::new();
    for c in 0..n {
        if !rref.rows.contains_key(&c) {
            let mut v = vec![F::zero(); n];
            v[c] = F::one();
            free_index[c] = Some(basis.len());
            basis.push(v);
        }
    }
    for (&p, row) in &rref.rows {
        for (c, val) in row {
            if let Some(k) = free_index[*c] {
                basis[k][p] = -val.clone();
            }
        }
    }
    basis
}

/// Column space basis made of the pivot columns of `a`.
pub fn image_basis<F: FieldScalar>(a: &SparseMat<F>) -> Vec<Vec<F>> {
    Rref::of(a).pivot_columns().into_iter().map(|c| a.column(c)).collect()
}
