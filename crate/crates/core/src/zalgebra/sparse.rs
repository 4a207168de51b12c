use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use num_traits::Zero;

/// Sparse matrix stored row-major; zero entries are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMat<T> {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), T>,
}

impl<T: Zero + Clone> SparseMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMat { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self
    where
        T: num_traits::One,
    {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries.insert((i, i), T::one());
        }
        m
    }

    /// Sums duplicate coordinates and drops the resulting zeros.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, T)>,
    {
        let mut m = Self::zeros(rows, cols);
        for (r, c, v) in triplets {
            m.add_at(r, c, v);
        }
        m
    }

    pub fn from_dense(rows: &[Vec<T>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(nrows, ncols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged dense matrix");
            for (c, v) in row.iter().enumerate() {
                m.set(r, c, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(T::zero)
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn add_at(&mut self, r: usize, c: usize, v: T) {
        let cur = self.get(r, c);
        self.set(r, c, cur + v);
    }

    /// Nonzero entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn map<U: Zero + Clone>(&self, f: impl Fn(&T) -> U) -> SparseMat<U> {
        let mut m = SparseMat::zeros(self.rows, self.cols);
        for (&(r, c), v) in &self.entries {
            m.set(r, c, f(v));
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for (&(r, c), v) in &self.entries {
            m.entries.insert((c, r), v.clone());
        }
        m
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.cols]; self.rows];
        for (&(r, c), v) in &self.entries {
            d[r][c] = v.clone();
        }
        d
    }

    /// Row-major sparse rows.
    pub fn row_vectors(&self) -> Vec<Vec<(usize, T)>> {
        let mut out = vec![Vec::new(); self.rows];
        for (&(r, c), v) in &self.entries {
            out[r].push((c, v.clone()));
        }
        out
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        let mut v = vec![T::zero(); self.rows];
        for (&(r, cc), x) in &self.entries {
            if cc == c {
                v[r] = x.clone();
            }
        }
        v
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hcat row mismatch");
        let mut m = self.clone();
        m.cols += other.cols;
        for (&(r, c), v) in &other.entries {
            m.entries.insert((r, c + self.cols), v.clone());
        }
        m
    }

    /// Matrix whose columns are the given dense vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (r, v) in col.iter().enumerate() {
                m.set(r, c, v.clone());
            }
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self
    where
        T: Mul<Output = T> + Add<Output = T>,
    {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let right = other.row_vectors();
        let mut m = Self::zeros(self.rows, other.cols);
        for (&(r, k), a) in &self.entries {
            for (c, b) in &right[k] {
                m.add_at(r, *c, a.clone() * b.clone());
            }
        }
        m
    }
}
