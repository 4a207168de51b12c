//! The cube of resolutions and its bigraded chain complex.
//!
//! Vertices are states `ε ∈ {0,1}^m` stored as `u32` bit masks indexed by
//! flat crossing index. A generator of `M_ε = V^{⊗c(ε)}` is a bit mask over
//! the circles of `ε` (canonical order), bit set meaning the factor is `X`.
//! Its quantum degree is `#1 − #X + |ε|`.
//!
//! Vertex data is built lazily one homological degree at a time.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_traits::One;

use crate::diagram::{LetterKind, ResolvedState, Word};
use crate::error::{Error, Result};
use crate::zalgebra::{IntScalar, SparseMat};

/// Hard ceiling from the `u32` state encoding.
pub const MAX_CROSSINGS: usize = 31;
/// Hard ceiling from the `u64` generator encoding.
pub const MAX_CIRCLES: usize = 64;

#[derive(Debug, Clone)]
pub struct VertexData {
    pub eps: u32,
    pub weight: usize,
    pub state: ResolvedState,
}

impl VertexData {
    pub fn circle_count(&self) -> usize {
        self.state.circle_count()
    }

    /// Quantum degree of the generator `mask` in `C^{|ε|}`.
    pub fn q_degree(&self, mask: u64) -> i64 {
        let c = self.circle_count() as i64;
        c - 2 * mask.count_ones() as i64 + self.weight as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Merge,
    Split,
}

#[derive(Debug, Clone)]
pub struct EdgeData {
    pub source: u32,
    pub target: u32,
    pub bit: usize,
    pub kind: EdgeKind,
    /// Affected circles: two then one for a merge, one then two for a split.
    pub source_circles: Vec<usize>,
    pub target_circles: Vec<usize>,
    pub sign: i64,
    /// Target circle of every unaffected source circle.
    circle_map: Vec<Option<usize>>,
}

/// Image of a generator under one edge map, including the edge sign.
pub fn apply_edge(e: &EdgeData, mask: u64) -> Vec<(u64, i64)> {
    let mut base = 0u64;
    for (a, t) in e.circle_map.iter().enumerate() {
        if let Some(t) = t {
            if mask >> a & 1 == 1 {
                base |= 1 << t;
            }
        }
    }
    match e.kind {
        EdgeKind::Merge => {
            let (a, b) = (e.source_circles[0], e.source_circles[1]);
            let t = e.target_circles[0];
            let (xa, xb) = (mask >> a & 1 == 1, mask >> b & 1 == 1);
            match (xa, xb) {
                (true, true) => vec![],
                (false, false) => vec![(base, e.sign)],
                _ => vec![(base | 1 << t, e.sign)],
            }
        }
        EdgeKind::Split => {
            let a = e.source_circles[0];
            let (t1, t2) = (e.target_circles[0], e.target_circles[1]);
            if mask >> a & 1 == 1 {
                vec![(base | 1 << t1 | 1 << t2, e.sign)]
            } else {
                vec![(base | 1 << t2, e.sign), (base | 1 << t1, e.sign)]
            }
        }
    }
}

struct Layer {
    vertices: Vec<VertexData>,
    index_of: HashMap<u32, usize>,
}

pub struct CubeComplex {
    word: Word,
    m: usize,
    /// Letter index of every crossing, by flat index.
    crossing_letters: Vec<usize>,
    layers: Vec<OnceLock<Layer>>,
}

/// Basis of one bigraded piece `C^{i,j}`: per vertex of layer `i`, the
/// offset of its generators and how many of its factors are `X`.
pub struct SliceBasis {
    pub i: usize,
    pub j: i64,
    offsets: Vec<Option<(usize, u32)>>,
    pub dim: usize,
}

impl SliceBasis {
    /// Global index of generator `mask` at the `v`-th vertex of the layer.
    fn index(&self, v: usize, mask: u64) -> Option<usize> {
        let (off, x) = self.offsets[v]?;
        if mask.count_ones() != x {
            return None;
        }
        Some(off + colex_rank(mask))
    }
}

/// Rank of `mask` among masks of equal popcount in increasing order.
fn colex_rank(mask: u64) -> usize {
    let mut rank = 0usize;
    let mut k = 0;
    let mut m = mask;
    while m != 0 {
        let b = m.trailing_zeros() as usize;
        k += 1;
        rank += binom(b, k);
        m &= m - 1;
    }
    rank
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r as usize
}

/// Masks over `c` bits with `x` bits set, increasing.
fn masks_with_popcount(c: usize, x: usize) -> impl Iterator<Item = u64> {
    let start: Option<u64> = if x > c { None } else { Some((1u64 << x) - 1) };
    let limit: u64 = if c >= 64 { u64::MAX } else { 1u64 << c };
    let mut next = start;
    std::iter::from_fn(move || {
        let cur = next?;
        if x == 0 {
            next = None;
            return Some(cur);
        }
        if cur >= limit {
            next = None;
            return None;
        }
        // Gosper's hack
        let t = cur | (cur - 1);
        let n = (t + 1) | (((!t & (t + 1)) - 1) >> (cur.trailing_zeros() + 1));
        next = if n < limit && n > cur { Some(n) } else { None };
        Some(cur)
    })
}

/// States of weight `w` over `m` bits, increasing.
fn states_of_weight(m: usize, w: usize) -> Vec<u32> {
    masks_with_popcount(m, w).map(|x| x as u32).collect()
}

pub(crate) fn insert_bit(eps: u32, c: usize, bit: bool) -> u32 {
    let low = eps & ((1u32 << c) - 1);
    let high = eps >> c;
    low | (high << (c + 1)) | ((bit as u32) << c)
}

pub(crate) fn remove_bit(eps: u32, c: usize) -> u32 {
    let low = eps & ((1u32 << c) - 1);
    let high = eps >> (c + 1);
    low | (high << c)
}

impl CubeComplex {
    /// Cube of `w`, refusing words with more than `limit` crossings.
    pub fn build(w: &Word, limit: usize) -> Result<Self> {
        let m = w.crossing_count();
        if m > limit.min(MAX_CROSSINGS) {
            return Err(Error::CrossingLimit { crossings: m, limit: limit.min(MAX_CROSSINGS) });
        }
        // each flip moves the circle count by one, starting from at most one circle per strand
        if w.strands() + m > MAX_CIRCLES {
            return Err(Error::CircleLimit(w.strands() + m));
        }
        Ok(CubeComplex {
            word: w.clone(),
            m,
            crossing_letters: w.crossing_letters(),
            layers: (0..=m).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn crossing_count(&self) -> usize {
        self.m
    }

    pub fn n_plus(&self) -> usize {
        self.word.n_plus()
    }

    pub fn n_minus(&self) -> usize {
        self.word.n_minus()
    }

    pub fn state(&self, eps: u32) -> ResolvedState {
        let mut smooth: Vec<bool> = self.word.letters().iter().map(|l| l.kind == LetterKind::Smooth).collect();
        for (k, &letter) in self.crossing_letters.iter().enumerate() {
            let bit = eps >> k & 1 == 1;
            smooth[letter] = match self.word.letters()[letter].kind {
                LetterKind::PosCross => bit,
                _ => !bit,
            };
        }
        let (point_circle, keys) = self.word.trace(&smooth);
        let assignment = (0..self.m).map(|k| eps >> k & 1 == 1).collect();
        ResolvedState { assignment, point_circle, keys }
    }

    fn layer(&self, i: usize) -> &Layer {
        self.layers[i].get_or_init(|| {
            let vertices: Vec<VertexData> = states_of_weight(self.m, i)
                .into_iter()
                .map(|eps| VertexData { eps, weight: i, state: self.state(eps) })
                .collect();
            let index_of = vertices.iter().enumerate().map(|(k, v)| (v.eps, k)).collect();
            Layer { vertices, index_of }
        })
    }

    /// Vertices with `|ε| = i`, in increasing order of `ε`.
    pub fn vertices_at(&self, i: usize) -> &[VertexData] {
        if i > self.m {
            return &[];
        }
        &self.layer(i).vertices
    }

    pub fn vertex(&self, eps: u32) -> &VertexData {
        let i = eps.count_ones() as usize;
        let layer = self.layer(i);
        &layer.vertices[layer.index_of[&eps]]
    }

    fn edge_between(&self, src: &VertexData, tgt: &VertexData, bit: usize) -> EdgeData {
        let s = self.word.strands();
        let nb = self.word.boundary_count();
        let letter = self.crossing_letters[bit];
        let pos = self.word.letters()[letter].position;
        let top = letter * s;
        let bot = ((letter + 1) % nb) * s;
        let pts = [top + pos - 1, top + pos, bot + pos - 1, bot + pos];
        let collect = |st: &ResolvedState| {
            let mut v: Vec<usize> = pts.iter().map(|&p| st.point_circle[p] as usize).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let source_circles = collect(&src.state);
        let target_circles = collect(&tgt.state);
        let kind = match (source_circles.len(), target_circles.len()) {
            (2, 1) => EdgeKind::Merge,
            (1, 2) => EdgeKind::Split,
            other => panic!("edge at bit {bit} is neither merge nor split: {other:?}"),
        };
        let circle_map =
            src.state
                .keys
                .iter()
                .enumerate()
                .map(|(a, &(b, col))| {
                    if source_circles.contains(&a) {
                        None
                    } else {
                        Some(tgt.state.point_circle[b * s + col] as usize)
                    }
                })
                .collect();
        let before = src.eps & ((1u32 << bit) - 1);
        let sign = if before.count_ones().is_multiple_of(2) { 1 } else { -1 };
        EdgeData { source: src.eps, target: tgt.eps, bit, kind, source_circles, target_circles, sign, circle_map }
    }

    /// Outgoing edges of vertex `eps`, by increasing bit.
    pub fn edges_from(&self, eps: u32) -> Vec<EdgeData> {
        let src = self.vertex(eps);
        (0..self.m)
            .filter(|&k| eps >> k & 1 == 0)
            .map(|k| self.edge_between(src, self.vertex(eps | 1 << k), k))
            .collect()
    }

    pub fn slice_basis(&self, i: usize, j: i64) -> SliceBasis {
        let mut offsets = Vec::new();
        let mut dim = 0usize;
        for v in self.vertices_at(i) {
            let c = v.circle_count() as i64;
            let twice_x = c + i as i64 - j;
            if twice_x < 0 || twice_x % 2 != 0 || twice_x / 2 > c {
                offsets.push(None);
                continue;
            }
            let x = (twice_x / 2) as usize;
            offsets.push(Some((dim, x as u32)));
            dim += binom(c as usize, x);
        }
        SliceBasis { i, j, offsets, dim }
    }

    /// Generators of `C^{i,j}` as `(ε, mask)` in basis order.
    pub fn slice_generators(&self, i: usize, j: i64) -> Vec<(u32, u64)> {
        let basis = self.slice_basis(i, j);
        let mut out = Vec::with_capacity(basis.dim);
        for (v, vd) in self.vertices_at(i).iter().enumerate() {
            if let Some((_, x)) = basis.offsets[v] {
                out.extend(masks_with_popcount(vd.circle_count(), x as usize).map(|m| (vd.eps, m)));
            }
        }
        out
    }

    pub fn chain_rank(&self, i: i64, j: i64) -> usize {
        if i < 0 || i as usize > self.m {
            return 0;
        }
        self.slice_basis(i as usize, j).dim
    }

    /// Range of quantum degrees with nonzero chain groups at homological
    /// degree `i`, as `(min, max)`.
    pub fn q_range(&self, i: usize) -> Option<(i64, i64)> {
        let vs = self.vertices_at(i);
        let cmax = vs.iter().map(|v| v.circle_count()).max()? as i64;
        Some((i as i64 - cmax, i as i64 + cmax))
    }

    /// Nonzero entries of `d^{i,j}` as (row, col, value) triplets.
    pub fn differential_triplets(&self, i: usize, j: i64) -> (usize, usize, Vec<(usize, usize, i64)>) {
        let src = self.slice_basis(i, j);
        if i >= self.m {
            return (0, src.dim, vec![]);
        }
        let tgt = self.slice_basis(i + 1, j);
        let tgt_layer = self.layer(i + 1);
        let mut trips = Vec::new();
        for (v, vd) in self.vertices_at(i).iter().enumerate() {
            let Some((off, x)) = src.offsets[v] else { continue };
            let edges = self.edges_from(vd.eps);
            for (col_local, mask) in masks_with_popcount(vd.circle_count(), x as usize).enumerate() {
                let col = off + col_local;
                for e in &edges {
                    let tv = tgt_layer.index_of[&e.target];
                    for (tmask, coeff) in apply_edge(e, mask) {
                        let row = tgt.index(tv, tmask).expect("edge map must preserve quantum degree");
                        trips.push((row, col, coeff));
                    }
                }
            }
        }
        (tgt.dim, src.dim, trips)
    }

    /// `d^{i,j} : C^{i,j} → C^{i+1,j}` over any integer scalar.
    pub fn differential_matrix_in<T: IntScalar + From<i64>>(&self, i: i64, j: i64) -> SparseMat<T> {
        if i < 0 {
            return SparseMat::zeros(self.chain_rank(i + 1, j), 0);
        }
        let (rows, cols, trips) = self.differential_triplets(i as usize, j);
        SparseMat::from_triplets(rows, cols, trips.into_iter().map(|(r, c, v)| (r, c, T::from(v))))
    }

    pub fn differential_matrix(&self, i: i64, j: i64) -> SparseMat<num_bigint::BigInt> {
        self.differential_matrix_in(i, j)
    }

    /// Splits the complex along crossing `flat_index` into the subcomplex of
    /// states with that bit set and the quotient of states with it clear.
    pub fn mapping_cone_split(&self, flat_index: usize) -> Result<ConeSplit<'_>> {
        if flat_index >= self.m {
            return Err(Error::CrossingIndex { index: flat_index, count: self.m });
        }
        let one = self.word.resolve_crossing(flat_index, true)?;
        let zero = self.word.resolve_crossing(flat_index, false)?;
        let letter = self.crossing_letters[flat_index];
        let sub = CubeComplex::build(&one, MAX_CROSSINGS)?;
        let quotient = CubeComplex::build(&zero, MAX_CROSSINGS)?;
        let sub_deleted = one.letters().len() < self.word.letters().len();
        Ok(ConeSplit { whole: self, sub, quotient, flat_index, letter, sub_deleted })
    }
}

/// `C(D)` as an extension of `C(D₀)` by `C(D₁)[1]{1}`.
pub struct ConeSplit<'a> {
    pub whole: &'a CubeComplex,
    /// Cube of the 1-resolution `D₁`.
    pub sub: CubeComplex,
    /// Cube of the 0-resolution `D₀`.
    pub quotient: CubeComplex,
    pub flat_index: usize,
    letter: usize,
    sub_deleted: bool,
}

impl ConeSplit<'_> {
    /// Maps a point of the whole diagram to the resolved one. The resolved
    /// letter is either kept as a smoothing (same layout) or deleted, in
    /// which case the boundary below it merges into the one above.
    fn point_map(&self, deleted: bool, p: usize) -> usize {
        if !deleted {
            return p;
        }
        let s = self.whole.word.strands();
        let (b, col) = (p / s, p % s);
        let nb_new = self.whole.word.letters().len().saturating_sub(1).max(1);
        let b = if b <= self.letter { b } else { b - 1 };
        (b % nb_new) * s + col
    }

    /// Circle correspondence whole → part for the same resolution.
    fn circle_map(&self, whole: &VertexData, part: &VertexData, deleted: bool) -> Vec<usize> {
        let s = self.whole.word.strands();
        whole
            .state
            .keys
            .iter()
            .map(|&(b, col)| part.state.point_circle[self.point_map(deleted, b * s + col)] as usize)
            .collect()
    }

    fn remap(mask: u64, map: &[usize]) -> u64 {
        map.iter().enumerate().filter(|(a, _)| mask >> a & 1 == 1).fold(0u64, |acc, (_, &t)| acc | 1 << t)
    }

    fn inverse(map: &[usize]) -> Vec<usize> {
        let mut inv = vec![0; map.len()];
        for (a, &t) in map.iter().enumerate() {
            inv[t] = a;
        }
        inv
    }

    /// Sign of the sub-complex identification at sub state `eps`.
    fn sub_sign(&self, eps: u32) -> i64 {
        if (eps >> self.flat_index).count_ones().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    fn index_in(cube: &CubeComplex, basis: &SliceBasis, eps: u32, mask: u64) -> usize {
        let layer = cube.layer(basis.i);
        basis.index(layer.index_of[&eps], mask).expect("generator in slice")
    }

    /// Inclusion `C^{i-1,j-1}(D₁) → C^{i,j}(D)`.
    pub fn inclusion(&self, i: i64, j: i64) -> SparseMat<num_bigint::BigInt> {
        let rows = self.whole.chain_rank(i, j);
        let cols = self.sub.chain_rank(i - 1, j - 1);
        let mut m = SparseMat::zeros(rows, cols);
        if rows == 0 || cols == 0 {
            return m;
        }
        let wb = self.whole.slice_basis(i as usize, j);
        for (col, (eps1, mask1)) in self.sub.slice_generators((i - 1) as usize, j - 1).into_iter().enumerate() {
            let eps = insert_bit(eps1, self.flat_index, true);
            let wv = self.whole.vertex(eps);
            let map = self.circle_map(wv, self.sub.vertex(eps1), self.sub_deleted);
            let mask = Self::remap(mask1, &Self::inverse(&map));
            let row = Self::index_in(self.whole, &wb, eps, mask);
            m.set(row, col, self.sub_sign(eps1).into());
        }
        m
    }

    /// Projection `C^{i,j}(D) → C^{i,j}(D₀)`.
    pub fn projection(&self, i: i64, j: i64) -> SparseMat<num_bigint::BigInt> {
        let rows = self.quotient.chain_rank(i, j);
        let cols = self.whole.chain_rank(i, j);
        let mut m = SparseMat::zeros(rows, cols);
        if rows == 0 || cols == 0 {
            return m;
        }
        let qb = self.quotient.slice_basis(i as usize, j);
        for (col, (eps, mask)) in self.whole.slice_generators(i as usize, j).into_iter().enumerate() {
            if eps >> self.flat_index & 1 == 1 {
                continue;
            }
            let eps0 = remove_bit(eps, self.flat_index);
            let map = self.circle_map(self.whole.vertex(eps), self.quotient.vertex(eps0), !self.sub_deleted);
            let row = Self::index_in(&self.quotient, &qb, eps0, Self::remap(mask, &map));
            m.set(row, col, One::one());
        }
        m
    }

    /// Connecting map `C^{i,j}(D₀) → C^{i,j-1}(D₁)`: lift, apply `d`, and
    /// read off the sub-complex component.
    pub fn connecting(&self, i: i64, j: i64) -> SparseMat<num_bigint::BigInt> {
        let rows = self.sub.chain_rank(i, j - 1);
        let cols = self.quotient.chain_rank(i, j);
        let mut m = SparseMat::zeros(rows, cols);
        if rows == 0 || cols == 0 {
            return m;
        }
        let sb = self.sub.slice_basis(i as usize, j - 1);
        for (col, (eps0, mask0)) in self.quotient.slice_generators(i as usize, j).into_iter().enumerate() {
            let eps = insert_bit(eps0, self.flat_index, false);
            let wv = self.whole.vertex(eps);
            let map0 = self.circle_map(wv, self.quotient.vertex(eps0), !self.sub_deleted);
            let mask = Self::remap(mask0, &Self::inverse(&map0));
            let target = eps | 1 << self.flat_index;
            let edge = self.whole.edge_between(wv, self.whole.vertex(target), self.flat_index);
            let eps1 = remove_bit(target, self.flat_index);
            let map1 = self.circle_map(self.whole.vertex(target), self.sub.vertex(eps1), self.sub_deleted);
            let sign = self.sub_sign(eps1);
            for (tmask, coeff) in apply_edge(&edge, mask) {
                let row = Self::index_in(&self.sub, &sb, eps1, Self::remap(tmask, &map1));
                m.add_at(row, col, (coeff * sign).into());
            }
        }
        m
    }
}

/// `true` when a matrix product vanishes; used by the d² checks.
pub fn composes_to_zero<T: IntScalar>(after: &SparseMat<T>, before: &SparseMat<T>) -> bool {
    if after.cols() != before.rows() {
        return after.cols() == 0 || before.rows() == 0;
    }
    after.mul(before).iter().all(|(_, _, v)| v.is_zero())
}
