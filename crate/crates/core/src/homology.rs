//! Bigraded integral homology of the cube complex.
//!
//! Each bigraded slice is handled independently:
//! `H^{i,j}` has free rank `dim C^{i,j} − rank d^{i,j} − rank d^{i−1,j}` and
//! torsion given by the non-unit invariant factors of `d^{i−1,j}`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cube::CubeComplex;
use crate::diagram::Word;
use crate::error::{Error, Result};
use crate::zalgebra::snf_sparse_promoting;

/// Default resource guard on the number of crossings.
pub const DEFAULT_MAX_CROSSINGS: usize = 16;

/// Finitely generated abelian group `ℤ^r ⊕ ℤ_{d₁} ⊕ … ⊕ ℤ_{d_k}` with
/// `d₁ | d₂ | … | d_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct AbGroup {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

impl AbGroup {
    pub fn free(rank: usize) -> Self {
        AbGroup { free_rank: rank, torsion: vec![] }
    }

    pub fn cyclic(order: u64) -> Self {
        AbGroup { free_rank: 0, torsion: vec![order] }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for AbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z_{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Homology groups by `(i, j)`, nontrivial entries only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigradedTable {
    pub groups: BTreeMap<(i64, i64), AbGroup>,
    pub normalized: bool,
    pub n_plus: usize,
    pub n_minus: usize,
    /// Number of smoothing letters in the source word.
    pub smoothings: usize,
    /// When set, only homological degrees `i ≤ max_i` were computed.
    pub max_i: Option<i64>,
}

impl BigradedTable {
    pub fn empty(n_plus: usize, n_minus: usize) -> Self {
        BigradedTable { groups: BTreeMap::new(), normalized: false, n_plus, n_minus, smoothings: 0, max_i: None }
    }

    pub fn get(&self, i: i64, j: i64) -> AbGroup {
        self.groups.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn free_rank(&self, i: i64, j: i64) -> usize {
        self.groups.get(&(i, j)).map_or(0, |g| g.free_rank)
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Common parity of the quantum degrees, `None` for an empty table.
    pub fn parity(&self) -> Option<i64> {
        self.groups.keys().next().map(|&(_, j)| j.rem_euclid(2))
    }

    /// `true` when every degree `i` is in the computed range.
    pub fn covers(&self, i: i64) -> bool {
        self.max_i.is_none_or(|m| i <= m)
    }

    /// Groups with homological degree `i`.
    pub fn row(&self, i: i64) -> impl Iterator<Item = (i64, &AbGroup)> {
        self.groups.range((i, i64::MIN)..=(i, i64::MAX)).map(|(&(_, j), g)| (j, g))
    }

    /// Copy restricted to `i ≤ max_i`.
    pub fn truncated(&self, max_i: i64) -> Self {
        let mut t = self.clone();
        t.groups.retain(|&(i, _), _| i <= max_i);
        t.max_i = Some(self.max_i.map_or(max_i, |m| m.min(max_i)));
        t
    }

    pub fn total_rank(&self) -> usize {
        self.groups.values().map(|g| g.free_rank).sum()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct HomologyOptions {
    pub max_crossings: usize,
    /// Compute only homological degrees `i ≤ max_i` (unnormalized).
    pub max_i: Option<usize>,
}

impl Default for HomologyOptions {
    fn default() -> Self {
        HomologyOptions { max_crossings: DEFAULT_MAX_CROSSINGS, max_i: None }
    }
}

struct SliceRank {
    rank: usize,
    torsion: Vec<BigInt>,
}

fn to_u64(d: &BigInt) -> Result<u64> {
    u64::try_from(d).map_err(|_| Error::TorsionOverflow(d.to_string()))
}

pub fn homology_unnormalized(w: &Word, opts: HomologyOptions) -> Result<BigradedTable> {
    let cube = CubeComplex::build(w, opts.max_crossings)?;
    let m = cube.crossing_count();
    let top = opts.max_i.map_or(m, |k| k.min(m));

    let mut slices = Vec::new();
    for i in 0..=top {
        if let Some((lo, hi)) = cube.q_range(i) {
            slices.extend((lo..=hi).map(|j| (i, j)));
        }
    }
    // d^{i,j} for i ≤ top; d^m is zero
    let ranks: BTreeMap<(usize, i64), SliceRank> = slices
        .par_iter()
        .filter(|&&(i, _)| i < m)
        .map(|&(i, j)| {
            let d = cube.differential_matrix_in::<i64>(i as i64, j);
            let r = snf_sparse_promoting(&d);
            let torsion = r.torsion();
            ((i, j), SliceRank { rank: r.rank, torsion })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();

    let mut table = BigradedTable::empty(w.n_plus(), w.n_minus());
    table.smoothings = w.smooth_count();
    table.max_i = opts.max_i.filter(|&k| k < m).map(|k| k as i64);
    for &(i, j) in &slices {
        let dim = cube.chain_rank(i as i64, j);
        if dim == 0 {
            continue;
        }
        let out_rank = ranks.get(&(i, j)).map_or(0, |r| r.rank);
        let (in_rank, torsion) = match i.checked_sub(1).and_then(|p| ranks.get(&(p, j))) {
            Some(r) => (r.rank, r.torsion.iter().map(to_u64).collect::<Result<Vec<_>>>()?),
            None => (0, vec![]),
        };
        let g = AbGroup { free_rank: dim - out_rank - in_rank, torsion };
        if !g.is_trivial() {
            table.groups.insert((i as i64, j), g);
        }
    }
    debug_assert!(
        table.groups.keys().all(|&(_, j)| Some(j.rem_euclid(2)) == table.parity()),
        "quantum degrees of mixed parity"
    );
    Ok(table)
}

/// Shifts an unnormalized table to the link invariant:
/// `𝓗^{i,j} = H^{i+n₋, j−n₊+2n₋}`.
pub fn normalize(t: &BigradedTable) -> Result<BigradedTable> {
    if t.normalized {
        return Err(Error::AlreadyNormalized);
    }
    if t.smoothings > 0 {
        return Err(Error::SmoothedDiagram);
    }
    let di = -(t.n_minus as i64);
    let dj = t.n_plus as i64 - 2 * t.n_minus as i64;
    let groups = t.groups.iter().map(|(&(i, j), g)| ((i + di, j + dj), g.clone())).collect();
    Ok(BigradedTable { groups, normalized: true, max_i: t.max_i.map(|m| m + di), ..t.clone() })
}

pub fn homology(w: &Word, opts: HomologyOptions) -> Result<BigradedTable> {
    if w.smooth_count() > 0 {
        return Err(Error::SmoothedDiagram);
    }
    normalize(&homology_unnormalized(w, opts)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{parse_word, torus_word, Letter};

    fn table(entries: &[(i64, i64, usize, &[u64])]) -> BTreeMap<(i64, i64), AbGroup> {
        entries.iter().map(|&(i, j, r, t)| ((i, j), AbGroup { free_rank: r, torsion: t.to_vec() })).collect()
    }

    #[test]
    fn unknot() {
        let h = homology(&Word::new(1, vec![]).unwrap(), HomologyOptions::default()).unwrap();
        assert_eq!(h.groups, table(&[(0, -1, 1, &[]), (0, 1, 1, &[])]));
    }

    #[test]
    fn trefoil() {
        let h = homology(&torus_word(2, 3), HomologyOptions::default()).unwrap();
        assert_eq!(h.groups, table(&[(0, 1, 1, &[]), (0, 3, 1, &[]), (2, 5, 1, &[]), (3, 7, 0, &[2]), (3, 9, 1, &[])]));
        assert_eq!(h.parity(), Some(1));
    }

    #[test]
    fn normalization_shift() {
        let u = homology_unnormalized(&torus_word(3, 4), HomologyOptions::default()).unwrap();
        let n = normalize(&u).unwrap();
        assert_eq!(u.free_rank(4, 3), 1);
        assert_eq!(n.free_rank(4, 11), 1);
        assert!(normalize(&n).is_err());

        let w = Word::new(3, vec![Letter::pos(1), Letter::smooth(2), Letter::pos(1)]).unwrap();
        let t = homology_unnormalized(&w, HomologyOptions::default()).unwrap();
        assert!(matches!(normalize(&t), Err(Error::SmoothedDiagram)));
    }

    #[test]
    fn truncation_agrees_with_full_table() {
        let w = torus_word(3, 4);
        let full = homology_unnormalized(&w, HomologyOptions::default()).unwrap();
        for k in 0..8 {
            let part = homology_unnormalized(&w, HomologyOptions { max_i: Some(k), ..Default::default() }).unwrap();
            assert_eq!(part.groups, full.truncated(k as i64).groups, "max_i = {k}");
            assert_eq!(part.max_i, Some(k as i64));
        }
    }

    #[test]
    fn resource_guard() {
        let w = torus_word(3, 9);
        let r = homology_unnormalized(&w, HomologyOptions { max_crossings: 16, max_i: None });
        assert!(matches!(r, Err(Error::CrossingLimit { crossings: 18, limit: 16 })));
        let wide = Word::from_signed(64, &[1]).unwrap();
        let r = homology_unnormalized(&wide, HomologyOptions::default());
        assert!(matches!(r, Err(Error::CircleLimit(65))));
    }

    #[test]
    fn markov_moves_preserve_homology() {
        let opts = HomologyOptions::default();
        let base = homology(&parse_word("1 1 1", None).unwrap(), opts).unwrap().groups;
        for (text, s) in [("1 1 1 2", 3), ("2 1 1 1", 3), ("1 1 2 1", 3), ("1 1 1 -2", 3)] {
            let h = homology(&parse_word(text, Some(s)).unwrap(), opts).unwrap();
            assert_eq!(h.groups, base, "{text}");
        }
    }

    #[test]
    fn positive_crossing_count_bounds_support() {
        // a diagram with n₋ negative crossings has no unnormalized homology below n₋
        let w = parse_word("1 1 1 -2", Some(3)).unwrap();
        let t = homology_unnormalized(&w, HomologyOptions::default()).unwrap();
        assert!(t.groups.keys().all(|&(i, _)| i >= 1));
    }
}
