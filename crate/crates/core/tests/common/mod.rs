//! Brute-force reference computations that share no code with the engine.
//!
//! The closure is modelled as a graph whose nodes are the braid segments
//! between consecutive letters; a resolution joins segments, and circles are
//! the connected components. Signs use plain letter order rather than the
//! engine's crossing order, which gives an isomorphic complex.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

/// Mixed corpus: positive, negative and mixed words up to 12 crossings.
pub const CORPUS: &[(usize, &str)] = &[
    (1, ""),
    (2, "1"),
    (2, "-1"),
    (2, "1 -1"),
    (2, "1 1"),
    (2, "1 1 1"),
    (2, "-1 -1 -1"),
    (2, "1 1 1 1 1"),
    (3, "1 2"),
    (3, "1 -2"),
    (3, "1 -2 1 -2"),
    (3, "1 2 1 2"),
    (3, "1 1 2 -1 2"),
    (3, "1 2 1 2 1 2"),
    (3, "-1 -2 -1 -2 -1 -2 -1 -2"),
    (3, "1 1 1 -2 -2 -2"),
    (3, "1 2 1 2 1 2 1 2 1 2"),
    (4, "1 2 3"),
    (4, "1 -2 3 -2"),
    (4, "1 2 3 1 2 3 1 2 3"),
    (4, "1 -2 3 1 -2 3 1 -2 3 1 -2 3"),
    (4, "-1 2 2 -3 1 -2 3 3"),
    (5, "1 2 3 4 -1 -2"),
];

/// (i, j) → (free rank, torsion)
pub type Table = BTreeMap<(i64, i64), (usize, Vec<u64>)>;

pub struct Diagram {
    pub strands: usize,
    pub letters: Vec<i64>,
}

impl Diagram {
    pub fn new(strands: usize, letters: &[i64]) -> Self {
        Diagram { strands, letters: letters.to_vec() }
    }

    pub fn torus(p: usize, q: usize) -> Self {
        let letters = (0..q).flat_map(|_| 1..p as i64).collect();
        Diagram { strands: p, letters }
    }

    fn n_minus(&self) -> usize {
        self.letters.iter().filter(|&&g| g < 0).count()
    }

    fn n_plus(&self) -> usize {
        self.letters.len() - self.n_minus()
    }

    /// Circles of the resolution `eps` (bit k for letter k), each as the
    /// sorted list of segments it contains, ordered by smallest segment.
    pub fn circles(&self, eps: u32) -> Vec<Vec<usize>> {
        let s = self.strands;
        let mut current: Vec<usize> = (0..s).collect();
        let mut next_id = s;
        let mut links: Vec<(usize, usize)> = Vec::new();
        for (k, &g) in self.letters.iter().enumerate() {
            let a = g.unsigned_abs() as usize - 1;
            let (top_l, top_r) = (current[a], current[a + 1]);
            let (bot_l, bot_r) = (next_id, next_id + 1);
            next_id += 2;
            let bit = eps >> k & 1 == 1;
            // positive: 0 keeps strands vertical, negative: 1 does
            let vertical = (g > 0) != bit;
            if vertical {
                links.push((top_l, bot_l));
                links.push((top_r, bot_r));
            } else {
                links.push((top_l, top_r));
                links.push((bot_l, bot_r));
            }
            current[a] = bot_l;
            current[a + 1] = bot_r;
        }
        for (c, &seg) in current.iter().enumerate() {
            links.push((seg, c));
        }
        let mut parent: Vec<usize> = (0..next_id).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for (a, b) in links {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra.max(rb)] = ra.min(rb);
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..next_id {
            let r = find(&mut parent, x);
            groups.entry(r).or_default().push(x);
        }
        groups.into_values().collect()
    }
}

/// Generator: state and one label per circle (true = X).
type Gen = (u32, Vec<bool>);

fn label_sets(n: usize) -> Vec<Vec<bool>> {
    (0..1u32 << n).map(|m| (0..n).map(|b| m >> b & 1 == 1).collect()).collect()
}

fn q_degree(eps: u32, labels: &[bool]) -> i64 {
    let xs = labels.iter().filter(|&&x| x).count() as i64;
    labels.len() as i64 - 2 * xs + eps.count_ones() as i64
}

/// Image of a generator along the edge `eps → eps | 1<<k`.
fn edge_image(src: &[Vec<usize>], tgt: &[Vec<usize>], labels: &[bool]) -> Vec<(Vec<bool>, i64)> {
    // which source circles meet each target circle
    let owner =
        |circles: &[Vec<usize>], seg: usize| circles.iter().position(|c| c.binary_search(&seg).is_ok()).unwrap();
    let sources: Vec<Vec<usize>> = tgt
        .iter()
        .map(|c| {
            let mut v: Vec<usize> = c.iter().map(|&seg| owner(src, seg)).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    let mut out: Vec<(Vec<bool>, i64)> = vec![(vec![false; tgt.len()], 1)];
    let mut split_done = false;
    for (t, srcs) in sources.iter().enumerate() {
        if srcs.len() == 2 {
            // merge
            let (a, b) = (labels[srcs[0]], labels[srcs[1]]);
            if a && b {
                return vec![];
            }
            for o in out.iter_mut() {
                o.0[t] = a || b;
            }
            continue;
        }
        let s = srcs[0];
        let partners: Vec<usize> = (0..tgt.len()).filter(|&u| sources[u] == vec![s]).collect();
        if partners.len() == 1 {
            for o in out.iter_mut() {
                o.0[t] = labels[s];
            }
        } else if !split_done {
            split_done = true;
            let (u, v) = (partners[0], partners[1]);
            if labels[s] {
                for o in out.iter_mut() {
                    o.0[u] = true;
                    o.0[v] = true;
                }
            } else {
                let mut twin = out.clone();
                for o in out.iter_mut() {
                    o.0[u] = true;
                }
                for o in twin.iter_mut() {
                    o.0[v] = true;
                }
                out.extend(twin);
            }
        }
    }
    out
}

/// Full unnormalized chain complex, one dense matrix per (i, j).
pub struct Complex {
    pub m: usize,
    basis: BTreeMap<(i64, i64), Vec<Gen>>,
    pub d: BTreeMap<(i64, i64), Vec<Vec<i128>>>,
}

impl Complex {
    pub fn build(dg: &Diagram) -> Complex {
        let m = dg.letters.len();
        let circles: Vec<Vec<Vec<usize>>> = (0..1u32 << m).map(|e| dg.circles(e)).collect();
        let mut basis: BTreeMap<(i64, i64), Vec<Gen>> = BTreeMap::new();
        for eps in 0..1u32 << m {
            for labels in label_sets(circles[eps as usize].len()) {
                let key = (eps.count_ones() as i64, q_degree(eps, &labels));
                basis.entry(key).or_default().push((eps, labels));
            }
        }
        let index: HashMap<Gen, usize> =
            basis.values().flat_map(|v| v.iter().enumerate().map(|(k, g)| (g.clone(), k))).collect();
        let mut d = BTreeMap::new();
        for (&(i, j), gens) in &basis {
            let rows = basis.get(&(i + 1, j)).map_or(0, |v| v.len());
            let mut mat = vec![vec![0i128; gens.len()]; rows];
            for (col, (eps, labels)) in gens.iter().enumerate() {
                for k in 0..m {
                    if eps >> k & 1 == 1 {
                        continue;
                    }
                    let tgt = eps | 1 << k;
                    let sign = if (eps & ((1 << k) - 1)).count_ones() % 2 == 0 { 1 } else { -1 };
                    for (tl, c) in edge_image(&circles[*eps as usize], &circles[tgt as usize], labels) {
                        assert_eq!(q_degree(tgt, &tl), j, "oracle edge map broke the q-grading");
                        mat[index[&(tgt, tl)]][col] += sign * c as i128;
                    }
                }
            }
            d.insert((i, j), mat);
        }
        Complex { m, basis, d }
    }

    pub fn dim(&self, i: i64, j: i64) -> usize {
        self.basis.get(&(i, j)).map_or(0, |v| v.len())
    }

    pub fn homology(&self) -> Table {
        let mut diag: BTreeMap<(i64, i64), Vec<i128>> = BTreeMap::new();
        for (&k, mat) in &self.d {
            diag.insert(k, invariant_factors(mat.clone()));
        }
        let mut out = Table::new();
        for &(i, j) in self.basis.keys() {
            let out_rank = diag.get(&(i, j)).map_or(0, |v| v.len());
            let incoming = diag.get(&(i - 1, j)).cloned().unwrap_or_default();
            let rank = self.dim(i, j) - out_rank - incoming.len();
            let torsion: Vec<u64> = incoming.iter().filter(|&&x| x > 1).map(|&x| x as u64).collect();
            if rank > 0 || !torsion.is_empty() {
                out.insert((i, j), (rank, torsion));
            }
        }
        out
    }
}

/// Nonzero invariant factors of a dense integer matrix, ascending.
pub fn invariant_factors(mut a: Vec<Vec<i128>>) -> Vec<i128> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let mut best: Option<(i128, usize, usize)> = None;
        for (r, row) in a.iter().enumerate().skip(t) {
            for (c, &x) in row.iter().enumerate().skip(t) {
                if x != 0 && best.is_none_or(|b| x.abs() < b.0) {
                    best = Some((x.abs(), r, c));
                }
            }
        }
        let Some((_, r, c)) = best else { break };
        a.swap(t, r);
        for row in a.iter_mut() {
            row.swap(t, c);
        }
        let p = a[t][t];
        let mut reduced = true;
        for r in t + 1..rows {
            let f = a[r][t].div_euclid(p);
            if f != 0 {
                let pivot_row = a[t].clone();
                for (x, y) in a[r][t..].iter_mut().zip(&pivot_row[t..]) {
                    *x -= f * y;
                }
            }
            reduced &= a[r][t] == 0;
        }
        for c in t + 1..cols {
            let f = a[t][c].div_euclid(p);
            if f != 0 {
                for row in a.iter_mut() {
                    row[c] -= f * row[t];
                }
            }
            reduced &= a[t][c] == 0;
        }
        if !reduced {
            continue;
        }
        if let Some(r) = (t + 1..rows).find(|&r| (t + 1..cols).any(|c| a[r][c] % p != 0)) {
            let other = a[r].clone();
            for (x, y) in a[t][t..].iter_mut().zip(&other[t..]) {
                *x += y;
            }
            continue;
        }
        diag.push(p.abs());
        t += 1;
    }
    diag.sort_unstable();
    diag
}

/// Normalized homology.
pub fn homology(dg: &Diagram) -> Table {
    let (np, nm) = (dg.n_plus() as i64, dg.n_minus() as i64);
    Complex::build(dg).homology().into_iter().map(|((i, j), g)| ((i - nm, j + np - 2 * nm), g)).collect()
}

/// Laurent polynomial as exponent → coefficient.
pub type Laurent = BTreeMap<i64, i64>;

/// `(−1)^{n₋} q^{n₊−2n₋} Σ_ε (−q)^{|ε|} (q + q⁻¹)^{c(ε)}`.
pub fn jones(dg: &Diagram) -> Laurent {
    let m = dg.letters.len();
    let (np, nm) = (dg.n_plus() as i64, dg.n_minus() as i64);
    let mut out = Laurent::new();
    for eps in 0..1u32 << m {
        let c = dg.circles(eps).len() as i64;
        let w = eps.count_ones() as i64;
        let sign = if (w + nm) % 2 == 0 { 1 } else { -1 };
        // (q + 1/q)^c = Σ_k C(c,k) q^{c−2k}
        let mut binom = 1i64;
        for k in 0..=c {
            *out.entry(c - 2 * k + w + np - 2 * nm).or_default() += sign * binom;
            binom = binom * (c - k) / (k + 1);
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

/// Determinant by Bareiss elimination; exact for small integer matrices.
pub fn det(mut a: Vec<Vec<i128>>) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let (mut sign, mut prev) = (1, 1);
    for k in 0..n {
        if a[k][k] == 0 {
            let Some(r) = (k + 1..n).find(|&r| a[r][k] != 0) else { return 0 };
            a.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// gcd of all `k × k` minors.
pub fn minors_gcd(a: &[Vec<i64>], k: usize) -> i128 {
    let subsets = |n: usize| -> Vec<Vec<usize>> {
        (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|b| m >> b & 1 == 1).collect())
            .collect()
    };
    let mut g = 0;
    for rs in subsets(a.len()) {
        for cs in subsets(a[0].len()) {
            let sub = rs.iter().map(|&r| cs.iter().map(|&c| a[r][c] as i128).collect()).collect();
            g = gcd(g, det(sub));
        }
    }
    g
}
