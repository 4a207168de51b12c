//! Polynomial invariants and diagonal structure of homology tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::diagram::Word;
use crate::error::{Error, Result};
use crate::homology::BigradedTable;

/// Laurent polynomial in `q`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly1<T> {
    terms: BTreeMap<i64, T>,
}

/// Laurent polynomial in `(t, q)`, keyed by `(t-exponent, q-exponent)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly2<T> {
    terms: BTreeMap<(i64, i64), T>,
}

fn accumulate<K: Ord, T: Zero + Clone>(terms: &mut BTreeMap<K, T>, k: K, c: T) {
    let v = terms.remove(&k).unwrap_or_else(T::zero) + c;
    if !v.is_zero() {
        terms.insert(k, v);
    }
}

impl<T: Zero + One + Clone> LaurentPoly1<T> {
    pub fn zero() -> Self {
        LaurentPoly1 { terms: BTreeMap::new() }
    }

    pub fn monomial(exp: i64, coeff: T) -> Self {
        let mut p = Self::zero();
        accumulate(&mut p.terms, exp, coeff);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, T)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            accumulate(&mut p.terms, e, c);
        }
        p
    }

    pub fn coeff(&self, exp: i64) -> T {
        self.terms.get(&exp).cloned().unwrap_or_else(T::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &T)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly1 { terms: self.terms.iter().map(|(&e, c)| (e + k, c.clone())).collect() }
    }

    /// `q ↦ q⁻¹`.
    pub fn invert(&self) -> Self {
        LaurentPoly1 { terms: self.terms.iter().map(|(&e, c)| (-e, c.clone())).collect() }
    }

    pub fn pow(&self, n: u32) -> Self
    where
        T: Mul<Output = T>,
    {
        (0..n).fold(Self::monomial(0, T::one()), |acc, _| &acc * self)
    }
}

impl<T: Zero + One + Clone> Add for &LaurentPoly1<T> {
    type Output = LaurentPoly1<T>;
    fn add(self, rhs: Self) -> LaurentPoly1<T> {
        let mut p = self.clone();
        for (&e, c) in &rhs.terms {
            accumulate(&mut p.terms, e, c.clone());
        }
        p
    }
}

impl<T: Zero + One + Clone + Neg<Output = T>> Sub for &LaurentPoly1<T> {
    type Output = LaurentPoly1<T>;
    fn sub(self, rhs: Self) -> LaurentPoly1<T> {
        let mut p = self.clone();
        for (&e, c) in &rhs.terms {
            accumulate(&mut p.terms, e, -c.clone());
        }
        p
    }
}

impl<T: Zero + One + Clone + Mul<Output = T>> Mul for &LaurentPoly1<T> {
    type Output = LaurentPoly1<T>;
    fn mul(self, rhs: Self) -> LaurentPoly1<T> {
        let mut p = LaurentPoly1::zero();
        for (&a, x) in &self.terms {
            for (&b, y) in &rhs.terms {
                accumulate(&mut p.terms, a + b, x.clone() * y.clone());
            }
        }
        p
    }
}

impl<T: Zero + One + Clone> LaurentPoly2<T> {
    pub fn zero() -> Self {
        LaurentPoly2 { terms: BTreeMap::new() }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((i64, i64), T)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            accumulate(&mut p.terms, e, c);
        }
        p
    }

    pub fn coeff(&self, t: i64, q: i64) -> T {
        self.terms.get(&(t, q)).cloned().unwrap_or_else(T::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), &T)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Multiplies by `q^k`.
    pub fn shift_q(&self, k: i64) -> Self {
        LaurentPoly2 { terms: self.terms.iter().map(|(&(a, b), c)| ((a, b + k), c.clone())).collect() }
    }

    /// Terms with `t`-exponent strictly below `bound`.
    pub fn truncate_t(&self, bound: i64) -> Self {
        LaurentPoly2 {
            terms: self.terms.iter().filter(|(&(a, _), _)| a < bound).map(|(&k, c)| (k, c.clone())).collect(),
        }
    }

    /// Coefficient of `t^k` as a polynomial in `q`.
    pub fn t_coeff(&self, k: i64) -> LaurentPoly1<T> {
        LaurentPoly1::from_terms(self.terms.range((k, i64::MIN)..=(k, i64::MAX)).map(|(&(_, b), c)| (b, c.clone())))
    }

    /// Substitutes `t = −1`.
    pub fn at_t_minus_one(&self) -> LaurentPoly1<T>
    where
        T: Neg<Output = T>,
    {
        LaurentPoly1::from_terms(
            self.terms.iter().map(|(&(a, b), c)| (b, if a.rem_euclid(2) == 0 { c.clone() } else { -c.clone() })),
        )
    }
}

fn fmt_term<T: Signed + fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    first: bool,
    coeff: &T,
    vars: &[(&str, i64)],
) -> fmt::Result {
    let negative = coeff.is_negative();
    match (first, negative) {
        (true, true) => write!(f, "-")?,
        (true, false) => {}
        (false, true) => write!(f, " - ")?,
        (false, false) => write!(f, " + ")?,
    }
    let mag = coeff.abs();
    let monos: Vec<String> = vars
        .iter()
        .filter(|(_, e)| *e != 0)
        .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
        .collect();
    if monos.is_empty() {
        write!(f, "{mag}")
    } else if mag.is_one() {
        write!(f, "{}", monos.join("*"))
    } else {
        write!(f, "{mag}*{}", monos.join("*"))
    }
}

impl<T: Signed + Clone + fmt::Display> fmt::Display for LaurentPoly1<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (&e, c)) in self.terms.iter().enumerate() {
            fmt_term(f, k == 0, c, &[("q", e)])?;
        }
        Ok(())
    }
}

impl<T: Signed + Clone + fmt::Display> fmt::Display for LaurentPoly2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (&(a, b), c)) in self.terms.iter().enumerate() {
            fmt_term(f, k == 0, c, &[("t", a), ("q", b)])?;
        }
        Ok(())
    }
}

pub type Poly1 = LaurentPoly1<i64>;
pub type Poly2 = LaurentPoly2<i64>;

/// `Σ tⁱ qʲ rank H^{i,j}`; torsion is ignored.
pub fn poincare(t: &BigradedTable) -> Poly2 {
    Poly2::from_terms(t.groups.iter().map(|(&k, g)| (k, g.free_rank as i64)))
}

/// `Σ (−1)ⁱ qʲ rank H^{i,j}`.
pub fn graded_euler(t: &BigradedTable) -> Poly1 {
    poincare(t).at_t_minus_one()
}

/// Kauffman bracket `Σ_ε (−q)^{|ε|} (q + q⁻¹)^{c(ε)}` by direct state
/// enumeration over the diagram, without touching the cube machinery.
pub fn kauffman_bracket(w: &Word, max_crossings: usize) -> Result<Poly1> {
    let m = w.crossing_count();
    if m > max_crossings.min(crate::cube::MAX_CROSSINGS) {
        return Err(Error::CrossingLimit { crossings: m, limit: max_crossings });
    }
    let circle = Poly1::from_terms([(1, 1), (-1, 1)]);
    let max_c = w.strands() * w.letters().len().max(1);
    let circle_pows: Vec<Poly1> = (0..=max_c as u32).map(|k| circle.pow(k)).collect();
    let mut total = Poly1::zero();
    for eps in 0u64..(1u64 << m) {
        let bits: Vec<bool> = (0..m).map(|k| eps >> k & 1 == 1).collect();
        let c = w.circles(&bits)?.circle_count();
        let weight = eps.count_ones() as i64;
        let sign = if weight % 2 == 0 { 1 } else { -1 };
        total = &total + &circle_pows[c].shift(weight).scale(sign);
    }
    Ok(total)
}

impl Poly1 {
    pub fn scale(&self, k: i64) -> Poly1 {
        Poly1::from_terms(self.terms.iter().map(|(&e, &c)| (e, c * k)))
    }
}

/// Unnormalized bracket shifted to the Jones normalization,
/// `(−1)^{n₋} q^{n₊−2n₋} ⟨w⟩`.
pub fn jones_from_bracket(w: &Word, max_crossings: usize) -> Result<Poly1> {
    let (np, nm) = (w.n_plus() as i64, w.n_minus() as i64);
    let b = kauffman_bracket(w, max_crossings)?;
    Ok(b.shift(np - 2 * nm).scale(if nm % 2 == 0 { 1 } else { -1 }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalProfile {
    /// Values of `δ = j − 2i` carrying positive free rank.
    pub diagonals: BTreeSet<i64>,
    pub a_min: i64,
    pub a_max: i64,
    pub width: i64,
}

pub fn diagonal_profile(t: &BigradedTable) -> Result<DiagonalProfile> {
    let diagonals: BTreeSet<i64> =
        t.groups.iter().filter(|(_, g)| g.free_rank > 0).map(|(&(i, j), _)| j - 2 * i).collect();
    let (Some(&a_min), Some(&a_max)) = (diagonals.first(), diagonals.last()) else {
        return Err(Error::EmptyTable);
    };
    Ok(DiagonalProfile { diagonals, a_min, a_max, width: (a_max - a_min) / 2 + 1 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Thickness {
    Thin,
    Thick,
}

pub fn thickness_class(t: &BigradedTable) -> Result<Thickness> {
    let p = diagonal_profile(t)?;
    Ok(if p.width <= 2 { Thickness::Thin } else { Thickness::Thick })
}
