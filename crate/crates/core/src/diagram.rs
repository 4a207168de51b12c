//! Braid-like words and their closures.
//!
//! A [`Word`] is a sequence of letters on `s` strands read top to bottom:
//! positive crossings `σ_k`, negative crossings `σ_k⁻¹` and cap-cup
//! smoothings `e_k`. The diagram is always the trace closure that joins top
//! point `k` to bottom point `k`.
//!
//! Points of the closed diagram live on the horizontal boundaries between
//! letters. Boundary `r` sits directly above letter `r`, and boundary `L`
//! (below the last letter) is identified with boundary `0`. Resolved states
//! keep this layout fixed, so a circle is identified by the smallest
//! `(boundary, column)` point it passes through.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LetterKind {
    PosCross,
    NegCross,
    Smooth,
}

/// One letter of a word. `position` is the 1-based strand gap `k`, acting on
/// columns `k-1` and `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub kind: LetterKind,
    pub position: usize,
}

impl Letter {
    pub fn pos(position: usize) -> Self {
        Letter { kind: LetterKind::PosCross, position }
    }

    pub fn neg(position: usize) -> Self {
        Letter { kind: LetterKind::NegCross, position }
    }

    pub fn smooth(position: usize) -> Self {
        Letter { kind: LetterKind::Smooth, position }
    }

    pub fn is_crossing(&self) -> bool {
        !matches!(self.kind, LetterKind::Smooth)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    strands: usize,
    letters: Vec<Letter>,
}

/// Position of a crossing in the type-major order: crossings of type `i`
/// come before those of type `i + 1`, and within a type they are numbered
/// top to bottom starting at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CrossingLabel {
    pub crossing_type: usize,
    pub ordinal: usize,
    pub flat_index: usize,
    /// Index of the letter in the word.
    pub letter: usize,
}

/// The circles of a total resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedState {
    pub assignment: Vec<bool>,
    /// Circle label of every point, indexed `boundary * strands + column`.
    pub point_circle: Vec<u16>,
    /// Smallest point of every circle, ascending.
    pub keys: Vec<(usize, usize)>,
}

impl ResolvedState {
    pub fn circle_count(&self) -> usize {
        self.keys.len()
    }

    pub fn weight(&self) -> usize {
        self.assignment.iter().filter(|&&b| b).count()
    }
}

impl Word {
    pub fn new(strands: usize, letters: Vec<Letter>) -> Result<Self> {
        if strands == 0 {
            return Err(Error::InvalidWord("strand count must be positive".into()));
        }
        for l in &letters {
            if l.position == 0 || l.position >= strands {
                return Err(Error::InvalidWord(format!(
                    "letter position {} out of range for {} strands",
                    l.position, strands
                )));
            }
        }
        Ok(Word { strands, letters })
    }

    /// Builds a crossing-only word from signed generator indices.
    pub fn from_signed(strands: usize, gens: &[i64]) -> Result<Self> {
        let mut letters = Vec::with_capacity(gens.len());
        for &g in gens {
            if g == 0 {
                return Err(Error::InvalidWord("generator 0 is not allowed".into()));
            }
            let k = g.unsigned_abs() as usize;
            letters.push(if g > 0 { Letter::pos(k) } else { Letter::neg(k) });
        }
        Word::new(strands, letters)
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn crossing_count(&self) -> usize {
        self.letters.iter().filter(|l| l.is_crossing()).count()
    }

    pub fn n_plus(&self) -> usize {
        self.count(LetterKind::PosCross)
    }

    pub fn n_minus(&self) -> usize {
        self.count(LetterKind::NegCross)
    }

    pub fn smooth_count(&self) -> usize {
        self.count(LetterKind::Smooth)
    }

    fn count(&self, kind: LetterKind) -> usize {
        self.letters.iter().filter(|l| l.kind == kind).count()
    }

    /// Signed generator list, `None` if the word contains smoothings.
    pub fn signed(&self) -> Option<Vec<i64>> {
        self.letters
            .iter()
            .map(|l| match l.kind {
                LetterKind::PosCross => Some(l.position as i64),
                LetterKind::NegCross => Some(-(l.position as i64)),
                LetterKind::Smooth => None,
            })
            .collect()
    }

    /// Number of boundaries carrying points (at least one, so that the
    /// closure of the empty word still has its `s` strands).
    pub(crate) fn boundary_count(&self) -> usize {
        self.letters.len().max(1)
    }

    /// Letter indices of the crossings, in flat (type-major) order.
    pub fn crossing_letters(&self) -> Vec<usize> {
        self.label_crossings().iter().map(|l| l.letter).collect()
    }

    pub fn label_crossings(&self) -> Vec<CrossingLabel> {
        let mut ordinals = vec![0usize; self.strands];
        let mut labels: Vec<CrossingLabel> = Vec::with_capacity(self.crossing_count());
        for (idx, l) in self.letters.iter().enumerate() {
            if !l.is_crossing() {
                continue;
            }
            ordinals[l.position] += 1;
            labels.push(CrossingLabel {
                crossing_type: l.position,
                ordinal: ordinals[l.position],
                flat_index: 0,
                letter: idx,
            });
        }
        labels.sort_by_key(|l| (l.crossing_type, l.ordinal));
        for (flat, l) in labels.iter_mut().enumerate() {
            l.flat_index = flat;
        }
        labels
    }

    /// Flat index of the crossing labelled `(crossing_type, ordinal)`.
    pub fn flat_index_of(&self, crossing_type: usize, ordinal: usize) -> Result<usize> {
        self.label_crossings()
            .iter()
            .find(|l| l.crossing_type == crossing_type && l.ordinal == ordinal)
            .map(|l| l.flat_index)
            .ok_or(Error::NoSuchCrossing { crossing_type, ordinal })
    }

    /// Resolves one crossing. Positive: `0` drops the letter, `1` turns it
    /// into a smoothing. Negative crossings use the mirrored rule.
    pub fn resolve_crossing(&self, flat_index: usize, bit: bool) -> Result<Word> {
        let letter_idx = self.crossing_letter(flat_index)?;
        let l = self.letters[letter_idx];
        let to_smooth = match l.kind {
            LetterKind::PosCross => bit,
            LetterKind::NegCross => !bit,
            LetterKind::Smooth => unreachable!(),
        };
        let mut letters = self.letters.clone();
        if to_smooth {
            letters[letter_idx] = Letter::smooth(l.position);
        } else {
            letters.remove(letter_idx);
        }
        Ok(Word { strands: self.strands, letters })
    }

    pub(crate) fn crossing_letter(&self, flat_index: usize) -> Result<usize> {
        let m = self.crossing_count();
        self.crossing_letters().get(flat_index).copied().ok_or(Error::CrossingIndex { index: flat_index, count: m })
    }

    pub fn mirror(&self) -> Word {
        let letters = self
            .letters
            .iter()
            .map(|l| Letter {
                kind: match l.kind {
                    LetterKind::PosCross => LetterKind::NegCross,
                    LetterKind::NegCross => LetterKind::PosCross,
                    LetterKind::Smooth => LetterKind::Smooth,
                },
                position: l.position,
            })
            .collect();
        Word { strands: self.strands, letters }
    }

    /// Traces the circles of the total resolution `assignment`, indexed by
    /// flat crossing index.
    pub fn circles(&self, assignment: &[bool]) -> Result<ResolvedState> {
        let labels = self.label_crossings();
        if assignment.len() != labels.len() {
            return Err(Error::AssignmentLength { expected: labels.len(), got: assignment.len() });
        }
        let mut smooth = vec![false; self.letters.len()];
        for (idx, l) in self.letters.iter().enumerate() {
            smooth[idx] = l.kind == LetterKind::Smooth;
        }
        for lab in &labels {
            let bit = assignment[lab.flat_index];
            smooth[lab.letter] = match self.letters[lab.letter].kind {
                LetterKind::PosCross => bit,
                _ => !bit,
            };
        }
        let (point_circle, keys) = self.trace(&smooth);
        Ok(ResolvedState { assignment: assignment.to_vec(), point_circle, keys })
    }

    /// Union-find trace of the closure where letter `r` is a smoothing iff
    /// `smooth[r]`, and a pair of vertical strands otherwise.
    pub(crate) fn trace(&self, smooth: &[bool]) -> (Vec<u16>, Vec<(usize, usize)>) {
        let s = self.strands;
        let nb = self.boundary_count();
        let mut uf = UnionFind::new(nb * s);
        for (r, l) in self.letters.iter().enumerate() {
            let top = r * s;
            let bot = ((r + 1) % nb) * s;
            if smooth[r] {
                let k = l.position;
                for col in 0..s {
                    if col != k - 1 && col != k {
                        uf.union(top + col, bot + col);
                    }
                }
                uf.union(top + k - 1, top + k);
                uf.union(bot + k - 1, bot + k);
            } else {
                for col in 0..s {
                    uf.union(top + col, bot + col);
                }
            }
        }
        // Scanning points in row-major order labels circles by their
        // smallest point, which is already ascending.
        let mut label_of_root = vec![u16::MAX; nb * s];
        let mut keys = Vec::new();
        let point_circle = (0..nb * s)
            .map(|p| {
                let root = uf.find(p);
                if label_of_root[root] == u16::MAX {
                    label_of_root[root] = keys.len() as u16;
                    keys.push((p / s, p % s));
                }
                label_of_root[root]
            })
            .collect();
        (point_circle, keys)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} strands]", self.strands)?;
        for l in &self.letters {
            match l.kind {
                LetterKind::PosCross => write!(f, " {}", l.position)?,
                LetterKind::NegCross => write!(f, " -{}", l.position)?,
                LetterKind::Smooth => write!(f, " e{}", l.position)?,
            }
        }
        Ok(())
    }
}

/// Parses whitespace-separated nonzero integers into a crossing word.
pub fn parse_word(text: &str, strands: Option<usize>) -> Result<Word> {
    let mut gens = Vec::new();
    for tok in text.split_whitespace() {
        let g: i64 = tok.parse().map_err(|_| Error::InvalidWord(format!("not an integer: {tok:?}")))?;
        if g == 0 {
            return Err(Error::InvalidWord("generator 0 is not allowed".into()));
        }
        gens.push(g);
    }
    let max = gens.iter().map(|g| g.unsigned_abs() as usize).max().unwrap_or(0);
    let strands = match strands {
        Some(0) => return Err(Error::InvalidWord("strand count must be positive".into())),
        Some(s) => s,
        None => max + 1,
    };
    Word::from_signed(strands, &gens)
}

/// `(σ₁σ₂…σ_{p-1})^q` on `p` strands.
pub fn torus_word(p: usize, q: usize) -> Word {
    assert!(p >= 1, "torus word needs at least one strand");
    let mut letters = Vec::with_capacity((p - 1) * q);
    for _ in 0..q {
        letters.extend((1..p).map(Letter::pos));
    }
    Word { strands: p, letters }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller root so roots are stable under re-tracing
            if ra < rb {
                self.parent[rb] = ra;
            } else {
                self.parent[ra] = rb;
            }
        }
    }
}
