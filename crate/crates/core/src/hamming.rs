//! The Hamming space `[q]^n` with zero-based symbols `{0, …, q−1}`.
//!
//! Counting is exact: `q^n`, binomials and ball volumes are [`BigUint`].
//! Anything that walks the whole space goes through an enumeration guard so
//! that a mistyped `n` fails fast instead of allocating a huge bitmap.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Symbol = u32;

/// Largest `q^n` that full-space scans accept unless overridden.
pub const DEFAULT_ENUMERATION_GUARD: u64 = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HammingSpace {
    q: u32,
    n: usize,
}

impl HammingSpace {
    pub fn new(q: u32, n: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::Usage(format!(
                "alphabet size q must be >= 2, got {q}"
            )));
        }
        Ok(Self { q, n })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of words, `q^n`.
    pub fn size(&self) -> BigUint {
        BigUint::from(self.q).pow(self.n as u32)
    }

    pub fn size_u64(&self) -> Option<u64> {
        self.size().to_u64()
    }

    /// `q^n` as a `usize`, provided it does not exceed `guard`.
    pub fn enumerable_size(&self, guard: u64) -> Result<usize> {
        match self.size_u64() {
            Some(s) if s <= guard => Ok(s as usize),
            _ => Err(Error::SpaceTooLarge {
                q: self.q,
                n: self.n,
                guard,
            }),
        }
    }

    pub fn ball_volume(&self, radius: usize) -> BigUint {
        ball_volume(self, radius)
    }

    pub fn zero_word(&self) -> Word {
        Word(vec![0; self.n])
    }

    /// Checked constructor: length `n`, every symbol below `q`.
    pub fn word(&self, symbols: Vec<Symbol>) -> Result<Word> {
        let w = Word(symbols);
        if !self.contains(&w) {
            return Err(Error::Usage(format!(
                "word {:?} does not belong to [{}]^{}",
                w.0, self.q, self.n
            )));
        }
        Ok(w)
    }

    pub fn contains(&self, w: &Word) -> bool {
        w.len() == self.n && w.0.iter().all(|&s| s < self.q)
    }

    /// Mixed-radix index, first symbol most significant, so index order
    /// coincides with lexicographic word order.
    pub fn word_index(&self, w: &Word) -> Result<u64> {
        if !self.contains(w) {
            return Err(Error::Usage(format!(
                "word {:?} does not belong to [{}]^{}",
                w.0, self.q, self.n
            )));
        }
        if self.size_u64().is_none() {
            return Err(Error::SpaceTooLarge {
                q: self.q,
                n: self.n,
                guard: u64::MAX,
            });
        }
        Ok(w.0
            .iter()
            .fold(0u64, |acc, &s| acc * self.q as u64 + s as u64))
    }

    pub fn index_word(&self, index: u64) -> Result<Word> {
        match self.size_u64() {
            Some(size) if index < size => {}
            _ => {
                return Err(Error::Usage(format!(
                    "index {index} out of range for [{}]^{}",
                    self.q, self.n
                )))
            }
        }
        let q = self.q as u64;
        let mut symbols = vec![0; self.n];
        let mut rest = index;
        for slot in symbols.iter_mut().rev() {
            *slot = (rest % q) as Symbol;
            rest /= q;
        }
        Ok(Word(symbols))
    }

    /// Words within distance `radius` of `center`, each exactly once.
    pub fn enumerate_ball(&self, center: &Word, radius: usize) -> Result<BallIter> {
        if !self.contains(center) {
            return Err(Error::Usage(format!(
                "center {:?} does not belong to [{}]^{}",
                center.0, self.q, self.n
            )));
        }
        Ok(BallIter::new(self.q, center.clone(), radius.min(self.n)))
    }
}

impl fmt::Display for HammingSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]^{}", self.q, self.n)
    }
}

/// A point of `[q]^n`. Ordering is lexicographic on symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Symbol>);

impl Word {
    /// Unchecked; use [`HammingSpace::word`] to validate against a space.
    pub fn from_symbols(symbols: Vec<Symbol>) -> Self {
        Self(symbols)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(self, tail)` as one word.
    pub fn concat(&self, tail: &Word) -> Word {
        let mut symbols = Vec::with_capacity(self.len() + tail.len());
        symbols.extend_from_slice(&self.0);
        symbols.extend_from_slice(&tail.0);
        Word(symbols)
    }

    /// Digits for `q <= 10`, comma-separated integers otherwise.
    pub fn to_text(&self, q: u32) -> String {
        if q <= 10 {
            self.0
                .iter()
                .map(|&s| char::from_digit(s, 10).unwrap_or('?'))
                .collect()
        } else {
            self.0
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }

    /// Inverse of [`Word::to_text`], validated against `space`.
    pub fn parse(text: &str, space: &HammingSpace) -> Result<Word> {
        let symbols: Vec<Symbol> = if space.q() <= 10 {
            text.chars()
                .map(|c| {
                    c.to_digit(10)
                        .ok_or_else(|| Error::Parse(format!("non-digit {c:?} in word {text:?}")))
                })
                .collect::<Result<_>>()?
        } else if text.is_empty() {
            Vec::new()
        } else {
            text.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<Symbol>()
                        .map_err(|_| Error::Parse(format!("bad symbol {t:?} in word {text:?}")))
                })
                .collect::<Result<_>>()?
        };
        let w = Word(symbols);
        if !space.contains(&w) {
            return Err(Error::Parse(format!(
                "word {text:?} is not a word of {space}"
            )));
        }
        Ok(w)
    }
}

pub fn hamming_distance(u: &Word, v: &Word) -> Result<usize> {
    if u.len() != v.len() {
        return Err(Error::Usage(format!(
            "length mismatch: {} vs {}",
            u.len(),
            v.len()
        )));
    }
    Ok(u.0.iter().zip(&v.0).filter(|(a, b)| a != b).count())
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 0..k {
        c *= n - i;
        c /= i + 1;
    }
    c
}

/// `V_q(n, R) = Σ_{i ≤ min(R, n)} (q−1)^i · C(n, i)`.
pub fn ball_volume(space: &HammingSpace, radius: usize) -> BigUint {
    let n = space.n();
    let base = BigUint::from(space.q() - 1);
    let mut total = BigUint::zero();
    let mut power = BigUint::one();
    let mut choose = BigUint::one();
    for i in 0..=radius.min(n) {
        if i > 0 {
            power *= &base;
            choose *= n - i + 1;
            choose /= i;
        }
        total += &power * &choose;
    }
    total
}

/// Natural log of `V_q(n, R)` in floating point, usable far beyond the
/// range where the exact volume fits in an `f64`.
pub fn ln_ball_volume(q: u32, n: usize, radius: usize) -> f64 {
    let ln_base = ((q - 1) as f64).ln();
    let mut ln_choose = 0.0f64;
    let mut terms = Vec::with_capacity(radius.min(n) + 1);
    for i in 0..=radius.min(n) {
        if i > 0 {
            ln_choose += ((n - i + 1) as f64).ln() - (i as f64).ln();
        }
        terms.push(ln_choose + i as f64 * ln_base);
    }
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
}

/// Streams a Hamming ball layer by layer: first the center, then every word at
/// distance 1, then 2, and so on. Within a layer the changed positions run
/// through combinations in lexicographic order and, for each, the `(q−1)^i`
/// nonzero shifts run like an odometer.
pub struct BallIter {
    q: u32,
    center: Word,
    max_layer: usize,
    layer: usize,
    positions: Vec<usize>,
    shifts: Vec<Symbol>,
    done: bool,
}

impl BallIter {
    fn new(q: u32, center: Word, max_layer: usize) -> Self {
        Self {
            q,
            center,
            max_layer,
            layer: 0,
            positions: Vec::new(),
            shifts: Vec::new(),
            done: false,
        }
    }

    fn current(&self) -> Word {
        let mut symbols = self.center.0.clone();
        for (&p, &s) in self.positions.iter().zip(&self.shifts) {
            symbols[p] = (symbols[p] + s) % self.q;
        }
        Word(symbols)
    }

    fn advance(&mut self) {
        for s in self.shifts.iter_mut().rev() {
            if *s + 1 < self.q {
                *s += 1;
                return;
            }
            *s = 1;
        }
        if self.next_combination() {
            return;
        }
        self.layer += 1;
        if self.layer > self.max_layer {
            self.done = true;
            return;
        }
        self.positions = (0..self.layer).collect();
        self.shifts = vec![1; self.layer];
    }

    fn next_combination(&mut self) -> bool {
        let n = self.center.len();
        let k = self.positions.len();
        for j in (0..k).rev() {
            if self.positions[j] < n - k + j {
                self.positions[j] += 1;
                for t in j + 1..k {
                    self.positions[t] = self.positions[t - 1] + 1;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for BallIter {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        let w = self.current();
        self.advance();
        Some(w)
    }
}

/// A guarded space whose words are addressed by their mixed-radix index.
/// Used by the bitmap-based routines, which never materialise [`Word`]s.
#[derive(Clone, Debug)]
pub struct IndexedSpace {
    space: HammingSpace,
    size: usize,
    weights: Vec<usize>,
}

impl IndexedSpace {
    pub fn new(space: HammingSpace, guard: u64) -> Result<Self> {
        let size = space.enumerable_size(guard)?;
        let q = space.q() as usize;
        let mut weights = vec![1usize; space.n()];
        for p in (0..space.n().saturating_sub(1)).rev() {
            weights[p] = weights[p + 1] * q;
        }
        Ok(Self {
            space,
            size,
            weights,
        })
    }

    pub fn space(&self) -> &HammingSpace {
        &self.space
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn digits(&self, index: usize) -> Vec<Symbol> {
        let q = self.space.q() as usize;
        self.weights
            .iter()
            .map(|&w| ((index / w) % q) as Symbol)
            .collect()
    }

    pub fn word(&self, index: usize) -> Word {
        Word(self.digits(index))
    }

    /// Index of a word already known to lie in the space.
    pub fn index(&self, w: &Word) -> usize {
        w.0.iter()
            .zip(&self.weights)
            .map(|(&s, &wt)| s as usize * wt)
            .sum()
    }

    /// Calls `f` once for each index within distance `radius` of `center`.
    pub fn for_each_in_ball(&self, center: usize, radius: usize, mut f: impl FnMut(usize)) {
        let digits = self.digits(center);
        self.ball_rec(&digits, 0, radius, center, &mut f);
    }

    fn ball_rec(
        &self,
        digits: &[Symbol],
        start: usize,
        remaining: usize,
        index: usize,
        f: &mut impl FnMut(usize),
    ) {
        f(index);
        if remaining == 0 {
            return;
        }
        let q = self.space.q() as usize;
        for p in start..digits.len() {
            let d = digits[p] as usize;
            let w = self.weights[p];
            let base = index - d * w;
            for shift in 1..q {
                let nd = (d + shift) % q;
                self.ball_rec(digits, p + 1, remaining - 1, base + nd * w, f);
            }
        }
    }
}
