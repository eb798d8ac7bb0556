//! Covering codes, covering verification and densities.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::hamming::{hamming_distance, IndexedSpace, DEFAULT_ENUMERATION_GUARD};
use crate::{Error, HammingSpace, Result, Word};

/// A set of words of one Hamming space, kept sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Code {
    space: HammingSpace,
    words: Vec<Word>,
}

impl Code {
    pub fn new(space: HammingSpace, words: impl IntoIterator<Item = Word>) -> Result<Self> {
        let mut words: Vec<Word> = words.into_iter().collect();
        if let Some(bad) = words.iter().find(|w| !space.contains(w)) {
            return Err(Error::Usage(format!(
                "word {:?} does not belong to {space}",
                bad.symbols()
            )));
        }
        words.sort_unstable();
        words.dedup();
        Ok(Self { space, words })
    }

    /// Caller guarantees the words are valid, sorted and distinct.
    pub(crate) fn from_sorted_unchecked(space: HammingSpace, words: Vec<Word>) -> Self {
        debug_assert!(words.windows(2).all(|p| p[0] < p[1]));
        Self { space, words }
    }

    /// Every word of the space.
    pub fn whole_space(space: HammingSpace, guard: u64) -> Result<Self> {
        let ix = IndexedSpace::new(space, guard)?;
        let words = (0..ix.size()).map(|i| ix.word(i)).collect();
        Ok(Self::from_sorted_unchecked(space, words))
    }

    pub fn space(&self) -> &HammingSpace {
        &self.space
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.words.binary_search(w).is_ok()
    }

    pub fn insert(&mut self, w: Word) -> Result<bool> {
        if !self.space.contains(&w) {
            return Err(Error::Usage(format!(
                "word {:?} does not belong to {}",
                w.symbols(),
                self.space
            )));
        }
        match self.words.binary_search(&w) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.words.insert(pos, w);
                Ok(true)
            }
        }
    }

    /// Canonical JSON: keys sorted, words in ascending order, trailing newline.
    pub fn to_json(&self) -> String {
        let file = CodeFile {
            n: self.space.n(),
            q: self.space.q(),
            words: self
                .words
                .iter()
                .map(|w| w.to_text(self.space.q()))
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("code file serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CodeFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let space = HammingSpace::new(file.q, file.n).map_err(|e| Error::Parse(e.to_string()))?;
        let words = file
            .words
            .iter()
            .map(|t| Word::parse(t, &space))
            .collect::<Result<Vec<_>>>()?;
        Code::new(space, words)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeFile {
    n: usize,
    q: u32,
    words: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Covered,
    /// `witness` is the lexicographically smallest uncovered word.
    Uncovered {
        witness: Word,
    },
}

impl Verdict {
    pub fn is_covered(&self) -> bool {
        matches!(self, Verdict::Covered)
    }
}

/// Outcome of a randomized spot check. Only `Uncovered` is conclusive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SampledVerdict {
    NoCounterexample { samples: u64 },
    Uncovered { witness: Word },
}

/// `|K|·V_q(n,R)/q^n`, exact and projected to `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityValue {
    pub exact: BigRational,
    pub approx: f64,
}

impl DensityValue {
    pub fn new(exact: BigRational) -> Self {
        let approx = exact.to_f64().unwrap_or(f64::NAN);
        Self { exact, approx }
    }
}

impl fmt::Display for DensityValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (~{:.17})", self.exact, self.approx)
    }
}

impl Serialize for DensityValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("DensityValue", 2)?;
        st.serialize_field("approx", &self.approx)?;
        st.serialize_field("exact", &self.exact.to_string())?;
        st.end()
    }
}

pub fn verify_covering(code: &Code, radius: usize) -> Result<Verdict> {
    verify_covering_with_guard(code, radius, DEFAULT_ENUMERATION_GUARD)
}

/// Marks a bitmap of all `q^n` words ball by ball, then reports the first hole.
pub fn verify_covering_with_guard(code: &Code, radius: usize, guard: u64) -> Result<Verdict> {
    let ix = IndexedSpace::new(*code.space(), guard)?;
    let size = ix.size();
    let mut marked = vec![0u64; size.div_ceil(64)];
    for w in code.words() {
        ix.for_each_in_ball(ix.index(w), radius, |i| marked[i / 64] |= 1 << (i % 64));
    }
    let hole = marked.iter().enumerate().find_map(|(block, &bits)| {
        let free = !bits;
        (free != 0)
            .then(|| block * 64 + free.trailing_zeros() as usize)
            .filter(|&i| i < size)
    });
    Ok(match hole {
        None => Verdict::Covered,
        Some(i) => Verdict::Uncovered {
            witness: ix.word(i),
        },
    })
}

/// Word-by-word scan against every codeword. Quadratic; kept as an oracle
/// for the bitmap route.
pub fn verify_covering_scan(code: &Code, radius: usize, guard: u64) -> Result<Verdict> {
    let ix = IndexedSpace::new(*code.space(), guard)?;
    for i in 0..ix.size() {
        let z = ix.word(i);
        let covered = code.words().iter().any(|c| {
            hamming_distance(c, &z)
                .map(|d| d <= radius)
                .unwrap_or(false)
        });
        if !covered {
            return Ok(Verdict::Uncovered { witness: z });
        }
    }
    Ok(Verdict::Covered)
}

/// Tests `samples` uniformly random words. Works on spaces of any size.
pub fn verify_covering_sampled(
    code: &Code,
    radius: usize,
    samples: u64,
    seed: u64,
) -> Result<SampledVerdict> {
    if samples == 0 {
        return Err(Error::Usage("samples must be >= 1".into()));
    }
    let space = *code.space();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Probe the sample's own ball when that is cheaper than scanning the code.
    let probe_ball = space
        .ball_volume(radius)
        .to_usize()
        .is_some_and(|v| v <= code.len());
    for _ in 0..samples {
        let z = Word::from_symbols(
            (0..space.n())
                .map(|_| rng.random_range(0..space.q()))
                .collect(),
        );
        let covered = if probe_ball {
            space.enumerate_ball(&z, radius)?.any(|w| code.contains(&w))
        } else {
            code.words().iter().any(|c| {
                hamming_distance(c, &z)
                    .map(|d| d <= radius)
                    .unwrap_or(false)
            })
        };
        if !covered {
            return Ok(SampledVerdict::Uncovered { witness: z });
        }
    }
    Ok(SampledVerdict::NoCounterexample { samples })
}

pub fn density(code: &Code, radius: usize) -> DensityValue {
    density_of_size(code.space(), radius, &BigUint::from(code.len()))
}

/// Density of any code with `size` words.
pub fn density_of_size(space: &HammingSpace, radius: usize, size: &BigUint) -> DensityValue {
    let num = BigInt::from(size * space.ball_volume(radius));
    let den = BigInt::from(space.size());
    DensityValue::new(BigRational::new(num, den))
}

/// `⌈q^n / V_q(n,R)⌉`, the least size any covering code can have.
pub fn sphere_covering_lower_bound(space: &HammingSpace, radius: usize) -> BigUint {
    let v = space.ball_volume(radius);
    let (quot, rem) = space.size().div_rem(&v);
    if rem.is_zero() {
        quot
    } else {
        quot + 1u32
    }
}
