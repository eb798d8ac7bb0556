//! Building covering codes.
//!
//! The centerpiece is [`ksv_construct`], which splits `[q]^n` as
//! `[q]^{r'} × [q]^r` with `r = ⌊n/y⌋`, picks a partial dominating set `X` of
//! the radius-`R` Hamming graph on the first block, and returns
//!
//! ```text
//! K = (X ⊕ [q]^r) ∪ (N̄(X) ⊕ K₂)
//! ```
//!
//! where `N̄(X)` are the first-block words not within distance `R` of `X` and
//! `K₂` is a covering of `[q]^r`, built by the same recursion. A word
//! `(z₁, z₂)` is covered through the first part when `z₁` is within `R` of `X`
//! and through the second part otherwise.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::code::{density, DensityValue};
use crate::exact::{minimal_covering_code, SolveOptions};
use crate::hamming::{IndexedSpace, DEFAULT_ENUMERATION_GUARD};
use crate::{Code, Error, HammingSpace, Result, Word};

/// A `d`-regular simple graph on vertices `0..m`.
pub trait RegularGraph {
    fn vertex_count(&self) -> usize;

    fn degree(&self) -> usize;

    /// Visits the `d` neighbors of `v` (never `v` itself).
    fn for_each_neighbor(&self, v: usize, f: &mut dyn FnMut(usize));

    /// Visits `v` and then its neighbors.
    fn for_each_closed_neighbor(&self, v: usize, f: &mut dyn FnMut(usize)) {
        f(v);
        self.for_each_neighbor(v, f);
    }

    fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degree());
        self.for_each_neighbor(v, &mut |u| out.push(u));
        out
    }
}

/// `[q]^n` with edges between distinct words at distance at most `R`.
#[derive(Clone, Debug)]
pub struct HammingGraph {
    ix: IndexedSpace,
    radius: usize,
    degree: usize,
}

impl HammingGraph {
    pub fn space(&self) -> &HammingSpace {
        self.ix.space()
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub(crate) fn indexed(&self) -> &IndexedSpace {
        &self.ix
    }
}

impl RegularGraph for HammingGraph {
    fn vertex_count(&self) -> usize {
        self.ix.size()
    }

    fn degree(&self) -> usize {
        self.degree
    }

    fn for_each_neighbor(&self, v: usize, f: &mut dyn FnMut(usize)) {
        self.ix.for_each_in_ball(v, self.radius, |u| {
            if u != v {
                f(u)
            }
        });
    }

    fn for_each_closed_neighbor(&self, v: usize, f: &mut dyn FnMut(usize)) {
        self.ix.for_each_in_ball(v, self.radius, f);
    }
}

pub fn hamming_graph_view(space: HammingSpace, radius: usize) -> Result<HammingGraph> {
    hamming_graph_view_with_guard(space, radius, DEFAULT_ENUMERATION_GUARD)
}

pub fn hamming_graph_view_with_guard(
    space: HammingSpace,
    radius: usize,
    guard: u64,
) -> Result<HammingGraph> {
    let ix = IndexedSpace::new(space, guard)?;
    // the ball fits in the space, so it fits in usize
    let volume: usize = space
        .ball_volume(radius)
        .try_into()
        .expect("ball fits in space");
    Ok(HammingGraph {
        ix,
        radius,
        degree: volume - 1,
    })
}

/// Regular graph given by explicit adjacency lists.
#[derive(Clone, Debug)]
pub struct AdjacencyGraph {
    adjacency: Vec<Vec<usize>>,
    degree: usize,
}

impl AdjacencyGraph {
    /// Validates regularity, symmetry and the absence of loops and multi-edges.
    pub fn new(adjacency: Vec<Vec<usize>>) -> Result<Self> {
        let m = adjacency.len();
        let degree = adjacency.first().map_or(0, Vec::len);
        for (v, nbrs) in adjacency.iter().enumerate() {
            if nbrs.len() != degree {
                return Err(Error::Usage(format!(
                    "vertex {v} has degree {} but vertex 0 has {degree}",
                    nbrs.len()
                )));
            }
            let mut seen = nbrs.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != nbrs.len() {
                return Err(Error::Usage(format!("vertex {v} has a repeated neighbor")));
            }
            for &u in nbrs {
                if u >= m || u == v || !adjacency[u].contains(&v) {
                    return Err(Error::Usage(format!(
                        "edge {v}-{u} is invalid or one-sided"
                    )));
                }
            }
        }
        Ok(Self { adjacency, degree })
    }

    pub fn complete(m: usize) -> Self {
        let adjacency = (0..m)
            .map(|v| (0..m).filter(|&u| u != v).collect())
            .collect();
        Self {
            adjacency,
            degree: m.saturating_sub(1),
        }
    }

    pub fn empty(m: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); m],
            degree: 0,
        }
    }

    /// `m >= 3`.
    pub fn cycle(m: usize) -> Self {
        let adjacency = (0..m).map(|v| vec![(v + m - 1) % m, (v + 1) % m]).collect();
        Self {
            adjacency,
            degree: 2,
        }
    }
}

impl RegularGraph for AdjacencyGraph {
    fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    fn degree(&self) -> usize {
        self.degree
    }

    fn for_each_neighbor(&self, v: usize, f: &mut dyn FnMut(usize)) {
        self.adjacency[v].iter().for_each(|&u| f(u));
    }
}

/// A set `X` and the vertices it leaves undominated, `N̄(X) = V \ (X ∪ N(X))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominationResult {
    pub dominators: Vec<usize>,
    pub undominated: Vec<usize>,
    pub x_used: f64,
    pub trials_used: usize,
}

/// `(⌊x·m/(d+1)⌋, ⌈e^{−x+(d+1)/m}·m⌉)`, both capped at `m`: the size budget
/// for `X` and the largest acceptable `|N̄(X)|`.
pub fn domination_targets(m: usize, d: usize, x: f64) -> (usize, usize) {
    let mf = m as f64;
    let closed = (d + 1) as f64;
    let budget = (x * mf / closed).floor();
    let threshold = ((-x + closed / mf).exp() * mf).ceil();
    let cap = |v: f64| if v >= mf { m } else { v.max(0.0) as usize };
    (cap(budget), cap(threshold))
}

/// Sorted list of vertices outside `X ∪ N(X)`.
pub fn undominated<G: RegularGraph + ?Sized>(graph: &G, dominators: &[usize]) -> Vec<usize> {
    let mut hit = vec![false; graph.vertex_count()];
    for &v in dominators {
        graph.for_each_closed_neighbor(v, &mut |u| hit[u] = true);
    }
    hit.iter()
        .enumerate()
        .filter_map(|(v, &h)| (!h).then_some(v))
        .collect()
}

/// Random partial domination: each trial draws a uniform subset of
/// `⌊x·m/(d+1)⌋` vertices and the first trial whose `|N̄(X)|` meets the
/// threshold of [`domination_targets`] is returned. Trial `i` uses stream `i`
/// of a ChaCha generator keyed by `seed`, so the result depends only on the
/// inputs.
pub fn dominating_partial<G: RegularGraph + ?Sized>(
    graph: &G,
    x: f64,
    seed: u64,
    max_trials: usize,
) -> Result<DominationResult> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Usage(format!(
            "x must be positive and finite, got {x}"
        )));
    }
    if max_trials == 0 {
        return Err(Error::Usage("max_trials must be >= 1".into()));
    }
    let m = graph.vertex_count();
    let (budget, threshold) = domination_targets(m, graph.degree(), x);
    if budget == 0 && threshold < m {
        return Err(Error::Usage(format!(
            "x = {x} allows an empty X only, which cannot meet |N̄(X)| <= {threshold} on {m} vertices"
        )));
    }

    let mut best: Option<DominationResult> = None;
    for trial in 0..max_trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let mut dominators = rand::seq::index::sample(&mut rng, m, budget).into_vec();
        dominators.sort_unstable();
        let missed = undominated(graph, &dominators);
        let result = DominationResult {
            dominators,
            undominated: missed,
            x_used: x,
            trials_used: trial + 1,
        };
        if result.undominated.len() <= threshold {
            return Ok(result);
        }
        if best
            .as_ref()
            .is_none_or(|b| result.undominated.len() < b.undominated.len())
        {
            best = Some(result);
        }
    }
    Err(Error::DominationFailed {
        threshold,
        trials: max_trials,
        best: Box::new(best.expect("at least one trial ran")),
    })
}

/// Picks, `size_budget` times, the vertex whose closed neighborhood contains
/// the most undominated vertices (smallest id on ties). Stops early once
/// everything is dominated.
pub fn greedy_dominating_partial<G: RegularGraph + ?Sized>(
    graph: &G,
    size_budget: usize,
) -> DominationResult {
    let m = graph.vertex_count();
    let closed = graph.degree() + 1;
    let mut gain = vec![closed; m];
    let mut hit = vec![false; m];
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> =
        (0..m).map(|v| (closed, Reverse(v))).collect();
    let mut dominators = Vec::new();

    while dominators.len() < size_budget {
        let Some((g, Reverse(v))) = heap.pop() else {
            break;
        };
        if g != gain[v] {
            // stale entry: gains only ever decrease
            heap.push((gain[v], Reverse(v)));
            continue;
        }
        if g == 0 {
            break;
        }
        dominators.push(v);
        gain[v] = 0;
        let mut newly = Vec::new();
        graph.for_each_closed_neighbor(v, &mut |u| {
            if !hit[u] {
                hit[u] = true;
                newly.push(u);
            }
        });
        for u in newly {
            graph.for_each_closed_neighbor(u, &mut |w| gain[w] = gain[w].saturating_sub(1));
        }
    }

    dominators.sort_unstable();
    let undominated = (0..m).filter(|&v| !hit[v]).collect();
    DominationResult {
        x_used: dominators.len() as f64 * closed as f64 / m.max(1) as f64,
        dominators,
        undominated,
        trials_used: 0,
    }
}

/// `A ⊕ B = {(a, b)}` in `[q]^{a+b}`.
pub fn direct_sum(a: &Code, b: &Code) -> Result<Code> {
    if a.space().q() != b.space().q() {
        return Err(Error::Usage(format!(
            "alphabet mismatch: {} vs {}",
            a.space().q(),
            b.space().q()
        )));
    }
    let space = HammingSpace::new(a.space().q(), a.space().n() + b.space().n())?;
    let words = a
        .words()
        .iter()
        .flat_map(|u| b.words().iter().map(move |v| u.concat(v)))
        .collect();
    Ok(Code::from_sorted_unchecked(space, words))
}

/// How the recursion covers the space it bottoms out on.
///
/// Every policy uses the single zero word once `n <= R`. The other stop is
/// `r = ⌊n/y⌋ = 0`: `Trivial` keeps splitting there (with `K₂ = {ε}`), the
/// rest cover `[q]^n` directly.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BasePolicy {
    /// Exact search when `q^n` is within the exact limit, greedy otherwise.
    #[default]
    Auto,
    Trivial,
    Exact,
    Greedy,
}

impl FromStr for BasePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "trivial" => Ok(Self::Trivial),
            "exact" => Ok(Self::Exact),
            "greedy" => Ok(Self::Greedy),
            other => Err(Error::Usage(format!(
                "unknown base policy {other:?} (expected auto|trivial|exact|greedy)"
            ))),
        }
    }
}

impl fmt::Display for BasePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Auto => "auto",
            Self::Trivial => "trivial",
            Self::Exact => "exact",
            Self::Greedy => "greedy",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ConstructOptions {
    pub base_policy: BasePolicy,
    pub seed: u64,
    pub max_trials: usize,
    /// Largest `q^n` handed to the exact solver at the base.
    pub exact_limit: u64,
    /// Node budget for that solver; keeps the base deterministic.
    pub exact_node_budget: u64,
    pub guard: u64,
    /// Retry a failed random domination greedily instead of failing.
    pub greedy_fallback: bool,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        Self {
            base_policy: BasePolicy::Auto,
            seed: 0,
            max_trials: 100,
            exact_limit: 1 << 12,
            exact_node_budget: 200_000,
            guard: DEFAULT_ENUMERATION_GUARD,
            greedy_fallback: true,
        }
    }
}

/// One split `[q]^n = [q]^{r'} × [q]^r`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelRecord {
    pub n: usize,
    pub r: usize,
    pub r_prime: usize,
    pub size_budget: usize,
    pub threshold: usize,
    pub x_size: usize,
    pub undominated_size: usize,
    pub inner_size: usize,
    pub level_size: usize,
    pub trials_used: usize,
    pub greedy_fallback: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseMethod {
    ZeroWord,
    Exact,
    ExactIncumbent,
    Greedy,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BaseRecord {
    pub n: usize,
    pub method: BaseMethod,
    pub size: usize,
}

/// Outermost level first.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructionTrace {
    pub q: u32,
    pub n: usize,
    pub radius: usize,
    pub x: f64,
    pub y: f64,
    pub seed: u64,
    pub base_policy: BasePolicy,
    pub levels: Vec<LevelRecord>,
    pub base: BaseRecord,
    pub total_size: usize,
    pub density: DensityValue,
}

impl ConstructionTrace {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("trace serializes");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub code: Code,
    pub trace: ConstructionTrace,
}

/// Requires `x > R·ln y` (that is `e^{−x}·y^R < 1`) and `y > 1`.
pub fn ksv_construct(
    space: HammingSpace,
    radius: usize,
    x: f64,
    y: f64,
    options: &ConstructOptions,
) -> Result<Construction> {
    if !(y > 1.0 && y.is_finite()) {
        return Err(Error::Infeasible(format!("requires y > 1, got y = {y}")));
    }
    if !(x > 0.0 && x.is_finite()) || radius as f64 * y.ln() - x >= 0.0 {
        return Err(Error::Infeasible(format!(
            "requires x > R·ln y = {}, got x = {x}",
            radius as f64 * y.ln()
        )));
    }
    if options.max_trials == 0 {
        return Err(Error::Usage("max_trials must be >= 1".into()));
    }
    space.enumerable_size(options.guard)?;

    let q = space.q();
    let mut splits = Vec::new();
    let mut n = space.n();
    loop {
        if n <= radius {
            break;
        }
        let r = (n as f64 / y).floor() as usize;
        if r == 0 && options.base_policy != BasePolicy::Trivial {
            break;
        }
        splits.push((n, r));
        n = r;
    }

    let (mut code, base) =
        cover_base(HammingSpace::new(q, n)?, radius, options).map_err(|e| Error::Construction {
            n,
            source: Box::new(e),
        })?;

    let mut levels = Vec::with_capacity(splits.len());
    for (depth, &(n, r)) in splits.iter().enumerate().rev() {
        let (next, record) =
            split_level(q, n, r, radius, x, &code, depth, options).map_err(|e| {
                Error::Construction {
                    n,
                    source: Box::new(e),
                }
            })?;
        code = next;
        levels.push(record);
    }
    levels.reverse();

    let density = density(&code, radius);
    let trace = ConstructionTrace {
        q,
        n: space.n(),
        radius,
        x,
        y,
        seed: options.seed,
        base_policy: options.base_policy,
        levels,
        base,
        total_size: code.len(),
        density,
    };
    Ok(Construction { code, trace })
}

fn cover_base(
    space: HammingSpace,
    radius: usize,
    options: &ConstructOptions,
) -> Result<(Code, BaseRecord)> {
    let record = |method, size| BaseRecord {
        n: space.n(),
        method,
        size,
    };
    if space.n() <= radius {
        let code = Code::from_sorted_unchecked(space, vec![space.zero_word()]);
        return Ok((code, record(BaseMethod::ZeroWord, 1)));
    }
    let within_exact = space.size_u64().is_some_and(|s| s <= options.exact_limit);
    let use_exact = match options.base_policy {
        BasePolicy::Exact if !within_exact => {
            return Err(Error::SpaceTooLarge {
                q: space.q(),
                n: space.n(),
                guard: options.exact_limit,
            })
        }
        BasePolicy::Exact => true,
        BasePolicy::Auto => within_exact,
        BasePolicy::Greedy | BasePolicy::Trivial => false,
    };
    if use_exact {
        let solve = SolveOptions {
            node_budget: Some(options.exact_node_budget),
            time_budget: None,
            guard: options.exact_limit,
        };
        let result = minimal_covering_code(space, radius, &solve)?;
        let method = if result.is_optimal() {
            BaseMethod::Exact
        } else {
            BaseMethod::ExactIncumbent
        };
        let size = result.code.len();
        return Ok((result.code, record(method, size)));
    }
    let graph = hamming_graph_view_with_guard(space, radius, options.guard)?;
    let cover = greedy_dominating_partial(&graph, graph.vertex_count());
    let words = cover
        .dominators
        .iter()
        .map(|&v| graph.indexed().word(v))
        .collect();
    let code = Code::from_sorted_unchecked(space, words);
    let size = code.len();
    Ok((code, record(BaseMethod::Greedy, size)))
}

fn level_seed(seed: u64, depth: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed.wrapping_add((depth as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[allow(clippy::too_many_arguments)]
fn split_level(
    q: u32,
    n: usize,
    r: usize,
    radius: usize,
    x: f64,
    inner: &Code,
    depth: usize,
    options: &ConstructOptions,
) -> Result<(Code, LevelRecord)> {
    let r_prime = n - r;
    let graph =
        hamming_graph_view_with_guard(HammingSpace::new(q, r_prime)?, radius, options.guard)?;
    let m = graph.vertex_count();
    let (size_budget, threshold) = domination_targets(m, graph.degree(), x);

    let (dom, greedy_fallback) = match dominating_partial(
        &graph,
        x,
        level_seed(options.seed, depth),
        options.max_trials,
    ) {
        Ok(d) => (d, false),
        Err(e @ (Error::DominationFailed { .. } | Error::Usage(_))) => {
            if !options.greedy_fallback {
                return Err(e);
            }
            (greedy_dominating_partial(&graph, size_budget), true)
        }
        Err(e) => return Err(e),
    };

    let tail_space = IndexedSpace::new(HammingSpace::new(q, r)?, options.guard)?;
    let tails: Vec<Word> = (0..tail_space.size()).map(|i| tail_space.word(i)).collect();

    const UNDOMINATED: u8 = 2;
    let mut role = vec![0u8; m];
    dom.dominators.iter().for_each(|&v| role[v] = 1);
    dom.undominated.iter().for_each(|&v| role[v] = UNDOMINATED);

    let level_size = dom.dominators.len() * tails.len() + dom.undominated.len() * inner.len();
    let mut words = Vec::with_capacity(level_size);
    for (v, &kind) in role.iter().enumerate() {
        let second: &[Word] = match kind {
            0 => continue,
            UNDOMINATED => inner.words(),
            _ => &tails,
        };
        let head = graph.indexed().word(v);
        words.extend(second.iter().map(|t| head.concat(t)));
    }
    debug_assert_eq!(words.len(), level_size);

    let record = LevelRecord {
        n,
        r,
        r_prime,
        size_budget,
        threshold,
        x_size: dom.dominators.len(),
        undominated_size: dom.undominated.len(),
        inner_size: inner.len(),
        level_size: words.len(),
        trials_used: dom.trials_used,
        greedy_fallback,
    };
    Ok((
        Code::from_sorted_unchecked(HammingSpace::new(q, n)?, words),
        record,
    ))
}
