//! Minimum covering codes of tiny spaces by branch and bound.
//!
//! Phase one finds the optimal size: branch on the smallest uncovered word
//! `w` (some codeword must lie in `Ball(w, R)`), prune with
//! `|chosen| + ⌈uncovered / V⌉`, and forbid earlier siblings in later
//! branches so no set is visited twice. The zero word is fixed as a codeword:
//! translating an optimum by one of its codewords keeps it optimal.
//!
//! Phase two re-searches increasing codeword sequences of that size in
//! lexicographic order, so the reported code is the smallest optimum.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::code::{density, sphere_covering_lower_bound, DensityValue};
use crate::construction::{greedy_dominating_partial, hamming_graph_view_with_guard};
use crate::hamming::IndexedSpace;
use crate::{Code, Error, HammingSpace, Result};

pub const DEFAULT_EXACT_GUARD: u64 = 1 << 12;

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub time_budget: Option<Duration>,
    pub node_budget: Option<u64>,
    pub guard: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            time_budget: None,
            node_budget: None,
            guard: DEFAULT_EXACT_GUARD,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    /// The search stopped early; `optimal_size` is the best size found.
    BudgetExceeded,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub radius: usize,
    pub optimal_size: usize,
    pub lower_bound: usize,
    pub code: Code,
    pub density: DensityValue,
    pub status: SolveStatus,
    pub nodes: u64,
}

impl SolveResult {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn to_json(&self) -> String {
        let code: serde_json::Value =
            serde_json::from_str(&self.code.to_json()).expect("code json is valid");
        let value = serde_json::json!({
            "code": code,
            "density": self.density,
            "lower_bound": self.lower_bound,
            "nodes": self.nodes,
            "optimal_size": self.optimal_size,
            "radius": self.radius,
            "status": self.status,
        });
        let mut s = serde_json::to_string_pretty(&value).expect("result serializes");
        s.push('\n');
        s
    }
}

/// Density of a minimum covering code, `μ_q(n, R)`. Fails if the default
/// budgets do not allow a proof of optimality.
pub fn mu(space: HammingSpace, radius: usize) -> Result<DensityValue> {
    let result = minimal_covering_code(space, radius, &SolveOptions::default())?;
    if !result.is_optimal() {
        return Err(Error::BudgetExceeded {
            best_known: result.optimal_size,
        });
    }
    Ok(result.density)
}

pub fn minimal_covering_code(
    space: HammingSpace,
    radius: usize,
    options: &SolveOptions,
) -> Result<SolveResult> {
    let ix = IndexedSpace::new(space, options.guard).map_err(|_| {
        Error::Usage(format!(
            "{space} exceeds the exact-search guard of {} words",
            options.guard
        ))
    })?;
    let lower_bound = to_usize(sphere_covering_lower_bound(&space, radius));

    let graph = hamming_graph_view_with_guard(space, radius, options.guard)?;
    let greedy = greedy_dominating_partial(&graph, ix.size()).dominators;

    let mut search = Search::new(&ix, radius, options);
    let mut status = SolveStatus::Optimal;
    let mut best = greedy;
    if best.len() > lower_bound {
        search.best = best.clone();
        let mut covered = search.empty();
        search.cover(&mut covered, 0);
        let forbidden = search.empty();
        search.size_search(&covered, &forbidden, &mut vec![0]);
        best = std::mem::take(&mut search.best);
        if search.exceeded {
            status = SolveStatus::BudgetExceeded;
        }
    }
    if status == SolveStatus::Optimal {
        search.exceeded = false;
        if let Some(smallest) = search.smallest_of_size(best.len()) {
            best = smallest;
        }
    }
    best.sort_unstable();

    let code = Code::new(space, best.iter().map(|&i| ix.word(i)))?;
    Ok(SolveResult {
        radius,
        optimal_size: code.len(),
        lower_bound,
        density: density(&code, radius),
        code,
        status,
        nodes: search.nodes,
    })
}

fn to_usize(v: BigUint) -> usize {
    v.to_usize()
        .expect("fits: bounded by the guarded space size")
}

struct Search {
    blocks: usize,
    size: usize,
    volume: usize,
    balls: Vec<u64>,
    members: Vec<Vec<usize>>,
    best: Vec<usize>,
    nodes: u64,
    node_budget: Option<u64>,
    deadline: Option<Instant>,
    exceeded: bool,
}

impl Search {
    fn new(ix: &IndexedSpace, radius: usize, options: &SolveOptions) -> Self {
        let size = ix.size();
        let blocks = size.div_ceil(64);
        let mut balls = vec![0u64; size * blocks];
        let mut members = Vec::with_capacity(size);
        for c in 0..size {
            let mut list = Vec::new();
            ix.for_each_in_ball(c, radius, |i| {
                balls[c * blocks + i / 64] |= 1 << (i % 64);
                list.push(i);
            });
            list.sort_unstable();
            members.push(list);
        }
        let volume = members.first().map_or(1, Vec::len);
        Self {
            blocks,
            size,
            volume,
            balls,
            members,
            best: Vec::new(),
            nodes: 0,
            node_budget: options.node_budget,
            deadline: options.time_budget.map(|d| Instant::now() + d),
            exceeded: false,
        }
    }

    fn empty(&self) -> Vec<u64> {
        vec![0; self.blocks]
    }

    fn ball(&self, c: usize) -> &[u64] {
        &self.balls[c * self.blocks..(c + 1) * self.blocks]
    }

    fn cover(&self, covered: &mut [u64], c: usize) {
        covered
            .iter_mut()
            .zip(self.ball(c))
            .for_each(|(a, b)| *a |= b);
    }

    fn gain(&self, covered: &[u64], c: usize) -> u32 {
        covered
            .iter()
            .zip(self.ball(c))
            .map(|(a, b)| (b & !a).count_ones())
            .sum()
    }

    fn uncovered(&self, covered: &[u64]) -> usize {
        self.size
            - covered
                .iter()
                .map(|b| b.count_ones() as usize)
                .sum::<usize>()
    }

    fn first_uncovered(&self, covered: &[u64]) -> usize {
        covered
            .iter()
            .enumerate()
            .find_map(|(k, &b)| (b != u64::MAX).then(|| k * 64 + (!b).trailing_zeros() as usize))
            .expect("called with something uncovered")
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.node_budget.is_some_and(|b| self.nodes > b) {
            self.exceeded = true;
        }
        if self.nodes.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.exceeded = true;
        }
        !self.exceeded
    }

    fn size_search(&mut self, covered: &[u64], forbidden: &[u64], chosen: &mut Vec<usize>) {
        if !self.tick() {
            return;
        }
        let uncovered = self.uncovered(covered);
        if uncovered == 0 {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return;
        }
        if chosen.len() + uncovered.div_ceil(self.volume) >= self.best.len() {
            return;
        }
        let w = self.first_uncovered(covered);
        let mut candidates: Vec<(u32, usize)> = self.members[w]
            .iter()
            .filter(|&&c| forbidden[c / 64] & (1 << (c % 64)) == 0)
            .map(|&c| (self.gain(covered, c), c))
            .collect();
        candidates.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

        let mut excluded = forbidden.to_vec();
        let mut next = covered.to_vec();
        for (_, c) in candidates {
            next.copy_from_slice(covered);
            self.cover(&mut next, c);
            chosen.push(c);
            self.size_search(&next, &excluded, chosen);
            chosen.pop();
            if self.exceeded {
                return;
            }
            excluded[c / 64] |= 1 << (c % 64);
        }
    }

    /// Lexicographically smallest covering with `k` codewords containing the
    /// zero word, or `None` if the budget runs out first.
    fn smallest_of_size(&mut self, k: usize) -> Option<Vec<usize>> {
        let mut covered = self.empty();
        self.cover(&mut covered, 0);
        let mut chosen = vec![0];
        let found = self.lex_search(&covered, &mut chosen, k);
        (found && !self.exceeded).then_some(chosen)
    }

    fn lex_search(&mut self, covered: &[u64], chosen: &mut Vec<usize>, k: usize) -> bool {
        if !self.tick() {
            return false;
        }
        let uncovered = self.uncovered(covered);
        if uncovered == 0 {
            return true;
        }
        let slots = k - chosen.len();
        if slots == 0 || uncovered > slots * self.volume {
            return false;
        }
        let w = self.first_uncovered(covered);
        let last = *chosen.last().expect("zero word is always chosen");
        let hi = *self.members[w].last().expect("balls are nonempty");
        let mut next = covered.to_vec();
        for c in last + 1..=hi {
            // a codeword adding nothing could be dropped, contradicting optimality
            if self.gain(covered, c) == 0 {
                continue;
            }
            next.copy_from_slice(covered);
            self.cover(&mut next, c);
            chosen.push(c);
            if self.lex_search(&next, chosen, k) {
                return true;
            }
            chosen.pop();
            if self.exceeded {
                return false;
            }
        }
        false
    }
}
