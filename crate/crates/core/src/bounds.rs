//! Upper bounds on the asymptotic least density `μ*_q(R)` of radius-`R`
//! covering codes, and the numeric machinery around them.
//!
//! All of the two-parameter bounds depend on `(x, y)` only through
//!
//! * `A = (y/(y−1))^R`, evaluated as `exp(R·ln(y/(y−1)))`, and
//! * `t = e^{−x}·y^R`, evaluated through the slack `s = x − R·ln y` so that
//!   `t = e^{−s}` and `e^x·y^{−R} − 1 = expm1(s)`.
//!
//! A parameter pair is feasible when `t < 1`, i.e. `s > 0`.

use std::f64::consts::E;
use std::io::{self, Write};

use serde::Serialize;

use crate::hamming::ln_ball_volume;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundParams {
    pub radius: u32,
    pub x: f64,
    pub y: f64,
    /// `(R₁, μ*_q(R₁))` for the bound that recurses on a smaller radius.
    pub inner: Option<InnerRadius>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InnerRadius {
    pub radius: u32,
    pub mu_star: f64,
}

impl BoundParams {
    pub fn new(radius: u32, x: f64, y: f64) -> Self {
        Self {
            radius,
            x,
            y,
            inner: None,
        }
    }

    pub fn with_inner(mut self, radius: u32, mu_star: f64) -> Self {
        self.inner = Some(InnerRadius { radius, mu_star });
        self
    }

    /// `y = R·ln R + 1`, `x = R·ln y + 2·ln R`, for which `t = R^{−2}`.
    pub fn corollary(radius: u32) -> Self {
        let (x, y) = corollary_params(radius);
        Self::new(radius, x, y)
    }

    fn slack(&self) -> f64 {
        self.x - self.radius as f64 * self.y.ln()
    }
}

pub fn corollary_params(radius: u32) -> (f64, f64) {
    let r = radius as f64;
    let y = r * r.ln() + 1.0;
    let x = r * y.ln() + 2.0 * r.ln();
    (x, y)
}

/// `ln(y/(y−1))` without cancellation at either end of `(1, ∞)`.
fn ln_excess_ratio(y: f64) -> f64 {
    if y < 2.0 {
        y.ln() - (y - 1.0).ln()
    } else {
        -(-1.0 / y).ln_1p()
    }
}

/// `t = e^{−x}·y^R`. Feasible parameters have `t < 1`.
pub fn feasibility(p: &BoundParams) -> f64 {
    (-p.slack()).exp()
}

fn check_feasible(p: &BoundParams) -> Result<f64> {
    if p.radius == 0 {
        return Err(Error::Usage("R must be >= 1".into()));
    }
    if !(p.y > 1.0 && p.y.is_finite()) {
        return Err(Error::Infeasible(format!(
            "requires y > 1, got y = {}",
            p.y
        )));
    }
    let s = p.slack();
    if !(p.x > 0.0 && p.x.is_finite() && s > 0.0) {
        return Err(Error::Infeasible(format!(
            "requires x > R·ln y = {} (t = e^-x·y^R < 1), got x = {}",
            p.radius as f64 * p.y.ln(),
            p.x
        )));
    }
    Ok(s)
}

/// `x·(y/(y−1))^R·(1 + 1/(e^x·y^{−R} − 1))`.
pub fn theorem1_bound(p: &BoundParams) -> Result<f64> {
    let s = check_feasible(p)?;
    let growth = (p.radius as f64 * ln_excess_ratio(p.y)).exp();
    Ok(p.x * growth * (1.0 + 1.0 / s.exp_m1()))
}

/// The same bound as `a/(1−b)` with `a = x·(y/(y−1))^R` and `b = t`.
pub fn theorem1_bound_closed_form(p: &BoundParams) -> Result<f64> {
    let s = check_feasible(p)?;
    let a = p.x * (p.radius as f64 * ln_excess_ratio(p.y)).exp();
    limit_lemma_bound(a, (-s).exp())
}

/// `x·C(R,R₁)^{−1}·y^{R₁}·(y/(y−1))^{R−R₁}·(1 + 1/(e^x·y^{−R} − 1))·μ*_q(R₁)`.
///
/// `R₁ = 0` with `μ* = 1` is accepted and reduces to [`theorem1_bound`].
pub fn theorem15_bound(p: &BoundParams) -> Result<f64> {
    let inner = p
        .inner
        .ok_or_else(|| Error::Usage("inner radius R1 and its density are required".into()))?;
    if inner.radius >= p.radius {
        return Err(Error::Usage(format!(
            "requires R1 < R, got R1 = {} and R = {}",
            inner.radius, p.radius
        )));
    }
    if !(inner.mu_star >= 1.0 && inner.mu_star.is_finite()) {
        return Err(Error::Usage(format!(
            "density of the inner radius must be >= 1, got {}",
            inner.mu_star
        )));
    }
    let s = check_feasible(p)?;
    let (r, r1) = (p.radius as f64, inner.radius as f64);
    let ln_choose: f64 = (1..=inner.radius)
        .map(|i| ((p.radius - inner.radius + i) as f64).ln() - (i as f64).ln())
        .sum();
    let prefactor = (r1 * p.y.ln() - ln_choose).exp();
    let growth = ((r - r1) * ln_excess_ratio(p.y)).exp();
    Ok(p.x * prefactor * growth * (1.0 + 1.0 / s.exp_m1()) * inner.mu_star)
}

fn corollary_new_unchecked(r: f64) -> f64 {
    let ln_r = r.ln();
    ((1.8 + ln_r.ln()) / ln_r).exp() * r * ln_r
}

/// `e^{(1.8 + ln ln R)/ln R}·R·ln R`, valid for `R >= 6`.
pub fn corollary_bound_new(radius: u32) -> Result<f64> {
    if radius < 6 {
        return Err(Error::Usage(format!("requires R >= 6, got R = {radius}")));
    }
    Ok(corollary_new_unchecked(radius as f64))
}

/// `e·(R ln R + ln R + ln ln R + 2)` for `q = 2`, twice that for `q >= 3`.
pub fn corollary_bound_ksv(q: u32, radius: u32) -> Result<f64> {
    if q < 2 {
        return Err(Error::Usage(format!("requires q >= 2, got q = {q}")));
    }
    if radius < 3 {
        return Err(Error::Usage(format!("requires R >= 3, got R = {radius}")));
    }
    let r = radius as f64;
    let ln_r = r.ln();
    let binary = E * (r * ln_r + ln_r + ln_r.ln() + 2.0);
    Ok(if q == 2 { binary } else { 2.0 * binary })
}

/// `a/(1−b)`.
pub fn limit_lemma_bound(a: f64, b: f64) -> Result<f64> {
    if b.is_nan() || b >= 1.0 {
        return Err(Error::Usage(format!("requires b < 1, got b = {b}")));
    }
    Ok(a / (1.0 - b))
}

/// Relative tolerance on `t = R^{−2}` at the corollary's parameters; `x` is
/// of order `R·ln(R ln R)` so its rounding moves `t` by far less than this.
pub const FEASIBILITY_IDENTITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainStep {
    /// `t = R^{−2} < 1` at `y = R ln R + 1`, `x = R ln y + 2 ln R`.
    Feasibility,
    /// `(R ln(R ln R + 1) + 2 ln R)(1 + 1/(R²−1)) < R(ln R + ln ln R + 0.8)`.
    QuotedInequality,
    /// `(y/(y−1))^R <= e^{1/ln R}`.
    PowerBound,
    /// The two-parameter bound at the corollary's `(x, y)` is at most the
    /// corollary's closed form.
    FinalBound,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepCheck {
    pub step: ChainStep,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub radius: u32,
    pub steps: Vec<StepCheck>,
}

impl ChainReport {
    pub fn holds(&self) -> bool {
        self.steps.iter().all(|s| s.holds)
    }

    pub fn first_failure(&self) -> Option<ChainStep> {
        self.steps.iter().find(|s| !s.holds).map(|s| s.step)
    }
}

/// Evaluates each step of the argument that takes the two-parameter bound to
/// `e^{(1.8 + ln ln R)/ln R}·R·ln R`. Meaningful for `R >= 6`; smaller radii
/// (down to 2) are evaluated and reported the same way.
pub fn corollary2_chain_check(radius: u32) -> ChainReport {
    let r = radius.max(2) as f64;
    let ln_r = r.ln();
    let p = BoundParams::corollary(radius.max(2));

    let t = feasibility(&p);
    let target = r.powi(-2);
    let feasible = t < 1.0 && (t - target).abs() <= FEASIBILITY_IDENTITY_TOL * target;

    let quoted_lhs = (r * (r * ln_r + 1.0).ln() + 2.0 * ln_r) * (1.0 + 1.0 / (r * r - 1.0));
    let quoted_rhs = r * (ln_r + ln_r.ln() + 0.8);

    let power_lhs = (r * ln_excess_ratio(p.y)).exp();
    let power_rhs = (1.0 / ln_r).exp();

    let final_lhs = theorem1_bound(&p).unwrap_or(f64::INFINITY);
    let final_rhs = corollary_new_unchecked(r);

    let step = |step, lhs, rhs, holds| StepCheck {
        step,
        lhs,
        rhs,
        holds,
    };
    ChainReport {
        radius,
        steps: vec![
            step(ChainStep::Feasibility, t, target, feasible),
            step(
                ChainStep::QuotedInequality,
                quoted_lhs,
                quoted_rhs,
                quoted_lhs < quoted_rhs,
            ),
            step(
                ChainStep::PowerBound,
                power_lhs,
                power_rhs,
                power_lhs <= power_rhs,
            ),
            step(
                ChainStep::FinalBound,
                final_lhs,
                final_rhs,
                final_lhs <= final_rhs,
            ),
        ],
    }
}

/// Chain checks over `rmin..=rmax`. A finite sweep, not a proof.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainSweep {
    pub r_min: u32,
    pub r_max: u32,
    pub checked: usize,
    pub failures: Vec<ChainReport>,
}

impl ChainSweep {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn corollary2_chain_sweep(r_min: u32, r_max: u32) -> Result<ChainSweep> {
    if r_min < 2 || r_min > r_max {
        return Err(Error::Usage(format!(
            "requires 2 <= R-min <= R-max, got {r_min}..{r_max}"
        )));
    }
    let failures = (r_min..=r_max)
        .map(corollary2_chain_check)
        .filter(|rep| !rep.holds())
        .collect();
    Ok(ChainSweep {
        r_min,
        r_max,
        checked: (r_max - r_min + 1) as usize,
        failures,
    })
}

/// Minimizes `f` on `[a, b]`; stops once the bracket is narrower than
/// `rel_tol·max(1, |midpoint|)`. Returns `(argmin, min)`.
pub fn golden_section_min(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    rel_tol: f64,
    max_iter: usize,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..max_iter {
        if (b - a) <= rel_tol * (0.5 * (a + b)).abs().max(1.0) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Box searched by [`optimize_theorem1_in`]: `y ∈ (1 + 10^{−6}, y_max]` and
/// `x ∈ (R·ln y + 10^{−9}, R·ln y + x_span]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchRegion {
    pub y_max: f64,
    pub x_span: f64,
}

impl SearchRegion {
    pub fn for_radius(radius: u32) -> Self {
        let lr = (radius as f64 + 2.0).ln();
        Self {
            y_max: 10.0 * radius as f64 * lr + 10.0,
            x_span: 20.0 * lr,
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self {
            y_max: 1.0 + (self.y_max - 1.0) * factor,
            x_span: self.x_span * factor,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Optimum {
    pub x: f64,
    pub y: f64,
    pub bound: f64,
}

pub const OPTIMIZER_REL_TOL: f64 = 1e-10;
const Y_FLOOR: f64 = 1e-6;
const SLACK_FLOOR: f64 = 1e-9;
const OUTER_GRID: usize = 48;
const RESTARTS: usize = 3;

pub fn optimize_theorem1(radius: u32) -> Result<Optimum> {
    optimize_theorem1_in(radius, SearchRegion::for_radius(radius))
}

/// Nested golden-section search: outer over `u = ln(y−1)`, inner over the
/// slack `x − R·ln y`. The outer search restarts from the best few points of
/// a coarse grid and keeps the best result.
pub fn optimize_theorem1_in(radius: u32, region: SearchRegion) -> Result<Optimum> {
    if radius == 0 {
        return Err(Error::Usage("R must be >= 1".into()));
    }
    if !(region.y_max > 1.0 + Y_FLOOR && region.x_span > SLACK_FLOOR) {
        return Err(Error::Usage("empty search region".into()));
    }
    let r = radius as f64;
    let bound_at =
        |x: f64, y: f64| theorem1_bound(&BoundParams::new(radius, x, y)).unwrap_or(f64::INFINITY);
    let inner = |u: f64| {
        let y = 1.0 + u.exp();
        let base = r * y.ln();
        let (s, v) = golden_section_min(
            |s| bound_at(base + s, y),
            SLACK_FLOOR,
            region.x_span,
            OPTIMIZER_REL_TOL,
            400,
        );
        (base + s, y, v)
    };

    let (lo, hi) = (Y_FLOOR.ln(), (region.y_max - 1.0).ln());
    let step = (hi - lo) / (OUTER_GRID - 1) as f64;
    let grid: Vec<(f64, f64)> = (0..OUTER_GRID)
        .map(|i| {
            let u = lo + step * i as f64;
            (u, inner(u).2)
        })
        .collect();
    let mut order: Vec<usize> = (0..OUTER_GRID).collect();
    order.sort_by(|&i, &j| grid[i].1.total_cmp(&grid[j].1));

    let mut best: Option<Optimum> = None;
    for &i in order.iter().take(RESTARTS) {
        let a = grid[i.saturating_sub(1)].0;
        let b = grid[(i + 1).min(OUTER_GRID - 1)].0;
        let (u, _) = golden_section_min(|u| inner(u).2, a, b, OPTIMIZER_REL_TOL, 400);
        let (x, y, _) = inner(u);
        let candidate = Optimum {
            x,
            y,
            bound: bound_at(x, y),
        };
        if best.is_none_or(|b| candidate.bound < b.bound) {
            best = Some(candidate);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// `μ*_q(R₁)` used when none is supplied: 1 for `R₁ = 0`, otherwise the
/// optimized two-parameter bound at `R₁`.
pub fn default_inner_density(inner_radius: u32) -> Result<f64> {
    if inner_radius == 0 {
        Ok(1.0)
    } else {
        optimize_theorem1(inner_radius).map(|o| o.bound)
    }
}

pub type Sequence = Box<dyn Fn(usize) -> f64 + Send + Sync>;

/// `s_n = a_n + b_n·s_{⌊n/y⌋}` with `s_n = s_base` whenever `⌊n/y⌋ = 0`.
pub struct RecurrenceSpec {
    pub a_seq: Sequence,
    pub b_seq: Sequence,
    pub y: f64,
    pub s_base: f64,
    pub a_limit: f64,
    pub b_limit: f64,
}

impl RecurrenceSpec {
    pub fn constant(a: f64, b: f64, y: f64, s_base: f64) -> Self {
        Self {
            a_seq: Box::new(move |_| a),
            b_seq: Box::new(move |_| b),
            y,
            s_base,
            a_limit: a,
            b_limit: b,
        }
    }

    /// `a/(1−b)` for the limits.
    pub fn limit(&self) -> Result<f64> {
        limit_lemma_bound(self.a_limit, self.b_limit)
    }
}

/// `s_1, …, s_N` with the recurrence taken at equality.
pub fn simulate_recurrence(spec: &RecurrenceSpec, len: usize) -> Result<Vec<f64>> {
    if len == 0 {
        return Err(Error::Usage("N must be >= 1".into()));
    }
    if !(spec.y > 1.0 && spec.y.is_finite()) {
        return Err(Error::Usage(format!("requires y > 1, got y = {}", spec.y)));
    }
    let mut s = Vec::with_capacity(len);
    for n in 1..=len {
        let parent = (n as f64 / spec.y).floor() as usize;
        let value = if parent == 0 {
            spec.s_base
        } else {
            (spec.a_seq)(n) + (spec.b_seq)(n) * s[parent - 1]
        };
        s.push(value);
    }
    Ok(s)
}

/// Number of steps `n → ⌊n/y⌋` before the index drops below `y`. Equals
/// `⌊log_y n⌋` for integer `y`.
pub fn recursion_depth(n: usize, y: f64) -> u32 {
    let mut depth = 0;
    let mut k = n;
    loop {
        let parent = (k as f64 / y).floor() as usize;
        if parent == 0 {
            return depth;
        }
        k = parent;
        depth += 1;
    }
}

/// `b^{depth(n)}·(|s_base| + a/(1−b))`, the error of a constant-coefficient
/// recurrence after telescoping down to the seeded indices.
pub fn telescoped_error_bound(a: f64, b: f64, s_base: f64, y: f64, n: usize) -> Result<f64> {
    let limit = limit_lemma_bound(a, b)?;
    Ok(b.abs().powi(recursion_depth(n, y) as i32) * (s_base.abs() + limit))
}

/// The recurrence satisfied by `μ_q(n, R)` through the split construction:
/// `a_n = x·V(n)/V(r')`, `b_n = e^{−x + V(r')/q^{r'}}·V(n)/V(r)` with
/// `r = ⌊n/y⌋`, `r' = n − r`; limits `a = x·(y/(y−1))^R`, `b = e^{−x}·y^R`.
pub fn construction_recurrence(q: u32, radius: u32, x: f64, y: f64) -> Result<RecurrenceSpec> {
    if q < 2 {
        return Err(Error::Usage(format!("requires q >= 2, got q = {q}")));
    }
    let p = BoundParams::new(radius, x, y);
    let s = check_feasible(&p)?;
    let rad = radius as usize;
    let ln_q = (q as f64).ln();
    let split = move |n: usize| {
        let r = (n as f64 / y).floor() as usize;
        (r, n - r)
    };
    let a_seq = move |n: usize| {
        let (_, rp) = split(n);
        x * (ln_ball_volume(q, n, rad) - ln_ball_volume(q, rp, rad)).exp()
    };
    let b_seq = move |n: usize| {
        let (r, rp) = split(n);
        let fill = (ln_ball_volume(q, rp, rad) - rp as f64 * ln_q).exp();
        (-x + fill + ln_ball_volume(q, n, rad) - ln_ball_volume(q, r, rad)).exp()
    };
    Ok(RecurrenceSpec {
        a_seq: Box::new(a_seq),
        b_seq: Box::new(b_seq),
        y,
        s_base: 1.0,
        a_limit: x * (radius as f64 * ln_excess_ratio(y)).exp(),
        b_limit: (-s).exp(),
    })
}

pub const CSV_HEADER: &str =
    "R,t_feas,x_opt,y_opt,bound_opt,cor_new,cor_ksv_q2,cor_ksv_q3,ratio_new_over_ksv2";

/// One line of the bound table. Corollary columns are `None` below their
/// validity range.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRow {
    pub radius: u32,
    pub t_feas: f64,
    pub x_opt: f64,
    pub y_opt: f64,
    pub bound_opt: f64,
    pub cor_new: Option<f64>,
    pub cor_ksv_q2: Option<f64>,
    pub cor_ksv_q3: Option<f64>,
    pub ratio_new_over_ksv2: Option<f64>,
}

pub fn bound_row(radius: u32) -> Result<BoundRow> {
    let opt = optimize_theorem1(radius)?;
    let cor_new = corollary_bound_new(radius).ok();
    let cor_ksv_q2 = corollary_bound_ksv(2, radius).ok();
    let cor_ksv_q3 = corollary_bound_ksv(3, radius).ok();
    Ok(BoundRow {
        radius,
        t_feas: feasibility(&BoundParams::new(radius, opt.x, opt.y)),
        x_opt: opt.x,
        y_opt: opt.y,
        bound_opt: opt.bound,
        cor_new,
        cor_ksv_q2,
        cor_ksv_q3,
        ratio_new_over_ksv2: cor_new.zip(cor_ksv_q2).map(|(a, b)| a / b),
    })
}

pub fn bound_table(r_min: u32, r_max: u32) -> Result<Vec<BoundRow>> {
    if r_min == 0 || r_min > r_max {
        return Err(Error::Usage(format!(
            "requires 1 <= R-min <= R-max, got {r_min}..{r_max}"
        )));
    }
    (r_min..=r_max).map(bound_row).collect()
}

/// 17 significant digits, `.` as decimal separator.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_bound_csv<W: Write>(rows: &[BoundRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    let opt = |v: Option<f64>| v.map(format_real).unwrap_or_default();
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.radius,
            format_real(row.t_feas),
            format_real(row.x_opt),
            format_real(row.y_opt),
            format_real(row.bound_opt),
            opt(row.cor_new),
            opt(row.cor_ksv_q2),
            opt(row.cor_ksv_q3),
            opt(row.ratio_new_over_ksv2),
        )?;
    }
    Ok(())
}
