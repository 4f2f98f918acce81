//! Tower-schedule builders.
//!
//! A schedule is built one step at a time: step `n` turns the level box
//! `F_n` into a translation set `C_{n+1}` and the next box `F_{n+1}`. This
//! module provides three builders with different long-run behaviour, plus
//! the statistical and exact machinery they share:
//!
//! - [`build_mixing`]: every step draws a *stochastic spacer map* over an
//!   index grid, certified by the window test of [`deljunco_spacer`], and
//!   places `C_{n+1} = { s(h)·φ(h) }` on a lattice embedding `φ`. The
//!   spacers equidistribute translate pairs; the certificate and an exact
//!   quadrature figure are recorded per step.
//! - [`build_infinite`]: purely central translation sets at Sidon-spaced
//!   multiples of a separation step `Δ_n`, with level boxes growing fast
//!   enough that the invariant measure is infinite (σ-finite). The
//!   sufficient separation conditions are re-checkable with
//!   [`check_separation`].
//! - [`build_asymmetric`]: every third step lays down `2n+1` central
//!   fibers whose inter-fiber gaps follow the period-5 pattern
//!   `0,1,1,2,2`; the remaining steps are small stochastic steps. The
//!   periodic gaps break time symmetry in higher-order correlations.
//!
//! All geometry is exact rational arithmetic; randomness is confined to
//! spacer-map draws and test-family sampling, both driven by seeded
//! `ChaCha8` streams so every build is reproducible bit for bit.

use std::collections::{BTreeMap, BTreeSet};

use num::traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cf::{Schedule, ScheduleKind, StepAnnotation};
use crate::error::{Error, Result};
use crate::folner::{lattice_embed, BoxParams};
use crate::group::GroupElement;
use crate::mc::random_sub_box;
use crate::rat::{rat_abs, rat_ceil, rat_int, rat_max, rat_to_f64, Rat};
use crate::region::BishearBox;

/// Number of windows sampled per spacer-map draw in [`deljunco_spacer`].
pub const DELJUNCO_WINDOWS: usize = 8;

/// Default number of fresh map draws before giving up.
pub const DELJUNCO_DEFAULT_RETRY: u32 = 16;

/// Stride constant mixed into a base seed to derive per-step seeds.
const LEVEL_SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Salt separating quadrature sampling from spacer-map sampling.
const QUAD_SEED_SALT: u64 = 0x71AD_5EED_0F2C_4B61;

/// Cap on the number of comb pairs evaluated exactly in one quadrature
/// average; denser combs are strided down to this budget.
const QUAD_PAIR_CAP: usize = 1 << 16;

/// Derives the seed for construction step `n` from the run seed.
pub fn level_seed(seed: u64, n: usize) -> u64 {
    seed.wrapping_add((n as u64).wrapping_mul(LEVEL_SEED_STRIDE))
}

// ---------------------------------------------------------------------------
// Spacer maps
// ---------------------------------------------------------------------------

/// A spacer assignment on the index grid `|h1| ≤ w1, |h2| ≤ w2, |h3| ≤ r`
/// that depends on the third coordinate only.
///
/// The type stores one value per `h3` and evaluates every `(h1, h2, h3)`
/// through that line, so the "third coordinate only" property is upheld by
/// construction rather than checked after the fact.
#[derive(Clone, Debug, PartialEq)]
pub struct SpacerMap {
    half_widths: [i64; 3],
    line: Vec<GroupElement>,
}

impl SpacerMap {
    /// Builds a map from the value line indexed by `h3 + r`.
    pub fn from_line(half_widths: [i64; 3], line: Vec<GroupElement>) -> Result<SpacerMap> {
        let [w1, w2, r] = half_widths;
        if w1 < 0 || w2 < 0 || r < 0 {
            return Err(Error::Config(format!(
                "spacer-map half-widths must be non-negative, got ({w1}, {w2}, {r})"
            )));
        }
        let expected = (2 * r + 1) as usize;
        if line.len() != expected {
            return Err(Error::Config(format!(
                "spacer-map line needs {expected} values for half-width {r}, got {}",
                line.len()
            )));
        }
        Ok(SpacerMap { half_widths, line })
    }

    /// Inclusive index half-widths `(w1, w2, r)` of the domain grid.
    pub fn half_widths(&self) -> [i64; 3] {
        self.half_widths
    }

    /// The stored value line, indexed by `h3 + r`.
    pub fn line(&self) -> &[GroupElement] {
        &self.line
    }

    /// The value at a grid point; the first two coordinates are
    /// bounds-checked but otherwise ignored.
    pub fn value(&self, h: (i64, i64, i64)) -> Result<&GroupElement> {
        let [w1, w2, r] = self.half_widths;
        let (h1, h2, h3) = h;
        if h1.abs() > w1 || h2.abs() > w2 || h3.abs() > r {
            return Err(Error::Config(format!(
                "spacer-map index ({h1}, {h2}, {h3}) outside grid ({w1}, {w2}, {r})"
            )));
        }
        Ok(&self.line[(h3 + r) as usize])
    }
}

// ---------------------------------------------------------------------------
// Combs and quadrature
// ---------------------------------------------------------------------------

/// The centered comb inside `I(α,β,γ)` with `2d_i + 1` equally spaced
/// values per axis: coordinate `i` runs over `half_i · k / d_i` for
/// `k = -d_i ..= d_i` (a single zero when `d_i = 0`), assembled in
/// lexicographic `(v1, v2, v3)` order as canonical-coordinate elements.
pub fn comb_points(s_box: &BoxParams, d: [i64; 3]) -> Vec<GroupElement> {
    let axis = |half: &Rat, count: i64| -> Vec<Rat> {
        if count == 0 {
            return vec![Rat::zero()];
        }
        (-count..=count)
            .map(|k| half * rat_int(k) / rat_int(count))
            .collect()
    };
    let v1 = axis(&s_box.alpha, d[0]);
    let v2 = axis(&s_box.beta, d[1]);
    let v3 = axis(&s_box.gamma, d[2]);
    let mut out = Vec::with_capacity(v1.len() * v2.len() * v3.len());
    for x1 in &v1 {
        for x2 in &v2 {
            for x3 in &v3 {
                out.push(GroupElement::new(x1.clone(), x2.clone(), x3.clone()));
            }
        }
    }
    out
}

/// A comb together with the quadrature gap it achieved on a sampled family
/// of correlation kernels.
#[derive(Clone, Debug, Serialize)]
pub struct QuadratureSet {
    /// The comb points (all inside the sampling box).
    pub points: Vec<GroupElement>,
    /// Worst observed gap between the comb average and the average of the
    /// density-doubled comb, over the sampled kernel family. Exact.
    #[serde(with = "crate::rat::serde_rat")]
    pub achieved_error: Rat,
}

/// Averages `f(x, y) = λ(Ax ∩ By) / λ(F)` over `points × points`, walking
/// the pair list with a stride when it exceeds [`QUAD_PAIR_CAP`].
fn comb_pair_average(
    a: &BishearBox,
    b: &BishearBox,
    f_volume: &Rat,
    points: &[GroupElement],
) -> Rat {
    let total = points.len() * points.len();
    let stride = total.div_ceil(QUAD_PAIR_CAP).max(1);
    let mut sum = Rat::zero();
    let mut used = 0i64;
    let mut idx = 0usize;
    while idx < total {
        let x = &points[idx / points.len()];
        let y = &points[idx % points.len()];
        sum += a.right_translate(x).intersect_volume(&b.right_translate(y));
        used += 1;
        idx += stride;
    }
    sum / (rat_int(used) * f_volume)
}

/// Builds the comb with half-counts `d` inside `s_box` and measures, in
/// exact arithmetic, how far its average of the kernel
/// `f(x, y) = λ(Ax ∩ By)/λ(F)` is from the average of the density-doubled
/// comb, over `pairs` seeded random sub-box pairs `(A, B)` of the level
/// box. The worst gap across the family is the `achieved_error`: a
/// Cauchy-style convergence figure for the comb as a quadrature rule.
pub fn quadrature_set(
    f_box: &BoxParams,
    s_box: &BoxParams,
    d: [i64; 3],
    pairs: u32,
    seed: u64,
) -> QuadratureSet {
    let points = comb_points(s_box, d);
    let doubled = comb_points(s_box, [2 * d[0], 2 * d[1], 2 * d[2]]);
    let outer = f_box.region();
    let f_volume = f_box.volume();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = Rat::zero();
    for _ in 0..pairs.max(1) {
        let a = random_sub_box(&outer, &mut rng);
        let b = random_sub_box(&outer, &mut rng);
        let coarse = comb_pair_average(&a, &b, &f_volume, &points);
        let fine = comb_pair_average(&a, &b, &f_volume, &doubled);
        worst = rat_max(&worst, &rat_abs(&(coarse - fine)));
    }
    QuadratureSet {
        points,
        achieved_error: worst,
    }
}

// ---------------------------------------------------------------------------
// Spacer-map generation and verification
// ---------------------------------------------------------------------------

/// Outcome of a spacer-map generation run.
#[derive(Clone, Debug, Serialize)]
pub struct DelJuncoReport {
    /// Size of the value alphabet.
    pub d_size: usize,
    /// Inclusive half-width of the index line (domain is `-r ..= r`).
    pub r: i64,
    /// Tolerance every window had to meet.
    pub epsilon: f64,
    /// Minimum window length as a fraction of `r`.
    pub delta: f64,
    /// Joint order: how many shifted copies are compared at once.
    pub order: usize,
    /// Number of windows sampled per attempt.
    pub windows_per_attempt: usize,
    /// Number of map draws until acceptance (0 when no draw was needed).
    pub attempts: u32,
    /// Worst window distance of the accepted map.
    pub worst_distance: f64,
    /// Whether every window met the tolerance.
    pub passed: bool,
}

/// Worst L1 distance to the uniform joint distribution over sampled
/// windows. Each window picks a length `n_len` uniform in
/// `[⌊delta·r⌋ + 1, r]` and `order_k` distinct offsets `h` with the whole
/// window `h .. h + n_len` inside `[-r, r]`, then compares the empirical
/// distribution of the tuples `(map[h_1 + t], …, map[h_k + t])` against
/// the uniform distribution on `d_size^k` cells.
fn window_statistic(
    map: &[usize],
    d_size: usize,
    r: i64,
    delta: f64,
    order_k: usize,
    rng: &mut ChaCha8Rng,
    windows: usize,
) -> f64 {
    let n_lo = ((delta * r as f64).floor() as i64 + 1).min(r);
    let cells_total = (d_size as u128).pow(order_k as u32) as f64;
    let mut worst = 0.0f64;
    for _ in 0..windows {
        let n_len = rng.gen_range(n_lo..=r);
        let h_hi = r - n_len + 1;
        let mut offs: BTreeSet<i64> = BTreeSet::new();
        while offs.len() < order_k {
            offs.insert(rng.gen_range(-r..=h_hi));
        }
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for t in 0..n_len {
            let mut key = 0u64;
            for &h in &offs {
                key = key * d_size as u64 + map[(h + t + r) as usize] as u64;
            }
            *counts.entry(key).or_insert(0) += 1;
        }
        let uniform = 1.0 / cells_total;
        let n_f = n_len as f64;
        let mut dist = 0.0f64;
        for &cnt in counts.values() {
            dist += (cnt as f64 / n_f - uniform).abs();
        }
        dist += (cells_total - counts.len() as f64) * uniform;
        worst = worst.max(dist);
    }
    worst
}

/// Draws an i.i.d.-uniform spacer map on the index line `-r ..= r` over an
/// alphabet of `d_size` values and accepts it once every sampled window
/// passes the joint-equidistribution test; redraws on failure.
///
/// Returns the accepted map (as alphabet indices, position `t` stored at
/// `t + r`) and the report. Fails with
/// [`Error::GenerationFailed`] — carrying the best statistic seen — when
/// `retry_budget` fresh draws all miss the tolerance. The whole procedure
/// is a deterministic function of its arguments: attempt `i` uses stream
/// `i` of a `ChaCha8` generator seeded with `seed`.
pub fn deljunco_spacer(
    d_size: usize,
    r: i64,
    epsilon: f64,
    delta: f64,
    order_k: usize,
    seed: u64,
    retry_budget: u32,
) -> Result<(Vec<usize>, DelJuncoReport)> {
    if d_size == 0 {
        return Err(Error::Config("spacer alphabet is empty".into()));
    }
    if r < 1 {
        return Err(Error::Config(format!("index half-width must be ≥ 1, got {r}")));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::Config(format!("tolerance must be positive, got {epsilon}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Config(format!(
            "window fraction must lie strictly between 0 and 1, got {delta}"
        )));
    }
    if order_k < 2 {
        return Err(Error::Config(format!("joint order must be ≥ 2, got {order_k}")));
    }
    if order_k as i64 > r + 1 {
        return Err(Error::Config(format!(
            "joint order {order_k} needs more distinct offsets than the line of half-width {r} supports"
        )));
    }
    if retry_budget == 0 {
        return Err(Error::Config("retry budget must be ≥ 1".into()));
    }
    if (d_size as u128).checked_pow(order_k as u32).is_none_or(|c| c > 1 << 62) {
        return Err(Error::Config(format!(
            "joint alphabet {d_size}^{order_k} too large to tabulate"
        )));
    }
    let domain_len = (2 * r + 1) as usize;
    if d_size == 1 {
        // One-letter alphabet: the only map is exactly uniform.
        let report = DelJuncoReport {
            d_size,
            r,
            epsilon,
            delta,
            order: order_k,
            windows_per_attempt: DELJUNCO_WINDOWS,
            attempts: 0,
            worst_distance: 0.0,
            passed: true,
        };
        return Ok((vec![0; domain_len], report));
    }
    let mut best = f64::INFINITY;
    for attempt in 0..retry_budget {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt as u64);
        let map: Vec<usize> = (0..domain_len).map(|_| rng.gen_range(0..d_size)).collect();
        let worst = window_statistic(&map, d_size, r, delta, order_k, &mut rng, DELJUNCO_WINDOWS);
        if worst < epsilon {
            let report = DelJuncoReport {
                d_size,
                r,
                epsilon,
                delta,
                order: order_k,
                windows_per_attempt: DELJUNCO_WINDOWS,
                attempts: attempt + 1,
                worst_distance: worst,
                passed: true,
            };
            return Ok((map, report));
        }
        best = best.min(worst);
    }
    Err(Error::GenerationFailed {
        attempts: retry_budget as usize,
        best_stat: best,
        tolerance: epsilon,
    })
}

// ---------------------------------------------------------------------------
// Step dimensions and build configurations
// ---------------------------------------------------------------------------

/// Index-grid and comb dimensions of one stochastic step.
///
/// `(w1, w2, r)` are inclusive half-widths of the fiber grid `H_n`; the
/// grid has `(2w1+1)(2w2+1)(2r+1)` points. `(d1, d2, d3)` are comb
/// half-counts inside the spacer box. The byte-size-faithful growth rule
/// (half-width `n³ - 1` in the first two indices, mirroring a strict
/// `|t| < n³` cutoff, and a geometric third half-width) is available via
/// [`StepDims::faithful`]; the desk-scale values used by tests and
/// defaults keep every figure exactly computable in seconds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StepDims {
    /// Inclusive half-width of the fiber grid in the first index.
    pub w1: i64,
    /// Inclusive half-width of the fiber grid in the second index.
    pub w2: i64,
    /// Inclusive half-width of the fiber grid in the third index.
    pub r: i64,
    /// Comb half-count along the first axis.
    pub d1: i64,
    /// Comb half-count along the second axis.
    pub d2: i64,
    /// Comb half-count along the third axis.
    pub d3: i64,
}

impl Default for StepDims {
    fn default() -> Self {
        StepDims::desk_mixing()
    }
}

impl StepDims {
    /// Desk-scale mixing step: 45 fibers, 27 comb points.
    pub fn desk_mixing() -> StepDims {
        StepDims {
            w1: 1,
            w2: 1,
            r: 2,
            d1: 1,
            d2: 1,
            d3: 1,
        }
    }

    /// Desk-scale central step: 5 fibers on the central axis, 5 central
    /// comb points.
    pub fn desk_central() -> StepDims {
        StepDims {
            w1: 0,
            w2: 0,
            r: 2,
            d1: 0,
            d2: 0,
            d3: 2,
        }
    }

    /// Full-scale growth rule for step `n`: fiber half-widths `n³ - 1` in
    /// the first two indices (the strict cutoff `|t| < n³`), third
    /// half-width `4ⁿ·r0 - 1` (a geometric rate; the base is this crate's
    /// recorded choice), comb half-counts `n²`. Values are clamped to
    /// stay usable at `n = 0`.
    pub fn faithful(n: u32, r0: i64) -> StepDims {
        let w = (i64::from(n).pow(3) - 1).max(0);
        let r = (4i64.pow(n) * r0 - 1).max(1);
        let d = i64::from(n).pow(2).max(1);
        StepDims {
            w1: w,
            w2: w,
            r,
            d1: d,
            d2: d,
            d3: d,
        }
    }

    /// Number of fiber-grid points.
    pub fn grid_count(&self) -> usize {
        ((2 * self.w1 + 1) * (2 * self.w2 + 1) * (2 * self.r + 1)) as usize
    }

    /// Number of comb points.
    pub fn comb_count(&self) -> usize {
        ((2 * self.d1 + 1) * (2 * self.d2 + 1) * (2 * self.d3 + 1)) as usize
    }

    fn check(&self) -> Result<()> {
        if self.w1 < 0 || self.w2 < 0 || self.d1 < 0 || self.d2 < 0 || self.d3 < 0 {
            return Err(Error::Config(format!("step dimensions must be non-negative: {self:?}")));
        }
        if self.r < 1 {
            return Err(Error::Config(format!(
                "third fiber half-width must be ≥ 1, got {}",
                self.r
            )));
        }
        Ok(())
    }
}

fn default_rat_one() -> Rat {
    rat_int(1)
}

/// Configuration of [`build_mixing`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MixingConfig {
    /// Number of construction steps.
    pub levels: usize,
    /// Half-width of the root box in the first two coordinates.
    #[serde(with = "crate::rat::serde_rat")]
    pub alpha0: Rat,
    /// Half-width of the root box in the third coordinate.
    #[serde(with = "crate::rat::serde_rat")]
    pub gamma0: Rat,
    /// Per-step dimensions; the last entry repeats when fewer entries than
    /// steps are given.
    pub dims: Vec<StepDims>,
    /// Window tolerance for the spacer-map certificate.
    pub epsilon: f64,
    /// Minimum window length as a fraction of the index half-width.
    pub delta: f64,
    /// Joint order of the window test.
    pub order_k: usize,
    /// Fresh map draws before a step fails.
    pub retry_budget: u32,
    /// Run seed; step `n` derives its own stream from it.
    pub seed: u64,
    /// Sub-box pairs sampled for the per-step quadrature figure.
    pub quad_pairs: u32,
    /// Control mode: replace the stochastic map by the constant center
    /// value. The window statistic is still measured and recorded, but
    /// acceptance is not required. Useful as a negative control for
    /// mixing diagnostics.
    pub constant_spacer: bool,
}

impl Default for MixingConfig {
    fn default() -> Self {
        MixingConfig {
            levels: 3,
            alpha0: default_rat_one(),
            gamma0: default_rat_one(),
            dims: vec![StepDims::desk_mixing()],
            epsilon: 2.0,
            delta: 0.25,
            order_k: 2,
            retry_budget: DELJUNCO_DEFAULT_RETRY,
            seed: 7,
            quad_pairs: 1,
            constant_spacer: false,
        }
    }
}

/// Configuration of [`build_asymmetric`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AsymmetricConfig {
    /// Number of construction steps. Periodic central steps happen at step
    /// indices divisible by 3 (except step 0); all other steps are
    /// stochastic.
    pub levels: usize,
    /// Half-width of the root box in the first two coordinates.
    #[serde(with = "crate::rat::serde_rat")]
    pub alpha0: Rat,
    /// Half-width of the root box in the third coordinate.
    #[serde(with = "crate::rat::serde_rat")]
    pub gamma0: Rat,
    /// Round every new third half-width up to an integer, keeping all
    /// central offsets integral.
    pub gamma_integer: bool,
    /// Dimensions of the stochastic steps.
    pub stochastic_dims: StepDims,
    /// Window tolerance for the spacer-map certificate.
    pub epsilon: f64,
    /// Minimum window length as a fraction of the index half-width.
    pub delta: f64,
    /// Joint order of the window test.
    pub order_k: usize,
    /// Fresh map draws before a step fails.
    pub retry_budget: u32,
    /// Run seed; step `n` derives its own stream from it.
    pub seed: u64,
    /// Sub-box pairs sampled for the per-step quadrature figure.
    pub quad_pairs: u32,
}

impl Default for AsymmetricConfig {
    fn default() -> Self {
        AsymmetricConfig {
            levels: 11,
            alpha0: default_rat_one(),
            gamma0: default_rat_one(),
            gamma_integer: true,
            stochastic_dims: StepDims::desk_central(),
            epsilon: 2.0,
            delta: 0.25,
            order_k: 2,
            retry_budget: DELJUNCO_DEFAULT_RETRY,
            seed: 7,
            quad_pairs: 1,
        }
    }
}

/// Configuration of [`build_infinite`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InfiniteConfig {
    /// Number of construction steps.
    pub levels: usize,
    /// Half-width of the root box in the first two coordinates.
    #[serde(with = "crate::rat::serde_rat")]
    pub alpha0: Rat,
    /// Half-width of the root box in the third coordinate.
    #[serde(with = "crate::rat::serde_rat")]
    pub gamma0: Rat,
}

impl Default for InfiniteConfig {
    fn default() -> Self {
        InfiniteConfig {
            levels: 6,
            alpha0: default_rat_one(),
            gamma0: default_rat_one(),
        }
    }
}

// ---------------------------------------------------------------------------
// Stochastic steps
// ---------------------------------------------------------------------------

/// Everything one stochastic step produces.
struct StochasticStep {
    cset: Vec<GroupElement>,
    next_f: BoxParams,
    /// Envelope parameters of `F_n · S_n`; the lattice embedding of this
    /// step, and the spacer box of the next one, both derive from it.
    tilde: BoxParams,
    annotation: StepAnnotation,
}

/// Shared knobs of a stochastic step.
struct StochasticKnobs {
    epsilon: f64,
    delta: f64,
    order_k: usize,
    retry_budget: u32,
    quad_pairs: u32,
    constant_spacer: bool,
    round_gamma: bool,
}

/// Runs stochastic step `n`: draws a certified spacer map over the fiber
/// grid, assembles `C_{n+1} = { s(h)·φ(h) }` with `φ` the lattice
/// embedding of the `F_n · S_n` envelope, and bounds the next level box
/// around the actual translates plus a top margin of one previous
/// half-height (the margin keeps central diagnostic translates inside the
/// box two levels up).
fn stochastic_step(
    n: usize,
    f_n: &BoxParams,
    carry: &BoxParams,
    dims: &StepDims,
    knobs: &StochasticKnobs,
    seed: u64,
) -> Result<StochasticStep> {
    dims.check()?;
    let scale = rat_int(2 * n as i64 + 1);
    let s_box = BoxParams::new(
        &scale * &carry.alpha,
        &scale * &carry.beta,
        &scale * &carry.gamma,
    );
    let comb = comb_points(&s_box, [dims.d1, dims.d2, dims.d3]);
    let d_size = comb.len();

    let (map, attempts, pair_distance) = if knobs.constant_spacer {
        // Center value everywhere; measure the (poor) statistic honestly.
        let map = vec![d_size / 2; (2 * dims.r + 1) as usize];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(0);
        for _ in 0..map.len() {
            // Burn the draws a fresh map would have used, so the window
            // sample matches the stochastic path exactly.
            let _ = rng.gen_range(0..d_size.max(2));
        }
        let worst = window_statistic(
            &map,
            d_size,
            dims.r,
            knobs.delta,
            knobs.order_k,
            &mut rng,
            DELJUNCO_WINDOWS,
        );
        (map, 0u32, worst)
    } else {
        let (map, report) = deljunco_spacer(
            d_size,
            dims.r,
            knobs.epsilon,
            knobs.delta,
            knobs.order_k,
            seed,
            knobs.retry_budget,
        )?;
        (map, report.attempts, report.worst_distance)
    };

    let line: Vec<GroupElement> = map.iter().map(|&i| comb[i].clone()).collect();
    let spacer = SpacerMap::from_line([dims.w1, dims.w2, dims.r], line)?;

    // Envelope of F_n · S_n: half-widths add; the third picks up the
    // first-by-second shear term.
    let tilde = BoxParams::new(
        &f_n.alpha + &s_box.alpha,
        &f_n.beta + &s_box.beta,
        &f_n.gamma + &s_box.gamma + &f_n.alpha * &s_box.beta,
    );

    let mut cset = Vec::with_capacity(dims.grid_count());
    for h1 in -dims.w1..=dims.w1 {
        for h2 in -dims.w2..=dims.w2 {
            for h3 in -dims.r..=dims.r {
                let phi = lattice_embed(&tilde, (h1, h2, h3));
                cset.push(spacer.value((h1, h2, h3))?.mul(&phi));
            }
        }
    }

    // Bound the next box around the actual translates, in each coordinate.
    let f_region = f_n.region();
    let mut a1 = Rat::zero();
    let mut a2 = Rat::zero();
    let mut g3 = Rat::zero();
    for c in &cset {
        for corner in f_region.right_translate(c).corners() {
            a1 = rat_max(&a1, &rat_abs(&corner.t1));
            a2 = rat_max(&a2, &rat_abs(&corner.t2));
            g3 = rat_max(&g3, &rat_abs(&corner.t3));
        }
    }
    let mut gamma_next = &g3 + &f_n.gamma;
    if knobs.round_gamma {
        gamma_next = rat_ceil(&gamma_next);
    }
    let next_f = BoxParams::new(a1, a2, gamma_next);

    let quad = quadrature_set(
        f_n,
        &s_box,
        [dims.d1, dims.d2, dims.d3],
        knobs.quad_pairs,
        seed ^ QUAD_SEED_SALT,
    );

    let annotation = StepAnnotation::Stochastic {
        phi: tilde.clone(),
        s_box,
        h_dims: [dims.w1, dims.w2, dims.r],
        d_dims: [dims.d1, dims.d2, dims.d3],
        pair_distance,
        attempts,
        quad_error: rat_to_f64(&quad.achieved_error),
    };

    Ok(StochasticStep {
        cset,
        next_f,
        tilde,
        annotation,
    })
}

/// Builds a finite-measure tower whose every step is stochastic.
///
/// Step `n` samples its spacer box as `2n+1` times the previous step's
/// envelope box (the root box at step 0), draws a certified spacer map
/// over the fiber grid, and records the certificate plus an exact
/// quadrature figure in the step annotation.
pub fn build_mixing(cfg: &MixingConfig) -> Result<Schedule> {
    if cfg.levels == 0 {
        return Err(Error::Config("a build needs at least one step".into()));
    }
    if cfg.dims.is_empty() {
        return Err(Error::Config("at least one step-dimension entry is required".into()));
    }
    let knobs = StochasticKnobs {
        epsilon: cfg.epsilon,
        delta: cfg.delta,
        order_k: cfg.order_k,
        retry_budget: cfg.retry_budget,
        quad_pairs: cfg.quad_pairs,
        constant_spacer: cfg.constant_spacer,
        round_gamma: false,
    };
    let root = BoxParams::new(cfg.alpha0.clone(), cfg.alpha0.clone(), cfg.gamma0.clone());
    let mut f = vec![root.clone()];
    let mut c = Vec::with_capacity(cfg.levels);
    let mut annotations = Vec::with_capacity(cfg.levels);
    let mut carry = root;
    for n in 0..cfg.levels {
        let dims = cfg.dims[n.min(cfg.dims.len() - 1)];
        let step = stochastic_step(n, &f[n], &carry, &dims, &knobs, level_seed(cfg.seed, n))?;
        c.push(step.cset);
        annotations.push(step.annotation);
        f.push(step.next_f);
        carry = step.tilde;
    }
    Schedule::from_parts(ScheduleKind::Mixing, f, c, annotations)
}

// ---------------------------------------------------------------------------
// Period-5 asymmetric towers
// ---------------------------------------------------------------------------

/// The period-5 gap pattern between consecutive central fibers.
pub const PERIODIC_PATTERN: [i64; 5] = [0, 1, 1, 2, 2];

/// Gap inserted above fiber `j` (between fibers `j` and `j + 1`).
pub fn periodic_increment(j: i64) -> i64 {
    PERIODIC_PATTERN[j.rem_euclid(5) as usize]
}

/// Cumulative central offsets for fibers `lo ..= hi`, anchored at
/// `off(0) = 0` with `off(j+1) - off(j) = 2γ + increment(j)`.
pub fn periodic_offsets(lo: i64, hi: i64, gamma: &Rat) -> Vec<(i64, Rat)> {
    assert!(lo <= hi, "offset range is empty: {lo} > {hi}");
    let two_gamma = rat_int(2) * gamma;
    let mut off = BTreeMap::new();
    off.insert(0i64, Rat::zero());
    let mut acc = Rat::zero();
    for j in 0..hi.max(0) {
        acc = &acc + &two_gamma + rat_int(periodic_increment(j));
        off.insert(j + 1, acc.clone());
    }
    acc = Rat::zero();
    for j in (lo.min(0)..0).rev() {
        acc = &acc - &two_gamma - rat_int(periodic_increment(j));
        off.insert(j, acc.clone());
    }
    (lo..=hi).map(|j| (j, off[&j].clone())).collect()
}

/// Builds a finite-measure tower with time-asymmetric higher-order
/// correlations: step indices divisible by 3 (except 0) lay down `2n+1`
/// central fibers at cumulative period-5 gaps over a minimal box; every
/// other step is a small stochastic step.
pub fn build_asymmetric(cfg: &AsymmetricConfig) -> Result<Schedule> {
    if cfg.levels == 0 {
        return Err(Error::Config("a build needs at least one step".into()));
    }
    let knobs = StochasticKnobs {
        epsilon: cfg.epsilon,
        delta: cfg.delta,
        order_k: cfg.order_k,
        retry_budget: cfg.retry_budget,
        quad_pairs: cfg.quad_pairs,
        constant_spacer: false,
        round_gamma: cfg.gamma_integer,
    };
    let root = BoxParams::new(cfg.alpha0.clone(), cfg.alpha0.clone(), cfg.gamma0.clone());
    let mut f = vec![root.clone()];
    let mut c = Vec::with_capacity(cfg.levels);
    let mut annotations = Vec::with_capacity(cfg.levels);
    let mut carry = root;
    for n in 0..cfg.levels {
        if n > 0 && n % 3 == 0 {
            let jn = n as i64;
            let offsets = periodic_offsets(-jn, jn, &f[n].gamma);
            let cset: Vec<GroupElement> =
                offsets.iter().map(|(_, off)| GroupElement::c(off.clone())).collect();
            let mut bound = Rat::zero();
            for (_, off) in &offsets {
                bound = rat_max(&bound, &rat_abs(off));
            }
            // Minimal: the box ends exactly at the outermost fiber face.
            let mut gamma_next = &bound + &f[n].gamma;
            if cfg.gamma_integer {
                gamma_next = rat_ceil(&gamma_next);
            }
            let next_f = BoxParams::new(f[n].alpha.clone(), f[n].beta.clone(), gamma_next);
            annotations.push(StepAnnotation::CentralPeriodic {
                phi: f[n].clone(),
                index_lo: -jn,
                index_hi: jn,
            });
            c.push(cset);
            carry = next_f.clone();
            f.push(next_f);
        } else {
            let step = stochastic_step(
                n,
                &f[n],
                &carry,
                &cfg.stochastic_dims,
                &knobs,
                level_seed(cfg.seed, n),
            )?;
            c.push(step.cset);
            annotations.push(step.annotation);
            f.push(step.next_f);
            carry = step.tilde;
        }
    }
    Schedule::from_parts(ScheduleKind::Asymmetric, f, c, annotations)
}

// ---------------------------------------------------------------------------
// Infinite-measure towers
// ---------------------------------------------------------------------------

/// Greedy Sidon-set prefix starting at 0: each next integer is the
/// smallest that keeps all pairwise sums (equivalently all pairwise
/// differences) distinct.
pub fn mian_chowla(len: usize) -> Vec<i64> {
    let mut seq: Vec<i64> = Vec::with_capacity(len);
    let mut sums: BTreeSet<i64> = BTreeSet::new();
    let mut cand = 0i64;
    while seq.len() < len {
        let fresh = seq.iter().all(|s| !sums.contains(&(cand + s))) && !sums.contains(&(2 * cand));
        if fresh {
            for s in &seq {
                sums.insert(cand + s);
            }
            sums.insert(2 * cand);
            seq.push(cand);
        }
        cand += 1;
    }
    seq
}

/// Builds a tower whose invariant measure is infinite: every translation
/// set is central, placed at Sidon multiples of a separation step
/// `Δ_n = 4γ_n + 4α_n² + 1` (strictly larger than the extent of the
/// difference envelope `F_n·F_n⁻¹`), with `#C_{n+1} = n + 2` growing and
/// boxes expanding fast enough that the level masses diverge.
pub fn build_infinite(cfg: &InfiniteConfig) -> Result<Schedule> {
    if cfg.levels == 0 {
        return Err(Error::Config("a build needs at least one step".into()));
    }
    let root = BoxParams::new(cfg.alpha0.clone(), cfg.alpha0.clone(), cfg.gamma0.clone());
    let mut f = vec![root];
    let mut c = Vec::with_capacity(cfg.levels);
    let mut annotations = Vec::with_capacity(cfg.levels);
    for n in 0..cfg.levels {
        let alpha = f[n].alpha.clone();
        let gamma = f[n].gamma.clone();
        let alpha_sq = &alpha * &alpha;
        let delta = rat_int(4) * &gamma + rat_int(4) * &alpha_sq + rat_int(1);
        let indices = mian_chowla(n + 2);
        let k_max = *indices.last().expect("prefix is non-empty");
        let cset: Vec<GroupElement> = indices
            .iter()
            .map(|&k| GroupElement::c(rat_int(k) * &delta))
            .collect();
        // Room for the triple-product envelope shifted to the last fiber,
        // one unit of strict slack, and a top margin of one half-height.
        let gamma_next =
            rat_int(3) * &gamma + rat_int(4) * &alpha_sq + rat_int(k_max) * &delta + rat_int(1) + &gamma;
        let alpha_next = rat_int(3) * &alpha;
        f.push(BoxParams::new(alpha_next.clone(), alpha_next, gamma_next));
        annotations.push(StepAnnotation::CentralSidon {
            step: delta,
            indices,
        });
        c.push(cset);
    }
    Schedule::from_parts(ScheduleKind::Infinite, f, c, annotations)
}

/// Per-step outcome of [`check_separation`].
#[derive(Clone, Debug, Serialize)]
pub struct SeparationReport {
    /// Number of construction steps checked.
    pub levels: usize,
    /// Step `n`: the triple-product envelope `F·F⁻¹·F` translated by every
    /// `c ∈ C_{n+1}` stays inside `F_{n+1}`.
    pub triple_product_ok: Vec<bool>,
    /// Step `n`: difference envelopes `F·c_i c_j⁻¹·F⁻¹` over all ordered
    /// pairs, together with `F·F⁻¹` itself, are pairwise volume-disjoint.
    pub differences_ok: Vec<bool>,
    /// Translation-set sizes per step.
    pub counts: Vec<usize>,
    /// Whether the sizes grow strictly.
    pub counts_strictly_increasing: bool,
    /// Partial products of the mass-expansion ratios
    /// `λ(F_{n+1}) / (λ(F_n)·#C_{n+1})`; divergence here is what makes the
    /// invariant measure infinite.
    #[serde(with = "crate::rat::serde_rat_vec")]
    pub expansion_partial_products: Vec<Rat>,
    /// Human-readable details for every failed check.
    pub witnesses: Vec<String>,
    /// Conjunction of all checks.
    pub all_ok: bool,
}

/// Verifies the sufficient separation conditions of an infinite-measure
/// tower, exactly:
///
/// 1. `F_n F_n⁻¹ F_n C_{n+1} ⊆ F_{n+1}`, via the minimal triple-product
///    envelope translated to every fiber;
/// 2. the difference sets `F_n c c'⁻¹ F_n⁻¹` over distinct ordered pairs,
///    plus `F_n F_n⁻¹`, are pairwise disjoint up to volume zero, via
///    envelope boxes (a sufficient condition — envelopes only shrink to
///    the true sets);
/// 3. translation-set sizes grow strictly.
///
/// Requires purely central translation sets (the envelope algebra above
/// is exact only for central translates); fails with a configuration
/// error otherwise. Failures of 1–3 are recorded as witnesses, not
/// errors.
pub fn check_separation(s: &Schedule) -> Result<SeparationReport> {
    let levels = s.levels();
    let mut triple_product_ok = Vec::with_capacity(levels);
    let mut differences_ok = Vec::with_capacity(levels);
    let mut counts = Vec::with_capacity(levels);
    let mut witnesses = Vec::new();
    for n in 0..levels {
        let cset = s.c_set(n + 1);
        if let Some(bad) = cset.iter().find(|g| !g.is_central()) {
            return Err(Error::Config(format!(
                "separation check requires purely central translation sets; \
                 set {} contains ({}, {}, {})",
                n + 1,
                bad.t1,
                bad.t2,
                bad.t3
            )));
        }
        counts.push(cset.len());
        let fp = s.f_params(n);
        let f_next = s.f_box(n + 1);
        let diff_env = fp.product_bound(&fp.inverse_bound());
        let triple_env = diff_env.product_bound(fp).region();

        let mut ok_i = true;
        for (i, cc) in cset.iter().enumerate() {
            if !f_next.contains_box(&triple_env.right_translate(cc)) {
                ok_i = false;
                witnesses.push(format!(
                    "step {n}: triple-product envelope at fiber {i} escapes the next box"
                ));
                break;
            }
        }
        triple_product_ok.push(ok_i);

        let mut boxes: Vec<(String, BishearBox)> = vec![("e".into(), diff_env.region())];
        for (i, ci) in cset.iter().enumerate() {
            for (j, cj) in cset.iter().enumerate() {
                if i != j {
                    let g = ci.mul(&cj.inv());
                    boxes.push((format!("({i},{j})"), diff_env.region().right_translate(&g)));
                }
            }
        }
        let mut ok_ii = true;
        'outer: for x in 0..boxes.len() {
            for y in (x + 1)..boxes.len() {
                let vol = boxes[x].1.intersect_volume(&boxes[y].1);
                if vol > Rat::zero() {
                    ok_ii = false;
                    witnesses.push(format!(
                        "step {n}: difference envelopes {} and {} overlap with volume {vol}",
                        boxes[x].0, boxes[y].0
                    ));
                    break 'outer;
                }
            }
        }
        differences_ok.push(ok_ii);
    }

    let counts_strictly_increasing = counts.windows(2).all(|w| w[0] < w[1]);
    if !counts_strictly_increasing {
        witnesses.push("translation-set sizes do not grow strictly".into());
    }

    let mut expansion_partial_products = Vec::with_capacity(levels);
    let mut acc = rat_int(1);
    for n in 0..levels {
        let t = s.f_params(n + 1).volume() / (s.f_params(n).volume() * rat_int(counts[n] as i64));
        acc *= t;
        expansion_partial_products.push(acc.clone());
    }

    let all_ok = triple_product_ok.iter().all(|&b| b)
        && differences_ok.iter().all(|&b| b)
        && counts_strictly_increasing;
    Ok(SeparationReport {
        levels,
        triple_product_ok,
        differences_ok,
        counts,
        counts_strictly_increasing,
        expansion_partial_products,
        witnesses,
        all_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn folner_family() -> Vec<(String, GroupElement)> {
        vec![
            ("a(1)".into(), GroupElement::a(rat_int(1))),
            ("b(1)".into(), GroupElement::b(rat_int(1))),
            ("c(1)".into(), GroupElement::c(rat_int(1))),
        ]
    }

    #[test]
    fn mian_chowla_prefix_matches_frozen_values() {
        assert_eq!(
            mian_chowla(11),
            vec![0, 1, 3, 7, 12, 20, 30, 44, 65, 80, 96]
        );
    }

    #[test]
    fn periodic_increment_follows_the_pattern_everywhere() {
        for j in -25i64..25 {
            let expected = PERIODIC_PATTERN[j.rem_euclid(5) as usize];
            assert_eq!(periodic_increment(j), expected, "at index {j}");
        }
    }

    #[test]
    fn periodic_offsets_cumulate_and_close_up_over_a_period() {
        let gamma = rat_int(3);
        let offs = periodic_offsets(-7, 9, &gamma);
        let map: BTreeMap<i64, Rat> = offs.iter().cloned().collect();
        assert_eq!(map[&0], rat_int(0));
        for j in -7i64..9 {
            let gap = &map[&(j + 1)] - &map[&j];
            assert_eq!(
                gap,
                rat_int(6 + periodic_increment(j)),
                "gap above fiber {j}"
            );
        }
        // Any five consecutive gaps close up to 10γ + 6.
        for j in -7i64..5 {
            assert_eq!(&map[&(j + 5)] - &map[&j], rat_int(10 * 3 + 6));
        }
    }

    #[test]
    fn comb_points_have_the_right_count_and_extremes() {
        let s = BoxParams::from_ints(2, 3, 5);
        let pts = comb_points(&s, [1, 1, 2]);
        assert_eq!(pts.len(), 3 * 3 * 5);
        assert!(pts.contains(&GroupElement::new(rat_int(-2), rat_int(-3), rat_int(-5))));
        assert!(pts.contains(&GroupElement::new(rat_int(2), rat_int(3), rat_int(5))));
        assert!(pts.contains(&GroupElement::identity()));
        // Half-counts of zero collapse an axis to its midpoint.
        let line = comb_points(&s, [0, 0, 2]);
        assert_eq!(line.len(), 5);
        assert!(line.iter().all(|g| g.is_central()));
        assert!(line.contains(&GroupElement::c(rat(5, 2))));
    }

    #[test]
    fn spacer_map_reads_only_the_third_coordinate() {
        let line: Vec<GroupElement> = (-2..=2).map(|k| GroupElement::c(rat_int(k))).collect();
        let m = SpacerMap::from_line([1, 1, 2], line).unwrap();
        for h3 in -2..=2 {
            let base = m.value((0, 0, h3)).unwrap().clone();
            for h1 in -1..=1 {
                for h2 in -1..=1 {
                    assert_eq!(m.value((h1, h2, h3)).unwrap(), &base);
                }
            }
        }
        assert!(m.value((2, 0, 0)).is_err());
        assert!(m.value((0, 0, 3)).is_err());
        assert!(SpacerMap::from_line([0, 0, 2], vec![GroupElement::identity()]).is_err());
    }

    #[test]
    fn deljunco_is_deterministic_in_the_seed() {
        let (m1, r1) = deljunco_spacer(4, 200, 0.5, 0.2, 2, 99, 8).unwrap();
        let (m2, r2) = deljunco_spacer(4, 200, 0.5, 0.2, 2, 99, 8).unwrap();
        assert_eq!(m1, m2);
        assert_eq!(r1.worst_distance, r2.worst_distance);
        assert_eq!(r1.attempts, r2.attempts);
        let (m3, _) = deljunco_spacer(4, 200, 0.5, 0.2, 2, 100, 8).unwrap();
        assert_ne!(m1, m3, "different seeds should draw different maps");
    }

    #[test]
    fn deljunco_single_letter_alphabet_is_exactly_uniform() {
        let (map, report) = deljunco_spacer(1, 50, 0.01, 0.5, 2, 3, 1).unwrap();
        assert!(map.iter().all(|&v| v == 0));
        assert_eq!(map.len(), 101);
        assert_eq!(report.worst_distance, 0.0);
        assert!(report.passed);
        assert_eq!(report.attempts, 0);
    }

    #[test]
    fn deljunco_passes_at_a_comfortable_operating_point() {
        let (map, report) = deljunco_spacer(4, 10_000, 0.1, 0.1, 2, 1, 16).unwrap();
        assert_eq!(map.len(), 20_001);
        assert!(map.iter().all(|&v| v < 4));
        assert!(report.passed);
        assert!(report.worst_distance < 0.1);
        let (_, r3) = deljunco_spacer(4, 10_000, 0.2, 0.1, 3, 1, 16).unwrap();
        assert!(r3.worst_distance < 0.2);
    }

    #[test]
    fn deljunco_fails_honestly_on_an_impossible_tolerance() {
        let err = deljunco_spacer(4, 10, 1e-6, 0.1, 2, 5, 4).unwrap_err();
        match err {
            Error::GenerationFailed {
                attempts,
                best_stat,
                tolerance,
            } => {
                assert_eq!(attempts, 4);
                assert!(best_stat > 1e-6);
                assert_eq!(tolerance, 1e-6);
            }
            other => panic!("expected generation failure, got {other:?}"),
        }
    }

    #[test]
    fn deljunco_rejects_bad_arguments() {
        assert!(deljunco_spacer(0, 10, 0.1, 0.1, 2, 0, 1).is_err());
        assert!(deljunco_spacer(4, 0, 0.1, 0.1, 2, 0, 1).is_err());
        assert!(deljunco_spacer(4, 10, 0.0, 0.1, 2, 0, 1).is_err());
        assert!(deljunco_spacer(4, 10, 0.1, 1.0, 2, 0, 1).is_err());
        assert!(deljunco_spacer(4, 10, 0.1, 0.1, 1, 0, 1).is_err());
        assert!(deljunco_spacer(4, 10, 0.1, 0.1, 2, 0, 0).is_err());
        assert!(deljunco_spacer(4, 3, 0.1, 0.1, 9, 0, 1).is_err());
    }

    #[test]
    fn faithful_dims_match_the_strict_cutoff_counts() {
        let d = StepDims::faithful(2, 1);
        assert_eq!(d.w1, 7);
        assert_eq!(d.w2, 7);
        assert_eq!(d.r, 15);
        // 15 × 15 × (2·16 − 1): the strict |t| < 8 cutoff leaves 15 values,
        // the strict |t| < 16 cutoff leaves 31.
        assert_eq!(d.grid_count(), 15 * 15 * 31);
        let d0 = StepDims::faithful(0, 1);
        assert!(d0.w1 == 0 && d0.r >= 1 && d0.d1 >= 1);
    }

    #[test]
    fn quadrature_gap_shrinks_when_the_comb_doubles() {
        let f_box = BoxParams::from_ints(1, 1, 1);
        let s_box = BoxParams::from_ints(1, 1, 3);
        let coarse = quadrature_set(&f_box, &s_box, [0, 0, 2], 2, 1234);
        let fine = quadrature_set(&f_box, &s_box, [0, 0, 4], 2, 1234);
        assert_eq!(coarse.points.len(), 5);
        assert_eq!(fine.points.len(), 9);
        assert!(
            fine.achieved_error < coarse.achieved_error,
            "doubling the comb should tighten the quadrature gap: {} vs {}",
            fine.achieved_error,
            coarse.achieved_error
        );
    }

    #[test]
    fn mixing_build_produces_certified_steps_and_validates() {
        let cfg = MixingConfig {
            levels: 2,
            dims: vec![StepDims {
                w1: 1,
                w2: 1,
                r: 1,
                d1: 1,
                d2: 1,
                d3: 1,
            }],
            seed: 11,
            ..MixingConfig::default()
        };
        let s = build_mixing(&cfg).unwrap();
        assert_eq!(s.levels(), 2);
        assert_eq!(s.c_set(1).len(), 27);
        assert_eq!(s.c_set(2).len(), 27);
        for n in 1..=2 {
            match s.annotation(n) {
                StepAnnotation::Stochastic {
                    attempts,
                    pair_distance,
                    quad_error,
                    ..
                } => {
                    assert!(*attempts >= 1);
                    assert!(*pair_distance < 2.0);
                    assert!(*quad_error >= 0.0);
                }
                other => panic!("expected a stochastic annotation, got {other:?}"),
            }
        }
        let report = s.validate(&folner_family());
        assert!(report.all_ok, "{}", report.summary());
    }

    #[test]
    fn mixing_steps_satisfy_the_central_shift_identity_exhaustively() {
        // φ(e3)·c(h) = s(h)·s(h+e3)⁻¹·c(h+e3) for every grid point h with
        // h and h+e3 in the grid, where s(h) is recovered from the built
        // set as c(h)·φ(h)⁻¹.
        let cfg = MixingConfig {
            levels: 2,
            seed: 5,
            ..MixingConfig::default()
        };
        let s = build_mixing(&cfg).unwrap();
        for n in 0..s.levels() {
            let (phi_params, dims) = match s.annotation(n + 1) {
                StepAnnotation::Stochastic { phi, h_dims, .. } => (phi.clone(), *h_dims),
                other => panic!("unexpected annotation {other:?}"),
            };
            let cset = s.c_set(n + 1);
            let [w1, w2, r] = dims;
            let index = |h1: i64, h2: i64, h3: i64| -> usize {
                (((h1 + w1) * (2 * w2 + 1) + (h2 + w2)) * (2 * r + 1) + (h3 + r)) as usize
            };
            let phi_e3 = lattice_embed(&phi_params, (0, 0, 1));
            let mut checked = 0usize;
            for h1 in -w1..=w1 {
                for h2 in -w2..=w2 {
                    for h3 in -r..r {
                        let c_here = &cset[index(h1, h2, h3)];
                        let c_up = &cset[index(h1, h2, h3 + 1)];
                        let s_here = c_here.mul(&lattice_embed(&phi_params, (h1, h2, h3)).inv());
                        let s_up = c_up.mul(&lattice_embed(&phi_params, (h1, h2, h3 + 1)).inv());
                        let lhs = phi_e3.mul(c_here);
                        let rhs = s_here.mul(&s_up.inv()).mul(c_up);
                        assert_eq!(lhs, rhs, "identity fails at h = ({h1}, {h2}, {h3})");
                        checked += 1;
                    }
                }
            }
            assert_eq!(checked, ((2 * w1 + 1) * (2 * w2 + 1) * 2 * r) as usize);
        }
    }

    #[test]
    fn mixing_envelope_is_tight_around_the_spacer_box() {
        let cfg = MixingConfig {
            levels: 1,
            seed: 3,
            ..MixingConfig::default()
        };
        let s = build_mixing(&cfg).unwrap();
        let (phi, s_box) = match s.annotation(1) {
            StepAnnotation::Stochastic { phi, s_box, .. } => (phi.clone(), s_box.clone()),
            other => panic!("unexpected annotation {other:?}"),
        };
        let f0 = s.f_params(0).region();
        // Every product F_0·s with s a corner of the spacer box stays in
        // the envelope; shrinking the envelope by 1% breaks that.
        let shrunk = BoxParams::new(
            &phi.alpha * rat(99, 100),
            &phi.beta * rat(99, 100),
            &phi.gamma * rat(99, 100),
        );
        let mut some_escape = false;
        for corner in s_box.region().corners() {
            let translated = f0.right_translate(&corner);
            assert!(phi.region().contains_box(&translated));
            if !shrunk.region().contains_box(&translated) {
                some_escape = true;
            }
        }
        assert!(some_escape, "a 1% smaller envelope should no longer fit");
    }

    #[test]
    fn constant_spacer_control_builds_and_records_a_poor_statistic() {
        let cfg = MixingConfig {
            levels: 1,
            constant_spacer: true,
            seed: 21,
            ..MixingConfig::default()
        };
        let s = build_mixing(&cfg).unwrap();
        match s.annotation(1) {
            StepAnnotation::Stochastic {
                attempts,
                pair_distance,
                ..
            } => {
                assert_eq!(*attempts, 0);
                assert!(
                    *pair_distance > 1.0,
                    "a constant map concentrates on one cell; got {pair_distance}"
                );
            }
            other => panic!("unexpected annotation {other:?}"),
        }
        let report = s.validate(&folner_family());
        assert!(report.all_ok, "{}", report.summary());
    }

    #[test]
    fn asymmetric_build_lays_down_periodic_fibers_on_every_third_step() {
        let cfg = AsymmetricConfig {
            levels: 4,
            seed: 2,
            ..AsymmetricConfig::default()
        };
        let s = build_asymmetric(&cfg).unwrap();
        assert_eq!(s.levels(), 4);
        for n in [1usize, 2, 3] {
            assert_eq!(s.c_set(n).len(), 5, "stochastic set {n}");
        }
        let c4 = s.c_set(4);
        assert_eq!(c4.len(), 7);
        assert!(c4.iter().all(|g| g.is_central()));
        match s.annotation(4) {
            StepAnnotation::CentralPeriodic {
                phi,
                index_lo,
                index_hi,
            } => {
                assert_eq!((*index_lo, *index_hi), (-3, 3));
                assert_eq!(phi, s.f_params(3));
                let expected = periodic_offsets(-3, 3, &s.f_params(3).gamma);
                for ((_, off), g) in expected.iter().zip(c4.iter()) {
                    assert_eq!(&g.t3, off);
                }
            }
            other => panic!("unexpected annotation {other:?}"),
        }
        let report = s.validate(&folner_family());
        assert!(report.all_ok, "{}", report.summary());
    }

    #[test]
    fn asymmetric_gamma_integer_flag_keeps_all_heights_integral() {
        let cfg = AsymmetricConfig {
            levels: 5,
            seed: 13,
            ..AsymmetricConfig::default()
        };
        let s = build_asymmetric(&cfg).unwrap();
        for n in 0..=5 {
            assert!(
                s.f_params(n).gamma.is_integer(),
                "level {n} height {} is not integral",
                s.f_params(n).gamma
            );
        }
        // The first two half-widths stay at the root value: all
        // translations are central.
        for n in 0..=5 {
            assert_eq!(s.f_params(n).alpha, rat_int(1));
        }
    }

    #[test]
    fn infinite_build_passes_the_separation_check() {
        let s = build_infinite(&InfiniteConfig::default()).unwrap();
        assert_eq!(s.levels(), 6);
        let report = check_separation(&s).unwrap();
        assert!(report.all_ok, "witnesses: {:?}", report.witnesses);
        assert_eq!(report.counts, vec![2, 3, 4, 5, 6, 7]);
        for w in report.expansion_partial_products.windows(2) {
            assert!(w[0] < w[1], "expansion products must grow: {} then {}", w[0], w[1]);
        }
        for n in 0..6 {
            assert_eq!(s.f_params(n + 1).alpha, rat_int(3) * &s.f_params(n).alpha);
            match s.annotation(n + 1) {
                StepAnnotation::CentralSidon { indices, .. } => {
                    assert_eq!(indices, &mian_chowla(n + 2));
                }
                other => panic!("unexpected annotation {other:?}"),
            }
        }
        let validation = s.validate(&folner_family());
        assert!(validation.all_ok, "{}", validation.summary());
    }

    #[test]
    fn separation_check_catches_colliding_differences_with_a_witness() {
        // Equally spaced central offsets: the ordered pairs (1,0) and
        // (2,1) produce the same difference, so their envelopes coincide.
        let f0 = BoxParams::from_ints(1, 1, 1);
        let delta = rat_int(9);
        let cset: Vec<GroupElement> =
            (0..3).map(|k| GroupElement::c(rat_int(k) * &delta)).collect();
        let f1 = BoxParams::from_ints(3, 3, 100);
        let s = Schedule::from_parts(
            ScheduleKind::Infinite,
            vec![f0, f1],
            vec![cset],
            vec![StepAnnotation::Plain],
        )
        .unwrap();
        let report = check_separation(&s).unwrap();
        assert!(!report.all_ok);
        assert!(!report.differences_ok[0]);
        assert!(
            report.witnesses.iter().any(|w| w.contains("overlap")),
            "witnesses: {:?}",
            report.witnesses
        );
    }

    #[test]
    fn separation_check_catches_a_step_that_is_too_small() {
        // Sidon indices but a separation step smaller than the difference
        // envelope: adjacent envelopes overlap.
        let f0 = BoxParams::from_ints(1, 1, 1);
        let delta = rat_int(5); // extent of F·F⁻¹ is 2γ+2α² = 4, boxes are 8 wide
        let cset: Vec<GroupElement> = [0i64, 1, 3]
            .iter()
            .map(|&k| GroupElement::c(rat_int(k) * &delta))
            .collect();
        let f1 = BoxParams::from_ints(3, 3, 100);
        let s = Schedule::from_parts(
            ScheduleKind::Infinite,
            vec![f0, f1],
            vec![cset],
            vec![StepAnnotation::Plain],
        )
        .unwrap();
        let report = check_separation(&s).unwrap();
        assert!(!report.differences_ok[0]);
    }

    #[test]
    fn separation_check_rejects_non_central_sets() {
        let f0 = BoxParams::from_ints(1, 1, 1);
        let cset = vec![GroupElement::a(rat_int(9))];
        let f1 = BoxParams::from_ints(20, 20, 20);
        let s = Schedule::from_parts(
            ScheduleKind::Infinite,
            vec![f0, f1],
            vec![cset],
            vec![StepAnnotation::Plain],
        )
        .unwrap();
        assert!(check_separation(&s).is_err());
    }

    #[test]
    fn configs_parse_with_defaults_and_reject_unknown_keys() {
        let cfg: MixingConfig = toml::from_str("levels = 4\nseed = 9").unwrap();
        assert_eq!(cfg.levels, 4);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.dims, vec![StepDims::desk_mixing()]);
        let bad: std::result::Result<MixingConfig, _> = toml::from_str("levles = 4");
        assert!(bad.is_err(), "misspelled keys must be rejected");
        let asym: AsymmetricConfig = serde_json::from_str("{\"levels\": 7}").unwrap();
        assert_eq!(asym.levels, 7);
        assert!(asym.gamma_integer);
        let inf: InfiniteConfig = toml::from_str("alpha0 = \"1/2\"").unwrap();
        assert_eq!(inf.alpha0, rat(1, 2));
        let bad_inf: std::result::Result<InfiniteConfig, _> = toml::from_str("step = 3");
        assert!(bad_inf.is_err());
    }

    #[test]
    fn level_seed_spreads_steps_apart() {
        let s0 = level_seed(7, 0);
        let s1 = level_seed(7, 1);
        let s2 = level_seed(7, 2);
        assert_eq!(s0, 7);
        assert_ne!(s1, s2);
        assert_ne!(s0, s1);
    }
}
