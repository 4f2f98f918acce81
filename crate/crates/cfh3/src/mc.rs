//! Deterministic Monte Carlo volume estimation.
//!
//! Two uses: an independent cross-check of the exact intersection kernels,
//! and the handful of quantities that genuinely leave the rational class
//! (overlap of a box with its group inverse, whose closed form involves
//! logarithms).
//!
//! Sample points are dyadic rationals inside an axis-parallel window: each
//! coordinate is `lo + width·k/2^22` for a 22-bit draw `k`, so membership
//! predicates are evaluated **exactly** — either in big-rational arithmetic
//! or, when all data fit, in a scaled `i128` integer form that decides the
//! same inequalities with no rounding anywhere. Both paths see the same
//! sample stream, so they produce bit-identical results; the integer path is
//! just fast.
//!
//! The sample stream is split into a fixed number of blocks, each on its own
//! ChaCha stream; blocks are reduced in block order. Estimates therefore
//! depend only on the seed, not on the number of worker threads.

use num::bigint::BigInt;
use num::traits::{ToPrimitive, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::group::GroupElement;
use crate::rat::{rat_to_f64, Rat};
use crate::region::{BishearBox, Interval, Region};

/// Bits of resolution per coordinate draw.
const SAMPLE_BITS: u32 = 22;

/// Number of RNG blocks the sample stream is split into. Fixed so that the
/// estimate is independent of worker-thread count.
const MC_BLOCKS: u64 = 64;

/// Result of a Monte Carlo volume estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct McEstimate {
    /// Estimated volume: `window_volume · hits / samples`.
    pub estimate: f64,
    /// One-sigma standard error of the estimate.
    pub std_error: f64,
    /// Number of samples that satisfied the predicate.
    pub hits: u64,
    /// Total number of samples.
    pub samples: u64,
    /// Exact volume of the sampling window (as `f64` for reporting).
    pub window_volume: f64,
}

impl McEstimate {
    fn from_counts(hits: u64, samples: u64, window_volume: f64) -> Self {
        let p = hits as f64 / samples as f64;
        McEstimate {
            estimate: window_volume * p,
            std_error: window_volume * (p * (1.0 - p) / samples as f64).sqrt(),
            hits,
            samples,
            window_volume,
        }
    }

    /// Distance from a reference value in units of the standard error
    /// (`f64::INFINITY` when the standard error is zero and the values
    /// differ).
    pub fn sigmas_from(&self, reference: f64) -> f64 {
        let d = (self.estimate - reference).abs();
        if d == 0.0 {
            0.0
        } else if self.std_error == 0.0 {
            f64::INFINITY
        } else {
            d / self.std_error
        }
    }
}

/// Draws one exact dyadic sample point in the window. The window must be
/// axis-parallel (zero shear); the caller picks it to contain the sets of
/// interest.
pub fn sample_point(window: &BishearBox, rng: &mut impl RngCore) -> GroupElement {
    debug_assert!(window.p.is_zero() && window.q.is_zero());
    let mut coord = |ivl_lo: &Rat, ivl_w: &Rat| -> Rat {
        let k = rng.next_u64() >> (64 - SAMPLE_BITS);
        let frac = Rat::new(BigInt::from(k), BigInt::from(1u64 << SAMPLE_BITS));
        ivl_lo + ivl_w * frac
    };
    let t1 = coord(window.i1.lo(), &window.i1.width());
    let t2 = coord(window.i2.lo(), &window.i2.width());
    let t3 = coord(window.i3.lo(), &window.i3.width());
    GroupElement::new(t1, t2, t3)
}

fn block_sizes(samples: u64) -> Vec<u64> {
    let blocks = MC_BLOCKS.min(samples.max(1));
    let base = samples / blocks;
    let rem = samples % blocks;
    (0..blocks)
        .map(|b| base + u64::from(b < rem))
        .collect()
}

/// Runs `count_fn(rng, n)` on each block with its own ChaCha stream, using
/// up to `jobs` worker threads, and reduces hits in block order.
fn run_blocks<F>(samples: u64, seed: u64, jobs: usize, count_fn: F) -> u64
where
    F: Fn(&mut ChaCha8Rng, u64) -> u64 + Sync,
{
    let sizes = block_sizes(samples);
    let jobs = jobs.max(1).min(sizes.len());
    let mut hits_per_block = vec![0u64; sizes.len()];
    if jobs == 1 {
        for (b, (n, slot)) in sizes.iter().zip(hits_per_block.iter_mut()).enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64 + 1);
            *slot = count_fn(&mut rng, *n);
        }
    } else {
        let next = std::sync::atomic::AtomicUsize::new(0);
        let slots: Vec<std::sync::Mutex<u64>> =
            (0..sizes.len()).map(|_| std::sync::Mutex::new(0)).collect();
        std::thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(|| loop {
                    let b = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if b >= sizes.len() {
                        break;
                    }
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(b as u64 + 1);
                    *slots[b].lock().unwrap() = count_fn(&mut rng, sizes[b]);
                });
            }
        });
        for (slot, out) in slots.iter().zip(hits_per_block.iter_mut()) {
            *out = *slot.lock().unwrap();
        }
    }
    hits_per_block.iter().sum()
}

/// Estimates the volume of `{x ∈ window : pred(x)}` with exact-rational
/// sample points. Deterministic given the seed, independent of `jobs`.
pub fn mc_volume<F>(pred: F, window: &BishearBox, samples: u64, seed: u64, jobs: usize) -> McEstimate
where
    F: Fn(&GroupElement) -> bool + Sync,
{
    let hits = run_blocks(samples, seed, jobs, |rng, n| {
        let mut h = 0u64;
        for _ in 0..n {
            if pred(&sample_point(window, rng)) {
                h += 1;
            }
        }
        h
    });
    McEstimate::from_counts(hits, samples, rat_to_f64(&window.volume()))
}

/// A sheared box with all data scaled to integers at a common denominator,
/// deciding the same membership inequalities in `i128`.
struct ScaledPart {
    a1: i128,
    b1: i128,
    a2: i128,
    b2: i128,
    /// `i3` endpoints pre-multiplied by the extra factor `den` used by the
    /// sheared inequality.
    a3d: i128,
    b3d: i128,
    p: i128,
    q: i128,
    /// Common denominator of the original data (scaled by `1` here; the
    /// sample denominator is handled by the caller).
    den: i128,
}

impl ScaledPart {
    /// `t1, t2, t3` are sample coordinates scaled by `den · 2^SAMPLE_BITS`;
    /// the stored endpoints are scaled by `den`, so the comparisons below
    /// decide exactly the original rational inequalities.
    #[inline]
    fn contains(&self, t1: i128, t2: i128, t3: i128) -> bool {
        if t1 < self.a1 << SAMPLE_BITS || t1 > self.b1 << SAMPLE_BITS {
            return false;
        }
        if t2 < self.a2 << SAMPLE_BITS || t2 > self.b2 << SAMPLE_BITS {
            return false;
        }
        // (t3 − p·t1 − q·t2) ∈ [a3, b3], multiplied through by den²·2^B.
        let s = t3 * self.den - self.p * t1 - self.q * t2;
        s >= self.a3d << SAMPLE_BITS && s <= self.b3d << SAMPLE_BITS
    }
}

/// Scaled form of "membership in every region of a list".
struct ScaledIntersection {
    clauses: Vec<Vec<ScaledPart>>,
    lo: [i128; 3],
    w: [i128; 3],
}

/// Magnitude guard on every scaled integer (and on the common denominator):
/// with all inputs below `2^50`, the largest product chain in the membership
/// test stays below `2^126`, clear of `i128` overflow.
const SCALE_GUARD: i128 = 1 << 50;

fn to_scaled_int(r: &Rat, den: &BigInt) -> Option<i128> {
    let v = r.numer() * den / r.denom();
    let v = v.to_i128()?;
    (v.abs() < SCALE_GUARD).then_some(v)
}

impl ScaledIntersection {
    fn build(regions: &[&Region], window: &BishearBox) -> Option<Self> {
        use num::Integer;
        let mut den = BigInt::from(1);
        let mut fold = |r: &Rat| {
            den = den.lcm(r.denom());
        };
        for ivl in [&window.i1, &window.i2, &window.i3] {
            fold(ivl.lo());
            fold(ivl.hi());
        }
        for reg in regions {
            for part in reg.parts() {
                for ivl in [&part.i1, &part.i2, &part.i3] {
                    fold(ivl.lo());
                    fold(ivl.hi());
                }
                fold(&part.p);
                fold(&part.q);
            }
        }
        if den.to_i128()? >= SCALE_GUARD {
            return None;
        }
        let den_i = den.to_i128()?;

        let sc = |r: &Rat| to_scaled_int(r, &den);
        let lo = [
            sc(window.i1.lo())?,
            sc(window.i2.lo())?,
            sc(window.i3.lo())?,
        ];
        let w = [
            sc(&window.i1.width())?,
            sc(&window.i2.width())?,
            sc(&window.i3.width())?,
        ];
        let mut clauses = Vec::with_capacity(regions.len());
        for reg in regions {
            let mut parts = Vec::with_capacity(reg.parts().len());
            for part in reg.parts() {
                parts.push(ScaledPart {
                    a1: sc(part.i1.lo())?,
                    b1: sc(part.i1.hi())?,
                    a2: sc(part.i2.lo())?,
                    b2: sc(part.i2.hi())?,
                    a3d: sc(part.i3.lo())?.checked_mul(den_i)?,
                    b3d: sc(part.i3.hi())?.checked_mul(den_i)?,
                    p: sc(&part.p)?,
                    q: sc(&part.q)?,
                    den: den_i,
                });
            }
            clauses.push(parts);
        }
        Some(ScaledIntersection { clauses, lo, w })
    }

    /// Same dyadic sample stream as [`sample_point`], decided in integers:
    /// `t_i = lo_i + w_i·k/2^B` becomes `(lo_sc << B) + w_sc·k` at the
    /// common scale `den · 2^B`.
    #[inline]
    fn sample_hits(&self, rng: &mut ChaCha8Rng, n: u64) -> u64 {
        let mut hits = 0u64;
        for _ in 0..n {
            let k1 = (rng.next_u64() >> (64 - SAMPLE_BITS)) as i128;
            let k2 = (rng.next_u64() >> (64 - SAMPLE_BITS)) as i128;
            let k3 = (rng.next_u64() >> (64 - SAMPLE_BITS)) as i128;
            let t1 = (self.lo[0] << SAMPLE_BITS) + self.w[0] * k1;
            let t2 = (self.lo[1] << SAMPLE_BITS) + self.w[1] * k2;
            let t3 = (self.lo[2] << SAMPLE_BITS) + self.w[2] * k3;
            if self
                .clauses
                .iter()
                .all(|parts| parts.iter().any(|p| p.contains(t1, t2, t3)))
            {
                hits += 1;
            }
        }
        hits
    }
}

/// Estimates the volume of the intersection of the given regions inside an
/// axis-parallel window.
///
/// Uses an exact scaled-integer membership test when all data fit in the
/// guard bounds, falling back to big-rational arithmetic otherwise; both
/// paths consume the identical sample stream and agree bit-for-bit.
pub fn mc_regions_intersect_volume(
    regions: &[&Region],
    window: &BishearBox,
    samples: u64,
    seed: u64,
    jobs: usize,
) -> McEstimate {
    if let Some(scaled) = ScaledIntersection::build(regions, window) {
        let hits = run_blocks(samples, seed, jobs, |rng, n| scaled.sample_hits(rng, n));
        return McEstimate::from_counts(hits, samples, rat_to_f64(&window.volume()));
    }
    mc_volume(
        |x| regions.iter().all(|r| r.contains_point(x)),
        window,
        samples,
        seed,
        jobs,
    )
}

/// Convenience: MC estimate of `λ(a ∩ b)` for two sheared boxes.
pub fn mc_box_pair_volume(
    a: &BishearBox,
    b: &BishearBox,
    window: &BishearBox,
    samples: u64,
    seed: u64,
    jobs: usize,
) -> McEstimate {
    let ra = Region::from_box(a.clone());
    let rb = Region::from_box(b.clone());
    mc_regions_intersect_volume(&[&ra, &rb], window, samples, seed, jobs)
}

/// Draws a uniform random sub-box of `outer` (axis-parallel), with side
/// fractions at dyadic resolution. Used by quadrature cross-checks that
/// need "a random pair of test boxes".
pub fn random_sub_box(outer: &BishearBox, rng: &mut impl RngCore) -> BishearBox {
    debug_assert!(outer.p.is_zero() && outer.q.is_zero());
    const RES: u64 = 1 << 16;
    let mut side = |lo: &Rat, width: &Rat| {
        let mut k1 = rng.gen_range(0..RES);
        let mut k2 = rng.gen_range(0..RES);
        if k1 == k2 {
            k2 = k1 + 1; // still ≤ RES, so the fraction stays in [0, 1]
        }
        if k1 > k2 {
            std::mem::swap(&mut k1, &mut k2);
        }
        let f = |k: u64| Rat::new(BigInt::from(k), BigInt::from(RES));
        Interval::new(lo + width * f(k1), lo + width * f(k2))
    };
    let i1 = side(outer.i1.lo(), &outer.i1.width());
    let i2 = side(outer.i2.lo(), &outer.i2.width());
    let i3 = side(outer.i3.lo(), &outer.i3.width());
    BishearBox::axis(i1, i2, i3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int, rat_to_f64};
    use crate::region::Interval;

    fn iv(lo: i64, hi: i64) -> Interval {
        Interval::new(rat_int(lo), rat_int(hi))
    }

    #[test]
    fn recovers_a_known_fraction() {
        // Half-cube inside the unit cube.
        let window = BishearBox::axis(iv(0, 1), iv(0, 1), iv(0, 1));
        let inner = BishearBox::axis(
            Interval::new(rat_int(0), rat(1, 2)),
            iv(0, 1),
            iv(0, 1),
        );
        let est = mc_volume(|x| inner.contains_point(x), &window, 40_000, 7, 1);
        assert!(est.sigmas_from(0.5) < 4.0, "estimate {} too far", est.estimate);
    }

    #[test]
    fn integer_and_rational_paths_agree_exactly() {
        let window = BishearBox::axis(iv(-2, 2), iv(-2, 2), iv(-3, 3));
        let a = BishearBox {
            i1: iv(-1, 2),
            i2: iv(0, 1),
            i3: iv(-1, 1),
            p: rat(1, 2),
            q: rat_int(2),
        };
        let b = BishearBox {
            i1: iv(0, 3),
            i2: iv(-1, 1),
            i3: iv(0, 4),
            p: rat_int(-1),
            q: rat_int(1),
        };
        let ra = Region::from_box(a.clone());
        let rb = Region::from_box(b.clone());
        let fast = mc_regions_intersect_volume(&[&ra, &rb], &window, 20_000, 11, 1);
        let slow = mc_volume(
            |x| a.contains_point(x) && b.contains_point(x),
            &window,
            20_000,
            11,
            1,
        );
        assert_eq!(fast.hits, slow.hits);
        assert_eq!(fast.estimate, slow.estimate);
    }

    #[test]
    fn estimate_is_independent_of_job_count() {
        let window = BishearBox::axis(iv(0, 1), iv(0, 1), iv(0, 1));
        let inner = BishearBox::axis(
            Interval::new(rat_int(0), rat(1, 3)),
            iv(0, 1),
            iv(0, 1),
        );
        let r = Region::from_box(inner);
        let e1 = mc_regions_intersect_volume(&[&r], &window, 50_000, 3, 1);
        let e4 = mc_regions_intersect_volume(&[&r], &window, 50_000, 3, 4);
        let e7 = mc_regions_intersect_volume(&[&r], &window, 50_000, 3, 7);
        assert_eq!(e1.hits, e4.hits);
        assert_eq!(e1.hits, e7.hits);
    }

    #[test]
    fn cross_checks_the_exact_kernel() {
        let a = BishearBox {
            i1: iv(-1, 2),
            i2: iv(0, 1),
            i3: iv(-1, 1),
            p: rat(1, 2),
            q: rat_int(2),
        };
        let b = BishearBox {
            i1: iv(0, 3),
            i2: iv(-1, 1),
            i3: iv(0, 4),
            p: rat_int(-1),
            q: rat_int(1),
        };
        // Window covering both: t3 ranges via bounds.
        let window = BishearBox::axis(iv(-1, 3), iv(-1, 1), iv(-4, 8));
        let exact = rat_to_f64(&a.intersect_volume(&b));
        let est = mc_box_pair_volume(&a, &b, &window, 200_000, 5, 2);
        assert!(
            est.sigmas_from(exact) < 4.0,
            "MC {} vs exact {} ({} sigmas)",
            est.estimate,
            exact,
            est.sigmas_from(exact)
        );
    }

    #[test]
    fn inverse_overlap_matches_closed_forms() {
        // λ(I ∩ I⁻¹) = 8αβγ − α²β² when αβ ≤ 2γ; inversion leaves the
        // sheared-box class, so this is MC territory.
        for (al, be, ga, expect) in [(1, 1, 1, 7.0), (1, 1, 10, 79.0), (2, 1, 3, 44.0)] {
            let bx = BishearBox::centered(rat_int(al), rat_int(be), rat_int(ga));
            let est = mc_volume(
                |x| bx.contains_point(x) && bx.contains_point(&x.inv()),
                &bx,
                60_000,
                13,
                2,
            );
            assert!(
                est.sigmas_from(expect) < 4.0,
                "I({al},{be},{ga}): MC {} vs {} ({} sigmas)",
                est.estimate,
                expect,
                est.sigmas_from(expect)
            );
        }
        // Clipped regime: λ = 3 + 2·ln 2, irrational.
        let bx = BishearBox::centered(rat_int(1), rat_int(2), rat(1, 2));
        let expect = 3.0 + 2.0 * (2.0f64).ln();
        let est = mc_volume(
            |x| bx.contains_point(x) && bx.contains_point(&x.inv()),
            &bx,
            60_000,
            17,
            2,
        );
        assert!(
            est.sigmas_from(expect) < 4.0,
            "clipped: MC {} vs {} ({} sigmas)",
            est.estimate,
            expect,
            est.sigmas_from(expect)
        );
    }

    #[test]
    fn sample_points_lie_in_the_window() {
        let window = BishearBox::axis(iv(-3, 5), iv(2, 4), iv(-1, 0));
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let x = sample_point(&window, &mut rng);
            assert!(window.contains_point(&x));
        }
    }

    #[test]
    fn random_sub_boxes_are_contained(){
        let outer = BishearBox::axis(iv(-2, 2), iv(0, 3), iv(-1, 4));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let sub = random_sub_box(&outer, &mut rng);
            assert!(outer.contains_box(&sub));
        }
    }
}
