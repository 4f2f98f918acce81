//! Sheared boxes and finite unions thereof, with exact volumes and exact
//! intersection volumes under group translations.
//!
//! The workhorse is [`BishearBox`]: a set
//!
//! ```text
//!   { (t1,t2,t3) : t1 ∈ i1,  t2 ∈ i2,  t3 − p·t1 − q·t2 ∈ i3 }
//! ```
//!
//! — an axis box whose third coordinate is sheared linearly by the first
//! two. Lebesgue measure on coordinates is the bi-invariant Haar measure of
//! the group, and this class of sets is closed under both left and right
//! group translations (each translation only shifts the intervals and tilts
//! one shear coefficient). It is *not* closed under group inversion, which
//! produces a quadratic shear; see [`crate::mc`] for how those rare cases
//! are handled.
//!
//! The pairwise intersection volume of two sheared boxes is an exact
//! rational: the fiber length over the `(t1,t2)` footprint is a trapezoid in
//! the scalar `d = Δp·t1 + Δq·t2`, whose pushforward density is again a
//! trapezoid, and the product integrates in closed form (piecewise
//! quadratic, integrated by Simpson's rule which is exact for quadratics).
//!
//! [`Region`] is a finite disjoint union of sheared boxes: the closure of
//! the box class under the refinement and translation operations of tower
//! constructions. Pairwise intersection volumes of regions are exact for
//! arbitrary shears; k-way intersections (k ≥ 3) are supported exactly when
//! every cross-shear pair of constituent boxes is null, which the code
//! verifies rather than assumes.

use std::collections::BTreeMap;

use num::traits::{Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::rat::{format_rat, parse_rat, rat_max, rat_min, Rat};

/// A closed interval `[lo, hi]` with rational endpoints, `lo ≤ hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    lo: Rat,
    hi: Rat,
}

impl Interval {
    /// Builds `[lo, hi]`. Panics if `lo > hi`.
    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    /// The symmetric interval `[-r, r]`. Panics if `r < 0`.
    pub fn symmetric(r: Rat) -> Self {
        assert!(!r.is_negative(), "symmetric radius must be nonnegative");
        Interval::new(-r.clone(), r)
    }

    /// Lower endpoint.
    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    /// Upper endpoint.
    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    /// Length `hi − lo`.
    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    /// Whether the interval has zero length.
    pub fn is_null(&self) -> bool {
        self.lo == self.hi
    }

    /// Translate by `s`.
    pub fn shift(&self, s: &Rat) -> Interval {
        Interval::new(&self.lo + s, &self.hi + s)
    }

    /// Midpoint `(lo+hi)/2`.
    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / Rat::from_integer(2.into())
    }

    /// Closed containment of a point.
    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Closed containment of another interval.
    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Intersection with positive length, or `None` if the overlap is empty
    /// or a single point (null sets are discarded throughout).
    pub fn intersect_positive(&self, other: &Interval) -> Option<Interval> {
        let lo = rat_max(&self.lo, &other.lo);
        let hi = rat_min(&self.hi, &other.hi);
        if lo < hi {
            Some(Interval::new(lo, hi))
        } else {
            None
        }
    }

    /// Length of the overlap with `other` (zero if disjoint).
    pub fn overlap_length(&self, other: &Interval) -> Rat {
        let lo = rat_max(&self.lo, &other.lo);
        let hi = rat_min(&self.hi, &other.hi);
        if lo < hi {
            hi - lo
        } else {
            Rat::zero()
        }
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [format_rat(&self.lo), format_rat(&self.hi)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let parts = <[String; 2]>::deserialize(d)?;
        let lo = parse_rat(&parts[0]).map_err(D::Error::custom)?;
        let hi = parse_rat(&parts[1]).map_err(D::Error::custom)?;
        if lo > hi {
            return Err(D::Error::custom("interval endpoints out of order"));
        }
        Ok(Interval { lo, hi })
    }
}

/// A sheared box: `{ t1 ∈ i1, t2 ∈ i2, t3 − p·t1 − q·t2 ∈ i3 }`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BishearBox {
    /// Range of the first coordinate.
    pub i1: Interval,
    /// Range of the second coordinate.
    pub i2: Interval,
    /// Range of the sheared third coordinate `t3 − p·t1 − q·t2`.
    pub i3: Interval,
    /// Shear coefficient on `t1`.
    #[serde(with = "crate::rat::serde_rat")]
    pub p: Rat,
    /// Shear coefficient on `t2`.
    #[serde(with = "crate::rat::serde_rat")]
    pub q: Rat,
}

impl BishearBox {
    /// An axis-aligned box (zero shear).
    pub fn axis(i1: Interval, i2: Interval, i3: Interval) -> Self {
        BishearBox {
            i1,
            i2,
            i3,
            p: Rat::zero(),
            q: Rat::zero(),
        }
    }

    /// The centered box `[-α,α] × [-β,β] × [-γ,γ]` (zero shear).
    pub fn centered(alpha: Rat, beta: Rat, gamma: Rat) -> Self {
        BishearBox::axis(
            Interval::symmetric(alpha),
            Interval::symmetric(beta),
            Interval::symmetric(gamma),
        )
    }

    /// Exact volume `|i1|·|i2|·|i3|` (the shear is measure-preserving).
    pub fn volume(&self) -> Rat {
        self.i1.width() * self.i2.width() * self.i3.width()
    }

    /// Closed membership test for a point.
    pub fn contains_point(&self, g: &GroupElement) -> bool {
        self.i1.contains(&g.t1)
            && self.i2.contains(&g.t2)
            && self
                .i3
                .contains(&(&g.t3 - &self.p * &g.t1 - &self.q * &g.t2))
    }

    /// The eight vertices of the box (images of the cube corners under the
    /// shear, which is linear, so these are exactly the extreme points).
    pub fn corners(&self) -> Vec<GroupElement> {
        let mut out = Vec::with_capacity(8);
        for u in [&self.i1.lo, &self.i1.hi] {
            for v in [&self.i2.lo, &self.i2.hi] {
                for w in [&self.i3.lo, &self.i3.hi] {
                    let t3 = w + &self.p * u + &self.q * v;
                    out.push(GroupElement::new(u.clone(), v.clone(), t3));
                }
            }
        }
        out
    }

    /// Whether `other ⊆ self` (both convex; vertex containment suffices).
    pub fn contains_box(&self, other: &BishearBox) -> bool {
        other.corners().iter().all(|c| self.contains_point(c))
    }

    /// Left translate `g · B`. Stays in the sheared-box class:
    /// the footprint shifts by `(g1, g2)`, the `t2`-shear tilts by `g1`,
    /// and the sheared range shifts by `g3 − g1·g2 − p·g1 − q·g2`.
    pub fn left_translate(&self, g: &GroupElement) -> BishearBox {
        let shift = &g.t3 - &g.t1 * &g.t2 - &self.p * &g.t1 - &self.q * &g.t2;
        BishearBox {
            i1: self.i1.shift(&g.t1),
            i2: self.i2.shift(&g.t2),
            i3: self.i3.shift(&shift),
            p: self.p.clone(),
            q: &self.q + &g.t1,
        }
    }

    /// Right translate `B · g`. Stays in the sheared-box class:
    /// the footprint shifts by `(g1, g2)`, the `t1`-shear tilts by `g2`,
    /// and the sheared range shifts by `g3 − g1·g2 − p·g1 − q·g2`.
    pub fn right_translate(&self, g: &GroupElement) -> BishearBox {
        let shift = &g.t3 - &g.t1 * &g.t2 - &self.p * &g.t1 - &self.q * &g.t2;
        BishearBox {
            i1: self.i1.shift(&g.t1),
            i2: self.i2.shift(&g.t2),
            i3: self.i3.shift(&shift),
            p: &self.p + &g.t2,
            q: self.q.clone(),
        }
    }

    /// Range of the (unsheared) third coordinate over the box: the sheared
    /// range widened by the extremes of `p·t1 + q·t2` on the footprint.
    pub fn t3_bounds(&self) -> Interval {
        let candidates = [
            &self.p * &self.i1.lo + &self.q * &self.i2.lo,
            &self.p * &self.i1.lo + &self.q * &self.i2.hi,
            &self.p * &self.i1.hi + &self.q * &self.i2.lo,
            &self.p * &self.i1.hi + &self.q * &self.i2.hi,
        ];
        let mut lo = candidates[0].clone();
        let mut hi = candidates[0].clone();
        for c in &candidates[1..] {
            lo = rat_min(&lo, c);
            hi = rat_max(&hi, c);
        }
        Interval::new(&self.i3.lo + lo, &self.i3.hi + hi)
    }

    /// Intersection with a box of the *same* shear field, if it has
    /// positive volume.
    pub fn intersect_same_shear(&self, other: &BishearBox) -> Option<BishearBox> {
        debug_assert!(self.p == other.p && self.q == other.q);
        let i1 = self.i1.intersect_positive(&other.i1)?;
        let i2 = self.i2.intersect_positive(&other.i2)?;
        let i3 = self.i3.intersect_positive(&other.i3)?;
        Some(BishearBox {
            i1,
            i2,
            i3,
            p: self.p.clone(),
            q: self.q.clone(),
        })
    }

    /// Exact volume of `self ∩ other` for arbitrary shear fields.
    ///
    /// Over the common footprint `R = (i1∩i1′) × (i2∩i2′)`, the fiber
    /// length in `t3` depends only on `d = Δp·t1 + Δq·t2` and is a trapezoid
    /// `L(d)`; the pushforward density `w(d)` of the footprint under `d` is
    /// again a trapezoid; the volume is `∫ w·L`, piecewise quadratic on the
    /// merged breakpoint mesh and integrated there by an interior-node rule
    /// that is exact for quadratics.
    pub fn intersect_volume(&self, other: &BishearBox) -> Rat {
        // Common footprint.
        let u = match self.i1.intersect_positive(&other.i1) {
            Some(iv) => iv,
            None => return Rat::zero(),
        };
        let v = match self.i2.intersect_positive(&other.i2) {
            Some(iv) => iv,
            None => return Rat::zero(),
        };
        if self.i3.is_null() || other.i3.is_null() {
            return Rat::zero();
        }

        // Fiber-length trapezoid L(d) = |i3 ∩ (i3′ − d)|:
        // support [x0, x3], plateau [x1, x2] at height min(|i3|, |i3′|).
        let (a3, b3) = (&self.i3.lo, &self.i3.hi);
        let (a3p, b3p) = (&other.i3.lo, &other.i3.hi);
        let x0 = a3p - b3;
        let x3 = b3p - a3;
        let e1 = a3p - a3;
        let e2 = b3p - b3;
        let x1 = rat_min(&e1, &e2);
        let x2 = rat_max(&e1, &e2);
        let l_height = rat_min(&self.i3.width(), &other.i3.width());

        let dp = &self.p - &other.p;
        let dq = &self.q - &other.q;

        if dp.is_zero() && dq.is_zero() {
            // Constant d = 0 over the footprint.
            let l0 = eval_trapezoid(&Rat::zero(), &x0, &x1, &x2, &x3, &l_height);
            return u.width() * v.width() * l0;
        }

        // Pushforward density of d = dp·t1 + dq·t2 over the footprint:
        // trapezoid on the sorted corner values [v0, v1, v2, v3] with
        // plateau height area/(v3 − v1).
        let mut cv = [
            &dp * &u.lo + &dq * &v.lo,
            &dp * &u.lo + &dq * &v.hi,
            &dp * &u.hi + &dq * &v.lo,
            &dp * &u.hi + &dq * &v.hi,
        ];
        cv.sort();
        let [w0, w1, w2, w3] = cv;
        let area = u.width() * v.width();
        // v3 > v1 is guaranteed here: both equal would force a null
        // footprint side, excluded above.
        let w_height = area / (&w3 - &w1);

        // Integration support and breakpoint mesh.
        let lo = rat_max(&w0, &x0);
        let hi = rat_min(&w3, &x3);
        if lo >= hi {
            return Rat::zero();
        }
        let mut mesh: Vec<Rat> = [&w0, &w1, &w2, &w3, &x0, &x1, &x2, &x3]
            .into_iter()
            .filter(|b| **b > lo && **b < hi)
            .cloned()
            .collect();
        mesh.push(lo.clone());
        mesh.push(hi.clone());
        mesh.sort();
        mesh.dedup();

        let f = |d: &Rat| -> Rat {
            eval_trapezoid(d, &w0, &w1, &w2, &w3, &w_height)
                * eval_trapezoid(d, &x0, &x1, &x2, &x3, &l_height)
        };
        // On each mesh cell the integrand is one quadratic polynomial, but
        // it may jump at cell boundaries (degenerate trapezoid flanks), so
        // the quadrature samples interior points only:
        //   ∫ₐᵇ f = (b−a)·(2·f(¼) − f(½) + 2·f(¾))/3
        // in cell-relative coordinates — exact for quadratics.
        let two = Rat::from_integer(2.into());
        let three = Rat::from_integer(3.into());
        let four = Rat::from_integer(4.into());
        let mut total = Rat::zero();
        for pair in mesh.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let q1 = (&three * a + b) / &four;
            let m = (a + b) / &two;
            let q3 = (a + &three * b) / &four;
            total += (b - a) * (&two * f(&q1) - f(&m) + &two * f(&q3)) / &three;
        }
        total
    }
}

/// Evaluates the trapezoid with support `[x0, x3]`, plateau `[x1, x2]` at
/// height `h`, and linear flanks, at the point `d`.
fn eval_trapezoid(d: &Rat, x0: &Rat, x1: &Rat, x2: &Rat, x3: &Rat, h: &Rat) -> Rat {
    if d <= x0 || d >= x3 {
        return Rat::zero();
    }
    if d < x1 {
        return (d - x0) / (x1 - x0) * h;
    }
    if d <= x2 {
        return h.clone();
    }
    (x3 - d) / (x3 - x2) * h
}

/// A finite union of pairwise-disjoint (up to null sets) sheared boxes.
///
/// The disjointness invariant is maintained structurally by the operations
/// that produce regions (refinement splits a set into translates that are
/// disjoint by construction; intersections of disjoint families stay
/// disjoint). [`Region::new_checked`] verifies it explicitly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Region {
    parts: Vec<BishearBox>,
}

impl Region {
    /// Wraps a single box.
    pub fn from_box(b: BishearBox) -> Self {
        Region { parts: vec![b] }
    }

    /// Wraps parts whose pairwise disjointness the caller guarantees
    /// (null-overlap pairs are fine). Debug builds spot-check the invariant
    /// on small part counts (the quadratic check would dominate otherwise).
    pub fn from_disjoint_parts(parts: Vec<BishearBox>) -> Self {
        #[cfg(debug_assertions)]
        if parts.len() <= 64 {
            for (i, a) in parts.iter().enumerate() {
                for b in parts.iter().skip(i + 1) {
                    debug_assert!(
                        a.intersect_volume(b).is_zero(),
                        "region parts overlap on positive volume"
                    );
                }
            }
        }
        Region { parts }
    }

    /// Wraps parts after verifying pairwise null overlaps; errors with
    /// [`Error::Validation`] if two parts overlap on positive volume.
    pub fn new_checked(parts: Vec<BishearBox>) -> Result<Self> {
        for (i, a) in parts.iter().enumerate() {
            for b in parts.iter().skip(i + 1) {
                let v = a.intersect_volume(b);
                if !v.is_zero() {
                    return Err(Error::Validation(format!(
                        "region parts {i} and a later part overlap with volume {}",
                        format_rat(&v)
                    )));
                }
            }
        }
        Ok(Region { parts })
    }

    /// The constituent boxes.
    pub fn parts(&self) -> &[BishearBox] {
        &self.parts
    }

    /// Number of constituent boxes.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    /// Whether the region has no parts.
    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Exact total volume.
    pub fn volume(&self) -> Rat {
        self.parts.iter().map(BishearBox::volume).sum()
    }

    /// Left translate `g · R`.
    pub fn left_translate(&self, g: &GroupElement) -> Region {
        Region {
            parts: self.parts.iter().map(|b| b.left_translate(g)).collect(),
        }
    }

    /// Right translate `R · g`.
    pub fn right_translate(&self, g: &GroupElement) -> Region {
        Region {
            parts: self.parts.iter().map(|b| b.right_translate(g)).collect(),
        }
    }

    /// Closed membership test.
    pub fn contains_point(&self, g: &GroupElement) -> bool {
        self.parts.iter().any(|b| b.contains_point(g))
    }

    /// Whether the whole region is contained in the given box.
    pub fn contained_in_box(&self, outer: &BishearBox) -> bool {
        self.parts.iter().all(|b| outer.contains_box(b))
    }

    /// Exact volume of `self ∩ other`, valid for arbitrary shears.
    ///
    /// Within-region parts are disjoint, so the volume is the plain double
    /// sum of pairwise box kernels. Small inputs run a direct double loop
    /// with a bounding-interval prefilter; large inputs (tower refinements
    /// routinely reach 10⁴–10⁵ parts) switch to a sweep join over the t3
    /// bounding intervals, which visits only the pairs that can actually
    /// meet. Both paths compute the identical exact value.
    pub fn intersect_volume(&self, other: &Region) -> Rat {
        const SWEEP_PAIR_THRESHOLD: usize = 1 << 14;
        if self.parts.len().saturating_mul(other.parts.len()) <= SWEEP_PAIR_THRESHOLD {
            self.intersect_volume_direct(other)
        } else {
            self.intersect_volume_sweep(other)
        }
    }

    fn intersect_volume_direct(&self, other: &Region) -> Rat {
        let bounds_a: Vec<Interval> = self.parts.iter().map(|b| b.t3_bounds()).collect();
        let bounds_b: Vec<Interval> = other.parts.iter().map(|b| b.t3_bounds()).collect();
        let mut total = Rat::zero();
        for (a, ta) in self.parts.iter().zip(&bounds_a) {
            for (b, tb) in other.parts.iter().zip(&bounds_b) {
                if a.i1.intersect_positive(&b.i1).is_none()
                    || a.i2.intersect_positive(&b.i2).is_none()
                    || ta.intersect_positive(tb).is_none()
                {
                    continue;
                }
                total += a.intersect_volume(b);
            }
        }
        total
    }

    /// Sweep join: one event per part at the lower end of its t3 bounding
    /// interval, processed in sorted order. A newly arriving part is paired
    /// against exactly the other side's *active* parts (lower end already
    /// seen, upper end not yet strictly passed), which enumerates every pair
    /// whose t3 intervals overlap with positive length — pairs meeting only
    /// in a plane contribute zero volume and may be skipped.
    fn intersect_volume_sweep(&self, other: &Region) -> Rat {
        struct Entry {
            lo: Rat,
            hi: Rat,
            idx: usize,
        }
        fn entries(parts: &[BishearBox]) -> Vec<Entry> {
            let mut v: Vec<Entry> = parts
                .iter()
                .enumerate()
                .map(|(idx, b)| {
                    let t3 = b.t3_bounds();
                    Entry {
                        lo: t3.lo().clone(),
                        hi: t3.hi().clone(),
                        idx,
                    }
                })
                .collect();
            v.sort_by(|a, b| a.lo.cmp(&b.lo));
            v
        }
        let ea = entries(&self.parts);
        let eb = entries(&other.parts);
        // Active lists hold (hi, idx) of parts whose interval straddles the
        // sweep position; retain() keeps them pruned.
        let mut active_a: Vec<(Rat, usize)> = Vec::new();
        let mut active_b: Vec<(Rat, usize)> = Vec::new();
        let mut total = Rat::zero();
        let (mut ia, mut ib) = (0usize, 0usize);
        while ia < ea.len() || ib < eb.len() {
            let take_a = match (ea.get(ia), eb.get(ib)) {
                (Some(x), Some(y)) => x.lo <= y.lo,
                (Some(_), None) => true,
                _ => false,
            };
            if take_a {
                let e = &ea[ia];
                ia += 1;
                active_b.retain(|(hi, _)| *hi > e.lo);
                let a = &self.parts[e.idx];
                for (_, j) in &active_b {
                    let b = &other.parts[*j];
                    if a.i1.intersect_positive(&b.i1).is_none()
                        || a.i2.intersect_positive(&b.i2).is_none()
                    {
                        continue;
                    }
                    total += a.intersect_volume(b);
                }
                active_a.push((e.hi.clone(), e.idx));
            } else {
                let e = &eb[ib];
                ib += 1;
                active_a.retain(|(hi, _)| *hi > e.lo);
                let b = &other.parts[e.idx];
                for (_, i) in &active_a {
                    let a = &self.parts[*i];
                    if a.i1.intersect_positive(&b.i1).is_none()
                        || a.i2.intersect_positive(&b.i2).is_none()
                    {
                        continue;
                    }
                    total += a.intersect_volume(b);
                }
                active_b.push((e.hi.clone(), e.idx));
            }
        }
        total
    }

    /// Exact k-way intersection as a region (up to null sets).
    ///
    /// Parts are grouped by shear field `(p, q)`. Within a common shear the
    /// intersection is interval algebra and exact for any k. Tuples mixing
    /// different shears are provably null **iff** every cross-shear pair of
    /// parts is null, which is verified exactly; if some cross-shear pair
    /// has positive volume the k-way intersection leaves the sheared-box
    /// class and [`Error::ShearMismatch`] is returned.
    ///
    /// `budget` caps both the intermediate tuple count and the output size.
    pub fn multi_intersect(regions: &[&Region], budget: usize) -> Result<Region> {
        assert!(!regions.is_empty(), "multi_intersect needs at least one region");
        if regions.len() == 1 {
            return Ok(regions[0].clone());
        }

        // Verify that cross-shear pairs across different regions are null.
        for (m, ra) in regions.iter().enumerate() {
            for rb in regions.iter().skip(m + 1) {
                for a in ra.parts() {
                    for b in rb.parts() {
                        if a.p == b.p && a.q == b.q {
                            continue;
                        }
                        let v = a.intersect_volume(b);
                        if !v.is_zero() {
                            return Err(Error::ShearMismatch {
                                context: format!(
                                    "parts with shears ({}, {}) and ({}, {}) overlap with volume {}",
                                    format_rat(&a.p),
                                    format_rat(&a.q),
                                    format_rat(&b.p),
                                    format_rat(&b.q),
                                    format_rat(&v)
                                ),
                            });
                        }
                    }
                }
            }
        }

        // Group parts by shear key within each region.
        type ShearKey = (Rat, Rat);
        let mut grouped: Vec<BTreeMap<ShearKey, Vec<&BishearBox>>> = Vec::new();
        for r in regions {
            let mut m: BTreeMap<ShearKey, Vec<&BishearBox>> = BTreeMap::new();
            for part in r.parts() {
                m.entry((part.p.clone(), part.q.clone()))
                    .or_default()
                    .push(part);
            }
            grouped.push(m);
        }

        // Shear keys present in every region.
        let mut keys: Vec<ShearKey> = grouped[0].keys().cloned().collect();
        keys.retain(|k| grouped.iter().all(|m| m.contains_key(k)));

        let mut out: Vec<BishearBox> = Vec::new();
        for key in keys {
            // Cartesian product across regions, folded incrementally so the
            // running intermediate set stays pruned.
            let mut acc: Vec<BishearBox> = grouped[0][&key].iter().map(|b| (*b).clone()).collect();
            for m in &grouped[1..] {
                let mut next: Vec<BishearBox> = Vec::new();
                for a in &acc {
                    for b in &m[&key] {
                        if let Some(x) = a.intersect_same_shear(b) {
                            next.push(x);
                        }
                    }
                }
                if next.len() > budget {
                    return Err(Error::BudgetExceeded {
                        actual: next.len(),
                        budget,
                    });
                }
                acc = next;
                if acc.is_empty() {
                    break;
                }
            }
            out.extend(acc);
            if out.len() > budget {
                return Err(Error::BudgetExceeded {
                    actual: out.len(),
                    budget,
                });
            }
        }
        Ok(Region { parts: out })
    }

    /// Exact volume of a k-way intersection (see [`Region::multi_intersect`]).
    pub fn multi_intersect_volume(regions: &[&Region], budget: usize) -> Result<Rat> {
        Ok(Region::multi_intersect(regions, budget)?.volume())
    }

    /// Smallest centered box `[-α,α]×[-β,β]×[-γ,γ]` containing the region,
    /// returned as `(α, β, γ)`.
    pub fn centered_bounds(&self) -> Option<(Rat, Rat, Rat)> {
        let mut alpha: Option<Rat> = None;
        let mut beta: Option<Rat> = None;
        let mut gamma: Option<Rat> = None;
        let fold = |cur: &mut Option<Rat>, v: Rat| {
            let v = v.abs();
            match cur {
                Some(c) => {
                    if v > *c {
                        *cur = Some(v);
                    }
                }
                None => *cur = Some(v),
            }
        };
        for part in &self.parts {
            for corner in part.corners() {
                fold(&mut alpha, corner.t1);
                fold(&mut beta, corner.t2);
                fold(&mut gamma, corner.t3);
            }
        }
        Some((alpha?, beta?, gamma?))
    }
}
