//! Centered box families: lattice tilings, product/inverse envelopes, and
//! exact translation (Følner) ratios.
//!
//! The centered box `I(α,β,γ) = [-α,α]×[-β,β]×[-γ,γ]` is the basic building
//! block of every tower in this crate. This module provides:
//!
//! - the lattice embedding `z ↦ (2α·z1, 2β·z2, 2γ·z3)` whose right
//!   translates of `I(α,β,γ)` tile the whole group exactly, for *any*
//!   positive parameters (the group shear rotates fibers within footprint
//!   cells but never breaks the partition);
//! - envelope bounds: `I·I′ ⊆ I(α+α′, β+β′, γ+γ′+α·β′)` and
//!   `I⁻¹ ⊆ I(α, β, γ+α·β)`, both minimal;
//! - exact translation ratios `λ(gF Δ F)/λ(F)` for arbitrary `g`, the
//!   quantity whose decay along a box family certifies the Følner property;
//! - the overlap `λ(I ∩ I⁻¹)`, exact in the regime `αβ ≤ 2γ` where it is
//!   rational, and left to Monte Carlo elsewhere (it is `8αβγ − α²β²` in
//!   the former case and involves logarithms in the latter).

use num::traits::Zero;
use serde::{Deserialize, Serialize};

use crate::group::GroupElement;
use crate::rat::{rat_int, rat_max, rat_min, Rat};
use crate::region::{BishearBox, Interval};

/// Parameters `(α, β, γ)` of a centered box `I(α,β,γ)`, all positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxParams {
    /// Half-width in the first coordinate.
    #[serde(with = "crate::rat::serde_rat")]
    pub alpha: Rat,
    /// Half-width in the second coordinate.
    #[serde(with = "crate::rat::serde_rat")]
    pub beta: Rat,
    /// Half-width in the third coordinate.
    #[serde(with = "crate::rat::serde_rat")]
    pub gamma: Rat,
}

impl BoxParams {
    /// Builds parameters; panics if any is not strictly positive.
    pub fn new(alpha: Rat, beta: Rat, gamma: Rat) -> Self {
        assert!(
            alpha > Rat::zero() && beta > Rat::zero() && gamma > Rat::zero(),
            "box parameters must be positive"
        );
        BoxParams { alpha, beta, gamma }
    }

    /// Convenience constructor from integers.
    pub fn from_ints(alpha: i64, beta: i64, gamma: i64) -> Self {
        BoxParams::new(rat_int(alpha), rat_int(beta), rat_int(gamma))
    }

    /// The centered box `[-α,α]×[-β,β]×[-γ,γ]`.
    pub fn region(&self) -> BishearBox {
        BishearBox::centered(self.alpha.clone(), self.beta.clone(), self.gamma.clone())
    }

    /// Exact volume `8αβγ`.
    pub fn volume(&self) -> Rat {
        rat_int(8) * &self.alpha * &self.beta * &self.gamma
    }

    /// Envelope of the product set: `I(α,β,γ)·I(α′,β′,γ′)` is contained in
    /// `I(α+α′, β+β′, γ+γ′+α·β′)`, and this is the smallest centered box
    /// with that property (each face is attained by a product of corners).
    pub fn product_bound(&self, other: &BoxParams) -> BoxParams {
        BoxParams::new(
            &self.alpha + &other.alpha,
            &self.beta + &other.beta,
            &self.gamma + &other.gamma + &self.alpha * &other.beta,
        )
    }

    /// Envelope of the inverse set: `I(α,β,γ)⁻¹ ⊆ I(α, β, γ+α·β)`,
    /// minimal for the same reason.
    pub fn inverse_bound(&self) -> BoxParams {
        BoxParams::new(
            self.alpha.clone(),
            self.beta.clone(),
            &self.gamma + &self.alpha * &self.beta,
        )
    }

    /// Exact `λ(I ∩ I⁻¹) = 8αβγ − α²β²` in the regime `αβ ≤ 2γ`.
    /// Outside that regime the overlap is not rational (the fiber overlap
    /// clips to zero on part of the footprint) and `None` is returned;
    /// use Monte Carlo there.
    pub fn inverse_overlap_volume(&self) -> Option<Rat> {
        if &self.alpha * &self.beta <= rat_int(2) * &self.gamma {
            let ab = &self.alpha * &self.beta;
            Some(self.volume() - &ab * &ab)
        } else {
            None
        }
    }
}

/// The lattice embedding `z ↦ (2α·z1, 2β·z2, 2γ·z3)` associated with a
/// centered box. Right translates of `I(α,β,γ)` along its image tile the
/// group exactly.
pub fn lattice_embed(params: &BoxParams, z: (i64, i64, i64)) -> GroupElement {
    GroupElement::new(
        rat_int(2 * z.0) * &params.alpha,
        rat_int(2 * z.1) * &params.beta,
        rat_int(2 * z.2) * &params.gamma,
    )
}

/// One tile: `I(α,β,γ) · lattice_embed(z)`.
pub fn lattice_tile(params: &BoxParams, z: (i64, i64, i64)) -> BishearBox {
    params.region().right_translate(&lattice_embed(params, z))
}

/// Outcome of an exact tiling verification over a finite window.
#[derive(Clone, Debug, Serialize)]
pub struct TilingReport {
    /// Number of tiles inspected.
    pub tiles: usize,
    /// Exact window volume.
    #[serde(with = "crate::rat::serde_rat")]
    pub window_volume: Rat,
    /// Exact total volume of `tile ∩ window` over all tiles.
    #[serde(with = "crate::rat::serde_rat")]
    pub covered_volume: Rat,
    /// `window_volume − covered_volume` (zero iff the window is covered,
    /// given that overlaps are zero).
    #[serde(with = "crate::rat::serde_rat")]
    pub uncovered_volume: Rat,
    /// Exact total pairwise overlap volume between distinct tiles,
    /// restricted to the window.
    #[serde(with = "crate::rat::serde_rat")]
    pub pairwise_overlap: Rat,
    /// Whether the family tiles the window exactly.
    pub exact: bool,
}

/// Verifies — in exact arithmetic — that right translates of `I(α,β,γ)`
/// along the lattice tile the window `I(scale·α, scale·β, scale·γ)`:
/// tiles are chosen adaptively so that every one meeting the window is
/// included, their pairwise overlaps are summed, and the covered volume is
/// compared to the window volume. `spacing` rescales the lattice step and
/// exists for negative controls: `spacing = 1` is the true lattice; smaller
/// values force overlaps, larger values force gaps.
pub fn tiling_check(params: &BoxParams, scale: i64, spacing: &Rat) -> TilingReport {
    assert!(scale >= 1, "window scale must be at least 1");
    assert!(spacing > &Rat::zero(), "spacing must be positive");
    let window = BishearBox::centered(
        rat_int(scale) * &params.alpha,
        rat_int(scale) * &params.beta,
        rat_int(scale) * &params.gamma,
    );

    let embed = |z: (i64, i64, i64)| -> GroupElement {
        GroupElement::new(
            rat_int(2 * z.0) * &params.alpha * spacing,
            rat_int(2 * z.1) * &params.beta * spacing,
            rat_int(2 * z.2) * &params.gamma * spacing,
        )
    };

    // Index ranges in the two footprint coordinates: the tile for z1 spans
    // t1 ∈ [(2·spacing·z1 − 1)·α, (2·spacing·z1 + 1)·α]; include every z1
    // whose span meets [-scale·α, scale·α]. Over-approximating by one index
    // is harmless (the extra tiles contribute zero overlap volume).
    // A tile at index z spans [(2·spacing·z − 1)·h, (2·spacing·z + 1)·h] in a
    // footprint coordinate with half-width h, so it meets the window
    // [-scale·h, scale·h] iff |2·spacing·z| ≤ scale + 1.
    let bound = (rat_int(scale + 1) / (rat_int(2) * spacing)).ceil();
    let b = num::traits::ToPrimitive::to_i64(&bound.to_integer()).unwrap();
    let r1 = -b..=b;
    let r2 = r1.clone();

    let mut tiles: Vec<BishearBox> = Vec::new();
    for z1 in r1.clone() {
        for z2 in r2.clone() {
            // For this footprint cell, find the z3 range whose fibers can
            // meet the window: the sheared coordinate of window points
            // under this tile's shear field stays within exact corner
            // bounds, so solve for the tile fiber indices meeting them.
            let probe = params
                .region()
                .right_translate(&embed((z1, z2, 0)));
            if probe.i1.intersect_positive(&window.i1).is_none()
                || probe.i2.intersect_positive(&window.i2).is_none()
            {
                continue;
            }
            // Sheared value s = t3 − p·t1 over the window (q = 0 for tiles):
            // extremes at corners of the window footprint.
            let p = &probe.p;
            let cands = [
                window.i3.lo() - p * window.i1.lo(),
                window.i3.lo() - p * window.i1.hi(),
                window.i3.hi() - p * window.i1.lo(),
                window.i3.hi() - p * window.i1.hi(),
            ];
            let mut smin = cands[0].clone();
            let mut smax = cands[0].clone();
            for c in &cands[1..] {
                smin = rat_min(&smin, c);
                smax = rat_max(&smax, c);
            }
            // Tile z3 has sheared range [base + step·z3 − γ, base + step·z3 + γ]
            // where base is probe's i3 midpoint and step = 2γ·spacing.
            let base = probe.i3.midpoint();
            let step = rat_int(2) * &params.gamma * spacing;
            let lo_idx = ((smin - &params.gamma - &base) / &step).floor().to_integer();
            let hi_idx = ((smax + &params.gamma - &base) / &step).ceil().to_integer();
            let lo_idx = num::traits::ToPrimitive::to_i64(&lo_idx).unwrap();
            let hi_idx = num::traits::ToPrimitive::to_i64(&hi_idx).unwrap();
            for z3 in lo_idx..=hi_idx {
                tiles.push(params.region().right_translate(&embed((z1, z2, z3))));
            }
        }
    }

    // Covered volume counts each tile's window overlap once, so it
    // over-counts exactly when distinct tiles overlap; the family tiles the
    // window iff the pairwise overlap is zero AND the covered volume equals
    // the window volume. `uncovered_volume` is clamped at zero so that the
    // compressed-lattice control (overlaps, hence over-count) still reports
    // a sensible value.
    let window_volume = window.volume();
    let mut covered = Rat::zero();
    for t in &tiles {
        covered += t.intersect_volume(&window);
    }
    let mut pairwise = Rat::zero();
    for (i, a) in tiles.iter().enumerate() {
        for b in tiles.iter().skip(i + 1) {
            pairwise += a.intersect_volume(b);
        }
    }
    let gap = &window_volume - &covered;
    let uncovered = if gap > Rat::zero() { gap } else { Rat::zero() };
    let exact = covered == window_volume && pairwise.is_zero();
    TilingReport {
        tiles: tiles.len(),
        window_volume,
        covered_volume: covered,
        uncovered_volume: uncovered,
        pairwise_overlap: pairwise,
        exact,
    }
}

/// Exact translation ratio `λ(gF Δ F)/λ(F) = 2·(λ(F) − λ(gF ∩ F))/λ(F)`
/// for the centered box `F = I(α,β,γ)` under left translation by `g`.
pub fn translation_ratio(g: &GroupElement, params: &BoxParams) -> Rat {
    let f = params.region();
    let gf = f.left_translate(g);
    let vol = f.volume();
    let inter = f.intersect_volume(&gf);
    rat_int(2) * (&vol - &inter) / &vol
}

/// Result of the product/inverse envelope verification.
#[derive(Clone, Debug, Serialize)]
pub struct EnvelopeReport {
    /// Every sampled/corner product landed inside the envelope.
    pub contained: bool,
    /// For each of the six faces (±t1, ±t2, ±t3), whether some product
    /// attains it exactly, certifying minimality.
    pub faces_attained: [bool; 6],
}

impl EnvelopeReport {
    /// Whether the envelope is both valid and minimal.
    pub fn minimal_and_contained(&self) -> bool {
        self.contained && self.faces_attained.iter().all(|&b| b)
    }
}

fn dyadic_grid(ivl: &Interval, levels: u32) -> Vec<Rat> {
    let n = 1i64 << levels;
    (0..=n)
        .map(|k| ivl.lo() + ivl.width() * crate::rat::rat(k, n))
        .collect()
}

/// Verifies `I(a)·I(b) ⊆ product_bound(a, b)` on a dyadic grid of factor
/// pairs (which includes all corners) and records which envelope faces are
/// attained.
pub fn product_envelope_check(a: &BoxParams, b: &BoxParams, levels: u32) -> EnvelopeReport {
    let bound = a.product_bound(b).region();
    let box_a = a.region();
    let box_b = b.region();
    let mut contained = true;
    let mut faces = [false; 6];
    for x1 in dyadic_grid(&box_a.i1, levels) {
        for x2 in dyadic_grid(&box_a.i2, levels) {
            for x3 in dyadic_grid(&box_a.i3, levels) {
                let x = GroupElement::new(x1.clone(), x2.clone(), x3.clone());
                for y1 in dyadic_grid(&box_b.i1, levels) {
                    for y2 in dyadic_grid(&box_b.i2, levels) {
                        for y3 in dyadic_grid(&box_b.i3, levels) {
                            let y = GroupElement::new(y1.clone(), y2.clone(), y3.clone());
                            let z = x.mul(&y);
                            if !bound.contains_point(&z) {
                                contained = false;
                            }
                            mark_faces(&z, &bound, &mut faces);
                        }
                    }
                }
            }
        }
    }
    EnvelopeReport {
        contained,
        faces_attained: faces,
    }
}

/// Verifies `I(a)⁻¹ ⊆ inverse_bound(a)` on a dyadic grid and records face
/// attainment.
pub fn inverse_envelope_check(a: &BoxParams, levels: u32) -> EnvelopeReport {
    let bound = a.inverse_bound().region();
    let box_a = a.region();
    let mut contained = true;
    let mut faces = [false; 6];
    for x1 in dyadic_grid(&box_a.i1, levels) {
        for x2 in dyadic_grid(&box_a.i2, levels) {
            for x3 in dyadic_grid(&box_a.i3, levels) {
                let x = GroupElement::new(x1.clone(), x2.clone(), x3.clone()).inv();
                if !bound.contains_point(&x) {
                    contained = false;
                }
                mark_faces(&x, &bound, &mut faces);
            }
        }
    }
    EnvelopeReport {
        contained,
        faces_attained: faces,
    }
}

fn mark_faces(z: &GroupElement, bound: &BishearBox, faces: &mut [bool; 6]) {
    if &z.t1 == bound.i1.lo() {
        faces[0] = true;
    }
    if &z.t1 == bound.i1.hi() {
        faces[1] = true;
    }
    if &z.t2 == bound.i2.lo() {
        faces[2] = true;
    }
    if &z.t2 == bound.i2.hi() {
        faces[3] = true;
    }
    if &z.t3 == bound.i3.lo() {
        faces[4] = true;
    }
    if &z.t3 == bound.i3.hi() {
        faces[5] = true;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn translation_ratios_match_closed_forms() {
        // a(1) on I(1,1,γ): 1 + 1/(4γ); c(1): 1/γ; b(1): 1.
        let a1 = GroupElement::a(rat_int(1));
        let b1 = GroupElement::b(rat_int(1));
        let c1 = GroupElement::c(rat_int(1));
        for (gamma, expect_a) in [
            (1, rat(5, 4)),
            (10, rat(41, 40)),
            (100, rat(401, 400)),
            (1000, rat(4001, 4000)),
        ] {
            let p = BoxParams::from_ints(1, 1, gamma);
            assert_eq!(translation_ratio(&a1, &p), expect_a);
            assert_eq!(translation_ratio(&c1, &p), rat(1, gamma));
            assert_eq!(translation_ratio(&b1, &p), rat_int(1));
        }
        // Generic parameters, independently computed: 29/40 on (2,3,5).
        let p = BoxParams::from_ints(2, 3, 5);
        assert_eq!(translation_ratio(&a1, &p), rat(29, 40));
    }

    #[test]
    fn translation_ratio_of_identity_is_zero() {
        let p = BoxParams::from_ints(2, 3, 5);
        assert_eq!(
            translation_ratio(&GroupElement::identity(), &p),
            Rat::zero()
        );
    }

    #[test]
    fn lattice_tiles_partition_unit_window() {
        let p = BoxParams::from_ints(1, 1, 1);
        let rep = tiling_check(&p, 1, &rat_int(1));
        assert!(rep.exact, "{rep:?}");
        assert_eq!(rep.covered_volume, rep.window_volume);
        assert_eq!(rep.pairwise_overlap, Rat::zero());
    }

    #[test]
    fn lattice_tiles_partition_radius_two_window() {
        let p = BoxParams::from_ints(1, 1, 1);
        let rep = tiling_check(&p, 2, &rat_int(1));
        assert!(rep.exact, "{rep:?}");
    }

    #[test]
    fn lattice_tiles_partition_for_generic_rational_parameters() {
        let p = BoxParams::new(rat(1, 2), rat_int(3), rat(7, 3));
        let rep = tiling_check(&p, 2, &rat_int(1));
        assert!(rep.exact, "{rep:?}");
    }

    #[test]
    fn perturbed_lattice_fails_the_tiling_check() {
        let p = BoxParams::from_ints(1, 1, 1);
        // Compressed lattice: tiles overlap.
        let rep = tiling_check(&p, 1, &rat(9, 10));
        assert!(!rep.exact);
        assert!(rep.pairwise_overlap > Rat::zero());
        // Stretched lattice: gaps appear (the first gap sits beyond the
        // central cell, so look at a scale-2 window).
        let rep = tiling_check(&p, 2, &rat(11, 10));
        assert!(!rep.exact);
        assert!(rep.uncovered_volume > Rat::zero());
    }

    #[test]
    fn product_envelope_contains_and_is_minimal() {
        let a = BoxParams::from_ints(1, 2, 1);
        let b = BoxParams::new(rat(1, 2), rat(3, 2), rat_int(2));
        let rep = product_envelope_check(&a, &b, 1);
        assert!(rep.minimal_and_contained(), "{rep:?}");
        assert_eq!(
            a.product_bound(&b),
            BoxParams::new(rat(3, 2), rat(7, 2), rat(9, 2))
        );
    }

    #[test]
    fn inverse_envelope_contains_and_is_minimal() {
        let a = BoxParams::from_ints(2, 3, 1);
        let rep = inverse_envelope_check(&a, 2);
        assert!(rep.minimal_and_contained(), "{rep:?}");
        assert_eq!(a.inverse_bound(), BoxParams::from_ints(2, 3, 7));
    }

    #[test]
    fn inverse_overlap_closed_form() {
        assert_eq!(
            BoxParams::from_ints(1, 1, 1).inverse_overlap_volume(),
            Some(rat_int(7))
        );
        assert_eq!(
            BoxParams::from_ints(1, 1, 10).inverse_overlap_volume(),
            Some(rat_int(79))
        );
        assert_eq!(
            BoxParams::from_ints(2, 1, 3).inverse_overlap_volume(),
            Some(rat_int(44))
        );
        // Clipped regime is not rational.
        assert_eq!(
            BoxParams::new(rat_int(1), rat_int(2), rat(1, 2)).inverse_overlap_volume(),
            None
        );
    }

    #[test]
    fn inverse_overlap_closed_form_agrees_with_mc() {
        use crate::mc::mc_volume;
        let p = BoxParams::from_ints(2, 1, 3);
        let bx = p.region();
        let exact = crate::rat::rat_to_f64(&p.inverse_overlap_volume().unwrap());
        let est = mc_volume(
            |x| bx.contains_point(x) && bx.contains_point(&x.inv()),
            &bx,
            50_000,
            99,
            2,
        );
        assert!(est.sigmas_from(exact) < 4.0);
    }

    #[test]
    fn max_generator_ratio_decreases_strictly_in_gamma() {
        let gens = [
            GroupElement::a(rat_int(1)),
            GroupElement::b(rat_int(1)),
            GroupElement::c(rat_int(1)),
        ];
        // Along the γ-only family b(1) keeps ratio 1, so the meaningful
        // strictly-decreasing statistic is the max over a(1) and c(1):
        // 1 + 1/(4γ) for γ ≥ 1.
        let mut prev: Option<Rat> = None;
        for gamma in [1i64, 2, 4, 8, 16, 32] {
            let p = BoxParams::from_ints(1, 1, gamma);
            let ac_worst = [
                translation_ratio(&gens[0], &p),
                translation_ratio(&gens[2], &p),
            ]
            .into_iter()
            .max()
            .unwrap();
            assert_eq!(
                ac_worst,
                rat_int(1) + rat(1, 4 * gamma),
                "closed form 1 + 1/(4γ) at γ={gamma}"
            );
            if let Some(pv) = prev {
                assert!(ac_worst < pv, "ratio did not decrease at γ={gamma}");
            }
            prev = Some(ac_worst);
        }
    }

    #[test]
    fn cube_family_is_folner_along_all_generators() {
        // I(n, n, n²) shrinks the ratio for a, b and c simultaneously.
        let gens = [
            GroupElement::a(rat_int(1)),
            GroupElement::b(rat_int(1)),
            GroupElement::c(rat_int(1)),
        ];
        let mut prev: Option<Rat> = None;
        for n in [1i64, 2, 4, 8] {
            let p = BoxParams::from_ints(n, n, n * n);
            let worst = gens
                .iter()
                .map(|g| translation_ratio(g, &p))
                .max()
                .unwrap();
            if let Some(pv) = prev {
                assert!(worst < pv);
            }
            prev = Some(worst);
        }
    }
}
