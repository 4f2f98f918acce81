//! Tower schedules, cylinder sets, exact measures, and the induced action.
//!
//! A *schedule* is the combinatorial skeleton of a cut-and-stack
//! construction: a sequence of centered level boxes `F_0 ⊆ F_1 ⊆ …` (given
//! by their parameters) together with finite translation sets
//! `C_1, C_2, …`, subject to
//!
//! - **counts**: `#C_{n+1} ≥ 2`;
//! - **containment**: `F_n · C_{n+1} ⊆ F_{n+1}`;
//! - **disjointness**: `λ(F_n·c ∩ F_n·c′) = 0` for distinct `c, c′ ∈ C_{n+1}`.
//!
//! The inverse limit of the level spaces `X_n ≅ F_n × Π_{k>n} C_k` carries a
//! σ-finite measure fixed by `μ([A]_n) = λ(A) / Π_{k≤n} #C_k` on cylinders
//! `[A]_n`, a normalization that is consistent across levels. The group acts
//! by left translation on the leading coordinate; a finite-level verifier
//! realizes `T_g[A]_n` by refining until the translated region fits inside a
//! level box.
//!
//! Everything here is exact: regions are finite unions of sheared boxes,
//! measures are rationals, and the identities relating levels — refinement
//! additivity, count scaling, proportionality to `λ(A)/λ(F_n)` — hold as
//! rational equalities, which the test suite asserts with `==`.

use num::bigint::BigInt;
use num::traits::{One, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::folner::{translation_ratio, BoxParams};
use crate::group::GroupElement;
use crate::rat::{format_rat, Rat};
use crate::region::{BishearBox, Region};

/// Default ceiling on the number of region pieces any operation may create.
pub const DEFAULT_PART_BUDGET: usize = 100_000;

/// Which of the three concrete constructions a schedule came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    /// Finite measure, mixing: stochastically equidistributed spacers.
    Mixing,
    /// Infinite σ-finite measure: central arithmetic-progression spacers.
    Infinite,
    /// Finite measure with time-asymmetric higher-order correlations:
    /// period-5 cumulative central spacers on every third step.
    Asymmetric,
}

/// Builder metadata recorded for one construction step (excluded from the
/// schedule hash; purely descriptive).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepAnnotation {
    /// The C-set was produced from a stochastic spacer map over an index
    /// grid, with the recorded equidistribution certificate.
    Stochastic {
        /// Lattice-embedding parameters used for this step.
        phi: BoxParams,
        /// Box the spacer comb lives in.
        s_box: BoxParams,
        /// Inclusive index half-widths of the fiber grid.
        h_dims: [i64; 3],
        /// Comb half-counts per axis inside `s_box`.
        d_dims: [i64; 3],
        /// Certified worst window-pair distance of the accepted spacer map.
        pair_distance: f64,
        /// Number of map draws until acceptance.
        attempts: u32,
        /// Sampled gap between the comb average and the box integral of a
        /// correlation kernel (quadrature sanity figure).
        quad_error: f64,
    },
    /// The C-set is central with offsets at Sidon-spaced multiples of a
    /// common step.
    CentralSidon {
        /// Common step of the offsets.
        #[serde(with = "crate::rat::serde_rat")]
        step: Rat,
        /// Sidon multipliers actually used.
        indices: Vec<i64>,
    },
    /// The C-set consists of central elements at cumulative offsets driven
    /// by a periodic spacer pattern.
    CentralPeriodic {
        /// Lattice-embedding parameters used for this step.
        phi: BoxParams,
        /// Lowest pattern index used.
        index_lo: i64,
        /// Highest pattern index used.
        index_hi: i64,
    },
    /// No annotation recorded.
    Plain,
}

/// A complete schedule: level boxes, translation sets, annotations, and a
/// content hash over the semantic fields.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Schedule {
    kind: ScheduleKind,
    /// `f[n]` holds the parameters of the level box `F_n`; length is
    /// `levels() + 1`.
    f: Vec<BoxParams>,
    /// `c[n]` holds `C_{n+1}`; length is `levels()`.
    c: Vec<Vec<GroupElement>>,
    /// One annotation per step; length is `levels()`.
    annotations: Vec<StepAnnotation>,
    /// Hex SHA-256 over the canonical serialization of `(kind, f, c)`.
    hash: String,
}

/// Serialized form (hash included and re-verified on load).
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleFile {
    kind: ScheduleKind,
    f: Vec<BoxParams>,
    c: Vec<Vec<GroupElement>>,
    annotations: Vec<StepAnnotation>,
    hash: String,
}

#[derive(Serialize)]
struct HashedContent<'a> {
    kind: &'a ScheduleKind,
    f: &'a [BoxParams],
    c: &'a [Vec<GroupElement>],
}

fn content_hash(kind: &ScheduleKind, f: &[BoxParams], c: &[Vec<GroupElement>]) -> String {
    let json = serde_json::to_string(&HashedContent { kind, f, c })
        .expect("schedule content serialization cannot fail");
    let mut h = Sha256::new();
    h.update(json.as_bytes());
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

impl Schedule {
    /// Assembles a schedule from parts, checking only shape (structural
    /// validity is the job of [`Schedule::validate`]).
    pub fn from_parts(
        kind: ScheduleKind,
        f: Vec<BoxParams>,
        c: Vec<Vec<GroupElement>>,
        annotations: Vec<StepAnnotation>,
    ) -> Result<Schedule> {
        if f.is_empty() {
            return Err(Error::Config("a schedule needs at least one level box".into()));
        }
        if c.len() + 1 != f.len() {
            return Err(Error::Config(format!(
                "schedule shape mismatch: {} level boxes need {} translation sets, got {}",
                f.len(),
                f.len() - 1,
                c.len()
            )));
        }
        if annotations.len() != c.len() {
            return Err(Error::Config(format!(
                "schedule shape mismatch: {} steps but {} annotations",
                c.len(),
                annotations.len()
            )));
        }
        if let Some(n) = c.iter().position(|set| set.is_empty()) {
            return Err(Error::Config(format!("translation set {} is empty", n + 1)));
        }
        let hash = content_hash(&kind, &f, &c);
        Ok(Schedule {
            kind,
            f,
            c,
            annotations,
            hash,
        })
    }

    /// Number of construction steps (one less than the number of levels).
    pub fn levels(&self) -> usize {
        self.c.len()
    }

    /// Which construction the schedule came from.
    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    /// Content hash over `(kind, f, c)`.
    pub fn hash(&self) -> &str {
        &self.hash
    }

    /// Parameters of the level box `F_n`.
    pub fn f_params(&self, n: usize) -> &BoxParams {
        &self.f[n]
    }

    /// The level box `F_n` as a region primitive.
    pub fn f_box(&self, n: usize) -> BishearBox {
        self.f[n].region()
    }

    /// The translation set `C_n` for `1 ≤ n ≤ levels()`.
    pub fn c_set(&self, n: usize) -> &[GroupElement] {
        assert!(n >= 1 && n <= self.c.len(), "C_{n} is not part of this schedule");
        &self.c[n - 1]
    }

    /// Annotation recorded for the step that produced `C_n`.
    pub fn annotation(&self, n: usize) -> &StepAnnotation {
        assert!(n >= 1 && n <= self.annotations.len());
        &self.annotations[n - 1]
    }

    /// `Π_{k=1..=n} #C_k` as a big integer (empty product for `n = 0`).
    pub fn c_count_product(&self, n: usize) -> BigInt {
        let mut acc = BigInt::one();
        for k in 1..=n {
            acc *= BigInt::from(self.c_set(k).len());
        }
        acc
    }

    /// Raw measure of the full level-`n` tower slice `X_n`:
    /// `λ(F_n) / Π_{k≤n} #C_k`. Nondecreasing in `n`.
    pub fn level_mass(&self, n: usize) -> Rat {
        self.f[n].volume() / Rat::from_integer(self.c_count_product(n))
    }

    /// Raw measure of the top slice `X_N`, the normalizer used by
    /// [`Schedule::measure`].
    pub fn top_mass(&self) -> Rat {
        self.level_mass(self.levels())
    }

    /// Wraps a region as a cylinder at a level, after checking that the
    /// region sits inside the level box.
    pub fn cylinder(&self, level: usize, region: Region) -> Result<Cylinder> {
        if level > self.levels() {
            return Err(Error::Config(format!(
                "level {level} exceeds the schedule's {} levels",
                self.levels()
            )));
        }
        let outer = self.f_box(level);
        if !region.contained_in_box(&outer) {
            return Err(Error::Config(format!(
                "cylinder base region is not contained in the level-{level} box"
            )));
        }
        Ok(Cylinder {
            level,
            region,
            schedule_hash: self.hash.clone(),
        })
    }

    /// The full cylinder `[F_n]_n`.
    pub fn full_cylinder(&self, level: usize) -> Result<Cylinder> {
        self.cylinder(level, Region::from_box(self.f_box(level)))
    }

    fn check_hash(&self, cyl: &Cylinder) -> Result<()> {
        if cyl.schedule_hash != self.hash {
            return Err(Error::HashMismatch {
                expected: cyl.schedule_hash.clone(),
                actual: self.hash.clone(),
            });
        }
        Ok(())
    }

    /// Rewrites `[A]_n` as a level-`m` cylinder (`m ≥ n`) via
    /// `[A]_n = ⊔_{c ∈ C_{n+1}·…·C_m} [A·c]_m`. Exact; the part count
    /// multiplies by `Π #C_k` and is capped by `budget`.
    pub fn refine(&self, cyl: &Cylinder, to_level: usize, budget: usize) -> Result<Cylinder> {
        self.check_hash(cyl)?;
        if to_level < cyl.level {
            return Err(Error::Config(format!(
                "cannot refine downwards from level {} to {}",
                cyl.level, to_level
            )));
        }
        if to_level > self.levels() {
            return Err(Error::Config(format!(
                "refinement target {to_level} exceeds the schedule's {} levels",
                self.levels()
            )));
        }
        let mut parts: Vec<BishearBox> = cyl.region.parts().to_vec();
        for k in cyl.level..to_level {
            let c_next = self.c_set(k + 1);
            let needed = parts.len() * c_next.len();
            if needed > budget {
                return Err(Error::BudgetExceeded {
                    actual: needed,
                    budget,
                });
            }
            let mut next = Vec::with_capacity(needed);
            for part in &parts {
                for c in c_next {
                    next.push(part.right_translate(c));
                }
            }
            parts = next;
        }
        Ok(Cylinder {
            level: to_level,
            region: Region::from_disjoint_parts(parts),
            schedule_hash: cyl.schedule_hash.clone(),
        })
    }

    /// Raw cylinder measure `λ(A) / Π_{k≤n} #C_k`.
    pub fn measure_raw(&self, cyl: &Cylinder) -> Result<Rat> {
        self.check_hash(cyl)?;
        Ok(cyl.region.volume() / Rat::from_integer(self.c_count_product(cyl.level)))
    }

    /// Cylinder measure normalized by the top slice `X_N`, so the full
    /// top-level cylinder has measure 1.
    pub fn measure(&self, cyl: &Cylinder) -> Result<Rat> {
        Ok(self.measure_raw(cyl)? / self.top_mass())
    }

    /// Applies the action of `g` to a cylinder: finds the smallest level
    /// `m ≥ n` with `g·A_m ⊆ F_m` (refining as needed) and returns
    /// `[g·A_m]_m`. Errors with [`Error::Overflow`] if no level of the
    /// schedule suffices.
    pub fn act(&self, g: &GroupElement, cyl: &Cylinder, budget: usize) -> Result<Cylinder> {
        self.check_hash(cyl)?;
        let mut current = cyl.clone();
        for m in cyl.level..=self.levels() {
            if m > current.level {
                current = self.refine(&current, m, budget)?;
            }
            let translated = current.region.left_translate(g);
            if translated.contained_in_box(&self.f_box(m)) {
                return Ok(Cylinder {
                    level: m,
                    region: translated,
                    schedule_hash: cyl.schedule_hash.clone(),
                });
            }
        }
        Err(Error::Overflow {
            max_level: self.levels(),
            context: format!("translate by {} of a level-{} cylinder", g, cyl.level),
        })
    }

    /// Translates a cylinder by `g` at the smallest level where the
    /// translate fits exactly (overflow volume zero). When no level of the
    /// finite schedule suffices, returns the translate at the top level
    /// together with the exact volume that sticks out of the top box: the
    /// part inside the box is still a genuine top-level cylinder base, and
    /// the sticking-out volume bounds the mass the finite tower cannot see.
    fn translate_with_defect(
        &self,
        g: &GroupElement,
        cyl: &Cylinder,
        budget: usize,
    ) -> Result<TranslatedFactor> {
        self.check_hash(cyl)?;
        let mut current = cyl.clone();
        let top = self.levels();
        for m in cyl.level..=top {
            if m > current.level {
                current = self.refine(&current, m, budget)?;
            }
            let translated = current.region.left_translate(g);
            if translated.contained_in_box(&self.f_box(m)) {
                return Ok(TranslatedFactor {
                    level: m,
                    region: translated,
                    overflow: Rat::zero(),
                });
            }
            if m == top {
                let box_region = Region::from_box(self.f_box(top));
                let inside = translated.intersect_volume(&box_region);
                let overflow = translated.volume() - inside;
                return Ok(TranslatedFactor {
                    level: top,
                    region: translated,
                    overflow,
                });
            }
        }
        unreachable!("the level scan always reaches the top level")
    }

    /// Exact correlation `μ(T_g A ∩ B)`, raw and normalized, with the same
    /// truncation-defect certificate as [`Schedule::multi_correlate`].
    /// Valid for arbitrary `g`: pairwise intersection volumes never need a
    /// common shear field.
    pub fn correlate(
        &self,
        g: &GroupElement,
        a: &Cylinder,
        b: &Cylinder,
        budget: usize,
    ) -> Result<Correlation> {
        self.multi_correlate(&[g.clone(), GroupElement::identity()], &[a, b], budget)
    }

    /// Exact k-way correlation `μ(T_{g_1} A_1 ∩ … ∩ T_{g_k} A_k)` with a
    /// truncation-defect certificate.
    ///
    /// Each factor is translated at the smallest level where it fits; a
    /// factor still overflowing the top box is clipped to it, and the
    /// clipped-away mass accumulates into [`Correlation::defect`]. The
    /// reported value is an exact lower bound for the true correlation and
    /// undershoots it by at most `defect`; `defect = 0` certifies
    /// exactness. (Disjointness of the level translates guarantees the
    /// fitted parts alias nothing else, so only the clipped mass is ever
    /// unaccounted for.)
    ///
    /// Pairwise volumes are exact for arbitrary shears. For `k ≥ 3` the
    /// factor regions must be shear-compatible (guaranteed when all spacers
    /// in play are central), otherwise [`Error::ShearMismatch`] is reported
    /// rather than an approximation.
    pub fn multi_correlate(
        &self,
        gs: &[GroupElement],
        cyls: &[&Cylinder],
        budget: usize,
    ) -> Result<Correlation> {
        if gs.len() != cyls.len() || gs.is_empty() {
            return Err(Error::Config(
                "multi_correlate needs matching, nonempty element/cylinder lists".into(),
            ));
        }
        let mut factors = Vec::with_capacity(gs.len());
        for (g, cyl) in gs.iter().zip(cyls) {
            factors.push(self.translate_with_defect(g, cyl, budget)?);
        }
        let m = factors.iter().map(|f| f.level).max().unwrap();
        let mut overflow_total = Rat::zero();
        let mut any_fitted = false;
        let mut regions = Vec::with_capacity(factors.len());
        for f in factors {
            if f.overflow.is_zero() {
                any_fitted = true;
            } else {
                overflow_total += &f.overflow;
            }
            let region = if f.level < m {
                let as_cyl = Cylinder {
                    level: f.level,
                    region: f.region,
                    schedule_hash: self.hash.clone(),
                };
                self.refine(&as_cyl, m, budget)?.region
            } else {
                f.region
            };
            regions.push(region);
        }
        // A factor that fits is contained in the top box, which then clips
        // the intersection implicitly; only when every factor overflows must
        // the box join the intersection as an explicit extra factor.
        let box_region = Region::from_box(self.f_box(m));
        let mut refs: Vec<&Region> = regions.iter().collect();
        if !any_fitted {
            refs.push(&box_region);
        }
        let vol = match refs.len() {
            1 => refs[0].volume(),
            2 => refs[0].intersect_volume(refs[1]),
            _ => Region::multi_intersect_volume(&refs, budget)?,
        };
        self.correlation_from_volume(vol, m, overflow_total)
    }

    fn correlation_from_volume(
        &self,
        vol: Rat,
        level: usize,
        overflow: Rat,
    ) -> Result<Correlation> {
        let scale = Rat::from_integer(self.c_count_product(level));
        let raw = vol / &scale;
        let normalized = &raw / self.top_mass();
        let defect = overflow / scale / self.top_mass();
        Ok(Correlation {
            raw,
            normalized,
            defect,
            level,
        })
    }

    /// The depth-`n` truncation: the same construction kept only up to
    /// level `n`. The truncation carries its own content hash, so cylinders
    /// never flow between a schedule and its truncations implicitly.
    pub fn truncated(&self, n: usize) -> Result<Schedule> {
        if n > self.levels() {
            return Err(Error::Config(format!(
                "truncation depth {n} exceeds the schedule's {} levels",
                self.levels()
            )));
        }
        Schedule::from_parts(
            self.kind,
            self.f[..=n].to_vec(),
            self.c[..n].to_vec(),
            self.annotations[..n].to_vec(),
        )
    }

    /// Serializes to pretty JSON (deterministic field order).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serialization cannot fail")
    }

    /// Parses a schedule from JSON and verifies the recorded content hash.
    pub fn from_json(text: &str) -> Result<Schedule> {
        let file: ScheduleFile = serde_json::from_str(text)?;
        let schedule = Schedule::from_parts(file.kind, file.f, file.c, file.annotations)?;
        if schedule.hash != file.hash {
            return Err(Error::HashMismatch {
                expected: file.hash,
                actual: schedule.hash,
            });
        }
        Ok(schedule)
    }

    /// Structural validation: counts, containment, disjointness, mass
    /// bookkeeping, and translation-ratio decay along test elements.
    pub fn validate(&self, folner_elements: &[(String, GroupElement)]) -> ValidationReport {
        let mut level_checks = Vec::with_capacity(self.levels());
        let mut partial = Rat::one();
        for n in 0..self.levels() {
            let c_next = self.c_set(n + 1);
            let f_n = self.f_box(n);
            let f_next = self.f_box(n + 1);
            let c_count = c_next.len();
            let c_count_ok = c_count >= 2;

            let translates: Vec<BishearBox> =
                c_next.iter().map(|c| f_n.right_translate(c)).collect();
            let containment_ok = translates.iter().all(|t| f_next.contains_box(t));

            let mut worst_pair_overlap = Rat::zero();
            for (i, a) in translates.iter().enumerate() {
                for b in translates.iter().skip(i + 1) {
                    let v = a.intersect_volume(b);
                    if v > worst_pair_overlap {
                        worst_pair_overlap = v;
                    }
                }
            }
            let disjoint_ok = worst_pair_overlap.is_zero();

            let mass_ratio = f_next.volume()
                / (f_n.volume() * Rat::from_integer(BigInt::from(c_count)));
            let spacer_summand = &mass_ratio - Rat::one();
            partial *= &mass_ratio;

            level_checks.push(LevelCheck {
                level: n,
                c_count,
                c_count_ok,
                containment_ok,
                worst_pair_overlap,
                disjoint_ok,
                mass_ratio,
                spacer_summand,
                partial_product: partial.clone(),
            });
        }

        let mut folner_checks = Vec::new();
        for (label, g) in folner_elements {
            let ratios: Vec<Rat> = (0..=self.levels())
                .map(|n| translation_ratio(g, &self.f[n]))
                .collect();
            let non_increasing = ratios.windows(2).all(|w| w[1] <= w[0]);
            folner_checks.push(FolnerCheck {
                label: label.clone(),
                element: g.clone(),
                ratios,
                non_increasing,
            });
        }

        let level_masses: Vec<Rat> = (0..=self.levels()).map(|n| self.level_mass(n)).collect();
        let all_ok = level_checks
            .iter()
            .all(|lc| lc.c_count_ok && lc.containment_ok && lc.disjoint_ok)
            && folner_checks.iter().all(|fc| fc.non_increasing);
        ValidationReport {
            kind: self.kind,
            levels: self.levels(),
            level_checks,
            folner_checks,
            level_masses,
            all_ok,
        }
    }
}

/// A cylinder set `[A]_n`: a region `A ⊆ F_n` tagged with its level and the
/// hash of the schedule it belongs to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cylinder {
    /// Tower level `n`.
    pub level: usize,
    /// Base region `A ⊆ F_n`.
    pub region: Region,
    /// Hash of the owning schedule; operations verify it.
    pub schedule_hash: String,
}

/// A translated correlation factor: the translate at its chosen level plus
/// the exact volume that failed to fit (zero when the fit is exact).
struct TranslatedFactor {
    level: usize,
    region: Region,
    overflow: Rat,
}

/// An exact correlation value with a truncation certificate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Correlation {
    /// Raw measure `λ(·)/Π #C_k`.
    #[serde(with = "crate::rat::serde_rat")]
    pub raw: Rat,
    /// Raw measure divided by the top-slice mass.
    #[serde(with = "crate::rat::serde_rat")]
    pub normalized: Rat,
    /// Upper bound on the mass the finite tower could not account for, on
    /// the same scale as `normalized`. The true correlation lies in
    /// `[normalized, normalized + defect]`; zero certifies exactness.
    #[serde(with = "crate::rat::serde_rat")]
    pub defect: Rat,
    /// Level at which the intersection was evaluated.
    pub level: usize,
}

/// Per-step outcome of [`Schedule::validate`].
#[derive(Clone, Debug, Serialize)]
pub struct LevelCheck {
    /// Step index `n` (checks govern the pair `F_n → F_{n+1}`).
    pub level: usize,
    /// `#C_{n+1}`.
    pub c_count: usize,
    /// Whether `#C_{n+1} ≥ 2`.
    pub c_count_ok: bool,
    /// Whether `F_n · C_{n+1} ⊆ F_{n+1}` (exact).
    pub containment_ok: bool,
    /// Largest pairwise overlap volume among `{F_n·c}` (exact; must be 0).
    #[serde(with = "crate::rat::serde_rat")]
    pub worst_pair_overlap: Rat,
    /// Whether all pairwise overlaps vanish.
    pub disjoint_ok: bool,
    /// `λ(F_{n+1}) / (λ(F_n)·#C_{n+1})`, the level-mass growth factor.
    #[serde(with = "crate::rat::serde_rat")]
    pub mass_ratio: Rat,
    /// `mass_ratio − 1`: the summand whose series decides finiteness of
    /// the limit measure.
    #[serde(with = "crate::rat::serde_rat")]
    pub spacer_summand: Rat,
    /// Running product of mass ratios up to this step.
    #[serde(with = "crate::rat::serde_rat")]
    pub partial_product: Rat,
}

/// Translation-ratio decay along the level boxes for one test element.
#[derive(Clone, Debug, Serialize)]
pub struct FolnerCheck {
    /// Human-readable label of the element.
    pub label: String,
    /// The element itself.
    pub element: GroupElement,
    /// `λ(gF_n Δ F_n)/λ(F_n)` for `n = 0..=levels`.
    #[serde(with = "crate::rat::serde_rat_vec")]
    pub ratios: Vec<Rat>,
    /// Whether the sequence is non-increasing.
    pub non_increasing: bool,
}

/// Outcome of [`Schedule::validate`].
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    /// Schedule kind.
    pub kind: ScheduleKind,
    /// Number of steps.
    pub levels: usize,
    /// Per-step checks.
    pub level_checks: Vec<LevelCheck>,
    /// Per-element translation-ratio decay.
    pub folner_checks: Vec<FolnerCheck>,
    /// Raw masses `λ(F_n)/Π #C_k` of the slices `X_n`.
    #[serde(with = "crate::rat::serde_rat_vec")]
    pub level_masses: Vec<Rat>,
    /// Conjunction of every boolean check above.
    pub all_ok: bool,
}

impl ValidationReport {
    /// One-line summary, handy for logs.
    pub fn summary(&self) -> String {
        format!(
            "{} levels, checks {}, top mass {}",
            self.levels,
            if self.all_ok { "ok" } else { "FAILED" },
            self.level_masses
                .last()
                .map(format_rat)
                .unwrap_or_default()
        )
    }
}
