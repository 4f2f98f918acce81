//! Finite-level diagnostic reports for built towers.
//!
//! Every figure here is an exact rational produced by the cylinder
//! calculus: correlation-decay tables along one-parameter subgroups,
//! spacer-smearing figures for stochastic steps, symmetric-difference
//! brackets for return-time translates, and the period-5 central-orbit
//! ledger that separates a tower from its inverse arrow.
//!
//! Reports serialize to JSON via serde and to CSV (one line per row) via
//! the emitter methods, with rationals rendered canonically as `p/q`
//! alongside a decimal column for plotting. Where a translate cannot be
//! followed exactly to the end of the finite tower, the row carries the
//! defect certificate instead of a silent approximation.

use num::traits::{Signed, Zero};
use serde::Serialize;

use crate::cf::{Cylinder, Schedule, StepAnnotation};
use crate::error::{Error, Result};
use crate::folner::{lattice_embed, BoxParams};
use crate::group::GroupElement;
use crate::rat::{format_rat, format_rat_decimal, rat_abs, rat_int, Rat};
use crate::region::{BishearBox, Interval, Region};
use crate::schedule::periodic_increment;

// ---------------------------------------------------------------------------
// Test-set families
// ---------------------------------------------------------------------------

/// One-parameter subgroups available to [`correlation_decay`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// `t ↦ a(t)`.
    First,
    /// `t ↦ b(t)`.
    Second,
    /// `t ↦ c(t)` (the center).
    Central,
}

impl Axis {
    /// The subgroup element at parameter `t`.
    pub fn element(&self, t: &Rat) -> GroupElement {
        match self {
            Axis::First => GroupElement::a(t.clone()),
            Axis::Second => GroupElement::b(t.clone()),
            Axis::Central => GroupElement::c(t.clone()),
        }
    }

    /// Short name used in reports: `"a"`, `"b"` or `"c"`.
    pub fn label(&self) -> &'static str {
        match self {
            Axis::First => "a",
            Axis::Second => "b",
            Axis::Central => "c",
        }
    }

    /// Parses a short name.
    pub fn parse(text: &str) -> Result<Axis> {
        match text {
            "a" => Ok(Axis::First),
            "b" => Ok(Axis::Second),
            "c" => Ok(Axis::Central),
            other => Err(Error::Config(format!(
                "unknown axis {other:?}; expected one of a, b, c"
            ))),
        }
    }
}

fn half(x: &Rat) -> Rat {
    x / rat_int(2)
}

/// The standard labeled family inside a box: the full box, then the
/// axis-parallel dyadic cells of every generation up to `depth` (the
/// `8^d` cells obtained by halving each coordinate `d` times).
///
/// Depth 0 is the box alone; each additional generation multiplies by
/// eight, and the depth is capped at 3 to keep families enumerable.
pub fn dyadic_cells(params: &BoxParams, depth: u32) -> Result<Vec<(String, Region)>> {
    if depth > 3 {
        return Err(Error::Config(format!(
            "dyadic family depth {depth} exceeds the supported maximum 3"
        )));
    }
    let mut family = vec![("box".to_string(), Region::from_box(params.region()))];
    let widths = [
        rat_int(2) * &params.alpha,
        rat_int(2) * &params.beta,
        rat_int(2) * &params.gamma,
    ];
    let lows = [-params.alpha.clone(), -params.beta.clone(), -params.gamma.clone()];
    for d in 1..=depth {
        let m = 1i64 << d;
        let cell_axis = |coord: usize, idx: i64| -> Interval {
            let step = &widths[coord] / rat_int(m);
            let lo = &lows[coord] + &step * rat_int(idx);
            let hi = &lo + &step;
            Interval::new(lo, hi)
        };
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let cell = BishearBox::axis(cell_axis(0, i), cell_axis(1, j), cell_axis(2, k));
                    family.push((format!("cell{d}({i},{j},{k})"), Region::from_box(cell)));
                }
            }
        }
    }
    Ok(family)
}

/// A central slab of the box: full first/second-coordinate footprint,
/// third coordinate restricted to `[lo, hi] ⊆ [-γ, γ]`.
pub fn t3_slab(params: &BoxParams, lo: &Rat, hi: &Rat) -> Result<Region> {
    if lo >= hi {
        return Err(Error::Config(format!(
            "slab window [{}, {}] is empty",
            format_rat(lo),
            format_rat(hi)
        )));
    }
    if lo < &-params.gamma.clone() || hi > &params.gamma {
        return Err(Error::Config(format!(
            "slab window [{}, {}] exceeds the box height {}",
            format_rat(lo),
            format_rat(hi),
            format_rat(&params.gamma)
        )));
    }
    Ok(Region::from_box(BishearBox::axis(
        Interval::symmetric(params.alpha.clone()),
        Interval::symmetric(params.beta.clone()),
        Interval::new(lo.clone(), hi.clone()),
    )))
}

/// The fixed family used by [`rigidity_test`]: the left half of the box
/// in the first coordinate (so the non-returning control translate
/// `a(α)` detaches it exactly), split into lower/upper/full central
/// slabs, all of which are thick enough in the third coordinate to keep
/// small central shifts inside them.
pub fn rigidity_family(params: &BoxParams) -> Vec<(String, Region)> {
    let t1 = Interval::new(-params.alpha.clone(), Rat::zero());
    let t2 = Interval::symmetric(params.beta.clone());
    let windows = [
        ("left-lower", Interval::new(-params.gamma.clone(), Rat::zero())),
        ("left-upper", Interval::new(Rat::zero(), params.gamma.clone())),
        ("left-full", Interval::symmetric(params.gamma.clone())),
    ];
    windows
        .into_iter()
        .map(|(label, w)| {
            (
                label.to_string(),
                Region::from_box(BishearBox::axis(t1.clone(), t2.clone(), w)),
            )
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Correlation decay along a subgroup
// ---------------------------------------------------------------------------

/// Stable row notes for evaluations that did not produce a value.
fn error_token(e: &Error) -> String {
    match e {
        Error::Overflow { .. } => "OVERFLOW".into(),
        Error::BudgetExceeded { .. } => "BUDGET_EXCEEDED".into(),
        Error::ShearMismatch { .. } => "SHEAR_MISMATCH".into(),
        other => format!("ERROR: {other}"),
    }
}

/// One grid point of a correlation-decay table.
#[derive(Clone, Debug, Serialize)]
pub struct CorrelationRow {
    /// Subgroup parameter.
    #[serde(with = "crate::rat::serde_rat")]
    pub t: Rat,
    /// The translate `g` applied to the first set.
    pub element: GroupElement,
    /// Exact lower value of `μ(T_g A ∩ B)`, when computable.
    #[serde(with = "crate::rat::serde_rat_opt")]
    pub value: Option<Rat>,
    /// Truncation defect: the true value lies within `value + defect`.
    #[serde(with = "crate::rat::serde_rat_opt")]
    pub defect: Option<Rat>,
    /// `|value − μ(A)μ(B)|`.
    #[serde(with = "crate::rat::serde_rat_opt")]
    pub gap: Option<Rat>,
    /// Level at which the intersection was evaluated.
    pub level_used: Option<usize>,
    /// `"exact"`, a defect remark, or a stable error token.
    pub note: String,
}

/// Correlation-decay table along one subgroup, with a truncation-stability
/// figure against the tower one level shorter.
#[derive(Clone, Debug, Serialize)]
pub struct CorrelationReport {
    pub schedule_hash: String,
    /// Axis label `a`/`b`/`c`.
    pub axis: String,
    /// Level of the two test sets.
    pub level: usize,
    #[serde(with = "crate::rat::serde_rat")]
    pub mu_a: Rat,
    #[serde(with = "crate::rat::serde_rat")]
    pub mu_b: Rat,
    /// The decay target `μ(A)μ(B)`.
    #[serde(with = "crate::rat::serde_rat")]
    pub product_target: Rat,
    pub rows: Vec<CorrelationRow>,
    /// Largest gap among exact rows with `t ≠ 0`.
    #[serde(with = "crate::rat::serde_rat_opt")]
    pub max_exact_gap: Option<Rat>,
    /// Largest row movement when the same table is computed on the tower
    /// truncated one level short (rows exact on both towers only).
    #[serde(with = "crate::rat::serde_rat_opt")]
    pub truncation_shift: Option<Rat>,
    /// Provable bound for that movement: the relative mass the final step
    /// added, `m_N/m_{N−1} − 1`. Row values never move by more.
    #[serde(with = "crate::rat::serde_rat")]
    pub truncation_bound: Rat,
}

/// Computes one row set on a fixed tower; shared by the full table and
/// its truncated-tower rerun.
fn decay_rows(
    s: &Schedule,
    axis: Axis,
    t_values: &[Rat],
    level: usize,
    a: &Region,
    b: &Region,
    target: &Rat,
    budget: usize,
) -> Result<Vec<CorrelationRow>> {
    let cyl_a = s.cylinder(level, a.clone())?;
    let cyl_b = s.cylinder(level, b.clone())?;
    let mut rows = Vec::with_capacity(t_values.len());
    for t in t_values {
        let g = axis.element(t);
        let row = match s.correlate(&g, &cyl_a, &cyl_b, budget) {
            Ok(c) => CorrelationRow {
                t: t.clone(),
                element: g,
                gap: Some(rat_abs(&(&c.normalized - target))),
                note: if c.defect.is_zero() {
                    "exact".into()
                } else {
                    "lower value; defect bounds the unseen mass".into()
                },
                value: Some(c.normalized),
                defect: Some(c.defect),
                level_used: Some(c.level),
            },
            Err(e) => CorrelationRow {
                t: t.clone(),
                element: g,
                value: None,
                defect: None,
                gap: None,
                level_used: None,
                note: error_token(&e),
            },
        };
        rows.push(row);
    }
    Ok(rows)
}

/// Exact correlation-decay table `t ↦ μ(T_{g(t)} A ∩ B)` along one
/// subgroup, against the product target `μ(A)μ(B)`.
///
/// The `t = 0` row is always the exact intersection `μ(A ∩ B)`. Rows
/// whose translate escapes the finite tower report the exact computable
/// lower value together with its defect; rows that cannot be evaluated
/// at all carry a stable error token instead of failing the table.
pub fn correlation_decay(
    s: &Schedule,
    axis: Axis,
    t_values: &[Rat],
    level: usize,
    a: &Region,
    b: &Region,
    budget: usize,
) -> Result<CorrelationReport> {
    if t_values.is_empty() {
        return Err(Error::Config("correlation table needs at least one grid point".into()));
    }
    let cyl_a = s.cylinder(level, a.clone())?;
    let cyl_b = s.cylinder(level, b.clone())?;
    let mu_a = s.measure(&cyl_a)?;
    let mu_b = s.measure(&cyl_b)?;
    let target = &mu_a * &mu_b;
    let rows = decay_rows(s, axis, t_values, level, a, b, &target, budget)?;

    let mut max_exact_gap: Option<Rat> = None;
    for row in &rows {
        if row.t.is_zero() || row.defect != Some(Rat::zero()) {
            continue;
        }
        if let Some(gap) = &row.gap {
            if max_exact_gap.as_ref().is_none_or(|m| gap > m) {
                max_exact_gap = Some(gap.clone());
            }
        }
    }

    let top = s.levels();
    let mass_top = s.level_mass(top);
    let mass_prev = s.level_mass(top.saturating_sub(1));
    let truncation_bound = &mass_top / &mass_prev - rat_int(1);
    let mut truncation_shift = None;
    if top >= 1 && level < top {
        let shorter = s.truncated(top - 1)?;
        let short_mu = {
            let ca = shorter.cylinder(level, a.clone())?;
            let cb = shorter.cylinder(level, b.clone())?;
            shorter.measure(&ca)? * shorter.measure(&cb)?
        };
        let short_rows =
            decay_rows(&shorter, axis, t_values, level, a, b, &short_mu, budget)?;
        for (row, short) in rows.iter().zip(&short_rows) {
            if row.defect != Some(Rat::zero()) || short.defect != Some(Rat::zero()) {
                continue;
            }
            let (Some(v), Some(w)) = (&row.value, &short.value) else {
                continue;
            };
            let shift = rat_abs(&(v - w));
            if truncation_shift.as_ref().is_none_or(|m| &shift > m) {
                truncation_shift = Some(shift);
            }
        }
    }

    Ok(CorrelationReport {
        schedule_hash: s.hash().to_string(),
        axis: axis.label().to_string(),
        level,
        mu_a,
        mu_b,
        product_target: target,
        rows,
        max_exact_gap,
        truncation_shift,
        truncation_bound,
    })
}

impl CorrelationReport {
    /// CSV table, one line per grid point.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["t", "element", "value", "value_decimal", "defect", "gap", "level", "note"])
            .expect("csv row");
        for row in &self.rows {
            w.write_record([
                format_rat(&row.t),
                row.element.to_string(),
                row.value.as_ref().map(format_rat).unwrap_or_default(),
                row.value.as_ref().map(format_rat_decimal).unwrap_or_default(),
                row.defect.as_ref().map(format_rat).unwrap_or_default(),
                row.gap.as_ref().map(format_rat).unwrap_or_default(),
                row.level_used.map(|l| l.to_string()).unwrap_or_default(),
                row.note.clone(),
            ])
            .expect("csv row");
        }
        String::from_utf8(w.into_inner().expect("csv buffer")).expect("csv utf8")
    }
}

// ---------------------------------------------------------------------------
// Symmetric-difference brackets
// ---------------------------------------------------------------------------

/// Exact two-sided bracket for `μ(T_h A Δ A) = 2(μ(A) − μ(T_h A ∩ A))`.
///
/// `stat_upper` uses the computable lower correlation value, so it is an
/// upper bound for the finite-level statistic; `stat_lower` subtracts the
/// defect certificate (clamped at zero). The dimensionless `ratio_*`
/// columns divide by `μ(A)` and are comparable across towers of
/// different depth.
#[derive(Clone, Debug, Serialize)]
pub struct TranslateStat {
    pub element: GroupElement,
    pub level_used: usize,
    #[serde(with = "crate::rat::serde_rat")]
    pub mu: Rat,
    #[serde(with = "crate::rat::serde_rat")]
    pub correlation: Rat,
    #[serde(with = "crate::rat::serde_rat")]
    pub defect: Rat,
    #[serde(with = "crate::rat::serde_rat")]
    pub stat_upper: Rat,
    #[serde(with = "crate::rat::serde_rat")]
    pub stat_lower: Rat,
    #[serde(with = "crate::rat::serde_rat")]
    pub ratio_upper: Rat,
    #[serde(with = "crate::rat::serde_rat")]
    pub ratio_lower: Rat,
}

/// Computes the symmetric-difference bracket of one translate on one
/// cylinder. With `h` the identity the statistic is exactly zero.
pub fn symmetric_difference_stat(
    s: &Schedule,
    h: &GroupElement,
    a: &Cylinder,
    budget: usize,
) -> Result<TranslateStat> {
    let mu = s.measure(a)?;
    if mu.is_zero() {
        return Err(Error::Config("symmetric-difference statistic needs a set of positive mass".into()));
    }
    let corr = s.correlate(h, a, a, budget)?;
    let stat_upper = rat_int(2) * (&mu - &corr.normalized);
    let lower_raw = &stat_upper - rat_int(2) * &corr.defect;
    let stat_lower = if lower_raw.is_negative() { Rat::zero() } else { lower_raw };
    Ok(TranslateStat {
        element: h.clone(),
        level_used: corr.level,
        ratio_upper: &stat_upper / &mu,
        ratio_lower: &stat_lower / &mu,
        correlation: corr.normalized,
        defect: corr.defect,
        stat_upper,
        stat_lower,
        mu,
    })
}

// ---------------------------------------------------------------------------
// Rigidity along the period-5 return translates
// ---------------------------------------------------------------------------

/// One family member at one tower index: the return translate with and
/// without its integer correction, plus the non-returning control.
#[derive(Clone, Debug, Serialize)]
pub struct RigidityRow {
    /// Tower index `n` whose central-orbit step supplies the translates.
    pub n: usize,
    /// Family-member label.
    pub label: String,
    /// Depth of the truncation the row was evaluated on (`n + 1`).
    pub eval_depth: usize,
    /// `h = c(10 γ_n)`: the lattice candidate that misses the orbit
    /// period by the integer drift.
    pub plain: TranslateStat,
    /// `h = c(10 γ_n + 6)`: the exact five-fiber return translate.
    pub corrected: TranslateStat,
    /// `h = a(α)`: a translate transverse to the center; its symmetric
    /// difference stays at full size.
    pub control: TranslateStat,
}

/// Symmetric-difference table showing partial rigidity along the
/// corrected return translates while a transverse control stays flat.
#[derive(Clone, Debug, Serialize)]
pub struct RigidityReport {
    pub schedule_hash: String,
    /// Level of the fixed test family.
    pub family_level: usize,
    pub family_labels: Vec<String>,
    pub rows: Vec<RigidityRow>,
}

/// Runs the rigidity diagnostic at the given tower indices (each must be
/// a central-orbit step). The family is fixed at the smallest requested
/// index, so the same measurable sets are tracked across rows; each row
/// is evaluated on the depth-`n+1` truncation, where every out-of-window
/// translate clips against the top box and lands in the defect
/// certificate.
pub fn rigidity_test(s: &Schedule, n_values: &[usize], budget: usize) -> Result<RigidityReport> {
    if n_values.is_empty() {
        return Err(Error::Config("rigidity test needs at least one tower index".into()));
    }
    let family_level = *n_values.iter().min().expect("nonempty");
    let fam_params = s.f_params(family_level);
    if fam_params.gamma <= rat_int(6) {
        return Err(Error::Config(format!(
            "rigidity family at level {family_level} needs box height above 6, got {}",
            format_rat(&fam_params.gamma)
        )));
    }
    let family = rigidity_family(fam_params);

    let mut rows = Vec::new();
    for &n in n_values {
        if n + 1 > s.levels() {
            return Err(Error::Config(format!(
                "rigidity index {n} needs step {n} of a {}-level schedule",
                s.levels()
            )));
        }
        let StepAnnotation::CentralPeriodic { phi, .. } = s.annotation(n + 1) else {
            return Err(Error::Config(format!(
                "rigidity index {n} is not a central-orbit step"
            )));
        };
        let plain_h = lattice_embed(phi, (0, 0, 5));
        let corrected_h = GroupElement::c(rat_int(6)).mul(&plain_h);
        let control_h = GroupElement::a(fam_params.alpha.clone());
        let eval_depth = n + 1;
        let st = s.truncated(eval_depth)?;
        for (label, region) in &family {
            let cyl = st.cylinder(family_level, region.clone())?;
            rows.push(RigidityRow {
                n,
                label: label.clone(),
                eval_depth,
                plain: symmetric_difference_stat(&st, &plain_h, &cyl, budget)?,
                corrected: symmetric_difference_stat(&st, &corrected_h, &cyl, budget)?,
                control: symmetric_difference_stat(&st, &control_h, &cyl, budget)?,
            });
        }
    }
    Ok(RigidityReport {
        schedule_hash: s.hash().to_string(),
        family_level,
        family_labels: family.iter().map(|(l, _)| l.clone()).collect(),
        rows,
    })
}

impl RigidityReport {
    /// CSV table in long format: one line per (index, member, column).
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "n", "label", "column", "element", "mu", "correlation", "defect", "stat_lower",
            "stat_upper", "ratio_lower", "ratio_upper", "ratio_upper_decimal", "level",
        ])
        .expect("csv row");
        for row in &self.rows {
            for (column, stat) in [
                ("plain", &row.plain),
                ("corrected", &row.corrected),
                ("control", &row.control),
            ] {
                w.write_record([
                    row.n.to_string(),
                    row.label.clone(),
                    column.to_string(),
                    stat.element.to_string(),
                    format_rat(&stat.mu),
                    format_rat(&stat.correlation),
                    format_rat(&stat.defect),
                    format_rat(&stat.stat_lower),
                    format_rat(&stat.stat_upper),
                    format_rat(&stat.ratio_lower),
                    format_rat(&stat.ratio_upper),
                    format_rat_decimal(&stat.ratio_upper),
                    stat.level_used.to_string(),
                ])
                .expect("csv row");
            }
        }
        String::from_utf8(w.into_inner().expect("csv buffer")).expect("csv utf8")
    }
}

// ---------------------------------------------------------------------------
// Spacer-smearing figure for stochastic steps
// ---------------------------------------------------------------------------

/// Supremum of `|μ(T_h A ∩ B) − μ(A)μ(B)|` over a small family, with
/// `h` the central height of one step's spacer envelope.
#[derive(Clone, Debug, Serialize)]
pub struct MixingRow {
    pub n: usize,
    pub h: GroupElement,
    /// Ordered pairs tested.
    pub pairs: usize,
    #[serde(with = "crate::rat::serde_rat")]
    pub sup_gap: Rat,
    #[serde(with = "crate::rat::serde_rat")]
    pub max_defect: Rat,
    pub max_level_used: usize,
}

/// Product-target gaps for the per-step central translates `c(2 γ̃_n)`.
#[derive(Clone, Debug, Serialize)]
pub struct MixingReport {
    pub schedule_hash: String,
    /// Dyadic cells per row beyond the full box.
    pub cells: usize,
    pub rows: Vec<MixingRow>,
}

/// Measures how far one step's spacer smearing has pushed the central
/// translate `h_n = c(2 γ̃_n)` toward the product target, over dyadic
/// cells of the box one level below the step. Constant-spacer builds of
/// the same shape give visibly larger gaps.
pub fn mixing_sequence_test(
    s: &Schedule,
    n_values: &[usize],
    cells: usize,
    budget: usize,
) -> Result<MixingReport> {
    if cells > 8 {
        return Err(Error::Config(format!(
            "mixing figure supports at most 8 cells beyond the box, got {cells}"
        )));
    }
    let mut rows = Vec::new();
    for &n in n_values {
        if n == 0 || n + 1 > s.levels() {
            return Err(Error::Config(format!(
                "mixing figure index {n} needs 1 ≤ n ≤ {}",
                s.levels() - 1
            )));
        }
        let phi = match s.annotation(n + 1) {
            StepAnnotation::Stochastic { phi, .. } => phi,
            StepAnnotation::CentralPeriodic { phi, .. } => phi,
            _ => {
                return Err(Error::Config(format!(
                    "mixing figure index {n} has no spacer envelope annotation"
                )))
            }
        };
        let h = lattice_embed(phi, (0, 0, 1));
        let family: Vec<(String, Region)> = dyadic_cells(s.f_params(n - 1), 1)?
            .into_iter()
            .take(1 + cells)
            .collect();
        let mut cyls = Vec::new();
        for (_, region) in &family {
            let cyl = s.cylinder(n - 1, region.clone())?;
            let mu = s.measure(&cyl)?;
            cyls.push((cyl, mu));
        }
        let mut sup_gap = Rat::zero();
        let mut max_defect = Rat::zero();
        let mut max_level = 0usize;
        let mut pairs = 0usize;
        for (cyl_a, mu_a) in &cyls {
            for (cyl_b, mu_b) in &cyls {
                let corr = s.correlate(&h, cyl_a, cyl_b, budget)?;
                let gap = rat_abs(&(&corr.normalized - mu_a * mu_b));
                if gap > sup_gap {
                    sup_gap = gap;
                }
                if corr.defect > max_defect {
                    max_defect = corr.defect;
                }
                max_level = max_level.max(corr.level);
                pairs += 1;
            }
        }
        rows.push(MixingRow {
            n,
            h,
            pairs,
            sup_gap,
            max_defect,
            max_level_used: max_level,
        });
    }
    Ok(MixingReport {
        schedule_hash: s.hash().to_string(),
        cells,
        rows,
    })
}

impl MixingReport {
    /// CSV table, one line per tower index.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "h", "pairs", "sup_gap", "sup_gap_decimal", "max_defect", "level"])
            .expect("csv row");
        for row in &self.rows {
            w.write_record([
                row.n.to_string(),
                row.h.to_string(),
                row.pairs.to_string(),
                format_rat(&row.sup_gap),
                format_rat_decimal(&row.sup_gap),
                format_rat(&row.max_defect),
                row.max_level_used.to_string(),
            ])
            .expect("csv row");
        }
        String::from_utf8(w.into_inner().expect("csv buffer")).expect("csv utf8")
    }
}

// ---------------------------------------------------------------------------
// Period-5 asymmetry ledger
// ---------------------------------------------------------------------------

/// The drift `ε(j) = 1 − (gap increment at class j)` of the period-5
/// central orbit; the translate `l_n = c(1 + 2γ_n)` maps the class-`j`
/// fiber window onto the next window shifted by `ε(j)`.
fn class_drift(j: i64) -> i64 {
    1 - periodic_increment(j)
}

fn intersect_intervals(windows: &[Interval]) -> Option<Interval> {
    let mut lo = windows[0].lo().clone();
    let mut hi = windows[0].hi().clone();
    for w in &windows[1..] {
        if w.lo() > &lo {
            lo = w.lo().clone();
        }
        if w.hi() < &hi {
            hi = w.hi().clone();
        }
    }
    (lo < hi).then(|| Interval::new(lo, hi))
}

/// One residue class of the quadruple-correlation partition.
#[derive(Clone, Debug, Serialize)]
pub struct AsymmetryQuantity {
    /// Fiber residue class mod 5.
    pub class: i64,
    /// Fibers of this class whose three predecessors exist in the window.
    pub contributing_fibers: usize,
    /// Exact lower value of the class quantity.
    #[serde(with = "crate::rat::serde_rat")]
    pub value: Rat,
    /// The symmetric share: the class pattern mass divided by 5.
    #[serde(with = "crate::rat::serde_rat")]
    pub target: Rat,
    #[serde(with = "crate::rat::serde_rat")]
    pub gap_abs: Rat,
    /// `gap_abs / target` where the target is positive.
    #[serde(with = "crate::rat::serde_rat_opt")]
    pub gap_rel: Option<Rat>,
    /// Clipped boundary mass (identical for every class).
    #[serde(with = "crate::rat::serde_rat")]
    pub defect: Rat,
}

/// How much of a residue class the orbit translate carries onto the next
/// class, as an exact fraction of the class mass.
#[derive(Clone, Debug, Serialize)]
pub struct ClassShiftRow {
    pub class: i64,
    /// Fibers in the class.
    pub fiber_count: usize,
    /// Fibers whose successor fiber also lies in the window.
    pub advancing_count: usize,
    /// `μ(T_l F^j ∩ F^{j+1})`.
    #[serde(with = "crate::rat::serde_rat")]
    pub value: Rat,
    /// The value as a fraction of `μ(F^j)`; approaches 1.
    #[serde(with = "crate::rat::serde_rat")]
    pub ratio: Rat,
}

/// The finite-level asymmetry ledger of one central-orbit step.
#[derive(Clone, Debug, Serialize)]
pub struct AsymmetryReport {
    pub schedule_hash: String,
    /// The central-orbit tower index the ledger describes.
    pub n: usize,
    /// Depth of the truncation every quantity was evaluated on (`n+1`).
    pub eval_depth: usize,
    /// Mass of the unit-window test slab `A`.
    #[serde(with = "crate::rat::serde_rat")]
    pub slab_mass: Rat,
    /// Per-class quadruple quantities against their symmetric shares.
    pub quantities: Vec<AsymmetryQuantity>,
    /// The unpartitioned quadruple correlation.
    #[serde(with = "crate::rat::serde_rat")]
    pub total: Rat,
    /// Whether the five class quantities sum to the total exactly.
    pub partition_exact: bool,
    /// Whether the correlation targets match the direct slab-window
    /// intersection masses exactly.
    pub targets_consistent: bool,
    /// Forward triple correlation, scaled by 5; strictly positive.
    #[serde(with = "crate::rat::serde_rat")]
    pub forward: Rat,
    #[serde(with = "crate::rat::serde_rat")]
    pub forward_defect: Rat,
    /// Time-reversed triple correlation, scaled by 5; exactly zero.
    #[serde(with = "crate::rat::serde_rat")]
    pub backward: Rat,
    #[serde(with = "crate::rat::serde_rat")]
    pub backward_defect: Rat,
    /// Relative mass the step's inter-fiber gaps and margin added.
    #[serde(with = "crate::rat::serde_rat")]
    pub spacer_mass: Rat,
    /// Largest relative gap among classes with positive targets;
    /// shrinks as the window grows.
    #[serde(with = "crate::rat::serde_rat")]
    pub max_gap_rel: Rat,
    pub class_shift: Vec<ClassShiftRow>,
}

/// Builds the period-5 asymmetry ledger at a central-orbit step `n`.
///
/// Four nested central slabs `A ⊂ B ⊂ C ⊂ D'` ride the orbit translate
/// `l = c(1 + 2γ_n)` and its powers; partitioning the quadruple
/// correlation by the fiber residue class exposes the drift pattern
/// `(0, 0, ½, 1, 0)·μ(A)`, which no symmetric construction can produce.
/// Everything is evaluated on the depth-`n+1` truncation so boundary
/// fibers clip against the top box and are certified in the defects,
/// independent of later steps' spacer draws.
pub fn asymmetry_report(s: &Schedule, n: usize, budget: usize) -> Result<AsymmetryReport> {
    if n + 1 > s.levels() {
        return Err(Error::Config(format!(
            "asymmetry ledger index {n} needs step {n} of a {}-level schedule",
            s.levels()
        )));
    }
    let StepAnnotation::CentralPeriodic { index_lo, index_hi, .. } = s.annotation(n + 1) else {
        return Err(Error::Config(format!(
            "asymmetry ledger index {n} is not a central-orbit step"
        )));
    };
    let (lo_t, hi_t) = (*index_lo, *index_hi);
    let params = s.f_params(n).clone();
    if params.gamma < rat_int(6) {
        return Err(Error::Config(format!(
            "asymmetry slabs need box height at least 6 at level {n}, got {}",
            format_rat(&params.gamma)
        )));
    }
    let eval_depth = n + 1;
    let st = s.truncated(eval_depth)?;
    let l = GroupElement::c(rat_int(1) + rat_int(2) * &params.gamma);
    let l2 = l.mul(&l);
    let l3 = l2.mul(&l);
    let e = GroupElement::identity();

    // Nested central slabs; `A` has unit window so that any nonzero
    // fiber drift detaches it from itself.
    let windows = [
        Interval::new(Rat::zero(), half(&rat_int(1))),
        Interval::symmetric(rat_int(5) / rat_int(4)),
        Interval::symmetric(half(&rat_int(5))),
        Interval::new(-rat_int(15) / rat_int(4), rat_int(1) / rat_int(4)),
    ];
    let slab_cyl = |w: &Interval| -> Result<Cylinder> {
        st.cylinder(n, t3_slab(&params, w.lo(), w.hi())?)
    };
    let cyl_a = slab_cyl(&windows[0])?;
    let cyl_b = slab_cyl(&windows[1])?;
    let cyl_c = slab_cyl(&windows[2])?;
    let cyl_d = slab_cyl(&windows[3])?;
    let slab_mass = st.measure(&cyl_a)?;

    // Fiber classes of the orbit window.
    let c_set = st.c_set(n + 1).to_vec();
    let f_box = st.f_box(n);
    let mut class_parts: Vec<Vec<BishearBox>> = vec![Vec::new(); 5];
    let mut class_sizes = [0usize; 5];
    for (i, c) in c_set.iter().enumerate() {
        let t = lo_t + i as i64;
        let j = t.rem_euclid(5) as usize;
        class_parts[j].push(f_box.right_translate(c));
        class_sizes[j] += 1;
    }
    let class_cyls: Vec<Cylinder> = class_parts
        .into_iter()
        .map(|parts| st.cylinder(n + 1, Region::from_disjoint_parts(parts)))
        .collect::<Result<_>>()?;

    let mut quantities = Vec::with_capacity(5);
    let mut sum = Rat::zero();
    let mut targets_consistent = true;
    let mut max_gap_rel = Rat::zero();
    for j in 0..5i64 {
        let corr = st.multi_correlate(
            &[e.clone(), e.clone(), l.clone(), l2.clone(), l3.clone()],
            &[&class_cyls[j as usize], &cyl_a, &cyl_b, &cyl_c, &cyl_d],
            budget,
        )?;
        // The drift pattern the class sees through the three translates.
        let w1 = class_drift(j - 1);
        let w2 = w1 + class_drift(j - 2);
        let w3 = w2 + class_drift(j - 3);
        let pattern = [
            windows[0].clone(),
            windows[1].shift(&rat_int(w1)),
            windows[2].shift(&rat_int(w2)),
            windows[3].shift(&rat_int(w3)),
        ];
        let pattern_mass = match intersect_intervals(&pattern) {
            Some(win) => st.measure(&st.cylinder(n, t3_slab(&params, win.lo(), win.hi())?)?)?,
            None => Rat::zero(),
        };
        // Cross-check the interval arithmetic against the kernel.
        let direct = st.multi_correlate(
            &[
                e.clone(),
                GroupElement::c(rat_int(w1)),
                GroupElement::c(rat_int(w2)),
                GroupElement::c(rat_int(w3)),
            ],
            &[&cyl_a, &cyl_b, &cyl_c, &cyl_d],
            budget,
        )?;
        if direct.normalized != pattern_mass || !direct.defect.is_zero() {
            targets_consistent = false;
        }
        let target = &pattern_mass / rat_int(5);
        let gap_abs = rat_abs(&(&corr.normalized - &target));
        let gap_rel = (!target.is_zero()).then(|| &gap_abs / &target);
        if let Some(g) = &gap_rel {
            if g > &max_gap_rel {
                max_gap_rel = g.clone();
            }
        }
        let contributing = (lo_t + 3..=hi_t)
            .filter(|t| t.rem_euclid(5) == j)
            .count();
        sum += &corr.normalized;
        quantities.push(AsymmetryQuantity {
            class: j,
            contributing_fibers: contributing,
            value: corr.normalized,
            target,
            gap_abs,
            gap_rel,
            defect: corr.defect,
        });
    }

    let total = st.multi_correlate(
        &[e.clone(), l.clone(), l2.clone(), l3.clone()],
        &[&cyl_a, &cyl_b, &cyl_c, &cyl_d],
        budget,
    )?;
    let forward = st.multi_correlate(
        &[e.clone(), l.clone(), l3.clone()],
        &[&cyl_a, &cyl_a, &cyl_a],
        budget,
    )?;
    let backward = st.multi_correlate(
        &[e.clone(), l2.clone(), l3.clone()],
        &[&cyl_a, &cyl_a, &cyl_a],
        budget,
    )?;

    let mut class_shift = Vec::with_capacity(5);
    for j in 0..5usize {
        let next = (j + 1) % 5;
        let corr = st.multi_correlate(
            &[l.clone(), e.clone()],
            &[&class_cyls[j], &class_cyls[next]],
            budget,
        )?;
        let class_mass = st.measure(&class_cyls[j])?;
        let advancing = (lo_t..hi_t)
            .filter(|t| t.rem_euclid(5) as usize == j)
            .count();
        class_shift.push(ClassShiftRow {
            class: j as i64,
            fiber_count: class_sizes[j],
            advancing_count: advancing,
            ratio: &corr.normalized / &class_mass,
            value: corr.normalized,
        });
    }

    let spacer_mass = rat_int(1) - st.level_mass(n) / st.level_mass(n + 1);

    Ok(AsymmetryReport {
        schedule_hash: s.hash().to_string(),
        n,
        eval_depth,
        slab_mass,
        partition_exact: sum == total.normalized,
        quantities,
        total: total.normalized,
        targets_consistent,
        forward: rat_int(5) * &forward.normalized,
        forward_defect: forward.defect,
        backward: rat_int(5) * &backward.normalized,
        backward_defect: backward.defect,
        spacer_mass,
        max_gap_rel,
        class_shift,
    })
}

impl AsymmetryReport {
    /// CSV table of the per-class quantities.
    pub fn quantities_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "class", "contributing_fibers", "value", "value_decimal", "target", "gap_abs",
            "gap_rel", "defect",
        ])
        .expect("csv row");
        for q in &self.quantities {
            w.write_record([
                q.class.to_string(),
                q.contributing_fibers.to_string(),
                format_rat(&q.value),
                format_rat_decimal(&q.value),
                format_rat(&q.target),
                format_rat(&q.gap_abs),
                q.gap_rel.as_ref().map(format_rat).unwrap_or_default(),
                format_rat(&q.defect),
            ])
            .expect("csv row");
        }
        String::from_utf8(w.into_inner().expect("csv buffer")).expect("csv utf8")
    }

    /// CSV table of the class-advance ratios.
    pub fn class_shift_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["class", "fiber_count", "advancing_count", "value", "ratio", "ratio_decimal"])
            .expect("csv row");
        for row in &self.class_shift {
            w.write_record([
                row.class.to_string(),
                row.fiber_count.to_string(),
                row.advancing_count.to_string(),
                format_rat(&row.value),
                format_rat(&row.ratio),
                format_rat_decimal(&row.ratio),
            ])
            .expect("csv row");
        }
        String::from_utf8(w.into_inner().expect("csv buffer")).expect("csv utf8")
    }
}
