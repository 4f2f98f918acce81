//! The eight commands: thin orchestration over the library, emitting
//! deterministic CSV/JSON artifacts and short stdout summaries.
//!
//! Each command returns the process exit code: `0` for success, `7` when
//! a verification ran to completion and failed. Errors propagate as
//! [`cfh3::Error`] and are mapped to the documented exit codes in
//! `main`.

use std::path::{Path, PathBuf};

use serde_json::json;

use cfh3::diagnostics::{asymmetry_report, correlation_decay, dyadic_cells, rigidity_test};
use cfh3::folner::{tiling_check, translation_ratio, BoxParams};
use cfh3::rat::format_rat;
use cfh3::schedule::check_separation;
use cfh3::spectral::{
    eval_pi_ab, eval_pi_gamma, eval_pi_gamma_chunked, homomorphism_gap, restrict_type,
    tensor_rule, CenterAtom, Complex64, GridFunction, Multiplicity, RestrictionReport,
    RestrictionTarget, SpectralTypeDescriptor, PLANAR_LEBESGUE,
};
use cfh3::{
    rat, rat_int, Axis, Error, GroupElement, Rat, Result, Schedule, ScheduleKind, StepAnnotation,
    ValidationReport,
};

use crate::config::{
    load_config, load_or_default, AsymmetryRun, BuildRun, CorrelateRun, FolnerRun, RigidityRun,
    SpectralRun, TilingRun, ValidateRun,
};
use crate::emit::{bool_cell, f64_cell, rat_cell, rat_decimal_cell, Artifacts, Format, Table};

/// Flags shared by every command, resolved by `main`.
pub struct CommonArgs {
    /// Configuration file, if any.
    pub config: Option<PathBuf>,
    /// Output directory.
    pub out: PathBuf,
    /// Seed override for stochastic constructions.
    pub seed: Option<u64>,
    /// Worker threads for commands that parallelize.
    pub jobs: usize,
    /// Artifact format.
    pub format: Format,
}

fn kind_label(kind: ScheduleKind) -> &'static str {
    match kind {
        ScheduleKind::Mixing => "mixing",
        ScheduleKind::Infinite => "infinite",
        ScheduleKind::Asymmetric => "asymmetric",
    }
}

/// The standard unit test elements `a(1)`, `b(1)`, `c(1)`.
fn unit_elements() -> Vec<(String, GroupElement)> {
    ["a", "b", "c"]
        .iter()
        .map(|name| {
            let axis = Axis::parse(name).expect("fixed axis name");
            (format!("{name}(1)"), axis.element(&rat_int(1)))
        })
        .collect()
}

/// Human-readable lines for every failed structural check.
fn validation_failures(report: &ValidationReport) -> Vec<String> {
    let mut out = Vec::new();
    for lc in &report.level_checks {
        if !lc.c_count_ok {
            out.push(format!(
                "step {}: translation count {} is below the required 2",
                lc.level, lc.c_count
            ));
        }
        if !lc.containment_ok {
            out.push(format!(
                "step {}: containment failed — a translate of box {} leaves box {}",
                lc.level,
                lc.level,
                lc.level + 1
            ));
        }
        if !lc.disjoint_ok {
            out.push(format!(
                "step {}: translates overlap — worst pair volume {}",
                lc.level,
                format_rat(&lc.worst_pair_overlap)
            ));
        }
    }
    for fc in &report.folner_checks {
        if !fc.non_increasing {
            out.push(format!(
                "translation ratios for {} fail to be non-increasing",
                fc.label
            ));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

/// Runs one construction and writes the schedule plus its construction
/// report; the freshly built schedule is also structurally validated.
pub fn cmd_build(
    common: &CommonArgs,
    kind: Option<ScheduleKind>,
    levels: Option<usize>,
    gamma_integer: bool,
) -> Result<i32> {
    let mut run: BuildRun = match (&common.config, kind) {
        (Some(path), maybe_kind) => {
            let mut run: BuildRun = load_config(path)?;
            if let Some(kind) = maybe_kind {
                run.kind = kind;
            }
            run
        }
        (None, Some(kind)) => BuildRun::for_kind(kind),
        (None, None) => {
            return Err(Error::Config(
                "build needs --kind mixing|infinite|asymmetric or --config PATH".into(),
            ))
        }
    };
    run.apply_overrides(levels, common.seed, gamma_integer);

    let schedule = run.build()?;
    println!(
        "built {} schedule: {} steps, hash {}",
        kind_label(schedule.kind()),
        schedule.levels(),
        schedule.hash()
    );

    let report = schedule.validate(&unit_elements());
    let artifacts = Artifacts::new(&common.out)?;
    let mut text = schedule.to_json();
    text.push('\n');
    artifacts.write_text("schedule.json", &text)?;

    let mut table = Table::new(&[
        "level",
        "alpha",
        "beta",
        "gamma",
        "gamma_decimal",
        "c_count",
        "level_mass",
        "level_mass_decimal",
        "step",
        "attempts",
        "pair_distance",
        "quad_error",
    ]);
    for n in 0..=schedule.levels() {
        let p = schedule.f_params(n);
        let mass = schedule.level_mass(n);
        let (step, attempts, pair_distance, quad_error, c_count) = if n == 0 {
            (
                "root".to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            )
        } else {
            let count = schedule.c_set(n).len().to_string();
            match schedule.annotation(n) {
                StepAnnotation::Stochastic {
                    pair_distance,
                    attempts,
                    quad_error,
                    ..
                } => (
                    "stochastic".to_string(),
                    attempts.to_string(),
                    f64_cell(*pair_distance),
                    f64_cell(*quad_error),
                    count,
                ),
                StepAnnotation::CentralPeriodic {
                    index_lo, index_hi, ..
                } => (
                    format!("central-periodic[{index_lo}..{index_hi}]"),
                    String::new(),
                    String::new(),
                    String::new(),
                    count,
                ),
                StepAnnotation::CentralSidon { indices, .. } => (
                    format!("central-sidon({})", indices.len()),
                    String::new(),
                    String::new(),
                    String::new(),
                    count,
                ),
                StepAnnotation::Plain => (
                    "plain".to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    count,
                ),
            }
        };
        table.push(vec![
            n.to_string(),
            rat_cell(&p.alpha),
            rat_cell(&p.beta),
            rat_cell(&p.gamma),
            rat_decimal_cell(&p.gamma),
            c_count,
            rat_cell(&mass),
            rat_decimal_cell(&mass),
            step,
            attempts,
            pair_distance,
            quad_error,
        ]);
    }
    let meta = json!({
        "kind": kind_label(schedule.kind()),
        "levels": schedule.levels(),
        "hash": schedule.hash(),
        "validation_ok": report.all_ok,
        "validation_summary": report.summary(),
    });
    artifacts.write_table("build_report", common.format, meta, &table)?;

    let mut exit = 0;
    println!("validation: {}", report.summary());
    for line in validation_failures(&report) {
        println!("  {line}");
        exit = 7;
    }

    if schedule.kind() == ScheduleKind::Infinite {
        let sep = check_separation(&schedule)?;
        match common.format {
            Format::Json => {
                artifacts.write_json("separation", &sep)?;
            }
            Format::Csv => {
                let mut sep_table = Table::new(&[
                    "step",
                    "triple_product_ok",
                    "differences_ok",
                    "c_count",
                    "expansion_partial_product",
                    "expansion_partial_product_decimal",
                ]);
                for i in 0..sep.levels {
                    let partial = &sep.expansion_partial_products[i];
                    sep_table.push(vec![
                        i.to_string(),
                        bool_cell(sep.triple_product_ok[i]),
                        bool_cell(sep.differences_ok[i]),
                        sep.counts[i].to_string(),
                        rat_cell(partial),
                        rat_decimal_cell(partial),
                    ]);
                }
                let sep_meta = json!({
                    "counts_strictly_increasing": sep.counts_strictly_increasing,
                    "all_ok": sep.all_ok,
                });
                artifacts.write_table("separation", common.format, sep_meta, &sep_table)?;
            }
        }
        println!(
            "separation: {}",
            if sep.all_ok { "ok" } else { "FAILED" }
        );
        for witness in &sep.witnesses {
            println!("  {witness}");
        }
        if !sep.all_ok {
            exit = 7;
        }
    }
    Ok(exit)
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

/// Loads a schedule artifact (re-verifying its content hash) and runs
/// every structural check, reporting the exact failing condition.
pub fn cmd_validate(common: &CommonArgs, schedule_flag: Option<&Path>) -> Result<i32> {
    let cfg: ValidateRun = load_or_default(common.config.as_deref())?;
    let path = schedule_flag
        .map(Path::to_path_buf)
        .or(cfg.schedule)
        .ok_or_else(|| {
            Error::Config("validate needs --schedule PATH or a config with `schedule`".into())
        })?;
    let text = std::fs::read_to_string(&path)?;
    let schedule = Schedule::from_json(&text)?;
    let report = schedule.validate(&unit_elements());

    let artifacts = Artifacts::new(&common.out)?;
    match common.format {
        Format::Json => {
            artifacts.write_json("validation", &report)?;
        }
        Format::Csv => {
            let mut levels = Table::new(&[
                "step",
                "c_count",
                "c_count_ok",
                "containment_ok",
                "worst_pair_overlap",
                "disjoint_ok",
                "mass_ratio",
                "mass_ratio_decimal",
                "spacer_summand",
                "partial_product",
                "partial_product_decimal",
            ]);
            for lc in &report.level_checks {
                levels.push(vec![
                    lc.level.to_string(),
                    lc.c_count.to_string(),
                    bool_cell(lc.c_count_ok),
                    bool_cell(lc.containment_ok),
                    rat_cell(&lc.worst_pair_overlap),
                    bool_cell(lc.disjoint_ok),
                    rat_cell(&lc.mass_ratio),
                    rat_decimal_cell(&lc.mass_ratio),
                    rat_cell(&lc.spacer_summand),
                    rat_cell(&lc.partial_product),
                    rat_decimal_cell(&lc.partial_product),
                ]);
            }
            let meta = json!({
                "kind": kind_label(report.kind),
                "levels": report.levels,
                "all_ok": report.all_ok,
            });
            artifacts.write_table("validation_levels", common.format, meta, &levels)?;

            let mut folner = Table::new(&[
                "label",
                "element",
                "level",
                "ratio",
                "ratio_decimal",
                "non_increasing",
            ]);
            for fc in &report.folner_checks {
                for (level, ratio) in fc.ratios.iter().enumerate() {
                    folner.push(vec![
                        fc.label.clone(),
                        fc.element.to_string(),
                        level.to_string(),
                        rat_cell(ratio),
                        rat_decimal_cell(ratio),
                        bool_cell(fc.non_increasing),
                    ]);
                }
            }
            artifacts.write_table("validation_folner", common.format, json!({}), &folner)?;
        }
    }

    println!("validation: {}", report.summary());
    let failures = validation_failures(&report);
    for line in &failures {
        println!("  {line}");
    }
    Ok(if report.all_ok { 0 } else { 7 })
}

// ---------------------------------------------------------------------------
// correlate
// ---------------------------------------------------------------------------

/// Exact correlation-decay table along one subgroup.
pub fn cmd_correlate(common: &CommonArgs, schedule_flag: Option<&Path>) -> Result<i32> {
    let cfg: CorrelateRun = load_or_default(common.config.as_deref())?;
    let schedule = cfg.schedule.resolve(
        schedule_flag,
        common.seed,
        BuildRun::for_kind(ScheduleKind::Mixing),
    )?;
    let axis = Axis::parse(&cfg.axis)?;
    if cfg.level > schedule.levels() {
        return Err(Error::Config(format!(
            "level {} exceeds the schedule depth {}",
            cfg.level,
            schedule.levels()
        )));
    }
    let family = dyadic_cells(schedule.f_params(cfg.level), cfg.depth)?;
    let pick = |idx: usize| {
        family.get(idx).ok_or_else(|| {
            Error::Config(format!(
                "cell index {idx} is outside the family of {} regions",
                family.len()
            ))
        })
    };
    let (label_a, region_a) = pick(cfg.cell_a)?;
    let (label_b, region_b) = pick(cfg.cell_b)?;
    let report = correlation_decay(
        &schedule,
        axis,
        &cfg.t_values,
        cfg.level,
        region_a,
        region_b,
        cfg.budget,
    )?;

    let artifacts = Artifacts::new(&common.out)?;
    match common.format {
        Format::Csv => {
            artifacts.write_text("correlate.csv", &report.to_csv())?;
        }
        Format::Json => {
            artifacts.write_json("correlate", &report)?;
        }
    }

    println!(
        "correlation along {}(t) at level {}: sets {} and {}, {} rows",
        axis.label(),
        cfg.level,
        label_a,
        label_b,
        report.rows.len()
    );
    println!(
        "product target {}, max exact gap {}, truncation bound {}",
        format_rat(&report.product_target),
        report
            .max_exact_gap
            .as_ref()
            .map(format_rat)
            .unwrap_or_else(|| "n/a".into()),
        format_rat(&report.truncation_bound)
    );
    Ok(0)
}

// ---------------------------------------------------------------------------
// asymmetry
// ---------------------------------------------------------------------------

/// Period-5 asymmetry ledgers at central-orbit steps.
pub fn cmd_asymmetry(common: &CommonArgs, schedule_flag: Option<&Path>) -> Result<i32> {
    let cfg: AsymmetryRun = load_or_default(common.config.as_deref())?;
    if cfg.ns.is_empty() {
        return Err(Error::Config("asymmetry needs at least one tower index".into()));
    }
    let schedule = cfg.schedule.resolve(
        schedule_flag,
        common.seed,
        BuildRun::for_kind(ScheduleKind::Asymmetric),
    )?;
    let mut reports = Vec::with_capacity(cfg.ns.len());
    for &n in &cfg.ns {
        reports.push(asymmetry_report(&schedule, n, cfg.budget)?);
    }

    let artifacts = Artifacts::new(&common.out)?;
    match common.format {
        Format::Json => {
            artifacts.write_json("asymmetry", &reports)?;
        }
        Format::Csv => {
            let mut summary = Table::new(&[
                "n",
                "eval_depth",
                "slab_mass",
                "slab_mass_decimal",
                "total",
                "partition_exact",
                "targets_consistent",
                "forward",
                "forward_decimal",
                "backward",
                "max_gap_rel",
                "max_gap_rel_decimal",
                "spacer_mass",
            ]);
            for report in &reports {
                summary.push(vec![
                    report.n.to_string(),
                    report.eval_depth.to_string(),
                    rat_cell(&report.slab_mass),
                    rat_decimal_cell(&report.slab_mass),
                    rat_cell(&report.total),
                    bool_cell(report.partition_exact),
                    bool_cell(report.targets_consistent),
                    rat_cell(&report.forward),
                    rat_decimal_cell(&report.forward),
                    rat_cell(&report.backward),
                    rat_cell(&report.max_gap_rel),
                    rat_decimal_cell(&report.max_gap_rel),
                    rat_cell(&report.spacer_mass),
                ]);
                artifacts.write_text(
                    &format!("asymmetry_n{}_quantities.csv", report.n),
                    &report.quantities_csv(),
                )?;
                artifacts.write_text(
                    &format!("asymmetry_n{}_class_shift.csv", report.n),
                    &report.class_shift_csv(),
                )?;
            }
            let meta = json!({ "schedule_hash": schedule.hash() });
            artifacts.write_table("asymmetry_summary", common.format, meta, &summary)?;
        }
    }

    for report in &reports {
        println!(
            "n={}: partition exact {}, total {}, forward {} vs backward {}, max relative gap {}",
            report.n,
            report.partition_exact,
            format_rat(&report.total),
            format_rat(&report.forward),
            format_rat(&report.backward),
            rat_decimal_cell(&report.max_gap_rel),
        );
    }
    if reports.len() >= 2 {
        let shrinking = reports
            .windows(2)
            .all(|w| w[1].max_gap_rel < w[0].max_gap_rel);
        println!("relative gap strictly shrinks along the reported levels: {shrinking}");
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// rigidity
// ---------------------------------------------------------------------------

/// Symmetric-difference brackets along the period-5 return translates.
pub fn cmd_rigidity(common: &CommonArgs, schedule_flag: Option<&Path>) -> Result<i32> {
    let cfg: RigidityRun = load_or_default(common.config.as_deref())?;
    let schedule =
        cfg.schedule
            .resolve(schedule_flag, common.seed, RigidityRun::default_build())?;
    let report = rigidity_test(&schedule, &cfg.ns, cfg.budget)?;

    let artifacts = Artifacts::new(&common.out)?;
    match common.format {
        Format::Csv => {
            artifacts.write_text("rigidity.csv", &report.to_csv())?;
        }
        Format::Json => {
            artifacts.write_json("rigidity", &report)?;
        }
    }

    for row in &report.rows {
        println!(
            "n={} {}: corrected upper ratio {} ({}), control upper ratio {}",
            row.n,
            row.label,
            format_rat(&row.corrected.ratio_upper),
            rat_decimal_cell(&row.corrected.ratio_upper),
            format_rat(&row.control.ratio_upper),
        );
    }
    for label in &report.family_labels {
        let series: Vec<&Rat> = report
            .rows
            .iter()
            .filter(|row| &row.label == label)
            .map(|row| &row.corrected.ratio_upper)
            .collect();
        if series.len() >= 2 {
            let shrinking = series.windows(2).all(|w| w[1] < w[0]);
            println!("{label}: corrected upper ratio strictly shrinks across levels: {shrinking}");
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// tiling
// ---------------------------------------------------------------------------

/// Exact lattice-tiling verification over a finite window.
pub fn cmd_tiling(common: &CommonArgs) -> Result<i32> {
    let cfg: TilingRun = load_or_default(common.config.as_deref())?;
    let zero = rat_int(0);
    if cfg.alpha <= zero || cfg.beta <= zero || cfg.gamma <= zero {
        return Err(Error::Config(
            "tiling needs strictly positive box half-widths".into(),
        ));
    }
    if cfg.scale < 1 {
        return Err(Error::Config(format!(
            "window scale must be at least 1, got {}",
            cfg.scale
        )));
    }
    if cfg.spacing <= zero {
        return Err(Error::Config("lattice spacing must be positive".into()));
    }
    let params = BoxParams::new(cfg.alpha.clone(), cfg.beta.clone(), cfg.gamma.clone());
    let report = tiling_check(&params, cfg.scale, &cfg.spacing);

    let artifacts = Artifacts::new(&common.out)?;
    let meta = json!({
        "alpha": format_rat(&cfg.alpha),
        "beta": format_rat(&cfg.beta),
        "gamma": format_rat(&cfg.gamma),
        "scale": cfg.scale,
        "spacing": format_rat(&cfg.spacing),
    });
    let mut table = Table::new(&[
        "tiles",
        "window_volume",
        "covered_volume",
        "uncovered_volume",
        "pairwise_overlap",
        "exact",
    ]);
    table.push(vec![
        report.tiles.to_string(),
        rat_cell(&report.window_volume),
        rat_cell(&report.covered_volume),
        rat_cell(&report.uncovered_volume),
        rat_cell(&report.pairwise_overlap),
        bool_cell(report.exact),
    ]);
    artifacts.write_table("tiling", common.format, meta, &table)?;

    println!(
        "tiling at scale {}: {} tiles, uncovered {}, pairwise overlap {}, exact {}",
        cfg.scale,
        report.tiles,
        format_rat(&report.uncovered_volume),
        format_rat(&report.pairwise_overlap),
        report.exact
    );
    Ok(if report.exact { 0 } else { 7 })
}

// ---------------------------------------------------------------------------
// folner
// ---------------------------------------------------------------------------

/// Exact translation ratios for a family of boxes.
pub fn cmd_folner(common: &CommonArgs) -> Result<i32> {
    let cfg: FolnerRun = load_or_default(common.config.as_deref())?;
    let zero = rat_int(0);
    if cfg.alpha <= zero || cfg.beta <= zero {
        return Err(Error::Config(
            "box half-widths must be strictly positive".into(),
        ));
    }
    if cfg.gammas.is_empty() || cfg.elements.is_empty() {
        return Err(Error::Config(
            "folner needs at least one box and one test element".into(),
        ));
    }
    if cfg.gammas.iter().any(|g| g <= &zero) {
        return Err(Error::Config(
            "box half-widths must be strictly positive".into(),
        ));
    }

    let mut table = Table::new(&["element", "alpha", "beta", "gamma", "ratio", "ratio_decimal"]);
    let mut max_per_box: Vec<Rat> = Vec::with_capacity(cfg.gammas.len());
    for gamma in &cfg.gammas {
        let params = BoxParams::new(cfg.alpha.clone(), cfg.beta.clone(), gamma.clone());
        let mut box_max = zero.clone();
        for spec in &cfg.elements {
            let axis = Axis::parse(&spec.axis)?;
            let g = axis.element(&spec.t);
            let ratio = translation_ratio(&g, &params);
            table.push(vec![
                format!("{}({})", spec.axis, format_rat(&spec.t)),
                rat_cell(&cfg.alpha),
                rat_cell(&cfg.beta),
                rat_cell(gamma),
                rat_cell(&ratio),
                rat_decimal_cell(&ratio),
            ]);
            if ratio > box_max {
                box_max = ratio;
            }
        }
        max_per_box.push(box_max);
    }
    let decreasing = max_per_box.windows(2).all(|w| w[1] < w[0]);

    let artifacts = Artifacts::new(&common.out)?;
    let meta = json!({
        "max_ratio_per_box": max_per_box.iter().map(format_rat).collect::<Vec<_>>(),
        "max_ratio_strictly_decreasing": decreasing,
    });
    artifacts.write_table("folner", common.format, meta, &table)?;

    for (gamma, max) in cfg.gammas.iter().zip(&max_per_box) {
        println!(
            "box ({}, {}, {}): max translation ratio {} ({})",
            format_rat(&cfg.alpha),
            format_rat(&cfg.beta),
            format_rat(gamma),
            format_rat(max),
            rat_decimal_cell(max)
        );
    }
    println!("max ratio strictly decreasing along the family: {decreasing}");
    Ok(0)
}

// ---------------------------------------------------------------------------
// spectral
// ---------------------------------------------------------------------------

struct CheckRow {
    name: &'static str,
    value: String,
    requirement: &'static str,
    pass: bool,
}

fn float_check(name: &'static str, value: f64, requirement: &'static str, pass: bool) -> CheckRow {
    CheckRow {
        name,
        value: f64_cell(value),
        requirement,
        pass,
    }
}

fn bool_check(name: &'static str, pass: bool) -> CheckRow {
    CheckRow {
        name,
        value: bool_cell(pass),
        requirement: "exact",
        pass,
    }
}

/// Runs the representation battery: character laws, grid evaluation
/// laws, the tensor-product rule, and the two restriction functors on a
/// fixed descriptor family.
pub fn cmd_spectral(common: &CommonArgs) -> Result<i32> {
    let cfg: SpectralRun = load_or_default(common.config.as_deref())?;
    if cfg.gamma == 0.0 || !cfg.gamma.is_finite() {
        return Err(Error::GammaZero);
    }
    let gamma = cfg.gamma;
    let mut checks: Vec<CheckRow> = Vec::new();

    // Character laws.
    let char_elems = [
        GroupElement::new(rat(3, 2), rat(-1, 3), rat_int(2)),
        GroupElement::new(rat_int(-1), rat(5, 4), rat(7, 8)),
        GroupElement::a(rat(1, 7)),
        GroupElement::b(rat(-2, 5)),
    ];
    let freqs = [(0.75, -1.5), (2.0, 0.5), (-1.0, 3.0)];
    let mut worst_modulus = 0.0f64;
    for g in &char_elems {
        for (al, be) in freqs {
            worst_modulus = worst_modulus.max((eval_pi_ab(al, be, g).norm() - 1.0).abs());
        }
    }
    checks.push(float_check(
        "character_unit_modulus",
        worst_modulus,
        "<= 1e-12",
        worst_modulus <= 1e-12,
    ));

    let mut worst_center = 0.0f64;
    for t in [rat(9, 4), rat_int(-3), rat(1, 7)] {
        for (al, be) in freqs {
            let z = eval_pi_ab(al, be, &GroupElement::c(t.clone()));
            worst_center = worst_center.max((z - Complex64::new(1.0, 0.0)).norm());
        }
    }
    checks.push(float_check(
        "character_center_invariance",
        worst_center,
        "== 0",
        worst_center == 0.0,
    ));

    // Grid evaluation laws.
    let wave = |x: f64| Complex64::new((-x * x).exp(), 0.5 * (-(x - 1.0) * (x - 1.0)).exp());
    let f = GridFunction::sample(cfg.half_width, cfg.step, wave)?;

    let central = eval_pi_gamma(gamma, &GroupElement::c(rat(3, 2)), &f)?;
    let phase = Complex64::from_polar(1.0, gamma * 1.5);
    let mut worst_phase = 0.0f64;
    for (out, orig) in central.output.values().iter().zip(f.values()) {
        worst_phase = worst_phase.max((out - phase * orig).norm());
    }
    let phase_ok =
        worst_phase <= 1e-12 && central.shift_cells == 0 && central.boundary_mass == 0.0;
    checks.push(float_check(
        "center_phase_error",
        worst_phase,
        "<= 1e-12",
        phase_ok,
    ));

    let shear = GroupElement::new(rat_int(2), rat(1, 2), rat(3, 4));
    let sheared = eval_pi_gamma(gamma, &shear, &f)?;
    let unitarity =
        (sheared.output.norm_sq() + sheared.boundary_mass - f.norm_sq()).abs();
    checks.push(float_check(
        "shift_unitarity_defect",
        unitarity,
        "<= 1e-10",
        unitarity <= 1e-10,
    ));

    let g1 = GroupElement::new(rat(3, 4), rat(1, 2), rat(5, 4));
    let h1 = GroupElement::new(rat(-1, 2), rat_int(2), rat(1, 4));
    let gap_supported = homomorphism_gap(gamma, &g1, &h1, &f)?;
    checks.push(float_check(
        "composition_gap_supported",
        gap_supported,
        "<= 1e-9",
        gap_supported <= 1e-9,
    ));

    let offset = cfg.half_width - 1.0;
    let edge = GridFunction::sample(cfg.half_width, cfg.step, |x| wave(x - offset))?;
    let wide = GridFunction::sample(2.0 * cfg.half_width, cfg.step, |x| wave(x - offset))?;
    let forward = GroupElement::a(rat_int(-2));
    let back = GroupElement::a(rat_int(2));
    let gap_clipped = homomorphism_gap(gamma, &back, &forward, &edge)?;
    let gap_wide = homomorphism_gap(gamma, &back, &forward, &wide)?;
    checks.push(float_check(
        "composition_gap_clipped_window",
        gap_clipped,
        "> 1e-2",
        gap_clipped > 1e-2,
    ));
    checks.push(float_check(
        "composition_gap_vanishes_on_wider_window",
        gap_wide,
        "<= 1e-9",
        gap_wide <= 1e-9 && gap_wide < gap_clipped,
    ));

    let jobs = common.jobs.max(2);
    let serial = eval_pi_gamma(gamma, &shear, &f)?;
    let chunked = eval_pi_gamma_chunked(gamma, &shear, &f, jobs)?;
    checks.push(bool_check(
        "chunked_evaluation_identical",
        serial.output == chunked.output && serial.boundary_mass == chunked.boundary_mass,
    ));

    let t = rat(7, 4);
    let flipped = eval_pi_gamma(gamma, &GroupElement::c(t.clone()).flip(), &f)?;
    let negated = eval_pi_gamma(-gamma, &GroupElement::c(t), &f)?;
    checks.push(bool_check(
        "flip_negates_frequency",
        flipped.output == negated.output,
    ));

    checks.push(bool_check(
        "zero_frequency_rejected",
        matches!(
            eval_pi_gamma(0.0, &GroupElement::identity(), &f),
            Err(Error::GammaZero)
        ) && matches!(tensor_rule(0.0, 1.0), Err(Error::GammaZero)),
    ));

    // Tensor-product rule.
    let nonzero = tensor_rule(gamma, 2.0 * gamma)?;
    let atom_ok = nonzero.planar_atoms.is_empty()
        && nonzero.planar_continuous.is_none()
        && nonzero.center_atoms.len() == 1
        && nonzero.center_atoms[0].point == 3.0 * gamma
        && nonzero.center_atoms[0].weight == 1.0
        && nonzero.center_multiplicity.get(3.0 * gamma) == Multiplicity::Infinite;
    checks.push(bool_check("tensor_nonzero_sum_atom", atom_ok));

    let cancelling = tensor_rule(gamma, -gamma)?;
    let flat_ok = cancelling.center_atoms.is_empty()
        && cancelling.center_continuous.is_none()
        && cancelling.planar_continuous.as_deref() == Some(PLANAR_LEBESGUE)
        && cancelling.planar_multiplicity.get((0.25, -0.5)) == Multiplicity::Finite(1);
    checks.push(bool_check("tensor_cancelling_pair_lebesgue", flat_ok));

    let partner = if (gamma + 0.5).abs() < 1e-9 { 0.75 } else { 0.5 };
    checks.push(bool_check(
        "tensor_symmetric",
        tensor_rule(gamma, partner)? == tensor_rule(partner, gamma)?,
    ));

    // Restriction functors on a fixed descriptor family.
    let d1 = SpectralTypeDescriptor::pure_planar_atom(1.0, (2.0, 1.0), Multiplicity::Finite(2))?;
    let d2 = SpectralTypeDescriptor::pure_planar_atom(0.5, (2.0, -1.0), Multiplicity::Finite(1))?;
    let d3 = SpectralTypeDescriptor::pure_center_atom(3.0, -0.5, Multiplicity::Infinite)?;
    let d = d1.direct_sum(&d2).direct_sum(&d3);

    let RestrictionReport::Center(center) = restrict_type(&d, RestrictionTarget::Center)? else {
        return Err(Error::Validation(
            "centre restriction returned the wrong report shape".into(),
        ));
    };
    let center_ok = center.zero_atom_weight == 1.5
        && !center.zero_atom_symbolic
        && center.atoms
            == vec![CenterAtom {
                weight: 3.0,
                point: -0.5,
            }]
        && center.continuous.is_empty()
        && center.multiplicity_at_zero == Multiplicity::Finite(3)
        && center.multiplicity_off_zero == Multiplicity::Infinite;
    checks.push(bool_check("restriction_center_structure", center_ok));

    let RestrictionReport::CenterAndFirstAxis(plane) =
        restrict_type(&d, RestrictionTarget::CenterAndFirstAxis)?
    else {
        return Err(Error::Validation(
            "plane restriction returned the wrong report shape".into(),
        ));
    };
    let plane_ok = plane.line_atoms
        == vec![CenterAtom {
            weight: 1.5,
            point: 2.0,
        }]
        && plane.line_continuous.is_empty()
        && plane.line_multiplicity.get(2.0) == Multiplicity::Finite(3)
        && plane.sheets.len() == 1
        && plane.sheets[0].gamma == -0.5
        && plane.sheets[0].weight == 3.0
        && plane.sheets[0].multiplicity == Multiplicity::Infinite
        && plane.sheet_continuous.is_empty();
    checks.push(bool_check("restriction_plane_structure", plane_ok));

    let tail = d2.direct_sum(&d3);
    let mut additive = true;
    for target in [RestrictionTarget::Center, RestrictionTarget::CenterAndFirstAxis] {
        let joint = restrict_type(&d1.direct_sum(&tail), target)?;
        let merged = match (restrict_type(&d1, target)?, restrict_type(&tail, target)?) {
            (RestrictionReport::Center(a), RestrictionReport::Center(b)) => {
                RestrictionReport::Center(a.merged(b))
            }
            (
                RestrictionReport::CenterAndFirstAxis(a),
                RestrictionReport::CenterAndFirstAxis(b),
            ) => RestrictionReport::CenterAndFirstAxis(a.merged(b)),
            _ => {
                return Err(Error::Validation(
                    "restriction reports of one target disagree in shape".into(),
                ))
            }
        };
        additive &= joint == merged;
    }
    checks.push(bool_check("restriction_additive", additive));

    // Emit.
    let mut table = Table::new(&["check", "value", "requirement", "pass"]);
    for check in &checks {
        table.push(vec![
            check.name.to_string(),
            check.value.clone(),
            check.requirement.to_string(),
            bool_cell(check.pass),
        ]);
    }
    let reports = json!({
        "gamma": gamma,
        "half_width": cfg.half_width,
        "step": cfg.step,
        "tensor_nonzero": serde_json::to_value(&nonzero)
            .map_err(|e| Error::Serde(e.to_string()))?,
        "tensor_cancelling": serde_json::to_value(&cancelling)
            .map_err(|e| Error::Serde(e.to_string()))?,
        "restriction_center": serde_json::to_value(&center)
            .map_err(|e| Error::Serde(e.to_string()))?,
        "restriction_plane": serde_json::to_value(&plane)
            .map_err(|e| Error::Serde(e.to_string()))?,
    });

    let artifacts = Artifacts::new(&common.out)?;
    match common.format {
        Format::Csv => {
            artifacts.write_table("spectral", common.format, json!({}), &table)?;
            artifacts.write_json("spectral_reports", &reports)?;
        }
        Format::Json => {
            artifacts.write_table("spectral", common.format, reports, &table)?;
        }
    }

    let passed = checks.iter().filter(|c| c.pass).count();
    println!("spectral battery: {passed}/{} checks passed", checks.len());
    for check in checks.iter().filter(|c| !c.pass) {
        println!("  FAILED {}: value {} (requirement {})", check.name, check.value, check.requirement);
    }
    Ok(if passed == checks.len() { 0 } else { 7 })
}
