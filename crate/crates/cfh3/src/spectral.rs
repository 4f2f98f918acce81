//! Irreducible representations of the group and descriptor-level
//! spectral-type transforms.
//!
//! The group carries two families of irreducible unitary representations:
//! one-dimensional characters indexed by a planar frequency pair, and an
//! infinite-dimensional family indexed by a nonzero centre frequency that
//! acts on square-integrable functions of one real variable. This module
//! evaluates both — the characters pointwise, the infinite-dimensional
//! family on a finite uniform grid with zero-fill outside the window — and
//! transports spectral-type descriptors (atom lists, symbolic continuous
//! tags, multiplicity tables) through two restriction functors and the
//! tensor-product rule for two centre frequencies.
//!
//! Everything here is floating point by design: exactness lives in the
//! measure calculus of the tower modules, while this module serves sanity
//! checks, figures and education. Continuous spectral masses are symbolic
//! tags, never sampled densities — the structural statements the
//! transforms implement do not consume densities.
//!
//! All functions are pure; grid evaluation can be split over disjoint
//! chunks of the window (see [`eval_pi_gamma_chunked`]) without changing a
//! single output bit, because every cell is computed independently.

use std::io;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::rat::rat_to_f64;

pub use num::complex::Complex64;

/// Symbolic tag for two-dimensional Lebesgue measure on the planar
/// frequency sheet.
pub const PLANAR_LEBESGUE: &str = "lebesgue-plane";

/// Symbolic tag for the product of a continuous centre mass with
/// one-dimensional Lebesgue measure along the transverse frequency line.
pub const CENTER_TIMES_LEBESGUE: &str = "center-times-lebesgue-line";

// ---------------------------------------------------------------------------
// Multiplicities
// ---------------------------------------------------------------------------

/// A spectral multiplicity: a finite copy count or infinity.
///
/// Serialized as a plain integer or the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Multiplicity {
    /// Finitely many copies.
    Finite(u64),
    /// Infinitely many copies.
    Infinite,
}

impl Multiplicity {
    /// Adds two copy counts; infinity absorbs.
    pub fn saturating_add(self, other: Multiplicity) -> Multiplicity {
        match (self, other) {
            (Multiplicity::Finite(a), Multiplicity::Finite(b)) => {
                Multiplicity::Finite(a.saturating_add(b))
            }
            _ => Multiplicity::Infinite,
        }
    }
}

impl std::fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Multiplicity::Finite(k) => write!(f, "{k}"),
            Multiplicity::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Multiplicity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Multiplicity::Finite(k) => s.serialize_u64(*k),
            Multiplicity::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Multiplicity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Multiplicity;
            fn expecting(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str("a nonnegative integer or the string \"inf\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Multiplicity, E> {
                Ok(Multiplicity::Finite(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Multiplicity, E> {
                u64::try_from(v)
                    .map(Multiplicity::Finite)
                    .map_err(|_| E::custom("multiplicity must be nonnegative"))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Multiplicity, E> {
                if v == "inf" {
                    Ok(Multiplicity::Infinite)
                } else {
                    Err(E::custom("expected \"inf\""))
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// Multiplicity table over planar frequency points, with a default value
/// that applies off the listed support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarMultiplicity {
    /// Explicit values at listed points.
    pub entries: Vec<((f64, f64), Multiplicity)>,
    /// Value at every point not listed.
    pub default: Multiplicity,
}

impl PlanarMultiplicity {
    /// Table with no explicit entries.
    pub fn constant(default: Multiplicity) -> Self {
        PlanarMultiplicity {
            entries: Vec::new(),
            default,
        }
    }

    /// Looks a point up, falling back to the default.
    pub fn get(&self, point: (f64, f64)) -> Multiplicity {
        self.entries
            .iter()
            .find(|(p, _)| *p == point)
            .map(|(_, m)| *m)
            .unwrap_or(self.default)
    }

    /// Sets the value at one point, replacing an existing entry.
    pub fn set(&mut self, point: (f64, f64), m: Multiplicity) {
        if let Some(slot) = self.entries.iter_mut().find(|(p, _)| *p == point) {
            slot.1 = m;
        } else {
            self.entries.push((point, m));
        }
    }

    fn canonical(mut self) -> Self {
        self.entries
            .sort_by(|(a, _), (b, _)| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        self
    }
}

/// Multiplicity table over points of a one-dimensional frequency line,
/// with a default value that applies off the listed support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterMultiplicity {
    /// Explicit values at listed points.
    pub entries: Vec<(f64, Multiplicity)>,
    /// Value at every point not listed.
    pub default: Multiplicity,
}

impl CenterMultiplicity {
    /// Table with no explicit entries.
    pub fn constant(default: Multiplicity) -> Self {
        CenterMultiplicity {
            entries: Vec::new(),
            default,
        }
    }

    /// Looks a point up, falling back to the default.
    pub fn get(&self, point: f64) -> Multiplicity {
        self.entries
            .iter()
            .find(|(p, _)| *p == point)
            .map(|(_, m)| *m)
            .unwrap_or(self.default)
    }

    /// Sets the value at one point, replacing an existing entry.
    pub fn set(&mut self, point: f64, m: Multiplicity) {
        if let Some(slot) = self.entries.iter_mut().find(|(p, _)| *p == point) {
            slot.1 = m;
        } else {
            self.entries.push((point, m));
        }
    }

    fn canonical(mut self) -> Self {
        self.entries.sort_by(|(a, _), (b, _)| a.total_cmp(b));
        self
    }
}

// ---------------------------------------------------------------------------
// Spectral-type descriptors
// ---------------------------------------------------------------------------

/// A weighted atom on the planar frequency sheet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarAtom {
    /// Nonnegative mass.
    pub weight: f64,
    /// Frequency pair carrying the mass.
    pub point: (f64, f64),
}

/// A weighted atom on a one-dimensional frequency line.
///
/// Inside a [`SpectralTypeDescriptor`] the point is a centre frequency and
/// must be nonzero; restriction reports reuse the type for lines where
/// zero is legitimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterAtom {
    /// Nonnegative mass.
    pub weight: f64,
    /// Frequency carrying the mass.
    pub point: f64,
}

/// Spectral-type data of a unitary representation: atoms and symbolic
/// continuous tags on the planar sheet and on the punctured centre line,
/// together with multiplicity tables for both parts.
///
/// Weights are masses of a measure class, so only their positivity ever
/// matters to the transforms; they are still kept numeric so direct sums
/// and projections stay visibly additive. Continuous masses carry no
/// numbers at all — just a tag naming them. Distinct tags compose under
/// direct sum by joining with `+`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralTypeDescriptor {
    /// Atoms of the planar part.
    pub planar_atoms: Vec<PlanarAtom>,
    /// Symbolic continuous mass of the planar part, if any.
    pub planar_continuous: Option<String>,
    /// Atoms of the centre part; points are nonzero.
    pub center_atoms: Vec<CenterAtom>,
    /// Symbolic continuous mass of the centre part, if any.
    pub center_continuous: Option<String>,
    /// Copy counts over the planar sheet.
    pub planar_multiplicity: PlanarMultiplicity,
    /// Copy counts over the centre line.
    pub center_multiplicity: CenterMultiplicity,
}

impl SpectralTypeDescriptor {
    /// Descriptor with no mass at all.
    pub fn empty() -> Self {
        SpectralTypeDescriptor {
            planar_atoms: Vec::new(),
            planar_continuous: None,
            center_atoms: Vec::new(),
            center_continuous: None,
            planar_multiplicity: PlanarMultiplicity::constant(Multiplicity::Finite(1)),
            center_multiplicity: CenterMultiplicity::constant(Multiplicity::Finite(1)),
        }
    }

    /// Descriptor consisting of one planar atom with an explicit copy
    /// count.
    pub fn pure_planar_atom(weight: f64, point: (f64, f64), m: Multiplicity) -> Result<Self> {
        let mut d = SpectralTypeDescriptor::empty();
        d.planar_atoms.push(PlanarAtom { weight, point });
        d.planar_multiplicity.set(point, m);
        d.validate()?;
        Ok(d)
    }

    /// Descriptor consisting of one centre atom with an explicit copy
    /// count.
    pub fn pure_center_atom(weight: f64, gamma: f64, m: Multiplicity) -> Result<Self> {
        let mut d = SpectralTypeDescriptor::empty();
        d.center_atoms.push(CenterAtom {
            weight,
            point: gamma,
        });
        d.center_multiplicity.set(gamma, m);
        d.validate()?;
        Ok(d)
    }

    /// True when no atom and no continuous tag is present.
    pub fn is_empty(&self) -> bool {
        self.planar_atoms.is_empty()
            && self.center_atoms.is_empty()
            && self.planar_continuous.is_none()
            && self.center_continuous.is_none()
    }

    /// Checks the structural invariants: finite nonnegative weights,
    /// finite points, and no centre atom at frequency zero.
    pub fn validate(&self) -> Result<()> {
        for atom in &self.planar_atoms {
            if !(atom.weight.is_finite() && atom.weight >= 0.0) {
                return Err(Error::Validation(format!(
                    "planar atom weight must be finite and nonnegative, got {}",
                    atom.weight
                )));
            }
            if !(atom.point.0.is_finite() && atom.point.1.is_finite()) {
                return Err(Error::Validation(
                    "planar atom point must be finite".into(),
                ));
            }
        }
        for atom in &self.center_atoms {
            if !(atom.weight.is_finite() && atom.weight >= 0.0) {
                return Err(Error::Validation(format!(
                    "centre atom weight must be finite and nonnegative, got {}",
                    atom.weight
                )));
            }
            if !atom.point.is_finite() || atom.point == 0.0 {
                return Err(Error::Validation(format!(
                    "centre atom point must be finite and nonzero, got {}",
                    atom.point
                )));
            }
        }
        Ok(())
    }

    /// Direct sum of two descriptors: atom masses at equal points add,
    /// copy counts at equal points add, continuous tags join, and entries
    /// are materialized at every atom point so later lookups never mix
    /// the two defaults.
    pub fn direct_sum(&self, other: &SpectralTypeDescriptor) -> SpectralTypeDescriptor {
        let mut left = self.clone();
        let mut right = other.clone();
        left.materialize_entries();
        right.materialize_entries();

        let mut out = SpectralTypeDescriptor::empty();
        out.planar_continuous = join_tags(&left.planar_continuous, &right.planar_continuous);
        out.center_continuous = join_tags(&left.center_continuous, &right.center_continuous);

        for atom in left.planar_atoms.iter().chain(&right.planar_atoms) {
            if let Some(slot) = out.planar_atoms.iter_mut().find(|a| a.point == atom.point) {
                slot.weight += atom.weight;
            } else {
                out.planar_atoms.push(atom.clone());
            }
        }
        for atom in left.center_atoms.iter().chain(&right.center_atoms) {
            if let Some(slot) = out.center_atoms.iter_mut().find(|a| a.point == atom.point) {
                slot.weight += atom.weight;
            } else {
                out.center_atoms.push(atom.clone());
            }
        }
        out.planar_atoms
            .sort_by(|a, b| a.point.0.total_cmp(&b.point.0).then(a.point.1.total_cmp(&b.point.1)));
        out.center_atoms.sort_by(|a, b| a.point.total_cmp(&b.point));

        let mut planar = PlanarMultiplicity::constant(
            left.planar_multiplicity
                .default
                .saturating_add(right.planar_multiplicity.default),
        );
        for (p, m) in left
            .planar_multiplicity
            .entries
            .iter()
            .chain(&right.planar_multiplicity.entries)
        {
            let merged = planar
                .entries
                .iter()
                .find(|(q, _)| q == p)
                .map(|(_, prev)| prev.saturating_add(*m));
            planar.set(*p, merged.unwrap_or(*m));
        }
        out.planar_multiplicity = planar.canonical();

        let mut center = CenterMultiplicity::constant(
            left.center_multiplicity
                .default
                .saturating_add(right.center_multiplicity.default),
        );
        for (p, m) in left
            .center_multiplicity
            .entries
            .iter()
            .chain(&right.center_multiplicity.entries)
        {
            let merged = center
                .entries
                .iter()
                .find(|(q, _)| q == p)
                .map(|(_, prev)| prev.saturating_add(*m));
            center.set(*p, merged.unwrap_or(*m));
        }
        out.center_multiplicity = center.canonical();
        out
    }

    /// Inserts an explicit multiplicity entry at every atom point that
    /// currently falls through to the default.
    fn materialize_entries(&mut self) {
        let planar_points: Vec<(f64, f64)> = self.planar_atoms.iter().map(|a| a.point).collect();
        for p in planar_points {
            let m = self.planar_multiplicity.get(p);
            self.planar_multiplicity.set(p, m);
        }
        let center_points: Vec<f64> = self.center_atoms.iter().map(|a| a.point).collect();
        for p in center_points {
            let m = self.center_multiplicity.get(p);
            self.center_multiplicity.set(p, m);
        }
    }
}

/// Joins two optional symbolic tags: the union of their `+`-separated
/// components, sorted and deduplicated.
fn join_tags(a: &Option<String>, b: &Option<String>) -> Option<String> {
    let mut parts: Vec<&str> = Vec::new();
    for tag in [a, b].into_iter().flatten() {
        parts.extend(tag.split('+').filter(|s| !s.is_empty()));
    }
    if parts.is_empty() {
        return None;
    }
    parts.sort_unstable();
    parts.dedup();
    Some(parts.join("+"))
}

/// Splits an optional symbolic tag into its sorted, deduplicated
/// components.
fn split_tag(tag: &Option<String>) -> Vec<String> {
    let mut parts: Vec<String> = tag
        .iter()
        .flat_map(|t| t.split('+'))
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect();
    parts.sort_unstable();
    parts.dedup();
    parts
}

// ---------------------------------------------------------------------------
// Restriction functors
// ---------------------------------------------------------------------------

/// Subgroup a spectral type is restricted to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RestrictionTarget {
    /// The centre `{c(t)}`.
    Center,
    /// The abelian plane spanned by the centre and the first axis,
    /// identified with two frequency coordinates `(gamma, alpha)`.
    CenterAndFirstAxis,
}

/// Restriction of a spectral type to the centre: every planar atom
/// collapses onto the trivial character, the centre part passes through
/// unchanged, and off zero the copy count is infinite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterRestriction {
    /// Numeric mass of the atom at frequency zero — the total planar
    /// weight.
    pub zero_atom_weight: f64,
    /// True when a continuous planar tag contributes additional,
    /// unquantified mass to the zero atom.
    pub zero_atom_symbolic: bool,
    /// Centre atoms inherited unchanged.
    pub atoms: Vec<CenterAtom>,
    /// Symbolic continuous centre masses inherited unchanged.
    pub continuous: Vec<String>,
    /// Copy count at frequency zero: the total number of planar
    /// summands (infinite as soon as the planar part has continuous
    /// mass or an infinite table value).
    pub multiplicity_at_zero: Multiplicity,
    /// Copy count at every nonzero frequency.
    pub multiplicity_off_zero: Multiplicity,
}

impl CenterRestriction {
    /// Sorts atoms and merges equal points so two reports can be
    /// compared structurally.
    pub fn canonical(mut self) -> Self {
        self.atoms = merge_line_atoms(self.atoms);
        self.continuous.sort_unstable();
        self.continuous.dedup();
        self
    }

    /// Direct sum of two restriction reports.
    pub fn merged(self, other: CenterRestriction) -> CenterRestriction {
        let mut atoms = self.atoms;
        atoms.extend(other.atoms);
        let mut continuous = self.continuous;
        continuous.extend(other.continuous);
        CenterRestriction {
            zero_atom_weight: self.zero_atom_weight + other.zero_atom_weight,
            zero_atom_symbolic: self.zero_atom_symbolic || other.zero_atom_symbolic,
            atoms,
            continuous,
            multiplicity_at_zero: self
                .multiplicity_at_zero
                .saturating_add(other.multiplicity_at_zero),
            multiplicity_off_zero: self
                .multiplicity_off_zero
                .saturating_add(other.multiplicity_off_zero),
        }
        .canonical()
    }
}

/// One Lebesgue sheet `{gamma} x R` in the plane restriction, inherited
/// from a centre atom.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LebesgueSheet {
    /// Mass of the centre atom the sheet comes from.
    pub weight: f64,
    /// Centre frequency of the sheet.
    pub gamma: f64,
    /// Copy count along the sheet.
    pub multiplicity: Multiplicity,
}

/// Restriction of a spectral type to the plane spanned by the centre and
/// the first axis: the planar part projects to atoms on the zero-centre
/// line, and every centre atom spreads into a Lebesgue sheet across the
/// transverse frequency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneRestriction {
    /// Atoms on the zero-centre line, one per projected first
    /// frequency.
    pub line_atoms: Vec<CenterAtom>,
    /// Symbolic continuous masses on the zero-centre line, inherited
    /// from the planar tag.
    pub line_continuous: Vec<String>,
    /// Lebesgue sheets, one per centre atom.
    pub sheets: Vec<LebesgueSheet>,
    /// Symbolic product masses from a continuous centre part.
    pub sheet_continuous: Vec<String>,
    /// Copy counts on the zero-centre line: the per-line totals of the
    /// planar table, with the planar default off the listed support.
    pub line_multiplicity: CenterMultiplicity,
}

impl PlaneRestriction {
    /// Sorts and merges equal support so two reports can be compared
    /// structurally.
    pub fn canonical(mut self) -> Self {
        self.line_atoms = merge_line_atoms(self.line_atoms);
        self.line_continuous.sort_unstable();
        self.line_continuous.dedup();
        self.sheet_continuous.sort_unstable();
        self.sheet_continuous.dedup();
        let mut sheets: Vec<LebesgueSheet> = Vec::new();
        for sheet in self.sheets {
            if let Some(slot) = sheets.iter_mut().find(|s| s.gamma == sheet.gamma) {
                slot.weight += sheet.weight;
                slot.multiplicity = slot.multiplicity.saturating_add(sheet.multiplicity);
            } else {
                sheets.push(sheet);
            }
        }
        sheets.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
        self.sheets = sheets;
        let mut table = CenterMultiplicity::constant(self.line_multiplicity.default);
        for (p, m) in self.line_multiplicity.entries {
            let merged = table
                .entries
                .iter()
                .find(|(q, _)| *q == p)
                .map(|(_, prev)| prev.saturating_add(m));
            table.set(p, merged.unwrap_or(m));
        }
        self.line_multiplicity = table.canonical();
        self
    }

    /// Direct sum of two restriction reports.
    pub fn merged(self, other: PlaneRestriction) -> PlaneRestriction {
        let mut line_atoms = self.line_atoms;
        line_atoms.extend(other.line_atoms);
        let mut line_continuous = self.line_continuous;
        line_continuous.extend(other.line_continuous);
        let mut sheets = self.sheets;
        sheets.extend(other.sheets);
        let mut sheet_continuous = self.sheet_continuous;
        sheet_continuous.extend(other.sheet_continuous);
        let mut entries = self.line_multiplicity.entries;
        entries.extend(other.line_multiplicity.entries);
        PlaneRestriction {
            line_atoms,
            line_continuous,
            sheets,
            sheet_continuous,
            line_multiplicity: CenterMultiplicity {
                entries,
                default: self
                    .line_multiplicity
                    .default
                    .saturating_add(other.line_multiplicity.default),
            },
        }
        .canonical()
    }
}

/// Result of [`restrict_type`], shaped by the target subgroup.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum RestrictionReport {
    /// Restriction to the centre line.
    Center(CenterRestriction),
    /// Restriction to the plane spanned by the centre and the first
    /// axis.
    CenterAndFirstAxis(PlaneRestriction),
}

fn merge_line_atoms(atoms: Vec<CenterAtom>) -> Vec<CenterAtom> {
    let mut merged: Vec<CenterAtom> = Vec::new();
    for atom in atoms {
        if let Some(slot) = merged.iter_mut().find(|a| a.point == atom.point) {
            slot.weight += atom.weight;
        } else {
            merged.push(atom);
        }
    }
    merged.sort_by(|a, b| a.point.total_cmp(&b.point));
    merged
}

/// Restricts a spectral type to a subgroup, descriptor-level.
///
/// For the centre: the maximal spectral type contains the total planar
/// mass as an atom at frequency zero plus the centre part unchanged; the
/// copy count at zero totals the planar summands and is infinite at every
/// other frequency. For the centre-and-first-axis plane: the planar part
/// projects to its first frequency on the zero-centre line (per-line copy
/// counts add up), and each centre atom turns into a Lebesgue sheet
/// across the transverse frequency, keeping its copy count.
pub fn restrict_type(
    d: &SpectralTypeDescriptor,
    target: RestrictionTarget,
) -> Result<RestrictionReport> {
    d.validate()?;
    match target {
        RestrictionTarget::Center => {
            let zero_atom_weight: f64 = d.planar_atoms.iter().map(|a| a.weight).sum();
            let mut multiplicity_at_zero = Multiplicity::Finite(0);
            for atom in &d.planar_atoms {
                if atom.weight > 0.0 {
                    multiplicity_at_zero =
                        multiplicity_at_zero.saturating_add(d.planar_multiplicity.get(atom.point));
                }
            }
            if d.planar_continuous.is_some() {
                multiplicity_at_zero = Multiplicity::Infinite;
            }
            Ok(RestrictionReport::Center(
                CenterRestriction {
                    zero_atom_weight,
                    zero_atom_symbolic: d.planar_continuous.is_some(),
                    atoms: d.center_atoms.clone(),
                    continuous: split_tag(&d.center_continuous),
                    multiplicity_at_zero,
                    multiplicity_off_zero: Multiplicity::Infinite,
                }
                .canonical(),
            ))
        }
        RestrictionTarget::CenterAndFirstAxis => {
            let mut line_atoms: Vec<CenterAtom> = Vec::new();
            let mut table = CenterMultiplicity::constant(d.planar_multiplicity.default);
            for atom in &d.planar_atoms {
                let alpha = atom.point.0;
                let m = d.planar_multiplicity.get(atom.point);
                if let Some(slot) = line_atoms.iter_mut().find(|a| a.point == alpha) {
                    slot.weight += atom.weight;
                } else {
                    line_atoms.push(CenterAtom {
                        weight: atom.weight,
                        point: alpha,
                    });
                }
                let merged = table
                    .entries
                    .iter()
                    .find(|(q, _)| *q == alpha)
                    .map(|(_, prev)| prev.saturating_add(m));
                table.set(alpha, merged.unwrap_or(m));
            }
            let sheets = d
                .center_atoms
                .iter()
                .map(|atom| LebesgueSheet {
                    weight: atom.weight,
                    gamma: atom.point,
                    multiplicity: d.center_multiplicity.get(atom.point),
                })
                .collect();
            let sheet_continuous = if d.center_continuous.is_some() {
                let mut tags = split_tag(&d.center_continuous);
                tags.push(CENTER_TIMES_LEBESGUE.to_owned());
                tags
            } else {
                Vec::new()
            };
            Ok(RestrictionReport::CenterAndFirstAxis(
                PlaneRestriction {
                    line_atoms,
                    line_continuous: split_tag(&d.planar_continuous),
                    sheets,
                    sheet_continuous,
                    line_multiplicity: table,
                }
                .canonical(),
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// Tensor-product rule
// ---------------------------------------------------------------------------

/// Spectral type of the tensor product of two infinite-dimensional
/// representations with centre frequencies `gamma` and `gamma_prime`.
///
/// When the frequencies do not cancel, the product is infinitely many
/// copies of the representation at the summed frequency; when they
/// cancel, it is the full planar Lebesgue integral of characters, each
/// once.
pub fn tensor_rule(gamma: f64, gamma_prime: f64) -> Result<SpectralTypeDescriptor> {
    if gamma == 0.0 || gamma_prime == 0.0 || !gamma.is_finite() || !gamma_prime.is_finite() {
        return Err(Error::GammaZero);
    }
    let sum = gamma + gamma_prime;
    let mut d = SpectralTypeDescriptor::empty();
    if sum != 0.0 {
        d.center_atoms.push(CenterAtom {
            weight: 1.0,
            point: sum,
        });
        d.center_multiplicity.set(sum, Multiplicity::Infinite);
    } else {
        d.planar_continuous = Some(PLANAR_LEBESGUE.to_owned());
        d.planar_multiplicity = PlanarMultiplicity::constant(Multiplicity::Finite(1));
    }
    Ok(d)
}

// ---------------------------------------------------------------------------
// Character evaluation
// ---------------------------------------------------------------------------

/// Evaluates the one-dimensional character with planar frequencies
/// `(alpha, beta)` at a group element: a unit complex number depending
/// only on the first two coordinates.
pub fn eval_pi_ab(alpha: f64, beta: f64, g: &GroupElement) -> Complex64 {
    let t1 = rat_to_f64(&g.t1);
    let t2 = rat_to_f64(&g.t2);
    Complex64::from_polar(1.0, alpha * t1 + beta * t2)
}

// ---------------------------------------------------------------------------
// Grid evaluation of the infinite-dimensional family
// ---------------------------------------------------------------------------

/// A complex function sampled on the uniform grid of `[-L, L]` with an
/// odd number of cells centred at the origin.
///
/// Serialized as one JSON header line (`half_width`, `step`, `len`)
/// followed by the raw little-endian `f64` pairs of the samples.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    half_width: f64,
    step: f64,
    values: Vec<Complex64>,
}

impl GridFunction {
    /// Zero function on the grid of `[-half_width, half_width]` with the
    /// given step. The window must hold at least three grid points.
    pub fn zeros(half_width: f64, step: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0 && half_width.is_finite() && half_width > 0.0) {
            return Err(Error::Config(format!(
                "grid needs positive finite half-width and step, got {half_width} and {step}"
            )));
        }
        let m = (half_width / step).round();
        if !(1.0..=1e8).contains(&m) {
            return Err(Error::Config(format!(
                "grid with half-width {half_width} and step {step} has {m} cells per side; \
                 expected between 1 and 1e8"
            )));
        }
        if (m * step - half_width).abs() > step * 1e-9 {
            return Err(Error::Config(format!(
                "half-width {half_width} is not a whole number of steps of {step}"
            )));
        }
        let m = m as usize;
        Ok(GridFunction {
            half_width,
            step,
            values: vec![Complex64::new(0.0, 0.0); 2 * m + 1],
        })
    }

    /// Samples a function at the grid points.
    pub fn sample(half_width: f64, step: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let mut g = GridFunction::zeros(half_width, step)?;
        for k in 0..g.values.len() {
            g.values[k] = f(g.point(k));
        }
        Ok(g)
    }

    /// Wraps existing samples, validating the geometry.
    pub fn from_values(half_width: f64, step: f64, values: Vec<Complex64>) -> Result<Self> {
        let expected = GridFunction::zeros(half_width, step)?.values.len();
        if values.len() != expected {
            return Err(Error::Config(format!(
                "grid of half-width {half_width} and step {step} needs {expected} samples, got {}",
                values.len()
            )));
        }
        Ok(GridFunction {
            half_width,
            step,
            values,
        })
    }

    /// Half-width `L` of the window.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Grid step.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True when the grid holds no samples (never for a validated grid).
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Samples, in grid order.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Mutable samples, in grid order.
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Coordinate of the `k`-th grid point.
    pub fn point(&self, k: usize) -> f64 {
        let m = (self.values.len() - 1) / 2;
        (k as f64 - m as f64) * self.step
    }

    /// Squared grid norm `step * sum |f|^2`.
    pub fn norm_sq(&self) -> f64 {
        self.step * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    /// Grid distance `sqrt(step * sum |f - g|^2)` between two functions
    /// on the same grid.
    pub fn distance(&self, other: &GridFunction) -> Result<f64> {
        if self.half_width != other.half_width
            || self.step != other.step
            || self.values.len() != other.values.len()
        {
            return Err(Error::Config(
                "grid distance needs two functions on the same grid".into(),
            ));
        }
        let sum: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((self.step * sum).sqrt())
    }

    /// Writes the JSON header line and the raw little-endian samples.
    pub fn write_to<W: io::Write>(&self, w: &mut W) -> Result<()> {
        let header = serde_json::json!({
            "half_width": self.half_width,
            "step": self.step,
            "len": self.values.len(),
        });
        let mut line = serde_json::to_string(&header)?;
        line.push('\n');
        w.write_all(line.as_bytes())?;
        for v in &self.values {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a function written by [`GridFunction::write_to`].
    pub fn read_from<R: io::Read>(r: &mut R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Header {
            half_width: f64,
            step: f64,
            len: usize,
        }
        let mut line = Vec::new();
        let mut byte = [0u8; 1];
        loop {
            r.read_exact(&mut byte)?;
            if byte[0] == b'\n' {
                break;
            }
            line.push(byte[0]);
            if line.len() > 4096 {
                return Err(Error::Serde("grid header exceeds 4096 bytes".into()));
            }
        }
        let header: Header = serde_json::from_slice(&line)?;
        let expected = GridFunction::zeros(header.half_width, header.step)?
            .values
            .len();
        if header.len != expected {
            return Err(Error::Serde(format!(
                "grid header announces {} samples, geometry needs {expected}",
                header.len
            )));
        }
        let mut values = Vec::with_capacity(header.len);
        let mut buf = [0u8; 16];
        for _ in 0..header.len {
            r.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf[0..8].try_into().expect("8-byte slice"));
            let im = f64::from_le_bytes(buf[8..16].try_into().expect("8-byte slice"));
            values.push(Complex64::new(re, im));
        }
        GridFunction::from_values(header.half_width, header.step, values)
    }
}

/// Result of evaluating the infinite-dimensional representation on a
/// grid function.
#[derive(Clone, Debug)]
pub struct GridEval {
    /// The transformed function.
    pub output: GridFunction,
    /// Whole-cell shift applied to the argument.
    pub shift_cells: i64,
    /// Part of the first coordinate the grid could not represent:
    /// `t1 - shift_cells * step`, zero when the shift is a whole number
    /// of cells.
    pub shift_rounding: f64,
    /// Squared-norm mass `step * sum |f|^2` of the samples the shift
    /// pushed outside the window.
    pub boundary_mass: f64,
}

/// Evaluates the infinite-dimensional representation with centre
/// frequency `gamma` at `g` on a grid function: multiplies by the phase
/// `exp(i gamma (t3 + t2 x))` and shifts the argument by `t1`, zero-filling
/// outside the window. A `t1` that is not a whole number of grid cells is
/// rounded to the nearest cell and the remainder is recorded.
pub fn eval_pi_gamma(gamma: f64, g: &GroupElement, f: &GridFunction) -> Result<GridEval> {
    eval_pi_gamma_chunked(gamma, g, f, 1)
}

/// Same as [`eval_pi_gamma`], splitting the window into `jobs` chunks
/// evaluated on separate threads. Every sample is computed independently,
/// so the output is bit-identical for any job count.
pub fn eval_pi_gamma_chunked(
    gamma: f64,
    g: &GroupElement,
    f: &GridFunction,
    jobs: usize,
) -> Result<GridEval> {
    if gamma == 0.0 || !gamma.is_finite() {
        return Err(Error::GammaZero);
    }
    let t1 = rat_to_f64(&g.t1);
    let t2 = rat_to_f64(&g.t2);
    let t3 = rat_to_f64(&g.t3);
    let n = f.values.len();
    let exact = t1 / f.step;
    if !exact.is_finite() || exact.abs() > 1e12 {
        return Err(Error::Config(format!(
            "argument shift {t1} is astronomically beyond a grid of step {}",
            f.step
        )));
    }
    let shift_cells = exact.round() as i64;
    let shift_rounding = t1 - shift_cells as f64 * f.step;

    let mut output = GridFunction {
        half_width: f.half_width,
        step: f.step,
        values: vec![Complex64::new(0.0, 0.0); n],
    };
    let fill = |start: usize, out_chunk: &mut [Complex64]| {
        for (offset, slot) in out_chunk.iter_mut().enumerate() {
            let k = start + offset;
            let source = k as i64 + shift_cells;
            if (0..n as i64).contains(&source) {
                let x = f.point(k);
                let phase = Complex64::from_polar(1.0, gamma * (t3 + t2 * x));
                *slot = phase * f.values[source as usize];
            }
        }
    };
    let jobs = jobs.max(1).min(n);
    if jobs == 1 {
        fill(0, &mut output.values);
    } else {
        let chunk = n.div_ceil(jobs);
        std::thread::scope(|scope| {
            for (i, out_chunk) in output.values.chunks_mut(chunk).enumerate() {
                let fill = &fill;
                scope.spawn(move || fill(i * chunk, out_chunk));
            }
        });
    }

    let mut boundary = 0.0;
    for (j, v) in f.values.iter().enumerate() {
        let landing = j as i64 - shift_cells;
        if !(0..n as i64).contains(&landing) {
            boundary += v.norm_sqr();
        }
    }
    Ok(GridEval {
        output,
        shift_cells,
        shift_rounding,
        boundary_mass: boundary * f.step,
    })
}

/// Grid-norm gap between evaluating `g` after `h` and evaluating their
/// product directly: reports the boundary-truncation error of the window,
/// which shrinks as the window grows around the supports involved.
pub fn homomorphism_gap(
    gamma: f64,
    g: &GroupElement,
    h: &GroupElement,
    f: &GridFunction,
) -> Result<f64> {
    let inner = eval_pi_gamma(gamma, h, f)?;
    let two_step = eval_pi_gamma(gamma, g, &inner.output)?;
    let direct = eval_pi_gamma(gamma, &g.mul(h), f)?;
    two_step.output.distance(&direct.output)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int, Rat};
    use num::Zero;
    use proptest::prelude::*;

    fn bump(half_width: f64, step: f64, center: f64, radius: f64) -> GridFunction {
        GridFunction::sample(half_width, step, |x| {
            if (x - center).abs() <= radius {
                Complex64::new(1.0 - (x - center).abs() / radius, 0.25)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .expect("grid")
    }

    #[test]
    fn characters_ignore_the_centre() {
        for t in [rat_int(-3), rat(7, 2), rat_int(0), rat(1, 64)] {
            let z = eval_pi_ab(0.75, -1.5, &GroupElement::c(t));
            assert_eq!(z, Complex64::new(1.0, 0.0));
        }
        let g = GroupElement::new(rat(5, 3), rat(-2, 7), rat(11, 4));
        assert_eq!(eval_pi_ab(0.0, 0.0, &g), Complex64::new(1.0, 0.0));
    }

    proptest! {
        #[test]
        fn characters_have_unit_modulus(
            n1 in -40i64..40, n2 in -40i64..40, n3 in -40i64..40,
            a in -4.0f64..4.0, b in -4.0f64..4.0,
        ) {
            let g = GroupElement::new(
                Rat::new(n1.into(), 8.into()),
                Rat::new(n2.into(), 8.into()),
                Rat::new(n3.into(), 8.into()),
            );
            let z = eval_pi_ab(a, b, &g);
            prop_assert!((z.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn characters_multiply_along_the_group_law(
            n1 in -20i64..20, n2 in -20i64..20,
            m1 in -20i64..20, m2 in -20i64..20,
        ) {
            let g = GroupElement::new(
                Rat::new(n1.into(), 4.into()),
                Rat::new(n2.into(), 4.into()),
                Rat::zero(),
            );
            let h = GroupElement::new(
                Rat::new(m1.into(), 4.into()),
                Rat::new(m2.into(), 4.into()),
                Rat::zero(),
            );
            let lhs = eval_pi_ab(1.25, -0.5, &g) * eval_pi_ab(1.25, -0.5, &h);
            let rhs = eval_pi_ab(1.25, -0.5, &g.mul(&h));
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn centre_acts_by_a_global_phase() {
        let f = bump(4.0, 0.25, 0.0, 1.0);
        let gamma = 1.75;
        let t = rat(3, 2);
        let eval = eval_pi_gamma(gamma, &GroupElement::c(t.clone()), &f).unwrap();
        assert_eq!(eval.shift_cells, 0);
        assert_eq!(eval.shift_rounding, 0.0);
        assert_eq!(eval.boundary_mass, 0.0);
        let phase = Complex64::from_polar(1.0, gamma * rat_to_f64(&t));
        for (out, orig) in eval.output.values().iter().zip(f.values()) {
            assert!((out - phase * orig).norm() < 1e-12);
        }

        let id = eval_pi_gamma(gamma, &GroupElement::identity(), &f).unwrap();
        assert_eq!(id.output, f);
    }

    #[test]
    fn grid_shift_is_unitary_up_to_boundary_mass() {
        let f = bump(4.0, 0.25, 3.0, 1.5);
        let g = GroupElement::a(rat_int(-2));
        let eval = eval_pi_gamma(0.5, &g, &f).unwrap();
        assert_eq!(eval.shift_cells, -8);
        assert_eq!(eval.shift_rounding, 0.0);
        assert!(eval.boundary_mass > 0.0);
        let defect = f.norm_sq() - eval.output.norm_sq();
        assert!((defect - eval.boundary_mass).abs() < 1e-10);

        let inside = eval_pi_gamma(0.5, &GroupElement::a(rat_int(1)), &f).unwrap();
        assert_eq!(inside.boundary_mass, 0.0);
        assert!((inside.output.norm_sq() - f.norm_sq()).abs() < 1e-10);
    }

    #[test]
    fn off_grid_shifts_record_their_rounding() {
        let f = bump(4.0, 0.25, 0.0, 1.0);
        let eval = eval_pi_gamma(1.0, &GroupElement::a(rat(1, 3)), &f).unwrap();
        assert_eq!(eval.shift_cells, 1);
        assert!((eval.shift_rounding - (1.0 / 3.0 - 0.25)).abs() < 1e-15);
        assert!(eval.shift_rounding.abs() <= f.step() / 2.0);
    }

    #[test]
    fn representation_composes_along_the_group_law() {
        let f = bump(8.0, 0.25, 0.0, 1.0);
        let g = GroupElement::new(rat(3, 4), rat(1, 2), rat(5, 4));
        let h = GroupElement::new(rat(-1, 2), rat(2, 1), rat(1, 4));
        let gap = homomorphism_gap(0.8, &g, &h, &f).unwrap();
        assert!(gap < 1e-9, "gap {gap}");

        // Pushing the support against the window edge loses mass at the
        // intermediate stage; widening the window restores the identity.
        let edgy = bump(4.0, 0.25, 3.0, 1.0);
        let far = GroupElement::a(rat_int(-2));
        let back = GroupElement::a(rat_int(2));
        let gap_small = homomorphism_gap(0.8, &back, &far, &edgy).unwrap();
        let wide = bump(16.0, 0.25, 3.0, 1.0);
        let gap_wide = homomorphism_gap(0.8, &back, &far, &wide).unwrap();
        assert!(gap_small > 0.1, "gap_small {gap_small}");
        assert!(gap_wide < 1e-9, "gap_wide {gap_wide}");
    }

    #[test]
    fn chunked_evaluation_is_bit_identical() {
        let f = bump(6.0, 0.125, 1.0, 2.0);
        let g = GroupElement::new(rat(5, 8), rat(-3, 4), rat(7, 8));
        let single = eval_pi_gamma_chunked(1.3, &g, &f, 1).unwrap();
        for jobs in [2, 3, 7, 64] {
            let multi = eval_pi_gamma_chunked(1.3, &g, &f, jobs).unwrap();
            assert_eq!(single.output, multi.output);
            assert_eq!(single.boundary_mass, multi.boundary_mass);
        }
    }

    #[test]
    fn flip_reverses_the_centre_frequency() {
        let f = bump(4.0, 0.25, 0.0, 1.5);
        let t = rat(7, 4);
        let flipped = GroupElement::c(t.clone()).flip();
        let lhs = eval_pi_gamma(2.5, &flipped, &f).unwrap();
        let rhs = eval_pi_gamma(-2.5, &GroupElement::c(t), &f).unwrap();
        assert_eq!(lhs.output, rhs.output);
    }

    #[test]
    fn zero_frequency_is_rejected() {
        let f = bump(2.0, 0.5, 0.0, 1.0);
        let err = eval_pi_gamma(0.0, &GroupElement::identity(), &f).unwrap_err();
        assert!(matches!(err, Error::GammaZero));
        assert!(matches!(tensor_rule(0.0, 1.0), Err(Error::GammaZero)));
        assert!(matches!(tensor_rule(1.0, 0.0), Err(Error::GammaZero)));
    }

    #[test]
    fn restriction_to_the_centre_collapses_the_planar_sector() {
        let planar_only = SpectralTypeDescriptor::pure_planar_atom(
            0.5,
            (1.0, -2.0),
            Multiplicity::Finite(3),
        )
        .unwrap();
        let RestrictionReport::Center(r) =
            restrict_type(&planar_only, RestrictionTarget::Center).unwrap()
        else {
            panic!("wrong report shape")
        };
        assert_eq!(r.zero_atom_weight, 0.5);
        assert!(!r.zero_atom_symbolic);
        assert!(r.atoms.is_empty());
        assert!(r.continuous.is_empty());
        assert_eq!(r.multiplicity_at_zero, Multiplicity::Finite(3));
        assert_eq!(r.multiplicity_off_zero, Multiplicity::Infinite);

        let center_only =
            SpectralTypeDescriptor::pure_center_atom(2.0, 1.5, Multiplicity::Finite(1)).unwrap();
        let RestrictionReport::Center(r) =
            restrict_type(&center_only, RestrictionTarget::Center).unwrap()
        else {
            panic!("wrong report shape")
        };
        assert_eq!(r.zero_atom_weight, 0.0);
        assert_eq!(r.atoms.len(), 1);
        assert_eq!(r.atoms[0].point, 1.5);
        assert_eq!(r.multiplicity_at_zero, Multiplicity::Finite(0));
        assert_eq!(r.multiplicity_off_zero, Multiplicity::Infinite);

        let RestrictionReport::Center(r) =
            restrict_type(&SpectralTypeDescriptor::empty(), RestrictionTarget::Center).unwrap()
        else {
            panic!("wrong report shape")
        };
        assert_eq!(r.zero_atom_weight, 0.0);
        assert!(r.atoms.is_empty() && r.continuous.is_empty());
        assert_eq!(r.multiplicity_at_zero, Multiplicity::Finite(0));
    }

    #[test]
    fn restriction_to_the_plane_keeps_the_product_structure() {
        let a = SpectralTypeDescriptor::pure_planar_atom(
            1.0,
            (2.0, 1.0),
            Multiplicity::Finite(2),
        )
        .unwrap();
        let b = SpectralTypeDescriptor::pure_planar_atom(
            0.5,
            (2.0, -1.0),
            Multiplicity::Finite(1),
        )
        .unwrap();
        let c = SpectralTypeDescriptor::pure_center_atom(
            3.0,
            -0.5,
            Multiplicity::Infinite,
        )
        .unwrap();
        let d = a.direct_sum(&b).direct_sum(&c);
        let RestrictionReport::CenterAndFirstAxis(r) =
            restrict_type(&d, RestrictionTarget::CenterAndFirstAxis).unwrap()
        else {
            panic!("wrong report shape")
        };
        // Both planar atoms share the first frequency: one line atom with
        // added weight and copy count.
        assert_eq!(r.line_atoms.len(), 1);
        assert_eq!(r.line_atoms[0].point, 2.0);
        assert_eq!(r.line_atoms[0].weight, 1.5);
        assert_eq!(r.line_multiplicity.get(2.0), Multiplicity::Finite(3));
        // The centre atom spreads into one Lebesgue sheet.
        assert_eq!(r.sheets.len(), 1);
        assert_eq!(r.sheets[0].gamma, -0.5);
        assert_eq!(r.sheets[0].weight, 3.0);
        assert_eq!(r.sheets[0].multiplicity, Multiplicity::Infinite);
        assert!(r.sheet_continuous.is_empty());
    }

    #[test]
    fn restriction_is_additive_over_direct_sums() {
        let mut d1 = SpectralTypeDescriptor::pure_planar_atom(
            1.0,
            (1.0, 0.0),
            Multiplicity::Finite(2),
        )
        .unwrap();
        d1.planar_continuous = Some("tail".to_owned());
        let mut d2 = SpectralTypeDescriptor::pure_center_atom(
            0.75,
            2.0,
            Multiplicity::Finite(5),
        )
        .unwrap();
        d2.center_continuous = Some("sea".to_owned());
        let d2 = d2
            .direct_sum(
                &SpectralTypeDescriptor::pure_planar_atom(
                    0.25,
                    (1.0, 3.0),
                    Multiplicity::Finite(1),
                )
                .unwrap(),
            );

        for target in [RestrictionTarget::Center, RestrictionTarget::CenterAndFirstAxis] {
            let joint = restrict_type(&d1.direct_sum(&d2), target).unwrap();
            let merged = match (
                restrict_type(&d1, target).unwrap(),
                restrict_type(&d2, target).unwrap(),
            ) {
                (RestrictionReport::Center(a), RestrictionReport::Center(b)) => {
                    RestrictionReport::Center(a.merged(b))
                }
                (
                    RestrictionReport::CenterAndFirstAxis(a),
                    RestrictionReport::CenterAndFirstAxis(b),
                ) => RestrictionReport::CenterAndFirstAxis(a.merged(b)),
                _ => panic!("mismatched report shapes"),
            };
            assert_eq!(joint, merged);
        }
    }

    #[test]
    fn tensor_rule_branches_on_the_summed_frequency() {
        let d = tensor_rule(1.0, 2.0).unwrap();
        assert!(d.planar_atoms.is_empty() && d.planar_continuous.is_none());
        assert_eq!(d.center_atoms.len(), 1);
        assert_eq!(d.center_atoms[0].point, 3.0);
        assert_eq!(d.center_multiplicity.get(3.0), Multiplicity::Infinite);

        let flat = tensor_rule(1.0, -1.0).unwrap();
        assert!(flat.center_atoms.is_empty());
        assert_eq!(flat.planar_continuous.as_deref(), Some(PLANAR_LEBESGUE));
        assert_eq!(flat.planar_multiplicity.get((0.3, 0.7)), Multiplicity::Finite(1));

        for (g, gp) in [(1.0, 2.0), (0.5, -0.5), (-3.0, 1.25)] {
            assert_eq!(tensor_rule(g, gp).unwrap(), tensor_rule(gp, g).unwrap());
        }
    }

    #[test]
    fn invalid_descriptors_are_rejected() {
        let mut bad = SpectralTypeDescriptor::empty();
        bad.center_atoms.push(CenterAtom {
            weight: 1.0,
            point: 0.0,
        });
        assert!(matches!(bad.validate(), Err(Error::Validation(_))));
        assert!(matches!(
            restrict_type(&bad, RestrictionTarget::Center),
            Err(Error::Validation(_))
        ));

        let mut negative = SpectralTypeDescriptor::empty();
        negative.planar_atoms.push(PlanarAtom {
            weight: -0.5,
            point: (1.0, 1.0),
        });
        assert!(matches!(negative.validate(), Err(Error::Validation(_))));
    }

    #[test]
    fn descriptors_serialize_round_trip() {
        let mut d = SpectralTypeDescriptor::pure_center_atom(1.5, 2.5, Multiplicity::Infinite)
            .unwrap()
            .direct_sum(
                &SpectralTypeDescriptor::pure_planar_atom(
                    0.5,
                    (0.0, 1.0),
                    Multiplicity::Finite(4),
                )
                .unwrap(),
            );
        d.planar_continuous = Some(PLANAR_LEBESGUE.to_owned());
        let json = serde_json::to_string(&d).unwrap();
        let back: SpectralTypeDescriptor = serde_json::from_str(&json).unwrap();
        assert_eq!(d, back);
        assert!(json.contains("\"inf\""));
    }

    #[test]
    fn grid_functions_round_trip_through_bytes() {
        let f = bump(3.0, 0.25, -1.0, 1.0);
        let mut bytes = Vec::new();
        f.write_to(&mut bytes).unwrap();
        let back = GridFunction::read_from(&mut bytes.as_slice()).unwrap();
        assert_eq!(f, back);

        let mut twice = Vec::new();
        back.write_to(&mut twice).unwrap();
        assert_eq!(bytes, twice);

        let truncated = &bytes[..bytes.len() - 5];
        assert!(GridFunction::read_from(&mut &truncated[..]).is_err());
    }

    #[test]
    fn grid_geometry_is_validated() {
        assert!(matches!(
            GridFunction::zeros(4.0, 0.0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            GridFunction::zeros(1.0, 0.3),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            GridFunction::from_values(1.0, 0.5, vec![Complex64::new(1.0, 0.0); 4]),
            Err(Error::Config(_))
        ));
        let g = GridFunction::zeros(1.0, 0.5).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g.point(0), -1.0);
        assert_eq!(g.point(4), 1.0);
    }
}
