//! Exact arithmetic in the 3-dimensional Heisenberg group.
//!
//! Elements are upper-triangular unipotent 3×3 matrices over ℚ, stored in
//! canonical coordinates `(t1, t2, t3)` for the matrix
//!
//! ```text
//!         | 1  t1  t3 |
//!         | 0   1  t2 |
//!         | 0   0   1 |
//! ```
//!
//! so that `g = c(t3) · b(t2) · a(t1)` where `a`, `b` generate the two
//! horizontal one-parameter subgroups and `c` generates the center.
//! Multiplication picks up a single cross term in the third coordinate,
//! inversion is closed-form, and the flip `θ` swaps the two horizontal
//! directions. Everything here is exact over ℚ.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rat::{format_rat, parse_rat, Rat};

/// A group element in canonical coordinates `(t1, t2, t3)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    /// Superdiagonal entry in the first row (the `a`-direction).
    pub t1: Rat,
    /// Superdiagonal entry in the second row (the `b`-direction).
    pub t2: Rat,
    /// Top-right entry (the central direction).
    pub t3: Rat,
}

impl GroupElement {
    /// Builds the element with the given canonical coordinates.
    pub fn new(t1: Rat, t2: Rat, t3: Rat) -> Self {
        GroupElement { t1, t2, t3 }
    }

    /// The identity element.
    pub fn identity() -> Self {
        GroupElement::new(Rat::from_integer(0.into()), Rat::from_integer(0.into()), Rat::from_integer(0.into()))
    }

    /// One-parameter subgroup `a(t)`: unit shear in the `t1`-direction.
    pub fn a(t: Rat) -> Self {
        GroupElement::new(t, Rat::from_integer(0.into()), Rat::from_integer(0.into()))
    }

    /// One-parameter subgroup `b(t)`: unit shear in the `t2`-direction.
    pub fn b(t: Rat) -> Self {
        GroupElement::new(Rat::from_integer(0.into()), t, Rat::from_integer(0.into()))
    }

    /// Central one-parameter subgroup `c(t)`.
    pub fn c(t: Rat) -> Self {
        GroupElement::new(Rat::from_integer(0.into()), Rat::from_integer(0.into()), t)
    }

    /// Group multiplication (matrix product):
    /// `(g1,g2,g3)·(h1,h2,h3) = (g1+h1, g2+h2, g3+h3+g1·h2)`.
    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement::new(
            &self.t1 + &other.t1,
            &self.t2 + &other.t2,
            &self.t3 + &other.t3 + &self.t1 * &other.t2,
        )
    }

    /// Group inverse: `(t1,t2,t3)⁻¹ = (−t1, −t2, t1·t2 − t3)`.
    pub fn inv(&self) -> GroupElement {
        GroupElement::new(-&self.t1, -&self.t2, &self.t1 * &self.t2 - &self.t3)
    }

    /// Commutator `[g, h] = g h g⁻¹ h⁻¹`; always central, with
    /// `[a(s), b(t)] = c(s·t)`.
    pub fn commutator(g: &GroupElement, h: &GroupElement) -> GroupElement {
        g.mul(h).mul(&g.inv()).mul(&h.inv())
    }

    /// The flip automorphism `θ`: swaps the two horizontal directions,
    /// `θ(t1,t2,t3) = (t2, t1, t1·t2 − t3)`. Satisfies `θ² = id`,
    /// `θ(a(t)) = b(t)`, and `θ(c(t)) = c(−t)`.
    pub fn flip(&self) -> GroupElement {
        GroupElement::new(self.t2.clone(), self.t1.clone(), &self.t1 * &self.t2 - &self.t3)
    }

    /// Whether the element lies in the center `{t1 = t2 = 0}`.
    pub fn is_central(&self) -> bool {
        use num::traits::Zero;
        self.t1.is_zero() && self.t2.is_zero()
    }

    /// Integer power `g^k` (negative exponents via the inverse).
    pub fn pow(&self, k: i64) -> GroupElement {
        let mut acc = GroupElement::identity();
        let base = if k >= 0 { self.clone() } else { self.inv() };
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Decomposes `g` in generator order: returns `(s1, s2, s3)` with
    /// `g = a(s1) · b(s2) · c(s3)`. In canonical coordinates
    /// `s1 = t1`, `s2 = t2`, `s3 = t3 − t1·t2`.
    pub fn to_abc(&self) -> (Rat, Rat, Rat) {
        (
            self.t1.clone(),
            self.t2.clone(),
            &self.t3 - &self.t1 * &self.t2,
        )
    }

    /// Composes `a(s1) · b(s2) · c(s3)` into canonical coordinates:
    /// `(s1, s2, s1·s2 + s3)`.
    pub fn from_abc(s1: Rat, s2: Rat, s3: Rat) -> GroupElement {
        let t3 = &s1 * &s2 + s3;
        GroupElement::new(s1, s2, t3)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {})",
            format_rat(&self.t1),
            format_rat(&self.t2),
            format_rat(&self.t3)
        )
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [
            format_rat(&self.t1),
            format_rat(&self.t2),
            format_rat(&self.t3),
        ]
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let parts = <[String; 3]>::deserialize(d)?;
        let t1 = parse_rat(&parts[0]).map_err(D::Error::custom)?;
        let t2 = parse_rat(&parts[1]).map_err(D::Error::custom)?;
        let t3 = parse_rat(&parts[2]).map_err(D::Error::custom)?;
        Ok(GroupElement::new(t1, t2, t3))
    }
}
