//! Shared fixtures for the criterion benchmarks: representative inputs
//! sized so one iteration stays in the microsecond-to-millisecond range.

use cfh3::rat::{rat, rat_int};
use cfh3::region::{BishearBox, Interval};
use cfh3::schedule::{build_asymmetric, AsymmetricConfig};
use cfh3::spectral::{Complex64, GridFunction};
use cfh3::{GroupElement, Schedule};

/// A generic pair of sheared boxes whose intersection exercises every
/// branch of the exact kernel.
pub fn sheared_pair() -> (BishearBox, BishearBox) {
    let iv = |lo: i64, hi: i64| Interval::new(rat_int(lo), rat_int(hi));
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
    (a, b)
}

/// Axis-parallel window covering [`sheared_pair`].
pub fn pair_window() -> BishearBox {
    let iv = |lo: i64, hi: i64| Interval::new(rat_int(lo), rat_int(hi));
    BishearBox::axis(iv(-1, 3), iv(-1, 1), iv(-4, 8))
}

/// A pair of group elements with non-trivial rational parts.
pub fn element_pair() -> (GroupElement, GroupElement) {
    (
        GroupElement::new(rat(3, 4), rat(-5, 2), rat(7, 3)),
        GroupElement::new(rat(-1, 6), rat(11, 4), rat(-2, 5)),
    )
}

/// A deterministic six-level tower of the period-5 family.
pub fn small_tower() -> Schedule {
    build_asymmetric(&AsymmetricConfig {
        levels: 6,
        ..AsymmetricConfig::default()
    })
    .expect("fixture build")
}

/// A smooth complex profile on a moderate grid (129 cells).
pub fn test_grid() -> GridFunction {
    GridFunction::sample(8.0, 0.125, |x| {
        Complex64::new((-x * x).exp(), 0.5 * (-(x - 1.0) * (x - 1.0)).exp())
    })
    .expect("fixture grid")
}
