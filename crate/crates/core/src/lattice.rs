//! Exact integer arithmetic on the Moser lattice.
//!
//! A lattice point is an integer combination `a + b·ω₁ + c·ω₃ + d·ω₁ω₃`
//! where `ω₁ = exp(iπ/3)` and `ω₃ = 5/6 + i·√11/6`. Its squared length is
//!
//! ```text
//! |z|² = p(a,b,c,d) + (bc − ad)·√33/6
//! ```
//!
//! with `p` a rational quadratic form. Since √33 is irrational, `z` is a unit
//! exactly when `6p = 6` and `ad = bc`, which lets every distance test run in
//! integer registers.

use core::ops::{Add, Neg, Sub};

use num_complex::Complex64;

/// Coefficient bound for vertices of a search graph, before translation.
pub const COEF_BOUND: i32 = 10;

/// Number of unit vectors in the lattice.
pub const UNIT_COUNT: usize = 18;

/// `ω₁ = exp(iπ/3)`.
pub const OMEGA1: Complex64 = Complex64::new(0.5, 0.866_025_403_784_438_6);
/// `ω₃ = 5/6 + i·√11/6`.
pub const OMEGA3: Complex64 = Complex64::new(5.0 / 6.0, 0.552_770_798_392_566_6);
/// `ω₁·ω₃`.
pub const OMEGA13: Complex64 = Complex64::new(
    0.5 * (5.0 / 6.0) - 0.866_025_403_784_438_6 * 0.552_770_798_392_566_6,
    0.5 * 0.552_770_798_392_566_6 + 0.866_025_403_784_438_6 * (5.0 / 6.0),
);

/// A point of the Moser lattice, stored as its coefficients `(a, b, c, d)`
/// over the basis `{1, ω₁, ω₃, ω₁ω₃}`.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint(pub [i32; 4]);

impl LatticePoint {
    pub const ORIGIN: LatticePoint = LatticePoint([0; 4]);

    pub const fn new(a: i32, b: i32, c: i32, d: i32) -> Self {
        LatticePoint([a, b, c, d])
    }

    #[inline]
    pub const fn coords(&self) -> [i32; 4] {
        self.0
    }

    /// Six times the rational part of `|z|²`.
    ///
    /// Evaluated in 64-bit so no input of `i32` coefficients bounded by a few
    /// thousand can overflow; search graphs stay within `±40`.
    #[inline]
    pub const fn quad_form_x6(&self) -> i64 {
        let [a, b, c, d] = self.0;
        let (a, b, c, d) = (a as i64, b as i64, c as i64, d as i64);
        6 * a * a
            + 6 * a * b
            + 10 * a * c
            + 5 * a * d
            + 6 * b * b
            + 5 * b * c
            + 10 * b * d
            + 6 * c * c
            + 6 * c * d
            + 6 * d * d
    }

    /// Whether the point has length exactly one.
    #[inline]
    pub const fn is_unit(&self) -> bool {
        let [a, b, c, d] = self.0;
        self.quad_form_x6() == 6 && (a as i64) * (d as i64) == (b as i64) * (c as i64)
    }

    /// Position in the complex plane.
    pub fn embed(&self) -> Complex64 {
        let [a, b, c, d] = self.0;
        Complex64::new(a as f64, 0.0) + OMEGA1 * b as f64 + OMEGA3 * c as f64 + OMEGA13 * d as f64
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> i32 {
        self.0.iter().map(|x| x.abs()).max().unwrap_or(0)
    }
}

impl From<[i32; 4]> for LatticePoint {
    fn from(c: [i32; 4]) -> Self {
        LatticePoint(c)
    }
}

impl Add for LatticePoint {
    type Output = LatticePoint;
    #[inline]
    fn add(self, o: LatticePoint) -> LatticePoint {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        LatticePoint([a + e, b + f, c + g, d + h])
    }
}

impl Sub for LatticePoint {
    type Output = LatticePoint;
    #[inline]
    fn sub(self, o: LatticePoint) -> LatticePoint {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        LatticePoint([a - e, b - f, c - g, d - h])
    }
}

impl Neg for LatticePoint {
    type Output = LatticePoint;
    #[inline]
    fn neg(self) -> LatticePoint {
        let [a, b, c, d] = self.0;
        LatticePoint([-a, -b, -c, -d])
    }
}

/// Whether two lattice points are exactly one unit apart.
#[inline]
pub fn is_unit_distance(p: LatticePoint, q: LatticePoint) -> bool {
    (p - q).is_unit()
}

/// Every unit vector, lexicographically ordered.
pub fn enumerate_units() -> &'static [LatticePoint; UNIT_COUNT] {
    &UNITS
}

/// The generators and their negatives, `{±1, ±ω₁, ±ω₃, ±ω₁ω₃}`.
pub const GENERATOR_OFFSETS: [LatticePoint; 8] = [
    LatticePoint::new(1, 0, 0, 0),
    LatticePoint::new(-1, 0, 0, 0),
    LatticePoint::new(0, 1, 0, 0),
    LatticePoint::new(0, -1, 0, 0),
    LatticePoint::new(0, 0, 1, 0),
    LatticePoint::new(0, 0, -1, 0),
    LatticePoint::new(0, 0, 0, 1),
    LatticePoint::new(0, 0, 0, -1),
];

// Any unit satisfies |coef| <= 4: the quadratic form's smallest eigenvalue is
// 1/12 with an orthonormal eigenbasis, so the coefficient vector has norm <= √12.
const UNIT_SEARCH_BOUND: i32 = 4;

static UNITS: [LatticePoint; UNIT_COUNT] = brute_force_units();

const fn brute_force_units() -> [LatticePoint; UNIT_COUNT] {
    let mut out = [LatticePoint::ORIGIN; UNIT_COUNT];
    let mut found = 0;
    let mut a = -UNIT_SEARCH_BOUND;
    while a <= UNIT_SEARCH_BOUND {
        let mut b = -UNIT_SEARCH_BOUND;
        while b <= UNIT_SEARCH_BOUND {
            let mut c = -UNIT_SEARCH_BOUND;
            while c <= UNIT_SEARCH_BOUND {
                let mut d = -UNIT_SEARCH_BOUND;
                while d <= UNIT_SEARCH_BOUND {
                    let p = LatticePoint::new(a, b, c, d);
                    if p.is_unit() {
                        // A 19th hit fails const evaluation.
                        out[found] = p;
                        found += 1;
                    }
                    d += 1;
                }
                c += 1;
            }
            b += 1;
        }
        a += 1;
    }
    assert!(found == UNIT_COUNT);
    out
}
