//! Exact dyadic rationals, lattice points and affine maps.
//!
//! All vertex placements are dyadic (`n / 2^k`) in the lattice basis
//! `e1 = (1, 0)`, `e2 = (1/2, √3/2)`, so the Sierpinski gasket with corners
//! `(0,0), (1,0), (0,1)` and its contractions `x ↦ (x + p)/2` stay exact, and
//! gluing is decided by coordinate equality. One-dimensional cells use the
//! first coordinate only.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

/// `num / 2^exp`, kept normalized (odd numerator, or zero with `exp == 0`).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: i64,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    pub fn new(num: i64, exp: u32) -> Self {
        let mut d = Dyadic { num, exp };
        d.normalize();
        d
    }

    pub const fn from_int(n: i64) -> Self {
        Dyadic { num: n, exp: 0 }
    }

    pub fn numerator(self) -> i64 {
        self.num
    }

    pub fn exponent(self) -> u32 {
        self.exp
    }

    pub fn half(self) -> Self {
        Dyadic::new(self.num, self.exp + 1)
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / libm::exp2(self.exp as f64)
    }

    /// Exact quotient by `2^k`.
    pub fn div_pow2(self, k: u32) -> Self {
        Dyadic::new(self.num, self.exp + k)
    }

    fn normalize(&mut self) {
        if self.num == 0 {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().min(self.exp);
        self.num >>= tz;
        self.exp -= tz;
    }

    fn aligned(self, other: Dyadic) -> (i128, i128, u32) {
        let e = self.exp.max(other.exp);
        let a = (self.num as i128) << (e - self.exp);
        let b = (other.num as i128) << (e - other.exp);
        (a, b, e)
    }

    fn from_wide(num: i128, exp: u32) -> Self {
        let mut n = num;
        let mut e = exp;
        while e > 0 && n != 0 && n % 2 == 0 {
            n /= 2;
            e -= 1;
        }
        if n == 0 {
            return Dyadic::ZERO;
        }
        let num = i64::try_from(n).expect("dyadic numerator overflow");
        Dyadic { num, exp: e }
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::from_wide(a + b, e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        self + (-rhs)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -self.num, exp: self.exp }
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        Dyadic::from_wide(self.num as i128 * rhs.num as i128, self.exp + rhs.exp)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(*other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1u128 << self.exp)
        }
    }
}

/// A point in lattice coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Point {
    pub a: Dyadic,
    pub b: Dyadic,
}

impl Point {
    pub const ORIGIN: Point = Point { a: Dyadic::ZERO, b: Dyadic::ZERO };

    pub const fn new(a: Dyadic, b: Dyadic) -> Self {
        Point { a, b }
    }

    pub const fn int(a: i64, b: i64) -> Self {
        Point { a: Dyadic::from_int(a), b: Dyadic::from_int(b) }
    }

    /// Cartesian coordinates `a·e1 + b·e2`.
    pub fn cartesian(self) -> (f64, f64) {
        let a = self.a.to_f64();
        let b = self.b.to_f64();
        (a + 0.5 * b, b * libm::sqrt(3.0) / 2.0)
    }

    /// Exact squared Euclidean norm `a² + ab + b²`.
    pub fn norm_sq(self) -> Dyadic {
        self.a * self.a + self.a * self.b + self.b * self.b
    }

    pub fn norm(self) -> f64 {
        libm::sqrt(self.norm_sq().to_f64())
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point { a: self.a + rhs.a, b: self.b + rhs.b }
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point { a: self.a - rhs.a, b: self.b - rhs.b }
    }
}

/// `x ↦ L x + t` with a 2×2 dyadic matrix `L` (row-major) acting on lattice
/// coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct AffineMap {
    pub linear: [[Dyadic; 2]; 2],
    pub shift: Point,
}

impl AffineMap {
    pub const IDENTITY: AffineMap = AffineMap {
        linear: [[Dyadic::ONE, Dyadic::ZERO], [Dyadic::ZERO, Dyadic::ONE]],
        shift: Point::ORIGIN,
    };

    pub fn translation(shift: Point) -> Self {
        AffineMap { shift, ..AffineMap::IDENTITY }
    }

    /// Point reflection `x ↦ -x + shift` (rotation by 180°).
    pub fn point_reflection(shift: Point) -> Self {
        let m1 = Dyadic::from_int(-1);
        AffineMap { linear: [[m1, Dyadic::ZERO], [Dyadic::ZERO, m1]], shift }
    }

    /// `x ↦ s·x + (1 - s)·fixed`: homothety about `fixed`.
    pub fn homothety(scale: Dyadic, fixed: Point) -> Self {
        let one_minus = Dyadic::ONE - scale;
        AffineMap {
            linear: [[scale, Dyadic::ZERO], [Dyadic::ZERO, scale]],
            shift: Point::new(one_minus * fixed.a, one_minus * fixed.b),
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        let l = &self.linear;
        Point {
            a: l[0][0] * p.a + l[0][1] * p.b + self.shift.a,
            b: l[1][0] * p.a + l[1][1] * p.b + self.shift.b,
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        let a = &self.linear;
        let b = &inner.linear;
        let mut linear = [[Dyadic::ZERO; 2]; 2];
        for (i, row) in linear.iter_mut().enumerate() {
            for (j, out) in row.iter_mut().enumerate() {
                *out = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        let shift = self.apply(inner.shift);
        AffineMap { linear, shift }
    }

    pub fn determinant(&self) -> Dyadic {
        let l = &self.linear;
        l[0][0] * l[1][1] - l[0][1] * l[1][0]
    }

    /// Exact inverse; exists in dyadic arithmetic iff the determinant is
    /// `±2^k`.
    pub fn inverse(&self) -> Option<AffineMap> {
        let det = self.determinant();
        let n = det.numerator();
        if n == 0 || !n.unsigned_abs().is_power_of_two() || det.exponent() > 62 {
            return None;
        }
        // det = ±2^j / 2^exp, so 1/det = ±2^exp / 2^j
        let j = n.unsigned_abs().trailing_zeros();
        let inv_det = Dyadic::new(n.signum() << det.exponent(), j);
        let l = &self.linear;
        let linear = [
            [l[1][1] * inv_det, -l[0][1] * inv_det],
            [-l[1][0] * inv_det, l[0][0] * inv_det],
        ];
        let partial = AffineMap { linear, shift: Point::ORIGIN };
        let t = partial.apply(self.shift);
        Some(AffineMap { linear, shift: Point::new(-t.a, -t.b) })
    }

    /// True when the map preserves Euclidean distances in the lattice metric.
    pub fn is_isometry(&self) -> bool {
        let e1 = Point::int(1, 0);
        let e2 = Point::int(0, 1);
        let lin = AffineMap { linear: self.linear, shift: Point::ORIGIN };
        let (u, v) = (lin.apply(e1), lin.apply(e2));
        let one = Dyadic::ONE;
        // Gram matrix of the lattice basis: |e1|² = |e2|² = 1, e1·e2 = 1/2
        let dot = |p: Point, q: Point| {
            p.a * q.a + (p.a * q.b + p.b * q.a).half() + p.b * q.b
        };
        dot(u, u) == one && dot(v, v) == one && dot(u, v) == one.half()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalization_is_canonical() {
        assert_eq!(Dyadic::new(4, 3), Dyadic::new(1, 1));
        assert_eq!(Dyadic::new(0, 5), Dyadic::ZERO);
        assert_eq!(Dyadic::new(6, 0).numerator(), 6);
        assert_eq!(format!("{}", Dyadic::new(3, 2)), "3/4");
    }

    #[test]
    fn homothety_fixes_its_centre() {
        let p = Point::int(0, 1);
        let psi = AffineMap::homothety(Dyadic::ONE.half(), p);
        assert_eq!(psi.apply(p), p);
        assert_eq!(psi.apply(Point::ORIGIN), Point::new(Dyadic::ZERO, Dyadic::ONE.half()));
        let inv = psi.inverse().unwrap();
        assert_eq!(inv.compose(&psi), AffineMap::IDENTITY);
    }

    #[test]
    fn rotations_are_isometries() {
        assert!(AffineMap::point_reflection(Point::int(3, -2)).is_isometry());
        assert!(AffineMap::translation(Point::int(3, -2)).is_isometry());
        assert!(!AffineMap::homothety(Dyadic::ONE.half(), Point::ORIGIN).is_isometry());
        let rot60 = AffineMap {
            linear: [[Dyadic::ZERO, Dyadic::from_int(-1)], [Dyadic::ONE, Dyadic::ONE]],
            shift: Point::ORIGIN,
        };
        assert!(rot60.is_isometry());
    }

    #[test]
    fn lattice_norm_matches_cartesian() {
        let p = Point::new(Dyadic::new(3, 1), Dyadic::new(-5, 2));
        let (x, y) = p.cartesian();
        assert!((libm::sqrt(x * x + y * y) - p.norm()).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn arithmetic_matches_floats(a in -1000i64..1000, ea in 0u32..12, b in -1000i64..1000, eb in 0u32..12) {
            let x = Dyadic::new(a, ea);
            let y = Dyadic::new(b, eb);
            prop_assert!(((x + y).to_f64() - (x.to_f64() + y.to_f64())).abs() < 1e-12);
            prop_assert!(((x * y).to_f64() - (x.to_f64() * y.to_f64())).abs() < 1e-9);
            prop_assert_eq!(x.cmp(&y), x.to_f64().partial_cmp(&y.to_f64()).unwrap());
            prop_assert_eq!(x - x, Dyadic::ZERO);
        }
    }
}
