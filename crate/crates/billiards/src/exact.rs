//! Exact arithmetic in the quadratic field ℚ(√3), plus exact 2D/3D vectors.
//!
//! Every 2D vertex and lattice vector in the catalog lives in ℚ(√3)²: the
//! equilateral-family geometry needs √3, everything else is rational. Keeping
//! coordinates in this field lets the bilinear identities
//! `4·(labelᵀ Q label) == |Σ labelᵢ basisᵢ|²` be checked with zero tolerance.
//! 3D catalog coordinates are plain integers at unit scale.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exact rational scalar.
pub type Rat = num_rational::Ratio<i64>;

/// Element `a + b·√3` of ℚ(√3).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Sqrt3Ext {
    /// Rational part.
    pub a: Rat,
    /// Coefficient of √3.
    pub b: Rat,
}

impl Sqrt3Ext {
    pub const fn new(a: Rat, b: Rat) -> Self {
        Self { a, b }
    }

    /// Embed an integer.
    pub fn int(n: i64) -> Self {
        Self::new(Rat::new_raw(n, 1), Rat::new_raw(0, 1))
    }

    /// Embed a rational p/q.
    pub fn rat(p: i64, q: i64) -> Self {
        Self::new(Rat::new(p, q), Rat::new_raw(0, 1))
    }

    /// `(p/q)·√3`.
    pub fn sqrt3(p: i64, q: i64) -> Self {
        Self::new(Rat::new_raw(0, 1), Rat::new(p, q))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn is_zero(&self) -> bool {
        self.a == Rat::new_raw(0, 1) && self.b == Rat::new_raw(0, 1)
    }

    /// True when the √3 coefficient vanishes.
    pub fn is_rational(&self) -> bool {
        self.b == Rat::new_raw(0, 1)
    }

    /// Exact sign: -1, 0 or +1.
    ///
    /// For mixed signs of `a` and `b` the comparison `a² <=> 3b²` decides,
    /// which is exact in rational arithmetic.
    pub fn signum(&self) -> i32 {
        let zero = Rat::new_raw(0, 1);
        let (sa, sb) = (self.a.cmp(&zero), self.b.cmp(&zero));
        match (sa, sb) {
            (Ordering::Equal, Ordering::Equal) => 0,
            (Ordering::Greater | Ordering::Equal, Ordering::Greater | Ordering::Equal) => 1,
            (Ordering::Less | Ordering::Equal, Ordering::Less | Ordering::Equal) => -1,
            // a > 0, b < 0: positive iff a² > 3b²; a < 0, b > 0: positive iff 3b² > a².
            (Ordering::Greater, Ordering::Less) => {
                if self.a * self.a > self.b * self.b * Rat::new_raw(3, 1) {
                    1
                } else {
                    -1
                }
            }
            (Ordering::Less, Ordering::Greater) => {
                if self.b * self.b * Rat::new_raw(3, 1) > self.a * self.a {
                    1
                } else {
                    -1
                }
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        rat_f64(self.a) + rat_f64(self.b) * 3.0_f64.sqrt()
    }
}

pub fn rat_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl Add for Sqrt3Ext {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for Sqrt3Ext {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a - o.a, self.b - o.b)
    }
}

impl Mul for Sqrt3Ext {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        // (a + b√3)(c + d√3) = ac + 3bd + (ad + bc)√3
        Self::new(
            self.a * o.a + Rat::new_raw(3, 1) * self.b * o.b,
            self.a * o.b + self.b * o.a,
        )
    }
}

impl Neg for Sqrt3Ext {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b)
    }
}

impl Mul<i64> for Sqrt3Ext {
    type Output = Self;
    fn mul(self, n: i64) -> Self {
        let k = Rat::new_raw(n, 1);
        Self::new(self.a * k, self.b * k)
    }
}

impl PartialOrd for Sqrt3Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Sqrt3Ext {
    fn cmp(&self, other: &Self) -> Ordering {
        match (*self - *other).signum() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }
}

impl fmt::Debug for Sqrt3Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Sqrt3Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        if self.a != Rat::new_raw(0, 1) {
            write!(f, "{}", self.a)?;
            first = false;
        }
        if self.b != Rat::new_raw(0, 1) {
            if !first && self.b > Rat::new_raw(0, 1) {
                write!(f, "+")?;
            }
            write!(f, "{}*sqrt(3)", self.b)?;
        }
        Ok(())
    }
}

/// Exact 2D vector over ℚ(√3).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Vec2E {
    pub x: Sqrt3Ext,
    pub y: Sqrt3Ext,
}

impl Vec2E {
    pub const fn new(x: Sqrt3Ext, y: Sqrt3Ext) -> Self {
        Self { x, y }
    }

    /// Vector with integer coordinates.
    pub fn int(x: i64, y: i64) -> Self {
        Self::new(Sqrt3Ext::int(x), Sqrt3Ext::int(y))
    }

    pub fn zero() -> Self {
        Self::int(0, 0)
    }

    pub fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }

    pub fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }

    pub fn scale(self, n: i64) -> Self {
        Self::new(self.x * n, self.y * n)
    }

    pub fn dot(self, o: Self) -> Sqrt3Ext {
        self.x * o.x + self.y * o.y
    }

    /// Exact squared Euclidean norm.
    pub fn norm_sq(self) -> Sqrt3Ext {
        self.dot(self)
    }

    pub fn to_f64(self) -> [f64; 2] {
        [self.x.to_f64(), self.y.to_f64()]
    }
}

/// Integer 3D vector helpers (3D catalog coordinates are integers).
pub fn dot3(a: [i64; 3], b: [i64; 3]) -> i64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm3_sq(a: [i64; 3]) -> i64 {
    dot3(a, a)
}

pub fn cross3(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn sub3(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
