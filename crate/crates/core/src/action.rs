//! What a piece of an operator does to the sites it matches.

use std::fmt;

use crate::lattice::Site;
use crate::region::{Lin, J, X};

/// `(x, j) -> (x', j')` with both target coordinates affine in `(x, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AffineMap {
    pub x: Lin,
    pub j: Lin,
}

impl AffineMap {
    pub const IDENTITY: AffineMap = AffineMap { x: X, j: J };

    pub fn new(x: Lin, j: Lin) -> Self {
        AffineMap { x, j }
    }

    pub fn shift(dx: i64, dj: i64) -> Self {
        AffineMap::new(X + dx, J + dj)
    }

    pub fn constant(x: i64, j: i64) -> Self {
        AffineMap::new(Lin::constant(x), Lin::constant(j))
    }

    /// Raw image coordinates, which may fall below the boundary row.
    #[inline]
    pub fn eval(&self, s: Site) -> (i64, i64) {
        (self.x.at(s), self.j.at(s))
    }

    /// `self ∘ inner`
    pub fn after(&self, inner: &AffineMap) -> AffineMap {
        AffineMap::new(self.x.pullback(inner), self.j.pullback(inner))
    }

    pub fn det(&self) -> i64 {
        self.x.cx * self.j.cj - self.x.cj * self.j.cx
    }

    /// Integral inverse, when the linear part is unimodular.
    pub fn inverse(&self) -> Option<AffineMap> {
        let d = self.det();
        if d.abs() != 1 {
            return None;
        }
        let (a, b, c) = (self.x.cx, self.x.cj, self.x.c);
        let (p, q, r) = (self.j.cx, self.j.cj, self.j.c);
        // x = (q(x'-c) - b(j'-r)) / d,  j = (-p(x'-c) + a(j'-r)) / d
        let x = Lin {
            cx: q * d,
            cj: -b * d,
            c: (-q * c + b * r) * d,
        };
        let j = Lin {
            cx: -p * d,
            cj: a * d,
            c: (p * c - a * r) * d,
        };
        Some(AffineMap::new(x, j))
    }

    /// `(dx, dj)` if this is a pure translation.
    pub fn as_shift(&self) -> Option<(i64, i64)> {
        (self.x.cx == 1 && self.x.cj == 0 && self.j.cx == 0 && self.j.cj == 1).then_some((self.x.c, self.j.c))
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.j)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    Map(AffineMap),
    /// Annihilates the basis vector.
    Zero,
}

impl Action {
    pub fn identity() -> Self {
        Action::Map(AffineMap::IDENTITY)
    }

    pub fn shift(dx: i64, dj: i64) -> Self {
        Action::Map(AffineMap::shift(dx, dj))
    }

    pub fn to(x: impl Into<Lin>, j: impl Into<Lin>) -> Self {
        Action::Map(AffineMap::new(x.into(), j.into()))
    }

    /// Raw image; `None` for annihilation.
    #[inline]
    pub fn eval(&self, s: Site) -> Option<(i64, i64)> {
        match self {
            Action::Map(m) => Some(m.eval(s)),
            Action::Zero => None,
        }
    }

    /// `self ∘ inner`
    pub fn after(&self, inner: &Action) -> Action {
        match (self, inner) {
            (Action::Map(a), Action::Map(b)) => Action::Map(a.after(b)),
            _ => Action::Zero,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Map(m) => write!(f, "{m}"),
            Action::Zero => f.write_str("0"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display() {
        assert_eq!(Action::shift(1, 0).to_string(), "(x+1, j)");
        assert_eq!(Action::to(X, -X).to_string(), "(x, -x)");
        assert_eq!(Action::to(X - 1, -X + 1).to_string(), "(x-1, -x+1)");
        assert_eq!(Action::to(1, 0).to_string(), "(1, 0)");
        assert_eq!(Action::Zero.to_string(), "0");
    }

    #[test]
    fn inverse_of_unimodular_maps() {
        let maps = [
            AffineMap::shift(1, -1),
            AffineMap::new(J + 2, X - 3),
            AffineMap::new(X + J, J + 5),
            AffineMap::new(-X, J),
        ];
        for m in maps {
            let inv = m.inverse().unwrap();
            for (x, j) in [(0, 0), (3, 7), (-4, 2)] {
                let s = Site::at(x, j);
                let (a, b) = m.eval(s);
                let (c, d) = inv.eval(Site::at(a, b.max(0)));
                if b >= 0 {
                    assert_eq!((c, d), (x, j), "{m}");
                }
            }
            assert_eq!(inv.after(&m), AffineMap::IDENTITY);
        }
        assert!(AffineMap::new(X, -X).inverse().is_none());
    }
}
