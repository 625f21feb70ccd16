//! Sites of the half-space `Z x N` and finite-support vectors over them.
//!
//! Coefficients are exact rationals. Every model in this crate only ever
//! produces 0 and ±1, so equality is the only comparison the rest of the
//! crate needs.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Scalar = Rational64;

/// A lattice point `(x, j)` with `j >= 0`, standing for the basis vector `δ_{x,j}`.
///
/// Sites order by row first, then column, which is the output order of every
/// table and report.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Site {
    x: i64,
    j: i64,
}

impl Site {
    pub fn new(x: i64, j: i64) -> Result<Self> {
        if j < 0 {
            return Err(Error::NegativeRow { x, j });
        }
        Ok(Site { x, j })
    }

    /// Panics on a negative row; meant for literals in tests and tables.
    pub fn at(x: i64, j: i64) -> Self {
        Site::new(x, j).expect("site literal with negative row")
    }

    pub const ORIGIN: Site = Site { x: 0, j: 0 };

    #[inline]
    pub fn x(self) -> i64 {
        self.x
    }

    #[inline]
    pub fn j(self) -> i64 {
        self.j
    }

    pub fn offset(self, dx: i64, dj: i64) -> Result<Self> {
        Site::new(self.x + dx, self.j + dj)
    }
}

impl Ord for Site {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.j, self.x).cmp(&(other.j, other.x))
    }
}

impl PartialOrd for Site {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.j)
    }
}

impl fmt::Debug for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// Sites travel as `[x, j]` pairs in every JSON document.
impl Serialize for Site {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.x, self.j].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Site {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [x, j] = <[i64; 2]>::deserialize(d)?;
        Site::new(x, j).map_err(serde::de::Error::custom)
    }
}

/// A finite-support element of `ℓ²(Z x N)`. Zero coefficients are never stored.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct StateVector {
    support: BTreeMap<Site, Scalar>,
}

impl StateVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(site: Site) -> Self {
        let mut v = Self::zero();
        v.support.insert(site, Scalar::one());
        v
    }

    pub fn from_terms<I: IntoIterator<Item = (Site, Scalar)>>(terms: I) -> Self {
        let mut v = Self::zero();
        for (s, c) in terms {
            v.add_term(s, c);
        }
        v
    }

    /// Adds `c·δ_s`, dropping the entry if it cancels.
    pub fn add_term(&mut self, site: Site, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.support.entry(site).or_insert_with(Scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.support.remove(&site);
        }
    }

    pub fn get(&self, site: Site) -> Scalar {
        self.support.get(&site).copied().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Site, Scalar)> + '_ {
        self.support.iter().map(|(s, c)| (*s, *c))
    }

    pub fn support(&self) -> impl Iterator<Item = Site> + '_ {
        self.support.keys().copied()
    }

    /// Returns the site if this vector is exactly `δ_s`.
    pub fn as_basis(&self) -> Option<Site> {
        match self.support.iter().next() {
            Some((s, c)) if self.support.len() == 1 && c.is_one() => Some(*s),
            _ => None,
        }
    }

    pub fn scaled(&self, c: Scalar) -> Self {
        Self::from_terms(self.iter().map(|(s, v)| (s, v * c)))
    }
}

/// `⟨f, g⟩ = Σ conj(f(s)) g(s)`; conjugation is trivial on rationals.
pub fn inner_product(f: &StateVector, g: &StateVector) -> Scalar {
    let (small, large) = if f.len() <= g.len() { (f, g) } else { (g, f) };
    small
        .support
        .iter()
        .filter_map(|(s, a)| large.support.get(s).map(|b| *a * *b))
        .fold(Scalar::zero(), |acc, t| acc + t)
}

pub fn norm_squared(f: &StateVector) -> Scalar {
    inner_product(f, f)
}

impl Add for &StateVector {
    type Output = StateVector;
    fn add(self, rhs: &StateVector) -> StateVector {
        let mut out = self.clone();
        for (s, c) in rhs.iter() {
            out.add_term(s, c);
        }
        out
    }
}

impl Sub for &StateVector {
    type Output = StateVector;
    fn sub(self, rhs: &StateVector) -> StateVector {
        let mut out = self.clone();
        for (s, c) in rhs.iter() {
            out.add_term(s, -c);
        }
        out
    }
}

impl Neg for &StateVector {
    type Output = StateVector;
    fn neg(self) -> StateVector {
        self.scaled(-Scalar::one())
    }
}

impl Mul<&StateVector> for Scalar {
    type Output = StateVector;
    fn mul(self, rhs: &StateVector) -> StateVector {
        rhs.scaled(self)
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (s, c) in self.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.is_one() {
                write!(f, "δ{s}")?;
            } else {
                write!(f, "({c})δ{s}")?;
            }
        }
        Ok(())
    }
}
