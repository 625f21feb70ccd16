//! Finite truncations of the half-space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Site;

/// `{(x, j) : -r <= x <= r, 0 <= j <= r}`
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeBox {
    pub radius: i64,
}

impl LatticeBox {
    pub fn new(radius: i64) -> Self {
        LatticeBox { radius }
    }

    #[inline]
    pub fn contains(&self, s: Site) -> bool {
        s.x().abs() <= self.radius && s.j() <= self.radius
    }

    /// All sites, ordered by `(j, x)`.
    pub fn sites(&self) -> Vec<Site> {
        let r = self.radius;
        (0..=r).flat_map(|j| (-r..=r).map(move |x| Site::at(x, j))).collect()
    }

    pub fn len(&self) -> usize {
        let r = self.radius.max(0) as usize;
        (2 * r + 1) * (r + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.radius < 0
    }
}

/// The asserted window of radius `radius`, computed over the wider domain of
/// radius `radius + guard` so that orbit excursions near the edge stay resolvable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WindowSpec {
    pub radius: i64,
    pub guard: i64,
}

/// Largest single-step displacement of any cataloged operator.
pub const MAX_STEP: i64 = 2;

impl WindowSpec {
    pub fn new(radius: i64, guard: i64) -> Result<Self> {
        if radius < 1 {
            return Err(Error::Params(format!("window radius must be positive, got {radius}")));
        }
        if guard < MAX_STEP {
            return Err(Error::Params(format!("guard must be at least {MAX_STEP}, got {guard}")));
        }
        Ok(WindowSpec { radius, guard })
    }

    pub fn window(&self) -> LatticeBox {
        LatticeBox::new(self.radius)
    }

    pub fn domain(&self) -> LatticeBox {
        LatticeBox::new(self.radius + self.guard)
    }

    /// Same guard, radius grown by `extra`.
    pub fn widened(&self, extra: i64) -> WindowSpec {
        WindowSpec {
            radius: self.radius + extra,
            guard: self.guard,
        }
    }

    pub fn with_guard(&self, guard: i64) -> WindowSpec {
        WindowSpec {
            radius: self.radius,
            guard,
        }
    }
}
