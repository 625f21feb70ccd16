//! Wave operators as stabilized limits of `U^-n U0^n`, and scattering
//! operators built from them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::lattice::Site;
use crate::operator::{iterate, BasisMap};
use crate::table::Table;
use crate::window::{LatticeBox, WindowSpec, MAX_STEP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Plus,
    Minus,
}

impl Direction {
    pub fn sign(self) -> char {
        match self {
            Direction::Plus => '+',
            Direction::Minus => '-',
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.sign())
    }
}

/// A pair of dynamics, each with its inverse.
#[derive(Clone, Copy)]
pub struct Pair<'a> {
    pub u: &'a dyn BasisMap,
    pub u_inv: &'a dyn BasisMap,
    pub u0: &'a dyn BasisMap,
    pub u0_inv: &'a dyn BasisMap,
}

impl<'a> Pair<'a> {
    /// Looks up `U`, `U0` and their inverses by model name, e.g. `("U2", "U1")`.
    pub fn from_catalog(catalog: &'a Catalog, u: &str, u0: &str) -> Result<Self> {
        let (u, u_inv) = catalog.unitary(u)?;
        let (u0, u0_inv) = catalog.unitary(u0)?;
        Ok(Pair { u, u_inv, u0, u0_inv })
    }

    pub fn wave_name(&self, dir: Direction) -> String {
        format!("W{}({},{})", dir.sign(), self.u.label(), self.u0.label())
    }

    pub fn scattering_name(&self) -> String {
        format!("S({},{})", self.u.label(), self.u0.label())
    }
}

/// Sites where one step of the comparison dynamics is not the identity:
/// `U^-1 U0` for `Plus`, `U U0^-1` for `Minus`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionSupport {
    pub direction: Direction,
    pub scan: LatticeBox,
    pub rows: i64,
    pub sites: Vec<Site>,
}

impl InteractionSupport {
    /// Scans rows `0..=R+guard+MAX_STEP` of the box of radius `R + 2·guard`.
    pub fn scan(pair: &Pair<'_>, dir: Direction, spec: &WindowSpec) -> Result<Self> {
        let scan = spec.widened(spec.guard).domain();
        let rows = spec.domain().radius + MAX_STEP;
        let mut sites = Vec::new();
        for s in scan.sites().into_iter().filter(|s| s.j() <= rows) {
            let (first, second) = match dir {
                Direction::Plus => (pair.u0, pair.u_inv),
                Direction::Minus => (pair.u0_inv, pair.u),
            };
            let back = match first.image(s)? {
                Some(t) => second.image(t)?,
                None => None,
            };
            if back != Some(s) {
                sites.push(s);
            }
        }
        let edge = match dir {
            Direction::Plus => scan.radius,
            Direction::Minus => -scan.radius,
        };
        if let Some(&s) = sites.iter().find(|s| s.x() == edge) {
            return Err(Error::SupportNotContained {
                u: pair.u.label(),
                u0: pair.u0.label(),
                site: s,
            });
        }
        Ok(InteractionSupport {
            direction: dir,
            scan,
            rows,
            sites,
        })
    }

    /// Whether a free orbit at `frontier` has moved past every support site.
    pub fn escaped(&self, frontier: Site) -> bool {
        match self.direction {
            Direction::Plus => self.sites.iter().all(|s| frontier.x() > s.x()),
            Direction::Minus => self.sites.iter().all(|s| frontier.x() < s.x()),
        }
    }

    /// Largest `x` for `Plus`, smallest for `Minus`.
    pub fn extent(&self) -> Option<i64> {
        let xs = self.sites.iter().map(|s| s.x());
        match self.direction {
            Direction::Plus => xs.max(),
            Direction::Minus => xs.min(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaveSettings {
    /// Consecutive unchanged steps required after the frontier has escaped.
    pub margin: usize,
    /// Iteration cap; `None` means `4·(R + guard)`.
    pub cap: Option<usize>,
}

impl Default for WaveSettings {
    fn default() -> Self {
        WaveSettings { margin: 2, cap: None }
    }
}

impl WaveSettings {
    pub fn resolved_cap(&self, spec: &WindowSpec) -> usize {
        self.cap.unwrap_or(4 * (spec.radius + spec.guard) as usize)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaveLimit {
    pub image: Option<Site>,
    pub steps: usize,
}

pub struct WaveEngine<'a> {
    pair: Pair<'a>,
    dir: Direction,
    support: InteractionSupport,
    margin: usize,
    cap: usize,
}

impl<'a> WaveEngine<'a> {
    pub fn new(pair: Pair<'a>, dir: Direction, spec: &WindowSpec, settings: WaveSettings) -> Result<Self> {
        let support = InteractionSupport::scan(&pair, dir, spec)?;
        Ok(WaveEngine {
            pair,
            dir,
            support,
            margin: settings.margin,
            cap: settings.resolved_cap(spec),
        })
    }

    pub fn support(&self) -> &InteractionSupport {
        &self.support
    }

    /// `lim U^-n U0^n δ_s` (`Plus`) or `lim U^n U0^-n δ_s` (`Minus`), each
    /// term evaluated afresh from `δ_s`.
    pub fn limit(&self, s: Site) -> Result<WaveLimit> {
        let (free, back) = match self.dir {
            Direction::Plus => (self.pair.u0, self.pair.u_inv),
            Direction::Minus => (self.pair.u0_inv, self.pair.u),
        };
        let mut frontier = Some(s);
        let mut prev: Option<Option<Site>> = None;
        let mut prev_escaped = false;
        let mut steady = 0;
        for n in 0..=self.cap {
            let current = match frontier {
                Some(f) => iterate(back, f, n)?,
                None => None,
            };
            if let Some(p) = prev {
                if p == current {
                    if prev_escaped {
                        steady += 1;
                    }
                } else {
                    steady = 0;
                }
            }
            if steady >= self.margin {
                return Ok(WaveLimit {
                    image: current,
                    steps: n,
                });
            }
            prev_escaped = frontier.is_none_or(|f| self.support.escaped(f));
            prev = Some(current);
            frontier = match frontier {
                Some(f) => free.image(f)?,
                None => None,
            };
        }
        Err(Error::NoStabilization { site: s, cap: self.cap })
    }

    pub fn table(&self, spec: WindowSpec) -> Result<Table> {
        Table::from_fn(self.pair.wave_name(self.dir), spec, |s| self.limit(s).map(|l| l.image))
    }
}

pub fn wave_operator(
    pair: Pair<'_>,
    dir: Direction,
    s: Site,
    spec: &WindowSpec,
    settings: WaveSettings,
) -> Result<WaveLimit> {
    WaveEngine::new(pair, dir, spec, settings)?.limit(s)
}

pub fn wave_operator_table(pair: Pair<'_>, dir: Direction, spec: WindowSpec, settings: WaveSettings) -> Result<Table> {
    WaveEngine::new(pair, dir, &spec, settings)?.table(spec)
}

/// `W+* W-` over the domain of `spec`. Both wave operators are tabulated on
/// a window widened by the guard so that every needed preimage is decided.
pub fn scattering_operator(pair: Pair<'_>, spec: WindowSpec, settings: WaveSettings) -> Result<Table> {
    let wide = spec.widened(spec.guard);
    let w_plus = wave_operator_table(pair, Direction::Plus, wide, settings)?;
    let w_minus = wave_operator_table(pair, Direction::Minus, wide, settings)?;
    scattering_from_tables(&pair.scattering_name(), &w_plus, &w_minus, spec)
}

pub fn scattering_from_tables(name: &str, w_plus: &Table, w_minus: &Table, spec: WindowSpec) -> Result<Table> {
    if let Some(&(a, b, image)) = w_plus.collisions().first() {
        return Err(Error::NotInjective {
            op: w_plus.name().to_string(),
            a,
            b,
            image,
        });
    }
    Table::from_fn(name, spec, |s| match w_minus.get(s)? {
        Some(t) => w_plus.preimage(t),
        None => Ok(None),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{u0, u0_inv, u1, u1_inv};

    #[test]
    fn stopping_rule_examples() {
        let (a, b, c, d) = (u1(), u1_inv(), u0(), u0_inv());
        let pair = Pair {
            u: &a,
            u_inv: &b,
            u0: &c,
            u0_inv: &d,
        };
        let spec = WindowSpec::new(10, 4).unwrap();
        let cfg = WaveSettings::default();
        let plus = WaveEngine::new(pair, Direction::Plus, &spec, cfg).unwrap();
        assert_eq!(plus.support().extent(), Some(-1));
        assert_eq!(
            plus.limit(Site::at(-5, 3)).unwrap(),
            WaveLimit {
                image: Some(Site::at(-5, 2)),
                steps: 7
            }
        );
        assert_eq!(plus.limit(Site::at(-2, 0)).unwrap().image, Some(Site::at(-2, 2)));
        let minus = WaveEngine::new(pair, Direction::Minus, &spec, cfg).unwrap();
        assert_eq!(minus.limit(Site::at(3, 1)).unwrap().image, Some(Site::at(3, 2)));
    }

    #[test]
    fn tiny_cap_reports_no_stabilization() {
        let (a, b, c, d) = (u1(), u1_inv(), u0(), u0_inv());
        let pair = Pair {
            u: &a,
            u_inv: &b,
            u0: &c,
            u0_inv: &d,
        };
        let spec = WindowSpec::new(10, 4).unwrap();
        let cfg = WaveSettings {
            margin: 2,
            cap: Some(3),
        };
        assert_eq!(
            wave_operator(pair, Direction::Plus, Site::at(-5, 3), &spec, cfg),
            Err(Error::NoStabilization {
                site: Site::at(-5, 3),
                cap: 3
            })
        );
    }

    #[test]
    fn support_touching_the_scan_edge_is_rejected() {
        // a dynamics that never agrees with U0 far to the right
        let (c, d) = (u0(), u0_inv());
        let stay = crate::operator::RuleOperator::identity("Id");
        let pair = Pair {
            u: &stay,
            u_inv: &stay,
            u0: &c,
            u0_inv: &d,
        };
        let spec = WindowSpec::new(4, 2).unwrap();
        assert!(matches!(
            InteractionSupport::scan(&pair, Direction::Plus, &spec),
            Err(Error::SupportNotContained { .. })
        ));
    }
}
