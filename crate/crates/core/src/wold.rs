//! Orbit classification of basis-map isometries: fixed points and finite
//! cycles form the unitary part, wandering generators and their forward
//! orbits form the shift part.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Site;
use crate::operator::BasisMap;
use crate::table::Table;
use crate::window::WindowSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitClass {
    FixedPoint,
    /// The cycle is named by its smallest member in `(j, x)` order.
    CycleMember {
        cycle: Site,
        length: usize,
    },
    WanderingGenerator,
    ShiftRayMember {
        generator: Site,
        depth: usize,
    },
    BoundaryIndeterminate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cycle {
    pub length: usize,
    /// Orbit order, starting from the smallest member.
    pub members: Vec<Site>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ray {
    pub generator: Site,
    /// Window sites of the ray in depth order; the generator may lie in the
    /// guard band and then is not listed.
    pub members: Vec<Site>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WoldReport {
    pub operator: String,
    pub window: WindowSpec,
    /// Wandering generators inside the window.
    pub alpha: usize,
    pub fixed_points: Vec<Site>,
    pub cycles: Vec<Cycle>,
    pub rays: Vec<Ray>,
    pub indeterminate: Vec<Site>,
    #[serde(skip)]
    pub classification: BTreeMap<Site, OrbitClass>,
}

impl WoldReport {
    pub fn class_of(&self, s: Site) -> Option<OrbitClass> {
        self.classification.get(&s).copied()
    }

    /// Cycles of length at least two.
    pub fn nontrivial_cycles(&self) -> impl Iterator<Item = &Cycle> {
        self.cycles.iter().filter(|c| c.length > 1)
    }

    pub fn generators(&self) -> Vec<Site> {
        self.classification
            .iter()
            .filter(|(_, c)| matches!(c, OrbitClass::WanderingGenerator))
            .map(|(s, _)| *s)
            .collect()
    }
}

fn check_isometry(table: &Table) -> Result<()> {
    if let Some(e) = table.entries().find(|e| e.to.is_none()) {
        return Err(Error::NotIsometry {
            op: table.name().to_string(),
            reason: format!("{} is annihilated", e.from),
        });
    }
    if let Some(&(a, b, image)) = table.collisions().first() {
        return Err(Error::NotIsometry {
            op: table.name().to_string(),
            reason: format!("{a} and {b} share the image {image}"),
        });
    }
    Ok(())
}

/// Members of the cycle through `s`, in orbit order from `s`, if the orbit
/// returns without leaving the domain.
fn cycle_through(table: &Table, s: Site) -> Result<Option<Vec<Site>>> {
    let limit = table.spec().domain().len();
    let mut members = vec![s];
    let mut cur = s;
    for _ in 0..limit {
        cur = match table.get(cur) {
            Ok(Some(t)) => t,
            Ok(None) | Err(Error::OutOfDomain { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        if cur == s {
            return Ok(Some(members));
        }
        members.push(cur);
    }
    Ok(None)
}

fn classify(table: &Table, s: Site) -> Result<OrbitClass> {
    if let Some(members) = cycle_through(table, s)? {
        if members.len() == 1 {
            return Ok(OrbitClass::FixedPoint);
        }
        let cycle = *members.iter().min().expect("cycle has a member");
        return Ok(OrbitClass::CycleMember {
            cycle,
            length: members.len(),
        });
    }
    let mut cur = s;
    let mut depth = 0;
    loop {
        match table.preimage(cur) {
            Ok(Some(p)) => {
                cur = p;
                depth += 1;
            }
            Ok(None) if depth == 0 => return Ok(OrbitClass::WanderingGenerator),
            Ok(None) => return Ok(OrbitClass::ShiftRayMember { generator: cur, depth }),
            Err(_) => return Ok(OrbitClass::BoundaryIndeterminate),
        }
    }
}

/// Classifies every window site of an isometric table.
pub fn wold_decompose(table: &Table) -> Result<WoldReport> {
    check_isometry(table)?;
    let window = table.spec().window();
    let classes = window
        .sites()
        .into_par_iter()
        .map(|s| classify(table, s).map(|c| (s, c)))
        .collect::<Result<Vec<_>>>()?;
    let classification: BTreeMap<Site, OrbitClass> = classes.into_iter().collect();

    let mut fixed_points = Vec::new();
    let mut cycle_ids = Vec::new();
    let mut rays: BTreeMap<Site, Vec<(usize, Site)>> = BTreeMap::new();
    let mut indeterminate = Vec::new();
    let mut alpha = 0;
    for (&s, class) in &classification {
        match *class {
            OrbitClass::FixedPoint => fixed_points.push(s),
            OrbitClass::CycleMember { cycle, .. } => {
                if cycle == s {
                    cycle_ids.push(s);
                }
            }
            OrbitClass::WanderingGenerator => {
                alpha += 1;
                rays.entry(s).or_default().push((0, s));
            }
            OrbitClass::ShiftRayMember { generator, depth } => {
                rays.entry(generator).or_default().push((depth, s));
            }
            OrbitClass::BoundaryIndeterminate => indeterminate.push(s),
        }
    }
    // a cycle whose smallest member lies outside the window
    for class in classification.values() {
        if let OrbitClass::CycleMember { cycle, .. } = *class {
            if !window.contains(cycle) && !cycle_ids.contains(&cycle) {
                cycle_ids.push(cycle);
            }
        }
    }
    cycle_ids.sort();
    let cycles = cycle_ids
        .into_iter()
        .map(|id| {
            let members = cycle_through(table, id)?.expect("cycle id lies on a cycle");
            Ok(Cycle {
                length: members.len(),
                members,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rays = rays
        .into_iter()
        .map(|(generator, mut members)| {
            members.sort();
            Ray {
                generator,
                members: members.into_iter().map(|(_, s)| s).collect(),
            }
        })
        .collect();

    Ok(WoldReport {
        operator: table.name().to_string(),
        window: table.spec(),
        alpha,
        fixed_points,
        cycles,
        rays,
        indeterminate,
        classification,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundStates {
    pub fixed_points: Vec<Site>,
    pub cycles: Vec<Cycle>,
}

impl BoundStates {
    pub fn is_empty(&self) -> bool {
        self.fixed_points.is_empty() && self.cycles.is_empty()
    }
}

/// Fixed points and finite cycles of `u` through window sites whose orbits
/// stay in the domain.
pub fn bound_states<M: BasisMap + ?Sized>(u: &M, spec: WindowSpec) -> Result<BoundStates> {
    let table = Table::tabulate(u, spec)?;
    let mut fixed_points = Vec::new();
    let mut cycles = Vec::new();
    for s in spec.window().sites() {
        if let Some(members) = cycle_through(&table, s)? {
            if members.len() == 1 {
                fixed_points.push(s);
            } else if members.iter().min() == Some(&s) {
                cycles.push(Cycle {
                    length: members.len(),
                    members,
                });
            }
        }
    }
    Ok(BoundStates { fixed_points, cycles })
}
