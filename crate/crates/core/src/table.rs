//! Operators tabulated over a finite domain, with preimage lookup, ranges,
//! cokernels and named site sets.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Site;
use crate::operator::BasisMap;
use crate::window::{LatticeBox, WindowSpec};

/// One row of the table file format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub from: Site,
    pub to: Option<Site>,
}

/// A basis map stored site by site over `spec.domain()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    name: String,
    spec: WindowSpec,
    cells: Vec<Option<Site>>,
    preimages: HashMap<Site, Site>,
    collisions: Vec<(Site, Site, Site)>,
    reach_h: i64,
    reach_v: i64,
}

fn index(d: i64, s: Site) -> usize {
    (s.j() * (2 * d + 1) + s.x() + d) as usize
}

impl Table {
    fn from_cells(name: String, spec: WindowSpec, cells: Vec<Option<Site>>) -> Self {
        let domain = spec.domain();
        let mut preimages = HashMap::with_capacity(cells.len());
        let mut collisions = Vec::new();
        let (mut reach_h, mut reach_v) = (0, 0);
        for (s, t) in domain.sites().into_iter().zip(&cells) {
            let Some(t) = *t else { continue };
            reach_h = reach_h.max((t.x() - s.x()).abs());
            reach_v = reach_v.max(s.j() - t.j());
            if let Some(prev) = preimages.insert(t, s) {
                collisions.push((prev, s, t));
                preimages.insert(t, prev);
            }
        }
        Table {
            name,
            spec,
            cells,
            preimages,
            collisions,
            reach_h,
            reach_v,
        }
    }

    /// Evaluates `f` on every domain site, in parallel.
    pub fn from_fn<F>(name: impl Into<String>, spec: WindowSpec, f: F) -> Result<Self>
    where
        F: Fn(Site) -> Result<Option<Site>> + Sync,
    {
        let cells = spec
            .domain()
            .sites()
            .into_par_iter()
            .map(&f)
            .collect::<Result<Vec<_>>>()?;
        Ok(Table::from_cells(name.into(), spec, cells))
    }

    pub fn tabulate<M: BasisMap + ?Sized>(op: &M, spec: WindowSpec) -> Result<Self> {
        Table::from_fn(op.label(), spec, |s| op.image(s))
    }

    /// Builds a table from explicit entries, which must cover the domain.
    pub fn from_entries(name: impl Into<String>, spec: WindowSpec, entries: &[TableEntry]) -> Result<Self> {
        let name = name.into();
        let domain = spec.domain();
        let d = domain.radius;
        let mut cells: Vec<Option<Option<Site>>> = vec![None; domain.len()];
        for e in entries {
            if !domain.contains(e.from) {
                return Err(Error::OutOfDomain { op: name, site: e.from });
            }
            cells[index(d, e.from)] = Some(e.to);
        }
        let cells = domain
            .sites()
            .into_iter()
            .zip(cells)
            .map(|(s, c)| c.ok_or_else(|| Error::Parse(format!("table {name} has no entry for {s}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Table::from_cells(name, spec, cells))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn spec(&self) -> WindowSpec {
        self.spec
    }

    pub fn get(&self, s: Site) -> Result<Option<Site>> {
        let domain = self.spec.domain();
        if !domain.contains(s) {
            return Err(Error::OutOfDomain {
                op: self.name.clone(),
                site: s,
            });
        }
        Ok(self.cells[index(domain.radius, s)])
    }

    /// Domain entries ordered by `(j, x)`.
    pub fn entries(&self) -> impl Iterator<Item = TableEntry> + '_ {
        self.spec
            .domain()
            .sites()
            .into_iter()
            .zip(self.cells.iter().copied())
            .map(|(from, to)| TableEntry { from, to })
    }

    /// Entries whose source lies in `region`, ordered by `(j, x)`.
    pub fn entries_on(&self, region: LatticeBox) -> Vec<TableEntry> {
        self.entries().filter(|e| region.contains(e.from)).collect()
    }

    /// Pairs of domain sites with a common image, as `(first, second, image)`.
    pub fn collisions(&self) -> &[(Site, Site, Site)] {
        &self.collisions
    }

    /// Largest horizontal jump and largest downward jump over the domain.
    pub fn reach(&self) -> (i64, i64) {
        (self.reach_h, self.reach_v)
    }

    /// The domain site mapped to `t`. `Ok(None)` only when no site outside
    /// the domain can reach `t` either, judged by the measured reach.
    pub fn preimage(&self, t: Site) -> Result<Option<Site>> {
        if let Some(&s) = self.preimages.get(&t) {
            return Ok(Some(s));
        }
        let d = self.spec.domain().radius;
        if t.x().abs() + self.reach_h <= d && t.j() + self.reach_v <= d {
            Ok(None)
        } else {
            Err(Error::Indeterminate {
                op: self.name.clone(),
                site: t,
            })
        }
    }

    /// Sites of `region` where `self` and `other` differ.
    pub fn diff<M: BasisMap + ?Sized>(&self, other: &M, region: LatticeBox) -> Result<Vec<Mismatch>> {
        let mut out = Vec::new();
        for s in region.sites() {
            let actual = self.get(s)?;
            let expected = other.image(s)?;
            if actual != expected {
                out.push(Mismatch {
                    site: s,
                    expected,
                    actual,
                });
            }
        }
        Ok(out)
    }

    /// The adjoint on the window, read off the preimage index.
    pub fn adjoint_on(&self, spec: WindowSpec) -> Result<Table> {
        if let Some(&(a, b, image)) = self.collisions.first() {
            return Err(Error::NotInjective {
                op: self.name.clone(),
                a,
                b,
                image,
            });
        }
        Table::from_fn(format!("{}*", self.name), spec, |t| self.preimage(t))
    }
}

impl BasisMap for Table {
    fn label(&self) -> String {
        self.name.clone()
    }

    fn image(&self, s: Site) -> Result<Option<Site>> {
        self.get(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub site: Site,
    pub expected: Option<Site>,
    pub actual: Option<Site>,
}

/// A named set of window sites.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceOnWindow {
    pub name: String,
    pub window: LatticeBox,
    pub sites: BTreeSet<Site>,
}

impl SubspaceOnWindow {
    pub fn new(name: impl Into<String>, window: LatticeBox, sites: impl IntoIterator<Item = Site>) -> Self {
        SubspaceOnWindow {
            name: name.into(),
            window,
            sites: sites.into_iter().filter(|s| window.contains(*s)).collect(),
        }
    }

    pub fn from_predicate(name: impl Into<String>, window: LatticeBox, pred: impl Fn(Site) -> bool) -> Self {
        let sites: Vec<Site> = window.sites().into_iter().filter(|s| pred(*s)).collect();
        SubspaceOnWindow::new(name, window, sites)
    }

    /// The anti-diagonal `x = -j` together with the boundary half-row `x >= 0, j = 0`.
    pub fn omega(window: LatticeBox) -> Self {
        SubspaceOnWindow::from_predicate("Ω", window, is_omega)
    }

    /// `Ω` without its anti-diagonal point on row `l`.
    pub fn omega_prime(window: LatticeBox, l: i64) -> Self {
        SubspaceOnWindow::from_predicate("Ω′", window, |s| is_omega(s) && s != Site::at(-l, l))
    }

    pub fn contains(&self, s: Site) -> bool {
        self.sites.contains(&s)
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
}

fn is_omega(s: Site) -> bool {
    s.x() == -s.j() || (s.j() == 0 && s.x() >= 0)
}

/// Range and cokernel of a table, restricted to its window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeCokernel {
    pub range: SubspaceOnWindow,
    pub cokernel: SubspaceOnWindow,
    /// Window sites whose preimage could lie outside the domain.
    pub indeterminate: Vec<Site>,
}

pub fn range_and_cokernel(table: &Table) -> RangeCokernel {
    let window = table.spec().window();
    let mut range = Vec::new();
    let mut cokernel = Vec::new();
    let mut indeterminate = Vec::new();
    for t in window.sites() {
        match table.preimage(t) {
            Ok(Some(_)) => range.push(t),
            Ok(None) => cokernel.push(t),
            Err(_) => indeterminate.push(t),
        }
    }
    RangeCokernel {
        range: SubspaceOnWindow::new(format!("Ran {}", table.name()), window, range),
        cokernel: SubspaceOnWindow::new(format!("Coker {}", table.name()), window, cokernel),
        indeterminate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn omega_on_small_window() {
        let om = SubspaceOnWindow::omega(LatticeBox::new(3));
        let expected: BTreeSet<Site> = [(0, 0), (1, 0), (2, 0), (3, 0), (-1, 1), (-2, 2), (-3, 3)]
            .into_iter()
            .map(|(x, j)| Site::at(x, j))
            .collect();
        assert_eq!(om.sites, expected);
        let omp = SubspaceOnWindow::omega_prime(LatticeBox::new(3), 2);
        assert_eq!(omp.len(), 6);
        assert!(!omp.contains(Site::at(-2, 2)));
    }

    #[test]
    fn table_roundtrips_through_entries() {
        let spec = WindowSpec::new(3, 2).unwrap();
        let t = Table::tabulate(&catalog::w_plus_u1_u0(), spec).unwrap();
        let entries: Vec<TableEntry> = t.entries().collect();
        let back = Table::from_entries("W+(U1,U0)", spec, &entries).unwrap();
        assert_eq!(back, t);
        let json = serde_json::to_string(&entries[0]).unwrap();
        assert_eq!(json, r#"{"from":[-5,0],"to":[-5,5]}"#);
    }

    #[test]
    fn missing_entries_are_rejected() {
        let spec = WindowSpec::new(2, 2).unwrap();
        let t = Table::tabulate(&catalog::u0(), spec).unwrap();
        let entries: Vec<TableEntry> = t.entries().skip(1).collect();
        assert!(matches!(
            Table::from_entries("U0", spec, &entries),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn cokernel_with_boundary_bookkeeping() {
        let spec = WindowSpec::new(5, 2).unwrap();
        let s = Table::tabulate(&catalog::s_u1_u0(), spec).unwrap();
        let rc = range_and_cokernel(&s);
        assert!(rc.indeterminate.is_empty());
        assert_eq!(rc.cokernel.len(), 11);
        assert!(rc.cokernel.sites.iter().all(|t| t.j() == 0));

        // a shift's preimage near the edge it moves away from is unknown
        let u0 = Table::tabulate(&catalog::u0(), spec).unwrap();
        assert_eq!(
            u0.preimage(Site::at(-7, 3)),
            Err(Error::Indeterminate {
                op: "U0".into(),
                site: Site::at(-7, 3),
            })
        );
        assert_eq!(u0.preimage(Site::at(-6, 3)).unwrap(), Some(Site::at(-7, 3)));
        assert!(range_and_cokernel(&u0).cokernel.is_empty());
    }

    #[test]
    fn adjoint_from_preimages() {
        let spec = WindowSpec::new(6, 4).unwrap();
        let w = Table::tabulate(&catalog::w_plus_u1_u0(), spec).unwrap();
        let adj = w.adjoint_on(WindowSpec::new(6, 2).unwrap()).unwrap();
        assert_eq!(adj.get(Site::at(-4, 4)).unwrap(), Some(Site::at(-4, 0)));
        let collapse = Table::from_fn("c", spec, |s| Ok(Some(Site::at(s.x(), 0)))).unwrap();
        assert!(matches!(collapse.adjoint_on(spec), Err(Error::NotInjective { .. })));
    }
}
