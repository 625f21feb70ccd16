//! Executable checks of the scattering identities on finite windows.
//!
//! Every check evaluates its two sides along separate paths and reports a
//! [`CheckResult`]; a failing identity is data, not an error.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, ModelParams};
use crate::error::{Error, Result};
use crate::lattice::Site;
use crate::operator::{iterate, BasisMap, RuleOperator};
use crate::table::{range_and_cokernel, SubspaceOnWindow, Table};
use crate::wave::{scattering_from_tables, wave_operator_table, Direction, Pair, WaveSettings};
use crate::window::{LatticeBox, WindowSpec, MAX_STEP};
use crate::wold::bound_states;

/// How many counterexamples a result keeps.
pub const COUNTEREXAMPLE_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub site: Site,
    pub expected: String,
    pub actual: String,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub window: WindowSpec,
    pub status: Status,
    pub checked: usize,
    pub skipped: usize,
    pub failures: usize,
    pub counterexamples: Vec<Counterexample>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

fn show(t: Option<Site>) -> String {
    t.map_or_else(|| "0".to_string(), |s| s.to_string())
}

/// Accumulates outcomes of one check.
struct Tally {
    result: CheckResult,
}

impl Tally {
    fn new(name: impl Into<String>, window: WindowSpec) -> Self {
        Tally {
            result: CheckResult {
                name: name.into(),
                window,
                status: Status::Pass,
                checked: 0,
                skipped: 0,
                failures: 0,
                counterexamples: Vec::new(),
                notes: Vec::new(),
            },
        }
    }

    fn ok(&mut self) {
        self.result.checked += 1;
    }

    fn skip(&mut self) {
        self.result.skipped += 1;
    }

    fn fail(&mut self, site: Site, expected: String, actual: String, note: impl Into<String>) {
        self.result.checked += 1;
        self.result.failures += 1;
        if self.result.counterexamples.len() < COUNTEREXAMPLE_CAP {
            self.result.counterexamples.push(Counterexample {
                site,
                expected,
                actual,
                note: note.into(),
            });
        }
    }

    fn compare(&mut self, site: Site, expected: Option<Site>, actual: Option<Site>, note: impl Into<String>) {
        if expected == actual {
            self.ok();
        } else {
            self.fail(site, show(expected), show(actual), note);
        }
    }

    /// Records an evaluation that could not be completed inside the domain.
    fn absorb<T>(&mut self, r: Result<T>) -> Result<Option<T>> {
        match r {
            Ok(v) => Ok(Some(v)),
            Err(Error::OutOfDomain { .. } | Error::Indeterminate { .. }) => {
                self.skip();
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }

    fn note(&mut self, n: impl Into<String>) {
        self.result.notes.push(n.into());
    }

    fn finish(mut self) -> CheckResult {
        let r = &mut self.result;
        r.status = if r.failures > 0 {
            Status::Fail
        } else if r.skipped > 0 || r.checked == 0 {
            Status::Indeterminate
        } else {
            Status::Pass
        };
        self.result
    }
}

fn power<M: BasisMap + ?Sized, N: BasisMap + ?Sized>(fwd: &M, back: &N, s: Site, m: i64) -> Result<Option<Site>> {
    if m >= 0 {
        iterate(fwd, s, m as usize)
    } else {
        iterate(back, s, m.unsigned_abs() as usize)
    }
}

/// `W U0^m = U^m W` on the window, for every `m` in `ms`.
pub fn check_intertwining<W: BasisMap + ?Sized>(
    w: &W,
    pair: Pair<'_>,
    ms: impl IntoIterator<Item = i64>,
    spec: WindowSpec,
) -> Result<CheckResult> {
    let mut tally = Tally::new(
        format!(
            "intertwining {} with ({},{})",
            w.label(),
            pair.u.label(),
            pair.u0.label()
        ),
        spec,
    );
    let ms: Vec<i64> = ms.into_iter().collect();
    for &m in &ms {
        for s in spec.window().sites() {
            let lhs = match power(pair.u0, pair.u0_inv, s, m)? {
                Some(t) => tally.absorb(w.image(t))?,
                None => Some(None),
            };
            let rhs = match tally.absorb(w.image(s))? {
                Some(Some(t)) => Some(power(pair.u, pair.u_inv, t, m)?),
                Some(None) => Some(None),
                None => None,
            };
            if let (Some(lhs), Some(rhs)) = (lhs, rhs) {
                tally.compare(s, rhs, lhs, format!("m = {m}"));
            }
        }
    }
    if let (Some(lo), Some(hi)) = (ms.iter().min(), ms.iter().max()) {
        tally.note(format!("m in [{lo}, {hi}]"));
    }
    Ok(tally.finish())
}

/// `s ∈ V ⇔ U s ∈ V` for every window site `s`; `V` must be known wherever
/// `U` sends window sites.
pub fn check_subspace_invariance<M: BasisMap + ?Sized>(
    u: &M,
    subspace: &SubspaceOnWindow,
    spec: WindowSpec,
) -> Result<CheckResult> {
    let mut tally = Tally::new(format!("{} {} = {}", u.label(), subspace.name, subspace.name), spec);
    for s in spec.window().sites() {
        if !subspace.window.contains(s) {
            tally.skip();
            continue;
        }
        let inside = subspace.contains(s);
        match u.image(s)? {
            None if inside => tally.fail(s, "image in subspace".into(), "0".into(), ""),
            None => tally.ok(),
            Some(t) if !subspace.window.contains(t) => tally.skip(),
            Some(t) => {
                if subspace.contains(t) == inside {
                    tally.ok();
                } else {
                    let want = if inside { "inside" } else { "outside" };
                    tally.fail(s, format!("image {want} {}", subspace.name), t.to_string(), "");
                }
            }
        }
    }
    Ok(tally.finish())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowDisplacement {
    pub j: i64,
    /// `None` when the row is annihilated or moves unevenly.
    pub displacement: Option<(i64, i64)>,
}

/// `S U0 = U0 S` on the window, and a uniform displacement along each row.
pub fn check_commutation<M: BasisMap + ?Sized>(
    s_table: &Table,
    u0: &M,
    spec: WindowSpec,
) -> Result<(CheckResult, Vec<RowDisplacement>)> {
    let mut tally = Tally::new(format!("[{}, {}] = 0", s_table.name(), u0.label()), spec);
    let window = spec.window();
    for s in window.sites() {
        let lhs = match u0.image(s)? {
            Some(t) => tally.absorb(s_table.get(t))?,
            None => Some(None),
        };
        let rhs = match tally.absorb(s_table.get(s))? {
            Some(Some(t)) => Some(u0.image(t)?),
            Some(None) => Some(None),
            None => None,
        };
        if let (Some(lhs), Some(rhs)) = (lhs, rhs) {
            tally.compare(s, rhs, lhs, "");
        }
    }
    let mut profile = Vec::new();
    for j in 0..=window.radius {
        let mut seen: BTreeSet<Option<(i64, i64)>> = BTreeSet::new();
        let mut first: Option<Option<(i64, i64)>> = None;
        for x in -window.radius..=window.radius {
            let s = Site::at(x, j);
            let d = s_table.get(s)?.map(|t| (t.x() - x, t.j() - j));
            match first {
                None => first = Some(d),
                Some(f) if f != d => {
                    tally.fail(s, format!("displacement {f:?}"), format!("{d:?}"), "row is not uniform")
                }
                Some(_) => {}
            }
            seen.insert(d);
        }
        let displacement = match (seen.len(), first) {
            (1, Some(d)) => d,
            _ => None,
        };
        profile.push(RowDisplacement { j, displacement });
    }
    Ok((tally.finish(), profile))
}

/// Sites whose forward orbits the chain rule needs before it can be asserted.
fn chain_interaction(p: ModelParams) -> [Site; 2] {
    [Site::at(p.z - 1, p.l), Site::at(p.z, p.l)]
}

/// `W±(U2,U1) W±(U1,U0) = W±(U2,U0)` with all three tables computed by
/// iteration, for both signs.
pub fn check_chain_rule(catalog: &Catalog, spec: WindowSpec, settings: WaveSettings) -> Result<CheckResult> {
    let p = catalog.params();
    let mut tally = Tally::new("chain rule W(U2,U1) W(U1,U0) = W(U2,U0)", spec);
    if let Some(s) = chain_interaction(p).into_iter().find(|s| !spec.window().contains(*s)) {
        tally.note(format!("interaction site {s} lies outside the window"));
        let mut r = tally.finish();
        r.status = Status::Indeterminate;
        return Ok(r);
    }
    let p10 = Pair::from_catalog(catalog, "U1", "U0")?;
    let p21 = Pair::from_catalog(catalog, "U2", "U1")?;
    let p20 = Pair::from_catalog(catalog, "U2", "U0")?;
    for dir in [Direction::Plus, Direction::Minus] {
        let w10 = wave_operator_table(p10, dir, spec, settings)?;
        let w21 = wave_operator_table(p21, dir, spec, settings)?;
        let w20 = wave_operator_table(p20, dir, spec, settings)?;
        for s in spec.window().sites() {
            let composed = match w10.get(s)? {
                Some(t) => tally.absorb(w21.get(t))?,
                None => Some(None),
            };
            if let Some(c) = composed {
                tally.compare(s, w20.get(s)?, c, format!("sign {dir}"));
            }
        }
    }
    tally.note(format!("(z, ℓ) = ({}, {}), both signs", p.z, p.l));
    Ok(tally.finish())
}

/// Desk-scale stand-in for non-compactness of `a - b`: the sites where the
/// tables differ must be exactly the window row `row`, or nothing at all.
pub fn check_noncompact_difference(
    a: &Table,
    b: &Table,
    row: Option<i64>,
    spec: WindowSpec,
) -> Result<(CheckResult, Vec<Site>)> {
    let mut tally = Tally::new(format!("{} - {} disagreement set", a.name(), b.name()), spec);
    let mut disagree = Vec::new();
    for s in spec.window().sites() {
        let (ta, tb) = (a.get(s)?, b.get(s)?);
        let differs = ta != tb;
        if differs {
            disagree.push(s);
        }
        let expected = row == Some(s.j());
        if differs == expected {
            tally.ok();
        } else {
            let want = if expected { "tables differ" } else { "tables agree" };
            tally.fail(s, want.into(), format!("{} vs {}", show(ta), show(tb)), "");
        }
    }
    tally.note(format!(
        "proxy for non-compactness: {} disagreement sites",
        disagree.len()
    ));
    Ok((tally.finish(), disagree))
}

/// `W* W = 1` on the window, using the table's preimage index for `W*`.
pub fn check_isometry(table: &Table, spec: WindowSpec) -> Result<CheckResult> {
    let mut tally = Tally::new(format!("{} isometry", table.name()), spec);
    for s in spec.window().sites() {
        match table.get(s)? {
            None => tally.fail(s, s.to_string(), "0".into(), "annihilated"),
            Some(t) => {
                if let Some(back) = tally.absorb(table.preimage(t))? {
                    tally.compare(s, Some(s), back, "");
                }
            }
        }
    }
    Ok(tally.finish())
}

/// `U^-1 U = U U^-1 = 1` on the window.
pub fn check_unitarity<M: BasisMap + ?Sized, N: BasisMap + ?Sized>(
    u: &M,
    u_inv: &N,
    spec: WindowSpec,
) -> Result<CheckResult> {
    let mut tally = Tally::new(format!("{} unitary", u.label()), spec);
    let mut seen = BTreeSet::new();
    for s in spec.window().sites() {
        let fwd = u.image(s)?;
        if let Some(t) = fwd {
            if !seen.insert(t) {
                tally.fail(s, "distinct image".into(), t.to_string(), "not injective");
                continue;
            }
        }
        let back = match fwd {
            Some(t) => u_inv.image(t)?,
            None => None,
        };
        let other = match u_inv.image(s)? {
            Some(t) => u.image(t)?,
            None => None,
        };
        tally.compare(s, Some(s), back, "U^-1 U");
        tally.compare(s, Some(s), other, "U U^-1");
    }
    Ok(tally.finish())
}

/// A table against an independent closed form on the window.
pub fn check_oracle<M: BasisMap + ?Sized>(table: &Table, oracle: &M, spec: WindowSpec) -> Result<CheckResult> {
    let mut tally = Tally::new(format!("{} matches closed form", table.name()), spec);
    for s in spec.window().sites() {
        tally.compare(s, oracle.image(s)?, table.get(s)?, "");
    }
    Ok(tally.finish())
}

/// The symbolic adjoint of `op` against the brute-force inverse over the
/// domain, and optionally against a hand-written adjoint.
pub fn check_adjoint(op: &RuleOperator, written: Option<&RuleOperator>, spec: WindowSpec) -> Result<CheckResult> {
    let mut tally = Tally::new(format!("{}* symbolic vs brute force", op.name()), spec);
    let symbolic = match op.adjoint(&spec) {
        Ok(a) => a,
        Err(e) => {
            tally.fail(Site::ORIGIN, "symbolic adjoint".into(), e.to_string(), "");
            return Ok(tally.finish());
        }
    };
    let brute = Table::tabulate(op, spec)?;
    for t in spec.window().sites() {
        if let Some(expected) = tally.absorb(brute.preimage(t))? {
            tally.compare(t, expected, symbolic.image_of(t)?, "symbolic");
            if let Some(w) = written {
                tally.compare(t, expected, w.image_of(t)?, w.name());
            }
        }
    }
    if let Some(w) = written {
        tally.note(format!("also compared with {}", w.name()));
    }
    Ok(tally.finish())
}

/// Cokernel of an iteratively computed table against a closed-form set.
pub fn check_cokernel(table: &Table, expected: &SubspaceOnWindow) -> Result<CheckResult> {
    let spec = table.spec();
    let mut tally = Tally::new(format!("Coker {} = {}", table.name(), expected.name), spec);
    let rc = range_and_cokernel(table);
    for t in spec.window().sites() {
        if rc.indeterminate.contains(&t) {
            tally.skip();
            continue;
        }
        let (want, got) = (expected.contains(t), rc.cokernel.contains(t));
        if want == got {
            tally.ok();
        } else {
            let word = |b: bool| if b { "in cokernel" } else { "in range" };
            tally.fail(t, word(want).into(), word(got).into(), "");
        }
    }
    tally.note(format!("{} cokernel sites", rc.cokernel.len()));
    Ok(tally.finish())
}

/// Bound states of `u` against an expected list of fixed points.
pub fn check_bound_states<M: BasisMap + ?Sized>(u: &M, expected: &[Site], spec: WindowSpec) -> Result<CheckResult> {
    let mut tally = Tally::new(format!("bound states of {}", u.label()), spec);
    if let Some(s) = expected.iter().find(|s| !spec.window().contains(**s)) {
        tally.skip();
        tally.note(format!("expected bound state {s} lies outside the window"));
        return Ok(tally.finish());
    }
    let found = bound_states(u, spec)?;
    let want: BTreeSet<Site> = expected.iter().copied().collect();
    let got: BTreeSet<Site> = found.fixed_points.iter().copied().collect();
    for s in want.union(&got) {
        if want.contains(s) == got.contains(s) {
            tally.ok();
        } else {
            let word = |b: bool| if b { "fixed" } else { "not fixed" };
            tally.fail(*s, word(want.contains(s)).into(), word(got.contains(s)).into(), "");
        }
    }
    for c in &found.cycles {
        tally.fail(
            c.members[0],
            "no cycle".into(),
            format!("cycle of length {}", c.length),
            "",
        );
    }
    if want.is_empty() && got.is_empty() && found.cycles.is_empty() {
        tally.ok();
    }
    Ok(tally.finish())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub passed: bool,
    pub failing: Vec<String>,
    pub checks: Vec<CheckResult>,
}

impl Manifest {
    pub fn new(checks: Vec<CheckResult>) -> Self {
        let failing: Vec<String> = checks
            .iter()
            .filter(|c| c.status != Status::Pass)
            .map(|c| c.name.clone())
            .collect();
        Manifest {
            passed: failing.is_empty(),
            failing,
            checks,
        }
    }
}

fn point_set(name: &str, window: LatticeBox, sites: &[Site]) -> SubspaceOnWindow {
    SubspaceOnWindow::new(name, window, sites.iter().copied())
}

/// Every check, at one window, against the given catalog.
pub fn run_suite(catalog: &Catalog, spec: WindowSpec, settings: WaveSettings) -> Result<Manifest> {
    let p = catalog.params();
    let (z, l) = (p.z, p.l);
    let window = spec.window();
    let domain = spec.domain();
    let mut checks = Vec::new();

    for u in ["U0", "U1", "U2", "U3"] {
        let (a, b) = catalog.unitary(u)?;
        checks.push(check_unitarity(a, b, spec)?);
    }
    for op in catalog.entries() {
        let written = match op.name() {
            "W+(U1,U0)" | "W+(U2,U0)" | "W+(U3,U0)" => Some(catalog.get(&format!("{}*", op.name()))?),
            _ => None,
        };
        checks.push(check_adjoint(op, written, spec)?);
    }

    let omega = SubspaceOnWindow::omega(window);
    let coker_w = |u: &str, dir: Direction| -> SubspaceOnWindow {
        let mut sites: Vec<Site> = Vec::new();
        if dir == Direction::Minus {
            sites.extend(omega.sites.iter().copied());
        }
        match (u, dir) {
            ("U2", Direction::Plus) | ("U2", Direction::Minus) => sites.push(Site::at(z, l)),
            ("U3", Direction::Plus) => sites.push(Site::at(-l, l)),
            _ => {}
        }
        point_set(&format!("expected Coker W{dir}({u},U0)"), window, &sites)
    };
    let row0 = SubspaceOnWindow::from_predicate("row 0", window, |s| s.j() == 0);
    let ms: Vec<i64> = (-spec.guard..=spec.guard).collect();

    let mut s_tables = Vec::new();
    for (u, u0) in [("U1", "U0"), ("U2", "U0"), ("U3", "U0"), ("U2", "U1")] {
        let pair = Pair::from_catalog(catalog, u, u0)?;
        let wide = spec.widened(spec.guard);
        let mut wide_tables = Vec::new();
        for dir in [Direction::Plus, Direction::Minus] {
            let wide_table = wave_operator_table(pair, dir, wide, settings)?;
            let table = Table::from_fn(wide_table.name(), spec, |s| wide_table.get(s))?;
            checks.push(check_oracle(&table, catalog.get(table.name())?, spec)?);
            checks.push(check_isometry(&table, spec)?);
            checks.push(check_intertwining(&table, pair, ms.iter().copied(), spec)?);
            if u0 == "U0" {
                let expected = coker_w(u, dir);
                checks.push(check_cokernel(&table, &expected)?);
                // the cokernel of a wave operator is invariant under its own U
                let rc = range_and_cokernel(&table);
                let inner = WindowSpec {
                    radius: spec.radius - MAX_STEP,
                    guard: spec.guard,
                };
                checks.push(check_subspace_invariance(pair.u, &rc.cokernel, inner)?);
            }
            wide_tables.push(wide_table);
        }
        if u0 == "U0" {
            let s = scattering_from_tables(&pair.scattering_name(), &wide_tables[0], &wide_tables[1], spec)?;
            checks.push(check_oracle(&s, catalog.get(s.name())?, spec)?);
            checks.push(check_isometry(&s, spec)?);
            checks.push(check_cokernel(
                &s,
                &SubspaceOnWindow {
                    name: "row 0".into(),
                    ..row0.clone()
                },
            )?);
            let (c, profile) = check_commutation(&s, pair.u0, spec)?;
            checks.push(c);
            checks.push(check_profile(
                &s,
                &profile,
                if u == "U2" { Some(l - 1) } else { None },
                spec,
            ));
            s_tables.push(s);
        }
    }

    checks.push(check_noncompact_difference(&s_tables[1], &s_tables[0], Some(l - 1), spec)?.0);
    checks.push(check_noncompact_difference(&s_tables[2], &s_tables[0], None, spec)?.0);
    checks.push(check_chain_rule(catalog, spec, settings)?);

    let omega_d = SubspaceOnWindow::omega(domain);
    let omega_prime_d = SubspaceOnWindow::omega_prime(domain, l);
    let (u1, _) = catalog.unitary("U1")?;
    let (u2, _) = catalog.unitary("U2")?;
    let (u3, _) = catalog.unitary("U3")?;
    checks.push(check_subspace_invariance(u1, &omega_d, spec)?);
    checks.push(check_subspace_invariance(u2, &omega_d, spec)?);
    checks.push(check_subspace_invariance(u3, &omega_prime_d, spec)?);
    checks.push(check_subspace_invariance(
        u2,
        &point_set("{(z,ℓ)}", domain, &[Site::at(z, l)]),
        spec,
    )?);
    checks.push(check_subspace_invariance(
        u3,
        &point_set("{(-ℓ,ℓ)}", domain, &[Site::at(-l, l)]),
        spec,
    )?);
    checks.push(check_bound_states(u1, &[], spec)?);
    checks.push(check_bound_states(u2, &[Site::at(z, l)], spec)?);
    checks.push(check_bound_states(u3, &[Site::at(-l, l)], spec)?);

    Ok(Manifest::new(checks))
}

/// Row displacements of a scattering table against the closed-form profile:
/// `(0, 1)` on every row except `shifted_row`, which moves by `(1, 1)`.
pub fn check_profile(
    s: &Table,
    profile: &[RowDisplacement],
    shifted_row: Option<i64>,
    spec: WindowSpec,
) -> CheckResult {
    let mut tally = Tally::new(format!("{} row displacements", s.name()), spec);
    for r in profile {
        let want = if Some(r.j) == shifted_row { (1, 1) } else { (0, 1) };
        if r.displacement == Some(want) {
            tally.ok();
        } else {
            tally.fail(
                Site::at(0, r.j),
                format!("{want:?}"),
                format!("{:?}", r.displacement),
                "row displacement",
            );
        }
    }
    tally.finish()
}
