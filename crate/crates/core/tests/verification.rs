use dtscatter::catalog::{Catalog, ModelParams};
use dtscatter::lattice::Site;
use dtscatter::table::{SubspaceOnWindow, Table};
use dtscatter::verify::{
    check_adjoint, check_bound_states, check_chain_rule, check_commutation, check_intertwining, check_isometry,
    check_noncompact_difference, check_oracle, check_subspace_invariance, check_unitarity, run_suite, RowDisplacement,
    Status,
};
use dtscatter::wave::{scattering_operator, wave_operator_table, Direction, Pair, WaveSettings};
use dtscatter::window::WindowSpec;

fn catalog(z: i64, l: i64) -> Catalog {
    Catalog::new(ModelParams::new(z, l).unwrap()).unwrap()
}

fn scattering(c: &Catalog, u: &str, spec: WindowSpec) -> Table {
    let pair = Pair::from_catalog(c, u, "U0").unwrap();
    scattering_operator(pair, spec, WaveSettings::default()).unwrap()
}

#[test]
fn intertwining_examples() {
    let c = catalog(2, 3);
    let spec = WindowSpec::new(25, 10).unwrap();
    for (u, dir) in [("U1", Direction::Plus), ("U2", Direction::Minus)] {
        let pair = Pair::from_catalog(&c, u, "U0").unwrap();
        let w = wave_operator_table(pair, dir, spec, WaveSettings::default()).unwrap();
        let r = check_intertwining(&w, pair, -10..=10, spec).unwrap();
        assert_eq!(r.status, Status::Pass, "{}", r.name);
        assert_eq!(r.checked, 21 * spec.window().len());
    }

    let w = Table::tabulate(c.get("W+(U1,U0)").unwrap(), spec).unwrap();
    let wrong = Pair::from_catalog(&c, "U2", "U0").unwrap();
    let r = check_intertwining(&w, wrong, [1], spec).unwrap();
    assert_eq!(r.status, Status::Fail);
    assert!(!r.counterexamples.is_empty());
    assert!(r.counterexamples.iter().any(|ce| ce.site.j() == 3));
}

#[test]
fn invariant_subspaces() {
    let spec = WindowSpec::new(15, 4).unwrap();
    let domain = spec.domain();
    let c = catalog(2, 3);
    let omega = SubspaceOnWindow::omega(domain);
    let r = check_subspace_invariance(c.get("U1").unwrap(), &omega, spec).unwrap();
    assert_eq!(r.status, Status::Pass);
    let r = check_subspace_invariance(c.get("U2").unwrap(), &omega, spec).unwrap();
    assert_eq!(r.status, Status::Pass);
    let point = SubspaceOnWindow::new("{(2,3)}", domain, [Site::at(2, 3)]);
    let r = check_subspace_invariance(c.get("U2").unwrap(), &point, spec).unwrap();
    assert_eq!(r.status, Status::Pass);

    let c2 = catalog(2, 2);
    let omega_prime = SubspaceOnWindow::omega_prime(domain, 2);
    let r = check_subspace_invariance(c2.get("U3").unwrap(), &omega_prime, spec).unwrap();
    assert_eq!(r.status, Status::Pass);
    // U1 does not fix (z, l)
    let r = check_subspace_invariance(c.get("U1").unwrap(), &point, spec).unwrap();
    assert_eq!(r.status, Status::Fail);
}

fn uniform(profile: &[RowDisplacement], shifted: Option<i64>) -> bool {
    profile.iter().all(|r| {
        let want = if Some(r.j) == shifted { (1, 1) } else { (0, 1) };
        r.displacement == Some(want)
    })
}

#[test]
fn commutation_and_row_profiles() {
    let spec = WindowSpec::new(10, 4).unwrap();
    let c = catalog(2, 3);
    let u0 = c.get("U0").unwrap();
    let (r1, p1) = check_commutation(&scattering(&c, "U1", spec), u0, spec).unwrap();
    assert_eq!(r1.status, Status::Pass);
    assert!(uniform(&p1, None));
    let (r2, p2) = check_commutation(&scattering(&c, "U2", spec), u0, spec).unwrap();
    assert_eq!(r2.status, Status::Pass);
    assert!(uniform(&p2, Some(2)));
    let (r3, p3) = check_commutation(&scattering(&c, "U3", spec), u0, spec).unwrap();
    assert_eq!(r3.status, Status::Pass);
    assert_eq!(p3, p1);

    // a wave operator does not commute with U0
    let w = Table::tabulate(c.get("W+(U2,U0)").unwrap(), spec).unwrap();
    assert_eq!(check_commutation(&w, u0, spec).unwrap().0.status, Status::Fail);
}

#[test]
fn chain_rule_examples() {
    for (z, l) in [(2, 3), (5, 2)] {
        let spec = WindowSpec::new(20, 4).unwrap();
        let r = check_chain_rule(&catalog(z, l), spec, WaveSettings::default()).unwrap();
        assert_eq!(r.status, Status::Pass, "({z},{l})");
    }
    let r = check_chain_rule(&catalog(2, 3), WindowSpec::new(2, 4).unwrap(), WaveSettings::default()).unwrap();
    assert_eq!(r.status, Status::Indeterminate);
}

#[test]
fn noncompact_difference_examples() {
    let spec = WindowSpec::new(10, 4).unwrap();
    let c = catalog(2, 3);
    let (s1, s2, s3) = (
        scattering(&c, "U1", spec),
        scattering(&c, "U2", spec),
        scattering(&c, "U3", spec),
    );
    let (r, set) = check_noncompact_difference(&s2, &s1, Some(2), spec).unwrap();
    assert_eq!(r.status, Status::Pass);
    assert_eq!(set.len(), 21);
    assert!(set.iter().all(|t| t.j() == 2));
    let (r, set) = check_noncompact_difference(&s3, &s1, None, spec).unwrap();
    assert_eq!(r.status, Status::Pass);
    assert!(set.is_empty());
    let (r, set) = check_noncompact_difference(&s1, &s1, None, spec).unwrap();
    assert_eq!(r.status, Status::Pass);
    assert!(set.is_empty());
    // the wrong expectation is reported
    let (r, _) = check_noncompact_difference(&s2, &s1, None, spec).unwrap();
    assert_eq!(r.status, Status::Fail);
}

#[test]
fn oracle_isometry_and_unitarity() {
    let spec = WindowSpec::new(8, 4).unwrap();
    let c = catalog(2, 3);
    let pair = Pair::from_catalog(&c, "U3", "U0").unwrap();
    let w = wave_operator_table(pair, Direction::Plus, spec, WaveSettings::default()).unwrap();
    assert_eq!(
        check_oracle(&w, c.get("W+(U3,U0)").unwrap(), spec).unwrap().status,
        Status::Pass
    );
    assert_eq!(
        check_oracle(&w, c.get("W+(U1,U0)").unwrap(), spec).unwrap().status,
        Status::Fail
    );
    assert_eq!(check_isometry(&w, spec).unwrap().status, Status::Pass);
    let adj = Table::tabulate(c.get("W+(U3,U0)*").unwrap(), spec).unwrap();
    assert_eq!(check_isometry(&adj, spec).unwrap().status, Status::Fail);
    let (u, inv) = c.unitary("U2").unwrap();
    assert_eq!(check_unitarity(u, inv, spec).unwrap().status, Status::Pass);
    assert_eq!(
        check_unitarity(u, c.get("U1^-1").unwrap(), spec).unwrap().status,
        Status::Fail
    );
}

#[test]
fn adjoints_against_written_tables() {
    let spec = WindowSpec::new(20, 4).unwrap();
    let c = catalog(2, 3);
    for name in ["W+(U1,U0)", "W+(U2,U0)", "W+(U3,U0)"] {
        let written = c.get(&format!("{name}*")).unwrap();
        let r = check_adjoint(c.get(name).unwrap(), Some(written), spec).unwrap();
        assert_eq!(r.status, Status::Pass, "{name}");
    }
    let wrong = c.get("W+(U1,U0)*").unwrap();
    let r = check_adjoint(c.get("W+(U2,U0)").unwrap(), Some(wrong), spec).unwrap();
    assert_eq!(r.status, Status::Fail);
}

#[test]
fn bound_state_checks() {
    let spec = WindowSpec::new(10, 4).unwrap();
    let c = catalog(2, 3);
    assert_eq!(
        check_bound_states(c.get("U2").unwrap(), &[Site::at(2, 3)], spec)
            .unwrap()
            .status,
        Status::Pass
    );
    assert_eq!(
        check_bound_states(c.get("U1").unwrap(), &[], spec).unwrap().status,
        Status::Pass
    );
    assert_eq!(
        check_bound_states(c.get("U1").unwrap(), &[Site::at(2, 3)], spec)
            .unwrap()
            .status,
        Status::Fail
    );
    let tiny = WindowSpec::new(2, 4).unwrap();
    let r = check_bound_states(c.get("U2").unwrap(), &[Site::at(2, 3)], tiny).unwrap();
    assert_eq!(r.status, Status::Indeterminate);
}

#[test]
fn whole_suite_passes_and_detects_corruption() {
    let spec = WindowSpec::new(8, 4).unwrap();
    let settings = WaveSettings::default();
    for (z, l) in [(2, 3), (5, 2), (0, 2)] {
        let m = run_suite(&catalog(z, l), spec, settings).unwrap();
        assert!(m.passed, "({z},{l}): {:?}", m.failing);
    }
    let mut bad = catalog(2, 3);
    bad.corrupt("W+(U1,U0)").unwrap();
    let m = run_suite(&bad, spec, settings).unwrap();
    assert!(!m.passed);
    assert!(m.failing.iter().any(|n| n.contains("W+(U1,U0)")));
}

#[test]
fn check_results_serialize() {
    let spec = WindowSpec::new(3, 2).unwrap();
    let c = catalog(2, 3);
    let (u, inv) = c.unitary("U1").unwrap();
    let r = check_unitarity(u, inv, spec).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["status"], "pass");
    for key in ["name", "window", "counterexamples"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}
