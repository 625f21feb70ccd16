use std::collections::BTreeSet;

use dtscatter::catalog::{Catalog, ModelParams};
use dtscatter::lattice::Site;
use dtscatter::table::{range_and_cokernel, SubspaceOnWindow};
use dtscatter::verify::{check_isometry, Status};
use dtscatter::wave::{scattering_operator, wave_operator, wave_operator_table, Direction, Pair, WaveSettings};
use dtscatter::window::WindowSpec;

fn s(x: i64, j: i64) -> Site {
    Site::at(x, j)
}

fn catalog(z: i64, l: i64) -> Catalog {
    Catalog::new(ModelParams::new(z, l).unwrap()).unwrap()
}

fn spec(r: i64) -> WindowSpec {
    WindowSpec::new(r, 4).unwrap()
}

#[test]
fn single_site_limits() {
    let c = catalog(2, 3);
    let cfg = WaveSettings::default();
    let p10 = Pair::from_catalog(&c, "U1", "U0").unwrap();
    let w = spec(10);
    assert_eq!(
        wave_operator(p10, Direction::Plus, s(-2, 0), &w, cfg).unwrap().image,
        Some(s(-2, 2))
    );
    assert_eq!(
        wave_operator(p10, Direction::Minus, s(3, 1), &w, cfg).unwrap().image,
        Some(s(3, 2))
    );
    let lim = wave_operator(p10, Direction::Plus, s(-5, 3), &w, cfg).unwrap();
    assert_eq!((lim.image, lim.steps), (Some(s(-5, 2)), 7));
    let p20 = Pair::from_catalog(&c, "U2", "U0").unwrap();
    assert_eq!(
        wave_operator(p20, Direction::Plus, s(2, 3), &w, cfg).unwrap().image,
        Some(s(1, 3))
    );
}

#[test]
fn tables_match_closed_forms_at_r10() {
    let cfg = WaveSettings::default();
    for (z, l, u, u0, dir) in [
        (2, 3, "U1", "U0", Direction::Plus),
        (2, 2, "U3", "U0", Direction::Minus),
        (2, 3, "U2", "U1", Direction::Plus),
    ] {
        let c = catalog(z, l);
        let pair = Pair::from_catalog(&c, u, u0).unwrap();
        let t = wave_operator_table(pair, dir, spec(10), cfg).unwrap();
        let oracle = c.get(&pair.wave_name(dir)).unwrap();
        assert_eq!(spec(10).window().len(), 231);
        assert!(t.diff(oracle, spec(10).window()).unwrap().is_empty(), "{}", t.name());
    }
}

#[test]
fn every_pair_matches_at_other_parameters() {
    let cfg = WaveSettings::default();
    for (z, l) in [(5, 2), (-1, 3), (1, 1), (7, 4)] {
        let c = catalog(z, l);
        for (u, u0) in [("U1", "U0"), ("U2", "U0"), ("U3", "U0"), ("U2", "U1")] {
            let pair = Pair::from_catalog(&c, u, u0).unwrap();
            for dir in [Direction::Plus, Direction::Minus] {
                let t = wave_operator_table(pair, dir, spec(12), cfg).unwrap();
                let oracle = c.get(&pair.wave_name(dir)).unwrap();
                let diff = t.diff(oracle, spec(12).window()).unwrap();
                assert!(diff.is_empty(), "{} at ({z},{l}): {:?}", t.name(), diff.first());
                assert_eq!(check_isometry(&t, spec(12)).unwrap().status, Status::Pass);
            }
        }
    }
}

#[test]
fn scattering_examples() {
    let cfg = WaveSettings::default();
    let c = catalog(2, 3);
    let s10 = scattering_operator(Pair::from_catalog(&c, "U1", "U0").unwrap(), spec(8), cfg).unwrap();
    for t in spec(8).window().sites() {
        assert_eq!(s10.get(t).unwrap(), Some(s(t.x(), t.j() + 1)));
    }
    let s20 = scattering_operator(Pair::from_catalog(&c, "U2", "U0").unwrap(), spec(8), cfg).unwrap();
    assert_eq!(s20.get(s(0, 2)).unwrap(), Some(s(1, 3)));

    let c2 = catalog(2, 2);
    let s30 = scattering_operator(Pair::from_catalog(&c2, "U3", "U0").unwrap(), spec(8), cfg).unwrap();
    let s10b = scattering_operator(Pair::from_catalog(&c2, "U1", "U0").unwrap(), spec(8), cfg).unwrap();
    assert_eq!(s30.entries_on(spec(8).window()), s10b.entries_on(spec(8).window()));
}

fn sites(v: &[(i64, i64)]) -> BTreeSet<Site> {
    v.iter().map(|&(x, j)| s(x, j)).collect()
}

#[test]
fn cokernel_examples() {
    let cfg = WaveSettings::default();
    let c = catalog(2, 3);
    let p10 = Pair::from_catalog(&c, "U1", "U0").unwrap();
    let wm = wave_operator_table(p10, Direction::Minus, spec(3), cfg).unwrap();
    let rc = range_and_cokernel(&wm);
    assert!(rc.indeterminate.is_empty());
    assert_eq!(
        rc.cokernel.sites,
        sites(&[(0, 0), (1, 0), (2, 0), (3, 0), (-1, 1), (-2, 2), (-3, 3)])
    );

    let p20 = Pair::from_catalog(&c, "U2", "U0").unwrap();
    let wp = wave_operator_table(p20, Direction::Plus, spec(10), cfg).unwrap();
    assert_eq!(range_and_cokernel(&wp).cokernel.sites, sites(&[(2, 3)]));

    let wm2 = wave_operator_table(p20, Direction::Minus, spec(10), cfg).unwrap();
    let mut expected = SubspaceOnWindow::omega(spec(10).window()).sites;
    expected.insert(s(2, 3));
    assert_eq!(range_and_cokernel(&wm2).cokernel.sites, expected);

    let s10 = scattering_operator(p10, spec(5), cfg).unwrap();
    let coker = range_and_cokernel(&s10).cokernel;
    assert_eq!(coker.len(), 11);
    assert!(coker.sites.iter().all(|t| t.j() == 0));
}

#[test]
fn scattering_is_never_onto_row_zero() {
    let cfg = WaveSettings::default();
    for (z, l) in [(2, 3), (5, 2)] {
        let c = catalog(z, l);
        for u in ["U1", "U2", "U3"] {
            let sc = scattering_operator(Pair::from_catalog(&c, u, "U0").unwrap(), spec(6), cfg).unwrap();
            let rc = range_and_cokernel(&sc);
            assert!(rc.range.sites.iter().all(|t| t.j() > 0), "{u}");
            assert_eq!(rc.cokernel.len(), 13);
        }
    }
}

#[test]
fn iteration_cap_is_configurable() {
    let c = catalog(2, 3);
    let pair = Pair::from_catalog(&c, "U2", "U0").unwrap();
    let tight = WaveSettings {
        margin: 2,
        cap: Some(4),
    };
    assert!(matches!(
        wave_operator_table(pair, Direction::Minus, spec(6), tight),
        Err(dtscatter::Error::NoStabilization { cap: 4, .. })
    ));
    assert_eq!(WaveSettings::default().resolved_cap(&spec(10)), 56);
}
