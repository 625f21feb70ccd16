use dtscatter::catalog::{Catalog, ModelParams, FIGURE_OPERATORS};
use dtscatter::figures::{
    figure_file_name, parse_ascii, parse_svg, render_ascii, render_svg, render_wold_svg, sanitize, Diagram,
    DiagramSpec, Mark,
};
use dtscatter::lattice::Site;
use dtscatter::table::{Table, TableEntry};
use dtscatter::wave::{scattering_operator, Pair, WaveSettings};
use dtscatter::window::{LatticeBox, WindowSpec};
use dtscatter::wold::wold_decompose;
use proptest::prelude::*;

fn catalog() -> Catalog {
    Catalog::new(ModelParams::new(2, 3).unwrap()).unwrap()
}

fn grid_rows(text: &str) -> Vec<Vec<char>> {
    text.lines()
        .filter(|l| l.contains('|'))
        .map(|l| {
            l.split('|')
                .nth(1)
                .unwrap()
                .split_whitespace()
                .map(|c| c.chars().next().unwrap())
                .collect()
        })
        .collect()
}

#[test]
fn ascii_examples() {
    let c = catalog();
    let u0 = Diagram::of(c.get("U0").unwrap(), LatticeBox::new(2));
    assert!(grid_rows(&render_ascii(&u0)).iter().flatten().all(|&g| g == '>'));

    let id = c.get("U0").unwrap().compose(c.get("U0^-1").unwrap());
    let id = Diagram::of(&id, LatticeBox::new(2));
    assert!(grid_rows(&render_ascii(&id)).iter().flatten().all(|&g| g == '•'));

    let adj = Diagram::of(c.get("W+(U2,U0)*").unwrap(), LatticeBox::new(4));
    let rows = grid_rows(&render_ascii(&adj));
    // rows are printed from j = 4 down; column index is x + 4
    assert_eq!(rows[4 - 3][2 + 4], '∅');
}

#[test]
fn u1_deflects_along_two_diagonals() {
    let d = Diagram::of(catalog().get("U1").unwrap(), LatticeBox::new(4));
    let rows = grid_rows(&render_ascii(&d));
    for j in 0..=4i64 {
        for x in -4..=4i64 {
            let g = rows[(4 - j) as usize][(x + 4) as usize];
            if x == -j - 1 {
                assert_eq!(g, '↗', "({x},{j})");
            } else if x == -j && j > 0 {
                assert_eq!(g, '↘', "({x},{j})");
            } else {
                assert_eq!(g, '>', "({x},{j})");
            }
        }
    }
}

#[test]
fn scattering_diagram_is_all_vertical() {
    let c = catalog();
    let spec = WindowSpec::new(4, 4).unwrap();
    let s = scattering_operator(
        Pair::from_catalog(&c, "U1", "U0").unwrap(),
        spec,
        WaveSettings::default(),
    )
    .unwrap();
    let d = Diagram::of(&s, spec.window());
    let svg = render_svg(&d, &DiagramSpec::default());
    assert_eq!(svg.matches("class=\"arrow\"").count(), spec.window().len());
    assert_eq!(svg.matches("class=\"fixed\"").count(), 0);
    for (from, mark) in &parse_svg(&svg).unwrap().marks {
        assert_eq!(*mark, Mark::Image(Some(Site::at(from.x(), from.j() + 1))));
    }
}

#[test]
fn empty_diagram_has_only_site_dots() {
    let d = Diagram::empty("nothing", LatticeBox::new(3));
    let svg = render_svg(&d, &DiagramSpec::default());
    assert_eq!(svg.matches("class=\"site\"").count(), LatticeBox::new(3).len());
    for class in ["fixed", "arrow", "zero", "unknown"] {
        assert!(!svg.contains(&format!("class=\"{class}\"")), "{class}");
    }
    let back = parse_svg(&svg).unwrap();
    assert!(back.marks.is_empty());
    assert_eq!(back.name, "nothing");
}

#[test]
fn every_figure_operator_round_trips() {
    let c = catalog();
    let window = LatticeBox::new(6);
    for name in FIGURE_OPERATORS {
        let d = Diagram::of(c.get(name).unwrap(), window);
        let svg = render_svg(&d, &DiagramSpec::default());
        assert_eq!(svg, render_svg(&d, &DiagramSpec::default()));
        assert_eq!(parse_svg(&svg).unwrap(), d, "{name}");
        let text = render_ascii(&d);
        assert_eq!(parse_ascii(&text).unwrap(), d, "{name}");
    }
}

#[test]
fn wold_overlay_keeps_the_arrows() {
    let c = catalog();
    let spec = WindowSpec::new(5, 4).unwrap();
    let t = Table::tabulate(c.get("W+(U2,U0)").unwrap(), spec).unwrap();
    let report = wold_decompose(&t).unwrap();
    let d = Diagram::of(&t, spec.window());
    let svg = render_wold_svg(&d, &report, &DiagramSpec { cell: 30 });
    assert_eq!(parse_svg(&svg).unwrap(), d);
}

#[test]
fn file_names() {
    assert_eq!(sanitize("W+(U1,U0)"), "Wplus_U1_U0");
    assert_eq!(sanitize("W+(U2,U0)*"), "Wplus_U2_U0_adj");
    assert_eq!(sanitize("U1^-1"), "U1inv");
    assert_eq!(figure_file_name("S(U1,U0)", 6), "fig_S_U1_U0_6.svg");
}

#[test]
fn malformed_svg_is_rejected() {
    assert!(parse_svg("<g></g>").is_err());
    let d = Diagram::of(catalog().get("U0").unwrap(), LatticeBox::new(1));
    let svg = render_svg(&d, &DiagramSpec::default());
    let doubled = svg.replacen("<line", "<circle class=\"fixed\" cx=\"0\" cy=\"0\"/>\n<line", 1);
    let first_arrow = doubled.lines().find(|l| l.starts_with("<line")).unwrap().to_string();
    let twice = doubled.replacen(&first_arrow, &format!("{first_arrow}\n{first_arrow}"), 1);
    assert!(parse_svg(&twice).is_err());
}

fn diagram_strategy() -> impl Strategy<Value = Diagram> {
    (1i64..=4).prop_flat_map(|r| {
        let n = LatticeBox::new(r).len();
        let mark = prop_oneof![
            3 => ((-r - 2)..=(r + 2), 0..=(r + 2)).prop_map(|(x, j)| Mark::Image(Some(Site::at(x, j)))),
            1 => Just(Mark::Image(None)),
            1 => Just(Mark::Unknown),
        ];
        prop::collection::vec(prop::option::of(mark), n).prop_map(move |marks| {
            let window = LatticeBox::new(r);
            let mut d = Diagram::empty("random", window);
            for (s, m) in window.sites().into_iter().zip(marks) {
                if let Some(m) = m {
                    d.marks.insert(s, m);
                }
            }
            d
        })
    })
}

proptest! {
    #[test]
    fn svg_round_trip(d in diagram_strategy(), cell in 4i64..=40) {
        let svg = render_svg(&d, &DiagramSpec { cell });
        prop_assert_eq!(parse_svg(&svg).unwrap(), d);
    }

    #[test]
    fn ascii_round_trip(d in diagram_strategy()) {
        prop_assert_eq!(parse_ascii(&render_ascii(&d)).unwrap(), d);
    }

    #[test]
    fn table_round_trip_through_entries(d in diagram_strategy()) {
        let entries: Vec<TableEntry> = d.entries();
        let json = serde_json::to_string(&entries).unwrap();
        let back: Vec<TableEntry> = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, entries);
    }
}
