//! Arrow diagrams: an arrow from `(x,j)` to `(y,k)` for `A δ_{x,j} = δ_{y,k}`,
//! a dot where `A δ_{x,j} = δ_{x,j}`, a cross where `A δ_{x,j} = 0`.
//!
//! Both the text and the SVG form parse back into the same [`Diagram`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Site;
use crate::operator::BasisMap;
use crate::table::TableEntry;
use crate::window::LatticeBox;
use crate::wold::{OrbitClass, WoldReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mark {
    Image(Option<Site>),
    /// The image could not be determined.
    Unknown,
}

/// What a diagram shows: the mark at each drawn site of a window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    pub name: String,
    pub window: LatticeBox,
    pub marks: BTreeMap<Site, Mark>,
}

impl Diagram {
    pub fn empty(name: impl Into<String>, window: LatticeBox) -> Self {
        Diagram {
            name: name.into(),
            window,
            marks: BTreeMap::new(),
        }
    }

    /// Evaluates `op` on every window site; failures become [`Mark::Unknown`].
    pub fn of<M: BasisMap + ?Sized>(op: &M, window: LatticeBox) -> Self {
        let marks = window
            .sites()
            .into_iter()
            .map(|s| (s, op.image(s).map_or(Mark::Unknown, Mark::Image)))
            .collect();
        Diagram {
            name: op.label(),
            window,
            marks,
        }
    }

    pub fn entries(&self) -> Vec<TableEntry> {
        self.marks
            .iter()
            .filter_map(|(&from, m)| match m {
                Mark::Image(to) => Some(TableEntry { from, to: *to }),
                Mark::Unknown => None,
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramSpec {
    /// Pixels per lattice step.
    pub cell: i64,
}

impl Default for DiagramSpec {
    fn default() -> Self {
        DiagramSpec { cell: 24 }
    }
}

fn glyph(from: Site, mark: Mark) -> char {
    match mark {
        Mark::Unknown => '?',
        Mark::Image(None) => '∅',
        Mark::Image(Some(t)) => match (t.x() - from.x(), t.j() - from.j()) {
            (0, 0) => '•',
            (1, 0) => '>',
            (-1, 0) => '<',
            (0, 1) => '^',
            (0, -1) => 'v',
            (1, 1) => '↗',
            (-1, 1) => '↖',
            (1, -1) => '↘',
            (-1, -1) => '↙',
            _ => '*',
        },
    }
}

fn unit_step(c: char) -> Option<(i64, i64)> {
    Some(match c {
        '•' => (0, 0),
        '>' => (1, 0),
        '<' => (-1, 0),
        '^' => (0, 1),
        'v' => (0, -1),
        '↗' => (1, 1),
        '↖' => (-1, 1),
        '↘' => (1, -1),
        '↙' => (-1, -1),
        _ => return None,
    })
}

/// Rows from top to bottom, `·` for undrawn sites, then a legend for `*`.
pub fn render_ascii(d: &Diagram) -> String {
    let r = d.window.radius;
    let mut out = format!("# {} R={}\n", d.name, r);
    let mut legend = Vec::new();
    for j in (0..=r).rev() {
        let _ = write!(out, "{j:>3} |");
        for x in -r..=r {
            let s = Site::at(x, j);
            let c = match d.marks.get(&s) {
                None => '·',
                Some(&m) => glyph(s, m),
            };
            if c == '*' {
                if let Some(Mark::Image(Some(t))) = d.marks.get(&s) {
                    legend.push(format!("{s} -> {t}"));
                }
            }
            out.push(' ');
            out.push(c);
        }
        out.push('\n');
    }
    let _ = writeln!(out, "    +{}", "--".repeat((2 * r + 1) as usize));
    let _ = writeln!(out, "     x from {} to {}", -r, r);
    if !legend.is_empty() {
        out.push_str("legend:\n");
        for l in legend {
            let _ = writeln!(out, "  {l}");
        }
    }
    out
}

fn parse_site(text: &str) -> Result<Site> {
    let t = text.trim().trim_start_matches('(').trim_end_matches(')');
    let (a, b) = t
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("not a site: {text}")))?;
    let x = a.trim().parse().map_err(|_| Error::Parse(format!("bad x in {text}")))?;
    let j = b.trim().parse().map_err(|_| Error::Parse(format!("bad j in {text}")))?;
    Site::new(x, j).map_err(|_| Error::Parse(format!("negative row in {text}")))
}

pub fn parse_ascii(text: &str) -> Result<Diagram> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .and_then(|h| h.strip_prefix("# "))
        .ok_or_else(|| Error::Parse("missing header".into()))?;
    let (name, r) = header
        .rsplit_once(" R=")
        .ok_or_else(|| Error::Parse("header lacks radius".into()))?;
    let r: i64 = r.parse().map_err(|_| Error::Parse("bad radius".into()))?;
    let window = LatticeBox::new(r);
    let mut marks = BTreeMap::new();
    let mut jumps = Vec::new();
    let mut in_legend = false;
    for line in lines {
        if in_legend {
            let (a, b) = line
                .trim()
                .split_once(" -> ")
                .ok_or_else(|| Error::Parse(format!("bad legend line: {line}")))?;
            marks.insert(parse_site(a)?, Mark::Image(Some(parse_site(b)?)));
            continue;
        }
        if line == "legend:" {
            in_legend = true;
            continue;
        }
        let Some((label, cells)) = line.split_once(" |") else {
            continue;
        };
        let j: i64 = label
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad row label: {line}")))?;
        let glyphs: Vec<char> = cells.chars().filter(|c| *c != ' ').collect();
        if glyphs.len() != (2 * r + 1) as usize {
            return Err(Error::Parse(format!("row {j} has {} cells", glyphs.len())));
        }
        for (x, c) in (-r..=r).zip(glyphs) {
            let s = Site::at(x, j);
            let mark = match c {
                '·' => continue,
                '?' => Mark::Unknown,
                '∅' => Mark::Image(None),
                '*' => {
                    jumps.push(s);
                    continue;
                }
                c => {
                    let (dx, dj) = unit_step(c).ok_or_else(|| Error::Parse(format!("unknown glyph {c}")))?;
                    Mark::Image(Some(
                        s.offset(dx, dj)
                            .map_err(|_| Error::Parse(format!("glyph {c} at {s}")))?,
                    ))
                }
            };
            marks.insert(s, mark);
        }
    }
    if let Some(s) = jumps.iter().find(|s| !marks.contains_key(s)) {
        return Err(Error::Parse(format!("jump at {s} missing from legend")));
    }
    Ok(Diagram {
        name: name.to_string(),
        window,
        marks,
    })
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn unescape(text: &str) -> String {
    text.replace("&quot;", "\"")
        .replace("&gt;", ">")
        .replace("&lt;", "<")
        .replace("&amp;", "&")
}

struct Canvas {
    r: i64,
    cell: i64,
}

impl Canvas {
    fn at(&self, s: Site) -> (i64, i64) {
        ((s.x() + self.r) * self.cell, (self.r - s.j()) * self.cell)
    }

    fn site(&self, px: i64, py: i64) -> Result<Site> {
        if px % self.cell != 0 || py % self.cell != 0 {
            return Err(Error::Parse(format!("({px},{py}) is not on the grid")));
        }
        Site::new(px / self.cell - self.r, self.r - py / self.cell)
            .map_err(|_| Error::Parse(format!("({px},{py}) lies below the boundary row")))
    }
}

const STYLE: &str = "circle.site{fill:none;stroke:#999;stroke-width:1}\
circle.fixed{fill:#000}\
line.arrow{stroke:#000;stroke-width:1.5}\
path.zero{stroke:#c00;stroke-width:2}\
text.unknown{fill:#c60;font:bold 12px sans-serif;text-anchor:middle}\
circle.orbit{stroke:none;opacity:0.35}\
.fixedpoint{fill:#888}.cycle{fill:#2a7}.generator{fill:#d22}.ray{fill:#f90}.indeterminate{fill:#66f}";

fn render_svg_inner(d: &Diagram, spec: &DiagramSpec, wold: Option<&WoldReport>) -> String {
    let r = d.window.radius;
    let c = spec.cell;
    let canvas = Canvas { r, cell: c };
    let (w, h) = ((2 * r + 2) * c, (r + 2) * c);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"{} {} {w} {h}\" data-operator=\"{}\" data-radius=\"{r}\" data-cell=\"{c}\">",
        -c,
        -c,
        escape(&d.name)
    );
    let _ = writeln!(out, "<title>{}</title>", escape(&d.name));
    let _ = writeln!(
        out,
        "<defs><marker id=\"head\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\"/></marker></defs>"
    );
    let _ = writeln!(out, "<style>{STYLE}</style>");
    let dot = (c / 12).max(1);
    for s in d.window.sites() {
        let (px, py) = canvas.at(s);
        if let Some(class) = wold.and_then(|rep| rep.class_of(s)).map(orbit_class) {
            let _ = writeln!(
                out,
                "<circle class=\"orbit {class}\" cx=\"{px}\" cy=\"{py}\" r=\"{}\"/>",
                c * 2 / 5
            );
        }
        let _ = writeln!(out, "<circle class=\"site\" cx=\"{px}\" cy=\"{py}\" r=\"{dot}\"/>");
        match d.marks.get(&s) {
            None => {}
            Some(Mark::Unknown) => {
                let _ = writeln!(out, "<text class=\"unknown\" x=\"{px}\" y=\"{py}\">?</text>");
            }
            Some(Mark::Image(None)) => {
                let k = c / 4;
                let _ = writeln!(
                    out,
                    "<path class=\"zero\" d=\"M{} {} L{} {} M{} {} L{} {}\"/>",
                    px - k,
                    py - k,
                    px + k,
                    py + k,
                    px - k,
                    py + k,
                    px + k,
                    py - k
                );
            }
            Some(Mark::Image(Some(t))) if *t == s => {
                let _ = writeln!(
                    out,
                    "<circle class=\"fixed\" cx=\"{px}\" cy=\"{py}\" r=\"{}\"/>",
                    2 * dot + 1
                );
            }
            Some(Mark::Image(Some(t))) => {
                let (qx, qy) = canvas.at(*t);
                let _ = writeln!(
                    out,
                    "<line class=\"arrow\" x1=\"{px}\" y1=\"{py}\" x2=\"{qx}\" y2=\"{qy}\" marker-end=\"url(#head)\"/>"
                );
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

fn orbit_class(c: OrbitClass) -> &'static str {
    match c {
        OrbitClass::FixedPoint => "fixedpoint",
        OrbitClass::CycleMember { .. } => "cycle",
        OrbitClass::WanderingGenerator => "generator",
        OrbitClass::ShiftRayMember { .. } => "ray",
        OrbitClass::BoundaryIndeterminate => "indeterminate",
    }
}

/// Deterministic SVG 1.1; elements follow the `(j, x)` order of their sites.
pub fn render_svg(d: &Diagram, spec: &DiagramSpec) -> String {
    render_svg_inner(d, spec, None)
}

/// As [`render_svg`], with a coloured disc under each site for its orbit class.
pub fn render_wold_svg(d: &Diagram, report: &WoldReport, spec: &DiagramSpec) -> String {
    render_svg_inner(d, spec, Some(report))
}

fn attributes(tag: &str) -> BTreeMap<&str, &str> {
    let mut out = BTreeMap::new();
    let mut rest = tag;
    while let Some(eq) = rest.find("=\"") {
        let name = rest[..eq].rsplit(|c: char| c.is_whitespace()).next().unwrap_or("");
        let after = &rest[eq + 2..];
        let Some(end) = after.find('"') else { break };
        out.insert(name, &after[..end]);
        rest = &after[end + 1..];
    }
    out
}

fn int_attr(attrs: &BTreeMap<&str, &str>, name: &str) -> Result<i64> {
    attrs
        .get(name)
        .ok_or_else(|| Error::Parse(format!("missing attribute {name}")))?
        .parse()
        .map_err(|_| Error::Parse(format!("attribute {name} is not an integer")))
}

/// Recovers the diagram from the element geometry of [`render_svg`] output.
pub fn parse_svg(svg: &str) -> Result<Diagram> {
    let root = svg
        .lines()
        .find(|l| l.starts_with("<svg"))
        .ok_or_else(|| Error::Parse("no svg element".into()))?;
    let attrs = attributes(root);
    let r = int_attr(&attrs, "data-radius")?;
    let cell = int_attr(&attrs, "data-cell")?;
    if cell <= 0 {
        return Err(Error::Parse("cell size must be positive".into()));
    }
    let name = unescape(attrs.get("data-operator").copied().unwrap_or(""));
    let canvas = Canvas { r, cell };
    let mut marks = BTreeMap::new();
    for line in svg.lines() {
        let a = attributes(line);
        let class = a.get("class").copied().unwrap_or("");
        let (site, mark) = if line.starts_with("<circle") && class == "fixed" {
            let s = canvas.site(int_attr(&a, "cx")?, int_attr(&a, "cy")?)?;
            (s, Mark::Image(Some(s)))
        } else if line.starts_with("<line") && class == "arrow" {
            let s = canvas.site(int_attr(&a, "x1")?, int_attr(&a, "y1")?)?;
            let t = canvas.site(int_attr(&a, "x2")?, int_attr(&a, "y2")?)?;
            (s, Mark::Image(Some(t)))
        } else if line.starts_with("<path") && class == "zero" {
            let d = a
                .get("d")
                .ok_or_else(|| Error::Parse("zero mark without path".into()))?;
            let nums: Vec<i64> = d
                .split(|c: char| c == 'M' || c == 'L' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad path {d}"))))
                .collect::<Result<_>>()?;
            if nums.len() != 8 {
                return Err(Error::Parse(format!("bad zero mark {d}")));
            }
            let s = canvas.site((nums[0] + nums[2]) / 2, (nums[1] + nums[3]) / 2)?;
            (s, Mark::Image(None))
        } else if line.starts_with("<text") && class == "unknown" {
            (canvas.site(int_attr(&a, "x")?, int_attr(&a, "y")?)?, Mark::Unknown)
        } else {
            continue;
        };
        if marks.insert(site, mark).is_some() {
            return Err(Error::Parse(format!("two marks at {site}")));
        }
    }
    Ok(Diagram {
        name,
        window: LatticeBox::new(r),
        marks,
    })
}

/// `fig_<operator>_<R>.svg` with the operator name reduced to `[A-Za-z0-9_]`.
pub fn figure_file_name(operator: &str, radius: i64) -> String {
    format!("fig_{}_{radius}.svg", sanitize(operator))
}

pub fn sanitize(operator: &str) -> String {
    let mut out = String::new();
    for c in operator.chars() {
        match c {
            '+' => out.push_str("plus"),
            '-' => out.push_str("minus"),
            '*' => {
                if !out.ends_with('_') {
                    out.push('_');
                }
                out.push_str("adj");
            }
            '^' => {}
            c if c.is_ascii_alphanumeric() => out.push(c),
            _ => {
                if !out.ends_with('_') {
                    out.push('_');
                }
            }
        }
    }
    let out = out.replace("minus1", "inv");
    out.trim_matches('_').to_string()
}
