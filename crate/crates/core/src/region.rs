//! Case conditions for piecewise operators.
//!
//! A [`Region`] is a boolean combination of integer-linear constraints in the
//! site coordinates `x` and `j`. Regions can be pulled back along affine site
//! maps, which is what symbolic composition and inversion of operators need.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::action::AffineMap;
use crate::lattice::Site;

/// `cx·x + cj·j + c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Lin {
    pub cx: i64,
    pub cj: i64,
    pub c: i64,
}

pub const X: Lin = Lin { cx: 1, cj: 0, c: 0 };
pub const J: Lin = Lin { cx: 0, cj: 1, c: 0 };

impl Lin {
    pub const fn constant(c: i64) -> Self {
        Lin { cx: 0, cj: 0, c }
    }

    #[inline]
    pub fn eval(&self, x: i64, j: i64) -> i64 {
        self.cx * x + self.cj * j + self.c
    }

    #[inline]
    pub fn at(&self, s: Site) -> i64 {
        self.eval(s.x(), s.j())
    }

    pub fn is_constant(&self) -> bool {
        self.cx == 0 && self.cj == 0
    }

    /// Substitutes the coordinates of `map` for `x` and `j`.
    pub fn pullback(&self, map: &AffineMap) -> Lin {
        map.x * self.cx + map.j * self.cj + Lin::constant(self.c)
    }
}

impl From<i64> for Lin {
    fn from(c: i64) -> Self {
        Lin::constant(c)
    }
}

impl Add for Lin {
    type Output = Lin;
    fn add(self, o: Lin) -> Lin {
        Lin {
            cx: self.cx + o.cx,
            cj: self.cj + o.cj,
            c: self.c + o.c,
        }
    }
}

impl Add<i64> for Lin {
    type Output = Lin;
    fn add(self, o: i64) -> Lin {
        self + Lin::constant(o)
    }
}

impl Sub for Lin {
    type Output = Lin;
    fn sub(self, o: Lin) -> Lin {
        self + (-o)
    }
}

impl Sub<i64> for Lin {
    type Output = Lin;
    fn sub(self, o: i64) -> Lin {
        self + Lin::constant(-o)
    }
}

impl Neg for Lin {
    type Output = Lin;
    fn neg(self) -> Lin {
        Lin {
            cx: -self.cx,
            cj: -self.cj,
            c: -self.c,
        }
    }
}

impl Mul<i64> for Lin {
    type Output = Lin;
    fn mul(self, k: i64) -> Lin {
        Lin {
            cx: self.cx * k,
            cj: self.cj * k,
            c: self.c * k,
        }
    }
}

impl fmt::Display for Lin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (coef, var) in [(self.cx, "x"), (self.cj, "j")] {
            if coef == 0 {
                continue;
            }
            let sign = if coef < 0 {
                "-"
            } else if out.is_empty() {
                ""
            } else {
                "+"
            };
            let mag = coef.abs();
            if mag == 1 {
                out.push_str(&format!("{sign}{var}"));
            } else {
                out.push_str(&format!("{sign}{mag}{var}"));
            }
        }
        if self.c != 0 || out.is_empty() {
            if out.is_empty() {
                out.push_str(&self.c.to_string());
            } else if self.c > 0 {
                out.push_str(&format!("+{}", self.c));
            } else {
                out.push_str(&self.c.to_string());
            }
        }
        f.write_str(&out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rel {
    Eq,
    Ne,
    /// `lin >= 0`
    Ge,
}

/// `lin rel 0`
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub lin: Lin,
    pub rel: Rel,
}

impl Atom {
    #[inline]
    pub fn holds(&self, s: Site) -> bool {
        let v = self.lin.at(s);
        match self.rel {
            Rel::Eq => v == 0,
            Rel::Ne => v != 0,
            Rel::Ge => v >= 0,
        }
    }

    fn negated(self) -> Atom {
        match self.rel {
            Rel::Eq => Atom { rel: Rel::Ne, ..self },
            Rel::Ne => Atom { rel: Rel::Eq, ..self },
            // !(v >= 0)  <=>  -v - 1 >= 0
            Rel::Ge => Atom {
                lin: -self.lin - 1,
                rel: Rel::Ge,
            },
        }
    }

    fn constant_value(&self) -> Option<bool> {
        if !self.lin.is_constant() {
            return None;
        }
        let v = self.lin.c;
        Some(match self.rel {
            Rel::Eq => v == 0,
            Rel::Ne => v != 0,
            Rel::Ge => v >= 0,
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = self.constant_value() {
            return write!(f, "{v}");
        }
        // Solve for x when it has a unit coefficient, else for j, else print raw.
        let Lin { cx, cj, c } = self.lin;
        let (var, coef, rest) = if cx.abs() == 1 {
            ("x", cx, Lin { cx: 0, cj, c })
        } else if cx == 0 && cj.abs() == 1 {
            ("j", cj, Lin::constant(c))
        } else {
            let op = match self.rel {
                Rel::Eq => "=",
                Rel::Ne => "!=",
                Rel::Ge => ">=",
            };
            return write!(f, "{} {op} 0", self.lin);
        };
        // coef·var + rest  rel 0   =>   var rel' -rest/coef
        let rhs = rest * -coef;
        let op = match (self.rel, coef > 0) {
            (Rel::Eq, _) => "=",
            (Rel::Ne, _) => "!=",
            (Rel::Ge, true) => ">=",
            (Rel::Ge, false) => "<=",
        };
        write!(f, "{var} {op} {rhs}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    True,
    False,
    Atom(Atom),
    All(Vec<Region>),
    Any(Vec<Region>),
    Not(Box<Region>),
}

pub fn eq(a: impl Into<Lin>, b: impl Into<Lin>) -> Region {
    Region::Atom(Atom {
        lin: a.into() - b.into(),
        rel: Rel::Eq,
    })
}

pub fn ne(a: impl Into<Lin>, b: impl Into<Lin>) -> Region {
    Region::Atom(Atom {
        lin: a.into() - b.into(),
        rel: Rel::Ne,
    })
}

pub fn ge(a: impl Into<Lin>, b: impl Into<Lin>) -> Region {
    Region::Atom(Atom {
        lin: a.into() - b.into(),
        rel: Rel::Ge,
    })
}

pub fn le(a: impl Into<Lin>, b: impl Into<Lin>) -> Region {
    ge(b, a)
}

pub fn gt(a: impl Into<Lin>, b: impl Into<Lin>) -> Region {
    ge(a.into() - 1, b)
}

pub fn lt(a: impl Into<Lin>, b: impl Into<Lin>) -> Region {
    gt(b, a)
}

pub fn all<I: IntoIterator<Item = Region>>(parts: I) -> Region {
    Region::All(parts.into_iter().collect())
}

pub fn any<I: IntoIterator<Item = Region>>(parts: I) -> Region {
    Region::Any(parts.into_iter().collect())
}

pub fn not(r: Region) -> Region {
    Region::Not(Box::new(r))
}

/// `(x, j) = (px, pj)`
pub fn point(px: i64, pj: i64) -> Region {
    all([eq(X, px), eq(J, pj)])
}

impl Region {
    pub fn contains(&self, s: Site) -> bool {
        match self {
            Region::True => true,
            Region::False => false,
            Region::Atom(a) => a.holds(s),
            Region::All(rs) => rs.iter().all(|r| r.contains(s)),
            Region::Any(rs) => rs.iter().any(|r| r.contains(s)),
            Region::Not(r) => !r.contains(s),
        }
    }

    pub fn pullback(&self, map: &AffineMap) -> Region {
        match self {
            Region::True => Region::True,
            Region::False => Region::False,
            Region::Atom(a) => Region::Atom(Atom {
                lin: a.lin.pullback(map),
                rel: a.rel,
            }),
            Region::All(rs) => Region::All(rs.iter().map(|r| r.pullback(map)).collect()),
            Region::Any(rs) => Region::Any(rs.iter().map(|r| r.pullback(map)).collect()),
            Region::Not(r) => Region::Not(Box::new(r.pullback(map))),
        }
    }

    /// Folds constant atoms, flattens nested connectives and pushes negation
    /// into atoms where possible. Membership is unchanged.
    pub fn simplify(&self) -> Region {
        match self {
            Region::True | Region::False => self.clone(),
            Region::Atom(a) => match a.constant_value() {
                Some(true) => Region::True,
                Some(false) => Region::False,
                None => self.clone(),
            },
            Region::All(rs) => {
                let mut out = Vec::new();
                for r in rs {
                    match r.simplify() {
                        Region::True => {}
                        Region::False => return Region::False,
                        Region::All(inner) => out.extend(inner),
                        other => {
                            if !out.contains(&other) {
                                out.push(other)
                            }
                        }
                    }
                }
                match out.len() {
                    0 => Region::True,
                    1 => out.pop().unwrap(),
                    _ => Region::All(out),
                }
            }
            Region::Any(rs) => {
                let mut out = Vec::new();
                for r in rs {
                    match r.simplify() {
                        Region::False => {}
                        Region::True => return Region::True,
                        Region::Any(inner) => out.extend(inner),
                        other => {
                            if !out.contains(&other) {
                                out.push(other)
                            }
                        }
                    }
                }
                match out.len() {
                    0 => Region::False,
                    1 => out.pop().unwrap(),
                    _ => Region::Any(out),
                }
            }
            Region::Not(r) => match r.simplify() {
                Region::True => Region::False,
                Region::False => Region::True,
                Region::Atom(a) => Region::Atom(a.negated()),
                Region::Not(inner) => *inner,
                other => Region::Not(Box::new(other)),
            },
        }
    }

    /// Linear forms `L` with `L = 0` required at top level (through nested conjunctions).
    pub fn equalities(&self) -> Vec<Lin> {
        match self {
            Region::Atom(Atom { lin, rel: Rel::Eq }) => vec![*lin],
            Region::All(rs) => rs.iter().flat_map(|r| r.equalities()).collect(),
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(f: &mut fmt::Formatter<'_>, rs: &[Region], sep: &str) -> fmt::Result {
            for (i, r) in rs.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                match r {
                    Region::All(_) | Region::Any(_) => write!(f, "({r})")?,
                    _ => write!(f, "{r}")?,
                }
            }
            Ok(())
        }
        match self {
            Region::True => f.write_str("true"),
            Region::False => f.write_str("false"),
            Region::Atom(a) => write!(f, "{a}"),
            Region::All(rs) if rs.is_empty() => f.write_str("true"),
            Region::Any(rs) if rs.is_empty() => f.write_str("false"),
            Region::All(rs) => join(f, rs, " && "),
            Region::Any(rs) => join(f, rs, " || "),
            Region::Not(r) => write!(f, "!({r})"),
        }
    }
}
