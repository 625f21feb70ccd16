//! Piecewise-affine basis maps on the half-space lattice.
//!
//! A [`RuleOperator`] sends each basis vector `δ_s` either to a single basis
//! vector with coefficient 1 or to zero. Its pieces are tried in order; the
//! first region that contains the site decides the action, and the fallback
//! handles everything else. [`RuleOperator::validate`] checks that any
//! overlapping pieces agree, so the order is a convenience rather than part of
//! the meaning.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::action::{Action, AffineMap};
use crate::error::{Error, Result};
use crate::lattice::{Scalar, Site, StateVector};
use crate::region::{all, eq, ge, not, point, Lin, Region, J, X};
use crate::window::{LatticeBox, WindowSpec};

/// Anything that maps basis vectors to basis vectors or to zero.
pub trait BasisMap: Sync {
    fn label(&self) -> String;

    /// `Ok(None)` means the basis vector is annihilated.
    fn image(&self, s: Site) -> Result<Option<Site>>;

    fn apply(&self, f: &StateVector) -> Result<StateVector> {
        let mut out = StateVector::zero();
        for (s, c) in f.iter() {
            if let Some(t) = self.image(s)? {
                out.add_term(t, c);
            }
        }
        Ok(out)
    }
}

impl<T: BasisMap + ?Sized> BasisMap for &T {
    fn label(&self) -> String {
        (**self).label()
    }
    fn image(&self, s: Site) -> Result<Option<Site>> {
        (**self).image(s)
    }
}

/// `A^n δ_s`, stopping early once the vector is annihilated.
pub fn iterate<M: BasisMap + ?Sized>(op: &M, s: Site, n: usize) -> Result<Option<Site>> {
    let mut cur = s;
    for _ in 0..n {
        match op.image(cur)? {
            Some(t) => cur = t,
            None => return Ok(None),
        }
    }
    Ok(Some(cur))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub when: Region,
    pub send: Action,
}

impl Piece {
    pub fn new(when: Region, send: Action) -> Self {
        Piece { when, send }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleOperator {
    name: String,
    pieces: Vec<Piece>,
    fallback: Action,
}

/// Text form of one piece, as written to operator description files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceText {
    pub when: String,
    pub send: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorDescription {
    pub name: String,
    pub pieces: Vec<PieceText>,
}

impl RuleOperator {
    pub fn new(name: impl Into<String>, pieces: Vec<Piece>, fallback: Action) -> Self {
        RuleOperator {
            name: name.into(),
            pieces,
            fallback,
        }
    }

    pub fn identity(name: impl Into<String>) -> Self {
        RuleOperator::new(name, Vec::new(), Action::identity())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn fallback(&self) -> Action {
        self.fallback
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Returns a copy with `piece` tried before every existing piece.
    pub fn with_leading_piece(&self, piece: Piece) -> Self {
        let mut pieces = Vec::with_capacity(self.pieces.len() + 1);
        pieces.push(piece);
        pieces.extend(self.pieces.iter().cloned());
        RuleOperator::new(self.name.clone(), pieces, self.fallback)
    }

    fn action_at(&self, s: Site) -> (Option<usize>, &Action) {
        for (i, p) in self.pieces.iter().enumerate() {
            if p.when.contains(s) {
                return (Some(i), &p.send);
            }
        }
        (None, &self.fallback)
    }

    fn piece_text(&self, idx: Option<usize>) -> String {
        match idx {
            Some(i) => format!("{} -> {}", self.pieces[i].when, self.pieces[i].send),
            None => format!("otherwise -> {}", self.fallback),
        }
    }

    pub fn image_of(&self, s: Site) -> Result<Option<Site>> {
        let (idx, action) = self.action_at(s);
        match action.eval(s) {
            None => Ok(None),
            Some((x, j)) if j >= 0 => Ok(Some(Site::at(x, j))),
            Some(_) => Err(Error::RuleDefinition {
                op: self.name.clone(),
                piece: self.piece_text(idx),
                site: s,
            }),
        }
    }

    /// Checks on every site of `window` that all pieces containing the site
    /// produce the same image, and that no image leaves the half-space.
    pub fn validate(&self, window: &LatticeBox) -> Result<()> {
        for s in window.sites() {
            let chosen = self.image_of(s)?;
            let chosen_idx = self.action_at(s).0;
            for (i, p) in self.pieces.iter().enumerate() {
                if Some(i) == chosen_idx || !p.when.contains(s) {
                    continue;
                }
                let other = p.send.eval(s);
                let first = chosen.map(|t| (t.x(), t.j()));
                if other != first {
                    return Err(Error::OverlapConflict {
                        op: self.name.clone(),
                        site: s,
                        first: self.piece_text(chosen_idx),
                        second: self.piece_text(Some(i)),
                    });
                }
            }
        }
        Ok(())
    }

    /// Pieces with pairwise disjoint regions covering the whole lattice,
    /// including the fallback as a last piece.
    pub fn effective_pieces(&self) -> Vec<Piece> {
        let mut out = Vec::with_capacity(self.pieces.len() + 1);
        let mut earlier: Vec<Region> = Vec::new();
        for p in &self.pieces {
            let mut parts = vec![p.when.clone()];
            parts.extend(earlier.iter().cloned().map(not));
            let when = all(parts).simplify();
            if when != Region::False {
                out.push(Piece::new(when, p.send));
            }
            earlier.push(p.when.clone());
        }
        let rest = all(earlier.into_iter().map(not)).simplify();
        if rest != Region::False {
            out.push(Piece::new(rest, self.fallback));
        }
        out
    }

    /// Symbolic product `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &RuleOperator) -> RuleOperator {
        let name = format!("{}·{}", self.name, inner.name);
        let outer = self.effective_pieces();
        let mut pieces = Vec::new();
        for p in inner.effective_pieces() {
            match p.send {
                Action::Zero => pieces.push(p),
                Action::Map(m) => {
                    for q in &outer {
                        let when = all([p.when.clone(), q.when.pullback(&m)]).simplify();
                        if when == Region::False {
                            continue;
                        }
                        pieces.push(Piece::new(when, q.send.after(&p.send)));
                    }
                }
            }
        }
        RuleOperator::new(name, pieces, Action::Zero)
    }

    /// Symbolic adjoint: every piece is inverted on its image, and sites
    /// outside the range are annihilated. The result is cross-checked against
    /// a brute-force inverse over the domain of `spec`.
    pub fn adjoint(&self, spec: &WindowSpec) -> Result<RuleOperator> {
        let mut pieces = Vec::new();
        for p in self.effective_pieces() {
            match invert_piece(&p) {
                Some(Some(inv)) => pieces.push(inv),
                Some(None) => {}
                None => {
                    return Err(Error::SymbolicInverse {
                        op: self.name.clone(),
                        piece: format!("{} -> {}", p.when, p.send),
                    })
                }
            }
        }
        let adj = RuleOperator::new(format!("{}*", self.name), pieces, Action::Zero);
        cross_check_adjoint(self, &adj, spec)?;
        Ok(adj)
    }

    pub fn describe(&self) -> OperatorDescription {
        let mut pieces: Vec<PieceText> = self
            .pieces
            .iter()
            .map(|p| PieceText {
                when: p.when.to_string(),
                send: p.send.to_string(),
            })
            .collect();
        pieces.push(PieceText {
            when: "otherwise".into(),
            send: self.fallback.to_string(),
        });
        OperatorDescription {
            name: self.name.clone(),
            pieces,
        }
    }
}

impl BasisMap for RuleOperator {
    fn label(&self) -> String {
        self.name.clone()
    }

    fn image(&self, s: Site) -> Result<Option<Site>> {
        self.image_of(s)
    }
}

/// Lazily evaluated product; `factors[0]` is applied last.
pub struct Product<'a> {
    factors: Vec<&'a dyn BasisMap>,
}

impl<'a> Product<'a> {
    pub fn new(factors: Vec<&'a dyn BasisMap>) -> Self {
        Product { factors }
    }
}

impl BasisMap for Product<'_> {
    fn label(&self) -> String {
        self.factors.iter().map(|f| f.label()).collect::<Vec<_>>().join("·")
    }

    fn image(&self, s: Site) -> Result<Option<Site>> {
        let mut cur = s;
        for f in self.factors.iter().rev() {
            match f.image(cur)? {
                Some(t) => cur = t,
                None => return Ok(None),
            }
        }
        Ok(Some(cur))
    }
}

/// Inverts one disjoint piece on its image. `Some(None)` when the piece
/// contributes nothing to the adjoint, `None` when no symbolic inverse exists.
fn invert_piece(p: &Piece) -> Option<Option<Piece>> {
    let m = match p.send {
        Action::Zero => return Some(None),
        Action::Map(m) => m,
    };
    if let Some(inv) = m.inverse() {
        let when = all([p.when.pullback(&inv), ge(inv.j, 0)]).simplify();
        if when == Region::False {
            return Some(None);
        }
        return Some(Some(Piece::new(when, Action::Map(inv))));
    }

    // Rank-deficient map: the region must pin one coordinate through an
    // equality, which turns the piece into a map of a single parameter.
    let eqs = p.when.equalities();
    for e in &eqs {
        let (param_is_j, param) = if e.cx.abs() == 1 {
            // x = -(cj·j + c)/cx
            (
                true,
                AffineMap::new(
                    Lin {
                        cx: 0,
                        cj: -e.cj * e.cx,
                        c: -e.c * e.cx,
                    },
                    J,
                ),
            )
        } else if e.cj.abs() == 1 {
            (
                false,
                AffineMap::new(
                    X,
                    Lin {
                        cx: -e.cx * e.cj,
                        cj: 0,
                        c: -e.c * e.cj,
                    },
                ),
            )
        } else {
            continue;
        };
        let coef = |l: Lin| if param_is_j { l.cj } else { l.cx };
        let img = m.after(&param);
        let (kx, kj) = (coef(img.x), coef(img.j));

        // t as a function of the image coordinates
        let t = if kx.abs() == 1 {
            Some((X - img.x.c) * kx)
        } else if kj.abs() == 1 {
            Some((J - img.j.c) * kj)
        } else {
            None
        };
        if let Some(t) = t {
            let embed = if param_is_j {
                AffineMap::new(X, t)
            } else {
                AffineMap::new(t, J)
            };
            let source = param.after(&embed);
            let back = m.after(&source);
            let when = all([p.when.pullback(&source), ge(source.j, 0), eq(back.x, X), eq(back.j, J)]).simplify();
            if when == Region::False {
                return Some(None);
            }
            return Some(Some(Piece::new(when, Action::Map(source))));
        }

        if kx == 0 && kj == 0 {
            // Constant image: a second equality must pin the parameter.
            for e2 in &eqs {
                let l = e2.pullback(&param);
                let k = coef(l);
                if k != 0 && l.c % k == 0 {
                    let t0 = -l.c / k;
                    let (sx, sj) = if param_is_j {
                        (param.x.eval(0, t0), t0)
                    } else {
                        (t0, param.j.eval(t0, 0))
                    };
                    if sj < 0 || !p.when.contains(Site::at(sx, sj)) {
                        return Some(None);
                    }
                    let (qx, qj) = m.eval(Site::at(sx, sj));
                    return Some(Some(Piece::new(
                        point(qx, qj),
                        Action::Map(AffineMap::constant(sx, sj)),
                    )));
                }
            }
        }
    }
    None
}

fn cross_check_adjoint(op: &RuleOperator, adj: &RuleOperator, spec: &WindowSpec) -> Result<()> {
    let domain = spec.domain();
    let mut preimage: HashMap<Site, Site> = HashMap::new();
    for s in domain.sites() {
        if let Some(t) = op.image_of(s)? {
            if let Some(prev) = preimage.insert(t, s) {
                return Err(Error::NotInjective {
                    op: op.name.clone(),
                    a: prev,
                    b: s,
                    image: t,
                });
            }
        }
    }
    for s in domain.sites() {
        if let Some(t) = op.image_of(s)? {
            if adj.image_of(t)? != Some(s) {
                return Err(Error::AdjointMismatch {
                    op: op.name.clone(),
                    site: t,
                });
            }
        }
    }
    for t in spec.window().sites() {
        match adj.image_of(t)? {
            Some(s) => {
                if op.image_of(s)? != Some(t) {
                    return Err(Error::AdjointMismatch {
                        op: op.name.clone(),
                        site: t,
                    });
                }
            }
            None => {
                if preimage.contains_key(&t) {
                    return Err(Error::AdjointMismatch {
                        op: op.name.clone(),
                        site: t,
                    });
                }
            }
        }
    }
    Ok(())
}

/// `f ↦ ⟨δ_bra, f⟩ δ_ket` scaled by `sign`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Correction {
    pub sign: i64,
    pub ket: Site,
    pub bra: Site,
}

impl Correction {
    pub fn plus(ket: Site, bra: Site) -> Self {
        Correction { sign: 1, ket, bra }
    }

    pub fn minus(ket: Site, bra: Site) -> Self {
        Correction { sign: -1, ket, bra }
    }
}

/// A rule operator plus finitely many rank-one corrections `±|δ_ket⟩⟨δ_bra|`.
#[derive(Clone, Debug)]
pub struct PerturbedOperator {
    pub name: String,
    pub base: RuleOperator,
    pub corrections: Vec<Correction>,
}

impl PerturbedOperator {
    pub fn new(name: impl Into<String>, base: RuleOperator, corrections: Vec<Correction>) -> Self {
        PerturbedOperator {
            name: name.into(),
            base,
            corrections,
        }
    }

    /// `base(f) + Σ sign·⟨δ_bra, f⟩·δ_ket`, computed exactly.
    pub fn apply(&self, f: &StateVector) -> Result<StateVector> {
        let mut out = self.base.apply(f)?;
        for c in &self.corrections {
            let coeff = f.get(c.bra);
            out.add_term(c.ket, coeff * Scalar::from_integer(c.sign));
        }
        Ok(out)
    }

    fn basis_image(&self, s: Site) -> Result<Option<Site>> {
        let v = self.apply(&StateVector::basis(s))?;
        if v.is_zero() {
            return Ok(None);
        }
        v.as_basis().map(Some).ok_or_else(|| Error::NotABasisMap {
            op: self.name.clone(),
            site: s,
        })
    }

    /// Rewrites the perturbation as point pieces in front of the base rules,
    /// which are cut so that no two pieces overlap.
    /// Only the bra sites can change; the whole domain of `spec` is checked
    /// against direct application anyway.
    pub fn to_rule(&self, spec: &WindowSpec) -> Result<RuleOperator> {
        let mut bras: Vec<Site> = self.corrections.iter().map(|c| c.bra).collect();
        bras.sort();
        bras.dedup();
        let mut pieces = Vec::new();
        for b in bras {
            let img = self.basis_image(b)?;
            if img == self.base.image_of(b)? {
                continue;
            }
            let send = match img {
                Some(t) => Action::Map(AffineMap::constant(t.x(), t.j())),
                None => Action::Zero,
            };
            pieces.push(Piece::new(point(b.x(), b.j()), send));
        }
        let overridden: Vec<Region> = pieces.iter().map(|p| not(p.when.clone())).collect();
        for p in self.base.pieces() {
            let mut parts = vec![p.when.clone()];
            parts.extend(overridden.iter().cloned());
            pieces.push(Piece::new(all(parts).simplify(), p.send));
        }
        let rule = RuleOperator::new(self.name.clone(), pieces, self.base.fallback());
        for s in spec.domain().sites() {
            if rule.image_of(s)? != self.basis_image(s)? {
                return Err(Error::NotABasisMap {
                    op: self.name.clone(),
                    site: s,
                });
            }
        }
        Ok(rule)
    }
}
