//! The model operators and the closed-form wave, adjoint and scattering
//! operators, each written out case by case.
//!
//! The closed forms here are the oracles for the iterative computation in
//! [`crate::wave`]; nothing in this module calls into it.

use serde::{Deserialize, Serialize};

use crate::action::Action;
use crate::error::{Error, Result};
use crate::lattice::Site;
use crate::operator::{Correction, PerturbedOperator, Piece, RuleOperator};
use crate::region::{all, eq, ge, le, ne, point, Region, J, X};
use crate::window::WindowSpec;

/// Position `(z, ℓ)` of the off-diagonal perturbation; `ℓ` also places the
/// diagonal perturbation at `(-ℓ, ℓ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelParams {
    pub z: i64,
    pub l: i64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams { z: 2, l: 3 }
    }
}

impl ModelParams {
    pub fn new(z: i64, l: i64) -> Result<Self> {
        if l < 1 {
            return Err(Error::Params(format!("ℓ must be at least 1, got {l}")));
        }
        if z < -l + 2 {
            return Err(Error::Params(format!("z must satisfy z >= -ℓ+2 = {}, got {z}", -l + 2)));
        }
        Ok(ModelParams { z, l })
    }

    /// Smallest window that contains both perturbations with room to spare.
    pub fn support_spec(&self) -> WindowSpec {
        let r = (self.z.abs() + 2).max(self.l + 2);
        WindowSpec { radius: r, guard: 2 }
    }
}

fn rule(name: &str, pieces: Vec<(Region, Action)>) -> RuleOperator {
    RuleOperator::new(
        name,
        pieces.into_iter().map(|(w, a)| Piece::new(w, a)).collect(),
        Action::Zero,
    )
}

pub fn u0() -> RuleOperator {
    rule("U0", vec![(Region::True, Action::shift(1, 0))])
}

pub fn u0_inv() -> RuleOperator {
    rule("U0^-1", vec![(Region::True, Action::shift(-1, 0))])
}

/// The third case carries the condition `j != 0`; with it dropped, `(0, 0)`
/// would be sent below the boundary row.
pub fn u1() -> RuleOperator {
    rule(
        "U1",
        vec![
            (all([ne(X, -J - 1), ne(X, -J)]), Action::shift(1, 0)),
            (eq(X, -J - 1), Action::shift(1, 1)),
            (all([eq(X, -J), ne(J, 0)]), Action::shift(1, -1)),
            (point(0, 0), Action::to(1, 0)),
        ],
    )
}

pub fn u1_inv() -> RuleOperator {
    rule(
        "U1^-1",
        vec![
            (all([ne(X, -J), ne(X, -J + 1)]), Action::shift(-1, 0)),
            (all([eq(X, -J + 1), ne(J, 0)]), Action::shift(-1, -1)),
            (eq(X, -J), Action::shift(-1, 1)),
            (point(1, 0), Action::to(0, 0)),
        ],
    )
}

/// `U1 - |δ_{z,ℓ}⟩⟨δ_{z-1,ℓ}| - |δ_{z+1,ℓ}⟩⟨δ_{z,ℓ}| + |δ_{z+1,ℓ}⟩⟨δ_{z-1,ℓ}| + |δ_{z,ℓ}⟩⟨δ_{z,ℓ}|`
pub fn u2_perturbed(p: ModelParams) -> PerturbedOperator {
    let (z, l) = (p.z, p.l);
    let s = Site::at;
    PerturbedOperator::new(
        "U2",
        u1(),
        vec![
            Correction::minus(s(z, l), s(z - 1, l)),
            Correction::minus(s(z + 1, l), s(z, l)),
            Correction::plus(s(z + 1, l), s(z - 1, l)),
            Correction::plus(s(z, l), s(z, l)),
        ],
    )
}

/// `U1 - |δ_{-ℓ,ℓ}⟩⟨δ_{-ℓ-1,ℓ+1}| - |δ_{-ℓ+1,ℓ-1}⟩⟨δ_{-ℓ,ℓ}| + |δ_{-ℓ+1,ℓ-1}⟩⟨δ_{-ℓ-1,ℓ+1}| + |δ_{-ℓ,ℓ}⟩⟨δ_{-ℓ,ℓ}|`
pub fn u3_perturbed(p: ModelParams) -> PerturbedOperator {
    let l = p.l;
    let s = Site::at;
    PerturbedOperator::new(
        "U3",
        u1(),
        vec![
            Correction::minus(s(-l, l), s(-l - 1, l + 1)),
            Correction::minus(s(-l + 1, l - 1), s(-l, l)),
            Correction::plus(s(-l + 1, l - 1), s(-l - 1, l + 1)),
            Correction::plus(s(-l, l), s(-l, l)),
        ],
    )
}

pub fn w_plus_u1_u0() -> RuleOperator {
    rule(
        "W+(U1,U0)",
        vec![
            (ge(X, -J + 1), Action::identity()),
            (all([le(X, -J), ge(J, 1)]), Action::shift(0, -1)),
            (all([le(X, 0), eq(J, 0)]), Action::to(X, -X)),
        ],
    )
}

pub fn w_minus_u1_u0() -> RuleOperator {
    rule(
        "W-(U1,U0)",
        vec![(ge(X, -J), Action::shift(0, 1)), (le(X, -J - 1), Action::identity())],
    )
}

pub fn w_plus_u1_u0_adj() -> RuleOperator {
    rule(
        "W+(U1,U0)*",
        vec![
            (ge(X, -J + 1), Action::identity()),
            (le(X, -J - 1), Action::shift(0, 1)),
            (eq(X, -J), Action::to(X, 0)),
        ],
    )
}

pub fn s_u1_u0() -> RuleOperator {
    rule("S(U1,U0)", vec![(Region::True, Action::shift(0, 1))])
}

pub fn w_plus_u2_u0(p: ModelParams) -> RuleOperator {
    let (z, l) = (p.z, p.l);
    rule(
        "W+(U2,U0)",
        vec![
            (all([ne(J, l), ge(X, -J + 1)]), Action::identity()),
            (all([ne(J, l), le(X, -J), ge(J, 1)]), Action::shift(0, -1)),
            (all([eq(J, 0), le(X, 0)]), Action::to(X, -X)),
            (all([eq(J, l), ge(X, z + 1)]), Action::to(X, l)),
            (all([eq(J, l), ge(X, -l + 2), le(X, z)]), Action::to(X - 1, l)),
            (all([eq(J, l), le(X, -l + 1)]), Action::to(X - 1, l - 1)),
        ],
    )
}

pub fn w_minus_u2_u0(p: ModelParams) -> RuleOperator {
    let (z, l) = (p.z, p.l);
    rule(
        "W-(U2,U0)",
        vec![
            (le(X, -J - 1), Action::identity()),
            (all([ne(J, l - 1), ge(X, -J)]), Action::shift(0, 1)),
            (all([eq(J, l - 1), ge(X, -l + 1), le(X, z - 1)]), Action::shift(0, 1)),
            (all([eq(J, l - 1), ge(X, z)]), Action::shift(1, 1)),
        ],
    )
}

pub fn w_plus_u2_u0_adj(p: ModelParams) -> RuleOperator {
    let (z, l) = (p.z, p.l);
    rule(
        "W+(U2,U0)*",
        vec![
            (all([ne(J, l), ge(X, -J + 1)]), Action::identity()),
            (all([ne(J, l - 1), le(X, -J - 1)]), Action::shift(0, 1)),
            (eq(J, -X), Action::to(X, 0)),
            (all([eq(J, l), ge(X, z + 1)]), Action::to(X, l)),
            (all([eq(J, l), ge(X, -l + 1), le(X, z - 1)]), Action::to(X + 1, l)),
            (all([eq(J, l - 1), le(X, -l)]), Action::to(X + 1, l)),
            (all([eq(J, l), eq(X, z)]), Action::Zero),
        ],
    )
}

pub fn s_u2_u0(p: ModelParams) -> RuleOperator {
    let l = p.l;
    rule(
        "S(U2,U0)",
        vec![(ne(J, l - 1), Action::shift(0, 1)), (eq(J, l - 1), Action::shift(1, 1))],
    )
}

pub fn w_plus_u3_u0(p: ModelParams) -> RuleOperator {
    let l = p.l;
    rule(
        "W+(U3,U0)",
        vec![
            (ge(X, -J + 1), Action::identity()),
            (all([ne(J, 0), le(X, -J)]), Action::shift(0, -1)),
            (all([eq(J, 0), ge(X, -l + 1), le(X, 0)]), Action::to(X, -X)),
            (all([eq(J, 0), le(X, -l)]), Action::to(X - 1, -X + 1)),
        ],
    )
}

pub fn w_minus_u3_u0() -> RuleOperator {
    rule(
        "W-(U3,U0)",
        vec![(le(X, -J - 1), Action::identity()), (ge(X, -J), Action::shift(0, 1))],
    )
}

pub fn w_plus_u3_u0_adj(p: ModelParams) -> RuleOperator {
    let l = p.l;
    rule(
        "W+(U3,U0)*",
        vec![
            (ge(X, -J + 1), Action::identity()),
            (le(X, -J - 1), Action::shift(0, 1)),
            (all([eq(J, -X), ge(X, -l + 1), le(X, 0)]), Action::to(X, 0)),
            (all([eq(J, -X), le(X, -l - 1)]), Action::to(X + 1, 0)),
            (all([eq(J, l), eq(X, -l)]), Action::Zero),
        ],
    )
}

pub fn s_u3_u0() -> RuleOperator {
    rule("S(U3,U0)", vec![(Region::True, Action::shift(0, 1))])
}

pub fn w_plus_u2_u1(p: ModelParams) -> RuleOperator {
    let (z, l) = (p.z, p.l);
    rule(
        "W+(U2,U1)",
        vec![
            (all([ne(J, l), ge(X, -J)]), Action::identity()),
            (all([ne(J, l - 1), le(X, -J)]), Action::identity()),
            (all([eq(J, l), ge(X, z + 1)]), Action::to(X, l)),
            (all([eq(J, l), ge(X, -l + 2), le(X, z)]), Action::to(X - 1, l)),
            (all([eq(J, l), eq(X, -l + 1)]), Action::to(X - 1, l - 1)),
            (all([eq(J, l - 1), le(X, -l)]), Action::to(X - 1, l - 1)),
        ],
    )
}

pub fn w_minus_u2_u1(p: ModelParams) -> RuleOperator {
    let (z, l) = (p.z, p.l);
    rule(
        "W-(U2,U1)",
        vec![
            (ne(J, l), Action::identity()),
            (all([eq(J, l), le(X, z - 1)]), Action::to(X, l)),
            (all([eq(J, l), ge(X, z)]), Action::to(X + 1, l)),
        ],
    )
}

/// Operator names in catalog order.
pub const NAMES: [&str; 22] = [
    "U0",
    "U0^-1",
    "U1",
    "U1^-1",
    "U2",
    "U2^-1",
    "U3",
    "U3^-1",
    "W+(U1,U0)",
    "W-(U1,U0)",
    "W+(U1,U0)*",
    "S(U1,U0)",
    "W+(U2,U0)",
    "W-(U2,U0)",
    "W+(U2,U0)*",
    "S(U2,U0)",
    "W+(U3,U0)",
    "W-(U3,U0)",
    "W+(U3,U0)*",
    "S(U3,U0)",
    "W+(U2,U1)",
    "W-(U2,U1)",
];

/// The operators drawn in the figures, in figure order.
pub const FIGURE_OPERATORS: [&str; 15] = [
    "U0",
    "U1",
    "W+(U1,U0)",
    "W-(U1,U0)",
    "S(U1,U0)",
    "U2",
    "U3",
    "W+(U2,U0)",
    "W-(U2,U0)",
    "S(U2,U0)",
    "S(U3,U0)",
    "W+(U3,U0)",
    "W-(U3,U0)",
    "W+(U2,U1)",
    "W-(U2,U1)",
];

#[derive(Clone, Debug)]
pub struct Catalog {
    params: ModelParams,
    entries: Vec<RuleOperator>,
}

impl Catalog {
    pub fn new(params: ModelParams) -> Result<Self> {
        let params = ModelParams::new(params.z, params.l)?;
        let spec = params.support_spec();
        let u2 = u2_perturbed(params).to_rule(&spec)?;
        let u2_inv = u2.adjoint(&spec)?.renamed("U2^-1");
        let u3 = u3_perturbed(params).to_rule(&spec)?;
        let u3_inv = u3.adjoint(&spec)?.renamed("U3^-1");
        let entries = vec![
            u0(),
            u0_inv(),
            u1(),
            u1_inv(),
            u2,
            u2_inv,
            u3,
            u3_inv,
            w_plus_u1_u0(),
            w_minus_u1_u0(),
            w_plus_u1_u0_adj(),
            s_u1_u0(),
            w_plus_u2_u0(params),
            w_minus_u2_u0(params),
            w_plus_u2_u0_adj(params),
            s_u2_u0(params),
            w_plus_u3_u0(params),
            w_minus_u3_u0(),
            w_plus_u3_u0_adj(params),
            s_u3_u0(),
            w_plus_u2_u1(params),
            w_minus_u2_u1(params),
        ];
        debug_assert!(entries.iter().map(|e| e.name()).eq(NAMES));
        Ok(Catalog { params, entries })
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    pub fn entries(&self) -> &[RuleOperator] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Result<&RuleOperator> {
        let canonical = canonical_name(name);
        self.entries
            .iter()
            .find(|e| e.name() == canonical)
            .ok_or_else(|| Error::UnknownOperator(name.to_string()))
    }

    /// `(U, U^-1)` for a model operator name such as `"U2"`.
    pub fn unitary(&self, name: &str) -> Result<(&RuleOperator, &RuleOperator)> {
        let u = self.get(name)?;
        if !matches!(u.name(), "U0" | "U1" | "U2" | "U3") {
            return Err(Error::UnknownOperator(name.to_string()));
        }
        let inv = self.get(&format!("{}^-1", u.name()))?;
        Ok((u, inv))
    }

    /// Test hook: makes the named entry annihilate `δ_{0,1}`, which no cataloged
    /// operator does for valid parameters.
    pub fn corrupt(&mut self, name: &str) -> Result<()> {
        let canonical = canonical_name(name);
        let entry = self
            .entries
            .iter_mut()
            .find(|e| e.name() == canonical)
            .ok_or_else(|| Error::UnknownOperator(name.to_string()))?;
        *entry = entry.with_leading_piece(Piece::new(point(0, 1), Action::Zero));
        Ok(())
    }
}

/// Accepts a few ASCII spellings besides the canonical ones.
pub fn canonical_name(name: &str) -> String {
    let trimmed: String = name.chars().filter(|c| !c.is_whitespace()).collect();
    for base in ["U0", "U1", "U2", "U3"] {
        if trimmed == format!("{base}inv") || trimmed == format!("{base}^{{-1}}") {
            return format!("{base}^-1");
        }
    }
    trimmed
}
