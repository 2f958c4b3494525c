//! The almost paracontact metric structure `(φ, ξ, η, g)` induced by a G₂*
//! bundle and a unit timelike `ξ`, and its covariant derivative
//! `F(X, Y, Z) = (∇_X Φ)(Y, Z)`.
//!
//! Conventions: `φ(X) = P(ξ, X)`, `g = -g_{4,3}`, `η(X) = g(ξ, X)` and
//! `Φ(X, Y) = g(φX, Y)`, hence `Φ = -ξ⌟φ`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{interior, KForm, Matrix, Metric, Tensor3, Vector, DIM};
use crate::g2::G2Bundle;
use crate::liealg::Connection;
use crate::scalar::{Field, Ring};

/// `F[i][j][k] = (∇_{f_i} Φ)(f_j, f_k)`, 0-based.
pub type FTensor<S> = Tensor3<S>;

#[derive(Clone)]
pub struct Apcms<S> {
    bundle: G2Bundle<S>,
    xi: Vector<S>,
    eta: Vector<S>,
    phi: Matrix<S>,
    g: Metric<S>,
}

impl<S: Field + fmt::Display> Apcms<S> {
    /// Requires `g_{4,3}(ξ, ξ) = -1` (exactly, or within tolerance for
    /// floats).
    pub fn induce(bundle: &G2Bundle<S>, xi: Vector<S>) -> Result<Self> {
        let norm = bundle.metric().apply(&xi, &xi);
        if !(norm.clone() + S::one()).is_zero() {
            return Err(Error::NonTimelikeUnit { norm: norm.to_string() });
        }
        Ok(Self::induce_unchecked(bundle, xi))
    }

    /// Like [`Apcms::induce`], but first rescales a timelike `ξ` to
    /// `ξ / √(-g_{4,3}(ξ, ξ))` when that root exists in the field.
    pub fn induce_rescaled(bundle: &G2Bundle<S>, xi: Vector<S>) -> Result<Self> {
        let norm = bundle.metric().apply(&xi, &xi);
        let non_unit = || Error::NonTimelikeUnit { norm: norm.to_string() };
        if norm.signum() >= 0 {
            return Err(non_unit());
        }
        let len = (-norm.clone()).nth_root(2).ok_or_else(non_unit)?;
        let inv = len.inv().ok_or_else(non_unit)?;
        Self::induce(bundle, xi.scale(&inv))
    }
}

impl<S: Ring> Apcms<S> {
    /// Builds the structure without checking the norm of `ξ`; used for
    /// symbolic `ξ`, where the norm condition is a polynomial constraint.
    pub fn induce_unchecked(bundle: &G2Bundle<S>, xi: Vector<S>) -> Self {
        let g = bundle.metric().neg();
        let eta = g.lower(&xi);
        let cols: [Vector<S>; DIM] = std::array::from_fn(|j| bundle.cross_product(&xi, &Vector::f(j + 1)));
        Self {
            bundle: bundle.clone(),
            eta,
            phi: Matrix::from_columns(&cols),
            g,
            xi,
        }
    }

    pub fn bundle(&self) -> &G2Bundle<S> {
        &self.bundle
    }

    pub fn xi(&self) -> &Vector<S> {
        &self.xi
    }

    /// Components of `η`.
    pub fn eta(&self) -> &Vector<S> {
        &self.eta
    }

    pub fn eta_form(&self) -> KForm<S> {
        KForm::covector(&self.eta)
    }

    pub fn eta_of(&self, x: &Vector<S>) -> S {
        dot(&self.eta, x)
    }

    /// The endomorphism `φ` (column `j` is `P(ξ, f_{j+1})`).
    pub fn phi_matrix(&self) -> &Matrix<S> {
        &self.phi
    }

    pub fn phi_of(&self, x: &Vector<S>) -> Vector<S> {
        self.phi.apply(x)
    }

    /// The metric `g = -g_{4,3}`.
    pub fn metric(&self) -> &Metric<S> {
        &self.g
    }

    /// `Φ(X, Y) = g(φX, Y)`.
    pub fn fundamental(&self, x: &Vector<S>, y: &Vector<S>) -> S {
        self.g.apply(&self.phi_of(x), y)
    }

    /// `Φ` as a 2-form.
    pub fn fundamental_form(&self) -> KForm<S> {
        let mut out = KForm::zero(2);
        for i in 1..=DIM {
            for j in i + 1..=DIM {
                let c = self.fundamental(&Vector::f(i), &Vector::f(j));
                if !c.is_zero() {
                    out = out + KForm::monomial(&[i, j], c);
                }
            }
        }
        out
    }

    /// `∇_{f_i} ξ` for `i = 1..7` (0-based vector).
    pub fn nabla_xi(&self, conn: &Connection<S>) -> Vec<Vector<S>> {
        (1..=DIM).map(|i| conn.nabla_vec(&Vector::f(i), &self.xi)).collect()
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> Apcms<T> {
        Apcms {
            bundle: self.bundle.map(&f),
            xi: self.xi.map(&f),
            eta: self.eta.map(&f),
            phi: self.phi.map(&f),
            g: self.g.map(&f),
        }
    }
}

fn dot<S: Ring>(a: &Vector<S>, b: &Vector<S>) -> S {
    let mut acc = S::zero();
    for i in b.support() {
        if !a.0[i].is_zero() {
            acc = acc + a.0[i].clone() * b.0[i].clone();
        }
    }
    acc
}

/// Result of one axiom check. A failure carries the basis labels of the
/// first offending input and the two sides that differ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomCheck {
    pub axiom: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl AxiomCheck {
    fn pass(axiom: &'static str) -> Self {
        Self {
            axiom,
            passed: true,
            witness: None,
            detail: None,
        }
    }

    fn fail(axiom: &'static str, witness: Vec<usize>, detail: String) -> Self {
        Self {
            axiom,
            passed: false,
            witness: Some(witness),
            detail: Some(detail),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomAudit {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomAudit {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, axiom: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }
}

pub const AXIOM_PHI_SQUARED: &str = "phi_squared";
pub const AXIOM_COMPATIBILITY: &str = "compatibility";
pub const AXIOM_ETA_PHI: &str = "eta_phi";
pub const AXIOM_FUNDAMENTAL_SKEW: &str = "fundamental_skew";

/// Checks `φ² = I - η⊗ξ`, `g(φX, φY) = -g(X, Y) + η(X)η(Y)`, `η∘φ = 0` and
/// skew-symmetry of `Φ` on basis vectors.
pub fn axiom_audit<S: Ring + fmt::Display>(s: &Apcms<S>) -> AxiomAudit {
    let f = Vector::<S>::f;
    let mut checks = Vec::with_capacity(4);

    let mut check = AxiomCheck::pass(AXIOM_PHI_SQUARED);
    for i in 1..=DIM {
        let lhs = s.phi_of(&s.phi_of(&f(i)));
        let rhs = f(i) - s.xi.scale(&s.eta_of(&f(i)));
        if !(lhs.clone() - rhs.clone()).is_zero() {
            check = AxiomCheck::fail(AXIOM_PHI_SQUARED, vec![i], format!("phi^2(f{i}) = {lhs}, expected {rhs}"));
            break;
        }
    }
    checks.push(check);

    let mut check = AxiomCheck::pass(AXIOM_COMPATIBILITY);
    'outer: for i in 1..=DIM {
        for j in i..=DIM {
            let lhs = s.g.apply(&s.phi_of(&f(i)), &s.phi_of(&f(j)));
            let rhs = -s.g.apply(&f(i), &f(j)) + s.eta_of(&f(i)) * s.eta_of(&f(j));
            if !(lhs.clone() - rhs.clone()).is_zero() {
                check = AxiomCheck::fail(
                    AXIOM_COMPATIBILITY,
                    vec![i, j],
                    format!("g(phi f{i}, phi f{j}) = {lhs}, expected {rhs}"),
                );
                break 'outer;
            }
        }
    }
    checks.push(check);

    let mut check = AxiomCheck::pass(AXIOM_ETA_PHI);
    for i in 1..=DIM {
        let v = s.eta_of(&s.phi_of(&f(i)));
        if !v.is_zero() {
            check = AxiomCheck::fail(AXIOM_ETA_PHI, vec![i], format!("eta(phi f{i}) = {v}"));
            break;
        }
    }
    checks.push(check);

    let mut check = AxiomCheck::pass(AXIOM_FUNDAMENTAL_SKEW);
    'outer2: for i in 1..=DIM {
        for j in i..=DIM {
            let v = s.fundamental(&f(i), &f(j)) + s.fundamental(&f(j), &f(i));
            if !v.is_zero() {
                check = AxiomCheck::fail(
                    AXIOM_FUNDAMENTAL_SKEW,
                    vec![i, j],
                    format!("Phi(f{i}, f{j}) + Phi(f{j}, f{i}) = {v}"),
                );
                break 'outer2;
            }
        }
    }
    checks.push(check);

    AxiomAudit { checks }
}

/// `F` through the 3-form:
/// `(∇_X Φ)(Y, Z) = -(∇_X φ)(ξ, Y, Z) - φ(∇_X ξ, Y, Z)`.
pub fn f_tensor_via_form<S: Ring>(s: &Apcms<S>, conn: &Connection<S>) -> FTensor<S> {
    let phi = s.bundle.phi();
    let mut t = Tensor3::zero();
    for i in 0..DIM {
        let x = Vector::f(i + 1);
        let dphi = conn.nabla_form(&x, phi);
        let dxi = conn.nabla_vec(&x, &s.xi);
        let omega = -interior(&s.xi, &dphi) - interior(&dxi, phi);
        for (labels, c) in omega.terms() {
            let (j, k) = (labels[0] - 1, labels[1] - 1);
            t.set(i, j, k, c.clone());
            t.set(i, k, j, -c.clone());
        }
    }
    t
}

/// `F` by differentiating `Φ(Y, Z) = g(φY, Z)` directly:
/// `(∇_X Φ)(Y, Z) = -Φ(∇_X Y, Z) - Φ(Y, ∇_X Z)`.
pub fn f_tensor_direct<S: Ring>(s: &Apcms<S>, conn: &Connection<S>) -> FTensor<S> {
    let fundamental: [[S; DIM]; DIM] =
        std::array::from_fn(|j| std::array::from_fn(|k| s.fundamental(&Vector::f(j + 1), &Vector::f(k + 1))));
    let phi_on = |y: &Vector<S>, k: usize| {
        let mut acc = S::zero();
        for j in y.support() {
            if !fundamental[j][k].is_zero() {
                acc = acc + y.0[j].clone() * fundamental[j][k].clone();
            }
        }
        acc
    };
    Tensor3::from_fn(|i, j, k| {
        let gij = conn.get(i + 1, j + 1);
        let gik = conn.get(i + 1, k + 1);
        // Φ(f_j, Γ_ik) = -Φ(Γ_ik, f_j)
        -phi_on(gij, k) + phi_on(gik, j)
    })
}

/// `F`, computed both ways; disagreement is an internal error.
pub fn f_tensor<S: Ring + fmt::Display>(s: &Apcms<S>, conn: &Connection<S>) -> Result<FTensor<S>> {
    let via_form = f_tensor_via_form(s, conn);
    let direct = f_tensor_direct(s, conn);
    if let Some((i, j, k)) = via_form.first_difference(&direct) {
        return Err(Error::Inconsistent(format!(
            "F(f{}, f{}, f{}) is {} through the 3-form but {} directly",
            i + 1,
            j + 1,
            k + 1,
            via_form.get(i, j, k),
            direct.get(i, j, k)
        )));
    }
    Ok(via_form)
}

/// First basis pair (1-based) with `g(∇_{f_i}ξ, f_j) + g(∇_{f_j}ξ, f_i) ≠ 0`.
pub fn killing_witness<S: Ring>(s: &Apcms<S>, conn: &Connection<S>) -> Option<(usize, usize)> {
    let d = s.nabla_xi(conn);
    for i in 0..DIM {
        for j in i..DIM {
            let v = s.g.apply(&d[i], &Vector::f(j + 1)) + s.g.apply(&d[j], &Vector::f(i + 1));
            if !v.is_zero() {
                return Some((i + 1, j + 1));
            }
        }
    }
    None
}

pub fn is_killing<S: Ring>(s: &Apcms<S>, conn: &Connection<S>) -> bool {
    killing_witness(s, conn).is_none()
}
