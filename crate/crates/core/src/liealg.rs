//! Lie algebra data and the Levi-Civita connection of a left-invariant
//! metric.
//!
//! All vector fields are left-invariant, i.e. constant combinations of
//! `f_1 .. f_7`, so directional-derivative terms `X[g(Y, Z)]` vanish and the
//! Koszul formula reduces to
//! `2 g(∇_X Y, Z) = g([X,Y],Z) - g([Y,Z],X) + g([Z,X],Y)`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{KForm, Matrix, Metric, Vector, DIM};
use crate::scalar::{Field, Ring};

/// Structure constants: `[f_i, f_j]` for every ordered pair, stored
/// antisymmetrically.
#[derive(Clone, PartialEq)]
pub struct LieAlgebra<S> {
    table: Vec<Vector<S>>,
}

/// Outcome of [`LieAlgebra::check_jacobi`].
#[derive(Clone, PartialEq)]
pub enum JacobiReport<S> {
    Pass,
    /// First failing triple (1-based labels, `i < j < k`) and the cyclic sum.
    Fail {
        triple: (usize, usize, usize),
        residual: Vector<S>,
    },
}

impl<S: Ring + fmt::Display> fmt::Debug for JacobiReport<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JacobiReport::Pass => write!(f, "Pass"),
            JacobiReport::Fail { triple, residual } => {
                write!(f, "Fail {{ triple: {triple:?}, residual: {residual} }}")
            }
        }
    }
}

impl<S: Ring + fmt::Display> fmt::Debug for LieAlgebra<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.nonzero_brackets()).finish()
    }
}

impl<S: Ring + fmt::Display> fmt::Debug for Connection<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.nonzero_entries().into_iter().map(|e| (e.i, e.j, e.value)))
            .finish()
    }
}

impl<S: Ring + fmt::Display> fmt::Debug for ConnectionEntry<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "∇_f{} f{} = {}", self.i, self.j, self.value)
    }
}

impl<S: Ring> LieAlgebra<S> {
    pub fn abelian() -> Self {
        Self {
            table: vec![Vector::zero(); DIM * DIM],
        }
    }

    /// Builds the algebra from `[f_i, f_j] = v` entries (1-based labels).
    /// Each unordered pair may appear once; `[f_j, f_i] = -v` is implied.
    pub fn from_brackets(entries: impl IntoIterator<Item = (usize, usize, Vector<S>)>) -> Result<Self> {
        let mut out = Self::abelian();
        let mut seen = vec![false; DIM * DIM];
        for (i, j, v) in entries {
            for l in [i, j] {
                if !(1..=DIM).contains(&l) {
                    return Err(Error::IndexOutOfRange(l));
                }
            }
            if i == j {
                return Err(Error::validation(
                    format!("bracket [f{i}, f{j}]"),
                    "a basis vector brackets to zero with itself",
                ));
            }
            let (a, b) = (i - 1, j - 1);
            if seen[a * DIM + b] {
                return Err(Error::validation(
                    format!("bracket [f{i}, f{j}]"),
                    "pair given twice",
                ));
            }
            seen[a * DIM + b] = true;
            seen[b * DIM + a] = true;
            out.table[b * DIM + a] = -v.clone();
            out.table[a * DIM + b] = v;
        }
        Ok(out)
    }

    /// `[f_i, f_j]` for 0-based indices.
    pub fn basis_bracket(&self, i: usize, j: usize) -> &Vector<S> {
        &self.table[i * DIM + j]
    }

    pub fn bracket(&self, x: &Vector<S>, y: &Vector<S>) -> Vector<S> {
        let mut out = Vector::zero();
        for i in x.support() {
            for j in y.support() {
                let b = &self.table[i * DIM + j];
                if !b.is_zero() {
                    out = out + b.scale(&(x.0[i].clone() * y.0[j].clone()));
                }
            }
        }
        out
    }

    pub fn is_abelian(&self) -> bool {
        self.table.iter().all(Vector::is_zero)
    }

    /// Checks the cyclic sum over all 35 triples `i < j < k`.
    pub fn check_jacobi(&self) -> JacobiReport<S> {
        for i in 1..=DIM {
            for j in i + 1..=DIM {
                for k in j + 1..=DIM {
                    let (a, b, c) = (Vector::f(i), Vector::f(j), Vector::f(k));
                    let residual = self.bracket(&self.bracket(&a, &b), &c)
                        + self.bracket(&self.bracket(&b, &c), &a)
                        + self.bracket(&self.bracket(&c, &a), &b);
                    if !residual.is_zero() {
                        return JacobiReport::Fail {
                            triple: (i, j, k),
                            residual,
                        };
                    }
                }
            }
        }
        JacobiReport::Pass
    }

    /// Nonzero brackets `[f_i, f_j]` with `i < j` (1-based).
    pub fn nonzero_brackets(&self) -> Vec<(usize, usize, Vector<S>)> {
        let mut out = Vec::new();
        for i in 0..DIM {
            for j in i + 1..DIM {
                let v = &self.table[i * DIM + j];
                if !v.is_zero() {
                    out.push((i + 1, j + 1, v.clone()));
                }
            }
        }
        out
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> LieAlgebra<T> {
        LieAlgebra {
            table: self.table.iter().map(|v| v.map(&f)).collect(),
        }
    }
}

/// Christoffel table `Γ[i][j] = ∇_{f_i} f_j`.
#[derive(Clone, PartialEq)]
pub struct Connection<S> {
    gamma: Vec<Vector<S>>,
}

/// One nonzero covariant derivative `∇_{f_i} f_j` with 1-based labels.
#[derive(Clone, PartialEq, Serialize)]
#[serde(bound = "S: Ring + Serialize")]
pub struct ConnectionEntry<S> {
    pub i: usize,
    pub j: usize,
    pub value: Vector<S>,
}

impl<S: Field> Connection<S> {
    /// Levi-Civita connection of a left-invariant metric via Koszul.
    pub fn levi_civita(algebra: &LieAlgebra<S>, g: &Metric<S>) -> Result<Self> {
        let inverse = g.inverse()?.clone();
        let half = S::from_ratio(1, 2);
        let mut gamma = Vec::with_capacity(DIM * DIM);
        for i in 0..DIM {
            for j in 0..DIM {
                let (fi, fj) = (Vector::<S>::f(i + 1), Vector::<S>::f(j + 1));
                let cov = Vector::from_fn(|k| {
                    let fk = Vector::<S>::f(k + 1);
                    let koszul = g.apply(algebra.basis_bracket(i, j), &fk)
                        - g.apply(algebra.basis_bracket(j, k), &fi)
                        + g.apply(algebra.basis_bracket(k, i), &fj);
                    half.clone() * koszul
                });
                gamma.push(inverse.apply(&cov));
            }
        }
        Ok(Self { gamma })
    }
}

impl<S: Ring> Connection<S> {
    pub fn flat() -> Self {
        Self {
            gamma: vec![Vector::zero(); DIM * DIM],
        }
    }

    /// Builds a connection from explicit `∇_{f_i} f_j = v` entries (1-based);
    /// unspecified entries are zero.
    pub fn from_entries(entries: impl IntoIterator<Item = (usize, usize, Vector<S>)>) -> Self {
        let mut out = Self::flat();
        for (i, j, v) in entries {
            out.gamma[(i - 1) * DIM + (j - 1)] = v;
        }
        out
    }

    /// `∇_{f_i} f_j` for 1-based labels.
    pub fn get(&self, i: usize, j: usize) -> &Vector<S> {
        assert!((1..=DIM).contains(&i) && (1..=DIM).contains(&j));
        &self.gamma[(i - 1) * DIM + (j - 1)]
    }

    fn at(&self, i: usize, j: usize) -> &Vector<S> {
        &self.gamma[i * DIM + j]
    }

    /// `∇_X Y` for left-invariant fields.
    pub fn nabla_vec(&self, x: &Vector<S>, y: &Vector<S>) -> Vector<S> {
        let mut out = Vector::zero();
        for i in x.support() {
            for j in y.support() {
                let v = self.at(i, j);
                if !v.is_zero() {
                    out = out + v.scale(&(x.0[i].clone() * y.0[j].clone()));
                }
            }
        }
        out
    }

    /// `∇_X` as an endomorphism (column `j` is `∇_X f_{j+1}`).
    pub fn endomorphism(&self, x: &Vector<S>) -> Matrix<S> {
        let cols: [Vector<S>; DIM] = std::array::from_fn(|j| self.nabla_vec(x, &Vector::f(j + 1)));
        Matrix::from_columns(&cols)
    }

    /// `∇_X a` for a constant-coefficient form:
    /// `(∇_X a)(V_1..V_k) = -Σ_s a(V_1, .., ∇_X V_s, .., V_k)`.
    pub fn nabla_form(&self, x: &Vector<S>, a: &KForm<S>) -> KForm<S> {
        let m = self.endomorphism(x);
        let mut out = KForm::zero(a.degree());
        for (labels, c) in a.terms() {
            for slot in 0..labels.len() {
                // ∇_X f^r = -Σ_j m[r][j] f^j
                let r = labels[slot] - 1;
                for j in 0..DIM {
                    if m.0[r][j].is_zero() {
                        continue;
                    }
                    let mut replaced = labels.clone();
                    replaced[slot] = j + 1;
                    let coeff = -(c.clone() * m.0[r][j].clone());
                    out = out + KForm::monomial(&replaced, coeff);
                }
            }
        }
        out
    }

    pub fn nonzero_entries(&self) -> Vec<ConnectionEntry<S>> {
        let mut out = Vec::new();
        for i in 0..DIM {
            for j in 0..DIM {
                let v = self.at(i, j);
                if !v.is_zero() {
                    out.push(ConnectionEntry {
                        i: i + 1,
                        j: j + 1,
                        value: v.clone(),
                    });
                }
            }
        }
        out
    }

    /// First `(i, j)` (1-based) where `Γ[i][j] - Γ[j][i] ≠ [f_i, f_j]`.
    pub fn torsion_defect(&self, algebra: &LieAlgebra<S>) -> Option<(usize, usize)> {
        for i in 0..DIM {
            for j in 0..DIM {
                let t = self.at(i, j).clone() - self.at(j, i).clone() - algebra.basis_bracket(i, j).clone();
                if !t.is_zero() {
                    return Some((i + 1, j + 1));
                }
            }
        }
        None
    }

    /// First `(i, j, k)` (1-based) where
    /// `g(Γ[i][j], f_k) + g(f_j, Γ[i][k]) ≠ 0`.
    pub fn metric_defect(&self, g: &Metric<S>) -> Option<(usize, usize, usize)> {
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    let (fj, fk) = (Vector::f(j + 1), Vector::f(k + 1));
                    let v = g.apply(self.at(i, j), &fk) + g.apply(&fj, self.at(i, k));
                    if !v.is_zero() {
                        return Some((i + 1, j + 1, k + 1));
                    }
                }
            }
        }
        None
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> Connection<T> {
        Connection {
            gamma: self.gamma.iter().map(|v| v.map(&f)).collect(),
        }
    }
}
