//! Exterior algebra and metric operations on the 7-dimensional space with
//! basis `f_1, ..., f_7`.
//!
//! Basis *labels* are 1-based everywhere they appear in the public API
//! ([`Vector::f`], [`KForm::monomial`], [`KForm::coeff`]), matching the usual
//! `f_1 .. f_7` names. Raw coordinate storage (`Vector.0`, `Matrix.0`,
//! [`Tensor3::get`]) is 0-based.
//!
//! Forms are stored sparsely: an index tuple `i_1 < ... < i_k` is a 7-bit
//! mask, so wedge signs reduce to inversion counts between two masks. The
//! interior product contracts the first slot: for a monomial, contracting
//! the `j`-th index carries the sign `(-1)^(j-1)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::OnceLock;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Field, Ring};

pub const DIM: usize = 7;

fn check_label(i: usize) -> usize {
    assert!((1..=DIM).contains(&i), "basis label f{i} out of range 1..=7");
    i - 1
}

/// A vector in the basis `f_1 .. f_7` (coordinates 0-based).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Vector<S>(pub [S; DIM]);

impl<S: Ring> Vector<S> {
    pub fn zero() -> Self {
        Self(std::array::from_fn(|_| S::zero()))
    }

    /// The basis vector `f_i`, `i` in `1..=7`.
    pub fn f(i: usize) -> Self {
        let i = check_label(i);
        Self(std::array::from_fn(|k| if k == i { S::one() } else { S::zero() }))
    }

    pub fn from_fn(f: impl FnMut(usize) -> S) -> Self {
        Self(std::array::from_fn(f))
    }

    pub fn coords(&self) -> &[S; DIM] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Ring::is_zero)
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_fn(|i| c.clone() * self.0[i].clone())
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a.approx_eq(b))
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> Vector<T> {
        Vector::from_fn(|i| f(&self.0[i]))
    }

    /// Indices (0-based) of nonzero coordinates.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..DIM).filter(|&i| !self.0[i].is_zero())
    }
}

impl<S: Ring> Add for Vector<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for (a, b) in out.0.iter_mut().zip(rhs.0) {
            *a = a.clone() + b;
        }
        out
    }
}

impl<S: Ring> Sub for Vector<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        for (a, b) in out.0.iter_mut().zip(rhs.0) {
            *a = a.clone() - b;
        }
        out
    }
}

impl<S: Ring> Neg for Vector<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|a| -a))
    }
}

impl<S: Ring + fmt::Display> fmt::Display for Vector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})f{}", i + 1)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<S: Ring + fmt::Display> fmt::Debug for Vector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<S: Ring + Serialize> Serialize for Vector<S> {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        self.0.as_slice().serialize(s)
    }
}

/// Sorted index tuple as a bitmask, bit `i` standing for `f^(i+1)`.
type Mask = u8;

fn mask_labels(mask: Mask) -> Vec<usize> {
    (0..DIM).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect()
}

/// Sign of `f^A ∧ f^B` relative to `f^(A ∪ B)`, for disjoint masks.
fn merge_sign(a: Mask, b: Mask) -> i32 {
    let mut inversions = 0u32;
    for i in 0..DIM {
        if b & (1 << i) != 0 {
            // elements of a greater than i must jump over f^i
            inversions += (a >> (i + 1)).count_ones();
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// An alternating k-form with constant coefficients.
#[derive(Clone, PartialEq)]
pub struct KForm<S> {
    degree: usize,
    terms: BTreeMap<Mask, S>,
}

impl<S: Ring> KForm<S> {
    pub fn zero(degree: usize) -> Self {
        assert!(degree <= DIM, "degree {degree} exceeds 7");
        Self {
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// `coeff * f^{labels}`; labels may be unsorted (the permutation sign is
    /// applied) and a repeated label gives the zero form.
    pub fn monomial(labels: &[usize], coeff: S) -> Self {
        let mut out = Self::zero(labels.len());
        let mut mask: Mask = 0;
        let mut sign = 1;
        for &l in labels {
            let bit = 1 << check_label(l);
            if mask & bit != 0 {
                return out;
            }
            sign *= merge_sign(mask, bit);
            mask |= bit;
        }
        let coeff = if sign < 0 { -coeff } else { coeff };
        out.add_term(mask, coeff);
        out
    }

    /// Sum of `coeff * f^{labels}` terms of a common degree.
    pub fn from_terms<'a>(degree: usize, terms: impl IntoIterator<Item = (&'a [usize], S)>) -> Self {
        let mut out = Self::zero(degree);
        for (labels, c) in terms {
            assert_eq!(labels.len(), degree, "term degree mismatch");
            out = out + Self::monomial(labels, c);
        }
        out
    }

    fn add_term(&mut self, mask: Mask, c: S) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&mask) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(mask, sum);
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored (nonzero) terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `f^{labels}`, signed by the permutation sorting them.
    pub fn coeff(&self, labels: &[usize]) -> S {
        let probe = Self::monomial(labels, S::one());
        match probe.terms.iter().next() {
            None => S::zero(),
            Some((mask, sign)) => self
                .terms
                .get(mask)
                .map(|c| c.clone() * sign.clone())
                .unwrap_or_else(S::zero),
        }
    }

    /// Terms as (sorted 1-based labels, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, &S)> {
        self.terms.iter().map(|(m, c)| (mask_labels(*m), c))
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.degree);
        for (m, v) in &self.terms {
            out.add_term(*m, c.clone() * v.clone());
        }
        out
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> KForm<T> {
        let mut out = KForm::zero(self.degree);
        for (m, v) in &self.terms {
            out.add_term(*m, f(v));
        }
        out
    }

    /// The coefficient of a 0-form (or the zero scalar).
    pub fn scalar_part(&self) -> S {
        self.terms.get(&0).cloned().unwrap_or_else(S::zero)
    }

    /// Coefficient of the top form `f^{1234567}` of a 7-form.
    pub fn top_coeff(&self) -> S {
        self.terms.get(&0x7f).cloned().unwrap_or_else(S::zero)
    }

    /// The 1-form `Σ c_i f^i`.
    pub fn covector(c: &Vector<S>) -> Self {
        let mut out = Self::zero(1);
        for (i, v) in c.0.iter().enumerate() {
            out.add_term(1 << i, v.clone());
        }
        out
    }

    /// Components `(a(f_1), ..., a(f_7))` of a 1-form.
    pub fn covector_components(&self) -> Vector<S> {
        assert_eq!(self.degree, 1, "covector_components needs a 1-form");
        Vector::from_fn(|i| self.terms.get(&(1 << i)).cloned().unwrap_or_else(S::zero))
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.degree == other.degree && (self.clone() - other.clone()).terms.values().all(Ring::is_zero)
    }
}

impl<S: Ring> Add for KForm<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.degree, rhs.degree, "adding forms of different degree");
        let mut out = self;
        for (m, c) in rhs.terms {
            out.add_term(m, c);
        }
        out
    }
}

impl<S: Ring> Sub for KForm<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<S: Ring> Neg for KForm<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            degree: self.degree,
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl<S: Ring + fmt::Display> fmt::Display for KForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (labels, c)) in self.terms().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let idx: String = labels.iter().map(|l| l.to_string()).collect();
            if idx.is_empty() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})f^{idx}")?;
            }
        }
        Ok(())
    }
}

impl<S: Ring + fmt::Display> fmt::Debug for KForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.degree, self)
    }
}

/// `a ∧ b`. When the degrees sum past 7 the result is the zero form of that
/// (capped) degree.
pub fn wedge<S: Ring>(a: &KForm<S>, b: &KForm<S>) -> KForm<S> {
    let degree = (a.degree + b.degree).min(DIM);
    let mut out = KForm::zero(degree);
    if a.degree + b.degree > DIM {
        return out;
    }
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            if ma & mb != 0 {
                continue;
            }
            let c = ca.clone() * cb.clone();
            let c = if merge_sign(*ma, *mb) < 0 { -c } else { c };
            out.add_term(ma | mb, c);
        }
    }
    out
}

/// `v ⌟ a`, contracting the first slot. Interior product of a 0-form is the
/// zero 0-form.
pub fn interior<S: Ring>(v: &Vector<S>, a: &KForm<S>) -> KForm<S> {
    if a.degree == 0 {
        return KForm::zero(0);
    }
    let mut out = KForm::zero(a.degree - 1);
    for (mask, c) in &a.terms {
        let mut position = 0;
        for i in 0..DIM {
            let bit = 1 << i;
            if mask & bit == 0 {
                continue;
            }
            if !v.0[i].is_zero() {
                let t = v.0[i].clone() * c.clone();
                let t = if position % 2 == 1 { -t } else { t };
                out.add_term(mask & !bit, t);
            }
            position += 1;
        }
    }
    out
}

/// `a(v_1, ..., v_k)` by iterated interior products.
pub fn eval_form<S: Ring>(a: &KForm<S>, vs: &[Vector<S>]) -> Result<S> {
    if vs.len() != a.degree {
        return Err(Error::ArityMismatch {
            expected: a.degree,
            got: vs.len(),
        });
    }
    let mut acc = a.clone();
    for v in vs {
        acc = interior(v, &acc);
    }
    Ok(acc.scalar_part())
}

/// Dense 7×7 matrix, 0-based `m.0[row][col]`. As an endomorphism, column
/// `j` is the image of `f_{j+1}`.
#[derive(Clone, PartialEq)]
pub struct Matrix<S>(pub [[S; DIM]; DIM]);

impl<S: Ring> Matrix<S> {
    pub fn zero() -> Self {
        Self::from_fn(|_, _| S::zero())
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> S) -> Self {
        Self(std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))))
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vector<S>; DIM]) -> Self {
        Self::from_fn(|i, j| cols[j].0[i].clone())
    }

    pub fn column(&self, j: usize) -> Vector<S> {
        Vector::from_fn(|i| self.0[i][j].clone())
    }

    pub fn apply(&self, v: &Vector<S>) -> Vector<S> {
        let mut out = Vector::<S>::zero();
        for j in v.support() {
            for i in 0..DIM {
                if !self.0[i][j].is_zero() {
                    out.0[i] = out.0[i].clone() + self.0[i][j].clone() * v.0[j].clone();
                }
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::from_fn(|i, j| {
            (0..DIM).fold(S::zero(), |acc, k| {
                if self.0[i][k].is_zero() || rhs.0[k][j].is_zero() {
                    acc
                } else {
                    acc + self.0[i][k].clone() * rhs.0[k][j].clone()
                }
            })
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_fn(|i, j| c.clone() * self.0[i][j].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(Ring::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..DIM).all(|i| (0..i).all(|j| self.0[i][j].approx_eq(&self.0[j][i])))
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .all(|(a, b)| a.approx_eq(b))
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix::from_fn(|i, j| f(&self.0[i][j]))
    }
}

impl<S: Ring> Add for Matrix<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].clone() + rhs.0[i][j].clone())
    }
}

impl<S: Ring> Sub for Matrix<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].clone() - rhs.0[i][j].clone())
    }
}

impl<S: Ring + fmt::Display> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.0 {
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl<S: Ring + Serialize> Serialize for Matrix<S> {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let rows: Vec<&[S]> = self.0.iter().map(|r| r.as_slice()).collect();
        rows.serialize(s)
    }
}

fn pivot_weight<S: Field>(x: &S) -> f64 {
    if x.is_zero() {
        -1.0
    } else {
        x.to_f64().abs()
    }
}

/// Inverse by Gauss-Jordan elimination with largest-magnitude pivoting.
pub fn invert_matrix<S: Field>(m: &Matrix<S>) -> Option<Matrix<S>> {
    let mut a = m.clone();
    let mut inv = Matrix::<S>::identity();
    for col in 0..DIM {
        let pivot = (col..DIM).max_by(|&x, &y| {
            pivot_weight(&a.0[x][col]).total_cmp(&pivot_weight(&a.0[y][col]))
        })?;
        if a.0[pivot][col].is_zero() {
            return None;
        }
        a.0.swap(pivot, col);
        inv.0.swap(pivot, col);
        let p = a.0[col][col].inv()?;
        for j in 0..DIM {
            a.0[col][j] = a.0[col][j].clone() * p.clone();
            inv.0[col][j] = inv.0[col][j].clone() * p.clone();
        }
        for row in 0..DIM {
            if row == col || a.0[row][col].is_zero() {
                continue;
            }
            let factor = a.0[row][col].clone();
            for j in 0..DIM {
                a.0[row][j] = a.0[row][j].clone() - factor.clone() * a.0[col][j].clone();
                inv.0[row][j] = inv.0[row][j].clone() - factor.clone() * inv.0[col][j].clone();
            }
        }
    }
    Some(inv)
}

pub fn determinant<S: Field>(m: &Matrix<S>) -> S {
    let mut a = m.clone();
    let mut det = S::one();
    for col in 0..DIM {
        let pivot = (col..DIM)
            .max_by(|&x, &y| pivot_weight(&a.0[x][col]).total_cmp(&pivot_weight(&a.0[y][col])))
            .expect("nonempty range");
        if a.0[pivot][col].is_zero() {
            return S::zero();
        }
        if pivot != col {
            a.0.swap(pivot, col);
            det = -det;
        }
        let p = a.0[col][col].clone();
        det = det * p.clone();
        let p_inv = p.inv().expect("nonzero pivot");
        for row in col + 1..DIM {
            if a.0[row][col].is_zero() {
                continue;
            }
            let factor = a.0[row][col].clone() * p_inv.clone();
            for j in col..DIM {
                a.0[row][j] = a.0[row][j].clone() - factor.clone() * a.0[col][j].clone();
            }
        }
    }
    det
}

/// Inertia of a symmetric bilinear form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub negative: usize,
    pub positive: usize,
    pub null: usize,
}

impl Signature {
    /// The split signature `(-,-,-,-,+,+,+)`.
    pub const SPLIT: Signature = Signature {
        negative: 4,
        positive: 3,
        null: 0,
    };
}

/// Sylvester inertia by symmetric congruence (LDLᵀ with symmetric
/// pivoting). A zero diagonal with a nonzero off-diagonal entry `a_ij` is
/// handled by the congruence `e_i -> e_i + e_j`, which puts `2 a_ij` on the
/// diagonal.
pub fn signature<S: Field>(m: &Matrix<S>) -> Signature {
    let mut a: Vec<Vec<S>> = m.0.iter().map(|r| r.to_vec()).collect();
    let n = DIM;
    let mut sig = Signature {
        negative: 0,
        positive: 0,
        null: 0,
    };
    for k in 0..n {
        let diag = (k..n).max_by(|&x, &y| pivot_weight(&a[x][x]).total_cmp(&pivot_weight(&a[y][y])));
        let mut p = diag.filter(|&d| !a[d][d].is_zero());
        if p.is_none() {
            let off = (k..n)
                .flat_map(|i| (k..n).map(move |j| (i, j)))
                .find(|&(i, j)| i != j && !a[i][j].is_zero());
            let Some((i, j)) = off else {
                sig.null += n - k;
                break;
            };
            for c in 0..n {
                let v = a[j][c].clone();
                a[i][c] = a[i][c].clone() + v;
            }
            for r in 0..n {
                let v = a[r][j].clone();
                a[r][i] = a[r][i].clone() + v;
            }
            p = Some(i);
        }
        let p = p.expect("pivot chosen");
        a.swap(p, k);
        for row in a.iter_mut() {
            row.swap(p, k);
        }
        let d = a[k][k].clone();
        match d.signum() {
            1 => sig.positive += 1,
            -1 => sig.negative += 1,
            _ => unreachable!("pivot is nonzero"),
        }
        let d_inv = d.inv().expect("nonzero pivot");
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = a[i][k].clone() * d_inv.clone();
            for j in k + 1..n {
                a[i][j] = a[i][j].clone() - factor.clone() * a[k][j].clone();
            }
            a[i][k] = S::zero();
            a[k][i] = S::zero();
        }
    }
    sig
}

/// A symmetric bilinear form with a lazily cached inverse.
#[derive(Clone)]
pub struct Metric<S> {
    matrix: Matrix<S>,
    inverse: OnceLock<Option<Matrix<S>>>,
}

impl<S: Ring> Metric<S> {
    /// Panics if the matrix is not symmetric.
    pub fn new(matrix: Matrix<S>) -> Self {
        assert!(matrix.is_symmetric(), "metric matrix must be symmetric");
        Self {
            matrix,
            inverse: OnceLock::new(),
        }
    }

    pub fn diagonal(entries: [S; DIM]) -> Self {
        Self::new(Matrix::from_fn(|i, j| {
            if i == j {
                entries[i].clone()
            } else {
                S::zero()
            }
        }))
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    /// `g(f_i, f_j)` for 1-based labels.
    pub fn entry(&self, i: usize, j: usize) -> S {
        self.matrix.0[check_label(i)][check_label(j)].clone()
    }

    /// `Xᵀ M Y`.
    pub fn apply(&self, x: &Vector<S>, y: &Vector<S>) -> S {
        let mut acc = S::zero();
        for i in x.support() {
            for j in y.support() {
                if !self.matrix.0[i][j].is_zero() {
                    acc = acc + x.0[i].clone() * self.matrix.0[i][j].clone() * y.0[j].clone();
                }
            }
        }
        acc
    }

    /// Components of the covector `g(X, ·)`.
    pub fn lower(&self, x: &Vector<S>) -> Vector<S> {
        self.matrix.transpose().apply(x)
    }

    pub fn lower_form(&self, x: &Vector<S>) -> KForm<S> {
        KForm::covector(&self.lower(x))
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(self.matrix.scale(c))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.matrix.scale(&-S::one()))
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> Metric<T> {
        Metric::new(self.matrix.map(f))
    }
}

impl<S: Field> Metric<S> {
    pub fn inverse(&self) -> Result<&Matrix<S>> {
        self.inverse
            .get_or_init(|| invert_matrix(&self.matrix))
            .as_ref()
            .ok_or(Error::DegenerateMetric)
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.inverse().is_ok()
    }

    pub fn determinant(&self) -> S {
        determinant(&self.matrix)
    }

    pub fn signature(&self) -> Signature {
        signature(&self.matrix)
    }

    /// The vector `X` with `g(X, f_i) = c(f_i)` for all `i`.
    pub fn raise(&self, c: &KForm<S>) -> Result<Vector<S>> {
        self.raise_components(&c.covector_components())
    }

    pub fn raise_components(&self, c: &Vector<S>) -> Result<Vector<S>> {
        Ok(self.inverse()?.apply(c))
    }
}

impl<S: Ring> PartialEq for Metric<S> {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl<S: Ring + fmt::Display> fmt::Debug for Metric<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.matrix, f)
    }
}

/// Dense trilinear form on the basis, 0-based `get(i, j, k)`.
#[derive(Clone, PartialEq)]
pub struct Tensor3<S> {
    data: Vec<S>,
}

fn flat(i: usize, j: usize, k: usize) -> usize {
    (i * DIM + j) * DIM + k
}

impl<S: Ring> Tensor3<S> {
    pub fn zero() -> Self {
        Self {
            data: vec![S::zero(); DIM * DIM * DIM],
        }
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(DIM * DIM * DIM);
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    data.push(f(i, j, k));
                }
            }
        }
        Self { data }
    }

    /// Tabulates a 3-form on basis triples.
    pub fn from_form(a: &KForm<S>) -> Self {
        assert_eq!(a.degree(), 3, "from_form needs a 3-form");
        let mut t = Self::zero();
        for (labels, c) in a.terms() {
            let idx = [labels[0] - 1, labels[1] - 1, labels[2] - 1];
            for (perm, sign) in PERMS3 {
                let v = if sign > 0 { c.clone() } else { -c.clone() };
                t.set(idx[perm[0]], idx[perm[1]], idx[perm[2]], v);
            }
        }
        t
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &S {
        &self.data[flat(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: S) {
        self.data[flat(i, j, k)] = v;
    }

    /// `T(X, Y, Z)` by multilinearity, skipping zero coordinates.
    pub fn eval(&self, x: &Vector<S>, y: &Vector<S>, z: &Vector<S>) -> S {
        let ys: Vec<usize> = y.support().collect();
        let zs: Vec<usize> = z.support().collect();
        let mut acc = S::zero();
        for i in x.support() {
            for &j in &ys {
                let xy = x.0[i].clone() * y.0[j].clone();
                for &k in &zs {
                    let t = &self.data[flat(i, j, k)];
                    if !t.is_zero() {
                        acc = acc + xy.clone() * z.0[k].clone() * t.clone();
                    }
                }
            }
        }
        acc
    }

    /// Covector `Z ↦ T(X, Y, Z)` as components.
    pub fn contract_first_two(&self, x: &Vector<S>, y: &Vector<S>) -> Vector<S> {
        Vector::from_fn(|k| {
            let mut acc = S::zero();
            for i in x.support() {
                for j in y.support() {
                    let t = &self.data[flat(i, j, k)];
                    if !t.is_zero() {
                        acc = acc + x.0[i].clone() * y.0[j].clone() * t.clone();
                    }
                }
            }
            acc
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Ring::is_zero)
    }

    /// Nonzero entries as 0-based `((i, j, k), value)`.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = ((usize, usize, usize), &S)> {
        self.data.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(n, v)| {
            ((n / (DIM * DIM), (n / DIM) % DIM, n % DIM), v)
        })
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.data.iter().zip(&other.data).all(|(a, b)| a.approx_eq(b))
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> Tensor3<T> {
        Tensor3 {
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|v| c.clone() * v.clone())
    }

    /// First index whose entry differs between the two tensors.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize, usize)> {
        self.data
            .iter()
            .zip(&other.data)
            .position(|(a, b)| !a.approx_eq(b))
            .map(|n| (n / (DIM * DIM), (n / DIM) % DIM, n % DIM))
    }
}

impl<S: Ring> Add for Tensor3<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            data: self.data.into_iter().zip(rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<S: Ring> Sub for Tensor3<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            data: self.data.into_iter().zip(rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<S: Ring + fmt::Display> fmt::Debug for Tensor3<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for ((i, j, k), v) in self.nonzero_entries() {
            list.entry(&format_args!("({},{},{})={}", i + 1, j + 1, k + 1, v));
        }
        list.finish()
    }
}

const PERMS3: [([usize; 3], i32); 6] = [
    ([0, 1, 2], 1),
    ([1, 2, 0], 1),
    ([2, 0, 1], 1),
    ([1, 0, 2], -1),
    ([0, 2, 1], -1),
    ([2, 1, 0], -1),
];
