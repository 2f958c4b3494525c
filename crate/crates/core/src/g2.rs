//! G₂* structure bundle: the 3-form, the metric and volume it induces, and
//! the cross product `P` with `φ(X, Y, Z) = g(P(X, Y), Z)`.
//!
//! The metric comes from the Gram identity
//! `(X⌟φ)∧(Y⌟φ)∧φ = 6 g(X, Y) vol`. Given `φ` alone, the volume is fixed by
//! asking that `vol` be the metric volume of `g`: with `B` the matrix of top
//! coefficients and `vol = c f^{1..7}`, `B = 6c g` and `det g = c²`, so
//! `det B = 6⁷ c⁹`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{eval_form, interior, wedge, KForm, Matrix, Metric, Signature, Vector, DIM};
use crate::scalar::{Field, Ring};

/// Labels of the top form `f^{1234567}`.
pub const TOP: [usize; DIM] = [1, 2, 3, 4, 5, 6, 7];

/// How the metric and volume of a bundle were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Metric and volume taken as given, even if not mutually normalized.
    Literal,
    /// Metric and volume recomputed from `φ` by [`calibrate`].
    Normalized,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Literal => "literal",
            Mode::Normalized => "normalized",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(Mode::Literal),
            "normalized" => Ok(Mode::Normalized),
            other => Err(Error::Unknown {
                kind: "mode",
                name: other.to_string(),
            }),
        }
    }
}

/// `-e^127 - e^135 + e^146 + e^236 + e^245 - e^347 + e^567`.
pub fn standard_phi<S: Ring>() -> KForm<S> {
    KForm::from_terms(
        3,
        [
            (&[1usize, 2, 7][..], S::from_int(-1)),
            (&[1, 3, 5][..], S::from_int(-1)),
            (&[1, 4, 6][..], S::from_int(1)),
            (&[2, 3, 6][..], S::from_int(1)),
            (&[2, 4, 5][..], S::from_int(1)),
            (&[3, 4, 7][..], S::from_int(-1)),
            (&[5, 6, 7][..], S::from_int(1)),
        ],
    )
}

/// `c f^{1234567}`.
pub fn volume_form<S: Ring>(c: S) -> KForm<S> {
    KForm::monomial(&TOP, c)
}

fn require_three_form<S: Ring>(phi: &KForm<S>) -> Result<()> {
    if phi.degree() != 3 {
        return Err(Error::NotG2Form(format!("expected a 3-form, got degree {}", phi.degree())));
    }
    Ok(())
}

/// The table `B[i][j] = (f_i⌟φ)∧(f_j⌟φ)∧φ` of 7-forms (0-based).
pub fn gram<S: Ring>(phi: &KForm<S>) -> Result<Vec<Vec<KForm<S>>>> {
    require_three_form(phi)?;
    let contracted: Vec<KForm<S>> = (1..=DIM).map(|i| interior(&Vector::f(i), phi)).collect();
    let mut table = vec![vec![KForm::zero(DIM); DIM]; DIM];
    for i in 0..DIM {
        let left = wedge(&contracted[i], phi);
        for j in i..DIM {
            let b = wedge(&contracted[j], &left);
            table[j][i] = b.clone();
            table[i][j] = b;
        }
    }
    Ok(table)
}

/// Top coefficients of [`gram`].
pub fn gram_matrix<S: Ring>(phi: &KForm<S>) -> Result<Matrix<S>> {
    let table = gram(phi)?;
    Ok(Matrix::from_fn(|i, j| table[i][j].top_coeff()))
}

/// `g(f_i, f_j) = B[i][j] / (6 vol)`, with `vol` taken as given.
pub fn metric_from_vol<S: Field>(phi: &KForm<S>, vol: &KForm<S>) -> Result<Metric<S>> {
    if vol.degree() != DIM {
        return Err(Error::validation("vol", format!("expected a 7-form, got degree {}", vol.degree())));
    }
    let c = vol.top_coeff();
    if c.is_zero() {
        return Err(Error::validation("vol", "volume form is zero"));
    }
    let b = gram_matrix(phi)?;
    let six_c_inv = (S::from_int(6) * c).inv().ok_or(Error::DivisionByZero)?;
    Ok(Metric::new(b.scale(&six_c_inv)))
}

/// Metric of signature (4,3) and its metric volume induced by `φ`.
///
/// `orientation` is the sign the volume coefficient must have; the sign of
/// `c` is forced by `det B`, so a mismatch means `φ` induces the opposite
/// orientation and is rejected.
pub fn calibrate<S: Field + fmt::Display>(phi: &KForm<S>, orientation: i32) -> Result<(Metric<S>, KForm<S>)> {
    if orientation != 1 && orientation != -1 {
        return Err(Error::validation("orientation", format!("must be +1 or -1, got {orientation}")));
    }
    let b = gram_matrix(phi)?;
    let det = crate::exterior::determinant(&b);
    if det.is_zero() {
        return Err(Error::NotG2Form("Gram matrix of the 3-form is degenerate".into()));
    }
    let c9 = det.div(&S::from_int(6i64.pow(7)))?;
    let c = c9.nth_root(9).ok_or_else(|| Error::UnrepresentableCalibration {
        root: 9,
        value: c9.to_string(),
    })?;
    if c.signum() != orientation {
        return Err(Error::NotG2Form(format!(
            "volume coefficient {c} has the opposite sign to orientation {orientation:+}"
        )));
    }
    let vol = volume_form(c);
    let g = metric_from_vol(phi, &vol)?;
    let sig = g.signature();
    if sig != Signature::SPLIT {
        return Err(Error::NotG2Form(format!(
            "induced metric has signature ({}, {}) with {} null directions",
            sig.negative, sig.positive, sig.null
        )));
    }
    Ok((g, vol))
}

/// A 3-form together with its metric `g_{4,3}`, volume form and cross
/// product table.
#[derive(Clone)]
pub struct G2Bundle<S> {
    phi: KForm<S>,
    g: Metric<S>,
    vol: KForm<S>,
    cross: Vec<Vector<S>>,
    mode: Mode,
}

impl<S: Field + fmt::Display> G2Bundle<S> {
    /// Metric from `(φ, vol)` as given.
    pub fn literal(phi: KForm<S>, vol: KForm<S>) -> Result<Self> {
        let g = metric_from_vol(&phi, &vol)?;
        Self::with_metric(phi, g, vol, Mode::Literal)
    }

    /// Metric and volume from [`calibrate`].
    pub fn normalized(phi: KForm<S>, orientation: i32) -> Result<Self> {
        let (g, vol) = calibrate(&phi, orientation)?;
        Self::with_metric(phi, g, vol, Mode::Normalized)
    }

    /// Explicit metric; only nondegeneracy and signature are checked.
    pub fn with_metric(phi: KForm<S>, g: Metric<S>, vol: KForm<S>, mode: Mode) -> Result<Self> {
        require_three_form(&phi)?;
        let sig = g.signature();
        if sig != Signature::SPLIT {
            return Err(Error::NotG2Form(format!(
                "metric has signature ({}, {}) with {} null directions",
                sig.negative, sig.positive, sig.null
            )));
        }
        let mut cross = Vec::with_capacity(DIM * DIM);
        for i in 1..=DIM {
            let xi = interior(&Vector::f(i), &phi);
            for j in 1..=DIM {
                let covector = interior(&Vector::f(j), &xi);
                cross.push(g.raise(&covector)?);
            }
        }
        Ok(Self {
            phi,
            g,
            vol,
            cross,
            mode,
        })
    }
}

impl<S: Ring> G2Bundle<S> {
    pub fn phi(&self) -> &KForm<S> {
        &self.phi
    }

    /// The metric `g_{4,3}` of signature (4,3).
    pub fn metric(&self) -> &Metric<S> {
        &self.g
    }

    pub fn vol(&self) -> &KForm<S> {
        &self.vol
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// `P(f_i, f_j)` for 1-based labels.
    pub fn cross_basis(&self, i: usize, j: usize) -> &Vector<S> {
        &self.cross[(i - 1) * DIM + (j - 1)]
    }

    pub fn cross_product(&self, x: &Vector<S>, y: &Vector<S>) -> Vector<S> {
        let mut out = Vector::zero();
        for i in x.support() {
            for j in y.support() {
                let p = &self.cross[i * DIM + j];
                if !p.is_zero() {
                    out = out + p.scale(&(x.0[i].clone() * y.0[j].clone()));
                }
            }
        }
        out
    }

    /// `φ(X, Y, Z)`.
    pub fn eval_phi(&self, x: &Vector<S>, y: &Vector<S>, z: &Vector<S>) -> S {
        eval_form(&self.phi, &[x.clone(), y.clone(), z.clone()]).expect("3-form takes three arguments")
    }

    /// Nonzero `P(f_i, f_j)` with `i < j` (1-based).
    pub fn nonzero_cross_products(&self) -> Vec<(usize, usize, Vector<S>)> {
        let mut out = Vec::new();
        for i in 1..=DIM {
            for j in i + 1..=DIM {
                let p = self.cross_basis(i, j);
                if !p.is_zero() {
                    out.push((i, j, p.clone()));
                }
            }
        }
        out
    }

    /// Coefficientwise conversion, e.g. to the float backend.
    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> G2Bundle<T> {
        G2Bundle {
            phi: self.phi.map(&f),
            g: self.g.map(&f),
            vol: self.vol.map(&f),
            cross: self.cross.iter().map(|v| v.map(&f)).collect(),
            mode: self.mode,
        }
    }
}

impl<S: Ring + fmt::Display> fmt::Debug for G2Bundle<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("G2Bundle")
            .field("phi", &self.phi)
            .field("vol", &self.vol)
            .field("mode", &self.mode)
            .finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::scalar::QuadExt;

    type Q = QuadExt;

    fn f(i: usize) -> Vector<Q> {
        Vector::f(i)
    }

    #[test]
    fn standard_phi_terms() {
        let phi = standard_phi::<Q>();
        assert_eq!(phi.len(), 7);
        assert_eq!(phi.coeff(&[1, 2, 7]), Q::int(-1));
        assert_eq!(phi.coeff(&[5, 6, 7]), Q::int(1));
    }

    #[test]
    fn gram_entries() {
        let b = gram_matrix(&presets::example_phi::<Q>()).unwrap();
        assert_eq!(b.0[1][1], Q::int(3));
        assert_eq!(b.0[0][6], Q::ratio(-3, 2));
        let b = gram_matrix(&standard_phi::<Q>()).unwrap();
        assert_eq!(b.0[0][0], Q::int(-6));
        assert!(gram(&KForm::<Q>::zero(2)).is_err());
    }

    #[test]
    fn literal_metric_matches_reference() {
        let g = metric_from_vol(&presets::example_phi::<Q>(), &presets::example_vol()).unwrap();
        assert_eq!(g.entry(2, 2), Q::int(-2));
        assert_eq!(g.entry(1, 7), Q::int(1));
        assert_eq!(g.entry(3, 6), Q::int(2));
        assert_eq!(g.entry(4, 5), Q::int(-2));
        assert!(metric_from_vol(&presets::example_phi::<Q>(), &volume_form(Q::int(0))).is_err());
    }

    #[test]
    fn calibrate_standard() {
        let (g, vol) = calibrate(&standard_phi::<Q>(), 1).unwrap();
        let d = |s: i64| Q::int(s);
        assert_eq!(g, Metric::diagonal([d(-1), d(-1), d(-1), d(-1), d(1), d(1), d(1)]));
        assert_eq!(vol, volume_form(Q::int(1)));
        assert!(calibrate(&standard_phi::<Q>(), -1).is_err());
    }

    #[test]
    fn calibrate_example() {
        let phi = presets::example_phi::<Q>();
        let (g, vol) = calibrate(&phi, -1).unwrap();
        assert_eq!(vol.top_coeff(), Q::ratio(-1, 2));
        assert_eq!(g.entry(2, 2), Q::int(-1));
        assert_eq!(g.determinant(), Q::ratio(1, 4));
        // 6 c g reproduces B
        let b = gram_matrix(&phi).unwrap();
        assert_eq!(g.matrix().scale(&Q::int(-3)), b);
        assert!(matches!(calibrate(&KForm::<Q>::zero(3), 1), Err(Error::NotG2Form(_))));
    }

    #[test]
    fn literal_cross_products() {
        let bundle = presets::example_bundle(Mode::Literal).unwrap();
        assert_eq!(*bundle.cross_basis(5, 6), -f(7));
        assert_eq!(*bundle.cross_basis(1, 2), f(1).scale(&Q::ratio(-1, 2)));
        assert_eq!(bundle.nonzero_cross_products().len(), 15);
        let normalized = presets::example_bundle(Mode::Normalized).unwrap();
        for i in 1..=DIM {
            for j in 1..=DIM {
                assert_eq!(*normalized.cross_basis(i, j), bundle.cross_basis(i, j).scale(&Q::int(2)));
            }
        }
    }

    #[test]
    fn cross_product_recovers_phi() {
        for bundle in [
            presets::example_bundle(Mode::Literal).unwrap(),
            G2Bundle::normalized(standard_phi::<Q>(), 1).unwrap(),
        ] {
            for i in 1..=DIM {
                for j in 1..=DIM {
                    let p = bundle.cross_basis(i, j);
                    assert_eq!(*p, -bundle.cross_basis(j, i).clone());
                    for k in 1..=DIM {
                        assert_eq!(
                            bundle.metric().apply(p, &f(k)),
                            bundle.eval_phi(&f(i), &f(j), &f(k))
                        );
                    }
                }
            }
        }
        let std = G2Bundle::normalized(standard_phi::<Q>(), 1).unwrap();
        assert_eq!(*std.cross_basis(5, 6), f(7));
    }
}
