//! Projections of `F` onto the class components, the class report, and the
//! normality and paracontact defects.
//!
//! Notation: `A(X, Z) = F(φ²X, φ²Z, ξ)` and `B(X, Z) = F(φX, φZ, ξ)`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::apcms::{axiom_audit, f_tensor, is_killing, Apcms, FTensor};
use crate::error::{Error, Result};
use crate::exterior::{Matrix, Tensor3, Vector, DIM};
use crate::liealg::Connection;
use crate::scalar::{Field, Ring};

/// The combinations of classes that have explicit projection formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Combo {
    #[serde(rename = "F1+F2")]
    F1F2,
    #[serde(rename = "F3+F4")]
    F3F4,
    #[serde(rename = "F5+F8")]
    F5F8,
    #[serde(rename = "F6+F7")]
    F6F7,
    #[serde(rename = "F9")]
    F9,
    #[serde(rename = "F10")]
    F10,
}

impl Combo {
    pub const ALL: [Combo; 6] = [Combo::F1F2, Combo::F3F4, Combo::F5F8, Combo::F6F7, Combo::F9, Combo::F10];

    pub fn name(self) -> &'static str {
        match self {
            Combo::F1F2 => "F1+F2",
            Combo::F3F4 => "F3+F4",
            Combo::F5F8 => "F5+F8",
            Combo::F6F7 => "F6+F7",
            Combo::F9 => "F9",
            Combo::F10 => "F10",
        }
    }

    /// `(s, t)` in `h(X, Z) = A(X, Z) + sB(X, Z) + t(A(Z, X) + sB(Z, X))`
    /// for the four parts of the W₂ block.
    fn w2_signs(self) -> Option<(i64, i64)> {
        match self {
            Combo::F5F8 => Some((-1, 1)),
            Combo::F6F7 => Some((-1, -1)),
            Combo::F9 => Some((1, -1)),
            Combo::F10 => Some((1, 1)),
            Combo::F1F2 | Combo::F3F4 => None,
        }
    }
}

impl fmt::Display for Combo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Combo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        Combo::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(&key))
            .ok_or(Error::Unknown {
                kind: "pattern",
                name: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    #[default]
    Grouped,
    Fine,
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Granularity::Grouped => "grouped",
            Granularity::Fine => "fine",
        })
    }
}

impl FromStr for Granularity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grouped" => Ok(Granularity::Grouped),
            "fine" => Ok(Granularity::Fine),
            other => Err(Error::Unknown {
                kind: "granularity",
                name: other.to_string(),
            }),
        }
    }
}

/// `T'(f_a, f_b, f_c) = T(M₁f_a, M₂f_b, M₃f_c)`; `None` is the identity.
pub fn pullback<S: Ring>(t: &Tensor3<S>, ms: [Option<&Matrix<S>>; 3]) -> Tensor3<S> {
    let mut cur = t.clone();
    for (slot, m) in ms.into_iter().enumerate() {
        let Some(m) = m else { continue };
        let prev = cur;
        cur = Tensor3::from_fn(|i, j, k| {
            let idx = [i, j, k];
            let mut acc = S::zero();
            for a in 0..DIM {
                let c = &m.0[a][idx[slot]];
                if c.is_zero() {
                    continue;
                }
                let mut src = idx;
                src[slot] = a;
                let v = prev.get(src[0], src[1], src[2]);
                if !v.is_zero() {
                    acc = acc + c.clone() * v.clone();
                }
            }
            acc
        });
    }
    cur
}

/// `(i, j) ↦ T(f_i, f_j, v)`.
fn contract_last<S: Ring>(t: &Tensor3<S>, v: &Vector<S>) -> Matrix<S> {
    Matrix::from_fn(|i, j| {
        let mut acc = S::zero();
        for k in v.support() {
            let e = t.get(i, j, k);
            if !e.is_zero() {
                acc = acc + e.clone() * v.0[k].clone();
            }
        }
        acc
    })
}

struct Frame<S> {
    eta: Vector<S>,
    xi: Vector<S>,
    phi: Matrix<S>,
    phi2: Matrix<S>,
}

impl<S: Ring> Frame<S> {
    fn new(s: &Apcms<S>) -> Self {
        let phi = s.phi_matrix().clone();
        Self {
            eta: s.eta().clone(),
            xi: s.xi().clone(),
            phi2: phi.mul(&phi),
            phi,
        }
    }

    fn eta(&self, i: usize) -> &S {
        &self.eta.0[i]
    }
}

/// `F¹²(X,Y,Z) = η(X){η(Y)F(ξ,ξ,φ²Z) - η(Z)F(ξ,ξ,φ²Y)}`.
pub fn proj_f12<S: Ring>(f: &FTensor<S>, s: &Apcms<S>) -> FTensor<S> {
    let fr = Frame::new(s);
    let c: Vec<S> = (0..DIM).map(|k| f.eval(&fr.xi, &fr.xi, &fr.phi2.column(k))).collect();
    Tensor3::from_fn(|i, j, k| {
        if fr.eta(i).is_zero() {
            return S::zero();
        }
        fr.eta(i).clone() * (fr.eta(j).clone() * c[k].clone() - fr.eta(k).clone() * c[j].clone())
    })
}

/// `F¹¹(X,Y,Z) = η(X)F(ξ,φ²Y,φ²Z)`.
pub fn proj_f11<S: Ring>(f: &FTensor<S>, s: &Apcms<S>) -> FTensor<S> {
    let fr = Frame::new(s);
    let h = pullback(f, [None, Some(&fr.phi2), Some(&fr.phi2)]);
    let c = Matrix::from_fn(|j, k| {
        let mut acc = S::zero();
        for a in fr.xi.support() {
            acc = acc + fr.xi.0[a].clone() * h.get(a, j, k).clone();
        }
        acc
    });
    Tensor3::from_fn(|i, j, k| fr.eta(i).clone() * c.0[j][k].clone())
}

fn w2_from<S: Ring>(fr: &Frame<S>, h: &Matrix<S>) -> FTensor<S> {
    Tensor3::from_fn(|i, j, k| fr.eta(k).clone() * h.0[i][j].clone() - fr.eta(j).clone() * h.0[i][k].clone())
}

/// `F^{W₂}(X,Y,Z) = -η(Y)A(X,Z) + η(Z)A(X,Y)`.
pub fn proj_w2<S: Ring>(f: &FTensor<S>, s: &Apcms<S>) -> FTensor<S> {
    let fr = Frame::new(s);
    let a = contract_last(&pullback(f, [Some(&fr.phi2), Some(&fr.phi2), None]), &fr.xi);
    w2_from(&fr, &a)
}

/// The explicit combination for `pattern`:
/// `F³+F⁴ = ½{F(φ²X,φ²Y,φ²Z) + F(φX,φ²Y,φZ)}`, `F¹+F²` with the opposite
/// sign, and for the W₂ parts `4P = -η(Y)h(X,Z) + η(Z)h(X,Y)`.
pub fn proj_combo<S: Ring>(f: &FTensor<S>, s: &Apcms<S>, pattern: Combo) -> FTensor<S> {
    let fr = Frame::new(s);
    let half = S::from_ratio(1, 2);
    match pattern.w2_signs() {
        None => {
            let horizontal = pullback(f, [Some(&fr.phi2), Some(&fr.phi2), Some(&fr.phi2)]);
            let mixed = pullback(f, [Some(&fr.phi), Some(&fr.phi2), Some(&fr.phi)]);
            let sum = match pattern {
                Combo::F3F4 => horizontal + mixed,
                _ => horizontal - mixed,
            };
            sum.scale(&half)
        }
        Some((sign_s, sign_t)) => {
            let a = contract_last(&pullback(f, [Some(&fr.phi2), Some(&fr.phi2), None]), &fr.xi);
            let b = contract_last(&pullback(f, [Some(&fr.phi), Some(&fr.phi), None]), &fr.xi);
            let (cs, ct) = (S::from_int(sign_s), S::from_int(sign_t));
            let base = a + b.scale(&cs);
            let h = base.clone() + base.transpose().scale(&ct);
            w2_from(&fr, &h).scale(&S::from_ratio(1, 4))
        }
    }
}

/// `(F⁵, F⁸)` with
/// `F⁵ = θ/6 {η(Y)g(φX,φZ) - η(Z)g(φX,φY)}`, `θ = Σ g^{ij}(F⁵+F⁸)(f_i,f_j,ξ)`
/// and `F⁸ = (F⁵+F⁸) - F⁵`.
pub fn proj_f5_f8_split<S: Field>(f: &FTensor<S>, s: &Apcms<S>) -> Result<(FTensor<S>, FTensor<S>)> {
    let fr = Frame::new(s);
    let combo = proj_combo(f, s, Combo::F5F8);
    let ginv = s.metric().inverse()?;
    let c = contract_last(&combo, &fr.xi);
    let mut theta = S::zero();
    for i in 0..DIM {
        for j in 0..DIM {
            if !ginv.0[i][j].is_zero() && !c.0[i][j].is_zero() {
                theta = theta + ginv.0[i][j].clone() * c.0[i][j].clone();
            }
        }
    }
    let gphi = Matrix::from_fn(|i, j| s.metric().apply(&fr.phi.column(i), &fr.phi.column(j)));
    let coeff = theta * S::from_ratio(1, 6);
    let f5 = w2_from(&fr, &gphi).scale(&coeff);
    let f8 = combo - f5.clone();
    Ok((f5, f8))
}

/// `F(X,Y,φZ) + F(φX,Y,Z) + F(X,φY,η(Z)ξ)`.
pub fn normality_defect<S: Ring>(f: &FTensor<S>, s: &Apcms<S>) -> FTensor<S> {
    let fr = Frame::new(s);
    let first = pullback(f, [None, None, Some(&fr.phi)]);
    let second = pullback(f, [Some(&fr.phi), None, None]);
    let c = contract_last(&pullback(f, [None, Some(&fr.phi), None]), &fr.xi);
    let third = Tensor3::from_fn(|i, j, k| fr.eta(k).clone() * c.0[i][j].clone());
    first + second + third
}

/// `V(X, Z) = ∇_X Z - P(ξ, ∇_X P(ξ, Z)) + ∇_{P(ξ,X)} P(ξ, Z) - P(ξ, ∇_{P(ξ,X)} Z)`.
pub fn normality_vector<S: Ring>(s: &Apcms<S>, conn: &Connection<S>, x: &Vector<S>, z: &Vector<S>) -> Vector<S> {
    let px = s.phi_of(x);
    let pz = s.phi_of(z);
    conn.nabla_vec(x, z) - s.phi_of(&conn.nabla_vec(x, &pz)) + conn.nabla_vec(&px, &pz)
        - s.phi_of(&conn.nabla_vec(&px, z))
}

/// `(i, j, k) ↦ g_{4,3}(V(f_i, f_k), f_j)`; equals [`normality_defect`]
/// whenever the structure satisfies the axioms.
pub fn normality_via_vectors<S: Ring>(s: &Apcms<S>, conn: &Connection<S>) -> FTensor<S> {
    let g43 = s.bundle().metric();
    let mut t = Tensor3::zero();
    for i in 0..DIM {
        for k in 0..DIM {
            let v = g43.lower(&normality_vector(s, conn, &Vector::f(i + 1), &Vector::f(k + 1)));
            for j in 0..DIM {
                t.set(i, j, k, v.0[j].clone());
            }
        }
    }
    t
}

/// `D(X,Y) = 2g_{4,3}(P(ξ,X),Y) - g_{4,3}(∇_Xξ,Y) + g_{4,3}(∇_Yξ,X)`.
pub fn paracontact_defect<S: Ring>(s: &Apcms<S>, conn: &Connection<S>) -> Matrix<S> {
    let g43 = s.bundle().metric();
    let d = s.nabla_xi(conn);
    let two = S::from_int(2);
    Matrix::from_fn(|i, j| {
        let (x, y) = (Vector::f(i + 1), Vector::f(j + 1));
        two.clone() * g43.apply(&s.phi_of(&x), &y) - g43.apply(&d[i], &y) + g43.apply(&d[j], &x)
    })
}

/// A nonzero tensor entry, 1-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub triple: [usize; 3],
    pub value: String,
}

fn witness_of<S: Ring + fmt::Display>(t: &Tensor3<S>) -> Option<Witness> {
    t.nonzero_entries().next().map(|((i, j, k), v)| Witness {
        triple: [i + 1, j + 1, k + 1],
        value: v.to_string(),
    })
}

/// Presence of one class or group. `present` is `None` when the available
/// formulas cannot decide it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassEntry {
    pub name: String,
    pub present: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureChecks {
    pub normal: bool,
    pub paracontact: bool,
    pub killing: bool,
    pub xi_parallel: bool,
    /// Sum of the projections equals `F`.
    pub reconstructs: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub granularity: Granularity,
    pub entries: Vec<ClassEntry>,
    pub checks: StructureChecks,
}

impl ClassReport {
    pub fn entry(&self, name: &str) -> Option<&ClassEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Names of entries known to be present.
    pub fn present(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| e.present == Some(true))
            .map(|e| e.name.as_str())
            .collect()
    }

    pub fn absent(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| e.present == Some(false))
            .map(|e| e.name.as_str())
            .collect()
    }
}

/// All projections of `F` by name, in report order: the eight groups.
pub fn grouped_projections<S: Ring>(f: &FTensor<S>, s: &Apcms<S>) -> Vec<(&'static str, FTensor<S>)> {
    let mut out: Vec<(&'static str, FTensor<S>)> =
        Combo::ALL.iter().map(|&c| (c.name(), proj_combo(f, s, c))).collect();
    out.push(("F11", proj_f11(f, s)));
    out.push(("F12", proj_f12(f, s)));
    out
}

fn entry<S: Ring + fmt::Display>(name: impl Into<String>, t: &Tensor3<S>) -> ClassEntry {
    let witness = witness_of(t);
    ClassEntry {
        name: name.into(),
        present: Some(witness.is_some()),
        witness,
    }
}

fn undecided(name: &str, group_present: bool) -> ClassEntry {
    ClassEntry {
        name: name.to_string(),
        present: if group_present { None } else { Some(false) },
        witness: None,
    }
}

/// Computes `F` (both routes) and classifies the structure.
pub fn classify<S: Field + fmt::Display>(
    s: &Apcms<S>,
    conn: &Connection<S>,
    granularity: Granularity,
) -> Result<ClassReport> {
    let f = f_tensor(s, conn)?;
    classify_tensor(&f, s, conn, granularity)
}

/// Classification from a precomputed `F`.
pub fn classify_tensor<S: Field + fmt::Display>(
    f: &FTensor<S>,
    s: &Apcms<S>,
    conn: &Connection<S>,
    granularity: Granularity,
) -> Result<ClassReport> {
    let groups = grouped_projections(f, s);
    let mut sum = Tensor3::zero();
    for (_, t) in &groups {
        sum = sum + t.clone();
    }
    let reconstructs = sum.first_difference(f).is_none();

    let entries = match granularity {
        Granularity::Grouped => groups.iter().map(|(n, t)| entry(*n, t)).collect(),
        Granularity::Fine => {
            let by_name = |n: &str| &groups.iter().find(|(m, _)| *m == n).expect("group exists").1;
            let (f5, f8) = proj_f5_f8_split(f, s)?;
            let p12 = !by_name("F1+F2").is_zero();
            let p34 = !by_name("F3+F4").is_zero();
            let p67 = !by_name("F6+F7").is_zero();
            vec![
                undecided("F1", p12),
                undecided("F2", p12),
                undecided("F3", p34),
                undecided("F4", p34),
                entry("F5", &f5),
                undecided("F6", p67),
                undecided("F7", p67),
                entry("F8", &f8),
                entry("F9", by_name("F9")),
                entry("F10", by_name("F10")),
                entry("F11", by_name("F11")),
                entry("F12", by_name("F12")),
            ]
        }
    };

    let normality = normality_defect(f, s);
    if axiom_audit(s).all_pass() {
        let via_vectors = normality_via_vectors(s, conn);
        if let Some((i, j, k)) = normality.first_difference(&via_vectors) {
            return Err(Error::Inconsistent(format!(
                "normality tensor at (f{}, f{}, f{}) is {} from F but {} from the vector form",
                i + 1,
                j + 1,
                k + 1,
                normality.get(i, j, k),
                via_vectors.get(i, j, k)
            )));
        }
    }

    let checks = StructureChecks {
        normal: normality.is_zero(),
        paracontact: paracontact_defect(s, conn).is_zero(),
        killing: is_killing(s, conn),
        xi_parallel: s.nabla_xi(conn).iter().all(Vector::is_zero),
        reconstructs,
    };
    Ok(ClassReport {
        granularity,
        entries,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::g2::{standard_phi, G2Bundle, Mode};
    use crate::liealg::LieAlgebra;
    use crate::presets;
    use crate::scalar::QuadExt;

    type Q = QuadExt;

    fn q(s: &str) -> Q {
        s.parse().unwrap()
    }

    fn example(mode: Mode) -> (Apcms<Q>, Connection<Q>, FTensor<Q>) {
        let bundle = presets::example_bundle(mode).unwrap();
        let conn = Connection::levi_civita(&presets::example_algebra(), bundle.metric()).unwrap();
        let s = Apcms::induce(&bundle, presets::example_xi(mode)).unwrap();
        let f = f_tensor(&s, &conn).unwrap();
        (s, conn, f)
    }

    #[test]
    fn combo_names_parse() {
        assert_eq!("F5+F8".parse::<Combo>().unwrap(), Combo::F5F8);
        assert_eq!("f10".parse::<Combo>().unwrap(), Combo::F10);
        assert!("F13".parse::<Combo>().is_err());
        assert!("coarse".parse::<Granularity>().is_err());
    }

    #[test]
    fn literal_example_values() {
        let (s, _, f) = example(Mode::Literal);
        assert!(proj_f12(&f, &s).is_zero());
        assert!(proj_f11(&f, &s).is_zero());
        assert!(proj_combo(&f, &s, Combo::F9).is_zero());
        let four = Q::int(4);
        let c58 = proj_combo(&f, &s, Combo::F5F8);
        assert_eq!(four.clone() * c58.get(6, 1, 4).clone(), q("9/128*sqrt(2)"));
        let c67 = proj_combo(&f, &s, Combo::F6F7);
        assert!(c67.get(6, 1, 4).is_zero());
        assert!(!proj_combo(&f, &s, Combo::F10).is_zero());
        let c12 = proj_combo(&f, &s, Combo::F1F2);
        assert_eq!(*c12.get(6, 6, 2), q("-7/2048*sqrt(2)"));
        let c34 = proj_combo(&f, &s, Combo::F3F4);
        assert_eq!(*c34.get(6, 2, 6), q("-9/2048*sqrt(2)"));
        assert!(c34.get(6, 3, 5).is_zero());
    }

    #[test]
    fn normalized_example_report() {
        let (s, conn, f) = example(Mode::Normalized);
        let report = classify_tensor(&f, &s, &conn, Granularity::Grouped).unwrap();
        assert_eq!(report.present(), vec!["F3+F4", "F5+F8"]);
        assert!(report.checks.reconstructs);
        assert!(report.checks.killing);
        assert!(!report.checks.normal);
        assert!(!report.checks.paracontact);
        let c34 = proj_combo(&f, &s, Combo::F3F4);
        assert_eq!(*c34.get(6, 2, 6), Q::int(-1));
        assert_eq!(*c34.get(6, 6, 2), Q::int(1));
        let c58 = proj_combo(&f, &s, Combo::F5F8);
        assert_eq!(*c58.get(6, 1, 4), Q::ratio(1, 2));
    }

    #[test]
    fn literal_reconstruction_fails() {
        let (s, conn, f) = example(Mode::Literal);
        let report = classify_tensor(&f, &s, &conn, Granularity::Grouped).unwrap();
        assert!(!report.checks.reconstructs);
        assert_eq!(report.present(), vec!["F1+F2", "F3+F4", "F5+F8", "F10"]);
    }

    #[test]
    fn fine_report_leaves_pairs_open() {
        let (s, conn, f) = example(Mode::Normalized);
        let report = classify_tensor(&f, &s, &conn, Granularity::Fine).unwrap();
        assert_eq!(report.entries.len(), 12);
        assert_eq!(report.entry("F3").unwrap().present, None);
        assert_eq!(report.entry("F1").unwrap().present, Some(false));
        // Killing ξ: the trace part vanishes
        assert_eq!(report.entry("F5").unwrap().present, Some(false));
        assert_eq!(report.entry("F8").unwrap().present, Some(true));
    }

    #[test]
    fn witnesses_reevaluate() {
        let (s, conn, f) = example(Mode::Normalized);
        let report = classify_tensor(&f, &s, &conn, Granularity::Grouped).unwrap();
        for e in report.entries.iter().filter(|e| e.present == Some(true)) {
            let w = e.witness.as_ref().unwrap();
            let t = proj_combo(&f, &s, e.name.parse().unwrap());
            let v = t.get(w.triple[0] - 1, w.triple[1] - 1, w.triple[2] - 1);
            assert_eq!(v.to_string(), w.value);
        }
    }

    #[test]
    fn split_resums() {
        let (s, _, f) = example(Mode::Literal);
        let (f5, f8) = proj_f5_f8_split(&f, &s).unwrap();
        assert_eq!(f5 + f8, proj_combo(&f, &s, Combo::F5F8));
    }

    #[test]
    fn standard_abelian_paracontact_defect() {
        let bundle = G2Bundle::normalized(standard_phi::<Q>(), 1).unwrap();
        let conn = Connection::levi_civita(&LieAlgebra::abelian(), bundle.metric()).unwrap();
        let s = Apcms::induce(&bundle, Vector::f(1)).unwrap();
        let d = paracontact_defect(&s, &conn);
        assert_eq!(d.0[1][6], Q::int(-2));
        let report = classify(&s, &conn, Granularity::Grouped).unwrap();
        assert!(report.present().is_empty());
        assert!(report.checks.normal && report.checks.xi_parallel && !report.checks.paracontact);
    }
}
