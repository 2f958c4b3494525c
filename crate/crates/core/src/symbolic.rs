//! Polynomials in the components `a1 .. a7` of a symbolic `ξ`, and the
//! deduction chains that rule out normal, paracontact and `F^{W₂} = 0`
//! structures on the worked example.
//!
//! A chain step evaluates a tensor at basis arguments, substitutes the
//! variables already known to vanish, and reads off conclusions of two
//! shapes only: a single-variable monomial forces that variable to vanish,
//! and a monomial in several variables records a product constraint that is
//! split into cases at the end.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::apcms::{f_tensor_via_form, Apcms};
use crate::classify::{normality_defect, paracontact_defect};
use crate::error::{Error, Result};
use crate::exterior::{Metric, Vector, DIM};
use crate::g2::G2Bundle;
use crate::liealg::{Connection, LieAlgebra};
use crate::scalar::{Field, QuadExt, Rational, Ring};

type Exponent = [u8; DIM];

/// Sparse polynomial with [`QuadExt`] coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Exponent, QuadExt>,
}

impl Poly {
    pub fn constant(c: QuadExt) -> Self {
        let mut terms = BTreeMap::new();
        if !Ring::is_zero(&c) {
            terms.insert([0; DIM], c);
        }
        Self { terms }
    }

    /// The variable `a_i` (1-based).
    pub fn var(i: usize) -> Self {
        assert!((1..=DIM).contains(&i), "variable a{i} out of range");
        let mut e = [0; DIM];
        e[i - 1] = 1;
        Self {
            terms: BTreeMap::from([(e, QuadExt::int(1))]),
        }
    }

    fn add_term(&mut self, e: Exponent, c: QuadExt) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                if !Ring::is_zero(&c) {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let sum = &*o.get() + &c;
                if Ring::is_zero(&sum) {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&d| d as u32).sum())
            .max()
            .unwrap_or(0)
    }

    /// The value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<QuadExt> {
        match self.terms.len() {
            0 => Some(QuadExt::int(0)),
            1 => self.terms.get(&[0; DIM]).cloned(),
            _ => None,
        }
    }

    /// Variables (1-based) of a single-term polynomial.
    pub fn monomial_variables(&self) -> Option<BTreeSet<usize>> {
        if self.terms.len() != 1 {
            return None;
        }
        let e = self.terms.keys().next().expect("one term");
        Some((0..DIM).filter(|&i| e[i] > 0).map(|i| i + 1).collect())
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        self.terms
            .keys()
            .flat_map(|e| (0..DIM).filter(move |&i| e[i] > 0).map(|i| i + 1))
            .collect()
    }

    /// Sets the given variables (1-based) to zero.
    pub fn substitute_zero(&self, vars: &BTreeSet<usize>) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| vars.iter().all(|&v| e[v - 1] == 0))
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    pub fn eval(&self, point: &[QuadExt; DIM]) -> QuadExt {
        let mut acc = QuadExt::int(0);
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..DIM {
                if e[i] > 0 {
                    t = &t * &point[i].pow(e[i] as u32);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64; DIM]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = Field::to_f64(c);
                for i in 0..DIM {
                    t *= point[i].powi(e[i] as i32);
                }
                t
            })
            .sum()
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        self + (-rhs)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        let mut out = Poly::default();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponent = std::array::from_fn(|i| ea[i] + eb[i]);
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Ring for Poly {
    fn zero() -> Self {
        Poly::default()
    }
    fn one() -> Self {
        Poly::constant(QuadExt::int(1))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn from_rational(r: &Rational) -> Self {
        Poly::constant(QuadExt::rational(r.clone()))
    }
}

/// E.g. `2*a1*a7 - 2*a2^2 + (1/2+sqrt(2))*a3 + 1`, highest degree first.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(e, _)| std::cmp::Reverse(e.iter().map(|&d| d as u32).sum::<u32>()));
        for (n, (e, c)) in terms.into_iter().enumerate() {
            let mono: Vec<String> = (0..DIM)
                .filter(|&i| e[i] > 0)
                .map(|i| if e[i] == 1 { format!("a{}", i + 1) } else { format!("a{}^{}", i + 1, e[i]) })
                .collect();
            let (neg, mag) = if c.is_rational() && c.signum() < 0 { (true, -c.clone()) } else { (false, c.clone()) };
            if n > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            let coeff = if mag.is_rational() { mag.to_string() } else { format!("({mag})") };
            if mono.is_empty() {
                write!(f, "{coeff}")?;
            } else if mag == QuadExt::int(1) {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{coeff}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Poly {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        s.collect_str(self)
    }
}

pub type PolyVector = Vector<Poly>;

/// `ξ = a1 f1 + .. + a7 f7`.
pub fn symbolic_xi() -> PolyVector {
    Vector::from_fn(|i| Poly::var(i + 1))
}

fn lift(q: &QuadExt) -> Poly {
    Poly::constant(q.clone())
}

/// `g(ξ, ξ) + 1` for symbolic `ξ`.
pub fn quadric(g: &Metric<QuadExt>) -> Poly {
    let xi = symbolic_xi();
    g.map(lift).apply(&xi, &xi) + Poly::one()
}

/// `∇_ξ ξ` for symbolic `ξ` with the Levi-Civita connection of `(L, g)`.
pub fn nabla_xi_xi_poly(algebra: &LieAlgebra<QuadExt>, g: &Metric<QuadExt>) -> Result<PolyVector> {
    let conn = Connection::levi_civita(algebra, g)?.map(lift);
    let xi = symbolic_xi();
    Ok(conn.nabla_vec(&xi, &xi))
}

/// The tensor a scenario evaluates at each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainTensor {
    /// The normality tensor `N(f_X, ·, f_Z)` as a covector in its middle slot.
    Normality,
    /// `D(f_X, f_Y)`, the paracontact defect.
    Paracontact,
    /// `∇_{φ f_X} ξ`.
    NablaPhiXi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioStep {
    /// Evaluates `∇_ξ ξ` instead of the scenario tensor.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub premise: bool,
    /// Basis labels the tensor is evaluated at.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub at: Vec<usize>,
    /// Variables this step must force to vanish, e.g. `["a5"]`.
    #[serde(default)]
    pub forces: Vec<String>,
    /// Product constraints this step must leave behind.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub products: Vec<Vec<String>>,
    /// Record the polynomials only; no conclusion is checked.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub audit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub tensor: ChainTensor,
    pub steps: Vec<ScenarioStep>,
}

const NORMAL: &str = include_str!("../../../data/scenarios/normal.toml");
const PARACONTACT: &str = include_str!("../../../data/scenarios/paracontact.toml");
const W2: &str = include_str!("../../../data/scenarios/w2.toml");

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::validation("scenario", e.to_string()))?;
        for (n, step) in s.steps.iter().enumerate() {
            let loc = format!("scenario {} step {}", s.name, n + 1);
            let want = match s.tensor {
                ChainTensor::NablaPhiXi => 1,
                _ => 2,
            };
            if !step.premise && step.at.len() != want {
                return Err(Error::validation(loc, format!("`at` needs {want} basis labels")));
            }
            if step.at.iter().any(|l| !(1..=DIM).contains(l)) {
                return Err(Error::validation(loc, "basis label out of range 1..=7"));
            }
            for v in step.forces.iter().chain(step.products.iter().flatten()) {
                parse_var(v).map_err(|reason| Error::validation(loc.clone(), reason))?;
            }
        }
        Ok(s)
    }

    /// One of the shipped scenarios: `normal`, `paracontact` or `w2`.
    pub fn builtin(name: &str) -> Result<Self> {
        let text = match name {
            "normal" => NORMAL,
            "paracontact" => PARACONTACT,
            "w2" => W2,
            other => {
                return Err(Error::Unknown {
                    kind: "scenario",
                    name: other.to_string(),
                })
            }
        };
        Self::parse(text)
    }
}

fn parse_var(name: &str) -> std::result::Result<usize, String> {
    name.strip_prefix('a')
        .and_then(|d| d.parse::<usize>().ok())
        .filter(|i| (1..=DIM).contains(i))
        .ok_or_else(|| format!("`{name}` is not a variable a1..a7"))
}

fn var_name(i: usize) -> String {
    format!("a{i}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepOutcome {
    pub label: String,
    /// Nonzero components after substituting earlier conclusions.
    pub polynomials: Vec<String>,
    pub forced: Vec<String>,
    pub products: Vec<Vec<String>>,
    pub audit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub scenario: String,
    pub steps: Vec<StepOutcome>,
    /// The quadric `g(ξ, ξ) + 1` after substitution, per case.
    pub conclusion: Vec<String>,
    pub verified: bool,
}

struct Deduced {
    forced: BTreeSet<usize>,
    products: BTreeSet<BTreeSet<usize>>,
    contradiction: bool,
}

fn deduce(polys: &[Poly], known: &BTreeSet<usize>) -> Deduced {
    let mut zeros = known.clone();
    loop {
        let mut changed = false;
        for p in polys {
            let r = p.substitute_zero(&zeros);
            if let Some(vars) = r.monomial_variables() {
                if vars.len() == 1 {
                    changed |= zeros.insert(*vars.iter().next().expect("one variable"));
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut products = BTreeSet::new();
    let mut contradiction = false;
    for p in polys {
        let r = p.substitute_zero(&zeros);
        match r.monomial_variables() {
            Some(vars) if vars.is_empty() => contradiction = true,
            Some(vars) if vars.len() > 1 => {
                products.insert(vars);
            }
            _ => {}
        }
    }
    Deduced {
        forced: zeros.difference(known).copied().collect(),
        products,
        contradiction,
    }
}

fn names(vars: &BTreeSet<usize>) -> Vec<String> {
    vars.iter().map(|&v| var_name(v)).collect()
}

/// Runs the scenario on the symbolic structure `(bundle, a1 f1 + .. + a7 f7)`.
pub fn deduction_chain(
    scenario: &Scenario,
    algebra: &LieAlgebra<QuadExt>,
    bundle: &G2Bundle<QuadExt>,
) -> Result<ChainReport> {
    let conn = Connection::levi_civita(algebra, bundle.metric())?.map(lift);
    let sbundle = bundle.map(lift);
    let xi = symbolic_xi();
    let s = Apcms::induce_unchecked(&sbundle, xi.clone());
    let paracontact = matches!(scenario.tensor, ChainTensor::Paracontact).then(|| paracontact_defect(&s, &conn));
    let normality =
        matches!(scenario.tensor, ChainTensor::Normality).then(|| normality_defect(&f_tensor_via_form(&s, &conn), &s));

    let broken = |step: usize, reason: String| Error::ChainBroken {
        scenario: scenario.name.clone(),
        step,
        reason,
    };

    let mut zeros = BTreeSet::new();
    let mut products: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    let mut outcomes = Vec::new();
    for (n, step) in scenario.steps.iter().enumerate() {
        let (label, polys): (String, Vec<Poly>) = if step.premise {
            ("nabla_xi xi".into(), conn.nabla_vec(&xi, &xi).0.to_vec())
        } else {
            let f = |k: usize| Vector::<Poly>::f(step.at[k]);
            match scenario.tensor {
                ChainTensor::Normality => {
                    let n = normality.as_ref().expect("computed");
                    let (x, z) = (step.at[0] - 1, step.at[1] - 1);
                    (
                        format!("N(f{}, ., f{})", step.at[0], step.at[1]),
                        (0..DIM).map(|y| n.get(x, y, z).clone()).collect(),
                    )
                }
                ChainTensor::Paracontact => (
                    format!("D(f{}, f{})", step.at[0], step.at[1]),
                    vec![paracontact.as_ref().expect("computed").0[step.at[0] - 1][step.at[1] - 1].clone()],
                ),
                ChainTensor::NablaPhiXi => (
                    format!("nabla_(phi f{}) xi", step.at[0]),
                    conn.nabla_vec(&s.phi_of(&f(0)), &xi).0.to_vec(),
                ),
            }
        };
        let shown: Vec<String> = polys
            .iter()
            .map(|p| p.substitute_zero(&zeros))
            .filter(|p| !p.is_zero())
            .map(|p| p.to_string())
            .collect();
        if step.audit {
            outcomes.push(StepOutcome {
                label,
                polynomials: shown,
                forced: vec![],
                products: vec![],
                audit: true,
            });
            continue;
        }
        let d = deduce(&polys, &zeros);
        if d.contradiction {
            return Err(broken(n + 1, format!("{label} reduces to a nonzero constant: {}", shown.join(", "))));
        }
        zeros.extend(d.forced.iter().copied());
        products.extend(d.products.iter().cloned());
        products.retain(|p| p.is_disjoint(&zeros));

        let expected: BTreeSet<usize> = step.forces.iter().map(|v| parse_var(v).expect("validated")).collect();
        let expected_products: BTreeSet<BTreeSet<usize>> = step
            .products
            .iter()
            .map(|p| p.iter().map(|v| parse_var(v).expect("validated")).collect())
            .collect();
        let new_products: BTreeSet<BTreeSet<usize>> =
            d.products.into_iter().filter(|p| p.is_disjoint(&zeros)).collect();
        if d.forced != expected || new_products != expected_products {
            return Err(broken(
                n + 1,
                format!(
                    "{label} = [{}] forces {{{}}} with products {:?}, expected {{{}}} with products {:?}",
                    shown.join(", "),
                    names(&d.forced).join(", "),
                    new_products.iter().map(names).collect::<Vec<_>>(),
                    step.forces.join(", "),
                    step.products
                ),
            ));
        }
        outcomes.push(StepOutcome {
            label,
            polynomials: shown,
            forced: names(&d.forced),
            products: new_products.iter().map(names).collect(),
            audit: false,
        });
    }

    let q = quadric(bundle.metric());
    let mut conclusion = Vec::new();
    let verified = refute(&q, &zeros, &products.into_iter().collect::<Vec<_>>(), &mut conclusion);
    if !verified {
        return Err(broken(
            scenario.steps.len(),
            format!("the quadric does not rule out all cases: {}", conclusion.join("; ")),
        ));
    }
    Ok(ChainReport {
        scenario: scenario.name.clone(),
        steps: outcomes,
        conclusion,
        verified,
    })
}

// Every case of the remaining product constraints must make the quadric a
// nonzero constant.
fn refute(q: &Poly, zeros: &BTreeSet<usize>, products: &[BTreeSet<usize>], log: &mut Vec<String>) -> bool {
    if let Some((first, rest)) = products.split_first() {
        if !first.is_disjoint(zeros) {
            return refute(q, zeros, rest, log);
        }
        return first.iter().all(|&v| {
            let mut z = zeros.clone();
            z.insert(v);
            refute(q, &z, rest, log)
        });
    }
    let r = q.substitute_zero(zeros);
    let zs = names(zeros).join(" = ");
    match r.as_constant() {
        Some(c) if !Ring::is_zero(&c) => {
            log.push(format!("{zs} = 0 gives g(xi, xi) + 1 = {c}, not 0"));
            true
        }
        _ => {
            log.push(format!("{zs} = 0 leaves g(xi, xi) + 1 = {r}"));
            false
        }
    }
}
