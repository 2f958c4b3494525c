//! Problem files.
//!
//! ```toml
//! radicand = 2
//! mode = "literal"          # or "normalized"
//! orientation = -1          # sign of the volume form in normalized mode
//! brackets = [[3, 7, [[1, "1"]]]]          # [f3, f7] = 1 f1
//! phi = [[1, 5, 6, "-1"], [1, 2, 7, "-1/2"]]
//! vol = "-1/4"              # coefficient of f^1234567
//! metric = "-2f^2.f^2 + f^1.f^7"          # optional
//! xi = ["0", "1/2*sqrt(2)", "0", "0", "0", "0", "0"]
//! ```
//!
//! In `metric`, `f^i.f^j` with `i ≠ j` is `f^i⊗f^j + f^j⊗f^i` and `f^i.f^i`
//! is `f^i⊗f^i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{KForm, Matrix, Metric, Vector, DIM};
use crate::g2::{metric_from_vol, volume_form, G2Bundle, Mode};
use crate::liealg::{JacobiReport, LieAlgebra};
use crate::scalar::{parse_scalar, QuadExt, Ring};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(default = "default_radicand")]
    radicand: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    orientation: Option<i32>,
    #[serde(default)]
    brackets: Vec<(usize, usize, Vec<(usize, String)>)>,
    phi: Vec<(usize, usize, usize, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vol: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metric: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    xi: Option<Vec<String>>,
}

fn default_radicand() -> u64 {
    2
}

/// A validated problem: Lie algebra, 3-form, optional metric data and `ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub radicand: u64,
    pub mode: Mode,
    pub orientation: i32,
    /// `[f_i, f_j] = v` with `i < j`, as given.
    pub brackets: Vec<(usize, usize, Vector<QuadExt>)>,
    pub phi: KForm<QuadExt>,
    /// Coefficient of `f^{1234567}`.
    pub vol: Option<QuadExt>,
    pub metric: Option<Metric<QuadExt>>,
    pub xi: Option<Vector<QuadExt>>,
}

fn check_label(loc: &str, l: usize) -> Result<usize> {
    if (1..=DIM).contains(&l) {
        Ok(l)
    } else {
        Err(Error::validation(loc, format!("basis index {l} out of range 1..=7")))
    }
}

fn scalar_at(loc: &str, text: &str, radicand: u64) -> Result<QuadExt> {
    parse_scalar(text, Some(radicand)).map_err(|e| Error::validation(loc, e.to_string()))
}

/// Parses `"0, 1/2*sqrt(2), 0, 0, 0, 0, 0"`.
pub fn parse_vector(text: &str, radicand: u64) -> Result<Vector<QuadExt>> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != DIM {
        return Err(Error::validation("xi", format!("expected 7 components, got {}", parts.len())));
    }
    let mut out = Vector::zero();
    for (i, p) in parts.iter().enumerate() {
        out.0[i] = scalar_at(&format!("xi[{i}]"), p, radicand)?;
    }
    Ok(out)
}

/// Parses a symmetric tensor such as `-2f^2.f^2 + f^1.f^7 + 2f^3.f^6`.
pub fn parse_metric(text: &str, radicand: u64) -> Result<Metric<QuadExt>> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut terms = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (n, ch) in compact.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' if depth == 0 && n > start && !compact[..n].ends_with('^') => {
                terms.push(&compact[start..n]);
                start = n;
            }
            _ => {}
        }
    }
    terms.push(&compact[start..]);
    let mut m = Matrix::<QuadExt>::zero();
    for term in terms.into_iter().filter(|t| !t.is_empty()) {
        let loc = format!("metric term `{term}`");
        let at = term.find("f^").ok_or_else(|| Error::validation(&loc, "expected f^i.f^j"))?;
        let coeff = match term[..at].trim_end_matches('*') {
            "" | "+" => QuadExt::int(1),
            "-" => QuadExt::int(-1),
            c => {
                let (negative, body) = match c.strip_prefix('-') {
                    Some(rest) => (true, rest),
                    None => (false, c.strip_prefix('+').unwrap_or(c)),
                };
                let body = body.strip_prefix('(').and_then(|b| b.strip_suffix(')')).unwrap_or(body);
                let v = scalar_at(&loc, body, radicand)?;
                if negative {
                    -v
                } else {
                    v
                }
            }
        };
        let (a, b) = term[at + 2..]
            .split_once(".f^")
            .ok_or_else(|| Error::validation(&loc, "expected f^i.f^j"))?;
        let parse_label = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::validation(&loc, format!("bad index `{s}`")))
                .and_then(|l| check_label(&loc, l))
        };
        let (i, j) = (parse_label(a)? - 1, parse_label(b)? - 1);
        m.0[i][j] = &m.0[i][j] + &coeff;
        if i != j {
            m.0[j][i] = &m.0[j][i] + &coeff;
        }
    }
    Ok(Metric::new(m))
}

/// Inverse of [`parse_metric`].
pub fn format_metric(g: &Metric<QuadExt>) -> String {
    let mut out = String::new();
    for i in 0..DIM {
        for j in i..DIM {
            let c = &g.matrix().0[i][j];
            if Ring::is_zero(c) {
                continue;
            }
            if !out.is_empty() {
                out.push_str(" + ");
            }
            out.push_str(&format!("({c})*f^{}.f^{}", i + 1, j + 1));
        }
    }
    if out.is_empty() {
        out.push_str("0*f^1.f^1");
    }
    out
}

/// Parses and validates a problem file; the Jacobi identity is checked.
pub fn parse_spec(text: &str) -> Result<ProblemSpec> {
    let raw: RawSpec = toml::from_str(text).map_err(|e| Error::validation("problem file", e.message().to_string()))?;
    let r = raw.radicand;
    if r < 2 || !crate::scalar::is_square_free(r) {
        return Err(Error::validation("radicand", format!("{r} is not a square-free integer > 1")));
    }
    let mode = match raw.mode.as_deref() {
        None => Mode::Normalized,
        Some(m) => m.parse().map_err(|e: Error| Error::validation("mode", e.to_string()))?,
    };
    let orientation = raw.orientation.unwrap_or(1);
    if orientation != 1 && orientation != -1 {
        return Err(Error::validation("orientation", "must be 1 or -1"));
    }

    let mut brackets = Vec::with_capacity(raw.brackets.len());
    for (n, (i, j, comps)) in raw.brackets.iter().enumerate() {
        let loc = format!("brackets[{n}]");
        check_label(&loc, *i)?;
        check_label(&loc, *j)?;
        if i >= j {
            return Err(Error::validation(&loc, format!("need i < j, got ({i}, {j})")));
        }
        let mut v = Vector::zero();
        for (k, c) in comps {
            let k = check_label(&loc, *k)? - 1;
            v.0[k] = &v.0[k] + &scalar_at(&loc, c, r)?;
        }
        brackets.push((*i, *j, v));
    }
    let algebra = LieAlgebra::from_brackets(brackets.clone())?;
    if let JacobiReport::Fail { triple, residual } = algebra.check_jacobi() {
        return Err(Error::Jacobi {
            triple,
            residual: residual.to_string(),
        });
    }

    let mut phi = KForm::zero(3);
    for (n, (i, j, k, c)) in raw.phi.iter().enumerate() {
        let loc = format!("phi[{n}]");
        for l in [i, j, k] {
            check_label(&loc, *l)?;
        }
        if !(i < j && j < k) {
            return Err(Error::validation(&loc, format!("need i < j < k, got ({i}, {j}, {k})")));
        }
        phi = phi + KForm::monomial(&[*i, *j, *k], scalar_at(&loc, c, r)?);
    }
    if phi.is_zero() {
        return Err(Error::validation("phi", "the 3-form is zero"));
    }

    let vol = raw.vol.as_deref().map(|v| scalar_at("vol", v, r)).transpose()?;
    let metric = raw.metric.as_deref().map(|m| parse_metric(m, r)).transpose()?;
    let xi = match &raw.xi {
        None => None,
        Some(parts) => {
            if parts.len() != DIM {
                return Err(Error::validation("xi", format!("expected 7 components, got {}", parts.len())));
            }
            let mut v = Vector::zero();
            for (i, p) in parts.iter().enumerate() {
                v.0[i] = scalar_at(&format!("xi[{i}]"), p, r)?;
            }
            Some(v)
        }
    };
    if mode == Mode::Literal && vol.is_none() && metric.is_none() {
        return Err(Error::validation("mode", "literal mode needs `vol` or `metric`"));
    }

    Ok(ProblemSpec {
        radicand: r,
        mode,
        orientation,
        brackets,
        phi,
        vol,
        metric,
        xi,
    })
}

/// Renders a spec as a problem file that parses back to an equal spec.
pub fn emit_spec(spec: &ProblemSpec) -> String {
    let raw = RawSpec {
        radicand: spec.radicand,
        mode: Some(spec.mode.to_string()),
        orientation: Some(spec.orientation),
        brackets: spec
            .brackets
            .iter()
            .map(|(i, j, v)| (*i, *j, v.support().map(|k| (k + 1, v.0[k].to_string())).collect()))
            .collect(),
        phi: spec
            .phi
            .terms()
            .map(|(l, c)| (l[0], l[1], l[2], c.to_string()))
            .collect(),
        vol: spec.vol.as_ref().map(|v| v.to_string()),
        metric: spec.metric.as_ref().map(format_metric),
        xi: spec.xi.as_ref().map(|v| v.0.iter().map(|c| c.to_string()).collect()),
    };
    toml::to_string(&raw).expect("problem spec serializes")
}

impl ProblemSpec {
    pub fn algebra(&self) -> LieAlgebra<QuadExt> {
        LieAlgebra::from_brackets(self.brackets.clone()).expect("validated at parse time")
    }

    /// The bundle for `mode`: literal uses the given `vol` and/or `metric`,
    /// normalized calibrates from `φ` with the spec's orientation.
    pub fn bundle(&self, mode: Mode) -> Result<G2Bundle<QuadExt>> {
        match mode {
            Mode::Normalized => G2Bundle::normalized(self.phi.clone(), self.orientation),
            Mode::Literal => match (&self.metric, &self.vol) {
                (None, Some(c)) => G2Bundle::literal(self.phi.clone(), volume_form(c.clone())),
                (Some(g), Some(c)) => {
                    let vol = volume_form(c.clone());
                    if metric_from_vol(&self.phi, &vol)? != *g {
                        return Err(Error::validation(
                            "metric",
                            "metric and vol do not satisfy the Gram identity for phi",
                        ));
                    }
                    G2Bundle::with_metric(self.phi.clone(), g.clone(), vol, Mode::Literal)
                }
                (Some(g), None) => {
                    let c = implied_volume(&self.phi, g)?;
                    G2Bundle::with_metric(self.phi.clone(), g.clone(), volume_form(c), Mode::Literal)
                }
                (None, None) => Err(Error::validation("mode", "literal mode needs `vol` or `metric`")),
            },
        }
    }
}

// The `c` with `B = 6c g`, if there is one.
fn implied_volume(phi: &KForm<QuadExt>, g: &Metric<QuadExt>) -> Result<QuadExt> {
    use crate::scalar::Field;
    let b = crate::g2::gram_matrix(phi)?;
    let mismatch = || Error::validation("metric", "metric is not proportional to the Gram matrix of phi");
    let (i, j) = (0..DIM)
        .flat_map(|i| (0..DIM).map(move |j| (i, j)))
        .find(|&(i, j)| !Ring::is_zero(&g.matrix().0[i][j]))
        .ok_or_else(mismatch)?;
    let c = b.0[i][j].div(&(QuadExt::int(6) * g.matrix().0[i][j].clone()))?;
    if b != g.matrix().scale(&(QuadExt::int(6) * c.clone())) {
        return Err(mismatch());
    }
    Ok(c)
}
