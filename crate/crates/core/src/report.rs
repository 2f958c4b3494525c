//! Commands and their reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::apcms::{axiom_audit, Apcms, AxiomAudit};
use crate::classify::{classify, ClassReport, Granularity, Witness};
use crate::error::{Error, Result};
use crate::exterior::{Vector, DIM};
use crate::g2::{G2Bundle, Mode};
use crate::io::ProblemSpec;
use crate::liealg::Connection;
use crate::scalar::{to_float, QuadExt, Ring};
use crate::symbolic::{deduction_chain, ChainReport, Scenario};

#[derive(Debug, Clone)]
pub enum Command {
    Tables,
    Audit,
    Classify,
    Chain(Vec<Scenario>),
    Sample { n: usize, seed: u64 },
}

/// Overrides applied on top of the problem file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub mode: Option<Mode>,
    pub xi: Option<Vector<QuadExt>>,
    pub granularity: Granularity,
    /// Rescale a timelike `ξ` to unit length instead of rejecting it.
    pub rescale: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableEntry {
    pub i: usize,
    pub j: usize,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tables {
    pub metric: Vec<Vec<String>>,
    pub volume: String,
    pub connection: Vec<TableEntry>,
    pub cross_products: Vec<TableEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<String>>,
    /// Matrix of the induced `φ`, `phi[i][j] = f^{i+1}(φ f_{j+1})`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleOutcome {
    pub index: usize,
    pub xi: [f64; DIM],
    pub audit_pass: bool,
    pub present: Vec<String>,
    pub normal: bool,
    pub paracontact: bool,
    pub killing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSummary {
    pub n: usize,
    pub seed: u64,
    pub audit_failures: usize,
    /// How many samples contain each group.
    pub counts: BTreeMap<String, usize>,
    pub samples: Vec<SampleOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub mode: Mode,
    pub granularity: Granularity,
    pub tables: Option<Tables>,
    pub audit: Option<AxiomAudit>,
    pub classes: Option<ClassReport>,
    pub witnesses: BTreeMap<String, Witness>,
    pub chains: Vec<ChainReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleSummary>,
}

impl Report {
    fn empty(mode: Mode, granularity: Granularity) -> Self {
        Self {
            mode,
            granularity,
            tables: None,
            audit: None,
            classes: None,
            witnesses: BTreeMap::new(),
            chains: Vec::new(),
            sample: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn strings<S: Ring + std::fmt::Display>(v: &Vector<S>) -> Vec<String> {
    v.0.iter().map(|c| c.to_string()).collect()
}

fn structure(spec: &ProblemSpec, bundle: &G2Bundle<QuadExt>, opts: &RunOptions) -> Result<Apcms<QuadExt>> {
    let xi = opts
        .xi
        .clone()
        .or_else(|| spec.xi.clone())
        .ok_or_else(|| Error::validation("xi", "this command needs xi (in the file or via --xi)"))?;
    if opts.rescale {
        Apcms::induce_rescaled(bundle, xi)
    } else {
        Apcms::induce(bundle, xi)
    }
}

fn tables(bundle: &G2Bundle<QuadExt>, conn: &Connection<QuadExt>, s: Option<&Apcms<QuadExt>>) -> Tables {
    let m = bundle.metric().matrix();
    Tables {
        metric: m.0.iter().map(|row| row.iter().map(|c| c.to_string()).collect()).collect(),
        volume: bundle.vol().top_coeff().to_string(),
        connection: conn
            .nonzero_entries()
            .into_iter()
            .map(|e| TableEntry {
                i: e.i,
                j: e.j,
                value: e.value.to_string(),
            })
            .collect(),
        cross_products: bundle
            .nonzero_cross_products()
            .into_iter()
            .map(|(i, j, v)| TableEntry {
                i,
                j,
                value: v.to_string(),
            })
            .collect(),
        xi: s.map(|s| strings(s.xi())),
        eta: s.map(|s| strings(s.eta())),
        phi: s.map(|s| {
            s.phi_matrix()
                .0
                .iter()
                .map(|row| row.iter().map(|c| c.to_string()).collect())
                .collect()
        }),
    }
}

/// Executes one command. Same inputs, same report.
pub fn run(command: &Command, spec: &ProblemSpec, opts: &RunOptions) -> Result<Report> {
    let mode = opts.mode.unwrap_or(spec.mode);
    let mut report = Report::empty(mode, opts.granularity);
    let algebra = spec.algebra();
    let bundle = spec.bundle(mode)?;
    match command {
        Command::Tables => {
            let conn = Connection::levi_civita(&algebra, bundle.metric())?;
            let has_xi = opts.xi.is_some() || spec.xi.is_some();
            let s = if has_xi { Some(structure(spec, &bundle, opts)?) } else { None };
            report.tables = Some(tables(&bundle, &conn, s.as_ref()));
        }
        Command::Audit => {
            let s = structure(spec, &bundle, opts)?;
            report.audit = Some(axiom_audit(&s));
        }
        Command::Classify => {
            let conn = Connection::levi_civita(&algebra, bundle.metric())?;
            let s = structure(spec, &bundle, opts)?;
            report.tables = Some(tables(&bundle, &conn, Some(&s)));
            report.audit = Some(axiom_audit(&s));
            let classes = classify(&s, &conn, opts.granularity)?;
            report.witnesses = classes
                .entries
                .iter()
                .filter_map(|e| e.witness.clone().map(|w| (e.name.clone(), w)))
                .collect();
            report.classes = Some(classes);
        }
        Command::Chain(scenarios) => {
            for scenario in scenarios {
                report.chains.push(deduction_chain(scenario, &algebra, &bundle)?);
            }
        }
        Command::Sample { n, seed } => {
            report.sample = Some(sample(&bundle.map(to_float), &algebra.map(to_float), *n, *seed, opts.granularity)?);
        }
    }
    Ok(report)
}

// Uniform in the cube, kept if clearly timelike, then scaled to the quadric.
fn random_unit_timelike(g: &crate::exterior::Metric<f64>, rng: &mut ChaCha8Rng) -> Vector<f64> {
    loop {
        let v = Vector::from_fn(|_| rng.random_range(-1.0..=1.0));
        let norm = g.apply(&v, &v);
        if norm < -0.05 {
            return v.scale(&(1.0 / (-norm).sqrt()));
        }
    }
}

fn sample(
    bundle: &G2Bundle<f64>,
    algebra: &crate::liealg::LieAlgebra<f64>,
    n: usize,
    seed: u64,
    granularity: Granularity,
) -> Result<SampleSummary> {
    let conn = Connection::levi_civita(algebra, bundle.metric())?;
    let mut samples = Vec::with_capacity(n);
    let mut counts = BTreeMap::new();
    let mut audit_failures = 0;
    for index in 0..n {
        // one stream per sample, so a sample never depends on its neighbours
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let xi = random_unit_timelike(bundle.metric(), &mut rng);
        let s = Apcms::induce(bundle, xi.clone())?;
        let audit_pass = axiom_audit(&s).all_pass();
        if !audit_pass {
            audit_failures += 1;
        }
        let classes = classify(&s, &conn, granularity)?;
        let present: Vec<String> = classes.present().into_iter().map(str::to_string).collect();
        for p in &present {
            *counts.entry(p.clone()).or_insert(0) += 1;
        }
        samples.push(SampleOutcome {
            index,
            xi: xi.0,
            audit_pass,
            present,
            normal: classes.checks.normal,
            paracontact: classes.checks.paracontact,
            killing: classes.checks.killing,
        });
    }
    Ok(SampleSummary {
        n,
        seed,
        audit_failures,
        counts,
        samples,
    })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Plain-text rendering with the same content as the JSON form.
pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "mode: {}", report.mode);
    let _ = writeln!(w, "granularity: {}", report.granularity);
    if let Some(t) = &report.tables {
        let _ = writeln!(w, "\nmetric g_43:");
        for row in &t.metric {
            let _ = writeln!(w, "  [{}]", row.join(", "));
        }
        let _ = writeln!(w, "volume: ({}) f^1234567", t.volume);
        let _ = writeln!(w, "\nLevi-Civita connection ({} nonzero):", t.connection.len());
        for e in &t.connection {
            let _ = writeln!(w, "  nabla_f{} f{} = {}", e.i, e.j, e.value);
        }
        let _ = writeln!(w, "\ncross products ({} nonzero):", t.cross_products.len());
        for e in &t.cross_products {
            let _ = writeln!(w, "  P(f{}, f{}) = {}", e.i, e.j, e.value);
        }
        if let (Some(xi), Some(eta)) = (&t.xi, &t.eta) {
            let _ = writeln!(w, "\nxi  = [{}]", xi.join(", "));
            let _ = writeln!(w, "eta = [{}]", eta.join(", "));
        }
        if let Some(phi) = &t.phi {
            let _ = writeln!(w, "phi:");
            for row in phi {
                let _ = writeln!(w, "  [{}]", row.join(", "));
            }
        }
    }
    if let Some(a) = &report.audit {
        let _ = writeln!(w, "\naxiom audit:");
        for c in &a.checks {
            let _ = write!(w, "  {:<18} {}", c.axiom, if c.passed { "pass" } else { "FAIL" });
            if let Some(at) = &c.witness {
                let labels: Vec<String> = at.iter().map(|l| format!("f{l}")).collect();
                let _ = write!(w, " at ({})", labels.join(", "));
            }
            if let Some(d) = &c.detail {
                let _ = write!(w, ": {d}");
            }
            let _ = writeln!(w);
        }
    }
    if let Some(c) = &report.classes {
        let _ = writeln!(w, "\nclasses:");
        for e in &c.entries {
            let state = match e.present {
                Some(true) => "present",
                Some(false) => "absent",
                None => "undecided",
            };
            let _ = write!(w, "  {:<6} {state}", e.name);
            if let Some(wt) = report.witnesses.get(&e.name) {
                let [i, j, k] = wt.triple;
                let _ = write!(w, "  witness (f{i}, f{j}, f{k}) = {}", wt.value);
            }
            let _ = writeln!(w);
        }
        let k = &c.checks;
        let _ = writeln!(w, "\nnormal: {}", yes_no(k.normal));
        let _ = writeln!(w, "paracontact: {}", yes_no(k.paracontact));
        let _ = writeln!(w, "xi Killing: {}", yes_no(k.killing));
        let _ = writeln!(w, "xi parallel: {}", yes_no(k.xi_parallel));
        let _ = writeln!(w, "projections sum to F: {}", yes_no(k.reconstructs));
    }
    for chain in &report.chains {
        let _ = writeln!(
            w,
            "\nchain {}: {}",
            chain.scenario,
            if chain.verified { "verified" } else { "NOT verified" }
        );
        for step in &chain.steps {
            let mut found = Vec::new();
            if step.audit {
                found.push("audit".to_string());
            }
            if !step.forced.is_empty() {
                found.push(format!("forces {} = 0", step.forced.join(" = ")));
            }
            for p in &step.products {
                found.push(format!("{} = 0", p.join("*")));
            }
            let _ = writeln!(w, "  {}: {}", step.label, found.join("; "));
            for p in &step.polynomials {
                let _ = writeln!(w, "      {p}");
            }
        }
        for c in &chain.conclusion {
            let _ = writeln!(w, "  g(xi, xi) + 1 -> {c}");
        }
    }
    if let Some(s) = &report.sample {
        let _ = writeln!(w, "\nsample: n = {}, seed = {}", s.n, s.seed);
        let _ = writeln!(w, "  audit failures: {}", s.audit_failures);
        for (name, count) in &s.counts {
            let _ = writeln!(w, "  {name:<6} present in {count}");
        }
        let normal = s.samples.iter().filter(|o| o.normal).count();
        let paracontact = s.samples.iter().filter(|o| o.paracontact).count();
        let _ = writeln!(w, "  normal: {normal}, paracontact: {paracontact}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_spec;

    const EXAMPLE: &str = include_str!("../../../data/nilpotent_example.toml");

    #[test]
    fn json_keys_are_stable() {
        let spec = parse_spec(EXAMPLE).unwrap();
        let report = run(&Command::Classify, &spec, &RunOptions::default()).unwrap();
        let value: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        let keys: Vec<&str> = value.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(
            keys,
            ["audit", "chains", "classes", "granularity", "mode", "tables", "witnesses"]
        );
    }

    #[test]
    fn tables_counts() {
        let spec = parse_spec(EXAMPLE).unwrap();
        let report = run(&Command::Tables, &spec, &RunOptions::default()).unwrap();
        let t = report.tables.unwrap();
        assert_eq!(t.cross_products.len(), 15);
        assert_eq!(t.connection.len(), 10);
    }

    #[test]
    fn text_mentions_every_witness() {
        let spec = parse_spec(EXAMPLE).unwrap();
        let report = run(&Command::Classify, &spec, &RunOptions::default()).unwrap();
        let text = render_text(&report);
        for (name, w) in &report.witnesses {
            assert!(text.contains(name.as_str()));
            assert!(text.contains(&w.value));
        }
    }

    #[test]
    fn sample_is_deterministic() {
        let spec = parse_spec(EXAMPLE).unwrap();
        let opts = RunOptions {
            mode: Some(Mode::Normalized),
            ..Default::default()
        };
        let cmd = Command::Sample { n: 5, seed: 7 };
        let a = run(&cmd, &spec, &opts).unwrap();
        let b = run(&cmd, &spec, &opts).unwrap();
        assert_eq!(a, b);
        let s = a.sample.unwrap();
        assert_eq!(s.audit_failures, 0);
        let longer = run(&Command::Sample { n: 8, seed: 7 }, &spec, &opts).unwrap().sample.unwrap();
        assert_eq!(longer.samples[..5], s.samples[..]);
    }

    #[test]
    fn missing_xi_is_a_validation_error() {
        let spec = parse_spec(include_str!("../../../data/abelian_standard.toml")).unwrap();
        let err = run(&Command::Audit, &spec, &RunOptions::default()).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
