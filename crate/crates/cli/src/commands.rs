use std::fmt::Write as _;
use std::str::FromStr;

use foliage_core::blowup::{is_divisor_invariant, pullback_function, pullback_vector_field, BlowupChart};
use foliage_core::dicritical::{classify, CommonFactor, FactoredPair, PrivateFactor};
use foliage_core::foliation::{
    darboux_lie_derivative, darboux_lie_derivative_vanishes, independence_witness, Independence,
};
use foliage_core::numerics::{
    conservation_drift, evaluate_grid, trace_leaf, ConjugacyGrid, TraceConfig, DEFAULT_DRIFT_TOLERANCE,
    DEFAULT_ESCAPE_RADIUS, DEFAULT_STEP,
};
use foliage_core::singular::{
    baum_bott_global_check, eigenvalue_ratio_rationality, is_singular_at, linear_part, saddle_sign_pattern,
    singular_locus_on_curve, BaumBottLedger, CurveLocus, Eigenvalue, LedgerEntry, RatioCheck,
};
use foliage_core::{QDarboux, QField, QPoly, QUPoly, Rat, VarSet, C64};
use serde_json::{json, Map, Value};

use crate::error::CliError;
use crate::expr::parse_expression;
use crate::job::{Entry, JobDoc};
use crate::lower::{lower_to_semantics, Semantic};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    VerifyIntegral,
    Independence,
    Blowup,
    Singular,
    BaumBott,
    ClassifyDicritical,
    Trace,
    Conjugacy,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    #[default]
    Plain,
}

/// Values given on the command line; they override the same keys in a job document.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub vars: Option<String>,
    pub chart: Option<String>,
    pub step: Option<f64>,
    pub n_steps: Option<usize>,
    pub escape: Option<f64>,
    pub tol: Option<f64>,
}

const SHARED_KEYS: &[&str] = &["vars", "chart", "step", "n_steps", "escape", "tol"];

#[derive(Clone, Debug, PartialEq)]
pub struct JobConfig {
    pub command: Command,
    pub doc: JobDoc,
    pub vars: VarSet,
    pub chart: Option<String>,
    pub step: f64,
    pub n_steps: usize,
    pub escape: f64,
    pub tol: Option<f64>,
}

fn positive<T: PartialOrd + Default + Copy + std::fmt::Display>(name: &str, v: T) -> Result<T, CliError> {
    if v > T::default() {
        Ok(v)
    } else {
        Err(CliError::input(format!("{name} must be positive, got {v}")))
    }
}

fn doc_number<T: FromStr>(doc: &JobDoc, key: &str) -> Result<Option<T>, CliError> {
    doc.get(key)
        .map(|e| e.value.parse::<T>().map_err(|_| doc.error(e, format!("`{key}` is not a valid number"))))
        .transpose()
}

impl JobConfig {
    pub fn new(command: Command, doc: JobDoc, flags: &Overrides) -> Result<Self, CliError> {
        let vars_text = flags.vars.clone().or_else(|| doc.get("vars").map(|e| e.value.clone()));
        let vars = match vars_text {
            Some(t) => VarSet::parse(&t).map_err(|e| CliError::input(format!("--vars: {e}")))?,
            None => VarSet::xyz(),
        };
        let step = flags.step.or(doc_number(&doc, "step")?).unwrap_or(DEFAULT_STEP);
        let n_steps = flags.n_steps.or(doc_number(&doc, "n_steps")?).unwrap_or(1000);
        let escape = flags.escape.or(doc_number(&doc, "escape")?).unwrap_or(DEFAULT_ESCAPE_RADIUS);
        let tol = flags.tol.or(doc_number(&doc, "tol")?);
        positive("step", step)?;
        positive("n_steps", n_steps)?;
        positive("escape", escape)?;
        if let Some(t) = tol {
            positive("tol", t)?;
        }
        let chart = flags.chart.clone().or_else(|| doc.get("chart").map(|e| e.value.clone()));
        Ok(JobConfig { command, doc, vars, chart, step, n_steps, escape, tol })
    }
}

/// Result document of one job. `passed` is false when a mathematical check failed.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub json: Value,
    pub plain: String,
    pub csv: String,
}

impl Outcome {
    fn new(passed: bool, json: Value, plain: String) -> Self {
        let csv = key_value_csv(&json);
        Outcome { passed, json, plain, csv }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => format!("{}\n", serde_json::to_string_pretty(&self.json).expect("serializable")),
            Format::Csv => self.csv.clone(),
            Format::Plain => self.plain.clone(),
        }
    }
}

fn csv_string(rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
}

/// Top-level fields of a JSON object as `key,value` rows.
fn key_value_csv(v: &Value) -> String {
    let mut rows = vec![vec!["key".to_string(), "value".to_string()]];
    if let Value::Object(m) = v {
        for (k, x) in m {
            let s = match x {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            rows.push(vec![k.clone(), s]);
        }
    }
    csv_string(&rows)
}

fn float(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn complex_json(z: C64) -> Value {
    json!({ "re": float(z.re), "im": float(z.im) })
}

fn rat_json(r: &Rat) -> Value {
    Value::String(r.to_string())
}

fn semantic(doc: &JobDoc, e: &Entry, vars: &VarSet) -> Result<Semantic, CliError> {
    let ast = parse_expression(&e.value, vars).map_err(|err| doc.error(e, format!("`{}`: {err}", e.key)))?;
    lower_to_semantics(&ast, vars).map_err(|err| doc.error(e, format!("`{}`: {err}", e.key)))
}

fn darboux(doc: &JobDoc, e: &Entry, vars: &VarSet) -> Result<QDarboux, CliError> {
    semantic(doc, e, vars)?.into_darboux().map_err(|err| doc.error(e, err))
}

fn polynomial(doc: &JobDoc, e: &Entry, text: &str, vars: &VarSet) -> Result<QPoly, CliError> {
    let ast = parse_expression(text, vars).map_err(|err| doc.error(e, format!("`{text}`: {err}")))?;
    lower_to_semantics(&ast, vars)
        .and_then(Semantic::into_polynomial)
        .map_err(|err| doc.error(e, format!("`{text}`: {err}")))
}

fn field(doc: &JobDoc, e: &Entry, vars: &VarSet) -> Result<QField, CliError> {
    let parts: Vec<&str> = e.value.split(';').map(str::trim).collect();
    if parts.len() != vars.len() {
        return Err(doc.error(e, format!("field needs {} `;`-separated components, got {}", vars.len(), parts.len())));
    }
    let comps = parts.iter().map(|p| polynomial(doc, e, p, vars)).collect::<Result<Vec<_>, _>>()?;
    QField::new(comps).map_err(|err| doc.error(e, err))
}

/// `3`, `-3/4` or `0.125`, read exactly.
pub fn parse_rational(s: &str) -> Option<Rat> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let r = if body.contains('.') {
        match parse_expression(body, &VarSet::new(Vec::<String>::new()).ok()?).ok()? {
            crate::expr::Expr::Num(r) => r,
            _ => return None,
        }
    } else {
        Rat::from_str(body).ok()?
    };
    Some(if neg { -r } else { r })
}

fn rationals(doc: &JobDoc, e: &Entry, sep: char) -> Result<Vec<Rat>, CliError> {
    e.value
        .split(sep)
        .filter(|t| !t.trim().is_empty())
        .map(|t| parse_rational(t).ok_or_else(|| doc.error(e, format!("`{}` is not a rational number", t.trim()))))
        .collect()
}

fn complexes(doc: &JobDoc, e: &Entry) -> Result<Vec<C64>, CliError> {
    e.value
        .split(',')
        .map(|t| {
            let t = t.trim().replace(' ', "");
            C64::from_str(&t).map_err(|_| doc.error(e, format!("`{t}` is not a complex number")))
        })
        .collect()
}

fn allow(extra: &'static [&'static str]) -> impl Fn(&str) -> bool {
    move |k| extra.contains(&k) || SHARED_KEYS.contains(&k)
}

pub fn run_command(cfg: &JobConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::VerifyIntegral => verify_integral(cfg),
        Command::Independence => independence(cfg),
        Command::Blowup => blowup(cfg),
        Command::Singular => singular(cfg),
        Command::BaumBott => baum_bott(cfg),
        Command::ClassifyDicritical => classify_dicritical(cfg),
        Command::Trace => trace(cfg),
        Command::Conjugacy => conjugacy(cfg),
    }
}

fn verify_integral(cfg: &JobConfig) -> Result<Outcome, CliError> {
    let doc = &cfg.doc;
    doc.check_keys(allow(&["field", "integral"]), &["integral"])?;
    let v = field(doc, doc.require("field")?, &cfg.vars)?;
    let mut results = Vec::new();
    let mut plain = String::new();
    let mut passed = true;
    if doc.all("integral").next().is_none() {
        return Err(doc.require("integral").unwrap_err());
    }
    for e in doc.all("integral") {
        let d = darboux(doc, e, &cfg.vars)?;
        let ok = darboux_lie_derivative_vanishes(&v, &d)?;
        let residual = darboux_lie_derivative(&v, &d)?;
        passed &= ok;
        let verdict = if ok { "exact zero Lie derivative" } else { "nonzero Lie derivative" };
        writeln!(plain, "integral: {d}").unwrap();
        writeln!(plain, "verdict: {verdict}").unwrap();
        if !ok {
            writeln!(plain, "residual: {residual}").unwrap();
        }
        results.push(json!({
            "integral": d.to_string(),
            "vanishes": ok,
            "verdict": verdict,
            "lie_derivative_factor": residual.to_string(),
        }));
    }
    let out = json!({ "command": "verify-integral", "field": v.to_string(), "passed": passed, "results": results });
    Ok(Outcome::new(passed, out, plain))
}

fn independence(cfg: &JobConfig) -> Result<Outcome, CliError> {
    let doc = &cfg.doc;
    doc.check_keys(allow(&["first", "second"]), &[])?;
    let f = darboux(doc, doc.require("first")?, &cfg.vars)?;
    let g = darboux(doc, doc.require("second")?, &cfg.vars)?;
    let (passed, json_out, plain) = match independence_witness(&f, &g)? {
        Independence::Dependent => (
            false,
            json!({ "command": "independence", "independent": false, "verdict": "dependent" }),
            "verdict: dependent\n".to_string(),
        ),
        Independence::Independent { first, second, minor } => (
            true,
            json!({
                "command": "independence",
                "independent": true,
                "verdict": "independent",
                "minor_variables": [first, second],
                "minor": minor.to_string(),
            }),
            format!("verdict: independent\nminor d({first},{second}): {minor}\n"),
        ),
    };
    Ok(Outcome::new(passed, json_out, plain))
}

fn chart(cfg: &JobConfig) -> Result<BlowupChart<Rat>, CliError> {
    let names = BlowupChart::<Rat>::builtin_names().join(", ");
    let name = cfg.chart.as_deref().ok_or_else(|| CliError::input(format!("missing chart (one of: {names})")))?;
    BlowupChart::by_name(name).ok_or_else(|| CliError::input(format!("unknown chart `{name}` (one of: {names})")))
}

fn blowup(cfg: &JobConfig) -> Result<Outcome, CliError> {
    let doc = &cfg.doc;
    doc.check_keys(allow(&["function", "field"]), &[])?;
    let c = chart(cfg)?;
    let source = c.source().clone();
    match (doc.get("function"), doc.get("field")) {
        (Some(e), None) => {
            let d = darboux(doc, e, &source)?;
            let r = pullback_function(&c, &d)?;
            let plain = format!("{}\nmultiplicity: {}\n", r.reduced, r.multiplicity);
            let out = json!({
                "command": "blowup",
                "chart": c.name(),
                "function": d.to_string(),
                "pulled": r.pulled.to_string(),
                "reduced": r.reduced.to_string(),
                "multiplicity": r.multiplicity,
            });
            Ok(Outcome::new(true, out, plain))
        }
        (None, Some(e)) => {
            let v = field(doc, e, &source)?;
            let r = pullback_vector_field(&c, &v)?;
            let invariant = is_divisor_invariant(&r.field, &c)?;
            let plain = format!("{}\nmultiplicity: {}\ndivisor_invariant: {invariant}\n", r.field, r.multiplicity);
            let comps: Vec<String> = r.field.components().iter().map(ToString::to_string).collect();
            let out = json!({
                "command": "blowup",
                "chart": c.name(),
                "field": comps,
                "multiplicity": r.multiplicity,
                "divisor_invariant": invariant,
            });
            Ok(Outcome::new(true, out, plain))
        }
        _ => Err(CliError::input(format!("{}: give exactly one of `function` or `field`", doc.source))),
    }
}

fn eigen_json(e: &Eigenvalue) -> Value {
    let mut m = Map::new();
    m.insert("value".into(), Value::String(e.to_string()));
    m.insert("exact".into(), Value::Bool(e.is_exact()));
    if !e.is_exact() {
        m.insert("approx".into(), complex_json(e.to_complex()));
    }
    Value::Object(m)
}

fn singular(cfg: &JobConfig) -> Result<Outcome, CliError> {
    let doc = &cfg.doc;
    doc.check_keys(allow(&["field", "point", "curve"]), &[])?;
    let v = field(doc, doc.require("field")?, &cfg.vars)?;
    match (doc.get("point"), doc.get("curve")) {
        (Some(e), None) => {
            let p = rationals(doc, e, ',')?;
            if p.len() != v.dim() {
                return Err(doc.error(e, format!("point needs {} coordinates", v.dim())));
            }
            let shown = p.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
            if !is_singular_at(&v, &p)? {
                let out = json!({ "command": "singular", "point": p.iter().map(rat_json).collect::<Vec<_>>(), "singular": false });
                return Ok(Outcome::new(false, out, format!("not singular at ({shown})\n")));
            }
            let r = linear_part(&v, &p)?;
            let ratio = eigenvalue_ratio_rationality(&r);
            let sign = saddle_sign_pattern(&r);
            let chi = r.characteristic_polynomial.display_in("l");
            let mut plain = format!("singular at ({shown})\n");
            for row in &r.linear_part {
                writeln!(plain, "  [{}]", row.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")).unwrap();
            }
            writeln!(plain, "characteristic polynomial: {chi}").unwrap();
            writeln!(
                plain,
                "eigenvalues: {}",
                r.eigenvalues.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
            )
            .unwrap();
            writeln!(plain, "simple: {}", r.simple).unwrap();
            writeln!(plain, "rational eigenvalue ratios: {}", ratio.is_ok()).unwrap();
            if let Some(s) = sign {
                writeln!(plain, "saddle sign pattern: {s}").unwrap();
            }
            let violations = match &ratio {
                RatioCheck::Ok => vec![],
                RatioCheck::Violations(vs) => vs
                    .iter()
                    .map(|x| json!({ "first": x.first, "second": x.second, "kind": format!("{:?}", x.kind) }))
                    .collect(),
            };
            let out = json!({
                "command": "singular",
                "point": p.iter().map(rat_json).collect::<Vec<_>>(),
                "singular": true,
                "linear_part": r.linear_part.iter().map(|row| row.iter().map(rat_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "characteristic_polynomial": chi,
                "eigenvalues": r.eigenvalues.iter().map(eigen_json).collect::<Vec<_>>(),
                "simple": r.simple,
                "trace": rat_json(&r.trace()),
                "determinant": rat_json(&r.determinant()),
                "ratio_violations": violations,
                "saddle_sign_pattern": sign,
            });
            Ok(Outcome::new(true, out, plain))
        }
        (None, Some(e)) => {
            let s = VarSet::parse("s").expect("valid");
            let parts: Vec<&str> = e.value.split(';').map(str::trim).collect();
            if parts.len() != v.dim() {
                return Err(doc.error(e, format!("curve needs {} `;`-separated components in s", v.dim())));
            }
            let curve = parts
                .iter()
                .map(|t| {
                    let p = polynomial(doc, e, t, &s)?;
                    let deg = p.total_degree().unwrap_or(0) as usize;
                    let coeffs =
                        (0..=deg).map(|k| p.coefficient(&foliage_core::Monomial::new(vec![k as u32]))).collect();
                    Ok(QUPoly::new(coeffs))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let locus = singular_locus_on_curve(&v, &curve)?;
            let (plain, out) = match locus {
                CurveLocus::AllParameters => (
                    "singular for all s\n".to_string(),
                    json!({ "command": "singular", "curve": parts, "locus": "all" }),
                ),
                CurveLocus::Finite { roots, residual } => {
                    let rs: Vec<String> = roots.iter().map(ToString::to_string).collect();
                    let res = residual.map(|r| r.display_in("s"));
                    let mut plain = format!("singular at s in {{{}}}\n", rs.join(", "));
                    if let Some(r) = &res {
                        writeln!(plain, "plus the roots of {r}").unwrap();
                    }
                    (
                        plain,
                        json!({ "command": "singular", "curve": parts, "locus": "finite", "roots": rs, "residual": res }),
                    )
                }
            };
            Ok(Outcome::new(true, out, plain))
        }
        _ => Err(CliError::input(format!("{}: give exactly one of `point` or `curve`", doc.source))),
    }
}

fn baum_bott(cfg: &JobConfig) -> Result<Outcome, CliError> {
    let doc = &cfg.doc;
    doc.check_keys(|k| k == "degree" || k.starts_with('p') || SHARED_KEYS.contains(&k), &[])?;
    let de = doc.require("degree")?;
    let degree: u32 = de.value.parse().map_err(|_| doc.error(de, "degree must be a non-negative integer"))?;
    let mut entries = Vec::new();
    for e in doc.entries().iter().filter(|e| e.key.starts_with('p')) {
        let ev = rationals(doc, e, ' ').map_err(|_| doc.error(e, "expected two rational eigenvalues"))?;
        let [a, b] = <[Rat; 2]>::try_from(ev).map_err(|_| doc.error(e, "expected exactly two eigenvalues"))?;
        entries.push(LedgerEntry {
            label: e.key.clone(),
            first: Eigenvalue::Rational(a),
            second: Eigenvalue::Rational(b),
        });
    }
    let ledger = BaumBottLedger::new(degree, entries)?;
    let r = baum_bott_global_check(&ledger);
    let yes = |b: bool| if b { "yes" } else { "no" };
    let mut plain = String::new();
    for (e, i) in ledger.entries().iter().zip(ledger.indices()) {
        writeln!(plain, "{}: index {i}", e.label).unwrap();
    }
    writeln!(plain, "degree: {}", r.degree).unwrap();
    writeln!(plain, "points: {} (expected {})", r.count, r.expected_count).unwrap();
    writeln!(plain, "index sum: {} (expected {})", r.sum, r.expected_sum).unwrap();
    let at_least = r.all_at_least_four.map_or("undecided", yes);
    writeln!(plain, "all indices >= 4: {at_least}").unwrap();
    writeln!(plain, "lower bound: {} (gap {})", r.lower_bound, r.bound_gap).unwrap();
    writeln!(plain, "contradiction: {}", yes(r.bound_contradiction)).unwrap();
    writeln!(plain, "consistent: {}", yes(r.is_consistent())).unwrap();
    let out = json!({
        "command": "baum-bott",
        "degree": r.degree,
        "indices": ledger.entries().iter().zip(ledger.indices()).map(|(e, i)| json!({ "label": e.label, "index": i.to_string() })).collect::<Vec<_>>(),
        "count": r.count,
        "expected_count": r.expected_count.to_string(),
        "count_ok": r.count_ok,
        "sum": r.sum.to_string(),
        "expected_sum": rat_json(&r.expected_sum),
        "sum_ok": r.sum_ok,
        "all_at_least_four": r.all_at_least_four,
        "lower_bound": rat_json(&r.lower_bound),
        "bound_gap": rat_json(&r.bound_gap),
        "bound_contradiction": r.bound_contradiction,
        "consistent": r.is_consistent(),
    });
    Ok(Outcome::new(r.is_consistent(), out, plain))
}

/// Splits `expr ^annotation` at the last whitespace-separated token starting with `^`.
fn split_annotation<'a>(doc: &JobDoc, e: &'a Entry) -> Result<(&'a str, &'a str), CliError> {
    let v = e.value.trim_end();
    let cut = v
        .rfind(char::is_whitespace)
        .filter(|&i| v[i..].trim_start().starts_with('^'))
        .ok_or_else(|| doc.error(e, "expected `<expr> ^<exponent>` with a space before `^`"))?;
    Ok((v[..cut].trim(), v[cut..].trim_start()[1..].trim()))
}

fn exponent(doc: &JobDoc, e: &Entry, s: &str) -> Result<u32, CliError> {
    s.trim()
        .parse::<u32>()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| doc.error(e, format!("`{s}` is not a positive integer")))
}

fn classify_dicritical(cfg: &JobConfig) -> Result<Outcome, CliError> {
    let doc = &cfg.doc;
    doc.check_keys(allow(&["h", "f", "g", "product_f", "product_g"]), &["h", "f", "g"])?;
    let vars = &cfg.vars;
    let mut common = Vec::new();
    let mut only_f = Vec::new();
    let mut only_g = Vec::new();
    for e in doc.entries() {
        match e.key.as_str() {
            "h" => {
                let (ex, ann) = split_annotation(doc, e)?;
                let inner = ann
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(|| doc.error(e, "common factors need `^(k,l)`"))?;
                let (k, l) = inner.split_once(',').ok_or_else(|| doc.error(e, "common factors need `^(k,l)`"))?;
                common.push(CommonFactor {
                    factor: polynomial(doc, e, ex, vars)?,
                    k: exponent(doc, e, k)?,
                    l: exponent(doc, e, l)?,
                });
            }
            "f" | "g" => {
                let (ex, ann) = split_annotation(doc, e)?;
                let pf = PrivateFactor { factor: polynomial(doc, e, ex, vars)?, exponent: exponent(doc, e, ann)? };
                if e.key == "f" {
                    only_f.push(pf);
                } else {
                    only_g.push(pf);
                }
            }
            _ => {}
        }
    }
    let fp = FactoredPair::new(common, only_f, only_g)?;
    match (doc.get("product_f"), doc.get("product_g")) {
        (Some(a), Some(b)) => {
            fp.check_products(&polynomial(doc, a, &a.value, vars)?, &polynomial(doc, b, &b.value, vars)?)?
        }
        (None, None) => {}
        _ => return Err(CliError::input(format!("{}: give both `product_f` and `product_g` or neither", doc.source))),
    }
    let verdict = classify(&fp)?;
    let (p, q, r) = fp.counts();
    let mut plain = format!("dicritical: {}\ncase: {}\n", verdict.dicritical, verdict.case);
    let witness = verdict.witness.as_ref().map(|w| {
        writeln!(plain, "surface: {{{} = 0}}", w.surface).unwrap();
        writeln!(plain, "witness: {w}").unwrap();
        writeln!(plain, "witness kind: {}", w.kind).unwrap();
        let expanded = w.to_rational().map(|q| q.to_string()).ok();
        json!({
            "surface": w.surface.to_string(),
            "index": w.index,
            "expression": w.to_string(),
            "expanded": expanded,
            "kind": w.kind.to_string(),
        })
    });
    let out = json!({
        "command": "classify-dicritical",
        "dicritical": verdict.dicritical,
        "case": verdict.case.to_string(),
        "strict_inequalities": verdict.strict_inequalities,
        "counts": { "p": p, "q": q, "r": r },
        "witness": witness,
    });
    Ok(Outcome::new(true, out, plain))
}

fn trace(cfg: &JobConfig) -> Result<Outcome, CliError> {
    let doc = &cfg.doc;
    doc.check_keys(allow(&["field", "start", "direction", "integral"]), &["integral"])?;
    let v = field(doc, doc.require("field")?, &cfg.vars)?;
    let se = doc.require("start")?;
    let start = complexes(doc, se)?;
    let direction = match doc.get("direction") {
        Some(e) => *complexes(doc, e)?.first().ok_or_else(|| doc.error(e, "empty direction"))?,
        None => C64::new(1.0, 0.0),
    };
    let integrals = doc.all("integral").map(|e| darboux(doc, e, &cfg.vars)).collect::<Result<Vec<_>, _>>()?;
    let tc = TraceConfig { step: cfg.step, n_steps: cfg.n_steps, escape_radius: cfg.escape };
    let t = trace_leaf(&v, &start, direction, &tc)?;
    let tol = cfg.tol.unwrap_or(DEFAULT_DRIFT_TOLERANCE);
    let drifts = integrals.iter().map(|d| conservation_drift(&t, d)).collect::<Result<Vec<_>, _>>()?;
    let passed = drifts.iter().all(|r| r.max_relative_drift <= tol && r.warning_index.is_none());

    let names = cfg.vars.names();
    let mut header = vec!["step".to_string(), "tau_re".into(), "tau_im".into()];
    for n in names {
        header.push(format!("{n}_re"));
        header.push(format!("{n}_im"));
    }
    for i in 0..integrals.len() {
        header.push(format!("I{}_re", i + 1));
        header.push(format!("I{}_im", i + 1));
    }
    let mut rows = vec![header];
    for (n, s) in t.samples.iter().enumerate() {
        let mut row = vec![n.to_string(), s.tau.re.to_string(), s.tau.im.to_string()];
        for z in &s.state {
            row.push(z.re.to_string());
            row.push(z.im.to_string());
        }
        for d in &drifts {
            match d.values.get(n) {
                Some(z) => {
                    row.push(z.re.to_string());
                    row.push(z.im.to_string());
                }
                None => row.extend([String::new(), String::new()]),
            }
        }
        rows.push(row);
    }
    let mut drift_rows =
        vec![vec!["integral".to_string(), "expression".into(), "max_relative_drift".into(), "warning_index".into()]];
    let mut plain = format!("samples: {}\nescaped: {}\n", t.samples.len(), t.escaped);
    let end: Vec<String> = t.end().iter().map(ToString::to_string).collect();
    writeln!(plain, "end: ({})", end.join(", ")).unwrap();
    let mut drift_json = Vec::new();
    for (i, (d, r)) in integrals.iter().zip(&drifts).enumerate() {
        let warn = r.warning_index.map(|w| w.to_string()).unwrap_or_default();
        drift_rows.push(vec![format!("I{}", i + 1), d.to_string(), r.max_relative_drift.to_string(), warn.clone()]);
        write!(plain, "I{} = {d}: max relative drift {}", i + 1, r.max_relative_drift).unwrap();
        if let Some(w) = r.warning_index {
            write!(plain, " (stopped at sample {w}: denominator too small)").unwrap();
        }
        plain.push('\n');
        drift_json.push(json!({
            "integral": d.to_string(),
            "max_relative_drift": float(r.max_relative_drift),
            "warning_index": r.warning_index,
        }));
    }
    let samples: Vec<Value> = t
        .samples
        .iter()
        .map(|s| json!({ "tau": complex_json(s.tau), "state": s.state.iter().map(|z| complex_json(*z)).collect::<Vec<_>>() }))
        .collect();
    let out = json!({
        "command": "trace",
        "escaped": t.escaped,
        "step": float(t.step),
        "direction": complex_json(direction),
        "tolerance": float(tol),
        "passed": passed,
        "drift": drift_json,
        "samples": samples,
    });
    let csv = format!("{}\n{}", csv_string(&rows), csv_string(&drift_rows));
    Ok(Outcome { passed, json: out, plain, csv })
}

fn conjugacy(cfg: &JobConfig) -> Result<Outcome, CliError> {
    let doc = &cfg.doc;
    doc.check_keys(allow(&["nx", "nt", "nz", "x_radius", "t_min", "t_max", "z_radius"]), &[])?;
    let d = ConjugacyGrid::default();
    let grid = ConjugacyGrid {
        nx: doc_number(doc, "nx")?.unwrap_or(d.nx),
        nt: doc_number(doc, "nt")?.unwrap_or(d.nt),
        nz: doc_number(doc, "nz")?.unwrap_or(d.nz),
        x_radius: doc_number(doc, "x_radius")?.unwrap_or(d.x_radius),
        t_min: doc_number(doc, "t_min")?.unwrap_or(d.t_min),
        t_max: doc_number(doc, "t_max")?.unwrap_or(d.t_max),
        z_radius: doc_number(doc, "z_radius")?.unwrap_or(d.z_radius),
    };
    let rows = evaluate_grid(&grid)?;
    let tol = cfg.tol.unwrap_or(1e-10);
    let max_g = rows.iter().map(|r| r.residuals.r_g_relative).fold(0.0, f64::max);
    let max_h = rows.iter().map(|r| r.residuals.r_h_relative).fold(0.0, f64::max);
    let bound_ok = rows.iter().all(|r| r.phi3_bound_ok);
    let divisor_ok = rows.iter().all(|r| r.divisor_exact);
    let passed = max_g <= tol && max_h <= tol && bound_ok && divisor_ok;

    let mut table =
        vec![["x_re", "x_im", "t_re", "t_im", "z_re", "z_im", "r_g", "r_h", "r_g_rel", "r_h_rel", "phi3_bound_ok"]
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()];
    for r in &rows {
        let mut row: Vec<String> = r.point.iter().flat_map(|z| [z.re.to_string(), z.im.to_string()]).collect();
        let res = r.residuals;
        row.extend([res.r_g, res.r_h, res.r_g_relative, res.r_h_relative].iter().map(ToString::to_string));
        row.push(r.phi3_bound_ok.to_string());
        table.push(row);
    }
    let plain = format!(
        "points: {}\nmax relative r_G: {max_g}\nmax relative r_H: {max_h}\nphi3 bound holds: {bound_ok}\nphi3 = z on x = 0: {divisor_ok}\npassed: {passed}\n",
        rows.len()
    );
    let out = json!({
        "command": "conjugacy",
        "points": rows.len(),
        "tolerance": float(tol),
        "max_relative_r_g": float(max_g),
        "max_relative_r_h": float(max_h),
        "phi3_bound_ok": bound_ok,
        "phi3_divisor_exact": divisor_ok,
        "branch": "principal",
        "passed": passed,
    });
    Ok(Outcome { passed, json: out, plain, csv: csv_string(&table) })
}
