//! Canonical JSON encoding shared by the library and the CLI: sorted
//! object keys, shortest round-trip floats, omitted optional fields.
//! Matrices are {"n": int, "re": [[...]], "im": [[...]]}, row-major.

use num_complex::Complex;
use serde_json::{json, Map, Value};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::lagrange::LagrangianSubspace;
use crate::numcore::CMat;
use crate::qham::{CheckReport, FormcheckConfig, FormcheckReport};
use crate::reps::{ConjugacyClass, LagrangianWitness, RepTuple};
use crate::solver::{SolveMode, SolveProblem, SolveResult, SolveStatus};

/// serde_json's default map keeps keys sorted, so serialization is
/// canonical as long as every number is finite; non-finite values encode
/// as null.
pub fn to_canonical_string(v: &Value) -> String {
    serde_json::to_string(v).expect("canonical values serialize")
}

pub fn parse(s: &str) -> Result<Value> {
    serde_json::from_str(s).map_err(|e| Error::Malformed(format!("invalid JSON: {e}")))
}

fn num(f: f64) -> Value {
    match serde_json::Number::from_f64(f) {
        Some(n) => Value::Number(n),
        None => Value::Null,
    }
}

fn float_rows(rows: Vec<Vec<f64>>) -> Value {
    Value::Array(
        rows.into_iter()
            .map(|r| Value::Array(r.into_iter().map(num).collect()))
            .collect(),
    )
}

fn obj_of<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::Malformed(format!("{what} must be a JSON object")))
}

fn field<'a>(m: &'a Map<String, Value>, key: &str, what: &str) -> Result<&'a Value> {
    m.get(key)
        .ok_or_else(|| Error::Malformed(format!("{what} is missing \"{key}\"")))
}

fn reject_unknown(m: &Map<String, Value>, allowed: &[&str], what: &str) -> Result<()> {
    for k in m.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::Malformed(format!("{what} has unknown key \"{k}\"")));
        }
    }
    Ok(())
}

fn get_usize(m: &Map<String, Value>, key: &str, what: &str) -> Result<usize> {
    field(m, key, what)?
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| Error::Malformed(format!("{what}.{key} must be a non-negative integer")))
}

fn get_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::Malformed(format!("{what} must be a number")))
}

fn float_matrix(v: &Value, n: usize, what: &str) -> Result<Vec<Vec<f64>>> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Malformed(format!("{what} must be an array of rows")))?;
    if rows.len() != n {
        return Err(Error::Malformed(format!("{what} must have {n} rows")));
    }
    rows.iter()
        .enumerate()
        .map(|(r, row)| {
            let row = row
                .as_array()
                .ok_or_else(|| Error::Malformed(format!("{what}[{r}] must be an array")))?;
            if row.len() != n {
                return Err(Error::Malformed(format!("{what}[{r}] must have {n} entries")));
            }
            row.iter().map(|e| get_f64(e, what)).collect()
        })
        .collect()
}

pub fn matrix_to_value(m: &CMat) -> Value {
    let n = m.nrows();
    let re: Vec<Vec<f64>> = (0..n)
        .map(|r| (0..n).map(|c| m[(r, c)].re).collect())
        .collect();
    let im: Vec<Vec<f64>> = (0..n)
        .map(|r| (0..n).map(|c| m[(r, c)].im).collect())
        .collect();
    json!({ "im": float_rows(im), "n": n, "re": float_rows(re) })
}

pub fn matrix_from_value(v: &Value) -> Result<CMat> {
    let m = obj_of(v, "matrix")?;
    reject_unknown(m, &["im", "n", "re"], "matrix")?;
    let n = get_usize(m, "n", "matrix")?;
    if n == 0 {
        return Err(Error::Malformed("matrix.n must be positive".into()));
    }
    let re = float_matrix(field(m, "re", "matrix")?, n, "matrix.re")?;
    let im = float_matrix(field(m, "im", "matrix")?, n, "matrix.im")?;
    Ok(CMat::from_fn(n, n, |r, c| Complex::new(re[r][c], im[r][c])))
}

pub fn lagrangian_to_value(s: &LagrangianSubspace) -> Value {
    let mut v = matrix_to_value(s.w());
    v.as_object_mut()
        .expect("matrix encodes as object")
        .insert("kind".into(), Value::String("lagrangian".into()));
    v
}

pub fn lagrangian_from_value(v: &Value, tol: &Tolerances) -> Result<LagrangianSubspace> {
    let m = obj_of(v, "lagrangian")?;
    reject_unknown(m, &["im", "kind", "n", "re"], "lagrangian")?;
    match field(m, "kind", "lagrangian")?.as_str() {
        Some("lagrangian") => {}
        _ => return Err(Error::Malformed("lagrangian.kind must be \"lagrangian\"".into())),
    }
    let mut inner = m.clone();
    inner.remove("kind");
    let w = matrix_from_value(&Value::Object(inner))?;
    LagrangianSubspace::from_w(w, tol)
}

fn angles_to_value(class: &ConjugacyClass) -> Value {
    Value::Array(class.angles.iter().map(|&a| num(a)).collect())
}

fn angles_from_value(v: &Value, what: &str) -> Result<ConjugacyClass> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Malformed(format!("{what} must be an array of angles")))?;
    let angles: Result<Vec<f64>> = arr.iter().map(|e| get_f64(e, what)).collect();
    let angles = angles?;
    ConjugacyClass::new(angles.len(), angles)
}

pub fn rep_to_value(rep: &RepTuple) -> Value {
    let mut m = Map::new();
    if let Some(classes) = &rep.classes {
        m.insert(
            "classes".into(),
            Value::Array(classes.iter().map(angles_to_value).collect()),
        );
    }
    m.insert("l".into(), json!(rep.l()));
    m.insert(
        "matrices".into(),
        Value::Array(rep.matrices.iter().map(matrix_to_value).collect()),
    );
    Value::Object(m)
}

pub fn rep_from_value(v: &Value, tol: &Tolerances) -> Result<RepTuple> {
    let m = obj_of(v, "rep")?;
    reject_unknown(m, &["classes", "l", "matrices"], "rep")?;
    let l = get_usize(m, "l", "rep")?;
    let arr = field(m, "matrices", "rep")?
        .as_array()
        .ok_or_else(|| Error::Malformed("rep.matrices must be an array".into()))?;
    if arr.len() != l {
        return Err(Error::Malformed(format!(
            "rep.l is {l} but rep.matrices has {} entries",
            arr.len()
        )));
    }
    let matrices: Result<Vec<CMat>> = arr.iter().map(matrix_from_value).collect();
    let rep = RepTuple::new(matrices?, tol)?;
    match m.get("classes") {
        None => Ok(rep),
        Some(cv) => {
            let carr = cv
                .as_array()
                .ok_or_else(|| Error::Malformed("rep.classes must be an array".into()))?;
            let classes: Result<Vec<ConjugacyClass>> = carr
                .iter()
                .map(|e| angles_from_value(e, "rep.classes[]"))
                .collect();
            rep.with_classes(classes?)
        }
    }
}

pub fn witness_to_value(w: &LagrangianWitness) -> Value {
    json!({
        "l": w.subspaces.len(),
        "lagrangians": Value::Array(w.subspaces.iter().map(lagrangian_to_value).collect()),
    })
}

pub fn witness_from_value(v: &Value, tol: &Tolerances) -> Result<LagrangianWitness> {
    let m = obj_of(v, "witness")?;
    reject_unknown(m, &["l", "lagrangians"], "witness")?;
    let l = get_usize(m, "l", "witness")?;
    let arr = field(m, "lagrangians", "witness")?
        .as_array()
        .ok_or_else(|| Error::Malformed("witness.lagrangians must be an array".into()))?;
    if arr.len() != l {
        return Err(Error::Malformed(format!(
            "witness.l is {l} but witness.lagrangians has {} entries",
            arr.len()
        )));
    }
    let subspaces: Result<Vec<LagrangianSubspace>> =
        arr.iter().map(|e| lagrangian_from_value(e, tol)).collect();
    Ok(LagrangianWitness { subspaces: subspaces? })
}

pub fn pairs_to_value(pairs: &crate::duality::PairTuple) -> Value {
    json!({
        "l": pairs.l(),
        "pairs": Value::Array(
            pairs
                .pairs
                .iter()
                .map(|(u, v)| Value::Array(vec![matrix_to_value(u), matrix_to_value(v)]))
                .collect(),
        ),
    })
}

pub fn pairs_from_value(v: &Value, tol: &Tolerances) -> Result<crate::duality::PairTuple> {
    let m = obj_of(v, "pairs")?;
    reject_unknown(m, &["l", "pairs"], "pairs")?;
    let l = get_usize(m, "l", "pairs")?;
    let arr = field(m, "pairs", "pairs")?
        .as_array()
        .ok_or_else(|| Error::Malformed("pairs.pairs must be an array".into()))?;
    if arr.len() != l {
        return Err(Error::Malformed(format!(
            "pairs.l is {l} but pairs.pairs has {} entries",
            arr.len()
        )));
    }
    let decoded: Result<Vec<(CMat, CMat)>> = arr
        .iter()
        .map(|e| {
            let pair = e
                .as_array()
                .ok_or_else(|| Error::Malformed("pairs.pairs[] must be [matrix, matrix]".into()))?;
            if pair.len() != 2 {
                return Err(Error::Malformed("pairs.pairs[] must be [matrix, matrix]".into()));
            }
            Ok((matrix_from_value(&pair[0])?, matrix_from_value(&pair[1])?))
        })
        .collect();
    crate::duality::PairTuple::new(decoded?, tol)
}

fn mode_str(mode: SolveMode) -> &'static str {
    match mode {
        SolveMode::Unitary => "unitary",
        SolveMode::Lagrangian => "lagrangian",
    }
}

fn mode_from_str(s: &str) -> Result<SolveMode> {
    match s {
        "unitary" => Ok(SolveMode::Unitary),
        "lagrangian" => Ok(SolveMode::Lagrangian),
        other => Err(Error::Malformed(format!(
            "problem.mode must be \"unitary\" or \"lagrangian\", got \"{other}\""
        ))),
    }
}

pub fn problem_to_value(p: &SolveProblem) -> Value {
    json!({
        "classes": Value::Array(p.classes.iter().map(angles_to_value).collect()),
        "l": p.l,
        "max_iter": p.max_iter,
        "mode": mode_str(p.mode),
        "n": p.n,
        "restarts": p.restarts,
        "seed": p.seed,
    })
}

pub fn problem_from_value(v: &Value) -> Result<SolveProblem> {
    let m = obj_of(v, "problem")?;
    reject_unknown(
        m,
        &["classes", "l", "max_iter", "mode", "n", "restarts", "seed"],
        "problem",
    )?;
    let arr = field(m, "classes", "problem")?
        .as_array()
        .ok_or_else(|| Error::Malformed("problem.classes must be an array".into()))?;
    let classes: Result<Vec<ConjugacyClass>> = arr
        .iter()
        .map(|e| angles_from_value(e, "problem.classes[]"))
        .collect();
    let mode = mode_from_str(
        field(m, "mode", "problem")?
            .as_str()
            .ok_or_else(|| Error::Malformed("problem.mode must be a string".into()))?,
    )?;
    let seed = m
        .get("seed")
        .map(|v| {
            v.as_u64()
                .ok_or_else(|| Error::Malformed("problem.seed must be a non-negative integer".into()))
        })
        .transpose()?
        .unwrap_or(0);
    let mut problem = SolveProblem::new(classes?, mode, seed)?;
    if m.contains_key("n") {
        let n = get_usize(m, "n", "problem")?;
        if n != problem.n {
            return Err(Error::Malformed(format!(
                "problem.n is {n} but the classes have dimension {}",
                problem.n
            )));
        }
    }
    if m.contains_key("l") {
        let l = get_usize(m, "l", "problem")?;
        if l != problem.l {
            return Err(Error::Malformed(format!(
                "problem.l is {l} but there are {} classes",
                problem.l
            )));
        }
    }
    if m.contains_key("restarts") {
        problem.restarts = get_usize(m, "restarts", "problem")?;
    }
    if m.contains_key("max_iter") {
        problem.max_iter = get_usize(m, "max_iter", "problem")?;
    }
    Ok(problem)
}

fn status_str(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Found => "found",
        SolveStatus::NotFound => "not_found",
        SolveStatus::InfeasibleDeterminant => "infeasible_determinant",
    }
}

pub fn result_to_value(r: &SolveResult) -> Value {
    let mut m = Map::new();
    if let Some(cr) = &r.class_residuals {
        m.insert(
            "class_residuals".into(),
            Value::Array(cr.iter().map(|&x| num(x)).collect()),
        );
    }
    m.insert("iterations".into(), json!(r.iterations));
    if let Some(o) = r.objective {
        m.insert("objective".into(), num(o));
    }
    if let Some(p) = r.product_residual {
        m.insert("product_residual".into(), num(p));
    }
    if let Some(rep) = &r.rep {
        m.insert("rep".into(), rep_to_value(rep));
    }
    m.insert("restarts_used".into(), json!(r.restarts_used));
    m.insert("status".into(), Value::String(status_str(r.status).into()));
    if let Some(w) = &r.witness {
        m.insert("witness".into(), witness_to_value(w));
    }
    Value::Object(m)
}

pub fn formcheck_config_from_value(v: &Value) -> Result<FormcheckConfig> {
    let m = obj_of(v, "formcheck config")?;
    reject_unknown(m, &["h", "l", "n", "samples", "seed"], "formcheck config")?;
    let mut cfg = FormcheckConfig::default();
    if m.contains_key("n") {
        cfg.n = get_usize(m, "n", "formcheck config")?;
    }
    if m.contains_key("l") {
        cfg.l = get_usize(m, "l", "formcheck config")?;
    }
    if m.contains_key("samples") {
        cfg.samples = get_usize(m, "samples", "formcheck config")?;
    }
    if m.contains_key("seed") {
        cfg.seed = field(m, "seed", "formcheck config")?
            .as_u64()
            .ok_or_else(|| Error::Malformed("formcheck config.seed must be an integer".into()))?;
    }
    if m.contains_key("h") {
        cfg.h = get_f64(field(m, "h", "formcheck config")?, "formcheck config.h")?;
        if !(cfg.h > 0.0) {
            return Err(Error::Malformed("formcheck config.h must be positive".into()));
        }
    }
    if cfg.n == 0 || cfg.l == 0 {
        return Err(Error::Malformed("formcheck config needs n ≥ 1 and l ≥ 1".into()));
    }
    Ok(cfg)
}

fn check_to_value(c: &CheckReport) -> Value {
    json!({
        "degenerate_count": c.degenerate_count,
        "max_residual": num(c.max_residual),
        "name": c.name,
        "pass": c.pass,
        "samples": c.samples,
        "tolerance": num(c.tolerance),
    })
}

pub fn formcheck_report_to_value(r: &FormcheckReport) -> Value {
    json!({
        "checks": Value::Array(r.checks.iter().map(check_to_value).collect()),
        "h": num(r.h),
        "l": r.l,
        "n": r.n,
        "pass": r.pass,
        "samples": r.samples,
        "seed": r.seed,
    })
}
