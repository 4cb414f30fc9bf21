//! JSON encodings. Every number is an exact `"num/den"` string.

use serde_json::{json, Map, Value};

use polylift_core::circulation::{CapacityBounds, Circulation, CirculationError};
use polylift_core::descriptions::{InequalitySystem, LinearConstraint, Relation};
use polylift_core::families::VRep;
use polylift_core::graphcore::{Digraph, NodeSet};
use polylift_core::lifting::{Counterexample, SectionFailure, SectionReport, Witness};
use polylift_core::orbisack::BlockIneq;
use polylift_core::verify::{CompletenessReport, ConstraintClass};
use polylift_core::{ExtendedRational, Rational};

#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error("invalid JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("{0}")]
    Schema(String),
}

fn schema<T>(msg: impl Into<String>) -> Result<T, JsonError> {
    Err(JsonError::Schema(msg.into()))
}

pub fn rat(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn rats(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rat).collect())
}

pub fn points(ps: &[Vec<Rational>]) -> Value {
    Value::Array(ps.iter().map(|p| rats(p)).collect())
}

fn set(s: &NodeSet) -> Value {
    json!(s.iter().collect::<Vec<_>>())
}

pub fn parse_rat(v: &Value) -> Result<Rational, JsonError> {
    match v {
        Value::String(s) => s.parse().map_err(|_| JsonError::Schema(format!("not a rational: {s:?}"))),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Rational::from_int(i)),
            None => schema(format!("non-integer number {n}; write rationals as \"num/den\"")),
        },
        other => schema(format!("expected a rational, found {other}")),
    }
}

pub fn parse_ext(v: &Value) -> Result<ExtendedRational, JsonError> {
    match v {
        Value::String(s) => s.parse().map_err(|_| JsonError::Schema(format!("not an extended rational: {s:?}"))),
        other => Ok(ExtendedRational::Finite(parse_rat(other)?)),
    }
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value, JsonError> {
    obj.get(key).ok_or_else(|| JsonError::Schema(format!("missing field {key:?}")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, JsonError> {
    v.as_array().ok_or_else(|| JsonError::Schema(format!("{what} must be an array")))
}

fn string<'a>(v: &'a Value, what: &str) -> Result<&'a str, JsonError> {
    v.as_str().ok_or_else(|| JsonError::Schema(format!("{what} must be a string")))
}

/// Comma-separated rationals, e.g. `"0/1,1/2"`.
pub fn parse_point(text: &str) -> Result<Vec<Rational>, JsonError> {
    text.split(',').map(|t| t.trim().parse().map_err(|_| JsonError::Schema(format!("not a rational: {t:?}")))).collect()
}

pub fn constraint(sys: &InequalitySystem, c: &LinearConstraint) -> Value {
    let coef: Map<String, Value> =
        sys.vars.iter().zip(&c.coef).filter(|(_, a)| !a.is_zero()).map(|(v, a)| (v.clone(), rat(a))).collect();
    json!({ "coef": coef, "rel": c.rel.symbol(), "rhs": rat(&c.rhs), "tag": c.tag })
}

pub fn system(sys: &InequalitySystem) -> Value {
    json!({
        "vars": sys.vars,
        "constraints": sys.constraints.iter().map(|c| constraint(sys, c)).collect::<Vec<_>>(),
    })
}

pub fn parse_system(v: &Value) -> Result<InequalitySystem, JsonError> {
    let vars: Vec<String> = array(field(v, "vars")?, "vars")?
        .iter()
        .map(|x| string(x, "variable name").map(String::from))
        .collect::<Result<_, _>>()?;
    let mut sys = InequalitySystem::new(vars);
    for c in array(field(v, "constraints")?, "constraints")? {
        let mut coef = vec![Rational::zero(); sys.dim()];
        let map = field(c, "coef")?.as_object().ok_or_else(|| JsonError::Schema("coef must be an object".into()))?;
        for (name, val) in map {
            let i = sys.var_index(name).ok_or_else(|| JsonError::Schema(format!("unknown variable {name:?}")))?;
            coef[i] = parse_rat(val)?;
        }
        let rel_s = string(field(c, "rel")?, "rel")?;
        let rel =
            Relation::from_symbol(rel_s).ok_or_else(|| JsonError::Schema(format!("unknown relation {rel_s:?}")))?;
        let rhs = parse_rat(field(c, "rhs")?)?;
        let tag = string(field(c, "tag")?, "tag")?;
        if tag.is_empty() {
            return schema("constraint tags must be nonempty");
        }
        sys.push(LinearConstraint::new(coef, rel, rhs, tag)).map_err(|e| JsonError::Schema(e.to_string()))?;
    }
    Ok(sys)
}

pub fn vrep(v: &VRep) -> Value {
    json!({ "vars": v.vars, "points": points(v.points()) })
}

pub fn parse_vrep(v: &Value) -> Result<VRep, JsonError> {
    let vars: Vec<String> = array(field(v, "vars")?, "vars")?
        .iter()
        .map(|x| string(x, "variable name").map(String::from))
        .collect::<Result<_, _>>()?;
    let pts = array(field(v, "points")?, "points")?
        .iter()
        .map(|p| array(p, "point")?.iter().map(parse_rat).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    VRep::new(vars, pts).map_err(|e| JsonError::Schema(e.to_string()))
}

pub fn completeness(r: &CompletenessReport, sys: &InequalitySystem, classes: Option<&[ConstraintClass]>) -> Value {
    let mut out = json!({
        "complete": r.is_complete(),
        "valid": r.valid(),
        "violations": r.violations.iter().map(|v| json!({
            "point": rats(&v.point),
            "constraint": v.constraint,
            "tag": v.tag,
        })).collect::<Vec<_>>(),
        "vertex_match": r.vertex_match(),
        "extra_vertices": points(&r.extra_vertices),
        "missing_vertices": points(&r.missing_vertices),
    });
    if let Some(classes) = classes {
        out["classes"] =
            sys.constraints.iter().zip(classes).map(|(c, k)| json!({ "tag": c.tag, "class": k.as_str() })).collect();
    }
    out
}

fn witness(w: &Witness) -> Value {
    match w {
        Witness::Cut(s) => json!({ "cut": set(s) }),
        Witness::Row(i) => json!({ "row": i }),
    }
}

fn counterexample(c: &Counterexample) -> Value {
    let (kind, extra) = match &c.failure {
        SectionFailure::Infeasible(w) => ("infeasible", json!({ "witness": witness(w) })),
        SectionFailure::NotInExtension(y) => ("not-in-extension", json!({ "lifted": rats(y) })),
        SectionFailure::ProjectionMismatch(y) => ("projection-mismatch", json!({ "lifted": rats(y) })),
    };
    let mut out = json!({ "point": rats(&c.point), "failure": kind });
    for (k, v) in extra.as_object().expect("object") {
        out[k] = v.clone();
    }
    out
}

pub fn section(r: &SectionReport) -> Value {
    json!({
        "passed": r.passed(),
        "vertices": r.vertices,
        "samples": r.samples,
        "checked": r.checked,
        "counterexample": r.counterexample.as_ref().map(counterexample),
    })
}

pub fn single_lift(x: &[Rational], failure: Option<&SectionFailure>, lifted: Option<&[Rational]>) -> Value {
    let mut out = json!({ "point": rats(x), "passed": failure.is_none() });
    if let Some(y) = lifted {
        out["lifted"] = rats(y);
    }
    if let Some(f) = failure {
        out["counterexample"] = counterexample(&Counterexample { point: x.to_vec(), failure: f.clone() });
    }
    out
}

pub fn block(b: &BlockIneq, sys_vars: &[String]) -> Value {
    let c = b.to_constraint();
    let sys = InequalitySystem { vars: sys_vars.to_vec(), constraints: Vec::new() };
    json!({
        "tau": b.tau.as_slice(),
        "alpha": b.alpha,
        "a": (1..=b.a.p()).map(|i| vec![rat(b.a.get(i, 1)), rat(b.a.get(i, 2))]).collect::<Vec<_>>(),
        "beta": rat(&b.beta),
        "constraint": constraint(&sys, &c),
    })
}

/// A circulation instance: `{"nodes", "arcs": [[u, v], ...], "lower", "upper"}`.
pub struct HoffmanInstance {
    pub digraph: Digraph,
    pub bounds: CapacityBounds,
}

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error(transparent)]
    Json(#[from] JsonError),
    #[error(transparent)]
    Graph(#[from] polylift_core::graphcore::GraphError),
    #[error(transparent)]
    Circulation(#[from] CirculationError),
}

pub fn parse_hoffman(v: &Value) -> Result<HoffmanInstance, InstanceError> {
    let nodes = field(v, "nodes")?.as_u64().ok_or_else(|| JsonError::Schema("nodes must be a count".into()))? as usize;
    let arcs = array(field(v, "arcs")?, "arcs")?
        .iter()
        .map(|a| match a.as_array().map(|p| p.iter().map(Value::as_u64).collect::<Vec<_>>()).as_deref() {
            Some([Some(u), Some(w)]) => Ok((*u as usize, *w as usize)),
            _ => schema("each arc must be a pair of node ids"),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let ext = |key: &str| -> Result<Vec<ExtendedRational>, JsonError> {
        array(field(v, key)?, key)?.iter().map(parse_ext).collect()
    };
    let digraph = Digraph::new(nodes, arcs)?;
    let bounds = CapacityBounds::new(ext("lower")?, ext("upper")?)?;
    if bounds.len() != digraph.arc_count() {
        return Err(CirculationError::ArcCountMismatch { arcs: digraph.arc_count(), bounds: bounds.len() }.into());
    }
    Ok(HoffmanInstance { digraph, bounds })
}

pub fn hoffman_instance(d: &Digraph, b: &CapacityBounds) -> Value {
    let ext = |xs: &[ExtendedRational]| xs.iter().map(|x| Value::String(x.to_string())).collect::<Vec<_>>();
    json!({
        "nodes": d.node_count(),
        "arcs": d.arcs().iter().map(|&(u, v)| json!([u, v])).collect::<Vec<_>>(),
        "lower": ext(b.lower()),
        "upper": ext(b.upper()),
    })
}

pub fn hoffman_result(result: &Result<Circulation, NodeSet>, subsets_agree: Option<bool>) -> Value {
    let mut out = match result {
        Ok(c) => json!({ "feasible": true, "circulation": rats(&c.flow), "witness": null }),
        Err(w) => json!({ "feasible": false, "circulation": null, "witness": set(w) }),
    };
    if let Some(a) = subsets_agree {
        out["subset_check_agrees"] = Value::Bool(a);
    }
    out
}
