//! JSON encodings of lattices, embeddings, forms, glue maps, isometries and
//! reports. Integers are written as JSON numbers of arbitrary size;
//! rationals as `"a/b"` strings in lowest terms.

use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Number, Value};

use crate::discform::{Element, FiniteQuadraticForm};
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::glue::GlueMap;
use crate::isom::{GroupReport, Isometry, StabImageReport};
use crate::lattice::{builtin, IntegralLattice};
use crate::matrix::IntMatrix;
use crate::modp::{IndexPSublattice, LineClassCount};
use crate::padic::JordanDecomposition;
use crate::planner::{CoveringCertificate, EdgeBound, StabilityReport, TriangleDatum};

fn bad(path: &str, what: impl std::fmt::Display) -> Error {
    Error::invalid(format!("{path}: {what}"))
}

pub fn int_to_json(x: &BigInt) -> Value {
    Value::Number(Number::from_str(&x.to_string()).expect("integers are valid JSON numbers"))
}

pub fn int_from_json(v: &Value, path: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) => BigInt::from_str(&n.to_string()).map_err(|_| bad(path, "expected an integer")),
        _ => Err(bad(path, "expected an integer")),
    }
}

fn u64_from_json(v: &Value, path: &str) -> Result<u64> {
    int_from_json(v, path)?
        .to_u64()
        .ok_or_else(|| bad(path, "expected a nonnegative 64-bit integer"))
}

pub fn rational_to_json(x: &BigRational) -> Value {
    Value::String(if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    })
}

pub fn rational_from_json(v: &Value, path: &str) -> Result<BigRational> {
    match v {
        Value::String(s) => BigRational::from_str(s.trim()).map_err(|_| bad(path, "expected a rational \"a/b\"")),
        Value::Number(_) => Ok(BigRational::from_integer(int_from_json(v, path)?)),
        _ => Err(bad(path, "expected a rational \"a/b\"")),
    }
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(path, "expected an array"))
}

fn field<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(path, format!("missing field \"{key}\"")))
}

pub fn matrix_to_json(m: &IntMatrix) -> Value {
    Value::Array(
        m.rows_iter()
            .map(|r| Value::Array(r.iter().map(int_to_json).collect()))
            .collect(),
    )
}

pub fn matrix_from_json(v: &Value, path: &str) -> Result<IntMatrix> {
    let rows = array(v, path)?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let rp = format!("{path}[{i}]");
        let r = array(r, &rp)?
            .iter()
            .enumerate()
            .map(|(j, x)| int_from_json(x, &format!("{rp}[{j}]")))
            .collect::<Result<Vec<_>>>()?;
        out.push(r);
    }
    if out.is_empty() {
        return Err(bad(path, "matrix has no rows"));
    }
    let w = out[0].len();
    if out.iter().any(|r| r.len() != w) {
        return Err(bad(path, "rows have different lengths"));
    }
    Ok(IntMatrix::from_rows(&out))
}

fn u64_rows_to_json(rows: &[Vec<u64>]) -> Value {
    json!(rows)
}

fn u64_rows_from_json(v: &Value, path: &str) -> Result<Vec<Vec<u64>>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let rp = format!("{path}[{i}]");
            array(r, &rp)?
                .iter()
                .enumerate()
                .map(|(j, x)| u64_from_json(x, &format!("{rp}[{j}]")))
                .collect()
        })
        .collect()
}

pub fn lattice_to_json(l: &IntegralLattice) -> Value {
    let mut m = Map::new();
    if let Some(label) = l.label() {
        m.insert("label".into(), json!(label));
    }
    m.insert("gram".into(), matrix_to_json(l.gram()));
    Value::Object(m)
}

/// A lattice object, or a string naming a built-in.
pub fn lattice_from_json(v: &Value, path: &str) -> Result<IntegralLattice> {
    if let Value::String(label) = v {
        return builtin::resolve(label);
    }
    let gram = matrix_from_json(field(v, "gram", path)?, &format!("{path}.gram"))?;
    let l = IntegralLattice::new(gram).map_err(|e| bad(path, e))?;
    Ok(match v.get("label") {
        Some(Value::String(s)) => l.with_label(s.clone()),
        Some(Value::Null) | None => l,
        Some(_) => return Err(bad(&format!("{path}.label"), "expected a string")),
    })
}

pub fn embedding_to_json(e: &Embedding) -> Value {
    json!({
        "ambient": lattice_to_json(e.ambient()),
        "basis": matrix_to_json(e.basis()),
        "primitive": e.is_primitive(),
    })
}

pub fn embedding_from_json(v: &Value, path: &str) -> Result<Embedding> {
    let ambient = lattice_from_json(field(v, "ambient", path)?, &format!("{path}.ambient"))?;
    let basis = matrix_from_json(field(v, "basis", path)?, &format!("{path}.basis"))?;
    Embedding::new(ambient, basis).map_err(|e| bad(path, e))
}

pub fn fqf_to_json(f: &FiniteQuadraticForm) -> Value {
    json!({
        "orders": f.orders(),
        "q": f.q_values().iter().map(rational_to_json).collect::<Vec<_>>(),
        "b": f.b_values().iter().map(|r| r.iter().map(rational_to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn fqf_from_json(v: &Value, path: &str) -> Result<FiniteQuadraticForm> {
    let orders = array(field(v, "orders", path)?, &format!("{path}.orders"))?
        .iter()
        .enumerate()
        .map(|(i, x)| u64_from_json(x, &format!("{path}.orders[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let q = array(field(v, "q", path)?, &format!("{path}.q"))?
        .iter()
        .enumerate()
        .map(|(i, x)| rational_from_json(x, &format!("{path}.q[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let bp = format!("{path}.b");
    let b = array(field(v, "b", path)?, &bp)?
        .iter()
        .enumerate()
        .map(|(i, r)| {
            array(r, &format!("{bp}[{i}]"))?
                .iter()
                .enumerate()
                .map(|(j, x)| rational_from_json(x, &format!("{bp}[{i}][{j}]")))
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    FiniteQuadraticForm::new(orders, q, b).map_err(|e| bad(path, e))
}

pub fn glue_to_json(g: &GlueMap) -> Value {
    json!({
        "left": fqf_to_json(g.left()),
        "right": fqf_to_json(g.right()),
        "graph": u64_rows_to_json(g.graph()),
    })
}

pub fn glue_from_json(v: &Value, path: &str) -> Result<GlueMap> {
    let left = fqf_from_json(field(v, "left", path)?, &format!("{path}.left"))?;
    let right = fqf_from_json(field(v, "right", path)?, &format!("{path}.right"))?;
    let graph: Vec<Element> = u64_rows_from_json(field(v, "graph", path)?, &format!("{path}.graph"))?;
    GlueMap::new(left, right, graph).map_err(|e| bad(path, e))
}

pub fn isometry_to_json(g: &Isometry) -> Value {
    json!({
        "matrix": matrix_to_json(g.matrix()),
        "det": g.det(),
        "stable": g.is_stable(),
    })
}

pub fn isometry_from_json(v: &Value, l: &IntegralLattice, path: &str) -> Result<Isometry> {
    let m = matrix_from_json(field(v, "matrix", path)?, &format!("{path}.matrix"))?;
    Isometry::new(l, m).map_err(|e| bad(path, e))
}

pub fn group_report_to_json(r: &GroupReport) -> Value {
    json!({
        "order": r.order,
        "generators": r.generators.iter().map(isometry_to_json).collect::<Vec<_>>(),
        "stable_order": r.stable_order,
        "stable_index": r.stable_index,
    })
}

pub fn line_counts_to_json(c: &LineClassCount) -> Value {
    json!({
        "p": c.p,
        "n0": int_to_json(&c.n0),
        "n_plus": int_to_json(&c.n_plus),
        "n_minus": int_to_json(&c.n_minus),
        "total": int_to_json(&c.total()),
    })
}

pub fn sublattice_to_json(s: &IndexPSublattice) -> Value {
    json!({
        "p": s.p,
        "basis": matrix_to_json(&s.basis),
        "functional": s.functional,
        "dual_line": s.dual_line,
        "det": int_to_json(&s.lattice().det()),
    })
}

pub fn jordan_to_json(j: &JordanDecomposition) -> Value {
    json!({
        "p": j.p,
        "blocks": j.blocks.iter().map(|b| json!({
            "scale": b.scale,
            "rank": b.rank,
            "unit_class": b.unit_class,
        })).collect::<Vec<_>>(),
        "det_valuation": j.det_valuation(),
        "p_length": j.p_length(),
    })
}

pub fn stability_to_json(s: &StabilityReport) -> Value {
    json!({
        "signature": [s.signature.n_plus, s.signature.n_minus],
        "length": s.length,
        "rank": s.rank,
        "is_stable": s.is_stable,
        "is_very_stable": s.is_very_stable,
    })
}

pub fn certificate_to_json(c: &CoveringCertificate) -> Value {
    json!({
        "lattice": lattice_to_json(&c.lattice),
        "N": c.n,
        "p": c.p,
        "line_counts": line_counts_to_json(&c.line_counts),
        "bound": int_to_json(&c.bound),
        "target": c.target.label(),
        "base_constant": c.base_constant,
        "constant": c.constant,
        "stability": stability_to_json(&c.stability),
        "components": format!("{:?}", c.components.components),
        "s_to_m_degree": c.components.s_to_m_degree,
        "sublattice_count": c.sublattices.len(),
        "all_very_stable": c.all_very_stable(),
        "sublattices": c.sublattices.iter().map(|s| json!({
            "id": s.id,
            "functional": s.sublattice.functional,
            "dual_line": s.sublattice.dual_line,
            "basis": matrix_to_json(&s.sublattice.basis),
            "length": s.length,
            "p_part": s.p_part.label(c.p),
            "split_certified": s.split_certified,
            "very_stable": s.very_stable,
        })).collect::<Vec<_>>(),
        "assumptions": c.assumptions,
    })
}

fn edge_to_json(e: &EdgeBound) -> Value {
    match e {
        EdgeBound::Computed {
            image_order,
            degree_bound,
        } => json!({"image_order": image_order, "degree_bound": degree_bound}),
        EdgeBound::Refused(r) => json!({"refused": r}),
    }
}

pub fn triangle_to_json(t: &TriangleDatum) -> Value {
    json!({
        "p": t.p,
        "f": matrix_to_json(&t.t_in_s),
        "f_prime": matrix_to_json(&t.t_in_s_prime),
        "pi_prime": matrix_to_json(&t.s_prime_in_s),
        "s_prime": lattice_to_json(&t.s_prime),
        "f_bound": edge_to_json(&t.f_bound),
        "f_prime_bound": edge_to_json(&t.f_prime_bound),
        "pi_prime_bound": t.pi_bound.as_ref().map(int_to_json),
    })
}

pub fn stab_report_to_json(r: &StabImageReport) -> Value {
    json!({
        "image_order": r.image_order,
        "ok_order": r.ok_order,
        "degree_bound": r.degree_bound,
        "image": r.image.iter().map(isometry_to_json).collect::<Vec<_>>(),
        "notes": r.notes,
    })
}

/// Parse JSON text, reporting the line and column of syntax errors.
pub fn parse_json(text: &str, what: &str) -> Result<Value> {
    serde_json::from_str(text)
        .map_err(|e| Error::invalid(format!("{what}: malformed JSON at line {} column {}: {e}", e.line(), e.column())))
}

/// A lattice from a file path (JSON) or a built-in label.
pub fn load_lattice(source: &str) -> Result<IntegralLattice> {
    let path = Path::new(source);
    if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("{source}: {e}")))?;
        let v = parse_json(&text, source)?;
        lattice_from_json(&v, source)
    } else {
        builtin::resolve(source)
    }
}

/// Read a JSON document from a file.
pub fn load_json(source: &str) -> Result<Value> {
    let text = std::fs::read_to_string(source).map_err(|e| Error::invalid(format!("{source}: {e}")))?;
    parse_json(&text, source)
}
