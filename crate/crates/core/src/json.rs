//! Canonical JSON for elements, matrices, representations and classification
//! data. Keys come out sorted, rationals as `"p/q"` strings, monomials as
//! `[level,row,col]` triples.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::pbw::{Element, Family, Gen, Mono};
use crate::poly::UPoly;
use crate::reps::{ClassificationData, Epsilon, Representation};
use crate::scalar::{parse_scalar, Scalar};
use crate::twisted::ThetaSignature;

fn bad(what: impl Into<String>) -> Error {
    Error::Parse(what.into())
}

fn scalar_of<C: Scalar>(v: &Value) -> Result<C> {
    match v {
        Value::String(s) => parse_scalar(s).ok_or_else(|| bad(format!("not a rational: {s:?}"))),
        Value::Number(n) => n.as_i64().map(C::int).ok_or_else(|| bad(format!("not an integer: {n}"))),
        _ => Err(bad("expected a rational string")),
    }
}

fn uint(v: &Value, what: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| bad(format!("{what}: expected a nonnegative integer")))
}

fn field<'a>(o: &'a Map<String, Value>, k: &str) -> Result<&'a Value> {
    o.get(k).ok_or_else(|| bad(format!("missing field {k:?}")))
}

fn object(v: &Value) -> Result<&Map<String, Value>> {
    v.as_object().ok_or_else(|| bad("expected an object"))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(format!("{what}: expected an array")))
}

pub fn element_to_json<C: Scalar>(e: &Element<C>) -> Value {
    let terms: Vec<Value> = e
        .terms()
        .map(|(m, c)| {
            let mono: Vec<Value> = m.iter().map(|g| json!([g.level, g.row, g.col])).collect();
            json!({"c": c.render(), "mono": mono})
        })
        .collect();
    json!({"family": e.family().tag(), "p": e.p(), "terms": terms})
}

pub fn element_from_json<C: Scalar>(v: &Value) -> Result<Element<C>> {
    let o = object(v)?;
    let tag = field(o, "family")?.as_str().ok_or_else(|| bad("family: expected a string"))?;
    let family = Family::from_tag(tag).ok_or_else(|| bad(format!("unknown family {tag:?}")))?;
    let p = uint(field(o, "p")?, "p")? as u32;
    let mut terms = Vec::new();
    for t in array(field(o, "terms")?, "terms")? {
        let t = object(t)?;
        let c = scalar_of::<C>(field(t, "c")?)?;
        let mut mono = Mono::new();
        for g in array(field(t, "mono")?, "mono")? {
            let g = array(g, "generator")?;
            if g.len() != 3 {
                return Err(bad("generator: expected [level,row,col]"));
            }
            let (l, r, k) = (uint(&g[0], "level")?, uint(&g[1], "row")?, uint(&g[2], "col")?);
            if l == 0 || r == 0 || k == 0 || l > 255 || r > 255 || k > 255 {
                return Err(bad("generator indices out of range"));
            }
            mono.push(Gen::new(l as u32, r as usize, k as usize));
        }
        terms.push((mono, c));
    }
    Ok(Element::from_terms(family, p, terms))
}

/// Sparse triplets, zero-based.
pub fn matrix_to_json<C: Scalar>(m: &Matrix<C>) -> Value {
    let vals: Vec<Value> = m.triplets().into_iter().map(|(i, j, v)| json!([i, j, v.render()])).collect();
    json!({"rows": m.rows(), "cols": m.cols(), "vals": vals})
}

pub fn matrix_from_json<C: Scalar>(v: &Value) -> Result<Matrix<C>> {
    let o = object(v)?;
    let rows = uint(field(o, "rows")?, "rows")? as usize;
    let cols = uint(field(o, "cols")?, "cols")? as usize;
    let mut m = Matrix::zeros(rows, cols);
    for t in array(field(o, "vals")?, "vals")? {
        let t = array(t, "triplet")?;
        if t.len() != 3 {
            return Err(bad("triplet: expected [row,col,value]"));
        }
        let (i, j) = (uint(&t[0], "row")? as usize, uint(&t[1], "col")? as usize);
        if i >= rows || j >= cols {
            return Err(bad("triplet index out of range"));
        }
        m.set(i, j, scalar_of(&t[2])?);
    }
    Ok(m)
}

fn dense<C: Scalar>(m: &Matrix<C>) -> Value {
    Value::Array(m.to_rows().iter().map(|r| Value::Array(r.iter().map(|c| Value::String(c.render())).collect())).collect())
}

fn dense_from<C: Scalar>(v: &Value, dim: usize) -> Result<Matrix<C>> {
    let rows = array(v, "mode")?;
    if rows.len() != dim {
        return Err(bad("mode matrix has the wrong number of rows"));
    }
    let mut out = Vec::with_capacity(dim);
    for r in rows {
        let r = array(r, "row")?;
        if r.len() != dim {
            return Err(bad("mode matrix has the wrong number of columns"));
        }
        out.push(r.iter().map(scalar_of).collect::<Result<Vec<C>>>()?);
    }
    Ok(Matrix::from_rows(out))
}

/// `{"family","N","dim","cutoff","signs"?,"modes":{"m,i,j":[[..]]},"provenance"}`.
pub fn rep_to_json<C: Scalar>(r: &Representation<C>) -> Value {
    let mut modes = Map::new();
    for (&(m, i, j), x) in r.modes() {
        modes.insert(format!("{m},{i},{j}"), dense(x));
    }
    let mut o = Map::new();
    o.insert("family".into(), json!(r.family.tag()));
    o.insert("N".into(), json!(r.n));
    o.insert("dim".into(), json!(r.dim));
    o.insert("cutoff".into(), json!(r.cutoff));
    if let Some(sig) = &r.sig {
        o.insert("signs".into(), json!(sig.signs()));
    }
    o.insert("modes".into(), Value::Object(modes));
    o.insert("provenance".into(), json!(r.provenance));
    Value::Object(o)
}

pub fn rep_from_json<C: Scalar>(v: &Value) -> Result<Representation<C>> {
    let o = object(v)?;
    let tag = field(o, "family")?.as_str().ok_or_else(|| bad("family: expected a string"))?;
    let family = match tag {
        "T" => Family::T,
        "S" => Family::S,
        _ => return Err(bad(format!("representation family must be T or S, got {tag:?}"))),
    };
    let n = uint(field(o, "N")?, "N")? as usize;
    let dim = uint(field(o, "dim")?, "dim")? as usize;
    let sig = match o.get("signs") {
        Some(s) => {
            let signs: Vec<i8> = array(s, "signs")?
                .iter()
                .map(|x| x.as_i64().filter(|k| k.abs() == 1).map(|k| k as i8).ok_or_else(|| bad("signs must be ±1")))
                .collect::<Result<_>>()?;
            Some(ThetaSignature::validate(&signs)?)
        }
        None => None,
    };
    let mut modes = BTreeMap::new();
    let mut top = 0;
    for (k, x) in object(field(o, "modes")?)? {
        let parts: Vec<u32> = k.split(',').map(|s| s.trim().parse::<u32>()).collect::<std::result::Result<_, _>>().map_err(|_| bad(format!("bad mode key {k:?}")))?;
        let [m, i, j] = parts[..] else { return Err(bad(format!("bad mode key {k:?}"))) };
        if m == 0 || i == 0 || j == 0 || i as usize > n || j as usize > n {
            return Err(bad(format!("mode key out of range {k:?}")));
        }
        top = top.max(m);
        modes.insert((m, i as usize, j as usize), dense_from(x, dim)?);
    }
    let cutoff = match o.get("cutoff") {
        Some(c) => uint(c, "cutoff")? as u32,
        None => top,
    };
    let provenance = match o.get("provenance") {
        Some(p) => array(p, "provenance")?.iter().map(|s| s.as_str().map(String::from).ok_or_else(|| bad("provenance entries are strings"))).collect::<Result<_>>()?,
        None => vec![],
    };
    Representation::from_modes(family, n, dim, cutoff, sig, modes, provenance)
}

fn poly_json<C: Scalar>(p: &UPoly<C>) -> Value {
    json!(p.coeffs().iter().map(|c| c.render()).collect::<Vec<_>>())
}

/// Classification data; `P` lists coefficient vectors, constant term first.
pub fn classification_to_json<C: Scalar>(cd: &ClassificationData<C>) -> Value {
    let eps = match &cd.epsilon {
        Epsilon::Case(k) => json!(k),
        Epsilon::Value(s) => json!(s),
    };
    let rho: Vec<String> = (0..=cd.rho.cutoff()).map(|k| cd.rho.at(k).render()).collect();
    json!({
        "P": cd.p.iter().map(poly_json).collect::<Vec<_>>(),
        "P_text": cd.p.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "labels": cd.labels,
        "degrees": cd.degrees,
        "epsilon": eps,
        "rho": rho,
        "notes": cd.notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational as Q;

    #[test]
    fn identity_element() {
        let e = Element::<Q>::one(Family::T, 1);
        assert_eq!(serde_json::to_string(&element_to_json(&e)).unwrap(), r#"{"family":"T","p":1,"terms":[{"c":"1","mono":[]}]}"#);
    }

    #[test]
    fn matrix_round_trip() {
        let m = Matrix::from_rows(vec![vec![Q::frac(1, 2), Q::int(0)], vec![Q::int(-3), Q::int(1)]]);
        assert_eq!(matrix_from_json::<Q>(&matrix_to_json(&m)).unwrap(), m);
    }
}
