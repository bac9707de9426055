//! JSON interchange: scalars, vectors, subspaces, locality spaces.
//!
//! Every top-level document carries `"localg_schema": 1`. Parse errors name the
//! JSON pointer of the offending value.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exactla::{Subspace, Vector};
use crate::fin;
use crate::locality::{LocalitySpace, Relation};
use crate::scalar::Scalar;

pub const SCHEMA_VERSION: u64 = 1;

/// Prefixes a parse error with the JSON pointer where it happened.
pub fn at<T>(path: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse(m) if m.starts_with("at /") => Error::Parse(m),
        Error::Parse(m) => Error::Parse(format!("at {path}: {m}")),
        other => other,
    })
}

pub fn parse_err<T>(path: &str, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(format!("at {path}: {}", msg.into())))
}

pub fn field<'a>(v: &'a Value, path: &str, key: &str) -> Result<&'a Value> {
    match v.get(key) {
        Some(x) => Ok(x),
        None => parse_err(path, format!("missing field {key:?}")),
    }
}

pub fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    match v.as_array() {
        Some(a) => Ok(a),
        None => parse_err(path, "expected an array"),
    }
}

pub fn usize_field(v: &Value, path: &str, key: &str) -> Result<usize> {
    match field(v, path, key)?.as_u64() {
        Some(n) => Ok(n as usize),
        None => parse_err(&format!("{path}/{key}"), "expected a non-negative integer"),
    }
}

pub fn str_field<'a>(v: &'a Value, path: &str, key: &str) -> Result<&'a str> {
    match field(v, path, key)?.as_str() {
        Some(s) => Ok(s),
        None => parse_err(&format!("{path}/{key}"), "expected a string"),
    }
}

/// Adds the schema version to an object.
pub fn document(mut v: Value) -> Value {
    if let Value::Object(m) = &mut v {
        m.insert("localg_schema".into(), json!(SCHEMA_VERSION));
    }
    v
}

/// Rejects documents with a different schema version; a missing version is accepted.
pub fn check_schema(v: &Value) -> Result<()> {
    match v.get("localg_schema") {
        None => Ok(()),
        Some(s) if s.as_u64() == Some(SCHEMA_VERSION) => Ok(()),
        Some(s) => parse_err("/localg_schema", format!("unsupported schema version {s}")),
    }
}

/// Field name of a document: "Q" or "F<p>". Defaults to "Q".
pub fn field_name(v: &Value) -> Result<String> {
    match v.get("field") {
        None => Ok("Q".into()),
        Some(Value::String(s)) => Ok(s.clone()),
        Some(Value::Number(n)) => Ok(format!("F{n}")),
        Some(_) => parse_err("/field", "expected a field name"),
    }
}

pub fn vec_to_json<S: Scalar>(v: &[S]) -> Value {
    Value::Array(v.iter().map(S::to_json).collect())
}

pub fn vec_from_json<S: Scalar>(v: &Value, path: &str) -> Result<Vector<S>> {
    array(v, path)?.iter().enumerate().map(|(i, x)| at(&format!("{path}/{i}"), S::from_json(x))).collect()
}

pub fn vec_from_json_dim<S: Scalar>(v: &Value, path: &str, dim: usize) -> Result<Vector<S>> {
    let out = vec_from_json(v, path)?;
    if out.len() != dim {
        return parse_err(path, format!("expected {dim} coordinates, found {}", out.len()));
    }
    Ok(out)
}

pub fn vecs_to_json<S: Scalar>(vs: &[Vector<S>]) -> Value {
    Value::Array(vs.iter().map(|v| vec_to_json(v)).collect())
}

pub fn vecs_from_json<S: Scalar>(v: &Value, path: &str, dim: usize) -> Result<Vec<Vector<S>>> {
    array(v, path)?.iter().enumerate().map(|(i, x)| vec_from_json_dim(x, &format!("{path}/{i}"), dim)).collect()
}

/// A subspace is written as a list of spanning vectors (its echelon basis on output).
pub fn subspace_to_json<S: Scalar>(s: &Subspace<S>) -> Value {
    vecs_to_json(s.basis())
}

pub fn subspace_from_json<S: Scalar>(v: &Value, path: &str, dim: usize) -> Result<Subspace<S>> {
    Ok(Subspace::of(dim, &vecs_from_json(v, path, dim)?))
}

pub fn relation_to_json<S: Scalar>(s: &LocalitySpace<S>) -> Value {
    match s.relation() {
        Relation::Blocks(bs) => json!({
            "type": "blocks",
            "blocks": bs.iter().map(|b| json!({
                "left": subspace_to_json(&b.left),
                "right": subspace_to_json(&b.right),
            })).collect::<Vec<_>>(),
        }),
        Relation::Pairs(ps) => json!({
            "type": "pairs",
            "pairs": ps.pairs().into_iter().map(|(u, v)| json!([
                vec_to_json::<S>(&fin::decode(u as u64, s.dim())),
                vec_to_json::<S>(&fin::decode(v as u64, s.dim())),
            ])).collect::<Vec<_>>(),
        }),
        Relation::Ortho(o) => {
            let mut m = Map::new();
            m.insert("type".into(), json!("ortho"));
            m.insert("gram".into(), vecs_to_json(&o.gram));
            if !o.escape.is_empty() {
                m.insert("escape".into(), vecs_to_json(&o.escape));
            }
            Value::Object(m)
        }
    }
}

/// Relation document; `dim` is inferred from the Gram matrix for ortho relations.
pub fn relation_from_json<S: Scalar>(v: &Value, path: &str, dim: Option<usize>) -> Result<LocalitySpace<S>> {
    let ty = str_field(v, path, "type")?;
    match ty {
        "blocks" => {
            let dim = match dim {
                Some(d) => d,
                None => return parse_err(path, "blocks relation needs \"dim\""),
            };
            let bp = format!("{path}/blocks");
            let mut blocks = Vec::new();
            for (i, b) in array(field(v, path, "blocks")?, &bp)?.iter().enumerate() {
                let p = format!("{bp}/{i}");
                let left = subspace_from_json(field(b, &p, "left")?, &format!("{p}/left"), dim)?;
                let right = subspace_from_json(field(b, &p, "right")?, &format!("{p}/right"), dim)?;
                blocks.push((left, right));
            }
            at(path, LocalitySpace::from_blocks(dim, blocks))
        }
        "pairs" => {
            let dim = match dim {
                Some(d) => d,
                None => return parse_err(path, "pairs relation needs \"dim\""),
            };
            if !S::is_finite() {
                return parse_err(path, "pairs relations need a finite field");
            }
            let pp = format!("{path}/pairs");
            let mut pairs = Vec::new();
            for (i, pr) in array(field(v, path, "pairs")?, &pp)?.iter().enumerate() {
                let p = format!("{pp}/{i}");
                let a = array(pr, &p)?;
                if a.len() != 2 {
                    return parse_err(&p, "a pair has two vectors");
                }
                pairs.push((
                    vec_from_json_dim(&a[0], &format!("{p}/0"), dim)?,
                    vec_from_json_dim(&a[1], &format!("{p}/1"), dim)?,
                ));
            }
            at(path, LocalitySpace::from_pairs(dim, pairs))
        }
        "ortho" => {
            let gp = format!("{path}/gram");
            let rows = array(field(v, path, "gram")?, &gp)?;
            let n = rows.len();
            if let Some(d) = dim {
                if d != n {
                    return parse_err(&gp, format!("Gram matrix has {n} rows but dim is {d}"));
                }
            }
            let gram = vecs_from_json(field(v, path, "gram")?, &gp, n)?;
            let escape = match v.get("escape") {
                Some(e) => vecs_from_json(e, &format!("{path}/escape"), n)?,
                None => vec![],
            };
            at(&gp, LocalitySpace::ortho_escaped(gram, escape))
        }
        other => parse_err(&format!("{path}/type"), format!("unknown relation type {other:?}")),
    }
}

/// `{"field", "dim", "relation"}`.
pub fn space_to_json<S: Scalar>(s: &LocalitySpace<S>) -> Value {
    json!({
        "field": S::field_name(),
        "dim": s.dim(),
        "relation": relation_to_json(s),
    })
}

pub fn space_from_json<S: Scalar>(v: &Value, path: &str) -> Result<LocalitySpace<S>> {
    let fname = field_name(v)?;
    if fname != S::field_name() {
        return parse_err(&format!("{path}/field"), format!("expected field {}, found {fname}", S::field_name()));
    }
    let dim = match v.get("dim") {
        Some(d) => match d.as_u64() {
            Some(n) => Some(n as usize),
            None => return parse_err(&format!("{path}/dim"), "expected a non-negative integer"),
        },
        None => None,
    };
    let rel = field(v, path, "relation")?;
    relation_from_json(rel, &format!("{path}/relation"), dim)
}

/// FNV-1a 64 of the canonical relation JSON, as hex.
pub fn fingerprint<S: Scalar>(s: &LocalitySpace<S>) -> String {
    let text = space_to_json(s).to_string();
    let mut h: u64 = 0xcbf29ce484222325;
    for b in text.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::vec_from_i64 as v;
    use crate::{F3, Q};

    #[test]
    fn space_round_trips() {
        let s = LocalitySpace::<Q>::from_blocks(
            3,
            vec![(Subspace::coordinate(3, &[0]), Subspace::of(3, &[v(&[0, 1, 1])]))],
        )
        .unwrap();
        let j = space_to_json(&s);
        let back: LocalitySpace<Q> = space_from_json(&j, "").unwrap();
        assert_eq!(back, s);
        assert_eq!(space_to_json(&back), j);

        let p = LocalitySpace::<F3>::from_pairs(1, vec![(v(&[1]), v(&[1]))]).unwrap();
        let back: LocalitySpace<F3> = space_from_json(&space_to_json(&p), "").unwrap();
        assert_eq!(back, p);

        let o = LocalitySpace::<Q>::ortho_escaped(vec![v(&[0])], vec![v(&[1])]).unwrap();
        let back: LocalitySpace<Q> = space_from_json(&space_to_json(&o), "").unwrap();
        assert_eq!(back, o);
    }

    #[test]
    fn errors_name_the_path() {
        let doc = json!({"field": "Q", "dim": 2, "relation": {"type": "blocks", "blocks": [{"left": [[1, "x"]], "right": []}]}});
        let err = space_from_json::<Q>(&doc, "").unwrap_err();
        assert!(err.to_string().contains("/relation/blocks/0/left/0/1"), "{err}");
        let doc = json!({"field": "Q", "relation": {"type": "ortho", "gram": [[1, 2], [3, 1]]}});
        assert!(space_from_json::<Q>(&doc, "").is_err());
    }

    #[test]
    fn fingerprint_separates_relations() {
        let a = LocalitySpace::<Q>::euclidean(2);
        let b = LocalitySpace::<Q>::trivial(2);
        assert_ne!(fingerprint(&a), fingerprint(&b));
        assert_eq!(fingerprint(&a), fingerprint(&a.clone()));
    }
}
