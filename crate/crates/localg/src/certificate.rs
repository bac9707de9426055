//! Replayable certificates for negative (and tabulated positive) verdicts.
//!
//! A certificate embeds the locality space it talks about together with its
//! fingerprint, so `replay` needs no other input.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactla::{add, scale, Subspace, Vector};
use crate::json::{self, field, str_field};
use crate::locality::LocalitySpace;
use crate::quotients::{self, CompatWitness, StrongComplement};
use crate::scalar::Scalar;

/// Version tag of the deterministic witness search order.
pub const SEARCH_ORDER: &str = "lex-v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessEntry<S: Scalar> {
    pub x: Vector<S>,
    pub y: Vector<S>,
    pub z: Vector<S>,
    pub w: Vector<S>,
    pub w_prime: Vector<S>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertKind<S: Scalar> {
    /// Representatives of classes `[u]`, `[a]`, `[b]` with `[a], [b] ∈ P̄([u])` and
    /// `λ[a] + μ[b] ∉ P̄([u])`. With `a = b = None` the polar of `[u]` is empty.
    NotLocalityQuotient {
        w: Subspace<S>,
        u: Vector<S>,
        a: Option<Vector<S>>,
        b: Option<Vector<S>>,
        lambda: S,
        mu: S,
    },
    NotCompatible {
        w: Subspace<S>,
        x: Vector<S>,
        y: Vector<S>,
        z: Vector<S>,
        wv: Vector<S>,
    },
    /// Exhaustive search over all complements found none; finite fields only.
    NoStrongComplement {
        w: Subspace<S>,
    },
    /// Positive evidence: for each entry the correction `w'` works.
    CompatibleWitnessTable {
        w: Subspace<S>,
        entries: Vec<WitnessEntry<S>>,
    },
}

impl<S: Scalar> CertKind<S> {
    pub fn name(&self) -> &'static str {
        match self {
            CertKind::NotLocalityQuotient { .. } => "NotLocalityQuotient",
            CertKind::NotCompatible { .. } => "NotCompatible",
            CertKind::NoStrongComplement { .. } => "NoStrongComplement",
            CertKind::CompatibleWitnessTable { .. } => "CompatibleWitnessTable",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate<S: Scalar> {
    pub space: LocalitySpace<S>,
    pub fingerprint: String,
    pub search_order: String,
    pub kind: CertKind<S>,
}

impl<S: Scalar> Certificate<S> {
    pub fn new(space: &LocalitySpace<S>, kind: CertKind<S>) -> Self {
        Certificate {
            space: space.clone(),
            fingerprint: json::fingerprint(space),
            search_order: SEARCH_ORDER.into(),
            kind,
        }
    }

    /// Re-derives the verdict. Returns `false` when the certificate does not hold.
    pub fn replay(&self) -> Result<bool> {
        if json::fingerprint(&self.space) != self.fingerprint {
            return Ok(false);
        }
        let s = &self.space;
        match &self.kind {
            CertKind::NotLocalityQuotient { w, u, a, b, lambda, mu } => replay_quotient(s, w, u, a, b, lambda, mu),
            CertKind::NotCompatible { w, x, y, z, wv } => {
                CompatWitness { x: x.clone(), y: y.clone(), z: z.clone(), w: wv.clone() }.replay(s, w)
            }
            CertKind::NoStrongComplement { w } => {
                if !S::is_finite() {
                    return Err(Error::Unsupported("exhaustive complement search needs a finite field".into()));
                }
                Ok(quotients::strong_complement(s, w)? == StrongComplement::None)
            }
            CertKind::CompatibleWitnessTable { w, entries } => Ok(entries.iter().all(|e| {
                let xw = add(&e.x, &e.w);
                let xw2 = add(&e.x, &e.w_prime);
                w.contains(&e.w)
                    && w.contains(&e.w_prime)
                    && s.rel(&e.x, &e.y)
                    && s.rel(&xw, &e.z)
                    && s.rel(&xw2, &e.y)
                    && s.rel(&xw2, &e.z)
            })),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "kind": self.kind.name(),
            "field": S::field_name(),
            "space": json::space_to_json(&self.space),
            "fingerprint": self.fingerprint,
            "search_order": self.search_order,
        });
        let m = v.as_object_mut().expect("object");
        let vj = |x: &Vector<S>| json::vec_to_json(x);
        match &self.kind {
            CertKind::NotLocalityQuotient { w, u, a, b, lambda, mu } => {
                m.insert("w".into(), json::subspace_to_json(w));
                m.insert("u".into(), vj(u));
                m.insert("a".into(), a.as_ref().map_or(Value::Null, vj));
                m.insert("b".into(), b.as_ref().map_or(Value::Null, vj));
                m.insert("lambda".into(), lambda.to_json());
                m.insert("mu".into(), mu.to_json());
            }
            CertKind::NotCompatible { w, x, y, z, wv } => {
                m.insert("w".into(), json::subspace_to_json(w));
                m.insert("x".into(), vj(x));
                m.insert("y".into(), vj(y));
                m.insert("z".into(), vj(z));
                m.insert("wv".into(), vj(wv));
            }
            CertKind::NoStrongComplement { w } => {
                m.insert("w".into(), json::subspace_to_json(w));
            }
            CertKind::CompatibleWitnessTable { w, entries } => {
                m.insert("w".into(), json::subspace_to_json(w));
                let es: Vec<Value> = entries
                    .iter()
                    .map(|e| json!({"x": vj(&e.x), "y": vj(&e.y), "z": vj(&e.z), "w": vj(&e.w), "w_prime": vj(&e.w_prime)}))
                    .collect();
                m.insert("entries".into(), Value::Array(es));
            }
        }
        json::document(v)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        json::check_schema(v)?;
        let space: LocalitySpace<S> = json::space_from_json(field(v, "", "space")?, "/space")?;
        let n = space.dim();
        let vec = |k: &str| json::vec_from_json_dim::<S>(field(v, "", k)?, &format!("/{k}"), n);
        let opt_vec = |k: &str| -> Result<Option<Vector<S>>> {
            match v.get(k) {
                None | Some(Value::Null) => Ok(None),
                Some(x) => json::vec_from_json_dim::<S>(x, &format!("/{k}"), n).map(Some),
            }
        };
        let scalar = |k: &str| json::at(&format!("/{k}"), S::from_json(field(v, "", k)?));
        let w = json::subspace_from_json(field(v, "", "w")?, "/w", n)?;
        let kind = match str_field(v, "", "kind")? {
            "NotLocalityQuotient" => CertKind::NotLocalityQuotient {
                w,
                u: vec("u")?,
                a: opt_vec("a")?,
                b: opt_vec("b")?,
                lambda: scalar("lambda")?,
                mu: scalar("mu")?,
            },
            "NotCompatible" => CertKind::NotCompatible { w, x: vec("x")?, y: vec("y")?, z: vec("z")?, wv: vec("wv")? },
            "NoStrongComplement" => CertKind::NoStrongComplement { w },
            "CompatibleWitnessTable" => {
                let mut entries = Vec::new();
                for (i, e) in json::array(field(v, "", "entries")?, "/entries")?.iter().enumerate() {
                    let p = format!("/entries/{i}");
                    let g = |k: &str| json::vec_from_json_dim::<S>(field(e, &p, k)?, &format!("{p}/{k}"), n);
                    entries.push(WitnessEntry {
                        x: g("x")?,
                        y: g("y")?,
                        z: g("z")?,
                        w: g("w")?,
                        w_prime: g("w_prime")?,
                    });
                }
                CertKind::CompatibleWitnessTable { w, entries }
            }
            other => return json::parse_err("/kind", format!("unknown certificate kind {other:?}")),
        };
        Ok(Certificate {
            space,
            fingerprint: str_field(v, "", "fingerprint")?.to_string(),
            search_order: str_field(v, "", "search_order")?.to_string(),
            kind,
        })
    }
}

/// `[p] ⊤̄ [q]` by trying all representatives.
fn class_related<S: Scalar>(s: &LocalitySpace<S>, w: &Subspace<S>, p: &[S], q: &[S]) -> Result<bool> {
    if S::is_finite() {
        let ws = w.elements();
        for a in &ws {
            let pa = add(p, a);
            for b in &ws {
                if s.rel(&pa, &add(q, b)) {
                    return Ok(true);
                }
            }
        }
        return Ok(false);
    }
    unreachable!("callers handle symbolic fields")
}

fn replay_quotient<S: Scalar>(
    s: &LocalitySpace<S>,
    w: &Subspace<S>,
    u: &[S],
    a: &Option<Vector<S>>,
    b: &Option<Vector<S>>,
    lambda: &S,
    mu: &S,
) -> Result<bool> {
    if !S::is_finite() {
        let qs = quotients::quotient_locality(s, w)?;
        let pw = crate::locality::PolarWitness {
            u: qs.class_of(u),
            a: a.as_ref().map(|x| qs.class_of(x)),
            b: b.as_ref().map(|x| qs.class_of(x)),
            lambda: lambda.clone(),
            mu: mu.clone(),
        };
        return Ok(pw.replay(&qs.space));
    }
    match (a, b) {
        (Some(a), Some(b)) => {
            let c = add(&scale(lambda, a), &scale(mu, b));
            Ok(class_related(s, w, a, u)? && class_related(s, w, b, u)? && !class_related(s, w, &c, u)?)
        }
        _ => {
            // Empty polar: no class at all is related to [u].
            let m = s.dim() - w.dim();
            for i in 0..crate::fin::space_size::<S>(m)? {
                if class_related(s, w, &w.lift(&crate::fin::decode::<S>(i, m)), u)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::vec_from_i64 as v;
    use crate::quotients::{is_compatible, Budget};
    use crate::{F5, Q};

    #[test]
    fn euclidean_certificate_replays_and_round_trips() {
        let s = LocalitySpace::<Q>::euclidean(2);
        let w = Subspace::coordinate(2, &[0]);
        let wit = is_compatible(&s, &w, Budget::default()).unwrap().witness().unwrap().clone();
        let cert = wit.into_certificate(&s, &w);
        assert!(cert.replay().unwrap());
        let back = Certificate::<Q>::from_json(&cert.to_json()).unwrap();
        assert_eq!(back, cert);
        assert_eq!(back.to_json(), cert.to_json());
    }

    #[test]
    fn tampered_certificates_fail() {
        let s = LocalitySpace::<Q>::euclidean(2);
        let w = Subspace::coordinate(2, &[0]);
        let mut cert = Certificate::new(
            &s,
            CertKind::NotCompatible { w: w.clone(), x: v(&[0, 1]), y: v(&[1, 0]), z: v(&[0, 1]), wv: v(&[1, 0]) },
        );
        // z = e2 is not orthogonal to x + w = e1 + e2.
        assert!(!cert.replay().unwrap());
        cert.kind = CertKind::NotCompatible { w, x: v(&[0, 1]), y: v(&[1, 0]), z: v(&[1, -1]), wv: v(&[1, 0]) };
        assert!(cert.replay().unwrap());
        cert.fingerprint = "0".into();
        assert!(!cert.replay().unwrap());
    }

    #[test]
    fn no_strong_complement_replays() {
        let s = LocalitySpace::<F5>::euclidean(2);
        let cert = Certificate::new(&s, CertKind::NoStrongComplement { w: Subspace::coordinate(2, &[0]) });
        assert!(cert.replay().unwrap());
        let t = LocalitySpace::<F5>::trivial(2);
        let bad = Certificate::new(&t, CertKind::NoStrongComplement { w: Subspace::coordinate(2, &[0]) });
        assert!(!bad.replay().unwrap());
    }
}
