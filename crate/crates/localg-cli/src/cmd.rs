use std::path::Path;

use serde_json::{json, Value};

use localg::certificate::{CertKind, Certificate};
use localg::conjlab::{self, ConjCertificate, FuzzConfig, LieChoice, PairRule};
use localg::glforest::{self, Forest, GLElement, Omega};
use localg::json as lj;
use localg::lie::{self, Extension, LocLieAlgebra};
use localg::locality::{Closure, LocalitySpace, Polar, PolarWitness};
use localg::quotients::{self, Budget, StrongComplement};
use localg::tensor::{self, LawOutcome};
use localg::{Scalar, Subspace, Vector, Verdict, F2, F3, F5, F7, Q};

use crate::{
    Command, Failure, FixturesCmd, FuzzArgs, GlCmd, LieCmd, Outcome, SpaceCmd, TensorCmd, UeaCmd, EXIT_DATA,
    EXIT_FALSE, EXIT_NOINPUT, EXIT_TRUE, EXIT_UNKNOWN, EXIT_USAGE,
};

pub type CliResult<T> = std::result::Result<T, Failure>;

/// Runs `$body` with `$S` bound to the scalar type named by `$name`.
macro_rules! with_field {
    ($name:expr, $S:ident => $body:expr) => {
        match $name.as_str() {
            "Q" => {
                type $S = Q;
                $body
            }
            "F2" => {
                type $S = F2;
                $body
            }
            "F3" => {
                type $S = F3;
                $body
            }
            "F5" => {
                type $S = F5;
                $body
            }
            "F7" => {
                type $S = F7;
                $body
            }
            other => {
                Err(Failure::new(EXIT_DATA, format!("at /field: unsupported field {other:?} (Q, F2, F3, F5, F7)")))
            }
        }
    };
}

pub fn load(p: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(p)
        .map_err(|e| Failure::new(EXIT_NOINPUT, format!("cannot read {}: {e}", p.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        Failure::new(
            EXIT_DATA,
            format!("{}: malformed JSON at line {} column {}: {e}", p.display(), e.line(), e.column()),
        )
    })
}

fn in_file<T>(p: &Path, r: localg::Result<T>) -> CliResult<T> {
    r.map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", p.display(), f.message);
        f
    })
}

fn field_of(p: &Path, v: &Value) -> CliResult<String> {
    in_file(p, lj::field_name(v))
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn table(pairs: &[(&str, Value)]) -> Vec<(String, String)> {
    pairs.iter().map(|(k, v)| (k.to_string(), compact(v))).collect()
}

fn outcome(code: i32, json: Value, cert: Option<Value>) -> Outcome {
    let rows: Vec<(String, String)> = match &json {
        Value::Object(m) => m.iter().map(|(k, v)| (k.clone(), compact(v))).collect(),
        _ => vec![],
    };
    Outcome { code, json, table: rows, cert }
}

fn verdict_code<W>(v: &Verdict<W>) -> i32 {
    match v {
        Verdict::Holds => EXIT_TRUE,
        Verdict::Fails(_) => EXIT_FALSE,
        Verdict::Unknown(_) => EXIT_UNKNOWN,
    }
}

fn vj<S: Scalar>(v: &[S]) -> Value {
    lj::vec_to_json(v)
}

fn space<S: Scalar>(p: &Path, doc: &Value) -> CliResult<LocalitySpace<S>> {
    in_file(p, lj::space_from_json(doc, ""))
}

fn subspace_or<S: Scalar>(p: &Path, doc: &Value, key: &str, n: usize, default: Subspace<S>) -> CliResult<Subspace<S>> {
    match doc.get(key) {
        None => Ok(default),
        Some(v) => in_file(p, lj::subspace_from_json(v, &format!("/{key}"), n)),
    }
}

fn required_subspace<S: Scalar>(p: &Path, doc: &Value, key: &str, n: usize) -> CliResult<Subspace<S>> {
    in_file(p, lj::field(doc, "", key).and_then(|v| lj::subspace_from_json(v, &format!("/{key}"), n)))
}

fn usize_or(p: &Path, doc: &Value, key: &str, default: usize) -> CliResult<usize> {
    match doc.get(key) {
        None => Ok(default),
        Some(_) => in_file(p, lj::usize_field(doc, "", key)),
    }
}

pub fn dispatch(c: &Command) -> CliResult<Outcome> {
    match c {
        Command::Space(sc) => {
            let path = match sc {
                SpaceCmd::Check { doc } | SpaceCmd::Closure { doc } | SpaceCmd::Polar { doc } => doc,
            };
            let doc = load(path)?;
            with_field!(field_of(path, &doc)?, S => space_cmd::<S>(sc, path, &doc))
        }
        Command::Quotient { doc: p } | Command::Compat { doc: p } | Command::Complement { doc: p } => {
            let doc = load(p)?;
            with_field!(field_of(p, &doc)?, S => subspace_cmd::<S>(c, p, &doc))
        }
        Command::Tensor(tc) => {
            let p = match tc {
                TensorCmd::Dim { doc }
                | TensorCmd::AltDim { doc }
                | TensorCmd::Assoc { doc }
                | TensorCmd::Distrib { doc } => doc,
            };
            let doc = load(p)?;
            with_field!(field_of(p, &doc)?, S => tensor_cmd::<S>(tc, p, &doc))
        }
        Command::Lie(lc) => {
            let p = match lc {
                LieCmd::Check { doc } | LieCmd::Extend { doc } => doc,
            };
            let doc = load(p)?;
            with_field!(field_of(p, &doc)?, S => lie_cmd::<S>(lc, p, &doc))
        }
        Command::Uea(uc) => {
            let p = match uc {
                UeaCmd::Build { doc, .. } | UeaCmd::Prim { doc, .. } => doc,
            };
            let doc = load(p)?;
            with_field!(field_of(p, &doc)?, S => uea_cmd::<S>(uc, p, &doc))
        }
        Command::Gl(gc) => gl_cmd(gc),
        Command::Fuzz(a) => fuzz_cmd(a),
        Command::Certify { file } => {
            let doc = load(file)?;
            with_field!(field_of(file, &doc)?, S => certify::<S>(file, &doc))
        }
        Command::Fixtures(FixturesCmd::Verify { dir }) => crate::fixtures::verify(dir),
    }
}

fn polar_witness_json<S: Scalar>(w: &PolarWitness<S>) -> Value {
    json!({
        "u": vj(&w.u),
        "a": w.a.as_ref().map(|a| vj(a)),
        "b": w.b.as_ref().map(|b| vj(b)),
        "lambda": w.lambda.to_json(),
        "mu": w.mu.to_json(),
    })
}

fn space_cmd<S: Scalar>(c: &SpaceCmd, p: &Path, doc: &Value) -> CliResult<Outcome> {
    let s = space::<S>(p, doc)?;
    match c {
        SpaceCmd::Check { .. } => {
            let v = s.is_locality();
            let mut j = json!({"is_locality": v.as_bool()});
            match &v {
                Verdict::Fails(w) => j["witness"] = polar_witness_json(w),
                Verdict::Unknown(r) => j["reason"] = json!(r),
                Verdict::Holds => {}
            }
            Ok(outcome(verdict_code(&v), j, None))
        }
        SpaceCmd::Closure { .. } => match s.closure() {
            Closure::Exact(c) => {
                let j = json!({
                    "changed": c != s,
                    "is_locality": c.is_locality().as_bool(),
                    "closure": lj::space_to_json(&c),
                });
                Ok(outcome(EXIT_TRUE, j, None))
            }
            Closure::Unknown(r) => Ok(outcome(EXIT_UNKNOWN, json!({"closure": null, "reason": r}), None)),
        },
        SpaceCmd::Polar { .. } => {
            let us = in_file(p, lj::field(doc, "", "u").and_then(|u| lj::vecs_from_json::<S>(u, "/u", s.dim())))?;
            let pol = in_file(p, s.polar(&us))?;
            let set = match &pol.set {
                Polar::Union(ms) => json!({"union": ms.iter().map(lj::subspace_to_json).collect::<Vec<_>>()}),
                Polar::Explicit(vs) => json!({"explicit": lj::vecs_to_json(vs)}),
                Polar::Escaped { hyperplane, kernel } => json!({
                    "hyperplane": lj::subspace_to_json(hyperplane),
                    "outside_kernel": lj::subspace_to_json(kernel),
                }),
            };
            let j = json!({
                "is_subspace": pol.is_subspace,
                "subspace": pol.as_subspace(s.dim()).map(|m| lj::subspace_to_json(&m)),
                "polar": set,
            });
            Ok(outcome(EXIT_TRUE, j, None))
        }
    }
}

fn subspace_cmd<S: Scalar>(c: &Command, p: &Path, doc: &Value) -> CliResult<Outcome> {
    let s = space::<S>(p, doc)?;
    let w = required_subspace::<S>(p, doc, "w", s.dim())?;
    match c {
        Command::Quotient { .. } => {
            let q = in_file(p, quotients::quotient_locality(&s, &w))?;
            let v = in_file(p, quotients::is_locality_quotient(&s, &w))?;
            let j = json!({
                "dim": q.dim(),
                "is_locality": v.as_bool(),
                "quotient": lj::space_to_json(&q.space),
            });
            let cert = match &v {
                Verdict::Fails(c) => Some(c.to_json()),
                _ => None,
            };
            Ok(outcome(verdict_code(&v), j, cert))
        }
        Command::Compat { .. } => {
            let v = in_file(p, quotients::is_compatible(&s, &w, Budget::default()))?;
            let mut j = json!({"is_compatible": v.as_bool()});
            let mut cert = None;
            match &v {
                Verdict::Fails(wit) => {
                    j["witness"] = json!({"x": vj(&wit.x), "y": vj(&wit.y), "z": vj(&wit.z), "w": vj(&wit.w)});
                    cert = Some(wit.clone().into_certificate(&s, &w).to_json());
                }
                Verdict::Unknown(r) => j["reason"] = json!(r),
                Verdict::Holds => {}
            }
            Ok(outcome(verdict_code(&v), j, cert))
        }
        _ => {
            let r = in_file(p, quotients::strong_complement(&s, &w))?;
            Ok(match r {
                StrongComplement::Found { complement, projection } => outcome(
                    EXIT_TRUE,
                    json!({
                        "strong_complement": lj::subspace_to_json(&complement),
                        "projection": projection.m.iter().map(|r| vj(r)).collect::<Vec<_>>(),
                    }),
                    None,
                ),
                StrongComplement::None => {
                    let cert = S::is_finite()
                        .then(|| Certificate::new(&s, CertKind::NoStrongComplement { w: w.clone() }).to_json());
                    outcome(EXIT_FALSE, json!({"strong_complement": null}), cert)
                }
                StrongComplement::Unknown(r) => {
                    outcome(EXIT_UNKNOWN, json!({"strong_complement": null, "reason": r}), None)
                }
            })
        }
    }
}

fn tensor_cmd<S: Scalar>(c: &TensorCmd, p: &Path, doc: &Value) -> CliResult<Outcome> {
    let s = space::<S>(p, doc)?;
    let n = s.dim();
    let full = Subspace::<S>::full(n);
    match c {
        TensorCmd::Dim { .. } => {
            let factors = match doc.get("factors") {
                None => vec![full.clone(), full],
                Some(f) => {
                    let arr = in_file(p, lj::array(f, "/factors"))?;
                    arr.iter()
                        .enumerate()
                        .map(|(i, x)| in_file(p, lj::subspace_from_json(x, &format!("/factors/{i}"), n)))
                        .collect::<CliResult<Vec<_>>>()?
                }
            };
            let t = in_file(p, tensor::loc_tensor(&s, &factors))?;
            let (lo, hi) = t.dim_bounds();
            let j = if t.is_exact() {
                json!({"dim": t.dim(), "exact": true, "basis": lj::subspace_to_json(&t.basis)})
            } else {
                json!({"dim": null, "exact": false, "bounds": [lo, hi]})
            };
            Ok(outcome(if t.is_exact() { EXIT_TRUE } else { EXIT_UNKNOWN }, j, None))
        }
        TensorCmd::AltDim { .. } => {
            let v = subspace_or(p, doc, "v", n, full.clone())?;
            let w = subspace_or(p, doc, "w", n, full)?;
            let a = in_file(p, tensor::alt_tensor(&s, &v, &w))?;
            Ok(outcome(EXIT_TRUE, json!({"dim": a.dim, "standard_dim": a.standard_dim()}), None))
        }
        TensorCmd::Assoc { .. } => {
            let m = usize_or(p, doc, "m", 1)?;
            let k = usize_or(p, doc, "n", 1)?;
            let r = in_file(p, tensor::associativity_check(&s, m, k))?;
            let j = json!({
                "holds": r.holds(),
                "lhs_dim": r.lhs_dim,
                "rhs_dim": r.rhs_dim,
                "bijective": r.bijective,
                "relation_preserved": r.relation_preserved,
            });
            Ok(outcome(if r.holds() { EXIT_TRUE } else { EXIT_FALSE }, j, None))
        }
        TensorCmd::Distrib { .. } => {
            let v1 = required_subspace::<S>(p, doc, "v1", n)?;
            let v2 = required_subspace::<S>(p, doc, "v2", n)?;
            let w = subspace_or(p, doc, "w", n, full)?;
            let r = in_file(p, tensor::distributivity_check(&s, &v1, &v2, &w))?;
            let (code, name) = match r.outcome() {
                LawOutcome::Holds => (EXIT_TRUE, "holds"),
                LawOutcome::HypothesisViolated => (EXIT_TRUE, "hypothesis-violated"),
                LawOutcome::Fails => (EXIT_FALSE, "fails"),
                LawOutcome::Unknown => (EXIT_UNKNOWN, "unknown"),
            };
            let j = json!({
                "outcome": name,
                "hypothesis": r.hypothesis.as_bool(),
                "conclusion": r.conclusion.as_bool(),
            });
            Ok(outcome(code, j, None))
        }
    }
}

/// `{"family": [λ, μ, μ′]}`, `{"abelian": true, <space>}` or `{<space>, "brackets": [[a, b, [a,b]], ...]}`.
pub fn lie_from_doc<S: Scalar>(p: &Path, doc: &Value) -> CliResult<LocLieAlgebra<S>> {
    if let Some(f) = doc.get("family") {
        let v = in_file(p, lj::vec_from_json_dim::<S>(f, "/family", 3))?;
        return Ok(lie::lie_family(v[0].clone(), v[1].clone(), v[2].clone()));
    }
    let s = space::<S>(p, doc)?;
    if doc.get("abelian") == Some(&Value::Bool(true)) {
        return Ok(LocLieAlgebra::abelian(s));
    }
    let n = s.dim();
    let arr = in_file(p, lj::field(doc, "", "brackets").and_then(|b| lj::array(b, "/brackets")))?;
    let mut brackets = Vec::new();
    for (i, b) in arr.iter().enumerate() {
        let path = format!("/brackets/{i}");
        let vs = in_file(p, lj::vecs_from_json::<S>(b, &path, n))?;
        if vs.len() != 3 {
            return Err(Failure::new(EXIT_DATA, format!("{}: at {path}: expected [a, b, [a,b]]", p.display())));
        }
        brackets.push((vs[0].clone(), vs[1].clone(), vs[2].clone()));
    }
    in_file(p, LocLieAlgebra::new(s, brackets))
}

fn triple_json<S: Scalar>(t: &(Vector<S>, Vector<S>, Vector<S>)) -> Value {
    json!([vj(&t.0), vj(&t.1), vj(&t.2)])
}

fn lie_cmd<S: Scalar>(c: &LieCmd, p: &Path, doc: &Value) -> CliResult<Outcome> {
    let l = lie_from_doc::<S>(p, doc)?;
    match c {
        LieCmd::Check { .. } => {
            let r = in_file(p, lie::jacobi_check(&l))?;
            let mut j = json!({
                "jacobi": r.jacobi.as_bool(),
                "polar_stability": r.polar_stability.as_bool(),
            });
            if let Verdict::Fails(t) = &r.jacobi {
                j["jacobi_witness"] = triple_json(t);
            }
            if let Verdict::Fails(t) = &r.polar_stability {
                j["polar_witness"] = triple_json(t);
            }
            Ok(outcome(verdict_code(&r.verdict()), j, None))
        }
        LieCmd::Extend { .. } => {
            let r = in_file(p, lie::bracket_extension(&l))?;
            let unknowns: Vec<Value> = r.unknowns.iter().map(|(i, j)| json!([i, j])).collect();
            Ok(match &r.extension {
                Extension::Feasible { table } => {
                    let t: Vec<Value> =
                        table.iter().map(|row| Value::Array(row.iter().map(|v| vj(v)).collect())).collect();
                    outcome(EXIT_TRUE, json!({"feasible": true, "unknowns": unknowns, "table": t}), None)
                }
                Extension::Infeasible { combination, obstruction } => outcome(
                    EXIT_FALSE,
                    json!({
                        "feasible": false,
                        "unknowns": unknowns,
                        "combination": vj(combination),
                        "obstruction": {"coeffs": vj(&obstruction.coeffs), "constant": obstruction.constant.to_json()},
                    }),
                    None,
                ),
            })
        }
    }
}

fn uea_cmd<S: Scalar>(c: &UeaCmd, p: &Path, doc: &Value) -> CliResult<Outcome> {
    let l = lie_from_doc::<S>(p, doc)?;
    match c {
        UeaCmd::Build { degree, .. } => {
            let u = in_file(p, lie::trunc_env_algebra(&l, *degree))?;
            let j = json!({"dim": u.dim(), "filtered_dims": u.filtered_dims, "tensor_dims": u.tensor_dims()});
            Ok(outcome(EXIT_TRUE, j, None))
        }
        UeaCmd::Prim { degree, .. } => {
            let u = in_file(p, lie::trunc_env_algebra(&l, *degree))?;
            let prim = in_file(p, u.primitives())?;
            let iota = in_file(p, u.iota())?;
            let equal = prim == iota;
            let j = json!({"prim_dim": prim.dim(), "iota_dim": iota.dim(), "prim_equals_iota": equal});
            Ok(outcome(if equal { EXIT_TRUE } else { EXIT_FALSE }, j, None))
        }
    }
}

fn load_forest(p: &Path, omega: &Omega) -> CliResult<Forest> {
    let v = load(p)?;
    let f = match &v {
        Value::Object(_) => in_file(p, lj::field(&v, "", "forest"))?.clone(),
        _ => v,
    };
    let forest = in_file(p, Forest::from_json(&f, omega))?;
    if !forest.is_proper(omega) {
        return Err(Failure::new(EXIT_DATA, format!("{}: forest is not properly decorated", p.display())));
    }
    Ok(forest)
}

fn element_table(e: &GLElement<Q>, omega: &Omega) -> Vec<(String, String)> {
    e.terms().iter().map(|(f, c)| (c.to_string(), f.render(omega))).collect()
}

fn gl_cmd(c: &GlCmd) -> CliResult<Outcome> {
    let omega_path = match c {
        GlCmd::Product { omega, .. }
        | GlCmd::Coprod { omega, .. }
        | GlCmd::Antipode { omega, .. }
        | GlCmd::Mm { omega, .. } => omega,
    };
    let ov = load(omega_path)?;
    let omega = in_file(omega_path, Omega::from_json(&ov))?;
    match c {
        GlCmd::Product { forests, .. } => {
            let fs = forests
                .iter()
                .map(|p| load_forest(p, &omega).map(GLElement::<Q>::forest))
                .collect::<CliResult<Vec<_>>>()?;
            let prod = glforest::gl_product_all(&omega, &fs).map_err(Failure::from)?;
            let j = json!({"product": prod.to_json(&omega)});
            Ok(Outcome { code: EXIT_TRUE, table: element_table(&prod, &omega), json: j, cert: None })
        }
        GlCmd::Coprod { forest, .. } => {
            let f = load_forest(forest, &omega)?;
            let d = glforest::gl_coproduct(&GLElement::<Q>::forest(f));
            let terms: Vec<Value> = d
                .iter()
                .map(|(k, c)| json!({"coef": c.to_json(), "left": k[0].to_json(&omega), "right": k[1].to_json(&omega)}))
                .collect();
            let t = d
                .iter()
                .map(|(k, c)| (c.to_string(), format!("{} ⊗ {}", k[0].render(&omega), k[1].render(&omega))))
                .collect();
            Ok(Outcome { code: EXIT_TRUE, json: json!({"coproduct": terms}), table: t, cert: None })
        }
        GlCmd::Antipode { forest, .. } => {
            let f = load_forest(forest, &omega)?;
            let s = glforest::antipode(&GLElement::<Q>::forest(f.clone()));
            let check = glforest::antipode_convolution(&GLElement::<Q>::forest(f.clone()));
            let expect = if f.is_unit() { GLElement::unit() } else { GLElement::zero() };
            let ok = check == expect;
            let mut t = element_table(&s, &omega);
            t.push(("S⋆Id = u∘ε".into(), ok.to_string()));
            Ok(Outcome {
                code: if ok { EXIT_TRUE } else { EXIT_FALSE },
                json: json!({"antipode": s.to_json(&omega), "convolution_check": ok}),
                table: t,
                cert: None,
            })
        }
        GlCmd::Mm { forest, .. } => {
            let f = load_forest(forest, &omega)?;
            let d = glforest::mm_decompose::<Q>(&omega, &f).map_err(Failure::from)?;
            let back = glforest::mm_recompose(&omega, &d).map_err(Failure::from)?;
            let ok = back == GLElement::forest(f);
            let terms: Vec<Value> = d
                .iter()
                .map(|(c, ts)| json!({"coef": c.to_json(), "trees": ts.iter().map(|t| t.to_json(&omega)).collect::<Vec<_>>()}))
                .collect();
            let mut t: Vec<(String, String)> = d
                .iter()
                .map(|(c, ts)| (c.to_string(), ts.iter().map(|t| t.render(&omega)).collect::<Vec<_>>().join(" ∗ ")))
                .collect();
            t.push(("round trip".into(), ok.to_string()));
            Ok(Outcome {
                code: if ok { EXIT_TRUE } else { EXIT_FALSE },
                json: json!({"decomposition": terms, "round_trip": ok}),
                table: t,
                cert: None,
            })
        }
    }
}

fn fuzz_cmd(a: &FuzzArgs) -> CliResult<Outcome> {
    let rule = match a.rule.as_str() {
        "componentwise" => PairRule::Componentwise,
        "all-pairs" => PairRule::AllPairs,
        r => return Err(Failure::new(EXIT_USAGE, format!("unknown --rule {r:?} (componentwise, all-pairs)"))),
    };
    let lie = match a.lie.as_str() {
        "family" => LieChoice::Family,
        "abelian" => LieChoice::Abelian,
        "alternate" => LieChoice::Alternate,
        l => return Err(Failure::new(EXIT_USAGE, format!("unknown --lie {l:?} (family, abelian, alternate)"))),
    };
    let cfg = FuzzConfig {
        statement: a.statement,
        dim: a.dim,
        trials: a.trials,
        seed: a.seed,
        cap: a.cap,
        degree: a.degree,
        rule,
        lie,
        generators: a.generators,
    };
    fn go<S: Scalar>(cfg: &FuzzConfig) -> CliResult<Outcome> {
        cfg.validate::<S>().map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
        let r = conjlab::fuzz::<S>(cfg)?;
        let j = r.to_json();
        let t = table(&[
            ("statement", json!(r.statement)),
            ("field", json!(S::field_name())),
            ("trials", json!(r.trials)),
            ("found", json!(r.found)),
            ("skipped", json!(r.skipped)),
            ("timeouts", json!(r.timeouts)),
            ("counterexamples", json!(r.counterexamples.len())),
            ("seed", json!(r.seed)),
        ]);
        let code = if r.counterexamples.is_empty() { EXIT_TRUE } else { EXIT_FALSE };
        let cert = r.counterexamples.first().map(|(_, c)| c.to_json());
        Ok(Outcome { code, json: j, table: t, cert })
    }
    match a.field {
        2 => go::<F2>(&cfg),
        3 => go::<F3>(&cfg),
        f => Err(Failure::new(EXIT_USAGE, format!("--field must be 2 or 3, not {f}"))),
    }
}

fn certify<S: Scalar>(p: &Path, doc: &Value) -> CliResult<Outcome> {
    let kind = in_file(p, lj::str_field(doc, "", "kind"))?.to_string();
    let valid = if kind == "NoCorrection" {
        in_file(p, ConjCertificate::<S>::from_json(doc).and_then(|c| c.replay()))?
    } else {
        in_file(p, Certificate::<S>::from_json(doc).and_then(|c| c.replay()))?
    };
    Ok(outcome(if valid { EXIT_TRUE } else { EXIT_FALSE }, json!({"kind": kind, "valid": valid}), None))
}
