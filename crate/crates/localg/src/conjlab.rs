//! Witness search for the three compatibility statements on small finite-field instances.
//!
//! Every statement has the same shape: a free span `K(X)` on a finite set `X` of tuples of
//! vectors, the linearly extended relation (supports pairwise related), and a subspace
//! `W = π⁻¹(J)` where `π` sends a tuple to its tensor in `⊕_k E^{⊗k}` and `J` is zero for the
//! first two statements. The elements related to both `y` and `z` form `span(A)` with `A` the
//! tuples related to every support tuple of `y` and `z`, so a correction exists iff
//! `π(x) ∈ π(span A) + J`. That is one exact linear system, and its failure comes with a
//! separating functional, which is the certificate.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactla::{dot, kron_all, nullspace, solve, sub, zero_vec, Echelon, Subspace, Vector};
use crate::fin;
use crate::json::{self, field};
use crate::lie::{lie_family, trunc_env_algebra, LocLieAlgebra};
use crate::locality::LocalitySpace;
use crate::quotients::{random_locality_space, random_subspace};
use crate::scalar::Scalar;

/// Largest free-span basis handled per instance.
pub const MAX_BASIS: usize = 4096;
pub const MAX_SUPPORT_CAP: usize = 6;
/// Attempts at placing `x + w` before a trial is skipped.
pub const RESAMPLE_BUDGET: usize = 32;

/// How pairs `(v, w), (v', w')` are related in the first statement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairRule {
    /// `v ⊤ v'` and `w ⊤ w'`.
    Componentwise,
    /// All four cross pairs related.
    AllPairs,
}

impl PairRule {
    pub fn name(self) -> &'static str {
        match self {
            PairRule::Componentwise => "componentwise",
            PairRule::AllPairs => "all-pairs",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "componentwise" => Ok(PairRule::Componentwise),
            "all-pairs" => Ok(PairRule::AllPairs),
            _ => json::parse_err("/params/rule", format!("unknown pair rule {s:?}")),
        }
    }
}

/// Construction data beyond the base space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Params<S: Scalar> {
    /// Statement 1: `K(V1 ×_⊤ V2)` modulo bilinear relations.
    Pairs { v1: Subspace<S>, v2: Subspace<S>, rule: PairRule },
    /// Statement 2: `K(∪_{k≤N} V^{×_⊤ k})` modulo multilinear relations.
    Tensor { degree: usize },
    /// Statement 3: the tensor-algebra span modulo `π⁻¹(J_⊤(g))`, truncated at `degree`.
    Enveloping { lie: LocLieAlgebra<S>, degree: usize },
}

impl<S: Scalar> Params<S> {
    pub fn statement(&self) -> u8 {
        match self {
            Params::Pairs { .. } => 1,
            Params::Tensor { .. } => 2,
            Params::Enveloping { .. } => 3,
        }
    }
}

/// Sparse element of the free span: tuple (as vectors) to nonzero coefficient.
pub type SpanElem<S> = BTreeMap<Vec<Vector<S>>, S>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjInstance<S: Scalar> {
    pub space: LocalitySpace<S>,
    pub params: Params<S>,
    pub x: SpanElem<S>,
    pub y: SpanElem<S>,
    pub z: SpanElem<S>,
    pub w: SpanElem<S>,
    pub cap: usize,
}

/// The enumerated free span of an instance.
#[derive(Clone, Debug)]
pub struct FreeSpan<S: Scalar> {
    /// `rel[a][b]` on encoded vectors of the ambient space.
    rel: Vec<Vec<bool>>,
    pub tuples: Vec<Vec<usize>>,
    index: BTreeMap<Vec<usize>, usize>,
    rule: Option<PairRule>,
    n: usize,
    offsets: Vec<usize>,
    /// `J`, in the flat target.
    pub extra: Subspace<S>,
}

impl<S: Scalar> FreeSpan<S> {
    pub fn build(space: &LocalitySpace<S>, params: &Params<S>) -> Result<Self> {
        let n = space.dim();
        let all = fin::all_vectors::<S>(n)?;
        let rel: Vec<Vec<bool>> = all.iter().map(|a| all.iter().map(|b| space.rel(a, b)).collect()).collect();
        let enc = |v: &Vector<S>| fin::encode(v) as usize;
        let (tuples, rule, max_len) = match params {
            Params::Pairs { v1, v2, rule } => {
                let (e1, e2) = (v1.elements(), v2.elements());
                if e1.len() * e2.len() > MAX_BASIS {
                    return Err(Error::TooLarge(format!("{} candidate pairs", e1.len() * e2.len())));
                }
                let mut ts = Vec::new();
                for a in &e1 {
                    for b in &e2 {
                        if rel[enc(a)][enc(b)] {
                            ts.push(vec![enc(a), enc(b)]);
                        }
                    }
                }
                (ts, Some(*rule), 2)
            }
            Params::Tensor { degree } | Params::Enveloping { degree, .. } => {
                let size = all.len().checked_pow(*degree as u32).unwrap_or(usize::MAX);
                if size > MAX_BASIS {
                    return Err(Error::TooLarge(format!("{size} candidate tuples of length {degree}")));
                }
                let mut ts = vec![Vec::new()];
                let mut layer = vec![Vec::new()];
                for _ in 0..*degree {
                    let mut next = Vec::new();
                    for t in &layer {
                        for v in 0..all.len() {
                            if t.iter().all(|&u: &usize| rel[u][v]) {
                                let mut t2 = t.clone();
                                t2.push(v);
                                next.push(t2);
                            }
                        }
                    }
                    ts.extend(next.iter().cloned());
                    layer = next;
                }
                (ts, None, *degree)
            }
        };
        let mut offsets = vec![0];
        for k in 0..=max_len {
            offsets.push(offsets[k] + n.pow(k as u32));
        }
        let flat = offsets[max_len + 1];
        let extra = match params {
            Params::Enveloping { lie, degree } => {
                if lie.space != *space {
                    return Err(Error::PreconditionFailed("Lie algebra lives on a different space".into()));
                }
                trunc_env_algebra(lie, *degree)?.ideal[*degree].clone()
            }
            _ => Subspace::zero(flat),
        };
        let index = tuples.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Ok(FreeSpan { rel, tuples, index, rule, n, offsets, extra })
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn target_dim(&self) -> usize {
        *self.offsets.last().expect("nonempty")
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        let (ta, tb) = (&self.tuples[a], &self.tuples[b]);
        match self.rule {
            Some(PairRule::Componentwise) => self.rel[ta[0]][tb[0]] && self.rel[ta[1]][tb[1]],
            _ => ta.iter().all(|&u| tb.iter().all(|&v| self.rel[u][v])),
        }
    }

    /// `π(t)`, the tensor of the tuple in the flat target.
    pub fn image(&self, t: usize) -> Vector<S> {
        let vs: Vec<Vector<S>> = self.tuples[t].iter().map(|&i| fin::decode(i as u64, self.n)).collect();
        let k = vs.len();
        let mut out = zero_vec(self.target_dim());
        out[self.offsets[k]..self.offsets[k + 1]]
            .clone_from_slice(&kron_all(&vs.iter().map(|v| v.as_slice()).collect::<Vec<_>>()));
        out
    }

    fn image_of(&self, e: &BTreeMap<usize, S>) -> Vector<S> {
        let mut out: Vector<S> = zero_vec(self.target_dim());
        for (&t, c) in e {
            let im = self.image(t);
            for (o, v) in out.iter_mut().zip(im) {
                *o = o.clone() + c.clone() * v;
            }
        }
        out
    }

    /// Tuples related to every tuple in `support`.
    pub fn related_to_all(&self, support: &[usize]) -> Vec<usize> {
        (0..self.len()).filter(|&a| support.iter().all(|&b| self.related(a, b))).collect()
    }

    fn encode(&self, e: &SpanElem<S>) -> Result<BTreeMap<usize, S>> {
        e.iter()
            .map(|(t, c)| {
                let key: Vec<usize> = t.iter().map(|v| fin::encode(v) as usize).collect();
                self.index
                    .get(&key)
                    .map(|&i| (i, c.clone()))
                    .ok_or_else(|| Error::PreconditionFailed("support tuple outside the free span".into()))
            })
            .collect()
    }

    fn decode(&self, e: &BTreeMap<usize, S>) -> SpanElem<S> {
        e.iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(&t, c)| (self.tuples[t].iter().map(|&i| fin::decode(i as u64, self.n)).collect(), c.clone()))
            .collect()
    }

    fn supports_related(&self, a: &BTreeMap<usize, S>, b: &BTreeMap<usize, S>) -> bool {
        a.keys().all(|&i| b.keys().all(|&j| self.related(i, j)))
    }
}

/// Result of an exact witness search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Search<S: Scalar> {
    /// `w' ∈ W` with `x + w'` related to `y` and `z`.
    Found { w_prime: SpanElem<S> },
    /// No correction exists: `functional` kills `π(A)` and `J` but not `π(x)`.
    Exhausted { functional: Vector<S> },
}

/// Decides whether `x + W` meets the elements related to both `y` and `z`.
pub fn witness_search<S: Scalar>(inst: &ConjInstance<S>) -> Result<Search<S>> {
    let span = FreeSpan::build(&inst.space, &inst.params)?;
    search_in(&span, inst)
}

fn search_in<S: Scalar>(span: &FreeSpan<S>, inst: &ConjInstance<S>) -> Result<Search<S>> {
    let x = span.encode(&inst.x)?;
    let support: Vec<usize> = span.encode(&inst.y)?.keys().chain(span.encode(&inst.z)?.keys()).copied().collect();
    let cands = span.related_to_all(&support);
    let td = span.target_dim();
    let mut ech = Echelon::new(td);
    let mut cols: Vec<(Option<usize>, Vector<S>)> = Vec::new();
    for e in span.extra.basis() {
        if ech.insert(e) {
            cols.push((None, e.clone()));
        }
    }
    for &a in &cands {
        if ech.rank() == td {
            break;
        }
        let im = span.image(a);
        if ech.insert(&im) {
            cols.push((Some(a), im));
        }
    }
    let rows: Vec<Vector<S>> = (0..td).map(|i| cols.iter().map(|(_, c)| c[i].clone()).collect()).collect();
    let px = span.image_of(&x);
    match solve(&rows, cols.len(), &px)? {
        Some(c) => {
            let mut u: BTreeMap<usize, S> = BTreeMap::new();
            for ((t, _), ci) in cols.iter().zip(c) {
                if let (Some(t), false) = (t, ci.is_zero()) {
                    u.insert(*t, ci);
                }
            }
            let mut wp = u;
            for (t, c) in &x {
                let v = wp.get(t).cloned().unwrap_or_else(S::zero) - c.clone();
                wp.insert(*t, v);
            }
            Ok(Search::Found { w_prime: span.decode(&wp) })
        }
        None => {
            let colvecs: Vec<Vector<S>> = cols.into_iter().map(|(_, c)| c).collect();
            let functional = nullspace(&colvecs, td)?
                .into_iter()
                .find(|f| !dot(f, &px).is_zero())
                .ok_or_else(|| Error::Inconsistent("unsolvable system without a separating functional".into()))?;
            Ok(Search::Exhausted { functional })
        }
    }
}

/// Checks the instance invariants: tuples in the span, `w ∈ W`, `x ⊤ y`, `(x + w) ⊤ z`.
pub fn check_instance<S: Scalar>(span: &FreeSpan<S>, inst: &ConjInstance<S>) -> Result<bool> {
    let (x, y, z, w) = (span.encode(&inst.x)?, span.encode(&inst.y)?, span.encode(&inst.z)?, span.encode(&inst.w)?);
    let mut xw = x.clone();
    for (t, c) in &w {
        let v = xw.get(t).cloned().unwrap_or_else(S::zero) + c.clone();
        xw.insert(*t, v);
    }
    xw.retain(|_, c| !c.is_zero());
    Ok(span.extra.contains(&span.image_of(&w)) && span.supports_related(&x, &y) && span.supports_related(&xw, &z))
}

/// Whether `w'` is a valid correction for the instance.
pub fn check_correction<S: Scalar>(span: &FreeSpan<S>, inst: &ConjInstance<S>, w_prime: &SpanElem<S>) -> Result<bool> {
    let (x, y, z, wp) = (span.encode(&inst.x)?, span.encode(&inst.y)?, span.encode(&inst.z)?, span.encode(w_prime)?);
    let mut u = x;
    for (t, c) in &wp {
        let v = u.get(t).cloned().unwrap_or_else(S::zero) + c.clone();
        u.insert(*t, v);
    }
    u.retain(|_, c| !c.is_zero());
    Ok(span.extra.contains(&span.image_of(&wp)) && span.supports_related(&u, &y) && span.supports_related(&u, &z))
}

/// Which Lie algebra statement 3 trials use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LieChoice {
    /// The three-dimensional family with random nonzero parameters.
    Family,
    /// Zero bracket on a random locality space.
    Abelian,
    /// Family on even trials, abelian on odd ones.
    Alternate,
}

#[derive(Clone, Debug)]
pub struct FuzzConfig {
    pub statement: u8,
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub cap: usize,
    /// Truncation degree for statements 2 and 3.
    pub degree: usize,
    pub rule: PairRule,
    pub lie: LieChoice,
    /// Random generator pairs of the base relation.
    pub generators: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            statement: 1,
            dim: 2,
            trials: 100,
            seed: 0,
            cap: 3,
            degree: 2,
            rule: PairRule::Componentwise,
            lie: LieChoice::Alternate,
            generators: 3,
        }
    }
}

impl FuzzConfig {
    pub fn validate<S: Scalar>(&self) -> Result<()> {
        let p = S::characteristic();
        if !(p == 2 || p == 3) || S::order() != Some(p as u64) {
            return Err(Error::PreconditionFailed(format!("fuzzing runs over F_2 or F_3, not {}", S::field_name())));
        }
        if !(1..=3).contains(&self.statement) {
            return Err(Error::PreconditionFailed(format!("unknown statement {}", self.statement)));
        }
        if self.dim == 0 || self.dim > 3 {
            return Err(Error::PreconditionFailed("dims must be 1..=3".into()));
        }
        if self.cap == 0 || self.cap > MAX_SUPPORT_CAP {
            return Err(Error::PreconditionFailed(format!("support cap must be 1..={MAX_SUPPORT_CAP}")));
        }
        if self.statement >= 2 && !(1..=3).contains(&self.degree) {
            return Err(Error::PreconditionFailed("truncation degree must be 1..=3".into()));
        }
        if self.statement == 3 && self.lie != LieChoice::Abelian && self.dim != 3 {
            return Err(Error::PreconditionFailed("the Lie family lives in dimension 3".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "statement": self.statement,
            "dim": self.dim,
            "trials": self.trials,
            "seed": self.seed,
            "cap": self.cap,
            "degree": self.degree,
            "rule": self.rule.name(),
            "lie": format!("{:?}", self.lie).to_lowercase(),
            "generators": self.generators,
        })
    }
}

/// The per-trial generator: the master seed on stream `trial`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(trial);
    r
}

fn nonzero<S: Scalar, R: Rng>(rng: &mut R) -> S {
    let q = S::order().expect("finite field");
    S::from_index(rng.gen_range(1..q))
}

fn random_elem<S: Scalar, R: Rng>(rng: &mut R, pool: &[usize], min: usize, cap: usize) -> BTreeMap<usize, S> {
    let k = rng.gen_range(min..=cap).min(pool.len());
    let mut out = BTreeMap::new();
    for _ in 0..k {
        out.insert(pool[rng.gen_range(0..pool.len())], nonzero(rng));
    }
    out
}

/// Samples one instance. `None` after [`RESAMPLE_BUDGET`] failed attempts at `x + w`.
pub fn sample_instance<S: Scalar>(cfg: &FuzzConfig, trial: u64) -> Result<Option<ConjInstance<S>>> {
    cfg.validate::<S>()?;
    let mut rng = trial_rng(cfg.seed, trial);
    let n = cfg.dim;
    let lie_family_trial = match cfg.lie {
        LieChoice::Family => true,
        LieChoice::Abelian => false,
        LieChoice::Alternate => trial % 2 == 0,
    };
    let (space, params) = match cfg.statement {
        1 => {
            let space = random_locality_space::<S, _>(n, cfg.generators, &mut rng)?;
            let k1 = rng.gen_range(1..=n);
            let k2 = rng.gen_range(1..=n);
            let v1 = random_subspace::<S, _>(n, k1, &mut rng)?;
            let v2 = random_subspace::<S, _>(n, k2, &mut rng)?;
            (space, Params::Pairs { v1, v2, rule: cfg.rule })
        }
        2 => (random_locality_space::<S, _>(n, cfg.generators, &mut rng)?, Params::Tensor { degree: cfg.degree }),
        _ => {
            let lie = if lie_family_trial {
                lie_family(nonzero(&mut rng), nonzero(&mut rng), nonzero(&mut rng))
            } else {
                LocLieAlgebra::abelian(random_locality_space::<S, _>(n, cfg.generators, &mut rng)?)
            };
            (lie.space.clone(), Params::Enveloping { lie, degree: cfg.degree })
        }
    };
    let span = FreeSpan::build(&space, &params)?;
    if span.is_empty() {
        return Ok(None);
    }
    let everything: Vec<usize> = (0..span.len()).collect();
    let x: BTreeMap<usize, S> = random_elem(&mut rng, &everything, 1, cfg.cap);
    let xs: Vec<usize> = x.keys().copied().collect();
    let y: BTreeMap<usize, S> = random_elem(&mut rng, &span.related_to_all(&xs), 0, cfg.cap);
    // Place u = x + w on a random support, solving π(u) − π(x) ∈ J.
    let px = span.image_of(&x);
    let td = span.target_dim();
    for _ in 0..RESAMPLE_BUDGET {
        let k = rng.gen_range(1..=cfg.cap);
        let mut supp: Vec<usize> = (0..k).map(|_| rng.gen_range(0..span.len())).collect();
        supp.sort_unstable();
        supp.dedup();
        let mut cols: Vec<Vector<S>> = supp.iter().map(|&t| span.image(t)).collect();
        cols.extend(span.extra.basis().iter().cloned());
        let rows: Vec<Vector<S>> = (0..td).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
        let Some(c) = solve(&rows, cols.len(), &px)? else { continue };
        let u: BTreeMap<usize, S> =
            supp.iter().zip(c).filter(|(_, ci)| !ci.is_zero()).map(|(&t, ci)| (t, ci)).collect();
        let mut w = u.clone();
        for (t, cx) in &x {
            let v = w.get(t).cloned().unwrap_or_else(S::zero) - cx.clone();
            w.insert(*t, v);
        }
        let us: Vec<usize> = u.keys().copied().collect();
        let z: BTreeMap<usize, S> = random_elem(&mut rng, &span.related_to_all(&us), 0, cfg.cap);
        let inst = ConjInstance {
            space: space.clone(),
            params: params.clone(),
            x: span.decode(&x),
            y: span.decode(&y),
            z: span.decode(&z),
            w: span.decode(&w),
            cap: cfg.cap,
        };
        debug_assert!(check_instance(&span, &inst)?);
        // Keep the member of W honest: π(w) ∈ J.
        debug_assert!(span.extra.contains(&sub(&span.image_of(&u), &px)));
        return Ok(Some(inst));
    }
    Ok(None)
}

/// A counterexample: an instance whose correction provably does not exist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjCertificate<S: Scalar> {
    pub instance: ConjInstance<S>,
    pub functional: Vector<S>,
}

impl<S: Scalar> ConjCertificate<S> {
    /// Rebuilds the span, re-checks the instance, and re-derives the obstruction from the
    /// functional against an independent enumeration of the candidate tuples.
    pub fn replay(&self) -> Result<bool> {
        let span = FreeSpan::build(&self.instance.space, &self.instance.params)?;
        if !check_instance(&span, &self.instance)? || self.functional.len() != span.target_dim() {
            return Ok(false);
        }
        let f = &self.functional;
        let y = span.encode(&self.instance.y)?;
        let z = span.encode(&self.instance.z)?;
        let x = span.encode(&self.instance.x)?;
        let kills_candidates = (0..span.len())
            .filter(|&a| y.keys().chain(z.keys()).all(|&b| span.related(a, b)))
            .all(|a| dot(f, &span.image(a)).is_zero());
        let kills_j = span.extra.basis().iter().all(|e| dot(f, e).is_zero());
        Ok(kills_candidates && kills_j && !dot(f, &span.image_of(&x)).is_zero())
    }

    pub fn to_json(&self) -> Value {
        json::document(json!({
            "kind": "NoCorrection",
            "field": S::field_name(),
            "instance": instance_to_json(&self.instance),
            "functional": json::vec_to_json(&self.functional),
        }))
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        json::check_schema(v)?;
        let kind = json::str_field(v, "", "kind")?;
        if kind != "NoCorrection" {
            return json::parse_err("/kind", format!("expected NoCorrection, found {kind:?}"));
        }
        let instance = instance_from_json(field(v, "", "instance")?)?;
        let functional = json::vec_from_json(field(v, "", "functional")?, "/functional")?;
        Ok(ConjCertificate { instance, functional })
    }
}

fn elem_to_json<S: Scalar>(e: &SpanElem<S>) -> Value {
    Value::Array(e.iter().map(|(t, c)| json!({"coef": c.to_json(), "tuple": json::vecs_to_json(t)})).collect())
}

fn elem_from_json<S: Scalar>(v: &Value, path: &str, n: usize) -> Result<SpanElem<S>> {
    let mut out = BTreeMap::new();
    for (i, t) in json::array(v, path)?.iter().enumerate() {
        let p = format!("{path}/{i}");
        let c = json::at(&format!("{p}/coef"), S::from_json(field(t, &p, "coef")?))?;
        let tuple = json::vecs_from_json(field(t, &p, "tuple")?, &format!("{p}/tuple"), n)?;
        out.insert(tuple, c);
    }
    Ok(out)
}

pub fn instance_to_json<S: Scalar>(inst: &ConjInstance<S>) -> Value {
    let params = match &inst.params {
        Params::Pairs { v1, v2, rule } => {
            json!({"v1": json::subspace_to_json(v1), "v2": json::subspace_to_json(v2), "rule": rule.name()})
        }
        Params::Tensor { degree } => json!({"degree": degree}),
        Params::Enveloping { lie, degree } => json!({
            "degree": degree,
            "abelian": *lie == LocLieAlgebra::abelian(lie.space.clone()),
            "brackets": lie.brackets.iter().map(|(a, b, c)| json!([json::vec_to_json(a), json::vec_to_json(b), json::vec_to_json(c)])).collect::<Vec<_>>(),
        }),
    };
    json!({
        "statement": inst.params.statement(),
        "space": json::space_to_json(&inst.space),
        "params": params,
        "x": elem_to_json(&inst.x),
        "y": elem_to_json(&inst.y),
        "z": elem_to_json(&inst.z),
        "w": elem_to_json(&inst.w),
        "cap": inst.cap,
    })
}

pub fn instance_from_json<S: Scalar>(v: &Value) -> Result<ConjInstance<S>> {
    let space: LocalitySpace<S> = json::space_from_json(field(v, "", "space")?, "/space")?;
    let n = space.dim();
    let p = field(v, "", "params")?;
    let params = match json::usize_field(v, "", "statement")? {
        1 => Params::Pairs {
            v1: json::subspace_from_json(field(p, "/params", "v1")?, "/params/v1", n)?,
            v2: json::subspace_from_json(field(p, "/params", "v2")?, "/params/v2", n)?,
            rule: PairRule::parse(json::str_field(p, "/params", "rule")?)?,
        },
        2 => Params::Tensor { degree: json::usize_field(p, "/params", "degree")? },
        3 if p.get("abelian") == Some(&Value::Bool(true)) => Params::Enveloping {
            lie: LocLieAlgebra::abelian(space.clone()),
            degree: json::usize_field(p, "/params", "degree")?,
        },
        3 => {
            let mut brackets = Vec::new();
            for (i, b) in json::array(field(p, "/params", "brackets")?, "/params/brackets")?.iter().enumerate() {
                let path = format!("/params/brackets/{i}");
                let vs = json::vecs_from_json::<S>(b, &path, n)?;
                if vs.len() != 3 {
                    return json::parse_err(&path, "expected [a, b, [a,b]]");
                }
                brackets.push((vs[0].clone(), vs[1].clone(), vs[2].clone()));
            }
            Params::Enveloping {
                lie: LocLieAlgebra::new(space.clone(), brackets)?,
                degree: json::usize_field(p, "/params", "degree")?,
            }
        }
        s => return json::parse_err("/statement", format!("unknown statement {s}")),
    };
    Ok(ConjInstance {
        space,
        params,
        x: elem_from_json(field(v, "", "x")?, "/x", n)?,
        y: elem_from_json(field(v, "", "y")?, "/y", n)?,
        z: elem_from_json(field(v, "", "z")?, "/z", n)?,
        w: elem_from_json(field(v, "", "w")?, "/w", n)?,
        cap: json::usize_field(v, "", "cap")?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzReport<S: Scalar> {
    pub statement: u8,
    pub trials: usize,
    /// Trials where a correction `w'` was found.
    pub found: usize,
    /// Trials where sampling `x + w` failed within the budget.
    pub skipped: usize,
    /// Always 0: every search is decided by one exact linear system.
    pub timeouts: usize,
    /// Indexed by trial.
    pub counterexamples: Vec<(u64, ConjCertificate<S>)>,
    pub seed: u64,
    pub config: Value,
}

impl<S: Scalar> FuzzReport<S> {
    pub fn to_json(&self) -> Value {
        json::document(json!({
            "statement": self.statement,
            "field": S::field_name(),
            "trials": self.trials,
            "found": self.found,
            "skipped": self.skipped,
            "timeouts": self.timeouts,
            "seed": self.seed,
            "search": "exact linear decision over all related candidate tuples",
            "config": self.config,
            "counterexamples": self.counterexamples.iter().map(|(t, c)| json!({"trial": t, "certificate": c.to_json()})).collect::<Vec<_>>(),
        }))
    }
}

enum Trial<S: Scalar> {
    Found,
    Skipped,
    Counterexample(ConjCertificate<S>),
}

fn run_trial<S: Scalar>(cfg: &FuzzConfig, trial: u64) -> Result<Trial<S>> {
    let Some(inst) = sample_instance::<S>(cfg, trial)? else { return Ok(Trial::Skipped) };
    let span = FreeSpan::build(&inst.space, &inst.params)?;
    match search_in(&span, &inst)? {
        Search::Found { w_prime } => {
            debug_assert!(check_correction(&span, &inst, &w_prime)?);
            Ok(Trial::Found)
        }
        Search::Exhausted { functional } => Ok(Trial::Counterexample(ConjCertificate { instance: inst, functional })),
    }
}

/// Runs `cfg.trials` independent trials in parallel; the report does not depend on the
/// thread count.
pub fn fuzz<S: Scalar>(cfg: &FuzzConfig) -> Result<FuzzReport<S>> {
    cfg.validate::<S>()?;
    let outcomes: Vec<Result<Trial<S>>> = (0..cfg.trials as u64).into_par_iter().map(|t| run_trial(cfg, t)).collect();
    let mut report = FuzzReport {
        statement: cfg.statement,
        trials: cfg.trials,
        found: 0,
        skipped: 0,
        timeouts: 0,
        counterexamples: Vec::new(),
        seed: cfg.seed,
        config: cfg.to_json(),
    };
    for (t, o) in outcomes.into_iter().enumerate() {
        match o? {
            Trial::Found => report.found += 1,
            Trial::Skipped => report.skipped += 1,
            Trial::Counterexample(c) => report.counterexamples.push((t as u64, c)),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{F2, F3};

    fn cfg(statement: u8, dim: usize, trials: usize, seed: u64) -> FuzzConfig {
        FuzzConfig { statement, dim, trials, seed, ..FuzzConfig::default() }
    }

    #[test]
    fn trivial_relation_has_no_counterexamples() {
        // Only 0 is related to anything, so x, y, z are supported on zero tuples.
        let c = FuzzConfig { generators: 0, ..cfg(1, 2, 100, 1) };
        let r = fuzz::<F2>(&c).unwrap();
        assert!(r.counterexamples.is_empty());
        assert_eq!(r.found + r.skipped, 100);
    }

    #[test]
    fn zero_w_is_witnessed_by_zero() {
        let s = LocalitySpace::<F3>::trivial(2);
        let params = Params::Tensor { degree: 1 };
        let span = FreeSpan::build(&s, &params).unwrap();
        let e1 = vec![vec![F3::new(1), F3::new(0)]];
        let inst = ConjInstance {
            space: s,
            params,
            x: [(e1, F3::new(1))].into_iter().collect(),
            y: BTreeMap::new(),
            z: BTreeMap::new(),
            w: BTreeMap::new(),
            cap: 2,
        };
        assert!(check_instance(&span, &inst).unwrap());
        match witness_search(&inst).unwrap() {
            Search::Found { w_prime } => assert!(check_correction(&span, &inst, &w_prime).unwrap()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn full_relation_always_corrects() {
        let s = LocalitySpace::<F2>::from_blocks(2, vec![(Subspace::full(2), Subspace::full(2))]).unwrap();
        let span = FreeSpan::build(&s, &Params::Tensor { degree: 2 }).unwrap();
        assert_eq!(span.len(), 1 + 4 + 16);
        for t in 0..span.len() {
            assert_eq!(span.related_to_all(&[t]).len(), span.len());
        }
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let c = cfg(2, 2, 40, 7);
        let a = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| fuzz::<F3>(&c).unwrap());
        let b = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(|| fuzz::<F3>(&c).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn instances_satisfy_invariants_and_round_trip() {
        for st in 1..=3u8 {
            let c = FuzzConfig { lie: LieChoice::Alternate, ..cfg(st, 3, 6, 42) };
            let c = if st == 2 { FuzzConfig { dim: 2, ..c } } else { c };
            for t in 0..6 {
                let Some(inst) = sample_instance::<F2>(&c, t).unwrap() else { continue };
                let span = FreeSpan::build(&inst.space, &inst.params).unwrap();
                assert!(check_instance(&span, &inst).unwrap());
                let back = instance_from_json::<F2>(&instance_to_json(&inst)).unwrap();
                assert_eq!(back, inst);
                if let Search::Found { w_prime } = witness_search(&inst).unwrap() {
                    assert!(check_correction(&span, &inst, &w_prime).unwrap());
                }
            }
        }
    }

    #[test]
    fn tampered_certificate_fails_replay() {
        let s = LocalitySpace::<F2>::trivial(1);
        let params = Params::Tensor { degree: 1 };
        let one = vec![vec![F2::new(1)]];
        let inst = ConjInstance {
            space: s,
            params,
            x: [(one, F2::new(1))].into_iter().collect(),
            y: BTreeMap::new(),
            z: BTreeMap::new(),
            w: BTreeMap::new(),
            cap: 1,
        };
        // The candidate set is everything, so no functional separates π(x).
        let fake = ConjCertificate { instance: inst, functional: vec![F2::new(0), F2::new(1)] };
        assert!(!fake.replay().unwrap());
    }

    #[test]
    fn rejects_bad_config() {
        assert!(fuzz::<crate::F5>(&cfg(1, 2, 1, 0)).is_err());
        assert!(fuzz::<F2>(&cfg(4, 2, 1, 0)).is_err());
        assert!(fuzz::<F2>(&FuzzConfig { lie: LieChoice::Family, ..cfg(3, 2, 1, 0) }).is_err());
        assert!(fuzz::<F3>(&FuzzConfig { degree: 3, ..cfg(2, 3, 1, 0) }).is_err());
    }
}
