//! Quotient localities, the H_u criterion, locality compatibility and strong
//! locality complements.
//!
//! Quotient coordinates: `V/W` is identified with the free (non-pivot) positions
//! of `W`'s echelon basis, see [`Subspace::quotient_coords`].

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use crate::certificate::{CertKind, Certificate};
use crate::error::{check_dim, Error, Result};
use crate::exactla::{add, dot, neg, solve, sub, zero_vec, LinMap, Subspace, Vector};
use crate::fin::{self, BitSet};
use crate::locality::{grid_search, Block, LocalitySpace, OrthoForm, PairSet, Relation};
use crate::scalar::Scalar;
use crate::Verdict;

/// `V/W` with the final locality relation: `[u] ⊤̄ [v]` iff some representatives are related.
#[derive(Clone, Debug)]
pub struct QuotientSpace<S: Scalar> {
    pub parent: LocalitySpace<S>,
    pub w: Subspace<S>,
    pub space: LocalitySpace<S>,
}

impl<S: Scalar> QuotientSpace<S> {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn class_of(&self, v: &[S]) -> Vector<S> {
        self.w.quotient_coords(v)
    }

    pub fn lift(&self, q: &[S]) -> Vector<S> {
        self.w.lift(q)
    }

    /// Basis of the complement used as a section of the quotient map.
    pub fn section(&self) -> Subspace<S> {
        self.w.std_complement()
    }
}

/// Quotient locality. Blocks project blockwise (representatives of a class can be chosen
/// independently in each factor); orthogonality relations are handled in closed form;
/// pair relations are enumerated.
pub fn quotient_locality<S: Scalar>(s: &LocalitySpace<S>, w: &Subspace<S>) -> Result<QuotientSpace<S>> {
    check_dim(s.dim(), w.ambient())?;
    let m = s.dim() - w.dim();
    let space = match s.relation() {
        Relation::Blocks(bs) => {
            LocalitySpace::from_blocks(m, bs.iter().map(|b| (b.left.project(w), b.right.project(w))).collect())?
        }
        Relation::Ortho(o) => ortho_quotient(o, w, m)?,
        Relation::Pairs(_) => return quotient_by_enumeration(s, w),
    };
    Ok(QuotientSpace { parent: s.clone(), w: w.clone(), space })
}

/// If `G` or an escape functional is nonzero on `W` every pair of classes has related
/// representatives. Otherwise `(u+w1)ᵀG(v+w2) = uᵀGv + uᵀGw2 + w1ᵀGv`, so classes whose
/// functionals `uᵀG|_W` are nonzero relate to everything: these become escape functionals.
fn ortho_quotient<S: Scalar>(o: &OrthoForm<S>, w: &Subspace<S>, m: usize) -> Result<LocalitySpace<S>> {
    let wb = w.basis();
    let g_on_w = wb.iter().any(|a| wb.iter().any(|b| !o.form(a, b).is_zero()));
    let esc_on_w = o.escape.iter().any(|l| wb.iter().any(|b| !dot(l, b).is_zero()));
    if g_on_w || esc_on_w {
        return Ok(LocalitySpace::trivial(m));
    }
    let section: Vec<Vector<S>> = (0..m).map(|i| w.lift(&crate::exactla::unit(m, i))).collect();
    let gram = section.iter().map(|x| section.iter().map(|y| o.form(x, y)).collect()).collect();
    let mut escape: Vec<Vector<S>> = o.escape.iter().map(|l| section.iter().map(|x| dot(l, x)).collect()).collect();
    for b in wb {
        escape.push(section.iter().map(|x| o.form(x, b)).collect());
    }
    LocalitySpace::ortho_escaped(gram, escape)
}

/// Direct enumeration of `[u] ⊤̄ [v] ⇔ ∃ u' ∈ [u], v' ∈ [v]: u' ⊤ v'`; finite fields only.
pub fn quotient_by_enumeration<S: Scalar>(s: &LocalitySpace<S>, w: &Subspace<S>) -> Result<QuotientSpace<S>> {
    check_dim(s.dim(), w.ambient())?;
    let n = s.dim();
    let m = n - w.dim();
    let idx = s.index()?;
    let qsize = fin::space_size::<S>(m)? as usize;
    let qclass: Vec<usize> =
        (0..idx.size()).map(|v| fin::encode(&w.quotient_coords(&fin::decode::<S>(v as u64, n))) as usize).collect();
    // Per relation class, the set of quotient classes it meets.
    let members = idx.members();
    let mut meets = vec![BitSet::new(qsize); idx.classes()];
    for (c, ms) in members.iter().enumerate() {
        for &v in ms {
            meets[c].set(qclass[v]);
        }
    }
    let mut ps = PairSet::empty(m, qsize);
    for c in 0..idx.classes() {
        for d in idx.adj[c].iter() {
            for a in meets[c].iter() {
                for b in meets[d].iter() {
                    ps.insert(a, b);
                }
            }
        }
    }
    Ok(QuotientSpace { parent: s.clone(), w: w.clone(), space: LocalitySpace::from_pair_set(ps)? })
}

/// Whether the quotient locality is a locality relation, with a certificate on failure.
pub fn is_locality_quotient<S: Scalar>(s: &LocalitySpace<S>, w: &Subspace<S>) -> Result<Verdict<Certificate<S>>> {
    let q = quotient_locality(s, w)?;
    Ok(match q.space.is_locality() {
        Verdict::Holds => Verdict::Holds,
        Verdict::Unknown(r) => Verdict::Unknown(r),
        Verdict::Fails(pw) => Verdict::Fails(Certificate::new(
            s,
            CertKind::NotLocalityQuotient {
                w: w.clone(),
                u: q.lift(&pw.u),
                a: pw.a.as_ref().map(|a| q.lift(a)),
                b: pw.b.as_ref().map(|b| q.lift(b)),
                lambda: pw.lambda,
                mu: pw.mu,
            },
        )),
    })
}

/// `H_u = ⋃_{u' ∈ [u]} π(P(u'))` must be closed under addition for every class; finite fields only.
/// Returns a failing class and two summands when it is not.
pub fn hu_criterion<S: Scalar>(
    s: &LocalitySpace<S>,
    w: &Subspace<S>,
) -> Result<Verdict<(Vector<S>, Vector<S>, Vector<S>)>> {
    check_dim(s.dim(), w.ambient())?;
    if !S::is_finite() {
        return Err(Error::Unsupported("the H_u criterion is evaluated by enumeration over F_p".into()));
    }
    let n = s.dim();
    let m = n - w.dim();
    let idx = s.index()?;
    let qsize = fin::space_size::<S>(m)? as usize;
    let qclass: Vec<usize> =
        (0..idx.size()).map(|v| fin::encode(&w.quotient_coords(&fin::decode::<S>(v as u64, n))) as usize).collect();
    let members = idx.members();
    let mut meets = vec![BitSet::new(qsize); idx.classes()];
    for (c, ms) in members.iter().enumerate() {
        for &v in ms {
            meets[c].set(qclass[v]);
        }
    }
    // π(P(u')) depends only on the relation class of u'.
    let proj_polar: Vec<BitSet> = (0..idx.classes())
        .map(|c| {
            let mut b = BitSet::new(qsize);
            for d in idx.adj[c].iter() {
                b.union_with(&meets[d]);
            }
            b
        })
        .collect();
    let mut hu = vec![BitSet::new(qsize); qsize];
    for v in 0..idx.size() {
        hu[qclass[v]].union_with(&proj_polar[idx.class[v] as usize]);
    }
    let qadd: Vec<Vec<usize>> = {
        let els: Vec<Vector<S>> = (0..qsize).map(|i| fin::decode(i as u64, m)).collect();
        els.iter().map(|a| els.iter().map(|b| fin::encode(&add(a, b)) as usize).collect()).collect()
    };
    for (u, h) in hu.iter().enumerate() {
        for a in h.iter() {
            for b in h.iter() {
                if !h.get(qadd[a][b]) {
                    return Ok(Verdict::Fails((
                        fin::decode(u as u64, m),
                        fin::decode(a as u64, m),
                        fin::decode(b as u64, m),
                    )));
                }
            }
        }
    }
    Ok(Verdict::Holds)
}

/// A violation of compatibility: `x ⊤ y`, `(x+w) ⊤ z`, `w ∈ W`, and no `w' ∈ W` relates
/// `x + w'` to both `y` and `z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatWitness<S: Scalar> {
    pub x: Vector<S>,
    pub y: Vector<S>,
    pub z: Vector<S>,
    pub w: Vector<S>,
}

/// Some `w' ∈ W` with `(x+w') ⊤ y` and `(x+w') ⊤ z`, decided exactly.
pub fn exists_correction<S: Scalar>(
    s: &LocalitySpace<S>,
    w: &Subspace<S>,
    x: &[S],
    y: &[S],
    z: &[S],
) -> Result<Option<Vector<S>>> {
    let n = s.dim();
    match s.relation() {
        Relation::Blocks(_) => {
            // x + w' ∈ P(y) ∩ P(z), a finite union of subspaces K; solvable iff x ∈ K + W.
            let p = s.polar(&[y.to_vec(), z.to_vec()])?;
            let crate::locality::Polar::Union(ks) = p.set else { unreachable!() };
            for k in ks {
                if let Some(wp) = correction_into(&k, w, x) {
                    return Ok(Some(wp));
                }
            }
            Ok(None)
        }
        Relation::Ortho(o) => {
            if o.escape.iter().any(|l| !dot(l, x).is_zero()) {
                return Ok(Some(zero_vec(n)));
            }
            if let Some(b) = w.basis().iter().find(|b| o.escape.iter().any(|l| !dot(l, b).is_zero())) {
                return Ok(Some(b.clone()));
            }
            let free = |v: &[S]| o.escape.iter().any(|l| !dot(l, v).is_zero());
            let rows: Vec<Vector<S>> = [y, z].into_iter().filter(|v| !free(v)).map(|v| o.row(v)).collect();
            let k = Subspace::of(n, &crate::exactla::nullspace(&rows, n)?);
            Ok(correction_into(&k, w, x))
        }
        Relation::Pairs(_) => {
            for wp in w.elements() {
                let xw = add(x, &wp);
                if s.rel(&xw, y) && s.rel(&xw, z) {
                    return Ok(Some(wp));
                }
            }
            Ok(None)
        }
    }
}

/// `w' ∈ W` with `x + w' ∈ K`, if any.
fn correction_into<S: Scalar>(k: &Subspace<S>, w: &Subspace<S>, x: &[S]) -> Option<Vector<S>> {
    let n = k.ambient();
    let cols: Vec<&Vector<S>> = k.basis().iter().chain(w.basis()).collect();
    let rows: Vec<Vector<S>> = (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    let c = solve(&rows, cols.len(), &neg(x)).expect("shapes agree")?;
    // x + Σ c_w w = -Σ c_k k ∈ K
    Some(w.combine(&c[k.dim()..]))
}

/// Search budget for symbolic compatibility checks: coefficients of `w` over the
/// basis of `W` range over `{-w_radius..w_radius}`.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub w_radius: i64,
    pub max_candidates: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { w_radius: 2, max_candidates: 400 }
    }
}

/// Locality compatibility of `W` with the relation.
///
/// Over `F_p` the check is exhaustive and decisive: inside each coset `x + W` the sets
/// `M(y) = {x' ∈ x + W : x' ⊤ y}` depend only on the class of `y`, and compatibility holds iff
/// all nonempty such sets in a coset meet pairwise. Over `Q` structured candidates are searched
/// and every candidate is decided exactly; without a witness the answer is `Unknown` unless a
/// decisive shortcut applies.
pub fn is_compatible<S: Scalar>(
    s: &LocalitySpace<S>,
    w: &Subspace<S>,
    budget: Budget,
) -> Result<Verdict<CompatWitness<S>>> {
    check_dim(s.dim(), w.ambient())?;
    if w.is_zero() || w.is_full() {
        return Ok(Verdict::Holds);
    }
    if S::is_finite() {
        return compatible_exhaustive(s, w);
    }
    let cands = candidate_vectors(s, budget.max_candidates);
    let mut ws = Vec::new();
    grid_search::<S, ()>(w.dim(), budget.w_radius, |c| {
        ws.push(w.combine(c));
        None
    });
    let keyed = Keyed::new(s);
    let keys: Vec<Key<S>> = cands.iter().map(|c| keyed.key(c)).collect();
    let found = cands.par_iter().enumerate().find_map_first(|(_, x)| -> Option<Result<CompatWitness<S>>> {
        let kx = keyed.key(x);
        let xw_keys: Vec<Key<S>> = ws.iter().map(|wv| keyed.key(&add(x, wv))).collect();
        let mut corrections: HashMap<(Key<S>, Key<S>), bool> = HashMap::new();
        for (y, ky) in cands.iter().zip(&keys) {
            if !keyed.rel(&kx, ky) {
                continue;
            }
            for (wv, kxw) in ws.iter().zip(&xw_keys) {
                for (z, kz) in cands.iter().zip(&keys) {
                    if !keyed.rel(kxw, kz) {
                        continue;
                    }
                    let ok = match corrections.get(&(ky.clone(), kz.clone())) {
                        Some(&b) => b,
                        None => {
                            let b = match exists_correction(s, w, x, y, z) {
                                Ok(c) => c.is_some(),
                                Err(e) => return Some(Err(e)),
                            };
                            corrections.insert((ky.clone(), kz.clone()), b);
                            b
                        }
                    };
                    if !ok {
                        return Some(Ok(CompatWitness { x: x.clone(), y: y.clone(), z: z.clone(), w: wv.clone() }));
                    }
                }
            }
        }
        None
    });
    if let Some(r) = found {
        return Ok(Verdict::Fails(r?));
    }
    if let StrongComplement::Found { .. } = strong_complement(s, w)? {
        return Ok(Verdict::Holds);
    }
    Ok(Verdict::Unknown("no violation among sampled candidates".into()))
}

/// For a blocks relation, whether two vectors are related depends only on which block sides
/// contain them; `Key::Sig` records that. Other relations use the vector itself.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Key<S: Scalar> {
    Sig(Vec<bool>),
    Raw(Vector<S>),
}

struct Keyed<'a, S: Scalar> {
    s: &'a LocalitySpace<S>,
    sides: Vec<Subspace<S>>,
    blocks: Vec<(usize, usize)>,
}

impl<'a, S: Scalar> Keyed<'a, S> {
    fn new(s: &'a LocalitySpace<S>) -> Self {
        let sides = s.sides();
        let blocks = match s.relation() {
            Relation::Blocks(bs) => bs
                .iter()
                .map(|b| {
                    let pos = |x: &Subspace<S>| sides.iter().position(|t| t == x).expect("side listed");
                    (pos(&b.left), pos(&b.right))
                })
                .collect(),
            _ => vec![],
        };
        Keyed { s, sides, blocks }
    }

    fn key(&self, v: &[S]) -> Key<S> {
        match self.s.relation() {
            Relation::Blocks(_) => Key::Sig(self.sides.iter().map(|t| t.contains(v)).collect()),
            _ => Key::Raw(v.to_vec()),
        }
    }

    fn rel(&self, a: &Key<S>, b: &Key<S>) -> bool {
        match (a, b) {
            (Key::Sig(x), Key::Sig(y)) => self.blocks.iter().any(|&(l, r)| (x[l] && y[r]) || (x[r] && y[l])),
            (Key::Raw(x), Key::Raw(y)) => self.s.rel(x, y),
            _ => unreachable!("keys come from one relation"),
        }
    }
}

/// Candidate vectors in lexicographic order: the coordinate grid `{0, 1, -1}^n` (small
/// dimensions), then block side basis vectors and their pairwise sums and differences.
fn candidate_vectors<S: Scalar>(s: &LocalitySpace<S>, cap: usize) -> Vec<Vector<S>> {
    let n = s.dim();
    let mut out: Vec<Vector<S>> = Vec::new();
    let mut seen = HashSet::new();
    let mut push = |v: Vector<S>, out: &mut Vec<Vector<S>>| {
        if out.len() < cap && seen.insert(v.clone()) {
            out.push(v);
        }
    };
    if n <= 4 {
        grid_search::<S, ()>(n, 1, |v| {
            push(v.to_vec(), &mut out);
            None
        });
    } else {
        push(zero_vec(n), &mut out);
    }
    let gens: Vec<Vector<S>> = s.sides().iter().flat_map(|x| x.basis().to_vec()).collect();
    for g in &gens {
        push(g.clone(), &mut out);
    }
    for a in &gens {
        for b in &gens {
            push(add(a, b), &mut out);
            push(sub(a, b), &mut out);
        }
    }
    out
}

fn compatible_exhaustive<S: Scalar>(s: &LocalitySpace<S>, w: &Subspace<S>) -> Result<Verdict<CompatWitness<S>>> {
    let n = s.dim();
    let m = n - w.dim();
    let idx = s.index()?;
    let welems = w.elements();
    let qsize = fin::space_size::<S>(m)?;
    let k = idx.classes();
    let found = (0..qsize).into_par_iter().find_map_first(|qi| {
        let x0 = w.lift(&fin::decode::<S>(qi, m));
        let coset: Vec<usize> = welems.iter().map(|e| fin::encode(&add(&x0, e)) as usize).collect();
        // Elements of the coset grouped by relation class.
        let mut by_class = vec![BitSet::new(coset.len()); k];
        for (i, &v) in coset.iter().enumerate() {
            by_class[idx.class[v] as usize].set(i);
        }
        let present: Vec<usize> = (0..k).filter(|&c| !by_class[c].is_empty()).collect();
        let masks: Vec<BitSet> = (0..k)
            .map(|c| {
                let mut mk = BitSet::new(coset.len());
                for &d in &present {
                    if idx.adj[c].get(d) {
                        mk.union_with(&by_class[d]);
                    }
                }
                mk
            })
            .collect();
        for c1 in 0..k {
            if masks[c1].is_empty() {
                continue;
            }
            for c2 in c1 + 1..k {
                if !masks[c2].is_empty() && !masks[c1].intersects(&masks[c2]) {
                    let a = masks[c1].iter().next().expect("nonempty");
                    let b = masks[c2].iter().next().expect("nonempty");
                    let x = add(&x0, &welems[a]);
                    return Some(CompatWitness {
                        x,
                        y: fin::decode(idx.reps[c1] as u64, n),
                        z: fin::decode(idx.reps[c2] as u64, n),
                        w: sub(&welems[b], &welems[a]),
                    });
                }
            }
        }
        None
    });
    Ok(match found {
        Some(wit) => Verdict::Fails(wit),
        None => Verdict::Holds,
    })
}

/// Outcome of the strong complement search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrongComplement<S: Scalar> {
    /// A complement `W̃` with `π ⊤ Id`, where `π` projects onto `W` along `W̃`.
    Found {
        complement: Subspace<S>,
        projection: LinMap<S>,
    },
    None,
    Unknown(String),
}

impl<S: Scalar> StrongComplement<S> {
    pub fn label(&self) -> &'static str {
        match self {
            StrongComplement::Found { .. } => "found",
            StrongComplement::None => "none",
            StrongComplement::Unknown(_) => "unknown",
        }
    }
}

/// Complements of `W` are graphs over the standard complement `b_1..b_k`; the projection
/// onto `W` is fixed by `t_i = π(b_i) ∈ W`. Writing `x = w + Σ r_i b_i`, the condition
/// `π ⊤ Id` reads `w + Σ r_i t_i ∈ P(P(x))` for every `x`.
pub fn strong_complement<S: Scalar>(s: &LocalitySpace<S>, w: &Subspace<S>) -> Result<StrongComplement<S>> {
    check_dim(s.dim(), w.ambient())?;
    let n = s.dim();
    let free = w.free_positions();
    let found = |ts: &[Vector<S>]| -> Result<StrongComplement<S>> {
        let projection = projection_from_images(w, &free, ts);
        let complement = projection.kernel();
        Ok(StrongComplement::Found { complement, projection })
    };
    if S::is_finite() {
        let idx = s.index()?;
        let k = idx.classes();
        let pp: Vec<BitSet> = (0..k)
            .map(|c| {
                let mut acc = BitSet::new(k);
                for d in 0..k {
                    acc.set(d);
                }
                for e in idx.adj[c].iter() {
                    acc.intersect_with(&idx.adj[e]);
                }
                acc
            })
            .collect();
        let cs = ComplementSearch { idx: &idx, pp, w, welems: w.elements(), m: free.len() };
        // Single-variable filtering, then most constrained variable first.
        let domains: Vec<Vec<usize>> = (0..cs.m)
            .map(|i| {
                (0..cs.welems.len())
                    .filter(|&t| {
                        let mut ts = vec![None; cs.m];
                        ts[i] = Some(t);
                        cs.consistent(&[], i, &ts)
                    })
                    .collect()
            })
            .collect();
        let mut order: Vec<usize> = (0..cs.m).collect();
        order.sort_by_key(|&i| (domains[i].len(), i));
        let mut ts = vec![None; cs.m];
        if cs.search(&order, &domains, &mut ts) {
            let tv: Vec<Vector<S>> = ts.iter().map(|t| cs.welems[t.expect("complete")].clone()).collect();
            return found(&tv);
        }
        return Ok(StrongComplement::None);
    }
    // Symbolic: images drawn from a pool of W-vectors; each candidate is decided exactly when
    // the relation admits a decisive independence test.
    let mut pool: Vec<Vector<S>> = vec![zero_vec(n)];
    let mut seen: HashSet<Vector<S>> = pool.iter().cloned().collect();
    let mut add_pool = |v: Vector<S>, pool: &mut Vec<Vector<S>>| {
        if w.contains(&v) && seen.insert(v.clone()) {
            pool.push(v);
        }
    };
    for b in w.basis() {
        add_pool(b.clone(), &mut pool);
        add_pool(neg(b), &mut pool);
    }
    for side in s.sides() {
        for v in side.intersect(w).basis() {
            add_pool(v.clone(), &mut pool);
            add_pool(neg(v), &mut pool);
        }
    }
    let k = free.len();
    let total = (pool.len() as u64).checked_pow(k as u32).unwrap_or(u64::MAX);
    if total > 20_000 {
        return Ok(StrongComplement::Unknown("candidate pool too large".into()));
    }
    let mut any_unknown = false;
    for mut code in 0..total {
        let mut ts = Vec::with_capacity(k);
        for _ in 0..k {
            ts.push(pool[(code % pool.len() as u64) as usize].clone());
            code /= pool.len() as u64;
        }
        let pi = projection_from_images(w, &free, &ts);
        let id = LinMap::identity(n);
        let holds = match s.decide_independence(s, &pi, &id) {
            Some(b) => b,
            None => match s.independent_maps(s, &pi, &id)? {
                Verdict::Holds => true,
                Verdict::Unknown(_) => {
                    any_unknown = true;
                    false
                }
                Verdict::Fails(_) => false,
            },
        };
        if holds {
            return found(&ts);
        }
    }
    let why = if any_unknown { "some pooled candidates were undecided" } else { "the search is incomplete over Q" };
    Ok(StrongComplement::Unknown(format!("no strong complement among pooled candidates; {why}")))
}

/// The projection onto `W` with `π(w) = w` and `π(e_{free[i]}) = ts[i]`.
fn projection_from_images<S: Scalar>(w: &Subspace<S>, free: &[usize], ts: &[Vector<S>]) -> LinMap<S> {
    let n = w.ambient();
    let cols: Vec<Vector<S>> = (0..n)
        .map(|j| {
            let e = crate::exactla::unit::<S>(n, j);
            // e = (e - lift(q)) + Σ q_i e_{free[i]} with e - lift(q) ∈ W.
            let q = w.quotient_coords(&e);
            let mut img = sub(&e, &w.lift(&q));
            for (qi, t) in q.iter().zip(ts) {
                img = add(&img, &crate::exactla::scale(qi, t));
            }
            img
        })
        .collect();
    let _ = free;
    LinMap::from_columns(n, &cols)
}

/// Constraint data for the finite strong complement search.
struct ComplementSearch<'a, S: Scalar> {
    idx: &'a crate::locality::RelIndex,
    /// `pp[c]`: classes inside `P(P(x))` for `x` in class `c`.
    pp: Vec<BitSet>,
    w: &'a Subspace<S>,
    welems: Vec<Vector<S>>,
    m: usize,
}

impl<S: Scalar> ComplementSearch<'_, S> {
    /// Checks `π(x) ∈ P(P(x))` for every `x = w0 + Σ r_i b_i` whose support contains `new`
    /// and lies in `assigned ∪ {new}`; `ts[i]` is the image of `b_i` when assigned.
    fn consistent(&self, assigned: &[usize], new: usize, ts: &[Option<usize>]) -> bool {
        let n = self.w.ambient();
        let q = S::order().expect("finite");
        let k = assigned.len();
        for rcode in 0..q.pow(k as u32) {
            let r = fin::decode::<S>(rcode, k);
            for last in 1..q {
                let mut qv = vec![S::zero(); self.m];
                let mut pimg = zero_vec::<S>(n);
                for (ri, &i) in r.iter().zip(assigned) {
                    qv[i] = ri.clone();
                    pimg = add(&pimg, &crate::exactla::scale(ri, &self.welems[ts[i].expect("assigned")]));
                }
                let rl = S::from_index(last);
                qv[new] = rl.clone();
                pimg = add(&pimg, &crate::exactla::scale(&rl, &self.welems[ts[new].expect("assigned")]));
                let base = self.w.lift(&qv);
                for w0 in &self.welems {
                    let cx = self.idx.class[fin::encode(&add(&base, w0)) as usize] as usize;
                    let cp = self.idx.class[fin::encode(&add(&pimg, w0)) as usize] as usize;
                    if !self.pp[cx].get(cp) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn search(&self, order: &[usize], domains: &[Vec<usize>], ts: &mut Vec<Option<usize>>) -> bool {
        let depth = ts.iter().filter(|t| t.is_some()).count();
        if depth == order.len() {
            return true;
        }
        let var = order[depth];
        for &t in &domains[var] {
            ts[var] = Some(t);
            if self.consistent(&order[..depth], var, ts) && self.search(order, domains, ts) {
                return true;
            }
            ts[var] = None;
        }
        false
    }
}

/// The four equivalent conditions for `W̃` to be a strong locality complement of `W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongCheck {
    /// `π ⊤ π` and `π ⊤ π̃`
    pub c1: Option<bool>,
    /// `π ⊤ Id`
    pub c2: Option<bool>,
    /// `π̃ ⊤ π̃` and `π ⊤ π̃`
    pub c3: Option<bool>,
    /// `π̃ ⊤ Id`
    pub c4: Option<bool>,
}

impl StrongCheck {
    pub fn consistent(&self) -> bool {
        let vals: Vec<bool> = [self.c1, self.c2, self.c3, self.c4].into_iter().flatten().collect();
        vals.windows(2).all(|p| p[0] == p[1])
    }

    pub fn holds(&self) -> Option<bool> {
        if !self.consistent() {
            return None;
        }
        [self.c1, self.c2, self.c3, self.c4].into_iter().flatten().next()
    }
}

pub fn check_strong<S: Scalar>(s: &LocalitySpace<S>, w: &Subspace<S>, wt: &Subspace<S>) -> Result<StrongCheck> {
    let n = s.dim();
    let pi = LinMap::projection(w, wt)?;
    let pit = LinMap::projection(wt, w)?;
    let id = LinMap::identity(n);
    let ind = |f: &LinMap<S>, g: &LinMap<S>| -> Result<Option<bool>> { Ok(s.independent_maps(s, f, g)?.as_bool()) };
    let and = |a: Option<bool>, b: Option<bool>| match (a, b) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    };
    let pp = ind(&pi, &pi)?;
    let ppt = ind(&pi, &pit)?;
    let ptpt = ind(&pit, &pit)?;
    Ok(StrongCheck { c1: and(pp, ppt), c2: ind(&pi, &id)?, c3: and(ptpt, ppt), c4: ind(&pit, &id)? })
}

/// For a strong complement `W̃`: `V/W` is a locality space isomorphic to `(W̃, ⊤ ∩ W̃×W̃)`
/// via `[v] ↦ π̃(v)`.
pub fn verify_split_sequence<S: Scalar>(s: &LocalitySpace<S>, w: &Subspace<S>, wt: &Subspace<S>) -> Result<bool> {
    let chk = check_strong(s, w, wt)?;
    if chk.holds() != Some(true) {
        return Err(Error::PreconditionFailed("the complement is not a strong locality complement".into()));
    }
    let q = quotient_locality(s, w)?;
    if !q.space.is_locality().holds() {
        return Ok(false);
    }
    let pit = LinMap::projection(wt, w)?;
    let m = q.dim();
    if m != wt.dim() {
        return Ok(false);
    }
    // T: quotient coordinates -> coordinates in the basis of W̃.
    let cols: Vec<Vector<S>> =
        (0..m).map(|i| wt.coords(&pit.apply(&q.lift(&crate::exactla::unit(m, i)))).expect("image lies in W̃")).collect();
    let t = LinMap::from_columns(m, &cols);
    if !t.kernel().is_zero() {
        return Ok(false);
    }
    let restricted = s.restrict(wt)?;
    let transported = transport(&q.space, &t)?;
    match same_relation(&transported, &restricted) {
        Some(b) => Ok(b),
        None => Err(Error::Unsupported("relation equality is not decidable for this backend".into())),
    }
}

/// The relation `{(T a, T b) : a ⊤ b}` for an invertible `T`.
fn transport<S: Scalar>(s: &LocalitySpace<S>, t: &LinMap<S>) -> Result<LocalitySpace<S>> {
    match s.relation() {
        Relation::Blocks(bs) => {
            LocalitySpace::from_blocks(t.tgt, bs.iter().map(|b| (t.image_of(&b.left), t.image_of(&b.right))).collect())
        }
        _ if S::is_finite() => {
            let p = s.to_pairs()?;
            let pairs =
                p.ps.pairs()
                    .into_iter()
                    .map(|(a, b)| (t.apply(&fin::decode(a as u64, s.dim())), t.apply(&fin::decode(b as u64, s.dim()))));
            LocalitySpace::from_pairs(t.tgt, pairs.collect::<Vec<_>>())
        }
        _ => Err(Error::Unsupported("transport of symbolic orthogonality relations".into())),
    }
}

/// Equality of two relations on the same space, when decidable.
pub fn same_relation<S: Scalar>(a: &LocalitySpace<S>, b: &LocalitySpace<S>) -> Option<bool> {
    if a.dim() != b.dim() {
        return Some(false);
    }
    if S::is_finite() {
        // Compare on representatives of the common refinement of both class partitions.
        let (ia, ib) = (a.index().ok()?, b.index().ok()?);
        let mut reps: HashMap<(u32, u32), usize> = HashMap::new();
        for v in 0..ia.size() {
            reps.entry((ia.class[v], ib.class[v])).or_insert(v);
        }
        let reps: Vec<usize> = reps.into_values().collect();
        return Some(reps.iter().all(|&u| reps.iter().all(|&v| ia.related(u, v) == ib.related(u, v))));
    }
    match (a.relation(), b.relation()) {
        (Relation::Blocks(x), Relation::Blocks(y)) => {
            let inside = |bl: &Block<S>, ys: &[Block<S>]| {
                ys.iter().any(|t| {
                    (bl.left.is_subspace_of(&t.left) && bl.right.is_subspace_of(&t.right))
                        || (bl.left.is_subspace_of(&t.right) && bl.right.is_subspace_of(&t.left))
                })
            };
            Some(x.iter().all(|bl| inside(bl, y)) && y.iter().all(|bl| inside(bl, x)))
        }
        (Relation::Ortho(x), Relation::Ortho(y)) if x.escape.is_empty() && y.escape.is_empty() => {
            let n = a.dim();
            let gx = Subspace::of(n * n, &[x.gram.concat()]);
            let gy = Subspace::of(n * n, &[y.gram.concat()]);
            Some(gx == gy)
        }
        _ => None,
    }
}

/// Compatible ⇒ the quotient is a locality space. Errors when `W` is not (known to be) compatible.
pub fn quotient_of_compatible_is_locality_check<S: Scalar>(s: &LocalitySpace<S>, w: &Subspace<S>) -> Result<bool> {
    if !is_compatible(s, w, Budget::default())?.holds() {
        return Err(Error::PreconditionFailed("subspace is not known to be locality compatible".into()));
    }
    Ok(is_locality_quotient(s, w)?.holds())
}

/// A random locality relation on `F_p^dim`: the closure of a few random pairs.
pub fn random_locality_space<S: Scalar, R: rand::Rng>(
    dim: usize,
    pairs: usize,
    rng: &mut R,
) -> Result<LocalitySpace<S>> {
    let size = fin::space_size::<S>(dim)?;
    let raw: Vec<(Vector<S>, Vector<S>)> = (0..pairs)
        .map(|_| (fin::decode(rng.gen_range(0..size), dim), fin::decode(rng.gen_range(0..size), dim)))
        .collect();
    match LocalitySpace::from_pairs(dim, raw)?.closure() {
        crate::locality::Closure::Exact(c) => Ok(c),
        crate::locality::Closure::Unknown(r) => Err(Error::Inconsistent(r)),
    }
}

/// A random subspace spanned by up to `k` random vectors.
pub fn random_subspace<S: Scalar, R: rand::Rng>(dim: usize, k: usize, rng: &mut R) -> Result<Subspace<S>> {
    let size = fin::space_size::<S>(dim)?;
    let rows: Vec<Vector<S>> = (0..k).map(|_| fin::decode(rng.gen_range(0..size), dim)).collect();
    Subspace::span(dim, &rows)
}

impl<S: Scalar> CompatWitness<S> {
    /// Re-checks the witness: the hypotheses via `related` and membership, the missing
    /// correction by an exact search.
    pub fn replay(&self, s: &LocalitySpace<S>, w: &Subspace<S>) -> Result<bool> {
        let xw = add(&self.x, &self.w);
        Ok(w.contains(&self.w)
            && s.rel(&self.x, &self.y)
            && s.rel(&xw, &self.z)
            && exists_correction(s, w, &self.x, &self.y, &self.z)?.is_none())
    }

    pub fn into_certificate(self, s: &LocalitySpace<S>, w: &Subspace<S>) -> Certificate<S> {
        Certificate::new(s, CertKind::NotCompatible { w: w.clone(), x: self.x, y: self.y, z: self.z, wv: self.w })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::r4;
    use crate::exactla::vec_from_i64 as v;
    use crate::{F5, Q};

    #[test]
    fn euclidean_quotient_by_a_line_is_full() {
        let s = LocalitySpace::<Q>::euclidean(3);
        let w = Subspace::coordinate(3, &[0]);
        let q = quotient_locality(&s, &w).unwrap();
        assert_eq!(same_relation(&q.space, &LocalitySpace::trivial(2)), Some(true));
        assert!(is_locality_quotient(&s, &w).unwrap().holds());
    }

    #[test]
    fn quotient_by_zero_is_unchanged() {
        let s = r4::<Q>();
        let q = quotient_locality(&s, &Subspace::zero(4)).unwrap();
        assert_eq!(same_relation(&q.space, &s), Some(true));
    }

    #[test]
    fn r4_quotient_blocks_match_enumeration() {
        let w = Subspace::coordinate(4, &[3]);
        let sym = quotient_locality(&r4::<F5>(), &w).unwrap();
        let en = quotient_by_enumeration(&r4::<F5>(), &w).unwrap();
        assert_eq!(same_relation(&sym.space, &en.space), Some(true));
        // [e1] and [e2] are related in the quotient.
        let q = quotient_locality(&r4::<Q>(), &Subspace::coordinate(4, &[3])).unwrap();
        assert!(q.space.rel(&q.class_of(&v(&[1, 0, 0, 0])), &q.class_of(&v(&[0, 1, 0, 0]))));
        assert!(q.space.rel(&q.class_of(&v(&[0, 0, 1, 0])), &q.class_of(&v(&[0, 1, 0, 0]))));
    }

    #[test]
    fn hu_on_euclidean_f5() {
        let s = LocalitySpace::<F5>::euclidean(3);
        assert!(hu_criterion(&s, &Subspace::coordinate(3, &[0])).unwrap().holds());
        assert!(hu_criterion(&s, &Subspace::zero(3)).unwrap().holds());
    }

    #[test]
    fn euclidean_plane_is_not_compatible_with_a_line() {
        let s = LocalitySpace::<Q>::euclidean(2);
        let w = Subspace::coordinate(2, &[0]);
        let verdict = is_compatible(&s, &w, Budget::default()).unwrap();
        let wit = verdict.witness().unwrap().clone();
        assert_eq!(wit, CompatWitness { x: v(&[0, 1]), y: v(&[1, 0]), z: v(&[1, -1]), w: v(&[1, 0]) });
        assert!(wit.replay(&s, &w).unwrap());
        let f = LocalitySpace::<F5>::euclidean(2);
        assert!(is_compatible(&f, &Subspace::coordinate(2, &[0]), Budget::default()).unwrap().fails());
    }

    #[test]
    fn trivial_subspaces_are_compatible() {
        let s = LocalitySpace::<Q>::euclidean(3);
        assert!(is_compatible(&s, &Subspace::zero(3), Budget::default()).unwrap().holds());
        assert!(is_compatible(&s, &Subspace::full(3), Budget::default()).unwrap().holds());
    }

    #[test]
    fn strong_complement_examples() {
        let t = LocalitySpace::<F5>::trivial(2);
        let w = Subspace::coordinate(2, &[0]);
        assert!(matches!(strong_complement(&t, &w).unwrap(), StrongComplement::Found { .. }));
        let e = LocalitySpace::<F5>::euclidean(2);
        assert_eq!(strong_complement(&e, &w).unwrap(), StrongComplement::None);
        let tq = LocalitySpace::<Q>::trivial(2);
        let w = Subspace::<Q>::coordinate(2, &[0]);
        let StrongComplement::Found { complement, .. } = strong_complement(&tq, &w).unwrap() else { panic!() };
        assert!(verify_split_sequence(&tq, &w, &complement).unwrap());
        let chk = check_strong(&tq, &w, &complement).unwrap();
        assert_eq!(chk.holds(), Some(true));
    }

    #[test]
    fn euclidean_complement_fails_precondition() {
        let e = LocalitySpace::<F5>::euclidean(2);
        let w = Subspace::coordinate(2, &[0]);
        let wt = Subspace::coordinate(2, &[1]);
        let chk = check_strong(&e, &w, &wt).unwrap();
        assert!(chk.consistent());
        assert_eq!(chk.holds(), Some(false));
        assert!(matches!(verify_split_sequence(&e, &w, &wt), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn ortho_quotient_with_isotropic_subspace_escapes() {
        // Hyperbolic plane G = [[0,1],[1,0]], W = ⟨e1⟩ isotropic.
        let s = LocalitySpace::<Q>::ortho(vec![v(&[0, 1, 0]), v(&[1, 0, 0]), v(&[0, 0, 1])]).unwrap();
        let q = quotient_locality(&s, &Subspace::coordinate(3, &[0])).unwrap();
        let w = Subspace::coordinate(3, &[0]);
        let f = LocalitySpace::<F5>::ortho(vec![v(&[0, 1, 0]), v(&[1, 0, 0]), v(&[0, 0, 1])]).unwrap();
        let qf = quotient_locality(&f, &w).unwrap();
        let en = quotient_by_enumeration(&f, &w).unwrap();
        assert_eq!(same_relation(&qf.space, &en.space), Some(true));
        assert_eq!(q.space.is_locality().as_bool(), qf.space.is_locality().as_bool());
    }
}
