//! Locality tensor products.
//!
//! The standard product `V1 ⊗_⊤ ⋯ ⊗_⊤ Vk` is computed as a subspace of the
//! ordinary Kronecker space `E^{⊗k}` (row-major coordinates): the span of
//! `v1 ⊗ ⋯ ⊗ vk` over pairwise related tuples. The alternative product is a
//! genuine quotient of the free span of related pairs and is built by
//! enumeration. Induced relations on tensor spaces come from Galois-closed sets
//! of the base relation.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::exactla::{kron, kron_all, neg, nullspace, Echelon, LinMap, Subspace, Vector};
use crate::fin::{self, BitSet};
use crate::locality::{grid_search, Cartesian, LocalitySpace, OrthoForm, RelIndex, Relation};
use crate::quotients::same_relation;
use crate::scalar::Scalar;
use crate::Verdict;

/// Largest Kronecker space handled.
pub const MAX_KRONECKER_DIM: usize = 1 << 12;

/// Largest number of Galois-closed sets enumerated for one relation.
pub const MAX_CLOSED_SETS: usize = 4096;

fn kron_dim(n: usize, k: usize) -> Result<usize> {
    match n.checked_pow(k as u32) {
        Some(d) if d <= MAX_KRONECKER_DIM => Ok(d),
        _ => Err(Error::TooLarge(format!("Kronecker space of degree {k} over dimension {n}"))),
    }
}

/// Ordinary tensor product of subspaces, `S^1` for an empty list.
pub fn tensor_all<S: Scalar>(subs: &[Subspace<S>]) -> Subspace<S> {
    subs.iter().fold(Subspace::full(1), |acc, s| acc.tensor(s))
}

fn kron_tuple<S: Scalar>(t: &[Vector<S>]) -> Vector<S> {
    kron_all(&t.iter().map(|v| v.as_slice()).collect::<Vec<_>>())
}

/// `V1 ⊗_⊤ ⋯ ⊗_⊤ Vk` inside `E^{⊗k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocTensorSpace<S: Scalar> {
    pub factors: Vec<Subspace<S>>,
    /// Dimension of the ambient space `E` of the factors.
    pub n: usize,
    /// The product itself, or a certified lower bound when `upper` is set.
    pub basis: Subspace<S>,
    pub upper: Option<Subspace<S>>,
}

impl<S: Scalar> LocTensorSpace<S> {
    pub fn degree(&self) -> usize {
        self.factors.len()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn is_exact(&self) -> bool {
        self.upper.is_none()
    }

    pub fn dim_bounds(&self) -> (usize, usize) {
        (self.basis.dim(), self.upper.as_ref().map_or(self.basis.dim(), |u| u.dim()))
    }

    pub fn exact(&self) -> Result<&Subspace<S>> {
        match &self.upper {
            None => Ok(&self.basis),
            Some(_) => Err(Error::Unsupported("only bounds are known for this locality tensor product".into())),
        }
    }
}

/// Span of the Kronecker images of all `⊤`-tuples in `V1 ×_⊤ ⋯ ×_⊤ Vk`.
pub fn loc_tensor<S: Scalar>(s: &LocalitySpace<S>, factors: &[Subspace<S>]) -> Result<LocTensorSpace<S>> {
    let n = s.dim();
    for f in factors {
        check_dim(n, f.ambient())?;
    }
    let k = factors.len();
    let amb = kron_dim(n, k)?;
    let done = |basis| Ok(LocTensorSpace { factors: factors.to_vec(), n, basis, upper: None });
    if k == 0 {
        return done(Subspace::full(1));
    }
    match s.relation() {
        Relation::Blocks(_) => {
            let Cartesian::Products(ps) = s.loc_cartesian(factors)? else { unreachable!("blocks give products") };
            let parts: Vec<Subspace<S>> = ps.iter().map(|p| tensor_all(p)).collect();
            return done(Subspace::sum_all(amb, &parts));
        }
        Relation::Ortho(o) if !S::is_finite() => return ortho_tensor(o, factors, n),
        _ => {}
    }
    let target = tensor_all(factors).dim();
    let mut ech = Echelon::new(amb);
    for t in s.loc_cartesian(factors)?.tuples() {
        if ech.rank() == target {
            break;
        }
        ech.insert(&kron_tuple(&t));
    }
    done(ech.into_subspace())
}

/// Orthogonality relations over Q. Two factors are exact: a functional vanishing on every
/// `v ⊗ w` with `B(v,w) = 0` is a multiple of `B`. Higher degrees give sampled lower bounds
/// against the common kernel of the pairwise contractions.
fn ortho_tensor<S: Scalar>(o: &OrthoForm<S>, factors: &[Subspace<S>], n: usize) -> Result<LocTensorSpace<S>> {
    if !o.escape.is_empty() {
        return Err(Error::Unsupported("locality tensor products of escaped orthogonality relations over Q".into()));
    }
    let k = factors.len();
    let amb = kron_dim(n, k)?;
    let full = tensor_all(factors);
    let out = |basis, upper| Ok(LocTensorSpace { factors: factors.to_vec(), n, basis, upper });
    if k == 1 {
        return out(full, None);
    }
    let rest = n.pow(k as u32 - 2);
    let mut rows: Vec<Vector<S>> = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let mut block = vec![vec![S::zero(); amb]; rest];
            for (a, _) in full_words(n, k).enumerate() {
                let letters = word_letters(a, n, k);
                let g = &o.gram[letters[i]][letters[j]];
                if g.is_zero() {
                    continue;
                }
                let r =
                    letters.iter().enumerate().filter(|&(p, _)| p != i && p != j).fold(0, |acc, (_, &l)| acc * n + l);
                block[r][a] = block[r][a].clone() + g.clone();
            }
            rows.extend(block);
        }
    }
    let upper = full.intersect(&Subspace::of(amb, &nullspace(&rows, amb)?));
    if k == 2 {
        return out(upper, None);
    }
    let u = Subspace::sum_all(n, factors);
    if k > u.dim() && is_definite(o, &u) {
        // Pairwise orthogonal nonzero vectors of an anisotropic space are independent.
        return out(Subspace::zero(amb), None);
    }
    let mut ech = Echelon::new(amb);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut chosen = Vec::new();
    sample_orthogonal(o, factors, &mut chosen, &mut ech, upper.dim(), &mut rng);
    let lower = ech.into_subspace();
    if lower.dim() == upper.dim() {
        out(lower, None)
    } else {
        out(lower, Some(upper))
    }
}

fn sample_orthogonal<S: Scalar, R: Rng>(
    o: &OrthoForm<S>,
    factors: &[Subspace<S>],
    chosen: &mut Vec<Vector<S>>,
    ech: &mut Echelon<S>,
    target: usize,
    rng: &mut R,
) {
    if ech.rank() == target {
        return;
    }
    let pos = chosen.len();
    if pos == factors.len() {
        ech.insert(&kron_tuple(chosen));
        return;
    }
    let n = factors[pos].ambient();
    let rows: Vec<Vector<S>> = chosen.iter().map(|x| o.row(x)).collect();
    let perp =
        if rows.is_empty() { Subspace::full(n) } else { Subspace::of(n, &nullspace(&rows, n).expect("dims agree")) };
    let u = factors[pos].intersect(&perp);
    let mut cands: Vec<Vector<S>> = u.basis().to_vec();
    for _ in 0..3.min(u.dim()) {
        let c: Vec<S> = (0..u.dim()).map(|_| S::from_i64(rng.gen_range(-2..=2))).collect();
        cands.push(u.combine(&c));
    }
    for c in cands {
        chosen.push(c);
        sample_orthogonal(o, factors, chosen, ech, target, rng);
        chosen.pop();
    }
}

/// Whether the form restricted to `u` is positive or negative definite (over Q).
fn is_definite<S: Scalar>(o: &OrthoForm<S>, u: &Subspace<S>) -> bool {
    let b = u.basis();
    let mut m: Vec<Vector<S>> = b.iter().map(|x| b.iter().map(|y| o.form(x, y)).collect()).collect();
    let d = m.len();
    let mut sign = None;
    for c in 0..d {
        let p = m[c][c].clone();
        if p.is_zero() {
            return false;
        }
        let pos = p > S::zero();
        if *sign.get_or_insert(pos) != pos {
            return false;
        }
        let inv = p.inv().expect("nonzero");
        for r in c + 1..d {
            let f = m[r][c].clone() * inv.clone();
            for j in c..d {
                let t = m[c][j].clone();
                m[r][j] = m[r][j].clone() - f.clone() * t;
            }
        }
    }
    true
}

fn full_words(n: usize, k: usize) -> std::ops::Range<usize> {
    0..n.pow(k as u32)
}

/// Letters of a word index, most significant first.
pub fn word_letters(mut w: usize, n: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for l in out.iter_mut().rev() {
        *l = w % n;
        w /= n;
    }
    out
}

fn word_index(letters: &[usize], n: usize) -> usize {
    letters.iter().fold(0, |acc, &l| acc * n + l)
}

/// Galois-closed sets `P(X)` of a finite relation, as bitsets over its classes.
#[derive(Clone, Debug)]
pub struct Galois {
    pub idx: RelIndex,
    pub closed: Vec<BitSet>,
    /// `polar[c]` is the position of `P(closed[c])`.
    pub polar: Vec<usize>,
}

impl Galois {
    pub fn new(idx: RelIndex) -> Result<Self> {
        let k = idx.classes();
        let mut full = BitSet::new(k);
        for c in 0..k {
            full.set(c);
        }
        let mut gens: Vec<BitSet> = idx.adj.clone();
        gens.sort_by_key(|b| b.iter().collect::<Vec<_>>());
        gens.dedup();
        let mut closed = vec![full];
        let mut pos: HashMap<BitSet, usize> = HashMap::from([(closed[0].clone(), 0)]);
        let mut i = 0;
        while i < closed.len() {
            for g in &gens {
                let mut x = closed[i].clone();
                x.intersect_with(g);
                if !pos.contains_key(&x) {
                    if closed.len() == MAX_CLOSED_SETS {
                        return Err(Error::TooLarge("too many Galois-closed sets".into()));
                    }
                    pos.insert(x.clone(), closed.len());
                    closed.push(x);
                }
            }
            i += 1;
        }
        let polar = closed
            .iter()
            .map(|c| {
                let cs: Vec<usize> = c.iter().collect();
                pos[&idx.polar_classes(&cs)]
            })
            .collect();
        Ok(Galois { idx, closed, polar })
    }

    pub fn contains(&self, c: usize, v: usize) -> bool {
        self.closed[c].get(self.idx.class[v] as usize)
    }
}

/// Enumerated `⊤`-tuples of a finite relation with their Kronecker images.
struct Chains<S: Scalar> {
    tuples: Vec<Vec<usize>>,
    krons: Vec<Vector<S>>,
}

impl<S: Scalar> Chains<S> {
    fn new(s: &LocalitySpace<S>, factors: &[Subspace<S>]) -> Result<Self> {
        if factors.is_empty() {
            return Ok(Chains { tuples: vec![vec![]], krons: vec![vec![S::one()]] });
        }
        let ts = s.loc_cartesian(factors)?.tuples();
        let krons = ts.iter().map(|t| kron_tuple(t)).collect();
        let tuples = ts.iter().map(|t| t.iter().map(|v| fin::encode(v) as usize).collect()).collect();
        Ok(Chains { tuples, krons })
    }

    fn span(&self, amb: usize, keep: impl Fn(&[usize]) -> bool) -> Subspace<S> {
        let mut ech = Echelon::new(amb);
        for (t, k) in self.tuples.iter().zip(&self.krons) {
            if keep(t) {
                ech.insert(k);
            }
        }
        ech.into_subspace()
    }
}

/// The induced relation `⊤_⊗` on a locality tensor product, in coordinates of `T.basis`.
#[derive(Clone, Debug)]
pub struct TensorRelation<S: Scalar> {
    pub space: LocalitySpace<S>,
    /// Whether `⊤_⊗` happens to be a locality relation on this instance.
    pub is_locality: bool,
}

/// `[a] ⊤_⊗ [b]` iff some representatives have supports related entrywise. Maximal such
/// supports are products of Galois-closed sets `C_i` against `P(C_i)`, which gives the
/// relation as a union of blocks `D(C) × D(P(C))`.
pub fn tensor_relation<S: Scalar>(s: &LocalitySpace<S>, t: &LocTensorSpace<S>) -> Result<TensorRelation<S>> {
    if !S::is_finite() {
        return Err(Error::Unsupported("induced tensor relations need a finite field".into()));
    }
    let g = Galois::new(s.index()?)?;
    let chains = Chains::new(s, &t.factors)?;
    let blocks = closed_blocks(&g, &chains, t)?;
    let space = LocalitySpace::from_blocks(t.dim(), blocks)?;
    let is_locality = space.is_locality().holds();
    Ok(TensorRelation { space, is_locality })
}

fn closed_blocks<S: Scalar>(
    g: &Galois,
    chains: &Chains<S>,
    t: &LocTensorSpace<S>,
) -> Result<Vec<(Subspace<S>, Subspace<S>)>> {
    let k = t.degree();
    let amb = t.basis.ambient();
    let to_coords = |sub: Subspace<S>| -> Subspace<S> {
        let rows: Vec<Vector<S>> = sub.basis().iter().map(|b| t.basis.coords(b).expect("inside T")).collect();
        Subspace::of(t.dim(), &rows)
    };
    let m = g.closed.len();
    let combos = m.checked_pow(k as u32).filter(|&c| c <= 1 << 16);
    let Some(combos) = combos else {
        return Err(Error::TooLarge("too many closed-set combinations".into()));
    };
    let mut memo: HashMap<Vec<usize>, Subspace<S>> = HashMap::new();
    let mut d_of = |cs: &[usize]| -> Subspace<S> {
        memo.entry(cs.to_vec())
            .or_insert_with(|| to_coords(chains.span(amb, |tu| tu.iter().zip(cs).all(|(&v, &c)| g.contains(c, v)))))
            .clone()
    };
    let mut blocks = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for code in 0..combos {
        let cs = word_letters(code, m, k);
        let ps: Vec<usize> = cs.iter().map(|&c| g.polar[c]).collect();
        let (a, b) = (d_of(&cs), d_of(&ps));
        if seen.insert((a.clone(), b.clone())) {
            blocks.push((a, b));
        }
    }
    if k == 0 {
        blocks.push((Subspace::full(1), Subspace::full(1)));
    }
    Ok(blocks)
}

/// Whether `f(v) ⊤ w` for every related pair `v ⊤ w` with `v ∈ dom`, `w ∈ wsub`.
pub fn independent_of_identity<S: Scalar>(
    s: &LocalitySpace<S>,
    dom: &Subspace<S>,
    wsub: &Subspace<S>,
    f: &LinMap<S>,
) -> Result<Verdict<(Vector<S>, Vector<S>)>> {
    check_dim(s.dim(), dom.ambient())?;
    check_dim(s.dim(), wsub.ambient())?;
    if S::is_finite() {
        let idx = s.index()?;
        let ws: Vec<(Vector<S>, usize)> =
            wsub.elements().into_iter().map(|w| (w.clone(), fin::encode(&w) as usize)).collect();
        for v in dom.elements() {
            let ev = fin::encode(&v) as usize;
            let ef = fin::encode(&f.apply(&v)) as usize;
            for (w, ew) in &ws {
                if idx.related(ev, *ew) && !idx.related(ef, *ew) {
                    return Ok(Verdict::Fails((v, w.clone())));
                }
            }
        }
        return Ok(Verdict::Holds);
    }
    let decided = match s.relation() {
        Relation::Blocks(bs) => {
            let oriented: Vec<(&Subspace<S>, &Subspace<S>)> =
                bs.iter().flat_map(|b| [(&b.left, &b.right), (&b.right, &b.left)]).collect();
            // Generic elements of P and Q only lie in the sides that contain all of P or Q.
            Some(oriented.iter().all(|(a, b)| {
                let fp = f.image_of(&a.intersect(dom));
                let q = b.intersect(wsub);
                oriented.iter().any(|(l, r)| fp.is_subspace_of(l) && q.is_subspace_of(r))
            }))
        }
        Relation::Ortho(o) if o.escape.is_empty() => {
            // The form `B(f v, w)` must vanish on the zero set of `B(v, w)` on dom × wsub,
            // which over an infinite field means it is a multiple of it.
            let flat = |g: &dyn Fn(&[S]) -> Vector<S>| -> Vector<S> {
                dom.basis()
                    .iter()
                    .flat_map(|v| wsub.basis().iter().map(|w| o.form(&g(v), w)).collect::<Vec<_>>())
                    .collect()
            };
            let base = flat(&|v| v.to_vec());
            let moved = flat(&|v| f.apply(v));
            Some(Subspace::of(base.len(), &[base]).contains(&moved))
        }
        _ => None,
    };
    if decided == Some(true) {
        return Ok(Verdict::Holds);
    }
    let found = (dom.dim() <= 6 && wsub.dim() <= 6)
        .then(|| {
            grid_search(dom.dim(), 1, |cv| {
                let v = dom.combine(cv);
                let fv = f.apply(&v);
                grid_search(wsub.dim(), 1, |cw| {
                    let w = wsub.combine(cw);
                    (s.rel(&v, &w) && !s.rel(&fv, &w)).then(|| (v.clone(), w))
                })
            })
        })
        .flatten();
    Ok(match found {
        Some(w) => Verdict::Fails(w),
        None if decided == Some(false) => Verdict::Unknown("independence fails but no small witness was found".into()),
        None => Verdict::Unknown("no decision procedure for this relation".into()),
    })
}

/// Outcome of a law with a hypothesis, both parts tested independently.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawCheck<S: Scalar> {
    /// A witness is `(i, v, w)`: `v ⊤ w` but not `π_i(v) ⊤ w`.
    pub hypothesis: Verdict<(usize, Vector<S>, Vector<S>)>,
    /// A witness lies in the larger side but not in the smaller one.
    pub conclusion: Verdict<Vector<S>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LawOutcome {
    Holds,
    Fails,
    HypothesisViolated,
    Unknown,
}

impl<S: Scalar> LawCheck<S> {
    pub fn outcome(&self) -> LawOutcome {
        match (&self.hypothesis, &self.conclusion) {
            (Verdict::Fails(_), _) => LawOutcome::HypothesisViolated,
            (_, Verdict::Holds) => LawOutcome::Holds,
            (_, Verdict::Fails(_)) => LawOutcome::Fails,
            _ => LawOutcome::Unknown,
        }
    }
}

fn combine_hypotheses<S: Scalar>(vs: Vec<Verdict<(Vector<S>, Vector<S>)>>) -> Verdict<(usize, Vector<S>, Vector<S>)> {
    let mut unknown = None;
    for (i, v) in vs.into_iter().enumerate() {
        match v {
            Verdict::Fails((a, b)) => return Verdict::Fails((i + 1, a, b)),
            Verdict::Unknown(m) => unknown = Some(m),
            Verdict::Holds => {}
        }
    }
    unknown.map_or(Verdict::Holds, Verdict::Unknown)
}

/// `small ⊆ big` is known; equality or a witness from `big`.
fn compare_spans<S: Scalar>(small: &Subspace<S>, big: &Subspace<S>) -> Verdict<Vector<S>> {
    match big.basis().iter().find(|b| !small.contains(b)) {
        None => Verdict::Holds,
        Some(b) => Verdict::Fails(b.clone()),
    }
}

fn neg_map<S: Scalar>(f: &LinMap<S>) -> LinMap<S> {
    LinMap { src: f.src, tgt: f.tgt, m: f.m.iter().map(|r| neg(r)).collect() }
}

/// Distributivity `(V1 ⊗_⊤ W) ⊕ (V2 ⊗_⊤ W) = V ⊗_⊤ W` for `V = V1 ⊕ V2`, together with its
/// hypothesis that both projections are independent of `Id_W`.
pub fn distributivity_check<S: Scalar>(
    s: &LocalitySpace<S>,
    v1: &Subspace<S>,
    v2: &Subspace<S>,
    w: &Subspace<S>,
) -> Result<LawCheck<S>> {
    if !v1.intersect(v2).is_zero() {
        return Err(Error::PreconditionFailed("V1 and V2 must intersect trivially".into()));
    }
    let v = v1.sum(v2);
    let rest = v.std_complement();
    let p1 = LinMap::projection(v1, &v2.sum(&rest))?;
    let p2 = LinMap::projection(v2, &v1.sum(&rest))?;
    let hypothesis =
        combine_hypotheses(vec![independent_of_identity(s, &v, w, &p1)?, independent_of_identity(s, &v, w, &p2)?]);
    let whole = loc_tensor(s, &[v, w.clone()])?;
    let t1 = loc_tensor(s, &[v1.clone(), w.clone()])?;
    let t2 = loc_tensor(s, &[v2.clone(), w.clone()])?;
    let conclusion = match (whole.exact(), t1.exact(), t2.exact()) {
        (Ok(a), Ok(b), Ok(c)) => compare_spans(&b.sum(c), a),
        _ => Verdict::Unknown("a locality tensor product is only bounded".into()),
    };
    Ok(LawCheck { hypothesis, conclusion })
}

/// Complement of `sub` inside `within`, spanned by basis vectors of `within`.
fn complement_within<S: Scalar>(sub: &Subspace<S>, within: &Subspace<S>) -> Subspace<S> {
    let mut ech = Echelon::new(sub.ambient());
    for b in sub.basis() {
        ech.insert(b);
    }
    let picked: Vec<Vector<S>> = within.basis().iter().filter(|b| ech.insert(b)).cloned().collect();
    Subspace::of(sub.ambient(), &picked)
}

/// `(V1 ∩ V2) ⊗_⊤ W = (V1 ⊗ W) ∩ (V2 ⊗_⊤ W)` (the middle product is the ordinary one), with
/// the hypothesis that the projection `π : V2 → V1 ∩ V2` along `V2'` and `Id − π` are
/// independent of `Id_W`. `V2'` defaults to a complement spanned by basis vectors of `V2`.
pub fn intersection_check<S: Scalar>(
    s: &LocalitySpace<S>,
    v1: &Subspace<S>,
    v2: &Subspace<S>,
    w: &Subspace<S>,
    v2_prime: Option<&Subspace<S>>,
) -> Result<LawCheck<S>> {
    let i = v1.intersect(v2);
    let c = match v2_prime {
        Some(c) => {
            if !i.intersect(c).is_zero() || i.sum(c) != *v2 {
                return Err(Error::PreconditionFailed("V2' must complement V1 ∩ V2 inside V2".into()));
            }
            c.clone()
        }
        None => complement_within(&i, v2),
    };
    let pi = LinMap::projection(&i, &c.sum(&v2.std_complement()))?;
    let rest = LinMap::identity(s.dim()).add(&neg_map(&pi));
    let hypothesis =
        combine_hypotheses(vec![independent_of_identity(s, v2, w, &pi)?, independent_of_identity(s, v2, w, &rest)?]);
    let lhs = loc_tensor(s, &[i, w.clone()])?;
    let t2 = loc_tensor(s, &[v2.clone(), w.clone()])?;
    let conclusion = match (lhs.exact(), t2.exact()) {
        (Ok(a), Ok(b)) => compare_spans(a, &v1.tensor(w).intersect(b)),
        _ => Verdict::Unknown("a locality tensor product is only bounded".into()),
    };
    Ok(LawCheck { hypothesis, conclusion })
}

/// Both sides of the associativity isomorphism `Φ_{m,n}` on `E` itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssocReport {
    pub lhs_dim: usize,
    pub rhs_dim: usize,
    /// `Φ_{m,n}` is the identity in Kronecker coordinates, so bijectivity is equality of spans.
    pub bijective: bool,
    /// `⊤_⊗^{m,n}` and `⊤_{⊗(m+n)}` agree.
    pub relation_preserved: bool,
}

impl AssocReport {
    pub fn holds(&self) -> bool {
        self.bijective && self.relation_preserved
    }
}

/// Builds `(E^{⊗_⊤m}) ⊗_⊤ (E^{⊗_⊤n})` from `⊤_{⊗m,n}`-related pairs with its relation
/// `⊤_⊗^{m,n}`, and compares it with `E^{⊗_⊤(m+n)}` carrying `⊤_{⊗(m+n)}`.
pub fn associativity_check<S: Scalar>(s: &LocalitySpace<S>, m: usize, n: usize) -> Result<AssocReport> {
    if !S::is_finite() {
        return Err(Error::Unsupported("associativity is checked by enumeration over finite fields".into()));
    }
    let d = s.dim();
    let e = Subspace::full(d);
    let a = loc_tensor(s, &vec![e.clone(); m])?;
    let b = loc_tensor(s, &vec![e.clone(); n])?;
    let whole = loc_tensor(s, &vec![e; m + n])?;
    let g = Galois::new(s.index()?)?;
    let cross = CrossSpans::new(s, &g, &[m, n])?;
    // a ⊤_{⊗m,n} b iff a ∈ D_m(C) and b ∈ D_n(P(C)) for a closed C.
    let admissible: Vec<(Subspace<S>, Subspace<S>)> =
        (0..g.closed.len()).map(|c| (cross.parts[c][0].clone(), cross.parts[g.polar[c]][1].clone())).collect();
    let amb = kron_dim(d, m + n)?;
    let lhs = Subspace::sum_all(amb, &admissible.iter().map(|(x, y)| x.tensor(y)).collect::<Vec<_>>());
    let bijective = lhs == whole.basis;
    let mut relation_preserved = false;
    if bijective {
        let ra = tensor_relation(s, &a)?.space;
        let rb = tensor_relation(s, &b)?.space;
        let rhs = tensor_relation(s, &whole)?.space;
        let lhs_rel = pair_relation(&a, &ra, &b, &rb, &admissible, &whole)?;
        relation_preserved = same_relation(&lhs_rel, &rhs) == Some(true);
    }
    Ok(AssocReport { lhs_dim: lhs.dim(), rhs_dim: whole.dim(), bijective, relation_preserved })
}

/// Quotient relation on the span of `a ⊗ b` over admissible pairs, where pairs are related
/// componentwise by the relations `ra` on `A` and `rb` on `B`.
fn pair_relation<S: Scalar>(
    a: &LocTensorSpace<S>,
    ra: &LocalitySpace<S>,
    b: &LocTensorSpace<S>,
    rb: &LocalitySpace<S>,
    admissible: &[(Subspace<S>, Subspace<S>)],
    target: &LocTensorSpace<S>,
) -> Result<LocalitySpace<S>> {
    let (ga, gb) = (Galois::new(ra.index()?)?, Galois::new(rb.index()?)?);
    let ea = a.basis.elements();
    let eb = b.basis.elements();
    let code = |t: &LocTensorSpace<S>, v: &[S]| fin::encode(&t.basis.coords(v).expect("inside")) as usize;
    let mut pairs = Vec::new();
    for x in &ea {
        for y in &eb {
            if admissible.iter().any(|(p, q)| p.contains(x) && q.contains(y)) {
                pairs.push((code(a, x), code(b, y), kron(x, y)));
            }
        }
    }
    let amb = target.basis.ambient();
    let coords = |sub: Subspace<S>| {
        Subspace::of(
            target.dim(),
            &sub.basis().iter().map(|v| target.basis.coords(v).expect("inside")).collect::<Vec<_>>(),
        )
    };
    let span = |ca: usize, cb: usize| {
        let mut ech = Echelon::new(amb);
        for (x, y, k) in &pairs {
            if ga.contains(ca, *x) && gb.contains(cb, *y) {
                ech.insert(k);
            }
        }
        coords(ech.into_subspace())
    };
    let mut blocks = Vec::new();
    for ca in 0..ga.closed.len() {
        for cb in 0..gb.closed.len() {
            blocks.push((span(ca, cb), span(ga.polar[ca], gb.polar[cb])));
        }
    }
    LocalitySpace::from_blocks(target.dim(), blocks)
}

/// `D_k(C)`: span of Kronecker images of `⊤`-chains of length `k` with entries in `C`, for
/// every closed set `C` and each requested length.
struct CrossSpans<S: Scalar> {
    parts: Vec<Vec<Subspace<S>>>,
}

impl<S: Scalar> CrossSpans<S> {
    fn new(s: &LocalitySpace<S>, g: &Galois, degrees: &[usize]) -> Result<Self> {
        let d = s.dim();
        let mut per_degree = Vec::new();
        for &k in degrees {
            let chains = Chains::new(s, &vec![Subspace::full(d); k])?;
            let amb = kron_dim(d, k)?;
            let spans: Vec<Subspace<S>> =
                (0..g.closed.len()).map(|c| chains.span(amb, |t| t.iter().all(|&v| g.contains(c, v)))).collect();
            per_degree.push(spans);
        }
        let parts = (0..g.closed.len()).map(|c| per_degree.iter().map(|sp| sp[c].clone()).collect()).collect();
        Ok(CrossSpans { parts })
    }
}

/// The appendix product `𝕂(V ×_⊤ W) / I_bil,⊤`.
#[derive(Clone, Debug)]
pub struct AltTensorSpace<S: Scalar> {
    /// Related pairs `(v, w)`, the free generators.
    pub generators: Vec<(Vector<S>, Vector<S>)>,
    /// Echelon basis of `I_bil,⊤` in generator coordinates.
    pub relations: Vec<Vector<S>>,
    pub dim: usize,
    /// Generators whose classes form a basis of the quotient.
    pub representatives: Vec<usize>,
}

impl<S: Scalar> AltTensorSpace<S> {
    /// Dimension of the span of the Kronecker images, i.e. of the standard product.
    pub fn standard_dim(&self) -> usize {
        let n = self.generators.first().map_or(0, |(v, w)| v.len() * w.len());
        let mut ech = Echelon::new(n);
        for (v, w) in &self.generators {
            ech.insert(&kron(v, w));
        }
        ech.rank()
    }

    /// Every relation maps to zero in the ordinary tensor product (`I_bil,⊤ ⊆ I_bil`).
    pub fn relations_are_bilinear(&self) -> bool {
        let n = self.generators.first().map_or(0, |(v, w)| v.len() * w.len());
        self.relations.iter().all(|r| {
            let mut acc = vec![S::zero(); n];
            for (c, (v, w)) in r.iter().zip(&self.generators) {
                if !c.is_zero() {
                    for (a, k) in acc.iter_mut().zip(kron(v, w)) {
                        *a = a.clone() + c.clone() * k;
                    }
                }
            }
            acc.iter().all(|x| x.is_zero())
        })
    }
}

/// Linear relations among generators sharing one argument: `(a+b, x) − (a, x) − (b, x)` and
/// `(ka, x) − k(a, x)` with every pair involved related.
fn one_sided_relations<S: Scalar>(
    members: &[(usize, Vector<S>)],
    lookup: &HashMap<Vector<S>, usize>,
    scalars: &[S],
    ech: &mut Echelon<S>,
    ngens: usize,
) {
    let local: HashMap<usize, usize> = members.iter().enumerate().map(|(i, (g, _))| (*g, i)).collect();
    let at = |v: &Vector<S>| lookup.get(v).and_then(|g| local.get(g)).copied();
    let mut block = Echelon::new(members.len());
    let push = |terms: &[(usize, S)], block: &mut Echelon<S>| {
        let mut row = vec![S::zero(); members.len()];
        for (i, c) in terms {
            row[*i] = row[*i].clone() + c.clone();
        }
        block.insert(&row);
    };
    let one = S::one();
    for (i, (_, a)) in members.iter().enumerate() {
        for (j, (_, b)) in members.iter().enumerate().skip(i) {
            let sum: Vector<S> = a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect();
            if let Some(k) = at(&sum) {
                push(&[(k, one.clone()), (i, -one.clone()), (j, -one.clone())], &mut block);
            }
        }
        for c in scalars {
            let ka: Vector<S> = a.iter().map(|x| c.clone() * x.clone()).collect();
            if let Some(k) = at(&ka) {
                push(&[(k, one.clone()), (i, -c.clone())], &mut block);
            }
        }
    }
    for r in block.rows() {
        let mut row = vec![S::zero(); ngens];
        for (i, c) in r.iter().enumerate() {
            row[members[i].0] = c.clone();
        }
        ech.insert(&row);
    }
}

/// `V ⊗^⊤ W`. Each defining relation shares an argument among its terms, so the relation
/// space is assembled from small blocks, one per fixed argument.
pub fn alt_tensor<S: Scalar>(s: &LocalitySpace<S>, v: &Subspace<S>, w: &Subspace<S>) -> Result<AltTensorSpace<S>> {
    if !S::is_finite() {
        return Err(Error::Unsupported("the alternative tensor product is built by enumeration".into()));
    }
    check_dim(s.dim(), v.ambient())?;
    check_dim(s.dim(), w.ambient())?;
    let idx = s.index()?;
    let (ve, we) = (v.elements(), w.elements());
    let mut generators = Vec::new();
    for x in &ve {
        for y in &we {
            if idx.related(fin::encode(x) as usize, fin::encode(y) as usize) {
                generators.push((x.clone(), y.clone()));
            }
        }
    }
    let ng = generators.len();
    let scalars = crate::scalar::field_elements::<S>();
    let mut ech = Echelon::new(ng);
    let mut by_right: BTreeMap<Vector<S>, Vec<(usize, Vector<S>)>> = BTreeMap::new();
    let mut by_left: BTreeMap<Vector<S>, Vec<(usize, Vector<S>)>> = BTreeMap::new();
    for (g, (x, y)) in generators.iter().enumerate() {
        by_right.entry(y.clone()).or_default().push((g, x.clone()));
        by_left.entry(x.clone()).or_default().push((g, y.clone()));
    }
    for members in by_right.values() {
        let lookup = members.iter().map(|(g, x)| (x.clone(), *g)).collect();
        one_sided_relations(members, &lookup, &scalars, &mut ech, ng);
    }
    for members in by_left.values() {
        let lookup = members.iter().map(|(g, y)| (y.clone(), *g)).collect();
        one_sided_relations(members, &lookup, &scalars, &mut ech, ng);
    }
    let full = Subspace::of(ng, ech.rows());
    let representatives = full.free_positions();
    Ok(AltTensorSpace { dim: representatives.len(), relations: full.basis().to_vec(), generators, representatives })
}

/// An element of `T^N_⊤(E)`: one vector per degree, degree `k` in `E^{⊗k}` coordinates.
pub type TElem<S> = Vec<Vector<S>>;

/// An element of `T ⊗ T`, keyed by the bidegree; `(p, q)` lives in `E^{⊗(p+q)}` coordinates.
pub type TSquare<S> = BTreeMap<(usize, usize), Vector<S>>;

/// `⊕_{k ≤ N} E^{⊗_⊤k}` with concatenation on independent pairs and the unshuffle coproduct.
#[derive(Clone, Debug)]
pub struct TruncTensorAlgebra<S: Scalar> {
    pub space: LocalitySpace<S>,
    pub max_degree: usize,
    pub components: Vec<Subspace<S>>,
    galois: Galois,
    /// `parts[c][k] = D_k(C)` for the closed set `C = closed[c]`.
    parts: Vec<Vec<Subspace<S>>>,
}

/// Default cap on the degree of truncated tensor algebras.
pub const MAX_TRUNC_DEGREE: usize = 4;

pub fn trunc_tensor_algebra<S: Scalar>(s: &LocalitySpace<S>, max_degree: usize) -> Result<TruncTensorAlgebra<S>> {
    if !S::is_finite() {
        return Err(Error::Unsupported("truncated tensor algebras are enumerated over finite fields".into()));
    }
    if max_degree > MAX_TRUNC_DEGREE {
        return Err(Error::TooLarge(format!("degree {max_degree} exceeds {MAX_TRUNC_DEGREE}")));
    }
    let d = s.dim();
    let galois = Galois::new(s.index()?)?;
    let degrees: Vec<usize> = (0..=max_degree).collect();
    let parts = CrossSpans::new(s, &galois, &degrees)?.parts;
    // The closed set of everything gives the full components.
    let full = galois.closed.iter().position(|c| c.count() == galois.idx.classes()).expect("full set is closed");
    let components = parts[full].clone();
    debug_assert!(components.iter().enumerate().all(|(k, c)| c.ambient() == d.pow(k as u32)));
    Ok(TruncTensorAlgebra { space: s.clone(), max_degree, components, galois, parts })
}

impl<S: Scalar> TruncTensorAlgebra<S> {
    fn n(&self) -> usize {
        self.space.dim()
    }

    pub fn component_dims(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.dim()).collect()
    }

    pub fn zero(&self) -> TElem<S> {
        (0..=self.max_degree).map(|k| vec![S::zero(); self.n().pow(k as u32)]).collect()
    }

    pub fn unit(&self) -> TElem<S> {
        self.homogeneous(0, vec![S::one()])
    }

    pub fn homogeneous(&self, k: usize, v: Vector<S>) -> TElem<S> {
        let mut out = self.zero();
        out[k] = v;
        out
    }

    /// Pure tensor of a chain of vectors.
    pub fn chain(&self, xs: &[Vector<S>]) -> TElem<S> {
        self.homogeneous(xs.len(), kron_tuple(xs))
    }

    pub fn contains(&self, a: &TElem<S>) -> bool {
        a.iter().zip(&self.components).all(|(v, c)| c.contains(v))
    }

    /// Independence on `T`: all parts of `a` come from chains with entries in a closed set
    /// `C` and all parts of `b` from chains with entries in `P(C)`.
    pub fn related(&self, a: &TElem<S>, b: &TElem<S>) -> bool {
        (0..self.galois.closed.len()).any(|c| {
            let pc = self.galois.polar[c];
            a.iter().enumerate().all(|(k, v)| self.parts[c][k].contains(v))
                && b.iter().enumerate().all(|(k, v)| self.parts[pc][k].contains(v))
        })
    }

    /// Concatenation, truncated above `N`; fails on non-independent arguments.
    pub fn mul(&self, a: &TElem<S>, b: &TElem<S>) -> Result<TElem<S>> {
        if !self.related(a, b) {
            return Err(Error::NotIndependent("factors of a product in the tensor algebra".into()));
        }
        Ok(self.mul_unchecked(a, b))
    }

    fn mul_unchecked(&self, a: &TElem<S>, b: &TElem<S>) -> TElem<S> {
        let mut out = self.zero();
        for (p, x) in a.iter().enumerate() {
            for (q, y) in b.iter().enumerate() {
                if p + q <= self.max_degree && !crate::exactla::is_zero(x) && !crate::exactla::is_zero(y) {
                    let z = kron(x, y);
                    for (o, t) in out[p + q].iter_mut().zip(z) {
                        *o = o.clone() + t;
                    }
                }
            }
        }
        out
    }

    pub fn counit(&self, a: &TElem<S>) -> S {
        a[0][0].clone()
    }

    /// Unshuffle coproduct, linear extension of the sum over all sub-chains.
    pub fn coproduct(&self, a: &TElem<S>) -> TSquare<S> {
        let n = self.n();
        let mut out: TSquare<S> = BTreeMap::new();
        for (k, v) in a.iter().enumerate() {
            for (w, c) in v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let letters = word_letters(w, n, k);
                for mask in 0..1usize << k {
                    let left: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| letters[i]).collect();
                    let right: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 0).map(|i| letters[i]).collect();
                    let (p, q) = (left.len(), right.len());
                    let pos = word_index(&left, n) * n.pow(q as u32) + word_index(&right, n);
                    let e = out.entry((p, q)).or_insert_with(|| vec![S::zero(); n.pow(k as u32)]);
                    e[pos] = e[pos].clone() + c.clone();
                }
            }
        }
        prune(out)
    }

    /// `(a' ⊗ a'')(b' ⊗ b'') = a'b' ⊗ a''b''` on `T ⊗ T`, truncated above `N`.
    pub fn square_mul(&self, x: &TSquare<S>, y: &TSquare<S>) -> TSquare<S> {
        let n = self.n();
        let mut out: TSquare<S> = BTreeMap::new();
        for (&(p1, q1), u) in x {
            for (&(p2, q2), v) in y {
                let k = p1 + q1 + p2 + q2;
                if k > self.max_degree {
                    continue;
                }
                let e = out.entry((p1 + p2, q1 + q2)).or_insert_with(|| vec![S::zero(); n.pow(k as u32)]);
                let (nq1, nq2, np2) = (n.pow(q1 as u32), n.pow(q2 as u32), n.pow(p2 as u32));
                for (i, a) in u.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
                    let (l1, r1) = (i / nq1, i % nq1);
                    for (j, b) in v.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                        let (l2, r2) = (j / nq2, j % nq2);
                        let pos = (l1 * np2 + l2) * (nq1 * nq2) + r1 * nq2 + r2;
                        e[pos] = e[pos].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        prune(out)
    }

    /// `S(x1 ⊗ ⋯ ⊗ xk) = (−1)^k xk ⊗ ⋯ ⊗ x1`.
    pub fn antipode(&self, a: &TElem<S>) -> TElem<S> {
        let n = self.n();
        a.iter()
            .enumerate()
            .map(|(k, v)| {
                let mut out = vec![S::zero(); v.len()];
                for (w, c) in v.iter().enumerate() {
                    let mut letters = word_letters(w, n, k);
                    letters.reverse();
                    out[word_index(&letters, n)] = if k % 2 == 0 { c.clone() } else { -c.clone() };
                }
                out
            })
            .collect()
    }

    /// The antipode from the graded connected recursion `S(x) = −x − Σ S(x') x''` over the
    /// reduced coproduct.
    pub fn antipode_recursive(&self, a: &TElem<S>) -> TElem<S> {
        let n = self.n();
        let mut memo: HashMap<(usize, usize), TElem<S>> = HashMap::new();
        let mut out = self.zero();
        for (k, v) in a.iter().enumerate() {
            for (w, c) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let s = self.antipode_word(k, w, n, &mut memo);
                for (o, x) in out.iter_mut().zip(&s) {
                    for (oi, xi) in o.iter_mut().zip(x) {
                        *oi = oi.clone() + c.clone() * xi.clone();
                    }
                }
            }
        }
        out
    }

    fn antipode_word(&self, k: usize, w: usize, n: usize, memo: &mut HashMap<(usize, usize), TElem<S>>) -> TElem<S> {
        if let Some(r) = memo.get(&(k, w)) {
            return r.clone();
        }
        let mut basis = vec![S::zero(); n.pow(k as u32)];
        basis[w] = S::one();
        let x = self.homogeneous(k, basis);
        let result = if k == 0 {
            x
        } else {
            let mut acc = self.zero();
            for (&(p, q), v) in &self.coproduct(&x) {
                if q == 0 {
                    continue;
                }
                // m(S ⊗ id) on the (p, q) part; q = k is the term S(1) x = x.
                let nq = n.pow(q as u32);
                for (i, c) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                    let sl = self.antipode_word(p, i / nq, n, memo);
                    let mut right = vec![S::zero(); nq];
                    right[i % nq] = c.clone();
                    let prod = self.mul_unchecked(&sl, &self.homogeneous(q, right));
                    for (o, t) in acc.iter_mut().zip(prod) {
                        for (oi, ti) in o.iter_mut().zip(t) {
                            *oi = oi.clone() - ti;
                        }
                    }
                }
            }
            acc
        };
        memo.insert((k, w), result.clone());
        result
    }

    /// Exhaustive check on homogeneous elements of degrees `p + q ≤ N`: the product of
    /// independent elements lands in degree `p + q` and `Δ(ab) = Δ(a)Δ(b)`.
    pub fn check_bialgebra(&self, max_pairs: usize) -> Result<Verdict<(TElem<S>, TElem<S>)>> {
        let els: Vec<Vec<Vector<S>>> = self.components.iter().map(|c| c.elements()).collect();
        for p in 0..=self.max_degree {
            for q in 0..=self.max_degree - p {
                if els[p].len().saturating_mul(els[q].len()) > max_pairs {
                    return Err(Error::TooLarge(format!("degrees ({p}, {q}) have too many element pairs")));
                }
                for x in &els[p] {
                    let a = self.homogeneous(p, x.clone());
                    for y in &els[q] {
                        let b = self.homogeneous(q, y.clone());
                        if !self.related(&a, &b) {
                            continue;
                        }
                        let ab = self.mul_unchecked(&a, &b);
                        let lhs = self.coproduct(&ab);
                        let rhs = self.square_mul(&self.coproduct(&a), &self.coproduct(&b));
                        if !self.components[p + q].contains(&ab[p + q]) || lhs != rhs {
                            return Ok(Verdict::Fails((a, b)));
                        }
                    }
                }
            }
        }
        Ok(Verdict::Holds)
    }

    /// `m(S ⊗ id)Δ = u ∘ ε` on a basis of every component, and the closed-form antipode
    /// matches the recursive one there.
    pub fn check_antipode(&self) -> bool {
        (0..=self.max_degree).all(|k| {
            self.components[k].basis().iter().all(|b| {
                let x = self.homogeneous(k, b.clone());
                let s = self.antipode(&x);
                if s != self.antipode_recursive(&x) {
                    return false;
                }
                let mut conv = self.zero();
                for (&(p, q), v) in &self.coproduct(&x) {
                    let nq = self.n().pow(q as u32);
                    for (i, c) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                        let mut left = vec![S::zero(); v.len() / nq];
                        left[i / nq] = c.clone();
                        let mut right = vec![S::zero(); nq];
                        right[i % nq] = S::one();
                        let prod =
                            self.mul_unchecked(&self.antipode(&self.homogeneous(p, left)), &self.homogeneous(q, right));
                        for (o, t) in conv.iter_mut().zip(prod) {
                            for (oi, ti) in o.iter_mut().zip(t) {
                                *oi = oi.clone() + ti;
                            }
                        }
                    }
                }
                let mut expect = self.zero();
                expect[0][0] = self.counit(&x);
                conv == expect
            })
        })
    }
}

fn prune<S: Scalar>(m: TSquare<S>) -> TSquare<S> {
    m.into_iter().filter(|(_, v)| !crate::exactla::is_zero(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::appendix_plane;
    use crate::exactla::vec_from_i64 as v;
    use crate::{F2, F3, F5, F7, Q};

    fn plane<S: Scalar>() -> Subspace<S> {
        Subspace::full(2)
    }

    #[test]
    fn appendix_plane_has_standard_dimension_three() {
        let s = appendix_plane::<Q>();
        let t = loc_tensor(&s, &[plane(), plane()]).unwrap();
        assert_eq!(t.dim(), 3);
        // The four spanning tensors from the example.
        for (a, b) in [([1, 1], [1, 0]), ([1, 2], [0, 1]), ([1, 0], [1, 1]), ([0, 1], [1, 2])] {
            assert!(t.basis.contains(&kron(&v::<Q>(&a), &v(&b))));
        }
        let f = appendix_plane::<F7>();
        assert_eq!(loc_tensor(&f, &[plane(), plane()]).unwrap().dim(), 3);
    }

    #[test]
    fn trivial_relation_gives_the_ordinary_product() {
        let s = LocalitySpace::<Q>::trivial(3);
        let v1 = Subspace::coordinate(3, &[0, 1]);
        let t = loc_tensor(&s, &[v1.clone(), Subspace::full(3)]).unwrap();
        assert_eq!(t.dim(), 6);
        let f = LocalitySpace::<F3>::trivial(2);
        assert_eq!(loc_tensor(&f, &[plane(), plane(), plane()]).unwrap().dim(), 8);
    }

    #[test]
    fn euclidean_plane_products() {
        let s = LocalitySpace::<Q>::euclidean(2);
        let t2 = loc_tensor(&s, &[plane(), plane()]).unwrap();
        assert!(t2.is_exact());
        assert_eq!(t2.dim(), 3);
        let t3 = loc_tensor(&s, &[plane(), plane(), plane()]).unwrap();
        assert!(t3.is_exact());
        assert_eq!(t3.dim(), 0);
        // Oracle: brute force over F5, where x ⊥ x is possible, still gives 3 in degree two.
        let f = LocalitySpace::<F5>::euclidean(2);
        assert_eq!(loc_tensor(&f, &[plane(), plane()]).unwrap().dim(), 3);
    }

    #[test]
    fn euclidean_three_space_degree_three_is_bounded() {
        let s = LocalitySpace::<Q>::euclidean(3);
        let e = Subspace::full(3);
        let t = loc_tensor(&s, &[e.clone(), e.clone(), e]).unwrap();
        let (lo, hi) = t.dim_bounds();
        // e_σ(1) ⊗ e_σ(2) ⊗ e_σ(3) are all in, and so are orthogonal frames.
        assert!(lo >= 6 && lo <= hi, "{lo} {hi}");
        assert!(t.basis.contains(&kron_all(&[&v::<Q>(&[1, 0, 0]), &v(&[0, 1, 0]), &v(&[0, 0, 1])])));
    }

    #[test]
    fn degree_one_relation_is_the_original() {
        let s = LocalitySpace::<F5>::euclidean(2);
        let t = loc_tensor(&s, &[plane()]).unwrap();
        let r = tensor_relation(&s, &t).unwrap();
        assert_eq!(same_relation(&r.space, &s), Some(true));
        assert!(r.is_locality);
    }

    #[test]
    fn trivial_relation_induces_full_relation() {
        let s = LocalitySpace::<F3>::trivial(2);
        let t = loc_tensor(&s, &[plane(), plane()]).unwrap();
        let r = tensor_relation(&s, &t).unwrap();
        assert_eq!(same_relation(&r.space, &LocalitySpace::trivial(4)), Some(true));
    }

    #[test]
    fn euclidean_f5_swapped_pair_is_related() {
        let s = LocalitySpace::<F5>::euclidean(2);
        let t = loc_tensor(&s, &[plane(), plane()]).unwrap();
        let r = tensor_relation(&s, &t).unwrap();
        let a = t.basis.coords(&kron(&v::<F5>(&[1, 0]), &v(&[0, 1]))).unwrap();
        let b = t.basis.coords(&kron(&v::<F5>(&[0, 1]), &v(&[1, 0]))).unwrap();
        assert!(r.space.rel(&a, &b));
        // e1 ⊗ e2 against itself needs e1 ⊥ e1.
        assert!(!r.space.rel(&a, &a));
    }

    #[test]
    fn coex_distributivity_fails_with_its_hypothesis() {
        let s = LocalitySpace::<Q>::euclidean(2);
        let chk =
            distributivity_check(&s, &Subspace::coordinate(2, &[0]), &Subspace::coordinate(2, &[1]), &plane()).unwrap();
        assert_eq!(chk.outcome(), LawOutcome::HypothesisViolated);
        assert!(chk.conclusion.fails());
        let missing = kron(&v::<Q>(&[1, 1]), &v(&[1, -1]));
        let t1 = loc_tensor(&s, &[Subspace::coordinate(2, &[0]), plane()]).unwrap();
        let t2 = loc_tensor(&s, &[Subspace::coordinate(2, &[1]), plane()]).unwrap();
        assert!(!t1.basis.sum(&t2.basis).contains(&missing));
        assert!(loc_tensor(&s, &[plane(), plane()]).unwrap().basis.contains(&missing));
    }

    #[test]
    fn trivial_relation_distributes_and_intersects() {
        let s = LocalitySpace::<Q>::trivial(3);
        let (a, b, w) = (Subspace::coordinate(3, &[0]), Subspace::coordinate(3, &[1, 2]), Subspace::full(3));
        let d = distributivity_check(&s, &a, &b, &w).unwrap();
        assert_eq!(d.outcome(), LawOutcome::Holds);
        let i = intersection_check(&s, &Subspace::coordinate(3, &[0, 1]), &Subspace::coordinate(3, &[1, 2]), &w, None)
            .unwrap();
        assert_eq!(i.outcome(), LawOutcome::Holds);
    }

    #[test]
    fn ortho_intersection_hypothesis_violated_but_conclusion_tested() {
        let s = LocalitySpace::<Q>::euclidean(2);
        let chk = intersection_check(&s, &Subspace::coordinate(2, &[0]), &plane(), &plane(), None).unwrap();
        assert_eq!(chk.outcome(), LawOutcome::HypothesisViolated);
        assert!(chk.conclusion.holds());
    }

    #[test]
    fn blocks_hypothesis_decided_over_q() {
        // Everything related to ⟨e1⟩ and to ⟨e2⟩ separately: projections are independent.
        let s = LocalitySpace::<Q>::from_blocks(
            2,
            vec![(Subspace::full(2), Subspace::zero(2)), (Subspace::full(2), Subspace::coordinate(2, &[0]))],
        )
        .unwrap();
        let d =
            distributivity_check(&s, &Subspace::coordinate(2, &[0]), &Subspace::coordinate(2, &[1]), &plane()).unwrap();
        assert!(d.hypothesis.holds());
        assert_eq!(d.outcome(), LawOutcome::Holds);
    }

    #[test]
    fn associativity_small_cases() {
        let o = LocalitySpace::<F3>::euclidean(2);
        assert!(associativity_check(&o, 1, 1).unwrap().holds());
        let t = LocalitySpace::<F2>::trivial(2);
        let r = associativity_check(&t, 1, 2).unwrap();
        assert!(r.holds());
        assert_eq!(r.rhs_dim, 8);
        assert!(associativity_check(&appendix_plane::<F3>(), 1, 1).unwrap().holds());
    }

    #[test]
    fn alternative_product_on_the_appendix_plane() {
        let s = appendix_plane::<F7>();
        let alt = alt_tensor(&s, &plane(), &plane()).unwrap();
        assert_eq!(alt.dim, 4);
        assert_eq!(alt.standard_dim(), 3);
        assert!(alt.relations_are_bilinear());
    }

    #[test]
    fn alternative_product_bounds() {
        let t = LocalitySpace::<F3>::trivial(2);
        assert_eq!(alt_tensor(&t, &plane(), &plane()).unwrap().dim, 4);
        let o = LocalitySpace::<F5>::euclidean(2);
        let alt = alt_tensor(&o, &plane(), &plane()).unwrap();
        assert!(alt.dim >= 3, "{}", alt.dim);
        assert_eq!(alt.standard_dim(), 3);
    }

    #[test]
    fn tensor_algebra_components_and_coproduct() {
        let s = LocalitySpace::<F5>::euclidean(2);
        let t = trunc_tensor_algebra(&s, 3).unwrap();
        // (1,2) and (1,3) are isotropic over F5, so their cubes survive in degree three.
        assert_eq!(t.component_dims(), vec![1, 2, 3, 2]);
        let x = v::<F5>(&[1, 2]);
        let y = v::<F5>(&[3, 1]);
        let xy = t.chain(&[x.clone(), y.clone()]);
        let d = t.coproduct(&xy);
        let mut expect: TSquare<F5> = BTreeMap::new();
        expect.insert((0, 2), kron(&x, &y));
        expect.insert((1, 1), crate::exactla::add(&kron(&x, &y), &kron(&y, &x)));
        expect.insert((2, 0), kron(&x, &y));
        assert_eq!(d, expect);
        let n0 = trunc_tensor_algebra(&s, 0).unwrap();
        assert_eq!(n0.component_dims(), vec![1]);
    }

    #[test]
    fn tensor_algebra_products_need_independence() {
        let s = LocalitySpace::<F5>::euclidean(2);
        let t = trunc_tensor_algebra(&s, 2).unwrap();
        let e1 = t.chain(&[v(&[1, 0])]);
        let e2 = t.chain(&[v(&[0, 1])]);
        assert!(t.mul(&e1, &e2).is_ok());
        assert!(matches!(t.mul(&e1, &e1), Err(Error::NotIndependent(_))));
        assert_eq!(t.mul(&t.unit(), &e1).unwrap(), e1);
    }

    #[test]
    fn tensor_algebra_bialgebra_and_antipode_over_f2() {
        let s = LocalitySpace::<F2>::from_pairs(2, vec![(v(&[1, 0]), v(&[0, 1])), (v(&[1, 1]), v(&[1, 1]))]).unwrap();
        let t = trunc_tensor_algebra(&s, 3).unwrap();
        assert!(t.check_bialgebra(1 << 20).unwrap().holds());
        assert!(t.check_antipode());
    }

    #[test]
    fn echelon_matches_subspace() {
        let rows: Vec<Vector<Q>> = vec![v(&[1, 2, 3]), v(&[2, 4, 6]), v(&[0, 1, 1])];
        let mut e = Echelon::new(3);
        let fresh: Vec<bool> = rows.iter().map(|r| e.insert(r)).collect();
        assert_eq!(fresh, vec![true, false, true]);
        assert_eq!(e.into_subspace(), Subspace::of(3, &rows));
    }
}
