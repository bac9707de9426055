//! Locality relations on finite-dimensional vector spaces.
//!
//! Three backends share one interface:
//! * `Blocks`: a finite union of products `A × B` of subspaces (implicitly symmetrized);
//! * `Pairs`: an explicit symmetric pair set over a finite field;
//! * `Ortho`: `x ⊤ y ⇔ xᵀGy = 0` for a symmetric Gram matrix `G`, optionally
//!   widened by "escape" functionals (needed to describe some quotients).
//!
//! Over finite fields every question is settled by enumeration. Over the
//! rationals the answers are symbolic; some of them may be [`Verdict::Unknown`].

use std::collections::{HashMap, HashSet};

use crate::error::{check_dim, Error, Result};
use crate::exactla::{add, dot, normalize, scale, unit, vec_from_i64, zero_vec, LinMap, Subspace, Vector};
use crate::fin::{self, BitSet};
use crate::scalar::Scalar;
use crate::Verdict;

/// Largest space for which an explicit pair set is materialized.
pub const MAX_PAIRS_SPACE: u64 = 1 << 13;

/// One product `left × right` of subspaces. The swapped product is implied.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Block<S: Scalar> {
    pub left: Subspace<S>,
    pub right: Subspace<S>,
}

impl<S: Scalar> Block<S> {
    pub fn new(left: Subspace<S>, right: Subspace<S>) -> Self {
        Block { left, right }
    }

    fn relates(&self, x: &[S], y: &[S]) -> bool {
        (self.left.contains(x) && self.right.contains(y)) || (self.right.contains(x) && self.left.contains(y))
    }

    fn within(&self, other: &Block<S>) -> bool {
        (self.left.is_subspace_of(&other.left) && self.right.is_subspace_of(&other.right))
            || (self.left.is_subspace_of(&other.right) && self.right.is_subspace_of(&other.left))
    }
}

/// Explicit symmetric relation on `F_p^n`; `adj[u]` is the polar set of vector index `u`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PairSet {
    pub dim: usize,
    adj: Vec<BitSet>,
}

impl PairSet {
    pub fn empty(dim: usize, size: usize) -> Self {
        PairSet { dim, adj: vec![BitSet::new(size); size] }
    }

    pub fn size(&self) -> usize {
        self.adj.len()
    }

    pub fn insert(&mut self, u: usize, v: usize) {
        self.adj[u].set(v);
        self.adj[v].set(u);
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.adj[u].get(v)
    }

    pub fn polar(&self, u: usize) -> &BitSet {
        &self.adj[u]
    }

    /// Number of ordered related pairs.
    pub fn len(&self) -> usize {
        self.adj.iter().map(BitSet::count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_subset(&self, other: &PairSet) -> bool {
        self.adj.iter().zip(&other.adj).all(|(a, b)| a.is_subset(b))
    }

    /// Ordered pairs `(u, v)` with `u <= v`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, row) in self.adj.iter().enumerate() {
            out.extend(row.iter().filter(|&v| v >= u).map(|v| (u, v)));
        }
        out
    }
}

/// `x ⊤ y ⇔ xᵀGy = 0`, or `Lx ≠ 0`, or `Ly ≠ 0` for some escape functional `L`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrthoForm<S: Scalar> {
    pub gram: Vec<Vector<S>>,
    pub escape: Vec<Vector<S>>,
}

impl<S: Scalar> OrthoForm<S> {
    pub fn form(&self, x: &[S], y: &[S]) -> S {
        let gy: Vec<S> = self.gram.iter().map(|r| dot(r, y)).collect();
        dot(x, &gy)
    }

    fn escapes(&self, x: &[S]) -> bool {
        self.escape.iter().any(|l| !dot(l, x).is_zero())
    }

    fn relates(&self, x: &[S], y: &[S]) -> bool {
        self.form(x, y).is_zero() || self.escapes(x) || self.escapes(y)
    }

    /// The functional `y ↦ xᵀGy` as a row.
    pub fn row(&self, x: &[S]) -> Vector<S> {
        let n = x.len();
        (0..n).map(|j| (0..n).fold(S::zero(), |acc, i| acc + x[i].clone() * self.gram[i][j].clone())).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Relation<S: Scalar> {
    Blocks(Vec<Block<S>>),
    Pairs(PairSet),
    Ortho(OrthoForm<S>),
}

/// A vector space `S^dim` with a symmetric relation containing `(0, 0)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalitySpace<S: Scalar> {
    dim: usize,
    relation: Relation<S>,
}

/// Description of a polar set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Polar<S: Scalar> {
    /// Finite union of subspaces (empty list = empty set).
    Union(Vec<Subspace<S>>),
    /// Explicit list of vectors.
    Explicit(Vec<Vector<S>>),
    /// `hyperplane ∪ (V \ kernel)`; arises only for escaped orthogonality relations.
    Escaped { hyperplane: Subspace<S>, kernel: Subspace<S> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarSet<S: Scalar> {
    pub set: Polar<S>,
    pub is_subspace: bool,
}

impl<S: Scalar> PolarSet<S> {
    pub fn contains(&self, v: &[S]) -> bool {
        match &self.set {
            Polar::Union(ms) => ms.iter().any(|m| m.contains(v)),
            Polar::Explicit(vs) => vs.iter().any(|w| w.as_slice() == v),
            Polar::Escaped { hyperplane, kernel } => hyperplane.contains(v) || !kernel.contains(v),
        }
    }

    /// The subspace, when the polar set is one.
    pub fn as_subspace(&self, dim: usize) -> Option<Subspace<S>> {
        if !self.is_subspace {
            return None;
        }
        Some(match &self.set {
            Polar::Union(ms) => Subspace::sum_all(dim, ms),
            Polar::Explicit(vs) => Subspace::of(dim, vs),
            Polar::Escaped { .. } => Subspace::full(dim),
        })
    }
}

/// Failure of linearity of one polar set: `a, b ∈ P(u)` but `λa + μb ∉ P(u)`.
/// When the polar set is empty, `a` and `b` are `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarWitness<S: Scalar> {
    pub u: Vector<S>,
    pub a: Option<Vector<S>>,
    pub b: Option<Vector<S>>,
    pub lambda: S,
    pub mu: S,
}

impl<S: Scalar> PolarWitness<S> {
    pub fn combination(&self) -> Option<Vector<S>> {
        let (a, b) = (self.a.as_ref()?, self.b.as_ref()?);
        Some(add(&scale(&self.lambda, a), &scale(&self.mu, b)))
    }

    /// Re-checks the witness using only `related`.
    pub fn replay(&self, s: &LocalitySpace<S>) -> bool {
        match (&self.a, &self.b) {
            (Some(a), Some(b)) => {
                let c = self.combination().expect("both present");
                s.rel(&self.u, a) && s.rel(&self.u, b) && !s.rel(&self.u, &c)
            }
            _ => match s.to_pairs() {
                Ok(p) => p.polar_list(&self.u).is_empty(),
                Err(_) => false,
            },
        }
    }
}

/// Outcome of a closure computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Closure<S: Scalar> {
    Exact(LocalitySpace<S>),
    Unknown(String),
}

/// The relation restricted to representative classes, for exhaustive work over `F_p`.
///
/// Two vectors share a class when they are related to exactly the same vectors
/// for structural reasons (same block signature, same projective line, ...), so
/// `related(u, v) = adj[class[u]].get(class[v])`.
#[derive(Clone, Debug)]
pub struct RelIndex {
    pub dim: usize,
    pub class: Vec<u32>,
    pub reps: Vec<usize>,
    pub class_size: Vec<usize>,
    pub adj: Vec<BitSet>,
}

impl RelIndex {
    pub fn size(&self) -> usize {
        self.class.len()
    }

    pub fn classes(&self) -> usize {
        self.reps.len()
    }

    pub fn related(&self, u: usize, v: usize) -> bool {
        self.adj[self.class[u] as usize].get(self.class[v] as usize)
    }

    /// Classes related to every class in `cs`.
    pub fn polar_classes(&self, cs: &[usize]) -> BitSet {
        let mut out = BitSet::new(self.classes());
        for c in 0..self.classes() {
            out.set(c);
        }
        for &c in cs {
            out.intersect_with(&self.adj[c]);
        }
        out
    }

    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.classes()];
        for (v, &c) in self.class.iter().enumerate() {
            out[c as usize].push(v);
        }
        out
    }
}

impl<S: Scalar> LocalitySpace<S> {
    /// Blocks relation; the zero block is added and redundant blocks are dropped.
    pub fn from_blocks(dim: usize, blocks: Vec<(Subspace<S>, Subspace<S>)>) -> Result<Self> {
        for (a, b) in &blocks {
            check_dim(dim, a.ambient())?;
            check_dim(dim, b.ambient())?;
        }
        let raw: Vec<Block<S>> = blocks.into_iter().map(|(a, b)| Block::new(a, b)).collect();
        Ok(LocalitySpace { dim, relation: Relation::Blocks(normalize_blocks(dim, raw)) })
    }

    /// Explicit pair set over a finite field; symmetrized and `(0, 0)` added.
    pub fn from_pairs(dim: usize, pairs: impl IntoIterator<Item = (Vector<S>, Vector<S>)>) -> Result<Self> {
        let size = fin::space_size::<S>(dim)?;
        if size > MAX_PAIRS_SPACE {
            return Err(Error::TooLarge(format!("pair relation on {} vectors", size)));
        }
        let mut ps = PairSet::empty(dim, size as usize);
        ps.insert(0, 0);
        for (x, y) in pairs {
            check_dim(dim, x.len())?;
            check_dim(dim, y.len())?;
            ps.insert(fin::encode(&x) as usize, fin::encode(&y) as usize);
        }
        Ok(LocalitySpace { dim, relation: Relation::Pairs(ps) })
    }

    pub fn from_pair_set(ps: PairSet) -> Result<Self> {
        let size = fin::space_size::<S>(ps.dim)?;
        check_dim(size as usize, ps.size())?;
        let mut ps = ps;
        ps.insert(0, 0);
        Ok(LocalitySpace { dim: ps.dim, relation: Relation::Pairs(ps) })
    }

    /// `x ⊤ y ⇔ xᵀGy = 0`.
    pub fn ortho(gram: Vec<Vector<S>>) -> Result<Self> {
        Self::ortho_escaped(gram, vec![])
    }

    pub fn ortho_escaped(gram: Vec<Vector<S>>, escape: Vec<Vector<S>>) -> Result<Self> {
        let n = gram.len();
        for (i, r) in gram.iter().enumerate() {
            check_dim(n, r.len())?;
            for j in 0..n {
                if r[j] != gram[j][i] {
                    return Err(Error::Parse("Gram matrix must be symmetric".into()));
                }
            }
        }
        for l in &escape {
            check_dim(n, l.len())?;
        }
        let escape: Vec<Vector<S>> = Subspace::of(n, &escape).basis().to_vec();
        Ok(LocalitySpace { dim: n, relation: Relation::Ortho(OrthoForm { gram, escape }) })
    }

    /// Identity Gram matrix.
    pub fn euclidean(n: usize) -> Self {
        Self::ortho((0..n).map(|i| unit(n, i)).collect()).expect("identity is symmetric")
    }

    /// Everything related to everything.
    pub fn trivial(dim: usize) -> Self {
        Self::from_blocks(dim, vec![(Subspace::full(dim), Subspace::full(dim))]).expect("dims agree")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn relation(&self) -> &Relation<S> {
        &self.relation
    }

    /// `related` without dimension checks.
    pub fn rel(&self, x: &[S], y: &[S]) -> bool {
        match &self.relation {
            Relation::Blocks(bs) => bs.iter().any(|b| b.relates(x, y)),
            Relation::Pairs(ps) => ps.contains(fin::encode(x) as usize, fin::encode(y) as usize),
            Relation::Ortho(o) => o.relates(x, y),
        }
    }

    pub fn related(&self, x: &[S], y: &[S]) -> Result<bool> {
        check_dim(self.dim, x.len())?;
        check_dim(self.dim, y.len())?;
        Ok(self.rel(x, y))
    }

    /// Distinct subspaces occurring as block sides.
    pub fn sides(&self) -> Vec<Subspace<S>> {
        let mut out: Vec<Subspace<S>> = Vec::new();
        if let Relation::Blocks(bs) = &self.relation {
            for b in bs {
                for s in [&b.left, &b.right] {
                    if !out.contains(s) {
                        out.push(s.clone());
                    }
                }
            }
        }
        out
    }

    /// Polar set of a single vector as a union of block sides (Blocks backend).
    fn block_components(&self, u: &[S]) -> Vec<Subspace<S>> {
        let Relation::Blocks(bs) = &self.relation else { unreachable!() };
        let mut out = Vec::new();
        for b in bs {
            if b.left.contains(u) {
                out.push(b.right.clone());
            }
            if b.right.contains(u) {
                out.push(b.left.clone());
            }
        }
        maximal_subspaces(out)
    }

    /// `U^⊤ = {x : u ⊤ x for all u ∈ U}`; the polar of the empty set is the whole space.
    pub fn polar(&self, us: &[Vector<S>]) -> Result<PolarSet<S>> {
        for u in us {
            check_dim(self.dim, u.len())?;
        }
        let n = self.dim;
        let set = match &self.relation {
            Relation::Blocks(_) => {
                let mut acc = vec![Subspace::full(n)];
                for u in us {
                    let comps = self.block_components(u);
                    let mut next = Vec::new();
                    for a in &acc {
                        for c in &comps {
                            next.push(a.intersect(c));
                        }
                    }
                    acc = maximal_subspaces(next);
                }
                Polar::Union(acc)
            }
            Relation::Pairs(ps) => {
                let mut bits = BitSet::new(ps.size());
                for i in 0..ps.size() {
                    bits.set(i);
                }
                for u in us {
                    bits.intersect_with(ps.polar(fin::encode(u) as usize));
                }
                Polar::Explicit(bits.iter().map(|i| fin::decode(i as u64, n)).collect())
            }
            Relation::Ortho(o) => {
                let live: Vec<&Vector<S>> = us.iter().filter(|u| !o.escapes(u)).collect();
                let rows: Vec<Vector<S>> = live.iter().map(|u| o.row(u)).collect();
                let hyper = Subspace::of(n, &crate::exactla::nullspace(&rows, n)?);
                if o.escape.is_empty() || live.is_empty() {
                    Polar::Union(vec![hyper])
                } else {
                    let kernel = Subspace::of(n, &crate::exactla::nullspace(&o.escape, n)?);
                    if kernel.is_subspace_of(&hyper) {
                        Polar::Union(vec![Subspace::full(n)])
                    } else {
                        Polar::Escaped { hyperplane: hyper, kernel }
                    }
                }
            }
        };
        let is_subspace = match &set {
            Polar::Union(ms) => union_is_subspace(n, ms),
            Polar::Explicit(vs) => explicit_is_subspace(n, vs),
            // hyperplane ∪ (V \ kernel) with kernel ⊄ hyperplane: the complement part spans V
            // but the union misses kernel \ hyperplane.
            Polar::Escaped { .. } => false,
        };
        Ok(PolarSet { set, is_subspace })
    }

    /// Exhaustive class index; finite fields only.
    pub fn index(&self) -> Result<RelIndex> {
        let size = fin::space_size::<S>(self.dim)? as usize;
        let n = self.dim;
        let mut keys: HashMap<Vec<u64>, u32> = HashMap::new();
        let mut class = Vec::with_capacity(size);
        let mut reps = Vec::new();
        let sides = self.sides();
        for v in 0..size {
            let key: Vec<u64> = match &self.relation {
                Relation::Pairs(_) => vec![v as u64],
                Relation::Blocks(_) => {
                    let x = fin::decode::<S>(v as u64, n);
                    let mut words = vec![0u64; sides.len().div_ceil(64).max(1)];
                    for (i, s) in sides.iter().enumerate() {
                        if s.contains(&x) {
                            words[i / 64] |= 1 << (i % 64);
                        }
                    }
                    words
                }
                Relation::Ortho(_) => {
                    let x = fin::decode::<S>(v as u64, n);
                    vec![fin::encode(&normalize(&x))]
                }
            };
            let next = keys.len() as u32;
            let c = *keys.entry(key).or_insert_with(|| {
                reps.push(v);
                next
            });
            class.push(c);
        }
        let k = reps.len();
        let mut class_size = vec![0; k];
        for &c in &class {
            class_size[c as usize] += 1;
        }
        let decoded: Vec<Vector<S>> = reps.iter().map(|&r| fin::decode(r as u64, n)).collect();
        let mut adj = vec![BitSet::new(k); k];
        for i in 0..k {
            for j in i..k {
                if self.rel(&decoded[i], &decoded[j]) {
                    adj[i].set(j);
                    adj[j].set(i);
                }
            }
        }
        Ok(RelIndex { dim: n, class, reps, class_size, adj })
    }

    /// Explicit pair set; finite fields only.
    pub fn to_pairs(&self) -> Result<PairSetView<S>> {
        if let Relation::Pairs(ps) = &self.relation {
            return Ok(PairSetView { dim: self.dim, ps: ps.clone(), _s: Default::default() });
        }
        let idx = self.index()?;
        let size = idx.size();
        if size as u64 > MAX_PAIRS_SPACE {
            return Err(Error::TooLarge(format!("pair relation on {size} vectors")));
        }
        let mut ps = PairSet::empty(self.dim, size);
        let members = idx.members();
        for u in 0..size {
            let cu = idx.class[u] as usize;
            for c in idx.adj[cu].iter() {
                for &v in &members[c] {
                    ps.adj[u].set(v);
                }
            }
        }
        Ok(PairSetView { dim: self.dim, ps, _s: Default::default() })
    }

    /// Same relation, explicit backend.
    pub fn as_pairs_space(&self) -> Result<Self> {
        Ok(LocalitySpace { dim: self.dim, relation: Relation::Pairs(self.to_pairs()?.ps) })
    }

    /// Whether every polar set `P(u)` is a linear subspace.
    pub fn is_locality(&self) -> Verdict<PolarWitness<S>> {
        if S::is_finite() {
            match self.index() {
                Ok(idx) => return is_locality_indexed::<S>(&idx),
                Err(e) => {
                    if let Relation::Ortho(o) = &self.relation {
                        return ortho_is_locality(self.dim, o);
                    }
                    return Verdict::Unknown(e.to_string());
                }
            }
        }
        match &self.relation {
            Relation::Ortho(o) => ortho_is_locality(self.dim, o),
            Relation::Blocks(_) => self.blocks_is_locality(),
            Relation::Pairs(_) => unreachable!("pair relations only exist over finite fields"),
        }
    }

    /// Intersection lattice generated by the block sides, starting from the whole space.
    pub fn side_lattice(&self) -> Vec<Subspace<S>> {
        let sides = self.sides();
        let mut lattice = vec![Subspace::full(self.dim)];
        let mut i = 0;
        while i < lattice.len() {
            let x = lattice[i].clone();
            for s in &sides {
                let y = x.intersect(s);
                if !lattice.contains(&y) {
                    lattice.push(y);
                }
            }
            i += 1;
        }
        lattice
    }

    /// Over an infinite field the signature of a vector (the set of sides containing it) is
    /// the signature of a lattice element, and a finite union of subspaces is a subspace only
    /// when one member contains all others. Both facts make this check decisive.
    fn blocks_is_locality(&self) -> Verdict<PolarWitness<S>> {
        let sides = self.sides();
        let mut lattice = self.side_lattice();
        let zero = Subspace::zero(self.dim);
        if !lattice.contains(&zero) {
            lattice.push(zero);
        }
        for x in &lattice {
            let avoid: Vec<Subspace<S>> = sides.iter().filter(|s| !x.is_subspace_of(s)).cloned().collect();
            let Some(u) = generic_element(x, &avoid) else { continue };
            let comps = self.block_components(&u);
            if !union_is_subspace(self.dim, &comps) {
                let (a, b) = union_witness(&comps).expect("union is not a subspace");
                return Verdict::Fails(PolarWitness { u, a: Some(a), b: Some(b), lambda: S::one(), mu: S::one() });
            }
        }
        Verdict::Holds
    }

    /// Smallest locality relation containing this one.
    ///
    /// Pair relations: repeatedly replace each polar set by its span and re-symmetrize until
    /// stable. Each added pair is forced, so the fixed point is the minimum. Block relations are
    /// only handled when they already are locality relations.
    pub fn closure(&self) -> Closure<S> {
        match &self.relation {
            Relation::Pairs(ps) => {
                let n = self.dim;
                let mut ps = ps.clone();
                loop {
                    let mut changed = false;
                    for u in 0..ps.size() {
                        let members: Vec<Vector<S>> = ps.polar(u).iter().map(|i| fin::decode(i as u64, n)).collect();
                        for e in Subspace::of(n, &members).elements() {
                            let v = fin::encode(&e) as usize;
                            if !ps.contains(u, v) {
                                ps.insert(u, v);
                                changed = true;
                            }
                        }
                    }
                    if !changed {
                        break;
                    }
                }
                Closure::Exact(LocalitySpace { dim: n, relation: Relation::Pairs(ps) })
            }
            _ => match self.is_locality() {
                Verdict::Holds => Closure::Exact(self.clone()),
                Verdict::Fails(_) if S::is_finite() => match self.as_pairs_space() {
                    Ok(p) => p.closure(),
                    Err(e) => Closure::Unknown(e.to_string()),
                },
                _ => Closure::Unknown("closure of a symbolic relation is not certified".into()),
            },
        }
    }

    /// Whether `f(x) ⊤' g(y)` for every `x ⊤ y`; `target` is the relation on the codomain.
    pub fn independent_maps(
        &self,
        target: &LocalitySpace<S>,
        f: &LinMap<S>,
        g: &LinMap<S>,
    ) -> Result<Verdict<(Vector<S>, Vector<S>)>> {
        for m in [f, g] {
            check_dim(self.dim, m.src)?;
            check_dim(target.dim, m.tgt)?;
        }
        if S::is_finite() {
            let idx = self.index()?;
            let tidx = target.index()?;
            let members = idx.members();
            let mut cache: HashMap<usize, usize> = HashMap::new();
            let mut img = |m: &LinMap<S>, v: usize, tag: usize| -> usize {
                *cache
                    .entry(v * 2 + tag)
                    .or_insert_with(|| fin::encode(&m.apply(&fin::decode::<S>(v as u64, self.dim))) as usize)
            };
            for cx in 0..idx.classes() {
                for cy in idx.adj[cx].iter() {
                    for &x in &members[cx] {
                        let fx = img(f, x, 0);
                        for &y in &members[cy] {
                            let gy = img(g, y, 1);
                            if !tidx.related(fx, gy) {
                                let n = self.dim;
                                return Ok(Verdict::Fails((fin::decode(x as u64, n), fin::decode(y as u64, n))));
                            }
                        }
                    }
                }
            }
            return Ok(Verdict::Holds);
        }
        let decided = self.decide_independence(target, f, g);
        if decided == Some(true) {
            return Ok(Verdict::Holds);
        }
        let found = grid_search(self.dim, 1, |x| {
            let fx = f.apply(x);
            grid_search(self.dim, 1, |y| (self.rel(x, y) && !target.rel(&fx, &g.apply(y))).then(|| y.to_vec()))
                .map(|y| (x.to_vec(), y))
        });
        Ok(match (decided, found) {
            (_, Some(w)) => Verdict::Fails(w),
            (Some(true), None) => Verdict::Holds,
            (Some(false), None) => Verdict::Unknown("independence fails but no small witness was found".into()),
            (None, None) => Verdict::Unknown("no witness among small coordinate vectors".into()),
        })
    }

    /// Exact answer to [`Self::independent_maps`] over an infinite field, when the pair of
    /// relation backends admits one.
    pub fn decide_independence(&self, target: &LocalitySpace<S>, f: &LinMap<S>, g: &LinMap<S>) -> Option<bool> {
        if S::is_finite() {
            return None;
        }
        match (&self.relation, &target.relation) {
            (Relation::Blocks(bs), Relation::Blocks(ts)) => {
                // A product of subspaces lies in a finite union of products over an infinite
                // field only if it lies in one of them.
                Some(bs.iter().all(|b| {
                    [(&b.left, &b.right), (&b.right, &b.left)].into_iter().all(|(a, c)| {
                        let fa = f.image_of(a);
                        let gc = g.image_of(c);
                        ts.iter().any(|t| {
                            (fa.is_subspace_of(&t.left) && gc.is_subspace_of(&t.right))
                                || (fa.is_subspace_of(&t.right) && gc.is_subspace_of(&t.left))
                        })
                    })
                }))
            }
            (Relation::Blocks(bs), Relation::Ortho(o)) if o.escape.is_empty() => Some(bs.iter().all(|b| {
                [(&b.left, &b.right), (&b.right, &b.left)].into_iter().all(|(a, c)| {
                    a.basis().iter().all(|x| c.basis().iter().all(|y| o.form(&f.apply(x), &g.apply(y)).is_zero()))
                })
            })),
            (Relation::Ortho(o), Relation::Ortho(t)) if o.escape.is_empty() && t.escape.is_empty() => {
                // fᵀG'g must vanish wherever G does, i.e. lie in the span of G.
                let n = self.dim;
                let m: Vec<Vector<S>> = (0..n)
                    .map(|i| (0..n).map(|j| t.form(&f.apply(&unit(n, i)), &g.apply(&unit(n, j)))).collect())
                    .collect();
                let flat_g: Vector<S> = o.gram.concat();
                let flat_m: Vector<S> = m.concat();
                Some(Subspace::of(n * n, &[flat_g]).contains(&flat_m))
            }
            _ => None,
        }
    }

    /// Relation induced on a subspace, in coordinates of the subspace basis.
    pub fn restrict(&self, sub: &Subspace<S>) -> Result<Self> {
        check_dim(self.dim, sub.ambient())?;
        let k = sub.dim();
        let coords = |s: &Subspace<S>| -> Subspace<S> {
            let inter = s.intersect(sub);
            Subspace::of(k, &inter.basis().iter().map(|b| sub.coords(b).expect("inside")).collect::<Vec<_>>())
        };
        match &self.relation {
            Relation::Blocks(bs) => {
                Self::from_blocks(k, bs.iter().map(|b| (coords(&b.left), coords(&b.right))).collect())
            }
            Relation::Ortho(o) => {
                let basis = sub.basis();
                let gram = basis.iter().map(|x| basis.iter().map(|y| o.form(x, y)).collect()).collect();
                let escape = o.escape.iter().map(|l| basis.iter().map(|b| dot(l, b)).collect()).collect();
                Self::ortho_escaped(gram, escape)
            }
            Relation::Pairs(_) => {
                let mut pairs = Vec::new();
                let els = Subspace::<S>::full(k).elements();
                for x in &els {
                    for y in &els {
                        if self.rel(&sub.combine(x), &sub.combine(y)) {
                            pairs.push((x.clone(), y.clone()));
                        }
                    }
                }
                Self::from_pairs(k, pairs)
            }
        }
    }

    /// Locality cartesian product `V1 ×_⊤ ⋯ ×_⊤ Vn`: tuples with pairwise related entries.
    pub fn loc_cartesian(&self, factors: &[Subspace<S>]) -> Result<Cartesian<S>> {
        for f in factors {
            check_dim(self.dim, f.ambient())?;
        }
        if let Relation::Blocks(bs) = &self.relation {
            let oriented: Vec<(Subspace<S>, Subspace<S>)> = bs
                .iter()
                .flat_map(|b| [(b.left.clone(), b.right.clone()), (b.right.clone(), b.left.clone())])
                .collect();
            let n = factors.len();
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            let mut out = Vec::new();
            block_products(&oriented, &pairs, 0, factors.to_vec(), &mut out);
            return Ok(Cartesian::Products(maximal_products(out)));
        }
        if !S::is_finite() {
            return Err(Error::Unsupported("cartesian products of orthogonality relations over Q".into()));
        }
        let idx = self.index()?;
        let els: Vec<Vec<usize>> =
            factors.iter().map(|f| f.elements().iter().map(|e| fin::encode(e) as usize).collect()).collect();
        let mut tuples = Vec::new();
        let mut cur = Vec::new();
        enumerate_tuples(&idx, &els, &mut cur, &mut tuples);
        Ok(Cartesian::Tuples(
            tuples.into_iter().map(|t| t.into_iter().map(|i| fin::decode(i as u64, self.dim)).collect()).collect(),
        ))
    }
}

/// Pair set together with its field, for vector-level queries.
#[derive(Clone, Debug)]
pub struct PairSetView<S: Scalar> {
    pub dim: usize,
    pub ps: PairSet,
    _s: std::marker::PhantomData<S>,
}

impl<S: Scalar> PairSetView<S> {
    pub fn polar_list(&self, u: &[S]) -> Vec<Vector<S>> {
        self.ps.polar(fin::encode(u) as usize).iter().map(|i| fin::decode(i as u64, self.dim)).collect()
    }
}

/// Result of [`LocalitySpace::loc_cartesian`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cartesian<S: Scalar> {
    /// Union of products `X1 × ⋯ × Xn` (maximal ones only).
    Products(Vec<Vec<Subspace<S>>>),
    /// Every tuple, for finite fields.
    Tuples(Vec<Vec<Vector<S>>>),
}

impl<S: Scalar> Cartesian<S> {
    pub fn contains(&self, t: &[Vector<S>]) -> bool {
        match self {
            Cartesian::Products(ps) => ps.iter().any(|p| p.iter().zip(t).all(|(x, v)| x.contains(v))),
            Cartesian::Tuples(ts) => ts.iter().any(|u| u.as_slice() == t),
        }
    }

    /// Every tuple; over a finite field products are expanded.
    pub fn tuples(&self) -> Vec<Vec<Vector<S>>> {
        match self {
            Cartesian::Tuples(ts) => ts.clone(),
            Cartesian::Products(ps) => {
                let mut seen = HashSet::new();
                let mut out = Vec::new();
                for p in ps {
                    let els: Vec<Vec<Vector<S>>> = p.iter().map(|x| x.elements()).collect();
                    let mut cur = Vec::new();
                    expand(&els, &mut cur, &mut |t| {
                        if seen.insert(t.to_vec()) {
                            out.push(t.to_vec());
                        }
                    });
                }
                out
            }
        }
    }
}

fn expand<S: Scalar>(els: &[Vec<Vector<S>>], cur: &mut Vec<Vector<S>>, f: &mut impl FnMut(&[Vector<S>])) {
    if cur.len() == els.len() {
        f(cur);
        return;
    }
    for e in &els[cur.len()] {
        cur.push(e.clone());
        expand(els, cur, f);
        cur.pop();
    }
}

fn enumerate_tuples(idx: &RelIndex, els: &[Vec<usize>], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == els.len() {
        out.push(cur.clone());
        return;
    }
    for &e in &els[cur.len()] {
        if cur.iter().all(|&c| idx.related(c, e)) {
            cur.push(e);
            enumerate_tuples(idx, els, cur, out);
            cur.pop();
        }
    }
}

fn block_products<S: Scalar>(
    oriented: &[(Subspace<S>, Subspace<S>)],
    pairs: &[(usize, usize)],
    k: usize,
    cur: Vec<Subspace<S>>,
    out: &mut Vec<Vec<Subspace<S>>>,
) {
    if k == pairs.len() {
        out.push(cur);
        return;
    }
    let (i, j) = pairs[k];
    let mut seen = HashSet::new();
    for (l, r) in oriented {
        let mut next = cur.clone();
        next[i] = next[i].intersect(l);
        next[j] = next[j].intersect(r);
        if seen.insert((next[i].clone(), next[j].clone())) {
            block_products(oriented, pairs, k + 1, next, out);
        }
    }
}

fn maximal_products<S: Scalar>(ps: Vec<Vec<Subspace<S>>>) -> Vec<Vec<Subspace<S>>> {
    let mut kept: Vec<Vec<Subspace<S>>> = Vec::new();
    for p in ps {
        let within = |a: &Vec<Subspace<S>>, b: &Vec<Subspace<S>>| a.iter().zip(b).all(|(x, y)| x.is_subspace_of(y));
        if kept.iter().any(|q| within(&p, q)) {
            continue;
        }
        kept.retain(|q| !within(q, &p));
        kept.push(p);
    }
    kept
}

/// Drops blocks contained in other blocks and guarantees `(0, 0)` is related.
fn normalize_blocks<S: Scalar>(dim: usize, mut raw: Vec<Block<S>>) -> Vec<Block<S>> {
    raw.push(Block::new(Subspace::zero(dim), Subspace::zero(dim)));
    let mut kept: Vec<Block<S>> = Vec::new();
    for b in raw {
        if kept.iter().any(|k| b.within(k)) {
            continue;
        }
        kept.retain(|k| !k.within(&b));
        kept.push(b);
    }
    kept
}

/// Keeps only the inclusion-maximal subspaces of a list.
pub fn maximal_subspaces<S: Scalar>(ms: Vec<Subspace<S>>) -> Vec<Subspace<S>> {
    let mut kept: Vec<Subspace<S>> = Vec::new();
    for m in ms {
        if kept.iter().any(|k| m.is_subspace_of(k)) {
            continue;
        }
        kept.retain(|k| !k.is_subspace_of(&m));
        kept.push(m);
    }
    kept
}

/// Whether a finite union of subspaces is itself a subspace.
pub fn union_is_subspace<S: Scalar>(n: usize, ms: &[Subspace<S>]) -> bool {
    let ms = maximal_subspaces(ms.to_vec());
    match ms.len() {
        0 => false,
        1 => true,
        _ if S::is_finite() => {
            // Over a finite field the union can fill a bigger subspace (three lines in F_2^2).
            let span = Subspace::sum_all(n, &ms);
            let q = S::order().expect("finite");
            let mut seen = HashSet::new();
            for m in &ms {
                for e in m.elements() {
                    seen.insert(fin::encode(&e));
                }
            }
            q.checked_pow(span.dim() as u32) == Some(seen.len() as u64)
        }
        _ => false,
    }
}

/// `a, b` in the union with `a + b` outside it, when the union is not a subspace.
pub fn union_witness<S: Scalar>(ms: &[Subspace<S>]) -> Option<(Vector<S>, Vector<S>)> {
    let ms = maximal_subspaces(ms.to_vec());
    let inside = |v: &[S]| ms.iter().any(|m| m.contains(v));
    if ms.len() < 2 {
        return None;
    }
    if S::is_finite() {
        let elements: Vec<Vector<S>> = ms.iter().flat_map(|m| m.elements()).collect();
        let gens: Vec<Vector<S>> = ms.iter().flat_map(|m| m.basis().to_vec()).collect();
        for a in &elements {
            for b in &gens {
                if !inside(&add(a, b)) {
                    return Some((a.clone(), b.clone()));
                }
            }
        }
        return None;
    }
    // Pick a in M1 and b in M2 outside every other maximal member; the line a + t b then
    // meets each member at most once.
    let others = |i: usize| ms.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, m)| m.clone()).collect::<Vec<_>>();
    let a = generic_element(&ms[0], &others(0))?;
    let b = generic_element(&ms[1], &others(1))?;
    for t in 1..=(ms.len() as i64 + 2) {
        let bt = scale(&S::from_i64(t), &b);
        if !inside(&add(&a, &bt)) {
            return Some((a, bt));
        }
    }
    None
}

/// An element of `x` outside every subspace of `avoid` (each assumed not to contain `x`).
/// Points of the moment curve `Σ t^i x_i` work over infinite fields; finite fields enumerate.
pub fn generic_element<S: Scalar>(x: &Subspace<S>, avoid: &[Subspace<S>]) -> Option<Vector<S>> {
    let k = x.dim();
    let ok = |v: &[S]| avoid.iter().all(|m| !m.contains(v));
    if k == 0 {
        let z = zero_vec(x.ambient());
        return ok(&z).then_some(z);
    }
    if S::is_finite() {
        return x.elements().into_iter().find(|v| ok(v));
    }
    let bound = (avoid.len() * k + 2) as i64;
    for t in 1..=bound {
        let mut c = S::one();
        let mut coeffs = Vec::with_capacity(k);
        for _ in 0..k {
            coeffs.push(c.clone());
            c = c * S::from_i64(t);
        }
        let v = x.combine(&coeffs);
        if ok(&v) {
            return Some(v);
        }
    }
    None
}

fn explicit_is_subspace<S: Scalar>(n: usize, vs: &[Vector<S>]) -> bool {
    if vs.is_empty() {
        return false;
    }
    let span = Subspace::of(n, vs);
    let q = S::order().expect("explicit polars only over finite fields");
    let distinct: HashSet<u64> = vs.iter().map(|v| fin::encode(v)).collect();
    q.checked_pow(span.dim() as u32) == Some(distinct.len() as u64)
}

/// Finite-field locality test: a polar set `P` is a subspace iff `|P| = p^rank(P)`.
pub fn is_locality_indexed<S: Scalar>(idx: &RelIndex) -> Verdict<PolarWitness<S>> {
    let n = idx.dim;
    let q = S::order().expect("finite");
    let k = idx.classes();
    let mut spans: Vec<Subspace<S>> = vec![Subspace::zero(n); k];
    for v in 0..idx.size() {
        let c = idx.class[v] as usize;
        if spans[c].dim() < n {
            let x = fin::decode::<S>(v as u64, n);
            if !spans[c].contains(&x) {
                spans[c] = spans[c].sum(&Subspace::of(n, &[x]));
            }
        }
    }
    for c in 0..k {
        let count: usize = idx.adj[c].iter().map(|d| idx.class_size[d]).sum();
        let span = Subspace::sum_all(n, idx.adj[c].iter().map(|d| &spans[d]));
        if q.checked_pow(span.dim() as u32) == Some(count as u64) {
            continue;
        }
        let u = fin::decode::<S>(idx.reps[c] as u64, n);
        let inside = |v: usize| idx.adj[c].get(idx.class[v] as usize);
        if count == 0 {
            return Verdict::Fails(PolarWitness { u, a: None, b: None, lambda: S::zero(), mu: S::zero() });
        }
        let members: Vec<usize> = (0..idx.size()).filter(|&v| inside(v)).collect();
        if !inside(0) {
            let a = fin::decode::<S>(members[0] as u64, n);
            return Verdict::Fails(PolarWitness {
                u,
                a: Some(a.clone()),
                b: Some(a),
                lambda: S::zero(),
                mu: S::zero(),
            });
        }
        // 0 ∈ P and P is not closed under adding some member of a spanning subset.
        let mut gens: Vec<Vector<S>> = Vec::new();
        let mut g_span = Subspace::zero(n);
        for &m in &members {
            let x = fin::decode::<S>(m as u64, n);
            if !g_span.contains(&x) {
                g_span = g_span.sum(&Subspace::of(n, &[x.clone()]));
                gens.push(x);
            }
        }
        for &m in &members {
            let a = fin::decode::<S>(m as u64, n);
            for b in &gens {
                if !inside(fin::encode(&add(&a, b)) as usize) {
                    return Verdict::Fails(PolarWitness {
                        u,
                        a: Some(a),
                        b: Some(b.clone()),
                        lambda: S::one(),
                        mu: S::one(),
                    });
                }
            }
        }
        unreachable!("a finite additively closed set containing 0 is a subspace");
    }
    Verdict::Holds
}

/// With escape functionals `L`, the polar of `u ∈ ker L` is `H_u ∪ (V \ ker L)`; this is a
/// subspace exactly when `ker L ⊆ H_u`, i.e. when `G` vanishes on `ker L × ker L`.
fn ortho_is_locality<S: Scalar>(n: usize, o: &OrthoForm<S>) -> Verdict<PolarWitness<S>> {
    if o.escape.is_empty() {
        return Verdict::Holds;
    }
    let kernel = Subspace::of(n, &crate::exactla::nullspace(&o.escape, n).expect("shape"));
    for u in kernel.basis() {
        for v in kernel.basis() {
            if !o.form(u, v).is_zero() {
                // a escapes and b = v - a does too, but a + b = v ∈ ker L is not orthogonal to u.
                let l = &o.escape[0];
                let a = (0..n).map(|i| unit::<S>(n, i)).find(|e| !dot(l, e).is_zero()).expect("L ≠ 0");
                let b = crate::exactla::sub(v, &a);
                return Verdict::Fails(PolarWitness {
                    u: u.clone(),
                    a: Some(a),
                    b: Some(b),
                    lambda: S::one(),
                    mu: S::one(),
                });
            }
        }
    }
    Verdict::Holds
}

/// Depth-first search over vectors with coordinates in `{0, 1, -1, …, r, -r}`, in lexicographic
/// order of that coordinate sequence. Returns the first hit.
pub fn grid_search<S: Scalar, T>(n: usize, r: i64, mut f: impl FnMut(&[S]) -> Option<T>) -> Option<T> {
    let mut vals = vec![0i64];
    for k in 1..=r {
        vals.push(k);
        vals.push(-k);
    }
    let total = (vals.len() as u64).checked_pow(n as u32)?;
    for mut idx in 0..total {
        let mut digits = vec![0i64; n];
        for d in digits.iter_mut().rev() {
            *d = vals[(idx % vals.len() as u64) as usize];
            idx /= vals.len() as u64;
        }
        if let Some(t) = f(&vec_from_i64::<S>(&digits)) {
            return Some(t);
        }
    }
    None
}

/// A linear map known to be a locality map `(f × f)(⊤_V) ⊆ ⊤_W`.
#[derive(Clone, Debug)]
pub struct LocMap<S: Scalar> {
    pub map: LinMap<S>,
    pub source: LocalitySpace<S>,
    pub target: LocalitySpace<S>,
}

impl<S: Scalar> LocMap<S> {
    pub fn new_checked(map: LinMap<S>, source: LocalitySpace<S>, target: LocalitySpace<S>) -> Result<Self> {
        match source.independent_maps(&target, &map, &map)? {
            Verdict::Holds => Ok(LocMap { map, source, target }),
            Verdict::Fails(_) => Err(Error::NotIndependent("map does not preserve the relation".into())),
            Verdict::Unknown(s) => Err(Error::PreconditionFailed(s)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{is_zero, vec_from_i64 as v};
    use crate::{F2, F3, F5, Q};

    fn line<S: Scalar>(n: usize, x: &[i64]) -> Subspace<S> {
        Subspace::of(n, &[v(x)])
    }

    /// ⊤ = V×{0} ∪ {0}×V ∪ ⟨e1,e3⟩×⟨e2+e4⟩ ∪ sym.
    pub(crate) fn r4<S: Scalar>() -> LocalitySpace<S> {
        let v4 = Subspace::full(4);
        let z = Subspace::zero(4);
        LocalitySpace::from_blocks(4, vec![(v4, z), (Subspace::coordinate(4, &[0, 2]), line(4, &[0, 1, 0, 1]))])
            .unwrap()
    }

    #[test]
    fn related_examples() {
        let s = LocalitySpace::<Q>::euclidean(3);
        assert!(s.related(&v(&[1, 0, 0]), &v(&[0, 1, 0])).unwrap());
        let r = r4::<Q>();
        assert!(r.related(&v(&[1, 0, 0, 0]), &v(&[0, 1, 0, 1])).unwrap());
        assert!(!r.related(&v(&[1, 0, 0, 0]), &v(&[0, 1, 0, 0])).unwrap());
        for s in [s, r] {
            assert!(s.related(&zero_vec(s.dim()), &zero_vec(s.dim())).unwrap());
        }
        assert!(LocalitySpace::<Q>::euclidean(2).related(&v(&[1, 0]), &v(&[1, 0, 0])).is_err());
    }

    #[test]
    fn polar_examples() {
        let s = LocalitySpace::<Q>::euclidean(3);
        assert!(s.polar(&[]).unwrap().as_subspace(3).unwrap().is_full());
        let p = s.polar(&[v(&[1, 0, 0])]).unwrap();
        assert!(p.is_subspace);
        assert_eq!(p.as_subspace(3).unwrap(), Subspace::coordinate(3, &[1, 2]));
        let p = r4::<Q>().polar(&[v(&[1, 0, 0, 0])]).unwrap();
        assert!(p.is_subspace);
        assert_eq!(p.as_subspace(4).unwrap(), line(4, &[0, 1, 0, 1]));
    }

    #[test]
    fn is_locality_examples() {
        assert!(LocalitySpace::<Q>::euclidean(3).is_locality().holds());
        assert!(LocalitySpace::<Q>::trivial(3).is_locality().holds());
        let f3 = LocalitySpace::<F3>::from_pairs(2, vec![(v(&[1, 0]), v(&[0, 1])), (v(&[1, 0]), v(&[0, 2]))]).unwrap();
        let verdict = f3.is_locality();
        let w = verdict.witness().expect("not locality");
        assert!(w.replay(&f3));
        assert!(r4::<Q>().is_locality().holds());
        assert!(r4::<F5>().is_locality().holds());
    }

    #[test]
    fn union_of_three_lines_in_f2_plane_is_a_subspace() {
        let ls = vec![line::<F2>(2, &[1, 0]), line(2, &[0, 1]), line(2, &[1, 1])];
        assert!(union_is_subspace(2, &ls));
        let lq = vec![line::<Q>(2, &[1, 0]), line(2, &[0, 1]), line(2, &[1, 1])];
        assert!(!union_is_subspace(2, &lq));
        let (a, b) = union_witness(&lq).unwrap();
        assert!(!lq.iter().any(|m| m.contains(&add(&a, &b))));
    }

    #[test]
    fn symbolic_non_locality_has_replayable_witness() {
        // ⟨e1⟩×⟨e2⟩ ∪ ⟨e1⟩×⟨e3⟩: P(e1) = ⟨e2⟩ ∪ ⟨e3⟩.
        let s = LocalitySpace::<Q>::from_blocks(
            3,
            vec![
                (Subspace::coordinate(3, &[0]), Subspace::coordinate(3, &[1])),
                (Subspace::coordinate(3, &[0]), Subspace::coordinate(3, &[2])),
                (Subspace::full(3), Subspace::zero(3)),
            ],
        )
        .unwrap();
        let verdict = s.is_locality();
        assert!(verdict.witness().unwrap().replay(&s));
    }

    #[test]
    fn closure_examples() {
        let s = LocalitySpace::<F3>::from_pairs(1, vec![(v(&[1]), v(&[1]))]).unwrap();
        let Closure::Exact(c) = s.closure() else { panic!() };
        assert_eq!(c.to_pairs().unwrap().ps.len(), 9);

        let s = LocalitySpace::<F2>::from_pairs(2, vec![(v(&[1, 0]), v(&[0, 1]))]).unwrap();
        let Closure::Exact(c) = s.closure() else { panic!() };
        let pv = c.to_pairs().unwrap();
        assert_eq!(Subspace::of(2, &pv.polar_list(&v(&[1, 0]))), line(2, &[0, 1]));
        assert_eq!(pv.polar_list(&v(&[1, 0])).len(), 2);
        assert_eq!(pv.polar_list(&v(&[0, 1])).len(), 2);
        assert_eq!(pv.polar_list(&v(&[1, 1])), vec![v(&[0, 0])]);
        assert_eq!(pv.polar_list(&v(&[0, 0])).len(), 4);

        let Closure::Exact(again) = c.closure() else { panic!() };
        assert_eq!(again, c);
    }

    #[test]
    fn independent_maps_examples() {
        let s = LocalitySpace::<Q>::euclidean(2);
        let id = LinMap::identity(2);
        assert!(s.independent_maps(&s, &id, &id).unwrap().holds());
        let p = LinMap::new(2, 2, vec![v(&[1, 0]), v(&[0, 0])]).unwrap();
        let verdict = s.independent_maps(&s, &p, &id).unwrap();
        assert_eq!(verdict.witness().unwrap(), &(v(&[1, 1]), v(&[1, -1])));

        let f = LocalitySpace::<F5>::euclidean(2);
        let pf = LinMap::new(2, 2, vec![v(&[1, 0]), v(&[0, 0])]).unwrap();
        assert!(f.independent_maps(&f, &pf, &LinMap::identity(2)).unwrap().fails());
        let zero = LinMap::zero(2, 2);
        assert!(f.independent_maps(&f, &zero, &LinMap::identity(2)).unwrap().holds());
    }

    #[test]
    fn cartesian_examples() {
        let e = LocalitySpace::<F3>::euclidean(2);
        let v2 = Subspace::<F3>::full(2);
        let triples = e.loc_cartesian(&[v2.clone(), v2.clone(), v2]).unwrap().tuples();
        let v2 = Subspace::<F5>::full(2);
        assert!(triples.iter().all(|t| t.iter().any(|x| is_zero(x))));
        let pairs = LocalitySpace::<F5>::euclidean(2).loc_cartesian(&[v2.clone(), v2.clone()]).unwrap().tuples();
        let expected = fin::all_vectors::<F5>(2)
            .unwrap()
            .iter()
            .flat_map(|x| fin::all_vectors::<F5>(2).unwrap().into_iter().map(move |y| (x.clone(), y)))
            .filter(|(x, y)| dot(x, y) == F5::new(0))
            .count();
        assert_eq!(pairs.len(), expected);
        let v2 = Subspace::<Q>::full(2);
        let t = LocalitySpace::<Q>::trivial(2).loc_cartesian(&[v2.clone(), v2.clone()]).unwrap();
        assert_eq!(t, Cartesian::Products(vec![vec![v2.clone(), v2]]));
    }

    #[test]
    fn blocks_are_normalized() {
        let s = LocalitySpace::<Q>::from_blocks(
            2,
            vec![
                (Subspace::coordinate(2, &[0]), Subspace::coordinate(2, &[1])),
                (Subspace::coordinate(2, &[1]), Subspace::coordinate(2, &[0])),
                (Subspace::full(2), Subspace::zero(2)),
            ],
        )
        .unwrap();
        let Relation::Blocks(bs) = s.relation() else { panic!() };
        assert_eq!(bs.len(), 2);
    }
}
