//! Properly decorated rooted forests with the Grossman-Larson product and the unshuffle
//! coproduct over trees.
//!
//! `F1 ∗ F2` grafts every tree of `F2` either onto a vertex of `F1` or next to it as a new
//! root, summing over all such choices. Counting admissible cuts of a forest with a virtual
//! root gives the same coefficients up to automorphism factors, which is the cross-check.
//! Dropping the root slot (cuts on real edges only) breaks the bialgebra axiom already on
//! `• ∗ •`; [`gl_product_edge_only`] keeps that variant for the negative control.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactla::{nullspace, Vector};
use crate::json;
use crate::scalar::Scalar;

/// A finite locality set of decoration labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Omega {
    pub labels: Vec<String>,
    rel: Vec<Vec<bool>>,
}

impl Omega {
    pub fn new(labels: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self> {
        let k = labels.len();
        let mut rel = vec![vec![false; k]; k];
        for &(a, b) in pairs {
            if a >= k || b >= k {
                return Err(Error::PreconditionFailed(format!("label index out of range in pair ({a}, {b})")));
            }
            rel[a][b] = true;
            rel[b][a] = true;
        }
        Ok(Omega { labels, rel })
    }

    /// Every pair of labels related, including each label with itself.
    pub fn full(labels: Vec<String>) -> Self {
        let k = labels.len();
        Omega { labels, rel: vec![vec![true; k]; k] }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.rel[a][b]
    }

    pub fn label(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }

    pub fn to_json(&self) -> Value {
        let mut pairs = Vec::new();
        for a in 0..self.len() {
            for b in a..self.len() {
                if self.rel[a][b] {
                    pairs.push(json!([self.labels[a], self.labels[b]]));
                }
            }
        }
        json!({"labels": self.labels, "pairs": pairs})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let labels: Vec<String> = json::array(json::field(v, "", "labels")?, "/labels")?
            .iter()
            .enumerate()
            .map(|(i, l)| {
                l.as_str().map(str::to_string).ok_or_else(|| parse_err(&format!("/labels/{i}"), "expected a string"))
            })
            .collect::<Result<_>>()?;
        let mut pairs = Vec::new();
        for (i, p) in json::array(json::field(v, "", "pairs")?, "/pairs")?.iter().enumerate() {
            let path = format!("/pairs/{i}");
            let ends = json::array(p, &path)?;
            if ends.len() != 2 {
                return Err(parse_err(&path, "expected a pair of labels"));
            }
            let mut idx = [0; 2];
            for (k, e) in ends.iter().enumerate() {
                let name = e.as_str().ok_or_else(|| parse_err(&format!("{path}/{k}"), "expected a string"))?;
                idx[k] = labels
                    .iter()
                    .position(|l| l == name)
                    .ok_or_else(|| parse_err(&format!("{path}/{k}"), &format!("unknown label {name:?}")))?;
            }
            pairs.push((idx[0], idx[1]));
        }
        Omega::new(labels, &pairs)
    }
}

fn parse_err(path: &str, msg: &str) -> Error {
    Error::Parse(format!("{path}: {msg}"))
}

/// A decorated rooted tree; children are kept sorted, which makes equality isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tree {
    pub label: usize,
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn new(label: usize, mut children: Vec<Tree>) -> Self {
        children.sort();
        Tree { label, children }
    }

    pub fn leaf(label: usize) -> Self {
        Tree { label, children: Vec::new() }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }

    fn labels_into(&self, out: &mut Vec<usize>) {
        out.push(self.label);
        for c in &self.children {
            c.labels_into(out);
        }
    }

    /// Size of the automorphism group.
    pub fn symmetry(&self) -> u64 {
        group_symmetry(&self.children)
    }

    pub fn to_json(&self, omega: &Omega) -> Value {
        json!({"d": omega.labels[self.label], "children": self.children.iter().map(|c| c.to_json(omega)).collect::<Vec<_>>()})
    }

    pub fn from_json(v: &Value, omega: &Omega, path: &str) -> Result<Self> {
        let name = json::str_field(v, path, "d")?;
        let label =
            omega.label(name).ok_or_else(|| parse_err(&format!("{path}/d"), &format!("unknown label {name:?}")))?;
        let children = match v.get("children") {
            None => Vec::new(),
            Some(c) => json::array(c, &format!("{path}/children"))?
                .iter()
                .enumerate()
                .map(|(i, c)| Tree::from_json(c, omega, &format!("{path}/children/{i}")))
                .collect::<Result<_>>()?,
        };
        Ok(Tree::new(label, children))
    }

    /// Preorder rendering such as `a(b,c(d))`.
    pub fn render(&self, omega: &Omega) -> String {
        let mut s = omega.labels[self.label].clone();
        if !self.children.is_empty() {
            s.push('(');
            s.push_str(&self.children.iter().map(|c| c.render(omega)).collect::<Vec<_>>().join(","));
            s.push(')');
        }
        s
    }
}

/// `∏ m_i! · sym(T_i)^{m_i}` over the distinct members of a sorted list.
fn group_symmetry(trees: &[Tree]) -> u64 {
    let mut out = 1u64;
    let mut i = 0;
    while i < trees.len() {
        let j = trees[i..].iter().take_while(|t| **t == trees[i]).count();
        out *= (1..=j as u64).product::<u64>() * trees[i].symmetry().pow(j as u32);
        i += j;
    }
    out
}

/// A forest as a sorted multiset of trees; the empty forest is the unit.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Forest(Vec<Tree>);

impl Forest {
    pub fn new(mut trees: Vec<Tree>) -> Self {
        trees.sort();
        Forest(trees)
    }

    pub fn unit() -> Self {
        Forest(Vec::new())
    }

    pub fn trees(&self) -> &[Tree] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn size(&self) -> usize {
        self.0.iter().map(Tree::size).sum()
    }

    pub fn labels(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for t in &self.0 {
            t.labels_into(&mut out);
        }
        out
    }

    pub fn symmetry(&self) -> u64 {
        group_symmetry(&self.0)
    }

    /// Distinct vertices carry related labels.
    pub fn is_proper(&self, omega: &Omega) -> bool {
        let l = self.labels();
        (0..l.len()).all(|i| (i + 1..l.len()).all(|j| omega.related(l[i], l[j])))
    }

    pub fn to_json(&self, omega: &Omega) -> Value {
        Value::Array(self.0.iter().map(|t| t.to_json(omega)).collect())
    }

    pub fn from_json(v: &Value, omega: &Omega) -> Result<Self> {
        let trees = json::array(v, "")?
            .iter()
            .enumerate()
            .map(|(i, t)| Tree::from_json(t, omega, &format!("/{i}")))
            .collect::<Result<_>>()?;
        Ok(Forest::new(trees))
    }

    pub fn render(&self, omega: &Omega) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        self.0.iter().map(|t| t.render(omega)).collect::<Vec<_>>().join(" ")
    }
}

impl From<Tree> for Forest {
    fn from(t: Tree) -> Self {
        Forest(vec![t])
    }
}

/// `(F1, F2)` related: every vertex of `F1` against every vertex of `F2`.
pub fn forests_related(omega: &Omega, a: &Forest, b: &Forest) -> bool {
    let (la, lb) = (a.labels(), b.labels());
    la.iter().all(|&x| lb.iter().all(|&y| omega.related(x, y)))
}

/// Finite linear combination of forests; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GLElement<S: Scalar>(BTreeMap<Forest, S>);

/// Element of `H^{⊗k}` keyed by tuples of forests.
pub type GLTensor<S> = BTreeMap<Vec<Forest>, S>;

fn add_term<K: Ord, S: Scalar>(m: &mut BTreeMap<K, S>, k: K, c: S) {
    if c.is_zero() {
        return;
    }
    match m.entry(k) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let v = e.get().clone() + c;
            if v.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = v;
            }
        }
    }
}

impl<S: Scalar> GLElement<S> {
    pub fn zero() -> Self {
        GLElement(BTreeMap::new())
    }

    pub fn unit() -> Self {
        Self::forest(Forest::unit())
    }

    pub fn forest(f: Forest) -> Self {
        let mut m = BTreeMap::new();
        m.insert(f, S::one());
        GLElement(m)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Forest, S)>) -> Self {
        let mut m = BTreeMap::new();
        for (f, c) in terms {
            add_term(&mut m, f, c);
        }
        GLElement(m)
    }

    pub fn terms(&self) -> &BTreeMap<Forest, S> {
        &self.0
    }

    pub fn coeff(&self, f: &Forest) -> S {
        self.0.get(f).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_scaled(&mut self, c: &S, other: &GLElement<S>) {
        for (f, v) in &other.0 {
            add_term(&mut self.0, f.clone(), c.clone() * v.clone());
        }
    }

    pub fn scaled(&self, c: &S) -> Self {
        let mut out = Self::zero();
        out.add_scaled(c, self);
        out
    }

    pub fn sub(&self, other: &GLElement<S>) -> Self {
        let mut out = self.clone();
        out.add_scaled(&-S::one(), other);
        out
    }

    pub fn counit(&self) -> S {
        self.coeff(&Forest::unit())
    }

    /// Component of vertex count `k`.
    pub fn homogeneous(&self, k: usize) -> Self {
        GLElement(self.0.iter().filter(|(f, _)| f.size() == k).map(|(f, c)| (f.clone(), c.clone())).collect())
    }

    /// Largest vertex count present.
    pub fn degree(&self) -> usize {
        self.0.keys().map(Forest::size).max().unwrap_or(0)
    }

    pub fn to_json(&self, omega: &Omega) -> Value {
        Value::Array(self.0.iter().map(|(f, c)| json!({"coef": c.to_json(), "forest": f.to_json(omega)})).collect())
    }
}

/// Grafting with the root slot: each tree of `b` goes onto a vertex of `a` or becomes a root.
fn graft_sum<S: Scalar>(a: &Forest, b: &Forest, root_slot: bool) -> GLElement<S> {
    let va = a.size();
    if a.is_unit() {
        return GLElement::forest(b.clone());
    }
    let slots = va + usize::from(root_slot);
    let k = b.trees().len();
    let mut out = BTreeMap::new();
    let total = (slots as u64).pow(k as u32);
    for code in 0..total {
        let mut attach: Vec<Vec<Tree>> = vec![Vec::new(); slots];
        let mut c = code;
        for t in b.trees() {
            attach[(c % slots as u64) as usize].push(t.clone());
            c /= slots as u64;
        }
        let mut counter = 0;
        let mut trees: Vec<Tree> = a.trees().iter().map(|t| graft_tree(t, &mut counter, &attach)).collect();
        if root_slot {
            trees.extend(attach[va].iter().cloned());
        }
        add_term(&mut out, Forest::new(trees), S::one());
    }
    GLElement(out)
}

fn graft_tree(t: &Tree, counter: &mut usize, attach: &[Vec<Tree>]) -> Tree {
    let me = *counter;
    *counter += 1;
    let mut children: Vec<Tree> = t.children.iter().map(|c| graft_tree(c, counter, attach)).collect();
    children.extend(attach[me].iter().cloned());
    Tree::new(t.label, children)
}

fn bilinear<S: Scalar>(
    a: &GLElement<S>,
    b: &GLElement<S>,
    mut f: impl FnMut(&Forest, &Forest) -> Result<GLElement<S>>,
) -> Result<GLElement<S>> {
    let mut out = GLElement::zero();
    for (fa, ca) in &a.0 {
        for (fb, cb) in &b.0 {
            out.add_scaled(&(ca.clone() * cb.clone()), &f(fa, fb)?);
        }
    }
    Ok(out)
}

/// `a ∗ b`, defined when every pair of forests involved is related.
pub fn gl_product<S: Scalar>(omega: &Omega, a: &GLElement<S>, b: &GLElement<S>) -> Result<GLElement<S>> {
    bilinear(a, b, |x, y| {
        if !forests_related(omega, x, y) {
            return Err(Error::NotIndependent(format!("{} and {}", x.render(omega), y.render(omega))));
        }
        Ok(graft_sum(x, y, true))
    })
}

/// `a ∗ b` in the Hopf algebra of all forests, with no locality restriction.
pub fn gl_product_unrestricted<S: Scalar>(a: &GLElement<S>, b: &GLElement<S>) -> GLElement<S> {
    bilinear(a, b, |x, y| Ok(graft_sum(x, y, true))).expect("infallible")
}

/// The product read off the literal edge-only cut definition: no tree of `b` may stay a root.
pub fn gl_product_edge_only<S: Scalar>(a: &GLElement<S>, b: &GLElement<S>) -> GLElement<S> {
    bilinear(a, b, |x, y| Ok(if y.is_unit() { GLElement::forest(x.clone()) } else { graft_sum(x, y, false) }))
        .expect("infallible")
}

/// Product of several elements, left to right.
pub fn gl_product_all<S: Scalar>(omega: &Omega, xs: &[GLElement<S>]) -> Result<GLElement<S>> {
    xs.iter().try_fold(GLElement::unit(), |acc, x| gl_product(omega, &acc, x))
}

/// Coefficient of `f` in `f1 ∗ f2` from admissible cuts of `f` below a virtual root, weighted by
/// `sym(f1) sym(f2) / sym(f)` to pass from labelled cuts to isomorphism classes.
pub fn cut_count_coefficient<S: Scalar>(f1: &Forest, f2: &Forest, f: &Forest) -> S {
    let n = count_cuts(f, f1, f2);
    let num = S::from_i64((n * f1.symmetry() * f2.symmetry()) as i64);
    num.div(&S::from_i64(f.symmetry() as i64)).expect("symmetry factors are invertible in characteristic 0")
}

/// Number of admissible cuts `c` of `f` (edges, plus the edges from a virtual root to each
/// root) with `R_c(f) = lower` and `T_c(f) = upper`.
pub fn count_cuts(f: &Forest, lower: &Forest, upper: &Forest) -> u64 {
    // Flatten into parent pointers; vertex v has an edge to its parent (None: virtual root).
    let mut labels = Vec::new();
    let mut parent = Vec::new();
    fn walk(t: &Tree, p: Option<usize>, labels: &mut Vec<usize>, parent: &mut Vec<Option<usize>>) {
        let me = labels.len();
        labels.push(t.label);
        parent.push(p);
        for c in &t.children {
            walk(c, Some(me), labels, parent);
        }
    }
    for t in f.trees() {
        walk(t, None, &mut labels, &mut parent);
    }
    let nv = labels.len();
    let children: Vec<Vec<usize>> = (0..nv).map(|v| (0..nv).filter(|&c| parent[c] == Some(v)).collect()).collect();
    let build = |v: usize, keep: &dyn Fn(usize) -> bool| -> Option<Tree> {
        fn rec(v: usize, labels: &[usize], children: &[Vec<usize>], keep: &dyn Fn(usize) -> bool) -> Tree {
            Tree::new(
                labels[v],
                children[v].iter().filter(|&&c| keep(c)).map(|&c| rec(c, labels, children, keep)).collect(),
            )
        }
        keep(v).then(|| rec(v, &labels, &children, keep))
    };
    let mut count = 0;
    for mask in 0u64..1 << nv {
        let cut = |v: usize| mask >> v & 1 == 1;
        // Admissible: no cut edge above another cut edge.
        let admissible = (0..nv).filter(|&v| cut(v)).all(|v| {
            let mut p = parent[v];
            while let Some(u) = p {
                if cut(u) {
                    return false;
                }
                p = parent[u];
            }
            true
        });
        if !admissible {
            continue;
        }
        let up = Forest::new((0..nv).filter(|&v| cut(v)).map(|v| build(v, &|u| u == v || !cut(u)).unwrap()).collect());
        // Vertices above a cut edge are dropped from the lower part.
        let above = |u: usize| {
            let mut p = Some(u);
            while let Some(w) = p {
                if cut(w) {
                    return true;
                }
                p = parent[w];
            }
            false
        };
        let down = Forest::new(
            (0..nv).filter(|&v| parent[v].is_none() && !above(v)).filter_map(|v| build(v, &|u| !above(u))).collect(),
        );
        if &up == upper && &down == lower {
            count += 1;
        }
    }
    count
}

fn subsets_split(f: &Forest) -> Vec<(Forest, Forest)> {
    let ts = f.trees();
    (0u64..1 << ts.len())
        .map(|mask| {
            let (mut l, mut r) = (Vec::new(), Vec::new());
            for (i, t) in ts.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    l.push(t.clone())
                } else {
                    r.push(t.clone())
                }
            }
            (Forest(l), Forest(r))
        })
        .collect()
}

/// `Δ(T1⋯Tn) = Σ_I T_I ⊗ T_{[n]∖I}`, over subsets of tree positions.
pub fn gl_coproduct<S: Scalar>(a: &GLElement<S>) -> GLTensor<S> {
    let mut out = BTreeMap::new();
    for (f, c) in &a.0 {
        for (l, r) in subsets_split(f) {
            add_term(&mut out, vec![l, r], c.clone());
        }
    }
    out
}

/// Applies `g` to factor `pos` of every tensor term.
fn apply_at<S: Scalar>(t: &GLTensor<S>, pos: usize, g: impl Fn(&Forest) -> GLTensor<S>) -> GLTensor<S> {
    let mut out = BTreeMap::new();
    for (key, c) in t {
        for (parts, d) in g(&key[pos]) {
            let mut k = key[..pos].to_vec();
            k.extend(parts);
            k.extend(key[pos + 1..].iter().cloned());
            add_term(&mut out, k, c.clone() * d);
        }
    }
    out
}

fn single<S: Scalar>(a: &GLElement<S>) -> GLTensor<S> {
    a.0.iter().map(|(f, c)| (vec![f.clone()], c.clone())).collect()
}

fn reduced_forest<S: Scalar>(f: &Forest) -> GLTensor<S> {
    let mut out = BTreeMap::new();
    for (l, r) in subsets_split(f) {
        if !l.is_unit() && !r.is_unit() {
            add_term(&mut out, vec![l, r], S::one());
        }
    }
    out
}

/// `Δ̃^(k)`: `ρ` for `k = 0`, then `(Δ̃ ⊗ Id^{⊗k}) ∘ Δ̃^(k)`.
pub fn reduced_coproduct_power<S: Scalar>(a: &GLElement<S>, k: usize) -> GLTensor<S> {
    let mut t: GLTensor<S> = single(a);
    t.remove(&vec![Forest::unit()]);
    for _ in 0..k {
        t = apply_at(&t, 0, reduced_forest);
    }
    t
}

/// `(ρ ⊗ ⋯ ⊗ ρ) ∘ Δ^(k)` with the iterated full coproduct, for cross-checking.
pub fn projected_coproduct_power<S: Scalar>(a: &GLElement<S>, k: usize) -> GLTensor<S> {
    let mut t = single(a);
    for _ in 0..k {
        t = apply_at(&t, 0, |f| gl_coproduct(&GLElement::forest(f.clone())));
    }
    t.retain(|key, _| key.iter().all(|f| !f.is_unit()));
    t
}

/// Least `k` with `Δ̃^(k)(a) = 0`.
pub fn deg_p<S: Scalar>(a: &GLElement<S>) -> usize {
    let mut k = 0;
    while !reduced_coproduct_power(a, k).is_empty() {
        k += 1;
    }
    k
}

/// `S(1) = 1`, `S(x) = −x − Σ S(x') ∗ x''` over the reduced coproduct.
pub fn antipode<S: Scalar>(a: &GLElement<S>) -> GLElement<S> {
    let mut memo = HashMap::new();
    let mut out = GLElement::zero();
    for (f, c) in &a.0 {
        out.add_scaled(c, &antipode_forest(f, &mut memo));
    }
    out
}

fn antipode_forest<S: Scalar>(f: &Forest, memo: &mut HashMap<Forest, GLElement<S>>) -> GLElement<S> {
    if let Some(r) = memo.get(f) {
        return r.clone();
    }
    let out = if f.is_unit() {
        GLElement::unit()
    } else {
        let mut acc = GLElement::forest(f.clone()).scaled(&-S::one());
        for (key, c) in reduced_forest::<S>(f) {
            let sl = antipode_forest(&key[0], memo);
            let prod = gl_product_unrestricted(&sl, &GLElement::forest(key[1].clone()));
            acc.add_scaled(&-c, &prod);
        }
        acc
    };
    memo.insert(f.clone(), out.clone());
    out
}

/// `m(S ⊗ Id)Δ(a)`, equal to `ε(a)·1` for an antipode.
pub fn antipode_convolution<S: Scalar>(a: &GLElement<S>) -> GLElement<S> {
    let mut out = GLElement::zero();
    for (key, c) in gl_coproduct(a) {
        let s = antipode(&GLElement::forest(key[0].clone()));
        out.add_scaled(&c, &gl_product_unrestricted(&s, &GLElement::forest(key[1].clone())));
    }
    out
}

/// Product on `H ⊗ H`: `(a ⊗ b)(c ⊗ d) = (a ∗ c) ⊗ (b ∗ d)`.
pub fn tensor_square_product<S: Scalar>(
    omega: &Omega,
    x: &GLTensor<S>,
    y: &GLTensor<S>,
    product: &dyn Fn(&Omega, &GLElement<S>, &GLElement<S>) -> Result<GLElement<S>>,
) -> Result<GLTensor<S>> {
    let mut out = BTreeMap::new();
    for (kx, cx) in x {
        for (ky, cy) in y {
            let l = product(omega, &GLElement::forest(kx[0].clone()), &GLElement::forest(ky[0].clone()))?;
            let r = product(omega, &GLElement::forest(kx[1].clone()), &GLElement::forest(ky[1].clone()))?;
            for (fl, cl) in l.terms() {
                for (fr, cr) in r.terms() {
                    add_term(&mut out, vec![fl.clone(), fr.clone()], cx.clone() * cy.clone() * cl.clone() * cr.clone());
                }
            }
        }
    }
    Ok(out)
}

/// `Δ(a ∗ b) = Δ(a) ∗ Δ(b)` for one pair of forests.
pub fn bialgebra_holds<S: Scalar>(omega: &Omega, a: &Forest, b: &Forest) -> Result<bool> {
    let (ea, eb) = (GLElement::<S>::forest(a.clone()), GLElement::forest(b.clone()));
    let lhs = gl_coproduct(&gl_product(omega, &ea, &eb)?);
    let rhs = tensor_square_product(omega, &gl_coproduct(&ea), &gl_coproduct(&eb), &|o, x, y| gl_product(o, x, y))?;
    Ok(lhs == rhs)
}

/// The same identity for the edge-only product.
pub fn bialgebra_holds_edge_only<S: Scalar>(omega: &Omega, a: &Forest, b: &Forest) -> bool {
    let (ea, eb) = (GLElement::<S>::forest(a.clone()), GLElement::forest(b.clone()));
    let lhs = gl_coproduct(&gl_product_edge_only(&ea, &eb));
    let rhs =
        tensor_square_product(omega, &gl_coproduct(&ea), &gl_coproduct(&eb), &|_, x, y| Ok(gl_product_edge_only(x, y)))
            .expect("infallible");
    lhs == rhs
}

/// Terms `(α, [t1, …, tp])` with `Σ α t1 ∗ ⋯ ∗ tp` equal to the input, each `ti` a tree.
pub type MMDecomposition<S> = Vec<(S, Vec<Tree>)>;

/// Peels off `(1/n!) Σ x1 ∗ ⋯ ∗ xn` read from `Δ̃^(n−1)(x) = Σ x1 ⊗ ⋯ ⊗ xn` (all factors single
/// trees, since only forests of exactly `n` trees survive), which lowers `deg_p`.
pub fn mm_decompose<S: Scalar>(omega: &Omega, f: &Forest) -> Result<MMDecomposition<S>> {
    if !f.is_proper(omega) {
        return Err(Error::NonProperDecoration);
    }
    let p = S::characteristic();
    if p != 0 && (f.trees().len() as u32) >= p {
        return Err(Error::CharacteristicNotZero(p));
    }
    let mut x = GLElement::<S>::forest(f.clone());
    let mut terms: BTreeMap<Vec<Tree>, S> = BTreeMap::new();
    if f.is_unit() {
        terms.insert(Vec::new(), S::one());
        return Ok(terms.into_iter().map(|(k, c)| (c, k)).collect());
    }
    let mut last = usize::MAX;
    while !x.is_zero() {
        let n = deg_p(&x);
        debug_assert!(n < last, "deg_p must drop");
        last = n;
        let fact = S::from_i64((1..=n as i64).product());
        let inv = fact.inv().expect("characteristic checked");
        let top = reduced_coproduct_power(&x, n - 1);
        let mut peeled = GLElement::zero();
        for (key, c) in top {
            let trees: Vec<Tree> = key
                .iter()
                .map(|forest| match forest.trees() {
                    [t] => Ok(t.clone()),
                    _ => Err(Error::Inconsistent("top reduced coproduct has a non-tree factor".into())),
                })
                .collect::<Result<_>>()?;
            let coef = c * inv.clone();
            let prod =
                gl_product_all(omega, &trees.iter().map(|t| GLElement::forest(t.clone().into())).collect::<Vec<_>>())?;
            peeled.add_scaled(&coef, &prod);
            add_term(&mut terms, trees, coef);
        }
        x = x.sub(&peeled);
    }
    Ok(terms.into_iter().map(|(k, c)| (c, k)).collect())
}

/// `Σ α t1 ∗ ⋯ ∗ tp`.
pub fn mm_recompose<S: Scalar>(omega: &Omega, d: &MMDecomposition<S>) -> Result<GLElement<S>> {
    let mut out = GLElement::zero();
    for (c, ts) in d {
        let prod = gl_product_all(omega, &ts.iter().map(|t| GLElement::forest(t.clone().into())).collect::<Vec<_>>())?;
        out.add_scaled(c, &prod);
    }
    Ok(out)
}

/// All decorated trees with `k` vertices.
pub fn trees_of_size(labels: usize, k: usize) -> Vec<Tree> {
    let mut memo = HashMap::new();
    trees_memo(labels, k, &mut memo)
}

fn trees_memo(labels: usize, k: usize, memo: &mut HashMap<(bool, usize), Vec<Tree>>) -> Vec<Tree> {
    if let Some(r) = memo.get(&(true, k)) {
        return r.clone();
    }
    let mut out = Vec::new();
    if k > 0 {
        for f in forests_inner(labels, k - 1, memo) {
            for l in 0..labels {
                out.push(Tree::new(l, f.0.clone()));
            }
        }
    }
    out.sort();
    memo.insert((true, k), out.clone());
    out
}

fn forests_inner(labels: usize, k: usize, memo: &mut HashMap<(bool, usize), Vec<Tree>>) -> Vec<Forest> {
    // Forests of size k, as multisets: pick the largest tree first, then a forest of trees no larger.
    fn rec(
        labels: usize,
        k: usize,
        max: Option<&Tree>,
        memo: &mut HashMap<(bool, usize), Vec<Tree>>,
        cur: &mut Vec<Tree>,
        out: &mut Vec<Forest>,
    ) {
        if k == 0 {
            out.push(Forest::new(cur.clone()));
            return;
        }
        for s in 1..=k {
            for t in trees_memo(labels, s, memo) {
                if max.is_some_and(|m| (t.size(), &t) > (m.size(), m)) {
                    continue;
                }
                cur.push(t.clone());
                rec(labels, k - s, Some(&t), memo, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(labels, k, None, memo, &mut Vec::new(), &mut out);
    out.sort();
    out.dedup();
    out
}

/// All decorated forests with `k` vertices.
pub fn forests_of_size(labels: usize, k: usize) -> Vec<Forest> {
    let mut memo = HashMap::new();
    forests_inner(labels, k, &mut memo)
}

/// Properly decorated forests with exactly `k` vertices.
pub fn proper_forests(omega: &Omega, k: usize) -> Vec<Forest> {
    forests_of_size(omega.len(), k).into_iter().filter(|f| f.is_proper(omega)).collect()
}

/// Properly decorated forests with at most `k` vertices, the unit included.
pub fn proper_forests_up_to(omega: &Omega, k: usize) -> Vec<Forest> {
    (0..=k).flat_map(|i| proper_forests(omega, i)).collect()
}

/// Largest degree handled by [`primitives_up_to`].
pub const MAX_PRIM_DEGREE: usize = 5;

/// A basis of the primitive elements of degree at most `n`, by solving `Δ̃ x = 0` on each
/// degree.
pub fn primitives_up_to<S: Scalar>(omega: &Omega, n: usize) -> Result<Vec<GLElement<S>>> {
    if n > MAX_PRIM_DEGREE {
        return Err(Error::TooLarge(format!("degree {n} exceeds {MAX_PRIM_DEGREE}")));
    }
    let mut out = Vec::new();
    for d in 1..=n {
        let fs = proper_forests(omega, d);
        let images: Vec<GLTensor<S>> =
            fs.iter().map(|f| reduced_coproduct_power(&GLElement::forest(f.clone()), 1)).collect();
        let keys: BTreeSet<&Vec<Forest>> = images.iter().flat_map(|m| m.keys()).collect();
        let rows: Vec<Vector<S>> =
            keys.iter().map(|k| images.iter().map(|m| m.get(*k).cloned().unwrap_or_else(S::zero)).collect()).collect();
        for coef in nullspace(&rows, fs.len())? {
            out.push(GLElement::from_terms(fs.iter().cloned().zip(coef)));
        }
    }
    Ok(out)
}

/// `[x, y] = x ∗ y − y ∗ x`.
pub fn gl_bracket<S: Scalar>(omega: &Omega, x: &GLElement<S>, y: &GLElement<S>) -> Result<GLElement<S>> {
    Ok(gl_product(omega, x, y)?.sub(&gl_product(omega, y, x)?))
}

/// Whether `x` is primitive: `Δ x = x ⊗ 1 + 1 ⊗ x`.
pub fn is_primitive<S: Scalar>(x: &GLElement<S>) -> bool {
    let mut expect = BTreeMap::new();
    for (f, c) in x.terms() {
        add_term(&mut expect, vec![f.clone(), Forest::unit()], c.clone());
        add_term(&mut expect, vec![Forest::unit(), f.clone()], c.clone());
    }
    gl_coproduct(x) == expect
}

/// Replays the no-go argument on the forest Hopf algebra with a locality relation on trees:
/// for an unrelated pair of primitives `(a, b)`, `Δ(a ∗ b)` contains `a ⊗ b`, which lies
/// outside `H ⊗_⊤ H`. Returns the first such pair.
pub fn nogo_witness<S: Scalar>(
    trees: &[Tree],
    related: impl Fn(&Tree, &Tree) -> bool,
) -> Option<(Tree, Tree, GLTensor<S>)> {
    for a in trees {
        for b in trees {
            if related(a, b) {
                continue;
            }
            let (ea, eb) = (GLElement::<S>::forest(a.clone().into()), GLElement::forest(b.clone().into()));
            let d = gl_coproduct(&gl_product_unrestricted(&ea, &eb));
            let key = vec![Forest::from(a.clone()), Forest::from(b.clone())];
            if d.get(&key).is_some_and(|c| !c.is_zero()) {
                return Some((a.clone(), b.clone(), d));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    fn omega3() -> Omega {
        // a ⊤ b, a ⊤ c, a ⊤ a; b and c unrelated to each other and themselves.
        Omega::new(vec!["a".into(), "b".into(), "c".into()], &[(0, 1), (0, 2), (0, 0)]).unwrap()
    }

    fn dot(l: usize) -> Forest {
        Tree::leaf(l).into()
    }

    fn chain(a: usize, b: usize) -> Forest {
        Tree::new(a, vec![Tree::leaf(b)]).into()
    }

    fn el(f: Forest) -> GLElement<Q> {
        GLElement::forest(f)
    }

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn dot_times_dot() {
        let o = omega3();
        let p = gl_product(&o, &el(dot(0)), &el(dot(1))).unwrap();
        let expect =
            GLElement::from_terms([(chain(0, 1), q(1, 1)), (Forest::new(vec![Tree::leaf(0), Tree::leaf(1)]), q(1, 1))]);
        assert_eq!(p, expect);
        assert!(matches!(gl_product(&o, &el(dot(1)), &el(dot(2))), Err(Error::NotIndependent(_))));
    }

    #[test]
    fn unit_laws() {
        let o = omega3();
        let f = Forest::new(vec![Tree::new(0, vec![Tree::leaf(1)]), Tree::leaf(2)]);
        assert_eq!(gl_product(&o, &GLElement::unit(), &el(f.clone())).unwrap(), el(f.clone()));
        assert_eq!(gl_product(&o, &el(f.clone()), &GLElement::unit()).unwrap(), el(f));
    }

    #[test]
    fn coproduct_examples() {
        let t1 = Tree::leaf(1);
        let t2 = Tree::new(0, vec![Tree::leaf(2)]);
        let f = Forest::new(vec![t1.clone(), t2.clone()]);
        let d = gl_coproduct(&el(f.clone()));
        let mut expect = BTreeMap::new();
        expect.insert(vec![f.clone(), Forest::unit()], q(1, 1));
        expect.insert(vec![t1.clone().into(), t2.clone().into()], q(1, 1));
        expect.insert(vec![t2.into(), t1.into()], q(1, 1));
        expect.insert(vec![Forest::unit(), f], q(1, 1));
        assert_eq!(d, expect);
        assert_eq!(gl_coproduct(&GLElement::<Q>::unit()).len(), 1);
    }

    #[test]
    fn symmetric_labels_match_cut_counting() {
        let o = Omega::full(vec!["a".into()]);
        let p = gl_product(&o, &el(dot(0)), &el(dot(0))).unwrap();
        let two = Forest::new(vec![Tree::leaf(0), Tree::leaf(0)]);
        assert_eq!(p.coeff(&two), q(1, 1));
        assert_eq!(count_cuts(&two, &dot(0), &dot(0)), 2);
        assert_eq!(cut_count_coefficient::<Q>(&dot(0), &dot(0), &two), q(1, 1));
    }

    #[test]
    fn edge_only_convention_breaks_bialgebra() {
        let o = omega3();
        assert_eq!(gl_product_edge_only(&el(dot(0)), &el(dot(1))), el(chain(0, 1)));
        assert!(!bialgebra_holds_edge_only::<Q>(&o, &dot(0), &dot(1)));
        assert!(bialgebra_holds::<Q>(&o, &dot(0), &dot(1)).unwrap());
    }

    #[test]
    fn reduced_coproduct_examples() {
        assert!(reduced_coproduct_power(&el(dot(0)), 1).is_empty());
        let f = Forest::new(vec![Tree::leaf(0), Tree::leaf(1)]);
        let d = reduced_coproduct_power(&el(f.clone()), 1);
        let mut expect = BTreeMap::new();
        expect.insert(vec![dot(0), dot(1)], q(1, 1));
        expect.insert(vec![dot(1), dot(0)], q(1, 1));
        assert_eq!(d, expect);
        assert_eq!(deg_p(&GLElement::<Q>::unit()), 0);
        assert_eq!(deg_p(&el(chain(0, 1))), 1);
        assert_eq!(deg_p(&el(f)), 2);
    }

    #[test]
    fn antipode_examples() {
        assert_eq!(antipode(&GLElement::<Q>::unit()), GLElement::unit());
        assert_eq!(antipode(&el(dot(0))), el(dot(0)).scaled(&q(-1, 1)));
        let f = Forest::new(vec![Tree::leaf(0), Tree::leaf(1)]);
        assert!(antipode_convolution(&el(f)).is_zero());
    }

    #[test]
    fn mm_two_dots_closed_form() {
        let o = omega3();
        let f = Forest::new(vec![Tree::leaf(0), Tree::leaf(1)]);
        let d = mm_decompose::<Q>(&o, &f).unwrap();
        let (ta, tb) = (Tree::leaf(0), Tree::leaf(1));
        let (lab, lba) = (Tree::new(0, vec![Tree::leaf(1)]), Tree::new(1, vec![Tree::leaf(0)]));
        let mut expect = vec![
            (q(1, 2), vec![ta.clone(), tb.clone()]),
            (q(1, 2), vec![tb, ta]),
            (q(-1, 2), vec![lab]),
            (q(-1, 2), vec![lba]),
        ];
        let mut got = d.clone();
        expect.sort_by(|a, b| a.1.cmp(&b.1));
        got.sort_by(|a, b| a.1.cmp(&b.1));
        assert_eq!(got, expect);
        assert_eq!(mm_recompose(&o, &d).unwrap(), el(f));
        let t: Forest = Tree::new(0, vec![Tree::leaf(2)]).into();
        assert_eq!(mm_decompose::<Q>(&o, &t).unwrap(), vec![(q(1, 1), t.trees().to_vec())]);
        let bad = Forest::new(vec![Tree::leaf(1), Tree::leaf(2)]);
        assert_eq!(mm_decompose::<Q>(&o, &bad), Err(Error::NonProperDecoration));
    }

    #[test]
    fn enumeration_counts() {
        // Rooted unlabelled trees: 1, 1, 2, 4; forests: 1, 2, 4, 9.
        let counts: Vec<usize> = (1..=4).map(|k| trees_of_size(1, k).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4]);
        let fc: Vec<usize> = (1..=4).map(|k| forests_of_size(1, k).len()).collect();
        assert_eq!(fc, vec![1, 2, 4, 9]);
        // Two labels: trees 2, 4, 14.
        assert_eq!(trees_of_size(2, 3).len(), 14);
    }

    #[test]
    fn primitives_are_trees() {
        let o = omega3();
        let prim = primitives_up_to::<Q>(&o, 3).unwrap();
        let trees: usize = (1..=3).map(|k| proper_forests(&o, k).iter().filter(|f| f.trees().len() == 1).count()).sum();
        assert_eq!(prim.len(), trees);
        assert!(prim.iter().all(is_primitive));
        for x in &prim {
            for y in &prim {
                let related = x.terms().keys().all(|a| y.terms().keys().all(|b| forests_related(&o, a, b)));
                if related && x.degree() + y.degree() <= 4 {
                    assert!(is_primitive(&gl_bracket(&o, x, y).unwrap()));
                }
            }
        }
    }

    #[test]
    fn nogo_argument_on_undecorated_trees() {
        let trees: Vec<Tree> = (1..=2).flat_map(|k| trees_of_size(1, k)).collect();
        let w = nogo_witness::<Q>(&trees, |a, b| a.size() + b.size() <= 2);
        let (a, b, _) = w.unwrap();
        assert!(a.size() + b.size() > 2);
        assert!(nogo_witness::<Q>(&trees, |_, _| true).is_none());
    }

    #[test]
    fn json_round_trip() {
        let o = omega3();
        let f = Forest::new(vec![Tree::new(0, vec![Tree::leaf(1), Tree::leaf(2)]), Tree::leaf(0)]);
        assert_eq!(Forest::from_json(&f.to_json(&o), &o).unwrap(), f);
        assert_eq!(Omega::from_json(&o.to_json()).unwrap(), o);
    }
}
