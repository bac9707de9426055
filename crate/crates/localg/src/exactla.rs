//! Dense exact linear algebra over any [`Scalar`].
//!
//! Vectors are plain `Vec<S>`. Subspaces keep a reduced row echelon basis so
//! equality of subspaces is equality of the stored data.

use crate::error::{check_dim, Error, Result};
use crate::scalar::Scalar;

pub type Vector<S> = Vec<S>;

pub fn zero_vec<S: Scalar>(n: usize) -> Vector<S> {
    vec![S::zero(); n]
}

pub fn unit<S: Scalar>(n: usize, i: usize) -> Vector<S> {
    let mut v = zero_vec(n);
    v[i] = S::one();
    v
}

pub fn is_zero<S: Scalar>(v: &[S]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn add<S: Scalar>(a: &[S], b: &[S]) -> Vector<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vector<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn scale<S: Scalar>(c: &S, a: &[S]) -> Vector<S> {
    a.iter().map(|x| c.clone() * x.clone()).collect()
}

pub fn neg<S: Scalar>(a: &[S]) -> Vector<S> {
    a.iter().map(|x| -x.clone()).collect()
}

/// `a += c * b`
pub fn axpy<S: Scalar>(a: &mut [S], c: &S, b: &[S]) {
    if c.is_zero() {
        return;
    }
    for (x, y) in a.iter_mut().zip(b) {
        if !y.is_zero() {
            *x = x.clone() + c.clone() * y.clone();
        }
    }
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Integer vector literal helper.
pub fn vec_from_i64<S: Scalar>(v: &[i64]) -> Vector<S> {
    v.iter().map(|&x| S::from_i64(x)).collect()
}

/// Scales `v` so its first nonzero entry is 1. The zero vector is returned unchanged.
pub fn normalize<S: Scalar>(v: &[S]) -> Vector<S> {
    match v.iter().find(|x| !x.is_zero()) {
        Some(lead) => {
            let inv = lead.inv().expect("nonzero");
            scale(&inv, v)
        }
        None => v.to_vec(),
    }
}

/// Kronecker product in row-major order: entry `i * b.len() + j` is `a[i] * b[j]`.
pub fn kron<S: Scalar>(a: &[S], b: &[S]) -> Vector<S> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x.clone() * y.clone());
        }
    }
    out
}

pub fn kron_all<S: Scalar>(vs: &[&[S]]) -> Vector<S> {
    let mut acc = vec![S::one()];
    for v in vs {
        acc = kron(&acc, v);
    }
    acc
}

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref<S: Scalar>(rows: &[Vector<S>], ncols: usize) -> Result<(Vec<Vector<S>>, Vec<usize>)> {
    for r in rows {
        check_dim(ncols, r.len())?;
    }
    let mut m: Vec<Vector<S>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("nonzero pivot");
        m[r] = scale(&inv, &m[r]);
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = -row[c].clone();
                axpy(row, &f, &pivot_row);
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    Ok((m, pivots))
}

pub fn rank<S: Scalar>(rows: &[Vector<S>], ncols: usize) -> usize {
    rref(rows, ncols).map(|(b, _)| b.len()).unwrap_or(0)
}

/// Basis of `{x : M x = 0}` where `M` has the given rows.
pub fn nullspace<S: Scalar>(rows: &[Vector<S>], ncols: usize) -> Result<Vec<Vector<S>>> {
    let (r, pivots) = rref(rows, ncols)?;
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut x = zero_vec(ncols);
        x[free] = S::one();
        for (row, &p) in r.iter().zip(&pivots) {
            x[p] = -row[free].clone();
        }
        out.push(x);
    }
    Ok(out)
}

/// Some `x` with `M x = b`, or `None` when the system is inconsistent.
pub fn solve<S: Scalar>(rows: &[Vector<S>], ncols: usize, b: &[S]) -> Result<Option<Vector<S>>> {
    check_dim(rows.len(), b.len())?;
    let aug: Vec<Vector<S>> = rows
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut r = r.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, ncols + 1)?;
    if pivots.last() == Some(&ncols) {
        return Ok(None);
    }
    let mut x = zero_vec(ncols);
    for (row, &p) in r.iter().zip(&pivots) {
        x[p] = row[ncols].clone();
    }
    Ok(Some(x))
}

/// Row echelon form built one vector at a time; each new row is reduced against the
/// earlier ones, so a single pass in insertion order reduces any vector.
#[derive(Clone, Debug)]
pub struct Echelon<S: Scalar> {
    n: usize,
    rows: Vec<Vector<S>>,
    pivots: Vec<usize>,
}

impl<S: Scalar> Echelon<S> {
    pub fn new(n: usize) -> Self {
        Echelon { n, rows: vec![], pivots: vec![] }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn reduce(&self, v: &[S]) -> Vector<S> {
        debug_assert_eq!(v.len(), self.n);
        let mut r = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !r[p].is_zero() {
                let f = -r[p].clone();
                axpy(&mut r, &f, row);
            }
        }
        r
    }

    /// Adds `v`; returns whether it was independent of the earlier rows.
    pub fn insert(&mut self, v: &[S]) -> bool {
        let r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].inv().expect("nonzero");
        self.rows.push(scale(&inv, &r));
        self.pivots.push(p);
        true
    }

    pub fn contains(&self, v: &[S]) -> bool {
        is_zero(&self.reduce(v))
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rows(&self) -> &[Vector<S>] {
        &self.rows
    }

    pub fn into_subspace(self) -> Subspace<S> {
        Subspace::of(self.n, &self.rows)
    }
}

/// A linear subspace of `S^n` stored by its reduced row echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace<S: Scalar> {
    n: usize,
    basis: Vec<Vector<S>>,
    pivots: Vec<usize>,
}

impl<S: Scalar> Subspace<S> {
    /// Span of the given vectors.
    pub fn span(n: usize, rows: &[Vector<S>]) -> Result<Self> {
        let (basis, pivots) = rref(rows, n)?;
        Ok(Subspace { n, basis, pivots })
    }

    /// Panicking variant of [`Subspace::span`] for internally produced data.
    pub fn of(n: usize, rows: &[Vector<S>]) -> Self {
        Self::span(n, rows).expect("dimension mismatch")
    }

    pub fn zero(n: usize) -> Self {
        Subspace { n, basis: vec![], pivots: vec![] }
    }

    pub fn full(n: usize) -> Self {
        Subspace { n, basis: (0..n).map(|i| unit(n, i)).collect(), pivots: (0..n).collect() }
    }

    /// Span of standard basis vectors with the given (0-based) indices.
    pub fn coordinate(n: usize, idx: &[usize]) -> Self {
        Self::of(n, &idx.iter().map(|&i| unit(n, i)).collect::<Vec<_>>())
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector<S>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.n
    }

    /// Residual of `v` after eliminating the pivot coordinates.
    pub fn reduce(&self, v: &[S]) -> Vector<S> {
        let mut r = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if !r[p].is_zero() {
                let f = -r[p].clone();
                axpy(&mut r, &f, row);
            }
        }
        r
    }

    pub fn contains(&self, v: &[S]) -> bool {
        debug_assert_eq!(v.len(), self.n);
        is_zero(&self.reduce(v))
    }

    /// Coefficients of `v` in the stored basis, if `v` lies in the subspace.
    pub fn coords(&self, v: &[S]) -> Option<Vector<S>> {
        if self.contains(v) {
            Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
        } else {
            None
        }
    }

    pub fn combine(&self, coeffs: &[S]) -> Vector<S> {
        let mut out = zero_vec(self.n);
        for (c, row) in coeffs.iter().zip(&self.basis) {
            axpy(&mut out, c, row);
        }
        out
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Self::of(self.n, &rows)
    }

    pub fn sum_all<'a>(n: usize, parts: impl IntoIterator<Item = &'a Self>) -> Self {
        let rows: Vec<Vector<S>> = parts.into_iter().flat_map(|s| s.basis.iter().cloned()).collect();
        Self::of(n, &rows)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        if other.is_full() || self.is_zero() {
            return self.clone();
        }
        if self.is_full() || other.is_zero() {
            return other.clone();
        }
        // x = sum c_i a_i lies in `other` iff other.reduce(x) = 0, which is linear in c.
        let cols: Vec<Vector<S>> = self.basis.iter().map(|a| other.reduce(a)).collect();
        let k = cols.len();
        let rows: Vec<Vector<S>> = (0..self.n).map(|j| cols.iter().map(|c| c[j].clone()).collect()).collect();
        let ns = nullspace(&rows, k).expect("shapes agree");
        Self::of(self.n, &ns.iter().map(|c| self.combine(c)).collect::<Vec<_>>())
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.dim() <= other.dim() && self.basis.iter().all(|b| other.contains(b))
    }

    /// Positions that are not pivots; the standard vectors there span a complement.
    pub fn free_positions(&self) -> Vec<usize> {
        (0..self.n).filter(|c| !self.pivots.contains(c)).collect()
    }

    pub fn std_complement(&self) -> Self {
        Self::coordinate(self.n, &self.free_positions())
    }

    /// Coordinates of the class `v + self` in `S^n / self`, read off the free positions.
    pub fn quotient_coords(&self, v: &[S]) -> Vector<S> {
        let r = self.reduce(v);
        self.free_positions().into_iter().map(|c| r[c].clone()).collect()
    }

    /// The representative of a quotient class supported on the free positions.
    pub fn lift(&self, q: &[S]) -> Vector<S> {
        let mut v = zero_vec(self.n);
        for (c, x) in self.free_positions().into_iter().zip(q) {
            v[c] = x.clone();
        }
        v
    }

    /// Image of the subspace under the quotient map onto `S^n / w`.
    pub fn project(&self, w: &Subspace<S>) -> Self {
        let m = self.n - w.dim();
        Self::of(m, &self.basis.iter().map(|b| w.quotient_coords(b)).collect::<Vec<_>>())
    }

    /// Preimage of a quotient subspace: `{v : [v] in q}`.
    pub fn preimage(q: &Self, w: &Subspace<S>) -> Self {
        let lifted: Vec<Vector<S>> = q.basis.iter().map(|b| w.lift(b)).collect();
        Self::of(w.ambient(), &lifted).sum(w)
    }

    /// Span of `a ⊗ b` over basis pairs, inside the Kronecker space.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut rows = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.basis {
            for b in &other.basis {
                rows.push(kron(a, b));
            }
        }
        Self::of(self.n * other.n, &rows)
    }

    /// Every element, for finite fields.
    pub fn elements(&self) -> Vec<Vector<S>> {
        let q = S::order().expect("finite field required");
        let k = self.dim();
        let total = q.checked_pow(k as u32).expect("subspace too large to enumerate");
        (0..total)
            .map(|mut idx| {
                let mut coeffs = vec![S::zero(); k];
                for c in coeffs.iter_mut().rev() {
                    *c = S::from_index(idx % q);
                    idx /= q;
                }
                self.combine(&coeffs)
            })
            .collect()
    }
}

/// Linear map `S^src -> S^tgt`; `m` has `tgt` rows and `src` columns, acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinMap<S: Scalar> {
    pub src: usize,
    pub tgt: usize,
    pub m: Vec<Vector<S>>,
}

impl<S: Scalar> LinMap<S> {
    pub fn new(src: usize, tgt: usize, m: Vec<Vector<S>>) -> Result<Self> {
        check_dim(tgt, m.len())?;
        for r in &m {
            check_dim(src, r.len())?;
        }
        Ok(LinMap { src, tgt, m })
    }

    pub fn identity(n: usize) -> Self {
        LinMap { src: n, tgt: n, m: (0..n).map(|i| unit(n, i)).collect() }
    }

    pub fn zero(src: usize, tgt: usize) -> Self {
        LinMap { src, tgt, m: vec![zero_vec(src); tgt] }
    }

    /// Map sending the i-th standard vector to `cols[i]`.
    pub fn from_columns(tgt: usize, cols: &[Vector<S>]) -> Self {
        let src = cols.len();
        let m = (0..tgt).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
        LinMap { src, tgt, m }
    }

    pub fn apply(&self, v: &[S]) -> Vector<S> {
        debug_assert_eq!(v.len(), self.src);
        self.m.iter().map(|r| dot(r, v)).collect()
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &LinMap<S>) -> Result<Self> {
        check_dim(self.src, other.tgt)?;
        let cols: Vec<Vector<S>> =
            (0..other.src).map(|j| self.apply(&other.m.iter().map(|r| r[j].clone()).collect::<Vec<_>>())).collect();
        Ok(Self::from_columns(self.tgt, &cols))
    }

    pub fn add(&self, other: &LinMap<S>) -> Self {
        LinMap { src: self.src, tgt: self.tgt, m: self.m.iter().zip(&other.m).map(|(a, b)| add(a, b)).collect() }
    }

    pub fn kernel(&self) -> Subspace<S> {
        Subspace::of(self.src, &nullspace(&self.m, self.src).expect("shape checked"))
    }

    pub fn image(&self) -> Subspace<S> {
        let cols: Vec<Vector<S>> = (0..self.src).map(|j| self.m.iter().map(|r| r[j].clone()).collect()).collect();
        Subspace::of(self.tgt, &cols)
    }

    pub fn image_of(&self, s: &Subspace<S>) -> Subspace<S> {
        Subspace::of(self.tgt, &s.basis().iter().map(|b| self.apply(b)).collect::<Vec<_>>())
    }

    /// `self ⊗ other` in Kronecker coordinates.
    pub fn kron(&self, other: &LinMap<S>) -> Self {
        let mut m = Vec::with_capacity(self.tgt * other.tgt);
        for r1 in &self.m {
            for r2 in &other.m {
                m.push(kron(r1, r2));
            }
        }
        LinMap { src: self.src * other.src, tgt: self.tgt * other.tgt, m }
    }

    /// Projection onto `w` along the complement `c`, assuming `w ⊕ c` is the whole space.
    pub fn projection(w: &Subspace<S>, c: &Subspace<S>) -> Result<Self> {
        let n = w.ambient();
        if w.dim() + c.dim() != n || !w.sum(c).is_full() {
            return Err(Error::PreconditionFailed("subspaces are not complementary".into()));
        }
        // Columns of B = [w basis | c basis]; projection = B diag(1..,0..) B^-1.
        let basis: Vec<Vector<S>> = w.basis().iter().chain(c.basis()).cloned().collect();
        let bmat = LinMap::from_columns(n, &basis);
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let e = unit::<S>(n, j);
            let coeffs = solve(&bmat.m, n, &e)?.expect("B is invertible");
            cols.push(w.combine(&coeffs[..w.dim()]));
        }
        Ok(Self::from_columns(n, &cols))
    }
}

/// Whether `ker(f1 ⊗ f2) = ker f1 ⊗ V2 + V1 ⊗ ker f2`, with both sides computed independently.
pub fn kernel_sum_identity_check<S: Scalar>(f1: &LinMap<S>, f2: &LinMap<S>) -> bool {
    let lhs = f1.kron(f2).kernel();
    let rhs = f1.kernel().tensor(&Subspace::full(f2.src)).sum(&Subspace::full(f1.src).tensor(&f2.kernel()));
    lhs == rhs
}
