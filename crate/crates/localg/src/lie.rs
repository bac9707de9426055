//! Locality Lie algebras and truncated locality enveloping algebras.
//!
//! A bracket is given on finitely many related pairs and extended linearly through
//! `a ∧ b`: it is a linear map on the subspace `D ⊆ Λ²` spanned by the wedges of the
//! given pairs, so it is antisymmetric by construction.

use std::collections::BTreeMap;

use crate::error::{check_dim, Error, Result};
use crate::exactla::{
    add, is_zero, kron_all, nullspace, scale, solve, sub, unit, zero_vec, Echelon, LinMap, Subspace, Vector,
};
use crate::fin;
use crate::locality::{grid_search, Cartesian, LocalitySpace, Relation};
use crate::scalar::Scalar;
use crate::tensor::word_letters;
use crate::Verdict;

/// Position of `e_i ∧ e_j` (`i < j`) in `Λ²(S^n)`.
fn wedge_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

fn wedge_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

pub fn wedge<S: Scalar>(a: &[S], b: &[S]) -> Vector<S> {
    let n = a.len();
    wedge_pairs(n).into_iter().map(|(i, j)| a[i].clone() * b[j].clone() - a[j].clone() * b[i].clone()).collect()
}

/// A bracket `[·,·]` defined on a locality space through its values on some related pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocLieAlgebra<S: Scalar> {
    pub space: LocalitySpace<S>,
    /// The defining data `[x, y] = val`.
    pub brackets: Vec<(Vector<S>, Vector<S>, Vector<S>)>,
    /// Reduced rows `(w | val)` with pivots inside the wedge part.
    rows: Vec<(Vector<S>, Vector<S>)>,
    pivots: Vec<usize>,
}

impl<S: Scalar> LocLieAlgebra<S> {
    pub fn new(space: LocalitySpace<S>, brackets: Vec<(Vector<S>, Vector<S>, Vector<S>)>) -> Result<Self> {
        let n = space.dim();
        let m = n * n.saturating_sub(1) / 2;
        let mut aug = Vec::new();
        for (x, y, v) in &brackets {
            check_dim(n, x.len())?;
            check_dim(n, y.len())?;
            check_dim(n, v.len())?;
            if !space.rel(x, y) {
                return Err(Error::NotIndependent("bracket data on an unrelated pair".into()));
            }
            let mut r = wedge(x, y);
            r.extend(v.iter().cloned());
            aug.push(r);
        }
        let (red, piv) = crate::exactla::rref(&aug, m + n)?;
        if piv.iter().any(|&p| p >= m) {
            return Err(Error::Inconsistent("bracket values contradict bilinearity or antisymmetry".into()));
        }
        let rows = red.into_iter().map(|mut r| (r.drain(..m).collect(), r)).collect();
        Ok(LocLieAlgebra { space, brackets, rows, pivots: piv })
    }

    /// Zero bracket on every pair of basis vectors.
    pub fn abelian(space: LocalitySpace<S>) -> Self {
        let n = space.dim();
        let m = n * n.saturating_sub(1) / 2;
        let rows = (0..m).map(|k| (unit(m, k), zero_vec(n))).collect();
        LocLieAlgebra { space, brackets: Vec::new(), rows, pivots: (0..m).collect() }
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// The wedge subspace `D` on which the bracket is known.
    pub fn domain(&self) -> Subspace<S> {
        let m = self.dim() * self.dim().saturating_sub(1) / 2;
        Subspace::of(m, &self.rows.iter().map(|(w, _)| w.clone()).collect::<Vec<_>>())
    }

    /// The linear bracket on a wedge, `None` outside `D`.
    pub fn on_wedge(&self, w: &[S]) -> Option<Vector<S>> {
        let mut rest = w.to_vec();
        let mut val = zero_vec(self.dim());
        for ((row, v), &p) in self.rows.iter().zip(&self.pivots) {
            let c = rest[p].clone();
            if !c.is_zero() {
                rest = sub(&rest, &scale(&c, row));
                val = add(&val, &scale(&c, v));
            }
        }
        is_zero(&rest).then_some(val)
    }

    /// `[a, b]` when `a ∧ b` lies in the known part (related or not).
    pub fn bracket(&self, a: &[S], b: &[S]) -> Option<Vector<S>> {
        self.on_wedge(&wedge(a, b))
    }

    /// `[a, b]` for a related pair; an error when the pair is unrelated or the bracket unknown.
    pub fn bracket_checked(&self, a: &[S], b: &[S]) -> Result<Vector<S>> {
        if !self.space.rel(a, b) {
            return Err(Error::NotIndependent("bracket of an unrelated pair".into()));
        }
        self.bracket(a, b).ok_or_else(|| Error::Inconsistent("bracket undefined on a related pair".into()))
    }

    /// `[[a,b],c] + [[c,a],b] + [[b,c],a]`, `None` when a nested bracket is unknown.
    pub fn jacobiator(&self, a: &[S], b: &[S], c: &[S]) -> Option<Vector<S>> {
        let t1 = self.bracket(&self.bracket(a, b)?, c)?;
        let t2 = self.bracket(&self.bracket(c, a)?, b)?;
        let t3 = self.bracket(&self.bracket(b, c)?, a)?;
        Some(add(&add(&t1, &t2), &t3))
    }
}

/// `R^3` with basis lines related to themselves and `⟨e1,e2⟩ × ⟨e3⟩`, carrying
/// `[e1,e3] = λe1 + μe3`, `[e2,e3] = μ'e3`.
pub fn lie_family<S: Scalar>(lambda: S, mu: S, mu_prime: S) -> LocLieAlgebra<S> {
    let c = |i: &[usize]| Subspace::<S>::coordinate(3, i);
    let space = LocalitySpace::from_blocks(
        3,
        vec![(c(&[0]), c(&[0])), (c(&[1]), c(&[1])), (c(&[2]), c(&[2])), (c(&[0, 1]), c(&[2]))],
    )
    .expect("dims agree");
    let e = |i| unit::<S>(3, i);
    let z = S::zero();
    LocLieAlgebra::new(
        space,
        vec![(e(0), e(2), vec![lambda, z.clone(), mu]), (e(1), e(2), vec![z.clone(), z, mu_prime])],
    )
    .expect("family data is consistent")
}

pub type Triple<S> = (Vector<S>, Vector<S>, Vector<S>);

/// Both axioms of a locality Lie algebra on related triples `(a, b, c)`. Polar stability on
/// singleton polars is `[a, b] ⊤ c` for every such triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiReport<S: Scalar> {
    pub jacobi: Verdict<Triple<S>>,
    pub polar_stability: Verdict<Triple<S>>,
}

impl<S: Scalar> JacobiReport<S> {
    pub fn verdict(&self) -> Verdict<Triple<S>> {
        match (&self.jacobi, &self.polar_stability) {
            (Verdict::Fails(w), _) | (_, Verdict::Fails(w)) => Verdict::Fails(w.clone()),
            (Verdict::Unknown(m), _) | (_, Verdict::Unknown(m)) => Verdict::Unknown(m.clone()),
            _ => Verdict::Holds,
        }
    }
}

/// Checks the Jacobi identity and polar stability on all related triples: exhaustively over
/// finite fields, through products of side-lattice subspaces for block relations over Q (the
/// Jacobiator is trilinear there), and by a small grid search otherwise.
pub fn jacobi_check<S: Scalar>(l: &LocLieAlgebra<S>) -> Result<JacobiReport<S>> {
    let s = &l.space;
    let check = |a: &Vector<S>, b: &Vector<S>, c: &Vector<S>| -> Result<(bool, bool)> {
        let ab = l.bracket_checked(a, b)?;
        let polar = s.rel(&ab, c);
        let jac = l.jacobiator(a, b, c).is_none_or(|j| is_zero(&j));
        Ok((jac, polar))
    };
    if S::is_finite() {
        let idx = s.index()?;
        let els = fin::all_vectors::<S>(s.dim())?;
        let code: Vec<usize> = els.iter().map(|e| fin::encode(e) as usize).collect();
        let mut report = JacobiReport { jacobi: Verdict::Holds, polar_stability: Verdict::Holds };
        for (i, a) in els.iter().enumerate() {
            for (j, b) in els.iter().enumerate().filter(|(j, _)| idx.related(code[i], code[*j])) {
                for (k, c) in els.iter().enumerate() {
                    if !idx.related(code[i], code[k]) || !idx.related(code[j], code[k]) {
                        continue;
                    }
                    let (jac, polar) = check(a, b, c)?;
                    if !jac && report.jacobi.holds() {
                        report.jacobi = Verdict::Fails((a.clone(), b.clone(), c.clone()));
                    }
                    if !polar && report.polar_stability.holds() {
                        report.polar_stability = Verdict::Fails((a.clone(), b.clone(), c.clone()));
                    }
                }
            }
        }
        return Ok(report);
    }
    if let Relation::Blocks(bs) = s.relation() {
        let oriented: Vec<(&Subspace<S>, &Subspace<S>)> =
            bs.iter().flat_map(|b| [(&b.left, &b.right), (&b.right, &b.left)]).collect();
        let n = s.dim();
        let paired = |x: &Subspace<S>, y: &Subspace<S>| {
            y.is_zero() || x.is_zero() || oriented.iter().any(|(p, q)| x.is_subspace_of(p) && y.is_subspace_of(q))
        };
        let mut lattice = s.side_lattice();
        lattice.retain(|x| !x.is_zero());
        let mut jacobi = Verdict::Holds;
        let mut polar_stability = Verdict::Holds;
        for x in &lattice {
            for y in lattice.iter().filter(|y| paired(x, y)) {
                // [X, Y] spans a subspace; the product [X,Y] × Z lies in ⊤ iff it lies in one block.
                let mut brs = Vec::new();
                for a in x.basis() {
                    for b in y.basis() {
                        brs.push(l.bracket_checked(a, b)?);
                    }
                }
                let bxy = Subspace::of(n, &brs);
                for z in lattice.iter().filter(|z| paired(x, z) && paired(y, z)) {
                    if polar_stability.holds() && !paired(&bxy, z) {
                        let w = grid_search(x.dim() + y.dim() + z.dim(), 1, |cs: &[S]| {
                            let (ca, rest) = cs.split_at(x.dim());
                            let (cb, cc) = rest.split_at(y.dim());
                            let (a, b, c) = (x.combine(ca), y.combine(cb), z.combine(cc));
                            let ab = l.bracket(&a, &b)?;
                            (!s.rel(&ab, &c)).then_some((a, b, c))
                        });
                        polar_stability = match w {
                            Some(w) => Verdict::Fails(w),
                            None => Verdict::Unknown("polar stability fails generically; no small witness".into()),
                        };
                    }
                    if jacobi.holds() {
                        for a in x.basis() {
                            for b in y.basis() {
                                for c in z.basis() {
                                    if l.jacobiator(a, b, c).is_some_and(|j| !is_zero(&j)) {
                                        jacobi = Verdict::Fails((a.clone(), b.clone(), c.clone()));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        return Ok(JacobiReport { jacobi, polar_stability });
    }
    let n = s.dim();
    let mut jacobi: Verdict<Triple<S>> = Verdict::Unknown("no violation on the search grid".into());
    let mut polar_stability: Verdict<Triple<S>> = Verdict::Unknown("no violation on the search grid".into());
    let mut failure: Option<Error> = None;
    let _ = grid_search(3 * n, 1, |cs: &[S]| {
        let (a, b, c) = (cs[..n].to_vec(), cs[n..2 * n].to_vec(), cs[2 * n..].to_vec());
        if !(s.rel(&a, &b) && s.rel(&a, &c) && s.rel(&b, &c)) {
            return None;
        }
        match check(&a, &b, &c) {
            Err(e) => {
                failure = Some(e);
                return Some(());
            }
            Ok((jac, polar)) => {
                if !jac && !jacobi.fails() {
                    jacobi = Verdict::Fails((a.clone(), b.clone(), c.clone()));
                }
                if !polar && !polar_stability.fails() {
                    polar_stability = Verdict::Fails((a, b, c));
                }
            }
        }
        (jacobi.fails() && polar_stability.fails()).then_some(())
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(JacobiReport { jacobi, polar_stability })
}

/// `constant + Σ coeffs[v] x_v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineForm<S: Scalar> {
    pub coeffs: Vec<S>,
    pub constant: S,
}

/// The Jacobi identity on basis vectors `e_i, e_j, e_k`, one affine form per component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiEquation<S: Scalar> {
    pub triple: (usize, usize, usize),
    pub components: Vec<AffineForm<S>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extension<S: Scalar> {
    /// `table[i][j] = [e_i, e_j]` for a full Lie bracket extending the given one.
    Feasible { table: Vec<Vec<Vector<S>>> },
    /// No extension exists: the weighted sum of the equations has zero coefficients and a
    /// nonzero constant.
    Infeasible { combination: Vec<S>, obstruction: AffineForm<S> },
}

/// The linear system for a full Lie bracket extending `l`. The unknowns are the brackets of
/// basis wedges `e_i ∧ e_j` outside `D` (variable `x_{u·n + r}` is coordinate `r` of unknown
/// `u`); other basis brackets follow from `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionReport<S: Scalar> {
    pub unknowns: Vec<(usize, usize)>,
    pub equations: Vec<JacobiEquation<S>>,
    pub extension: Extension<S>,
}

/// Affine vector `c + Σ x_v lin[v]`.
#[derive(Clone, Debug)]
struct AffVec<S: Scalar> {
    c: Vector<S>,
    lin: Vec<Vector<S>>,
}

impl<S: Scalar> AffVec<S> {
    fn is_constant(&self) -> bool {
        self.lin.iter().all(|v| is_zero(v))
    }

    fn zero(n: usize, vars: usize) -> Self {
        AffVec { c: zero_vec(n), lin: vec![zero_vec(n); vars] }
    }

    fn add_scaled(&mut self, k: &S, o: &AffVec<S>) {
        self.c = add(&self.c, &scale(k, &o.c));
        for (a, b) in self.lin.iter_mut().zip(&o.lin) {
            *a = add(a, &scale(k, b));
        }
    }
}

pub fn bracket_extension<S: Scalar>(l: &LocLieAlgebra<S>) -> Result<ExtensionReport<S>> {
    let n = l.dim();
    let pairs = wedge_pairs(n);
    let m = pairs.len();
    let d = l.domain();
    let comp = d.std_complement();
    let unknowns: Vec<(usize, usize)> = comp.pivots().iter().map(|&p| pairs[p]).collect();
    let vars = unknowns.len() * n;
    let proj = LinMap::projection(&d, &comp)?;
    // basis[k] = bracket of the k-th basis wedge as an affine vector in the unknowns.
    let mut basis: Vec<AffVec<S>> = Vec::with_capacity(m);
    for k in 0..m {
        let e = unit::<S>(m, k);
        let known = proj.apply(&e);
        let mut av = AffVec::zero(n, vars);
        av.c = l.on_wedge(&known).expect("inside D");
        let rest = sub(&e, &known);
        for (u, &p) in comp.pivots().iter().enumerate() {
            // The complement is spanned by unit wedges, so coordinates are read off directly.
            let coef = rest[p].clone();
            for r in 0..n {
                let mut v = zero_vec(n);
                v[r] = coef.clone();
                av.lin[u * n + r] = v;
            }
        }
        basis.push(av);
    }
    // [e_i, e_j] for any ordered pair.
    let br = |i: usize, j: usize| -> AffVec<S> {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => AffVec::zero(n, vars),
            std::cmp::Ordering::Less => basis[wedge_index(n, i, j)].clone(),
            std::cmp::Ordering::Greater => {
                let mut out = AffVec::zero(n, vars);
                out.add_scaled(&-S::one(), &basis[wedge_index(n, j, i)]);
                out
            }
        }
    };
    // [[e_i, e_j], e_k] = Σ_r [e_i,e_j]_r [e_r, e_k]; one factor must be constant.
    let nested = |i: usize, j: usize, k: usize| -> Result<AffVec<S>> {
        let inner = br(i, j);
        let mut out = AffVec::zero(n, vars);
        for r in 0..n {
            let outer = br(r, k);
            if outer.is_constant() {
                // Coefficient of e_r in [e_i, e_j] is affine; outer is a constant vector.
                out.c = add(&out.c, &scale(&inner.c[r], &outer.c));
                for v in 0..vars {
                    let cv = inner.lin[v][r].clone();
                    if !cv.is_zero() {
                        out.lin[v] = add(&out.lin[v], &scale(&cv, &outer.c));
                    }
                }
            } else if inner.lin.iter().all(|lv| lv[r].is_zero()) {
                out.add_scaled(&inner.c[r], &outer);
            } else {
                return Err(Error::Unsupported("the Jacobi system is quadratic in the unknown brackets".into()));
            }
        }
        Ok(out)
    };
    let mut equations = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let mut jac = nested(i, j, k)?;
                jac.add_scaled(&S::one(), &nested(k, i, j)?);
                jac.add_scaled(&S::one(), &nested(j, k, i)?);
                let components = (0..n)
                    .map(|r| AffineForm {
                        coeffs: (0..vars).map(|v| jac.lin[v][r].clone()).collect(),
                        constant: jac.c[r].clone(),
                    })
                    .collect();
                equations.push(JacobiEquation { triple: (i, j, k), components });
            }
        }
    }
    let forms: Vec<&AffineForm<S>> = equations.iter().flat_map(|e| &e.components).collect();
    let a: Vec<Vector<S>> = forms.iter().map(|f| f.coeffs.clone()).collect();
    let b: Vector<S> = forms.iter().map(|f| -f.constant.clone()).collect();
    let extension = match solve(&a, vars, &b)? {
        Some(x) => {
            let table = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let av = br(i, j);
                            av.lin.iter().zip(&x).fold(av.c.clone(), |acc, (lv, xv)| add(&acc, &scale(xv, lv)))
                        })
                        .collect()
                })
                .collect();
            Extension::Feasible { table }
        }
        None => {
            // y with yᵀA = 0 and yᵀb ≠ 0.
            let at: Vec<Vector<S>> = (0..vars).map(|v| a.iter().map(|r| r[v].clone()).collect()).collect();
            let ys =
                if vars == 0 { (0..a.len()).map(|i| unit(a.len(), i)).collect() } else { nullspace(&at, a.len())? };
            let y = ys
                .into_iter()
                .find(|y| !crate::exactla::dot(y, &b).is_zero())
                .expect("inconsistent systems have a separating combination");
            let obstruction = AffineForm {
                coeffs: zero_vec(vars),
                constant: forms.iter().zip(&y).fold(S::zero(), |acc, (f, w)| acc + w.clone() * f.constant.clone()),
            };
            Extension::Infeasible { combination: y, obstruction }
        }
    };
    Ok(ExtensionReport { unknowns, equations, extension })
}

/// Spanning `⊤`-chains of length `m`: basis tuples of the maximal products for block
/// relations, all chains over finite fields.
fn spanning_chains<S: Scalar>(s: &LocalitySpace<S>, m: usize) -> Result<Vec<Vec<Vector<S>>>> {
    if m == 0 {
        return Ok(vec![vec![]]);
    }
    let full = vec![Subspace::full(s.dim()); m];
    Ok(match s.loc_cartesian(&full)? {
        Cartesian::Tuples(ts) => ts,
        Cartesian::Products(ps) => {
            let mut out = Vec::new();
            for p in ps {
                let mut acc: Vec<Vec<Vector<S>>> = vec![vec![]];
                for x in &p {
                    acc = acc
                        .into_iter()
                        .flat_map(|t| {
                            x.basis().iter().map(move |b| {
                                let mut t = t.clone();
                                t.push(b.clone());
                                t
                            })
                        })
                        .collect();
                }
                out.extend(acc);
            }
            out
        }
    })
}

/// Largest truncation degree accepted by [`trunc_env_algebra`].
pub const MAX_ENV_DEGREE: usize = 3;

/// `U^N = T^N_⊤ / (J_⊤ ∩ T^N_⊤)`, with `T^N_⊤` laid out degree by degree in one flat vector
/// (degree `k` in Kronecker coordinates of `E^{⊗k}`).
#[derive(Clone, Debug)]
pub struct TruncEnvAlgebra<S: Scalar> {
    pub lie: LocLieAlgebra<S>,
    pub max_degree: usize,
    /// `T^k = E^{⊗_⊤k}`.
    pub components: Vec<Subspace<S>>,
    offsets: Vec<usize>,
    flat: usize,
    /// `J ∩ T^m` for `m = 0..=N`, flat.
    pub ideal: Vec<Subspace<S>>,
    /// `dim U^m` for `m = 0..=N`.
    pub filtered_dims: Vec<usize>,
    /// `[J basis | representatives]` as rows, and how many belong to `J`.
    frame: Vec<Vector<S>>,
    ideal_rank: usize,
}

pub fn trunc_env_algebra<S: Scalar>(l: &LocLieAlgebra<S>, max_degree: usize) -> Result<TruncEnvAlgebra<S>> {
    if max_degree > MAX_ENV_DEGREE {
        return Err(Error::TooLarge(format!("truncation degree {max_degree} exceeds {MAX_ENV_DEGREE}")));
    }
    if l.dim() > 4 {
        return Err(Error::TooLarge("enveloping algebras are built for dimension at most 4".into()));
    }
    let s = &l.space;
    if !S::is_finite() && !matches!(s.relation(), Relation::Blocks(_)) {
        return Err(Error::Unsupported("enveloping algebras over Q need an enumerated block relation".into()));
    }
    let n = l.dim();
    let mut offsets = vec![0];
    for k in 0..=max_degree {
        offsets.push(offsets[k] + n.pow(k as u32));
    }
    let flat = offsets[max_degree + 1];
    let embed = |k: usize, v: &[S]| {
        let mut out = zero_vec(flat);
        out[offsets[k]..offsets[k + 1]].clone_from_slice(v);
        out
    };
    let chains: Vec<Vec<Vec<Vector<S>>>> = (0..=max_degree).map(|k| spanning_chains(s, k)).collect::<Result<_>>()?;
    let kr = |t: &[Vector<S>]| kron_all(&t.iter().map(|v| v.as_slice()).collect::<Vec<_>>());
    let components: Vec<Subspace<S>> = chains
        .iter()
        .enumerate()
        .map(|(k, cs)| {
            let mut e = Echelon::new(n.pow(k as u32));
            for c in cs {
                e.insert(&kr(c));
            }
            e.into_subspace()
        })
        .collect();
    // Generators u ⊗ (a⊗b − b⊗a − [a,b]) ⊗ v over chains (u, a, b, v), by top degree.
    let mut ideal = vec![Subspace::zero(flat); max_degree + 1];
    let mut ech = Echelon::new(flat);
    for top in 0..=max_degree {
        if top >= 2 {
            for c in &chains[top] {
                for p in 0..=top - 2 {
                    let (a, b) = (&c[p], &c[p + 1]);
                    let ab = l.bracket_checked(a, b)?;
                    let mut swapped = c.clone();
                    swapped.swap(p, p + 1);
                    let mut short: Vec<Vector<S>> = c[..p].to_vec();
                    short.push(ab);
                    short.extend(c[p + 2..].iter().cloned());
                    let g = sub(&sub(&embed(top, &kr(c)), &embed(top, &kr(&swapped))), &embed(top - 1, &kr(&short)));
                    ech.insert(&g);
                }
            }
        }
        ideal[top] = ech.clone().into_subspace();
    }
    let t_flat: Vec<Vector<S>> = components
        .iter()
        .enumerate()
        .flat_map(|(k, c)| c.basis().iter().map(move |b| (k, b.clone())))
        .map(|(k, b)| embed(k, &b))
        .collect();
    let mut filtered_dims = Vec::new();
    for m in 0..=max_degree {
        let tdim: usize = components[..=m].iter().map(|c| c.dim()).sum();
        filtered_dims.push(tdim - ideal[m].dim());
    }
    let mut frame: Vec<Vector<S>> = ideal[max_degree].basis().to_vec();
    let ideal_rank = frame.len();
    let mut e2 = Echelon::new(flat);
    for r in &frame {
        e2.insert(r);
    }
    for t in &t_flat {
        if e2.insert(t) {
            frame.push(t.clone());
        }
    }
    Ok(TruncEnvAlgebra {
        lie: l.clone(),
        max_degree,
        components,
        offsets,
        flat,
        ideal,
        filtered_dims,
        frame,
        ideal_rank,
    })
}

impl<S: Scalar> TruncEnvAlgebra<S> {
    fn n(&self) -> usize {
        self.lie.dim()
    }

    pub fn dim(&self) -> usize {
        self.frame.len() - self.ideal_rank
    }

    /// Flat vector of a homogeneous element of degree `k`.
    pub fn embed(&self, k: usize, v: &[S]) -> Vector<S> {
        let mut out = zero_vec(self.flat);
        out[self.offsets[k]..self.offsets[k + 1]].clone_from_slice(v);
        out
    }

    pub fn chain(&self, xs: &[Vector<S>]) -> Vector<S> {
        self.embed(xs.len(), &kron_all(&xs.iter().map(|v| v.as_slice()).collect::<Vec<_>>()))
    }

    /// Coordinates in `U` of an element of `T^N_⊤`.
    pub fn class_of(&self, x: &[S]) -> Result<Vector<S>> {
        let cols = LinMap::from_columns(self.flat, &self.frame);
        let c = solve(&cols.m, self.frame.len(), x)?
            .ok_or_else(|| Error::PreconditionFailed("element outside the truncated tensor algebra".into()))?;
        Ok(c[self.ideal_rank..].to_vec())
    }

    /// `a ⊗ b − b ⊗ a − [a, b]` for a related pair.
    pub fn relator(&self, a: &[S], b: &[S]) -> Result<Vector<S>> {
        let ab = self.lie.bracket_checked(a, b)?;
        Ok(sub(
            &sub(&self.chain(&[a.to_vec(), b.to_vec()]), &self.chain(&[b.to_vec(), a.to_vec()])),
            &self.chain(&[ab]),
        ))
    }

    /// Class of the concatenation of two chains whose union is a `⊤`-chain.
    pub fn mul_chains(&self, u: &[Vector<S>], v: &[Vector<S>]) -> Result<Vector<S>> {
        let all: Vec<Vector<S>> = u.iter().chain(v).cloned().collect();
        if all.len() > self.max_degree {
            return Err(Error::PreconditionFailed("product exceeds the truncation degree".into()));
        }
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                if !self.lie.space.rel(&all[i], &all[j]) {
                    return Err(Error::NotIndependent("factors of a product in the enveloping algebra".into()));
                }
            }
        }
        self.class_of(&self.chain(&all))
    }

    /// Image of `U^m` in `U`.
    pub fn filtration(&self, m: usize) -> Result<Subspace<S>> {
        let mut rows = Vec::new();
        for k in 0..=m {
            for b in self.components[k].basis() {
                rows.push(self.class_of(&self.embed(k, b))?);
            }
        }
        Ok(Subspace::of(self.dim(), &rows))
    }

    /// `ι(g)`, the image of degree one.
    pub fn iota(&self) -> Result<Subspace<S>> {
        let rows =
            self.components[1].basis().iter().map(|b| self.class_of(&self.embed(1, b))).collect::<Result<Vec<_>>>()?;
        Ok(Subspace::of(self.dim(), &rows))
    }

    /// `U`-coordinates of words of degree `p`, through the projection onto `T^p`.
    fn word_classes(&self, p: usize) -> Result<Vec<Vector<S>>> {
        let c = &self.components[p];
        let proj = LinMap::projection(c, &c.std_complement())?;
        (0..self.n().pow(p as u32))
            .map(|w| self.class_of(&self.embed(p, &proj.apply(&unit(self.n().pow(p as u32), w)))))
            .collect()
    }

    /// Primitive classes among elements of degree at most `N − 1` without constant term, where
    /// `Δ` is the unshuffle coproduct making `ι(g)` primitive.
    pub fn primitives(&self) -> Result<Subspace<S>> {
        let p = S::characteristic();
        if p != 0 && self.max_degree as u32 >= p {
            return Err(Error::CharacteristicNotZero(p));
        }
        let n = self.n();
        let du = self.dim();
        let top = self.max_degree.saturating_sub(1);
        let wc: Vec<Vec<Vector<S>>> = (0..=self.max_degree).map(|k| self.word_classes(k)).collect::<Result<_>>()?;
        let mut domain = Vec::new();
        let mut images = Vec::new();
        for k in 1..=top {
            for b in self.components[k].basis() {
                let mut img = zero_vec(du * du);
                for (w, c) in b.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                    let letters = word_letters(w, n, k);
                    for mask in 1..(1usize << k) - 1 {
                        let left: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| letters[i]).collect();
                        let right: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 0).map(|i| letters[i]).collect();
                        let lw = left.iter().fold(0, |a, &x| a * n + x);
                        let rw = right.iter().fold(0, |a, &x| a * n + x);
                        let t = crate::exactla::kron(&wc[left.len()][lw], &wc[right.len()][rw]);
                        img = add(&img, &scale(c, &t));
                    }
                }
                domain.push(self.embed(k, b));
                images.push(img);
            }
        }
        let map = LinMap::from_columns(du * du, &images);
        let ker = map.kernel();
        let rows = ker
            .basis()
            .iter()
            .map(|coef| {
                let x = domain.iter().zip(coef).fold(zero_vec(self.flat), |acc, (d, c)| add(&acc, &scale(c, d)));
                self.class_of(&x)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Subspace::of(du, &rows))
    }

    /// Dimensions of the graded pieces of `T^N_⊤`.
    pub fn tensor_dims(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.dim()).collect()
    }
}

/// Brackets of a Lie algebra table keyed by ordered basis pairs, for reporting.
pub fn basis_table<S: Scalar>(l: &LocLieAlgebra<S>) -> BTreeMap<(usize, usize), Option<Vector<S>>> {
    let n = l.dim();
    wedge_pairs(n).into_iter().map(|(i, j)| ((i, j), l.bracket(&unit(n, i), &unit(n, j)))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::vec_from_i64 as v;
    use crate::{F3, Q};

    fn q(x: i64) -> Q {
        Q::from_i64(x)
    }

    #[test]
    fn wedge_indices_are_dense() {
        let n = 4;
        let idx: Vec<usize> = wedge_pairs(n).into_iter().map(|(i, j)| wedge_index(n, i, j)).collect();
        assert_eq!(idx, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn family_brackets_extend_linearly() {
        let l = lie_family(q(2), q(3), q(5));
        assert_eq!(l.bracket(&v(&[1, 1, 0]), &v(&[0, 0, 1])), Some(v(&[2, 0, 8])));
        assert_eq!(l.bracket(&v(&[0, 0, 1]), &v(&[1, 0, 0])), Some(v(&[-2, 0, -3])));
        assert_eq!(l.bracket(&v(&[1, 0, 0]), &v(&[0, 1, 0])), None);
    }

    #[test]
    fn abelian_and_family_satisfy_jacobi() {
        let a = LocLieAlgebra::abelian(LocalitySpace::<Q>::trivial(3));
        assert_eq!(jacobi_check(&a).unwrap().verdict(), Verdict::Holds);
        let l = lie_family(q(1), q(1), q(1));
        let r = jacobi_check(&l).unwrap();
        assert!(r.jacobi.holds());
        // U = {e1}: e3, e1 ∈ P(e1) are related but [e3, e1] = −e1 − e3 is not in P(e1).
        let (a, b, c) = r.polar_stability.witness().unwrap().clone();
        assert!(l.space.rel(&a, &b) && l.space.rel(&a, &c) && l.space.rel(&b, &c));
        assert!(!l.space.rel(&l.bracket(&a, &b).unwrap(), &c));
    }

    #[test]
    fn family_over_f3_agrees_with_symbolic_check() {
        let one = F3::from_i64(1);
        let l = lie_family(one, one, one);
        let r = jacobi_check(&l).unwrap();
        assert!(r.jacobi.holds());
        assert!(r.polar_stability.fails());
    }

    #[test]
    fn corrupted_ortho_bracket_fails() {
        let s = LocalitySpace::<Q>::euclidean(3);
        let l = LocLieAlgebra::new(
            s,
            vec![
                (v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 0])),
                (v(&[1, 0, 0]), v(&[0, 0, 1]), v(&[0, 1, 0])),
                (v(&[0, 1, 0]), v(&[0, 0, 1]), v(&[0, 0, 0])),
            ],
        )
        .unwrap();
        let r = jacobi_check(&l).unwrap();
        let (a, b, c) = r.verdict().witness().unwrap().clone();
        assert!(!l.space.rel(&l.bracket(&a, &b).unwrap(), &c));
    }

    #[test]
    fn inconsistent_bracket_data_is_rejected() {
        let s = LocalitySpace::<Q>::trivial(2);
        let e = |i| unit::<Q>(2, i);
        let r = LocLieAlgebra::new(s, vec![(e(0), e(1), e(0)), (e(1), e(0), e(0))]);
        assert!(matches!(r, Err(Error::Inconsistent(_))));
    }

    #[test]
    fn family_extension_is_obstructed() {
        let l = lie_family(q(1), q(1), q(1));
        let r = bracket_extension(&l).unwrap();
        assert_eq!(r.unknowns, vec![(0, 1)]);
        let eq = &r.equations[0];
        // −μ'λ e1 − λ y e2 + (xμ + yμ' − λz) e3 with (x, y, z) the unknown [e1, e2].
        let form = |c: [i64; 3], k: i64| AffineForm { coeffs: c.iter().map(|&x| q(x)).collect(), constant: q(k) };
        assert_eq!(eq.components, vec![form([0, 0, 0], -1), form([0, -1, 0], 0), form([1, 1, -1], 0)]);
        match r.extension {
            Extension::Infeasible { obstruction, .. } => assert_eq!(obstruction.constant, q(-1)),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn general_family_equation_matches_closed_form() {
        let (la, mu, mp) = (q(2), q(3), q(7));
        let r = bracket_extension(&lie_family(la.clone(), mu.clone(), mp.clone())).unwrap();
        let c = &r.equations[0].components;
        assert_eq!(c[0].constant, -(mp.clone() * la.clone()));
        assert_eq!(c[1].coeffs, vec![q(0), -la.clone(), q(0)]);
        assert_eq!(c[2].coeffs, vec![mu, mp, -la]);
    }

    #[test]
    fn family_with_zero_lambda_extends() {
        let l = lie_family(q(0), q(1), q(1));
        let r = bracket_extension(&l).unwrap();
        let Extension::Feasible { table } = r.extension else { panic!("expected feasible") };
        let e12 = &table[0][1];
        // x μ + y μ' = 0 and y = 0.
        assert_eq!(e12[1], q(0));
        assert_eq!(e12[0], q(0));
        // The full table is a Lie bracket.
        let full = LocLieAlgebra::new(
            LocalitySpace::trivial(3),
            wedge_pairs(3).into_iter().map(|(i, j)| (unit(3, i), unit(3, j), table[i][j].clone())).collect(),
        )
        .unwrap();
        assert!(jacobi_check(&full).unwrap().jacobi.holds());
    }

    #[test]
    fn abelian_extension_is_zero() {
        let s =
            LocalitySpace::<Q>::from_blocks(2, vec![(Subspace::coordinate(2, &[0]), Subspace::coordinate(2, &[0]))])
                .unwrap();
        let l = LocLieAlgebra::new(s, vec![]).unwrap();
        let r = bracket_extension(&l).unwrap();
        assert_eq!(r.extension, Extension::Feasible { table: vec![vec![v(&[0, 0]); 2]; 2] });
    }

    #[test]
    fn abelian_plane_truncation_is_symmetric_algebra() {
        let l = LocLieAlgebra::abelian(LocalitySpace::<Q>::trivial(2));
        let u = trunc_env_algebra(&l, 2).unwrap();
        assert_eq!(u.filtered_dims, vec![1, 3, 6]);
        let u3 = trunc_env_algebra(&l, 3).unwrap();
        assert_eq!(u3.filtered_dims, vec![1, 3, 6, 10]);
        let prim = u3.primitives().unwrap();
        assert_eq!(prim, u3.iota().unwrap());
        assert_eq!(prim.dim(), 2);
    }

    #[test]
    fn zero_algebra_is_the_ground_field() {
        let l = LocLieAlgebra::abelian(LocalitySpace::<Q>::trivial(0));
        let u = trunc_env_algebra(&l, 3).unwrap();
        assert_eq!(u.filtered_dims, vec![1, 1, 1, 1]);
    }

    #[test]
    fn family_truncation_annihilates_relators() {
        let l = lie_family(q(1), q(1), q(1));
        let u = trunc_env_algebra(&l, 3).unwrap();
        let (e1, e3) = (unit::<Q>(3, 0), unit::<Q>(3, 2));
        let r = u.relator(&e1, &e3).unwrap();
        assert!(is_zero(&u.class_of(&r).unwrap()));
        // e1 ⊗ e2 is not a chain at all.
        assert!(u.mul_chains(&[e1.clone()], &[unit(3, 1)]).is_err());
        assert_eq!(u.primitives().unwrap(), u.iota().unwrap());
        assert_eq!(u.iota().unwrap().dim(), 3);
    }

    #[test]
    fn primitives_need_large_characteristic() {
        let l = LocLieAlgebra::abelian(LocalitySpace::<F3>::trivial(2));
        let u = trunc_env_algebra(&l, 3).unwrap();
        assert_eq!(u.primitives(), Err(Error::CharacteristicNotZero(3)));
        let u2 = trunc_env_algebra(&l, 2).unwrap();
        assert_eq!(u2.filtered_dims, vec![1, 3, 6]);
        assert_eq!(u2.primitives().unwrap(), u2.iota().unwrap());
    }
}
