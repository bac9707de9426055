//! Worked example relations, built over any field.

use crate::exactla::{vec_from_i64 as v, Subspace};
use crate::locality::LocalitySpace;
use crate::scalar::Scalar;

fn span<S: Scalar>(n: usize, rows: &[&[i64]]) -> Subspace<S> {
    Subspace::of(n, &rows.iter().map(|r| v(r)).collect::<Vec<_>>())
}

/// `V×{0} ∪ {0}×V ∪ ⟨e1,e3⟩×⟨e2+e4⟩` (symmetrised) on a 4-space.
pub fn r4<S: Scalar>() -> LocalitySpace<S> {
    LocalitySpace::from_blocks(
        4,
        vec![(Subspace::full(4), Subspace::zero(4)), (Subspace::coordinate(4, &[0, 2]), span(4, &[&[0, 1, 0, 1]]))],
    )
    .expect("dims agree")
}

/// The 7-dimensional relation with `W = ⟨e1,e2,e3⟩` compatible but without a strong complement.
pub fn r7<S: Scalar>() -> LocalitySpace<S> {
    let f1: &[i64] = &[1, 0, 0, 0, 0, 0, 1];
    let f2: &[i64] = &[0, 1, 0, 0, 0, 0, 1];
    let f3: &[i64] = &[0, 0, 1, 0, 0, 0, 1];
    let c = |i: &[usize]| Subspace::<S>::coordinate(7, i);
    LocalitySpace::from_blocks(
        7,
        vec![
            (Subspace::full(7), Subspace::zero(7)),
            (span(7, &[f1]), c(&[3, 4])),
            (span(7, &[f2]), c(&[4, 5])),
            (span(7, &[f3]), c(&[3, 5])),
            (span(7, &[f1, f3]), c(&[3])),
            (span(7, &[f1, f2]), c(&[4])),
            (span(7, &[f2, f3]), c(&[5])),
        ],
    )
    .expect("dims agree")
}

/// `W = ⟨e1,e2,e3⟩` for [`r7`].
pub fn r7_w<S: Scalar>() -> Subspace<S> {
    Subspace::coordinate(7, &[0, 1, 2])
}

/// The plane relation `V×{0} ∪ {0}×V ∪ ⟨e1+e2⟩×⟨e1⟩ ∪ ⟨e1+2e2⟩×⟨e2⟩` (symmetrised) whose
/// standard and alternative locality tensor squares differ.
pub fn appendix_plane<S: Scalar>() -> LocalitySpace<S> {
    LocalitySpace::from_blocks(
        2,
        vec![
            (Subspace::full(2), Subspace::zero(2)),
            (span(2, &[&[1, 1]]), span(2, &[&[1, 0]])),
            (span(2, &[&[1, 2]]), span(2, &[&[0, 1]])),
        ],
    )
    .expect("dims agree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    #[test]
    fn r7_sample_relations() {
        let s = r7::<Q>();
        assert!(s.rel(&v(&[1, 0, 0, 0, 0, 0, 1]), &v(&[0, 0, 0, 1, 1, 0, 0])));
        assert!(!s.rel(&v(&[1, 0, 0, 0, 0, 0, 1]), &v(&[0, 0, 0, 0, 0, 1, 0])));
        assert!(s.rel(&v(&[1, 0, 1, 0, 0, 0, 2]), &v(&[0, 0, 0, 3, 0, 0, 0])));
        assert!(s.rel(&v(&[0, 0, 0, 0, 0, 1, 0]), &v(&[0, 2, 2, 0, 0, 0, 4])));
    }

    #[test]
    fn appendix_plane_is_symmetric() {
        let s = appendix_plane::<Q>();
        assert!(s.rel(&v(&[1, 0]), &v(&[2, 2])));
        assert!(s.rel(&v(&[2, 4]), &v(&[0, 1])));
        assert!(!s.rel(&v(&[1, 0]), &v(&[1, 0])));
    }
}
