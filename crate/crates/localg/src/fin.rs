//! Enumeration of finite-field vector spaces.
//!
//! Vectors of `F_p^n` are indexed in base p with coordinate 0 most significant.

use crate::error::{Error, Result};
use crate::exactla::Vector;
use crate::scalar::Scalar;

/// Upper bound on the number of vectors an exhaustive routine will enumerate.
pub const MAX_ENUM: u64 = 1 << 20;

/// `p^n`, or `TooLarge` beyond [`MAX_ENUM`].
pub fn space_size<S: Scalar>(n: usize) -> Result<u64> {
    let q = S::order().ok_or_else(|| Error::Unsupported("enumeration needs a finite field".into()))?;
    match q.checked_pow(n as u32) {
        Some(t) if t <= MAX_ENUM => Ok(t),
        _ => Err(Error::TooLarge(format!("{}^{n} vectors", S::field_name()))),
    }
}

pub fn encode<S: Scalar>(v: &[S]) -> u64 {
    let q = S::order().expect("finite field");
    v.iter().fold(0, |acc, x| acc * q + x.index())
}

pub fn decode<S: Scalar>(mut idx: u64, n: usize) -> Vector<S> {
    let q = S::order().expect("finite field");
    let mut v = vec![S::zero(); n];
    for c in v.iter_mut().rev() {
        *c = S::from_index(idx % q);
        idx /= q;
    }
    v
}

pub fn all_vectors<S: Scalar>(n: usize) -> Result<Vec<Vector<S>>> {
    let t = space_size::<S>(n)?;
    Ok((0..t).map(|i| decode(i, n)).collect())
}

/// Minimal fixed-size bitset.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    pub fn intersects(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{F3, F5};

    #[test]
    fn encode_decode_round_trip() {
        for i in 0..125 {
            let v: Vector<F5> = decode(i, 3);
            assert_eq!(encode(&v), i);
        }
        let v: Vector<F3> = decode(5, 2);
        assert_eq!(v, vec![F3::new(1), F3::new(2)]);
    }

    #[test]
    fn bitset_basics() {
        let mut a = BitSet::new(130);
        a.set(3);
        a.set(129);
        let mut b = BitSet::new(130);
        b.set(129);
        assert!(b.is_subset(&a));
        assert!(a.intersects(&b));
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![3, 129]);
        b.union_with(&a);
        assert_eq!(b.count(), 2);
    }

    #[test]
    fn oversized_spaces_are_rejected() {
        assert!(space_size::<F5>(20).is_err());
        assert!(space_size::<crate::Q>(1).is_err());
    }
}
