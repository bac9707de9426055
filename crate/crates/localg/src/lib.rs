//! Exact computer algebra for locality structures: locality vector spaces,
//! quotient localities, locality tensor products, locality Lie and enveloping
//! algebras, and the Grossman-Larson locality Hopf algebra of decorated forests.
//!
//! Every computation is generic over a [`Scalar`]; the concrete fields are the
//! rationals [`Q`] and the prime fields [`Fp`].

pub mod catalog;
pub mod certificate;
pub mod conjlab;
pub mod error;
pub mod exactla;
pub mod fin;
pub mod glforest;
pub mod json;
pub mod lie;
pub mod locality;
pub mod quotients;
pub mod scalar;
pub mod tensor;

pub use error::{Error, Result};
pub use exactla::{LinMap, Subspace, Vector};
pub use scalar::{Fp, Scalar};

/// The rationals.
pub type Q = num_rational::BigRational;
pub type F2 = Fp<2>;
pub type F3 = Fp<3>;
pub type F5 = Fp<5>;
pub type F7 = Fp<7>;

/// Three-valued outcome of a decision procedure. `Fails` carries a witness;
/// `Unknown` is reserved for symbolic backends that could not certify either way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<W> {
    Holds,
    Fails(W),
    Unknown(String),
}

impl<W> Verdict<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown(_))
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Verdict::Holds => Some(true),
            Verdict::Fails(_) => Some(false),
            Verdict::Unknown(_) => None,
        }
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Fails(w) => Some(w),
            _ => None,
        }
    }

    pub fn map<V>(self, f: impl FnOnce(W) -> V) -> Verdict<V> {
        match self {
            Verdict::Holds => Verdict::Holds,
            Verdict::Fails(w) => Verdict::Fails(f(w)),
            Verdict::Unknown(s) => Verdict::Unknown(s),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Holds => "true",
            Verdict::Fails(_) => "false",
            Verdict::Unknown(_) => "unknown",
        }
    }
}
