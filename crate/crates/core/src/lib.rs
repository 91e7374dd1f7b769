//! Spectral triples attached to a Schottky uniformization at an archimedean
//! place.
//!
//! The crate has two halves that meet in [`bridge`]:
//!
//! * the archimedean side: a finite-dimensional graded model of the
//!   hyper-cohomology of the cone of the local monodromy ([`arch`]), its
//!   Dirac operator `Phi`, the dualities and the spectral zeta function whose
//!   regularized determinant reproduces archimedean Gamma factors ([`zeta`]);
//! * the dynamical side: reduced words of a Schottky group and their
//!   geometry ([`schottky`]), the subshift of finite type and its mapping-torus
//!   (co)homology ([`subshift`]), and the operator algebra acting on it
//!   ([`triples`]).
//!
//! Linear algebra is generic over [`scalar::Field`] and runs exactly over
//! [`Rational`]; geometry and special functions are generic over
//! [`scalar::Real`].

pub mod arch;
pub mod bridge;
pub mod cli;
pub mod config;
pub mod error;
pub mod gamma;
pub mod linalg;
pub mod scalar;
pub mod schottky;
pub mod subshift;
pub mod triples;
pub mod zeta;

pub use error::{Error, Result};

/// Exact rationals used for all filtration and operator identities.
pub type Rational = num_rational::BigRational;

pub type Mobius = schottky::MobiusElement<f64>;
pub type Point3 = schottky::H3Point<f64>;
pub type SpherePoint = schottky::ProjPoint<f64>;
pub type Group = schottky::SchottkyGroup<f64>;
pub type CylinderFn = subshift::CylinderFunction<Rational>;
pub type ArchModel = arch::ConeModel;
pub type ArchElement = arch::GradedElement<Rational>;
pub type ExactOperator = triples::TruncatedOperator<Rational>;
pub type FloatOperator = triples::TruncatedOperator<f64>;

/// Resource caps for enumeration and elimination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Caps {
    pub max_words: u128,
    pub max_dim: u128,
}

impl Default for Caps {
    fn default() -> Self {
        Self { max_words: 2_000_000, max_dim: 20_000 }
    }
}

impl Caps {
    pub const ENV_MAX_WORDS: &'static str = "SCHOTTKY_MAX_WORDS";
    pub const ENV_MAX_DIM: &'static str = "SCHOTTKY_MAX_DIM";

    /// Defaults overridden by `SCHOTTKY_MAX_WORDS` / `SCHOTTKY_MAX_DIM`.
    pub fn from_env() -> Result<Self> {
        let mut caps = Self::default();
        let read = |key: &str| -> Result<Option<u128>> {
            match std::env::var(key) {
                Ok(v) => v
                    .trim()
                    .parse::<u128>()
                    .map(Some)
                    .map_err(|e| Error::Config(format!("{key}={v}: {e}"))),
                Err(_) => Ok(None),
            }
        };
        if let Some(v) = read(Self::ENV_MAX_WORDS)? {
            caps.max_words = v;
        }
        if let Some(v) = read(Self::ENV_MAX_DIM)? {
            caps.max_dim = v;
        }
        Ok(caps)
    }

    pub fn check_words(&self, needed: u128) -> Result<()> {
        if needed > self.max_words {
            Err(Error::ResourceCap { what: "words", needed, cap: self.max_words })
        } else {
            Ok(())
        }
    }

    pub fn check_dim(&self, needed: u128) -> Result<()> {
        if needed > self.max_dim {
            Err(Error::ResourceCap { what: "matrix dimension", needed, cap: self.max_dim })
        } else {
            Ok(())
        }
    }
}
