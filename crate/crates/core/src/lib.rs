//! Genus-2 isogeny-graph hash over superspecial curves.

pub mod baseline;
pub mod field;
pub mod graph;
pub mod hash;
pub mod invariants;
pub mod kat;
pub mod poly;
pub mod richelot;

use num_bigint::BigUint;

pub use field::{FieldContext, FieldError, FieldHandle, Fp2, Residue};
pub use hash::{Digest, HashContext, HashError, Outcome};
pub use invariants::{cardona_quer_of, enumerate_ss_j, is_superspecial_g2, supersingular_models, EllipticRootsForm, Genus2Curve, InvariantError, InvariantTriple};
pub use poly::{LinearFactor, Poly, PolyError};
pub use richelot::{FactorList, QuadraticSplitting, RichelotError, StepOutcome};

/// Machine-word backend, for primes below 2^32.
pub type SmallFp2 = Fp2<u64>;
/// Arbitrary-precision backend.
pub type BigFp2 = Fp2<BigUint>;
pub type SmallField = FieldContext<u64>;
pub type BigField = FieldContext<BigUint>;
pub type SmallPoly = Poly<u64>;
pub type BigPoly = Poly<BigUint>;
