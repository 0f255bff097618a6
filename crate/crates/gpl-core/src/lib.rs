//! Exact computer algebra for differential graded pre-Lie algebras with
//! divided powers.
//!
//! The engine is organized around a free complete algebra on graded
//! generators whose basis is the set of decorated rooted-tree isomorphism
//! classes. Weighted brace operations are evaluated with integer structure
//! constants computed once over the integers and pushed into the coefficient
//! ring, so every supported ring (including positive characteristic and
//! non-domains) is handled uniformly and without division.
//!
//! On top of the braces sit the circular product and gauge group, the
//! Maurer-Cartan set with its gauge action, Deligne-groupoid enumeration
//! over truncated local coefficients with the lifting obstructions, and the
//! convolution algebra of an arity-capped cooperad/operad pair together with
//! its pi_0 correspondence certificates.

pub mod artin;
pub mod braced;
pub mod builtins;
pub mod conv;
pub mod error;
pub mod gamma;
pub mod gauge;
pub mod linalg;
pub mod operad;
pub mod perm;
pub mod trees;
pub mod ring;

pub use error::{Error, Result};
pub use ring::{Ring, Scalar};
