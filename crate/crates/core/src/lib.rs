//! Finite natural dualities over two-element templates.
//!
//! The crate enumerates homomorphisms into two-element structures, builds
//! duals and second duals with their evaluation maps, and implements the
//! ⋈ relation on pairs of subsets: its axioms, halfspaces and the
//! constructive separation procedure. Bi-convexity spaces and the classical
//! finite dualities (orders and distributive lattices, sets and Boolean
//! algebras, semilattices, betweenness) are built on top.

pub mod bea;
pub mod caps;
pub mod convexity;
pub mod dual;
pub mod error;
pub mod hom;
pub mod instances;
pub mod io;
pub mod mask;
pub mod model;

pub use bea::{BeaOracle, UltimateVariant};
pub use caps::Caps;
pub use dual::{Instance, Template};
pub use error::{Error, Result};
pub use mask::Mask;
pub use model::{FiniteStructure, SetFamily, Signature, Symbol, TwoTemplate};
