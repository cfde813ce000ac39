//! Symbolic calculator for transfinitely iterated wild sets.
//!
//! The crate is organized around a small term language for compact
//! metric spaces (`space`), ordinal arithmetic in Cantor normal form
//! below ε₀ (`ordinal`), a certified rule engine that iterates the
//! based and free wild-set operators symbolically (`engine`), canonical
//! witness constructions for every countable rank (`witness`), and a
//! Cantor–Bendixson tree oracle cross-checking the 0-dimensional
//! fragment (`cb`).

pub mod cb;
pub mod engine;
pub mod ordinal;
pub mod space;
pub mod witness;

pub use engine::{sphere_laden, Death, Engine, EngineError, Missing, Mode, RankReport, Stabilizer};
pub use ordinal::{Ordinal, OrdinalError, OrdinalKind, OrdinalSeq};
pub use space::{Attributes, DimBound, Generator, SeqSchema, SpaceError, SpaceTerm};
pub use witness::{difference_witness, generate, witness_based, witness_free, WitnessError};
