//! Canonical spaces realizing a prescribed wild rank.
//!
//! `witness_based(λ, n)` builds a Peano continuum whose based rank is
//! exactly λ, `witness_free(λ, n)` a continuum whose free rank is λ,
//! and `difference_witness(λ, n)` a single space whose based and free
//! ranks differ by an arbitrary infinite margin. The recursions follow
//! the successor/limit case analysis over the ordinal, and every
//! infinite family of summands is described finitely through a
//! generator name resolved by [`generate`].
//!
//! The constructions only build terms; the engine re-derives their
//! ranks (and the certificates that license each rule) from scratch.

use crate::ordinal::{Ordinal, OrdinalError, OrdinalKind};
use crate::space::{Generator, SeqSchema, SpaceTerm};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error("based witnesses start at rank 1")]
    ZeroOrdinal,
    #[error("the based/free gap needs an infinite rank, got {0}")]
    FiniteOrdinal(Ordinal),
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
}

/// A space with based rank exactly `λ ≥ 1` at dimension `n`, Peano and
/// `n`-dimensional, with the stage-(λ−1) profile a single point when λ
/// is a successor ≥ 2.
pub fn witness_based(lambda: &Ordinal, n: u32) -> Result<SpaceTerm, WitnessError> {
    if lambda.is_zero() {
        return Err(WitnessError::ZeroOrdinal);
    }
    if *lambda == Ordinal::one() {
        return Ok(SpaceTerm::Sphere(n));
    }
    if *lambda == Ordinal::nat(2) {
        return Ok(SpaceTerm::Earring(n));
    }
    Ok(match lambda.kind() {
        OrdinalKind::Successor(kappa) => match kappa.kind() {
            // tower: attach rank-κ witnesses densely to an earring
            OrdinalKind::Successor(_) => SpaceTerm::attach(
                SpaceTerm::Earring(n),
                SeqSchema::constant(witness_based(&kappa, n)?),
            ),
            // wedge witnesses of ranks cofinal in κ at their basepoints
            OrdinalKind::Limit => {
                SpaceTerm::SWedge(SeqSchema::family(kappa, Generator::BasedWitness))
            }
            OrdinalKind::Zero => unreachable!("λ = 1 handled above"),
        },
        // whiskered wedge: the arcs delay the wedge point one stage so
        // the rank lands exactly on the limit
        OrdinalKind::Limit => {
            SpaceTerm::SWedge(SeqSchema::family(lambda.clone(), Generator::WhiskerWitness))
        }
        OrdinalKind::Zero => unreachable!("checked above"),
    })
}

/// A continuum with free rank exactly `λ` at dimension `n`, with the
/// stage-(λ−1) profile a whole `n`-sphere when λ is a successor.
pub fn witness_free(lambda: &Ordinal, n: u32) -> SpaceTerm {
    if lambda.is_zero() {
        return SpaceTerm::PerfectlyWild(n);
    }
    if *lambda == Ordinal::one() {
        return SpaceTerm::Sphere(n);
    }
    match lambda.kind() {
        OrdinalKind::Successor(kappa) => match kappa.kind() {
            // floating copies of the rank-κ witness attached densely to
            // a sphere; the sphere survives to stage κ exactly
            OrdinalKind::Successor(_) => SpaceTerm::attach(
                SpaceTerm::Sphere(n),
                SeqSchema::constant(SpaceTerm::plus(witness_free(&kappa, n))),
            ),
            // same shape with the copies' ranks cofinal in κ; a wedge
            // would lose the sphere at stage κ and with it the
            // successor clause, so the tower keeps the sphere base
            OrdinalKind::Limit => SpaceTerm::attach(
                SpaceTerm::Sphere(n),
                SeqSchema::family(kappa, Generator::FreeWitness),
            ),
            OrdinalKind::Zero => unreachable!("λ = 1 handled above"),
        },
        // over a perfectly wild base the stages decrease to the base
        // itself, pinning the rank at the limit
        OrdinalKind::Limit => SpaceTerm::attach(
            SpaceTerm::PerfectlyWild(n),
            SeqSchema::family(lambda.clone(), Generator::FreeWitness),
        ),
        OrdinalKind::Zero => unreachable!("checked above"),
    }
}

/// A single space whose based rank is `λ` but whose free rank is 3.
pub fn difference_witness(lambda: &Ordinal, n: u32) -> Result<SpaceTerm, WitnessError> {
    if lambda.is_finite() {
        return Err(WitnessError::FiniteOrdinal(lambda.clone()));
    }
    let core = witness_based(lambda, n)?;
    Ok(SpaceTerm::Realize(Box::new(SpaceTerm::Mixed(Box::new(
        core,
    )))))
}

/// The member a family generator produces at index `α` (a successor
/// drawn from `succ_seq` of the family's limit) and dimension `n`.
pub fn generate(gen: Generator, alpha: &Ordinal, n: u32) -> Result<SpaceTerm, WitnessError> {
    Ok(match gen {
        Generator::BasedWitness => witness_based(alpha, n)?,
        Generator::WhiskerWitness => SpaceTerm::whisker(witness_based(alpha, n)?),
        Generator::FreeWitness => SpaceTerm::plus(witness_free(alpha, n)),
    })
}
