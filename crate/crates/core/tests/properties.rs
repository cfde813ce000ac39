//! Randomized laws for the ordinal arithmetic, the term grammar, the
//! rewrite passes, and the tree oracle. Inputs shrink on failure, so a
//! broken law reports a small counterexample instead of a forty-line
//! wedge of wedges.

use std::sync::Arc;
use std::thread;

use num_bigint::BigUint;
use proptest::prelude::*;

use wildsets::cb::{forest_derivative, ord_tree, CbTree};
use wildsets::engine::engine_normal;
use wildsets::{Engine, Generator, Mode, Ordinal, SeqSchema, SpaceTerm};

// --- strategies ---------------------------------------------------------

/// Cantor normal forms with nesting depth at most 3 and small
/// coefficients. Exponents are drawn from the same strategy, so towers
/// like `w^(w^2*2+1)*3+w+2` come up routinely.
fn arb_ordinal() -> impl Strategy<Value = Ordinal> {
    let nat = (0u64..=4).prop_map(Ordinal::nat);
    nat.prop_recursive(3, 24, 3, |exp| {
        proptest::collection::vec((exp, 1u64..=3), 1..=3).prop_map(|mut monos| {
            monos.sort_by(|a, b| b.0.cmp(&a.0));
            monos.into_iter().fold(Ordinal::zero(), |acc, (e, c)| {
                acc.add(&Ordinal::monomial(e, BigUint::from(c)))
            })
        })
    })
}

fn arb_limit() -> impl Strategy<Value = Ordinal> {
    (arb_ordinal(), 1u64..=3).prop_map(|(e, c)| {
        let exp = if e.is_zero() { Ordinal::one() } else { e };
        Ordinal::monomial(exp, BigUint::from(c))
    })
}

/// The parser rejects empty members in positions that need a basepoint,
/// so generators substitute a point there.
fn inhabited(t: SpaceTerm) -> SpaceTerm {
    if t.normalize().is_empty_term() {
        SpaceTerm::Pt
    } else {
        t
    }
}

fn arb_generator() -> impl Strategy<Value = Generator> {
    prop_oneof![
        Just(Generator::BasedWitness),
        Just(Generator::FreeWitness),
        Just(Generator::WhiskerWitness),
    ]
}

fn arb_schema<S>(member: S) -> impl Strategy<Value = SeqSchema>
where
    S: Strategy<Value = SpaceTerm> + Clone + 'static,
{
    let stage = prop_oneof![
        Just(Ordinal::zero()),
        Just(Ordinal::nat(2)),
        Just(Ordinal::omega()),
    ];
    let base = prop_oneof![
        member.clone().prop_map(|t| SeqSchema::Const(Box::new(t))),
        (arb_limit(), arb_generator(), stage)
            .prop_map(|(limit, gen, stage)| { SeqSchema::Family { limit, gen, stage } }),
    ];
    base.prop_recursive(2, 8, 2, move |tail| {
        (proptest::collection::vec(member.clone(), 1..=2), tail)
            .prop_map(|(prefix, tail)| SeqSchema::List(prefix, Box::new(tail)))
    })
}

/// Terms over a single analysis dimension (mixing dimensions in one
/// term is a parse error by design).
fn arb_term_with_dim(dim: u32) -> impl Strategy<Value = SpaceTerm> {
    let leaf = prop_oneof![
        Just(SpaceTerm::Empty),
        Just(SpaceTerm::Pt),
        Just(SpaceTerm::Cell),
        Just(SpaceTerm::Sphere(dim)),
        Just(SpaceTerm::Earring(dim)),
        Just(SpaceTerm::FreeEarring(dim)),
        Just(SpaceTerm::PerfectlyWild(dim)),
    ];
    leaf.prop_recursive(3, 24, 3, |inner| {
        let member = inner.clone().prop_map(inhabited).boxed();
        prop_oneof![
            inner.clone().prop_map(|t| SpaceTerm::Plus(Box::new(t))),
            inner.clone().prop_map(|t| SpaceTerm::Whisker(Box::new(t))),
            member.clone().prop_map(|t| SpaceTerm::Realize(Box::new(t))),
            member
                .clone()
                .prop_map(|t| SpaceTerm::FRealize(Box::new(t))),
            member.clone().prop_map(|t| SpaceTerm::Mixed(Box::new(t))),
            proptest::collection::vec(inner.clone(), 1..=3).prop_map(SpaceTerm::Disj),
            arb_schema(member.clone()).prop_map(SpaceTerm::SWedge),
            (member.clone(), arb_schema(member))
                .prop_map(|(base, schema)| { SpaceTerm::Attach(Box::new(base), schema) }),
        ]
    })
}

fn arb_term() -> impl Strategy<Value = SpaceTerm> {
    (0u32..=3).prop_flat_map(arb_term_with_dim)
}

// --- ordinal laws -------------------------------------------------------

proptest! {
    #[test]
    fn ordinal_display_parses_back(a in arb_ordinal()) {
        let text = a.to_string();
        let back: Ordinal = text.parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn addition_is_associative(a in arb_ordinal(), b in arb_ordinal(), c in arb_ordinal()) {
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
    }

    #[test]
    fn small_left_summands_are_absorbed(a in arb_ordinal(), b in arb_ordinal()) {
        if a.leading_exp() < b.leading_exp() {
            prop_assert_eq!(a.add(&b), b);
        }
    }

    #[test]
    fn addition_is_monotone(a in arb_ordinal(), b in arb_ordinal(), c in arb_ordinal()) {
        let (lo, hi) = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        prop_assert!(c.add(&lo) <= c.add(&hi));
        prop_assert!(lo.add(&c) <= hi.add(&c));
    }

    #[test]
    fn comparison_is_a_total_order(a in arb_ordinal(), b in arb_ordinal(), c in arb_ordinal()) {
        prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
        if a <= b && b <= c {
            prop_assert!(a <= c);
        }
        prop_assert!(a <= a.succ());
        prop_assert!(a < a.succ());
    }

    #[test]
    fn left_subtraction_inverts_addition(a in arb_ordinal(), b in arb_ordinal()) {
        let sum = a.add(&b);
        let diff = a.left_sub(&sum).expect("a <= a + b always holds");
        prop_assert_eq!(a.add(&diff), sum);
    }

    #[test]
    fn left_subtraction_exists_exactly_when_below(a in arb_ordinal(), b in arb_ordinal()) {
        match a.left_sub(&b) {
            Some(m) => prop_assert_eq!(a.add(&m), b),
            None => prop_assert!(a > b),
        }
    }

    #[test]
    fn fundamental_sequences_climb_to_their_limit(a in arb_ordinal(), i in 1u64..=6) {
        if a.is_limit() {
            let lo = a.fund_seq(i).unwrap();
            let hi = a.fund_seq(i + 1).unwrap();
            prop_assert!(lo < hi);
            prop_assert!(hi < a);
        } else {
            prop_assert!(a.fund_seq(i).is_err());
        }
    }

    /// Build `w^p * q + r` by exponent shifting (never through the
    /// division under test) and check the quotient comes back out.
    #[test]
    fn omega_power_division_round_trips(
        q in arb_ordinal(),
        p in arb_ordinal(),
        r in arb_ordinal(),
    ) {
        let mut shifted = Ordinal::zero();
        let mut rest = q.clone();
        while let Some((e, c, tail)) = rest.split_leading() {
            shifted = shifted.add(&Ordinal::monomial(p.add(&e), c));
            rest = tail;
        }
        let mut small = Ordinal::zero();
        let mut rest = r;
        while let Some((e, c, tail)) = rest.split_leading() {
            if e < p {
                small = small.add(&Ordinal::monomial(e, c));
            }
            rest = tail;
        }
        prop_assert_eq!(shifted.add(&small).div_omega_pow(&p), q);
    }
}

// --- term grammar laws --------------------------------------------------

proptest! {
    #[test]
    fn term_display_parses_back(t in arb_term()) {
        let text = t.to_string();
        let back: SpaceTerm = text.parse().unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn normalization_is_idempotent(t in arb_term()) {
        let once = t.normalize();
        prop_assert_eq!(once.normalize(), once);
    }

    #[test]
    fn engine_rewrite_is_idempotent(t in arb_term()) {
        let once = engine_normal(&t);
        prop_assert_eq!(engine_normal(&once), once);
    }
}

// --- tree oracle laws ---------------------------------------------------

proptest! {
    /// Taking limit points of `[0, a]` is division by `w`, except that
    /// the isolated point 0 falls off the bottom.
    #[test]
    fn derivative_is_division_by_omega(a in arb_ordinal()) {
        let derived = forest_derivative(&ord_tree(&a));
        let mut expected = ord_tree(&a.div_omega_pow(&Ordinal::one()));
        prop_assert_eq!(expected.0.pop(), Some(CbTree::Leaf));
        prop_assert_eq!(derived, expected);
    }
}

// --- engine determinism -------------------------------------------------

const DETERMINISM_POOL: &[(&str, u32)] = &[
    ("(E 1)", 1),
    ("(FE 2)", 2),
    ("(swedge (family w whisker-witness))", 1),
    ("(attach (E 1) (const (E 1)))", 1),
    ("(realize (mixed (swedge (family w^2 based-witness))))", 1),
];

/// Memoized answers must agree with a cold start: a warm engine that has
/// already seen every pool term answers exactly like a fresh engine that
/// sees one term in isolation.
#[test]
fn memoization_does_not_change_answers() {
    let warm = Engine::new();
    for (t, dim) in DETERMINISM_POOL {
        let term: SpaceTerm = t.parse().unwrap();
        warm.rank(&term, *dim, Mode::Based).unwrap();
    }
    for (t, dim) in DETERMINISM_POOL {
        let term: SpaceTerm = t.parse().unwrap();
        let fresh = Engine::new();
        assert_eq!(
            warm.rank(&term, *dim, Mode::Based).unwrap(),
            fresh.rank(&term, *dim, Mode::Based).unwrap(),
            "warm and cold answers differ on {t}"
        );
    }
}

#[test]
fn shared_engine_is_consistent_across_threads() {
    let engine = Arc::new(Engine::new());
    let mut handles = Vec::new();
    for _ in 0..4 {
        let engine = Arc::clone(&engine);
        handles.push(thread::spawn(move || {
            DETERMINISM_POOL
                .iter()
                .map(|(t, dim)| {
                    let term: SpaceTerm = t.parse().unwrap();
                    let rank = engine.rank(&term, *dim, Mode::Based).unwrap();
                    (*dim, term, rank)
                })
                .collect::<Vec<_>>()
        }));
    }
    for handle in handles {
        for (dim, term, rank) in handle.join().unwrap() {
            let fresh = Engine::new();
            assert_eq!(rank, fresh.rank(&term, dim, Mode::Based).unwrap());
        }
    }
}
