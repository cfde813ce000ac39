//! Cantor–Bendixson trees: the classical oracle for the 0-dimensional
//! fragment.
//!
//! A countable compact metric space that is 0-dimensional is, up to
//! homeomorphism, a countable ordinal interval, and its iterated wild
//! sets degenerate to Cantor–Bendixson derivatives (isolated points die,
//! limit points survive). This module represents such spaces as forests
//! of well-founded trees: a `Leaf` is an isolated point, a `Node` a
//! point that is the limit of the displayed children sequence.
//!
//! `ord_tree(α)` builds the forest of the interval `[0, α]`,
//! `cb_rank_closed` reads off the number of derivative steps to reach
//! the empty space in closed form, and `cb_derivative` performs one
//! explicit surgery step. Trees for intervals with limit exponents
//! (`[0, ω^ω]` and beyond) use a family node; one surgery step maps such
//! a node to an order-isomorphic copy of itself, which is exactly why
//! the iteration oracle jumps over limit stages by dividing the ordinal
//! rather than stepping.

use crate::ordinal::{sup_of, Ordinal, OrdinalError, OrdinalKind, OrdinalSeq};
use crate::space::{SeqSchema, SpaceTerm};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CbTree {
    /// An isolated point.
    Leaf,
    /// A point in the closure of the displayed children.
    Node(CbSchema),
}

/// The children sequence of a node. Members are forests so that a
/// single child slot can carry several trees side by side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CbSchema {
    /// Every child slot holds a copy of the same forest.
    Const(CbForest),
    /// Finitely many explicit slots, then a tail.
    List(Vec<CbForest>, Box<CbSchema>),
    /// Slot `j` holds the tree of `[0, ω^succ_seq(limit, j)]`.
    Family { limit: Ordinal },
}

/// A finite disjoint union of trees; empty means the empty space.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CbForest(pub Vec<CbTree>);

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CbError {
    #[error("term has no 0-dimensional tree reading: {0}")]
    NotZeroDimensional(SpaceTerm),
    #[error("tree syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
}

impl CbForest {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The tree of the interval `[0, ω^e]`.
pub fn pow_tree(e: &Ordinal) -> CbTree {
    match e.kind() {
        OrdinalKind::Zero => CbTree::Leaf,
        OrdinalKind::Successor(p) => CbTree::Node(CbSchema::Const(CbForest(vec![pow_tree(&p)]))),
        OrdinalKind::Limit => CbTree::Node(CbSchema::Family { limit: e.clone() }),
    }
}

/// The forest of the interval `[0, α]`: one power tree per summand of
/// the Cantor normal form, repeated by its coefficient, plus one final
/// leaf for the point `α` itself when α ends in a finite part—in
/// ordinal terms, `[0, γ + m]` is `[0, γ]` together with `m` isolated
/// points, and `[0, 0]` is a single point.
pub fn ord_tree(alpha: &Ordinal) -> CbForest {
    let mut trees = Vec::new();
    let mut rest = alpha.clone();
    // peel leading powers: [0, ω^e·c + ρ] = c copies of (0, ω^e] ⊔ [0, ρ]
    // and each half-open block (ω^e·k, ω^e·(k+1)] carries the tree of ω^e
    while let Some((e, count, remainder)) = rest.split_leading() {
        if e.is_zero() {
            break;
        }
        let count = u64::try_from(&count).expect("coefficient fits machine width");
        for _ in 0..count {
            trees.push(pow_tree(&e));
        }
        rest = remainder;
    }
    let tail = rest.as_nat().expect("remaining part is finite");
    let tail = u64::try_from(&tail).expect("finite part fits machine width");
    for _ in 0..=tail {
        trees.push(CbTree::Leaf);
    }
    CbForest(trees)
}

/// Closed-form number of derivative steps until the forest is empty.
pub fn cb_rank_closed(forest: &CbForest) -> Result<Ordinal, OrdinalError> {
    let mut rank = Ordinal::zero();
    for t in &forest.0 {
        let r = tree_rank(t)?;
        if r > rank {
            rank = r;
        }
    }
    Ok(rank)
}

fn tree_rank(t: &CbTree) -> Result<Ordinal, OrdinalError> {
    Ok(match t {
        CbTree::Leaf => Ordinal::one(),
        CbTree::Node(s) => schema_rank(s)?.add(&Ordinal::one()),
    })
}

/// Supremum of the children ranks.
fn schema_rank(s: &CbSchema) -> Result<Ordinal, OrdinalError> {
    Ok(match s {
        CbSchema::Const(f) => cb_rank_closed(f)?,
        CbSchema::List(fs, tail) => {
            let mut r = schema_rank(tail)?;
            for f in fs {
                let fr = cb_rank_closed(f)?;
                if fr > r {
                    r = fr;
                }
            }
            r
        }
        // slot j carries [0, ω^succ_seq(limit, j)], of rank
        // succ_seq(limit, j) + 1; the supremum is the limit itself
        CbSchema::Family { limit } => sup_of(&OrdinalSeq::Succ {
            limit: limit.clone(),
            offset: 1,
        })?,
    })
}

/// One Cantor–Bendixson derivative, performed structurally: leaves die,
/// nodes survive with derived children, and a node whose children all
/// die becomes a leaf. A family node maps onto an order-isomorphic copy
/// of itself (each slot loses its own top layer but the slots still
/// exhaust the same limit), so it is returned unchanged.
pub fn cb_derivative(t: &CbTree) -> Option<CbTree> {
    match t {
        CbTree::Leaf => None,
        CbTree::Node(s) => Some(match derive_schema(s) {
            Some(s2) => CbTree::Node(s2),
            None => CbTree::Leaf,
        }),
    }
}

pub fn forest_derivative(f: &CbForest) -> CbForest {
    CbForest(f.0.iter().filter_map(cb_derivative).collect())
}

/// Children schema after one derivative; `None` when every child died.
fn derive_schema(s: &CbSchema) -> Option<CbSchema> {
    match s {
        CbSchema::Const(f) => {
            let d = forest_derivative(f);
            if d.is_empty() {
                None
            } else {
                Some(CbSchema::Const(d))
            }
        }
        CbSchema::List(fs, tail) => {
            let live: Vec<CbForest> = fs
                .iter()
                .map(forest_derivative)
                .filter(|f| !f.is_empty())
                .collect();
            match derive_schema(tail) {
                Some(t2) => Some(if live.is_empty() {
                    t2
                } else {
                    CbSchema::List(live, Box::new(t2))
                }),
                None if live.is_empty() => None,
                // the tail slots died but explicit ones survive; keep
                // them over a vacuous tail
                None => Some(CbSchema::List(
                    live,
                    Box::new(CbSchema::Const(CbForest(vec![]))),
                )),
            }
        }
        CbSchema::Family { limit } => Some(CbSchema::Family {
            limit: limit.clone(),
        }),
    }
}

/// Reads an engine profile of a 0-dimensional term as a forest, so that
/// tree surgery and the symbolic engine can be compared stage by stage.
pub fn w0_bridge(t: &SpaceTerm) -> Result<CbForest, CbError> {
    use SpaceTerm::*;
    Ok(match t {
        Empty => CbForest(vec![]),
        Pt => CbForest(vec![CbTree::Leaf]),
        Earring(0) | FreeEarring(0) => {
            CbForest(vec![CbTree::Node(CbSchema::Const(CbForest(vec![
                CbTree::Leaf,
            ])))])
        }
        Plus(inner) => {
            // the floating copies are carried by a fresh isolated point
            let mut f = w0_bridge(inner)?;
            f.0.push(CbTree::Leaf);
            f
        }
        Disj(ms) => {
            let mut f = CbForest(vec![]);
            for m in ms {
                f.0.extend(w0_bridge(m)?.0);
            }
            f
        }
        SWedge(s) => CbForest(vec![CbTree::Node(bridge_schema(s)?)]),
        other => return Err(CbError::NotZeroDimensional(other.clone())),
    })
}

fn bridge_schema(s: &SeqSchema) -> Result<CbSchema, CbError> {
    Ok(match s {
        SeqSchema::Const(m) => CbSchema::Const(w0_bridge(m)?),
        SeqSchema::List(ms, tail) => {
            let fs: Vec<CbForest> = ms.iter().map(w0_bridge).collect::<Result<_, _>>()?;
            CbSchema::List(fs, Box::new(bridge_schema(tail)?))
        }
        SeqSchema::Family { .. } => {
            return Err(CbError::NotZeroDimensional(SpaceTerm::SWedge(s.clone())))
        }
    })
}

// ---- text form -----------------------------------------------------------

impl fmt::Display for CbTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CbTree::Leaf => f.write_str("leaf"),
            CbTree::Node(s) => write!(f, "(node {s})"),
        }
    }
}

impl fmt::Display for CbSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CbSchema::Const(forest) => write!(f, "(const {forest})"),
            CbSchema::List(fs, tail) => {
                f.write_str("(list")?;
                for x in fs {
                    write!(f, " {x}")?;
                }
                write!(f, " {tail})")
            }
            CbSchema::Family { limit } => write!(f, "(family {limit})"),
        }
    }
}

impl fmt::Display for CbForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return self.0[0].fmt(f);
        }
        f.write_str("(forest")?;
        for t in &self.0 {
            write!(f, " {t}")?;
        }
        f.write_str(")")
    }
}

pub fn parse_tree(src: &str) -> Result<CbTree, CbError> {
    let bytes = src.as_bytes();
    let mut p = TreeParser { src: bytes, pos: 0 };
    p.skip_ws();
    let t = p.tree()?;
    p.skip_ws();
    if p.pos != bytes.len() {
        return Err(p.err("trailing input"));
    }
    Ok(t)
}

struct TreeParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> TreeParser<'a> {
    fn err(&self, msg: &str) -> CbError {
        CbError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, b: u8) -> Result<(), CbError> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", b as char)))
        }
    }

    fn symbol(&mut self) -> Result<String, CbError> {
        let start = self.pos;
        while self
            .peek()
            .map(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
            .unwrap_or(false)
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a symbol"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn tree(&mut self) -> Result<CbTree, CbError> {
        self.skip_ws();
        if self.peek() == Some(b'(') {
            self.expect(b'(')?;
            self.skip_ws();
            let head = self.symbol()?;
            if head != "node" {
                return Err(self.err("expected 'node'"));
            }
            let s = self.schema()?;
            self.skip_ws();
            self.expect(b')')?;
            return Ok(CbTree::Node(s));
        }
        let head = self.symbol()?;
        if head == "leaf" {
            Ok(CbTree::Leaf)
        } else {
            Err(self.err("expected 'leaf' or '(node ...)'"))
        }
    }

    /// A forest is a single tree or `(forest tree*)`.
    fn forest(&mut self) -> Result<CbForest, CbError> {
        self.skip_ws();
        if self.peek() == Some(b'(') {
            let mark = self.pos;
            self.expect(b'(')?;
            self.skip_ws();
            let head = self.symbol()?;
            if head == "forest" {
                let mut trees = Vec::new();
                loop {
                    self.skip_ws();
                    if self.peek() == Some(b')') {
                        self.pos += 1;
                        return Ok(CbForest(trees));
                    }
                    trees.push(self.tree()?);
                }
            }
            self.pos = mark;
        }
        Ok(CbForest(vec![self.tree()?]))
    }

    fn schema(&mut self) -> Result<CbSchema, CbError> {
        self.skip_ws();
        self.expect(b'(')?;
        self.skip_ws();
        let head = self.symbol()?;
        match head.as_str() {
            "const" => {
                let f = self.forest()?;
                self.skip_ws();
                self.expect(b')')?;
                Ok(CbSchema::Const(f))
            }
            "list" => {
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    // the final schema argument starts with one of the
                    // schema heads; look ahead
                    if self.peek() == Some(b'(') {
                        let mark = self.pos;
                        self.pos += 1;
                        self.skip_ws();
                        let inner = self.symbol().unwrap_or_default();
                        let is_schema = matches!(inner.as_str(), "const" | "list" | "family");
                        self.pos = mark;
                        if is_schema {
                            let tail = self.schema()?;
                            self.skip_ws();
                            self.expect(b')')?;
                            if items.is_empty() {
                                return Err(self.err("list needs at least one member"));
                            }
                            return Ok(CbSchema::List(items, Box::new(tail)));
                        }
                    }
                    if self.peek() == Some(b')') {
                        return Err(self.err("list needs a tail schema"));
                    }
                    items.push(self.forest()?);
                }
            }
            "family" => {
                self.skip_ws();
                let (ord, next) =
                    crate::ordinal::parse_prefix(self.src, self.pos).map_err(|e| match e {
                        OrdinalError::Syntax { pos, msg } => CbError::Syntax { pos, msg },
                        other => CbError::Ordinal(other),
                    })?;
                self.pos = next;
                if !ord.is_limit() {
                    return Err(self.err("family bound must be a limit ordinal"));
                }
                self.skip_ws();
                self.expect(b')')?;
                Ok(CbSchema::Family { limit: ord })
            }
            _ => Err(self.err("expected const, list, or family")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn interval_forests() {
        assert_eq!(ord_tree(&o("0")), CbForest(vec![CbTree::Leaf]));
        assert_eq!(ord_tree(&o("2")).0.len(), 3);
        assert_eq!(
            ord_tree(&o("w")).to_string(),
            "(forest (node (const leaf)) leaf)"
        );
        assert_eq!(
            ord_tree(&o("w^2")).to_string(),
            "(forest (node (const (node (const leaf)))) leaf)"
        );
        assert_eq!(
            ord_tree(&o("w^(w)")).to_string(),
            "(forest (node (family w)) leaf)"
        );
        assert_eq!(ord_tree(&o("w*2+1")).0.len(), 4);
    }

    #[test]
    fn closed_ranks() {
        for (a, want) in [
            ("0", "1"),
            ("7", "1"),
            ("w", "2"),
            ("w*5+3", "2"),
            ("w^2", "3"),
            ("w^(w)", "w+1"),
            ("w^(w+1)", "w+2"),
            ("w^(w)*2+w^2+1", "w+1"),
            ("w^(w^2)", "w^2+1"),
        ] {
            assert_eq!(
                cb_rank_closed(&ord_tree(&o(a))).unwrap(),
                o(want),
                "interval [0, {a}]"
            );
        }
    }

    #[test]
    fn surgery_examples() {
        assert_eq!(cb_derivative(&CbTree::Leaf), None);
        assert_eq!(
            forest_derivative(&ord_tree(&o("w"))),
            CbForest(vec![CbTree::Leaf])
        );
        // [0, ω²] loses one layer: the nonzero multiples of ω form a
        // copy of (0, ω]
        assert_eq!(
            forest_derivative(&ord_tree(&o("w^2"))),
            CbForest(vec![pow_tree(&o("1"))])
        );
        // family nodes are order-isomorphic to their own derivative
        let f = pow_tree(&o("w"));
        assert_eq!(cb_derivative(&f), Some(f.clone()));
    }

    #[test]
    fn surgery_matches_division() {
        // the surviving points of d([0, β]) are the nonzero multiples
        // of ω, an order-isomorphic copy of [0, β ÷ ω] missing its
        // bottom point — structurally, ord_tree(β ÷ ω) minus one leaf
        for a in [
            "w",
            "w*3",
            "w*3+5",
            "w^2",
            "w^2+w*2+7",
            "w^3+w^2",
            "w^2*4",
            "w^(w)",
            "w^(w)*2+w^2",
        ] {
            let alpha = o(a);
            let q = alpha.div_omega_pow(&Ordinal::one());
            let mut expected = ord_tree(&q);
            assert_eq!(expected.0.pop(), Some(CbTree::Leaf));
            assert_eq!(
                forest_derivative(&ord_tree(&alpha)),
                expected,
                "interval [0, {a}]"
            );
        }
    }

    #[test]
    fn iteration_counts_match_closed_rank() {
        for a in ["0", "4", "w", "w*2+1", "w^2", "w^2+w", "w^3+w+2"] {
            let alpha = o(a);
            let rank = cb_rank_closed(&ord_tree(&alpha)).unwrap();
            let steps = u64::try_from(&rank.as_nat().unwrap()).unwrap();
            let mut cur = ord_tree(&alpha);
            for k in 0..steps {
                assert!(!cur.is_empty(), "[0, {a}] died early at {k}");
                cur = forest_derivative(&cur);
            }
            assert!(cur.is_empty(), "[0, {a}] survived its closed rank");
        }
    }

    #[test]
    fn bridge_examples() {
        let e = |s: &str| -> SpaceTerm { s.parse().unwrap() };
        assert_eq!(
            w0_bridge(&e("(E 0)")).unwrap().to_string(),
            "(node (const leaf))"
        );
        assert_eq!(w0_bridge(&e("pt")).unwrap(), CbForest(vec![CbTree::Leaf]));
        assert_eq!(w0_bridge(&e("empty")).unwrap(), CbForest(vec![]));
        assert_eq!(
            w0_bridge(&e("(plus (E 0))")).unwrap().to_string(),
            "(forest (node (const leaf)) leaf)"
        );
        let wedge = w0_bridge(&e("(swedge (const (E 0)))")).unwrap();
        assert_eq!(cb_rank_closed(&wedge).unwrap(), o("3"));
        assert!(w0_bridge(&e("(S 1)")).is_err());
    }

    #[test]
    fn text_round_trips() {
        for s in [
            "leaf",
            "(node (const leaf))",
            "(node (family w))",
            "(node (const (forest leaf leaf)))",
            "(node (list leaf (const leaf)))",
            "(node (list (forest leaf leaf) (node (const leaf)) (family w^(w))))",
        ] {
            let t = parse_tree(s).unwrap();
            assert_eq!(t.to_string(), s, "round trip");
            assert_eq!(parse_tree(&t.to_string()).unwrap(), t);
        }
        assert!(parse_tree("(node)").is_err());
        assert!(parse_tree("(node (family 3))").is_err());
        assert!(parse_tree("leaf leaf").is_err());
    }
}
