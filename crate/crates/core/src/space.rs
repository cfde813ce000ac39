//! The term language of spaces.
//!
//! Terms name pointed compacta built from a few atoms (spheres of a
//! fixed dimension, earrings, perfectly wild continua) by a few
//! shrinking constructions: one-point unions over a sequence schema,
//! point-attachments along a dense sequence in a base, realizations of
//! a term as a singular set, plus small modifiers (isolated basepoint,
//! whisker arc). Each constructor fixes its own basepoint, so schemas
//! never carry explicit point data.
//!
//! Sequence schemas describe countably many members finitely: a
//! constant, a finite prefix followed by a tail schema, or an
//! ordinal-indexed family whose `j`-th member is a named generator
//! applied to `succ_seq(limit, j)`. Families accept an optional stage
//! annotation so the engine can print partially pruned families; input
//! terms normally leave it at 0.
//!
//! Concrete syntax is s-expressions: `(attach (E 1) (const (plus (S
//! 1))))`, `(swedge (family w based-witness))`. Ordinals inside terms
//! use the syntax of [`crate::ordinal`].

use crate::ordinal::{self, Ordinal, OrdinalKind};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SpaceTerm {
    Empty,
    Pt,
    /// A contractible continuum (a cube, say); dimension untracked.
    Cell,
    Sphere(u32),
    Earring(u32),
    FreeEarring(u32),
    PerfectlyWild(u32),
    /// Adjoin an isolated basepoint.
    Plus(Box<SpaceTerm>),
    /// Attach an arc at the old basepoint; the free end is the new one.
    Whisker(Box<SpaceTerm>),
    /// Based realization of the argument as a singular set.
    Realize(Box<SpaceTerm>),
    /// Free realization of the argument as a singular set.
    FRealize(Box<SpaceTerm>),
    /// The based/free splitter: realizes the argument so that the based
    /// singular part sees it but the free one sees almost nothing.
    Mixed(Box<SpaceTerm>),
    Disj(Vec<SpaceTerm>),
    /// Shrinking one-point union of the schema's members.
    SWedge(SeqSchema),
    /// Shrinking point-attachment of the members along a dense sequence
    /// of distinct points in the base.
    Attach(Box<SpaceTerm>, SeqSchema),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SeqSchema {
    Const(Box<SpaceTerm>),
    /// A nonempty prefix, then a tail schema.
    List(Vec<SpaceTerm>, Box<SeqSchema>),
    /// Member `j` is `gen` applied to `succ_seq(limit, j)` at the
    /// analysis dimension; `stage` marks how far the engine has pruned
    /// each member (0 in input terms).
    Family {
        limit: Ordinal,
        gen: Generator,
        stage: Ordinal,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    BasedWitness,
    FreeWitness,
    WhiskerWitness,
}

impl Generator {
    pub fn name(self) -> &'static str {
        match self {
            Generator::BasedWitness => "based-witness",
            Generator::FreeWitness => "free-witness",
            Generator::WhiskerWitness => "whisker-witness",
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SpaceError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("mixed analysis dimensions {a} and {b} in one term")]
    DimensionMismatch { a: u32, b: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimBound {
    Exactly(u32),
    AtMost(u32),
    Unknown,
}

/// Topological attributes the rules gate on. Computed, never supplied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Attributes {
    pub compact: bool,
    pub metrizable: bool,
    pub path_connected: bool,
    /// Compact, metrizable, path-connected, locally path-connected.
    pub peano: bool,
    pub dim_bound: DimBound,
}

impl DimBound {
    /// Dimension of a union of closed pieces: the max, coarsened when
    /// only a bound is known on the larger side.
    fn join(self, other: DimBound) -> DimBound {
        use DimBound::*;
        match (self, other) {
            (Unknown, _) | (_, Unknown) => Unknown,
            (Exactly(a), Exactly(b)) => Exactly(a.max(b)),
            (Exactly(a), AtMost(b)) | (AtMost(b), Exactly(a)) => {
                if b <= a {
                    Exactly(a)
                } else {
                    AtMost(b)
                }
            }
            (AtMost(a), AtMost(b)) => AtMost(a.max(b)),
        }
    }
}

impl SpaceTerm {
    pub fn parse(text: &str) -> Result<SpaceTerm, SpaceError> {
        let mut p = TermParser {
            src: text.as_bytes(),
            pos: 0,
        };
        p.skip_ws();
        let term = p.term()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return p.err("trailing input after term");
        }
        term.dim()?; // surface mixed dimensions at parse time
        Ok(term)
    }

    pub fn plus(t: SpaceTerm) -> SpaceTerm {
        SpaceTerm::Plus(Box::new(t))
    }

    pub fn whisker(t: SpaceTerm) -> SpaceTerm {
        SpaceTerm::Whisker(Box::new(t))
    }

    pub fn attach(base: SpaceTerm, schema: SeqSchema) -> SpaceTerm {
        SpaceTerm::Attach(Box::new(base), schema)
    }

    pub fn is_empty_term(&self) -> bool {
        matches!(self, SpaceTerm::Empty)
    }

    /// The single analysis dimension declared by the atoms, if any.
    pub fn dim(&self) -> Result<Option<u32>, SpaceError> {
        fn merge(acc: Option<u32>, d: Option<u32>) -> Result<Option<u32>, SpaceError> {
            match (acc, d) {
                (Some(a), Some(b)) if a != b => Err(SpaceError::DimensionMismatch { a, b }),
                (Some(a), _) => Ok(Some(a)),
                (None, d) => Ok(d),
            }
        }
        fn of_term(t: &SpaceTerm) -> Result<Option<u32>, SpaceError> {
            use SpaceTerm::*;
            match t {
                Empty | Pt | Cell => Ok(None),
                Sphere(n) | Earring(n) | FreeEarring(n) | PerfectlyWild(n) => Ok(Some(*n)),
                Plus(t) | Whisker(t) | Realize(t) | FRealize(t) | Mixed(t) => of_term(t),
                Disj(ms) => ms.iter().try_fold(None, |acc, m| merge(acc, of_term(m)?)),
                SWedge(s) => of_schema(s),
                Attach(b, s) => merge(of_term(b)?, of_schema(s)?),
            }
        }
        fn of_schema(s: &SeqSchema) -> Result<Option<u32>, SpaceError> {
            match s {
                SeqSchema::Const(t) => of_term(t),
                SeqSchema::List(prefix, tail) => {
                    let d = prefix
                        .iter()
                        .try_fold(None, |acc, m| merge(acc, of_term(m)?))?;
                    merge(d, of_schema(tail)?)
                }
                // generators run at the analysis dimension, whatever it is
                SeqSchema::Family { .. } => Ok(None),
            }
        }
        of_term(self)
    }

    /// Normal form: nested disjoint unions flattened, empty summands
    /// dropped, singletons unwrapped, members sorted by rendering,
    /// `Plus(Empty)` collapsed to a point. Idempotent; the engine
    /// compares profile terms for equality only in this form.
    pub fn normalize(&self) -> SpaceTerm {
        use SpaceTerm::*;
        match self {
            Disj(ms) => {
                let mut flat = Vec::new();
                for m in ms {
                    match m.normalize() {
                        Empty => {}
                        Disj(inner) => flat.extend(inner),
                        other => flat.push(other),
                    }
                }
                match flat.len() {
                    0 => Empty,
                    1 => flat.pop().unwrap(),
                    _ => {
                        flat.sort_by_key(|m| m.to_string());
                        Disj(flat)
                    }
                }
            }
            Plus(t) => match t.normalize() {
                Empty => Pt,
                t => Plus(Box::new(t)),
            },
            Whisker(t) => Whisker(Box::new(t.normalize())),
            Realize(t) => Realize(Box::new(t.normalize())),
            FRealize(t) => FRealize(Box::new(t.normalize())),
            Mixed(t) => Mixed(Box::new(t.normalize())),
            SWedge(s) => SWedge(s.normalize()),
            Attach(b, s) => Attach(Box::new(b.normalize()), s.normalize()),
            atom => atom.clone(),
        }
    }

    /// Attributes at analysis dimension `n` (families generate their
    /// members at `n`, so it cannot be read off the syntax alone).
    /// Computed on the normal form, so normalization never changes them.
    pub fn attributes(&self, n: u32) -> Attributes {
        self.normalize().attributes_raw(n)
    }

    fn attributes_raw(&self, n: u32) -> Attributes {
        use DimBound::*;
        use SpaceTerm::*;
        let all = |compact, path_connected, peano, dim_bound| Attributes {
            compact,
            metrizable: true,
            path_connected,
            peano,
            dim_bound,
        };
        match self {
            Empty => all(true, false, false, Unknown),
            Pt => all(true, true, true, Exactly(0)),
            Cell => all(true, true, true, Unknown),
            Sphere(d) | Earring(d) => all(true, *d >= 1, *d >= 1, Exactly(*d)),
            // the extra basepoint lies in its own path component
            FreeEarring(d) => all(true, false, false, Exactly(*d)),
            PerfectlyWild(d) => all(true, *d >= 1, *d >= 1, Exactly(*d)),
            Plus(t) => {
                let a = t.attributes_raw(n);
                all(a.compact, false, false, a.dim_bound)
            }
            Whisker(t) => {
                let a = t.attributes_raw(n);
                all(
                    a.compact,
                    a.path_connected,
                    a.peano,
                    a.dim_bound.join(Exactly(1)),
                )
            }
            Realize(_) => all(true, true, true, Unknown),
            // compact metrizable, but not locally path-connected
            FRealize(_) | Mixed(_) => all(true, false, false, Unknown),
            Disj(ms) => {
                let parts: Vec<_> = ms.iter().map(|m| m.attributes_raw(n)).collect();
                let nonempty = ms.iter().filter(|m| !m.is_empty_term()).count();
                all(
                    parts.iter().all(|a| a.compact),
                    nonempty <= 1 && parts.iter().all(|a| a.path_connected),
                    nonempty <= 1 && parts.iter().all(|a| a.peano),
                    parts.iter().fold(Exactly(0), |d, a| d.join(a.dim_bound)),
                )
            }
            SWedge(s) => {
                let m = s.member_attributes(n);
                all(m.compact, m.path_connected, m.peano, m.dim_bound)
            }
            Attach(b, s) => {
                let base = b.attributes_raw(n);
                let m = s.member_attributes(n);
                all(
                    base.compact && m.compact,
                    base.path_connected && m.path_connected,
                    base.peano && m.peano,
                    base.dim_bound.join(m.dim_bound),
                )
            }
        }
    }
}

impl SeqSchema {
    pub fn constant(t: SpaceTerm) -> SeqSchema {
        SeqSchema::Const(Box::new(t))
    }

    pub fn family(limit: Ordinal, gen: Generator) -> SeqSchema {
        SeqSchema::Family {
            limit,
            gen,
            stage: Ordinal::zero(),
        }
    }

    pub fn normalize(&self) -> SeqSchema {
        match self {
            SeqSchema::Const(t) => SeqSchema::Const(Box::new(t.normalize())),
            SeqSchema::List(prefix, tail) => SeqSchema::List(
                prefix.iter().map(SpaceTerm::normalize).collect(),
                Box::new(tail.normalize()),
            ),
            f @ SeqSchema::Family { .. } => f.clone(),
        }
    }

    /// Joint attributes of all members.
    fn member_attributes(&self, n: u32) -> Attributes {
        match self {
            SeqSchema::Const(t) => t.attributes_raw(n),
            SeqSchema::List(prefix, tail) => {
                let t = tail.member_attributes(n);
                prefix
                    .iter()
                    .map(|m| m.attributes_raw(n))
                    .fold(t, |a, b| Attributes {
                        compact: a.compact && b.compact,
                        metrizable: true,
                        path_connected: a.path_connected && b.path_connected,
                        peano: a.peano && b.peano,
                        dim_bound: a.dim_bound.join(b.dim_bound),
                    })
            }
            SeqSchema::Family { gen, stage, .. } => {
                if !stage.is_zero() {
                    // partially pruned members need not be closed
                    return Attributes {
                        compact: false,
                        metrizable: true,
                        path_connected: false,
                        peano: false,
                        dim_bound: DimBound::Unknown,
                    };
                }
                // generator outputs: based/whisker witnesses are Peano
                // continua, free witnesses carry an isolated basepoint
                let peano = !matches!(gen, Generator::FreeWitness) && n >= 1;
                Attributes {
                    compact: true,
                    metrizable: true,
                    path_connected: peano,
                    peano,
                    dim_bound: DimBound::Exactly(n),
                }
            }
        }
    }
}

impl fmt::Display for SpaceTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SpaceTerm::*;
        match self {
            Empty => write!(f, "empty"),
            Pt => write!(f, "pt"),
            Cell => write!(f, "cell"),
            Sphere(n) => write!(f, "(S {n})"),
            Earring(n) => write!(f, "(E {n})"),
            FreeEarring(n) => write!(f, "(FE {n})"),
            PerfectlyWild(n) => write!(f, "(PW {n})"),
            Plus(t) => write!(f, "(plus {t})"),
            Whisker(t) => write!(f, "(whisker {t})"),
            Realize(t) => write!(f, "(realize {t})"),
            FRealize(t) => write!(f, "(frealize {t})"),
            Mixed(t) => write!(f, "(mixed {t})"),
            Disj(ms) => {
                write!(f, "(disj")?;
                for m in ms {
                    write!(f, " {m}")?;
                }
                write!(f, ")")
            }
            SWedge(s) => write!(f, "(swedge {s})"),
            Attach(b, s) => write!(f, "(attach {b} {s})"),
        }
    }
}

impl fmt::Display for SeqSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeqSchema::Const(t) => write!(f, "(const {t})"),
            SeqSchema::List(prefix, tail) => {
                write!(f, "(list")?;
                for m in prefix {
                    write!(f, " {m}")?;
                }
                write!(f, " {tail})")
            }
            SeqSchema::Family { limit, gen, stage } => {
                if stage.is_zero() {
                    write!(f, "(family {limit} {})", gen.name())
                } else {
                    write!(f, "(family {limit} {} {stage})", gen.name())
                }
            }
        }
    }
}

impl FromStr for SpaceTerm {
    type Err = SpaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SpaceTerm::parse(s)
    }
}

struct TermParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> TermParser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T, SpaceError> {
        Err(SpaceError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        })
    }

    fn skip_ws(&mut self) {
        while matches!(self.src.get(self.pos), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, b: u8) -> Result<(), SpaceError> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("expected '{}'", b as char))
        }
    }

    /// A bare word: letters, digits, and hyphens.
    fn symbol(&mut self) -> Result<&'a str, SpaceError> {
        let start = self.pos;
        while matches!(
            self.peek(),
            Some(b'a'..=b'z' | b'A'..=b'Z' | b'0'..=b'9' | b'-')
        ) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a symbol");
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn nat_u32(&mut self) -> Result<u32, SpaceError> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a dimension");
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .or_else(|_| self.err("dimension out of range"))
    }

    fn ordinal(&mut self) -> Result<Ordinal, SpaceError> {
        match ordinal::parse_prefix(self.src, self.pos) {
            Ok((ord, end)) => {
                self.pos = end;
                Ok(ord)
            }
            Err(crate::ordinal::OrdinalError::Syntax { pos, msg }) => {
                Err(SpaceError::Syntax { pos, msg })
            }
            Err(e) => Err(SpaceError::Syntax {
                pos: self.pos,
                msg: e.to_string(),
            }),
        }
    }

    fn term(&mut self) -> Result<SpaceTerm, SpaceError> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() != Some(b'(') {
            return match self.symbol()? {
                "empty" => Ok(SpaceTerm::Empty),
                "pt" => Ok(SpaceTerm::Pt),
                "cell" => Ok(SpaceTerm::Cell),
                other => Err(SpaceError::Syntax {
                    pos: start,
                    msg: format!("unknown atom '{other}'"),
                }),
            };
        }
        self.pos += 1;
        self.skip_ws();
        let head_pos = self.pos;
        let head = self.symbol()?.to_string();
        let term = match head.as_str() {
            "S" | "E" | "FE" | "PW" => {
                self.skip_ws();
                let n = self.nat_u32()?;
                match head.as_str() {
                    "S" => SpaceTerm::Sphere(n),
                    "E" => SpaceTerm::Earring(n),
                    "FE" => SpaceTerm::FreeEarring(n),
                    _ => SpaceTerm::PerfectlyWild(n),
                }
            }
            "plus" => SpaceTerm::Plus(Box::new(self.term()?)),
            "whisker" => SpaceTerm::Whisker(Box::new(self.term()?)),
            "realize" | "frealize" | "mixed" => {
                let arg_pos = {
                    self.skip_ws();
                    self.pos
                };
                let arg = self.term()?;
                if arg.normalize().is_empty_term() {
                    return Err(SpaceError::Syntax {
                        pos: arg_pos,
                        msg: "cannot realize the empty space".to_string(),
                    });
                }
                let arg = Box::new(arg);
                match head.as_str() {
                    "realize" => SpaceTerm::Realize(arg),
                    "frealize" => SpaceTerm::FRealize(arg),
                    _ => SpaceTerm::Mixed(arg),
                }
            }
            "disj" => {
                let mut members = vec![self.term()?];
                loop {
                    self.skip_ws();
                    if self.peek() == Some(b')') {
                        break;
                    }
                    members.push(self.term()?);
                }
                SpaceTerm::Disj(members)
            }
            "swedge" => SpaceTerm::SWedge(self.schema()?),
            "attach" => {
                let base_pos = {
                    self.skip_ws();
                    self.pos
                };
                let base = self.term()?;
                if base.normalize().is_empty_term() {
                    return Err(SpaceError::Syntax {
                        pos: base_pos,
                        msg: "attachment base is empty".to_string(),
                    });
                }
                SpaceTerm::Attach(Box::new(base), self.schema()?)
            }
            other => {
                return Err(SpaceError::Syntax {
                    pos: head_pos,
                    msg: format!("unknown constructor '{other}'"),
                })
            }
        };
        self.skip_ws();
        self.expect(b')')?;
        Ok(term)
    }

    fn member(&mut self) -> Result<SpaceTerm, SpaceError> {
        self.skip_ws();
        let pos = self.pos;
        let t = self.term()?;
        if t.normalize().is_empty_term() {
            return Err(SpaceError::Syntax {
                pos,
                msg: "sequence member has no basepoint".to_string(),
            });
        }
        Ok(t)
    }

    fn schema(&mut self) -> Result<SeqSchema, SpaceError> {
        self.skip_ws();
        self.expect(b'(')?;
        self.skip_ws();
        let head_pos = self.pos;
        let schema = match self.symbol()? {
            "const" => SeqSchema::Const(Box::new(self.member()?)),
            "list" => {
                let mut prefix = vec![self.member()?];
                loop {
                    self.skip_ws();
                    if self.peek() == Some(b')') {
                        return self.err("list needs a tail schema");
                    }
                    if self.peek() == Some(b'(') {
                        // a term or the tail schema — decide by head
                        let save = self.pos;
                        self.pos += 1;
                        self.skip_ws();
                        let head = self.symbol().unwrap_or("");
                        let is_tail = matches!(head, "const" | "list" | "family");
                        self.pos = save;
                        if is_tail {
                            break;
                        }
                        prefix.push(self.member()?);
                    } else {
                        prefix.push(self.member()?);
                    }
                }
                SeqSchema::List(prefix, Box::new(self.schema()?))
            }
            "family" => {
                self.skip_ws();
                let ord_pos = self.pos;
                let limit = self.ordinal()?;
                if !matches!(limit.kind(), OrdinalKind::Limit) {
                    return Err(SpaceError::Syntax {
                        pos: ord_pos,
                        msg: format!("family index {limit} is not a limit ordinal"),
                    });
                }
                self.skip_ws();
                let gen_pos = self.pos;
                let gen = match self.symbol()? {
                    "based-witness" => Generator::BasedWitness,
                    "free-witness" => Generator::FreeWitness,
                    "whisker-witness" => Generator::WhiskerWitness,
                    other => {
                        return Err(SpaceError::Syntax {
                            pos: gen_pos,
                            msg: format!("unknown generator '{other}'"),
                        })
                    }
                };
                self.skip_ws();
                let stage = if self.peek() == Some(b')') {
                    Ordinal::zero()
                } else {
                    self.ordinal()?
                };
                SeqSchema::Family { limit, gen, stage }
            }
            other => {
                return Err(SpaceError::Syntax {
                    pos: head_pos,
                    msg: format!("unknown schema '{other}'"),
                })
            }
        };
        self.skip_ws();
        self.expect(b')')?;
        Ok(schema)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use SpaceTerm::*;

    fn t(s: &str) -> SpaceTerm {
        SpaceTerm::parse(s).unwrap()
    }

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn parse_atoms_and_constructors() {
        assert_eq!(t("(E 2)"), Earring(2));
        assert_eq!(
            t("(swedge (const (realize (S 1))))"),
            SWedge(SeqSchema::constant(Realize(Box::new(Sphere(1)))))
        );
        assert_eq!(
            t("(attach (E 1) (const (plus (S 1))))"),
            SpaceTerm::attach(Earring(1), SeqSchema::constant(SpaceTerm::plus(Sphere(1))))
        );
        assert_eq!(t("pt"), Pt);
        assert_eq!(t("  ( disj pt ( S 1 ) )  "), Disj(vec![Pt, Sphere(1)]));
    }

    #[test]
    fn parse_schemas() {
        assert_eq!(
            t("(swedge (family w based-witness))"),
            SWedge(SeqSchema::family(o("w"), Generator::BasedWitness))
        );
        assert_eq!(
            t("(swedge (family w^(w)*2 whisker-witness))"),
            SWedge(SeqSchema::family(o("w^(w)*2"), Generator::WhiskerWitness))
        );
        assert_eq!(
            t("(swedge (family w free-witness w+1))"),
            SWedge(SeqSchema::Family {
                limit: o("w"),
                gen: Generator::FreeWitness,
                stage: o("w+1"),
            })
        );
        assert_eq!(
            t("(swedge (list (S 2) (E 2) (const (S 2))))"),
            SWedge(SeqSchema::List(
                vec![Sphere(2), Earring(2)],
                Box::new(SeqSchema::constant(Sphere(2)))
            ))
        );
    }

    #[test]
    fn parse_errors() {
        for bad in [
            "",
            "(S)",
            "(S 1",
            "(q 1)",
            "(swedge (const empty))",
            "(attach empty (const pt))",
            "(realize empty)",
            "(swedge (family 3 based-witness))",
            "(swedge (family w nonsense))",
            "(disj)",
            "pt pt",
        ] {
            assert!(
                matches!(SpaceTerm::parse(bad), Err(SpaceError::Syntax { .. })),
                "expected syntax error for {bad:?}"
            );
        }
        assert_eq!(
            SpaceTerm::parse("(disj (S 1) (S 2))"),
            Err(SpaceError::DimensionMismatch { a: 1, b: 2 })
        );
        assert_eq!(
            SpaceTerm::parse("(attach (E 1) (const (PW 3)))"),
            Err(SpaceError::DimensionMismatch { a: 1, b: 3 })
        );
    }

    #[test]
    fn print_forms() {
        assert_eq!(Earring(2).to_string(), "(E 2)");
        assert_eq!(Disj(vec![Pt, Sphere(1)]).to_string(), "(disj pt (S 1))");
        assert_eq!(
            SWedge(SeqSchema::family(o("w"), Generator::BasedWitness)).to_string(),
            "(swedge (family w based-witness))"
        );
        assert_eq!(
            SWedge(SeqSchema::Family {
                limit: o("w*2"),
                gen: Generator::FreeWitness,
                stage: o("5"),
            })
            .to_string(),
            "(swedge (family w*2 free-witness 5))"
        );
    }

    #[test]
    fn round_trips() {
        let corpus = [
            "empty",
            "pt",
            "cell",
            "(S 0)",
            "(PW 2)",
            "(plus (FE 1))",
            "(whisker (E 2))",
            "(mixed (disj cell (S 1)))",
            "(frealize (E 1))",
            "(swedge (list (S 1) (family w whisker-witness)))",
            "(attach (PW 1) (family w*2 free-witness))",
            "(attach (E 1) (list (S 1) (S 1) (const (E 1))))",
            "(swedge (family w^(w+1) based-witness w^2*3))",
        ];
        for s in corpus {
            let parsed = t(s);
            assert_eq!(parsed.to_string(), s, "canonical print of {s}");
            assert_eq!(t(&parsed.to_string()), parsed);
        }
    }

    #[test]
    fn normalization() {
        assert_eq!(t("(disj empty (S 2))").normalize(), Sphere(2));
        assert_eq!(
            t("(disj (disj pt pt) empty)").normalize(),
            Disj(vec![Pt, Pt])
        );
        assert_eq!(SpaceTerm::plus(Empty).normalize(), Pt);
        // flatten + sort by print order
        let messy = Disj(vec![Sphere(1), Disj(vec![Pt, Earring(1)]), Empty]);
        assert_eq!(messy.normalize(), Disj(vec![Earring(1), Sphere(1), Pt]));
        let n = messy.normalize();
        assert_eq!(n.normalize(), n, "idempotent");
        assert_eq!(Disj(vec![Empty, Empty]).normalize(), Empty);
    }

    #[test]
    fn attribute_table() {
        assert!(
            t("(attach (E 2) (const (E 2)))").attributes(2).peano,
            "attaching earrings to an earring stays Peano"
        );
        assert!(!t("(FE 1)").attributes(1).path_connected);
        assert!(!t("(disj (S 1) (S 1))").attributes(1).path_connected);
        assert!(t("(disj (S 1) (S 1))").attributes(1).compact);
        assert!(t("(realize (E 1))").attributes(1).peano);
        assert!(!t("(mixed (E 1))").attributes(1).peano);
        assert!(t("(mixed (E 1))").attributes(1).compact);
        assert!(!t("(plus (S 1))").attributes(1).path_connected);
        assert!(t("(whisker (E 1))").attributes(1).peano);
        assert!(!t("(S 0)").attributes(0).path_connected);
        assert!(!t("(E 0)").attributes(0).peano);
        // a free-witness family floats isolated copies near the base
        let tower = t("(attach (S 1) (family w free-witness))");
        let a = tower.attributes(1);
        assert!(a.compact && a.metrizable && !a.path_connected && !a.peano);
        assert_eq!(a.dim_bound, DimBound::Exactly(1));
        // based-witness families wedge to a Peano continuum
        let wedge = t("(swedge (family w whisker-witness))");
        let a = wedge.attributes(1);
        assert!(a.peano);
        assert_eq!(a.dim_bound, DimBound::Exactly(1));
    }

    #[test]
    fn attributes_survive_normalize() {
        for s in [
            "(disj empty (S 2))",
            "(plus empty)",
            "(disj (disj (E 1) pt) (S 1))",
        ] {
            let term = t(s);
            assert_eq!(term.attributes(2), term.normalize().attributes(2), "{s}");
        }
    }

    #[test]
    fn dims() {
        assert_eq!(t("(E 2)").dim().unwrap(), Some(2));
        assert_eq!(t("pt").dim().unwrap(), None);
        assert_eq!(t("(swedge (family w based-witness))").dim().unwrap(), None);
        assert_eq!(
            t("(attach (S 1) (family w free-witness))").dim().unwrap(),
            Some(1)
        );
    }
}
