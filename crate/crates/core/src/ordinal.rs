//! Ordinals below epsilon_0 in Cantor normal form.
//!
//! An ordinal is a finite sum `w^a1*c1 + ... + w^ak*ck` with strictly
//! decreasing exponents (themselves ordinals) and positive integer
//! coefficients. Arithmetic is the usual non-commutative ordinal
//! arithmetic; limits come with canonical (Wainer-style) fundamental
//! sequences so that suprema of the sequence schemas used by the engine
//! have exact closed forms.
//!
//! Text syntax: `0`, a natural number, or `+`-separated monomials
//! `w^<exp>*<coeff>` with the sugar `w` for `w^1*1`, `w^k` for `w^k*1`,
//! and a trailing natural for `w^0*n`. Exponents that are not naturals
//! are parenthesized: `w^(w)*2+1`. Parsing folds non-canonical sums
//! through ordinal addition, so printing is always canonical.

use num_bigint::BigUint;
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    /// CNF terms `(exponent, coefficient)`, exponents strictly decreasing.
    terms: Vec<(Ordinal, BigUint)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrdinalKind {
    Zero,
    /// Carries the predecessor.
    Successor(Ordinal),
    Limit,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum OrdinalError {
    #[error("expected a limit ordinal, got {0}")]
    NotLimit(Ordinal),
    #[error("sequence schema is not one of the supported forms: {0}")]
    UnsupportedSequence(String),
    #[error("ordinal syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Ordinal::nat(1)
    }

    pub fn nat(n: u64) -> Self {
        if n == 0 {
            return Ordinal::zero();
        }
        Ordinal {
            terms: vec![(Ordinal::zero(), BigUint::from(n))],
        }
    }

    pub fn omega() -> Self {
        Ordinal::omega_pow(Ordinal::one())
    }

    /// `w^exp`.
    pub fn omega_pow(exp: Ordinal) -> Self {
        Ordinal {
            terms: vec![(exp, BigUint::from(1u8))],
        }
    }

    /// `w^exp * coeff`; zero coefficient yields zero.
    pub fn monomial(exp: Ordinal, coeff: BigUint) -> Self {
        if coeff == BigUint::default() {
            return Ordinal::zero();
        }
        Ordinal {
            terms: vec![(exp, coeff)],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_limit(&self) -> bool {
        matches!(self.kind(), OrdinalKind::Limit)
    }

    pub fn is_successor(&self) -> bool {
        matches!(self.kind(), OrdinalKind::Successor(_))
    }

    /// The value as a natural number, when below omega.
    pub fn as_nat(&self) -> Option<BigUint> {
        match self.terms.as_slice() {
            [] => Some(BigUint::default()),
            [(e, c)] if e.is_zero() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_nat().is_some()
    }

    /// Leading CNF exponent; `None` for zero.
    pub fn leading_exp(&self) -> Option<&Ordinal> {
        self.terms.first().map(|(e, _)| e)
    }

    /// True iff the CNF is a single `w^a` with coefficient 1.
    pub fn is_power_of_omega(&self) -> bool {
        match self.terms.as_slice() {
            [(e, c)] => !e.is_zero() && *c == BigUint::from(1u8),
            _ => false,
        }
    }

    /// Splits off the leading normal-form monomial: its exponent and
    /// coefficient, plus the remaining ordinal. `None` for zero.
    pub fn split_leading(&self) -> Option<(Ordinal, BigUint, Ordinal)> {
        let ((e, c), rest) = self.terms.split_first()?;
        Some((
            e.clone(),
            c.clone(),
            Ordinal {
                terms: rest.to_vec(),
            },
        ))
    }

    pub fn kind(&self) -> OrdinalKind {
        match self.terms.last() {
            None => OrdinalKind::Zero,
            Some((e, c)) if e.is_zero() => {
                let mut pred = self.clone();
                let last = pred.terms.last_mut().unwrap();
                if *c == BigUint::from(1u8) {
                    pred.terms.pop();
                } else {
                    last.1 = c - 1u8;
                }
                OrdinalKind::Successor(pred)
            }
            Some(_) => OrdinalKind::Limit,
        }
    }

    /// Ordinal addition (left-absorbing, non-commutative).
    pub fn add(&self, rhs: &Ordinal) -> Ordinal {
        let Some(lead) = rhs.leading_exp() else {
            return self.clone();
        };
        let mut terms: Vec<(Ordinal, BigUint)> = self
            .terms
            .iter()
            .filter(|(e, _)| e > lead)
            .cloned()
            .collect();
        let mut rest = rhs.terms.iter();
        let (first_e, first_c) = rest.next().unwrap();
        match self.terms.iter().find(|(e, _)| e == lead) {
            Some((_, c)) => terms.push((first_e.clone(), c + first_c)),
            None => terms.push((first_e.clone(), first_c.clone())),
        }
        terms.extend(rest.cloned());
        Ordinal { terms }
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::one())
    }

    /// Left subtraction: the unique `m` with `self + m = larger`, when
    /// `self <= larger`.
    pub fn left_sub(&self, larger: &Ordinal) -> Option<Ordinal> {
        let mut i = 0;
        loop {
            match (self.terms.get(i), larger.terms.get(i)) {
                (None, _) => {
                    return Some(Ordinal {
                        terms: larger.terms[i..].to_vec(),
                    })
                }
                (Some(_), None) => return None,
                (Some((e, c)), Some((e2, c2))) => match e.cmp(e2) {
                    Ordering::Less => {
                        // remaining terms of self are absorbed
                        return Some(Ordinal {
                            terms: larger.terms[i..].to_vec(),
                        });
                    }
                    Ordering::Greater => return None,
                    Ordering::Equal => match c.cmp(c2) {
                        Ordering::Less => {
                            let mut terms = vec![(e2.clone(), c2 - c)];
                            terms.extend_from_slice(&larger.terms[i + 1..]);
                            return Some(Ordinal { terms });
                        }
                        Ordering::Greater => {
                            // self's tail below this may still be absorbed
                            // only if nothing of self remains; coefficient
                            // excess cannot be recovered.
                            return None;
                        }
                        Ordering::Equal => i += 1,
                    },
                },
            }
        }
    }

    /// Canonical fundamental sequence entry `self[i]` (1-based, strictly
    /// increasing in `i`, supremum `self`). Only limits have one.
    pub fn fund_seq(&self, i: u64) -> Result<Ordinal, OrdinalError> {
        if !self.is_limit() {
            return Err(OrdinalError::NotLimit(self.clone()));
        }
        let i = i.max(1);
        let (last_e, last_c) = self.terms.last().unwrap().clone();
        // prefix = self with one copy of w^last_e removed from the tail
        let mut prefix = self.clone();
        if last_c == BigUint::from(1u8) {
            prefix.terms.pop();
        } else {
            prefix.terms.last_mut().unwrap().1 = &last_c - 1u8;
        }
        let step = match last_e.kind() {
            OrdinalKind::Zero => unreachable!("limit ordinal with exponent 0 tail"),
            OrdinalKind::Successor(b) => Ordinal::monomial(b, BigUint::from(i)),
            OrdinalKind::Limit => Ordinal::omega_pow(last_e.fund_seq(i)?),
        };
        Ok(prefix.add(&step))
    }

    /// `fund_seq(self, i) + 1`: strictly increasing successor ordinals with
    /// supremum `self`. (Below a limit, the successor of any entry stays
    /// below the limit, so no index adjustment is ever needed.)
    pub fn succ_seq(&self, i: u64) -> Result<Ordinal, OrdinalError> {
        let f = self.fund_seq(i)?.succ();
        debug_assert!(f < *self);
        Ok(f)
    }

    /// Quotient of left division by `w^p`: drops terms with exponent
    /// below `p` and left-subtracts `p` from the surviving exponents.
    pub fn div_omega_pow(&self, p: &Ordinal) -> Ordinal {
        let terms = self
            .terms
            .iter()
            .filter_map(|(e, c)| p.left_sub(e).map(|e2| (e2, c.clone())))
            .collect();
        Ordinal { terms }
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(other.terms.iter()) {
            match a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

/// Sequence schemas whose exact suprema the engine needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrdinalSeq {
    /// A finite list; supremum is the maximum (0 when empty).
    Finite(Vec<Ordinal>),
    /// `i -> fund_seq(limit, i) + offset` for a fixed natural offset.
    Fund { limit: Ordinal, offset: u64 },
    /// `i -> succ_seq(limit, i) + offset` for a fixed natural offset.
    Succ { limit: Ordinal, offset: u64 },
}

/// Exact supremum of a supported sequence schema. Entries of the
/// schematic families are cofinal in `limit` and stay below it (the
/// offset is finite and limits are closed under adding naturals), so the
/// supremum is `limit` itself.
pub fn sup_of(seq: &OrdinalSeq) -> Result<Ordinal, OrdinalError> {
    match seq {
        OrdinalSeq::Finite(entries) => {
            Ok(entries.iter().fold(
                Ordinal::zero(),
                |acc, x| if *x > acc { x.clone() } else { acc },
            ))
        }
        OrdinalSeq::Fund { limit, .. } | OrdinalSeq::Succ { limit, .. } => {
            if !limit.is_limit() {
                return Err(OrdinalError::UnsupportedSequence(format!(
                    "family over non-limit ordinal {limit}"
                )));
            }
            Ok(limit.clone())
        }
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, "+")?;
            }
            first = false;
            if e.is_zero() {
                write!(f, "{c}")?;
                continue;
            }
            if e == &Ordinal::one() {
                write!(f, "w")?;
            } else if e.as_nat().is_some() {
                write!(f, "w^{e}")?;
            } else {
                write!(f, "w^({e})")?;
            }
            if *c != BigUint::from(1u8) {
                write!(f, "*{c}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

struct OrdParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> OrdParser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T, OrdinalError> {
        Err(OrdinalError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        })
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn nat(&mut self) -> Result<BigUint, OrdinalError> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a natural number");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(BigUint::from_str(text).unwrap())
    }

    fn sum(&mut self) -> Result<Ordinal, OrdinalError> {
        let mut acc = self.monomial()?;
        while self.eat(b'+') {
            let next = self.monomial()?;
            acc = acc.add(&next);
        }
        Ok(acc)
    }

    fn monomial(&mut self) -> Result<Ordinal, OrdinalError> {
        match self.peek() {
            Some(b'0'..=b'9') => Ok(Ordinal {
                terms: Ordinal::monomial(Ordinal::zero(), self.nat()?).terms,
            }),
            Some(b'w') => {
                self.pos += 1;
                let exp = if self.eat(b'^') {
                    match self.peek() {
                        Some(b'(') => {
                            self.pos += 1;
                            let e = self.sum()?;
                            if !self.eat(b')') {
                                return self.err("expected ')' closing exponent");
                            }
                            e
                        }
                        Some(b'0'..=b'9') => Ordinal::monomial(Ordinal::zero(), self.nat()?),
                        Some(b'w') => return self.err("nested exponents must be parenthesized"),
                        _ => return self.err("expected exponent after '^'"),
                    }
                } else {
                    Ordinal::one()
                };
                let coeff = if self.eat(b'*') {
                    let c = self.nat()?;
                    if c == BigUint::default() {
                        return self.err("coefficient must be positive");
                    }
                    c
                } else {
                    BigUint::from(1u8)
                };
                Ok(Ordinal::monomial(exp, coeff))
            }
            _ => self.err("expected 'w' or a natural number"),
        }
    }
}

/// Parses an ordinal starting at `pos`, returning it with the byte
/// position just past it. Lets the term parser embed ordinals whose
/// own parentheses would otherwise fight the s-expression lexer.
pub(crate) fn parse_prefix(src: &[u8], pos: usize) -> Result<(Ordinal, usize), OrdinalError> {
    let mut p = OrdParser { src, pos };
    let ord = p.sum()?;
    Ok((ord, p.pos))
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (ord, end) = parse_prefix(s.as_bytes(), 0)?;
        if end != s.len() {
            return Err(OrdinalError::Syntax {
                pos: end,
                msg: "trailing input after ordinal".to_string(),
            });
        }
        Ok(ord)
    }
}
