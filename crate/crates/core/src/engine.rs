//! The certified rule engine: stage profiles, death ordinals and ranks.
//!
//! For a term `t`, dimension `n` and mode (based or free), the engine
//! answers two questions symbolically:
//!
//! * `profile(t, n, mode, κ)` — a term denoting the κ-th iterated wild
//!   set of the space `t` denotes;
//! * `rank(t, n, mode)` — the least stage from which the profiles stop
//!   changing, together with the death ordinal (first empty stage, if
//!   any), the death of the basepoint, and the stabilizer.
//!
//! Every answer is produced by a closed-form rule whose side conditions
//! (the certificates) are themselves computed, never assumed. When no
//! rule applies the engine refuses with [`EngineError::RuleGap`] naming
//! the offending sub-term and the missing certificate; it never guesses.
//!
//! Dimension 0 is special: based and free analyses agree there, and the
//! wedge rule runs certificate-free so that its stages match the
//! Cantor–Bendixson derivative of the associated tree (see `cb`).

use crate::ordinal::{sup_of, Ordinal, OrdinalError, OrdinalKind, OrdinalSeq};
use crate::space::{Generator, SeqSchema, SpaceError, SpaceTerm};
use crate::witness;
use dashmap::DashMap;
use std::fmt;
use thiserror::Error;

/// Which notion of wildness is iterated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Maps are anchored at a basepoint of the ambient space.
    Based,
    /// Maps are free; wildness can be carried by far-away spheres.
    Free,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Based => "based",
            Mode::Free => "free",
        })
    }
}

/// The first stage at which a point set (the whole profile, or a single
/// marked point) has disappeared. `Never` means it survives every stage.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Death {
    At(Ordinal),
    Never,
}

impl Death {
    pub fn at(o: Ordinal) -> Self {
        Death::At(o)
    }

    pub fn as_ordinal(&self) -> Option<&Ordinal> {
        match self {
            Death::At(o) => Some(o),
            Death::Never => None,
        }
    }

    /// Death after prepending `prefix` stages in front of the life of
    /// the measured set.
    fn shifted(&self, prefix: &Ordinal) -> Death {
        match self {
            Death::At(o) => Death::At(prefix.add(o)),
            Death::Never => Death::Never,
        }
    }
}

impl PartialOrd for Death {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Death {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match (self, other) {
            (Death::At(a), Death::At(b)) => a.cmp(b),
            (Death::At(_), Death::Never) => Ordering::Less,
            (Death::Never, Death::At(_)) => Ordering::Greater,
            (Death::Never, Death::Never) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Death {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Death::At(o) => write!(f, "{o}"),
            Death::Never => f.write_str("never"),
        }
    }
}

/// What the profiles converge to: nothing, or a fixed nonempty term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stabilizer {
    Empty,
    Fixed(SpaceTerm),
}

impl fmt::Display for Stabilizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stabilizer::Empty => f.write_str("empty"),
            Stabilizer::Fixed(t) => write!(f, "{t}"),
        }
    }
}

/// The full answer for one (term, dimension, mode) query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankReport {
    pub mode: Mode,
    pub dim: u32,
    /// Least stage from which profiles stop changing.
    pub rank: Ordinal,
    pub stabilizer: Stabilizer,
    /// First stage whose profile is empty.
    pub death: Death,
    /// First stage no longer containing the designated basepoint.
    pub bp_death: Death,
}

/// The certificate (or structural side condition) whose absence made
/// the engine refuse.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Missing {
    /// Wedge member whose basepoint dies before the member itself.
    C1BpDominant,
    /// Attach member that does not shrink to exactly the basepoint at a
    /// successor death, or a non-constant schema where one is needed.
    C3ExactTail,
    /// Free-mode member with a live stage carrying no sphere material.
    C4SphereLaden,
    /// Free analysis that cannot be reduced to the based one because
    /// some based stage is not a Peano continuum (or is only known
    /// through a wedge-shaped bookkeeping term).
    PeanoEq,
    /// Attachment base without the Peano attribute.
    PeanoBase,
    /// Sequence of members whose deaths are not non-decreasing.
    DeathMonotone,
    /// Family whose sampled member deaths follow no recognized pattern.
    GeneratorDeath,
    /// Constructor that has no meaning for 0-dimensional analysis.
    ZeroDimensional,
    /// A stage supremum the engine cannot name (mid-iteration family in
    /// the input, or an unbounded mix of immortal members).
    StageSup,
}

impl fmt::Display for Missing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Missing::C1BpDominant => "C1-bp-dominant",
            Missing::C3ExactTail => "C3-exact-tail",
            Missing::C4SphereLaden => "C4-sphere-laden",
            Missing::PeanoEq => "peano-eq",
            Missing::PeanoBase => "peano-base",
            Missing::DeathMonotone => "death-monotone",
            Missing::GeneratorDeath => "generator-death",
            Missing::ZeroDimensional => "zero-dimensional",
            Missing::StageSup => "stage-supremum",
        })
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("no rule covers {term} at stage {stage}: missing certificate {missing}")]
    RuleGap {
        term: SpaceTerm,
        stage: Ordinal,
        missing: Missing,
    },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
}

fn gap(term: &SpaceTerm, missing: Missing) -> EngineError {
    EngineError::RuleGap {
        term: term.clone(),
        stage: Ordinal::one(),
        missing,
    }
}

type Result<T> = std::result::Result<T, EngineError>;

/// Which rule produced the data; carries the ordinals the stage
/// constructor needs, so profiles and ranks can never disagree about
/// the dispatch.
#[derive(Clone, Debug)]
enum Applied {
    /// Closed stage table (atoms).
    Atom,
    /// Stage κ ≥ 1 is the inner term's stage κ (plus, whisker).
    Inner,
    /// Disjoint union, componentwise.
    Componentwise,
    /// Stage 1+μ is the inner term's stage μ in `inner_mode`.
    Shift { inner_mode: Mode },
    /// Stage κ ≥ 1 is the inner term's based stage κ (free realization
    /// analyzed based: the sphere copies separate from the earring).
    Unshifted,
    /// Mixed realization, free mode: one 2-cell stage, then nothing.
    MixedFree,
    /// Shrinking wedge: live members keep their profiles until `delta`,
    /// then the wedge point alone (or nothing) remains.
    Wedge { delta: Death, point_at_delta: bool },
    /// Whiskered wedge: stage 1 isolates the wedge point.
    WhiskerWedge { delta: Ordinal },
    /// Dense attachment with an exact-tail member: β member stages,
    /// then the base runs its own course.
    AttachC3 { beta: Ordinal },
    /// Dense attachment of floating members: base and members evolve
    /// side by side.
    AttachFloat,
    /// Free-mode dense attachment: members shield the base for `delta`
    /// stages.
    AttachFree { delta: Death },
    /// Free analysis equal to the based one, stage by stage.
    PeanoSame,
}

#[derive(Clone, Debug)]
struct Data {
    death: Death,
    bp: Death,
    rank: Ordinal,
    fixed: Option<SpaceTerm>,
    rule: Applied,
}

impl Data {
    fn dying(death: Ordinal, bp: Ordinal, rank: Ordinal, rule: Applied) -> Data {
        Data {
            death: Death::At(death),
            bp: Death::At(bp),
            rank,
            fixed: None,
            rule,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum FamilyPattern {
    /// Member at index α dies exactly at stage α.
    Index,
    /// All members die at the same stage.
    Constant,
}

/// Sampled facts about a `(family λ gen)` schema in one mode.
struct FamilyInfo {
    delta: Death,
    pattern: FamilyPattern,
    samples: Vec<(SpaceTerm, Data)>,
}

/// Per-member engine data for a whole schema: one entry per explicitly
/// listed member, plus the family facts when there is a family tail.
type MemberData = (Vec<(SpaceTerm, Data)>, Option<FamilyInfo>);

/// A flattened view of a schema: the finitely many explicitly listed
/// member terms, plus the family tail if present.
struct SchemaView<'a> {
    explicit: Vec<&'a SpaceTerm>,
    family: Option<(&'a Ordinal, Generator, &'a Ordinal)>,
}

fn view_schema(s: &SeqSchema) -> SchemaView<'_> {
    match s {
        SeqSchema::Const(t) => SchemaView {
            explicit: vec![t],
            family: None,
        },
        SeqSchema::List(prefix, tail) => {
            let mut v = view_schema(tail);
            let mut explicit: Vec<&SpaceTerm> = prefix.iter().collect();
            explicit.append(&mut v.explicit);
            SchemaView {
                explicit,
                family: v.family,
            }
        }
        SeqSchema::Family { limit, gen, stage } => SchemaView {
            explicit: Vec::new(),
            family: Some((limit, *gen, stage)),
        },
    }
}

/// Rewrites the engine applies to every term it constructs (and to its
/// own working copy of the input): a shrinking wedge of one sphere
/// shape is an earring, of floating spheres a free earring, and densely
/// attached points add nothing.
pub fn engine_normal(t: &SpaceTerm) -> SpaceTerm {
    rewrite(&t.normalize())
}

fn rewrite(t: &SpaceTerm) -> SpaceTerm {
    use SpaceTerm::*;
    let out = match t {
        Empty | Pt | Cell | Sphere(_) | Earring(_) | FreeEarring(_) | PerfectlyWild(_) => t.clone(),
        Plus(x) => Plus(Box::new(rewrite(x))),
        Whisker(x) => Whisker(Box::new(rewrite(x))),
        Realize(x) => Realize(Box::new(rewrite(x))),
        FRealize(x) => FRealize(Box::new(rewrite(x))),
        Mixed(x) => Mixed(Box::new(rewrite(x))),
        Disj(ms) => Disj(ms.iter().map(rewrite).collect()),
        SWedge(s) => SWedge(rewrite_schema(s)),
        Attach(b, s) => Attach(Box::new(rewrite(b)), rewrite_schema(s)),
    };
    match out {
        SWedge(SeqSchema::Const(m)) => match *m {
            Sphere(d) => Earring(d),
            Plus(inner) if matches!(*inner, Sphere(_)) => {
                let Sphere(d) = *inner else { unreachable!() };
                FreeEarring(d)
            }
            other => SWedge(SeqSchema::Const(Box::new(other))),
        },
        Attach(b, SeqSchema::Const(m)) if matches!(*m, Pt | Empty) => *b,
        other => other,
    }
}

fn rewrite_schema(s: &SeqSchema) -> SeqSchema {
    match s {
        SeqSchema::Const(t) => SeqSchema::Const(Box::new(rewrite(t))),
        SeqSchema::List(ms, tail) => SeqSchema::List(
            ms.iter().map(rewrite).collect(),
            Box::new(rewrite_schema(tail)),
        ),
        SeqSchema::Family { .. } => s.clone(),
    }
}

/// True when the space `t` denotes carries n-sphere material in every
/// neighborhood census: an n-sphere, an n-earring (of either kind), a
/// perfectly wild set, or any realization.
pub fn sphere_laden(t: &SpaceTerm, n: u32) -> bool {
    use SpaceTerm::*;
    match t {
        Empty | Pt | Cell => false,
        Sphere(d) | Earring(d) | FreeEarring(d) | PerfectlyWild(d) => *d == n,
        Realize(_) | FRealize(_) | Mixed(_) => true,
        Plus(x) | Whisker(x) => sphere_laden(x, n),
        Disj(ms) => ms.iter().any(|m| sphere_laden(m, n)),
        SWedge(s) => schema_laden(s, n),
        Attach(b, s) => sphere_laden(b, n) || schema_laden(s, n),
    }
}

fn schema_laden(s: &SeqSchema, n: u32) -> bool {
    match s {
        SeqSchema::Const(t) => sphere_laden(t, n),
        SeqSchema::List(ms, tail) => ms.iter().any(|m| sphere_laden(m, n)) || schema_laden(tail, n),
        // generators produce sphere or earring material at every index
        SeqSchema::Family { .. } => true,
    }
}

fn contains_swedge(t: &SpaceTerm) -> bool {
    use SpaceTerm::*;
    match t {
        Empty | Pt | Cell | Sphere(_) | Earring(_) | FreeEarring(_) | PerfectlyWild(_) => false,
        Plus(x) | Whisker(x) | Realize(x) | FRealize(x) | Mixed(x) => contains_swedge(x),
        Disj(ms) => ms.iter().any(contains_swedge),
        SWedge(_) => true,
        Attach(b, s) => contains_swedge(b) || schema_contains_swedge(s),
    }
}

fn schema_contains_swedge(s: &SeqSchema) -> bool {
    match s {
        SeqSchema::Const(t) => contains_swedge(t),
        SeqSchema::List(ms, tail) => ms.iter().any(contains_swedge) || schema_contains_swedge(tail),
        SeqSchema::Family { .. } => false,
    }
}

fn schema_has_stage(s: &SeqSchema) -> bool {
    match s {
        SeqSchema::Const(_) => false,
        SeqSchema::List(_, tail) => schema_has_stage(tail),
        SeqSchema::Family { stage, .. } => !stage.is_zero(),
    }
}

fn omax(a: Ordinal, b: &Ordinal) -> Ordinal {
    if a >= *b {
        a
    } else {
        b.clone()
    }
}

/// The symbolic calculator. Cheap to clone queries against; memoizes
/// both rank data and stage profiles, so repeated and recursive queries
/// are shared.
#[derive(Default)]
pub struct Engine {
    data_memo: DashMap<(SpaceTerm, u32, Mode), std::result::Result<Data, EngineError>>,
    profile_memo:
        DashMap<(SpaceTerm, u32, Mode, Ordinal), std::result::Result<SpaceTerm, EngineError>>,
}

impl Engine {
    pub fn new() -> Engine {
        Engine::default()
    }

    /// Full rank report for `t` at dimension `n` in `mode`.
    pub fn rank(&self, t: &SpaceTerm, n: u32, mode: Mode) -> Result<RankReport> {
        self.check_dim(t, n)?;
        let mode = squash(n, mode);
        let te = engine_normal(t);
        let d = self.data(&te, n, mode)?;
        let stabilizer = match d.fixed {
            Some(p) => Stabilizer::Fixed(p),
            None => Stabilizer::Empty,
        };
        Ok(RankReport {
            mode,
            dim: n,
            rank: d.rank,
            stabilizer,
            death: d.death,
            bp_death: d.bp,
        })
    }

    /// The stage-κ profile term. Stage 0 is the normalized input.
    pub fn profile(&self, t: &SpaceTerm, n: u32, mode: Mode, stage: &Ordinal) -> Result<SpaceTerm> {
        self.check_dim(t, n)?;
        if stage.is_zero() {
            return Ok(t.normalize());
        }
        let mode = squash(n, mode);
        let te = engine_normal(t);
        self.profile_norm(&te, n, mode, stage)
    }

    fn check_dim(&self, t: &SpaceTerm, n: u32) -> Result<()> {
        if let Some(d) = t.dim()? {
            if d != n {
                return Err(EngineError::Space(SpaceError::DimensionMismatch {
                    a: d,
                    b: n,
                }));
            }
        }
        Ok(())
    }

    // ---- rank data ----------------------------------------------------

    fn data(&self, t: &SpaceTerm, n: u32, mode: Mode) -> Result<Data> {
        let key = (t.clone(), n, mode);
        if let Some(hit) = self.data_memo.get(&key) {
            return hit.clone();
        }
        let out = self.compute_data(t, n, mode);
        self.data_memo.insert(key, out.clone());
        out
    }

    fn compute_data(&self, t: &SpaceTerm, n: u32, mode: Mode) -> Result<Data> {
        use SpaceTerm::*;
        match t {
            Empty => Ok(Data::dying(
                Ordinal::zero(),
                Ordinal::zero(),
                Ordinal::zero(),
                Applied::Atom,
            )),
            Pt | Cell | Sphere(_) => Ok(Data::dying(
                Ordinal::one(),
                Ordinal::one(),
                Ordinal::one(),
                Applied::Atom,
            )),
            Earring(_) => Ok(Data::dying(
                Ordinal::nat(2),
                Ordinal::nat(2),
                Ordinal::nat(2),
                Applied::Atom,
            )),
            FreeEarring(_) => {
                // at dimension 0 the two earrings are the same sequence
                // of isolated points with a limit; in higher dimension
                // based maps never reach the floating copies
                let survives = n == 0 || mode == Mode::Free;
                let d = if survives { 2u64 } else { 1 };
                Ok(Data::dying(
                    Ordinal::nat(d),
                    Ordinal::nat(d),
                    Ordinal::nat(d),
                    Applied::Atom,
                ))
            }
            PerfectlyWild(_) => Ok(Data {
                death: Death::Never,
                bp: Death::Never,
                rank: Ordinal::zero(),
                fixed: Some(t.clone()),
                rule: Applied::Atom,
            }),
            Plus(inner) | Whisker(inner) => {
                let id = self.data(inner, n, mode)?;
                Ok(Data {
                    death: id.death.max(Death::At(Ordinal::one())),
                    bp: Death::At(Ordinal::one()),
                    rank: omax(id.rank, &Ordinal::one()),
                    fixed: id.fixed,
                    rule: Applied::Inner,
                })
            }
            Disj(ms) => self.disj_data(ms, n, mode),
            Realize(inner) => {
                if n == 0 {
                    return Err(gap(t, Missing::ZeroDimensional));
                }
                self.shift_data(inner, n, mode)
            }
            FRealize(inner) => {
                if n == 0 {
                    return Err(gap(t, Missing::ZeroDimensional));
                }
                match mode {
                    Mode::Free => self.shift_data(inner, n, Mode::Free),
                    Mode::Based => {
                        // based maps cannot leave the earring core for
                        // the disjointly attached sphere copies
                        let id = self.data(inner, n, Mode::Based)?;
                        Ok(Data {
                            death: id.death.max(Death::At(Ordinal::one())),
                            bp: id.bp.max(Death::At(Ordinal::one())),
                            rank: omax(id.rank, &Ordinal::one()),
                            fixed: id.fixed,
                            rule: Applied::Unshifted,
                        })
                    }
                }
            }
            Mixed(inner) => {
                if n == 0 {
                    return Err(gap(t, Missing::ZeroDimensional));
                }
                match mode {
                    Mode::Based => self.shift_data(inner, n, Mode::Based),
                    Mode::Free => Ok(Data {
                        death: Death::At(Ordinal::nat(2)),
                        bp: Death::At(Ordinal::one()),
                        rank: Ordinal::nat(2),
                        fixed: None,
                        rule: Applied::MixedFree,
                    }),
                }
            }
            SWedge(s) => self.wedge_data(t, s, n, mode),
            Attach(b, s) => self.attach_data(t, b, s, n, mode),
        }
    }

    fn shift_data(&self, inner: &SpaceTerm, n: u32, inner_mode: Mode) -> Result<Data> {
        let id = self.data(inner, n, inner_mode)?;
        let one = Ordinal::one();
        Ok(Data {
            death: id.death.shifted(&one),
            bp: id.bp.shifted(&one),
            rank: one.add(&id.rank),
            fixed: id.fixed,
            rule: Applied::Shift { inner_mode },
        })
    }

    fn disj_data(&self, ms: &[SpaceTerm], n: u32, mode: Mode) -> Result<Data> {
        let datas: Vec<Data> = ms
            .iter()
            .map(|m| self.data(m, n, mode))
            .collect::<Result<_>>()?;
        let death = datas
            .iter()
            .map(|d| d.death.clone())
            .max()
            .unwrap_or(Death::At(Ordinal::zero()));
        let bp = datas
            .first()
            .map(|d| d.bp.clone())
            .unwrap_or(Death::At(Ordinal::zero()));
        let mut rank = Ordinal::zero();
        for d in &datas {
            rank = omax(rank, &d.rank);
        }
        let fixed = if death == Death::Never {
            // dying components are gone by the overall rank; only the
            // fixed ones remain
            let parts: Vec<SpaceTerm> = datas.iter().filter_map(|d| d.fixed.clone()).collect();
            Some(engine_normal(&SpaceTerm::Disj(parts)))
        } else {
            None
        };
        Ok(Data {
            death,
            bp,
            rank,
            fixed,
            rule: Applied::Componentwise,
        })
    }

    // ---- wedges -------------------------------------------------------

    fn wedge_data(&self, t: &SpaceTerm, s: &SeqSchema, n: u32, mode: Mode) -> Result<Data> {
        if schema_has_stage(s) {
            return Err(gap(t, Missing::StageSup));
        }
        if n == 0 {
            // certificate-free: the wedge point outlives every member
            // by exactly one stage, mirroring the tree derivative
            return self.wedge_generic(t, s, n, Mode::Based, true);
        }
        let view = view_schema(s);
        match mode {
            Mode::Based => {
                if self.all_plus(&view) {
                    return self.wedge_floating_based(t, s, n);
                }
                if self.all_whisker(&view) {
                    if let Some(d) = self.wedge_whiskered(t, s, n)? {
                        return Ok(d);
                    }
                }
                self.wedge_generic(t, s, n, Mode::Based, false)
            }
            Mode::Free => {
                if self.all_plus(&view) {
                    return self.wedge_floating_free(t, s, n);
                }
                match self.peano_fallback(t, n) {
                    Ok(Some(d)) => Ok(d),
                    Ok(None) => Err(gap(t, Missing::PeanoEq)),
                    Err(e) => Err(e),
                }
            }
        }
    }

    fn all_plus(&self, view: &SchemaView<'_>) -> bool {
        let explicit_ok = view
            .explicit
            .iter()
            .all(|m| matches!(m, SpaceTerm::Plus(_)));
        let family_ok = view
            .family
            .map(|(_, gen, _)| gen == Generator::FreeWitness)
            .unwrap_or(true);
        explicit_ok && family_ok && (!view.explicit.is_empty() || view.family.is_some())
    }

    fn all_whisker(&self, view: &SchemaView<'_>) -> bool {
        let explicit_ok = view
            .explicit
            .iter()
            .all(|m| matches!(m, SpaceTerm::Whisker(_)));
        let family_ok = view
            .family
            .map(|(_, gen, _)| gen == Generator::WhiskerWitness)
            .unwrap_or(true);
        explicit_ok && family_ok && (!view.explicit.is_empty() || view.family.is_some())
    }

    /// Sampled death pattern of a family in one mode. Samples the first
    /// two members; an index-linked pattern is extrapolated along the
    /// whole successor sequence, a constant one to every member.
    fn family_info(
        &self,
        limit: &Ordinal,
        gen: Generator,
        n: u32,
        mode: Mode,
        whole: &SpaceTerm,
    ) -> Result<FamilyInfo> {
        let mut samples = Vec::new();
        let mut deaths = Vec::new();
        let mut indices = Vec::new();
        for j in 1..=2u64 {
            let alpha = limit.succ_seq(j)?;
            let member = witness::generate(gen, &alpha, n)
                .map_err(|_| gap(whole, Missing::GeneratorDeath))?;
            let member = engine_normal(&member);
            let d = self.data(&member, n, mode)?;
            deaths.push(d.death.clone());
            indices.push(alpha.clone());
            samples.push((member, d));
        }
        if deaths[0] == Death::At(indices[0].clone()) && deaths[1] == Death::At(indices[1].clone())
        {
            let delta = sup_of(&OrdinalSeq::Succ {
                limit: limit.clone(),
                offset: 0,
            })?;
            return Ok(FamilyInfo {
                delta: Death::At(delta),
                pattern: FamilyPattern::Index,
                samples,
            });
        }
        if deaths[0] == deaths[1] {
            return Ok(FamilyInfo {
                delta: deaths[0].clone(),
                pattern: FamilyPattern::Constant,
                samples,
            });
        }
        Err(gap(whole, Missing::GeneratorDeath))
    }

    /// Member data for every explicitly listed member plus the family
    /// pattern, with the monotone-death check that makes stage pruning
    /// a prefix operation.
    fn member_data(&self, t: &SpaceTerm, s: &SeqSchema, n: u32, mode: Mode) -> Result<MemberData> {
        let view = view_schema(s);
        let explicit: Vec<(SpaceTerm, Data)> = view
            .explicit
            .iter()
            .map(|m| {
                let me = engine_normal(m);
                self.data(&me, n, mode).map(|d| (me, d))
            })
            .collect::<Result<_>>()?;
        let fam = match view.family {
            Some((limit, gen, _)) => Some(self.family_info(limit, gen, n, mode, t)?),
            None => None,
        };
        let mut prev: Option<&Death> = None;
        for (_, d) in &explicit {
            if let Some(p) = prev {
                if *p > d.death {
                    return Err(gap(t, Missing::DeathMonotone));
                }
            }
            prev = Some(&d.death);
        }
        if let (Some(p), Some(f)) = (prev, &fam) {
            if *p > f.samples[0].1.death {
                return Err(gap(t, Missing::DeathMonotone));
            }
        }
        Ok((explicit, fam))
    }

    /// The supremum of the member deaths, and the stage from which the
    /// member profiles stop changing.
    fn member_sup(
        &self,
        t: &SpaceTerm,
        explicit: &[(SpaceTerm, Data)],
        fam: &Option<FamilyInfo>,
    ) -> Result<(Death, Ordinal)> {
        let mut delta = Death::At(Ordinal::zero());
        let mut settle = Ordinal::zero();
        for (_, d) in explicit {
            delta = delta.max(d.death.clone());
            let s = match &d.death {
                Death::At(o) => o.clone(),
                Death::Never => d.rank.clone(),
            };
            settle = omax(settle, &s);
        }
        if let Some(f) = fam {
            delta = delta.max(f.delta.clone());
            match &f.delta {
                Death::At(o) => settle = omax(settle, o),
                // a family of immortal members never settles at a
                // nameable stage
                Death::Never => return Err(gap(t, Missing::StageSup)),
            }
        }
        Ok((delta, settle))
    }

    /// Shared core of the wedge rules: members carry their own profiles
    /// until `δ`, then the wedge point alone survives exactly one more
    /// stage.
    fn wedge_generic(
        &self,
        t: &SpaceTerm,
        s: &SeqSchema,
        n: u32,
        mode: Mode,
        skip_c1: bool,
    ) -> Result<Data> {
        let (explicit, fam) = self.member_data(t, s, n, mode)?;
        if !skip_c1 {
            for (m, d) in &explicit {
                if d.bp != d.death {
                    return Err(gap(m, Missing::C1BpDominant));
                }
            }
            if let Some(f) = &fam {
                for (m, d) in &f.samples {
                    if d.bp != d.death {
                        return Err(gap(m, Missing::C1BpDominant));
                    }
                }
            }
        }
        let (delta, settle) = self.member_sup(t, &explicit, &fam)?;
        match &delta {
            Death::At(dv) => {
                let death = dv.add(&Ordinal::one());
                Ok(Data::dying(
                    death.clone(),
                    death.clone(),
                    death,
                    Applied::Wedge {
                        delta,
                        point_at_delta: true,
                    },
                ))
            }
            Death::Never => {
                let rank = omax(settle, &Ordinal::one());
                let fixed = self.wedge_stage(s, n, mode, &rank)?;
                Ok(Data {
                    death: Death::Never,
                    bp: Death::Never,
                    rank,
                    fixed: Some(fixed),
                    rule: Applied::Wedge {
                        delta,
                        point_at_delta: true,
                    },
                })
            }
        }
    }

    /// Wedge of whiskered members: the arcs vanish at stage 1, cutting
    /// the wedge point loose while the cores keep shrinking on their
    /// own. Returns None when its side conditions fail, so the caller
    /// can fall back to the generic rule.
    fn wedge_whiskered(&self, t: &SpaceTerm, s: &SeqSchema, n: u32) -> Result<Option<Data>> {
        let (explicit, fam) = self.member_data(t, s, n, Mode::Based)?;
        let two = Ordinal::nat(2);
        let core_ok = |m: &SpaceTerm, d: &Data| -> Result<bool> {
            let SpaceTerm::Whisker(core) = m else {
                return Ok(false);
            };
            let attrs = core.attributes(n);
            Ok(attrs.peano && d.death >= Death::At(two.clone()) && d.death != Death::Never)
        };
        for (m, d) in &explicit {
            if !core_ok(m, d)? {
                return Ok(None);
            }
        }
        if let Some(f) = &fam {
            if f.pattern != FamilyPattern::Index {
                return Ok(None);
            }
            for (m, d) in &f.samples {
                if !core_ok(m, d)? {
                    return Ok(None);
                }
            }
        }
        let (delta, _) = self.member_sup(t, &explicit, &fam)?;
        let Death::At(dv) = delta else {
            return Ok(None);
        };
        Ok(Some(Data::dying(
            dv.clone(),
            two,
            dv.clone(),
            Applied::WhiskerWedge { delta: dv },
        )))
    }

    /// Based analysis of a wedge of floating members: the wedge point
    /// is isolated from stage 1 on and the floats run independently.
    fn wedge_floating_based(&self, t: &SpaceTerm, s: &SeqSchema, n: u32) -> Result<Data> {
        let (explicit, fam) = self.member_data(t, s, n, Mode::Based)?;
        let (delta, settle) = self.member_sup(t, &explicit, &fam)?;
        match &delta {
            Death::At(dv) => Ok(Data::dying(
                omax(dv.clone(), &Ordinal::one()),
                Ordinal::one(),
                omax(dv.clone(), &Ordinal::one()),
                Applied::Wedge {
                    delta,
                    point_at_delta: false,
                },
            )),
            Death::Never => {
                let rank = omax(settle, &Ordinal::one());
                let fixed = self.wedge_stage(s, n, Mode::Based, &rank)?;
                Ok(Data {
                    death: Death::Never,
                    bp: Death::At(Ordinal::one()),
                    rank,
                    fixed: Some(fixed),
                    rule: Applied::Wedge {
                        delta,
                        point_at_delta: false,
                    },
                })
            }
        }
    }

    /// Free analysis of the same shape: every member is required to be
    /// sphere-laden through its whole life, which keeps the wedge point
    /// free-wild until all members are gone.
    fn wedge_floating_free(&self, t: &SpaceTerm, s: &SeqSchema, n: u32) -> Result<Data> {
        let (explicit, fam) = self.member_data(t, s, n, Mode::Free)?;
        for (m, _) in &explicit {
            if !self.c4(m, n)? {
                return Err(gap(m, Missing::C4SphereLaden));
            }
        }
        if let Some(f) = &fam {
            for (m, _) in &f.samples {
                if !self.c4(m, n)? {
                    return Err(gap(m, Missing::C4SphereLaden));
                }
            }
        }
        let (delta, settle) = self.member_sup(t, &explicit, &fam)?;
        match &delta {
            Death::At(dv) => {
                let death = dv.add(&Ordinal::one());
                Ok(Data::dying(
                    death.clone(),
                    death.clone(),
                    death,
                    Applied::Wedge {
                        delta,
                        point_at_delta: true,
                    },
                ))
            }
            Death::Never => {
                let rank = omax(settle, &Ordinal::one());
                let fixed = self.wedge_stage(s, n, Mode::Free, &rank)?;
                Ok(Data {
                    death: Death::Never,
                    bp: Death::Never,
                    rank,
                    fixed: Some(fixed),
                    rule: Applied::Wedge {
                        delta,
                        point_at_delta: true,
                    },
                })
            }
        }
    }

    // ---- attachments ---------------------------------------------------

    fn attach_data(
        &self,
        t: &SpaceTerm,
        base: &SpaceTerm,
        s: &SeqSchema,
        n: u32,
        mode: Mode,
    ) -> Result<Data> {
        if schema_has_stage(s) {
            return Err(gap(t, Missing::StageSup));
        }
        if n == 0 {
            return Err(gap(t, Missing::ZeroDimensional));
        }
        match mode {
            Mode::Based => {
                let view = view_schema(s);
                if self.all_plus(&view) {
                    self.attach_floating(t, base, s, n)
                } else {
                    self.attach_exact_tail(t, base, s, n)
                }
            }
            Mode::Free => match self.attach_free(t, base, s, n) {
                Ok(d) => Ok(d),
                Err(e @ EngineError::RuleGap { .. }) => match self.peano_fallback(t, n)? {
                    Some(d) => Ok(d),
                    None => Err(e),
                },
                Err(e) => Err(e),
            },
        }
    }

    /// Dense attachment of a member that shrinks exactly to its
    /// attaching point at a successor stage β+1: the composite looks
    /// like the member for β stages, then hands over to the base.
    fn attach_exact_tail(
        &self,
        t: &SpaceTerm,
        base: &SpaceTerm,
        s: &SeqSchema,
        n: u32,
    ) -> Result<Data> {
        let SeqSchema::Const(member) = s else {
            return Err(gap(t, Missing::C3ExactTail));
        };
        if !base.attributes(n).peano {
            return Err(gap(base, Missing::PeanoBase));
        }
        let member = engine_normal(member);
        let md = self.data(&member, n, Mode::Based)?;
        let Death::At(member_death) = &md.death else {
            return Err(gap(&member, Missing::C3ExactTail));
        };
        let OrdinalKind::Successor(beta) = member_death.kind() else {
            return Err(gap(&member, Missing::C3ExactTail));
        };
        if md.bp != md.death {
            return Err(gap(&member, Missing::C3ExactTail));
        }
        if self.profile_norm(&member, n, Mode::Based, &beta)? != SpaceTerm::Pt {
            return Err(gap(&member, Missing::C3ExactTail));
        }
        let be = engine_normal(base);
        let bd = self.data(&be, n, Mode::Based)?;
        Ok(Data {
            death: bd.death.shifted(&beta),
            bp: bd.bp.shifted(&beta),
            rank: beta.add(&bd.rank),
            fixed: bd.fixed,
            rule: Applied::AttachC3 { beta },
        })
    }

    /// Dense attachment of floating members: based maps never cross the
    /// attachment points, so base and members evolve independently.
    fn attach_floating(
        &self,
        t: &SpaceTerm,
        base: &SpaceTerm,
        s: &SeqSchema,
        n: u32,
    ) -> Result<Data> {
        let (explicit, fam) = self.member_data(t, s, n, Mode::Based)?;
        let (delta, settle) = self.member_sup(t, &explicit, &fam)?;
        let be = engine_normal(base);
        let bd = self.data(&be, n, Mode::Based)?;
        let death = bd.death.clone().max(delta.clone());
        let rank = omax(bd.rank.clone(), &settle);
        let fixed = if death == Death::Never {
            Some(self.attach_float_stage(&be, s, n, &rank)?)
        } else {
            None
        };
        Ok(Data {
            death,
            bp: bd.bp,
            rank,
            fixed,
            rule: Applied::AttachFloat,
        })
    }

    /// Free analysis of a dense attachment: sphere-laden members shield
    /// every point of the base for δ stages, after which the base runs
    /// its own free course.
    fn attach_free(&self, t: &SpaceTerm, base: &SpaceTerm, s: &SeqSchema, n: u32) -> Result<Data> {
        let (explicit, fam) = self.member_data(t, s, n, Mode::Free)?;
        for (m, _) in &explicit {
            if !self.c4(m, n)? {
                return Err(gap(m, Missing::C4SphereLaden));
            }
        }
        if let Some(f) = &fam {
            for (m, _) in &f.samples {
                if !self.c4(m, n)? {
                    return Err(gap(m, Missing::C4SphereLaden));
                }
            }
        }
        let (delta, settle) = self.member_sup(t, &explicit, &fam)?;
        let be = engine_normal(base);
        let bd = self.data(&be, n, Mode::Free)?;
        match &delta {
            Death::At(dv) => Ok(Data {
                death: bd.death.shifted(dv),
                bp: bd.bp.shifted(dv),
                rank: dv.add(&bd.rank),
                fixed: bd.fixed,
                rule: Applied::AttachFree { delta },
            }),
            Death::Never => {
                let rank = omax(settle, &Ordinal::one());
                let fixed = SpaceTerm::Attach(
                    Box::new(be.clone()),
                    self.pruned_schema(s, n, Mode::Free, &rank)?
                        .ok_or_else(|| gap(t, Missing::StageSup))?,
                );
                Ok(Data {
                    death: Death::Never,
                    bp: Death::Never,
                    rank,
                    fixed: Some(engine_normal(&fixed)),
                    rule: Applied::AttachFree { delta },
                })
            }
        }
    }

    // ---- free-mode certificates -----------------------------------------

    /// Does every live free stage of `t` carry n-sphere material?
    fn c4(&self, t: &SpaceTerm, n: u32) -> Result<bool> {
        use SpaceTerm::*;
        match t {
            Empty => Ok(true),
            Pt | Cell | Earring(_) | FreeEarring(_) | Mixed(_) => Ok(false),
            Sphere(d) | PerfectlyWild(d) => Ok(*d == n),
            Plus(x) | Whisker(x) | Realize(x) | FRealize(x) => self.c4(x, n),
            Disj(ms) => {
                let mut all = Death::At(Ordinal::zero());
                let mut laden = Death::At(Ordinal::zero());
                for m in ms {
                    let d = self.data(&engine_normal(m), n, Mode::Free)?;
                    all = all.max(d.death.clone());
                    if self.c4(m, n)? {
                        laden = laden.max(d.death);
                    }
                }
                Ok(laden == all)
            }
            SWedge(_) => Ok(false),
            Attach(b, _) => self.c4(b, n),
        }
    }

    /// When `t` and all its based stages are honest Peano continua, the
    /// free analysis coincides with the based one stage by stage. The
    /// stages must be finitely many and free of wedge bookkeeping terms
    /// (whose attributes describe the wedge, not the profile set).
    fn peano_fallback(&self, t: &SpaceTerm, n: u32) -> Result<Option<Data>> {
        if n == 0 || !t.attributes(n).peano {
            return Ok(None);
        }
        let based = match self.data(t, n, Mode::Based) {
            Ok(d) => d,
            Err(EngineError::RuleGap { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        let Some(big) = based.rank.as_nat() else {
            return Ok(None);
        };
        let Ok(steps) = u64::try_from(&big) else {
            return Ok(None);
        };
        for k in 0..=steps {
            let stage = self.profile_norm(t, n, Mode::Based, &Ordinal::nat(k))?;
            if stage == SpaceTerm::Empty {
                break;
            }
            if k > 0 && contains_swedge(&stage) {
                return Ok(None);
            }
            if !stage.attributes(n).peano {
                return Ok(None);
            }
        }
        Ok(Some(Data {
            rule: Applied::PeanoSame,
            ..based
        }))
    }

    // ---- stage profiles --------------------------------------------------

    fn profile_norm(
        &self,
        t: &SpaceTerm,
        n: u32,
        mode: Mode,
        stage: &Ordinal,
    ) -> Result<SpaceTerm> {
        if stage.is_zero() {
            return Ok(t.clone());
        }
        let key = (t.clone(), n, mode, stage.clone());
        if let Some(hit) = self.profile_memo.get(&key) {
            return hit.clone();
        }
        let out = self.compute_profile(t, n, mode, stage);
        self.profile_memo.insert(key, out.clone());
        out
    }

    fn compute_profile(
        &self,
        t: &SpaceTerm,
        n: u32,
        mode: Mode,
        stage: &Ordinal,
    ) -> Result<SpaceTerm> {
        use SpaceTerm::*;
        let d = self.data(t, n, mode)?;
        let one = Ordinal::one();
        Ok(match &d.rule {
            Applied::Atom => match t {
                Empty | Pt | Cell | Sphere(_) => Empty,
                Earring(_) => {
                    if *stage == one {
                        Pt
                    } else {
                        Empty
                    }
                }
                FreeEarring(_) => {
                    let survives = n == 0 || mode == Mode::Free;
                    if survives && *stage == one {
                        Pt
                    } else {
                        Empty
                    }
                }
                PerfectlyWild(_) => t.clone(),
                _ => unreachable!("atom rule on a non-atom"),
            },
            Applied::Inner => {
                let (Plus(inner) | Whisker(inner)) = t else {
                    unreachable!()
                };
                self.profile_norm(&engine_normal(inner), n, mode, stage)?
            }
            Applied::Componentwise => {
                let Disj(ms) = t else { unreachable!() };
                let parts: Vec<SpaceTerm> = ms
                    .iter()
                    .map(|m| self.profile_norm(&engine_normal(m), n, mode, stage))
                    .collect::<Result<_>>()?;
                engine_normal(&Disj(parts))
            }
            Applied::Shift { inner_mode } => {
                let (Realize(inner) | FRealize(inner) | Mixed(inner)) = t else {
                    unreachable!()
                };
                let mu = one
                    .left_sub(stage)
                    .expect("stage is at least 1, so 1+μ reaches it");
                self.profile_norm(&engine_normal(inner), n, *inner_mode, &mu)?
            }
            Applied::Unshifted => {
                let FRealize(inner) = t else { unreachable!() };
                self.profile_norm(&engine_normal(inner), n, Mode::Based, stage)?
            }
            Applied::MixedFree => {
                if *stage == one {
                    Cell
                } else {
                    Empty
                }
            }
            Applied::Wedge {
                delta,
                point_at_delta,
            } => {
                let SWedge(s) = t else { unreachable!() };
                match delta {
                    Death::Never => self.wedge_stage(s, n, mode, stage)?,
                    Death::At(dv) => {
                        if stage < dv {
                            self.wedge_stage(s, n, mode, stage)?
                        } else if stage == dv && *point_at_delta {
                            Pt
                        } else {
                            Empty
                        }
                    }
                }
            }
            Applied::WhiskerWedge { delta } => {
                let SWedge(s) = t else { unreachable!() };
                if stage >= delta {
                    Empty
                } else if *stage == one {
                    let cores = self.wedge_stage(s, n, Mode::Based, stage)?;
                    engine_normal(&Disj(vec![Pt, cores]))
                } else {
                    self.wedge_stage(s, n, Mode::Based, stage)?
                }
            }
            Applied::AttachC3 { beta } => {
                let Attach(base, s) = t else { unreachable!() };
                let SeqSchema::Const(member) = s else {
                    unreachable!()
                };
                if stage < beta {
                    let p = self.profile_norm(&engine_normal(member), n, Mode::Based, stage)?;
                    engine_normal(&Attach(base.clone(), SeqSchema::Const(Box::new(p))))
                } else if stage == beta {
                    engine_normal(base)
                } else {
                    let mu = beta
                        .left_sub(stage)
                        .expect("stage exceeds beta, so beta+μ reaches it");
                    self.profile_norm(&engine_normal(base), n, Mode::Based, &mu)?
                }
            }
            Applied::AttachFloat => {
                let Attach(base, s) = t else { unreachable!() };
                self.attach_float_stage(&engine_normal(base), s, n, stage)?
            }
            Applied::AttachFree { delta } => {
                let Attach(base, s) = t else { unreachable!() };
                let be = engine_normal(base);
                match delta {
                    Death::Never => {
                        let pruned = self
                            .pruned_schema(s, n, Mode::Free, stage)?
                            .expect("immortal members never all die");
                        engine_normal(&Attach(Box::new(be), pruned))
                    }
                    Death::At(dv) => {
                        if stage < dv {
                            let pruned = self
                                .pruned_schema(s, n, Mode::Free, stage)?
                                .expect("below the member supremum some member is live");
                            engine_normal(&Attach(Box::new(be), pruned))
                        } else if stage == dv {
                            be
                        } else {
                            let mu = dv
                                .left_sub(stage)
                                .expect("stage exceeds delta, so delta+μ reaches it");
                            self.profile_norm(&be, n, Mode::Free, &mu)?
                        }
                    }
                }
            }
            Applied::PeanoSame => self.profile_norm(t, n, Mode::Based, stage)?,
        })
    }

    /// The wedge of the members' stage-κ profiles, with dead members
    /// pruned away; `Empty` when none survive.
    fn wedge_stage(&self, s: &SeqSchema, n: u32, mode: Mode, stage: &Ordinal) -> Result<SpaceTerm> {
        Ok(match self.pruned_schema(s, n, mode, stage)? {
            Some(p) => engine_normal(&SpaceTerm::SWedge(p)),
            None => SpaceTerm::Empty,
        })
    }

    fn attach_float_stage(
        &self,
        base_en: &SpaceTerm,
        s: &SeqSchema,
        n: u32,
        stage: &Ordinal,
    ) -> Result<SpaceTerm> {
        let bp = self.profile_norm(base_en, n, Mode::Based, stage)?;
        let floats = self.wedge_stage(s, n, Mode::Based, stage)?;
        Ok(engine_normal(&SpaceTerm::Disj(vec![bp, floats])))
    }

    /// Maps every member to its stage-κ profile and drops the dead
    /// ones. Death-monotonicity (checked when the rule fired) makes
    /// this a prefix removal, so the result is again a schema. `None`
    /// when every member is gone.
    fn pruned_schema(
        &self,
        s: &SeqSchema,
        n: u32,
        mode: Mode,
        stage: &Ordinal,
    ) -> Result<Option<SeqSchema>> {
        Ok(match s {
            SeqSchema::Const(m) => {
                let p = self.profile_norm(&engine_normal(m), n, mode, stage)?;
                if p == SpaceTerm::Empty {
                    None
                } else {
                    Some(SeqSchema::Const(Box::new(p)))
                }
            }
            SeqSchema::List(ms, tail) => {
                let mut live = Vec::new();
                for m in ms {
                    let p = self.profile_norm(&engine_normal(m), n, mode, stage)?;
                    if p != SpaceTerm::Empty {
                        live.push(p);
                    }
                }
                match self.pruned_schema(tail, n, mode, stage)? {
                    Some(t2) => {
                        if live.is_empty() {
                            Some(t2)
                        } else {
                            Some(SeqSchema::List(live, Box::new(t2)))
                        }
                    }
                    None => {
                        debug_assert!(
                            live.is_empty(),
                            "monotone deaths: live prefix cannot outlast the tail"
                        );
                        None
                    }
                }
            }
            SeqSchema::Family {
                limit,
                gen,
                stage: s0,
            } => {
                debug_assert!(s0.is_zero(), "input schemas carry stage 0");
                let info = self.family_info(limit, *gen, n, mode, &SpaceTerm::SWedge(s.clone()))?;
                let dead_at = match (&info.pattern, &info.delta) {
                    (FamilyPattern::Index, Death::At(l)) => Some(l.clone()),
                    (FamilyPattern::Constant, Death::At(d)) => Some(d.clone()),
                    (_, Death::Never) => None,
                };
                match dead_at {
                    Some(l) if *stage >= l => None,
                    _ => Some(SeqSchema::Family {
                        limit: limit.clone(),
                        gen: *gen,
                        stage: stage.clone(),
                    }),
                }
            }
        })
    }
}

fn squash(n: u32, mode: Mode) -> Mode {
    if n == 0 {
        Mode::Based
    } else {
        mode
    }
}
