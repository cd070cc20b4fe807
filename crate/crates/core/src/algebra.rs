//! Binary operations on spaces and classification of regions as approximate
//! groupoids, semigroups, monoids and groups.
//!
//! A region `G` is judged against its upper approximation `Φ*G`: products of
//! members only have to land in `Φ*G`, and identities are searched for in
//! `Φ*G`. Inverses must come from `G` itself and must hit the chosen identity
//! exactly (point equality).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::approx::{set_description, upper_approximation};
use crate::error::{Error, Result};
use crate::space::{DescribedSpace, PointId, Region};

/// A total binary operation on the points of a space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BinaryOp {
    /// `(x_ij, x_kl) ↦ x_pr` with `p = min(i,k)`, `r = min(j,l)`.
    MinIndex,
    /// `(x_ij, x_kl) ↦ x_pr` with `p = (i+k) mod n`, `r = (j+l) mod n`.
    ModAdd(usize),
    /// Explicit Cayley table.
    Table(HashMap<(PointId, PointId), PointId>),
}

impl BinaryOp {
    pub fn apply(&self, space: &DescribedSpace, x: PointId, y: PointId) -> Result<PointId> {
        space.checked_index(x)?;
        space.checked_index(y)?;
        let domain = |reason: String| Error::OpDomain {
            left: x,
            right: y,
            reason,
        };
        let z = match self {
            BinaryOp::MinIndex => PointId::new(x.row.min(y.row), x.col.min(y.col)),
            BinaryOp::ModAdd(0) => return Err(domain("modulus is zero".into())),
            BinaryOp::ModAdd(n) => PointId::new((x.row + y.row) % n, (x.col + y.col) % n),
            BinaryOp::Table(t) => *t.get(&(x, y)).ok_or_else(|| domain("pair missing from table".into()))?,
        };
        if !space.contains(z) {
            return Err(domain(format!("result {z} is outside the space")));
        }
        Ok(z)
    }

    /// Checks that the operation is total on the space, returning the first
    /// pair that fails.
    pub fn validate(&self, space: &DescribedSpace) -> Result<()> {
        if let BinaryOp::MinIndex = self {
            return Ok(());
        }
        for x in space.points() {
            for y in space.points() {
                self.apply(space, x, y)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for BinaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BinaryOp::MinIndex => f.write_str("min"),
            BinaryOp::ModAdd(n) => write!(f, "modadd:{n}"),
            BinaryOp::Table(t) => write!(f, "table[{} entries]", t.len()),
        }
    }
}

/// Which law a [`Witness`] violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    Closure,
    Associativity,
    Identity,
    Inverse,
    Commutativity,
}

impl Axiom {
    pub fn id(self) -> &'static str {
        match self {
            Axiom::Closure => "AG1",
            Axiom::Associativity => "AG2",
            Axiom::Identity => "AG3",
            Axiom::Inverse => "AG4",
            Axiom::Commutativity => "COMM",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// A concrete violation.
///
/// | axiom | inputs | outputs |
/// |---|---|---|
/// | Closure | `x, y` | `x·y` (not in `Φ*G`) |
/// | Associativity | `x, y, z` | `(x·y)·z, x·(y·z)` |
/// | Identity | `e, x` | `x·e, e·x` (not both `x`) |
/// | Inverse | `x` | `e` (no `y ∈ G` with `x·y = y·x = e`) |
/// | Commutativity | `x, y` | `x·y, y·x` |
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub axiom: Axiom,
    pub inputs: Vec<PointId>,
    pub outputs: Vec<PointId>,
}

impl Witness {
    /// Re-evaluates the witness; true when the violation is reproduced.
    pub fn replay(&self, space: &DescribedSpace, op: &BinaryOp, region: &Region<'_>) -> Result<bool> {
        let ap = |a, b| op.apply(space, a, b);
        Ok(match (self.axiom, &self.inputs[..], &self.outputs[..]) {
            (Axiom::Closure, &[x, y], &[out]) => {
                let z = ap(x, y)?;
                z == out && !upper_approximation(region).contains(z)
            }
            (Axiom::Associativity, &[x, y, z], &[l, r]) => {
                let lhs = ap(ap(x, y)?, z)?;
                let rhs = ap(x, ap(y, z)?)?;
                lhs == l && rhs == r && lhs != rhs
            }
            (Axiom::Identity, &[e, x], &[xe, ex]) => {
                let (a, b) = (ap(x, e)?, ap(e, x)?);
                a == xe && b == ex && (a != x || b != x)
            }
            (Axiom::Inverse, &[x], &[e]) => {
                let mut found = false;
                for y in region.iter() {
                    if ap(x, y)? == e && ap(y, x)? == e {
                        found = true;
                        break;
                    }
                }
                !found
            }
            (Axiom::Commutativity, &[x, y], &[xy, yx]) => {
                let (a, b) = (ap(x, y)?, ap(y, x)?);
                a == xy && b == yx && a != b
            }
            _ => false,
        })
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |ps: &[PointId]| ps.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
        write!(f, "{} {} -> {}", self.axiom, join(&self.inputs), join(&self.outputs))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Stop collecting witnesses after this many; `None` keeps all of them.
    pub max_witnesses: Option<usize>,
}

impl CheckOptions {
    pub fn first(k: usize) -> Self {
        CheckOptions { max_witnesses: Some(k) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub holds: bool,
    pub witnesses: Vec<Witness>,
}

struct Collector {
    limit: Option<usize>,
    holds: bool,
    witnesses: Vec<Witness>,
}

impl Collector {
    fn new(opts: CheckOptions) -> Self {
        Collector {
            limit: opts.max_witnesses,
            holds: true,
            witnesses: Vec::new(),
        }
    }

    fn push(&mut self, w: Witness) {
        self.holds = false;
        if self.limit.is_none_or(|k| self.witnesses.len() < k) {
            self.witnesses.push(w);
        }
    }

    /// True once no further witness would be recorded.
    fn saturated(&self) -> bool {
        !self.holds && self.limit.is_some_and(|k| self.witnesses.len() >= k)
    }

    fn finish(self) -> CheckOutcome {
        CheckOutcome {
            holds: self.holds,
            witnesses: self.witnesses,
        }
    }
}

fn require_nonempty(region: &Region<'_>) -> Result<()> {
    if region.is_empty() {
        Err(Error::EmptyRegion)
    } else {
        Ok(())
    }
}

/// AG1: `x·y ∈ Φ*G` for all ordered pairs of members.
pub fn check_closure(
    space: &DescribedSpace,
    op: &BinaryOp,
    region: &Region<'_>,
    opts: CheckOptions,
) -> Result<CheckOutcome> {
    require_nonempty(region)?;
    let upper = upper_approximation(region);
    let mut c = Collector::new(opts);
    'outer: for x in region.iter() {
        for y in region.iter() {
            let z = op.apply(space, x, y)?;
            if !upper.contains(z) {
                c.push(Witness {
                    axiom: Axiom::Closure,
                    inputs: vec![x, y],
                    outputs: vec![z],
                });
                if c.saturated() {
                    break 'outer;
                }
            }
        }
    }
    Ok(c.finish())
}

/// AG2: `(x·y)·z = x·(y·z)` for all member triples. Intermediate products may
/// leave the region; the operation is total on the space so they stay defined.
pub fn check_associativity(
    space: &DescribedSpace,
    op: &BinaryOp,
    region: &Region<'_>,
    opts: CheckOptions,
) -> Result<CheckOutcome> {
    require_nonempty(region)?;
    let members = region.to_vec();
    let mut products = HashMap::new();
    for &x in &members {
        for &y in &members {
            products.insert((x, y), op.apply(space, x, y)?);
        }
    }
    let mut c = Collector::new(opts);
    'outer: for &x in &members {
        for &y in &members {
            let xy = products[&(x, y)];
            for &z in &members {
                let lhs = op.apply(space, xy, z)?;
                let rhs = op.apply(space, x, products[&(y, z)])?;
                if lhs != rhs {
                    c.push(Witness {
                        axiom: Axiom::Associativity,
                        inputs: vec![x, y, z],
                        outputs: vec![lhs, rhs],
                    });
                    if c.saturated() {
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(c.finish())
}

/// AG3 candidates: every `e ∈ Φ*G` with `x·e = e·x = x` for all members, row-major.
pub fn find_identities(space: &DescribedSpace, op: &BinaryOp, region: &Region<'_>) -> Result<Vec<PointId>> {
    require_nonempty(region)?;
    let mut out = Vec::new();
    for e in upper_approximation(region).iter() {
        if identity_failure(space, op, region, e)?.is_none() {
            out.push(e);
        }
    }
    Ok(out)
}

fn identity_failure(space: &DescribedSpace, op: &BinaryOp, region: &Region<'_>, e: PointId) -> Result<Option<Witness>> {
    for x in region.iter() {
        let (xe, ex) = (op.apply(space, x, e)?, op.apply(space, e, x)?);
        if xe != x || ex != x {
            return Ok(Some(Witness {
                axiom: Axiom::Identity,
                inputs: vec![e, x],
                outputs: vec![xe, ex],
            }));
        }
    }
    Ok(None)
}

/// All `y ∈ G` with `x·y = y·x = identity`, for each member `x`.
pub fn inverse_candidates(
    space: &DescribedSpace,
    op: &BinaryOp,
    region: &Region<'_>,
    identity: PointId,
) -> Result<BTreeMap<PointId, Vec<PointId>>> {
    let mut out = BTreeMap::new();
    for x in region.iter() {
        let mut ys = Vec::new();
        for y in region.iter() {
            if op.apply(space, x, y)? == identity && op.apply(space, y, x)? == identity {
                ys.push(y);
            }
        }
        out.insert(x, ys);
    }
    Ok(out)
}

/// AG4: for each member, the first (row-major) member inverting it with
/// respect to `identity`. Members without an inverse are absent.
pub fn find_inverses(
    space: &DescribedSpace,
    op: &BinaryOp,
    region: &Region<'_>,
    identity: PointId,
) -> Result<BTreeMap<PointId, PointId>> {
    Ok(inverse_candidates(space, op, region, identity)?
        .into_iter()
        .filter_map(|(x, ys)| ys.first().map(|&y| (x, y)))
        .collect())
}

pub fn check_commutative(
    space: &DescribedSpace,
    op: &BinaryOp,
    region: &Region<'_>,
    opts: CheckOptions,
) -> Result<CheckOutcome> {
    require_nonempty(region)?;
    let members = region.to_vec();
    let mut c = Collector::new(opts);
    'outer: for (i, &x) in members.iter().enumerate() {
        for &y in &members[i + 1..] {
            let (xy, yx) = (op.apply(space, x, y)?, op.apply(space, y, x)?);
            if xy != yx {
                c.push(Witness {
                    axiom: Axiom::Commutativity,
                    inputs: vec![x, y],
                    outputs: vec![xy, yx],
                });
                if c.saturated() {
                    break 'outer;
                }
            }
        }
    }
    Ok(c.finish())
}

/// Rungs of the approximate hierarchy, weakest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    NotGroupoid,
    Groupoid,
    Semigroup,
    Monoid,
    Group,
}

impl Level {
    pub fn id(self) -> &'static str {
        match self {
            Level::NotGroupoid => "not-groupoid",
            Level::Groupoid => "groupoid",
            Level::Semigroup => "semigroup",
            Level::Monoid => "monoid",
            Level::Group => "group",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureReport {
    pub level: Level,
    pub closed: bool,
    pub associative: bool,
    pub commutative: bool,
    /// Every approximate identity in `Φ*G`, row-major.
    pub identities: Vec<PointId>,
    /// The identity inverses were resolved against: the first one admitting a
    /// total inverse map, else the first identity.
    pub identity: Option<PointId>,
    pub inverse_map: BTreeMap<PointId, PointId>,
    pub inverse_candidates: BTreeMap<PointId, Vec<PointId>>,
    pub witnesses: Vec<Witness>,
}

impl StructureReport {
    pub fn multiple_identities(&self) -> bool {
        self.identities.len() > 1
    }

    /// Unordered inverse pairs `(x, y)` with `x ≤ y`.
    pub fn inverse_pairs(&self) -> Vec<(PointId, PointId)> {
        let mut pairs: Vec<_> = self
            .inverse_map
            .iter()
            .map(|(&x, &y)| if x <= y { (x, y) } else { (y, x) })
            .collect();
        pairs.sort();
        pairs.dedup();
        pairs
    }

    /// One-line verdict such as `commutative approximately group, identity x00`.
    pub fn summary(&self) -> String {
        if self.level == Level::NotGroupoid {
            return "not an approximately groupoid".to_string();
        }
        let mut s = String::new();
        if self.commutative {
            s.push_str("commutative ");
        }
        s.push_str("approximately ");
        s.push_str(self.level.id());
        if self.level >= Level::Monoid {
            let ids: Vec<_> = self.identities.iter().map(ToString::to_string).collect();
            if ids.len() == 1 {
                s.push_str(&format!(", identity {}", ids[0]));
            } else {
                s.push_str(&format!(", identities {}", ids.join(" ")));
            }
        }
        if self.level == Level::Group {
            let pairs: Vec<_> = self
                .inverse_pairs()
                .into_iter()
                .map(|(x, y)| {
                    if x == y {
                        format!("{x}<->{x}")
                    } else {
                        format!("{x}<->{y}")
                    }
                })
                .collect();
            s.push_str(&format!(", inverses {}", pairs.join(" ")));
        }
        s
    }
}

/// Runs every axiom check and places the region on the highest rung whose
/// axioms (and all lower ones) pass.
pub fn classify(
    space: &DescribedSpace,
    op: &BinaryOp,
    region: &Region<'_>,
    opts: CheckOptions,
) -> Result<StructureReport> {
    require_nonempty(region)?;
    let closure = check_closure(space, op, region, opts)?;
    let assoc = check_associativity(space, op, region, opts)?;
    let comm = check_commutative(space, op, region, opts)?;
    let identities = find_identities(space, op, region)?;

    let mut witnesses = closure.witnesses;
    witnesses.extend(assoc.witnesses);

    if identities.is_empty() {
        let upper = upper_approximation(region);
        for e in upper.iter() {
            if opts.max_witnesses.is_some_and(|k| witnesses.len() >= k) {
                break;
            }
            witnesses.extend(identity_failure(space, op, region, e)?);
        }
    }

    let mut chosen = None;
    let mut inverse_map = BTreeMap::new();
    let mut candidates = BTreeMap::new();
    for &e in &identities {
        let cands = inverse_candidates(space, op, region, e)?;
        let total = cands.values().all(|ys| !ys.is_empty());
        if chosen.is_none() || total {
            chosen = Some(e);
            inverse_map = cands
                .iter()
                .filter_map(|(&x, ys)| ys.first().map(|&y| (x, y)))
                .collect();
            candidates = cands;
        }
        if total {
            break;
        }
    }
    let inverses_total = chosen.is_some() && inverse_map.len() == region.len();
    if let (Some(e), false) = (chosen, inverses_total) {
        for x in region.iter().filter(|x| !inverse_map.contains_key(x)) {
            witnesses.push(Witness {
                axiom: Axiom::Inverse,
                inputs: vec![x],
                outputs: vec![e],
            });
        }
    }
    witnesses.extend(comm.witnesses);

    let level = if !closure.holds {
        Level::NotGroupoid
    } else if !assoc.holds {
        Level::Groupoid
    } else if identities.is_empty() {
        Level::Semigroup
    } else if !inverses_total {
        Level::Monoid
    } else {
        Level::Group
    };

    Ok(StructureReport {
        level,
        closed: closure.holds,
        associative: assoc.holds,
        commutative: comm.holds,
        identities,
        identity: chosen,
        inverse_map,
        inverse_candidates: candidates,
        witnesses,
    })
}

/// Ordinary closure of a point set under the operation (`Φ*H` being a groupoid).
pub fn is_closed_under(space: &DescribedSpace, op: &BinaryOp, set: &Region<'_>) -> Result<bool> {
    for x in set.iter() {
        for y in set.iter() {
            if !set.contains(op.apply(space, x, y)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupReport {
    /// `H` classifies as an approximate group under the same operation.
    pub is_subgroup: bool,
    pub report: StructureReport,
    /// `Φ*H` is closed under the operation.
    pub upper_is_groupoid: bool,
    /// Every `x ∈ H` has one of its inverses in `G` (w.r.t. `G`'s identity) inside `H`.
    pub inverses_in_subset: bool,
    /// `Q(H) = Q(G)`.
    pub same_description: bool,
}

pub fn is_subgroup(
    space: &DescribedSpace,
    op: &BinaryOp,
    group: &Region<'_>,
    candidate: &Region<'_>,
    opts: CheckOptions,
) -> Result<SubgroupReport> {
    require_nonempty(candidate)?;
    if !candidate.is_subset(group)? {
        return Err(Error::NotSubset);
    }
    let g = classify(space, op, group, opts)?;
    if g.level != Level::Group {
        return Err(Error::GNotGroup(g.level.id().to_string()));
    }
    subgroup_against(space, op, group, &g, candidate, opts)
}

/// [`is_subgroup`] with the group's report precomputed.
pub(crate) fn subgroup_against(
    space: &DescribedSpace,
    op: &BinaryOp,
    group: &Region<'_>,
    group_report: &StructureReport,
    candidate: &Region<'_>,
    opts: CheckOptions,
) -> Result<SubgroupReport> {
    let report = classify(space, op, candidate, opts)?;
    let upper_is_groupoid = is_closed_under(space, op, &upper_approximation(candidate))?;
    let inverses_in_subset = candidate.iter().all(|x| {
        group_report
            .inverse_candidates
            .get(&x)
            .is_some_and(|ys| ys.iter().any(|&y| candidate.contains(y)))
    });
    let same_description = set_description(candidate) == set_description(group);
    Ok(SubgroupReport {
        is_subgroup: report.level == Level::Group,
        report,
        upper_is_groupoid,
        inverses_in_subset,
        same_description,
    })
}
