//! Bi-convexity spaces `(X, L, U)` and their ⋈ encoding
//! `a ⋈ b iff conv_U(a) ∩ conv_L(b) ≠ ∅`.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bea::{self, check_axioms, complement, Axiom, BeaOracle, PairTable, Realization};
use crate::caps::Caps;
use crate::dual::{bidual_bea, ultimate_dual, EvalReport};
use crate::error::{Error, Result};
use crate::instances::generators::{self, intersection_closure};
use crate::mask::{self, Mask};
use crate::model::{FiniteStructure, SetFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    L,
    U,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiConvexity {
    pub n: usize,
    pub l: SetFamily,
    pub u: SetFamily,
    pub zero: Option<usize>,
    pub one: Option<usize>,
}

fn check_convexity(name: &str, f: &SetFamily, n: usize) -> Result<()> {
    if f.base != n {
        return Err(Error::InvalidBiConvexity(format!("{name} has base {} instead of {n}", f.base)));
    }
    if f.position(f.full()).is_none() {
        return Err(Error::InvalidBiConvexity(format!("{name} lacks the whole set")));
    }
    let members: BTreeSet<Mask> = f.sets.iter().copied().collect();
    for &a in &f.sets {
        for &b in &f.sets {
            if !members.contains(&(a & b)) {
                return Err(Error::InvalidBiConvexity(format!(
                    "{name} is not closed under intersection: {:?} ∩ {:?}",
                    mask::to_indices(a),
                    mask::to_indices(b)
                )));
            }
        }
    }
    Ok(())
}

impl BiConvexity {
    /// Families are stored in increasing mask order.
    pub fn new(n: usize, l: Vec<Mask>, u: Vec<Mask>, zero: Option<usize>, one: Option<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyUniverse);
        }
        let l = SetFamily::canonical(n, l)?;
        let u = SetFamily::canonical(n, u)?;
        check_convexity("L", &l, n)?;
        check_convexity("U", &u, n)?;
        for (name, c) in [("zero", zero), ("one", one)] {
            if let Some(v) = c.filter(|&v| v >= n) {
                return Err(Error::ConstantOutside { name: name.into(), value: v });
            }
        }
        Ok(BiConvexity { n, l, u, zero, one })
    }

    pub fn full(&self) -> Mask {
        mask::full(self.n)
    }

    pub fn family(&self, side: Side) -> &SetFamily {
        match side {
            Side::L => &self.l,
            Side::U => &self.u,
        }
    }

    /// Intersection of the members containing `a`.
    pub fn hull(&self, side: Side, a: Mask) -> Mask {
        self.family(side)
            .sets
            .iter()
            .filter(|&&c| c & a == a)
            .fold(self.full(), |acc, &c| acc & c)
    }

    /// Hulls of every subset, indexed by mask.
    pub fn hull_table(&self, side: Side) -> Vec<Mask> {
        (0..=self.full()).map(|a| self.hull(side, a)).collect()
    }

    /// ∅ is convex on each side whose constant map needs it: `U` unless
    /// `one` is designated, `L` unless `zero` is.
    pub fn empty_is_convex(&self) -> bool {
        (self.one.is_some() || self.hull(Side::U, 0) == 0) && (self.zero.is_some() || self.hull(Side::L, 0) == 0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.l.same_sets(&self.u)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalReport {
    pub normal: bool,
    /// `conv_U(∅) ∩ conv_L(∅)` when it is not empty.
    pub empty_hulls_meet: Option<Mask>,
    /// Points `x ≠ y` whose hulls meet both ways.
    pub n1: Option<(usize, usize)>,
    /// Disjoint `A ∈ L`, `B ∈ U` with no complementary `H ∈ U` containing
    /// `B` and missing `A`.
    pub n2: Option<(Mask, Mask)>,
}

pub fn check_normal(space: &BiConvexity, caps: &Caps) -> Result<NormalReport> {
    caps.check("normality sweep", space.n, caps.normal)?;
    let full = space.full();
    let empty = space.hull(Side::U, 0) & space.hull(Side::L, 0);
    let empty_hulls_meet = (empty != 0).then_some(empty);
    let mut n1 = None;
    'outer: for x in 0..space.n {
        for y in x + 1..space.n {
            let (bx, by) = (mask::bit(x), mask::bit(y));
            if space.hull(Side::L, bx) & space.hull(Side::U, by) != 0
                && space.hull(Side::U, bx) & space.hull(Side::L, by) != 0
            {
                n1 = Some((x, y));
                break 'outer;
            }
        }
    }
    let lset: BTreeSet<Mask> = space.l.sets.iter().copied().collect();
    let splits: Vec<Mask> = space.u.sets.iter().copied().filter(|h| lset.contains(&(full & !h))).collect();
    let mut n2: Option<(Mask, Mask)> = None;
    for &a in &space.l.sets {
        for &b in &space.u.sets {
            if a & b != 0 || splits.iter().any(|&h| b & !h == 0 && a & h == 0) {
                continue;
            }
            let better = n2.is_none_or(|(a0, b0)| mask::witness_key(&[a, b]) < mask::witness_key(&[a0, b0]));
            if better {
                n2 = Some((a, b));
            }
        }
    }
    Ok(NormalReport {
        normal: empty_hulls_meet.is_none() && n1.is_none() && n2.is_none(),
        empty_hulls_meet,
        n1,
        n2,
    })
}

/// The ⋈ of a space as an explicit table. Non-normal spaces are rejected
/// unless `force` is set.
pub fn bea_from_biconvexity(space: &BiConvexity, force: bool, caps: &Caps) -> Result<BeaOracle> {
    if !force && !check_normal(space, caps)?.normal {
        return Err(Error::NotNormal);
    }
    let hu = space.hull_table(Side::U);
    let hl = space.hull_table(Side::L);
    let mut table = PairTable::empty(space.n)?;
    for a in 0..=space.full() {
        for b in 0..=space.full() {
            if hu[a as usize] & hl[b as usize] != 0 {
                table.set(a, b, true);
            }
        }
    }
    BeaOracle::from_table(table, space.zero, space.one)
}

/// The space with `conv_L(a) = {p : {p} ⋈ a}` and `conv_U(a) = {p : a ⋈ {p}}`,
/// checked to be a closure system that reproduces `o`.
pub fn biconvexity_from_bea(o: &BeaOracle, caps: &Caps) -> Result<BiConvexity> {
    let axioms = [Axiom::I0, Axiom::I1, Axiom::I2, Axiom::I3, Axiom::I4];
    let failed: Vec<String> = check_axioms(o, &axioms, caps)?
        .into_iter()
        .filter(|r| !r.pass)
        .map(|r| r.axiom.name().to_string())
        .collect();
    if !failed.is_empty() {
        return Err(Error::AxiomsFail(failed));
    }
    let n = o.n;
    let full = mask::full(n);
    let conv_l: Vec<Mask> = (0..=full)
        .map(|a| (0..n).filter(|&p| o.query(mask::bit(p), a)).fold(0, |m, p| m | mask::bit(p)))
        .collect();
    let conv_u: Vec<Mask> = (0..=full)
        .map(|a| (0..n).filter(|&p| o.query(a, mask::bit(p))).fold(0, |m, p| m | mask::bit(p)))
        .collect();
    let closed = |conv: &[Mask]| -> Vec<Mask> { (0..=full).filter(|&a| conv[a as usize] == a).collect() };
    let space = BiConvexity::new(n, closed(&conv_l), closed(&conv_u), o.zero, o.one)?;
    let hl = space.hull_table(Side::L);
    let hu = space.hull_table(Side::U);
    for a in 0..=full {
        if hl[a as usize] != conv_l[a as usize] {
            return Err(Error::RoundTripFailure { a, b: conv_l[a as usize] });
        }
        if hu[a as usize] != conv_u[a as usize] {
            return Err(Error::RoundTripFailure { a, b: conv_u[a as usize] });
        }
    }
    for a in 0..=full {
        for b in 0..=full {
            if o.query(a, b) != (hu[a as usize] & hl[b as usize] != 0) {
                return Err(Error::RoundTripFailure { a, b });
            }
        }
    }
    Ok(space)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvexPaschWitness {
    pub a0: Mask,
    pub b1: Mask,
    pub p: usize,
    pub q: usize,
    pub r: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvexPaschReport {
    pub pass: bool,
    pub witness: Option<ConvexPaschWitness>,
    /// Whether the induced ⋈ satisfies (i3).
    pub bea_pasch: bool,
    /// (i0)–(i2), (i4) and the convex Pasch property together force (i3);
    /// false would refute that.
    pub implication_holds: bool,
}

/// Sweeps `q ∈ conv_U(a0 ∪ {p})`, `r ∈ conv_L(b1 ∪ {p})` implies
/// `conv_U(a0 ∪ {r}) ∩ conv_L({q} ∪ b1) ≠ ∅` over all subsets `a0`, `b1`.
pub fn check_pasch_convex(space: &BiConvexity, caps: &Caps) -> Result<ConvexPaschReport> {
    caps.check("convex Pasch sweep", space.n, caps.convex_pasch)?;
    let n = space.n;
    let full = space.full();
    let hu = space.hull_table(Side::U);
    let hl = space.hull_table(Side::L);
    let mut best: Option<(Vec<Mask>, ConvexPaschWitness)> = None;
    for a0 in 0..=full {
        for b1 in 0..=full {
            for p in 0..n {
                let bp = mask::bit(p);
                for q in mask::members(hu[(a0 | bp) as usize]) {
                    for r in mask::members(hl[(b1 | bp) as usize]) {
                        if hu[(a0 | mask::bit(r)) as usize] & hl[(mask::bit(q) | b1) as usize] == 0 {
                            let key = vec![a0, b1, bp, mask::bit(q), mask::bit(r)];
                            if best.as_ref().is_none_or(|(k, _)| mask::witness_key(&key) < mask::witness_key(k)) {
                                best = Some((key, ConvexPaschWitness { a0, b1, p, q, r }));
                            }
                        }
                    }
                }
            }
        }
    }
    let o = bea_from_biconvexity(space, true, caps)?;
    let reports = check_axioms(&o, &[Axiom::I0, Axiom::I1, Axiom::I2, Axiom::I3, Axiom::I4], caps)?;
    let pass = |a: Axiom| reports.iter().any(|r| r.axiom == a && r.pass);
    let convex_pasch = best.is_none();
    let premises = pass(Axiom::I0) && pass(Axiom::I1) && pass(Axiom::I2) && pass(Axiom::I4) && convex_pasch;
    Ok(ConvexPaschReport {
        pass: convex_pasch,
        witness: best.map(|b| b.1),
        bea_pasch: pass(Axiom::I3),
        implication_holds: !premises || pass(Axiom::I3),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplementReport {
    pub complemented: bool,
    /// Complement of each element, if it has one.
    pub negation: Vec<Option<usize>>,
    /// A pair with `a ⋈ b` differing from `¬b ⋈ ¬a`.
    pub ae_witness: Option<(Mask, Mask)>,
}

/// Every element has a complement, and `a ⋈ b iff ¬b ⋈ ¬a`.
pub fn check_complemented_bea(o: &BeaOracle, caps: &Caps) -> Result<ComplementReport> {
    let negation = (0..o.n).map(|a| complement(o, a)).collect::<Result<Vec<_>>>()?;
    let mut ae_witness = None;
    let large = o.n > caps.axioms;
    if large && negation.iter().all(Option::is_some) {
        let Realization::Induced(h) = &o.realization else {
            return Err(Error::UniverseTooLarge { what: "complement sweep", size: o.n, cap: caps.axioms });
        };
        caps.check("complement profile sweep", h.len(), caps.axioms)?;
        let neg: Vec<usize> = negation.iter().map(|c| c.unwrap()).collect();
        ae_witness = bea::profile::negation_witness(h, &neg);
    } else if negation.iter().all(Option::is_some) {
        let neg = |s: Mask| mask::members(s).fold(0, |m, p| m | mask::bit(negation[p].unwrap()));
        'outer: for a in 0..=o.full() {
            for b in 0..=o.full() {
                if o.query(a, b) != o.query(neg(b), neg(a)) {
                    ae_witness = Some((a, b));
                    break 'outer;
                }
            }
        }
    }
    Ok(ComplementReport {
        complemented: negation.iter().all(Option::is_some) && ae_witness.is_none(),
        negation,
        ae_witness,
    })
}

pub fn check_complemented(space: &BiConvexity, caps: &Caps) -> Result<ComplementReport> {
    if space.zero.is_none() || space.one.is_none() {
        return Err(Error::MissingConstants);
    }
    check_complemented_bea(&bea_from_biconvexity(space, true, caps)?, caps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DualityVariant {
    Plain,
    Symmetric,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvexityOutcome {
    pub index: usize,
    /// The space rebuilt from its ⋈ gives back the same ⋈.
    pub round_trip: bool,
    /// The rebuilt space has the same hull operators.
    pub hulls_agree: bool,
    pub dual_i4: bool,
    pub dual_constants: bool,
    pub bidual: EvalReport,
    /// Symmetric variant only.
    pub dual_complemented: Option<bool>,
    pub second_dual_symmetric: Option<bool>,
}

impl ConvexityOutcome {
    pub fn pass(&self) -> bool {
        self.round_trip
            && self.dual_i4
            && self.dual_constants
            && self.bidual.bijective()
            && self.bidual.embedding
            && self.dual_complemented != Some(false)
            && self.second_dual_symmetric != Some(false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvexityDualityReport {
    pub pass: bool,
    pub outcomes: Vec<ConvexityOutcome>,
}

fn outcome(index: usize, space: &BiConvexity, variant: DualityVariant, caps: &Caps) -> Result<ConvexityOutcome> {
    if !check_normal(space, caps)?.normal {
        return Err(Error::NotNormal);
    }
    if !space.empty_is_convex() {
        return Err(Error::InvalidBiConvexity(format!("instance {index} does not have ∅ convex")));
    }
    if variant == DualityVariant::Symmetric && !space.is_symmetric() {
        return Err(Error::InvalidBiConvexity(format!("instance {index} is not symmetric")));
    }
    let o = bea_from_biconvexity(space, false, caps)?;
    let (round_trip, hulls_agree) = match biconvexity_from_bea(&o, caps) {
        Ok(rebuilt) => {
            let same = bea_from_biconvexity(&rebuilt, true, caps)?.same_relation(&o)?;
            let hulls = rebuilt.hull_table(Side::L) == space.hull_table(Side::L)
                && rebuilt.hull_table(Side::U) == space.hull_table(Side::U);
            (same, hulls)
        }
        Err(Error::RoundTripFailure { .. }) | Err(Error::AxiomsFail(_)) => (false, false),
        Err(e) => return Err(e),
    };
    let d = ultimate_dual(&o, caps)?;
    let mut axioms = vec![Axiom::I4];
    if d.oracle.zero.is_some() {
        axioms.push(Axiom::C0);
    }
    if d.oracle.one.is_some() {
        axioms.push(Axiom::C1);
    }
    let reports = check_axioms(&d.oracle, &axioms, caps)?;
    let dual_i4 = reports[0].pass;
    let dual_constants = d.missing_constants.is_empty() && reports[1..].iter().all(|r| r.pass);
    let bidual = bidual_bea(&o, caps)?;
    let (dual_complemented, second_dual_symmetric) = match variant {
        DualityVariant::Plain => (None, None),
        DualityVariant::Symmetric => {
            let comp = check_complemented_bea(&d.oracle, caps)?.complemented;
            let dd = ultimate_dual(&d.oracle, caps)?;
            let sym = check_axioms(&dd.oracle, &[Axiom::I5], caps)?[0].pass;
            (Some(comp), Some(sym))
        }
    };
    Ok(ConvexityOutcome {
        index,
        round_trip,
        hulls_agree,
        dual_i4,
        dual_constants,
        bidual,
        dual_complemented,
        second_dual_symmetric,
    })
}

/// For each normal instance: the ⋈ round trip, (i4) and constants on the
/// dual, and reflexivity; in the symmetric variant also complementedness
/// of the dual and symmetry of the second dual.
pub fn verify_convexity_duality(corpus: &[BiConvexity], variant: DualityVariant, caps: &Caps) -> Result<ConvexityDualityReport> {
    use rayon::prelude::*;
    let outcomes = corpus
        .par_iter()
        .enumerate()
        .map(|(i, s)| outcome(i, s, variant, caps))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvexityDualityReport {
        pass: outcomes.iter().all(ConvexityOutcome::pass),
        outcomes,
    })
}

/// L = down-sets, U = up-sets of a poset. Its ⋈ holds when some element
/// of the first set lies below some element of the second.
pub fn order_biconvexity(poset: &FiniteStructure) -> BiConvexity {
    let down = generators::downsets(poset);
    let full = mask::full(poset.size);
    let up: Vec<Mask> = down.iter().map(|&d| full & !d).collect();
    BiConvexity::new(poset.size, down, up, None, None).expect("down-sets and up-sets are convexities")
}

/// Subtree convexity of a tree given by parent links (`parent[0]` is
/// ignored; every other `parent[v] < v`). Symmetric.
pub fn tree_convexity(parent: &[usize]) -> BiConvexity {
    let n = parent.len();
    let mut sets = vec![0];
    for s in 1..=mask::full(n) {
        // Connected iff exactly one member has its parent outside.
        let roots = mask::members(s).filter(|&v| v == 0 || !mask::contains(s, parent[v])).count();
        if roots == 1 {
            sets.push(s);
        }
    }
    BiConvexity::new(n, sets.clone(), sets, None, None).expect("subtrees are a convexity")
}

/// Interval convexity of the path `0 - 1 - ... - n-1`.
pub fn chain_convexity(n: usize) -> BiConvexity {
    let parent: Vec<usize> = (0..n).map(|v| v.saturating_sub(1)).collect();
    tree_convexity(&parent)
}

pub fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    (0..n).map(|v| if v == 0 { 0 } else { rng.gen_range(0..v) }).collect()
}

/// A random pair of convexities (each the ∩-closure of a few random sets
/// plus ∅ and the whole set), kept only if normal; `None` after `tries` misses.
pub fn random_normal(n: usize, tries: usize, rng: &mut ChaCha8Rng, caps: &Caps) -> Result<Option<BiConvexity>> {
    let full = mask::full(n);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<Mask> {
        let mut s: BTreeSet<Mask> = BTreeSet::from([0, full]);
        for _ in 0..rng.gen_range(1..=2 * n) {
            s.insert(rng.gen_range(0..=full));
        }
        intersection_closure(&s).into_iter().collect()
    };
    for _ in 0..tries {
        let l = draw(rng);
        let u = draw(rng);
        let space = BiConvexity::new(n, l, u, None, None)?;
        if check_normal(&space, caps)?.normal {
            return Ok(Some(space));
        }
    }
    Ok(None)
}

/// A normal space obtained from a random family whose ⋈ satisfies (i4).
pub fn random_from_family(n_sets: usize, base: usize, rng: &mut ChaCha8Rng, caps: &Caps) -> Result<Option<BiConvexity>> {
    let family = generators::random_family(base, n_sets, rng);
    let Ok(t) = crate::model::transpose(&family) else { return Ok(None) };
    let o = bea::family_bea(&family)?;
    if t.family.len() < base || !check_axioms(&o, &[Axiom::I4], caps)?[0].pass {
        return Ok(None);
    }
    match biconvexity_from_bea(&o, caps) {
        Ok(s) if s.empty_is_convex() => Ok(Some(s)),
        Ok(_) => Ok(None),
        Err(Error::AxiomsFail(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// The plane points of [`planar_nonnormal`], in universe order.
pub const PLANAR_POINTS: [(i64, i64); 5] = [(0, 0), (2, 1), (3, 1), (3, 2), (4, 4)];

/// A square with one interior point; its convexity is normal.
pub const PLANAR_SQUARE: [(i64, i64); 5] = [(0, 0), (4, 0), (0, 4), (4, 4), (2, 1)];

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn on_segment(p: (i64, i64), a: (i64, i64), b: (i64, i64)) -> bool {
    cross(a, b, p) == 0 && p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

fn in_triangle(p: (i64, i64), a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> bool {
    let d1 = cross(a, b, p);
    let d2 = cross(b, c, p);
    let d3 = cross(c, a, p);
    let neg = d1 < 0 || d2 < 0 || d3 < 0;
    let pos = d1 > 0 || d2 > 0 || d3 > 0;
    !(neg && pos)
}

/// `p` lies in the convex hull of `pts` (exact; by Carathéodory a triangle
/// or segment of them suffices).
pub fn in_hull(p: (i64, i64), pts: &[(i64, i64)]) -> bool {
    let k = pts.len();
    for i in 0..k {
        if pts[i] == p {
            return true;
        }
        for j in i + 1..k {
            if on_segment(p, pts[i], pts[j]) {
                return true;
            }
            for l in j + 1..k {
                if in_triangle(p, pts[i], pts[j], pts[l]) {
                    return true;
                }
            }
        }
    }
    false
}

/// Traces of plane convex sets on a point set, as a symmetric space.
pub fn planar_convexity(points: &[(i64, i64)]) -> BiConvexity {
    let n = points.len();
    let sets: Vec<Mask> = (0..=mask::full(n))
        .filter(|&s| {
            let pts: Vec<_> = mask::members(s).map(|i| points[i]).collect();
            (0..n).all(|i| mask::contains(s, i) || !in_hull(points[i], &pts))
        })
        .collect();
    BiConvexity::new(n, sets.clone(), sets, None, None).expect("hull traces are a convexity")
}

/// Five plane points whose convexity is not normal.
pub fn planar_nonnormal() -> BiConvexity {
    planar_convexity(&PLANAR_POINTS)
}
