//! Duals, second duals and evaluation maps.
//!
//! The dual of `X` is `hom(X, D)` carrying the structure induced pointwise
//! from `E^X`; the second dual is `hom(X*, E)`, and `x` evaluates to the
//! row of `X*` members containing it.

use rayon::prelude::*;
use serde::Serialize;

use crate::bea::{self, all_halfspaces, family_bea, BeaOracle, UltimateVariant};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::hom::{enumerate_homs, is_hom, is_separated, point_collisions, separation_from_homs};
use crate::mask::{self, Mask};
use crate::model::{next_tuple, FiniteStructure, SetFamily, TwoTemplate};

/// A two-element template: relational, or ⟨2; ⋈⟩ with some constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Template {
    Relational(TwoTemplate),
    Ultimate(UltimateVariant),
}

impl Template {
    pub fn by_name(name: &str) -> Option<Template> {
        if let Some(v) = UltimateVariant::from_name(name) {
            return Some(Template::Ultimate(v));
        }
        crate::instances::catalog::template(name).map(Template::Relational)
    }

    pub fn name(&self) -> &str {
        match self {
            Template::Relational(t) => &t.name,
            Template::Ultimate(v) => v.name(),
        }
    }

    fn constant_value(&self, name: &str) -> Option<usize> {
        match self {
            Template::Relational(t) => t.structure.constant(name),
            Template::Ultimate(v) => match name {
                "zero" if v.zero => Some(0),
                "one" if v.one => Some(1),
                _ => None,
            },
        }
    }

    /// The ultimate variant that pairs with this template: constant 0 is
    /// available on the dual side unless this template names 1, and dually.
    pub fn ultimate_partner(&self) -> UltimateVariant {
        match self {
            Template::Relational(t) => UltimateVariant {
                zero: !t.has_one,
                one: !t.has_zero,
            },
            Template::Ultimate(v) => v.partner(),
        }
    }
}

/// An input structure: relational, or a ⋈-oracle for the ultimate template.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Relational(FiniteStructure),
    Bea(BeaOracle),
}

impl Instance {
    pub fn size(&self) -> usize {
        match self {
            Instance::Relational(s) => s.size,
            Instance::Bea(o) => o.n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DualInduced {
    Relational(FiniteStructure),
    Bea(BeaOracle),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualStructure {
    pub source_size: usize,
    /// `hom(X, D)`; the `zero`/`one` flags mark designated constants.
    pub carrier: SetFamily,
    pub induced: DualInduced,
    /// Closure and constant failures of the carrier inside `E^X`.
    pub violations: Vec<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Sizes {
    #[serde(rename = "X")]
    pub x: usize,
    #[serde(rename = "Xstar")]
    pub xstar: usize,
    #[serde(rename = "Xbidual")]
    pub xbidual: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EvalReport {
    pub injective: bool,
    pub embedding: bool,
    pub surjective: bool,
    /// Members of `X**` that are no evaluation, as index lists into `X*`.
    pub unrepresented: Vec<Vec<usize>>,
    pub collisions: Vec<(usize, usize)>,
    pub sizes: Sizes,
}

impl EvalReport {
    pub fn bijective(&self) -> bool {
        self.injective && self.surjective
    }
}

/// Every pattern outside `table` is absent pointwise.
fn pointwise_holds(table: u64, args: &[Mask], full: Mask) -> bool {
    let k = args.len();
    (0..1usize << k).all(|p| {
        table >> p & 1 == 1 || {
            let common = args.iter().enumerate().fold(full, |acc, (i, &f)| {
                acc & if p >> i & 1 == 1 { f } else { !f }
            });
            common == 0
        }
    })
}

/// Pointwise value of a functional symbol's operation.
fn pointwise_apply(table: u64, args: &[Mask], full: Mask) -> Mask {
    let k = args.len();
    let mut out = 0;
    for q in 0..1usize << k {
        if table >> (q | 1 << k) & 1 == 1 {
            out |= args.iter().enumerate().fold(full, |acc, (i, &f)| {
                acc & if q >> i & 1 == 1 { f } else { !f }
            });
        }
    }
    out
}

const TUPLE_SWEEP_CAP: usize = 1 << 22;

fn tuple_count(m: usize, k: usize) -> Result<usize> {
    m.checked_pow(k as u32)
        .filter(|&c| c <= TUPLE_SWEEP_CAP)
        .ok_or(Error::UniverseTooLarge {
            what: "induced relation sweep",
            size: m,
            cap: TUPLE_SWEEP_CAP,
        })
}

fn induce_relational(
    carrier: &SetFamily,
    e: &TwoTemplate,
    violations: &mut Vec<String>,
) -> Result<FiniteStructure> {
    let m = carrier.len();
    let full = carrier.full();
    let index = carrier.index_map();
    let sig = e.signature().clone();
    let mut out = FiniteStructure::empty_relations(sig.clone(), m);
    for (si, sym) in sig.symbols.iter().enumerate() {
        let table = e.table(si);
        let k = sym.arity;
        if sym.functional {
            let args = k - 1;
            let count = tuple_count(m, args)?;
            let mut t = vec![0; args];
            for _ in 0..count {
                let fs: Vec<Mask> = t.iter().map(|&i| carrier.sets[i]).collect();
                let g = pointwise_apply(table, &fs, full);
                match index.get(&g) {
                    Some(&gi) => {
                        let mut tuple = t.clone();
                        tuple.push(gi);
                        out.add_tuple(si, tuple);
                    }
                    None => violations.push(format!(
                        "carrier not closed under {}: {}({}) = {:?}",
                        sym.name,
                        sym.name,
                        fs.iter()
                            .map(|&f| format!("{:?}", mask::to_indices(f)))
                            .collect::<Vec<_>>()
                            .join(", "),
                        mask::to_indices(g)
                    )),
                }
                next_tuple(&mut t, m);
            }
        } else {
            let count = tuple_count(m, k)?;
            let mut t = vec![0; k];
            for _ in 0..count {
                let fs: Vec<Mask> = t.iter().map(|&i| carrier.sets[i]).collect();
                if pointwise_holds(table, &fs, full) {
                    out.add_tuple(si, t.clone());
                }
                next_tuple(&mut t, m);
            }
        }
    }
    for name in &sig.constants {
        let v = e.structure.constant(name).expect("own constant");
        let f = if v == 1 { full } else { 0 };
        match index.get(&f) {
            Some(&i) => out.set_constant(name, i),
            None => violations.push(format!(
                "constant {name}: the constant-{v} map is not in the carrier"
            )),
        }
    }
    Ok(out)
}

/// Designates the constant maps named by `e` when they are in the carrier;
/// absent ones are reported.
fn flag_constants(mut carrier: SetFamily, e: &Template, violations: &mut Vec<String>) -> SetFamily {
    for (name, value) in [("zero", 0usize), ("one", 1usize)] {
        if e.constant_value(name) == Some(value) {
            let f = if value == 1 { carrier.full() } else { 0 };
            if carrier.position(f).is_some() {
                if value == 0 {
                    carrier.zero = true;
                } else {
                    carrier.one = true;
                }
            } else {
                violations.push(format!(
                    "constant {name}: the constant-{value} map is not in the carrier"
                ));
            }
        }
    }
    carrier
}

fn build_dual(carrier: SetFamily, n: usize, e: &Template) -> Result<DualStructure> {
    let mut violations = Vec::new();
    if carrier.is_empty() {
        return Err(Error::EmptyUniverse);
    }
    let carrier = flag_constants(carrier, e, &mut violations);
    let induced = match e {
        Template::Relational(t) => DualInduced::Relational(induce_relational(&carrier, t, &mut violations)?),
        Template::Ultimate(_) => DualInduced::Bea(family_bea(&carrier)?),
    };
    Ok(DualStructure {
        source_size: n,
        carrier,
        induced,
        violations,
    })
}

/// The dual, with closure and constant failures recorded rather than
/// raised.
pub fn dual_lenient(x: &FiniteStructure, d: &TwoTemplate, e: &Template, caps: &Caps) -> Result<DualStructure> {
    let carrier = enumerate_homs(x, d, caps)?;
    build_dual(carrier, x.size, e)
}

/// The dual of `x`; fails if the carrier is not a substructure of `E^X`.
pub fn dual(x: &FiniteStructure, d: &TwoTemplate, e: &Template, caps: &Caps) -> Result<DualStructure> {
    let ds = dual_lenient(x, d, e, caps)?;
    if !ds.violations.is_empty() {
        return Err(Error::S1Violation(ds.violations.join("; ")));
    }
    Ok(ds)
}

/// `hom(X*, E)` over the carrier's indices.
fn second_dual(ds: &DualStructure, e: &Template, caps: &Caps) -> Result<SetFamily> {
    match (&ds.induced, e) {
        (DualInduced::Relational(s), Template::Relational(t)) => enumerate_homs(s, t, caps),
        (DualInduced::Bea(o), _) => all_halfspaces(o, caps),
        _ => Err(Error::InvalidTemplate("dual kind does not match E".into())),
    }
}

fn evaluation_rows(carrier: &SetFamily, n: usize) -> Vec<Mask> {
    (0..n).map(|x| carrier.point_row(x)).collect()
}

fn compare(rows: &[Mask], bidual: &SetFamily, n: usize, embedding_ok: bool, xstar: usize) -> EvalReport {
    let mut collisions = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            if rows[x] == rows[y] {
                collisions.push((x, y));
            }
        }
    }
    let unrepresented: Vec<Vec<usize>> = bidual
        .sets
        .iter()
        .filter(|phi| !rows.contains(phi))
        .map(|&phi| mask::to_indices(phi))
        .collect();
    let injective = collisions.is_empty();
    EvalReport {
        injective,
        embedding: injective && embedding_ok,
        surjective: unrepresented.is_empty(),
        unrepresented,
        collisions,
        sizes: Sizes {
            x: n,
            xstar,
            xbidual: bidual.len(),
        },
    }
}

fn check_bidual_caps(n: usize, xstar: usize, caps: &Caps) -> Result<()> {
    caps.check("second-dual source", n, caps.bidual_x)?;
    caps.check("first dual", xstar, caps.bidual_xstar)
}

/// Builds `X**` and reports on the evaluation map `x ↦ eva_x`.
pub fn bidual_and_evaluate(x: &FiniteStructure, d: &TwoTemplate, e: &Template, caps: &Caps) -> Result<EvalReport> {
    caps.check("second-dual source", x.size, caps.bidual_x)?;
    let ds = dual(x, d, e, caps)?;
    evaluate(x, d, &ds, e, caps)
}

fn evaluate(x: &FiniteStructure, d: &TwoTemplate, ds: &DualStructure, e: &Template, caps: &Caps) -> Result<EvalReport> {
    check_bidual_caps(x.size, ds.carrier.len(), caps)?;
    let bidual = second_dual(ds, e, caps)?;
    let rows = evaluation_rows(&ds.carrier, x.size);
    // X** carries D's relations pointwise, so reflection is separation.
    let sep = separation_from_homs(x, d, &ds.carrier)?;
    Ok(compare(&rows, &bidual, x.size, sep.relation_witnesses.is_empty(), ds.carrier.len()))
}

/// The dual of a ⋈-oracle under the ultimate template: its halfspaces with
/// `S ⋈ T` iff `⋂S ⊆ ⋃T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UltimateDual {
    pub carrier: SetFamily,
    pub oracle: BeaOracle,
    /// Constants the partner variant names whose constant set is no
    /// halfspace.
    pub missing_constants: Vec<String>,
}

pub fn ultimate_dual(o: &BeaOracle, caps: &Caps) -> Result<UltimateDual> {
    use bea::Axiom;
    let mut axioms = vec![Axiom::I0, Axiom::I1, Axiom::I2, Axiom::I3];
    if o.zero.is_some() {
        axioms.push(Axiom::C0);
    }
    if o.one.is_some() {
        axioms.push(Axiom::C1);
    }
    let failed: Vec<String> = bea::check_axioms(o, &axioms, caps)?
        .into_iter()
        .filter(|r| !r.pass)
        .map(|r| r.axiom.name().to_string())
        .collect();
    if !failed.is_empty() {
        return Err(Error::AxiomsFail(failed));
    }
    let variant = UltimateVariant {
        zero: o.zero.is_some(),
        one: o.one.is_some(),
    };
    let mut violations = Vec::new();
    let carrier = flag_constants(
        all_halfspaces(o, caps)?,
        &Template::Ultimate(variant.partner()),
        &mut violations,
    );
    let oracle = family_bea(&carrier)?;
    Ok(UltimateDual {
        carrier,
        oracle,
        missing_constants: violations,
    })
}

/// Second dual of a ⋈-oracle through the ultimate template.
pub fn bidual_bea(o: &BeaOracle, caps: &Caps) -> Result<EvalReport> {
    caps.check("second-dual source", o.n, caps.bidual_x)?;
    let first = ultimate_dual(o, caps)?;
    check_bidual_caps(o.n, first.carrier.len(), caps)?;
    let bidual = all_halfspaces(&first.oracle, caps)?;
    let rows = evaluation_rows(&first.carrier, o.n);
    let embedding = reflects_bea(o, &rows, first.carrier.len());
    Ok(compare(&rows, &bidual, o.n, embedding, first.carrier.len()))
}

/// `s ⋈ t` in `o` iff the rows of `s` meet inside the rows of `t`.
fn reflects_bea(o: &BeaOracle, rows: &[Mask], m: usize) -> bool {
    let full_m = mask::full(m);
    let full = o.full();
    (0..=full).all(|s| {
        let meet = mask::members(s).fold(full_m, |acc, x| acc & rows[x]);
        (0..=full).all(|t| {
            let join = mask::members(t).fold(0, |acc, y| acc | rows[y]);
            o.query(s, t) == (meet & !join == 0)
        })
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceOutcome {
    pub index: usize,
    /// The dual is a structure of the expected class.
    pub s1: bool,
    /// `None` when the dual failed in a way that leaves no structure to map.
    pub s2: Option<bool>,
    pub counterexamples: Vec<String>,
    pub sizes: Sizes,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairReport {
    pub pass: bool,
    /// Every instance has a surjective evaluation, whatever happened to its
    /// dual's class check.
    pub s2_pass: bool,
    pub outcomes: Vec<InstanceOutcome>,
}

/// Points and ⋈ are both recovered from the halfspaces.
fn bea_separated(o: &BeaOracle, caps: &Caps) -> Result<Option<String>> {
    let hs = all_halfspaces(o, caps)?;
    let collisions = point_collisions(&hs, o.n);
    if let Some(&(x, y)) = collisions.first() {
        return Ok(Some(format!("no halfspace separates {x} and {y}")));
    }
    let rebuilt = BeaOracle::induced(hs, o.zero, o.one)?;
    if !o.same_relation(&rebuilt)? {
        return Ok(Some("⋈ differs from the relation induced by the halfspaces".into()));
    }
    Ok(None)
}

fn outcome_relational(
    index: usize,
    x: &FiniteStructure,
    d: &TwoTemplate,
    e: &Template,
    caps: &Caps,
) -> Result<InstanceOutcome> {
    let sep = is_separated(x, d, caps)?;
    if !sep.separated {
        return Err(Error::NotSeparated {
            index,
            detail: format!(
                "collisions {:?}, unreflected {:?}",
                sep.collisions,
                sep.relation_witnesses
                    .iter()
                    .map(|w| format!("{}{:?}", w.symbol, w.tuple))
                    .collect::<Vec<_>>()
            ),
        });
    }
    let ds = dual_lenient(x, d, e, caps)?;
    let mut counterexamples = ds.violations.clone();
    let s1 = ds.violations.is_empty();
    // A relational dual that is not closed has no well-defined structure
    // to map out of; a ⋈-dual only loses the missing constants.
    let structure_ok = s1 || matches!(ds.induced, DualInduced::Bea(_));
    let (s2, sizes) = if structure_ok {
        let r = evaluate(x, d, &ds, e, caps)?;
        for phi in &r.unrepresented {
            counterexamples.push(format!("no point evaluates to {phi:?}"));
        }
        (Some(r.surjective), r.sizes)
    } else {
        (
            None,
            Sizes {
                x: x.size,
                xstar: ds.carrier.len(),
                xbidual: 0,
            },
        )
    };
    Ok(InstanceOutcome {
        index,
        s1,
        s2,
        counterexamples,
        sizes,
    })
}

fn outcome_bea(index: usize, o: &BeaOracle, d: UltimateVariant, e: &Template, caps: &Caps) -> Result<InstanceOutcome> {
    if d.zero != o.zero.is_some() || d.one != o.one.is_some() {
        return Err(Error::SignatureMismatch(format!(
            "instance constants do not match template {}",
            d.name()
        )));
    }
    if let Some(detail) = bea_separated(o, caps)? {
        return Err(Error::NotSeparated { index, detail });
    }
    let Template::Ultimate(_) = e else {
        return Err(Error::InvalidTemplate(
            "a ⋈-oracle can only be dualized into an ultimate template".into(),
        ));
    };
    let mut violations = Vec::new();
    let carrier = flag_constants(all_halfspaces(o, caps)?, e, &mut violations);
    let xstar = family_bea(&carrier)?;
    check_bidual_caps(o.n, carrier.len(), caps)?;
    let bidual = all_halfspaces(&xstar, caps)?;
    let rows = evaluation_rows(&carrier, o.n);
    let r = compare(&rows, &bidual, o.n, reflects_bea(o, &rows, carrier.len()), carrier.len());
    let mut counterexamples = violations.clone();
    for phi in &r.unrepresented {
        counterexamples.push(format!("no point evaluates to {phi:?}"));
    }
    Ok(InstanceOutcome {
        index,
        s1: violations.is_empty(),
        s2: Some(r.surjective),
        counterexamples,
        sizes: r.sizes,
    })
}

/// Checks, for every instance, that the dual lies in the expected class and
/// that evaluation is onto the second dual; instances run in parallel and
/// the report keeps input order.
pub fn check_semi_dual(d: &Template, e: &Template, instances: &[Instance], caps: &Caps) -> Result<PairReport> {
    let results: Vec<Result<InstanceOutcome>> = instances
        .par_iter()
        .enumerate()
        .map(|(i, inst)| match (d, inst) {
            (Template::Relational(dt), Instance::Relational(x)) => outcome_relational(i, x, dt, e, caps),
            (Template::Ultimate(v), Instance::Bea(o)) => outcome_bea(i, o, *v, e, caps),
            _ => Err(Error::SignatureMismatch(format!(
                "instance {i} does not match template {}",
                d.name()
            ))),
        })
        .collect();
    let outcomes = results.into_iter().collect::<Result<Vec<_>>>()?;
    let s2_pass = outcomes.iter().all(|o| o.s2 == Some(true));
    Ok(PairReport {
        pass: s2_pass && outcomes.iter().all(|o| o.s1),
        s2_pass,
        outcomes,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurjectionDual {
    /// For each member of `Y*`, the index of its composite in `X*`.
    pub map: Vec<usize>,
    pub injective: bool,
    /// Relations between members of `Y*` hold iff they hold between their
    /// images in `X*`.
    pub reflects: bool,
    pub witnesses: Vec<String>,
}

impl SurjectionDual {
    pub fn embedding(&self) -> bool {
        self.injective && self.reflects
    }
}

/// Precomposition with a surjective homomorphism `f: X → Y`, mapping
/// `hom(Y, D)` into `hom(X, D)`, together with an embedding check between
/// the duals as `E`-structures.
pub fn dual_of_surjection(
    f: &[usize],
    x: &FiniteStructure,
    y: &FiniteStructure,
    d: &TwoTemplate,
    e: &Template,
    caps: &Caps,
) -> Result<SurjectionDual> {
    x.ensure_valid()?;
    y.ensure_valid()?;
    x.signature.ensure_same(&y.signature)?;
    if f.len() != x.size || f.iter().any(|&v| v >= y.size) {
        return Err(Error::NotHomomorphism("map does not go from X to Y".into()));
    }
    for (i, _) in x.signature.symbols.iter().enumerate() {
        for t in x.tuples(i) {
            let image: Vec<usize> = t.iter().map(|&v| f[v]).collect();
            if !y.holds(i, &image) {
                return Err(Error::NotHomomorphism(format!("tuple {t:?} maps to non-tuple {image:?}")));
            }
        }
    }
    for (ci, name) in x.signature.constants.iter().enumerate() {
        let xv = x.constant_values()[ci];
        if Some(f[xv]) != y.constant(name) {
            return Err(Error::NotHomomorphism(format!("constant {name} not preserved")));
        }
    }
    let mut hit = vec![false; y.size];
    for &v in f {
        hit[v] = true;
    }
    if hit.contains(&false) {
        return Err(Error::NotSurjective);
    }

    let xs = enumerate_homs(x, d, caps)?;
    let ys = enumerate_homs(y, d, caps)?;
    let xindex = xs.index_map();
    let mut map = Vec::new();
    for &g in &ys.sets {
        let pulled = (0..x.size).filter(|&v| mask::contains(g, f[v])).fold(0, |m, v| m | mask::bit(v));
        debug_assert!(is_hom(x, d, pulled));
        map.push(xindex[&pulled]);
    }
    let mut sorted = map.clone();
    sorted.sort_unstable();
    sorted.dedup();
    let injective = sorted.len() == map.len();

    let mut witnesses = Vec::new();
    match e {
        Template::Relational(et) => {
            for (si, sym) in et.signature().symbols.iter().enumerate() {
                let table = et.table(si);
                let count = tuple_count(ys.len(), sym.arity)?;
                let mut t = vec![0; sym.arity];
                for _ in 0..count {
                    let on_y: Vec<Mask> = t.iter().map(|&i| ys.sets[i]).collect();
                    let on_x: Vec<Mask> = t.iter().map(|&i| xs.sets[map[i]]).collect();
                    if pointwise_holds(table, &on_y, ys.full()) != pointwise_holds(table, &on_x, xs.full()) {
                        witnesses.push(format!("{}{:?}", sym.name, t));
                    }
                    next_tuple(&mut t, ys.len());
                }
            }
        }
        Template::Ultimate(_) => {
            let m = ys.len();
            caps.check("dual ⋈ comparison", m, bea::TABLE_MAX)?;
            let oy = family_bea(&ys)?;
            let ox = family_bea(&xs)?;
            let image = |s: Mask| mask::members(s).fold(0, |acc, i| acc | mask::bit(map[i]));
            for s in 0..=mask::full(m) {
                for t in 0..=mask::full(m) {
                    if oy.query(s, t) != ox.query(image(s), image(t)) {
                        witnesses.push(format!("{:?} vs {:?}", mask::to_indices(s), mask::to_indices(t)));
                    }
                }
            }
        }
    }
    Ok(SurjectionDual {
        map,
        injective,
        reflects: witnesses.is_empty(),
        witnesses,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub equal: bool,
    pub homs: usize,
    pub halfspaces: usize,
    pub only_homs: Vec<Mask>,
    pub only_halfspaces: Vec<Mask>,
}

/// Compares `hom(X, D)` with the halfspaces of the ⋈ that `hom(X, D)`
/// induces (min over `s` at most max over `t` for every homomorphism).
pub fn hom_equivalence(x: &FiniteStructure, d: &TwoTemplate, caps: &Caps) -> Result<EquivalenceReport> {
    let sep = is_separated(x, d, caps)?;
    if !sep.separated {
        return Err(Error::NotSeparated {
            index: 0,
            detail: format!("collisions {:?}", sep.collisions),
        });
    }
    let homs = enumerate_homs(x, d, caps)?;
    let n = x.size;
    let value = |h: Mask, v: usize| (h >> v & 1) as u8;
    let mut pairs = Vec::new();
    for s in 0..=mask::full(n) {
        for t in 0..=mask::full(n) {
            let related = homs.sets.iter().all(|&h| {
                let lo = mask::members(s).map(|v| value(h, v)).min().unwrap_or(1);
                let hi = mask::members(t).map(|v| value(h, v)).max().unwrap_or(0);
                lo <= hi
            });
            if related {
                pairs.push((s, t));
            }
        }
    }
    let oracle = BeaOracle::from_pairs(n, &pairs, None, None)?;
    let hs = all_halfspaces(&oracle, caps)?;
    let only_homs: Vec<Mask> = homs.sets.iter().copied().filter(|h| hs.position(*h).is_none()).collect();
    let only_halfspaces: Vec<Mask> = hs.sets.iter().copied().filter(|h| homs.position(*h).is_none()).collect();
    Ok(EquivalenceReport {
        equal: only_homs.is_empty() && only_halfspaces.is_empty(),
        homs: homs.len(),
        halfspaces: hs.len(),
        only_homs,
        only_halfspaces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{catalog, generators};

    fn caps() -> Caps {
        Caps::default()
    }

    fn rel(t: TwoTemplate) -> Template {
        Template::Relational(t)
    }

    #[test]
    fn chain_dual_is_three_element_lattice() {
        let x = generators::chain_poset(2);
        let ds = dual(&x, &catalog::order(), &rel(catalog::bounded_lattice()), &caps()).unwrap();
        assert_eq!(ds.carrier.sets, vec![0, 0b10, 0b11]);
        let DualInduced::Relational(s) = &ds.induced else { panic!() };
        assert!(s.validate().is_valid());
        assert_eq!(s.constant("zero"), Some(0));
        assert_eq!(s.constant("one"), Some(2));
        let meet = s.signature.symbol_index("meet").unwrap();
        assert_eq!(s.apply(meet, &[1, 2]), Some(1));
    }

    #[test]
    fn antichain_dual_is_boolean() {
        let x = generators::antichain_set(2);
        let ds = dual(&x, &catalog::pure_set(), &rel(catalog::boolean_algebra()), &caps()).unwrap();
        assert_eq!(ds.carrier.len(), 4);
        let DualInduced::Relational(s) = &ds.induced else { panic!() };
        let neg = s.signature.symbol_index("neg").unwrap();
        for i in 0..4 {
            let c = s.apply(neg, &[i]).unwrap();
            assert_eq!(ds.carrier.sets[c], !ds.carrier.sets[i] & 0b11);
        }
    }

    #[test]
    fn chain_lattice_dual_is_two_chain() {
        let x = generators::chain_lattice(3);
        let ds = dual(&x, &catalog::bounded_lattice(), &rel(catalog::order()), &caps()).unwrap();
        assert_eq!(ds.carrier.sets, vec![0b100, 0b110]);
        let DualInduced::Relational(s) = &ds.induced else { panic!() };
        assert_eq!(s.tuples(0), &[vec![0, 0], vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn lattice_into_pure_set_is_not_reflexive() {
        let x = generators::chain_lattice(3);
        let r = bidual_and_evaluate(&x, &catalog::bounded_lattice(), &rel(catalog::pure_set()), &caps()).unwrap();
        assert!(r.injective && r.embedding);
        assert!(!r.surjective);
        assert_eq!(r.sizes, Sizes { x: 3, xstar: 2, xbidual: 4 });
        // Prime filters {2} and {1,2}: nothing lies in the first only.
        assert_eq!(r.unrepresented, vec![vec![0]]);
    }

    #[test]
    fn single_point_is_reflexive() {
        let x = generators::chain_poset(1);
        let r = bidual_and_evaluate(&x, &catalog::order(), &rel(catalog::bounded_lattice()), &caps()).unwrap();
        assert!(r.bijective() && r.embedding);
    }

    #[test]
    fn missing_closure_is_an_s1_violation() {
        // 0 below 1 and 2: final segments are closed under ∩ and ∪ but not
        // under complement.
        let mut x = FiniteStructure::empty_relations(catalog::order().signature().clone(), 3);
        for t in [[0, 0], [1, 1], [2, 2], [0, 1], [0, 2]] {
            x.add_tuple(0, t.to_vec());
        }
        let err = dual(&x, &catalog::order(), &rel(catalog::boolean_algebra()), &caps()).unwrap_err();
        assert!(matches!(err, Error::S1Violation(_)));
    }

    #[test]
    fn chain_ultimate_dual() {
        let f = SetFamily::new(2, vec![0, 0b10, 0b11], false, false).unwrap();
        let o = BeaOracle::induced(f, None, None).unwrap();
        let ud = ultimate_dual(&o, &caps()).unwrap();
        assert_eq!(ud.carrier.sets, vec![0, 0b10, 0b11]);
        assert_eq!(ud.oracle.zero, Some(0));
        assert_eq!(ud.oracle.one, Some(2));
        assert!(ud.missing_constants.is_empty());
        // ⋈* is the 3-chain: S ⋈ T iff ⋂S ⊆ ⋃T.
        assert!(ud.oracle.query(0b001, 0b010));
        assert!(!ud.oracle.query(0b100, 0b010));
        let r = bidual_bea(&o, &caps()).unwrap();
        assert!(r.bijective() && r.embedding);
    }

    #[test]
    fn single_point_ultimate_dual() {
        let f = SetFamily::new(1, vec![0, 1], false, false).unwrap();
        let o = BeaOracle::induced(f, None, None).unwrap();
        let ud = ultimate_dual(&o, &caps()).unwrap();
        assert_eq!(ud.carrier.sets, vec![0, 1]);
        let r = bidual_bea(&o, &caps()).unwrap();
        assert_eq!(r.sizes.xbidual, 1);
        assert!(r.bijective());
    }

    #[test]
    fn collapse_dual_embeds() {
        let x = generators::chain_poset(2);
        let y = generators::chain_poset(1);
        let s = dual_of_surjection(&[0, 0], &x, &y, &catalog::order(), &rel(catalog::bounded_lattice()), &caps())
            .unwrap();
        // hom(point) = {∅, {pt}} lands on ∅ and X among {∅, {1}, X}.
        assert_eq!(s.map, vec![0, 2]);
        assert!(s.embedding());
    }

    #[test]
    fn identity_dual_is_identity() {
        let x = generators::chain_poset(3);
        let s = dual_of_surjection(&[0, 1, 2], &x, &x, &catalog::order(), &Template::Ultimate(UltimateVariant { zero: true, one: true }), &caps())
            .unwrap();
        assert_eq!(s.map, vec![0, 1, 2, 3]);
        assert!(s.embedding());
    }

    #[test]
    fn non_surjection_rejected() {
        let x = generators::chain_poset(1);
        let y = generators::chain_poset(2);
        let e = rel(catalog::bounded_lattice());
        assert_eq!(
            dual_of_surjection(&[0], &x, &y, &catalog::order(), &e, &caps()).unwrap_err(),
            Error::NotSurjective
        );
        let y = generators::chain_poset(2);
        let x = generators::chain_poset(2);
        assert!(matches!(
            dual_of_surjection(&[1, 0], &x, &y, &catalog::order(), &e, &caps()),
            Err(Error::NotHomomorphism(_))
        ));
    }

    #[test]
    fn minimal_betweenness_equivalence() {
        let x = generators::minimal_betweenness(4);
        let r = hom_equivalence(&x, &catalog::betweenness_s0(), &caps()).unwrap();
        assert!(r.equal);
        assert_eq!(r.homs, 6);
    }

    #[test]
    fn negative_pair_fails_on_chain() {
        let x = generators::chain_lattice(3);
        let r = check_semi_dual(
            &rel(catalog::bounded_lattice()),
            &rel(catalog::pure_set()),
            &[Instance::Relational(x)],
            &caps(),
        )
        .unwrap();
        assert!(!r.pass);
        assert_eq!(r.outcomes[0].s2, Some(false));
    }

    #[test]
    fn relabelling_keeps_bidual_size() {
        let mut x = FiniteStructure::empty_relations(catalog::order().signature().clone(), 3);
        let mut y = x.clone();
        // 0 < 1, 0 < 2 and its relabelling by 0 -> 2, 1 -> 0, 2 -> 1.
        for t in [[0, 0], [1, 1], [2, 2], [0, 1], [0, 2]] {
            x.add_tuple(0, t.to_vec());
            let p = |v: usize| [2, 0, 1][v];
            y.add_tuple(0, vec![p(t[0]), p(t[1])]);
        }
        let e = rel(catalog::bounded_lattice());
        let a = bidual_and_evaluate(&x, &catalog::order(), &e, &caps()).unwrap();
        let b = bidual_and_evaluate(&y, &catalog::order(), &e, &caps()).unwrap();
        assert_eq!(a.sizes, b.sizes);
    }
}
