//! Class-specific verification suites. Each item records what was checked
//! and every counterexample found; suites pass when all items do.

use rayon::prelude::*;
use serde::Serialize;

use super::catalog;
use super::generators::{self, up_rows, with_bottom};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::bea::{self, check_axioms, family_bea, is_halfspace, separate, Axiom, BeaOracle, PairTable, UltimateVariant};
use crate::convexity::{self, check_normal, check_pasch_convex, verify_convexity_duality, BiConvexity, DualityVariant};
use crate::caps::Caps;
use crate::dual::{bidual_and_evaluate, check_semi_dual, dual, DualInduced, Instance, Sizes, Template};
use crate::error::{Error, Result};
use crate::hom::{enumerate_homs, is_separated};
use crate::mask::{self, Mask};
use crate::model::{next_tuple, FiniteStructure, SetFamily, TwoTemplate};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ItemReport {
    pub label: String,
    pub pass: bool,
    /// The item hit a cap or the time budget; not counted as a failure.
    pub skipped: Option<String>,
    pub counterexamples: Vec<String>,
    pub sizes: Option<Sizes>,
}

impl ItemReport {
    fn new(label: String) -> Self {
        ItemReport {
            label,
            pass: true,
            skipped: None,
            counterexamples: Vec::new(),
            sizes: None,
        }
    }

    fn fail(&mut self, why: impl Into<String>) {
        self.pass = false;
        self.counterexamples.push(why.into());
    }

    /// Runs `body`, turning cap errors into a skip and other errors into a
    /// failure.
    fn run(label: String, body: impl FnOnce(&mut ItemReport) -> Result<()>) -> ItemReport {
        let mut item = ItemReport::new(label);
        match body(&mut item) {
            Ok(()) => {}
            Err(e) if e.is_cap() => {
                item.skipped = Some(e.to_string());
            }
            Err(e) => item.fail(e.to_string()),
        }
        item
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub checked: usize,
    pub skipped: usize,
    pub items: Vec<ItemReport>,
}

impl SuiteReport {
    pub fn new(suite: &str, items: Vec<ItemReport>) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            pass: items.iter().all(|i| i.pass),
            checked: items.len(),
            skipped: items.iter().filter(|i| i.skipped.is_some()).count(),
            items,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &ItemReport> {
        self.items.iter().filter(|i| !i.pass)
    }
}

fn check_eval(item: &mut ItemReport, x: &FiniteStructure, d: &TwoTemplate, e: &Template, caps: &Caps) -> Result<()> {
    let r = bidual_and_evaluate(x, d, e, caps)?;
    item.sizes = Some(r.sizes);
    if !r.injective {
        item.fail(format!("evaluation identifies {:?}", r.collisions));
    }
    if !r.embedding {
        item.fail("evaluation does not reflect relations");
    }
    for phi in &r.unrepresented {
        item.fail(format!("no point evaluates to {phi:?}"));
    }
    Ok(())
}

/// Posets against ⟨2; ≤⟩ with bounded-lattice duals, and bounded
/// distributive lattices against the bounded-lattice template with order
/// duals.
pub fn verify_priestley(posets: &[FiniteStructure], lattices: &[FiniteStructure], caps: &Caps) -> SuiteReport {
    let order = catalog::order();
    let bl = catalog::bounded_lattice();
    let mut items: Vec<ItemReport> = posets
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            ItemReport::run(format!("poset #{i} ({} points)", x.size), |item| {
                match dual(x, &order, &Template::Relational(bl.clone()), caps) {
                    Ok(ds) => {
                        if ds.carrier.position(0).is_none() || ds.carrier.position(ds.carrier.full()).is_none() {
                            item.fail("dual lacks ∅ or X");
                        }
                    }
                    Err(Error::S1Violation(w)) => item.fail(w),
                    Err(e) => return Err(e),
                }
                check_eval(item, x, &order, &Template::Relational(bl.clone()), caps)
            })
        })
        .collect();
    items.par_extend(lattices.par_iter().enumerate().map(|(i, l)| {
        ItemReport::run(format!("lattice #{i} ({} elements)", l.size), |item| {
            let ds = dual(l, &bl, &Template::Relational(order.clone()), caps)?;
            // Prime filters: ⋂S ⊆ ⋃T only when some member of S lies in
            // some member of T.
            let filters = ds.carrier.sets.clone();
            let m = filters.len();
            caps.check("prime filter comparison", m, bea::TABLE_MAX)?;
            let o = family_bea(&SetFamily::new(l.size, filters.clone(), false, false)?)?;
            for s in 0..=mask::full(m) {
                for t in 0..=mask::full(m) {
                    let nested = mask::members(s).any(|p| mask::members(t).any(|q| filters[p] & !filters[q] == 0));
                    if o.query(s, t) != nested {
                        item.fail(format!("filters {:?} vs {:?}", mask::to_indices(s), mask::to_indices(t)));
                    }
                }
            }
            check_eval(item, l, &bl, &Template::Relational(order.clone()), caps)
        })
    }));
    SuiteReport::new("priestley", items)
}

/// Every element has a complement in a bounded lattice structure.
pub fn is_boolean(l: &FiniteStructure) -> bool {
    let meet = l.signature.symbol_index("meet").unwrap();
    let join = l.signature.symbol_index("join").unwrap();
    let (zero, one) = (l.constant("zero").unwrap(), l.constant("one").unwrap());
    (0..l.size).all(|a| (0..l.size).any(|b| l.apply(meet, &[a, b]) == Some(zero) && l.apply(join, &[a, b]) == Some(one)))
}

/// Antichains against the Boolean-algebra template, and the classification
/// of bounded distributive lattices as Boolean by their dual orders.
pub fn verify_stone(sizes: &[usize], lattices: &[FiniteStructure], caps: &Caps) -> SuiteReport {
    let ps = catalog::pure_set();
    let ba = catalog::boolean_algebra();
    let mut items: Vec<ItemReport> = sizes
        .par_iter()
        .map(|&n| {
            ItemReport::run(format!("set of {n}"), |item| {
                let x = generators::antichain_set(n);
                let ds = dual(&x, &ps, &Template::Relational(ba.clone()), caps)?;
                if ds.carrier.len() != 1 << n {
                    item.fail(format!("dual has {} elements, expected {}", ds.carrier.len(), 1 << n));
                }
                let DualInduced::Relational(s) = &ds.induced else { unreachable!() };
                let neg = s.signature.symbol_index("neg").unwrap();
                for i in 0..ds.carrier.len() {
                    let c = s.apply(neg, &[i]).map(|c| ds.carrier.sets[c]);
                    if c != Some(ds.carrier.full() & !ds.carrier.sets[i]) {
                        item.fail(format!("negation of {:?} is not its complement", mask::to_indices(ds.carrier.sets[i])));
                    }
                }
                check_eval(item, &x, &ps, &Template::Relational(ba.clone()), caps)
            })
        })
        .collect();
    let order = catalog::order();
    let bl = catalog::bounded_lattice();
    items.par_extend(lattices.par_iter().enumerate().map(|(i, l)| {
        ItemReport::run(format!("lattice #{i} ({} elements)", l.size), |item| {
            let ds = dual(l, &bl, &Template::Relational(order.clone()), caps)?;
            let DualInduced::Relational(p) = &ds.induced else { unreachable!() };
            let discrete = p.tuples(0).iter().all(|t| t[0] == t[1]);
            if discrete != is_boolean(l) {
                item.fail(format!("Boolean: {}, dual order discrete: {discrete}", is_boolean(l)));
            }
            Ok(())
        })
    }));
    SuiteReport::new("stone", items)
}

/// `∅` or `{x : p ≤ x}` for `p` the meet of the set.
fn is_principal_filter(s: &FiniteStructure, f: Mask) -> bool {
    if f == 0 {
        return true;
    }
    let meet = s.signature.symbol_index("meet").unwrap();
    let p = mask::members(f).reduce(|a, b| s.apply(meet, &[a, b]).unwrap()).unwrap();
    let above = (0..s.size).filter(|&x| s.apply(meet, &[p, x]) == Some(p)).fold(0, |m, x| m | mask::bit(x));
    above == f
}

/// Semilattices against ⟨2; ∧⟩ with duals in semilattices with 0 and 1,
/// and semilattices with 0 against themselves.
pub fn verify_hms(semilattices: &[FiniteStructure], caps: &Caps) -> SuiteReport {
    let sl = catalog::semilattice();
    let sl0 = catalog::semilattice0();
    let sl01 = catalog::semilattice01();
    let items = semilattices
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            ItemReport::run(format!("semilattice #{i} ({} elements)", x.size), |item| {
                let homs = enumerate_homs(x, &sl, caps)?;
                for &h in &homs.sets {
                    if !is_principal_filter(x, h) {
                        item.fail(format!("preimage {:?} is not a principal filter", mask::to_indices(h)));
                    }
                }
                // ⋈ from the homomorphisms against "⋀s lies below some
                // element of t" (never for empty s, since ∅ is a preimage).
                let o = bea::BeaOracle::induced(homs.clone(), None, None)?;
                let meet = x.signature.symbol_index("meet").unwrap();
                let leq = |a: usize, b: usize| x.apply(meet, &[a, b]) == Some(a);
                if x.size <= 8 {
                    for s in 1..=mask::full(x.size) {
                        let m = mask::members(s).reduce(|a, b| x.apply(meet, &[a, b]).unwrap()).unwrap();
                        for t in 0..=mask::full(x.size) {
                            if o.query(s, t) != mask::members(t).any(|q| leq(m, q)) {
                                item.fail(format!("⋈ and the filter form differ on {:?}, {:?}", mask::to_indices(s), mask::to_indices(t)));
                            }
                        }
                    }
                }
                check_eval(item, x, &sl, &Template::Relational(sl01.clone()), caps)?;
                let x0 = with_bottom(x).ok_or_else(|| Error::InvalidStructure(vec!["no least element".into()]))?;
                let r = bidual_and_evaluate(&x0, &sl0, &Template::Relational(sl0.clone()), caps)?;
                if !r.bijective() || !r.embedding {
                    item.fail(format!("with 0: evaluation not an isomorphism ({:?})", r.unrepresented));
                }
                Ok(())
            })
        })
        .collect();
    SuiteReport::new("hms", items)
}

/// Axioms (1)–(3) of betweenness with a failing tuple for each.
pub fn betweenness_axioms(x: &FiniteStructure) -> Vec<String> {
    let b = |t: [usize; 3]| x.holds(0, &t);
    let n = x.size;
    let mut out = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if !b([u, u, v]) || !b([u, v, v]) {
                out.push(format!("(1) fails at ({u}, {v})"));
            }
            if u < v && b([u, v, u]) && b([v, u, v]) {
                out.push(format!("(3) fails at ({u}, {v})"));
            }
        }
    }
    let mut t = vec![0; 5];
    loop {
        let (u, v, p, q, z) = (t[0], t[1], t[2], t[3], t[4]);
        if b([u, p, v]) && b([u, q, v]) && b([p, z, q]) && !b([u, z, v]) {
            out.push(format!("(2) fails at u={u}, v={v}, x={p}, y={q}, z={z}"));
        }
        if !next_tuple(&mut t, n) {
            break;
        }
    }
    out
}

/// Axioms (1) and (2) only, which describe betweenness relations in
/// general.
fn is_betweenness_relation(x: &FiniteStructure) -> bool {
    betweenness_axioms(x).iter().all(|w| w.starts_with("(3)"))
}

#[derive(Clone, Debug)]
pub struct BetweennessCase {
    pub label: String,
    pub structure: FiniteStructure,
    /// Built by the minimal rule, so only the trivial sets are convex.
    pub minimal: bool,
}

pub fn verify_betweenness(cases: &[BetweennessCase], caps: &Caps) -> SuiteReport {
    let s0 = catalog::betweenness_s0();
    let nat = catalog::natural_betweenness();
    let items = cases
        .par_iter()
        .map(|c| {
            ItemReport::run(c.label.clone(), |item| {
                let x = &c.structure;
                let axioms = betweenness_axioms(x);
                let sep = is_separated(x, &s0, caps)?;
                if axioms.is_empty() != sep.separated {
                    item.fail(format!("axioms {:?} but separated = {}", axioms, sep.separated));
                }
                let convex = enumerate_homs(x, &s0, caps)?;
                // ∅, the singletons and the whole set, which coincide for n = 1.
                let expected = if x.size == 1 { 2 } else { x.size + 2 };
                if c.minimal && convex.len() != expected {
                    item.fail(format!("{} convex sets, expected {expected}", convex.len()));
                }
                if sep.separated {
                    for a in 0..x.size {
                        for b in 0..x.size {
                            let interval = (0..x.size).filter(|&y| x.holds(0, &[a, y, b])).fold(0, |m, y| m | mask::bit(y));
                            if convex.position(interval).is_none() {
                                item.fail(format!("[{a}, {b}] is not convex"));
                            }
                        }
                    }
                }
                if is_betweenness_relation(x) {
                    // Separation by ⟨2; B⟩ iff every non-tuple B(x, z, y)
                    // has a halfspace holding x, y and missing z.
                    let halves = enumerate_homs(x, &nat, caps)?;
                    let mut characterized = true;
                    let mut t = vec![0; 3];
                    loop {
                        let (p, z, q) = (t[0], t[1], t[2]);
                        if !x.holds(0, &[p, z, q]) && !halves.sets.iter().any(|&h| mask::contains(h, p) && mask::contains(h, q) && !mask::contains(h, z)) {
                            characterized = false;
                        }
                        if !next_tuple(&mut t, x.size) {
                            break;
                        }
                    }
                    let separated = is_separated(x, &nat, caps)?.separated;
                    if characterized != separated {
                        item.fail(format!("halfspace criterion {characterized} but natural separation {separated}"));
                    }
                }
                Ok(())
            })
        })
        .collect();
    SuiteReport::new("betweenness", items)
}

/// Minimal instances, random convex-set instances, instances generated
/// for the natural template, and fixtures violating each axiom.
pub fn betweenness_corpus(max_size: usize, samples: usize, seed: u64) -> Vec<BetweennessCase> {
    let mut cases = Vec::new();
    for n in 1..=max_size.max(1) {
        cases.push(BetweennessCase {
            label: format!("minimal n={n}"),
            structure: generators::minimal_betweenness(n),
            minimal: true,
        });
    }
    let mut rng = generators::rng(seed);
    let nat = catalog::natural_betweenness();
    for i in 0..samples {
        let n = 1 + i % max_size.max(1);
        cases.push(BetweennessCase {
            label: format!("random convex #{i}"),
            structure: generators::random_betweenness(n, &mut rng),
            minimal: false,
        });
        cases.push(BetweennessCase {
            label: format!("natural #{i}"),
            structure: generators::random_separated(&nat, max_size.min(5), &mut rng),
            minimal: false,
        });
    }
    cases.extend(betweenness_fixtures());
    cases
}

/// Structures breaking one axiom each.
pub fn betweenness_fixtures() -> Vec<BetweennessCase> {
    let mut out = Vec::new();
    // (3): B(0,1,0) and B(1,0,1) on top of the minimal relation.
    let mut x = generators::minimal_betweenness(3);
    x.add_tuple(0, vec![0, 1, 0]);
    x.add_tuple(0, vec![1, 0, 1]);
    out.push(BetweennessCase { label: "violates (3)".into(), structure: x, minimal: false });
    // (1): drop B(0,0,1).
    let m = generators::minimal_betweenness(2);
    let tuples: Vec<Vec<usize>> = m.tuples(0).iter().filter(|t| **t != [0, 0, 1]).cloned().collect();
    out.push(BetweennessCase {
        label: "violates (1)".into(),
        structure: FiniteStructure::new(m.signature.clone(), 2, vec![tuples], vec![]),
        minimal: false,
    });
    // (2): the 4-chain's intervals, but 1 is no longer between 0 and 3.
    let chain = SetFamily::new(4, (0..4u64).flat_map(|a| (a..4).map(move |b| mask::full(b as usize + 1) & !mask::full(a as usize))).chain([0]).collect(), false, false).unwrap();
    let x = generators::betweenness_from_convex(&chain);
    let tuples: Vec<Vec<usize>> = x.tuples(0).iter().filter(|t| **t != [0, 1, 3] && **t != [3, 1, 0]).cloned().collect();
    out.push(BetweennessCase {
        label: "violates (2)".into(),
        structure: FiniteStructure::new(x.signature.clone(), 4, vec![tuples], vec![]),
        minimal: false,
    });
    out
}

/// The bounded-lattice / pure-set pair on the 3-chain lattice: the second
/// dual has 4 points and evaluation is not onto.
pub fn verify_negative_control(caps: &Caps) -> SuiteReport {
    let item = ItemReport::run("3-chain lattice into pure sets".into(), |item| {
        let x = generators::chain_lattice(3);
        let r = bidual_and_evaluate(&x, &catalog::bounded_lattice(), &Template::Relational(catalog::pure_set()), caps)?;
        item.sizes = Some(r.sizes);
        if r.sizes.xbidual != 4 || r.sizes.xstar != 2 || r.surjective || r.unrepresented.is_empty() {
            item.fail(format!("expected |X*| = 2, |X**| = 4 and a missed hom, got {:?}", r));
        }
        Ok(())
    });
    SuiteReport::new("negative-control", vec![item])
}

/// For each relational template, seeded separated instances checked
/// against the ultimate template with the matching constants.
pub fn verify_ultimate(samples: usize, max_size: usize, seed: u64, caps: &Caps) -> SuiteReport {
    let mut rng = generators::rng(seed);
    let mut jobs = Vec::new();
    for t in catalog::all_relational() {
        for k in 0..samples {
            jobs.push((t.clone(), k, generators::random_separated(&t, max_size, &mut rng)));
        }
    }
    let items = jobs
        .par_iter()
        .map(|(t, k, x)| {
            let e = Template::Ultimate(Template::Relational(t.clone()).ultimate_partner());
            ItemReport::run(format!("{} #{k} ({} points)", t.name, x.size), |item| {
                let r = check_semi_dual(&Template::Relational(t.clone()), &e, &[Instance::Relational(x.clone())], caps)?;
                let o = &r.outcomes[0];
                item.sizes = Some(o.sizes);
                if o.s2 != Some(true) {
                    item.fail(format!("evaluation not onto the second dual: {:?}", o.counterexamples));
                }
                Ok(())
            })
        })
        .collect();
    SuiteReport::new("ultimate", items)
}

/// Does `u` separate `a` from `b` as a halfspace of `o`?
fn separates(o: &BeaOracle, u: Mask, a: Mask, b: Mask) -> bool {
    a & !u == 0 && b & u == 0 && is_halfspace(o, u)
}

/// Up to `per_instance` pairs `(a, b)` with `a ⋈ b` failing, drawn without
/// replacement.
fn sample_non_pairs(o: &BeaOracle, per_instance: usize, rng: &mut ChaCha8Rng) -> Vec<(Mask, Mask)> {
    let full = o.full();
    let mut all = Vec::new();
    for a in 0..=full {
        for b in 0..=full {
            if !o.query(a, b) {
                all.push((a, b));
            }
        }
    }
    all.choose_multiple(rng, per_instance).copied().collect()
}

/// Minimal positive pairs: dropping one keeps the table monotone.
fn minimal_pairs(t: &PairTable) -> Vec<(Mask, Mask)> {
    let pairs = t.pairs();
    pairs
        .iter()
        .copied()
        .filter(|&(s, t0)| {
            !mask::members(s).any(|p| pairs.binary_search(&(s & !mask::bit(p), t0)).is_ok())
                && !mask::members(t0).any(|p| pairs.binary_search(&(s, t0 & !mask::bit(p))).is_ok())
        })
        .collect()
}

/// Family-induced oracles with one minimal pair removed, kept when the
/// result violates (i3).
pub fn pasch_fixtures(count: usize, seed: u64, caps: &Caps) -> Result<Vec<BeaOracle>> {
    let mut rng = generators::rng(seed);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * count.max(1) {
            return Err(Error::Timeout);
        }
        let base = rng.gen_range(2..=5);
        let size = rng.gen_range(3..=6);
        let family = generators::random_family(base, size, &mut rng);
        let mut table = family_bea(&family)?.to_table()?;
        let candidates: Vec<_> = minimal_pairs(&table).into_iter().filter(|&(s, t)| s != 0 && t != 0).collect();
        let Some(&(s, t)) = candidates.choose(&mut rng) else { continue };
        table.set(s, t, false);
        let o = BeaOracle::from_table(table, None, None)?;
        if !check_axioms(&o, &[Axiom::I3], caps)?[0].pass {
            out.push(o);
        }
    }
    Ok(out)
}

/// Halfspace separation on random family-induced oracles, and on corrupted
/// oracles where it must either refuse or still return a true halfspace.
pub fn verify_pasch(instances: usize, max_size: usize, per_instance: usize, fixtures: usize, seed: u64, caps: &Caps) -> SuiteReport {
    let mut rng = generators::rng(seed);
    let jobs: Vec<(usize, SetFamily, u64)> = (0..instances)
        .map(|i| {
            // The oracle's universe is the family itself.
            let size = rng.gen_range(1..=max_size.max(1));
            let base = rng.gen_range(1..=max_size.max(1));
            (i, generators::random_family(base, size, &mut rng), rng.gen())
        })
        .collect();
    let mut items: Vec<ItemReport> = jobs
        .par_iter()
        .map(|(i, family, sub)| {
            ItemReport::run(format!("family #{i} ({} sets over {} points)", family.len(), family.base), |item| {
                let o = family_bea(family)?;
                let mut rng = generators::rng(*sub);
                for (a, b) in sample_non_pairs(&o, per_instance, &mut rng) {
                    match separate(&o, a, b) {
                        Ok(u) if separates(&o, u, a, b) => {}
                        Ok(u) => item.fail(format!("{:?} does not separate {:?} from {:?}", mask::to_indices(u), mask::to_indices(a), mask::to_indices(b))),
                        Err(e) => item.fail(format!("separating {:?} from {:?}: {e}", mask::to_indices(a), mask::to_indices(b))),
                    }
                }
                Ok(())
            })
        })
        .collect();
    match pasch_fixtures(fixtures, seed ^ 0x5a5a, caps) {
        Ok(fx) => items.par_extend(fx.par_iter().enumerate().map(|(i, o)| {
            ItemReport::run(format!("corrupted #{i} (n = {})", o.n), |item| {
                let i3 = check_axioms(o, &[Axiom::I3], caps)?.remove(0);
                if i3.pass {
                    item.fail("(i3) check missed the corruption");
                }
                let mut refusals = 0;
                for a in 0..=o.full() {
                    for b in 0..=o.full() {
                        if o.query(a, b) {
                            continue;
                        }
                        match separate(o, a, b) {
                            Ok(u) if separates(o, u, a, b) => {}
                            Ok(u) => item.fail(format!("bogus halfspace {:?}", mask::to_indices(u))),
                            Err(Error::PaschFailure { .. }) => refusals += 1,
                            Err(e) => return Err(e),
                        }
                    }
                }
                if i3.pass && refusals == 0 {
                    item.fail("corruption neither flagged nor refused");
                }
                Ok(())
            })
        })),
        Err(e) => {
            let mut item = ItemReport::new("corrupted fixtures".into());
            item.fail(e.to_string());
            items.push(item);
        }
    }
    SuiteReport::new("pasch", items)
}

#[derive(Clone, Debug)]
pub struct CorpusSpace {
    pub label: String,
    pub space: BiConvexity,
    /// The space rebuilt from the ⋈ must also have the same hulls. Holds
    /// when singletons are convex or the space already came from a ⋈.
    pub hulls_exact: bool,
}

impl CorpusSpace {
    fn new(label: String, space: BiConvexity, hulls_exact: bool) -> Self {
        CorpusSpace { label, space, hulls_exact }
    }
}

/// Normal spaces for the duality sweep, split into all of them and the
/// symmetric ones.
pub struct BiconvexCorpus {
    pub normal: Vec<CorpusSpace>,
    pub symmetric: Vec<CorpusSpace>,
}

/// Order convexities of every poset up to 4 points, path and random tree
/// convexities, the plane square, and seeded random normal spaces.
pub fn biconvex_corpus(max_size: usize, samples: usize, seed: u64, caps: &Caps) -> Result<BiconvexCorpus> {
    let max_size = max_size.clamp(1, 6);
    let mut normal = Vec::new();
    let mut symmetric = Vec::new();
    for (i, p) in poset_corpus(max_size.min(4))?.iter().enumerate() {
        normal.push(CorpusSpace::new(format!("poset #{i}"), convexity::order_biconvexity(p), true));
    }
    let mut rng = generators::rng(seed);
    for n in 1..=max_size {
        symmetric.push(CorpusSpace::new(format!("path n={n}"), convexity::chain_convexity(n), true));
    }
    for k in 0..samples {
        let n = 1 + k % max_size;
        let tree = convexity::random_tree(n, &mut rng);
        symmetric.push(CorpusSpace::new(format!("tree {tree:?}"), convexity::tree_convexity(&tree), true));
        if let Some(s) = convexity::random_normal(n, 50, &mut rng, caps)? {
            let item = CorpusSpace::new(format!("random #{k}"), s, false);
            if item.space.is_symmetric() {
                symmetric.push(item);
            } else {
                normal.push(item);
            }
        }
        if let Some(s) = convexity::random_from_family(rng.gen_range(1..=2 * n), n, &mut rng, caps)? {
            normal.push(CorpusSpace::new(format!("from family #{k}"), s, true));
        }
    }
    if max_size >= 5 {
        symmetric.push(CorpusSpace::new("plane square".into(), convexity::planar_convexity(&convexity::PLANAR_SQUARE), true));
    }
    normal.extend(symmetric.iter().cloned());
    Ok(BiconvexCorpus { normal, symmetric })
}

fn convexity_item(label: &str, c: &CorpusSpace, variant: DualityVariant, caps: &Caps) -> ItemReport {
    let space = &c.space;
    ItemReport::run(label.to_string(), |item| {
        let r = verify_convexity_duality(std::slice::from_ref(space), variant, caps)?;
        let o = &r.outcomes[0];
        item.sizes = Some(o.bidual.sizes);
        if !o.round_trip {
            item.fail("⋈ round trip fails");
        }
        if c.hulls_exact && !o.hulls_agree {
            item.fail("rebuilt space has different hulls");
        }
        if !o.dual_i4 {
            item.fail("dual violates (i4)");
        }
        if !o.dual_constants {
            item.fail("dual lacks its constants");
        }
        if !o.bidual.bijective() || !o.bidual.embedding {
            item.fail("evaluation is not an isomorphism");
        }
        if o.dual_complemented == Some(false) {
            item.fail("dual is not complemented");
        }
        if o.second_dual_symmetric == Some(false) {
            item.fail("second dual is not symmetric");
        }
        if space.n <= caps.convex_pasch {
            let p = check_pasch_convex(space, caps)?;
            if !p.implication_holds {
                item.fail("convex Pasch holds but (i3) fails");
            }
        }
        Ok(())
    })
}

pub fn verify_biconvex(corpus: &BiconvexCorpus, caps: &Caps) -> SuiteReport {
    let mut items: Vec<ItemReport> = corpus
        .normal
        .par_iter()
        .map(|c| convexity_item(&c.label, c, DualityVariant::Plain, caps))
        .collect();
    items.par_extend(
        corpus
            .symmetric
            .par_iter()
            .map(|c| convexity_item(&format!("{} (symmetric)", c.label), c, DualityVariant::Symmetric, caps)),
    );
    items.push(ItemReport::run("planar non-normal".into(), |item| {
        let space = convexity::planar_nonnormal();
        let normal = check_normal(&space, caps)?;
        if normal.normal {
            item.fail("planar points are normal");
        }
        let pasch = check_pasch_convex(&space, caps)?;
        if pasch.pass {
            item.fail("planar points satisfy convex Pasch");
        }
        Ok(())
    }));
    SuiteReport::new("biconvex", items)
}

/// Exhaustive corpora for the order-based suites: posets up to `max_size`
/// points and their down-set lattices.
pub fn poset_corpus(max_size: usize) -> Result<Vec<FiniteStructure>> {
    let mut out = Vec::new();
    for n in 1..=max_size.min(generators::EXHAUSTIVE_MAX) {
        out.extend(generators::exhaustive_posets(n)?);
    }
    Ok(out)
}

/// Every labelled semilattice up to `max_size` (at most 4) plus `samples`
/// random ones on up to 6 elements.
pub fn semilattice_corpus(max_size: usize, samples: usize, seed: u64) -> Result<Vec<FiniteStructure>> {
    let mut out = Vec::new();
    for n in 1..=max_size.min(generators::EXHAUSTIVE_MAX) {
        out.extend(generators::exhaustive_semilattices(n)?);
    }
    let mut rng = generators::rng(seed);
    for _ in 0..samples {
        let n = rng.gen_range(1..=6);
        out.push(generators::random_semilattice(n, &mut rng));
    }
    Ok(out)
}

/// The up-rows of a poset, for labels.
pub fn describe_poset(p: &FiniteStructure) -> String {
    format!("{:?}", up_rows(p))
}

/// An ultimate template named by its constants, for reports.
pub fn ultimate_name(v: UltimateVariant) -> &'static str {
    v.name()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn small_priestley() {
        let posets = poset_corpus(3).unwrap();
        let lattices: Vec<_> = posets.iter().map(generators::downset_lattice).collect();
        let r = verify_priestley(&posets, &lattices, &caps());
        assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn stone_small() {
        let lattices: Vec<_> = poset_corpus(3).unwrap().iter().map(generators::downset_lattice).collect();
        let r = verify_stone(&[1, 2, 3], &lattices, &caps());
        assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
        assert!(!is_boolean(&generators::chain_lattice(3)));
        assert!(is_boolean(&generators::downset_lattice(&generators::antichain_poset(2))));
    }

    #[test]
    fn hms_small() {
        let r = verify_hms(&semilattice_corpus(3, 10, 1).unwrap(), &caps());
        assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn hms_three_element_dual() {
        // a, b and their meet ⊥.
        let f = SetFamily::new(2, vec![0b01, 0b10, 0], false, false).unwrap();
        let x = generators::semilattice_from_family(&f).unwrap();
        let homs = enumerate_homs(&x, &catalog::semilattice(), &caps()).unwrap();
        assert_eq!(homs.len(), 4);
    }

    #[test]
    fn betweenness_suite() {
        let r = verify_betweenness(&betweenness_corpus(4, 6, 2), &caps());
        assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn betweenness_fixture_witnesses() {
        let fx = betweenness_fixtures();
        let s0 = catalog::betweenness_s0();
        let r = is_separated(&fx[0].structure, &s0, &caps()).unwrap();
        assert!(!r.separated);
        assert_eq!(r.collisions, vec![(0, 1)]);
        assert!(betweenness_axioms(&fx[0].structure).contains(&"(3) fails at (0, 1)".to_string()));
        for f in &fx {
            assert!(!betweenness_axioms(&f.structure).is_empty(), "{}", f.label);
            assert!(!is_separated(&f.structure, &s0, &caps()).unwrap().separated, "{}", f.label);
        }
    }

    #[test]
    fn negative_control_passes() {
        assert!(verify_negative_control(&caps()).pass);
    }

    #[test]
    fn pasch_small() {
        let r = verify_pasch(40, 6, 20, 5, 3, &caps());
        assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(r.checked, 45);
    }

    #[test]
    fn biconvex_small() {
        let corpus = biconvex_corpus(4, 8, 5, &caps()).unwrap();
        assert!(!corpus.symmetric.is_empty());
        let r = verify_biconvex(&corpus, &caps());
        assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn ultimate_small() {
        let r = verify_ultimate(3, 4, 9, &caps());
        assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
    }
}
