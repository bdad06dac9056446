//! Structure generators. Random generators draw from ChaCha8 seeded with a
//! 64-bit seed (see [`PRNG_ALGORITHM`]), so corpora are reproducible.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mask::{self, Mask};
use crate::model::{next_tuple, FiniteStructure, SetFamily, Signature, TwoTemplate};

use super::catalog;

pub const PRNG_ALGORITHM: &str = "chacha8/rand_chacha-0.3/seed_from_u64";

/// Largest universe accepted by the exhaustive generators.
pub const EXHAUSTIVE_MAX: usize = 4;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn order_signature() -> Signature {
    catalog::order().signature().clone()
}

pub fn betweenness_signature() -> Signature {
    catalog::betweenness_s0().signature().clone()
}

/// A structure with the single relation `leq` given by a predicate.
pub fn poset_from_leq(n: usize, leq: impl Fn(usize, usize) -> bool) -> FiniteStructure {
    let mut s = FiniteStructure::empty_relations(order_signature(), n);
    for x in 0..n {
        for y in 0..n {
            if leq(x, y) {
                s.add_tuple(0, vec![x, y]);
            }
        }
    }
    s
}

/// `0 < 1 < ... < n-1`.
pub fn chain_poset(n: usize) -> FiniteStructure {
    poset_from_leq(n, |x, y| x <= y)
}

pub fn antichain_poset(n: usize) -> FiniteStructure {
    poset_from_leq(n, |x, y| x == y)
}

/// `n` points with no structure, for the pure-set template.
pub fn antichain_set(n: usize) -> FiniteStructure {
    FiniteStructure::empty_relations(catalog::pure_set().signature().clone(), n)
}

/// Rows `up[x] = {y : x ≤ y}` of a `leq` structure.
pub fn up_rows(poset: &FiniteStructure) -> Vec<Mask> {
    let mut up = vec![0; poset.size];
    for t in poset.tuples_named("leq").expect("an order") {
        up[t[0]] |= mask::bit(t[1]);
    }
    up
}

fn check_exhaustive(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyUniverse);
    }
    if n > EXHAUSTIVE_MAX {
        return Err(Error::TooLargeForExhaustive(format!(
            "{n} points (exhaustive generation stops at {EXHAUSTIVE_MAX})"
        )));
    }
    Ok(())
}

/// Every labelled partial order on `n` points. Point `k` is added to each
/// order on `0..k` with a strict down-set and a strict up-set that are
/// disjoint and already ordered below each other.
pub fn exhaustive_posets(n: usize) -> Result<Vec<FiniteStructure>> {
    check_exhaustive(n)?;
    // Strict up-rows.
    let mut orders: Vec<Vec<Mask>> = vec![vec![]];
    for k in 0..n {
        let mut next = Vec::new();
        for lt in &orders {
            let all = mask::full(k);
            for down in 0..=all {
                let down_closed = mask::members(down)
                    .all(|d| (0..k).all(|y| !mask::contains(lt[y], d) || mask::contains(down, y)));
                if !down_closed {
                    continue;
                }
                for up in 0..=all {
                    if up & down != 0 {
                        continue;
                    }
                    let up_closed = mask::members(up).all(|u| lt[u] & !up == 0);
                    let ordered = mask::members(down).all(|d| up & !lt[d] == 0);
                    if up_closed && ordered {
                        let mut row = lt.clone();
                        for d in mask::members(down) {
                            row[d] |= mask::bit(k);
                        }
                        row.push(up);
                        next.push(row);
                    }
                }
            }
        }
        orders = next;
    }
    Ok(orders
        .into_iter()
        .map(|lt| poset_from_leq(n, |x, y| x == y || mask::contains(lt[x], y)))
        .collect())
}

/// A random labelled partial order: a random linear extension with each
/// comparable pair kept with probability `1/2`, then transitively closed.
pub fn random_poset(n: usize, rng: &mut ChaCha8Rng) -> FiniteStructure {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut up = vec![0 as Mask; n];
    for i in 0..n {
        up[perm[i]] |= mask::bit(perm[i]);
        for j in i + 1..n {
            if rng.gen_bool(0.5) {
                up[perm[i]] |= mask::bit(perm[j]);
            }
        }
    }
    // Close in reverse linear order: later points are already closed.
    for i in (0..n).rev() {
        let x = perm[i];
        let mut row = up[x];
        for y in mask::members(up[x]) {
            row |= up[y];
        }
        up[x] = row;
    }
    poset_from_leq(n, |x, y| mask::contains(up[x], y))
}

/// Down-sets of a poset in increasing mask order.
pub fn downsets(poset: &FiniteStructure) -> Vec<Mask> {
    let up = up_rows(poset);
    (0..=mask::full(poset.size))
        .filter(|&d| mask::members(d).all(|x| (0..poset.size).all(|y| !mask::contains(up[y], x) || mask::contains(d, y))))
        .collect()
}

/// A bounded lattice structure on a family closed under ∩ and ∪ that
/// contains ∅ and the full base.
pub fn lattice_from_family(family: &SetFamily) -> Result<FiniteStructure> {
    let index = family.index_map();
    let t = catalog::bounded_lattice();
    let mut s = FiniteStructure::empty_relations(t.signature().clone(), family.len());
    let meet = s.signature.symbol_index("meet").unwrap();
    let join = s.signature.symbol_index("join").unwrap();
    for (i, &a) in family.sets.iter().enumerate() {
        for (j, &b) in family.sets.iter().enumerate() {
            let (Some(&m), Some(&u)) = (index.get(&(a & b)), index.get(&(a | b))) else {
                return Err(Error::InvalidFamily("not closed under ∩ and ∪".into()));
            };
            s.add_tuple(meet, vec![i, j, m]);
            s.add_tuple(join, vec![i, j, u]);
        }
    }
    let (Some(&z), Some(&o)) = (index.get(&0), index.get(&family.full())) else {
        return Err(Error::InvalidFamily("∅ and the full base are required".into()));
    };
    s.set_constant("zero", z);
    s.set_constant("one", o);
    Ok(s)
}

/// The distributive lattice of down-sets, elements in increasing mask order.
pub fn downset_lattice(poset: &FiniteStructure) -> FiniteStructure {
    let family = SetFamily::new(poset.size, downsets(poset), false, false).expect("distinct down-sets");
    lattice_from_family(&family).expect("down-sets are a lattice")
}

/// The `n`-element chain as a bounded lattice.
pub fn chain_lattice(n: usize) -> FiniteStructure {
    let family = SetFamily::new(n - 1, (0..n).map(mask::full).collect(), false, false)
        .expect("distinct initial segments");
    lattice_from_family(&family).expect("chains are lattices")
}

/// A meet-semilattice on an ∩-closed family, elements in family order.
pub fn semilattice_from_family(family: &SetFamily) -> Result<FiniteStructure> {
    let index = family.index_map();
    let mut s = FiniteStructure::empty_relations(catalog::semilattice().signature().clone(), family.len());
    for (i, &a) in family.sets.iter().enumerate() {
        for (j, &b) in family.sets.iter().enumerate() {
            let Some(&m) = index.get(&(a & b)) else {
                return Err(Error::InvalidFamily("not closed under ∩".into()));
            };
            s.add_tuple(0, vec![i, j, m]);
        }
    }
    Ok(s)
}

/// Adds a `zero` constant at the least element of a semilattice, if any.
pub fn with_bottom(s: &FiniteStructure) -> Option<FiniteStructure> {
    let meet = s.signature.symbol_index("meet")?;
    let bottom = (0..s.size).find(|&b| (0..s.size).all(|x| s.apply(meet, &[b, x]) == Some(b)))?;
    let t = catalog::semilattice0();
    let mut out = FiniteStructure::new(
        t.signature().clone(),
        s.size,
        vec![s.tuples(meet).to_vec()],
        vec![bottom],
    );
    out.set_constant("zero", bottom);
    Some(out)
}

/// Every labelled meet-semilattice on `n` elements, each given by the
/// family of principal down-sets of its order.
pub fn exhaustive_semilattices(n: usize) -> Result<Vec<FiniteStructure>> {
    let mut out = Vec::new();
    for p in exhaustive_posets(n)? {
        let up = up_rows(&p);
        let family: Vec<Mask> = (0..n)
            .map(|x| (0..n).filter(|&y| mask::contains(up[y], x)).fold(0, |m, y| m | mask::bit(y)))
            .collect();
        let family = SetFamily::new(n, family, false, false).expect("antisymmetric");
        if let Ok(s) = semilattice_from_family(&family) {
            out.push(s);
        }
    }
    Ok(out)
}

/// Closure of a family under pairwise intersection.
pub fn intersection_closure(sets: &BTreeSet<Mask>) -> BTreeSet<Mask> {
    let mut out = sets.clone();
    loop {
        let mut added = Vec::new();
        for &a in &out {
            for &b in &out {
                if !out.contains(&(a & b)) {
                    added.push(a & b);
                }
            }
        }
        if added.is_empty() {
            return out;
        }
        out.extend(added);
    }
}

/// A random meet-semilattice with between 1 and `n` elements.
pub fn random_semilattice(n: usize, rng: &mut ChaCha8Rng) -> FiniteStructure {
    let mut sets = BTreeSet::new();
    sets.insert(rng.gen_range(0..=mask::full(n)));
    let target = rng.gen_range(1..=n);
    for _ in 0..4 * n {
        if sets.len() >= target {
            break;
        }
        let mut trial = sets.clone();
        trial.insert(rng.gen_range(0..=mask::full(n)));
        let closed = intersection_closure(&trial);
        if closed.len() <= n {
            sets = closed;
        }
    }
    let family = SetFamily::new(n, sets.into_iter().collect(), false, false).unwrap();
    semilattice_from_family(&family).unwrap()
}

/// `size` distinct random subsets of `0..base` (fewer if the powerset is
/// smaller).
pub fn random_family(base: usize, size: usize, rng: &mut ChaCha8Rng) -> SetFamily {
    let size = size.min(1 << base.min(20));
    let mut seen = BTreeSet::new();
    let mut sets = Vec::new();
    while sets.len() < size {
        let s = rng.gen_range(0..=mask::full(base));
        if seen.insert(s) {
            sets.push(s);
        }
    }
    SetFamily::new(base, sets, false, false).unwrap()
}

/// `B(x, y, z)` iff `y` lies in every member containing `x` and `z`.
pub fn betweenness_from_convex(family: &SetFamily) -> FiniteStructure {
    let n = family.base;
    let mut s = FiniteStructure::empty_relations(betweenness_signature(), n);
    for x in 0..n {
        for z in 0..n {
            let hull = family.sets.iter().filter(|&&c| mask::contains(c, x) && mask::contains(c, z)).fold(family.full(), |acc, &c| acc & c);
            for y in mask::members(hull) {
                s.add_tuple(0, vec![x, y, z]);
            }
        }
    }
    s
}

/// `B(k, l, m)` iff `k = m` implies `l = k = m`; the convex sets are ∅,
/// the whole set and the singletons.
pub fn minimal_betweenness(n: usize) -> FiniteStructure {
    let mut s = FiniteStructure::empty_relations(betweenness_signature(), n);
    let mut t = vec![0; 3];
    loop {
        if t[0] != t[2] || (t[1] == t[0]) {
            s.add_tuple(0, t.clone());
        }
        if !next_tuple(&mut t, n) {
            break;
        }
    }
    s
}

/// Betweenness from a random ∩-closed family containing ∅, the whole set
/// and all singletons.
pub fn random_betweenness(n: usize, rng: &mut ChaCha8Rng) -> FiniteStructure {
    let mut sets: BTreeSet<Mask> = (0..n).map(mask::bit).collect();
    sets.insert(0);
    sets.insert(mask::full(n));
    for _ in 0..rng.gen_range(0..=n) {
        sets.insert(rng.gen_range(0..=mask::full(n)));
    }
    let family = SetFamily::new(n, intersection_closure(&sets).into_iter().collect(), false, false).unwrap();
    betweenness_from_convex(&family)
}

/// The subpower of `d^k` generated by the constants and a few random
/// vectors, with at most `max_size` elements. Coordinates separate it, so
/// the result is `d`-separated by construction.
pub fn random_separated(d: &TwoTemplate, max_size: usize, rng: &mut ChaCha8Rng) -> FiniteStructure {
    let k = rng.gen_range(1..=4usize);
    let coords = mask::full(k);
    let sig = d.signature().clone();
    let constant_vector = |v: usize| if v == 1 { coords } else { 0 };
    let closure = |start: &BTreeSet<Mask>| -> BTreeSet<Mask> {
        let mut out = start.clone();
        loop {
            let elems: Vec<Mask> = out.iter().copied().collect();
            let mut added = false;
            for (si, sym) in sig.symbols.iter().enumerate() {
                if !sym.functional {
                    continue;
                }
                let args = sym.arity - 1;
                let table = d.table(si);
                let mut t = vec![0; args];
                if elems.is_empty() {
                    continue;
                }
                loop {
                    let mut value = 0;
                    for c in 0..k {
                        let q = t.iter().enumerate().fold(0usize, |q, (i, &e)| q | ((elems[e] >> c & 1) as usize) << i);
                        if table >> (q | 1 << args) & 1 == 1 {
                            value |= mask::bit(c);
                        }
                    }
                    added |= out.insert(value);
                    if !next_tuple(&mut t, elems.len()) {
                        break;
                    }
                }
            }
            if !added || out.len() > max_size {
                return out;
            }
        }
    };
    let mut elems: BTreeSet<Mask> = d.structure.constant_values().iter().map(|&v| constant_vector(v)).collect();
    elems = closure(&elems);
    let target = rng.gen_range(1..=max_size);
    for _ in 0..8 * max_size {
        if elems.len() >= target {
            break;
        }
        let mut trial = elems.clone();
        trial.insert(rng.gen_range(0..=coords));
        let trial = closure(&trial);
        if trial.len() <= max_size {
            elems = trial;
        }
    }
    if elems.is_empty() {
        elems.insert(rng.gen_range(0..=coords));
    }
    let elems: Vec<Mask> = elems.into_iter().collect();
    let m = elems.len();
    let mut s = FiniteStructure::empty_relations(sig.clone(), m);
    for (si, sym) in sig.symbols.iter().enumerate() {
        let table = d.table(si);
        let mut t = vec![0; sym.arity];
        loop {
            let holds = (0..k).all(|c| {
                let p = t.iter().enumerate().fold(0usize, |p, (i, &e)| p | ((elems[e] >> c & 1) as usize) << i);
                table >> p & 1 == 1
            });
            if holds {
                s.add_tuple(si, t.clone());
            }
            if !next_tuple(&mut t, m) {
                break;
            }
        }
    }
    for (name, &v) in sig.constants.iter().zip(d.structure.constant_values()) {
        let idx = elems.iter().position(|&e| e == constant_vector(v)).unwrap();
        s.set_constant(name, idx);
    }
    s
}

/// An arbitrary structure of the signature: functional symbols get random
/// total operations, other relations random tuples.
pub fn random_structure(sig: &Signature, n: usize, rng: &mut ChaCha8Rng) -> FiniteStructure {
    let mut s = FiniteStructure::empty_relations(sig.clone(), n);
    for (si, sym) in sig.symbols.iter().enumerate() {
        if sym.functional {
            let mut t = vec![0; sym.arity - 1];
            loop {
                let mut tuple = t.clone();
                tuple.push(rng.gen_range(0..n));
                s.add_tuple(si, tuple);
                if !next_tuple(&mut t, n) {
                    break;
                }
            }
        } else {
            let density = rng.gen_range(0.05..0.6);
            let mut t = vec![0; sym.arity];
            loop {
                if rng.gen_bool(density) {
                    s.add_tuple(si, t.clone());
                }
                if !next_tuple(&mut t, n) {
                    break;
                }
            }
        }
    }
    for name in &sig.constants {
        s.set_constant(name, rng.gen_range(0..n));
    }
    s
}

/// The image of `x` under `f`, as a relational structure on `0..m`.
pub fn image_structure(x: &FiniteStructure, f: &[usize], m: usize) -> FiniteStructure {
    let mut y = FiniteStructure::empty_relations(x.signature.clone(), m);
    for i in 0..x.signature.symbols.len() {
        for t in x.tuples(i) {
            y.add_tuple(i, t.iter().map(|&v| f[v]).collect());
        }
    }
    for (name, &v) in x.signature.constants.iter().zip(x.constant_values()) {
        y.set_constant(name, f[v]);
    }
    y
}

/// A random surjection from `0..n` onto `0..m` for some `1 ≤ m ≤ n`.
pub fn random_surjection(n: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, usize) {
    let m = rng.gen_range(1..=n);
    let mut f: Vec<usize> = (0..n).map(|i| if i < m { i } else { rng.gen_range(0..m) }).collect();
    f.shuffle(rng);
    (f, m)
}
