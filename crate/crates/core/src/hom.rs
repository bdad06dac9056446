//! Homomorphisms from finite structures into two-element templates.
//!
//! The search assigns elements in order of decreasing degree and keeps every
//! tuple generalized-arc-consistent; since the template has two elements and
//! arities are small, each tuple is revised by scanning its truth table.

use serde::Serialize;

use crate::caps::{Caps, Deadline};
use crate::error::{Error, Result};
use crate::mask::{self, Mask, MASK_BITS};
use crate::model::{next_tuple, FiniteStructure, SetFamily, TwoTemplate};

struct Constraint {
    vars: Vec<usize>,
    table: u64,
}

/// Per-element domain: bit 0 = may map to 0, bit 1 = may map to 1.
type Domain = u8;
const BOTH: Domain = 0b11;

fn compile(x: &FiniteStructure, d: &TwoTemplate) -> Result<(Vec<Constraint>, Vec<Domain>)> {
    x.ensure_valid()?;
    x.signature.ensure_same(d.signature())?;
    if x.size > MASK_BITS {
        return Err(Error::UniverseTooLarge {
            what: "hom domain",
            size: x.size,
            cap: MASK_BITS,
        });
    }
    let mut cons = Vec::new();
    for (i, sym) in x.signature.symbols.iter().enumerate() {
        let table = d.table_named(&sym.name).expect("signatures agree");
        for t in x.tuples(i) {
            cons.push(Constraint {
                vars: t.clone(),
                table,
            });
        }
    }
    let mut dom = vec![BOTH; x.size];
    for (name, &v) in x.signature.constants.iter().zip(x.constant_values()) {
        let target = d.structure.constant(name).expect("signatures agree");
        dom[v] &= 1 << target;
    }
    Ok((cons, dom))
}

/// `h` (as the preimage of 1) preserves every tuple and constant.
pub fn is_hom(x: &FiniteStructure, d: &TwoTemplate, h: Mask) -> bool {
    for (i, sym) in x.signature.symbols.iter().enumerate() {
        let Some(j) = d.signature().symbol_index(&sym.name) else {
            return false;
        };
        for t in x.tuples(i) {
            let p = t
                .iter()
                .enumerate()
                .fold(0usize, |p, (k, &e)| p | ((h >> e & 1) as usize) << k);
            if !d.accepts(j, p) {
                return false;
            }
        }
    }
    for (name, &v) in x.signature.constants.iter().zip(x.constant_values()) {
        match d.structure.constant(name) {
            Some(target) if mask::contains(h, v) == (target == 1) => {}
            _ => return false,
        }
    }
    true
}

struct Search<'a> {
    cons: &'a [Constraint],
    by_var: Vec<Vec<usize>>,
    order: Vec<usize>,
    dom: Vec<Domain>,
    trail: Vec<(usize, Domain)>,
    queue: Vec<usize>,
    out: Vec<Mask>,
    limit: usize,
    deadline: Deadline,
    nodes: u64,
}

impl<'a> Search<'a> {
    fn set(&mut self, v: usize, d: Domain) {
        if self.dom[v] != d {
            self.trail.push((v, self.dom[v]));
            self.dom[v] = d;
            self.queue.push(v);
        }
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (v, d) = self.trail.pop().unwrap();
            self.dom[v] = d;
        }
    }

    /// Narrows the domains of one tuple to supported values. False on wipe-out.
    fn revise(&mut self, c: usize) -> bool {
        let con = &self.cons[c];
        let k = con.vars.len();
        let mut support = [0 as Domain; crate::model::MAX_TEMPLATE_ARITY];
        let mut any = false;
        let mut table = con.table;
        while table != 0 {
            let p = table.trailing_zeros() as usize;
            table &= table - 1;
            let ok = (0..k).all(|i| {
                let b = p >> i & 1;
                self.dom[con.vars[i]] >> b & 1 == 1
                    && (0..i).all(|j| con.vars[j] != con.vars[i] || p >> j & 1 == b)
            });
            if ok {
                any = true;
                for (i, s) in support.iter_mut().enumerate().take(k) {
                    *s |= 1 << (p >> i & 1);
                }
            }
        }
        if !any {
            return false;
        }
        for i in 0..k {
            let v = self.cons[c].vars[i];
            let nd = self.dom[v] & support[i];
            if nd == 0 {
                return false;
            }
            self.set(v, nd);
        }
        true
    }

    fn propagate(&mut self) -> bool {
        while let Some(v) = self.queue.pop() {
            for idx in 0..self.by_var[v].len() {
                let c = self.by_var[v][idx];
                if !self.revise(c) {
                    self.queue.clear();
                    return false;
                }
            }
        }
        true
    }

    fn run(&mut self, pos: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes.is_multiple_of(4096) {
            self.deadline.check()?;
        }
        let mut pos = pos;
        while pos < self.order.len() && self.dom[self.order[pos]] != BOTH {
            pos += 1;
        }
        if pos == self.order.len() {
            let h = self
                .dom
                .iter()
                .enumerate()
                .filter(|(_, &d)| d == 0b10)
                .fold(0, |m, (i, _)| m | mask::bit(i));
            self.out.push(h);
            if self.out.len() > self.limit {
                return Err(Error::HomLimitExceeded { limit: self.limit });
            }
            return Ok(());
        }
        let v = self.order[pos];
        for val in [0b01, 0b10] {
            let mark = self.trail.len();
            self.set(v, val);
            if self.propagate() {
                self.run(pos + 1)?;
            }
            self.undo(mark);
        }
        Ok(())
    }
}

/// hom(X, D) as the family of preimages of 1, in increasing mask order.
pub fn enumerate_homs(x: &FiniteStructure, d: &TwoTemplate, caps: &Caps) -> Result<SetFamily> {
    let (cons, dom) = compile(x, d)?;
    let n = x.size;
    let mut by_var = vec![Vec::new(); n];
    for (c, con) in cons.iter().enumerate() {
        let mut vs = con.vars.clone();
        vs.sort_unstable();
        vs.dedup();
        for v in vs {
            by_var[v].push(c);
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(by_var[v].len()), v));

    let mut search = Search {
        cons: &cons,
        by_var,
        order,
        dom: vec![BOTH; n],
        trail: Vec::new(),
        queue: Vec::new(),
        out: Vec::new(),
        limit: caps.homs,
        deadline: caps.deadline(),
        nodes: 0,
    };
    let mut consistent = true;
    for (v, &d0) in dom.iter().enumerate() {
        if d0 == 0 {
            consistent = false;
        } else {
            search.set(v, d0);
        }
    }
    // Revise everything once, then propagate from whatever changed.
    if consistent {
        for c in 0..cons.len() {
            if !search.revise(c) {
                consistent = false;
                break;
            }
        }
    }
    if consistent && search.propagate() {
        search.run(0)?;
    }
    let mut homs = search.out;
    homs.sort_unstable();
    SetFamily::new(n, homs, false, false)
}

/// Independent oracle: tests all 2^n maps.
pub fn enumerate_homs_brute(
    x: &FiniteStructure,
    d: &TwoTemplate,
    caps: &Caps,
) -> Result<SetFamily> {
    x.ensure_valid()?;
    x.signature.ensure_same(d.signature())?;
    caps.check("brute-force hom domain", x.size, caps.powerset)?;
    let homs: Vec<Mask> = (0..1u64 << x.size).filter(|&h| is_hom(x, d, h)).collect();
    if homs.len() > caps.homs {
        return Err(Error::HomLimitExceeded { limit: caps.homs });
    }
    SetFamily::new(x.size, homs, false, false)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationWitness {
    pub symbol: String,
    pub tuple: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparationReport {
    pub separated: bool,
    pub hom_count: usize,
    /// Pairs of distinct points no homomorphism tells apart.
    pub collisions: Vec<(usize, usize)>,
    /// Non-tuples that every homomorphism maps into the template relation.
    pub relation_witnesses: Vec<RelationWitness>,
}

/// Decides D-separation: homomorphisms must separate points and reflect
/// every relation.
pub fn is_separated(x: &FiniteStructure, d: &TwoTemplate, caps: &Caps) -> Result<SeparationReport> {
    let homs = enumerate_homs(x, d, caps)?;
    separation_from_homs(x, d, &homs)
}

pub(crate) fn separation_from_homs(
    x: &FiniteStructure,
    d: &TwoTemplate,
    homs: &SetFamily,
) -> Result<SeparationReport> {
    let n = x.size;
    let collisions = point_collisions(homs, n);
    let mut witnesses = Vec::new();
    for (i, sym) in x.signature.symbols.iter().enumerate() {
        let j = d.signature().symbol_index(&sym.name).expect("signatures agree");
        let k = sym.arity;
        let count = n.checked_pow(k as u32).filter(|&c| c <= 1 << 22).ok_or(
            Error::UniverseTooLarge {
                what: "relation reflection sweep",
                size: n,
                cap: 1 << 22,
            },
        )?;
        let mut t = vec![0; k];
        for _ in 0..count {
            if !x.holds(i, &t) {
                let reflected = homs.sets.iter().any(|&h| {
                    let p = t
                        .iter()
                        .enumerate()
                        .fold(0usize, |p, (q, &e)| p | ((h >> e & 1) as usize) << q);
                    !d.accepts(j, p)
                });
                if !reflected {
                    witnesses.push(RelationWitness {
                        symbol: sym.name.clone(),
                        tuple: t.clone(),
                    });
                }
            }
            next_tuple(&mut t, n);
        }
    }
    Ok(SeparationReport {
        separated: collisions.is_empty() && witnesses.is_empty(),
        hom_count: homs.len(),
        collisions,
        relation_witnesses: witnesses,
    })
}

/// Pairs `x < y` that lie in exactly the same members of `homs`.
pub(crate) fn point_collisions(homs: &SetFamily, n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            if homs.sets.iter().all(|&h| mask::contains(h, x) == mask::contains(h, y)) {
                out.push((x, y));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{catalog, generators};

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn two_chain_into_order() {
        let x = generators::chain_poset(2);
        let homs = enumerate_homs(&x, &catalog::order(), &caps()).unwrap();
        assert_eq!(homs.sets, vec![0b00, 0b10, 0b11]);
    }

    #[test]
    fn antichain_into_order() {
        let x = generators::antichain_poset(2);
        let homs = enumerate_homs(&x, &catalog::order(), &caps()).unwrap();
        assert_eq!(homs.sets, vec![0, 1, 2, 3]);
    }

    #[test]
    fn three_chain_lattice_prime_filters() {
        // 0 < a < 1 labelled 0, 1, 2.
        let x = generators::chain_lattice(3);
        let homs = enumerate_homs(&x, &catalog::bounded_lattice(), &caps()).unwrap();
        assert_eq!(homs.sets, vec![0b100, 0b110]);
        let brute = enumerate_homs_brute(&x, &catalog::bounded_lattice(), &caps()).unwrap();
        assert_eq!(homs, brute);
    }

    #[test]
    fn signature_mismatch_is_an_error() {
        let x = generators::chain_poset(2);
        let err = enumerate_homs(&x, &catalog::semilattice(), &caps()).unwrap_err();
        assert!(matches!(err, Error::SignatureMismatch(_)));
    }

    #[test]
    fn hom_limit_fails_loudly() {
        let x = generators::antichain_poset(6);
        let small = Caps {
            homs: 10,
            ..Caps::default()
        };
        assert_eq!(
            enumerate_homs(&x, &catalog::order(), &small).unwrap_err(),
            Error::HomLimitExceeded { limit: 10 }
        );
    }

    #[test]
    fn chain_is_separated() {
        let r = is_separated(&generators::chain_poset(2), &catalog::order(), &caps()).unwrap();
        assert!(r.separated);
        assert_eq!(r.hom_count, 3);
    }

    #[test]
    fn duplicated_point_is_not_separated() {
        // Points 1 and 2 sit above 0 and are related to each other both ways.
        let mut x = FiniteStructure::empty_relations(catalog::order().signature().clone(), 3);
        for t in [[0, 0], [1, 1], [2, 2], [0, 1], [0, 2], [1, 2], [2, 1]] {
            x.add_tuple(0, t.to_vec());
        }
        let r = is_separated(&x, &catalog::order(), &caps()).unwrap();
        assert!(!r.separated);
        assert_eq!(r.collisions, vec![(1, 2)]);
    }

    #[test]
    fn all_zero_map_with_constant_one() {
        let x = generators::chain_lattice(2);
        let homs = enumerate_homs(&x, &catalog::bounded_lattice(), &caps()).unwrap();
        assert!(!homs.sets.contains(&0));
        assert!(!is_hom(&x, &catalog::bounded_lattice(), 0));
        let p = generators::chain_poset(3);
        assert!(is_hom(&p, &catalog::order(), 0));
    }
}
