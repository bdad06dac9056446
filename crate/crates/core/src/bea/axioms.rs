//! Axiom sweeps with minimal counterexamples.
//!
//! Witnesses are compared by total popcount, then lexicographically on the
//! mask vector, so every report is reproducible.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{profile, BeaOracle, PairTable, Realization};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::mask::{self, Mask};
use crate::model::{FiniteStructure, Signature, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axiom {
    /// ∅ ⋈̸ ∅.
    I0,
    /// Monotone in both arguments.
    I1,
    /// {p} ⋈ {q} and {q} ⋈ {p} iff p = q.
    I2,
    /// (a0 ∪ {p}) ⋈ b0 and a1 ⋈ (b1 ∪ {p}) imply (a0 ∪ a1) ⋈ (b0 ∪ b1).
    I3,
    /// a ⋈ b implies a ⋈ {p} and {p} ⋈ b for some p.
    I4,
    /// Symmetric.
    I5,
    /// {0} ⋈ ∅.
    C0,
    /// ∅ ⋈ {1}.
    C1,
}

pub const ALL_AXIOMS: [Axiom; 8] = [
    Axiom::I0,
    Axiom::I1,
    Axiom::I2,
    Axiom::I3,
    Axiom::I4,
    Axiom::I5,
    Axiom::C0,
    Axiom::C1,
];

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::I0 => "i0",
            Axiom::I1 => "i1",
            Axiom::I2 => "i2",
            Axiom::I3 => "i3",
            Axiom::I4 => "i4",
            Axiom::I5 => "i5",
            Axiom::C0 => "c0",
            Axiom::C1 => "c1",
        }
    }

    fn cap(self, caps: &Caps) -> usize {
        match self {
            Axiom::I1 | Axiom::I3 => caps.pasch_axioms,
            _ => caps.axioms,
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axiom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ALL_AXIOMS
            .iter()
            .copied()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown axiom `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub pass: bool,
    /// Minimal counterexample. Shapes: i0 `[∅, ∅]`; i1 `[s, t, s', t']`
    /// with `s ⋈ t`, `s' ⋈̸ t'` and one element added; i2 `[{p}, {q}]`;
    /// i3 `[a0, b0, a1, b1, {p}]`; i4 and i5 `[a, b]`; c0 `[{0}, ∅]`;
    /// c1 `[∅, {1}]`.
    pub witness: Option<Vec<Mask>>,
}

struct Best(Option<Vec<Mask>>);

impl Best {
    fn offer(&mut self, w: Vec<Mask>) {
        let better = match &self.0 {
            None => true,
            Some(cur) => mask::witness_key(&w) < mask::witness_key(cur),
        };
        if better {
            self.0 = Some(w);
        }
    }
}

/// Checks one axiom. Oracles are tabulated first, so induced oracles pay
/// `|H| 2^n` once.
pub fn check_axiom(o: &BeaOracle, axiom: Axiom, caps: &Caps) -> Result<AxiomReport> {
    Ok(check_axioms(o, &[axiom], caps)?.remove(0))
}

/// Oracles over the caps are still checked when induced by at most
/// `caps.axioms` sets, by sweeping profiles instead of subsets.
pub fn check_axioms(o: &BeaOracle, axioms: &[Axiom], caps: &Caps) -> Result<Vec<AxiomReport>> {
    for &a in axioms {
        if (a == Axiom::C0 && o.zero.is_none()) || (a == Axiom::C1 && o.one.is_none()) {
            return Err(Error::MissingConstants);
        }
    }
    let over = axioms.iter().find(|a| o.n > a.cap(caps));
    if let Some(&a) = over {
        return match &o.realization {
            Realization::Induced(h) if h.len() <= caps.axioms => Ok(profile::check(h, o.zero, o.one, axioms)),
            _ => Err(Error::UniverseTooLarge {
                what: "axiom sweep",
                size: o.n,
                cap: a.cap(caps),
            }),
        };
    }
    let table = o.to_table()?;
    let mut out = Vec::new();
    let mut monotone = None;
    for &a in axioms {
        let witness = match a {
            Axiom::I0 => table.get(0, 0).then(|| vec![0, 0]),
            Axiom::I1 => monotone_witness(&table),
            Axiom::I2 => i2_witness(&table),
            Axiom::I3 => {
                let m = *monotone.get_or_insert_with(|| monotone_witness(&table).is_none());
                pasch_witness(&table, m, caps)?
            }
            Axiom::I4 => i4_witness(&table),
            Axiom::I5 => symmetry_witness(&table),
            Axiom::C0 => {
                let z = mask::bit(o.zero.unwrap());
                (!table.get(z, 0)).then(|| vec![z, 0])
            }
            Axiom::C1 => {
                let u = mask::bit(o.one.unwrap());
                (!table.get(0, u)).then(|| vec![0, u])
            }
        };
        out.push(AxiomReport {
            axiom: a,
            pass: witness.is_none(),
            witness,
        });
    }
    Ok(out)
}

fn monotone_witness(table: &PairTable) -> Option<Vec<Mask>> {
    let n = table.size();
    let full = mask::full(n);
    let mut best = Best(None);
    for (s, t) in table.pairs() {
        for p in mask::members(full & !s) {
            let s2 = s | mask::bit(p);
            if !table.get(s2, t) {
                best.offer(vec![s, t, s2, t]);
            }
        }
        for p in mask::members(full & !t) {
            let t2 = t | mask::bit(p);
            if !table.get(s, t2) {
                best.offer(vec![s, t, s, t2]);
            }
        }
    }
    best.0
}

fn i2_witness(table: &PairTable) -> Option<Vec<Mask>> {
    let n = table.size();
    let mut best = Best(None);
    for p in 0..n {
        let bp = mask::bit(p);
        if !table.get(bp, bp) {
            best.offer(vec![bp, bp]);
        }
        for q in p + 1..n {
            let bq = mask::bit(q);
            if table.get(bp, bq) && table.get(bq, bp) {
                best.offer(vec![bp, bq]);
            }
        }
    }
    best.0
}

fn i4_witness(table: &PairTable) -> Option<Vec<Mask>> {
    let n = table.size();
    let size = 1usize << n;
    // right[s] = {p : s ⋈ {p}}, left[t] = {p : {p} ⋈ t}.
    let mut right = vec![0 as Mask; size];
    let mut left = vec![0 as Mask; size];
    for s in 0..size as Mask {
        for p in 0..n {
            if table.get(s, mask::bit(p)) {
                right[s as usize] |= mask::bit(p);
            }
            if table.get(mask::bit(p), s) {
                left[s as usize] |= mask::bit(p);
            }
        }
    }
    let mut best = Best(None);
    for (a, b) in table.pairs() {
        if right[a as usize] & left[b as usize] == 0 {
            best.offer(vec![a, b]);
        }
    }
    best.0
}

fn symmetry_witness(table: &PairTable) -> Option<Vec<Mask>> {
    let mut best = Best(None);
    for (a, b) in table.pairs() {
        if !table.get(b, a) {
            best.offer(vec![a, b]);
        }
    }
    best.0
}

/// Pairs `(s, t)` that are positive while every one-element shrink is not.
fn minimal_pairs(table: &PairTable) -> Vec<(Mask, Mask)> {
    table
        .pairs()
        .into_iter()
        .filter(|&(s, t)| {
            mask::members(s).all(|p| !table.get(s & !mask::bit(p), t))
                && mask::members(t).all(|p| !table.get(s, t & !mask::bit(p)))
        })
        .collect()
}

fn pasch_witness(table: &PairTable, monotone: bool, caps: &Caps) -> Result<Option<Vec<Mask>>> {
    let n = table.size();
    let deadline = caps.deadline();
    let mut best = Best(None);
    if monotone {
        // Under monotonicity any violation shrinks to one built from two
        // minimal positive pairs, without raising the popcount.
        let mins = minimal_pairs(table);
        for p in 0..n {
            deadline.check()?;
            let bp = mask::bit(p);
            let firsts: Vec<_> = mins.iter().filter(|m| m.0 & bp != 0).collect();
            let seconds: Vec<_> = mins.iter().filter(|m| m.1 & bp != 0).collect();
            for &&(m1, n1) in &firsts {
                for &&(m2, n2) in &seconds {
                    let (a0, b0, a1, b1) = (m1 & !bp, n1, m2, n2 & !bp);
                    if !table.get(a0 | a1, b0 | b1) {
                        best.offer(vec![a0, b0, a1, b1, bp]);
                    }
                }
            }
        }
    } else {
        let pairs = table.pairs();
        for p in 0..n {
            deadline.check()?;
            let bp = mask::bit(p);
            let firsts: Vec<_> = pairs.iter().filter(|m| m.0 & bp != 0).collect();
            let seconds: Vec<_> = pairs.iter().filter(|m| m.1 & bp != 0).collect();
            for &&(s1, b0) in &firsts {
                for a0 in [s1 & !bp, s1] {
                    for &&(a1, t2) in &seconds {
                        for b1 in [t2 & !bp, t2] {
                            if !table.get(a0 | a1, b0 | b1) {
                                best.offer(vec![a0, b0, a1, b1, bp]);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(best.0)
}

fn require_core_axioms(o: &BeaOracle, caps: &Caps) -> Result<()> {
    let reports = check_axioms(o, &[Axiom::I0, Axiom::I1, Axiom::I2, Axiom::I3], caps)?;
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.axiom.name().to_string())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::AxiomsFail(failed))
    }
}

/// `x ≤ y` iff `{x} ⋈ {y}`, as a structure with the relation `leq`.
pub fn associated_order(o: &BeaOracle, caps: &Caps) -> Result<FiniteStructure> {
    require_core_axioms(o, caps)?;
    let sig = Signature::new(vec![Symbol::relation("leq", 2)], vec![]);
    let mut out = FiniteStructure::empty_relations(sig, o.n);
    for x in 0..o.n {
        for y in 0..o.n {
            if o.query(mask::bit(x), mask::bit(y)) {
                out.add_tuple(0, vec![x, y]);
            }
        }
    }
    Ok(out)
}

/// The unique `b` with `{a, b} ⋈ {0}` and `{1} ⋈ {a, b}`, if any.
pub fn complement(o: &BeaOracle, a: usize) -> Result<Option<usize>> {
    let (Some(zero), Some(one)) = (o.zero, o.one) else {
        return Err(Error::MissingConstants);
    };
    let candidates: Vec<usize> = (0..o.n)
        .filter(|&b| {
            let ab = mask::bit(a) | mask::bit(b);
            o.query(ab, mask::bit(zero)) && o.query(mask::bit(one), ab)
        })
        .collect();
    match candidates.len() {
        0 => Ok(None),
        1 => Ok(Some(candidates[0])),
        _ => Err(Error::DuplicateComplement {
            element: a,
            candidates,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bea::family_bea;
    use crate::model::SetFamily;
    use proptest::prelude::*;

    fn caps() -> Caps {
        Caps::default()
    }

    fn report(o: &BeaOracle, a: Axiom) -> AxiomReport {
        check_axiom(o, a, &caps()).unwrap()
    }

    #[test]
    fn antisymmetry_violation() {
        let o = BeaOracle::from_pairs(2, &[(0b01, 0b10), (0b10, 0b01), (1, 1), (2, 2)], None, None)
            .unwrap();
        let r = report(&o, Axiom::I2);
        assert!(!r.pass);
        assert_eq!(r.witness, Some(vec![0b01, 0b10]));
    }

    #[test]
    fn empty_pair_violates_i0() {
        let o = BeaOracle::from_pairs(1, &[(0, 0)], None, None).unwrap();
        assert_eq!(report(&o, Axiom::I0).witness, Some(vec![0, 0]));
    }

    #[test]
    fn missing_superset_violates_i1() {
        let o = BeaOracle::from_pairs(2, &[(0b01, 0b01)], None, None).unwrap();
        let r = report(&o, Axiom::I1);
        assert_eq!(r.witness, Some(vec![0b01, 0b01, 0b01, 0b11]));
    }

    #[test]
    fn constants_need_designation() {
        let o = BeaOracle::from_pairs(1, &[], None, None).unwrap();
        assert_eq!(
            check_axiom(&o, Axiom::C0, &caps()).unwrap_err(),
            Error::MissingConstants
        );
    }

    #[test]
    fn powerset_complements() {
        // ∅, {p}, {q}, {p,q}
        let f = SetFamily::new(2, vec![0, 0b01, 0b10, 0b11], true, true).unwrap();
        let o = family_bea(&f).unwrap();
        assert_eq!(complement(&o, 1).unwrap(), Some(2));
        assert_eq!(complement(&o, 0).unwrap(), Some(3));
        assert_eq!(complement(&o, 3).unwrap(), Some(0));
        assert!(report(&o, Axiom::C0).pass && report(&o, Axiom::C1).pass);
    }

    #[test]
    fn chain_order() {
        let f = SetFamily::new(2, vec![0, 0b10, 0b11], false, false).unwrap();
        let o = BeaOracle::induced(f, None, None).unwrap();
        let ord = associated_order(&o, &caps()).unwrap();
        assert!(ord.holds(0, &[0, 1]) && !ord.holds(0, &[1, 0]));
    }

    #[test]
    fn order_requires_axioms() {
        let o = BeaOracle::from_pairs(1, &[(0, 0)], None, None).unwrap();
        assert!(matches!(associated_order(&o, &caps()), Err(Error::AxiomsFail(_))));
    }

    /// Direct definition of the Pasch axiom over all subsets, no shortcuts.
    fn pasch_brute(o: &BeaOracle) -> Option<Vec<Mask>> {
        let n = o.n;
        let all = 1u64 << n;
        let mut best = Best(None);
        for p in 0..n {
            let bp = mask::bit(p);
            for a0 in 0..all {
                for b0 in 0..all {
                    if !o.query(a0 | bp, b0) {
                        continue;
                    }
                    for a1 in 0..all {
                        for b1 in 0..all {
                            if o.query(a1, b1 | bp) && !o.query(a0 | a1, b0 | b1) {
                                best.offer(vec![a0, b0, a1, b1, bp]);
                            }
                        }
                    }
                }
            }
        }
        best.0
    }

    #[test]
    fn pasch_shortcut_matches_definition_on_corrupted_family() {
        // The 3-chain's final segments, with one positive pair removed.
        let f = SetFamily::new(3, vec![0, 0b100, 0b110, 0b111], false, false).unwrap();
        let base = BeaOracle::induced(f, None, None).unwrap();
        let mut table = base.to_table().unwrap();
        table.set(0b001, 0b100, false);
        let o = BeaOracle::from_table(table, None, None).unwrap();
        let r = report(&o, Axiom::I3);
        assert!(!r.pass);
        assert_eq!(r.witness, pasch_brute(&o));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn families_satisfy_core_axioms(sets in proptest::collection::btree_set(0u64..16, 1..6)) {
            let f = SetFamily::new(4, sets.into_iter().collect(), false, false).unwrap();
            let o = family_bea(&f).unwrap();
            let reports = check_axioms(&o, &[Axiom::I0, Axiom::I1, Axiom::I3], &caps()).unwrap();
            for r in reports {
                prop_assert!(r.pass, "{:?}", r);
            }
        }

        #[test]
        fn pasch_sweep_matches_definition(pairs in proptest::collection::vec((0u64..8, 0u64..8), 0..24)) {
            let o = BeaOracle::from_pairs(3, &pairs, None, None).unwrap();
            let r = check_axiom(&o, Axiom::I3, &caps()).unwrap();
            prop_assert_eq!(r.witness, pasch_brute(&o));
        }

        #[test]
        fn monotone_pasch_sweep_matches_definition(gens in proptest::collection::vec((0u64..8, 0u64..8), 0..6)) {
            // Upward closure of a few generating pairs.
            let mut pairs = Vec::new();
            for s in 0..8u64 {
                for t in 0..8u64 {
                    if gens.iter().any(|&(a, b)| s & a == a && t & b == b) {
                        pairs.push((s, t));
                    }
                }
            }
            let o = BeaOracle::from_pairs(3, &pairs, None, None).unwrap();
            prop_assert!(check_axiom(&o, Axiom::I1, &caps()).unwrap().pass);
            let r = check_axiom(&o, Axiom::I3, &caps()).unwrap();
            prop_assert_eq!(r.witness, pasch_brute(&o));
        }
    }
}
