//! Axiom sweeps for induced oracles too large to tabulate. An induced ⋈
//! sees a set `s` only through its profile: the members containing `s`
//! (`up`) and the members missing it (`down`). `s ⋈ t` iff
//! `up(s) ∩ down(t) = ∅`, so sweeps run over the achievable profiles,
//! of which there are at most `2^|H|` per component.

use std::collections::HashMap;

use super::axioms::{Axiom, AxiomReport};
use crate::mask::{self, Mask};
use crate::model::SetFamily;

/// `col[x]` = indices of the members containing `x`.
pub(crate) fn columns(h: &SetFamily) -> Vec<Mask> {
    (0..h.base)
        .map(|x| {
            h.sets
                .iter()
                .enumerate()
                .filter(|(_, &s)| mask::contains(s, x))
                .fold(0, |m, (i, _)| m | mask::bit(i))
        })
        .collect()
}

fn offer(best: &mut Option<Vec<Mask>>, w: Vec<Mask>) {
    if best.as_ref().is_none_or(|b| mask::witness_key(&w) < mask::witness_key(b)) {
        *best = Some(w);
    }
}

/// Every achievable tuple `(f_0(s), …, f_{k-1}(s))` where each `f_j` is
/// the intersection over `x ∈ s` of `feat(x)[j]` (the whole index set for
/// `s = ∅`), with a smallest set realizing it.
pub(crate) fn closure(n: usize, m: usize, k: usize, feat: impl Fn(usize) -> Vec<Mask>) -> Vec<(Vec<Mask>, Mask)> {
    let mut seen: HashMap<Vec<Mask>, Mask> = HashMap::from([(vec![mask::full(m); k], 0)]);
    for x in 0..n {
        let f = feat(x);
        let grown: Vec<(Vec<Mask>, Mask)> = seen
            .iter()
            .map(|(key, &rep)| (key.iter().zip(&f).map(|(a, b)| a & b).collect(), rep | mask::bit(x)))
            .collect();
        for (key, rep) in grown {
            let slot = seen.entry(key).or_insert(rep);
            if mask::witness_key(&[rep]) < mask::witness_key(&[*slot]) {
                *slot = rep;
            }
        }
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    out.sort_unstable_by_key(|(_, rep)| mask::witness_key(&[*rep]));
    out
}

/// Checks axioms on the oracle induced by `h` over `n` points with the
/// given constants. (i1) and (i3) hold for every induced relation: a
/// member splitting `a0 ∪ a1` from `b0 ∪ b1` splits one of the premises,
/// depending on which side it puts `p`.
pub(crate) fn check(h: &SetFamily, zero: Option<usize>, one: Option<usize>, axioms: &[Axiom]) -> Vec<AxiomReport> {
    let n = h.base;
    let m = h.len();
    let full_m = mask::full(m);
    let col = columns(h);
    let related = |up: Mask, down: Mask| up & down == 0;
    let up_of = |s: Mask| mask::members(s).fold(full_m, |acc, x| acc & col[x]);
    let down_of = |t: Mask| mask::members(t).fold(full_m, |acc, x| acc & !col[x]);
    axioms
        .iter()
        .map(|&a| {
            let witness = match a {
                Axiom::I0 => (m == 0).then(|| vec![0, 0]),
                Axiom::I1 | Axiom::I3 => None,
                Axiom::I2 => {
                    let mut w = None;
                    'outer: for p in 0..n {
                        for q in p + 1..n {
                            if col[p] == col[q] {
                                w = Some(vec![mask::bit(p), mask::bit(q)]);
                                break 'outer;
                            }
                        }
                    }
                    w
                }
                Axiom::I4 => {
                    let ups = closure(n, m, 1, |x| vec![col[x]]);
                    let downs = closure(n, m, 1, |x| vec![full_m & !col[x]]);
                    let mut best = None;
                    for (p, a) in &ups {
                        for (q, b) in &downs {
                            if related(p[0], q[0]) && !col.iter().any(|&c| p[0] & !c == 0 && c & q[0] == 0) {
                                offer(&mut best, vec![*a, *b]);
                            }
                        }
                    }
                    best
                }
                Axiom::I5 => {
                    let joint = closure(n, m, 2, |x| vec![col[x], full_m & !col[x]]);
                    let mut best = None;
                    for (j1, s) in &joint {
                        for (j2, t) in &joint {
                            if related(j1[0], j2[1]) && !related(j2[0], j1[1]) {
                                offer(&mut best, vec![*s, *t]);
                            }
                        }
                    }
                    best
                }
                Axiom::C0 => {
                    let z = mask::bit(zero.expect("checked by caller"));
                    (!related(up_of(z), down_of(0))).then(|| vec![z, 0])
                }
                Axiom::C1 => {
                    let u = mask::bit(one.expect("checked by caller"));
                    (!related(up_of(0), down_of(u))).then(|| vec![0, u])
                }
            };
            AxiomReport {
                axiom: a,
                pass: witness.is_none(),
                witness,
            }
        })
        .collect()
}

/// A pair `(a, b)` with `a ⋈ b` differing from `νb ⋈ νa`, for a point
/// permutation `ν`.
pub(crate) fn negation_witness(h: &SetFamily, neg: &[usize]) -> Option<(Mask, Mask)> {
    let m = h.len();
    let full_m = mask::full(m);
    let col = columns(h);
    let joint = closure(h.base, m, 4, |x| {
        vec![col[x], full_m & !col[x], col[neg[x]], full_m & !col[neg[x]]]
    });
    let mut best: Option<Vec<Mask>> = None;
    for (j1, s) in &joint {
        for (j2, t) in &joint {
            // s ⋈ t against ¬t ⋈ ¬s.
            if (j1[0] & j2[1] == 0) != (j2[2] & j1[3] == 0) {
                offer(&mut best, vec![*s, *t]);
            }
        }
    }
    best.map(|w| (w[0], w[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bea::{check_axioms, BeaOracle, ALL_AXIOMS};
    use crate::caps::Caps;
    use crate::instances::generators;
    use proptest::prelude::*;

    fn table_result(o: &BeaOracle, axioms: &[Axiom]) -> Vec<bool> {
        check_axioms(&o.tabulated().unwrap(), axioms, &Caps::default())
            .unwrap()
            .iter()
            .map(|r| r.pass)
            .collect()
    }

    proptest! {
        #[test]
        fn profile_checks_agree_with_tables(seed in any::<u64>(), n in 1usize..7, base in 1usize..6) {
            let mut rng = generators::rng(seed);
            let f = generators::random_family(base, n, &mut rng);
            let t = crate::model::transpose(&f).unwrap().family;
            let zero = rand::Rng::gen_bool(&mut rng, 0.5).then_some(0);
            let one = rand::Rng::gen_bool(&mut rng, 0.5).then_some(t.base - 1);
            let o = BeaOracle::induced(t.clone(), zero, one).unwrap();
            let axioms: Vec<Axiom> = ALL_AXIOMS
                .iter()
                .copied()
                .filter(|a| (*a != Axiom::C0 || zero.is_some()) && (*a != Axiom::C1 || one.is_some()))
                .collect();
            let fast = check(&t, zero, one, &axioms);
            prop_assert_eq!(fast.iter().map(|r| r.pass).collect::<Vec<_>>(), table_result(&o, &axioms));
            for r in &fast {
                if let (Axiom::I4 | Axiom::I5, Some(w)) = (r.axiom, &r.witness) {
                    prop_assert!(o.query(w[0], w[1]));
                }
            }
            let neg: Vec<usize> = (0..t.base).rev().collect();
            let slow = (0..=o.full()).flat_map(|a| (0..=o.full()).map(move |b| (a, b))).find(|&(a, b)| {
                let nu = |s: Mask| mask::members(s).fold(0, |acc, x| acc | mask::bit(neg[x]));
                o.query(a, b) != o.query(nu(b), nu(a))
            });
            let fast = negation_witness(&t, &neg);
            prop_assert_eq!(fast.is_some(), slow.is_some());
        }
    }

    #[test]
    fn closure_covers_every_subset_profile() {
        let f = SetFamily::new(3, vec![0b011, 0b110], false, false).unwrap();
        let col = columns(&f);
        assert_eq!(col, vec![0b01, 0b11, 0b10]);
        let ups = closure(3, 2, 1, |x| vec![col[x]]);
        let keys: Vec<Mask> = ups.iter().map(|(k, _)| k[0]).collect();
        assert_eq!(keys.len(), 4);
        for (k, rep) in &ups {
            assert_eq!(mask::members(*rep).fold(0b11, |acc, x| acc & col[x]), k[0]);
        }
    }
}
