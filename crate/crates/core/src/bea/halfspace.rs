//! Halfspaces: subsets whose characteristic map preserves ⋈ and the
//! constants. A set `U` qualifies iff no `s ⊆ U` and `t ⊆ X ∖ U` have
//! `s ⋈ t`.

use super::{BeaOracle, Realization};
use crate::caps::{Caps, Deadline};
use crate::error::{Error, Result};
use crate::mask::{self, Mask};
use crate::model::SetFamily;

fn constants_ok(o: &BeaOracle, u: Mask) -> bool {
    o.zero.is_none_or(|z| !mask::contains(u, z)) && o.one.is_none_or(|e| mask::contains(u, e))
}

pub fn is_halfspace(o: &BeaOracle, u: Mask) -> bool {
    constants_ok(o, u) && !o.any_within(u, o.full() & !u)
}

/// Some pair with `p` in the side it was just added to clashes.
fn clash_through(o: &BeaOracle, upper: Mask, lower: Mask, p: usize, into_upper: bool) -> bool {
    match &o.realization {
        Realization::Induced(_) => o.query(upper, lower),
        Realization::Table(table) => {
            let bp = mask::bit(p);
            if into_upper {
                mask::subsets(upper & !bp)
                    .any(|s| mask::subsets(lower).any(|t| table.get(s | bp, t)))
            } else {
                mask::subsets(lower & !bp)
                    .any(|t| mask::subsets(upper).any(|s| table.get(s, t | bp)))
            }
        }
    }
}

struct Walk<'a> {
    o: &'a BeaOracle,
    free: Vec<usize>,
    out: Vec<Mask>,
    deadline: Deadline,
    nodes: u64,
}

impl Walk<'_> {
    fn run(&mut self, i: usize, upper: Mask, lower: Mask) -> Result<()> {
        self.nodes += 1;
        if self.nodes.is_multiple_of(4096) {
            self.deadline.check()?;
        }
        if i == self.free.len() {
            self.out.push(upper);
            return Ok(());
        }
        let p = self.free[i];
        let bp = mask::bit(p);
        if !clash_through(self.o, upper, lower | bp, p, false) {
            self.run(i + 1, upper, lower | bp)?;
        }
        if !clash_through(self.o, upper | bp, lower, p, true) {
            self.run(i + 1, upper | bp, lower)?;
        }
        Ok(())
    }
}

/// Every halfspace, in increasing mask order, by backtracking over the
/// elements with clash pruning. On induced oracles every live branch
/// reaches a member, so the walk is linear in the output.
pub fn all_halfspaces(o: &BeaOracle, caps: &Caps) -> Result<SetFamily> {
    let mut upper = 0;
    let mut lower = 0;
    if let Some(z) = o.zero {
        lower |= mask::bit(z);
    }
    if let Some(e) = o.one {
        upper |= mask::bit(e);
    }
    let mut walk = Walk {
        o,
        free: (0..o.n).filter(|&p| !mask::contains(upper | lower, p)).collect(),
        out: Vec::new(),
        deadline: caps.deadline(),
        nodes: 0,
    };
    if upper & lower == 0 && !o.any_within(upper, lower) {
        walk.run(0, upper, lower)?;
    }
    let mut sets = walk.out;
    sets.sort_unstable();
    SetFamily::new(o.n, sets, false, false)
}

/// Independent oracle: tests every subset against every pair it splits.
pub fn all_halfspaces_brute(o: &BeaOracle, caps: &Caps) -> Result<SetFamily> {
    caps.check("brute-force halfspace search", o.n, caps.powerset.min(16))?;
    let full = o.full();
    let sets = (0..=full)
        .filter(|&u| {
            constants_ok(o, u)
                && mask::subsets(u).all(|s| mask::subsets(full & !u).all(|t| !o.query(s, t)))
        })
        .collect();
    SetFamily::new(o.n, sets, false, false)
}

/// A halfspace containing `a` and missing `b`, found by growing `a` to a
/// maximal set that stays clear of `b`, then growing `b` against it.
///
/// When the input breaks the Pasch axiom the two sides may fail to cover
/// the universe; that is reported as [`Error::PaschFailure`] and no set is
/// returned unless it passes [`is_halfspace`].
pub fn separate(o: &BeaOracle, a: Mask, b: Mask) -> Result<Mask> {
    let full = o.full();
    if a & !full != 0 || b & !full != 0 {
        return Err(Error::Parse("separation arguments leave the universe".into()));
    }
    if o.query(a, b) {
        return Err(Error::PreconditionViolated(format!(
            "{:?} ⋈ {:?} holds, nothing separates them",
            mask::to_indices(a),
            mask::to_indices(b)
        )));
    }
    if a & b != 0 || o.any_within(a, b) {
        return Err(Error::PaschFailure {
            stage: "init",
            point: None,
            detail: "a subset pair of the arguments is related".into(),
        });
    }
    let mut upper = a;
    for p in 0..o.n {
        if mask::contains(upper | b, p) {
            continue;
        }
        let bp = mask::bit(p);
        let clash = match &o.realization {
            Realization::Induced(_) => o.query(upper | bp, b),
            Realization::Table(t) => mask::subsets(upper).any(|s| t.get(s | bp, b)),
        };
        if !clash {
            upper |= bp;
        }
    }
    if o.any_within(upper, b) {
        return Err(Error::PaschFailure {
            stage: "lower-init",
            point: None,
            detail: format!(
                "the grown side {:?} already clashes with {:?}",
                mask::to_indices(upper),
                mask::to_indices(b)
            ),
        });
    }
    let mut lower = b;
    for p in 0..o.n {
        if mask::contains(upper | lower, p) {
            continue;
        }
        if !clash_through(o, upper, lower | mask::bit(p), p, false) {
            lower |= mask::bit(p);
        }
    }
    if upper | lower != full {
        let p = (full & !(upper | lower)).trailing_zeros() as usize;
        return Err(Error::PaschFailure {
            stage: "cover",
            point: Some(p),
            detail: format!(
                "element {p} fits neither side (upper {:?}, lower {:?})",
                mask::to_indices(upper),
                mask::to_indices(lower)
            ),
        });
    }
    if !is_halfspace(o, upper) {
        return Err(Error::PaschFailure {
            stage: "verify",
            point: None,
            detail: format!("{:?} is not a halfspace", mask::to_indices(upper)),
        });
    }
    Ok(upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bea::{check_axioms, family_bea, Axiom};
    use crate::model::SetFamily;
    use proptest::prelude::*;

    fn caps() -> Caps {
        Caps::default()
    }

    fn chain2() -> BeaOracle {
        let f = SetFamily::new(2, vec![0, 0b10, 0b11], false, false).unwrap();
        BeaOracle::induced(f, None, None).unwrap()
    }

    #[test]
    fn chain_halfspaces() {
        let o = chain2();
        assert!(is_halfspace(&o, 0b10));
        assert!(!is_halfspace(&o, 0b01));
        assert_eq!(all_halfspaces(&o, &caps()).unwrap().sets, vec![0, 0b10, 0b11]);
        let t = o.tabulated().unwrap();
        assert_eq!(all_halfspaces(&t, &caps()).unwrap().sets, vec![0, 0b10, 0b11]);
    }

    #[test]
    fn table_clash_blocks_halfspace() {
        let o = BeaOracle::from_pairs(2, &[(0b01, 0b10)], None, None).unwrap();
        assert!(!is_halfspace(&o, 0b01));
    }

    #[test]
    fn constants_restrict_halfspaces() {
        let f = SetFamily::new(2, vec![0, 0b01, 0b10, 0b11], true, true).unwrap();
        let o = family_bea(&f).unwrap();
        let hs = all_halfspaces(&o, &caps()).unwrap();
        for &u in &hs.sets {
            assert!(!mask::contains(u, 0) && mask::contains(u, 3));
        }
        assert_eq!(hs, all_halfspaces_brute(&o, &caps()).unwrap());
        assert_eq!(hs.len(), 2);
    }

    #[test]
    fn chain_separation() {
        assert_eq!(separate(&chain2(), 0b10, 0b01).unwrap(), 0b10);
    }

    #[test]
    fn related_arguments_are_rejected() {
        let o = chain2();
        assert!(matches!(separate(&o, 0b01, 0b01), Err(Error::PreconditionViolated(_))));
    }

    /// Final segments of the 3-chain with the pair ({0}, {2}) forced false:
    /// ({0} ⋈ {1} and {1} ⋈ {2} no longer give {0} ⋈ {2}).
    fn corrupted_chain3() -> BeaOracle {
        let f = SetFamily::new(3, vec![0, 0b100, 0b110, 0b111], false, false).unwrap();
        let mut table = BeaOracle::induced(f, None, None).unwrap().to_table().unwrap();
        table.set(0b001, 0b100, false);
        BeaOracle::from_table(table, None, None).unwrap()
    }

    #[test]
    fn corrupted_table_fails_loudly() {
        let o = corrupted_chain3();
        let r = check_axioms(&o, &[Axiom::I3], &caps()).unwrap();
        assert!(!r[0].pass);
        match separate(&o, 0b001, 0b100) {
            Err(Error::PaschFailure { .. }) => {}
            other => panic!("expected a Pasch failure, got {other:?}"),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        #[test]
        fn backtracking_matches_brute_force(sets in proptest::collection::vec(0u64..64, 0..10)) {
            let f = SetFamily::canonical(6, sets).unwrap();
            let o = BeaOracle::induced(f.clone(), None, None).unwrap();
            let hs = all_halfspaces(&o, &caps()).unwrap();
            prop_assert_eq!(&hs, &all_halfspaces_brute(&o, &caps()).unwrap());
            // An induced relation's halfspaces are exactly its family.
            prop_assert_eq!(hs.sets, f.sorted_sets());
        }

        #[test]
        fn table_backtracking_matches_brute_force(pairs in proptest::collection::vec((0u64..16, 0u64..16), 0..20)) {
            let o = BeaOracle::from_pairs(4, &pairs, None, None).unwrap();
            prop_assert_eq!(all_halfspaces(&o, &caps()).unwrap(), all_halfspaces_brute(&o, &caps()).unwrap());
        }

        #[test]
        fn separation_succeeds_on_families(sets in proptest::collection::vec(0u64..32, 1..8), a in 0u64..32, b in 0u64..32) {
            let f = SetFamily::canonical(5, sets).unwrap();
            let o = BeaOracle::induced(f, None, None).unwrap();
            if !o.query(a, b) {
                let u = separate(&o, a, b).unwrap();
                prop_assert!(is_halfspace(&o, u));
                prop_assert_eq!(u & a, a);
                prop_assert_eq!(u & b, 0);
            }
        }

        #[test]
        fn separation_never_returns_a_bogus_set(pairs in proptest::collection::vec((0u64..16, 0u64..16), 0..30), a in 0u64..16, b in 0u64..16) {
            let o = BeaOracle::from_pairs(4, &pairs, None, None).unwrap();
            if let Ok(u) = separate(&o, a, b) {
                prop_assert!(is_halfspace(&o, u));
                prop_assert_eq!(u & a, a);
                prop_assert_eq!(u & b, 0);
            }
        }
    }
}
