//! The ⋈ relation on pairs of subsets of a finite universe.
//!
//! `s ⋈ t` reads "every homomorphism has min over `s` at most max over `t`",
//! with min ∅ = 1 and max ∅ = 0. An oracle is either an explicit table of
//! positive pairs or the relation induced by a family of halfspaces.

mod axioms;
mod halfspace;
pub(crate) mod profile;

pub use axioms::{
    associated_order, check_axiom, check_axioms, complement, Axiom, AxiomReport, ALL_AXIOMS,
};
pub use halfspace::{all_halfspaces, all_halfspaces_brute, is_halfspace, separate};

use serde::Serialize;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::hom::enumerate_homs;
use crate::mask::{self, Mask};
use crate::model::{transpose, FiniteStructure, SetFamily, TwoTemplate};

/// Explicit tables are dense bitsets over all `4^n` pairs.
pub const TABLE_MAX: usize = 14;

/// Positive pairs `(s, t)` stored as one bit at index `s << n | t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairTable {
    n: usize,
    bits: Vec<u64>,
}

impl PairTable {
    pub fn empty(n: usize) -> Result<Self> {
        if n > TABLE_MAX {
            return Err(Error::UniverseTooLarge {
                what: "pair table",
                size: n,
                cap: TABLE_MAX,
            });
        }
        let words = (1usize << (2 * n)).div_ceil(64);
        Ok(PairTable {
            n,
            bits: vec![0; words],
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn index(&self, s: Mask, t: Mask) -> usize {
        (s as usize) << self.n | t as usize
    }

    pub fn get(&self, s: Mask, t: Mask) -> bool {
        let i = self.index(s, t);
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, s: Mask, t: Mask, value: bool) {
        let i = self.index(s, t);
        if value {
            self.bits[i / 64] |= 1 << (i % 64);
        } else {
            self.bits[i / 64] &= !(1 << (i % 64));
        }
    }

    /// Positive pairs in increasing `(s, t)` order.
    pub fn pairs(&self) -> Vec<(Mask, Mask)> {
        let n = self.n;
        let low = mask::full(n);
        let mut out = Vec::new();
        for (w, &word) in self.bits.iter().enumerate() {
            let mut word = word;
            while word != 0 {
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                let i = (w * 64 + b) as Mask;
                out.push((i >> n, i & low));
            }
        }
        out
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Realization {
    Table(PairTable),
    /// `s ⋈ t` iff no member `h` has `s ⊆ h` and `t ∩ h = ∅`.
    Induced(SetFamily),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeaOracle {
    pub n: usize,
    pub realization: Realization,
    /// Element designated as the constant 0.
    pub zero: Option<usize>,
    /// Element designated as the constant 1.
    pub one: Option<usize>,
}

impl BeaOracle {
    pub fn from_table(table: PairTable, zero: Option<usize>, one: Option<usize>) -> Result<Self> {
        let n = table.size();
        let o = BeaOracle {
            n,
            realization: Realization::Table(table),
            zero,
            one,
        };
        o.check_constants()?;
        Ok(o)
    }

    pub fn from_pairs(
        n: usize,
        pairs: &[(Mask, Mask)],
        zero: Option<usize>,
        one: Option<usize>,
    ) -> Result<Self> {
        let mut table = PairTable::empty(n)?;
        let full = mask::full(n);
        for &(s, t) in pairs {
            if s & !full != 0 || t & !full != 0 {
                return Err(Error::Parse(format!(
                    "pair ({s:#b}, {t:#b}) leaves a universe of {n} elements"
                )));
            }
            table.set(s, t, true);
        }
        Self::from_table(table, zero, one)
    }

    pub fn induced(family: SetFamily, zero: Option<usize>, one: Option<usize>) -> Result<Self> {
        let o = BeaOracle {
            n: family.base,
            realization: Realization::Induced(family),
            zero,
            one,
        };
        o.check_constants()?;
        Ok(o)
    }

    fn check_constants(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptyUniverse);
        }
        for (name, c) in [("zero", self.zero), ("one", self.one)] {
            if let Some(v) = c {
                if v >= self.n {
                    return Err(Error::ConstantOutside {
                        name: name.to_string(),
                        value: v,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn full(&self) -> Mask {
        mask::full(self.n)
    }

    /// Truth of `s ⋈ t`.
    pub fn query(&self, s: Mask, t: Mask) -> bool {
        match &self.realization {
            Realization::Table(table) => table.get(s, t),
            Realization::Induced(h) => !h.sets.iter().any(|&u| s & !u == 0 && t & u == 0),
        }
    }

    /// Some `s ⊆ sb` and `t ⊆ tb` have `s ⋈ t`.
    pub fn any_within(&self, sb: Mask, tb: Mask) -> bool {
        match &self.realization {
            // Induced relations are monotone, so the largest pair decides.
            Realization::Induced(_) => self.query(sb, tb),
            Realization::Table(table) => {
                mask::subsets(sb).any(|s| mask::subsets(tb).any(|t| table.get(s, t)))
            }
        }
    }

    /// The full table of positive pairs.
    pub fn to_table(&self) -> Result<PairTable> {
        match &self.realization {
            Realization::Table(t) => Ok(t.clone()),
            Realization::Induced(h) => {
                let mut table = PairTable::empty(self.n)?;
                for w in table.bits.iter_mut() {
                    *w = !0;
                }
                let full = self.full();
                for &u in &h.sets {
                    for s in mask::subsets(u) {
                        for t in mask::subsets(full & !u) {
                            table.set(s, t, false);
                        }
                    }
                }
                let total = 1usize << (2 * self.n);
                if !total.is_multiple_of(64) {
                    let last = table.bits.len() - 1;
                    table.bits[last] &= (1u64 << (total % 64)) - 1;
                }
                Ok(table)
            }
        }
    }

    /// A copy backed by an explicit table.
    pub fn tabulated(&self) -> Result<BeaOracle> {
        Ok(BeaOracle {
            n: self.n,
            realization: Realization::Table(self.to_table()?),
            zero: self.zero,
            one: self.one,
        })
    }

    pub fn positive_pairs(&self) -> Result<Vec<(Mask, Mask)>> {
        Ok(self.to_table()?.pairs())
    }

    /// Same universe, constants and truth value on every pair.
    pub fn same_relation(&self, other: &BeaOracle) -> Result<bool> {
        if self.n != other.n || self.zero != other.zero || self.one != other.one {
            return Ok(false);
        }
        Ok(self.to_table()? == other.to_table()?)
    }
}

/// `S ⋈ T` iff the intersection of the members indexed by `S` lies inside
/// the union of those indexed by `T`. The empty set and the full base, when
/// flagged on the family, become the constants.
pub fn family_bea(family: &SetFamily) -> Result<BeaOracle> {
    if family.is_empty() {
        return Err(Error::EmptyUniverse);
    }
    let t = transpose(family)?;
    let zero = family.zero.then(|| family.position(0)).flatten();
    let one = family.one.then(|| family.position(family.full())).flatten();
    BeaOracle::induced(t.family, zero, one)
}

/// `s ⋈ t` iff every homomorphism into `d` has min over `s` at
/// most max over `t`. Constants of `x` named `zero`/`one` are designated.
pub fn bea_from_homs(x: &FiniteStructure, d: &TwoTemplate, caps: &Caps) -> Result<BeaOracle> {
    let homs = enumerate_homs(x, d, caps)?;
    BeaOracle::induced(homs, x.constant("zero"), x.constant("one"))
}

/// The template ⟨2; ⋈⟩ with an optional selection of constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct UltimateVariant {
    pub zero: bool,
    pub one: bool,
}

impl UltimateVariant {
    pub const NAMES: &'static [&'static str] = &["ultimate", "ultimate0", "ultimate1", "ultimate01"];

    pub fn from_name(name: &str) -> Option<Self> {
        let (zero, one) = match name {
            "ultimate" => (false, false),
            "ultimate0" => (true, false),
            "ultimate1" => (false, true),
            "ultimate01" => (true, true),
            _ => return None,
        };
        Some(UltimateVariant { zero, one })
    }

    pub fn name(&self) -> &'static str {
        match (self.zero, self.one) {
            (false, false) => "ultimate",
            (true, false) => "ultimate0",
            (false, true) => "ultimate1",
            (true, true) => "ultimate01",
        }
    }

    /// The variant whose dual pairs with this one: a constant is present
    /// on the other side exactly when the opposite constant is absent here.
    pub fn partner(&self) -> Self {
        UltimateVariant {
            zero: !self.one,
            one: !self.zero,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SetFamily;

    fn chain2() -> BeaOracle {
        // Final segments of 0 < 1.
        BeaOracle::induced(SetFamily::new(2, vec![0, 0b10, 0b11], false, false).unwrap(), None, None)
            .unwrap()
    }

    #[test]
    fn chain_queries() {
        let o = chain2();
        assert!(!o.query(0b10, 0b01));
        assert!(o.query(0b01, 0b10));
        assert!(o.query(0b01, 0b01));
        assert!(!o.query(0, 0));
    }

    #[test]
    fn empty_and_full_family() {
        let o = BeaOracle::induced(SetFamily::new(1, vec![0, 1], false, false).unwrap(), None, None)
            .unwrap();
        assert!(!o.query(1, 0));
        assert!(!o.query(0, 1));
    }

    #[test]
    fn family_examples() {
        let f = SetFamily::new(2, vec![0b01, 0b10], false, false).unwrap();
        let o = family_bea(&f).unwrap();
        assert!(!o.query(0b01, 0b10));

        let f = SetFamily::new(2, vec![0, 0b01, 0b11], true, true).unwrap();
        let o = family_bea(&f).unwrap();
        assert_eq!(o.zero, Some(0));
        assert_eq!(o.one, Some(2));
        assert!(o.query(0b001, 0));

        // Powerset of {0, 1} listed as ∅, {0}, {1}, {0,1}.
        let f = SetFamily::new(2, vec![0, 0b01, 0b10, 0b11], false, false).unwrap();
        let o = family_bea(&f).unwrap();
        assert!(o.query(0b0110, 0b0001));
    }

    #[test]
    fn table_matches_queries() {
        let o = chain2();
        let t = o.tabulated().unwrap();
        for s in 0..4 {
            for u in 0..4 {
                assert_eq!(o.query(s, u), t.query(s, u));
            }
        }
        assert!(o.same_relation(&t).unwrap());
    }

    #[test]
    fn table_bits_past_the_end_are_clear() {
        let o = BeaOracle::induced(SetFamily::new(1, vec![], false, false).unwrap(), None, None)
            .unwrap();
        assert_eq!(o.to_table().unwrap().count(), 4);
    }

    #[test]
    fn variant_partners() {
        let v = |z, o| UltimateVariant { zero: z, one: o };
        assert_eq!(v(false, false).partner(), v(true, true));
        assert_eq!(v(true, false).partner(), v(true, false));
        assert_eq!(v(true, true).partner(), v(false, false));
        assert_eq!(v(false, true).partner(), v(false, true));
        for name in UltimateVariant::NAMES {
            assert_eq!(UltimateVariant::from_name(name).unwrap().name(), *name);
        }
    }
}
