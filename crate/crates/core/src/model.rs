//! Finite relational structures, two-element templates and set families.
//!
//! Operations are never first-class: an `(k+1)`-ary functional symbol is the
//! graph of a total `k`-ary operation, and closure under it is a property the
//! engines check.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::mask::{self, Mask, MASK_BITS};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
    /// The relation is the graph of a total `(arity - 1)`-ary operation.
    pub functional: bool,
}

impl Symbol {
    pub fn relation(name: &str, arity: usize) -> Self {
        Symbol {
            name: name.to_string(),
            arity,
            functional: false,
        }
    }

    /// Graph of an operation taking `args` arguments.
    pub fn operation(name: &str, args: usize) -> Self {
        Symbol {
            name: name.to_string(),
            arity: args + 1,
            functional: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub symbols: Vec<Symbol>,
    pub constants: Vec<String>,
}

impl Signature {
    pub fn new(symbols: Vec<Symbol>, constants: Vec<&str>) -> Self {
        Signature {
            symbols,
            constants: constants.into_iter().map(str::to_string).collect(),
        }
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|c| c == name)
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for s in &self.symbols {
            if !seen.insert(&s.name) {
                out.push(format!("duplicate symbol `{}`", s.name));
            }
            if s.arity == 0 {
                out.push(format!("symbol `{}` has arity 0", s.name));
            }
        }
        let mut seen = BTreeSet::new();
        for c in &self.constants {
            if !seen.insert(c) {
                out.push(format!("duplicate constant `{c}`"));
            }
        }
        out
    }

    /// Checks that `other` names the same symbols (same arity and kind) and
    /// the same constants, in any order.
    pub fn ensure_same(&self, other: &Signature) -> Result<()> {
        let mine: BTreeMap<_, _> = self
            .symbols
            .iter()
            .map(|s| (&s.name, (s.arity, s.functional)))
            .collect();
        let theirs: BTreeMap<_, _> = other
            .symbols
            .iter()
            .map(|s| (&s.name, (s.arity, s.functional)))
            .collect();
        if mine != theirs {
            return Err(Error::SignatureMismatch(format!(
                "symbols {:?} vs {:?}",
                mine.keys().collect::<Vec<_>>(),
                theirs.keys().collect::<Vec<_>>()
            )));
        }
        let a: BTreeSet<_> = self.constants.iter().collect();
        let b: BTreeSet<_> = other.constants.iter().collect();
        if a != b {
            return Err(Error::SignatureMismatch(format!(
                "constants {a:?} vs {b:?}"
            )));
        }
        Ok(())
    }
}

/// A finite structure on the universe `0..size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteStructure {
    pub signature: Signature,
    pub size: usize,
    /// Tuples per symbol (same order as `signature.symbols`), sorted and
    /// deduplicated.
    relations: Vec<Vec<Vec<usize>>>,
    /// Values per constant (same order as `signature.constants`).
    constants: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl FiniteStructure {
    /// Stores the parts as given. Nothing is checked here; see
    /// [`FiniteStructure::validate`].
    pub fn new(
        signature: Signature,
        size: usize,
        relations: Vec<Vec<Vec<usize>>>,
        constants: Vec<usize>,
    ) -> Self {
        let relations = relations
            .into_iter()
            .map(|mut r| {
                r.sort();
                r.dedup();
                r
            })
            .collect();
        FiniteStructure {
            signature,
            size,
            relations,
            constants,
        }
    }

    /// A structure with the given signature and no tuples; constants at 0.
    pub fn empty_relations(signature: Signature, size: usize) -> Self {
        let r = vec![Vec::new(); signature.symbols.len()];
        let c = vec![0; signature.constants.len()];
        FiniteStructure::new(signature, size, r, c)
    }

    pub fn tuples(&self, symbol: usize) -> &[Vec<usize>] {
        &self.relations[symbol]
    }

    pub fn tuples_named(&self, name: &str) -> Option<&[Vec<usize>]> {
        self.signature.symbol_index(name).map(|i| self.tuples(i))
    }

    pub fn holds(&self, symbol: usize, tuple: &[usize]) -> bool {
        self.relations[symbol]
            .binary_search_by(|t| t.as_slice().cmp(tuple))
            .is_ok()
    }

    pub fn constant_values(&self) -> &[usize] {
        &self.constants
    }

    pub fn constant(&self, name: &str) -> Option<usize> {
        self.signature
            .constant_index(name)
            .map(|i| self.constants[i])
    }

    pub fn set_constant(&mut self, name: &str, value: usize) {
        if let Some(i) = self.signature.constant_index(name) {
            self.constants[i] = value;
        }
    }

    pub fn add_tuple(&mut self, symbol: usize, tuple: Vec<usize>) {
        let rel = &mut self.relations[symbol];
        if let Err(pos) = rel.binary_search(&tuple) {
            rel.insert(pos, tuple);
        }
    }

    /// Result of the operation behind a functional symbol, if defined.
    pub fn apply(&self, symbol: usize, args: &[usize]) -> Option<usize> {
        let rel = &self.relations[symbol];
        let start = rel.partition_point(|t| t[..args.len()] < *args);
        rel.get(start)
            .filter(|t| t[..args.len()] == *args)
            .map(|t| t[args.len()])
    }

    /// Number of tuples each element occurs in (counting multiplicity once
    /// per tuple).
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.size];
        for rel in &self.relations {
            for t in rel {
                let mut seen: Vec<usize> = t.clone();
                seen.sort_unstable();
                seen.dedup();
                for x in seen {
                    if x < self.size {
                        deg[x] += 1;
                    }
                }
            }
        }
        deg
    }

    pub fn validate(&self) -> ValidationReport {
        let mut v = self.signature.violations();
        if self.size == 0 {
            v.push("empty universe".to_string());
        }
        if self.relations.len() != self.signature.symbols.len() {
            v.push("relation count does not match signature".to_string());
            return ValidationReport { violations: v };
        }
        if self.constants.len() != self.signature.constants.len() {
            v.push("constant count does not match signature".to_string());
            return ValidationReport { violations: v };
        }
        for (name, &value) in self.signature.constants.iter().zip(&self.constants) {
            if value >= self.size {
                v.push(format!("constant {name} = {value}: index out of range"));
            }
        }
        for (sym, rel) in self.signature.symbols.iter().zip(&self.relations) {
            let mut in_range = true;
            for t in rel {
                if t.len() != sym.arity {
                    v.push(format!("{}: tuple {t:?} has wrong length", sym.name));
                    in_range = false;
                } else if t.iter().any(|&x| x >= self.size) {
                    v.push(format!("{}: index out of range in tuple {t:?}", sym.name));
                    in_range = false;
                }
            }
            if sym.functional && in_range && sym.arity >= 1 {
                v.extend(functional_violations(&sym.name, sym.arity - 1, self.size, rel));
            }
        }
        ValidationReport { violations: v }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::EmptyUniverse);
        }
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidStructure(report.violations))
        }
    }

    /// Restriction to `subset`, relabelled in ascending order.
    pub fn substructure(&self, subset: &[usize]) -> Result<FiniteStructure> {
        let mut keep: Vec<usize> = subset.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if let Some(&x) = keep.iter().find(|&&x| x >= self.size) {
            return Err(Error::InvalidStructure(vec![format!(
                "subset element {x} out of range"
            )]));
        }
        if keep.is_empty() {
            return Err(Error::EmptyUniverse);
        }
        let mut relabel = vec![usize::MAX; self.size];
        for (new, &old) in keep.iter().enumerate() {
            relabel[old] = new;
        }
        let mut constants = Vec::with_capacity(self.constants.len());
        for (name, &c) in self.signature.constants.iter().zip(&self.constants) {
            if relabel[c] == usize::MAX {
                return Err(Error::ConstantOutside {
                    name: name.clone(),
                    value: c,
                });
            }
            constants.push(relabel[c]);
        }
        let mut relations = Vec::with_capacity(self.relations.len());
        for (sym, rel) in self.signature.symbols.iter().zip(&self.relations) {
            let restricted: Vec<Vec<usize>> = rel
                .iter()
                .filter(|t| t.iter().all(|&x| relabel[x] != usize::MAX))
                .map(|t| t.iter().map(|&x| relabel[x]).collect())
                .collect();
            if sym.functional {
                let k = sym.arity - 1;
                let mut args = vec![0; k];
                loop {
                    let old: Vec<usize> = args.iter().map(|&i| keep[i]).collect();
                    match self.apply(self.signature.symbol_index(&sym.name).unwrap(), &old) {
                        Some(r) if relabel[r] != usize::MAX => {}
                        _ => {
                            return Err(Error::FunctionNotClosed {
                                symbol: sym.name.clone(),
                                args: old,
                            })
                        }
                    }
                    if !next_tuple(&mut args, keep.len()) {
                        break;
                    }
                }
            }
            relations.push(restricted);
        }
        Ok(FiniteStructure::new(
            self.signature.clone(),
            keep.len(),
            relations,
            constants,
        ))
    }
}

/// Advances `t` to the next tuple over `0..n` in lexicographic order.
pub(crate) fn next_tuple(t: &mut [usize], n: usize) -> bool {
    for i in (0..t.len()).rev() {
        t[i] += 1;
        if t[i] < n {
            return true;
        }
        t[i] = 0;
    }
    false
}

fn functional_violations(name: &str, k: usize, n: usize, rel: &[Vec<usize>]) -> Vec<String> {
    let mut counts: HashMap<&[usize], usize> = HashMap::new();
    for t in rel {
        *counts.entry(&t[..k]).or_default() += 1;
    }
    let mut out = Vec::new();
    let Some(total) = n.checked_pow(k as u32).filter(|&c| c <= 1 << 22) else {
        out.push(format!("{name}: too many argument vectors to check totality"));
        return out;
    };
    let mut args = vec![0; k];
    for _ in 0..total {
        let shown = args
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(",");
        match counts.get(args.as_slice()).copied().unwrap_or(0) {
            0 => out.push(format!("{name} not total at ({shown})")),
            1 => {}
            _ => out.push(format!("{name} not single-valued at ({shown})")),
        }
        next_tuple(&mut args, n);
    }
    out
}

/// A structure on `{0, 1}` used as the codomain of homomorphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoTemplate {
    pub name: String,
    pub structure: FiniteStructure,
    pub has_zero: bool,
    pub has_one: bool,
    /// Per symbol: bit `p` set iff the pattern `p` (bit `i` = value of
    /// coordinate `i`) is in the relation.
    tables: Vec<u64>,
}

/// Templates of arity above this are rejected (truth tables are one word).
pub const MAX_TEMPLATE_ARITY: usize = 6;

impl TwoTemplate {
    pub fn new(name: &str, structure: FiniteStructure) -> Result<Self> {
        if structure.size != 2 {
            return Err(Error::InvalidTemplate(format!(
                "template `{name}` has {} elements, expected 2",
                structure.size
            )));
        }
        structure.ensure_valid()?;
        let mut tables = Vec::new();
        for (i, sym) in structure.signature.symbols.iter().enumerate() {
            if sym.arity > MAX_TEMPLATE_ARITY {
                return Err(Error::InvalidTemplate(format!(
                    "symbol `{}` has arity {} > {MAX_TEMPLATE_ARITY}",
                    sym.name, sym.arity
                )));
            }
            let mut table = 0u64;
            for t in structure.tuples(i) {
                let p = t.iter().enumerate().fold(0usize, |p, (j, &v)| p | v << j);
                table |= 1 << p;
            }
            tables.push(table);
        }
        let has_zero = structure.constant_values().contains(&0);
        let has_one = structure.constant_values().contains(&1);
        Ok(TwoTemplate {
            name: name.to_string(),
            structure,
            has_zero,
            has_one,
            tables,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.structure.signature
    }

    pub fn table(&self, symbol: usize) -> u64 {
        self.tables[symbol]
    }

    pub fn table_named(&self, name: &str) -> Option<u64> {
        self.signature().symbol_index(name).map(|i| self.tables[i])
    }

    pub fn accepts(&self, symbol: usize, pattern: usize) -> bool {
        self.tables[symbol] >> pattern & 1 == 1
    }
}

/// A family of distinct subsets of `0..base`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFamily {
    pub base: usize,
    pub sets: Vec<Mask>,
    /// The empty set is a member and plays the constant 0.
    pub zero: bool,
    /// The full base is a member and plays the constant 1.
    pub one: bool,
}

impl SetFamily {
    pub fn new(base: usize, sets: Vec<Mask>, zero: bool, one: bool) -> Result<Self> {
        if base > MASK_BITS {
            return Err(Error::UniverseTooLarge {
                what: "set family base",
                size: base,
                cap: MASK_BITS,
            });
        }
        let full = mask::full(base);
        if let Some(s) = sets.iter().find(|&&s| s & !full != 0) {
            return Err(Error::InvalidFamily(format!(
                "set {s:#x} does not fit in base {base}"
            )));
        }
        let mut seen = sets.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidFamily("duplicate sets".to_string()));
        }
        if zero && !sets.contains(&0) {
            return Err(Error::InvalidFamily(
                "zero requested but the empty set is missing".to_string(),
            ));
        }
        if one && !sets.contains(&full) {
            return Err(Error::InvalidFamily(
                "one requested but the full set is missing".to_string(),
            ));
        }
        Ok(SetFamily {
            base,
            sets,
            zero,
            one,
        })
    }

    /// Family with sets sorted and deduplicated.
    pub fn canonical(base: usize, mut sets: Vec<Mask>) -> Result<Self> {
        sets.sort_unstable();
        sets.dedup();
        SetFamily::new(base, sets, false, false)
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn full(&self) -> Mask {
        mask::full(self.base)
    }

    pub fn position(&self, set: Mask) -> Option<usize> {
        self.sets.iter().position(|&s| s == set)
    }

    pub fn index_map(&self) -> HashMap<Mask, usize> {
        self.sets.iter().enumerate().map(|(i, &s)| (s, i)).collect()
    }

    /// Indices of the members containing `x`.
    pub fn point_row(&self, x: usize) -> Mask {
        self.sets
            .iter()
            .enumerate()
            .filter(|(_, &s)| mask::contains(s, x))
            .fold(0, |m, (i, _)| m | mask::bit(i))
    }

    pub fn sorted_sets(&self) -> Vec<Mask> {
        let mut s = self.sets.clone();
        s.sort_unstable();
        s
    }

    /// Same members, ignoring order and constant flags.
    pub fn same_sets(&self, other: &SetFamily) -> bool {
        self.base == other.base && self.sorted_sets() == other.sorted_sets()
    }

    /// Intersection of the members selected by `indices` (the full base for
    /// an empty selection).
    pub fn meet_of(&self, indices: Mask) -> Mask {
        mask::members(indices).fold(self.full(), |m, i| m & self.sets[i])
    }

    /// Union of the members selected by `indices` (empty for an empty
    /// selection).
    pub fn join_of(&self, indices: Mask) -> Mask {
        mask::members(indices).fold(0, |m, i| m | self.sets[i])
    }
}

/// Result of [`transpose`]: the point-row family plus the collapse map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transposed {
    pub family: SetFamily,
    /// For every point of the original base, the index of its row.
    pub row_of_point: Vec<usize>,
}

impl Transposed {
    /// True when no two points shared a row.
    pub fn injective(&self) -> bool {
        self.family.len() == self.row_of_point.len()
    }
}

/// Incidence transpose: the family over `0..family.len()` whose members are
/// the point rows `{i : x in F_i}`, one per distinct row, in order of first
/// appearance.
pub fn transpose(family: &SetFamily) -> Result<Transposed> {
    if family.len() > MASK_BITS {
        return Err(Error::UniverseTooLarge {
            what: "family size for transpose",
            size: family.len(),
            cap: MASK_BITS,
        });
    }
    let mut rows: Vec<Mask> = Vec::new();
    let mut row_of_point = Vec::with_capacity(family.base);
    for x in 0..family.base {
        let row = family.point_row(x);
        let idx = match rows.iter().position(|&r| r == row) {
            Some(i) => i,
            None => {
                rows.push(row);
                rows.len() - 1
            }
        };
        row_of_point.push(idx);
    }
    Ok(Transposed {
        family: SetFamily::new(family.len(), rows, false, false)?,
        row_of_point,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::catalog;

    fn order2() -> FiniteStructure {
        FiniteStructure::new(
            Signature::new(vec![Symbol::relation("leq", 2)], vec![]),
            2,
            vec![vec![vec![0, 0], vec![0, 1], vec![1, 1]]],
            vec![],
        )
    }

    #[test]
    fn order_template_is_valid() {
        assert!(order2().validate().is_valid());
        let again = order2().validate();
        assert_eq!(again, order2().validate());
    }

    #[test]
    fn missing_meet_tuple_is_reported() {
        let sig = Signature::new(vec![Symbol::operation("meet", 2)], vec![]);
        let s = FiniteStructure::new(
            sig,
            2,
            vec![vec![vec![0, 0, 0], vec![0, 1, 0], vec![1, 0, 0]]],
            vec![],
        );
        let report = s.validate();
        assert_eq!(report.violations, vec!["meet not total at (1,1)".to_string()]);
    }

    #[test]
    fn out_of_range_tuple_is_reported() {
        let mut s = order2();
        s.add_tuple(0, vec![0, 3]);
        let report = s.validate();
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].contains("index out of range"));
    }

    #[test]
    fn singleton_restriction_relabels() {
        let sub = order2().substructure(&[1]).unwrap();
        assert_eq!(sub.size, 1);
        assert_eq!(sub.tuples(0), &[vec![0, 0]]);
    }

    #[test]
    fn meet_closed_restriction() {
        let meet = catalog::semilattice().structure;
        let sub = meet.substructure(&[0]).unwrap();
        assert_eq!(sub.tuples(0), &[vec![0, 0, 0]]);
        // {1} is closed too, {0,1} is everything.
        assert!(meet.substructure(&[1]).is_ok());
    }

    #[test]
    fn restriction_dropping_constant_fails() {
        let lattice = catalog::bounded_lattice().structure;
        let err = lattice.substructure(&[0]).unwrap_err();
        assert!(matches!(err, Error::ConstantOutside { value: 1, .. }));
    }

    #[test]
    fn restriction_not_closed_under_operation() {
        // 3-element chain 0 < 1 < 2 with join; {0, 2} is join-closed, but a
        // structure where join(0, 2) = 1 is not closed on {0, 2}.
        let sig = Signature::new(vec![Symbol::operation("op", 2)], vec![]);
        let mut rel = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                let r = if a != b && a + b == 2 { 1 } else { a.max(b) };
                rel.push(vec![a, b, r]);
            }
        }
        let s = FiniteStructure::new(sig, 3, vec![rel], vec![]);
        assert!(s.validate().is_valid());
        assert!(matches!(
            s.substructure(&[0, 2]),
            Err(Error::FunctionNotClosed { .. })
        ));
    }

    #[test]
    fn transpose_examples() {
        let f = SetFamily::new(2, vec![0b01, 0b10], false, false).unwrap();
        let t = transpose(&f).unwrap();
        assert_eq!(t.family.sets, vec![0b01, 0b10]);
        assert_eq!(t.family.base, 2);

        let f = SetFamily::new(2, vec![0b00, 0b01, 0b11], false, false).unwrap();
        let t = transpose(&f).unwrap();
        assert_eq!(t.family.base, 3);
        assert_eq!(t.family.sets, vec![0b110, 0b100]);

        let f = SetFamily::new(1, vec![0], false, false).unwrap();
        let t = transpose(&f).unwrap();
        assert_eq!(t.family.base, 1);
        assert_eq!(t.family.sets, vec![0]);
    }

    #[test]
    fn transpose_collapses_equal_rows() {
        // Points 0 and 1 lie in exactly the same sets.
        let f = SetFamily::new(3, vec![0b011, 0b111], false, false).unwrap();
        let t = transpose(&f).unwrap();
        assert_eq!(t.row_of_point, vec![0, 0, 1]);
        assert!(!t.injective());
    }

    #[test]
    fn family_invariants_enforced() {
        assert!(SetFamily::new(2, vec![1, 1], false, false).is_err());
        assert!(SetFamily::new(2, vec![4], false, false).is_err());
        assert!(SetFamily::new(2, vec![1], true, false).is_err());
        assert!(SetFamily::new(2, vec![1], false, true).is_err());
        assert!(SetFamily::new(2, vec![0, 3], true, true).is_ok());
    }

    #[test]
    fn double_transpose_exhaustive_small() {
        // Every family over base <= 4 with distinct sets and distinct rows.
        for base in 1..=4usize {
            let universe = 1u64 << (1 << base);
            for pick in 1..universe {
                let sets: Vec<Mask> = crate::mask::members(pick).map(|s| s as Mask).collect();
                let f = SetFamily::new(base, sets, false, false).unwrap();
                let t = transpose(&f).unwrap();
                if !t.injective() {
                    continue;
                }
                let tt = transpose(&t.family).unwrap();
                // tt is over base = number of points, member i is F_i.
                assert_eq!(tt.family.base, base);
                let mut got = tt.family.sets.clone();
                got.sort_unstable();
                assert_eq!(got, f.sorted_sets());
            }
        }
    }
}
