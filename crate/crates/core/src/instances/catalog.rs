//! Named two-element templates.

use crate::model::{FiniteStructure, Signature, Symbol, TwoTemplate};

/// Names accepted by [`template`]; the ultimate variants live in
/// [`crate::bea::UltimateVariant`].
pub const RELATIONAL_NAMES: &[&str] = &[
    "order",
    "bounded_lattice",
    "semilattice",
    "semilattice0",
    "semilattice01",
    "pure_set",
    "boolean_algebra",
    "betweenness_s0",
    "natural_betweenness",
];

fn build(name: &str, symbols: Vec<(Symbol, Vec<Vec<usize>>)>, constants: &[(&str, usize)]) -> TwoTemplate {
    let (syms, rels): (Vec<_>, Vec<_>) = symbols.into_iter().unzip();
    let sig = Signature::new(syms, constants.iter().map(|c| c.0).collect());
    let values = constants.iter().map(|c| c.1).collect();
    let s = FiniteStructure::new(sig, 2, rels, values);
    TwoTemplate::new(name, s).expect("catalog templates are valid")
}

fn binary_op(f: impl Fn(usize, usize) -> usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for x in 0..2 {
        for y in 0..2 {
            out.push(vec![x, y, f(x, y)]);
        }
    }
    out
}

fn meet() -> (Symbol, Vec<Vec<usize>>) {
    (Symbol::operation("meet", 2), binary_op(|x, y| x & y))
}

fn join() -> (Symbol, Vec<Vec<usize>>) {
    (Symbol::operation("join", 2), binary_op(|x, y| x | y))
}

fn ternary(pred: impl Fn(usize, usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..2 {
                if pred(x, y, z) {
                    out.push(vec![x, y, z]);
                }
            }
        }
    }
    out
}

/// ⟨2; ≤⟩ with the relation `leq`.
pub fn order() -> TwoTemplate {
    let leq = vec![vec![0, 0], vec![0, 1], vec![1, 1]];
    build("order", vec![(Symbol::relation("leq", 2), leq)], &[])
}

pub fn bounded_lattice() -> TwoTemplate {
    build(
        "bounded_lattice",
        vec![meet(), join()],
        &[("zero", 0), ("one", 1)],
    )
}

pub fn semilattice() -> TwoTemplate {
    build("semilattice", vec![meet()], &[])
}

pub fn semilattice0() -> TwoTemplate {
    build("semilattice0", vec![meet()], &[("zero", 0)])
}

pub fn semilattice01() -> TwoTemplate {
    build("semilattice01", vec![meet()], &[("zero", 0), ("one", 1)])
}

/// The bare two-element set. Equality is implicit: separation of points
/// is exactly reflection of `=`.
pub fn pure_set() -> TwoTemplate {
    build("pure_set", vec![], &[])
}

pub fn boolean_algebra() -> TwoTemplate {
    let neg = vec![vec![0, 1], vec![1, 0]];
    build(
        "boolean_algebra",
        vec![meet(), join(), (Symbol::operation("neg", 1), neg)],
        &[("zero", 0), ("one", 1)],
    )
}

/// β(x, y, z) iff (x = z = 1 implies y = 1).
pub fn betweenness_s0() -> TwoTemplate {
    let rel = ternary(|x, y, z| !(x == 1 && z == 1) || y == 1);
    build("betweenness_s0", vec![(Symbol::relation("between", 3), rel)], &[])
}

/// B(x, y, z) iff y is x or z.
pub fn natural_betweenness() -> TwoTemplate {
    let rel = ternary(|x, y, z| y == x || y == z);
    build(
        "natural_betweenness",
        vec![(Symbol::relation("between", 3), rel)],
        &[],
    )
}

/// Looks up a relational template by name.
pub fn template(name: &str) -> Option<TwoTemplate> {
    Some(match name {
        "order" => order(),
        "bounded_lattice" => bounded_lattice(),
        "semilattice" => semilattice(),
        "semilattice0" => semilattice0(),
        "semilattice01" => semilattice01(),
        "pure_set" => pure_set(),
        "boolean_algebra" => boolean_algebra(),
        "betweenness_s0" => betweenness_s0(),
        "natural_betweenness" => natural_betweenness(),
        _ => return None,
    })
}

pub fn all_relational() -> Vec<TwoTemplate> {
    RELATIONAL_NAMES.iter().map(|n| template(n).unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_template_validates() {
        for t in all_relational() {
            assert!(t.structure.validate().is_valid(), "{}", t.name);
            assert_eq!(template(&t.name).unwrap(), t);
        }
    }

    #[test]
    fn betweenness_tables_match_definitions() {
        let s0 = betweenness_s0();
        let nat = natural_betweenness();
        for x in 0..2usize {
            for y in 0..2usize {
                for z in 0..2usize {
                    let p = x | y << 1 | z << 2;
                    assert_eq!(s0.accepts(0, p), !(x == 1 && z == 1) || y == 1);
                    assert_eq!(nat.accepts(0, p), y == x || y == z);
                }
            }
        }
        assert_eq!(s0.structure.tuples(0).len(), 7);
        assert_eq!(nat.structure.tuples(0).len(), 6);
    }

    #[test]
    fn constants_flags() {
        assert!(bounded_lattice().has_zero && bounded_lattice().has_one);
        assert!(semilattice0().has_zero && !semilattice0().has_one);
        assert!(!order().has_zero && !order().has_one);
    }
}
