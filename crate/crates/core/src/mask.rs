//! Subsets of a small universe packed into a single machine word.

/// A subset of `0..n` for `n <= MASK_BITS`, bit `i` set iff `i` is a member.
pub type Mask = u64;

/// Width of [`Mask`]; no universe or base set may exceed it.
pub const MASK_BITS: usize = 64;

/// The full subset of `0..n`.
#[inline]
pub fn full(n: usize) -> Mask {
    debug_assert!(n <= MASK_BITS);
    if n == MASK_BITS {
        Mask::MAX
    } else {
        (1 << n) - 1
    }
}

#[inline]
pub fn bit(i: usize) -> Mask {
    1 << i
}

#[inline]
pub fn contains(mask: Mask, i: usize) -> bool {
    mask >> i & 1 == 1
}

#[inline]
pub fn is_subset(a: Mask, b: Mask) -> bool {
    a & !b == 0
}

/// Members of `mask` in ascending order.
pub fn members(mask: Mask) -> Members {
    Members(mask)
}

#[derive(Clone, Debug)]
pub struct Members(Mask);

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let k = self.0.count_ones() as usize;
        (k, Some(k))
    }
}

impl ExactSizeIterator for Members {}

/// Builds a mask from indices. Indices must be below [`MASK_BITS`].
pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Mask {
    indices.into_iter().fold(0, |m, i| m | bit(i))
}

pub fn to_indices(mask: Mask) -> Vec<usize> {
    members(mask).collect()
}

/// Every subset of `mask`, starting at the empty set, in increasing numeric
/// order (carry-rippler enumeration).
pub fn subsets(mask: Mask) -> Subsets {
    Subsets {
        mask,
        next: Some(0),
    }
}

#[derive(Clone, Debug)]
pub struct Subsets {
    mask: Mask,
    next: Option<Mask>,
}

impl Iterator for Subsets {
    type Item = Mask;

    fn next(&mut self) -> Option<Mask> {
        let cur = self.next?;
        let succ = cur.wrapping_sub(self.mask) & self.mask;
        self.next = if succ == 0 { None } else { Some(succ) };
        Some(cur)
    }
}

/// Ordering key for counterexample tuples: total popcount, then the masks
/// compared lexicographically.
pub fn witness_key(masks: &[Mask]) -> (u32, Vec<Mask>) {
    (masks.iter().map(|m| m.count_ones()).sum(), masks.to_vec())
}
