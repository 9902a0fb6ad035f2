//! Bitmask combinatorics shared by the slice, double-slice and search code.

use std::collections::HashMap;

pub fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// All `t`-subsets of `{0..n}` as masks, ascending.
pub fn masks_of_size(n: usize, t: usize) -> Vec<u32> {
    if t > n {
        return Vec::new();
    }
    if t == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let mut m: u32 = (1u32 << t) - 1;
    let limit = 1u64 << n;
    while (m as u64) < limit {
        out.push(m);
        // Gosper's hack
        let c = m & m.wrapping_neg();
        let r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
        if r == 0 {
            break;
        }
    }
    out
}

/// Iterates the submasks of `set` in increasing numeric order, `0` first.
pub fn submasks(set: u32) -> impl Iterator<Item = u32> {
    let mut sub: u32 = 0;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let cur = sub;
        sub = sub.wrapping_sub(set) & set;
        if sub == 0 {
            done = true;
        }
        Some(cur)
    })
}

/// A slice `([n] choose t)` with a reverse index from mask to position.
#[derive(Debug, Clone)]
pub struct SliceIndex {
    pub n: usize,
    pub t: usize,
    pub masks: Vec<u32>,
    index: HashMap<u32, usize>,
}

impl SliceIndex {
    pub fn new(n: usize, t: usize) -> Self {
        let masks = masks_of_size(n, t);
        let index = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        SliceIndex { n, t, masks, index }
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn position(&self, mask: u32) -> Option<usize> {
        self.index.get(&mask).copied()
    }
}

/// Ordered partitions `(x1, x2, x3)` of `{0..n}` with `|xi| = sizes[i]`,
/// in lexicographic order of `(x1, x2)`.
pub fn ordered_partitions(n: usize, sizes: [usize; 3]) -> Vec<[u32; 3]> {
    if sizes.iter().sum::<usize>() != n {
        return Vec::new();
    }
    let full = full_mask(n);
    let mut out = Vec::new();
    for x1 in masks_of_size(n, sizes[0]) {
        let rest = full & !x1;
        for x2 in submasks(rest) {
            if x2.count_ones() as usize == sizes[1] {
                out.push([x1, x2, rest & !x2]);
            }
        }
    }
    out
}

/// Ordered pairs `(x, y)` of disjoint sets with `|x| = a`, `|y| = b`.
pub fn disjoint_pairs(n: usize, a: usize, b: usize) -> Vec<(u32, u32)> {
    let full = full_mask(n);
    let mut out = Vec::new();
    for x in masks_of_size(n, a) {
        for y in submasks(full & !x) {
            if y.count_ones() as usize == b {
                out.push((x, y));
            }
        }
    }
    out
}

/// `chi_d(x) = prod_{i<d} (x_{2i} - x_{2i+1})` with 0-based voters, the
/// canonical degree-`d` harmonic witness.
pub fn canonical_chi(d: usize, mask: u32) -> i64 {
    let mut v = 1i64;
    for i in 0..d {
        let a = (mask >> (2 * i)) & 1;
        let b = (mask >> (2 * i + 1)) & 1;
        v *= a as i64 - b as i64;
        if v == 0 {
            return 0;
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::binomial_u64;

    #[test]
    fn slice_sizes_match_binomials() {
        for n in 0..=10 {
            for t in 0..=n {
                let m = masks_of_size(n, t);
                assert_eq!(m.len() as u64, binomial_u64(n, t), "n={n} t={t}");
                assert!(m.iter().all(|x| x.count_ones() as usize == t));
                assert!(m.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn submask_enumeration() {
        let subs: Vec<u32> = submasks(0b1010).collect();
        assert_eq!(subs, vec![0, 0b10, 0b1000, 0b1010]);
        assert_eq!(submasks(0).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn partition_counts() {
        // 6! / (2! 2! 2!) = 90
        assert_eq!(ordered_partitions(6, [2, 2, 2]).len(), 90);
        // 8! / (2! 3! 3!) = 560
        assert_eq!(ordered_partitions(8, [2, 3, 3]).len(), 560);
        assert_eq!(disjoint_pairs(6, 2, 2).len(), 90);
    }

    #[test]
    fn chi_values() {
        assert_eq!(canonical_chi(0, 0), 1);
        assert_eq!(canonical_chi(1, 0b01), 1);
        assert_eq!(canonical_chi(1, 0b10), -1);
        assert_eq!(canonical_chi(1, 0b11), 0);
        assert_eq!(canonical_chi(2, 0b1001), -1);
    }
}
