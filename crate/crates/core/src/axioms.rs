//! Transitive anonymity, Pareto and positive responsiveness on set functions,
//! Borda classification, and the number-line consistency checker.

use serde::{Deserialize, Serialize};

use crate::combin::full_mask;
use crate::domain::{
    check_triple_consistency, check_voter_count, zeta_inv, Candidate, RelResult, RelativeElection,
    SetFunctionWTL, SubsetMask,
};
use crate::error::{Result, SwfError};

/// A permutation group on the voters, given by generators. Stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationGroup {
    n: usize,
    generators: Vec<Vec<usize>>,
}

/// JSON form: `{"n": .., "generators": [[σ(1), …, σ(n)], …]}`, 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupFile {
    pub n: usize,
    pub generators: Vec<Vec<usize>>,
}

impl PermutationGroup {
    /// From 1-based one-line permutations.
    pub fn new(n: usize, generators: Vec<Vec<usize>>) -> Result<PermutationGroup> {
        check_voter_count(n)?;
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            if g.len() != n {
                return Err(SwfError::MalformedPermutation(format!(
                    "length {} on {} points",
                    g.len(),
                    n
                )));
            }
            let mut seen = vec![false; n];
            let mut zero = Vec::with_capacity(n);
            for &x in &g {
                if x == 0 || x > n || seen[x - 1] {
                    return Err(SwfError::MalformedPermutation(format!("{g:?} is not a bijection of 1..={n}")));
                }
                seen[x - 1] = true;
                zero.push(x - 1);
            }
            gens.push(zero);
        }
        Ok(PermutationGroup { n, generators: gens })
    }

    pub fn from_file(file: &GroupFile) -> Result<PermutationGroup> {
        PermutationGroup::new(file.n, file.generators.clone())
    }

    pub fn to_file(&self) -> GroupFile {
        GroupFile {
            n: self.n,
            generators: self.generators.iter().map(|g| g.iter().map(|x| x + 1).collect()).collect(),
        }
    }

    /// `Z_n` generated by the shift `v -> v + 1`.
    pub fn cyclic(n: usize) -> Result<PermutationGroup> {
        PermutationGroup::cyclic_shifts(n, &[1])
    }

    /// The subgroup of `Z_n` generated by the given shift amounts.
    pub fn cyclic_shifts(n: usize, shifts: &[usize]) -> Result<PermutationGroup> {
        check_voter_count(n)?;
        let generators = shifts.iter().map(|s| (0..n).map(|v| (v + s) % n).collect()).collect();
        Ok(PermutationGroup { n, generators })
    }

    /// The symmetric group as adjacent transpositions.
    pub fn symmetric(n: usize) -> Result<PermutationGroup> {
        check_voter_count(n)?;
        let generators = (0..n.saturating_sub(1))
            .map(|i| {
                let mut p: Vec<usize> = (0..n).collect();
                p.swap(i, i + 1);
                p
            })
            .collect();
        Ok(PermutationGroup { n, generators })
    }

    pub fn trivial(n: usize) -> Result<PermutationGroup> {
        check_voter_count(n)?;
        Ok(PermutationGroup { n, generators: vec![(0..n).collect()] })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Vec<usize>] {
        &self.generators
    }

    /// Image of a voter subset under generator `i`.
    #[inline]
    pub fn apply(&self, i: usize, mask: u32) -> u32 {
        let g = &self.generators[i];
        let mut out = 0u32;
        let mut m = mask;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            out |= 1 << g[v];
            m &= m - 1;
        }
        out
    }

    /// Orbits of the group on the points `0..n`, each sorted, ordered by minimum.
    pub fn point_orbits(&self) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.n];
        let mut orbits = Vec::new();
        for start in 0..self.n {
            if label[start] != usize::MAX {
                continue;
            }
            let id = orbits.len();
            let mut stack = vec![start];
            let mut orbit = vec![start];
            label[start] = id;
            while let Some(x) = stack.pop() {
                for g in &self.generators {
                    let y = g[x];
                    if label[y] == usize::MAX {
                        label[y] = id;
                        orbit.push(y);
                        stack.push(y);
                    }
                }
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        orbits
    }
}

impl PermutationGroup {
    /// Orbits of the induced action on a set of masks closed under the group.
    /// Each orbit is sorted; orbits are ordered by `(cardinality, min mask)`.
    pub fn mask_orbits(&self, masks: &[u32]) -> Vec<Vec<u32>> {
        let mut seen: std::collections::HashSet<u32> = std::collections::HashSet::with_capacity(masks.len());
        let mut orbits = Vec::new();
        for &start in masks {
            if !seen.insert(start) {
                continue;
            }
            let mut orbit = vec![start];
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for i in 0..self.generators.len() {
                    let y = self.apply(i, x);
                    if seen.insert(y) {
                        orbit.push(y);
                        stack.push(y);
                    }
                }
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        orbits.sort_by_key(|o| (o[0].count_ones(), o[0]));
        orbits
    }
}

pub fn check_transitive(group: &PermutationGroup) -> bool {
    group.point_orbits().len() == 1
}

/// Invariance of `g` under every generator; requires a transitive group.
pub fn check_ta(g: &SetFunctionWTL, group: &PermutationGroup) -> Result<bool> {
    if g.n() != group.n() {
        return Err(SwfError::LengthMismatch { expected: g.n(), found: group.n() });
    }
    if !check_transitive(group) {
        return Err(SwfError::NonTransitiveGroup);
    }
    Ok(ta_violation(g, group).is_none())
}

/// First `(U, σ(U))` with `g(U) != g(σ(U))`.
pub fn ta_violation(g: &SetFunctionWTL, group: &PermutationGroup) -> Option<(SubsetMask, SubsetMask)> {
    for u in 0..=full_mask(g.n()) {
        for i in 0..group.generators.len() {
            let image = group.apply(i, u);
            if g.get(u) != g.get(image) {
                return Some((SubsetMask(u), SubsetMask(image)));
            }
        }
    }
    None
}

/// Pareto: `g(∅) = W` and `g(V) = L`.
pub fn check_pareto(g: &SetFunctionWTL) -> bool {
    g.get(0) == RelResult::W && g.get(full_mask(g.n())) == RelResult::L
}

/// First covering pair `(U, U ∪ {v})` with `g(U) < g(U ∪ {v})`.
pub fn pr_violation(g: &SetFunctionWTL) -> Option<(SubsetMask, SubsetMask)> {
    let n = g.n();
    for u in 0..=full_mask(n) {
        let gu = g.get(u);
        for v in 0..n {
            let w = u | 1 << v;
            if w != u && gu < g.get(w) {
                return Some((SubsetMask(u), SubsetMask(w)));
            }
        }
    }
    None
}

/// Positive responsiveness: `g` is decreasing under inclusion.
pub fn check_pr(g: &SetFunctionWTL) -> bool {
    pr_violation(g).is_none()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BordaKind {
    PositiveUnweighted,
    NegativeUnweighted,
    TieRule,
    WeaklyBordaPositive,
    WeaklyBordaNegative,
    StronglyNonBorda,
    UnclassifiedWithoutTa,
}

/// A relative election `zeta_inv(U)` for `(c_1, c_2)`, or its negation for
/// `(c_2, c_1)` when `forward` is false, with its unit margin and result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginWitness {
    pub mask: SubsetMask,
    pub forward: bool,
    pub margin: i64,
    pub result: RelResult,
    pub election: RelativeElection,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BordaClassification {
    pub kind: BordaKind,
    pub witnesses: Option<(MarginWitness, MarginWitness)>,
}

/// Classifies the SWF of a consistent `(g, g, g)`, assuming TA under `Z_n`.
pub fn classify_borda(g: &SetFunctionWTL) -> Result<BordaClassification> {
    classify_borda_with(g, &PermutationGroup::cyclic(g.n())?)
}

/// Classifies against a given transitive group. A `g` that is not invariant
/// under the group is reported as [`BordaKind::UnclassifiedWithoutTa`].
pub fn classify_borda_with(g: &SetFunctionWTL, group: &PermutationGroup) -> Result<BordaClassification> {
    if check_triple_consistency(g, g, g)?.is_some() {
        return Err(SwfError::InconsistentTriple);
    }
    if !check_ta(g, group)? {
        return Ok(BordaClassification { kind: BordaKind::UnclassifiedWithoutTa, witnesses: None });
    }
    classify_consistent(g)
}

/// Classification without re-running the consistency or TA scans.
pub fn classify_consistent(g: &SetFunctionWTL) -> Result<BordaClassification> {
    let n = g.n() as i64;
    let sign = |u: u32| RelResult::from_sign(n - 3 * u.count_ones() as i64);
    let table = g.table();
    let all = |f: &dyn Fn(u32, RelResult) -> bool| table.iter().enumerate().all(|(u, &x)| f(u as u32, x));
    let kind = if all(&|_, x| x == RelResult::T) {
        BordaKind::TieRule
    } else if all(&|u, x| x == sign(u)) {
        BordaKind::PositiveUnweighted
    } else if all(&|u, x| x == -sign(u)) {
        BordaKind::NegativeUnweighted
    } else if all(&|u, x| sign(u) == RelResult::T || x == sign(u)) {
        BordaKind::WeaklyBordaPositive
    } else if all(&|u, x| sign(u) == RelResult::T || x == -sign(u)) {
        BordaKind::WeaklyBordaNegative
    } else {
        BordaKind::StronglyNonBorda
    };
    let witnesses = if kind == BordaKind::StronglyNonBorda { margin_witnesses(g)? } else { None };
    Ok(BordaClassification { kind, witnesses })
}

/// Two relative elections with equal unit margin and results `W` and `L`.
/// Candidates are scanned by `(|U|, mask)`, forward orientation first; the
/// first margin at which both results have appeared wins.
pub fn margin_witnesses(g: &SetFunctionWTL) -> Result<Option<(MarginWitness, MarginWitness)>> {
    let n = g.n();
    let nn = n as i64;
    let mut order: Vec<u32> = (0..=full_mask(n)).collect();
    order.sort_by_key(|&u| (u.count_ones(), u));
    let mut seen: std::collections::HashMap<i64, [Option<(u32, bool)>; 2]> = Default::default();
    for u in order {
        for forward in [true, false] {
            let base = nn - 3 * u.count_ones() as i64;
            let (margin, result) = if forward { (base, g.get(u)) } else { (-base, -g.get(u)) };
            let slot = match result {
                RelResult::W => 0,
                RelResult::L => 1,
                RelResult::T => continue,
            };
            let entry = seen.entry(margin).or_default();
            if entry[slot].is_none() {
                entry[slot] = Some((u, forward));
            }
            if let [Some(w), Some(l)] = *entry {
                let build = |(mask, fwd): (u32, bool), result| -> Result<MarginWitness> {
                    let a = zeta_inv(n, SubsetMask(mask), Candidate::C1)?;
                    let election = if fwd { a } else { a.reversed() };
                    Ok(MarginWitness { mask: SubsetMask(mask), forward: fwd, margin, result, election })
                };
                return Ok(Some((build(w, RelResult::W)?, build(l, RelResult::L)?)));
            }
        }
    }
    Ok(None)
}

/// A function on cardinalities `0..=l` with target sum `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumberLineFn {
    l: usize,
    m: usize,
    values: Vec<RelResult>,
}

impl NumberLineFn {
    pub fn new(l: usize, m: usize, values: Vec<RelResult>) -> Result<NumberLineFn> {
        if values.len() != l + 1 {
            return Err(SwfError::LengthMismatch { expected: l + 1, found: values.len() });
        }
        if m < l || m > 2 * l {
            return Err(SwfError::OutOfRange(format!("m = {m} outside [{l}, {}]", 2 * l)));
        }
        Ok(NumberLineFn { l, m, values })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[RelResult] {
        &self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumberLineOutcome {
    /// `f(i) = sign(kappa * (i - m/3))`; `below` is the value for `i < m/3`.
    SignForm { kappa_sign: i8, below: RelResult },
    /// A triple `i <= j <= k` with `i + j + k = m` and an inconsistent multiset.
    Violation { triple: (usize, usize, usize) },
    /// Consistent on every triple yet not of sign form at `index`.
    NotSignForm { index: usize },
}

/// Checks `{f(i), f(j), f(k)}` for all `i + j + k = m`. Among violations the
/// one with the smallest spread `k - i` is reported, ties lexicographically.
pub fn numberline_check(f: &NumberLineFn) -> NumberLineOutcome {
    let (l, m) = (f.l, f.m);
    let mut best: Option<(usize, (usize, usize, usize))> = None;
    for i in 0..=l {
        for j in i..=l {
            if i + j > m || m - i - j < j {
                continue;
            }
            let k = m - i - j;
            if k > l {
                continue;
            }
            let triple = [f.values[i], f.values[j], f.values[k]];
            if !crate::domain::consistent_multiset(triple) {
                let cand = (k - i, (i, j, k));
                if best.is_none_or(|b| cand < b) {
                    best = Some(cand);
                }
            }
        }
    }
    if let Some((_, triple)) = best {
        return NumberLineOutcome::Violation { triple };
    }
    // positions relative to m/3 compared as 3i vs m
    let below = (0..=l).find(|&i| 3 * i < m).map(|i| f.values[i]);
    let above = (0..=l).find(|&i| 3 * i > m).map(|i| -f.values[i]);
    let x = below.or(above).unwrap_or(RelResult::T);
    for i in 0..=l {
        let expected = match (3 * i).cmp(&m) {
            std::cmp::Ordering::Less => x,
            std::cmp::Ordering::Equal => RelResult::T,
            std::cmp::Ordering::Greater => -x,
        };
        if f.values[i] != expected {
            return NumberLineOutcome::NotSignForm { index: i };
        }
    }
    NumberLineOutcome::SignForm { kappa_sign: -x.value(), below: x }
}

#[cfg(test)]
mod tests {
    use super::*;
    use RelResult::*;

    #[test]
    fn transitivity_examples() {
        assert!(check_transitive(&PermutationGroup::cyclic(5).unwrap()));
        assert!(!check_transitive(&PermutationGroup::trivial(2).unwrap()));
        let g = PermutationGroup::new(4, vec![vec![2, 1, 3, 4], vec![1, 2, 4, 3]]).unwrap();
        assert!(!check_transitive(&g));
        assert!(PermutationGroup::new(3, vec![vec![1, 1, 2]]).is_err());
        assert!(PermutationGroup::new(3, vec![vec![1, 2]]).is_err());
    }

    #[test]
    fn ta_examples() {
        let z = PermutationGroup::cyclic(7).unwrap();
        let borda = SetFunctionWTL::borda_form(7, W).unwrap();
        assert!(check_ta(&borda, &z).unwrap());
        let dictator = SetFunctionWTL::from_fn(7, |u| if u & 1 == 1 { W } else { L }).unwrap();
        assert!(!check_ta(&dictator, &z).unwrap());
        let trivial = PermutationGroup::trivial(7).unwrap();
        assert_eq!(check_ta(&borda, &trivial), Err(SwfError::NonTransitiveGroup));
    }

    #[test]
    fn ta_generator_independence() {
        let g = SetFunctionWTL::from_fn(7, |u| if u.count_ones() == 2 && u & 0b11 == 0b11 { W } else { T }).unwrap();
        let a = PermutationGroup::cyclic(7).unwrap();
        let b = PermutationGroup::cyclic_shifts(7, &[2, 3]).unwrap();
        assert_eq!(check_ta(&g, &a).unwrap(), check_ta(&g, &b).unwrap());
    }

    #[test]
    fn pareto_and_pr_examples() {
        let borda = SetFunctionWTL::borda_form(5, W).unwrap();
        assert!(check_pareto(&borda));
        assert!(check_pr(&borda));
        let tie = SetFunctionWTL::constant(5, T).unwrap();
        assert!(!check_pareto(&tie));
        let bad = SetFunctionWTL::from_fn(3, |u| if u == 0 { L } else { W }).unwrap();
        assert!(!check_pr(&bad));
        assert_eq!(pr_violation(&bad), Some((SubsetMask(0), SubsetMask(1))));
    }

    #[test]
    fn classification_examples() {
        for n in [3, 4, 5, 6] {
            let pos = SetFunctionWTL::borda_form(n, W).unwrap();
            assert_eq!(classify_borda(&pos).unwrap().kind, BordaKind::PositiveUnweighted);
            assert_eq!(classify_borda(&pos.negated()).unwrap().kind, BordaKind::NegativeUnweighted);
            let tie = SetFunctionWTL::constant(n, T).unwrap();
            assert_eq!(classify_borda(&tie).unwrap().kind, BordaKind::TieRule);
        }
        let all_w = SetFunctionWTL::constant(4, W).unwrap();
        assert_eq!(classify_borda(&all_w), Err(SwfError::InconsistentTriple));
    }

    #[test]
    fn table_level_classification() {
        let g = SetFunctionWTL::borda_form(6, W).unwrap();
        let broken = SetFunctionWTL::from_fn(6, |u| if u.count_ones() == 2 { W } else { g.get(u) }).unwrap();
        assert_eq!(classify_consistent(&broken).unwrap().kind, BordaKind::WeaklyBordaPositive);
        assert_eq!(classify_consistent(&broken.negated()).unwrap().kind, BordaKind::WeaklyBordaNegative);
        let mut t = g.table().to_vec();
        t[0] = T;
        let h = SetFunctionWTL::new(6, t).unwrap();
        assert_eq!(classify_consistent(&h).unwrap().kind, BordaKind::StronglyNonBorda);
    }

    #[test]
    fn numberline_examples() {
        let f = NumberLineFn::new(4, 6, vec![T; 5]).unwrap();
        assert_eq!(numberline_check(&f), NumberLineOutcome::SignForm { kappa_sign: 0, below: T });
        let f = NumberLineFn::new(4, 6, vec![W, W, T, L, L]).unwrap();
        assert_eq!(numberline_check(&f), NumberLineOutcome::SignForm { kappa_sign: -1, below: W });
        let f = NumberLineFn::new(4, 6, vec![W; 5]).unwrap();
        assert_eq!(numberline_check(&f), NumberLineOutcome::Violation { triple: (2, 2, 2) });
        assert!(NumberLineFn::new(4, 9, vec![W; 5]).is_err());
    }
}
