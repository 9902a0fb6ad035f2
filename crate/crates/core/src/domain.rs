//! Ballots, elections and relative elections on the Condorcet-cycle domain,
//! the `zeta` correspondence with voter subsets, consistent multisets, Borda
//! rules, and SWF evaluation from a set function.

use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combin::full_mask;
use crate::error::{Result, SwfError};
use crate::exact::Rational;

/// Largest supported electorate; set-function tables hold `2^n` entries.
pub const MAX_VOTERS: usize = 24;

pub fn check_voter_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_VOTERS {
        return Err(SwfError::VoterCount { n, max: MAX_VOTERS });
    }
    Ok(())
}

/// One of the three candidates `c_1, c_2, c_3`; indices wrap modulo 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Candidate(u8);

impl Candidate {
    pub const C1: Candidate = Candidate(1);
    pub const C2: Candidate = Candidate(2);
    pub const C3: Candidate = Candidate(3);
    pub const ALL: [Candidate; 3] = [Self::C1, Self::C2, Self::C3];

    /// Any integer index, reduced into `{1, 2, 3}`.
    pub fn new(index: i64) -> Candidate {
        Candidate(((index - 1).rem_euclid(3) + 1) as u8)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn next(self) -> Candidate {
        Candidate::new(self.0 as i64 + 1)
    }

    pub fn prev(self) -> Candidate {
        Candidate::new(self.0 as i64 - 1)
    }

    fn slot(self) -> usize {
        (self.0 - 1) as usize
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

/// A Condorcet-cycle ballot. Cycle index `b` is the ballot
/// `c_{b+1} c_{b+2} c_b`, so `c_1 c_2 c_3` has index 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ballot(u8);

impl Ballot {
    pub fn new(cycle_index: u8) -> Result<Ballot> {
        match cycle_index {
            1..=3 => Ok(Ballot(cycle_index)),
            _ => Err(SwfError::OutOfRange(format!("ballot cycle index {cycle_index}"))),
        }
    }

    /// The ballot that ranks `top` first.
    pub fn with_top(top: Candidate) -> Ballot {
        Ballot(top.prev().index())
    }

    pub fn cycle_index(self) -> u8 {
        self.0
    }

    pub fn top(self) -> Candidate {
        Candidate::new(self.0 as i64 + 1)
    }

    /// Position score `r(c)`: 2 for first, 1 for second, 0 for last.
    pub fn rank(self, c: Candidate) -> i8 {
        let b = Candidate(self.0);
        if c == b.next() {
            2
        } else if c == b.next().next() {
            1
        } else {
            0
        }
    }

    /// Candidates from most to least preferred.
    pub fn order(self) -> [Candidate; 3] {
        let b = Candidate(self.0);
        [b.next(), b.next().next(), b]
    }
}

/// A ballot profile; voter `v` (1-based) is position `v - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Election {
    ballots: Vec<Ballot>,
}

impl Election {
    pub fn new(ballots: Vec<Ballot>) -> Result<Election> {
        check_voter_count(ballots.len())?;
        Ok(Election { ballots })
    }

    /// Parses one digit in `1..=3` (the cycle index) per voter.
    pub fn parse(s: &str) -> Result<Election> {
        let ballots = s
            .trim()
            .chars()
            .map(|c| match c {
                '1' => Ok(Ballot(1)),
                '2' => Ok(Ballot(2)),
                '3' => Ok(Ballot(3)),
                other => Err(SwfError::Parse(format!("ballot character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Election::new(ballots)
    }

    pub fn unanimous(n: usize, ballot: Ballot) -> Result<Election> {
        Election::new(vec![ballot; n])
    }

    pub fn n(&self) -> usize {
        self.ballots.len()
    }

    pub fn ballots(&self) -> &[Ballot] {
        &self.ballots
    }

    /// Voters whose ballot has cycle index `i`, i.e. the set `V_i`.
    pub fn voters_with_cycle_index(&self, i: u8) -> SubsetMask {
        let bits = self
            .ballots
            .iter()
            .enumerate()
            .filter(|(_, b)| b.0 == i)
            .fold(0u32, |acc, (v, _)| acc | (1 << v));
        SubsetMask(bits)
    }
}

impl fmt::Display for Election {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.ballots {
            write!(f, "{}", b.0)?;
        }
        Ok(())
    }
}

/// `pi_{i,j}(e)`: per-voter rank differences for an ordered pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelativeElection {
    pair: (Candidate, Candidate),
    values: Vec<i8>,
}

impl RelativeElection {
    pub fn new(i: Candidate, j: Candidate, values: Vec<i8>) -> Result<RelativeElection> {
        if i == j {
            return Err(SwfError::InvalidPair(i.0, j.0));
        }
        check_voter_count(values.len())?;
        let allowed: [i8; 2] = if j == i.next() { [1, -2] } else { [2, -1] };
        if let Some(&bad) = values.iter().find(|v| !allowed.contains(v)) {
            return Err(SwfError::ValueOutsideDomain { i: i.0, j: j.0, value: bad });
        }
        Ok(RelativeElection { pair: (i, j), values })
    }

    pub fn pair(&self) -> (Candidate, Candidate) {
        self.pair
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// True for pairs of the form `(i, i+1)`.
    pub fn is_forward(&self) -> bool {
        self.pair.1 == self.pair.0.next()
    }

    /// `-a`, relative to the reversed pair.
    pub fn reversed(&self) -> RelativeElection {
        RelativeElection {
            pair: (self.pair.1, self.pair.0),
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// Unweighted Borda margin `sum_v a(v)`.
    pub fn unit_margin(&self) -> i64 {
        self.values.iter().map(|&v| v as i64).sum()
    }
}

pub fn relative_election(e: &Election, i: Candidate, j: Candidate) -> Result<RelativeElection> {
    if i == j {
        return Err(SwfError::InvalidPair(i.0, j.0));
    }
    let values = e.ballots.iter().map(|b| b.rank(i) - b.rank(j)).collect();
    Ok(RelativeElection { pair: (i, j), values })
}

/// `zeta(a) = {v : a(v) = -2}` for `a` relative to a pair `(i, i+1)`.
pub fn zeta(a: &RelativeElection) -> Result<SubsetMask> {
    if !a.is_forward() {
        return Err(SwfError::WrongOrientation(a.pair.0 .0, a.pair.1 .0));
    }
    let bits = a
        .values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == -2)
        .fold(0u32, |acc, (v, _)| acc | (1 << v));
    Ok(SubsetMask(bits))
}

/// `zeta^{-1}(U) = 1 - 3 * 1_U` as a relative election for `(i, i+1)`.
pub fn zeta_inv(n: usize, u: SubsetMask, i: Candidate) -> Result<RelativeElection> {
    check_voter_count(n)?;
    u.check(n)?;
    let values = (0..n).map(|v| if u.contains(v) { -2 } else { 1 }).collect();
    Ok(RelativeElection { pair: (i, i.next()), values })
}

/// Pairwise result of an election: `W > T > L`, stored as `+1, 0, -1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(i8)]
pub enum RelResult {
    L = -1,
    T = 0,
    W = 1,
}

impl RelResult {
    pub const ALL: [RelResult; 3] = [RelResult::W, RelResult::T, RelResult::L];

    pub fn from_sign(s: i64) -> RelResult {
        match s.signum() {
            1 => RelResult::W,
            0 => RelResult::T,
            _ => RelResult::L,
        }
    }

    pub fn value(self) -> i8 {
        self as i8
    }

    pub fn as_char(self) -> char {
        match self {
            RelResult::W => 'W',
            RelResult::T => 'T',
            RelResult::L => 'L',
        }
    }

    pub fn from_char(c: char) -> Option<RelResult> {
        match c {
            'W' => Some(RelResult::W),
            'T' => Some(RelResult::T),
            'L' => Some(RelResult::L),
            _ => None,
        }
    }

    /// 0 for L, 1 for T, 2 for W; index into [`CONSISTENT_TABLE`].
    #[inline]
    fn code(self) -> usize {
        (self as i8 + 1) as usize
    }
}

impl Neg for RelResult {
    type Output = RelResult;
    fn neg(self) -> RelResult {
        match self {
            RelResult::W => RelResult::L,
            RelResult::T => RelResult::T,
            RelResult::L => RelResult::W,
        }
    }
}

impl fmt::Display for RelResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// `phi`: the sign of a real number as a pairwise result.
pub fn sign_of(x: &Rational) -> RelResult {
    if x.is_positive() {
        RelResult::W
    } else if x.is_zero() {
        RelResult::T
    } else {
        RelResult::L
    }
}

/// Consistency of every code triple, indexed by `9a + 3b + c`.
const CONSISTENT_TABLE: [bool; 27] = build_consistent_table();

const fn build_consistent_table() -> [bool; 27] {
    let mut t = [false; 27];
    let mut idx = 0;
    while idx < 27 {
        let codes = [idx / 9, (idx / 3) % 3, idx % 3];
        let (mut l, mut tie, mut w) = (0, 0, 0);
        let mut k = 0;
        while k < 3 {
            match codes[k] {
                0 => l += 1,
                1 => tie += 1,
                _ => w += 1,
            }
            k += 1;
        }
        t[idx] = matches!((w, tie, l), (2, 0, 1) | (1, 1, 1) | (1, 0, 2) | (0, 3, 0));
        idx += 1;
    }
    t
}

/// The multisets `{W,W,L}`, `{W,T,L}`, `{W,L,L}` and `{T,T,T}` are
/// consistent; every other 3-multiset is not.
pub fn consistent_multiset(m: [RelResult; 3]) -> bool {
    let (w, t, l) = m.iter().fold((0, 0, 0), |(w, t, l), r| match r {
        RelResult::W => (w + 1, t, l),
        RelResult::T => (w, t + 1, l),
        RelResult::L => (w, t, l + 1),
    });
    matches!((w, t, l), (2, 0, 1) | (1, 1, 1) | (1, 0, 2) | (0, 3, 0))
}

#[inline]
fn consistent_codes(a: RelResult, b: RelResult, c: RelResult) -> bool {
    CONSISTENT_TABLE[9 * a.code() + 3 * b.code() + c.code()]
}

/// A weak ordering of the three candidates as a level per candidate
/// (higher is better), normalised to dense levels starting at 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeakOrdering {
    levels: [u8; 3],
}

impl WeakOrdering {
    /// Builds the ordering induced by arbitrary comparable scores.
    pub fn from_scores<T: Ord + Clone>(scores: [T; 3]) -> WeakOrdering {
        let mut distinct: Vec<T> = scores.to_vec();
        distinct.sort();
        distinct.dedup();
        let mut levels = [0u8; 3];
        for (slot, s) in scores.iter().enumerate() {
            levels[slot] = distinct.iter().position(|d| d == s).unwrap() as u8;
        }
        WeakOrdering { levels }
    }

    pub fn three_way_tie() -> WeakOrdering {
        WeakOrdering { levels: [0; 3] }
    }

    pub fn level(&self, c: Candidate) -> u8 {
        self.levels[c.slot()]
    }

    /// `pi_{i,j}` of the result.
    pub fn relative(&self, i: Candidate, j: Candidate) -> RelResult {
        RelResult::from_sign(self.level(i) as i64 - self.level(j) as i64)
    }

    /// Tiers from best to worst.
    pub fn tiers(&self) -> Vec<Vec<Candidate>> {
        let top = *self.levels.iter().max().unwrap();
        (0..=top)
            .rev()
            .map(|lvl| Candidate::ALL.iter().copied().filter(|c| self.level(*c) == lvl).collect())
            .collect()
    }

    /// The unique weak ordering with the given cyclic pairwise results
    /// `(X_{1,2}, X_{2,3}, X_{3,1})`, if they are consistent.
    pub fn from_cyclic_results(x: [RelResult; 3]) -> Result<WeakOrdering> {
        if !consistent_multiset(x) {
            return Err(SwfError::ConsistencyViolation(x));
        }
        let mut found = None;
        for a in 0..3u8 {
            for b in 0..3u8 {
                for c in 0..3u8 {
                    let w = WeakOrdering::from_scores([a, b, c]);
                    let matches = Candidate::ALL
                        .iter()
                        .all(|&i| w.relative(i, i.next()) == x[i.slot()]);
                    if matches {
                        found = Some(w);
                    }
                }
            }
        }
        found.ok_or(SwfError::ConsistencyViolation(x))
    }
}

impl fmt::Display for WeakOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tiers: Vec<String> = self
            .tiers()
            .iter()
            .map(|t| t.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" = "))
            .collect();
        write!(f, "{}", tiers.join(" > "))
    }
}

/// A subset of voters as a little-endian bitmask; voter `v` is bit `v - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubsetMask(pub u32);

impl SubsetMask {
    pub fn new(n: usize, bits: u32) -> Result<SubsetMask> {
        let m = SubsetMask(bits);
        m.check(n)?;
        Ok(m)
    }

    /// From 1-based voter labels.
    pub fn from_voters(n: usize, voters: &[usize]) -> Result<SubsetMask> {
        let mut bits = 0u32;
        for &v in voters {
            if v == 0 || v > n {
                return Err(SwfError::OutOfRange(format!("voter {v} not in 1..={n}")));
            }
            bits |= 1 << (v - 1);
        }
        Ok(SubsetMask(bits))
    }

    pub fn check(self, n: usize) -> Result<()> {
        if self.0 & !full_mask(n) != 0 {
            return Err(SwfError::MaskOutOfRange { bits: self.0 as u64, n });
        }
        Ok(())
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// 0-based membership test.
    pub fn contains(self, v: usize) -> bool {
        self.0 >> v & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// 1-based voter labels, ascending.
    pub fn voters(self) -> Vec<usize> {
        (0..32).filter(|&v| self.contains(v)).map(|v| v + 1).collect()
    }
}

/// A total set function `P(V) -> {W, T, L}` indexed by subset mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetFunctionWTL {
    n: usize,
    table: Vec<RelResult>,
}

impl SetFunctionWTL {
    pub fn new(n: usize, table: Vec<RelResult>) -> Result<SetFunctionWTL> {
        check_voter_count(n)?;
        if table.len() != 1 << n {
            return Err(SwfError::LengthMismatch { expected: 1 << n, found: table.len() });
        }
        Ok(SetFunctionWTL { n, table })
    }

    pub fn from_fn(n: usize, f: impl Fn(u32) -> RelResult) -> Result<SetFunctionWTL> {
        check_voter_count(n)?;
        Ok(SetFunctionWTL { n, table: (0..1u32 << n).map(f).collect() })
    }

    pub fn constant(n: usize, x: RelResult) -> Result<SetFunctionWTL> {
        SetFunctionWTL::from_fn(n, |_| x)
    }

    /// The set function of an unweighted Borda rule: `U -> X * sign(n - 3|U|)`.
    /// `X = W` is the positive rule, `X = L` the negative one, `X = T` the tie rule.
    pub fn borda_form(n: usize, x: RelResult) -> Result<SetFunctionWTL> {
        SetFunctionWTL::from_fn(n, |u| {
            let s = RelResult::from_sign(n as i64 - 3 * u.count_ones() as i64);
            match x {
                RelResult::W => s,
                RelResult::L => -s,
                RelResult::T => RelResult::T,
            }
        })
    }

    /// Parses a `W`/`T`/`L` string of length `2^n`, index = mask.
    pub fn parse_values(n: usize, values: &str) -> Result<SetFunctionWTL> {
        check_voter_count(n)?;
        let table = values
            .chars()
            .map(|c| RelResult::from_char(c).ok_or_else(|| SwfError::Parse(format!("value character {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        SetFunctionWTL::new(n, table)
    }

    pub fn values_string(&self) -> String {
        self.table.iter().map(|r| r.as_char()).collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[RelResult] {
        &self.table
    }

    #[inline]
    pub fn get(&self, u: u32) -> RelResult {
        self.table[u as usize]
    }

    pub fn at(&self, u: SubsetMask) -> RelResult {
        self.table[u.0 as usize]
    }

    /// `U -> -g(U)`.
    pub fn negated(&self) -> SetFunctionWTL {
        SetFunctionWTL { n: self.n, table: self.table.iter().map(|&r| -r).collect() }
    }

    /// Relative result `f(a)` for `a` relative to any ordered pair: `g(zeta(a))`
    /// on `(i, i+1)` and `-g(zeta(-a))` on `(i+1, i)`.
    pub fn relative_result(&self, a: &RelativeElection) -> Result<RelResult> {
        if a.n() != self.n {
            return Err(SwfError::LengthMismatch { expected: self.n, found: a.n() });
        }
        if a.is_forward() {
            Ok(self.at(zeta(a)?))
        } else {
            Ok(-self.at(zeta(&a.reversed())?))
        }
    }
}

/// Voter weights of a Borda rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightVector {
    weights: Vec<Rational>,
}

impl WeightVector {
    pub fn new(weights: Vec<Rational>) -> Result<WeightVector> {
        check_voter_count(weights.len())?;
        Ok(WeightVector { weights })
    }

    pub fn constant(n: usize, w: i64) -> Result<WeightVector> {
        WeightVector::new(vec![Rational::from_integer(BigInt::from(w)); n])
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn total(&self) -> Rational {
        self.weights.iter().fold(Rational::zero(), |acc, w| acc + w)
    }
}

/// `d_w(a) = sum_v a(v) w_v`.
pub fn borda_margin(a: &RelativeElection, w: &WeightVector) -> Result<Rational> {
    if a.n() != w.weights.len() {
        return Err(SwfError::LengthMismatch { expected: a.n(), found: w.weights.len() });
    }
    Ok(a.values
        .iter()
        .zip(&w.weights)
        .fold(Rational::zero(), |acc, (&v, wv)| acc + wv * Rational::from_integer(BigInt::from(v))))
}

/// A violating ordered partition `(V_1, V_2, V_3)` of the voters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionWitness(pub [SubsetMask; 3]);

/// Checks `{g1(V1), g2(V2), g3(V3)}` over all `3^n` ordered partitions.
/// Returns `None` when consistent, or the first violating partition in scan
/// order (`V1` ascending, then `V2` over submasks of the complement).
pub fn check_triple_consistency(
    g1: &SetFunctionWTL,
    g2: &SetFunctionWTL,
    g3: &SetFunctionWTL,
) -> Result<Option<PartitionWitness>> {
    let n = g1.n;
    if g2.n != n || g3.n != n {
        return Err(SwfError::LengthMismatch { expected: n, found: if g2.n != n { g2.n } else { g3.n } });
    }
    let full = full_mask(n);
    let witness = (0..=full).into_par_iter().find_map_first(|v1| {
        let a = g1.get(v1);
        let rest = full & !v1;
        let mut v2 = rest;
        loop {
            let v3 = rest & !v2;
            if !consistent_codes(a, g2.get(v2), g3.get(v3)) {
                return Some(PartitionWitness([SubsetMask(v1), SubsetMask(v2), SubsetMask(v3)]));
            }
            if v2 == 0 {
                break;
            }
            v2 = (v2 - 1) & rest;
        }
        None
    });
    Ok(witness)
}

/// Convenience wrapper: is `(g, g, g)` consistent?
pub fn is_self_consistent(g: &SetFunctionWTL) -> bool {
    matches!(check_triple_consistency(g, g, g), Ok(None))
}

/// The SWF determined by `(g, g, g)`: `X_{i,i+1} = g(V_i)`.
pub fn evaluate_swf(g: &SetFunctionWTL, e: &Election) -> Result<WeakOrdering> {
    if g.n != e.n() {
        return Err(SwfError::LengthMismatch { expected: g.n, found: e.n() });
    }
    let x = [1u8, 2, 3].map(|i| g.at(e.voters_with_cycle_index(i)));
    WeakOrdering::from_cyclic_results(x)
}

/// `B_w`: candidates ranked by weighted Borda score `sum_v r_v(c) w_v`.
pub fn borda_swf(w: &WeightVector, e: &Election) -> Result<WeakOrdering> {
    if w.weights.len() != e.n() {
        return Err(SwfError::LengthMismatch { expected: e.n(), found: w.weights.len() });
    }
    let score = |c: Candidate| {
        e.ballots
            .iter()
            .zip(&w.weights)
            .fold(Rational::zero(), |acc, (b, wv)| acc + wv * Rational::from_integer(BigInt::from(b.rank(c))))
    };
    Ok(WeakOrdering::from_scores(Candidate::ALL.map(score)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use RelResult::*;

    #[test]
    fn sign_cases() {
        assert_eq!(sign_of(&rat(3, 2)), W);
        assert_eq!(sign_of(&int(0)), T);
        assert_eq!(sign_of(&int(-5)), L);
    }

    #[test]
    fn ballot_ranks() {
        let b123 = Ballot::with_top(Candidate::C1);
        assert_eq!(b123.cycle_index(), 3);
        assert_eq!(b123.order(), [Candidate::C1, Candidate::C2, Candidate::C3]);
        assert_eq!(b123.rank(Candidate::C1), 2);
        assert_eq!(b123.rank(Candidate::C3), 0);
        let b231 = Ballot::new(1).unwrap();
        assert_eq!(b231.order(), [Candidate::C2, Candidate::C3, Candidate::C1]);
        assert!(Ballot::new(0).is_err());
        assert_eq!(Candidate::new(4), Candidate::C1);
        assert_eq!(Candidate::C1.prev(), Candidate::C3);
    }

    #[test]
    fn relative_election_examples() {
        let e = Election::parse("33333").unwrap();
        let a = relative_election(&e, Candidate::C1, Candidate::C2).unwrap();
        assert_eq!(a.values(), &[1, 1, 1, 1, 1]);
        let b = relative_election(&e, Candidate::C2, Candidate::C1).unwrap();
        assert_eq!(b.values(), &[-1; 5]);
        let e = Election::parse("13333").unwrap();
        let a = relative_election(&e, Candidate::C1, Candidate::C2).unwrap();
        assert_eq!(a.values(), &[-2, 1, 1, 1, 1]);
        assert_eq!(
            relative_election(&e, Candidate::C2, Candidate::C2),
            Err(SwfError::InvalidPair(2, 2))
        );
    }

    #[test]
    fn zeta_examples() {
        let a = RelativeElection::new(Candidate::C1, Candidate::C2, vec![1; 4]).unwrap();
        assert_eq!(zeta(&a).unwrap(), SubsetMask(0));
        let a = RelativeElection::new(Candidate::C1, Candidate::C2, vec![-2, 1, -2, 1, 1]).unwrap();
        assert_eq!(zeta(&a).unwrap().voters(), vec![1, 3]);
        let u = SubsetMask::from_voters(3, &[2]).unwrap();
        assert_eq!(zeta_inv(3, u, Candidate::C1).unwrap().values(), &[1, -2, 1]);
        let back = RelativeElection::new(Candidate::C2, Candidate::C1, vec![2, -1]).unwrap();
        assert_eq!(zeta(&back), Err(SwfError::WrongOrientation(2, 1)));
        assert!(RelativeElection::new(Candidate::C1, Candidate::C2, vec![2]).is_err());
    }

    #[test]
    fn consistent_multiset_examples() {
        assert!(consistent_multiset([W, W, L]));
        assert!(consistent_multiset([L, W, T]));
        assert!(consistent_multiset([L, L, W]));
        assert!(consistent_multiset([T, T, T]));
        assert!(!consistent_multiset([W, W, W]));
        assert!(!consistent_multiset([W, T, T]));
        for idx in 0..27 {
            let m = [idx / 9, (idx / 3) % 3, idx % 3].map(|c| [L, T, W][c]);
            assert_eq!(consistent_multiset(m), consistent_codes(m[0], m[1], m[2]));
        }
    }

    #[test]
    fn borda_margin_examples() {
        let ones = WeightVector::constant(5, 1).unwrap();
        let a = RelativeElection::new(Candidate::C1, Candidate::C2, vec![1; 5]).unwrap();
        assert_eq!(borda_margin(&a, &ones).unwrap(), int(5));
        let u = SubsetMask::from_voters(5, &[1, 4]).unwrap();
        let a = zeta_inv(5, u, Candidate::C2).unwrap();
        assert_eq!(borda_margin(&a, &ones).unwrap(), int(5 - 3 * 2));
        let zeros = WeightVector::constant(5, 0).unwrap();
        assert_eq!(borda_margin(&a, &zeros).unwrap(), int(0));
        let short = WeightVector::constant(4, 1).unwrap();
        assert!(borda_margin(&a, &short).is_err());
    }

    #[test]
    fn triple_consistency_examples() {
        for n in 1..=7 {
            let g = SetFunctionWTL::borda_form(n, W).unwrap();
            assert_eq!(check_triple_consistency(&g, &g, &g).unwrap(), None);
        }
        let g = SetFunctionWTL::constant(4, W).unwrap();
        let w = check_triple_consistency(&g, &g, &g).unwrap().unwrap();
        let [a, b, c] = w.0;
        assert_eq!(a.0 | b.0 | c.0, 0b1111);
        assert_eq!(a.0 & b.0, 0);
    }

    #[test]
    fn swf_evaluation_examples() {
        let borda = SetFunctionWTL::borda_form(5, W).unwrap();
        let e = Election::parse("33333").unwrap();
        let ord = evaluate_swf(&borda, &e).unwrap();
        assert_eq!(ord.tiers(), vec![vec![Candidate::C1], vec![Candidate::C2], vec![Candidate::C3]]);
        let tie = SetFunctionWTL::constant(5, T).unwrap();
        assert_eq!(evaluate_swf(&tie, &e).unwrap(), WeakOrdering::three_way_tie());
        let all_w = SetFunctionWTL::constant(5, W).unwrap();
        assert!(matches!(evaluate_swf(&all_w, &e), Err(SwfError::ConsistencyViolation(_))));
    }

    #[test]
    fn borda_swf_examples() {
        let e = Election::parse("333").unwrap();
        let ones = WeightVector::constant(3, 1).unwrap();
        assert_eq!(borda_swf(&ones, &e).unwrap().to_string(), "c1 > c2 > c3");
        let zeros = WeightVector::constant(3, 0).unwrap();
        assert_eq!(borda_swf(&zeros, &e).unwrap(), WeakOrdering::three_way_tie());
        let cyc = Election::parse("312").unwrap();
        assert_eq!(borda_swf(&ones, &cyc).unwrap(), WeakOrdering::three_way_tie());
    }

    #[test]
    fn weak_orderings_from_results() {
        let w = WeakOrdering::from_cyclic_results([W, T, L]).unwrap();
        // c1 > c2 = c3
        assert_eq!(w.to_string(), "c1 > c2 = c3");
        assert!(WeakOrdering::from_cyclic_results([W, W, W]).is_err());
    }

    #[test]
    fn set_function_parsing() {
        let g = SetFunctionWTL::parse_values(2, "WTLW").unwrap();
        assert_eq!(g.values_string(), "WTLW");
        assert!(SetFunctionWTL::parse_values(2, "WTL").is_err());
        assert!(SetFunctionWTL::parse_values(2, "WTLX").is_err());
    }
}
