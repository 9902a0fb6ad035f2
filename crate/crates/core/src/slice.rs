//! Functions on the `k`-slice of `[3k]`: the disjoint-replacement operator,
//! its eigenvalues, stability, harmonic weights, and exact scans of the
//! probability and inconsistency bounds.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::axioms::PermutationGroup;
use crate::combin::{masks_of_size, ordered_partitions};
use crate::domain::{check_triple_consistency, check_voter_count, RelResult, SetFunctionWTL, SubsetMask};
use crate::error::{Result, SwfError};
use crate::exact::{binomial, binomial_u64, int, rat, ratio, serde_rational, serde_rational_opt, solve_linear, Rational};

/// A rational-valued function on the `t`-subsets of `[n]`, stored by
/// ascending mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceFunction {
    n: usize,
    t: usize,
    masks: Vec<u32>,
    values: Vec<Rational>,
}

impl SliceFunction {
    pub fn new(n: usize, t: usize, f: impl Fn(u32) -> Rational) -> Result<SliceFunction> {
        check_voter_count(n)?;
        if t > n {
            return Err(SwfError::OutOfRange(format!("slice {t} of [{n}]")));
        }
        let masks = masks_of_size(n, t);
        let values = masks.iter().map(|&m| f(m)).collect();
        Ok(SliceFunction { n, t, masks, values })
    }

    pub fn from_values(n: usize, t: usize, values: Vec<Rational>) -> Result<SliceFunction> {
        let mut g = SliceFunction::new(n, t, |_| Rational::zero())?;
        if values.len() != g.masks.len() {
            return Err(SwfError::LengthMismatch { expected: g.masks.len(), found: values.len() });
        }
        g.values = values;
        Ok(g)
    }

    /// 0/1 indicator of a predicate.
    pub fn boolean(n: usize, t: usize, f: impl Fn(u32) -> bool) -> Result<SliceFunction> {
        SliceFunction::new(n, t, |m| if f(m) { Rational::one() } else { Rational::zero() })
    }

    /// Restriction of a set function with `W, T, L` read as `1, 0, -1`.
    pub fn from_set_function(g: &SetFunctionWTL, t: usize) -> Result<SliceFunction> {
        SliceFunction::new(g.n(), t, |m| int(g.get(m).value() as i64))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn masks(&self) -> &[u32] {
        &self.masks
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn get(&self, mask: u32) -> Option<&Rational> {
        self.masks.binary_search(&mask).ok().map(|i| &self.values[i])
    }

    pub fn mean(&self) -> Rational {
        let total = self.values.iter().fold(Rational::zero(), |a, v| a + v);
        total / int(self.values.len() as i64)
    }

    /// `E_x f(x) g(x)` under the uniform distribution.
    pub fn inner(&self, other: &SliceFunction) -> Result<Rational> {
        if self.n != other.n || self.t != other.t {
            return Err(SwfError::OutOfRange("inner product across different slices".into()));
        }
        let total = self.values.iter().zip(&other.values).fold(Rational::zero(), |a, (x, y)| a + x * y);
        Ok(total / int(self.values.len() as i64))
    }

    pub fn map(&self, f: impl Fn(&Rational) -> Rational) -> SliceFunction {
        SliceFunction { n: self.n, t: self.t, masks: self.masks.clone(), values: self.values.iter().map(f).collect() }
    }
}

/// `k` for a function on the `k`-slice of `[3k]`.
fn middle_k(g: &SliceFunction) -> Result<usize> {
    if !g.n.is_multiple_of(3) || g.t != g.n / 3 || g.n == 0 {
        return Err(SwfError::OutOfRange(format!(
            "expected the k-slice of [3k], got the {}-slice of [{}]",
            g.t, g.n
        )));
    }
    Ok(g.t)
}

/// `alpha_d = (-1)^d (2k-d)! k! / ((2k)! (k-d)!)`.
pub fn alpha(k: usize, d: usize) -> Result<Rational> {
    if d > k {
        return Err(SwfError::OutOfRange(format!("alpha index d = {d} > k = {k}")));
    }
    let k = k as i64;
    let d = d as i64;
    let v = Rational::new(binomial(2 * k - d, k - d), binomial(2 * k, k));
    Ok(if d % 2 == 1 { -v } else { v })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceSpectrum {
    pub k: usize,
    #[serde(with = "crate::exact::serde_rational_vec")]
    pub alphas: Vec<Rational>,
}

impl SliceSpectrum {
    pub fn new(k: usize) -> Result<SliceSpectrum> {
        let alphas = (0..=k).map(|d| alpha(k, d)).collect::<Result<Vec<_>>>()?;
        Ok(SliceSpectrum { k, alphas })
    }

    /// `alpha_d = -alpha_{d-1} (k-d+1) / (2k-d+1)` for `1 <= d <= k`.
    pub fn recursion_holds(&self) -> bool {
        let k = self.k as i64;
        self.alphas[0] == Rational::one()
            && (1..=self.k).all(|d| {
                let di = d as i64;
                self.alphas[d] == -&self.alphas[d - 1] * rat(k - di + 1, 2 * k - di + 1)
            })
    }

    /// `0 <= alpha_{2i} <= 4^-i` and `-2^{-2i-1} <= alpha_{2i+1} <= 0`.
    pub fn bounds_hold(&self) -> bool {
        self.alphas.iter().enumerate().all(|(d, a)| {
            let i = (d / 2) as u32;
            if d % 2 == 0 {
                *a >= Rational::zero() && *a <= Rational::new(BigInt::one(), BigInt::from(4).pow(i))
            } else {
                *a <= Rational::zero() && *a >= -Rational::new(BigInt::one(), BigInt::from(2).pow(2 * i + 1))
            }
        })
    }

    /// Alternating signs and strictly decreasing magnitudes.
    pub fn alternating_decreasing(&self) -> bool {
        self.alphas.windows(2).all(|w| {
            use num_traits::Signed;
            w[1].abs() < w[0].abs() && (w[0].is_positive() != w[1].is_positive())
        })
    }
}

/// Dense exact matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> RationalMatrix {
        RationalMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .filter(|&c| !self.get(r, c).is_zero())
                    .fold(Rational::zero(), |acc, c| acc + self.get(r, c) * &x[c])
            })
            .collect()
    }

    pub fn row_sums(&self) -> Vec<Rational> {
        (0..self.rows)
            .map(|r| (0..self.cols).fold(Rational::zero(), |a, c| a + self.get(r, c)))
            .collect()
    }
}

/// Largest `k` for which the dense replacement matrix is built.
pub const MAX_MATRIX_K: usize = 4;

/// Transition matrix of `R` on the `k`-slice of `[3k]`: `1 / C(2k, k)` on
/// disjoint pairs. Rows and columns follow ascending mask order.
pub fn replacement_matrix(k: usize) -> Result<(Vec<u32>, RationalMatrix)> {
    if k == 0 {
        return Err(SwfError::OutOfRange("k must be positive".into()));
    }
    if k > MAX_MATRIX_K {
        return Err(SwfError::BudgetExceeded(format!(
            "replacement matrix for k = {k} (limit {MAX_MATRIX_K})"
        )));
    }
    let masks = masks_of_size(3 * k, k);
    let p = ratio(1, binomial_u64(2 * k, k));
    let mut m = RationalMatrix::zeros(masks.len(), masks.len());
    for (r, &x) in masks.iter().enumerate() {
        for (c, &y) in masks.iter().enumerate() {
            if x & y == 0 {
                m.set(r, c, p.clone());
            }
        }
    }
    Ok((masks, m))
}

fn disjoint_neighbours(masks: &[u32]) -> Vec<Vec<usize>> {
    masks
        .iter()
        .map(|&x| masks.iter().enumerate().filter(|(_, &y)| x & y == 0).map(|(i, _)| i).collect())
        .collect()
}

/// `T_R g(x) = E_{y ~ R(x)} g(y)`.
pub fn apply_replacement(g: &SliceFunction) -> Result<SliceFunction> {
    middle_k(g)?;
    let nb = disjoint_neighbours(&g.masks);
    Ok(apply_with(&nb, g))
}

fn apply_with(nb: &[Vec<usize>], g: &SliceFunction) -> SliceFunction {
    let values = nb
        .iter()
        .map(|ys| ys.iter().fold(Rational::zero(), |a, &y| a + &g.values[y]) / int(ys.len() as i64))
        .collect();
    SliceFunction { n: g.n, t: g.t, masks: g.masks.clone(), values }
}

/// `Stab_R(g) = <g, T_R g>`, summed over all ordered disjoint pairs.
pub fn stab_r(g: &SliceFunction) -> Result<Rational> {
    let k = middle_k(g)?;
    let mut total = Rational::zero();
    for (i, &x) in g.masks.iter().enumerate() {
        if g.values[i].is_zero() {
            continue;
        }
        for (j, &y) in g.masks.iter().enumerate() {
            if x & y == 0 {
                total += &g.values[i] * &g.values[j];
            }
        }
    }
    Ok(total / int((g.masks.len() as u64 * binomial_u64(2 * k, k)) as i64))
}

/// Conditional means `E[g(x) | i in x]` for each voter `i` (0-based).
pub fn signed_influences(g: &SliceFunction) -> Vec<Rational> {
    (0..g.n)
        .map(|v| {
            let (sum, cnt) = g
                .masks
                .iter()
                .zip(&g.values)
                .filter(|(m, _)| *m >> v & 1 == 1)
                .fold((Rational::zero(), 0i64), |(s, c), (_, x)| (s + x, c + 1));
            if cnt == 0 {
                Rational::zero()
            } else {
                sum / int(cnt)
            }
        })
        .collect()
}

/// Every level-set indicator of `g` has equal signed influence at every voter.
pub fn check_egalitarian(g: &SliceFunction) -> bool {
    let mut levels: Vec<&Rational> = g.values.iter().collect();
    levels.sort();
    levels.dedup();
    levels.into_iter().all(|c| {
        let ind = g.map(|x| if x == c { Rational::one() } else { Rational::zero() });
        let inf = signed_influences(&ind);
        inf.windows(2).all(|w| w[0] == w[1])
    })
}

/// How slice values are read when classifying triples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValueKind {
    /// `1 -> W`, `0 -> L`.
    Boolean,
    /// `1 -> W`, `0 -> T`, `-1 -> L`.
    Wtl,
}

fn value_code(v: &Rational, kind: ValueKind) -> Result<u8> {
    let bad = || SwfError::OutOfRange(format!("value {v} not allowed for {kind:?} functions"));
    if !v.is_integer() {
        return Err(bad());
    }
    let x = v.to_integer();
    let code = match kind {
        ValueKind::Boolean if x == BigInt::one() => 2,
        ValueKind::Boolean if x.is_zero() => 0,
        ValueKind::Wtl if x == BigInt::one() => 2,
        ValueKind::Wtl if x.is_zero() => 1,
        ValueKind::Wtl if x == -BigInt::one() => 0,
        _ => return Err(bad()),
    };
    Ok(code)
}

/// Multiset class of three codes (`L = 0, T = 1, W = 2`), as an index into
/// `[WWW, WWT, WWL, WTT, WTL, WLL, TTT, LTT, LLT, LLL]`.
const fn class_of(a: u8, b: u8, c: u8) -> usize {
    let w = (a == 2) as usize + (b == 2) as usize + (c == 2) as usize;
    let l = (a == 0) as usize + (b == 0) as usize + (c == 0) as usize;
    match (w, l) {
        (3, 0) => 0,
        (2, 0) => 1,
        (2, 1) => 2,
        (1, 0) => 3,
        (1, 1) => 4,
        (1, 2) => 5,
        (0, 0) => 6,
        (0, 1) => 7,
        (0, 2) => 8,
        _ => 9,
    }
}

const CLASS_TABLE: [u8; 27] = {
    let mut t = [0u8; 27];
    let mut i = 0;
    while i < 27 {
        t[i] = class_of((i / 9) as u8, ((i / 3) % 3) as u8, (i % 3) as u8) as u8;
        i += 1;
    }
    t
};

/// Class probabilities over uniformly random ordered `(k, k, k)`-partitions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleStats {
    pub partitions: u64,
    #[serde(with = "serde_rational")]
    pub p_w: Rational,
    #[serde(with = "serde_rational")]
    pub p_t: Rational,
    #[serde(with = "serde_rational")]
    pub p_l: Rational,
    #[serde(with = "serde_rational")]
    pub b: Rational,
    #[serde(with = "serde_rational")]
    pub p_www: Rational,
    #[serde(with = "serde_rational")]
    pub p_wwt: Rational,
    #[serde(with = "serde_rational")]
    pub p_wwl: Rational,
    #[serde(with = "serde_rational")]
    pub p_wtt: Rational,
    #[serde(with = "serde_rational")]
    pub p_wtl: Rational,
    #[serde(with = "serde_rational")]
    pub p_wll: Rational,
    #[serde(with = "serde_rational")]
    pub p_ttt: Rational,
    #[serde(with = "serde_rational")]
    pub p_ltt: Rational,
    #[serde(with = "serde_rational")]
    pub p_llt: Rational,
    #[serde(with = "serde_rational")]
    pub p_lll: Rational,
    /// Weighted inconsistency `p_WWW + p_LLL + (p_WWT + p_LLT)/2 + (p_WTT + p_LTT)/6`.
    #[serde(with = "serde_rational")]
    pub e: Rational,
    /// Total inconsistency probability.
    #[serde(with = "serde_rational")]
    pub p: Rational,
    /// `p_111 + p_000` for Boolean functions.
    #[serde(with = "serde_rational_opt")]
    pub prob_a: Option<Rational>,
}

impl TripleStats {
    fn from_counts(levels: [u64; 3], size: u64, classes: [u64; 10], partitions: u64, kind: ValueKind) -> TripleStats {
        let q = |c: u64| ratio(c, partitions);
        let [l, t, w] = levels;
        let c = classes;
        let e = ratio(6 * (c[0] + c[9]) + 3 * (c[1] + c[8]) + (c[3] + c[7]), 6 * partitions);
        let p = q(c[0] + c[9] + c[1] + c[8] + c[3] + c[7]);
        TripleStats {
            partitions,
            p_w: ratio(w, size),
            p_t: ratio(t, size),
            p_l: ratio(l, size),
            b: ratio(w, size) - ratio(l, size),
            p_www: q(c[0]),
            p_wwt: q(c[1]),
            p_wwl: q(c[2]),
            p_wtt: q(c[3]),
            p_wtl: q(c[4]),
            p_wll: q(c[5]),
            p_ttt: q(c[6]),
            p_ltt: q(c[7]),
            p_llt: q(c[8]),
            p_lll: q(c[9]),
            e,
            p,
            prob_a: (kind == ValueKind::Boolean).then(|| q(c[0] + c[9])),
        }
    }
}

/// Precomputed index structure of the `k`-slice of `[3k]` for integer scans.
#[derive(Debug, Clone)]
pub struct SliceGeometry {
    pub n: usize,
    pub k: usize,
    pub masks: Vec<u32>,
    pub neighbours: Vec<Vec<u16>>,
    pub partitions: Vec<[u16; 3]>,
    /// Positions of slice elements containing each voter.
    pub by_voter: Vec<Vec<u16>>,
}

impl SliceGeometry {
    pub fn new(k: usize) -> Result<SliceGeometry> {
        let n = 3 * k;
        check_voter_count(n)?;
        let masks = masks_of_size(n, k);
        if masks.len() > u16::MAX as usize {
            return Err(SwfError::BudgetExceeded(format!("slice of size {}", masks.len())));
        }
        let pos = |m: u32| masks.binary_search(&m).unwrap() as u16;
        let neighbours = disjoint_neighbours(&masks)
            .into_iter()
            .map(|v| v.into_iter().map(|i| i as u16).collect())
            .collect();
        let partitions = ordered_partitions(n, [k, k, k]).into_iter().map(|p| p.map(pos)).collect();
        let by_voter = (0..n)
            .map(|v| (0..masks.len()).filter(|&i| masks[i] >> v & 1 == 1).map(|i| i as u16).collect())
            .collect();
        Ok(SliceGeometry { n, k, masks, neighbours, partitions, by_voter })
    }

    pub fn size(&self) -> usize {
        self.masks.len()
    }

    pub fn pair_count(&self) -> u64 {
        self.masks.len() as u64 * binomial_u64(2 * self.k, self.k)
    }

    /// Every level of the code vector is egalitarian.
    pub fn egalitarian(&self, codes: &[u8]) -> bool {
        for level in 0..3u8 {
            let count = |v: usize| self.by_voter[v].iter().filter(|&&i| codes[i as usize] == level).count();
            let c0 = count(0);
            if (1..self.n).any(|v| count(v) != c0) {
                return false;
            }
        }
        true
    }

    pub fn class_counts(&self, codes: &[u8]) -> [u64; 10] {
        let mut c = [0u64; 10];
        for p in &self.partitions {
            let idx = 9 * codes[p[0] as usize] as usize + 3 * codes[p[1] as usize] as usize + codes[p[2] as usize] as usize;
            c[CLASS_TABLE[idx] as usize] += 1;
        }
        c
    }

    pub fn level_counts(codes: &[u8]) -> [u64; 3] {
        let mut c = [0u64; 3];
        for &x in codes {
            c[x as usize] += 1;
        }
        c
    }

    /// Ordered disjoint pairs with both ends equal to `level`.
    pub fn stab_pairs(&self, codes: &[u8], level: u8) -> u64 {
        let mut s = 0u64;
        for (i, ys) in self.neighbours.iter().enumerate() {
            if codes[i] == level {
                s += ys.iter().filter(|&&y| codes[y as usize] == level).count() as u64;
            }
        }
        s
    }

    pub fn stats(&self, codes: &[u8], kind: ValueKind) -> TripleStats {
        TripleStats::from_counts(
            Self::level_counts(codes),
            self.size() as u64,
            self.class_counts(codes),
            self.partitions.len() as u64,
            kind,
        )
    }
}

/// Class probabilities of `g` over ordered `(k, k, k)`-partitions.
pub fn prob_same(g: &SliceFunction, kind: ValueKind) -> Result<TripleStats> {
    let k = middle_k(g)?;
    let codes = g.values.iter().map(|v| value_code(v, kind)).collect::<Result<Vec<_>>>()?;
    let geo = SliceGeometry::new(k)?;
    Ok(geo.stats(&codes, kind))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightProfile {
    #[serde(with = "crate::exact::serde_rational_vec")]
    pub weights: Vec<Rational>,
}

impl WeightProfile {
    pub fn total(&self) -> Rational {
        self.weights.iter().fold(Rational::zero(), |a, w| a + w)
    }

    /// `sum_d alpha_d^m W_d`.
    pub fn moment(&self, k: usize, m: u32) -> Result<Rational> {
        let mut s = Rational::zero();
        for (d, w) in self.weights.iter().enumerate() {
            s += alpha(k, d)?.pow(m as i32) * w;
        }
        Ok(s)
    }
}

/// Harmonic weights `W^(0..k)` from the moments `<g, T_R^m g>`, `m = 0..k`,
/// by solving the Vandermonde system in the distinct `alpha_d`.
pub fn harmonic_weights(g: &SliceFunction) -> Result<WeightProfile> {
    let k = middle_k(g)?;
    if k > MAX_MATRIX_K {
        return Err(SwfError::BudgetExceeded(format!("harmonic weights for k = {k} (limit {MAX_MATRIX_K})")));
    }
    let nb = disjoint_neighbours(&g.masks);
    let mut moments = Vec::with_capacity(k + 1);
    let mut h = g.clone();
    for _ in 0..=k {
        moments.push(g.inner(&h)?);
        h = apply_with(&nb, &h);
    }
    let alphas = SliceSpectrum::new(k)?.alphas;
    let system = (0..=k)
        .map(|m| alphas.iter().map(|a| a.pow(m as i32)).collect())
        .collect();
    let weights = solve_linear(system, moments).expect("alpha_d are pairwise distinct");
    Ok(WeightProfile { weights })
}

/// `(8 - 27p + 27p^2) / 8`.
pub fn prob_a_bound(p: &Rational) -> Rational {
    (int(8) - int(27) * p + int(27) * p * p) / int(8)
}

/// `p^2 - (p - p^2)/8` and `p^2 + (p - p^2)/4`.
pub fn stab_window(p: &Rational) -> (Rational, Rational) {
    let sq = p * p;
    let gap = p - &sq;
    (&sq - &gap / int(8), &sq + gap / int(4))
}

/// `((1 - p_T)(5 - 3 p_T) + 27 b^2) / 32`.
pub fn inconsistency_bound(p_t: &Rational, b: &Rational) -> Rational {
    ((int(1) - p_t) * (int(5) - int(3) * p_t) + int(27) * b * b) / int(32)
}

/// Vertex `(p*, value)` of the quadratic `(8 - 27p + 27p^2)/8`.
pub fn prob_a_bound_minimum() -> (Rational, Rational) {
    let (a, b, c) = (rat(27, 8), rat(-27, 8), int(1));
    let p = -&b / (int(2) * &a);
    let v = c - &b * &b / (int(4) * a);
    (p, v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMode {
    /// Every function on the slice.
    Exhaustive,
    /// Functions constant on `Z_n`-orbits.
    InvariantOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BooleanRecord {
    /// Values in ascending mask order, as `0`/`1`.
    pub values: String,
    #[serde(with = "serde_rational")]
    pub p: Rational,
    #[serde(with = "serde_rational")]
    pub stab: Rational,
    #[serde(with = "serde_rational")]
    pub prob_a: Rational,
    #[serde(with = "serde_rational")]
    pub bound: Rational,
    #[serde(with = "serde_rational")]
    pub slack: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceBoundsReport {
    pub n: usize,
    pub k: usize,
    pub mode: ScanMode,
    pub boolean_examined: u64,
    pub boolean_egalitarian: u64,
    pub prob_a_violations: Vec<String>,
    pub stab_violations: Vec<String>,
    pub identity_failures: Vec<String>,
    pub invariant_not_egalitarian: u64,
    #[serde(with = "serde_rational_opt")]
    pub min_prob_a_slack: Option<Rational>,
    #[serde(with = "serde_rational_opt")]
    pub min_stab_lower_slack: Option<Rational>,
    #[serde(with = "serde_rational_opt")]
    pub min_stab_upper_slack: Option<Rational>,
    #[serde(with = "serde_rational_opt")]
    pub min_prob_a: Option<Rational>,
    #[serde(with = "serde_rational")]
    pub bound_minimum: Rational,
    #[serde(with = "serde_rational")]
    pub bound_argmin: Rational,
    pub wtl_examined: u64,
    pub wtl_egalitarian: u64,
    pub wtl_violations: Vec<String>,
    #[serde(with = "serde_rational_opt")]
    pub min_wtl_slack: Option<Rational>,
    pub records: Vec<BooleanRecord>,
}

impl SliceBoundsReport {
    pub fn violation_count(&self) -> usize {
        self.prob_a_violations.len()
            + self.stab_violations.len()
            + self.identity_failures.len()
            + self.wtl_violations.len()
            + self.invariant_not_egalitarian as usize
    }
}

/// Largest number of WTL candidates a scan may visit.
pub const MAX_WTL_CANDIDATES: u64 = 20_000_000;

fn codes_string(codes: &[u8], kind: ValueKind) -> String {
    codes
        .iter()
        .map(|&c| match (kind, c) {
            (ValueKind::Boolean, 2) => '1',
            (ValueKind::Boolean, _) => '0',
            (_, 2) => 'W',
            (_, 1) => 'T',
            _ => 'L',
        })
        .collect()
}

/// Per-function integer outcome of the Boolean checks, on common denominators.
struct BoolEval {
    prob_a_slack: i128,
    stab_lower: i128,
    stab_upper: i128,
    identity: bool,
    mono: u64,
}

fn eval_boolean(geo: &SliceGeometry, codes: &[u8]) -> BoolEval {
    let n = geo.size() as i128;
    let d = binomial_u64(2 * geo.k, geo.k) as i128;
    let parts = geo.partitions.len() as i128;
    let o = codes.iter().filter(|&&c| c == 2).count() as i128;
    let s = geo.stab_pairs(codes, 2) as i128;
    let classes = geo.class_counts(codes);
    let mono = (classes[0] + classes[9]) as i128;
    BoolEval {
        // den 8 N^2 P
        prob_a_slack: 8 * n * n * mono - parts * (8 * n * n - 27 * o * n + 27 * o * o),
        // den 8 N^2 D
        stab_lower: 8 * n * s - d * (9 * o * o - o * n),
        // den 4 N^2 D
        stab_upper: d * (3 * o * o + o * n) - 4 * n * s,
        identity: mono * n * d == parts * (n * d - 3 * o * d + 3 * s),
        mono: mono as u64,
    }
}

/// Checks the probability bound, the stability window and their identity on
/// every egalitarian Boolean function in scope, and the weighted
/// inconsistency bound on every egalitarian WTL function in scope.
pub fn verify_slice_bounds(n: usize, mode: ScanMode) -> Result<SliceBoundsReport> {
    if !n.is_multiple_of(3) || n == 0 {
        return Err(SwfError::OutOfRange(format!("slice bounds need n = 3k, got {n}")));
    }
    let k = n / 3;
    let geo = SliceGeometry::new(k)?;
    let size = geo.size();
    // each candidate is a map from blocks of slice positions to codes
    let blocks: Vec<Vec<usize>> = match mode {
        ScanMode::Exhaustive => {
            if k > 2 {
                return Err(SwfError::BudgetExceeded(format!("exhaustive slice scan at n = {n} (limit n = 6)")));
            }
            (0..size).map(|i| vec![i]).collect()
        }
        ScanMode::InvariantOnly => {
            let group = PermutationGroup::cyclic(n)?;
            group
                .mask_orbits(&geo.masks)
                .into_iter()
                .map(|o| o.into_iter().map(|m| geo.masks.binary_search(&m).unwrap()).collect())
                .collect()
        }
    };
    let b = blocks.len() as u32;
    if b > 40 || 3u64.pow(b) > MAX_WTL_CANDIDATES {
        return Err(SwfError::BudgetExceeded(format!("{} orbits/positions at n = {n}", b)));
    }
    let expand = |mut idx: u64, base: u64, hi: u8, lo: u8| -> Vec<u8> {
        let mut codes = vec![0u8; size];
        for blk in &blocks {
            let digit = idx % base;
            idx /= base;
            let code = if base == 2 { if digit == 1 { hi } else { lo } } else { digit as u8 };
            for &i in blk {
                codes[i] = code;
            }
        }
        codes
    };

    let (bound_argmin, bound_minimum) = prob_a_bound_minimum();
    let mut report = SliceBoundsReport {
        n,
        k,
        mode,
        boolean_examined: 1 << b,
        boolean_egalitarian: 0,
        prob_a_violations: vec![],
        stab_violations: vec![],
        identity_failures: vec![],
        invariant_not_egalitarian: 0,
        min_prob_a_slack: None,
        min_stab_lower_slack: None,
        min_stab_upper_slack: None,
        min_prob_a: None,
        bound_minimum,
        bound_argmin,
        wtl_examined: 3u64.pow(b),
        wtl_egalitarian: 0,
        wtl_violations: vec![],
        min_wtl_slack: None,
        records: vec![],
    };

    let nn = size as i128;
    let d = binomial_u64(2 * k, k) as i128;
    let parts = geo.partitions.len() as i128;

    // Boolean scan
    let bool_results: Vec<(Vec<u8>, BoolEval)> = (0..1u64 << b)
        .into_par_iter()
        .filter_map(|idx| {
            let codes = expand(idx, 2, 2, 0);
            geo.egalitarian(&codes).then(|| {
                let e = eval_boolean(&geo, &codes);
                (codes, e)
            })
        })
        .collect();
    if mode == ScanMode::InvariantOnly {
        report.invariant_not_egalitarian = (1u64 << b) - bool_results.len() as u64;
    }
    report.boolean_egalitarian = bool_results.len() as u64;
    let mut min_pa: Option<i128> = None;
    let mut min_lo: Option<i128> = None;
    let mut min_hi: Option<i128> = None;
    let mut min_mono: Option<u64> = None;
    for (codes, e) in &bool_results {
        let name = codes_string(codes, ValueKind::Boolean);
        if e.prob_a_slack < 0 {
            report.prob_a_violations.push(name.clone());
        }
        if e.stab_lower < 0 || e.stab_upper < 0 {
            report.stab_violations.push(name.clone());
        }
        if !e.identity {
            report.identity_failures.push(name.clone());
        }
        min_pa = Some(min_pa.map_or(e.prob_a_slack, |m| m.min(e.prob_a_slack)));
        min_lo = Some(min_lo.map_or(e.stab_lower, |m| m.min(e.stab_lower)));
        min_hi = Some(min_hi.map_or(e.stab_upper, |m| m.min(e.stab_upper)));
        min_mono = Some(min_mono.map_or(e.mono, |m| m.min(e.mono)));
        let o = codes.iter().filter(|&&c| c == 2).count() as u64;
        let p = ratio(o, size as u64);
        let stab = ratio(geo.stab_pairs(codes, 2), geo.pair_count());
        let prob_a = ratio(e.mono, parts as u64);
        let bound = prob_a_bound(&p);
        let slack = &prob_a - &bound;
        report.records.push(BooleanRecord { values: name, p, stab, prob_a, bound, slack });
    }
    let frac = |num: i128, den: i128| Rational::new(BigInt::from(num), BigInt::from(den));
    report.min_prob_a_slack = min_pa.map(|v| frac(v, 8 * nn * nn * parts));
    report.min_stab_lower_slack = min_lo.map(|v| frac(v, 8 * nn * nn * d));
    report.min_stab_upper_slack = min_hi.map(|v| frac(v, 4 * nn * nn * d));
    report.min_prob_a = min_mono.map(|m| ratio(m, parts as u64));

    // WTL scan: slack numerator over 32 * 6P * N^2
    let wtl: Vec<(u64, i128)> = (0..3u64.pow(b))
        .into_par_iter()
        .filter_map(|idx| {
            let codes = expand(idx, 3, 2, 0);
            if !geo.egalitarian(&codes) {
                return None;
            }
            let [l, t, w] = SliceGeometry::level_counts(&codes).map(|x| x as i128);
            let c = geo.class_counts(&codes).map(|x| x as i128);
            let s6 = 6 * (c[0] + c[9]) + 3 * (c[1] + c[8]) + (c[3] + c[7]);
            let q = (nn - t) * (5 * nn - 3 * t) + 27 * (w - l) * (w - l);
            Some((idx, 32 * s6 * nn * nn - 6 * parts * q))
        })
        .collect();
    report.wtl_egalitarian = wtl.len() as u64;
    let mut min_w: Option<i128> = None;
    for &(idx, slack) in &wtl {
        if slack < 0 {
            report.wtl_violations.push(codes_string(&expand(idx, 3, 2, 0), ValueKind::Wtl));
        }
        min_w = Some(min_w.map_or(slack, |m| m.min(slack)));
    }
    report.min_wtl_slack = min_w.map(|v| frac(v, 32 * 6 * parts * nn * nn));
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BordaCubeOutcome {
    /// `X` below the middle slice, `T` on it, `-X` above.
    Form(RelResult),
    /// First subset, by `(|U|, mask)`, where the form fails.
    Violation(SubsetMask),
}

/// For `n = 3k` with `(g, g, g)` consistent and an egalitarian middle slice,
/// checks that `g` has the unweighted Borda shape.
pub fn check_borda_cube(g: &SetFunctionWTL) -> Result<BordaCubeOutcome> {
    let n = g.n();
    if !n.is_multiple_of(3) {
        return Err(SwfError::OutOfRange(format!("expected n = 3k, got {n}")));
    }
    let k = n / 3;
    if check_triple_consistency(g, g, g)?.is_some() {
        return Err(SwfError::InconsistentTriple);
    }
    if !check_egalitarian(&SliceFunction::from_set_function(g, k)?) {
        return Err(SwfError::Unsupported("restriction to the middle slice is not egalitarian".into()));
    }
    let x = g.get(0);
    let mut order: Vec<u32> = (0..1u32 << n).collect();
    order.sort_by_key(|&u| (u.count_ones(), u));
    for u in order {
        let expected = match (u.count_ones() as usize).cmp(&k) {
            std::cmp::Ordering::Less => x,
            std::cmp::Ordering::Equal => RelResult::T,
            std::cmp::Ordering::Greater => -x,
        };
        if g.get(u) != expected {
            return Ok(BordaCubeOutcome::Violation(SubsetMask(u)));
        }
    }
    Ok(BordaCubeOutcome::Form(x))
}
