//! The double slice `S_k ∪ S_{k+1}` for `n = 3k + 1` and `n = 3k + 2`:
//! cross replacement operators, the eigenvalue quadratic, and exact scans of
//! the dichotomy and agreement bounds.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::axioms::{check_pr, PermutationGroup};
use crate::combin::{canonical_chi, masks_of_size, ordered_partitions};
use crate::csp::TripleCsp;
use crate::domain::{check_voter_count, RelResult, SetFunctionWTL};
use crate::error::{Result, SwfError};
use crate::exact::{
    at_least_over_sqrt, binomial, int, rat, ratio, rat_to_f64, rational_sqrt, serde_rational,
    serde_rational_opt, serde_rational_vec, QuadraticSurd, Rational,
};
use crate::slice::{check_egalitarian, RationalMatrix, SliceFunction};

/// Slice sizes: `x_1` has `k1` voters, `x_2` and `x_3` have `k2` each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleSliceConfig {
    pub n: usize,
    pub k: usize,
    pub k1: usize,
    pub k2: usize,
}

impl DoubleSliceConfig {
    pub fn new(n: usize) -> Result<DoubleSliceConfig> {
        if n.is_multiple_of(3) || n < 4 {
            return Err(SwfError::OutOfRange(format!("double slice needs n >= 4 and 3 ∤ n, got {n}")));
        }
        let k = n / 3;
        let k1 = if n % 3 == 1 { k + 1 } else { k };
        Ok(DoubleSliceConfig { n, k, k1, k2: (n - k1) / 2 })
    }

    pub fn is_plus_one(&self) -> bool {
        self.n % 3 == 1
    }
}

/// `(-1)^d C(n - ki - d, kj - d) / C(n - ki, kj)`, zero when `d > kj`.
fn alpha_cross_ext(n: usize, ki: usize, kj: usize, d: usize) -> Rational {
    let (n, ki, kj, d) = (n as i64, ki as i64, kj as i64, d as i64);
    let v = Rational::new(binomial(n - ki - d, kj - d), binomial(n - ki, kj));
    if d % 2 == 1 {
        -v
    } else {
        v
    }
}

/// Eigenvalue of `T_{ki,kj}` on degree-`d` harmonics.
pub fn alpha_cross(cfg: &DoubleSliceConfig, ki: usize, kj: usize, d: usize) -> Result<Rational> {
    if d > kj || ki + kj > cfg.n {
        return Err(SwfError::OutOfRange(format!(
            "alpha_cross(ki = {ki}, kj = {kj}, d = {d}) at n = {}",
            cfg.n
        )));
    }
    Ok(alpha_cross_ext(cfg.n, ki, kj, d))
}

/// `q(λ) = 2λ^2 - s λ - c` with `s = α^{(k2,k2)}_d`, `c = α^{(k1,k2)}_d α^{(k2,k1)}_d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quadratic {
    pub s: Rational,
    pub c: Rational,
}

impl Quadratic {
    pub fn for_degree(cfg: &DoubleSliceConfig, d: usize) -> Quadratic {
        let (n, k1, k2) = (cfg.n, cfg.k1, cfg.k2);
        Quadratic {
            s: alpha_cross_ext(n, k2, k2, d),
            c: alpha_cross_ext(n, k1, k2, d) * alpha_cross_ext(n, k2, k1, d),
        }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        int(2) * x * x - &self.s * x - &self.c
    }

    pub fn eval_surd(&self, x: &QuadraticSurd) -> QuadraticSurd {
        let two = QuadraticSurd::from_rational(int(2));
        two * x.clone() * x.clone() - x.scale(&self.s) - QuadraticSurd::from_rational(self.c.clone())
    }

    pub fn discriminant(&self) -> Rational {
        &self.s * &self.s + int(8) * &self.c
    }

    pub fn roots(&self) -> Result<RootPair> {
        let (t, u) = rational_sqrt(&self.discriminant())?;
        Ok(RootPair { s: self.s.clone(), t, u })
    }

    /// Whether the smaller root exceeds `b`: `q(b) > 0` with `b` left of the vertex.
    pub fn smaller_root_exceeds(&self, b: &Rational) -> bool {
        self.eval(b).is_positive() && *b < &self.s / int(4)
    }
}

/// The roots `(s ± t sqrt(u)) / 4`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootPair {
    #[serde(with = "serde_rational")]
    pub s: Rational,
    #[serde(with = "serde_rational")]
    pub t: Rational,
    #[serde(with = "crate::exact::serde_bigint")]
    pub u: BigInt,
}

impl RootPair {
    pub fn plus(&self) -> QuadraticSurd {
        QuadraticSurd::new(&self.s / int(4), &self.t / int(4), self.u.clone())
    }

    pub fn minus(&self) -> QuadraticSurd {
        QuadraticSurd::new(&self.s / int(4), -&self.t / int(4), self.u.clone())
    }

    pub fn is_rational(&self) -> bool {
        self.t.is_zero() || self.u.is_one()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LambdaEigen {
    /// `λ_d^±` for `d <= k`.
    Pair(RootPair),
    /// `λ_{k+1}`.
    Top(Rational),
}

pub fn lambda_eigen(cfg: &DoubleSliceConfig, d: usize) -> Result<LambdaEigen> {
    if d > cfg.k + 1 {
        return Err(SwfError::OutOfRange(format!("eigenvalue index {d} > k + 1 = {}", cfg.k + 1)));
    }
    if d <= cfg.k {
        return Ok(LambdaEigen::Pair(Quadratic::for_degree(cfg, d).roots()?));
    }
    Ok(LambdaEigen::Top(lambda_top(cfg)))
}

/// `0` for `n = 3k + 1`, `α^{(k+1,k+1)}_{k+1} / 2` for `n = 3k + 2`.
pub fn lambda_top(cfg: &DoubleSliceConfig) -> Rational {
    if cfg.is_plus_one() {
        Rational::zero()
    } else {
        alpha_cross_ext(cfg.n, cfg.k + 1, cfg.k + 1, cfg.k + 1) / int(2)
    }
}

/// One degree of the cross spectrum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossRow {
    pub d: usize,
    #[serde(with = "serde_rational")]
    pub alpha_12: Rational,
    #[serde(with = "serde_rational")]
    pub alpha_21: Rational,
    #[serde(with = "serde_rational")]
    pub alpha_22: Rational,
    pub lambda: RootPair,
}

/// Cross eigenvalues for `d <= k` and `λ_{k+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossSpectrum {
    pub config: DoubleSliceConfig,
    pub rows: Vec<CrossRow>,
    #[serde(with = "serde_rational")]
    pub lambda_top: Rational,
}

impl CrossSpectrum {
    pub fn new(cfg: &DoubleSliceConfig) -> Result<CrossSpectrum> {
        let (n, k1, k2) = (cfg.n, cfg.k1, cfg.k2);
        let rows = (0..=cfg.k)
            .map(|d| {
                Ok(CrossRow {
                    d,
                    alpha_12: alpha_cross_ext(n, k1, k2, d),
                    alpha_21: alpha_cross_ext(n, k2, k1, d),
                    alpha_22: alpha_cross_ext(n, k2, k2, d),
                    lambda: Quadratic::for_degree(cfg, d).roots()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CrossSpectrum { config: *cfg, rows, lambda_top: lambda_top(cfg) })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stab12Report {
    pub k_min: usize,
    pub k_max: usize,
    pub quadratics_checked: u64,
    pub residual_failures: Vec<String>,
    pub lower_bound_violations: Vec<String>,
    /// Cases where the sign test and the surd comparison disagree.
    pub method_disagreements: Vec<String>,
    pub top_violations: Vec<String>,
    /// Numeric only: cases with `λ_d^+ >= 1/4`.
    pub upper_numeric_violations: Vec<String>,
    /// Smallest `λ_d^- - bound` seen, as a float for display.
    pub min_lower_margin: f64,
}

impl Stab12Report {
    pub fn violation_count(&self) -> usize {
        self.residual_failures.len()
            + self.lower_bound_violations.len()
            + self.method_disagreements.len()
            + self.top_violations.len()
    }
}

/// Residuals at every root for `d <= k + 1`, the lower bounds for
/// `2 <= d <= k`, and `λ_{k+1} > -1/8`, for both `n = 3k+1` and `n = 3k+2`.
pub fn verify_stab12_bounds(k_min: usize, k_max: usize) -> Result<Stab12Report> {
    if k_min < 2 || k_min > k_max {
        return Err(SwfError::OutOfRange(format!("need 2 <= k_min <= k_max, got {k_min}..{k_max}")));
    }
    let mut r = Stab12Report {
        k_min,
        k_max,
        quadratics_checked: 0,
        residual_failures: vec![],
        lower_bound_violations: vec![],
        method_disagreements: vec![],
        top_violations: vec![],
        upper_numeric_violations: vec![],
        min_lower_margin: f64::INFINITY,
    };
    let eighth = rat(-1, 8);
    for k in k_min..=k_max {
        for n in [3 * k + 1, 3 * k + 2] {
            let cfg = DoubleSliceConfig::new(n)?;
            for d in 0..=k + 1 {
                let q = Quadratic::for_degree(&cfg, d);
                let roots = q.roots()?;
                r.quadratics_checked += 1;
                for (name, root) in [("+", roots.plus()), ("-", roots.minus())] {
                    if !q.eval_surd(&root).is_zero() {
                        r.residual_failures.push(format!("n={n} d={d} root{name}"));
                    }
                }
                if (2..=k).contains(&d) {
                    let mut bounds = vec![-rat(1, 8) - rat(1, 6 * k as i64)];
                    if !cfg.is_plus_one() {
                        bounds.push(eighth.clone());
                    }
                    for b in bounds {
                        let by_sign = q.smaller_root_exceeds(&b);
                        let by_surd = roots.minus().cmp_rational(&b) == Ordering::Greater;
                        if by_sign != by_surd {
                            r.method_disagreements.push(format!("n={n} d={d} bound={b}"));
                        }
                        if !by_sign {
                            r.lower_bound_violations.push(format!("n={n} d={d} bound={b}"));
                        }
                        let margin = roots.minus().to_f64() - rat_to_f64(&b);
                        r.min_lower_margin = r.min_lower_margin.min(margin);
                    }
                    if roots.plus().to_f64() >= 0.25 {
                        r.upper_numeric_violations.push(format!("n={n} d={d}"));
                    }
                }
            }
            let top = lambda_top(&cfg);
            let q = Quadratic::for_degree(&cfg, k + 1);
            if !q.eval(&top).is_zero() {
                r.residual_failures.push(format!("n={n} top"));
            }
            if top <= eighth {
                r.top_violations.push(format!("n={n}"));
            }
        }
    }
    Ok(r)
}

/// Largest `n` for which the dense `T` matrix is built.
pub const MAX_OPERATOR_N: usize = 10;

/// Uniform transition matrix from `S_ki` to disjoint members of `S_kj`;
/// rows follow `S_ki`, columns `S_kj`, both in ascending mask order.
pub fn cross_matrix(n: usize, ki: usize, kj: usize) -> Result<(Vec<u32>, Vec<u32>, RationalMatrix)> {
    check_voter_count(n)?;
    if n > MAX_OPERATOR_N || ki + kj > n {
        return Err(SwfError::BudgetExceeded(format!("cross matrix ({ki},{kj}) at n = {n}")));
    }
    let rows = masks_of_size(n, ki);
    let cols = masks_of_size(n, kj);
    let p = Rational::new(BigInt::one(), binomial((n - ki) as i64, kj as i64));
    let mut m = RationalMatrix::zeros(rows.len(), cols.len());
    for (r, &x) in rows.iter().enumerate() {
        for (c, &y) in cols.iter().enumerate() {
            if x & y == 0 {
                m.set(r, c, p.clone());
            }
        }
    }
    Ok((rows, cols, m))
}

/// `(ki, kj, d, holds)` for every operator `T_{ki,kj}` used on the double
/// slice and every `d` with `2d <= n` and `d <= max(ki, kj)`.
pub fn cross_spectral_check(cfg: &DoubleSliceConfig) -> Result<Vec<(usize, usize, usize, bool)>> {
    let (k1, k2) = (cfg.k1, cfg.k2);
    let mut out = Vec::new();
    for (ki, kj) in [(k1, k2), (k2, k1), (k2, k2)] {
        let (rows, cols, m) = cross_matrix(cfg.n, ki, kj)?;
        for d in 0..=ki.max(kj) {
            if 2 * d > cfg.n {
                continue;
            }
            let chi_in: Vec<Rational> = cols.iter().map(|&y| int(canonical_chi(d, y))).collect();
            let a = alpha_cross_ext(cfg.n, ki, kj, d);
            let want: Vec<Rational> = rows.iter().map(|&x| int(canonical_chi(d, x)) * &a).collect();
            out.push((ki, kj, d, m.apply(&chi_in) == want));
        }
    }
    Ok(out)
}

/// A function on `S_{k1} ∪ S_{k2}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleSliceFunction {
    pub config: DoubleSliceConfig,
    pub f1: SliceFunction,
    pub f2: SliceFunction,
}

impl DoubleSliceFunction {
    pub fn new(n: usize, f: impl Fn(u32) -> Rational) -> Result<DoubleSliceFunction> {
        let config = DoubleSliceConfig::new(n)?;
        Ok(DoubleSliceFunction {
            config,
            f1: SliceFunction::new(n, config.k1, &f)?,
            f2: SliceFunction::new(n, config.k2, &f)?,
        })
    }

    pub fn boolean(n: usize, f: impl Fn(u32) -> bool) -> Result<DoubleSliceFunction> {
        DoubleSliceFunction::new(n, |m| if f(m) { Rational::one() } else { Rational::zero() })
    }

    pub fn get(&self, mask: u32) -> Option<&Rational> {
        match mask.count_ones() as usize {
            t if t == self.config.k1 => self.f1.get(mask),
            t if t == self.config.k2 => self.f2.get(mask),
            _ => None,
        }
    }

    pub fn p1(&self) -> Rational {
        self.f1.mean()
    }

    pub fn p2(&self) -> Rational {
        self.f2.mean()
    }

    /// `E_Σ g = (p1 + 2 p2) / 3`.
    pub fn p(&self) -> Rational {
        (self.p1() + int(2) * self.p2()) / int(3)
    }

    /// `<f, g>` under `Σ`.
    pub fn inner(&self, other: &DoubleSliceFunction) -> Result<Rational> {
        Ok((self.f1.inner(&other.f1)? + int(2) * self.f2.inner(&other.f2)?) / int(3))
    }

    /// `Stab_{ki,kj}(g) = <T_{ki,kj} g_kj, g_ki>_ki`.
    pub fn stab_cross(&self, from: &SliceFunction, to: &SliceFunction) -> Rational {
        let mut total = Rational::zero();
        for (x, gx) in from.masks().iter().zip(from.values()) {
            if gx.is_zero() {
                continue;
            }
            let (sum, cnt) = to
                .masks()
                .iter()
                .zip(to.values())
                .filter(|(y, _)| *x & **y == 0)
                .fold((Rational::zero(), 0i64), |(s, c), (_, gy)| (s + gy, c + 1));
            total += gx * sum / int(cnt);
        }
        total / int(from.len() as i64)
    }

    pub fn stab_12(&self) -> Rational {
        self.stab_cross(&self.f1, &self.f2)
    }

    pub fn stab_22(&self) -> Rational {
        self.stab_cross(&self.f2, &self.f2)
    }

    /// `(Stab_{k2,k2} + 2 Stab_{k1,k2}) / 3`.
    pub fn stab(&self) -> Rational {
        (self.stab_22() + int(2) * self.stab_12()) / int(3)
    }

    pub fn is_egalitarian(&self) -> bool {
        check_egalitarian(&self.f1) && check_egalitarian(&self.f2)
    }
}

/// Boolean reduction of a set function: `W -> 1`, `L -> 0`, and `T -> 1`
/// below `n/3`, `0` above.
pub fn gprime_transform(g: &SetFunctionWTL) -> Result<DoubleSliceFunction> {
    let n = g.n();
    if n.is_multiple_of(3) {
        return Err(SwfError::OutOfRange(format!("g' needs 3 ∤ n, got {n}")));
    }
    DoubleSliceFunction::boolean(n, |m| match g.get(m) {
        RelResult::W => true,
        RelResult::L => false,
        RelResult::T => 3 * (m.count_ones() as usize) < n,
    })
}

/// `P[g(x1) = g(x2) = g(x3)]` over ordered `(k1, k2, k2)`-partitions.
pub fn prob_monochromatic_d(g: &DoubleSliceFunction) -> Rational {
    let c = g.config;
    let parts = ordered_partitions(c.n, [c.k1, c.k2, c.k2]);
    let mono = parts
        .iter()
        .filter(|p| {
            let a = g.f1.get(p[0]).unwrap();
            a == g.f2.get(p[1]).unwrap() && a == g.f2.get(p[2]).unwrap()
        })
        .count();
    ratio(mono as u64, parts.len() as u64)
}

/// Squared norm of the projection onto `1_{S_k1} - 1_{S_k2} / 2` under `Σ`.
pub fn w0_minus(g: &DoubleSliceFunction) -> Rational {
    let e = DoubleSliceFunction {
        config: g.config,
        f1: g.f1.map(|_| Rational::one()),
        f2: g.f2.map(|_| rat(-1, 2)),
    };
    let ge = g.inner(&e).expect("same slices");
    let ee = e.inner(&e).expect("same slices");
    &ge * &ge / ee
}

/// The full operator `T` on `S_{k1} ∪ S_{k2}` with `Σ` weights.
#[derive(Debug, Clone)]
pub struct TOperator {
    pub config: DoubleSliceConfig,
    /// `S_{k1}` masks then `S_{k2}` masks.
    pub masks: Vec<u32>,
    pub split: usize,
    pub sigma: Vec<Rational>,
    pub matrix: RationalMatrix,
}

impl TOperator {
    pub fn new(cfg: &DoubleSliceConfig) -> Result<TOperator> {
        if cfg.n > MAX_OPERATOR_N {
            return Err(SwfError::BudgetExceeded(format!("T operator at n = {} (limit {MAX_OPERATOR_N})", cfg.n)));
        }
        let (n, k1, k2) = (cfg.n, cfg.k1, cfg.k2);
        let s1 = masks_of_size(n, k1);
        let s2 = masks_of_size(n, k2);
        let split = s1.len();
        let masks: Vec<u32> = s1.iter().chain(&s2).copied().collect();
        let mut sigma = vec![Rational::new(BigInt::one(), BigInt::from(3 * s1.len())); s1.len()];
        sigma.extend(vec![Rational::new(BigInt::from(2), BigInt::from(3 * s2.len())); s2.len()]);
        let to2_from1 = Rational::new(BigInt::one(), binomial((n - k1) as i64, k2 as i64));
        let to2_from2 = Rational::new(BigInt::one(), int(2).to_integer() * binomial((n - k2) as i64, k2 as i64));
        let to1_from2 = Rational::new(BigInt::one(), int(2).to_integer() * binomial((n - k2) as i64, k1 as i64));
        let mut matrix = RationalMatrix::zeros(masks.len(), masks.len());
        for (r, &x) in masks.iter().enumerate() {
            for (c, &y) in masks.iter().enumerate() {
                if x & y != 0 {
                    continue;
                }
                let v = match (r < split, c < split) {
                    (true, false) => to2_from1.clone(),
                    (false, false) => to2_from2.clone(),
                    (false, true) => to1_from2.clone(),
                    (true, true) => continue,
                };
                matrix.set(r, c, v);
            }
        }
        Ok(TOperator { config: *cfg, masks, split, sigma, matrix })
    }

    pub fn inner(&self, f: &[Rational], g: &[Rational]) -> Rational {
        f.iter().zip(g).zip(&self.sigma).fold(Rational::zero(), |a, ((x, y), w)| a + x * y * w)
    }

    pub fn vector(&self, g: &DoubleSliceFunction) -> Vec<Rational> {
        self.masks.iter().map(|&m| g.get(m).unwrap().clone()).collect()
    }

    /// `σ(x) T(x, y) = σ(y) T(y, x)` for every pair.
    pub fn detailed_balance(&self) -> bool {
        let m = &self.matrix;
        (0..m.rows).all(|r| (0..m.cols).all(|c| &self.sigma[r] * m.get(r, c) == &self.sigma[c] * m.get(c, r)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TOperatorReport {
    pub n: usize,
    pub size: usize,
    pub detailed_balance: bool,
    pub random_pairs: u64,
    pub adjoint_failures: u64,
    pub stab_identity_failures: u64,
    /// `T χ^{(k+1)} = λ_{k+1} χ^{(k+1)}`.
    pub top_eigenvector: bool,
    /// Action on `a χ^{(k2)} + b χ^{(k1)}` for each `d <= k`.
    pub block_action: bool,
    /// Rational `λ_d^±` admit eigenvectors `λ χ^{(k2)} + α^{(k1,k2)}_d χ^{(k1)}`.
    pub rational_eigenvectors: bool,
}

impl TOperatorReport {
    pub fn passed(&self) -> bool {
        self.detailed_balance
            && self.adjoint_failures == 0
            && self.stab_identity_failures == 0
            && self.top_eigenvector
            && self.block_action
            && self.rational_eigenvectors
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(-9..=9), rng.gen_range(1..=7))
}

/// Self-adjointness, the `Stab` decomposition and the eigen-structure of `T`.
pub fn t_operator_check(cfg: &DoubleSliceConfig, samples: u64, seed: u64) -> Result<TOperatorReport> {
    let t = TOperator::new(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = t.masks.len();
    let mut adjoint_failures = 0;
    let mut stab_identity_failures = 0;
    for _ in 0..samples {
        let f: Vec<Rational> = (0..size).map(|_| random_rational(&mut rng)).collect();
        let g: Vec<Rational> = (0..size).map(|_| random_rational(&mut rng)).collect();
        let tf = t.matrix.apply(&f);
        let tg = t.matrix.apply(&g);
        if t.inner(&f, &tg) != t.inner(&tf, &g) {
            adjoint_failures += 1;
        }
        let gf = DoubleSliceFunction::new(cfg.n, |m| g[t.masks.iter().position(|&x| x == m).unwrap()].clone())?;
        if t.inner(&g, &tg) != gf.stab() {
            stab_identity_failures += 1;
        }
    }
    let chi = |d: usize| -> Vec<Rational> {
        // χ^{(k2)} part and χ^{(k1)} part as separate vectors on the union
        t.masks.iter().map(|&m| int(canonical_chi(d, m))).collect()
    };
    let on = |v: &[Rational], first: bool| -> Vec<Rational> {
        v.iter()
            .enumerate()
            .map(|(i, x)| if (i < t.split) == first { x.clone() } else { Rational::zero() })
            .collect()
    };
    let k = cfg.k;
    let top = chi(k + 1);
    let lam = lambda_top(cfg);
    let top_eigenvector = 2 * (k + 1) > cfg.n || t.matrix.apply(&top) == top.iter().map(|x| x * &lam).collect::<Vec<_>>();
    let mut block_action = true;
    let mut rational_eigenvectors = true;
    for d in 0..=k {
        if 2 * d > cfg.n {
            continue;
        }
        let c = chi(d);
        let c1 = on(&c, true);
        let c2 = on(&c, false);
        let a22 = alpha_cross_ext(cfg.n, cfg.k2, cfg.k2, d);
        let a12 = alpha_cross_ext(cfg.n, cfg.k1, cfg.k2, d);
        let a21 = alpha_cross_ext(cfg.n, cfg.k2, cfg.k1, d);
        // T χ^{a,b} = χ^{(a α22 + b α21)/2, a α12}
        for (a, b) in [(int(1), int(0)), (int(0), int(1))] {
            let v: Vec<Rational> = c2.iter().zip(&c1).map(|(x, y)| x * &a + y * &b).collect();
            let na = (&a * &a22 + &b * &a21) / int(2);
            let nb = &a * &a12;
            let want: Vec<Rational> = c2.iter().zip(&c1).map(|(x, y)| x * &na + y * &nb).collect();
            if t.matrix.apply(&v) != want {
                block_action = false;
            }
        }
        let roots = Quadratic::for_degree(cfg, d).roots()?;
        if roots.is_rational() {
            for root in [roots.plus(), roots.minus()] {
                let l = root.rational.clone();
                let v: Vec<Rational> = c2.iter().zip(&c1).map(|(x, y)| x * &l + y * &a12).collect();
                if v.iter().all(Zero::is_zero) {
                    continue;
                }
                let want: Vec<Rational> = v.iter().map(|x| x * &l).collect();
                if t.matrix.apply(&v) != want {
                    rational_eigenvectors = false;
                }
            }
        }
    }
    Ok(TOperatorReport {
        n: cfg.n,
        size,
        detailed_balance: t.detailed_balance(),
        random_pairs: samples,
        adjoint_failures,
        stab_identity_failures,
        top_eigenvector,
        block_action,
        rational_eigenvectors,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoSliceRecord {
    /// Orbit values, `S_{k1}` orbits first.
    pub values: String,
    #[serde(with = "serde_rational")]
    pub p1: Rational,
    #[serde(with = "serde_rational")]
    pub p2: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoSliceReport {
    pub n: usize,
    pub k: usize,
    pub k1: usize,
    pub k2: usize,
    pub orbits_k1: usize,
    pub orbits_k2: usize,
    pub search_nodes: u64,
    pub qualifying: u64,
    pub dichotomy_violations: Vec<String>,
    /// Whether `(p1 - 1/2)^2 > 25/108` is asserted (only for `n = 3k + 2`).
    pub bound_asserted: bool,
    pub bound_violations: Vec<String>,
    pub identity_failures: Vec<String>,
    pub w0_failures: Vec<String>,
    pub not_egalitarian: Vec<String>,
    #[serde(with = "serde_rational_opt")]
    pub min_p1_offset_sq: Option<Rational>,
    pub records: Vec<TwoSliceRecord>,
}

impl TwoSliceReport {
    pub fn violation_count(&self) -> usize {
        self.dichotomy_violations.len()
            + self.bound_violations.len()
            + self.identity_failures.len()
            + self.w0_failures.len()
            + self.not_egalitarian.len()
    }
}

/// Supported electorates for the two-slice scan.
pub const TWO_SLICE_SIZES: [usize; 4] = [7, 8, 10, 11];

/// Largest number of qualifying functions collected by the scan.
pub const MAX_TWO_SLICE_SOLUTIONS: u64 = 5_000_000;

pub type TwoSliceCsp = (Vec<Vec<u32>>, Vec<Vec<u32>>, TripleCsp);

/// Orbits of `Z_n` on `S_{k1}` and `S_{k2}` with the forbidden-monochromatic
/// search problem over them.
pub fn two_slice_csp(cfg: &DoubleSliceConfig) -> Result<TwoSliceCsp> {
    let group = PermutationGroup::cyclic(cfg.n)?;
    let o1 = group.mask_orbits(&masks_of_size(cfg.n, cfg.k1));
    let o2 = group.mask_orbits(&masks_of_size(cfg.n, cfg.k2));
    let mut id = std::collections::HashMap::new();
    for (i, o) in o1.iter().chain(&o2).enumerate() {
        for &m in o {
            id.insert(m, i);
        }
    }
    let mut forbidden = [false; 27];
    forbidden[0] = true;
    forbidden[13] = true;
    let mut csp = TripleCsp::new(o1.len() + o2.len(), 2, forbidden);
    for p in ordered_partitions(cfg.n, [cfg.k1, cfg.k2, cfg.k2]) {
        csp.add_triple(id[&p[0]], id[&p[1]], id[&p[2]]);
    }
    csp.finish();
    Ok((o1, o2, csp))
}

/// All `Z_n`-invariant Boolean functions on the double slice with no
/// monochromatic `(k1, k2, k2)`-partition, checked against the dichotomy,
/// the `0 = 1 - 3p + 3 Stab` identity, the `W^{0,-}` value, and for
/// `n = 3k + 2` the bound `(p1 - 1/2)^2 > 25/108`.
pub fn verify_two_slice(n: usize) -> Result<TwoSliceReport> {
    if !TWO_SLICE_SIZES.contains(&n) {
        return Err(SwfError::BudgetExceeded(format!("two-slice scan supports n in {TWO_SLICE_SIZES:?}, got {n}")));
    }
    let cfg = DoubleSliceConfig::new(n)?;
    let (o1, o2, csp) = two_slice_csp(&cfg)?;
    let out = csp.solve_all(MAX_TWO_SLICE_SOLUTIONS)?;
    let half = rat(1, 2);
    let threshold = rat(25, 108);
    let mut report = TwoSliceReport {
        n,
        k: cfg.k,
        k1: cfg.k1,
        k2: cfg.k2,
        orbits_k1: o1.len(),
        orbits_k2: o2.len(),
        search_nodes: out.nodes,
        qualifying: out.solutions.len() as u64,
        dichotomy_violations: vec![],
        bound_asserted: !cfg.is_plus_one(),
        bound_violations: vec![],
        identity_failures: vec![],
        w0_failures: vec![],
        not_egalitarian: vec![],
        min_p1_offset_sq: None,
        records: vec![],
    };
    let size1 = masks_of_size(n, cfg.k1).len() as u64;
    let size2 = masks_of_size(n, cfg.k2).len() as u64;
    for sol in &out.solutions {
        let name: String = sol.iter().map(|&v| if v == 1 { '1' } else { '0' }).collect();
        let ones = |orbits: &[Vec<u32>], offset: usize| -> u64 {
            orbits.iter().enumerate().filter(|(i, _)| sol[offset + i] == 1).map(|(_, o)| o.len() as u64).sum()
        };
        let p1 = ratio(ones(&o1, 0), size1);
        let p2 = ratio(ones(&o2, o1.len()), size2);
        if (p1 > half && p2 > half) || (p1 < half && p2 < half) {
            report.dichotomy_violations.push(name.clone());
        }
        let off = (&p1 - &half) * (&p1 - &half);
        if report.bound_asserted && off <= threshold {
            report.bound_violations.push(name.clone());
        }
        report.min_p1_offset_sq = Some(match report.min_p1_offset_sq.take() {
            Some(m) if m <= off => m,
            _ => off.clone(),
        });
        {
            let lookup: std::collections::HashMap<u32, u8> = o1
                .iter()
                .chain(&o2)
                .enumerate()
                .flat_map(|(i, o)| o.iter().map(move |&m| (m, sol[i])))
                .collect();
            let g = DoubleSliceFunction::boolean(n, |m| lookup[&m] == 1)?;
            let p = g.p();
            if !(int(1) - int(3) * &p + int(3) * g.stab()).is_zero() || !prob_monochromatic_d(&g).is_zero() {
                report.identity_failures.push(name.clone());
            }
            let q = &p1 - &p2;
            if w0_minus(&g) != int(2) * &q * &q / int(9) {
                report.w0_failures.push(name.clone());
            }
            if !g.is_egalitarian() {
                report.not_egalitarian.push(name.clone());
            }
        }
        report.records.push(TwoSliceRecord { values: name, p1, p2 });
    }
    Ok(report)
}

/// `q_i = P[g = W]` and `r_i = P[g != L]` on each slice `S_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneProfile {
    #[serde(with = "serde_rational_vec")]
    pub q: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub r: Vec<Rational>,
    pub non_increasing: bool,
}

pub fn monotone_profile(g: &SetFunctionWTL) -> Result<MonotoneProfile> {
    if !check_pr(g) {
        return Err(SwfError::PrViolation);
    }
    let n = g.n();
    let mut w = vec![0u64; n + 1];
    let mut not_l = vec![0u64; n + 1];
    let mut size = vec![0u64; n + 1];
    for (u, &x) in g.table().iter().enumerate() {
        let t = (u as u32).count_ones() as usize;
        size[t] += 1;
        if x == RelResult::W {
            w[t] += 1;
        }
        if x != RelResult::L {
            not_l[t] += 1;
        }
    }
    let q: Vec<Rational> = (0..=n).map(|i| ratio(w[i], size[i])).collect();
    let r: Vec<Rational> = (0..=n).map(|i| ratio(not_l[i], size[i])).collect();
    let non_increasing = q.windows(2).all(|p| p[0] >= p[1]) && r.windows(2).all(|p| p[0] >= p[1]);
    Ok(MonotoneProfile { q, r, non_increasing })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agreement {
    pub d: i64,
    /// Relative elections with unit margin `d`.
    pub elections: u64,
    #[serde(with = "serde_rational")]
    pub probability: Rational,
    /// `probability >= 5 / (3 sqrt 3)`, decided on squares.
    pub meets_threshold: bool,
}

/// Probability, over relative elections `a` with `d_1(a) = d`, that the
/// result is `sign(d)` or `T`.
pub fn corollary_agreement(g: &SetFunctionWTL, d: i64) -> Result<Agreement> {
    let n = g.n() as i64;
    if d.abs() <= 1 {
        return Err(SwfError::OutOfRange(format!("margin |d| = {} must exceed 1", d.abs())));
    }
    let target = RelResult::from_sign(d);
    let mut total = 0u64;
    let mut good = 0u64;
    // forward: d = n - 3|U| with result g(U); reverse: d = 3|U| - n with -g(U)
    let sizes = [((n - d), false), ((n + d), true)];
    for (num, reverse) in sizes {
        if num < 0 || num % 3 != 0 || num / 3 > n {
            continue;
        }
        let t = (num / 3) as u32;
        for (u, &x) in g.table().iter().enumerate() {
            if (u as u32).count_ones() != t {
                continue;
            }
            let res = if reverse { -x } else { x };
            total += 1;
            if res == target || res == RelResult::T {
                good += 1;
            }
        }
    }
    if total == 0 {
        return Err(SwfError::OutOfRange(format!("margin {d} is not realizable for n = {n}")));
    }
    let probability = ratio(good, total);
    let meets_threshold = at_least_over_sqrt(&probability, &rat(5, 3), 3);
    Ok(Agreement { d, elections: total, probability, meets_threshold })
}

/// Every realizable margin `d` with `|d| > 1`, ascending.
pub fn realizable_margins(n: usize) -> Vec<i64> {
    let n = n as i64;
    let mut ds: Vec<i64> = (0..=n).flat_map(|t| [n - 3 * t, 3 * t - n]).filter(|d| d.abs() > 1).collect();
    ds.sort_unstable();
    ds.dedup();
    ds
}

/// A uniformly random Rational-valued double-slice function, for tests and
/// self-checks.
pub fn random_function(cfg: &DoubleSliceConfig, seed: u64) -> Result<DoubleSliceFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f1 = masks_of_size(cfg.n, cfg.k1).iter().map(|_| random_rational(&mut rng)).collect();
    let f2 = masks_of_size(cfg.n, cfg.k2).iter().map(|_| random_rational(&mut rng)).collect();
    Ok(DoubleSliceFunction {
        config: *cfg,
        f1: SliceFunction::from_values(cfg.n, cfg.k1, f1)?,
        f2: SliceFunction::from_values(cfg.n, cfg.k2, f2)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::build_nonborda_g;

    #[test]
    fn configs() {
        let c = DoubleSliceConfig::new(7).unwrap();
        assert_eq!((c.k, c.k1, c.k2), (2, 3, 2));
        let c = DoubleSliceConfig::new(8).unwrap();
        assert_eq!((c.k, c.k1, c.k2), (2, 2, 3));
        assert!(DoubleSliceConfig::new(9).is_err());
    }

    #[test]
    fn alpha_cross_values() {
        let c = DoubleSliceConfig::new(7).unwrap();
        assert_eq!(alpha_cross(&c, 3, 2, 0).unwrap(), int(1));
        assert_eq!(alpha_cross(&c, 3, 2, 1).unwrap(), rat(-1, 2));
        assert_eq!(alpha_cross(&c, 2, 2, 1).unwrap(), rat(-2, 5));
        assert_eq!(alpha_cross(&c, 2, 3, 1).unwrap(), rat(-3, 5));
        assert!(alpha_cross(&c, 3, 2, 3).is_err());
    }

    #[test]
    fn cross_matrices_match_closed_form() {
        for n in [4, 5, 7, 8] {
            let c = DoubleSliceConfig::new(n).unwrap();
            for (ki, kj, d, ok) in cross_spectral_check(&c).unwrap() {
                assert!(ok, "n={n} ({ki},{kj}) d={d}");
            }
        }
    }

    #[test]
    fn eigenvalues() {
        let c = DoubleSliceConfig::new(7).unwrap();
        match lambda_eigen(&c, 0).unwrap() {
            LambdaEigen::Pair(r) => {
                assert!(r.is_rational());
                assert!(r.plus().cmp_rational(&int(1)) == Ordering::Equal);
                assert!(r.minus().cmp_rational(&rat(-1, 2)) == Ordering::Equal);
            }
            other => panic!("{other:?}"),
        }
        match lambda_eigen(&c, 1).unwrap() {
            LambdaEigen::Pair(r) => {
                assert!(r.plus().cmp_rational(&rat(3, 10)) == Ordering::Equal);
                assert!(r.minus().cmp_rational(&rat(-1, 2)) == Ordering::Equal);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(lambda_eigen(&c, 3).unwrap(), LambdaEigen::Top(int(0)));
        let c8 = DoubleSliceConfig::new(8).unwrap();
        assert_eq!(lambda_eigen(&c8, 3).unwrap(), LambdaEigen::Top(rat(-1, 20)));
        assert!(lambda_eigen(&c8, 4).is_err());
    }

    #[test]
    fn cross_spectrum_table() {
        let s = CrossSpectrum::new(&DoubleSliceConfig::new(7).unwrap()).unwrap();
        assert_eq!(s.rows.len(), 3);
        assert_eq!(s.rows[1].alpha_12, rat(-1, 2));
        assert!(s.rows[0].lambda.plus().cmp_rational(&int(1)) == Ordering::Equal);
        assert_eq!(s.lambda_top, int(0));
    }

    #[test]
    fn stab12_small_sweep() {
        let r = verify_stab12_bounds(2, 12).unwrap();
        assert_eq!(r.violation_count(), 0, "{r:?}");
        assert!(r.upper_numeric_violations.is_empty());
        let c8 = DoubleSliceConfig::new(8).unwrap();
        assert!(Quadratic::for_degree(&c8, 2).eval(&rat(-1, 8)) > int(0));
    }

    #[test]
    fn operator_n7_n8() {
        for n in [7, 8] {
            let r = t_operator_check(&DoubleSliceConfig::new(n).unwrap(), 10, 1).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn gprime_cases() {
        let g = SetFunctionWTL::constant(7, RelResult::T).unwrap();
        let gp = gprime_transform(&g).unwrap();
        // n = 7: S_2 below 7/3, S_3 above
        assert_eq!(gp.get(0b11), Some(&int(1)));
        assert_eq!(gp.get(0b111), Some(&int(0)));
        let w = SetFunctionWTL::constant(7, RelResult::W).unwrap();
        assert!(gprime_transform(&w).unwrap().f1.values().iter().all(|v| *v == int(1)));
        assert!(gprime_transform(&SetFunctionWTL::constant(6, RelResult::W).unwrap()).is_err());
    }

    #[test]
    fn monochromatic_probabilities() {
        let one = DoubleSliceFunction::boolean(8, |_| true).unwrap();
        assert_eq!(prob_monochromatic_d(&one), int(1));
        let c = DoubleSliceConfig::new(8).unwrap();
        let split = DoubleSliceFunction::boolean(8, |m| m.count_ones() as usize == c.k1).unwrap();
        assert_eq!(prob_monochromatic_d(&split), int(0));
        let tie = gprime_transform(&SetFunctionWTL::constant(8, RelResult::T).unwrap()).unwrap();
        assert_eq!(prob_monochromatic_d(&tie), int(0));
    }

    #[test]
    fn monotone_profiles() {
        let g = build_nonborda_g(13).unwrap();
        let m = monotone_profile(&g).unwrap();
        assert!(m.non_increasing);
        assert_eq!(m.q[4], rat(702, 715));
        assert!(m.q[5..].iter().all(|x| x.is_zero()));
        let b = SetFunctionWTL::borda_form(7, RelResult::W).unwrap();
        let m = monotone_profile(&b).unwrap();
        assert_eq!(m.q[0], int(1));
        assert_eq!(m.q[7], int(0));
        let bad = SetFunctionWTL::from_fn(3, |u| if u == 0 { RelResult::L } else { RelResult::W }).unwrap();
        assert_eq!(monotone_profile(&bad), Err(SwfError::PrViolation));
    }

    #[test]
    fn agreement_for_the_construction() {
        let g = build_nonborda_g(13).unwrap();
        for d in [4, -2, 13, -13] {
            let a = corollary_agreement(&g, d).unwrap();
            assert_eq!(a.probability, int(1), "d={d}");
            assert!(a.meets_threshold);
        }
        assert!(corollary_agreement(&g, 1).is_err());
        assert!(corollary_agreement(&g, 100).is_err());
    }

    #[test]
    fn w0_minus_matches_formula() {
        let c = DoubleSliceConfig::new(7).unwrap();
        for seed in 0..5 {
            let g = random_function(&c, seed).unwrap();
            let q = g.p1() - g.p2();
            assert_eq!(w0_minus(&g), int(2) * &q * &q / int(9));
        }
    }
}
