use proptest::prelude::*;
use swf_core::combin::{canonical_chi, masks_of_size};
use swf_core::doubleslice::{
    alpha_cross, lambda_eigen, lambda_top, t_operator_check, verify_stab12_bounds, DoubleSliceConfig, LambdaEigen,
    Quadratic,
};
use swf_core::exact::{int, rat, Rational};
use swf_core::slice::{alpha, SliceSpectrum};

/// `E[f(y)]` over `y` in `S_kj` disjoint from `x`, computed by listing.
fn average_disjoint(n: usize, kj: usize, x: u32, f: impl Fn(u32) -> Rational) -> Rational {
    let ys: Vec<u32> = masks_of_size(n, kj).into_iter().filter(|y| x & y == 0).collect();
    let count = ys.len() as i64;
    ys.into_iter().map(f).fold(int(0), |a, b| a + b) / int(count)
}

fn scaling(n: usize, ki: usize, kj: usize, d: usize) -> Option<Rational> {
    let chi = |m: u32| int(canonical_chi(d, m));
    let mut ratio = None;
    for x in masks_of_size(n, ki) {
        let lhs = average_disjoint(n, kj, x, chi);
        let c = chi(x);
        if c == int(0) {
            if lhs != int(0) {
                return None;
            }
            continue;
        }
        let r = lhs / c;
        match &ratio {
            None => ratio = Some(r),
            Some(q) if *q != r => return None,
            _ => {}
        }
    }
    ratio
}

#[test]
fn single_slice_operators_scale_chi_by_alpha() {
    for (n, k) in [(6, 2), (9, 3)] {
        for d in 0..=k {
            assert_eq!(scaling(n, k, k, d), Some(alpha(k, d).unwrap()), "n={n} d={d}");
        }
    }
}

#[test]
fn cross_operators_scale_chi_by_alpha_cross() {
    for n in [7, 8] {
        let c = DoubleSliceConfig::new(n).unwrap();
        for (ki, kj) in [(c.k1, c.k2), (c.k2, c.k1), (c.k2, c.k2)] {
            for d in 0..=kj.min(ki) {
                assert_eq!(scaling(n, ki, kj, d), Some(alpha_cross(&c, ki, kj, d).unwrap()), "n={n} ({ki},{kj}) d={d}");
            }
        }
    }
    let c7 = DoubleSliceConfig::new(7).unwrap();
    assert_eq!(masks_of_size(7, 3).len() * masks_of_size(7, 2).len(), 35 * 21);
    assert_eq!(alpha_cross(&c7, 3, 2, 1).unwrap(), rat(-1, 2));
}

#[test]
fn alpha_closed_forms_and_bounds() {
    let s = SliceSpectrum::new(4).unwrap();
    assert_eq!(s.alphas, vec![int(1), rat(-1, 2), rat(3, 14), rat(-1, 14), rat(1, 70)]);
    for k in 1..=50 {
        let s = SliceSpectrum::new(k).unwrap();
        assert!(s.recursion_holds() && s.bounds_hold() && s.alternating_decreasing(), "k={k}");
    }
}

#[test]
fn stab12_bounds_hold_to_fifty() {
    let r = verify_stab12_bounds(2, 50).unwrap();
    assert_eq!(r.violation_count(), 0);
    assert!(r.upper_numeric_violations.is_empty());
    assert!(r.min_lower_margin > 0.0);
}

#[test]
fn n7_degree_one_roots() {
    // 2λ² + (2/5)λ - 3/10 = 0, i.e. 20λ² + 4λ - 3 = (10λ - 3)(2λ + 1)
    let c = DoubleSliceConfig::new(7).unwrap();
    let q = Quadratic::for_degree(&c, 1);
    assert_eq!(q.eval(&rat(3, 10)), int(0));
    assert_eq!(q.eval(&rat(-1, 2)), int(0));
    assert_eq!(lambda_top(&DoubleSliceConfig::new(8).unwrap()), rat(-1, 20));
}

#[test]
fn operator_checks() {
    let r = t_operator_check(&DoubleSliceConfig::new(7).unwrap(), 100, 11).unwrap();
    assert_eq!(r.random_pairs, 100);
    assert!(r.passed(), "{r:?}");
    let r = t_operator_check(&DoubleSliceConfig::new(8).unwrap(), 30, 12).unwrap();
    assert!(r.passed(), "{r:?}");
    assert!(t_operator_check(&DoubleSliceConfig::new(11).unwrap(), 1, 0).is_err());
}

proptest! {
    #[test]
    fn roots_are_exact_and_match_floats(k in 2usize..=50, plus_two in any::<bool>(), d_frac in 0.0f64..1.0) {
        let n = 3 * k + if plus_two { 2 } else { 1 };
        let c = DoubleSliceConfig::new(n).unwrap();
        let d = ((k + 1) as f64 * d_frac) as usize;
        let q = Quadratic::for_degree(&c, d);
        match lambda_eigen(&c, d).unwrap() {
            LambdaEigen::Pair(r) => {
                prop_assert!(q.eval_surd(&r.plus()).is_zero());
                prop_assert!(q.eval_surd(&r.minus()).is_zero());
                let (s, cc) = (swf_core::exact::rat_to_f64(&q.s), swf_core::exact::rat_to_f64(&q.c));
                let disc = (s * s + 8.0 * cc).sqrt();
                prop_assert!((r.plus().to_f64() - (s + disc) / 4.0).abs() < 1e-12);
                prop_assert!((r.minus().to_f64() - (s - disc) / 4.0).abs() < 1e-12);
            }
            LambdaEigen::Top(_) => prop_assert!(false, "d <= k must give a pair"),
        }
        prop_assert!(q.eval(&int(0)) == -q.c.clone());
    }
}
