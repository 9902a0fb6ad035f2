use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swf_core::combin::masks_of_size;
use swf_core::domain::zeta_inv;
use swf_core::doubleslice::{
    corollary_agreement, monotone_profile, realizable_margins, verify_two_slice, DoubleSliceFunction,
    prob_monochromatic_d,
};
use swf_core::exact::{int, rat, Rational};
use swf_core::families::build_nonborda_g;
use swf_core::slice::{prob_same, stab_r, verify_slice_bounds, ScanMode, SliceFunction, ValueKind};
use swf_core::{Candidate, RelResult, SubsetMask};

/// Monochromatic fraction over ordered `(t1, t2, t2)`-partitions, listed by
/// ternary digits.
fn mono_by_digits(n: usize, sizes: [usize; 3], f: impl Fn(u32) -> bool) -> Rational {
    let (mut hit, mut all) = (0i64, 0i64);
    for mut x in 0..3u64.pow(n as u32) {
        let mut parts = [0u32; 3];
        for v in 0..n {
            parts[(x % 3) as usize] |= 1 << v;
            x /= 3;
        }
        if parts.iter().zip(sizes).any(|(p, s)| p.count_ones() as usize != s) {
            continue;
        }
        all += 1;
        let vals = parts.map(&f);
        if vals[0] == vals[1] && vals[1] == vals[2] {
            hit += 1;
        }
    }
    rat(hit, all)
}

#[test]
fn integer_and_rational_paths_agree_on_random_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let bits: u32 = rng.gen_range(0..1 << 15);
        let masks = masks_of_size(6, 2);
        let on = |m: u32| bits >> masks.iter().position(|&x| x == m).unwrap() & 1 == 1;
        let g = SliceFunction::boolean(6, 2, on).unwrap();
        let stats = prob_same(&g, ValueKind::Boolean).unwrap();
        let oracle = mono_by_digits(6, [2, 2, 2], on);
        assert_eq!(stats.prob_a.clone().unwrap(), oracle);
        assert_eq!(oracle, int(1) - int(3) * g.mean() + int(3) * stab_r(&g).unwrap());
    }
}

#[test]
fn n6_exhaustive_bounds() {
    let r = verify_slice_bounds(6, ScanMode::Exhaustive).unwrap();
    assert_eq!(r.boolean_examined, 1 << 15);
    assert_eq!(r.violation_count(), 0);
    assert_eq!((r.bound_argmin.clone(), r.bound_minimum.clone()), (rat(1, 2), rat(5, 32)));
    assert!(r.min_prob_a_slack.unwrap() >= int(0));
}

#[test]
fn invariant_bounds_at_six_and_nine() {
    for n in [6, 9] {
        let r = verify_slice_bounds(n, ScanMode::InvariantOnly).unwrap();
        assert_eq!(r.violation_count(), 0, "n={n}");
        assert_eq!(r.invariant_not_egalitarian, 0);
        assert!(r.wtl_examined > 0);
    }
}

#[test]
fn two_slice_scans() {
    for n in [7, 8, 10, 11] {
        let r = verify_two_slice(n).unwrap();
        assert_eq!(r.violation_count(), 0, "n={n}");
        assert!(r.qualifying > 0);
        assert_eq!(r.bound_asserted, n % 3 == 2);
    }
    assert!(verify_two_slice(13).is_err());
}

#[test]
fn monochromatic_probability_matches_digit_listing() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in [7, 8] {
        for _ in 0..5 {
            let salt: u32 = rng.gen();
            let f = move |m: u32| (m.wrapping_mul(2654435761) ^ salt).count_ones().is_multiple_of(2);
            let g = DoubleSliceFunction::boolean(n, f).unwrap();
            let c = g.config;
            assert_eq!(prob_monochromatic_d(&g), mono_by_digits(n, [c.k1, c.k2, c.k2], f));
        }
    }
}

#[test]
fn agreement_at_thirteen_from_relative_elections() {
    let g = build_nonborda_g(13).unwrap();
    for d in realizable_margins(13) {
        let (mut good, mut total) = (0i64, 0i64);
        for u in 0..1u32 << 13 {
            let a = zeta_inv(13, SubsetMask(u), Candidate::C1).unwrap();
            for e in [a.clone(), a.reversed()] {
                if e.unit_margin() != d {
                    continue;
                }
                total += 1;
                let x = g.relative_result(&e).unwrap();
                if x == RelResult::from_sign(d) || x == RelResult::T {
                    good += 1;
                }
            }
        }
        let a = corollary_agreement(&g, d).unwrap();
        assert_eq!(a.probability, rat(good, total), "d={d}");
        assert_eq!(a.probability, int(1));
        assert!(a.meets_threshold);
    }
}

#[test]
fn monotone_profile_counts() {
    let g = build_nonborda_g(13).unwrap();
    let m = monotone_profile(&g).unwrap();
    let w4 = masks_of_size(13, 4).into_iter().filter(|&u| g.get(u) == RelResult::W).count() as i64;
    assert_eq!(m.q[4], rat(w4, 715));
    assert_eq!(m.q[4], rat(702, 715));
    assert!(m.q.iter().zip(&m.r).all(|(q, r)| q <= r));
}
