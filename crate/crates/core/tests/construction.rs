use swf_core::axioms::{check_pareto, check_pr, check_ta, classify_borda_with, BordaKind, PermutationGroup};
use swf_core::domain::{check_triple_consistency, consistent_multiset, zeta};
use swf_core::families::{nonborda_construction, verify_difference_cover, verify_intersecting, FamilyKind};
use swf_core::RelResult;

/// Scans ordered partitions by ternary digits, independent of the library scan.
fn ternary_consistent(g: &swf_core::SetFunctionWTL) -> bool {
    let n = g.n();
    (0..3u64.pow(n as u32)).all(|mut x| {
        let mut parts = [0u32; 3];
        for v in 0..n {
            parts[(x % 3) as usize] |= 1 << v;
            x /= 3;
        }
        consistent_multiset(parts.map(|p| g.get(p)))
    })
}

#[test]
fn constructions_satisfy_every_axiom() {
    for n in [11, 13, 14, 16] {
        let c = nonborda_construction(n).unwrap();
        assert_eq!(c.kind, if n % 3 == 1 { FamilyKind::A } else { FamilyKind::B });
        assert!(verify_difference_cover(&c.family) && verify_intersecting(&c.family));
        let g = &c.g;
        let z = PermutationGroup::cyclic(n).unwrap();
        assert_eq!(check_triple_consistency(g, g, g).unwrap(), None, "n={n}");
        assert!(check_ta(g, &z).unwrap());
        assert!(check_pareto(g));
        assert!(check_pr(g));
        let cls = classify_borda_with(g, &z).unwrap();
        assert_eq!(cls.kind, BordaKind::StronglyNonBorda);
        let (w, l) = cls.witnesses.unwrap();
        assert_eq!(w.margin, l.margin);
        assert_eq!(w.margin.abs(), 1, "n={n}");
        assert_eq!((w.result, l.result), (RelResult::W, RelResult::L));
        for wit in [&w, &l] {
            assert_eq!(wit.election.unit_margin(), wit.margin);
            let u = if wit.forward { zeta(&wit.election).unwrap() } else { zeta(&wit.election.reversed()).unwrap() };
            assert_eq!(u, wit.mask);
        }
    }
}

#[test]
fn ternary_oracle_agrees_at_eleven_and_thirteen() {
    for n in [11, 13] {
        let g = nonborda_construction(n).unwrap().g;
        assert!(ternary_consistent(&g));
        let mut broken = g.table().to_vec();
        // flip one family member; both scans must agree on the result
        let m = nonborda_construction(n).unwrap().family.members()[0].bits();
        broken[m as usize] = -broken[m as usize];
        let b = swf_core::SetFunctionWTL::new(n, broken).unwrap();
        assert_eq!(ternary_consistent(&b), check_triple_consistency(&b, &b, &b).unwrap().is_none());
    }
}
