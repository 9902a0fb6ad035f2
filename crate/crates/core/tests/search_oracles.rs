use std::collections::BTreeSet;

use swf_core::axioms::{check_pr, BordaKind, PermutationGroup};
use swf_core::domain::{check_triple_consistency, is_self_consistent};
use swf_core::search::{
    conjecture_scan, conjecture_scan_with, enumerate_consistent, merge_reports, run_search, subset_orbits, Checkpoint,
    SearchFilters, SearchMode, SearchOptions, Shard,
};
use swf_core::{RelResult, SetFunctionWTL};

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Binary necklaces of length `n`: `(1/n) sum_{j} 2^{gcd(j, n)}`.
fn burnside_necklaces(n: usize) -> usize {
    (0..n).map(|j| 1usize << gcd(j, n)).sum::<usize>() / n
}

#[test]
fn cyclic_orbit_counts_match_burnside() {
    for n in 1..=12 {
        let t = subset_orbits(&PermutationGroup::cyclic(n).unwrap());
        assert_eq!(t.len(), burnside_necklaces(n), "n={n}");
        assert_eq!(t.orbits.iter().map(Vec::len).sum::<usize>(), 1 << n);
        assert!(t.orbits.iter().all(|o| o.iter().all(|m| m.count_ones() == o[0].count_ones())));
    }
    assert_eq!(burnside_necklaces(6), 14);
}

#[test]
fn n3_dfs_matches_brute_force() {
    let z3 = PermutationGroup::cyclic(3).unwrap();
    let rot = |u: u32| ((u << 1) | (u >> 2)) & 7;
    let mut brute = BTreeSet::new();
    for x in 0..3u32.pow(8) {
        let g = SetFunctionWTL::from_fn(3, |u| RelResult::ALL[(x / 3u32.pow(u) % 3) as usize]).unwrap();
        if (0..8).all(|u| g.get(u) == g.get(rot(u))) && is_self_consistent(&g) {
            brute.insert(g.values_string());
        }
    }
    let dfs: BTreeSet<String> = enumerate_consistent(3, &z3, SearchFilters::default())
        .unwrap()
        .functions
        .into_iter()
        .map(|f| f.values)
        .collect();
    assert_eq!(dfs, brute);
    assert_eq!(dfs.len(), 3);
}

#[test]
fn divisible_by_three_gives_only_unweighted_borda() {
    for n in [3, 6, 9] {
        let r = enumerate_consistent(n, &PermutationGroup::cyclic(n).unwrap(), SearchFilters::default()).unwrap();
        let got: BTreeSet<String> = r.functions.iter().map(|f| f.values.clone()).collect();
        let want: BTreeSet<String> = [RelResult::W, RelResult::L, RelResult::T]
            .iter()
            .map(|&x| SetFunctionWTL::borda_form(n, x).unwrap().values_string())
            .collect();
        assert_eq!(got, want, "n={n}");
        assert!(r.reverified);
    }
}

#[test]
fn every_emitted_function_is_sound() {
    for n in [4, 5, 7] {
        for decreasing in [false, true] {
            let filters = SearchFilters { decreasing, pareto: false };
            let r = enumerate_consistent(n, &PermutationGroup::cyclic(n).unwrap(), filters).unwrap();
            for f in &r.functions {
                let g = SetFunctionWTL::parse_values(n, &f.values).unwrap();
                assert!(check_triple_consistency(&g, &g, &g).unwrap().is_none());
                if decreasing {
                    assert!(check_pr(&g));
                }
            }
        }
    }
}

#[test]
fn symmetric_group_search() {
    let r = enumerate_consistent(5, &PermutationGroup::symmetric(5).unwrap(), SearchFilters::default()).unwrap();
    assert_eq!(r.orbit_count, 6);
    assert_eq!(r.functions.len(), 3);
    assert!(r.functions.iter().all(|f| matches!(
        f.kind,
        BordaKind::TieRule | BordaKind::PositiveUnweighted | BordaKind::NegativeUnweighted
    )));
}

#[test]
fn shards_merge_to_the_whole() {
    let z6 = PermutationGroup::cyclic(6).unwrap();
    let whole = enumerate_consistent(6, &z6, SearchFilters::default()).unwrap();
    let parts: Vec<_> = (0..4)
        .map(|i| {
            let o = SearchOptions { shard: Some(Shard::new(i, 4).unwrap()), ..Default::default() };
            run_search(6, &z6, SearchMode::Enumerate, &o, None, &mut |_| Ok(())).unwrap()
        })
        .collect();
    assert_eq!(merge_reports(&parts).unwrap(), whole);
    assert!(merge_reports(&parts[..3]).is_err());
    let r7 = conjecture_scan(7).unwrap();
    let parts: Vec<_> = (0..3)
        .map(|i| {
            let o = SearchOptions { shard: Some(Shard::new(i, 3).unwrap()), ..Default::default() };
            conjecture_scan_with(7, &o, None, &mut |_| Ok(())).unwrap()
        })
        .collect();
    assert_eq!(merge_reports(&parts).unwrap(), r7);
}

#[test]
fn checkpoints_resume() {
    let z7 = PermutationGroup::cyclic(7).unwrap();
    let o = SearchOptions { chunk: 2, ..Default::default() };
    let mut saved: Vec<Checkpoint> = Vec::new();
    let whole = run_search(7, &z7, SearchMode::Enumerate, &o, None, &mut |c| {
        saved.push(c.clone());
        Ok(())
    })
    .unwrap();
    assert!(saved.len() > 2);
    let mid = saved[saved.len() / 2].clone();
    let resumed = run_search(7, &z7, SearchMode::Enumerate, &o, Some(mid.clone()), &mut |_| Ok(())).unwrap();
    assert_eq!(resumed, whole);
    let wrong = SearchOptions { filters: SearchFilters { decreasing: true, pareto: false }, ..o };
    assert!(run_search(7, &z7, SearchMode::Enumerate, &wrong, Some(mid), &mut |_| Ok(())).is_err());
}

#[test]
fn conjecture_scans_are_observational() {
    for n in [7, 8] {
        let r = conjecture_scan(n).unwrap();
        assert!(r.observational);
        assert!(r.reverified);
        let ces = r.counterexamples.unwrap();
        assert!(ces.iter().all(|c| c.reverified));
        assert!(r.functions.iter().all(|f| check_pr(&SetFunctionWTL::parse_values(n, &f.values).unwrap())));
    }
    assert!(conjecture_scan(9).is_err());
}
