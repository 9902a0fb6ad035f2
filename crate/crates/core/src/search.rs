//! Orbit-level enumeration of consistent set functions invariant under a
//! permutation group, and the slice-wise exclusion scan built on it.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::axioms::{check_pr, check_ta, classify_consistent, BordaKind, GroupFile, PermutationGroup};
use crate::combin::full_mask;
use crate::csp::TripleCsp;
use crate::domain::{check_triple_consistency, consistent_multiset, RelResult, SetFunctionWTL};
use crate::error::{Result, SwfError};

/// Largest electorate for orbit enumeration.
pub const MAX_SEARCH_N: usize = 9;

/// Largest number of orbits (search variables).
pub const MAX_SEARCH_ORBITS: usize = 64;

/// Default cap on emitted functions.
pub const DEFAULT_MAX_SOLUTIONS: u64 = 1_000_000;

/// Value order used for orbit codes.
const CODES: [RelResult; 3] = [RelResult::L, RelResult::T, RelResult::W];

fn code_of(r: RelResult) -> u8 {
    CODES.iter().position(|&c| c == r).unwrap() as u8
}

/// Orbits of all `2^n` masks, ordered by `(cardinality, smallest mask)`.
#[derive(Debug, Clone)]
pub struct OrbitTable {
    pub n: usize,
    pub group: PermutationGroup,
    pub orbits: Vec<Vec<u32>>,
    /// Orbit id of every mask.
    pub orbit_index: Vec<u32>,
}

impl OrbitTable {
    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn orbit_of(&self, mask: u32) -> usize {
        self.orbit_index[mask as usize] as usize
    }

    /// The set function taking `values[o]` on orbit `o`.
    pub fn expand(&self, values: &[RelResult]) -> Result<SetFunctionWTL> {
        SetFunctionWTL::from_fn(self.n, |m| values[self.orbit_of(m)])
    }
}

pub fn subset_orbits(group: &PermutationGroup) -> OrbitTable {
    let n = group.n();
    let all: Vec<u32> = (0..=full_mask(n)).collect();
    let orbits = group.mask_orbits(&all);
    let mut orbit_index = vec![0u32; all.len()];
    for (i, o) in orbits.iter().enumerate() {
        for &m in o {
            orbit_index[m as usize] = i as u32;
        }
    }
    OrbitTable { n, group: group.clone(), orbits, orbit_index }
}

/// Shard `index` of `total`, written `i/t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shard {
    pub index: usize,
    pub total: usize,
}

impl Shard {
    pub fn new(index: usize, total: usize) -> Result<Shard> {
        if total == 0 || index >= total {
            return Err(SwfError::OutOfRange(format!("shard {index}/{total}")));
        }
        Ok(Shard { index, total })
    }
}

impl FromStr for Shard {
    type Err = SwfError;

    fn from_str(s: &str) -> Result<Shard> {
        let (i, t) = s.split_once('/').ok_or_else(|| SwfError::Parse(format!("shard {s:?}, expected i/t")))?;
        let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| SwfError::Parse(format!("shard {s:?}")));
        Shard::new(parse(i)?, parse(t)?)
    }
}

impl fmt::Display for Shard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.index, self.total)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchFilters {
    pub decreasing: bool,
    pub pareto: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    Enumerate,
    Conjecture,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoundFunction {
    /// One `W`/`T`/`L` per orbit.
    pub orbit_values: String,
    /// The full table, index = mask.
    pub values: String,
    pub kind: BordaKind,
}

/// A mask where a found function takes an excluded value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub orbit_values: String,
    pub mask: u32,
    pub cardinality: usize,
    pub margin: i64,
    pub value: RelResult,
    /// Consistency, PR and invariance all re-checked on the full table.
    pub reverified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub n: usize,
    pub mode: SearchMode,
    pub group: GroupFile,
    pub filters: SearchFilters,
    pub shard: Option<Shard>,
    pub orbit_count: usize,
    /// Search nodes below the shard's prefixes plus the prefixes themselves.
    pub candidates_examined: u64,
    pub functions: Vec<FoundFunction>,
    /// Every function passed an independent consistency scan.
    pub reverified: bool,
    /// Set for the conjecture scan; an empty list is an observation only.
    pub observational: bool,
    pub counterexamples: Option<Vec<Counterexample>>,
    /// Functions taking `L` or `W` on slices excluded by the literal
    /// `i <= k - 1` / `i >= k + 1` reading at `n = 3k + 2`.
    pub literal_reading_hits: Option<usize>,
}

/// Resumable progress: prefixes already solved and what they produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: usize,
    pub mode: SearchMode,
    pub group: GroupFile,
    pub filters: SearchFilters,
    pub shard: Option<Shard>,
    pub depth: usize,
    pub completed: Vec<String>,
    pub solutions: Vec<String>,
    pub nodes: u64,
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub filters: SearchFilters,
    pub shard: Option<Shard>,
    pub max_solutions: u64,
    /// Prefixes solved between checkpoint callbacks.
    pub chunk: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { filters: SearchFilters::default(), shard: None, max_solutions: DEFAULT_MAX_SOLUTIONS, chunk: 64 }
    }
}

fn codes_to_string(v: &[u8]) -> String {
    v.iter().map(|&c| CODES[c as usize].as_char()).collect()
}

fn string_to_codes(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| RelResult::from_char(c).map(code_of).ok_or_else(|| SwfError::Parse(format!("orbit value {c:?}"))))
        .collect()
}

/// The search problem: one variable per orbit, a triple per ordered
/// 3-partition, and cover-pair order constraints for the decreasing filter.
pub fn build_consistency_csp(table: &OrbitTable, filters: SearchFilters) -> TripleCsp {
    let mut forbidden = [false; 27];
    for (i, f) in forbidden.iter_mut().enumerate() {
        *f = !consistent_multiset([CODES[i / 9], CODES[(i / 3) % 3], CODES[i % 3]]);
    }
    let n = table.n;
    let full = full_mask(n);
    let mut csp = TripleCsp::new(table.len(), 3, forbidden);
    for v1 in 0..=full {
        let rest = full & !v1;
        let mut v2 = rest;
        loop {
            csp.add_triple(table.orbit_of(v1), table.orbit_of(v2), table.orbit_of(rest & !v2));
            if v2 == 0 {
                break;
            }
            v2 = (v2 - 1) & rest;
        }
    }
    if filters.decreasing {
        for u in 0..=full {
            for v in 0..n {
                if u & 1 << v == 0 {
                    csp.add_order(table.orbit_of(u), table.orbit_of(u | 1 << v));
                }
            }
        }
    }
    if filters.pareto {
        csp.restrict(table.orbit_of(0), vec![code_of(RelResult::W)]);
        csp.restrict(table.orbit_of(full), vec![code_of(RelResult::L)]);
    }
    csp.finish();
    csp
}

fn check_scale(group: &PermutationGroup, table: &OrbitTable) -> Result<()> {
    if group.n() > MAX_SEARCH_N {
        return Err(SwfError::BudgetExceeded(format!("orbit search at n = {} (limit {MAX_SEARCH_N})", group.n())));
    }
    if table.len() > MAX_SEARCH_ORBITS {
        return Err(SwfError::BudgetExceeded(format!(
            "{} orbits (limit {MAX_SEARCH_ORBITS})",
            table.len()
        )));
    }
    Ok(())
}

/// Depth of the shared prefix frontier, fixed so shards partition one list.
fn frontier_depth(vars: usize) -> usize {
    vars.min(5)
}

/// All consistent `g` constant on the orbits of `group`, in ascending
/// orbit-value order.
pub fn enumerate_consistent(n: usize, group: &PermutationGroup, filters: SearchFilters) -> Result<SearchReport> {
    let options = SearchOptions { filters, ..Default::default() };
    run_search(n, group, SearchMode::Enumerate, &options, None, &mut |_| Ok(()))
}

/// Consistent, decreasing, `Z_n`-invariant `g`, with every mask whose value
/// is excluded by the margin form of the conjecture: `g(U) != L` when
/// `n - 3|U| > 1` and `g(U) != W` when `n - 3|U| < -1`.
pub fn conjecture_scan(n: usize) -> Result<SearchReport> {
    conjecture_scan_with(n, &SearchOptions::default(), None, &mut |_| Ok(()))
}

pub fn conjecture_scan_with(
    n: usize,
    options: &SearchOptions,
    resume: Option<Checkpoint>,
    save: &mut dyn FnMut(&Checkpoint) -> Result<()>,
) -> Result<SearchReport> {
    if n.is_multiple_of(3) {
        return Err(SwfError::OutOfRange(format!("conjecture scan needs 3 ∤ n, got {n}")));
    }
    let group = PermutationGroup::cyclic(n)?;
    let options = SearchOptions { filters: SearchFilters { decreasing: true, ..options.filters }, ..options.clone() };
    run_search(n, &group, SearchMode::Conjecture, &options, resume, save)
}

/// Shared driver. `resume` skips prefixes already recorded; `save` is
/// called after every chunk with the updated checkpoint.
pub fn run_search(
    n: usize,
    group: &PermutationGroup,
    mode: SearchMode,
    options: &SearchOptions,
    resume: Option<Checkpoint>,
    save: &mut dyn FnMut(&Checkpoint) -> Result<()>,
) -> Result<SearchReport> {
    if group.n() != n {
        return Err(SwfError::LengthMismatch { expected: n, found: group.n() });
    }
    let table = subset_orbits(group);
    check_scale(group, &table)?;
    let csp = build_consistency_csp(&table, options.filters);
    let depth = frontier_depth(table.len());
    let all_prefixes = csp.prefixes(depth);
    let prefixes: Vec<Vec<u8>> = match options.shard {
        Some(s) => all_prefixes.into_iter().enumerate().filter(|(i, _)| i % s.total == s.index).map(|(_, p)| p).collect(),
        None => all_prefixes,
    };
    let mut cp = Checkpoint {
        n,
        mode,
        group: group.to_file(),
        filters: options.filters,
        shard: options.shard,
        depth,
        completed: vec![],
        solutions: vec![],
        nodes: 0,
    };
    if let Some(r) = resume {
        if (r.n, r.mode, &r.group, r.filters, r.shard, r.depth) != (n, mode, &cp.group, cp.filters, cp.shard, depth) {
            return Err(SwfError::Parse("checkpoint does not match this search".into()));
        }
        cp = r;
    }
    let done: BTreeSet<String> = cp.completed.iter().cloned().collect();
    let todo: Vec<&Vec<u8>> = prefixes.iter().filter(|p| !done.contains(&codes_to_string(p))).collect();
    let max = options.max_solutions;
    for chunk in todo.chunks(options.chunk.max(1)) {
        let already = cp.solutions.len() as u64;
        let found = std::sync::atomic::AtomicU64::new(already);
        let parts = chunk.par_iter().map(|p| csp.solve_from(p, max, &found)).collect::<Result<Vec<_>>>()?;
        for (p, out) in chunk.iter().zip(parts) {
            cp.completed.push(codes_to_string(p));
            cp.nodes += out.nodes + 1;
            cp.solutions.extend(out.solutions.iter().map(|s| codes_to_string(s)));
        }
        save(&cp)?;
    }
    finish_report(&table, mode, options, cp)
}

fn finish_report(table: &OrbitTable, mode: SearchMode, options: &SearchOptions, cp: Checkpoint) -> Result<SearchReport> {
    let mut solutions = cp.solutions;
    solutions.sort();
    let checked = solutions
        .par_iter()
        .map(|s| {
            let values: Vec<RelResult> = string_to_codes(s)?.into_iter().map(|c| CODES[c as usize]).collect();
            let g = table.expand(&values)?;
            let consistent = check_triple_consistency(&g, &g, &g)?.is_none();
            let kind = classify_consistent(&g)?.kind;
            Ok((FoundFunction { orbit_values: s.clone(), values: g.values_string(), kind }, g, consistent))
        })
        .collect::<Result<Vec<_>>>()?;
    let reverified = checked.iter().all(|c| c.2);
    let (counterexamples, literal_reading_hits) = match mode {
        SearchMode::Enumerate => (None, None),
        SearchMode::Conjecture => {
            let mut ces = Vec::new();
            let mut literal = 0;
            for (f, g, consistent) in &checked {
                if let Some(c) = first_exclusion(g) {
                    let reverified = *consistent && check_pr(g) && check_ta(g, &table.group).unwrap_or(false);
                    ces.push(Counterexample { orbit_values: f.orbit_values.clone(), reverified, ..c });
                }
                if literal_exclusion(g) {
                    literal += 1;
                }
            }
            (Some(ces), if table.n % 3 == 2 { Some(literal) } else { None })
        }
    };
    Ok(SearchReport {
        n: table.n,
        mode,
        group: table.group.to_file(),
        filters: options.filters,
        shard: options.shard,
        orbit_count: table.len(),
        candidates_examined: cp.nodes,
        functions: checked.into_iter().map(|c| c.0).collect(),
        reverified,
        observational: mode == SearchMode::Conjecture,
        counterexamples,
        literal_reading_hits,
    })
}

/// First mask (ascending) where `g` takes a value excluded by the margin form.
pub fn first_exclusion(g: &SetFunctionWTL) -> Option<Counterexample> {
    let n = g.n() as i64;
    g.table().iter().enumerate().find_map(|(u, &x)| {
        let t = (u as u32).count_ones() as i64;
        let margin = n - 3 * t;
        let bad = (margin > 1 && x == RelResult::L) || (margin < -1 && x == RelResult::W);
        bad.then(|| Counterexample {
            orbit_values: String::new(),
            mask: u as u32,
            cardinality: t as usize,
            margin,
            value: x,
            reverified: false,
        })
    })
}

fn literal_exclusion(g: &SetFunctionWTL) -> bool {
    let k = g.n() / 3;
    g.table().iter().enumerate().any(|(u, &x)| {
        let t = (u as u32).count_ones() as usize;
        (t < k && x == RelResult::L) || (t > k && x == RelResult::W)
    })
}

/// Folds shard reports into the unsharded report. Every shard of one
/// `total` must appear exactly once.
pub fn merge_reports(parts: &[SearchReport]) -> Result<SearchReport> {
    let first = parts.first().ok_or_else(|| SwfError::OutOfRange("no reports to merge".into()))?;
    let total = first.shard.map(|s| s.total).unwrap_or(1);
    let mut seen = vec![false; total];
    for p in parts {
        if (p.n, p.mode, &p.group, p.filters) != (first.n, first.mode, &first.group, first.filters) {
            return Err(SwfError::Parse("shard reports come from different searches".into()));
        }
        let idx = match p.shard {
            Some(s) if s.total == total => s.index,
            None if total == 1 => 0,
            _ => return Err(SwfError::Parse("inconsistent shard totals".into())),
        };
        if std::mem::replace(&mut seen[idx], true) {
            return Err(SwfError::Parse(format!("shard {idx} appears twice")));
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(SwfError::Parse(format!("shard {missing}/{total} is missing")));
    }
    let mut functions: Vec<FoundFunction> = parts.iter().flat_map(|p| p.functions.iter().cloned()).collect();
    functions.sort_by(|a, b| a.orbit_values.cmp(&b.orbit_values));
    let counterexamples = first.counterexamples.as_ref().map(|_| {
        let mut v: Vec<Counterexample> =
            parts.iter().flat_map(|p| p.counterexamples.iter().flatten().cloned()).collect();
        v.sort_by(|a, b| a.orbit_values.cmp(&b.orbit_values));
        v
    });
    let literal_reading_hits = first.literal_reading_hits.map(|_| parts.iter().filter_map(|p| p.literal_reading_hits).sum());
    Ok(SearchReport {
        shard: None,
        candidates_examined: parts.iter().map(|p| p.candidates_examined).sum(),
        functions,
        reverified: parts.iter().all(|p| p.reverified),
        counterexamples,
        literal_reading_hits,
        ..first.clone()
    })
}
