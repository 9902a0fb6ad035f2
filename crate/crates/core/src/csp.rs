//! Depth-first search over small-domain variables with symmetric forbidden
//! triples and order constraints. Used for orbit-level enumeration.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{Result, SwfError};

#[derive(Debug, Clone)]
pub struct TripleCsp {
    vars: usize,
    domain: u8,
    /// Indexed by `9a + 3b + c`; must be symmetric under permutation.
    forbidden: [bool; 27],
    triples_by_max: Vec<Vec<[u16; 3]>>,
    /// `(x, y)` keyed by `max(x, y)`, requiring `val[x] >= val[y]`.
    order_by_max: Vec<Vec<(u16, u16)>>,
    allowed: Vec<Vec<u8>>,
}

/// Outcome of a search over a set of prefixes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CspOutcome {
    pub solutions: Vec<Vec<u8>>,
    pub nodes: u64,
}

impl TripleCsp {
    pub fn new(vars: usize, domain: u8, forbidden: [bool; 27]) -> TripleCsp {
        TripleCsp {
            vars,
            domain,
            forbidden,
            triples_by_max: vec![Vec::new(); vars],
            order_by_max: vec![Vec::new(); vars],
            allowed: vec![(0..domain).collect(); vars],
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    /// Adds a triple constraint; duplicates are removed by [`TripleCsp::finish`].
    pub fn add_triple(&mut self, a: usize, b: usize, c: usize) {
        let mut t = [a as u16, b as u16, c as u16];
        t.sort_unstable();
        self.triples_by_max[t[2] as usize].push(t);
    }

    pub fn add_order(&mut self, hi: usize, lo: usize) {
        if hi != lo {
            self.order_by_max[hi.max(lo)].push((hi as u16, lo as u16));
        }
    }

    pub fn restrict(&mut self, var: usize, values: Vec<u8>) {
        self.allowed[var] = values;
    }

    pub fn finish(&mut self) {
        for v in self.triples_by_max.iter_mut() {
            v.sort_unstable();
            v.dedup();
        }
        for v in self.order_by_max.iter_mut() {
            v.sort_unstable();
            v.dedup();
        }
    }

    pub fn constraint_count(&self) -> usize {
        self.triples_by_max.iter().map(Vec::len).sum::<usize>() + self.order_by_max.iter().map(Vec::len).sum::<usize>()
    }

    #[inline]
    fn ok_at(&self, vals: &[u8], i: usize) -> bool {
        let f = &self.forbidden;
        for t in &self.triples_by_max[i] {
            let idx = 9 * vals[t[0] as usize] as usize + 3 * vals[t[1] as usize] as usize + vals[t[2] as usize] as usize;
            if f[idx] {
                return false;
            }
        }
        for &(hi, lo) in &self.order_by_max[i] {
            if vals[hi as usize] < vals[lo as usize] {
                return false;
            }
        }
        true
    }

    /// Whether a full or partial assignment violates nothing decided so far.
    pub fn consistent_prefix(&self, vals: &[u8]) -> bool {
        (0..vals.len()).all(|i| self.allowed[i].contains(&vals[i]) && self.ok_at(vals, i))
    }

    /// Consistent assignments of the first `depth` variables, in
    /// lexicographic order of allowed values.
    pub fn prefixes(&self, depth: usize) -> Vec<Vec<u8>> {
        let depth = depth.min(self.vars);
        let mut out = Vec::new();
        let mut vals = vec![0u8; self.vars];
        self.walk(&mut vals, 0, depth, &mut |v: &[u8]| out.push(v[..depth].to_vec()), &mut 0);
        out
    }

    fn walk(&self, vals: &mut [u8], i: usize, stop: usize, emit: &mut dyn FnMut(&[u8]), nodes: &mut u64) {
        if i == stop {
            emit(vals);
            return;
        }
        for &x in &self.allowed[i] {
            vals[i] = x;
            *nodes += 1;
            if self.ok_at(vals, i) {
                self.walk(vals, i + 1, stop, emit, nodes);
            }
        }
    }

    /// All complete solutions extending `prefix`.
    pub fn solve_from(&self, prefix: &[u8], max_solutions: u64, found: &AtomicU64) -> Result<CspOutcome> {
        let mut vals = vec![0u8; self.vars];
        vals[..prefix.len()].copy_from_slice(prefix);
        if !self.consistent_prefix(prefix) {
            return Ok(CspOutcome::default());
        }
        let mut solutions = Vec::new();
        let mut nodes = 0u64;
        let mut over = false;
        self.walk(
            &mut vals,
            prefix.len(),
            self.vars,
            &mut |v: &[u8]| {
                if found.fetch_add(1, Ordering::Relaxed) >= max_solutions {
                    over = true;
                } else {
                    solutions.push(v.to_vec());
                }
            },
            &mut nodes,
        );
        if over {
            return Err(SwfError::BudgetExceeded(format!("more than {max_solutions} solutions")));
        }
        Ok(CspOutcome { solutions, nodes })
    }

    /// Solves every prefix in parallel; solutions come back sorted.
    pub fn solve_prefixes(&self, prefixes: &[Vec<u8>], max_solutions: u64) -> Result<CspOutcome> {
        let found = AtomicU64::new(0);
        let parts = prefixes
            .par_iter()
            .map(|p| self.solve_from(p, max_solutions, &found))
            .collect::<Result<Vec<_>>>()?;
        let mut out = CspOutcome::default();
        for p in parts {
            out.nodes += p.nodes;
            out.solutions.extend(p.solutions);
        }
        out.solutions.sort();
        Ok(out)
    }

    pub fn solve_all(&self, max_solutions: u64) -> Result<CspOutcome> {
        let depth = self.split_depth();
        let mut prefix_nodes = 0;
        let mut prefixes = Vec::new();
        let mut vals = vec![0u8; self.vars];
        self.walk(&mut vals, 0, depth, &mut |v: &[u8]| prefixes.push(v[..depth].to_vec()), &mut prefix_nodes);
        let mut out = self.solve_prefixes(&prefixes, max_solutions)?;
        out.nodes += prefix_nodes;
        Ok(out)
    }

    /// A prefix depth giving enough independent branches for the thread pool.
    pub fn split_depth(&self) -> usize {
        let mut depth = 0;
        let mut branches = 1usize;
        while depth < self.vars && branches < 256 {
            branches *= self.allowed[depth].len().max(1);
            depth += 1;
        }
        depth
    }

    pub fn domain(&self) -> u8 {
        self.domain
    }
}
