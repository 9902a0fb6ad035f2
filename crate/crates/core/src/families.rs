//! Cyclic intersecting families and the strongly non-Borda set functions
//! built from them.

use std::collections::HashSet;

use crate::combin::full_mask;
use crate::domain::{check_voter_count, RelResult, SetFunctionWTL, SubsetMask};
use crate::error::{Result, SwfError};

/// Families only need masks, not `2^n` tables, so they go past the table cap.
pub const MAX_FAMILY_N: usize = 32;

/// All `n` cyclic shifts of a base set, `x -> ((x - 1 + j) mod n) + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicFamily {
    n: usize,
    base: SubsetMask,
    members: Vec<SubsetMask>,
}

/// Rotates a mask by `j` places within `n` bits.
pub fn rotate(n: usize, mask: u32, j: usize) -> u32 {
    let j = j % n;
    if j == 0 {
        return mask;
    }
    ((mask << j) | (mask >> (n - j))) & full_mask(n)
}

impl CyclicFamily {
    /// Rejects empty and periodic bases, whose shifts would coincide.
    pub fn new(n: usize, base: SubsetMask) -> Result<CyclicFamily> {
        if n == 0 || n > MAX_FAMILY_N {
            return Err(SwfError::VoterCount { n, max: MAX_FAMILY_N });
        }
        base.check(n)?;
        if base.is_empty() {
            return Err(SwfError::OutOfRange("empty base set".into()));
        }
        let members: Vec<SubsetMask> = (0..n).map(|j| SubsetMask(rotate(n, base.0, j))).collect();
        let distinct: HashSet<u32> = members.iter().map(|m| m.0).collect();
        if distinct.len() != n {
            return Err(SwfError::OutOfRange(format!(
                "base {:?} is periodic modulo {n}",
                base.voters()
            )));
        }
        Ok(CyclicFamily { n, base, members })
    }

    pub fn from_voters(n: usize, base: &[usize]) -> Result<CyclicFamily> {
        CyclicFamily::new(n, SubsetMask::from_voters(n, base)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> SubsetMask {
        self.base
    }

    pub fn members(&self) -> &[SubsetMask] {
        &self.members
    }

    pub fn member_set(&self) -> HashSet<u32> {
        self.members.iter().map(|m| m.0).collect()
    }
}

/// `n = 3k + 1`, base `{1, 8} ∪ {3i : 3 <= i <= k}`.
pub fn build_family_a(k: usize) -> Result<CyclicFamily> {
    if k < 4 {
        return Err(SwfError::OutOfRange(format!("family A needs k >= 4, got {k}")));
    }
    let mut base = vec![1, 8];
    base.extend((3..=k).map(|i| 3 * i));
    CyclicFamily::from_voters(3 * k + 1, &base)
}

/// `n = 3k + 2`, base `{1, 3, 4, 8} ∪ {3i : 4 <= i <= k}`.
pub fn build_family_b(k: usize) -> Result<CyclicFamily> {
    if k < 3 {
        return Err(SwfError::OutOfRange(format!("family B needs k >= 3, got {k}")));
    }
    let mut base = vec![1, 3, 4, 8];
    base.extend((4..=k).map(|i| 3 * i));
    CyclicFamily::from_voters(3 * k + 2, &base)
}

/// Whether the base differences `a - a' mod n` cover all of `Z_n`.
pub fn verify_difference_cover(fam: &CyclicFamily) -> bool {
    let n = fam.n;
    let elems: Vec<usize> = (0..n).filter(|&v| fam.base.contains(v)).collect();
    let mut hit = vec![false; n];
    for &a in &elems {
        for &b in &elems {
            hit[(a + n - b) % n] = true;
        }
    }
    hit.into_iter().all(|h| h)
}

/// Brute-force pairwise intersection over all members.
pub fn verify_intersecting(fam: &CyclicFamily) -> bool {
    let m = &fam.members;
    (0..m.len()).all(|i| (i + 1..m.len()).all(|j| m[i].0 & m[j].0 != 0))
}

/// Which family a non-Borda construction used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    A,
    B,
}

#[derive(Debug, Clone)]
pub struct NonBordaConstruction {
    pub kind: FamilyKind,
    pub k: usize,
    pub family: CyclicFamily,
    pub g: SetFunctionWTL,
}

/// The set function of the strongly non-Borda SWF for `n >= 11`, `3 ∤ n`.
/// For `n = 3k + 1`: `L` on family members and on `|U| >= k + 1`, else `W`.
/// For `n = 3k + 2`: `W` on family members and on `|U| <= k`, else `L`.
pub fn nonborda_construction(n: usize) -> Result<NonBordaConstruction> {
    if n.is_multiple_of(3) {
        return Err(SwfError::Unsupported(format!(
            "no non-Borda SWF exists for n = {n} (n divisible by 3)"
        )));
    }
    if n < 11 {
        return Err(SwfError::Unsupported(format!("construction needs n >= 11, got {n}")));
    }
    check_voter_count(n)?;
    let k = n / 3;
    let (kind, family) = if n % 3 == 1 {
        (FamilyKind::A, build_family_a(k)?)
    } else {
        (FamilyKind::B, build_family_b(k)?)
    };
    let members = family.member_set();
    let g = match kind {
        FamilyKind::A => SetFunctionWTL::from_fn(n, |u| {
            if members.contains(&u) || u.count_ones() as usize > k {
                RelResult::L
            } else {
                RelResult::W
            }
        })?,
        FamilyKind::B => SetFunctionWTL::from_fn(n, |u| {
            if members.contains(&u) || u.count_ones() as usize <= k {
                RelResult::W
            } else {
                RelResult::L
            }
        })?,
    };
    Ok(NonBordaConstruction { kind, k, family, g })
}

pub fn build_nonborda_g(n: usize) -> Result<SetFunctionWTL> {
    Ok(nonborda_construction(n)?.g)
}
