//! Clean compact peg bases of peg balls, M-sets, and standard bases of balls.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::{Model, Oracle, TableKind};
use crate::error::{Error, Result};
use crate::inflation::a_set_stream;
use crate::peg::{
    clean_compact_proper_patterns, exceptional, Decoration, ExceptionalKind, PegPermutation,
};
use crate::perm::{
    avoids_all, factorial, lehmer_rank, lehmer_unrank, minimal_elements, permutations, Permutation,
};

/// Minimal clean compact peg permutations outside the peg ball of radius `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PegBasis {
    pub model: Model,
    pub k: usize,
    /// Longest length searched.
    pub max_len: usize,
    pub members: BTreeSet<PegPermutation>,
}

/// Longest possible member of the clean compact peg basis.
pub fn basis_length_bound(model: Model, k: usize) -> usize {
    match model {
        Model::Rd => 2 * k + 1,
        Model::Prd => k + 2,
    }
}

/// Length searched by [`peg_basis`]. The bound above misses `2• 4• 1• 3•` and
/// `3• 1• 4• 2•`, which have no clean compact pattern of length 3, so at least 4.
pub fn basis_search_length(model: Model, k: usize) -> usize {
    basis_length_bound(model, k).max(4)
}

pub fn peg_basis(oracle: &Oracle, model: Model, k: usize) -> Result<PegBasis> {
    peg_basis_up_to(oracle, model, k, basis_search_length(model, k))
}

const DEC: [Decoration; 3] = [Decoration::Plus, Decoration::Minus, Decoration::Dot];

fn decode(code: usize, n: usize, out: &mut [u8]) {
    let mut c = code;
    for p in (0..n).rev() {
        out[p] = (c % 3) as u8;
        c /= 3;
    }
}

fn encode(digits: &[u8]) -> usize {
    digits.iter().fold(0, |acc, &d| acc * 3 + d as usize)
}

/// Adjacent pair `p, p+1` lies in a strip (digits: 0 = +, 1 = -, 2 = •).
fn in_strip(vals: &[u8], digs: &[u8], p: usize) -> bool {
    let (a, b) = (vals[p], vals[p + 1]);
    let (da, db) = (digs[p], digs[p + 1]);
    (b == a + 1 && da != 1 && db != 1) || (a == b + 1 && da != 0 && db != 0)
}

/// Clean compact peg basis members of length at most `max_len`.
///
/// Dynamic programming over all peg permutations up to `max_len`: `good(x)` holds when
/// every clean compact pattern of `x`, `x` included, lies in the ball. Every proper
/// pattern is reached by one deletion or one weakening followed by further steps, so
/// `x` is a basis member exactly when it is clean compact, outside the ball, and all its
/// one-step patterns are good.
pub fn peg_basis_up_to(
    oracle: &Oracle,
    model: Model,
    k: usize,
    max_len: usize,
) -> Result<PegBasis> {
    let limit = oracle.limits().peg;
    if max_len > limit {
        return Err(Error::LimitExceeded {
            what: "peg basis candidate length",
            requested: max_len,
            limit,
        });
    }
    let mut members = BTreeSet::new();
    // good[0]: the empty permutation
    let mut prev_good: Vec<bool> = vec![true];
    for n in 1..=max_len {
        let table = oracle.build_table(model, n, TableKind::Peg)?;
        let p3 = 3usize.pow(n as u32);
        let p3_prev = p3 / 3;
        // codes ordered by dot count, most dots first, so weakenings are ready
        let mut codes: Vec<usize> = (0..p3).collect();
        let dots = |c: usize| {
            let mut d = [0u8; 8];
            decode(c, n, &mut d);
            d[..n].iter().filter(|&&x| x == 2).count()
        };
        codes.sort_by_key(|&c| std::cmp::Reverse(dots(c)));
        let mut good = vec![false; factorial(n) as usize * p3];
        let found: Vec<Vec<PegPermutation>> = good
            .par_chunks_mut(p3)
            .enumerate()
            .map(|(lehmer, chunk)| {
                let mut vals = [0u8; 8];
                lehmer_unrank(n, lehmer as u64, &mut vals[..n]);
                let mut digs = [0u8; 8];
                let mut sub_vals = [0u8; 8];
                let mut sub_digs = [0u8; 8];
                let mut local = Vec::new();
                for &code in &codes {
                    decode(code, n, &mut digs);
                    let mut children_good = true;
                    for p in 0..n {
                        let mut t = 0;
                        for q in 0..n {
                            if q != p {
                                let v = vals[q];
                                sub_vals[t] = if v > vals[p] { v - 1 } else { v };
                                sub_digs[t] = digs[q];
                                t += 1;
                            }
                        }
                        let r = lehmer_rank(&sub_vals[..n - 1]) as usize * p3_prev
                            + encode(&sub_digs[..n - 1]);
                        if !prev_good[r] {
                            children_good = false;
                            break;
                        }
                    }
                    if children_good {
                        for p in 0..n {
                            if digs[p] != 2 {
                                let saved = digs[p];
                                digs[p] = 2;
                                let ok = chunk[encode(&digs[..n])];
                                digs[p] = saved;
                                if !ok {
                                    children_good = false;
                                    break;
                                }
                            }
                        }
                    }
                    let clean = (0..n - 1).all(|p| !in_strip(&vals, &digs, p));
                    let outside =
                        clean && table.get(lehmer * p3 + code).is_none_or(|d| d as usize > k);
                    chunk[code] = children_good && !outside;
                    if children_good && outside {
                        local.push(PegPermutation::from_parts_unchecked(
                            vals[..n].to_vec(),
                            digs[..n].iter().map(|&d| DEC[d as usize]).collect(),
                        ));
                    }
                }
                local
            })
            .collect();
        members.extend(found.into_iter().flatten());
        prev_good = good;
    }
    Ok(PegBasis {
        model,
        k,
        max_len,
        members,
    })
}

/// Literal membership test: clean compact, outside the ball, and every proper clean
/// compact pattern inside it.
pub fn is_peg_basis_member(
    oracle: &Oracle,
    model: Model,
    k: usize,
    pp: &PegPermutation,
) -> Result<bool> {
    if !pp.is_clean_compact() || (oracle.distance_peg(model, pp)? as usize) <= k {
        return Ok(false);
    }
    for q in clean_compact_proper_patterns(pp) {
        if oracle.distance_peg(model, &q)? as usize > k {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One exceptional permutation checked against two consecutive radii.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalEntry {
    pub kind: ExceptionalKind,
    pub perm: PegPermutation,
    pub distance: usize,
    pub in_basis_k: bool,
    pub in_basis_k_plus_one: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalReport {
    pub k: usize,
    pub entries: Vec<ExceptionalEntry>,
}

impl ExceptionalReport {
    /// Distance `k + 2` and membership in both bases, for both permutations.
    pub fn passed(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.distance == self.k + 2 && e.in_basis_k && e.in_basis_k_plus_one)
    }
}

/// Checks the two exceptional permutations of length `k + 2` for prefix reversals.
pub fn exceptional_check(oracle: &Oracle, k: usize) -> Result<ExceptionalReport> {
    let n = k + 2;
    let mut entries = Vec::new();
    for kind in ExceptionalKind::for_length(n) {
        let perm = exceptional(kind, n)?;
        let distance = oracle.distance_peg(Model::Prd, &perm)? as usize;
        entries.push(ExceptionalEntry {
            kind,
            distance,
            in_basis_k: is_peg_basis_member(oracle, Model::Prd, k, &perm)?,
            in_basis_k_plus_one: is_peg_basis_member(oracle, Model::Prd, k + 1, &perm)?,
            perm,
        });
    }
    Ok(ExceptionalReport { k, entries })
}

/// Minimal permutations collapsing to `beta` that attain its peg distance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MSet {
    pub model: Model,
    pub beta: PegPermutation,
    pub target_distance: usize,
    /// Longest length searched.
    pub cap: usize,
    /// The default cap was lowered to the table limit.
    pub clamped: bool,
    /// Members of the A-set examined.
    pub examined: usize,
    pub members: BTreeSet<Permutation>,
}

impl MSet {
    /// The search ended without finding any witness.
    pub fn cap_hit_without_witness(&self) -> bool {
        self.members.is_empty()
    }
}

/// Default length cap for [`m_set`]: `|beta| + 2 (d + 1)`.
pub fn default_m_cap(beta: &PegPermutation, distance: usize) -> usize {
    beta.len() + 2 * (distance + 1)
}

/// Searches the A-set of `beta` by increasing length up to `cap` (default
/// [`default_m_cap`], lowered to the standard table limit) for members at distance
/// `distance_peg(beta)`, keeping those with no such member as a proper pattern.
pub fn m_set(
    oracle: &Oracle,
    model: Model,
    beta: &PegPermutation,
    cap: Option<usize>,
) -> Result<MSet> {
    let target = oracle.distance_peg(model, beta)? as usize;
    let (cap, clamped) = match cap {
        Some(c) => (c, false),
        None => {
            let want = default_m_cap(beta, target);
            let limit = oracle.limits().standard.max(beta.len());
            (want.min(limit), want > limit)
        }
    };
    let mut members: BTreeSet<Permutation> = BTreeSet::new();
    let mut found: Vec<Permutation> = Vec::new();
    let mut examined = 0;
    let mut stream = a_set_stream(beta, cap)?.peekable();
    while let Some(first) = stream.next() {
        // one length at a time; distances of a level computed in parallel
        let len = first.len();
        let mut level = vec![first];
        while stream.peek().is_some_and(|g| g.len() == len) {
            level.push(stream.next().unwrap());
        }
        examined += level.len();
        let dists: Vec<Result<u8>> = level
            .par_iter()
            .map(|g| oracle.distance(model, g))
            .collect();
        let mut new = Vec::new();
        for (g, d) in level.into_iter().zip(dists) {
            if d? as usize == target && !found.iter().any(|m| g.contains(m)) {
                new.push(g);
            }
        }
        for g in new {
            members.insert(g.clone());
            found.push(g);
        }
    }
    Ok(MSet {
        model,
        beta: beta.clone(),
        target_distance: target,
        cap,
        clamped,
        examined,
        members,
    })
}

/// Standard basis of a ball with the M-sets it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardBasis {
    pub model: Model,
    pub k: usize,
    pub members: BTreeSet<Permutation>,
    /// Peg basis members whose M-set contains each basis member.
    pub provenance: BTreeMap<Permutation, Vec<PegPermutation>>,
    pub m_sets: Vec<MSet>,
    /// Avoidance was compared with the ball for every length up to this one.
    pub verified_up_to: usize,
    /// First permutation on which avoidance and ball membership disagree.
    pub counterexample: Option<Permutation>,
    /// True basis elements up to `verified_up_to` that the M-sets did not produce.
    pub missing: BTreeSet<Permutation>,
    /// Produced members up to `verified_up_to` that are not true basis elements.
    pub spurious: BTreeSet<Permutation>,
}

impl StandardBasis {
    pub fn verified(&self) -> bool {
        self.counterexample.is_none()
    }

    /// True iff some M-set search was clamped or found nothing.
    pub fn truncated(&self) -> bool {
        self.m_sets
            .iter()
            .any(|m| m.clamped || m.cap_hit_without_witness())
    }
}

/// Minimal elements of the union of the M-sets of the clean compact peg basis,
/// checked against the ball by exhaustive avoidance up to the cap (and table limit).
pub fn standard_basis(
    oracle: &Oracle,
    model: Model,
    k: usize,
    cap: Option<usize>,
) -> Result<StandardBasis> {
    let pb = peg_basis(oracle, model, k)?;
    let m_sets: Vec<MSet> = pb
        .members
        .iter()
        .map(|beta| m_set(oracle, model, beta, cap))
        .collect::<Result<_>>()?;
    let union: BTreeSet<Permutation> = m_sets
        .iter()
        .flat_map(|m| m.members.iter().cloned())
        .collect();
    let members = minimal_elements(&union);
    let mut provenance: BTreeMap<Permutation, Vec<PegPermutation>> = BTreeMap::new();
    for m in &m_sets {
        for g in &m.members {
            if members.contains(g) {
                provenance
                    .entry(g.clone())
                    .or_default()
                    .push(m.beta.clone());
            }
        }
    }
    let longest = m_sets.iter().map(|m| m.cap).max().unwrap_or(0);
    let verified_up_to = longest.min(oracle.limits().standard);
    let counterexample = check_basis_against_ball(oracle, model, k, &members, verified_up_to)?;
    let direct = ball_basis(oracle, model, k, verified_up_to)?;
    let missing = direct.difference(&members).cloned().collect();
    let spurious = members
        .iter()
        .filter(|p| p.len() <= verified_up_to && !direct.contains(p))
        .cloned()
        .collect();
    Ok(StandardBasis {
        model,
        k,
        members,
        provenance,
        m_sets,
        verified_up_to,
        counterexample,
        missing,
        spurious,
    })
}

/// Minimal permutations outside the ball, read off the distance tables up to length `n_max`.
/// The ball is closed under patterns, so a permutation outside it is minimal exactly when
/// every one-entry deletion lies inside.
pub fn ball_basis(
    oracle: &Oracle,
    model: Model,
    k: usize,
    n_max: usize,
) -> Result<BTreeSet<Permutation>> {
    let mut out = BTreeSet::new();
    let mut prev = oracle.build_table(model, 0, TableKind::Standard)?;
    for n in 1..=n_max {
        let table = oracle.build_table(model, n, TableKind::Standard)?;
        let found: Vec<Permutation> = permutations(n)
            .collect::<Vec<_>>()
            .into_par_iter()
            .filter(|p| {
                table.distance_of(p).is_none_or(|d| d as usize > k)
                    && (0..n).all(|skip| {
                        let rest: Vec<u8> = p
                            .as_slice()
                            .iter()
                            .enumerate()
                            .filter(|&(i, _)| i != skip)
                            .map(|(_, &v)| v)
                            .collect();
                        let q = Permutation::standardize(&rest);
                        prev.distance_of(&q).is_some_and(|d| d as usize <= k)
                    })
            })
            .collect();
        out.extend(found);
        prev = table;
    }
    Ok(out)
}

/// First permutation of length at most `n_max` where avoiding `basis` and lying in the ball disagree.
pub fn check_basis_against_ball(
    oracle: &Oracle,
    model: Model,
    k: usize,
    basis: &BTreeSet<Permutation>,
    n_max: usize,
) -> Result<Option<Permutation>> {
    for n in 0..=n_max {
        let table = oracle.build_table(model, n, TableKind::Standard)?;
        let all: Vec<Permutation> = permutations(n).collect();
        let bad = all.par_iter().find_first(|p| {
            let inside = table.distance_of(p).is_some_and(|d| d as usize <= k);
            inside != avoids_all(basis, p)
        });
        if let Some(p) = bad {
            return Ok(Some(p.clone()));
        }
    }
    Ok(None)
}

/// Ball membership of a single permutation, with a witness either way.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Membership {
    Inside {
        distance: u8,
        /// A generator whose grid class contains the permutation.
        generator: PegPermutation,
    },
    Outside {
        distance: u8,
        /// A minimal excluded pattern contained in the permutation.
        basis_element: Permutation,
    },
}

pub fn membership(oracle: &Oracle, model: Model, k: usize, p: &Permutation) -> Result<Membership> {
    let distance = oracle.distance(model, p)?;
    if distance as usize <= k {
        let generator = crate::generators::generating_set(model, k)
            .members
            .into_iter()
            .find(|g| crate::inflation::grid_member(g, p))
            .ok_or_else(|| Error::InvalidArgument(format!("no generator covers {p}")))?;
        return Ok(Membership::Inside {
            distance,
            generator,
        });
    }
    // balls are down-sets, so deleting entries while staying outside ends at a basis element
    let mut q = p.clone();
    'shrink: loop {
        for skip in 0..q.len() {
            let rest: Vec<u8> = q
                .as_slice()
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect();
            let smaller = Permutation::standardize(&rest);
            if oracle.distance(model, &smaller)? as usize > k {
                q = smaller;
                continue 'shrink;
            }
        }
        break;
    }
    Ok(Membership::Outside {
        distance,
        basis_element: q,
    })
}

/// Whether `pp` is compact: every strip of length two or more is all `•`.
pub fn compactness_check(pp: &PegPermutation) -> bool {
    pp.is_compact()
}
