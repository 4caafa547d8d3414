//! Generating sets: the clean compact peg permutations whose grid classes cover a ball.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::{Model, Oracle};
use crate::error::{Error, Result};
use crate::peg::{Decoration, PegPermutation};
use crate::perm::Permutation;

/// A multiset `{i, j}` of 1-based indices with `i <= j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexPair {
    pub i: usize,
    pub j: usize,
}

impl IndexPair {
    pub fn new(i: usize, j: usize) -> Result<Self> {
        if i == 0 || i > j {
            return Err(Error::InvalidArgument(format!(
                "index pair {{{i}, {j}}} needs 1 <= i <= j"
            )));
        }
        Ok(Self { i, j })
    }

    /// All pairs for length `n`.
    pub fn all(n: usize) -> Vec<IndexPair> {
        (1..=n)
            .flat_map(|i| (i..=n).map(move |j| IndexPair { i, j }))
            .collect()
    }
}

/// The `k`-generating set of a ball.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratingSet {
    pub model: Model,
    pub k: usize,
    pub members: BTreeSet<PegPermutation>,
    /// Number of (parent, step) derivations that produced a member at the last level.
    pub derivations: usize,
}

impl GeneratingSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn check_no_dot_signed(pp: &PegPermutation) -> Result<()> {
    if pp.has_dot() {
        return Err(Error::InvalidArgument(format!(
            "{pp} has an entry decorated ."
        )));
    }
    Ok(())
}

/// Replaces entry `i` (1-based) by `len` consecutive values in the direction of its sign.
fn blow_up(values: &[u8], decs: &[Decoration], i: usize, len: usize) -> (Vec<u8>, Vec<Decoration>) {
    let pivot = values[i - 1];
    let shift = (len - 1) as u8;
    let mut v = Vec::with_capacity(values.len() + len - 1);
    let mut d = Vec::with_capacity(values.len() + len - 1);
    for (p, (&x, &e)) in values.iter().zip(decs).enumerate() {
        if p + 1 == i {
            let run: Vec<u8> = match e {
                Decoration::Minus => (0..len as u8).rev().map(|t| pivot + t).collect(),
                _ => (0..len as u8).map(|t| pivot + t).collect(),
            };
            d.extend(std::iter::repeat_n(e, len));
            v.extend(run);
        } else {
            v.push(if x > pivot { x + shift } else { x });
            d.push(e);
        }
    }
    (v, d)
}

/// One inflation step of the reversal construction: inflate positions `i` and `j`
/// (or `i` three-fold when `i == j`), then apply the oriented reversal of the new
/// positions `i+1 ..= j+1`.
pub fn rd_inflate_step(pp: &PegPermutation, pair: IndexPair) -> Result<PegPermutation> {
    check_no_dot_signed(pp)?;
    if !pp.is_clean_compact() {
        return Err(Error::InvalidArgument(format!("{pp} is not clean compact")));
    }
    let n = pp.len();
    let IndexPair { i, j } = pair;
    if i == 0 || i > j || j > n {
        return Err(Error::IndexOutOfRange(format!(
            "index pair {{{i}, {j}}} for length {n}"
        )));
    }
    let (values, decs) = if i == j {
        blow_up(pp.values(), pp.decorations(), i, 3)
    } else {
        // inflate j first so position i is unaffected
        let (v, d) = blow_up(pp.values(), pp.decorations(), j, 2);
        blow_up(&v, &d, i, 2)
    };
    let inflated = PegPermutation::new(Permutation::new(values)?, decs)?;
    inflated.oriented_reversal(i + 1, j + 1)
}

/// The `k`-generating set for reversals, grown from `1^+` by `k` inflation steps.
pub fn rd_generating_set(k: usize) -> GeneratingSet {
    let mut level: BTreeSet<PegPermutation> = BTreeSet::new();
    level.insert(identity_plus(1));
    let mut derivations = 1;
    for _ in 0..k {
        let parents: Vec<&PegPermutation> = level.iter().collect();
        let children: Vec<Vec<PegPermutation>> = parents
            .par_iter()
            .map(|pp| {
                IndexPair::all(pp.len())
                    .into_iter()
                    .map(|pair| rd_inflate_step(pp, pair).expect("generating input"))
                    .collect()
            })
            .collect();
        derivations = children.iter().map(Vec::len).sum();
        level = children.into_iter().flatten().collect();
    }
    GeneratingSet {
        model: Model::Rd,
        k,
        members: level,
        derivations,
    }
}

fn identity_plus(n: usize) -> PegPermutation {
    PegPermutation::uniform(Permutation::identity(n), Decoration::Plus)
}

/// One step of the prefix-reversal construction at position `i` (1-based).
///
/// Writing `pp = alpha x beta` with `x` at position `i`: if `x = a^+` the result is
/// `a^- alpha'^R (a+1)^+ beta'`, and if `x = a^-` it is `(a+1)^+ alpha'^R a^- beta'`, where
/// primes shift values above `a` up by one and `^R` is the oriented reversal.
pub fn prd_inflate_step(pp: &PegPermutation, i: usize) -> Result<PegPermutation> {
    let n = pp.len();
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange(format!("index {i} for length {n}")));
    }
    let a = pp.values()[i - 1];
    let d = pp.decorations()[i - 1];
    let bump = |x: u8| if x > a { x + 1 } else { x };
    let mut alpha: Vec<(u8, Decoration)> = pp.values()[..i - 1]
        .iter()
        .zip(&pp.decorations()[..i - 1])
        .map(|(&x, &e)| (bump(x), e.flipped()))
        .collect();
    alpha.reverse();
    let beta = pp.values()[i..]
        .iter()
        .zip(&pp.decorations()[i..])
        .map(|(&x, &e)| (bump(x), e));
    let (first, middle) = match d {
        Decoration::Plus => ((a, Decoration::Minus), (a + 1, Decoration::Plus)),
        Decoration::Minus => ((a + 1, Decoration::Plus), (a, Decoration::Minus)),
        Decoration::Dot => {
            return Err(Error::InvalidArgument(format!(
                "entry {i} of {pp} is decorated ."
            )))
        }
    };
    let entries: Vec<(u8, Decoration)> = std::iter::once(first)
        .chain(alpha)
        .chain(std::iter::once(middle))
        .chain(beta)
        .collect();
    let (values, decs): (Vec<u8>, Vec<Decoration>) = entries.into_iter().unzip();
    PegPermutation::new(Permutation::new(values)?, decs)
}

/// The `k`-generating set for prefix reversals, grown from `1^+`; `k!` members of length `k + 1`.
pub fn prd_generating_set(k: usize) -> GeneratingSet {
    let mut level: BTreeSet<PegPermutation> = BTreeSet::new();
    level.insert(identity_plus(1));
    let mut derivations = 1;
    for _ in 0..k {
        let mut next = BTreeSet::new();
        derivations = 0;
        for pp in &level {
            for i in 1..=pp.len() {
                next.insert(prd_inflate_step(pp, i).expect("generating input"));
                derivations += 1;
            }
        }
        level = next;
    }
    GeneratingSet {
        model: Model::Prd,
        k,
        members: level,
        derivations,
    }
}

pub fn generating_set(model: Model, k: usize) -> GeneratingSet {
    match model {
        Model::Rd => rd_generating_set(k),
        Model::Prd => prd_generating_set(k),
    }
}

/// Which parent and step produced each member, grouped by member.
pub fn prd_parents(k: usize) -> BTreeMap<PegPermutation, Vec<(PegPermutation, usize)>> {
    let mut out: BTreeMap<PegPermutation, Vec<(PegPermutation, usize)>> = BTreeMap::new();
    if k == 0 {
        return out;
    }
    for parent in prd_generating_set(k - 1).members {
        for i in 1..=parent.len() {
            let child = prd_inflate_step(&parent, i).expect("generating input");
            out.entry(child).or_default().push((parent.clone(), i));
        }
    }
    out
}

/// Checks the defining conditions of a `k`-generating permutation.
///
/// Reversals: length `2k+1`, clean compact, no `•`, distance `k`. Prefix reversals:
/// length `k+1`, clean compact, distance `k`, and maximal among clean compact members of
/// the peg ball (no `•` can be strengthened to a sign without leaving the ball).
pub fn is_generating(oracle: &Oracle, model: Model, k: usize, pp: &PegPermutation) -> Result<bool> {
    let expected_len = match model {
        Model::Rd => 2 * k + 1,
        Model::Prd => k + 1,
    };
    if pp.len() != expected_len || !pp.is_clean_compact() {
        return Ok(false);
    }
    if model == Model::Rd && pp.has_dot() {
        return Ok(false);
    }
    if oracle.distance_peg(model, pp)? as usize != k {
        return Ok(false);
    }
    if model == Model::Prd {
        for (p, d) in pp.decorations().iter().enumerate() {
            if *d != Decoration::Dot {
                continue;
            }
            for s in [Decoration::Plus, Decoration::Minus] {
                let mut decs = pp.decorations().to_vec();
                decs[p] = s;
                let q = PegPermutation::new(pp.base().clone(), decs)?;
                if q.is_clean_compact() && oracle.distance_peg(model, &q)? as usize <= k {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
