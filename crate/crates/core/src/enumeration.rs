//! Counting balls by breadth-first search, by grid classes of the generating set, and by
//! avoidance of the computed standard basis.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::standard_basis;
use crate::distance::{Model, Oracle};
use crate::error::{Error, Result};
use crate::generators::generating_set;
use crate::inflation::{grid_enumerate, grid_member};
use crate::perm::{avoids_all, Permutation};

/// Largest length accepted by the grid and avoidance counters.
pub const ENUMERATION_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bfs,
    Grid,
    Avoid,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Bfs, Method::Grid, Method::Avoid];

    pub fn name(self) -> &'static str {
        match self {
            Method::Bfs => "bfs",
            Method::Grid => "grid",
            Method::Avoid => "avoid",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bfs" => Ok(Method::Bfs),
            "grid" => Ok(Method::Grid),
            "avoid" => Ok(Method::Avoid),
            other => Err(Error::Parse(format!(
                "unknown method {other:?} (expected bfs, grid or avoid)"
            ))),
        }
    }
}

fn check_length(oracle: &Oracle, method: Method, n: usize) -> Result<()> {
    let limit = match method {
        Method::Bfs => oracle.limits().standard,
        Method::Grid | Method::Avoid => ENUMERATION_LIMIT,
    };
    if n > limit {
        return Err(Error::LimitExceeded {
            what: "enumeration length",
            requested: n,
            limit,
        });
    }
    Ok(())
}

/// `|B_k(n)|` by the chosen method.
pub fn count_ball(
    oracle: &Oracle,
    model: Model,
    k: usize,
    n: usize,
    method: Method,
) -> Result<u64> {
    check_length(oracle, method, n)?;
    match method {
        Method::Bfs => bfs_count(oracle, model, k, n),
        Method::Grid => Ok(grid_count(model, k, n)),
        Method::Avoid => Ok(*sequence(oracle, model, k, n, Method::Avoid)?
            .last()
            .unwrap_or(&1)),
    }
}

/// Counts for lengths `1..=n_max`.
pub fn sequence(
    oracle: &Oracle,
    model: Model,
    k: usize,
    n_max: usize,
    method: Method,
) -> Result<Vec<u64>> {
    check_length(oracle, method, n_max)?;
    match method {
        Method::Bfs => (1..=n_max)
            .map(|n| bfs_count(oracle, model, k, n))
            .collect(),
        Method::Grid => Ok((1..=n_max)
            .into_par_iter()
            .map(|n| grid_count(model, k, n))
            .collect()),
        Method::Avoid => {
            let basis = standard_basis(oracle, model, k, None)?.members;
            Ok(avoid_sequence(&basis, n_max))
        }
    }
}

fn bfs_count(oracle: &Oracle, model: Model, k: usize, n: usize) -> Result<u64> {
    let table = oracle.build_table(model, n, crate::distance::TableKind::Standard)?;
    Ok(table.histogram().iter().take(k + 1).sum())
}

/// Union of the generators' grid classes; each generator only counts what no earlier
/// generator's class already contains.
fn grid_count(model: Model, k: usize, n: usize) -> u64 {
    let gens: Vec<_> = generating_set(model, k).members.into_iter().collect();
    let mut total = 0u64;
    for (j, pp) in gens.iter().enumerate() {
        let own = grid_enumerate(std::iter::once(pp), n);
        total += own
            .par_iter()
            .filter(|g| !gens[..j].iter().any(|earlier| grid_member(earlier, g)))
            .count() as u64;
    }
    total
}

/// Builds `Av(basis)` level by level: every member of length `n` arises from exactly one
/// member of length `n - 1` by inserting the new maximum.
pub fn avoid_sequence(basis: &BTreeSet<Permutation>, n_max: usize) -> Vec<u64> {
    let mut counts = Vec::with_capacity(n_max);
    let mut level = vec![Permutation::identity(0)];
    for n in 1..=n_max {
        level = level
            .par_iter()
            .flat_map_iter(|p| {
                (0..n).filter_map(move |pos| {
                    let mut v = p.as_slice().to_vec();
                    v.insert(pos, n as u8);
                    let q = Permutation::new(v).expect("insertion keeps a permutation");
                    avoids_all(basis, &q).then_some(q)
                })
            })
            .collect();
        counts.push(level.len() as u64);
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        let o = Oracle::default();
        for m in Method::ALL {
            // (n-1)^2 + 1, not n^2 + 1
            assert_eq!(count_ball(&o, Model::Prd, 2, 5, m).unwrap(), 17, "{m}");
            assert_eq!(count_ball(&o, Model::Rd, 1, 3, m).unwrap(), 4, "{m}");
            assert_eq!(count_ball(&o, Model::Rd, 0, 4, m).unwrap(), 1, "{m}");
        }
    }

    #[test]
    fn sequences() {
        let o = Oracle::default();
        assert_eq!(
            sequence(&o, Model::Rd, 1, 4, Method::Bfs).unwrap(),
            vec![1, 2, 4, 7]
        );
        assert_eq!(
            sequence(&o, Model::Rd, 0, 4, Method::Bfs).unwrap(),
            vec![1, 1, 1, 1]
        );
        assert_eq!(
            sequence(&o, Model::Prd, 2, 6, Method::Avoid).unwrap(),
            vec![1, 2, 5, 10, 17, 26]
        );
    }

    #[test]
    fn limits_enforced() {
        let o = Oracle::default();
        assert!(matches!(
            count_ball(&o, Model::Rd, 1, 13, Method::Grid),
            Err(Error::LimitExceeded { .. })
        ));
        assert!(matches!(
            count_ball(&o, Model::Rd, 1, 10, Method::Bfs),
            Err(Error::LimitExceeded { .. })
        ));
    }

    #[test]
    fn method_from_str() {
        assert_eq!("GRID".parse::<Method>().unwrap(), Method::Grid);
        assert!("dfs".parse::<Method>().is_err());
    }
}
