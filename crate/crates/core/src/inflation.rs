//! Monotone inflations of peg permutations and grid-class membership.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::peg::{Decoration, PegPermutation};
use crate::perm::Permutation;

/// Per-entry multiplicities for a monotone inflation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InflationVector(pub Vec<usize>);

impl InflationVector {
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// Checks length and that every `•` entry is inflated by at most one.
    pub fn check_legal(&self, pp: &PegPermutation) -> Result<()> {
        if self.0.len() != pp.len() {
            return Err(Error::LengthMismatch {
                left: pp.len(),
                right: self.0.len(),
            });
        }
        for (i, (&v, d)) in self.0.iter().zip(pp.decorations()).enumerate() {
            if *d == Decoration::Dot && v > 1 {
                return Err(Error::InvalidArgument(format!(
                    "entry {} is decorated . but inflated by {v}",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

impl From<Vec<usize>> for InflationVector {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

/// Value offset of each entry: the total size of all entries with a smaller base value.
fn offsets(pp: &PegPermutation, sizes: &[usize]) -> Vec<usize> {
    let n = pp.len();
    let mut by_value = vec![0usize; n];
    for (i, &v) in pp.values().iter().enumerate() {
        by_value[v as usize - 1] = sizes[i];
    }
    let mut prefix = vec![0usize; n];
    for v in 1..n {
        prefix[v] = prefix[v - 1] + by_value[v - 1];
    }
    pp.values()
        .iter()
        .map(|&v| prefix[v as usize - 1])
        .collect()
}

/// Inflation without legality checks; `•` entries of size > 1 are laid out increasing.
pub(crate) fn inflate_sizes(pp: &PegPermutation, sizes: &[usize]) -> Permutation {
    let offs = offsets(pp, sizes);
    let mut out = Vec::with_capacity(sizes.iter().sum());
    for (i, d) in pp.decorations().iter().enumerate() {
        let lo = offs[i] as u8 + 1;
        let hi = (offs[i] + sizes[i]) as u8;
        if *d == Decoration::Minus {
            out.extend((lo..=hi).rev());
        } else {
            out.extend(lo..=hi);
        }
    }
    Permutation::new(out).expect("inflation yields a permutation")
}

/// The monotone inflation `pp[v]`.
pub fn monotone_inflate(pp: &PegPermutation, v: &InflationVector) -> Result<Permutation> {
    v.check_legal(pp)?;
    if v.total() > crate::perm::MAX_LEN {
        return Err(Error::LimitExceeded {
            what: "inflated length",
            requested: v.total(),
            limit: crate::perm::MAX_LEN,
        });
    }
    Ok(inflate_sizes(pp, &v.0))
}

/// Every peg permutation in `pp[v]_peg`: signed entries become identity (or reverse
/// identity) peg runs whose decorations range over `{+,•}` (or `{-,•}`).
pub fn peg_monotone_inflate(
    pp: &PegPermutation,
    v: &InflationVector,
) -> Result<BTreeSet<PegPermutation>> {
    let base = monotone_inflate(pp, v)?;
    let mut choices: Vec<(usize, Decoration)> = Vec::new();
    let mut fixed = Vec::with_capacity(base.len());
    for (d, &size) in pp.decorations().iter().zip(&v.0) {
        for _ in 0..size {
            if d.is_signed() {
                choices.push((fixed.len(), *d));
            }
            fixed.push(*d);
        }
    }
    if choices.len() > 20 {
        return Err(Error::LimitExceeded {
            what: "peg inflation choices",
            requested: choices.len(),
            limit: 20,
        });
    }
    let mut out = BTreeSet::new();
    for mask in 0u32..(1u32 << choices.len()) {
        let mut decs = fixed.clone();
        for (b, &(pos, _)) in choices.iter().enumerate() {
            if mask >> b & 1 == 1 {
                decs[pos] = Decoration::Dot;
            }
        }
        out.insert(PegPermutation::new(base.clone(), decs)?);
    }
    Ok(out)
}

/// All legal inflation vectors for `pp` with the given total.
pub fn legal_vectors(pp: &PegPermutation, total: usize) -> Vec<InflationVector> {
    fn walk(
        decs: &[Decoration],
        i: usize,
        left: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<InflationVector>,
    ) {
        if i == decs.len() {
            if left == 0 {
                out.push(InflationVector(cur.clone()));
            }
            return;
        }
        let max = if decs[i] == Decoration::Dot {
            left.min(1)
        } else {
            left
        };
        for size in 0..=max {
            cur.push(size);
            walk(decs, i + 1, left - size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    walk(pp.decorations(), 0, total, &mut Vec::new(), &mut out);
    out
}

/// One grid cell per entry of the gridding peg permutation, as searched by [`grid_member`].
struct Segmenter<'a> {
    grid: &'a PegPermutation,
    values: &'a [u8],
    // decorations of the candidate when testing peg membership
    decorations: Option<&'a [Decoration]>,
    // (lo, hi) value interval per grid entry, None when empty
    cells: Vec<Option<(u8, u8)>>,
}

impl Segmenter<'_> {
    fn run_len(&self, start: usize, d: Decoration) -> usize {
        let v = self.values;
        let allowed = |pos: usize| match self.decorations {
            None => true,
            Some(ds) => match d {
                Decoration::Plus => ds[pos] != Decoration::Minus,
                Decoration::Minus => ds[pos] != Decoration::Plus,
                Decoration::Dot => ds[pos] == Decoration::Dot,
            },
        };
        if start >= v.len() || !allowed(start) {
            return 0;
        }
        if d == Decoration::Dot {
            return 1;
        }
        let mut end = start;
        while end + 1 < v.len() && allowed(end + 1) {
            let ok = match d {
                Decoration::Plus => v[end + 1] == v[end] + 1,
                _ => v[end] == v[end + 1] + 1,
            };
            if !ok {
                break;
            }
            end += 1;
        }
        end + 1 - start
    }

    fn consistent(&self, i: usize, lo: u8, hi: u8) -> bool {
        let gv = self.grid.values();
        self.cells[..i].iter().enumerate().all(|(j, c)| match c {
            None => true,
            Some((clo, chi)) => {
                if gv[j] < gv[i] {
                    *chi < lo
                } else {
                    hi < *clo
                }
            }
        })
    }

    fn search(&mut self, i: usize, pos: usize) -> bool {
        let m = self.grid.len();
        if i == m {
            return pos == self.values.len();
        }
        let d = self.grid.decorations()[i];
        let max_len = self.run_len(pos, d);
        // remaining cells can absorb at most everything, so no tighter bound here
        for size in (0..=max_len).rev() {
            if size == 0 {
                self.cells[i] = None;
            } else {
                let (a, b) = (self.values[pos], self.values[pos + size - 1]);
                let (lo, hi) = (a.min(b), a.max(b));
                if !self.consistent(i, lo, hi) {
                    continue;
                }
                self.cells[i] = Some((lo, hi));
            }
            if self.search(i + 1, pos + size) {
                return true;
            }
        }
        self.cells[i] = None;
        false
    }
}

/// True iff `g` is a monotone inflation of `pp`.
///
/// Searches segmentations of `g` into `|pp|` consecutive blocks, each a run of
/// consecutive values in the direction of its decoration, whose value intervals are
/// ordered like the base of `pp`.
pub fn grid_member(pp: &PegPermutation, g: &Permutation) -> bool {
    let mut s = Segmenter {
        grid: pp,
        values: g.as_slice(),
        decorations: None,
        cells: vec![None; pp.len()],
    };
    s.search(0, 0)
}

/// True iff `g` lies in the peg grid class of `pp`.
pub fn grid_member_peg(pp: &PegPermutation, g: &PegPermutation) -> bool {
    let mut s = Segmenter {
        grid: pp,
        values: g.values(),
        decorations: Some(g.decorations()),
        cells: vec![None; pp.len()],
    };
    s.search(0, 0)
}

/// All length-`n` members of the union of the grid classes of `pegs`.
pub fn grid_enumerate<'a, I>(pegs: I, n: usize) -> BTreeSet<Permutation>
where
    I: IntoIterator<Item = &'a PegPermutation>,
{
    let mut out = BTreeSet::new();
    for pp in pegs {
        for v in legal_vectors(pp, n) {
            out.insert(inflate_sizes(pp, &v.0));
        }
    }
    out
}

/// Streams the permutations whose compaction is `beta`, ascending by length then
/// lexicographically, up to `max_len`.
pub struct ASetStream {
    beta: PegPermutation,
    max_len: usize,
    next_len: usize,
    pending: std::vec::IntoIter<Permutation>,
}

/// The fiber `{ g : peg(g) = beta }` truncated at `max_len`.
pub fn a_set_stream(beta: &PegPermutation, max_len: usize) -> Result<ASetStream> {
    if !beta.is_clean_compact() {
        return Err(Error::InvalidArgument(format!(
            "{beta} is not clean compact"
        )));
    }
    let min_len = beta
        .decorations()
        .iter()
        .map(|d| if d.is_signed() { 2 } else { 1 })
        .sum();
    Ok(ASetStream {
        beta: beta.clone(),
        max_len: max_len.min(crate::perm::MAX_LEN),
        next_len: min_len,
        pending: Vec::new().into_iter(),
    })
}

impl ASetStream {
    fn fill(&mut self, len: usize) -> Vec<Permutation> {
        let decs = self.beta.decorations();
        let signed = decs.iter().filter(|d| d.is_signed()).count();
        let dots = decs.len() - signed;
        let mut out = Vec::new();
        if len < dots + 2 * signed {
            return out;
        }
        let extra = len - dots - 2 * signed;
        // distribute `extra` over the signed entries
        let mut parts = vec![0usize; signed];
        loop {
            if parts.iter().sum::<usize>() == extra {
                let mut k = 0;
                let sizes: Vec<usize> = decs
                    .iter()
                    .map(|d| {
                        if d.is_signed() {
                            k += 1;
                            2 + parts[k - 1]
                        } else {
                            1
                        }
                    })
                    .collect();
                out.push(inflate_sizes(&self.beta, &sizes));
            }
            // odometer over 0..=extra per signed entry
            let mut t = 0;
            loop {
                if t == signed {
                    out.sort();
                    return out;
                }
                if parts[t] < extra {
                    parts[t] += 1;
                    break;
                }
                parts[t] = 0;
                t += 1;
            }
        }
    }
}

impl Iterator for ASetStream {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        loop {
            if let Some(p) = self.pending.next() {
                return Some(p);
            }
            if self.next_len > self.max_len {
                return None;
            }
            let len = self.next_len;
            self.next_len += 1;
            let batch = self.fill(len);
            let signed = self.beta.decorations().iter().any(|d| d.is_signed());
            if batch.is_empty() && !signed && len > self.beta.len() {
                return None;
            }
            self.pending = batch.into_iter();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::peg::{enumerate_clean_compact, peg_of};
    use crate::perm::permutations;

    fn pg(s: &str) -> PegPermutation {
        s.parse().unwrap()
    }

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn iv(v: &[usize]) -> InflationVector {
        InflationVector(v.to_vec())
    }

    #[test]
    fn monotone_inflate_examples() {
        let q = pg("3+ 1+ 2. 5- 4.");
        assert_eq!(
            monotone_inflate(&q, &iv(&[2, 0, 1, 3, 1])).unwrap(),
            p("2317654")
        );
        let cc = pg("2+ 5- 4+ 1. 3-");
        assert_eq!(monotone_inflate(&cc, &iv(&[1; 5])).unwrap(), *cc.base());
        assert_eq!(
            monotone_inflate(&pg("2+ 1+"), &iv(&[2, 2])).unwrap(),
            p("3412")
        );
    }

    #[test]
    fn monotone_inflate_errors() {
        let q = pg("2. 1+");
        assert!(matches!(
            monotone_inflate(&q, &iv(&[1])),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            monotone_inflate(&q, &iv(&[2, 1])),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn peg_inflate_examples() {
        let q = pg("3+ 1+ 2. 5- 4.");
        let set = peg_monotone_inflate(&q, &iv(&[2, 0, 1, 3, 1])).unwrap();
        assert!(set.contains(&pg("2. 3+ 1. 7- 6. 5- 4.")));
        assert_eq!(set.len(), 32);
        let set = peg_monotone_inflate(&pg("1+"), &iv(&[1])).unwrap();
        assert_eq!(set, [pg("1+"), pg("1.")].into_iter().collect());
        let set = peg_monotone_inflate(&pg("1."), &iv(&[0])).unwrap();
        assert_eq!(set, [PegPermutation::default()].into_iter().collect());
    }

    #[test]
    fn grid_member_examples() {
        let g = pg("1+ 2- 3+");
        assert!(grid_member(&g, &p("1432")));
        assert!(!grid_member(&g, &p("2143")));
        let q = pg("3+ 1+ 2. 5- 4.");
        for v in legal_vectors(&q, 6) {
            assert!(grid_member(&q, &monotone_inflate(&q, &v).unwrap()));
        }
    }

    #[test]
    fn grid_member_peg_examples() {
        assert!(grid_member_peg(&pg("1+"), &pg("1.")));
        assert!(!grid_member_peg(&pg("1+ 2- 3+"), &pg("1- 2-")));
        let q = pg("2+ 5- 4+ 1. 3-");
        assert!(grid_member_peg(&q, &q));
        assert!(grid_member_peg(&pg("1+"), &pg("1+ 2. 3+")));
        assert!(!grid_member_peg(&pg("1+"), &pg("1+ 2- 3+")));
    }

    #[test]
    fn grid_enumerate_examples() {
        let got = grid_enumerate([&pg("1+ 2- 3+")], 3);
        let expect: BTreeSet<_> = ["123", "132", "213", "321"].iter().map(|s| p(s)).collect();
        assert_eq!(got, expect);
        for n in 0..6 {
            let got = grid_enumerate([&pg("1+")], n);
            assert_eq!(
                got.into_iter().collect::<Vec<_>>(),
                vec![Permutation::identity(n)]
            );
        }
        // oracle: direct inflation over every (a, b) with a + b = 4
        let got = grid_enumerate([&pg("2+ 1+")], 4);
        let expect: BTreeSet<_> = ["1234", "2341", "3412", "4123"]
            .iter()
            .map(|s| p(s))
            .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn a_set_examples() {
        let got: Vec<_> = a_set_stream(&pg("2+ 1+"), 4).unwrap().collect();
        assert_eq!(got, vec![p("3412")]);
        let got: Vec<_> = a_set_stream(&pg("2+ 1+"), 5).unwrap().collect();
        assert_eq!(got, vec![p("3412"), p("34512"), p("45123")]);
        let got: Vec<_> = a_set_stream(&pg("1."), 7).unwrap().collect();
        assert_eq!(got, vec![p("1")]);
        assert!(a_set_stream(&pg("1+ 2+"), 5).is_err());
    }

    #[test]
    fn a_set_members_compact_to_beta() {
        for n in 1..=3 {
            for beta in enumerate_clean_compact(n) {
                let mut prev: Option<Permutation> = None;
                for g in a_set_stream(&beta, 8).unwrap() {
                    assert_eq!(peg_of(&g).unwrap(), beta);
                    if let Some(prev) = prev {
                        assert!(prev < g);
                    }
                    prev = Some(g);
                }
            }
        }
    }

    #[test]
    fn a_set_matches_fiber_by_brute_force() {
        for beta in enumerate_clean_compact(2) {
            let streamed: BTreeSet<_> = a_set_stream(&beta, 6).unwrap().collect();
            let brute: BTreeSet<_> = (1..=6)
                .flat_map(permutations)
                .filter(|g| peg_of(g).unwrap() == beta)
                .collect();
            assert_eq!(streamed, brute, "{beta}");
        }
    }
}
