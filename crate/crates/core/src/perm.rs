//! Permutations in one-line notation and classical pattern containment.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Longest permutation the crate will represent. Values are stored as `u8`.
pub const MAX_LEN: usize = 32;

/// A permutation of `{1..n}` in one-line notation.
///
/// Ordering is by length first, then lexicographic on the entries.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Permutation {
    entries: Vec<u8>,
}

impl Permutation {
    /// Builds a permutation, checking that `entries` is a bijection on `1..=n`.
    pub fn new(entries: Vec<u8>) -> Result<Self> {
        let n = entries.len();
        if n > MAX_LEN {
            return Err(Error::InvalidArgument(format!(
                "permutation length {n} exceeds {MAX_LEN}"
            )));
        }
        let mut seen = 0u64;
        for &v in &entries {
            if v == 0 || v as usize > n {
                return Err(Error::InvalidArgument(format!("value {v} outside 1..={n}")));
            }
            let bit = 1u64 << (v - 1);
            if seen & bit != 0 {
                return Err(Error::InvalidArgument(format!("value {v} repeated")));
            }
            seen |= bit;
        }
        Ok(Self { entries })
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<u8>) -> Self {
        debug_assert!(Self::new(entries.clone()).is_ok());
        Self { entries }
    }

    /// Rescales a sequence of distinct values to the permutation with the same relative order.
    pub fn standardize(values: &[u8]) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by_key(|&i| values[i]);
        let mut entries = vec![0u8; values.len()];
        for (rank, &i) in order.iter().enumerate() {
            entries[i] = rank as u8 + 1;
        }
        Self { entries }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: (1..=n as u8).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.entries
    }

    pub fn is_identity(&self) -> bool {
        self.entries
            .iter()
            .enumerate()
            .all(|(i, &v)| v as usize == i + 1)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u8; self.len()];
        for (i, &v) in self.entries.iter().enumerate() {
            inv[v as usize - 1] = i as u8 + 1;
        }
        Self { entries: inv }
    }

    /// Reverses the segment of positions `i..=j` (1-based).
    pub fn reversal(&self, i: usize, j: usize) -> Result<Self> {
        check_segment(i, j, self.len())?;
        let mut entries = self.entries.clone();
        entries[i - 1..j].reverse();
        Ok(Self { entries })
    }

    /// Reverses the prefix of length `j`.
    pub fn prefix_reversal(&self, j: usize) -> Result<Self> {
        self.reversal(1, j)
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        let entries = other
            .entries
            .iter()
            .map(|&v| self.entries[v as usize - 1])
            .collect();
        Ok(Self { entries })
    }

    /// True iff `pattern` occurs in `self` as an order-isomorphic subsequence.
    pub fn contains(&self, pattern: &Permutation) -> bool {
        contains_pattern(pattern, self)
    }

    /// Lehmer-code rank among all permutations of the same length (lexicographic order).
    pub fn rank(&self) -> u64 {
        lehmer_rank(&self.entries)
    }

    pub fn unrank(n: usize, rank: u64) -> Self {
        let mut entries = vec![0u8; n];
        lehmer_unrank(n, rank, &mut entries);
        Self { entries }
    }

    /// All distinct patterns of length `m` contained in `self`.
    pub fn patterns_of_length(&self, m: usize) -> BTreeSet<Permutation> {
        fn walk(
            entries: &[u8],
            m: usize,
            start: usize,
            buf: &mut Vec<u8>,
            out: &mut BTreeSet<Permutation>,
        ) {
            if buf.len() == m {
                out.insert(Permutation::standardize(buf));
                return;
            }
            let need = m - buf.len();
            for i in start..=entries.len() - need {
                buf.push(entries[i]);
                walk(entries, m, i + 1, buf, out);
                buf.pop();
            }
        }
        let mut out = BTreeSet::new();
        if m <= self.len() {
            walk(&self.entries, m, 0, &mut Vec::with_capacity(m), &mut out);
        }
        out
    }
}

pub(crate) fn check_segment(i: usize, j: usize, n: usize) -> Result<()> {
    if i < 1 || j > n || i > j {
        return Err(Error::IndexOutOfRange(format!(
            "segment [{i}, {j}] on length {n}"
        )));
    }
    Ok(())
}

pub(crate) const FACTORIALS: [u64; 21] = {
    let mut f = [1u64; 21];
    let mut i = 1;
    while i < 21 {
        f[i] = f[i - 1] * i as u64;
        i += 1;
    }
    f
};

pub fn factorial(n: usize) -> u64 {
    FACTORIALS[n]
}

pub(crate) fn lehmer_rank(entries: &[u8]) -> u64 {
    let n = entries.len();
    let mut unused: u64 = if n == 64 { !0 } else { (1u64 << n) - 1 };
    let mut rank = 0u64;
    for (p, &v) in entries.iter().enumerate() {
        let bit = v as u32 - 1;
        let smaller = (unused & ((1u64 << bit) - 1)).count_ones() as u64;
        rank += smaller * FACTORIALS[n - 1 - p];
        unused &= !(1u64 << bit);
    }
    rank
}

pub(crate) fn lehmer_unrank(n: usize, mut rank: u64, out: &mut [u8]) {
    let mut unused: u64 = if n == 64 { !0 } else { (1u64 << n) - 1 };
    for p in 0..n {
        let f = FACTORIALS[n - 1 - p];
        let mut d = rank / f;
        rank %= f;
        let mut bits = unused;
        while d > 0 {
            bits &= bits - 1;
            d -= 1;
        }
        let bit = bits.trailing_zeros();
        out[p] = bit as u8 + 1;
        unused &= !(1u64 << bit);
    }
}

impl Ord for Permutation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.entries.cmp(&other.entries))
    }
}

impl PartialOrd for Permutation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Accepts space-separated integers, or a compact digit string when every value is a single digit.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let values: Vec<u64> = if s.contains(char::is_whitespace) {
            s.split_whitespace()
                .map(|t| {
                    t.parse::<u64>()
                        .map_err(|_| Error::Parse(format!("bad permutation token {t:?}")))
                })
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(u64::from)
                        .ok_or_else(|| Error::Parse(format!("bad permutation digit {c:?}")))
                })
                .collect::<Result<_>>()?
        };
        if !s.contains(char::is_whitespace) && values.len() > 9 {
            return Err(Error::Parse(
                "compact digit strings are only accepted for n <= 9".into(),
            ));
        }
        let entries = values
            .into_iter()
            .map(|v| u8::try_from(v).map_err(|_| Error::Parse(format!("value {v} too large"))))
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(entries).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl From<Permutation> for String {
    fn from(p: Permutation) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for Permutation {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// True iff `sigma` is a pattern of `tau`. The empty permutation is a pattern of everything.
pub fn contains_pattern(sigma: &Permutation, tau: &Permutation) -> bool {
    let k = sigma.len();
    if k > tau.len() {
        return false;
    }
    if k == 0 {
        return true;
    }
    let mut chosen = Vec::with_capacity(k);
    embed(sigma.as_slice(), tau.as_slice(), &mut chosen, 0, |_, _| {
        true
    })
}

/// Backtracking search for an order-isomorphic embedding of `pattern` into `text`.
/// `compatible(j, t)` adds a per-element constraint (pattern index, text index).
pub(crate) fn embed<F>(
    pattern: &[u8],
    text: &[u8],
    chosen: &mut Vec<usize>,
    start: usize,
    compatible: F,
) -> bool
where
    F: Fn(usize, usize) -> bool + Copy,
{
    let j = chosen.len();
    let k = pattern.len();
    if j == k {
        return true;
    }
    let last_start = text.len() - (k - j);
    for t in start..=last_start {
        if !compatible(j, t) {
            continue;
        }
        let ok = chosen
            .iter()
            .enumerate()
            .all(|(l, &c)| (pattern[l] < pattern[j]) == (text[c] < text[t]));
        if !ok {
            continue;
        }
        chosen.push(t);
        if embed(pattern, text, chosen, t + 1, compatible) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// True iff `p` contains no element of `basis`.
pub fn avoids_all<'a, I>(basis: I, p: &Permutation) -> bool
where
    I: IntoIterator<Item = &'a Permutation>,
{
    basis.into_iter().all(|b| !contains_pattern(b, p))
}

/// Elements of `set` that contain no other element of `set` as a proper pattern.
pub fn minimal_elements<'a, I>(set: I) -> BTreeSet<Permutation>
where
    I: IntoIterator<Item = &'a Permutation>,
{
    let sorted: BTreeSet<&Permutation> = set.into_iter().collect();
    let mut minimal: Vec<&Permutation> = Vec::new();
    // ascending length: a proper pattern is always strictly shorter
    for p in sorted {
        if !minimal
            .iter()
            .any(|m| m.len() < p.len() && contains_pattern(m, p))
        {
            minimal.push(p);
        }
    }
    minimal.into_iter().cloned().collect()
}

/// All permutations of length `n` in lexicographic order.
pub fn permutations(n: usize) -> Permutations {
    Permutations {
        next: Some((1..=n as u8).collect()),
    }
}

pub struct Permutations {
    next: Option<Vec<u8>>,
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_permutation(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation::from_vec_unchecked(current))
    }
}

pub(crate) fn next_permutation(a: &mut [u8]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn set(items: &[&str]) -> BTreeSet<Permutation> {
        items.iter().map(|s| p(s)).collect()
    }

    #[test]
    fn reversal_examples() {
        assert_eq!(p("2143").reversal(1, 4).unwrap(), p("3412"));
        assert_eq!(p("3412").reversal(1, 3).unwrap(), p("1432"));
        assert_eq!(p("3412").reversal(2, 2).unwrap(), p("3412"));
    }

    #[test]
    fn reversal_rejects_bad_segments() {
        let q = p("3412");
        assert!(matches!(q.reversal(0, 2), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(q.reversal(2, 5), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(q.reversal(3, 2), Err(Error::IndexOutOfRange(_))));
        assert!(q.prefix_reversal(0).is_err());
    }

    #[test]
    fn prefix_reversal_examples() {
        assert_eq!(p("132").prefix_reversal(3).unwrap(), p("231"));
        assert_eq!(p("132").prefix_reversal(1).unwrap(), p("132"));
        assert_eq!(p("4213").prefix_reversal(4).unwrap(), p("3124"));
    }

    #[test]
    fn compose_examples() {
        let q = p("31524");
        assert_eq!(Permutation::identity(5).compose(&q).unwrap(), q);
        assert!(q.compose(&q.inverse()).unwrap().is_identity());
        assert_eq!(p("21").compose(&p("21")).unwrap(), p("12"));
        assert!(matches!(
            p("21").compose(&p("123")),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn containment_examples() {
        assert!(contains_pattern(&p("231"), &p("3241")));
        assert!(contains_pattern(&p("3241"), &p("3241")));
        assert!(!contains_pattern(&p("2143"), &p("456123")));
        assert!(contains_pattern(&Permutation::default(), &p("21")));
        assert!(!contains_pattern(&p("12"), &p("1")));
    }

    #[test]
    fn avoidance_examples() {
        let basis = set(&["2143", "231", "312"]);
        assert!(avoids_all(&basis, &p("321")));
        assert!(!avoids_all(&basis, &p("231")));
        assert!(avoids_all(&BTreeSet::new(), &p("231")));
    }

    #[test]
    fn minimal_elements_examples() {
        assert_eq!(minimal_elements(&set(&["231", "3241"])), set(&["231"]));
        let anti = set(&["132", "231", "312"]);
        assert_eq!(minimal_elements(&anti), anti);
        assert!(minimal_elements(&BTreeSet::new()).is_empty());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(p("3 4 1 2"), p("3412"));
        assert_eq!(p("3412").to_string(), "3 4 1 2");
        assert_eq!(p("10 1 2 3 4 5 6 7 8 9").len(), 10);
        assert!("3 3 1".parse::<Permutation>().is_err());
        assert!("3x1".parse::<Permutation>().is_err());
        assert!("".parse::<Permutation>().unwrap().is_empty());
    }

    #[test]
    fn lehmer_round_trip_and_order() {
        for (r, q) in permutations(5).enumerate() {
            assert_eq!(q.rank(), r as u64);
            assert_eq!(Permutation::unrank(5, r as u64), q);
        }
        assert_eq!(permutations(0).count(), 1);
        assert_eq!(permutations(6).count(), 720);
    }

    #[test]
    fn patterns_of_length_enumerates_distinct_patterns() {
        let pats = p("3241").patterns_of_length(3);
        assert_eq!(pats, set(&["213", "231", "321"]));
        assert_eq!(p("123").patterns_of_length(0).len(), 1);
        assert!(p("12").patterns_of_length(3).is_empty());
    }

    #[test]
    fn reversal_is_an_involution() {
        for n in 0..=6 {
            for q in permutations(n) {
                for i in 1..=n {
                    for j in i..=n {
                        let r = q.reversal(i, j).unwrap();
                        assert_eq!(r.reversal(i, j).unwrap(), q);
                    }
                }
            }
        }
    }

    #[test]
    fn containment_is_a_partial_order() {
        let all: Vec<Permutation> = (0..=5).flat_map(permutations).collect();
        for a in &all {
            assert!(contains_pattern(a, a));
        }
        for a in &all {
            for b in &all {
                if a != b && contains_pattern(a, b) {
                    assert!(!contains_pattern(b, a));
                }
            }
        }
        let small: Vec<&Permutation> = all.iter().filter(|q| q.len() <= 4).collect();
        for a in &small {
            for b in &small {
                if !contains_pattern(a, b) {
                    continue;
                }
                for c in &all {
                    if contains_pattern(b, c) {
                        assert!(contains_pattern(a, c), "{a} < {b} < {c}");
                    }
                }
            }
        }
    }
}
