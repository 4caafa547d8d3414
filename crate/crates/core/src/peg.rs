//! Peg permutations: permutations whose entries carry a `+`, `-` or `•` decoration.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{check_segment, embed, permutations, Permutation};

/// Decoration of a single peg entry. Ordered `+ < - < •`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Decoration {
    Plus,
    Minus,
    Dot,
}

impl Decoration {
    pub const ALL: [Decoration; 3] = [Decoration::Plus, Decoration::Minus, Decoration::Dot];

    /// ASCII symbol used by the text format.
    pub fn symbol(self) -> char {
        match self {
            Decoration::Plus => '+',
            Decoration::Minus => '-',
            Decoration::Dot => '.',
        }
    }

    /// Swaps `+` and `-`; `•` is fixed.
    pub fn flipped(self) -> Self {
        match self {
            Decoration::Plus => Decoration::Minus,
            Decoration::Minus => Decoration::Plus,
            Decoration::Dot => Decoration::Dot,
        }
    }

    pub fn is_signed(self) -> bool {
        self != Decoration::Dot
    }

    fn from_symbol(c: char) -> Option<Self> {
        match c {
            '+' => Some(Decoration::Plus),
            '-' | '\u{2212}' => Some(Decoration::Minus),
            '.' | '\u{2022}' => Some(Decoration::Dot),
            _ => None,
        }
    }

    /// Radix digit used by table ranking: `+ = 0`, `- = 1`, `• = 2`.
    pub fn digit(self) -> u64 {
        self as u64
    }
}

/// Direction of a strip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StripDirection {
    Increasing,
    Decreasing,
    Singleton,
}

/// A maximal strip, as 1-based inclusive positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Strip {
    pub start: usize,
    pub end: usize,
    pub direction: StripDirection,
}

impl Strip {
    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A permutation with one decoration per entry.
///
/// Decorations travel with their entries: reversals move them and swap `+`/`-`.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct PegPermutation {
    base: Permutation,
    decorations: Vec<Decoration>,
}

impl PegPermutation {
    pub fn new(base: Permutation, decorations: Vec<Decoration>) -> Result<Self> {
        if base.len() != decorations.len() {
            return Err(Error::LengthMismatch {
                left: base.len(),
                right: decorations.len(),
            });
        }
        Ok(Self { base, decorations })
    }

    pub(crate) fn from_parts_unchecked(values: Vec<u8>, decorations: Vec<Decoration>) -> Self {
        debug_assert_eq!(values.len(), decorations.len());
        Self {
            base: Permutation::from_vec_unchecked(values),
            decorations,
        }
    }

    /// Every entry decorated the same way.
    pub fn uniform(base: Permutation, decoration: Decoration) -> Self {
        let decorations = vec![decoration; base.len()];
        Self { base, decorations }
    }

    /// Decorated subsequence at `positions` (0-based, increasing), rescaled.
    pub fn restrict(&self, positions: &[usize]) -> Self {
        let values: Vec<u8> = positions.iter().map(|&i| self.base.as_slice()[i]).collect();
        let decorations = positions.iter().map(|&i| self.decorations[i]).collect();
        Self {
            base: Permutation::standardize(&values),
            decorations,
        }
    }

    pub fn base(&self) -> &Permutation {
        &self.base
    }

    pub fn decorations(&self) -> &[Decoration] {
        &self.decorations
    }

    pub fn values(&self) -> &[u8] {
        self.base.as_slice()
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn has_dot(&self) -> bool {
        self.decorations.contains(&Decoration::Dot)
    }

    /// Underlying identity with no `-` decoration: the sorted states of both distances.
    pub fn is_identity_peg(&self) -> bool {
        self.base.is_identity() && !self.decorations.contains(&Decoration::Minus)
    }

    /// True iff positions `j` and `j + 1` (0-based) lie in a common strip.
    pub fn pair_in_strip(&self, j: usize) -> bool {
        let v = self.values();
        let (a, b) = (v[j], v[j + 1]);
        let (da, db) = (self.decorations[j], self.decorations[j + 1]);
        if b == a + 1 {
            da != Decoration::Minus && db != Decoration::Minus
        } else if a == b + 1 {
            da != Decoration::Plus && db != Decoration::Plus
        } else {
            false
        }
    }

    /// The maximal strips, left to right; they partition the positions.
    pub fn strips(&self) -> Vec<Strip> {
        let n = self.len();
        let mut out = Vec::new();
        let mut start = 0;
        while start < n {
            let mut end = start;
            while end + 1 < n && self.pair_in_strip(end) {
                end += 1;
            }
            let direction = if end == start {
                StripDirection::Singleton
            } else if self.values()[start + 1] > self.values()[start] {
                StripDirection::Increasing
            } else {
                StripDirection::Decreasing
            };
            out.push(Strip {
                start: start + 1,
                end: end + 1,
                direction,
            });
            start = end + 1;
        }
        out
    }

    /// Adjacent pairs not inside a common strip.
    pub fn breakpoints(&self) -> usize {
        (0..self.len().saturating_sub(1))
            .filter(|&j| !self.pair_in_strip(j))
            .count()
    }

    /// All strips have length 1.
    pub fn is_clean_compact(&self) -> bool {
        (0..self.len().saturating_sub(1)).all(|j| !self.pair_in_strip(j))
    }

    /// Every strip of length at least 2 consists of `•` entries only.
    pub fn is_compact(&self) -> bool {
        (0..self.len().saturating_sub(1)).all(|j| {
            !self.pair_in_strip(j)
                || (self.decorations[j] == Decoration::Dot
                    && self.decorations[j + 1] == Decoration::Dot)
        })
    }

    /// Reverses positions `i..=j` (1-based) and swaps `+`/`-` inside the segment.
    pub fn oriented_reversal(&self, i: usize, j: usize) -> Result<Self> {
        check_segment(i, j, self.len())?;
        let base = self.base.reversal(i, j)?;
        let mut decorations = self.decorations.clone();
        decorations[i - 1..j].reverse();
        for d in &mut decorations[i - 1..j] {
            *d = d.flipped();
        }
        Ok(Self { base, decorations })
    }

    pub fn oriented_prefix_reversal(&self, j: usize) -> Result<Self> {
        self.oriented_reversal(1, j)
    }

    /// True iff `pattern` occurs in `self` under the peg pattern order.
    pub fn contains(&self, pattern: &PegPermutation) -> bool {
        peg_pattern_contains(pattern, self)
    }

    /// The last entry is the maximum, decorated `+` or `•`.
    pub fn ends_with_max_up(&self) -> bool {
        match (self.values().last(), self.decorations.last()) {
            (Some(&v), Some(&d)) => v as usize == self.len() && d != Decoration::Minus,
            _ => true,
        }
    }

    /// The first entry is `1`, decorated `+` or `•`.
    pub fn starts_with_one_up(&self) -> bool {
        match (self.values().first(), self.decorations.first()) {
            (Some(&v), Some(&d)) => v == 1 && d != Decoration::Minus,
            _ => true,
        }
    }
}

impl Ord for PegPermutation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.base
            .cmp(&other.base)
            .then_with(|| self.decorations.cmp(&other.decorations))
    }
}

impl PartialOrd for PegPermutation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PegPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, d)) in self.values().iter().zip(&self.decorations).enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}{}", d.symbol())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PegPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Peg({self})")
    }
}

impl FromStr for PegPermutation {
    type Err = Error;

    /// Parses tokens like `3+ 4. 1- 5- 2+`; `•` and `−` are accepted as well.
    fn from_str(s: &str) -> Result<Self> {
        let mut values = Vec::new();
        let mut decorations = Vec::new();
        for token in s.split_whitespace() {
            let last = token
                .chars()
                .last()
                .ok_or_else(|| Error::Parse("empty peg token".into()))?;
            let d = Decoration::from_symbol(last)
                .ok_or_else(|| Error::Parse(format!("peg token {token:?} lacks a decoration")))?;
            let digits = &token[..token.len() - last.len_utf8()];
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Parse(format!("bad peg token {token:?}")));
            }
            let v: u8 = digits
                .parse()
                .map_err(|_| Error::Parse(format!("value in {token:?} too large")))?;
            values.push(v);
            decorations.push(d);
        }
        let base = Permutation::new(values).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(Self { base, decorations })
    }
}

impl From<PegPermutation> for String {
    fn from(p: PegPermutation) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for PegPermutation {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// The clean compact peg permutation obtained by collapsing each strip of `p`
/// to its minimum: `+` for increasing strips, `-` for decreasing, `•` for singletons.
pub fn peg_of(p: &Permutation) -> Result<PegPermutation> {
    if p.is_empty() {
        return Err(Error::InvalidArgument(
            "peg of the empty permutation".into(),
        ));
    }
    let v = p.as_slice();
    let mut mins = Vec::new();
    let mut decorations = Vec::new();
    let mut start = 0;
    while start < v.len() {
        let mut end = start;
        while end + 1 < v.len() && v[end].abs_diff(v[end + 1]) == 1 {
            end += 1;
        }
        let d = if end == start {
            Decoration::Dot
        } else if v[start + 1] > v[start] {
            Decoration::Plus
        } else {
            Decoration::Minus
        };
        mins.push(*v[start..=end].iter().min().unwrap());
        decorations.push(d);
        start = end + 1;
    }
    Ok(PegPermutation {
        base: Permutation::standardize(&mins),
        decorations,
    })
}

/// Peg pattern order: `sigma` embeds in `tau` with order-isomorphic bases, and every
/// signed entry of `sigma` lands on an entry of `tau` with the same sign. A `•` in
/// `sigma` matches any decoration.
pub fn peg_pattern_contains(sigma: &PegPermutation, tau: &PegPermutation) -> bool {
    let k = sigma.len();
    if k > tau.len() {
        return false;
    }
    if k == 0 {
        return true;
    }
    let sd = &sigma.decorations;
    let td = &tau.decorations;
    let compatible = |j: usize, t: usize| sd[j] == Decoration::Dot || sd[j] == td[t];
    let mut chosen = Vec::with_capacity(k);
    embed(sigma.values(), tau.values(), &mut chosen, 0, compatible)
}

/// Every proper peg pattern of `pp` (subsequence plus `±` to `•` weakening) that is clean compact.
pub fn clean_compact_proper_patterns(pp: &PegPermutation) -> BTreeSet<PegPermutation> {
    let mut out = BTreeSet::new();
    for q in all_peg_patterns(pp) {
        if q != *pp && q.is_clean_compact() {
            out.insert(q);
        }
    }
    out
}

/// Every peg pattern of `pp`, including `pp` itself and the empty pattern.
pub fn all_peg_patterns(pp: &PegPermutation) -> BTreeSet<PegPermutation> {
    let n = pp.len();
    let mut out = BTreeSet::new();
    for mask in 0u32..(1u32 << n) {
        let positions: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let sub = pp.restrict(&positions);
        let signed: Vec<usize> = (0..sub.len())
            .filter(|&i| sub.decorations[i].is_signed())
            .collect();
        for weak in 0u32..(1u32 << signed.len()) {
            let mut q = sub.clone();
            for (b, &i) in signed.iter().enumerate() {
                if weak >> b & 1 == 1 {
                    q.decorations[i] = Decoration::Dot;
                }
            }
            out.insert(q);
        }
    }
    out
}

/// The four exceptional families of the prefix-reversal peg basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExceptionalKind {
    ThetaEven,
    LambdaEven,
    ThetaOdd,
    LambdaOdd,
}

impl ExceptionalKind {
    pub const ALL: [ExceptionalKind; 4] = [
        ExceptionalKind::ThetaEven,
        ExceptionalKind::LambdaEven,
        ExceptionalKind::ThetaOdd,
        ExceptionalKind::LambdaOdd,
    ];

    /// The two kinds defined at length `n`.
    pub fn for_length(n: usize) -> [ExceptionalKind; 2] {
        if n.is_multiple_of(2) {
            [ExceptionalKind::ThetaEven, ExceptionalKind::LambdaEven]
        } else {
            [ExceptionalKind::ThetaOdd, ExceptionalKind::LambdaOdd]
        }
    }

    pub fn is_even(self) -> bool {
        matches!(
            self,
            ExceptionalKind::ThetaEven | ExceptionalKind::LambdaEven
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            ExceptionalKind::ThetaEven => "theta-even",
            ExceptionalKind::LambdaEven => "lambda-even",
            ExceptionalKind::ThetaOdd => "theta-odd",
            ExceptionalKind::LambdaOdd => "lambda-odd",
        }
    }
}

/// Builds the exceptional peg permutation of the given kind and length.
pub fn exceptional(kind: ExceptionalKind, n: usize) -> Result<PegPermutation> {
    let even = n.is_multiple_of(2);
    if kind.is_even() != even {
        return Err(Error::InvalidArgument(format!(
            "{} requires {} length, got {n}",
            kind.name(),
            if kind.is_even() { "even" } else { "odd" }
        )));
    }
    if !(2..=crate::perm::MAX_LEN).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "{} undefined for n = {n}",
            kind.name()
        )));
    }
    let n8 = n as u8;
    let (values, lead): (Vec<u8>, (u8, Decoration)) = match kind {
        // n (n-2) ... 2 | 1 | 3 ... (n-1), with 1 signed
        ExceptionalKind::ThetaEven | ExceptionalKind::ThetaOdd => {
            let mut v: Vec<u8> = (1..=n8)
                .rev()
                .filter(|x| x % 2 == n8 % 2 && *x != 1)
                .collect();
            v.push(1);
            v.extend((2..n8).filter(|x| x % 2 != n8 % 2 && *x != 1));
            let d = if even {
                Decoration::Plus
            } else {
                Decoration::Minus
            };
            (v, (1, d))
        }
        // interleave around t: t+1, t, t+2, t-1, ... n, 1
        ExceptionalKind::LambdaEven => {
            let t = n8 / 2;
            let mut v = Vec::with_capacity(n);
            for s in 0..t {
                v.push(t + 1 + s);
                v.push(t - s);
            }
            (v, (t + 1, Decoration::Plus))
        }
        // t, t+1, t-1, t+2, ... n, 1
        ExceptionalKind::LambdaOdd => {
            let t = n8.div_ceil(2);
            let mut v = vec![t];
            for s in 1..t {
                v.push(t + s);
                v.push(t - s);
            }
            (v, (t, Decoration::Minus))
        }
    };
    let decorations = values
        .iter()
        .map(|&x| if x == lead.0 { lead.1 } else { Decoration::Dot })
        .collect();
    Ok(PegPermutation {
        base: Permutation::from_vec_unchecked(values),
        decorations,
    })
}

/// Inflates `•` entries by one and signed entries by two.
pub fn min_inflation(pp: &PegPermutation) -> Permutation {
    let sizes: Vec<usize> = pp
        .decorations
        .iter()
        .map(|d| if d.is_signed() { 2 } else { 1 })
        .collect();
    crate::inflation::inflate_sizes(pp, &sizes)
}

/// Every clean compact peg permutation of length `n`, ordered by base then decorations.
pub fn enumerate_clean_compact(n: usize) -> impl Iterator<Item = PegPermutation> {
    permutations(n).flat_map(|base| {
        let mut found = Vec::new();
        let mut decs = Vec::with_capacity(base.len());
        clean_decorations(base.as_slice(), &mut decs, &mut found);
        found.into_iter().map(move |decorations| PegPermutation {
            base: base.clone(),
            decorations,
        })
    })
}

fn clean_decorations(values: &[u8], decs: &mut Vec<Decoration>, out: &mut Vec<Vec<Decoration>>) {
    let j = decs.len();
    if j == values.len() {
        out.push(decs.clone());
        return;
    }
    for d in Decoration::ALL {
        if j > 0 {
            let (a, b, da) = (values[j - 1], values[j], decs[j - 1]);
            let joins = (b == a + 1 && da != Decoration::Minus && d != Decoration::Minus)
                || (a == b + 1 && da != Decoration::Plus && d != Decoration::Plus);
            if joins {
                continue;
            }
        }
        decs.push(d);
        clean_decorations(values, decs, out);
        decs.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pg(s: &str) -> PegPermutation {
        s.parse().unwrap()
    }

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_render() {
        let q = pg("3+ 4. 1- 5- 2+");
        assert_eq!(q.to_string(), "3+ 4. 1- 5- 2+");
        assert_eq!(pg("2+ 3\u{2022} 1\u{2212}"), pg("2+ 3. 1-"));
        assert!("3+ 3-".parse::<PegPermutation>().is_err());
        assert!("3 1+".parse::<PegPermutation>().is_err());
        assert!("+".parse::<PegPermutation>().is_err());
        assert!("".parse::<PegPermutation>().unwrap().is_empty());
    }

    #[test]
    fn strips_examples() {
        use StripDirection::*;
        let s = pg("3+ 4. 1- 5- 2+").strips();
        let got: Vec<_> = s.iter().map(|x| (x.start, x.end, x.direction)).collect();
        assert_eq!(
            got,
            vec![
                (1, 2, Increasing),
                (3, 3, Singleton),
                (4, 4, Singleton),
                (5, 5, Singleton)
            ]
        );
        let id = PegPermutation::uniform(Permutation::identity(6), Decoration::Plus);
        let s = id.strips();
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].start, s[0].end, s[0].direction), (1, 6, Increasing));
        let s = pg("3. 2. 1.").strips();
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].start, s[0].end, s[0].direction), (1, 3, Decreasing));
    }

    #[test]
    fn compactness_flags() {
        assert!(pg("2+ 5- 4+ 1. 3-").is_clean_compact());
        let q = pg("3. 4. 1- 5- 2+");
        assert!(q.is_compact());
        assert!(!q.is_clean_compact());
        assert!(!pg("3+ 4. 1- 5- 2+").is_compact());
        assert!(pg("1.").is_clean_compact() && pg("1.").is_compact());
    }

    #[test]
    fn peg_of_examples() {
        assert_eq!(peg_of(&p("32451678")).unwrap(), pg("2- 3+ 1. 4+"));
        assert_eq!(peg_of(&p("123")).unwrap(), pg("1+"));
        assert_eq!(peg_of(&p("3412")).unwrap(), pg("2+ 1+"));
        assert!(peg_of(&Permutation::default()).is_err());
    }

    #[test]
    fn oriented_reversal_examples() {
        let q = pg("3+ 1+ 2- 5. 4+");
        assert_eq!(q.oriented_reversal(2, 4).unwrap(), pg("3+ 5. 2+ 1- 4+"));
        assert_eq!(pg("1+ 2+").oriented_reversal(1, 2).unwrap(), pg("2- 1-"));
        assert_eq!(q.oriented_reversal(1, 1).unwrap(), pg("3- 1+ 2- 5. 4+"));
        assert_eq!(q.oriented_reversal(4, 4).unwrap(), q);
        assert!(q.oriented_reversal(2, 6).is_err());
        assert_eq!(q.oriented_prefix_reversal(2).unwrap(), pg("1- 3- 2- 5. 4+"));
    }

    #[test]
    fn peg_pattern_examples() {
        assert!(peg_pattern_contains(&pg("1+ 2. 3+"), &pg("1+ 2- 3+")));
        assert!(!peg_pattern_contains(&pg("1+ 2- 3+"), &pg("1+ 2. 3+")));
        let q = pg("2+ 5- 4+ 1. 3-");
        assert!(peg_pattern_contains(&q, &q));
        assert!(peg_pattern_contains(&pg("1-"), &pg("1+ 2-")));
        assert!(!peg_pattern_contains(&pg("1-"), &pg("1+ 2.")));
    }

    #[test]
    fn clean_compact_patterns_examples() {
        let got = clean_compact_proper_patterns(&pg("2+ 1."));
        let expect: BTreeSet<_> = ["", "1+", "1."].iter().map(|s| pg(s)).collect();
        assert_eq!(got, expect);
        let got = clean_compact_proper_patterns(&pg("1."));
        assert_eq!(got, [PegPermutation::default()].into_iter().collect());
        let got = clean_compact_proper_patterns(&pg("1- 2-"));
        assert!(got.contains(&pg("1-")) && got.contains(&pg("1.")));
        assert!(!got.contains(&pg("1- 2-")));
    }

    #[test]
    fn exceptional_examples() {
        use ExceptionalKind::*;
        assert_eq!(exceptional(ThetaOdd, 3).unwrap(), pg("3. 1- 2."));
        assert_eq!(exceptional(LambdaOdd, 3).unwrap(), pg("2- 3. 1."));
        assert_eq!(exceptional(ThetaEven, 2).unwrap(), pg("2. 1+"));
        assert_eq!(exceptional(LambdaEven, 2).unwrap(), pg("2+ 1."));
        assert_eq!(exceptional(ThetaOdd, 5).unwrap(), pg("5. 3. 1- 2. 4."));
        assert_eq!(exceptional(LambdaOdd, 5).unwrap(), pg("3- 4. 2. 5. 1."));
        assert_eq!(exceptional(ThetaEven, 6).unwrap(), pg("6. 4. 2. 1+ 3. 5."));
        assert_eq!(exceptional(LambdaEven, 6).unwrap(), pg("4+ 3. 5. 2. 6. 1."));
        assert!(exceptional(ThetaEven, 3).is_err());
        assert!(exceptional(LambdaOdd, 4).is_err());
        assert!(exceptional(ThetaOdd, 1).is_err());
        assert!(exceptional(LambdaEven, 0).is_err());
    }

    #[test]
    fn exceptional_shape() {
        for n in 2..=9 {
            for kind in ExceptionalKind::for_length(n) {
                let e = exceptional(kind, n).unwrap();
                assert_eq!(e.len(), n);
                assert!(e.is_clean_compact(), "{e}");
                assert_ne!(e.values()[n - 1] as usize, n, "{e} ends with its maximum");
            }
        }
    }

    #[test]
    fn min_inflation_examples() {
        assert_eq!(min_inflation(&pg("3. 1- 2.")), p("4213"));
        assert_eq!(min_inflation(&pg("2- 3. 1.")), p("3241"));
        assert_eq!(min_inflation(&pg("1.")), p("1"));
        assert_eq!(min_inflation(&pg("2+ 1+")), p("3412"));
    }

    #[test]
    fn clean_compact_enumeration() {
        let one: Vec<_> = enumerate_clean_compact(1).collect();
        assert_eq!(one, vec![pg("1+"), pg("1-"), pg("1.")]);
        let zero: Vec<_> = enumerate_clean_compact(0).collect();
        assert_eq!(zero, vec![PegPermutation::default()]);
        // brute force filter over all 2 * 9 decorated candidates
        let mut brute = 0;
        for base in permutations(2) {
            for a in Decoration::ALL {
                for b in Decoration::ALL {
                    let q = PegPermutation::new(base.clone(), vec![a, b]).unwrap();
                    if q.is_clean_compact() {
                        brute += 1;
                    }
                }
            }
        }
        assert_eq!(brute, 10);
        assert_eq!(enumerate_clean_compact(2).count(), 10);
        for n in 0..=4 {
            let listed: Vec<_> = enumerate_clean_compact(n).collect();
            assert!(listed.windows(2).all(|w| w[0] < w[1]));
            assert!(listed.iter().all(|q| q.is_clean_compact()));
            let mut brute = 0;
            for base in permutations(n) {
                for code in 0..3u32.pow(n as u32) {
                    let decs = (0..n)
                        .map(|i| Decoration::ALL[(code / 3u32.pow(i as u32) % 3) as usize])
                        .collect();
                    if PegPermutation::new(base.clone(), decs)
                        .unwrap()
                        .is_clean_compact()
                    {
                        brute += 1;
                    }
                }
            }
            assert_eq!(listed.len(), brute);
        }
    }

    #[test]
    fn peg_of_inverts_min_inflation() {
        for n in 1..=5 {
            for q in enumerate_clean_compact(n) {
                assert_eq!(peg_of(&min_inflation(&q)).unwrap(), q);
            }
        }
    }

    #[test]
    fn oriented_reversal_is_an_involution() {
        for q in enumerate_clean_compact(4) {
            for i in 1..=4 {
                for j in i..=4 {
                    let r = q.oriented_reversal(i, j).unwrap();
                    assert_eq!(r.oriented_reversal(i, j).unwrap(), q);
                }
            }
        }
    }

    #[test]
    fn clean_compact_pattern_one_shorter_except_two_all_dot_cases() {
        // no all-dot permutation of length 3 is clean compact, so these have none
        let expected: Vec<PegPermutation> = vec![pg("2. 4. 1. 3."), pg("3. 1. 4. 2.")];
        let mut failures = Vec::new();
        for n in 2..=6 {
            for q in enumerate_clean_compact(n) {
                let found = (0..n).any(|skip| {
                    let keep: Vec<usize> = (0..n).filter(|&i| i != skip).collect();
                    q.restrict(&keep).is_clean_compact()
                });
                if !found {
                    failures.push(q);
                }
            }
        }
        assert_eq!(failures, expected);
    }

    #[test]
    fn peg_order_is_a_partial_order_on_clean_compact() {
        let all: Vec<PegPermutation> = (0..=4).flat_map(enumerate_clean_compact).collect();
        let small: Vec<&PegPermutation> = all.iter().filter(|q| q.len() <= 3).collect();
        for a in &all {
            assert!(peg_pattern_contains(a, a));
        }
        for a in &small {
            for b in &all {
                if *a != b && peg_pattern_contains(a, b) {
                    assert!(!peg_pattern_contains(b, a), "{a} {b}");
                }
            }
        }
        for a in &small {
            for b in &small {
                if !peg_pattern_contains(a, b) {
                    continue;
                }
                for c in &all {
                    if peg_pattern_contains(b, c) {
                        assert!(peg_pattern_contains(a, c), "{a} < {b} < {c}");
                    }
                }
            }
        }
    }
}
