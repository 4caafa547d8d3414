//! Exact reversal and prefix-reversal distances.
//!
//! Distances are computed by breadth-first search from the identity over "signed
//! states": a base permutation plus a sign for every entry that is not decorated `•`.
//! Because `•` decorations are untouched by oriented reversals, the state space splits
//! by the set of values carrying `•`; each part gets its own table. Standard
//! permutations are the part in which every value carries `•`.
//!
//! Single queries longer than the table limits fall back to iterative-deepening A*
//! with the breakpoint bound, under a node budget.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::peg::{Decoration, PegPermutation};
use crate::perm::{factorial, lehmer_rank, lehmer_unrank, Permutation, MAX_LEN};

const UNSEEN: u8 = u8::MAX;

/// Hard ceilings on table lengths; configured limits may not exceed these.
pub const HARD_STANDARD_LIMIT: usize = 11;
pub const HARD_PEG_LIMIT: usize = 8;

/// Rearrangement model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Reversal of any segment.
    Rd,
    /// Reversal of a prefix (pancake flips).
    Prd,
}

impl Model {
    pub const ALL: [Model; 2] = [Model::Rd, Model::Prd];

    pub fn name(self) -> &'static str {
        match self {
            Model::Rd => "rd",
            Model::Prd => "prd",
        }
    }

    /// Segments (0-based, inclusive) of the allowed operations on length `n`.
    /// Length-one segments only matter when some entry carries a sign.
    fn segments(self, n: usize, signed: bool) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        match self {
            Model::Rd => {
                for i in 0..n {
                    for j in i..n {
                        if i < j || signed {
                            out.push((i, j));
                        }
                    }
                }
            }
            Model::Prd => {
                for j in 0..n {
                    if j > 0 || signed {
                        out.push((0, j));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rd" => Ok(Model::Rd),
            "prd" => Ok(Model::Prd),
            _ => Err(Error::Parse(format!(
                "unknown model {s:?} (expected rd or prd)"
            ))),
        }
    }
}

/// What a [`DistanceTable`] indexes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Standard,
    Peg,
}

impl TableKind {
    pub fn name(self) -> &'static str {
        match self {
            TableKind::Standard => "standard",
            TableKind::Peg => "peg",
        }
    }
}

impl FromStr for TableKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(TableKind::Standard),
            "peg" => Ok(TableKind::Peg),
            _ => Err(Error::Parse(format!("unknown table kind {s:?}"))),
        }
    }
}

/// Length limits for table construction and the node budget for searches past them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub standard: usize,
    pub peg: usize,
    pub search_nodes: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            standard: 9,
            peg: 7,
            search_nodes: 200_000_000,
        }
    }
}

impl Limits {
    pub fn validate(&self) -> Result<()> {
        if self.standard > HARD_STANDARD_LIMIT {
            return Err(Error::LimitExceeded {
                what: "standard table length limit",
                requested: self.standard,
                limit: HARD_STANDARD_LIMIT,
            });
        }
        if self.peg > HARD_PEG_LIMIT {
            return Err(Error::LimitExceeded {
                what: "peg table length limit",
                requested: self.peg,
                limit: HARD_PEG_LIMIT,
            });
        }
        Ok(())
    }
}

/// A base permutation with sign bits for its signed values (bit `v - 1` set means `-`).
#[derive(Clone, Copy)]
struct SignedState {
    n: usize,
    vals: [u8; MAX_LEN],
    signs: u64,
}

impl SignedState {
    fn from_peg(pp: &PegPermutation) -> (Self, u64) {
        let mut vals = [0u8; MAX_LEN];
        let mut signs = 0u64;
        let mut dots = 0u64;
        for (i, (&v, d)) in pp.values().iter().zip(pp.decorations()).enumerate() {
            vals[i] = v;
            match d {
                Decoration::Minus => signs |= 1 << (v - 1),
                Decoration::Dot => dots |= 1 << (v - 1),
                Decoration::Plus => {}
            }
        }
        (
            Self {
                n: pp.len(),
                vals,
                signs,
            },
            dots,
        )
    }

    fn apply(&mut self, (i, j): (usize, usize), free: u64) {
        self.vals[i..=j].reverse();
        for &v in &self.vals[i..=j] {
            self.signs ^= (1u64 << (v - 1)) & free;
        }
    }

    fn is_goal(&self) -> bool {
        self.signs == 0
            && self.vals[..self.n]
                .iter()
                .enumerate()
                .all(|(i, &v)| v as usize == i + 1)
    }

    /// Decoration of value `v` (0 and n+1 act as `+` sentinels).
    fn dec(&self, v: u8, free: u64) -> Decoration {
        if v == 0 || v as usize > self.n {
            Decoration::Plus
        } else if free >> (v - 1) & 1 == 0 {
            Decoration::Dot
        } else if self.signs >> (v - 1) & 1 == 1 {
            Decoration::Minus
        } else {
            Decoration::Plus
        }
    }

    fn adjacent(&self, a: u8, b: u8, free: u64) -> bool {
        let (da, db) = (self.dec(a, free), self.dec(b, free));
        if b == a + 1 {
            da != Decoration::Minus && db != Decoration::Minus
        } else if a == b + 1 {
            da != Decoration::Plus && db != Decoration::Plus
        } else {
            false
        }
    }

    /// Admissible lower bound used by the search: breakpoints against sentinels.
    fn heuristic(&self, model: Model, free: u64) -> u32 {
        let n = self.n;
        let mut bp = 0u32;
        for p in 0..n.saturating_sub(1) {
            if !self.adjacent(self.vals[p], self.vals[p + 1], free) {
                bp += 1;
            }
        }
        let right = if n == 0 {
            true
        } else {
            self.adjacent(self.vals[n - 1], n as u8 + 1, free)
        };
        if !right {
            bp += 1;
        }
        match model {
            Model::Prd => {
                // a lone signed entry still needs a flip
                if n > 0 && bp == 0 && self.signs != 0 {
                    1
                } else {
                    bp
                }
            }
            Model::Rd => {
                if n > 0 && !self.adjacent(0, self.vals[0], free) {
                    bp += 1;
                }
                bp.div_ceil(2)
            }
        }
    }
}

/// BFS table for one (model, length, dot set) part of the state space.
pub(crate) struct MaskTable {
    n: usize,
    free: u64,
    free_values: Vec<u8>,
    dist: Vec<u8>,
}

impl MaskTable {
    fn signed_count(&self) -> usize {
        self.free_values.len()
    }

    fn rank(&self, st: &SignedState) -> usize {
        let m = self.signed_count();
        let mut s = 0usize;
        for (b, &v) in self.free_values.iter().enumerate() {
            if st.signs >> (v - 1) & 1 == 1 {
                s |= 1 << b;
            }
        }
        ((lehmer_rank(&st.vals[..self.n]) as usize) << m) | s
    }

    fn unrank(&self, r: usize) -> SignedState {
        let m = self.signed_count();
        let mut vals = [0u8; MAX_LEN];
        lehmer_unrank(self.n, (r >> m) as u64, &mut vals[..self.n]);
        let mut signs = 0u64;
        for (b, &v) in self.free_values.iter().enumerate() {
            if r >> b & 1 == 1 {
                signs |= 1 << (v - 1);
            }
        }
        SignedState {
            n: self.n,
            vals,
            signs,
        }
    }

    fn build(model: Model, n: usize, dots: u64) -> Self {
        let all = if n == 0 { 0 } else { (1u64 << n) - 1 };
        let free = all & !dots;
        let free_values: Vec<u8> = (1..=n as u8).filter(|v| free >> (v - 1) & 1 == 1).collect();
        let m = free_values.len();
        let size = (factorial(n) as usize) << m;
        let mut table = Self {
            n,
            free,
            free_values,
            dist: vec![UNSEEN; size],
        };
        let segments = model.segments(n, m > 0);
        table.dist[0] = 0;
        let mut frontier: Vec<u32> = vec![0];
        let mut level = 0u8;
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for block in frontier.chunks(1 << 16) {
                let found: Vec<Vec<u32>> = {
                    let t = &table;
                    block
                        .par_chunks(1024)
                        .map(|chunk| {
                            let mut out = Vec::new();
                            for &r in chunk {
                                let st = t.unrank(r as usize);
                                for &seg in &segments {
                                    let mut nb = st;
                                    nb.apply(seg, t.free);
                                    let nr = t.rank(&nb);
                                    if t.dist[nr] == UNSEEN {
                                        out.push(nr as u32);
                                    }
                                }
                            }
                            out
                        })
                        .collect()
                };
                for nr in found.into_iter().flatten() {
                    if table.dist[nr as usize] == UNSEEN {
                        table.dist[nr as usize] = level + 1;
                        next.push(nr);
                    }
                }
            }
            frontier = next;
            level += 1;
        }
        table
    }

    fn lookup(&self, st: &SignedState) -> u8 {
        self.dist[self.rank(st)]
    }
}

/// A complete distance table for one model, length and kind, indexed by canonical rank.
///
/// Standard tables are indexed by the Lehmer rank of the permutation. Peg tables use
/// `lehmer(base) * 3^n + decoration code`, where the decoration code reads the
/// decorations left to right as base-3 digits (`+ = 0`, `- = 1`, `• = 2`).
#[derive(Clone, PartialEq, Eq)]
pub struct DistanceTable {
    model: Model,
    n: usize,
    kind: TableKind,
    distances: Vec<u8>,
}

impl fmt::Debug for DistanceTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DistanceTable")
            .field("model", &self.model)
            .field("n", &self.n)
            .field("kind", &self.kind)
            .field("entries", &self.distances.len())
            .finish()
    }
}

fn pow3(n: usize) -> usize {
    3usize.pow(n as u32)
}

fn decoration_code(decs: &[Decoration]) -> usize {
    decs.iter().fold(0, |acc, d| acc * 3 + d.digit() as usize)
}

impl DistanceTable {
    pub fn model(&self) -> Model {
        self.model
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.distances
    }

    /// Distance recorded at a canonical rank.
    pub fn get(&self, rank: usize) -> Option<u8> {
        self.distances.get(rank).copied().filter(|&d| d != UNSEEN)
    }

    pub fn standard_rank(p: &Permutation) -> usize {
        p.rank() as usize
    }

    pub fn peg_rank(pp: &PegPermutation) -> usize {
        pp.base().rank() as usize * pow3(pp.len()) + decoration_code(pp.decorations())
    }

    pub fn distance_of(&self, p: &Permutation) -> Option<u8> {
        if self.kind != TableKind::Standard || p.len() != self.n {
            return None;
        }
        self.get(Self::standard_rank(p))
    }

    pub fn distance_of_peg(&self, pp: &PegPermutation) -> Option<u8> {
        if self.kind != TableKind::Peg || pp.len() != self.n {
            return None;
        }
        self.get(Self::peg_rank(pp))
    }

    pub fn max_distance(&self) -> u8 {
        self.distances
            .iter()
            .copied()
            .filter(|&d| d != UNSEEN)
            .max()
            .unwrap_or(0)
    }

    /// Number of states at each distance.
    pub fn histogram(&self) -> Vec<u64> {
        let mut h = vec![0u64; self.max_distance() as usize + 1];
        for &d in &self.distances {
            if d != UNSEEN {
                h[d as usize] += 1;
            }
        }
        h
    }

    pub fn file_name(model: Model, kind: TableKind, n: usize) -> String {
        format!("{}-{}-{}.dist", model.name(), kind.name(), n)
    }

    fn header(&self) -> String {
        format!(
            "PEGBALL-DIST v1 {} {} {}\n",
            self.model.name(),
            self.kind.name(),
            self.n
        )
    }

    /// Writes the table into `dir` via a temporary file and an atomic rename.
    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        let io = |e: std::io::Error| Error::Cache(e.to_string());
        fs::create_dir_all(dir).map_err(io)?;
        let path = dir.join(Self::file_name(self.model, self.kind, self.n));
        let tmp = dir.join(format!(
            ".{}.{}.tmp",
            Self::file_name(self.model, self.kind, self.n),
            std::process::id()
        ));
        {
            let mut f = fs::File::create(&tmp).map_err(io)?;
            f.write_all(self.header().as_bytes()).map_err(io)?;
            f.write_all(&self.distances).map_err(io)?;
            f.sync_all().map_err(io)?;
        }
        fs::rename(&tmp, &path).map_err(io)?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
        Self::from_bytes(&bytes)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let nl = bytes
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::Cache("missing header line".into()))?;
        let header = std::str::from_utf8(&bytes[..nl])
            .map_err(|_| Error::Cache("header is not UTF-8".into()))?;
        let fields: Vec<&str> = header.split(' ').collect();
        if fields.len() != 5 || fields[0] != "PEGBALL-DIST" || fields[1] != "v1" {
            return Err(Error::Cache(format!("bad header {header:?}")));
        }
        let model: Model = fields[2]
            .parse()
            .map_err(|_| Error::Cache(format!("bad model in {header:?}")))?;
        let kind: TableKind = fields[3]
            .parse()
            .map_err(|_| Error::Cache(format!("bad kind in {header:?}")))?;
        let n: usize = fields[4]
            .parse()
            .map_err(|_| Error::Cache(format!("bad length in {header:?}")))?;
        if n > 20 {
            return Err(Error::Cache(format!("length {n} too large")));
        }
        let expected = match kind {
            TableKind::Standard => factorial(n) as usize,
            TableKind::Peg => factorial(n) as usize * pow3(n),
        };
        let body = &bytes[nl + 1..];
        if body.len() != expected {
            return Err(Error::Cache(format!(
                "expected {expected} distance bytes, found {}",
                body.len()
            )));
        }
        Ok(Self {
            model,
            n,
            kind,
            distances: body.to_vec(),
        })
    }
}

type MaskKey = (Model, usize, u64);

/// Memoizing distance oracle. Tables are built on first use and shared read-only.
pub struct Oracle {
    limits: Limits,
    cache_dir: Option<PathBuf>,
    masks: RwLock<HashMap<MaskKey, Arc<MaskTable>>>,
    full_peg: RwLock<HashMap<(Model, usize), Arc<DistanceTable>>>,
}

impl Default for Oracle {
    fn default() -> Self {
        Self::new(Limits::default())
    }
}

impl fmt::Debug for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Oracle")
            .field("limits", &self.limits)
            .field("cache_dir", &self.cache_dir)
            .finish_non_exhaustive()
    }
}

impl Oracle {
    /// Panics if `limits` exceed the hard ceilings; use [`Oracle::with_limits`] to get an error.
    pub fn new(limits: Limits) -> Self {
        Self::with_limits(limits).expect("limits within hard ceilings")
    }

    pub fn with_limits(limits: Limits) -> Result<Self> {
        limits.validate()?;
        Ok(Self {
            limits,
            cache_dir: None,
            masks: RwLock::new(HashMap::new()),
            full_peg: RwLock::new(HashMap::new()),
        })
    }

    pub fn with_cache_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.cache_dir = Some(dir.into());
        self
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    pub fn cache_dir(&self) -> Option<&Path> {
        self.cache_dir.as_deref()
    }

    fn mask_table(&self, model: Model, n: usize, dots: u64) -> Result<Arc<MaskTable>> {
        let key = (model, n, dots);
        if let Some(t) = self.masks.read().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let all = if n == 0 { 0 } else { (1u64 << n) - 1 };
        let table = if dots == all {
            self.load_standard(model, n)?
        } else {
            MaskTable::build(model, n, dots)
        };
        let table = Arc::new(table);
        let mut w = self.masks.write().unwrap();
        Ok(w.entry(key).or_insert(table).clone())
    }

    fn load_standard(&self, model: Model, n: usize) -> Result<MaskTable> {
        let all = if n == 0 { 0 } else { (1u64 << n) - 1 };
        if let Some(dir) = &self.cache_dir {
            let path = dir.join(DistanceTable::file_name(model, TableKind::Standard, n));
            if path.exists() {
                let t = DistanceTable::load(&path)?;
                if t.model != model || t.n != n || t.kind != TableKind::Standard {
                    return Err(Error::Cache(format!(
                        "{} has a mismatched header",
                        path.display()
                    )));
                }
                return Ok(MaskTable {
                    n,
                    free: 0,
                    free_values: Vec::new(),
                    dist: t.distances,
                });
            }
        }
        let table = MaskTable::build(model, n, all);
        if let Some(dir) = &self.cache_dir {
            DistanceTable {
                model,
                n,
                kind: TableKind::Standard,
                distances: table.dist.clone(),
            }
            .save(dir)?;
        }
        Ok(table)
    }

    fn cached_full_peg(&self, model: Model, n: usize) -> Result<Option<Arc<DistanceTable>>> {
        if let Some(t) = self.full_peg.read().unwrap().get(&(model, n)) {
            return Ok(Some(t.clone()));
        }
        let Some(dir) = &self.cache_dir else {
            return Ok(None);
        };
        let path = dir.join(DistanceTable::file_name(model, TableKind::Peg, n));
        if !path.exists() {
            return Ok(None);
        }
        let t = Arc::new(DistanceTable::load(&path)?);
        if t.model != model || t.n != n || t.kind != TableKind::Peg {
            return Err(Error::Cache(format!(
                "{} has a mismatched header",
                path.display()
            )));
        }
        self.full_peg.write().unwrap().insert((model, n), t.clone());
        Ok(Some(t))
    }

    fn check_standard(&self, n: usize) -> Result<()> {
        if n > self.limits.standard {
            return Err(Error::LimitExceeded {
                what: "standard table length",
                requested: n,
                limit: self.limits.standard,
            });
        }
        Ok(())
    }

    fn check_peg(&self, n: usize) -> Result<()> {
        if n > self.limits.peg {
            return Err(Error::LimitExceeded {
                what: "peg table length",
                requested: n,
                limit: self.limits.peg,
            });
        }
        Ok(())
    }

    /// Exact distance of `p` from the identity.
    pub fn distance(&self, model: Model, p: &Permutation) -> Result<u8> {
        let pp = PegPermutation::uniform(p.clone(), Decoration::Dot);
        if p.len() <= self.limits.standard {
            let (st, dots) = SignedState::from_peg(&pp);
            return Ok(self.mask_table(model, p.len(), dots)?.lookup(&st));
        }
        self.search(model, &pp)
    }

    /// Exact distance of a peg permutation from the identity peg permutation on the
    /// same base values, under oriented (prefix) reversals.
    pub fn distance_peg(&self, model: Model, pp: &PegPermutation) -> Result<u8> {
        let n = pp.len();
        if n <= self.limits.peg {
            if let Some(t) = self.cached_full_peg(model, n)? {
                return Ok(t.distance_of_peg(pp).expect("complete table"));
            }
            let (st, dots) = SignedState::from_peg(pp);
            return Ok(self.mask_table(model, n, dots)?.lookup(&st));
        }
        let all = if n == 0 { 0 } else { (1u64 << n) - 1 };
        let (_, dots) = SignedState::from_peg(pp);
        if dots == all && n <= self.limits.standard {
            return self.distance(model, pp.base());
        }
        self.search(model, pp)
    }

    /// Distance between two permutations of the same length: the fewest operations
    /// turning `a` into `b`.
    pub fn distance_between(&self, model: Model, a: &Permutation, b: &Permutation) -> Result<u8> {
        let rel = b.inverse().compose(a)?;
        self.distance(model, &rel)
    }

    /// Distance of the inflation of `pp` by `multiplicity` on signed entries and one on `•`.
    pub fn distance_peg_via_inflation(
        &self,
        model: Model,
        pp: &PegPermutation,
        multiplicity: usize,
    ) -> Result<u8> {
        let sizes: Vec<usize> = pp
            .decorations()
            .iter()
            .map(|d| if d.is_signed() { multiplicity } else { 1 })
            .collect();
        let total: usize = sizes.iter().sum();
        if total > MAX_LEN {
            return Err(Error::LimitExceeded {
                what: "inflated length",
                requested: total,
                limit: MAX_LEN,
            });
        }
        let g = crate::inflation::inflate_sizes(pp, &sizes);
        self.distance(model, &g)
    }

    fn search(&self, model: Model, pp: &PegPermutation) -> Result<u8> {
        let (start, dots) = SignedState::from_peg(pp);
        let n = pp.len();
        let all = if n == 0 { 0 } else { (1u64 << n) - 1 };
        let free = all & !dots;
        let segments = model.segments(n, free != 0);
        let mut budget = self.limits.search_nodes;
        let mut bound = start.heuristic(model, free);
        loop {
            let mut st = start;
            match ida(
                model,
                &mut st,
                free,
                &segments,
                0,
                bound,
                usize::MAX,
                &mut budget,
            ) {
                Ida::Found => return Ok(bound as u8),
                Ida::Exhausted => {
                    return Err(Error::LimitExceeded {
                        what: "search node budget",
                        requested: n,
                        limit: self.limits.search_nodes as usize,
                    })
                }
                Ida::Next(b) => bound = b,
            }
        }
    }

    /// Full table for `(model, n, kind)`; peg tables are assembled from every dot set.
    pub fn build_table(&self, model: Model, n: usize, kind: TableKind) -> Result<DistanceTable> {
        match kind {
            TableKind::Standard => {
                self.check_standard(n)?;
                let all = if n == 0 { 0 } else { (1u64 << n) - 1 };
                let t = self.mask_table(model, n, all)?;
                Ok(DistanceTable {
                    model,
                    n,
                    kind,
                    distances: t.dist.clone(),
                })
            }
            TableKind::Peg => {
                self.check_peg(n)?;
                if let Some(t) = self.cached_full_peg(model, n)? {
                    return Ok((*t).clone());
                }
                let mut distances = vec![UNSEEN; factorial(n) as usize * pow3(n)];
                let p3 = pow3(n);
                for dots in 0..(1u64 << n) {
                    let t = MaskTable::build(model, n, dots);
                    for (r, &d) in t.dist.iter().enumerate() {
                        let st = t.unrank(r);
                        let code = st.vals[..n].iter().fold(0usize, |acc, &v| {
                            acc * 3 + st.dec(v, t.free).digit() as usize
                        });
                        let idx = lehmer_rank(&st.vals[..n]) as usize * p3 + code;
                        distances[idx] = d;
                    }
                }
                let table = DistanceTable {
                    model,
                    n,
                    kind,
                    distances,
                };
                if let Some(dir) = &self.cache_dir {
                    table.save(dir)?;
                }
                self.full_peg
                    .write()
                    .unwrap()
                    .insert((model, n), Arc::new(table.clone()));
                Ok(table)
            }
        }
    }

    /// `B_k(n)`: standard permutations of length `n` within distance `k`, in lexicographic order.
    pub fn ball(&self, model: Model, k: usize, n: usize) -> Result<Vec<Permutation>> {
        self.check_standard(n)?;
        let all = if n == 0 { 0 } else { (1u64 << n) - 1 };
        let t = self.mask_table(model, n, all)?;
        Ok(t.dist
            .iter()
            .enumerate()
            .filter(|(_, &d)| (d as usize) <= k)
            .map(|(r, _)| Permutation::unrank(n, r as u64))
            .collect())
    }

    /// Peg permutations of length `n` within distance `k`, sorted.
    pub fn peg_ball(&self, model: Model, k: usize, n: usize) -> Result<Vec<PegPermutation>> {
        self.check_peg(n)?;
        let mut out = Vec::new();
        for dots in 0..(1u64 << n) {
            let t = self.mask_table(model, n, dots)?;
            for (r, &d) in t.dist.iter().enumerate() {
                if (d as usize) <= k {
                    let st = t.unrank(r);
                    let decs = st.vals[..n].iter().map(|&v| st.dec(v, t.free)).collect();
                    out.push(PegPermutation::from_parts_unchecked(
                        st.vals[..n].to_vec(),
                        decs,
                    ));
                }
            }
        }
        out.sort();
        Ok(out)
    }
}

enum Ida {
    Found,
    Exhausted,
    Next(u32),
}

#[allow(clippy::too_many_arguments)]
fn ida(
    model: Model,
    st: &mut SignedState,
    free: u64,
    segments: &[(usize, usize)],
    g: u32,
    bound: u32,
    last: usize,
    budget: &mut u64,
) -> Ida {
    let h = st.heuristic(model, free);
    if g + h > bound {
        return Ida::Next(g + h);
    }
    if st.is_goal() {
        return Ida::Found;
    }
    if *budget == 0 {
        return Ida::Exhausted;
    }
    *budget -= 1;
    let mut best = u32::MAX;
    for (s, &seg) in segments.iter().enumerate() {
        // every operation is an involution
        if s == last {
            continue;
        }
        let saved = *st;
        st.apply(seg, free);
        let r = ida(model, st, free, segments, g + 1, bound, s, budget);
        *st = saved;
        match r {
            Ida::Found | Ida::Exhausted => return r,
            Ida::Next(b) => best = best.min(b),
        }
    }
    Ida::Next(best)
}

/// Adjacent pairs of `pp` not inside a common strip.
pub fn breakpoints(pp: &PegPermutation) -> usize {
    pp.breakpoints()
}

/// A lower bound on the peg distance.
///
/// Reversal: a reversal changes at most two adjacencies, so half the breakpoints
/// (rounded up). Prefix reversal: a flip changes one adjacency, counting the right end
/// against the maximum, so the breakpoints plus one when the last entry is not the
/// maximum decorated `+` or `•`.
pub fn lower_bound(model: Model, pp: &PegPermutation) -> usize {
    let bp = pp.breakpoints();
    match model {
        Model::Rd => bp.div_ceil(2),
        Model::Prd => bp + usize::from(!pp.ends_with_max_up()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::peg::{enumerate_clean_compact, peg_of};
    use crate::perm::permutations;
    use std::collections::{HashSet, VecDeque};

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn pg(s: &str) -> PegPermutation {
        s.parse().unwrap()
    }

    /// Independent oracle: plain BFS on peg permutations through the public reversal API.
    fn naive_peg_distance(model: Model, start: &PegPermutation) -> usize {
        let n = start.len();
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start.clone());
        queue.push_back((start.clone(), 0));
        while let Some((q, d)) = queue.pop_front() {
            if q.is_identity_peg() {
                return d;
            }
            let segs: Vec<(usize, usize)> = match model {
                Model::Rd => (1..=n).flat_map(|i| (i..=n).map(move |j| (i, j))).collect(),
                Model::Prd => (1..=n).map(|j| (1, j)).collect(),
            };
            for (i, j) in segs {
                let r = q.oriented_reversal(i, j).unwrap();
                if seen.insert(r.clone()) {
                    queue.push_back((r, d + 1));
                }
            }
        }
        unreachable!()
    }

    #[test]
    fn distance_examples() {
        let o = Oracle::default();
        assert_eq!(o.distance(Model::Rd, &p("3412")).unwrap(), 2);
        assert_eq!(o.distance(Model::Rd, &p("456123")).unwrap(), 3);
        assert_eq!(o.distance(Model::Prd, &p("4213")).unwrap(), 3);
        for m in Model::ALL {
            assert_eq!(o.distance(m, &Permutation::identity(5)).unwrap(), 0);
            assert_eq!(o.distance(m, &Permutation::default()).unwrap(), 0);
        }
    }

    #[test]
    fn peg_distance_examples() {
        let o = Oracle::default();
        assert_eq!(o.distance_peg(Model::Rd, &pg("2+ 1+")).unwrap(), 3);
        assert_eq!(o.distance_peg(Model::Rd, &pg("1+ 2- 3+")).unwrap(), 1);
        assert_eq!(o.distance_peg(Model::Prd, &pg("3. 1- 2.")).unwrap(), 3);
        for m in Model::ALL {
            assert_eq!(o.distance_peg(m, &pg("1+ 2. 3+ 4.")).unwrap(), 0);
        }
    }

    #[test]
    fn tables_match_naive_bfs() {
        let o = Oracle::default();
        for m in Model::ALL {
            for n in 1..=4 {
                for q in enumerate_clean_compact(n) {
                    assert_eq!(
                        o.distance_peg(m, &q).unwrap() as usize,
                        naive_peg_distance(m, &q),
                        "{m} {q}"
                    );
                }
            }
        }
    }

    #[test]
    fn search_matches_tables() {
        let tables = Oracle::default();
        let searching = Oracle::new(Limits {
            standard: 0,
            peg: 0,
            search_nodes: 50_000_000,
        });
        for m in Model::ALL {
            for q in permutations(6) {
                assert_eq!(
                    tables.distance(m, &q).unwrap(),
                    searching.distance(m, &q).unwrap(),
                    "{m} {q}"
                );
            }
            for q in enumerate_clean_compact(4) {
                assert_eq!(
                    tables.distance_peg(m, &q).unwrap(),
                    searching.distance_peg(m, &q).unwrap(),
                    "{m} {q}"
                );
            }
        }
    }

    #[test]
    fn search_budget_is_reported() {
        let o = Oracle::new(Limits {
            standard: 0,
            peg: 0,
            search_nodes: 10,
        });
        let err = o.distance(Model::Prd, &p("563412")).unwrap_err();
        assert!(matches!(err, Error::LimitExceeded { .. }), "{err}");
    }

    #[test]
    fn breakpoints_examples() {
        for q in enumerate_clean_compact(4) {
            assert_eq!(breakpoints(&q), 3);
        }
        assert_eq!(breakpoints(&pg("1+ 2. 3+")), 0);
        assert_eq!(breakpoints(&pg("2- 3+ 1. 4+")), 3);
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(lower_bound(Model::Rd, &pg("1+ 2- 3+ 4- 5+")), 2);
        assert_eq!(lower_bound(Model::Prd, &pg("2. 1+")), 2);
        for m in Model::ALL {
            assert_eq!(lower_bound(m, &pg("1+ 2+ 3.")), 0);
        }
    }

    #[test]
    fn lower_bound_never_exceeds_distance() {
        let o = Oracle::default();
        for m in Model::ALL {
            for n in 0..=5 {
                for q in enumerate_clean_compact(n) {
                    assert!(lower_bound(m, &q) <= o.distance_peg(m, &q).unwrap() as usize);
                }
            }
        }
    }

    #[test]
    fn via_inflation_examples() {
        let o = Oracle::default();
        assert_eq!(
            o.distance_peg_via_inflation(Model::Rd, &pg("2+ 1+"), 6)
                .unwrap(),
            3
        );
        assert_eq!(
            o.distance_peg_via_inflation(Model::Rd, &pg("2+ 1+"), 2)
                .unwrap(),
            2
        );
        let dots = pg("3. 1. 2.");
        for m in Model::ALL {
            for mult in 1..4 {
                assert_eq!(
                    o.distance_peg_via_inflation(m, &dots, mult).unwrap(),
                    o.distance(m, dots.base()).unwrap()
                );
            }
        }
    }

    #[test]
    fn ball_examples() {
        let o = Oracle::default();
        let b = o.ball(Model::Rd, 1, 3).unwrap();
        assert_eq!(b, vec![p("123"), p("132"), p("213"), p("321")]);
        for m in Model::ALL {
            assert_eq!(o.ball(m, 0, 4).unwrap(), vec![Permutation::identity(4)]);
        }
        // 1 + 3 + 6
        assert_eq!(o.ball(Model::Prd, 2, 4).unwrap().len(), 10);
        assert!(matches!(
            o.ball(Model::Rd, 1, 10),
            Err(Error::LimitExceeded { .. })
        ));
    }

    #[test]
    fn peg_ball_small() {
        let o = Oracle::default();
        let b = o.peg_ball(Model::Rd, 0, 1).unwrap();
        assert_eq!(b, vec![pg("1+"), pg("1.")]);
    }

    #[test]
    fn peg_compaction_bounds_distance() {
        let o = Oracle::default();
        for m in Model::ALL {
            for n in 1..=6 {
                for q in permutations(n) {
                    let d = o.distance(m, &q).unwrap();
                    let dp = o.distance_peg(m, &peg_of(&q).unwrap()).unwrap();
                    assert!(d <= dp, "{m} {q}");
                }
            }
        }
    }

    #[test]
    fn table_adjacent_states_differ_by_at_most_one() {
        let o = Oracle::default();
        for m in Model::ALL {
            let t = o.build_table(m, 5, TableKind::Standard).unwrap();
            for q in permutations(5) {
                let d = t.distance_of(&q).unwrap() as i32;
                for j in 2..=5 {
                    let i_range: Vec<usize> = match m {
                        Model::Rd => (1..j).collect(),
                        Model::Prd => vec![1],
                    };
                    for i in i_range {
                        let r = q.reversal(i, j).unwrap();
                        assert!((t.distance_of(&r).unwrap() as i32 - d).abs() <= 1);
                    }
                }
            }
        }
    }

    #[test]
    fn full_peg_table_agrees_with_mask_tables() {
        let o = Oracle::default();
        for m in Model::ALL {
            let t = o.build_table(m, 3, TableKind::Peg).unwrap();
            assert_eq!(t.len(), 6 * 27);
            let fresh = Oracle::default();
            for base in permutations(3) {
                for code in 0..27usize {
                    let decs = (0..3)
                        .map(|i| Decoration::ALL[code / 3usize.pow(2 - i as u32) % 3])
                        .collect();
                    let q = PegPermutation::new(base.clone(), decs).unwrap();
                    assert_eq!(
                        t.distance_of_peg(&q),
                        Some(fresh.distance_peg(m, &q).unwrap())
                    );
                }
            }
        }
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let o = Oracle::default().with_cache_dir(dir.path());
        let d = o.distance(Model::Prd, &p("4213")).unwrap();
        let path = dir.path().join("prd-standard-4.dist");
        assert!(path.exists());
        let bytes = std::fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"PEGBALL-DIST v1 prd standard 4\n"));
        assert_eq!(bytes.len(), "PEGBALL-DIST v1 prd standard 4\n".len() + 24);
        let reloaded = Oracle::default().with_cache_dir(dir.path());
        assert_eq!(reloaded.distance(Model::Prd, &p("4213")).unwrap(), d);

        let t = o.build_table(Model::Rd, 3, TableKind::Peg).unwrap();
        let loaded = DistanceTable::load(&dir.path().join("rd-peg-3.dist")).unwrap();
        assert_eq!(loaded, t);
        let fresh = Oracle::default().with_cache_dir(dir.path());
        assert_eq!(
            fresh.distance_peg(Model::Rd, &pg("2+ 1+ 3-")).unwrap(),
            t.distance_of_peg(&pg("2+ 1+ 3-")).unwrap()
        );
    }

    #[test]
    fn corrupt_cache_is_rejected() {
        assert!(DistanceTable::from_bytes(b"nonsense").is_err());
        assert!(DistanceTable::from_bytes(b"PEGBALL-DIST v1 rd standard 3\n\x00\x01").is_err());
        assert!(DistanceTable::from_bytes(b"PEGBALL-DIST v2 rd standard 1\n\x00").is_err());
        assert!(DistanceTable::from_bytes(b"PEGBALL-DIST v1 rd standard 1\n\x00").is_ok());
    }

    #[test]
    fn limits_are_enforced() {
        assert!(Oracle::with_limits(Limits {
            standard: 12,
            ..Limits::default()
        })
        .is_err());
        assert!(Oracle::with_limits(Limits {
            peg: 9,
            ..Limits::default()
        })
        .is_err());
        let o = Oracle::default();
        assert!(matches!(
            o.build_table(Model::Rd, 8, TableKind::Peg),
            Err(Error::LimitExceeded { .. })
        ));
    }

    #[test]
    fn distance_between_is_left_invariant_spot_check() {
        let o = Oracle::default();
        let a = p("31425");
        let b = p("24513");
        let s = p("52134");
        for m in Model::ALL {
            let d = o.distance_between(m, &a, &b).unwrap();
            let d2 = o
                .distance_between(m, &s.compose(&a).unwrap(), &s.compose(&b).unwrap())
                .unwrap();
            assert_eq!(d, d2);
        }
    }
}
