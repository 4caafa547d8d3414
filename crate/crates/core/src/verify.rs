//! Reproduction checks for the published constants and property suites over small sizes.
//!
//! Every check reports one of three outcomes: the claim holds, the claim fails in a way
//! recorded in [`KNOWN_FINDINGS`] (the computed value is the documented one), or something
//! unexpected happened.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{
    exceptional_check, is_peg_basis_member, m_set, peg_basis, peg_basis_up_to, standard_basis,
};
use crate::distance::{lower_bound, Model, Oracle};
use crate::enumeration::{sequence, Method};
use crate::error::{Error, Result};
use crate::generators::{generating_set, rd_inflate_step, IndexPair};
use crate::inflation::{
    a_set_stream, grid_enumerate, grid_member, legal_vectors, monotone_inflate,
};
use crate::peg::{
    enumerate_clean_compact, exceptional, peg_of, peg_pattern_contains, ExceptionalKind,
    PegPermutation,
};
use crate::perm::{avoids_all, factorial, minimal_elements, permutations, Permutation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Published constants; selected on the command line as `paper`.
    Published,
    Properties,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "paper" | "published" => Ok(Suite::Published),
            "properties" => Ok(Suite::Properties),
            "all" => Ok(Suite::All),
            other => Err(Error::Parse(format!(
                "unknown suite {other:?} (expected paper, properties or all)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    /// The published statement does not hold; the computed value matches a recorded finding.
    KnownDiscrepancy,
    Fail,
}

impl Status {
    /// Only an unexpected failure counts against the build.
    pub fn is_failure(self) -> bool {
        self == Status::Fail
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::KnownDiscrepancy => "FAIL (known discrepancy)",
            Status::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub title: String,
    pub status: Status,
    pub detail: String,
    pub elapsed_ms: u128,
}

/// Published constants checked by the published suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claims {
    pub distances: Vec<(&'static str, u8)>,
    pub peg_distances: Vec<(&'static str, u8)>,
    pub rd_generators: Vec<(usize, Vec<&'static str>)>,
    pub prd_generators: Vec<(usize, Vec<&'static str>)>,
    /// `|prd generating set|` for `k = 1..=6`.
    pub prd_generator_counts: Vec<u64>,
    pub rd_peg_basis_1: Vec<&'static str>,
    pub prd_peg_basis_1: Vec<&'static str>,
    pub standard_bases: Vec<(Model, usize, Vec<&'static str>)>,
    pub a_set_bottom: (&'static str, u8),
    pub a_set_covers: (Vec<&'static str>, u8),
    pub a_set_minimal: (Vec<&'static str>, u8),
    /// Exceptional permutations of length `n` have prefix reversal distance `n + offset`.
    pub exceptional_offset: i64,
    /// `|B_2^prd(n)| = a n^2 + b n + c`.
    pub prd2_quadratic: (i64, i64, i64),
}

impl Claims {
    pub fn published() -> Self {
        Claims {
            distances: vec![("3412", 2), ("456123", 3)],
            peg_distances: vec![("2+ 1+", 3), ("1+ 2- 3+", 1)],
            rd_generators: vec![
                (1, vec!["1+ 2- 3+"]),
                (
                    2,
                    vec![
                        "1+ 2- 3+ 4- 5+",
                        "1+ 4- 3+ 2- 5+",
                        "1+ 4+ 2- 3- 5+",
                        "1+ 3- 4- 2+ 5+",
                    ],
                ),
            ],
            prd_generators: vec![
                (1, vec!["1- 2+"]),
                (2, vec!["2+ 1- 3+", "2- 1+ 3+"]),
                (
                    3,
                    vec![
                        "2- 3+ 1- 4+",
                        "2+ 3- 1- 4+",
                        "3- 1+ 2- 4+",
                        "3+ 2- 1+ 4+",
                        "1- 3+ 2+ 4+",
                        "3- 1- 2+ 4+",
                    ],
                ),
            ],
            prd_generator_counts: (1..=6).map(factorial).collect(),
            rd_peg_basis_1: vec!["1- 2-", "2+ 1.", "2. 1+"],
            prd_peg_basis_1: vec!["1. 2-", "2. 1+", "2+ 1.", "3. 1- 2.", "2- 3. 1."],
            standard_bases: vec![
                (Model::Rd, 1, vec!["2143", "231", "312"]),
                (Model::Prd, 1, vec!["132", "231", "312"]),
                (Model::Prd, 2, vec!["132", "3241", "3412", "4213", "4231"]),
            ],
            a_set_bottom: ("3412", 2),
            a_set_covers: (vec!["34512", "45123"], 2),
            a_set_minimal: (vec!["456123"], 3),
            exceptional_offset: 0,
            prd2_quadratic: (1, 0, 1),
        }
    }

    /// Names accepted by [`Claims::mutate`], with the check each one targets.
    pub const MUTATIONS: &'static [(&'static str, &'static str)] = &[
        ("rd-3412", "1"),
        ("rd-peg-21", "1"),
        ("rd-generators-2", "2"),
        ("prd-generators-3", "3"),
        ("prd-generator-count", "3"),
        ("peg-basis-rd-1", "4"),
        ("standard-basis-prd-2", "5"),
        ("a-set-bottom", "6"),
        ("exceptional-distance", "7"),
        ("prd2-formula", "8"),
    ];

    /// Perturbs one published constant; the matching check must then fail.
    pub fn mutate(&mut self, name: &str) -> Result<()> {
        match name {
            "rd-3412" => self.distances[0].1 += 1,
            "rd-peg-21" => self.peg_distances[0].1 -= 1,
            "rd-generators-2" => {
                self.rd_generators[1].1.pop();
            }
            "prd-generators-3" => self.prd_generators[2].1[0] = "2+ 3+ 1- 4+",
            "prd-generator-count" => self.prd_generator_counts[5] += 1,
            "peg-basis-rd-1" => self.rd_peg_basis_1.push("1- 2+"),
            "standard-basis-prd-2" => self.standard_bases[2].2[1] = "3421",
            "a-set-bottom" => self.a_set_bottom.0 = "2413",
            "exceptional-distance" => self.exceptional_offset = 1,
            "prd2-formula" => self.prd2_quadratic.2 = 2,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown mutation {other:?}; expected one of {}",
                    Self::MUTATIONS
                        .iter()
                        .map(|(m, _)| *m)
                        .collect::<Vec<_>>()
                        .join(", ")
                )))
            }
        }
        Ok(())
    }
}

/// Documented disagreements between published statements and computed values, keyed by
/// check id. A check is reported as a known discrepancy only when its computed value
/// renders to exactly this text.
pub const KNOWN_FINDINGS: &[(&str, &str)] = &[
    (
        "4",
        "rd: {1- 2-, 2+ 1., 2. 1+, 2- 3. 1., 2. 3- 1., 3. 1- 2., 3. 1. 2-, 2. 4. 1. 3., 3. 1. 4. 2.}; \
         prd: {1. 2-, 2+ 1., 2. 1+, 2- 3. 1., 3. 1- 2., 2. 4. 1. 3., 3. 1. 4. 2.}",
    ),
    ("8", "|B_2(n)| = (n-1)^2 + 1 for 4 <= n <= 10"),
    ("9.reduced-pattern", "no clean compact pattern one shorter: {2. 4. 1. 3., 3. 1. 4. 2.}"),
    ("P.basis-correctness", "rd k=2 misses {45231, 45312, 53412}"),
    ("P.method-agreement", "avoid differs for rd k=2: [1, 2, 6, 22, 66, 164, 358]"),
    ("P.prd-length-k+2", "non-exceptional members at k=2: {2. 4. 1. 3., 3. 1. 4. 2.}"),
];

fn known(id: &str) -> Option<&'static str> {
    KNOWN_FINDINGS
        .iter()
        .find(|(k, _)| *k == id)
        .map(|(_, v)| *v)
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub seed: u64,
    pub claims: Claims,
    /// Checks whose claims were mutated; a recorded finding never excuses them.
    pub mutated: BTreeSet<String>,
}

impl VerifyOptions {
    /// Applies the named mutation to the claims.
    pub fn mutate(&mut self, name: &str) -> Result<()> {
        self.claims.mutate(name)?;
        let (_, id) = Claims::MUTATIONS
            .iter()
            .find(|(m, _)| *m == name)
            .expect("validated by mutate");
        self.mutated.insert(id.to_string());
        Ok(())
    }
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            suite: Suite::All,
            seed: 0,
            claims: Claims::published(),
            mutated: BTreeSet::new(),
        }
    }
}

/// Outcome of one check body: `Ok(None)` on success, `Ok(Some(text))` when the claim
/// fails, with `text` the rendered computed value.
type Outcome = Result<Option<String>>;

struct Runner<'a> {
    oracle: &'a Oracle,
    mutated: &'a BTreeSet<String>,
    out: Vec<Check>,
}

impl Runner<'_> {
    fn run(&mut self, id: &str, title: &str, body: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let (status, detail) = match body() {
            Ok(None) => (Status::Pass, String::new()),
            Ok(Some(found)) => match known(id) {
                Some(text) if !self.mutated.contains(id) && text == found => {
                    (Status::KnownDiscrepancy, found)
                }
                _ => (Status::Fail, found),
            },
            Err(e) => (Status::Fail, format!("error: {e}")),
        };
        self.out.push(Check {
            id: id.to_string(),
            title: title.to_string(),
            status,
            detail,
            elapsed_ms: start.elapsed().as_millis(),
        });
    }
}

/// Runs the selected suite. Results come back in a fixed order.
pub fn run(oracle: &Oracle, opts: &VerifyOptions) -> Vec<Check> {
    let mut r = Runner {
        oracle,
        mutated: &opts.mutated,
        out: Vec::new(),
    };
    if matches!(opts.suite, Suite::Published | Suite::All) {
        published_suite(&mut r, &opts.claims);
    }
    if matches!(opts.suite, Suite::Properties | Suite::All) {
        property_suite(&mut r, opts.seed);
    }
    r.out
}

fn perms(list: &[&str]) -> Result<BTreeSet<Permutation>> {
    list.iter().map(|s| s.parse()).collect()
}

fn pegs(list: &[&str]) -> Result<BTreeSet<PegPermutation>> {
    list.iter().map(|s| s.parse()).collect()
}

fn render<T: fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    let v: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", v.join(", "))
}

fn compact(p: &Permutation) -> String {
    p.as_slice()
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("")
}

fn fail_unless(ok: bool, found: impl FnOnce() -> String) -> Outcome {
    Ok(if ok { None } else { Some(found()) })
}

fn published_suite(r: &mut Runner, c: &Claims) {
    let o = r.oracle;
    r.run(
        "1",
        "reversal distances of 3412, 456123, 2+1+, 1+2-3+",
        || {
            let mut bad = Vec::new();
            for (p, want) in &c.distances {
                let d = o.distance(Model::Rd, &p.parse()?)?;
                if d != *want {
                    bad.push(format!("rd({p}) = {d}"));
                }
            }
            for (p, want) in &c.peg_distances {
                let d = o.distance_peg(Model::Rd, &p.parse()?)?;
                if d != *want {
                    bad.push(format!("rd({p}) = {d}"));
                }
            }
            fail_unless(bad.is_empty(), || bad.join("; "))
        },
    );
    r.run("2", "reversal generating sets for k = 1, 2", || {
        let mut bad = Vec::new();
        for (k, want) in &c.rd_generators {
            let got = generating_set(Model::Rd, *k).members;
            if got != pegs(want)? {
                bad.push(format!("k={k}: {}", render(&got)));
            }
        }
        fail_unless(bad.is_empty(), || bad.join("; "))
    });
    r.run(
        "3",
        "prefix reversal generating sets for k = 1, 2, 3 and sizes k!",
        || {
            let mut bad = Vec::new();
            for (k, want) in &c.prd_generators {
                let got = generating_set(Model::Prd, *k).members;
                if got != pegs(want)? {
                    bad.push(format!("k={k}: {}", render(&got)));
                }
            }
            for (i, want) in c.prd_generator_counts.iter().enumerate() {
                let got = generating_set(Model::Prd, i + 1).len() as u64;
                if got != *want {
                    bad.push(format!("k={}: size {got}", i + 1));
                }
            }
            fail_unless(bad.is_empty(), || bad.join("; "))
        },
    );
    r.run("4", "clean compact peg bases for k = 1", || {
        let rd = peg_basis(o, Model::Rd, 1)?.members;
        let prd = peg_basis(o, Model::Prd, 1)?.members;
        fail_unless(
            rd == pegs(&c.rd_peg_basis_1)? && prd == pegs(&c.prd_peg_basis_1)?,
            || format!("rd: {}; prd: {}", render(&rd), render(&prd)),
        )
    });
    r.run("5", "standard bases (rd,1), (prd,1), (prd,2)", || {
        let mut bad = Vec::new();
        for (model, k, want) in &c.standard_bases {
            let b = standard_basis(o, *model, *k, None)?;
            if b.members != perms(want)? || !b.verified() {
                bad.push(format!(
                    "{model} k={k}: {} verified to {}: {}",
                    render(b.members.iter().map(compact)),
                    b.verified_up_to,
                    b.verified()
                ));
            }
        }
        fail_unless(bad.is_empty(), || bad.join("; "))
    });
    r.run("6", "the A-set of 2+1+ up to length 6", || {
        a_set_check(o, c)
    });
    r.run("7", "exceptional permutations of length n <= 7", || {
        let mut bad = Vec::new();
        for k in 0..=5 {
            let report = exceptional_check(o, k)?;
            for e in &report.entries {
                let want = (k as i64 + 2 + c.exceptional_offset) as usize;
                if e.distance != want || !e.in_basis_k || !e.in_basis_k_plus_one {
                    bad.push(format!(
                        "{} ({}): distance {}, in basis k={k}: {}, k={}: {}",
                        e.perm,
                        e.kind.name(),
                        e.distance,
                        e.in_basis_k,
                        k + 1,
                        e.in_basis_k_plus_one
                    ));
                }
            }
        }
        fail_unless(bad.is_empty(), || bad.join("; "))
    });
    r.run(
        "8",
        "|B_2^prd(n)| = n^2 + 1 for 4 <= n <= 10 by grid, avoidance and BFS",
        || {
            let grid = sequence(o, Model::Prd, 2, 10, Method::Grid)?;
            let avoid = sequence(o, Model::Prd, 2, 10, Method::Avoid)?;
            let bfs = sequence(o, Model::Prd, 2, 8, Method::Bfs)?;
            if grid != avoid || bfs[..] != grid[..8] {
                return Ok(Some(format!(
                    "methods disagree: grid {grid:?}, avoid {avoid:?}, bfs {bfs:?}"
                )));
            }
            let (a, b, cc) = c.prd2_quadratic;
            let claimed = |n: i64| a * n * n + b * n + cc;
            if (4..=10).all(|n| grid[n as usize - 1] as i64 == claimed(n)) {
                return Ok(None);
            }
            let shifted = (4..=10).all(|n| grid[n as usize - 1] as i64 == (n - 1) * (n - 1) + 1);
            Ok(Some(if shifted {
                "|B_2(n)| = (n-1)^2 + 1 for 4 <= n <= 10".to_string()
            } else {
                format!("counts {grid:?}")
            }))
        },
    );
}

fn a_set_check(o: &Oracle, c: &Claims) -> Outcome {
    let beta: PegPermutation = "2+ 1+".parse()?;
    let a_set: Vec<Permutation> = a_set_stream(&beta, 6)?.collect();
    let mut bad = Vec::new();
    let bottom = &a_set[0];
    let bottom_d = o.distance(Model::Rd, bottom)?;
    if compact(bottom) != c.a_set_bottom.0 || bottom_d != c.a_set_bottom.1 {
        bad.push(format!("bottom {} at rd {bottom_d}", compact(bottom)));
    }
    let covers: Vec<&Permutation> = a_set
        .iter()
        .filter(|g| g.len() == bottom.len() + 1 && g.contains(bottom))
        .collect();
    let want: BTreeSet<String> = c.a_set_covers.0.iter().map(|s| s.to_string()).collect();
    let got: BTreeSet<String> = covers.iter().map(|g| compact(g)).collect();
    let cover_d: BTreeSet<u8> = covers
        .iter()
        .map(|g| o.distance(Model::Rd, g))
        .collect::<Result<_>>()?;
    if got != want || cover_d != BTreeSet::from([c.a_set_covers.1]) {
        bad.push(format!("covers {} at rd {cover_d:?}", render(&got)));
    }
    let m = m_set(o, Model::Rd, &beta, Some(6))?;
    let got: BTreeSet<String> = m.members.iter().map(compact).collect();
    let want: BTreeSet<String> = c.a_set_minimal.0.iter().map(|s| s.to_string()).collect();
    if got != want || m.target_distance != c.a_set_minimal.1 as usize {
        bad.push(format!(
            "minimal at rd {}: {}",
            m.target_distance,
            render(&got)
        ));
    }
    fail_unless(bad.is_empty(), || bad.join("; "))
}

fn property_suite(r: &mut Runner, seed: u64) {
    let o = r.oracle;
    r.run(
        "9.left-invariance",
        "d(p, q) = d(sp, sq) by pairwise BFS, 200 seeded triples per model, n <= 5",
        || left_invariance(o, seed),
    );
    r.run(
        "9.down-set",
        "balls are closed under patterns, n <= 6, k <= 3",
        || down_set(o),
    );
    r.run(
        "9.peg-distance-bound",
        "rd(p) <= rd(peg(p)) for n <= 7",
        || peg_distance_bound(o, Model::Rd),
    );
    r.run(
        "9.lower-bounds",
        "breakpoint bounds never exceed the distance, clean compact length <= 5",
        || lower_bounds(o),
    );
    r.run(
        "9.grid-member",
        "grid membership matches exhaustive inflation, |pp| <= 4, |g| <= 7",
        grid_member_exhaustive,
    );
    r.run("9.cover", "one reversal applied to Grid(p) gives the union of the grids of its inflate steps, k <= 2, n <= 6", || {
        cover_property(o)
    });
    r.run(
        "9.maximal-generating",
        "maximal clean compact members of the peg ball are the generators",
        || maximal_generating(o),
    );
    r.run(
        "9.reduced-pattern",
        "every clean compact peg permutation has a clean compact pattern one shorter, n <= 6",
        reduced_pattern,
    );
    r.run(
        "9.inflation-stabilization",
        "inflated distance stabilises at the peg distance, |pp| <= 3",
        || stabilization(o),
    );
    r.run(
        "P.completeness",
        "the grids of the generating set give the ball, rd k <= 3, prd k <= 4, n <= 7",
        || completeness(o),
    );
    r.run(
        "P.basis-correctness",
        "Av(standard basis) equals the ball for k <= 2, n <= 7",
        || basis_correctness(o),
    );
    r.run(
        "P.method-agreement",
        "bfs, grid and avoidance counts agree for k <= 2, n <= 7",
        || method_agreement(o),
    );
    r.run(
        "P.prd-length-k+2",
        "prefix reversal peg basis members of length k+2 are exceptional, k <= 3",
        || prd_long_members(o),
    );
    r.run(
        "P.peg-basis-minimality",
        "peg basis members re-checked against the definition",
        || peg_basis_minimality(o),
    );
    r.run(
        "P.grid-compatibility",
        "grid classes of ball members stay in the ball, |pp| <= 3, n <= 6",
        || grid_compatibility(o),
    );
    r.run(
        "P.grid-monotonicity",
        "Grid is monotone in the peg pattern order, |pp| <= 3, n <= 6",
        grid_monotonicity,
    );
    r.run(
        "P.a-set",
        "every A-set member compacts back to its peg permutation, |beta| <= 3, length <= 8",
        a_set_consistency,
    );
    r.run(
        "P.prd-peg-distance-bound",
        "prd(p) <= prd(peg(p)) for n <= 7",
        || peg_distance_bound(o, Model::Prd),
    );
}

/// Distance from `a` to `b` by BFS over the Cayley graph, sharing nothing with the tables.
fn pairwise_bfs(model: Model, a: &Permutation, b: &Permutation) -> usize {
    let n = a.len();
    let moves: Vec<(usize, usize)> = match model {
        Model::Rd => (1..=n)
            .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
            .collect(),
        Model::Prd => (2..=n).map(|j| (1, j)).collect(),
    };
    let mut seen = HashMap::from([(a.clone(), 0usize)]);
    let mut queue = VecDeque::from([a.clone()]);
    while let Some(p) = queue.pop_front() {
        let d = seen[&p];
        if &p == b {
            return d;
        }
        for &(i, j) in &moves {
            let q = p.reversal(i, j).expect("valid indices");
            if !seen.contains_key(&q) {
                seen.insert(q.clone(), d + 1);
                queue.push_back(q);
            }
        }
    }
    unreachable!("the Cayley graph is connected")
}

fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
    let mut v: Vec<u8> = (1..=n as u8).collect();
    v.shuffle(rng);
    Permutation::new(v).expect("shuffle of the identity")
}

fn left_invariance(o: &Oracle, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for model in Model::ALL {
        for _ in 0..200 {
            let n = rng.gen_range(1..=5);
            let (p, q, s) = (
                random_perm(&mut rng, n),
                random_perm(&mut rng, n),
                random_perm(&mut rng, n),
            );
            let d = pairwise_bfs(model, &p, &q);
            let shifted = pairwise_bfs(model, &s.compose(&p)?, &s.compose(&q)?);
            let table = o.distance_between(model, &p, &q)? as usize;
            if d != shifted || d != table {
                return Ok(Some(format!(
                    "{model}: p={p} q={q} s={s}: {d} vs {shifted} vs table {table}"
                )));
            }
        }
    }
    Ok(None)
}

fn subsequences(p: &Permutation) -> impl Iterator<Item = Permutation> + '_ {
    let n = p.len();
    (0u32..(1 << n)).map(move |mask| {
        let vals: Vec<u8> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| p.as_slice()[i])
            .collect();
        Permutation::standardize(&vals)
    })
}

fn down_set(o: &Oracle) -> Outcome {
    for model in Model::ALL {
        for n in 1..=6 {
            for k in 0..=3 {
                for t in o.ball(model, k, n)? {
                    for s in subsequences(&t) {
                        if o.distance(model, &s)? as usize > k {
                            return Ok(Some(format!(
                                "{model} k={k}: {t} in the ball, pattern {s} is not"
                            )));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

fn peg_distance_bound(o: &Oracle, model: Model) -> Outcome {
    for n in 1..=7 {
        let all: Vec<Permutation> = permutations(n).collect();
        let bad = all
            .par_iter()
            .map(|p| -> Result<Option<String>> {
                let d = o.distance(model, p)?;
                let pp = peg_of(p)?;
                let dp = o.distance_peg(model, &pp)?;
                Ok((d > dp).then(|| format!("{model}({p}) = {d} > {model}({pp}) = {dp}")))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .next();
        if bad.is_some() {
            return Ok(bad);
        }
    }
    Ok(None)
}

fn lower_bounds(o: &Oracle) -> Outcome {
    for model in Model::ALL {
        for n in 1..=5 {
            for pp in enumerate_clean_compact(n) {
                let d = o.distance_peg(model, &pp)? as usize;
                let lb = lower_bound(model, &pp);
                if lb > d {
                    return Ok(Some(format!("{model}: bound {lb} > distance {d} for {pp}")));
                }
            }
        }
    }
    Ok(None)
}

fn grid_member_exhaustive() -> Outcome {
    let shapes: Vec<PegPermutation> = (1..=4).flat_map(enumerate_clean_compact).collect();
    let bad = shapes
        .par_iter()
        .map(|pp| -> Result<Option<String>> {
            for n in 0..=7 {
                let inflated: BTreeSet<Permutation> = legal_vectors(pp, n)
                    .iter()
                    .map(|v| monotone_inflate(pp, v))
                    .collect::<Result<_>>()?;
                for g in permutations(n) {
                    if grid_member(pp, &g) != inflated.contains(&g) {
                        return Ok(Some(format!(
                            "{pp} and {g}: membership {}",
                            !inflated.contains(&g)
                        )));
                    }
                }
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(bad.into_iter().flatten().next())
}

fn cover_property(o: &Oracle) -> Outcome {
    for k in 0..=2 {
        let next = generating_set(Model::Rd, k + 1).members;
        for pp in &generating_set(Model::Rd, k).members {
            let steps: Vec<PegPermutation> = IndexPair::all(pp.len())
                .into_iter()
                .map(|pair| rd_inflate_step(pp, pair))
                .collect::<Result<_>>()?;
            for n in 1..=6 {
                let mut moved = BTreeSet::new();
                for g in grid_enumerate(std::iter::once(pp), n) {
                    for i in 1..=n {
                        for j in i..=n {
                            moved.insert(g.reversal(i, j)?);
                        }
                    }
                }
                let union = grid_enumerate(&steps, n);
                if moved != union {
                    return Ok(Some(format!(
                        "{pp} at n={n}: {} moved vs {} in the union",
                        moved.len(),
                        union.len()
                    )));
                }
            }
        }
        for n in 1..=6 {
            let covered = grid_enumerate(&next, n);
            for p in o.ball(Model::Rd, k, n)? {
                for i in 1..=n {
                    for j in i + 1..=n {
                        let q = p.reversal(i, j)?;
                        if !covered.contains(&q) {
                            return Ok(Some(format!(
                                "k={k}: {q} one reversal from the ball, outside the next grids"
                            )));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

fn maximal_generating(o: &Oracle) -> Outcome {
    for (model, k_max) in [(Model::Rd, 2), (Model::Prd, 3)] {
        for k in 0..=k_max {
            let longest = match model {
                Model::Rd => 2 * k + 1,
                Model::Prd => k + 1,
            };
            let mut inside = Vec::new();
            for n in 1..=longest + 1 {
                for pp in enumerate_clean_compact(n) {
                    if o.distance_peg(model, &pp)? as usize <= k {
                        inside.push(pp);
                    }
                }
            }
            let maximal: BTreeSet<PegPermutation> = inside
                .iter()
                .filter(|pp| {
                    !inside
                        .iter()
                        .any(|q| q != *pp && peg_pattern_contains(pp, q))
                })
                .cloned()
                .collect();
            let gens = generating_set(model, k).members;
            if maximal != gens {
                return Ok(Some(format!("{model} k={k}: maximal {}", render(&maximal))));
            }
        }
    }
    Ok(None)
}

fn reduced_pattern() -> Outcome {
    // weakening a decoration only adds strip adjacencies, so a clean compact pattern one
    // shorter exists iff some single deletion is already clean compact
    let mut bad = BTreeSet::new();
    for n in 2..=6 {
        for pp in enumerate_clean_compact(n) {
            let found = (0..n).any(|skip| {
                let keep: Vec<usize> = (0..n).filter(|&i| i != skip).collect();
                pp.restrict(&keep).is_clean_compact()
            });
            if !found {
                bad.insert(pp);
            }
        }
    }
    fail_unless(bad.is_empty(), || {
        format!("no clean compact pattern one shorter: {}", render(&bad))
    })
}

fn stabilization(o: &Oracle) -> Outcome {
    for model in Model::ALL {
        for len in 1..=3 {
            for pp in enumerate_clean_compact(len) {
                let d = o.distance_peg(model, &pp)?;
                let signed = pp
                    .decorations()
                    .iter()
                    .filter(|x| x.is_signed())
                    .count()
                    .max(1);
                // the threshold 2d + 2 can outgrow the widest representable permutation
                let fits = (crate::perm::MAX_LEN - (len - signed.min(len))) / signed;
                let n1 = (2 * d as usize + 3).min(fits);
                let mut prev = None;
                for n in 1..=n1 {
                    let v = o.distance_peg_via_inflation(model, &pp, n)?;
                    if v > d || prev.is_some_and(|p| v < p) {
                        return Ok(Some(format!(
                            "{model} {pp}: N={n} gives {v} (peg distance {d})"
                        )));
                    }
                    prev = Some(v);
                }
                let a = o.distance_peg_via_inflation(model, &pp, n1 - 1)?;
                if a != d || prev != Some(d) {
                    return Ok(Some(format!(
                        "{model} {pp}: not stable at peg distance {d} by N={n1}"
                    )));
                }
            }
        }
    }
    Ok(None)
}

fn basis_correctness(o: &Oracle) -> Outcome {
    let mut bad = Vec::new();
    for model in Model::ALL {
        for k in 0..=2 {
            let b = standard_basis(o, model, k, None)?;
            let mut wrong = BTreeSet::new();
            for n in 1..=7 {
                for p in permutations(n) {
                    let inside = o.distance(model, &p)? as usize <= k;
                    if inside != avoids_all(&b.members, &p) {
                        wrong.insert(p);
                    }
                }
            }
            let minimal = minimal_elements(&wrong);
            if !minimal.is_empty() {
                bad.push(format!(
                    "{model} k={k} misses {}",
                    render(minimal.iter().map(compact))
                ));
            }
        }
    }
    fail_unless(bad.is_empty(), || bad.join("; "))
}

fn completeness(o: &Oracle) -> Outcome {
    for (model, k_max) in [(Model::Rd, 3), (Model::Prd, 4)] {
        for k in 0..=k_max {
            let gens = generating_set(model, k).members;
            for n in 1..=7 {
                let ball: BTreeSet<Permutation> = o.ball(model, k, n)?.into_iter().collect();
                if grid_enumerate(&gens, n) != ball {
                    return Ok(Some(format!(
                        "{model} k={k} n={n}: grids differ from the ball"
                    )));
                }
            }
        }
    }
    Ok(None)
}

fn method_agreement(o: &Oracle) -> Outcome {
    let mut bad = Vec::new();
    for model in Model::ALL {
        for k in 0..=2 {
            let bfs = sequence(o, model, k, 7, Method::Bfs)?;
            let grid = sequence(o, model, k, 7, Method::Grid)?;
            let avoid = sequence(o, model, k, 7, Method::Avoid)?;
            if grid != bfs {
                bad.push(format!("grid differs for {model} k={k}: {grid:?}"));
            }
            if avoid != bfs {
                bad.push(format!("avoid differs for {model} k={k}: {avoid:?}"));
            }
        }
    }
    fail_unless(bad.is_empty(), || bad.join("; "))
}

fn prd_long_members(o: &Oracle) -> Outcome {
    let mut bad = Vec::new();
    for k in 0..=3 {
        let n = k + 2;
        let allowed: BTreeSet<PegPermutation> = ExceptionalKind::for_length(n)
            .into_iter()
            .map(|kind| exceptional(kind, n))
            .collect::<Result<_>>()?;
        let extra: BTreeSet<PegPermutation> = peg_basis_up_to(o, Model::Prd, k, n)?
            .members
            .into_iter()
            .filter(|pp| pp.len() == n && !allowed.contains(pp))
            .collect();
        if !extra.is_empty() {
            bad.push(format!(
                "non-exceptional members at k={k}: {}",
                render(&extra)
            ));
        }
    }
    fail_unless(bad.is_empty(), || bad.join("; "))
}

fn peg_basis_minimality(o: &Oracle) -> Outcome {
    for (model, k_max) in [(Model::Rd, 2), (Model::Prd, 3)] {
        for k in 0..=k_max {
            for pp in peg_basis(o, model, k)?.members {
                if !is_peg_basis_member(o, model, k, &pp)? {
                    return Ok(Some(format!("{model} k={k}: {pp} fails the definition")));
                }
            }
        }
    }
    Ok(None)
}

fn grid_compatibility(o: &Oracle) -> Outcome {
    for model in Model::ALL {
        for len in 1..=3 {
            for pp in enumerate_clean_compact(len) {
                let d = o.distance_peg(model, &pp)?;
                for n in 1..=6 {
                    for g in grid_enumerate(std::iter::once(&pp), n) {
                        let dg = o.distance(model, &g)?;
                        if dg > d {
                            return Ok(Some(format!(
                                "{model}: {g} in Grid({pp}) has distance {dg} > {d}"
                            )));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

fn grid_monotonicity() -> Outcome {
    let shapes: Vec<PegPermutation> = (1..=3).flat_map(enumerate_clean_compact).collect();
    let grids: Vec<Vec<BTreeSet<Permutation>>> = shapes
        .par_iter()
        .map(|pp| {
            (0..=6)
                .map(|n| grid_enumerate(std::iter::once(pp), n))
                .collect()
        })
        .collect();
    for (a, pa) in shapes.iter().enumerate() {
        for (b, pb) in shapes.iter().enumerate() {
            if peg_pattern_contains(pa, pb) {
                for (n, (small, big)) in grids[a].iter().zip(&grids[b]).enumerate() {
                    if !small.is_subset(big) {
                        return Ok(Some(format!(
                            "{pa} is a pattern of {pb} but Grid is not contained at n={n}"
                        )));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn a_set_consistency() -> Outcome {
    for len in 1..=3 {
        for beta in enumerate_clean_compact(len) {
            for g in a_set_stream(&beta, 8)? {
                if peg_of(&g)? != beta {
                    return Ok(Some(format!(
                        "{g} listed for {beta} compacts to {}",
                        peg_of(&g)?
                    )));
                }
            }
        }
    }
    Ok(None)
}
