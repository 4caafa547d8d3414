//! Fixed inputs shared by the benchmarks in `benches/`.

use pegball_core::{PegPermutation, Permutation};

/// Permutations too long for the default tables, so their distances come from search.
pub fn search_inputs() -> Vec<Permutation> {
    [
        "3 1 2 5 4 7 6 10 8 9 12 11",
        "6 5 4 3 2 1 12 11 10 9 8 7",
        "2 4 6 8 10 1 3 5 7 9 11 12",
    ]
    .iter()
    .map(|s| s.parse().expect("fixture"))
    .collect()
}

/// Peg permutations with their grid-class membership candidates.
pub fn grid_inputs() -> Vec<(PegPermutation, Permutation)> {
    [
        ("1+ 4- 3+ 2- 5+", "1 2 9 8 7 3 4 6 5 10 11"),
        ("2+ 1+", "5 6 7 8 1 2 3 4"),
        ("3. 1- 2.", "7 3 2 1 4 5 6"),
    ]
    .iter()
    .map(|(p, g)| (p.parse().expect("fixture"), g.parse().expect("fixture")))
    .collect()
}
