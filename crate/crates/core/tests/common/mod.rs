#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treeshift::shift::TupleIter;
use treeshift::{Alphabet, IntMatrix, Pattern2, Snre, TreeShiftSpec};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Each of the `k^d` patterns per root is allowed with probability `density`;
/// every root keeps at least one tuple.
pub fn random_spec(rng: &mut ChaCha8Rng, k: usize, d: usize, density: f64) -> TreeShiftSpec {
    let mut patterns = Vec::new();
    for root in 0..k {
        let tuples: Vec<Vec<usize>> = TupleIter::new(k, d).collect();
        let mut kept: Vec<&Vec<usize>> = tuples.iter().filter(|_| rng.gen_bool(density)).collect();
        if kept.is_empty() {
            kept.push(&tuples[rng.gen_range(0..tuples.len())]);
        }
        patterns.extend(kept.into_iter().map(|t| Pattern2::new(root, t.clone())));
    }
    TreeShiftSpec::from_allowed(Alphabet::numbered(k).unwrap(), d, patterns).unwrap()
}

/// A random spec with exactly `k` symbols and every symbol essential.
pub fn all_essential_spec(rng: &mut ChaCha8Rng, k: usize, d: usize) -> TreeShiftSpec {
    loop {
        let density = rng.gen_range(0.05..0.6);
        let spec = random_spec(rng, k, d, density);
        let snre = Snre::from_spec(&spec).unwrap();
        if snre.essential_symbols().len() == k {
            return spec;
        }
    }
}

/// Nonnegative matrix with entries below `max_entry` and every row sum positive.
pub fn random_matrix(rng: &mut ChaCha8Rng, dim: usize, max_entry: i64) -> IntMatrix {
    let rows = (0..dim)
        .map(|_| {
            let mut row: Vec<i64> = (0..dim)
                .map(|_| if rng.gen_bool(0.5) { rng.gen_range(0..max_entry) } else { 0 })
                .collect();
            if row.iter().all(|&v| v == 0) {
                row[rng.gen_range(0..dim)] = 1;
            }
            row
        })
        .collect();
    IntMatrix::from_rows(rows).unwrap()
}

pub fn two_symbol() -> TreeShiftSpec {
    TreeShiftSpec::parse(
        r#"{"d":2,"alphabet":["a","b"],
            "forbidden":[["a",["a","b"]],["a",["b","a"]],["b",["a","a"]],["b",["b","b"]]]}"#,
    )
    .unwrap()
}

pub fn branching_matrix() -> IntMatrix {
    IntMatrix::from_rows(vec![vec![1, 1, 0], vec![0, 0, 1], vec![2, 1, 0]]).unwrap()
}

/// allowed(a) = (a,b),(b,a); allowed(b) = (b,b),(a,a).
pub fn saving_example() -> TreeShiftSpec {
    TreeShiftSpec::parse(
        r#"{"d":2,"alphabet":["a","b"],
            "allowed":[["a",["a","b"]],["a",["b","a"]],["b",["b","b"]],["b",["a","a"]]]}"#,
    )
    .unwrap()
}

pub const TRIBONACCI: f64 = 1.839_286_755_214_161;
