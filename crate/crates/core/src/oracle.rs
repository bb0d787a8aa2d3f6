//! Direct block counting by enumeration of labeled trees.
//!
//! This is the independent check on the counting recursion: it labels every
//! node of the complete `d`-ary tree of height `n` and keeps labelings in
//! which no node sees a forbidden `(label, children)` pattern. Nothing here
//! multiplies per-subtree counts.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::shift::{tuple_rank, TreeShiftSpec};

/// Default cap on `k^(nodes)` for a single enumeration.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 24;

/// Number of nodes in the complete `d`-ary tree of height `n` (depths `0..n`).
pub fn tree_nodes(d: usize, n: usize) -> Option<u64> {
    let mut total: u64 = 0;
    let mut layer: u64 = 1;
    for _ in 0..n {
        total = total.checked_add(layer)?;
        layer = layer.checked_mul(d as u64)?;
    }
    Some(total)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockCounts {
    pub height: usize,
    /// `counts[i] = |B_height(X_i)|`, blocks whose root carries symbol `i`.
    pub counts: Vec<u64>,
}

/// `|B_n(X_{a_i})|` for every symbol `i`, under the default budget.
pub fn brute_force_count(spec: &TreeShiftSpec, n: usize) -> Result<BlockCounts> {
    brute_force_count_with_budget(spec, n, DEFAULT_ENUMERATION_BUDGET)
}

pub fn brute_force_count_with_budget(
    spec: &TreeShiftSpec,
    n: usize,
    budget: u64,
) -> Result<BlockCounts> {
    if n < 1 {
        return Err(Error::LevelTooSmall { min: 1, got: n });
    }
    let k = spec.num_symbols();
    let d = spec.arity();
    let over = |needed: String| Error::EnumerationBudgetExceeded { needed, budget };
    let nodes = tree_nodes(d, n).ok_or_else(|| over("overflow".into()))?;
    let space = (k as u64)
        .checked_pow(u32::try_from(nodes).map_err(|_| over("overflow".into()))?)
        .ok_or_else(|| over(format!("{k}^{nodes}")))?;
    if space > budget {
        return Err(over(space.to_string()));
    }

    let columns = spec.tuples_per_root();
    let mut allowed = vec![false; k * columns];
    for root in 0..k {
        for t in spec.allowed(root) {
            allowed[root * columns + tuple_rank(t, k)] = true;
        }
    }
    let nodes = nodes as usize;
    let mut labels = vec![0usize; nodes];
    let counts = (0..k)
        .map(|root| {
            labels[0] = root;
            let mut count = 0;
            label_from(1, &mut labels, k, d, &allowed, columns, &mut count);
            count
        })
        .collect();
    Ok(BlockCounts { height: n, counts })
}

/// Assign labels to nodes `next..` in breadth-first order. Node `v` has
/// children `d*v + 1 ..= d*v + d`; once the last child of a parent is
/// labeled, the parent's pattern is checked.
fn label_from(
    next: usize,
    labels: &mut [usize],
    k: usize,
    d: usize,
    allowed: &[bool],
    columns: usize,
    count: &mut u64,
) {
    if next == labels.len() {
        *count += 1;
        return;
    }
    let closes_parent = next % d == 0;
    for s in 0..k {
        labels[next] = s;
        if closes_parent {
            let parent = (next - 1) / d;
            let children = &labels[d * parent + 1..=d * parent + d];
            if !allowed[labels[parent] * columns + tuple_rank(children, k)] {
                continue;
            }
        }
        label_from(next + 1, labels, k, d, allowed, columns, count);
    }
}
