//! Systems of nonlinear recursive equations (SNREs).
//!
//! For a Markov tree-shift, let `a_n^(i)` be the number of blocks of height
//! `n + 1` whose root carries symbol `i`. These counts obey
//!
//! ```text
//! a_n^(i) = sum over allowed child tuples (t_1..t_d) of  a_{n-1}^(t_1) * ... * a_{n-1}^(t_d)
//! a_1^(i) = number of allowed child tuples under i
//! ```
//!
//! so level `n` of a trajectory corresponds to blocks of height `n + 1`.
//! Counts grow doubly exponentially; [`Snre::evaluate_exact`] works in
//! arbitrary precision under a digit budget, [`Snre::evaluate_log`] tracks
//! `b_n^(i) = ln a_n^(i)` with log-sum-exp and never overflows at the depths
//! used for entropy estimation.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::shift::{tuple_rank, TreeShiftSpec, TupleIter};

/// Default cap on decimal digits of any exact count.
pub const DEFAULT_DIGIT_BUDGET: u64 = 10_000_000;

/// A degree-`(d, k)` recursion: per-symbol child tuples plus initial counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Snre {
    arity: usize,
    terms: Vec<Vec<Vec<usize>>>,
    initial: Vec<u64>,
}

impl Snre {
    /// Checks that every row is nonempty, tuples have length `arity`, are in
    /// range, distinct and sorted, and that initial counts are positive.
    pub fn new(arity: usize, terms: Vec<Vec<Vec<usize>>>, initial: Vec<u64>) -> Result<Self> {
        let k = terms.len();
        if k == 0 {
            return Err(Error::InvalidSnre("no equations".into()));
        }
        if arity == 0 {
            return Err(Error::ZeroArity);
        }
        if initial.len() != k {
            return Err(Error::InvalidSnre(format!(
                "{} initial values for {k} equations",
                initial.len()
            )));
        }
        for (i, row) in terms.iter().enumerate() {
            if row.is_empty() {
                return Err(Error::InvalidSnre(format!("equation {i} has no terms")));
            }
            for t in row {
                if t.len() != arity || t.iter().any(|&s| s >= k) {
                    return Err(Error::InvalidSnre(format!(
                        "equation {i} has a malformed tuple {t:?}"
                    )));
                }
            }
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidSnre(format!(
                    "equation {i}: tuples must be distinct and sorted"
                )));
            }
        }
        if let Some(i) = initial.iter().position(|&v| v == 0) {
            return Err(Error::InvalidSnre(format!("initial value of {i} is zero")));
        }
        Ok(Snre {
            arity,
            terms,
            initial,
        })
    }

    /// The counting recursion of a tree-shift: `terms(i) = allowed(i)` and
    /// `initial(i) = |allowed(i)|`. The shift must already be pruned.
    pub fn from_spec(spec: &TreeShiftSpec) -> Result<Self> {
        if spec.allowed_table().iter().any(Vec::is_empty) {
            return Err(Error::EmptyShift);
        }
        let terms = spec.allowed_table().to_vec();
        let initial = terms.iter().map(|t| t.len() as u64).collect();
        Snre::new(spec.arity(), terms, initial)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn num_symbols(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self, i: usize) -> &[Vec<usize>] {
        &self.terms[i]
    }

    pub fn all_terms(&self) -> &[Vec<Vec<usize>>] {
        &self.terms
    }

    pub fn initial(&self) -> &[u64] {
        &self.initial
    }

    pub fn indicator_matrix(&self) -> IndicatorMatrix {
        let k = self.num_symbols();
        let columns = k.pow(self.arity as u32);
        let rows = self
            .terms
            .iter()
            .map(|row| {
                let mut bits = vec![0u8; columns];
                for t in row {
                    bits[tuple_rank(t, k)] = 1;
                }
                bits
            })
            .collect();
        IndicatorMatrix {
            arity: self.arity,
            rows,
        }
    }

    /// Exact counts `a_1..a_{n_max}` under the default digit budget.
    pub fn evaluate_exact(&self, n_max: usize) -> Result<ExactTrajectory> {
        self.evaluate_exact_with_budget(n_max, DEFAULT_DIGIT_BUDGET)
    }

    pub fn evaluate_exact_with_budget(
        &self,
        n_max: usize,
        digit_budget: u64,
    ) -> Result<ExactTrajectory> {
        if n_max < 1 {
            return Err(Error::LevelTooSmall { min: 1, got: n_max });
        }
        let mut levels: Vec<Vec<BigUint>> =
            vec![self.initial.iter().map(|&v| BigUint::from(v)).collect()];
        for level in 2..=n_max {
            let prev = levels.last().unwrap();
            // Bound the size of the next level before allocating it.
            let max_bits = prev.iter().map(BigUint::bits).max().unwrap_or(0);
            let max_terms = self.terms.iter().map(Vec::len).max().unwrap_or(1) as u64;
            let bits = (self.arity as u64)
                .saturating_mul(max_bits)
                .saturating_add(64 - max_terms.leading_zeros() as u64);
            let digits = (bits as f64 * std::f64::consts::LOG10_2).ceil() as u64;
            if digits > digit_budget {
                return Err(Error::DigitBudgetExceeded {
                    level,
                    digits,
                    budget: digit_budget,
                });
            }
            let next = self
                .terms
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|t| t.iter().map(|&s| &prev[s]).product::<BigUint>())
                        .sum()
                })
                .collect();
            levels.push(next);
        }
        Ok(ExactTrajectory { levels })
    }

    /// `b_n^(i) = ln a_n^(i)` for levels `1..=n_max`, via log-sum-exp.
    pub fn evaluate_log(&self, n_max: usize) -> Result<LogTrajectory> {
        if n_max < 1 {
            return Err(Error::LevelTooSmall { min: 1, got: n_max });
        }
        let mut levels: Vec<Vec<f64>> =
            vec![self.initial.iter().map(|&v| (v as f64).ln()).collect()];
        let mut scratch = Vec::new();
        for _ in 2..=n_max {
            let prev = levels.last().unwrap();
            let next = self
                .terms
                .iter()
                .map(|row| {
                    scratch.clear();
                    scratch.extend(row.iter().map(|t| t.iter().map(|&s| prev[s]).sum::<f64>()));
                    log_sum_exp(&scratch)
                })
                .collect();
            levels.push(next);
        }
        Ok(LogTrajectory { levels })
    }

    /// Direct entropy estimates `e_2..e_{n_max}`.
    pub fn entropy_estimate(&self, n_max: usize, variant: EstimateVariant) -> Result<EntropyEstimate> {
        if n_max < 2 {
            return Err(Error::LevelTooSmall { min: 2, got: n_max });
        }
        let traj = self.evaluate_log(n_max)?;
        let values = traj
            .levels
            .iter()
            .enumerate()
            .skip(1)
            .map(|(idx, b)| {
                let n = idx + 1;
                let growth = match variant {
                    EstimateVariant::SumLogs => b.iter().sum::<f64>(),
                    EstimateVariant::SumCounts => log_sum_exp(b),
                };
                // ln(max(S, 1)) / n; a degenerate system estimates to 0.
                (n, growth.max(1.0).ln() / n as f64)
            })
            .collect();
        let degenerate = traj.levels.last().unwrap().iter().all(|&b| b == 0.0);
        Ok(EntropyEstimate {
            variant,
            values,
            degenerate,
        })
    }

    /// Symbols whose counts eventually reach 2 or more.
    ///
    /// Seeds are symbols with `initial >= 2` or at least two terms; the set
    /// is closed under "some tuple of `terms(i)` mentions an essential symbol".
    pub fn essential_symbols(&self) -> Vec<usize> {
        let k = self.num_symbols();
        let mut parents: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (i, row) in self.terms.iter().enumerate() {
            for t in row {
                for &s in t {
                    parents[s].push(i);
                }
            }
        }
        let mut essential = vec![false; k];
        let mut stack: Vec<usize> = (0..k)
            .filter(|&i| self.initial[i] >= 2 || self.terms[i].len() >= 2)
            .collect();
        for &i in &stack {
            essential[i] = true;
        }
        while let Some(j) = stack.pop() {
            for &p in &parents[j] {
                if !essential[p] {
                    essential[p] = true;
                    stack.push(p);
                }
            }
        }
        (0..k).filter(|&i| essential[i]).collect()
    }
}

/// `k x k^d` 0/1 matrix; column `j` is the `j`-th child tuple in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndicatorMatrix {
    arity: usize,
    rows: Vec<Vec<u8>>,
}

impl IndicatorMatrix {
    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// Rebuild the recursion with the given initial values.
    pub fn to_snre(&self, initial: Vec<u64>) -> Result<Snre> {
        let k = self.rows.len();
        let tuples: Vec<Vec<usize>> = TupleIter::new(k, self.arity).collect();
        let terms = self
            .rows
            .iter()
            .map(|bits| {
                bits.iter()
                    .zip(&tuples)
                    .filter(|(&b, _)| b == 1)
                    .map(|(_, t)| t.clone())
                    .collect()
            })
            .collect();
        Snre::new(self.arity, terms, initial)
    }
}

/// Exact counts; `levels[n - 1][i] = a_n^(i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactTrajectory {
    pub levels: Vec<Vec<BigUint>>,
}

impl ExactTrajectory {
    pub fn level(&self, n: usize) -> &[BigUint] {
        &self.levels[n - 1]
    }

    /// Natural logs of the exact counts, accurate for arbitrarily large values.
    pub fn ln_level(&self, n: usize) -> Vec<f64> {
        self.level(n).iter().map(ln_biguint).collect()
    }
}

/// Log-domain counts; `levels[n - 1][i] = ln a_n^(i)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogTrajectory {
    pub levels: Vec<Vec<f64>>,
}

impl LogTrajectory {
    pub fn level(&self, n: usize) -> &[f64] {
        &self.levels[n - 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateVariant {
    /// `ln(sum_i ln a_n^(i)) / n`
    SumLogs,
    /// `ln(ln sum_i a_n^(i)) / n`
    SumCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub variant: EstimateVariant,
    /// `(n, e_n)` for `n = 2..=n_max`.
    pub values: Vec<(usize, f64)>,
    /// Every count is 1 at the last level, so the estimate is 0 by convention.
    pub degenerate: bool,
}

impl EntropyEstimate {
    pub fn tail(&self) -> f64 {
        self.values.last().map(|&(_, e)| e).unwrap_or(0.0)
    }
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
}

pub(crate) fn ln_biguint(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
