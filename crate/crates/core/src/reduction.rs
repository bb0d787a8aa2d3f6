//! Reduced systems and the entropy of a tree-shift as a maximum over them.
//!
//! A reduction keeps exactly one child tuple per equation and the original
//! initial counts. Its log-counts evolve linearly, `b_n = M b_{n-1}`, where
//! `M` is the weighted adjacency matrix (entry `(i, j)` is how often `j`
//! occurs in the tuple kept for `i`). Growth is only seen on symbols that can
//! reach a positive entry of `b_1`, i.e. a symbol with initial count at least
//! 2, so the entropy of a reduction is `ln` of its *effective* spectral
//! radius: the largest radius among strongly connected components with a
//! path into that support.
//!
//! The entropy of the tree-shift is the maximum over all reductions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{self, IntMatrix, PerronAnalysis};
use crate::poly;
use crate::snre::{EstimateVariant, Snre};

/// One tuple per equation, borrowed from a base system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedSnre<'a> {
    base: &'a Snre,
    choice: Vec<usize>,
}

impl<'a> ReducedSnre<'a> {
    /// `choice[i]` indexes into `base.terms(i)`.
    pub fn new(base: &'a Snre, choice: Vec<usize>) -> Result<Self> {
        if choice.len() != base.num_symbols() {
            return Err(Error::InvalidSnre(format!(
                "choice has {} entries for {} equations",
                choice.len(),
                base.num_symbols()
            )));
        }
        for (i, &c) in choice.iter().enumerate() {
            if c >= base.terms(i).len() {
                return Err(Error::InvalidSnre(format!(
                    "choice {c} out of range for equation {i}"
                )));
            }
        }
        Ok(ReducedSnre { base, choice })
    }

    pub fn base(&self) -> &'a Snre {
        self.base
    }

    pub fn choice(&self) -> &[usize] {
        &self.choice
    }

    pub fn tuple(&self, i: usize) -> &'a [usize] {
        &self.base.terms(i)[self.choice[i]]
    }

    pub fn tuples(&self) -> Vec<Vec<usize>> {
        (0..self.choice.len()).map(|i| self.tuple(i).to_vec()).collect()
    }

    pub fn initial(&self) -> &'a [u64] {
        self.base.initial()
    }

    /// The reduction as a stand-alone system (one term per row, same initial values).
    pub fn to_snre(&self) -> Snre {
        Snre::new(
            self.base.arity(),
            self.tuples().into_iter().map(|t| vec![t]).collect(),
            self.initial().to_vec(),
        )
        .expect("a reduction of a valid system is valid")
    }

    pub fn weighted_adjacency(&self) -> IntMatrix {
        let k = self.choice.len();
        let mut m = IntMatrix::zeros(k);
        for i in 0..k {
            for &j in self.tuple(i) {
                m.set(i, j, m.get(i, j) + 1);
            }
        }
        m
    }

    /// Symbols with initial count at least 2.
    pub fn support(&self) -> Vec<usize> {
        self.initial()
            .iter()
            .enumerate()
            .filter(|(_, &v)| v >= 2)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn entropy(&self) -> Result<ReducedEntropy> {
        reduced_entropy_of(&self.weighted_adjacency(), &self.support())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedEntropy {
    /// `ln` of the effective radius, or 0 when it is at most 1.
    pub value: f64,
    pub effective_radius: f64,
    /// `rho(M)` with no support restriction.
    pub raw_radius: f64,
}

/// Entropy of a reduced system given its weighted adjacency matrix and the
/// symbols whose initial count is at least 2.
pub fn reduced_entropy_of(m: &IntMatrix, support: &[usize]) -> Result<ReducedEntropy> {
    let reach = m.can_reach(support);
    let cond = matrix::scc_decompose(m);
    let mut effective: f64 = 0.0;
    let mut raw: f64 = 0.0;
    for (_, comp) in cond.nontrivial() {
        let rho = matrix::component_spectral_radius(m, &comp.vertices)?;
        raw = raw.max(rho);
        // A component reaches the support iff any (hence every) vertex does.
        if reach[comp.vertices[0]] {
            effective = effective.max(rho);
        }
    }
    let value = if effective > 1.0 { effective.ln() } else { 0.0 };
    Ok(ReducedEntropy {
        value,
        effective_radius: effective,
        raw_radius: raw,
    })
}

/// All reductions of a system in lexicographic choice order (first equation
/// most significant). Random access by index makes the stream restartable
/// and easy to split into chunks.
#[derive(Debug, Clone)]
pub struct ReductionSpace<'a> {
    snre: &'a Snre,
    radices: Vec<usize>,
}

impl<'a> ReductionSpace<'a> {
    pub fn new(snre: &'a Snre) -> Self {
        let radices = snre.all_terms().iter().map(Vec::len).collect();
        ReductionSpace { snre, radices }
    }

    /// `prod_i |terms(i)|`, or `None` if it does not fit in a `u128`.
    pub fn count(&self) -> Option<u128> {
        self.radices
            .iter()
            .try_fold(1u128, |acc, &r| acc.checked_mul(r as u128))
    }

    /// The `index`-th reduction in lexicographic order.
    pub fn get(&self, index: u128) -> Option<ReducedSnre<'a>> {
        if index >= self.count()? {
            return None;
        }
        let mut rest = index;
        let mut choice = vec![0; self.radices.len()];
        for (i, &r) in self.radices.iter().enumerate().rev() {
            choice[i] = (rest % r as u128) as usize;
            rest /= r as u128;
        }
        Some(ReducedSnre {
            base: self.snre,
            choice,
        })
    }

    /// Position of a reduction in the lexicographic order, if it fits in a `u128`.
    pub fn index_of(&self, reduced: &ReducedSnre<'_>) -> Option<u128> {
        reduced
            .choice
            .iter()
            .zip(&self.radices)
            .try_fold(0u128, |acc, (&c, &r)| acc.checked_mul(r as u128)?.checked_add(c as u128))
    }

    pub fn iter(&self) -> Reductions<'a> {
        self.iter_from(0)
    }

    /// Iterate starting at `start`.
    pub fn iter_from(&self, start: u128) -> Reductions<'a> {
        Reductions {
            snre: self.snre,
            radices: self.radices.clone(),
            next: self.get(start).map(|r| r.choice),
        }
    }
}

/// Odometer over choice vectors.
#[derive(Debug, Clone)]
pub struct Reductions<'a> {
    snre: &'a Snre,
    radices: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl<'a> Iterator for Reductions<'a> {
    type Item = ReducedSnre<'a>;

    fn next(&mut self) -> Option<ReducedSnre<'a>> {
        let choice = self.next.take()?;
        let mut succ = choice.clone();
        let mut pos = succ.len();
        let mut done = true;
        while pos > 0 {
            pos -= 1;
            succ[pos] += 1;
            if succ[pos] < self.radices[pos] {
                done = false;
                break;
            }
            succ[pos] = 0;
        }
        if !done {
            self.next = Some(succ);
        }
        Some(ReducedSnre {
            base: self.snre,
            choice,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyOptions {
    /// Depth of the direct estimator.
    pub estimator_levels: usize,
    /// Allowed gap between spectral entropy and the estimator tail.
    pub tolerance: f64,
    /// Largest number of reductions evaluated exhaustively.
    pub reduction_cap: u64,
    /// Past the cap, evaluate `reduction_cap` sampled reductions instead of failing.
    pub sample_beyond_cap: bool,
    pub sample_seed: u64,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        EntropyOptions {
            estimator_levels: 40,
            tolerance: 0.05,
            reduction_cap: 1_000_000,
            sample_beyond_cap: true,
            sample_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub index: String,
    pub choice: Vec<usize>,
    pub tuples: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    /// Natural-log entropy attained by the witness.
    pub entropy: f64,
    pub witness: Witness,
    pub witness_matrix: IntMatrix,
    pub effective_radius: f64,
    /// Largest unrestricted `rho(M_E)` over the evaluated reductions.
    pub raw_radius_max: f64,
    /// The raw maximum differs from the effective one.
    pub raw_radius_diverges: bool,
    /// `det(xI - M)` of the witness matrix, leading coefficient first.
    pub char_poly: Vec<BigIntString>,
    pub char_poly_text: String,
    /// Symbols of the witness that can reach its support.
    pub essential_support: Vec<usize>,
    /// Perron analysis of the witness restricted to `essential_support`.
    pub perron: Option<PerronAnalysis>,
    pub estimator_levels: usize,
    pub estimator_tail: f64,
    pub estimator_degenerate: bool,
    pub tolerance: f64,
    pub agreement: bool,
    /// All reductions were evaluated; otherwise `entropy` is a lower bound.
    pub exhaustive: bool,
    pub reductions_total: String,
    pub reductions_evaluated: u64,
}

/// Integer rendered as a decimal string for lossless serialization.
pub type BigIntString = String;

#[derive(Debug, Clone)]
struct Best {
    value: f64,
    effective: f64,
    raw: f64,
    choice: Vec<usize>,
}

impl Best {
    /// Larger value wins; near-ties go to the lexicographically smaller choice.
    fn merge(self, other: Best) -> Best {
        let raw = self.raw.max(other.raw);
        let pick = if (self.value - other.value).abs() <= 1e-12 {
            if self.choice <= other.choice {
                self
            } else {
                other
            }
        } else if self.value > other.value {
            self
        } else {
            other
        };
        Best { raw, ..pick }
    }
}

fn fold_best(results: impl IntoIterator<Item = Result<Best>>) -> Result<Best> {
    let mut best: Option<Best> = None;
    for b in results {
        let b = b?;
        best = Some(match best {
            Some(cur) => cur.merge(b),
            None => b,
        });
    }
    Ok(best.expect("at least one reduction is evaluated"))
}

const CHUNK: u128 = 2048;

/// Entropy of the tree-shift whose counting recursion is `snre`.
pub fn tsft_entropy(snre: &Snre, options: &EntropyOptions) -> Result<EntropyReport> {
    let space = ReductionSpace::new(snre);
    let total = space.count();
    let cap = options.reduction_cap.max(1) as u128;
    let exhaustive = total.is_some_and(|t| t <= cap);
    let total_text = total.map_or_else(|| ">2^128".to_string(), |t| t.to_string());

    let evaluate = |reduced: ReducedSnre<'_>| -> Result<Best> {
        let e = reduced.entropy()?;
        Ok(Best {
            value: e.value,
            effective: e.effective_radius,
            raw: e.raw_radius,
            choice: reduced.choice,
        })
    };

    let (best, evaluated) = if exhaustive {
        let total = total.unwrap();
        let chunks = total.div_ceil(CHUNK);
        let per_chunk: Vec<Result<Best>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let start = c * CHUNK;
                let len = CHUNK.min(total - start) as usize;
                fold_best(space.iter_from(start).take(len).map(evaluate))
            })
            .collect();
        (fold_best(per_chunk)?, total as u64)
    } else {
        if !options.sample_beyond_cap {
            return Err(Error::ReductionBudgetExceeded {
                count: total_text,
                cap: options.reduction_cap,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(options.sample_seed);
        let radices: Vec<usize> = snre.all_terms().iter().map(Vec::len).collect();
        let mut choices: Vec<Vec<usize>> = vec![vec![0; radices.len()]];
        while (choices.len() as u128) < cap {
            choices.push(radices.iter().map(|&r| rng.gen_range(0..r)).collect());
        }
        let results: Vec<Result<Best>> = choices
            .into_par_iter()
            .map(|choice| evaluate(ReducedSnre::new(snre, choice)?))
            .collect();
        (fold_best(results)?, cap as u64)
    };

    let witness = ReducedSnre::new(snre, best.choice.clone())?;
    let witness_matrix = witness.weighted_adjacency();
    let char_poly = poly::char_poly(&witness_matrix).ok();
    let reach = witness_matrix.can_reach(&witness.support());
    let essential_support: Vec<usize> = (0..reach.len()).filter(|&i| reach[i]).collect();
    let perron = if essential_support.is_empty() {
        None
    } else {
        matrix::perron_analysis(&witness_matrix.submatrix(&essential_support)).ok()
    };

    let estimate = snre.entropy_estimate(options.estimator_levels.max(2), EstimateVariant::SumLogs)?;
    let estimator_tail = estimate.tail();

    Ok(EntropyReport {
        entropy: best.value,
        witness: Witness {
            index: space.index_of(&witness).map_or_else(String::new, |i| i.to_string()),
            choice: witness.choice().to_vec(),
            tuples: witness.tuples(),
        },
        witness_matrix,
        effective_radius: best.effective,
        raw_radius_max: best.raw,
        raw_radius_diverges: (best.raw - best.effective.max(1.0)).abs() > 1e-9 && best.raw > 1.0,
        char_poly_text: char_poly
            .as_deref()
            .map(poly::format_poly)
            .unwrap_or_default(),
        char_poly: char_poly
            .unwrap_or_default()
            .iter()
            .map(ToString::to_string)
            .collect(),
        essential_support,
        perron,
        estimator_levels: options.estimator_levels.max(2),
        estimator_tail,
        estimator_degenerate: estimate.degenerate,
        tolerance: options.tolerance,
        agreement: (best.value - estimator_tail).abs() <= options.tolerance,
        exhaustive,
        reductions_total: total_text,
        reductions_evaluated: evaluated,
    })
}
