//! Tree-shifts with a prescribed entropy.
//!
//! Given a nonnegative integer `k x k` matrix `M`, with `d` its largest row
//! sum, pad every row to sum `d` with an extra column and append the row
//! `(0, ..., 0, d)`. Call the result `V`. Over symbols `a1..a(k+1)`, each
//! `ai` with `i <= k` may have the children dictated by row `i` of `V`, or
//! `d` copies of `a(k+1)`; `a(k+1)` only has copies of itself. The
//! resulting tree-shift has entropy `ln rho(M)`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{self, IntMatrix, PerronAnalysis};
use crate::reduction::{tsft_entropy, EntropyOptions, EntropyReport};
use crate::shift::{Alphabet, Pattern2, TreeShiftSpec};
use crate::snre::Snre;

/// `(d, V)` for `M`.
pub fn extend_matrix(m: &IntMatrix) -> Result<(u64, IntMatrix)> {
    let k = m.dim();
    if k == 0 {
        return Err(Error::InvalidMatrix("matrix is empty".into()));
    }
    let d = m.max_row_sum();
    if d == 0 {
        return Err(Error::InvalidMatrix("zero matrix has no positive row sum".into()));
    }
    let mut v = IntMatrix::zeros(k + 1);
    for i in 0..k {
        for j in 0..k {
            v.set(i, j, m.get(i, j));
        }
        v.set(i, k, d - m.row_sum(i));
    }
    v.set(k, k, d);
    Ok((d, v))
}

/// Children of row `i` of `V`, in ascending symbol order.
fn row_tuple(v: &IntMatrix, i: usize) -> Vec<usize> {
    (0..v.dim())
        .flat_map(|j| std::iter::repeat(j).take(v.get(i, j) as usize))
        .collect()
}

/// The allowed set: the `V` tuple and the all-`a(k+1)` tuple under each
/// `ai`, and the all-`a(k+1)` tuple under `a(k+1)`.
fn allowed_set(v: &IntMatrix, d: usize) -> Vec<Pattern2> {
    let last = v.dim() - 1;
    let filler = vec![last; d];
    let mut set = BTreeSet::new();
    for i in 0..last {
        set.insert(Pattern2::new(i, row_tuple(v, i)));
        set.insert(Pattern2::new(i, filler.clone()));
    }
    set.insert(Pattern2::new(last, filler));
    set.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealizationPlan {
    pub input: IntMatrix,
    pub arity: u64,
    pub extended: IntMatrix,
    pub snre: Snre,
    /// Allowed patterns as `[root, [children...]]` with symbol names.
    pub allowed: Vec<(String, Vec<String>)>,
    pub expected_radius: f64,
    pub expected_entropy: f64,
    /// Period of the dominant component and whether `rho^p` passes the Perron test.
    pub perron: Option<PerronAnalysis>,
    /// Rows of `M` that are zero; each collapses two allowed patterns into one.
    pub zero_rows: Vec<usize>,
    /// `a(k+1)` is repeated `V(i, k+1)` times in the tuple of row `i`.
    pub exponent_convention: &'static str,
}

/// `F` read off the synthesized tree-shift.
pub fn realize_snre(m: &IntMatrix) -> Result<Snre> {
    let (spec, _) = realize_tsft(m)?;
    Snre::from_spec(&spec)
}

pub fn realize_tsft(m: &IntMatrix) -> Result<(TreeShiftSpec, RealizationPlan)> {
    let (d, v) = extend_matrix(m)?;
    if d > 64 {
        return Err(Error::InvalidMatrix(format!("row sum {d} is too large")));
    }
    let k = m.dim();
    let alphabet = Alphabet::numbered(k + 1)?;
    let patterns = allowed_set(&v, d as usize);
    let named = patterns
        .iter()
        .map(|p| {
            (
                alphabet.name(p.root).to_string(),
                p.children.iter().map(|&c| alphabet.name(c).to_string()).collect(),
            )
        })
        .collect();
    let spec = TreeShiftSpec::from_allowed(alphabet, d as usize, patterns)?;
    let snre = Snre::from_spec(&spec)?;
    let rho = matrix::spectral_radius(m)?;
    let plan = RealizationPlan {
        input: m.clone(),
        arity: d,
        extended: v,
        snre,
        allowed: named,
        expected_radius: rho,
        expected_entropy: if rho > 1.0 { rho.ln() } else { 0.0 },
        perron: matrix::perron_analysis(m).ok(),
        zero_rows: (0..k).filter(|&i| m.row_sum(i) == 0).collect(),
        exponent_convention: "V(i,k+1)",
    };
    Ok((spec, plan))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub tolerance: f64,
    pub entropy: EntropyOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            tolerance: 1e-6,
            entropy: EntropyOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealizationReport {
    pub passed: bool,
    pub entropy: f64,
    pub expected: f64,
    pub error: f64,
    pub tolerance: f64,
    /// The first `k` rows and columns of the witness matrix equal `M`.
    pub block_matches: bool,
    pub estimator_tail: f64,
    pub estimator_agreement: bool,
    pub plan: RealizationPlan,
    pub entropy_report: EntropyReport,
}

pub fn verify_realization(m: &IntMatrix, options: &VerifyOptions) -> Result<RealizationReport> {
    let (_, plan) = realize_tsft(m)?;
    let report = tsft_entropy(&plan.snre, &options.entropy)?;
    let k = m.dim();
    let indices: Vec<usize> = (0..k).collect();
    let block_matches = report.witness_matrix.submatrix(&indices) == *m;
    let error = (report.entropy - plan.expected_entropy).abs();
    Ok(RealizationReport {
        passed: error <= options.tolerance && block_matches,
        entropy: report.entropy,
        expected: plan.expected_entropy,
        error,
        tolerance: options.tolerance,
        block_matches,
        estimator_tail: report.estimator_tail,
        estimator_agreement: report.agreement,
        plan,
        entropy_report: report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: Vec<Vec<i64>>) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    fn branching_m() -> IntMatrix {
        mat(vec![vec![1, 1, 0], vec![0, 0, 1], vec![2, 1, 0]])
    }

    #[test]
    fn extends_branching_matrix() {
        let (d, v) = extend_matrix(&branching_m()).unwrap();
        assert_eq!(d, 3);
        assert_eq!(
            v,
            mat(vec![
                vec![1, 1, 0, 1],
                vec![0, 0, 1, 2],
                vec![2, 1, 0, 0],
                vec![0, 0, 0, 3]
            ])
        );
    }

    #[test]
    fn extends_small_matrices() {
        assert_eq!(extend_matrix(&mat(vec![vec![2]])).unwrap(), (2, mat(vec![vec![2, 0], vec![0, 2]])));
        let (d, v) = extend_matrix(&mat(vec![vec![1, 1], vec![1, 0]])).unwrap();
        assert_eq!(d, 2);
        assert_eq!(v, mat(vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 0, 2]]));
        assert!(extend_matrix(&mat(vec![vec![0, 0], vec![0, 0]])).is_err());
    }

    #[test]
    fn branching_snre() {
        let f = realize_snre(&branching_m()).unwrap();
        assert_eq!(f.initial(), &[2, 2, 2, 1]);
        assert_eq!(f.terms(0), &[vec![0, 1, 3], vec![3, 3, 3]]);
        assert_eq!(f.terms(1), &[vec![2, 3, 3], vec![3, 3, 3]]);
        assert_eq!(f.terms(2), &[vec![0, 0, 1], vec![3, 3, 3]]);
        assert_eq!(f.terms(3), &[vec![3, 3, 3]]);
        let g = realize_snre(&mat(vec![vec![2]])).unwrap();
        assert_eq!(g.terms(0), &[vec![0, 0], vec![1, 1]]);
        assert_eq!(g.terms(1), &[vec![1, 1]]);
        assert_eq!(g.initial(), &[2, 1]);
    }

    #[test]
    fn branching_allowed_set() {
        let (spec, plan) = realize_tsft(&branching_m()).unwrap();
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let expected = vec![
            ("a1".to_string(), s(&["a1", "a2", "a4"])),
            ("a1".to_string(), s(&["a4", "a4", "a4"])),
            ("a2".to_string(), s(&["a3", "a4", "a4"])),
            ("a2".to_string(), s(&["a4", "a4", "a4"])),
            ("a3".to_string(), s(&["a1", "a1", "a2"])),
            ("a3".to_string(), s(&["a4", "a4", "a4"])),
            ("a4".to_string(), s(&["a4", "a4", "a4"])),
        ];
        assert_eq!(plan.allowed, expected);
        assert_eq!(spec.allowed_patterns().count(), 7);
        assert_eq!(spec.forbidden_patterns().len(), 4 * 64 - 7);
        assert!(plan.zero_rows.is_empty());
    }

    #[test]
    fn zero_row_collapses() {
        let (spec, plan) = realize_tsft(&mat(vec![vec![2, 0], vec![0, 0]])).unwrap();
        assert_eq!(plan.zero_rows, vec![1]);
        assert_eq!(spec.allowed_patterns().count(), 4);
    }

    #[test]
    fn verifies_examples() {
        let opts = VerifyOptions::default();
        let r = verify_realization(&branching_m(), &opts).unwrap();
        assert!(r.passed && r.block_matches && r.estimator_agreement);
        assert!((r.entropy - 1.839_286_755_214_161_f64.ln()).abs() < 1e-9);
        let golden = verify_realization(&mat(vec![vec![1, 1], vec![1, 0]]), &opts).unwrap();
        assert!(golden.passed);
        assert!((golden.entropy - 0.481_211_825_1).abs() < 1e-9);
        let two = verify_realization(&mat(vec![vec![2]]), &opts).unwrap();
        assert!(two.passed);
        assert!((two.entropy - 2f64.ln()).abs() < 1e-12);
    }
}
