//! Saving symbols and the effect of removing a single allowed pattern.
//!
//! A symbol `a` is *saving* when every allowed pattern rooted at another
//! symbol has `a` among its children. If every symbol of `X` is essential,
//! `h(X) = ln d`. Removing one allowed pattern to obtain `Y` then lowers the
//! entropy exactly when some saving symbol of `X` becomes inessential in `Y`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::reduction::{tsft_entropy, EntropyOptions};
use crate::shift::{Pattern2, TreeShiftSpec};
use crate::snre::Snre;

/// Entropies closer than this count as equal when deciding a strict drop.
pub const DROP_TOLERANCE: f64 = 1e-6;
pub const LN_D_TOLERANCE: f64 = 1e-9;

pub fn saving_symbols(spec: &TreeShiftSpec) -> Vec<usize> {
    (0..spec.num_symbols())
        .filter(|&a| {
            (0..spec.num_symbols())
                .filter(|&root| root != a)
                .all(|root| spec.allowed(root).iter().all(|t| t.contains(&a)))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullEntropyCheck {
    pub all_essential: bool,
    pub entropy: f64,
    pub ln_d: f64,
    pub equals_ln_d: bool,
    /// `all_essential` implies `equals_ln_d`.
    pub implication_holds: bool,
}

pub fn full_entropy_check(spec: &TreeShiftSpec, options: &EntropyOptions) -> Result<FullEntropyCheck> {
    let snre = Snre::from_spec(spec)?;
    let all_essential = snre.essential_symbols().len() == spec.num_symbols();
    let entropy = tsft_entropy(&snre, options)?.entropy;
    let ln_d = (spec.arity() as f64).ln();
    let equals_ln_d = (entropy - ln_d).abs() <= LN_D_TOLERANCE;
    Ok(FullEntropyCheck {
        all_essential,
        entropy,
        ln_d,
        equals_ln_d,
        implication_holds: !all_essential || equals_ln_d,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MinimalityVerdict {
    Consistent,
    Inconsistent,
    OutOfHypothesis,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimalityReport {
    pub removed: String,
    pub h_x: f64,
    pub h_y: f64,
    pub saving_symbols: Vec<String>,
    pub inessential_in_y: Vec<String>,
    /// Symbols of `X` removed when `Y` is pruned.
    pub dead_in_y: Vec<String>,
    pub h1: bool,
    pub h2: bool,
    /// The two readings of H2 (survives pruning, occurs in an allowed
    /// pattern of `Y`) disagree.
    pub h2_readings_differ: bool,
    pub x_all_essential: bool,
    pub predicted_drop: bool,
    pub observed_drop: bool,
    pub consistent: bool,
    pub verdict: MinimalityVerdict,
    /// `h_y <= ln(d - 1)`; only checked when a drop is predicted.
    pub drop_bound_holds: Option<bool>,
}

pub fn entropy_drop_analysis(
    x: &TreeShiftSpec,
    pattern: &Pattern2,
    options: &EntropyOptions,
) -> Result<MinimalityReport> {
    if !x.is_allowed(pattern) {
        return Err(Error::PatternNotAllowed);
    }
    let names = x.alphabet();
    let k = x.num_symbols();
    let d = x.arity();
    let snre_x = Snre::from_spec(x)?;
    let x_all_essential = snre_x.essential_symbols().len() == k;
    let h_x = tsft_entropy(&snre_x, options)?.entropy;
    let saving = saving_symbols(x);

    let y = x.without_pattern(pattern)?;
    let mut occurs = vec![false; k];
    for p in y.allowed_patterns() {
        occurs[p.root] = true;
        for &c in &p.children {
            occurs[c] = true;
        }
    }
    let (h_y, survivors, inessential) = match y.prune_dead_symbols() {
        Ok((pruned, _)) => {
            let snre_y = Snre::from_spec(&pruned)?;
            let essential = snre_y.essential_symbols();
            let survivors: Vec<usize> = pruned
                .alphabet()
                .symbols()
                .iter()
                .map(|s| names.position(s).unwrap())
                .collect();
            let inessential: Vec<usize> = (0..pruned.num_symbols())
                .filter(|i| !essential.contains(i))
                .map(|i| survivors[i])
                .collect();
            (tsft_entropy(&snre_y, options)?.entropy, survivors, inessential)
        }
        Err(Error::EmptyShift) => (0.0, Vec::new(), Vec::new()),
        Err(e) => return Err(e),
    };
    let survives = |i: usize| survivors.contains(&i);
    let dead: Vec<usize> = (0..k).filter(|&i| !survives(i)).collect();
    let h2 = (0..k).all(|i| survives(i) && occurs[i]);
    let h2_readings_differ = (0..k).all(|i| survives(i)) != (0..k).all(|i| occurs[i]);

    let predicted_drop = saving
        .iter()
        .any(|a| inessential.contains(a) || dead.contains(a));
    let observed_drop = h_x - h_y > DROP_TOLERANCE;
    let consistent = predicted_drop == observed_drop;
    let in_hypothesis = h2 && !saving.is_empty() && x_all_essential && d >= 2;
    let verdict = match (in_hypothesis, consistent) {
        (false, _) => MinimalityVerdict::OutOfHypothesis,
        (true, true) => MinimalityVerdict::Consistent,
        (true, false) => MinimalityVerdict::Inconsistent,
    };
    let drop_bound_holds = predicted_drop.then(|| {
        let bound = if d > 2 { ((d - 1) as f64).ln() } else { 0.0 };
        h_y <= bound + LN_D_TOLERANCE
    });
    let label = |v: &[usize]| v.iter().map(|&i| names.name(i).to_string()).collect();
    Ok(MinimalityReport {
        removed: x.display_pattern(pattern),
        h_x,
        h_y,
        saving_symbols: label(&saving),
        inessential_in_y: label(&inessential),
        dead_in_y: label(&dead),
        h1: true,
        h2,
        h2_readings_differ,
        x_all_essential,
        predicted_drop,
        observed_drop,
        consistent,
        verdict,
        drop_bound_holds,
    })
}

/// [`entropy_drop_analysis`] for every allowed pattern of `x`, in pattern order.
pub fn scan(x: &TreeShiftSpec, options: &EntropyOptions) -> Result<Vec<MinimalityReport>> {
    let patterns: Vec<Pattern2> = x.allowed_patterns().collect();
    patterns
        .par_iter()
        .map(|p| entropy_drop_analysis(x, p, options))
        .collect()
}
