//! Topological entropy of Markov tree-shifts of finite type.
//!
//! A tree-shift is given by the height-2 patterns allowed on the `d`-ary
//! tree. Its block counts obey a system of nonlinear recursions; choosing one
//! term per equation gives a linear system whose growth rate is a spectral
//! radius, and the entropy is the largest such rate.
//!
//! ```
//! use treeshift::{tsft_entropy, EntropyOptions, Snre, TreeShiftSpec};
//!
//! let spec = TreeShiftSpec::parse(
//!     r#"{"d": 2, "alphabet": ["a", "b"],
//!         "allowed": [["a", ["a", "a"]], ["a", ["b", "b"]],
//!                     ["b", ["a", "b"]], ["b", ["b", "a"]]]}"#,
//! ).unwrap();
//! let report = tsft_entropy(&Snre::from_spec(&spec).unwrap(), &EntropyOptions::default()).unwrap();
//! assert!((report.entropy - 2f64.ln()).abs() < 1e-12);
//! ```

#![forbid(unsafe_code)]

pub mod error;
pub mod matrix;
pub mod minimality;
pub mod oracle;
pub mod poly;
pub mod realization;
pub mod reduction;
pub mod shift;
pub mod snre;

pub use error::{Error, Result};
pub use matrix::{perron_analysis, period, scc_decompose, spectral_radius, IntMatrix, PerronAnalysis, PerronVerdict};
pub use minimality::{entropy_drop_analysis, full_entropy_check, saving_symbols, MinimalityReport, MinimalityVerdict};
pub use oracle::{brute_force_count, BlockCounts};
pub use poly::char_poly;
pub use realization::{extend_matrix, realize_snre, realize_tsft, verify_realization, RealizationPlan, VerifyOptions};
pub use reduction::{tsft_entropy, EntropyOptions, EntropyReport, ReducedSnre, ReductionSpace};
pub use shift::{Alphabet, Pattern2, PatternList, TreeShiftSpec};
pub use snre::{EntropyEstimate, EstimateVariant, Snre};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/specs.md")]
    mod specs {}
    #[doc = include_str!("../../../book/src/counting.md")]
    mod counting {}
    #[doc = include_str!("../../../book/src/reductions.md")]
    mod reductions {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/realization.md")]
    mod realization {}
    #[doc = include_str!("../../../book/src/minimality.md")]
    mod minimality {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
