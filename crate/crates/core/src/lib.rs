//! Certified intervals for the topological entropy of Lorenz maps.
//!
//! The entropy of a Lorenz map `T` is bracketed by comparing its critical
//! itineraries with those of uniform maps `U±_{a,p}` of known entropy `ln a`
//! and bisecting on `a`.
//!
//! ```
//! use lorenz_entropy::{estimate_entropy, AdmissiblePair, LorenzMapSpec};
//!
//! let spec = LorenzMapSpec::uniform(AdmissiblePair::new(2f64.sqrt(), 0.5).unwrap());
//! let r = estimate_entropy(&spec, 1e-6, 100).unwrap();
//! assert!(r.contains_log(2f64.sqrt().ln()));
//! ```

pub mod cli;
pub mod engine;
pub mod error;
pub mod kneading;
pub mod map_model;
pub mod oracles;
pub mod precise;
pub mod symbolic;

pub use engine::{entropy_bracket_invariant_check, estimate_entropy, Branch, EntropyResult, TraceStep};
pub use error::{Error, Result};
pub use kneading::{
    check_embedding, count_words, critical_itineraries, entropy_estimate_wordcount, hs_member, kneading_compare,
    uniform_critical_itinerary, CriticalItineraries, EmbeddingCheck, EmbeddingStatus, KneadingComparison, Membership,
};
pub use map_model::{
    eval_map, eval_uniform, itinerary, parse_expression, validate_lorenz, AdmissiblePair, IntervalMap, LorenzMapSpec,
    MapExpression, Orientation, ValidationReport,
};
pub use oracles::{build_markov, parry_reference, spectral_radius, MarkovPartitionModel};
pub use symbolic::{coding_map, lex_compare, metric_d, shift, SymbolWord, WordOrder};
