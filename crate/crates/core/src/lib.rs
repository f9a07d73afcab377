//! Generic learned sorted-set dictionaries.
//!
//! A *generic model* partitions the key universe into intervals and routes a
//! query to exactly one of them; its *learned version* attaches an ordinary
//! sorted-set dictionary to every interval and delegates the final search.
//! Two models are provided, equal-width [`binning`] with constant-time
//! routing and ε-bounded piecewise-linear [`segments`] with logarithmic
//! routing. Any of the seven layouts in [`dict`] can serve as the final
//! stage.
//!
//! ```
//! use learned_dict::{binning, dict::EytzingerLayout, DictParams, SearchOutcome};
//!
//! let keys = [47, 105, 140, 289, 316, 358, 386, 398, 819, 939];
//! let d = binning::build::<EytzingerLayout>(&keys, 4, &DictParams::default()).unwrap();
//! assert_eq!(d.query(316), SearchOutcome::new(4, true));
//! assert_eq!(d.query(700), SearchOutcome::new(8, false));
//! ```
//!
//! The [`dynamic`] module adds updates with amortized rebuilding, [`forest`]
//! computes entropy-bounded search forests for known access distributions,
//! and [`bench`] drives the timing experiments behind the `ldict` binary.

pub mod access;
pub mod bench;
pub mod binning;
pub mod dict;
pub mod dynamic;
pub mod error;
pub mod exec;
pub mod forest;
pub mod keys;
pub mod model;
pub mod segments;
pub mod workloads;

pub use access::AccessDistribution;
pub use dict::{DictKind, DictParams, DynamicDictionary, SortedDictionary, StaticDictionary};
pub use error::{Error, Result};
pub use exec::Execution;
pub use keys::{gap_stats, oracle_rank_search, GapStats, SearchOutcome, SortedKeySet};
pub use model::{GenericModel, LearnedDictionary, Route};
