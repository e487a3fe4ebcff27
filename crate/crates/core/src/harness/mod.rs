//! Prime-range scans of the lemma suites, the on-disk class-number memo and
//! text rendering of results.

pub mod cache;
pub mod report;
pub mod scan;

pub use cache::{cache_load, cache_store, CacheEntry, ClassCache, LoadStats};
pub use report::{Format, Render};
pub use scan::{admissible_pairs, run_scan, run_scan_with_cache, CheckCount, Failure, Lemma, LemmaReport};
