//! Exact runs statistics for spotting batches of stuffed ballots in
//! vote-counting transcripts.
//!
//! A transcript (the ballots in the order they were announced) is projected
//! onto binary flag sequences, one per candidate plus two group rules over
//! the precinct leaders. For each sequence the crate computes:
//!
//! * `α0`, `α1`: the chance that runs of non-votes / votes at least as long
//!   as the observed longest ones appear in an honest IID sequence;
//! * `ᾶ`: the chance of no more runs than observed;
//! * `α̌`: a χ² check that the vote rate is steady along the count.
//!
//! Per-precinct minima are corrected for the number of tests into `α′` and
//! `ᾶ′`. Significances are reported as powers `pα = -log10 α`.
//!
//! See `crates/core/examples/` for one runnable program per capability.

pub mod aggregate;
pub mod cli;
pub mod error;
pub mod flagseq;
pub mod oracle;
pub mod runstats;
pub mod stationarity;
pub mod synth;

mod serde_inf;

pub use aggregate::{CandidateStats, PrecinctSummary, RowTrials, SummaryPolicy, Verdict};
pub use error::{Error, Result};
pub use flagseq::{FlagSequence, FlagState, RunStats, Transcript};
pub use runstats::{BernoulliModel, Significance};
