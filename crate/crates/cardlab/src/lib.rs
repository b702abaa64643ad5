//! A deterministic laboratory for two smart-card password authentication
//! schemes, built as executable state machines with a scripted adversary.
//!
//! The crate provides:
//!
//! - [`words`]: fixed-width bitstring arithmetic, canonical encodings, and
//!   the schemes' one-way function;
//! - [`kuchen`]: a scheme whose password change phase performs no check of
//!   the old password;
//! - [`yoon`]: a revision of the same scheme that stores an extra verifier
//!   word on the card and gates password change on it;
//! - [`simnet`]: a deterministic simulation substrate (logical clock,
//!   tappable channel, transcript log) for driving sessions;
//! - [`attacks`]: mechanized attacks against both schemes, each returning a
//!   verdict object backed by transcript evidence;
//! - [`scenario`]: a registry of named, seed-driven scenarios behind the
//!   `cardlab` command-line runner.
//!
//! Everything is driven by explicit seeds and a logical clock, so any run is
//! reproducible bit-for-bit.

pub mod attacks;
pub mod kuchen;
pub mod scenario;
pub mod simnet;
pub mod words;
pub mod yoon;
