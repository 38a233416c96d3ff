//! Acceptance checks for `rulenet`.
//!
//! The checks live in `tests/acceptance.rs` and run the conditions of
//! `suites/acceptance.toml`:
//!
//! ```text
//! cargo test -p rulenet-validation --test acceptance
//! ```
