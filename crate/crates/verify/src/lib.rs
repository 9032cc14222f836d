//! Holds the `acceptance` integration test, one test per acceptance criterion.
//!
//! It lives in its own package so that `cargo test --workspace` runs it after
//! the unit and integration tests of `foliage-core` and `foliage-cli`.
