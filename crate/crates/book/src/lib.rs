//! The guide in `book/`, one module per chapter, so that `cargo test` runs
//! every listing as a doc-test.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/patches.md")]
pub mod patches {}

#[doc = include_str!("../../../book/src/descriptors.md")]
pub mod descriptors {}

#[doc = include_str!("../../../book/src/nuisances.md")]
pub mod nuisances {}

#[doc = include_str!("../../../book/src/benchmark.md")]
pub mod benchmark {}

#[doc = include_str!("../../../book/src/manifests.md")]
pub mod manifests {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
