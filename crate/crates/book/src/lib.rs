//! mdbook cannot test snippets that depend on workspace crates, so each
//! chapter is pulled in as the doc comment of an empty module and rustdoc
//! runs its code blocks.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/graphs.md")]
pub mod graphs {}
#[doc = include_str!("../../../book/src/gcn.md")]
pub mod gcn {}
#[doc = include_str!("../../../book/src/strategies.md")]
pub mod strategies {}
#[doc = include_str!("../../../book/src/regional.md")]
pub mod regional {}
#[doc = include_str!("../../../book/src/adaptive-pagerank.md")]
pub mod adaptive_pagerank {}
#[doc = include_str!("../../../book/src/protocols.md")]
pub mod protocols {}
#[doc = include_str!("../../../book/src/datasets.md")]
pub mod datasets {}
#[doc = include_str!("../../../book/src/distance.md")]
pub mod distance {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
