//! Compiles the guide's snippets as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/triangulations.md")]
pub mod triangulations {}
#[doc = include_str!("../../../book/src/taut.md")]
pub mod taut {}
#[doc = include_str!("../../../book/src/transverse.md")]
pub mod transverse {}
#[doc = include_str!("../../../book/src/loops.md")]
pub mod loops {}
#[doc = include_str!("../../../book/src/disks.md")]
pub mod disks {}
#[doc = include_str!("../../../book/src/refutation.md")]
pub mod refutation {}
#[doc = include_str!("../../../book/src/corpus.md")]
pub mod corpus {}
