//! The guide in `book/src`, compiled so that every Rust listing runs as a
//! doc-test. One module per chapter keeps failures traceable to a file.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/color.md")]
pub mod color {}
#[doc = include_str!("../../../book/src/palettes.md")]
pub mod palettes {}
#[doc = include_str!("../../../book/src/sentiment.md")]
pub mod sentiment {}
#[doc = include_str!("../../../book/src/emotion.md")]
pub mod emotion {}
#[doc = include_str!("../../../book/src/data.md")]
pub mod data {}
#[doc = include_str!("../../../book/src/association.md")]
pub mod association {}
#[doc = include_str!("../../../book/src/pipeline.md")]
pub mod pipeline {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
