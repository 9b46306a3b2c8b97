//! Compiles every code snippet in the guide as a doc-test, so the book and
//! the library cannot drift apart. Each chapter of `book/src` is included as
//! the documentation of one stub module; `cargo test -p book-tests` runs the
//! snippets.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/machines.md")]
pub mod machines {}

#[doc = include_str!("../../../book/src/tables.md")]
pub mod tables {}

#[doc = include_str!("../../../book/src/sets.md")]
pub mod sets {}

#[doc = include_str!("../../../book/src/codes.md")]
pub mod codes {}

#[doc = include_str!("../../../book/src/engines.md")]
pub mod engines {}

#[doc = include_str!("../../../book/src/measures.md")]
pub mod measures {}

#[doc = include_str!("../../../book/src/verification.md")]
pub mod verification {}

#[doc = include_str!("../../../book/src/racing.md")]
pub mod racing {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
