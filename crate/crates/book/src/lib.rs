//! Compiles every listing in `book/src` as a doctest.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/lattices.md")]
pub mod lattices {}
#[doc = include_str!("../../../book/src/discriminant-forms.md")]
pub mod discriminant_forms {}
#[doc = include_str!("../../../book/src/gluing.md")]
pub mod gluing {}
#[doc = include_str!("../../../book/src/isometries.md")]
pub mod isometries {}
#[doc = include_str!("../../../book/src/lines-mod-p.md")]
pub mod lines_mod_p {}
#[doc = include_str!("../../../book/src/jordan.md")]
pub mod jordan {}
#[doc = include_str!("../../../book/src/planner.md")]
pub mod planner {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
