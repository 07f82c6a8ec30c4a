// Each chapter of the guide in book/ becomes the docs of an empty module,
// so `cargo test --doc` runs its Rust listings.

#[doc = include_str!("../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../book/src/model.md")]
pub mod model {}
#[doc = include_str!("../../book/src/potential.md")]
pub mod potential {}
#[doc = include_str!("../../book/src/equilibria.md")]
pub mod equilibria {}
#[doc = include_str!("../../book/src/optimizer.md")]
pub mod optimizer {}
#[doc = include_str!("../../book/src/symmetry.md")]
pub mod symmetry {}
#[doc = include_str!("../../book/src/strata.md")]
pub mod strata {}
#[doc = include_str!("../../book/src/vibrations.md")]
pub mod vibrations {}
#[doc = include_str!("../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../README.md")]
pub mod readme {}
