//! Fourier extension of non-periodic functions sampled on a uniform grid,
//! built from small boundary intervals and a single FFT.
//!
//! The guide in `book/` walks through the pipeline; its snippets run as
//! doctests.

pub mod approximant;
pub mod baseline;
pub mod cache;
pub mod dft;
pub mod error;
pub mod experiments;
pub mod extension;
pub mod grids;
pub mod linalg;
pub mod refined;
pub mod special;

pub use num_complex::Complex64;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/configuration.md")]
    mod configuration {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
    #[doc = include_str!("../../../book/src/refinement.md")]
    mod refinement {}
    #[doc = include_str!("../../../book/src/baseline.md")]
    mod baseline {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cache.md")]
    mod cache {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
