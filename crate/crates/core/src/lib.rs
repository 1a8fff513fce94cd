pub mod basis;
pub mod bspline;
pub mod domain;
pub mod dual;
pub mod harness;
pub mod integration;
pub mod linalg;
pub mod projector;
pub mod quadrature;
pub mod reconstruction;
pub mod rational;
pub mod refinable;
pub mod sampling;
pub mod voronoi;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/refinable.md")]
    mod refinable {}
    #[doc = include_str!("../../../book/src/duals.md")]
    mod duals {}
    #[doc = include_str!("../../../book/src/spaces.md")]
    mod spaces {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/reconstruction.md")]
    mod reconstruction {}
    #[doc = include_str!("../../../book/src/integration.md")]
    mod integration {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
}
