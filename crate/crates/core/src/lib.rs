//! Discrete heat-kernel toolkit for measured weighted graphs.
//!
//! The crate covers graph Laplacians with respect to an arbitrary vertex
//! measure, the Bakry-Émery forms, Dirichlet spectra and heat kernels, the
//! Legendre associate `ζ` of `cosh - 1`, curvature-dimension evidence, and
//! numerical verification of the Davies-Gaffney-Grigor'yan off-diagonal
//! bound together with the estimates that follow from it (eigenvalue,
//! diameter, isoperimetric, mixing, Li-Yau, Harnack, Cheng).
//!
//! The graph, operator, Legendre and heat-kernel layers are generic over the
//! [`Scalar`] type; the verification layers run in `f64`. Concrete aliases
//! for both precisions are exported below.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curvature;
pub mod dgg;
pub mod error;
pub mod estimates;
pub mod graph;
pub mod heat;
pub mod legendre;
pub mod operators;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
pub use graph::{
    generate, load_graph, save_graph, Exhaustion, Family, InfiniteFamily, MeasureMode, MeasuredGraph,
    StructuralConstants, Subset,
};
pub use scalar::Scalar;

pub type MeasuredGraph64 = graph::MeasuredGraph<f64>;
pub type MeasuredGraph32 = graph::MeasuredGraph<f32>;
pub type Spectrum64 = operators::Spectrum<f64>;
pub type Spectrum32 = operators::Spectrum<f32>;
pub type HeatKernel64 = heat::HeatKernel<f64>;
pub type HeatKernel32 = heat::HeatKernel<f32>;
pub type Semigroup64 = heat::DirichletSemigroup<f64>;
pub type Semigroup32 = heat::DirichletSemigroup<f32>;
pub type Exhaustion64 = graph::Exhaustion<f64>;
