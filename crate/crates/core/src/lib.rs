// `!(x > y)` is used on purpose so NaN inputs are rejected as well.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::type_complexity
)]

pub mod comb;
pub mod constructions;
pub mod fast_eval;
pub mod identities;
pub mod measure;
pub mod parallel;
pub mod quadrature;
pub mod scalar;
pub mod transforms;

pub type Cx64 = scalar::Cx<f64>;
pub type Cx32 = scalar::Cx<f32>;
pub type Measure64 = measure::ComplexMeasure<f64>;
pub type Measure32 = measure::ComplexMeasure<f32>;
