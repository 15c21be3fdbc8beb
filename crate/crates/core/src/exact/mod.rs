//! Exact arithmetic: rationals, univariate polynomials and affine forms in `(a, b)`.

mod affine;
mod poly;
mod rational;

pub use affine::{affine_eval, AffineForm};
pub use poly::{poly_nonneg_on_ray, poly_pos_on_ray, Poly, RayCheck};
pub use rational::{cmp as rat_cmp, Rat};
