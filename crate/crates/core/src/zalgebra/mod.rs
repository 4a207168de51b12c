//! Exact linear algebra over the integers and over fields.
//!
//! Everything here is generic over the scalar: integer routines take any
//! [`IntScalar`] (`i64`, `i128`, `BigInt`, ...) and field routines any
//! [`FieldScalar`] (`BigRational`, `Ratio<i64>`, ...). The engine itself
//! instantiates them with arbitrary-precision types, see the aliases at the
//! crate root.

mod field;
mod snf;
mod sparse;

pub use field::{image_basis, kernel_basis, rank_over_field, Rref};
pub use snf::{
    invariant_factors_of_diagonal, snf, snf_dense, snf_sparse, snf_sparse_promoting, try_snf_sparse, SnfResult,
};
pub use sparse::SparseMat;

use std::fmt::Debug;
use std::ops::Neg;

use num_integer::Integer;
use num_traits::{CheckedMul, CheckedSub, Num, Signed};

/// Integer-like scalars usable for Smith normal form. Fixed-width types
/// report overflow through the checked operations; see [`try_snf_sparse`].
pub trait IntScalar: Integer + Signed + CheckedMul + CheckedSub + Clone + Debug + Send + Sync {}
impl<T: Integer + Signed + CheckedMul + CheckedSub + Clone + Debug + Send + Sync> IntScalar for T {}

/// Exact field scalars.
pub trait FieldScalar: Num + Clone + Neg<Output = Self> + Debug + Send + Sync {}
impl<T: Num + Clone + Neg<Output = T> + Debug + Send + Sync> FieldScalar for T {}

use num_bigint::BigInt;
use num_rational::BigRational;

/// Rank over ℚ of an integer matrix.
pub fn rank_q(a: &SparseMat<BigInt>) -> usize {
    rank_over_field(&to_rational(a))
}

pub fn kernel_basis_q(a: &SparseMat<BigInt>) -> Vec<Vec<BigRational>> {
    kernel_basis(&to_rational(a))
}

pub fn image_basis_q(a: &SparseMat<BigInt>) -> Vec<Vec<BigRational>> {
    image_basis(&to_rational(a))
}

pub fn to_rational(a: &SparseMat<BigInt>) -> SparseMat<BigRational> {
    a.map(|v| BigRational::from_integer(v.clone()))
}

/// Scales a rational vector by the lcm of its denominators.
pub fn clear_denominators(v: &[BigRational]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
    v.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect()
}
