//! Exact arithmetic in GF(p^k), dense matrices over it, canonical forms and
//! streaming enumeration of general linear groups.

mod enumerate;
mod field;
mod matrix;
mod rcf;

pub use enumerate::{collect_gl, enumerate_gl, gl_order, partition_ranges, MatrixStream};
pub use field::{FieldElement, FiniteField, RootOfUnity};
pub use matrix::Matrix;
pub use rcf::{rcf_key, rcf_key_smith, RcfKey};

pub(crate) use rcf::fp_mul;
