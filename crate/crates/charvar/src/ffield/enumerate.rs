use num_bigint::BigUint;
use num_traits::One;

use super::field::FiniteField;
use super::matrix::Matrix;
use crate::error::Result;
use crate::limits::Limits;

/// |GL_n(F_q)| = prod_{i=0}^{n-1} (q^n - q^i), exact.
pub fn gl_order(n: usize, f: &FiniteField) -> BigUint {
    let q = BigUint::from(f.q());
    let qn = q.pow(n as u32);
    let mut order = BigUint::one();
    for i in 0..n {
        order *= &qn - q.pow(i as u32);
    }
    order
}

/// Streaming enumeration of invertible n x n matrices over an index range.
///
/// The full index space is `[0, q^(n^2))` in row-major base-q order; singular
/// matrices are skipped.  Disjoint ranges partition the stream for parallel
/// consumers, and the union over any partition is the whole group.
pub struct MatrixStream {
    field: FiniteField,
    n: usize,
    next: u128,
    end: u128,
    invertible_only: bool,
}

impl MatrixStream {
    pub fn over_range(n: usize, field: &FiniteField, lo: u128, hi: u128, invertible_only: bool) -> MatrixStream {
        MatrixStream {
            field: field.clone(),
            n,
            next: lo,
            end: hi,
            invertible_only,
        }
    }

    pub fn all_matrices(n: usize, field: &FiniteField) -> MatrixStream {
        let total = (field.q() as u128).pow((n * n) as u32);
        Self::over_range(n, field, 0, total, false)
    }
}

impl Iterator for MatrixStream {
    type Item = Matrix;

    fn next(&mut self) -> Option<Matrix> {
        while self.next < self.end {
            let m = Matrix::from_index(self.n, &self.field, self.next);
            self.next += 1;
            if !self.invertible_only || m.is_invertible(&self.field) {
                return Some(m);
            }
        }
        None
    }
}

/// Deterministic stream over all of GL_n(F_q); errors if the group order
/// exceeds the enumeration limit.
pub fn enumerate_gl(n: usize, f: &FiniteField, limits: &Limits) -> Result<MatrixStream> {
    let order = gl_order(n, f);
    let as_u128: u128 = (&order).try_into().unwrap_or(u128::MAX);
    limits.check_enumeration(as_u128)?;
    let total = (f.q() as u128).pow((n * n) as u32);
    Ok(MatrixStream::over_range(n, f, 0, total, true))
}

/// Materialize GL_n(F_q) in enumeration order.
pub fn collect_gl(n: usize, f: &FiniteField, max: u128) -> Result<Vec<Matrix>> {
    let limits = Limits {
        enumeration: max,
        brute_force: max,
    };
    Ok(enumerate_gl(n, f, &limits)?.collect())
}

/// Split `[0, total)` into `workers` contiguous ranges covering it exactly.
pub fn partition_ranges(total: u128, workers: usize) -> Vec<(u128, u128)> {
    let workers = workers.max(1) as u128;
    let chunk = total / workers;
    let rem = total % workers;
    let mut out = Vec::new();
    let mut start = 0u128;
    for w in 0..workers {
        let len = chunk + if w < rem { 1 } else { 0 };
        out.push((start, start + len));
        start += len;
    }
    out
}
