use super::field::{FieldElement, FiniteField};

/// Dense n x n matrix over a finite field, entries stored row-major as
/// canonical element indices.  Sizes stay tiny (n <= 4 in practice), so
/// everything is plain Gaussian elimination.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    n: usize,
    entries: Vec<FieldElement>,
}

impl Matrix {
    pub fn new(n: usize, entries: Vec<FieldElement>) -> Matrix {
        assert_eq!(entries.len(), n * n);
        Matrix { n, entries }
    }

    pub fn zero(n: usize) -> Matrix {
        Matrix {
            n,
            entries: vec![FieldElement(0); n * n],
        }
    }

    pub fn identity(n: usize, f: &FiniteField) -> Matrix {
        Matrix::scalar(n, f.one())
    }

    /// c * Id.
    pub fn scalar(n: usize, c: FieldElement) -> Matrix {
        let mut m = Matrix::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = c;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.entries[i * self.n + j] = v;
    }

    pub fn is_scalar(&self) -> bool {
        let d = self.get(0, 0);
        for i in 0..self.n {
            for j in 0..self.n {
                let want = if i == j { d } else { FieldElement(0) };
                if self.get(i, j) != want {
                    return false;
                }
            }
        }
        true
    }

    /// Row-major base-q index; the enumeration order of `enumerate_gl`.
    pub fn to_index(&self, f: &FiniteField) -> u128 {
        let q = f.q() as u128;
        let mut idx = 0u128;
        for e in &self.entries {
            idx = idx * q + e.0 as u128;
        }
        idx
    }

    pub fn from_index(n: usize, f: &FiniteField, mut idx: u128) -> Matrix {
        let q = f.q() as u128;
        let mut entries = vec![FieldElement(0); n * n];
        for slot in entries.iter_mut().rev() {
            *slot = FieldElement((idx % q) as u64);
            idx /= q;
        }
        Matrix { n, entries }
    }

    pub fn add(&self, other: &Matrix, f: &FiniteField) -> Matrix {
        assert_eq!(self.n, other.n);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Matrix { n: self.n, entries }
    }

    pub fn sub(&self, other: &Matrix, f: &FiniteField) -> Matrix {
        assert_eq!(self.n, other.n);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f.sub(a, b))
            .collect();
        Matrix { n: self.n, entries }
    }

    pub fn mul(&self, other: &Matrix, f: &FiniteField) -> Matrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Matrix::zero(n);
        for i in 0..n {
            for kk in 0..n {
                let a = self.get(i, kk);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..n {
                    let cur = out.get(i, j);
                    out.set(i, j, f.add(cur, f.mul(a, other.get(kk, j))));
                }
            }
        }
        out
    }

    pub fn scale(&self, c: FieldElement, f: &FiniteField) -> Matrix {
        let entries = self.entries.iter().map(|&a| f.mul(a, c)).collect();
        Matrix { n: self.n, entries }
    }

    pub fn det(&self, f: &FiniteField) -> FieldElement {
        let n = self.n;
        let mut m = self.entries.clone();
        let mut det = f.one();
        for col in 0..n {
            let mut pivot = None;
            for row in col..n {
                if !f.is_zero(m[row * n + col]) {
                    pivot = Some(row);
                    break;
                }
            }
            let pivot = match pivot {
                Some(r) => r,
                None => return f.zero(),
            };
            if pivot != col {
                for j in 0..n {
                    m.swap(pivot * n + j, col * n + j);
                }
                det = f.neg(det);
            }
            let pv = m[col * n + col];
            det = f.mul(det, pv);
            let pinv = f.inv(pv);
            for row in col + 1..n {
                let factor = f.mul(m[row * n + col], pinv);
                if f.is_zero(factor) {
                    continue;
                }
                for j in col..n {
                    let sub = f.mul(factor, m[col * n + j]);
                    m[row * n + j] = f.sub(m[row * n + j], sub);
                }
            }
        }
        det
    }

    pub fn is_invertible(&self, f: &FiniteField) -> bool {
        !f.is_zero(self.det(f))
    }

    pub fn inv(&self, f: &FiniteField) -> Option<Matrix> {
        let n = self.n;
        let mut m = self.entries.clone();
        let mut inv = Matrix::identity(n, f).entries;
        for col in 0..n {
            let mut pivot = None;
            for row in col..n {
                if !f.is_zero(m[row * n + col]) {
                    pivot = Some(row);
                    break;
                }
            }
            let pivot = pivot?;
            if pivot != col {
                for j in 0..n {
                    m.swap(pivot * n + j, col * n + j);
                    inv.swap(pivot * n + j, col * n + j);
                }
            }
            let pinv = f.inv(m[col * n + col]);
            for j in 0..n {
                m[col * n + j] = f.mul(m[col * n + j], pinv);
                inv[col * n + j] = f.mul(inv[col * n + j], pinv);
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let factor = m[row * n + col];
                if f.is_zero(factor) {
                    continue;
                }
                for j in 0..n {
                    let s = f.mul(factor, m[col * n + j]);
                    m[row * n + j] = f.sub(m[row * n + j], s);
                    let s = f.mul(factor, inv[col * n + j]);
                    inv[row * n + j] = f.sub(inv[row * n + j], s);
                }
            }
        }
        Some(Matrix { n, entries: inv })
    }

    /// Group commutator A B A^-1 B^-1.  Panics if either factor is singular.
    pub fn commutator(&self, other: &Matrix, f: &FiniteField) -> Matrix {
        let ai = self.inv(f).expect("commutator of singular matrix");
        let bi = other.inv(f).expect("commutator of singular matrix");
        self.mul(other, f).mul(&ai, f).mul(&bi, f)
    }

    /// Lie bracket AB - BA (defined for arbitrary matrices).
    pub fn lie_bracket(&self, other: &Matrix, f: &FiniteField) -> Matrix {
        self.mul(other, f).sub(&other.mul(self, f), f)
    }

    pub fn trace(&self, f: &FiniteField) -> FieldElement {
        let mut t = f.zero();
        for i in 0..self.n {
            t = f.add(t, self.get(i, i));
        }
        t
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.entries.iter().all(|e| e.0 == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::FiniteField;

    fn m2(f: &FiniteField, a: u64, b: u64, c: u64, d: u64) -> Matrix {
        Matrix::new(
            2,
            vec![a, b, c, d]
                .into_iter()
                .map(|x| f.element_from_int(x))
                .collect(),
        )
    }

    #[test]
    fn det_and_inverse() {
        let f = FiniteField::new(5, 1).unwrap();
        let a = m2(&f, 1, 2, 3, 4);
        assert_eq!(a.det(&f), f.element_from_int(3)); // 4 - 6 = -2 = 3 mod 5
        let ai = a.inv(&f).unwrap();
        assert_eq!(a.mul(&ai, &f), Matrix::identity(2, &f));
        let sing = m2(&f, 1, 2, 2, 4);
        assert!(sing.inv(&f).is_none());
        assert_eq!(sing.det(&f), f.zero());
    }

    #[test]
    fn index_roundtrip() {
        let f = FiniteField::new(3, 1).unwrap();
        for idx in 0..81u128 {
            let m = Matrix::from_index(2, &f, idx);
            assert_eq!(m.to_index(&f), idx);
        }
    }

    #[test]
    fn commutator_of_commuting_is_identity() {
        let f = FiniteField::new(7, 1).unwrap();
        let a = m2(&f, 2, 0, 0, 2);
        let b = m2(&f, 1, 3, 2, 5);
        assert!(b.is_invertible(&f));
        assert_eq!(a.commutator(&b, &f), Matrix::identity(2, &f));
    }
}
