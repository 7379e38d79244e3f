use super::field::{FieldElement, FiniteField};
use super::matrix::Matrix;

/// Invariant factors of xI - M: a list of monic polynomials, each dividing
/// the next, with the constant polynomial entries dropped.  Two matrices over
/// the same field are conjugate iff their keys are equal.
///
/// Each polynomial is stored as element indices, constant term first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RcfKey(pub Vec<Vec<u64>>);

impl RcfKey {
    /// Total degree; equals the matrix size.
    pub fn degree(&self) -> usize {
        self.0.iter().map(|p| p.len() - 1).sum()
    }
}

// ---- dense polynomials over the field, constant term first ----
// the zero polynomial is the empty vector

pub(crate) type FPoly = Vec<FieldElement>;

pub(crate) fn fp_trim(p: &mut FPoly) {
    while matches!(p.last(), Some(c) if c.0 == 0) {
        p.pop();
    }
}

pub(crate) fn fp_deg(p: &FPoly) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

pub(crate) fn fp_add(a: &FPoly, b: &FPoly, f: &FiniteField) -> FPoly {
    let mut out = vec![FieldElement(0); a.len().max(b.len())];
    for (i, &c) in a.iter().enumerate() {
        out[i] = c;
    }
    for (i, &c) in b.iter().enumerate() {
        out[i] = f.add(out[i], c);
    }
    fp_trim(&mut out);
    out
}

pub(crate) fn fp_neg(a: &FPoly, f: &FiniteField) -> FPoly {
    a.iter().map(|&c| f.neg(c)).collect()
}

pub(crate) fn fp_sub(a: &FPoly, b: &FPoly, f: &FiniteField) -> FPoly {
    fp_add(a, &fp_neg(b, f), f)
}

pub(crate) fn fp_mul(a: &FPoly, b: &FPoly, f: &FiniteField) -> FPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![FieldElement(0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x.0 == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    fp_trim(&mut out);
    out
}

/// Quotient and remainder by a nonzero divisor.
pub(crate) fn fp_divmod(a: &FPoly, b: &FPoly, f: &FiniteField) -> (FPoly, FPoly) {
    let db = fp_deg(b).expect("division by zero polynomial");
    let lead_inv = f.inv(b[db]);
    let mut rem = a.clone();
    let mut quot: FPoly = vec![];
    while let Some(dr) = fp_deg(&rem) {
        if dr < db {
            break;
        }
        let coeff = f.mul(rem[dr], lead_inv);
        let shift = dr - db;
        if quot.len() < shift + 1 {
            quot.resize(shift + 1, FieldElement(0));
        }
        quot[shift] = f.add(quot[shift], coeff);
        for i in 0..=db {
            let s = f.mul(coeff, b[i]);
            rem[shift + i] = f.sub(rem[shift + i], s);
        }
        fp_trim(&mut rem);
    }
    fp_trim(&mut quot);
    (quot, rem)
}

pub(crate) fn fp_monic(a: &FPoly, f: &FiniteField) -> FPoly {
    match fp_deg(a) {
        None => vec![],
        Some(d) => {
            let inv = f.inv(a[d]);
            a.iter().map(|&c| f.mul(c, inv)).collect()
        }
    }
}

fn key_from_factors(factors: Vec<FPoly>) -> RcfKey {
    RcfKey(
        factors
            .into_iter()
            .map(|p| p.into_iter().map(|c| c.0).collect())
            .collect(),
    )
}

fn charpoly2(m: &Matrix, f: &FiniteField) -> FPoly {
    let t = f.add(m.get(0, 0), m.get(1, 1));
    let d = m.det(f);
    vec![d, f.neg(t), f.one()]
}

fn charpoly3(m: &Matrix, f: &FiniteField) -> FPoly {
    let t = m.trace(f);
    let d = m.det(f);
    // sum of principal 2x2 minors
    let mut e2 = f.zero();
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let minor = f.sub(
            f.mul(m.get(i, i), m.get(j, j)),
            f.mul(m.get(i, j), m.get(j, i)),
        );
        e2 = f.add(e2, minor);
    }
    vec![f.neg(d), e2, f.neg(t), f.one()]
}

/// Minimal polynomial of a non-scalar 3x3 matrix if it has degree 2,
/// otherwise `None` (degree 3).
fn minpoly3_deg2(m: &Matrix, m2: &Matrix, f: &FiniteField) -> Option<FPoly> {
    // solve M^2 = alpha*M + beta*I from two independent entries, then verify
    let (alpha, beta) = {
        let mut found = None;
        'outer: for i in 0..3 {
            for j in 0..3 {
                if i != j && m.get(i, j).0 != 0 {
                    let alpha = f.mul(m2.get(i, j), f.inv(m.get(i, j)));
                    let beta = f.sub(m2.get(i, i), f.mul(alpha, m.get(i, i)));
                    found = Some((alpha, beta));
                    break 'outer;
                }
            }
        }
        match found {
            Some(ab) => ab,
            None => {
                // diagonal non-scalar: two distinct eigenvalues a != b give
                // alpha = a + b, beta = -ab
                let a = m.get(0, 0);
                let b = if m.get(1, 1) != a {
                    m.get(1, 1)
                } else {
                    m.get(2, 2)
                };
                (f.add(a, b), f.neg(f.mul(a, b)))
            }
        }
    };
    for i in 0..3 {
        for j in 0..3 {
            let mut want = f.mul(alpha, m.get(i, j));
            if i == j {
                want = f.add(want, beta);
            }
            if m2.get(i, j) != want {
                return None;
            }
        }
    }
    Some(vec![f.neg(beta), f.neg(alpha), f.one()])
}

/// Canonical conjugacy key via explicit closed forms for n <= 3, and the
/// Smith normal form of xI - M for larger sizes.
pub fn rcf_key(m: &Matrix, f: &FiniteField) -> RcfKey {
    match m.n() {
        1 => key_from_factors(vec![vec![f.neg(m.get(0, 0)), f.one()]]),
        2 => {
            if m.is_scalar() {
                let lin = vec![f.neg(m.get(0, 0)), f.one()];
                key_from_factors(vec![lin.clone(), lin])
            } else {
                key_from_factors(vec![charpoly2(m, f)])
            }
        }
        3 => {
            if m.is_scalar() {
                let lin = vec![f.neg(m.get(0, 0)), f.one()];
                key_from_factors(vec![lin.clone(), lin.clone(), lin])
            } else {
                let c = charpoly3(m, f);
                let msq = m.mul(m, f);
                match minpoly3_deg2(m, &msq, f) {
                    Some(minp) => {
                        let (q, r) = fp_divmod(&c, &minp, f);
                        debug_assert!(r.is_empty(), "minimal polynomial must divide charpoly");
                        key_from_factors(vec![fp_monic(&q, f), minp])
                    }
                    None => key_from_factors(vec![c]),
                }
            }
        }
        _ => rcf_key_smith(m, f),
    }
}

/// Invariant factors via Smith normal form of xI - M over F[x].  Used as the
/// general-n path and as an independent cross-check of the closed forms.
pub fn rcf_key_smith(m: &Matrix, f: &FiniteField) -> RcfKey {
    let n = m.n();
    // xI - M as a matrix of polynomials
    let mut a: Vec<Vec<FPoly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut p: FPoly = vec![f.neg(m.get(i, j))];
                    if i == j {
                        p.push(f.one());
                    } else {
                        fp_trim(&mut p);
                    }
                    p
                })
                .collect()
        })
        .collect();

    for t in 0..n {
        'pivot: loop {
            // locate a nonzero entry of minimal degree in the submatrix
            let mut best: Option<(usize, usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if let Some(d) = fp_deg(&a[i][j]) {
                        if best.map_or(true, |(_, _, bd)| d < bd) {
                            best = Some((i, j, d));
                        }
                    }
                }
            }
            let (bi, bj, _) = match best {
                Some(b) => b,
                None => break 'pivot, // submatrix is zero
            };
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }

            // clear the pivot row and column
            let mut dirty = false;
            for i in t + 1..n {
                if !a[i][t].is_empty() {
                    let (q, _) = fp_divmod(&a[i][t], &a[t][t], f);
                    for j in t..n {
                        let s = fp_mul(&q, &a[t][j], f);
                        a[i][j] = fp_sub(&a[i][j], &s, f);
                    }
                    if !a[i][t].is_empty() {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..n {
                if !a[t][j].is_empty() {
                    let (q, _) = fp_divmod(&a[t][j], &a[t][t], f);
                    for i in t..n {
                        let s = fp_mul(&q, &a[i][t], f);
                        a[i][j] = fp_sub(&a[i][j], &s, f);
                    }
                    if !a[t][j].is_empty() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue 'pivot;
            }

            // enforce divisibility of the remaining entries by the pivot
            for i in t + 1..n {
                for j in t + 1..n {
                    let (_, r) = fp_divmod(&a[i][j], &a[t][t], f);
                    if !r.is_empty() {
                        // add row i to row t and restart the reduction
                        for jj in t..n {
                            let extra = a[i][jj].clone();
                            a[t][jj] = fp_add(&a[t][jj], &extra, f);
                        }
                        continue 'pivot;
                    }
                }
            }
            break 'pivot;
        }
    }

    let factors: Vec<FPoly> = (0..n)
        .map(|i| fp_monic(&a[i][i], f))
        .filter(|p| fp_deg(p).map_or(false, |d| d >= 1))
        .collect();
    key_from_factors(factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::{collect_gl, FiniteField};

    #[test]
    fn scalar_matrix_key() {
        let f = FiniteField::new(3, 1).unwrap();
        let id = Matrix::identity(2, &f);
        // [x - 1, x - 1]
        assert_eq!(rcf_key(&id, &f), RcfKey(vec![vec![2, 1], vec![2, 1]]));
    }

    #[test]
    fn companion_matrix_is_its_own_form() {
        let f = FiniteField::new(3, 1).unwrap();
        // companion matrix of x^2 + 1: [[0, -1], [1, 0]]
        let c = Matrix::new(
            2,
            vec![
                f.zero(),
                f.neg(f.one()),
                f.one(),
                f.zero(),
            ],
        );
        assert_eq!(rcf_key(&c, &f), RcfKey(vec![vec![1, 0, 1]]));
    }

    #[test]
    fn conjugation_invariance() {
        for (p, n) in [(3u64, 2usize), (2, 3), (3, 3)] {
            let f = FiniteField::new(p, 1).unwrap();
            let gl = collect_gl(n, &f, u128::MAX).unwrap();
            // a few fixed matrices conjugated by every group element
            for m in gl.iter().step_by(gl.len() / 5 + 1) {
                let key = rcf_key(m, &f);
                for pmat in gl.iter().step_by(7) {
                    let conj = pmat.mul(m, &f).mul(&pmat.inv(&f).unwrap(), &f);
                    assert_eq!(rcf_key(&conj, &f), key);
                }
            }
        }
    }

    #[test]
    fn fast_path_matches_smith_form() {
        for (p, k, n) in [(2u64, 1usize, 2usize), (3, 1, 2), (5, 1, 2), (2, 1, 3), (3, 1, 3), (2, 2, 2)] {
            let f = FiniteField::new(p, k).unwrap();
            let total = (f.q() as u128).pow((n * n) as u32);
            for idx in 0..total {
                let m = Matrix::from_index(n, &f, idx);
                assert_eq!(rcf_key(&m, &f), rcf_key_smith(&m, &f), "idx {idx}");
            }
        }
    }

    #[test]
    fn completeness_against_brute_force_orbits() {
        // number of distinct keys == number of conjugation orbits
        for (p, n) in [(2u64, 2usize), (3, 2), (2, 3), (3, 3)] {
            let f = FiniteField::new(p, 1).unwrap();
            let gl = collect_gl(n, &f, u128::MAX).unwrap();
            let keys: std::collections::HashSet<RcfKey> =
                gl.iter().map(|m| rcf_key(m, &f)).collect();

            let mut seen = std::collections::HashSet::new();
            let mut orbits = 0usize;
            for m in &gl {
                let idx = m.to_index(&f);
                if seen.contains(&idx) {
                    continue;
                }
                orbits += 1;
                for pmat in &gl {
                    let conj = pmat.mul(m, &f).mul(&pmat.inv(&f).unwrap(), &f);
                    seen.insert(conj.to_index(&f));
                }
            }
            assert_eq!(keys.len(), orbits, "GL_{n}(F_{p})");
        }
    }
}
