//! Point counters for twisted/untwisted character varieties and stacks, the
//! additive moment-map fiber, and the surface x circle groupoid count.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::classdata::{build_class_table, genus_count, scalar_genus_one_count};
use crate::error::{Error, Result};
use crate::ffield::{enumerate_gl, gl_order, partition_ranges, FieldElement, FiniteField, Matrix, MatrixStream};
use crate::limits::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountKind {
    TwistedSolutions,
    UntwistedSolutions,
    TwistedVariety,
    TwistedStack,
    UntwistedStack,
    AdditiveMuStack,
    SurfaceCircleStack,
}

/// One exact counting result.  Solution kinds carry integers; variety counts
/// are integers by freeness of the PGL action; stack kinds are exact
/// rationals (solutions over group order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountRecord {
    pub n: usize,
    pub g: usize,
    pub p: u64,
    pub k: usize,
    pub kind: CountKind,
    pub value: BigRational,
}

impl CountRecord {
    pub fn q(&self) -> u64 {
        self.p.pow(self.k as u32)
    }

    pub fn integer_value(&self) -> Option<BigInt> {
        if self.value.is_integer() {
            Some(self.value.to_integer())
        } else {
            None
        }
    }
}

fn record(n: usize, g: usize, f: &FiniteField, kind: CountKind, value: BigRational) -> CountRecord {
    CountRecord {
        n,
        g,
        p: f.p(),
        k: f.k(),
        kind,
        value,
    }
}

/// #{tuples in GL_n^{2g} : prod [A_i,B_i] = z}.  Scalar targets at genus one
/// go through the combinatorial fixed-class formula, which needs no group
/// enumeration; everything else builds the class table.
pub fn solution_count(
    n: usize,
    g: usize,
    field: &FiniteField,
    z: &Matrix,
    limits: &Limits,
) -> Result<BigUint> {
    if !z.is_invertible(field) {
        return Err(Error::SingularTarget);
    }
    if g == 1 && z.is_scalar() {
        return Ok(scalar_genus_one_count(n, field, z.get(0, 0)));
    }
    let table = build_class_table(n, field, limits)?;
    genus_count(&table, g, z)
}

/// T_{g,n}(q): target the scalar matrix of a primitive n-th root of unity.
pub fn twisted_count(n: usize, g: usize, field: &FiniteField, limits: &Limits) -> Result<CountRecord> {
    let root = field.primitive_root_of_unity(n as u64)?;
    twisted_count_with_root(n, g, field, root.element, limits)
}

/// Same count with an explicit twisting root; exposed so the suite can check
/// independence of the primitive-root choice.
pub fn twisted_count_with_root(
    n: usize,
    g: usize,
    field: &FiniteField,
    zeta: FieldElement,
    limits: &Limits,
) -> Result<CountRecord> {
    if field.order_of(zeta) != n as u64 {
        return Err(Error::NoRootOfUnity {
            order: n as u64,
            q: field.q() as u128,
        });
    }
    let z = Matrix::scalar(n, zeta);
    let count = solution_count(n, g, field, &z, limits)?;
    Ok(record(
        n,
        g,
        field,
        CountKind::TwistedSolutions,
        BigRational::from(BigInt::from(count)),
    ))
}

/// U_{g,n}(q): target the identity.
pub fn untwisted_count(n: usize, g: usize, field: &FiniteField, limits: &Limits) -> Result<CountRecord> {
    let z = Matrix::identity(n, field);
    let count = solution_count(n, g, field, &z, limits)?;
    Ok(record(
        n,
        g,
        field,
        CountKind::UntwistedSolutions,
        BigRational::from(BigInt::from(count)),
    ))
}

/// Points of the twisted character variety: solutions / |PGL_n| — the PGL
/// action is free, so the quotient must be exact.
pub fn twisted_variety_count(
    n: usize,
    g: usize,
    field: &FiniteField,
    limits: &Limits,
) -> Result<CountRecord> {
    let solutions = twisted_count(n, g, field, limits)?;
    let pgl = BigRational::from(BigInt::from(gl_order(n, field)))
        / BigRational::from(BigInt::from(field.q() - 1));
    let value = &solutions.value / pgl;
    if !value.is_integer() {
        return Err(Error::NonIntegralQuotient(format!(
            "twisted solutions {} not divisible by |PGL_{}(F_{})|",
            solutions.value,
            n,
            field.q()
        )));
    }
    Ok(record(n, g, field, CountKind::TwistedVariety, value))
}

/// Solutions over |GL_n|: the groupoid count of the quotient stack.
pub fn stack_count(solutions: &CountRecord) -> Result<CountRecord> {
    let kind = match solutions.kind {
        CountKind::TwistedSolutions => CountKind::TwistedStack,
        CountKind::UntwistedSolutions => CountKind::UntwistedStack,
        _ => return Err(Error::NotSolutionCount),
    };
    let field = FiniteField::new(solutions.p, solutions.k)?;
    let order = BigRational::from(BigInt::from(gl_order(solutions.n, &field)));
    Ok(CountRecord {
        kind,
        value: &solutions.value / order,
        ..solutions.clone()
    })
}

/// Distribution of the additive bracket sum: for each matrix index c, the
/// number of 2g-tuples over the full matrix space with sum_j [A_j, B_j] = c
/// (Lie bracket).  Built by one pass over all pairs, then g-1 additive
/// convolutions.
fn additive_bracket_distribution(
    n: usize,
    g: usize,
    field: &FiniteField,
    limits: &Limits,
) -> Result<Vec<BigUint>> {
    let space = (field.q() as u128).pow((n * n) as u32);
    let iterations = space.checked_pow(2 * g as u32).unwrap_or(u128::MAX);
    limits.check_brute_force(iterations)?;

    let ranges = partition_ranges(space, rayon::current_num_threads());
    let pair_dist: Vec<BigUint> = ranges
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut acc = vec![BigUint::zero(); space as usize];
            for a in MatrixStream::over_range(n, field, lo, hi, false) {
                for b in MatrixStream::all_matrices(n, field) {
                    let c = a.lie_bracket(&b, field);
                    acc[c.to_index(field) as usize] += BigUint::one();
                }
            }
            acc
        })
        .reduce(
            || vec![BigUint::zero(); space as usize],
            |mut x, y| {
                for (a, b) in x.iter_mut().zip(y) {
                    *a += b;
                }
                x
            },
        );

    let mut dist = pair_dist.clone();
    for _ in 1..g {
        let mut next = vec![BigUint::zero(); space as usize];
        for (i, ci) in dist.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            let mi = Matrix::from_index(n, field, i as u128);
            for (j, cj) in pair_dist.iter().enumerate() {
                if cj.is_zero() {
                    continue;
                }
                let mj = Matrix::from_index(n, field, j as u128);
                let s = mi.add(&mj, field);
                next[s.to_index(field) as usize] += ci * cj;
            }
        }
        dist = next;
    }
    Ok(dist)
}

/// #{(A_j,B_j) in Mat_n^{2g} : sum [A_j,B_j] = 0} / |GL_n|.
pub fn additive_mu_stack_count(
    n: usize,
    g: usize,
    field: &FiniteField,
    limits: &Limits,
) -> Result<CountRecord> {
    let dist = additive_bracket_distribution(n, g, field, limits)?;
    let solutions = BigRational::from(BigInt::from(dist[0].clone()));
    let order = BigRational::from(BigInt::from(gl_order(n, field)));
    Ok(record(
        n,
        g,
        field,
        CountKind::AdditiveMuStack,
        solutions / order,
    ))
}

/// #{(A_i,B_i,C) in GL_n^{2g+1} : prod [A_i,B_i] = Id, C central in the
/// tuple} / |GL_n| — the rank-n groupoid count for the fundamental group of
/// Sigma_g x S^1.
pub fn surface_circle_stack_count(
    n: usize,
    g: usize,
    field: &FiniteField,
    limits: &Limits,
) -> Result<CountRecord> {
    let order = gl_order(n, field);
    let order_u128: u128 = (&order).try_into().unwrap_or(u128::MAX);
    let iterations = order_u128
        .checked_pow(2 * g as u32 + 1)
        .unwrap_or(u128::MAX);
    limits.check_brute_force(iterations)?;

    let gl: Vec<Matrix> = enumerate_gl(n, field, limits)?.collect();
    let id = Matrix::identity(n, field);
    let total: BigUint = gl
        .par_iter()
        .map(|first_a| {
            let mut acc = BigUint::zero();
            // tuples (A_1, B_1, ..., A_g, B_g) with A_1 = first_a
            let mut stack: Vec<(Matrix, Vec<Matrix>)> = vec![(id.clone(), vec![first_a.clone()])];
            while let Some((prod, tuple)) = stack.pop() {
                if tuple.len() == 2 * g {
                    let a = &tuple[tuple.len() - 2];
                    let b = &tuple[tuple.len() - 1];
                    let full = prod.mul(&a.commutator(b, field), field);
                    if full == id {
                        let centralizing = gl
                            .iter()
                            .filter(|c| {
                                tuple.iter().all(|m| {
                                    m.mul(c, field) == c.mul(m, field)
                                })
                            })
                            .count();
                        acc += BigUint::from(centralizing);
                    }
                    continue;
                }
                if tuple.len() % 2 == 1 {
                    // choose B for the current A
                    for b in &gl {
                        let mut t = tuple.clone();
                        t.push(b.clone());
                        if t.len() < 2 * g {
                            let a = &t[t.len() - 2];
                            let new_prod = prod.mul(&a.commutator(b, field), field);
                            stack.push((new_prod, t));
                        } else {
                            stack.push((prod.clone(), t));
                        }
                    }
                } else {
                    for a in &gl {
                        let mut t = tuple.clone();
                        t.push(a.clone());
                        stack.push((prod.clone(), t));
                    }
                }
            }
            acc
        })
        .reduce(BigUint::zero, |a, b| a + b);

    let value = BigRational::from(BigInt::from(total)) / BigRational::from(BigInt::from(order));
    Ok(record(n, g, field, CountKind::SurfaceCircleStack, value))
}

/// Oracle target for `brute_force_count`.
#[derive(Debug, Clone)]
pub enum BruteTarget {
    /// prod [A_i,B_i] = z over GL_n.
    Multiplicative(Matrix),
    /// sum [A_j,B_j] = 0 over all of Mat_n.
    Additive,
}

/// The permanent oracle: direct nested enumeration, deterministic across
/// worker counts.
pub fn brute_force_count(
    n: usize,
    g: usize,
    field: &FiniteField,
    target: &BruteTarget,
    limits: &Limits,
) -> Result<BigUint> {
    match target {
        BruteTarget::Multiplicative(z) => {
            if !z.is_invertible(field) {
                return Err(Error::SingularTarget);
            }
            let order = gl_order(n, field);
            let order_u128: u128 = (&order).try_into().unwrap_or(u128::MAX);
            let iterations = order_u128.checked_pow(2 * g as u32).unwrap_or(u128::MAX);
            limits.check_brute_force(iterations)?;
            let gl: Vec<Matrix> = enumerate_gl(n, field, limits)?.collect();
            // memoized commutator table keyed by pair position
            let comms: Vec<Matrix> = gl
                .par_iter()
                .flat_map_iter(|a| gl.iter().map(move |b| a.commutator(b, field)))
                .collect();
            let m = gl.len();
            let count = count_products(&comms, m, g, z, field);
            Ok(count)
        }
        BruteTarget::Additive => {
            let dist = additive_bracket_distribution(n, g, field, limits)?;
            Ok(dist[0].clone())
        }
    }
}

fn count_products(comms: &[Matrix], m: usize, g: usize, z: &Matrix, field: &FiniteField) -> BigUint {
    // fold pair by pair; products bucketed to keep the state space at |G|
    let mut current: HashMap<Matrix, BigUint> = HashMap::new();
    for c in comms.iter().take(m * m) {
        *current.entry(c.clone()).or_default() += BigUint::one();
    }
    for _ in 1..g {
        let mut next: HashMap<Matrix, BigUint> = HashMap::new();
        for (prod, cnt) in &current {
            for c in comms.iter().take(m * m) {
                let np = prod.mul(c, field);
                *next.entry(np).or_default() += cnt;
            }
        }
        current = next;
    }
    current.get(z).cloned().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn field(p: u64, k: usize) -> FiniteField {
        FiniteField::new(p, k).unwrap()
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    fn rat2(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn twisted_small_values() {
        let l = Limits::default();
        // n=1: zeta_1 = 1, abelian, (q-1)^2
        let f7 = field(7, 1);
        assert_eq!(twisted_count(1, 1, &f7, &l).unwrap().value, rat(36));
        // n=2, g=1, GF(3): 96
        let f3 = field(3, 1);
        assert_eq!(twisted_count(2, 1, &f3, &l).unwrap().value, rat(96));
        // GF(4) has odd unit group: no square root of unity of order 2
        let f4 = field(2, 2);
        assert!(matches!(
            twisted_count(2, 1, &f4, &l),
            Err(Error::NoRootOfUnity { order: 2, q: 4 })
        ));
    }

    #[test]
    fn untwisted_small_values() {
        let l = Limits::default();
        let f3 = field(3, 1);
        assert_eq!(untwisted_count(1, 2, &f3, &l).unwrap().value, rat(16));
        assert_eq!(untwisted_count(2, 1, &f3, &l).unwrap().value, rat(384));
        let f2 = field(2, 1);
        assert_eq!(untwisted_count(2, 1, &f2, &l).unwrap().value, rat(18));
    }

    #[test]
    fn twisted_variety_values() {
        let l = Limits::default();
        let f3 = field(3, 1);
        assert_eq!(twisted_variety_count(2, 1, &f3, &l).unwrap().value, rat(4));
        let f5 = field(5, 1);
        let v = twisted_variety_count(2, 1, &f5, &l).unwrap();
        // cross-check the divisibility against the raw count
        let t = twisted_count(2, 1, &f5, &l).unwrap();
        let pgl = BigRational::from(BigInt::from(gl_order(2, &f5))) / rat(4);
        assert_eq!(v.value, t.value / pgl);
    }

    #[test]
    fn stack_counts() {
        let l = Limits::default();
        let f3 = field(3, 1);
        let t = twisted_count(2, 1, &f3, &l).unwrap();
        assert_eq!(stack_count(&t).unwrap().value, rat(2)); // 96/48
        let u = untwisted_count(2, 1, &field(2, 1), &l).unwrap();
        assert_eq!(stack_count(&u).unwrap().value, rat(3)); // 18/6
        let u1 = untwisted_count(1, 1, &f3, &l).unwrap();
        assert_eq!(stack_count(&u1).unwrap().value, rat(2)); // (q-1)^2/(q-1)
        let v = twisted_variety_count(2, 1, &f3, &l).unwrap();
        assert!(matches!(stack_count(&v), Err(Error::NotSolutionCount)));
    }

    #[test]
    fn scalar_fast_path_vs_brute_force() {
        let l = Limits::default();
        for (p, n) in [(3u64, 2usize), (5, 2), (7, 2)] {
            let f = field(p, 1);
            let t = twisted_count(n, 1, &f, &l).unwrap();
            let zeta = f.primitive_root_of_unity(n as u64).unwrap().element;
            let z = Matrix::scalar(n, zeta);
            let brute = brute_force_count(n, 1, &f, &BruteTarget::Multiplicative(z), &l).unwrap();
            assert_eq!(t.value, BigRational::from(BigInt::from(brute)));
        }
    }

    #[test]
    fn genus_two_matches_brute_force() {
        let l = Limits::default();
        let f2 = field(2, 1);
        let id = Matrix::identity(2, &f2);
        let brute = brute_force_count(2, 2, &f2, &BruteTarget::Multiplicative(id), &l).unwrap();
        let conv = untwisted_count(2, 2, &f2, &l).unwrap();
        assert_eq!(conv.value, BigRational::from(BigInt::from(brute)));
    }

    #[test]
    fn root_choice_does_not_change_twisted_count() {
        let l = Limits::default();
        for p in [5u64, 7, 13] {
            let f = field(p, 1);
            let base = twisted_count(2, 1, &f, &l).unwrap();
            for zeta in f.all_roots_of_order(2) {
                let t = twisted_count_with_root(2, 1, &f, zeta, &l).unwrap();
                assert_eq!(t.value, base.value, "p={p} zeta={}", zeta.0);
            }
        }
    }

    #[test]
    fn additive_mu_counts() {
        let l = Limits::default();
        // n=1: everything commutes, q^{2g}/(q-1)
        let f5 = field(5, 1);
        assert_eq!(
            additive_mu_stack_count(1, 1, &f5, &l).unwrap().value,
            rat2(25, 4)
        );
        assert_eq!(
            additive_mu_stack_count(1, 2, &f5, &l).unwrap().value,
            rat2(625, 4)
        );
        // n=2, GF(2): brute force over 256 pairs as its own oracle
        let f2 = field(2, 1);
        let mut commuting = 0u64;
        for a in MatrixStream::all_matrices(2, &f2) {
            for b in MatrixStream::all_matrices(2, &f2) {
                if a.mul(&b, &f2) == b.mul(&a, &f2) {
                    commuting += 1;
                }
            }
        }
        let got = additive_mu_stack_count(2, 1, &f2, &l).unwrap().value;
        assert_eq!(got, BigRational::new(BigInt::from(commuting), BigInt::from(6)));
    }

    #[test]
    fn surface_circle_counts() {
        let l = Limits::default();
        // n=1: abelian, (q-1)^{2g+1}/(q-1)
        let f5 = field(5, 1);
        assert_eq!(
            surface_circle_stack_count(1, 1, &f5, &l).unwrap().value,
            rat(16)
        );
        let f3 = field(3, 1);
        assert_eq!(
            surface_circle_stack_count(1, 2, &f3, &l).unwrap().value,
            rat(16)
        );
        // n=2, GF(2): independent direct triple loop
        let f2 = field(2, 1);
        let gl: Vec<Matrix> = enumerate_gl(2, &f2, &l).unwrap().collect();
        let id = Matrix::identity(2, &f2);
        let mut total = 0u64;
        for a in &gl {
            for b in &gl {
                if a.commutator(b, &f2) != id {
                    continue;
                }
                for c in &gl {
                    if a.mul(c, &f2) == c.mul(a, &f2) && b.mul(c, &f2) == c.mul(b, &f2) {
                        total += 1;
                    }
                }
            }
        }
        let got = surface_circle_stack_count(2, 1, &f2, &l).unwrap().value;
        assert_eq!(got, BigRational::new(BigInt::from(total), BigInt::from(6)));
    }

    #[test]
    fn closed_forms_n1_all_kinds() {
        let l = Limits::default();
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let (p, k) = match q {
                4 => (2, 2),
                8 => (2, 3),
                9 => (3, 2),
                p => (p, 1),
            };
            let f = field(p, k);
            let qm1 = (q - 1) as i64;
            for g in 1..=2usize {
                let e = 2 * g as u32;
                assert_eq!(
                    twisted_count(1, g, &f, &l).unwrap().value,
                    rat(qm1.pow(e))
                );
                assert_eq!(
                    untwisted_count(1, g, &f, &l).unwrap().value,
                    rat(qm1.pow(e))
                );
                assert_eq!(
                    twisted_variety_count(1, g, &f, &l).unwrap().value,
                    rat(qm1.pow(e))
                );
                let st = stack_count(&untwisted_count(1, g, &f, &l).unwrap()).unwrap();
                assert_eq!(st.value, rat(qm1.pow(e - 1)));
                assert_eq!(
                    additive_mu_stack_count(1, g, &f, &l).unwrap().value,
                    BigRational::new(BigInt::from(q.pow(e)), BigInt::from(q - 1))
                );
                assert_eq!(
                    surface_circle_stack_count(1, g, &f, &l).unwrap().value,
                    rat(qm1.pow(e))
                );
            }
        }
    }

    #[test]
    fn limits_enforced() {
        let l = Limits::with_max(100);
        let f3 = field(3, 1);
        assert!(matches!(
            brute_force_count(
                2,
                1,
                &f3,
                &BruteTarget::Multiplicative(Matrix::identity(2, &f3)),
                &l
            ),
            Err(Error::EnumerationTooLarge { .. })
        ));
        assert!(matches!(
            additive_mu_stack_count(2, 1, &f3, &l),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn brute_force_small_sanity() {
        let l = Limits::default();
        let f3 = field(3, 1);
        let one = Matrix::identity(1, &f3);
        assert_eq!(
            brute_force_count(1, 1, &f3, &BruteTarget::Multiplicative(one), &l)
                .unwrap()
                .to_u64(),
            Some(4)
        );
        let f2 = field(2, 1);
        let id2 = Matrix::identity(2, &f2);
        assert_eq!(
            brute_force_count(2, 1, &f2, &BruteTarget::Multiplicative(id2), &l)
                .unwrap()
                .to_u64(),
            Some(18)
        );
    }
}
