//! Representation spaces of quiver presentations over finite fields, and the
//! count-level identity checks: dimensional reduction for a cut, the
//! Morita/2d-Jacobi comparison with the untwisted stack, and the
//! surface x circle comparison for the full Jacobi algebra.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charcount::{stack_count, surface_circle_stack_count, untwisted_count};
use crate::error::{Error, Result};
use crate::ffield::{collect_gl, gl_order, FiniteField, Matrix, MatrixStream};
use crate::limits::Limits;
use crate::tileforge::{
    cyclic_derivative, dual_quiver, find_cuts, jacobi_presentation, potential_of, two_dim_jacobi,
    BraneTiling, Cut, PathSum, Potential, Presentation, Quiver,
};

/// A representation-counting problem: a presentation, a dimension vector,
/// and whether its relations are imposed.
#[derive(Debug, Clone)]
pub struct RepProblem {
    pub presentation: Presentation,
    pub gamma: Vec<usize>,
    pub impose_relations: bool,
}

/// Exact atlas solutions, the gauge group order, and their quotient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtlasCount {
    pub raw: BigUint,
    pub group_order: BigUint,
    pub stack_value: BigRational,
}

/// atlas_dim = sum over arrows of gamma_s * gamma_t; stack_dim subtracts the
/// gauge dimension sum gamma_i^2.
pub fn rep_space_dims(q: &Quiver, gamma: &[usize]) -> (u64, i64) {
    let atlas: u64 = q
        .arrows
        .iter()
        .map(|a| (gamma[a.source] * gamma[a.target]) as u64)
        .sum();
    let gauge: u64 = gamma.iter().map(|&g| (g * g) as u64).sum();
    (atlas, atlas as i64 - gauge as i64)
}

fn scalar_from_int(c: i64, f: &FiniteField) -> crate::ffield::FieldElement {
    let p = f.p() as i64;
    f.element_from_int(c.rem_euclid(p) as u64)
}

/// Product along a path word (left-to-right composition: the word [a, b]
/// means a then b, so the matrix is M_b * M_a).  Empty word = identity.
fn eval_path(word: &[usize], assign: &[Matrix], n: usize, f: &FiniteField) -> Matrix {
    let mut m = Matrix::identity(n, f);
    for &a in word {
        m = assign[a].mul(&m, f);
    }
    m
}

fn path_sum_vanishes(s: &PathSum, assign: &[Matrix], n: usize, f: &FiniteField) -> bool {
    let mut acc = Matrix::zero(n);
    for (c, word) in &s.terms {
        let m = eval_path(word, assign, n, f).scale(scalar_from_int(*c, f), f);
        acc = acc.add(&m, f);
    }
    acc.is_zero_matrix()
}

/// tr W evaluated at an assignment.
fn trace_of_potential(w: &Potential, assign: &[Matrix], n: usize, f: &FiniteField) -> crate::ffield::FieldElement {
    let mut acc = f.zero();
    for (sign, word) in &w.terms {
        let t = eval_path(word, assign, n, f).trace(f);
        let signed = f.mul(t, scalar_from_int(*sign as i64, f));
        acc = f.add(acc, signed);
    }
    acc
}

fn uniform_dim(q: &Quiver, gamma: &[usize]) -> Result<usize> {
    if gamma.len() != q.vertices {
        return Err(Error::UnsupportedDimensionVector(format!(
            "dimension vector has {} entries for {} vertices",
            gamma.len(),
            q.vertices
        )));
    }
    for a in &q.arrows {
        if gamma[a.source] != gamma[a.target] {
            return Err(Error::UnsupportedDimensionVector(format!(
                "arrow {} -> {} joins dimensions {} and {}",
                a.source, a.target, gamma[a.source], gamma[a.target]
            )));
        }
    }
    Ok(gamma.iter().copied().max().unwrap_or(0))
}

fn arrow_candidates(n: usize, f: &FiniteField, invertible: bool, limits: &Limits) -> Result<Vec<Matrix>> {
    if invertible {
        let order: u128 = (&gl_order(n, f)).try_into().unwrap_or(u128::MAX);
        limits.check_enumeration(order)?;
        collect_gl(n, f, limits.enumeration)
    } else {
        let total = (f.q() as u128).pow((n * n) as u32);
        limits.check_enumeration(total)?;
        Ok(MatrixStream::all_matrices(n, f).collect())
    }
}

/// Count assignments of one matrix per arrow (invertible over Q'), filtered
/// by the presentation's relations when imposed.
pub fn count_reps(problem: &RepProblem, field: &FiniteField, limits: &Limits) -> Result<AtlasCount> {
    let q = &problem.presentation.quiver;
    let n = uniform_dim(q, &problem.gamma)?;
    let relations: &[PathSum] = if problem.impose_relations {
        &problem.presentation.relations
    } else {
        &[]
    };
    let candidates: Vec<Vec<Matrix>> = q
        .arrows
        .iter()
        .enumerate()
        .map(|(i, _)| arrow_candidates(n, field, q.invertible.contains(&i), limits))
        .collect::<Result<_>>()?;
    let iterations = candidates
        .iter()
        .map(|c| c.len() as u128)
        .try_fold(1u128, |acc, l| acc.checked_mul(l))
        .unwrap_or(u128::MAX);
    limits.check_brute_force(iterations)?;

    let raw = if candidates.is_empty() {
        // no arrows: the single empty assignment satisfies everything
        BigUint::one()
    } else {
        candidates[0]
            .par_iter()
            .map(|first| {
                let mut assign: Vec<Matrix> = vec![first.clone(); q.arrows.len()];
                assign[0] = first.clone();
                count_rest(1, &candidates, &mut assign, relations, n, field)
            })
            .reduce(BigUint::zero, |a, b| a + b)
    };

    let mut group_order = BigUint::one();
    for &g in &problem.gamma {
        group_order *= gl_order(g, field);
    }
    let stack_value = BigRational::from(BigInt::from(raw.clone()))
        / BigRational::from(BigInt::from(group_order.clone()));
    Ok(AtlasCount {
        raw,
        group_order,
        stack_value,
    })
}

fn count_rest(
    next: usize,
    candidates: &[Vec<Matrix>],
    assign: &mut Vec<Matrix>,
    relations: &[PathSum],
    n: usize,
    field: &FiniteField,
) -> BigUint {
    if next == candidates.len() {
        let ok = relations
            .iter()
            .all(|r| path_sum_vanishes(r, assign, n, field));
        return if ok { BigUint::one() } else { BigUint::zero() };
    }
    let mut acc = BigUint::zero();
    for m in &candidates[next] {
        assign[next] = m.clone();
        acc += count_rest(next + 1, candidates, assign, relations, n, field);
    }
    acc
}

/// JSON-facing result of one identity check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub inputs: serde_json::Value,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
}

impl CheckReport {
    pub fn ensure(self) -> Result<CheckReport> {
        if self.pass {
            Ok(self)
        } else {
            Err(Error::IdentityFailure(format!(
                "{}: lhs {} != rhs {} for {}",
                self.check, self.lhs, self.rhs, self.inputs
            )))
        }
    }
}

/// Count shadow of dimensional reduction: with f = tr W linear in the cut
/// coordinates, #f^{-1}(0) = q^{d-1} #Y + q^{d-1}(q-1) #Z, where Y is the
/// atlas with cut arrows deleted, Z the vanishing locus of the cut
/// derivatives inside Y, and d the cut fiber dimension.
pub fn dimred_count_check(
    q: &Quiver,
    w: &Potential,
    cut: &Cut,
    gamma: &[usize],
    field: &FiniteField,
    limits: &Limits,
) -> Result<CheckReport> {
    let n = uniform_dim(q, gamma)?;
    if !find_cuts(q, w).iter().any(|c| c == cut) {
        return Err(Error::NoCut);
    }
    let d: u64 = cut
        .iter()
        .map(|&a| (gamma[q.arrows[a].source] * gamma[q.arrows[a].target]) as u64)
        .sum();
    let qq = BigUint::from(field.q());

    // candidate lists: non-cut arrows invertible, cut arrows free
    let free: Vec<usize> = (0..q.arrows.len()).filter(|a| !cut.contains(a)).collect();
    let cut_arrows: Vec<usize> = cut.iter().copied().collect();
    let free_candidates = arrow_candidates(n, field, true, limits)?;
    let cut_candidates = arrow_candidates(n, field, false, limits)?;

    let free_total = (free_candidates.len() as u128)
        .checked_pow(free.len() as u32)
        .unwrap_or(u128::MAX);
    let full_total = free_total
        .checked_mul(
            (cut_candidates.len() as u128)
                .checked_pow(cut_arrows.len() as u32)
                .unwrap_or(u128::MAX),
        )
        .unwrap_or(u128::MAX);
    limits.check_brute_force(full_total)?;

    let cut_relations: Vec<PathSum> = cut_arrows.iter().map(|&a| cyclic_derivative(w, a)).collect();

    // one pass over Y; for each point, count the cut fibers with tr W = 0
    let (lhs, y, z) = free_candidates
        .par_iter()
        .map(|first| {
            let mut assign = vec![Matrix::zero(n); q.arrows.len()];
            let mut totals = (BigUint::zero(), BigUint::zero(), BigUint::zero());
            assign[free[0]] = first.clone();
            dimred_scan(
                1,
                &free,
                &free_candidates,
                &cut_arrows,
                &cut_candidates,
                &cut_relations,
                q,
                w,
                n,
                field,
                &mut assign,
                &mut totals,
            );
            totals
        })
        .reduce(
            || (BigUint::zero(), BigUint::zero(), BigUint::zero()),
            |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2),
        );

    let rhs = if d == 0 {
        // no cut coordinates: f is identically zero on Y and Z = Y
        y.clone()
    } else {
        qq.pow(d as u32 - 1) * (&y + (&qq - BigUint::one()) * &z)
    };
    CheckReport {
        check: "dimred".into(),
        inputs: serde_json::json!({
            "cut": cut_arrows,
            "gamma": gamma,
            "p": field.p(),
            "k": field.k(),
            "d": d,
            "y": y.to_string(),
            "z": z.to_string(),
        }),
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
        pass: lhs == rhs,
    }
    .ensure()
}

#[allow(clippy::too_many_arguments)]
fn dimred_scan(
    next: usize,
    free: &[usize],
    free_candidates: &[Matrix],
    cut_arrows: &[usize],
    cut_candidates: &[Matrix],
    cut_relations: &[PathSum],
    q: &Quiver,
    w: &Potential,
    n: usize,
    field: &FiniteField,
    assign: &mut Vec<Matrix>,
    totals: &mut (BigUint, BigUint, BigUint),
) {
    if next < free.len() {
        for m in free_candidates {
            assign[free[next]] = m.clone();
            dimred_scan(
                next + 1,
                free,
                free_candidates,
                cut_arrows,
                cut_candidates,
                cut_relations,
                q,
                w,
                n,
                field,
                assign,
                totals,
            );
        }
        return;
    }
    // a Y point is fixed
    totals.1 += BigUint::one();
    if cut_relations
        .iter()
        .all(|r| path_sum_vanishes(r, assign, n, field))
    {
        totals.2 += BigUint::one();
    }
    // LHS: enumerate the cut fiber
    let mut fiber = vec![0usize; cut_arrows.len()];
    loop {
        for (slot, &idx) in fiber.iter().enumerate() {
            assign[cut_arrows[slot]] = cut_candidates[idx].clone();
        }
        if field.is_zero(trace_of_potential(w, assign, n, field)) {
            totals.0 += BigUint::one();
        }
        // odometer
        let mut carry = 0usize;
        loop {
            if carry == fiber.len() {
                return;
            }
            fiber[carry] += 1;
            if fiber[carry] < cut_candidates.len() {
                break;
            }
            fiber[carry] = 0;
            carry += 1;
        }
    }
}

/// Stack count of rank-n modules of the 2d Jacobi algebra of a tiling versus
/// the untwisted character-stack count of its surface.
pub fn morita_count_check(
    t: &BraneTiling,
    n: usize,
    field: &FiniteField,
    limits: &Limits,
) -> Result<CheckReport> {
    let q = dual_quiver(t);
    let w = potential_of(t, &q);
    let cut = find_cuts(&q, &w).into_iter().next().ok_or(Error::NoCut)?;
    let pres = two_dim_jacobi(&q, &w, &cut)?;
    let gamma = vec![n; pres.quiver.vertices];
    let lhs = count_reps(
        &RepProblem {
            presentation: pres,
            gamma,
            impose_relations: true,
        },
        field,
        limits,
    )?;
    let rhs = stack_count(&untwisted_count(n, t.genus, field, limits)?)?;
    CheckReport {
        check: "morita".into(),
        inputs: serde_json::json!({
            "tiling_genus": t.genus,
            "n": n,
            "p": field.p(),
            "k": field.k(),
            "cut": cut.iter().collect::<Vec<_>>(),
        }),
        lhs: lhs.stack_value.to_string(),
        rhs: rhs.value.to_string(),
        pass: lhs.stack_value == rhs.value,
    }
    .ensure()
}

/// Stack count of rank-n modules of the full localized Jacobi algebra versus
/// the surface x circle groupoid count.
pub fn gtrue_count_check(
    t: &BraneTiling,
    n: usize,
    field: &FiniteField,
    limits: &Limits,
) -> Result<CheckReport> {
    let q = dual_quiver(t);
    let w = potential_of(t, &q);
    let pres = jacobi_presentation(&q, &w);
    let gamma = vec![n; pres.quiver.vertices];
    let lhs = count_reps(
        &RepProblem {
            presentation: pres,
            gamma,
            impose_relations: true,
        },
        field,
        limits,
    )?;
    let rhs = surface_circle_stack_count(n, t.genus, field, limits)?;
    CheckReport {
        check: "gtrue".into(),
        inputs: serde_json::json!({
            "tiling_genus": t.genus,
            "n": n,
            "p": field.p(),
            "k": field.k(),
        }),
        lhs: lhs.stack_value.to_string(),
        rhs: rhs.value.to_string(),
        pass: lhs.stack_value == rhs.value,
    }
    .ensure()
}
