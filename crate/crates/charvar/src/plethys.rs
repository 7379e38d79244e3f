//! Truncated power series in x over exact q-coefficients, Adams operations,
//! plethystic Exp/Log, and the verifier for the central product identity
//! relating twisted and untwisted E-series.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::charcount::{twisted_count_with_root, untwisted_count};
use crate::error::{Error, Result};
use crate::exactq::{degree_bound_for, interpolate, InterpolationProblem, LaurentPoly, RatFunc};
use crate::ffield::{gl_order, FieldElement, FiniteField};
use crate::limits::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Twisted,
    Untwisted,
}

/// Coefficient domain for truncated series: exact rational functions of q, or
/// towers of exact values at q = p^j.
pub trait PlethCoeff: Clone + std::fmt::Debug {
    type Ctx: Clone + PartialEq + std::fmt::Debug;

    fn zero(ctx: &Self::Ctx) -> Self;
    fn one(ctx: &Self::Ctx) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, r: &BigRational) -> Self;
    /// q -> q^k; `required` is the depth the result must support.
    fn adams(&self, k: u64, required: u64) -> Result<Self>;
    /// Exact agreement on at least depths 1..=required.
    fn agrees(&self, other: &Self, required: u64) -> Result<bool>;
    fn render(&self) -> String;
}

impl PlethCoeff for RatFunc {
    type Ctx = ();

    fn zero(_: &()) -> RatFunc {
        RatFunc::zero()
    }
    fn one(_: &()) -> RatFunc {
        RatFunc::one()
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn add(&self, other: &RatFunc) -> RatFunc {
        RatFunc::add(self, other)
    }
    fn mul(&self, other: &RatFunc) -> RatFunc {
        RatFunc::mul(self, other)
    }
    fn neg(&self) -> RatFunc {
        RatFunc::neg(self)
    }
    fn scale(&self, r: &BigRational) -> RatFunc {
        self.scale_rational(r)
    }
    fn adams(&self, k: u64, _required: u64) -> Result<RatFunc> {
        Ok(RatFunc::adams(self, k as i64))
    }
    fn agrees(&self, other: &RatFunc, _required: u64) -> Result<bool> {
        Ok(self == other)
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

/// Values of a q-coefficient at q = p^j for the depths j the pipeline has
/// counted.  Adams operations read the value at q = p^{kj}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumericTower {
    pub p: u64,
    pub values: BTreeMap<u64, BigRational>,
}

/// Depth requirements of the tower coefficients in a series: `Uniform(j)`
/// demands depth j everywhere; `Harmonic(n)` demands depth n/m at x-degree m
/// (the profile the count pipeline can actually supply).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepthProfile {
    Uniform(u64),
    Harmonic(u64),
}

impl DepthProfile {
    pub fn required(&self, degree: usize) -> u64 {
        match *self {
            DepthProfile::Uniform(j) => j,
            DepthProfile::Harmonic(n) => {
                if degree == 0 {
                    n
                } else {
                    (n / degree as u64).max(1)
                }
            }
        }
    }

    pub fn max_depth(&self) -> u64 {
        match *self {
            DepthProfile::Uniform(j) => j,
            DepthProfile::Harmonic(n) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerCtx {
    pub p: u64,
    pub profile: DepthProfile,
}

impl NumericTower {
    pub fn constant(p: u64, depth: u64, v: BigRational) -> NumericTower {
        NumericTower {
            p,
            values: (1..=depth).map(|j| (j, v.clone())).collect(),
        }
    }

    pub fn depth(&self) -> u64 {
        self.values.keys().next_back().copied().unwrap_or(0)
    }
}

impl PlethCoeff for NumericTower {
    type Ctx = TowerCtx;

    fn zero(ctx: &TowerCtx) -> NumericTower {
        NumericTower::constant(ctx.p, ctx.profile.max_depth(), BigRational::zero())
    }
    fn one(ctx: &TowerCtx) -> NumericTower {
        NumericTower::constant(ctx.p, ctx.profile.max_depth(), BigRational::one())
    }
    fn is_zero(&self) -> bool {
        self.values.values().all(|v| v.is_zero())
    }
    fn add(&self, other: &NumericTower) -> NumericTower {
        assert_eq!(self.p, other.p);
        NumericTower {
            p: self.p,
            values: self
                .values
                .iter()
                .filter_map(|(j, v)| other.values.get(j).map(|w| (*j, v + w)))
                .collect(),
        }
    }
    fn mul(&self, other: &NumericTower) -> NumericTower {
        assert_eq!(self.p, other.p);
        NumericTower {
            p: self.p,
            values: self
                .values
                .iter()
                .filter_map(|(j, v)| other.values.get(j).map(|w| (*j, v * w)))
                .collect(),
        }
    }
    fn neg(&self) -> NumericTower {
        NumericTower {
            p: self.p,
            values: self.values.iter().map(|(j, v)| (*j, -v)).collect(),
        }
    }
    fn scale(&self, r: &BigRational) -> NumericTower {
        NumericTower {
            p: self.p,
            values: self.values.iter().map(|(j, v)| (*j, v * r)).collect(),
        }
    }
    fn adams(&self, k: u64, required: u64) -> Result<NumericTower> {
        let mut values = BTreeMap::new();
        for j in 1..=self.depth() {
            if let Some(v) = self.values.get(&(k * j)) {
                values.insert(j, v.clone());
            }
        }
        for j in 1..=required {
            if !values.contains_key(&j) {
                return Err(Error::TowerTooShallow { needed: k * j });
            }
        }
        Ok(NumericTower { p: self.p, values })
    }
    fn agrees(&self, other: &NumericTower, required: u64) -> Result<bool> {
        for j in 1..=required {
            match (self.values.get(&j), other.values.get(&j)) {
                (Some(a), Some(b)) => {
                    if a != b {
                        return Ok(false);
                    }
                }
                _ => return Err(Error::TowerTooShallow { needed: j }),
            }
        }
        // any further shared depths must agree as well
        for (j, v) in &self.values {
            if let Some(w) = other.values.get(j) {
                if v != w {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
    fn render(&self) -> String {
        let mut out = String::from("{");
        for (i, (j, v)) in self.values.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "q={}^{}: {}", self.p, j, v);
        }
        out.push('}');
        out
    }
}

/// Power series in x truncated at degree `trunc`, coefficients in C.
#[derive(Debug, Clone)]
pub struct TruncSeries<C: PlethCoeff> {
    pub trunc: usize,
    pub ctx: C::Ctx,
    pub coeffs: Vec<C>,
}

impl<C: PlethCoeff> TruncSeries<C> {
    pub fn zero(ctx: C::Ctx, trunc: usize) -> TruncSeries<C> {
        TruncSeries {
            trunc,
            coeffs: vec![C::zero(&ctx); trunc + 1],
            ctx,
        }
    }

    pub fn one(ctx: C::Ctx, trunc: usize) -> TruncSeries<C> {
        let mut s = Self::zero(ctx, trunc);
        s.coeffs[0] = C::one(&s.ctx);
        s
    }

    pub fn monomial(ctx: C::Ctx, trunc: usize, degree: usize, c: C) -> TruncSeries<C> {
        let mut s = Self::zero(ctx, trunc);
        if degree <= trunc {
            s.coeffs[degree] = c;
        }
        s
    }

    pub fn coeff(&self, degree: usize) -> &C {
        &self.coeffs[degree]
    }

    pub fn add(&self, other: &TruncSeries<C>) -> TruncSeries<C> {
        assert_eq!(self.trunc, other.trunc);
        TruncSeries {
            trunc: self.trunc,
            ctx: self.ctx.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &TruncSeries<C>) -> TruncSeries<C> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TruncSeries<C> {
        TruncSeries {
            trunc: self.trunc,
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn scale(&self, r: &BigRational) -> TruncSeries<C> {
        TruncSeries {
            trunc: self.trunc,
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|c| c.scale(r)).collect(),
        }
    }

    pub fn mul(&self, other: &TruncSeries<C>) -> TruncSeries<C> {
        assert_eq!(self.trunc, other.trunc);
        let mut out = Self::zero(self.ctx.clone(), self.trunc);
        for i in 0..=self.trunc {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=self.trunc - i {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                out.coeffs[i + j] = out.coeffs[i + j].add(&self.coeffs[i].mul(&other.coeffs[j]));
            }
        }
        out
    }
}

/// psi_k: x-degree n moves to k*n, coefficients transformed by q -> q^k.
pub fn adams<C: PlethCoeff>(f: &TruncSeries<C>, k: u64, profile_of: impl Fn(usize) -> u64) -> Result<TruncSeries<C>> {
    assert!(k >= 1);
    let mut out = TruncSeries::zero(f.ctx.clone(), f.trunc);
    for n in 0..=f.trunc {
        if f.coeffs[n].is_zero() {
            continue;
        }
        let m = n * k as usize;
        if m > f.trunc {
            continue;
        }
        out.coeffs[m] = f.coeffs[n].adams(k, profile_of(m))?;
    }
    Ok(out)
}

fn profile_fn<C: PlethCoeff>(ctx: &C::Ctx) -> impl Fn(usize) -> u64 + '_ {
    // only towers have depth requirements; rational functions ignore it
    let _ = ctx;
    move |_| 1
}

/// Adams with the depth profile read from the context where applicable.
pub fn adams_series(f: &TruncSeries<RatFunc>, k: u64) -> Result<TruncSeries<RatFunc>> {
    adams(f, k, profile_fn::<RatFunc>(&f.ctx))
}

pub fn adams_tower(f: &TruncSeries<NumericTower>, k: u64) -> Result<TruncSeries<NumericTower>> {
    let profile = f.ctx.profile;
    adams(f, k, move |m| profile.required(m))
}

pub trait AdamsDispatch: PlethCoeff + Sized {
    fn adams_on(f: &TruncSeries<Self>, k: u64) -> Result<TruncSeries<Self>>;
}

impl AdamsDispatch for RatFunc {
    fn adams_on(f: &TruncSeries<RatFunc>, k: u64) -> Result<TruncSeries<RatFunc>> {
        adams_series(f, k)
    }
}

impl AdamsDispatch for NumericTower {
    fn adams_on(f: &TruncSeries<NumericTower>, k: u64) -> Result<TruncSeries<NumericTower>> {
        adams_tower(f, k)
    }
}

/// Exp(f) = exp(sum_k psi_k(f)/k), truncated.
pub fn pleth_exp<C: AdamsDispatch>(f: &TruncSeries<C>) -> Result<TruncSeries<C>> {
    if !f.coeffs[0].is_zero() {
        return Err(Error::NonzeroConstantTerm);
    }
    let n = f.trunc;
    let mut s = TruncSeries::zero(f.ctx.clone(), n);
    for k in 1..=n.max(1) as u64 {
        let psi = C::adams_on(f, k)?;
        let inv_k = BigRational::new(BigInt::one(), BigInt::from(k));
        s = s.add(&psi.scale(&inv_k));
    }
    // exp(s) = sum s^i / i!
    let mut acc = TruncSeries::one(f.ctx.clone(), n);
    let mut term = TruncSeries::one(f.ctx.clone(), n);
    for i in 1..=n as u64 {
        let inv_i = BigRational::new(BigInt::one(), BigInt::from(i));
        term = term.mul(&s).scale(&inv_i);
        acc = acc.add(&term);
    }
    Ok(acc)
}

fn moebius(mut k: u64) -> i64 {
    let mut mu = 1i64;
    let mut d = 2u64;
    while d * d <= k {
        if k % d == 0 {
            k /= d;
            if k % d == 0 {
                return 0;
            }
            mu = -mu;
        }
        d += 1;
    }
    if k > 1 {
        mu = -mu;
    }
    mu
}

/// Log, the inverse of Exp: f = sum_k mu(k)/k * psi_k(log F).
pub fn pleth_log<C: AdamsDispatch>(big_f: &TruncSeries<C>) -> Result<TruncSeries<C>> {
    let one = C::one(&big_f.ctx);
    if !big_f.coeffs[0].agrees(&one, 1)? {
        return Err(Error::BadConstantTerm);
    }
    let n = big_f.trunc;
    let mut g = big_f.clone();
    g.coeffs[0] = g.coeffs[0].add(&one.neg());
    // log F = sum (-1)^{i+1} G^i / i
    let mut log = TruncSeries::zero(big_f.ctx.clone(), n);
    let mut pow = TruncSeries::one(big_f.ctx.clone(), n);
    for i in 1..=n as u64 {
        pow = pow.mul(&g);
        let sign = if i % 2 == 1 { 1 } else { -1 };
        let c = BigRational::new(BigInt::from(sign), BigInt::from(i));
        log = log.add(&pow.scale(&c));
    }
    let mut out = TruncSeries::zero(big_f.ctx.clone(), n);
    for k in 1..=n.max(1) as u64 {
        let mu = moebius(k);
        if mu == 0 {
            continue;
        }
        let psi = C::adams_on(&log, k)?;
        let c = BigRational::new(BigInt::from(mu), BigInt::from(k));
        out = out.add(&psi.scale(&c));
    }
    Ok(out)
}

/// One side of the identity: the series of shifted stack counts.
#[derive(Debug, Clone)]
pub struct ESeries<C: PlethCoeff> {
    pub side: Side,
    pub g: usize,
    pub series: TruncSeries<C>,
}

/// |GL_n| as a polynomial in q.
pub fn gl_order_poly(n: usize) -> LaurentPoly {
    let mut out = LaurentPoly::one();
    for i in 0..n {
        let factor = LaurentPoly::term(BigInt::one(), n as i64)
            .sub(&LaurentPoly::term(BigInt::one(), i as i64));
        out = out.mul(&factor);
    }
    out
}

fn shift_exponent(g: usize, n: usize) -> i64 {
    (1 - g as i64) * (n * n) as i64
}

/// Polynomial-mode assembly: coefficient n is q^{(1-g)n^2} * count_n / |GL_n|
/// with interpolated solution-count polynomials.
pub fn assemble_eseries_poly(
    side: Side,
    g: usize,
    trunc: usize,
    counts: &BTreeMap<usize, LaurentPoly>,
) -> Result<ESeries<RatFunc>> {
    let mut series = TruncSeries::zero((), trunc);
    if side == Side::Untwisted {
        series.coeffs[0] = RatFunc::one();
    }
    for n in 1..=trunc {
        let poly = counts
            .get(&n)
            .ok_or_else(|| Error::MissingCounts(format!("count polynomial for n = {n}")))?;
        let num = poly.shift_by_q_power(shift_exponent(g, n));
        series.coeffs[n] = RatFunc::new(num, gl_order_poly(n))?;
    }
    Ok(ESeries { side, g, series })
}

/// Numeric-mode assembly from solution counts at q = p^j, keyed by (n, j).
pub fn assemble_eseries_numeric(
    side: Side,
    g: usize,
    trunc: usize,
    p: u64,
    counts: &BTreeMap<(usize, u64), BigRational>,
) -> Result<ESeries<NumericTower>> {
    let ctx = TowerCtx {
        p,
        profile: DepthProfile::Harmonic(trunc as u64),
    };
    let mut series = TruncSeries::zero(ctx.clone(), trunc);
    if side == Side::Untwisted {
        series.coeffs[0] = NumericTower::one(&ctx);
    }
    for n in 1..=trunc {
        let depth = trunc as u64 / n as u64;
        let mut values = BTreeMap::new();
        for j in 1..=depth {
            let count = counts.get(&(n, j)).ok_or_else(|| {
                Error::MissingCounts(format!("solution count for n = {n} at q = {p}^{j}"))
            })?;
            let field = FiniteField::new(p, j as usize)?;
            let q = BigRational::from(BigInt::from(field.q()));
            let shift = q.pow(shift_exponent(g, n) as i32);
            let order = BigRational::from(BigInt::from(gl_order(n, &field)));
            values.insert(j, shift * count / order);
        }
        series.coeffs[n] = NumericTower { p, values };
    }
    Ok(ESeries { side, g, series })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegreeCheck {
    pub degree: usize,
    pub left: String,
    pub right: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub g: usize,
    pub trunc: usize,
    pub mode: String,
    pub checks: Vec<DegreeCheck>,
    pub pass: bool,
}

/// Exp(twisted series) compared coefficientwise with the untwisted series.
pub fn verify_exp_identity<C: AdamsDispatch>(
    twisted: &ESeries<C>,
    untwisted: &ESeries<C>,
    mode: &str,
    required_depth: impl Fn(usize) -> u64,
) -> Result<VerificationReport> {
    assert_eq!(twisted.side, Side::Twisted);
    assert_eq!(untwisted.side, Side::Untwisted);
    assert_eq!(twisted.g, untwisted.g);
    let exp = pleth_exp(&twisted.series)?;
    let mut checks = Vec::new();
    let mut pass = true;
    for degree in 0..=exp.trunc {
        let left = exp.coeff(degree);
        let right = untwisted.series.coeff(degree);
        let ok = left.agrees(right, required_depth(degree))?;
        pass &= ok;
        checks.push(DegreeCheck {
            degree,
            left: left.render(),
            right: right.render(),
            pass: ok,
        });
    }
    Ok(VerificationReport {
        g: twisted.g,
        trunc: exp.trunc,
        mode: mode.to_string(),
        checks,
        pass,
    })
}

fn canonical_root(field: &FiniteField, n: u64) -> Result<FieldElement> {
    Ok(field.primitive_root_of_unity(n)?.element)
}

fn solution_value(
    side: Side,
    n: usize,
    g: usize,
    field: &FiniteField,
    limits: &Limits,
    root: &dyn Fn(&FiniteField, u64) -> Result<FieldElement>,
) -> Result<BigRational> {
    let rec = match side {
        Side::Twisted => {
            let zeta = root(field, n as u64)?;
            twisted_count_with_root(n, g, field, zeta, limits)?
        }
        Side::Untwisted => untwisted_count(n, g, field, limits)?,
    };
    Ok(rec.value)
}

/// Interpolate the solution-count polynomial for one side and rank from
/// counts at the sample fields, holdout-checked.
pub fn interpolated_count_poly(
    side: Side,
    n: usize,
    g: usize,
    samples: &[(u64, usize)],
    holdout: Option<(u64, usize)>,
    limits: &Limits,
) -> Result<LaurentPoly> {
    let mut points = Vec::new();
    for &(p, k) in samples {
        let field = FiniteField::new(p, k)?;
        let v = solution_value(side, n, g, &field, limits, &canonical_root)?;
        debug_assert!(v.is_integer());
        points.push((BigInt::from(field.q()), v.to_integer()));
    }
    let holdout = match holdout {
        Some((p, k)) => {
            let field = FiniteField::new(p, k)?;
            let v = solution_value(side, n, g, &field, limits, &canonical_root)?;
            Some((BigInt::from(field.q()), v.to_integer()))
        }
        None => None,
    };
    interpolate(&InterpolationProblem {
        samples: points,
        degree_bound: degree_bound_for(n, g),
        holdout,
    })
}

/// Polynomial-mode pipeline: count, interpolate (holdout-checked), assemble,
/// verify.
pub fn verify_exp_polynomial(
    g: usize,
    trunc: usize,
    samples: &[(u64, usize)],
    holdout: Option<(u64, usize)>,
    limits: &Limits,
) -> Result<VerificationReport> {
    let needed = degree_bound_for(trunc, g) + 1;
    if samples.len() < needed {
        return Err(Error::InsufficientSamples {
            needed,
            got: samples.len(),
        });
    }
    let mut twisted = BTreeMap::new();
    let mut untwisted = BTreeMap::new();
    for n in 1..=trunc {
        twisted.insert(n, interpolated_count_poly(Side::Twisted, n, g, samples, holdout, limits)?);
        untwisted.insert(
            n,
            interpolated_count_poly(Side::Untwisted, n, g, samples, holdout, limits)?,
        );
    }
    let a = assemble_eseries_poly(Side::Twisted, g, trunc, &twisted)?;
    let b = assemble_eseries_poly(Side::Untwisted, g, trunc, &untwisted)?;
    verify_exp_identity(&a, &b, "polynomial", |_| 1)
}

/// Numeric-mode pipeline over the tower q = p^j, n*j <= trunc.
pub fn verify_exp_numeric(
    g: usize,
    trunc: usize,
    p: u64,
    limits: &Limits,
) -> Result<VerificationReport> {
    verify_exp_numeric_with_root(g, trunc, p, limits, &canonical_root)
}

/// Same, with an explicit choice of twisting root per (field, n): used to
/// check the outcome is independent of the primitive-root choice.
pub fn verify_exp_numeric_with_root(
    g: usize,
    trunc: usize,
    p: u64,
    limits: &Limits,
    root: &dyn Fn(&FiniteField, u64) -> Result<FieldElement>,
) -> Result<VerificationReport> {
    for n in 2..=trunc as u64 {
        if (p - 1) % n != 0 {
            return Err(Error::NoRootOfUnity {
                order: n,
                q: p as u128,
            });
        }
    }
    let mut twisted = BTreeMap::new();
    let mut untwisted = BTreeMap::new();
    for n in 1..=trunc {
        for j in 1..=(trunc as u64 / n as u64) {
            let field = FiniteField::new(p, j as usize)?;
            twisted.insert(
                (n, j),
                solution_value(Side::Twisted, n, g, &field, limits, root)?,
            );
            untwisted.insert(
                (n, j),
                solution_value(Side::Untwisted, n, g, &field, limits, root)?,
            );
        }
    }
    let a = assemble_eseries_numeric(Side::Twisted, g, trunc, p, &twisted)?;
    let b = assemble_eseries_numeric(Side::Untwisted, g, trunc, p, &untwisted)?;
    let profile = DepthProfile::Harmonic(trunc as u64);
    verify_exp_identity(&a, &b, "numeric", move |m| profile.required(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn qm1() -> RatFunc {
        RatFunc::from_poly(LaurentPoly::from_coeffs(&[-1, 1]))
    }

    fn x_series(c: RatFunc, trunc: usize) -> TruncSeries<RatFunc> {
        TruncSeries::monomial((), trunc, 1, c)
    }

    fn rand_series(rng: &mut ChaCha8Rng, trunc: usize) -> TruncSeries<RatFunc> {
        let mut s = TruncSeries::zero((), trunc);
        for n in 1..=trunc {
            if rng.gen_bool(0.6) {
                let mut p = LaurentPoly::zero();
                for e in -1i64..3 {
                    p = p.add(&LaurentPoly::term(
                        BigInt::from(rng.gen_range(-3i64..4)),
                        e,
                    ));
                }
                s.coeffs[n] = RatFunc::from_poly(p);
            }
        }
        s
    }

    #[test]
    fn adams_examples() {
        // q*x^2 under psi_2 -> q^2*x^4
        let f = TruncSeries::monomial((), 4, 2, RatFunc::from_poly(LaurentPoly::q()));
        let g = adams_series(&f, 2).unwrap();
        assert_eq!(
            *g.coeff(4),
            RatFunc::from_poly(LaurentPoly::term(BigInt::one(), 2))
        );
        // x under psi_3 -> x^3
        let f = x_series(RatFunc::one(), 3);
        let g = adams_series(&f, 3).unwrap();
        assert_eq!(*g.coeff(3), RatFunc::one());
        assert!(g.coeff(1).is_zero());
    }

    #[test]
    fn adams_tower_too_shallow() {
        // depth-2 tower on a degree-2 term, psi_2: result must stay depth 2
        // but would need q = 3^4
        let ctx = TowerCtx {
            p: 3,
            profile: DepthProfile::Uniform(2),
        };
        let tower = NumericTower::constant(3, 2, BigRational::from(BigInt::from(5)));
        let f = TruncSeries::monomial(ctx, 8, 2, tower);
        assert!(matches!(
            adams_tower(&f, 2),
            Err(Error::TowerTooShallow { needed: 4 })
        ));
    }

    #[test]
    fn adams_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let f = rand_series(&mut rng, 12);
            let ab = adams_series(&adams_series(&f, 2).unwrap(), 3).unwrap();
            let once = adams_series(&f, 6).unwrap();
            for d in 0..=12 {
                assert_eq!(ab.coeff(d), once.coeff(d));
            }
        }
    }

    #[test]
    fn exp_of_single_generator() {
        // Exp(x) = 1 + x + x^2 + x^3
        let e = pleth_exp(&x_series(RatFunc::one(), 3)).unwrap();
        for d in 0..=3 {
            assert_eq!(*e.coeff(d), RatFunc::one(), "degree {d}");
        }
    }

    #[test]
    fn exp_of_two_generators() {
        // Exp(2x) = 1 + 2x + 3x^2 (dim Sym^2 of a 2-dim space)
        let e = pleth_exp(&x_series(RatFunc::from_int(2), 2)).unwrap();
        assert_eq!(*e.coeff(0), RatFunc::one());
        assert_eq!(*e.coeff(1), RatFunc::from_int(2));
        assert_eq!(*e.coeff(2), RatFunc::from_int(3));
    }

    #[test]
    fn exp_qm1_degree_two() {
        // Exp((q-1)x), x^2 coefficient = ((q-1)^2 + (q^2-1))/2 = q^2 - q
        let e = pleth_exp(&x_series(qm1(), 2)).unwrap();
        assert_eq!(
            *e.coeff(2),
            RatFunc::from_poly(LaurentPoly::from_coeffs(&[0, -1, 1]))
        );
    }

    #[test]
    fn exp_rejects_constant_term() {
        let s = TruncSeries::<RatFunc>::one((), 3);
        assert!(matches!(pleth_exp(&s), Err(Error::NonzeroConstantTerm)));
        let mut t = TruncSeries::<RatFunc>::zero((), 3);
        t.coeffs[0] = RatFunc::from_int(2);
        assert!(matches!(pleth_log(&t), Err(Error::BadConstantTerm)));
    }

    #[test]
    fn exp_log_roundtrip_and_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let f = rand_series(&mut rng, 6);
            let h = rand_series(&mut rng, 6);
            let ef = pleth_exp(&f).unwrap();
            // Log(Exp(f)) = f
            let back = pleth_log(&ef).unwrap();
            for d in 0..=6 {
                assert_eq!(back.coeff(d), f.coeff(d), "roundtrip degree {d}");
            }
            // Exp(f+h) = Exp(f) * Exp(h)
            let lhs = pleth_exp(&f.add(&h)).unwrap();
            let rhs = ef.mul(&pleth_exp(&h).unwrap());
            for d in 0..=6 {
                assert_eq!(lhs.coeff(d), rhs.coeff(d), "homomorphism degree {d}");
            }
        }
        // Log(1) = 0, Log(1 + x + ... + x^N) = x
        let log1 = pleth_log(&TruncSeries::<RatFunc>::one((), 4)).unwrap();
        assert!(log1.coeffs.iter().all(|c| c.is_zero()));
        let mut geo = TruncSeries::<RatFunc>::zero((), 4);
        for d in 0..=4 {
            geo.coeffs[d] = RatFunc::one();
        }
        let lg = pleth_log(&geo).unwrap();
        assert_eq!(*lg.coeff(1), RatFunc::one());
        for d in [0usize, 2, 3, 4] {
            assert!(lg.coeff(d).is_zero(), "degree {d}");
        }
    }

    #[test]
    fn moebius_values() {
        let expect = [1i64, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0];
        for (i, &m) in expect.iter().enumerate() {
            assert_eq!(moebius(i as u64 + 1), m, "mu({})", i + 1);
        }
    }

    #[test]
    fn eseries_closed_forms() {
        let l = Limits::default();
        // g=1, twisted: a_1 = (q-1)^2/(q-1) = q-1
        let a = {
            let mut m = BTreeMap::new();
            m.insert(
                1usize,
                interpolated_count_poly(
                    Side::Twisted,
                    1,
                    1,
                    &[(3, 1), (5, 1), (7, 1)],
                    Some((11, 1)),
                    &l,
                )
                .unwrap(),
            );
            assemble_eseries_poly(Side::Twisted, 1, 1, &m).unwrap()
        };
        assert_eq!(*a.series.coeff(1), qm1());

        // g=2, twisted n=1: q^{-1} (q-1)^4/(q-1) = (q-1)^3/q
        let mut m = BTreeMap::new();
        m.insert(
            1usize,
            interpolated_count_poly(
                Side::Twisted,
                1,
                2,
                &[(3, 1), (5, 1), (7, 1), (11, 1), (13, 1)],
                Some((17, 1)),
                &l,
            )
            .unwrap(),
        );
        let a2 = assemble_eseries_poly(Side::Twisted, 2, 1, &m).unwrap();
        let want = RatFunc::new(
            LaurentPoly::from_coeffs(&[-1, 1])
                .mul(&LaurentPoly::from_coeffs(&[-1, 1]))
                .mul(&LaurentPoly::from_coeffs(&[-1, 1]))
                .shift_by_q_power(-1),
            LaurentPoly::one(),
        )
        .unwrap();
        assert_eq!(*a2.series.coeff(1), want);
    }

    #[test]
    fn verify_polynomial_genus_one() {
        let l = Limits::default();
        let samples: Vec<(u64, usize)> = [3u64, 5, 7, 11, 13, 17, 19, 23, 29]
            .iter()
            .map(|&p| (p, 1))
            .collect();
        let report = verify_exp_polynomial(1, 2, &samples, Some((31, 1)), &l).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.checks.len(), 3);
    }

    #[test]
    fn verify_numeric_genus_one_matches_polynomial() {
        let l = Limits::default();
        for p in [3u64, 5] {
            let report = verify_exp_numeric(1, 2, p, &l).unwrap();
            assert!(report.pass, "p={p}: {report:?}");
        }
    }

    #[test]
    fn verify_numeric_genus_two() {
        let l = Limits::default();
        for p in [3u64, 5] {
            let report = verify_exp_numeric(2, 2, p, &l).unwrap();
            assert!(report.pass, "p={p}: {report:?}");
        }
    }

    #[test]
    fn verify_outcome_root_independent() {
        let l = Limits::default();
        // pick the *largest* primitive root instead of the smallest
        let other_root = |field: &FiniteField, n: u64| -> crate::error::Result<FieldElement> {
            let roots = field.all_roots_of_order(n);
            roots
                .into_iter()
                .last()
                .ok_or(Error::NoRootOfUnity {
                    order: n,
                    q: field.q() as u128,
                })
        };
        for p in [3u64, 5] {
            let base = verify_exp_numeric(1, 2, p, &l).unwrap();
            let alt = verify_exp_numeric_with_root(1, 2, p, &l, &other_root).unwrap();
            assert_eq!(base.pass, alt.pass);
            for (a, b) in base.checks.iter().zip(&alt.checks) {
                assert_eq!(a.left, b.left);
            }
        }
    }

    #[test]
    fn report_serializes() {
        let l = Limits::default();
        let report = verify_exp_numeric(1, 2, 3, &l).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"pass\":true"));
    }
}
