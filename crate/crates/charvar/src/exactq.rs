//! Exact Laurent polynomials and rational functions in the weight variable q,
//! plus interpolation of count polynomials from evaluations at prime powers.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Laurent polynomial in q with big-integer coefficients.  No zero
/// coefficients are stored; the empty map is zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> LaurentPoly {
        LaurentPoly::default()
    }

    pub fn one() -> LaurentPoly {
        LaurentPoly::term(BigInt::one(), 0)
    }

    /// The monomial c * q^e.
    pub fn term(c: BigInt, e: i64) -> LaurentPoly {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(e, c);
        }
        LaurentPoly { coeffs }
    }

    pub fn q() -> LaurentPoly {
        LaurentPoly::term(BigInt::one(), 1)
    }

    pub fn constant(c: i64) -> LaurentPoly {
        LaurentPoly::term(BigInt::from(c), 0)
    }

    /// From ordinary coefficients, lowest degree first, starting at exponent 0.
    pub fn from_coeffs(cs: &[i64]) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for (e, &c) in cs.iter().enumerate() {
            p.insert(e as i64, BigInt::from(c));
        }
        p
    }

    fn insert(&mut self, e: i64, c: BigInt) {
        if !c.is_zero() {
            self.coeffs.insert(e, c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.coeffs.get(&e).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Degree of the polynomial part; None for zero.
    pub fn degree(&self) -> Option<i64> {
        self.max_exp()
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (&e, c) in &other.coeffs {
            let entry = out.coeffs.entry(e).or_default();
            *entry += c;
            if entry.is_zero() {
                out.coeffs.remove(&e);
            }
        }
        out
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (&e1, c1) in &self.coeffs {
            for (&e2, c2) in &other.coeffs {
                let entry = out.coeffs.entry(e1 + e2).or_default();
                *entry += c1 * c2;
            }
        }
        out.coeffs.retain(|_, c| !c.is_zero());
        out
    }

    /// Multiplication by q^i (the weight twist {i}).
    pub fn shift_by_q_power(&self, i: i64) -> LaurentPoly {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e + i, c.clone())).collect(),
        }
    }

    /// Substitution q -> q^k.
    pub fn adams(&self, k: i64) -> LaurentPoly {
        assert!(k >= 1);
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e * k, c.clone())).collect(),
        }
    }

    /// q -> 1/q.
    pub fn reciprocal_sub(&self) -> LaurentPoly {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, c)| (-e, c.clone())).collect(),
        }
    }

    pub fn eval(&self, q: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (&e, c) in &self.coeffs {
            let qe = if e >= 0 {
                q.pow(e as i32)
            } else {
                q.pow(e as i32)
            };
            acc += BigRational::from(c.clone()) * qe;
        }
        acc
    }

    pub fn eval_int(&self, q: &BigInt) -> BigRational {
        self.eval(&BigRational::from(q.clone()))
    }

    /// Dense rational coefficients from min_exp upward (empty for zero).
    fn dense(&self) -> (i64, Vec<BigRational>) {
        match (self.min_exp(), self.max_exp()) {
            (Some(lo), Some(hi)) => {
                let mut v = vec![BigRational::zero(); (hi - lo + 1) as usize];
                for (&e, c) in &self.coeffs {
                    v[(e - lo) as usize] = BigRational::from(c.clone());
                }
                (lo, v)
            }
            _ => (0, Vec::new()),
        }
    }

    fn from_rational_dense(lo: i64, v: &[BigRational]) -> Option<LaurentPoly> {
        let mut p = LaurentPoly::zero();
        for (i, c) in v.iter().enumerate() {
            if !c.is_integer() {
                return None;
            }
            p.insert(lo + i as i64, c.to_integer());
        }
        Some(p)
    }

    /// Signed content: gcd of the coefficients, carrying the sign of the
    /// leading one.  Zero for the zero polynomial.
    fn content(&self) -> BigInt {
        let mut content = BigInt::zero();
        for c in self.coeffs.values() {
            content = content.gcd(c);
        }
        if self
            .coeffs
            .values()
            .next_back()
            .map_or(false, |c| c.is_negative())
        {
            content = -content;
        }
        content
    }

    /// Divide out the content and the smallest power of q; leading
    /// coefficient becomes positive.
    fn primitive(&self) -> LaurentPoly {
        if self.is_zero() {
            return LaurentPoly::zero();
        }
        let lo = self.min_exp().unwrap();
        let content = self.content();
        LaurentPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|(&e, c)| (e - lo, c / &content))
                .collect(),
        }
    }

    /// Serialize as exponent -> decimal-string map.
    pub fn to_string_map(&self) -> BTreeMap<String, String> {
        self.coeffs
            .iter()
            .map(|(e, c)| (e.to_string(), c.to_string()))
            .collect()
    }

    pub fn from_string_map(map: &BTreeMap<String, String>) -> Result<LaurentPoly> {
        let mut p = LaurentPoly::zero();
        for (e, c) in map {
            let e: i64 = e
                .parse()
                .map_err(|_| Error::MalformedMap(format!("bad exponent {e:?}")))?;
            let c: BigInt = c
                .parse()
                .map_err(|_| Error::MalformedMap(format!("bad coefficient {c:?}")))?;
            p.insert(e, c);
        }
        Ok(p)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(out, "0");
        }
        let mut first = true;
        for (&e, c) in self.coeffs.iter().rev() {
            let (sign, mag) = if c.is_negative() {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(out, "-")?;
                }
                first = false;
            } else {
                write!(out, " {sign} ")?;
            }
            let show_coeff = !mag.is_one() || e == 0;
            if show_coeff {
                write!(out, "{mag}")?;
            }
            if e != 0 {
                if show_coeff {
                    write!(out, "*")?;
                }
                if e == 1 {
                    write!(out, "q")?;
                } else {
                    write!(out, "q^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_string_map().serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<LaurentPoly, D::Error> {
        let map = BTreeMap::<String, String>::deserialize(d)?;
        LaurentPoly::from_string_map(&map).map_err(D::Error::custom)
    }
}

/// Polynomial gcd of the polynomial parts (min exponent normalized away),
/// returned primitive with positive leading coefficient.
fn poly_gcd(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    if a.is_zero() {
        return b.primitive();
    }
    if b.is_zero() {
        return a.primitive();
    }
    // integer primitive pseudo-remainder sequence (fraction-free Euclid)
    let dense_int = |p: &LaurentPoly| -> Vec<BigInt> {
        let p = p.primitive();
        let min = p.min_exp().unwrap_or(0);
        let max = p.max_exp().unwrap_or(0);
        (min..=max).map(|e| p.coeff(e)).collect()
    };
    let trim = |v: &mut Vec<BigInt>| {
        while v.last().map_or(false, |c| c.is_zero()) {
            v.pop();
        }
    };
    let make_primitive = |v: &mut Vec<BigInt>| {
        let mut content = BigInt::zero();
        for c in v.iter() {
            content = content.gcd(c);
        }
        if !content.is_zero() && !content.is_one() {
            for c in v.iter_mut() {
                *c /= &content;
            }
        }
    };
    let mut x = dense_int(a);
    let mut y = dense_int(b);
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        // pseudo-remainder: scale x by lead(y) before each elimination step
        while x.len() >= y.len() {
            let lead_y = y.last().unwrap().clone();
            let lead_x = x.last().unwrap().clone();
            let shift = x.len() - y.len();
            for c in x.iter_mut() {
                *c *= &lead_y;
            }
            for (i, c) in y.iter().enumerate() {
                x[shift + i] -= &lead_x * c;
            }
            trim(&mut x);
            if x.is_empty() {
                break;
            }
        }
        make_primitive(&mut x);
        std::mem::swap(&mut x, &mut y);
    }
    if x.is_empty() {
        return LaurentPoly::one();
    }
    if x.last().map_or(false, |c| c.sign() == num_bigint::Sign::Minus) {
        for c in x.iter_mut() {
            *c = -c.clone();
        }
    }
    let mut p = LaurentPoly::zero();
    for (i, c) in x.into_iter().enumerate() {
        p.insert(i as i64, c);
    }
    p
}

/// Reduced rational function in q.  Canonical form: numerator and denominator
/// are integer Laurent polynomials with polynomial gcd 1; the denominator is
/// an ordinary polynomial (minimal exponent 0) with positive leading
/// coefficient, and its integer content is coprime to the numerator's.
/// Q-power factors always live in the numerator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatFunc {
    pub num: LaurentPoly,
    pub den: LaurentPoly,
}

impl RatFunc {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: LaurentPoly, den: LaurentPoly) -> RatFunc {
        if num.is_zero() {
            return RatFunc {
                num: LaurentPoly::zero(),
                den: LaurentPoly::one(),
            };
        }
        // strip q-powers: move den's min exponent onto num
        let dlo = den.min_exp().unwrap();
        let den0 = den.shift_by_q_power(-dlo);
        let num0 = num.shift_by_q_power(-dlo);
        let g = poly_gcd(&num0, &den0);
        let num1 = divide_exact(&num0, &g);
        let den1 = divide_exact(&den0, &g);
        // split the denominator into primitive part and signed content, then
        // cancel the content against the numerator's content
        let den_prim = den1.primitive();
        let den_content = den1.content();
        let num_content = num1.content();
        let common = num_content.gcd(&den_content);
        let num2 = divide_by_content(&num1, &common);
        let mut rest = &den_content / &common;
        let mut num2 = num2;
        if rest.is_negative() {
            rest = -rest;
            num2 = num2.neg();
        }
        RatFunc {
            num: num2,
            den: den_prim.mul(&LaurentPoly::term(rest, 0)),
        }
    }

    pub fn from_poly(p: LaurentPoly) -> RatFunc {
        RatFunc {
            num: p,
            den: LaurentPoly::one(),
        }
    }

    pub fn from_int(c: i64) -> RatFunc {
        Self::from_poly(LaurentPoly::constant(c))
    }

    pub fn from_bigint(c: BigInt) -> RatFunc {
        Self::from_poly(LaurentPoly::term(c, 0))
    }

    pub fn from_ratio(r: &BigRational) -> RatFunc {
        RatFunc::new(
            LaurentPoly::term(r.numer().clone(), 0),
            LaurentPoly::term(r.denom().clone(), 0),
        )
        .expect("denominator of a rational is nonzero")
    }

    pub fn zero() -> RatFunc {
        Self::from_poly(LaurentPoly::zero())
    }

    pub fn one() -> RatFunc {
        Self::from_poly(LaurentPoly::one())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        Self::reduced(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        Self::reduced(
            self.num.mul(&other.den).sub(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        Self::reduced(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduced(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    pub fn scale_rational(&self, r: &BigRational) -> RatFunc {
        self.mul(&RatFunc::from_ratio(r))
    }

    /// q -> q^k on both parts.
    pub fn adams(&self, k: i64) -> RatFunc {
        Self::reduced(self.num.adams(k), self.den.adams(k))
    }

    pub fn shift_by_q_power(&self, i: i64) -> RatFunc {
        RatFunc {
            num: self.num.shift_by_q_power(i),
            den: self.den.clone(),
        }
    }

    /// Some(p) iff the function is a Laurent polynomial.
    pub fn as_poly(&self) -> Option<LaurentPoly> {
        if self.den == LaurentPoly::one() {
            Some(self.num.clone())
        } else {
            None
        }
    }

    pub fn eval(&self, q: &BigRational) -> Result<BigRational> {
        let d = self.den.eval(q);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval(q) / d)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == LaurentPoly::one() {
            write!(out, "{}", self.num)
        } else {
            write!(out, "({}) / ({})", self.num, self.den)
        }
    }
}

/// Exact division a / b in Z[q, 1/q]; panics if not exact (callers divide by
/// a known common factor only).
fn divide_exact(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    if a.is_zero() {
        return LaurentPoly::zero();
    }
    let (alo, ad) = a.dense();
    let (blo, bd) = b.dense();
    let mut rem: Vec<BigRational> = ad;
    let mut quot = vec![BigRational::zero(); rem.len()];
    let trim = |v: &mut Vec<BigRational>| {
        while v.last().map_or(false, |c| c.is_zero()) {
            v.pop();
        }
    };
    let mut r = rem.clone();
    trim(&mut r);
    rem = r;
    while rem.len() >= bd.len() {
        let factor = rem.last().unwrap() / bd.last().unwrap();
        let shift = rem.len() - bd.len();
        quot[shift] = factor.clone();
        for (i, c) in bd.iter().enumerate() {
            let v = &factor * c;
            rem[shift + i] -= v;
        }
        trim(&mut rem);
        if rem.is_empty() {
            break;
        }
    }
    assert!(rem.is_empty(), "non-exact polynomial division");
    LaurentPoly::from_rational_dense(alo - blo, &quot).expect("exact division stays integral")
}

fn divide_by_content(p: &LaurentPoly, c: &BigInt) -> LaurentPoly {
    let mut out = LaurentPoly::zero();
    for (&e, v) in &p.coeffs {
        let (quo, rem) = v.div_rem(c);
        assert!(rem.is_zero(), "content division must be exact");
        out.insert(e, quo);
    }
    out
}

/// Samples (q, count) through which a count polynomial is fit.
#[derive(Debug, Clone)]
pub struct InterpolationProblem {
    pub samples: Vec<(BigInt, BigInt)>,
    pub degree_bound: usize,
    pub holdout: Option<(BigInt, BigInt)>,
}

/// 2g*n^2, the ambient dimension of GL_n^{2g}; a counting polynomial of a
/// closed subvariety cannot exceed this degree.
pub fn degree_bound_for(n: usize, g: usize) -> usize {
    2 * g * n * n
}

/// Exact Lagrange interpolation through all samples with an integrality,
/// degree and holdout check.
pub fn interpolate(problem: &InterpolationProblem) -> Result<LaurentPoly> {
    let samples = &problem.samples;
    if samples.len() < problem.degree_bound + 1 {
        return Err(Error::InsufficientSamples {
            needed: problem.degree_bound + 1,
            got: samples.len(),
        });
    }
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            if samples[i].0 == samples[j].0 {
                return Err(Error::InvalidInput(format!(
                    "duplicate sample point q = {}",
                    samples[i].0
                )));
            }
        }
    }
    // Newton's divided differences over Q
    let xs: Vec<BigRational> = samples.iter().map(|(x, _)| BigRational::from(x.clone())).collect();
    let mut diffs: Vec<BigRational> = samples.iter().map(|(_, y)| BigRational::from(y.clone())).collect();
    let mut coeffs = vec![diffs[0].clone()];
    for level in 1..diffs.len() {
        for i in (level..diffs.len()).rev() {
            let dx = &xs[i] - &xs[i - level];
            diffs[i] = (&diffs[i] - &diffs[i - 1]) / dx;
        }
        coeffs.push(diffs[level].clone());
    }
    // expand Newton form to monomial coefficients
    let mut poly = vec![BigRational::zero(); samples.len()];
    let mut basis = vec![BigRational::one()]; // prod (x - x_i), coefficients low-first
    for (level, c) in coeffs.iter().enumerate() {
        for (i, b) in basis.iter().enumerate() {
            poly[i] += c * b;
        }
        if level + 1 < coeffs.len() {
            // basis *= (x - xs[level])
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (i, b) in basis.iter().enumerate() {
                next[i + 1] += b;
                next[i] -= b * &xs[level];
            }
            basis = next;
        }
    }
    while poly.last().map_or(false, |c| c.is_zero()) {
        poly.pop();
    }
    if poly.len() > problem.degree_bound + 1 {
        // more samples than the bound requires and they do not lie on a
        // polynomial of the claimed degree
        let (q, counted) = samples.last().unwrap().clone();
        return Err(Error::HoldoutMismatch {
            q: q.to_string(),
            predicted: "degree bound exceeded".into(),
            counted: counted.to_string(),
        });
    }
    let result =
        LaurentPoly::from_rational_dense(0, &poly).ok_or(Error::NonIntegerCoefficients)?;
    if let Some((q, count)) = &problem.holdout {
        let predicted = result.eval_int(q);
        if predicted != BigRational::from(count.clone()) {
            return Err(Error::HoldoutMismatch {
                q: q.to_string(),
                predicted: predicted.to_string(),
                counted: count.to_string(),
            });
        }
    }
    Ok(result)
}
