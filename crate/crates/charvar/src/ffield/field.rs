use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// An element of a finite field, stored as its canonical index in `[0, q)`.
///
/// The base-p digits of the index, least significant first, are the
/// coefficients of the polynomial representation.  For prime fields the index
/// is just the residue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(pub u64);

/// GF(p^k).  For k > 1 the modulus is the lexicographically smallest monic
/// irreducible polynomial of degree k over GF(p) (constant term compared
/// first), so field construction is deterministic across runs.
#[derive(Clone)]
pub struct FiniteField {
    p: u64,
    k: usize,
    /// Monic modulus, coefficients mod p, constant term first, length k+1.
    /// For k = 1 this is simply `[0, 1]` (the polynomial x).
    modulus: Vec<u64>,
    q: u64,
    mul_table: Option<Arc<Vec<u32>>>,
    inv_table: Option<Arc<Vec<u32>>>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)?;
        if self.k > 1 {
            write!(f, " = GF({}^{})", self.p, self.k)?;
        }
        Ok(())
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}
impl Eq for FiniteField {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// ---- polynomial helpers over GF(p), coefficients as plain residues ----

fn poly_trim(a: &mut Vec<u64>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    poly_trim(&mut out);
    out
}

/// Remainder of a by the monic polynomial m.
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for i in 0..=dm {
                let sub = (lead * m[i]) % p;
                let idx = shift + i;
                r[idx] = (r[idx] + p - sub) % p;
            }
        }
        r.pop();
        poly_trim(&mut r);
        if r.len() <= dm && r.iter().all(|&c| c == 0) {
            return vec![0];
        }
    }
    poly_trim(&mut r);
    r
}

/// Trial-division irreducibility test for a monic polynomial over GF(p).
fn poly_irreducible(f: &[u64], p: u64) -> bool {
    let deg = f.len() - 1;
    if deg == 0 {
        return false;
    }
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        // all monic divisor candidates of degree d
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut m = idx;
            for _ in 0..d {
                g.push(m % p);
                m /= p;
            }
            g.push(1);
            let r = poly_rem(f, &g, p);
            if r.len() == 1 && r[0] == 0 {
                return false;
            }
        }
    }
    true
}

const TABLE_LIMIT: u64 = 4096;

impl FiniteField {
    /// Build GF(p^k).  See module docs for the modulus convention.
    pub fn new(p: u64, k: usize) -> Result<FiniteField> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::DegreeZero);
        }
        let q = p
            .checked_pow(k as u32)
            .filter(|&q| q < (1u64 << 40))
            .ok_or(Error::InvalidInput(format!("p^k too large: {p}^{k}")))?;
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            Self::smallest_irreducible(p, k)
        };
        let mut field = FiniteField {
            p,
            k,
            modulus,
            q,
            mul_table: None,
            inv_table: None,
        };
        if k > 1 && q <= TABLE_LIMIT {
            field.build_tables();
        }
        Ok(field)
    }

    /// Lexicographically smallest monic irreducible of degree k, comparing
    /// coefficient vectors constant term first.
    fn smallest_irreducible(p: u64, k: usize) -> Vec<u64> {
        let total = p.pow(k as u32);
        for rank in 0..total {
            // decode with c_0 in the most significant position so that the
            // scan order is lexicographic on (c_0, ..., c_{k-1})
            let mut coeffs = vec![0u64; k];
            let mut m = rank;
            for i in (0..k).rev() {
                coeffs[i] = m % p;
                m /= p;
            }
            let mut f = coeffs;
            f.push(1);
            if poly_irreducible(&f, p) {
                return f;
            }
        }
        unreachable!("irreducible polynomials of every degree exist over GF(p)")
    }

    fn build_tables(&mut self) {
        let q = self.q as usize;
        let mut mul = vec![0u32; q * q];
        for a in 0..q as u64 {
            for b in a..q as u64 {
                let prod = self.mul_slow(FieldElement(a), FieldElement(b)).0 as u32;
                mul[a as usize * q + b as usize] = prod;
                mul[b as usize * q + a as usize] = prod;
            }
        }
        let mut inv = vec![0u32; q];
        for a in 1..q as u64 {
            if inv[a as usize] == 0 {
                let ai = self.inv_slow(FieldElement(a)).0;
                inv[a as usize] = ai as u32;
                inv[ai as usize] = a as u32;
            }
        }
        self.mul_table = Some(Arc::new(mul));
        self.inv_table = Some(Arc::new(inv));
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    /// Modulus polynomial, constant term first; `None` for prime fields.
    pub fn modulus_poly(&self) -> Option<&[u64]> {
        if self.k > 1 {
            Some(&self.modulus)
        } else {
            None
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }
    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    /// Element with the given polynomial coefficients (constant first).
    pub fn element_from_coeffs(&self, coeffs: &[u64]) -> FieldElement {
        assert!(coeffs.len() <= self.k);
        let mut idx = 0u64;
        for &c in coeffs.iter().rev() {
            idx = idx * self.p + c % self.p;
        }
        FieldElement(idx)
    }

    /// Residue embedding of an integer via the prime subfield.
    pub fn element_from_int(&self, n: u64) -> FieldElement {
        FieldElement(n % self.p)
    }

    pub fn coeffs(&self, a: FieldElement) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.k);
        let mut m = a.0;
        for _ in 0..self.k {
            out.push(m % self.p);
            m /= self.p;
        }
        out
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    /// Elements ordered lexicographically by coefficient vector (constant
    /// term compared first).  Used wherever a deterministic "smallest"
    /// choice is promised.
    pub fn elements_coeff_lex(&self) -> Vec<FieldElement> {
        let mut v: Vec<FieldElement> = self.elements().collect();
        v.sort_by_key(|&e| {
            let c = self.coeffs(e);
            c // ascending lex on (c_0, ..., c_{k-1})
        });
        v
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.k == 1 {
            let s = a.0 + b.0;
            return FieldElement(if s >= self.p { s - self.p } else { s });
        }
        let mut idx = 0u64;
        let (mut x, mut y) = (a.0, b.0);
        let mut mult = 1u64;
        for _ in 0..self.k {
            let s = (x % self.p + y % self.p) % self.p;
            idx += s * mult;
            mult *= self.p;
            x /= self.p;
            y /= self.p;
        }
        FieldElement(idx)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.k == 1 {
            return FieldElement(if a.0 == 0 { 0 } else { self.p - a.0 });
        }
        let mut idx = 0u64;
        let mut x = a.0;
        let mut mult = 1u64;
        for _ in 0..self.k {
            let c = x % self.p;
            idx += if c == 0 { 0 } else { self.p - c } * mult;
            mult *= self.p;
            x /= self.p;
        }
        FieldElement(idx)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    fn mul_slow(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let ca = self.coeffs(a);
        let cb = self.coeffs(b);
        let prod = poly_mul(&ca, &cb, self.p);
        let rem = poly_rem(&prod, &self.modulus, self.p);
        self.element_from_coeffs(&rem)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.k == 1 {
            return FieldElement((a.0 as u128 * b.0 as u128 % self.p as u128) as u64);
        }
        if let Some(t) = &self.mul_table {
            return FieldElement(t[(a.0 * self.q + b.0) as usize] as u64);
        }
        self.mul_slow(a, b)
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn inv_slow(&self, a: FieldElement) -> FieldElement {
        assert!(a.0 != 0, "inverse of zero");
        // a^(q-2)
        self.pow(a, self.q - 2)
    }

    pub fn inv(&self, a: FieldElement) -> FieldElement {
        if self.k == 1 {
            return self.inv_slow(a);
        }
        if let Some(t) = &self.inv_table {
            return FieldElement(t[a.0 as usize] as u64);
        }
        self.inv_slow(a)
    }

    pub fn is_zero(&self, a: FieldElement) -> bool {
        a.0 == 0
    }

    /// Exact multiplicative order of a nonzero element.
    pub fn order_of(&self, a: FieldElement) -> u64 {
        assert!(a.0 != 0);
        let group = self.q - 1;
        let mut ord = group;
        let mut m = group;
        let mut f = 2u64;
        let mut factors = Vec::new();
        while f * f <= m {
            if m % f == 0 {
                factors.push(f);
                while m % f == 0 {
                    m /= f;
                }
            }
            f += 1;
        }
        if m > 1 {
            factors.push(m);
        }
        for &ell in &factors {
            while ord % ell == 0 && self.pow(a, ord / ell) == self.one() {
                ord /= ell;
            }
        }
        ord
    }
}

/// A field element of exact multiplicative order `order`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RootOfUnity {
    pub element: FieldElement,
    pub order: u64,
}

impl FiniteField {
    /// Deterministic primitive n-th root of unity: the candidate with the
    /// lexicographically smallest coefficient vector.
    pub fn primitive_root_of_unity(&self, n: u64) -> Result<RootOfUnity> {
        assert!(n >= 1);
        if n == 1 {
            return Ok(RootOfUnity {
                element: self.one(),
                order: 1,
            });
        }
        if (self.q - 1) % n != 0 {
            return Err(Error::NoRootOfUnity {
                order: n,
                q: self.q as u128,
            });
        }
        for e in self.elements_coeff_lex() {
            if e.0 != 0 && self.order_of(e) == n {
                return Ok(RootOfUnity {
                    element: e,
                    order: n,
                });
            }
        }
        Err(Error::NoRootOfUnity {
            order: n,
            q: self.q as u128,
        })
    }

    /// All elements of exact multiplicative order n, coefficient-lex order.
    pub fn all_roots_of_order(&self, n: u64) -> Vec<FieldElement> {
        self.elements_coeff_lex()
            .into_iter()
            .filter(|&e| e.0 != 0 && self.order_of(e) == n)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_basics() {
        let f = FiniteField::new(7, 1).unwrap();
        assert_eq!(f.q(), 7);
        assert!(f.modulus_poly().is_none());
        let a = f.element_from_int(5);
        let b = f.element_from_int(4);
        assert_eq!(f.mul(a, b), f.element_from_int(6));
        assert_eq!(f.mul(a, f.inv(a)), f.one());
    }

    #[test]
    fn not_prime_rejected() {
        assert!(matches!(FiniteField::new(4, 1), Err(Error::NotPrime(4))));
        assert!(matches!(FiniteField::new(1, 1), Err(Error::NotPrime(1))));
        assert!(matches!(FiniteField::new(2, 0), Err(Error::DegreeZero)));
    }

    #[test]
    fn gf4_modulus_is_unique_irreducible_quadratic() {
        // oracle: exhaustive irreducibility scan over GF(2)
        let mut irred = Vec::new();
        for c0 in 0..2u64 {
            for c1 in 0..2u64 {
                let f = vec![c0, c1, 1];
                if poly_irreducible(&f, 2) {
                    irred.push(f);
                }
            }
        }
        assert_eq!(irred, vec![vec![1, 1, 1]]); // x^2 + x + 1
        let f = FiniteField::new(2, 2).unwrap();
        assert_eq!(f.modulus_poly().unwrap(), &[1, 1, 1]);
    }

    #[test]
    fn field_axioms_random_sample() {
        for (p, k) in [(3u64, 2usize), (5, 1), (2, 3), (5, 2)] {
            let f = FiniteField::new(p, k).unwrap();
            let els: Vec<FieldElement> = f.elements().collect();
            for &a in &els {
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    if a.0 != 0 {
                        assert_eq!(f.mul(a, f.inv(a)), f.one());
                    }
                    for &c in els.iter().take(5) {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(
                            f.mul(f.mul(a, b), c),
                            f.mul(a, f.mul(b, c))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_is_additive() {
        for (p, k) in [(2u64, 2usize), (3, 2), (5, 2)] {
            let f = FiniteField::new(p, k).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    let lhs = f.pow(f.add(a, b), p);
                    let rhs = f.add(f.pow(a, p), f.pow(b, p));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn primitive_roots() {
        let f7 = FiniteField::new(7, 1).unwrap();
        // 2^3 = 8 = 1 mod 7 and 2 != 1; exhaustive search confirms 2 is smallest
        assert_eq!(f7.primitive_root_of_unity(3).unwrap().element, FieldElement(2));

        let f5 = FiniteField::new(5, 1).unwrap();
        assert_eq!(f5.primitive_root_of_unity(1).unwrap().element, FieldElement(1));

        let f4 = FiniteField::new(2, 2).unwrap();
        assert!(matches!(
            f4.primitive_root_of_unity(2),
            Err(Error::NoRootOfUnity { order: 2, .. })
        ));
    }

    #[test]
    fn root_generates_cyclic_group_of_exact_order() {
        for (p, k, n) in [(7u64, 1usize, 3u64), (5, 1, 4), (3, 2, 8), (13, 1, 6)] {
            let f = FiniteField::new(p, k).unwrap();
            let r = f.primitive_root_of_unity(n).unwrap();
            let mut seen = std::collections::HashSet::new();
            let mut x = f.one();
            for _ in 0..n {
                x = f.mul(x, r.element);
                seen.insert(x);
            }
            assert_eq!(x, f.one());
            assert_eq!(seen.len(), n as usize);
        }
    }
}
