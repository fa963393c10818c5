//! Exact arithmetic in the cyclotomic field Q(w_p), w_p = e^{2*pi*i/p}.
//!
//! Elements are coefficient vectors c_0 + c_1 w + ... + c_{p-1} w^{p-1}
//! of arbitrary-precision rationals, kept in the canonical form where the
//! coefficient of w^{p-1} has been eliminated through
//! 1 + w + ... + w^{p-1} = 0. On canonical forms, equality of coefficient
//! vectors is exact field equality, which is what the lift construction
//! needs. Magnitude questions go through `complex_embed` at double
//! precision; equality questions never do.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num::complex::Complex64;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fp::check_modulus;

/// An element of Q(w_p) in canonical form (last coefficient zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycloElement {
    p: u8,
    coeffs: Vec<BigRational>,
}

fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

impl CycloElement {
    /// Build an element from raw coefficients of w^0..w^{p-1} (any length
    /// up to p) and reduce it to canonical form.
    pub fn from_coeffs(p: u64, coeffs: Vec<BigRational>) -> Result<Self> {
        let p = check_modulus(p)?;
        if coeffs.len() > p as usize {
            return Err(Error::InvalidParameter(format!(
                "coefficient vector of length {} exceeds p = {p}",
                coeffs.len()
            )));
        }
        let mut full = coeffs;
        full.resize(p as usize, BigRational::zero());
        let mut el = Self { p, coeffs: full };
        el.canonicalize();
        Ok(el)
    }

    pub fn zero(p: u8) -> Self {
        Self {
            p,
            coeffs: vec![BigRational::zero(); p as usize],
        }
    }

    pub fn one(p: u8) -> Self {
        Self::from_rational(p, BigRational::one())
    }

    pub fn from_rational(p: u8, r: BigRational) -> Self {
        let mut coeffs = vec![BigRational::zero(); p as usize];
        coeffs[0] = r;
        Self { p, coeffs }
    }

    pub fn from_int(p: u8, k: i64) -> Self {
        Self::from_rational(p, BigRational::from_integer(BigInt::from(k)))
    }

    pub fn from_bigint(p: u8, k: BigInt) -> Self {
        Self::from_rational(p, BigRational::from_integer(k))
    }

    /// w^k for any integer exponent k.
    pub fn omega_pow(p: u8, k: i64) -> Self {
        let idx = k.rem_euclid(p as i64) as usize;
        let mut coeffs = vec![BigRational::zero(); p as usize];
        coeffs[idx] = BigRational::one();
        let mut el = Self { p, coeffs };
        el.canonicalize();
        el
    }

    pub fn modulus(&self) -> u8 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Eliminate the top coefficient via 1 + w + ... + w^{p-1} = 0.
    /// Idempotent.
    pub fn canonicalize(&mut self) {
        let top = self.coeffs[self.p as usize - 1].clone();
        if top.is_zero() {
            return;
        }
        for c in &mut self.coeffs {
            *c -= &top;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(BigRational::is_zero)
    }

    /// True when only the w^0 coefficient is nonzero, i.e. the element is
    /// rational.
    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(BigRational::is_zero)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.coeffs[0]
    }

    pub fn add(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Self { p: self.p, coeffs }
    }

    pub fn add_assign(&mut self, rhs: &Self) {
        debug_assert_eq!(self.p, rhs.p);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Self { p: self.p, coeffs }
    }

    pub fn neg(&self) -> Self {
        Self {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        if s.is_zero() {
            return Self::zero(self.p);
        }
        Self {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| if c.is_zero() { BigRational::zero() } else { c * s })
                .collect(),
        }
    }

    /// self += other * s
    pub fn add_scaled_assign(&mut self, other: &Self, s: &BigRational) {
        debug_assert_eq!(self.p, other.p);
        if s.is_zero() {
            return;
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !b.is_zero() {
                *a += b * s;
            }
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        // rational fast paths keep the Lagrange solves on integer nodes cheap
        if self.is_rational() {
            return rhs.scale(&self.coeffs[0]);
        }
        if rhs.is_rational() {
            return self.scale(&rhs.coeffs[0]);
        }
        let p = self.p as usize;
        let mut out = vec![BigRational::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let k = (i + j) % p;
                out[k] += a * b;
            }
        }
        let mut el = Self {
            p: self.p,
            coeffs: out,
        };
        el.canonicalize();
        el
    }

    /// Apply the Galois automorphism w -> w^j (gcd(j, p) = 1).
    pub fn galois(&self, j: u8) -> Self {
        let p = self.p as usize;
        let mut out = vec![BigRational::zero(); p];
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out[(k * j as usize) % p] += c;
            }
        }
        let mut el = Self {
            p: self.p,
            coeffs: out,
        };
        el.canonicalize();
        el
    }

    /// Exact multiplicative inverse, via the field norm
    /// N(z) = prod_j sigma_j(z) which is rational.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NonInvertible(0, self.p));
        }
        if self.is_rational() {
            return Ok(Self::from_rational(self.p, self.coeffs[0].recip()));
        }
        let mut conj = Self::one(self.p);
        for j in 2..self.p {
            conj = conj.mul(&self.galois(j));
        }
        let norm = self.mul(&conj);
        debug_assert!(norm.is_rational(), "field norm must be rational");
        Ok(conj.scale(&norm.coeffs[0].recip()))
    }

    /// Numerical embedding sum_k c_k e^{2*pi*i*k/p} at double precision.
    pub fn complex_embed(&self) -> Complex64 {
        let p = self.p as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let theta = 2.0 * std::f64::consts::PI * k as f64 / p;
            acc += Complex64::new(theta.cos(), theta.sin()) * rat_to_f64(c);
        }
        acc
    }

    pub fn magnitude(&self) -> f64 {
        self.complex_embed().norm()
    }
}

/// Exact convenience wrapper with a modulus check, matching the library's
/// fallible surface.
pub fn cyclo_mul(a: &CycloElement, b: &CycloElement) -> Result<CycloElement> {
    if a.p != b.p {
        return Err(Error::ModulusMismatch(a.p, b.p));
    }
    Ok(a.mul(b))
}

/// A univariate polynomial over Q(w_p); `coeffs[d]` is the degree-d
/// coefficient and the leading coefficient is nonzero (empty = zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycloPolynomial {
    p: u8,
    coeffs: Vec<CycloElement>,
}

impl CycloPolynomial {
    pub fn new(p: u8, mut coeffs: Vec<CycloElement>) -> Self {
        while coeffs.last().is_some_and(CycloElement::is_zero) {
            coeffs.pop();
        }
        Self { p, coeffs }
    }

    pub fn zero(p: u8) -> Self {
        Self {
            p,
            coeffs: Vec::new(),
        }
    }

    pub fn modulus(&self) -> u8 {
        self.p
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[CycloElement] {
        &self.coeffs
    }

    /// Degree-d coefficient, zero beyond the stored length.
    pub fn coeff(&self, d: usize) -> CycloElement {
        self.coeffs
            .get(d)
            .cloned()
            .unwrap_or_else(|| CycloElement::zero(self.p))
    }

    pub fn eval(&self, x: &CycloElement) -> CycloElement {
        let mut acc = CycloElement::zero(self.p);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x);
            acc.add_assign(c);
        }
        acc
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Self::zero(self.p);
        }
        let mut out = vec![CycloElement::zero(self.p); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let prod = a.mul(b);
                out[i + j].add_assign(&prod);
            }
        }
        Self::new(self.p, out)
    }

    /// Sum of the embedded magnitudes of all coefficients.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(CycloElement::magnitude).sum()
    }
}

/// Exact interpolation through `(nodes[k], values[k])` on pairwise-distinct
/// nodes, by Lagrange basis polynomials computed with synthetic division of
/// the master polynomial. One code path for every node type; the result is
/// verified by node evaluation before it is returned.
pub fn interpolate(nodes: &[CycloElement], values: &[CycloElement]) -> Result<CycloPolynomial> {
    if nodes.is_empty() || nodes.len() != values.len() {
        return Err(Error::InvalidParameter(
            "interpolation needs equally many nodes and values".into(),
        ));
    }
    let p = nodes[0].modulus();
    let n = nodes.len();
    for i in 0..n {
        for j in i + 1..n {
            if nodes[i] == nodes[j] {
                return Err(Error::InvalidParameter(format!(
                    "interpolation nodes {i} and {j} coincide"
                )));
            }
        }
    }

    // master polynomial M(x) = prod_k (x - node_k)
    let mut master = vec![CycloElement::one(p)];
    for node in nodes {
        let mut next = vec![CycloElement::zero(p); master.len() + 1];
        for (i, c) in master.iter().enumerate() {
            next[i + 1].add_assign(c);
            let t = c.mul(node).neg();
            next[i].add_assign(&t);
        }
        master = next;
    }

    let mut acc = vec![CycloElement::zero(p); n];
    for (k, node) in nodes.iter().enumerate() {
        // quotient M(x) / (x - node) by synthetic division
        let mut quot = vec![CycloElement::zero(p); n];
        let mut carry = master[n].clone();
        quot[n - 1] = carry.clone();
        for i in (1..n).rev() {
            carry = master[i].add(&carry.mul(node));
            quot[i - 1] = carry.clone();
        }
        let mut denom = CycloElement::one(p);
        for (m, other) in nodes.iter().enumerate() {
            if m != k {
                denom = denom.mul(&node.sub(other));
            }
        }
        let scale = values[k].mul(&denom.inverse()?);
        for (a, q) in acc.iter_mut().zip(&quot) {
            let t = q.mul(&scale);
            a.add_assign(&t);
        }
    }

    let poly = CycloPolynomial::new(p, acc);
    for (node, value) in nodes.iter().zip(values) {
        assert_eq!(&poly.eval(node), value, "interpolant must reproduce its nodes");
    }
    Ok(poly)
}

/// bool(k): +1 exactly when k == 1 mod p, else -1.
pub fn bool_of_residue(k: u8) -> i8 {
    if k == 1 {
        1
    } else {
        -1
    }
}

/// The polynomial f with deg f <= p-1 and f(w^k) = bool(k) for all k in 0..p.
pub fn interpolate_f(p: u64) -> Result<CycloPolynomial> {
    let p = check_modulus(p)?;
    let nodes: Vec<_> = (0..p)
        .map(|k| CycloElement::omega_pow(p, k as i64))
        .collect();
    let values: Vec<_> = (0..p)
        .map(|k| CycloElement::from_int(p, bool_of_residue(k) as i64))
        .collect();
    // interpolate() verifies the node table exactly
    interpolate(&nodes, &values)
}

/// The polynomial g with deg g <= p^2-1 and g(k) = w^k for all k in [p^2].
pub fn interpolate_g(p: u64) -> Result<CycloPolynomial> {
    let p = check_modulus(p)?;
    let count = p as usize * p as usize;
    let nodes: Vec<_> = (0..count)
        .map(|k| CycloElement::from_int(p, k as i64))
        .collect();
    let values: Vec<_> = (0..count)
        .map(|k| CycloElement::omega_pow(p, k as i64))
        .collect();
    // interpolate() verifies the node table exactly
    interpolate(&nodes, &values)
}

/// Per-modulus cache of the two interpolants and their l1 norms.
#[derive(Debug)]
pub struct BoolInterpolants {
    pub p: u8,
    pub f: CycloPolynomial,
    pub g: CycloPolynomial,
    pub c_f: f64,
    pub c_g: f64,
}

static INTERP_CACHE: OnceLock<Mutex<HashMap<u8, Arc<BoolInterpolants>>>> = OnceLock::new();

/// The interpolation pair (f, g) for modulus p, computed once per process.
pub fn bool_interpolants(p: u64) -> Result<Arc<BoolInterpolants>> {
    let pp = check_modulus(p)?;
    let cache = INTERP_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&pp) {
        return Ok(hit.clone());
    }
    let f = interpolate_f(p)?;
    let g = interpolate_g(p)?;
    let entry = Arc::new(BoolInterpolants {
        p: pp,
        c_f: f.l1_norm(),
        c_g: g.l1_norm(),
        f,
        g,
    });
    let mut guard = cache.lock().unwrap();
    Ok(guard.entry(pp).or_insert(entry).clone())
}
