//! Lifting a low-rank decomposition over F_p to a bounded-entry low-rank
//! decomposition over Q(w_p) whose product is exactly the Booleanization of
//! the original matrix, plus the Fermat-style Boolean-to-regular rank lift
//! that stays inside F_p.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num::{BigInt, BigRational, One, ToPrimitive, Zero};

use crate::cyclo::{bool_interpolants, bool_of_residue, CycloElement};
use crate::error::{Error, Result};
use crate::exec;
use crate::fp::{mul_mod, pow_mod};
use crate::matrix::{booleanize, FpMatrix, LowRankFp, SignMatrix};

/// Default cap on the number of monomials (p^3 + 1)^r.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// The l1 norms of the interpolation pair for modulus p, and the entry
/// bound they certify.
#[derive(Debug, Clone, Copy)]
pub struct LiftConstants {
    pub p: u8,
    /// l1 norm of f (the bool interpolant on the roots of unity).
    pub c_f: f64,
    /// l1 norm of g (the w^k interpolant on integer nodes).
    pub c_g: f64,
    /// c_f * c_g^p: every expansion coefficient has magnitude at most
    /// coeff_base^r.
    pub coeff_base: f64,
    /// c_f * c_g^p * (p-1)^(p^3): every entry of the lifted decomposition
    /// (coefficient times an integer power product with base at most p-1
    /// and per-variable exponent at most p^3) has magnitude at most
    /// entry_base^r.
    pub entry_base: f64,
    /// ln(entry_base), usable when entry_base overflows f64.
    pub ln_entry_base: f64,
}

pub fn lift_constants(p: u64) -> Result<LiftConstants> {
    let polys = bool_interpolants(p)?;
    let pf = polys.p as f64;
    let coeff_base = polys.c_f * polys.c_g.powf(pf);
    let power_factor = (pf - 1.0).powf(pf.powi(3));
    let ln_entry_base = polys.c_f.ln() + pf * polys.c_g.ln() + pf.powi(3) * (pf - 1.0).ln();
    Ok(LiftConstants {
        p: polys.p,
        c_f: polys.c_f,
        c_g: polys.c_g,
        coeff_base,
        entry_base: coeff_base * power_factor,
        ln_entry_base,
    })
}

/// The multivariate expansion F(z_1, ..., z_r) = sum_alpha C_alpha z^alpha
/// with F(u_1 v_1, ..., u_r v_r) = bool(<u, v> mod p) for all integer
/// residue vectors u, v. Exponent vectors alpha run over [p^3 + 1]^r,
/// big-endian, so the term count is (p^3 + 1)^r.
#[derive(Debug)]
pub struct MonomialExpansion {
    p: u8,
    r: usize,
    span: usize,
    coeffs: Vec<CycloElement>,
    /// lcm of all coefficient denominators.
    denom: BigInt,
    /// coeffs[idx] * denom as integer coordinate vectors, flattened
    /// [idx * p + t]; product checks run gcd-free on these.
    scaled: Vec<BigInt>,
}

impl MonomialExpansion {
    pub fn modulus(&self) -> u8 {
        self.p
    }

    pub fn vars(&self) -> usize {
        self.r
    }

    /// Number of admissible exponents per variable, p^3 + 1.
    pub fn span(&self) -> usize {
        self.span
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, idx: usize) -> &CycloElement {
        &self.coeffs[idx]
    }

    /// Common denominator of all coefficients.
    pub fn denominator(&self) -> &BigInt {
        &self.denom
    }

    fn scaled_coeff(&self, idx: usize) -> &[BigInt] {
        &self.scaled[idx * self.p as usize..(idx + 1) * self.p as usize]
    }

    /// Decode a flat index into the exponent vector (alpha_1 most
    /// significant).
    pub fn exponents(&self, idx: usize) -> Vec<usize> {
        crate::matrix::index_digits(idx, self.span, self.r)
    }

    /// Exact evaluation at integer points, for cross-checks.
    pub fn eval(&self, zs: &[i64]) -> CycloElement {
        assert_eq!(zs.len(), self.r);
        let pows: Vec<Vec<BigInt>> = zs
            .iter()
            .map(|&z| {
                let mut v = Vec::with_capacity(self.span);
                v.push(BigInt::one());
                for _ in 1..self.span {
                    let last = v.last().unwrap() * BigInt::from(z);
                    v.push(last);
                }
                v
            })
            .collect();
        let mut acc = CycloElement::zero(self.p);
        for (idx, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let alpha = self.exponents(idx);
            let mut m = BigInt::one();
            for (k, &e) in alpha.iter().enumerate() {
                m *= &pows[k][e];
            }
            acc.add_scaled_assign(c, &BigRational::from_integer(m));
        }
        acc
    }
}

fn expansion_key(p: u8, r: usize) -> (u8, usize) {
    (p, r)
}

type ExpansionCache = Mutex<HashMap<(u8, usize), Arc<MonomialExpansion>>>;

static EXPANSION_CACHE: OnceLock<ExpansionCache> = OnceLock::new();

/// Expand F = f o (g x ... x g) into monomials with exact cyclotomic
/// coefficients; cached per (p, r).
pub fn build_f_expansion_with_cap(p: u64, r: usize, cap: usize) -> Result<Arc<MonomialExpansion>> {
    let polys = bool_interpolants(p)?;
    let pp = polys.p;
    if r == 0 {
        return Err(Error::InvalidParameter("expansion needs r >= 1".into()));
    }
    let span = (pp as usize).pow(3) + 1;
    let mut terms = 1usize;
    for _ in 0..r {
        terms = terms
            .checked_mul(span)
            .filter(|&t| t <= cap)
            .ok_or(Error::CapExceeded {
                what: "monomial expansion",
                needed: (span as u128).checked_pow(r as u32).unwrap_or(u128::MAX),
                cap: cap as u128,
            })?;
    }
    let cache = EXPANSION_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&expansion_key(pp, r)) {
        return Ok(hit.clone());
    }

    // g^0 .. g^{p-1}, coefficient arrays padded to span
    let mut gpows: Vec<Vec<CycloElement>> = Vec::with_capacity(pp as usize);
    let mut acc = crate::cyclo::CycloPolynomial::new(pp, vec![CycloElement::one(pp)]);
    for d in 0..pp {
        if d > 0 {
            acc = acc.mul(&polys.g);
        }
        let mut padded: Vec<CycloElement> = acc.coeffs().to_vec();
        padded.resize(span, CycloElement::zero(pp));
        gpows.push(padded);
    }
    let fcoeffs: Vec<CycloElement> = (0..pp as usize).map(|d| polys.f.coeff(d)).collect();

    // C_alpha = sum_d f_d * prod_k gpow[d][alpha_k], filled depth-first so
    // partial products over the prefix of alpha are shared
    let mut coeffs = vec![CycloElement::zero(pp); terms];
    fn fill(
        coeffs: &mut [CycloElement],
        partial: &[CycloElement],
        gpows: &[Vec<CycloElement>],
        span: usize,
        depth_left: usize,
        p: u8,
    ) {
        if depth_left == 0 {
            let mut total = CycloElement::zero(p);
            for pd in partial {
                total.add_assign(pd);
            }
            coeffs[0] = total;
            return;
        }
        let stride = coeffs.len() / span;
        for a in 0..span {
            let next: Vec<CycloElement> = partial
                .iter()
                .enumerate()
                .map(|(d, pd)| pd.mul(&gpows[d][a]))
                .collect();
            fill(
                &mut coeffs[a * stride..(a + 1) * stride],
                &next,
                gpows,
                span,
                depth_left - 1,
                p,
            );
        }
    }
    fill(&mut coeffs, &fcoeffs, &gpows, span, r, pp);

    // shared denominator and integer-scaled coordinates
    let mut denom = BigInt::one();
    for c in &coeffs {
        for coord in c.coeffs() {
            denom = num::Integer::lcm(&denom, coord.denom());
        }
    }
    let mut scaled = Vec::with_capacity(coeffs.len() * pp as usize);
    for c in &coeffs {
        for coord in c.coeffs() {
            scaled.push(coord.numer() * (&denom / coord.denom()));
        }
    }

    let expansion = Arc::new(MonomialExpansion {
        p: pp,
        r,
        span,
        coeffs,
        denom,
        scaled,
    });
    let mut guard = cache.lock().unwrap();
    Ok(guard
        .entry(expansion_key(pp, r))
        .or_insert(expansion)
        .clone())
}

pub fn build_f_expansion(p: u64, r: usize) -> Result<Arc<MonomialExpansion>> {
    build_f_expansion_with_cap(p, r, DEFAULT_TERM_CAP)
}

/// bool(<u, v> mod p) for residue vectors.
pub fn bool_inner_product(u: &[u8], v: &[u8], p: u8) -> i8 {
    let mut acc = 0u8;
    for (&a, &b) in u.iter().zip(v) {
        acc = crate::fp::add_mod(acc, mul_mod(a, b, p), p);
    }
    bool_of_residue(acc)
}

/// The lifted decomposition: Utilde^T Vtilde equals the Booleanization of
/// the origin product exactly, with every entry magnitude at most
/// entry_base^r.
///
/// Internally the Utilde columns are stored as integer coordinate vectors
/// over the expansion's common denominator, so products run on plain
/// BigInt multiply-adds.
#[derive(Debug)]
pub struct LowRankCyclo {
    expansion: Arc<MonomialExpansion>,
    /// Column i of Utilde * denom: flattened [alpha * p + t] integers.
    ucols: Vec<Vec<BigInt>>,
    /// Column j of Vtilde: alpha -> the integer v_j^alpha.
    vcols: Vec<Vec<BigInt>>,
    origin: LowRankFp,
}

impl LowRankCyclo {
    pub fn origin(&self) -> &LowRankFp {
        &self.origin
    }

    pub fn expansion(&self) -> &MonomialExpansion {
        &self.expansion
    }

    /// The lifted inner dimension (p^3 + 1)^r.
    pub fn rtilde(&self) -> usize {
        self.expansion.term_count()
    }

    /// Utilde[alpha, i] = C_alpha u_i^alpha, reconstructed exactly.
    pub fn utilde_entry(&self, alpha_idx: usize, i: usize) -> CycloElement {
        let p = self.expansion.p as usize;
        let coords = &self.ucols[i][alpha_idx * p..(alpha_idx + 1) * p];
        let denom = &self.expansion.denom;
        CycloElement::from_coeffs(
            self.expansion.p as u64,
            coords
                .iter()
                .map(|n| BigRational::new(n.clone(), denom.clone()))
                .collect(),
        )
        .expect("validated modulus")
    }

    /// Vtilde[alpha, j] = v_j^alpha.
    pub fn vtilde_entry(&self, alpha_idx: usize, j: usize) -> CycloElement {
        CycloElement::from_bigint(self.expansion.p, self.vcols[j][alpha_idx].clone())
    }

    /// Exact product entry (Utilde^T Vtilde)[i, j].
    pub fn product_entry(&self, i: usize, j: usize) -> CycloElement {
        let p = self.expansion.p as usize;
        let mut acc = vec![BigInt::zero(); p];
        for (alpha, v) in self.vcols[j].iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let coords = &self.ucols[i][alpha * p..(alpha + 1) * p];
            if num::One::is_one(v) {
                for (a, c) in acc.iter_mut().zip(coords) {
                    *a += c;
                }
            } else {
                for (a, c) in acc.iter_mut().zip(coords) {
                    if !c.is_zero() {
                        *a += c * v;
                    }
                }
            }
        }
        let denom = &self.expansion.denom;
        CycloElement::from_coeffs(
            self.expansion.p as u64,
            acc.into_iter()
                .map(|n| BigRational::new(n, denom.clone()))
                .collect(),
        )
        .expect("validated modulus")
    }

    /// Check Utilde^T Vtilde = booleanize(U^T V) entrywise, exactly.
    pub fn verify_booleanization(&self) -> bool {
        let n = self.ucols.len();
        let m = self.vcols.len();
        let target = booleanize(&self.origin.materialize());
        let p = self.expansion.p;
        let per_row: Vec<bool> = exec::map_collect(n, |i| {
            (0..m).all(|j| {
                let want = CycloElement::from_int(p, target.get(i, j) as i64);
                self.product_entry(i, j) == want
            })
        });
        per_row.into_iter().all(|ok| ok)
    }

    /// Largest embedded magnitude over all entries of Utilde and Vtilde.
    pub fn max_entry_magnitude(&self) -> f64 {
        let terms = self.expansion.term_count();
        let u_max = (0..self.ucols.len())
            .flat_map(|i| (0..terms).map(move |a| (a, i)))
            .map(|(a, i)| self.utilde_entry(a, i).magnitude())
            .fold(0.0f64, f64::max);
        let v_max = self
            .vcols
            .iter()
            .flat_map(|col| {
                col.iter()
                    .map(|n| n.to_f64().unwrap_or(f64::INFINITY).abs())
            })
            .fold(0.0f64, f64::max);
        u_max.max(v_max)
    }

    /// Materialize the product into a complex matrix (entries are exactly
    /// +1/-1 when verify_booleanization holds).
    pub fn materialize_complex(&self) -> Vec<Vec<num::complex::Complex64>> {
        (0..self.ucols.len())
            .map(|i| {
                (0..self.vcols.len())
                    .map(|j| self.product_entry(i, j).complex_embed())
                    .collect()
            })
            .collect()
    }
}

/// Integer powers of a residue, 0..span.
fn int_pow_table(base: u8, span: usize) -> Vec<BigInt> {
    let mut v = Vec::with_capacity(span);
    v.push(BigInt::one());
    let b = BigInt::from(base);
    for _ in 1..span {
        let last = v.last().unwrap() * &b;
        v.push(last);
    }
    v
}

// v_j^alpha: product over k of v[k][j]^alpha_k, depth-first over alpha
fn fill_powers(
    out: &mut [BigInt],
    tables: &[Vec<BigInt>],
    prefix: &BigInt,
    span: usize,
    depth: usize,
) {
    if depth == tables.len() {
        out[0] = prefix.clone();
        return;
    }
    let stride = out.len() / span;
    for a in 0..span {
        let next = prefix * &tables[depth][a];
        fill_powers(
            &mut out[a * stride..(a + 1) * stride],
            tables,
            &next,
            span,
            depth + 1,
        );
    }
}

/// Lift L = U^T V over F_p to Utilde, Vtilde over Q(w_p) with
/// Utilde^T Vtilde = booleanize(U^T V), entry magnitudes at most
/// entry_base^r, and inner dimension (p^3 + 1)^r.
pub fn lift_to_c_with_cap(l: &LowRankFp, cap: usize) -> Result<LowRankCyclo> {
    let p = l.modulus();
    let r = l.inner_dim();
    let expansion = build_f_expansion_with_cap(p as u64, r.max(1), cap)?;
    if r == 0 {
        // rank-0 input: the expansion machinery needs r >= 1, so lift the
        // equivalent zero decomposition with one inner row
        let widened = LowRankFp::new(
            FpMatrix::zeros(1, l.left_dim(), p as u64)?,
            FpMatrix::zeros(1, l.right_dim(), p as u64)?,
        )?;
        return lift_to_c_with_cap(&widened, cap);
    }
    let terms = expansion.term_count();
    let mem = terms
        .checked_mul(l.left_dim() + l.right_dim())
        .ok_or(Error::CapExceeded {
            what: "lift vectors",
            needed: u128::MAX,
            cap: cap as u128,
        })?;
    if mem > crate::matrix::DEFAULT_MATERIALIZE_CAP {
        return Err(Error::CapExceeded {
            what: "lift vectors",
            needed: mem as u128,
            cap: crate::matrix::DEFAULT_MATERIALIZE_CAP as u128,
        });
    }
    let span = expansion.span();

    let vcols: Vec<Vec<BigInt>> = exec::map_collect(l.right_dim(), |j| {
        let tables: Vec<Vec<BigInt>> = (0..r)
            .map(|k| int_pow_table(l.v().get(k, j), span))
            .collect();
        let mut out = vec![BigInt::zero(); terms];
        fill_powers(&mut out, &tables, &BigInt::one(), span, 0);
        out
    });
    let exp = expansion.clone();
    let ucols: Vec<Vec<BigInt>> = exec::map_collect(l.left_dim(), |i| {
        let tables: Vec<Vec<BigInt>> = (0..r)
            .map(|k| int_pow_table(l.u().get(k, i), span))
            .collect();
        let mut pows = vec![BigInt::zero(); terms];
        fill_powers(&mut pows, &tables, &BigInt::one(), span, 0);
        let mut out = Vec::with_capacity(terms * exp.p as usize);
        for (idx, power) in pows.iter().enumerate() {
            for coord in exp.scaled_coeff(idx) {
                if coord.is_zero() || power.is_zero() {
                    out.push(BigInt::zero());
                } else {
                    out.push(coord * power);
                }
            }
        }
        out
    });

    Ok(LowRankCyclo {
        expansion,
        ucols,
        vcols,
        origin: l.clone(),
    })
}

/// ```
/// use matrig_core::lift::lift_to_c;
/// use matrig_core::matrix::{sign_to_fp, walsh_hadamard, LowRankFp};
///
/// let h2 = sign_to_fp(&walsh_hadamard(2).unwrap(), 3).unwrap();
/// let lifted = lift_to_c(&LowRankFp::factor(&h2)).unwrap();
/// assert!(lifted.verify_booleanization());
/// ```
pub fn lift_to_c(l: &LowRankFp) -> Result<LowRankCyclo> {
    lift_to_c_with_cap(l, DEFAULT_TERM_CAP)
}

/// Number of monomials with per-variable degree <= p-1 and total degree
/// <= p-1 in r variables: binom(r + p - 1, p - 1).
pub fn boolean_lift_rank_bound(r: usize, p: u8) -> u128 {
    let k = (p - 1) as u128;
    let mut num = 1u128;
    let mut den = 1u128;
    for t in 1..=k {
        num *= r as u128 + t;
        den *= t;
    }
    num / den
}

/// Explicit F_p decomposition of bool(L) via L~ = 1 - 2 (L - 1)^(p-1):
/// entries +1 map to 1, everything else to p-1, and the inner dimension is
/// at most binom(r + p - 1, p - 1).
pub fn booleanize_lowrank_fp(l: &LowRankFp) -> Result<LowRankFp> {
    let p = l.modulus();
    if p == 2 {
        return Err(Error::DegenerateModulus);
    }
    let r = l.inner_dim();
    let rows_bound = boolean_lift_rank_bound(r, p);
    if rows_bound > DEFAULT_TERM_CAP as u128 {
        return Err(Error::CapExceeded {
            what: "boolean lift rows",
            needed: rows_bound,
            cap: DEFAULT_TERM_CAP as u128,
        });
    }

    // exponent vectors beta with |beta| <= p-1
    let mut betas: Vec<Vec<u8>> = Vec::new();
    fn collect(betas: &mut Vec<Vec<u8>>, cur: &mut Vec<u8>, left: u8, depth: usize, r: usize) {
        if depth == r {
            betas.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e);
            collect(betas, cur, left - e, depth + 1, r);
            cur.pop();
        }
    }
    collect(&mut betas, &mut Vec::new(), p - 1, 0, r);
    debug_assert_eq!(betas.len() as u128, rows_bound);

    let factorial = |n: u8| -> u64 { (1..=n as u64).product::<u64>().max(1) };
    let coeff_for = |beta: &[u8]| -> u8 {
        let total: u8 = beta.iter().sum();
        let rest = p - 1 - total;
        let mut denom = factorial(rest);
        for &b in beta {
            denom *= factorial(b);
        }
        let multinom = (factorial(p - 1) / denom) % p as u64;
        // sign (-1)^(p-1-|beta|) from the (-1) slot of the multinomial
        let signed = if rest.is_multiple_of(2) {
            multinom
        } else {
            (p as u64 - multinom % p as u64) % p as u64
        };
        if total == 0 {
            // constant term of 1 - 2 (...)^{p-1}: 1 - 2 * signed
            ((1 + 2 * (p as u64 - signed % p as u64)) % p as u64) as u8
        } else {
            ((2 * (p as u64 - signed % p as u64)) % p as u64) as u8
        }
    };

    let n_left = l.left_dim();
    let n_right = l.right_dim();
    let mut u_new = FpMatrix::zeros(betas.len(), n_left, p as u64)?;
    let mut v_new = FpMatrix::zeros(betas.len(), n_right, p as u64)?;
    for (row, beta) in betas.iter().enumerate() {
        let c = coeff_for(beta);
        for i in 0..n_left {
            let mut m = c;
            for (k, &e) in beta.iter().enumerate() {
                m = mul_mod(m, pow_mod(l.u().get(k, i), e as u64, p), p);
            }
            u_new.set(row, i, m);
        }
        for j in 0..n_right {
            let mut m = 1u8 % p;
            for (k, &e) in beta.iter().enumerate() {
                m = mul_mod(m, pow_mod(l.v().get(k, j), e as u64, p), p);
            }
            v_new.set(row, j, m);
        }
    }
    LowRankFp::new(u_new, v_new)
}

/// +1 -> 1 and -1 -> p-1 as a sign matrix comparison helper: the Boolean
/// values of `m` as residues.
pub fn bool_residues(s: &SignMatrix, p: u8) -> FpMatrix {
    FpMatrix::from_fn(s.rows(), s.cols(), p as u64, |i, j| {
        if s.get(i, j) == 1 {
            1
        } else {
            p - 1
        }
    })
    .expect("validated modulus")
}
