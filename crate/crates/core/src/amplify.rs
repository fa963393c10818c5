//! Hardness amplification: the random degree-1 approximation of entrywise
//! products behind the Kronecker construction, the prefix construction for
//! Majority powers, and their exact error formulas.

use num::{BigInt, BigRational, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec;
use crate::fp::{add_mod, check_modulus, mul_mod, sub_mod};
use crate::matrix::{
    boolean_distance, fp_rank, index_digits, FpMatrix, LowRankFp, SignMatrix,
    DEFAULT_MATERIALIZE_CAP,
};

/// Default cap on exhaustive (x, y) pair counting.
pub const DEFAULT_PAIR_CAP: u64 = 100_000_000;
/// Default cap on exhaustive seed scans.
pub const DEFAULT_SEED_CAP: u64 = 1_000_000;
/// Default sample count when a count falls back to sampling.
pub const DEFAULT_SAMPLES: u64 = 1_000_000;

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Result of counting disagreeing entries, either exhaustively or by
/// seeded uniform sampling.
#[derive(Debug, Clone)]
pub struct ErrorCount {
    pub disagreements: u64,
    pub total: u64,
    pub exhaustive: bool,
    /// Set on sampled counts.
    pub rng_seed: Option<u64>,
}

impl ErrorCount {
    pub fn fraction(&self) -> BigRational {
        if self.total == 0 {
            return BigRational::zero();
        }
        BigRational::new(BigInt::from(self.disagreements), BigInt::from(self.total))
    }
}

/// Controls exhaustive-versus-sampled counting.
#[derive(Debug, Clone, Copy)]
pub struct CountOptions {
    pub pair_cap: u64,
    pub samples: u64,
    pub rng_seed: u64,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self {
            pair_cap: DEFAULT_PAIR_CAP,
            samples: DEFAULT_SAMPLES,
            rng_seed: 0,
        }
    }
}

/// The random degree-1 polynomial 1 + sum_i a_i (z_i - 1) mod p.
pub fn pi_tilde_eval(a: &[u8], z: &[u8], p: u64) -> Result<u8> {
    let p = check_modulus(p)?;
    if a.len() != z.len() {
        return Err(Error::ShapeMismatch {
            left: format!("seed of length {}", a.len()),
            right: format!("input of length {}", z.len()),
        });
    }
    let mut acc = 1u8 % p;
    for (&ai, &zi) in a.iter().zip(z) {
        acc = add_mod(acc, mul_mod(ai % p, sub_mod(zi % p, 1 % p, p), p), p);
    }
    Ok(acc)
}

/// Pr over uniform seeds a that bool(pi_tilde_a(z)) = 1: exactly 1 when z
/// is all ones, 1/p otherwise. When p^n is small enough the closed form is
/// confirmed by exhaustive seed enumeration.
pub fn seed_success_prob(z: &[u8], p: u64) -> Result<BigRational> {
    let pp = check_modulus(p)?;
    let n = z.len();
    let closed = if z.iter().all(|&zi| zi % pp == 1 % pp) {
        BigRational::one()
    } else {
        ratio(1, pp as i64)
    };
    let seeds = (pp as u64).checked_pow(n as u32);
    if let Some(total) = seeds.filter(|&t| t <= DEFAULT_SEED_CAP) {
        let mut hits = 0u64;
        let mut a = vec![0u8; n];
        for idx in 0..total {
            let mut rem = idx;
            for d in a.iter_mut() {
                *d = (rem % pp as u64) as u8;
                rem /= pp as u64;
            }
            if pi_tilde_eval(&a, z, p)? == 1 {
                hits += 1;
            }
        }
        let enumerated = BigRational::new(BigInt::from(hits), BigInt::from(total));
        assert_eq!(
            enumerated, closed,
            "closed form must match seed enumeration"
        );
    }
    Ok(closed)
}

/// Implicit low-rank approximation of the n-th Kronecker power:
/// entry(x, y) = 1 + sum_i a_i (L[x_i, y_i] - 1) mod p, of rank at most
/// n r + 1 with O(n r)-time entry evaluation.
#[derive(Debug, Clone)]
pub struct KronApproximant {
    base: LowRankFp,
    base_matrix: FpMatrix,
    seed: Vec<u8>,
    n: usize,
}

impl KronApproximant {
    pub fn base(&self) -> &LowRankFp {
        &self.base
    }

    pub fn seed(&self) -> &[u8] {
        &self.seed
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.base_matrix.rows()
    }

    pub fn modulus(&self) -> u8 {
        self.base_matrix.modulus()
    }

    /// Side length q^n of the approximated power.
    pub fn side(&self) -> u64 {
        (self.q() as u64).pow(self.n as u32)
    }

    pub fn rank_bound(&self) -> usize {
        self.n * self.base.inner_dim() + 1
    }

    pub fn entry_digits(&self, xd: &[usize], yd: &[usize]) -> u8 {
        let p = self.modulus();
        let mut acc = 1u8 % p;
        for i in 0..self.n {
            let z = self.base_matrix.get(xd[i], yd[i]);
            acc = add_mod(acc, mul_mod(self.seed[i], sub_mod(z, 1 % p, p), p), p);
        }
        acc
    }

    pub fn entry(&self, x: u64, y: u64) -> u8 {
        let xd = index_digits(x as usize, self.q(), self.n);
        let yd = index_digits(y as usize, self.q(), self.n);
        self.entry_digits(&xd, &yd)
    }

    pub fn materialize(&self) -> Result<FpMatrix> {
        let side = self.side();
        if side * side > DEFAULT_MATERIALIZE_CAP as u64 {
            return Err(Error::CapExceeded {
                what: "materialized approximant",
                needed: (side as u128).pow(2),
                cap: DEFAULT_MATERIALIZE_CAP as u128,
            });
        }
        FpMatrix::from_fn(
            side as usize,
            side as usize,
            self.modulus() as u64,
            |i, j| self.entry(i as u64, j as u64),
        )
    }
}

pub fn build_kron_approximant(l: &LowRankFp, seed: &[u8], n: usize) -> Result<KronApproximant> {
    if seed.len() != n {
        return Err(Error::ShapeMismatch {
            left: format!("seed of length {}", seed.len()),
            right: format!("n = {n}"),
        });
    }
    let p = l.modulus();
    let base_matrix = l.materialize();
    if base_matrix.rows() != base_matrix.cols() {
        return Err(Error::InvalidParameter(
            "Kronecker base must be square".into(),
        ));
    }
    if (base_matrix.rows() as u64).checked_pow(n as u32).is_none() {
        return Err(Error::CapExceeded {
            what: "power side length",
            needed: (base_matrix.rows() as u128)
                .checked_pow(n as u32)
                .unwrap_or(u128::MAX),
            cap: u64::MAX as u128,
        });
    }
    Ok(KronApproximant {
        base: l.clone(),
        base_matrix,
        seed: seed.iter().map(|&a| a % p).collect(),
        n,
    })
}

/// Exhaustive pair enumeration with incremental digit updates. `truth`
/// produces the +-1 truth entry from digit vectors; callers compare against
/// the approximant.
fn count_pairs_exhaustive(
    q: usize,
    n: usize,
    disagree: impl Fn(&[usize], &[usize]) -> bool + Sync + Send,
) -> u64 {
    let side = (q as u64).pow(n as u32) as usize;
    exec::chunked_fold(
        side,
        1usize.max(side / 256),
        |xs| {
            let mut count = 0u64;
            let mut yd = vec![0usize; n];
            for x in xs {
                let xd = index_digits(x, q, n);
                yd.fill(0);
                for y in 0..side {
                    if y > 0 {
                        // odometer increment, least significant digit last
                        let mut pos = n - 1;
                        loop {
                            yd[pos] += 1;
                            if yd[pos] < q {
                                break;
                            }
                            yd[pos] = 0;
                            pos -= 1;
                        }
                    }
                    if disagree(&xd, &yd) {
                        count += 1;
                    }
                }
            }
            count
        },
        0,
        |a, b| a + b,
    )
}

fn count_pairs_sampled(
    q: usize,
    n: usize,
    samples: u64,
    rng_seed: u64,
    disagree: impl Fn(&[usize], &[usize]) -> bool + Sync + Send,
) -> u64 {
    let side = (q as u64).pow(n as u32);
    const BLOCK: u64 = 1 << 16;
    let blocks = samples.div_ceil(BLOCK).max(1);
    exec::chunked_fold(
        blocks as usize,
        1,
        |bs| {
            let mut count = 0u64;
            for b in bs {
                let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
                rng.set_stream(b as u64 + 1);
                let lo = b as u64 * BLOCK;
                let hi = (lo + BLOCK).min(samples);
                for _ in lo..hi {
                    let x = rng.random_range(0..side);
                    let y = rng.random_range(0..side);
                    let xd = index_digits(x as usize, q, n);
                    let yd = index_digits(y as usize, q, n);
                    if disagree(&xd, &yd) {
                        count += 1;
                    }
                }
            }
            count
        },
        0,
        |a, b| a + b,
    )
}

/// Fraction of entries where bool(approximant) disagrees with the
/// Kronecker power of `a`. Exhaustive when q^{2n} fits the cap; otherwise
/// sampled with the recorded count and rng seed.
pub fn kron_error_exact(
    a: &SignMatrix,
    approx: &KronApproximant,
    opts: &CountOptions,
) -> Result<ErrorCount> {
    if a.rows() != approx.q() || a.cols() != approx.q() {
        return Err(Error::ShapeMismatch {
            left: a.shape_string(),
            right: format!("{0}x{0} base", approx.q()),
        });
    }
    let q = approx.q();
    let n = approx.n;
    let side = (q as u64).checked_pow(n as u32).ok_or(Error::CapExceeded {
        what: "power side length",
        needed: u128::MAX,
        cap: u64::MAX as u128,
    })?;
    let disagree = |xd: &[usize], yd: &[usize]| {
        let mut sign = 1i8;
        for i in 0..n {
            sign *= a.get(xd[i], yd[i]);
        }
        let b = if approx.entry_digits(xd, yd) == 1 {
            1
        } else {
            -1
        };
        b != sign
    };
    if let Some(pairs) = side.checked_mul(side).filter(|&t| t <= opts.pair_cap) {
        let disagreements = count_pairs_exhaustive(q, n, disagree);
        Ok(ErrorCount {
            disagreements,
            total: pairs,
            exhaustive: true,
            rng_seed: None,
        })
    } else {
        let disagreements = count_pairs_sampled(q, n, opts.samples, opts.rng_seed, disagree);
        Ok(ErrorCount {
            disagreements,
            total: opts.samples,
            exhaustive: false,
            rng_seed: Some(opts.rng_seed),
        })
    }
}

/// The exact expected disagreement of the degree-1 approximation against
/// the product of n i.i.d. sign entries:
/// 1/2 - (2-p)/(2p) (p1 - pm1)^n - (p-1)/p (p1 (1-d1) - pm1 dm1)^n.
pub fn kron_error_expected(
    p: u64,
    p1: &BigRational,
    pm1: &BigRational,
    d1: &BigRational,
    dm1: &BigRational,
    n: usize,
) -> Result<BigRational> {
    let pp = check_modulus(p)? as i64;
    let one = BigRational::one();
    if p1 + pm1 != one || p1.is_negative() || pm1.is_negative() {
        return Err(Error::InvalidParameter(
            "p1 + pm1 must be 1 with both nonnegative".into(),
        ));
    }
    for d in [d1, dm1] {
        if d.is_negative() || d > &one {
            return Err(Error::InvalidParameter(
                "error rates must lie in [0, 1]".into(),
            ));
        }
    }
    let pow = |b: &BigRational, e: usize| -> BigRational {
        let mut acc = BigRational::one();
        for _ in 0..e {
            acc *= b;
        }
        acc
    };
    let parity = pow(&(p1 - pm1), n);
    let survive = pow(&(p1 * (&one - d1) - pm1 * dm1), n);
    Ok(ratio(1, 2) - ratio(2 - pp, 2 * pp) * parity - ratio(pp - 1, pp) * survive)
}

/// The amplification guarantee 1/2 - (1/2)(1/2 - alpha - delta)^n; the
/// precondition 2 alpha + delta < 1/2 is a hard error.
pub fn kron_theorem_bound(
    alpha: &BigRational,
    delta: &BigRational,
    n: usize,
) -> Result<BigRational> {
    let half = ratio(1, 2);
    if alpha * ratio(2, 1) + delta >= half {
        return Err(Error::InvalidParameter(format!(
            "amplification needs 2*alpha + delta < 1/2, got alpha = {alpha}, delta = {delta}"
        )));
    }
    let mut pow = BigRational::one();
    for _ in 0..n {
        pow *= &half - alpha - delta;
    }
    Ok(&half - &(half.clone() * pow))
}

/// |#(+1) - #(-1)| / q^2 of a sign matrix.
pub fn entry_imbalance(a: &SignMatrix) -> BigRational {
    let pos = a.count_pos() as i64;
    let neg = a.count_neg() as i64;
    ratio((pos - neg).abs(), pos + neg)
}

/// Fraction of entries where bool(l) disagrees with a.
pub fn boolean_error_rate(a: &SignMatrix, l: &FpMatrix) -> Result<BigRational> {
    let d = boolean_distance(a, l)?;
    Ok(BigRational::new(
        BigInt::from(d),
        BigInt::from((a.rows() * a.cols()) as u64),
    ))
}

#[derive(Debug, Clone, Copy)]
pub enum SeedSearchMode {
    /// Scan every seed in lexicographic order; requires p^n <= seed cap.
    Exhaustive,
    /// Evaluate `count` uniformly drawn seeds.
    Sampled { count: u64, rng_seed: u64 },
}

/// The seed minimizing the measured disagreement of the degree-1
/// approximant against A^(x)n; ties go to the lexicographically smallest
/// seed.
pub fn best_seed_search(
    a: &SignMatrix,
    l: &LowRankFp,
    n: usize,
    mode: SeedSearchMode,
    opts: &CountOptions,
) -> Result<(Vec<u8>, ErrorCount)> {
    let p = l.modulus();
    let seeds: Vec<Vec<u8>> = match mode {
        SeedSearchMode::Exhaustive => {
            let total = (p as u64)
                .checked_pow(n as u32)
                .filter(|&t| t <= DEFAULT_SEED_CAP);
            let Some(total) = total else {
                return Err(Error::CapExceeded {
                    what: "exhaustive seed scan",
                    needed: (p as u128).pow(n as u32),
                    cap: DEFAULT_SEED_CAP as u128,
                });
            };
            (0..total)
                .map(|idx| {
                    // lexicographic: first coordinate most significant
                    let mut rem = idx;
                    let mut s = vec![0u8; n];
                    for d in s.iter_mut().rev() {
                        *d = (rem % p as u64) as u8;
                        rem /= p as u64;
                    }
                    s
                })
                .collect()
        }
        SeedSearchMode::Sampled { count, rng_seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            (0..count)
                .map(|_| (0..n).map(|_| rng.random_range(0..p)).collect())
                .collect()
        }
    };
    let mut best: Option<(Vec<u8>, ErrorCount)> = None;
    for seed in seeds {
        let approx = build_kron_approximant(l, &seed, n)?;
        let count = kron_error_exact(a, &approx, opts)?;
        let better = match &best {
            None => true,
            Some((bs, bc)) => (count.disagreements, &seed) < (bc.disagreements, bs),
        };
        if better {
            best = Some((seed, count));
        }
    }
    best.ok_or_else(|| Error::InvalidParameter("no seed evaluated".into()))
}

/// Implicit approximation of the n-th Majority power by the length-k
/// prefix: entry(x, y) = L[x_pre, y_pre].
#[derive(Debug, Clone)]
pub struct PrefixApproximant {
    base: FpMatrix,
    q: usize,
    k: usize,
    n: usize,
}

impl PrefixApproximant {
    pub fn base(&self) -> &FpMatrix {
        &self.base
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> u64 {
        (self.q as u64).pow(self.n as u32)
    }

    pub fn entry_digits(&self, xd: &[usize], yd: &[usize]) -> u8 {
        let mut xp = 0usize;
        let mut yp = 0usize;
        for i in 0..self.k {
            xp = xp * self.q + xd[i];
            yp = yp * self.q + yd[i];
        }
        self.base.get(xp, yp)
    }

    pub fn entry(&self, x: u64, y: u64) -> u8 {
        let shift = (self.q as u64).pow((self.n - self.k) as u32);
        self.base.get((x / shift) as usize, (y / shift) as usize)
    }

    pub fn materialize(&self) -> Result<FpMatrix> {
        let side = self.side();
        if side * side > DEFAULT_MATERIALIZE_CAP as u64 {
            return Err(Error::CapExceeded {
                what: "materialized approximant",
                needed: (side as u128).pow(2),
                cap: DEFAULT_MATERIALIZE_CAP as u128,
            });
        }
        FpMatrix::from_fn(
            side as usize,
            side as usize,
            self.base.modulus() as u64,
            |i, j| self.entry(i as u64, j as u64),
        )
    }
}

/// Build the prefix approximant; the base must be q^k x q^k for an integer
/// q recovered from its side length.
pub fn build_prefix_approximant(l: &FpMatrix, k: usize, n: usize) -> Result<PrefixApproximant> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    if l.rows() != l.cols() {
        return Err(Error::InvalidParameter("prefix base must be square".into()));
    }
    let side = l.rows();
    let q = (1..=side)
        .find(|&q| q.checked_pow(k as u32) == Some(side))
        .ok_or_else(|| {
            Error::InvalidParameter(format!("side {side} is not a perfect {k}-th power"))
        })?;
    if (q as u64).checked_pow(n as u32).is_none() {
        return Err(Error::CapExceeded {
            what: "power side length",
            needed: (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX),
            cap: u64::MAX as u128,
        });
    }
    Ok(PrefixApproximant {
        base: l.clone(),
        q,
        k,
        n,
    })
}

/// Fraction of entries where bool(prefix approximant) disagrees with the
/// n-th Majority power of the q x q base sign matrix.
pub fn maj_error_exact(
    a: &SignMatrix,
    approx: &PrefixApproximant,
    opts: &CountOptions,
) -> Result<ErrorCount> {
    if a.rows() != approx.q || a.cols() != approx.q {
        return Err(Error::ShapeMismatch {
            left: a.shape_string(),
            right: format!("{0}x{0} base", approx.q),
        });
    }
    let q = approx.q;
    let n = approx.n;
    let side = (q as u64).pow(n as u32);
    let disagree = |xd: &[usize], yd: &[usize]| {
        let mut s = 0i32;
        for i in 0..n {
            s += a.get(xd[i], yd[i]) as i32;
        }
        let truth = if s >= 0 { 1 } else { -1 };
        let b = if approx.entry_digits(xd, yd) == 1 {
            1
        } else {
            -1
        };
        b != truth
    };
    if let Some(pairs) = side.checked_mul(side).filter(|&t| t <= opts.pair_cap) {
        let disagreements = count_pairs_exhaustive(q, n, disagree);
        Ok(ErrorCount {
            disagreements,
            total: pairs,
            exhaustive: true,
            rng_seed: None,
        })
    } else {
        let disagreements = count_pairs_sampled(q, n, opts.samples, opts.rng_seed, disagree);
        Ok(ErrorCount {
            disagreements,
            total: opts.samples,
            exhaustive: false,
            rng_seed: Some(opts.rng_seed),
        })
    }
}

fn big_binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for t in 0..k {
        acc = acc * BigInt::from(n - t) / BigInt::from(t + 1);
    }
    acc
}

/// Pr[Maj(A_1..A_k) = Maj(A_1..A_n)] for uniform +-1 variables, ties to
/// +1, by convolving the binomial counts of the prefix and the remainder.
pub fn majority_agreement_prob(k: usize, n: usize) -> Result<BigRational> {
    if k == 0 || k > n || n > 64 {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k <= n <= 64, got k={k}, n={n}"
        )));
    }
    let mut agree = BigInt::zero();
    for j1 in 0..=k {
        let s1 = k as i64 - 2 * j1 as i64;
        let m1 = s1 >= 0;
        let c1 = big_binomial(k, j1);
        for j2 in 0..=(n - k) {
            let s2 = (n - k) as i64 - 2 * j2 as i64;
            let m = s1 + s2 >= 0;
            if m == m1 {
                agree += &c1 * big_binomial(n - k, j2);
            }
        }
    }
    Ok(BigRational::new(agree, BigInt::one() << n))
}

/// Exact Pr[X_1 + ... + X_n >= a] for uniform +-1 summands.
pub fn binomial_tail(n: usize, a: i64) -> Result<BigRational> {
    if n > 64 || a.unsigned_abs() > n as u64 {
        return Err(Error::InvalidParameter(format!(
            "need |a| <= n <= 64, got n={n}, a={a}"
        )));
    }
    // X = n - 2j >= a  <=>  j <= (n - a) / 2
    let jmax = ((n as i64 - a).div_euclid(2)).min(n as i64) as usize;
    let mut acc = BigInt::zero();
    for j in 0..=jmax {
        acc += big_binomial(n, j);
    }
    Ok(BigRational::new(acc, BigInt::one() << n))
}

/// (1 - p) + (2p - 1) delta with p = majority_agreement_prob(k, n); equal
/// to 1/2 - (p - 1/2)(1 - 2 delta).
pub fn maj_amplified_error(k: usize, n: usize, delta: &BigRational) -> Result<BigRational> {
    let half = ratio(1, 2);
    if delta.is_negative() || delta > &half {
        return Err(Error::InvalidParameter("delta must lie in [0, 1/2]".into()));
    }
    let p = majority_agreement_prob(k, n)?;
    let one = BigRational::one();
    let value = (&one - &p) + (&p * ratio(2, 1) - &one) * delta;
    let rearranged = &half - &((&p - &half) * (&one - &(delta * ratio(2, 1))));
    debug_assert_eq!(value, rearranged);
    Ok(value)
}

/// A member of a probabilistic low-rank ensemble.
#[derive(Debug, Clone)]
pub enum EnsembleMember {
    Dense(FpMatrix),
    LowRank(LowRankFp),
}

impl EnsembleMember {
    fn materialize(&self) -> FpMatrix {
        match self {
            EnsembleMember::Dense(m) => m.clone(),
            EnsembleMember::LowRank(l) => l.materialize(),
        }
    }
}

/// A weighted list of matrices realizing a distribution over low-rank
/// approximations; weights are positive and sum to one.
#[derive(Debug, Clone)]
pub struct Ensemble {
    members: Vec<(BigRational, EnsembleMember)>,
}

impl Ensemble {
    pub fn new(members: Vec<(BigRational, EnsembleMember)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidParameter(
                "ensemble needs at least one member".into(),
            ));
        }
        let mut total = BigRational::zero();
        for (w, _) in &members {
            if !w.is_positive() {
                return Err(Error::InvalidParameter(
                    "ensemble weights must be positive".into(),
                ));
            }
            total += w;
        }
        if total != BigRational::one() {
            return Err(Error::InvalidParameter(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(BigRational, EnsembleMember)] {
        &self.members
    }

    /// Per-entry i.i.d. Boolean flip noise applied to `base`, one member
    /// per sample, uniformly weighted. Matches the independence the
    /// composition argument needs.
    pub fn flip_noise(base: &FpMatrix, delta: f64, members: usize, rng_seed: u64) -> Result<Self> {
        if members == 0 || !(0.0..=1.0).contains(&delta) {
            return Err(Error::InvalidParameter(
                "need members >= 1 and delta in [0, 1]".into(),
            ));
        }
        let p = base.modulus();
        let flip_of = |e: u8| -> u8 {
            if e == 1 {
                if p == 2 {
                    0
                } else {
                    p - 1
                }
            } else {
                1
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let weight = BigRational::new(BigInt::one(), BigInt::from(members as u64));
        let list = (0..members)
            .map(|_| {
                let m = FpMatrix::from_fn(base.rows(), base.cols(), p as u64, |i, j| {
                    let e = base.get(i, j);
                    if rng.random::<f64>() < delta {
                        flip_of(e)
                    } else {
                        e
                    }
                })
                .expect("validated modulus");
                (weight.clone(), EnsembleMember::Dense(m))
            })
            .collect();
        Self::new(list)
    }
}

#[derive(Debug, Clone)]
pub struct EnsembleReport {
    /// max over entries of the weighted disagreement probability.
    pub max_error: BigRational,
    /// largest materialized member rank.
    pub max_rank: usize,
}

/// Worst-entry disagreement probability of the ensemble against a target
/// sign matrix.
pub fn ensemble_max_error(e: &Ensemble, target: &SignMatrix) -> Result<EnsembleReport> {
    let mats: Vec<FpMatrix> = e.members.iter().map(|(_, m)| m.materialize()).collect();
    for m in &mats {
        if m.rows() != target.rows() || m.cols() != target.cols() {
            return Err(Error::ShapeMismatch {
                left: m.shape_string(),
                right: target.shape_string(),
            });
        }
    }
    let mut max_error = BigRational::zero();
    for i in 0..target.rows() {
        for j in 0..target.cols() {
            let mut err = BigRational::zero();
            for ((w, _), m) in e.members.iter().zip(&mats) {
                let b = if m.get(i, j) == 1 { 1 } else { -1 };
                if b != target.get(i, j) {
                    err += w;
                }
            }
            if err > max_error {
                max_error = err;
            }
        }
    }
    let max_rank = mats.iter().map(fp_rank).max().unwrap_or(0);
    Ok(EnsembleReport {
        max_error,
        max_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{distance_base, maj_power, sign_to_fp, walsh_hadamard};
    use rand::SeedableRng;

    #[test]
    fn pi_tilde_examples() {
        // all-ones input is fixed at 1 for every seed
        for p in [2u64, 3, 5] {
            for a in 0..p as u8 {
                assert_eq!(pi_tilde_eval(&[a, a], &[1, 1], p).unwrap(), 1);
            }
        }
        // zero seed gives 1 for every input
        assert_eq!(pi_tilde_eval(&[0, 0], &[2, 0], 3).unwrap(), 1);
        // p=3, a=(1), z=(2): 1 + 1*1 = 2, bool = -1
        assert_eq!(pi_tilde_eval(&[1], &[2], 3).unwrap(), 2);
        assert!(pi_tilde_eval(&[1], &[1, 2], 3).is_err());
    }

    #[test]
    fn seed_success_probabilities() {
        assert_eq!(
            seed_success_prob(&[1, 1, 1], 3).unwrap(),
            BigRational::one()
        );
        assert_eq!(seed_success_prob(&[2, 1], 3).unwrap(), ratio(1, 3));
        assert_eq!(seed_success_prob(&[0, 2], 2).unwrap(), ratio(1, 2));
    }

    #[test]
    fn approximant_entries_and_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let l = LowRankFp::random(1, 2, 3, &mut rng).unwrap();
        let approx = build_kron_approximant(&l, &[1, 2], 2).unwrap();
        let base = l.materialize();
        for _ in 0..100 {
            let x = rng.random_range(0..4u64);
            let y = rng.random_range(0..4u64);
            let xd = index_digits(x as usize, 2, 2);
            let yd = index_digits(y as usize, 2, 2);
            let z = [base.get(xd[0], yd[0]), base.get(xd[1], yd[1])];
            assert_eq!(
                approx.entry(x, y),
                pi_tilde_eval(approx.seed(), &z, 3).unwrap()
            );
        }
        let m = approx.materialize().unwrap();
        assert!(fp_rank(&m) <= 3, "q=2, r=1, n=2: rank <= nr + 1 = 3");

        let zero_seed = build_kron_approximant(&l, &[0, 0], 2).unwrap();
        let m = zero_seed.materialize().unwrap();
        assert!(m.entries().iter().all(|&e| e == 1));
        assert_eq!(fp_rank(&m), 1);
    }

    #[test]
    fn kron_error_n1_exact_base_is_zero() {
        // n = 1 with seed (1): the approximant IS the base, so with an
        // exact base every one of the 64 entries agrees
        let h3 = walsh_hadamard(3).unwrap();
        let l = LowRankFp::factor(&sign_to_fp(&h3, 3).unwrap());
        let approx = build_kron_approximant(&l, &[1], 1).unwrap();
        let count = kron_error_exact(&h3, &approx, &CountOptions::default()).unwrap();
        assert!(count.exhaustive);
        assert_eq!(count.total, 64);
        assert_eq!(count.disagreements, 0);
    }

    #[test]
    fn kron_error_h3_exact_base() {
        // exact base: errors vanish entirely for a seed realizing parity
        let h3 = walsh_hadamard(3).unwrap();
        let l = LowRankFp::factor(&sign_to_fp(&h3, 3).unwrap());
        let opts = CountOptions::default();
        let (seed, best) = best_seed_search(&h3, &l, 2, SeedSearchMode::Exhaustive, &opts).unwrap();
        // mean over seeds dominates the best seed
        let mut total = 0u64;
        let mut seeds = 0u64;
        let mut pairs = 0u64;
        for s0 in 0..3u8 {
            for s1 in 0..3u8 {
                let approx = build_kron_approximant(&l, &[s0, s1], 2).unwrap();
                let c = kron_error_exact(&h3, &approx, &opts).unwrap();
                total += c.disagreements;
                pairs = c.total;
                seeds += 1;
            }
        }
        assert!(best.disagreements * seeds <= total, "min <= mean");
        assert!(best.exhaustive);
        // the coordinates of uniform (x, y) are i.i.d. with p1 = 36/64, so
        // the mean over seeds equals the closed form exactly
        let mean = BigRational::new(BigInt::from(total), BigInt::from(seeds * pairs));
        let closed = kron_error_expected(
            3,
            &ratio(9, 16),
            &ratio(7, 16),
            &BigRational::zero(),
            &BigRational::zero(),
            2,
        )
        .unwrap();
        assert_eq!(mean, closed);
        assert!(best.fraction() <= closed, "best <= expected");
        // theorem bound at alpha = 1/8, delta = 0, n = 2
        let bound = kron_theorem_bound(&ratio(1, 8), &BigRational::zero(), 2).unwrap();
        assert_eq!(bound, ratio(55, 128));
        assert!(best.fraction() <= bound, "seed {seed:?}");
    }

    #[test]
    fn expected_error_examples() {
        let half = ratio(1, 2);
        // p=3, n=1, balanced, no noise: only A = -1 with a = 0 errs
        let e = kron_error_expected(
            3,
            &half,
            &half,
            &BigRational::zero(),
            &BigRational::zero(),
            1,
        )
        .unwrap();
        assert_eq!(e, ratio(1, 6));
        // d1 = dm1 = 1/2 kills the survival term up to the parity part
        let e = kron_error_expected(3, &ratio(2, 3), &ratio(1, 3), &half, &half, 2).unwrap();
        let expect = &half - &(ratio(-1, 6) * ratio(1, 9)) - ratio(2, 3) * ratio(1, 36);
        assert_eq!(e, expect);
        assert!(kron_error_expected(3, &half, &half, &ratio(3, 2), &half, 1).is_err());
        assert!(kron_error_expected(3, &ratio(2, 3), &half, &half, &half, 1).is_err());
    }

    #[test]
    fn expected_error_matches_enumeration() {
        // enumerate (A values, L values, seeds) exactly
        let grid = [
            (ratio(1, 2), ratio(0, 1), ratio(0, 1)),
            (ratio(1, 2), ratio(1, 2), ratio(1, 2)),
            (ratio(9, 16), ratio(0, 1), ratio(0, 1)),
            (ratio(1, 4), ratio(1, 8), ratio(1, 16)),
            (ratio(2, 3), ratio(1, 3), ratio(1, 5)),
        ];
        for p in [2u64, 3] {
            for n in 1..=3usize {
                for (p1, d1, dm1) in &grid {
                    let pm1 = BigRational::one() - p1;
                    let closed = kron_error_expected(p, p1, &pm1, d1, dm1, n).unwrap();
                    let enumerated = enumerate_expected(p as u8, p1, &pm1, d1, dm1, n);
                    assert_eq!(closed, enumerated, "p={p} n={n}");
                }
            }
        }
    }

    /// Independent oracle: total probability over (A, L-bool, seed)
    /// configurations, with booleans embedded as field values (+1 -> 1,
    /// -1 -> the witness non-1 residue).
    #[allow(clippy::needless_range_loop)]
    fn enumerate_expected(
        p: u8,
        p1: &BigRational,
        pm1: &BigRational,
        d1: &BigRational,
        dm1: &BigRational,
        n: usize,
    ) -> BigRational {
        let nonone = if p == 2 { 0u8 } else { p - 1 };
        let mut total = BigRational::zero();
        let one = BigRational::one();
        for mask_a in 0..1u32 << n {
            for mask_l in 0..1u32 << n {
                let mut weight = BigRational::one();
                let mut sign = 1i8;
                let mut z = vec![0u8; n];
                for i in 0..n {
                    let ai = if mask_a >> i & 1 == 0 { 1i8 } else { -1 };
                    let li = if mask_l >> i & 1 == 0 { 1i8 } else { -1 };
                    sign *= ai;
                    z[i] = if li == 1 { 1 } else { nonone };
                    let pa = if ai == 1 { p1 } else { pm1 };
                    let dd = if ai == 1 { d1 } else { dm1 };
                    weight *= pa * if li == ai { &one - dd } else { dd.clone() };
                }
                if weight.is_zero() {
                    continue;
                }
                let seeds = (p as u64).pow(n as u32);
                let mut errs = 0u64;
                let mut a = vec![0u8; n];
                for idx in 0..seeds {
                    let mut rem = idx;
                    for d in a.iter_mut() {
                        *d = (rem % p as u64) as u8;
                        rem /= p as u64;
                    }
                    let v = pi_tilde_eval(&a, &z, p as u64).unwrap();
                    let b = if v == 1 { 1i8 } else { -1 };
                    if b != sign {
                        errs += 1;
                    }
                }
                total += weight * BigRational::new(BigInt::from(errs), BigInt::from(seeds));
            }
        }
        total
    }

    #[test]
    fn prefix_approximant_basics() {
        let m1 = sign_to_fp(&distance_base(), 3).unwrap();
        // k = n: the approximant is the base itself
        let p1 = build_prefix_approximant(&m1, 1, 1).unwrap();
        assert_eq!(p1.materialize().unwrap(), m1);
        assert!(
            build_prefix_approximant(&m1, 2, 2).is_err(),
            "2 is not a perfect square"
        );
        // rank preservation at q=2, k=1, n=3
        let p3 = build_prefix_approximant(&m1, 1, 3).unwrap();
        let m = p3.materialize().unwrap();
        assert_eq!(fp_rank(&m), fp_rank(&m1));
        for x in 0..8u64 {
            for y in 0..8u64 {
                assert_eq!(p3.entry(x, y), m1.get((x / 4) as usize, (y / 4) as usize));
            }
        }
        assert!(build_prefix_approximant(&m1, 3, 2).is_err(), "k > n");
    }

    #[test]
    fn prefix_error_k1_n3_is_quarter() {
        let m1 = distance_base();
        let base = sign_to_fp(&m1, 3).unwrap();
        let approx = build_prefix_approximant(&base, 1, 3).unwrap();
        let count = maj_error_exact(&m1, &approx, &CountOptions::default()).unwrap();
        assert!(count.exhaustive);
        assert_eq!(count.fraction(), ratio(1, 4));
        assert_eq!(
            maj_amplified_error(1, 3, &BigRational::zero()).unwrap(),
            ratio(1, 4)
        );
    }

    #[test]
    fn majority_agreement_examples() {
        assert_eq!(majority_agreement_prob(3, 3).unwrap(), BigRational::one());
        assert_eq!(majority_agreement_prob(1, 3).unwrap(), ratio(3, 4));
        // enumerate all 16 sign patterns for k=2, n=4
        let mut agree = 0;
        for bits in 0..16u32 {
            let s: i32 = (0..4)
                .map(|i| if bits >> i & 1 == 0 { 1 } else { -1 })
                .sum();
            let s1: i32 = (0..2)
                .map(|i| if bits >> i & 1 == 0 { 1 } else { -1 })
                .sum();
            if (s >= 0) == (s1 >= 0) {
                agree += 1;
            }
        }
        assert_eq!(majority_agreement_prob(2, 4).unwrap(), ratio(agree, 16));
    }

    #[test]
    fn majority_agreement_matches_enumeration() {
        for n in 1..=12usize {
            for k in 1..=n {
                let mut agree = 0i64;
                for bits in 0..1u64 << n {
                    let s: i32 = (0..n)
                        .map(|i| if bits >> i & 1 == 0 { 1 } else { -1 })
                        .sum();
                    let s1: i32 = (0..k)
                        .map(|i| if bits >> i & 1 == 0 { 1 } else { -1 })
                        .sum();
                    if (s >= 0) == (s1 >= 0) {
                        agree += 1;
                    }
                }
                assert_eq!(
                    majority_agreement_prob(k, n).unwrap(),
                    BigRational::new(BigInt::from(agree), BigInt::one() << n),
                    "k={k} n={n}"
                );
            }
        }
    }

    #[test]
    fn binomial_tail_examples() {
        assert_eq!(binomial_tail(1, 1).unwrap(), ratio(1, 2));
        assert_eq!(binomial_tail(4, 1).unwrap(), ratio(5, 16));
        assert_eq!(binomial_tail(6, -6).unwrap(), BigRational::one());
        assert!(binomial_tail(4, 5).is_err());
    }

    #[test]
    fn amplified_error_identities() {
        let half = ratio(1, 2);
        for k in [1usize, 2, 3] {
            for n in [3usize, 5, 8] {
                if k <= n {
                    assert_eq!(maj_amplified_error(k, n, &half).unwrap(), half);
                }
            }
        }
        assert_eq!(
            maj_amplified_error(1, 3, &BigRational::zero()).unwrap(),
            ratio(1, 4)
        );
        assert!(maj_amplified_error(1, 3, &ratio(2, 3)).is_err());
    }

    #[test]
    fn ensemble_basics() {
        let m1 = distance_base();
        let base = sign_to_fp(&m1, 3).unwrap();
        let single = Ensemble::new(vec![(
            BigRational::one(),
            EnsembleMember::Dense(base.clone()),
        )])
        .unwrap();
        let report = ensemble_max_error(&single, &m1).unwrap();
        assert!(report.max_error.is_zero());

        // (1 - d, d) with the second member flipped everywhere
        let flipped =
            FpMatrix::from_fn(2, 2, 3, |i, j| if base.get(i, j) == 1 { 2 } else { 1 }).unwrap();
        let d = ratio(1, 5);
        let pair = Ensemble::new(vec![
            (BigRational::one() - &d, EnsembleMember::Dense(base.clone())),
            (d.clone(), EnsembleMember::Dense(flipped)),
        ])
        .unwrap();
        let report = ensemble_max_error(&pair, &m1).unwrap();
        assert_eq!(report.max_error, d);

        assert!(Ensemble::new(vec![(ratio(1, 2), EnsembleMember::Dense(base))]).is_err());
    }

    #[test]
    fn flip_noise_statistics() {
        let m2 = maj_power(&distance_base(), 2).unwrap();
        let base = sign_to_fp(&m2, 3).unwrap();
        let e = Ensemble::flip_noise(&base, 0.25, 64, 7).unwrap();
        let report = ensemble_max_error(&e, &m2).unwrap();
        let max = report.max_error;
        assert!(
            max >= ratio(1, 10) && max <= ratio(9, 20),
            "max error {max}"
        );
    }

    #[test]
    fn maj_amplified_error_with_noise_matches_measurement() {
        // independent flip noise at rate delta on the exact M_k base:
        // average prefix error equals (1-p) + (2p-1) delta within 3 SEs
        let k = 1usize;
        let n = 5usize;
        let delta = 0.125f64;
        let members = 48;
        let m1 = distance_base();
        let base = sign_to_fp(&maj_power(&m1, k).unwrap(), 3).unwrap();
        let e = Ensemble::flip_noise(&base, delta, members, 11).unwrap();
        let opts = CountOptions::default();
        let mut fractions = Vec::new();
        for (_, member) in e.members() {
            let m = match member {
                EnsembleMember::Dense(m) => m.clone(),
                EnsembleMember::LowRank(l) => l.materialize(),
            };
            let approx = build_prefix_approximant(&m, k, n).unwrap();
            let c = maj_error_exact(&m1, &approx, &opts).unwrap();
            let f = c.disagreements as f64 / c.total as f64;
            fractions.push(f);
        }
        let mean = fractions.iter().sum::<f64>() / members as f64;
        let var = fractions.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / members as f64;
        let se = (var / members as f64).sqrt();
        let predicted =
            maj_amplified_error(k, n, &BigRational::new(BigInt::from(1), BigInt::from(8))).unwrap();
        let predicted = num::ToPrimitive::to_f64(&predicted).unwrap();
        assert!(
            (mean - predicted).abs() <= 3.0 * se.max(1e-9),
            "mean {mean} vs predicted {predicted} (se {se})"
        );
    }

    #[test]
    fn sampled_counts_are_deterministic_and_close() {
        // force the sampled path with a tiny pair cap and compare against
        // the exhaustive count
        let h2 = walsh_hadamard(2).unwrap();
        let l = LowRankFp::factor(&sign_to_fp(&h2, 3).unwrap());
        let approx = build_kron_approximant(&l, &[1, 0, 2], 3).unwrap();
        let exact = kron_error_exact(&h2, &approx, &CountOptions::default()).unwrap();
        assert!(exact.exhaustive);
        let sampled_opts = CountOptions { pair_cap: 100, samples: 40_000, rng_seed: 17 };
        let sampled = kron_error_exact(&h2, &approx, &sampled_opts).unwrap();
        assert!(!sampled.exhaustive);
        assert_eq!(sampled.rng_seed, Some(17));
        let again = kron_error_exact(&h2, &approx, &sampled_opts).unwrap();
        assert_eq!(sampled.disagreements, again.disagreements, "fixed seed, fixed count");
        let truth = num::ToPrimitive::to_f64(&exact.fraction()).unwrap();
        let est = sampled.disagreements as f64 / sampled.total as f64;
        let se = (truth * (1.0 - truth) / sampled.total as f64).sqrt();
        assert!((est - truth).abs() <= 4.0 * se, "estimate {est} vs truth {truth}");

        let m1 = distance_base();
        let base = sign_to_fp(&maj_power(&m1, 1).unwrap(), 3).unwrap();
        let prefix = build_prefix_approximant(&base, 1, 4).unwrap();
        let exact = maj_error_exact(&m1, &prefix, &CountOptions::default()).unwrap();
        let sampled = maj_error_exact(&m1, &prefix, &sampled_opts).unwrap();
        assert!(!sampled.exhaustive);
        let truth = num::ToPrimitive::to_f64(&exact.fraction()).unwrap();
        let est = sampled.disagreements as f64 / sampled.total as f64;
        let se = (truth * (1.0 - truth) / sampled.total as f64).sqrt().max(1e-6);
        assert!((est - truth).abs() <= 4.0 * se);
    }

    #[test]
    fn sampled_seed_search_is_deterministic() {
        let h3 = walsh_hadamard(3).unwrap();
        let l = LowRankFp::factor(&sign_to_fp(&h3, 3).unwrap());
        let opts = CountOptions::default();
        let mode = SeedSearchMode::Sampled { count: 4, rng_seed: 5 };
        let (s1, c1) = best_seed_search(&h3, &l, 2, mode, &opts).unwrap();
        let (s2, c2) = best_seed_search(&h3, &l, 2, mode, &opts).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(c1.disagreements, c2.disagreements);
    }

    #[test]
    fn expected_error_matches_monte_carlo() {
        // simulate the random-variable model directly: A_i = +-1 with
        // Pr[+1] = p1, L_i flips A_i at rate delta, seeds uniform
        let p = 3u64;
        let n = 4usize;
        let p1 = 0.5f64;
        let delta = 0.1f64;
        let samples = 200_000u64;
        let mut rng = ChaCha8Rng::seed_from_u64(271828);
        let mut errs = 0u64;
        let mut a = vec![0u8; n];
        let mut z = vec![0u8; n];
        for _ in 0..samples {
            let mut sign = 1i8;
            for i in 0..n {
                let ai: i8 = if rng.random::<f64>() < p1 { 1 } else { -1 };
                let li = if rng.random::<f64>() < delta { -ai } else { ai };
                sign *= ai;
                z[i] = if li == 1 { 1 } else { (p - 1) as u8 };
                a[i] = rng.random_range(0..p as u8);
            }
            let v = pi_tilde_eval(&a, &z, p).unwrap();
            if (v == 1) != (sign == 1) {
                errs += 1;
            }
        }
        let measured = errs as f64 / samples as f64;
        let d = BigRational::new(BigInt::from(1), BigInt::from(10));
        let expected = kron_error_expected(p, &ratio(1, 2), &ratio(1, 2), &d, &d, n).unwrap();
        let expected = num::ToPrimitive::to_f64(&expected).unwrap();
        let se = (expected * (1.0 - expected) / samples as f64).sqrt();
        assert!(
            (measured - expected).abs() <= 3.0 * se,
            "measured {measured} vs expected {expected} (se {se})"
        );
    }

    #[test]
    fn ensemble_accepts_low_rank_members() {
        let m1 = distance_base();
        let l = LowRankFp::factor(&sign_to_fp(&m1, 3).unwrap());
        let e = Ensemble::new(vec![(BigRational::one(), EnsembleMember::LowRank(l))]).unwrap();
        let report = ensemble_max_error(&e, &m1).unwrap();
        assert!(report.max_error.is_zero());
        // [[1,2],[2,1]] over F_3 has rank 1: the second row is twice the first
        assert_eq!(report.max_rank, 1);
    }
}
