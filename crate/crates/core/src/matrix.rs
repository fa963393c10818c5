//! Dense matrices over F_p and over {-1, +1}, their generators, and
//! rank computation by Gaussian elimination.

use rand::Rng;

use crate::error::{Error, Result};
use crate::exec;
use crate::fp::{check_modulus, mul_mod, sub_mod};

/// Default cap on materialized entries (2^26). Generators refuse to build
/// anything larger; callers that need more evaluate entries implicitly.
pub const DEFAULT_MATERIALIZE_CAP: usize = 1 << 26;

/// Row-major dense matrix of residues mod p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    rows: usize,
    cols: usize,
    p: u8,
    entries: Vec<u8>,
}

impl FpMatrix {
    pub fn zeros(rows: usize, cols: usize, p: u64) -> Result<Self> {
        let p = check_modulus(p)?;
        Ok(Self {
            rows,
            cols,
            p,
            entries: vec![0; rows * cols],
        })
    }

    pub fn from_entries(rows: usize, cols: usize, p: u64, entries: Vec<u8>) -> Result<Self> {
        let p = check_modulus(p)?;
        if entries.len() != rows * cols {
            return Err(Error::InvalidParameter(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|&e| e >= p) {
            return Err(Error::InvalidParameter(format!(
                "entry out of range [0, {p})"
            )));
        }
        Ok(Self {
            rows,
            cols,
            p,
            entries,
        })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        p: u64,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        let pp = check_modulus(p)?;
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j) % pp);
            }
        }
        Ok(Self {
            rows,
            cols,
            p: pp,
            entries,
        })
    }

    pub fn identity(n: usize, p: u64) -> Result<Self> {
        let mut m = Self::zeros(n, n, p)?;
        for i in 0..n {
            m.set(i, i, 1);
        }
        Ok(m)
    }

    pub fn random(rows: usize, cols: usize, p: u64, rng: &mut impl Rng) -> Result<Self> {
        let pp = check_modulus(p)?;
        let entries = (0..rows * cols).map(|_| rng.random_range(0..pp)).collect();
        Ok(Self {
            rows,
            cols,
            p: pp,
            entries,
        })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.entries[i * self.cols + j] = v % self.p;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u8 {
        self.p
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u8> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn shape_string(&self) -> String {
        format!("{}x{} mod {}", self.rows, self.cols, self.p)
    }
}

/// Row rank over F_p by Gaussian elimination.
pub fn fp_rank(m: &FpMatrix) -> usize {
    let p = m.p;
    let mut a = m.entries.clone();
    let (rows, cols) = (m.rows, m.cols);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let pivot = (rank..rows).find(|&r| a[r * cols + col] != 0);
        let Some(pivot) = pivot else { continue };
        a.swap_chunks(rank, pivot, cols);
        let inv = crate::fp::inv_mod(a[rank * cols + col], p).expect("pivot nonzero");
        for c in col..cols {
            a[rank * cols + c] = mul_mod(a[rank * cols + c], inv, p);
        }
        for r in 0..rows {
            if r != rank && a[r * cols + col] != 0 {
                let f = a[r * cols + col];
                for c in col..cols {
                    let sub = mul_mod(f, a[rank * cols + c], p);
                    a[r * cols + c] = sub_mod(a[r * cols + c], sub, p);
                }
            }
        }
        rank += 1;
    }
    rank
}

trait SwapChunks {
    fn swap_chunks(&mut self, a: usize, b: usize, width: usize);
}

impl SwapChunks for Vec<u8> {
    fn swap_chunks(&mut self, a: usize, b: usize, width: usize) {
        if a == b {
            return;
        }
        for k in 0..width {
            self.swap(a * width + k, b * width + k);
        }
    }
}

/// Dense {-1, +1} matrix, bit-packed one bit per entry (+1 -> 0, -1 -> 1)
/// with each row aligned to a 64-bit word boundary so agreement counts
/// reduce to popcounts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl SignMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i8) -> Self {
        let words_per_row = cols.div_ceil(64).max(1);
        let mut bits = vec![0u64; rows * words_per_row];
        for i in 0..rows {
            for j in 0..cols {
                let v = f(i, j);
                debug_assert!(v == 1 || v == -1, "sign entries are +1 or -1");
                if v == -1 {
                    bits[i * words_per_row + j / 64] |= 1u64 << (j % 64);
                }
            }
        }
        Self {
            rows,
            cols,
            words_per_row,
            bits,
        }
    }

    pub fn constant(rows: usize, cols: usize, v: i8) -> Self {
        Self::from_fn(rows, cols, |_, _| v)
    }

    pub fn random(rows: usize, cols: usize, rng: &mut impl Rng) -> Self {
        Self::from_fn(rows, cols, |_, _| if rng.random::<bool>() { 1 } else { -1 })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i8 {
        let w = self.bits[i * self.words_per_row + j / 64];
        if (w >> (j % 64)) & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn count_neg(&self) -> u64 {
        let mut total = 0u64;
        for i in 0..self.rows {
            for w in 0..self.words_per_row {
                let mut word = self.bits[i * self.words_per_row + w];
                if w == self.words_per_row - 1 && !self.cols.is_multiple_of(64) {
                    word &= (1u64 << (self.cols % 64)) - 1;
                }
                total += word.count_ones() as u64;
            }
        }
        total
    }

    pub fn count_pos(&self) -> u64 {
        (self.rows * self.cols) as u64 - self.count_neg()
    }

    /// Columns as packed bit vectors over the rows (-1 -> set bit).
    /// Used by the rank-1 popcount kernels.
    pub fn packed_columns(&self) -> Vec<Vec<u64>> {
        let words = self.rows.div_ceil(64).max(1);
        let mut cols = vec![vec![0u64; words]; self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) == -1 {
                    cols[j][i / 64] |= 1u64 << (i % 64);
                }
            }
        }
        cols
    }

    pub fn shape_string(&self) -> String {
        format!("{}x{} sign", self.rows, self.cols)
    }
}

/// Entrywise Booleanization: residue 1 -> +1, everything else -> -1.
pub fn booleanize(m: &FpMatrix) -> SignMatrix {
    SignMatrix::from_fn(m.rows, m.cols, |i, j| if m.get(i, j) == 1 { 1 } else { -1 })
}

/// Embed signs into F_p: +1 -> 1, -1 -> p-1. For p = 2 both signs collapse
/// onto residue 1 (sign-degenerate); for p >= 3, booleanize is a left
/// inverse.
pub fn sign_to_fp(s: &SignMatrix, p: u64) -> Result<FpMatrix> {
    let pp = check_modulus(p)?;
    FpMatrix::from_fn(
        s.rows,
        s.cols,
        p,
        |i, j| if s.get(i, j) == 1 { 1 } else { pp - 1 },
    )
}

/// Number of entries where `a` disagrees with bool(l).
pub fn boolean_distance(a: &SignMatrix, l: &FpMatrix) -> Result<u64> {
    if a.rows != l.rows || a.cols != l.cols {
        return Err(Error::ShapeMismatch {
            left: a.shape_string(),
            right: l.shape_string(),
        });
    }
    let mut count = 0;
    for i in 0..a.rows {
        for j in 0..a.cols {
            let b = if l.get(i, j) == 1 { 1 } else { -1 };
            if b != a.get(i, j) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Number of entries where two F_p matrices differ.
pub fn hamming_distance(a: &FpMatrix, b: &FpMatrix) -> Result<u64> {
    if a.rows != b.rows || a.cols != b.cols || a.p != b.p {
        return Err(Error::ShapeMismatch {
            left: a.shape_string(),
            right: b.shape_string(),
        });
    }
    Ok(a.entries
        .iter()
        .zip(&b.entries)
        .filter(|(x, y)| x != y)
        .count() as u64)
}

/// Decode index `x` into `n` base-q digits, most significant first.
pub fn index_digits(x: usize, q: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    let mut rem = x;
    for d in out.iter_mut().rev() {
        *d = rem % q;
        rem /= q;
    }
    out
}

fn check_power_cap(q: usize, n: usize, cap: usize) -> Result<usize> {
    let mut side = 1usize;
    for _ in 0..n {
        side = side
            .checked_mul(q)
            .filter(|s| s.checked_mul(*s).is_some_and(|e| e <= cap))
            .ok_or(Error::CapExceeded {
                what: "materialized power",
                needed: (q as u128).checked_pow(2 * n as u32).unwrap_or(u128::MAX),
                cap: cap as u128,
            })?;
    }
    Ok(side)
}

/// Plain Kronecker product: the row index of `a` supplies the leading
/// digits.
pub fn kron_product(a: &SignMatrix, b: &SignMatrix) -> SignMatrix {
    SignMatrix::from_fn(a.rows * b.rows, a.cols * b.cols, |i, j| {
        a.get(i / b.rows, j / b.cols) * b.get(i % b.rows, j % b.cols)
    })
}

/// Kronecker power A^(x)n with the row/column index read as a base-q digit
/// string, most significant digit first.
pub fn kron_power_with_cap(a: &SignMatrix, n: usize, cap: usize) -> Result<SignMatrix> {
    if a.rows != a.cols {
        return Err(Error::InvalidParameter(
            "Kronecker power needs a square base".into(),
        ));
    }
    let q = a.rows;
    let side = check_power_cap(q, n, cap)?;
    if n == 0 {
        return Ok(SignMatrix::constant(1, 1, 1));
    }
    // fold A (x) previous, so the leading digit indexes the base matrix
    let mut acc = a.clone();
    for _ in 1..n {
        let prev = acc;
        let block = prev.rows;
        acc = SignMatrix::from_fn(block * q, block * q, |i, j| {
            a.get(i / block, j / block) * prev.get(i % block, j % block)
        });
    }
    debug_assert_eq!(acc.rows, side);
    Ok(acc)
}

pub fn kron_power(a: &SignMatrix, n: usize) -> Result<SignMatrix> {
    kron_power_with_cap(a, n, DEFAULT_MATERIALIZE_CAP)
}

/// Majority power: entrywise `Maj(A[x_1,y_1], ..., A[x_n,y_n])` with ties
/// resolved to +1.
pub fn maj_power_with_cap(a: &SignMatrix, n: usize, cap: usize) -> Result<SignMatrix> {
    if a.rows != a.cols {
        return Err(Error::InvalidParameter(
            "Majority power needs a square base".into(),
        ));
    }
    let q = a.rows;
    let side = check_power_cap(q, n, cap)?;
    if n == 0 {
        return Ok(SignMatrix::constant(1, 1, 1));
    }
    let rows: Vec<SignMatrix> = exec::map_collect(side, |x| {
        let xd = index_digits(x, q, n);
        SignMatrix::from_fn(1, side, |_, y| {
            let yd = index_digits(y, q, n);
            let s: i32 = xd
                .iter()
                .zip(&yd)
                .map(|(&xi, &yi)| a.get(xi, yi) as i32)
                .sum();
            if s >= 0 {
                1
            } else {
                -1
            }
        })
    });
    Ok(SignMatrix::from_fn(side, side, |i, j| rows[i].get(0, j)))
}

pub fn maj_power(a: &SignMatrix, n: usize) -> Result<SignMatrix> {
    maj_power_with_cap(a, n, DEFAULT_MATERIALIZE_CAP)
}

/// H_1 = [[1, 1], [1, -1]].
pub fn hadamard_base() -> SignMatrix {
    SignMatrix::from_fn(2, 2, |i, j| if i == 1 && j == 1 { -1 } else { 1 })
}

/// M_1 = [[1, -1], [-1, 1]], the 1-bit equality matrix.
pub fn distance_base() -> SignMatrix {
    SignMatrix::from_fn(2, 2, |i, j| if i == j { 1 } else { -1 })
}

/// Walsh-Hadamard matrix H_n = H_1^(x)n.
pub fn walsh_hadamard(n: usize) -> Result<SignMatrix> {
    kron_power(&hadamard_base(), n)
}

/// Distance matrix: +1 exactly when the Hamming distance of the n-bit row
/// and column indices is at most n/2. Equals the n-th Majority power of M_1.
pub fn distance_matrix_with_cap(n: usize, cap: usize) -> Result<SignMatrix> {
    let side = check_power_cap(2, n, cap)?;
    Ok(SignMatrix::from_fn(side, side, |x, y| {
        if 2 * ((x ^ y) as u64).count_ones() as usize <= n {
            1
        } else {
            -1
        }
    }))
}

pub fn distance_matrix(n: usize) -> Result<SignMatrix> {
    distance_matrix_with_cap(n, DEFAULT_MATERIALIZE_CAP)
}

/// Explicit decomposition L = U^T V with U, V of shape r x N over F_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowRankFp {
    u: FpMatrix,
    v: FpMatrix,
}

impl LowRankFp {
    pub fn new(u: FpMatrix, v: FpMatrix) -> Result<Self> {
        if u.p != v.p {
            return Err(Error::ModulusMismatch(u.p, v.p));
        }
        if u.rows != v.rows {
            return Err(Error::ShapeMismatch {
                left: u.shape_string(),
                right: v.shape_string(),
            });
        }
        Ok(Self { u, v })
    }

    /// Zero decomposition of the given inner dimension.
    pub fn zero(r: usize, n: usize, p: u64) -> Result<Self> {
        Ok(Self {
            u: FpMatrix::zeros(r, n, p)?,
            v: FpMatrix::zeros(r, n, p)?,
        })
    }

    pub fn random(r: usize, n: usize, p: u64, rng: &mut impl Rng) -> Result<Self> {
        Ok(Self {
            u: FpMatrix::random(r, n, p, rng)?,
            v: FpMatrix::random(r, n, p, rng)?,
        })
    }

    /// Rank factorization of an arbitrary F_p matrix: pivot columns of m as
    /// U^T, reduced rows as V, so that U^T V = m with inner dimension
    /// fp_rank(m).
    pub fn factor(m: &FpMatrix) -> Self {
        let p = m.p;
        let (rows, cols) = (m.rows, m.cols);
        let mut a = m.entries.clone();
        let mut pivots = Vec::new();
        let mut rank = 0usize;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(piv) = (rank..rows).find(|&r| a[r * cols + col] != 0) else {
                continue;
            };
            a.swap_chunks(rank, piv, cols);
            let inv = crate::fp::inv_mod(a[rank * cols + col], p).expect("pivot nonzero");
            for c in col..cols {
                a[rank * cols + c] = mul_mod(a[rank * cols + c], inv, p);
            }
            for r in 0..rows {
                if r != rank && a[r * cols + col] != 0 {
                    let f = a[r * cols + col];
                    for c in col..cols {
                        let sub = mul_mod(f, a[rank * cols + c], p);
                        a[r * cols + c] = sub_mod(a[r * cols + c], sub, p);
                    }
                }
            }
            pivots.push(col);
            rank += 1;
        }
        let u = FpMatrix::from_fn(rank, rows, p as u64, |t, i| m.get(i, pivots[t])).unwrap();
        let v = FpMatrix::from_fn(rank, cols, p as u64, |t, j| a[t * cols + j]).unwrap();
        Self { u, v }
    }

    pub fn u(&self) -> &FpMatrix {
        &self.u
    }

    pub fn v(&self) -> &FpMatrix {
        &self.v
    }

    /// Inner dimension r of the decomposition (an upper bound on the rank).
    pub fn inner_dim(&self) -> usize {
        self.u.rows
    }

    /// Row count of the materialized product.
    pub fn left_dim(&self) -> usize {
        self.u.cols
    }

    /// Column count of the materialized product.
    pub fn right_dim(&self) -> usize {
        self.v.cols
    }

    /// Side length for the square case.
    pub fn side(&self) -> usize {
        debug_assert_eq!(self.u.cols, self.v.cols);
        self.u.cols
    }

    pub fn modulus(&self) -> u8 {
        self.u.p
    }

    pub fn entry(&self, i: usize, j: usize) -> u8 {
        let p = self.u.p;
        let mut acc = 0u8;
        for t in 0..self.u.rows {
            acc = crate::fp::add_mod(acc, mul_mod(self.u.get(t, i), self.v.get(t, j), p), p);
        }
        acc
    }

    /// The product U^T V as a dense matrix.
    pub fn materialize(&self) -> FpMatrix {
        FpMatrix::from_fn(self.u.cols, self.v.cols, self.u.p as u64, |i, j| {
            self.entry(i, j)
        })
        .expect("modulus already validated")
    }
}
