//! Exact Boolean and regular rigidity for small matrices by enumerating
//! rank-<= r column spaces over F_p, a brute-force oracle over raw (U, V)
//! pairs for cross-validation, and a bit-packed rank-1 upper-bound searcher
//! for medium sizes.
//!
//! Fixing the column space collapses the search: inside a candidate span,
//! each column of the target is approximated independently by its best
//! span vector. Candidate spans are enumerated through their unique
//! reduced-echelon bases, in a fixed order (dimension, then pivot columns,
//! then free entries), and ties everywhere resolve to the earliest
//! candidate, so results are deterministic and independent of the thread
//! count.

use crate::error::{Error, Result};
use crate::exec;
use crate::fp::{add_mod, check_modulus, mul_mod};
use crate::matrix::{boolean_distance, hamming_distance, FpMatrix, LowRankFp, SignMatrix};

/// Default work budget, in popcount-equivalent operations.
pub const DEFAULT_WORK_BUDGET: u128 = 10_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RigidityMode {
    Boolean,
    Regular,
}

/// Outcome of a rigidity computation: the minimum number of entry changes
/// together with a witness decomposition achieving it.
#[derive(Debug, Clone)]
pub struct RigidityResult {
    pub value: u64,
    pub witness: LowRankFp,
    pub mode: RigidityMode,
    pub rank: usize,
    pub p: u8,
    /// True when the full candidate set was scanned; a false flag means
    /// `value` is only an upper bound.
    pub exhaustive: bool,
}

/// Gaussian binomial [n choose d]_p as f64, for work estimates.
fn gaussian_binomial(n: usize, d: usize, p: u8) -> f64 {
    if d > n {
        return 0.0;
    }
    let p = p as f64;
    let mut acc = 1.0f64;
    for i in 0..d {
        acc *= (p.powi((n - i) as i32) - 1.0) / (p.powi((i + 1) as i32) - 1.0);
    }
    acc
}

/// Reduced-echelon bases of d-dimensional subspaces of F_p^n with the given
/// pivot columns: pivot entries 1, zeros left of pivots and in other pivot
/// columns, free entries elsewhere right of each pivot.
struct PivotShape {
    n: usize,
    pivots: Vec<usize>,
    /// (row, col) of each free cell, row-major; the first cell is the most
    /// significant digit of the assignment index.
    free_cells: Vec<(usize, usize)>,
}

impl PivotShape {
    fn new(n: usize, pivots: Vec<usize>) -> Self {
        let mut free_cells = Vec::new();
        for (t, &jt) in pivots.iter().enumerate() {
            for c in jt + 1..n {
                if !pivots.contains(&c) {
                    free_cells.push((t, c));
                }
            }
        }
        Self {
            n,
            pivots,
            free_cells,
        }
    }

    fn assignments(&self, p: u8) -> u64 {
        (p as u64).pow(self.free_cells.len() as u32)
    }

    /// Materialize the basis (d x n residues, rows are basis vectors) for
    /// one assignment index.
    fn basis(&self, p: u8, assignment: u64, out: &mut [u8]) {
        out.fill(0);
        for (t, &jt) in self.pivots.iter().enumerate() {
            out[t * self.n + jt] = 1;
        }
        let mut rem = assignment;
        for &(t, c) in self.free_cells.iter().rev() {
            out[t * self.n + c] = (rem % p as u64) as u8;
            rem /= p as u64;
        }
    }
}

fn combinations(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..d).collect();
    if d > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        // advance lexicographically
        let mut i = d;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - d {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for k in i + 1..d {
            cur[k] = cur[k - 1] + 1;
        }
    }
}

#[derive(Debug, Clone)]
struct Candidate {
    value: u64,
    /// (dimension, pivot-set index, assignment index): enumeration order.
    key: (usize, usize, u64),
    basis: Vec<u8>,
    d: usize,
    choices: Vec<u64>,
}

fn better(a: &Candidate, b: &Candidate) -> bool {
    (a.value, a.key) < (b.value, b.key)
}

/// Per-column disagreement costs of one span vector.
enum Target<'a> {
    Boolean {
        col_bits: &'a [u64],
        mask: u64,
        rows: usize,
    },
    Regular {
        m: &'a FpMatrix,
    },
}

impl Target<'_> {
    fn cols(&self) -> usize {
        match self {
            Target::Boolean { col_bits, .. } => col_bits.len(),
            Target::Regular { m } => m.cols(),
        }
    }

    fn rows(&self) -> usize {
        match self {
            Target::Boolean { rows, .. } => *rows,
            Target::Regular { m } => m.rows(),
        }
    }

    /// Add nothing; fill `cost[j]` with the disagreement between span
    /// vector `w` and column j.
    fn column_costs(&self, w: &[u8], cost: &mut [u32]) {
        match self {
            Target::Boolean { col_bits, mask, .. } => {
                let mut pattern = 0u64;
                for (i, &wi) in w.iter().enumerate() {
                    if wi != 1 {
                        pattern |= 1 << i;
                    }
                }
                for (j, bits) in col_bits.iter().enumerate() {
                    cost[j] = ((bits ^ pattern) & mask).count_ones();
                }
            }
            Target::Regular { m } => {
                for (j, c) in cost.iter_mut().enumerate() {
                    let mut acc = 0u32;
                    for (i, &wi) in w.iter().enumerate() {
                        if m.get(i, j) != wi {
                            acc += 1;
                        }
                    }
                    *c = acc;
                }
            }
        }
    }
}

/// Scan every rank-<= r column space; returns the best candidate.
fn enumerate_column_spaces(
    target: &Target<'_>,
    r: usize,
    p: u8,
    budget: u128,
) -> Result<Candidate> {
    let rows = target.rows();
    let cols = target.cols();
    if rows == 0 || cols == 0 || rows > 64 {
        return Err(Error::InvalidParameter(format!(
            "exact solver handles 1..=64 rows, got {rows}"
        )));
    }
    let r_eff = r.min(rows);
    let estimate: f64 = (0..=r_eff)
        .map(|d| {
            gaussian_binomial(rows, d, p)
                * (p as f64).powi(d as i32)
                * (rows * (cols + d + 1)) as f64
        })
        .sum();
    if estimate > budget as f64 {
        return Err(Error::BudgetExceeded {
            estimate: estimate as u128,
            budget,
        });
    }

    // flatten (d, pivot set, assignment chunk) into parallel work items
    const CHUNK: u64 = 1 << 14;
    struct Item {
        d: usize,
        pivot_idx: usize,
        pivots: Vec<usize>,
        lo: u64,
        hi: u64,
    }
    let mut items = Vec::new();
    for d in 0..=r_eff {
        for (pivot_idx, pivots) in combinations(rows, d).into_iter().enumerate() {
            let shape = PivotShape::new(rows, pivots.clone());
            let total = shape.assignments(p);
            let mut lo = 0;
            while lo < total {
                let hi = (lo + CHUNK).min(total);
                items.push(Item {
                    d,
                    pivot_idx,
                    pivots: pivots.clone(),
                    lo,
                    hi,
                });
                lo = hi;
            }
        }
    }

    let locals = exec::map_collect(items.len(), |idx| {
        let item = &items[idx];
        let shape = PivotShape::new(rows, item.pivots.clone());
        let span = (p as u64).pow(item.d as u32);
        let mut basis = vec![0u8; item.d * rows];
        let mut w = vec![0u8; rows];
        let mut cost = vec![0u32; cols];
        let mut best_cols = vec![(u32::MAX, 0u64); cols];
        let mut local: Option<Candidate> = None;
        for assignment in item.lo..item.hi {
            shape.basis(p, assignment, &mut basis);
            best_cols.fill((u32::MAX, 0));
            for s in 0..span {
                // span vector with coefficient digits of s, least
                // significant digit scaling basis row 0
                w.fill(0);
                let mut rem = s;
                for t in 0..item.d {
                    let c = (rem % p as u64) as u8;
                    rem /= p as u64;
                    if c != 0 {
                        for i in 0..rows {
                            w[i] = add_mod(w[i], mul_mod(c, basis[t * rows + i], p), p);
                        }
                    }
                }
                target.column_costs(&w, &mut cost);
                for (j, &cj) in cost.iter().enumerate() {
                    if cj < best_cols[j].0 {
                        best_cols[j] = (cj, s);
                    }
                }
            }
            let value: u64 = best_cols.iter().map(|&(c, _)| c as u64).sum();
            let key = (item.d, item.pivot_idx, assignment);
            if local
                .as_ref()
                .is_none_or(|cur| (value, key) < (cur.value, cur.key))
            {
                local = Some(Candidate {
                    value,
                    key,
                    basis: basis.clone(),
                    d: item.d,
                    choices: best_cols.iter().map(|&(_, s)| s).collect(),
                });
            }
        }
        local
    });

    let mut best: Option<Candidate> = None;
    for cand in locals.into_iter().flatten() {
        if best.as_ref().is_none_or(|cur| better(&cand, cur)) {
            best = Some(cand);
        }
    }
    best.ok_or_else(|| Error::InvalidParameter("empty search space".into()))
}

fn witness_from_candidate(
    cand: &Candidate,
    rows: usize,
    cols: usize,
    r: usize,
    p: u8,
) -> LowRankFp {
    let r_out = r.max(cand.d).max(1);
    let mut u = FpMatrix::zeros(r_out, rows, p as u64).expect("validated modulus");
    for t in 0..cand.d {
        for i in 0..rows {
            u.set(t, i, cand.basis[t * rows + i]);
        }
    }
    let mut v = FpMatrix::zeros(r_out, cols, p as u64).expect("validated modulus");
    for (j, &s) in cand.choices.iter().enumerate() {
        let mut rem = s;
        for t in 0..cand.d {
            v.set(t, j, (rem % p as u64) as u8);
            rem /= p as u64;
        }
    }
    LowRankFp::new(u, v).expect("shapes agree")
}

/// Exact Boolean rigidity: the minimum number of entries where bool(L)
/// disagrees with A over all rank-<= r matrices L in F_p^{N x N}.
///
/// ```
/// use matrig_core::matrix::hadamard_base;
/// use matrig_core::rigidity::exact_boolean_rigidity;
///
/// let res = exact_boolean_rigidity(&hadamard_base(), 1, 3).unwrap();
/// assert_eq!(res.value, 1);
/// assert!(res.exhaustive);
/// ```
pub fn exact_boolean_rigidity_with_budget(
    a: &SignMatrix,
    r: usize,
    p: u64,
    budget: u128,
) -> Result<RigidityResult> {
    let p = check_modulus(p)?;
    let cols = a.packed_columns();
    let col_bits: Vec<u64> = cols.into_iter().map(|words| words[0]).collect();
    let mask = if a.rows() == 64 {
        u64::MAX
    } else {
        (1u64 << a.rows()) - 1
    };
    let target = Target::Boolean {
        col_bits: &col_bits,
        mask,
        rows: a.rows(),
    };
    let cand = enumerate_column_spaces(&target, r, p, budget)?;
    let witness = witness_from_candidate(&cand, a.rows(), a.cols(), r, p);
    debug_assert_eq!(
        boolean_distance(a, &witness.materialize()).unwrap(),
        cand.value
    );
    Ok(RigidityResult {
        value: cand.value,
        witness,
        mode: RigidityMode::Boolean,
        rank: r,
        p,
        exhaustive: true,
    })
}

pub fn exact_boolean_rigidity(a: &SignMatrix, r: usize, p: u64) -> Result<RigidityResult> {
    exact_boolean_rigidity_with_budget(a, r, p, DEFAULT_WORK_BUDGET)
}

/// Exact regular rigidity: minimum Hamming disagreement against rank-<= r
/// matrices over the matrix's own modulus.
pub fn exact_regular_rigidity_with_budget(
    a: &FpMatrix,
    r: usize,
    budget: u128,
) -> Result<RigidityResult> {
    let p = a.modulus();
    let target = Target::Regular { m: a };
    let cand = enumerate_column_spaces(&target, r, p, budget)?;
    let witness = witness_from_candidate(&cand, a.rows(), a.cols(), r, p);
    debug_assert_eq!(
        hamming_distance(a, &witness.materialize()).unwrap(),
        cand.value
    );
    Ok(RigidityResult {
        value: cand.value,
        witness,
        mode: RigidityMode::Regular,
        rank: r,
        p,
        exhaustive: true,
    })
}

pub fn exact_regular_rigidity(a: &FpMatrix, r: usize) -> Result<RigidityResult> {
    exact_regular_rigidity_with_budget(a, r, DEFAULT_WORK_BUDGET)
}

/// What the brute-force oracle measures against.
pub enum RigidityTarget<'a> {
    Boolean { a: &'a SignMatrix, p: u64 },
    Regular(&'a FpMatrix),
}

/// Independent oracle: enumerate every pair (U, V) in F_p^{r x N} x
/// F_p^{r x N}, materialize U^T V, and take the minimum distance. Costs
/// p^{2 r N} materializations; practical for N <= 4, r = 1, p <= 3.
pub fn bruteforce_oracle(target: &RigidityTarget<'_>, r: usize, budget: u128) -> Result<u64> {
    let (rows, cols, p) = match target {
        RigidityTarget::Boolean { a, p } => (a.rows(), a.cols(), check_modulus(*p)?),
        RigidityTarget::Regular(m) => (m.rows(), m.cols(), m.modulus()),
    };
    let cells_u = r * rows;
    let cells_v = r * cols;
    let estimate = (p as f64).powi((cells_u + cells_v) as i32) * (rows * cols * r) as f64;
    if estimate > budget as f64 {
        return Err(Error::BudgetExceeded {
            estimate: estimate as u128,
            budget,
        });
    }
    let count_u = (p as u64).pow(cells_u as u32);
    let count_v = (p as u64).pow(cells_v as u32);

    let decode = |mut idx: u64, cells: usize| -> Vec<u8> {
        let mut out = vec![0u8; cells];
        for o in out.iter_mut() {
            *o = (idx % p as u64) as u8;
            idx /= p as u64;
        }
        out
    };

    let partial: Vec<u64> = exec::map_collect(count_u as usize, |ui| {
        let u = decode(ui as u64, cells_u);
        let mut best = u64::MAX;
        let mut v;
        for vi in 0..count_v {
            v = decode(vi, cells_v);
            let mut dist = 0u64;
            for i in 0..rows {
                for j in 0..cols {
                    let mut e = 0u8;
                    for t in 0..r {
                        e = add_mod(e, mul_mod(u[t * rows + i], v[t * cols + j], p), p);
                    }
                    let bad = match target {
                        RigidityTarget::Boolean { a, .. } => {
                            let b = if e == 1 { 1 } else { -1 };
                            b != a.get(i, j)
                        }
                        RigidityTarget::Regular(m) => e != m.get(i, j),
                    };
                    if bad {
                        dist += 1;
                    }
                }
            }
            best = best.min(dist);
        }
        best
    });
    Ok(partial.into_iter().min().unwrap_or(0))
}

/// min(#(+1), #(-1)): what the best constant matrix achieves.
pub fn trivial_rank1_bound(a: &SignMatrix) -> u64 {
    a.count_pos().min(a.count_neg())
}

/// Rank-1 Boolean upper-bound search: scan u in F_p^N up to scalar
/// equivalence (zero, then first nonzero coordinate normalized to 1); for
/// each column pick the scalar c minimizing the popcount distance between
/// the column and bool(c u). Always returns an upper bound; `exhaustive`
/// is set only when the whole scan completed within budget.
pub fn rank1_search(a: &SignMatrix, p: u64, budget: u128) -> Result<RigidityResult> {
    let p = check_modulus(p)?;
    let n = a.rows();
    if a.cols() != n || n == 0 {
        return Err(Error::InvalidParameter(
            "rank-1 search expects a square matrix".into(),
        ));
    }
    if n > 16 || p > 3 {
        return Err(Error::InvalidParameter(format!(
            "rank-1 search supports N <= 16 and p <= 3, got N = {n}, p = {p}"
        )));
    }
    let col_bits: Vec<u64> = a.packed_columns().into_iter().map(|w| w[0]).collect();
    let mask = (1u64 << n) - 1;

    // candidate count: zero vector, then each choice of the first nonzero
    // position f with free suffix digits
    let mut starts = vec![0u64; n + 1];
    let mut total = 1u64;
    for (f, slot) in starts.iter_mut().enumerate().take(n) {
        *slot = total;
        total += (p as u64).pow((n - 1 - f) as u32);
    }
    starts[n] = total;
    let per_u = (n as u64 * (p as u64 - 1) + n as u64 * p as u64) as u128;
    let scanned = if (total as u128) * per_u <= budget {
        total
    } else {
        ((budget / per_u) as u64).max(1)
    };
    let exhaustive = scanned == total;

    let decode_u = |idx: u64, out: &mut [u8]| {
        out.fill(0);
        if idx == 0 {
            return;
        }
        let f = (0..n).rfind(|&f| starts[f] <= idx).expect("index in range");
        out[f] = 1;
        let mut rem = idx - starts[f];
        for i in (f + 1..n).rev() {
            out[i] = (rem % p as u64) as u8;
            rem /= p as u64;
        }
    };

    const CHUNK: u64 = 1 << 14;
    let blocks = scanned.div_ceil(CHUNK);
    let locals = exec::map_collect(blocks as usize, |b| {
        let lo = b as u64 * CHUNK;
        let hi = (lo + CHUNK).min(scanned);
        let mut u = vec![0u8; n];
        let mut patterns = vec![0u64; p as usize];
        let mut local: Option<(u64, u64, Vec<u8>, Vec<u8>)> = None;
        for idx in lo..hi {
            decode_u(idx, &mut u);
            for (c, pat) in patterns.iter_mut().enumerate() {
                *pat = 0;
                for (i, &ui) in u.iter().enumerate() {
                    if mul_mod(c as u8, ui, p) != 1 {
                        *pat |= 1 << i;
                    }
                }
            }
            let mut value = 0u64;
            let mut choices = vec![0u8; n];
            for (j, &bits) in col_bits.iter().enumerate() {
                let mut best = u32::MAX;
                let mut best_c = 0u8;
                for (c, &pat) in patterns.iter().enumerate() {
                    let d = ((bits ^ pat) & mask).count_ones();
                    if d < best {
                        best = d;
                        best_c = c as u8;
                    }
                }
                value += best as u64;
                choices[j] = best_c;
            }
            if local
                .as_ref()
                .is_none_or(|(v, k, _, _)| (value, idx) < (*v, *k))
            {
                local = Some((value, idx, u.clone(), choices));
            }
        }
        local
    });

    let (value, _, u, choices) = locals
        .into_iter()
        .flatten()
        .min_by_key(|(v, k, _, _)| (*v, *k))
        .expect("at least the zero candidate");
    let u_mat = FpMatrix::from_entries(1, n, p as u64, u)?;
    let v_mat = FpMatrix::from_entries(1, n, p as u64, choices)?;
    let witness = LowRankFp::new(u_mat, v_mat)?;
    debug_assert_eq!(boolean_distance(a, &witness.materialize()).unwrap(), value);
    Ok(RigidityResult {
        value,
        witness,
        mode: RigidityMode::Boolean,
        rank: 1,
        p,
        exhaustive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{booleanize, fp_rank, hadamard_base, sign_to_fp, walsh_hadamard};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn h1_boolean_rank1_is_one() {
        let res = exact_boolean_rigidity(&hadamard_base(), 1, 3).unwrap();
        assert_eq!(res.value, 1);
        assert!(res.exhaustive);
        assert!(fp_rank(&res.witness.materialize()) <= 1);
    }

    #[test]
    fn full_rank_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = SignMatrix::random(3, 3, &mut rng);
        for p in [2u64, 3] {
            let res = exact_boolean_rigidity(&a, 3, p).unwrap();
            assert_eq!(res.value, 0, "r >= N can always take L = sign_to_fp(A)");
        }
    }

    #[test]
    fn rank0_counts_positive_entries() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let a = SignMatrix::random(4, 4, &mut rng);
            let res = exact_boolean_rigidity(&a, 0, 3).unwrap();
            assert_eq!(res.value, a.count_pos());
        }
    }

    #[test]
    fn regular_identity_one_change() {
        for n in [2usize, 3, 4] {
            let id = FpMatrix::identity(n, 3).unwrap();
            let res = exact_regular_rigidity(&id, n - 1).unwrap();
            assert_eq!(res.value, 1, "zeroing one diagonal entry drops the rank");
        }
        let low = FpMatrix::from_fn(3, 3, 3, |_, j| j as u8).unwrap();
        let res = exact_regular_rigidity(&low, fp_rank(&low)).unwrap();
        assert_eq!(res.value, 0);
    }

    #[test]
    fn oracle_matches_exact_on_all_2x2() {
        for bits in 0..16u32 {
            let a = SignMatrix::from_fn(
                2,
                2,
                |i, j| {
                    if bits >> (2 * i + j) & 1 == 1 {
                        -1
                    } else {
                        1
                    }
                },
            );
            for p in [2u64, 3] {
                let exact = exact_boolean_rigidity(&a, 1, p).unwrap().value;
                let oracle = bruteforce_oracle(
                    &RigidityTarget::Boolean { a: &a, p },
                    1,
                    DEFAULT_WORK_BUDGET,
                )
                .unwrap();
                assert_eq!(exact, oracle, "bits = {bits:04b}, p = {p}");

                let m = sign_to_fp(&a, p).unwrap();
                let exact = exact_regular_rigidity(&m, 1).unwrap().value;
                let oracle =
                    bruteforce_oracle(&RigidityTarget::Regular(&m), 1, DEFAULT_WORK_BUDGET)
                        .unwrap();
                assert_eq!(exact, oracle, "regular, bits = {bits:04b}, p = {p}");
            }
        }
    }

    #[test]
    fn oracle_matches_exact_on_random_3x3() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let m = FpMatrix::random(3, 3, 2, &mut rng).unwrap();
            let exact = exact_regular_rigidity(&m, 1).unwrap().value;
            let oracle =
                bruteforce_oracle(&RigidityTarget::Regular(&m), 1, DEFAULT_WORK_BUDGET).unwrap();
            assert_eq!(exact, oracle);
        }
    }

    #[test]
    fn trivial_bound_examples() {
        assert_eq!(trivial_rank1_bound(&hadamard_base()), 1);
        let balanced = SignMatrix::from_fn(2, 2, |i, _| if i == 0 { 1 } else { -1 });
        assert_eq!(trivial_rank1_bound(&balanced), 2);
        let h3 = walsh_hadamard(3).unwrap();
        assert_eq!(trivial_rank1_bound(&h3), 28, "(64 - 8) / 2");
    }

    #[test]
    fn rank1_search_matches_exact_on_2x2() {
        for bits in 0..16u32 {
            let a = SignMatrix::from_fn(
                2,
                2,
                |i, j| {
                    if bits >> (2 * i + j) & 1 == 1 {
                        -1
                    } else {
                        1
                    }
                },
            );
            for p in [2u64, 3] {
                let fast = rank1_search(&a, p, DEFAULT_WORK_BUDGET).unwrap();
                let exact = exact_boolean_rigidity(&a, 1, p).unwrap();
                assert!(fast.exhaustive);
                assert_eq!(fast.value, exact.value, "bits = {bits:04b}, p = {p}");
            }
        }
    }

    #[test]
    fn rank1_search_below_trivial_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..5 {
            let a = SignMatrix::random(6, 6, &mut rng);
            let res = rank1_search(&a, 3, DEFAULT_WORK_BUDGET).unwrap();
            assert!(res.value <= trivial_rank1_bound(&a));
        }
    }

    #[test]
    fn rank1_search_budget_truncation() {
        let a = walsh_hadamard(3).unwrap();
        let res = rank1_search(&a, 3, 2_000).unwrap();
        assert!(!res.exhaustive);
        let full = rank1_search(&a, 3, DEFAULT_WORK_BUDGET).unwrap();
        assert!(full.exhaustive);
        assert!(full.value <= res.value);
    }

    #[test]
    fn monotone_in_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let a = SignMatrix::random(4, 4, &mut rng);
        let mut prev = u64::MAX;
        for r in 0..=4 {
            let v = exact_boolean_rigidity(&a, r, 3).unwrap().value;
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn boolean_below_regular() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let a = SignMatrix::random(3, 3, &mut rng);
            for p in [3u64, 5] {
                let b = exact_boolean_rigidity(&a, 1, p).unwrap().value;
                let reg = exact_regular_rigidity(&sign_to_fp(&a, p).unwrap(), 1)
                    .unwrap()
                    .value;
                assert!(b <= reg);
            }
        }
    }

    #[test]
    fn deterministic_witness() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let a = SignMatrix::random(4, 4, &mut rng);
        let r1 = exact_boolean_rigidity(&a, 1, 3).unwrap();
        let r2 = exact_boolean_rigidity(&a, 1, 3).unwrap();
        assert_eq!(r1.witness, r2.witness);
        assert_eq!(
            boolean_distance(&a, &r1.witness.materialize()).unwrap(),
            r1.value,
            "witness distance reproduces the value"
        );
        let _ = booleanize(&r1.witness.materialize());
    }

    #[test]
    fn budget_error_names_budget() {
        let a = walsh_hadamard(4).unwrap();
        let err = exact_boolean_rigidity_with_budget(&a, 3, 3, 1000).unwrap_err();
        match err {
            Error::BudgetExceeded { budget, .. } => assert_eq!(budget, 1000),
            other => panic!("expected budget error, got {other:?}"),
        }
    }
}
