//! Scalar formula evaluators: circuit-size exponents from rigidity values,
//! the depth-2 obstruction inequality, and the two parameter schedules
//! that translate small-rank lower bounds into mid-rank targets.

use anyhow::{bail, Result};

/// Exponent of the depth-d synchronous circuit built from a rank-r
/// rigidity value R for a q x q base: 1 + c/d with
/// c = log_q((r + 1)(r + R/q)).
pub fn circuit_exponent(q: f64, r: f64, rigidity: f64, depth: f64) -> Result<f64> {
    if q < 2.0 {
        bail!("base side q must be at least 2, got {q}");
    }
    if depth < 1.0 {
        bail!("depth must be at least 1, got {depth}");
    }
    if rigidity < 0.0 || r < 0.0 {
        bail!("rank and rigidity must be nonnegative");
    }
    let inner = (r + 1.0) * (r + rigidity / q);
    if inner <= 0.0 {
        bail!("degenerate parameters: (r + 1)(r + R/q) = {inner} has no logarithm");
    }
    let c = inner.ln() / q.ln();
    Ok(1.0 + c / depth)
}

/// True when (r + 1)(r + R_lb / 2^k) >= 2^k, i.e. the rigidity lower bound
/// R_lb rules out a sub-baseline depth-2 construction from 2^k x 2^k
/// bases at rank r. Only meaningful for r > 1.
pub fn obstruction_check(k: u32, r: u64, rigidity_lb: f64) -> Result<bool> {
    if r <= 1 {
        bail!("obstruction argument needs rank r > 1, got {r}");
    }
    if rigidity_lb < 0.0 {
        bail!("rigidity lower bound must be nonnegative");
    }
    let qk = 2f64.powi(k as i32);
    Ok((r as f64 + 1.0) * (r as f64 + rigidity_lb / qk) >= qk)
}

/// Parameter schedule for the Kronecker amplification route.
#[derive(Debug, Clone, Copy)]
pub struct KronSchedule {
    pub k: u64,
    /// Target rank n^(1 + eps).
    pub rank: f64,
    /// Required error bound 1/2 - gap.
    pub rhs: f64,
    /// The gap term (1/2) 12^(-n/k), kept separately since it vanishes in
    /// the subtraction long before it underflows f64 (and such a gap is
    /// the whole point of the schedule).
    pub gap: f64,
    /// log2 of the gap term, exact in f64 at any n.
    pub gap_log2: f64,
}

/// k = 2^((eps log2 n / 2)^(1/c)), rounded to the nearest integer >= 2;
/// rank = n^(1+eps); rhs = 1/2 - (1/2) 12^(-n/k).
pub fn razborov_schedule_kron(n: f64, eps: f64, c: f64) -> Result<KronSchedule> {
    if n < 4.0 {
        bail!("schedule needs n >= 4, got {n}");
    }
    if eps <= 0.0 || c <= 0.0 {
        bail!("need eps > 0 and c > 0");
    }
    let exponent = (eps * n.log2() / 2.0).powf(1.0 / c);
    let k = 2f64.powf(exponent).round().max(2.0);
    let gap_log2 = -(n / k) * 12f64.log2() - 1.0;
    let gap = 0.5 * 12f64.powf(-n / k);
    Ok(KronSchedule {
        k: k as u64,
        rank: n.powf(1.0 + eps),
        rhs: 0.5 - gap,
        gap,
        gap_log2,
    })
}

/// Parameter schedule for the Majority amplification route.
#[derive(Debug, Clone, Copy)]
pub struct MajSchedule {
    pub k: u64,
    /// Target rank beta log2 n.
    pub rank: f64,
    /// Required error bound 1/2 - gap.
    pub rhs: f64,
    /// The gap term sqrt(k/n).
    pub gap: f64,
}

/// k = 2^((log2 log2 n + log2 beta)^(1/c)); rank = beta log2 n;
/// rhs = 1/2 - sqrt(k/n).
pub fn razborov_schedule_maj(n: f64, beta: f64, c: f64) -> Result<MajSchedule> {
    if n < 4.0 || beta <= 0.0 || c <= 0.0 {
        bail!("need n >= 4, beta > 0, c > 0");
    }
    let inner = n.log2().log2() + beta.log2();
    if inner <= 0.0 {
        bail!("need log2 log2 n + log2 beta > 0, got {inner}");
    }
    let k = 2f64.powf(inner.powf(1.0 / c)).round().max(1.0);
    let gap = (k / n).sqrt();
    Ok(MajSchedule {
        k: k as u64,
        rank: beta * n.log2(),
        rhs: 0.5 - gap,
        gap,
    })
}
