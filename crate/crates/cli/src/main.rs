use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num::{BigRational, ToPrimitive, Zero};

use matrig_cli::experiment::{emit, fmt_f64, OutputFormat, RunMeta, Table};
use matrig_cli::formulas;
use matrig_cli::inputs::{as_sign, parse_rational, resolve_matrix};
use matrig_core::amplify::{
    best_seed_search, boolean_error_rate, build_kron_approximant, build_prefix_approximant,
    entry_imbalance, kron_error_expected, kron_theorem_bound, maj_amplified_error, maj_error_exact,
    CountOptions, Ensemble, EnsembleMember, SeedSearchMode,
};
use matrig_core::io::MatrixData;
use matrig_core::lift::{
    boolean_lift_rank_bound, booleanize_lowrank_fp, lift_constants, lift_to_c,
};
use matrig_core::matrix::{
    distance_matrix, fp_rank, maj_power, sign_to_fp, walsh_hadamard, FpMatrix, LowRankFp,
    SignMatrix,
};
use matrig_core::rigidity::{
    exact_boolean_rigidity_with_budget, exact_regular_rigidity_with_budget, rank1_search,
    trivial_rank1_bound, RigidityMode, DEFAULT_WORK_BUDGET,
};
use matrig_core::spectral::{
    distance_eigenvalues, hamming_sigma_report, kron_lb_constants, largest_singular_value,
    thm1_bound,
};

#[derive(Parser)]
#[command(
    name = "matrig",
    version,
    about = "matrix approximation experiments over F_p"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Boolean,
    Regular,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Exact,
    Oracle,
    Rank1,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Hadamard,
    Distance,
    RandomSign,
    RandomFp,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleKind {
    Kron,
    Maj,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a named matrix and write it in the matrix text format.
    Gen {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Power for hadamard/distance families.
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        rows: usize,
        #[arg(long, default_value_t = 4)]
        cols: usize,
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank of a matrix over F_p.
    Rank {
        #[arg(long = "in")]
        input: String,
        /// Modulus for embedding sign inputs.
        #[arg(long)]
        p: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact rigidity (or a rank-1 upper bound) of a matrix.
    Rigidity {
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, value_enum, default_value = "boolean")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "exact")]
        solver: SolverArg,
        #[arg(long, default_value_t = DEFAULT_WORK_BUDGET)]
        budget: u128,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Lift a matrix's rank factorization to a bounded-entry complex
    /// decomposition and certify it.
    Lift {
        #[arg(long = "in")]
        input: String,
        /// Modulus for embedding sign inputs.
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Singular-value rigidity lower bound for a sign matrix.
    SpectralBound {
        #[arg(long = "in")]
        input: String,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact spectrum of the distance matrix by weight class.
    Eigs {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Kronecker amplification: best-seed degree-1 approximation of the
    /// n-th power of a base matrix.
    AmplifyKron {
        #[arg(long)]
        base: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        p: u64,
        /// Scan all p^n seeds (errors when too many); otherwise samples.
        #[arg(long, default_value_t = false)]
        exhaustive: bool,
        #[arg(long, default_value_t = 64)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Majority amplification: prefix construction against the n-th
    /// Majority power.
    AmplifyMaj {
        #[arg(long)]
        base: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        p: u64,
        /// Per-entry Boolean flip-noise rate on the prefix base (exact
        /// rational: `1/8`, `0.125`, `0`).
        #[arg(long, default_value = "0")]
        delta: String,
        /// Flip-noise ensemble size when delta > 0.
        #[arg(long, default_value_t = 64)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Depth-d synchronous circuit-size exponent from a rigidity value.
    CircuitSize {
        #[arg(long, default_value_t = 16)]
        q: u64,
        #[arg(long, default_value_t = 1)]
        rank: u64,
        #[arg(long)]
        rig: f64,
        #[arg(long, default_value_t = 2)]
        depth: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Depth-2 obstruction inequality from a rigidity lower bound.
    Obstruction {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        rank: u64,
        #[arg(long)]
        rig_lb: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Parameter schedules mapping small-rank bounds to mid-rank targets.
    Schedule {
        #[arg(long, value_enum)]
        kind: ScheduleKind,
        #[arg(long)]
        n: f64,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        growth_c: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn rational_str(r: &BigRational) -> String {
    r.to_string()
}

fn f64_of(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen {
            family,
            n,
            rows,
            cols,
            p,
            seed,
            out,
        } => {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let data = match family {
                FamilyArg::Hadamard => MatrixData::Sign(walsh_hadamard(n)?),
                FamilyArg::Distance => MatrixData::Sign(distance_matrix(n)?),
                FamilyArg::RandomSign => MatrixData::Sign(SignMatrix::random(rows, cols, &mut rng)),
                FamilyArg::RandomFp => MatrixData::Fp(FpMatrix::random(rows, cols, p, &mut rng)?),
            };
            let text = matrig_core::io::format_matrix(&data);
            match out {
                Some(path) => std::fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Rank { input, p, output } => {
            let data = resolve_matrix(&input)?;
            let (kind, m) = match data {
                MatrixData::Fp(m) => ("fp", m),
                MatrixData::Sign(s) => {
                    let p = p.ok_or_else(|| anyhow!("sign input needs --p to embed into F_p"))?;
                    ("sign", sign_to_fp(&s, p)?)
                }
            };
            let mut table = Table::new(&["input", "kind", "p", "rows", "cols", "rank"]);
            table.push(vec![
                input.clone(),
                kind.into(),
                m.modulus().to_string(),
                m.rows().to_string(),
                m.cols().to_string(),
                fp_rank(&m).to_string(),
            ]);
            let meta = RunMeta::new(
                match p {
                    Some(p) => format!("rank --in {input} --p {p}"),
                    None => format!("rank --in {input}"),
                },
                0,
            );
            emit(output.out.as_deref(), output.format, &meta, &table)
        }
        Command::Rigidity {
            input,
            rank,
            p,
            mode,
            solver,
            budget,
            output,
        } => {
            let data = resolve_matrix(&input)?;
            let mut table = Table::new(&[
                "input",
                "mode",
                "solver",
                "p",
                "rank",
                "value",
                "exhaustive",
                "witness_rank",
                "trivial_rank1_bound",
            ]);
            let (mode_name, solver_name, result, trivial) = match (mode, solver) {
                (ModeArg::Boolean, SolverArg::Exact) => {
                    let a = as_sign(data);
                    let res = exact_boolean_rigidity_with_budget(&a, rank, p, budget)?;
                    ("boolean", "exact", res, trivial_rank1_bound(&a))
                }
                (ModeArg::Boolean, SolverArg::Rank1) => {
                    let a = as_sign(data);
                    let res = rank1_search(&a, p, budget)?;
                    ("boolean", "rank1", res, trivial_rank1_bound(&a))
                }
                (ModeArg::Regular, SolverArg::Exact) => {
                    let m = match data {
                        MatrixData::Fp(m) => m,
                        MatrixData::Sign(s) => sign_to_fp(&s, p)?,
                    };
                    let res = exact_regular_rigidity_with_budget(&m, rank, budget)?;
                    ("regular", "exact", res, 0)
                }
                (ModeArg::Boolean, SolverArg::Oracle) => {
                    let a = as_sign(data);
                    let value = matrig_core::rigidity::bruteforce_oracle(
                        &matrig_core::rigidity::RigidityTarget::Boolean { a: &a, p },
                        rank,
                        budget,
                    )?;
                    let trivial = trivial_rank1_bound(&a);
                    table.push(vec![
                        input.clone(),
                        "boolean".into(),
                        "oracle".into(),
                        p.to_string(),
                        rank.to_string(),
                        value.to_string(),
                        "true".into(),
                        String::new(),
                        trivial.to_string(),
                    ]);
                    let meta = RunMeta::new(
                        format!("rigidity --in {input} --rank {rank} --p {p} --mode boolean --solver oracle --budget {budget}"),
                        0,
                    );
                    return emit(output.out.as_deref(), output.format, &meta, &table);
                }
                (ModeArg::Regular, SolverArg::Oracle) => {
                    let m = match data {
                        MatrixData::Fp(m) => m,
                        MatrixData::Sign(s) => sign_to_fp(&s, p)?,
                    };
                    let value = matrig_core::rigidity::bruteforce_oracle(
                        &matrig_core::rigidity::RigidityTarget::Regular(&m),
                        rank,
                        budget,
                    )?;
                    table.push(vec![
                        input.clone(),
                        "regular".into(),
                        "oracle".into(),
                        m.modulus().to_string(),
                        rank.to_string(),
                        value.to_string(),
                        "true".into(),
                        String::new(),
                        String::new(),
                    ]);
                    let meta = RunMeta::new(
                        format!("rigidity --in {input} --rank {rank} --p {p} --mode regular --solver oracle --budget {budget}"),
                        0,
                    );
                    return emit(output.out.as_deref(), output.format, &meta, &table);
                }
                (ModeArg::Regular, SolverArg::Rank1) => {
                    bail!("rank1 solver works on the boolean mode only")
                }
            };
            let witness_rank = fp_rank(&result.witness.materialize());
            table.push(vec![
                input.clone(),
                mode_name.into(),
                solver_name.into(),
                result.p.to_string(),
                result.rank.to_string(),
                result.value.to_string(),
                result.exhaustive.to_string(),
                witness_rank.to_string(),
                if matches!(result.mode, RigidityMode::Boolean) {
                    trivial.to_string()
                } else {
                    String::new()
                },
            ]);
            let meta = RunMeta::new(
                format!(
                    "rigidity --in {input} --rank {rank} --p {p} --mode {mode_name} --solver {solver_name} --budget {budget}"
                ),
                0,
            )
            .flag("exhaustive", result.exhaustive);
            emit(output.out.as_deref(), output.format, &meta, &table)
        }
        Command::Lift { input, p, output } => {
            let data = resolve_matrix(&input)?;
            let m = match data {
                MatrixData::Fp(m) => m,
                MatrixData::Sign(s) => sign_to_fp(&s, p)?,
            };
            let low = LowRankFp::factor(&m);
            let lifted = lift_to_c(&low)?;
            let constants = lift_constants(m.modulus() as u64)?;
            let exact = lifted.verify_booleanization();
            let max_mag = lifted.max_entry_magnitude();
            let r = low.inner_dim();
            let (bool_rank, bool_bound) = if m.modulus() >= 3 {
                let b = booleanize_lowrank_fp(&low)?;
                (
                    fp_rank(&b.materialize()).to_string(),
                    boolean_lift_rank_bound(r, m.modulus()).to_string(),
                )
            } else {
                (String::new(), String::new())
            };
            let mut table = Table::new(&[
                "input",
                "p",
                "r",
                "rtilde",
                "c_f",
                "c_g",
                "entry_base",
                "max_entry_magnitude",
                "entry_bound",
                "exact",
                "bool_lift_rank",
                "bool_lift_rank_bound",
            ]);
            table.push(vec![
                input.clone(),
                m.modulus().to_string(),
                r.to_string(),
                lifted.rtilde().to_string(),
                fmt_f64(constants.c_f),
                fmt_f64(constants.c_g),
                fmt_f64(constants.entry_base),
                fmt_f64(max_mag),
                fmt_f64(constants.entry_base.powi(r as i32)),
                exact.to_string(),
                bool_rank,
                bool_bound,
            ]);
            let meta = RunMeta::new(format!("lift --in {input} --p {p}"), 0);
            emit(output.out.as_deref(), output.format, &meta, &table)
        }
        Command::SpectralBound {
            input,
            rank,
            p,
            output,
        } => {
            let a = as_sign(resolve_matrix(&input)?);
            let report = thm1_bound(&a, rank, p)?;
            let sigma = largest_singular_value(&a);
            let (c1, c2) = match kron_lb_constants(&a, p) {
                Ok((c1, c2)) => (fmt_f64(c1), fmt_f64(c2)),
                Err(_) => (String::new(), String::new()),
            };
            let mut table = Table::new(&[
                "input",
                "p",
                "rank",
                "sigma1",
                "iterations",
                "residual",
                "entry_base",
                "rtilde",
                "bound",
                "positive",
                "c1",
                "c2",
            ]);
            table.push(vec![
                input.clone(),
                report.p.to_string(),
                report.r.to_string(),
                fmt_f64(report.sigma1),
                sigma.iterations.to_string(),
                fmt_f64(sigma.residual),
                fmt_f64(report.c),
                fmt_f64(report.rtilde),
                fmt_f64(report.bound),
                report.positive.to_string(),
                c1,
                c2,
            ]);
            let meta = RunMeta::new(
                format!("spectral-bound --in {input} --rank {rank} --p {p}"),
                0,
            );
            emit(output.out.as_deref(), output.format, &meta, &table)
        }
        Command::Eigs { n, output } => {
            let classes = distance_eigenvalues(n)?;
            let sigma = hamming_sigma_report(n)?;
            let mut table = Table::new(&["weight", "lambda", "multiplicity"]);
            for c in &classes {
                table.push(vec![
                    c.weight.to_string(),
                    c.lambda.to_string(),
                    c.multiplicity.to_string(),
                ]);
            }
            let meta = RunMeta::new(format!("eigs --n {n}"), 0).flag("sigma1", sigma.sigma1);
            emit(output.out.as_deref(), output.format, &meta, &table)
        }
        Command::AmplifyKron {
            base,
            n,
            p,
            exhaustive,
            samples,
            seed,
            output,
        } => {
            let a = as_sign(resolve_matrix(&base)?);
            let low = LowRankFp::factor(&sign_to_fp(&a, p)?);
            let alpha = entry_imbalance(&a);
            let delta = boolean_error_rate(&a, &low.materialize())?;
            let bound = kron_theorem_bound(&alpha, &delta, n)?;
            let pos = BigRational::new(a.count_pos().into(), ((a.rows() * a.cols()) as u64).into());
            let expected = kron_error_expected(
                p,
                &pos,
                &(BigRational::from_integer(1.into()) - &pos),
                &BigRational::zero(),
                &BigRational::zero(),
                n,
            )?;
            let opts = CountOptions {
                rng_seed: seed,
                ..CountOptions::default()
            };
            let mode = if exhaustive {
                SeedSearchMode::Exhaustive
            } else {
                SeedSearchMode::Sampled {
                    count: samples,
                    rng_seed: seed,
                }
            };
            let (best_seed, count) = best_seed_search(&a, &low, n, mode, &opts)?;
            let approx = build_kron_approximant(&low, &best_seed, n)?;
            let rank_measured = approx
                .materialize()
                .map(|m| fp_rank(&m).to_string())
                .unwrap_or_default();
            let measured = count.fraction();
            let diff = &measured - &bound;
            let mut table = Table::new(&[
                "base",
                "q",
                "n",
                "p",
                "alpha",
                "delta",
                "best_seed",
                "measured_error",
                "expected_error",
                "theorem_bound",
                "measured_minus_bound",
                "rank_bound",
                "rank_measured",
                "pairs_exhaustive",
                "seeds_exhaustive",
            ]);
            table.push(vec![
                base.clone(),
                a.rows().to_string(),
                n.to_string(),
                p.to_string(),
                rational_str(&alpha),
                rational_str(&delta),
                best_seed
                    .iter()
                    .map(u8::to_string)
                    .collect::<Vec<_>>()
                    .join("-"),
                rational_str(&measured),
                rational_str(&expected),
                rational_str(&bound),
                rational_str(&diff),
                approx.rank_bound().to_string(),
                rank_measured,
                count.exhaustive.to_string(),
                exhaustive.to_string(),
            ]);
            let meta = RunMeta::new(
                format!(
                    "amplify-kron --base {base} --n {n} --p {p} --exhaustive {exhaustive} --samples {samples} --seed {seed}"
                ),
                seed,
            )
            .flag("pairs_exhaustive", count.exhaustive)
            .flag("seeds_exhaustive", exhaustive)
            .flag("samples", samples);
            emit(output.out.as_deref(), output.format, &meta, &table)
        }
        Command::AmplifyMaj {
            base,
            k,
            n,
            p,
            delta,
            samples,
            seed,
            output,
        } => {
            let a = as_sign(resolve_matrix(&base)?);
            if a.count_pos() != a.count_neg() {
                bail!("majority amplification needs a base with exactly half its entries +1");
            }
            let delta = parse_rational(&delta)?;
            let predicted = maj_amplified_error(k, n, &delta)?;
            let agreement = matrig_core::amplify::majority_agreement_prob(k, n)?;
            let prefix_base = sign_to_fp(&maj_power(&a, k)?, p)?;
            let opts = CountOptions {
                rng_seed: seed,
                ..CountOptions::default()
            };
            let (measured, exhaustive_flag) = if delta.is_zero() {
                let approx = build_prefix_approximant(&prefix_base, k, n)?;
                let count = maj_error_exact(&a, &approx, &opts)?;
                (count.fraction(), count.exhaustive)
            } else {
                let rate = f64_of(&delta);
                let ensemble = Ensemble::flip_noise(&prefix_base, rate, samples as usize, seed)?;
                let mut total = BigRational::zero();
                let mut all_exhaustive = true;
                for (w, member) in ensemble.members() {
                    let m = match member {
                        EnsembleMember::Dense(m) => m.clone(),
                        EnsembleMember::LowRank(l) => l.materialize(),
                    };
                    let approx = build_prefix_approximant(&m, k, n)?;
                    let count = maj_error_exact(&a, &approx, &opts)?;
                    all_exhaustive &= count.exhaustive;
                    total += w * count.fraction();
                }
                (total, all_exhaustive)
            };
            let diff = &measured - &predicted;
            let mut table = Table::new(&[
                "base",
                "q",
                "k",
                "n",
                "p",
                "delta",
                "agreement_prob",
                "predicted_error",
                "measured_error",
                "measured_minus_predicted",
                "exhaustive",
                "members",
            ]);
            table.push(vec![
                base.clone(),
                a.rows().to_string(),
                k.to_string(),
                n.to_string(),
                p.to_string(),
                rational_str(&delta),
                rational_str(&agreement),
                rational_str(&predicted),
                rational_str(&measured),
                rational_str(&diff),
                exhaustive_flag.to_string(),
                if delta.is_zero() {
                    "1".into()
                } else {
                    samples.to_string()
                },
            ]);
            let meta = RunMeta::new(
                format!(
                    "amplify-maj --base {base} --k {k} --n {n} --p {p} --delta {delta} --samples {samples} --seed {seed}"
                ),
                seed,
            )
            .flag("exhaustive", exhaustive_flag);
            emit(output.out.as_deref(), output.format, &meta, &table)
        }
        Command::CircuitSize {
            q,
            rank,
            rig,
            depth,
            output,
        } => {
            let exponent = formulas::circuit_exponent(q as f64, rank as f64, rig, depth as f64)?;
            let c = (exponent - 1.0) * depth as f64;
            let mut table = Table::new(&["q", "rank", "rigidity", "depth", "c", "exponent"]);
            table.push(vec![
                q.to_string(),
                rank.to_string(),
                rig.to_string(),
                depth.to_string(),
                fmt_f64(c),
                fmt_f64(exponent),
            ]);
            let meta = RunMeta::new(
                format!("circuit-size --q {q} --rank {rank} --rig {rig} --depth {depth}"),
                0,
            );
            emit(output.out.as_deref(), output.format, &meta, &table)
        }
        Command::Obstruction {
            k,
            rank,
            rig_lb,
            output,
        } => {
            let satisfied = formulas::obstruction_check(k, rank, rig_lb)?;
            let mut table = Table::new(&["k", "rank", "rigidity_lb", "satisfied"]);
            table.push(vec![
                k.to_string(),
                rank.to_string(),
                rig_lb.to_string(),
                satisfied.to_string(),
            ]);
            let meta = RunMeta::new(
                format!("obstruction --k {k} --rank {rank} --rig-lb {rig_lb}"),
                0,
            );
            emit(output.out.as_deref(), output.format, &meta, &table)
        }
        Command::Schedule {
            kind,
            n,
            eps,
            beta,
            growth_c,
            output,
        } => {
            let mut table = Table::new(&[
                "kind",
                "n",
                "eps_or_beta",
                "growth_c",
                "k",
                "rank",
                "rhs",
                "gap",
                "gap_log2",
            ]);
            match kind {
                ScheduleKind::Kron => {
                    let s = formulas::razborov_schedule_kron(n, eps, growth_c)?;
                    table.push(vec![
                        "kron".into(),
                        n.to_string(),
                        eps.to_string(),
                        growth_c.to_string(),
                        s.k.to_string(),
                        fmt_f64(s.rank),
                        fmt_f64(s.rhs),
                        fmt_f64(s.gap),
                        fmt_f64(s.gap_log2),
                    ]);
                }
                ScheduleKind::Maj => {
                    let s = formulas::razborov_schedule_maj(n, beta, growth_c)?;
                    table.push(vec![
                        "maj".into(),
                        n.to_string(),
                        beta.to_string(),
                        growth_c.to_string(),
                        s.k.to_string(),
                        fmt_f64(s.rank),
                        fmt_f64(s.rhs),
                        fmt_f64(s.gap),
                        fmt_f64(s.gap.log2()),
                    ]);
                }
            }
            let meta = RunMeta::new(
                format!(
                    "schedule --kind {} --n {n} --eps {eps} --beta {beta} --growth-c {growth_c}",
                    match kind {
                        ScheduleKind::Kron => "kron",
                        ScheduleKind::Maj => "maj",
                    }
                ),
                0,
            );
            emit(output.out.as_deref(), output.format, &meta, &table)
        }
    }
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    if let Some(core) = err.downcast_ref::<matrig_core::Error>() {
        return match core {
            matrig_core::Error::CapExceeded { .. } | matrig_core::Error::BudgetExceeded { .. } => 3,
            matrig_core::Error::InvalidParameter(_)
            | matrig_core::Error::InvalidModulus(_)
            | matrig_core::Error::DegenerateModulus
            | matrig_core::Error::RankOne
            | matrig_core::Error::NoFeasibleExponent { .. } => 2,
            _ => 1,
        };
    }
    if err.downcast_ref::<std::io::Error>().is_some() {
        1
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
