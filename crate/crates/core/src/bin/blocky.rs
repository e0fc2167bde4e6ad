use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use blocky::factorize::{gamma2_bracket, verify_factorization, Gamma2Options, LowerWitness};
use blocky::format::{
    decomposition_to_json, factorization_to_json, matrix_to_text, parse_decomposition, parse_factorization,
    read_matrix, read_text, MatrixData, MatrixJson,
};
use blocky::generate::{generate, GeneratorSpec};
use blocky::littlestone::{ldim_alpha_witness, ldim_witness, DEFAULT_BUDGET};
use blocky::partition::{greedy_partition_on, DELTA_GRID};
use blocky::pipeline::{decompose, exact_block_complexity, DecomposeConfig, OracleResult};
use blocky::suite::{run_suite, RunConfig};
use blocky::Error;

#[derive(Parser)]
#[command(name = "blocky", version, about = "Signed blocky decompositions of integer matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    RandomBoolean,
    RandomBlockySum,
    ConvolutionCyclic,
    Identity,
    AllOnes,
}

#[derive(Subcommand)]
enum Command {
    /// Bracket the factorization norm between a lower bound and a certified factorization.
    Gamma2 {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 400)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Write the factorization here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Littlestone dimension of a sign matrix.
    Ldim {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Also print a shattered tree.
        #[arg(long)]
        witness: bool,
    },
    /// Weighted Littlestone dimension at margin alpha.
    LdimAlpha {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        witness: bool,
    },
    /// Greedy column partition with its density table.
    Partition {
        #[arg(long)]
        input: PathBuf,
        /// Fail unless every density count is within its bound.
        #[arg(long)]
        check_bound: bool,
    },
    /// Decompose an integer matrix into a signed blocky sum.
    Decompose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        factorization: Option<PathBuf>,
        /// Refuse certificates whose gamma exceeds this value.
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Proceed with a factorization that fails verification.
        #[arg(long)]
        force: bool,
        /// Decomposition output; printed when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check a decomposition (and optionally a factorization) against a matrix.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        decomp: Option<PathBuf>,
        #[arg(long)]
        factorization: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Exact block complexity of a tiny matrix.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_l: usize,
        /// Write the witness decomposition here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a matrix.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        cols: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 1)]
        terms: usize,
        /// Support of f for convolution matrices, e.g. `0,2`.
        #[arg(long, value_delimiter = ',')]
        support: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        /// Matrix output; printed when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Certificate output for blocky sums.
        #[arg(long)]
        factorization: Option<PathBuf>,
        /// Decomposition output for blocky sums.
        #[arg(long)]
        decomp: Option<PathBuf>,
    },
    /// Run the reproduction suite.
    Suite {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 4)]
        oracle_depth: usize,
        /// Criteria to run, e.g. `1,7,9`; all when absent.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<usize>>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn write_file(path: impl AsRef<Path>, text: impl AsRef<[u8]>) -> Result<(), Error> {
    let path = path.as_ref();
    std::fs::write(path, text).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn required(name: &str, v: Option<usize>) -> Result<usize, Error> {
    v.ok_or_else(|| Error::Input(format!("--{name} is required for this kind")))
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Gamma2 {
            input,
            restarts,
            max_iter,
            tol,
            seed,
            budget,
            out,
        } => {
            let a = read_matrix(input)?.to_real();
            let opts = Gamma2Options {
                restarts,
                max_iter,
                tol,
                seed,
            };
            let b = gamma2_bracket(&a, &opts, budget)?;
            let witness = match b.lower_witness {
                LowerWitness::MaxEntry => "max-entry".to_string(),
                LowerWitness::SqrtLittlestone { ldim } => format!("sqrt-littlestone (Ldim = {ldim})"),
                LowerWitness::WeightedLittlestone { alpha, ldim } => {
                    format!("weighted-littlestone (alpha = {alpha}, Ldim = {ldim})")
                }
            };
            println!("lower {} {witness}", b.lower);
            println!("upper {}", b.upper);
            println!("residual {:e}", b.upper_witness.residual);
            println!("inner-dimension {}", b.upper_witness.inner_dim());
            println!("certifying {}", b.upper_witness.certifying);
            if let Some(p) = out {
                write_file(p, factorization_to_json(&b.upper_witness))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Ldim { input, budget, witness } => {
            let a = read_matrix(input)?.to_int()?;
            let tree = ldim_witness(&a, budget)?;
            println!("{}", tree.depth);
            if witness {
                println!("{}", serde_json::to_string_pretty(&tree)?);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::LdimAlpha {
            input,
            alpha,
            budget,
            witness,
        } => {
            let a = read_matrix(input)?.to_real();
            let tree = ldim_alpha_witness(&a, alpha, budget)?;
            println!("{}", tree.depth);
            if witness {
                println!("{}", serde_json::to_string_pretty(&tree)?);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Partition { input, check_bound } => {
            let a = read_matrix(input)?.to_int()?;
            let (nonzero, zero): (Vec<usize>, Vec<usize>) = (0..a.cols()).partition(|&y| !a.is_zero_column(y));
            if !zero.is_empty() {
                let z: Vec<String> = zero.iter().map(usize::to_string).collect();
                println!("# skipped all-zero columns {}", z.join(","));
            }
            let p = greedy_partition_on(&a, &nonzero)?;
            println!("# class row value size members");
            for (i, c) in p.classes.iter().enumerate() {
                let members: Vec<String> = c.columns.iter().map(usize::to_string).collect();
                println!("{i} {} {} {} {}", c.row, c.value, c.columns.len(), members.join(","));
            }
            println!("# row value delta dense-classes limit");
            for r in p.density_table(&a, &DELTA_GRID) {
                println!("{} {} {} {} {:.6}", r.row, r.value, r.delta, r.count, r.limit);
            }
            if check_bound {
                if let Some(v) = p.check_density_bound(&a, &DELTA_GRID) {
                    eprintln!(
                        "bound violated: row {} value {} has {} classes of density >= {} (limit {})",
                        v.row, v.value, v.count, v.delta, v.limit
                    );
                    return Ok(ExitCode::FAILURE);
                }
                println!("# bound holds; max density sum {:.6} <= {:.6}", p.max_harmonic_sum(&a), p.harmonic_bound());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Decompose {
            input,
            factorization,
            gamma,
            tol,
            seed,
            restarts,
            budget,
            force,
            out,
            report,
        } => {
            let a = read_matrix(input)?.to_int()?;
            let f = match factorization {
                Some(p) => Some(parse_factorization(&read_text(p)?, a.cols())?),
                None => None,
            };
            let config = DecomposeConfig {
                gamma2: Gamma2Options {
                    restarts,
                    tol,
                    seed,
                    ..Gamma2Options::default()
                },
                tol,
                budget,
                force,
            };
            let f = match f {
                Some(f) => f,
                None => blocky::factorize::gamma2_upper(&a.to_real(), &config.gamma2)?,
            };
            if let Some(g) = gamma {
                if f.gamma > g + tol {
                    return Err(Error::InvalidFactorization(format!("gamma {} exceeds the requested {g}", f.gamma)));
                }
            }
            let (sum, rep) = decompose(&a, Some(f), &config)?;
            emit(out.as_deref(), &decomposition_to_json(&sum))?;
            if let Some(p) = report {
                write_file(p, serde_json::to_string_pretty(&rep)?)?;
            }
            eprintln!("terms {} levels {}", rep.total_terms, rep.levels.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            input,
            decomp,
            factorization,
            tol,
        } => {
            let data = read_matrix(input)?;
            let mut ok = true;
            if let Some(p) = decomp {
                let a = data.to_int()?;
                let d = parse_decomposition(&read_text(p)?)?;
                if d.shape() != a.shape() {
                    return Err(Error::ShapeMismatch {
                        expected: a.shape(),
                        found: d.shape(),
                    });
                }
                let got = d.evaluate();
                let diffs: Vec<(usize, usize)> = (0..a.rows())
                    .flat_map(|x| (0..a.cols()).map(move |y| (x, y)))
                    .filter(|&(x, y)| a.get(x, y) != got.get(x, y))
                    .collect();
                for &(x, y) in &diffs {
                    println!("diff ({x}, {y}): expected {}, got {}", a.get(x, y), got.get(x, y));
                }
                println!("decomposition: {} terms, {} differing entries", d.len(), diffs.len());
                ok &= diffs.is_empty();
            }
            if let Some(p) = factorization {
                let a = data.to_real();
                let f = parse_factorization(&read_text(p)?, a.cols())?;
                let c = verify_factorization(&a, &f, tol)?;
                println!(
                    "factorization: valid {} max-row-norm {} max-col-norm {} (gamma {}) residual {:e}",
                    c.valid, c.max_row_norm, c.max_col_norm, f.gamma, c.residual
                );
                ok &= c.valid;
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Oracle { input, max_l, out } => {
            let a = read_matrix(input)?.to_int()?;
            match exact_block_complexity(&a, max_l)? {
                OracleResult::Exact { value, witness } => {
                    println!("{value}");
                    if let Some(p) = out {
                        write_file(p, decomposition_to_json(&witness))?;
                    }
                }
                OracleResult::ExceedsLmax => println!("exceeds {max_l}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen {
            kind,
            n,
            rows,
            cols,
            density,
            terms,
            support,
            seed,
            format,
            out,
            factorization,
            decomp,
        } => {
            let rows = rows.or(n);
            let cols = cols.or(n);
            let spec = match kind {
                Kind::RandomBoolean => GeneratorSpec::RandomBoolean {
                    rows: required("rows", rows)?,
                    cols: required("cols", cols)?,
                    density,
                },
                Kind::RandomBlockySum => GeneratorSpec::RandomBlockySum {
                    rows: required("rows", rows)?,
                    cols: required("cols", cols)?,
                    terms,
                },
                Kind::ConvolutionCyclic => GeneratorSpec::ConvolutionCyclic {
                    n: required("n", n)?,
                    support,
                },
                Kind::Identity => GeneratorSpec::Identity { n: required("n", n)? },
                Kind::AllOnes => GeneratorSpec::AllOnes {
                    rows: required("rows", rows)?,
                    cols: required("cols", cols)?,
                },
            };
            let g = generate(&spec, seed)?;
            let data = MatrixData::Int(g.matrix);
            let text = match format {
                OutputFormat::Text => matrix_to_text(&data),
                OutputFormat::Json => serde_json::to_string_pretty(&MatrixJson::from_data(&data))?,
            };
            emit(out.as_deref(), &text)?;
            if let (Some(p), Some(f)) = (factorization, &g.factorization) {
                write_file(p, factorization_to_json(f))?;
            }
            if let (Some(p), Some(d)) = (decomp, &g.sum) {
                write_file(p, decomposition_to_json(d))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Suite {
            seed,
            tol,
            restarts,
            budget,
            oracle_depth,
            only,
            out_dir,
        } => {
            let mut config = RunConfig {
                seed,
                tol,
                restarts,
                budget,
                oracle_depth,
                out_dir,
                ..RunConfig::default()
            };
            if let Some(ids) = only {
                config.criteria = ids;
            }
            let report = run_suite(&config)?;
            for c in &report.criteria {
                println!("{c}");
            }
            let failing = report.failing();
            if failing.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                let names: Vec<String> = failing.iter().map(|c| format!("{} ({})", c.id, c.name)).collect();
                eprintln!("failing criteria: {}", names.join(", "));
                Ok(ExitCode::FAILURE)
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
