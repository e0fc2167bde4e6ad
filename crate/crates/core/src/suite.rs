//! The reproduction battery: ten numbered criteria, each with a pass/fail
//! verdict, plus tabular plot data.

use std::cell::OnceCell;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blocky::{is_blocky, SignedBlockySum};
use crate::error::Result;
use crate::factorize::{gamma2_upper, Gamma2Options};
use crate::generate::{generate, GeneratorSpec};
use crate::littlestone::{
    bucket_stabilize_with, ldim_alpha_with_budget, ldim_with_budget, majority_stabilize_with_budget, RowFunction,
    StabilizeOptions, DEFAULT_BUDGET,
};
use crate::matrix::{IntMatrix, RealMatrix};
use crate::partition::{greedy_l1_decompose, greedy_partition, subtract_average, DELTA_GRID};
use crate::pipeline::{
    decompose, exact_block_complexity, random_lower_bound_experiment, DecomposeConfig, ExperimentMode, PipelineReport,
};

/// Suite configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub seed: u64,
    pub tol: f64,
    pub restarts: usize,
    /// Node budget for exact Littlestone recursions.
    pub budget: u64,
    /// Depth for the block-complexity oracle.
    pub oracle_depth: usize,
    /// Criteria to run, numbered 1 to 10.
    pub criteria: Vec<usize>,
    /// Where results and plot tables go; nothing is written when absent.
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tol: 1e-9,
            restarts: 16,
            budget: DEFAULT_BUDGET,
            oracle_depth: 4,
            criteria: (1..=CRITERIA.len()).collect(),
            out_dir: None,
        }
    }
}

impl RunConfig {
    fn gamma2(&self) -> Gamma2Options {
        Gamma2Options {
            restarts: self.restarts,
            tol: self.tol,
            seed: self.seed,
            ..Gamma2Options::default()
        }
    }

    fn decompose(&self) -> DecomposeConfig {
        DecomposeConfig {
            gamma2: self.gamma2(),
            tol: self.tol.max(1e-9),
            budget: self.budget,
            force: false,
        }
    }
}

/// Names and time limits, indexed by criterion number minus one.
pub const CRITERIA: [(&str, Duration); 10] = [
    ("gamma2 value reproduction", Duration::from_secs(1)),
    ("lower/upper consistency", Duration::from_secs(120)),
    ("stabilizer postconditions", Duration::from_secs(120)),
    ("greedy partition guarantee", Duration::from_secs(60)),
    ("subtract-average", Duration::from_secs(30)),
    ("key-lemma decrement", Duration::from_secs(300)),
    ("end-to-end exactness", Duration::from_secs(900)),
    ("oracle sandwich", Duration::from_secs(600)),
    ("rounding additivity", Duration::from_secs(900)),
    ("random lower-bound report", Duration::from_secs(300)),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub limit_seconds: f64,
}

impl std::fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:>2}. {} ({:.2}s of {:.0}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.limit_seconds,
            self.detail
        )
    }
}

/// A plot-data table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_tsv(&self) -> String {
        let mut s = self.columns.join("\t");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join("\t"));
            s.push('\n');
        }
        s
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub criteria: Vec<CriterionOutcome>,
    pub tables: Vec<Table>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn failing(&self) -> Vec<&CriterionOutcome> {
        self.criteria.iter().filter(|c| !c.passed).collect()
    }

    /// Writes `results.json` and one `.tsv` per table.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("results.json"), serde_json::to_string_pretty(self)?)?;
        for t in &self.tables {
            std::fs::write(dir.join(format!("{}.tsv", t.name)), t.to_tsv())?;
        }
        Ok(())
    }
}

/// One decompose run kept for criteria 7 and 9.
struct EndToEnd {
    label: String,
    input: IntMatrix,
    outcome: std::result::Result<(SignedBlockySum, PipelineReport), String>,
}

/// Runs criteria and shares expensive intermediate results between them.
pub struct Suite {
    config: RunConfig,
    blocky_instances: OnceCell<Vec<(usize, usize, crate::generate::Generated)>>,
    end_to_end: OnceCell<Vec<EndToEnd>>,
    tables: Vec<Table>,
}

fn rng_for(seed: u64, criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(criterion))
}

fn all_boolean_3x3() -> impl Iterator<Item = IntMatrix> {
    (0u32..512).map(|mask| IntMatrix::new(3, 3, (0..9).map(|i| ((mask >> i) & 1) as i64).collect()).unwrap())
}

fn random_sign(rng: &mut impl Rng, m: usize, n: usize) -> IntMatrix {
    IntMatrix::new(m, n, (0..m * n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect()).unwrap()
}

fn fmt_f(v: f64) -> String {
    format!("{v}")
}

impl Suite {
    pub fn new(config: RunConfig) -> Self {
        Self {
            config,
            blocky_instances: OnceCell::new(),
            end_to_end: OnceCell::new(),
            tables: Vec::new(),
        }
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    /// Runs one criterion, timing it against its limit.
    pub fn run(&mut self, id: usize) -> CriterionOutcome {
        let Some(&(name, limit)) = id.checked_sub(1).and_then(|k| CRITERIA.get(k)) else {
            return CriterionOutcome {
                id,
                name: "unknown".into(),
                passed: false,
                detail: format!("no criterion {id}; valid ids are 1 to {}", CRITERIA.len()),
                seconds: 0.0,
                limit_seconds: 0.0,
            };
        };
        let start = Instant::now();
        let result = match id {
            1 => self.gamma2_values(),
            2 => self.lower_upper(),
            3 => self.stabilizers(),
            4 => self.greedy_partition(),
            5 => self.subtract_average(),
            6 => self.key_lemma(),
            7 => self.exactness(),
            8 => self.oracle_sandwich(),
            9 => self.rounding_additivity(),
            _ => self.lower_bound_report(),
        };
        let elapsed = start.elapsed();
        let (mut passed, mut detail) = match result {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if elapsed > limit {
            passed = false;
            detail = format!("over time limit; {detail}");
        }
        CriterionOutcome {
            id,
            name: name.to_string(),
            passed,
            detail,
            seconds: elapsed.as_secs_f64(),
            limit_seconds: limit.as_secs_f64(),
        }
    }

    pub fn into_tables(self) -> Vec<Table> {
        self.tables
    }

    fn gamma2_values(&mut self) -> std::result::Result<String, String> {
        let opts = self.config.gamma2();
        let g = |a: IntMatrix| gamma2_upper(&a.to_real(), &opts).map(|f| f.gamma).map_err(|e| e.to_string());
        let three = g(IntMatrix::from_rows(&[[1, 0], [1, 1]]))?;
        let mut out = format!("[[1,0],[1,1]] -> {three:.9}");
        let mut ok = (1.15470..=1.15570).contains(&three);
        for (label, a) in [
            ("I3", IntMatrix::identity(3)),
            ("I6", IntMatrix::identity(6)),
            ("J3x3", IntMatrix::ones(3, 3)),
            ("J4x7", IntMatrix::ones(4, 7)),
        ] {
            let v = g(a)?;
            ok &= (1.0..=1.0 + 1e-6).contains(&v);
            write!(out, ", {label} -> {v:.9}").unwrap();
        }
        if ok {
            Ok(out)
        } else {
            Err(out)
        }
    }

    fn lower_upper(&mut self) -> std::result::Result<String, String> {
        let mut rng = rng_for(self.config.seed, 2);
        let opts = self.config.gamma2();
        let mut worst_sqrt: f64 = f64::NEG_INFINITY;
        let mut worst_alpha: f64 = f64::NEG_INFINITY;
        for trial in 0..200 {
            let (m, n) = (rng.gen_range(1..=6), rng.gen_range(1..=10));
            let a = random_sign(&mut rng, m, n);
            let real = a.to_real();
            let gamma = gamma2_upper(&real, &opts).map_err(|e| e.to_string())?.gamma;
            let d = ldim_with_budget(&a, self.config.budget).map_err(|e| e.to_string())?;
            let gap = (d as f64).sqrt() - gamma;
            worst_sqrt = worst_sqrt.max(gap);
            if gap > 1e-6 {
                return Err(format!("trial {trial}: sqrt(Ldim) = {} > gamma = {gamma}", (d as f64).sqrt()));
            }
            let big_m = real.max_abs();
            for alpha in [0.125, 0.25, 0.5, 1.0] {
                let da = ldim_alpha_with_budget(&real, alpha, self.config.budget).map_err(|e| e.to_string())?;
                let bound = (2.0 * (big_m + 1.0) * (gamma + 1.0) / alpha).powi(2);
                worst_alpha = worst_alpha.max(da as f64 / bound);
                if da as f64 > bound + 1e-6 {
                    return Err(format!("trial {trial}: Ldim_{alpha} = {da} > {bound}"));
                }
            }
        }
        Ok(format!(
            "200 matrices; max sqrt(Ldim) - gamma = {worst_sqrt:.4}, max Ldim_alpha / bound = {worst_alpha:.4}"
        ))
    }

    fn stabilizers(&mut self) -> std::result::Result<String, String> {
        let mut rng = rng_for(self.config.seed, 3);
        let budget = self.config.budget;
        let mut min_margin = f64::INFINITY;
        for trial in 0..100 {
            let a = random_sign(&mut rng, 5, 32);
            let r = majority_stabilize_with_budget(&a, 0.25, budget).map_err(|e| e.to_string())?;
            let RowFunction::Signs(signs) = &r.row_function else {
                return Err("majority stabilizer returned real values".into());
            };
            let s = r.columns.len();
            for (x, &sign) in signs.iter().enumerate() {
                let bad = r.columns.iter().filter(|&&y| a.get(x, y) != sign).count();
                if 4 * bad > s {
                    return Err(format!("majority trial {trial}: row {x} has {bad} of {s} violations"));
                }
            }
            let d = ldim_with_budget(&a, budget).map_err(|e| e.to_string())?;
            let bound = 0.25f64.powi(d as i32) * 32.0;
            if (s as f64) < bound {
                return Err(format!("majority trial {trial}: |S| = {s} < {bound}"));
            }
            min_margin = min_margin.min(s as f64 - bound);
        }
        let mut certified = 0;
        let opts = StabilizeOptions {
            budget,
            compute_bound: true,
        };
        for trial in 0..100 {
            let a = RealMatrix::new(4, 64, (0..256).map(|_| rng.gen_range(-1.0..=1.0)).collect()).unwrap();
            let alpha = 0.125;
            let r = bucket_stabilize_with(&a, alpha, 0.1, &opts).map_err(|e| e.to_string())?;
            let RowFunction::Values(g) = &r.row_function else {
                return Err("bucket stabilizer returned signs".into());
            };
            let s = r.columns.len();
            for (x, &gx) in g.iter().enumerate() {
                let bad = r.columns.iter().filter(|&&y| (a.get(x, y) - gx).abs() >= 2.0 * alpha).count();
                if 10 * bad > s {
                    return Err(format!("bucket trial {trial}: row {x} has {bad} of {s} violations"));
                }
            }
            if r.certified {
                certified += 1;
                let d = ldim_alpha_with_budget(&a, alpha, budget).map_err(|e| e.to_string())?;
                let k = (2.0 * a.max_abs() / alpha).ceil();
                let bound = 64.0 * (0.1 / k).powi(d as i32);
                if (s as f64) < bound {
                    return Err(format!("bucket trial {trial}: |S| = {s} < {bound}"));
                }
            }
        }
        Ok(format!(
            "majority: 100/100, min |S| margin {min_margin:.3}; bucket: 100/100, {certified} on the exact path"
        ))
    }

    fn greedy_partition(&mut self) -> std::result::Result<String, String> {
        let mut rng = rng_for(self.config.seed, 4);
        let mut table = Table::new("density_margins", &["trial", "m", "n", "delta", "max_dense_classes", "limit"]);
        let mut worst_harmonic: f64 = 0.0;
        let mut trial = 0;
        while trial < 100 {
            let (m, n) = (rng.gen_range(1..=16), rng.gen_range(1..=256));
            let raw = IntMatrix::new(m, n, (0..m * n).map(|_| rng.gen_range(-3..=3)).collect()).unwrap();
            let keep: Vec<usize> = (0..n).filter(|&y| !raw.is_zero_column(y)).collect();
            if keep.is_empty() {
                continue;
            }
            let a = raw.select_cols(&keep);
            let p = greedy_partition(&a).map_err(|e| e.to_string())?;
            let ny = a.cols();
            let bound = (ny as f64).ln() + 1.0;
            // Class membership recounted from scratch.
            let mut seen = vec![false; ny];
            for c in &p.classes {
                for &y in &c.columns {
                    if seen[y] || a.get(c.row, y) != c.value || c.value == 0 {
                        return Err(format!("trial {trial}: class structure broken at column {y}"));
                    }
                    seen[y] = true;
                }
            }
            if seen.iter().any(|s| !s) {
                return Err(format!("trial {trial}: partition misses columns"));
            }
            let mut max_dense = vec![0usize; DELTA_GRID.len()];
            for x in 0..m {
                for b in (-3..=3).filter(|&b| b != 0) {
                    let densities: Vec<f64> = p
                        .classes
                        .iter()
                        .map(|c| c.columns.iter().filter(|&&y| a.get(x, y) == b).count() as f64 / c.columns.len() as f64)
                        .collect();
                    let sum: f64 = densities.iter().sum();
                    worst_harmonic = worst_harmonic.max(sum / bound);
                    if sum > bound + 1e-9 {
                        return Err(format!("trial {trial}: row {x}, value {b}: density sum {sum} > {bound}"));
                    }
                    for (k, &delta) in DELTA_GRID.iter().enumerate() {
                        let count = densities.iter().filter(|&&d| d >= delta).count();
                        if count as f64 > bound / delta + 1e-9 {
                            return Err(format!("trial {trial}: {count} classes are {delta}-dense for ({x}, {b})"));
                        }
                        max_dense[k] = max_dense[k].max(count);
                    }
                }
            }
            for (k, &delta) in DELTA_GRID.iter().enumerate() {
                table.push(vec![
                    trial.to_string(),
                    m.to_string(),
                    ny.to_string(),
                    fmt_f(delta),
                    max_dense[k].to_string(),
                    fmt_f(bound / delta),
                ]);
            }
            trial += 1;
        }
        self.tables.push(table);
        Ok(format!("100 matrices; max density sum / (ln|Y| + 1) = {worst_harmonic:.4}"))
    }

    fn subtract_average(&mut self) -> std::result::Result<String, String> {
        let mut rng = rng_for(self.config.seed, 5);
        let mut worst_rel: f64 = 0.0;
        let mut min_slack = f64::INFINITY;
        for trial in 0..1000 {
            let r = rng.gen_range(1..=64);
            let dim = rng.gen_range(1..=32);
            let gamma = rng.gen_range(0.5..4.0);
            let shift: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let shift_weight = rng.gen_range(0.0..1.0);
            let vectors: Vec<Vec<f64>> = (0..r)
                .map(|_| {
                    let v: Vec<f64> = (0..dim)
                        .map(|k| shift_weight * shift[k] + rng.gen_range(-1.0..1.0))
                        .collect();
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
                    let target = gamma * rng.gen_range(0.0..=1.0);
                    v.into_iter().map(|x| x * target / norm).collect()
                })
                .collect();
            let split = subtract_average(&vectors, gamma).map_err(|e| e.to_string())?;
            let mean: Vec<f64> = (0..dim).map(|k| vectors.iter().map(|v| v[k]).sum::<f64>() / r as f64).collect();
            let c2: f64 = mean.iter().map(|x| x * x).sum();
            // Mean of ‖v‖² − ‖v − v̂‖² equals ‖v̂‖².
            let drops: Vec<f64> = vectors
                .iter()
                .map(|v| {
                    let n2: f64 = v.iter().map(|x| x * x).sum();
                    let d2: f64 = v.iter().zip(&mean).map(|(x, m)| (x - m) * (x - m)).sum();
                    n2 - d2
                })
                .collect();
            let scale = vectors
                .iter()
                .map(|v| v.iter().map(|x| x * x).sum::<f64>())
                .fold(c2, f64::max)
                .max(f64::MIN_POSITIVE);
            let mean_drop = drops.iter().sum::<f64>() / r as f64;
            let rel = (mean_drop - c2).abs() / scale;
            let avg_rel = split.average.iter().zip(&mean).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale.sqrt();
            worst_rel = worst_rel.max(rel).max(avg_rel);
            if rel > 1e-9 || avg_rel > 1e-9 {
                return Err(format!("trial {trial}: mean identity off by {rel:e}, average off by {avg_rel:e}"));
            }
            let kept = drops.iter().filter(|&&d| d + 1e-12 >= c2 / 2.0).count();
            let bound = c2 * r as f64 / (2.0 * gamma * gamma) - 1e-9 * r as f64;
            if (kept as f64) < bound || split.kept.len() != kept {
                return Err(format!("trial {trial}: kept {} (recount {kept}) < {bound}", split.kept.len()));
            }
            min_slack = min_slack.min(kept as f64 - bound);
        }
        Ok(format!("1000 families; max relative error {worst_rel:.2e}, min size slack {min_slack:.3}"))
    }

    fn blocky_instances(&self) -> std::result::Result<&Vec<(usize, usize, crate::generate::Generated)>, String> {
        if self.blocky_instances.get().is_none() {
            let mut out = Vec::with_capacity(50);
            for i in 0..50u64 {
                let n = 8 + (56 * i as usize) / 49;
                let terms = 1 + (i as usize % 4);
                let spec = GeneratorSpec::RandomBlockySum { rows: n, cols: n, terms };
                let g = generate(&spec, self.config.seed.wrapping_add(i)).map_err(|e| e.to_string())?;
                out.push((n, terms, g));
            }
            let _ = self.blocky_instances.set(out);
        }
        Ok(self.blocky_instances.get().unwrap())
    }

    fn key_lemma(&mut self) -> std::result::Result<String, String> {
        let config = self.config.decompose();
        let mut levels = 0;
        let mut worst_decrement = f64::NEG_INFINITY;
        let mut worst_eps: f64 = 0.0;
        for (i, (_, _, g)) in self.blocky_instances()?.iter().enumerate() {
            let (_, report) = decompose(&g.matrix, g.factorization.clone(), &config).map_err(|e| format!("instance {i}: {e}"))?;
            for (k, level) in report.levels.iter().enumerate() {
                levels += 1;
                let excess = level.gamma_squared_out - (level.gamma_squared_in - 0.125);
                worst_decrement = worst_decrement.max(excess);
                if excess > 1e-9 {
                    return Err(format!("instance {i} level {k}: gamma^2 {} -> {}", level.gamma_squared_in, level.gamma_squared_out));
                }
                worst_eps = worst_eps.max(level.eps_out - 2.0 * level.eps_in);
                if level.eps_out > 2.0 * level.eps_in + 1e-9 {
                    return Err(format!("instance {i} level {k}: eps {} -> {}", level.eps_in, level.eps_out));
                }
            }
        }
        Ok(format!(
            "50 instances, {levels} levels; max (gamma'^2 - gamma^2 + 1/8) = {worst_decrement:.4}, max (epsOut - 2 epsIn) = {worst_eps:.2e}"
        ))
    }

    fn end_to_end(&self) -> std::result::Result<&Vec<EndToEnd>, String> {
        if self.end_to_end.get().is_none() {
            let config = self.config.decompose();
            let mut runs = Vec::new();
            for (mask, a) in all_boolean_3x3().enumerate() {
                let outcome = decompose(&a, None, &config).map_err(|e| e.to_string());
                runs.push(EndToEnd {
                    label: format!("boolean3x3:{mask}"),
                    input: a,
                    outcome,
                });
            }
            for (i, (n, terms, g)) in self.blocky_instances()?.iter().enumerate() {
                let outcome = decompose(&g.matrix, g.factorization.clone(), &config).map_err(|e| e.to_string());
                runs.push(EndToEnd {
                    label: format!("blocky-sum:{i}:n={n}:L0={terms}"),
                    input: g.matrix.clone(),
                    outcome,
                });
            }
            let _ = self.end_to_end.set(runs);
        }
        Ok(self.end_to_end.get().unwrap())
    }

    fn exactness(&mut self) -> std::result::Result<String, String> {
        let runs = self.end_to_end()?;
        let mut terms = Table::new("terms_vs_n", &["label", "m", "n", "gamma0", "levels", "terms", "ln_min_dim_sq", "fit_constant"]);
        let mut trajectories = Table::new("gamma_trajectories", &["label", "level", "gamma_squared"]);
        let mut failures = Vec::new();
        let mut max_fit: f64 = 0.0;
        for run in runs {
            match &run.outcome {
                Err(e) => failures.push(format!("{}: {e}", run.label)),
                Ok((sum, report)) => {
                    if sum.evaluate() != run.input {
                        failures.push(format!("{}: reconstruction differs", run.label));
                    }
                    if report.levels.len() > report.level_bound {
                        failures.push(format!("{}: {} levels > {}", run.label, report.levels.len(), report.level_bound));
                    }
                    let c = report.bound_fit.constant;
                    max_fit = max_fit.max(c.unwrap_or(0.0));
                    terms.push(vec![
                        run.label.clone(),
                        report.shape.0.to_string(),
                        report.shape.1.to_string(),
                        fmt_f(report.gamma0),
                        report.levels.len().to_string(),
                        report.total_terms.to_string(),
                        fmt_f(report.bound_fit.log_min_dim_squared),
                        c.map_or_else(|| "NA".into(), fmt_f),
                    ]);
                    for (k, g2) in report.gamma_squared_trajectory.iter().enumerate() {
                        trajectories.push(vec![run.label.clone(), k.to_string(), fmt_f(*g2)]);
                    }
                }
            }
        }
        let count = runs.len();
        self.tables.push(terms);
        self.tables.push(trajectories);
        if failures.is_empty() {
            Ok(format!("{count} runs reconstructed exactly; max L / ln(min(m,n))^2 = {max_fit:.3}"))
        } else {
            Err(format!("{} failures, first: {}", failures.len(), failures[0]))
        }
    }

    fn oracle_sandwich(&mut self) -> std::result::Result<String, String> {
        let depth = self.config.oracle_depth;
        let config = self.config.decompose();
        let mut hist = [0usize; 8];
        for (mask, a) in all_boolean_3x3().enumerate() {
            let exact = exact_block_complexity(&a, depth).map_err(|e| e.to_string())?;
            let Some(value) = exact.value() else {
                return Err(format!("matrix {mask} exceeds oracle depth {depth}"));
            };
            hist[value] += 1;
            let greedy = greedy_l1_decompose(&a).len();
            let (sum, _) = decompose(&a, None, &config).map_err(|e| format!("matrix {mask}: {e}"))?;
            if value > greedy || value > sum.len() {
                return Err(format!("matrix {mask}: oracle {value}, greedy {greedy}, pipeline {}", sum.len()));
            }
            let blocky = is_blocky(&a).map_err(|e| e.to_string())?.is_blocky();
            if blocky && !a.is_zero() && value != 1 {
                return Err(format!("blocky matrix {mask} has oracle value {value}"));
            }
        }
        let three = IntMatrix::from_rows(&[[1, 0], [1, 1]]).padded(3, 3).map_err(|e| e.to_string())?;
        let v = exact_block_complexity(&three, depth).map_err(|e| e.to_string())?.value();
        if v != Some(2) {
            return Err(format!("padded [[1,0],[1,1]] has oracle value {v:?}"));
        }
        Ok(format!("512 matrices; oracle histogram 0:{} 1:{} 2:{} 3:{}", hist[0], hist[1], hist[2], hist[3]))
    }

    fn rounding_additivity(&mut self) -> std::result::Result<String, String> {
        let runs = self.end_to_end()?;
        let mut levels = 0;
        let mut failures = 0;
        for run in runs {
            match &run.outcome {
                Ok((_, report)) => {
                    levels += report.levels.len();
                    failures += report.levels.iter().filter(|l| !l.rounding_additive).count();
                }
                Err(_) => failures += 1,
            }
        }
        if failures == 0 {
            Ok(format!("{levels} levels over {} runs, zero failures", runs.len()))
        } else {
            Err(format!("{failures} failures over {levels} levels"))
        }
    }

    fn lower_bound_report(&mut self) -> std::result::Result<String, String> {
        let r = random_lower_bound_experiment(3, 100, self.config.seed, ExperimentMode::Exact).map_err(|e| e.to_string())?;
        let mut table = Table::new("lower_bound_histogram", &["n", "value", "count", "reference"]);
        for &(v, c) in &r.histogram {
            table.push(vec![r.n.to_string(), v.to_string(), c.to_string(), fmt_f(r.reference)]);
        }
        self.tables.push(table);
        let floor = r.reference.floor() as usize;
        let hist: Vec<String> = r.histogram.iter().map(|(v, c)| format!("{v}:{c}")).collect();
        if r.exceeded == 0 && r.values.iter().flatten().all(|&v| v >= floor) {
            Ok(format!("n=3, 100 trials, reference {:.4}; histogram {}", r.reference, hist.join(" ")))
        } else {
            Err(format!("{} samples exceeded the oracle or fell below {floor}", r.exceeded))
        }
    }
}

/// Runs the configured criteria and writes artifacts when `out_dir` is set.
pub fn run_suite(config: &RunConfig) -> Result<SuiteReport> {
    let mut suite = Suite::new(config.clone());
    let criteria: Vec<CriterionOutcome> = config.criteria.iter().map(|&id| suite.run(id)).collect();
    let report = SuiteReport {
        criteria,
        tables: suite.into_tables(),
    };
    if let Some(dir) = &config.out_dir {
        if !report.criteria.is_empty() {
            report.write(dir)?;
        }
    }
    Ok(report)
}
