//! Reproducible δ→ε experiments: generate perturbed-commuting pairs across
//! structures, dimensions and noise levels, correct them, and record the
//! outcomes. Records are a pure function of `(config, base seed)`; output
//! ordering is fixed by `(structure, n, δ, trial)` regardless of the number
//! of worker threads.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use acp_core::ensemble::{mix_seed, random_structured_pair, PairMode, Structure};
use acp_core::error::{Error, Result};
use acp_core::norms::{commutator_norm, hermitian_defect, operator_norm};
use acp_core::solver::{pair_correct, SolveOptions};

/// Experiment grid and control knobs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub structures: Vec<Structure>,
    pub dims: Vec<usize>,
    pub deltas: Vec<f64>,
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub solver: SolveOptions,
    /// CSV destination, if the caller wants one recorded in the config.
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Record wall-clock per trial. Off by default so that records (and the
    /// CSV) stay bit-for-bit reproducible; when off, runtime_ms is zero.
    #[serde(default)]
    pub measure_runtime: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.structures.is_empty() || self.dims.is_empty() || self.deltas.is_empty() {
            return Err(Error::Validation(
                "structures, dims and deltas must be nonempty".into(),
            ));
        }
        if self.trials == 0 {
            return Err(Error::Validation("trials must be positive".into()));
        }
        for &d in &self.deltas {
            if !(d >= 0.0) || !d.is_finite() {
                return Err(Error::Validation(format!(
                    "noise levels must be nonnegative reals, got {d}"
                )));
            }
        }
        for &n in &self.dims {
            if n < 2 {
                return Err(Error::Validation(format!("dims must be at least 2, got {n}")));
            }
            if self.structures.contains(&Structure::SelfDual) && n % 2 != 0 {
                return Err(Error::Validation(format!(
                    "selfdual runs need even ambient dimensions, got {n}"
                )));
            }
        }
        Ok(())
    }
}

/// One trial's provenance and measured outcomes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub structure: Structure,
    pub n: usize,
    pub delta: f64,
    pub trial: usize,
    pub seed: u64,
    pub comm_before: f64,
    pub comm_after: f64,
    pub eps_pair: f64,
    pub eps_a: f64,
    pub eps_b: f64,
    pub sweeps: usize,
    pub runtime_ms: f64,
    /// Set when the trial failed; the numeric fields are NaN in that case.
    pub error: Option<String>,
}

fn failed_record(
    structure: Structure,
    n: usize,
    delta: f64,
    trial: usize,
    seed: u64,
    message: String,
) -> ExperimentRecord {
    ExperimentRecord {
        structure,
        n,
        delta,
        trial,
        seed,
        comm_before: f64::NAN,
        comm_after: f64::NAN,
        eps_pair: f64::NAN,
        eps_a: f64::NAN,
        eps_b: f64::NAN,
        sweeps: 0,
        runtime_ms: 0.0,
        error: Some(message),
    }
}

fn run_cell(
    cfg: &ExperimentConfig,
    structure_idx: usize,
    n: usize,
    delta_idx: usize,
    trial: usize,
) -> ExperimentRecord {
    let structure = cfg.structures[structure_idx];
    let delta = cfg.deltas[delta_idx];
    let seed = mix_seed(&[
        cfg.base_seed,
        structure_idx as u64,
        n as u64,
        delta_idx as u64,
        trial as u64,
    ]);
    let start = Instant::now();
    let pair = random_structured_pair(seed, n, structure, delta, PairMode::PerturbedCommuting);
    let (a, b) = match pair {
        Ok(p) => p,
        Err(e) => return failed_record(structure, n, delta, trial, seed, e.to_string()),
    };
    let solution = match pair_correct(&a, &b, &cfg.solver) {
        Ok(s) => s,
        Err(e) => return failed_record(structure, n, delta, trial, seed, e.to_string()),
    };
    let runtime_ms = if cfg.measure_runtime {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };

    // spot re-verification on every tenth trial, independent of the
    // solver's own bookkeeping
    let mut error = None;
    if trial % 10 == 0 {
        let scale = operator_norm(&solution.a_prime.mat)
            .max(operator_norm(&solution.b_prime.mat))
            .max(1.0);
        let comm = commutator_norm(&solution.a_prime.mat, &solution.b_prime.mat)
            .unwrap_or(f64::INFINITY);
        let herm = hermitian_defect(&solution.a_prime.mat)
            .max(hermitian_defect(&solution.b_prime.mat));
        let self_tau_ok = match structure {
            Structure::Complex => true,
            _ => {
                solution.a_prime.is_self_tau(1e-10 * scale)
                    && solution.b_prime.is_self_tau(1e-10 * scale)
            }
        };
        if comm > 1e-10 * scale || herm > 1e-11 * scale || !self_tau_ok {
            error = Some(format!(
                "spot check failed: comm {comm:.3e}, herm {herm:.3e}, self_tau {self_tau_ok}"
            ));
        }
    }

    ExperimentRecord {
        structure,
        n,
        delta,
        trial,
        seed,
        comm_before: solution.comm_before,
        comm_after: solution.comm_after,
        eps_pair: solution.eps_pair,
        eps_a: solution.dist_a,
        eps_b: solution.dist_b,
        sweeps: solution.sweeps,
        runtime_ms,
        error,
    }
}

/// Worker-thread cap: `ACP_THREADS` when set and positive, otherwise the
/// rayon default (available cores).
pub fn thread_cap() -> Option<usize> {
    std::env::var("ACP_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v > 0)
}

/// Runs the full grid. Trials execute in parallel (capped by
/// `ACP_THREADS`); the returned order is `(structure, n, δ, trial)`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    let mut cells = Vec::new();
    for si in 0..cfg.structures.len() {
        for &n in &cfg.dims {
            for di in 0..cfg.deltas.len() {
                for trial in 0..cfg.trials {
                    cells.push((si, n, di, trial));
                }
            }
        }
    }
    let work = |cells: &[(usize, usize, usize, usize)]| -> Vec<ExperimentRecord> {
        cells
            .par_iter()
            .map(|&(si, n, di, trial)| run_cell(cfg, si, n, di, trial))
            .collect()
    };
    let records = match thread_cap() {
        Some(cap) => rayon::ThreadPoolBuilder::new()
            .num_threads(cap)
            .build()
            .map_err(|e| Error::Validation(format!("thread pool: {e}")))?
            .install(|| work(&cells)),
        None => work(&cells),
    };
    Ok(records)
}

/// Serializes records in the fixed CSV schema: floats carry 17 significant
/// digits, lines end with LF.
pub fn render_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::new();
    out.push_str(
        "structure,n,delta,trial,seed,comm_before,comm_after,eps_pair,eps_A,eps_B,sweeps,runtime_ms\n",
    );
    for r in records {
        writeln!(
            out,
            "{},{},{:.16e},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e}",
            r.structure,
            r.n,
            r.delta,
            r.trial,
            r.seed,
            r.comm_before,
            r.comm_after,
            r.eps_pair,
            r.eps_a,
            r.eps_b,
            r.sweeps,
            r.runtime_ms
        )
        .expect("writing to a String cannot fail");
    }
    out
}

pub fn write_csv(path: &std::path::Path, records: &[ExperimentRecord]) -> Result<()> {
    std::fs::write(path, render_csv(records))
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Per-cell statistics of the recovery error.
#[derive(Clone, Debug, Serialize)]
pub struct CellStat {
    pub structure: Structure,
    pub n: usize,
    pub delta: f64,
    pub trials: usize,
    pub failures: usize,
    pub median_eps: f64,
    pub p90_eps: f64,
}

/// Aggregated view of an experiment.
#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub cells: Vec<CellStat>,
    /// Per (structure, n): whether the median eps_pair is non-decreasing
    /// in δ.
    pub monotone: Vec<(Structure, usize, bool)>,
    /// Per (structure, δ): max/min ratio of median eps_pair across
    /// dimensions.
    pub dim_stability: Vec<(Structure, f64, f64)>,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    if sorted.len() == 1 {
        return sorted[0];
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = pos - lo as f64;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    }
}

/// Aggregates records per cell and reports monotonicity and dimension
/// stability of the medians.
pub fn summarize(records: &[ExperimentRecord]) -> Result<Summary> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut keys: Vec<(Structure, usize, f64)> = Vec::new();
    for r in records {
        let key = (r.structure, r.n, r.delta);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let mut cells = Vec::new();
    for (structure, n, delta) in keys {
        let mut eps: Vec<f64> = records
            .iter()
            .filter(|r| r.structure == structure && r.n == n && r.delta == delta)
            .filter(|r| r.error.is_none() && r.eps_pair.is_finite())
            .map(|r| r.eps_pair)
            .collect();
        let trials = records
            .iter()
            .filter(|r| r.structure == structure && r.n == n && r.delta == delta)
            .count();
        eps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cells.push(CellStat {
            structure,
            n,
            delta,
            trials,
            failures: trials - eps.len(),
            median_eps: quantile(&eps, 0.5),
            p90_eps: quantile(&eps, 0.9),
        });
    }

    let mut monotone = Vec::new();
    let mut sn_keys: Vec<(Structure, usize)> = Vec::new();
    for c in &cells {
        if !sn_keys.contains(&(c.structure, c.n)) {
            sn_keys.push((c.structure, c.n));
        }
    }
    for (structure, n) in sn_keys {
        let mut by_delta: Vec<(f64, f64)> = cells
            .iter()
            .filter(|c| c.structure == structure && c.n == n)
            .map(|c| (c.delta, c.median_eps))
            .collect();
        by_delta.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let flag = by_delta.windows(2).all(|w| w[1].1 >= w[0].1);
        monotone.push((structure, n, flag));
    }

    let mut dim_stability = Vec::new();
    let mut sd_keys: Vec<(Structure, f64)> = Vec::new();
    for c in &cells {
        if !sd_keys.contains(&(c.structure, c.delta)) {
            sd_keys.push((c.structure, c.delta));
        }
    }
    for (structure, delta) in sd_keys {
        let medians: Vec<f64> = cells
            .iter()
            .filter(|c| c.structure == structure && c.delta == delta)
            .map(|c| c.median_eps)
            .filter(|m| m.is_finite())
            .collect();
        if medians.len() > 1 {
            let max = medians.iter().copied().fold(f64::MIN, f64::max);
            let min = medians.iter().copied().fold(f64::MAX, f64::min);
            let ratio = if min > 0.0 { max / min } else { f64::INFINITY };
            dim_stability.push((structure, delta, ratio));
        }
    }

    Ok(Summary {
        cells,
        monotone,
        dim_stability,
    })
}

impl std::fmt::Display for Summary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:<9} {:>4} {:>10} {:>7} {:>12} {:>12}", "structure", "n", "delta", "trials", "median_eps", "p90_eps")?;
        for c in &self.cells {
            writeln!(
                f,
                "{:<9} {:>4} {:>10.3e} {:>7} {:>12.4e} {:>12.4e}{}",
                c.structure.as_str(),
                c.n,
                c.delta,
                c.trials,
                c.median_eps,
                c.p90_eps,
                if c.failures > 0 {
                    format!("  ({} failed)", c.failures)
                } else {
                    String::new()
                }
            )?;
        }
        for (s, n, flag) in &self.monotone {
            writeln!(f, "monotone in delta [{s} n={n}]: {flag}")?;
        }
        for (s, d, ratio) in &self.dim_stability {
            writeln!(f, "dimension stability [{s} delta={d:.1e}]: max/min median = {ratio:.3}")?;
        }
        Ok(())
    }
}
