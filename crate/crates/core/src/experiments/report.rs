use super::{ExperimentConfig, RunOutcome};
use crate::analysis::{Stability, ZeroCatalog, ZeroClass};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

pub(super) const NOTE: &str = "Frequencies are finite-horizon Monte-Carlo estimates of almost-sure \
limit statements: empirical checks, not proofs.";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub index: usize,
    pub seed: u64,
    pub x0: Vec<f64>,
    pub start_index: u64,
    pub outcome: RunOutcome,
    pub final_state: Option<Vec<f64>>,
    /// Mean of the trailing window when it settled.
    pub limit: Option<Vec<f64>>,
    pub min_coordinate: Option<f64>,
    /// Share of recorded states near a linearly unstable equilibrium.
    pub residence_fraction: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    pub count: usize,
    pub frequency: f64,
    /// Binomial standard error sqrt(p(1 − p)/n).
    pub std_error: f64,
}

impl Frequency {
    fn of(count: usize, n: usize) -> Self {
        let p = count as f64 / n as f64;
        Self {
            count,
            frequency: p,
            std_error: (p * (1.0 - p) / n as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroTally {
    pub zero: usize,
    pub support: Vec<usize>,
    pub klass: ZeroClass,
    pub stability: Stability,
    pub isolated: bool,
    pub hits: Frequency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub n_runs: usize,
    pub converged: usize,
    pub unmatched: usize,
    pub not_converged: usize,
    pub converged_frequency: Frequency,
    pub unmatched_frequency: Frequency,
    pub not_converged_frequency: Frequency,
    /// Runs that left the escape box; a subset of the non-converged ones.
    pub escaped: usize,
    pub per_zero: Vec<ZeroTally>,
    /// Mean residence fraction over runs that recorded one.
    pub mean_residence_fraction: Option<f64>,
    pub min_coordinate: Option<f64>,
}

impl Aggregates {
    pub(super) fn tally(runs: &[RunRecord], catalog: &ZeroCatalog) -> Self {
        let n = runs.len();
        let mut hits = vec![0usize; catalog.points.len()];
        let (mut converged, mut unmatched, mut not_converged, mut escaped) = (0, 0, 0, 0);
        for r in runs {
            match &r.outcome {
                RunOutcome::ConvergedTo { zero } => {
                    converged += 1;
                    hits[*zero] += 1;
                }
                RunOutcome::ConvergedUnmatched { .. } => unmatched += 1,
                RunOutcome::NotConverged { reason } => {
                    not_converged += 1;
                    escaped += usize::from(reason == "escaped");
                }
            }
        }
        let residences: Vec<f64> = runs.iter().filter_map(|r| r.residence_fraction).collect();
        Self {
            n_runs: n,
            converged,
            unmatched,
            not_converged,
            converged_frequency: Frequency::of(converged, n),
            unmatched_frequency: Frequency::of(unmatched, n),
            not_converged_frequency: Frequency::of(not_converged, n),
            escaped,
            per_zero: catalog
                .points
                .iter()
                .enumerate()
                .map(|(i, p)| ZeroTally {
                    zero: i,
                    support: p.support.clone(),
                    klass: p.klass,
                    stability: p.stability,
                    isolated: p.isolated,
                    hits: Frequency::of(hits[i], n),
                })
                .collect(),
            mean_residence_fraction: (!residences.is_empty())
                .then(|| residences.iter().sum::<f64>() / residences.len() as f64),
            min_coordinate: runs.iter().filter_map(|r| r.min_coordinate).reduce(f64::min),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseProbeResult {
    pub point: Vec<f64>,
    pub direction: Vec<f64>,
    pub excitation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub note: String,
    pub config: ExperimentConfig,
    pub zeros: ZeroCatalog,
    /// Sorted by run index.
    pub per_run: Vec<RunRecord>,
    pub aggregates: Aggregates,
    pub probes: Vec<NoiseProbeResult>,
    /// Empirical bound on Σ_j |∂u_i/∂x_j| over the escape box.
    pub lipschitz: f64,
    /// Smallest start index used by any run.
    pub start_index_floor: u64,
}

fn fmt_point(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v:.4}")).collect();
    format!("({})", parts.join(", "))
}

impl ExperimentReport {
    /// Plain-text table with one row per catalog zero.
    pub fn summary_table(&self) -> String {
        let a = &self.aggregates;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "experiment {} on {}: {} runs",
            self.config.name, self.zeros.game, a.n_runs
        );
        let _ = writeln!(s, "{}", self.note);
        let _ = writeln!(
            s,
            "payoff slope bound {:.4} over the escape box; runs start at n >= {}",
            self.lipschitz, self.start_index_floor
        );
        let _ = writeln!(
            s,
            "{:>4}  {:<28}  {:<16}  {:<16}  {:>8}  {:>6}  {:>9}  {:>8}",
            "zero", "location", "class", "stability", "isolated", "hits", "frequency", "std_err"
        );
        for (t, p) in a.per_zero.iter().zip(&self.zeros.points) {
            let _ = writeln!(
                s,
                "{:>4}  {:<28}  {:<16}  {:<16}  {:>8}  {:>6}  {:>9.4}  {:>8.4}",
                t.zero,
                fmt_point(&p.location),
                format!("{:?}", t.klass),
                format!("{:?}", t.stability),
                if t.isolated { "yes" } else { "no" },
                t.hits.count,
                t.hits.frequency,
                t.hits.std_error
            );
        }
        for (label, f) in [
            ("converged, unmatched", a.unmatched_frequency),
            ("not converged", a.not_converged_frequency),
        ] {
            let _ = writeln!(
                s,
                "{label:<24} {:>6}  {:>9.4}  {:>8.4}",
                f.count, f.frequency, f.std_error
            );
        }
        if a.escaped > 0 {
            let _ = writeln!(s, "escaped                  {:>6}", a.escaped);
        }
        if let Some(r) = a.mean_residence_fraction {
            let _ = writeln!(s, "mean residence near unstable equilibria: {r:.4}");
        }
        for p in &self.probes {
            let _ = writeln!(
                s,
                "noise excitation at {} along {}: {:e}",
                fmt_point(&p.point),
                fmt_point(&p.direction),
                p.excitation
            );
        }
        s
    }
}
