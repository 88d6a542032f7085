use std::fmt::Write as _;

use super::search::{solve, Status};
use super::sudoku::{build_sudoku, Variant};
use crate::error::Result;
use crate::icn::Genome;
use crate::seed;

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub status: Status,
    pub ms: f64,
    pub iterations: u64,
    pub restarts: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunStats {
    pub mean: f64,
    pub median: f64,
    pub std_dev: f64,
}

impl RunStats {
    /// Sample statistics; `None` for an empty slice.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len().is_multiple_of(2) {
            (sorted[mid - 1] + sorted[mid]) / 2.0
        } else {
            sorted[mid]
        };
        let std_dev = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(RunStats {
            mean,
            median,
            std_dev,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub k: usize,
    pub variant: Variant,
    pub records: Vec<RunRecord>,
}

impl BenchReport {
    pub fn timeouts(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.status == Status::Timeout)
            .count()
    }

    /// Run-time statistics over solved runs only.
    pub fn stats(&self) -> Option<RunStats> {
        let solved: Vec<f64> = self
            .records
            .iter()
            .filter(|r| r.status == Status::Solved)
            .map(|r| r.ms)
            .collect();
        RunStats::of(&solved)
    }

    pub fn csv_header() -> &'static str {
        "variant,k,run,seed,status,ms,iterations,restarts"
    }

    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{:.3},{},{}",
                self.variant,
                self.k,
                r.run,
                r.seed,
                r.status.name(),
                r.ms,
                r.iterations,
                r.restarts
            )
            .unwrap();
        }
        out
    }

    pub fn to_csv(&self) -> String {
        format!("{}\n{}", Self::csv_header(), self.csv_rows())
    }

    /// One summary line: mean, median and standard deviation, or `-` when absent.
    pub fn summary_line(&self) -> String {
        let side = self.k * self.k;
        let cells = match self.stats() {
            Some(s) => format!("{:>10.2} {:>10.2} {:>10.2}", s.mean, s.median, s.std_dev),
            None => format!("{:>10} {:>10} {:>10}", "-", "-", "-"),
        };
        format!(
            "{side}x{side}  {:<12} {cells}  timeouts={}/{}",
            self.variant.name(),
            self.timeouts(),
            self.records.len()
        )
    }
}

/// Runs `runs` independent solves; each gets its own model and a sub-seed
/// derived from `master_seed`. Runs are spread over `jobs` threads.
pub fn benchmark_sudoku(
    k: usize,
    variant: Variant,
    genome: Option<Genome>,
    runs: usize,
    timeout_ms: u64,
    master_seed: u64,
    jobs: usize,
) -> Result<BenchReport> {
    // fail early on a bad request
    build_sudoku(k, variant, genome)?;
    let one = |run: usize| -> Result<RunRecord> {
        let s = seed::derive(master_seed, run as u64);
        let model = build_sudoku(k, variant, genome)?;
        let out = solve(&model, timeout_ms, s);
        Ok(RunRecord {
            run,
            seed: s,
            status: out.status,
            ms: out.elapsed_ms,
            iterations: out.iterations,
            restarts: out.restarts,
        })
    };
    let jobs = jobs.clamp(1, runs.max(1));
    let records = if jobs == 1 {
        (0..runs).map(one).collect::<Result<Vec<_>>>()?
    } else {
        let runs_of: Vec<Vec<usize>> = (0..jobs)
            .map(|j| (j..runs).step_by(jobs).collect())
            .collect();
        let mut records = std::thread::scope(|s| {
            let handles: Vec<_> = runs_of
                .iter()
                .map(|mine| {
                    let one = &one;
                    s.spawn(move || mine.iter().map(|&r| one(r)).collect::<Result<Vec<_>>>())
                })
                .collect();
            let mut all = Vec::with_capacity(runs);
            for h in handles {
                all.extend(h.join().expect("benchmark thread panicked")?);
            }
            Ok::<_, crate::error::Error>(all)
        })?;
        records.sort_by_key(|r| r.run);
        records
    };
    Ok(BenchReport {
        k,
        variant,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_examples() {
        let s = RunStats::of(&[12.5]).unwrap();
        assert_eq!((s.mean, s.median, s.std_dev), (12.5, 12.5, 0.0));
        let s = RunStats::of(&[1.0, 2.0, 3.0, 10.0]).unwrap();
        assert_eq!(s.mean, 4.0);
        assert_eq!(s.median, 2.5);
        assert!((s.std_dev - 4.0825).abs() < 1e-4);
        assert!(RunStats::of(&[]).is_none());
    }

    #[test]
    fn all_timeouts_have_no_stats() {
        let report = BenchReport {
            k: 3,
            variant: Variant::Predicate,
            records: (0..3)
                .map(|run| RunRecord {
                    run,
                    seed: run as u64,
                    status: Status::Timeout,
                    ms: 10.0,
                    iterations: 1,
                    restarts: 0,
                })
                .collect(),
        };
        assert_eq!(report.timeouts(), 3);
        assert!(report.stats().is_none());
        assert!(report.summary_line().contains("timeouts=3/3"));
        assert_eq!(report.to_csv().lines().count(), 4);
    }

    #[test]
    fn single_run_benchmark() {
        let r = benchmark_sudoku(3, Variant::Handcrafted, None, 1, 10_000, 5, 1).unwrap();
        assert_eq!(r.records.len(), 1);
        assert_eq!(r.timeouts(), 0);
        let s = r.stats().unwrap();
        assert_eq!(s.mean, r.records[0].ms);
        assert_eq!(s.median, r.records[0].ms);
    }
}
