//! Constraint assignment spaces: complete enumeration, Latin hypercube
//! sampling and balanced solution/non-solution sampling, plus the
//! line-oriented space file format.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::concepts::{ConstraintInstance, ConstraintKind};
use crate::error::{Error, Result};
use crate::seed::{self, Rng};

pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;
pub const DEFAULT_DRAW_BUDGET: u64 = 100_000_000;

/// One labeled assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub assignment: Vec<i64>,
    pub label: bool,
    pub cost: Option<u64>,
}

/// A set of assignments labeled by the concept, with optional Hamming costs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSpace {
    pub constraint: ConstraintInstance,
    pub entries: Vec<Entry>,
    pub complete: bool,
}

impl LabeledSpace {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn solution_count(&self) -> usize {
        self.entries.iter().filter(|e| e.label).count()
    }

    pub fn has_costs(&self) -> bool {
        self.entries.iter().all(|e| e.cost.is_some())
    }

    /// Re-checks every label against the concept.
    pub fn labels_consistent(&self) -> bool {
        self.entries
            .iter()
            .all(|e| self.constraint.holds(&e.assignment) == e.label)
    }

    pub fn costs(&self) -> Result<Vec<u64>> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, e)| e.cost.ok_or(Error::MissingCost(i)))
            .collect()
    }

    /// Serializes to the space file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "# constraint {} complete={}",
            self.constraint,
            u8::from(self.complete)
        )
        .unwrap();
        for e in &self.entries {
            let mut first = true;
            for v in &e.assignment {
                if !first {
                    out.push(' ');
                }
                first = false;
                write!(out, "{v}").unwrap();
            }
            write!(out, " | {} | ", u8::from(e.label)).unwrap();
            match e.cost {
                Some(c) => writeln!(out, "{c}").unwrap(),
                None => out.push_str("-\n"),
            }
        }
        out
    }

    /// Parses the space file format. Labels are re-checked against the concept.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty file".into(),
        })?;
        let header_err = |msg: &str| Error::Parse {
            line: 1,
            msg: msg.to_string(),
        };
        let rest = header
            .strip_prefix("# constraint ")
            .ok_or_else(|| header_err("expected `# constraint ...` header"))?;
        let (config, complete) = rest
            .rsplit_once(" complete=")
            .ok_or_else(|| header_err("missing complete= flag"))?;
        let complete = match complete {
            "0" => false,
            "1" => true,
            _ => return Err(header_err("complete= must be 0 or 1")),
        };
        let constraint = ConstraintInstance::parse_config(config).map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })?;

        let mut entries = Vec::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            let err = |msg: String| Error::Parse { line: lineno, msg };
            let mut fields = line.split(" | ");
            let (Some(values), Some(label), Some(cost), None) =
                (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(err("expected `values | label | cost`".into()));
            };
            let assignment = values
                .split(' ')
                .map(|v| {
                    v.parse::<i64>()
                        .map_err(|_| err(format!("bad value `{v}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            constraint
                .check_assignment(&assignment)
                .map_err(|e| err(e.to_string()))?;
            let label = match label {
                "0" => false,
                "1" => true,
                _ => return Err(err(format!("bad label `{label}`"))),
            };
            if label != constraint.holds(&assignment) {
                return Err(err("label disagrees with the concept".into()));
            }
            let cost = match cost {
                "-" => None,
                c => Some(
                    c.parse::<u64>()
                        .map_err(|_| err(format!("bad cost `{c}`")))?,
                ),
            };
            entries.push(Entry {
                assignment,
                label,
                cost,
            });
        }
        Ok(LabeledSpace {
            constraint,
            entries,
            complete,
        })
    }
}

fn entry(c: &ConstraintInstance, assignment: Vec<i64>) -> Entry {
    let label = c.holds(&assignment);
    Entry {
        assignment,
        label,
        cost: None,
    }
}

/// Number of assignments `d^n`, if it fits in a `u64`.
pub fn space_size(c: &ConstraintInstance) -> Option<u64> {
    u32::try_from(c.n()).ok().and_then(|n| c.d().checked_pow(n))
}

/// Enumerates all `d^n` assignments in lexicographic order.
pub fn enumerate_complete(c: &ConstraintInstance) -> Result<LabeledSpace> {
    enumerate_complete_with_cap(c, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_complete_with_cap(c: &ConstraintInstance, cap: u64) -> Result<LabeledSpace> {
    let entries = for_each_assignment(c, cap, |x| Some(entry(c, x.to_vec())))?;
    Ok(LabeledSpace {
        constraint: *c,
        entries,
        complete: true,
    })
}

/// Walks every assignment lexicographically, collecting what `f` returns.
pub(crate) fn for_each_assignment<T>(
    c: &ConstraintInstance,
    cap: u64,
    mut f: impl FnMut(&[i64]) -> Option<T>,
) -> Result<Vec<T>> {
    let too_large = || Error::SpaceTooLarge {
        domain_size: c.d(),
        arity: c.n(),
        cap,
    };
    let size = space_size(c).ok_or_else(too_large)?;
    if size > cap {
        return Err(too_large());
    }
    let dom = c.domain();
    let mut x = vec![dom.lo; c.n()];
    let mut out = Vec::new();
    loop {
        if let Some(t) = f(&x) {
            out.push(t);
        }
        // odometer increment, last position fastest
        let mut i = x.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if x[i] < dom.hi {
                x[i] += 1;
                break;
            }
            x[i] = dom.lo;
        }
    }
}

/// Generates Latin hypercube batches over a constraint's assignment space.
///
/// A batch of `b <= d` samples splits every variable's domain into `b`
/// contiguous strata and gives each stratum to exactly one sample, through an
/// independent random permutation per variable.
pub struct LhsSampler {
    n: usize,
    lo: i64,
    d: u64,
    batch: usize,
    perm: Vec<usize>,
    buf: Vec<i64>,
}

impl LhsSampler {
    /// Batch size defaults to the domain size.
    pub fn new(c: &ConstraintInstance, batch_size: Option<usize>) -> Self {
        let d = c.d();
        let batch = batch_size
            .unwrap_or(usize::MAX)
            .clamp(1, usize::try_from(d).unwrap_or(usize::MAX));
        LhsSampler {
            n: c.n(),
            lo: c.domain().lo,
            d,
            batch,
            perm: (0..batch).collect(),
            buf: vec![0; batch * c.n()],
        }
    }

    pub fn batch_size(&self) -> usize {
        self.batch
    }

    /// Fills the next batch; rows are samples, `n` values each.
    pub fn next_batch(&mut self, rng: &mut Rng) -> &[i64] {
        let b = self.batch as u64;
        let single_values = b == self.d;
        for var in 0..self.n {
            self.perm.shuffle(rng);
            for (row, &stratum) in self.perm.iter().enumerate() {
                let s = stratum as u64;
                let offset = if single_values {
                    s
                } else {
                    let start = s * self.d / b;
                    let end = (s + 1) * self.d / b;
                    rng.gen_range(start..end)
                };
                self.buf[row * self.n + var] = self.lo + offset as i64;
            }
        }
        &self.buf
    }
}

/// Draws `count` assignments by Latin hypercube batches (the last batch truncated).
pub fn lhs_sample(c: &ConstraintInstance, count: usize, rng_seed: u64) -> Result<Vec<Vec<i64>>> {
    if count == 0 {
        return Err(Error::input("sample count must be at least 1"));
    }
    let mut rng = seed::rng(rng_seed);
    let mut sampler = LhsSampler::new(c, None);
    let n = c.n();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let batch = sampler.next_batch(&mut rng);
        for row in batch.chunks_exact(n) {
            if out.len() == count {
                break;
            }
            out.push(row.to_vec());
        }
    }
    Ok(out)
}

/// Options for [`sample_balanced_with`].
#[derive(Debug, Clone, Copy)]
pub struct SamplingOptions {
    /// Maximum number of Latin hypercube draws.
    pub budget: u64,
    pub batch_size: Option<usize>,
    /// Draw solutions from a uniform direct generator when the kind has one,
    /// for scopes where solutions are too rare to hit by sampling.
    pub direct_solutions: bool,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        SamplingOptions {
            budget: DEFAULT_DRAW_BUDGET,
            batch_size: None,
            direct_solutions: false,
        }
    }
}

/// Samples until `k` solutions and `k` non-solutions are found.
pub fn sample_balanced(c: &ConstraintInstance, k: usize, rng_seed: u64) -> Result<LabeledSpace> {
    sample_balanced_with(c, k, rng_seed, SamplingOptions::default())
}

pub fn sample_balanced_with(
    c: &ConstraintInstance,
    k: usize,
    rng_seed: u64,
    opts: SamplingOptions,
) -> Result<LabeledSpace> {
    if k == 0 {
        return Err(Error::input("k must be at least 1"));
    }
    let mut rng = seed::rng(rng_seed);
    let direct = if opts.direct_solutions {
        DirectSolutions::for_constraint(c)?
    } else {
        None
    };
    let want_solutions_from_lhs = direct.is_none();

    let mut entries = Vec::with_capacity(2 * k);
    let (mut solutions, mut non_solutions) = (0usize, 0usize);
    if let Some(gen) = &direct {
        for _ in 0..k {
            entries.push(Entry {
                assignment: gen.draw(&mut rng),
                label: true,
                cost: None,
            });
        }
        solutions = k;
    }

    let n = c.n();
    let mut sampler = LhsSampler::new(c, opts.batch_size);
    let mut draws = 0u64;
    'outer: while solutions < k || non_solutions < k {
        let batch = sampler.next_batch(&mut rng);
        for row in batch.chunks_exact(n) {
            if draws >= opts.budget {
                break 'outer;
            }
            draws += 1;
            let label = c.holds(row);
            let keep = if label {
                want_solutions_from_lhs && solutions < k
            } else {
                non_solutions < k
            };
            if keep {
                if label {
                    solutions += 1;
                } else {
                    non_solutions += 1;
                }
                entries.push(Entry {
                    assignment: row.to_vec(),
                    label,
                    cost: None,
                });
                if solutions == k && non_solutions == k {
                    break 'outer;
                }
            }
        }
    }
    if solutions < k || non_solutions < k {
        return Err(Error::SamplingExhausted {
            draws,
            wanted: k,
            solutions,
            non_solutions,
        });
    }
    Ok(LabeledSpace {
        constraint: *c,
        entries,
        complete: false,
    })
}

/// Uniform generators over the solutions of kinds that admit one.
enum DirectSolutions {
    Distinct { n: usize, values: Vec<i64> },
    Nondecreasing { n: usize, lo: i64, d: u64 },
    AtLeast { n: usize, lo: i64, hi: i64 },
}

impl DirectSolutions {
    fn for_constraint(c: &ConstraintInstance) -> Result<Option<Self>> {
        let dom = c.domain();
        Ok(match c.kind() {
            ConstraintKind::AllDifferent => {
                if c.d() < c.n() as u64 {
                    return Err(Error::Unsatisfiable(c.to_string()));
                }
                Some(DirectSolutions::Distinct {
                    n: c.n(),
                    values: dom.values().collect(),
                })
            }
            ConstraintKind::Ordered => Some(DirectSolutions::Nondecreasing {
                n: c.n(),
                lo: dom.lo,
                d: c.d(),
            }),
            ConstraintKind::Minimum => {
                if c.p() > dom.hi {
                    return Err(Error::Unsatisfiable(c.to_string()));
                }
                Some(DirectSolutions::AtLeast {
                    n: c.n(),
                    lo: c.p().max(dom.lo),
                    hi: dom.hi,
                })
            }
            ConstraintKind::LinearSum | ConstraintKind::NoOverlap1D => None,
        })
    }

    fn draw(&self, rng: &mut Rng) -> Vec<i64> {
        match self {
            DirectSolutions::Distinct { n, values } => {
                let mut v = values.clone();
                let (head, _) = v.partial_shuffle(rng, *n);
                head.to_vec()
            }
            DirectSolutions::Nondecreasing { n, lo, d } => {
                // stars and bars: n sorted distinct picks from n + d - 1 slots
                let slots = *n as u64 + d - 1;
                let mut picks = rand::seq::index::sample(rng, slots as usize, *n).into_vec();
                picks.sort_unstable();
                picks
                    .iter()
                    .enumerate()
                    .map(|(i, s)| lo + (*s - i) as i64)
                    .collect()
            }
            DirectSolutions::AtLeast { n, lo, hi } => {
                (0..*n).map(|_| rng.gen_range(*lo..=*hi)).collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ConstraintKind::*;

    fn c(kind: ConstraintKind, n: usize, lo: i64, hi: i64, p: i64) -> ConstraintInstance {
        ConstraintInstance::new(kind, n, lo, hi, p).unwrap()
    }

    #[test]
    fn enumeration_counts() {
        let s = enumerate_complete(&c(AllDifferent, 3, 1, 3, 0)).unwrap();
        assert_eq!((s.len(), s.solution_count()), (27, 6));
        let s = enumerate_complete(&c(Ordered, 2, 1, 2, 0)).unwrap();
        assert_eq!((s.len(), s.solution_count()), (4, 3));
        assert_eq!(s.entries[2].assignment, vec![2, 1]);
        assert!(!s.entries[2].label);
        let s = enumerate_complete(&c(AllDifferent, 4, 1, 5, 0)).unwrap();
        assert_eq!((s.len(), s.solution_count()), (625, 120));
        assert!(s.complete && s.labels_consistent());
    }

    #[test]
    fn enumeration_cap() {
        let err = enumerate_complete_with_cap(&c(AllDifferent, 4, 1, 5, 0), 624).unwrap_err();
        assert!(err.to_string().contains("5^4"));
        assert!(err.is_resource_cap());
        assert!(enumerate_complete(&c(AllDifferent, 100, 1, 100, 0)).is_err());
    }

    #[test]
    fn lhs_single_batch_is_latin() {
        let rows = lhs_sample(&c(AllDifferent, 2, 1, 4, 0), 4, 11).unwrap();
        for var in 0..2 {
            let mut col: Vec<i64> = rows.iter().map(|r| r[var]).collect();
            col.sort_unstable();
            assert_eq!(col, vec![1, 2, 3, 4]);
        }
    }

    #[test]
    fn lhs_two_batches_hit_every_value_twice() {
        let rows = lhs_sample(&c(AllDifferent, 100, 1, 100, 0), 200, 3).unwrap();
        assert_eq!(rows.len(), 200);
        for var in 0..100 {
            let mut hist = [0u32; 100];
            for r in &rows {
                hist[(r[var] - 1) as usize] += 1;
            }
            assert!(hist.iter().all(|h| *h == 2));
        }
    }

    #[test]
    fn lhs_small_batches_use_distinct_strata() {
        let inst = c(AllDifferent, 3, 1, 10, 0);
        let mut sampler = LhsSampler::new(&inst, Some(4));
        let mut rng = seed::rng(5);
        for _ in 0..50 {
            let batch = sampler.next_batch(&mut rng).to_vec();
            for var in 0..3 {
                let mut strata: Vec<i64> = batch
                    .chunks_exact(3)
                    .map(|r| (0..4).rfind(|s| s * 10 / 4 < r[var]).unwrap())
                    .collect();
                strata.sort_unstable();
                strata.dedup();
                assert_eq!(strata.len(), 4);
            }
        }
    }

    #[test]
    fn lhs_is_reproducible() {
        let inst = c(LinearSum, 5, 1, 9, 20);
        assert_eq!(
            lhs_sample(&inst, 37, 99).unwrap(),
            lhs_sample(&inst, 37, 99).unwrap()
        );
        assert_eq!(lhs_sample(&inst, 1, 99).unwrap().len(), 1);
        assert!(lhs_sample(&inst, 0, 99).is_err());
    }

    #[test]
    fn balanced_sampling() {
        let s = sample_balanced(&c(AllDifferent, 10, 1, 10, 0), 100, 1).unwrap();
        assert_eq!(s.len(), 200);
        assert_eq!(s.solution_count(), 100);
        assert!(!s.complete && s.labels_consistent());
    }

    #[test]
    fn balanced_sampling_exhausts_without_non_solutions() {
        let opts = SamplingOptions {
            budget: 10_000,
            ..Default::default()
        };
        let err = sample_balanced_with(&c(Minimum, 4, 1, 5, 0), 3, 1, opts).unwrap_err();
        match err {
            Error::SamplingExhausted {
                non_solutions,
                solutions,
                draws,
                ..
            } => {
                assert_eq!((non_solutions, solutions, draws), (0, 3, 10_000));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn direct_solutions_are_solutions() {
        let opts = SamplingOptions {
            direct_solutions: true,
            ..Default::default()
        };
        for inst in [
            c(AllDifferent, 100, 1, 100, 0),
            c(Ordered, 50, 1, 20, 0),
            c(Minimum, 30, 1, 10, 4),
        ] {
            let s = sample_balanced_with(&inst, 50, 2, opts).unwrap();
            assert_eq!(s.solution_count(), 50);
            assert_eq!(s.len(), 100);
            assert!(s.labels_consistent());
        }
    }

    #[test]
    fn file_round_trip() {
        let mut s = enumerate_complete(&c(Minimum, 2, -1, 1, 0)).unwrap();
        s.entries[0].cost = Some(2);
        let text = s.to_text();
        assert!(text.starts_with("# constraint kind=minimum n=2 lo=-1 hi=1 p=0 complete=1\n"));
        assert!(text.contains("\n-1 0 | 0 | -\n"));
        let back = LabeledSpace::from_text(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn file_rejects_wrong_label() {
        let text = "# constraint kind=ordered n=2 lo=1 hi=2 p=0 complete=0\n2 1 | 1 | -\n";
        assert!(matches!(
            LabeledSpace::from_text(text),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
