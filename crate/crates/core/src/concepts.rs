//! Constraint kinds, instances and their concepts (validity predicates).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hamming::SolutionSet;

/// The five supported global constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintKind {
    AllDifferent,
    LinearSum,
    Minimum,
    NoOverlap1D,
    Ordered,
}

impl ConstraintKind {
    pub const ALL: [ConstraintKind; 5] = [
        ConstraintKind::AllDifferent,
        ConstraintKind::LinearSum,
        ConstraintKind::Minimum,
        ConstraintKind::NoOverlap1D,
        ConstraintKind::Ordered,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConstraintKind::AllDifferent => "alldifferent",
            ConstraintKind::LinearSum => "linearsum",
            ConstraintKind::Minimum => "minimum",
            ConstraintKind::NoOverlap1D => "nooverlap1d",
            ConstraintKind::Ordered => "ordered",
        }
    }

    /// Whether the parameter `p` carries meaning for this kind.
    pub fn uses_parameter(self) -> bool {
        matches!(
            self,
            ConstraintKind::LinearSum | ConstraintKind::Minimum | ConstraintKind::NoOverlap1D
        )
    }
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConstraintKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| *c != '_' && *c != '-')
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "alldifferent" | "alldiff" => Ok(ConstraintKind::AllDifferent),
            "linearsum" | "sum" => Ok(ConstraintKind::LinearSum),
            "minimum" | "min" => Ok(ConstraintKind::Minimum),
            "nooverlap1d" | "nooverlap" => Ok(ConstraintKind::NoOverlap1D),
            "ordered" => Ok(ConstraintKind::Ordered),
            _ => Err(Error::input(format!("unknown constraint kind `{s}`"))),
        }
    }
}

/// Closed integer interval of values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Domain {
    pub lo: i64,
    pub hi: i64,
}

impl Domain {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(Error::input(format!("empty domain [{lo}, {hi}]")));
        }
        Ok(Domain { lo, hi })
    }

    pub fn size(&self) -> u64 {
        (self.hi - self.lo) as u64 + 1
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn values(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi
    }
}

/// A constraint of a given kind over `n` variables sharing one domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConstraintInstance {
    kind: ConstraintKind,
    n: usize,
    domain: Domain,
    p: i64,
}

impl ConstraintInstance {
    pub fn new(kind: ConstraintKind, n: usize, lo: i64, hi: i64, p: i64) -> Result<Self> {
        let domain = Domain::new(lo, hi)?;
        if n < 2 {
            return Err(Error::input(format!(
                "scope size must be at least 2, got {n}"
            )));
        }
        if domain.size() < 2 {
            return Err(Error::input(format!(
                "domain size must be at least 2, got [{lo}, {hi}]"
            )));
        }
        if !kind.uses_parameter() && p != 0 {
            return Err(Error::input(format!(
                "{kind} takes no parameter, expected p=0"
            )));
        }
        if kind == ConstraintKind::NoOverlap1D && p < 1 {
            return Err(Error::input(format!(
                "task length must be at least 1, got {p}"
            )));
        }
        Ok(ConstraintInstance { kind, n, domain, p })
    }

    pub fn kind(&self) -> ConstraintKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn d(&self) -> u64 {
        self.domain.size()
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    /// Parses `kind=<name> n=<int> lo=<int> hi=<int> p=<int>`; `p` defaults to 0.
    pub fn parse_config(line: &str) -> Result<Self> {
        let mut kind = None;
        let (mut n, mut lo, mut hi, mut p) = (None, None, None, 0i64);
        for token in line.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| Error::input(format!("expected key=value, got `{token}`")))?;
            let int = || {
                value
                    .parse::<i64>()
                    .map_err(|_| Error::input(format!("`{key}` expects an integer, got `{value}`")))
            };
            match key {
                "kind" => kind = Some(value.parse::<ConstraintKind>()?),
                "n" => n = Some(int()?),
                "lo" => lo = Some(int()?),
                "hi" => hi = Some(int()?),
                "p" => p = int()?,
                _ => return Err(Error::input(format!("unknown key `{key}`"))),
            }
        }
        let missing = |k: &str| Error::input(format!("missing `{k}`"));
        let n = n.ok_or_else(|| missing("n"))?;
        if n < 0 {
            return Err(Error::input("n must be positive"));
        }
        ConstraintInstance::new(
            kind.ok_or_else(|| missing("kind"))?,
            n as usize,
            lo.ok_or_else(|| missing("lo"))?,
            hi.ok_or_else(|| missing("hi"))?,
            p,
        )
    }

    /// Checks arity and domain membership.
    pub fn check_assignment(&self, x: &[i64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::input(format!(
                "assignment has {} values, constraint scope has {}",
                x.len(),
                self.n
            )));
        }
        if let Some(v) = x.iter().find(|v| !self.domain.contains(**v)) {
            return Err(Error::input(format!(
                "value {v} outside domain [{}, {}]",
                self.domain.lo, self.domain.hi
            )));
        }
        Ok(())
    }

    /// The concept: does `x` satisfy the constraint?
    pub fn concept_holds(&self, x: &[i64]) -> Result<bool> {
        self.check_assignment(x)?;
        Ok(self.holds(x))
    }

    /// Concept without input validation, for hot loops.
    pub fn holds(&self, x: &[i64]) -> bool {
        match self.kind {
            ConstraintKind::AllDifferent => all_distinct(x),
            ConstraintKind::LinearSum => x.iter().sum::<i64>() == self.p,
            ConstraintKind::Minimum => x.iter().all(|v| *v >= self.p),
            ConstraintKind::NoOverlap1D => no_overlap(x, self.p),
            ConstraintKind::Ordered => x.windows(2).all(|w| w[0] <= w[1]),
        }
    }

    /// Exact Hamming cost from a per-kind closed form, falling back on the
    /// enumeration oracle where no closed form applies.
    pub fn hamming_reference(&self, x: &[i64]) -> Result<u64> {
        self.check_assignment(x)?;
        match self.closed_form_hamming(x)? {
            Some(cost) => Ok(cost),
            None => {
                let solutions =
                    SolutionSet::enumerate(self, crate::spaces::DEFAULT_ENUMERATION_CAP)?;
                crate::hamming::exact_hamming(x, &solutions)
            }
        }
    }

    /// Closed-form Hamming cost, or `None` when the kind (or instance) has none.
    ///
    /// Unlike [`hamming_reference`](Self::hamming_reference) this never
    /// enumerates, so it is usable at any scope size.
    pub fn closed_form_hamming(&self, x: &[i64]) -> Result<Option<u64>> {
        let n = x.len() as u64;
        Ok(match self.kind {
            ConstraintKind::AllDifferent if self.d() >= n => Some(n - distinct_count(x) as u64),
            ConstraintKind::AllDifferent => None,
            ConstraintKind::Minimum => {
                if self.p > self.domain.hi {
                    return Err(Error::Unsatisfiable(self.to_string()));
                }
                Some(x.iter().filter(|v| **v < self.p).count() as u64)
            }
            ConstraintKind::Ordered => Some(n - longest_nondecreasing(x) as u64),
            ConstraintKind::LinearSum => Some(self.linear_sum_distance(x)?),
            ConstraintKind::NoOverlap1D => None,
        })
    }

    /// Fewest reassignments bringing the sum to `p`: the shift needed is covered
    /// greedily by the variables with the most room to move in that direction.
    fn linear_sum_distance(&self, x: &[i64]) -> Result<u64> {
        let gap = self.p - x.iter().sum::<i64>();
        if gap == 0 {
            return Ok(0);
        }
        let mut room: Vec<i64> = x
            .iter()
            .map(|v| {
                if gap > 0 {
                    self.domain.hi - v
                } else {
                    v - self.domain.lo
                }
            })
            .collect();
        room.sort_unstable_by(|a, b| b.cmp(a));
        let mut covered = 0i64;
        for (k, r) in room.iter().enumerate() {
            covered += r;
            if covered >= gap.abs() {
                return Ok(k as u64 + 1);
            }
        }
        Err(Error::Unsatisfiable(self.to_string()))
    }
}

impl fmt::Display for ConstraintInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "kind={} n={} lo={} hi={} p={}",
            self.kind, self.n, self.domain.lo, self.domain.hi, self.p
        )
    }
}

impl FromStr for ConstraintInstance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConstraintInstance::parse_config(s)
    }
}

fn all_distinct(x: &[i64]) -> bool {
    if x.len() <= 32 {
        x.iter()
            .enumerate()
            .all(|(i, a)| x[i + 1..].iter().all(|b| a != b))
    } else {
        distinct_count(x) == x.len()
    }
}

fn no_overlap(x: &[i64], len: i64) -> bool {
    if x.len() <= 32 {
        x.iter()
            .enumerate()
            .all(|(i, a)| x[i + 1..].iter().all(|b| (a - b).abs() >= len))
    } else {
        let mut sorted = x.to_vec();
        sorted.sort_unstable();
        sorted.windows(2).all(|w| w[1] - w[0] >= len)
    }
}

pub(crate) fn distinct_count(x: &[i64]) -> usize {
    let mut sorted = x.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.len()
}

/// Length of the longest nondecreasing subsequence (patience sorting).
fn longest_nondecreasing(x: &[i64]) -> usize {
    let mut tails: Vec<i64> = Vec::with_capacity(x.len());
    for &v in x {
        let pos = tails.partition_point(|t| *t <= v);
        if pos == tails.len() {
            tails.push(v);
        } else {
            tails[pos] = v;
        }
    }
    tails.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ConstraintKind::*;

    fn c(kind: ConstraintKind, n: usize, lo: i64, hi: i64, p: i64) -> ConstraintInstance {
        ConstraintInstance::new(kind, n, lo, hi, p).unwrap()
    }

    #[test]
    fn concept_examples() {
        assert!(c(AllDifferent, 3, 1, 3, 0)
            .concept_holds(&[1, 2, 3])
            .unwrap());
        assert!(c(LinearSum, 3, 1, 3, 6).concept_holds(&[1, 2, 3]).unwrap());
        let nov = c(NoOverlap1D, 3, 0, 4, 2);
        assert!(nov.concept_holds(&[0, 2, 4]).unwrap());
        assert!(!nov.concept_holds(&[0, 1, 4]).unwrap());
        assert!(!c(Ordered, 2, 1, 3, 0).concept_holds(&[2, 1]).unwrap());
        assert!(c(Minimum, 3, 1, 5, 2).concept_holds(&[2, 5, 3]).unwrap());
        assert!(!c(Minimum, 3, 1, 5, 2).concept_holds(&[2, 1, 3]).unwrap());
    }

    #[test]
    fn concept_rejects_bad_input() {
        let ad = c(AllDifferent, 3, 1, 3, 0);
        assert!(matches!(ad.concept_holds(&[1, 2]), Err(Error::Input(_))));
        assert!(matches!(ad.concept_holds(&[1, 2, 9]), Err(Error::Input(_))));
    }

    #[test]
    fn instance_validation() {
        assert!(ConstraintInstance::new(AllDifferent, 1, 1, 3, 0).is_err());
        assert!(ConstraintInstance::new(AllDifferent, 3, 1, 1, 0).is_err());
        assert!(ConstraintInstance::new(AllDifferent, 3, 3, 1, 0).is_err());
        assert!(ConstraintInstance::new(Ordered, 3, 1, 3, 2).is_err());
        assert!(ConstraintInstance::new(NoOverlap1D, 3, 1, 3, 0).is_err());
        assert!("bogus".parse::<ConstraintKind>().is_err());
    }

    #[test]
    fn reference_examples() {
        assert_eq!(
            c(AllDifferent, 4, 1, 4, 0)
                .hamming_reference(&[1, 1, 2, 3])
                .unwrap(),
            1
        );
        assert_eq!(
            c(Minimum, 3, 1, 5, 3)
                .hamming_reference(&[1, 2, 5])
                .unwrap(),
            2
        );
        assert_eq!(
            c(Ordered, 4, 1, 4, 0)
                .hamming_reference(&[1, 3, 2, 4])
                .unwrap(),
            1
        );
    }

    #[test]
    fn alldifferent_short_domain_falls_back_to_oracle() {
        let ad = c(AllDifferent, 3, 1, 2, 0);
        assert_eq!(ad.closed_form_hamming(&[1, 1, 2]).unwrap(), None);
        assert!(matches!(
            ad.hamming_reference(&[1, 1, 2]),
            Err(Error::Unsatisfiable(_))
        ));
    }

    #[test]
    fn config_line_round_trip() {
        let inst = ConstraintInstance::parse_config("kind=linearsum n=12 lo=1 hi=10 p=66").unwrap();
        assert_eq!(inst, c(LinearSum, 12, 1, 10, 66));
        assert_eq!(
            inst.to_string().parse::<ConstraintInstance>().unwrap(),
            inst
        );
        assert_eq!(
            ConstraintInstance::parse_config("kind=alldiff n=4 lo=1 hi=5").unwrap(),
            c(AllDifferent, 4, 1, 5, 0)
        );
        assert!(ConstraintInstance::parse_config("kind=alldiff n=4 lo=1").is_err());
        assert!(ConstraintInstance::parse_config("kind=alldiff n=4 lo=1 hi=5 q=1").is_err());
    }

    #[test]
    fn lnds() {
        assert_eq!(longest_nondecreasing(&[1, 3, 2, 4]), 3);
        assert_eq!(longest_nondecreasing(&[2, 2, 1, 2]), 3);
        assert_eq!(longest_nondecreasing(&[5, 4, 3]), 1);
    }
}
