//! Exact and approximate Hamming costs: distance to the nearest solution.

use crate::concepts::ConstraintInstance;
use crate::error::{Error, Result};
use crate::spaces::{self, LabeledSpace};

/// Solutions of a constraint; `exhaustive` when it holds every solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionSet {
    constraint: ConstraintInstance,
    solutions: Vec<Vec<i64>>,
    exhaustive: bool,
}

impl SolutionSet {
    /// All solutions, by enumerating the complete space.
    pub fn enumerate(c: &ConstraintInstance, cap: u64) -> Result<Self> {
        let solutions = spaces::for_each_assignment(c, cap, |x| c.holds(x).then(|| x.to_vec()))?;
        Ok(SolutionSet {
            constraint: *c,
            solutions,
            exhaustive: true,
        })
    }

    /// A partial set of solutions, e.g. the sampled ones. Every member is checked.
    pub fn sampled(c: &ConstraintInstance, solutions: Vec<Vec<i64>>) -> Result<Self> {
        for s in &solutions {
            if !c.concept_holds(s)? {
                return Err(Error::input(format!("{s:?} is not a solution of {c}")));
            }
        }
        Ok(SolutionSet {
            constraint: *c,
            solutions,
            exhaustive: false,
        })
    }

    /// The solutions already present in a labeled space.
    pub fn from_space(space: &LabeledSpace) -> Self {
        SolutionSet {
            constraint: space.constraint,
            solutions: space
                .entries
                .iter()
                .filter(|e| e.label)
                .map(|e| e.assignment.clone())
                .collect(),
            exhaustive: space.complete,
        }
    }

    pub fn constraint(&self) -> &ConstraintInstance {
        &self.constraint
    }

    pub fn solutions(&self) -> &[Vec<i64>] {
        &self.solutions
    }

    pub fn is_exhaustive(&self) -> bool {
        self.exhaustive
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    /// Adds a solution; the set stops being exhaustive only if it was not already.
    pub fn push(&mut self, s: Vec<i64>) -> Result<()> {
        if !self.constraint.concept_holds(&s)? {
            return Err(Error::input(format!("{s:?} is not a solution")));
        }
        self.solutions.push(s);
        Ok(())
    }

    /// Smallest disagreement count against any member. A non-solution is at
    /// distance at least 1 from every member, so the scan stops there.
    fn nearest(&self, x: &[i64]) -> Result<u64> {
        if self.solutions.is_empty() {
            return Err(Error::Unsatisfiable(self.constraint.to_string()));
        }
        self.constraint.check_assignment(x)?;
        let floor = if self.constraint.holds(x) { 0 } else { 1 };
        let mut best = usize::MAX;
        for s in &self.solutions {
            let mut dist = 0usize;
            for (a, b) in x.iter().zip(s) {
                if a != b {
                    dist += 1;
                    if dist >= best {
                        break;
                    }
                }
            }
            if dist < best {
                best = dist;
                if best <= floor {
                    break;
                }
            }
        }
        Ok(best as u64)
    }
}

/// Exact Hamming cost against an exhaustive solution set.
pub fn exact_hamming(x: &[i64], s: &SolutionSet) -> Result<u64> {
    if !s.exhaustive {
        return Err(Error::input(
            "exact Hamming cost needs an exhaustive solution set",
        ));
    }
    s.nearest(x)
}

/// Hamming distance to the closest known solution; an upper bound on the exact cost.
pub fn approx_hamming(x: &[i64], s: &SolutionSet) -> Result<u64> {
    s.nearest(x)
}

/// Fills every entry's cost from `s`: exact on complete spaces, approximate otherwise.
pub fn label_space_costs(space: &LabeledSpace, s: &SolutionSet) -> Result<LabeledSpace> {
    if s.exhaustive != space.complete {
        return Err(Error::input(format!(
            "solution set exhaustive={} does not match space complete={}",
            s.exhaustive, space.complete
        )));
    }
    if s.constraint != space.constraint {
        return Err(Error::input(
            "solution set and space describe different constraints",
        ));
    }
    let mut out = space.clone();
    for e in &mut out.entries {
        e.cost = Some(if e.label {
            0
        } else if space.complete {
            exact_hamming(&e.assignment, s)?
        } else {
            approx_hamming(&e.assignment, s)?
        });
    }
    Ok(out)
}

/// Fills costs from the per-kind closed form, for scopes too large to enumerate.
pub fn label_space_reference_costs(space: &LabeledSpace) -> Result<LabeledSpace> {
    let c = space.constraint;
    let mut out = space.clone();
    for e in &mut out.entries {
        let cost = c
            .closed_form_hamming(&e.assignment)?
            .ok_or_else(|| Error::input(format!("{} has no closed-form Hamming cost", c.kind())))?;
        e.cost = Some(cost);
    }
    Ok(out)
}
