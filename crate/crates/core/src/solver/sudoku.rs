use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::model::{CspModel, EfspModel, ErrorFn, Model};
use crate::concepts::{ConstraintInstance, ConstraintKind, Domain};
use crate::error::{Error, Result};
use crate::icn::{self, canonical, describe, ErrorFunction, EvalContext, Genome};

/// How the AllDifferent constraints of a Sudoku model are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Plain predicates (CSP model).
    Predicate,
    /// Number of pairs of equal values.
    Handcrafted,
    /// A learned genome run through the network.
    IcnFeedforward,
    /// The same learned function written out directly.
    IcnHardcoded,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Predicate,
        Variant::Handcrafted,
        Variant::IcnFeedforward,
        Variant::IcnHardcoded,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Predicate => "predicate",
            Variant::Handcrafted => "handcrafted",
            Variant::IcnFeedforward => "feedforward",
            Variant::IcnHardcoded => "hardcoded",
        }
    }

    pub fn needs_genome(self) -> bool {
        matches!(self, Variant::IcnFeedforward | Variant::IcnHardcoded)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "predicate" | "csp" => Ok(Variant::Predicate),
            "handcrafted" => Ok(Variant::Handcrafted),
            "feedforward" | "icn_feedforward" => Ok(Variant::IcnFeedforward),
            "hardcoded" | "icn_hardcoded" => Ok(Variant::IcnHardcoded),
            _ => Err(Error::input(format!("unknown variant `{s}`"))),
        }
    }
}

/// Number of pairs `i < j` with equal values.
pub fn alldiff_primal_violation(x: &[i64]) -> u64 {
    let mut pairs = 0;
    for (i, a) in x.iter().enumerate() {
        for b in &x[i + 1..] {
            if a == b {
                pairs += 1;
            }
        }
    }
    pairs
}

/// `Count>0( count_eq_right )` written out.
fn count_repeated_later(x: &[i64]) -> u64 {
    let mut count = 0;
    for (i, a) in x.iter().enumerate() {
        if x[i + 1..].contains(a) {
            count += 1;
        }
    }
    count
}

/// `Count>0( count_eq_left )` written out.
fn count_repeated_earlier(x: &[i64]) -> u64 {
    let mut count = 0;
    for (i, a) in x.iter().enumerate() {
        if x[..i].contains(a) {
            count += 1;
        }
    }
    count
}

type Direct = fn(&[i64]) -> u64;

/// Direct implementation of a learned AllDifferent function, if one exists.
pub fn hardcoded_for(genome: Genome) -> Option<Direct> {
    use icn::ops::{Aggregation::*, Arithmetic::Add, Comparison::Identity, Transformation::*};
    let g = canonical(genome);
    let table: [(Genome, Direct); 3] = [
        (icn::alldifferent_genome(), count_repeated_later),
        (
            Genome::from_ops(&[CountEqLeft], Add, CountPositive, Identity),
            count_repeated_earlier,
        ),
        (
            Genome::from_ops(&[CountEqRight], Add, Sum, Identity),
            alldiff_primal_violation,
        ),
    ];
    table.into_iter().find(|(h, _)| *h == g).map(|(_, f)| f)
}

/// Cells of every row, column and block of a `k^2 x k^2` grid.
pub fn sudoku_scopes(k: usize) -> Vec<Vec<usize>> {
    let side = k * k;
    let mut scopes = Vec::with_capacity(3 * side);
    for r in 0..side {
        scopes.push((0..side).map(|c| r * side + c).collect());
    }
    for c in 0..side {
        scopes.push((0..side).map(|r| r * side + c).collect());
    }
    for br in 0..k {
        for bc in 0..k {
            scopes.push(
                (0..side)
                    .map(|i| (br * k + i / k) * side + bc * k + i % k)
                    .collect(),
            );
        }
    }
    scopes
}

/// Empty `k^2 x k^2` Sudoku with its AllDifferent constraints in the given form.
pub fn build_sudoku(k: usize, variant: Variant, genome: Option<Genome>) -> Result<Model> {
    if !(k == 3 || k == 4) {
        return Err(Error::input(format!(
            "Sudoku block size must be 3 or 4, got {k}"
        )));
    }
    let side = k * k;
    let domain = Domain::new(1, side as i64)?;
    let domains = vec![domain; side * side];
    let concept = ConstraintInstance::new(ConstraintKind::AllDifferent, side, 1, side as i64, 0)?;
    let scopes = sudoku_scopes(k);

    let error: ErrorFn = match variant {
        Variant::Predicate => {
            let mut m = CspModel::new(domains);
            for s in scopes {
                m.add(s, concept)?;
            }
            return Ok(Model::Csp(m));
        }
        Variant::Handcrafted => Arc::new(alldiff_primal_violation),
        Variant::IcnFeedforward | Variant::IcnHardcoded => {
            let g =
                genome.ok_or_else(|| Error::input(format!("variant {variant} needs a genome")))?;
            if variant == Variant::IcnHardcoded {
                let f = hardcoded_for(g).ok_or_else(|| {
                    Error::input(format!("no hard-coded implementation of {}", describe(g)))
                })?;
                Arc::new(f)
            } else {
                let f = ErrorFunction::new(g, EvalContext::of(&concept))?;
                Arc::new(move |x: &[i64]| f.evaluate(x).expect("scope arity matches context"))
            }
        }
    };
    let mut m = EfspModel::new(domains);
    for s in scopes {
        m.add(s, concept, error.clone())?;
    }
    Ok(Model::Efsp(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::model::SearchModel;
    use rand::Rng as _;

    #[test]
    fn primal_violation_examples() {
        assert_eq!(alldiff_primal_violation(&[1, 2, 3]), 0);
        assert_eq!(alldiff_primal_violation(&[1, 1, 1]), 3);
        assert_eq!(alldiff_primal_violation(&[1, 1, 2, 2]), 2);
    }

    #[test]
    fn structure() {
        let m = build_sudoku(3, Variant::Predicate, None).unwrap();
        assert_eq!(m.variable_count(), 81);
        assert_eq!(m.constraint_count(), 27);
        assert!((0..27).all(|c| m.scope(c).len() == 9));
        let m = build_sudoku(4, Variant::Handcrafted, None).unwrap();
        assert_eq!(m.variable_count(), 256);
        assert_eq!(m.constraint_count(), 48);
        assert!((0..48).all(|c| m.scope(c).len() == 16));
        // every cell in exactly one row, column and block
        let mut seen = vec![0; 81];
        for s in sudoku_scopes(3) {
            for v in s {
                seen[v] += 1;
            }
        }
        assert!(seen.iter().all(|c| *c == 3));
    }

    #[test]
    fn invalid_requests() {
        assert!(build_sudoku(2, Variant::Predicate, None).is_err());
        assert!(build_sudoku(3, Variant::IcnFeedforward, None).is_err());
        let no_direct_form = icn::linearsum_genome();
        assert!(build_sudoku(3, Variant::IcnHardcoded, Some(no_direct_form)).is_err());
        assert!(build_sudoku(3, Variant::IcnFeedforward, Some(no_direct_form)).is_ok());
    }

    #[test]
    fn hardcoded_matches_feed_forward() {
        let g = icn::alldifferent_genome();
        let Model::Efsp(ff) = build_sudoku(3, Variant::IcnFeedforward, Some(g)).unwrap() else {
            panic!("expected an EFSP model")
        };
        let Model::Efsp(hc) = build_sudoku(3, Variant::IcnHardcoded, Some(g)).unwrap() else {
            panic!("expected an EFSP model")
        };
        let mut rng = crate::seed::rng(1);
        for _ in 0..200 {
            let x: Vec<i64> = (0..9).map(|_| rng.gen_range(1..=9)).collect();
            assert_eq!(ff.cost(0, &x), hc.cost(0, &x));
        }
        let left = Genome::from_ops(
            &[icn::ops::Transformation::CountEqLeft],
            icn::ops::Arithmetic::Mul,
            icn::ops::Aggregation::CountPositive,
            icn::ops::Comparison::Identity,
        );
        assert!(hardcoded_for(left).is_some());
    }
}
