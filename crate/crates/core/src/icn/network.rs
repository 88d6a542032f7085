use super::genome::Genome;
use super::ops::{Aggregation, Arithmetic, Comparison, Transformation};
use crate::concepts::ConstraintInstance;
use crate::error::{Error, Result};

/// Constants the network may compare against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EvalContext {
    pub n: usize,
    pub d: u64,
    pub p: i64,
    pub lo: i64,
}

impl EvalContext {
    pub fn of(c: &ConstraintInstance) -> Self {
        EvalContext {
            n: c.n(),
            d: c.d(),
            p: c.p(),
            lo: c.domain().lo,
        }
    }
}

/// A valid genome bound to an evaluation context.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ErrorFunction {
    genome: Genome,
    ctx: EvalContext,
}

/// Result of one evaluation, with the saturation diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Evaluation {
    pub value: u64,
    pub saturated: bool,
}

impl ErrorFunction {
    pub fn new(genome: Genome, ctx: EvalContext) -> Result<Self> {
        if !genome.validate() {
            return Err(Error::input(format!(
                "invalid genome {}",
                genome.to_bit_string()
            )));
        }
        Ok(ErrorFunction { genome, ctx })
    }

    pub fn genome(&self) -> Genome {
        self.genome
    }

    pub fn ctx(&self) -> &EvalContext {
        &self.ctx
    }

    /// Same genome, different context (scope size independence).
    pub fn with_ctx(&self, ctx: EvalContext) -> Self {
        ErrorFunction {
            genome: self.genome,
            ctx,
        }
    }

    pub fn evaluate(&self, x: &[i64]) -> Result<u64> {
        Ok(self.evaluate_traced(x)?.value)
    }

    /// Feed-forward pass through the four layers.
    pub fn evaluate_traced(&self, x: &[i64]) -> Result<Evaluation> {
        if x.len() != self.ctx.n {
            return Err(Error::input(format!(
                "assignment has {} values, function expects {}",
                x.len(),
                self.ctx.n
            )));
        }
        let arithmetic = self.genome.arithmetic().expect("validated genome");
        let mut saturated = false;
        let mut acc: Option<Vec<i64>> = None;
        let mut scratch = vec![0; x.len()];
        for t in self.genome.transformations() {
            t.apply(x, &self.ctx, &mut scratch);
            match acc.as_mut() {
                None => acc = Some(scratch.clone()),
                Some(acc) => saturated |= arithmetic.fold_into(acc, &scratch),
            }
        }
        let combined = acc.expect("validated genome selects a transformation");
        let (y, s) = self
            .genome
            .aggregation()
            .expect("validated genome")
            .apply(&combined);
        saturated |= s;
        let value = self
            .genome
            .comparison()
            .expect("validated genome")
            .apply(y, &self.ctx);
        Ok(Evaluation { value, saturated })
    }

    pub fn describe(&self) -> String {
        describe(self.genome)
    }
}

/// Canonical rendering, e.g. `Count>0( count_eq_right )` or
/// `Euclid_p( Sum( identity ) )`. The identity comparison is left implicit, and
/// so is the arithmetic operation when a single transformation is selected.
pub fn describe(g: Genome) -> String {
    let arithmetic = g.arithmetic().map_or("?", |a| a.symbol());
    let inner = g
        .transformations()
        .map(|t| t.name())
        .collect::<Vec<_>>()
        .join(&format!(" {arithmetic} "));
    let agg = g.aggregation().map_or("?", |a| a.name());
    let body = format!("{agg}( {inner} )");
    match g.comparison() {
        Some(Comparison::Identity) => body,
        Some(c) => format!("{}( {body} )", c.name()),
        None => format!("?( {body} )"),
    }
}

/// Inverse of [`describe`]. A single-transformation description yields the
/// addition arithmetic bit, the canonical member of its equivalence class.
pub fn parse_description(s: &str) -> Result<Genome> {
    let err = || Error::input(format!("cannot parse description `{s}`"));
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let unwrap = |text: &str| -> Option<(String, String)> {
        let open = text.find('(')?;
        let inner = text.strip_suffix(')')?;
        Some((text[..open].to_string(), inner[open + 1..].to_string()))
    };
    let (outer, rest) = unwrap(&compact).ok_or_else(err)?;
    let (comparison, agg_name, inner) = match Aggregation::ALL.iter().find(|a| a.name() == outer) {
        Some(_) => (Comparison::Identity, outer, rest),
        None => {
            let cmp = Comparison::ALL
                .into_iter()
                .find(|c| c.name() == outer)
                .ok_or_else(err)?;
            let (agg, inner) = unwrap(&rest).ok_or_else(err)?;
            (cmp, agg, inner)
        }
    };
    let aggregation = Aggregation::ALL
        .into_iter()
        .find(|a| a.name() == agg_name)
        .ok_or_else(err)?;
    let arithmetic = if inner.contains('*') {
        Arithmetic::Mul
    } else {
        Arithmetic::Add
    };
    let transformations = inner
        .split(['+', '*'])
        .map(|name| Transformation::from_name(name).ok_or_else(err))
        .collect::<Result<Vec<_>>>()?;
    if inner.contains('+') && inner.contains('*') {
        return Err(err());
    }
    let g = Genome::from_ops(&transformations, arithmetic, aggregation, comparison);
    if g.transformations().count() != transformations.len() {
        return Err(err());
    }
    Ok(g)
}

/// Maps a genome to the representative its description denotes.
pub fn canonical(g: Genome) -> Genome {
    if g.validate() && g.transformations().count() == 1 {
        Genome::from_ops(
            &g.transformations().collect::<Vec<_>>(),
            Arithmetic::Add,
            g.aggregation().unwrap(),
            g.comparison().unwrap(),
        )
    } else {
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concepts::ConstraintKind;
    use proptest::prelude::*;

    pub(crate) fn alldiff_genome() -> Genome {
        Genome::from_ops(
            &[Transformation::CountEqRight],
            Arithmetic::Add,
            Aggregation::CountPositive,
            Comparison::Identity,
        )
    }

    fn linearsum_genome() -> Genome {
        Genome::from_ops(
            &[Transformation::Identity],
            Arithmetic::Add,
            Aggregation::Sum,
            Comparison::EuclidParam,
        )
    }

    fn ctx_of(kind: ConstraintKind, n: usize, lo: i64, hi: i64, p: i64) -> EvalContext {
        EvalContext::of(&ConstraintInstance::new(kind, n, lo, hi, p).unwrap())
    }

    #[test]
    fn evaluate_examples() {
        let ad = ErrorFunction::new(
            alldiff_genome(),
            ctx_of(ConstraintKind::AllDifferent, 4, 1, 4, 0),
        )
        .unwrap();
        assert_eq!(ad.evaluate(&[1, 1, 2, 3]).unwrap(), 1);
        assert_eq!(ad.evaluate(&[1, 2, 3, 4]).unwrap(), 0);
        assert!(ad.evaluate(&[1, 2, 3]).is_err());

        let ls = ErrorFunction::new(
            linearsum_genome(),
            ctx_of(ConstraintKind::LinearSum, 3, 1, 3, 6),
        )
        .unwrap();
        assert_eq!(ls.evaluate(&[1, 2, 3]).unwrap(), 0);
        assert_eq!(ls.evaluate(&[3, 3, 3]).unwrap(), 1);
    }

    #[test]
    fn invalid_genome_rejected() {
        assert!(
            ErrorFunction::new(Genome::EMPTY, ctx_of(ConstraintKind::Ordered, 3, 1, 3, 0)).is_err()
        );
    }

    #[test]
    fn saturation_is_flagged() {
        let g = Genome::from_ops(
            &[
                Transformation::Identity,
                Transformation::MaxNext,
                Transformation::MinNext,
            ],
            Arithmetic::Mul,
            Aggregation::Sum,
            Comparison::Identity,
        );
        let c = ConstraintInstance::new(ConstraintKind::Ordered, 3, 1, 10_000, 0).unwrap();
        let f = ErrorFunction::new(g, EvalContext::of(&c)).unwrap();
        let e = f.evaluate_traced(&[10_000, 10_000, 10_000]).unwrap();
        assert!(e.saturated);
        assert_eq!(e.value, super::super::ops::CEILING as u64);
        assert!(!f.evaluate_traced(&[1, 2, 3]).unwrap().saturated);
    }

    #[test]
    fn describe_examples() {
        assert_eq!(describe(alldiff_genome()), "Count>0( count_eq_right )");
        assert_eq!(describe(linearsum_genome()), "Euclid_p( Sum( identity ) )");
        let two = Genome::from_ops(
            &[Transformation::Identity, Transformation::CountEq],
            Arithmetic::Mul,
            Aggregation::Sum,
            Comparison::DistVars,
        );
        assert_eq!(describe(two), "Abs_n( Sum( identity * count_eq ) )");
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            parse_description("Count>0(count_eq_right)").unwrap(),
            alldiff_genome()
        );
        assert_eq!(
            parse_description("Euclid_p( Sum( identity ) )").unwrap(),
            linearsum_genome()
        );
        assert!(parse_description("Count>0( nope )").is_err());
        assert!(parse_description("Sum( identity + identity )").is_err());
        assert!(parse_description("Sum( identity + eq_p * lt_p )").is_err());
    }

    proptest! {
        #[test]
        fn describe_parse_round_trip(mask in 0u32..(1 << 31), s in any::<u64>()) {
            let g = Genome::from_mask(mask).repair(&mut crate::seed::rng(s));
            let back = parse_description(&describe(g)).unwrap();
            prop_assert_eq!(back, canonical(g));
            prop_assert_eq!(describe(back), describe(g));
        }
    }
}
