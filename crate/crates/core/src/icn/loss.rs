use super::genome::{Genome, GENOME_BITS};
use super::network::{ErrorFunction, EvalContext};
use super::ops::Transformation;
use crate::error::{Error, Result};
use crate::spaces::LabeledSpace;

/// Size penalty in `[0, 0.9]` proportional to the number of selected operations.
pub fn regularization(g: Genome) -> f64 {
    0.9 * f64::from(g.count_ones()) / GENOME_BITS as f64
}

/// Summed absolute deviation from the stored costs plus the size penalty.
pub fn loss(g: Genome, space: &LabeledSpace) -> Result<f64> {
    let f = ErrorFunction::new(g, EvalContext::of(&space.constraint))?;
    let mut deviation = 0u64;
    for (i, e) in space.entries.iter().enumerate() {
        let cost = e.cost.ok_or(Error::MissingCost(i))?;
        deviation += f.evaluate(&e.assignment)?.abs_diff(cost);
    }
    Ok(deviation as f64 + regularization(g))
}

/// Mean absolute deviation divided by the number of variables.
pub fn normalized_mean_error(f: &ErrorFunction, space: &LabeledSpace) -> Result<f64> {
    if space.is_empty() {
        return Err(Error::EmptySpace);
    }
    let f = f.with_ctx(EvalContext::of(&space.constraint));
    let mut total = 0u64;
    for (i, e) in space.entries.iter().enumerate() {
        let cost = e.cost.ok_or(Error::MissingCost(i))?;
        total += f.evaluate(&e.assignment)?.abs_diff(cost);
    }
    Ok(total as f64 / space.len() as f64 / space.constraint.n() as f64)
}

/// A training space with every transformation output computed once, so
/// that scoring a genome only combines, aggregates and compares.
#[derive(Debug, Clone)]
pub struct TransformTable {
    ctx: EvalContext,
    n: usize,
    /// `[entry][transformation][i]`, flattened.
    values: Vec<i64>,
    costs: Vec<u64>,
}

impl TransformTable {
    pub fn new(space: &LabeledSpace) -> Result<Self> {
        let costs = space.costs()?;
        let ctx = EvalContext::of(&space.constraint);
        let n = ctx.n;
        let stride = Transformation::ALL.len() * n;
        let mut values = vec![0i64; space.len() * stride];
        for (e, chunk) in space.entries.iter().zip(values.chunks_exact_mut(stride)) {
            for (t, out) in Transformation::ALL.iter().zip(chunk.chunks_exact_mut(n)) {
                t.apply(&e.assignment, &ctx, out);
            }
        }
        Ok(TransformTable {
            ctx,
            n,
            values,
            costs,
        })
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    pub fn ctx(&self) -> &EvalContext {
        &self.ctx
    }

    /// Network output on every entry, in entry order.
    pub fn outputs(&self, g: Genome) -> Vec<u64> {
        let arithmetic = g.arithmetic().expect("valid genome");
        let aggregation = g.aggregation().expect("valid genome");
        let comparison = g.comparison().expect("valid genome");
        let selected: Vec<usize> = g.transformations().map(|t| t.index()).collect();
        let n = self.n;
        let stride = Transformation::ALL.len() * n;
        let mut acc = vec![0i64; n];
        self.values
            .chunks_exact(stride)
            .map(|row| {
                let (first, rest) = selected.split_first().expect("valid genome");
                acc.copy_from_slice(&row[first * n..(first + 1) * n]);
                for t in rest {
                    arithmetic.fold_into(&mut acc, &row[t * n..(t + 1) * n]);
                }
                let (y, _) = aggregation.apply(&acc);
                comparison.apply(y, &self.ctx)
            })
            .collect()
    }

    /// Summed absolute deviation against the stored costs.
    pub fn deviation(&self, g: Genome) -> u64 {
        self.outputs(g)
            .iter()
            .zip(&self.costs)
            .map(|(o, c)| o.abs_diff(*c))
            .sum()
    }

    pub fn loss(&self, g: Genome) -> f64 {
        self.deviation(g) as f64 + regularization(g)
    }
}
