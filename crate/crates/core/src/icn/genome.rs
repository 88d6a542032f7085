//! The 31-bit operation-selection vector.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Range;

use rand::Rng as _;

use super::ops::{Aggregation, Arithmetic, Comparison, Transformation};
use crate::error::{Error, Result};
use crate::seed::Rng;

pub const GENOME_BITS: usize = 31;
pub const TRANSFORMATION_BITS: Range<usize> = 0..18;
pub const ARITHMETIC_BITS: Range<usize> = 18..20;
pub const AGGREGATION_BITS: Range<usize> = 20..22;
pub const COMPARISON_BITS: Range<usize> = 22..31;

/// Exclusive layers: exactly one selected operation each.
const EXCLUSIVE_LAYERS: [Range<usize>; 3] = [ARITHMETIC_BITS, AGGREGATION_BITS, COMPARISON_BITS];

/// Bit `i` of the mask selects operation `i` in layer order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Genome(u32);

impl Genome {
    pub const EMPTY: Genome = Genome(0);

    pub fn from_mask(mask: u32) -> Self {
        Genome(mask & ((1 << GENOME_BITS) - 1))
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    /// Builds a genome selecting the given operations.
    pub fn from_ops(
        transformations: &[Transformation],
        arithmetic: Arithmetic,
        aggregation: Aggregation,
        comparison: Comparison,
    ) -> Self {
        let mut g = Genome::EMPTY;
        for t in transformations {
            g.set(TRANSFORMATION_BITS.start + t.index(), true);
        }
        g.set(ARITHMETIC_BITS.start + arithmetic as usize, true);
        g.set(AGGREGATION_BITS.start + aggregation as usize, true);
        g.set(COMPARISON_BITS.start + comparison as usize, true);
        g
    }

    pub fn get(self, bit: usize) -> bool {
        self.0 >> bit & 1 == 1
    }

    pub fn set(&mut self, bit: usize, on: bool) {
        debug_assert!(bit < GENOME_BITS);
        if on {
            self.0 |= 1 << bit;
        } else {
            self.0 &= !(1 << bit);
        }
    }

    pub fn flip(&mut self, bit: usize) {
        self.0 ^= 1 << bit;
    }

    pub fn count_ones(self) -> u32 {
        self.0.count_ones()
    }

    fn layer_ones(self, layer: &Range<usize>) -> impl Iterator<Item = usize> + '_ {
        layer.clone().filter(move |b| self.get(*b))
    }

    fn layer_count(self, layer: &Range<usize>) -> usize {
        self.layer_ones(layer).count()
    }

    /// At least one transformation and exactly one operation in each exclusive layer.
    pub fn validate(self) -> bool {
        self.layer_count(&TRANSFORMATION_BITS) >= 1
            && EXCLUSIVE_LAYERS.iter().all(|l| self.layer_count(l) == 1)
    }

    /// Fixes layer constraints: over-selected exclusive layers keep one random
    /// selected bit, empty layers get one random bit.
    pub fn repair(mut self, rng: &mut Rng) -> Self {
        if self.layer_count(&TRANSFORMATION_BITS) == 0 {
            let bit = rng.gen_range(TRANSFORMATION_BITS);
            self.set(bit, true);
        }
        for layer in EXCLUSIVE_LAYERS {
            let selected: Vec<usize> = self.layer_ones(&layer).collect();
            match selected.len() {
                0 => {
                    let bit = rng.gen_range(layer.clone());
                    self.set(bit, true);
                }
                1 => {}
                k => {
                    let keep = selected[rng.gen_range(0..k)];
                    for b in selected {
                        self.set(b, b == keep);
                    }
                }
            }
        }
        self
    }

    /// Selected transformations in catalog order.
    pub fn transformations(self) -> impl Iterator<Item = Transformation> {
        Transformation::ALL
            .into_iter()
            .filter(move |t| self.get(TRANSFORMATION_BITS.start + t.index()))
    }

    fn exclusive<T: Copy>(self, layer: Range<usize>, ops: &[T]) -> Option<T> {
        let mut it = self.layer_ones(&layer);
        match (it.next(), it.next()) {
            (Some(b), None) => Some(ops[b - layer.start]),
            _ => None,
        }
    }

    pub fn arithmetic(self) -> Option<Arithmetic> {
        self.exclusive(ARITHMETIC_BITS, &Arithmetic::ALL)
    }

    pub fn aggregation(self) -> Option<Aggregation> {
        self.exclusive(AGGREGATION_BITS, &Aggregation::ALL)
    }

    pub fn comparison(self) -> Option<Comparison> {
        self.exclusive(COMPARISON_BITS, &Comparison::ALL)
    }

    /// Tie-break order among equally fit genomes: the genome whose first
    /// differing selected operation comes earlier in the catalog ranks first.
    pub fn catalog_cmp(&self, other: &Genome) -> Ordering {
        other.0.reverse_bits().cmp(&self.0.reverse_bits())
    }

    /// Bits as a contiguous `0`/`1` string in layer order.
    pub fn to_bit_string(self) -> String {
        (0..GENOME_BITS)
            .map(|b| if self.get(b) { '1' } else { '0' })
            .collect()
    }

    pub fn from_bit_string(s: &str) -> Result<Self> {
        if s.len() != GENOME_BITS {
            return Err(Error::input(format!(
                "genome needs {GENOME_BITS} bits, got {}",
                s.len()
            )));
        }
        let mut g = Genome::EMPTY;
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => g.set(i, true),
                _ => return Err(Error::input(format!("bad genome character `{ch}`"))),
            }
        }
        Ok(g)
    }
}

impl fmt::Debug for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Genome({})", self.to_bit_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use proptest::prelude::*;

    fn alldiff_genome() -> Genome {
        Genome::from_ops(
            &[Transformation::CountEqRight],
            Arithmetic::Add,
            Aggregation::CountPositive,
            Comparison::Identity,
        )
    }

    #[test]
    fn validation_examples() {
        assert!(!Genome::EMPTY.validate());
        assert!(alldiff_genome().validate());
        let mut two_cmp = alldiff_genome();
        two_cmp.set(COMPARISON_BITS.start + 3, true);
        assert!(!two_cmp.validate());
    }

    #[test]
    fn repair_examples() {
        let mut rng = seed::rng(1);
        let g = alldiff_genome();
        assert_eq!(g.repair(&mut rng), g);

        let fixed = Genome::EMPTY.repair(&mut rng);
        assert!(fixed.validate());
        assert_eq!(fixed.count_ones(), 4);

        let mut three = alldiff_genome();
        let chosen = [22, 25, 30];
        for b in COMPARISON_BITS {
            three.set(b, chosen.contains(&b));
        }
        let r = three.repair(&mut rng);
        assert!(r.validate());
        let kept: Vec<usize> = COMPARISON_BITS.filter(|b| r.get(*b)).collect();
        assert_eq!(kept.len(), 1);
        assert!(chosen.contains(&kept[0]));
    }

    #[test]
    fn accessors() {
        let g = alldiff_genome();
        assert_eq!(
            g.transformations().collect::<Vec<_>>(),
            vec![Transformation::CountEqRight]
        );
        assert_eq!(g.arithmetic(), Some(Arithmetic::Add));
        assert_eq!(g.aggregation(), Some(Aggregation::CountPositive));
        assert_eq!(g.comparison(), Some(Comparison::Identity));
        assert_eq!(g.to_bit_string(), "0100000000000000001001100000000");
    }

    #[test]
    fn catalog_order_prefers_earlier_operations() {
        let right = alldiff_genome();
        let left = Genome::from_ops(
            &[Transformation::CountEqLeft],
            Arithmetic::Add,
            Aggregation::CountPositive,
            Comparison::Identity,
        );
        assert_eq!(right.catalog_cmp(&left), Ordering::Less);
        assert_eq!(left.catalog_cmp(&right), Ordering::Greater);
        assert_eq!(left.catalog_cmp(&left), Ordering::Equal);
    }

    proptest! {
        #[test]
        fn repair_always_validates(mask in 0u32..(1 << 31), s in any::<u64>()) {
            let mut rng = seed::rng(s);
            let g = Genome::from_mask(mask);
            let r = g.repair(&mut rng);
            prop_assert!(r.validate());
            if g.validate() {
                prop_assert_eq!(r, g);
            }
        }

        #[test]
        fn bit_string_round_trip(mask in 0u32..(1 << 31)) {
            let g = Genome::from_mask(mask);
            prop_assert_eq!(Genome::from_bit_string(&g.to_bit_string()).unwrap(), g);
        }
    }
}
