use icn_core::concepts::{ConstraintInstance, ConstraintKind};
use icn_core::ga::{crossover, mutate};
use icn_core::hamming::{approx_hamming, exact_hamming, SolutionSet};
use icn_core::icn::{
    self, canonical, describe, parse_description, ErrorFunction, EvalContext, Genome,
};
use icn_core::seed;
use icn_core::solver::alldiff_primal_violation;
use icn_core::spaces::{enumerate_complete, lhs_sample, LabeledSpace, LhsSampler};
use proptest::prelude::*;

/// Every satisfiable instance with n <= 4 and domain [1, hi], hi <= 5.
fn small_instances() -> Vec<ConstraintInstance> {
    let mut out = Vec::new();
    for k in ConstraintKind::ALL {
        for n in 2usize..=4 {
            for hi in 2i64..=5 {
                let ps: Vec<i64> = match k {
                    ConstraintKind::LinearSum => (n as i64..=n as i64 * hi).collect(),
                    ConstraintKind::Minimum => (1..=hi).collect(),
                    ConstraintKind::NoOverlap1D => vec![1, 2],
                    _ => vec![0],
                };
                for p in ps {
                    let c = ConstraintInstance::new(k, n, 1, hi, p).unwrap();
                    if !SolutionSet::enumerate(&c, 10_000).unwrap().is_empty() {
                        out.push(c);
                    }
                }
            }
        }
    }
    out
}

fn small_instance() -> impl Strategy<Value = ConstraintInstance> {
    prop::sample::select(small_instances())
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn sampled_solutions_bound_the_exact_cost(c in small_instance(), keep in 0.0f64..1.0, s in any::<u64>()) {
        let full = SolutionSet::enumerate(&c, 10_000).unwrap();
        let kept: Vec<Vec<i64>> = full
            .solutions()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i == 0 || (seed::derive(s, *i as u64) as f64 / u64::MAX as f64) < keep)
            .map(|(_, x)| x.clone())
            .collect();
        let partial = SolutionSet::sampled(&c, kept).unwrap();
        for x in lhs_sample(&c, 20, s).unwrap() {
            let exact = exact_hamming(&x, &full).unwrap();
            prop_assert!(approx_hamming(&x, &partial).unwrap() >= exact);
            prop_assert!(exact as usize <= c.n());
        }
    }

    #[test]
    fn space_files_round_trip(c in small_instance()) {
        let space = enumerate_complete(&c).unwrap();
        let back = LabeledSpace::from_text(&space.to_text()).unwrap();
        prop_assert_eq!(back, space);
    }

    #[test]
    fn variation_keeps_genomes_valid(a in any::<u32>(), b in any::<u32>(), s in any::<u64>()) {
        let mut rng = seed::rng(s);
        let a = Genome::from_mask(a).repair(&mut rng);
        let b = Genome::from_mask(b).repair(&mut rng);
        prop_assert!(a.validate() && b.validate());
        prop_assert_eq!(a.repair(&mut rng), a);
        let (c1, c2) = crossover(a, b, &mut rng);
        prop_assert!(c1.validate() && c2.validate());
        prop_assert!(mutate(a, &mut rng).validate());
    }

    #[test]
    fn describe_round_trips_canonically(m in any::<u32>(), s in any::<u64>()) {
        let g = Genome::from_mask(m).repair(&mut seed::rng(s));
        let parsed = parse_description(&describe(g)).unwrap();
        prop_assert_eq!(parsed, canonical(g));
        prop_assert_eq!(describe(parsed), describe(g));
    }

    #[test]
    fn alldifferent_error_functions_agree_on_satisfaction(x in prop::collection::vec(1i64..=9, 2..=12)) {
        let c = ConstraintInstance::new(ConstraintKind::AllDifferent, x.len(), 1, 9, 0).unwrap();
        let f = ErrorFunction::new(icn::alldifferent_genome(), EvalContext::of(&c)).unwrap();
        let learned = f.evaluate(&x).unwrap();
        let handcrafted = alldiff_primal_violation(&x);
        prop_assert_eq!(learned == 0, handcrafted == 0);
        prop_assert_eq!(learned == 0, c.holds(&x));
        prop_assert!(learned <= handcrafted);
    }

    #[test]
    fn full_lhs_batches_are_latin(n in 2usize..=6, hi in 2i64..=12, s in any::<u64>()) {
        let c = ConstraintInstance::new(ConstraintKind::Ordered, n, 1, hi, 0).unwrap();
        let mut sampler = LhsSampler::new(&c, None);
        let batch = sampler.next_batch(&mut seed::rng(s)).to_vec();
        prop_assert_eq!(batch.len(), n * hi as usize);
        for var in 0..n {
            let mut col: Vec<i64> = batch.chunks_exact(n).map(|r| r[var]).collect();
            col.sort_unstable();
            prop_assert_eq!(col, (1..=hi).collect::<Vec<_>>());
        }
    }
}
