//! Genetic algorithm over genomes: binary tournament selection, one-point
//! crossover, one-flip mutation, elitist merge and truncation.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::icn::{describe, Genome, TransformTable, GENOME_BITS};
use crate::seed::{self, Rng};
use crate::spaces::LabeledSpace;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaConfig {
    pub population_size: usize,
    pub max_generations: usize,
    /// Stop after this many generations without a strict best-loss improvement.
    pub steady_stop: usize,
    pub crossover_rate: f64,
    /// Probability that a produced child gets its one-bit flip.
    pub mutation_rate: f64,
    pub elite_fraction: f64,
    pub tournament_size: usize,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 160,
            max_generations: 800,
            steady_stop: 50,
            crossover_rate: 0.4,
            mutation_rate: 1.0,
            elite_fraction: 0.17,
            tournament_size: 2,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let rate = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::input(format!("{name} must be in [0, 1], got {v}")))
            }
        };
        rate("crossover_rate", self.crossover_rate)?;
        rate("mutation_rate", self.mutation_rate)?;
        rate("elite_fraction", self.elite_fraction)?;
        if self.population_size == 0 || self.max_generations == 0 || self.steady_stop == 0 {
            return Err(Error::input(
                "population, generation and steady counts must be positive",
            ));
        }
        if self.tournament_size == 0 {
            return Err(Error::input("tournament_size must be positive"));
        }
        Ok(())
    }

    /// Number of old individuals copied into the merge pool.
    pub fn elite_count(&self) -> usize {
        (self.elite_fraction * self.population_size as f64).ceil() as usize
    }

    /// Applies `key=value` lines on top of `self`; `#` starts a comment.
    pub fn with_overrides(mut self, text: &str) -> Result<Self> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: idx + 1, msg };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = || err(format!("bad value for `{key}`: `{value}`"));
            match key {
                "population_size" => self.population_size = value.parse().map_err(|_| bad())?,
                "max_generations" => self.max_generations = value.parse().map_err(|_| bad())?,
                "steady_stop" => self.steady_stop = value.parse().map_err(|_| bad())?,
                "crossover_rate" => self.crossover_rate = value.parse().map_err(|_| bad())?,
                "mutation_rate" => self.mutation_rate = value.parse().map_err(|_| bad())?,
                "elite_fraction" => self.elite_fraction = value.parse().map_err(|_| bad())?,
                "tournament_size" => self.tournament_size = value.parse().map_err(|_| bad())?,
                "seed" => self.seed = value.parse().map_err(|_| bad())?,
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        self.validate()?;
        Ok(self)
    }

    pub fn to_text(&self) -> String {
        format!(
            "population_size={}\nmax_generations={}\nsteady_stop={}\ncrossover_rate={}\n\
             mutation_rate={}\nelite_fraction={}\ntournament_size={}\nseed={}\n",
            self.population_size,
            self.max_generations,
            self.steady_stop,
            self.crossover_rate,
            self.mutation_rate,
            self.elite_fraction,
            self.tournament_size,
            self.seed
        )
    }
}

/// A genome with its fitness (the training loss).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Individual {
    pub genome: Genome,
    pub loss: f64,
}

/// Lower loss first; equal losses fall back on catalog order.
fn rank(a: &Individual, b: &Individual) -> Ordering {
    a.loss
        .total_cmp(&b.loss)
        .then_with(|| a.genome.catalog_cmp(&b.genome))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnResult {
    pub best_genome: Genome,
    pub best_loss: f64,
    /// Summed absolute deviation of the best genome on the training space.
    pub training_deviation: u64,
    pub generations_run: usize,
    /// Best loss of the initial population, then after each generation.
    pub loss_trace: Vec<f64>,
    pub seed: u64,
}

impl LearnResult {
    pub fn description(&self) -> String {
        describe(self.best_genome)
    }

    /// `key=value` metrics sidecar.
    pub fn metrics_text(&self) -> String {
        format!(
            "description={}\nbest_loss={}\ntraining_deviation={}\ngenerations_run={}\nseed={}\n",
            self.description(),
            self.best_loss,
            self.training_deviation,
            self.generations_run,
            self.seed
        )
    }

    pub fn trace_csv(&self) -> String {
        let mut out = String::from("generation,best_loss\n");
        for (g, l) in self.loss_trace.iter().enumerate() {
            writeln!(out, "{g},{l}").unwrap();
        }
        out
    }
}

/// Uniform random bits, repaired to validity.
pub fn init_population(cfg: &GaConfig, rng: &mut Rng) -> Vec<Genome> {
    (0..cfg.population_size)
        .map(|_| Genome::from_mask(rng.gen::<u32>()).repair(rng))
        .collect()
}

/// Tournament among `size` distinct individuals; the lowest loss wins, ties
/// broken uniformly. Returns the winner's index.
pub fn select(losses: &[f64], size: usize, rng: &mut Rng) -> usize {
    assert!(!losses.is_empty(), "selection from an empty population");
    let size = size.clamp(1, losses.len());
    let contenders = rand::seq::index::sample(rng, losses.len(), size).into_vec();
    let best = contenders
        .iter()
        .map(|&i| losses[i])
        .min_by(f64::total_cmp)
        .unwrap();
    let tied: Vec<usize> = contenders
        .into_iter()
        .filter(|&i| losses[i] == best)
        .collect();
    tied[rng.gen_range(0..tied.len())]
}

/// One-point crossover with a cut in `[1, 30]`, children repaired.
pub fn crossover(a: Genome, b: Genome, rng: &mut Rng) -> (Genome, Genome) {
    let cut = rng.gen_range(1..GENOME_BITS);
    let low = (1u32 << cut) - 1;
    let high = !low;
    let c1 = Genome::from_mask((a.mask() & low) | (b.mask() & high));
    let c2 = Genome::from_mask((b.mask() & low) | (a.mask() & high));
    (c1.repair(rng), c2.repair(rng))
}

/// Flips one uniformly chosen bit, then repairs.
pub fn mutate(g: Genome, rng: &mut Rng) -> Genome {
    mutate_at(g, rng.gen_range(0..GENOME_BITS), rng)
}

pub(crate) fn mutate_at(mut g: Genome, bit: usize, rng: &mut Rng) -> Genome {
    g.flip(bit);
    g.repair(rng)
}

/// Elitist merge: the best `elite_count` of `old` join the offspring. The
/// pool is then truncated to the population size by deterministic
/// tournaments: two distinct members are drawn and the worse one is removed,
/// until the size fits. The result is sorted best first.
pub fn replace(
    old: &[Individual],
    offspring: Vec<Individual>,
    cfg: &GaConfig,
    rng: &mut Rng,
) -> Vec<Individual> {
    let mut elite = old.to_vec();
    elite.sort_by(rank);
    elite.truncate(cfg.elite_count());
    let mut pool = elite;
    pool.extend(offspring);
    while pool.len() > cfg.population_size {
        let i = rng.gen_range(0..pool.len());
        let mut j = rng.gen_range(0..pool.len() - 1);
        if j >= i {
            j += 1;
        }
        let loser = if rank(&pool[i], &pool[j]) == Ordering::Greater {
            i
        } else {
            j
        };
        pool.swap_remove(loser);
    }
    pool.sort_by(rank);
    pool
}

struct Fitness<'a> {
    table: &'a TransformTable,
    cache: HashMap<Genome, (f64, u64)>,
}

impl Fitness<'_> {
    fn eval(&mut self, g: Genome) -> (f64, u64) {
        let table = self.table;
        *self.cache.entry(g).or_insert_with(|| {
            let dev = table.deviation(g);
            (dev as f64 + crate::icn::regularization(g), dev)
        })
    }

    fn individual(&mut self, g: Genome) -> Individual {
        Individual {
            genome: g,
            loss: self.eval(g).0,
        }
    }
}

/// Learns a genome on a costed space.
pub fn learn(space: &LabeledSpace, cfg: &GaConfig) -> Result<LearnResult> {
    let table = TransformTable::new(space)?;
    learn_on_table(&table, cfg, |_, _| {})
}

/// Same as [`learn`] on a precomputed table; `observer` sees the population
/// after initialization (generation 0) and after every generation.
pub fn learn_on_table(
    table: &TransformTable,
    cfg: &GaConfig,
    mut observer: impl FnMut(usize, &[Individual]),
) -> Result<LearnResult> {
    cfg.validate()?;
    let mut rng = seed::rng(cfg.seed);
    let mut fitness = Fitness {
        table,
        cache: HashMap::new(),
    };

    let mut population: Vec<Individual> = init_population(cfg, &mut rng)
        .into_iter()
        .map(|g| fitness.individual(g))
        .collect();
    population.sort_by(rank);
    observer(0, &population);

    let mut best = population[0];
    let mut trace = vec![best.loss];
    let mut steady = 0;
    let mut generations = 0;

    while generations < cfg.max_generations && steady < cfg.steady_stop {
        generations += 1;
        let losses: Vec<f64> = population.iter().map(|i| i.loss).collect();
        let mut offspring = Vec::with_capacity(cfg.population_size);
        while offspring.len() < cfg.population_size {
            let a = population[select(&losses, cfg.tournament_size, &mut rng)].genome;
            let b = population[select(&losses, cfg.tournament_size, &mut rng)].genome;
            let (c1, c2) = if rng.gen_bool(cfg.crossover_rate) {
                crossover(a, b, &mut rng)
            } else {
                (a, b)
            };
            for child in [c1, c2] {
                if offspring.len() == cfg.population_size {
                    break;
                }
                let child = if rng.gen_bool(cfg.mutation_rate) {
                    mutate(child, &mut rng)
                } else {
                    child
                };
                offspring.push(fitness.individual(child));
            }
        }
        population = replace(&population, offspring, cfg, &mut rng);
        observer(generations, &population);

        let leader = population[0];
        if leader.loss < best.loss {
            steady = 0;
        } else {
            steady += 1;
        }
        if rank(&leader, &best) == Ordering::Less {
            best = leader;
        }
        trace.push(best.loss);
    }

    let (best_loss, training_deviation) = fitness.eval(best.genome);
    Ok(LearnResult {
        best_genome: best.genome,
        best_loss,
        training_deviation,
        generations_run: generations,
        loss_trace: trace,
        seed: cfg.seed,
    })
}

/// Seed of run `index` under a master seed.
pub fn run_seed(master: u64, index: usize) -> u64 {
    seed::derive(master, index as u64)
}

/// Independent runs with derived seeds, spread over `jobs` threads.
pub fn learn_runs(
    space: &LabeledSpace,
    cfg: &GaConfig,
    runs: usize,
    jobs: usize,
) -> Result<Vec<LearnResult>> {
    let table = TransformTable::new(space)?;
    let configs: Vec<GaConfig> = (0..runs)
        .map(|r| GaConfig {
            seed: run_seed(cfg.seed, r),
            ..*cfg
        })
        .collect();
    let jobs = jobs.clamp(1, runs.max(1));
    if jobs == 1 {
        return configs
            .iter()
            .map(|c| learn_on_table(&table, c, |_, _| {}))
            .collect();
    }
    let chunk = runs.div_ceil(jobs);
    std::thread::scope(|s| {
        let handles: Vec<_> = configs
            .chunks(chunk)
            .map(|cs| {
                let table = &table;
                s.spawn(move || {
                    cs.iter()
                        .map(|c| learn_on_table(table, c, |_, _| {}))
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        let mut out = Vec::with_capacity(runs);
        for h in handles {
            out.extend(h.join().expect("learning thread panicked")?);
        }
        Ok(out)
    })
}

/// Distinct learned functions with their frequencies, most frequent first.
pub fn summarize(results: &[LearnResult]) -> Vec<(String, usize)> {
    let mut counts: HashMap<String, usize> = HashMap::new();
    for r in results {
        *counts.entry(r.description()).or_default() += 1;
    }
    let mut out: Vec<(String, usize)> = counts.into_iter().collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concepts::{ConstraintInstance, ConstraintKind};
    use crate::hamming::{label_space_costs, SolutionSet};
    use crate::icn::alldifferent_genome;
    use crate::spaces::enumerate_complete;

    fn small_space() -> LabeledSpace {
        let c = ConstraintInstance::new(ConstraintKind::AllDifferent, 3, 1, 3, 0).unwrap();
        let s = enumerate_complete(&c).unwrap();
        label_space_costs(&s, &SolutionSet::enumerate(&c, 1000).unwrap()).unwrap()
    }

    #[test]
    fn init_population_is_valid_and_reproducible() {
        let cfg = GaConfig::default();
        let a = init_population(&cfg, &mut seed::rng(4));
        let b = init_population(&cfg, &mut seed::rng(4));
        assert_eq!(a, b);
        assert_eq!(a.len(), 160);
        assert!(a.iter().all(|g| g.validate()));
    }

    #[test]
    fn selection_examples() {
        let mut rng = seed::rng(9);
        for _ in 0..100 {
            assert_eq!(select(&[3.0, 5.0], 2, &mut rng), 0);
        }
        assert_eq!(select(&[7.0], 2, &mut rng), 0);
        let trials = 10_000;
        let firsts = (0..trials)
            .filter(|_| select(&[1.0, 1.0], 2, &mut rng) == 0)
            .count();
        let freq = firsts as f64 / trials as f64;
        assert!((freq - 0.5).abs() <= 0.02, "tie frequency {freq}");
    }

    #[test]
    fn crossover_examples() {
        let mut rng = seed::rng(2);
        let g = alldifferent_genome();
        for _ in 0..50 {
            assert_eq!(crossover(g, g, &mut rng), (g, g));
        }
        let h = Genome::from_mask(u32::MAX).repair(&mut rng);
        for _ in 0..200 {
            let (a, b) = crossover(g, h, &mut rng);
            assert!(a.validate() && b.validate());
        }
    }

    #[test]
    fn mutation_is_valid_and_uniform() {
        let mut rng = seed::rng(3);
        let g = alldifferent_genome();
        let trials = 10_000;
        let mut hits = [0usize; GENOME_BITS];
        for _ in 0..trials {
            let bit = rng.gen_range(0..GENOME_BITS);
            hits[bit] += 1;
            assert!(mutate_at(g, bit, &mut rng).validate());
            assert!(mutate(g, &mut rng).validate());
        }
        for h in hits {
            let f = h as f64 / trials as f64;
            assert!((f - 1.0 / 31.0).abs() <= 0.01, "bit frequency {f}");
        }
    }

    #[test]
    fn replacement_keeps_best_and_size() {
        let cfg = GaConfig::default();
        let mut rng = seed::rng(5);
        let old: Vec<Individual> = (0..160)
            .map(|i| Individual {
                genome: Genome::from_mask(rng.gen()).repair(&mut rng),
                loss: 10.0 + i as f64,
            })
            .collect();
        let offspring: Vec<Individual> = (0..160)
            .map(|_| Individual {
                genome: Genome::from_mask(rng.gen()).repair(&mut rng),
                loss: 11.0,
            })
            .collect();
        let merged = replace(&old, offspring, &cfg, &mut rng);
        assert_eq!(merged.len(), 160);
        assert_eq!(merged[0], old[0]);
        assert_eq!(cfg.elite_count(), 28);

        let small = replace(&old[..3], old[3..5].to_vec(), &cfg, &mut rng);
        assert_eq!(small.len(), 5);
    }

    #[test]
    fn learning_is_reproducible_and_monotone() {
        let space = small_space();
        let cfg = GaConfig {
            seed: 17,
            ..Default::default()
        };
        let a = learn(&space, &cfg).unwrap();
        let b = learn(&space, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.loss_trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(a.loss_trace.len(), a.generations_run + 1);
        assert_eq!(a.training_deviation, 0);
    }

    #[test]
    fn config_overrides() {
        let cfg = GaConfig::default()
            .with_overrides("# tuned\npopulation_size = 40\nseed=9\n\ncrossover_rate=0.5 # half\n")
            .unwrap();
        assert_eq!(cfg.population_size, 40);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.crossover_rate, 0.5);
        assert!(GaConfig::default()
            .with_overrides("crossover_rate=2")
            .is_err());
        assert!(GaConfig::default().with_overrides("bogus=1").is_err());
        let round = GaConfig::default().with_overrides(&cfg.to_text()).unwrap();
        assert_eq!(round, cfg);
    }
}
