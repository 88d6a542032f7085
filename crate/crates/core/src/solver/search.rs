//! Adaptive-search style local search shared by CSP and EFSP models.

use std::time::{Duration, Instant};

use rand::Rng as _;

use super::model::SearchModel;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    /// Iterations a moved variable stays tabu.
    pub tabu_tenure: u64,
    /// Restart after `plateau_factor * variables` moves without improvement.
    pub plateau_factor: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tabu_tenure: 2,
            plateau_factor: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Solved,
    Timeout,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Solved => "solved",
            Status::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: Status,
    pub assignment: Option<Vec<i64>>,
    pub elapsed_ms: f64,
    pub iterations: u64,
    pub restarts: u64,
}

struct State<'m, M: SearchModel + ?Sized> {
    model: &'m M,
    values: Vec<i64>,
    costs: Vec<u64>,
    total: u64,
    var_constraints: Vec<Vec<usize>>,
    buf: Vec<i64>,
}

impl<'m, M: SearchModel + ?Sized> State<'m, M> {
    fn new(model: &'m M) -> Self {
        let mut var_constraints = vec![Vec::new(); model.domains().len()];
        for c in 0..model.constraint_count() {
            for &v in model.scope(c) {
                var_constraints[v].push(c);
            }
        }
        State {
            model,
            values: vec![0; model.domains().len()],
            costs: vec![0; model.constraint_count()],
            total: 0,
            var_constraints,
            buf: Vec::new(),
        }
    }

    fn constraint_cost(&mut self, c: usize) -> u64 {
        self.buf.clear();
        let values = &self.values;
        self.buf
            .extend(self.model.scope(c).iter().map(|&v| values[v]));
        self.model.cost(c, &self.buf)
    }

    fn randomize(&mut self, rng: &mut seed::Rng) {
        for (v, d) in self.values.iter_mut().zip(self.model.domains()) {
            *v = rng.gen_range(d.lo..=d.hi);
        }
        for c in 0..self.costs.len() {
            self.costs[c] = self.constraint_cost(c);
        }
        self.total = self.costs.iter().sum();
    }

    fn var_score(&self, v: usize) -> u64 {
        self.var_constraints[v].iter().map(|&c| self.costs[c]).sum()
    }

    /// Cost of `v`'s constraints if it took `value`.
    fn cost_with(&mut self, v: usize, value: i64) -> u64 {
        let old = self.values[v];
        self.values[v] = value;
        let mut sum = 0;
        for i in 0..self.var_constraints[v].len() {
            let c = self.var_constraints[v][i];
            sum += self.constraint_cost(c);
        }
        self.values[v] = old;
        sum
    }

    fn assign(&mut self, v: usize, value: i64) {
        self.values[v] = value;
        for i in 0..self.var_constraints[v].len() {
            let c = self.var_constraints[v][i];
            let new = self.constraint_cost(c);
            self.total = self.total - self.costs[c] + new;
            self.costs[c] = new;
        }
    }
}

/// Picks uniformly among the best-scoring candidates in one pass.
struct Reservoir<T> {
    best: Option<(u64, T)>,
    ties: u32,
}

impl<T> Reservoir<T> {
    fn new() -> Self {
        Reservoir {
            best: None,
            ties: 0,
        }
    }

    /// `better(a, b)` is true when score `a` beats `b`.
    fn offer(
        &mut self,
        score: u64,
        item: T,
        better: impl Fn(u64, u64) -> bool,
        rng: &mut seed::Rng,
    ) {
        match &self.best {
            Some((s, _)) if better(*s, score) => {}
            Some((s, _)) if *s == score => {
                self.ties += 1;
                if rng.gen_range(0..self.ties) == 0 {
                    self.best = Some((score, item));
                }
            }
            _ => {
                self.best = Some((score, item));
                self.ties = 1;
            }
        }
    }
}

pub fn solve(model: &(impl SearchModel + ?Sized), timeout_ms: u64, rng_seed: u64) -> SolveOutcome {
    solve_with(model, &SolverConfig::default(), timeout_ms, rng_seed)
}

/// Iterated local search: repeatedly move the worst non-tabu variable to its
/// best other value, restarting from a random assignment after a plateau.
pub fn solve_with(
    model: &(impl SearchModel + ?Sized),
    cfg: &SolverConfig,
    timeout_ms: u64,
    rng_seed: u64,
) -> SolveOutcome {
    let start = Instant::now();
    let deadline = start + Duration::from_millis(timeout_ms.max(1));
    let mut rng = seed::rng(rng_seed);
    let mut state = State::new(model);
    let n = state.values.len();
    let plateau = cfg.plateau_factor * n as u64;

    state.randomize(&mut rng);
    let mut tabu_until = vec![0u64; n];
    let mut best_total = state.total;
    let mut stall = 0u64;
    let mut iterations = 0u64;
    let mut restarts = 0u64;

    let finish = |status, assignment, iterations, restarts| SolveOutcome {
        status,
        assignment,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        iterations,
        restarts,
    };

    loop {
        if state.total == 0 {
            if model.is_solution(&state.values) {
                return finish(Status::Solved, Some(state.values), iterations, restarts);
            }
            // zero error on a non-solution: the error functions are not faithful
            stall = plateau;
        }
        if iterations.is_multiple_of(8) && Instant::now() >= deadline {
            return finish(Status::Timeout, None, iterations, restarts);
        }
        if stall >= plateau {
            state.randomize(&mut rng);
            tabu_until.iter_mut().for_each(|t| *t = 0);
            best_total = state.total;
            stall = 0;
            restarts += 1;
            continue;
        }
        iterations += 1;

        let mut worst = Reservoir::new();
        let mut worst_any = Reservoir::new();
        for (v, &until) in tabu_until.iter().enumerate() {
            let score = state.var_score(v);
            if until <= iterations {
                worst.offer(score, v, |a, b| a > b, &mut rng);
            }
            worst_any.offer(score, v, |a, b| a > b, &mut rng);
        }
        let v = worst
            .best
            .or(worst_any.best)
            .expect("model has variables")
            .1;

        let dom = model.domains()[v];
        let mut best_value = Reservoir::new();
        let current = state.values[v];
        for value in dom.values().filter(|x| *x != current) {
            let cost = state.cost_with(v, value);
            best_value.offer(cost, value, |a, b| a < b, &mut rng);
        }
        tabu_until[v] = iterations + cfg.tabu_tenure + 1;
        if let Some((_, value)) = best_value.best {
            state.assign(v, value);
        }

        if state.total < best_total {
            best_total = state.total;
            stall = 0;
        } else {
            stall += 1;
        }
    }
}
