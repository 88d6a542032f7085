use std::fmt;
use std::sync::Arc;

use crate::concepts::{ConstraintInstance, Domain};
use crate::error::{Error, Result};

/// Error function over a constraint's projected assignment.
pub type ErrorFn = Arc<dyn Fn(&[i64]) -> u64 + Send + Sync>;

/// What the local search needs from a model.
pub trait SearchModel {
    fn domains(&self) -> &[Domain];
    fn constraint_count(&self) -> usize;
    fn scope(&self, c: usize) -> &[usize];
    /// Cost of constraint `c` on its projected values: the error for EFSP
    /// models, 1 if violated and 0 otherwise for CSP models.
    fn cost(&self, c: usize, projected: &[i64]) -> u64;
    /// The concept of constraint `c`, used to verify solutions.
    fn holds(&self, c: usize, projected: &[i64]) -> bool;

    /// Re-checks every constraint predicate on a full assignment.
    fn is_solution(&self, values: &[i64]) -> bool {
        let mut buf = Vec::new();
        (0..self.constraint_count()).all(|c| {
            buf.clear();
            buf.extend(self.scope(c).iter().map(|&v| values[v]));
            self.holds(c, &buf)
        })
    }
}

fn check_scope(domains: &[Domain], scope: &[usize], concept: &ConstraintInstance) -> Result<()> {
    if scope.len() != concept.n() {
        return Err(Error::input(format!(
            "scope of {} variables for a constraint over {}",
            scope.len(),
            concept.n()
        )));
    }
    if let Some(v) = scope.iter().find(|v| **v >= domains.len()) {
        return Err(Error::input(format!("scope index {v} out of range")));
    }
    Ok(())
}

/// A constraint network `<V, D, C>` whose constraints are concepts.
#[derive(Debug, Clone)]
pub struct CspModel {
    domains: Vec<Domain>,
    constraints: Vec<(Vec<usize>, ConstraintInstance)>,
}

impl CspModel {
    pub fn new(domains: Vec<Domain>) -> Self {
        CspModel {
            domains,
            constraints: Vec::new(),
        }
    }

    pub fn add(&mut self, scope: Vec<usize>, concept: ConstraintInstance) -> Result<()> {
        check_scope(&self.domains, &scope, &concept)?;
        self.constraints.push((scope, concept));
        Ok(())
    }
}

impl SearchModel for CspModel {
    fn domains(&self) -> &[Domain] {
        &self.domains
    }

    fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    fn scope(&self, c: usize) -> &[usize] {
        &self.constraints[c].0
    }

    fn cost(&self, c: usize, projected: &[i64]) -> u64 {
        u64::from(!self.constraints[c].1.holds(projected))
    }

    fn holds(&self, c: usize, projected: &[i64]) -> bool {
        self.constraints[c].1.holds(projected)
    }
}

struct EfspConstraint {
    scope: Vec<usize>,
    concept: ConstraintInstance,
    error: ErrorFn,
}

/// A cost function network under the additive cost structure: satisfied
/// iff every error function is zero.
#[derive(Clone)]
pub struct EfspModel {
    domains: Vec<Domain>,
    constraints: Vec<Arc<EfspConstraint>>,
}

impl EfspModel {
    pub fn new(domains: Vec<Domain>) -> Self {
        EfspModel {
            domains,
            constraints: Vec::new(),
        }
    }

    /// Adds an error function; `concept` is kept to verify solutions.
    pub fn add(
        &mut self,
        scope: Vec<usize>,
        concept: ConstraintInstance,
        error: ErrorFn,
    ) -> Result<()> {
        check_scope(&self.domains, &scope, &concept)?;
        self.constraints.push(Arc::new(EfspConstraint {
            scope,
            concept,
            error,
        }));
        Ok(())
    }

    /// Total error of a full assignment.
    pub fn total_error(&self, values: &[i64]) -> u64 {
        let mut buf = Vec::new();
        (0..self.constraints.len())
            .map(|c| {
                buf.clear();
                buf.extend(self.scope(c).iter().map(|&v| values[v]));
                self.cost(c, &buf)
            })
            .sum()
    }
}

impl fmt::Debug for EfspModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EfspModel")
            .field("variables", &self.domains.len())
            .field("constraints", &self.constraints.len())
            .finish()
    }
}

impl SearchModel for EfspModel {
    fn domains(&self) -> &[Domain] {
        &self.domains
    }

    fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    fn scope(&self, c: usize) -> &[usize] {
        &self.constraints[c].scope
    }

    fn cost(&self, c: usize, projected: &[i64]) -> u64 {
        (self.constraints[c].error)(projected)
    }

    fn holds(&self, c: usize, projected: &[i64]) -> bool {
        self.constraints[c].concept.holds(projected)
    }
}

/// Either flavour of model.
#[derive(Debug, Clone)]
pub enum Model {
    Csp(CspModel),
    Efsp(EfspModel),
}

impl Model {
    pub fn variable_count(&self) -> usize {
        self.domains().len()
    }
}

impl SearchModel for Model {
    fn domains(&self) -> &[Domain] {
        match self {
            Model::Csp(m) => m.domains(),
            Model::Efsp(m) => m.domains(),
        }
    }

    fn constraint_count(&self) -> usize {
        match self {
            Model::Csp(m) => m.constraint_count(),
            Model::Efsp(m) => m.constraint_count(),
        }
    }

    fn scope(&self, c: usize) -> &[usize] {
        match self {
            Model::Csp(m) => m.scope(c),
            Model::Efsp(m) => m.scope(c),
        }
    }

    fn cost(&self, c: usize, projected: &[i64]) -> u64 {
        match self {
            Model::Csp(m) => m.cost(c, projected),
            Model::Efsp(m) => m.cost(c, projected),
        }
    }

    fn holds(&self, c: usize, projected: &[i64]) -> bool {
        match self {
            Model::Csp(m) => m.holds(c, projected),
            Model::Efsp(m) => m.holds(c, projected),
        }
    }
}
