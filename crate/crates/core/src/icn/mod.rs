//! Interpretable Compositional Network: a four-layer network with binary
//! weights whose selected operations compose into a readable error function.
//!
//! 1. transformations map the assignment element-wise to integer vectors,
//! 2. one arithmetic operation combines them component-wise,
//! 3. one aggregation reduces the combined vector to a scalar,
//! 4. one comparison turns the scalar into the final error.

mod file;
mod genome;
mod loss;
mod network;
pub mod ops;

pub use file::GenomeFile;
pub use genome::{
    Genome, AGGREGATION_BITS, ARITHMETIC_BITS, COMPARISON_BITS, GENOME_BITS, TRANSFORMATION_BITS,
};
pub use loss::{loss, normalized_mean_error, regularization, TransformTable};
pub use network::{canonical, describe, parse_description, ErrorFunction, EvalContext, Evaluation};

use ops::{Aggregation, Arithmetic, Comparison, Transformation};

/// `Count>0( count_eq_right )`: number of values repeated later in the scope.
pub fn alldifferent_genome() -> Genome {
    Genome::from_ops(
        &[Transformation::CountEqRight],
        Arithmetic::Add,
        Aggregation::CountPositive,
        Comparison::Identity,
    )
}

/// `Euclid_p( Sum( identity ) )`: ceiling of the distance to `p` over the domain size.
pub fn linearsum_genome() -> Genome {
    Genome::from_ops(
        &[Transformation::Identity],
        Arithmetic::Add,
        Aggregation::Sum,
        Comparison::EuclidParam,
    )
}
