//! Learning and inference with logical constraints for joint entity-relation
//! extraction.
//!
//! The toolkit models an extraction instance as a triple of categorical
//! predictions (subject type, relation, object type). A domain ontology lists
//! which triples are permissible; lowering it to a propositional constraint
//! and compiling that constraint into a smooth deterministic decomposable
//! circuit makes the probability that the model's factorized distribution
//! satisfies the constraint — and its exact gradient — computable in time
//! linear in the circuit size. On top of that sit:
//!
//! - an exact constraint-probability loss (`losses::semantic_loss`),
//! - the product t-norm relaxation (`losses::tnorm_loss`),
//! - constraint-driven pseudo-labeling (`train::train_codl`),
//! - unconstrained / constrained / transductive inference (`decode`, `train`),
//! - a synthetic desk-scale benchmark with an experiment grid (`data`,
//!   `metrics`, `grid`).

pub mod circuit;
pub mod data;
pub mod decode;
pub mod grid;
pub mod logic;
pub mod losses;
pub mod metrics;
pub mod model;
pub mod ontology;
pub mod statespace;
pub mod train;

pub use circuit::{Circuit, CompileOptions, LiteralWeights, WmcGradient};
pub use data::{Dataset, SyntheticSpec};
pub use decode::{decode_constrained, decode_unconstrained, Prediction, Regime};
pub use grid::{run_grid, GridConfig, GridResults};
pub use logic::{Assignment, Formula};
pub use losses::{cross_entropy, CompiledConstraint, LossValue, TnormConstraint};
pub use metrics::{evaluate, MetricsReport};
pub use model::{Instance, ModelConfig, ModelParams};
pub use ontology::{induce_ontology, parse_ontology, Ontology};
pub use statespace::{DistributionGrad, State, StateDistribution};
pub use train::{train_base, train_codl, train_constrained, Method, TrainConfig, TrainResult};
