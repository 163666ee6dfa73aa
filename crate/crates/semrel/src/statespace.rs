//! States and state distributions.
//!
//! A state is a (subject type, relation, object type) triple. A model's three
//! categorical heads induce a distribution over all states by taking the
//! product of the per-factor probabilities; encoding those probabilities as
//! literal weights (`w(v) = p`, `w(!v) = 1 - p`) makes weighted model counting
//! of the compiled constraint equal the total probability of valid states.

use thiserror::Error;

use crate::circuit::LiteralWeights;
use crate::ontology::Ontology;

/// Probability vectors must sum to one within this tolerance.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateSpaceError {
    #[error("probability vector sums to {sum}, expected 1")]
    NotNormalized { sum: f64 },
    #[error("probability entry {value} is negative or not finite")]
    InvalidProbability { value: f64 },
    #[error("state index out of range: {what} {index} with {count} classes")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        count: usize,
    },
    #[error("distribution dimensions ({subjects}, {relations}, {objects}) do not match the ontology ({entities} entities, {ontology_relations} relations)")]
    DimensionMismatch {
        subjects: usize,
        relations: usize,
        objects: usize,
        entities: usize,
        ontology_relations: usize,
    },
}

/// A (subject type, relation, object type) index triple. The derived ordering
/// is lexicographic in that field order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State {
    pub subject: usize,
    pub relation: usize,
    pub object: usize,
}

impl State {
    pub fn new(subject: usize, relation: usize, object: usize) -> Self {
        State {
            subject,
            relation,
            object,
        }
    }
}

/// Categorical distributions over subject type, relation, and object type.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDistribution {
    subject: Vec<f64>,
    relation: Vec<f64>,
    object: Vec<f64>,
}

/// Gradient of a scalar with respect to every entry of a
/// [`StateDistribution`].
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionGrad {
    pub subject: Vec<f64>,
    pub relation: Vec<f64>,
    pub object: Vec<f64>,
}

impl DistributionGrad {
    pub fn zeros(subjects: usize, relations: usize, objects: usize) -> Self {
        DistributionGrad {
            subject: vec![0.0; subjects],
            relation: vec![0.0; relations],
            object: vec![0.0; objects],
        }
    }

    pub fn zeros_like(d: &StateDistribution) -> Self {
        Self::zeros(d.subject.len(), d.relation.len(), d.object.len())
    }

    pub fn scale(&mut self, factor: f64) {
        for v in self
            .subject
            .iter_mut()
            .chain(self.relation.iter_mut())
            .chain(self.object.iter_mut())
        {
            *v *= factor;
        }
    }

    pub fn add(&mut self, other: &DistributionGrad) {
        for (a, b) in self.subject.iter_mut().zip(&other.subject) {
            *a += b;
        }
        for (a, b) in self.relation.iter_mut().zip(&other.relation) {
            *a += b;
        }
        for (a, b) in self.object.iter_mut().zip(&other.object) {
            *a += b;
        }
    }
}

impl StateDistribution {
    /// Validate that each vector is non-negative and sums to one.
    pub fn new(
        subject: Vec<f64>,
        relation: Vec<f64>,
        object: Vec<f64>,
    ) -> Result<Self, StateSpaceError> {
        for vector in [&subject, &relation, &object] {
            let mut sum = 0.0;
            for &p in vector {
                if !p.is_finite() || p < 0.0 {
                    return Err(StateSpaceError::InvalidProbability { value: p });
                }
                sum += p;
            }
            if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
                return Err(StateSpaceError::NotNormalized { sum });
            }
        }
        Ok(StateDistribution {
            subject,
            relation,
            object,
        })
    }

    /// Skip validation. Intended for gradient checking, where individual
    /// entries are perturbed without renormalizing.
    pub fn new_unchecked(subject: Vec<f64>, relation: Vec<f64>, object: Vec<f64>) -> Self {
        StateDistribution {
            subject,
            relation,
            object,
        }
    }

    pub fn subject_probs(&self) -> &[f64] {
        &self.subject
    }

    pub fn relation_probs(&self) -> &[f64] {
        &self.relation
    }

    pub fn object_probs(&self) -> &[f64] {
        &self.object
    }

    pub fn matches_ontology(&self, ontology: &Ontology) -> Result<(), StateSpaceError> {
        if self.subject.len() != ontology.entity_count()
            || self.object.len() != ontology.entity_count()
            || self.relation.len() != ontology.relation_count()
        {
            return Err(StateSpaceError::DimensionMismatch {
                subjects: self.subject.len(),
                relations: self.relation.len(),
                objects: self.object.len(),
                entities: ontology.entity_count(),
                ontology_relations: ontology.relation_count(),
            });
        }
        Ok(())
    }

    /// Probability of one state: the product of its factor probabilities.
    pub fn state_probability(&self, state: &State) -> Result<f64, StateSpaceError> {
        let check = |what: &'static str, index: usize, count: usize| {
            if index >= count {
                Err(StateSpaceError::IndexOutOfRange { what, index, count })
            } else {
                Ok(())
            }
        };
        check("subject", state.subject, self.subject.len())?;
        check("relation", state.relation, self.relation.len())?;
        check("object", state.object, self.object.len())?;
        Ok(self.subject[state.subject] * self.relation[state.relation] * self.object[state.object])
    }

    /// Every state with its probability, iterated as (subject, relation,
    /// object) in lexicographic index order. The probabilities sum to one.
    pub fn full_distribution(&self) -> Vec<(State, f64)> {
        let mut out = Vec::with_capacity(self.subject.len() * self.relation.len() * self.object.len());
        for (s, &ps) in self.subject.iter().enumerate() {
            for (r, &pr) in self.relation.iter().enumerate() {
                for (o, &po) in self.object.iter().enumerate() {
                    out.push((State::new(s, r, o), ps * pr * po));
                }
            }
        }
        out
    }

    /// Encode the factor probabilities as literal weights under the
    /// ontology's one-hot variable naming, with `w(!v) = 1 - w(v)`.
    pub fn to_literal_weights(&self, ontology: &Ontology) -> Result<LiteralWeights, StateSpaceError> {
        self.matches_ontology(ontology)?;
        let vars = ontology.state_vars();
        let mut weights = LiteralWeights::new();
        for (name, &p) in vars.relation.iter().zip(&self.relation) {
            weights.set_probability(name.clone(), p);
        }
        for (name, &p) in vars.subject.iter().zip(&self.subject) {
            weights.set_probability(name.clone(), p);
        }
        for (name, &p) in vars.object.iter().zip(&self.object) {
            weights.set_probability(name.clone(), p);
        }
        Ok(weights)
    }
}
