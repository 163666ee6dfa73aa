//! Training losses.
//!
//! `semantic_loss` is the negative log of the probability that a factorized
//! state distribution satisfies the compiled constraint, computed exactly by
//! weighted model counting; it is zero precisely when all probability mass
//! sits on valid states, and it depends only on the constraint's meaning, not
//! its syntactic form.
//!
//! `tnorm_*` is the product t-norm relaxation, computed by structural
//! recursion over the formula: `[!A] = 1 - [A]`, `[A & B] = [A][B]`,
//! `[A | B] = [A] + [B] - [A][B]`, `[A => B] = [A]([B] - 1) + 1`. The result
//! agrees with WMC when the arguments of each connective mention disjoint
//! variables and is otherwise an approximation that varies with the syntax
//! (`[A & !A]` at `[A] = 0.6` gives 0.24 where the true probability is 0).

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::circuit::{compile, Circuit, CircuitError, LiteralWeights};
use crate::logic::Formula;
use crate::ontology::{Ontology, StateVars};
use crate::statespace::{DistributionGrad, StateDistribution, StateSpaceError};

/// Clamp floor used by the training-facing loss variants.
pub const LOSS_EPSILON: f64 = 1e-12;

static CE_CLAMP_EVENTS: AtomicU64 = AtomicU64::new(0);

/// How many times `cross_entropy` has clamped a zero gold probability.
pub fn clamp_events() -> u64 {
    CE_CLAMP_EVENTS.load(Ordering::Relaxed)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LossError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    StateSpace(#[from] StateSpaceError),
    #[error("no probability mapped for variable `{0}`")]
    UnmappedVariable(String),
    #[error("gold class {gold} out of range for {classes} classes")]
    BadGoldIndex { gold: usize, classes: usize },
}

/// A loss with its gradient over every state-distribution entry.
///
/// `inconsistent` marks the WMC = 0 case: the value is `+inf`, the gradient
/// is zeroed, and training code is expected to use the clamped variant.
#[derive(Debug, Clone, PartialEq)]
pub struct LossValue {
    pub value: f64,
    pub grad: DistributionGrad,
    pub inconsistent: bool,
}

/// A loss over a single probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorLoss {
    pub value: f64,
    pub grad: Vec<f64>,
}

/// An ontology constraint compiled once and reused across instances.
#[derive(Debug, Clone)]
pub struct CompiledConstraint {
    circuit: Circuit,
    vars: StateVars,
}

impl CompiledConstraint {
    pub fn new(ontology: &Ontology) -> Result<Self, CircuitError> {
        let vars = ontology.state_vars();
        let circuit = compile(&ontology.lower_to_constraint(), &vars.order())?;
        Ok(CompiledConstraint { circuit, vars })
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn vars(&self) -> &StateVars {
        &self.vars
    }

    fn weights(&self, d: &StateDistribution) -> Result<LiteralWeights, LossError> {
        check_dims(&self.vars, d)?;
        let mut w = LiteralWeights::new();
        for (name, &p) in self.vars.relation.iter().zip(d.relation_probs()) {
            w.set_probability(name.clone(), p);
        }
        for (name, &p) in self.vars.subject.iter().zip(d.subject_probs()) {
            w.set_probability(name.clone(), p);
        }
        for (name, &p) in self.vars.object.iter().zip(d.object_probs()) {
            w.set_probability(name.clone(), p);
        }
        Ok(w)
    }

    /// Probability that a state drawn from `d` satisfies the constraint.
    pub fn satisfaction_probability(&self, d: &StateDistribution) -> Result<f64, LossError> {
        Ok(self.circuit.wmc(&self.weights(d)?)?)
    }

    /// Exact semantic loss. See [`semantic_loss`].
    pub fn loss(&self, d: &StateDistribution) -> Result<LossValue, LossError> {
        self.loss_inner(d, None)
    }

    /// Semantic loss with the log argument floored at `eps`, for training
    /// loops that must survive a fully inconsistent distribution.
    pub fn loss_clamped(&self, d: &StateDistribution, eps: f64) -> Result<LossValue, LossError> {
        self.loss_inner(d, Some(eps))
    }

    fn loss_inner(&self, d: &StateDistribution, eps: Option<f64>) -> Result<LossValue, LossError> {
        let weights = self.weights(d)?;
        let (wmc, wmc_grad) = self.circuit.wmc_with_gradient(&weights)?;
        let mut grad = DistributionGrad::zeros_like(d);
        if wmc <= 0.0 && eps.is_none() {
            return Ok(LossValue {
                value: f64::INFINITY,
                grad,
                inconsistent: true,
            });
        }
        let denom = match eps {
            Some(eps) => wmc.max(eps),
            None => wmc,
        };
        // dL/dp = -(dW/dw(v) - dW/dw(!v)) / W, through w(!v) = 1 - w(v).
        let fill = |names: &[String], out: &mut [f64]| {
            for (name, slot) in names.iter().zip(out.iter_mut()) {
                *slot = -(wmc_grad.positive(name) - wmc_grad.negative(name)) / denom;
            }
        };
        fill(&self.vars.subject, &mut grad.subject);
        fill(&self.vars.relation, &mut grad.relation);
        fill(&self.vars.object, &mut grad.object);
        Ok(LossValue {
            value: -denom.ln(),
            grad,
            inconsistent: wmc <= 0.0,
        })
    }
}

/// Exact semantic loss of `d` against a compiled ontology constraint:
/// the negative log of the summed probability of all valid states.
pub fn semantic_loss(
    constraint: &CompiledConstraint,
    d: &StateDistribution,
) -> Result<LossValue, LossError> {
    constraint.loss(d)
}

fn check_dims(vars: &StateVars, d: &StateDistribution) -> Result<(), LossError> {
    if d.subject_probs().len() != vars.subject.len()
        || d.relation_probs().len() != vars.relation.len()
        || d.object_probs().len() != vars.object.len()
    {
        return Err(LossError::StateSpace(StateSpaceError::DimensionMismatch {
            subjects: d.subject_probs().len(),
            relations: d.relation_probs().len(),
            objects: d.object_probs().len(),
            entities: vars.subject.len(),
            ontology_relations: vars.relation.len(),
        }));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Product t-norm
// ---------------------------------------------------------------------------

/// Evaluate the product t-norm of a formula under per-variable probabilities.
pub fn tnorm_probability(
    formula: &Formula,
    probs: &BTreeMap<String, f64>,
) -> Result<f64, LossError> {
    Ok(match formula {
        Formula::True => 1.0,
        Formula::False => 0.0,
        Formula::Var(name) => *probs
            .get(name)
            .ok_or_else(|| LossError::UnmappedVariable(name.clone()))?,
        Formula::Not(inner) => 1.0 - tnorm_probability(inner, probs)?,
        Formula::And(children) => {
            let mut v = 1.0;
            for c in children {
                v *= tnorm_probability(c, probs)?;
            }
            v
        }
        Formula::Or(children) => {
            // Folding a | b = a + b - ab gives 1 - prod(1 - v_i).
            let mut complement = 1.0;
            for c in children {
                complement *= 1.0 - tnorm_probability(c, probs)?;
            }
            1.0 - complement
        }
        Formula::Implies(a, b) => {
            let a = tnorm_probability(a, probs)?;
            let b = tnorm_probability(b, probs)?;
            a * (b - 1.0) + 1.0
        }
    })
}

fn tnorm_backward(
    formula: &Formula,
    probs: &BTreeMap<String, f64>,
    adjoint: f64,
    grad: &mut BTreeMap<String, f64>,
) -> Result<(), LossError> {
    match formula {
        Formula::True | Formula::False => {}
        Formula::Var(name) => {
            *grad.entry(name.clone()).or_insert(0.0) += adjoint;
        }
        Formula::Not(inner) => tnorm_backward(inner, probs, -adjoint, grad)?,
        Formula::And(children) => {
            let values: Vec<f64> = children
                .iter()
                .map(|c| tnorm_probability(c, probs))
                .collect::<Result<_, _>>()?;
            for (i, c) in children.iter().enumerate() {
                let others: f64 = values
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, v)| v)
                    .product();
                tnorm_backward(c, probs, adjoint * others, grad)?;
            }
        }
        Formula::Or(children) => {
            let values: Vec<f64> = children
                .iter()
                .map(|c| tnorm_probability(c, probs))
                .collect::<Result<_, _>>()?;
            for (i, c) in children.iter().enumerate() {
                let others: f64 = values
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, v)| 1.0 - v)
                    .product();
                tnorm_backward(c, probs, adjoint * others, grad)?;
            }
        }
        Formula::Implies(a, b) => {
            let va = tnorm_probability(a, probs)?;
            let vb = tnorm_probability(b, probs)?;
            tnorm_backward(a, probs, adjoint * (vb - 1.0), grad)?;
            tnorm_backward(b, probs, adjoint * va, grad)?;
        }
    }
    Ok(())
}

/// T-norm value together with its gradient per variable probability.
pub fn tnorm_with_gradient(
    formula: &Formula,
    probs: &BTreeMap<String, f64>,
) -> Result<(f64, BTreeMap<String, f64>), LossError> {
    let value = tnorm_probability(formula, probs)?;
    let mut grad = BTreeMap::new();
    tnorm_backward(formula, probs, 1.0, &mut grad)?;
    Ok((value, grad))
}

/// An ontology constraint held in its implication form for t-norm training.
///
/// The relaxation is syntax-sensitive, so the formula is kept exactly as the
/// lowering wrote it. By default only the typing implications participate;
/// the exactly-one encoding constraints can be included with `with_exactly_one`.
#[derive(Debug, Clone)]
pub struct TnormConstraint {
    formula: Formula,
    vars: StateVars,
}

impl TnormConstraint {
    /// Typing implications only.
    pub fn new(ontology: &Ontology) -> Self {
        TnormConstraint {
            formula: ontology.implication_constraint(),
            vars: ontology.state_vars(),
        }
    }

    /// The full lowered constraint, exactly-one conjuncts included.
    pub fn with_exactly_one(ontology: &Ontology) -> Self {
        TnormConstraint {
            formula: ontology.lower_to_constraint(),
            vars: ontology.state_vars(),
        }
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    fn probs(&self, d: &StateDistribution) -> Result<BTreeMap<String, f64>, LossError> {
        check_dims(&self.vars, d)?;
        let mut map = BTreeMap::new();
        for (name, &p) in self.vars.relation.iter().zip(d.relation_probs()) {
            map.insert(name.clone(), p);
        }
        for (name, &p) in self.vars.subject.iter().zip(d.subject_probs()) {
            map.insert(name.clone(), p);
        }
        for (name, &p) in self.vars.object.iter().zip(d.object_probs()) {
            map.insert(name.clone(), p);
        }
        Ok(map)
    }

    pub fn probability(&self, d: &StateDistribution) -> Result<f64, LossError> {
        tnorm_probability(&self.formula, &self.probs(d)?)
    }

    /// `-ln(max(eps, tnorm))` with gradients through the recursion.
    pub fn loss(&self, d: &StateDistribution, eps: f64) -> Result<LossValue, LossError> {
        let probs = self.probs(d)?;
        let (p, p_grad) = tnorm_with_gradient(&self.formula, &probs)?;
        let mut grad = DistributionGrad::zeros_like(d);
        let clamped = p.max(eps);
        // Below the clamp the loss is flat.
        let scale = if p >= eps { -1.0 / clamped } else { 0.0 };
        let fill = |names: &[String], out: &mut [f64]| {
            for (name, slot) in names.iter().zip(out.iter_mut()) {
                *slot = scale * p_grad.get(name).copied().unwrap_or(0.0);
            }
        };
        fill(&self.vars.subject, &mut grad.subject);
        fill(&self.vars.relation, &mut grad.relation);
        fill(&self.vars.object, &mut grad.object);
        Ok(LossValue {
            value: -clamped.ln(),
            grad,
            inconsistent: p <= 0.0,
        })
    }
}

/// `-ln(probs[gold])` with its gradient. A zero gold probability is clamped
/// to [`LOSS_EPSILON`] and counted in [`clamp_events`].
pub fn cross_entropy(probs: &[f64], gold: usize) -> Result<VectorLoss, LossError> {
    if gold >= probs.len() {
        return Err(LossError::BadGoldIndex {
            gold,
            classes: probs.len(),
        });
    }
    let mut p = probs[gold];
    if p <= 0.0 {
        CE_CLAMP_EVENTS.fetch_add(1, Ordering::Relaxed);
        p = LOSS_EPSILON;
    }
    let mut grad = vec![0.0; probs.len()];
    grad[gold] = -1.0 / p;
    Ok(VectorLoss {
        value: -p.ln(),
        grad,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;
    use crate::ontology::parse_ontology;

    fn kill_livesin() -> Ontology {
        parse_ontology(
            "entities Person, Location;\n\
             relations Kill(Person, Person), LivesIn(Person, Location);",
        )
        .unwrap()
    }

    fn reference_distribution() -> StateDistribution {
        StateDistribution::new(vec![0.3, 0.7], vec![0.6, 0.4], vec![0.1, 0.9]).unwrap()
    }

    #[test]
    fn worked_example_loss() {
        let constraint = CompiledConstraint::new(&kill_livesin()).unwrap();
        let d = reference_distribution();
        let wmc = constraint.satisfaction_probability(&d).unwrap();
        // 0.018 + 0.108; at two-decimal rounding the summands read 0.02 and
        // 0.11, giving the frequently quoted -ln(0.13) = 2.04.
        assert!((wmc - 0.126).abs() < 1e-12);
        let loss = constraint.loss(&d).unwrap();
        assert!((loss.value - 2.071473372030658).abs() < 1e-9);
        assert!((loss.value + 0.126f64.ln()).abs() < 1e-12);
        assert!(!loss.inconsistent);
    }

    #[test]
    fn loss_is_zero_on_fully_valid_mass() {
        let constraint = CompiledConstraint::new(&kill_livesin()).unwrap();
        let d = StateDistribution::new(vec![1.0, 0.0], vec![1.0, 0.0], vec![1.0, 0.0]).unwrap();
        let loss = constraint.loss(&d).unwrap();
        assert_eq!(loss.value, 0.0);
    }

    #[test]
    fn all_permitted_ontology_has_unit_wmc() {
        let o = parse_ontology(
            "entities A, B; relations R(A, A), R(A, B), R(B, A), R(B, B); none N;",
        )
        .unwrap();
        let constraint = CompiledConstraint::new(&o).unwrap();
        let d = StateDistribution::new(vec![0.2, 0.8], vec![0.55, 0.45], vec![0.7, 0.3]).unwrap();
        assert!((constraint.satisfaction_probability(&d).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(constraint.loss(&d).unwrap().value, 0.0);
    }

    #[test]
    fn empty_support_reports_inconsistent() {
        let o = parse_ontology("entities A; relations R;").unwrap();
        let constraint = CompiledConstraint::new(&o).unwrap();
        let d = StateDistribution::new(vec![1.0], vec![1.0], vec![1.0]).unwrap();
        let loss = constraint.loss(&d).unwrap();
        assert!(loss.value.is_infinite());
        assert!(loss.inconsistent);
        // The clamped variant stays finite for training.
        let clamped = constraint.loss_clamped(&d, LOSS_EPSILON).unwrap();
        assert!(clamped.value.is_finite());
        assert!(clamped.inconsistent);
    }

    #[test]
    fn tnorm_conjunction_multiplies() {
        let f = parse_formula("A & B").unwrap();
        let probs: BTreeMap<String, f64> =
            [("A".to_string(), 0.5), ("B".to_string(), 0.5)].into();
        assert!((tnorm_probability(&f, &probs).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn tnorm_diverges_from_wmc_on_shared_variables() {
        let f = parse_formula("A & !A").unwrap();
        let probs: BTreeMap<String, f64> = [("A".to_string(), 0.6)].into();
        let t = tnorm_probability(&f, &probs).unwrap();
        assert!((t - 0.24).abs() < 1e-15);

        let c = compile(&f, &["A".to_string()]).unwrap();
        let mut w = LiteralWeights::new();
        w.set_probability("A", 0.6);
        assert_eq!(c.wmc(&w).unwrap(), 0.0);
    }

    #[test]
    fn tnorm_implication_matches_worked_clause() {
        // Kill => Person_s & Person_o with independent literals:
        // 1 - 0.6 * (1 - 0.3 * 0.1) = 0.418.
        let f = parse_formula("Kill => Person_s & Person_o").unwrap();
        let probs: BTreeMap<String, f64> = [
            ("Kill".to_string(), 0.6),
            ("Person_s".to_string(), 0.3),
            ("Person_o".to_string(), 0.1),
        ]
        .into();
        let p = tnorm_probability(&f, &probs).unwrap();
        assert!((p - 0.418).abs() < 1e-12);
        assert!((-p.ln() - 0.872274).abs() < 1e-6);
    }

    #[test]
    fn tnorm_rules_make_implication_equal_material_form() {
        // [!A | B] and [A => B] both reduce to 1 - [A](1 - [B]).
        let implies = parse_formula("A => B").unwrap();
        let material = parse_formula("!A | B").unwrap();
        for (a, b) in [(0.1, 0.9), (0.6, 0.1), (0.42, 0.61), (1.0, 0.0)] {
            let probs: BTreeMap<String, f64> =
                [("A".to_string(), a), ("B".to_string(), b)].into();
            let x = tnorm_probability(&implies, &probs).unwrap();
            let y = tnorm_probability(&material, &probs).unwrap();
            assert!((x - y).abs() < 1e-15, "a={a} b={b}");
            assert!((x - (1.0 - a * (1.0 - b))).abs() < 1e-15);
        }
    }

    #[test]
    fn tnorm_loss_is_zero_at_certainty() {
        let o = kill_livesin();
        let t = TnormConstraint::new(&o);
        let d = StateDistribution::new(vec![1.0, 0.0], vec![1.0, 0.0], vec![1.0, 0.0]).unwrap();
        let loss = t.loss(&d, LOSS_EPSILON).unwrap();
        assert!(loss.value.abs() < 1e-12);
    }

    #[test]
    fn unmapped_variable_is_an_error() {
        let f = parse_formula("A & B").unwrap();
        let probs: BTreeMap<String, f64> = [("A".to_string(), 0.5)].into();
        assert_eq!(
            tnorm_probability(&f, &probs),
            Err(LossError::UnmappedVariable("B".into()))
        );
    }

    #[test]
    fn cross_entropy_basics() {
        let loss = cross_entropy(&[1.0, 0.0, 0.0], 0).unwrap();
        assert_eq!(loss.value, 0.0);

        let loss = cross_entropy(&[0.5, 0.5], 1).unwrap();
        assert!((loss.value - std::f64::consts::LN_2).abs() < 1e-12);
        assert!((loss.grad[1] + 2.0).abs() < 1e-12);
        assert_eq!(loss.grad[0], 0.0);

        assert!(matches!(
            cross_entropy(&[1.0], 3),
            Err(LossError::BadGoldIndex { .. })
        ));

        let before = clamp_events();
        let loss = cross_entropy(&[1.0, 0.0], 1).unwrap();
        assert!(loss.value.is_finite());
        assert!(clamp_events() > before);
    }
}
