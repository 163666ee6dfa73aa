//! Inference over a state distribution: unconstrained per-factor argmax, or
//! the most probable state within an explicit valid set. The valid-state sets
//! here are small enough that exhaustive search over them is exact, so no
//! integer-program solver is involved.

use thiserror::Error;

use crate::statespace::{State, StateDistribution, StateSpaceError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecodeError {
    #[error("constrained decoding requires a non-empty valid-state set")]
    EmptyValidStates,
    #[error(transparent)]
    StateSpace(#[from] StateSpaceError),
}

/// Inference regime: `N` decodes without constraints, `I` restricts to valid
/// states, `T` decodes a transductively trained model without constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Regime {
    Unconstrained,
    Constrained,
    Transductive,
}

impl Regime {
    pub fn short_name(&self) -> &'static str {
        match self {
            Regime::Unconstrained => "N",
            Regime::Constrained => "I",
            Regime::Transductive => "T",
        }
    }

    pub fn parse(text: &str) -> Option<Regime> {
        match text {
            "N" | "n" => Some(Regime::Unconstrained),
            "I" | "i" => Some(Regime::Constrained),
            "T" | "t" => Some(Regime::Transductive),
            _ => None,
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.short_name())
    }
}

/// A decoded state with its probability under the distribution it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub state: State,
    pub probability: f64,
    pub constrained: bool,
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Per-factor argmax; ties go to the lowest class index.
pub fn decode_unconstrained(d: &StateDistribution) -> Prediction {
    let state = State::new(
        argmax(d.subject_probs()),
        argmax(d.relation_probs()),
        argmax(d.object_probs()),
    );
    let probability = d.state_probability(&state).expect("argmax in range");
    Prediction {
        state,
        probability,
        constrained: false,
    }
}

/// Most probable state among `valid_states`; ties go to the lexicographically
/// smallest state. `valid_states` must be sorted for the tie-break to be
/// meaningful (as returned by `Ontology::valid_states`).
pub fn decode_constrained(
    d: &StateDistribution,
    valid_states: &[State],
) -> Result<Prediction, DecodeError> {
    if valid_states.is_empty() {
        return Err(DecodeError::EmptyValidStates);
    }
    let mut best: Option<(State, f64)> = None;
    for &state in valid_states {
        let p = d.state_probability(&state)?;
        let better = match best {
            None => true,
            Some((_, bp)) => p > bp,
        };
        if better {
            best = Some((state, p));
        }
    }
    let (state, probability) = best.unwrap();
    Ok(Prediction {
        state,
        probability,
        constrained: true,
    })
}
