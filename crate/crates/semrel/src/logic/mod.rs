//! Propositional formulas: AST, concrete syntax, evaluation, and brute-force
//! model enumeration.
//!
//! Enumeration is deliberately naive — it is the trusted oracle against which
//! the compiled-circuit path is checked, so it must stay independent of it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

mod parse;

pub use parse::parse_formula;

/// Default cap on the number of variables `enumerate_models` will accept.
pub const DEFAULT_ENUMERATION_CAP: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("assignment does not cover variable `{0}`")]
    MissingVariable(String),
    #[error("formula has {vars} variables, enumeration cap is {cap}")]
    TooManyVariables { vars: usize, cap: usize },
    #[error("universe is missing formula variable `{0}`")]
    VariableOutsideUniverse(String),
}

/// A propositional formula over named variables.
///
/// `And`/`Or` are n-ary so that wide constraints (exactly-one over a class
/// family) stay shallow. Both must have at least one child.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Var(String),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Self {
        Formula::Var(name.into())
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    /// N-ary conjunction; `children` must be non-empty.
    pub fn and(children: Vec<Formula>) -> Self {
        debug_assert!(!children.is_empty(), "And requires at least one child");
        Formula::And(children)
    }

    /// N-ary disjunction; `children` must be non-empty.
    pub fn or(children: Vec<Formula>) -> Self {
        debug_assert!(!children.is_empty(), "Or requires at least one child");
        Formula::Or(children)
    }

    pub fn implies(antecedent: Formula, consequent: Formula) -> Self {
        Formula::Implies(Box::new(antecedent), Box::new(consequent))
    }

    /// The set of variable names mentioned anywhere in the formula.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Var(name) => {
                out.insert(name.clone());
            }
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(children) | Formula::Or(children) => {
                for c in children {
                    c.collect_vars(out);
                }
            }
            Formula::Implies(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Truth-table semantics; `Implies(x, y)` is `!x | y`.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<bool, LogicError> {
        Ok(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Var(name) => assignment
                .get(name)
                .ok_or_else(|| LogicError::MissingVariable(name.clone()))?,
            Formula::Not(f) => !f.evaluate(assignment)?,
            Formula::And(children) => {
                let mut v = true;
                for c in children {
                    v &= c.evaluate(assignment)?;
                }
                v
            }
            Formula::Or(children) => {
                let mut v = false;
                for c in children {
                    v |= c.evaluate(assignment)?;
                }
                v
            }
            Formula::Implies(a, b) => !a.evaluate(assignment)? | b.evaluate(assignment)?,
        })
    }

    /// All satisfying assignments over `vars(self)`, in lexicographic order
    /// (by variable name, `false < true`). Capped at
    /// [`DEFAULT_ENUMERATION_CAP`] variables.
    pub fn enumerate_models(&self) -> Result<Vec<Assignment>, LogicError> {
        self.enumerate_models_capped(DEFAULT_ENUMERATION_CAP)
    }

    pub fn enumerate_models_capped(&self, cap: usize) -> Result<Vec<Assignment>, LogicError> {
        let universe: Vec<String> = self.vars().into_iter().collect();
        self.enumerate_over_sorted(&universe, cap)
    }

    /// All satisfying assignments over an explicit variable universe, which
    /// must contain every variable of the formula. Variables outside the
    /// formula are free, so each doubles the model count.
    pub fn enumerate_models_over(
        &self,
        universe: &BTreeSet<String>,
    ) -> Result<Vec<Assignment>, LogicError> {
        for v in self.vars() {
            if !universe.contains(&v) {
                return Err(LogicError::VariableOutsideUniverse(v));
            }
        }
        let sorted: Vec<String> = universe.iter().cloned().collect();
        self.enumerate_over_sorted(&sorted, DEFAULT_ENUMERATION_CAP)
    }

    fn enumerate_over_sorted(
        &self,
        universe: &[String],
        cap: usize,
    ) -> Result<Vec<Assignment>, LogicError> {
        let n = universe.len();
        if n > cap {
            return Err(LogicError::TooManyVariables { vars: n, cap });
        }
        let mut models = Vec::new();
        // universe[0] is the most significant bit, so counting upward yields
        // lexicographic order with false < true.
        for bits in 0u64..(1u64 << n) {
            let mut a = Assignment::new();
            for (i, name) in universe.iter().enumerate() {
                let value = (bits >> (n - 1 - i)) & 1 == 1;
                a.set(name.clone(), value);
            }
            if self.evaluate(&a)? {
                models.push(a);
            }
        }
        Ok(models)
    }

    /// Canonical prefix rendering, used for golden fixtures.
    pub fn to_prefix(&self) -> String {
        match self {
            Formula::True => "true".to_string(),
            Formula::False => "false".to_string(),
            Formula::Var(name) => name.clone(),
            Formula::Not(f) => format!("(! {})", f.to_prefix()),
            Formula::And(children) => {
                let parts: Vec<String> = children.iter().map(|c| c.to_prefix()).collect();
                format!("(& {})", parts.join(" "))
            }
            Formula::Or(children) => {
                let parts: Vec<String> = children.iter().map(|c| c.to_prefix()).collect();
                format!("(| {})", parts.join(" "))
            }
            Formula::Implies(a, b) => format!("(=> {} {})", a.to_prefix(), b.to_prefix()),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 0,
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            _ => 3,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let me = self.precedence();
        let parens = me < min;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Formula::True => write!(f, "true")?,
            Formula::False => write!(f, "false")?,
            Formula::Var(name) => write!(f, "{name}")?,
            Formula::Not(inner) => {
                write!(f, "!")?;
                inner.fmt_prec(f, 3)?;
            }
            Formula::And(children) => {
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        write!(f, " & ")?;
                    }
                    c.fmt_prec(f, 3)?;
                }
            }
            Formula::Or(children) => {
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        write!(f, " | ")?;
                    }
                    c.fmt_prec(f, 2)?;
                }
            }
            Formula::Implies(a, b) => {
                // Right-associative: the antecedent needs one level more.
                a.fmt_prec(f, 1)?;
                write!(f, " => ")?;
                b.fmt_prec(f, 0)?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    /// Infix rendering that parses back to the same AST.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Exactly one of `names` is true. Empty input is unsatisfiable; a single
/// name degenerates to that variable.
pub fn exactly_one(names: &[String]) -> Formula {
    match names.len() {
        0 => Formula::False,
        1 => Formula::var(names[0].clone()),
        _ => Formula::or(
            (0..names.len())
                .map(|i| {
                    Formula::and(
                        names
                            .iter()
                            .enumerate()
                            .map(|(j, name)| {
                                if i == j {
                                    Formula::var(name.clone())
                                } else {
                                    Formula::not(Formula::var(name.clone()))
                                }
                            })
                            .collect(),
                    )
                })
                .collect(),
        ),
    }
}

/// A total truth assignment, ordered by variable name.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Assignment(BTreeMap<String, bool>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, bool)>,
        S: Into<String>,
    {
        Assignment(pairs.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn set(&mut self, name: impl Into<String>, value: bool) {
        self.0.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<bool> {
        self.0.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Names assigned `true`, in name order.
    pub fn true_vars(&self) -> Vec<&str> {
        self.0
            .iter()
            .filter(|(_, v)| **v)
            .map(|(k, _)| k.as_str())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(name: &str) -> Formula {
        Formula::var(name)
    }

    #[test]
    fn parses_implication_over_conjunction() {
        let f = parse_formula("Kill => PerS & PerO").unwrap();
        assert_eq!(
            f,
            Formula::implies(v("Kill"), Formula::and(vec![v("PerS"), v("PerO")]))
        );
    }

    #[test]
    fn parses_negation_inside_disjunction() {
        let f = parse_formula("!a | a").unwrap();
        assert_eq!(f, Formula::or(vec![Formula::not(v("a")), v("a")]));
    }

    #[test]
    fn implication_is_right_associative() {
        let chained = parse_formula("a => b => c").unwrap();
        let explicit = parse_formula("a => (b => c)").unwrap();
        assert_eq!(chained, explicit);
        assert_eq!(
            chained,
            Formula::implies(v("a"), Formula::implies(v("b"), v("c")))
        );
    }

    #[test]
    fn precedence_not_over_and_over_or() {
        let f = parse_formula("!a & b | c").unwrap();
        assert_eq!(
            f,
            Formula::or(vec![
                Formula::and(vec![Formula::not(v("a")), v("b")]),
                v("c")
            ])
        );
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_formula("a &\n& b").unwrap_err();
        match err {
            LogicError::Syntax { line, col, .. } => {
                assert_eq!(line, 2);
                assert_eq!(col, 1);
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn evaluate_requires_all_variables() {
        let f = parse_formula("a & b").unwrap();
        let a = Assignment::from_pairs([("a", true)]);
        assert_eq!(f.evaluate(&a), Err(LogicError::MissingVariable("b".into())));
    }

    #[test]
    fn contradiction_is_always_false() {
        let f = parse_formula("p & !p").unwrap();
        for value in [false, true] {
            let a = Assignment::from_pairs([("p", value)]);
            assert!(!f.evaluate(&a).unwrap());
        }
    }

    #[test]
    fn enumerate_false_and_true() {
        assert!(Formula::False.enumerate_models().unwrap().is_empty());
        // `true` over an explicit one-variable universe has both assignments.
        let universe: BTreeSet<String> = [String::from("a")].into();
        let models = Formula::True.enumerate_models_over(&universe).unwrap();
        assert_eq!(models.len(), 2);
    }

    #[test]
    fn enumerate_exactly_one_counts() {
        for n in 1..=6usize {
            let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
            let f = exactly_one(&names);
            assert_eq!(f.enumerate_models().unwrap().len(), n, "n = {n}");
        }
    }

    #[test]
    fn model_order_is_lexicographic() {
        let f = parse_formula("a | b").unwrap();
        let models = f.enumerate_models().unwrap();
        let expected = vec![
            Assignment::from_pairs([("a", false), ("b", true)]),
            Assignment::from_pairs([("a", true), ("b", false)]),
            Assignment::from_pairs([("a", true), ("b", true)]),
        ];
        assert_eq!(models, expected);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let names: Vec<String> = (0..10).map(|i| format!("v{i}")).collect();
        let f = Formula::or(names.iter().map(|n| v(n)).collect());
        assert_eq!(
            f.enumerate_models_capped(9),
            Err(LogicError::TooManyVariables { vars: 10, cap: 9 })
        );
    }

    /// An evaluator written independently of `Formula::evaluate`, mapping
    /// truth values through 0/1 arithmetic.
    fn arith_eval(f: &Formula, a: &Assignment) -> i32 {
        match f {
            Formula::True => 1,
            Formula::False => 0,
            Formula::Var(name) => i32::from(a.get(name).unwrap()),
            Formula::Not(inner) => 1 - arith_eval(inner, a),
            Formula::And(children) => children.iter().map(|c| arith_eval(c, a)).min().unwrap(),
            Formula::Or(children) => children.iter().map(|c| arith_eval(c, a)).max().unwrap(),
            Formula::Implies(x, y) => (1 - arith_eval(x, a)).max(arith_eval(y, a)),
        }
    }

    fn leaf(vars: &'static [&'static str]) -> BoxedStrategy<Formula> {
        prop_oneof![
            8 => proptest::sample::select(vars).prop_map(Formula::var),
            1 => Just(Formula::True),
            1 => Just(Formula::False),
        ]
        .boxed()
    }

    pub(crate) fn arb_formula(vars: &'static [&'static str]) -> BoxedStrategy<Formula> {
        leaf(vars)
            .prop_recursive(4, 24, 4, |inner| {
                prop_oneof![
                    inner.clone().prop_map(Formula::not),
                    proptest::collection::vec(inner.clone(), 1..4).prop_map(Formula::and),
                    proptest::collection::vec(inner.clone(), 1..4).prop_map(Formula::or),
                    (inner.clone(), inner).prop_map(|(a, b)| Formula::implies(a, b)),
                ]
            })
            .boxed()
    }

    const EIGHT_VARS: &[&str] = &["a", "b", "c", "d", "e", "f", "g", "h"];

    proptest! {
        #[test]
        fn evaluate_matches_independent_truth_table(f in arb_formula(EIGHT_VARS)) {
            let universe: BTreeSet<String> = EIGHT_VARS.iter().map(|s| s.to_string()).collect();
            let names: Vec<String> = universe.iter().cloned().collect();
            for bits in 0u32..(1 << names.len()) {
                let a = Assignment::from_pairs(
                    names
                        .iter()
                        .enumerate()
                        .map(|(i, n)| (n.clone(), (bits >> i) & 1 == 1)),
                );
                prop_assert_eq!(i32::from(f.evaluate(&a).unwrap()), arith_eval(&f, &a));
            }
        }

        #[test]
        fn display_round_trips(f in arb_formula(EIGHT_VARS)) {
            let printed = f.to_string();
            let reparsed = parse_formula(&printed).unwrap();
            prop_assert_eq!(f, reparsed);
        }

        #[test]
        fn membership_matches_evaluate(f in arb_formula(&["a", "b", "c", "d"])) {
            let universe = f.vars();
            let models: std::collections::BTreeSet<Assignment> =
                f.enumerate_models().unwrap().into_iter().collect();
            let names: Vec<String> = universe.iter().cloned().collect();
            for bits in 0u32..(1 << names.len()) {
                let a = Assignment::from_pairs(
                    names
                        .iter()
                        .enumerate()
                        .map(|(i, n)| (n.clone(), (bits >> i) & 1 == 1)),
                );
                prop_assert_eq!(f.evaluate(&a).unwrap(), models.contains(&a));
            }
        }
    }
}
