//! Compiled constraint circuits: smooth, deterministic, decomposable DAGs on
//! which weighted model counting and its gradient cost one pass each.
//!
//! Structural invariants, which together make the bottom-up sum/product
//! evaluation equal the sum over satisfying assignments of the product of
//! literal weights:
//!
//! - decomposable: children of every product mention disjoint variable sets;
//! - deterministic: children of every sum are pairwise logically inconsistent;
//! - smooth: children of every sum mention the same variable set;
//! - topological arena: children ids strictly precede their parent's id.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::logic::Assignment;

mod compile;

pub use compile::{compile, compile_with, CompileOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("formula has {vars} variables, compilation cap is {cap}")]
    TooManyVariables { vars: usize, cap: usize },
    #[error("node budget of {budget} exceeded during compilation")]
    NodeBudgetExceeded { budget: usize },
    #[error("variable `{0}` is not in the compilation order")]
    VariableNotInOrder(String),
    #[error("duplicate variable `{0}` in the compilation order")]
    DuplicateOrderVariable(String),
    #[error("no weight given for variable `{0}`")]
    MissingWeight(String),
    #[error("assignment does not cover variable `{0}`")]
    MissingAssignment(String),
    #[error("bad circuit text at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// One arena node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    True,
    False,
    Literal { var: usize, positive: bool },
    Sum(Vec<usize>),
    Product(Vec<usize>),
}

/// Weights for positive and negative literals, keyed by variable name.
///
/// For the one-hot probability encoding, `set_probability` keeps
/// `w(!v) = 1 - w(v)`; `set` allows arbitrary non-negative pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LiteralWeights {
    map: BTreeMap<String, (f64, f64)>,
}

impl LiteralWeights {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, var: impl Into<String>, positive: f64, negative: f64) {
        self.map.insert(var.into(), (positive, negative));
    }

    pub fn set_probability(&mut self, var: impl Into<String>, p: f64) {
        self.set(var, p, 1.0 - p);
    }

    pub fn get(&self, var: &str) -> Option<(f64, f64)> {
        self.map.get(var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, (f64, f64))> {
        self.map.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// Partial derivatives of the weighted model count with respect to each
/// literal weight. Variables absent from the circuit have zero partials.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WmcGradient {
    map: BTreeMap<String, (f64, f64)>,
}

impl WmcGradient {
    /// d WMC / d w(v).
    pub fn positive(&self, var: &str) -> f64 {
        self.map.get(var).map_or(0.0, |g| g.0)
    }

    /// d WMC / d w(!v).
    pub fn negative(&self, var: &str) -> f64 {
        self.map.get(var).map_or(0.0, |g| g.1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, (f64, f64))> {
        self.map.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// A compiled circuit over an ordered variable list.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    vars: Vec<String>,
    nodes: Vec<Node>,
    root: usize,
}

impl Circuit {
    pub(crate) fn from_parts(vars: Vec<String>, nodes: Vec<Node>, root: usize) -> Self {
        Circuit { vars, nodes, root }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn weight_table(&self, weights: &LiteralWeights) -> Result<Vec<Option<(f64, f64)>>, CircuitError> {
        Ok(self
            .vars
            .iter()
            .map(|name| weights.get(name))
            .collect())
    }

    /// Weighted model count: the sum over satisfying assignments (of the
    /// compiled formula, over its own variables) of the product of literal
    /// weights.
    pub fn wmc(&self, weights: &LiteralWeights) -> Result<f64, CircuitError> {
        Ok(self.forward(weights)?[self.root])
    }

    fn forward(&self, weights: &LiteralWeights) -> Result<Vec<f64>, CircuitError> {
        let table = self.weight_table(weights)?;
        let mut values = vec![0.0f64; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            values[i] = match node {
                Node::True => 1.0,
                Node::False => 0.0,
                Node::Literal { var, positive } => {
                    let (pos, neg) = table[*var]
                        .ok_or_else(|| CircuitError::MissingWeight(self.vars[*var].clone()))?;
                    if *positive {
                        pos
                    } else {
                        neg
                    }
                }
                Node::Sum(children) => children.iter().map(|&c| values[c]).sum(),
                Node::Product(children) => children.iter().map(|&c| values[c]).product(),
            };
        }
        Ok(values)
    }

    /// Exact partials of the WMC with respect to every literal weight, via
    /// one reverse sweep over the arena.
    pub fn wmc_gradient(&self, weights: &LiteralWeights) -> Result<WmcGradient, CircuitError> {
        Ok(self.wmc_with_gradient(weights)?.1)
    }

    pub fn wmc_with_gradient(
        &self,
        weights: &LiteralWeights,
    ) -> Result<(f64, WmcGradient), CircuitError> {
        let values = self.forward(weights)?;
        let mut adjoint = vec![0.0f64; self.nodes.len()];
        adjoint[self.root] = 1.0;
        for i in (0..self.nodes.len()).rev() {
            let a = adjoint[i];
            if a == 0.0 {
                continue;
            }
            match &self.nodes[i] {
                Node::Sum(children) => {
                    for &c in children {
                        adjoint[c] += a;
                    }
                }
                Node::Product(children) => {
                    // Prefix/suffix products avoid dividing by zero-valued
                    // children.
                    let k = children.len();
                    let mut prefix = vec![1.0; k + 1];
                    for (j, &c) in children.iter().enumerate() {
                        prefix[j + 1] = prefix[j] * values[c];
                    }
                    let mut suffix = vec![1.0; k + 1];
                    for j in (0..k).rev() {
                        suffix[j] = suffix[j + 1] * values[children[j]];
                    }
                    for (j, &c) in children.iter().enumerate() {
                        adjoint[c] += a * prefix[j] * suffix[j + 1];
                    }
                }
                _ => {}
            }
        }
        let mut grad = WmcGradient::default();
        for (i, node) in self.nodes.iter().enumerate() {
            if let Node::Literal { var, positive } = node {
                let entry = grad
                    .map
                    .entry(self.vars[*var].clone())
                    .or_insert((0.0, 0.0));
                if *positive {
                    entry.0 += adjoint[i];
                } else {
                    entry.1 += adjoint[i];
                }
            }
        }
        Ok((values[self.root], grad))
    }

    /// Unweighted model count over the compiled formula's variables
    /// (equivalently the WMC with every literal weight set to one).
    pub fn model_count(&self) -> u64 {
        let mut values = vec![0u128; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            values[i] = match node {
                Node::True | Node::Literal { .. } => 1,
                Node::False => 0,
                Node::Sum(children) => children.iter().map(|&c| values[c]).sum(),
                Node::Product(children) => children.iter().map(|&c| values[c]).product(),
            };
        }
        u64::try_from(values[self.root]).expect("model count exceeds u64")
    }

    /// Evaluate the circuit as a Boolean function of a total assignment.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<bool, CircuitError> {
        let mut values = vec![false; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            values[i] = match node {
                Node::True => true,
                Node::False => false,
                Node::Literal { var, positive } => {
                    let v = assignment
                        .get(&self.vars[*var])
                        .ok_or_else(|| CircuitError::MissingAssignment(self.vars[*var].clone()))?;
                    v == *positive
                }
                Node::Sum(children) => children.iter().any(|&c| values[c]),
                Node::Product(children) => children.iter().all(|&c| values[c]),
            };
        }
        Ok(values[self.root])
    }

    /// Variable-index sets mentioned by each node, as bitmasks.
    fn varsets(&self) -> Result<Vec<u64>, String> {
        if self.vars.len() > 64 {
            return Err("more than 64 variables".into());
        }
        let mut sets = vec![0u64; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            sets[i] = match node {
                Node::True | Node::False => 0,
                Node::Literal { var, .. } => 1u64 << var,
                Node::Sum(children) | Node::Product(children) => {
                    children.iter().map(|&c| sets[c]).fold(0, |a, b| a | b)
                }
            };
        }
        Ok(sets)
    }

    /// Check the structural invariants. Determinism is verified exhaustively
    /// when at most 20 variables are mentioned, and skipped otherwise.
    pub fn check_invariants(&self) -> Result<(), String> {
        for (i, node) in self.nodes.iter().enumerate() {
            if let Node::Sum(children) | Node::Product(children) = node {
                if children.is_empty() {
                    return Err(format!("node {i} has no children"));
                }
                for &c in children {
                    if c >= i {
                        return Err(format!("node {i} has child {c} not preceding it"));
                    }
                }
            }
        }
        if self.root >= self.nodes.len() {
            return Err(format!("root {} out of range", self.root));
        }

        let sets = self.varsets()?;
        for (i, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Product(children) => {
                    let mut seen = 0u64;
                    for &c in children {
                        if seen & sets[c] != 0 {
                            return Err(format!("product {i} is not decomposable"));
                        }
                        seen |= sets[c];
                    }
                }
                Node::Sum(children) => {
                    let first = sets[children[0]];
                    if children.iter().any(|&c| sets[c] != first) {
                        return Err(format!("sum {i} is not smooth"));
                    }
                }
                _ => {}
            }
        }

        // Exhaustive determinism check over every mentioned variable.
        let mentioned: Vec<usize> = (0..self.vars.len())
            .filter(|v| self.nodes.iter().any(
                |n| matches!(n, Node::Literal { var, .. } if var == v),
            ))
            .collect();
        if mentioned.len() > 20 {
            return Ok(());
        }
        for bits in 0u64..(1u64 << mentioned.len()) {
            let mut values = vec![false; self.nodes.len()];
            for (i, node) in self.nodes.iter().enumerate() {
                values[i] = match node {
                    Node::True => true,
                    Node::False => false,
                    Node::Literal { var, positive } => {
                        let pos = mentioned.iter().position(|v| v == var).unwrap();
                        ((bits >> pos) & 1 == 1) == *positive
                    }
                    Node::Sum(children) => children.iter().any(|&c| values[c]),
                    Node::Product(children) => children.iter().all(|&c| values[c]),
                };
            }
            for (i, node) in self.nodes.iter().enumerate() {
                if let Node::Sum(children) = node {
                    if children.iter().filter(|&&c| values[c]).count() > 1 {
                        return Err(format!("sum {i} is not deterministic"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Line-oriented text dump: a `vars` header, then one node per line as
    /// `id kind args...` in topological order with the root last. Nodes not
    /// reachable from the root are dropped.
    pub fn to_text(&self) -> String {
        let mut reachable = vec![false; self.nodes.len()];
        reachable[self.root] = true;
        for i in (0..self.nodes.len()).rev() {
            if !reachable[i] {
                continue;
            }
            if let Node::Sum(children) | Node::Product(children) = &self.nodes[i] {
                for &c in children {
                    reachable[c] = true;
                }
            }
        }
        let mut renumber = vec![usize::MAX; self.nodes.len()];
        let mut next = 0;
        for i in 0..self.nodes.len() {
            if reachable[i] {
                renumber[i] = next;
                next += 1;
            }
        }

        let mut out = String::from("vars");
        for v in &self.vars {
            out.push(' ');
            out.push_str(v);
        }
        out.push('\n');
        for (i, node) in self.nodes.iter().enumerate() {
            if !reachable[i] {
                continue;
            }
            let id = renumber[i];
            match node {
                Node::True => out.push_str(&format!("{id} T\n")),
                Node::False => out.push_str(&format!("{id} F\n")),
                Node::Literal { var, positive } => {
                    let sign = if *positive { '+' } else { '-' };
                    out.push_str(&format!("{id} L {var} {sign}\n"));
                }
                Node::Sum(children) => {
                    let ids: Vec<String> =
                        children.iter().map(|&c| renumber[c].to_string()).collect();
                    out.push_str(&format!("{id} S {}\n", ids.join(" ")));
                }
                Node::Product(children) => {
                    let ids: Vec<String> =
                        children.iter().map(|&c| renumber[c].to_string()).collect();
                    out.push_str(&format!("{id} P {}\n", ids.join(" ")));
                }
            }
        }
        out
    }

    /// Parse the `to_text` format.
    pub fn from_text(text: &str) -> Result<Self, CircuitError> {
        let mut vars: Option<Vec<String>> = None;
        let mut nodes: Vec<Node> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let err = |msg: &str| CircuitError::Parse {
                line,
                msg: msg.to_string(),
            };
            let trimmed = raw.trim();
            if trimmed.is_empty() {
                continue;
            }
            let mut parts = trimmed.split_whitespace();
            if vars.is_none() {
                if parts.next() != Some("vars") {
                    return Err(err("expected `vars` header"));
                }
                vars = Some(parts.map(str::to_string).collect());
                continue;
            }
            let var_count = vars.as_ref().unwrap().len();
            let id: usize = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| err("expected a node id"))?;
            if id != nodes.len() {
                return Err(err("node ids must be sequential"));
            }
            let kind = parts.next().ok_or_else(|| err("expected a node kind"))?;
            let node = match kind {
                "T" => Node::True,
                "F" => Node::False,
                "L" => {
                    let var: usize = parts
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| err("expected a variable index"))?;
                    if var >= var_count {
                        return Err(err("variable index out of range"));
                    }
                    let positive = match parts.next() {
                        Some("+") => true,
                        Some("-") => false,
                        _ => return Err(err("expected `+` or `-`")),
                    };
                    Node::Literal { var, positive }
                }
                "S" | "P" => {
                    let mut children = Vec::new();
                    for t in parts.by_ref() {
                        let c: usize = t.parse().map_err(|_| err("expected a child id"))?;
                        if c >= id {
                            return Err(err("child id must precede the node"));
                        }
                        children.push(c);
                    }
                    if children.is_empty() {
                        return Err(err("sum/product needs at least one child"));
                    }
                    if kind == "S" {
                        Node::Sum(children)
                    } else {
                        Node::Product(children)
                    }
                }
                other => return Err(err(&format!("unknown node kind `{other}`"))),
            };
            if parts.next().is_some() {
                return Err(err("trailing tokens"));
            }
            nodes.push(node);
        }
        let vars = vars.ok_or(CircuitError::Parse {
            line: 0,
            msg: "missing `vars` header".into(),
        })?;
        if nodes.is_empty() {
            return Err(CircuitError::Parse {
                line: 0,
                msg: "circuit has no nodes".into(),
            });
        }
        let root = nodes.len() - 1;
        Ok(Circuit { vars, nodes, root })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{exactly_one, parse_formula, Formula};

    fn order(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn true_compiles_to_a_single_node() {
        let c = compile(&Formula::True, &order(&["a", "b"])).unwrap();
        assert_eq!(c.node_count(), 1);
        assert_eq!(c.nodes()[0], Node::True);
        let mut w = LiteralWeights::new();
        w.set_probability("a", 0.2);
        w.set_probability("b", 0.9);
        assert_eq!(c.wmc(&w).unwrap(), 1.0);
    }

    #[test]
    fn unsatisfiable_circuit_counts_zero() {
        let f = parse_formula("a & !a").unwrap();
        let c = compile(&f, &order(&["a"])).unwrap();
        let mut w = LiteralWeights::new();
        w.set_probability("a", 0.6);
        assert_eq!(c.wmc(&w).unwrap(), 0.0);
        assert_eq!(c.model_count(), 0);
    }

    #[test]
    fn single_literal_partials() {
        let f = parse_formula("v").unwrap();
        let c = compile(&f, &order(&["v"])).unwrap();
        let mut w = LiteralWeights::new();
        w.set_probability("v", 0.3);
        let (value, grad) = c.wmc_with_gradient(&w).unwrap();
        assert!((value - 0.3).abs() < 1e-15);
        assert_eq!(grad.positive("v"), 1.0);
        assert_eq!(grad.negative("v"), 0.0);
    }

    #[test]
    fn constant_circuit_has_zero_partials() {
        let c = compile(&Formula::True, &order(&["a"])).unwrap();
        let grad = c.wmc_gradient(&LiteralWeights::new()).unwrap();
        assert_eq!(grad.positive("a"), 0.0);
        assert_eq!(grad.negative("a"), 0.0);
    }

    #[test]
    fn tautology_over_one_variable_counts_two() {
        let f = parse_formula("a | !a").unwrap();
        let c = compile(&f, &order(&["a"])).unwrap();
        assert_eq!(c.model_count(), 2);
        c.check_invariants().unwrap();
        // With arbitrary weights, the count becomes w(a) + w(!a).
        let mut w = LiteralWeights::new();
        w.set(String::from("a"), 0.25, 0.5);
        assert!((c.wmc(&w).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn exactly_one_counts_n() {
        for n in 1..=6usize {
            let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
            let c = compile(&exactly_one(&names), &names).unwrap();
            assert_eq!(c.model_count(), n as u64, "n = {n}");
            c.check_invariants().unwrap();
        }
    }

    #[test]
    fn wmc_is_affine_in_each_literal_weight() {
        let f = parse_formula("(a => b & c) & (b | !c)").unwrap();
        let names = order(&["a", "b", "c"]);
        let c = compile(&f, &names).unwrap();
        for target in ["a", "b", "c"] {
            let eval = |p: f64| {
                let mut w = LiteralWeights::new();
                for name in ["a", "b", "c"] {
                    w.set_probability(name, 0.37);
                }
                w.set(target, p, 0.41);
                c.wmc(&w).unwrap()
            };
            let (y0, y1, y2) = (eval(0.0), eval(0.5), eval(1.0));
            assert!(
                (y1 - 0.5 * (y0 + y2)).abs() < 1e-12,
                "not affine in {target}"
            );
        }
    }

    #[test]
    fn compilation_is_idempotent() {
        let f = parse_formula("(a => b) & (b => c) & (c | a)").unwrap();
        let names = order(&["a", "b", "c"]);
        let c1 = compile(&f, &names).unwrap();
        let c2 = compile(&f, &names).unwrap();
        assert_eq!(c1, c2);
    }

    #[test]
    fn node_budget_is_enforced() {
        let f = parse_formula("a1 & a2 & a3 & a4").unwrap();
        let names = order(&["a1", "a2", "a3", "a4"]);
        let opts = CompileOptions {
            node_budget: 3,
            ..CompileOptions::default()
        };
        assert_eq!(
            compile_with(&f, &names, &opts),
            Err(CircuitError::NodeBudgetExceeded { budget: 3 })
        );
    }

    #[test]
    fn unknown_variable_is_rejected() {
        let f = parse_formula("a & b").unwrap();
        assert_eq!(
            compile(&f, &order(&["a"])),
            Err(CircuitError::VariableNotInOrder("b".into()))
        );
    }

    #[test]
    fn missing_weight_is_reported() {
        let f = parse_formula("a & b").unwrap();
        let c = compile(&f, &order(&["a", "b"])).unwrap();
        let mut w = LiteralWeights::new();
        w.set_probability("a", 0.5);
        assert_eq!(c.wmc(&w), Err(CircuitError::MissingWeight("b".into())));
    }

    #[test]
    fn text_round_trip_preserves_semantics() {
        let f = parse_formula("(a => b & c) | (!a & !b & !c)").unwrap();
        let names = order(&["a", "b", "c"]);
        let c = compile(&f, &names).unwrap();
        let text = c.to_text();
        let parsed = Circuit::from_text(&text).unwrap();
        assert_eq!(parsed.to_text(), text);
        let mut w = LiteralWeights::new();
        for (i, name) in ["a", "b", "c"].iter().enumerate() {
            w.set_probability(*name, 0.2 + 0.3 * i as f64);
        }
        assert!((c.wmc(&w).unwrap() - parsed.wmc(&w).unwrap()).abs() < 1e-15);
        assert_eq!(c.model_count(), parsed.model_count());
    }
}
