//! Formula-to-circuit compilation.
//!
//! The formula is first built into a reduced ordered BDD by Shannon expansion
//! over the given variable order with hash-consing, then unfolded into a
//! sum/product arena. Each BDD decision node becomes a two-way sum of
//! products guarded by opposite literals, so determinism and decomposability
//! hold by construction; a smoothing pass inserts `(v | !v)` marginal factors
//! for variables a branch skips, and the root is padded the same way up to
//! the formula's full variable set.

use std::collections::HashMap;

use crate::logic::Formula;

use super::{Circuit, CircuitError, Node};

/// Compilation limits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompileOptions {
    /// Maximum number of variables in the order (at most 64).
    pub var_cap: usize,
    /// Abort once the BDD grows past this many nodes.
    pub node_budget: usize,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            var_cap: 64,
            node_budget: 1_000_000,
        }
    }
}

/// Compile with default limits.
pub fn compile(formula: &Formula, order: &[String]) -> Result<Circuit, CircuitError> {
    compile_with(formula, order, &CompileOptions::default())
}

/// Compile `formula` over `order`, which must cover all of its variables.
pub fn compile_with(
    formula: &Formula,
    order: &[String],
    options: &CompileOptions,
) -> Result<Circuit, CircuitError> {
    let cap = options.var_cap.min(64);
    if order.len() > cap {
        return Err(CircuitError::TooManyVariables {
            vars: order.len(),
            cap,
        });
    }
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, name) in order.iter().enumerate() {
        if index.insert(name.as_str(), i).is_some() {
            return Err(CircuitError::DuplicateOrderVariable(name.clone()));
        }
    }
    let mut formula_vars = 0u64;
    for v in formula.vars() {
        match index.get(v.as_str()) {
            Some(&i) => formula_vars |= 1u64 << i,
            None => return Err(CircuitError::VariableNotInOrder(v)),
        }
    }

    let mut bdd = Bdd::new(options.node_budget);
    let root = bdd.build(formula, &index)?;

    let mut unfold = Unfold {
        bdd: &bdd,
        arena: Arena::default(),
        memo: HashMap::new(),
    };
    let (converted, varset) = unfold.convert(root);
    let root_id = unfold.pad(converted, varset, formula_vars);
    Ok(Circuit::from_parts(
        order.to_vec(),
        unfold.arena.nodes,
        root_id,
    ))
}

const FALSE: u32 = 0;
const TRUE: u32 = 1;

/// Reduced ordered BDD with hash-consed nodes. Ids 0 and 1 are the false and
/// true terminals; internal node ids start at 2.
struct Bdd {
    nodes: Vec<BddNode>,
    unique: HashMap<BddNode, u32>,
    not_memo: HashMap<u32, u32>,
    and_memo: HashMap<(u32, u32), u32>,
    or_memo: HashMap<(u32, u32), u32>,
    budget: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct BddNode {
    var: usize,
    lo: u32,
    hi: u32,
}

impl Bdd {
    fn new(budget: usize) -> Self {
        Bdd {
            nodes: Vec::new(),
            unique: HashMap::new(),
            not_memo: HashMap::new(),
            and_memo: HashMap::new(),
            or_memo: HashMap::new(),
            budget,
        }
    }

    fn node(&self, id: u32) -> BddNode {
        self.nodes[id as usize - 2]
    }

    /// Decision level; terminals sort past every variable.
    fn level(&self, id: u32) -> usize {
        if id <= TRUE {
            usize::MAX
        } else {
            self.node(id).var
        }
    }

    fn mk(&mut self, var: usize, lo: u32, hi: u32) -> Result<u32, CircuitError> {
        if lo == hi {
            return Ok(lo);
        }
        let key = BddNode { var, lo, hi };
        if let Some(&id) = self.unique.get(&key) {
            return Ok(id);
        }
        if self.nodes.len() >= self.budget {
            return Err(CircuitError::NodeBudgetExceeded {
                budget: self.budget,
            });
        }
        let id = (self.nodes.len() + 2) as u32;
        self.nodes.push(key);
        self.unique.insert(key, id);
        Ok(id)
    }

    fn build(&mut self, f: &Formula, index: &HashMap<&str, usize>) -> Result<u32, CircuitError> {
        Ok(match f {
            Formula::True => TRUE,
            Formula::False => FALSE,
            Formula::Var(name) => {
                let var = index[name.as_str()];
                self.mk(var, FALSE, TRUE)?
            }
            Formula::Not(inner) => {
                let x = self.build(inner, index)?;
                self.not(x)?
            }
            Formula::And(children) => {
                let mut acc = TRUE;
                for c in children {
                    let x = self.build(c, index)?;
                    acc = self.and(acc, x)?;
                }
                acc
            }
            Formula::Or(children) => {
                let mut acc = FALSE;
                for c in children {
                    let x = self.build(c, index)?;
                    acc = self.or(acc, x)?;
                }
                acc
            }
            Formula::Implies(a, b) => {
                let a = self.build(a, index)?;
                let b = self.build(b, index)?;
                let na = self.not(a)?;
                self.or(na, b)?
            }
        })
    }

    fn not(&mut self, x: u32) -> Result<u32, CircuitError> {
        match x {
            FALSE => return Ok(TRUE),
            TRUE => return Ok(FALSE),
            _ => {}
        }
        if let Some(&r) = self.not_memo.get(&x) {
            return Ok(r);
        }
        let n = self.node(x);
        let lo = self.not(n.lo)?;
        let hi = self.not(n.hi)?;
        let r = self.mk(n.var, lo, hi)?;
        self.not_memo.insert(x, r);
        Ok(r)
    }

    fn cofactors(&self, x: u32, var: usize) -> (u32, u32) {
        if self.level(x) == var {
            let n = self.node(x);
            (n.lo, n.hi)
        } else {
            (x, x)
        }
    }

    fn and(&mut self, a: u32, b: u32) -> Result<u32, CircuitError> {
        if a == FALSE || b == FALSE {
            return Ok(FALSE);
        }
        if a == TRUE {
            return Ok(b);
        }
        if b == TRUE {
            return Ok(a);
        }
        if a == b {
            return Ok(a);
        }
        let key = (a.min(b), a.max(b));
        if let Some(&r) = self.and_memo.get(&key) {
            return Ok(r);
        }
        let var = self.level(a).min(self.level(b));
        let (alo, ahi) = self.cofactors(a, var);
        let (blo, bhi) = self.cofactors(b, var);
        let lo = self.and(alo, blo)?;
        let hi = self.and(ahi, bhi)?;
        let r = self.mk(var, lo, hi)?;
        self.and_memo.insert(key, r);
        Ok(r)
    }

    fn or(&mut self, a: u32, b: u32) -> Result<u32, CircuitError> {
        if a == TRUE || b == TRUE {
            return Ok(TRUE);
        }
        if a == FALSE {
            return Ok(b);
        }
        if b == FALSE {
            return Ok(a);
        }
        if a == b {
            return Ok(a);
        }
        let key = (a.min(b), a.max(b));
        if let Some(&r) = self.or_memo.get(&key) {
            return Ok(r);
        }
        let var = self.level(a).min(self.level(b));
        let (alo, ahi) = self.cofactors(a, var);
        let (blo, bhi) = self.cofactors(b, var);
        let lo = self.or(alo, blo)?;
        let hi = self.or(ahi, bhi)?;
        let r = self.mk(var, lo, hi)?;
        self.or_memo.insert(key, r);
        Ok(r)
    }
}

/// Arena under construction, hash-consed by node shape.
#[derive(Default)]
struct Arena {
    nodes: Vec<Node>,
    cons: HashMap<Node, usize>,
}

impl Arena {
    fn intern(&mut self, node: Node) -> usize {
        if let Some(&id) = self.cons.get(&node) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(node.clone());
        self.cons.insert(node, id);
        id
    }

    fn truth(&mut self) -> usize {
        self.intern(Node::True)
    }

    fn falsity(&mut self) -> usize {
        self.intern(Node::False)
    }

    fn literal(&mut self, var: usize, positive: bool) -> usize {
        self.intern(Node::Literal { var, positive })
    }

    /// `(v | !v)`: the smoothing factor for a skipped variable.
    fn marginal(&mut self, var: usize) -> usize {
        let pos = self.literal(var, true);
        let neg = self.literal(var, false);
        self.intern(Node::Sum(vec![pos, neg]))
    }

    fn product(&mut self, mut children: Vec<usize>) -> usize {
        match children.len() {
            0 => self.truth(),
            1 => children.pop().unwrap(),
            _ => self.intern(Node::Product(children)),
        }
    }
}

struct Unfold<'a> {
    bdd: &'a Bdd,
    arena: Arena,
    memo: HashMap<u32, (usize, u64)>,
}

impl Unfold<'_> {
    /// Convert a BDD node to an arena node, returning its circuit id and the
    /// bitmask of variables its subcircuit mentions.
    fn convert(&mut self, id: u32) -> (usize, u64) {
        if id == FALSE {
            return (self.arena.falsity(), 0);
        }
        if id == TRUE {
            return (self.arena.truth(), 0);
        }
        if let Some(&cached) = self.memo.get(&id) {
            return cached;
        }
        let n = self.bdd.node(id);
        let (lo_id, lo_set) = self.convert(n.lo);
        let (hi_id, hi_set) = self.convert(n.hi);
        let below = lo_set | hi_set;

        let mut branches = Vec::new();
        for (bdd_child, circuit_child, child_set, positive) in
            [(n.lo, lo_id, lo_set, false), (n.hi, hi_id, hi_set, true)]
        {
            if bdd_child == FALSE {
                continue;
            }
            let mut parts = vec![self.arena.literal(n.var, positive)];
            if bdd_child != TRUE {
                parts.push(circuit_child);
            }
            let mut missing = below & !child_set;
            while missing != 0 {
                let v = missing.trailing_zeros() as usize;
                parts.push(self.arena.marginal(v));
                missing &= missing - 1;
            }
            branches.push(self.arena.product(parts));
        }
        let circuit_id = match branches.len() {
            1 => branches[0],
            2 => self.arena.intern(Node::Sum(branches)),
            // `mk` never yields a node with two false children.
            _ => unreachable!("BDD node with no live branch"),
        };
        let result = (circuit_id, below | (1u64 << n.var));
        self.memo.insert(id, result);
        result
    }

    /// Multiply in marginals for formula variables the circuit never touched
    /// (eliminated during BDD reduction), so the root mentions exactly the
    /// formula's variable set.
    fn pad(&mut self, id: usize, varset: u64, target: u64) -> usize {
        if self.arena.nodes[id] == Node::False {
            return id;
        }
        let mut missing = target & !varset;
        if missing == 0 {
            return id;
        }
        let mut parts = Vec::new();
        if self.arena.nodes[id] != Node::True {
            parts.push(id);
        }
        while missing != 0 {
            let v = missing.trailing_zeros() as usize;
            parts.push(self.arena.marginal(v));
            missing &= missing - 1;
        }
        self.arena.product(parts)
    }
}
