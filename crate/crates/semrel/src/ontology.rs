//! Domain schema: entity types, relation types, and the permissible
//! (relation, subject type, object type) triples, plus its lowering to a
//! propositional constraint.
//!
//! The lowering uses three one-hot variable families: one indicator per
//! relation (named after the relation), one per subject type (`<entity>_s`),
//! one per object type (`<entity>_o`). Exactly-one constraints over each
//! family are part of the lowered formula itself, so the satisfying
//! assignments are in bijection with the permitted triples and weighted model
//! counting needs no external renormalization.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::logic::{exactly_one, Formula};
use crate::statespace::State;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OntologyError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("duplicate entity type `{0}`")]
    DuplicateEntity(String),
    #[error("duplicate relation `{0}`")]
    DuplicateRelation(String),
    #[error("duplicate permitted triple {relation}({subject}, {object})")]
    DuplicateTriple {
        relation: String,
        subject: String,
        object: String,
    },
    #[error("undeclared entity type `{0}`")]
    UnknownEntity(String),
    #[error("undeclared relation `{0}`")]
    UnknownRelation(String),
    #[error("threshold must be at least 1")]
    InvalidThreshold,
}

/// The one-hot variable names for each categorical family, in the fixed
/// compilation order: relations first, then subject types, then object types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVars {
    pub relation: Vec<String>,
    pub subject: Vec<String>,
    pub object: Vec<String>,
}

impl StateVars {
    /// Variable ordering used when compiling the constraint.
    pub fn order(&self) -> Vec<String> {
        self.relation
            .iter()
            .chain(self.subject.iter())
            .chain(self.object.iter())
            .cloned()
            .collect()
    }
}

/// Entity/relation schema with the permitted argument-type triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ontology {
    entity_types: Vec<String>,
    relation_types: Vec<String>,
    /// (relation, subject type, object type), as indices into the type lists.
    permitted: BTreeSet<(usize, usize, usize)>,
    none_relation: Option<usize>,
}

impl Ontology {
    /// Build and validate an ontology. Permitted triples are given as
    /// (relation, subject type, object type) names. If `none_relation` is
    /// set it must be one of `relation_types`; it is implicitly permitted
    /// with every type pair.
    pub fn new<I>(
        entity_types: Vec<String>,
        relation_types: Vec<String>,
        permitted: I,
        none_relation: Option<String>,
    ) -> Result<Self, OntologyError>
    where
        I: IntoIterator<Item = (String, String, String)>,
    {
        let mut seen = BTreeSet::new();
        for name in &entity_types {
            if !seen.insert(name.clone()) {
                return Err(OntologyError::DuplicateEntity(name.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for name in &relation_types {
            if !seen.insert(name.clone()) {
                return Err(OntologyError::DuplicateRelation(name.clone()));
            }
        }

        let entity_index: BTreeMap<&str, usize> = entity_types
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let relation_index: BTreeMap<&str, usize> = relation_types
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();

        let mut triples = BTreeSet::new();
        for (rel, subj, obj) in permitted {
            let r = *relation_index
                .get(rel.as_str())
                .ok_or_else(|| OntologyError::UnknownRelation(rel.clone()))?;
            let s = *entity_index
                .get(subj.as_str())
                .ok_or_else(|| OntologyError::UnknownEntity(subj.clone()))?;
            let o = *entity_index
                .get(obj.as_str())
                .ok_or_else(|| OntologyError::UnknownEntity(obj.clone()))?;
            if !triples.insert((r, s, o)) {
                return Err(OntologyError::DuplicateTriple {
                    relation: rel,
                    subject: subj,
                    object: obj,
                });
            }
        }

        let none_relation = match none_relation {
            Some(name) => {
                let r = *relation_index
                    .get(name.as_str())
                    .ok_or_else(|| OntologyError::UnknownRelation(name.clone()))?;
                // The none relation is compatible with every type pair.
                for s in 0..entity_types.len() {
                    for o in 0..entity_types.len() {
                        triples.insert((r, s, o));
                    }
                }
                Some(r)
            }
            None => None,
        };

        Ok(Ontology {
            entity_types,
            relation_types,
            permitted: triples,
            none_relation,
        })
    }

    pub fn entity_types(&self) -> &[String] {
        &self.entity_types
    }

    pub fn relation_types(&self) -> &[String] {
        &self.relation_types
    }

    pub fn entity_count(&self) -> usize {
        self.entity_types.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relation_types.len()
    }

    pub fn none_relation(&self) -> Option<usize> {
        self.none_relation
    }

    pub fn entity_index(&self, name: &str) -> Option<usize> {
        self.entity_types.iter().position(|n| n == name)
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relation_types.iter().position(|n| n == name)
    }

    /// Permitted (relation, subject, object) index triples, in sorted order.
    pub fn permitted(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.permitted.iter().copied()
    }

    pub fn permitted_count(&self) -> usize {
        self.permitted.len()
    }

    pub fn is_permitted(&self, state: &State) -> bool {
        self.permitted
            .contains(&(state.relation, state.subject, state.object))
    }

    /// The permitted triples as states, sorted by (subject, relation, object).
    pub fn valid_states(&self) -> Vec<State> {
        let mut states: Vec<State> = self
            .permitted
            .iter()
            .map(|&(r, s, o)| State::new(s, r, o))
            .collect();
        states.sort();
        states
    }

    /// Total number of states, permitted or not.
    pub fn state_count(&self) -> usize {
        self.entity_count() * self.entity_count() * self.relation_count()
    }

    pub fn state_vars(&self) -> StateVars {
        StateVars {
            relation: self.relation_types.clone(),
            subject: self
                .entity_types
                .iter()
                .map(|e| format!("{e}_s"))
                .collect(),
            object: self
                .entity_types
                .iter()
                .map(|e| format!("{e}_o"))
                .collect(),
        }
    }

    /// The typing implications alone: for each relation, holding it implies
    /// one of its permitted (subject, object) type pairs. A relation with no
    /// permitted pair lowers to its negation. Returns `true` when there are
    /// no relations.
    pub fn implication_constraint(&self) -> Formula {
        let vars = self.state_vars();
        let conjuncts: Vec<Formula> = (0..self.relation_count())
            .map(|m| {
                let pairs: Vec<(usize, usize)> = self
                    .permitted
                    .iter()
                    .filter(|&&(r, _, _)| r == m)
                    .map(|&(_, s, o)| (s, o))
                    .collect();
                if pairs.is_empty() {
                    Formula::not(Formula::var(vars.relation[m].clone()))
                } else {
                    Formula::implies(
                        Formula::var(vars.relation[m].clone()),
                        Formula::or(
                            pairs
                                .into_iter()
                                .map(|(s, o)| {
                                    Formula::and(vec![
                                        Formula::var(vars.subject[s].clone()),
                                        Formula::var(vars.object[o].clone()),
                                    ])
                                })
                                .collect(),
                        ),
                    )
                }
            })
            .collect();
        if conjuncts.is_empty() {
            Formula::True
        } else {
            Formula::and(conjuncts)
        }
    }

    /// The full constraint: typing implications conjoined with exactly-one
    /// constraints over each variable family, so satisfying assignments
    /// correspond one-to-one with permitted triples.
    pub fn lower_to_constraint(&self) -> Formula {
        let vars = self.state_vars();
        let mut conjuncts = match self.implication_constraint() {
            Formula::And(children) => children,
            Formula::True => Vec::new(),
            other => vec![other],
        };
        conjuncts.push(exactly_one(&vars.relation));
        conjuncts.push(exactly_one(&vars.subject));
        conjuncts.push(exactly_one(&vars.object));
        Formula::and(conjuncts)
    }

    /// Pretty-print to the DSL; `parse_ontology` inverts this exactly.
    pub fn render(&self) -> String {
        let mut out = String::from("entities ");
        out.push_str(&self.entity_types.join(", "));
        out.push_str(";\nrelations");
        let mut entries = Vec::new();
        for (m, name) in self.relation_types.iter().enumerate() {
            if self.none_relation == Some(m) {
                // Its pairs are implied by the `none` directive.
                entries.push(name.clone());
                continue;
            }
            let pairs: Vec<(usize, usize)> = self
                .permitted
                .iter()
                .filter(|&&(r, _, _)| r == m)
                .map(|&(_, s, o)| (s, o))
                .collect();
            if pairs.is_empty() {
                entries.push(name.clone());
            } else {
                for (s, o) in pairs {
                    entries.push(format!(
                        "{name}({}, {})",
                        self.entity_types[s], self.entity_types[o]
                    ));
                }
            }
        }
        if !entries.is_empty() {
            out.push(' ');
            out.push_str(&entries.join(", "));
        }
        out.push_str(";\n");
        if let Some(m) = self.none_relation {
            out.push_str(&format!("none {};\n", self.relation_types[m]));
        }
        out
    }
}

/// Keep the permitted triples observed at least `threshold` times in the
/// labeled data; the type vocabularies are passed explicitly so that classes
/// absent from the data still exist in the schema. Triples are
/// (subject type, relation, object type) names.
pub fn induce_ontology(
    entity_types: &[String],
    relation_types: &[String],
    observed: &[(String, String, String)],
    threshold: usize,
) -> Result<Ontology, OntologyError> {
    if threshold < 1 {
        return Err(OntologyError::InvalidThreshold);
    }
    let mut counts: BTreeMap<(String, String, String), usize> = BTreeMap::new();
    for (subj, rel, obj) in observed {
        *counts
            .entry((rel.clone(), subj.clone(), obj.clone()))
            .or_insert(0) += 1;
    }
    let permitted: Vec<(String, String, String)> = counts
        .into_iter()
        .filter(|(_, n)| *n >= threshold)
        .map(|(t, _)| t)
        .collect();
    Ontology::new(
        entity_types.to_vec(),
        relation_types.to_vec(),
        permitted,
        None,
    )
}

// ---------------------------------------------------------------------------
// DSL parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Comma,
    Semi,
    LParen,
    RParen,
    Eof,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn tokens(mut self) -> Result<Vec<(Token, usize, usize)>, OntologyError> {
        let mut out = Vec::new();
        loop {
            while let Some(&c) = self.chars.peek() {
                if c.is_whitespace() {
                    self.bump();
                } else if c == '#' {
                    while matches!(self.chars.peek(), Some(&c) if c != '\n') {
                        self.bump();
                    }
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            let Some(&c) = self.chars.peek() else {
                out.push((Token::Eof, line, col));
                return Ok(out);
            };
            let token = match c {
                ',' => {
                    self.bump();
                    Token::Comma
                }
                ';' => {
                    self.bump();
                    Token::Semi
                }
                '(' => {
                    self.bump();
                    Token::LParen
                }
                ')' => {
                    self.bump();
                    Token::RParen
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut name = String::new();
                    while matches!(self.chars.peek(), Some(&c) if c.is_ascii_alphanumeric() || c == '_')
                    {
                        name.push(self.bump().unwrap());
                    }
                    Token::Ident(name)
                }
                other => {
                    return Err(OntologyError::Syntax {
                        line,
                        col,
                        msg: format!("unexpected character `{other}`"),
                    })
                }
            };
            out.push((token, line, col));
        }
    }
}

struct DslParser {
    tokens: Vec<(Token, usize, usize)>,
    pos: usize,
}

impl DslParser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, msg: impl Into<String>) -> OntologyError {
        let (_, line, col) = self.tokens[self.pos];
        OntologyError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<String, OntologyError> {
        match self.peek().clone() {
            Token::Ident(name) => {
                self.bump();
                Ok(name)
            }
            _ => Err(self.error_here(format!("expected {what}"))),
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), OntologyError> {
        match self.peek() {
            Token::Ident(name) if name == kw => {
                self.bump();
                Ok(())
            }
            _ => Err(self.error_here(format!("expected `{kw}`"))),
        }
    }

    fn expect(&mut self, token: Token, what: &str) -> Result<(), OntologyError> {
        if *self.peek() == token {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(format!("expected {what}")))
        }
    }
}

/// Parse the ontology DSL:
///
/// ```text
/// entities Person, Location;
/// relations Kill(Person, Person), LivesIn(Person, Location);
/// none NoRel;            # optional
/// ```
///
/// A relation may appear several times with different type pairs; a bare
/// relation name (no parenthesized pair) declares a relation with no
/// permitted triples. `#` starts a line comment. The `none` relation is
/// implicitly permitted with every type pair and is added to the relation
/// list if not declared earlier.
pub fn parse_ontology(text: &str) -> Result<Ontology, OntologyError> {
    let tokens = Lexer::new(text).tokens()?;
    let mut p = DslParser { tokens, pos: 0 };

    p.expect_keyword("entities")?;
    let mut entities: Vec<String> = Vec::new();
    loop {
        let name = p.expect_ident("an entity type name")?;
        if entities.contains(&name) {
            return Err(OntologyError::DuplicateEntity(name));
        }
        entities.push(name);
        match p.bump() {
            Token::Comma => continue,
            Token::Semi => break,
            _ => return Err(p.error_here("expected `,` or `;`")),
        }
    }

    p.expect_keyword("relations")?;
    let mut relations: Vec<String> = Vec::new();
    let mut bare: BTreeSet<String> = BTreeSet::new();
    let mut permitted: Vec<(String, String, String)> = Vec::new();
    if *p.peek() == Token::Semi {
        p.bump();
    } else {
        loop {
            let name = p.expect_ident("a relation name")?;
            if *p.peek() == Token::LParen {
                p.bump();
                let subj = p.expect_ident("a subject type")?;
                if !entities.contains(&subj) {
                    return Err(OntologyError::UnknownEntity(subj));
                }
                p.expect(Token::Comma, "`,`")?;
                let obj = p.expect_ident("an object type")?;
                if !entities.contains(&obj) {
                    return Err(OntologyError::UnknownEntity(obj));
                }
                p.expect(Token::RParen, "`)`")?;
                let triple = (name.clone(), subj, obj);
                if permitted.contains(&triple) {
                    return Err(OntologyError::DuplicateTriple {
                        relation: triple.0,
                        subject: triple.1,
                        object: triple.2,
                    });
                }
                permitted.push(triple);
            } else {
                // Bare name: a relation with no permitted triples (or the
                // target of a later `none` directive).
                if relations.contains(&name) {
                    return Err(OntologyError::DuplicateRelation(name));
                }
                bare.insert(name.clone());
            }
            if !relations.contains(&name) {
                relations.push(name);
            }
            match p.bump() {
                Token::Comma => continue,
                Token::Semi => break,
                _ => return Err(p.error_here("expected `,` or `;`")),
            }
        }
    }
    let _ = bare;

    let mut none_relation = None;
    if let Token::Ident(name) = p.peek() {
        if name == "none" {
            p.bump();
            let name = p.expect_ident("a relation name")?;
            if !relations.contains(&name) {
                relations.push(name.clone());
            }
            none_relation = Some(name);
            p.expect(Token::Semi, "`;`")?;
        }
    }
    if *p.peek() != Token::Eof {
        return Err(p.error_here("expected end of input"));
    }

    Ontology::new(entities, relations, permitted, none_relation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Assignment;

    /// Two entity types, two relations, two permitted triples.
    pub(crate) fn kill_livesin() -> Ontology {
        parse_ontology(
            "entities Person, Location;\n\
             relations Kill(Person, Person), LivesIn(Person, Location);",
        )
        .unwrap()
    }

    fn four_entity_fixture() -> Ontology {
        // 4 entities, 5 relations, 8 permitted triples.
        parse_ontology(
            "entities Person, Location, Organization, Weapon;\n\
             relations Kill(Person, Person), Kill(Organization, Person),\n\
                       LivesIn(Person, Location), LivesIn(Organization, Location),\n\
                       WorksFor(Person, Organization), WorksFor(Organization, Organization),\n\
                       Uses(Person, Weapon), Owns(Organization, Weapon);",
        )
        .unwrap()
    }

    #[test]
    fn parses_two_relation_schema() {
        let o = kill_livesin();
        assert_eq!(o.entity_count(), 2);
        assert_eq!(o.relation_count(), 2);
        assert_eq!(o.permitted_count(), 2);
        assert!(o.is_permitted(&State::new(0, 0, 0)));
        assert!(o.is_permitted(&State::new(0, 1, 1)));
    }

    #[test]
    fn parses_empty_relations() {
        let o = parse_ontology("entities A; relations;").unwrap();
        assert_eq!(o.entity_count(), 1);
        assert_eq!(o.relation_count(), 0);
        assert_eq!(o.permitted_count(), 0);
    }

    #[test]
    fn counts_fixture_triples() {
        let o = four_entity_fixture();
        assert_eq!(o.entity_count(), 4);
        assert_eq!(o.relation_count(), 5);
        assert_eq!(o.permitted_count(), 8);
    }

    #[test]
    fn rejects_duplicates_and_unknown_types() {
        assert!(matches!(
            parse_ontology("entities A, A; relations;"),
            Err(OntologyError::DuplicateEntity(_))
        ));
        assert!(matches!(
            parse_ontology("entities A; relations R(A, B);"),
            Err(OntologyError::UnknownEntity(_))
        ));
        assert!(matches!(
            parse_ontology("entities A; relations R(A, A), R(A, A);"),
            Err(OntologyError::DuplicateTriple { .. })
        ));
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_ontology("entities A;\nrelations R(A A);").unwrap_err();
        match err {
            OntologyError::Syntax { line, .. } => assert_eq!(line, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn none_relation_is_permitted_everywhere() {
        let o = parse_ontology(
            "entities A, B; relations R(A, B); none NoRel;",
        )
        .unwrap();
        assert_eq!(o.relation_count(), 2);
        let none = o.none_relation().unwrap();
        assert_eq!(o.relation_types()[none], "NoRel");
        // 1 declared + 4 none pairs.
        assert_eq!(o.permitted_count(), 5);
        for s in 0..2 {
            for obj in 0..2 {
                assert!(o.is_permitted(&State::new(s, none, obj)));
            }
        }
    }

    #[test]
    fn render_round_trips() {
        for o in [
            kill_livesin(),
            four_entity_fixture(),
            parse_ontology("entities A; relations;").unwrap(),
            parse_ontology("entities A, B; relations R(A, B), Empty; none N;").unwrap(),
        ] {
            let rendered = o.render();
            let reparsed = parse_ontology(&rendered).unwrap();
            assert_eq!(o, reparsed, "round trip failed for:\n{rendered}");
        }
    }

    #[test]
    fn constraint_models_match_permitted_triples() {
        let o = kill_livesin();
        let alpha = o.lower_to_constraint();
        let models = alpha.enumerate_models().unwrap();
        assert_eq!(models.len(), 2);

        // Decode each model back to a state through the one-hot naming.
        let vars = o.state_vars();
        let mut states = Vec::new();
        for m in &models {
            let r = vars
                .relation
                .iter()
                .position(|v| m.get(v) == Some(true))
                .unwrap();
            let s = vars
                .subject
                .iter()
                .position(|v| m.get(v) == Some(true))
                .unwrap();
            let obj = vars
                .object
                .iter()
                .position(|v| m.get(v) == Some(true))
                .unwrap();
            states.push(State::new(s, r, obj));
        }
        states.sort();
        assert_eq!(states, o.valid_states());
    }

    #[test]
    fn relation_without_pairs_lowers_to_negation() {
        let o = parse_ontology("entities A; relations R(A, A), Empty;").unwrap();
        let alpha = o.lower_to_constraint();
        let models = alpha.enumerate_models().unwrap();
        // Only R(A, A) remains satisfiable.
        assert_eq!(models.len(), 1);
        assert_eq!(models[0].get("Empty"), Some(false));
    }

    #[test]
    fn all_pairs_ontology_leaves_all_states_valid() {
        let o = parse_ontology(
            "entities A, B; relations R(A, A), R(A, B), R(B, A), R(B, B), \
             S(A, A), S(A, B), S(B, A), S(B, B);",
        )
        .unwrap();
        let alpha = o.lower_to_constraint();
        assert_eq!(alpha.enumerate_models().unwrap().len(), o.state_count());
    }

    #[test]
    fn figure_style_assignment_satisfies_constraint() {
        let o = kill_livesin();
        let alpha = o.lower_to_constraint();
        let a = Assignment::from_pairs([
            ("Kill", true),
            ("LivesIn", false),
            ("Person_s", true),
            ("Location_s", false),
            ("Person_o", true),
            ("Location_o", false),
        ]);
        assert!(alpha.evaluate(&a).unwrap());
    }

    #[test]
    fn induce_counts_by_threshold() {
        let ents = vec!["P".to_string(), "L".to_string()];
        let rels = vec!["K".to_string()];
        let triple = |s: &str, r: &str, o: &str| (s.to_string(), r.to_string(), o.to_string());
        let observed = vec![
            triple("P", "K", "P"),
            triple("P", "K", "P"),
            triple("P", "K", "P"),
            triple("L", "K", "P"),
        ];
        let o = induce_ontology(&ents, &rels, &observed, 2).unwrap();
        assert_eq!(o.permitted_count(), 1);
        assert!(o.is_permitted(&State::new(0, 0, 0)));

        let o1 = induce_ontology(&ents, &rels, &observed, 1).unwrap();
        assert_eq!(o1.permitted_count(), 2);

        let empty = induce_ontology(&ents, &rels, &[], 1).unwrap();
        assert_eq!(empty.permitted_count(), 0);

        assert_eq!(
            induce_ontology(&ents, &rels, &[], 0),
            Err(OntologyError::InvalidThreshold)
        );
    }

    #[test]
    fn induced_support_set_accepts_every_training_triple() {
        let ents = vec!["P".to_string(), "L".to_string()];
        let rels = vec!["K".to_string(), "V".to_string()];
        let triple = |s: &str, r: &str, o: &str| (s.to_string(), r.to_string(), o.to_string());
        let observed = vec![
            triple("P", "K", "P"),
            triple("P", "V", "L"),
            triple("L", "V", "L"),
        ];
        let o = induce_ontology(&ents, &rels, &observed, 1).unwrap();
        let alpha = o.lower_to_constraint();
        let vars = o.state_vars();
        for (subj, rel, obj) in &observed {
            let mut a = Assignment::new();
            for (i, name) in vars.relation.iter().enumerate() {
                a.set(name.clone(), Some(i) == o.relation_index(rel));
            }
            for (i, name) in vars.subject.iter().enumerate() {
                a.set(name.clone(), Some(i) == o.entity_index(subj));
            }
            for (i, name) in vars.object.iter().enumerate() {
                a.set(name.clone(), Some(i) == o.entity_index(obj));
            }
            assert!(alpha.evaluate(&a).unwrap(), "{subj} {rel} {obj} rejected");
        }
    }
}
