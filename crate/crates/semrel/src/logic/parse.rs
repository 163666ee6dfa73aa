//! Recursive-descent parser for the formula surface syntax.
//!
//! Grammar, loosest binding first: `=>` (right-associative), `|`, `&`, `!`,
//! parentheses, identifiers, `true`, `false`.

use super::{Formula, LogicError};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    LParen,
    RParen,
    Eof,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Ident(name) => format!("identifier `{name}`"),
            Token::True => "`true`".into(),
            Token::False => "`false`".into(),
            Token::Not => "`!`".into(),
            Token::And => "`&`".into(),
            Token::Or => "`|`".into(),
            Token::Implies => "`=>`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::Eof => "end of input".into(),
        }
    }
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

    fn error(&self, msg: impl Into<String>) -> LogicError {
        LogicError::Syntax {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    /// Next token plus the (line, col) where it starts.
    fn next_token(&mut self) -> Result<(Token, usize, usize), LogicError> {
        while matches!(self.chars.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
        let (line, col) = (self.line, self.col);
        let Some(&c) = self.chars.peek() else {
            return Ok((Token::Eof, line, col));
        };
        let token = match c {
            '(' => {
                self.bump();
                Token::LParen
            }
            ')' => {
                self.bump();
                Token::RParen
            }
            '!' => {
                self.bump();
                Token::Not
            }
            '&' => {
                self.bump();
                Token::And
            }
            '|' => {
                self.bump();
                Token::Or
            }
            '=' => {
                self.bump();
                match self.chars.peek() {
                    Some('>') => {
                        self.bump();
                        Token::Implies
                    }
                    _ => return Err(self.error("expected `>` after `=`")),
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while matches!(self.chars.peek(), Some(&c) if c.is_ascii_alphanumeric() || c == '_')
                {
                    name.push(self.bump().unwrap());
                }
                match name.as_str() {
                    "true" => Token::True,
                    "false" => Token::False,
                    _ => Token::Ident(name),
                }
            }
            other => return Err(self.error(format!("unexpected character `{other}`"))),
        };
        Ok((token, line, col))
    }
}

struct Parser {
    tokens: Vec<(Token, usize, usize)>,
    pos: usize,
}

impl Parser {
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

    fn error_here(&self, msg: impl Into<String>) -> LogicError {
        let (_, line, col) = self.tokens[self.pos];
        LogicError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn implication(&mut self) -> Result<Formula, LogicError> {
        let left = self.disjunction()?;
        if *self.peek() == Token::Implies {
            self.bump();
            let right = self.implication()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula, LogicError> {
        let mut children = vec![self.conjunction()?];
        while *self.peek() == Token::Or {
            self.bump();
            children.push(self.conjunction()?);
        }
        Ok(if children.len() == 1 {
            children.pop().unwrap()
        } else {
            Formula::or(children)
        })
    }

    fn conjunction(&mut self) -> Result<Formula, LogicError> {
        let mut children = vec![self.unary()?];
        while *self.peek() == Token::And {
            self.bump();
            children.push(self.unary()?);
        }
        Ok(if children.len() == 1 {
            children.pop().unwrap()
        } else {
            Formula::and(children)
        })
    }

    fn unary(&mut self) -> Result<Formula, LogicError> {
        match self.peek().clone() {
            Token::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Token::LParen => {
                self.bump();
                let inner = self.implication()?;
                if *self.peek() != Token::RParen {
                    return Err(self.error_here(format!(
                        "expected `)`, found {}",
                        self.peek().describe()
                    )));
                }
                self.bump();
                Ok(inner)
            }
            Token::True => {
                self.bump();
                Ok(Formula::True)
            }
            Token::False => {
                self.bump();
                Ok(Formula::False)
            }
            Token::Ident(name) => {
                self.bump();
                Ok(Formula::Var(name))
            }
            other => Err(self.error_here(format!("expected a formula, found {}", other.describe()))),
        }
    }
}

/// Parse the infix formula syntax into an AST.
pub fn parse_formula(text: &str) -> Result<Formula, LogicError> {
    let mut lexer = Lexer::new(text);
    let mut tokens = Vec::new();
    loop {
        let t = lexer.next_token()?;
        let done = t.0 == Token::Eof;
        tokens.push(t);
        if done {
            break;
        }
    }
    let mut parser = Parser { tokens, pos: 0 };
    let formula = parser.implication()?;
    if *parser.peek() != Token::Eof {
        return Err(parser.error_here(format!(
            "unexpected {} after formula",
            parser.peek().describe()
        )));
    }
    Ok(formula)
}
