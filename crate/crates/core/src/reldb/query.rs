use std::fmt;

use crate::error::{Error, Result};
use crate::text::{is_ident_char, is_ident_start, Cursor};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    /// Canonical variable index, assigned by first occurrence.
    Var(usize),
    Const(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub relation: String,
    pub terms: Vec<Term>,
}

/// A conjunctive query. With an empty head it is Boolean.
///
/// Equality ignores variable names, so alpha-equivalent texts compare equal.
#[derive(Clone, Debug)]
pub struct ConjunctiveQuery {
    name: String,
    head: Vec<usize>,
    atoms: Vec<Atom>,
    var_names: Vec<String>,
}

impl PartialEq for ConjunctiveQuery {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.head == other.head && self.atoms == other.atoms
    }
}

impl Eq for ConjunctiveQuery {}

impl ConjunctiveQuery {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Output variables; empty for a Boolean query.
    pub fn head(&self) -> &[usize] {
        &self.head
    }

    pub fn is_boolean(&self) -> bool {
        self.head.is_empty()
    }

    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn var_name(&self, v: usize) -> &str {
        &self.var_names[v]
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.var_names.iter().position(|n| n == name)
    }

    /// Variables not in the head.
    pub fn existential_vars(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_vars()).filter(|v| !self.head.contains(v))
    }

    /// The Boolean query obtained by fixing the head variables to `answer`.
    pub fn bind_head(&self, answer: &[String]) -> Result<ConjunctiveQuery> {
        if answer.len() != self.head.len() {
            return Err(Error::InvalidParameter(format!(
                "answer has {} values, head has {}",
                answer.len(),
                self.head.len()
            )));
        }
        let value_of = |v: usize| {
            self.head
                .iter()
                .position(|&h| h == v)
                .map(|i| answer[i].clone())
        };
        let mut names = Vec::new();
        let mut remap: Vec<Option<usize>> = vec![None; self.num_vars()];
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                relation: a.relation.clone(),
                terms: a
                    .terms
                    .iter()
                    .map(|t| match t {
                        Term::Const(c) => Term::Const(c.clone()),
                        Term::Var(v) => match value_of(*v) {
                            Some(c) => Term::Const(c),
                            None => Term::Var(*remap[*v].get_or_insert_with(|| {
                                names.push(self.var_names[*v].clone());
                                names.len() - 1
                            })),
                        },
                    })
                    .collect(),
            })
            .collect();
        Ok(ConjunctiveQuery {
            name: self.name.clone(),
            head: Vec::new(),
            atoms,
            var_names: names,
        })
    }
}

fn write_const(f: &mut fmt::Formatter<'_>, c: &str) -> fmt::Result {
    f.write_str("\"")?;
    for ch in c.chars() {
        if ch == '"' || ch == '\\' {
            f.write_str("\\")?;
        }
        write!(f, "{ch}")?;
    }
    f.write_str("\"")
}

impl fmt::Display for ConjunctiveQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.name)?;
        for (i, v) in self.head.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&self.var_names[*v])?;
        }
        f.write_str(") :- ")?;
        for (i, atom) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}(", atom.relation)?;
            for (j, t) in atom.terms.iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                match t {
                    Term::Var(v) => f.write_str(&self.var_names[*v])?,
                    Term::Const(c) => write_const(f, c)?,
                }
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

enum RawTerm {
    Var(String),
    Const(String),
}

struct Parser {
    cur: Cursor,
    var_names: Vec<String>,
}

impl Parser {
    fn var(&mut self, name: String) -> usize {
        match self.var_names.iter().position(|n| *n == name) {
            Some(i) => i,
            None => {
                self.var_names.push(name);
                self.var_names.len() - 1
            }
        }
    }

    fn name(&mut self, what: &str) -> Result<String> {
        self.cur.skip_ws();
        match self.cur.peek() {
            Some(c) if is_ident_start(c) => Ok(self.cur.take_while(is_ident_char)),
            Some(c) => Err(self.cur.error(format!("expected {what}, found `{c}`"))),
            None => Err(self
                .cur
                .error(format!("expected {what}, found end of input"))),
        }
    }

    fn quoted(&mut self) -> Result<String> {
        let quote = self.cur.bump().expect("caller saw a quote");
        let mut s = String::new();
        loop {
            match self.cur.bump() {
                None => return Err(self.cur.error("unterminated string literal")),
                Some('\\') => match self.cur.bump() {
                    Some(c) => s.push(c),
                    None => return Err(self.cur.error("unterminated string literal")),
                },
                Some(c) if c == quote => return Ok(s),
                Some(c) => s.push(c),
            }
        }
    }

    fn term(&mut self) -> Result<RawTerm> {
        self.cur.skip_ws();
        match self.cur.peek() {
            Some('"') | Some('\'') => Ok(RawTerm::Const(self.quoted()?)),
            Some(c)
                if c.is_ascii_digit()
                    || (c == '-' && self.cur.peek2().is_some_and(|d| d.is_ascii_digit())) =>
            {
                let mut s = String::new();
                s.push(self.cur.bump().unwrap());
                s.push_str(&self.cur.take_while(|c| c.is_ascii_digit() || c == '.'));
                Ok(RawTerm::Const(s))
            }
            Some(c) if is_ident_start(c) => {
                let ident = self.cur.take_while(is_ident_char);
                if c.is_uppercase() {
                    Ok(RawTerm::Const(ident))
                } else {
                    Ok(RawTerm::Var(ident))
                }
            }
            Some(c) => Err(self.cur.error(format!("expected a term, found `{c}`"))),
            None => Err(self.cur.error("expected a term, found end of input")),
        }
    }

    fn atom(&mut self) -> Result<Atom> {
        let relation = self.name("relation name")?;
        self.cur.expect('(', "`(`")?;
        let mut terms = Vec::new();
        loop {
            let t = match self.term()? {
                RawTerm::Var(v) => Term::Var(self.var(v)),
                RawTerm::Const(c) => Term::Const(c),
            };
            terms.push(t);
            if self.cur.eat(',') {
                continue;
            }
            self.cur.expect(')', "`,` or `)`")?;
            break;
        }
        Ok(Atom { relation, terms })
    }

    fn query(mut self) -> Result<ConjunctiveQuery> {
        let name = self.name("query head")?;
        self.cur.expect('(', "`(`")?;
        let mut head = Vec::new();
        if !self.cur.eat(')') {
            loop {
                let (line, column) = self.cur.location();
                match self.term()? {
                    RawTerm::Var(v) => head.push(self.var(v)),
                    RawTerm::Const(_) => {
                        return Err(Error::syntax(line, column, "head terms must be variables"))
                    }
                }
                if self.cur.eat(',') {
                    continue;
                }
                self.cur.expect(')', "`,` or `)`")?;
                break;
            }
        }
        let head_vars = self.var_names.len();
        self.cur.expect(':', "`:-`")?;
        if self.cur.peek() != Some('-') {
            return Err(self.cur.error("expected `:-`"));
        }
        self.cur.bump();
        let mut atoms = vec![self.atom()?];
        while self.cur.eat(',') {
            atoms.push(self.atom()?);
        }
        self.cur.eat('.');
        self.cur.skip_ws();
        if let Some(c) = self.cur.peek() {
            return Err(self.cur.error(format!("unexpected `{c}` after query")));
        }
        let used: Vec<bool> = (0..head_vars)
            .map(|v| atoms.iter().any(|a| a.terms.contains(&Term::Var(v))))
            .collect();
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::syntax(
                1,
                1,
                format!(
                    "head variable `{}` does not occur in the body",
                    self.var_names[v]
                ),
            ));
        }
        Ok(ConjunctiveQuery {
            name,
            head,
            atoms,
            var_names: self.var_names,
        })
    }
}

/// Parses `Q() :- S(x), R(x, y), S(y)`.
///
/// Lowercase identifiers are variables; capitalized identifiers, numbers and
/// quoted strings are constants.
pub fn parse_query(text: &str) -> Result<ConjunctiveQuery> {
    Parser {
        cur: Cursor::new(text),
        var_names: Vec::new(),
    }
    .query()
}
