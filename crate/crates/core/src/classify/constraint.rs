use std::fmt;

use super::entity::{all_entities, Entity, FeatureSpace};
use crate::error::{Error, Result};
use crate::text::{is_ident_char, is_ident_start, Cursor};

/// Propositional formula over feature indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Prop {
    Const(bool),
    Var(usize),
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
}

impl Prop {
    pub fn eval(&self, e: &Entity) -> bool {
        match self {
            Prop::Const(b) => *b,
            Prop::Var(i) => e.get(*i),
            Prop::Not(p) => !p.eval(e),
            Prop::And(ps) => ps.iter().all(|p| p.eval(e)),
            Prop::Or(ps) => ps.iter().any(|p| p.eval(e)),
        }
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            Prop::Const(_) => None,
            Prop::Var(i) => Some(*i),
            Prop::Not(p) => p.max_var(),
            Prop::And(ps) | Prop::Or(ps) => ps.iter().filter_map(Prop::max_var).max(),
        }
    }
}

/// A hard constraint on entities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// Forbids every entity with all `positive` features at 1 and all
    /// `negative` features at 0.
    Denial {
        positive: u64,
        negative: u64,
    },
    Formula(Prop),
}

impl Constraint {
    pub fn denial(positive: &[usize], negative: &[usize]) -> Result<Self> {
        let mask = |ix: &[usize]| {
            ix.iter().try_fold(0u64, |m, &i| {
                if i < 64 {
                    Ok(m | 1 << i)
                } else {
                    Err(Error::InvalidParameter(format!(
                        "feature index {i} out of range"
                    )))
                }
            })
        };
        let (positive, negative) = (mask(positive)?, mask(negative)?);
        if positive == 0 && negative == 0 {
            return Err(Error::InvalidParameter("empty denial constraint".into()));
        }
        if positive & negative != 0 {
            return Err(Error::InvalidParameter(
                "a feature appears both plain and negated in a denial constraint".into(),
            ));
        }
        Ok(Constraint::Denial { positive, negative })
    }

    pub fn satisfied_by(&self, e: &Entity) -> bool {
        match self {
            Constraint::Denial { positive, negative } => {
                !(e.bits() & positive == *positive && e.bits() & negative == 0)
            }
            Constraint::Formula(p) => p.eval(e),
        }
    }

    fn fits(&self, width: usize) -> bool {
        let top = match self {
            Constraint::Denial { positive, negative } => {
                let m = positive | negative;
                (m != 0).then(|| 63 - m.leading_zeros() as usize)
            }
            Constraint::Formula(p) => p.max_var(),
        };
        top.is_none_or(|t| t < width)
    }

    /// Renders the constraint with feature names, in the syntax accepted by
    /// [`parse_constraint`].
    pub fn display<'a>(&'a self, space: &'a FeatureSpace) -> impl fmt::Display + 'a {
        Shown { c: self, space }
    }
}

struct Shown<'a> {
    c: &'a Constraint,
    space: &'a FeatureSpace,
}

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.c {
            Constraint::Denial { positive, negative } => {
                let lits = (0..self.space.width()).filter_map(|i| {
                    if positive & 1 << i != 0 {
                        Some(self.space.name(i).to_string())
                    } else if negative & 1 << i != 0 {
                        Some(format!("~{}", self.space.name(i)))
                    } else {
                        None
                    }
                });
                write!(f, "!({})", lits.collect::<Vec<_>>().join(" & "))
            }
            Constraint::Formula(p) => write_prop(f, p, self.space, true),
        }
    }
}

fn write_prop(
    f: &mut fmt::Formatter<'_>,
    p: &Prop,
    space: &FeatureSpace,
    top: bool,
) -> fmt::Result {
    let join = |f: &mut fmt::Formatter<'_>, ps: &[Prop], op: &str| -> fmt::Result {
        if !top {
            f.write_str("(")?;
        }
        for (i, q) in ps.iter().enumerate() {
            if i > 0 {
                write!(f, " {op} ")?;
            }
            write_prop(f, q, space, false)?;
        }
        if !top {
            f.write_str(")")?;
        }
        Ok(())
    };
    match p {
        Prop::Const(b) => write!(f, "{b}"),
        Prop::Var(i) => f.write_str(space.name(*i)),
        Prop::Not(q) => {
            f.write_str("~")?;
            write_prop(f, q, space, false)
        }
        Prop::And(ps) if ps.is_empty() => f.write_str("true"),
        Prop::Or(ps) if ps.is_empty() => f.write_str("false"),
        Prop::And(ps) => join(f, ps, "&"),
        Prop::Or(ps) => join(f, ps, "|"),
    }
}

/// True when `e` satisfies every constraint in `theta`.
pub fn satisfies(e: &Entity, theta: &[Constraint]) -> bool {
    theta.iter().all(|c| c.satisfied_by(e))
}

/// Fails with [`Error::InconsistentConstraint`] unless some entity of the
/// given width satisfies all of `theta`.
pub fn check_satisfiable(theta: &[Constraint], width: usize) -> Result<()> {
    if let Some(c) = theta.iter().find(|c| !c.fits(width)) {
        return Err(Error::InvalidParameter(format!(
            "constraint {c:?} mentions features beyond width {width}"
        )));
    }
    if all_entities(width)?.any(|e| satisfies(&e, theta)) {
        Ok(())
    } else {
        Err(Error::InconsistentConstraint(
            "no entity satisfies the constraints".into(),
        ))
    }
}

/// Parses one constraint.
///
/// `!(A & ~B)` yields the denial form; anything else is read as a general
/// formula with `~`/`!`/`¬` for negation, `&`/`∧` and `|`/`∨`, parentheses
/// and the constants `true`/`false`.
pub fn parse_constraint(text: &str, space: &FeatureSpace) -> Result<Constraint> {
    let mut p = Parser {
        cur: Cursor::new(text),
        space,
    };
    let prop = p.or()?;
    p.cur.skip_ws();
    if p.cur.peek().is_some() {
        return Err(p.cur.error("unexpected trailing input"));
    }
    Ok(as_denial(&prop).unwrap_or(Constraint::Formula(prop)))
}

/// Parses one constraint per non-empty line; `#` starts a comment.
pub fn parse_constraints(text: &str, space: &FeatureSpace) -> Result<Vec<Constraint>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        out.push(parse_constraint(body, space).map_err(|e| match e {
            Error::Syntax {
                column, message, ..
            } => Error::syntax(n + 1, column, message),
            other => other,
        })?);
    }
    Ok(out)
}

fn as_denial(p: &Prop) -> Option<Constraint> {
    let Prop::Not(inner) = p else { return None };
    let lits = match &**inner {
        Prop::And(ps) => ps.as_slice(),
        single => std::slice::from_ref(single),
    };
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for l in lits {
        match l {
            Prop::Var(i) => pos.push(*i),
            Prop::Not(v) => match **v {
                Prop::Var(i) => neg.push(i),
                _ => return None,
            },
            _ => return None,
        }
    }
    Constraint::denial(&pos, &neg).ok()
}

struct Parser<'a> {
    cur: Cursor,
    space: &'a FeatureSpace,
}

impl Parser<'_> {
    fn eat_any(&mut self, ops: &[char]) -> bool {
        self.cur.skip_ws();
        match self.cur.peek() {
            Some(c) if ops.contains(&c) => {
                self.cur.bump();
                true
            }
            _ => false,
        }
    }

    fn or(&mut self) -> Result<Prop> {
        let mut parts = vec![self.and()?];
        while self.eat_any(&['|', '∨']) {
            parts.push(self.and()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Prop::Or(parts)
        })
    }

    fn and(&mut self) -> Result<Prop> {
        let mut parts = vec![self.unary()?];
        while self.eat_any(&['&', '∧']) {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Prop::And(parts)
        })
    }

    fn unary(&mut self) -> Result<Prop> {
        if self.eat_any(&['~', '!', '¬']) {
            return Ok(Prop::Not(Box::new(self.unary()?)));
        }
        if self.cur.eat('(') {
            let p = self.or()?;
            self.cur.expect(')', "`)`")?;
            return Ok(p);
        }
        self.cur.skip_ws();
        let (line, column) = self.cur.location();
        match self.cur.peek() {
            Some(c) if is_ident_start(c) => {
                let name = self.cur.take_while(is_ident_char);
                match name.as_str() {
                    "true" => Ok(Prop::Const(true)),
                    "false" => Ok(Prop::Const(false)),
                    _ => match self.space.index_of(&name) {
                        Ok(i) => Ok(Prop::Var(i)),
                        Err(_) => Err(Error::syntax(
                            line,
                            column,
                            format!("unknown feature `{name}`"),
                        )),
                    },
                }
            }
            Some(c) => Err(self.cur.error(format!("expected a feature, found `{c}`"))),
            None => Err(self.cur.error("expected a feature, found end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> FeatureSpace {
        FeatureSpace::new(["Age20", "OverDr50M", "Owner"]).unwrap()
    }

    #[test]
    fn denial_form_is_recognised() {
        let s = space();
        let c = parse_constraint("!(~Age20 & OverDr50M)", &s).unwrap();
        assert_eq!(c, Constraint::denial(&[1], &[0]).unwrap());
        assert_eq!(c.display(&s).to_string(), "!(~Age20 & OverDr50M)");
        // Age feature 0 with overdraft 1 violates the constraint.
        assert!(!c.satisfied_by(&Entity::parse("010").unwrap()));
        assert!(c.satisfied_by(&Entity::parse("110").unwrap()));
    }

    #[test]
    fn general_formulas() {
        let s = space();
        let c = parse_constraint("Age20 | ¬(OverDr50M ∧ Owner)", &s).unwrap();
        assert!(matches!(c, Constraint::Formula(_)));
        assert!(!c.satisfied_by(&Entity::parse("011").unwrap()));
        assert!(c.satisfied_by(&Entity::parse("111").unwrap()));
        let t = parse_constraint("true", &s).unwrap();
        assert!(s.entities().unwrap().all(|e| t.satisfied_by(&e)));
        let again = parse_constraint(&c.display(&s).to_string(), &s).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn conjunction_of_constraints() {
        let s = space();
        let theta = parse_constraints("!(Age20)\n# comment\n\n!(~Owner)\n", &s).unwrap();
        assert_eq!(theta.len(), 2);
        for e in s.entities().unwrap() {
            let both = theta[0].satisfied_by(&e) && theta[1].satisfied_by(&e);
            assert_eq!(satisfies(&e, &theta), both);
        }
    }

    #[test]
    fn errors() {
        let s = space();
        assert!(matches!(
            parse_constraint("!(Age20 & Nope)", &s),
            Err(Error::Syntax { column: 11, .. })
        ));
        assert!(parse_constraint("!(Age20 &)", &s).is_err());
        assert!(matches!(
            parse_constraints("true\n(Owner", &s),
            Err(Error::Syntax { line: 2, .. })
        ));
        let contradiction = [parse_constraint("Owner & ~Owner", &s).unwrap()];
        assert!(matches!(
            check_satisfiable(&contradiction, 3),
            Err(Error::InconsistentConstraint(_))
        ));
        // Both polarities of one feature is not a denial; it stays a formula.
        let c = parse_constraint("!(Owner & ~Owner)", &s).unwrap();
        assert!(matches!(c, Constraint::Formula(_)));
    }
}
