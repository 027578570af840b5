//! Recursive-descent parser. Precedence from tightest: `!`, `&`, `|`, `->`
//! (right associative). A quantifier's scope extends as far right as possible.

use super::{Formula, FormulaError, Term};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    True,
    False,
    Adj,
    Exists,
    Forall,
    Var(u32),
    Root(u32),
    LParen,
    RParen,
    Comma,
    Dot,
    Eq,
    Bang,
    Amp,
    Pipe,
    Arrow,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::True => "'true'".into(),
            Tok::False => "'false'".into(),
            Tok::Adj => "'adj'".into(),
            Tok::Exists => "'exists'".into(),
            Tok::Forall => "'forall'".into(),
            Tok::Var(i) => format!("x{i}"),
            Tok::Root(j) => format!("r{j}"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Dot => "'.'".into(),
            Tok::Eq => "'='".into(),
            Tok::Bang => "'!'".into(),
            Tok::Amp => "'&'".into(),
            Tok::Pipe => "'|'".into(),
            Tok::Arrow => "'->'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, FormulaError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'.' => Tok::Dot,
            b'=' => Tok::Eq,
            b'!' => Tok::Bang,
            b'&' => Tok::Amp,
            b'|' => Tok::Pipe,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            c if c.is_ascii_alphabetic() => {
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_alphanumeric() {
                    i += 1;
                }
                let word = &src[start..=i];
                match word {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "adj" => Tok::Adj,
                    "exists" => Tok::Exists,
                    "forall" => Tok::Forall,
                    _ => index_token(word, start)?,
                }
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(FormulaError::Syntax {
                    pos: start,
                    msg: format!("unexpected character {ch:?}"),
                });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

fn index_token(word: &str, pos: usize) -> Result<Tok, FormulaError> {
    let (head, digits) = word.split_at(1);
    let ctor: fn(u32) -> Tok = match head {
        "x" => Tok::Var,
        "r" => Tok::Root,
        _ => {
            return Err(FormulaError::Syntax {
                pos,
                msg: format!("unknown identifier {word:?}"),
            })
        }
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(FormulaError::Syntax {
            pos,
            msg: format!("unknown identifier {word:?}"),
        });
    }
    let idx: u32 = digits.parse().map_err(|_| FormulaError::Syntax {
        pos,
        msg: format!("index too large in {word:?}"),
    })?;
    if idx == 0 {
        return Err(FormulaError::ZeroIndex);
    }
    Ok(ctor(idx))
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> Result<T, FormulaError> {
        Err(FormulaError::Syntax {
            pos: self.pos(),
            msg: format!("expected {expected}, found {}", self.peek().describe()),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), FormulaError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(&tok.describe())
        }
    }

    fn implies(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implies()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut parts = vec![self.and()?];
        while *self.peek() == Tok::Pipe {
            self.bump();
            parts.push(self.and()?);
        }
        Ok(Formula::or_of(parts))
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(Formula::and_of(parts))
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Exists | Tok::Forall => {
                let universal = self.bump() == Tok::Forall;
                let var = match self.bump() {
                    Tok::Var(i) => i,
                    _ => {
                        self.at -= 1;
                        return self.error("a variable after the quantifier");
                    }
                };
                self.expect(Tok::Dot)?;
                let body = self.implies()?;
                Ok(if universal {
                    Formula::forall(var, body)
                } else {
                    Formula::exists(var, body)
                })
            }
            _ => self.primary(),
        }
    }

    fn term(&mut self) -> Result<Term, FormulaError> {
        match *self.peek() {
            Tok::Var(i) => {
                self.bump();
                Ok(Term::Var(i))
            }
            Tok::Root(j) => {
                self.bump();
                Ok(Term::Root(j))
            }
            _ => self.error("a term (x<i> or r<j>)"),
        }
    }

    fn primary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Adj => {
                self.bump();
                self.expect(Tok::LParen)?;
                let a = self.term()?;
                self.expect(Tok::Comma)?;
                let b = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(Formula::Adjacent(a, b))
            }
            Tok::Var(_) | Tok::Root(_) => {
                let a = self.term()?;
                self.expect(Tok::Eq)?;
                let b = self.term()?;
                Ok(Formula::Equal(a, b))
            }
            Tok::LParen => {
                self.bump();
                let f = self.implies()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            _ => self.error("a formula"),
        }
    }
}

/// Parses formula source text. Rejects variables rebound along one path and
/// zero indices.
pub fn parse_formula(text: &str) -> Result<Formula, FormulaError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let f = p.implies()?;
    if *p.peek() != Tok::End {
        return p.error("end of input");
    }
    f.validate()?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Term::{Root, Var};

    #[test]
    fn atoms() {
        assert_eq!(
            parse_formula("adj(x1,r1)").unwrap(),
            Formula::Adjacent(Var(1), Root(1))
        );
        assert_eq!(
            parse_formula("exists x2. adj(x1,x2)").unwrap(),
            Formula::exists(2, Formula::Adjacent(Var(1), Var(2)))
        );
        assert_eq!(
            parse_formula(" x3 = r2 ").unwrap(),
            Formula::Equal(Var(3), Root(2))
        );
    }

    #[test]
    fn arity_violation_points_at_paren() {
        let err = parse_formula("adj(x1)").unwrap_err();
        assert_eq!(
            err,
            FormulaError::Syntax {
                pos: 6,
                msg: "expected ',', found ')'".into()
            }
        );
    }

    #[test]
    fn precedence() {
        let f = parse_formula("!true & false | true -> false -> true").unwrap();
        let expected = Formula::implies(
            Formula::Or(vec![
                Formula::And(vec![Formula::not(Formula::True), Formula::False]),
                Formula::True,
            ]),
            Formula::implies(Formula::False, Formula::True),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn quantifier_scope_extends_right() {
        let f = parse_formula("true & exists x1. adj(x1,x1) | false").unwrap();
        assert_eq!(
            f,
            Formula::And(vec![
                Formula::True,
                Formula::exists(
                    1,
                    Formula::Or(vec![Formula::adj(Var(1), Var(1)), Formula::False])
                )
            ])
        );
        let g = parse_formula("!exists x1. true & false").unwrap();
        assert_eq!(
            g,
            Formula::not(Formula::exists(
                1,
                Formula::And(vec![Formula::True, Formula::False])
            ))
        );
    }

    #[test]
    fn parenthesised_chain_stays_nested() {
        let f = parse_formula("(true & false) & true").unwrap();
        assert_eq!(
            f,
            Formula::And(vec![
                Formula::And(vec![Formula::True, Formula::False]),
                Formula::True
            ])
        );
    }

    #[test]
    fn errors() {
        assert_eq!(parse_formula("adj(x0,x1)"), Err(FormulaError::ZeroIndex));
        assert_eq!(parse_formula("r0 = x1"), Err(FormulaError::ZeroIndex));
        assert_eq!(
            parse_formula("exists x1. forall x1. true"),
            Err(FormulaError::Rebound { var: 1 })
        );
        assert!(matches!(
            parse_formula("adj(x1,y2)"),
            Err(FormulaError::Syntax { pos: 7, .. })
        ));
        assert!(matches!(
            parse_formula("exists r1. true"),
            Err(FormulaError::Syntax { .. })
        ));
        assert!(matches!(parse_formula(""), Err(FormulaError::Syntax { pos: 0, .. })));
        assert!(matches!(parse_formula("true true"), Err(FormulaError::Syntax { .. })));
        assert!(matches!(parse_formula("x1"), Err(FormulaError::Syntax { .. })));
        assert!(matches!(parse_formula("a - b"), Err(FormulaError::Syntax { .. })));
    }
}
