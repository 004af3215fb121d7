//! Text syntax for formulas, as accepted by the command line:
//!
//! modal:       `T`, `P`, `~phi`, `(phi & psi)`, `<R>phi`
//! first-order: `T`, `x=y`, `P(x)`, `R(x,y)`, `~phi`, `(phi & psi)`,
//!              `exists x phi`
//!
//! Identifiers are `[A-Za-z][A-Za-z0-9_]*`; `T` and `exists` are reserved.
//! Conjunctions require their surrounding parentheses.

use std::fmt;

use thiserror::Error;

use super::{FoFormula, ModalFormula};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("formula parse error at byte {position}: {message}")]
pub struct FormulaParseError {
    pub position: usize,
    pub message: String,
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { text, pos: 0 }
    }

    fn err<T>(&self, message: impl fmt::Display) -> Result<T, FormulaParseError> {
        Err(FormulaParseError {
            position: self.pos,
            message: message.to_string(),
        })
    }

    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(|c: char| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<(), FormulaParseError> {
        match self.peek() {
            Some(found) if found == c => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(found) => self.err(format!("expected '{c}', found '{found}'")),
            None => self.err(format!("expected '{c}', found end of input")),
        }
    }

    fn ident(&mut self) -> Result<String, FormulaParseError> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let mut len = 0;
        for (i, c) in rest.char_indices() {
            let ok = if i == 0 {
                c.is_ascii_alphabetic()
            } else {
                c.is_ascii_alphanumeric() || c == '_'
            };
            if !ok {
                break;
            }
            len = i + c.len_utf8();
        }
        if len == 0 {
            return self.err("expected an identifier");
        }
        let name = rest[..len].to_owned();
        self.pos += len;
        Ok(name)
    }

    fn end(&mut self) -> Result<(), FormulaParseError> {
        match self.peek() {
            None => Ok(()),
            Some(c) => self.err(format!("unexpected trailing input starting at '{c}'")),
        }
    }
}

/// Parse a modal formula. Symbol names are not checked here; evaluation
/// rejects symbols missing from the model's signature.
pub fn parse_modal_formula(text: &str) -> Result<ModalFormula, FormulaParseError> {
    let mut cursor = Cursor::new(text);
    let phi = parse_modal(&mut cursor)?;
    cursor.end()?;
    Ok(phi)
}

fn parse_modal(c: &mut Cursor) -> Result<ModalFormula, FormulaParseError> {
    match c.peek() {
        Some('~') => {
            c.expect('~')?;
            Ok(ModalFormula::not(parse_modal(c)?))
        }
        Some('<') => {
            c.expect('<')?;
            let rel = c.ident()?;
            c.expect('>')?;
            Ok(ModalFormula::diamond(rel, parse_modal(c)?))
        }
        Some('(') => {
            c.expect('(')?;
            let lhs = parse_modal(c)?;
            c.expect('&')?;
            let rhs = parse_modal(c)?;
            c.expect(')')?;
            Ok(ModalFormula::and(lhs, rhs))
        }
        Some(ch) if ch.is_ascii_alphabetic() => {
            let name = c.ident()?;
            if name == "T" {
                Ok(ModalFormula::Top)
            } else if name == "exists" {
                c.err("'exists' is not a modal connective")
            } else {
                Ok(ModalFormula::Prop(name))
            }
        }
        Some(ch) => c.err(format!("unexpected character '{ch}'")),
        None => c.err("unexpected end of input"),
    }
}

/// Parse a first-order formula in the syntax above.
pub fn parse_fo_formula(text: &str) -> Result<FoFormula, FormulaParseError> {
    let mut cursor = Cursor::new(text);
    let phi = parse_fo(&mut cursor)?;
    cursor.end()?;
    Ok(phi)
}

fn parse_fo(c: &mut Cursor) -> Result<FoFormula, FormulaParseError> {
    match c.peek() {
        Some('~') => {
            c.expect('~')?;
            Ok(FoFormula::not(parse_fo(c)?))
        }
        Some('(') => {
            c.expect('(')?;
            let lhs = parse_fo(c)?;
            c.expect('&')?;
            let rhs = parse_fo(c)?;
            c.expect(')')?;
            Ok(FoFormula::and(lhs, rhs))
        }
        Some(ch) if ch.is_ascii_alphabetic() => {
            let name = c.ident()?;
            if name == "T" {
                return Ok(FoFormula::Top);
            }
            if name == "exists" {
                let var = c.ident()?;
                if var == "T" || var == "exists" {
                    return c.err(format!("'{var}' cannot be used as a variable"));
                }
                return Ok(FoFormula::exists(var, parse_fo(c)?));
            }
            match c.peek() {
                Some('(') => {
                    c.expect('(')?;
                    let x = c.ident()?;
                    match c.peek() {
                        Some(',') => {
                            c.expect(',')?;
                            let y = c.ident()?;
                            c.expect(')')?;
                            Ok(FoFormula::Rel(name, x, y))
                        }
                        _ => {
                            c.expect(')')?;
                            Ok(FoFormula::Pred(name, x))
                        }
                    }
                }
                Some('=') => {
                    c.expect('=')?;
                    let y = c.ident()?;
                    Ok(FoFormula::Eq(name, y))
                }
                _ => c.err("expected '(' or '=' after identifier"),
            }
        }
        Some(ch) => c.err(format!("unexpected character '{ch}'")),
        None => c.err("unexpected end of input"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_modal_syntax() {
        assert_eq!(parse_modal_formula("T").unwrap(), ModalFormula::Top);
        assert_eq!(
            parse_modal_formula("~P").unwrap(),
            ModalFormula::not(ModalFormula::prop("P"))
        );
        assert_eq!(
            parse_modal_formula("(P & <R>T)").unwrap(),
            ModalFormula::and(
                ModalFormula::prop("P"),
                ModalFormula::diamond("R", ModalFormula::Top)
            )
        );
        assert_eq!(
            parse_modal_formula(" <R_1_2> P_0 ").unwrap(),
            ModalFormula::diamond("R_1_2", ModalFormula::prop("P_0"))
        );
    }

    #[test]
    fn round_trips_through_display() {
        for text in ["T", "~(P & ~Q)", "<R><R>P", "(P & (Q & <R>~T))"] {
            let phi = parse_modal_formula(text).unwrap();
            assert_eq!(parse_modal_formula(&phi.to_string()).unwrap(), phi);
        }
    }

    #[test]
    fn rejects_bad_modal_syntax() {
        assert!(parse_modal_formula("").is_err());
        assert!(parse_modal_formula("P & Q").is_err());
        assert!(parse_modal_formula("(P &)").is_err());
        assert!(parse_modal_formula("<R").is_err());
        assert!(parse_modal_formula("P)").is_err());
    }

    #[test]
    fn parses_fo_syntax() {
        assert_eq!(
            parse_fo_formula("x=y").unwrap(),
            FoFormula::Eq("x".into(), "y".into())
        );
        assert_eq!(
            parse_fo_formula("P(x)").unwrap(),
            FoFormula::Pred("P".into(), "x".into())
        );
        assert_eq!(
            parse_fo_formula("R(x,y)").unwrap(),
            FoFormula::Rel("R".into(), "x".into(), "y".into())
        );
        assert_eq!(
            parse_fo_formula("exists y (R(x,y) & ~P(y))").unwrap(),
            FoFormula::exists(
                "y",
                FoFormula::and(
                    FoFormula::Rel("R".into(), "x".into(), "y".into()),
                    FoFormula::not(FoFormula::Pred("P".into(), "y".into()))
                )
            )
        );
    }

    #[test]
    fn fo_round_trips_through_display() {
        for text in ["T", "exists x (P(x) & ~x=y)", "~(R(x,y) & T)"] {
            let phi = parse_fo_formula(text).unwrap();
            assert_eq!(parse_fo_formula(&phi.to_string()).unwrap(), phi);
        }
    }

    #[test]
    fn rejects_bad_fo_syntax() {
        assert!(parse_fo_formula("exists T P(x)").is_err());
        assert!(parse_fo_formula("P(").is_err());
        assert!(parse_fo_formula("x=").is_err());
        assert!(parse_fo_formula("x").is_err());
    }
}
