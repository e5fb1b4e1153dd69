//! Text form of free elements.
//!
//! ```text
//! term := atom | atom "(" nat ")"
//!       | "join(" term {"," term} ")"
//!       | "bowtie(" term "," term "," term ")"
//!       | "bowtie@" nat "(" term "," term "," term ")"
//! ```
//!
//! Atoms are resolved by a caller-supplied function; for `S(Λ)` they are `0`,
//! `a`, `b` and `c(i)`. `bowtie` builds the generator at the least level above
//! its arguments; `bowtie@n` forces level `n` and is only printed when an
//! element genuinely sits higher than its components require.

use std::fmt::Write as _;

use thiserror::Error;

use crate::order::JoinSemilattice;

use super::{FreeElement, FreeError, FreeExtension};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown atom {0}")]
    UnknownAtom(String),
    #[error(transparent)]
    Eval(#[from] FreeError),
}

/// Canonical text of `x`. `atom` renders base elements.
pub fn print_term<E: Clone + Ord>(x: &FreeElement<E>, zero: &E, atom: &dyn Fn(&E) -> String) -> String {
    let mut out = String::new();
    write_term(&mut out, x, zero, atom);
    out
}

fn write_term<E: Clone + Ord>(out: &mut String, x: &FreeElement<E>, zero: &E, atom: &dyn Fn(&E) -> String) {
    match x {
        FreeElement::Base(e) => out.push_str(&atom(e)),
        FreeElement::Reduced(r) => {
            let has_diag = !matches!(r.diagonal(), FreeElement::Base(e) if e == zero);
            let parts = r.rest().len() + usize::from(has_diag);
            if parts > 1 {
                out.push_str("join(");
            }
            if has_diag {
                write_term(out, r.diagonal(), zero, atom);
            }
            for (i, t) in r.rest().iter().enumerate() {
                if has_diag || i > 0 {
                    out.push(',');
                }
                if 1 + t.max_rank() == r.rank() {
                    out.push_str("bowtie(");
                } else {
                    let _ = write!(out, "bowtie@{}(", r.rank());
                }
                write_term(out, &t.u, zero, atom);
                out.push(',');
                write_term(out, &t.v, zero, atom);
                out.push(',');
                write_term(out, &t.w, zero, atom);
                out.push(')');
            }
            if parts > 1 {
                out.push(')');
            }
        }
    }
}

/// Parses and evaluates a term. `atom(name, arg)` resolves `name` or
/// `name(arg)` to a base element.
pub fn parse_term<B, A>(ext: &FreeExtension<B>, input: &str, atom: A) -> Result<FreeElement<B::Elem>, TermError>
where
    B: JoinSemilattice,
    A: Fn(&str, Option<u64>) -> Option<B::Elem>,
{
    let mut p = Parser {
        src: input.as_bytes(),
        pos: 0,
    };
    let x = p.term(ext, &atom)?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("trailing input"));
    }
    Ok(x)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> TermError {
        TermError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), TermError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn word(&mut self) -> Result<&str, TermError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a name"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }

    fn nat(&mut self) -> Result<u64, TermError> {
        let pos = self.pos;
        let w = self.word()?;
        w.parse().map_err(|_| TermError::Syntax {
            pos,
            msg: format!("expected a natural number, found {w}"),
        })
    }

    fn term<B, A>(&mut self, ext: &FreeExtension<B>, atom: &A) -> Result<FreeElement<B::Elem>, TermError>
    where
        B: JoinSemilattice,
        A: Fn(&str, Option<u64>) -> Option<B::Elem>,
    {
        let name = self.word()?.to_string();
        match name.as_str() {
            "join" => {
                self.expect(b'(')?;
                let mut acc = self.term(ext, atom)?;
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    let next = self.term(ext, atom)?;
                    acc = ext.join(&acc, &next);
                }
                self.expect(b')')?;
                Ok(acc)
            }
            "bowtie" => {
                let level = if self.peek() == Some(b'@') {
                    self.pos += 1;
                    Some(self.nat()? as u32)
                } else {
                    None
                };
                self.expect(b'(')?;
                let u = self.term(ext, atom)?;
                self.expect(b',')?;
                let v = self.term(ext, atom)?;
                self.expect(b',')?;
                let w = self.term(ext, atom)?;
                self.expect(b')')?;
                Ok(match level {
                    Some(l) => ext.bowtie_at(l, u, v, w)?,
                    None => ext.bowtie(u, v, w)?,
                })
            }
            _ => {
                let arg = if self.peek() == Some(b'(') {
                    self.pos += 1;
                    let n = self.nat()?;
                    self.expect(b')')?;
                    Some(n)
                } else {
                    None
                };
                let shown = match arg {
                    Some(n) => format!("{name}({n})"),
                    None => name.clone(),
                };
                atom(&name, arg)
                    .map(FreeElement::Base)
                    .ok_or(TermError::UnknownAtom(shown))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::fixtures::square;
    use crate::order::ElemId;

    #[test]
    fn named_atoms_round_trip() {
        let s = square();
        let ext = FreeExtension::new(&s);
        let atom = |n: &str, arg: Option<u64>| if arg.is_none() { s.id_of(n) } else { None };
        let x = parse_term(&ext, "join(bowtie(a, b, ab), bowtie(ab, a, b))", atom).unwrap();
        let text = print_term(&x, &ElemId(0), &|e| s.name(*e).to_string());
        assert_eq!(parse_term(&ext, &text, atom).unwrap(), x);
        assert_eq!(parse_term(&ext, "join(bowtie(a,b,ab),bowtie(b,a,ab))", atom).unwrap(), FreeElement::Base(ElemId(3)));
    }

    #[test]
    fn syntax_errors() {
        let s = square();
        let ext = FreeExtension::new(&s);
        let atom = |n: &str, _: Option<u64>| s.id_of(n);
        assert!(matches!(parse_term(&ext, "join(a,", atom), Err(TermError::Syntax { .. })));
        assert!(matches!(parse_term(&ext, "q", atom), Err(TermError::UnknownAtom(_))));
        assert!(matches!(parse_term(&ext, "a b", atom), Err(TermError::Syntax { .. })));
        assert_eq!(parse_term(&ext, "bowtie(a,a,ab)", atom), Err(TermError::Eval(FreeError::NotInC)));
    }
}
