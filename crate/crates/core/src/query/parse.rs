//! Hand-written recursive-descent parser for rule syntax
//! `Name(v1,...,vk) :- A1(u,...), A2(...), ...`.

use super::{Atom, Query};
use crate::error::{Error, Result};

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            Ok(())
        } else {
            Err(self.err(format!("expected `{tok}`")))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return Err(self.err("expected identifier")),
        }
        let end = chars
            .find(|&(_, c)| !(c.is_ascii_alphanumeric() || c == '_'))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        let id = rest[..end].to_string();
        self.pos += end;
        Ok(id)
    }

    fn var_list(&mut self) -> Result<Vec<String>> {
        self.expect("(")?;
        let mut vars = vec![self.ident()?];
        loop {
            match self.peek() {
                Some(',') => {
                    self.pos += 1;
                    vars.push(self.ident()?);
                }
                Some(')') => {
                    self.pos += 1;
                    return Ok(vars);
                }
                _ => return Err(self.err("expected `,` or `)`")),
            }
        }
    }
}

pub(crate) fn parse(text: &str) -> Result<Query> {
    let mut cur = Cursor { src: text, pos: 0 };
    let name = cur.ident()?;
    let head = cur.var_list()?;
    cur.expect(":-")?;
    let mut atoms = Vec::new();
    loop {
        let atom_name = cur.ident()?;
        let vars = cur.var_list()?;
        atoms.push(Atom::new(atom_name, vars));
        match cur.peek() {
            Some(',') => cur.pos += 1,
            None => break,
            Some('.') => {
                cur.pos += 1;
                if cur.peek().is_some() {
                    return Err(cur.err("unexpected input after `.`"));
                }
                break;
            }
            Some(_) => return Err(cur.err("expected `,` or end of rule")),
        }
    }
    let q = Query::new(name, head, atoms)?;
    if let Some(v) = q
        .head_vars()
        .iter()
        .enumerate()
        .find(|(i, _)| q.atoms_of_var(*i).is_empty())
        .map(|(_, v)| v)
    {
        return Err(Error::UnboundHeadVar(v.clone()));
    }
    Ok(q)
}
