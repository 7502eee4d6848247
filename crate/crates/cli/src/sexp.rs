//! Located s-expressions. `;` starts a comment running to the end of the line.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a, _) => Some(a),
            Sexp::List(..) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {msg}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub msg: String,
}

impl SyntaxError {
    pub fn new(pos: Pos, msg: impl Into<String>) -> SyntaxError {
        SyntaxError { pos, msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Open,
    Close,
    Atom(String),
}

/// Splits `src` into tokens with their starting positions.
pub fn tokenize(src: &str) -> Vec<(Token, Pos)> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = src.chars().peekable();
    let mut atom: Option<(String, Pos)> = None;
    let flush = |atom: &mut Option<(String, Pos)>, out: &mut Vec<(Token, Pos)>| {
        if let Some((a, p)) = atom.take() {
            out.push((Token::Atom(a), p));
        }
    };
    while let Some(c) = chars.next() {
        let here = Pos { line, col };
        match c {
            '(' | ')' => {
                flush(&mut atom, &mut out);
                out.push((if c == '(' { Token::Open } else { Token::Close }, here));
            }
            ';' => {
                flush(&mut atom, &mut out);
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
            }
            c if c.is_whitespace() => flush(&mut atom, &mut out),
            c => match &mut atom {
                Some((a, _)) => a.push(c),
                None => atom = Some((c.to_string(), here)),
            },
        }
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    flush(&mut atom, &mut out);
    out
}

/// Parses every top-level expression of `src`.
pub fn parse_all(src: &str) -> Result<Vec<Sexp>, SyntaxError> {
    let mut stack: Vec<(Vec<Sexp>, Pos)> = Vec::new();
    let mut top = Vec::new();
    for (tok, pos) in tokenize(src) {
        match tok {
            Token::Open => stack.push((Vec::new(), pos)),
            Token::Close => {
                let (items, start) = stack.pop().ok_or_else(|| SyntaxError::new(pos, "unbalanced `)`"))?;
                let list = Sexp::List(items, start);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(list),
                    None => top.push(list),
                }
            }
            Token::Atom(a) => {
                let atom = Sexp::Atom(a, pos);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(atom),
                    None => top.push(atom),
                }
            }
        }
    }
    if let Some((_, start)) = stack.pop() {
        return Err(SyntaxError::new(start, "unclosed `(`"));
    }
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_comments() {
        let s = parse_all("(a b) ; note\n  (c (d))").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].pos(), Pos { line: 2, col: 3 });
        let Sexp::List(items, _) = &s[1] else { panic!() };
        assert_eq!(items[0].as_atom(), Some("c"));
    }

    #[test]
    fn unbalanced() {
        assert_eq!(parse_all("(a").unwrap_err().pos, Pos { line: 1, col: 1 });
        assert_eq!(parse_all("a)").unwrap_err().pos, Pos { line: 1, col: 2 });
    }
}
