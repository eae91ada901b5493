//! Minimal s-expression reader with source positions. `;` starts a line comment.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SExpr {
    Atom(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(s, _) => Some(s),
            SExpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            SExpr::Atom(..) => None,
        }
    }

    /// Head symbol of a non-empty list whose first element is an atom.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|l| l.first()).and_then(SExpr::as_atom)
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Atom(s, _) => write!(f, "{s}"),
            SExpr::List(items, _) => {
                write!(f, "(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{it}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {msg}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub msg: String,
}

/// Read every top-level expression of `text`.
pub fn read_all(text: &str) -> Result<Vec<SExpr>, SyntaxError> {
    let mut stack: Vec<(Vec<SExpr>, Pos)> = Vec::new();
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = text.chars().peekable();
    let mut atom = String::new();
    let mut atom_pos = Pos::default();

    fn flush(atom: &mut String, pos: Pos, stack: &mut [(Vec<SExpr>, Pos)], out: &mut Vec<SExpr>) {
        if atom.is_empty() {
            return;
        }
        let a = SExpr::Atom(std::mem::take(atom), pos);
        match stack.last_mut() {
            Some((items, _)) => items.push(a),
            None => out.push(a),
        }
    }

    while let Some(c) = chars.next() {
        let here = Pos { line, col };
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
        match c {
            ';' => {
                flush(&mut atom, atom_pos, &mut stack, &mut out);
                for c in chars.by_ref() {
                    if c == '\n' {
                        line += 1;
                        col = 1;
                        break;
                    }
                }
            }
            '(' => {
                flush(&mut atom, atom_pos, &mut stack, &mut out);
                stack.push((Vec::new(), here));
            }
            ')' => {
                flush(&mut atom, atom_pos, &mut stack, &mut out);
                let (items, pos) = stack.pop().ok_or(SyntaxError {
                    pos: here,
                    msg: "unbalanced `)`".into(),
                })?;
                let list = SExpr::List(items, pos);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(list),
                    None => out.push(list),
                }
            }
            c if c.is_whitespace() => flush(&mut atom, atom_pos, &mut stack, &mut out),
            c => {
                if atom.is_empty() {
                    atom_pos = here;
                }
                atom.push(c);
            }
        }
    }
    flush(&mut atom, atom_pos, &mut stack, &mut out);
    if let Some((_, pos)) = stack.last() {
        return Err(SyntaxError { pos: *pos, msg: "unclosed `(`".into() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_with_positions() {
        let e = read_all("; c\n(a (b c))\n x").unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].pos(), Pos { line: 2, col: 1 });
        assert_eq!(e[0].to_string(), "(a (b c))");
        assert_eq!(e[1].pos(), Pos { line: 3, col: 2 });
    }

    #[test]
    fn unbalanced_is_error() {
        assert!(read_all("(a").is_err());
        let err = read_all("a)").unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, col: 2 });
    }
}
