//! S-expression reader for planning-domain text. Atoms are lowercased;
//! `;` starts a comment that runs to the end of the line.

use super::PddlError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SExpr {
    Atom(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, pos) | SExpr::List(_, pos) => *pos,
        }
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(text, _) => Some(text),
            SExpr::List(..) => None,
        }
    }

    pub fn list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            SExpr::Atom(..) => None,
        }
    }

    /// Head atom of a non-empty list.
    pub fn head(&self) -> Option<&str> {
        self.list()?.first()?.atom()
    }

    pub fn expect_atom(&self, what: &str) -> Result<&str, PddlError> {
        self.atom()
            .ok_or_else(|| syntax(self.pos(), format!("expected {what}, found a list")))
    }

    pub fn expect_list(&self, what: &str) -> Result<&[SExpr], PddlError> {
        self.list().ok_or_else(|| {
            syntax(
                self.pos(),
                format!("expected {what}, found `{}`", self.atom().unwrap_or("")),
            )
        })
    }
}

pub(crate) fn syntax(pos: Pos, message: impl Into<String>) -> PddlError {
    PddlError::Syntax {
        line: pos.line,
        col: pos.col,
        message: message.into(),
    }
}

/// Parses every top-level expression in `text`.
pub fn parse(text: &str) -> Result<Vec<SExpr>, PddlError> {
    let mut stack: Vec<(Vec<SExpr>, Pos)> = Vec::new();
    let mut top = Vec::new();
    let mut atom = String::new();
    let mut atom_pos = Pos { line: 1, col: 1 };

    fn flush(atom: &mut String, pos: Pos, stack: &mut [(Vec<SExpr>, Pos)], top: &mut Vec<SExpr>) {
        if atom.is_empty() {
            return;
        }
        let expr = SExpr::Atom(std::mem::take(atom).to_lowercase(), pos);
        match stack.last_mut() {
            Some((items, _)) => items.push(expr),
            None => top.push(expr),
        }
    }

    for (line_no, line) in text.lines().enumerate() {
        let line_no = line_no + 1;
        for (col, ch) in line.chars().enumerate() {
            let pos = Pos {
                line: line_no,
                col: col + 1,
            };
            if ch == ';' {
                break;
            }
            match ch {
                '(' => {
                    flush(&mut atom, atom_pos, &mut stack, &mut top);
                    stack.push((Vec::new(), pos));
                }
                ')' => {
                    flush(&mut atom, atom_pos, &mut stack, &mut top);
                    let Some((items, open)) = stack.pop() else {
                        return Err(syntax(pos, "unbalanced `)`"));
                    };
                    let expr = SExpr::List(items, open);
                    match stack.last_mut() {
                        Some((parent, _)) => parent.push(expr),
                        None => top.push(expr),
                    }
                }
                c if c.is_whitespace() => flush(&mut atom, atom_pos, &mut stack, &mut top),
                c => {
                    if atom.is_empty() {
                        atom_pos = pos;
                    }
                    atom.push(c);
                }
            }
        }
        flush(&mut atom, atom_pos, &mut stack, &mut top);
    }
    if let Some((_, open)) = stack.last() {
        return Err(syntax(*open, "unclosed `(`"));
    }
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_lists_and_comments() {
        let exprs = parse("(define ; comment (ignored\n  (Domain X))").unwrap();
        assert_eq!(exprs.len(), 1);
        let items = exprs[0].list().unwrap();
        assert_eq!(items[0].atom(), Some("define"));
        assert_eq!(items[1].head(), Some("domain"));
        assert_eq!(items[1].list().unwrap()[1].atom(), Some("x"));
        assert_eq!(items[1].pos(), Pos { line: 2, col: 3 });
    }

    #[test]
    fn reports_unbalanced_parens() {
        assert!(matches!(
            parse("(a (b)"),
            Err(PddlError::Syntax { line: 1, col: 1, .. })
        ));
        assert!(matches!(parse("a)\n"), Err(PddlError::Syntax { line: 1, col: 2, .. })));
    }
}
