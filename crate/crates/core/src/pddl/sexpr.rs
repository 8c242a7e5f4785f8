//! Tokenizer and s-expression reader for the PDDL dialect.
//!
//! Identifiers are case-insensitive and normalized to lower case. Comments run
//! from `;` to end of line, except that a comment of the form
//! `;; @group: <name>` is kept and attached to the next list that opens.

use std::fmt;

use super::PddlError;

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

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Word(String),
    Annotation(String),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: Pos,
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '(' | ')' => {
                chars.next();
                col += 1;
                out.push(Token {
                    tok: if c == '(' { Tok::Open } else { Tok::Close },
                    pos,
                });
            }
            ';' => {
                let mut comment = String::new();
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    comment.push(c);
                    chars.next();
                    col += 1;
                }
                let body = comment.trim_start_matches(';').trim();
                if let Some(rest) = body.strip_prefix("@group:") {
                    out.push(Token {
                        tok: Tok::Annotation(rest.trim().to_lowercase()),
                        pos,
                    });
                }
            }
            _ => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    word.extend(c.to_lowercase());
                    chars.next();
                    col += 1;
                }
                out.push(Token {
                    tok: Tok::Word(word),
                    pos,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum SExpr {
    Word(String, Pos),
    List {
        items: Vec<SExpr>,
        pos: Pos,
        annotation: Option<String>,
    },
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Word(_, p) => *p,
            SExpr::List { pos, .. } => *pos,
        }
    }

    pub fn as_word(&self) -> Option<&str> {
        match self {
            SExpr::Word(w, _) => Some(w),
            SExpr::List { .. } => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List { items, .. } => Some(items),
            SExpr::Word(..) => None,
        }
    }

    /// Short rendering for "found ..." in error messages.
    pub fn describe(&self) -> String {
        match self {
            SExpr::Word(w, _) => format!("`{w}`"),
            SExpr::List { items, .. } => match items.first().and_then(SExpr::as_word) {
                Some(head) => format!("`({head} ...)`"),
                None => "a list".to_string(),
            },
        }
    }
}

/// Reads exactly one top-level s-expression; trailing tokens are an error.
pub fn read_one(text: &str) -> Result<SExpr, PddlError> {
    let tokens = tokenize(text);
    let mut idx = 0;
    let mut pending = None;
    let expr = loop {
        match tokens.get(idx) {
            None => {
                return Err(PddlError::syntax(Pos { line: 1, col: 1 }, &["("], "end of input"))
            }
            Some(Token {
                tok: Tok::Annotation(a),
                ..
            }) => {
                pending = Some(a.clone());
                idx += 1;
            }
            Some(_) => break read_expr(&tokens, &mut idx, &mut pending)?,
        }
    };
    // stray annotations after the final list are harmless
    while let Some(t) = tokens.get(idx) {
        match &t.tok {
            Tok::Annotation(_) => idx += 1,
            other => {
                return Err(PddlError::syntax(
                    t.pos,
                    &["end of input"],
                    &describe_tok(other),
                ))
            }
        }
    }
    Ok(expr)
}

fn describe_tok(tok: &Tok) -> String {
    match tok {
        Tok::Open => "`(`".into(),
        Tok::Close => "`)`".into(),
        Tok::Word(w) => format!("`{w}`"),
        Tok::Annotation(a) => format!("annotation `@group: {a}`"),
    }
}

fn read_expr(
    tokens: &[Token],
    idx: &mut usize,
    pending: &mut Option<String>,
) -> Result<SExpr, PddlError> {
    let t = &tokens[*idx];
    *idx += 1;
    match &t.tok {
        Tok::Word(w) => Ok(SExpr::Word(w.clone(), t.pos)),
        Tok::Close => Err(PddlError::syntax(t.pos, &["(", "identifier"], "`)`")),
        Tok::Annotation(_) => unreachable!("annotations are consumed by the caller"),
        Tok::Open => {
            let annotation = pending.take();
            let mut items = Vec::new();
            loop {
                match tokens.get(*idx) {
                    None => {
                        let end = tokens.last().map(|t| t.pos).unwrap_or_default();
                        return Err(PddlError::syntax(end, &[")"], "end of input"));
                    }
                    Some(Token { tok: Tok::Close, .. }) => {
                        *idx += 1;
                        return Ok(SExpr::List {
                            items,
                            pos: t.pos,
                            annotation,
                        });
                    }
                    Some(Token {
                        tok: Tok::Annotation(a),
                        ..
                    }) => {
                        *pending = Some(a.clone());
                        *idx += 1;
                    }
                    Some(_) => items.push(read_expr(tokens, idx, pending)?),
                }
            }
        }
    }
}
