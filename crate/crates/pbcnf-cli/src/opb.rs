//! OPB reader: `* comment` lines, then one constraint per line of the form
//! `(<sign><int> x<id> )+ (>=|=|<=) <int> ;`. A count header comment
//! `* #variable= N #constraint= M`, when present, is checked against the
//! parsed content.

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OpbError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: variable ids start at 1")]
    ZeroVariableId { line: usize, column: usize },
    #[error("header declares {declared} variables but x{max_seen} is referenced")]
    HeaderVarMismatch { declared: u64, max_seen: u32 },
    #[error("header declares {declared} constraints but {parsed} were parsed")]
    HeaderConstraintMismatch { declared: u64, parsed: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Eq,
    Le,
}

/// One parsed constraint line: signed terms over plain variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpbConstraint {
    pub terms: Vec<(BigInt, u32)>,
    pub relation: Relation,
    pub bound: BigInt,
    /// 1-based source line, carried into later error messages.
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OpbDocument {
    pub declared_vars: Option<u64>,
    pub declared_constraints: Option<u64>,
    pub constraints: Vec<OpbConstraint>,
    pub max_var_id: u32,
}

impl OpbDocument {
    /// The variable count the document implies: the declared count when a
    /// header is present, the largest referenced id otherwise.
    pub fn variable_count(&self) -> u32 {
        match self.declared_vars {
            Some(n) => n as u32,
            None => self.max_var_id,
        }
    }
}

struct Token<'a> {
    column: usize,
    text: &'a str,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(Token {
                    column: s + 1,
                    text: &line[s..i],
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(Token {
            column: s + 1,
            text: &line[s..],
        });
    }
    tokens
}

fn parse_int(token: &Token<'_>, line: usize, what: &str) -> Result<BigInt, OpbError> {
    token.text.parse::<BigInt>().map_err(|_| OpbError::Syntax {
        line,
        column: token.column,
        message: format!("expected {what}, found `{}`", token.text),
    })
}

fn parse_header(tokens: &[Token<'_>]) -> (Option<u64>, Option<u64>) {
    let mut vars = None;
    let mut constraints = None;
    let mut iter = tokens.iter().peekable();
    while let Some(tok) = iter.next() {
        match tok.text {
            "#variable=" => {
                if let Some(next) = iter.peek() {
                    vars = next.text.parse().ok();
                }
            }
            "#constraint=" => {
                if let Some(next) = iter.peek() {
                    constraints = next.text.parse().ok();
                }
            }
            _ => {}
        }
    }
    (vars, constraints)
}

pub fn parse_opb(text: &str) -> Result<OpbDocument, OpbError> {
    let mut doc = OpbDocument::default();
    for (line_idx, raw_line) in text.lines().enumerate() {
        let line_no = line_idx + 1;
        let tokens = tokenize(raw_line);
        if tokens.is_empty() {
            continue;
        }
        if tokens[0].text.starts_with('*') {
            if doc.declared_vars.is_none() && doc.declared_constraints.is_none() {
                let (vars, constraints) = parse_header(&tokens);
                doc.declared_vars = vars;
                doc.declared_constraints = constraints;
            }
            continue;
        }
        doc.constraints
            .push(parse_constraint(&tokens, line_no, &mut doc.max_var_id)?);
    }
    if let Some(declared) = doc.declared_vars {
        if u64::from(doc.max_var_id) > declared {
            return Err(OpbError::HeaderVarMismatch {
                declared,
                max_seen: doc.max_var_id,
            });
        }
    }
    if let Some(declared) = doc.declared_constraints {
        if doc.constraints.len() as u64 != declared {
            return Err(OpbError::HeaderConstraintMismatch {
                declared,
                parsed: doc.constraints.len(),
            });
        }
    }
    Ok(doc)
}

fn parse_constraint(
    tokens: &[Token<'_>],
    line: usize,
    max_var_id: &mut u32,
) -> Result<OpbConstraint, OpbError> {
    let mut terms = Vec::new();
    let mut i = 0;
    let relation = loop {
        let Some(tok) = tokens.get(i) else {
            return Err(OpbError::Syntax {
                line,
                column: tokens.last().map_or(1, |t| t.column + t.text.len()),
                message: "constraint ended before a relation (`>=`, `=`, `<=`)".into(),
            });
        };
        match tok.text {
            ">=" => break Relation::Ge,
            "=" => break Relation::Eq,
            "<=" => break Relation::Le,
            _ => {}
        }
        let coeff = parse_int(tok, line, "a coefficient")?;
        i += 1;
        let Some(var_tok) = tokens.get(i) else {
            return Err(OpbError::Syntax {
                line,
                column: tok.column + tok.text.len(),
                message: "coefficient without a variable".into(),
            });
        };
        let var_text = var_tok.text;
        let id: u32 = match var_text.strip_prefix('x').map(str::parse) {
            Some(Ok(id)) => id,
            _ => {
                return Err(OpbError::Syntax {
                    line,
                    column: var_tok.column,
                    message: format!("expected a variable like `x3`, found `{var_text}`"),
                })
            }
        };
        if id == 0 {
            return Err(OpbError::ZeroVariableId {
                line,
                column: var_tok.column,
            });
        }
        *max_var_id = (*max_var_id).max(id);
        terms.push((coeff, id));
        i += 1;
    };
    if terms.is_empty() {
        return Err(OpbError::Syntax {
            line,
            column: tokens[i].column,
            message: "constraint has no terms".into(),
        });
    }
    i += 1;
    let Some(bound_tok) = tokens.get(i) else {
        return Err(OpbError::Syntax {
            line,
            column: tokens[i - 1].column + tokens[i - 1].text.len(),
            message: "relation without a bound".into(),
        });
    };
    // Accept the terminator either as its own token or glued to the bound.
    let (bound_text, bound_col) = match bound_tok.text.strip_suffix(';') {
        Some(stripped) if !stripped.is_empty() => (stripped, bound_tok.column),
        _ => (bound_tok.text, bound_tok.column),
    };
    let bound = Token {
        column: bound_col,
        text: bound_text,
    };
    let bound = parse_int(&bound, line, "a bound")?;
    let had_inline_terminator = bound_tok.text.ends_with(';') && bound_tok.text.len() > 1;
    i += 1;
    if !had_inline_terminator {
        match tokens.get(i) {
            Some(tok) if tok.text == ";" => i += 1,
            Some(tok) => {
                return Err(OpbError::Syntax {
                    line,
                    column: tok.column,
                    message: format!("expected `;`, found `{}`", tok.text),
                })
            }
            None => {
                return Err(OpbError::Syntax {
                    line,
                    column: bound_col + bound_text.len(),
                    message: "missing `;` terminator".into(),
                })
            }
        }
    }
    if let Some(extra) = tokens.get(i) {
        return Err(OpbError::Syntax {
            line,
            column: extra.column,
            message: format!("unexpected `{}` after `;`", extra.text),
        });
    }
    Ok(OpbConstraint {
        terms,
        relation,
        bound,
        line,
    })
}
