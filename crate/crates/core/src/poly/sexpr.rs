//! Plain-text s-expression serialization for [`Expr`].
//!
//! Input grammar (see docs/formats.md for the full description):
//!
//! ```text
//! expr   := rational | "t" | "s" | "sign" | list
//! list   := "(" op expr* ")"
//! op     := "+" | "*" | "-" | "neg" | "pow" | "abst" | "d" | "subs" | "term"
//! ```
//!
//! `(abst a q)` denotes `|t|^(a*s+q)` with rational `a`, `q`.
//! `(pow e n)` is a non-negative integer power. `(d e)` differentiates in
//! `t`; `(subs v e)` substitutes the rational `v` for `s`.
//! `(term (c0 c1 ...) j a q)` is one canonical term with ascending
//! s-coefficients, used by the printer; the parser accepts both forms.

use std::fmt::Write as _;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

use super::expr::{Expr, Rat, SPoly};

#[derive(Debug, Error, PartialEq)]
pub enum SexprError {
    #[error("unexpected end of input")]
    UnexpectedEof,
    #[error("unexpected token `{0}`")]
    UnexpectedToken(String),
    #[error("unknown operator `{0}`")]
    UnknownOp(String),
    #[error("bad rational `{0}`")]
    BadRational(String),
    #[error("operator `{op}` expects {expected} arguments, got {got}")]
    Arity {
        op: String,
        expected: &'static str,
        got: usize,
    },
    #[error("trailing input after expression")]
    TrailingInput,
}

fn tokenize(src: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for line in src.lines() {
        let line = line.split(';').next().unwrap_or("");
        for ch in line.chars() {
            match ch {
                '(' | ')' => {
                    if !cur.is_empty() {
                        tokens.push(std::mem::take(&mut cur));
                    }
                    tokens.push(ch.to_string());
                }
                c if c.is_whitespace() => {
                    if !cur.is_empty() {
                        tokens.push(std::mem::take(&mut cur));
                    }
                }
                c => cur.push(c),
            }
        }
        if !cur.is_empty() {
            tokens.push(std::mem::take(&mut cur));
        }
    }
    tokens
}

fn parse_rational(tok: &str) -> Result<Rat, SexprError> {
    BigRational::from_str(tok).map_err(|_| SexprError::BadRational(tok.to_string()))
}

#[derive(Debug)]
enum Node {
    Atom(String),
    List(Vec<Node>),
}

fn parse_node(tokens: &[String], pos: &mut usize) -> Result<Node, SexprError> {
    let tok = tokens.get(*pos).ok_or(SexprError::UnexpectedEof)?;
    *pos += 1;
    if tok == "(" {
        let mut items = Vec::new();
        loop {
            match tokens.get(*pos) {
                None => return Err(SexprError::UnexpectedEof),
                Some(t) if t == ")" => {
                    *pos += 1;
                    return Ok(Node::List(items));
                }
                _ => items.push(parse_node(tokens, pos)?),
            }
        }
    } else if tok == ")" {
        Err(SexprError::UnexpectedToken(tok.clone()))
    } else {
        Ok(Node::Atom(tok.clone()))
    }
}

fn node_to_expr(node: &Node, env: &std::collections::BTreeMap<String, Expr>) -> Result<Expr, SexprError> {
    match node {
        Node::Atom(a) => match a.as_str() {
            "t" => Ok(Expr::t_pow(1)),
            "s" => Ok(Expr::s()),
            "sign" => Ok(Expr::sign_t()),
            other => {
                if let Some(e) = env.get(other) {
                    Ok(e.clone())
                } else {
                    Ok(Expr::constant(parse_rational(other)?))
                }
            }
        },
        Node::List(items) => {
            let (head, args) = items
                .split_first()
                .ok_or_else(|| SexprError::UnknownOp("()".to_string()))?;
            let op = match head {
                Node::Atom(a) => a.as_str(),
                Node::List(_) => return Err(SexprError::UnknownOp("(list)".to_string())),
            };
            match op {
                "+" => {
                    let mut acc = Expr::zero();
                    for a in args {
                        acc = &acc + &node_to_expr(a, env)?;
                    }
                    Ok(acc)
                }
                "*" => {
                    let mut acc = Expr::int(1);
                    for a in args {
                        acc = &acc * &node_to_expr(a, env)?;
                    }
                    Ok(acc)
                }
                "-" => match args {
                    [x, y] => Ok(&node_to_expr(x, env)? - &node_to_expr(y, env)?),
                    _ => Err(SexprError::Arity {
                        op: "-".into(),
                        expected: "2",
                        got: args.len(),
                    }),
                },
                "neg" => match args {
                    [x] => Ok(-&node_to_expr(x, env)?),
                    _ => Err(SexprError::Arity {
                        op: "neg".into(),
                        expected: "1",
                        got: args.len(),
                    }),
                },
                "pow" => match args {
                    [x, Node::Atom(n)] => {
                        let n = parse_rational(n)?
                            .to_integer()
                            .to_u32()
                            .ok_or_else(|| SexprError::BadRational(format!("{n}")))?;
                        Ok(node_to_expr(x, env)?.pow(n))
                    }
                    _ => Err(SexprError::Arity {
                        op: "pow".into(),
                        expected: "expr integer",
                        got: args.len(),
                    }),
                },
                "d" => match args {
                    [x] => Ok(node_to_expr(x, env)?.differentiate()),
                    _ => Err(SexprError::Arity {
                        op: "d".into(),
                        expected: "1",
                        got: args.len(),
                    }),
                },
                "subs" => match args {
                    [Node::Atom(v), x] => {
                        Ok(node_to_expr(x, env)?.substitute_s(&parse_rational(v)?))
                    }
                    _ => Err(SexprError::Arity {
                        op: "subs".into(),
                        expected: "rational expr",
                        got: args.len(),
                    }),
                },
                "abst" => match args {
                    [Node::Atom(a), Node::Atom(q)] => {
                        Ok(Expr::abs_t_spow(parse_rational(a)?, parse_rational(q)?))
                    }
                    _ => Err(SexprError::Arity {
                        op: "abst".into(),
                        expected: "rational rational",
                        got: args.len(),
                    }),
                },
                "term" => match args {
                    [Node::List(coeffs), Node::Atom(j), Node::Atom(a), Node::Atom(q)] => {
                        let mut cs = Vec::with_capacity(coeffs.len());
                        for c in coeffs {
                            match c {
                                Node::Atom(tok) => cs.push(parse_rational(tok)?),
                                Node::List(_) => {
                                    return Err(SexprError::UnexpectedToken("(".into()))
                                }
                            }
                        }
                        let j = parse_rational(j)?
                            .to_integer()
                            .to_u8()
                            .ok_or_else(|| SexprError::BadRational(format!("{j}")))?;
                        Ok(Expr::term(
                            SPoly(cs),
                            j,
                            parse_rational(a)?,
                            parse_rational(q)?,
                        )
                        .canonicalize())
                    }
                    _ => Err(SexprError::Arity {
                        op: "term".into(),
                        expected: "(coeffs) j a q",
                        got: args.len(),
                    }),
                },
                other => Err(SexprError::UnknownOp(other.to_string())),
            }
        }
    }
}

/// Parse one expression from source text. `;` starts a line comment.
pub fn parse(src: &str) -> Result<Expr, SexprError> {
    let tokens = tokenize(src);
    let mut pos = 0;
    let env = std::collections::BTreeMap::new();
    let expr = node_to_expr(&parse_node(&tokens, &mut pos)?, &env)?;
    if pos != tokens.len() {
        return Err(SexprError::TrailingInput);
    }
    Ok(expr)
}

/// One top-level form of a claim data file.
#[derive(Debug, Clone)]
pub enum TopForm {
    /// `(def name expr)`: binds `name` for later forms in the same file.
    Def { name: String, expr: Expr },
    /// `(identity name lhs rhs)`: an exact-equality claim.
    Identity { name: String, lhs: Expr, rhs: Expr },
}

/// Parse a claim data file: a sequence of `def` and `identity` forms.
/// Names bound by `def` are visible to every later form.
pub fn parse_claim_file(src: &str) -> Result<Vec<TopForm>, SexprError> {
    let tokens = tokenize(src);
    let mut pos = 0;
    let mut env = std::collections::BTreeMap::new();
    let mut forms = Vec::new();
    while pos < tokens.len() {
        let node = parse_node(&tokens, &mut pos)?;
        let items = match &node {
            Node::List(items) => items,
            Node::Atom(a) => return Err(SexprError::UnexpectedToken(a.clone())),
        };
        match items.as_slice() {
            [Node::Atom(kw), Node::Atom(name), body] if kw == "def" => {
                let expr = node_to_expr(body, &env)?;
                env.insert(name.clone(), expr.clone());
                forms.push(TopForm::Def {
                    name: name.clone(),
                    expr,
                });
            }
            [Node::Atom(kw), Node::Atom(name), lhs, rhs] if kw == "identity" => {
                forms.push(TopForm::Identity {
                    name: name.clone(),
                    lhs: node_to_expr(lhs, &env)?,
                    rhs: node_to_expr(rhs, &env)?,
                });
            }
            _ => return Err(SexprError::UnknownOp("top-level form".to_string())),
        }
    }
    Ok(forms)
}

/// Print canonical form as a sum of `term` nodes; `parse` inverts this.
pub fn print(e: &Expr) -> String {
    let mut out = String::from("(+");
    for (key, coeff) in e.terms() {
        out.push_str(" (term (");
        let mut first = true;
        for c in &coeff.0 {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{c}");
        }
        let _ = write!(
            out,
            ") {} {} {})",
            key.sign_pow, key.exp_s_coeff, key.exp_const
        );
    }
    out.push(')');
    out
}
