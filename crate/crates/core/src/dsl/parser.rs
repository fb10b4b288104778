//! Recursive-descent parser for constructor-call expressions:
//!
//! ```text
//! expr   := call | list | INT | STRING | "None" | "True" | "False" | IDENT
//! call   := dotted "(" [arg ("," arg)* [","]] ")"
//! dotted := IDENT ("." IDENT)*
//! arg    := [IDENT "="] expr
//! list   := "[" [expr ("," expr)* [","]] "]"
//! ```

use super::ast::Expr;
use super::lexer::{tokenize, Token, TokenKind};
use super::{DslError, ErrorCategory};

/// Deepest accepted nesting of calls and lists.
pub const MAX_DEPTH: usize = 128;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    depth: usize,
}

fn syntax(offset: usize, message: impl Into<String>) -> DslError {
    DslError::new(ErrorCategory::Syntax, message).at(offset)
}

fn describe(kind: &TokenKind) -> String {
    match kind {
        TokenKind::Ident(s) => format!("identifier {s:?}"),
        TokenKind::Int(n) => format!("integer {n}"),
        TokenKind::Str(_) => "string".into(),
        TokenKind::LParen => "'('".into(),
        TokenKind::RParen => "')'".into(),
        TokenKind::LBracket => "'['".into(),
        TokenKind::RBracket => "']'".into(),
        TokenKind::Comma => "','".into(),
        TokenKind::Equals => "'='".into(),
        TokenKind::Dot => "'.'".into(),
        TokenKind::Eof => "end of input".into(),
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_kind_at(&self, ahead: usize) -> &TokenKind {
        let idx = (self.pos + ahead).min(self.tokens.len() - 1);
        &self.tokens[idx].kind
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn enter(&mut self) -> Result<(), DslError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(syntax(self.peek().offset, "expression nested too deeply"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, DslError> {
        let token = self.bump();
        match token.kind {
            TokenKind::Int(n) => Ok(Expr::Int(n)),
            TokenKind::Str(s) => Ok(Expr::Str(s)),
            TokenKind::LBracket => {
                self.enter()?;
                let items = self.list_items()?;
                self.depth -= 1;
                Ok(Expr::List(items))
            }
            TokenKind::Ident(first) => {
                let mut name = first;
                let mut dotted = false;
                while self.peek().kind == TokenKind::Dot {
                    self.bump();
                    let part = self.bump();
                    let TokenKind::Ident(part) = part.kind else {
                        return Err(syntax(part.offset, "expected identifier after '.'"));
                    };
                    name.push('.');
                    name.push_str(&part);
                    dotted = true;
                }
                if self.peek().kind == TokenKind::LParen {
                    self.bump();
                    self.enter()?;
                    let call = self.call_args(name)?;
                    self.depth -= 1;
                    return Ok(call);
                }
                if dotted {
                    return Err(syntax(token.offset, format!("expected '(' after {name}")));
                }
                Ok(match name.as_str() {
                    "None" => Expr::None,
                    "True" => Expr::Bool(true),
                    "False" => Expr::Bool(false),
                    _ => Expr::Ident(name),
                })
            }
            other => Err(syntax(
                token.offset,
                format!("expected an expression, found {}", describe(&other)),
            )),
        }
    }

    fn list_items(&mut self) -> Result<Vec<Expr>, DslError> {
        let mut items = Vec::new();
        loop {
            if self.peek().kind == TokenKind::RBracket {
                self.bump();
                return Ok(items);
            }
            items.push(self.expr()?);
            match self.peek().kind {
                TokenKind::Comma => {
                    self.bump();
                }
                TokenKind::RBracket => {}
                ref other => {
                    return Err(syntax(
                        self.peek().offset,
                        format!("expected ',' or ']', found {}", describe(other)),
                    ))
                }
            }
        }
    }

    fn call_args(&mut self, name: String) -> Result<Expr, DslError> {
        let mut args = Vec::new();
        let mut kwargs: Vec<(String, Expr)> = Vec::new();
        loop {
            if self.peek().kind == TokenKind::RParen {
                self.bump();
                return Ok(Expr::Call { name, args, kwargs });
            }
            let offset = self.peek().offset;
            let keyword = match (self.peek_kind_at(0), self.peek_kind_at(1)) {
                (TokenKind::Ident(k), TokenKind::Equals) => Some(k.clone()),
                _ => None,
            };
            match keyword {
                Some(key) => {
                    self.bump();
                    self.bump();
                    if kwargs.iter().any(|(k, _)| *k == key) {
                        return Err(syntax(offset, format!("duplicate keyword argument {key:?}")));
                    }
                    let value = self.expr()?;
                    kwargs.push((key, value));
                }
                None => {
                    if !kwargs.is_empty() {
                        return Err(syntax(offset, "positional argument after keyword argument"));
                    }
                    args.push(self.expr()?);
                }
            }
            match self.peek().kind {
                TokenKind::Comma => {
                    self.bump();
                }
                TokenKind::RParen => {}
                ref other => {
                    return Err(syntax(
                        self.peek().offset,
                        format!("expected ',' or ')', found {}", describe(other)),
                    ))
                }
            }
        }
    }
}

/// Parses one complete expression.
pub fn parse(text: &str) -> Result<Expr, DslError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        depth: 0,
    };
    let expr = parser.expr()?;
    let rest = parser.peek();
    if rest.kind != TokenKind::Eof {
        return Err(syntax(
            rest.offset,
            format!("unexpected {} after expression", describe(&rest.kind)),
        ));
    }
    Ok(expr)
}
