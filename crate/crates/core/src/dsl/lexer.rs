use super::{DslError, ErrorCategory};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum TokenKind {
    Ident(String),
    Int(i64),
    Str(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Equals,
    Dot,
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub offset: usize,
}

fn lexical(offset: usize, message: impl Into<String>) -> DslError {
    DslError::new(ErrorCategory::Lexical, message).at(offset)
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, DslError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let simple = match c {
            b'(' => Some(TokenKind::LParen),
            b')' => Some(TokenKind::RParen),
            b'[' => Some(TokenKind::LBracket),
            b']' => Some(TokenKind::RBracket),
            b',' => Some(TokenKind::Comma),
            b'=' => Some(TokenKind::Equals),
            b'.' => Some(TokenKind::Dot),
            _ => None,
        };
        if let Some(kind) = simple {
            tokens.push(Token { kind, offset: start });
            i += 1;
            continue;
        }
        match c {
            c if c.is_ascii_whitespace() => i += 1,
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Ident(text[start..i].to_string()),
                    offset: start,
                });
            }
            c if c.is_ascii_digit() || c == b'-' => {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let literal = &text[start..i];
                if literal == "-" {
                    return Err(lexical(start, "'-' must be followed by digits"));
                }
                let value = literal
                    .parse::<i64>()
                    .map_err(|_| lexical(start, format!("integer {literal} out of range")))?;
                tokens.push(Token {
                    kind: TokenKind::Int(value),
                    offset: start,
                });
            }
            b'"' | b'\'' => {
                let quote = c;
                i += 1;
                let mut value = String::new();
                loop {
                    let Some(&b) = bytes.get(i) else {
                        return Err(lexical(start, "unterminated string"));
                    };
                    match b {
                        b'\\' => {
                            match bytes.get(i + 1) {
                                Some(&e @ (b'"' | b'\'' | b'\\')) => value.push(e as char),
                                Some(_) => return Err(lexical(i, "unsupported escape sequence")),
                                None => return Err(lexical(start, "unterminated string")),
                            }
                            i += 2;
                        }
                        b if b == quote => {
                            i += 1;
                            break;
                        }
                        _ => {
                            // Copy one UTF-8 scalar.
                            let ch = text[i..].chars().next().expect("in bounds");
                            value.push(ch);
                            i += ch.len_utf8();
                        }
                    }
                }
                tokens.push(Token {
                    kind: TokenKind::Str(value),
                    offset: start,
                });
            }
            _ => {
                let ch = text[i..].chars().next().expect("in bounds");
                return Err(lexical(start, format!("unexpected character {ch:?}")));
            }
        }
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        offset: text.len(),
    });
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        tokenize(text).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn tokens_of_a_call() {
        assert_eq!(
            kinds("Interval.of(-12, 'a\\'b')"),
            vec![
                TokenKind::Ident("Interval".into()),
                TokenKind::Dot,
                TokenKind::Ident("of".into()),
                TokenKind::LParen,
                TokenKind::Int(-12),
                TokenKind::Comma,
                TokenKind::Str("a'b".into()),
                TokenKind::RParen,
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn lexical_errors_carry_offsets() {
        let e = tokenize("Year(2024) $").unwrap_err();
        assert_eq!(e.category, ErrorCategory::Lexical);
        assert_eq!(e.offset, Some(11));
        assert_eq!(tokenize("\"open").unwrap_err().category, ErrorCategory::Lexical);
        assert_eq!(tokenize("\"a\\n\"").unwrap_err().category, ErrorCategory::Lexical);
        assert_eq!(tokenize("99999999999999999999").unwrap_err().category, ErrorCategory::Lexical);
        assert_eq!(tokenize("- 1").unwrap_err().category, ErrorCategory::Lexical);
    }
}
