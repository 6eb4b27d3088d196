use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub offset: usize,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let simple = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token { tok, offset: start });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            i = scan_number(bytes, i);
            // the scanned slice is pure ASCII, so this cannot split a char
            let text = &src[start..i];
            let value: f64 = text.parse().map_err(|_| ParseError::BadNumber {
                offset: start,
                text: text.to_string(),
            })?;
            if !value.is_finite() {
                return Err(ParseError::BadNumber {
                    offset: start,
                    text: text.to_string(),
                });
            }
            out.push(Token {
                tok: Tok::Num(value),
                offset: start,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(src[start..i].to_string()),
                offset: start,
            });
            continue;
        }
        // report the whole (possibly multi-byte) character
        let ch = src[start..].chars().next().unwrap_or('\u{FFFD}');
        return Err(ParseError::UnexpectedChar { offset: start, ch });
    }
    out.push(Token {
        tok: Tok::Eof,
        offset: src.len(),
    });
    Ok(out)
}

fn scan_number(b: &[u8], mut i: usize) -> usize {
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    if i < b.len() && b[i] == b'.' {
        i += 1;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        if j < b.len() && b[j].is_ascii_digit() {
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
        }
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_and_offsets() {
        let toks = tokenize("2.5e-3 * r").unwrap();
        assert_eq!(toks[0].tok, Tok::Num(2.5e-3));
        assert_eq!(toks[1].offset, 7);
        assert_eq!(toks[2].tok, Tok::Ident("r".into()));
        assert_eq!(toks[3].tok, Tok::Eof);
    }

    #[test]
    fn exponent_without_digits_is_left_alone() {
        // "2e" lexes as the number 2 followed by the identifier e
        let toks = tokenize("2e").unwrap();
        assert_eq!(toks[0].tok, Tok::Num(2.0));
        assert_eq!(toks[1].tok, Tok::Ident("e".into()));
    }

    #[test]
    fn lone_dot_and_overflow_rejected() {
        assert!(matches!(tokenize("."), Err(ParseError::BadNumber { offset: 0, .. })));
        assert!(matches!(tokenize("1e999"), Err(ParseError::BadNumber { .. })));
    }

    #[test]
    fn multibyte_char_reported() {
        let err = tokenize("r·t").unwrap_err();
        assert!(matches!(err, ParseError::UnexpectedChar { offset: 1, ch: '·' }));
    }
}
