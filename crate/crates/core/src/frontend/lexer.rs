use super::{FrontendError, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    ConId(String),
    Data,
    Type,
    Case,
    Of,
    Let,
    In,
    Equals,
    Bar,
    Arrow,
    DoubleColon,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Underscore,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) | TokenKind::ConId(s) => format!("`{s}`"),
            TokenKind::Data => "`data`".into(),
            TokenKind::Type => "`type`".into(),
            TokenKind::Case => "`case`".into(),
            TokenKind::Of => "`of`".into(),
            TokenKind::Let => "`let`".into(),
            TokenKind::In => "`in`".into(),
            TokenKind::Equals => "`=`".into(),
            TokenKind::Bar => "`|`".into(),
            TokenKind::Arrow => "`->`".into(),
            TokenKind::DoubleColon => "`::`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::Semi => "`;`".into(),
            TokenKind::Underscore => "`_`".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: Pos,
    /// First token on its source line; drives the indentation rule.
    pub line_start: bool,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, FrontendError> {
    let chars: Vec<char> = src.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut last_line = 0usize;
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, c);
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                {
                    let ch = chars[i];
                    advance(&mut i, &mut line, &mut col, ch);
                }
            }
            continue;
        }
        if c == '{' && chars.get(i + 1) == Some(&'-') {
            let start = Pos { line, col };
            let mut depth = 0usize;
            loop {
                if i >= chars.len() {
                    return Err(FrontendError::syntax(start, "unterminated block comment"));
                }
                if chars[i] == '{' && chars.get(i + 1) == Some(&'-') {
                    depth += 1;
                    advance(&mut i, &mut line, &mut col, '{');
                    advance(&mut i, &mut line, &mut col, '-');
                } else if chars[i] == '-' && chars.get(i + 1) == Some(&'}') {
                    depth -= 1;
                    advance(&mut i, &mut line, &mut col, '-');
                    advance(&mut i, &mut line, &mut col, '}');
                    if depth == 0 {
                        break;
                    }
                } else {
                    {
                        let ch = chars[i];
                        advance(&mut i, &mut line, &mut col, ch);
                    }
                }
            }
            continue;
        }
        let pos = Pos { line, col };
        let line_start = line != last_line;
        last_line = line;
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let (kind, len) = if two == "->" {
            (TokenKind::Arrow, 2)
        } else if two == "::" {
            (TokenKind::DoubleColon, 2)
        } else if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len()
                && (chars[j].is_alphanumeric() || chars[j] == '_' || chars[j] == '\'')
            {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            let kind = match word.as_str() {
                "data" => TokenKind::Data,
                "type" => TokenKind::Type,
                "case" => TokenKind::Case,
                "of" => TokenKind::Of,
                "let" => TokenKind::Let,
                "in" => TokenKind::In,
                "_" => TokenKind::Underscore,
                _ if c.is_uppercase() => TokenKind::ConId(word),
                _ => TokenKind::Ident(word),
            };
            (kind, j - i)
        } else {
            let kind = match c {
                '=' => TokenKind::Equals,
                '|' => TokenKind::Bar,
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                '{' => TokenKind::LBrace,
                '}' => TokenKind::RBrace,
                ';' => TokenKind::Semi,
                _ => {
                    return Err(FrontendError::syntax(
                        pos,
                        format!("unexpected character {c:?}"),
                    ))
                }
            };
            (kind, 1)
        };
        for _ in 0..len {
            {
                let ch = chars[i];
                advance(&mut i, &mut line, &mut col, ch);
            }
        }
        tokens.push(Token {
            kind,
            pos,
            line_start,
        });
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_keywords_and_positions() {
        let toks = tokenize("and2 x y = case x of\n  False -> False -- c\n").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.kind.clone()).collect();
        assert_eq!(kinds[0], TokenKind::Ident("and2".into()));
        assert_eq!(kinds[4], TokenKind::Case);
        assert_eq!(kinds[7], TokenKind::ConId("False".into()));
        assert_eq!(toks[7].pos, Pos { line: 2, col: 3 });
        assert!(toks[7].line_start);
        assert!(!toks[8].line_start);
        assert_eq!(toks.len(), 10);
    }

    #[test]
    fn nested_block_comments() {
        let toks = tokenize("{- a {- b -} c -} x").unwrap();
        assert_eq!(toks.len(), 1);
        assert!(tokenize("{- open").is_err());
    }

    #[test]
    fn rejects_operators() {
        let err = tokenize("f x = x + 1").unwrap_err();
        assert!(err.to_string().contains("1:9"));
    }
}
