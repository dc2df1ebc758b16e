use super::Diagnostic;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Real(f64),
    Str(String),
    Semi,
    Comma,
    LBracket,
    RBracket,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Arrow,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eq,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Int(i) => format!("integer {i}"),
            Tok::Real(r) => format!("number {r}"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Semi => "';'".into(),
            Tok::Comma => "','".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::Arrow => "'->'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::Eq => "'=='".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

/// Splits source text into tokens with 1-based line/column positions.
pub fn tokenize(text: &str) -> Result<Vec<Token>, Vec<Diagnostic>> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! advance {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c.is_whitespace() {
            advance!();
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance!();
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            advance!();
            advance!();
            let mut closed = false;
            while i < chars.len() {
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    advance!();
                    advance!();
                    closed = true;
                    break;
                }
                advance!();
            }
            if !closed {
                errors.push(Diagnostic::error("unclosed block comment", tl, tc));
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance!();
            }
            let s: String = chars[start..i].iter().collect();
            tokens.push(Token {
                tok: Tok::Ident(s),
                line: tl,
                col: tc,
            });
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            let mut is_real = false;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance!();
            }
            if i < chars.len() && chars[i] == '.' {
                is_real = true;
                advance!();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    advance!();
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let save = (i, line, col);
                advance!();
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    advance!();
                }
                if i < chars.len() && chars[i].is_ascii_digit() {
                    is_real = true;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        advance!();
                    }
                } else {
                    (i, line, col) = save;
                }
            }
            let s: String = chars[start..i].iter().collect();
            let tok = if is_real {
                s.parse::<f64>().map(Tok::Real).ok()
            } else {
                s.parse::<i64>().map(Tok::Int).ok()
            };
            match tok {
                Some(tok) => tokens.push(Token {
                    tok,
                    line: tl,
                    col: tc,
                }),
                None => errors.push(Diagnostic::error(
                    format!("malformed number '{s}'"),
                    tl,
                    tc,
                )),
            }
            continue;
        }
        if c == '"' {
            advance!();
            let start = i;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                advance!();
            }
            if i < chars.len() && chars[i] == '"' {
                let s: String = chars[start..i].iter().collect();
                advance!();
                tokens.push(Token {
                    tok: Tok::Str(s),
                    line: tl,
                    col: tc,
                });
            } else {
                errors.push(Diagnostic::error("unterminated string", tl, tc));
            }
            continue;
        }
        let two = chars.get(i + 1).copied();
        let tok = match (c, two) {
            ('-', Some('>')) => {
                advance!();
                Some(Tok::Arrow)
            }
            ('=', Some('=')) => {
                advance!();
                Some(Tok::Eq)
            }
            (';', _) => Some(Tok::Semi),
            (',', _) => Some(Tok::Comma),
            ('[', _) => Some(Tok::LBracket),
            (']', _) => Some(Tok::RBracket),
            ('(', _) => Some(Tok::LParen),
            (')', _) => Some(Tok::RParen),
            ('{', _) => Some(Tok::LBrace),
            ('}', _) => Some(Tok::RBrace),
            ('+', _) => Some(Tok::Plus),
            ('-', _) => Some(Tok::Minus),
            ('*', _) => Some(Tok::Star),
            ('/', _) => Some(Tok::Slash),
            ('^', _) => Some(Tok::Caret),
            _ => None,
        };
        advance!();
        match tok {
            Some(tok) => tokens.push(Token {
                tok,
                line: tl,
                col: tc,
            }),
            None => errors.push(Diagnostic::error(
                format!("unexpected character '{c}'"),
                tl,
                tc,
            )),
        }
    }
    tokens.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    if errors.is_empty() {
        Ok(tokens)
    } else {
        Err(errors)
    }
}
