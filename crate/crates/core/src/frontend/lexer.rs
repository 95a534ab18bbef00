use super::{ErrorKind, ParseError, SourceSpan};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    /// Variable name without the `?`.
    Var(String),
    /// Unsigned numeric literal, as written.
    Number(String),
    Str(String),
    Dot,
    Comma,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Eq,
    Lt,
    Gt,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Var(v) => format!("'?{v}'"),
            Tok::Number(n) => format!("number {n}"),
            Tok::Str(_) => "string".to_string(),
            Tok::Dot => "'.'".into(),
            Tok::Comma => "','".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Eq => "'='".into(),
            Tok::Lt => "'<'".into(),
            Tok::Gt => "'>'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
    file: &'a str,
}

impl<'a> Lexer<'a> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, line: usize, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            span: SourceSpan {
                file: self.file.to_string(),
                line,
                column,
            },
            kind: ErrorKind::Lexical,
            message: message.into(),
        }
    }

    fn ident(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(|c| is_ident_char(*c)) {
            s.push(c);
            self.bump();
        }
        s
    }

    fn digits(&mut self, s: &mut String) {
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.bump();
        }
    }

    fn number(&mut self) -> String {
        let mut s = String::new();
        self.digits(&mut s);
        // A '.' belongs to the number only when a digit follows; otherwise it
        // separates statements.
        let mut ahead = self.chars.clone();
        ahead.next();
        if self.peek() == Some('.') && ahead.peek().is_some_and(char::is_ascii_digit) {
            s.push('.');
            self.bump();
            self.digits(&mut s);
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let mut ahead = self.chars.clone();
            ahead.next();
            let sign = ahead.peek().copied().filter(|c| *c == '+' || *c == '-');
            if sign.is_some() {
                ahead.next();
            }
            if ahead.peek().is_some_and(char::is_ascii_digit) {
                s.push(self.bump().unwrap());
                if let Some(c) = sign {
                    s.push(c);
                    self.bump();
                }
                self.digits(&mut s);
            }
        }
        s
    }

    fn string(&mut self, line: usize, column: usize) -> Result<String, ParseError> {
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error(line, column, "unterminated string")),
                Some('"') => return Ok(s),
                Some('\\') => match self.bump() {
                    Some(c @ ('"' | '\\')) => s.push(c),
                    _ => {
                        return Err(self.error(
                            self.line,
                            self.column,
                            "only \\\" and \\\\ escapes are allowed",
                        ))
                    }
                },
                Some(c) => s.push(c),
            }
        }
    }
}

pub fn tokenize(text: &str, file: &str) -> Result<Vec<Token>, ParseError> {
    let mut lx = Lexer {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
        file,
    };
    let mut out = Vec::new();
    loop {
        while lx.peek().is_some_and(char::is_whitespace) {
            lx.bump();
        }
        let (line, column) = (lx.line, lx.column);
        let Some(c) = lx.peek() else {
            out.push(Token {
                tok: Tok::Eof,
                line,
                column,
            });
            return Ok(out);
        };
        let tok = match c {
            '#' => {
                while lx.peek().is_some_and(|c| c != '\n') {
                    lx.bump();
                }
                continue;
            }
            '?' => {
                lx.bump();
                if !lx.peek().is_some_and(is_ident_start) {
                    return Err(lx.error(line, column, "expected a variable name after '?'"));
                }
                Tok::Var(lx.ident())
            }
            '"' => {
                lx.bump();
                Tok::Str(lx.string(line, column)?)
            }
            c if c.is_ascii_digit() => {
                let n = lx.number();
                if lx.peek().is_some_and(is_ident_char) {
                    return Err(lx.error(line, column, format!("malformed number '{n}…'")));
                }
                Tok::Number(n)
            }
            c if is_ident_start(c) => Tok::Ident(lx.ident()),
            _ => {
                lx.bump();
                match c {
                    '.' => Tok::Dot,
                    ',' => Tok::Comma,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '=' => Tok::Eq,
                    '<' => Tok::Lt,
                    '>' => Tok::Gt,
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    other => {
                        return Err(lx.error(
                            line,
                            column,
                            format!("unexpected character '{other}'"),
                        ))
                    }
                }
            }
        };
        out.push(Token { tok, line, column });
    }
}
