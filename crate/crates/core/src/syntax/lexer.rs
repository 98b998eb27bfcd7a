//! Tokenizer for the input language. Tracks line/column for error reports.

use std::fmt;

use num::BigInt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Tok {
    /// Lowercase identifier (predicate, functor, constant, or keyword).
    Ident(String),
    /// Uppercase or `_`-leading identifier.
    VarName(String),
    Int(BigInt),
    /// One of `:- . , ( ) [ ] | / ?- #show + - * //` or a comparison symbol.
    Punct(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::VarName(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

pub struct Lexer<'a> {
    src: &'a [u8],
    at: usize,
    line: u32,
    col: u32,
}

pub type LexResult = Result<(Tok, Pos), (Pos, String)>;

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            at: 0,
            line: 1,
            col: 1,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.at).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.src.get(self.at + 1).copied()
    }

    fn peek3(&self) -> Option<u8> {
        self.src.get(self.at + 2).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.at += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'%') => {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    pub fn next_token(&mut self) -> LexResult {
        self.skip_trivia();
        let pos = self.pos();
        let Some(c) = self.peek() else {
            return Ok((Tok::Eof, pos));
        };
        match c {
            b'a'..=b'z' => {
                let word = self.lex_word();
                Ok((Tok::Ident(word), pos))
            }
            b'A'..=b'Z' | b'_' => {
                let word = self.lex_word();
                Ok((Tok::VarName(word), pos))
            }
            b'0'..=b'9' => {
                let mut digits = String::new();
                while let Some(d) = self.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d as char);
                        self.bump();
                    } else {
                        break;
                    }
                }
                let n: BigInt = digits.parse().expect("digit string");
                Ok((Tok::Int(n), pos))
            }
            b':' => {
                self.bump();
                if self.peek() == Some(b'-') {
                    self.bump();
                    Ok((Tok::Punct(":-"), pos))
                } else {
                    Err((pos, "expected `:-`".to_string()))
                }
            }
            b'?' => {
                self.bump();
                if self.peek() == Some(b'-') {
                    self.bump();
                    Ok((Tok::Punct("?-"), pos))
                } else {
                    Err((pos, "expected `?-`".to_string()))
                }
            }
            b'#' => {
                // `#show`, `#<`, `#>`, `#=<`, `#>=`
                match self.peek2() {
                    Some(b's') => {
                        self.bump();
                        let word = self.lex_word();
                        if word == "show" {
                            Ok((Tok::Punct("#show"), pos))
                        } else {
                            Err((pos, format!("unknown directive `#{word}`")))
                        }
                    }
                    Some(b'<') => {
                        self.bump();
                        self.bump();
                        Ok((Tok::Punct("#<"), pos))
                    }
                    Some(b'>') => {
                        self.bump();
                        self.bump();
                        if self.peek() == Some(b'=') {
                            self.bump();
                            Ok((Tok::Punct("#>="), pos))
                        } else {
                            Ok((Tok::Punct("#>"), pos))
                        }
                    }
                    Some(b'=') if self.peek3() == Some(b'<') => {
                        self.bump();
                        self.bump();
                        self.bump();
                        Ok((Tok::Punct("#=<"), pos))
                    }
                    _ => Err((pos, "unknown `#` token".to_string())),
                }
            }
            b'\\' => {
                self.bump();
                if self.peek() == Some(b'=') {
                    self.bump();
                    Ok((Tok::Punct("\\="), pos))
                } else {
                    Err((pos, "expected `\\=`".to_string()))
                }
            }
            b'=' => {
                self.bump();
                if self.peek() == Some(b'<') {
                    self.bump();
                    Ok((Tok::Punct("=<"), pos))
                } else {
                    Ok((Tok::Punct("="), pos))
                }
            }
            b'<' => {
                self.bump();
                Ok((Tok::Punct("<"), pos))
            }
            b'>' => {
                self.bump();
                if self.peek() == Some(b'=') {
                    self.bump();
                    Ok((Tok::Punct(">="), pos))
                } else {
                    Ok((Tok::Punct(">"), pos))
                }
            }
            b'/' => {
                self.bump();
                if self.peek() == Some(b'/') {
                    self.bump();
                    Ok((Tok::Punct("//"), pos))
                } else {
                    Ok((Tok::Punct("/"), pos))
                }
            }
            b'+' => {
                self.bump();
                Ok((Tok::Punct("+"), pos))
            }
            b'-' => {
                self.bump();
                Ok((Tok::Punct("-"), pos))
            }
            b'*' => {
                self.bump();
                Ok((Tok::Punct("*"), pos))
            }
            b'.' => {
                self.bump();
                Ok((Tok::Punct("."), pos))
            }
            b',' => {
                self.bump();
                Ok((Tok::Punct(","), pos))
            }
            b'(' => {
                self.bump();
                Ok((Tok::Punct("("), pos))
            }
            b')' => {
                self.bump();
                Ok((Tok::Punct(")"), pos))
            }
            b'[' => {
                self.bump();
                Ok((Tok::Punct("["), pos))
            }
            b']' => {
                self.bump();
                Ok((Tok::Punct("]"), pos))
            }
            b'|' => {
                self.bump();
                Ok((Tok::Punct("|"), pos))
            }
            other => Err((pos, format!("unexpected character `{}`", other as char))),
        }
    }

    fn lex_word(&mut self) -> String {
        let mut word = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' {
                word.push(c as char);
                self.bump();
            } else {
                break;
            }
        }
        word
    }
}
