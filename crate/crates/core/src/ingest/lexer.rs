//! Tokenizer for the mini-language.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenClass {
    Ident,
    /// `int`, `float`, ... usable as a type name.
    TypeKeyword,
    Modifier,
    /// `@Override` and friends, lexed as one token.
    Annotation,
    /// Structural keyword (`if`, `class`, ...). Implied by the node kind, never a leaf.
    Keyword,
    /// `this`
    This,
    Number,
    Str,
    /// `true`, `false`, `null`
    Constant,
    Operator,
    Punct,
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexeme {
    pub class: TokenClass,
    pub text: String,
    pub line: usize,
    pub column: usize,
}

impl Lexeme {
    /// Whether the lexeme survives as a leaf token in the parsed tree.
    pub fn is_significant(&self) -> bool {
        !matches!(
            self.class,
            TokenClass::Keyword | TokenClass::Punct | TokenClass::Eof
        )
    }

    pub fn is(&self, text: &str) -> bool {
        self.text == text && self.class != TokenClass::Str
    }
}

pub const TYPE_KEYWORDS: &[&str] = &[
    "int", "float", "double", "bool", "boolean", "char", "long", "void", "string",
];
pub const MODIFIERS: &[&str] = &[
    "public",
    "private",
    "protected",
    "static",
    "abstract",
    "final",
];
pub const KEYWORDS: &[&str] = &[
    "class",
    "interface",
    "extends",
    "implements",
    "if",
    "else",
    "while",
    "for",
    "return",
    "new",
];

const TWO_CHAR_OPS: &[&str] = &["==", "!=", "<=", ">=", "&&", "||"];
const ONE_CHAR_OPS: &str = "+-*/%<>!=";
const PUNCT: &str = "(){}[];,.";

pub fn lex(source: &str) -> Result<Vec<Lexeme>> {
    let chars: Vec<char> = source.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! advance {
        ($n:expr) => {
            for _ in 0..$n {
                if chars[i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
        };
    }

    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        if c.is_whitespace() {
            advance!(1);
            continue;
        }
        if c == '/' && next == Some('/') {
            while i < chars.len() && chars[i] != '\n' {
                advance!(1);
            }
            continue;
        }
        if c == '/' && next == Some('*') {
            let (start_line, start_col) = (line, col);
            advance!(2);
            loop {
                if i >= chars.len() {
                    return Err(Error::Syntax {
                        line: start_line,
                        column: start_col,
                        message: "unterminated block comment".into(),
                    });
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    advance!(2);
                    break;
                }
                advance!(1);
            }
            continue;
        }

        let (start_line, start_col, start) = (line, col, i);
        let class = if c.is_ascii_alphabetic() || c == '_' || c == '@' {
            advance!(1);
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance!(1);
            }
            let text: String = chars[start..i].iter().collect();
            if c == '@' {
                if text.len() == 1 {
                    return Err(Error::Syntax {
                        line: start_line,
                        column: start_col,
                        message: "annotation without a name".into(),
                    });
                }
                TokenClass::Annotation
            } else if TYPE_KEYWORDS.contains(&text.as_str()) {
                TokenClass::TypeKeyword
            } else if MODIFIERS.contains(&text.as_str()) {
                TokenClass::Modifier
            } else if KEYWORDS.contains(&text.as_str()) {
                TokenClass::Keyword
            } else if text == "this" {
                TokenClass::This
            } else if matches!(text.as_str(), "true" | "false" | "null") {
                TokenClass::Constant
            } else {
                TokenClass::Ident
            }
        } else if c.is_ascii_digit() {
            advance!(1);
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance!(1);
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                advance!(1);
                while i < chars.len() && chars[i].is_ascii_digit() {
                    advance!(1);
                }
            }
            TokenClass::Number
        } else if c == '"' {
            advance!(1);
            loop {
                match chars.get(i) {
                    None | Some('\n') => {
                        return Err(Error::Syntax {
                            line: start_line,
                            column: start_col,
                            message: "unterminated string literal".into(),
                        })
                    }
                    Some('\\') if i + 1 < chars.len() => advance!(2),
                    Some('"') => {
                        advance!(1);
                        break;
                    }
                    Some(_) => advance!(1),
                }
            }
            TokenClass::Str
        } else if next.is_some_and(|n| TWO_CHAR_OPS.contains(&format!("{c}{n}").as_str())) {
            advance!(2);
            TokenClass::Operator
        } else if ONE_CHAR_OPS.contains(c) {
            advance!(1);
            TokenClass::Operator
        } else if PUNCT.contains(c) {
            advance!(1);
            TokenClass::Punct
        } else {
            return Err(Error::Syntax {
                line,
                column: col,
                message: format!("unexpected character `{c}`"),
            });
        };
        out.push(Lexeme {
            class,
            text: chars[start..i].iter().collect(),
            line: start_line,
            column: start_col,
        });
    }
    out.push(Lexeme {
        class: TokenClass::Eof,
        text: String::new(),
        line,
        column: col,
    });
    Ok(out)
}

/// Lexemes that become leaf tokens of the parsed tree, in source order.
pub fn significant_tokens(source: &str) -> Result<Vec<String>> {
    Ok(lex(source)?
        .into_iter()
        .filter(Lexeme::is_significant)
        .map(|l| l.text)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_whitespace_are_dropped() {
        let a = significant_tokens("int x = 1; // trailing\n/* block\n */ y = x;").unwrap();
        let b = significant_tokens("int x=1;y=x;").unwrap();
        assert_eq!(a, b);
        assert_eq!(a, ["int", "x", "=", "1", "y", "=", "x"]);
    }

    #[test]
    fn classes_and_positions() {
        let toks = lex("if (a >= 2.5)\n  @Override").unwrap();
        let classes: Vec<_> = toks.iter().map(|t| t.class).collect();
        assert_eq!(
            classes,
            [
                TokenClass::Keyword,
                TokenClass::Punct,
                TokenClass::Ident,
                TokenClass::Operator,
                TokenClass::Number,
                TokenClass::Punct,
                TokenClass::Annotation,
                TokenClass::Eof
            ]
        );
        assert_eq!((toks[6].line, toks[6].column), (2, 3));
    }

    #[test]
    fn string_literal_with_escape() {
        let toks = lex(r#"s = "a \" b";"#).unwrap();
        assert_eq!(toks[2].text, r#""a \" b""#);
        assert!(lex("\"open").is_err());
    }
}
