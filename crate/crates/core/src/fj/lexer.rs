use super::ast::Pos;
use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Raw text between `[` and `]` directly after `new`.
    Label(String),
    Punct(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

const PUNCT: [&str; 12] = ["==", "{", "}", "(", ")", ";", ",", ".", "=", "[", "]", "^"];

fn ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

pub fn lex(file: &str, text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out: Vec<Token> = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let err = |pos: Pos, msg: String| ParseError::Syntax { file: file.to_string(), pos, msg };
    macro_rules! bump {
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
        let pos = Pos { line, col };
        if c.is_whitespace() {
            bump!();
        } else if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
        } else if c == '/' && chars.get(i + 1) == Some(&'*') {
            bump!();
            bump!();
            loop {
                if i >= chars.len() {
                    return Err(err(pos, "unterminated comment".into()));
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
        } else if ident_start(c) {
            let mut s = String::new();
            while i < chars.len() && ident_char(chars[i]) {
                s.push(chars[i]);
                bump!();
            }
            out.push(Token { tok: Tok::Ident(s), pos });
        } else if c == '[' && matches!(out.last(), Some(Token { tok: Tok::Ident(k), .. }) if k == "new") {
            bump!();
            let mut s = String::new();
            while i < chars.len() && chars[i] != ']' {
                if chars[i].is_whitespace() {
                    return Err(err(Pos { line, col }, "whitespace in label".into()));
                }
                s.push(chars[i]);
                bump!();
            }
            if i >= chars.len() {
                return Err(err(pos, "unterminated label".into()));
            }
            bump!();
            if s.is_empty() {
                return Err(err(pos, "empty label".into()));
            }
            out.push(Token { tok: Tok::Label(s), pos });
        } else if let Some(p) = PUNCT.iter().find(|p| text_at(&chars, i, p)) {
            for _ in 0..p.len() {
                bump!();
            }
            out.push(Token { tok: Tok::Punct(p), pos });
        } else {
            return Err(err(pos, format!("unexpected character `{c}`")));
        }
    }
    out.push(Token { tok: Tok::Eof, pos: Pos { line, col } });
    Ok(out)
}

fn text_at(chars: &[char], i: usize, p: &str) -> bool {
    p.chars().enumerate().all(|(k, c)| chars.get(i + k) == Some(&c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_labels() {
        let t = lex("f", "new[l1] A(); // c\n x == $0").unwrap();
        let toks: Vec<Tok> = t.into_iter().map(|t| t.tok).collect();
        assert_eq!(
            toks,
            vec![
                Tok::Ident("new".into()),
                Tok::Label("l1".into()),
                Tok::Ident("A".into()),
                Tok::Punct("("),
                Tok::Punct(")"),
                Tok::Punct(";"),
                Tok::Ident("x".into()),
                Tok::Punct("=="),
                Tok::Ident("$0".into()),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn positions_and_errors() {
        let t = lex("f", "a\n  b").unwrap();
        assert_eq!(t[1].pos, Pos { line: 2, col: 3 });
        assert!(lex("f", "a # b").is_err());
        assert!(lex("f", "/* open").is_err());
    }
}
