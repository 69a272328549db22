//! Just enough of a Python tokenizer to lint scripts without running them.

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Name(String),
    Number,
    Str(String),
    Op(String),
    /// End of a logical line.
    Newline,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

/// A logical line: its indentation and tokens (without the trailing newline).
#[derive(Debug)]
pub(crate) struct LogicalLine {
    pub indent: usize,
    pub tokens: Vec<Token>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ShapeError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

pub(crate) struct Tokenized {
    pub lines: Vec<LogicalLine>,
    pub errors: Vec<ShapeError>,
}

const STRING_PREFIXES: [&str; 12] = ["r", "u", "b", "f", "br", "rb", "fr", "rf", "Rb", "bR", "R", "F"];

pub(crate) fn tokenize(source: &str) -> Tokenized {
    let chars: Vec<char> = source.chars().collect();
    let mut lines = Vec::new();
    let mut errors = Vec::new();
    let mut stack: Vec<(char, usize, usize)> = Vec::new();
    let mut current: Vec<Token> = Vec::new();
    let mut indent = 0;
    let mut at_line_start = true;
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;

    macro_rules! advance {
        ($n:expr) => {{
            for _ in 0..$n {
                if chars[i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        if at_line_start && stack.is_empty() {
            // Measure indentation; skip blank and comment-only lines.
            let mut width = 0;
            let mut j = i;
            while j < chars.len() && (chars[j] == ' ' || chars[j] == '\t') {
                width += if chars[j] == '\t' { 8 - width % 8 } else { 1 };
                j += 1;
            }
            let rest = chars.get(j).copied();
            advance!(j - i);
            match rest {
                None => break,
                Some('\n') | Some('#') | Some('\r') => {
                    while i < chars.len() && chars[i] != '\n' {
                        advance!(1);
                    }
                    if i < chars.len() {
                        advance!(1);
                    }
                    continue;
                }
                _ => {
                    indent = width;
                    at_line_start = false;
                    continue;
                }
            }
        }
        let (tl, tc) = (line, col);
        match c {
            '\n' => {
                advance!(1);
                if stack.is_empty() {
                    if !current.is_empty() {
                        current.push(Token { tok: Tok::Newline, line: tl, column: tc });
                        lines.push(LogicalLine { indent, tokens: std::mem::take(&mut current) });
                    }
                    at_line_start = true;
                }
            }
            ' ' | '\t' | '\r' | '\x0c' => advance!(1),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    advance!(1);
                }
            }
            '\\' if chars.get(i + 1) == Some(&'\n') => advance!(2),
            '"' | '\'' => match scan_string(&chars, i) {
                Ok((end, value)) => {
                    advance!(end - i);
                    current.push(Token { tok: Tok::Str(value), line: tl, column: tc });
                }
                Err(()) => {
                    errors.push(ShapeError { line: tl, column: tc, message: "unterminated string literal".into() });
                    break;
                }
            },
            _ if c.is_alphabetic() || c == '_' => {
                let start = i;
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[start..j].iter().collect();
                if STRING_PREFIXES.contains(&word.as_str()) && matches!(chars.get(j), Some('"') | Some('\'')) {
                    match scan_string(&chars, j) {
                        Ok((end, value)) => {
                            advance!(end - i);
                            current.push(Token { tok: Tok::Str(value), line: tl, column: tc });
                        }
                        Err(()) => {
                            errors.push(ShapeError { line: tl, column: tc, message: "unterminated string literal".into() });
                            break;
                        }
                    }
                } else {
                    advance!(j - i);
                    current.push(Token { tok: Tok::Name(word), line: tl, column: tc });
                }
            }
            _ if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                let mut j = i;
                while j < chars.len() {
                    let d = chars[j];
                    let exp_sign = matches!(d, '+' | '-') && j > i && matches!(chars[j - 1], 'e' | 'E');
                    if d.is_ascii_alphanumeric() || d == '.' || d == '_' || exp_sign {
                        j += 1;
                    } else {
                        break;
                    }
                }
                advance!(j - i);
                current.push(Token { tok: Tok::Number, line: tl, column: tc });
            }
            '(' | '[' | '{' => {
                stack.push((c, tl, tc));
                advance!(1);
                current.push(Token { tok: Tok::Op(c.to_string()), line: tl, column: tc });
            }
            ')' | ']' | '}' => {
                let open = match c {
                    ')' => '(',
                    ']' => '[',
                    _ => '{',
                };
                match stack.pop() {
                    Some((o, _, _)) if o == open => {}
                    Some((o, ol, oc)) => errors.push(ShapeError {
                        line: tl,
                        column: tc,
                        message: format!("`{c}` does not match `{o}` opened at {ol}:{oc}"),
                    }),
                    None => errors.push(ShapeError { line: tl, column: tc, message: format!("unmatched `{c}`") }),
                }
                advance!(1);
                current.push(Token { tok: Tok::Op(c.to_string()), line: tl, column: tc });
            }
            _ => {
                // Longest operator first.
                let three: String = chars[i..(i + 3).min(chars.len())].iter().collect();
                let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
                let op = if ["**=", "//=", ">>=", "<<=", "..."].contains(&three.as_str()) {
                    three
                } else if [
                    "==", "!=", "<=", ">=", "**", "//", "->", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<",
                    ">>", ":=",
                ]
                .contains(&two.as_str())
                {
                    two
                } else {
                    c.to_string()
                };
                advance!(op.chars().count());
                current.push(Token { tok: Tok::Op(op), line: tl, column: tc });
            }
        }
    }
    for (open, l, c) in stack.drain(..) {
        errors.push(ShapeError { line: l, column: c, message: format!("`{open}` is never closed") });
    }
    if !current.is_empty() {
        current.push(Token { tok: Tok::Newline, line, column: col });
        lines.push(LogicalLine { indent, tokens: current });
    }
    Tokenized { lines, errors }
}

/// Scan a string literal starting at the opening quote. Returns the index
/// one past the closing quote and the raw contents.
fn scan_string(chars: &[char], start: usize) -> Result<(usize, String), ()> {
    let quote = chars[start];
    let triple = chars.get(start + 1) == Some(&quote) && chars.get(start + 2) == Some(&quote);
    let mut i = start + if triple { 3 } else { 1 };
    let mut value = String::new();
    while i < chars.len() {
        let c = chars[i];
        if c == '\\' {
            if let Some(&next) = chars.get(i + 1) {
                value.push(c);
                value.push(next);
                i += 2;
                continue;
            }
            return Err(());
        }
        if triple {
            if c == quote && chars.get(i + 1) == Some(&quote) && chars.get(i + 2) == Some(&quote) {
                return Ok((i + 3, value));
            }
        } else if c == quote {
            return Ok((i + 1, value));
        } else if c == '\n' {
            return Err(());
        }
        value.push(c);
        i += 1;
    }
    Err(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(src: &str) -> Vec<Vec<String>> {
        tokenize(src)
            .lines
            .iter()
            .map(|l| {
                l.tokens
                    .iter()
                    .filter_map(|t| match &t.tok {
                        Tok::Name(n) => Some(n.clone()),
                        Tok::Str(s) => Some(format!("{s:?}")),
                        Tok::Op(o) => Some(o.clone()),
                        _ => None,
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn logical_lines_join_brackets() {
        let lines = names("f(a,\n  b)\ng()\n");
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], ["f", "(", "a", ",", "b", ")"]);
    }

    #[test]
    fn comments_and_blank_lines_skipped() {
        let t = tokenize("# hi\n\n    # indented comment\nx = 1  # trailing\n");
        assert_eq!(t.lines.len(), 1);
        assert_eq!(t.lines[0].indent, 0);
    }

    #[test]
    fn strings() {
        let lines = names("a = 'x' + \"y\" + r'\\d' + '''multi\nline'''\n");
        assert_eq!(lines.len(), 1);
        assert!(lines[0].contains(&"\"multi\\nline\"".to_string()));
        let t = tokenize("a = 'open\n");
        assert_eq!(t.errors[0].message, "unterminated string literal");
    }

    #[test]
    fn delimiter_errors() {
        assert!(tokenize("f(]\n").errors[0].message.contains("does not match"));
        assert_eq!(tokenize(")\n").errors[0].message, "unmatched `)`");
        assert!(tokenize("f(\n").errors[0].message.contains("never closed"));
    }

    #[test]
    fn indentation_recorded() {
        let t = tokenize("def f():\n    return 1\n");
        assert_eq!(t.lines[1].indent, 4);
    }
}
