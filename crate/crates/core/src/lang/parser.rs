use super::{Node, ParseError, ParseTree, Span};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Keyword {
    If,
    Then,
    Else,
    Fi,
    While,
    Do,
    Od,
    Break,
    Continue,
}

impl Keyword {
    fn from_word(word: &str) -> Option<Keyword> {
        Some(match word {
            "if" => Keyword::If,
            "then" => Keyword::Then,
            "else" => Keyword::Else,
            "fi" => Keyword::Fi,
            "while" => Keyword::While,
            "do" => Keyword::Do,
            "od" => Keyword::Od,
            "break" => Keyword::Break,
            "continue" => Keyword::Continue,
            _ => return None,
        })
    }

    fn as_str(self) -> &'static str {
        match self {
            Keyword::If => "if",
            Keyword::Then => "then",
            Keyword::Else => "else",
            Keyword::Fi => "fi",
            Keyword::While => "while",
            Keyword::Do => "do",
            Keyword::Od => "od",
            Keyword::Break => "break",
            Keyword::Continue => "continue",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok<'a> {
    Kw(Keyword),
    Semi,
    Word(&'a str),
}

#[derive(Clone, Debug)]
struct Token<'a> {
    tok: Tok<'a>,
    span: Span,
}

fn lex(source: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    for (line_idx, line) in source.lines().enumerate() {
        let line = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        };
        let mut chars = line.char_indices().peekable();
        let mut column = 0u32;
        while let Some(&(start, ch)) = chars.peek() {
            let span = Span::new(line_idx as u32 + 1, column + 1);
            if ch.is_whitespace() {
                chars.next();
                column += 1;
            } else if ch == ';' {
                chars.next();
                column += 1;
                tokens.push(Token { tok: Tok::Semi, span });
            } else {
                let mut end = start;
                while let Some(&(i, c)) = chars.peek() {
                    if c.is_whitespace() || c == ';' {
                        break;
                    }
                    end = i + c.len_utf8();
                    column += 1;
                    chars.next();
                }
                let word = &line[start..end];
                let tok = match Keyword::from_word(word) {
                    Some(kw) => Tok::Kw(kw),
                    None => Tok::Word(word),
                };
                tokens.push(Token { tok, span });
            }
        }
    }
    tokens
}

struct Parser<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
    end: Span,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token<'a>> {
        self.tokens.get(self.pos)
    }

    fn here(&self) -> Span {
        self.peek().map(|t| t.span).unwrap_or(self.end)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let span = self.here();
        ParseError::Syntax { line: span.line, column: span.column, message: message.into() }
    }

    fn describe_next(&self) -> String {
        match self.peek().map(|t| &t.tok) {
            None => "end of input".to_string(),
            Some(Tok::Semi) => "`;`".to_string(),
            Some(Tok::Kw(kw)) => format!("`{}`", kw.as_str()),
            Some(Tok::Word(w)) => format!("`{w}`"),
        }
    }

    fn expect(&mut self, kw: Keyword) -> Result<(), ParseError> {
        match self.peek().map(|t| &t.tok) {
            Some(Tok::Kw(k)) if *k == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(format!("expected `{}`, found {}", kw.as_str(), self.describe_next()))),
        }
    }

    /// A run of non-keyword words, joined by single spaces.
    fn words(&mut self) -> Option<String> {
        let mut text = String::new();
        while let Some(Token { tok: Tok::Word(w), .. }) = self.peek() {
            if !text.is_empty() {
                text.push(' ');
            }
            text.push_str(w);
            self.pos += 1;
        }
        (!text.is_empty()).then_some(text)
    }

    fn at_closer(&self) -> bool {
        matches!(
            self.peek().map(|t| &t.tok),
            None | Some(Tok::Kw(Keyword::Else | Keyword::Fi | Keyword::Od))
        )
    }

    /// `stmt (';' stmt)* ';'?`, associated to the left.
    fn sequence(&mut self) -> Result<ParseTree, ParseError> {
        let mut acc = self.statement()?;
        while let Some(Token { tok: Tok::Semi, .. }) = self.peek() {
            self.pos += 1;
            if self.at_closer() {
                break;
            }
            let next = self.statement()?;
            acc = ParseTree::seq(acc, next);
        }
        Ok(acc)
    }

    fn statement(&mut self) -> Result<ParseTree, ParseError> {
        let Some(token) = self.peek().cloned() else {
            return Err(self.error("expected a statement, found end of input"));
        };
        let span = token.span;
        match token.tok {
            Tok::Kw(Keyword::Break) => {
                self.pos += 1;
                Ok(ParseTree::new(Node::Break, span))
            }
            Tok::Kw(Keyword::Continue) => {
                self.pos += 1;
                Ok(ParseTree::new(Node::Continue, span))
            }
            Tok::Kw(Keyword::If) => {
                self.pos += 1;
                let guard = self.words().ok_or_else(|| self.error("expected a guard after `if`"))?;
                self.expect(Keyword::Then)?;
                let then_branch = self.sequence()?;
                self.expect(Keyword::Else)?;
                let else_branch = self.sequence()?;
                self.expect(Keyword::Fi)?;
                Ok(ParseTree::new(
                    Node::If {
                        guard,
                        then_branch: Box::new(then_branch),
                        else_branch: Box::new(else_branch),
                    },
                    span,
                ))
            }
            Tok::Kw(Keyword::While) => {
                self.pos += 1;
                let guard =
                    self.words().ok_or_else(|| self.error("expected a guard after `while`"))?;
                self.expect(Keyword::Do)?;
                let body = self.sequence()?;
                self.expect(Keyword::Od)?;
                Ok(ParseTree::new(Node::While { guard, body: Box::new(body) }, span))
            }
            Tok::Word(_) => {
                let text = self.words().expect("peeked a word");
                Ok(ParseTree::new(Node::Epsilon { text }, span))
            }
            Tok::Semi | Tok::Kw(_) => {
                Err(self.error(format!("expected a statement, found {}", self.describe_next())))
            }
        }
    }
}

/// Parses a program in the concrete syntax.
///
/// `;` separates statements and may also end a sequence. `#` starts a line
/// comment. Any run of words that are not keywords is one atomic statement.
pub fn parse_program(source: &str) -> Result<ParseTree, ParseError> {
    let tokens = lex(source);
    if tokens.is_empty() {
        return Err(ParseError::EmptyInput);
    }
    let line_count = source.lines().count().max(1) as u32;
    let last_len = source.lines().last().map(|l| l.chars().count()).unwrap_or(0) as u32;
    let mut parser = Parser { tokens, pos: 0, end: Span::new(line_count, last_len + 1) };
    let tree = parser.sequence()?;
    if parser.peek().is_some() {
        return Err(parser.error(format!("unexpected {}", parser.describe_next())));
    }
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(tree: &ParseTree) -> String {
        match &tree.node {
            Node::Epsilon { .. } => "E".into(),
            Node::Break => "Break".into(),
            Node::Continue => "Continue".into(),
            Node::Seq { left, right } => format!("Seq({},{})", shape(left), shape(right)),
            Node::If { then_branch, else_branch, .. } => {
                format!("If({},{})", shape(then_branch), shape(else_branch))
            }
            Node::While { body, .. } => format!("While({})", shape(body)),
        }
    }

    #[test]
    fn single_statement() {
        let tree = parse_program("x := 1").unwrap();
        assert_eq!(tree, ParseTree::epsilon("x := 1"));
        assert_eq!(tree.span, Span::new(1, 1));
    }

    #[test]
    fn euclid_program() {
        let src = "while x >= 1 do if x >= y then x := x - y; break else y := y - x; continue fi od";
        let tree = parse_program(src).unwrap();
        assert_eq!(shape(&tree), "While(If(Seq(E,Break),Seq(E,Continue)))");
        let Node::While { guard, body } = &tree.node else { panic!() };
        assert_eq!(guard, "x >= 1");
        let Node::If { guard, then_branch, .. } = &body.node else { panic!() };
        assert_eq!(guard, "x >= y");
        let Node::Seq { left, .. } = &then_branch.node else { panic!() };
        assert_eq!(**left, ParseTree::epsilon("x := x - y"));
    }

    #[test]
    fn one_armed_if_is_rejected() {
        let err = parse_program("if b then break fi").unwrap_err();
        assert_eq!(
            err,
            ParseError::Syntax { line: 1, column: 17, message: "expected `else`, found `fi`".into() }
        );
    }

    #[test]
    fn empty_program_is_rejected() {
        assert_eq!(parse_program(""), Err(ParseError::EmptyInput));
        assert_eq!(parse_program("  # only a comment\n\n"), Err(ParseError::EmptyInput));
    }

    #[test]
    fn sequences_associate_left() {
        let tree = parse_program("a; b; c").unwrap();
        assert_eq!(shape(&tree), "Seq(Seq(E,E),E)");
    }

    #[test]
    fn trailing_semicolons_and_comments() {
        let tree = parse_program("a; # first\nwhile g do b; od;\n").unwrap();
        assert_eq!(shape(&tree), "Seq(E,While(E))");
    }

    #[test]
    fn missing_guard_and_stray_tokens() {
        assert!(matches!(parse_program("while do x od"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_program("a;; b"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_program("a od"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_program("if p then a else b"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn spans_point_at_statements() {
        let tree = parse_program("a;\n  while g do\n    break\n  od").unwrap();
        let Node::Seq { right, .. } = &tree.node else { panic!() };
        assert_eq!(right.span, Span::new(2, 3));
        let Node::While { body, .. } = &right.node else { panic!() };
        assert_eq!(body.span, Span::new(3, 5));
    }

    #[test]
    fn semicolon_glued_to_words() {
        let tree = parse_program("x:=1;y:=2").unwrap();
        assert_eq!(tree, ParseTree::seq(ParseTree::epsilon("x:=1"), ParseTree::epsilon("y:=2")));
    }
}
