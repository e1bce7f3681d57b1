//! Recursive-descent parser for the search-space BNF dialect.

use crate::bounds::BoundExpr;

use super::{Alternative, Grammar, GrammarError, Production, SourceTier, Symbol};

const META: &[char] = &['<', '>', '[', ']', '(', ')', '|', '#'];

/// Parse grammar source text into its immutable representation.
pub fn parse_grammar(text: &str) -> Result<Grammar, GrammarError> {
    let mut spans: Vec<ProductionSpan> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let (code, comment) = split_comment(raw_line);
        let trimmed_comment = comment.map(str::trim).filter(|c| !c.is_empty());

        if let Some(name) = production_start(code) {
            let body_offset = code.find("::=").expect("checked by production_start") + 3;
            spans.push(ProductionSpan {
                name: name.to_string(),
                fragments: vec![(line_no, body_offset, code[body_offset..].to_string())],
                comments: trimmed_comment.map(|c| c.to_string()).into_iter().collect(),
            });
        } else if let Some(span) = spans.last_mut() {
            if !code.trim().is_empty() {
                span.fragments.push((line_no, 0, code.to_string()));
            }
            if let Some(c) = trimmed_comment {
                span.comments.push(c.to_string());
            }
        } else if !code.trim().is_empty() {
            return Err(GrammarError::Syntax {
                line: line_no,
                column: column_of_first_nonspace(code),
                expected: "a production head `<name> ::=`".to_string(),
            });
        }
        // Comments before the first production are a file header; ignored.
    }

    let mut productions = Vec::with_capacity(spans.len());
    for span in spans {
        let mut cursor = Cursor::new(&span.fragments);
        let alternatives = parse_alternatives(&mut cursor, None)?;
        cursor.skip_ws();
        if let Some(c) = cursor.peek() {
            return Err(cursor.err(&format!("end of production, found `{c}`")));
        }
        let comment = if span.comments.is_empty() {
            None
        } else {
            Some(span.comments.join(" "))
        };
        productions.push(Production {
            name: span.name,
            alternatives,
            comment,
        });
    }

    Grammar::rebuild(productions, SourceTier::Custom)
}

struct ProductionSpan {
    name: String,
    /// (line number, column offset of fragment start, text)
    fragments: Vec<(usize, usize, String)>,
    comments: Vec<String>,
}

fn split_comment(line: &str) -> (&str, Option<&str>) {
    match line.find('#') {
        Some(i) => (&line[..i], Some(&line[i + 1..])),
        None => (line, None),
    }
}

fn column_of_first_nonspace(line: &str) -> usize {
    line.chars().take_while(|c| c.is_whitespace()).count() + 1
}

/// `<name> ::=` at the start of a line (after leading whitespace).
fn production_start(code: &str) -> Option<&str> {
    let s = code.trim_start();
    let rest = s.strip_prefix('<')?;
    let close = rest.find('>')?;
    let name = &rest[..close];
    if name.is_empty() || name.contains('<') {
        return None;
    }
    let after = rest[close + 1..].trim_start();
    after.starts_with("::=").then_some(name)
}

/// Character cursor over a production body split across line fragments.
/// Fragment boundaries behave as whitespace.
struct Cursor<'a> {
    fragments: &'a [(usize, usize, String)],
    frag: usize,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(fragments: &'a [(usize, usize, String)]) -> Self {
        let chars = fragments
            .first()
            .map(|(_, _, t)| t.chars().collect())
            .unwrap_or_default();
        Cursor {
            fragments,
            frag: 0,
            chars,
            pos: 0,
        }
    }

    fn peek(&mut self) -> Option<char> {
        loop {
            if self.pos < self.chars.len() {
                return Some(self.chars[self.pos]);
            }
            if self.frag + 1 >= self.fragments.len() {
                return None;
            }
            self.frag += 1;
            self.chars = self.fragments[self.frag].2.chars().collect();
            self.pos = 0;
            // Implicit whitespace at the joint keeps tokens from merging.
            return Some(' ');
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        if self.pos < self.chars.len() {
            self.pos += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
                if self.pos >= self.chars.len() && self.frag + 1 < self.fragments.len() {
                    // peek() returned the synthetic joint space; move on.
                    self.frag += 1;
                    self.chars = self.fragments[self.frag].2.chars().collect();
                    self.pos = 0;
                }
            } else {
                break;
            }
        }
    }

    fn line_col(&self) -> (usize, usize) {
        let (line, offset, _) = &self.fragments[self.frag.min(self.fragments.len() - 1)];
        (*line, offset + self.pos + 1)
    }

    fn err(&self, expected: &str) -> GrammarError {
        let (line, column) = self.line_col();
        GrammarError::Syntax {
            line,
            column,
            expected: expected.to_string(),
        }
    }
}

/// Parse alternatives until `closer` (or end of body when `None`).
fn parse_alternatives(
    cur: &mut Cursor,
    closer: Option<char>,
) -> Result<Vec<Alternative>, GrammarError> {
    let mut alternatives = Vec::new();
    let mut symbols = Vec::new();
    loop {
        cur.skip_ws();
        match cur.peek() {
            None => {
                if let Some(c) = closer {
                    return Err(cur.err(&format!("`{c}`")));
                }
                break;
            }
            Some(c) if Some(c) == closer => {
                cur.bump();
                break;
            }
            Some('|') => {
                cur.bump();
                if symbols.is_empty() {
                    return Err(cur.err("a symbol before `|`"));
                }
                alternatives.push(Alternative { symbols });
                symbols = Vec::new();
            }
            Some(')') | Some(']') => {
                return Err(cur.err("a symbol"));
            }
            Some(_) => symbols.push(parse_symbol(cur)?),
        }
    }
    if symbols.is_empty() {
        return Err(cur.err("a non-empty alternative"));
    }
    alternatives.push(Alternative { symbols });
    Ok(alternatives)
}

fn parse_symbol(cur: &mut Cursor) -> Result<Symbol, GrammarError> {
    match cur.peek() {
        Some('<') => {
            cur.bump();
            let mut name = String::new();
            loop {
                match cur.bump() {
                    Some('>') => break,
                    Some(c) if c == '\u{0}' => return Err(cur.err("`>`")),
                    Some(c) => name.push(c),
                    None => return Err(cur.err("`>`")),
                }
            }
            if name.is_empty() {
                return Err(cur.err("a nonterminal name"));
            }
            Ok(Symbol::NonTerminal(name))
        }
        Some('[') => {
            cur.bump();
            Ok(Symbol::Optional(parse_alternatives(cur, Some(']'))?))
        }
        Some('(') => {
            cur.bump();
            Ok(Symbol::Group(parse_alternatives(cur, Some(')'))?))
        }
        Some(_) => {
            let token = read_token(cur);
            if token.is_empty() {
                return Err(cur.err("a terminal token"));
            }
            match token.as_str() {
                "RANDOM-INT" => parse_range(cur, false),
                "RANDOM-REAL" => parse_range(cur, true),
                _ => Ok(Symbol::Terminal(token)),
            }
        }
        None => Err(cur.err("a symbol")),
    }
}

fn read_token(cur: &mut Cursor) -> String {
    let mut token = String::new();
    while let Some(c) = cur.peek() {
        if c.is_whitespace() || META.contains(&c) {
            break;
        }
        token.push(c);
        cur.bump();
    }
    token
}

fn parse_range(cur: &mut Cursor, real: bool) -> Result<Symbol, GrammarError> {
    cur.skip_ws();
    if cur.peek() != Some('(') {
        return Err(cur.err("`(` after RANDOM-INT/RANDOM-REAL"));
    }
    cur.bump();
    let body = capture_balanced(cur)?;
    let mut parts = split_top_level_comma(&body);
    if parts.len() != 2 {
        return Err(cur.err("two comma-separated bounds"));
    }
    let hi_part = parts.pop().unwrap();
    let lo_part = parts.pop().unwrap();
    let (lo_open_raw, lo_text) = strip_open_prefix(&lo_part);
    let (hi_open_raw, hi_text) = strip_open_prefix(&hi_part);
    let lo = parse_bound_expr(lo_text, cur)?;
    let hi = parse_bound_expr(hi_text, cur)?;

    if real {
        // An optional `* expr` suffix scales the sampled fraction.
        cur.skip_ws();
        let scale = if cur.peek() == Some('*') {
            cur.bump();
            cur.skip_ws();
            let token = read_token(cur);
            if token.is_empty() {
                return Err(cur.err("a scale expression after `*`"));
            }
            Some(parse_bound_expr(&token, cur)?)
        } else {
            None
        };
        Ok(Symbol::RealRange {
            lo,
            hi,
            lo_open: lo_open_raw,
            hi_open: hi_open_raw,
            scale,
        })
    } else {
        if lo_open_raw || hi_open_raw {
            return Err(cur.err("closed bounds for RANDOM-INT"));
        }
        Ok(Symbol::IntRange { lo, hi })
    }
}

/// Content up to the `)` matching the already-consumed `(`.
fn capture_balanced(cur: &mut Cursor) -> Result<String, GrammarError> {
    let mut depth = 1usize;
    let mut out = String::new();
    loop {
        match cur.bump() {
            Some('(') => {
                depth += 1;
                out.push('(');
            }
            Some(')') => {
                depth -= 1;
                if depth == 0 {
                    return Ok(out);
                }
                out.push(')');
            }
            Some(c) => out.push(c),
            None => return Err(cur.err("`)`")),
        }
    }
}

fn split_top_level_comma(s: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for c in s.chars() {
        match c {
            '(' => {
                depth += 1;
                current.push(c);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                current.push(c);
            }
            ',' if depth == 0 => {
                parts.push(current.trim().to_string());
                current = String::new();
            }
            _ => current.push(c),
        }
    }
    parts.push(current.trim().to_string());
    parts
}

/// `>x` marks an open lower bound, `<x` an open upper bound.
fn strip_open_prefix(s: &str) -> (bool, &str) {
    let t = s.trim();
    if let Some(rest) = t.strip_prefix('>') {
        (true, rest.trim())
    } else if let Some(rest) = t.strip_prefix('<') {
        (true, rest.trim())
    } else {
        (false, t)
    }
}

// --- bound expression sub-parser -----------------------------------------

fn parse_bound_expr(text: &str, cur: &Cursor) -> Result<BoundExpr, GrammarError> {
    let mut p = ExprParser {
        chars: text.chars().collect(),
        pos: 0,
    };
    let expr = p.expr().map_err(|expected| {
        let (line, column) = cur.line_col();
        GrammarError::Syntax {
            line,
            column,
            expected,
        }
    })?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        let (line, column) = cur.line_col();
        return Err(GrammarError::Syntax {
            line,
            column,
            expected: format!("end of bound expression, found `{}`", p.chars[p.pos]),
        });
    }
    Ok(expr)
}

struct ExprParser {
    chars: Vec<char>,
    pos: usize,
}

impl ExprParser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<BoundExpr, String> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    lhs = BoundExpr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some('-') => {
                    self.pos += 1;
                    lhs = BoundExpr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<BoundExpr, String> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    lhs = BoundExpr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some('/') => {
                    self.pos += 1;
                    lhs = BoundExpr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<BoundExpr, String> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err("`)` in bound expression".to_string());
                }
                self.pos += 1;
                Ok(e)
            }
            Some('-') => {
                self.pos += 1;
                let inner = self.factor()?;
                Ok(match inner {
                    BoundExpr::Int(v) => BoundExpr::Int(-v),
                    BoundExpr::Real(v) => BoundExpr::Real(-v),
                    other => BoundExpr::Sub(Box::new(BoundExpr::Int(0)), Box::new(other)),
                })
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_alphabetic() || c == '_' => self.identifier(),
            Some(c) => Err(format!("a bound expression, found `{c}`")),
            None => Err("a bound expression".to_string()),
        }
    }

    fn number(&mut self) -> Result<BoundExpr, String> {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let mut is_real = false;
        if self.chars.get(self.pos) == Some(&'.') {
            is_real = true;
            self.pos += 1;
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        let num = if is_real {
            BoundExpr::Real(text.parse().map_err(|_| format!("a number, got `{text}`"))?)
        } else {
            BoundExpr::Int(text.parse().map_err(|_| format!("an integer, got `{text}`"))?)
        };
        // Implicit multiplication: `2L` means `2 * L`.
        if let Some(c) = self.chars.get(self.pos).copied() {
            if c.is_alphabetic() || c == '_' {
                let rhs = self.identifier()?;
                return Ok(BoundExpr::Mul(Box::new(num), Box::new(rhs)));
            }
        }
        Ok(num)
    }

    fn identifier(&mut self) -> Result<BoundExpr, String> {
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
        {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        match name.as_str() {
            "L" => Ok(BoundExpr::Labels),
            "n_attributes" => Ok(BoundExpr::Attributes),
            "SQRT" => {
                let args = self.call_args()?;
                match <[BoundExpr; 1]>::try_from(args) {
                    Ok([a]) => Ok(BoundExpr::Sqrt(Box::new(a))),
                    Err(_) => Err("exactly one argument to SQRT".to_string()),
                }
            }
            "min" => {
                let args = self.call_args()?;
                match <[BoundExpr; 2]>::try_from(args) {
                    Ok([a, b]) => Ok(BoundExpr::Min(Box::new(a), Box::new(b))),
                    Err(_) => Err("exactly two arguments to min".to_string()),
                }
            }
            other => Err(format!(
                "one of L, n_attributes, SQRT(..), min(..), got `{other}`"
            )),
        }
    }

    fn call_args(&mut self) -> Result<Vec<BoundExpr>, String> {
        if self.peek() != Some('(') {
            return Err("`(` after function name".to_string());
        }
        self.pos += 1;
        let mut args = vec![self.expr()?];
        while self.peek() == Some(',') {
            self.pos += 1;
            args.push(self.expr()?);
        }
        if self.peek() != Some(')') {
            return Err("`)` after function arguments".to_string());
        }
        self.pos += 1;
        Ok(args)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::DatasetContext;

    fn ctx(l: u32, a: u32) -> DatasetContext {
        DatasetContext::new(l, a).unwrap()
    }

    #[test]
    fn ranges_parse_with_expressions() {
        let g = parse_grammar("<S> ::= RANDOM-INT(1, SQRT(L) +1)").unwrap();
        match &g.start().alternatives[0].symbols[0] {
            Symbol::IntRange { lo, hi } => {
                assert_eq!(lo.eval_int(ctx(16, 1)), 1);
                assert_eq!(hi.eval_int(ctx(16, 1)), 5);
            }
            other => panic!("unexpected symbol: {other:?}"),
        }
    }

    #[test]
    fn open_real_bounds() {
        let g = parse_grammar("<S> ::= RANDOM-REAL(>0.0, <1.0)").unwrap();
        match &g.start().alternatives[0].symbols[0] {
            Symbol::RealRange {
                lo_open, hi_open, scale, ..
            } => {
                assert!(*lo_open && *hi_open);
                assert!(scale.is_none());
            }
            other => panic!("unexpected symbol: {other:?}"),
        }
    }

    #[test]
    fn scaled_real_range() {
        let g = parse_grammar("<S> ::= RANDOM-REAL(0.2, 1.0) * n_attributes").unwrap();
        match &g.start().alternatives[0].symbols[0] {
            Symbol::RealRange { scale: Some(s), .. } => {
                assert_eq!(s.eval_real(ctx(2, 40)), 40.0);
            }
            other => panic!("unexpected symbol: {other:?}"),
        }
    }

    #[test]
    fn implicit_multiplication_in_bounds() {
        let g = parse_grammar("<S> ::= RANDOM-INT(2, min(2L, 100))").unwrap();
        match &g.start().alternatives[0].symbols[0] {
            Symbol::IntRange { hi, .. } => {
                assert_eq!(hi.eval_int(ctx(10, 1)), 20);
                assert_eq!(hi.eval_int(ctx(60, 1)), 100);
            }
            other => panic!("unexpected symbol: {other:?}"),
        }
    }

    #[test]
    fn continuation_lines_extend_a_production() {
        let g = parse_grammar("<S> ::= a |\n   b c\n<T> ::= d").unwrap();
        assert_eq!(g.start().alternatives.len(), 2);
        assert_eq!(g.start().alternatives[1].symbols.len(), 2);
        assert_eq!(g.productions().len(), 2);
    }

    #[test]
    fn numerals_and_negative_tokens_are_terminals() {
        let g = parse_grammar("<S> ::= 0 1 | -1 <d>\n<d> ::= RANDOM-INT(1, 3)").unwrap();
        let alts = &g.start().alternatives;
        assert_eq!(
            alts[0].symbols,
            vec![Symbol::Terminal("0".into()), Symbol::Terminal("1".into())]
        );
        assert_eq!(alts[1].symbols[0], Symbol::Terminal("-1".into()));
    }

    #[test]
    fn stray_text_before_first_production_is_an_error() {
        let err = parse_grammar("junk\n<S> ::= a").unwrap_err();
        assert!(matches!(err, GrammarError::Syntax { line: 1, .. }));
    }
}
