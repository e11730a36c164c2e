//! Field DSL: parser, printer and field files.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor ('*' factor)*
//! factor  := '-' factor | number | 'pi' | 'q' | 'p' | '(' expr ')'
//!          | ('sin' | 'cos') '(' '2pi' '*' ('(' linear ')' | coord) ')'
//!          | 'bump' '(' coord ';' number ',' number ',' number ')'
//!          | 'dbump' '(' coord ';' number ',' number ',' number ';' int ')'
//! linear  := ['+'|'-'] [number '*'] coord (('+'|'-') [number '*'] coord)*
//! ```
//!
//! A bare numeric literal at the head of a product is a scale factor
//! (`0.5*q` is `Scale(0.5, q)`); any other product is a `Product` node.
//! Printing emits text that parses back to the same tree.
//!
//! Field files hold one `name = <expr>` per line; `#` starts a comment.

use std::fmt;
use std::sync::Arc;

use super::{Domain, FieldExpr, Node, Phase, Var};
use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Semi,
    Comma,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str, line0: usize, col0: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = line0;
    let mut col = col0;
    while i < chars.len() {
        let c = chars[i];
        let start_col = col;
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            ';' => Some(Tok::Semi),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token {
                tok,
                line,
                column: start_col,
            });
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent: e[+-]digits, only when digits follow
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let s: String = chars[start..i].iter().collect();
            let value: f64 = s.parse().map_err(|_| ParseError::Syntax {
                line,
                column: start_col,
                message: format!("malformed number `{s}`"),
            })?;
            col += i - start;
            out.push(Token {
                tok: Tok::Num(value),
                line,
                column: start_col,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(s),
                line,
                column: start_col,
            });
            continue;
        }
        return Err(ParseError::Syntax {
            line,
            column: start_col,
            message: format!("unexpected character `{c}`"),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    domain: Domain,
}

/// A parsed factor, remembering whether it was a bare numeric literal.
struct Factor {
    node: Arc<Node>,
    literal: Option<f64>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax(&self, tok: &Token, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: tok.line,
            column: tok.column,
            message: message.into(),
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Token, ParseError> {
        let t = self.next();
        if t.tok == want {
            Ok(t)
        } else {
            Err(self.syntax(&t, format!("expected {what}, found {}", describe(&t.tok))))
        }
    }

    fn expr(&mut self) -> Result<Arc<Node>, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.next();
                    terms.push(self.term()?);
                }
                Tok::Minus => {
                    self.next();
                    let t = self.term()?;
                    terms.push(negate(t));
                }
                _ => break,
            }
        }
        if terms.len() == 1 {
            Ok(terms.pop().unwrap())
        } else {
            Ok(Arc::new(Node::Sum(terms)))
        }
    }

    fn term(&mut self) -> Result<Arc<Node>, ParseError> {
        let first = self.factor()?;
        if let (Some(k), Tok::Star) = (first.literal, &self.peek().tok) {
            self.next();
            let rest = self.term()?;
            return Ok(Arc::new(Node::Scale(k, rest)));
        }
        let mut acc = first.node;
        while self.peek().tok == Tok::Star {
            self.next();
            let rhs = self.factor()?;
            acc = Arc::new(Node::Product(acc, rhs.node));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Factor, ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Minus => {
                let inner = self.factor()?;
                Ok(match inner.literal {
                    Some(v) => Factor {
                        node: Arc::new(Node::Const(-v)),
                        literal: Some(-v),
                    },
                    None => Factor {
                        node: Arc::new(Node::Scale(-1.0, inner.node)),
                        literal: None,
                    },
                })
            }
            Tok::Num(v) => Ok(Factor {
                node: Arc::new(Node::Const(v)),
                literal: Some(v),
            }),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Factor {
                    node: e,
                    literal: None,
                })
            }
            Tok::Ident(ref name) => {
                let node = match name.as_str() {
                    "q" => Node::Coord(Var::Q),
                    "p" => Node::Coord(Var::P),
                    "pi" => Node::Const(std::f64::consts::PI),
                    "sin" => self.trig(Phase::Sin)?,
                    "cos" => self.trig(Phase::Cos)?,
                    "bump" => self.bump(&t, false)?,
                    "dbump" => self.bump(&t, true)?,
                    _ => {
                        return Err(ParseError::UnknownIdentifier {
                            name: name.clone(),
                            line: t.line,
                            column: t.column,
                        })
                    }
                };
                Ok(Factor {
                    node: Arc::new(node),
                    literal: None,
                })
            }
            _ => Err(self.syntax(&t, format!("unexpected {}", describe(&t.tok)))),
        }
    }

    fn trig(&mut self, phase: Phase) -> Result<Node, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        // 2pi, 2*pi
        let two = self.next();
        if two.tok != Tok::Num(2.0) {
            return Err(self.syntax(&two, "trig argument must start with `2pi*(`"));
        }
        if self.peek().tok == Tok::Star {
            self.next();
        }
        let pi = self.next();
        if pi.tok != Tok::Ident("pi".into()) {
            return Err(self.syntax(&pi, "trig argument must start with `2pi*(`"));
        }
        self.expect(Tok::Star, "`*`")?;
        let (kq, kp) = match &self.peek().tok {
            Tok::Ident(s) if s == "q" || s == "p" => {
                let bare = s == "q";
                self.next();
                if bare { (1, 0) } else { (0, 1) }
            }
            _ => {
                self.expect(Tok::LParen, "`(`")?;
                let k = self.linear()?;
                self.expect(Tok::RParen, "`)`")?;
                k
            }
        };
        self.expect(Tok::RParen, "`)`")?;
        Ok(Node::Trig { kq, kp, phase })
    }

    /// Integer linear form in `q` and `p`.
    fn linear(&mut self) -> Result<(i32, i32), ParseError> {
        let mut kq = 0i64;
        let mut kp = 0i64;
        let mut first = true;
        loop {
            let mut sign = 1.0;
            let mut saw_sign = false;
            while matches!(self.peek().tok, Tok::Plus | Tok::Minus) {
                if self.next().tok == Tok::Minus {
                    sign = -sign;
                }
                saw_sign = true;
            }
            if !first && !saw_sign {
                break;
            }
            first = false;
            let t = self.next();
            let (coef, coord_tok) = match t.tok {
                Tok::Num(v) => {
                    self.expect(Tok::Star, "`*`")?;
                    (v, self.next())
                }
                _ => (1.0, t.clone()),
            };
            let coef = sign * coef;
            if coef.fract() != 0.0 || !coef.is_finite() {
                return Err(ParseError::NonIntegerMode {
                    value: coef,
                    line: t.line,
                    column: t.column,
                });
            }
            if coef.abs() > 1e6 {
                return Err(self.syntax(&t, "trig mode out of range"));
            }
            match coord_tok.tok {
                Tok::Ident(ref s) if s == "q" => kq += coef as i64,
                Tok::Ident(ref s) if s == "p" => kp += coef as i64,
                Tok::Ident(ref s) => {
                    return Err(ParseError::UnknownIdentifier {
                        name: s.clone(),
                        line: coord_tok.line,
                        column: coord_tok.column,
                    })
                }
                ref other => {
                    return Err(self.syntax(
                        &coord_tok,
                        format!("expected `q` or `p`, found {}", describe(other)),
                    ))
                }
            }
        }
        Ok((kq as i32, kp as i32))
    }

    fn signed_number(&mut self) -> Result<f64, ParseError> {
        let mut sign = 1.0;
        while self.peek().tok == Tok::Minus {
            self.next();
            sign = -sign;
        }
        let t = self.next();
        match t.tok {
            Tok::Num(v) => Ok(sign * v),
            _ => Err(self.syntax(&t, format!("expected a number, found {}", describe(&t.tok)))),
        }
    }

    fn bump(&mut self, head: &Token, derivative: bool) -> Result<Node, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let vt = self.next();
        let var = match vt.tok {
            Tok::Ident(ref s) if s == "q" => Var::Q,
            Tok::Ident(ref s) if s == "p" => Var::P,
            _ => return Err(self.syntax(&vt, "bump coordinate must be `q` or `p`")),
        };
        self.expect(Tok::Semi, "`;`")?;
        let center = self.signed_number()?;
        self.expect(Tok::Comma, "`,`")?;
        let inner = self.signed_number()?;
        self.expect(Tok::Comma, "`,`")?;
        let outer = self.signed_number()?;
        let order = if derivative {
            self.expect(Tok::Semi, "`;`")?;
            let t = self.next();
            match t.tok {
                Tok::Num(v) if v.fract() == 0.0 && (0.0..=64.0).contains(&v) => v as u32,
                _ => return Err(self.syntax(&t, "derivative order must be a small integer")),
            }
        } else {
            0
        };
        self.expect(Tok::RParen, "`)`")?;
        let invalid = |message: &str| ParseError::InvalidBump {
            line: head.line,
            column: head.column,
            message: message.to_string(),
        };
        if !(inner >= 0.0 && outer > inner) {
            return Err(invalid("need 0 <= inner < outer"));
        }
        if self.domain.is_torus() && outer >= 0.5 {
            return Err(invalid("outer radius must be below 1/2 on the torus"));
        }
        Ok(Node::Bump {
            var,
            center,
            inner,
            outer,
            order,
        })
    }
}

fn negate(node: Arc<Node>) -> Arc<Node> {
    match node.as_ref() {
        Node::Const(c) => Arc::new(Node::Const(-c)),
        Node::Scale(k, inner) => Arc::new(Node::Scale(-k, inner.clone())),
        _ => Arc::new(Node::Scale(-1.0, node)),
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Semi => "`;`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Eof => "end of input".into(),
    }
}

fn parse_at(text: &str, domain: Domain, line: usize, col: usize) -> Result<FieldExpr, ParseError> {
    let toks = lex(text, line, col)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        domain,
    };
    let root = parser.expr()?;
    let t = parser.peek().clone();
    if t.tok != Tok::Eof {
        return Err(parser.syntax(&t, format!("unexpected {}", describe(&t.tok))));
    }
    Ok(FieldExpr { root, domain })
}

/// Parses one expression as a torus field.
pub fn parse_field(text: &str) -> Result<FieldExpr, ParseError> {
    parse_field_on(text, Domain::Torus)
}

/// Parses one expression on the given domain.
pub fn parse_field_on(text: &str, domain: Domain) -> Result<FieldExpr, ParseError> {
    parse_at(text, domain, 1, 1)
}

/// Named fields read from a field file, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldFile {
    pub entries: Vec<(String, FieldExpr)>,
}

impl FieldFile {
    pub fn get(&self, name: &str) -> Option<&FieldExpr> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn first(&self) -> Option<&FieldExpr> {
        self.entries.first().map(|(_, f)| f)
    }

    /// Renders the file back to text.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (name, f) in &self.entries {
            s.push_str(name);
            s.push_str(" = ");
            s.push_str(&f.to_string());
            s.push('\n');
        }
        s
    }
}

/// Parses a field file. Lines without `=` are accepted as anonymous
/// expressions named `field<k>`.
pub fn parse_field_file(text: &str, domain: Domain) -> Result<FieldFile, ParseError> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        if content.trim().is_empty() {
            continue;
        }
        let (name, expr_text, col) = match content.find('=') {
            Some(eq) => {
                let name = content[..eq].trim();
                let valid = !name.is_empty()
                    && name.chars().all(|c| c.is_alphanumeric() || c == '_')
                    && !name.starts_with(|c: char| c.is_ascii_digit());
                if !valid {
                    return Err(ParseError::Syntax {
                        line: line_no,
                        column: 1,
                        message: format!("invalid field name `{name}`"),
                    });
                }
                (name.to_string(), &content[eq + 1..], content[..eq + 1].chars().count() + 1)
            }
            None => (format!("field{}", entries.len()), content, 1),
        };
        let f = parse_at(expr_text, domain, line_no, col)?;
        entries.push((name, f));
    }
    Ok(FieldFile { entries })
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

fn is_atomic(node: &Node) -> bool {
    matches!(node, Node::Coord(_) | Node::Trig { .. } | Node::Bump { .. })
}

pub(super) fn write_node(f: &mut fmt::Formatter<'_>, node: &Node) -> fmt::Result {
    match node {
        Node::Const(c) => write!(f, "{}", fmt_num(*c)),
        Node::Coord(v) => write!(f, "{}", v.name()),
        Node::Trig { kq, kp, phase } => {
            let name = match phase {
                Phase::Sin => "sin",
                Phase::Cos => "cos",
            };
            write!(f, "{name}(2pi*({kq}*q + {kp}*p))")
        }
        Node::Bump {
            var,
            center,
            inner,
            outer,
            order,
        } => {
            if *order == 0 {
                write!(
                    f,
                    "bump({}; {}, {}, {})",
                    var.name(),
                    fmt_num(*center),
                    fmt_num(*inner),
                    fmt_num(*outer)
                )
            } else {
                write!(
                    f,
                    "dbump({}; {}, {}, {}; {order})",
                    var.name(),
                    fmt_num(*center),
                    fmt_num(*inner),
                    fmt_num(*outer)
                )
            }
        }
        Node::Sum(items) => {
            if items.is_empty() {
                return write!(f, "0");
            }
            for (i, c) in items.iter().enumerate() {
                if i > 0 {
                    write!(f, " + ")?;
                }
                if matches!(c.as_ref(), Node::Sum(_)) {
                    write!(f, "(")?;
                    write_node(f, c)?;
                    write!(f, ")")?;
                } else {
                    write_node(f, c)?;
                }
            }
            Ok(())
        }
        Node::Product(a, b) => {
            write_operand(f, a)?;
            write!(f, "*")?;
            write_operand(f, b)
        }
        Node::Scale(k, a) => {
            write!(f, "{}*", fmt_num(*k))?;
            match a.as_ref() {
                Node::Sum(_) | Node::Product(..) => {
                    write!(f, "(")?;
                    write_node(f, a)?;
                    write!(f, ")")
                }
                _ => write_node(f, a),
            }
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, node: &Node) -> fmt::Result {
    if is_atomic(node) {
        write_node(f, node)
    } else {
        write!(f, "(")?;
        write_node(f, node)?;
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode() {
        let f = parse_field("sin(2pi*(1*q + 0*p))").unwrap();
        assert_eq!(f.node(), FieldExpr::sin(1, 0).node());
    }

    #[test]
    fn scaled_sum() {
        let f = parse_field("0.5*cos(2pi*(2*q + 1*p)) + 1").unwrap();
        let expected = Node::Sum(vec![
            Arc::new(Node::Scale(0.5, Arc::new(FieldExpr::cos(2, 1).node().clone()))),
            Arc::new(Node::Const(1.0)),
        ]);
        assert_eq!(f.node(), &expected);
    }

    #[test]
    fn non_integer_mode_is_rejected() {
        let err = parse_field("sin(2pi*(0.5*q))").unwrap_err();
        assert!(matches!(err, ParseError::NonIntegerMode { value, .. } if value == 0.5));
    }

    #[test]
    fn unknown_identifier_reports_position() {
        let err = parse_field("q +\n  foo").unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownIdentifier {
                name: "foo".into(),
                line: 2,
                column: 3
            }
        );
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(parse_field("q +"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_field("(q"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_field("sin(q)"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_field("q $ p"), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            parse_field("bump(q; 0.5, 0.3, 0.2)"),
            Err(ParseError::InvalidBump { .. })
        ));
    }

    #[test]
    fn linear_forms() {
        let f = parse_field("cos(2pi*(-q + 3*p - 1*q))").unwrap();
        assert_eq!(f.node(), FieldExpr::cos(-2, 3).node());
        let g = parse_field("sin(2*pi*(p))").unwrap();
        assert_eq!(parse_field("sin(2*pi*p)").unwrap(), g);
        assert_eq!(g.node(), FieldExpr::sin(0, 1).node());
    }

    #[test]
    fn minus_and_scale() {
        let f = parse_field("q - 2*p").unwrap();
        assert_eq!(
            f.node(),
            &Node::Sum(vec![
                Arc::new(Node::Coord(Var::Q)),
                Arc::new(Node::Scale(-2.0, Arc::new(Node::Coord(Var::P))))
            ])
        );
        let g = parse_field("(2)*q").unwrap();
        assert!(matches!(g.node(), Node::Product(..)));
    }

    #[test]
    fn round_trip_samples() {
        for s in [
            "0.5*cos(2pi*(2*q + 1*p)) + 1",
            "bump(q; 0.5, 0.1, 0.2)*sin(2pi*(0*q + 1*p)) - 3*(q + p)",
            "-(q*p)*(2)*p + -0.25 + (1 + (2 + q))",
            "dbump(p; 0.3, 0.05, 0.1; 2) + 2*3*-1*q",
            "1e-3*q",
        ] {
            let a = parse_field(s).unwrap();
            let printed = a.to_string();
            let b = parse_field(&printed).unwrap();
            assert_eq!(a, b, "{s} -> {printed}");
        }
    }

    #[test]
    fn field_file() {
        let text = "# fields\nF = sin(2pi*(1*q + 0*p))\n\nG = cos(2pi*(0*q + 1*p)) # trailing\n";
        let file = parse_field_file(text, Domain::Torus).unwrap();
        assert_eq!(file.entries.len(), 2);
        assert_eq!(file.get("G").unwrap().node(), FieldExpr::cos(0, 1).node());
        let again = parse_field_file(&file.to_text(), Domain::Torus).unwrap();
        assert_eq!(file, again);

        let err = parse_field_file("F = q\nG = q + zz\n", Domain::Torus).unwrap_err();
        assert_eq!(err.position(), (2, 9));
    }
}
