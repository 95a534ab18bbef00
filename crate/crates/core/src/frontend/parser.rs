//! Recursive-descent parser for graphs, patterns and queries.

use super::lexer::{tokenize, Tok, Token};
use super::{ErrorKind, ParseError, SourceSpan};
use crate::expr::{AggOp, BinaryOp, Expr, GroupExprs, UnaryOp};
use crate::graph::{Graph, Triple};
use crate::label::{is_reserved_var, ConstValue, Label};
use crate::pattern::{Pattern, Query};

const KEYWORDS: &[&str] = &[
    "GRAPH",
    "CONSTRUCT",
    "WHERE",
    "JOIN",
    "BIND",
    "AS",
    "FILTER",
    "UNION",
    "DISTINCT",
    "BY",
    "NOT",
    "AND",
    "OR",
    "CONCAT",
    "COUNT",
    "MAX",
    "MIN",
    "SUM",
    "AVG",
];

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// A query together with the source position of each subpattern, in
/// pre-order.
#[derive(Clone, Debug)]
pub struct ParsedQuery {
    pub query: Query,
    pub spans: Vec<SourceSpan>,
}

#[derive(Clone, Debug)]
pub struct ParsedPattern {
    pub pattern: Pattern,
    pub spans: Vec<SourceSpan>,
    /// The text had the `GRAPH ( … )` wrapper.
    pub wrapped: bool,
}

/// Source positions mirroring the shape of a pattern tree.
struct SpanTree {
    at: SourceSpan,
    children: Vec<SpanTree>,
}

impl SpanTree {
    fn leaf(at: SourceSpan) -> Self {
        SpanTree {
            at,
            children: Vec::new(),
        }
    }

    fn flatten(self, out: &mut Vec<SourceSpan>) {
        out.push(self.at);
        for c in self.children {
            c.flatten(out);
        }
    }
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    file: &'a str,
    /// Standalone graph files accept keywords as symbols.
    standalone: bool,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn new(text: &str, file: &'a str, standalone: bool) -> PResult<Self> {
        Ok(Parser {
            toks: tokenize(text, file)?,
            pos: 0,
            file,
            standalone,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> SourceSpan {
        let t = &self.toks[self.pos];
        SourceSpan {
            file: self.file.to_string(),
            line: t.line,
            column: t.column,
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(
        &self,
        span: SourceSpan,
        kind: ErrorKind,
        message: impl Into<String>,
    ) -> ParseError {
        ParseError {
            span,
            kind,
            message: message.into(),
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        self.error_at(
            self.span(),
            ErrorKind::Syntactic,
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        if self.at_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{kw}'")))
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        match self.peek() {
            Tok::Eof => Ok(()),
            _ => Err(self.unexpected("end of input")),
        }
    }

    fn variable(&mut self, name: String, at: SourceSpan) -> PResult<String> {
        if is_reserved_var(&name) {
            return Err(self.error_at(
                at,
                ErrorKind::Validation,
                format!("variable ?{name} uses the reserved prefix ?_"),
            ));
        }
        Ok(name)
    }

    /// A sign directly attached to the number that follows it.
    fn signed_number_ahead(&self) -> bool {
        if !matches!(self.peek(), Tok::Minus | Tok::Plus) {
            return false;
        }
        let (a, b) = (
            &self.toks[self.pos],
            &self.toks[(self.pos + 1).min(self.toks.len() - 1)],
        );
        matches!(b.tok, Tok::Number(_)) && a.line == b.line && a.column + 1 == b.column
    }

    fn number(&mut self) -> PResult<ConstValue> {
        let at = self.span();
        let mut text = String::new();
        if self.signed_number_ahead() && self.bump() == Tok::Minus {
            text.push('-');
        }
        let Tok::Number(digits) = self.bump() else {
            return Err(self.error_at(at, ErrorKind::Syntactic, "expected a number"));
        };
        text.push_str(&digits);
        if digits.contains(['.', 'e', 'E']) {
            text.parse::<f64>()
                .map(ConstValue::Float)
                .map_err(|_| self.error_at(at, ErrorKind::Lexical, format!("invalid float {text}")))
        } else {
            text.parse::<i64>().map(ConstValue::Int).map_err(|_| {
                self.error_at(
                    at,
                    ErrorKind::Lexical,
                    format!("integer {text} out of range"),
                )
            })
        }
    }

    fn at_term(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => self.standalone || !is_keyword(s),
            Tok::Var(_) | Tok::Number(_) | Tok::Str(_) => true,
            Tok::Minus | Tok::Plus => self.signed_number_ahead(),
            _ => false,
        }
    }

    fn term(&mut self) -> PResult<Label> {
        let at = self.span();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Label::Const(match s.as_str() {
                    "true" => ConstValue::Bool(true),
                    "false" => ConstValue::Bool(false),
                    _ => ConstValue::Symbol(s),
                }))
            }
            Tok::Var(v) => {
                self.bump();
                Ok(Label::Var(self.variable(v, at)?))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Label::Const(ConstValue::Str(s)))
            }
            _ => Ok(Label::Const(self.number()?)),
        }
    }

    /// GTF statements up to the first token that cannot start a term.
    fn statements(&mut self) -> PResult<Graph> {
        let mut isolated = Vec::new();
        let mut triples = Vec::new();
        loop {
            let at = self.span();
            let mut terms = Vec::new();
            while self.at_term() {
                terms.push(self.term()?);
            }
            match terms.len() {
                0 if *self.peek() == Tok::Dot => {
                    return Err(self.error_at(at, ErrorKind::Syntactic, "empty statement"))
                }
                0 => break,
                1 => isolated.push(terms.pop().unwrap()),
                3 => {
                    let o = terms.pop().unwrap();
                    let p = terms.pop().unwrap();
                    let s = terms.pop().unwrap();
                    triples.push(Triple::new(s, p, o));
                }
                n => {
                    return Err(self.error_at(
                        at,
                        ErrorKind::Syntactic,
                        format!("a statement has one or three terms, found {n}"),
                    ))
                }
            }
            if *self.peek() == Tok::Dot {
                self.bump();
            } else {
                break;
            }
        }
        Ok(Graph::from_parts(isolated, triples))
    }

    fn braced_graph(&mut self) -> PResult<Graph> {
        self.expect(Tok::LBrace)?;
        let g = self.statements()?;
        self.expect(Tok::RBrace)?;
        Ok(g)
    }

    // CONSTRUCT { template } WHERE { body }
    fn construct_where(&mut self) -> PResult<(Pattern, SpanTree)> {
        let at = self.span();
        self.expect_keyword("CONSTRUCT")?;
        let template = self.braced_graph()?;
        self.expect_keyword("WHERE")?;
        self.expect(Tok::LBrace)?;
        let (body, body_spans) = self.pattern_body()?;
        self.expect(Tok::RBrace)?;
        Ok((
            body.construct(template),
            SpanTree {
                at,
                children: vec![body_spans],
            },
        ))
    }

    fn pattern_body(&mut self) -> PResult<(Pattern, SpanTree)> {
        let (mut p, mut spans) = if *self.peek() == Tok::LParen {
            self.bump();
            let inner = self.pattern_body()?;
            self.expect(Tok::RParen)?;
            inner
        } else if self.at_keyword("CONSTRUCT") {
            self.construct_where()?
        } else {
            let at = self.span();
            (Pattern::Basic(self.statements()?), SpanTree::leaf(at))
        };
        loop {
            let at = self.span();
            let kw = match self.peek() {
                Tok::Ident(s) if is_keyword(s) => s.clone(),
                _ => break,
            };
            let (next, children) = match kw.as_str() {
                "JOIN" => {
                    self.bump();
                    self.expect(Tok::LBrace)?;
                    let (rhs, rhs_spans) = self.pattern_body()?;
                    self.expect(Tok::RBrace)?;
                    (p.join(rhs), vec![spans, rhs_spans])
                }
                "UNION" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let (rhs, rhs_spans) = self.pattern_body()?;
                    self.expect(Tok::RParen)?;
                    (p.union(rhs), vec![spans, rhs_spans])
                }
                "BIND" => {
                    self.bump();
                    let e = self.expr()?;
                    self.expect_keyword("AS")?;
                    let var_at = self.span();
                    let Tok::Var(x) = self.peek().clone() else {
                        return Err(self.unexpected("a variable"));
                    };
                    self.bump();
                    let x = self.variable(x, var_at)?;
                    (p.bind(e, x), vec![spans])
                }
                "FILTER" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let e = self.expr()?;
                    self.expect(Tok::RParen)?;
                    (p.filter(e), vec![spans])
                }
                "CONSTRUCT" => {
                    self.bump();
                    let template = self.braced_graph()?;
                    if self.at_keyword("WHERE") {
                        return Err(self.error_at(
                            at,
                            ErrorKind::Syntactic,
                            "CONSTRUCT … WHERE must start a pattern; wrap it in braces or parentheses",
                        ));
                    }
                    (p.construct(template), vec![spans])
                }
                _ => break,
            };
            p = next;
            spans = SpanTree { at, children };
        }
        Ok((p, spans))
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.and_expr()?;
        while self.at_keyword("OR") {
            self.bump();
            lhs = Expr::binary(BinaryOp::Or, lhs, self.and_expr()?);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.cmp_expr()?;
        while self.at_keyword("AND") {
            self.bump();
            lhs = Expr::binary(BinaryOp::And, lhs, self.cmp_expr()?);
        }
        Ok(lhs)
    }

    fn cmp_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.add_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Eq => BinaryOp::Eq,
                Tok::Lt => BinaryOp::Lt,
                Tok::Gt => BinaryOp::Gt,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::binary(op, lhs, self.add_expr()?);
        }
    }

    fn add_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::binary(op, lhs, self.mul_expr()?);
        }
    }

    fn mul_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::binary(op, lhs, self.unary_expr()?);
        }
    }

    fn unary_expr(&mut self) -> PResult<Expr> {
        if *self.peek() == Tok::Minus {
            if self.signed_number_ahead() {
                return Ok(Expr::Const(self.number()?));
            }
            self.bump();
            return Ok(Expr::unary(UnaryOp::Neg, self.unary_expr()?));
        }
        if self.at_keyword("NOT") {
            self.bump();
            return Ok(Expr::unary(UnaryOp::Not, self.unary_expr()?));
        }
        self.primary_expr()
    }

    fn primary_expr(&mut self) -> PResult<Expr> {
        let at = self.span();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Var(v) => {
                self.bump();
                Ok(Expr::Var(self.variable(v, at)?))
            }
            Tok::Number(_) => Ok(Expr::Const(self.number()?)),
            Tok::Str(s) => {
                self.bump();
                Ok(Expr::Const(ConstValue::Str(s)))
            }
            Tok::Ident(s) if s == "CONCAT" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let a = self.expr()?;
                self.expect(Tok::Comma)?;
                let b = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::binary(BinaryOp::Concat, a, b))
            }
            Tok::Ident(s) if AggOp::from_name(&s).is_some() => {
                self.bump();
                let op = AggOp::from_name(&s).unwrap();
                self.expect(Tok::LParen)?;
                let distinct = self.at_keyword("DISTINCT");
                if distinct {
                    self.bump();
                }
                let arg = self.expr()?;
                let by = if self.at_keyword("BY") {
                    self.bump();
                    let mut items = vec![self.expr()?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        items.push(self.expr()?);
                    }
                    Some(GroupExprs::new(items).expect("at least one item"))
                } else {
                    None
                };
                self.expect(Tok::RParen)?;
                Ok(Expr::Agg {
                    op,
                    distinct,
                    arg: Box::new(arg),
                    by,
                })
            }
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok(Expr::Const(match s.as_str() {
                    "true" => ConstValue::Bool(true),
                    "false" => ConstValue::Bool(false),
                    _ => ConstValue::Symbol(s),
                }))
            }
            _ => Err(self.unexpected("an expression")),
        }
    }

    /// `GRAPH ( body )` or a bare body.
    fn pattern_file(&mut self) -> PResult<(Pattern, Vec<SourceSpan>, bool)> {
        let wrapped = self.at_keyword("GRAPH");
        let (p, spans) = if wrapped {
            self.bump();
            self.expect(Tok::LParen)?;
            let inner = self.pattern_body()?;
            self.expect(Tok::RParen)?;
            inner
        } else {
            self.pattern_body()?
        };
        self.expect_eof()?;
        let mut flat = Vec::new();
        spans.flatten(&mut flat);
        if let Err(e) = p.validate() {
            return Err(self.error_at(flat[e.node].clone(), ErrorKind::Validation, e.to_string()));
        }
        Ok((p, flat, wrapped))
    }
}

pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    parse_graph_in(text, "<input>")
}

/// Parses a GTF graph; `file` only labels error positions.
pub fn parse_graph_in(text: &str, file: &str) -> Result<Graph, ParseError> {
    let mut p = Parser::new(text, file, true)?;
    let g = p.statements()?;
    p.expect_eof()?;
    Ok(g)
}

pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    parse_query_in(text, "<input>").map(|q| q.query)
}

pub fn parse_query_in(text: &str, file: &str) -> Result<ParsedQuery, ParseError> {
    let mut p = Parser::new(text, file, false)?;
    if !p.at_keyword("GRAPH") {
        return Err(p.unexpected("'GRAPH'"));
    }
    let (pattern, spans, _) = p.pattern_file()?;
    let query = Query::new(pattern)
        .map_err(|e| p.error_at(spans[0].clone(), ErrorKind::Validation, e.to_string()))?;
    Ok(ParsedQuery { query, spans })
}

/// Parses a pattern, optionally wrapped in `GRAPH ( … )`.
pub fn parse_pattern_in(text: &str, file: &str) -> Result<ParsedPattern, ParseError> {
    let mut p = Parser::new(text, file, false)?;
    let (pattern, spans, wrapped) = p.pattern_file()?;
    Ok(ParsedPattern {
        pattern,
        spans,
        wrapped,
    })
}
