//! Parser and renderer for a plain-text ket-expression language.
//!
//! States are written the way they are usually printed: sums of kets with
//! scalar coefficients.
//!
//! ```text
//! # the three-qubit W state
//! (|100> + |010> + |001>)/sqrt(3)
//! ```
//!
//! ```text
//! dims: 2 2 2 2
//! 1/sqrt(6)*(|0011>+|1100>) + exp(2i*pi/3)/sqrt(6)*(|0101>+|1010>)
//!   + exp(4i*pi/3)/sqrt(6)*(|0110>+|1001>)
//! ```
//!
//! Kets use one digit per mode (`|012>`) when every level is below ten, or a
//! comma form (`|0,11,2>`) otherwise. An optional leading `dims: d1 d2 ...`
//! line pins the mode dimensions; without it each dimension is inferred as
//! the largest index seen plus one. `#` starts a comment, whitespace is
//! insignificant elsewhere, and modes are zero-indexed. Coefficients combine
//! decimals, rationals, `i`, `sqrt(m)` and `exp(...)` phases with `*`, `/`,
//! and parentheses; everything is evaluated to a double-precision complex
//! number at parse time. Terms with the same index tuple are merged by
//! adding coefficients; a term whose merged coefficient is exactly zero is
//! dropped.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use thiserror::Error;

use crate::tensor::StateTensor;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KetError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: ket has {got} modes, previous terms have {expected}")]
    MixedArity {
        line: usize,
        col: usize,
        expected: usize,
        got: usize,
    },
    #[error("mode {mode}: index {index} exceeds declared dimension {dim}")]
    IndexOutOfRange { mode: usize, index: usize, dim: usize },
    #[error("dims header declares {got} modes, terms have {expected}")]
    DimsArity { expected: usize, got: usize },
    #[error("state is identically zero after merging terms")]
    ZeroState,
    #[error("state norm is {norm}, strict mode requires a normalized state")]
    NotNormalized { norm: f64 },
    #[error("division by zero in a coefficient")]
    DivisionByZero,
    #[error("coefficient is not finite")]
    NonFinite,
    #[error("input contains no terms")]
    Empty,
    #[error("state of {entries} amplitudes exceeds the dense-storage limit")]
    TooLarge { entries: usize },
}

pub type KetResult<T> = Result<T, KetError>;

/// One ket term: a complex coefficient and one basis index per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct KetTerm {
    pub coefficient: Complex64,
    pub indices: Vec<usize>,
}

/// A parsed, merged ket expression with resolved mode dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct KetExpr {
    terms: Vec<KetTerm>,
    dims: Vec<usize>,
}

/// What to do when the expression's norm is not exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizePolicy {
    /// Scale to unit norm and report the applied factor.
    Auto,
    /// Reject inputs whose norm differs from one by more than 1e-9.
    Strict,
}

/// A tensor built from a [`KetExpr`] plus the normalization factor the
/// amplitudes were multiplied by (1.0 means the input was already unit norm
/// to the last bit).
#[derive(Debug, Clone)]
pub struct BuiltState {
    pub tensor: StateTensor,
    pub scale: f64,
}

const MAX_DENSE_ENTRIES: usize = 1 << 24;

impl KetExpr {
    /// Builds an expression from raw terms, applying the same merging and
    /// validation as [`parse`]. `dims` pins the dimensions; `None` infers
    /// them from the largest index per mode.
    pub fn from_terms(terms: Vec<KetTerm>, dims: Option<Vec<usize>>) -> KetResult<Self> {
        if terms.is_empty() {
            return Err(KetError::Empty);
        }
        let arity = terms[0].indices.len();
        if arity == 0 {
            return Err(KetError::Empty);
        }
        let mut merged: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
        for t in terms {
            if t.indices.len() != arity {
                return Err(KetError::MixedArity {
                    line: 0,
                    col: 0,
                    expected: arity,
                    got: t.indices.len(),
                });
            }
            if !t.coefficient.re.is_finite() || !t.coefficient.im.is_finite() {
                return Err(KetError::NonFinite);
            }
            *merged.entry(t.indices).or_insert(Complex64::new(0.0, 0.0)) += t.coefficient;
        }
        merged.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        if merged.is_empty() {
            return Err(KetError::ZeroState);
        }
        let dims = match dims {
            Some(d) => {
                if d.len() != arity {
                    return Err(KetError::DimsArity {
                        expected: arity,
                        got: d.len(),
                    });
                }
                for indices in merged.keys() {
                    for (mode, (&i, &dim)) in indices.iter().zip(&d).enumerate() {
                        if i >= dim {
                            return Err(KetError::IndexOutOfRange { mode, index: i, dim });
                        }
                    }
                }
                d
            }
            None => {
                let mut d = vec![1usize; arity];
                for indices in merged.keys() {
                    for (mode, &i) in indices.iter().enumerate() {
                        d[mode] = d[mode].max(i + 1);
                    }
                }
                d
            }
        };
        let terms = merged
            .into_iter()
            .map(|(indices, coefficient)| KetTerm { coefficient, indices })
            .collect();
        Ok(KetExpr { terms, dims })
    }

    pub fn terms(&self) -> &[KetTerm] {
        &self.terms
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    /// Norm of the coefficient vector (squared moduli summed in sorted order).
    pub fn norm(&self) -> f64 {
        let mut sq: Vec<f64> = self.terms.iter().map(|t| t.coefficient.norm_sqr()).collect();
        sq.sort_by(f64::total_cmp);
        sq.iter().sum::<f64>().sqrt()
    }

    /// Materializes the dense state tensor. The coefficients here are state
    /// amplitudes; conjugation into storage convention happens inside
    /// [`StateTensor::from_state_amplitudes`].
    pub fn to_tensor(&self, policy: NormalizePolicy) -> KetResult<BuiltState> {
        let len: usize = self.dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).unwrap_or(usize::MAX);
        if len > MAX_DENSE_ENTRIES {
            return Err(KetError::TooLarge { entries: len });
        }
        let norm = self.norm();
        if norm == 0.0 {
            return Err(KetError::ZeroState);
        }
        let scale = match policy {
            NormalizePolicy::Auto => 1.0 / norm,
            NormalizePolicy::Strict => {
                if (norm - 1.0).abs() > 1e-9 {
                    return Err(KetError::NotNormalized { norm });
                }
                1.0 / norm
            }
        };
        let mut strides = vec![1usize; self.dims.len()];
        for m in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[m] = strides[m + 1] * self.dims[m + 1];
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        for t in &self.terms {
            let flat: usize = t.indices.iter().zip(&strides).map(|(&i, &s)| i * s).sum();
            amps[flat] = t.coefficient * scale;
        }
        let tensor =
            StateTensor::from_state_amplitudes(self.dims.clone(), amps).expect("dims and length are consistent");
        Ok(BuiltState { tensor, scale })
    }
}

// --- lexer ------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ket(Vec<usize>),
    Num(f64),
    ImagUnit,
    Pi,
    Sqrt,
    Exp,
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> KetError {
    KetError::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, start_line: usize) -> Self {
        Lexer {
            chars: src.chars().peekable(),
            line: start_line,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let ch = self.chars.next()?;
        if ch == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(ch)
    }

    fn lex(mut self) -> KetResult<Vec<Spanned>> {
        let mut out = Vec::new();
        loop {
            while let Some(&ch) = self.chars.peek() {
                if ch == '#' {
                    while let Some(&c2) = self.chars.peek() {
                        if c2 == '\n' {
                            break;
                        }
                        self.bump();
                    }
                } else if ch.is_whitespace() {
                    self.bump();
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            let Some(&ch) = self.chars.peek() else { break };
            let tok = match ch {
                '|' => {
                    self.bump();
                    self.lex_ket(line, col)?
                }
                '0'..='9' => self.lex_number(line, col)?,
                'a'..='z' | 'A'..='Z' => self.lex_ident(line, col)?,
                '+' => {
                    self.bump();
                    Tok::Plus
                }
                '-' => {
                    self.bump();
                    Tok::Minus
                }
                '*' => {
                    self.bump();
                    Tok::Star
                }
                '/' => {
                    self.bump();
                    Tok::Slash
                }
                '(' => {
                    self.bump();
                    Tok::LParen
                }
                ')' => {
                    self.bump();
                    Tok::RParen
                }
                other => return Err(syntax(line, col, format!("unexpected character '{other}'"))),
            };
            out.push(Spanned { tok, line, col });
        }
        Ok(out)
    }

    fn lex_ket(&mut self, line: usize, col: usize) -> KetResult<Tok> {
        let mut body = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some(ch) if ch.is_ascii_digit() || ch == ',' || ch == ' ' || ch == '\t' => body.push(ch),
                Some(ch) => return Err(syntax(line, col, format!("unexpected '{ch}' inside ket"))),
                None => return Err(syntax(line, col, "unterminated ket")),
            }
        }
        let compact: String = body.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(syntax(line, col, "empty ket"));
        }
        let indices = if compact.contains(',') {
            let mut v = Vec::new();
            for piece in compact.split(',') {
                if piece.is_empty() {
                    return Err(syntax(line, col, "empty index in ket"));
                }
                v.push(
                    piece
                        .parse::<usize>()
                        .map_err(|_| syntax(line, col, format!("bad index '{piece}' in ket")))?,
                );
            }
            v
        } else {
            compact.chars().map(|c| c as usize - '0' as usize).collect()
        };
        Ok(Tok::Ket(indices))
    }

    fn lex_number(&mut self, line: usize, col: usize) -> KetResult<Tok> {
        let mut text = String::new();
        while matches!(self.chars.peek(), Some(c) if c.is_ascii_digit()) {
            text.push(self.bump().unwrap());
        }
        if self.chars.peek() == Some(&'.') {
            text.push(self.bump().unwrap());
            if !matches!(self.chars.peek(), Some(c) if c.is_ascii_digit()) {
                return Err(syntax(line, col, "digits required after decimal point"));
            }
            while matches!(self.chars.peek(), Some(c) if c.is_ascii_digit()) {
                text.push(self.bump().unwrap());
            }
        }
        // Exponent only when it is unambiguously numeric ("2e3", "1e-7");
        // otherwise "e" starts an identifier like "exp".
        if matches!(self.chars.peek(), Some('e' | 'E')) {
            let mut lookahead = self.chars.clone();
            lookahead.next();
            let mut probe = String::new();
            if matches!(lookahead.peek(), Some('+' | '-')) {
                probe.push(*lookahead.peek().unwrap());
                lookahead.next();
            }
            if matches!(lookahead.peek(), Some(c) if c.is_ascii_digit()) {
                text.push(self.bump().unwrap());
                text.push_str(&probe);
                for _ in 0..probe.len() {
                    self.bump();
                }
                while matches!(self.chars.peek(), Some(c) if c.is_ascii_digit()) {
                    text.push(self.bump().unwrap());
                }
            }
        }
        text.parse::<f64>()
            .map(Tok::Num)
            .map_err(|_| syntax(line, col, format!("bad number '{text}'")))
    }

    fn lex_ident(&mut self, line: usize, col: usize) -> KetResult<Tok> {
        let mut text = String::new();
        while matches!(self.chars.peek(), Some(c) if c.is_ascii_alphanumeric()) {
            text.push(self.bump().unwrap());
        }
        match text.as_str() {
            "i" => Ok(Tok::ImagUnit),
            "pi" => Ok(Tok::Pi),
            "sqrt" => Ok(Tok::Sqrt),
            "exp" => Ok(Tok::Exp),
            other => Err(syntax(line, col, format!("unknown identifier '{other}'"))),
        }
    }
}

// --- parser -----------------------------------------------------------------

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    arity: Option<usize>,
}

type RawTerms = Vec<(Complex64, Vec<usize>)>;

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|s| (s.line, s.col))
            .unwrap_or((1, 1))
    }

    fn bump(&mut self) -> Option<Spanned> {
        let s = self.toks.get(self.pos).cloned();
        if s.is_some() {
            self.pos += 1;
        }
        s
    }

    fn expect(&mut self, tok: Tok, what: &str) -> KetResult<()> {
        let (line, col) = self.here();
        match self.bump() {
            Some(s) if s.tok == tok => Ok(()),
            _ => Err(syntax(line, col, format!("expected {what}"))),
        }
    }

    /// True when the parenthesis at the current position opens a group that
    /// contains a ket (a state group, as opposed to a scalar subexpression).
    fn paren_holds_state(&self) -> bool {
        let mut depth = 0usize;
        for s in &self.toks[self.pos..] {
            match s.tok {
                Tok::LParen => depth += 1,
                Tok::RParen => {
                    if depth <= 1 {
                        return false;
                    }
                    depth -= 1;
                }
                Tok::Ket(_) if depth >= 1 => return true,
                _ => {}
            }
        }
        false
    }

    fn at_scalar_start(&self) -> bool {
        match self.peek() {
            Some(Tok::Num(_) | Tok::ImagUnit | Tok::Pi | Tok::Sqrt | Tok::Exp) => true,
            Some(Tok::LParen) => !self.paren_holds_state(),
            _ => false,
        }
    }

    fn parse_sum(&mut self) -> KetResult<RawTerms> {
        let mut sign = 1.0;
        if matches!(self.peek(), Some(Tok::Plus | Tok::Minus)) {
            if let Some(Spanned { tok: Tok::Minus, .. }) = self.bump() {
                sign = -1.0;
            }
        }
        let mut acc = self.parse_term()?;
        scale_terms(&mut acc, Complex64::new(sign, 0.0));
        while let Some(tok) = self.peek() {
            let sign = match tok {
                Tok::Plus => 1.0,
                Tok::Minus => -1.0,
                _ => break,
            };
            self.bump();
            let mut t = self.parse_term()?;
            scale_terms(&mut t, Complex64::new(sign, 0.0));
            acc.extend(t);
        }
        Ok(acc)
    }

    fn parse_term(&mut self) -> KetResult<RawTerms> {
        let mut coeff = Complex64::new(1.0, 0.0);
        // Scalar prefix: factors joined by '*', '/', or juxtaposition; a
        // trailing '*' binds the prefix to the ket or group that follows.
        while self.at_scalar_start() {
            coeff *= self.parse_scalar_factor()?;
            loop {
                match self.peek() {
                    Some(Tok::Star) => {
                        self.bump();
                        if self.at_scalar_start() {
                            coeff *= self.parse_scalar_factor()?;
                        } else {
                            break;
                        }
                    }
                    Some(Tok::Slash) => {
                        self.bump();
                        let (line, col) = self.here();
                        if !self.at_scalar_start() {
                            return Err(syntax(line, col, "expected a scalar after '/'"));
                        }
                        let d = self.parse_scalar_factor()?;
                        if d == Complex64::new(0.0, 0.0) {
                            return Err(KetError::DivisionByZero);
                        }
                        coeff /= d;
                    }
                    _ => break,
                }
            }
        }
        let (line, col) = self.here();
        let mut terms = match self.peek() {
            Some(Tok::Ket(_)) => {
                let Some(Spanned {
                    tok: Tok::Ket(indices), ..
                }) = self.bump()
                else {
                    unreachable!()
                };
                match self.arity {
                    None => self.arity = Some(indices.len()),
                    Some(expected) if expected != indices.len() => {
                        return Err(KetError::MixedArity {
                            line,
                            col,
                            expected,
                            got: indices.len(),
                        });
                    }
                    _ => {}
                }
                vec![(Complex64::new(1.0, 0.0), indices)]
            }
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.parse_sum()?;
                self.expect(Tok::RParen, "')'")?;
                inner
            }
            _ => return Err(syntax(line, col, "expected a ket or a parenthesized group")),
        };
        scale_terms(&mut terms, coeff);
        // Scalar suffixes: "(...)/sqrt(3)", "(...)*2".
        loop {
            match self.peek() {
                Some(Tok::Slash) => {
                    self.bump();
                    let (line, col) = self.here();
                    if !self.at_scalar_start() {
                        return Err(syntax(line, col, "expected a scalar after '/'"));
                    }
                    let d = self.parse_scalar_factor()?;
                    if d == Complex64::new(0.0, 0.0) {
                        return Err(KetError::DivisionByZero);
                    }
                    scale_terms(&mut terms, Complex64::new(1.0, 0.0) / d);
                }
                Some(Tok::Star) if self.pos + 1 < self.toks.len() => {
                    self.bump();
                    let (line, col) = self.here();
                    if !self.at_scalar_start() {
                        return Err(syntax(line, col, "expected a scalar after '*'"));
                    }
                    let f = self.parse_scalar_factor()?;
                    scale_terms(&mut terms, f);
                }
                _ => break,
            }
        }
        Ok(terms)
    }

    /// One scalar atom: number (with juxtaposed `i`/`pi` as in `2i*pi`),
    /// `i`, `pi`, `sqrt(m)`, `exp(z)`, a signed atom, or a parenthesized
    /// scalar expression.
    fn parse_scalar_factor(&mut self) -> KetResult<Complex64> {
        let (line, col) = self.here();
        match self.bump().map(|s| s.tok) {
            Some(Tok::Num(v)) => {
                let mut c = Complex64::new(v, 0.0);
                match self.peek() {
                    Some(Tok::ImagUnit) => {
                        self.bump();
                        c *= Complex64::new(0.0, 1.0);
                    }
                    Some(Tok::Pi) => {
                        self.bump();
                        c *= std::f64::consts::PI;
                    }
                    _ => {}
                }
                Ok(c)
            }
            Some(Tok::ImagUnit) => Ok(Complex64::new(0.0, 1.0)),
            Some(Tok::Pi) => Ok(Complex64::new(std::f64::consts::PI, 0.0)),
            Some(Tok::Minus) => Ok(-self.parse_scalar_factor()?),
            Some(Tok::Plus) => self.parse_scalar_factor(),
            Some(Tok::Sqrt) => {
                self.expect(Tok::LParen, "'(' after sqrt")?;
                let z = self.parse_scalar_expr()?;
                self.expect(Tok::RParen, "')'")?;
                if z.im != 0.0 || z.re <= 0.0 || z.re.fract() != 0.0 {
                    return Err(syntax(line, col, "sqrt takes a positive integer"));
                }
                Ok(Complex64::new(z.re.sqrt(), 0.0))
            }
            Some(Tok::Exp) => {
                self.expect(Tok::LParen, "'(' after exp")?;
                let z = self.parse_scalar_expr()?;
                self.expect(Tok::RParen, "')'")?;
                let e = z.exp();
                if !e.re.is_finite() || !e.im.is_finite() {
                    return Err(KetError::NonFinite);
                }
                Ok(e)
            }
            Some(Tok::LParen) => {
                let z = self.parse_scalar_expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(z)
            }
            _ => Err(syntax(line, col, "expected a coefficient")),
        }
    }

    /// Full scalar expression with `+ - * /`, used inside parentheses and
    /// `exp(...)` arguments.
    fn parse_scalar_expr(&mut self) -> KetResult<Complex64> {
        let mut acc = self.parse_scalar_prod()?;
        while let Some(tok) = self.peek() {
            let minus = match tok {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            self.bump();
            let r = self.parse_scalar_prod()?;
            acc = if minus { acc - r } else { acc + r };
        }
        Ok(acc)
    }

    fn parse_scalar_prod(&mut self) -> KetResult<Complex64> {
        let mut acc = self.parse_scalar_factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc *= self.parse_scalar_factor()?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let d = self.parse_scalar_factor()?;
                    if d == Complex64::new(0.0, 0.0) {
                        return Err(KetError::DivisionByZero);
                    }
                    acc /= d;
                }
                _ => break,
            }
        }
        Ok(acc)
    }
}

fn scale_terms(terms: &mut RawTerms, c: Complex64) {
    if c == Complex64::new(1.0, 0.0) {
        return;
    }
    for (coeff, _) in terms.iter_mut() {
        *coeff *= c;
    }
}

/// Splits an optional `dims:` header line off the front of the input.
/// Returns (declared dims, expression text, 1-based line the expression
/// starts on).
fn split_header(text: &str) -> KetResult<(Option<Vec<usize>>, &str, usize)> {
    let mut offset = 0usize;
    for (lineno, line) in text.split_inclusive('\n').enumerate() {
        let body = line.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            offset += line.len();
            continue;
        }
        let trimmed = body.trim_start();
        if let Some(rest) = trimmed.strip_prefix("dims:") {
            let mut dims = Vec::new();
            for piece in rest.split_whitespace() {
                let d: usize = piece
                    .parse()
                    .map_err(|_| syntax(lineno + 1, 1, format!("bad dimension '{piece}' in dims header")))?;
                if d == 0 {
                    return Err(syntax(lineno + 1, 1, "dimensions must be positive"));
                }
                dims.push(d);
            }
            if dims.is_empty() {
                return Err(syntax(lineno + 1, 1, "dims header lists no dimensions"));
            }
            offset += line.len();
            return Ok((Some(dims), &text[offset..], lineno + 2));
        }
        break;
    }
    Ok((None, &text[offset..], text[..offset].matches('\n').count() + 1))
}

/// Parses a ket expression. See the module docs for the accepted language.
pub fn parse(text: &str) -> KetResult<KetExpr> {
    let (declared, body, start_line) = split_header(text)?;
    let toks = Lexer::new(body, start_line).lex()?;
    if toks.is_empty() {
        return Err(KetError::Empty);
    }
    let mut parser = Parser {
        toks,
        pos: 0,
        arity: None,
    };
    let raw = parser.parse_sum()?;
    if parser.pos != parser.toks.len() {
        let (line, col) = parser.here();
        return Err(syntax(line, col, "unexpected trailing input"));
    }
    let terms = raw
        .into_iter()
        .map(|(coefficient, indices)| KetTerm { coefficient, indices })
        .collect();
    KetExpr::from_terms(terms, declared)
}

/// Renders an expression to text that reparses to the same terms and
/// dimensions. Coefficients use shortest round-trip decimal form; the dims
/// header is always emitted.
pub fn render(expr: &KetExpr) -> String {
    let mut out = String::from("dims:");
    for d in expr.dims() {
        let _ = write!(out, " {d}");
    }
    out.push('\n');
    let compact = expr.dims().iter().all(|&d| d <= 10);
    for (k, term) in expr.terms().iter().enumerate() {
        let (negate, coeff) = coeff_display(term.coefficient);
        if k == 0 {
            if negate {
                out.push('-');
            }
        } else {
            out.push_str(if negate { " - " } else { " + " });
        }
        if let Some(cs) = coeff {
            out.push_str(&cs);
            out.push('*');
        }
        out.push('|');
        if compact {
            for &i in &term.indices {
                let _ = write!(out, "{i}");
            }
        } else {
            for (m, &i) in term.indices.iter().enumerate() {
                if m > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{i}");
            }
        }
        out.push('>');
    }
    out.push('\n');
    out
}

/// Sign-splits a coefficient for display: returns (render with a leading
/// minus, textual factor or None when the factor is exactly one).
fn coeff_display(c: Complex64) -> (bool, Option<String>) {
    if c.im == 0.0 {
        let neg = c.re < 0.0;
        let a = c.re.abs();
        (neg, (a != 1.0).then(|| format!("{a}")))
    } else if c.re == 0.0 {
        let neg = c.im < 0.0;
        let a = c.im.abs();
        (neg, Some(if a == 1.0 { "i".into() } else { format!("{a}*i") }))
    } else {
        let sign = if c.im < 0.0 { '-' } else { '+' };
        (false, Some(format!("({}{}{}*i)", c.re, sign, c.im.abs())))
    }
}
