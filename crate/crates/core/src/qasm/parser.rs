use std::collections::HashMap;

use super::expr::{BinOp, Expr, Func, Value};
use super::lexer::{tokenize, Tok, Token};
use super::{Diagnostic, SourceProgram};
use crate::circuit::{CircuitIR, GateKind, GateOp};

/// Parses OpenQASM 2.0 source into a [`CircuitIR`]. Either the whole program
/// is accepted or the collected diagnostics are returned.
pub fn parse_qasm(src: &SourceProgram) -> Result<CircuitIR, Vec<Diagnostic>> {
    if src.text.trim().is_empty() {
        return Err(vec![Diagnostic::error("empty program", 1, 1)]);
    }
    let tokens = tokenize(&src.text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        qregs: Vec::new(),
        cregs: Vec::new(),
        n_qubits: 0,
        n_clbits: 0,
        macros: HashMap::new(),
        gates: Vec::new(),
        diags: Vec::new(),
    };
    p.program();
    if p.diags.iter().any(Diagnostic::is_error) {
        return Err(p.diags);
    }
    let c = CircuitIR {
        name: src.name(),
        n_qubits: p.n_qubits,
        n_clbits: p.n_clbits,
        gates: p.gates,
    };
    debug_assert!(c.validate().is_ok());
    Ok(c)
}

#[derive(Debug, Clone)]
struct Register {
    name: String,
    offset: usize,
    size: usize,
}

#[derive(Debug, Clone)]
struct MacroCall {
    name: String,
    params: Vec<Expr>,
    args: Vec<String>,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone)]
struct GateDef {
    params: Vec<String>,
    qargs: Vec<String>,
    body: Vec<MacroCall>,
}

#[derive(Debug, Clone)]
enum Arg {
    Whole(String),
    Indexed(String, i64),
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    qregs: Vec<Register>,
    cregs: Vec<Register>,
    n_qubits: usize,
    n_clbits: usize,
    macros: HashMap<String, GateDef>,
    gates: Vec<GateOp>,
    diags: Vec<Diagnostic>,
}

type PResult<T> = Result<T, Diagnostic>;

const RESERVED: &[&str] = &[
    "OPENQASM", "include", "qreg", "creg", "gate", "opaque", "measure", "barrier", "reset", "if",
    "pi",
];

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, msg: impl Into<String>) -> Diagnostic {
        let t = self.peek();
        Diagnostic::error(msg, t.line, t.col)
    }

    fn expect(&mut self, want: Tok) -> PResult<Token> {
        if self.peek().tok == want {
            Ok(self.bump())
        } else {
            Err(self.err_here(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().tok.describe()
            )))
        }
    }

    fn ident(&mut self) -> PResult<(String, usize, usize)> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Ident(s) => {
                self.bump();
                Ok((s, t.line, t.col))
            }
            other => Err(self.err_here(format!(
                "expected identifier, found {}",
                other.describe()
            ))),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        match self.peek().tok {
            Tok::Int(i) => {
                self.bump();
                Ok(i)
            }
            ref other => Err(self.err_here(format!("expected integer, found {}", other.describe()))),
        }
    }

    /// Skips past the next `;` (or a closing brace) after an error.
    fn recover(&mut self) {
        loop {
            match self.peek().tok {
                Tok::Eof => return,
                Tok::Semi | Tok::RBrace => {
                    self.bump();
                    return;
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn program(&mut self) {
        if let Err(d) = self.header() {
            self.diags.push(d);
            self.recover();
        }
        while self.peek().tok != Tok::Eof {
            let start = self.pos;
            if let Err(d) = self.statement() {
                self.diags.push(d);
                let terminated = self.pos > start
                    && matches!(self.tokens[self.pos - 1].tok, Tok::Semi | Tok::RBrace);
                if !terminated {
                    self.recover();
                }
            }
        }
    }

    fn header(&mut self) -> PResult<()> {
        match &self.peek().tok {
            Tok::Ident(s) if s == "OPENQASM" => {
                self.bump();
            }
            _ => return Err(self.err_here("expected 'OPENQASM 2.0;' header")),
        }
        let t = self.peek().clone();
        let version_ok = match t.tok {
            Tok::Real(v) => v == 2.0,
            Tok::Int(v) => v == 2,
            _ => false,
        };
        if !version_ok {
            return Err(Diagnostic::error(
                format!("unsupported OpenQASM version {}", t.tok.describe()),
                t.line,
                t.col,
            ));
        }
        self.bump();
        self.expect(Tok::Semi)?;
        Ok(())
    }

    fn statement(&mut self) -> PResult<()> {
        let (word, line, col) = self.ident()?;
        match word.as_str() {
            "include" => {
                let t = self.peek().clone();
                let Tok::Str(file) = t.tok else {
                    return Err(self.err_here("expected file name string after 'include'"));
                };
                self.bump();
                self.expect(Tok::Semi)?;
                if file != "qelib1.inc" {
                    return Err(Diagnostic::error(
                        format!("include of '{file}' is not supported; only the built-in qelib1.inc is available"),
                        t.line,
                        t.col,
                    ));
                }
                Ok(())
            }
            "qreg" | "creg" => self.declaration(word == "qreg"),
            "gate" => self.gate_definition(),
            "opaque" => Err(Diagnostic::error(
                "opaque gate declarations are not supported",
                line,
                col,
            )),
            "if" => Err(Diagnostic::error(
                "classical control flow ('if') is not supported",
                line,
                col,
            )),
            "OPENQASM" => Err(Diagnostic::error("duplicate OPENQASM header", line, col)),
            "measure" => self.measure(),
            "barrier" => {
                let args = self.arg_list()?;
                self.expect(Tok::Semi)?;
                let mut qubits = Vec::new();
                for (a, l, c) in &args {
                    for q in self.resolve_q(a, *l, *c)? {
                        if !qubits.contains(&q) {
                            qubits.push(q);
                        }
                    }
                }
                self.gates.push(GateOp::barrier(qubits));
                Ok(())
            }
            _ => self.gate_call(word, line, col),
        }
    }

    fn declaration(&mut self, quantum: bool) -> PResult<()> {
        let (name, line, col) = self.ident()?;
        self.expect(Tok::LBracket)?;
        let size = self.int()?;
        self.expect(Tok::RBracket)?;
        self.expect(Tok::Semi)?;
        if size <= 0 {
            return Err(Diagnostic::error(
                format!("register '{name}' must have positive size"),
                line,
                col,
            ));
        }
        if self.qregs.iter().chain(&self.cregs).any(|r| r.name == name) {
            return Err(Diagnostic::error(
                format!("register '{name}' already declared"),
                line,
                col,
            ));
        }
        let size = size as usize;
        if quantum {
            self.qregs.push(Register {
                name,
                offset: self.n_qubits,
                size,
            });
            self.n_qubits += size;
        } else {
            self.cregs.push(Register {
                name,
                offset: self.n_clbits,
                size,
            });
            self.n_clbits += size;
        }
        Ok(())
    }

    fn gate_definition(&mut self) -> PResult<()> {
        let result = self.gate_definition_inner();
        if result.is_err() && !matches!(self.tokens[self.pos - 1].tok, Tok::RBrace) {
            while !matches!(self.peek().tok, Tok::RBrace | Tok::Eof) {
                self.bump();
            }
            self.bump();
        }
        result
    }

    fn gate_definition_inner(&mut self) -> PResult<()> {
        let (name, line, col) = self.ident()?;
        if RESERVED.contains(&name.as_str()) {
            return Err(Diagnostic::error(
                format!("'{name}' is a reserved word"),
                line,
                col,
            ));
        }
        let mut params = Vec::new();
        if self.peek().tok == Tok::LParen {
            self.bump();
            if self.peek().tok != Tok::RParen {
                loop {
                    params.push(self.ident()?.0);
                    if self.peek().tok == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen)?;
        }
        let mut qargs = Vec::new();
        loop {
            qargs.push(self.ident()?.0);
            if self.peek().tok == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(Tok::LBrace)?;
        let mut body = Vec::new();
        while self.peek().tok != Tok::RBrace {
            if self.peek().tok == Tok::Eof {
                return Err(self.err_here("unterminated gate body"));
            }
            let (callee, cl, cc) = self.ident()?;
            let call_params = self.param_list()?;
            let mut args = Vec::new();
            loop {
                let (a, al, ac) = self.ident()?;
                if !qargs.contains(&a) {
                    return Err(Diagnostic::error(
                        format!("unknown qubit argument '{a}' in gate '{name}'"),
                        al,
                        ac,
                    ));
                }
                args.push(a);
                if self.peek().tok == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(Tok::Semi)?;
            body.push(MacroCall {
                name: callee,
                params: call_params,
                args,
                line: cl,
                col: cc,
            });
        }
        self.bump();
        if self.macros.contains_key(&name) || is_builtin(&name) {
            return Err(Diagnostic::error(
                format!("gate '{name}' already defined"),
                line,
                col,
            ));
        }
        // Check the body now so errors point into the definition.
        for call in &body {
            if call.name != "barrier" && !is_builtin(&call.name) && !self.macros.contains_key(&call.name) {
                return Err(Diagnostic::error(
                    format!("unsupported gate '{}'", call.name),
                    call.line,
                    call.col,
                ));
            }
        }
        self.macros.insert(
            name,
            GateDef {
                params,
                qargs,
                body,
            },
        );
        Ok(())
    }

    fn param_list(&mut self) -> PResult<Vec<Expr>> {
        let mut params = Vec::new();
        if self.peek().tok == Tok::LParen {
            self.bump();
            if self.peek().tok != Tok::RParen {
                loop {
                    params.push(self.expr()?);
                    if self.peek().tok == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen)?;
        }
        Ok(params)
    }

    fn arg(&mut self) -> PResult<(Arg, usize, usize)> {
        let (name, line, col) = self.ident()?;
        if self.peek().tok == Tok::LBracket {
            self.bump();
            let idx = self.int()?;
            self.expect(Tok::RBracket)?;
            Ok((Arg::Indexed(name, idx), line, col))
        } else {
            Ok((Arg::Whole(name), line, col))
        }
    }

    fn arg_list(&mut self) -> PResult<Vec<(Arg, usize, usize)>> {
        let mut args = vec![self.arg()?];
        while self.peek().tok == Tok::Comma {
            self.bump();
            args.push(self.arg()?);
        }
        Ok(args)
    }

    fn resolve(
        regs: &[Register],
        kind: &str,
        a: &Arg,
        line: usize,
        col: usize,
    ) -> PResult<Vec<usize>> {
        let name = match a {
            Arg::Whole(n) | Arg::Indexed(n, _) => n,
        };
        let Some(reg) = regs.iter().find(|r| &r.name == name) else {
            return Err(Diagnostic::error(
                format!("undeclared {kind} register '{name}'"),
                line,
                col,
            ));
        };
        match a {
            Arg::Whole(_) => Ok((reg.offset..reg.offset + reg.size).collect()),
            Arg::Indexed(_, i) => {
                if *i < 0 || *i as usize >= reg.size {
                    Err(Diagnostic::error(
                        format!(
                            "index {i} out of range for register '{name}' of size {}",
                            reg.size
                        ),
                        line,
                        col,
                    ))
                } else {
                    Ok(vec![reg.offset + *i as usize])
                }
            }
        }
    }

    fn resolve_q(&self, a: &Arg, line: usize, col: usize) -> PResult<Vec<usize>> {
        Self::resolve(&self.qregs, "quantum", a, line, col)
    }

    fn measure(&mut self) -> PResult<()> {
        let (qa, ql, qc) = self.arg()?;
        self.expect(Tok::Arrow)?;
        let (ca, cl, cc) = self.arg()?;
        self.expect(Tok::Semi)?;
        let qs = self.resolve_q(&qa, ql, qc)?;
        let cs = Self::resolve(&self.cregs, "classical", &ca, cl, cc)?;
        if qs.len() != cs.len() {
            return Err(Diagnostic::error(
                format!(
                    "measure size mismatch: {} qubits into {} bits",
                    qs.len(),
                    cs.len()
                ),
                ql,
                qc,
            ));
        }
        for (q, c) in qs.into_iter().zip(cs) {
            self.gates.push(GateOp::measure(q, c));
        }
        Ok(())
    }

    fn gate_call(&mut self, name: String, line: usize, col: usize) -> PResult<()> {
        if name == "reset" {
            return Err(Diagnostic::error("unsupported gate 'reset'", line, col));
        }
        if !is_builtin(&name) && !self.macros.contains_key(&name) {
            return Err(Diagnostic::error(
                format!("unsupported gate '{name}'"),
                line,
                col,
            ));
        }
        let params = self.param_list()?;
        let args = self.arg_list()?;
        self.expect(Tok::Semi)?;
        let env = HashMap::new();
        let values = params
            .iter()
            .map(|e| e.eval(&env).map_err(|m| Diagnostic::error(m, line, col)))
            .collect::<PResult<Vec<Value>>>()?;
        let mut resolved = Vec::new();
        for (a, l, c) in &args {
            resolved.push(self.resolve_q(a, *l, *c)?);
        }
        let width = resolved
            .iter()
            .zip(&args)
            .filter(|(_, (a, _, _))| matches!(a, Arg::Whole(_)))
            .map(|(r, _)| r.len())
            .max()
            .unwrap_or(1);
        for (r, (a, l, c)) in resolved.iter().zip(&args) {
            if matches!(a, Arg::Whole(_)) && r.len() != width {
                return Err(Diagnostic::error(
                    "register arguments of different sizes",
                    *l,
                    *c,
                ));
            }
        }
        for k in 0..width {
            let qubits: Vec<usize> = resolved
                .iter()
                .map(|r| if r.len() == width { r[k] } else { r[0] })
                .collect();
            self.apply(&name, &values, &qubits, line, col, 0)?;
        }
        Ok(())
    }

    fn apply(
        &mut self,
        name: &str,
        params: &[Value],
        qubits: &[usize],
        line: usize,
        col: usize,
        depth: usize,
    ) -> PResult<()> {
        if depth > 64 {
            return Err(Diagnostic::error("gate expansion too deep", line, col));
        }
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(Diagnostic::error(
                    format!("gate '{name}' applied to repeated qubit operand"),
                    line,
                    col,
                ));
            }
        }
        let arity_err = |want_p: usize, want_q: usize| {
            Diagnostic::error(
                format!(
                    "gate '{name}' expects {want_p} parameter(s) and {want_q} qubit(s), got {} and {}",
                    params.len(),
                    qubits.len()
                ),
                line,
                col,
            )
        };
        let builtin = match name {
            "U" => Some(GateKind::U3),
            "CX" => Some(GateKind::Cx),
            _ => GateKind::from_name(name)
                .filter(|k| !matches!(k, GateKind::Barrier | GateKind::Measure)),
        };
        if let Some(kind) = builtin {
            let nq = kind.arity().unwrap_or(1);
            if params.len() != kind.param_count() || qubits.len() != nq {
                return Err(arity_err(kind.param_count(), nq));
            }
            self.gates.push(GateOp::with_params(
                kind,
                qubits.to_vec(),
                params.iter().map(|v| v.to_angle()).collect(),
            ));
            return Ok(());
        }
        match name {
            "ccx" => {
                if !params.is_empty() || qubits.len() != 3 {
                    return Err(arity_err(0, 3));
                }
                self.gates
                    .extend(ccx_decomposition(qubits[0], qubits[1], qubits[2]));
                Ok(())
            }
            "swap" => {
                if !params.is_empty() || qubits.len() != 2 {
                    return Err(arity_err(0, 2));
                }
                let (a, b) = (qubits[0], qubits[1]);
                self.gates
                    .extend([GateOp::cx(a, b), GateOp::cx(b, a), GateOp::cx(a, b)]);
                Ok(())
            }
            _ => {
                let Some(def) = self.macros.get(name).cloned() else {
                    return Err(Diagnostic::error(
                        format!("unsupported gate '{name}'"),
                        line,
                        col,
                    ));
                };
                if def.params.len() != params.len() || def.qargs.len() != qubits.len() {
                    return Err(arity_err(def.params.len(), def.qargs.len()));
                }
                let env: HashMap<String, Value> =
                    def.params.iter().cloned().zip(params.iter().copied()).collect();
                let bind: HashMap<&str, usize> = def
                    .qargs
                    .iter()
                    .map(String::as_str)
                    .zip(qubits.iter().copied())
                    .collect();
                for call in &def.body {
                    let qs: Vec<usize> = call.args.iter().map(|a| bind[a.as_str()]).collect();
                    if call.name == "barrier" {
                        self.gates.push(GateOp::barrier(qs));
                        continue;
                    }
                    let vals = call
                        .params
                        .iter()
                        .map(|e| e.eval(&env).map_err(|m| Diagnostic::error(m, call.line, call.col)))
                        .collect::<PResult<Vec<Value>>>()?;
                    self.apply(&call.name, &vals, &qs, call.line, call.col, depth + 1)?;
                }
                Ok(())
            }
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        match self.peek().tok {
            Tok::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> PResult<Expr> {
        let base = self.primary()?;
        if self.peek().tok == Tok::Caret {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Int(i) => {
                self.bump();
                Ok(Expr::Int(i))
            }
            Tok::Real(r) => {
                self.bump();
                Ok(Expr::Real(r))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(ref s) if s == "pi" => {
                self.bump();
                Ok(Expr::Pi)
            }
            Tok::Ident(s) => {
                self.bump();
                if let Some(f) = Func::from_name(&s) {
                    if self.peek().tok == Tok::LParen {
                        self.bump();
                        let e = self.expr()?;
                        self.expect(Tok::RParen)?;
                        return Ok(Expr::Call(f, Box::new(e)));
                    }
                }
                Ok(Expr::Var(s))
            }
            other => Err(self.err_here(format!(
                "expected expression, found {}",
                other.describe()
            ))),
        }
    }
}

fn is_builtin(name: &str) -> bool {
    matches!(name, "U" | "CX" | "ccx" | "swap")
        || GateKind::from_name(name)
            .is_some_and(|k| !matches!(k, GateKind::Barrier | GateKind::Measure))
}

/// Standard 6-cx Toffoli decomposition over {h, t, tdg, cx}.
pub fn ccx_decomposition(a: usize, b: usize, c: usize) -> Vec<GateOp> {
    use GateKind::*;
    vec![
        GateOp::single(H, c),
        GateOp::cx(b, c),
        GateOp::single(Tdg, c),
        GateOp::cx(a, c),
        GateOp::single(T, c),
        GateOp::cx(b, c),
        GateOp::single(Tdg, c),
        GateOp::cx(a, c),
        GateOp::single(T, b),
        GateOp::single(T, c),
        GateOp::single(H, c),
        GateOp::cx(a, b),
        GateOp::single(T, a),
        GateOp::single(Tdg, b),
        GateOp::cx(a, b),
    ]
}
