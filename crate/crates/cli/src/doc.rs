//! Proof documents.
//!
//! A document is a sequence of s-expressions:
//!
//! ```text
//! (type t)                      ; base type other than o, nat and i
//! (const P (-> nat o))          ; constant with its type
//! (var x nat)                   ; free variable
//! (def -2)                      ; antecedent hypothesis holding a recursive definition
//! (hyp -1 (all x nat (P x)))    ; local context entry
//! (proof (AllL -1 0 -3 (Ax -3 1)))
//! ```
//!
//! Formulas use prefix syntax: `(and A B)`, `(or A B)`, `(imp A B)`,
//! `(not A)`, `top`, `bot`, `(= s t)`, `(all x ty A)`, `(ex x ty A)`,
//! `(lam x ty e)`, `(s^k t)` for `k` successors, and plain application
//! `(f a b)`. Types are base names or `(-> a b ... r)`. Hypotheses are
//! nonzero signed integers; `0` is rejected.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use lkt_core::formula::{eq_ty, quant_ty, BUILTINS, EQ, EX, SUCC, ZERO};
use lkt_core::term::{ExprKind, TyKind};
use lkt_core::{
    check_closed, Const, Expr, Generated, Hyp, LocalContext, Proof, ProofKind, RecursiveDefinitions, Ty, Var,
};

use crate::sexp::{parse_all, Pos, Sexp, SyntaxError};

pub type ParseError = SyntaxError;

const BUILTIN_TYPES: &[&str] = &["o", "nat", "i"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub types: Vec<String>,
    pub consts: Vec<Const>,
    pub vars: Vec<Var>,
    pub defs: Vec<Hyp>,
    pub ctx: LocalContext,
    pub proof: Proof,
}

/// A parsed document with the source position of every proof node.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub doc: Document,
    spans: HashMap<usize, Pos>,
}

impl Parsed {
    pub fn position_of(&self, node: &Proof) -> Option<Pos> {
        self.spans.get(&node.addr()).copied()
    }

    /// Type-checks the proof and the definitions, locating failures in the source.
    pub fn check(&self) -> Result<(), ParseError> {
        self.doc.definitions().map_err(|e| ParseError::new(Pos { line: 1, col: 1 }, e))?;
        check_closed(&self.doc.proof, &self.doc.ctx).map_err(|e| {
            let pos = self.position_of(&e.node).unwrap_or(Pos { line: 1, col: 1 });
            ParseError::new(pos, e.to_string())
        })
    }
}

pub fn parse(src: &str) -> Result<Document, ParseError> {
    parse_located(src).map(|p| p.doc)
}

pub fn parse_located(src: &str) -> Result<Parsed, ParseError> {
    let mut r = Reader::default();
    let mut proof = None;
    let mut defs = Vec::new();
    let mut ctx = LocalContext::new();
    for item in parse_all(src)? {
        let (head, args, pos) = r.form(&item)?;
        match (head, args.len()) {
            ("type", 1) => {
                let name = r.name(&args[0])?;
                if BUILTIN_TYPES.contains(&name) || r.types.iter().any(|t| t == name) {
                    return Err(ParseError::new(args[0].pos(), format!("type `{name}` declared twice")));
                }
                r.types.push(name.to_string());
            }
            ("const", 2) => {
                let name = r.name(&args[0])?;
                if BUILTINS.contains(&name) || name.starts_with("s^") || r.consts.contains_key(name) {
                    return Err(ParseError::new(args[0].pos(), format!("constant `{name}` is reserved or declared twice")));
                }
                let c = Const::new(name, r.ty(&args[1])?);
                r.consts.insert(name.to_string(), c.clone());
                r.const_order.push(c);
            }
            ("var", 2) => {
                let name = r.name(&args[0])?;
                if r.vars.iter().any(|v| v.name() == name) {
                    return Err(ParseError::new(args[0].pos(), format!("variable `{name}` declared twice")));
                }
                let v = Var::new(name, r.ty(&args[1])?);
                r.vars.push(v);
            }
            ("def", 1) => defs.push(r.hyp(&args[0])?),
            ("hyp", 2) => {
                let h = r.hyp(&args[0])?;
                let f = r.formula(&args[1])?;
                if ctx.insert(h, f).is_some() {
                    return Err(ParseError::new(args[0].pos(), format!("hypothesis {h} declared twice")));
                }
            }
            ("proof", 1) => {
                if proof.is_some() {
                    return Err(ParseError::new(pos, "second `proof` entry"));
                }
                proof = Some(r.proof(&args[0])?);
            }
            (h @ ("type" | "const" | "var" | "def" | "hyp" | "proof"), n) => {
                return Err(ParseError::new(pos, format!("`{h}` takes {} arguments, got {n}", arity(h))));
            }
            (h, _) => return Err(ParseError::new(pos, format!("unknown declaration `{h}`"))),
        }
    }
    let proof = proof.ok_or_else(|| ParseError::new(Pos { line: 1, col: 1 }, "missing `proof` entry"))?;
    Ok(Parsed {
        doc: Document {
            types: r.types,
            consts: r.const_order,
            vars: r.vars,
            defs,
            ctx,
            proof,
        },
        spans: r.spans,
    })
}

fn arity(head: &str) -> usize {
    match head {
        "const" | "var" | "hyp" => 2,
        _ => 1,
    }
}

#[derive(Default)]
struct Reader {
    types: Vec<String>,
    consts: HashMap<String, Const>,
    const_order: Vec<Const>,
    vars: Vec<Var>,
    bound: Vec<Var>,
    spans: HashMap<usize, Pos>,
}

fn err<T>(s: &Sexp, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::new(s.pos(), msg))
}

impl Reader {
    fn form<'a>(&self, s: &'a Sexp) -> Result<(&'a str, &'a [Sexp], Pos), ParseError> {
        match s {
            Sexp::List(items, pos) => match items.split_first() {
                Some((Sexp::Atom(h, _), rest)) => Ok((h, rest, *pos)),
                _ => Err(ParseError::new(*pos, "expected a keyword after `(`")),
            },
            Sexp::Atom(a, pos) => Err(ParseError::new(*pos, format!("expected a list, found `{a}`"))),
        }
    }

    fn name<'a>(&self, s: &'a Sexp) -> Result<&'a str, ParseError> {
        s.as_atom().map_or_else(|| err(s, "expected a name"), Ok)
    }

    fn hyp(&self, s: &Sexp) -> Result<Hyp, ParseError> {
        let a = s.as_atom().map_or_else(|| err(s, "expected a hypothesis"), Ok)?;
        let v: i32 = a.parse().map_err(|_| ParseError::new(s.pos(), format!("`{a}` is not a hypothesis")))?;
        Hyp::new(v).ok_or_else(|| ParseError::new(s.pos(), "hypothesis 0 is not allowed"))
    }

    fn ty(&self, s: &Sexp) -> Result<Ty, ParseError> {
        match s {
            Sexp::Atom(a, _) => match a.as_str() {
                "o" => Ok(Ty::o()),
                "nat" => Ok(Ty::nat()),
                "i" => Ok(Ty::i()),
                n if self.types.iter().any(|t| t == n) => Ok(Ty::base(n)),
                n => err(s, format!("unknown type `{n}`")),
            },
            Sexp::List(items, _) => {
                if items.len() < 3 || items[0].as_atom() != Some("->") {
                    return err(s, "expected `(-> a b ...)`");
                }
                let parts = items[1..].iter().map(|t| self.ty(t)).collect::<Result<Vec<_>, _>>()?;
                let (last, args) = parts.split_last().expect("nonempty");
                Ok(Ty::arrows(args.to_vec(), last.clone()))
            }
        }
    }

    fn formula(&mut self, s: &Sexp) -> Result<Expr, ParseError> {
        let e = self.expr(s)?;
        if e.ty().is_some_and(|t| t.is_o()) {
            Ok(e)
        } else {
            err(s, format!("`{e}` is not a formula"))
        }
    }

    fn lookup(&self, name: &str) -> Option<Expr> {
        if let Some(v) = self.bound.iter().rev().find(|v| v.name() == name) {
            return Some(Expr::var(v.clone()));
        }
        if let Some(v) = self.vars.iter().find(|v| v.name() == name) {
            return Some(Expr::var(v.clone()));
        }
        if let Some(c) = self.consts.get(name) {
            return Some(Expr::cnst(c.clone()));
        }
        let binop = || Ty::arrows([Ty::o(), Ty::o()], Ty::o());
        let ty = match name {
            "and" | "or" | "imp" => binop(),
            "not" => Ty::arrow(Ty::o(), Ty::o()),
            "top" | "bot" => Ty::o(),
            ZERO => Ty::nat(),
            SUCC => Ty::arrow(Ty::nat(), Ty::nat()),
            _ => return None,
        };
        Some(Expr::cnst(Const::new(name, ty)))
    }

    fn binder(&mut self, items: &[Sexp]) -> Result<(Var, Expr), ParseError> {
        let x = Var::new(self.name(&items[1])?, self.ty(&items[2])?);
        self.bound.push(x.clone());
        let body = self.expr(&items[3]);
        self.bound.pop();
        Ok((x, body?))
    }

    fn apply(&self, s: &Sexp, f: Expr, a: Expr) -> Result<Expr, ParseError> {
        let ok = match (f.ty().and_then(|t| t.as_arrow()), a.ty()) {
            (Some((dom, _)), Some(at)) => dom == at,
            _ => false,
        };
        if !ok {
            return err(s, format!("ill-typed application of `{f}` to `{a}`"));
        }
        Ok(Expr::app(f, a))
    }

    fn expr(&mut self, s: &Sexp) -> Result<Expr, ParseError> {
        let items = match s {
            Sexp::Atom(a, _) => {
                return self.lookup(a).map_or_else(|| err(s, format!("unknown identifier `{a}`")), Ok);
            }
            Sexp::List(items, _) => items,
        };
        let Some(head) = items.first() else {
            return err(s, "empty expression");
        };
        match (head.as_atom(), items.len()) {
            (Some("lam"), 4) => {
                let (x, body) = self.binder(items)?;
                Ok(Expr::abs(x, body))
            }
            (Some(q @ ("all" | "ex")), 4) => {
                let (x, body) = self.binder(items)?;
                if !body.ty().is_some_and(|t| t.is_o()) {
                    return err(&items[3], format!("quantifier body `{body}` is not a formula"));
                }
                Ok(if q == EX { Expr::ex(x, body) } else { Expr::all(x, body) })
            }
            (Some(q @ ("all" | "ex")), 2) => {
                let pred = self.expr(&items[1])?;
                let Some((alpha, _)) = pred.ty().and_then(|t| t.as_arrow()).filter(|(_, r)| r.is_o()) else {
                    return err(&items[1], format!("`{pred}` is not a predicate"));
                };
                let c = Expr::cnst(Const::new(q, quant_ty(alpha)));
                self.apply(s, c, pred)
            }
            (Some(EQ), 3) => {
                let a = self.expr(&items[1])?;
                let b = self.expr(&items[2])?;
                let Some(alpha) = a.ty().cloned() else {
                    return err(&items[1], "ill-typed operand of `=`");
                };
                let eq = Expr::cnst(Const::new(EQ, eq_ty(&alpha)));
                let partial = self.apply(s, eq, a)?;
                self.apply(s, partial, b)
            }
            (Some(h), 2) if h.starts_with("s^") => {
                let k: usize = h[2..]
                    .parse()
                    .map_err(|_| ParseError::new(head.pos(), format!("bad successor power `{h}`")))?;
                let t = self.expr(&items[1])?;
                if !t.ty().is_some_and(|t| t.is_nat()) {
                    return err(&items[1], format!("`{t}` is not a natural number"));
                }
                Ok(Expr::succ_n(k, t))
            }
            (Some(h @ ("lam" | "all" | "ex" | EQ)), _) => err(s, format!("wrong number of arguments to `{h}`")),
            _ => {
                if items.len() < 2 {
                    return err(s, "application needs an argument");
                }
                let mut f = self.expr(head)?;
                for a in &items[1..] {
                    let a = self.expr(a)?;
                    f = self.apply(s, f, a)?;
                }
                Ok(f)
            }
        }
    }

    fn eigen(&self, name: &Sexp, ty: &Sexp) -> Result<Var, ParseError> {
        Ok(Var::new(self.name(name)?, self.ty(ty)?))
    }

    fn scoped(&mut self, x: &Var, s: &Sexp) -> Result<Proof, ParseError> {
        self.bound.push(x.clone());
        let p = self.proof(s);
        self.bound.pop();
        p
    }

    fn proof(&mut self, s: &Sexp) -> Result<Proof, ParseError> {
        let (head, a, pos) = self.form(s)?;
        let want = match head {
            "Ax" => 2,
            "TopR" | "Rfl" => 1,
            "Cut" => 5,
            "NegL" | "NegR" => 3,
            "AndL" => 4,
            "AndR" => 5,
            "AllL" => 4,
            "AllR" => 5,
            "Eql" => 6,
            "Ind" => 10,
            _ => return Err(ParseError::new(pos, format!("unknown proof constructor `{head}`"))),
        };
        if a.len() != want {
            return Err(ParseError::new(pos, format!("`{head}` takes {want} arguments, got {}", a.len())));
        }
        let p = match head {
            "Ax" => Proof::ax(self.hyp(&a[0])?, self.hyp(&a[1])?),
            "TopR" => Proof::top_r(self.hyp(&a[0])?),
            "Rfl" => Proof::rfl(self.hyp(&a[0])?),
            "Cut" => {
                let f = self.formula(&a[0])?;
                Proof::cut(f, self.hyp(&a[1])?, self.proof(&a[2])?, self.hyp(&a[3])?, self.proof(&a[4])?)
            }
            "NegL" => Proof::neg_l(self.hyp(&a[0])?, self.hyp(&a[1])?, self.proof(&a[2])?),
            "NegR" => Proof::neg_r(self.hyp(&a[0])?, self.hyp(&a[1])?, self.proof(&a[2])?),
            "AndL" => Proof::and_l(self.hyp(&a[0])?, self.hyp(&a[1])?, self.hyp(&a[2])?, self.proof(&a[3])?),
            "AndR" => Proof::and_r(
                self.hyp(&a[0])?,
                self.hyp(&a[1])?,
                self.proof(&a[2])?,
                self.hyp(&a[3])?,
                self.proof(&a[4])?,
            ),
            "AllL" => {
                let t = self.expr(&a[1])?;
                Proof::all_l(self.hyp(&a[0])?, t, self.hyp(&a[2])?, self.proof(&a[3])?)
            }
            "AllR" => {
                let x = self.eigen(&a[1], &a[2])?;
                let sub = self.scoped(&x, &a[4])?;
                Proof::all_r(self.hyp(&a[0])?, x, self.hyp(&a[3])?, sub)
            }
            "Eql" => {
                let ltr = match a[2].as_atom() {
                    Some("true") => true,
                    Some("false") => false,
                    _ => return err(&a[2], "expected `true` or `false`"),
                };
                let ctx = self.expr(&a[3])?;
                Proof::eql(self.hyp(&a[0])?, self.hyp(&a[1])?, ltr, ctx, self.hyp(&a[4])?, self.proof(&a[5])?)
            }
            "Ind" => {
                let motive = self.expr(&a[1])?;
                let target = self.expr(&a[2])?;
                let base = self.proof(&a[4])?;
                let x = self.eigen(&a[5], &a[6])?;
                let step = self.scoped(&x, &a[9])?;
                Proof::ind(
                    self.hyp(&a[0])?,
                    motive,
                    target,
                    self.hyp(&a[3])?,
                    base,
                    x,
                    self.hyp(&a[7])?,
                    self.hyp(&a[8])?,
                    step,
                )
            }
            _ => unreachable!("constructor names were checked above"),
        };
        self.spans.insert(p.addr(), pos);
        Ok(p)
    }
}

struct Signature {
    types: BTreeSet<String>,
    consts: BTreeSet<Const>,
    vars: BTreeSet<Var>,
}

impl Signature {
    fn ty(&mut self, t: &Ty) {
        match t.kind() {
            TyKind::Base(n) => {
                if !BUILTIN_TYPES.contains(&&**n) {
                    self.types.insert(n.to_string());
                }
            }
            TyKind::Arrow(a, b) => {
                self.ty(a);
                self.ty(b);
            }
        }
    }

    fn expr(&mut self, e: &Expr) {
        match e.kind() {
            ExprKind::Var(v) => self.ty(v.ty()),
            ExprKind::Const(c) => {
                if !BUILTINS.contains(&c.name()) {
                    self.ty(c.ty());
                    self.consts.insert(c.clone());
                }
            }
            ExprKind::App(f, a) => {
                self.expr(f);
                self.expr(a);
            }
            ExprKind::Abs(x, b) => {
                self.ty(x.ty());
                self.expr(b);
            }
        }
    }

    fn proof(&mut self, p: &Proof) {
        let mut stack = vec![p];
        while let Some(q) = stack.pop() {
            for e in q.exprs() {
                self.expr(e);
            }
            if let ProofKind::AllR { eigen, .. } | ProofKind::Ind { eigen, .. } = q.kind() {
                self.ty(eigen.ty());
            }
            stack.extend(q.children());
        }
    }
}

impl Document {
    /// The declarations a proof and context need, in canonical order.
    pub fn new(proof: Proof, ctx: LocalContext, defs: Vec<Hyp>) -> Document {
        let mut sig = Signature {
            types: BTreeSet::new(),
            consts: BTreeSet::new(),
            vars: BTreeSet::new(),
        };
        for (_, f) in ctx.iter() {
            sig.expr(f);
        }
        sig.proof(&proof);
        sig.vars.extend(ctx.free_vars().iter().cloned());
        sig.vars.extend(proof.free_vars().iter().cloned());
        for v in &sig.vars.clone() {
            sig.ty(v.ty());
        }
        Document {
            types: sig.types.into_iter().collect(),
            consts: sig.consts.into_iter().collect(),
            vars: sig.vars.into_iter().collect(),
            defs,
            ctx,
            proof,
        }
    }

    pub fn from_generated(g: &Generated) -> Document {
        let defs = g.defs.as_ref().map(|d| d.hyps()).unwrap_or_default();
        Document::new(g.proof.clone(), g.ctx.clone(), defs)
    }

    /// The same header around a different proof of the same context.
    pub fn with_proof(&self, proof: Proof) -> Document {
        let fresh = Document::new(proof.clone(), self.ctx.clone(), self.defs.clone());
        let mut out = self.clone();
        out.proof = proof;
        for t in fresh.types {
            if !out.types.contains(&t) {
                out.types.push(t);
            }
        }
        for c in fresh.consts {
            if !out.consts.contains(&c) {
                out.consts.push(c);
            }
        }
        for v in fresh.vars {
            if !out.vars.contains(&v) {
                out.vars.push(v);
            }
        }
        out
    }

    pub fn definitions(&self) -> Result<RecursiveDefinitions, String> {
        RecursiveDefinitions::from_context(&self.ctx, &self.defs).map_err(|e| e.to_string())
    }

    pub fn generated(&self) -> Result<Generated, String> {
        let defs = if self.defs.is_empty() { None } else { Some(self.definitions()?) };
        Ok(Generated {
            proof: self.proof.clone(),
            ctx: self.ctx.clone(),
            defs,
        })
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for t in &self.types {
            writeln!(out, "(type {t})")?;
        }
        for c in &self.consts {
            writeln!(out, "(const {} {})", c.name(), c.ty())?;
        }
        for v in &self.vars {
            writeln!(out, "(var {} {})", v.name(), v.ty())?;
        }
        for h in &self.defs {
            writeln!(out, "(def {})", h.value())?;
        }
        for (h, e) in self.ctx.iter() {
            writeln!(out, "(hyp {} {e})", h.value())?;
        }
        writeln!(out, "(proof {})", self.proof)?;
        f.write_str(&out)
    }
}

/// Whitespace-insensitive form of a document text, for comparisons.
pub fn normalize_whitespace(src: &str) -> String {
    let mut out = String::new();
    for (tok, _) in crate::sexp::tokenize(src) {
        match tok {
            crate::sexp::Token::Open => out.push('('),
            crate::sexp::Token::Close => {
                if out.ends_with(' ') {
                    out.pop();
                }
                out.push(')');
            }
            crate::sexp::Token::Atom(a) => {
                out.push_str(&a);
                out.push(' ');
            }
        }
    }
    out.trim_end().to_string()
}
