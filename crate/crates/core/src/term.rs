//! Simply-typed lambda expressions of the object language.
//!
//! Terms, formulas and quantifier bodies are all [`Expr`]s. Expressions are
//! immutable, reference counted and carry a cached structural hash, their
//! type, their free variables and a flag recording whether they are already
//! in β-normal form.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, LazyLock};

use thiserror::Error;

use crate::set::FrozenSet;

/// A simple type: a base type or an arrow.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ty(Arc<TyKind>);

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum TyKind {
    Base(Arc<str>),
    Arrow(Ty, Ty),
}

static TY_O: LazyLock<Ty> = LazyLock::new(|| Ty::base("o"));
static TY_I: LazyLock<Ty> = LazyLock::new(|| Ty::base("i"));
static TY_NAT: LazyLock<Ty> = LazyLock::new(|| Ty::base("nat"));

impl Ty {
    pub fn base(name: &str) -> Ty {
        Ty(Arc::new(TyKind::Base(Arc::from(name))))
    }

    pub fn arrow(from: Ty, to: Ty) -> Ty {
        Ty(Arc::new(TyKind::Arrow(from, to)))
    }

    /// `a1 -> a2 -> ... -> result`
    pub fn arrows(args: impl IntoIterator<Item = Ty, IntoIter: DoubleEndedIterator>, result: Ty) -> Ty {
        args.into_iter().rev().fold(result, |acc, a| Ty::arrow(a, acc))
    }

    /// Booleans.
    pub fn o() -> Ty {
        TY_O.clone()
    }

    /// Individuals.
    pub fn i() -> Ty {
        TY_I.clone()
    }

    pub fn nat() -> Ty {
        TY_NAT.clone()
    }

    pub fn kind(&self) -> &TyKind {
        &self.0
    }

    pub fn is_o(&self) -> bool {
        matches!(&*self.0, TyKind::Base(n) if &**n == "o")
    }

    pub fn is_nat(&self) -> bool {
        matches!(&*self.0, TyKind::Base(n) if &**n == "nat")
    }

    pub fn as_arrow(&self) -> Option<(&Ty, &Ty)> {
        match &*self.0 {
            TyKind::Arrow(a, b) => Some((a, b)),
            TyKind::Base(_) => None,
        }
    }

    /// The final codomain after stripping all arrows.
    pub fn result(&self) -> &Ty {
        let mut t = self;
        while let Some((_, b)) = t.as_arrow() {
            t = b;
        }
        t
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            TyKind::Base(n) => write!(f, "{n}"),
            TyKind::Arrow(a, b) => {
                write!(f, "(-> {a}")?;
                let mut rest = b;
                while let Some((x, y)) = rest.as_arrow() {
                    write!(f, " {x}")?;
                    rest = y;
                }
                write!(f, " {rest})")
            }
        }
    }
}

impl fmt::Debug for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A typed variable. Two variables are the same iff name and type agree.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    name: Arc<str>,
    ty: Ty,
}

impl Var {
    pub fn new(name: &str, ty: Ty) -> Var {
        Var {
            name: Arc::from(name),
            ty,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ty(&self) -> &Ty {
        &self.ty
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.ty)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A typed constant.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Const {
    name: Arc<str>,
    ty: Ty,
}

impl Const {
    pub fn new(name: &str, ty: Ty) -> Const {
        Const {
            name: Arc::from(name),
            ty,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ty(&self) -> &Ty {
        &self.ty
    }
}

impl fmt::Debug for Const {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.ty)
    }
}

pub type VarSet = FrozenSet<Var>;

#[derive(Clone, PartialEq, Eq)]
pub enum ExprKind {
    Var(Var),
    Const(Const),
    App(Expr, Expr),
    Abs(Var, Expr),
}

struct ExprNode {
    kind: ExprKind,
    /// `None` for ill-typed applications.
    ty: Option<Ty>,
    hash: u64,
    free: VarSet,
    normal: bool,
    /// One bit per constant name occurring below, by name hash.
    consts: u64,
}

/// An immutable, shared lambda expression.
#[derive(Clone)]
pub struct Expr(Arc<ExprNode>);

fn mix(a: u64, b: u64) -> u64 {
    (a.rotate_left(5) ^ b).wrapping_mul(0x517c_c1b7_2722_0a95)
}

fn hash_str(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

fn const_bit(name: &str) -> u64 {
    1 << (hash_str(name) % 64)
}

fn hash_ty(t: &Ty) -> u64 {
    match t.kind() {
        TyKind::Base(n) => hash_str(n),
        TyKind::Arrow(a, b) => mix(mix(7, hash_ty(a)), hash_ty(b)),
    }
}

impl Expr {
    fn mk(kind: ExprKind) -> Expr {
        let consts = match &kind {
            ExprKind::Var(_) => 0,
            ExprKind::Const(c) => const_bit(&c.name),
            ExprKind::App(f, a) => f.0.consts | a.0.consts,
            ExprKind::Abs(_, b) => b.0.consts,
        };
        let (ty, hash, free, normal) = match &kind {
            ExprKind::Var(v) => (
                Some(v.ty.clone()),
                mix(mix(1, hash_str(&v.name)), hash_ty(&v.ty)),
                VarSet::singleton(v.clone()),
                true,
            ),
            ExprKind::Const(c) => (
                Some(c.ty.clone()),
                mix(mix(2, hash_str(&c.name)), hash_ty(&c.ty)),
                VarSet::empty(),
                true,
            ),
            ExprKind::App(f, a) => {
                let ty = match (f.ty().and_then(|t| t.as_arrow()), a.ty()) {
                    (Some((dom, cod)), Some(at)) if dom == at => Some(cod.clone()),
                    _ => None,
                };
                let normal = f.is_beta_normal() && a.is_beta_normal() && !f.is_abs();
                (
                    ty,
                    mix(mix(3, f.0.hash), a.0.hash),
                    f.free_vars().union(a.free_vars()),
                    normal,
                )
            }
            ExprKind::Abs(x, body) => (
                body.ty().map(|b| Ty::arrow(x.ty.clone(), b.clone())),
                mix(mix(mix(4, hash_str(&x.name)), hash_ty(&x.ty)), body.0.hash),
                body.free_vars().remove(x),
                body.is_beta_normal(),
            ),
        };
        Expr(Arc::new(ExprNode {
            kind,
            ty,
            hash,
            free,
            normal,
            consts,
        }))
    }

    pub fn var(v: Var) -> Expr {
        Expr::mk(ExprKind::Var(v))
    }

    pub fn cnst(c: Const) -> Expr {
        Expr::mk(ExprKind::Const(c))
    }

    pub fn app(f: Expr, a: Expr) -> Expr {
        Expr::mk(ExprKind::App(f, a))
    }

    pub fn apps(f: Expr, args: impl IntoIterator<Item = Expr>) -> Expr {
        args.into_iter().fold(f, Expr::app)
    }

    pub fn abs(x: Var, body: Expr) -> Expr {
        Expr::mk(ExprKind::Abs(x, body))
    }

    pub fn kind(&self) -> &ExprKind {
        &self.0.kind
    }

    /// Cached type; `None` when the expression contains an ill-typed application.
    pub fn ty(&self) -> Option<&Ty> {
        self.0.ty.as_ref()
    }

    pub fn free_vars(&self) -> &VarSet {
        &self.0.free
    }

    pub fn is_beta_normal(&self) -> bool {
        self.0.normal
    }

    pub fn is_closed(&self) -> bool {
        self.0.free.is_empty()
    }

    pub fn ptr_eq(&self, other: &Expr) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    fn is_abs(&self) -> bool {
        matches!(self.0.kind, ExprKind::Abs(..))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match &self.0.kind {
            ExprKind::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_const(&self) -> Option<&Const> {
        match &self.0.kind {
            ExprKind::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Splits an application spine into head and arguments.
    pub fn strip_app(&self) -> (&Expr, Vec<&Expr>) {
        let mut args = Vec::new();
        let mut e = self;
        while let ExprKind::App(f, a) = &e.0.kind {
            args.push(a);
            e = f;
        }
        args.reverse();
        (e, args)
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match &self.0.kind {
            ExprKind::Var(_) | ExprKind::Const(_) => 1,
            ExprKind::App(f, a) => 1 + f.size() + a.size(),
            ExprKind::Abs(_, b) => 1 + b.size(),
        }
    }

    pub fn contains_const(&self, name: &str) -> bool {
        self.contains_const_bit(name, const_bit(name))
    }

    fn contains_const_bit(&self, name: &str, bit: u64) -> bool {
        if self.0.consts & bit == 0 {
            return false;
        }
        match &self.0.kind {
            ExprKind::Var(_) => false,
            ExprKind::Const(c) => c.name() == name,
            ExprKind::App(f, a) => f.contains_const_bit(name, bit) || a.contains_const_bit(name, bit),
            ExprKind::Abs(_, b) => b.contains_const_bit(name, bit),
        }
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Expr) -> bool {
        self.ptr_eq(other) || (self.0.hash == other.0.hash && self.0.kind == other.0.kind)
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash)
    }
}

impl From<Var> for Expr {
    fn from(v: Var) -> Expr {
        Expr::var(v)
    }
}

impl From<Const> for Expr {
    fn from(c: Const) -> Expr {
        Expr::cnst(c)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("type mismatch in {location}: argument has type {found}, expected {expected}")]
    TypeMismatch {
        location: String,
        expected: Ty,
        found: Ty,
    },
    #[error("{location} applies a non-function of type {ty}")]
    NotAFunction { location: String, ty: Ty },
    #[error("substitution of {var:?} by an expression of type {found:?}")]
    SubstitutionType { var: Var, found: Option<Ty> },
}

/// Returns the type of `e`, locating the innermost ill-typed application otherwise.
pub fn infer_type(e: &Expr) -> Result<Ty, TermError> {
    if let Some(t) = e.ty() {
        return Ok(t.clone());
    }
    match e.kind() {
        ExprKind::App(f, a) => {
            let ft = infer_type(f)?;
            let at = infer_type(a)?;
            match ft.as_arrow() {
                Some((dom, _)) => Err(TermError::TypeMismatch {
                    location: e.to_string(),
                    expected: dom.clone(),
                    found: at,
                }),
                None => Err(TermError::NotAFunction {
                    location: e.to_string(),
                    ty: ft,
                }),
            }
        }
        ExprKind::Abs(_, b) => infer_type(b),
        ExprKind::Var(_) | ExprKind::Const(_) => unreachable!("atoms are always typed"),
    }
}

/// A type-preserving finite map from variables to expressions.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<Var, Expr>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn single(v: Var, e: Expr) -> Result<Substitution, TermError> {
        let mut s = Substitution::new();
        s.insert(v, e)?;
        Ok(s)
    }

    /// Adds `v ↦ e`, rejecting bindings that change the type.
    pub fn insert(&mut self, v: Var, e: Expr) -> Result<(), TermError> {
        if e.ty() != Some(v.ty()) {
            return Err(TermError::SubstitutionType {
                var: v,
                found: e.ty().cloned(),
            });
        }
        self.map.insert(v, e);
        Ok(())
    }

    /// A variable-for-variable binding; always type-preserving when types agree.
    pub(crate) fn insert_unchecked(&mut self, v: Var, e: Expr) {
        self.map.insert(v, e);
    }

    pub fn remove(&mut self, v: &Var) -> Option<Expr> {
        self.map.remove(v)
    }

    pub fn get(&self, v: &Var) -> Option<&Expr> {
        self.map.get(v)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Expr)> {
        self.map.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.map.keys()
    }

    /// Whether applying the substitution to something with these free
    /// variables could change it.
    pub fn touches(&self, free: &VarSet) -> bool {
        if self.map.len() <= free.len() {
            self.map.keys().any(|k| free.contains(k))
        } else {
            free.iter().any(|v| self.map.contains_key(v))
        }
    }

    /// Free variables of the range, restricted to bindings whose key is in `free`.
    pub fn range_vars_on(&self, free: &VarSet) -> VarSet {
        let mut acc = VarSet::empty();
        for (k, e) in &self.map {
            if free.contains(k) {
                acc = acc.union(e.free_vars());
            }
        }
        acc
    }

    /// Free variables of the entire range.
    pub fn range_vars(&self) -> VarSet {
        self.map
            .values()
            .fold(VarSet::empty(), |acc, e| acc.union(e.free_vars()))
    }

    /// The bindings relevant for something with free variables `free`,
    /// excluding `bound`.
    pub(crate) fn restrict(&self, free: &VarSet, bound: &Var) -> Substitution {
        let map = self
            .map
            .iter()
            .filter(|(k, _)| *k != bound && free.contains(k))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Substitution { map }
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (k, v)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}\\{v}")?;
        }
        f.write_str("]")
    }
}

/// A variant of `v` whose name does not clash with any name in `avoid`.
///
/// Names are freshened by a numeric suffix: `x`, `x_1`, `x_2`, ...
pub fn fresh_variant<'a>(v: &Var, avoid: impl IntoIterator<Item = &'a Var>) -> Var {
    let taken: HashSet<&str> = avoid.into_iter().map(|a| a.name()).collect();
    fresh_variant_by(v, |n| taken.contains(n))
}

pub(crate) fn fresh_variant_by(v: &Var, taken: impl Fn(&str) -> bool) -> Var {
    if !taken(v.name()) {
        return v.clone();
    }
    let base = match v.name().rsplit_once('_') {
        Some((b, suffix)) if !b.is_empty() && suffix.bytes().all(|c| c.is_ascii_digit()) && !suffix.is_empty() => b,
        _ => v.name(),
    };
    (1u64..)
        .map(|k| format!("{base}_{k}"))
        .find(|n| !taken(n))
        .map(|n| Var::new(&n, v.ty().clone()))
        .expect("infinitely many candidate names")
}

/// Free variables of `e`.
pub fn free_expr_vars(e: &Expr) -> &VarSet {
    e.free_vars()
}

/// Capture-avoiding simultaneous substitution.
pub fn subst_apply(e: &Expr, s: &Substitution) -> Expr {
    if s.is_empty() || !s.touches(e.free_vars()) {
        return e.clone();
    }
    match e.kind() {
        ExprKind::Var(v) => s.get(v).cloned().unwrap_or_else(|| e.clone()),
        ExprKind::Const(_) => e.clone(),
        ExprKind::App(f, a) => Expr::app(subst_apply(f, s), subst_apply(a, s)),
        ExprKind::Abs(x, body) => {
            let mut inner = s.restrict(body.free_vars(), x);
            if inner.is_empty() {
                return e.clone();
            }
            let range = inner.range_vars();
            if range.contains(x) {
                let taken: Vec<Var> = range
                    .iter()
                    .chain(body.free_vars().iter())
                    .chain(inner.domain())
                    .cloned()
                    .collect();
                let x2 = fresh_variant(x, &taken);
                inner.insert_unchecked(x.clone(), Expr::var(x2.clone()));
                Expr::abs(x2, subst_apply(body, &inner))
            } else {
                Expr::abs(x.clone(), subst_apply(body, &inner))
            }
        }
    }
}

/// β-normal form, computed leftmost-outermost.
///
/// Subterms already flagged as normal are returned without traversal.
pub fn beta_normalize(e: &Expr) -> Expr {
    if e.is_beta_normal() {
        return e.clone();
    }
    match e.kind() {
        ExprKind::App(f, a) => {
            let f = beta_normalize(f);
            if let ExprKind::Abs(x, body) = f.kind() {
                let s = {
                    let mut s = Substitution::new();
                    s.insert_unchecked(x.clone(), a.clone());
                    s
                };
                beta_normalize(&subst_apply(body, &s))
            } else {
                Expr::app(f, beta_normalize(a))
            }
        }
        ExprKind::Abs(x, body) => Expr::abs(x.clone(), beta_normalize(body)),
        ExprKind::Var(_) | ExprKind::Const(_) => e.clone(),
    }
}

/// Equality up to renaming of bound variables (no β).
pub fn alpha_eq(a: &Expr, b: &Expr) -> bool {
    fn go(a: &Expr, b: &Expr, env: &mut Vec<(Var, Var)>) -> bool {
        if env.is_empty() && a == b {
            return true;
        }
        match (a.kind(), b.kind()) {
            (ExprKind::Var(x), ExprKind::Var(y)) => {
                for (l, r) in env.iter().rev() {
                    if l == x || r == y {
                        return l == x && r == y;
                    }
                }
                x == y
            }
            (ExprKind::Const(c), ExprKind::Const(d)) => c == d,
            (ExprKind::App(f, x), ExprKind::App(g, y)) => go(f, g, env) && go(x, y, env),
            (ExprKind::Abs(x, bx), ExprKind::Abs(y, by)) => {
                if x.ty() != y.ty() {
                    return false;
                }
                env.push((x.clone(), y.clone()));
                let r = go(bx, by, env);
                env.pop();
                r
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new())
}

/// αβ-equality: β-normal forms equal up to bound-variable renaming.
pub fn alpha_beta_eq(a: &Expr, b: &Expr) -> bool {
    a == b || alpha_eq(&beta_normalize(a), &beta_normalize(b))
}

/// Applies `pred` to `arg` and β-normalizes.
pub fn instantiate(pred: &Expr, arg: &Expr) -> Expr {
    if let ExprKind::Abs(x, body) = pred.kind() {
        let mut s = Substitution::new();
        s.insert_unchecked(x.clone(), arg.clone());
        beta_normalize(&subst_apply(body, &s))
    } else {
        beta_normalize(&Expr::app(pred.clone(), arg.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Expr {
        Expr::cnst(Const::new("P", Ty::arrow(Ty::i(), Ty::o())))
    }
    fn x() -> Var {
        Var::new("x", Ty::i())
    }
    fn y() -> Var {
        Var::new("y", Ty::i())
    }

    #[test]
    fn infer_type_examples() {
        assert_eq!(infer_type(&Expr::var(x())).unwrap(), Ty::i());
        let and = Expr::cnst(Const::new("and", Ty::arrows([Ty::o(), Ty::o()], Ty::o())));
        let pa = Expr::cnst(Const::new("Q", Ty::o()));
        assert_eq!(infer_type(&Expr::app(and, pa)).unwrap(), Ty::arrow(Ty::o(), Ty::o()));
        let f = Expr::cnst(Const::new("f", Ty::arrow(Ty::i(), Ty::i())));
        let bad = Expr::app(f, Expr::var(Var::new("x", Ty::o())));
        assert!(matches!(infer_type(&bad), Err(TermError::TypeMismatch { .. })));
    }

    #[test]
    fn substitution_avoids_capture() {
        let f = Expr::cnst(Const::new("f", Ty::arrows([Ty::i(), Ty::i()], Ty::i())));
        let lam = Expr::abs(x(), Expr::apps(f.clone(), [Expr::var(x()), Expr::var(y())]));
        let s = Substitution::single(y(), Expr::var(x())).unwrap();
        let r = subst_apply(&lam, &s);
        let ExprKind::Abs(b, _) = r.kind() else { panic!() };
        assert_ne!(b, &x());
        assert_eq!(b.name(), "x_1");
        let z = Var::new("z", Ty::i());
        let expected = Expr::abs(z.clone(), Expr::apps(f, [Expr::var(z), Expr::var(x())]));
        assert!(alpha_eq(&r, &expected));
    }

    #[test]
    fn substitution_identity_and_ground() {
        let px = Expr::app(p(), Expr::var(x()));
        assert!(subst_apply(&px, &Substitution::new()).ptr_eq(&px));
        let zero = Expr::cnst(Const::new("0", Ty::i()));
        let s = Substitution::single(x(), zero.clone()).unwrap();
        assert_eq!(subst_apply(&px, &s), Expr::app(p(), zero));
        assert!(Substitution::single(x(), Expr::cnst(Const::new("c", Ty::o()))).is_err());
    }

    #[test]
    fn beta_and_alpha() {
        let c = Expr::cnst(Const::new("c", Ty::i()));
        let redex = Expr::app(Expr::abs(x(), Expr::app(p(), Expr::var(x()))), c.clone());
        assert!(!redex.is_beta_normal());
        assert_eq!(beta_normalize(&redex), Expr::app(p(), c.clone()));
        let n = Expr::app(p(), c.clone());
        assert!(beta_normalize(&n).ptr_eq(&n));
        let lx = Expr::abs(x(), Expr::app(p(), Expr::var(x())));
        let ly = Expr::abs(y(), Expr::app(p(), Expr::var(y())));
        assert!(alpha_beta_eq(&lx, &ly));
        assert!(alpha_beta_eq(&redex, &Expr::app(p(), c)));
        let a = Expr::cnst(Const::new("a", Ty::i()));
        let b = Expr::cnst(Const::new("b", Ty::i()));
        assert!(!alpha_beta_eq(&Expr::app(p(), a), &Expr::app(p(), b)));
    }

    #[test]
    fn fresh_variants() {
        assert_eq!(fresh_variant(&x(), []), x());
        assert_eq!(fresh_variant(&x(), [&x()]).name(), "x_1");
        let x1 = Var::new("x_1", Ty::i());
        assert_eq!(fresh_variant(&x(), [&x(), &x1]).name(), "x_2");
    }

    #[test]
    fn free_vars_of_abstraction() {
        let q = Expr::cnst(Const::new("Q", Ty::arrows([Ty::i(), Ty::i()], Ty::o())));
        let e = Expr::abs(x(), Expr::apps(q, [Expr::var(x()), Expr::var(y())]));
        assert_eq!(free_expr_vars(&e).as_slice(), &[y()]);
    }
}
