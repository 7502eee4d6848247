//! Logical connectives, quantifiers, numerals and the surface printer.
//!
//! Connectives are ordinary constants; a [`FormulaView`] reads the top-level
//! connective of a formula.

use std::fmt;
use std::sync::LazyLock;

use crate::term::{instantiate, Const, Expr, ExprKind, Ty, Var};

pub const AND: &str = "and";
pub const OR: &str = "or";
pub const IMP: &str = "imp";
pub const NOT: &str = "not";
pub const TOP: &str = "top";
pub const BOT: &str = "bot";
pub const EQ: &str = "=";
pub const ALL: &str = "all";
pub const EX: &str = "ex";
pub const ZERO: &str = "0";
pub const SUCC: &str = "s";

/// Names reserved for built-in constants.
pub const BUILTINS: &[&str] = &[AND, OR, IMP, NOT, TOP, BOT, EQ, ALL, EX, ZERO, SUCC];

fn binop_ty() -> Ty {
    Ty::arrows([Ty::o(), Ty::o()], Ty::o())
}

static C_AND: LazyLock<Expr> = LazyLock::new(|| Expr::cnst(Const::new(AND, binop_ty())));
static C_OR: LazyLock<Expr> = LazyLock::new(|| Expr::cnst(Const::new(OR, binop_ty())));
static C_IMP: LazyLock<Expr> = LazyLock::new(|| Expr::cnst(Const::new(IMP, binop_ty())));
static C_NOT: LazyLock<Expr> =
    LazyLock::new(|| Expr::cnst(Const::new(NOT, Ty::arrow(Ty::o(), Ty::o()))));
static C_TOP: LazyLock<Expr> = LazyLock::new(|| Expr::cnst(Const::new(TOP, Ty::o())));
static C_BOT: LazyLock<Expr> = LazyLock::new(|| Expr::cnst(Const::new(BOT, Ty::o())));
static C_ZERO: LazyLock<Expr> = LazyLock::new(|| Expr::cnst(Const::new(ZERO, Ty::nat())));
static C_SUCC: LazyLock<Expr> =
    LazyLock::new(|| Expr::cnst(Const::new(SUCC, Ty::arrow(Ty::nat(), Ty::nat()))));

/// Type of `=` at `alpha`.
pub fn eq_ty(alpha: &Ty) -> Ty {
    Ty::arrows([alpha.clone(), alpha.clone()], Ty::o())
}

/// Type of the quantifier constants at `alpha`.
pub fn quant_ty(alpha: &Ty) -> Ty {
    Ty::arrow(Ty::arrow(alpha.clone(), Ty::o()), Ty::o())
}

impl Expr {
    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::apps(C_AND.clone(), [a, b])
    }

    pub fn or(a: Expr, b: Expr) -> Expr {
        Expr::apps(C_OR.clone(), [a, b])
    }

    pub fn imp(a: Expr, b: Expr) -> Expr {
        Expr::apps(C_IMP.clone(), [a, b])
    }

    pub fn not(a: Expr) -> Expr {
        Expr::app(C_NOT.clone(), a)
    }

    pub fn top() -> Expr {
        C_TOP.clone()
    }

    pub fn bot() -> Expr {
        C_BOT.clone()
    }

    /// `a = b`; the equality constant is instantiated at the type of `a`.
    pub fn eq(a: Expr, b: Expr) -> Expr {
        let alpha = a.ty().cloned().unwrap_or_else(Ty::i);
        Expr::apps(Expr::cnst(Const::new(EQ, eq_ty(&alpha))), [a, b])
    }

    pub fn all(x: Var, body: Expr) -> Expr {
        let q = Expr::cnst(Const::new(ALL, quant_ty(x.ty())));
        Expr::app(q, Expr::abs(x, body))
    }

    pub fn ex(x: Var, body: Expr) -> Expr {
        let q = Expr::cnst(Const::new(EX, quant_ty(x.ty())));
        Expr::app(q, Expr::abs(x, body))
    }

    /// Quantifier applied to an arbitrary predicate expression.
    pub fn quant(universal: bool, pred: Expr) -> Expr {
        let alpha = pred
            .ty()
            .and_then(|t| t.as_arrow())
            .map(|(a, _)| a.clone())
            .unwrap_or_else(Ty::i);
        let name = if universal { ALL } else { EX };
        Expr::app(Expr::cnst(Const::new(name, quant_ty(&alpha))), pred)
    }

    pub fn zero() -> Expr {
        C_ZERO.clone()
    }

    pub fn succ(t: Expr) -> Expr {
        Expr::app(C_SUCC.clone(), t)
    }

    /// `s^k(t)`
    pub fn succ_n(k: usize, t: Expr) -> Expr {
        (0..k).fold(t, |acc, _| Expr::succ(acc))
    }

    /// The numeral `s^k(0)`.
    pub fn numeral(k: usize) -> Expr {
        Expr::succ_n(k, Expr::zero())
    }
}

/// The top-level logical structure of a formula.
#[derive(Debug, Clone, Copy)]
pub enum FormulaView<'a> {
    Top,
    Bot,
    Not(&'a Expr),
    And(&'a Expr, &'a Expr),
    Or(&'a Expr, &'a Expr),
    Imp(&'a Expr, &'a Expr),
    Eq(&'a Expr, &'a Expr),
    /// Universal quantifier over the given predicate (usually a lambda).
    All(&'a Expr),
    Ex(&'a Expr),
    Atom,
}

pub fn view(e: &Expr) -> FormulaView<'_> {
    match e.kind() {
        ExprKind::Const(c) => match c.name() {
            TOP => FormulaView::Top,
            BOT => FormulaView::Bot,
            _ => FormulaView::Atom,
        },
        ExprKind::App(f, b) => match f.kind() {
            ExprKind::Const(c) => match c.name() {
                NOT => FormulaView::Not(b),
                ALL => FormulaView::All(b),
                EX => FormulaView::Ex(b),
                _ => FormulaView::Atom,
            },
            ExprKind::App(g, a) => match g.as_const().map(|c| c.name()) {
                Some(AND) => FormulaView::And(a, b),
                Some(OR) => FormulaView::Or(a, b),
                Some(IMP) => FormulaView::Imp(a, b),
                Some(EQ) => FormulaView::Eq(a, b),
                _ => FormulaView::Atom,
            },
            _ => FormulaView::Atom,
        },
        _ => FormulaView::Atom,
    }
}

/// Not headed by a connective or quantifier; equations, ⊤ and ⊥ count as atoms.
pub fn is_atomic(e: &Expr) -> bool {
    matches!(
        view(e),
        FormulaView::Atom | FormulaView::Eq(..) | FormulaView::Top | FormulaView::Bot
    )
}

pub fn is_quantifier_free(e: &Expr) -> bool {
    !e.contains_const(ALL) && !e.contains_const(EX)
}

/// Instance of a quantified formula's body at `t`.
pub fn instantiate_quantifier(pred: &Expr, t: &Expr) -> Expr {
    instantiate(pred, t)
}

/// The bound variable type of a quantifier predicate.
pub fn quantifier_domain(pred: &Expr) -> Option<&Ty> {
    pred.ty().and_then(|t| t.as_arrow()).map(|(a, _)| a)
}

/// If `e` is `s^k(0)`, returns `k`.
pub fn as_numeral(e: &Expr) -> Option<usize> {
    let mut k = 0;
    let mut cur = e;
    loop {
        match cur.kind() {
            ExprKind::Const(c) if c.name() == ZERO => return Some(k),
            ExprKind::App(f, a) if f.as_const().is_some_and(|c| c.name() == SUCC) => {
                k += 1;
                cur = a;
            }
            _ => return None,
        }
    }
}

/// Built only from `0` and `s`.
pub fn is_constructor_form(e: &Expr) -> bool {
    as_numeral(e).is_some()
}

fn fmt_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e.kind() {
        ExprKind::Var(v) => write!(f, "{}", v.name()),
        ExprKind::Const(c) => write!(f, "{}", c.name()),
        ExprKind::Abs(x, body) => {
            write!(f, "(lam {} {} ", x.name(), x.ty())?;
            fmt_expr(body, f)?;
            f.write_str(")")
        }
        ExprKind::App(head, arg) => {
            if let Some(c) = head.as_const() {
                if c.name() == SUCC {
                    let mut k = 1;
                    let mut inner = arg;
                    while let ExprKind::App(h, a) = inner.kind() {
                        if h.as_const().is_some_and(|c| c.name() == SUCC) {
                            k += 1;
                            inner = a;
                        } else {
                            break;
                        }
                    }
                    if k >= 2 {
                        write!(f, "(s^{k} ")?;
                        fmt_expr(inner, f)?;
                        return f.write_str(")");
                    }
                }
                if (c.name() == ALL || c.name() == EX) && !arg.ty().is_none() {
                    if let ExprKind::Abs(x, body) = arg.kind() {
                        write!(f, "({} {} {} ", c.name(), x.name(), x.ty())?;
                        fmt_expr(body, f)?;
                        return f.write_str(")");
                    }
                }
            }
            let (h, args) = e.strip_app();
            f.write_str("(")?;
            fmt_expr(h, f)?;
            for a in args {
                f.write_str(" ")?;
                fmt_expr(a, f)?;
            }
            f.write_str(")")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_expr(self, f)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_expr(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{alpha_beta_eq, beta_normalize};

    #[test]
    fn views_and_printing() {
        let x = Var::new("x", Ty::nat());
        let p = Expr::cnst(Const::new("P", Ty::arrow(Ty::nat(), Ty::o())));
        let px = Expr::app(p.clone(), Expr::var(x.clone()));
        let f = Expr::all(x.clone(), Expr::imp(px.clone(), Expr::app(p.clone(), Expr::succ(Expr::var(x.clone())))));
        assert_eq!(f.to_string(), "(all x nat (imp (P x) (P (s x))))");
        assert!(matches!(view(&f), FormulaView::All(_)));
        assert!(!is_quantifier_free(&f));
        assert!(is_atomic(&px));
        assert_eq!(Expr::numeral(3).to_string(), "(s^3 0)");
        assert_eq!(as_numeral(&Expr::numeral(5)), Some(5));
        assert_eq!(f.ty(), Some(&Ty::o()));
    }

    #[test]
    fn beta_under_quantifier() {
        // (λy. ∀x P(x, y)) 0  ~>  ∀x P(x, 0)
        let x = Var::new("x", Ty::nat());
        let y = Var::new("y", Ty::nat());
        let p = Expr::cnst(Const::new("P", Ty::arrows([Ty::nat(), Ty::nat()], Ty::o())));
        let body = Expr::all(x.clone(), Expr::apps(p.clone(), [Expr::var(x.clone()), Expr::var(y.clone())]));
        let redex = Expr::app(Expr::abs(y, body), Expr::zero());
        let expected = Expr::all(x.clone(), Expr::apps(p, [Expr::var(x), Expr::zero()]));
        assert_eq!(beta_normalize(&redex), expected);
        assert!(alpha_beta_eq(&redex, &expected));
    }
}
