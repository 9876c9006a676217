//! First-order formulas over the reals with optional `exp` and bounded
//! `sin`/`cos`, their S-expression syntax, an SMT-LIB rendering and a small
//! three-valued checker.
//!
//! Grammar:
//!
//! ```text
//! formula := (formula :theory THEORY :free (VAR*) F)
//! THEORY  := r0 | rexp | rexpsin
//! F       := true | false
//!          | (< T T) | (<= T T) | (= T T) | (!= T T)
//!          | (and F*) | (or F*) | (not F) | (=> F F)
//!          | (exists (BINDER+) F) | (forall (BINDER+) F)
//! BINDER  := (VAR) | (VAR LO HI)          open range, `_` for no bound
//! T       := RATIONAL | VAR | (+ T*) | (* T*) | (- T) | (^ T NAT)
//!          | (exp T) | (sin T B) | (cos T B)     B: rational bound on |T|
//!          | (alg (C0 C1 ... CD) LO HI)          root of sum C_i x^i in [LO, HI]
//! ```

use crate::algnum::{format_rational, parse_rational, AlgReal, DyInterval, Poly};
use crate::{ReachError, Result};
use rug::Rational;
use std::collections::HashMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Theory {
    R0,
    Rexp,
    RexpSin,
}

impl Theory {
    pub fn name(&self) -> &'static str {
        match self {
            Theory::R0 => "r0",
            Theory::Rexp => "rexp",
            Theory::RexpSin => "rexpsin",
        }
    }

    pub fn parse(s: &str) -> Option<Theory> {
        match s.to_ascii_lowercase().as_str() {
            "r0" => Some(Theory::R0),
            "rexp" => Some(Theory::Rexp),
            "rexpsin" => Some(Theory::RexpSin),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    Var(String),
    Num(Rational),
    Alg(AlgReal),
    Add(Vec<Term>),
    Mul(Vec<Term>),
    Neg(Box<Term>),
    Pow(Box<Term>, u32),
    Exp(Box<Term>),
    /// `sin` restricted to arguments with `|arg| <= bound`.
    Sin(Box<Term>, Rational),
    Cos(Box<Term>, Rational),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn int(v: i64) -> Term {
        Term::Num(Rational::from(v))
    }

    pub fn rat(q: Rational) -> Term {
        Term::Num(q)
    }

    /// Constant, kept rational when possible.
    pub fn alg(a: &AlgReal) -> Term {
        match a.as_rational() {
            Some(q) => Term::Num(q.clone()),
            None => Term::Alg(a.clone()),
        }
    }

    pub fn add(ts: Vec<Term>) -> Term {
        let mut out = Vec::new();
        let mut konst = Rational::new();
        for t in ts {
            match t {
                Term::Add(inner) => out.extend(inner),
                Term::Num(q) => konst += q,
                t => out.push(t),
            }
        }
        if konst != 0 {
            out.push(Term::Num(konst));
        }
        match out.len() {
            0 => Term::int(0),
            1 => out.pop().unwrap(),
            _ => Term::Add(out),
        }
    }

    pub fn mul(ts: Vec<Term>) -> Term {
        let mut out = Vec::new();
        let mut konst = Rational::from(1);
        let mut flat = Vec::new();
        for t in ts {
            match t {
                Term::Mul(inner) => flat.extend(inner),
                t => flat.push(t),
            }
        }
        for t in flat {
            match t {
                Term::Num(q) => konst *= q,
                t => out.push(t),
            }
        }
        if konst == 0 {
            return Term::int(0);
        }
        if konst != 1 || out.is_empty() {
            out.insert(0, Term::Num(konst));
        }
        match out.len() {
            0 => Term::int(1),
            1 => out.pop().unwrap(),
            _ => Term::Mul(out),
        }
    }

    pub fn neg(t: Term) -> Term {
        match t {
            Term::Num(q) => Term::Num(-q),
            Term::Neg(inner) => *inner,
            t => Term::Neg(Box::new(t)),
        }
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::add(vec![a, Term::neg(b)])
    }

    pub fn pow(t: Term, k: u32) -> Term {
        match (k, t) {
            (0, _) => Term::int(1),
            (1, t) => t,
            (_, Term::Num(q)) => Term::Num((0..k).fold(Rational::from(1), |acc, _| acc * &q)),
            (_, t) => Term::Pow(Box::new(t), k),
        }
    }

    pub fn exp(t: Term) -> Term {
        Term::Exp(Box::new(t))
    }

    pub fn sin(t: Term, bound: Rational) -> Term {
        Term::Sin(Box::new(t), bound)
    }

    pub fn cos(t: Term, bound: Rational) -> Term {
        Term::Cos(Box::new(t), bound)
    }

    pub fn mentions(&self, x: &str) -> bool {
        match self {
            Term::Var(v) => v == x,
            Term::Num(_) | Term::Alg(_) => false,
            Term::Add(ts) | Term::Mul(ts) => ts.iter().any(|t| t.mentions(x)),
            Term::Neg(t) | Term::Pow(t, _) | Term::Exp(t) | Term::Sin(t, _) | Term::Cos(t, _) => t.mentions(x),
        }
    }

    fn has_exp(&self) -> bool {
        match self {
            Term::Exp(_) => true,
            Term::Var(_) | Term::Num(_) | Term::Alg(_) => false,
            Term::Add(ts) | Term::Mul(ts) => ts.iter().any(|t| t.has_exp()),
            Term::Neg(t) | Term::Pow(t, _) | Term::Sin(t, _) | Term::Cos(t, _) => t.has_exp(),
        }
    }

    fn has_trig(&self) -> bool {
        match self {
            Term::Sin(..) | Term::Cos(..) => true,
            Term::Var(_) | Term::Num(_) | Term::Alg(_) => false,
            Term::Add(ts) | Term::Mul(ts) => ts.iter().any(|t| t.has_trig()),
            Term::Neg(t) | Term::Pow(t, _) | Term::Exp(t) => t.has_trig(),
        }
    }

    pub fn subst(&self, x: &str, by: &Term) -> Term {
        match self {
            Term::Var(v) if v == x => by.clone(),
            Term::Var(_) | Term::Num(_) | Term::Alg(_) => self.clone(),
            Term::Add(ts) => Term::add(ts.iter().map(|t| t.subst(x, by)).collect()),
            Term::Mul(ts) => Term::mul(ts.iter().map(|t| t.subst(x, by)).collect()),
            Term::Neg(t) => Term::neg(t.subst(x, by)),
            Term::Pow(t, k) => Term::pow(t.subst(x, by), *k),
            Term::Exp(t) => Term::exp(t.subst(x, by)),
            Term::Sin(t, b) => Term::sin(t.subst(x, by), b.clone()),
            Term::Cos(t, b) => Term::cos(t.subst(x, by), b.clone()),
        }
    }

    /// Coefficients of the powers of `x`, or `None` when `x` occurs under a
    /// transcendental function.
    pub fn coeffs_in(&self, x: &str) -> Option<Vec<Term>> {
        if !self.mentions(x) {
            return Some(vec![self.clone()]);
        }
        match self {
            Term::Var(_) => Some(vec![Term::int(0), Term::int(1)]),
            Term::Add(ts) => {
                let mut acc: Vec<Vec<Term>> = Vec::new();
                for t in ts {
                    for (i, c) in t.coeffs_in(x)?.into_iter().enumerate() {
                        if acc.len() <= i {
                            acc.resize(i + 1, Vec::new());
                        }
                        acc[i].push(c);
                    }
                }
                Some(acc.into_iter().map(Term::add).collect())
            }
            Term::Mul(ts) => {
                let mut acc = vec![Term::int(1)];
                for t in ts {
                    acc = poly_mul(&acc, &t.coeffs_in(x)?);
                }
                Some(acc)
            }
            Term::Neg(t) => Some(t.coeffs_in(x)?.into_iter().map(Term::neg).collect()),
            Term::Pow(t, k) => {
                let base = t.coeffs_in(x)?;
                let mut acc = vec![Term::int(1)];
                for _ in 0..*k {
                    acc = poly_mul(&acc, &base);
                }
                Some(acc)
            }
            _ => None,
        }
    }
}

fn poly_mul(a: &[Term], b: &[Term]) -> Vec<Term> {
    let mut out: Vec<Vec<Term>> = vec![Vec::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j].push(Term::mul(vec![x.clone(), y.clone()]));
        }
    }
    out.into_iter().map(Term::add).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Lt,
    Le,
    Eq,
    Ne,
}

impl Rel {
    fn symbol(&self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Eq => "=",
            Rel::Ne => "!=",
        }
    }
}

/// Quantified variable ranging over the open interval `(lo, hi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Binder {
    pub var: String,
    pub lo: Option<Term>,
    pub hi: Option<Term>,
}

impl Binder {
    pub fn free(var: &str) -> Binder {
        Binder { var: var.to_string(), lo: None, hi: None }
    }

    pub fn between(var: &str, lo: Term, hi: Term) -> Binder {
        Binder { var: var.to_string(), lo: Some(lo), hi: Some(hi) }
    }

    fn range_atoms(&self) -> Vec<Formula> {
        let x = Term::var(&self.var);
        let mut out = Vec::new();
        if let Some(lo) = &self.lo {
            out.push(Formula::Atom(Rel::Lt, lo.clone(), x.clone()));
        }
        if let Some(hi) = &self.hi {
            out.push(Formula::Atom(Rel::Lt, x, hi.clone()));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Formula {
    True,
    False,
    Atom(Rel, Term, Term),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(Vec<Binder>, Box<Formula>),
    Forall(Vec<Binder>, Box<Formula>),
}

impl Formula {
    pub fn lt(a: Term, b: Term) -> Formula {
        Formula::Atom(Rel::Lt, a, b)
    }

    pub fn le(a: Term, b: Term) -> Formula {
        Formula::Atom(Rel::Le, a, b)
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Atom(Rel::Eq, a, b)
    }

    pub fn ne(a: Term, b: Term) -> Formula {
        Formula::Atom(Rel::Ne, a, b)
    }

    pub fn and(fs: Vec<Formula>) -> Formula {
        match fs.len() {
            0 => Formula::True,
            1 => fs.into_iter().next().unwrap(),
            _ => Formula::And(fs),
        }
    }

    pub fn or(fs: Vec<Formula>) -> Formula {
        match fs.len() {
            0 => Formula::False,
            1 => fs.into_iter().next().unwrap(),
            _ => Formula::Or(fs),
        }
    }

    pub fn implies(p: Formula, q: Formula) -> Formula {
        Formula::Implies(Box::new(p), Box::new(q))
    }

    pub fn exists(bs: Vec<Binder>, f: Formula) -> Formula {
        if bs.is_empty() {
            f
        } else {
            Formula::Exists(bs, Box::new(f))
        }
    }

    pub fn forall(bs: Vec<Binder>, f: Formula) -> Formula {
        if bs.is_empty() {
            f
        } else {
            Formula::Forall(bs, Box::new(f))
        }
    }

    /// `sin(pi) = 0 ∧ ∀v ∈ (0, pi). sin v ≠ 0`, pinning the variable `pi`.
    pub fn pi_axiom(pi: &str, bound: Rational) -> Formula {
        let p = Term::var(pi);
        let v = format!("{}_v", pi);
        Formula::And(vec![
            Formula::eq(Term::sin(p.clone(), bound.clone()), Term::int(0)),
            Formula::forall(vec![Binder::between(&v, Term::int(0), p)], Formula::ne(Term::sin(Term::var(&v), bound), Term::int(0))),
        ])
    }

    /// Negation pushed one level down.
    pub fn negate(&self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Atom(r, a, b) => match r {
                Rel::Lt => Formula::Atom(Rel::Le, b.clone(), a.clone()),
                Rel::Le => Formula::Atom(Rel::Lt, b.clone(), a.clone()),
                Rel::Eq => Formula::Atom(Rel::Ne, a.clone(), b.clone()),
                Rel::Ne => Formula::Atom(Rel::Eq, a.clone(), b.clone()),
            },
            Formula::And(fs) => Formula::Or(fs.iter().map(|f| f.negate()).collect()),
            Formula::Or(fs) => Formula::And(fs.iter().map(|f| f.negate()).collect()),
            Formula::Not(f) => (**f).clone(),
            Formula::Implies(p, q) => Formula::And(vec![(**p).clone(), q.negate()]),
            Formula::Exists(bs, f) => Formula::Forall(bs.clone(), Box::new(f.negate())),
            Formula::Forall(bs, f) => Formula::Exists(bs.clone(), Box::new(f.negate())),
        }
    }

    pub fn subst(&self, x: &str, by: &Term) -> Formula {
        let shadowed = |bs: &[Binder]| bs.iter().any(|b| b.var == x);
        let sub_b = |b: &Binder| Binder { var: b.var.clone(), lo: b.lo.as_ref().map(|t| t.subst(x, by)), hi: b.hi.as_ref().map(|t| t.subst(x, by)) };
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(r, a, b) => Formula::Atom(*r, a.subst(x, by), b.subst(x, by)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.subst(x, by)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.subst(x, by)).collect()),
            Formula::Not(f) => Formula::Not(Box::new(f.subst(x, by))),
            Formula::Implies(p, q) => Formula::Implies(Box::new(p.subst(x, by)), Box::new(q.subst(x, by))),
            Formula::Exists(bs, f) | Formula::Forall(bs, f) => {
                let nbs: Vec<Binder> = bs.iter().map(sub_b).collect();
                let body = if shadowed(bs) { (**f).clone() } else { f.subst(x, by) };
                if matches!(self, Formula::Exists(..)) {
                    Formula::Exists(nbs, Box::new(body))
                } else {
                    Formula::Forall(nbs, Box::new(body))
                }
            }
        }
    }

    fn terms(&self, out: &mut Vec<Term>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(_, a, b) => {
                out.push(a.clone());
                out.push(b.clone());
            }
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.terms(out)),
            Formula::Not(f) => f.terms(out),
            Formula::Implies(p, q) => {
                p.terms(out);
                q.terms(out);
            }
            Formula::Exists(bs, f) | Formula::Forall(bs, f) => {
                for b in bs {
                    out.extend(b.lo.iter().cloned());
                    out.extend(b.hi.iter().cloned());
                }
                f.terms(out);
            }
        }
    }

    pub fn mentions(&self, x: &str) -> bool {
        let mut ts = Vec::new();
        self.terms(&mut ts);
        ts.iter().any(|t| t.mentions(x))
    }

    /// Whether `sub` occurs as a subformula.
    pub fn contains(&self, sub: &Formula) -> bool {
        if self == sub {
            return true;
        }
        match self {
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(|f| f.contains(sub)),
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => f.contains(sub),
            Formula::Implies(p, q) => p.contains(sub) || q.contains(sub),
            _ => false,
        }
    }

    fn is_atomic(&self) -> bool {
        matches!(self, Formula::True | Formula::False | Formula::Atom(..))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FOFormula {
    pub theory: Theory,
    pub free: Vec<String>,
    pub body: Formula,
}

impl FOFormula {
    /// Checks the theory tag against the function symbols used.
    pub fn validate(&self) -> Result<()> {
        let mut ts = Vec::new();
        self.body.terms(&mut ts);
        let exp = ts.iter().any(|t| t.has_exp());
        let trig = ts.iter().any(|t| t.has_trig());
        let ok = match self.theory {
            Theory::R0 => !exp && !trig,
            Theory::Rexp => !trig,
            Theory::RexpSin => true,
        };
        if ok {
            Ok(())
        } else {
            Err(ReachError::InadequateTheory(self.theory.name().into()))
        }
    }

    pub fn parse(text: &str) -> Result<FOFormula> {
        let toks = tokenize(text);
        let mut pos = 0;
        let sx = read_sexp(&toks, &mut pos)?;
        if pos != toks.len() {
            return Err(perr("trailing input after formula"));
        }
        let items = sx.list("formula")?;
        if items.len() != 6 || items[0].atom() != Some("formula") || items[1].atom() != Some(":theory") || items[3].atom() != Some(":free") {
            return Err(perr("expected (formula :theory T :free (VARS) BODY)"));
        }
        let theory = items[2].atom().and_then(Theory::parse).ok_or_else(|| perr("unknown theory"))?;
        let free = items[4]
            .list("free variables")?
            .iter()
            .map(|s| s.atom().map(str::to_string).ok_or_else(|| perr("free variable must be a symbol")))
            .collect::<Result<Vec<_>>>()?;
        let body = parse_formula(&items[5])?;
        let f = FOFormula { theory, free, body };
        f.validate()?;
        Ok(f)
    }

    /// SMT-LIB 2 script asserting the body; free variables become constants.
    pub fn to_smtlib(&self) -> String {
        let mut ts = Vec::new();
        self.body.terms(&mut ts);
        let mut algs: Vec<AlgReal> = Vec::new();
        for t in &ts {
            collect_algs(t, &mut algs);
        }
        let mut out = String::new();
        out.push_str(&format!("; theory {}\n(set-logic ALL)\n", self.theory.name()));
        for v in &self.free {
            out.push_str(&format!("(declare-const {} Real)\n", v));
        }
        for (i, a) in algs.iter().enumerate() {
            let name = format!("alg{}", i);
            let p = a.minpoly();
            let (lo, hi) = a.interval();
            let terms: Vec<String> = p
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0)
                .map(|(k, c)| {
                    let pw = if k == 0 { String::new() } else { smt_pow(&name, k as u32) };
                    if k == 0 {
                        smt_num(c)
                    } else {
                        format!("(* {} {})", smt_num(c), pw)
                    }
                })
                .collect();
            out.push_str(&format!("(declare-const {} Real)\n", name));
            out.push_str(&format!("(assert (and (= (+ {} 0) 0) (<= {} {}) (<= {} {})))\n", terms.join(" "), smt_num(&lo), name, name, smt_num(&hi)));
        }
        out.push_str(&format!("(assert {})\n(check-sat)\n", smt_formula(&self.body, &algs)));
        out
    }

    /// Three-valued truth for the free variables set to `values`, by exact
    /// elimination of equations, exact sampling and interval bisection.
    pub fn check(&self, values: &[AlgReal]) -> Option<bool> {
        let mut env = Env::new();
        for (v, x) in self.free.iter().zip(values) {
            env.insert(v.clone(), Val::Exact(x.clone()));
        }
        let mut ck = Checker { budget: 200_000 };
        ck.eval(&self.body, &env)
    }
}

fn perr(msg: &str) -> ReachError {
    ReachError::Parse { field: "formula".into(), msg: msg.into() }
}

// ---------------------------------------------------------------------------
// Printing

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, head: &str, ts: &[Term]| -> fmt::Result {
            write!(f, "({}", head)?;
            for t in ts {
                write!(f, " {}", t)?;
            }
            write!(f, ")")
        };
        match self {
            Term::Var(v) => write!(f, "{}", v),
            Term::Num(q) => write!(f, "{}", format_rational(q)),
            Term::Alg(a) => match a.as_rational() {
                Some(q) => write!(f, "{}", format_rational(q)),
                None => {
                    let (lo, hi) = a.interval();
                    write!(f, "(alg (")?;
                    let cs: Vec<String> = a.minpoly().coeffs().iter().map(format_rational).collect();
                    write!(f, "{}) {} {})", cs.join(" "), format_rational(&lo), format_rational(&hi))
                }
            },
            Term::Add(ts) => list(f, "+", ts),
            Term::Mul(ts) => list(f, "*", ts),
            Term::Neg(t) => write!(f, "(- {})", t),
            Term::Pow(t, k) => write!(f, "(^ {} {})", t, k),
            Term::Exp(t) => write!(f, "(exp {})", t),
            Term::Sin(t, b) => write!(f, "(sin {} {})", t, format_rational(b)),
            Term::Cos(t, b) => write!(f, "(cos {} {})", t, format_rational(b)),
        }
    }
}

fn fmt_binders(f: &mut fmt::Formatter<'_>, bs: &[Binder]) -> fmt::Result {
    write!(f, "(")?;
    for (i, b) in bs.iter().enumerate() {
        if i > 0 {
            write!(f, " ")?;
        }
        match (&b.lo, &b.hi) {
            (None, None) => write!(f, "({})", b.var)?,
            (lo, hi) => {
                let side = |t: &Option<Term>| t.as_ref().map(|t| t.to_string()).unwrap_or_else(|| "_".into());
                write!(f, "({} {} {})", b.var, side(lo), side(hi))?
            }
        }
    }
    write!(f, ")")
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, head: &str, fs: &[Formula]| -> fmt::Result {
            write!(f, "({}", head)?;
            for g in fs {
                write!(f, " {}", g)?;
            }
            write!(f, ")")
        };
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Atom(r, a, b) => write!(f, "({} {} {})", r.symbol(), a, b),
            Formula::And(fs) => list(f, "and", fs),
            Formula::Or(fs) => list(f, "or", fs),
            Formula::Not(g) => write!(f, "(not {})", g),
            Formula::Implies(p, q) => write!(f, "(=> {} {})", p, q),
            Formula::Exists(bs, g) => {
                write!(f, "(exists ")?;
                fmt_binders(f, bs)?;
                write!(f, " {})", g)
            }
            Formula::Forall(bs, g) => {
                write!(f, "(forall ")?;
                fmt_binders(f, bs)?;
                write!(f, " {})", g)
            }
        }
    }
}

impl fmt::Display for FOFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(formula :theory {} :free ({}) {})", self.theory.name(), self.free.join(" "), self.body)
    }
}

fn smt_num(q: &Rational) -> String {
    let abs = Rational::from(q.abs_ref());
    let body = if *abs.denom() == 1 { format!("{}", abs.numer()) } else { format!("(/ {} {})", abs.numer(), abs.denom()) };
    if *q < 0 {
        format!("(- {})", body)
    } else {
        body
    }
}

fn smt_pow(base: &str, k: u32) -> String {
    if k == 1 {
        return base.to_string();
    }
    format!("(* {})", vec![base; k as usize].join(" "))
}

fn collect_algs(t: &Term, out: &mut Vec<AlgReal>) {
    match t {
        Term::Alg(a) if !a.is_rational() => {
            if !out.iter().any(|b| b == a) {
                out.push(a.clone());
            }
        }
        Term::Add(ts) | Term::Mul(ts) => ts.iter().for_each(|t| collect_algs(t, out)),
        Term::Neg(t) | Term::Pow(t, _) | Term::Exp(t) | Term::Sin(t, _) | Term::Cos(t, _) => collect_algs(t, out),
        _ => {}
    }
}

fn smt_term(t: &Term, algs: &[AlgReal]) -> String {
    let join = |ts: &[Term]| ts.iter().map(|t| smt_term(t, algs)).collect::<Vec<_>>().join(" ");
    match t {
        Term::Var(v) => v.clone(),
        Term::Num(q) => smt_num(q),
        Term::Alg(a) => match a.as_rational() {
            Some(q) => smt_num(q),
            None => format!("alg{}", algs.iter().position(|b| b == a).unwrap_or(0)),
        },
        Term::Add(ts) => format!("(+ {})", join(ts)),
        Term::Mul(ts) => format!("(* {})", join(ts)),
        Term::Neg(t) => format!("(- {})", smt_term(t, algs)),
        Term::Pow(t, k) => smt_pow(&smt_term(t, algs), *k),
        Term::Exp(t) => format!("(exp {})", smt_term(t, algs)),
        Term::Sin(t, _) => format!("(sin {})", smt_term(t, algs)),
        Term::Cos(t, _) => format!("(cos {})", smt_term(t, algs)),
    }
}

fn smt_guard(bs: &[Binder], algs: &[AlgReal]) -> Vec<String> {
    let mut out = Vec::new();
    for b in bs {
        if let Some(lo) = &b.lo {
            out.push(format!("(< {} {})", smt_term(lo, algs), b.var));
        }
        if let Some(hi) = &b.hi {
            out.push(format!("(< {} {})", b.var, smt_term(hi, algs)));
        }
    }
    out
}

fn smt_formula(f: &Formula, algs: &[AlgReal]) -> String {
    let join = |fs: &[Formula]| fs.iter().map(|g| smt_formula(g, algs)).collect::<Vec<_>>().join(" ");
    match f {
        Formula::True => "true".into(),
        Formula::False => "false".into(),
        Formula::Atom(r, a, b) => {
            let (a, b) = (smt_term(a, algs), smt_term(b, algs));
            match r {
                Rel::Lt => format!("(< {} {})", a, b),
                Rel::Le => format!("(<= {} {})", a, b),
                Rel::Eq => format!("(= {} {})", a, b),
                Rel::Ne => format!("(not (= {} {}))", a, b),
            }
        }
        Formula::And(fs) if fs.is_empty() => "true".into(),
        Formula::Or(fs) if fs.is_empty() => "false".into(),
        Formula::And(fs) => format!("(and {})", join(fs)),
        Formula::Or(fs) => format!("(or {})", join(fs)),
        Formula::Not(g) => format!("(not {})", smt_formula(g, algs)),
        Formula::Implies(p, q) => format!("(=> {} {})", smt_formula(p, algs), smt_formula(q, algs)),
        Formula::Exists(bs, g) | Formula::Forall(bs, g) => {
            let decl: Vec<String> = bs.iter().map(|b| format!("({} Real)", b.var)).collect();
            let guard = smt_guard(bs, algs);
            let body = smt_formula(g, algs);
            let exists = matches!(f, Formula::Exists(..));
            let inner = if guard.is_empty() {
                body
            } else if exists {
                format!("(and {} {})", guard.join(" "), body)
            } else {
                format!("(=> (and {}) {})", guard.join(" "), body)
            };
            format!("({} ({}) {})", if exists { "exists" } else { "forall" }, decl.join(" "), inner)
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing

enum SExp {
    Atom(String),
    List(Vec<SExp>),
}

impl SExp {
    fn atom(&self) -> Option<&str> {
        match self {
            SExp::Atom(s) => Some(s),
            SExp::List(_) => None,
        }
    }

    fn list(&self, what: &str) -> Result<&[SExp]> {
        match self {
            SExp::List(v) => Ok(v),
            SExp::Atom(a) => Err(perr(&format!("expected a list for {}, found '{}'", what, a))),
        }
    }
}

fn tokenize(s: &str) -> Vec<String> {
    s.replace('(', " ( ").replace(')', " ) ").split_whitespace().map(str::to_string).collect()
}

fn read_sexp(toks: &[String], pos: &mut usize) -> Result<SExp> {
    let t = toks.get(*pos).ok_or_else(|| perr("unexpected end of input"))?;
    *pos += 1;
    match t.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match toks.get(*pos).map(String::as_str) {
                    None => return Err(perr("unbalanced parenthesis")),
                    Some(")") => {
                        *pos += 1;
                        return Ok(SExp::List(items));
                    }
                    Some(_) => items.push(read_sexp(toks, pos)?),
                }
            }
        }
        ")" => Err(perr("unexpected ')'")),
        a => Ok(SExp::Atom(a.to_string())),
    }
}

fn parse_rat(s: &SExp) -> Result<Rational> {
    let a = s.atom().ok_or_else(|| perr("expected a rational"))?;
    parse_rational(a).map_err(|e| perr(&e))
}

fn parse_term(s: &SExp) -> Result<Term> {
    match s {
        SExp::Atom(a) => {
            let starts_numeric = a.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+');
            if starts_numeric {
                parse_rational(a).map(Term::Num).map_err(|e| perr(&e))
            } else {
                Ok(Term::Var(a.clone()))
            }
        }
        SExp::List(items) => {
            let head = items.first().and_then(SExp::atom).ok_or_else(|| perr("term list needs an operator"))?;
            let args = &items[1..];
            let arity = |n: usize| if args.len() == n { Ok(()) } else { Err(perr(&format!("'{}' takes {} arguments", head, n))) };
            match head {
                "+" => Ok(Term::Add(args.iter().map(parse_term).collect::<Result<_>>()?)),
                "*" => Ok(Term::Mul(args.iter().map(parse_term).collect::<Result<_>>()?)),
                "-" => {
                    arity(1)?;
                    Ok(Term::Neg(Box::new(parse_term(&args[0])?)))
                }
                "^" => {
                    arity(2)?;
                    let k = args[1].atom().and_then(|a| a.parse::<u32>().ok()).ok_or_else(|| perr("exponent must be a natural number"))?;
                    Ok(Term::Pow(Box::new(parse_term(&args[0])?), k))
                }
                "exp" => {
                    arity(1)?;
                    Ok(Term::Exp(Box::new(parse_term(&args[0])?)))
                }
                "sin" | "cos" => {
                    arity(2)?;
                    let t = Box::new(parse_term(&args[0])?);
                    let b = parse_rat(&args[1])?;
                    Ok(if head == "sin" { Term::Sin(t, b) } else { Term::Cos(t, b) })
                }
                "alg" => {
                    arity(3)?;
                    let cs = args[0].list("alg coefficients")?.iter().map(parse_rat).collect::<Result<Vec<_>>>()?;
                    let (lo, hi) = (parse_rat(&args[1])?, parse_rat(&args[2])?);
                    let p = Poly::new(cs);
                    if p.deg() < 1 || lo > hi {
                        return Err(perr("alg needs a nonconstant polynomial and lo <= hi"));
                    }
                    let roots: Vec<AlgReal> = AlgReal::roots_of(&p).into_iter().filter(|r| {
                        let l = AlgReal::from(lo.clone());
                        let h = AlgReal::from(hi.clone());
                        *r >= l && *r <= h
                    }).collect();
                    if roots.len() != 1 {
                        return Err(perr("alg interval must isolate exactly one root"));
                    }
                    Ok(Term::Alg(roots.into_iter().next().unwrap()))
                }
                _ => Err(perr(&format!("unknown function '{}'", head))),
            }
        }
    }
}

fn parse_binders(s: &SExp) -> Result<Vec<Binder>> {
    let side = |s: &SExp| -> Result<Option<Term>> {
        if s.atom() == Some("_") {
            Ok(None)
        } else {
            parse_term(s).map(Some)
        }
    };
    s.list("binders")?
        .iter()
        .map(|b| {
            let items = b.list("binder")?;
            let var = items.first().and_then(SExp::atom).ok_or_else(|| perr("binder needs a variable"))?.to_string();
            match items.len() {
                1 => Ok(Binder { var, lo: None, hi: None }),
                3 => Ok(Binder { var, lo: side(&items[1])?, hi: side(&items[2])? }),
                _ => Err(perr("binder is (x) or (x lo hi)")),
            }
        })
        .collect()
}

fn parse_formula(s: &SExp) -> Result<Formula> {
    match s {
        SExp::Atom(a) => match a.as_str() {
            "true" => Ok(Formula::True),
            "false" => Ok(Formula::False),
            _ => Err(perr(&format!("unexpected symbol '{}' in formula position", a))),
        },
        SExp::List(items) => {
            let head = items.first().and_then(SExp::atom).ok_or_else(|| perr("formula list needs an operator"))?;
            let args = &items[1..];
            let arity = |n: usize| if args.len() == n { Ok(()) } else { Err(perr(&format!("'{}' takes {} arguments", head, n))) };
            let rel = match head {
                "<" => Some(Rel::Lt),
                "<=" => Some(Rel::Le),
                "=" => Some(Rel::Eq),
                "!=" => Some(Rel::Ne),
                _ => None,
            };
            if let Some(r) = rel {
                arity(2)?;
                return Ok(Formula::Atom(r, parse_term(&args[0])?, parse_term(&args[1])?));
            }
            match head {
                "and" => Ok(Formula::And(args.iter().map(parse_formula).collect::<Result<_>>()?)),
                "or" => Ok(Formula::Or(args.iter().map(parse_formula).collect::<Result<_>>()?)),
                "not" => {
                    arity(1)?;
                    Ok(Formula::Not(Box::new(parse_formula(&args[0])?)))
                }
                "=>" => {
                    arity(2)?;
                    Ok(Formula::Implies(Box::new(parse_formula(&args[0])?), Box::new(parse_formula(&args[1])?)))
                }
                "exists" | "forall" => {
                    arity(2)?;
                    let bs = parse_binders(&args[0])?;
                    let body = Box::new(parse_formula(&args[1])?);
                    Ok(if head == "exists" { Formula::Exists(bs, body) } else { Formula::Forall(bs, body) })
                }
                _ => Err(perr(&format!("unknown connective '{}'", head))),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Checking

#[derive(Clone, Debug)]
enum Val {
    Exact(AlgReal),
    Iv(DyInterval),
}

type Env = HashMap<String, Val>;

const CHECK_PREC: u32 = 128;
const DNF_CAP: usize = 512;
const MAX_BOXES: usize = 4096;

fn exact_eval(t: &Term, env: &Env) -> Option<AlgReal> {
    match t {
        Term::Var(v) => match env.get(v)? {
            Val::Exact(x) => Some(x.clone()),
            Val::Iv(_) => None,
        },
        Term::Num(q) => Some(AlgReal::from(q.clone())),
        Term::Alg(a) => Some(a.clone()),
        Term::Add(ts) => ts.iter().try_fold(AlgReal::zero(), |acc, t| Some(acc.add(&exact_eval(t, env)?))),
        Term::Mul(ts) => ts.iter().try_fold(AlgReal::one(), |acc, t| Some(acc.mul(&exact_eval(t, env)?))),
        Term::Neg(t) => Some(exact_eval(t, env)?.neg()),
        Term::Pow(t, k) => Some(exact_eval(t, env)?.powi(*k as i32)),
        Term::Exp(t) => exact_eval(t, env)?.is_zero().then(AlgReal::one),
        Term::Sin(t, _) => exact_eval(t, env)?.is_zero().then(AlgReal::zero),
        Term::Cos(t, _) => exact_eval(t, env)?.is_zero().then(AlgReal::one),
    }
}

fn iv_eval(t: &Term, env: &Env) -> Option<DyInterval> {
    let p = CHECK_PREC;
    Some(match t {
        Term::Var(v) => match env.get(v)? {
            Val::Exact(x) => x.enclosure(p),
            Val::Iv(i) => i.clone(),
        },
        Term::Num(q) => DyInterval::from_rational(q, p),
        Term::Alg(a) => a.enclosure(p),
        Term::Add(ts) => {
            let mut acc = DyInterval::zero(p);
            for t in ts {
                acc = &acc + &iv_eval(t, env)?;
            }
            acc
        }
        Term::Mul(ts) => {
            let mut acc = DyInterval::one(p);
            for t in ts {
                acc = &acc * &iv_eval(t, env)?;
            }
            acc
        }
        Term::Neg(t) => -&iv_eval(t, env)?,
        Term::Pow(t, k) => iv_eval(t, env)?.powi(*k),
        Term::Exp(t) => iv_eval(t, env)?.exp(),
        Term::Sin(t, _) => iv_eval(t, env)?.sin(),
        Term::Cos(t, _) => iv_eval(t, env)?.cos(),
    })
}

fn decide_sign(rel: Rel, s: i32) -> bool {
    match rel {
        Rel::Lt => s < 0,
        Rel::Le => s <= 0,
        Rel::Eq => s == 0,
        Rel::Ne => s != 0,
    }
}

fn atom_eval(rel: Rel, a: &Term, b: &Term, env: &Env) -> Option<bool> {
    let d = Term::sub(a.clone(), b.clone());
    if let Some(x) = exact_eval(&d, env) {
        return Some(decide_sign(rel, x.signum()));
    }
    let iv = iv_eval(&d, env)?;
    if iv.is_pos() {
        return Some(decide_sign(rel, 1));
    }
    if iv.is_neg() {
        return Some(decide_sign(rel, -1));
    }
    // the interval touches zero
    let lo_zero = !iv.is_neg() && iv.lo_rational() == 0;
    let hi_zero = !iv.is_pos() && iv.hi_rational() == 0;
    match rel {
        Rel::Le if hi_zero => Some(true),
        Rel::Lt if lo_zero => Some(false),
        _ => None,
    }
}

/// Real roots of `sum c_i x^i` when they can be found exactly.
fn exact_roots(cs: &[AlgReal]) -> Option<Vec<AlgReal>> {
    let mut cs = cs.to_vec();
    while cs.last().is_some_and(|c| c.is_zero()) {
        cs.pop();
    }
    match cs.len() {
        0 => None,
        1 => Some(Vec::new()),
        2 => Some(vec![cs[0].div(&cs[1]).neg()]),
        _ => {
            let qs: Option<Vec<Rational>> = cs.iter().map(|c| c.as_rational().cloned()).collect();
            Some(AlgReal::roots_of(&Poly::new(qs?)))
        }
    }
}

type Disjunct = (Vec<Binder>, Vec<Formula>);

fn dnf(f: &Formula) -> Option<Vec<Disjunct>> {
    match f {
        Formula::True => Some(vec![(Vec::new(), Vec::new())]),
        Formula::False => Some(Vec::new()),
        Formula::And(fs) => {
            let mut acc: Vec<Disjunct> = vec![(Vec::new(), Vec::new())];
            for g in fs {
                let d = dnf(g)?;
                let mut next = Vec::new();
                for (b1, c1) in &acc {
                    for (b2, c2) in &d {
                        let mut b = b1.clone();
                        b.extend(b2.iter().cloned());
                        let mut c = c1.clone();
                        c.extend(c2.iter().cloned());
                        next.push((b, c));
                    }
                }
                if next.len() > DNF_CAP {
                    return None;
                }
                acc = next;
            }
            Some(acc)
        }
        Formula::Or(fs) => {
            let mut out = Vec::new();
            for g in fs {
                out.extend(dnf(g)?);
                if out.len() > DNF_CAP {
                    return None;
                }
            }
            Some(out)
        }
        Formula::Exists(bs, g) => Some(
            dnf(g)?
                .into_iter()
                .map(|(b, c)| {
                    let mut all = bs.clone();
                    all.extend(b);
                    (all, c)
                })
                .collect(),
        ),
        Formula::Implies(p, q) => dnf(&Formula::Or(vec![p.negate(), (**q).clone()])),
        Formula::Not(g) => dnf(&g.negate()),
        _ => Some(vec![(Vec::new(), vec![f.clone()])]),
    }
}

struct Checker {
    budget: usize,
}

impl Checker {
    fn spend(&mut self) -> bool {
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        true
    }

    fn eval(&mut self, f: &Formula, env: &Env) -> Option<bool> {
        if !self.spend() {
            return None;
        }
        match f {
            Formula::True => Some(true),
            Formula::False => Some(false),
            Formula::Atom(r, a, b) => atom_eval(*r, a, b, env),
            Formula::And(fs) => self.conj(fs, env),
            Formula::Or(fs) => {
                let mut unknown = false;
                for g in fs {
                    match self.eval(g, env) {
                        Some(true) => return Some(true),
                        None => unknown = true,
                        Some(false) => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(false)
                }
            }
            Formula::Not(g) => self.eval(g, env).map(|b| !b),
            Formula::Implies(p, q) => self.eval(&Formula::Or(vec![p.negate(), (**q).clone()]), env),
            Formula::Exists(bs, g) => self.exists(bs, g, env),
            Formula::Forall(bs, g) => self.exists(bs, &g.negate(), env).map(|b| !b),
        }
    }

    /// Conjunction, atoms first so exact falsity short-circuits.
    fn conj(&mut self, fs: &[Formula], env: &Env) -> Option<bool> {
        let mut unknown = false;
        for pass in 0..2 {
            for g in fs.iter().filter(|g| g.is_atomic() == (pass == 0)) {
                match self.eval(g, env) {
                    Some(false) => return Some(false),
                    None => unknown = true,
                    Some(true) => {}
                }
            }
        }
        if unknown {
            None
        } else {
            Some(true)
        }
    }

    fn exists(&mut self, bs: &[Binder], body: &Formula, env: &Env) -> Option<bool> {
        let Some(ds) = dnf(body) else {
            let mut conj = vec![body.clone()];
            bs.iter().for_each(|b| conj.extend(b.range_atoms()));
            return self.solve(bs.to_vec(), conj, env);
        };
        let mut unknown = false;
        for (inner, mut conj) in ds {
            let mut all = bs.to_vec();
            all.extend(inner);
            all.iter().for_each(|b| conj.extend(b.range_atoms()));
            match self.solve(all, conj, env) {
                Some(true) => return Some(true),
                None => unknown = true,
                Some(false) => {}
            }
        }
        if unknown {
            None
        } else {
            Some(false)
        }
    }

    fn solve(&mut self, bs: Vec<Binder>, conj: Vec<Formula>, env: &Env) -> Option<bool> {
        if !self.spend() {
            return None;
        }
        // atoms free of the binders decide early
        let mut open = false;
        for g in &conj {
            if bs.iter().any(|b| g.mentions(&b.var)) {
                open = true;
                continue;
            }
            match self.eval(g, env) {
                Some(false) => return Some(false),
                None => open = true,
                Some(true) => {}
            }
        }
        if !open {
            return Some(true);
        }
        if bs.is_empty() {
            return self.conj(&conj, env);
        }
        if let Some(r) = self.eliminate(&bs, &conj, env) {
            return r;
        }
        if self.sample(&bs, &conj, env) == Some(true) {
            return Some(true);
        }
        self.boxes(&bs, &conj, env)
    }

    /// Use an equation to eliminate one binder: enumerate exact roots when
    /// the other variables are fixed, or solve symbolically when linear.
    fn eliminate(&mut self, bs: &[Binder], conj: &[Formula], env: &Env) -> Option<Option<bool>> {
        for g in conj {
            let Formula::Atom(Rel::Eq, a, b) = g else { continue };
            let d = Term::sub(a.clone(), b.clone());
            for (k, bx) in bs.iter().enumerate() {
                if !d.mentions(&bx.var) {
                    continue;
                }
                let Some(cs) = d.coeffs_in(&bx.var) else { continue };
                let rest: Vec<Binder> = bs.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, b)| b.clone()).collect();
                let exact: Option<Vec<AlgReal>> = cs.iter().map(|c| exact_eval(c, env)).collect();
                if let Some(ex) = exact {
                    if ex.iter().all(|c| c.is_zero()) {
                        continue;
                    }
                    let Some(roots) = exact_roots(&ex) else { continue };
                    let mut unknown = false;
                    for r in roots {
                        let mut e2 = env.clone();
                        e2.insert(bx.var.clone(), Val::Exact(r));
                        match self.solve(rest.clone(), conj.to_vec(), &e2) {
                            Some(true) => return Some(Some(true)),
                            None => unknown = true,
                            Some(false) => {}
                        }
                    }
                    return Some(if unknown { None } else { Some(false) });
                }
                if cs.len() == 2 {
                    if let Some(lead) = exact_eval(&cs[1], env).filter(|c| !c.is_zero()) {
                        let sol = Term::mul(vec![Term::alg(&lead.recip().neg()), cs[0].clone()]);
                        let next: Vec<Formula> = conj.iter().map(|f| f.subst(&bx.var, &sol)).collect();
                        return Some(self.solve(rest, next, env));
                    }
                }
            }
        }
        None
    }

    fn ranges(&self, bs: &[Binder], env: &Env) -> Vec<(Option<AlgReal>, Option<AlgReal>)> {
        bs.iter()
            .map(|b| {
                let lo = b.lo.as_ref().and_then(|t| exact_eval(t, env));
                let hi = b.hi.as_ref().and_then(|t| exact_eval(t, env));
                (lo, hi)
            })
            .collect()
    }

    fn sample(&mut self, bs: &[Binder], conj: &[Formula], env: &Env) -> Option<bool> {
        let base: Vec<AlgReal> = [(1, 1), (-1, 1), (1, 2), (-1, 2), (2, 1), (-2, 1), (1, 3), (-1, 3), (3, 2), (-3, 2), (0, 1)]
            .iter()
            .map(|&(p, q)| AlgReal::frac(p, q))
            .collect();
        let mut cands: Vec<Vec<AlgReal>> = Vec::new();
        for (lo, hi) in self.ranges(bs, env) {
            let mut c: Vec<AlgReal> = Vec::new();
            if let (Some(l), Some(h)) = (&lo, &hi) {
                for k in 1..4 {
                    c.push(l.add(&h.sub(l).mul(&AlgReal::frac(k, 4))));
                }
            }
            c.extend(base.iter().cloned());
            c.retain(|x| lo.as_ref().is_none_or(|l| x > l) && hi.as_ref().is_none_or(|h| x < h));
            if c.is_empty() {
                return None;
            }
            cands.push(c);
        }
        let total: usize = cands.iter().map(|c| c.len()).product();
        if total > 2000 {
            cands.iter_mut().for_each(|c| c.truncate(4));
        }
        let mut idx = vec![0usize; bs.len()];
        loop {
            let mut e2 = env.clone();
            for (k, b) in bs.iter().enumerate() {
                e2.insert(b.var.clone(), Val::Exact(cands[k][idx[k]].clone()));
            }
            if self.conj(conj, &e2) == Some(true) {
                return Some(true);
            }
            if self.budget == 0 {
                return None;
            }
            let mut k = 0;
            loop {
                if k == bs.len() {
                    return None;
                }
                idx[k] += 1;
                if idx[k] < cands[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    fn boxes(&mut self, bs: &[Binder], conj: &[Formula], env: &Env) -> Option<bool> {
        let mut init = Vec::new();
        for (b, (lo, hi)) in bs.iter().zip(self.ranges(bs, env)) {
            let lo = lo.map(|x| x.enclosure(CHECK_PREC)).or_else(|| b.lo.as_ref().and_then(|t| iv_eval(t, env)))?;
            let hi = hi.map(|x| x.enclosure(CHECK_PREC)).or_else(|| b.hi.as_ref().and_then(|t| iv_eval(t, env)))?;
            init.push(lo.hull(&hi));
        }
        let mut queue = vec![init];
        let mut seen = 0;
        let mut unknown = false;
        while let Some(bx) = queue.pop() {
            seen += 1;
            if seen > MAX_BOXES || self.budget == 0 {
                return None;
            }
            let mut e2 = env.clone();
            for (b, iv) in bs.iter().zip(&bx) {
                e2.insert(b.var.clone(), Val::Iv(iv.clone()));
            }
            match self.conj(conj, &e2) {
                Some(false) => {}
                Some(true) => return Some(true),
                None => {
                    let (k, w) = bx.iter().enumerate().map(|(i, v)| (i, v.width_f64())).fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
                    if w < 1e-6 {
                        unknown = true;
                        continue;
                    }
                    let (l, r) = bx[k].bisect();
                    let mut left = bx.clone();
                    left[k] = l;
                    let mut right = bx;
                    right[k] = r;
                    queue.push(left);
                    queue.push(right);
                }
            }
        }
        if unknown {
            None
        } else {
            Some(false)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fo(body: Formula) -> FOFormula {
        FOFormula { theory: Theory::R0, free: vec!["y".into()], body }
    }

    #[test]
    fn round_trip_with_algebraic_constant() {
        let s2 = AlgReal::sqrt_rational(&Rational::from(2));
        let body = Formula::Exists(
            vec![Binder::between("x", Term::int(0), Term::Num(Rational::from((3, 2)))), Binder::free("w")],
            Box::new(Formula::And(vec![
                Formula::eq(Term::pow(Term::var("x"), 2), Term::Alg(s2.clone())),
                Formula::ne(Term::var("w"), Term::Neg(Box::new(Term::var("y")))),
            ])),
        );
        let f = fo(body);
        let text = f.to_string();
        let back = FOFormula::parse(&text).unwrap();
        assert_eq!(back, f);
        assert!(f.to_smtlib().contains("(declare-const alg0 Real)"));
    }

    #[test]
    fn parse_errors() {
        assert!(FOFormula::parse("(formula :theory r0 :free () (< 1 2)").is_err());
        assert!(FOFormula::parse("(formula :theory r0 :free () (< (exp x) 2))").is_err());
        assert!(FOFormula::parse("(formula :theory r0 :free () (< 0.5 2))").is_err());
        assert!(FOFormula::parse("(formula :theory rexp :free () (= (alg (-2 0 1) -3 3) 1))").is_err());
    }

    #[test]
    fn checker_solves_equations() {
        // ∃x ∈ (0, 2). x^3 = y
        let body = Formula::exists(vec![Binder::between("x", Term::int(0), Term::int(2))], Formula::eq(Term::pow(Term::var("x"), 3), Term::var("y")));
        let f = fo(body);
        assert_eq!(f.check(&[AlgReal::from(2)]), Some(true));
        assert_eq!(f.check(&[AlgReal::from(9)]), Some(false));
        assert_eq!(f.check(&[AlgReal::from(-1)]), Some(false));
    }

    #[test]
    fn checker_forall_roots() {
        // ∀u ∈ (0, 1). u^2 - y = 0 ⇒ u = 1/2
        let body = Formula::forall(
            vec![Binder::between("u", Term::int(0), Term::int(1))],
            Formula::implies(Formula::eq(Term::sub(Term::pow(Term::var("u"), 2), Term::var("y")), Term::int(0)), Formula::eq(Term::var("u"), Term::Num(Rational::from((1, 2))))),
        );
        let f = fo(body);
        assert_eq!(f.check(&[AlgReal::frac(1, 4)]), Some(true));
        assert_eq!(f.check(&[AlgReal::frac(1, 9)]), Some(false));
        assert_eq!(f.check(&[AlgReal::from(4)]), Some(true));
    }

    #[test]
    fn checker_boxes_and_samples() {
        // ∃x ∈ (-1, 1). x^2 < y
        let body = Formula::exists(vec![Binder::between("x", Term::int(-1), Term::int(1))], Formula::lt(Term::pow(Term::var("x"), 2), Term::var("y")));
        let f = fo(body);
        assert_eq!(f.check(&[AlgReal::frac(1, 100)]), Some(true));
        assert_eq!(f.check(&[AlgReal::from(-1)]), Some(false));
    }

    #[test]
    fn pi_axiom_pins_pi() {
        let b = Rational::from(4);
        let body = Formula::exists(vec![Binder::between("pi", Term::int(3), Term::int(4))], Formula::pi_axiom("pi", b.clone()));
        let f = FOFormula { theory: Theory::RexpSin, free: vec![], body };
        f.validate().unwrap();
        let back = FOFormula::parse(&f.to_string()).unwrap();
        assert_eq!(back, f);
        assert!(f.body.contains(&Formula::pi_axiom("pi", b)));
    }
}
