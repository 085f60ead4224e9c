// SPDX-License-Identifier: Apache-2.0

//! A higher-order concurrent imperative language: abstract syntax, parsing,
//! typing, small-step operational semantics with stores, and (in
//! [`crate::interp`]) the denotational interpreter into causal strategies.
//!
//! The language is PCF with ground types `U`, `B`, `N`, extended with
//! references, semaphores and a parallel let binder. `run` explores the
//! full nondeterministic reduction graph and reports *may*-convergence.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::arena::{Budget, Ty};

// ------------------------------------------------------------------- syntax

/// Core terms. Surface sugar (`case`, `assume`, `not`, `==`, `||`, `+|`)
/// is eliminated during elaboration.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Lam(String, Ty, Box<Term>),
    App(Box<Term>, Box<Term>),
    Skip,
    Tt,
    Ff,
    Num(u64),
    Seq(Box<Term>, Box<Term>),
    If(Box<Term>, Box<Term>, Box<Term>),
    Succ(Box<Term>),
    Pred(Box<Term>),
    IsZero(Box<Term>),
    Let(String, Box<Term>, Box<Term>),
    Plet(String, Box<Term>, String, Box<Term>, Box<Term>),
    Fix(Box<Term>),
    Assign(Box<Term>, Box<Term>),
    Deref(Box<Term>),
    Grab(Box<Term>),
    Release(Box<Term>),
    NewRef(String, u64, Box<Term>),
    NewSem(String, u64, Box<Term>),
    MkVar(Box<Term>, Box<Term>),
    MkSem(Box<Term>, Box<Term>),
    Bot(Ty),
    /// Runtime memory locations (never produced by the parser).
    Loc(usize),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "{x}"),
            Term::Lam(x, t, m) => write!(f, "\\{x}:{t}. {m}"),
            Term::App(m, n) => write!(f, "({m}) ({n})"),
            Term::Skip => write!(f, "skip"),
            Term::Tt => write!(f, "tt"),
            Term::Ff => write!(f, "ff"),
            Term::Num(n) => write!(f, "{n}"),
            Term::Seq(m, n) => write!(f, "({m}; {n})"),
            Term::If(c, a, b) => write!(f, "if {c} then {a} else {b}"),
            Term::Succ(m) => write!(f, "succ ({m})"),
            Term::Pred(m) => write!(f, "pred ({m})"),
            Term::IsZero(m) => write!(f, "iszero ({m})"),
            Term::Let(x, n, m) => write!(f, "let {x} = {n} in {m}"),
            Term::Plet(x, n1, y, n2, m) => {
                write!(f, "plet {x} = {n1} and {y} = {n2} in {m}")
            }
            Term::Fix(m) => write!(f, "Y ({m})"),
            Term::Assign(m, n) => write!(f, "({m}) := ({n})"),
            Term::Deref(m) => write!(f, "!({m})"),
            Term::Grab(m) => write!(f, "grab ({m})"),
            Term::Release(m) => write!(f, "release ({m})"),
            Term::NewRef(x, n, m) => write!(f, "newref {x} := {n} in {m}"),
            Term::NewSem(x, n, m) => write!(f, "newsem {x} := {n} in {m}"),
            Term::MkVar(m, n) => write!(f, "mkvar ({m}) ({n})"),
            Term::MkSem(m, n) => write!(f, "mksem ({m}) ({n})"),
            Term::Bot(t) => write!(f, "bot[{t}]"),
            Term::Loc(l) => write!(f, "<loc{l}>"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LangError {
    #[error("parse error at byte {0}: {1}")]
    Parse(usize, String),
    #[error("type error: {0}")]
    Type(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("fuel exhausted after {0} states")]
    Fuel(usize),
    #[error(transparent)]
    Strategy(#[from] crate::strategy::StrategyError),
    #[error(transparent)]
    Es(#[from] crate::es::EsError),
    #[error(transparent)]
    Arena(#[from] crate::arena::ArenaError),
}

// ------------------------------------------------------------------- parser

/// Surface terms, before sugar elimination.
#[derive(Debug, Clone)]
enum Sur {
    Var(String),
    Lam(String, Ty, Box<Sur>),
    App(Box<Sur>, Box<Sur>),
    Skip,
    Tt,
    Ff,
    Num(u64),
    Seq(Box<Sur>, Box<Sur>),
    If(Box<Sur>, Box<Sur>, Box<Sur>),
    Succ(Box<Sur>),
    Pred(Box<Sur>),
    IsZero(Box<Sur>),
    Let(String, Box<Sur>, Box<Sur>),
    Plet(String, Box<Sur>, String, Box<Sur>, Box<Sur>),
    Fix(Box<Sur>),
    Assign(Box<Sur>, Box<Sur>),
    Deref(Box<Sur>),
    Grab(Box<Sur>),
    Release(Box<Sur>),
    NewRef(String, u64, Box<Sur>),
    NewSem(String, u64, Box<Sur>),
    MkVar(Box<Sur>, Box<Sur>),
    MkSem(Box<Sur>, Box<Sur>),
    Bot(Option<Ty>),
    // Sugar.
    Par(Box<Sur>, Box<Sur>),
    Choice(Box<Sur>, Box<Sur>),
    Eq(Box<Sur>, Box<Sur>),
    Not(Box<Sur>),
    Assume(Box<Sur>),
    Case(Box<Sur>, Vec<(Sur, Sur)>),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Parser<'a> {
        Parser { src: src.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, LangError> {
        Err(LangError::Parse(self.pos, msg.into()))
    }

    fn skip_ws(&mut self) {
        loop {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            // Line comments: `--` to end of line (but not `-- expect:` markers,
            // which never reach the parser).
            if self.src[self.pos..].starts_with(b"--") {
                while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                return;
            }
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok.as_bytes()) {
            // Keywords must not swallow identifier prefixes.
            let end = self.pos + tok.len();
            let kw = tok.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_');
            if kw {
                if let Some(&c) = self.src.get(end) {
                    if c.is_ascii_alphanumeric() || c == b'_' {
                        return false;
                    }
                }
            }
            self.pos = end;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), LangError> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected `{tok}`"))
        }
    }

    fn ident(&mut self) -> Result<String, LangError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if self.pos == start || self.src[start].is_ascii_digit() {
            return self.err("expected identifier");
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn number(&mut self) -> Result<u64, LangError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected number");
        }
        String::from_utf8_lossy(&self.src[start..self.pos])
            .parse()
            .map_err(|_| LangError::Parse(start, "bad number".into()))
    }

    fn ty(&mut self) -> Result<Ty, LangError> {
        let lhs = self.ty_atom()?;
        if self.eat("->") {
            let rhs = self.ty()?;
            Ok(Ty::Arrow(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn ty_atom(&mut self) -> Result<Ty, LangError> {
        if self.eat("(") {
            let t = self.ty()?;
            self.expect(")")?;
            return Ok(t);
        }
        if self.eat("ref") {
            return Ok(Ty::Ref);
        }
        if self.eat("sem") {
            return Ok(Ty::Sem);
        }
        if self.eat("U") {
            return Ok(Ty::Unit);
        }
        if self.eat("B") {
            return Ok(Ty::Bool);
        }
        if self.eat("N") {
            return Ok(Ty::Nat);
        }
        self.err("expected type")
    }

    /// Sequencing / parallel / choice level (lowest precedence, right-assoc).
    fn term(&mut self) -> Result<Sur, LangError> {
        let lhs = self.cmp()?;
        if self.eat(";") {
            let rhs = self.term()?;
            return Ok(Sur::Seq(Box::new(lhs), Box::new(rhs)));
        }
        if self.eat("||") {
            let rhs = self.term()?;
            return Ok(Sur::Par(Box::new(lhs), Box::new(rhs)));
        }
        if self.eat("+|") {
            let rhs = self.term()?;
            return Ok(Sur::Choice(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn cmp(&mut self) -> Result<Sur, LangError> {
        let lhs = self.assign()?;
        if self.eat("==") {
            let rhs = self.assign()?;
            return Ok(Sur::Eq(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn assign(&mut self) -> Result<Sur, LangError> {
        let lhs = self.app()?;
        if self.eat(":=") {
            let rhs = self.app()?;
            return Ok(Sur::Assign(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn app(&mut self) -> Result<Sur, LangError> {
        let mut head = self.atom()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(c)
                    if c == b'('
                        || c == b'!'
                        || c.is_ascii_digit()
                        || (c.is_ascii_alphanumeric() && !self.at_keyword()) =>
                {
                    let arg = self.atom()?;
                    head = Sur::App(Box::new(head), Box::new(arg));
                }
                _ => return Ok(head),
            }
        }
    }

    /// Is the cursor at a keyword that terminates an application chain?
    fn at_keyword(&mut self) -> bool {
        self.skip_ws();
        for kw in [
            "then", "else", "in", "and", "of", "->", "then", "expect",
        ] {
            if self.src[self.pos..].starts_with(kw.as_bytes()) {
                let end = self.pos + kw.len();
                match self.src.get(end) {
                    Some(&c) if c.is_ascii_alphanumeric() || c == b'_' => continue,
                    _ => return true,
                }
            }
        }
        false
    }

    fn atom(&mut self) -> Result<Sur, LangError> {
        if self.eat("(") {
            let t = self.term()?;
            self.expect(")")?;
            return Ok(t);
        }
        if self.eat("\\") {
            let x = self.ident()?;
            self.expect(":")?;
            let t = self.ty()?;
            self.expect(".")?;
            let body = self.term()?;
            return Ok(Sur::Lam(x, t, Box::new(body)));
        }
        if self.eat("!") {
            let m = self.atom()?;
            return Ok(Sur::Deref(Box::new(m)));
        }
        if self.eat("skip") {
            return Ok(Sur::Skip);
        }
        if self.eat("tt") {
            return Ok(Sur::Tt);
        }
        if self.eat("ff") {
            return Ok(Sur::Ff);
        }
        if self.eat("if") {
            let c = self.term()?;
            self.expect("then")?;
            let a = self.term()?;
            self.expect("else")?;
            let b = self.atom_or_term()?;
            return Ok(Sur::If(Box::new(c), Box::new(a), Box::new(b)));
        }
        if self.eat("succ") {
            return Ok(Sur::Succ(Box::new(self.atom()?)));
        }
        if self.eat("pred") {
            return Ok(Sur::Pred(Box::new(self.atom()?)));
        }
        if self.eat("iszero") {
            return Ok(Sur::IsZero(Box::new(self.atom()?)));
        }
        if self.eat("not") {
            return Ok(Sur::Not(Box::new(self.atom()?)));
        }
        if self.eat("assume") {
            return Ok(Sur::Assume(Box::new(self.atom()?)));
        }
        if self.eat("grab") {
            return Ok(Sur::Grab(Box::new(self.atom()?)));
        }
        if self.eat("release") {
            return Ok(Sur::Release(Box::new(self.atom()?)));
        }
        if self.eat("let") {
            let x = self.ident()?;
            self.expect("=")?;
            let n = self.term()?;
            self.expect("in")?;
            let m = self.term()?;
            return Ok(Sur::Let(x, Box::new(n), Box::new(m)));
        }
        if self.eat("plet") {
            let x = self.ident()?;
            self.expect("=")?;
            let n1 = self.term()?;
            self.expect("and")?;
            let y = self.ident()?;
            self.expect("=")?;
            let n2 = self.term()?;
            self.expect("in")?;
            let m = self.term()?;
            return Ok(Sur::Plet(x, Box::new(n1), y, Box::new(n2), Box::new(m)));
        }
        if self.eat("newref") {
            let x = self.ident()?;
            self.expect(":=")?;
            let n = self.number()?;
            self.expect("in")?;
            let m = self.term()?;
            return Ok(Sur::NewRef(x, n, Box::new(m)));
        }
        if self.eat("newsem") {
            let x = self.ident()?;
            self.expect(":=")?;
            let n = self.number()?;
            self.expect("in")?;
            let m = self.term()?;
            return Ok(Sur::NewSem(x, n, Box::new(m)));
        }
        if self.eat("mkvar") {
            let m = self.atom()?;
            let n = self.atom()?;
            return Ok(Sur::MkVar(Box::new(m), Box::new(n)));
        }
        if self.eat("mksem") {
            let m = self.atom()?;
            let n = self.atom()?;
            return Ok(Sur::MkSem(Box::new(m), Box::new(n)));
        }
        if self.eat("case") {
            let scrut = self.term()?;
            self.expect("of")?;
            self.expect("{")?;
            let mut arms = Vec::new();
            loop {
                let v = self.atom()?;
                self.expect("->")?;
                let body = self.term()?;
                arms.push((v, body));
                if !self.eat("|") {
                    break;
                }
            }
            self.expect("}")?;
            return Ok(Sur::Case(Box::new(scrut), arms));
        }
        if self.eat("bot") {
            if self.eat("[") {
                let t = self.ty()?;
                self.expect("]")?;
                return Ok(Sur::Bot(Some(t)));
            }
            return Ok(Sur::Bot(None));
        }
        if self.eat("Y") {
            return Ok(Sur::Fix(Box::new(self.atom()?)));
        }
        if let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                return Ok(Sur::Num(self.number()?));
            }
            if c.is_ascii_alphabetic() || c == b'_' {
                return Ok(Sur::Var(self.ident()?));
            }
        }
        self.err("expected a term")
    }

    /// `else` branches extend as far as possible.
    fn atom_or_term(&mut self) -> Result<Sur, LangError> {
        self.term()
    }
}

/// Parse a surface term and elaborate it (desugar + typecheck) in `ctx`.
pub fn parse(src: &str, ctx: &[(String, Ty)]) -> Result<(Term, Ty), LangError> {
    let mut p = Parser::new(src);
    let sur = p.term()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.err("trailing input");
    }
    let mut env: Vec<(String, Ty)> = ctx.to_vec();
    elaborate(&sur, &mut env, None)
}

// -------------------------------------------------------- elaborate + types

fn ground(t: &Ty) -> bool {
    t.is_ground()
}

/// Desugar and typecheck in one pass. `expected` guides `bot` without an
/// annotation.
fn elaborate(
    s: &Sur,
    env: &mut Vec<(String, Ty)>,
    expected: Option<&Ty>,
) -> Result<(Term, Ty), LangError> {
    use Term as T;
    let err = |m: String| Err(LangError::Type(m));
    match s {
        Sur::Var(x) => match env.iter().rev().find(|(y, _)| y == x) {
            Some((_, t)) => Ok((T::Var(x.clone()), t.clone())),
            None => err(format!("unbound variable {x}")),
        },
        Sur::Lam(x, t, body) => {
            env.push((x.clone(), t.clone()));
            let want = match expected {
                Some(Ty::Arrow(_, b)) => Some((**b).clone()),
                _ => None,
            };
            let (m, bt) = elaborate(body, env, want.as_ref())?;
            env.pop();
            Ok((
                T::Lam(x.clone(), t.clone(), Box::new(m)),
                Ty::Arrow(Box::new(t.clone()), Box::new(bt)),
            ))
        }
        Sur::App(f, a) => {
            let (mf, tf) = elaborate(f, env, None)?;
            match tf {
                Ty::Arrow(ta, tb) => {
                    let (ma, ta2) = elaborate(a, env, Some(&ta))?;
                    if ta2 != *ta {
                        return err(format!("argument has type {ta2}, expected {ta}"));
                    }
                    Ok((T::App(Box::new(mf), Box::new(ma)), *tb))
                }
                t => err(format!("applying a non-function of type {t}")),
            }
        }
        Sur::Skip => Ok((T::Skip, Ty::Unit)),
        Sur::Tt => Ok((T::Tt, Ty::Bool)),
        Sur::Ff => Ok((T::Ff, Ty::Bool)),
        Sur::Num(n) => Ok((T::Num(*n), Ty::Nat)),
        Sur::Seq(a, b) => {
            let (ma, ta) = elaborate(a, env, Some(&Ty::Unit))?;
            if ta != Ty::Unit {
                return err(format!("`;` sequences a {ta}, expected U"));
            }
            let (mb, tb) = elaborate(b, env, expected)?;
            if !ground(&tb) {
                return err(format!("`;` continues with non-ground type {tb}"));
            }
            Ok((T::Seq(Box::new(ma), Box::new(mb)), tb))
        }
        Sur::If(c, a, b) => {
            let (mc, tc) = elaborate(c, env, Some(&Ty::Bool))?;
            if tc != Ty::Bool {
                return err(format!("condition has type {tc}"));
            }
            let (ma, ta) = elaborate(a, env, expected)?;
            let (mb, tb) = elaborate(b, env, Some(&ta))?;
            if ta != tb {
                return err(format!("branches have types {ta} and {tb}"));
            }
            if !ground(&ta) {
                return err(format!("conditional at non-ground type {ta}"));
            }
            Ok((T::If(Box::new(mc), Box::new(ma), Box::new(mb)), ta))
        }
        Sur::Succ(m) => {
            let (mm, t) = elaborate(m, env, Some(&Ty::Nat))?;
            if t != Ty::Nat {
                return err(format!("succ of a {t}"));
            }
            Ok((T::Succ(Box::new(mm)), Ty::Nat))
        }
        Sur::Pred(m) => {
            let (mm, t) = elaborate(m, env, Some(&Ty::Nat))?;
            if t != Ty::Nat {
                return err(format!("pred of a {t}"));
            }
            Ok((T::Pred(Box::new(mm)), Ty::Nat))
        }
        Sur::IsZero(m) => {
            let (mm, t) = elaborate(m, env, Some(&Ty::Nat))?;
            if t != Ty::Nat {
                return err(format!("iszero of a {t}"));
            }
            Ok((T::IsZero(Box::new(mm)), Ty::Bool))
        }
        Sur::Let(x, n, m) => {
            let (mn, tn) = elaborate(n, env, None)?;
            if !ground(&tn) {
                return err(format!("let binds non-ground type {tn}"));
            }
            env.push((x.clone(), tn));
            let (mm, tm) = elaborate(m, env, expected)?;
            env.pop();
            if !ground(&tm) {
                return err(format!("let body at non-ground type {tm}"));
            }
            Ok((T::Let(x.clone(), Box::new(mn), Box::new(mm)), tm))
        }
        Sur::Plet(x, n1, y, n2, m) => {
            let (m1, t1) = elaborate(n1, env, None)?;
            let (m2, t2) = elaborate(n2, env, Some(&t1))?;
            if t1 != t2 || !ground(&t1) {
                return err(format!("plet binds types {t1} and {t2}"));
            }
            env.push((x.clone(), t1.clone()));
            env.push((y.clone(), t1));
            let (mm, tm) = elaborate(m, env, expected)?;
            env.pop();
            env.pop();
            if !ground(&tm) {
                return err(format!("plet body at non-ground type {tm}"));
            }
            Ok((
                T::Plet(x.clone(), Box::new(m1), y.clone(), Box::new(m2), Box::new(mm)),
                tm,
            ))
        }
        Sur::Fix(m) => {
            let (mm, t) = elaborate(m, env, None)?;
            match t {
                Ty::Arrow(a, b) if *a == *b => Ok((T::Fix(Box::new(mm)), *a)),
                t => err(format!("Y applied at type {t}")),
            }
        }
        Sur::Assign(m, n) => {
            let (mm, tm) = elaborate(m, env, Some(&Ty::Ref))?;
            if tm != Ty::Ref {
                return err(format!("assignment to a {tm}"));
            }
            let (mn, tn) = elaborate(n, env, Some(&Ty::Nat))?;
            if tn != Ty::Nat {
                return err(format!("assigning a {tn}"));
            }
            Ok((T::Assign(Box::new(mm), Box::new(mn)), Ty::Unit))
        }
        Sur::Deref(m) => {
            let (mm, tm) = elaborate(m, env, Some(&Ty::Ref))?;
            if tm != Ty::Ref {
                return err(format!("dereferencing a {tm}"));
            }
            Ok((T::Deref(Box::new(mm)), Ty::Nat))
        }
        Sur::Grab(m) => {
            let (mm, tm) = elaborate(m, env, Some(&Ty::Sem))?;
            if tm != Ty::Sem {
                return err(format!("grab of a {tm}"));
            }
            Ok((T::Grab(Box::new(mm)), Ty::Unit))
        }
        Sur::Release(m) => {
            let (mm, tm) = elaborate(m, env, Some(&Ty::Sem))?;
            if tm != Ty::Sem {
                return err(format!("release of a {tm}"));
            }
            Ok((T::Release(Box::new(mm)), Ty::Unit))
        }
        Sur::NewRef(x, n, m) => {
            env.push((x.clone(), Ty::Ref));
            let (mm, tm) = elaborate(m, env, expected)?;
            env.pop();
            if !ground(&tm) {
                return err(format!("newref body at non-ground type {tm}"));
            }
            Ok((T::NewRef(x.clone(), *n, Box::new(mm)), tm))
        }
        Sur::NewSem(x, n, m) => {
            env.push((x.clone(), Ty::Sem));
            let (mm, tm) = elaborate(m, env, expected)?;
            env.pop();
            if !ground(&tm) {
                return err(format!("newsem body at non-ground type {tm}"));
            }
            Ok((T::NewSem(x.clone(), *n, Box::new(mm)), tm))
        }
        Sur::MkVar(m, n) => {
            let wt = Ty::Arrow(Box::new(Ty::Nat), Box::new(Ty::Unit));
            let (mm, tm) = elaborate(m, env, Some(&wt))?;
            if tm != wt {
                return err(format!("mkvar writer has type {tm}"));
            }
            let (mn, tn) = elaborate(n, env, Some(&Ty::Nat))?;
            if tn != Ty::Nat {
                return err(format!("mkvar reader has type {tn}"));
            }
            Ok((T::MkVar(Box::new(mm), Box::new(mn)), Ty::Ref))
        }
        Sur::MkSem(m, n) => {
            let (mm, tm) = elaborate(m, env, Some(&Ty::Unit))?;
            let (mn, tn) = elaborate(n, env, Some(&Ty::Unit))?;
            if tm != Ty::Unit || tn != Ty::Unit {
                return err(format!("mksem methods have types {tm}, {tn}"));
            }
            Ok((T::MkSem(Box::new(mm), Box::new(mn)), Ty::Sem))
        }
        Sur::Bot(t) => match t.clone().or_else(|| expected.cloned()) {
            Some(t) => Ok((T::Bot(t.clone()), t)),
            None => err("cannot infer the type of bot; annotate as bot[T]".into()),
        },
        // ------------------------------------------------------------ sugar
        Sur::Par(a, b) => {
            // M ∥ N  :=  plet x = M and y = N in skip.
            let (ma, ta) = elaborate(a, env, Some(&Ty::Unit))?;
            let (mb, tb) = elaborate(b, env, Some(&Ty::Unit))?;
            if ta != Ty::Unit || tb != Ty::Unit {
                return err(format!("`||` composes types {ta} and {tb}"));
            }
            Ok((
                T::Plet(
                    "_p1".into(),
                    Box::new(ma),
                    "_p2".into(),
                    Box::new(mb),
                    Box::new(T::Skip),
                ),
                Ty::Unit,
            ))
        }
        Sur::Choice(a, b) => {
            // M +| N: an internal coin flip implemented by a race on state.
            let (ma, ta) = elaborate(a, env, expected)?;
            let (mb, tb) = elaborate(b, env, Some(&ta))?;
            if ta != tb || !ground(&ta) {
                return err(format!("`+|` mixes types {ta} and {tb}"));
            }
            let x = "_cx".to_string();
            let y = "_cy".to_string();
            let race = T::Plet(
                "_r1".into(),
                Box::new(T::Assign(Box::new(T::Var(x.clone())), Box::new(T::Num(1)))),
                "_r2".into(),
                Box::new(T::Assign(
                    Box::new(T::Var(y.clone())),
                    Box::new(T::Deref(Box::new(T::Var(x.clone())))),
                )),
                Box::new(T::Skip),
            );
            let body = T::Seq(
                Box::new(race),
                Box::new(T::If(
                    Box::new(T::IsZero(Box::new(T::Deref(Box::new(T::Var(y.clone())))))),
                    Box::new(ma),
                    Box::new(mb),
                )),
            );
            Ok((
                T::NewRef(x, 0, Box::new(T::NewRef(y, 0, Box::new(body)))),
                ta,
            ))
        }
        Sur::Eq(a, b) => {
            let (ma, ta) = elaborate(a, env, None)?;
            let (mb, tb) = elaborate(b, env, Some(&ta))?;
            if ta != tb || !ground(&ta) {
                return err(format!("`==` compares types {ta} and {tb}"));
            }
            let m = match ta {
                Ty::Unit => T::Seq(Box::new(ma), Box::new(T::Seq(Box::new(mb), Box::new(T::Tt)))),
                Ty::Bool => T::If(
                    Box::new(ma),
                    Box::new(mb.clone()),
                    Box::new(T::If(Box::new(mb), Box::new(T::Ff), Box::new(T::Tt))),
                ),
                Ty::Nat => match (&ma, &mb) {
                    // Literals compare at elaboration time.
                    (T::Num(i), T::Num(j)) => {
                        if i == j {
                            T::Tt
                        } else {
                            T::Ff
                        }
                    }
                    // One literal side: a short pred/iszero probe of the other.
                    (T::Num(k), _) => {
                        let x = "_eq".to_string();
                        let cmp = eq_nat_const(&T::Var(x.clone()), *k);
                        T::Let(x, Box::new(mb), Box::new(cmp))
                    }
                    (_, T::Num(k)) => {
                        let x = "_eq".to_string();
                        let cmp = eq_nat_const(&T::Var(x.clone()), *k);
                        T::Let(x, Box::new(ma), Box::new(cmp))
                    }
                    // General case: bounded nested comparison chains.
                    _ => {
                        let a_name = "_ea".to_string();
                        let b_name = "_eb".to_string();
                        let mut arms = T::Bot(Ty::Bool);
                        // if a == k then (iszero-like compare of b against k).
                        for k in (0..=MAX_EQ_NAT).rev() {
                            let cmp = eq_nat_const(&T::Var(b_name.clone()), k);
                            arms = T::If(
                                Box::new(eq_nat_const(&T::Var(a_name.clone()), k)),
                                Box::new(cmp),
                                Box::new(arms),
                            );
                        }
                        T::Let(
                            a_name,
                            Box::new(ma),
                            Box::new(T::Let(b_name, Box::new(mb), Box::new(arms))),
                        )
                    }
                },
                _ => unreachable!(),
            };
            Ok((m, Ty::Bool))
        }
        Sur::Not(m) => {
            let (mm, t) = elaborate(m, env, Some(&Ty::Bool))?;
            if t != Ty::Bool {
                return err(format!("not of a {t}"));
            }
            Ok((
                T::If(Box::new(mm), Box::new(T::Ff), Box::new(T::Tt)),
                Ty::Bool,
            ))
        }
        Sur::Assume(m) => {
            let (mm, t) = elaborate(m, env, Some(&Ty::Bool))?;
            if t != Ty::Bool {
                return err(format!("assume of a {t}"));
            }
            Ok((
                T::If(Box::new(mm), Box::new(T::Skip), Box::new(T::Bot(Ty::Unit))),
                Ty::Unit,
            ))
        }
        Sur::Case(scrut, arms) => {
            // case M of {v -> N | ...}  ==  let x = M in if x == v then N ...
            let (ms, ts) = elaborate(scrut, env, None)?;
            if !ground(&ts) {
                return err(format!("case on non-ground type {ts}"));
            }
            let x = "_case".to_string();
            env.push((x.clone(), ts.clone()));
            let mut out: Option<(Term, Ty)> = None;
            for (v, body) in arms.iter().rev() {
                let test = Sur::Eq(Box::new(Sur::Var(x.clone())), Box::new(v.clone()));
                let (mt, _) = elaborate(&test, env, None)?;
                let (mb, tb) = elaborate(body, env, expected)?;
                if !ground(&tb) {
                    env.pop();
                    return err(format!("case arm at non-ground type {tb}"));
                }
                let rest = match out {
                    Some((r, rt)) => {
                        if rt != tb {
                            env.pop();
                            return err(format!("case arms at types {rt} and {tb}"));
                        }
                        r
                    }
                    None => T::Bot(tb.clone()),
                };
                out = Some((T::If(Box::new(mt), Box::new(mb), Box::new(rest)), tb));
            }
            env.pop();
            match out {
                Some((body, t)) => {
                    Ok((T::Let(x, Box::new(ms), Box::new(body)), t))
                }
                None => err("empty case".into()),
            }
        }
    }
}

/// A bound on the ℕ values comparable by the `==` sugar.
const MAX_EQ_NAT: u64 = 8;

/// `m == k` for a constant `k`, via iterated pred/iszero.
fn eq_nat_const(m: &Term, k: u64) -> Term {
    let mut t = m.clone();
    for _ in 0..k {
        t = Term::Pred(Box::new(t));
    }
    let mut out = Term::IsZero(Box::new(t));
    // pred truncates at 0, so additionally require m > k-1.
    if k > 0 {
        let mut t2 = m.clone();
        for _ in 0..k - 1 {
            t2 = Term::Pred(Box::new(t2));
        }
        out = Term::If(
            Box::new(Term::IsZero(Box::new(t2))),
            Box::new(Term::Ff),
            Box::new(out),
        );
    }
    out
}

/// Typecheck a core term, returning its type.
pub fn typecheck(ctx: &[(String, Ty)], term: &Term) -> Result<Ty, LangError> {
    let err = |m: String| Err(LangError::Type(m));
    use Term as T;
    match term {
        T::Var(x) => match ctx.iter().rev().find(|(y, _)| y == x) {
            Some((_, t)) => Ok(t.clone()),
            None => err(format!("unbound variable {x}")),
        },
        T::Lam(x, t, m) => {
            let mut c = ctx.to_vec();
            c.push((x.clone(), t.clone()));
            let tb = typecheck(&c, m)?;
            Ok(Ty::Arrow(Box::new(t.clone()), Box::new(tb)))
        }
        T::App(m, n) => match typecheck(ctx, m)? {
            Ty::Arrow(a, b) => {
                let ta = typecheck(ctx, n)?;
                if ta == *a {
                    Ok(*b)
                } else {
                    err(format!("argument type {ta} vs {a}"))
                }
            }
            t => err(format!("application of {t}")),
        },
        T::Skip => Ok(Ty::Unit),
        T::Tt | T::Ff => Ok(Ty::Bool),
        T::Num(_) => Ok(Ty::Nat),
        T::Seq(m, n) => {
            if typecheck(ctx, m)? != Ty::Unit {
                return err("sequencing non-unit".into());
            }
            typecheck(ctx, n)
        }
        T::If(c, a, b) => {
            if typecheck(ctx, c)? != Ty::Bool {
                return err("non-boolean condition".into());
            }
            let ta = typecheck(ctx, a)?;
            if typecheck(ctx, b)? != ta {
                return err("branch mismatch".into());
            }
            Ok(ta)
        }
        T::Succ(m) | T::Pred(m) => {
            if typecheck(ctx, m)? != Ty::Nat {
                return err("arithmetic on non-nat".into());
            }
            Ok(Ty::Nat)
        }
        T::IsZero(m) => {
            if typecheck(ctx, m)? != Ty::Nat {
                return err("iszero on non-nat".into());
            }
            Ok(Ty::Bool)
        }
        T::Let(x, n, m) => {
            let tn = typecheck(ctx, n)?;
            let mut c = ctx.to_vec();
            c.push((x.clone(), tn));
            typecheck(&c, m)
        }
        T::Plet(x, n1, y, n2, m) => {
            let t1 = typecheck(ctx, n1)?;
            let t2 = typecheck(ctx, n2)?;
            if t1 != t2 {
                return err("plet type mismatch".into());
            }
            let mut c = ctx.to_vec();
            c.push((x.clone(), t1.clone()));
            c.push((y.clone(), t1));
            typecheck(&c, m)
        }
        T::Fix(m) => match typecheck(ctx, m)? {
            Ty::Arrow(a, b) if a == b => Ok(*a),
            t => err(format!("Y at type {t}")),
        },
        T::Assign(m, n) => {
            if typecheck(ctx, m)? != Ty::Ref || typecheck(ctx, n)? != Ty::Nat {
                return err("bad assignment".into());
            }
            Ok(Ty::Unit)
        }
        T::Deref(m) => {
            if typecheck(ctx, m)? != Ty::Ref {
                return err("bad dereference".into());
            }
            Ok(Ty::Nat)
        }
        T::Grab(m) => {
            if typecheck(ctx, m)? != Ty::Sem {
                return err("bad grab".into());
            }
            Ok(Ty::Unit)
        }
        T::Release(m) => {
            if typecheck(ctx, m)? != Ty::Sem {
                return err("bad release".into());
            }
            Ok(Ty::Unit)
        }
        T::NewRef(x, _, m) => {
            let mut c = ctx.to_vec();
            c.push((x.clone(), Ty::Ref));
            typecheck(&c, m)
        }
        T::NewSem(x, _, m) => {
            let mut c = ctx.to_vec();
            c.push((x.clone(), Ty::Sem));
            typecheck(&c, m)
        }
        T::MkVar(m, n) => {
            let wt = Ty::Arrow(Box::new(Ty::Nat), Box::new(Ty::Unit));
            if typecheck(ctx, m)? != wt || typecheck(ctx, n)? != Ty::Nat {
                return err("bad mkvar".into());
            }
            Ok(Ty::Ref)
        }
        T::MkSem(m, n) => {
            if typecheck(ctx, m)? != Ty::Unit || typecheck(ctx, n)? != Ty::Unit {
                return err("bad mksem".into());
            }
            Ok(Ty::Sem)
        }
        T::Bot(t) => Ok(t.clone()),
        T::Loc(_) => err("location outside run".into()),
    }
}

// ----------------------------------------------------- operational semantics

/// A store: location → contents, with the location's kind.
pub type Store = BTreeMap<usize, (LocKind, u64)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LocKind {
    Ref,
    Sem,
}

pub fn is_value(t: &Term) -> bool {
    matches!(t, Term::Skip | Term::Tt | Term::Ff | Term::Num(_))
}

fn subst(t: &Term, x: &str, v: &Term) -> Term {
    use Term as T;
    let s = |m: &Term| subst(m, x, v);
    match t {
        T::Var(y) => {
            if y == x {
                v.clone()
            } else {
                t.clone()
            }
        }
        T::Lam(y, ty, m) => {
            if y == x {
                t.clone()
            } else {
                T::Lam(y.clone(), ty.clone(), Box::new(s(m)))
            }
        }
        T::App(m, n) => T::App(Box::new(s(m)), Box::new(s(n))),
        T::Skip | T::Tt | T::Ff | T::Num(_) | T::Bot(_) | T::Loc(_) => t.clone(),
        T::Seq(m, n) => T::Seq(Box::new(s(m)), Box::new(s(n))),
        T::If(c, a, b) => T::If(Box::new(s(c)), Box::new(s(a)), Box::new(s(b))),
        T::Succ(m) => T::Succ(Box::new(s(m))),
        T::Pred(m) => T::Pred(Box::new(s(m))),
        T::IsZero(m) => T::IsZero(Box::new(s(m))),
        T::Let(y, n, m) => T::Let(
            y.clone(),
            Box::new(s(n)),
            Box::new(if y == x { (**m).clone() } else { s(m) }),
        ),
        T::Plet(y1, n1, y2, n2, m) => T::Plet(
            y1.clone(),
            Box::new(s(n1)),
            y2.clone(),
            Box::new(s(n2)),
            Box::new(if y1 == x || y2 == x { (**m).clone() } else { s(m) }),
        ),
        T::Fix(m) => T::Fix(Box::new(s(m))),
        T::Assign(m, n) => T::Assign(Box::new(s(m)), Box::new(s(n))),
        T::Deref(m) => T::Deref(Box::new(s(m))),
        T::Grab(m) => T::Grab(Box::new(s(m))),
        T::Release(m) => T::Release(Box::new(s(m))),
        T::NewRef(y, n, m) => T::NewRef(
            y.clone(),
            *n,
            Box::new(if y == x { (**m).clone() } else { s(m) }),
        ),
        T::NewSem(y, n, m) => T::NewSem(
            y.clone(),
            *n,
            Box::new(if y == x { (**m).clone() } else { s(m) }),
        ),
        T::MkVar(m, n) => T::MkVar(Box::new(s(m)), Box::new(s(n))),
        T::MkSem(m, n) => T::MkSem(Box::new(s(m)), Box::new(s(n))),
    }
}

/// All one-step successors of `⟨M, s⟩` under the nondeterministic scheduler.
/// `Err(Budget)` signals a successor value above `nat_max`.
pub fn step(term: &Term, store: &Store, budget: &Budget) -> Result<Vec<(Term, Store)>, LangError> {
    use Term as T;
    let mut out: Vec<(Term, Store)> = Vec::new();
    let same = |m: Term, out: &mut Vec<(Term, Store)>| out.push((m, store.clone()));
    match term {
        T::App(m, n) => {
            if let T::Lam(x, _, body) = &**m {
                same(subst(body, x, n), &mut out);
            }
            for (m2, s2) in step(m, store, budget)? {
                out.push((T::App(Box::new(m2), n.clone()), s2));
            }
        }
        T::Seq(m, n) => {
            if matches!(**m, T::Skip) {
                same((**n).clone(), &mut out);
            }
            // Congruence on the left operand (needed for progress).
            for (m2, s2) in step(m, store, budget)? {
                out.push((T::Seq(Box::new(m2), n.clone()), s2));
            }
        }
        T::If(c, a, b) => {
            match &**c {
                T::Tt => same((**a).clone(), &mut out),
                T::Ff => same((**b).clone(), &mut out),
                _ => {}
            }
            for (c2, s2) in step(c, store, budget)? {
                out.push((T::If(Box::new(c2), a.clone(), b.clone()), s2));
            }
        }
        T::Succ(m) => {
            if let T::Num(n) = &**m {
                if n + 1 > budget.nat_max as u64 {
                    return Err(LangError::Budget(format!(
                        "succ {} exceeds nat_max {}",
                        n, budget.nat_max
                    )));
                }
                same(T::Num(n + 1), &mut out);
            }
            for (m2, s2) in step(m, store, budget)? {
                out.push((T::Succ(Box::new(m2)), s2));
            }
        }
        T::Pred(m) => {
            if let T::Num(n) = &**m {
                same(T::Num(n.saturating_sub(1)), &mut out);
            }
            // Congruence (needed for progress on pred redexes).
            for (m2, s2) in step(m, store, budget)? {
                out.push((T::Pred(Box::new(m2)), s2));
            }
        }
        T::IsZero(m) => {
            if let T::Num(n) = &**m {
                same(if *n == 0 { T::Tt } else { T::Ff }, &mut out);
            }
            for (m2, s2) in step(m, store, budget)? {
                out.push((T::IsZero(Box::new(m2)), s2));
            }
        }
        T::Fix(m) => {
            same(
                T::App(m.clone(), Box::new(T::Fix(m.clone()))),
                &mut out,
            );
        }
        T::Let(x, n, m) => {
            if is_value(n) {
                same(subst(m, x, n), &mut out);
            }
            for (n2, s2) in step(n, store, budget)? {
                out.push((T::Let(x.clone(), Box::new(n2), m.clone()), s2));
            }
        }
        T::Plet(x1, n1, x2, n2, m) => {
            if is_value(n1) && is_value(n2) {
                same(subst(&subst(m, x1, n1), x2, n2), &mut out);
            }
            for (a, s2) in step(n1, store, budget)? {
                out.push((
                    T::Plet(x1.clone(), Box::new(a), x2.clone(), n2.clone(), m.clone()),
                    s2,
                ));
            }
            for (b, s2) in step(n2, store, budget)? {
                out.push((
                    T::Plet(x1.clone(), n1.clone(), x2.clone(), Box::new(b), m.clone()),
                    s2,
                ));
            }
        }
        T::Assign(m, n) => {
            match (&**m, &**n) {
                (T::Loc(l), T::Num(v)) => {
                    if let Some((LocKind::Ref, _)) = store.get(l) {
                        let mut s2 = store.clone();
                        s2.insert(*l, (LocKind::Ref, *v));
                        out.push((T::Skip, s2));
                    }
                }
                (T::MkVar(w, _), T::Num(v)) => {
                    same(T::App(w.clone(), Box::new(T::Num(*v))), &mut out);
                }
                _ => {}
            }
            // Argument first, then the reference expression once it's a value.
            for (n2, s2) in step(n, store, budget)? {
                out.push((T::Assign(m.clone(), Box::new(n2)), s2));
            }
            if is_value(n) || matches!(**n, T::Num(_)) {
                for (m2, s2) in step(m, store, budget)? {
                    out.push((T::Assign(Box::new(m2), n.clone()), s2));
                }
            }
        }
        T::Deref(m) => {
            match &**m {
                T::Loc(l) => {
                    if let Some((LocKind::Ref, v)) = store.get(l) {
                        same(T::Num(*v), &mut out);
                    }
                }
                T::MkVar(_, r) => same((**r).clone(), &mut out),
                _ => {}
            }
            for (m2, s2) in step(m, store, budget)? {
                out.push((T::Deref(Box::new(m2)), s2));
            }
        }
        T::Grab(m) => {
            match &**m {
                T::Loc(l) => {
                    if let Some((LocKind::Sem, 0)) = store.get(l) {
                        let mut s2 = store.clone();
                        s2.insert(*l, (LocKind::Sem, 1));
                        out.push((T::Skip, s2));
                    }
                }
                T::MkSem(g, _) => same((**g).clone(), &mut out),
                _ => {}
            }
            for (m2, s2) in step(m, store, budget)? {
                out.push((T::Grab(Box::new(m2)), s2));
            }
        }
        T::Release(m) => {
            match &**m {
                T::Loc(l) => {
                    if let Some((LocKind::Sem, n)) = store.get(l) {
                        if *n > 0 {
                            let mut s2 = store.clone();
                            s2.insert(*l, (LocKind::Sem, 0));
                            out.push((T::Skip, s2));
                        }
                    }
                }
                T::MkSem(_, r) => same((**r).clone(), &mut out),
                _ => {}
            }
            for (m2, s2) in step(m, store, budget)? {
                out.push((T::Release(Box::new(m2)), s2));
            }
        }
        T::NewRef(x, n, m) => {
            if is_value(m) {
                same((**m).clone(), &mut out);
            }
            out.extend(step_binder(term, x, *n, m, LocKind::Ref, store, budget)?);
        }
        T::NewSem(x, n, m) => {
            if is_value(m) {
                same((**m).clone(), &mut out);
            }
            out.extend(step_binder(term, x, *n, m, LocKind::Sem, store, budget)?);
        }
        _ => {}
    }
    Ok(out)
}

/// The context rule for `newref`/`newsem`: allocate a fresh location, step
/// the opened body once, then fold the location back into the binder with
/// its updated contents.
fn step_binder(
    _whole: &Term,
    x: &str,
    n: u64,
    m: &Term,
    kind: LocKind,
    store: &Store,
    budget: &Budget,
) -> Result<Vec<(Term, Store)>, LangError> {
    let fresh = store.keys().max().map_or(0, |k| k + 1);
    let opened = subst(m, x, &Term::Loc(fresh));
    let mut inner_store = store.clone();
    inner_store.insert(fresh, (kind, n));
    let mut out = Vec::new();
    for (m2, s2) in step(&opened, &inner_store, budget)? {
        let (_, n2) = s2[&fresh];
        let mut outer = s2.clone();
        outer.remove(&fresh);
        let folded = abstract_loc(&m2, fresh, x);
        let rebuilt = match kind {
            LocKind::Ref => Term::NewRef(x.to_string(), n2, Box::new(folded)),
            LocKind::Sem => Term::NewSem(x.to_string(), n2, Box::new(folded)),
        };
        out.push((rebuilt, outer));
    }
    Ok(out)
}

/// Replace a location literal by a variable (inverse of the binder opening).
fn abstract_loc(t: &Term, l: usize, x: &str) -> Term {
    use Term as T;
    let s = |m: &Term| abstract_loc(m, l, x);
    match t {
        T::Loc(k) if *k == l => T::Var(x.to_string()),
        T::Var(_) | T::Skip | T::Tt | T::Ff | T::Num(_) | T::Bot(_) | T::Loc(_) => t.clone(),
        T::Lam(y, ty, m) => T::Lam(y.clone(), ty.clone(), Box::new(s(m))),
        T::App(m, n) => T::App(Box::new(s(m)), Box::new(s(n))),
        T::Seq(m, n) => T::Seq(Box::new(s(m)), Box::new(s(n))),
        T::If(c, a, b) => T::If(Box::new(s(c)), Box::new(s(a)), Box::new(s(b))),
        T::Succ(m) => T::Succ(Box::new(s(m))),
        T::Pred(m) => T::Pred(Box::new(s(m))),
        T::IsZero(m) => T::IsZero(Box::new(s(m))),
        T::Let(y, n, m) => T::Let(y.clone(), Box::new(s(n)), Box::new(s(m))),
        T::Plet(y1, n1, y2, n2, m) => T::Plet(
            y1.clone(),
            Box::new(s(n1)),
            y2.clone(),
            Box::new(s(n2)),
            Box::new(s(m)),
        ),
        T::Fix(m) => T::Fix(Box::new(s(m))),
        T::Assign(m, n) => T::Assign(Box::new(s(m)), Box::new(s(n))),
        T::Deref(m) => T::Deref(Box::new(s(m))),
        T::Grab(m) => T::Grab(Box::new(s(m))),
        T::Release(m) => T::Release(Box::new(s(m))),
        T::NewRef(y, n, m) => T::NewRef(y.clone(), *n, Box::new(s(m))),
        T::NewSem(y, n, m) => T::NewSem(y.clone(), *n, Box::new(s(m))),
        T::MkVar(m, n) => T::MkVar(Box::new(s(m)), Box::new(s(n))),
        T::MkSem(m, n) => T::MkSem(Box::new(s(m)), Box::new(s(n))),
    }
}

/// Verdict of the exhaustive reduction-graph search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunResult {
    /// Some reduction path reaches a value (may-convergence), with a witness.
    Converges(Term),
    /// The whole (finite) reduction graph was explored without reaching a
    /// value.
    Diverges,
}

/// Explore the reduction graph of `⟨M, ∅⟩` breadth-first up to `fuel`
/// states; report may-convergence.
pub fn run(term: &Term, budget: &Budget) -> Result<RunResult, LangError> {
    let mut seen: HashSet<(Term, Store)> = HashSet::new();
    let mut frontier: VecDeque<(Term, Store)> = VecDeque::new();
    frontier.push_back((term.clone(), Store::new()));
    while let Some((m, s)) = frontier.pop_front() {
        if !seen.insert((m.clone(), s.clone())) {
            continue;
        }
        if seen.len() > budget.run_fuel {
            return Err(LangError::Fuel(seen.len()));
        }
        if is_value(&m) && s.is_empty() {
            return Ok(RunResult::Converges(m));
        }
        for next in step(&m, &s, budget)? {
            if !seen.contains(&next) {
                frontier.push_back(next);
            }
        }
    }
    Ok(RunResult::Diverges)
}

/// A labelled program corpus entry.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub source: String,
    pub expect: String,
}

/// Parse a corpus file: stanzas separated by blank lines, each with
/// optional `-- name:` and a required `-- expect:` annotation.
pub fn parse_corpus(text: &str) -> Vec<CorpusEntry> {
    let mut out = Vec::new();
    for (i, stanza) in text.split("\n\n").enumerate() {
        let mut name = format!("entry-{i}");
        let mut expect = String::new();
        let mut src_lines = Vec::new();
        for line in stanza.lines() {
            let l = line.trim();
            if let Some(rest) = l.strip_prefix("-- name:") {
                name = rest.trim().to_string();
            } else if let Some(rest) = l.strip_prefix("-- expect:") {
                expect = rest.trim().to_string();
            } else if !l.is_empty() && !l.starts_with("--") {
                src_lines.push(line);
            }
        }
        if !src_lines.is_empty() {
            out.push(CorpusEntry {
                name,
                source: src_lines.join("\n"),
                expect,
            });
        }
    }
    out
}

/// Free variables of a term (no binder shadow tracking needed for closed-ness
/// checks on elaborated programs, which use distinct binder names).
pub fn free_vars(t: &Term) -> HashSet<String> {
    fn go(t: &Term, bound: &mut Vec<String>, out: &mut HashSet<String>) {
        use Term as T;
        match t {
            T::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            T::Lam(x, _, m) => {
                bound.push(x.clone());
                go(m, bound, out);
                bound.pop();
            }
            T::Let(x, n, m) => {
                go(n, bound, out);
                bound.push(x.clone());
                go(m, bound, out);
                bound.pop();
            }
            T::Plet(x, n1, y, n2, m) => {
                go(n1, bound, out);
                go(n2, bound, out);
                bound.push(x.clone());
                bound.push(y.clone());
                go(m, bound, out);
                bound.pop();
                bound.pop();
            }
            T::NewRef(x, _, m) | T::NewSem(x, _, m) => {
                bound.push(x.clone());
                go(m, bound, out);
                bound.pop();
            }
            T::App(a, b)
            | T::Seq(a, b)
            | T::Assign(a, b)
            | T::MkVar(a, b)
            | T::MkSem(a, b) => {
                go(a, bound, out);
                go(b, bound, out);
            }
            T::If(a, b, c) => {
                go(a, bound, out);
                go(b, bound, out);
                go(c, bound, out);
            }
            T::Succ(a) | T::Pred(a) | T::IsZero(a) | T::Fix(a) | T::Deref(a) | T::Grab(a)
            | T::Release(a) => go(a, bound, out),
            T::Skip | T::Tt | T::Ff | T::Num(_) | T::Bot(_) | T::Loc(_) => {}
        }
    }
    let mut out = HashSet::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// Used by the interpreter: a deterministic fresh-name supply.
pub fn fresh_name(base: &str, used: &HashMap<String, Ty>) -> String {
    let mut i = 0;
    loop {
        let cand = format!("{base}{i}");
        if !used.contains_key(&cand) {
            return cand;
        }
        i += 1;
    }
}
