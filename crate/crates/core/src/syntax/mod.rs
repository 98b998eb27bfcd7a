//! Abstract syntax of the input language: terms, atoms, goals, clauses,
//! denials, `#show` directives and queries.
//!
//! Variables are clause-local: each [`Clause`] and [`Query`] numbers its
//! variables `0..nvars` and keeps the source names for rendering. Numeric
//! literals are exact rationals; integer source literals are widened on
//! construction so that order-constraint negation over a dense domain never
//! rounds.

mod lexer;
mod parser;

pub use parser::{parse_dump, parse_program, parse_query, ParseError};

use std::fmt;
use std::sync::Arc;

use num::BigRational;

/// Interned-ish symbol: functor, constant or predicate name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(Arc<str>);

impl Sym {
    pub fn new(s: &str) -> Self {
        Sym(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Sym {
    fn from(s: &str) -> Self {
        Sym::new(s)
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Exact rational constant. Shared so terms stay cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rat(Arc<BigRational>);

impl Rat {
    pub fn new(r: BigRational) -> Self {
        Rat(Arc::new(r))
    }

    pub fn from_i64(n: i64) -> Self {
        Rat::new(BigRational::from_integer(n.into()))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A variable slot. Clause-local before compilation, store-global at runtime.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Var(pub u32);

/// Payload of a compound term, shared behind an `Arc`.
///
/// `has_vars` is cached so that ground subterms can be reused as-is when a
/// clause is instantiated.
#[derive(PartialEq, Eq, Hash, Debug)]
pub struct CompData {
    pub functor: Sym,
    pub args: Vec<Term>,
    pub has_vars: bool,
}

/// First-order term over the Herbrand universe extended with rationals.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    Var(Var),
    Const(Sym),
    Num(Rat),
    Comp(Arc<CompData>),
}

impl Term {
    pub fn comp(functor: impl Into<Sym>, args: Vec<Term>) -> Term {
        let has_vars = args.iter().any(Term::has_vars);
        Term::Comp(Arc::new(CompData {
            functor: functor.into(),
            args,
            has_vars,
        }))
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(Sym::new(name))
    }

    pub fn int(n: i64) -> Term {
        Term::Num(Rat::from_i64(n))
    }

    pub fn nil() -> Term {
        Term::constant("[]")
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::comp(".", vec![head, tail])
    }

    pub fn list(items: Vec<Term>) -> Term {
        items
            .into_iter()
            .rev()
            .fold(Term::nil(), |tail, head| Term::cons(head, tail))
    }

    pub fn has_vars(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Const(_) | Term::Num(_) => false,
            Term::Comp(c) => c.has_vars,
        }
    }

    /// Rewrites every variable slot through `map`. Ground subterms are shared.
    pub fn map_vars(&self, map: &mut impl FnMut(Var) -> Term) -> Term {
        match self {
            Term::Var(v) => map(*v),
            Term::Const(_) | Term::Num(_) => self.clone(),
            Term::Comp(c) => {
                if !c.has_vars {
                    self.clone()
                } else {
                    Term::comp(
                        c.functor.clone(),
                        c.args.iter().map(|a| a.map_vars(map)).collect(),
                    )
                }
            }
        }
    }

    pub fn visit_vars(&self, visit: &mut impl FnMut(Var)) {
        match self {
            Term::Var(v) => visit(*v),
            Term::Const(_) | Term::Num(_) => {}
            Term::Comp(c) => {
                if c.has_vars {
                    for a in &c.args {
                        a.visit_vars(visit);
                    }
                }
            }
        }
    }
}

/// Predicate atom: name applied to argument terms. Arity is `args.len()`;
/// `p/1` and `p/2` are distinct predicates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Atom {
    pub pred: Sym,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl Into<Sym>, args: Vec<Term>) -> Atom {
        Atom {
            pred: pred.into(),
            args,
        }
    }

    pub fn arity(&self) -> u32 {
        self.args.len() as u32
    }

    pub fn key(&self) -> (Sym, u32) {
        (self.pred.clone(), self.arity())
    }
}

/// A possibly NAF-negated user literal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Lit {
    pub naf: bool,
    pub atom: Atom,
}

impl Lit {
    pub fn pos(atom: Atom) -> Lit {
        Lit { naf: false, atom }
    }

    pub fn naf(atom: Atom) -> Lit {
        Lit { naf: true, atom }
    }
}

/// Comparison and arithmetic-relation operators usable as body goals.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum CmpOp {
    /// `=` unification
    Eq,
    /// `\=` disequality
    Neq,
    /// `#<` order constraint
    CLt,
    /// `#>` order constraint
    CGt,
    /// `#=<` order constraint
    CLe,
    /// `#>=` order constraint
    CGe,
    /// `<` ground comparison
    Lt,
    /// `>` ground comparison
    Gt,
    /// `=<` ground comparison
    Le,
    /// `>=` ground comparison
    Ge,
    /// `is` arithmetic evaluation
    Is,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Neq => "\\=",
            CmpOp::CLt => "#<",
            CmpOp::CGt => "#>",
            CmpOp::CLe => "#=<",
            CmpOp::CGe => "#>=",
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Le => "=<",
            CmpOp::Ge => ">=",
            CmpOp::Is => "is",
        }
    }

    pub fn from_symbol(s: &str) -> Option<CmpOp> {
        Some(match s {
            "=" => CmpOp::Eq,
            "\\=" => CmpOp::Neq,
            "#<" => CmpOp::CLt,
            "#>" => CmpOp::CGt,
            "#=<" => CmpOp::CLe,
            "#>=" => CmpOp::CGe,
            "<" => CmpOp::Lt,
            ">" => CmpOp::Gt,
            "=<" => CmpOp::Le,
            ">=" => CmpOp::Ge,
            "is" => CmpOp::Is,
            _ => return None,
        })
    }
}

/// Body goal: user literal, constraint, or universally quantified goal.
/// `Forall` only appears in compiler-generated clauses.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Goal {
    Lit(Lit),
    Cmp(CmpOp, Term, Term),
    Forall(Var, Box<Goal>),
}

impl Goal {
    pub fn visit_vars(&self, visit: &mut impl FnMut(Var)) {
        match self {
            Goal::Lit(l) => {
                for a in &l.atom.args {
                    a.visit_vars(visit);
                }
            }
            Goal::Cmp(_, a, b) => {
                a.visit_vars(visit);
                b.visit_vars(visit);
            }
            Goal::Forall(v, g) => {
                visit(*v);
                g.visit_vars(visit);
            }
        }
    }

    pub fn map_vars(&self, map: &mut impl FnMut(Var) -> Term) -> Goal {
        match self {
            Goal::Lit(l) => Goal::Lit(Lit {
                naf: l.naf,
                atom: Atom::new(
                    l.atom.pred.clone(),
                    l.atom.args.iter().map(|a| a.map_vars(map)).collect(),
                ),
            }),
            Goal::Cmp(op, a, b) => Goal::Cmp(*op, a.map_vars(map), b.map_vars(map)),
            Goal::Forall(v, g) => {
                let mapped = map(*v);
                let Term::Var(nv) = mapped else {
                    panic!("forall variable mapped to a non-variable");
                };
                Goal::Forall(nv, Box::new(g.map_vars(map)))
            }
        }
    }
}

/// Clause head. Dual clauses produced by the compiler carry NAF heads, which
/// the strict parser rejects in user programs.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Head {
    pub naf: bool,
    pub atom: Atom,
}

/// A program clause or denial. `head == None` marks a denial.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Clause {
    pub head: Option<Head>,
    pub body: Vec<Goal>,
    pub nvars: u32,
    pub var_names: Vec<String>,
}

impl Clause {
    pub fn is_denial(&self) -> bool {
        self.head.is_none()
    }
}

/// `#show name/arity.` directive, optionally restricted to the NAF form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ShowSpec {
    pub naf: bool,
    pub name: Sym,
    pub arity: u32,
}

/// A query: a goal conjunction with its own variable scope.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Query {
    pub goals: Vec<Goal>,
    pub nvars: u32,
    pub var_names: Vec<String>,
}

/// A parsed program: clauses, denials, `#show` directives and embedded
/// `?-` queries, in source order.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct Program {
    pub clauses: Vec<Clause>,
    pub denials: Vec<Clause>,
    pub shows: Vec<ShowSpec>,
    pub queries: Vec<Query>,
}

impl Program {
    /// Concatenates another program, keeping clause order.
    pub fn extend(&mut self, other: Program) {
        self.clauses.extend(other.clauses);
        self.denials.extend(other.denials);
        self.shows.extend(other.shows);
        self.queries.extend(other.queries);
    }
}

// ---------------------------------------------------------------------------
// Source-form rendering. Used by tests, the `--code` dump and error messages.
// ---------------------------------------------------------------------------

fn is_list_term(t: &Term) -> bool {
    matches!(t, Term::Comp(c) if c.functor.as_str() == "." && c.args.len() == 2)
}

fn arith_prec(functor: &str, arity: usize) -> Option<u8> {
    match (functor, arity) {
        ("+", 2) | ("-", 2) => Some(1),
        ("*", 2) | ("//", 2) => Some(2),
        ("-", 1) => Some(3),
        _ => None,
    }
}

/// Writes `t` using `names` to print variables.
pub fn fmt_term(
    f: &mut fmt::Formatter<'_>,
    t: &Term,
    names: &dyn Fn(Var) -> String,
) -> fmt::Result {
    fmt_term_prec(f, t, names, 0)
}

fn fmt_term_prec(
    f: &mut fmt::Formatter<'_>,
    t: &Term,
    names: &dyn Fn(Var) -> String,
    min_prec: u8,
) -> fmt::Result {
    match t {
        Term::Var(v) => f.write_str(&names(*v)),
        Term::Const(s) => write!(f, "{s}"),
        Term::Num(r) => write!(f, "{r}"),
        Term::Comp(c) if is_list_term(t) => {
            write!(f, "[")?;
            fmt_term_prec(f, &c.args[0], names, 0)?;
            let mut tail = c.args[1].clone();
            loop {
                match tail {
                    Term::Const(ref s) if s.as_str() == "[]" => break,
                    Term::Comp(ref d) if is_list_term(&tail) => {
                        write!(f, ",")?;
                        fmt_term_prec(f, &d.args[0], names, 0)?;
                        let next = d.args[1].clone();
                        tail = next;
                    }
                    other => {
                        write!(f, "|")?;
                        fmt_term_prec(f, &other, names, 0)?;
                        break;
                    }
                }
            }
            write!(f, "]")
        }
        Term::Comp(c) => {
            if let Some(prec) = arith_prec(c.functor.as_str(), c.args.len()) {
                let parens = prec < min_prec;
                if parens {
                    write!(f, "(")?;
                }
                if c.args.len() == 1 {
                    write!(f, "-")?;
                    fmt_term_prec(f, &c.args[0], names, prec + 1)?;
                } else {
                    fmt_term_prec(f, &c.args[0], names, prec)?;
                    write!(f, " {} ", c.functor)?;
                    fmt_term_prec(f, &c.args[1], names, prec + 1)?;
                }
                if parens {
                    write!(f, ")")?;
                }
                Ok(())
            } else if c.functor.as_str() == "not" && c.args.len() == 1 {
                write!(f, "not ")?;
                fmt_term_prec(f, &c.args[0], names, 0)
            } else if let Some(op) = CmpOp::from_symbol(c.functor.as_str()) {
                if c.args.len() == 2 {
                    fmt_term_prec(f, &c.args[0], names, 0)?;
                    write!(f, " {} ", op.symbol())?;
                    fmt_term_prec(f, &c.args[1], names, 0)
                } else {
                    fmt_plain_comp(f, c, names)
                }
            } else {
                fmt_plain_comp(f, c, names)
            }
        }
    }
}

fn fmt_plain_comp(
    f: &mut fmt::Formatter<'_>,
    c: &CompData,
    names: &dyn Fn(Var) -> String,
) -> fmt::Result {
    write!(f, "{}(", c.functor)?;
    for (i, a) in c.args.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        fmt_term_prec(f, a, names, 0)?;
    }
    write!(f, ")")
}

pub fn fmt_atom(
    f: &mut fmt::Formatter<'_>,
    atom: &Atom,
    names: &dyn Fn(Var) -> String,
) -> fmt::Result {
    write!(f, "{}", atom.pred)?;
    if !atom.args.is_empty() {
        write!(f, "(")?;
        for (i, a) in atom.args.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            fmt_term_prec(f, a, names, 0)?;
        }
        write!(f, ")")?;
    }
    Ok(())
}

pub fn fmt_goal(
    f: &mut fmt::Formatter<'_>,
    goal: &Goal,
    names: &dyn Fn(Var) -> String,
) -> fmt::Result {
    match goal {
        Goal::Lit(l) => {
            if l.naf {
                write!(f, "not ")?;
            }
            fmt_atom(f, &l.atom, names)
        }
        Goal::Cmp(op, a, b) => {
            fmt_term_prec(f, a, names, 0)?;
            write!(f, " {} ", op.symbol())?;
            fmt_term_prec(f, b, names, 0)
        }
        Goal::Forall(v, g) => {
            write!(f, "forall({}, ", names(*v))?;
            fmt_goal(f, g, names)?;
            write!(f, ")")
        }
    }
}

/// Display adaptor pairing an AST node with a variable namer.
pub struct WithNames<'a, T> {
    pub item: &'a T,
    pub names: &'a dyn Fn(Var) -> String,
}

impl fmt::Display for WithNames<'_, Term> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(f, self.item, self.names)
    }
}

impl fmt::Display for WithNames<'_, Goal> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_goal(f, self.item, self.names)
    }
}

fn clause_namer(var_names: &[String]) -> impl Fn(Var) -> String + '_ {
    move |v: Var| {
        var_names
            .get(v.0 as usize)
            .cloned()
            .unwrap_or_else(|| format!("_G{}", v.0))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = clause_namer(&self.var_names);
        if let Some(h) = &self.head {
            if h.naf {
                write!(f, "not ")?;
            }
            fmt_atom(f, &h.atom, &names)?;
            if !self.body.is_empty() {
                write!(f, " :- ")?;
            }
        } else {
            write!(f, ":- ")?;
        }
        for (i, g) in self.body.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            fmt_goal(f, g, &names)?;
        }
        write!(f, ".")
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = clause_namer(&self.var_names);
        write!(f, "?- ")?;
        for (i, g) in self.goals.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            fmt_goal(f, g, &names)?;
        }
        write!(f, ".")
    }
}

impl fmt::Display for ShowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "#show {}{}/{}.",
            if self.naf { "not " } else { "" },
            self.name,
            self.arity
        )
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        for d in &self.denials {
            writeln!(f, "{d}")?;
        }
        for s in &self.shows {
            writeln!(f, "{s}")?;
        }
        for q in &self.queries {
            writeln!(f, "{q}")?;
        }
        Ok(())
    }
}
