//! Recursive-descent parser for programs, queries and compiled-code dumps.
//!
//! Two modes share the grammar:
//!
//! * strict — user programs; `forall` goals and NAF heads are rejected since
//!   only the compiler produces them,
//! * dump — output of `--code`; additionally accepts NAF heads, `forall`
//!   goals, and `not`/comparison constructors in term position (used inside
//!   `dcc/2` facts).

use std::collections::HashMap;
use std::fmt;

use super::lexer::{Lexer, Pos, Tok};
use super::{Atom, Clause, CmpOp, Goal, Head, Lit, Program, Query, Rat, ShowSpec, Sym, Term, Var};

/// Syntax error with source position.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

/// Parses a user program. `forall` goals and NAF heads are errors here.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    Parser::new(src, false)?.program()
}

/// Parses a compiled-program dump produced by the code renderer.
pub fn parse_dump(src: &str) -> Result<Program, ParseError> {
    Parser::new(src, true)?.program()
}

/// Parses a query: either `?- goals.` or a bare goal conjunction with an
/// optional trailing `.` (the CLI `-e` form).
pub fn parse_query(src: &str) -> Result<Query, ParseError> {
    let mut p = Parser::new(src, false)?;
    let mut scope = Scope::default();
    if p.tok == Tok::Punct("?-") {
        p.advance()?;
    }
    let goals = p.body(&mut scope)?;
    if p.tok == Tok::Punct(".") {
        p.advance()?;
    }
    p.expect_eof()?;
    Ok(Query {
        goals,
        nvars: scope.names.len() as u32,
        var_names: scope.names,
    })
}

#[derive(Default)]
struct Scope {
    map: HashMap<String, Var>,
    names: Vec<String>,
}

impl Scope {
    fn var(&mut self, name: &str) -> Var {
        if name == "_" {
            let v = Var(self.names.len() as u32);
            self.names.push(format!("_{}", self.names.len()));
            return v;
        }
        if let Some(v) = self.map.get(name) {
            return *v;
        }
        let v = Var(self.names.len() as u32);
        self.names.push(name.to_string());
        self.map.insert(name.to_string(), v);
        v
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    pos: Pos,
    dump_mode: bool,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, dump_mode: bool) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src);
        let (tok, pos) = lexer.next_token().map_err(to_err)?;
        Ok(Parser {
            lexer,
            tok,
            pos,
            dump_mode,
        })
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        let (tok, pos) = self.lexer.next_token().map_err(to_err)?;
        self.tok = tok;
        self.pos = pos;
        Ok(())
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            line: self.pos.line,
            col: self.pos.col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, p: &'static str) -> Result<(), ParseError> {
        if self.tok == Tok::Punct(p) {
            self.advance()
        } else {
            self.err(format!("expected `{p}`, found {}", self.tok))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if self.tok == Tok::Eof {
            Ok(())
        } else {
            self.err(format!("expected end of input, found {}", self.tok))
        }
    }

    fn eat(&mut self, p: &'static str) -> Result<bool, ParseError> {
        if self.tok == Tok::Punct(p) {
            self.advance()?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut prog = Program::default();
        loop {
            match &self.tok {
                Tok::Eof => break,
                Tok::Punct("#show") => {
                    self.advance()?;
                    prog.shows.push(self.show_spec()?);
                }
                Tok::Punct("?-") => {
                    self.advance()?;
                    let mut scope = Scope::default();
                    let goals = self.body(&mut scope)?;
                    self.expect(".")?;
                    prog.queries.push(Query {
                        goals,
                        nvars: scope.names.len() as u32,
                        var_names: scope.names,
                    });
                }
                _ => {
                    let clause = self.clause()?;
                    if clause.is_denial() {
                        prog.denials.push(clause);
                    } else {
                        prog.clauses.push(clause);
                    }
                }
            }
        }
        Ok(prog)
    }

    fn show_spec(&mut self) -> Result<ShowSpec, ParseError> {
        let naf = self.eat_keyword("not")?;
        let name = match &self.tok {
            Tok::Ident(s) => Sym::new(s),
            other => return self.err(format!("expected predicate name, found {other}")),
        };
        self.advance()?;
        self.expect("/")?;
        let arity = match &self.tok {
            Tok::Int(n) => u32::try_from(n.clone()).map_err(|_| ParseError {
                line: self.pos.line,
                col: self.pos.col,
                msg: "arity out of range".to_string(),
            })?,
            other => return self.err(format!("expected arity, found {other}")),
        };
        self.advance()?;
        self.expect(".")?;
        Ok(ShowSpec { naf, name, arity })
    }

    fn eat_keyword(&mut self, kw: &str) -> Result<bool, ParseError> {
        if matches!(&self.tok, Tok::Ident(s) if s == kw) {
            self.advance()?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    fn clause(&mut self) -> Result<Clause, ParseError> {
        let mut scope = Scope::default();
        if self.eat(":-")? {
            let body = self.body(&mut scope)?;
            self.expect(".")?;
            return Ok(Clause {
                head: None,
                body,
                nvars: scope.names.len() as u32,
                var_names: scope.names,
            });
        }
        let naf = self.eat_keyword("not")?;
        if naf && !self.dump_mode {
            return self.err("a clause head cannot be negated");
        }
        let atom = self.atom(&mut scope)?;
        let body = if self.eat(":-")? {
            self.body(&mut scope)?
        } else {
            Vec::new()
        };
        self.expect(".")?;
        Ok(Clause {
            head: Some(Head { naf, atom }),
            body,
            nvars: scope.names.len() as u32,
            var_names: scope.names,
        })
    }

    fn body(&mut self, scope: &mut Scope) -> Result<Vec<Goal>, ParseError> {
        let mut goals = vec![self.goal(scope)?];
        while self.eat(",")? {
            goals.push(self.goal(scope)?);
        }
        Ok(goals)
    }

    fn goal(&mut self, scope: &mut Scope) -> Result<Goal, ParseError> {
        if matches!(&self.tok, Tok::Ident(s) if s == "not") {
            self.advance()?;
            let atom = self.atom(scope)?;
            return Ok(Goal::Lit(Lit::naf(atom)));
        }
        if matches!(&self.tok, Tok::Ident(s) if s == "forall") {
            if !self.dump_mode {
                return self.err("forall is reserved for compiler-generated code");
            }
            self.advance()?;
            self.expect("(")?;
            let v = match &self.tok {
                Tok::VarName(name) => scope.var(&name.clone()),
                other => return self.err(format!("expected variable, found {other}")),
            };
            self.advance()?;
            self.expect(",")?;
            let inner = self.goal(scope)?;
            self.expect(")")?;
            return Ok(Goal::Forall(v, Box::new(inner)));
        }
        let lhs = self.term(scope)?;
        if let Some(op) = self.peek_cmp() {
            self.advance()?;
            let rhs = self.term(scope)?;
            return Ok(Goal::Cmp(op, lhs, rhs));
        }
        match lhs {
            Term::Const(name) => Ok(Goal::Lit(Lit::pos(Atom::new(name, Vec::new())))),
            Term::Comp(c) => Ok(Goal::Lit(Lit::pos(Atom::new(
                c.functor.clone(),
                c.args.clone(),
            )))),
            _ => self.err("expected a callable goal"),
        }
    }

    fn peek_cmp(&self) -> Option<CmpOp> {
        match &self.tok {
            Tok::Punct(p) => CmpOp::from_symbol(p),
            Tok::Ident(s) if s == "is" => Some(CmpOp::Is),
            _ => None,
        }
    }

    fn atom(&mut self, scope: &mut Scope) -> Result<Atom, ParseError> {
        let name = match &self.tok {
            Tok::Ident(s) => Sym::new(s),
            other => return self.err(format!("expected predicate name, found {other}")),
        };
        self.advance()?;
        let args = if self.eat("(")? {
            let mut args = vec![self.term(scope)?];
            while self.eat(",")? {
                args.push(self.term(scope)?);
            }
            self.expect(")")?;
            args
        } else {
            Vec::new()
        };
        Ok(Atom::new(name, args))
    }

    /// Terms with `+ - * //` arithmetic. In dump mode a term may also be a
    /// comparison (`X \= Y` inside a `dcc/2` residual list).
    fn term(&mut self, scope: &mut Scope) -> Result<Term, ParseError> {
        let lhs = self.additive(scope)?;
        if self.dump_mode {
            if let Some(op) = self.peek_cmp() {
                self.advance()?;
                let rhs = self.additive(scope)?;
                return Ok(Term::comp(op.symbol(), vec![lhs, rhs]));
            }
        }
        Ok(lhs)
    }

    fn additive(&mut self, scope: &mut Scope) -> Result<Term, ParseError> {
        let mut lhs = self.multiplicative(scope)?;
        loop {
            let op = match &self.tok {
                Tok::Punct("+") => "+",
                Tok::Punct("-") => "-",
                _ => break,
            };
            self.advance()?;
            let rhs = self.multiplicative(scope)?;
            lhs = Term::comp(op, vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    fn multiplicative(&mut self, scope: &mut Scope) -> Result<Term, ParseError> {
        let mut lhs = self.primary(scope)?;
        loop {
            let op = match &self.tok {
                Tok::Punct("*") => "*",
                Tok::Punct("//") => "//",
                _ => break,
            };
            self.advance()?;
            let rhs = self.primary(scope)?;
            lhs = Term::comp(op, vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    fn primary(&mut self, scope: &mut Scope) -> Result<Term, ParseError> {
        match self.tok.clone() {
            Tok::Int(n) => {
                self.advance()?;
                Ok(Term::Num(Rat::new(num::BigRational::from_integer(n))))
            }
            Tok::Punct("-") => {
                self.advance()?;
                match self.tok.clone() {
                    Tok::Int(n) => {
                        self.advance()?;
                        Ok(Term::Num(Rat::new(num::BigRational::from_integer(-n))))
                    }
                    _ => {
                        let inner = self.primary(scope)?;
                        Ok(Term::comp("-", vec![inner]))
                    }
                }
            }
            Tok::VarName(name) => {
                self.advance()?;
                Ok(Term::Var(scope.var(&name)))
            }
            Tok::Ident(name) => {
                if self.dump_mode && name == "not" {
                    self.advance()?;
                    let inner = self.term(scope)?;
                    return Ok(Term::comp("not", vec![inner]));
                }
                self.advance()?;
                if self.eat("(")? {
                    let mut args = vec![self.term(scope)?];
                    while self.eat(",")? {
                        args.push(self.term(scope)?);
                    }
                    self.expect(")")?;
                    Ok(Term::comp(name.as_str(), args))
                } else {
                    Ok(Term::Const(Sym::new(&name)))
                }
            }
            Tok::Punct("[") => {
                self.advance()?;
                if self.eat("]")? {
                    return Ok(Term::nil());
                }
                let mut items = vec![self.term(scope)?];
                while self.eat(",")? {
                    items.push(self.term(scope)?);
                }
                let tail = if self.eat("|")? {
                    self.term(scope)?
                } else {
                    Term::nil()
                };
                self.expect("]")?;
                Ok(items
                    .into_iter()
                    .rev()
                    .fold(tail, |acc, item| Term::cons(item, acc)))
            }
            Tok::Punct("(") => {
                self.advance()?;
                let inner = self.term(scope)?;
                self.expect(")")?;
                Ok(inner)
            }
            other => self.err(format!("expected a term, found {other}")),
        }
    }
}

fn to_err((pos, msg): (Pos, String)) -> ParseError {
    ParseError {
        line: pos.line,
        col: pos.col,
        msg,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_even_and_odd_loop_program() {
        let prog = parse_program("p :- not q.\nq :- not p.\nr :- not r.").unwrap();
        assert_eq!(prog.clauses.len(), 3);
        assert_eq!(prog.denials.len(), 0);
        let head = prog.clauses[0].head.as_ref().unwrap();
        assert_eq!(head.atom.pred.as_str(), "p");
        assert!(matches!(&prog.clauses[0].body[0], Goal::Lit(l) if l.naf));
    }

    #[test]
    fn parses_denial_with_naf_body() {
        let prog = parse_program(":- vertex(U), not reachable(U).").unwrap();
        assert_eq!(prog.clauses.len(), 0);
        assert_eq!(prog.denials.len(), 1);
        let denial = &prog.denials[0];
        assert_eq!(denial.body.len(), 2);
        assert!(matches!(&denial.body[0], Goal::Lit(l) if !l.naf && l.atom.pred.as_str() == "vertex"));
        assert!(
            matches!(&denial.body[1], Goal::Lit(l) if l.naf && l.atom.pred.as_str() == "reachable")
        );
    }

    #[test]
    fn parses_empty_input() {
        let prog = parse_program("").unwrap();
        assert!(prog.clauses.is_empty());
        assert!(prog.denials.is_empty());
        assert!(prog.queries.is_empty());
    }

    #[test]
    fn parses_queries() {
        let q = parse_query("?- reachable(a).").unwrap();
        assert_eq!(q.goals.len(), 1);
        assert!(matches!(&q.goals[0], Goal::Lit(l) if !l.naf && l.atom.pred.as_str() == "reachable"));

        let q = parse_query("?- list(A), not member(B, A).").unwrap();
        assert_eq!(q.goals.len(), 2);
        assert_eq!(q.nvars, 2);
        // A is shared between both goals.
        let Goal::Lit(first) = &q.goals[0] else {
            panic!()
        };
        let Goal::Lit(second) = &q.goals[1] else {
            panic!()
        };
        assert_eq!(first.atom.args[0], second.atom.args[1]);

        let q = parse_query("p(X)").unwrap();
        assert_eq!(q.goals.len(), 1);
    }

    #[test]
    fn list_sugar_desugars_to_cons_cells() {
        let a = parse_query("p([1,2])").unwrap();
        let b = parse_query("p('.'(1, '.'(2, [])))");
        // No quoting in this grammar; build the expected term directly.
        assert!(b.is_err());
        let Goal::Lit(l) = &a.goals[0] else { panic!() };
        let expected = Term::list(vec![Term::int(1), Term::int(2)]);
        assert_eq!(l.atom.args[0], expected);
    }

    #[test]
    fn underscore_is_fresh_per_occurrence() {
        let q = parse_query("p(_, _)").unwrap();
        let Goal::Lit(l) = &q.goals[0] else { panic!() };
        assert_ne!(l.atom.args[0], l.atom.args[1]);
    }

    #[test]
    fn clause_scopes_are_disjoint() {
        let prog = parse_program("p(X).\nq(X).").unwrap();
        // Both clauses use slot 0 internally, which is clause-local by design.
        assert_eq!(prog.clauses[0].nvars, 1);
        assert_eq!(prog.clauses[1].nvars, 1);
    }

    #[test]
    fn rejects_forall_in_user_programs() {
        let err = parse_program("p :- forall(X, q(X)).").unwrap_err();
        assert!(err.msg.contains("forall"));
        assert!(parse_dump("not p(V) :- forall(X, not q(V, X)).").is_ok());
    }

    #[test]
    fn rejects_unterminated_clause() {
        let err = parse_program("p :- q").unwrap_err();
        assert_eq!(err.line, 1);
    }

    #[test]
    fn name_arity_pairs_are_distinct_predicates() {
        let prog = parse_program("p(a).\np(a, b).\nq :- p(X), p(X, Y).").unwrap();
        assert_eq!(prog.clauses.len(), 3);
    }

    #[test]
    fn parses_shows_and_arithmetic() {
        let prog = parse_program("#show chosen/2.\np(X) :- X > 0, Y is X - 1, q(Y).").unwrap();
        assert_eq!(prog.shows.len(), 1);
        assert_eq!(prog.shows[0].arity, 2);
        let body = &prog.clauses[0].body;
        assert!(matches!(body[0], Goal::Cmp(CmpOp::Gt, _, _)));
        assert!(matches!(body[1], Goal::Cmp(CmpOp::Is, _, _)));
    }

    #[test]
    fn reports_line_and_column() {
        let err = parse_program("p.\nq :- ,.\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.col >= 6);
    }

    #[test]
    fn roundtrips_through_display() {
        let src = "p(X) :- q(X, [1,2|T]), not r(X), X #> 5.\n:- p(U), q(U, V).\n#show p/1.\n?- p(A).\n";
        let prog = parse_program(src).unwrap();
        let rendered = prog.to_string();
        let reparsed = parse_program(&rendered).unwrap();
        assert_eq!(prog, reparsed);
    }
}
