// SPDX-License-Identifier: Apache-2.0

//! S-expression reader for terms and goal files.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use thiserror::Error;

use super::{is_reserved, sym, FnDef, Goal, GoalFile, Hyp, Op, Symbol, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pos {
    line: usize,
    col: usize,
}

#[derive(Debug, Clone)]
enum Sexp {
    Atom(String, Pos),
    Quoted(Box<Sexp>, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::Quoted(_, p) | Sexp::List(_, p) => *p,
        }
    }

    fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            _ => None,
        }
    }
}

fn err<T>(pos: Pos, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line: pos.line,
        col: pos.col,
        message: message.into(),
    })
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            pos: Pos { line: 1, col: 1 },
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_trivia();
        self.chars.peek().is_none()
    }

    fn datum(&mut self) -> Result<Sexp, ParseError> {
        self.skip_trivia();
        let start = self.pos;
        match self.chars.peek().copied() {
            None => err(start, "unexpected end of input"),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => return err(start, "unclosed parenthesis"),
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items, start));
                        }
                        Some(_) => items.push(self.datum()?),
                    }
                }
            }
            Some(')') => err(start, "unexpected ')'"),
            Some('\'') => {
                self.bump();
                let inner = self.datum()?;
                Ok(Sexp::Quoted(Box::new(inner), start))
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | '\'' | ';') {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Sexp::Atom(s, start))
            }
        }
    }
}

fn read_all(text: &str) -> Result<Vec<Sexp>, ParseError> {
    let mut lexer = Lexer::new(text);
    let mut out = Vec::new();
    while !lexer.at_end() {
        out.push(lexer.datum()?);
    }
    Ok(out)
}

/// Parse a single term. Trailing input other than comments is an error.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut lexer = Lexer::new(text);
    let datum = lexer.datum()?;
    if !lexer.at_end() {
        return err(lexer.pos, "trailing input after term");
    }
    term_of(&datum)
}

fn is_numeral(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn nat_of(s: &str, pos: Pos) -> Result<Term, ParseError> {
    match s.parse::<BigUint>() {
        Ok(n) => Ok(Term::Nat(n)),
        Err(_) => err(pos, format!("bad numeral {s}")),
    }
}

fn symbol_of(d: &Sexp, what: &str) -> Result<Symbol, ParseError> {
    match d {
        Sexp::Atom(s, pos) => {
            if is_numeral(s) || s.starts_with('-') && is_numeral(&s[1..]) {
                return err(*pos, format!("expected {what}, found number {s}"));
            }
            if is_reserved(s) {
                return err(*pos, format!("{s} is reserved and cannot be used as {what}"));
            }
            Ok(sym(s))
        }
        other => err(other.pos(), format!("expected {what}")),
    }
}

fn symbol_list(d: &Sexp, what: &str) -> Result<Vec<Symbol>, ParseError> {
    match d {
        Sexp::List(items, pos) => {
            let mut seen = BTreeSet::new();
            let mut out = Vec::new();
            for item in items {
                let s = symbol_of(item, what)?;
                if !seen.insert(s.clone()) {
                    return err(*pos, format!("duplicate {what} {s}"));
                }
                out.push(s);
            }
            Ok(out)
        }
        other => err(other.pos(), format!("expected a list of {what}s")),
    }
}

fn term_of(d: &Sexp) -> Result<Term, ParseError> {
    match d {
        Sexp::Atom(s, pos) => {
            if is_numeral(s) {
                nat_of(s, *pos)
            } else if s.starts_with('-') && is_numeral(&s[1..]) {
                err(*pos, format!("negative literal {s} is not supported"))
            } else {
                Ok(Term::Var(symbol_of(d, "variable")?))
            }
        }
        Sexp::Quoted(inner, pos) => match inner.atom() {
            Some(s) if is_numeral(s) => nat_of(s, *pos),
            Some(s) if s.starts_with('-') && is_numeral(&s[1..]) => {
                err(*pos, format!("negative literal {s} is not supported"))
            }
            _ => err(*pos, "only natural numbers may be quoted"),
        },
        Sexp::List(items, pos) => {
            let Some(head) = items.first() else {
                return err(*pos, "empty application");
            };
            let args = &items[1..];
            match head {
                Sexp::Atom(name, hpos) => app_of(name, *hpos, args, *pos),
                Sexp::List(lam, lpos) if lam.first().and_then(Sexp::atom) == Some("lambda") => {
                    if lam.len() != 3 {
                        return err(*lpos, "lambda takes a parameter list and a body");
                    }
                    let params = symbol_list(&lam[1], "lambda parameter")?;
                    let body = term_of(&lam[2])?;
                    let actuals = args.iter().map(term_of).collect::<Result<Vec<_>, _>>()?;
                    if params.len() != actuals.len() {
                        return err(
                            *pos,
                            format!(
                                "lambda has {} parameters but is applied to {} arguments",
                                params.len(),
                                actuals.len()
                            ),
                        );
                    }
                    Ok(Term::LamApp {
                        params,
                        body: Box::new(body),
                        actuals,
                    })
                }
                other => err(other.pos(), "application head must be a symbol or a lambda"),
            }
        }
    }
}

fn app_of(name: &str, hpos: Pos, args: &[Sexp], pos: Pos) -> Result<Term, ParseError> {
    if let Some(op) = Op::from_binary_name(name) {
        if args.len() != op.arity() {
            return err(
                hpos,
                format!("{name} takes {} arguments, got {}", op.arity(), args.len()),
            );
        }
        let args = args.iter().map(term_of).collect::<Result<Vec<_>, _>>()?;
        return Ok(Term::App(op, args));
    }
    if let Some(op) = Op::from_variadic_name(name) {
        if args.len() < 2 {
            return err(hpos, format!("{name} needs at least 2 arguments"));
        }
        let args = args.iter().map(term_of).collect::<Result<Vec<_>, _>>()?;
        return Ok(Term::chain(op, args));
    }
    match name {
        "lambda" => err(hpos, "lambda must appear in head position of an application"),
        "let*" => {
            if args.len() != 2 {
                return err(hpos, "let* takes a binding list and a body");
            }
            let Sexp::List(binds, bpos) = &args[0] else {
                return err(args[0].pos(), "expected let* binding list");
            };
            let mut seen = BTreeSet::new();
            let mut bindings = Vec::with_capacity(binds.len());
            for b in binds {
                let Sexp::List(pair, ppos) = b else {
                    return err(b.pos(), "expected (VAR TERM) binding");
                };
                if pair.len() != 2 {
                    return err(*ppos, "expected (VAR TERM) binding");
                }
                let v = symbol_of(&pair[0], "let* variable")?;
                if !seen.insert(v.clone()) {
                    return err(*bpos, format!("duplicate binding {v} in one let*"));
                }
                bindings.push((v, term_of(&pair[1])?));
            }
            Ok(Term::Let {
                bindings,
                body: Box::new(term_of(&args[1])?),
            })
        }
        "define" | "goal" => err(pos, format!("{name} is only allowed at top level")),
        _ => {
            if is_numeral(name) {
                return err(hpos, "a number cannot be applied");
            }
            let args = args.iter().map(term_of).collect::<Result<Vec<_>, _>>()?;
            Ok(Term::Call(sym(name), args))
        }
    }
}

/// Parse a goal file: zero or more `define` forms and at most one `goal`.
pub fn parse_goal_file(text: &str) -> Result<GoalFile, ParseError> {
    let mut file = GoalFile::default();
    for form in read_all(text)? {
        let Sexp::List(items, pos) = &form else {
            return err(form.pos(), "expected a top-level (define ...) or (goal ...) form");
        };
        match items.first().and_then(Sexp::atom) {
            Some("define") => {
                let def = define_of(items, *pos)?;
                if file.defs.iter().any(|d| d.name == def.name) {
                    return err(*pos, format!("function {} defined twice", def.name));
                }
                file.defs.push(def);
            }
            Some("goal") => {
                if file.goal.is_some() {
                    return err(*pos, "only one goal per file");
                }
                file.goal = Some(goal_of(&items[1..], *pos)?);
            }
            _ => return err(*pos, "expected a top-level (define ...) or (goal ...) form"),
        }
    }
    Ok(file)
}

fn define_of(items: &[Sexp], pos: Pos) -> Result<FnDef, ParseError> {
    if items.len() != 3 {
        return err(pos, "define takes (NAME PARAM...) and a body");
    }
    let Sexp::List(sig, spos) = &items[1] else {
        return err(items[1].pos(), "expected (NAME PARAM...)");
    };
    let Some(name) = sig.first() else {
        return err(*spos, "missing function name");
    };
    let name = symbol_of(name, "function name")?;
    let params = symbol_list(&Sexp::List(sig[1..].to_vec(), *spos), "parameter")?;
    let body = term_of(&items[2])?;
    FnDef::new(name, params, body).map_err(|e| ParseError {
        line: pos.line,
        col: pos.col,
        message: e.to_string(),
    })
}

fn goal_of(clauses: &[Sexp], pos: Pos) -> Result<Goal, ParseError> {
    let mut name = None;
    let mut hyps = None;
    let mut lhs = None;
    let mut rhs = None;
    let mut expand = None;
    for clause in clauses {
        let Sexp::List(items, cpos) = clause else {
            return err(clause.pos(), "expected a goal clause");
        };
        let key = items.first().and_then(Sexp::atom).unwrap_or("");
        let rest = &items[1..];
        let slot_taken = |taken: bool| {
            if taken {
                err(*cpos, format!("duplicate ({key} ...) clause"))
            } else {
                Ok(())
            }
        };
        match key {
            "name" => {
                slot_taken(name.is_some())?;
                if rest.len() != 1 {
                    return err(*cpos, "(name SYM) takes one symbol");
                }
                name = Some(symbol_of(&rest[0], "goal name")?);
            }
            "hyps" => {
                slot_taken(hyps.is_some())?;
                let mut out = Vec::new();
                for h in rest {
                    let Sexp::List(hp, hpos) = h else {
                        return err(h.pos(), "expected (integerp VAR)");
                    };
                    if hp.len() != 2 || hp[0].atom() != Some("integerp") {
                        return err(*hpos, "expected (integerp VAR)");
                    }
                    out.push(Hyp::integer(symbol_of(&hp[1], "variable")?));
                }
                hyps = Some(out);
            }
            "lhs" | "rhs" => {
                let slot = if key == "lhs" { &mut lhs } else { &mut rhs };
                slot_taken(slot.is_some())?;
                if rest.len() != 1 {
                    return err(*cpos, format!("({key} TERM) takes one term"));
                }
                *slot = Some(term_of(&rest[0])?);
            }
            "expand" => {
                slot_taken(expand.is_some())?;
                let names = match rest {
                    [] => Vec::new(),
                    [list] => symbol_list(list, "function name")?,
                    _ => return err(*cpos, "expected (expand (NAME ...))"),
                };
                expand = Some(names);
            }
            other => return err(*cpos, format!("unknown goal clause {other:?}")),
        }
    }
    let missing = |what: &str| ParseError {
        line: pos.line,
        col: pos.col,
        message: format!("goal is missing ({what} ...)"),
    };
    Ok(Goal {
        name: name.ok_or_else(|| missing("name"))?,
        hyps: hyps.unwrap_or_default(),
        lhs: lhs.ok_or_else(|| missing("lhs"))?,
        rhs: rhs.ok_or_else(|| missing("rhs"))?,
        expand: expand.unwrap_or_default(),
    })
}
