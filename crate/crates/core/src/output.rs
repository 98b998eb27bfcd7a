//! Rendering of answers, bindings, justification trees, statistics and
//! compiled code, in the surface notation of the input language.
//!
//! A constrained variable prints as `V | {C1,C2}` at every occurrence;
//! models print their entries in call order inside braces; bindings print
//! one comma-separated line. Rendering is deterministic: identical inputs
//! yield identical bytes.

use std::fmt::Write;

use crate::engine::{ACon, ATerm, Answer, EntryKind, JustLabel, JustTree, ModelLit, Stats};
use crate::syntax::{ShowSpec, Sym};
use crate::transform::CompiledProgram;

#[derive(Clone, Debug)]
pub struct RenderOptions {
    /// Apply the program's `#show` directives.
    pub show_filter: bool,
    /// Render justification trees.
    pub tree: bool,
    /// Wrap column for model blocks; at least 40.
    pub width: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            show_filter: true,
            tree: false,
            width: 100,
        }
    }
}

impl RenderOptions {
    fn width(&self) -> usize {
        self.width.max(40)
    }
}

fn push_var(out: &mut String, answer: &Answer, id: u32) {
    let v = &answer.vars[id as usize];
    if v.cons.is_empty() {
        out.push_str(&v.name);
        return;
    }
    out.push_str(&v.name);
    out.push_str("| {");
    for (i, c) in v.cons.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        match c {
            ACon::Neq(t) => {
                out.push_str(&v.name);
                out.push_str(" \\= ");
                push_term(out, answer, t);
            }
            ACon::Lo(b, strict) => {
                out.push_str(&v.name);
                out.push_str(if *strict { " #> " } else { " #>= " });
                let _ = write!(out, "{b}");
            }
            ACon::Hi(b, strict) => {
                out.push_str(&v.name);
                out.push_str(if *strict { " #< " } else { " #=< " });
                let _ = write!(out, "{b}");
            }
        }
    }
    out.push('}');
}

fn is_cons(name: &Sym, args: &[ATerm]) -> bool {
    name.as_str() == "." && args.len() == 2
}

fn push_term(out: &mut String, answer: &Answer, t: &ATerm) {
    match t {
        ATerm::Num(n) => {
            let _ = write!(out, "{n}");
        }
        ATerm::Const(s) => out.push_str(s.as_str()),
        ATerm::Var(id) => push_var(out, answer, *id),
        ATerm::Comp(name, args) if is_cons(name, args) => {
            out.push('[');
            push_term(out, answer, &args[0]);
            let mut tail = &args[1];
            loop {
                match tail {
                    ATerm::Const(s) if s.as_str() == "[]" => break,
                    ATerm::Comp(n, a) if is_cons(n, a) => {
                        out.push(',');
                        push_term(out, answer, &a[0]);
                        tail = &a[1];
                    }
                    other => {
                        out.push('|');
                        push_term(out, answer, other);
                        break;
                    }
                }
            }
            out.push(']');
        }
        ATerm::Comp(name, args) => {
            out.push_str(name.as_str());
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                push_term(out, answer, a);
            }
            out.push(')');
        }
    }
}

fn push_lit(out: &mut String, answer: &Answer, lit: &ModelLit) {
    if lit.naf {
        out.push_str("not ");
    }
    out.push_str(lit.name.as_str());
    if !lit.args.is_empty() {
        out.push('(');
        for (i, a) in lit.args.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            push_term(out, answer, a);
        }
        out.push(')');
    }
}

fn shown(shows: &[ShowSpec], lit: &ModelLit) -> bool {
    if shows.is_empty() {
        return true;
    }
    // `#show p/n` admits both `p(...)` and `not p(...)`.
    shows
        .iter()
        .any(|s| s.name == lit.name && s.arity == lit.args.len() as u32)
}

/// The model block `{ l1, l2, ... }`, entries in call order, duplicates
/// printed once, helper predicates never present. Wraps at `opts.width`.
pub fn render_model(answer: &Answer, shows: &[ShowSpec], opts: &RenderOptions) -> String {
    let mut items: Vec<String> = Vec::new();
    for lit in &answer.model {
        if opts.show_filter && !shown(shows, lit) {
            continue;
        }
        let mut s = String::new();
        push_lit(&mut s, answer, lit);
        if !items.contains(&s) {
            items.push(s);
        }
    }
    if items.is_empty() {
        return "{ }".to_string();
    }
    let one_line = format!("{{ {} }}", items.join(", "));
    if one_line.len() <= opts.width() {
        return one_line;
    }
    let mut out = String::new();
    out.push_str("{ ");
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push_str("  ");
        }
        out.push_str(item);
        if i + 1 < items.len() {
            out.push_str(",\n");
        }
    }
    out.push_str(" }");
    out
}

/// One line per query variable: `V = t` when bound, otherwise its
/// constraints in canonical order; unconstrained variables are omitted.
pub fn render_bindings(answer: &Answer) -> String {
    let mut items: Vec<String> = Vec::new();
    for b in &answer.bindings {
        match &b.value {
            Some(t) => {
                let mut s = String::new();
                s.push_str(&b.name);
                s.push_str(" = ");
                push_term(&mut s, answer, t);
                items.push(s);
            }
            None => {
                for c in &answer.vars[b.var as usize].cons {
                    let mut s = String::new();
                    s.push_str(&b.name);
                    match c {
                        ACon::Neq(t) => {
                            s.push_str(" \\= ");
                            push_term(&mut s, answer, t);
                        }
                        ACon::Lo(bound, strict) => {
                            s.push_str(if *strict { " #> " } else { " #>= " });
                            let _ = write!(s, "{bound}");
                        }
                        ACon::Hi(bound, strict) => {
                            s.push_str(if *strict { " #< " } else { " #=< " });
                            let _ = write!(s, "{bound}");
                        }
                    }
                    items.push(s);
                }
            }
        }
    }
    items.join(", ")
}

/// Fixed-field statistics block; time in seconds with millisecond precision.
pub fn render_stats(stats: &Stats, dcc_enabled: bool) -> String {
    format!(
        "models returned:  {}\nmodels discarded: {}\ndcc detections:   {}{}\ntime:             {:.3} s",
        stats.models_returned,
        stats.nmr_discarded,
        stats.dcc_detections,
        if dcc_enabled { "" } else { " (dcc off)" },
        stats.wall_time.as_secs_f64(),
    )
}

/// Machine-readable one-liner for `--stats=raw`.
pub fn render_stats_raw(stats: &Stats) -> String {
    format!(
        "returned={} discarded={} dcc={} time_ms={}",
        stats.models_returned,
        stats.nmr_discarded,
        stats.dcc_detections,
        stats.wall_time.as_millis(),
    )
}

/// Indented justification tree, two spaces per level; coinductive nodes are
/// suffixed `(chs)`, re-used ones `(proved)`.
pub fn render_justification(answer: &Answer, _opts: &RenderOptions) -> String {
    let mut out = String::new();
    for root in &answer.just {
        push_just(&mut out, answer, root, 0);
    }
    if out.ends_with('\n') {
        out.pop();
    }
    out
}

fn push_just(out: &mut String, answer: &Answer, node: &JustTree, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
    match &node.label {
        JustLabel::Goal {
            kind,
            naf,
            name,
            args,
        } => {
            let lit = ModelLit {
                kind: *kind,
                naf: *naf,
                name: name.clone(),
                args: args.clone(),
            };
            push_lit(out, answer, &lit);
            match kind {
                EntryKind::Chs => out.push_str(" (chs)"),
                EntryKind::Proved => out.push_str(" (proved)"),
                EntryKind::Fact => {}
            }
        }
        JustLabel::Cmp(op, a, b) => {
            push_term(out, answer, a);
            let _ = write!(out, " {} ", op.symbol());
            push_term(out, answer, b);
        }
        JustLabel::Forall => out.push_str("forall"),
        JustLabel::NmrCheck => out.push_str("nmr_check"),
    }
    out.push('\n');
    for child in &node.children {
        push_just(out, answer, child, depth + 1);
    }
}

/// The compiled program in the input grammar plus `dcc/2` facts; the result
/// parses back with the dump parser.
pub fn render_code(prog: &CompiledProgram) -> String {
    let mut out = String::new();
    let section = |out: &mut String, title: &str| {
        if !out.is_empty() {
            out.push('\n');
        }
        let _ = writeln!(out, "% {title}");
    };
    if !prog.user_clauses.is_empty() {
        section(&mut out, "user program");
        for c in &prog.user_clauses {
            let _ = writeln!(out, "{c}");
        }
    }
    if !prog.dual_clauses.is_empty() {
        section(&mut out, "dual program");
        for c in &prog.dual_clauses {
            let _ = writeln!(out, "{c}");
        }
    }
    section(&mut out, "consistency checks");
    for c in &prog.nmr_clauses {
        let _ = writeln!(out, "{c}");
    }
    if !prog.dcc_rules.is_empty() {
        section(&mut out, "dcc rules");
        for rule in &prog.dcc_rules {
            let names = rule.var_names.clone();
            let namer = move |v: crate::syntax::Var| {
                names
                    .get(v.0 as usize)
                    .cloned()
                    .unwrap_or_else(|| format!("_G{}", v.0))
            };
            let trigger = crate::syntax::WithNames {
                item: &crate::syntax::Goal::Lit(rule.trigger.clone()),
                names: &namer,
            }
            .to_string();
            let residual = rule
                .residual
                .iter()
                .map(|g| crate::syntax::WithNames { item: g, names: &namer }.to_string())
                .collect::<Vec<_>>()
                .join(", ");
            let _ = writeln!(out, "dcc({trigger}, [{residual}]).");
        }
    }
    if !prog.shows.is_empty() {
        section(&mut out, "directives");
        for s in &prog.shows {
            let _ = writeln!(out, "{s}");
        }
    }
    out
}
