//! Canonical grammar printer. One production per line, single spaces between
//! symbols, alternatives joined by ` | `, the production comment re-emitted
//! after the body. Printing is a fixpoint under parse/print.

use std::fmt::Write;

use super::{Alternative, Grammar, Symbol};

pub(super) fn render(g: &Grammar) -> String {
    let mut out = String::new();
    for p in g.productions() {
        let _ = write!(out, "<{}> ::= {}", p.name, render_alternatives(&p.alternatives));
        if let Some(c) = &p.comment {
            let _ = write!(out, " # {c}");
        }
        out.push('\n');
    }
    out
}

fn render_alternatives(alts: &[Alternative]) -> String {
    alts.iter()
        .map(render_symbols)
        .collect::<Vec<_>>()
        .join(" | ")
}

fn render_symbols(alt: &Alternative) -> String {
    alt.symbols
        .iter()
        .map(render_symbol)
        .collect::<Vec<_>>()
        .join(" ")
}

fn render_symbol(s: &Symbol) -> String {
    match s {
        Symbol::NonTerminal(n) => format!("<{n}>"),
        Symbol::Terminal(t) => t.clone(),
        Symbol::Optional(alts) => format!("[{}]", render_alternatives(alts)),
        Symbol::Group(alts) => format!("({})", render_alternatives(alts)),
        Symbol::IntRange { lo, hi } => format!("RANDOM-INT({lo}, {hi})"),
        Symbol::RealRange {
            lo,
            hi,
            lo_open,
            hi_open,
            scale,
        } => {
            let lo_prefix = if *lo_open { ">" } else { "" };
            let hi_prefix = if *hi_open { "<" } else { "" };
            let mut text = format!("RANDOM-REAL({lo_prefix}{lo}, {hi_prefix}{hi})");
            if let Some(s) = scale {
                let _ = write!(text, " * {s}");
            }
            text
        }
    }
}
