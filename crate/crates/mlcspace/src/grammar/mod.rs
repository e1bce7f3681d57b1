//! Parsed, immutable representation of the BNF search-space dialect.
//!
//! The dialect: `<name> ::= body` productions, alternatives split on `|`,
//! optional groups in `[...]`, grouped choices in `(...)`, comments from `#`
//! to end of line, and numeric leaves `RANDOM-INT(lo, hi)` /
//! `RANDOM-REAL(lo, hi)` whose bounds may depend on the dataset through `L`
//! and `n_attributes`. A `RANDOM-REAL` leaf may carry a trailing
//! `* <expr>` scale factor, in which case the sampled fraction is multiplied
//! out and rounded to the nearest integer (the hidden-unit rule).

mod parse;
mod print;

pub use parse::parse_grammar;

use std::collections::{BTreeSet, HashMap};

use crate::bounds::{BoundExpr, DatasetContext};

/// Tier label a grammar was derived for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SourceTier {
    Small,
    Medium,
    Large,
    Custom,
}

/// An immutable context-free grammar in the search-space dialect.
#[derive(Debug, Clone, PartialEq)]
pub struct Grammar {
    pub(crate) productions: Vec<Production>,
    pub(crate) index: HashMap<String, usize>,
    pub(crate) source_tier: SourceTier,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Production {
    pub name: String,
    pub alternatives: Vec<Alternative>,
    pub comment: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alternative {
    pub symbols: Vec<Symbol>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Symbol {
    /// `<name>` reference.
    NonTerminal(String),
    /// Bare token.
    Terminal(String),
    /// `[ ... ]`; inner alternatives (usually one).
    Optional(Vec<Alternative>),
    /// `( a | b )` grouped choice.
    Group(Vec<Alternative>),
    /// `RANDOM-INT(lo, hi)` inclusive integer interval.
    IntRange { lo: BoundExpr, hi: BoundExpr },
    /// `RANDOM-REAL(lo, hi)`, optionally open at either end and optionally
    /// scaled by a trailing `* expr` (sampled value is then rounded to an
    /// integer and clamped to at least 1).
    RealRange {
        lo: BoundExpr,
        hi: BoundExpr,
        lo_open: bool,
        hi_open: bool,
        scale: Option<BoundExpr>,
    },
}

/// Counts over the parsed structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrammarStats {
    pub rule_count: usize,
    /// Defined productions plus referenced-but-undefined names.
    pub nonterminal_count: usize,
    /// Distinct terminal tokens.
    pub terminal_count: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GrammarError {
    #[error("syntax error at line {line}, column {column}: expected {expected}")]
    Syntax {
        line: usize,
        column: usize,
        expected: String,
    },
    #[error("duplicate production <{0}>")]
    DuplicateProduction(String),
    #[error("grammar has no productions")]
    Empty,
}

/// Start symbol of the bundled search-space grammars.
pub const START_SYMBOL: &str = "Start";

impl Grammar {
    pub fn source_tier(&self) -> SourceTier {
        self.source_tier
    }

    pub(crate) fn with_tier(mut self, tier: SourceTier) -> Self {
        self.source_tier = tier;
        self
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn production(&self, name: &str) -> Option<&Production> {
        self.index.get(name).map(|&i| &self.productions[i])
    }

    pub fn production_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// The start symbol is the first production.
    pub fn start(&self) -> &Production {
        &self.productions[0]
    }

    pub(crate) fn rebuild(
        productions: Vec<Production>,
        tier: SourceTier,
    ) -> Result<Self, GrammarError> {
        let mut index = HashMap::with_capacity(productions.len());
        for (i, p) in productions.iter().enumerate() {
            if index.insert(p.name.clone(), i).is_some() {
                return Err(GrammarError::DuplicateProduction(p.name.clone()));
            }
        }
        if productions.is_empty() {
            return Err(GrammarError::Empty);
        }
        Ok(Grammar {
            productions,
            index,
            source_tier: tier,
        })
    }

    /// Nonterminals referenced in some alternative but never defined.
    pub fn unresolved_references(&self) -> Vec<String> {
        let mut refs = BTreeSet::new();
        for p in &self.productions {
            for alt in &p.alternatives {
                collect_refs(&alt.symbols, &mut refs);
            }
        }
        refs.into_iter()
            .filter(|n| !self.index.contains_key(n.as_str()))
            .collect()
    }

    /// Distinct terminal tokens, sorted.
    pub fn terminal_tokens(&self) -> BTreeSet<&str> {
        let mut tokens = BTreeSet::new();
        for p in &self.productions {
            for alt in &p.alternatives {
                collect_terminals(&alt.symbols, &mut tokens);
            }
        }
        tokens
    }

    /// Walk every numeric range in the grammar.
    pub fn for_each_range(&self, mut f: impl FnMut(&str, &Symbol)) {
        fn walk<'g>(name: &'g str, symbols: &'g [Symbol], f: &mut impl FnMut(&'g str, &'g Symbol)) {
            for s in symbols {
                match s {
                    Symbol::IntRange { .. } | Symbol::RealRange { .. } => f(name, s),
                    Symbol::Optional(alts) | Symbol::Group(alts) => {
                        for a in alts {
                            walk(name, &a.symbols, f);
                        }
                    }
                    _ => {}
                }
            }
        }
        for p in &self.productions {
            for alt in &p.alternatives {
                walk(&p.name, &alt.symbols, &mut f);
            }
        }
    }
}

fn collect_refs<'g>(symbols: &'g [Symbol], out: &mut BTreeSet<String>) {
    for s in symbols {
        match s {
            Symbol::NonTerminal(n) => {
                out.insert(n.clone());
            }
            Symbol::Optional(alts) | Symbol::Group(alts) => {
                for a in alts {
                    collect_refs(&a.symbols, out);
                }
            }
            _ => {}
        }
    }
}

fn collect_terminals<'g>(symbols: &'g [Symbol], out: &mut BTreeSet<&'g str>) {
    for s in symbols {
        match s {
            Symbol::Terminal(t) => {
                out.insert(t.as_str());
            }
            Symbol::Optional(alts) | Symbol::Group(alts) => {
                for a in alts {
                    collect_terminals(&a.symbols, out);
                }
            }
            _ => {}
        }
    }
}

/// Canonical text form; `parse_grammar(print_grammar(g))` is structurally
/// equal to `g` and printing is a fixpoint after one normalization.
pub fn print_grammar(g: &Grammar) -> String {
    print::render(g)
}

/// Counts computed over the parsed structure.
pub fn grammar_stats(g: &Grammar) -> GrammarStats {
    GrammarStats {
        rule_count: g.productions.len(),
        nonterminal_count: g.productions.len() + g.unresolved_references().len(),
        terminal_count: g.terminal_tokens().len(),
    }
}

/// Integer interval of an `IntRange` under `ctx`, with the degenerate-range
/// clamp `[lo, max(lo, hi)]`.
pub fn int_interval(lo: &BoundExpr, hi: &BoundExpr, ctx: DatasetContext) -> (i64, i64) {
    let l = lo.eval_int(ctx);
    let h = hi.eval_int(ctx);
    (l, h.max(l))
}

/// Effective integer interval of a scaled real range (the hidden-unit rule):
/// fraction endpoints are multiplied by the scale and rounded to nearest,
/// then clamped to at least 1.
pub fn scaled_int_interval(
    lo: &BoundExpr,
    hi: &BoundExpr,
    scale: &BoundExpr,
    ctx: DatasetContext,
) -> (i64, i64) {
    let s = scale.eval_real(ctx);
    let l = ((lo.eval_real(ctx) * s).round() as i64).max(1);
    let h = ((hi.eval_real(ctx) * s).round() as i64).max(l);
    (l, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_grammar_parses() {
        let g = parse_grammar("<Start> ::= a").unwrap();
        assert_eq!(g.productions().len(), 1);
        assert_eq!(g.start().alternatives.len(), 1);
        assert_eq!(
            g.start().alternatives[0].symbols,
            vec![Symbol::Terminal("a".into())]
        );
    }

    #[test]
    fn two_rule_grammar_splits_alternatives() {
        let g = parse_grammar("<Start> ::= <A> | b  \n <A> ::= c").unwrap();
        assert_eq!(g.productions().len(), 2);
        assert_eq!(g.start().alternatives.len(), 2);
    }

    #[test]
    fn stats_count_distinct_terminals() {
        let g = parse_grammar("<Start> ::= a | b").unwrap();
        let s = grammar_stats(&g);
        assert_eq!((s.rule_count, s.nonterminal_count, s.terminal_count), (1, 1, 2));

        let g = parse_grammar("<Start> ::= <A> \n <A> ::= a a").unwrap();
        let s = grammar_stats(&g);
        assert_eq!((s.rule_count, s.nonterminal_count, s.terminal_count), (2, 2, 1));
    }

    #[test]
    fn duplicate_production_is_rejected() {
        let err = parse_grammar("<Start> ::= a\n<Start> ::= b").unwrap_err();
        assert_eq!(err, GrammarError::DuplicateProduction("Start".into()));
    }

    #[test]
    fn unresolved_references_are_listed() {
        let g = parse_grammar("<Start> ::= <Ghost> | a").unwrap();
        assert_eq!(g.unresolved_references(), vec!["Ghost".to_string()]);
        let s = grammar_stats(&g);
        assert_eq!(s.nonterminal_count, 2);
    }

    #[test]
    fn print_identity_on_minimal_grammar() {
        let g = parse_grammar("<Start> ::= a").unwrap();
        assert_eq!(print_grammar(&g), "<Start> ::= a\n");
    }

    #[test]
    fn optional_brackets_are_preserved() {
        let g = parse_grammar("<Start> ::= <A> [ct]\n<A> ::= x").unwrap();
        let printed = print_grammar(&g);
        assert!(printed.contains("[ct]"), "got: {printed}");
        let reparsed = parse_grammar(&printed).unwrap();
        assert_eq!(g, reparsed);
    }

    #[test]
    fn round_trip_with_ranges_and_groups() {
        let src = "<Start> ::= (a | <B>) [c d] RANDOM-INT(1, SQRT(L) + 1)\n\
                   <B> ::= RANDOM-REAL(>0.0, <1.0) | RANDOM-REAL(0.2, 1.0) * n_attributes";
        let g = parse_grammar(src).unwrap();
        let p1 = print_grammar(&g);
        let g2 = parse_grammar(&p1).unwrap();
        assert_eq!(g, g2);
        assert_eq!(p1, print_grammar(&g2));
    }

    #[test]
    fn comments_attach_to_their_production() {
        let src = "<Start> ::= a # first\n<A> ::= b\n<Start2>"; // Start2 is a stray token...
        let _ = src;
        let g = parse_grammar("<Start> ::= a # first\n<A> ::= b").unwrap();
        assert_eq!(g.production("Start").unwrap().comment.as_deref(), Some("first"));
        assert_eq!(g.production("A").unwrap().comment, None);
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_grammar("<Start> ::= ( a").unwrap_err();
        match err {
            GrammarError::Syntax { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error: {other:?}"),
        }
    }
}
