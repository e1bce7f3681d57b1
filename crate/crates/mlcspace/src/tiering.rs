//! Small/Medium/Large tiers and the mechanical grammar filter.
//!
//! The smaller tier grammars are not hand-maintained: they are derived from
//! the Large grammar by removing every alternative whose reachable algorithm
//! set lies entirely outside the tier, deleting productions that end up with
//! no alternatives, and pruning everything no longer reachable from the start
//! symbol.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::{
    mlc_for_nonterminal, mlc_for_token, slc_for_nonterminal, slc_for_token, tier_registry,
    MlcAlg, SlcAlg,
};
use crate::grammar::{Alternative, Grammar, Production, SourceTier, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Small,
    Medium,
    Large,
}

impl Tier {
    pub const ALL: [Tier; 3] = [Tier::Small, Tier::Medium, Tier::Large];

    pub fn source_tier(self) -> SourceTier {
        match self {
            Tier::Small => SourceTier::Small,
            Tier::Medium => SourceTier::Medium,
            Tier::Large => SourceTier::Large,
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tier::Small => write!(f, "small"),
            Tier::Medium => write!(f, "medium"),
            Tier::Large => write!(f, "large"),
        }
    }
}

impl std::str::FromStr for Tier {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "small" => Ok(Tier::Small),
            "medium" => Ok(Tier::Medium),
            "large" => Ok(Tier::Large),
            other => Err(format!("unknown tier `{other}` (small, medium, large)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TierError {
    #[error("tier filtering removed every alternative of the start symbol")]
    EmptyTier,
}

/// Exact algorithm membership of a tier.
pub fn tier_membership(tier: Tier) -> (BTreeSet<MlcAlg>, BTreeSet<SlcAlg>) {
    let reg = tier_registry();
    (reg.mlc_in_tier(tier), reg.slc_in_tier(tier))
}

/// Algorithm identities reachable from a symbol (either family).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AlgSet {
    pub mlc: BTreeSet<MlcAlg>,
    pub slc: BTreeSet<SlcAlg>,
}

impl AlgSet {
    fn is_empty(&self) -> bool {
        self.mlc.is_empty() && self.slc.is_empty()
    }

    fn extend(&mut self, other: &AlgSet) {
        self.mlc.extend(other.mlc.iter().copied());
        self.slc.extend(other.slc.iter().copied());
    }

    fn intersects(&self, mlc: &BTreeSet<MlcAlg>, slc: &BTreeSet<SlcAlg>) -> bool {
        self.mlc.iter().any(|a| mlc.contains(a)) || self.slc.iter().any(|a| slc.contains(a))
    }
}

/// Reachability oracle over a fixed grammar, memoized per nonterminal.
pub struct Reachability<'g> {
    grammar: &'g Grammar,
    memo: HashMap<String, AlgSet>,
}

impl<'g> Reachability<'g> {
    pub fn new(grammar: &'g Grammar) -> Self {
        Reachability {
            grammar,
            memo: HashMap::new(),
        }
    }

    pub fn of_nonterminal(&mut self, name: &str) -> AlgSet {
        if let Some(cached) = self.memo.get(name) {
            return cached.clone();
        }
        // Seed with the marker identity (if any) and an empty set to stop
        // cycles; the grammar itself is acyclic.
        let mut set = AlgSet::default();
        if let Some(a) = mlc_for_nonterminal(name) {
            set.mlc.insert(a);
        }
        if let Some(a) = slc_for_nonterminal(name) {
            set.slc.insert(a);
        }
        self.memo.insert(name.to_string(), set.clone());
        if let Some(p) = self.grammar.production(name) {
            for alt in &p.alternatives {
                let alt_set = self.of_symbols(&alt.symbols);
                set.extend(&alt_set);
            }
        }
        self.memo.insert(name.to_string(), set.clone());
        set
    }

    pub fn of_symbols(&mut self, symbols: &[Symbol]) -> AlgSet {
        let mut set = AlgSet::default();
        for s in symbols {
            set.extend(&self.of_symbol(s));
        }
        set
    }

    pub fn of_symbol(&mut self, symbol: &Symbol) -> AlgSet {
        match symbol {
            Symbol::NonTerminal(n) => self.of_nonterminal(n),
            Symbol::Terminal(t) => {
                let mut set = AlgSet::default();
                if let Some(a) = mlc_for_token(t) {
                    set.mlc.insert(a);
                }
                if let Some(a) = slc_for_token(t) {
                    set.slc.insert(a);
                }
                set
            }
            Symbol::Optional(alts) | Symbol::Group(alts) => {
                let mut set = AlgSet::default();
                for a in alts {
                    set.extend(&self.of_symbols(&a.symbols));
                }
                set
            }
            _ => AlgSet::default(),
        }
    }
}

/// Derive the grammar for `tier` from the Large grammar.
///
/// Alternatives that can only produce out-of-tier algorithms are removed;
/// optional groups whose content is entirely out-of-tier disappear; emptied
/// productions are deleted together with every alternative referencing them;
/// finally, productions unreachable from the start symbol are dropped.
pub fn restrict_to_tier(grammar: &Grammar, tier: Tier) -> Result<Grammar, TierError> {
    let (keep_mlc, keep_slc) = tier_membership(tier);
    let mut reach = Reachability::new(grammar);

    // Precompute filtered bodies against the original grammar.
    let mut productions: Vec<Production> = Vec::new();
    for p in grammar.productions() {
        let alternatives: Vec<Alternative> = p
            .alternatives
            .iter()
            .filter_map(|alt| filter_alternative(alt, &keep_mlc, &keep_slc, &mut reach))
            .collect();
        productions.push(Production {
            name: p.name.clone(),
            alternatives,
            comment: p.comment.clone(),
        });
    }

    // Deleting a production invalidates alternatives that reference it;
    // iterate to a fixpoint.
    loop {
        let dead: HashSet<String> = productions
            .iter()
            .filter(|p| p.alternatives.is_empty())
            .map(|p| p.name.clone())
            .collect();
        if dead.is_empty() {
            break;
        }
        productions.retain(|p| !p.alternatives.is_empty());
        let mut changed = false;
        for p in &mut productions {
            let before = p.alternatives.len();
            p.alternatives.retain(|alt| !references_dead(&alt.symbols, &dead));
            // Dead references inside optionals/groups need structural pruning.
            for alt in &mut p.alternatives {
                prune_dead_in_symbols(&mut alt.symbols, &dead);
            }
            p.alternatives.retain(|alt| !alt.symbols.is_empty());
            changed |= p.alternatives.len() != before;
        }
        if !changed && productions.iter().all(|p| !p.alternatives.is_empty()) {
            break;
        }
    }

    let start_name = grammar.start().name.clone();
    if !productions.iter().any(|p| p.name == start_name && !p.alternatives.is_empty()) {
        return Err(TierError::EmptyTier);
    }

    // Keep only productions reachable from the start symbol.
    let mut reachable: HashSet<String> = HashSet::new();
    let index: HashMap<&str, &Production> =
        productions.iter().map(|p| (p.name.as_str(), p)).collect();
    let mut stack = vec![start_name.clone()];
    while let Some(name) = stack.pop() {
        if !reachable.insert(name.clone()) {
            continue;
        }
        if let Some(p) = index.get(name.as_str()) {
            let mut refs = BTreeSet::new();
            for alt in &p.alternatives {
                collect_refs(&alt.symbols, &mut refs);
            }
            stack.extend(refs);
        }
    }
    let productions: Vec<Production> = productions
        .into_iter()
        .filter(|p| reachable.contains(&p.name))
        .collect();

    Grammar::rebuild(productions, tier.source_tier()).map_err(|_| TierError::EmptyTier)
}

fn filter_alternative(
    alt: &Alternative,
    keep_mlc: &BTreeSet<MlcAlg>,
    keep_slc: &BTreeSet<SlcAlg>,
    reach: &mut Reachability,
) -> Option<Alternative> {
    let mut symbols = Vec::with_capacity(alt.symbols.len());
    for s in &alt.symbols {
        match filter_symbol(s, keep_mlc, keep_slc, reach)? {
            Some(sym) => symbols.push(sym),
            None => {} // optional content fully out of tier: drop the optional
        }
    }
    if symbols.is_empty() {
        None
    } else {
        Some(Alternative { symbols })
    }
}

/// `None` = the whole alternative dies; `Some(None)` = this symbol vanishes.
fn filter_symbol(
    symbol: &Symbol,
    keep_mlc: &BTreeSet<MlcAlg>,
    keep_slc: &BTreeSet<SlcAlg>,
    reach: &mut Reachability,
) -> Option<Option<Symbol>> {
    let set = reach.of_symbol(symbol);
    let out_of_tier = !set.is_empty() && !set.intersects(keep_mlc, keep_slc);
    match symbol {
        Symbol::Optional(alts) => {
            if out_of_tier {
                return Some(None);
            }
            let kept: Vec<Alternative> = alts
                .iter()
                .filter_map(|a| filter_alternative(a, keep_mlc, keep_slc, reach))
                .collect();
            if kept.is_empty() {
                Some(None)
            } else {
                Some(Some(Symbol::Optional(kept)))
            }
        }
        Symbol::Group(alts) => {
            if out_of_tier {
                return None;
            }
            let kept: Vec<Alternative> = alts
                .iter()
                .filter_map(|a| filter_alternative(a, keep_mlc, keep_slc, reach))
                .collect();
            if kept.is_empty() {
                None
            } else {
                Some(Some(Symbol::Group(kept)))
            }
        }
        _ => {
            if out_of_tier {
                None
            } else {
                Some(Some(symbol.clone()))
            }
        }
    }
}

fn references_dead(symbols: &[Symbol], dead: &HashSet<String>) -> bool {
    symbols.iter().any(|s| match s {
        Symbol::NonTerminal(n) => dead.contains(n),
        // Optionals and groups are handled structurally by the caller.
        _ => false,
    })
}

fn prune_dead_in_symbols(symbols: &mut Vec<Symbol>, dead: &HashSet<String>) {
    let mut i = 0;
    while i < symbols.len() {
        let remove = match &mut symbols[i] {
            Symbol::Optional(alts) => {
                alts.retain_mut(|a| {
                    if references_dead(&a.symbols, dead) {
                        return false;
                    }
                    prune_dead_in_symbols(&mut a.symbols, dead);
                    !a.symbols.is_empty()
                });
                alts.is_empty()
            }
            Symbol::Group(alts) => {
                alts.retain_mut(|a| {
                    if references_dead(&a.symbols, dead) {
                        return false;
                    }
                    prune_dead_in_symbols(&mut a.symbols, dead);
                    !a.symbols.is_empty()
                });
                if alts.is_empty() {
                    // A group must produce something; the containing
                    // alternative dies with it.
                    symbols.clear();
                    return;
                }
                false
            }
            _ => false,
        };
        if remove {
            symbols.remove(i);
        } else {
            i += 1;
        }
    }
}

fn collect_refs(symbols: &[Symbol], out: &mut BTreeSet<String>) {
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

/// Bundled grammar for a tier (Large as shipped, Small/Medium derived).
pub fn tier_grammar(tier: Tier) -> Grammar {
    match tier {
        Tier::Large => crate::catalog::large_grammar().clone(),
        other => restrict_to_tier(crate::catalog::large_grammar(), other)
            .expect("standard tiers are never empty"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::large_grammar;
    use crate::grammar::print_grammar;

    #[test]
    fn membership_counts_match_tables() {
        let (mlc_s, slc_s) = tier_membership(Tier::Small);
        let (mlc_m, slc_m) = tier_membership(Tier::Medium);
        let (mlc_l, slc_l) = tier_membership(Tier::Large);
        assert_eq!((mlc_s.len(), slc_s.len()), (5, 5));
        assert_eq!((mlc_m.len(), slc_m.len()), (15, 15));
        assert_eq!((mlc_l.len(), slc_l.len()), (26, 28));
        assert!(mlc_s.is_subset(&mlc_m) && mlc_m.is_subset(&mlc_l));
        assert!(slc_s.is_subset(&slc_m) && slc_m.is_subset(&slc_l));
    }

    #[test]
    fn medium_adds_the_expected_mlc_algorithms() {
        let (mlc_s, _) = tier_membership(Tier::Small);
        let (mlc_m, _) = tier_membership(Tier::Medium);
        let added: Vec<&str> = mlc_m.difference(&mlc_s).map(|a| a.acronym()).collect();
        assert_eq!(
            added,
            vec!["BCC", "BRq", "CCq", "FW", "MCC", "PCC", "PS", "PSt", "RAkELd", "RT"]
        );
    }

    #[test]
    fn large_filter_is_identity() {
        let g = large_grammar();
        let filtered = restrict_to_tier(g, Tier::Large).unwrap();
        assert_eq!(print_grammar(g), print_grammar(&filtered));
    }

    #[test]
    fn small_filter_prunes_meta_levels() {
        let g = restrict_to_tier(large_grammar(), Tier::Small).unwrap();
        assert!(g.production("META-MLC-LEVEL").is_none());
        assert!(g.production("META1").is_none());
        // <ALGS-PT1> keeps exactly BR, CC, LC and the RAkEL path.
        let pt1 = g.production("ALGS-PT1").unwrap();
        let rendered: Vec<String> = pt1
            .alternatives
            .iter()
            .map(|a| {
                a.symbols
                    .iter()
                    .map(|s| match s {
                        Symbol::Terminal(t) => t.clone(),
                        Symbol::NonTerminal(n) => format!("<{n}>"),
                        other => format!("{other:?}"),
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        assert_eq!(rendered, vec!["BR", "CC", "LC", "<LP_based>"]);
        // The SLC entry degenerates to plain base algorithms.
        let slc = g.production("ALGS-SLC").unwrap();
        assert_eq!(slc.alternatives.len(), 1);
        // No ASC optional survives in <ALG-TYPE>.
        let alg_type = g.production("ALG-TYPE").unwrap();
        assert!(alg_type.alternatives[0]
            .symbols
            .iter()
            .all(|s| !matches!(s, Symbol::Optional(_))));
    }

    #[test]
    fn medium_filter_keeps_alg_type_only() {
        let g = restrict_to_tier(large_grammar(), Tier::Medium).unwrap();
        let slc = g.production("ALGS-SLC").unwrap();
        assert_eq!(slc.alternatives.len(), 1);
        let alg_type = g.production("ALG-TYPE").unwrap();
        assert!(alg_type.alternatives[0]
            .symbols
            .iter()
            .all(|s| !matches!(s, Symbol::Optional(_))));
        // BCC stays, so its dependency-type production stays too.
        assert!(g.production("dp_complete").is_some());
        // Trellis/Gibbs algorithms are gone.
        assert!(g.production("CT").is_none());
        assert!(g.production("i_cdn_cdt").is_none());
    }

    #[test]
    fn filtering_is_idempotent() {
        for tier in [Tier::Small, Tier::Medium] {
            let once = restrict_to_tier(large_grammar(), tier).unwrap();
            let twice = restrict_to_tier(&once, tier).unwrap();
            assert_eq!(print_grammar(&once), print_grammar(&twice));
        }
    }

    #[test]
    fn tiered_grammars_round_trip() {
        for tier in Tier::ALL {
            let g = tier_grammar(tier);
            let printed = print_grammar(&g);
            let reparsed = crate::grammar::parse_grammar(&printed).unwrap();
            assert_eq!(printed, print_grammar(&reparsed));
        }
    }

    #[test]
    fn reachable_markers_stay_inside_each_tier() {
        for tier in Tier::ALL {
            let g = tier_grammar(tier);
            let (keep_mlc, keep_slc) = tier_membership(tier);
            let mut reach = Reachability::new(&g);
            let start = g.start().name.clone();
            let set = reach.of_nonterminal(&start);
            assert!(set.mlc.is_subset(&keep_mlc), "tier {tier}: {:?}", set.mlc);
            assert!(set.slc.is_subset(&keep_slc), "tier {tier}: {:?}", set.slc);
            // And the whole tier is actually reachable.
            assert_eq!(set.mlc, keep_mlc, "tier {tier}");
            assert_eq!(set.slc, keep_slc, "tier {tier}");
        }
    }
}
