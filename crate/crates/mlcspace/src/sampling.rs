//! Seeded random derivation of pipeline trees from a tier grammar.
//!
//! Two modes exist because the grammar's informal semantics make two
//! different promises. `Naive` picks every alternative uniformly and includes
//! every optional with probability 1/2 (the literal per-choice rule).
//! `UniformMarginal` weights the choice points that determine the headline
//! algorithm by the number of distinct headlines reachable through each
//! alternative, so that every MLC headline lands at 1/26 and every SLC
//! headline at 1/28 in the Large tier. The attribute-selection optional is
//! the one non-half optional: it is included at 1/23 so ASC is one of 23
//! equally likely outcomes on the plain-classifier path.
//!
//! Sampling is a pure function of (grammar, context, mode, seed). The RNG is
//! ChaCha8 seeded with `seed`; bulk runs derive per-sample seeds with the
//! splitmix64 mix in [`mix_seed`].

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bounds::DatasetContext;
use crate::catalog::{
    mlc_for_nonterminal, mlc_for_token, slc_for_nonterminal, slc_for_token, MlcAlg, SlcAlg,
};
use crate::grammar::{int_interval, scaled_int_interval, Alternative, Grammar, Symbol};

pub use crate::bounds::ContextError;

/// How alternatives and optionals are weighted during sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplingMode {
    /// Uniform over alternatives, optionals at probability 1/2.
    Naive,
    /// Headline-determining choice points weighted by reachable headline
    /// counts; everything else as in `Naive`.
    UniformMarginal,
}

impl fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplingMode::Naive => write!(f, "naive"),
            SamplingMode::UniformMarginal => write!(f, "uniform-marginal"),
        }
    }
}

impl std::str::FromStr for SamplingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "naive" => Ok(SamplingMode::Naive),
            "uniform-marginal" | "uniform_marginal" | "marginal" => Ok(SamplingMode::UniformMarginal),
            other => Err(format!(
                "unknown sampling mode `{other}` (naive, uniform-marginal)"
            )),
        }
    }
}

/// A concrete expansion of the grammar: every choice, optional inclusion and
/// sampled leaf value.
#[derive(Debug, Clone, PartialEq)]
pub enum DerivationTree {
    Choice {
        nonterminal: String,
        alternative: usize,
        children: Vec<DerivationTree>,
    },
    /// Inline `( a | b )` choice.
    Group {
        alternative: usize,
        children: Vec<DerivationTree>,
    },
    Optional {
        included: bool,
        alternative: usize,
        children: Vec<DerivationTree>,
    },
    IntLeaf {
        value: i64,
        lo: i64,
        hi: i64,
    },
    RealLeaf {
        value: f64,
        lo: f64,
        hi: f64,
        lo_open: bool,
        hi_open: bool,
    },
    Token(String),
}

impl DerivationTree {
    pub fn children(&self) -> &[DerivationTree] {
        match self {
            DerivationTree::Choice { children, .. }
            | DerivationTree::Group { children, .. }
            | DerivationTree::Optional { children, .. } => children,
            _ => &[],
        }
    }

    /// Depth-first pre-order walk.
    pub fn walk<'t>(&'t self, f: &mut impl FnMut(&'t DerivationTree)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    fn fmt_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        match self {
            DerivationTree::Choice {
                nonterminal,
                alternative,
                children,
            } => {
                writeln!(f, "{pad}<{nonterminal}> alt {alternative}")?;
                for c in children {
                    c.fmt_indented(f, depth + 1)?;
                }
                Ok(())
            }
            DerivationTree::Group {
                alternative,
                children,
            } => {
                writeln!(f, "{pad}(group alt {alternative})")?;
                for c in children {
                    c.fmt_indented(f, depth + 1)?;
                }
                Ok(())
            }
            DerivationTree::Optional {
                included, children, ..
            } => {
                writeln!(f, "{pad}[optional {}]", if *included { "in" } else { "out" })?;
                for c in children {
                    c.fmt_indented(f, depth + 1)?;
                }
                Ok(())
            }
            DerivationTree::IntLeaf { value, lo, hi } => {
                writeln!(f, "{pad}{value} : int[{lo}, {hi}]")
            }
            DerivationTree::RealLeaf { value, lo, hi, .. } => {
                writeln!(f, "{pad}{value} : real[{lo}, {hi}]")
            }
            DerivationTree::Token(t) => writeln!(f, "{pad}{t}"),
        }
    }
}

impl fmt::Display for DerivationTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_indented(f, 0)
    }
}

/// Derive the per-sample seed for bulk runs: splitmix64 over the base seed
/// and the sample index.
pub fn mix_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

// --- headline analysis -----------------------------------------------------

#[derive(Debug, Clone, Default)]
struct HeadlineInfo {
    mlc: BTreeSet<MlcAlg>,
    /// Every derivation of the symbol produces an MLC marker.
    mlc_always: bool,
    slc: BTreeSet<SlcAlg>,
    slc_always: bool,
}

struct HeadlineAnalysis<'g> {
    grammar: &'g Grammar,
    memo: HashMap<String, HeadlineInfo>,
}

impl<'g> HeadlineAnalysis<'g> {
    fn new(grammar: &'g Grammar) -> Self {
        HeadlineAnalysis {
            grammar,
            memo: HashMap::new(),
        }
    }

    fn of_nonterminal(&mut self, name: &str) -> HeadlineInfo {
        if let Some(info) = self.memo.get(name) {
            return info.clone();
        }
        // Marker nonterminals are themselves the headline; their interior
        // holds only hyper-parameters.
        if let Some(a) = mlc_for_nonterminal(name) {
            let info = HeadlineInfo {
                mlc: BTreeSet::from([a]),
                mlc_always: true,
                ..Default::default()
            };
            self.memo.insert(name.to_string(), info.clone());
            return info;
        }
        if let Some(a) = slc_for_nonterminal(name) {
            let info = HeadlineInfo {
                slc: BTreeSet::from([a]),
                slc_always: true,
                ..Default::default()
            };
            self.memo.insert(name.to_string(), info.clone());
            return info;
        }
        self.memo.insert(name.to_string(), HeadlineInfo::default());
        let info = match self.grammar.production(name) {
            None => HeadlineInfo::default(),
            Some(p) => {
                let mut acc: Option<HeadlineInfo> = None;
                for alt in &p.alternatives {
                    let alt_info = self.of_sequence(&alt.symbols);
                    acc = Some(match acc {
                        None => alt_info,
                        Some(mut a) => {
                            a.mlc.extend(alt_info.mlc.iter().copied());
                            a.slc.extend(alt_info.slc.iter().copied());
                            a.mlc_always &= alt_info.mlc_always;
                            a.slc_always &= alt_info.slc_always;
                            a
                        }
                    });
                }
                acc.unwrap_or_default()
            }
        };
        self.memo.insert(name.to_string(), info.clone());
        info
    }

    /// Headline info of a symbol sequence: a later symbol's markers can be
    /// the first marker only while every earlier symbol may yield none.
    fn of_sequence(&mut self, symbols: &[Symbol]) -> HeadlineInfo {
        let mut out = HeadlineInfo::default();
        let mut mlc_open = true;
        let mut slc_open = true;
        for s in symbols {
            let info = self.of_symbol(s);
            if mlc_open {
                out.mlc.extend(info.mlc.iter().copied());
                if info.mlc_always {
                    out.mlc_always = true;
                    mlc_open = false;
                }
            }
            if slc_open {
                out.slc.extend(info.slc.iter().copied());
                if info.slc_always {
                    out.slc_always = true;
                    slc_open = false;
                }
            }
        }
        out
    }

    fn of_symbol(&mut self, symbol: &Symbol) -> HeadlineInfo {
        match symbol {
            Symbol::NonTerminal(n) => self.of_nonterminal(n),
            Symbol::Terminal(t) => {
                let mut info = HeadlineInfo::default();
                if let Some(a) = mlc_for_token(t) {
                    info.mlc.insert(a);
                    info.mlc_always = true;
                }
                if let Some(a) = slc_for_token(t) {
                    info.slc.insert(a);
                    info.slc_always = true;
                }
                info
            }
            Symbol::Group(alts) => {
                let mut acc: Option<HeadlineInfo> = None;
                for alt in alts {
                    let alt_info = self.of_sequence(&alt.symbols);
                    acc = Some(match acc {
                        None => alt_info,
                        Some(mut a) => {
                            a.mlc.extend(alt_info.mlc.iter().copied());
                            a.slc.extend(alt_info.slc.iter().copied());
                            a.mlc_always &= alt_info.mlc_always;
                            a.slc_always &= alt_info.slc_always;
                            a
                        }
                    });
                }
                acc.unwrap_or_default()
            }
            Symbol::Optional(alts) => {
                let mut info = HeadlineInfo::default();
                for alt in alts {
                    let alt_info = self.of_sequence(&alt.symbols);
                    info.mlc.extend(alt_info.mlc.iter().copied());
                    info.slc.extend(alt_info.slc.iter().copied());
                }
                // Omission always possible: never "always".
                info
            }
            _ => HeadlineInfo::default(),
        }
    }
}

// --- weight table ----------------------------------------------------------

/// Per-choice-point weights that make the headline marginals uniform.
#[derive(Debug, Clone)]
pub struct WeightTable {
    plans: Vec<ProdPlan>,
}

#[derive(Debug, Clone)]
pub(crate) struct ProdPlan {
    pub(crate) weights: Option<Vec<f64>>,
    pub(crate) alts: Vec<AltPlan>,
}

#[derive(Debug, Clone)]
pub(crate) struct AltPlan {
    pub(crate) syms: Vec<SymPlan>,
}

#[derive(Debug, Clone)]
pub(crate) enum SymPlan {
    Leaf,
    Group {
        weights: Option<Vec<f64>>,
        alts: Vec<AltPlan>,
    },
    Optional {
        include_prob: f64,
        weights: Option<Vec<f64>>,
        alts: Vec<AltPlan>,
    },
}

impl SymPlan {
    fn for_symbol(symbol: &Symbol) -> SymPlan {
        match symbol {
            Symbol::Group(alts) => SymPlan::Group {
                weights: None,
                alts: alts.iter().map(AltPlan::for_alternative).collect(),
            },
            Symbol::Optional(alts) => SymPlan::Optional {
                include_prob: 0.5,
                weights: None,
                alts: alts.iter().map(AltPlan::for_alternative).collect(),
            },
            _ => SymPlan::Leaf,
        }
    }
}

impl AltPlan {
    fn for_alternative(alt: &Alternative) -> AltPlan {
        AltPlan {
            syms: alt.symbols.iter().map(SymPlan::for_symbol).collect(),
        }
    }
}

impl WeightTable {
    pub(crate) fn plan(&self, prod_idx: usize) -> &ProdPlan {
        &self.plans[prod_idx]
    }

    /// Alternative weights of a production's own choice point.
    pub fn production_weights(&self, g: &Grammar, name: &str) -> Option<Vec<f64>> {
        let idx = g.production_index(name)?;
        self.plans[idx].weights.clone()
    }

    /// Weights of an inline group reached by a path of (alternative, symbol)
    /// indices from the production head.
    pub fn group_weights(&self, g: &Grammar, name: &str, path: &[(usize, usize)]) -> Option<Vec<f64>> {
        match self.sym_plan_at(g, name, path)? {
            SymPlan::Group { weights, .. } | SymPlan::Optional { weights, .. } => weights.clone(),
            SymPlan::Leaf => None,
        }
    }

    /// Inclusion probability of an optional reached by a path.
    pub fn optional_prob(&self, g: &Grammar, name: &str, path: &[(usize, usize)]) -> Option<f64> {
        match self.sym_plan_at(g, name, path)? {
            SymPlan::Optional { include_prob, .. } => Some(*include_prob),
            _ => None,
        }
    }

    fn sym_plan_at(&self, g: &Grammar, name: &str, path: &[(usize, usize)]) -> Option<&SymPlan> {
        let idx = g.production_index(name)?;
        let mut alts: &[AltPlan] = &self.plans[idx].alts;
        let mut plan: Option<&SymPlan> = None;
        for &(alt, sym) in path {
            let p = alts.get(alt)?.syms.get(sym)?;
            plan = Some(p);
            alts = match p {
                SymPlan::Group { alts, .. } | SymPlan::Optional { alts, .. } => alts,
                SymPlan::Leaf => &[],
            };
        }
        plan
    }
}

/// Compute the headline-uniform weight table for a tiered grammar.
///
/// Choice points that pin the SLC headline (every alternative always yields
/// one) are weighted by per-alternative headline counts wherever they occur,
/// which also makes the base choice under each meta wrapper uniform over its
/// admissible set. MLC weighting applies only to choice points reachable
/// before the MLC headline is fixed, so the inner classifier choice beneath a
/// meta wrapper keeps naive weights. Optionals stay at 1/2 except when they
/// can produce a headline themselves (the ASC wrapper), where inclusion is
/// `k / (k + m)` for `k` headlines inside and `m` after it.
pub fn marginal_weights(g: &Grammar) -> WeightTable {
    let mut analysis = HeadlineAnalysis::new(g);
    let mut plans: Vec<ProdPlan> = g
        .productions()
        .iter()
        .map(|p| ProdPlan {
            weights: None,
            alts: p.alternatives.iter().map(AltPlan::for_alternative).collect(),
        })
        .collect();

    // SLC pass: unconditional.
    for (idx, p) in g.productions().iter().enumerate() {
        let counts: Vec<usize> = p
            .alternatives
            .iter()
            .map(|a| {
                let info = analysis.of_sequence(&a.symbols);
                if info.slc_always {
                    info.slc.len()
                } else {
                    0
                }
            })
            .collect();
        if counts.iter().all(|&c| c > 0) && p.alternatives.len() > 1 {
            plans[idx].weights = Some(counts.iter().map(|&c| c as f64).collect());
        }
        for (ai, alt) in p.alternatives.iter().enumerate() {
            slc_pass_sequence(&alt.symbols, &mut plans[idx].alts[ai].syms, &mut analysis);
        }
    }

    // MLC pass: only contexts where the headline is still undetermined.
    let start_idx = g
        .production_index(&g.start().name)
        .expect("start production exists");
    let mut seen: HashSet<usize> = HashSet::new();
    let mut stack = vec![start_idx];
    while let Some(idx) = stack.pop() {
        if !seen.insert(idx) {
            continue;
        }
        let p = &g.productions()[idx];
        let counts: Vec<usize> = p
            .alternatives
            .iter()
            .map(|a| {
                let info = analysis.of_sequence(&a.symbols);
                if info.mlc_always {
                    info.mlc.len()
                } else {
                    0
                }
            })
            .collect();
        if counts.iter().all(|&c| c > 0) && p.alternatives.len() > 1 {
            debug_assert!(
                plans[idx].weights.is_none(),
                "choice point weighted by both families: <{}>",
                p.name
            );
            plans[idx].weights = Some(counts.iter().map(|&c| c as f64).collect());
        }
        for (ai, alt) in p.alternatives.iter().enumerate() {
            mlc_pass_sequence(
                &alt.symbols,
                &mut plans[idx].alts[ai].syms,
                &mut analysis,
                g,
                &mut stack,
            );
        }
    }

    WeightTable { plans }
}

fn slc_pass_sequence(
    symbols: &[Symbol],
    syms: &mut [SymPlan],
    analysis: &mut HeadlineAnalysis,
) {
    for (i, s) in symbols.iter().enumerate() {
        match (s, &mut syms[i]) {
            (Symbol::Group(alts), SymPlan::Group { weights, alts: alt_plans }) => {
                let counts: Vec<usize> = alts
                    .iter()
                    .map(|a| {
                        let info = analysis.of_sequence(&a.symbols);
                        if info.slc_always {
                            info.slc.len()
                        } else {
                            0
                        }
                    })
                    .collect();
                if counts.iter().all(|&c| c > 0) && alts.len() > 1 {
                    *weights = Some(counts.iter().map(|&c| c as f64).collect());
                }
                for (ai, a) in alts.iter().enumerate() {
                    slc_pass_sequence(&a.symbols, &mut alt_plans[ai].syms, analysis);
                }
            }
            (Symbol::Optional(alts), SymPlan::Optional { include_prob, weights, alts: alt_plans }) => {
                let inside = analysis.of_symbol(s);
                let k = inside.slc.len();
                if k > 0 {
                    let rest = analysis.of_sequence(&symbols[i + 1..]);
                    let m = rest.slc.len();
                    if m > 0 {
                        *include_prob = k as f64 / (k + m) as f64;
                    }
                }
                let counts: Vec<usize> = alts
                    .iter()
                    .map(|a| {
                        let info = analysis.of_sequence(&a.symbols);
                        if info.slc_always {
                            info.slc.len()
                        } else {
                            0
                        }
                    })
                    .collect();
                if counts.iter().all(|&c| c > 0) && alts.len() > 1 {
                    *weights = Some(counts.iter().map(|&c| c as f64).collect());
                }
                for (ai, a) in alts.iter().enumerate() {
                    slc_pass_sequence(&a.symbols, &mut alt_plans[ai].syms, analysis);
                }
            }
            _ => {}
        }
    }
}

fn mlc_pass_sequence(
    symbols: &[Symbol],
    syms: &mut [SymPlan],
    analysis: &mut HeadlineAnalysis,
    g: &Grammar,
    stack: &mut Vec<usize>,
) {
    let mut undetermined = true;
    for (i, s) in symbols.iter().enumerate() {
        if undetermined {
            match (s, &mut syms[i]) {
                (Symbol::NonTerminal(n), _) => {
                    if mlc_for_nonterminal(n).is_none() {
                        if let Some(idx) = g.production_index(n) {
                            stack.push(idx);
                        }
                    }
                }
                (Symbol::Group(alts), SymPlan::Group { weights, alts: alt_plans }) => {
                    let counts: Vec<usize> = alts
                        .iter()
                        .map(|a| {
                            let info = analysis.of_sequence(&a.symbols);
                            if info.mlc_always {
                                info.mlc.len()
                            } else {
                                0
                            }
                        })
                        .collect();
                    if counts.iter().all(|&c| c > 0) && alts.len() > 1 {
                        if weights.is_none() {
                            *weights = Some(counts.iter().map(|&c| c as f64).collect());
                        }
                    }
                    for (ai, a) in alts.iter().enumerate() {
                        mlc_pass_sequence(&a.symbols, &mut alt_plans[ai].syms, analysis, g, stack);
                    }
                }
                (Symbol::Optional(alts), SymPlan::Optional { include_prob, alts: alt_plans, .. }) => {
                    let inside = analysis.of_symbol(s);
                    let k = inside.mlc.len();
                    if k > 0 {
                        let rest = analysis.of_sequence(&symbols[i + 1..]);
                        let m = rest.mlc.len();
                        if m > 0 {
                            *include_prob = k as f64 / (k + m) as f64;
                        }
                    }
                    for (ai, a) in alts.iter().enumerate() {
                        mlc_pass_sequence(&a.symbols, &mut alt_plans[ai].syms, analysis, g, stack);
                    }
                }
                _ => {}
            }
            if analysis.of_symbol(s).mlc_always {
                undetermined = false;
            }
        }
    }
}

// --- the sampler -----------------------------------------------------------

/// Reusable sampler: precomputes the weight table once per grammar and mode.
pub struct Sampler<'g> {
    grammar: &'g Grammar,
    table: Option<WeightTable>,
    mode: SamplingMode,
}

impl<'g> Sampler<'g> {
    pub fn new(grammar: &'g Grammar, mode: SamplingMode) -> Self {
        let table = match mode {
            SamplingMode::Naive => None,
            SamplingMode::UniformMarginal => Some(marginal_weights(grammar)),
        };
        Sampler {
            grammar,
            table,
            mode,
        }
    }

    pub fn grammar(&self) -> &'g Grammar {
        self.grammar
    }

    pub fn mode(&self) -> SamplingMode {
        self.mode
    }

    /// Deterministic sample for (grammar, ctx, mode, seed).
    pub fn sample(&self, ctx: DatasetContext, seed: u64) -> DerivationTree {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = self
            .grammar
            .production_index(&self.grammar.start().name)
            .expect("start exists");
        self.expand_production(start, ctx, &mut rng)
    }

    pub(crate) fn expand_production(
        &self,
        idx: usize,
        ctx: DatasetContext,
        rng: &mut ChaCha8Rng,
    ) -> DerivationTree {
        let p = &self.grammar.productions()[idx];
        let plan = self.table.as_ref().map(|t| t.plan(idx));
        let alt = pick(
            rng,
            p.alternatives.len(),
            plan.and_then(|pl| pl.weights.as_deref()),
        );
        let children = self.expand_symbols(
            &p.alternatives[alt].symbols,
            plan.map(|pl| pl.alts[alt].syms.as_slice()),
            ctx,
            rng,
        );
        DerivationTree::Choice {
            nonterminal: p.name.clone(),
            alternative: alt,
            children,
        }
    }

    pub(crate) fn expand_symbols(
        &self,
        symbols: &[Symbol],
        plans: Option<&[SymPlan]>,
        ctx: DatasetContext,
        rng: &mut ChaCha8Rng,
    ) -> Vec<DerivationTree> {
        symbols
            .iter()
            .enumerate()
            .map(|(i, s)| self.expand_symbol(s, plans.map(|p| &p[i]), ctx, rng))
            .collect()
    }

    pub(crate) fn expand_symbol(
        &self,
        symbol: &Symbol,
        plan: Option<&SymPlan>,
        ctx: DatasetContext,
        rng: &mut ChaCha8Rng,
    ) -> DerivationTree {
        match symbol {
            Symbol::NonTerminal(n) => match self.grammar.production_index(n) {
                Some(idx) => self.expand_production(idx, ctx, rng),
                // Unresolved reference: surfaces as a bracketed token.
                None => DerivationTree::Token(format!("<{n}>")),
            },
            Symbol::Terminal(t) => DerivationTree::Token(t.clone()),
            Symbol::Group(alts) => {
                let (weights, alt_plans) = match plan {
                    Some(SymPlan::Group { weights, alts }) => (weights.as_deref(), Some(alts)),
                    _ => (None, None),
                };
                let alt = pick(rng, alts.len(), weights);
                let children = self.expand_symbols(
                    &alts[alt].symbols,
                    alt_plans.map(|p| p[alt].syms.as_slice()),
                    ctx,
                    rng,
                );
                DerivationTree::Group {
                    alternative: alt,
                    children,
                }
            }
            Symbol::Optional(alts) => {
                let (p_include, weights, alt_plans) = match plan {
                    Some(SymPlan::Optional {
                        include_prob,
                        weights,
                        alts,
                    }) => (*include_prob, weights.as_deref(), Some(alts)),
                    _ => (0.5, None, None),
                };
                let included = rng.random_bool(p_include);
                if !included {
                    return DerivationTree::Optional {
                        included: false,
                        alternative: 0,
                        children: Vec::new(),
                    };
                }
                let alt = pick(rng, alts.len(), weights);
                let children = self.expand_symbols(
                    &alts[alt].symbols,
                    alt_plans.map(|p| p[alt].syms.as_slice()),
                    ctx,
                    rng,
                );
                DerivationTree::Optional {
                    included: true,
                    alternative: alt,
                    children,
                }
            }
            Symbol::IntRange { lo, hi } => {
                let (l, h) = int_interval(lo, hi, ctx);
                DerivationTree::IntLeaf {
                    value: rng.random_range(l..=h),
                    lo: l,
                    hi: h,
                }
            }
            Symbol::RealRange {
                lo,
                hi,
                scale: Some(scale),
                ..
            } => {
                // Hidden-unit rule: sample the fraction, scale, round, floor at 1.
                let (fl, fh) = (lo.eval_real(ctx), hi.eval_real(ctx));
                let fraction = fl + rng.random::<f64>() * (fh - fl);
                let value = ((fraction * scale.eval_real(ctx)).round() as i64).max(1);
                let (l, h) = scaled_int_interval(lo, hi, scale, ctx);
                DerivationTree::IntLeaf {
                    value: value.clamp(l, h),
                    lo: l,
                    hi: h,
                }
            }
            Symbol::RealRange {
                lo,
                hi,
                lo_open,
                hi_open,
                scale: None,
            } => {
                let (l, h) = (lo.eval_real(ctx), hi.eval_real(ctx));
                let value = loop {
                    let v = l + rng.random::<f64>() * (h - l);
                    if *lo_open && v <= l {
                        continue;
                    }
                    if *hi_open && v >= h {
                        continue;
                    }
                    if v > h {
                        continue;
                    }
                    break v;
                };
                DerivationTree::RealLeaf {
                    value,
                    lo: l,
                    hi: h,
                    lo_open: *lo_open,
                    hi_open: *hi_open,
                }
            }
        }
    }
}

fn pick(rng: &mut ChaCha8Rng, n: usize, weights: Option<&[f64]>) -> usize {
    debug_assert!(n > 0);
    match weights {
        None => rng.random_range(0..n),
        Some(w) => {
            debug_assert_eq!(w.len(), n);
            let total: f64 = w.iter().sum();
            let mut r = rng.random::<f64>() * total;
            for (i, wi) in w.iter().enumerate() {
                if r < *wi {
                    return i;
                }
                r -= *wi;
            }
            n - 1
        }
    }
}

/// One-shot convenience over [`Sampler`].
pub fn sample_tree(
    grammar: &Grammar,
    ctx: DatasetContext,
    mode: SamplingMode,
    seed: u64,
) -> DerivationTree {
    Sampler::new(grammar, mode).sample(ctx, seed)
}

// --- headline extraction ---------------------------------------------------

/// First MLC marker in depth-first order: the headline MLC algorithm.
pub fn mlc_headline(tree: &DerivationTree) -> Option<MlcAlg> {
    match tree {
        DerivationTree::Token(t) => mlc_for_token(t),
        DerivationTree::Choice {
            nonterminal,
            children,
            ..
        } => mlc_for_nonterminal(nonterminal).or_else(|| {
            children.iter().find_map(mlc_headline)
        }),
        other => other.children().iter().find_map(mlc_headline),
    }
}

/// Headline SLC construct of the (unique) single-label chain, if any.
pub fn slc_headline(tree: &DerivationTree) -> Option<SlcAlg> {
    fn find_chain<'t>(tree: &'t DerivationTree) -> Option<&'t DerivationTree> {
        if let DerivationTree::Choice { nonterminal, .. } = tree {
            if nonterminal == "ALGS-SLC" {
                return Some(tree);
            }
        }
        tree.children().iter().find_map(find_chain)
    }
    fn first_marker(tree: &DerivationTree) -> Option<SlcAlg> {
        match tree {
            DerivationTree::Token(t) => slc_for_token(t),
            DerivationTree::Choice {
                nonterminal,
                children,
                ..
            } => slc_for_nonterminal(nonterminal)
                .or_else(|| children.iter().find_map(first_marker)),
            other => other.children().iter().find_map(first_marker),
        }
    }
    find_chain(tree).and_then(first_marker)
}

// --- empirical frequencies ---------------------------------------------------

/// Aggregated headline frequencies and marker probabilities over `n` samples.
#[derive(Debug, Clone)]
pub struct FrequencyReport {
    pub n: u64,
    pub mlc_counts: BTreeMap<MlcAlg, u64>,
    /// Counts over samples that carry a single-label chain.
    pub slc_counts: BTreeMap<SlcAlg, u64>,
    pub chain_count: u64,
    pub lwl_hits: u64,
    pub lwl_wk_zero: u64,
    pub mcc_hits: u64,
    pub mcc_chi_zero: u64,
}

impl FrequencyReport {
    pub fn mlc_freq(&self, alg: MlcAlg) -> f64 {
        *self.mlc_counts.get(&alg).unwrap_or(&0) as f64 / self.n as f64
    }

    /// Headline frequency among samples that have an SLC chain.
    pub fn slc_freq(&self, alg: SlcAlg) -> f64 {
        if self.chain_count == 0 {
            return 0.0;
        }
        *self.slc_counts.get(&alg).unwrap_or(&0) as f64 / self.chain_count as f64
    }

    pub fn chain_rate(&self) -> f64 {
        self.chain_count as f64 / self.n as f64
    }

    /// P(weighting kernel resolves to 0 | LWL sampled); omitted counts as 0.
    pub fn p_lwl_wk_zero(&self) -> Option<f64> {
        (self.lwl_hits > 0).then(|| self.lwl_wk_zero as f64 / self.lwl_hits as f64)
    }

    /// P(chain iterations = 0 | MCC sampled).
    pub fn p_mcc_chi_zero(&self) -> Option<f64> {
        (self.mcc_hits > 0).then(|| self.mcc_chi_zero as f64 / self.mcc_hits as f64)
    }

    fn absorb(&mut self, tree: &DerivationTree) {
        if let Some(alg) = mlc_headline(tree) {
            *self.mlc_counts.entry(alg).or_insert(0) += 1;
        }
        if let Some(alg) = slc_headline(tree) {
            self.chain_count += 1;
            *self.slc_counts.entry(alg).or_insert(0) += 1;
        }
        let mut lwl_wk: Option<bool> = None;
        let mut mcc_chi: Option<bool> = None;
        tree.walk(&mut |node| {
            if let DerivationTree::Choice {
                nonterminal,
                alternative,
                children,
            } = node
            {
                match nonterminal.as_str() {
                    "LWL" => {
                        // children: [<k_lwl>, [<wk>]]; omitted kernel defaults to 0.
                        let zero = match &children[1] {
                            DerivationTree::Optional { included: false, .. } => true,
                            DerivationTree::Optional { children, .. } => matches!(
                                children.first(),
                                Some(DerivationTree::Choice { alternative: 0, .. })
                            ),
                            _ => false,
                        };
                        lwl_wk = Some(zero);
                    }
                    "chi_MCC" => {
                        mcc_chi = Some(*alternative == 1);
                    }
                    _ => {}
                }
            }
        });
        if let Some(zero) = lwl_wk {
            self.lwl_hits += 1;
            if zero {
                self.lwl_wk_zero += 1;
            }
        }
        if let Some(zero) = mcc_chi {
            self.mcc_hits += 1;
            if zero {
                self.mcc_chi_zero += 1;
            }
        }
    }
}

/// Sample `n` trees with per-index derived seeds and tally headline
/// frequencies and marker probabilities. Deterministic for fixed inputs.
pub fn empirical_frequencies(
    grammar: &Grammar,
    ctx: DatasetContext,
    mode: SamplingMode,
    n: u64,
    seed: u64,
) -> FrequencyReport {
    let sampler = Sampler::new(grammar, mode);
    let mut report = FrequencyReport {
        n,
        mlc_counts: BTreeMap::new(),
        slc_counts: BTreeMap::new(),
        chain_count: 0,
        lwl_hits: 0,
        lwl_wk_zero: 0,
        mcc_hits: 0,
        mcc_chi_zero: 0,
    };
    for i in 0..n {
        let tree = sampler.sample(ctx, mix_seed(seed, i));
        report.absorb(&tree);
    }
    report
}

/// Check a tree against the grammar and context: arity, choice indices and
/// leaf ranges. Diagnostic for tests and the evolutionary operators.
pub fn check_tree(
    grammar: &Grammar,
    ctx: DatasetContext,
    tree: &DerivationTree,
) -> Result<(), String> {
    fn check_symbols(
        g: &Grammar,
        ctx: DatasetContext,
        symbols: &[Symbol],
        children: &[DerivationTree],
    ) -> Result<(), String> {
        if symbols.len() != children.len() {
            return Err(format!(
                "arity mismatch: {} symbols vs {} children",
                symbols.len(),
                children.len()
            ));
        }
        for (s, c) in symbols.iter().zip(children) {
            check_symbol(g, ctx, s, c)?;
        }
        Ok(())
    }

    fn check_symbol(
        g: &Grammar,
        ctx: DatasetContext,
        symbol: &Symbol,
        node: &DerivationTree,
    ) -> Result<(), String> {
        match (symbol, node) {
            (Symbol::NonTerminal(n), DerivationTree::Choice { nonterminal, alternative, children }) => {
                if n != nonterminal {
                    return Err(format!("expected <{n}>, got <{nonterminal}>"));
                }
                let p = g
                    .production(n)
                    .ok_or_else(|| format!("unknown production <{n}>"))?;
                let alt = p
                    .alternatives
                    .get(*alternative)
                    .ok_or_else(|| format!("<{n}> alternative {alternative} out of range"))?;
                check_symbols(g, ctx, &alt.symbols, children)
            }
            (Symbol::NonTerminal(n), DerivationTree::Token(t)) if g.production(n).is_none() => {
                if t == &format!("<{n}>") {
                    Ok(())
                } else {
                    Err(format!("unresolved <{n}> rendered as {t}"))
                }
            }
            (Symbol::Terminal(expected), DerivationTree::Token(t)) => {
                if expected == t {
                    Ok(())
                } else {
                    Err(format!("expected token {expected}, got {t}"))
                }
            }
            (Symbol::Group(alts), DerivationTree::Group { alternative, children }) => {
                let alt = alts
                    .get(*alternative)
                    .ok_or_else(|| format!("group alternative {alternative} out of range"))?;
                check_symbols(g, ctx, &alt.symbols, children)
            }
            (Symbol::Optional(_), DerivationTree::Optional { included: false, children, .. }) => {
                if children.is_empty() {
                    Ok(())
                } else {
                    Err("omitted optional with children".to_string())
                }
            }
            (Symbol::Optional(alts), DerivationTree::Optional { included: true, alternative, children }) => {
                let alt = alts
                    .get(*alternative)
                    .ok_or_else(|| format!("optional alternative {alternative} out of range"))?;
                check_symbols(g, ctx, &alt.symbols, children)
            }
            (Symbol::IntRange { lo, hi }, DerivationTree::IntLeaf { value, .. }) => {
                let (l, h) = int_interval(lo, hi, ctx);
                if *value >= l && *value <= h {
                    Ok(())
                } else {
                    Err(format!("int leaf {value} outside [{l}, {h}]"))
                }
            }
            (
                Symbol::RealRange { lo, hi, scale: Some(scale), .. },
                DerivationTree::IntLeaf { value, .. },
            ) => {
                let (l, h) = scaled_int_interval(lo, hi, scale, ctx);
                if *value >= l && *value <= h {
                    Ok(())
                } else {
                    Err(format!("scaled leaf {value} outside [{l}, {h}]"))
                }
            }
            (
                Symbol::RealRange { lo, hi, lo_open, hi_open, scale: None },
                DerivationTree::RealLeaf { value, .. },
            ) => {
                let (l, h) = (lo.eval_real(ctx), hi.eval_real(ctx));
                let lo_ok = if *lo_open { *value > l } else { *value >= l };
                let hi_ok = if *hi_open { *value < h } else { *value <= h };
                if lo_ok && hi_ok {
                    Ok(())
                } else {
                    Err(format!("real leaf {value} outside bounds ({l}, {h})"))
                }
            }
            (s, n) => Err(format!("symbol/node mismatch: {s:?} vs {n:?}")),
        }
    }

    match tree {
        DerivationTree::Choice { nonterminal, alternative, children } => {
            if nonterminal != &grammar.start().name {
                return Err(format!(
                    "root must be <{}>, got <{nonterminal}>",
                    grammar.start().name
                ));
            }
            let alt = grammar
                .start()
                .alternatives
                .get(*alternative)
                .ok_or("root alternative out of range")?;
            check_symbols(grammar, ctx, &alt.symbols, children)
        }
        other => Err(format!("root must be a choice node, got {other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::large_grammar;
    use crate::grammar::parse_grammar;
    use crate::tiering::{tier_grammar, tier_membership, Tier};

    fn ctx(l: u32, a: u32) -> DatasetContext {
        DatasetContext::new(l, a).unwrap()
    }

    #[test]
    fn no_choice_means_constant_tree() {
        let g = parse_grammar("<S> ::= a").unwrap();
        for seed in 0..20 {
            let t = sample_tree(&g, ctx(4, 10), SamplingMode::Naive, seed);
            assert_eq!(
                t,
                DerivationTree::Choice {
                    nonterminal: "S".into(),
                    alternative: 0,
                    children: vec![DerivationTree::Token("a".into())],
                }
            );
        }
    }

    #[test]
    fn naive_two_way_choice_is_balanced() {
        let g = parse_grammar("<S> ::= a | b").unwrap();
        let sampler = Sampler::new(&g, SamplingMode::Naive);
        let mut a_count = 0u32;
        let n = 10_000;
        for i in 0..n {
            match sampler.sample(ctx(4, 10), mix_seed(7, i)) {
                DerivationTree::Choice { alternative: 0, .. } => a_count += 1,
                _ => {}
            }
        }
        let freq = a_count as f64 / n as f64;
        assert!((freq - 0.5).abs() < 0.02, "freq {freq}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = large_grammar();
        for mode in [SamplingMode::Naive, SamplingMode::UniformMarginal] {
            let s1 = Sampler::new(g, mode);
            let s2 = Sampler::new(g, mode);
            for seed in [0u64, 1, 42, u64::MAX] {
                assert_eq!(s1.sample(ctx(6, 20), seed), s2.sample(ctx(6, 20), seed));
            }
        }
    }

    // Weight vectors for the headline choice points. The totals are pinned
    // against the tier table: 18 transformation + 1 adaptation + 7 meta = 26,
    // and 22 bases + ASC + {LWL, AdaM1} + {RC} + {Bagging, RSS} = 28.
    #[test]
    fn headline_weights_match_reachable_counts() {
        let g = large_grammar();
        let w = marginal_weights(g);
        let (mlc, slc) = tier_membership(Tier::Large);
        let pt_count = mlc.iter().filter(|a| a.is_problem_transformation()).count();
        let meta_count = mlc.iter().filter(|a| a.is_meta()).count();
        assert_eq!((pt_count, meta_count), (18, 7));

        let start = w.group_weights(g, "Start", &[(0, 0)]).unwrap();
        assert_eq!(start, vec![18.0, 1.0, 7.0]);
        assert_eq!(start.iter().sum::<f64>() as usize, mlc.len());

        assert_eq!(
            w.production_weights(g, "ALGS-PT").unwrap(),
            vec![16.0, 1.0, 1.0]
        );
        assert_eq!(
            w.production_weights(g, "ALGS-PT1").unwrap(),
            vec![1.0, 1.0, 1.0, 2.0, 5.0, 1.0, 1.0, 4.0]
        );
        assert_eq!(
            w.production_weights(g, "META-MLC-LEVEL").unwrap(),
            vec![2.0, 3.0, 2.0]
        );

        let algs_slc = w.production_weights(g, "ALGS-SLC").unwrap();
        assert_eq!(algs_slc, vec![23.0, 2.0, 1.0, 2.0]);
        assert_eq!(algs_slc.iter().sum::<f64>() as usize, slc.len());

        // Base category split: trees, rules, lazy, functions, bayes, others.
        assert_eq!(
            w.group_weights(g, "ALG-TYPE", &[(0, 1)]).unwrap(),
            vec![5.0, 5.0, 2.0, 5.0, 3.0, 2.0]
        );
        assert_eq!(
            w.production_weights(g, "ALG-WEIGHTED-TYPE").unwrap(),
            vec![5.0, 4.0, 1.0, 3.0, 3.0]
        );
        assert_eq!(
            w.production_weights(g, "ALG-RANDOM-TYPE").unwrap(),
            vec![3.0, 1.0, 1.0]
        );
        assert_eq!(
            w.production_weights(g, "TREES").unwrap(),
            vec![1.0, 1.0, 3.0]
        );
    }

    #[test]
    fn asc_optional_runs_at_one_in_twentythree() {
        let g = large_grammar();
        let w = marginal_weights(g);
        let p = w.optional_prob(g, "ALG-TYPE", &[(0, 0)]).unwrap();
        assert!((p - 1.0 / 23.0).abs() < 1e-12, "p = {p}");
    }

    #[test]
    fn inner_choice_under_meta_stays_naive() {
        let g = large_grammar();
        let w = marginal_weights(g);
        // (<ALGS-PT> <ALGS-SLC> | <ML-BPNN>) under the first meta family has
        // no weights: the headline is already fixed by the wrapper.
        assert_eq!(w.group_weights(g, "META-MLC1", &[(0, 1)]), None);
        assert_eq!(w.optional_prob(g, "LWL", &[(0, 1)]), Some(0.5));
    }

    #[test]
    fn sampled_label_subset_sizes_respect_the_context() {
        let g = large_grammar();
        let sampler = Sampler::new(g, SamplingMode::UniformMarginal);
        let c = ctx(6, 20);
        let mut seen = 0;
        for i in 0..4000 {
            let tree = sampler.sample(c, mix_seed(11, i));
            tree.walk(&mut |node| {
                if let DerivationTree::Choice {
                    nonterminal,
                    children,
                    ..
                } = node
                {
                    if nonterminal == "les" {
                        seen += 1;
                        match &children[0] {
                            DerivationTree::IntLeaf { value, .. } => {
                                assert!(*value >= 1 && *value <= 3, "les = {value}")
                            }
                            other => panic!("unexpected les child {other:?}"),
                        }
                    }
                }
            });
        }
        assert!(seen > 0, "no RAkEL-family samples in 4000 draws");
    }

    #[test]
    fn thresholds_are_strictly_inside_the_unit_interval() {
        let g = large_grammar();
        let sampler = Sampler::new(g, SamplingMode::Naive);
        let mut reals = 0;
        for i in 0..3000 {
            let tree = sampler.sample(ctx(4, 7), mix_seed(3, i));
            tree.walk(&mut |node| {
                if let DerivationTree::Choice { nonterminal, children, .. } = node {
                    if nonterminal == "pred_tshd" {
                        if let Some(DerivationTree::RealLeaf { value, .. }) = children.first() {
                            assert!(*value > 0.0 && *value < 1.0);
                            reals += 1;
                        }
                    }
                }
            });
        }
        assert!(reals > 500);
    }

    #[test]
    fn every_sample_checks_against_the_grammar() {
        for tier in Tier::ALL {
            let g = tier_grammar(tier);
            for mode in [SamplingMode::Naive, SamplingMode::UniformMarginal] {
                let sampler = Sampler::new(&g, mode);
                for i in 0..300 {
                    let tree = sampler.sample(ctx(6, 20), mix_seed(5, i));
                    check_tree(&g, ctx(6, 20), &tree)
                        .unwrap_or_else(|e| panic!("{tier} {mode} sample {i}: {e}"));
                }
            }
        }
    }

    #[test]
    fn headline_extraction_finds_both_families() {
        let g = large_grammar();
        let sampler = Sampler::new(g, SamplingMode::UniformMarginal);
        let mut with_chain = 0;
        for i in 0..500 {
            let tree = sampler.sample(ctx(6, 20), mix_seed(23, i));
            assert!(mlc_headline(&tree).is_some(), "sample {i} has no headline");
            if slc_headline(&tree).is_some() {
                with_chain += 1;
            }
        }
        assert!(with_chain > 250, "only {with_chain} chains in 500 samples");
    }

    #[test]
    fn context_bounds_grow_with_labels() {
        let g = large_grammar();
        let les = g.production("les").unwrap();
        let sre = g.production("sre").unwrap();
        let d = g.production("d").unwrap();
        let mut last = (0i64, 0i64, 0i64);
        for l in 2..=100u32 {
            let c = ctx(l, 10);
            let get_hi = |p: &crate::grammar::Production| match &p.alternatives[0].symbols[0] {
                Symbol::IntRange { lo, hi } => int_interval(lo, hi, c).1,
                other => panic!("unexpected symbol {other:?}"),
            };
            let now = (get_hi(les), get_hi(sre), get_hi(d));
            assert!(now.0 >= last.0 && now.1 >= last.1 && now.2 >= last.2);
            last = now;
        }
    }

    #[test]
    fn small_tier_samples_stay_in_tier() {
        let g = tier_grammar(Tier::Small);
        let (mlc, slc) = tier_membership(Tier::Small);
        let sampler = Sampler::new(&g, SamplingMode::UniformMarginal);
        for i in 0..2000 {
            let tree = sampler.sample(ctx(6, 20), mix_seed(17, i));
            let m = mlc_headline(&tree).expect("headline");
            assert!(mlc.contains(&m), "{m} outside Small");
            if let Some(s) = slc_headline(&tree) {
                assert!(slc.contains(&s), "{s} outside Small");
            }
        }
    }
}
