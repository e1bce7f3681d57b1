//! Configuration validation: every dependency and compatibility rule of the
//! search space, reported under stable codes.
//!
//! Hard violations (`H1`..`H14`) make a configuration unrunnable or
//! meaningless; warnings (`W1`..`W4`) flag combinations that are legal but
//! known to scale badly or to sit outside the recommended ranges. The code
//! set is a public contract, documented in `docs/violation_codes.md`.

use std::fmt;

use crate::bounds::DatasetContext;
use crate::catalog::SlcAlg;
use crate::config::registry::{kernel_params, mlc_params, slc_params, ParamSpec};
use crate::config::{
    Configuration, MetaMlcId, MetaSlcId, MlcCore, MlcLayer, ParamMap, ParamValue, PtId, SlcBase,
    SlcBaseId, SlcChain, Threshold,
};

/// Stable identifiers; ordering is report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[allow(clippy::upper_case_acronyms)]
pub enum Code {
    H1,
    H2,
    H3,
    H4,
    H5,
    H6,
    H7,
    H8,
    H9,
    H10,
    H11,
    H12,
    H13,
    H14,
    W1,
    W2,
    W3,
    W4,
}

impl Code {
    pub const HARD: &'static [Code] = &[
        Code::H1,
        Code::H2,
        Code::H3,
        Code::H4,
        Code::H5,
        Code::H6,
        Code::H7,
        Code::H8,
        Code::H9,
        Code::H10,
        Code::H11,
        Code::H12,
        Code::H13,
        Code::H14,
    ];
    pub const SOFT: &'static [Code] = &[Code::W1, Code::W2, Code::W3, Code::W4];

    pub fn as_str(self) -> &'static str {
        match self {
            Code::H1 => "H1",
            Code::H2 => "H2",
            Code::H3 => "H3",
            Code::H4 => "H4",
            Code::H5 => "H5",
            Code::H6 => "H6",
            Code::H7 => "H7",
            Code::H8 => "H8",
            Code::H9 => "H9",
            Code::H10 => "H10",
            Code::H11 => "H11",
            Code::H12 => "H12",
            Code::H13 => "H13",
            Code::H14 => "H14",
            Code::W1 => "W1",
            Code::W2 => "W2",
            Code::W3 => "W3",
            Code::W4 => "W4",
        }
    }

    pub fn is_hard(self) -> bool {
        Self::HARD.contains(&self)
    }

    /// Rule summary and origin, one row per code.
    pub fn catalog_entry(self) -> (&'static str, &'static str) {
        match self {
            Code::H1 => (
                "PMCC population size must be smaller than its chain iterations",
                "PMCC dependency in MEKA: the chain population is drawn from the evaluated chains",
            ),
            Code::H2 => (
                "trellis width 0 forces density 1; width -1 caps density at floor(sqrt(L))+1",
                "CT/CDT trellis geometry over L labels",
            ),
            Code::H3 => (
                "Gibbs sampling needs total iterations greater than collection iterations",
                "CDN/CDT collect marginals only over the final iterations",
            ),
            Code::H4 => (
                "NaiveBayes kernel estimator and supervised discretization are mutually exclusive",
                "WEKA NaiveBayes rejects both options together",
            ),
            Code::H5 => (
                "Bagging with out-of-bag error requires bag size percent 100",
                "WEKA Bagging constraint on out-of-bag estimation",
            ),
            Code::H6 => (
                "LWL and AdaBoostM1 need a base classifier that handles instance weights (not LMT, OneR, K*, SGD, VP)",
                "weighted-instance handler requirement of the WEKA wrappers",
            ),
            Code::H7 => (
                "RandomCommittee accepts only randomizable bases: RF, random tree, REPTree, SGD, MLP",
                "WEKA RandomCommittee requires seed-randomizable classifiers",
            ),
            Code::H8 => (
                "BCC cannot run under BaggingML, BaggingMLDup or EnsembleML",
                "MEKA rejects BCC inside these ensemble wrappers",
            ),
            Code::H9 => (
                "PMCC cannot run under EM or CM",
                "MEKA rejects PMCC inside the expectation/classification maximization wrappers",
            ),
            Code::H10 => (
                "random tree back-fitting folds must not be 1",
                "one fold would leave nothing to grow the tree; WEKA errors out",
            ),
            Code::H11 => (
                "unpruned C4.5 omits the confidence factor and subtree raising",
                "C4.5 pruning options only apply to the error-based pruning path",
            ),
            Code::H12 => (
                "PART pruning folds are set exactly when reduced-error pruning is chosen",
                "PART uses the fold count only for reduced-error pruning",
            ),
            Code::H13 => (
                "every hyper-parameter value must lie in its (context-evaluated) domain",
                "interval catalog, including les <= floor(L/2), sre <= min(2L, 100), d <= floor(sqrt(L))+1, nhu in [round(0.2A), A], threshold strictly inside (0, 1)",
            ),
            Code::H14 => (
                "attribute selection cannot sit under LWL, AdaBoostM1 or RandomCommittee",
                "the wrapper grammar admits ASC only on plain and bagging-style paths",
            ),
            Code::W1 => (
                "PCC is exponentially slow beyond 14 labels",
                "PCC explores all label paths at inference time",
            ),
            Code::W2 => (
                "MCC, PCC, PMCC, CDN, CDT, RAkEL and RAkELd scale poorly under a meta wrapper",
                "ensembles of ensembles or Gibbs samplers multiply runtime",
            ),
            Code::W3 => (
                "collapse-tree has no effect while C4.5 runs unpruned",
                "collapse is part of the error-based pruning path",
            ),
            Code::W4 => (
                "EnsembleML bag size is recommended inside [52, 72]",
                "sampling without replacement works best around 62 percent",
            ),
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub code: Code,
    pub message: String,
    /// Constraint origin, from the code catalog.
    pub source: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Finding>,
    pub warnings: Vec<Finding>,
}

impl ValidationReport {
    pub fn verdict(&self) -> Verdict {
        if self.violations.is_empty() {
            Verdict::Valid
        } else {
            Verdict::Invalid
        }
    }

    pub fn is_valid(&self) -> bool {
        self.verdict() == Verdict::Valid
    }

    pub fn codes(&self) -> Vec<Code> {
        self.violations
            .iter()
            .chain(&self.warnings)
            .map(|f| f.code)
            .collect()
    }

    pub fn has(&self, code: Code) -> bool {
        self.violations
            .iter()
            .chain(&self.warnings)
            .any(|f| f.code == code)
    }
}

struct Checker {
    ctx: DatasetContext,
    /// When false, checks that need the dataset context (context-dependent
    /// intervals, the density cap, the label-count warning) are skipped.
    ctx_known: bool,
    violations: Vec<Finding>,
    warnings: Vec<Finding>,
}

impl Checker {
    fn report(&mut self, code: Code, message: String) {
        let finding = Finding {
            code,
            message,
            source: code.catalog_entry().1,
        };
        if code.is_hard() {
            self.violations.push(finding);
        } else {
            self.warnings.push(finding);
        }
    }
}

/// Validate a configuration against the full rule catalog.
///
/// All findings are report entries; nothing panics on malformed values.
/// Entries are sorted by code, then message, for stable output.
pub fn validate(config: &Configuration, ctx: DatasetContext) -> ValidationReport {
    run_checks(config, ctx, true)
}

/// The context-independent subset of the rule catalog: everything except the
/// dataset-parametrized intervals, the trellis density cap and the
/// label-count warning. Used where no dataset context is available, such as
/// command emission.
pub fn validate_context_free(config: &Configuration) -> ValidationReport {
    let nominal = DatasetContext::new(2, 1).expect("nominal context");
    run_checks(config, nominal, false)
}

fn run_checks(config: &Configuration, ctx: DatasetContext, ctx_known: bool) -> ValidationReport {
    let mut c = Checker {
        ctx,
        ctx_known,
        violations: Vec::new(),
        warnings: Vec::new(),
    };

    check_threshold(&mut c, &config.threshold);

    match &config.mlc {
        MlcLayer::Meta { id, params, inner } => {
            check_params(&mut c, &format!("{id}"), mlc_params(id.as_alg()), params);
            check_meta_mlc_compat(&mut c, *id, inner);
            check_core(&mut c, inner, Some(*id));
        }
        MlcLayer::Core(core) => check_core(&mut c, core, None),
    }

    let mut report = ValidationReport {
        violations: c.violations,
        warnings: c.warnings,
    };
    report
        .violations
        .sort_by(|a, b| (a.code, &a.message).cmp(&(b.code, &b.message)));
    report
        .warnings
        .sort_by(|a, b| (a.code, &a.message).cmp(&(b.code, &b.message)));
    report
}

fn check_threshold(c: &mut Checker, threshold: &Threshold) {
    if let Threshold::Real(v) = threshold {
        if !(*v > 0.0 && *v < 1.0) {
            c.report(
                Code::H13,
                format!("threshold {v} is not strictly inside (0, 1)"),
            );
        }
    }
}

fn check_core(c: &mut Checker, core: &MlcCore, wrapper: Option<MetaMlcId>) {
    match core {
        MlcCore::Aa { params } => {
            check_params(c, "ML-BPNN", mlc_params(crate::catalog::MlcAlg::MlBpnn), params);
        }
        MlcCore::Pt { id, params, slc } => {
            check_params(c, &format!("{id}"), mlc_params(id.as_alg()), params);
            check_pt_rules(c, *id, params, wrapper.is_some());
            check_chain(c, slc);
        }
    }
    let _ = wrapper;
}

fn check_pt_rules(c: &mut Checker, id: PtId, params: &ParamMap, wrapped: bool) {
    match id {
        PtId::Pmcc => {
            // H1: population below the chain budget.
            if let (Some(ps), Some(chi)) = (int_of(params, "ps"), int_of(params, "chi")) {
                if ps >= chi {
                    c.report(
                        Code::H1,
                        format!("PMCC population size {ps} is not smaller than chain iterations {chi}"),
                    );
                }
            }
        }
        PtId::Ct | PtId::Cdt => check_trellis(c, id, params),
        _ => {}
    }
    if matches!(id, PtId::Cdn | PtId::Cdt) {
        // H3: collect marginals strictly inside the run.
        if let (Some(i), Some(ci)) = (int_of(params, "i"), int_of(params, "ci")) {
            if i <= ci {
                c.report(
                    Code::H3,
                    format!("{id} total iterations {i} must exceed collection iterations {ci}"),
                );
            }
        }
    }
    if id == PtId::Pcc && c.ctx_known && c.ctx.labels >= 15 {
        c.report(
            Code::W1,
            format!("PCC over {} labels will be very slow", c.ctx.labels),
        );
    }
    if wrapped
        && matches!(
            id,
            PtId::Mcc | PtId::Pcc | PtId::Pmcc | PtId::Cdn | PtId::Cdt | PtId::Rakel | PtId::Rakeld
        )
    {
        c.report(
            Code::W2,
            format!("{id} under a meta wrapper scales poorly"),
        );
    }
}

fn check_trellis(c: &mut Checker, id: PtId, params: &ParamMap) {
    let (w, d) = (int_of(params, "w"), int_of(params, "d"));
    let d_cap = if c.ctx_known {
        (c.ctx.labels as f64).sqrt().floor() as i64 + 1
    } else {
        i64::MAX
    };
    match (w, d) {
        (Some(0), Some(d)) if d != 1 => {
            c.report(
                Code::H2,
                format!("{id} with width 0 requires density 1, got {d}"),
            );
        }
        (Some(-1), Some(d)) if !(1..=d_cap).contains(&d) => {
            c.report(
                Code::H2,
                format!("{id} density {d} outside [1, {d_cap}] for {} labels", c.ctx.labels),
            );
        }
        _ => {}
    }
}

fn check_meta_mlc_compat(c: &mut Checker, id: MetaMlcId, inner: &MlcCore) {
    let inner_pt = match inner {
        MlcCore::Pt { id, .. } => Some(*id),
        MlcCore::Aa { .. } => None,
    };
    match id {
        MetaMlcId::BaggingMl | MetaMlcId::BaggingMlDup | MetaMlcId::EnsembleMl => {
            if inner_pt == Some(PtId::Bcc) {
                c.report(Code::H8, format!("BCC cannot run under {id}"));
            }
        }
        MetaMlcId::Em | MetaMlcId::Cm => {
            if inner_pt == Some(PtId::Pmcc) {
                c.report(Code::H9, format!("PMCC cannot run under {id}"));
            }
        }
        MetaMlcId::Sm | MetaMlcId::Rsml => {}
    }
}

fn check_chain(c: &mut Checker, chain: &SlcChain) {
    match chain {
        SlcChain::Plain(base) => check_base(c, base),
        SlcChain::Meta { id, params, base } => {
            check_params(c, &format!("{id}"), slc_params(id.as_alg()), params);
            match id {
                MetaSlcId::Bagging => {
                    // H5: out-of-bag estimation pins the bag size.
                    let coob = bool_of(params, "coob");
                    let bsp = int_of(params, "bsp");
                    if coob && bsp != Some(100) {
                        c.report(
                            Code::H5,
                            format!(
                                "Bagging with out-of-bag error needs bag size 100, got {}",
                                bsp.map_or("none".to_string(), |v| v.to_string())
                            ),
                        );
                    }
                }
                MetaSlcId::Lwl | MetaSlcId::AdaM1 => {
                    const UNWEIGHTED: [SlcBaseId; 5] = [
                        SlcBaseId::Lmt,
                        SlcBaseId::OneR,
                        SlcBaseId::KStar,
                        SlcBaseId::Sgd,
                        SlcBaseId::Vp,
                    ];
                    if UNWEIGHTED.contains(&base.id) {
                        c.report(
                            Code::H6,
                            format!("{} does not handle weighted instances under {id}", base.id),
                        );
                    }
                }
                MetaSlcId::Rc => {
                    const RANDOMIZABLE: [SlcBaseId; 5] = [
                        SlcBaseId::Rf,
                        SlcBaseId::RandomTree,
                        SlcBaseId::RepTree,
                        SlcBaseId::Sgd,
                        SlcBaseId::Mlp,
                    ];
                    if !RANDOMIZABLE.contains(&base.id) {
                        c.report(
                            Code::H7,
                            format!("{} is not a randomizable base for RandomCommittee", base.id),
                        );
                    }
                }
                MetaSlcId::Rss => {}
            }
            if matches!(id, MetaSlcId::Lwl | MetaSlcId::AdaM1 | MetaSlcId::Rc)
                && base.asc.is_some()
            {
                c.report(
                    Code::H14,
                    format!("attribute selection is not allowed under {id}"),
                );
            }
            check_base(c, base);
        }
    }
}

fn check_base(c: &mut Checker, base: &SlcBase) {
    check_params(c, &format!("{}", base.id), slc_params(base.id.as_alg()), &base.params);
    match base.id {
        SlcBaseId::Nb => {
            if bool_of(&base.params, "uke") && bool_of(&base.params, "usd") {
                c.report(
                    Code::H4,
                    "NaiveBayes kernel estimator and supervised discretization are both active"
                        .to_string(),
                );
            }
        }
        SlcBaseId::RandomTree => {
            if int_of(&base.params, "nfbgt") == Some(1) {
                c.report(
                    Code::H10,
                    "random tree back-fitting folds set to 1".to_string(),
                );
            }
        }
        SlcBaseId::C45 => {
            let unpruned = bool_of(&base.params, "u");
            if unpruned {
                if base.params.contains_key("cf") {
                    c.report(
                        Code::H11,
                        "unpruned C4.5 carries a confidence factor".to_string(),
                    );
                }
                if base.params.contains_key("sr") {
                    c.report(
                        Code::H11,
                        "unpruned C4.5 carries subtree raising".to_string(),
                    );
                }
                if bool_of(&base.params, "ct") {
                    c.report(
                        Code::W3,
                        "collapse-tree is set on an unpruned C4.5".to_string(),
                    );
                }
            }
        }
        SlcBaseId::Part => {
            let rep = bool_of(&base.params, "rep");
            let has_nr = base.params.contains_key("nr");
            if rep && !has_nr {
                c.report(
                    Code::H12,
                    "PART reduced-error pruning without a fold count".to_string(),
                );
            }
            if !rep && has_nr {
                c.report(
                    Code::H12,
                    "PART fold count without reduced-error pruning".to_string(),
                );
            }
        }
        _ => {}
    }
}

/// H13 and W4: every parameter within its registered domain.
fn check_params(c: &mut Checker, owner: &str, specs: &[ParamSpec], params: &ParamMap) {
    for (name, value) in params {
        let Some(spec) = specs.iter().find(|s| s.name == name) else {
            c.report(Code::H13, format!("{owner} has no parameter `{name}`"));
            continue;
        };
        if !c.ctx_known && spec.kind.is_context_dependent() {
            continue;
        }
        if let Err(reason) = spec.kind.check(value, c.ctx) {
            c.report(Code::H13, format!("{owner} {name}: {reason}"));
        }
    }
    // EnsembleML's recommended band is soft.
    if owner == "EnsembleML" {
        if let Some(bsp) = int_of(params, "bsp") {
            if !(52..=72).contains(&bsp) {
                c.report(
                    Code::W4,
                    format!("EnsembleML bag size {bsp} outside the recommended [52, 72]"),
                );
            }
        }
    }
}

fn int_of(params: &ParamMap, name: &str) -> Option<i64> {
    params.get(name).and_then(ParamValue::as_int)
}

fn bool_of(params: &ParamMap, name: &str) -> bool {
    params
        .get(name)
        .and_then(ParamValue::as_bool)
        .unwrap_or(false)
}

/// Every constraint-bearing algorithm area mapped to its codes; the catalog
/// audit keeps this list and the checker in sync.
pub const CONSTRAINT_SOURCES: &[(&str, &[Code])] = &[
    ("PMCC", &[Code::H1, Code::W2]),
    ("CT", &[Code::H2]),
    ("CDT", &[Code::H2, Code::H3, Code::W2]),
    ("CDN", &[Code::H3, Code::W2]),
    ("MCC", &[Code::W2]),
    ("PCC", &[Code::W1, Code::W2]),
    ("RAkEL", &[Code::W2]),
    ("RAkELd", &[Code::W2]),
    ("NB", &[Code::H4]),
    ("Bagging", &[Code::H5]),
    ("LWL", &[Code::H6, Code::H14]),
    ("AdaM1", &[Code::H6, Code::H14]),
    ("RC", &[Code::H7, Code::H14]),
    ("BaggingML", &[Code::H8]),
    ("BaggingMLDup", &[Code::H8]),
    ("EnsembleML", &[Code::H8, Code::W4]),
    ("EM", &[Code::H9]),
    ("CM", &[Code::H9]),
    ("RT(slc)", &[Code::H10]),
    ("C4.5", &[Code::H11, Code::W3]),
    ("PART", &[Code::H12]),
    ("intervals", &[Code::H13]),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{AscSearch, KernelKind, KernelValue, Threshold};
    use crate::sampling::{mix_seed, Sampler, SamplingMode};
    use crate::tiering::{tier_grammar, Tier};

    fn ctx(l: u32, a: u32) -> DatasetContext {
        DatasetContext::new(l, a).unwrap()
    }

    fn params(entries: &[(&str, ParamValue)]) -> ParamMap {
        entries
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect()
    }

    fn plain(id: PtId, pt_params: ParamMap, base: SlcBase) -> Configuration {
        Configuration {
            threshold: Threshold::PCut1,
            mlc: MlcLayer::Core(MlcCore::Pt {
                id,
                params: pt_params,
                slc: SlcChain::Plain(base),
            }),
        }
    }

    fn bare(id: SlcBaseId) -> SlcBase {
        SlcBase {
            asc: None,
            id,
            params: ParamMap::new(),
        }
    }

    fn with_params(id: SlcBaseId, entries: &[(&str, ParamValue)]) -> SlcBase {
        SlcBase {
            asc: None,
            id,
            params: params(entries),
        }
    }

    fn wrap_meta(id: MetaMlcId, meta_params: ParamMap, inner: MlcCore) -> Configuration {
        Configuration {
            threshold: Threshold::PCut1,
            mlc: MlcLayer::Meta {
                id,
                params: meta_params,
                inner,
            },
        }
    }

    fn slc_meta(id: MetaSlcId, entries: &[(&str, ParamValue)], base: SlcBase) -> Configuration {
        Configuration {
            threshold: Threshold::PCut1,
            mlc: MlcLayer::Core(MlcCore::Pt {
                id: PtId::Br,
                params: ParamMap::new(),
                slc: SlcChain::Meta {
                    id,
                    params: params(entries),
                    base,
                },
            }),
        }
    }

    const CTX: (u32, u32) = (6, 20);

    fn run(config: &Configuration) -> ValidationReport {
        validate(config, ctx(CTX.0, CTX.1))
    }

    // One passing and one failing fixture per code.

    #[test]
    fn h1_pmcc_population_versus_chain() {
        let bad = plain(
            PtId::Pmcc,
            params(&[("ps", ParamValue::Int(60)), ("chi", ParamValue::Int(55))]),
            bare(SlcBaseId::Nb),
        );
        assert!(run(&bad).has(Code::H1));
        let good = plain(
            PtId::Pmcc,
            params(&[
                ("ps", ParamValue::Int(10)),
                ("chi", ParamValue::Int(60)),
                ("ii", ParamValue::Int(10)),
                ("beta", ParamValue::Real(0.03)),
                ("ts", ParamValue::Int(0)),
                ("pof", ParamValue::Cat("Exact match".into())),
            ]),
            bare(SlcBaseId::Nb),
        );
        let report = run(&good);
        assert!(report.is_valid(), "{:?}", report.violations);
    }

    #[test]
    fn h2_trellis_density_cap() {
        // L = 16, cap = floor(sqrt(16)) + 1 = 5.
        let bad = plain(
            PtId::Ct,
            params(&[
                ("w", ParamValue::Int(-1)),
                ("d", ParamValue::Int(6)),
                ("chi", ParamValue::Int(100)),
                ("ii", ParamValue::Int(10)),
                ("dp", ParamValue::Cat("Ibf".into())),
                ("pof", ParamValue::Cat("Exact match".into())),
            ]),
            bare(SlcBaseId::Nb),
        );
        let report = validate(&bad, ctx(16, 10));
        assert!(report.has(Code::H2), "{report:?}");
        let good = {
            let mut b = bad.clone();
            if let MlcLayer::Core(MlcCore::Pt { params, .. }) = &mut b.mlc {
                params.insert("d".into(), ParamValue::Int(5));
            }
            b
        };
        assert!(validate(&good, ctx(16, 10)).is_valid());
        // Width 0 forces density 1.
        let chain_width = plain(
            PtId::Cdt,
            params(&[
                ("w", ParamValue::Int(0)),
                ("d", ParamValue::Int(2)),
                ("i", ParamValue::Int(500)),
                ("ci", ParamValue::Int(50)),
                ("dp", ParamValue::Cat("None".into())),
            ]),
            bare(SlcBaseId::Nb),
        );
        assert!(validate(&chain_width, ctx(16, 10)).has(Code::H2));
    }

    #[test]
    fn h3_gibbs_iterations_dominate_collection() {
        let bad = plain(
            PtId::Cdn,
            params(&[("i", ParamValue::Int(50)), ("ci", ParamValue::Int(60))]),
            bare(SlcBaseId::Nb),
        );
        assert!(run(&bad).has(Code::H3));
        let good = plain(
            PtId::Cdn,
            params(&[("i", ParamValue::Int(500)), ("ci", ParamValue::Int(60))]),
            bare(SlcBaseId::Nb),
        );
        assert!(run(&good).is_valid());
    }

    #[test]
    fn h4_nb_estimator_exclusivity() {
        let bad = plain(
            PtId::Br,
            ParamMap::new(),
            with_params(
                SlcBaseId::Nb,
                &[("uke", ParamValue::Bool(true)), ("usd", ParamValue::Bool(true))],
            ),
        );
        assert!(run(&bad).has(Code::H4));
        let good = plain(
            PtId::Br,
            ParamMap::new(),
            with_params(SlcBaseId::Nb, &[("uke", ParamValue::Bool(true))]),
        );
        assert!(run(&good).is_valid());
    }

    #[test]
    fn h5_out_of_bag_requires_full_bags() {
        let bad = slc_meta(
            MetaSlcId::Bagging,
            &[
                ("coob", ParamValue::Bool(true)),
                ("bsp", ParamValue::Int(90)),
                ("ni", ParamValue::Int(10)),
            ],
            bare(SlcBaseId::Nb),
        );
        assert!(run(&bad).has(Code::H5));
        let good = slc_meta(
            MetaSlcId::Bagging,
            &[
                ("coob", ParamValue::Bool(true)),
                ("bsp", ParamValue::Int(100)),
                ("ni", ParamValue::Int(10)),
            ],
            bare(SlcBaseId::Nb),
        );
        assert!(run(&good).is_valid());
    }

    #[test]
    fn h6_weighted_instance_bases() {
        let bad = slc_meta(
            MetaSlcId::Lwl,
            &[("k", ParamValue::Int(-1))],
            with_params(
                SlcBaseId::Lmt,
                &[("mno", ParamValue::Int(15))],
            ),
        );
        assert!(run(&bad).has(Code::H6));
        let good = slc_meta(
            MetaSlcId::AdaM1,
            &[
                ("wt", ParamValue::Int(100)),
                ("ni", ParamValue::Int(10)),
            ],
            bare(SlcBaseId::Nb),
        );
        assert!(run(&good).is_valid());
    }

    #[test]
    fn h7_random_committee_bases() {
        let bad = slc_meta(
            MetaSlcId::Rc,
            &[("ni", ParamValue::Int(10))],
            bare(SlcBaseId::Nb),
        );
        assert!(run(&bad).has(Code::H7));
        let good = slc_meta(
            MetaSlcId::Rc,
            &[("ni", ParamValue::Int(10))],
            with_params(
                SlcBaseId::RandomTree,
                &[
                    ("mw", ParamValue::Int(1)),
                    ("nf", ParamValue::Int(4)),
                    ("md", ParamValue::Int(10)),
                    ("nfbgt", ParamValue::Int(3)),
                ],
            ),
        );
        assert!(run(&good).is_valid());
    }

    #[test]
    fn h8_bcc_under_bagging() {
        let inner = MlcCore::Pt {
            id: PtId::Bcc,
            params: params(&[("dp", ParamValue::Cat("LEAD".into()))]),
            slc: SlcChain::Plain(bare(SlcBaseId::Nb)),
        };
        let bad = wrap_meta(
            MetaMlcId::BaggingMl,
            params(&[("i", ParamValue::Int(10))]),
            inner.clone(),
        );
        let report = run(&bad);
        assert_eq!(report.verdict(), Verdict::Invalid);
        assert!(report.has(Code::H8));
        let good = wrap_meta(MetaMlcId::Sm, ParamMap::new(), inner);
        assert!(run(&good).is_valid());
    }

    #[test]
    fn h9_pmcc_under_em() {
        let inner = MlcCore::Pt {
            id: PtId::Pmcc,
            params: params(&[
                ("ps", ParamValue::Int(10)),
                ("chi", ParamValue::Int(60)),
                ("ii", ParamValue::Int(10)),
                ("beta", ParamValue::Real(0.03)),
                ("ts", ParamValue::Int(0)),
                ("pof", ParamValue::Cat("Exact match".into())),
            ]),
            slc: SlcChain::Plain(bare(SlcBaseId::Nb)),
        };
        let bad = wrap_meta(
            MetaMlcId::Em,
            params(&[("i", ParamValue::Int(20))]),
            inner.clone(),
        );
        assert!(run(&bad).has(Code::H9));
        // Under BaggingML the same core is legal, with only the scalability warning.
        let wrapped = wrap_meta(
            MetaMlcId::BaggingMl,
            params(&[("i", ParamValue::Int(10))]),
            inner,
        );
        let report = run(&wrapped);
        assert!(report.is_valid(), "{:?}", report.violations);
        assert_eq!(report.warnings.len(), 1);
        assert!(report.has(Code::W2));
    }

    #[test]
    fn h10_backfitting_folds() {
        let bad = plain(
            PtId::Br,
            ParamMap::new(),
            with_params(SlcBaseId::RandomTree, &[("nfbgt", ParamValue::Int(1))]),
        );
        assert!(run(&bad).has(Code::H10));
        let good = plain(
            PtId::Br,
            ParamMap::new(),
            with_params(SlcBaseId::RandomTree, &[("nfbgt", ParamValue::Int(0))]),
        );
        assert!(run(&good).is_valid());
    }

    #[test]
    fn h11_unpruned_c45() {
        let bad = plain(
            PtId::Br,
            ParamMap::new(),
            with_params(
                SlcBaseId::C45,
                &[
                    ("u", ParamValue::Bool(true)),
                    ("cf", ParamValue::Real(0.25)),
                    ("mno", ParamValue::Int(2)),
                ],
            ),
        );
        assert!(run(&bad).has(Code::H11));
        let good = plain(
            PtId::Br,
            ParamMap::new(),
            with_params(
                SlcBaseId::C45,
                &[("u", ParamValue::Bool(true)), ("mno", ParamValue::Int(2))],
            ),
        );
        assert!(run(&good).is_valid());
    }

    #[test]
    fn h12_part_fold_pairing() {
        let bad = plain(
            PtId::Br,
            ParamMap::new(),
            with_params(SlcBaseId::Part, &[("nr", ParamValue::Int(3))]),
        );
        assert!(run(&bad).has(Code::H12));
        let bad2 = plain(
            PtId::Br,
            ParamMap::new(),
            with_params(SlcBaseId::Part, &[("rep", ParamValue::Bool(true))]),
        );
        assert!(run(&bad2).has(Code::H12));
        let good = plain(
            PtId::Br,
            ParamMap::new(),
            with_params(
                SlcBaseId::Part,
                &[("rep", ParamValue::Bool(true)), ("nr", ParamValue::Int(3))],
            ),
        );
        assert!(run(&good).is_valid());
    }

    #[test]
    fn h13_interval_checks() {
        // les beyond floor(L/2)
        let bad = plain(
            PtId::Rakel,
            params(&[
                ("pv", ParamValue::Int(2)),
                ("sv", ParamValue::Int(1)),
                ("les", ParamValue::Int(4)),
                ("sre", ParamValue::Int(10)),
            ]),
            bare(SlcBaseId::Nb),
        );
        let report = run(&bad); // L = 6 -> les max 3
        assert!(report.has(Code::H13), "{report:?}");
        let good = {
            let mut b = bad.clone();
            if let MlcLayer::Core(MlcCore::Pt { params, .. }) = &mut b.mlc {
                params.insert("les".into(), ParamValue::Int(3));
            }
            b
        };
        assert!(run(&good).is_valid());
        // Threshold endpoints are excluded.
        let mut t = good.clone();
        t.threshold = Threshold::Real(1.0);
        assert!(run(&t).has(Code::H13));
        // Unknown parameter names are findings, not panics.
        let unknown = plain(
            PtId::Br,
            params(&[("mystery", ParamValue::Int(1))]),
            bare(SlcBaseId::Nb),
        );
        assert!(run(&unknown).has(Code::H13));
    }

    #[test]
    fn h14_asc_under_weight_sensitive_metas() {
        let bad = Configuration {
            threshold: Threshold::PCut1,
            mlc: MlcLayer::Core(MlcCore::Pt {
                id: PtId::Br,
                params: ParamMap::new(),
                slc: SlcChain::Meta {
                    id: MetaSlcId::Lwl,
                    params: params(&[("k", ParamValue::Int(30))]),
                    base: SlcBase {
                        asc: Some(AscSearch::BestFirst),
                        id: SlcBaseId::Nb,
                        params: ParamMap::new(),
                    },
                },
            }),
        };
        assert!(run(&bad).has(Code::H14));
        let good = Configuration {
            threshold: Threshold::PCut1,
            mlc: MlcLayer::Core(MlcCore::Pt {
                id: PtId::Br,
                params: ParamMap::new(),
                slc: SlcChain::Meta {
                    id: MetaSlcId::Rss,
                    params: params(&[
                        ("sss", ParamValue::Real(0.5)),
                        ("ni", ParamValue::Int(10)),
                    ]),
                    base: SlcBase {
                        asc: Some(AscSearch::BestFirst),
                        id: SlcBaseId::Nb,
                        params: ParamMap::new(),
                    },
                },
            }),
        };
        assert!(run(&good).is_valid());
    }

    #[test]
    fn w1_pcc_label_count() {
        let config = plain(PtId::Pcc, ParamMap::new(), bare(SlcBaseId::Nb));
        let warned = validate(&config, ctx(15, 10));
        assert!(warned.is_valid());
        assert!(warned.has(Code::W1));
        let fine = validate(&config, ctx(14, 10));
        assert!(!fine.has(Code::W1));
    }

    #[test]
    fn w3_collapse_on_unpruned_c45() {
        let config = plain(
            PtId::Br,
            ParamMap::new(),
            with_params(
                SlcBaseId::C45,
                &[
                    ("u", ParamValue::Bool(true)),
                    ("ct", ParamValue::Bool(true)),
                    ("mno", ParamValue::Int(2)),
                ],
            ),
        );
        let report = run(&config);
        assert!(report.is_valid());
        assert!(report.has(Code::W3));
        let pruned = plain(
            PtId::Br,
            ParamMap::new(),
            with_params(
                SlcBaseId::C45,
                &[
                    ("cf", ParamValue::Real(0.25)),
                    ("ct", ParamValue::Bool(true)),
                    ("mno", ParamValue::Int(2)),
                ],
            ),
        );
        assert!(!run(&pruned).has(Code::W3));
    }

    #[test]
    fn w4_ensemble_bag_band() {
        let inner = MlcCore::Pt {
            id: PtId::Br,
            params: ParamMap::new(),
            slc: SlcChain::Plain(bare(SlcBaseId::Nb)),
        };
        let out_of_band = wrap_meta(
            MetaMlcId::EnsembleMl,
            params(&[("bsp", ParamValue::Int(90)), ("i", ParamValue::Int(10))]),
            inner.clone(),
        );
        let report = run(&out_of_band);
        assert!(report.is_valid());
        assert!(report.has(Code::W4));
        let in_band = wrap_meta(
            MetaMlcId::EnsembleMl,
            params(&[("bsp", ParamValue::Int(62)), ("i", ParamValue::Int(10))]),
            inner,
        );
        assert!(!run(&in_band).has(Code::W4));
    }

    #[test]
    fn kernel_parameters_are_domain_checked() {
        let bad_kernel = plain(
            PtId::Br,
            ParamMap::new(),
            with_params(
                SlcBaseId::Smo,
                &[
                    ("c", ParamValue::Real(1.0)),
                    ("ft", ParamValue::Int(0)),
                    (
                        "kernel",
                        ParamValue::Kernel(KernelValue {
                            kind: KernelKind::Rbf,
                            params: params(&[("g", ParamValue::Real(5.0))]),
                        }),
                    ),
                ],
            ),
        );
        assert!(run(&bad_kernel).has(Code::H13));
    }

    #[test]
    fn findings_are_sorted_by_code() {
        // A config violating H4 and H2 reports them in code order.
        let config = Configuration {
            threshold: Threshold::Real(1.5),
            mlc: MlcLayer::Core(MlcCore::Pt {
                id: PtId::Ct,
                params: params(&[
                    ("w", ParamValue::Int(0)),
                    ("d", ParamValue::Int(3)),
                    ("chi", ParamValue::Int(100)),
                    ("ii", ParamValue::Int(10)),
                    ("dp", ParamValue::Cat("Ibf".into())),
                    ("pof", ParamValue::Cat("Exact match".into())),
                ]),
                slc: SlcChain::Plain(with_params(
                    SlcBaseId::Nb,
                    &[("uke", ParamValue::Bool(true)), ("usd", ParamValue::Bool(true))],
                )),
            }),
        };
        let report = run(&config);
        let codes: Vec<Code> = report.violations.iter().map(|f| f.code).collect();
        let mut sorted = codes.clone();
        sorted.sort();
        assert_eq!(codes, sorted);
        assert!(report.has(Code::H2) && report.has(Code::H4) && report.has(Code::H13));
    }

    #[test]
    fn catalog_covers_all_codes() {
        let mut seen: Vec<Code> = CONSTRAINT_SOURCES
            .iter()
            .flat_map(|(_, codes)| codes.iter().copied())
            .collect();
        seen.sort();
        seen.dedup();
        for code in Code::HARD.iter().chain(Code::SOFT) {
            assert!(seen.contains(code), "{code} missing from the catalog");
            // Every code has a documented entry.
            let (summary, source) = code.catalog_entry();
            assert!(!summary.is_empty() && !source.is_empty());
        }
    }

    #[test]
    fn sampled_configurations_have_no_hard_violations() {
        for tier in Tier::ALL {
            let g = tier_grammar(tier);
            for mode in [SamplingMode::Naive, SamplingMode::UniformMarginal] {
                let sampler = Sampler::new(&g, mode);
                for i in 0..500 {
                    let tree = sampler.sample(ctx(6, 20), mix_seed(97, i));
                    let config = crate::config::lower(&tree).unwrap();
                    let report = validate(&config, ctx(6, 20));
                    assert!(
                        report.is_valid(),
                        "{tier}/{mode} sample {i}: {:?}",
                        report.violations
                    );
                }
            }
        }
    }
}
