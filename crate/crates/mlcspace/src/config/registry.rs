//! Per-algorithm hyper-parameter registry: names, command flags, domains and
//! defaults, in each algorithm's documented listing order (which is also the
//! flag emission order of the command codec).

use std::collections::BTreeMap;

use once_cell::sync::Lazy;

use crate::bounds::{BoundExpr, DatasetContext};
use crate::catalog::{MlcAlg, SlcAlg};
use crate::grammar::{int_interval, scaled_int_interval};

use super::{KernelKind, ParamValue};

/// Payoff-function display names; grammar tokens are the same strings with
/// underscores instead of spaces.
pub const PAYOFF_FUNCTIONS: &[&str] = &[
    "Accuracy",
    "Jaccard index",
    "Hamming score",
    "Exact match",
    "Jaccard distance",
    "Rank loss",
    "Hamming loss",
    "Zero One loss",
    "Harmonic score",
    "Log Loss lim:L",
    "Micro Recall",
    "One error",
    "Log Loss lim:D",
    "Micro Precision",
    "Macro Precision",
    "Macro Recall",
    "F1 micro averaged",
    "Avg precision",
    "F1 macro averaged by example",
    "F1 macro averaged by label",
    "AUPRC macro averaged",
    "AUROC macro averaged",
    "Levenshtein distance",
];

pub fn payoff_display_from_token(token: &str) -> Option<&'static str> {
    let display = token.replace('_', " ");
    PAYOFF_FUNCTIONS.iter().copied().find(|p| *p == display)
}

pub fn payoff_token_from_display(display: &str) -> Option<String> {
    PAYOFF_FUNCTIONS
        .iter()
        .find(|p| **p == display)
        .map(|p| p.replace(' ', "_"))
}

const DEP_TYPES: &[&str] = &["C", "I", "Ib", "Ibf", "H", "Hbf", "X", "F", "None"];
const DEP_TYPES_BCC: &[&str] = &["C", "I", "Ib", "Ibf", "H", "Hbf", "X", "F", "None", "LEAD"];

#[derive(Debug, Clone)]
pub struct ParamSpec {
    pub name: &'static str,
    /// Command flag; empty when the categorical values are themselves flags
    /// (KNN distance weighting).
    pub flag: &'static str,
    pub kind: ParamKind,
    pub default: Option<ParamValue>,
}

#[derive(Debug, Clone)]
pub enum ParamKind {
    /// Integer interval with optional out-of-interval sentinel values.
    Int {
        lo: BoundExpr,
        hi: BoundExpr,
        extra: &'static [i64],
    },
    Real {
        lo: f64,
        hi: f64,
        lo_open: bool,
        hi_open: bool,
    },
    /// Closed set of integers.
    IntChoice(&'static [i64]),
    Cat(&'static [&'static str]),
    Bool,
    /// Integer interval given as fractions of the attribute count, rounded.
    ScaledInt { lo_frac: f64, hi_frac: f64 },
    /// SMO kernel: one of [`KernelKind`], each with its own sub-specs.
    Kernel,
}

impl ParamKind {
    /// True when the domain depends on the dataset context.
    pub fn is_context_dependent(&self) -> bool {
        match self {
            ParamKind::Int { lo, hi, .. } => !lo.is_constant() || !hi.is_constant(),
            ParamKind::ScaledInt { .. } => true,
            _ => false,
        }
    }

    /// Context-evaluated integer interval for interval-style kinds.
    pub fn int_interval(&self, ctx: DatasetContext) -> Option<(i64, i64)> {
        match self {
            ParamKind::Int { lo, hi, .. } => Some(int_interval(lo, hi, ctx)),
            ParamKind::ScaledInt { lo_frac, hi_frac } => Some(scaled_int_interval(
                &BoundExpr::Real(*lo_frac),
                &BoundExpr::Real(*hi_frac),
                &BoundExpr::Attributes,
                ctx,
            )),
            _ => None,
        }
    }

    /// Check a value against the domain under `ctx`.
    pub fn check(&self, value: &ParamValue, ctx: DatasetContext) -> Result<(), String> {
        match (self, value) {
            (ParamKind::Int { extra, .. }, ParamValue::Int(v)) => {
                let (lo, hi) = self.int_interval(ctx).expect("interval kind");
                if (*v >= lo && *v <= hi) || extra.contains(v) {
                    Ok(())
                } else if extra.is_empty() {
                    Err(format!("{v} outside [{lo}, {hi}]"))
                } else {
                    Err(format!("{v} outside [{lo}, {hi}] and not in {extra:?}"))
                }
            }
            (ParamKind::ScaledInt { .. }, ParamValue::Int(v)) => {
                let (lo, hi) = self.int_interval(ctx).expect("interval kind");
                if *v >= lo && *v <= hi {
                    Ok(())
                } else {
                    Err(format!("{v} outside [{lo}, {hi}]"))
                }
            }
            (
                ParamKind::Real {
                    lo,
                    hi,
                    lo_open,
                    hi_open,
                },
                ParamValue::Real(v),
            ) => {
                let lo_ok = if *lo_open { v > lo } else { v >= lo };
                let hi_ok = if *hi_open { v < hi } else { v <= hi };
                if lo_ok && hi_ok {
                    Ok(())
                } else {
                    Err(format!("{v} outside the interval ({lo}, {hi})"))
                }
            }
            (ParamKind::IntChoice(values), ParamValue::Int(v)) => {
                if values.contains(v) {
                    Ok(())
                } else {
                    Err(format!("{v} not in {values:?}"))
                }
            }
            (ParamKind::Cat(values), ParamValue::Cat(v)) => {
                if values.contains(&v.as_str()) {
                    Ok(())
                } else {
                    Err(format!("`{v}` not in the categorical domain"))
                }
            }
            (ParamKind::Bool, ParamValue::Bool(_)) => Ok(()),
            (ParamKind::Kernel, ParamValue::Kernel(k)) => {
                for spec in kernel_params(k.kind) {
                    if let Some(v) = k.params.get(spec.name) {
                        spec.kind
                            .check(v, ctx)
                            .map_err(|e| format!("kernel {}: {e}", spec.name))?;
                    }
                }
                for name in k.params.keys() {
                    if !kernel_params(k.kind).iter().any(|s| s.name == name) {
                        return Err(format!(
                            "kernel {} has no parameter `{name}`",
                            k.kind.name()
                        ));
                    }
                }
                Ok(())
            }
            (kind, value) => Err(format!("value {value:?} does not fit {kind:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown algorithm `{0}`")]
pub struct UnknownAlgorithm(pub String);

pub struct Registry {
    mlc: BTreeMap<MlcAlg, Vec<ParamSpec>>,
    slc: BTreeMap<SlcAlg, Vec<ParamSpec>>,
    kernels: BTreeMap<KernelKind, Vec<ParamSpec>>,
}

fn ii(v: i64) -> BoundExpr {
    BoundExpr::Int(v)
}

fn spec(name: &'static str, flag: &'static str, kind: ParamKind) -> ParamSpec {
    ParamSpec {
        name,
        flag,
        kind,
        default: None,
    }
}

impl ParamSpec {
    fn default_int(mut self, v: i64) -> Self {
        self.default = Some(ParamValue::Int(v));
        self
    }

    fn default_real(mut self, v: f64) -> Self {
        self.default = Some(ParamValue::Real(v));
        self
    }

    fn default_bool(mut self, v: bool) -> Self {
        self.default = Some(ParamValue::Bool(v));
        self
    }

    fn default_cat(mut self, v: &str) -> Self {
        self.default = Some(ParamValue::Cat(v.to_string()));
        self
    }

    /// Weight in the declared hyper-parameter counting convention: the
    /// kernel counts as itself plus its widest branch of sub-parameters.
    pub fn declared_weight(&self) -> u32 {
        match self.kind {
            ParamKind::Kernel => {
                1 + KernelKind::ALL
                    .iter()
                    .map(|k| kernel_params(*k).len() as u32)
                    .max()
                    .unwrap_or(0)
            }
            _ => 1,
        }
    }
}

fn int(name: &'static str, flag: &'static str, lo: i64, hi: i64) -> ParamSpec {
    spec(
        name,
        flag,
        ParamKind::Int {
            lo: ii(lo),
            hi: ii(hi),
            extra: &[],
        },
    )
}

fn int_extra(
    name: &'static str,
    flag: &'static str,
    lo: i64,
    hi: i64,
    extra: &'static [i64],
) -> ParamSpec {
    spec(
        name,
        flag,
        ParamKind::Int {
            lo: ii(lo),
            hi: ii(hi),
            extra,
        },
    )
}

fn int_expr(name: &'static str, flag: &'static str, lo: i64, hi: BoundExpr) -> ParamSpec {
    spec(
        name,
        flag,
        ParamKind::Int {
            lo: ii(lo),
            hi,
            extra: &[],
        },
    )
}

fn real(name: &'static str, flag: &'static str, lo: f64, hi: f64) -> ParamSpec {
    spec(
        name,
        flag,
        ParamKind::Real {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
        },
    )
}

fn boolean(name: &'static str, flag: &'static str) -> ParamSpec {
    spec(name, flag, ParamKind::Bool)
}

fn cat(name: &'static str, flag: &'static str, values: &'static [&'static str]) -> ParamSpec {
    spec(name, flag, ParamKind::Cat(values))
}

fn int_choice(name: &'static str, flag: &'static str, values: &'static [i64]) -> ParamSpec {
    spec(name, flag, ParamKind::IntChoice(values))
}

fn half_labels() -> BoundExpr {
    BoundExpr::Div(Box::new(BoundExpr::Labels), Box::new(BoundExpr::Int(2)))
}

fn twice_labels_capped() -> BoundExpr {
    BoundExpr::Min(
        Box::new(BoundExpr::Mul(
            Box::new(BoundExpr::Int(2)),
            Box::new(BoundExpr::Labels),
        )),
        Box::new(BoundExpr::Int(100)),
    )
}

fn sqrt_labels_plus_one() -> BoundExpr {
    BoundExpr::Add(
        Box::new(BoundExpr::Sqrt(Box::new(BoundExpr::Labels))),
        Box::new(BoundExpr::Int(1)),
    )
}

static REGISTRY: Lazy<Registry> = Lazy::new(build_registry);

pub fn registry() -> &'static Registry {
    &REGISTRY
}

/// Parameter specs of a multi-label algorithm, in listing order.
pub fn mlc_params(alg: MlcAlg) -> &'static [ParamSpec] {
    REGISTRY.mlc.get(&alg).map(Vec::as_slice).unwrap_or(&[])
}

/// Parameter specs of a single-label entry, in listing order.
pub fn slc_params(alg: SlcAlg) -> &'static [ParamSpec] {
    REGISTRY.slc.get(&alg).map(Vec::as_slice).unwrap_or(&[])
}

/// Sub-specs of one kernel family.
pub fn kernel_params(kind: KernelKind) -> &'static [ParamSpec] {
    REGISTRY.kernels.get(&kind).map(Vec::as_slice).unwrap_or(&[])
}

/// Look an algorithm up by acronym. Multi-label names take precedence, so
/// `RT` resolves to ranking-and-threshold; the single-label random tree is
/// reachable through [`slc_params`].
pub fn describe(acronym: &str) -> Result<&'static [ParamSpec], UnknownAlgorithm> {
    if let Some(alg) = MlcAlg::from_acronym(acronym) {
        return Ok(mlc_params(alg));
    }
    if let Some(alg) = SlcAlg::from_acronym(acronym) {
        return Ok(slc_params(alg));
    }
    Err(UnknownAlgorithm(acronym.to_string()))
}

/// Declared hyper-parameter count under the table convention.
pub fn declared_count(specs: &[ParamSpec]) -> u32 {
    specs.iter().map(ParamSpec::declared_weight).sum()
}

fn build_registry() -> Registry {
    let mut mlc: BTreeMap<MlcAlg, Vec<ParamSpec>> = BTreeMap::new();
    let mut slc: BTreeMap<SlcAlg, Vec<ParamSpec>> = BTreeMap::new();
    let mut kernels: BTreeMap<KernelKind, Vec<ParamSpec>> = BTreeMap::new();

    // --- multi-label: problem transformation --------------------------------
    for alg in [MlcAlg::Br, MlcAlg::Cc, MlcAlg::Lp, MlcAlg::Fw, MlcAlg::Rt, MlcAlg::Pcc] {
        mlc.insert(alg, vec![]);
    }
    mlc.insert(
        MlcAlg::Brq,
        vec![real("dsr", "-P", 0.2, 0.8).default_real(0.75)],
    );
    mlc.insert(
        MlcAlg::Ccq,
        vec![real("dsr", "-P", 0.2, 0.8).default_real(0.75)],
    );
    mlc.insert(
        MlcAlg::Bcc,
        vec![cat("dp", "-X", DEP_TYPES_BCC).default_cat("Ibf")],
    );
    mlc.insert(
        MlcAlg::Mcc,
        vec![
            int("ii", "-Iy", 2, 100).default_int(10),
            int_extra("chi", "-Is", 2, 1500, &[0]).default_int(0),
            cat("pof", "-P", PAYOFF_FUNCTIONS).default_cat("Exact match"),
        ],
    );
    mlc.insert(
        MlcAlg::Pmcc,
        vec![
            int("ii", "-Iy", 2, 100).default_int(10),
            int("chi", "-Is", 51, 1500).default_int(50),
            real("beta", "-B", 0.01, 0.99).default_real(0.03),
            int_choice("ts", "-O", &[0, 1]).default_int(0),
            int("ps", "-M", 1, 50).default_int(10),
            cat("pof", "-P", PAYOFF_FUNCTIONS).default_cat("Exact match"),
        ],
    );
    mlc.insert(
        MlcAlg::Ct,
        vec![
            int_choice("w", "-H", &[0, -1]).default_int(-1),
            cat("dp", "-X", DEP_TYPES).default_cat("Ibf"),
            int("ii", "-Iy", 1, 100).default_int(10),
            int_extra("chi", "-Is", 2, 1500, &[0]).default_int(0),
            int_expr("d", "-L", 1, sqrt_labels_plus_one()).default_int(1),
            cat("pof", "-P", PAYOFF_FUNCTIONS).default_cat("Exact match"),
        ],
    );
    mlc.insert(
        MlcAlg::Cdn,
        vec![
            int("i", "-I", 101, 1000).default_int(1000),
            int("ci", "-Ic", 1, 100).default_int(100),
        ],
    );
    mlc.insert(
        MlcAlg::Cdt,
        vec![
            int_choice("w", "-H", &[0, -1]).default_int(-1),
            cat("dp", "-X", DEP_TYPES).default_cat("None"),
            int_expr("d", "-L", 1, sqrt_labels_plus_one()).default_int(1),
            int("i", "-I", 101, 1000).default_int(1000),
            int("ci", "-Ic", 1, 100).default_int(100),
        ],
    );
    mlc.insert(
        MlcAlg::Ps,
        vec![
            int("pv", "-P", 1, 5).default_int(0),
            int("sv", "-N", 0, 5).default_int(0),
        ],
    );
    mlc.insert(
        MlcAlg::Pst,
        vec![
            int("pv", "-P", 1, 5).default_int(0),
            int("sv", "-N", 0, 5).default_int(0),
        ],
    );
    mlc.insert(
        MlcAlg::Rakel,
        vec![
            int("pv", "-P", 1, 5).default_int(0),
            int("sv", "-N", 0, 5).default_int(0),
            int_expr("les", "-k", 1, half_labels()).default_int(3),
            int_expr("sre", "-M", 2, twice_labels_capped()).default_int(10),
        ],
    );
    mlc.insert(
        MlcAlg::Rakeld,
        vec![
            int("pv", "-P", 1, 5).default_int(0),
            int("sv", "-N", 0, 5).default_int(0),
            int_expr("les", "-k", 1, half_labels()).default_int(3),
        ],
    );
    mlc.insert(
        MlcAlg::MlBpnn,
        vec![
            int("ne", "-E", 10, 1000).default_int(100),
            spec(
                "nhu",
                "-H",
                ParamKind::ScaledInt {
                    lo_frac: 0.2,
                    hi_frac: 1.0,
                },
            )
            .default_int(10),
            real("lr", "-r", 0.001, 0.1).default_real(0.1),
            real("m", "-m", 0.1, 0.8).default_real(0.1),
        ],
    );

    // --- multi-label: meta ---------------------------------------------------
    mlc.insert(MlcAlg::Sm, vec![]);
    mlc.insert(
        MlcAlg::BaggingMl,
        vec![int("i", "-I", 10, 50).default_int(10)],
    );
    mlc.insert(
        MlcAlg::BaggingMlDup,
        vec![
            int("bsp", "-P", 10, 100).default_int(67),
            int("i", "-I", 10, 50).default_int(10),
        ],
    );
    mlc.insert(
        MlcAlg::EnsembleMl,
        vec![
            // Hard domain is the generic bag range; the recommended band
            // around 62 is a soft check (W4).
            int("bsp", "-P", 10, 100).default_int(67),
            int("i", "-I", 10, 50).default_int(10),
        ],
    );
    mlc.insert(MlcAlg::Em, vec![int("i", "-I", 10, 50).default_int(10)]);
    mlc.insert(MlcAlg::Cm, vec![int("i", "-I", 10, 50).default_int(10)]);
    mlc.insert(
        MlcAlg::Rsml,
        vec![
            int("bsp", "-P", 10, 100).default_int(67),
            int("i", "-I", 10, 50).default_int(10),
            int("ap", "-A", 10, 100).default_int(50),
        ],
    );

    // --- single-label bases --------------------------------------------------
    slc.insert(
        SlcAlg::C45,
        vec![
            real("cf", "-C", 0.0, 1.0).default_real(0.25),
            int("mno", "-M", 1, 64).default_int(2),
            boolean("ct", "-O").default_bool(true),
            boolean("u", "-U").default_bool(false),
            boolean("bs", "-B").default_bool(false),
            boolean("umc", "-J").default_bool(true),
            boolean("ul", "-A").default_bool(false),
            boolean("sr", "-S").default_bool(true),
        ],
    );
    slc.insert(
        SlcAlg::Lmt,
        vec![
            int("mno", "-M", 1, 64).default_int(15),
            boolean("cn", "-B").default_bool(false),
            boolean("sor", "-R").default_bool(false),
            boolean("fr", "-C").default_bool(true),
            boolean("eop", "-P").default_bool(false),
            real("wtb", "-W", 0.0, 1.0).default_real(0.0),
            boolean("uaic", "-A").default_bool(false),
        ],
    );
    slc.insert(SlcAlg::Ds, vec![]);
    slc.insert(
        SlcAlg::Rf,
        vec![
            int("nt", "-I", 2, 256).default_int(100),
            int_extra("nf", "-K", 2, 32, &[0]).default_int(0),
            int_extra("md", "-depth", 2, 20, &[0]).default_int(0),
        ],
    );
    slc.insert(
        SlcAlg::RandomTree,
        vec![
            int("mw", "-M", 1, 64).default_int(1),
            int_extra("nf", "-K", 2, 32, &[0]).default_int(0),
            int_extra("md", "-depth", 2, 20, &[0]).default_int(0),
            // Zero disables back-fitting; one is rejected outright (H10).
            int_extra("nfbgt", "-N", 2, 5, &[0]).default_int(0),
        ],
    );
    slc.insert(
        SlcAlg::RepTree,
        vec![
            int("mw", "-M", 1, 64).default_int(2),
            int_extra("md", "-L", 2, 20, &[-1]).default_int(-1),
            boolean("up", "-P").default_bool(false),
        ],
    );
    slc.insert(
        SlcAlg::Dt,
        vec![
            cat("em", "-E", &["acc", "rmse", "mae", "auc"]).default_cat("acc"),
            boolean("uibk", "-I").default_bool(false),
            cat("sm", "-S", &["GreedyStepwise", "BestFirst"]).default_cat("BestFirst"),
            int_choice("crv", "-X", &[1, 2, 3, 4]).default_int(1),
        ],
    );
    slc.insert(
        SlcAlg::Jrip,
        vec![
            real("mtw", "-N", 1.0, 5.0).default_real(2.0),
            boolean("cer", "-E").default_bool(true),
            boolean("up", "-P").default_bool(false),
            int("o", "-O", 1, 5).default_int(2),
        ],
    );
    slc.insert(
        SlcAlg::OneR,
        vec![int("mbs", "-B", 1, 32).default_int(6)],
    );
    slc.insert(
        SlcAlg::Part,
        vec![
            int("mno", "-M", 1, 64).default_int(2),
            boolean("bs", "-B").default_bool(false),
            boolean("rep", "-R").default_bool(true),
            int_choice("nr", "-N", &[2, 3, 4, 5]),
        ],
    );
    slc.insert(SlcAlg::ZeroR, vec![]);
    slc.insert(
        SlcAlg::Knn,
        vec![
            int("k", "-K", 1, 64).default_int(1),
            boolean("loo", "-X").default_bool(false),
            // The categorical values are emitted as flags themselves.
            cat("dw", "", &["F", "I"]),
        ],
    );
    slc.insert(
        SlcAlg::KStar,
        vec![
            int("gb", "-B", 1, 100).default_int(20),
            boolean("eab", "-E").default_bool(false),
            cat("mm", "-M", &["a", "d", "m", "n"]).default_cat("a"),
        ],
    );
    slc.insert(
        SlcAlg::Vp,
        vec![
            int("i", "-I", 1, 10).default_int(1),
            int("mk", "-M", 5000, 50000).default_int(1000),
            real("e", "-E", 0.2, 5.0).default_real(1.0),
        ],
    );
    slc.insert(
        SlcAlg::Mlp,
        vec![
            real("lr", "-L", 0.1, 1.0).default_real(0.3),
            real("m", "-M", 0.0, 1.0).default_real(0.2),
            cat("nhn", "-H", &["a", "i", "o", "t"]).default_cat("a"),
            boolean("n2b", "-B").default_bool(true),
            boolean("r", "-R").default_bool(true),
            boolean("d", "-D").default_bool(false),
        ],
    );
    slc.insert(
        SlcAlg::Sgd,
        vec![
            int_choice("lf", "-F", &[0, 1, 2]).default_int(0),
            real("lr", "-L", 0.00001, 1.0).default_real(0.01),
            real("r", "-R", 1e-12, 10.0).default_real(0.0001),
            boolean("nn", "-N").default_bool(false),
            boolean("nrmv", "-M").default_bool(false),
        ],
    );
    slc.insert(
        SlcAlg::Smo,
        vec![
            real("c", "-C", 0.5, 1.5).default_real(1.0),
            int_choice("ft", "-N", &[0, 1, 2]).default_int(0),
            boolean("bcm", "-M").default_bool(false),
            spec("kernel", "-K", ParamKind::Kernel),
        ],
    );
    slc.insert(
        SlcAlg::Lr,
        vec![real("r", "-R", 1e-12, 10.0).default_real(1e-8)],
    );
    slc.insert(
        SlcAlg::Sl,
        vec![
            real("wtb", "-W", 0.0, 1.0).default_real(0.0),
            boolean("ucv", "-S").default_bool(true),
            boolean("uaic", "-A").default_bool(false),
        ],
    );
    slc.insert(
        SlcAlg::Nb,
        vec![
            boolean("uke", "-K").default_bool(false),
            boolean("usd", "-D").default_bool(false),
        ],
    );
    slc.insert(
        SlcAlg::Bnc,
        vec![cat(
            "sm",
            "-Q",
            &[
                "TAN",
                "K2",
                "HillClimber",
                "LAGDHillClimber",
                "SimulatedAnnealing",
                "TabuSearch",
            ],
        )],
    );
    slc.insert(SlcAlg::Nbm, vec![]);

    // --- preprocessing and single-label meta ----------------------------------
    slc.insert(
        SlcAlg::Asc,
        vec![cat("sm", "-S", &["GreedyStepwise", "BestFirst"]).default_cat("BestFirst")],
    );
    slc.insert(
        SlcAlg::AdaM1,
        vec![
            int("wt", "-P", 50, 100).default_int(100),
            boolean("ur", "-Q").default_bool(false),
            int("ni", "-I", 2, 128).default_int(10),
        ],
    );
    slc.insert(
        SlcAlg::Bagging,
        vec![
            int("bsp", "-P", 10, 100).default_int(100),
            int("ni", "-I", 2, 128).default_int(10),
            boolean("coob", "-O").default_bool(false),
        ],
    );
    slc.insert(
        SlcAlg::Lwl,
        vec![
            int_choice("k", "-K", &[-1, 10, 30, 60, 90, 120]).default_int(-1),
            int_choice("wk", "-U", &[0, 1, 2, 3, 4]).default_int(0),
        ],
    );
    slc.insert(
        SlcAlg::Rc,
        vec![int("ni", "-I", 2, 64).default_int(10)],
    );
    slc.insert(
        SlcAlg::Rss,
        vec![
            real("sss", "-P", 0.1, 1.0).default_real(0.5),
            int("ni", "-I", 2, 64).default_int(10),
        ],
    );

    // --- kernels ---------------------------------------------------------------
    kernels.insert(
        KernelKind::PolyKernel,
        vec![real("exp", "-E", 0.2, 5.0), boolean("ulo", "-L")],
    );
    kernels.insert(
        KernelKind::NormPolyKernel,
        vec![real("exp", "-E", 0.2, 5.0), boolean("ulo", "-L")],
    );
    kernels.insert(
        KernelKind::Puk,
        vec![real("om", "-O", 0.1, 1.0), real("sig", "-S", 0.1, 10.0)],
    );
    kernels.insert(
        KernelKind::Rbf,
        vec![real("g", "-G", 0.0001, 1.0)],
    );

    Registry { mlc, slc, kernels }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::tier_registry;

    fn ctx(l: u32, a: u32) -> DatasetContext {
        DatasetContext::new(l, a).unwrap()
    }

    #[test]
    fn describe_matches_declared_counts() {
        // The single-label random-subspace row declares 3 in the tier table
        // while only two tunable parameters exist (subspace size and
        // iterations); see docs/transcription_report.md.
        let reg = tier_registry();
        for (alg, record) in &reg.mlc {
            let specs = mlc_params(*alg);
            assert_eq!(
                declared_count(specs),
                record.hp_count,
                "MLC {} spec count",
                alg.acronym()
            );
        }
        for (alg, record) in &reg.slc {
            let specs = slc_params(*alg);
            let expected = if *alg == SlcAlg::Rss { 2 } else { record.hp_count };
            assert_eq!(
                declared_count(specs),
                expected,
                "SLC {} spec count",
                alg.acronym()
            );
        }
    }

    #[test]
    fn describe_examples() {
        let rakel = describe("RAkEL").unwrap();
        assert_eq!(
            rakel.iter().map(|s| s.name).collect::<Vec<_>>(),
            vec!["pv", "sv", "les", "sre"]
        );
        assert!(describe("ZeroR").unwrap().is_empty());
        let pmcc = describe("PMCC").unwrap();
        assert_eq!(
            pmcc.iter().map(|s| s.name).collect::<Vec<_>>(),
            vec!["ii", "chi", "beta", "ts", "ps", "pof"]
        );
        assert!(describe("XYZ").is_err());
    }

    #[test]
    fn context_dependent_intervals() {
        let les = &mlc_params(MlcAlg::Rakel)[2];
        assert_eq!(les.kind.int_interval(ctx(10, 5)), Some((1, 5)));
        assert_eq!(les.kind.int_interval(ctx(2, 5)), Some((1, 1)));
        let sre = &mlc_params(MlcAlg::Rakel)[3];
        assert_eq!(sre.kind.int_interval(ctx(60, 5)), Some((2, 100)));
        let d = &mlc_params(MlcAlg::Ct)[4];
        assert_eq!(d.kind.int_interval(ctx(16, 5)), Some((1, 5)));
        let nhu = &mlc_params(MlcAlg::MlBpnn)[1];
        assert_eq!(nhu.kind.int_interval(ctx(2, 50)), Some((10, 50)));
        assert_eq!(nhu.kind.int_interval(ctx(2, 10)), Some((2, 10)));
    }

    #[test]
    fn sentinel_values_are_admitted() {
        let nf = &slc_params(SlcAlg::Rf)[1];
        assert!(nf.kind.check(&ParamValue::Int(0), ctx(4, 4)).is_ok());
        assert!(nf.kind.check(&ParamValue::Int(1), ctx(4, 4)).is_err());
        assert!(nf.kind.check(&ParamValue::Int(32), ctx(4, 4)).is_ok());
        let md = &slc_params(SlcAlg::RepTree)[1];
        assert!(md.kind.check(&ParamValue::Int(-1), ctx(4, 4)).is_ok());
        assert!(md.kind.check(&ParamValue::Int(1), ctx(4, 4)).is_err());
    }

    #[test]
    fn payoff_names_round_trip() {
        assert_eq!(PAYOFF_FUNCTIONS.len(), 23);
        for display in PAYOFF_FUNCTIONS {
            let token = payoff_token_from_display(display).unwrap();
            assert!(!token.contains(' '));
            assert_eq!(payoff_display_from_token(&token), Some(*display));
        }
    }

    #[test]
    fn kernel_counts_as_three_declared_parameters() {
        let smo = slc_params(SlcAlg::Smo);
        assert_eq!(smo.len(), 4);
        assert_eq!(declared_count(smo), 6);
    }
}
