//! Algorithm identities, their grammar markers, and the tier registry.
//!
//! Every learning algorithm in the search space is identified either by a
//! terminal token (`BR`, `SM`, `RandomForest`, ...) or by a dedicated
//! nonterminal (`<CT>`, `<KNN>`, ...). The marker tables below are the bridge
//! between grammar structure and algorithm identity; tier filtering, headline
//! weighting and tree lowering all go through them.

use std::collections::BTreeSet;
use std::fmt;

use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use crate::grammar::{parse_grammar, Grammar, SourceTier};

pub const LARGE_GRAMMAR_SRC: &str = include_str!("../assets/mlc_large.bnf");
const TIERS_TSV: &str = include_str!("../assets/tiers.tsv");

/// The bundled Large-tier grammar.
pub fn large_grammar() -> &'static Grammar {
    static LARGE: Lazy<Grammar> = Lazy::new(|| {
        parse_grammar(LARGE_GRAMMAR_SRC)
            .expect("bundled grammar parses")
            .with_tier(SourceTier::Large)
    });
    &LARGE
}

macro_rules! id_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $acronym:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn acronym(self) -> &'static str {
                match self {
                    $($name::$variant => $acronym),+
                }
            }

            pub fn from_acronym(s: &str) -> Option<Self> {
                match s {
                    $($acronym => Some($name::$variant),)+
                    _ => None,
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.acronym())
            }
        }

        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.acronym())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let text = String::deserialize(d)?;
                $name::from_acronym(&text).ok_or_else(|| {
                    serde::de::Error::custom(format!(
                        concat!("unknown ", stringify!($name), " `{}`"),
                        text
                    ))
                })
            }
        }
    };
}

id_enum! {
    /// The 26 multi-label algorithms (one adaptation, 18 transformations,
    /// 7 meta wrappers).
    MlcAlg {
        MlBpnn => "ML-BPNN",
        Br => "BR",
        Cc => "CC",
        Lp => "LP",
        Rakel => "RAkEL",
        Bcc => "BCC",
        Brq => "BRq",
        Ccq => "CCq",
        Fw => "FW",
        Mcc => "MCC",
        Pcc => "PCC",
        Ps => "PS",
        Pst => "PSt",
        Rakeld => "RAkELd",
        Rt => "RT",
        Ct => "CT",
        Cdn => "CDN",
        Cdt => "CDT",
        Pmcc => "PMCC",
        BaggingMl => "BaggingML",
        BaggingMlDup => "BaggingMLDup",
        Cm => "CM",
        EnsembleMl => "EnsembleML",
        Em => "EM",
        Rsml => "RSML",
        Sm => "SM",
    }
}

id_enum! {
    /// The 28 single-label entries: 22 base classifiers, the attribute
    /// selection wrapper and 5 meta wrappers.
    SlcAlg {
        Jrip => "JRip",
        Knn => "KNN",
        Lr => "LR",
        Nb => "NB",
        Rf => "RF",
        Bnc => "BNC",
        C45 => "C4.5",
        Dt => "DT",
        KStar => "K*",
        Lmt => "LMT",
        Mlp => "MLP",
        Part => "PART",
        RepTree => "REPTree",
        Sgd => "SGD",
        Smo => "SMO",
        Ds => "DS",
        Nbm => "NBM",
        OneR => "OneR",
        RandomTree => "RT",
        Sl => "SL",
        Vp => "VP",
        ZeroR => "ZeroR",
        Asc => "ASC",
        AdaM1 => "AdaM1",
        Bagging => "Bagging",
        Lwl => "LWL",
        Rc => "RC",
        Rss => "RSS",
    }
}

impl MlcAlg {
    pub fn is_meta(self) -> bool {
        matches!(
            self,
            MlcAlg::BaggingMl
                | MlcAlg::BaggingMlDup
                | MlcAlg::Cm
                | MlcAlg::EnsembleMl
                | MlcAlg::Em
                | MlcAlg::Rsml
                | MlcAlg::Sm
        )
    }

    pub fn is_problem_transformation(self) -> bool {
        self != MlcAlg::MlBpnn && !self.is_meta()
    }
}

impl SlcAlg {
    pub fn is_meta(self) -> bool {
        matches!(
            self,
            SlcAlg::AdaM1 | SlcAlg::Bagging | SlcAlg::Lwl | SlcAlg::Rc | SlcAlg::Rss
        )
    }

    pub fn is_base(self) -> bool {
        !self.is_meta() && self != SlcAlg::Asc
    }
}

/// Where an algorithm shows up in the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    Token(&'static str),
    NonTerminal(&'static str),
}

pub const MLC_MARKERS: &[(MlcAlg, Marker)] = &[
    (MlcAlg::MlBpnn, Marker::NonTerminal("ML-BPNN")),
    (MlcAlg::Br, Marker::Token("BR")),
    (MlcAlg::Cc, Marker::Token("CC")),
    (MlcAlg::Lp, Marker::Token("LC")),
    (MlcAlg::Rakel, Marker::Token("RAkEL")),
    (MlcAlg::Bcc, Marker::Token("BCC")),
    (MlcAlg::Brq, Marker::Token("BRq")),
    (MlcAlg::Ccq, Marker::Token("CCq")),
    (MlcAlg::Fw, Marker::Token("FW")),
    (MlcAlg::Mcc, Marker::Token("MCC")),
    (MlcAlg::Pcc, Marker::Token("PCC")),
    (MlcAlg::Ps, Marker::Token("PS")),
    (MlcAlg::Pst, Marker::Token("PSt")),
    (MlcAlg::Rakeld, Marker::Token("RAkELd")),
    (MlcAlg::Rt, Marker::Token("RT")),
    (MlcAlg::Ct, Marker::NonTerminal("CT")),
    (MlcAlg::Cdn, Marker::Token("CDN")),
    (MlcAlg::Cdt, Marker::NonTerminal("CDT")),
    (MlcAlg::Pmcc, Marker::Token("PMCC")),
    (MlcAlg::BaggingMl, Marker::Token("BaggingML")),
    (MlcAlg::BaggingMlDup, Marker::Token("BaggingMLDup")),
    (MlcAlg::Cm, Marker::Token("CM")),
    (MlcAlg::EnsembleMl, Marker::Token("EnsembleML")),
    (MlcAlg::Em, Marker::Token("EM")),
    (MlcAlg::Rsml, Marker::NonTerminal("RSML")),
    (MlcAlg::Sm, Marker::Token("SM")),
];

pub const SLC_MARKERS: &[(SlcAlg, Marker)] = &[
    (SlcAlg::Jrip, Marker::NonTerminal("JRip")),
    (SlcAlg::Knn, Marker::NonTerminal("KNN")),
    (SlcAlg::Lr, Marker::Token("LogisticRegression")),
    (SlcAlg::Nb, Marker::Token("NaiveBayes")),
    (SlcAlg::Rf, Marker::Token("RandomForest")),
    (SlcAlg::Bnc, Marker::NonTerminal("BayesianNetworkClassifiers")),
    (SlcAlg::C45, Marker::NonTerminal("C4.5")),
    (SlcAlg::Dt, Marker::NonTerminal("DT")),
    (SlcAlg::KStar, Marker::NonTerminal("K*")),
    (SlcAlg::Lmt, Marker::NonTerminal("LogisticModelTrees")),
    (SlcAlg::Mlp, Marker::NonTerminal("MultiLayerPerc")),
    (SlcAlg::Part, Marker::NonTerminal("PART")),
    (SlcAlg::RepTree, Marker::NonTerminal("REPTree")),
    (SlcAlg::Sgd, Marker::NonTerminal("StocGradDescent")),
    (SlcAlg::Smo, Marker::NonTerminal("SeqMinOptimization")),
    (SlcAlg::Ds, Marker::Token("DecisionStump")),
    (SlcAlg::Nbm, Marker::Token("NaiveBayesMultinomial")),
    (SlcAlg::OneR, Marker::Token("OneR")),
    (SlcAlg::RandomTree, Marker::NonTerminal("RandomTree")),
    (SlcAlg::Sl, Marker::Token("SimpleLogistic")),
    (SlcAlg::Vp, Marker::NonTerminal("VotedPerceptron")),
    (SlcAlg::ZeroR, Marker::Token("ZeroR")),
    (SlcAlg::Asc, Marker::Token("ASC")),
    (SlcAlg::AdaM1, Marker::NonTerminal("AdaM1")),
    (SlcAlg::Bagging, Marker::NonTerminal("Bagging")),
    (SlcAlg::Lwl, Marker::NonTerminal("LWL")),
    (SlcAlg::Rc, Marker::Token("RandomCommittee")),
    (SlcAlg::Rss, Marker::NonTerminal("RandomSubspace")),
];

pub fn mlc_for_token(token: &str) -> Option<MlcAlg> {
    MLC_MARKERS.iter().find_map(|(a, m)| match m {
        Marker::Token(t) if *t == token => Some(*a),
        _ => None,
    })
}

pub fn mlc_for_nonterminal(name: &str) -> Option<MlcAlg> {
    MLC_MARKERS.iter().find_map(|(a, m)| match m {
        Marker::NonTerminal(n) if *n == name => Some(*a),
        _ => None,
    })
}

pub fn slc_for_token(token: &str) -> Option<SlcAlg> {
    SLC_MARKERS.iter().find_map(|(a, m)| match m {
        Marker::Token(t) if *t == token => Some(*a),
        _ => None,
    })
}

pub fn slc_for_nonterminal(name: &str) -> Option<SlcAlg> {
    SLC_MARKERS.iter().find_map(|(a, m)| match m {
        Marker::NonTerminal(n) if *n == name => Some(*a),
        _ => None,
    })
}

/// One row of the shipped tier table.
#[derive(Debug, Clone)]
pub struct TierRecord {
    pub name: String,
    pub category: String,
    pub small: bool,
    pub medium: bool,
    pub large: bool,
    pub hp_count: u32,
}

/// Tier membership and declared hyper-parameter counts for all 54 entries.
#[derive(Debug, Clone)]
pub struct TierRegistry {
    pub mlc: Vec<(MlcAlg, TierRecord)>,
    pub slc: Vec<(SlcAlg, TierRecord)>,
}

impl TierRegistry {
    pub fn mlc_record(&self, alg: MlcAlg) -> &TierRecord {
        &self.mlc.iter().find(|(a, _)| *a == alg).expect("registry covers all ids").1
    }

    pub fn slc_record(&self, alg: SlcAlg) -> &TierRecord {
        &self.slc.iter().find(|(a, _)| *a == alg).expect("registry covers all ids").1
    }

    pub fn mlc_in_tier(&self, tier: crate::tiering::Tier) -> BTreeSet<MlcAlg> {
        self.mlc
            .iter()
            .filter(|(_, r)| r.in_tier(tier))
            .map(|(a, _)| *a)
            .collect()
    }

    pub fn slc_in_tier(&self, tier: crate::tiering::Tier) -> BTreeSet<SlcAlg> {
        self.slc
            .iter()
            .filter(|(_, r)| r.in_tier(tier))
            .map(|(a, _)| *a)
            .collect()
    }
}

impl TierRecord {
    pub fn in_tier(&self, tier: crate::tiering::Tier) -> bool {
        match tier {
            crate::tiering::Tier::Small => self.small,
            crate::tiering::Tier::Medium => self.medium,
            crate::tiering::Tier::Large => self.large,
        }
    }
}

pub fn tier_registry() -> &'static TierRegistry {
    static REGISTRY: Lazy<TierRegistry> = Lazy::new(|| parse_tiers(TIERS_TSV));
    &REGISTRY
}

fn parse_tiers(tsv: &str) -> TierRegistry {
    let mut mlc = Vec::new();
    let mut slc = Vec::new();
    for (i, line) in tsv.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        assert_eq!(fields.len(), 8, "tier table row {i} malformed: {line}");
        let record = TierRecord {
            name: fields[2].to_string(),
            category: fields[3].to_string(),
            small: fields[4] == "Y",
            medium: fields[5] == "Y",
            large: fields[6] == "Y",
            hp_count: fields[7].parse().expect("hp count"),
        };
        match fields[0] {
            "mlc" => {
                let alg = MlcAlg::from_acronym(fields[1])
                    .unwrap_or_else(|| panic!("unknown MLC acronym {}", fields[1]));
                mlc.push((alg, record));
            }
            "slc" => {
                let alg = SlcAlg::from_acronym(fields[1])
                    .unwrap_or_else(|| panic!("unknown SLC acronym {}", fields[1]));
                slc.push((alg, record));
            }
            other => panic!("unknown kind {other}"),
        }
    }
    TierRegistry { mlc, slc }
}
