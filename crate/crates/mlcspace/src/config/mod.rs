//! Typed pipeline configurations lowered from derivation trees, plus the
//! per-algorithm hyper-parameter registry.

pub mod lower;
pub mod registry;

pub use lower::{lower, LowerError};
pub use registry::{
    describe, kernel_params, mlc_params, slc_params, ParamKind, ParamSpec, UnknownAlgorithm,
};

use std::collections::BTreeMap;
use std::fmt;

use crate::catalog::{MlcAlg, SlcAlg};

/// Prediction-threshold scheme applied to the model's confidence outputs.
#[derive(Debug, Clone, PartialEq)]
pub enum Threshold {
    PCut1,
    PCutL,
    /// Fixed value strictly between 0 and 1.
    Real(f64),
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::PCut1 => write!(f, "PCut1"),
            Threshold::PCutL => write!(f, "PCutL"),
            Threshold::Real(v) => write!(f, "{v}"),
        }
    }
}

macro_rules! sub_id {
    ($(#[$meta:meta])* $name:ident of $parent:ident { $($variant:ident),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_alg(self) -> $parent {
                match self {
                    $($name::$variant => $parent::$variant),+
                }
            }

            pub fn acronym(self) -> &'static str {
                self.as_alg().acronym()
            }
        }

        impl TryFrom<$parent> for $name {
            type Error = $parent;

            fn try_from(alg: $parent) -> Result<Self, $parent> {
                match alg {
                    $($parent::$variant => Ok($name::$variant),)+
                    other => Err(other),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.acronym())
            }
        }
    };
}

sub_id! {
    /// The 18 problem-transformation algorithms.
    PtId of MlcAlg {
        Br, Cc, Lp, Rakel, Bcc, Brq, Ccq, Fw, Mcc, Pcc, Ps, Pst, Rakeld, Rt,
        Ct, Cdn, Cdt, Pmcc,
    }
}

sub_id! {
    /// The 7 meta multi-label wrappers.
    MetaMlcId of MlcAlg {
        BaggingMl, BaggingMlDup, Cm, EnsembleMl, Em, Rsml, Sm,
    }
}

sub_id! {
    /// The 5 meta single-label wrappers.
    MetaSlcId of SlcAlg {
        AdaM1, Bagging, Lwl, Rc, Rss,
    }
}

sub_id! {
    /// The 22 base single-label classifiers.
    SlcBaseId of SlcAlg {
        Jrip, Knn, Lr, Nb, Rf, Bnc, C45, Dt, KStar, Lmt, Mlp, Part, RepTree,
        Sgd, Smo, Ds, Nbm, OneR, RandomTree, Sl, Vp, ZeroR,
    }
}

/// Attribute-selection search method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AscSearch {
    GreedyStepwise,
    BestFirst,
}

impl AscSearch {
    pub fn name(self) -> &'static str {
        match self {
            AscSearch::GreedyStepwise => "GreedyStepwise",
            AscSearch::BestFirst => "BestFirst",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "GreedyStepwise" => Some(AscSearch::GreedyStepwise),
            "BestFirst" => Some(AscSearch::BestFirst),
            _ => None,
        }
    }
}

/// SMO kernel families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum KernelKind {
    PolyKernel,
    NormPolyKernel,
    Puk,
    Rbf,
}

impl KernelKind {
    pub const ALL: &'static [KernelKind] = &[
        KernelKind::PolyKernel,
        KernelKind::NormPolyKernel,
        KernelKind::Puk,
        KernelKind::Rbf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::PolyKernel => "PolyKernel",
            KernelKind::NormPolyKernel => "NormPolyKernel",
            KernelKind::Puk => "Puk",
            KernelKind::Rbf => "RBF",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "PolyKernel" => Some(KernelKind::PolyKernel),
            "NormPolyKernel" => Some(KernelKind::NormPolyKernel),
            "Puk" => Some(KernelKind::Puk),
            "RBF" => Some(KernelKind::Rbf),
            _ => None,
        }
    }
}

/// A concrete hyper-parameter value.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Int(i64),
    Real(f64),
    Bool(bool),
    Cat(String),
    Kernel(KernelValue),
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelValue {
    pub kind: KernelKind,
    pub params: ParamMap,
}

pub type ParamMap = BTreeMap<String, ParamValue>;

impl ParamValue {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            ParamValue::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            ParamValue::Real(v) => Some(*v),
            ParamValue::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            ParamValue::Bool(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_cat(&self) -> Option<&str> {
        match self {
            ParamValue::Cat(v) => Some(v),
            _ => None,
        }
    }
}

/// The full typed pipeline: threshold plus the multi-label layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub threshold: Threshold,
    pub mlc: MlcLayer,
}

/// Multi-label layer, optionally wrapped by exactly one meta algorithm.
#[derive(Debug, Clone, PartialEq)]
pub enum MlcLayer {
    Meta {
        id: MetaMlcId,
        params: ParamMap,
        inner: MlcCore,
    },
    Core(MlcCore),
}

/// The actual multi-label algorithm: a problem transformation carrying a
/// single-label chain, or the algorithm-adaptation network.
#[derive(Debug, Clone, PartialEq)]
pub enum MlcCore {
    Pt {
        id: PtId,
        params: ParamMap,
        slc: SlcChain,
    },
    /// ML-BPNN.
    Aa { params: ParamMap },
}

/// Single-label chain: optional meta wrapper, then the base stage.
#[derive(Debug, Clone, PartialEq)]
pub enum SlcChain {
    Meta {
        id: MetaSlcId,
        params: ParamMap,
        base: SlcBase,
    },
    Plain(SlcBase),
}

/// A base classifier, optionally behind the attribute-selection wrapper.
#[derive(Debug, Clone, PartialEq)]
pub struct SlcBase {
    pub asc: Option<AscSearch>,
    pub id: SlcBaseId,
    pub params: ParamMap,
}

impl Configuration {
    /// The outermost multi-label construct.
    pub fn mlc_headline(&self) -> MlcAlg {
        match &self.mlc {
            MlcLayer::Meta { id, .. } => id.as_alg(),
            MlcLayer::Core(core) => core.headline(),
        }
    }

    /// The outermost single-label construct of the chain, if one exists.
    pub fn slc_headline(&self) -> Option<SlcAlg> {
        self.slc_chain().map(|chain| match chain {
            SlcChain::Meta { id, .. } => id.as_alg(),
            SlcChain::Plain(base) => {
                if base.asc.is_some() {
                    SlcAlg::Asc
                } else {
                    base.id.as_alg()
                }
            }
        })
    }

    pub fn core(&self) -> &MlcCore {
        match &self.mlc {
            MlcLayer::Meta { inner, .. } => inner,
            MlcLayer::Core(core) => core,
        }
    }

    pub fn slc_chain(&self) -> Option<&SlcChain> {
        match self.core() {
            MlcCore::Pt { slc, .. } => Some(slc),
            MlcCore::Aa { .. } => None,
        }
    }

    pub fn slc_base(&self) -> Option<&SlcBase> {
        self.slc_chain().map(|c| match c {
            SlcChain::Meta { base, .. } => base,
            SlcChain::Plain(base) => base,
        })
    }
}

impl MlcCore {
    pub fn headline(&self) -> MlcAlg {
        match self {
            MlcCore::Pt { id, .. } => id.as_alg(),
            MlcCore::Aa { .. } => MlcAlg::MlBpnn,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sub_ids_partition_the_catalog() {
        assert_eq!(PtId::ALL.len(), 18);
        assert_eq!(MetaMlcId::ALL.len(), 7);
        assert_eq!(PtId::ALL.len() + MetaMlcId::ALL.len() + 1, MlcAlg::ALL.len());
        assert_eq!(SlcBaseId::ALL.len(), 22);
        assert_eq!(MetaSlcId::ALL.len(), 5);
        assert_eq!(
            SlcBaseId::ALL.len() + MetaSlcId::ALL.len() + 1,
            SlcAlg::ALL.len()
        );
    }

    #[test]
    fn headline_of_meta_is_the_wrapper() {
        let config = Configuration {
            threshold: Threshold::PCut1,
            mlc: MlcLayer::Meta {
                id: MetaMlcId::Em,
                params: ParamMap::new(),
                inner: MlcCore::Pt {
                    id: PtId::Br,
                    params: ParamMap::new(),
                    slc: SlcChain::Plain(SlcBase {
                        asc: None,
                        id: SlcBaseId::Nb,
                        params: ParamMap::new(),
                    }),
                },
            },
        };
        assert_eq!(config.mlc_headline(), MlcAlg::Em);
        assert_eq!(config.slc_headline(), Some(SlcAlg::Nb));
    }

    #[test]
    fn asc_is_the_headline_of_a_wrapped_base() {
        let config = Configuration {
            threshold: Threshold::PCut1,
            mlc: MlcLayer::Core(MlcCore::Pt {
                id: PtId::Cc,
                params: ParamMap::new(),
                slc: SlcChain::Plain(SlcBase {
                    asc: Some(AscSearch::BestFirst),
                    id: SlcBaseId::Jrip,
                    params: ParamMap::new(),
                }),
            }),
        };
        assert_eq!(config.slc_headline(), Some(SlcAlg::Asc));
    }
}
