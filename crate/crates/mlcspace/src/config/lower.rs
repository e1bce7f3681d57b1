//! Lower a derivation tree from a bundled tier grammar into a typed
//! [`Configuration`]. Total over everything the sampler can produce; any
//! structural surprise reports `UnknownShape` with a path.
//!
//! Dispatch is on production names, tokens and node shapes rather than
//! alternative indices, because tier filtering renumbers alternatives.

use crate::sampling::DerivationTree;

use super::registry::payoff_display_from_token;
use super::{
    AscSearch, Configuration, KernelKind, KernelValue, MetaMlcId, MetaSlcId, MlcCore, MlcLayer,
    ParamMap, ParamValue, PtId, SlcBase, SlcBaseId, SlcChain, Threshold,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LowerError {
    #[error("tree does not derive from a bundled tier grammar: {0}")]
    UnknownShape(String),
}

type Result<T> = std::result::Result<T, LowerError>;

fn err<T>(what: impl Into<String>) -> Result<T> {
    Err(LowerError::UnknownShape(what.into()))
}

/// Lower a sampled tree into the typed pipeline.
pub fn lower(tree: &DerivationTree) -> Result<Configuration> {
    let children = choice_named(tree, "Start")?;
    let [mlc_group, threshold_node] = exact::<2>(children, "Start")?;
    let threshold = lower_threshold(threshold_node)?;
    let (_, inner) = as_group(mlc_group)?;
    let node = one(inner, "Start group")?;
    let mlc = match prod_name(node)? {
        "MLC-PT" => MlcLayer::Core(lower_mlc_pt(node)?),
        "MLC-AA" => {
            let inner = one(choice_named(node, "MLC-AA")?, "MLC-AA")?;
            MlcLayer::Core(lower_ml_bpnn(inner)?)
        }
        "META-MLC-LEVEL" => lower_meta_mlc(node)?,
        other => return err(format!("unexpected <{other}> under Start")),
    };
    Ok(Configuration { threshold, mlc })
}

fn lower_threshold(node: &DerivationTree) -> Result<Threshold> {
    let children = choice_named(node, "pred_tshd")?;
    match one(children, "pred_tshd")? {
        DerivationTree::Token(t) if t == "PCut1" => Ok(Threshold::PCut1),
        DerivationTree::Token(t) if t == "PCutL" => Ok(Threshold::PCutL),
        DerivationTree::RealLeaf { value, .. } => Ok(Threshold::Real(*value)),
        other => err(format!("unexpected threshold node {other:?}")),
    }
}

fn lower_mlc_pt(node: &DerivationTree) -> Result<MlcCore> {
    let children = choice_named(node, "MLC-PT")?;
    let [pt_node, slc_node] = exact::<2>(children, "MLC-PT")?;
    let (id, params) = lower_algs_pt(pt_node)?;
    let slc = lower_algs_slc(slc_node)?;
    Ok(MlcCore::Pt { id, params, slc })
}

fn lower_ml_bpnn(node: &DerivationTree) -> Result<MlcCore> {
    let children = choice_named(node, "ML-BPNN")?;
    let [ne, nhu, lr, m] = exact::<4>(children, "ML-BPNN")?;
    let mut params = ParamMap::new();
    params.insert("ne".into(), ParamValue::Int(int_value(ne)?));
    params.insert("nhu".into(), ParamValue::Int(int_value(nhu)?));
    params.insert("lr".into(), ParamValue::Real(real_value(lr)?));
    params.insert("m".into(), ParamValue::Real(real_value(m)?));
    Ok(MlcCore::Aa { params })
}

fn lower_algs_pt(node: &DerivationTree) -> Result<(PtId, ParamMap)> {
    let children = choice_named(node, "ALGS-PT")?;
    lower_pt_family(one(children, "ALGS-PT")?)
}

/// Dispatch over <ALGS-PT1> / <ALGS-PT2> / <ALGS-PT3>.
fn lower_pt_family(node: &DerivationTree) -> Result<(PtId, ParamMap)> {
    match prod_name(node)? {
        "ALGS-PT1" => lower_algs_pt1(node),
        "ALGS-PT2" => lower_algs_pt2(node),
        "ALGS-PT3" => lower_algs_pt3(node),
        other => err(format!("unexpected PT family <{other}>")),
    }
}

fn lower_algs_pt1(node: &DerivationTree) -> Result<(PtId, ParamMap)> {
    let children = choice_named(node, "ALGS-PT1")?;
    let mut params = ParamMap::new();
    match &children[0] {
        DerivationTree::Token(t) => {
            let id = match t.as_str() {
                "BR" => PtId::Br,
                "CC" => PtId::Cc,
                "LC" => PtId::Lp,
                "FW" => PtId::Fw,
                "RT" => PtId::Rt,
                other => return err(format!("unexpected PT token {other}")),
            };
            Ok((id, params))
        }
        DerivationTree::Group { children: quick, .. } => {
            // (BRq | CCq) <dsr>
            let [_, dsr] = exact::<2>(children, "BRq/CCq")?;
            params.insert("dsr".into(), ParamValue::Real(real_value(dsr)?));
            match token(one(quick, "BRq/CCq group")?)? {
                "BRq" => Ok((PtId::Brq, params)),
                "CCq" => Ok((PtId::Ccq, params)),
                other => err(format!("unexpected quick token {other}")),
            }
        }
        node @ DerivationTree::Choice { .. } => match prod_name(node)? {
            "ComplexCC_Trellis" => lower_complex_cc(node),
            "LP_based" => lower_lp_based(node),
            other => err(format!("unexpected <{other}> under ALGS-PT1")),
        },
        other => err(format!("unexpected ALGS-PT1 child {other:?}")),
    }
}

fn lower_complex_cc(node: &DerivationTree) -> Result<(PtId, ParamMap)> {
    let children = choice_named(node, "ComplexCC_Trellis")?;
    let mut params = ParamMap::new();
    if let DerivationTree::Token(t) = &children[0] {
        return if t == "PCC" {
            Ok((PtId::Pcc, params))
        } else {
            err(format!("unexpected token {t} under ComplexCC_Trellis"))
        };
    }
    // Remaining shapes: (MCC <chi_MCC> | <CT>) <ii> <pof>
    //               or  (CDN | <CDT>) <i_cdn_cdt> <ci>
    let [head, second, third] = exact::<3>(children, "ComplexCC_Trellis")?;
    let (_, inner) = as_group(head)?;
    match &inner[0] {
        DerivationTree::Token(t) if t == "MCC" => {
            let [_mcc, chi] = exact::<2>(inner, "MCC")?;
            params.insert("chi".into(), ParamValue::Int(lower_chi_mcc(chi)?));
            params.insert("ii".into(), ParamValue::Int(int_value(second)?));
            params.insert("pof".into(), ParamValue::Cat(lower_pof(third)?));
            Ok((PtId::Mcc, params))
        }
        DerivationTree::Token(t) if t == "CDN" => {
            params.insert("i".into(), ParamValue::Int(int_value(second)?));
            params.insert("ci".into(), ParamValue::Int(int_value(third)?));
            Ok((PtId::Cdn, params))
        }
        node @ DerivationTree::Choice { .. } => match prod_name(node)? {
            "CT" => {
                lower_ct_body(node, &mut params)?;
                params.insert("ii".into(), ParamValue::Int(int_value(second)?));
                params.insert("pof".into(), ParamValue::Cat(lower_pof(third)?));
                Ok((PtId::Ct, params))
            }
            "CDT" => {
                lower_cdt_body(node, &mut params)?;
                params.insert("i".into(), ParamValue::Int(int_value(second)?));
                params.insert("ci".into(), ParamValue::Int(int_value(third)?));
                Ok((PtId::Cdt, params))
            }
            other => err(format!("unexpected <{other}> under ComplexCC_Trellis")),
        },
        other => err(format!("unexpected trellis head {other:?}")),
    }
}

fn lower_ct_body(node: &DerivationTree, params: &mut ParamMap) -> Result<()> {
    let children = choice_named(node, "CT")?;
    let [chi, w, dp] = exact::<3>(children, "CT")?;
    params.insert("chi".into(), ParamValue::Int(int_value(chi)?));
    lower_width(w, params)?;
    params.insert("dp".into(), ParamValue::Cat(cat_choice(dp, "dp")?));
    Ok(())
}

fn lower_cdt_body(node: &DerivationTree, params: &mut ParamMap) -> Result<()> {
    let children = choice_named(node, "CDT")?;
    let [w, dp] = exact::<2>(children, "CDT")?;
    lower_width(w, params)?;
    params.insert("dp".into(), ParamValue::Cat(cat_choice(dp, "dp")?));
    Ok(())
}

/// `<w> ::= 0 1 | -1 <d>`: width 0 pins density 1.
fn lower_width(node: &DerivationTree, params: &mut ParamMap) -> Result<()> {
    let children = choice_named(node, "w")?;
    match token(&children[0])? {
        "0" => {
            params.insert("w".into(), ParamValue::Int(0));
            params.insert("d".into(), ParamValue::Int(1));
            Ok(())
        }
        "-1" => {
            let [_minus_one, d] = exact::<2>(children, "w")?;
            params.insert("w".into(), ParamValue::Int(-1));
            params.insert("d".into(), ParamValue::Int(int_value(d)?));
            Ok(())
        }
        other => err(format!("unexpected width token {other}")),
    }
}

fn lower_chi_mcc(node: &DerivationTree) -> Result<i64> {
    let children = choice_named(node, "chi_MCC")?;
    match one(children, "chi_MCC")? {
        DerivationTree::Token(t) if t == "0" => Ok(0),
        inner @ DerivationTree::Choice { .. } => int_value(inner),
        other => err(format!("unexpected chi_MCC node {other:?}")),
    }
}

fn lower_lp_based(node: &DerivationTree) -> Result<(PtId, ParamMap)> {
    let children = choice_named(node, "LP_based")?;
    let [head, sv, pv] = exact::<3>(children, "LP_based")?;
    let mut params = ParamMap::new();
    params.insert("sv".into(), ParamValue::Int(int_value(sv)?));
    params.insert("pv".into(), ParamValue::Int(int_value(pv)?));
    let (_, inner) = as_group(head)?;
    match one(inner, "LP_based group")? {
        DerivationTree::Token(t) if t == "PS" => Ok((PtId::Ps, params)),
        DerivationTree::Token(t) if t == "PSt" => Ok((PtId::Pst, params)),
        rk @ DerivationTree::Choice { .. } => {
            let rk_children = choice_named(rk, "RAkEL-based")?;
            let [rk_head, les] = exact::<2>(rk_children, "RAkEL-based")?;
            params.insert("les".into(), ParamValue::Int(int_value(les)?));
            let (_, rk_inner) = as_group(rk_head)?;
            match token(&rk_inner[0])? {
                "RAkEL" => {
                    let [_tok, sre] = exact::<2>(rk_inner, "RAkEL")?;
                    params.insert("sre".into(), ParamValue::Int(int_value(sre)?));
                    Ok((PtId::Rakel, params))
                }
                "RAkELd" => Ok((PtId::Rakeld, params)),
                other => err(format!("unexpected RAkEL token {other}")),
            }
        }
        other => err(format!("unexpected LP_based head {other:?}")),
    }
}

fn lower_algs_pt2(node: &DerivationTree) -> Result<(PtId, ParamMap)> {
    let children = choice_named(node, "ALGS-PT2")?;
    let [_bcc, dp] = exact::<2>(children, "ALGS-PT2")?;
    let dp_children = choice_named(dp, "dp_complete")?;
    let value = match one(dp_children, "dp_complete")? {
        DerivationTree::Token(t) if t == "LEAD" => "LEAD".to_string(),
        inner @ DerivationTree::Choice { .. } => cat_choice(inner, "dp")?,
        other => return err(format!("unexpected dp_complete node {other:?}")),
    };
    let mut params = ParamMap::new();
    params.insert("dp".into(), ParamValue::Cat(value));
    Ok((PtId::Bcc, params))
}

fn lower_algs_pt3(node: &DerivationTree) -> Result<(PtId, ParamMap)> {
    let children = choice_named(node, "ALGS-PT3")?;
    let [_pmcc, beta, ts, ii, chi, ps, pof] = exact::<7>(children, "ALGS-PT3")?;
    let mut params = ParamMap::new();
    params.insert("beta".into(), ParamValue::Real(real_value(beta)?));
    params.insert("ts".into(), ParamValue::Int(int_token_choice(ts, "ts")?));
    params.insert("ii".into(), ParamValue::Int(int_value(ii)?));
    params.insert("chi".into(), ParamValue::Int(int_value(chi)?));
    params.insert("ps".into(), ParamValue::Int(int_value(ps)?));
    params.insert("pof".into(), ParamValue::Cat(lower_pof(pof)?));
    Ok((PtId::Pmcc, params))
}

fn lower_pof(node: &DerivationTree) -> Result<String> {
    let children = choice_named(node, "pof")?;
    let token = token(one(children, "pof")?)?;
    payoff_display_from_token(token)
        .map(str::to_string)
        .ok_or_else(|| LowerError::UnknownShape(format!("unknown payoff token `{token}`")))
}

fn lower_meta_mlc(node: &DerivationTree) -> Result<MlcLayer> {
    let children = choice_named(node, "META-MLC-LEVEL")?;
    let meta = one(children, "META-MLC-LEVEL")?;
    match prod_name(meta)? {
        "META-MLC1" => {
            let meta_children = choice_named(meta, "META-MLC1")?;
            let [head, body] = exact::<2>(meta_children, "META-MLC1")?;
            let (_, head_inner) = as_group(head)?;
            let (id, params) = match one(head_inner, "META-MLC1 head")? {
                DerivationTree::Token(t) if t == "SM" => (MetaMlcId::Sm, ParamMap::new()),
                rsml @ DerivationTree::Choice { .. } => {
                    let rs_children = choice_named(rsml, "RSML")?;
                    let [bsp, i, ap] = exact::<3>(rs_children, "RSML")?;
                    let mut params = ParamMap::new();
                    params.insert("bsp".into(), ParamValue::Int(int_value(bsp)?));
                    params.insert("i".into(), ParamValue::Int(int_value(i)?));
                    params.insert("ap".into(), ParamValue::Int(int_value(ap)?));
                    (MetaMlcId::Rsml, params)
                }
                other => return err(format!("unexpected META-MLC1 head {other:?}")),
            };
            let inner = lower_meta_inner(body)?;
            Ok(MlcLayer::Meta { id, params, inner })
        }
        "META-MLC2" => {
            let meta_children = choice_named(meta, "META-MLC2")?;
            let [head, body] = exact::<2>(meta_children, "META-MLC2")?;
            let (id, params) = lower_alg_meta_mlc2(head)?;
            let inner = lower_meta_inner(body)?;
            Ok(MlcLayer::Meta { id, params, inner })
        }
        "META-MLC3" => {
            let meta_children = choice_named(meta, "META-MLC3")?;
            let [head, body] = exact::<2>(meta_children, "META-MLC3")?;
            let (_, head_inner) = as_group(head)?;
            let [em_cm, i] = exact::<2>(head_inner, "META-MLC3 head")?;
            let (_, em_cm_inner) = as_group(em_cm)?;
            let id = match token(one(em_cm_inner, "EM/CM")?)? {
                "EM" => MetaMlcId::Em,
                "CM" => MetaMlcId::Cm,
                other => return err(format!("unexpected meta token {other}")),
            };
            let mut params = ParamMap::new();
            params.insert("i".into(), ParamValue::Int(int_value(i)?));
            let inner = lower_meta_inner(body)?;
            Ok(MlcLayer::Meta { id, params, inner })
        }
        other => err(format!("unexpected meta level <{other}>")),
    }
}

fn lower_alg_meta_mlc2(node: &DerivationTree) -> Result<(MetaMlcId, ParamMap)> {
    let children = choice_named(node, "alg-meta-mlc2")?;
    let [head, i] = exact::<2>(children, "alg-meta-mlc2")?;
    let mut params = ParamMap::new();
    params.insert("i".into(), ParamValue::Int(int_value(i)?));
    let (_, inner) = as_group(head)?;
    let id = match &inner[0] {
        DerivationTree::Group { children: bagging, .. } => match token(&bagging[0])? {
            "BaggingML" => MetaMlcId::BaggingMl,
            "BaggingMLDup" => {
                let [_tok, bsp] = exact::<2>(bagging, "BaggingMLDup")?;
                params.insert("bsp".into(), ParamValue::Int(int_value(bsp)?));
                MetaMlcId::BaggingMlDup
            }
            other => return err(format!("unexpected bagging token {other}")),
        },
        DerivationTree::Token(t) if t == "EnsembleML" => {
            let [_tok, bsp] = exact::<2>(inner, "EnsembleML")?;
            params.insert("bsp".into(), ParamValue::Int(int_value(bsp)?));
            MetaMlcId::EnsembleMl
        }
        other => return err(format!("unexpected alg-meta-mlc2 head {other:?}")),
    };
    Ok((id, params))
}

/// `(... <ALGS-SLC> | <ML-BPNN>)` beneath a meta wrapper; the transformation
/// slot is either `<ALGS-PT>` or a pinned `(<ALGS-PT1> | <ALGS-PTn>)` group.
fn lower_meta_inner(node: &DerivationTree) -> Result<MlcCore> {
    let (_, children) = as_group(node)?;
    match children.len() {
        1 => lower_ml_bpnn(&children[0]),
        2 => {
            let (id, params) = match &children[0] {
                pt @ DerivationTree::Choice { .. } if prod_name(pt)? == "ALGS-PT" => {
                    lower_algs_pt(pt)?
                }
                DerivationTree::Group { children: pt_inner, .. } => {
                    lower_pt_family(one(pt_inner, "meta inner PT")?)?
                }
                other => return err(format!("unexpected meta inner head {other:?}")),
            };
            let slc = lower_algs_slc(&children[1])?;
            Ok(MlcCore::Pt { id, params, slc })
        }
        n => err(format!("meta inner group with {n} children")),
    }
}

fn lower_algs_slc(node: &DerivationTree) -> Result<SlcChain> {
    let children = choice_named(node, "ALGS-SLC")?;
    match children.len() {
        1 => Ok(SlcChain::Plain(lower_alg_type(&children[0])?)),
        2 => {
            let (id, params) = lower_slc_meta(&children[0])?;
            let base = match prod_name(&children[1])? {
                "ALG-WEIGHTED-TYPE" => {
                    let inner = one(choice_named(&children[1], "ALG-WEIGHTED-TYPE")?, "ALG-WEIGHTED-TYPE")?;
                    lower_base_category(inner)?
                }
                "ALG-RANDOM-TYPE" => lower_alg_random(&children[1])?,
                "ALG-TYPE" => lower_alg_type(&children[1])?,
                other => return err(format!("unexpected base slot <{other}>")),
            };
            Ok(SlcChain::Meta { id, params, base })
        }
        n => err(format!("ALGS-SLC with {n} children")),
    }
}

fn lower_slc_meta(node: &DerivationTree) -> Result<(MetaSlcId, ParamMap)> {
    let mut params = ParamMap::new();
    match prod_name(node)? {
        "META1" => {
            let inner = one(choice_named(node, "META1")?, "META1")?;
            match prod_name(inner)? {
                "LWL" => {
                    let lwl = choice_named(inner, "LWL")?;
                    let [k, wk] = exact::<2>(lwl, "LWL")?;
                    params.insert("k".into(), ParamValue::Int(int_token_choice(k, "k_lwl")?));
                    if let Some(wk_node) = optional_child(wk)? {
                        params.insert(
                            "wk".into(),
                            ParamValue::Int(int_token_choice(wk_node, "wk")?),
                        );
                    }
                    Ok((MetaSlcId::Lwl, params))
                }
                "AdaM1" => {
                    let ada = choice_named(inner, "AdaM1")?;
                    let [wt, ur, ni] = exact::<3>(ada, "AdaM1")?;
                    params.insert("wt".into(), ParamValue::Int(lower_wt(wt)?));
                    if optional_child(ur)?.is_some() {
                        params.insert("ur".into(), ParamValue::Bool(true));
                    }
                    params.insert("ni".into(), ParamValue::Int(int_value(ni)?));
                    Ok((MetaSlcId::AdaM1, params))
                }
                other => err(format!("unexpected META1 inner <{other}>")),
            }
        }
        "META2" => {
            let children = choice_named(node, "META2")?;
            let [_tok, ni] = exact::<2>(children, "META2")?;
            params.insert("ni".into(), ParamValue::Int(int_value(ni)?));
            Ok((MetaSlcId::Rc, params))
        }
        "META3" => {
            let inner = one(choice_named(node, "META3")?, "META3")?;
            match prod_name(inner)? {
                "Bagging" => {
                    let bagging = choice_named(inner, "Bagging")?;
                    let [head, ni] = exact::<2>(bagging, "Bagging")?;
                    let (_, head_inner) = as_group(head)?;
                    match &head_inner[0] {
                        bsp @ DerivationTree::Choice { .. } => {
                            params.insert("bsp".into(), ParamValue::Int(int_value(bsp)?));
                        }
                        DerivationTree::Token(t) if t == "100" => {
                            params.insert("bsp".into(), ParamValue::Int(100));
                            params.insert("coob".into(), ParamValue::Bool(true));
                        }
                        other => return err(format!("unexpected Bagging head {other:?}")),
                    }
                    params.insert("ni".into(), ParamValue::Int(int_value(ni)?));
                    Ok((MetaSlcId::Bagging, params))
                }
                "RandomSubspace" => {
                    let rss = choice_named(inner, "RandomSubspace")?;
                    let [sss, ni] = exact::<2>(rss, "RandomSubspace")?;
                    params.insert("sss".into(), ParamValue::Real(real_value(sss)?));
                    params.insert("ni".into(), ParamValue::Int(int_value(ni)?));
                    Ok((MetaSlcId::Rss, params))
                }
                other => err(format!("unexpected META3 inner <{other}>")),
            }
        }
        other => err(format!("expected a meta production, got <{other}>")),
    }
}

/// `<wt> ::= RANDOM-INT(50, 100) | 100`
fn lower_wt(node: &DerivationTree) -> Result<i64> {
    let children = choice_named(node, "wt")?;
    match one(children, "wt")? {
        DerivationTree::IntLeaf { value, .. } => Ok(*value),
        DerivationTree::Token(t) if t == "100" => Ok(100),
        other => err(format!("unexpected wt node {other:?}")),
    }
}

fn lower_alg_type(node: &DerivationTree) -> Result<SlcBase> {
    let children = choice_named(node, "ALG-TYPE")?;
    // The ASC optional disappears from filtered tiers entirely.
    let (asc, category) = match children.len() {
        2 => {
            let asc = match optional_children(&children[0])? {
                None => None,
                Some(inner) => {
                    let [_tok, sm_node] = exact::<2>(inner, "ASC")?;
                    Some(lower_search_method(sm_node)?)
                }
            };
            (asc, &children[1])
        }
        1 => (None, &children[0]),
        n => return err(format!("ALG-TYPE with {n} children")),
    };
    let (_, inner) = as_group(category)?;
    let mut b = lower_base_category(one(inner, "base category")?)?;
    b.asc = asc;
    Ok(b)
}

fn lower_search_method(node: &DerivationTree) -> Result<AscSearch> {
    let children = choice_named(node, "sm")?;
    let t = token(one(children, "sm")?)?;
    AscSearch::from_name(t)
        .ok_or_else(|| LowerError::UnknownShape(format!("unknown search method `{t}`")))
}

fn lower_base_category(node: &DerivationTree) -> Result<SlcBase> {
    let (name, _, children) = as_choice(node)?;
    match name {
        "TREES" => lower_trees(children),
        "RULES" | "RULES-PARTIAL" => lower_rules(children),
        "LAZY" => {
            let inner = one(children, "LAZY")?;
            match prod_name(inner)? {
                "KNN" => lower_knn(inner),
                "K*" => lower_kstar(inner),
                other => err(format!("unexpected LAZY inner <{other}>")),
            }
        }
        "KNN" => lower_knn(node),
        "FUNCTIONS" => lower_functions(children),
        "FUNCTIONS-PARTIAL" => lower_functions_partial(children),
        "BAYES" => lower_bayes(children),
        "OTHERS" => lower_others(children),
        other => err(format!("unexpected base category <{other}>")),
    }
}

fn lower_trees(children: &[DerivationTree]) -> Result<SlcBase> {
    match &children[0] {
        DerivationTree::Token(t) if t == "DecisionStump" => {
            Ok(base(SlcBaseId::Ds, ParamMap::new()))
        }
        c45 @ DerivationTree::Choice { .. } => lower_c45(c45),
        DerivationTree::Group { .. } => {
            let [head, md] = exact::<2>(children, "TREES depth group")?;
            lower_tree_depth_group(head, int_value(md)?)
        }
        other => err(format!("unexpected TREES head {other:?}")),
    }
}

/// `(((RandomForest <nt> | <RandomTree>) <nf>) | <REPTree>)` plus the shared
/// outer depth.
fn lower_tree_depth_group(node: &DerivationTree, md: i64) -> Result<SlcBase> {
    let (_, inner) = as_group(node)?;
    match &inner[0] {
        // ((RandomForest <nt> | <RandomTree>) <nf>) as a nested group
        DerivationTree::Group { children: mid, .. } => {
            let [forest_group, nf] = exact::<2>(mid, "forest group")?;
            let nf = int_value(nf)?;
            let (_, forest_inner) = as_group(forest_group)?;
            match &forest_inner[0] {
                DerivationTree::Token(t) if t == "RandomForest" => {
                    let [_tok, nt] = exact::<2>(forest_inner, "RandomForest")?;
                    let mut params = ParamMap::new();
                    params.insert("nt".into(), ParamValue::Int(int_value(nt)?));
                    params.insert("nf".into(), ParamValue::Int(nf));
                    params.insert("md".into(), ParamValue::Int(md));
                    Ok(base(SlcBaseId::Rf, params))
                }
                rt @ DerivationTree::Choice { .. } => {
                    let rt_children = choice_named(rt, "RandomTree")?;
                    let [mw, nfbgt] = exact::<2>(rt_children, "RandomTree")?;
                    let mut params = ParamMap::new();
                    params.insert("mw".into(), ParamValue::Int(int_value(mw)?));
                    params.insert("nf".into(), ParamValue::Int(nf));
                    params.insert("md".into(), ParamValue::Int(md));
                    params.insert(
                        "nfbgt".into(),
                        ParamValue::Int(int_token_choice(nfbgt, "nfbgt")?),
                    );
                    Ok(base(SlcBaseId::RandomTree, params))
                }
                other => err(format!("unexpected forest head {other:?}")),
            }
        }
        rep @ DerivationTree::Choice { .. } => {
            let rep_children = choice_named(rep, "REPTree")?;
            let [mw, up] = exact::<2>(rep_children, "REPTree")?;
            let mut params = ParamMap::new();
            params.insert("mw".into(), ParamValue::Int(int_value(mw)?));
            params.insert("md".into(), ParamValue::Int(md));
            if optional_child(up)?.is_some() {
                params.insert("up".into(), ParamValue::Bool(true));
            }
            Ok(base(SlcBaseId::RepTree, params))
        }
        other => err(format!("unexpected tree group head {other:?}")),
    }
}

fn lower_c45(node: &DerivationTree) -> Result<SlcBase> {
    let children = choice_named(node, "C4.5")?;
    let [basics, pruning] = exact::<2>(children, "C4.5")?;
    let basics_children = choice_named(basics, "C4.5-Basics")?;
    let [mno, ct, bs, umc, ul] = exact::<5>(basics_children, "C4.5-Basics")?;
    let mut params = ParamMap::new();
    params.insert("mno".into(), ParamValue::Int(int_value(mno)?));
    for (name, node) in [("ct", ct), ("bs", bs), ("umc", umc), ("ul", ul)] {
        if optional_child(node)?.is_some() {
            params.insert(name.into(), ParamValue::Bool(true));
        }
    }
    let (_, inner) = as_group(pruning)?;
    match &inner[0] {
        DerivationTree::Token(t) if t == "u" => {
            params.insert("u".into(), ParamValue::Bool(true));
        }
        // (<cf> [sr]) as a nested group
        DerivationTree::Group { children: pruned, .. } => {
            let [cf, sr] = exact::<2>(pruned, "C4.5 pruned")?;
            params.insert("cf".into(), ParamValue::Real(real_value(cf)?));
            if optional_child(sr)?.is_some() {
                params.insert("sr".into(), ParamValue::Bool(true));
            }
        }
        other => return err(format!("unexpected C4.5 pruning head {other:?}")),
    }
    Ok(base(SlcBaseId::C45, params))
}

fn lower_rules(children: &[DerivationTree]) -> Result<SlcBase> {
    match &children[0] {
        DerivationTree::Token(t) if t == "ZeroR" => Ok(base(SlcBaseId::ZeroR, ParamMap::new())),
        DerivationTree::Token(t) if t == "OneR" => {
            let [_tok, mbs] = exact::<2>(children, "OneR")?;
            let mut params = ParamMap::new();
            params.insert("mbs".into(), ParamValue::Int(int_value(mbs)?));
            Ok(base(SlcBaseId::OneR, params))
        }
        inner @ DerivationTree::Choice { .. } => match prod_name(inner)? {
            "DT" => lower_dt(inner),
            "JRip" => lower_jrip(inner),
            "PART" => lower_part(inner),
            other => err(format!("unexpected rules inner <{other}>")),
        },
        other => err(format!("unexpected RULES head {other:?}")),
    }
}

fn lower_dt(node: &DerivationTree) -> Result<SlcBase> {
    let children = choice_named(node, "DT")?;
    let [em, uibk, sm, crv] = exact::<4>(children, "DT")?;
    let mut params = ParamMap::new();
    params.insert("em".into(), ParamValue::Cat(cat_choice(em, "em")?));
    if optional_child(uibk)?.is_some() {
        params.insert("uibk".into(), ParamValue::Bool(true));
    }
    params.insert(
        "sm".into(),
        ParamValue::Cat(lower_search_method(sm)?.name().to_string()),
    );
    params.insert("crv".into(), ParamValue::Int(int_token_choice(crv, "crv")?));
    Ok(base(SlcBaseId::Dt, params))
}

fn lower_jrip(node: &DerivationTree) -> Result<SlcBase> {
    let children = choice_named(node, "JRip")?;
    let [mtw, cer, up, o] = exact::<4>(children, "JRip")?;
    let mut params = ParamMap::new();
    params.insert("mtw".into(), ParamValue::Real(real_value(mtw)?));
    if optional_child(cer)?.is_some() {
        params.insert("cer".into(), ParamValue::Bool(true));
    }
    if optional_child(up)?.is_some() {
        params.insert("up".into(), ParamValue::Bool(true));
    }
    params.insert("o".into(), ParamValue::Int(int_value(o)?));
    Ok(base(SlcBaseId::Jrip, params))
}

fn lower_part(node: &DerivationTree) -> Result<SlcBase> {
    let children = choice_named(node, "PART")?;
    let [basics, pruning] = exact::<2>(children, "PART")?;
    let basics_children = choice_named(basics, "PART-BASICS")?;
    let [mno, bs] = exact::<2>(basics_children, "PART-BASICS")?;
    let mut params = ParamMap::new();
    params.insert("mno".into(), ParamValue::Int(int_value(mno)?));
    if optional_child(bs)?.is_some() {
        params.insert("bs".into(), ParamValue::Bool(true));
    }
    let (_, inner) = as_group(pruning)?;
    match token(&inner[0])? {
        "rep" => {
            let [_rep, nr] = exact::<2>(inner, "PART rep")?;
            params.insert("rep".into(), ParamValue::Bool(true));
            params.insert("nr".into(), ParamValue::Int(int_value(nr)?));
        }
        "ebp" => {}
        other => return err(format!("unexpected PART token {other}")),
    }
    Ok(base(SlcBaseId::Part, params))
}

fn lower_knn(node: &DerivationTree) -> Result<SlcBase> {
    let children = choice_named(node, "KNN")?;
    let [k, loo, dw] = exact::<3>(children, "KNN")?;
    let mut params = ParamMap::new();
    params.insert("k".into(), ParamValue::Int(int_value(k)?));
    if optional_child(loo)?.is_some() {
        params.insert("loo".into(), ParamValue::Bool(true));
    }
    if let Some(dw_node) = optional_child(dw)? {
        params.insert("dw".into(), ParamValue::Cat(cat_choice(dw_node, "dw")?));
    }
    Ok(base(SlcBaseId::Knn, params))
}

fn lower_kstar(node: &DerivationTree) -> Result<SlcBase> {
    let children = choice_named(node, "K*")?;
    let [gb, eab, mm] = exact::<3>(children, "K*")?;
    let mut params = ParamMap::new();
    params.insert("gb".into(), ParamValue::Int(int_value(gb)?));
    if optional_child(eab)?.is_some() {
        params.insert("eab".into(), ParamValue::Bool(true));
    }
    params.insert("mm".into(), ParamValue::Cat(cat_choice(mm, "mm")?));
    Ok(base(SlcBaseId::KStar, params))
}

fn lower_functions(children: &[DerivationTree]) -> Result<SlcBase> {
    match &children[0] {
        inner @ DerivationTree::Choice { .. } => match prod_name(inner)? {
            "VotedPerceptron" => lower_vp(inner),
            "MultiLayerPerc" => lower_mlp(inner),
            "SeqMinOptimization" => lower_smo(inner),
            other => err(format!("unexpected functions inner <{other}>")),
        },
        DerivationTree::Group { children: head, .. } => {
            // (<StocGradDescent> | LogisticRegression) <r>
            let [_, r] = exact::<2>(children, "SGD/LR")?;
            let ridge = real_value(r)?;
            match one(head, "SGD/LR group")? {
                sgd @ DerivationTree::Choice { .. } => {
                    let mut b = lower_sgd(sgd)?;
                    b.params.insert("r".into(), ParamValue::Real(ridge));
                    Ok(b)
                }
                DerivationTree::Token(t) if t == "LogisticRegression" => {
                    let mut params = ParamMap::new();
                    params.insert("r".into(), ParamValue::Real(ridge));
                    Ok(base(SlcBaseId::Lr, params))
                }
                other => err(format!("unexpected SGD/LR head {other:?}")),
            }
        }
        other => err(format!("unexpected FUNCTIONS head {other:?}")),
    }
}

fn lower_functions_partial(children: &[DerivationTree]) -> Result<SlcBase> {
    match children.len() {
        1 => {
            let inner = &children[0];
            match prod_name(inner)? {
                "MultiLayerPerc" => lower_mlp(inner),
                "SeqMinOptimization" => lower_smo(inner),
                other => err(format!("unexpected functions-partial inner <{other}>")),
            }
        }
        3 => {
            // <SimpleLogistic> <uaic> <wtb_activate>
            let [sl, uaic, wtb] = exact::<3>(children, "FUNCTIONS-PARTIAL SL")?;
            let mut params = ParamMap::new();
            let sl_children = choice_named(sl, "SimpleLogistic")?;
            let [_tok, ucv] = exact::<2>(sl_children, "SimpleLogistic")?;
            if optional_child(ucv)?.is_some() {
                params.insert("ucv".into(), ParamValue::Bool(true));
            }
            let uaic_children = choice_named(uaic, "uaic")?;
            if optional_child(one(uaic_children, "uaic")?)?.is_some() {
                params.insert("uaic".into(), ParamValue::Bool(true));
            }
            let wtb_children = choice_named(wtb, "wtb_activate")?;
            params.insert(
                "wtb".into(),
                ParamValue::Real(real_value(one(wtb_children, "wtb_activate")?)?),
            );
            Ok(base(SlcBaseId::Sl, params))
        }
        n => err(format!("FUNCTIONS-PARTIAL with {n} children")),
    }
}

fn lower_vp(node: &DerivationTree) -> Result<SlcBase> {
    let children = choice_named(node, "VotedPerceptron")?;
    let [i, mk, e] = exact::<3>(children, "VotedPerceptron")?;
    let mut params = ParamMap::new();
    params.insert("i".into(), ParamValue::Int(int_value(i)?));
    params.insert("mk".into(), ParamValue::Int(int_value(mk)?));
    params.insert("e".into(), ParamValue::Real(real_value(e)?));
    Ok(base(SlcBaseId::Vp, params))
}

fn lower_mlp(node: &DerivationTree) -> Result<SlcBase> {
    let children = choice_named(node, "MultiLayerPerc")?;
    let [lr, m, nhn, n2b, r, d] = exact::<6>(children, "MultiLayerPerc")?;
    let mut params = ParamMap::new();
    params.insert("lr".into(), ParamValue::Real(real_value(lr)?));
    params.insert("m".into(), ParamValue::Real(real_value(m)?));
    params.insert("nhn".into(), ParamValue::Cat(cat_choice(nhn, "nhn")?));
    for (name, node) in [("n2b", n2b), ("r", r), ("d", d)] {
        if optional_child(node)?.is_some() {
            params.insert(name.into(), ParamValue::Bool(true));
        }
    }
    Ok(base(SlcBaseId::Mlp, params))
}

fn lower_sgd(node: &DerivationTree) -> Result<SlcBase> {
    let children = choice_named(node, "StocGradDescent")?;
    let [lf, lr, nn, nrmv] = exact::<4>(children, "StocGradDescent")?;
    let mut params = ParamMap::new();
    params.insert("lf".into(), ParamValue::Int(int_token_choice(lf, "lf")?));
    params.insert("lr".into(), ParamValue::Real(real_value(lr)?));
    if optional_child(nn)?.is_some() {
        params.insert("nn".into(), ParamValue::Bool(true));
    }
    if optional_child(nrmv)?.is_some() {
        params.insert("nrmv".into(), ParamValue::Bool(true));
    }
    Ok(base(SlcBaseId::Sgd, params))
}

fn lower_smo(node: &DerivationTree) -> Result<SlcBase> {
    let children = choice_named(node, "SeqMinOptimization")?;
    let [c, ft, bcm, kernel] = exact::<4>(children, "SeqMinOptimization")?;
    let mut params = ParamMap::new();
    params.insert("c".into(), ParamValue::Real(real_value(c)?));
    params.insert("ft".into(), ParamValue::Int(int_token_choice(ft, "ft")?));
    if optional_child(bcm)?.is_some() {
        params.insert("bcm".into(), ParamValue::Bool(true));
    }
    params.insert("kernel".into(), ParamValue::Kernel(lower_kernel(kernel)?));
    Ok(base(SlcBaseId::Smo, params))
}

fn lower_kernel(node: &DerivationTree) -> Result<KernelValue> {
    let children = choice_named(node, "kernel")?;
    let mut params = ParamMap::new();
    match &children[0] {
        DerivationTree::Group { children: which, .. } => {
            // (NormPolyKernel | PolyKernel) <exp> [ulo]
            let [_, exp, ulo] = exact::<3>(children, "poly kernel")?;
            let kind = match token(one(which, "poly kernel group")?)? {
                "NormPolyKernel" => KernelKind::NormPolyKernel,
                "PolyKernel" => KernelKind::PolyKernel,
                other => return err(format!("unexpected kernel token {other}")),
            };
            params.insert("exp".into(), ParamValue::Real(real_value(exp)?));
            if optional_child(ulo)?.is_some() {
                params.insert("ulo".into(), ParamValue::Bool(true));
            }
            Ok(KernelValue { kind, params })
        }
        DerivationTree::Token(t) if t == "Puk" => {
            let [_tok, om, sig] = exact::<3>(children, "Puk")?;
            params.insert("om".into(), ParamValue::Real(real_value(om)?));
            params.insert("sig".into(), ParamValue::Real(real_value(sig)?));
            Ok(KernelValue {
                kind: KernelKind::Puk,
                params,
            })
        }
        DerivationTree::Token(t) if t == "RBF" => {
            let [_tok, g] = exact::<2>(children, "RBF")?;
            params.insert("g".into(), ParamValue::Real(real_value(g)?));
            Ok(KernelValue {
                kind: KernelKind::Rbf,
                params,
            })
        }
        other => err(format!("unexpected kernel head {other:?}")),
    }
}

fn lower_bayes(children: &[DerivationTree]) -> Result<SlcBase> {
    match &children[0] {
        DerivationTree::Token(t) if t == "NaiveBayes" => {
            let [_tok, opts] = exact::<2>(children, "NaiveBayes")?;
            let mut params = ParamMap::new();
            if let Some(choice) = optional_child(opts)? {
                let inner = choice_named(choice, "NB-Parameters")?;
                match token(one(inner, "NB-Parameters")?)? {
                    "uke" => params.insert("uke".into(), ParamValue::Bool(true)),
                    "usd" => params.insert("usd".into(), ParamValue::Bool(true)),
                    other => return err(format!("unexpected NB token {other}")),
                };
            }
            Ok(base(SlcBaseId::Nb, params))
        }
        DerivationTree::Token(t) if t == "NaiveBayesMultinomial" => {
            Ok(base(SlcBaseId::Nbm, ParamMap::new()))
        }
        bnc @ DerivationTree::Choice { .. } => {
            let inner = choice_named(bnc, "BayesianNetworkClassifiers")?;
            let mut params = ParamMap::new();
            params.insert(
                "sm".into(),
                ParamValue::Cat(token(one(inner, "BNC")?)?.to_string()),
            );
            Ok(base(SlcBaseId::Bnc, params))
        }
        other => err(format!("unexpected BAYES head {other:?}")),
    }
}

fn lower_others(children: &[DerivationTree]) -> Result<SlcBase> {
    let [head, uaic, wtb] = exact::<3>(children, "OTHERS")?;
    let (_, inner) = as_group(head)?;
    let mut b = match &inner[0] {
        DerivationTree::Token(t) if t == "SimpleLogistic" => {
            let [_tok, ucv] = exact::<2>(inner, "SimpleLogistic")?;
            let mut params = ParamMap::new();
            if optional_child(ucv)?.is_some() {
                params.insert("ucv".into(), ParamValue::Bool(true));
            }
            base(SlcBaseId::Sl, params)
        }
        lmt @ DerivationTree::Choice { .. } => {
            let lmt_children = choice_named(lmt, "LogisticModelTrees")?;
            let [mno, cn, sor, fr, eop] = exact::<5>(lmt_children, "LogisticModelTrees")?;
            let mut params = ParamMap::new();
            params.insert("mno".into(), ParamValue::Int(int_value(mno)?));
            for (name, node) in [("cn", cn), ("sor", sor), ("fr", fr), ("eop", eop)] {
                if optional_child(node)?.is_some() {
                    params.insert(name.into(), ParamValue::Bool(true));
                }
            }
            base(SlcBaseId::Lmt, params)
        }
        other => return err(format!("unexpected OTHERS head {other:?}")),
    };
    if optional_child(uaic)?.is_some() {
        b.params.insert("uaic".into(), ParamValue::Bool(true));
    }
    if let Some(wtb_node) = optional_child(wtb)? {
        b.params
            .insert("wtb".into(), ParamValue::Real(real_value(wtb_node)?));
    }
    Ok(b)
}

fn lower_alg_random(node: &DerivationTree) -> Result<SlcBase> {
    let children = choice_named(node, "ALG-RANDOM-TYPE")?;
    match &children[0] {
        DerivationTree::Group { .. } => {
            let [head, md] = exact::<2>(children, "ALG-RANDOM-TYPE")?;
            lower_tree_depth_group(head, int_value(md)?)
        }
        inner @ DerivationTree::Choice { .. } => match prod_name(inner)? {
            "StocGradDescent" => {
                let [sgd, r] = exact::<2>(children, "ALG-RANDOM-TYPE SGD")?;
                let mut b = lower_sgd(sgd)?;
                b.params.insert("r".into(), ParamValue::Real(real_value(r)?));
                Ok(b)
            }
            "MultiLayerPerc" => lower_mlp(inner),
            other => err(format!("unexpected random base <{other}>")),
        },
        other => err(format!("unexpected ALG-RANDOM-TYPE head {other:?}")),
    }
}

fn base(id: SlcBaseId, params: ParamMap) -> SlcBase {
    SlcBase {
        asc: None,
        id,
        params,
    }
}

// --- node destructuring helpers ----------------------------------------------

fn as_choice(node: &DerivationTree) -> Result<(&str, usize, &[DerivationTree])> {
    match node {
        DerivationTree::Choice {
            nonterminal,
            alternative,
            children,
        } => Ok((nonterminal, *alternative, children)),
        other => err(format!("expected a choice node, got {other:?}")),
    }
}

fn prod_name(node: &DerivationTree) -> Result<&str> {
    Ok(as_choice(node)?.0)
}

fn choice_named<'t>(node: &'t DerivationTree, expect: &str) -> Result<&'t [DerivationTree]> {
    let (name, _, children) = as_choice(node)?;
    if name == expect {
        Ok(children)
    } else {
        err(format!("expected <{expect}>, got <{name}>"))
    }
}

fn as_group(node: &DerivationTree) -> Result<(usize, &[DerivationTree])> {
    match node {
        DerivationTree::Group {
            alternative,
            children,
        } => Ok((*alternative, children)),
        other => err(format!("expected a group node, got {other:?}")),
    }
}

/// Content of an included optional, `None` when omitted.
fn optional_children(node: &DerivationTree) -> Result<Option<&[DerivationTree]>> {
    match node {
        DerivationTree::Optional {
            included: true,
            children,
            ..
        } => Ok(Some(children)),
        DerivationTree::Optional {
            included: false, ..
        } => Ok(None),
        other => err(format!("expected an optional node, got {other:?}")),
    }
}

/// Single child of an included optional.
fn optional_child(node: &DerivationTree) -> Result<Option<&DerivationTree>> {
    Ok(optional_children(node)?.map(|c| &c[0]))
}

fn token(node: &DerivationTree) -> Result<&str> {
    match node {
        DerivationTree::Token(t) => Ok(t),
        other => err(format!("expected a token, got {other:?}")),
    }
}

fn int_leaf(node: &DerivationTree) -> Result<i64> {
    match node {
        DerivationTree::IntLeaf { value, .. } => Ok(*value),
        other => err(format!("expected an integer leaf, got {other:?}")),
    }
}

fn real_leaf(node: &DerivationTree) -> Result<f64> {
    match node {
        DerivationTree::RealLeaf { value, .. } => Ok(*value),
        other => err(format!("expected a real leaf, got {other:?}")),
    }
}

/// Integer carried by a wrapper nonterminal such as `<pv>` or `<ne>`.
fn int_value(node: &DerivationTree) -> Result<i64> {
    let (_, _, children) = as_choice(node)?;
    int_leaf(one(children, "int leaf")?)
}

/// Real carried by a wrapper nonterminal such as `<cf>`.
fn real_value(node: &DerivationTree) -> Result<f64> {
    let (_, _, children) = as_choice(node)?;
    real_leaf(one(children, "real leaf")?)
}

/// Integer encoded as a terminal alternative (`<crv> ::= 1 | 2 | 3 | 4`).
fn int_token_choice(node: &DerivationTree, expect: &str) -> Result<i64> {
    let children = choice_named(node, expect)?;
    let t = token(one(children, expect)?)?;
    t.parse()
        .map_err(|_| LowerError::UnknownShape(format!("token `{t}` is not an integer")))
}

/// Categorical token carried by a single-token alternative production.
fn cat_choice(node: &DerivationTree, expect: &str) -> Result<String> {
    let children = choice_named(node, expect)?;
    Ok(token(one(children, expect)?)?.to_string())
}

fn one<'t>(children: &'t [DerivationTree], what: &str) -> Result<&'t DerivationTree> {
    if children.len() == 1 {
        Ok(&children[0])
    } else {
        err(format!("{what}: expected one child, got {}", children.len()))
    }
}

fn exact<'t, const N: usize>(
    children: &'t [DerivationTree],
    what: &str,
) -> Result<[&'t DerivationTree; N]> {
    if children.len() != N {
        return err(format!(
            "{what}: expected {N} children, got {}",
            children.len()
        ));
    }
    let mut out = [&children[0]; N];
    for (i, c) in children.iter().enumerate() {
        out[i] = c;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::DatasetContext;
    use crate::catalog::large_grammar;
    use crate::sampling::{mix_seed, mlc_headline, sample_tree, slc_headline, Sampler, SamplingMode};
    use crate::tiering::{tier_grammar, Tier};

    fn ctx(l: u32, a: u32) -> DatasetContext {
        DatasetContext::new(l, a).unwrap()
    }

    #[test]
    fn lowering_never_fails_on_sampled_trees() {
        for tier in Tier::ALL {
            let g = tier_grammar(tier);
            for mode in [SamplingMode::Naive, SamplingMode::UniformMarginal] {
                let sampler = Sampler::new(&g, mode);
                for i in 0..800 {
                    let tree = sampler.sample(ctx(6, 20), mix_seed(31, i));
                    lower(&tree).unwrap_or_else(|e| panic!("{tier}/{mode} sample {i}: {e}\n{tree}"));
                }
            }
        }
    }

    #[test]
    fn headlines_survive_lowering() {
        let g = large_grammar();
        let sampler = Sampler::new(g, SamplingMode::UniformMarginal);
        for i in 0..2000 {
            let tree = sampler.sample(ctx(6, 20), mix_seed(41, i));
            let config = lower(&tree).unwrap();
            assert_eq!(config.mlc_headline(), mlc_headline(&tree).unwrap());
            assert_eq!(config.slc_headline(), slc_headline(&tree));
        }
    }

    #[test]
    fn trellis_width_zero_forces_density_one() {
        let g = large_grammar();
        let sampler = Sampler::new(g, SamplingMode::Naive);
        let mut saw_chain_width = false;
        for i in 0..30_000 {
            let tree = sampler.sample(ctx(16, 10), mix_seed(53, i));
            let config = lower(&tree).unwrap();
            let core_params = match config.core() {
                MlcCore::Pt { id, params, .. } if matches!(id, PtId::Ct | PtId::Cdt) => params,
                _ => continue,
            };
            let w = core_params["w"].as_int().unwrap();
            let d = core_params["d"].as_int().unwrap();
            if w == 0 {
                saw_chain_width = true;
                assert_eq!(d, 1);
            } else {
                assert_eq!(w, -1);
                assert!((1..=5).contains(&d), "d = {d} for L = 16");
            }
        }
        assert!(saw_chain_width);
    }

    #[test]
    fn payoff_tokens_become_display_names() {
        let g = large_grammar();
        let sampler = Sampler::new(g, SamplingMode::Naive);
        let mut seen = 0;
        for i in 0..20_000 {
            let tree = sampler.sample(ctx(6, 20), mix_seed(61, i));
            let config = lower(&tree).unwrap();
            if let MlcCore::Pt { params, .. } = config.core() {
                if let Some(pof) = params.get("pof") {
                    let name = pof.as_cat().unwrap();
                    assert!(!name.contains('_'), "raw token leaked: {name}");
                    assert!(
                        crate::config::registry::PAYOFF_FUNCTIONS.contains(&name),
                        "unknown payoff {name}"
                    );
                    seen += 1;
                }
            }
        }
        assert!(seen > 100);
    }

    #[test]
    fn foreign_grammar_is_rejected() {
        let foreign = crate::grammar::parse_grammar("<Start> ::= x | y").unwrap();
        let tree = sample_tree(&foreign, ctx(4, 4), SamplingMode::Naive, 1);
        assert!(matches!(lower(&tree), Err(LowerError::UnknownShape(_))));
    }

    #[test]
    fn meta_wrappers_carry_their_inner_core() {
        let g = large_grammar();
        let sampler = Sampler::new(g, SamplingMode::UniformMarginal);
        let mut metas = 0;
        for i in 0..3000 {
            let tree = sampler.sample(ctx(6, 20), mix_seed(71, i));
            let config = lower(&tree).unwrap();
            if let MlcLayer::Meta { id, inner, .. } = &config.mlc {
                metas += 1;
                assert_eq!(config.mlc_headline(), id.as_alg());
                match inner {
                    MlcCore::Pt { .. } | MlcCore::Aa { .. } => {}
                }
            }
        }
        assert!(metas > 300, "only {metas} meta samples");
    }
}
