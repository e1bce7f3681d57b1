//! Dataset-dependent bound expressions used in numeric grammar leaves.
//!
//! Bounds such as `SQRT(L) + 1`, `L/2` or `min(2L, 100)` are evaluated against
//! a [`DatasetContext`] carrying the label count `L` and attribute count
//! `n_attributes`. Integer evaluation floors at the `SQRT` and division sites,
//! which is the convention the trellis and label-subset bounds rely on.

use std::fmt;

/// Dataset-dependent quantities that parametrize numeric bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetContext {
    /// Number of labels (`L`); at least 2.
    pub labels: u32,
    /// Number of attributes (`n_attributes`); at least 1.
    pub attributes: u32,
}

impl DatasetContext {
    pub fn new(labels: u32, attributes: u32) -> Result<Self, ContextError> {
        if labels < 2 {
            return Err(ContextError::Labels(labels));
        }
        if attributes < 1 {
            return Err(ContextError::Attributes(attributes));
        }
        Ok(Self { labels, attributes })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ContextError {
    #[error("label count must be at least 2, got {0}")]
    Labels(u32),
    #[error("attribute count must be at least 1, got {0}")]
    Attributes(u32),
}

/// Expression tree over integer/real literals, the context variables `L` and
/// `n_attributes`, arithmetic operators and the `SQRT`/`min` functions.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundExpr {
    Int(i64),
    Real(f64),
    Labels,
    Attributes,
    Add(Box<BoundExpr>, Box<BoundExpr>),
    Sub(Box<BoundExpr>, Box<BoundExpr>),
    Mul(Box<BoundExpr>, Box<BoundExpr>),
    Div(Box<BoundExpr>, Box<BoundExpr>),
    Sqrt(Box<BoundExpr>),
    Min(Box<BoundExpr>, Box<BoundExpr>),
}

impl BoundExpr {
    /// Real-valued evaluation; total for `L >= 2`, `A >= 1`.
    pub fn eval_real(&self, ctx: DatasetContext) -> f64 {
        match self {
            BoundExpr::Int(v) => *v as f64,
            BoundExpr::Real(v) => *v,
            BoundExpr::Labels => ctx.labels as f64,
            BoundExpr::Attributes => ctx.attributes as f64,
            BoundExpr::Add(a, b) => a.eval_real(ctx) + b.eval_real(ctx),
            BoundExpr::Sub(a, b) => a.eval_real(ctx) - b.eval_real(ctx),
            BoundExpr::Mul(a, b) => a.eval_real(ctx) * b.eval_real(ctx),
            BoundExpr::Div(a, b) => a.eval_real(ctx) / b.eval_real(ctx),
            BoundExpr::Sqrt(a) => a.eval_real(ctx).sqrt(),
            BoundExpr::Min(a, b) => a.eval_real(ctx).min(b.eval_real(ctx)),
        }
    }

    /// Integer evaluation: `SQRT` floors its result and division floors the
    /// quotient, so `SQRT(L) + 1` evaluates to `floor(sqrt(L)) + 1` and `L/2`
    /// to `floor(L/2)`. Real literals floor as a last resort.
    pub fn eval_int(&self, ctx: DatasetContext) -> i64 {
        match self {
            BoundExpr::Int(v) => *v,
            BoundExpr::Real(v) => v.floor() as i64,
            BoundExpr::Labels => ctx.labels as i64,
            BoundExpr::Attributes => ctx.attributes as i64,
            BoundExpr::Add(a, b) => a.eval_int(ctx) + b.eval_int(ctx),
            BoundExpr::Sub(a, b) => a.eval_int(ctx) - b.eval_int(ctx),
            BoundExpr::Mul(a, b) => a.eval_int(ctx) * b.eval_int(ctx),
            BoundExpr::Div(a, b) => {
                let (n, d) = (a.eval_int(ctx), b.eval_int(ctx));
                n.div_euclid(d)
            }
            BoundExpr::Sqrt(a) => (a.eval_real(ctx).sqrt().floor()) as i64,
            BoundExpr::Min(a, b) => a.eval_int(ctx).min(b.eval_int(ctx)),
        }
    }

    /// True when the expression never reads the dataset context.
    pub fn is_constant(&self) -> bool {
        match self {
            BoundExpr::Int(_) | BoundExpr::Real(_) => true,
            BoundExpr::Labels | BoundExpr::Attributes => false,
            BoundExpr::Add(a, b)
            | BoundExpr::Sub(a, b)
            | BoundExpr::Mul(a, b)
            | BoundExpr::Div(a, b)
            | BoundExpr::Min(a, b) => a.is_constant() && b.is_constant(),
            BoundExpr::Sqrt(a) => a.is_constant(),
        }
    }
}

impl fmt::Display for BoundExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Canonical form: explicit operators, single spaces around + - * /.
        fn prec(e: &BoundExpr) -> u8 {
            match e {
                BoundExpr::Add(..) | BoundExpr::Sub(..) => 1,
                BoundExpr::Mul(..) | BoundExpr::Div(..) => 2,
                _ => 3,
            }
        }
        fn write_child(
            f: &mut fmt::Formatter<'_>,
            child: &BoundExpr,
            parent_prec: u8,
        ) -> fmt::Result {
            if prec(child) < parent_prec {
                write!(f, "({child})")
            } else {
                write!(f, "{child}")
            }
        }
        match self {
            BoundExpr::Int(v) => write!(f, "{v}"),
            BoundExpr::Real(v) => {
                if v.fract() == 0.0 && v.abs() < 1e15 {
                    write!(f, "{v:.1}")
                } else {
                    write!(f, "{v}")
                }
            }
            BoundExpr::Labels => write!(f, "L"),
            BoundExpr::Attributes => write!(f, "n_attributes"),
            BoundExpr::Add(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " + ")?;
                write_child(f, b, 2)
            }
            BoundExpr::Sub(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " - ")?;
                write_child(f, b, 2)
            }
            BoundExpr::Mul(a, b) => {
                write_child(f, a, 2)?;
                write!(f, " * ")?;
                write_child(f, b, 3)
            }
            BoundExpr::Div(a, b) => {
                write_child(f, a, 2)?;
                write!(f, " / ")?;
                write_child(f, b, 3)
            }
            BoundExpr::Sqrt(a) => write!(f, "SQRT({a})"),
            BoundExpr::Min(a, b) => write!(f, "min({a}, {b})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(labels: u32, attributes: u32) -> DatasetContext {
        DatasetContext::new(labels, attributes).unwrap()
    }

    #[test]
    fn sqrt_plus_one_floors_the_root() {
        let e = BoundExpr::Add(
            Box::new(BoundExpr::Sqrt(Box::new(BoundExpr::Labels))),
            Box::new(BoundExpr::Int(1)),
        );
        assert_eq!(e.eval_int(ctx(16, 10)), 5);
        assert_eq!(e.eval_int(ctx(10, 10)), 4);
        assert_eq!(e.eval_int(ctx(2, 10)), 2);
    }

    #[test]
    fn half_labels_floors() {
        let e = BoundExpr::Div(Box::new(BoundExpr::Labels), Box::new(BoundExpr::Int(2)));
        assert_eq!(e.eval_int(ctx(10, 1)), 5);
        assert_eq!(e.eval_int(ctx(7, 1)), 3);
        assert_eq!(e.eval_int(ctx(2, 1)), 1);
    }

    #[test]
    fn min_caps_twice_labels() {
        let e = BoundExpr::Min(
            Box::new(BoundExpr::Mul(
                Box::new(BoundExpr::Int(2)),
                Box::new(BoundExpr::Labels),
            )),
            Box::new(BoundExpr::Int(100)),
        );
        assert_eq!(e.eval_int(ctx(60, 1)), 100);
        assert_eq!(e.eval_int(ctx(10, 1)), 20);
    }

    #[test]
    fn attribute_fraction_is_real() {
        let e = BoundExpr::Mul(
            Box::new(BoundExpr::Real(0.2)),
            Box::new(BoundExpr::Attributes),
        );
        assert_eq!(e.eval_real(ctx(2, 50)), 10.0);
    }

    #[test]
    fn context_rejects_degenerate_dimensions() {
        assert!(DatasetContext::new(1, 10).is_err());
        assert!(DatasetContext::new(2, 0).is_err());
    }

    #[test]
    fn display_round_trips_shape() {
        let e = BoundExpr::Min(
            Box::new(BoundExpr::Mul(
                Box::new(BoundExpr::Int(2)),
                Box::new(BoundExpr::Labels),
            )),
            Box::new(BoundExpr::Int(100)),
        );
        assert_eq!(e.to_string(), "min(2 * L, 100)");
        assert_eq!(BoundExpr::Real(1.0).to_string(), "1.0");
        assert_eq!(BoundExpr::Real(0.2).to_string(), "0.2");
    }
}
