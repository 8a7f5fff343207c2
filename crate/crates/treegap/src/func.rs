//! Real-valued functions on tree vertices and the admissible test-function
//! families.
//!
//! `+inf` is a first-class value in exactly two places: ratio functions
//! carry it at the root (and at the root's son, where the eigenfunction
//! ratio divides by zero), and the single-summation operator returns it on
//! flat edges. `NaN` is never a value.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tree::RootedTree;

/// A function defined on every vertex of a tree.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFunction {
    values: Vec<f64>,
}

impl VertexFunction {
    pub fn new(values: Vec<f64>) -> Self {
        VertexFunction { values }
    }

    /// The function that is 0 at the root and 1 everywhere else.
    pub fn constant_one(vertex_count: usize) -> Self {
        let mut values = vec![1.0; vertex_count];
        values[0] = 0.0;
        VertexFunction { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, v: usize) -> f64 {
        self.values[v]
    }

    pub fn set(&mut self, v: usize, value: f64) {
        self.values[v] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest absolute value over the non-root vertices.
    pub fn sup_norm(&self) -> f64 {
        self.values[1..].iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Pointwise rescaling; the root value is left untouched.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut values = self.values.clone();
        for v in values.iter_mut().skip(1) {
            *v *= factor;
        }
        VertexFunction { values }
    }
}

/// The six test-function families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Strictly increasing along every edge, zero at the root.
    FI,
    /// Strictly positive off the root, zero at the root.
    FII,
    /// Edge ratios: above 1 everywhere, infinite at the root.
    W,
    /// Increasing up to a cutoff layer, flat beyond it.
    FIMod,
    /// Positive, flat beyond a cutoff layer.
    FIIMod,
    /// Ratios above 1 up to a cutoff layer with a positivity margin, 1 beyond.
    WMod,
}

impl Family {
    pub fn is_modified(self) -> bool {
        matches!(self, Family::FIMod | Family::FIIMod | Family::WMod)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::FI => "F_I",
            Family::FII => "F_II",
            Family::W => "W",
            Family::FIMod => "F_I_mod",
            Family::FIIMod => "F_II_mod",
            Family::WMod => "W_mod",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "f_i" => Ok(Family::FI),
            "f_ii" => Ok(Family::FII),
            "w" => Ok(Family::W),
            "f_i_mod" => Ok(Family::FIMod),
            "f_ii_mod" => Ok(Family::FIIMod),
            "w_mod" => Ok(Family::WMod),
            other => Err(Error::DegenerateParams(format!(
                "unknown family {other:?}; expected one of F_I, F_II, W, F_I_mod, F_II_mod, W_mod"
            ))),
        }
    }
}

/// A family together with the cutoff layer required by the modified ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DomainTag {
    pub family: Family,
    pub cutoff: Option<usize>,
}

impl DomainTag {
    pub fn base(family: Family) -> Result<Self> {
        if family.is_modified() {
            return Err(Error::DegenerateParams(format!(
                "family {family} requires a cutoff layer"
            )));
        }
        Ok(DomainTag { family, cutoff: None })
    }

    pub fn modified(family: Family, cutoff: usize) -> Result<Self> {
        if !family.is_modified() {
            return Err(Error::DegenerateParams(format!(
                "family {family} does not take a cutoff layer"
            )));
        }
        Ok(DomainTag { family, cutoff: Some(cutoff) })
    }
}

impl fmt::Display for DomainTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.cutoff {
            Some(n) => write!(f, "{}[{}]", self.family, n),
            None => write!(f, "{}", self.family),
        }
    }
}

/// Outcome of a membership test: either a pass or the first violated
/// condition with the vertex it failed at.
#[derive(Debug, Clone)]
pub struct DomainCheck {
    pub passed: bool,
    pub violation: Option<Violation>,
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub vertex: usize,
    pub condition: String,
}

impl DomainCheck {
    fn pass() -> Self {
        DomainCheck { passed: true, violation: None }
    }

    fn fail(vertex: usize, condition: impl Into<String>) -> Self {
        DomainCheck {
            passed: false,
            violation: Some(Violation { vertex, condition: condition.into() }),
        }
    }

    /// Promote a failed check to an error, naming the family.
    pub fn require(self, family: Family) -> Result<()> {
        match self.violation {
            None => Ok(()),
            Some(v) => Err(Error::DomainViolation {
                family: family.name().to_string(),
                vertex: v.vertex,
                condition: v.condition,
            }),
        }
    }
}

/// Test membership of `f` in the tagged family. Strict inequalities are
/// checked exactly, with no epsilon.
pub fn check_domain(tree: &RootedTree, f: &VertexFunction, tag: &DomainTag) -> DomainCheck {
    let n = tree.vertex_count();
    if f.len() != n {
        return DomainCheck::fail(0, format!("function has {} values, tree has {n}", f.len()));
    }
    for v in 0..n {
        if f.get(v).is_nan() {
            return DomainCheck::fail(v, "value is NaN");
        }
    }
    let cutoff = match (tag.family.is_modified(), tag.cutoff) {
        (true, Some(c)) => {
            if c < 1 || c > tree.max_layer() {
                return DomainCheck::fail(
                    0,
                    format!("cutoff layer {c} outside 1..={}", tree.max_layer()),
                );
            }
            c
        }
        (true, None) => return DomainCheck::fail(0, "modified family without a cutoff layer"),
        (false, Some(_)) => return DomainCheck::fail(0, "base family with a cutoff layer"),
        (false, None) => 0,
    };

    match tag.family {
        Family::FI | Family::FII | Family::FIMod | Family::FIIMod => {
            if f.get(0) != 0.0 {
                return DomainCheck::fail(0, format!("f(0) = {} but must be 0", f.get(0)));
            }
            for v in 1..n {
                if !f.get(v).is_finite() {
                    return DomainCheck::fail(v, "value is not finite");
                }
            }
            match tag.family {
                Family::FI => {
                    for v in 1..n {
                        let p = tree.parent(v).unwrap();
                        if !(f.get(v) > f.get(p)) {
                            return DomainCheck::fail(
                                v,
                                format!("f({v}) = {} not above f({p}) = {}", f.get(v), f.get(p)),
                            );
                        }
                    }
                }
                Family::FII => {
                    for v in 1..n {
                        if !(f.get(v) > 0.0) {
                            return DomainCheck::fail(v, format!("f({v}) = {} not positive", f.get(v)));
                        }
                    }
                }
                Family::FIMod => {
                    for v in 1..n {
                        if !(f.get(v) > 0.0) {
                            return DomainCheck::fail(v, format!("f({v}) = {} not positive", f.get(v)));
                        }
                        let p = tree.parent(v).unwrap();
                        if tree.layer(v) <= cutoff {
                            if !(f.get(v) > f.get(p)) {
                                return DomainCheck::fail(
                                    v,
                                    format!(
                                        "f({v}) = {} not above f({p}) = {} within the cutoff",
                                        f.get(v),
                                        f.get(p)
                                    ),
                                );
                            }
                        } else if f.get(v) != f.get(p) {
                            return DomainCheck::fail(
                                v,
                                format!(
                                    "f({v}) = {} differs from f({p}) = {} beyond the cutoff",
                                    f.get(v),
                                    f.get(p)
                                ),
                            );
                        }
                    }
                }
                Family::FIIMod => {
                    for v in 1..n {
                        if !(f.get(v) > 0.0) {
                            return DomainCheck::fail(v, format!("f({v}) = {} not positive", f.get(v)));
                        }
                        let p = tree.parent(v).unwrap();
                        if tree.layer(v) > cutoff && f.get(v) != f.get(p) {
                            return DomainCheck::fail(
                                v,
                                format!(
                                    "f({v}) = {} differs from f({p}) = {} beyond the cutoff",
                                    f.get(v),
                                    f.get(p)
                                ),
                            );
                        }
                    }
                }
                _ => unreachable!(),
            }
        }
        Family::W => {
            if f.get(0) != f64::INFINITY {
                return DomainCheck::fail(0, format!("w(0) = {} but must be inf", f.get(0)));
            }
            for v in 1..n {
                if !(f.get(v) > 1.0) {
                    return DomainCheck::fail(v, format!("w({v}) = {} not above 1", f.get(v)));
                }
                if tree.layer(v) >= 2 && !f.get(v).is_finite() {
                    return DomainCheck::fail(v, "only the root's son may carry w = inf");
                }
            }
        }
        Family::WMod => {
            if f.get(0) != f64::INFINITY {
                return DomainCheck::fail(0, format!("w(0) = {} but must be inf", f.get(0)));
            }
            for v in 1..n {
                let layer = tree.layer(v);
                if layer <= cutoff {
                    if !(f.get(v) > 1.0) {
                        return DomainCheck::fail(
                            v,
                            format!("w({v}) = {} not above 1 within the cutoff", f.get(v)),
                        );
                    }
                    if layer >= 2 && !f.get(v).is_finite() {
                        return DomainCheck::fail(v, "only the root's son may carry w = inf");
                    }
                } else if f.get(v) != 1.0 {
                    return DomainCheck::fail(
                        v,
                        format!("w({v}) = {} but must be 1 beyond the cutoff", f.get(v)),
                    );
                }
            }
            // positivity margin: sum_j q_ij w_j < q_up (1 - 1/w_i) + sum_j q_ij
            for v in 1..n {
                if tree.layer(v) > cutoff {
                    continue;
                }
                let w_inv = if f.get(v).is_finite() { 1.0 / f.get(v) } else { 0.0 };
                let mut lhs = 0.0;
                let mut rate_sum = 0.0;
                for &c in tree.children(v) {
                    lhs += tree.rate_down(c) * f.get(c);
                    rate_sum += tree.rate_down(c);
                }
                let rhs = tree.rate_up(v) * (1.0 - w_inv) + rate_sum;
                if !(lhs < rhs) {
                    return DomainCheck::fail(
                        v,
                        format!("margin inequality fails: {lhs} not below {rhs}"),
                    );
                }
            }
        }
    }
    DomainCheck::pass()
}
