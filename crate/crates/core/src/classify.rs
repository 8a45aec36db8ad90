//! Classification of the stable category `D^b(mod k^(2^r))`.
//!
//! `r` is computed twice: as the GF(2) nullity of the bordered adjacency
//! matrix, and as `β - 1` from the normal form `G(α, β)`. The two must agree;
//! a mismatch is reported as [`Error::InternalInconsistency`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{bordered_matrix, nullity};
use crate::graph::Graph;
use crate::mutation::{reduce_to_normal_form, ReductionTrace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub r: usize,
    pub alpha: usize,
    pub beta: usize,
    /// The number of indecomposable non-projective modules is `2^r`.
    pub indecomposables_exponent: usize,
    pub category_descriptor: String,
    /// Always true: finite representation type forces an isolated
    /// singularity. Reported, not computed.
    pub is_isolated_singularity: bool,
    pub trace: ReductionTrace,
}

/// `2^r` as a decimal string while it fits in an `i64`.
pub fn power_of_two_decimal(r: usize) -> Option<String> {
    (r <= 62).then(|| (1u64 << r).to_string())
}

/// `D^b(mod k)`, `D^b(mod k^4)`, or `D^b(mod k^(2^r))` once `2^r` is too big
/// to print.
pub fn category_descriptor(r: usize) -> String {
    match (r, power_of_two_decimal(r)) {
        (0, _) => "D^b(mod k)".to_string(),
        (_, Some(count)) => format!("D^b(mod k^{count})"),
        (_, None) => format!("D^b(mod k^(2^{r}))"),
    }
}

pub fn classify(g: &Graph) -> Result<Classification> {
    if g.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    let by_nullity = nullity(&bordered_matrix(g));
    let nf = reduce_to_normal_form(g)?;
    let by_reduction = nf.beta - 1;
    if by_nullity != by_reduction {
        return Err(Error::InternalInconsistency(format!(
            "nullity of X(G) is {by_nullity} but the normal form G({},{}) gives r = {by_reduction} for {g:?}",
            nf.alpha, nf.beta
        )));
    }
    let r = by_nullity;
    Ok(Classification {
        r,
        alpha: nf.alpha,
        beta: nf.beta,
        indecomposables_exponent: r,
        category_descriptor: category_descriptor(r),
        is_isolated_singularity: true,
        trace: nf.trace,
    })
}

pub fn indecomposable_count_exponent(g: &Graph) -> Result<usize> {
    classify(g).map(|c| c.indecomposables_exponent)
}

/// Serialized count of indecomposables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndecomposableCount {
    /// Always of the form `2^r`.
    pub power: String,
    /// Present when `r <= 62`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub decimal: Option<String>,
}

/// JSON shape of a classification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub n: usize,
    pub r: usize,
    pub alpha: usize,
    pub beta: usize,
    pub indecomposables: IndecomposableCount,
    pub category: String,
    pub isolated_singularity: bool,
    /// Steps in the trace text format, 1-based labels.
    pub trace: Vec<String>,
}

impl From<&Classification> for ClassificationReport {
    fn from(c: &Classification) -> Self {
        ClassificationReport {
            n: c.trace.initial().n(),
            r: c.r,
            alpha: c.alpha,
            beta: c.beta,
            indecomposables: IndecomposableCount {
                power: format!("2^{}", c.r),
                decimal: power_of_two_decimal(c.r),
            },
            category: c.category_descriptor.clone(),
            isolated_singularity: c.is_isolated_singularity,
            trace: c.trace.steps().iter().map(ToString::to_string).collect(),
        }
    }
}
