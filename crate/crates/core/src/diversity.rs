//! Portfolio diversity statistics: proportions, variety, Gini-Simpson,
//! Rao-Stirling diversity and its true-diversity transform.

use crate::error::Error;
use crate::portfolio::ClassVector;
use crate::scalar::{CompensatedSum, Real};
use crate::taxonomy::ClassSimilarityMap;
use crate::Result;

/// Proportions over the canonical class order; non-negative and summing
/// to one.
#[derive(Debug, Clone)]
pub struct ProportionVector<R: Real> {
    p: Vec<R>,
}

impl<R: Real> ProportionVector<R> {
    pub fn values(&self) -> &[R] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

/// Per-portfolio diversity summary, one row of the rao store.
#[derive(Debug, Clone, PartialEq)]
pub struct DiversityRecord<R: Real> {
    pub name: String,
    pub n_patents: u64,
    pub variety: u64,
    pub gini_simpson: R,
    pub rao_delta: R,
    pub true_diversity: R,
}

/// Normalize counts to proportions. Fails on an all-zero vector.
pub fn proportions<R: Real>(v: &ClassVector) -> Result<ProportionVector<R>> {
    let total: u64 = v.counts().iter().sum();
    if total == 0 {
        return Err(Error::EmptyPortfolio(v.name().to_string()));
    }
    let t = R::from_count(total);
    let p = v.counts().iter().map(|&c| R::from_count(c) / t).collect();
    Ok(ProportionVector { p })
}

/// Rao-Stirling diversity: the double sum of `p_i p_j (1 - cos_ij)` over
/// all ordered class pairs. The diagonal contributes nothing because the
/// self-cosine is one. Accumulation is compensated so the brute-force
/// oracle tolerance of 1e-12 holds on the full 630x630 grid.
pub fn rao_stirling<R: Real>(p: &ProportionVector<R>, sim: &ClassSimilarityMap<R>) -> Result<R> {
    if p.len() != sim.len() {
        return Err(Error::Shape(format!(
            "proportion vector has {} entries, similarity map has {}",
            p.len(),
            sim.len()
        )));
    }
    let mut acc = CompensatedSum::new();
    for (i, &pi) in p.values().iter().enumerate() {
        if pi == R::zero() {
            continue;
        }
        for (j, &pj) in p.values().iter().enumerate() {
            if pj == R::zero() {
                continue;
            }
            acc.add(pi * pj * sim.disparity(i, j));
        }
    }
    Ok(acc.total())
}

/// True diversity `1/(1 - delta)`; defined for `0 <= delta < 1`.
pub fn true_diversity<R: Real>(delta: R) -> Result<R> {
    if delta < R::zero() || delta >= R::one() {
        return Err(Error::Format(format!("delta {delta} outside [0,1)")));
    }
    Ok(R::one() / (R::one() - delta))
}

/// Gini-Simpson index `1 - sum p_i^2`; equals Rao-Stirling with every
/// off-diagonal disparity set to one.
pub fn gini_simpson<R: Real>(p: &ProportionVector<R>) -> R {
    let mut acc = CompensatedSum::new();
    for &pi in p.values() {
        acc.add(pi * pi);
    }
    R::one() - acc.total()
}

/// Number of classes with a strictly positive count.
pub fn variety(v: &ClassVector) -> u64 {
    v.counts().iter().filter(|&&c| c > 0).count() as u64
}

/// Compute the full diversity record for one portfolio.
pub fn diversity_record<R: Real>(
    v: &ClassVector,
    n_patents: u64,
    sim: &ClassSimilarityMap<R>,
) -> Result<DiversityRecord<R>> {
    let p = proportions::<R>(v)?;
    let delta = rao_stirling(&p, sim)?;
    Ok(DiversityRecord {
        name: v.name().to_string(),
        n_patents,
        variety: variety(v),
        gini_simpson: gini_simpson(&p),
        rao_delta: delta,
        true_diversity: true_diversity(delta)?,
    })
}
