//! Truncated `L¹(|μ|)` norms and weak-type quasinorms of the Cauchy
//! maximal function.

use rayon::prelude::*;

use super::samples::samples;
use super::IdentityError;
use crate::measure::ComplexMeasure;
use crate::parallel::thread_pool;
use crate::scalar::{Cx, Real};
use crate::transforms::{cauchy_eps, EpsGrid, TransformError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Summability {
    /// The truncated norms stop growing.
    Summable,
    /// Logarithmic growth of the truncated norms with a bounded weak
    /// quasinorm.
    WeakOnly,
    Divergent,
}

impl Summability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Summability::Summable => "summable",
            Summability::WeakOnly => "weak-only",
            Summability::Divergent => "divergent",
        }
    }
}

#[derive(Debug, Clone)]
pub struct MaximalOptions<T> {
    /// Samples per component.
    pub nodes: usize,
    /// Cutoffs `Λ`, increasing.
    pub cutoffs: Vec<T>,
    /// Levels `λ` of the distribution function, increasing.
    pub lambdas: Vec<T>,
    /// Smallest common truncation radius relative to the support diameter.
    pub eps_min_rel: T,
}

impl<T: Real> Default for MaximalOptions<T> {
    fn default() -> Self {
        MaximalOptions {
            nodes: 400,
            cutoffs: [10.0, 1e2, 1e3, 1e4].iter().map(|&v| T::lit(v)).collect(),
            lambdas: (0..=32)
                .map(|k| T::lit(10f64.powf(k as f64 / 8.0)))
                .collect(),
            eps_min_rel: T::lit(1e-13),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MaximalStats<T: Real> {
    pub nodes: Vec<Cx<T>>,
    /// `|μ|` weights of the nodes.
    pub weights: Vec<T>,
    pub maximal_values: Vec<T>,
    pub cutoffs: Vec<T>,
    /// `∫ min(C*, Λ) d|μ|` per cutoff.
    pub l1_truncated: Vec<T>,
    pub lambdas: Vec<T>,
    /// `λ |μ|({C* > λ})` per level.
    pub weak_profile: Vec<T>,
    /// Supremum of the profile over all levels.
    pub weak_quasinorm: T,
    /// Supremum of the profile over levels `λ ≤ Λ`, per cutoff.
    pub weak_by_cutoff: Vec<T>,
    /// `(max - min) / max` of `weak_by_cutoff`.
    pub weak_variation: T,
    pub eps: Vec<T>,
    /// `‖C^μ_ε‖_{L¹(|μ|)}` per ε.
    pub eps_l1_norms: Vec<T>,
    /// Least-squares fit `l1 ≈ slope · ln Λ + intercept` and its R².
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
    /// Relative change of the truncated norm between the last two cutoffs.
    pub last_growth: T,
    pub class: Summability,
}

fn fit<T: Real>(xs: &[T], ys: &[T]) -> (T, T, T) {
    let n = T::of_usize(xs.len());
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let sxx: T = xs.iter().map(|x| (*x - mx) * (*x - mx)).sum();
    let sxy: T = xs.iter().zip(ys).map(|(x, y)| (*x - mx) * (*y - my)).sum();
    let syy: T = ys.iter().map(|y| (*y - my) * (*y - my)).sum();
    if sxx == T::zero() {
        return (T::zero(), my, T::zero());
    }
    let slope = sxy / sxx;
    let r2 = if syy == T::zero() {
        T::one()
    } else {
        sxy * sxy / (sxx * syy)
    };
    (slope, my - slope * mx, r2)
}

/// Computes the grid maximal function at `|μ|`-distributed nodes and the
/// statistics built from it.
///
/// Every node uses the same geometric radii from the support diameter down
/// to `eps_min_rel` times it; interval nodes nearer to an endpoint than
/// that continue the grid down to a sixteenth of their endpoint distance.
/// Classification: summable when the truncated norm grows by less than 1%
/// over the last cutoff step, weak-only when it is linear in `ln Λ`
/// (R² > 0.99, positive slope) with weak quasinorm varying by less than
/// 20%, divergent otherwise.
pub fn maximal_summability<T: Real>(
    mu: &ComplexMeasure<T>,
    opts: &MaximalOptions<T>,
) -> Result<MaximalStats<T>, IdentityError> {
    if !mu.is_continuous() {
        return Err(IdentityError::NotContinuous);
    }
    if opts.cutoffs.len() < 2 || opts.cutoffs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(IdentityError::BadArgument(
            "need at least two increasing cutoffs".into(),
        ));
    }
    if opts.lambdas.is_empty() || opts.lambdas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(IdentityError::BadArgument(
            "levels must be increasing".into(),
        ));
    }
    let top = mu.diameter().max(T::min_positive_value());
    let common = EpsGrid {
        eps_min: top * opts.eps_min_rel,
        eps_max: top,
        ratio: T::lit(2.0),
        splits: 0,
    };
    let radii = common.radii();
    let sm = samples(mu, opts.nodes)?;
    let rows: Result<Vec<(T, Vec<T>)>, TransformError> = thread_pool().install(|| {
        sm.par_iter()
            .map(|s| {
                let mut best = T::zero();
                let mut per_eps = Vec::with_capacity(radii.len());
                for &e in &radii {
                    let v = cauchy_eps(mu, s.at, e)?.norm();
                    best = best.max(v);
                    per_eps.push(v);
                }
                let mut e = common.eps_min;
                while e > s.edge / T::lit(16.0) {
                    e *= T::lit(0.5);
                    best = best.max(cauchy_eps(mu, s.at, e)?.norm());
                }
                Ok((best, per_eps))
            })
            .collect()
    });
    let rows = rows?;
    let weights: Vec<T> = sm.iter().map(|s| s.abs_weight).collect();
    let maximal_values: Vec<T> = rows.iter().map(|r| r.0).collect();
    let l1_truncated: Vec<T> = opts
        .cutoffs
        .iter()
        .map(|&lam| {
            weights
                .iter()
                .zip(&maximal_values)
                .map(|(w, m)| *w * m.min(lam))
                .sum()
        })
        .collect();
    let weak_profile: Vec<T> = opts
        .lambdas
        .iter()
        .map(|&lam| {
            lam * weights
                .iter()
                .zip(&maximal_values)
                .filter(|(_, m)| **m > lam)
                .map(|(w, _)| *w)
                .sum::<T>()
        })
        .collect();
    let weak_quasinorm = weak_profile.iter().copied().fold(T::zero(), T::max);
    let weak_by_cutoff: Vec<T> = opts
        .cutoffs
        .iter()
        .map(|&cut| {
            opts.lambdas
                .iter()
                .zip(&weak_profile)
                .filter(|(l, _)| **l <= cut)
                .map(|(_, v)| *v)
                .fold(T::zero(), T::max)
        })
        .collect();
    let wmax = weak_by_cutoff.iter().copied().fold(T::zero(), T::max);
    let wmin = weak_by_cutoff.iter().copied().fold(T::infinity(), T::min);
    let weak_variation = if wmax > T::zero() {
        (wmax - wmin) / wmax
    } else {
        T::zero()
    };
    let eps_l1_norms: Vec<T> = (0..radii.len())
        .map(|k| weights.iter().zip(&rows).map(|(w, r)| *w * r.1[k]).sum())
        .collect();
    let logs: Vec<T> = opts.cutoffs.iter().map(|c| c.ln()).collect();
    let (slope, intercept, r_squared) = fit(&logs, &l1_truncated);
    let n = l1_truncated.len();
    let last_growth = (l1_truncated[n - 1] - l1_truncated[n - 2])
        / l1_truncated[n - 2].max(T::min_positive_value());
    let class = if last_growth < T::lit(0.01) {
        Summability::Summable
    } else if r_squared > T::lit(0.99) && slope > T::zero() && weak_variation < T::lit(0.2) {
        Summability::WeakOnly
    } else {
        Summability::Divergent
    };
    Ok(MaximalStats {
        nodes: sm.iter().map(|s| s.at).collect(),
        weights,
        maximal_values,
        cutoffs: opts.cutoffs.clone(),
        l1_truncated,
        lambdas: opts.lambdas.clone(),
        weak_profile,
        weak_quasinorm,
        weak_by_cutoff,
        weak_variation,
        eps: radii,
        eps_l1_norms,
        slope,
        intercept,
        r_squared,
        last_growth,
        class,
    })
}
