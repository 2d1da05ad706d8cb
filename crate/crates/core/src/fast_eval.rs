//! Treecode for batch evaluation of truncated Cauchy sums
//! `Σ_j w_j / (ζ_j - z)` over `|ζ_j - z| > ε`.

use rayon::prelude::*;
use thiserror::Error;

use crate::measure::{ComplexMeasure, MeasureError};
use crate::parallel::thread_pool;
use crate::scalar::{cx, Cx, Real};

#[derive(Debug, Error, PartialEq)]
pub enum FastEvalError {
    #[error("empty source set")]
    Empty,
    #[error("expansion order {0} below 4")]
    LowOrder(usize),
    #[error("leaf capacity {0} below 8")]
    SmallLeaf(usize),
    #[error("{0} points but {1} weights")]
    Mismatch(usize, usize),
    #[error("non-finite source")]
    NonFinite,
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Weighted point sources.
#[derive(Debug, Clone)]
pub struct SourceSet<T: Real> {
    pub points: Vec<Cx<T>>,
    pub weights: Vec<Cx<T>>,
}

impl<T: Real> SourceSet<T> {
    pub fn new(points: Vec<Cx<T>>, weights: Vec<Cx<T>>) -> Result<Self, FastEvalError> {
        if points.len() != weights.len() {
            return Err(FastEvalError::Mismatch(points.len(), weights.len()));
        }
        if points.is_empty() {
            return Err(FastEvalError::Empty);
        }
        let finite = |z: &Cx<T>| z.re.is_finite() && z.im.is_finite();
        if !points.iter().all(finite) || !weights.iter().all(finite) {
            return Err(FastEvalError::NonFinite);
        }
        Ok(SourceSet { points, weights })
    }

    /// Quadrature nodes of `μ`, `n` per continuous component.
    pub fn from_measure(mu: &ComplexMeasure<T>, n: usize) -> Result<Self, FastEvalError> {
        let ns = mu.discretize(n)?;
        SourceSet::new(ns.nodes, ns.weights)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total(&self) -> Cx<T> {
        self.weights
            .iter()
            .fold(cx(T::zero(), T::zero()), |a, w| a + *w)
    }
}

#[derive(Debug, Clone)]
struct Cell<T: Real> {
    center: Cx<T>,
    radius: T,
    start: usize,
    end: usize,
    children: Vec<usize>,
    /// `M_k = Σ w (ζ - c)^k`, `k < p`.
    moments: Vec<Cx<T>>,
}

/// Quadtree over the sources with per-cell multipole moments.
#[derive(Debug, Clone)]
pub struct EvalTree<T: Real> {
    points: Vec<Cx<T>>,
    weights: Vec<Cx<T>>,
    cells: Vec<Cell<T>>,
    order: usize,
    theta: T,
}

/// Opening ratio used for expansion order `p`: the far field is used when
/// `R / d ≤ θ(p)`, so the truncation error stays near `1e-11`.
pub fn opening_ratio(p: usize) -> f64 {
    10f64.powf(-11.0 / p as f64).clamp(0.1, 2.0 / 3.0)
}

/// Relative truncation bound `θ^p / (1 - θ)` of a single accepted cell.
pub fn error_bound(p: usize) -> f64 {
    let th = opening_ratio(p);
    th.powi(p as i32) / (1.0 - th)
}

const MAX_DEPTH: usize = 48;

impl<T: Real> EvalTree<T> {
    pub fn build(sources: &SourceSet<T>, p: usize, leaf_cap: usize) -> Result<Self, FastEvalError> {
        if sources.is_empty() {
            return Err(FastEvalError::Empty);
        }
        if p < 4 {
            return Err(FastEvalError::LowOrder(p));
        }
        if leaf_cap < 8 {
            return Err(FastEvalError::SmallLeaf(leaf_cap));
        }
        let mut idx: Vec<usize> = (0..sources.len()).collect();
        let (mut x0, mut x1, mut y0, mut y1) = (
            T::infinity(),
            T::neg_infinity(),
            T::infinity(),
            T::neg_infinity(),
        );
        for z in &sources.points {
            x0 = x0.min(z.re);
            x1 = x1.max(z.re);
            y0 = y0.min(z.im);
            y1 = y1.max(z.im);
        }
        let half = (x1 - x0).max(y1 - y0) * T::lit(0.5);
        let mid = cx((x0 + x1) * T::lit(0.5), (y0 + y1) * T::lit(0.5));
        let mut tree = EvalTree {
            points: Vec::new(),
            weights: Vec::new(),
            cells: Vec::new(),
            order: p,
            theta: T::lit(opening_ratio(p)),
        };
        tree.split(sources, &mut idx, 0, sources.len(), mid, half, leaf_cap, 0);
        tree.points = idx.iter().map(|&i| sources.points[i]).collect();
        tree.weights = idx.iter().map(|&i| sources.weights[i]).collect();
        for c in 0..tree.cells.len() {
            tree.fill_moments(c);
        }
        Ok(tree)
    }

    /// Recursively partitions `idx[start..end]` into the box of half-width
    /// `half` around `mid`; returns the cell index.
    #[allow(clippy::too_many_arguments)]
    fn split(
        &mut self,
        src: &SourceSet<T>,
        idx: &mut [usize],
        start: usize,
        end: usize,
        mid: Cx<T>,
        half: T,
        leaf_cap: usize,
        depth: usize,
    ) -> usize {
        let me = self.cells.len();
        self.cells.push(Cell {
            center: mid,
            radius: T::zero(),
            start,
            end,
            children: Vec::new(),
            moments: Vec::new(),
        });
        let slice = &idx[start..end];
        let spread = slice.iter().any(|&i| src.points[i] != src.points[slice[0]]);
        if end - start <= leaf_cap || depth >= MAX_DEPTH || !spread || half == T::zero() {
            return me;
        }
        let quad = |z: Cx<T>| usize::from(z.re >= mid.re) + 2 * usize::from(z.im >= mid.im);
        let seg = &mut idx[start..end];
        seg.sort_by_key(|&i| quad(src.points[i]));
        let mut bounds = [start; 5];
        for q in 0..4 {
            bounds[q + 1] = bounds[q] + seg.iter().filter(|&&i| quad(src.points[i]) == q).count();
        }
        let h2 = half * T::lit(0.5);
        let mut kids = Vec::new();
        for q in 0..4 {
            if bounds[q + 1] > bounds[q] {
                let dx = if q & 1 == 1 { h2 } else { -h2 };
                let dy = if q & 2 == 2 { h2 } else { -h2 };
                let k = self.split(
                    src,
                    idx,
                    bounds[q],
                    bounds[q + 1],
                    mid + cx(dx, dy),
                    h2,
                    leaf_cap,
                    depth + 1,
                );
                kids.push(k);
            }
        }
        self.cells[me].children = kids;
        me
    }

    fn fill_moments(&mut self, c: usize) {
        let (start, end, center) = (self.cells[c].start, self.cells[c].end, self.cells[c].center);
        let mut m = vec![cx(T::zero(), T::zero()); self.order];
        let mut radius = T::zero();
        for j in start..end {
            let d = self.points[j] - center;
            radius = radius.max(d.norm());
            let mut pw = self.weights[j];
            for mk in m.iter_mut() {
                *mk += pw;
                pw *= d;
            }
        }
        self.cells[c].radius = radius;
        self.cells[c].moments = m;
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.cells.iter().filter(|c| c.children.is_empty()).count()
    }

    /// Far field of one cell, `-Σ_k M_k / (z - c)^{k+1}`.
    fn far(&self, c: &Cell<T>, z: Cx<T>) -> Cx<T> {
        let u = (z - c.center).inv();
        let mut acc = cx(T::zero(), T::zero());
        for mk in c.moments.iter().rev() {
            acc = (acc + *mk) * u;
        }
        -acc
    }

    /// Truncated sum at a single target.
    pub fn eval(&self, z: Cx<T>, eps: T) -> Cx<T> {
        let mut acc = cx(T::zero(), T::zero());
        let mut stack = vec![0usize];
        while let Some(ci) = stack.pop() {
            let c = &self.cells[ci];
            let d = (z - c.center).norm();
            // every source of an accepted cell lies beyond ε
            if c.radius <= self.theta * d && d - c.radius > eps {
                acc += self.far(c, z);
            } else if c.children.is_empty() {
                for j in c.start..c.end {
                    let dz = self.points[j] - z;
                    if dz.norm() > eps {
                        acc += self.weights[j] / dz;
                    }
                }
            } else {
                stack.extend(c.children.iter().rev());
            }
        }
        acc
    }
}

/// Treecode values at every target. Each target is accumulated
/// independently in a fixed order, so results do not depend on threading.
pub fn batch_cauchy<T: Real>(tree: &EvalTree<T>, targets: &[Cx<T>], eps: T) -> Vec<Cx<T>> {
    thread_pool().install(|| targets.par_iter().map(|&z| tree.eval(z, eps)).collect())
}

/// Direct double loop, the reference for [`batch_cauchy`].
pub fn naive_cauchy<T: Real>(sources: &SourceSet<T>, targets: &[Cx<T>], eps: T) -> Vec<Cx<T>> {
    thread_pool().install(|| {
        targets
            .par_iter()
            .map(|&z| {
                sources.points.iter().zip(&sources.weights).fold(
                    cx(T::zero(), T::zero()),
                    |acc, (p, w)| {
                        let d = *p - z;
                        if d.norm() > eps {
                            acc + *w / d
                        } else {
                            acc
                        }
                    },
                )
            })
            .collect()
    })
}

/// Audits the treecode against the double loop on `sample` evenly spaced
/// targets (all of them if fewer). Returns the audited indices and the
/// largest relative deviation.
pub fn audit<T: Real>(
    sources: &SourceSet<T>,
    tree: &EvalTree<T>,
    targets: &[Cx<T>],
    eps: T,
    sample: usize,
) -> (Vec<usize>, f64) {
    let m = targets.len();
    let picks: Vec<usize> = if m <= sample {
        (0..m).collect()
    } else {
        (0..sample).map(|k| k * m / sample).collect()
    };
    let chosen: Vec<Cx<T>> = picks.iter().map(|&i| targets[i]).collect();
    let fast = batch_cauchy(tree, &chosen, eps);
    let slow = naive_cauchy(sources, &chosen, eps);
    let worst = fast
        .iter()
        .zip(&slow)
        .map(|(f, s)| ((*f - *s).norm() / s.norm().max(T::min_positive_value())).as_f64())
        .fold(0.0, f64::max);
    (picks, worst)
}
