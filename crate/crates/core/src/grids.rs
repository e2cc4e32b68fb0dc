//! Sampling grids and the index arithmetic that places boundary data on the
//! `[0, 2π]` working interval.
//!
//! The original samples live on `t_ℓ = ℓ/M`, `ℓ = -M..=M`. The gluing
//! computation runs on `L` equispaced nodes `x_j = (j-1)·2π/L`, `j = 1..=L`,
//! where the right boundary interval occupies `x_1..x_m` and the left one
//! `x_{L/2+1}..x_{L/2+m}`.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use crate::error::{Error, Result};

/// The equispaced grid `t_ℓ = ℓ/M` on `[-1, 1]` with `2M + 1` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformGrid {
    m: usize,
}

impl UniformGrid {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("M", "must be positive"));
        }
        Ok(Self { m })
    }

    /// Half node count `M`.
    pub fn half_count(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        2 * self.m + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.m as f64
    }

    /// `t_ℓ` for a signed index `ℓ`. Not restricted to `|ℓ| ≤ M` so that
    /// extension nodes beyond `t = 1` can be addressed too.
    pub fn node(&self, l: i64) -> f64 {
        l as f64 / self.m as f64
    }

    /// All nodes in increasing order; `t_{-M} = -1` and `t_M = 1` exactly.
    pub fn nodes(&self) -> Vec<f64> {
        let m = self.m as i64;
        (-m..=m).map(|l| self.node(l)).collect()
    }

    /// Samples a function on every node.
    pub fn sample<T>(&self, f: impl Fn(f64) -> T) -> Vec<T> {
        self.nodes().into_iter().map(f).collect()
    }
}

/// Signed index sets of the `m` outermost nodes at each end of the grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryIndexSets {
    pub left: RangeInclusive<i64>,
    pub right: RangeInclusive<i64>,
}

impl BoundaryIndexSets {
    pub fn count(&self) -> usize {
        (self.left.end() - self.left.start() + 1) as usize
    }

    pub fn is_disjoint(&self) -> bool {
        self.left.end() < self.right.start()
    }
}

/// `S_l = {-M, …, -M+m-1}` and `S_r = {M-m+1, …, M}`.
pub fn boundary_index_sets(m_half: usize, m_delta: usize) -> Result<BoundaryIndexSets> {
    if m_delta < 2 {
        return Err(Error::invalid("m_delta", format!("{m_delta} < 2")));
    }
    if m_delta > m_half {
        return Err(Error::invalid(
            "m_delta",
            format!("{m_delta} boundary nodes do not fit in M = {m_half}"),
        ));
    }
    let (m, md) = (m_half as i64, m_delta as i64);
    Ok(BoundaryIndexSets {
        left: -m..=(-m + md - 1),
        right: (m - md + 1)..=m,
    })
}

/// Derived layout of the `[0, 2π]` working grid for a given extension ratio
/// and boundary node count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionGeometry {
    t_delta: f64,
    m_delta: usize,
    l_delta: usize,
}

/// `⌈x⌉`, except that values within a few ulps of an integer snap to it, so
/// that e.g. `5.9 * 24` or `1.2 * 50` do not pick up a spurious extra node.
pub(crate) fn robust_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

/// Builds the working-grid geometry: `L = 2⌈T(m-1)⌉`, `h = 2π/L`.
pub fn extension_geometry(t_delta: f64, m_delta: usize) -> Result<ExtensionGeometry> {
    if !t_delta.is_finite() || t_delta <= 1.0 {
        return Err(Error::invalid(
            "T_delta",
            format!("{t_delta} must be a finite number > 1"),
        ));
    }
    if m_delta < 2 {
        return Err(Error::invalid("m_delta", format!("{m_delta} < 2")));
    }
    let l_delta = 2 * robust_ceil(t_delta * (m_delta - 1) as f64) as usize;
    debug_assert!(l_delta >= 2 * m_delta);
    Ok(ExtensionGeometry {
        t_delta,
        m_delta,
        l_delta,
    })
}

impl ExtensionGeometry {
    pub fn t_delta(&self) -> f64 {
        self.t_delta
    }

    pub fn m_delta(&self) -> usize {
        self.m_delta
    }

    /// Number of working-grid nodes `L` (always even).
    pub fn l_delta(&self) -> usize {
        self.l_delta
    }

    pub fn half(&self) -> usize {
        self.l_delta / 2
    }

    pub fn h(&self) -> f64 {
        2.0 * PI / self.l_delta as f64
    }

    /// `x_j = (j-1)h` for the 1-based node index `j`.
    pub fn abscissa(&self, j: usize) -> f64 {
        debug_assert!((1..=self.l_delta).contains(&j));
        (j - 1) as f64 * self.h()
    }

    /// `J_1 = {1, …, m}`: where the right-boundary data sits.
    pub fn j1(&self) -> RangeInclusive<usize> {
        1..=self.m_delta
    }

    /// `J_2 = {L/2+1, …, L/2+m}`: where the left-boundary data sits.
    pub fn j2(&self) -> RangeInclusive<usize> {
        self.half() + 1..=self.half() + self.m_delta
    }

    /// 1-based working-grid indices of the `2m` constrained nodes, in the row
    /// order of the system matrix.
    pub fn constrained_nodes(&self) -> impl Iterator<Item = usize> {
        self.j1().chain(self.j2())
    }

    /// Number of gluing samples appended after `t = 1` in one period:
    /// `L/2 - m`.
    pub fn extension_count(&self) -> usize {
        self.half() - self.m_delta
    }
}

/// Extension length `λ` of the assembled period `[-1, 1+λ)`.
///
/// Computed as `(L/2 - m + 1)/M`, which is the number of gluing samples plus
/// the wraparound step; it equals `⌈T-1⌉(m-1)/M` whenever `T` is an integer.
pub fn period_lambda(geom: &ExtensionGeometry, m_half: usize) -> Result<f64> {
    if m_half < geom.m_delta {
        return Err(Error::invalid(
            "M",
            format!(
                "M = {m_half} is smaller than the boundary node count {}",
                geom.m_delta
            ),
        ));
    }
    Ok((geom.extension_count() + 1) as f64 / m_half as f64)
}
