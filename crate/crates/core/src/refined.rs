//! Boundary grid refinement.
//!
//! The boundary blocks are sampled `R` times finer than the interior, on
//! `t = ℓ/(RM)`, which gives `m^R = R(m-1)+1` nodes spanning the same
//! interval as the coarse blocks. The gluing function is fitted on the fine
//! working grid and read back at every `R`-th node, so the assembled period is
//! exactly the one of the unrefined algorithm. `R = 1` is the unrefined
//! algorithm.

use num_complex::Complex64 as C64;

use crate::approximant::{coefficients_from_period, FourierApproximant};
use crate::error::{Error, Result};
use crate::extension::{
    compute_extension_values, half_count_of, precompute_operator, ExtensionConfig,
    ExtensionOperator, PeriodicSamples,
};
use crate::grids::period_lambda;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinedConfig {
    base: ExtensionConfig,
    r: usize,
    fine: ExtensionConfig,
}

impl RefinedConfig {
    /// The fine configuration keeps `T`, the requested `γ` and `τ` of `base`
    /// and uses `m^R` boundary nodes.
    ///
    /// Rejects combinations where the fine working grid is not exactly `R`
    /// times the coarse one, since the fine and coarse extension abscissae
    /// would then drift apart.
    pub fn new(base: ExtensionConfig, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::invalid("R", "refinement factor must be at least 1"));
        }
        let m_fine = r * (base.m_delta() - 1) + 1;
        let fine = ExtensionConfig::new(base.t_delta(), m_fine, base.gamma(), base.tau())?;
        let (lc, lf) = (base.geometry().l_delta(), fine.geometry().l_delta());
        if lf != r * lc {
            return Err(Error::invalid(
                "R",
                format!(
                    "fine grid has {lf} nodes, not R·L = {}; T·(m-1) must make the grids nest",
                    r * lc
                ),
            ));
        }
        Ok(Self { base, r, fine })
    }

    pub fn base(&self) -> &ExtensionConfig {
        &self.base
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Configuration of the fine gluing problem.
    pub fn fine(&self) -> &ExtensionConfig {
        &self.fine
    }

    /// `m^R`.
    pub fn m_fine(&self) -> usize {
        self.fine.m_delta()
    }
}

/// Abscissae of the fine boundary blocks for half count `M`:
/// left `t = (-RM+i)/(RM)`, `i = 0..m^R`, and right
/// `t = (RM-m^R+j)/(RM)`, `j = 1..=m^R`.
pub fn fine_boundary_abscissae(rc: &RefinedConfig, m_half: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if rc.base.m_delta() > m_half {
        return Err(Error::invalid(
            "M",
            format!(
                "M = {m_half} is smaller than the boundary node count {}",
                rc.base.m_delta()
            ),
        ));
    }
    let rm = (rc.r * m_half) as i64;
    let mf = rc.m_fine() as i64;
    let scale = rm as f64;
    let left = (0..mf).map(|i| (-rm + i) as f64 / scale).collect();
    let right = (1..=mf).map(|j| (rm - mf + j) as f64 / scale).collect();
    Ok((left, right))
}

/// Stacks the right fine block, then the left one, in system-matrix row order.
pub fn refined_boundary_data(left: &[C64], right: &[C64], rc: &RefinedConfig) -> Result<Vec<C64>> {
    Error::check_len("left fine boundary block", rc.m_fine(), left.len())?;
    Error::check_len("right fine boundary block", rc.m_fine(), right.len())?;
    Ok(right.iter().chain(left).copied().collect())
}

/// Original samples followed by `g_c^R` at fine nodes `m^R + (ℓ-M)R`,
/// `ℓ = M+1 ..= M + L/2 - m` (1-based fine indices).
pub fn assemble_refined(
    samples: &[C64],
    g_c_fine: &[C64],
    rc: &RefinedConfig,
    m_half: usize,
) -> Result<PeriodicSamples> {
    Error::check_len("samples (2M+1)", 2 * m_half + 1, samples.len())?;
    let fine_geom = rc.fine.geometry();
    Error::check_len("fine extension values (L^R)", fine_geom.l_delta(), g_c_fine.len())?;
    let coarse = rc.base.geometry();
    period_lambda(&coarse, m_half)?;
    let count = coarse.extension_count();
    let mut values = Vec::with_capacity(samples.len() + count);
    values.extend_from_slice(samples);
    for s in 1..=count {
        let idx = rc.m_fine() + s * rc.r;
        let v = g_c_fine.get(idx - 1).ok_or_else(|| {
            Error::invalid("R", format!("fine index {idx} outside the working grid"))
        })?;
        values.push(*v);
    }
    PeriodicSamples::from_values(m_half, values)
}

/// The fine operator plus its refinement layout.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinedOperator {
    config: RefinedConfig,
    fine: ExtensionOperator,
}

pub fn precompute_refined(config: RefinedConfig) -> Result<RefinedOperator> {
    Ok(RefinedOperator {
        fine: precompute_operator(config.fine)?,
        config,
    })
}

impl RefinedOperator {
    /// Wraps an already factored fine operator, e.g. one loaded from a cache.
    pub fn from_fine_operator(config: RefinedConfig, fine: ExtensionOperator) -> Result<Self> {
        if fine.config() != config.fine() {
            return Err(Error::invalid(
                "operator",
                "fine operator was built for a different configuration",
            ));
        }
        Ok(Self { config, fine })
    }

    pub fn config(&self) -> &RefinedConfig {
        &self.config
    }

    pub fn fine_operator(&self) -> &ExtensionOperator {
        &self.fine
    }

    /// Extension from coarse samples plus explicitly supplied fine blocks.
    pub fn extend(&self, samples: &[C64], left: &[C64], right: &[C64]) -> Result<PeriodicSamples> {
        let m_half = half_count_of(samples)?;
        let g = refined_boundary_data(left, right, &self.config)?;
        let g_c = compute_extension_values(&self.fine, &g)?;
        assemble_refined(samples, &g_c, &self.config, m_half)
    }

    /// Samples `f` on the coarse grid and on both fine blocks, then extends.
    pub fn extend_fn(&self, m_half: usize, f: impl Fn(f64) -> C64) -> Result<PeriodicSamples> {
        let (lt, rt) = fine_boundary_abscissae(&self.config, m_half)?;
        let mh = m_half as i64;
        let samples: Vec<C64> = (-mh..=mh).map(|l| f(l as f64 / m_half as f64)).collect();
        let left: Vec<C64> = lt.into_iter().map(&f).collect();
        let right: Vec<C64> = rt.into_iter().map(&f).collect();
        self.extend(&samples, &left, &right)
    }

    pub fn approximate_fn(&self, m_half: usize, f: impl Fn(f64) -> C64) -> Result<FourierApproximant> {
        coefficients_from_period(&self.extend_fn(m_half, f)?)
    }
}
