//! Interference-plus-noise covariance from DMRS residuals and spatial
//! whitening of the received slot.
//!
//! Three constructions of the per-RB whitening covariance are offered, in
//! ascending order of cost:
//!
//! 1. [`IwOption::Nrb`]: the diagonal of the RB's own estimate,
//! 2. [`IwOption::Nbw`]: the diagonal of the estimate averaged over the band,
//! 3. [`IwOption::Rb`]: the RB's full estimate.
//!
//! The two diagonal options reduce whitening to a per-antenna scaling.

use alloc::vec::Vec;
use core::fmt;


use crate::link::{DmrsResiduals, ResourceGrid, SC_PER_RB};
use crate::numerics::{
    cholesky_dense, cholesky_diagonal, lower_inverse, whiten_apply, ComplexMatrix, HermitianMatrix,
    NumericsError, OpCounter, C64,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum IwError {
    #[error("resource block {0} has no DMRS residuals")]
    EmptyRb(usize),
    #[error("covariance estimate set is empty")]
    NoResourceBlocks,
    #[error("grid, channel and covariance dimensions disagree")]
    DimensionMismatch,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Whitening covariance construction; the discriminant is the option
/// number and orders options by complexity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum IwOption {
    /// Normalization over the RB (IWNRB).
    Nrb = 1,
    /// Normalization over the signal bandwidth (IWNBW).
    Nbw = 2,
    /// Full covariance over the RB (IWRB).
    Rb = 3,
}

impl IwOption {
    pub const ALL: [IwOption; 3] = [IwOption::Nrb, IwOption::Nbw, IwOption::Rb];

    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Self::Nrb),
            2 => Some(Self::Nbw),
            3 => Some(Self::Rb),
            _ => None,
        }
    }

    /// Zero-based index, handy for per-option arrays.
    pub fn index(self) -> usize {
        self as usize - 1
    }

    pub fn is_diagonal(self) -> bool {
        !matches!(self, Self::Rb)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Nrb => "IWNRB",
            Self::Nbw => "IWNBW",
            Self::Rb => "IWRB",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "IWNRB" | "1" => Some(Self::Nrb),
            "IWNBW" | "2" => Some(Self::Nbw),
            "IWRB" | "3" => Some(Self::Rb),
            _ => None,
        }
    }
}

impl fmt::Display for IwOption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-RB sample covariance of the DMRS residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceSet {
    per_rb: Vec<HermitianMatrix>,
    sample_counts: Vec<usize>,
    /// Diagonal averaged over every RB.
    band_diagonal: Vec<f64>,
}

impl CovarianceSet {
    pub fn from_matrices(per_rb: Vec<HermitianMatrix>, sample_counts: Vec<usize>) -> Result<Self, IwError> {
        if per_rb.is_empty() {
            return Err(IwError::NoResourceBlocks);
        }
        let n = per_rb[0].dim();
        if per_rb.iter().any(|r| r.dim() != n) || sample_counts.len() != per_rb.len() {
            return Err(IwError::DimensionMismatch);
        }
        let b = per_rb.len() as f64;
        let mut band_diagonal = alloc::vec![0.0; n];
        for r in &per_rb {
            for (acc, d) in band_diagonal.iter_mut().zip(r.diagonal()) {
                *acc += d;
            }
        }
        for d in &mut band_diagonal {
            *d /= b;
        }
        Ok(Self {
            per_rb,
            sample_counts,
            band_diagonal,
        })
    }

    pub fn num_rb(&self) -> usize {
        self.per_rb.len()
    }

    pub fn num_rx(&self) -> usize {
        self.band_diagonal.len()
    }

    pub fn rb(&self, b: usize) -> &HermitianMatrix {
        &self.per_rb[b]
    }

    pub fn per_rb(&self) -> &[HermitianMatrix] {
        &self.per_rb
    }

    pub fn sample_counts(&self) -> &[usize] {
        &self.sample_counts
    }

    /// `diag((1/B) sum_b R_b)` as a vector.
    pub fn band_diagonal(&self) -> &[f64] {
        &self.band_diagonal
    }

    /// Multiplies every estimate by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let per_rb = self
            .per_rb
            .iter()
            .map(|r| HermitianMatrix::new(r.as_matrix().scale(s)).expect("scaled Hermitian"))
            .collect();
        Self::from_matrices(per_rb, self.sample_counts.clone()).expect("same shape")
    }
}

/// Outer-product average of the residuals in each RB.
pub fn estimate_rb_covariance(residuals: &DmrsResiduals) -> Result<CovarianceSet, IwError> {
    let n = residuals.num_rx();
    let mut per_rb = Vec::with_capacity(residuals.num_rb());
    let mut counts = Vec::with_capacity(residuals.num_rb());
    for b in 0..residuals.num_rb() {
        let count = residuals.count(b);
        if count == 0 {
            return Err(IwError::EmptyRb(b));
        }
        let mut acc = ComplexMatrix::zeros(n, n);
        for v in residuals.vectors(b) {
            for r in 0..n {
                acc[(r, r)] += C64::new(v[r].norm_sqr(), 0.0);
                for c in (r + 1)..n {
                    acc[(r, c)] += v[r] * v[c].conj();
                }
            }
        }
        let inv = 1.0 / count as f64;
        for r in 0..n {
            for c in r..n {
                let val = acc[(r, c)] * inv;
                acc[(r, c)] = val;
                acc[(c, r)] = val.conj();
            }
        }
        per_rb.push(HermitianMatrix::new(acc)?);
        counts.push(count);
    }
    CovarianceSet::from_matrices(per_rb, counts)
}

/// Whitening covariance of RB `b` under `option`.
pub fn build_iw_matrix(cov: &CovarianceSet, option: IwOption, b: usize) -> HermitianMatrix {
    match option {
        IwOption::Nrb => cov.rb(b).diagonal_part(),
        IwOption::Nbw => HermitianMatrix::from_real_diagonal(cov.band_diagonal()).expect("non-negative diagonal"),
        IwOption::Rb => cov.rb(b).clone(),
    }
}

/// Which path was taken and what it cost.
#[derive(Debug, Clone, PartialEq)]
pub struct WhitenReport {
    pub option: IwOption,
    /// Whitening covariance used for each RB.
    pub per_rb: Vec<HermitianMatrix>,
    /// Factorization and inversion, summed over RBs.
    pub setup_ops: OpCounter,
    /// Applying the inverse factor to the grid and channel.
    pub apply_ops: OpCounter,
    pub diagonal_path_used: bool,
    /// RBs whose factorization needed diagonal loading.
    pub regularized_rbs: usize,
}

impl WhitenReport {
    pub fn total_ops(&self) -> OpCounter {
        let mut t = self.setup_ops;
        t.merge(&self.apply_ops);
        t
    }
}

/// Whitened received grid and channel.
#[derive(Debug, Clone)]
pub struct WhitenedSlot {
    pub grid: ResourceGrid,
    pub channel: Vec<ComplexMatrix>,
}

/// Inverse Cholesky factor for one RB under `option`.
pub fn rb_whitener(
    cov: &CovarianceSet,
    option: IwOption,
    b: usize,
    ops: &mut OpCounter,
) -> Result<(HermitianMatrix, ComplexMatrix, bool), IwError> {
    let r = build_iw_matrix(cov, option, b);
    let factor = if option.is_diagonal() {
        cholesky_diagonal(&r.diagonal(), ops)?
    } else {
        cholesky_dense(&r, ops)?
    };
    let linv = lower_inverse(&factor, ops);
    Ok((r, linv, factor.regularized()))
}

/// Whitens every RE of every RB, and the channel of its subcarriers, with
/// one inverse factor per RB.
pub fn whiten_slot(
    rx: &ResourceGrid,
    channel: &[ComplexMatrix],
    cov: &CovarianceSet,
    option: IwOption,
) -> Result<(WhitenedSlot, WhitenReport), IwError> {
    let n = rx.ports();
    if cov.num_rx() != n || channel.len() != rx.num_sc() || rx.num_sc() != cov.num_rb() * SC_PER_RB {
        return Err(IwError::DimensionMismatch);
    }
    let mut setup = OpCounter::new();
    let mut apply = OpCounter::new();
    let mut grid = rx.clone();
    let mut wchannel = Vec::with_capacity(channel.len());
    let mut used = Vec::with_capacity(cov.num_rb());
    let mut regularized = 0;
    for b in 0..cov.num_rb() {
        let (r, linv, reg) = rb_whitener(cov, option, b, &mut setup)?;
        regularized += reg as usize;
        used.push(r);
        for sc in b * SC_PER_RB..(b + 1) * SC_PER_RB {
            wchannel.push(whiten_apply(&linv, &channel[sc], &mut apply)?);
            let y = ComplexMatrix::from_fn(n, rx.num_sym(), |r, sym| rx.re(sc, sym)[r]);
            let w = whiten_apply(&linv, &y, &mut apply)?;
            for sym in 0..rx.num_sym() {
                for (r, v) in grid.re_mut(sc, sym).iter_mut().enumerate() {
                    *v = w[(r, sym)];
                }
            }
        }
    }
    Ok((
        WhitenedSlot {
            grid,
            channel: wchannel,
        },
        WhitenReport {
            option,
            per_rb: used,
            setup_ops: setup,
            apply_ops: apply,
            diagonal_path_used: option.is_diagonal(),
            regularized_rbs: regularized,
        },
    ))
}
