use alloc::vec::Vec;

use super::grid::{dmrs_pilot, ResourceGrid, SlotConfig, DMRS_PER_RB_SYMBOL, FD_COVER, SC_PER_RB};
use crate::numerics::{hermitian_projection, hpd_inverse, ComplexMatrix, C64};

/// How the receiver obtains the channel used for residuals and detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EstimationMode {
    /// Least squares over the 12 DMRS REs of each RB; residuals against
    /// that smoothed estimate.
    #[default]
    LeastSquares,
    /// As `LeastSquares` for detection, but residuals are taken against a
    /// separate constant fit for each half RB (6 REs each).
    LeastSquaresRaw,
    /// The true channel; residuals are exactly `y - H x`.
    Genie,
}

/// Interference-plus-noise residual vectors at the DMRS REs of each RB.
#[derive(Debug, Clone, PartialEq)]
pub struct DmrsResiduals {
    num_rx: usize,
    per_rb: Vec<Vec<C64>>,
}

impl DmrsResiduals {
    /// `per_rb[b]` holds the residual vectors of RB `b` back to back.
    pub fn new(num_rx: usize, per_rb: Vec<Vec<C64>>) -> Self {
        assert!(num_rx > 0);
        assert!(per_rb.iter().all(|v| v.len() % num_rx == 0));
        Self { num_rx, per_rb }
    }

    pub fn num_rx(&self) -> usize {
        self.num_rx
    }

    pub fn num_rb(&self) -> usize {
        self.per_rb.len()
    }

    pub fn count(&self, rb: usize) -> usize {
        self.per_rb[rb].len() / self.num_rx
    }

    pub fn vectors(&self, rb: usize) -> impl Iterator<Item = &[C64]> {
        self.per_rb[rb].chunks_exact(self.num_rx)
    }
}

/// Channel estimate per subcarrier plus the DMRS residuals.
#[derive(Debug, Clone)]
pub struct ChannelEstimate {
    /// N x M estimate for every subcarrier.
    pub per_sc: Vec<ComplexMatrix>,
    pub residuals: DmrsResiduals,
}

/// Least-squares channel model over one RB: a constant term per antenna and
/// layer, plus a linear-in-frequency term when there are enough pilots.
struct RbFit {
    rb: usize,
    constant: ComplexMatrix,
    slope: Option<ComplexMatrix>,
}

impl RbFit {
    fn at(&self, sc: usize) -> ComplexMatrix {
        match &self.slope {
            None => self.constant.clone(),
            Some(s) => {
                let x = centered(self.rb, sc);
                ComplexMatrix::from_fn(s.rows(), s.cols(), |r, c| self.constant[(r, c)] + s[(r, c)] * x)
            }
        }
    }
}

/// Subcarrier offset from the RB centre in units of one RB.
fn centered(rb: usize, sc: usize) -> f64 {
    (sc as f64 - (rb * SC_PER_RB) as f64 - (SC_PER_RB as f64 - 1.0) / 2.0) / SC_PER_RB as f64
}

/// Fits the RB model to the pilots at DMRS indices `ks`; the slope term is
/// used when allowed and there are at least three pilots per layer.
fn ls_fit(rx: &ResourceGrid, cfg: &SlotConfig, rb: usize, ks: &[usize], allow_slope: bool) -> RbFit {
    let n = cfg.num_rx;
    let m = cfg.num_layers;
    let positions: Vec<(usize, usize)> = cfg.dmrs_positions(rb).collect();
    let linear = allow_slope && 3 * m <= ks.len();
    let p = if linear { 2 * m } else { m };
    // regressor row of each pilot RE
    let rows: Vec<Vec<C64>> = ks
        .iter()
        .map(|&k| {
            let x = centered(rb, positions[k].0);
            let mut row: Vec<C64> = (0..m).map(|l| dmrs_pilot(rb, k, l)).collect();
            if linear {
                row.extend((0..m).map(|l| dmrs_pilot(rb, k, l) * x));
            }
            row
        })
        .collect();
    let mut gram = ComplexMatrix::zeros(p, p);
    for row in &rows {
        for i in 0..p {
            for j in 0..p {
                gram[(i, j)] += row[i].conj() * row[j];
            }
        }
    }
    let gram = hermitian_projection(&gram).expect("square");
    let inv = hpd_inverse(&gram).expect("pilot regressors are linearly independent");
    let mut corr = ComplexMatrix::zeros(n, p);
    for (row, &k) in rows.iter().zip(ks) {
        let (sc, sym) = positions[k];
        for (r, yr) in rx.re(sc, sym).iter().enumerate() {
            for j in 0..p {
                corr[(r, j)] += yr * row[j].conj();
            }
        }
    }
    // theta = G^-1 A^H y per antenna, i.e. corr times the transpose of G^-1,
    // which for Hermitian G^-1 is its elementwise conjugate
    let inv_t = ComplexMatrix::from_fn(p, p, |i, j| inv[(i, j)].conj());
    let coef = corr.matmul(&inv_t).expect("shapes");
    let constant = ComplexMatrix::from_fn(n, m, |r, c| coef[(r, c)]);
    let slope = linear.then(|| ComplexMatrix::from_fn(n, m, |r, c| coef[(r, m + c)]));
    RbFit { rb, constant, slope }
}

fn residual(rx: &ResourceGrid, cfg: &SlotConfig, h: &ComplexMatrix, rb: usize, k: usize, pos: (usize, usize), out: &mut Vec<C64>) {
    let y = rx.re(pos.0, pos.1);
    for (r, yr) in y.iter().enumerate() {
        let mut v = *yr;
        for l in 0..cfg.num_layers {
            v -= h[(r, l)] * dmrs_pilot(rb, k, l);
        }
        out.push(v);
    }
}

/// Estimates the serving channel from DMRS and forms residuals
/// `v = y - H_est x` at every DMRS RE.
///
/// `truth` must be supplied for [`EstimationMode::Genie`].
pub fn estimate_channel(
    rx: &ResourceGrid,
    cfg: &SlotConfig,
    mode: EstimationMode,
    truth: Option<&[ComplexMatrix]>,
) -> ChannelEstimate {
    let per_sc = match mode {
        EstimationMode::Genie => truth.expect("genie estimation needs the true channel").to_vec(),
        _ => {
            let mut per_sc = Vec::with_capacity(cfg.num_sc());
            for rb in 0..cfg.num_rb {
                let all: Vec<usize> = (0..cfg.dmrs_res_per_rb()).collect();
                let fit = ls_fit(rx, cfg, rb, &all, true);
                per_sc.extend((rb * SC_PER_RB..(rb + 1) * SC_PER_RB).map(|sc| fit.at(sc)));
            }
            per_sc
        }
    };
    let mut residuals = Vec::with_capacity(cfg.num_rb);
    for rb in 0..cfg.num_rb {
        let positions: Vec<(usize, usize)> = cfg.dmrs_positions(rb).collect();
        let mut v = Vec::with_capacity(positions.len() * cfg.num_rx);
        if mode == EstimationMode::LeastSquaresRaw {
            let halves: Vec<ComplexMatrix> = (0..2)
                .map(|half| {
                    let ks: Vec<usize> = (0..2)
                        .flat_map(|sym| (0..FD_COVER).map(move |c| sym * DMRS_PER_RB_SYMBOL + half * FD_COVER + c))
                        .collect();
                    ls_fit(rx, cfg, rb, &ks, false).constant
                })
                .collect();
            for (k, &pos) in positions.iter().enumerate() {
                let half = (k % DMRS_PER_RB_SYMBOL) / FD_COVER;
                residual(rx, cfg, &halves[half], rb, k, pos, &mut v);
            }
        } else {
            for (k, &pos) in positions.iter().enumerate() {
                residual(rx, cfg, &per_sc[pos.0], rb, k, pos, &mut v);
            }
        }
        residuals.push(v);
    }
    ChannelEstimate {
        per_sc,
        residuals: DmrsResiduals::new(cfg.num_rx, residuals),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{draw_channel, draw_impairments, receive, Scenario, TapProfile};
    use crate::link::{build_tx_slot, coding_plan, random_payload, McsTable};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(snr: f64, noise: bool, seed: u64) -> (SlotConfig, ResourceGrid, crate::channel::ChannelRealization, ResourceGrid) {
        let cfg = SlotConfig::new(4, 2, 2).unwrap();
        let mcs = McsTable::representative().get(5).unwrap();
        let sc = Scenario {
            channel: TapProfile::epa(),
            occupancy: None,
            num_rb: 4,
            snr_db: snr,
            sir_db: f64::INFINITY,
            mcs,
            seed,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = draw_channel(&sc, &cfg, &mut rng);
        let plan = coding_plan(&cfg, &mcs).unwrap();
        let tx = build_tx_slot(&cfg, &mcs, &random_payload(&plan, &mut rng)).unwrap();
        let imp = draw_impairments(&cfg, &ch, &sc.mask(), noise, &mut rng);
        let rx = receive(&cfg, &tx.grid, &ch, &imp);
        (cfg, rx, ch, imp.interference_plus_noise)
    }

    #[test]
    fn linear_channel_is_recovered_exactly_without_noise() {
        use crate::link::{build_tx_slot, coding_plan, random_payload};
        for m in 1..=4 {
            let cfg = SlotConfig::new(3, 4, m).unwrap();
            let mcs = McsTable::representative().get(5).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            let plan = coding_plan(&cfg, &mcs).unwrap();
            let tx = build_tx_slot(&cfg, &mcs, &random_payload(&plan, &mut rng)).unwrap();
            let a = ComplexMatrix::from_fn(4, m, |r, c| C64::new(r as f64 + 1.0, c as f64 - 0.5));
            let b = ComplexMatrix::from_fn(4, m, |r, c| C64::new(0.1 * c as f64, -0.2 * r as f64));
            let truth: Vec<ComplexMatrix> = (0..cfg.num_sc())
                .map(|sc| ComplexMatrix::from_fn(4, m, |r, c| a[(r, c)] + b[(r, c)] * sc as f64))
                .collect();
            let mut rx = ResourceGrid::zeros(cfg.num_sc(), 14, 4);
            for sc in 0..cfg.num_sc() {
                for sym in 0..14 {
                    let y = truth[sc].matmul(&ComplexMatrix::column(tx.grid.re(sc, sym))).unwrap();
                    rx.re_mut(sc, sym).copy_from_slice(y.as_slice());
                }
            }
            let est = estimate_channel(&rx, &cfg, EstimationMode::LeastSquares, None);
            for sc in 0..cfg.num_sc() {
                let err = est.per_sc[sc].sub(&truth[sc]).unwrap().frobenius_norm();
                assert!(err < 1e-9, "m={m} sc={sc} err={err}");
            }
            for rb in 0..cfg.num_rb {
                assert!(est.residuals.vectors(rb).all(|v| v.iter().all(|z| z.norm() < 1e-9)));
            }
        }
    }

    #[test]
    fn genie_noiseless_residual_is_zero() {
        let (cfg, rx, ch, _) = setup(10.0, false, 1);
        let est = estimate_channel(&rx, &cfg, EstimationMode::Genie, Some(&ch.serving));
        for rb in 0..cfg.num_rb {
            assert_eq!(est.residuals.count(rb), 12);
            for v in est.residuals.vectors(rb) {
                assert!(v.iter().all(|z| z.norm() < 1e-12));
            }
        }
    }

    #[test]
    fn genie_residual_equals_injected_noise() {
        let (cfg, rx, ch, noise) = setup(10.0, true, 2);
        let est = estimate_channel(&rx, &cfg, EstimationMode::Genie, Some(&ch.serving));
        for rb in 0..cfg.num_rb {
            for (v, (sc, sym)) in est.residuals.vectors(rb).zip(cfg.dmrs_positions(rb)) {
                let n = noise.re(sc, sym);
                for (a, b) in v.iter().zip(n) {
                    assert!((a - b).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn least_squares_is_accurate_at_high_snr() {
        // Monte Carlo estimation-error oracle
        let mut total = 0.0;
        let slots = 1000;
        for s in 0..slots {
            let (cfg, rx, ch, _) = setup(40.0, true, 100 + s);
            let est = estimate_channel(&rx, &cfg, EstimationMode::LeastSquares, None);
            let mut e = 0.0;
            let mut p = 0.0;
            for rb in 0..cfg.num_rb {
                let sc = rb * SC_PER_RB + 6;
                e += est.per_sc[sc].sub(&ch.serving[sc]).unwrap().frobenius_norm().powi(2);
                p += ch.serving[sc].frobenius_norm().powi(2);
            }
            total += (e / p).sqrt();
        }
        let avg = total / slots as f64;
        assert!(avg <= 0.05, "{avg}");
    }

    #[test]
    fn raw_residuals_are_orthogonal_to_half_rb_pilots() {
        let (cfg, rx, _, _) = setup(10.0, true, 3);
        let a = estimate_channel(&rx, &cfg, EstimationMode::LeastSquares, None);
        let b = estimate_channel(&rx, &cfg, EstimationMode::LeastSquaresRaw, None);
        assert_eq!(a.per_sc, b.per_sc);
        for rb in 0..cfg.num_rb {
            // residuals come in DMRS order
            let v: Vec<&[C64]> = b.residuals.vectors(rb).collect();
            for half in 0..2 {
                for l in 0..cfg.num_layers {
                    for r in 0..cfg.num_rx {
                        let s: C64 = [0, 1, 2, 6, 7, 8]
                            .iter()
                            .map(|&k| k + 3 * half)
                            .map(|k| v[k][r] * dmrs_pilot(rb, k, l).conj())
                            .sum();
                        assert!(s.norm() < 1e-9, "{s}");
                    }
                }
            }
        }
    }
}
