//! Frequency-selective MIMO channels for the serving and interfering
//! transmitters, interference occupancy, and receiver noise.

use alloc::string::String;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::link::grid::{ResourceGrid, SlotConfig, SC_PER_RB, SYMBOLS_PER_SLOT};
use crate::link::mcs::McsEntry;
use crate::numerics::{ComplexMatrix, C64};

pub const SUBCARRIER_SPACING_HZ: f64 = 15e3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChannelError {
    #[error("tap profile needs at least one tap")]
    NoTaps,
    #[error("delays and powers have different lengths ({delays} vs {powers})")]
    LengthMismatch { delays: usize, powers: usize },
    #[error("tap delays must be non-negative and strictly increasing")]
    Delays,
    #[error("tap powers must be non-negative with a positive sum")]
    Powers,
    #[error("doppler must be finite and non-negative")]
    Doppler,
}

/// Tapped-delay-line power delay profile.
#[derive(Debug, Clone, PartialEq)]
pub struct TapProfile {
    name: String,
    delays_s: Vec<f64>,
    powers: Vec<f64>,
    doppler_hz: f64,
}

impl TapProfile {
    /// `powers` are linear and get normalized to unit sum.
    pub fn new(
        name: impl Into<String>,
        delays_s: Vec<f64>,
        powers: Vec<f64>,
        doppler_hz: f64,
    ) -> Result<Self, ChannelError> {
        if delays_s.is_empty() {
            return Err(ChannelError::NoTaps);
        }
        if delays_s.len() != powers.len() {
            return Err(ChannelError::LengthMismatch {
                delays: delays_s.len(),
                powers: powers.len(),
            });
        }
        if delays_s[0] < 0.0 || !delays_s.iter().all(|d| d.is_finite()) || delays_s.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(ChannelError::Delays);
        }
        let total: f64 = powers.iter().sum();
        if powers.iter().any(|p| !p.is_finite() || *p < 0.0) || !(total > 0.0) {
            return Err(ChannelError::Powers);
        }
        if !doppler_hz.is_finite() || doppler_hz < 0.0 {
            return Err(ChannelError::Doppler);
        }
        Ok(Self {
            name: name.into(),
            delays_s,
            powers: powers.iter().map(|p| p / total).collect(),
            doppler_hz,
        })
    }

    /// Builds from delays in nanoseconds and powers in dB; taps are sorted.
    pub fn from_ns_db(name: &str, delays_ns: &[f64], powers_db: &[f64], doppler_hz: f64) -> Result<Self, ChannelError> {
        if delays_ns.len() != powers_db.len() {
            return Err(ChannelError::LengthMismatch {
                delays: delays_ns.len(),
                powers: powers_db.len(),
            });
        }
        let mut taps: Vec<(f64, f64)> = delays_ns
            .iter()
            .zip(powers_db)
            .map(|(d, p)| (d * 1e-9, db_to_linear(*p)))
            .collect();
        taps.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (delays, powers) = taps.into_iter().unzip();
        Self::new(name, delays, powers, doppler_hz)
    }

    /// Short delay spread, pedestrian-like (EPA taps, 5 Hz).
    pub fn epa() -> Self {
        Self::from_ns_db(
            "EPA-5",
            &[0.0, 30.0, 70.0, 90.0, 110.0, 190.0, 410.0],
            &[0.0, -1.0, -2.0, -3.0, -8.0, -17.2, -20.8],
            5.0,
        )
        .expect("valid preset")
    }

    /// Medium delay spread, vehicular-like (EVA taps, 30 Hz).
    pub fn eva() -> Self {
        Self::from_ns_db(
            "EVA-30",
            &[0.0, 30.0, 150.0, 310.0, 370.0, 710.0, 1090.0, 1730.0, 2510.0],
            &[0.0, -1.5, -1.4, -3.6, -0.6, -9.1, -7.0, -12.0, -16.9],
            30.0,
        )
        .expect("valid preset")
    }

    /// TDL-A shape at 30 ns delay spread, 30 Hz.
    pub fn tdla() -> Self {
        const NORM_DELAYS: [f64; 23] = [
            0.0, 0.3819, 0.4025, 0.5868, 0.4610, 0.5375, 0.6708, 0.5750, 0.7618, 1.5375, 1.8978, 2.2242, 2.1717,
            2.4942, 2.5119, 3.0582, 4.0810, 4.4579, 4.5695, 4.7966, 5.0066, 5.3043, 9.6586,
        ];
        const POWERS_DB: [f64; 23] = [
            -13.4, 0.0, -2.2, -4.0, -6.0, -8.2, -9.9, -10.5, -7.5, -15.9, -6.6, -16.7, -12.4, -15.2, -10.8, -11.3,
            -12.7, -16.2, -18.3, -18.9, -16.6, -19.9, -29.7,
        ];
        let delays: Vec<f64> = NORM_DELAYS.iter().map(|d| d * 30.0).collect();
        Self::from_ns_db("TDLA-30", &delays, &POWERS_DB, 30.0).expect("valid preset")
    }

    /// Looks up a shipped preset by name (case-insensitive, with or
    /// without the Doppler suffix).
    pub fn preset(name: &str) -> Option<Self> {
        let n = name.to_ascii_uppercase();
        match n.as_str() {
            "EPA" | "EPA-5" => Some(Self::epa()),
            "EVA" | "EVA-30" => Some(Self::eva()),
            "TDLA" | "TDLA-30" => Some(Self::tdla()),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn delays_s(&self) -> &[f64] {
        &self.delays_s
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn doppler_hz(&self) -> f64 {
        self.doppler_hz
    }

    pub fn rms_delay_spread_s(&self) -> f64 {
        let mean: f64 = self.delays_s.iter().zip(&self.powers).map(|(d, p)| d * p).sum();
        let second: f64 = self.delays_s.iter().zip(&self.powers).map(|(d, p)| d * d * p).sum();
        (second - mean * mean).max(0.0).sqrt()
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    if db == f64::NEG_INFINITY {
        0.0
    } else {
        10f64.powf(db / 10.0)
    }
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Which RBs the interferer occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OccupancyPattern {
    /// Occupancy-1: every other RB, starting at RB 0.
    Uniform,
    /// Occupancy-2: one contiguous block centred in the band.
    Concentrated,
    /// Occupancy-3: the whole band.
    FullBand,
}

impl OccupancyPattern {
    pub fn id(self) -> u8 {
        match self {
            Self::Uniform => 1,
            Self::Concentrated => 2,
            Self::FullBand => 3,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            1 => Some(Self::Uniform),
            2 => Some(Self::Concentrated),
            3 => Some(Self::FullBand),
            _ => None,
        }
    }
}

/// Per-RB interference flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyMask {
    interfered: Vec<bool>,
}

impl OccupancyMask {
    pub fn clean(num_rb: usize) -> Self {
        Self {
            interfered: alloc::vec![false; num_rb],
        }
    }

    pub fn num_rb(&self) -> usize {
        self.interfered.len()
    }

    #[inline]
    pub fn is_interfered(&self, rb: usize) -> bool {
        self.interfered[rb]
    }

    pub fn interfered_rbs(&self) -> impl Iterator<Item = usize> + '_ {
        self.interfered.iter().enumerate().filter(|(_, i)| **i).map(|(b, _)| b)
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.interfered
    }
}

/// Width of the concentrated (occupancy-2) block: ceil(B/10), at least 1.
pub fn concentrated_width(num_rb: usize) -> usize {
    num_rb.div_ceil(10).max(1)
}

pub fn make_occupancy(pattern: OccupancyPattern, num_rb: usize) -> OccupancyMask {
    assert!(num_rb >= 1, "occupancy needs at least one RB");
    let interfered = match pattern {
        OccupancyPattern::Uniform => (0..num_rb).map(|b| b % 2 == 0).collect(),
        OccupancyPattern::Concentrated => {
            let w = concentrated_width(num_rb);
            let start = (num_rb - w) / 2;
            (0..num_rb).map(|b| b >= start && b < start + w).collect()
        }
        OccupancyPattern::FullBand => alloc::vec![true; num_rb],
    };
    OccupancyMask { interfered }
}

/// One point of the scenario space.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub channel: TapProfile,
    /// `None` disables interference.
    pub occupancy: Option<OccupancyPattern>,
    pub num_rb: usize,
    pub snr_db: f64,
    /// `f64::INFINITY` disables interference.
    pub sir_db: f64,
    pub mcs: McsEntry,
    pub seed: u64,
}

impl Scenario {
    pub fn mask(&self) -> OccupancyMask {
        match self.occupancy {
            Some(p) if self.interference_enabled() => make_occupancy(p, self.num_rb),
            _ => OccupancyMask::clean(self.num_rb),
        }
    }

    pub fn interference_enabled(&self) -> bool {
        self.occupancy.is_some() && self.sir_db.is_finite()
    }

    /// Average per-element power of the serving channel.
    pub fn serving_power(&self) -> f64 {
        db_to_linear(self.snr_db)
    }

    /// Average per-element power of the interference channel.
    pub fn interference_power(&self) -> f64 {
        if self.sir_db == f64::INFINITY {
            0.0
        } else {
            db_to_linear(self.snr_db - self.sir_db)
        }
    }
}

/// Per-subcarrier channel matrices for one slot (block fading).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// N x M serving channel per subcarrier.
    pub serving: Vec<ComplexMatrix>,
    /// N x M' interference channel per subcarrier.
    pub interference: Vec<ComplexMatrix>,
    pub snr_db: f64,
    pub sir_db: f64,
}

impl ChannelRealization {
    pub fn num_sc(&self) -> usize {
        self.serving.len()
    }
}

#[inline]
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * s, im * s)
}

/// Frequency response over `num_sc` subcarriers of independent Rayleigh
/// taps for every antenna pair, scaled to `power` per element.
fn draw_response<R: Rng + ?Sized>(
    profile: &TapProfile,
    phasors: &[C64],
    num_sc: usize,
    rows: usize,
    cols: usize,
    power: f64,
    rng: &mut R,
) -> Vec<ComplexMatrix> {
    let taps = profile.powers.len();
    let amp = power.sqrt();
    let mut out: Vec<ComplexMatrix> = (0..num_sc).map(|_| ComplexMatrix::zeros(rows, cols)).collect();
    let mut gains = alloc::vec![C64::new(0.0, 0.0); taps];
    for r in 0..rows {
        for c in 0..cols {
            for (g, p) in gains.iter_mut().zip(&profile.powers) {
                *g = complex_normal(rng, *p) * amp;
            }
            for (k, m) in out.iter_mut().enumerate() {
                let ph = &phasors[k * taps..(k + 1) * taps];
                m[(r, c)] = gains.iter().zip(ph).map(|(g, e)| g * e).sum();
            }
        }
    }
    out
}

fn tap_phasors(profile: &TapProfile, num_sc: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(num_sc * profile.delays_s.len());
    for k in 0..num_sc {
        let f = k as f64 * SUBCARRIER_SPACING_HZ;
        for tau in &profile.delays_s {
            let ph = -2.0 * core::f64::consts::PI * f * tau;
            out.push(C64::new(ph.cos(), ph.sin()));
        }
    }
    out
}

/// Draws an independent serving and interference channel for one slot.
pub fn draw_channel<R: Rng + ?Sized>(scenario: &Scenario, cfg: &SlotConfig, rng: &mut R) -> ChannelRealization {
    let num_sc = cfg.num_sc();
    let phasors = tap_phasors(&scenario.channel, num_sc);
    let serving = draw_response(
        &scenario.channel,
        &phasors,
        num_sc,
        cfg.num_rx,
        cfg.num_layers,
        scenario.serving_power(),
        rng,
    );
    let ipow = if scenario.interference_enabled() {
        scenario.interference_power()
    } else {
        0.0
    };
    let interference = draw_response(
        &scenario.channel,
        &phasors,
        num_sc,
        cfg.num_rx,
        cfg.num_interferer_layers,
        ipow,
        rng,
    );
    ChannelRealization {
        serving,
        interference,
        snr_db: scenario.snr_db,
        sir_db: scenario.sir_db,
    }
}

/// i.i.d. CN(0, 1) samples in grid shape.
pub fn draw_noise<R: Rng + ?Sized>(num_sc: usize, num_sym: usize, num_rx: usize, rng: &mut R) -> ResourceGrid {
    let mut g = ResourceGrid::zeros(num_sc, num_sym, num_rx);
    for z in g.as_mut_slice() {
        *z = complex_normal(rng, 1.0);
    }
    g
}

/// Interference and noise terms of one received slot, kept separately so
/// tests can inspect the true interference-plus-noise.
#[derive(Debug, Clone)]
pub struct Impairments {
    /// `G x_I + n` per RE (zero interference outside the occupied RBs).
    pub interference_plus_noise: ResourceGrid,
}

/// Builds `G x_I + n` for every RE; interferer sends independent
/// unit-power QPSK on each of its layers.
pub fn draw_impairments<R: Rng + ?Sized>(
    cfg: &SlotConfig,
    channel: &ChannelRealization,
    mask: &OccupancyMask,
    noise: bool,
    rng: &mut R,
) -> Impairments {
    let num_sc = cfg.num_sc();
    let mi = cfg.num_interferer_layers;
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let mut grid = if noise {
        draw_noise(num_sc, SYMBOLS_PER_SLOT, cfg.num_rx, rng)
    } else {
        ResourceGrid::zeros(num_sc, SYMBOLS_PER_SLOT, cfg.num_rx)
    };
    let mut xi = alloc::vec![C64::new(0.0, 0.0); mi];
    for rb in mask.interfered_rbs() {
        for sym in 0..SYMBOLS_PER_SLOT {
            for sc in rb * SC_PER_RB..(rb + 1) * SC_PER_RB {
                for x in xi.iter_mut() {
                    let bits: u8 = rng.random::<u8>();
                    *x = C64::new(
                        if bits & 1 == 0 { s } else { -s },
                        if bits & 2 == 0 { s } else { -s },
                    );
                }
                let g = &channel.interference[sc];
                let re = grid.re_mut(sc, sym);
                for (n, y) in re.iter_mut().enumerate() {
                    for (m, x) in xi.iter().enumerate() {
                        *y += g[(n, m)] * x;
                    }
                }
            }
        }
    }
    Impairments {
        interference_plus_noise: grid,
    }
}

/// `y = H x + (G x_I + n)` over the whole slot.
pub fn receive(cfg: &SlotConfig, tx: &ResourceGrid, channel: &ChannelRealization, imp: &Impairments) -> ResourceGrid {
    let mut rx = imp.interference_plus_noise.clone();
    for sym in 0..SYMBOLS_PER_SLOT {
        for sc in 0..cfg.num_sc() {
            let h = &channel.serving[sc];
            let x = tx.re(sc, sym);
            let y = rx.re_mut(sc, sym);
            for (n, yn) in y.iter_mut().enumerate() {
                for (m, xm) in x.iter().enumerate() {
                    *yn += h[(n, m)] * xm;
                }
            }
        }
    }
    rx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link::mcs::McsTable;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scenario(profile: TapProfile, snr: f64, sir: f64, occ: Option<OccupancyPattern>) -> Scenario {
        Scenario {
            channel: profile,
            occupancy: occ,
            num_rb: 4,
            snr_db: snr,
            sir_db: sir,
            mcs: McsTable::representative().get(5).unwrap(),
            seed: 0,
        }
    }

    #[test]
    fn occupancy_patterns() {
        let m = make_occupancy(OccupancyPattern::FullBand, 20);
        assert_eq!(m.interfered_rbs().count(), 20);
        let m = make_occupancy(OccupancyPattern::Uniform, 4);
        assert_eq!(m.as_slice(), &[true, false, true, false]);
        let m = make_occupancy(OccupancyPattern::Concentrated, 100);
        let rbs: Vec<usize> = m.interfered_rbs().collect();
        assert_eq!(rbs, (45..55).collect::<Vec<_>>());
        let m = make_occupancy(OccupancyPattern::Concentrated, 20);
        assert_eq!(m.interfered_rbs().collect::<Vec<_>>(), alloc::vec![9, 10]);
        let m = make_occupancy(OccupancyPattern::Concentrated, 1);
        assert_eq!(m.as_slice(), &[true]);
        assert_eq!(make_occupancy(OccupancyPattern::Uniform, 7), make_occupancy(OccupancyPattern::Uniform, 7));
    }

    #[test]
    fn profile_validation() {
        assert_eq!(TapProfile::new("x", alloc::vec![], alloc::vec![], 0.0), Err(ChannelError::NoTaps));
        assert_eq!(
            TapProfile::new("x", alloc::vec![0.0, 0.0], alloc::vec![1.0, 1.0], 0.0),
            Err(ChannelError::Delays)
        );
        let p = TapProfile::new("x", alloc::vec![0.0, 1e-7], alloc::vec![3.0, 1.0], 5.0).unwrap();
        assert!((p.powers().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for preset in [TapProfile::epa(), TapProfile::eva(), TapProfile::tdla()] {
            assert!((preset.powers().iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!(preset.delays_s().windows(2).all(|w| w[1] > w[0]));
        }
        assert!(TapProfile::eva().rms_delay_spread_s() > TapProfile::epa().rms_delay_spread_s());
    }

    #[test]
    fn single_tap_is_flat() {
        let p = TapProfile::new("flat", alloc::vec![0.0], alloc::vec![1.0], 0.0).unwrap();
        let cfg = SlotConfig::new(4, 2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ch = draw_channel(&scenario(p, 0.0, 10.0, None), &cfg, &mut rng);
        for m in &ch.serving {
            assert!(m.sub(&ch.serving[0]).unwrap().frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn disabled_interference_is_zero() {
        let cfg = SlotConfig::new(4, 2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sc = scenario(TapProfile::epa(), 10.0, f64::INFINITY, Some(OccupancyPattern::FullBand));
        let ch = draw_channel(&sc, &cfg, &mut rng);
        assert!(ch.interference.iter().all(|g| g.frobenius_norm() == 0.0));
        assert_eq!(sc.mask().interfered_rbs().count(), 0);
    }

    #[test]
    fn channel_power_calibration() {
        let cfg = SlotConfig::new(1, 2, 2).unwrap();
        let sc = scenario(TapProfile::eva(), 6.0, 10.0, Some(OccupancyPattern::FullBand));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (mut ph, mut pg, mut n) = (0.0, 0.0, 0usize);
        for _ in 0..10_000 {
            let ch = draw_channel(&sc, &cfg, &mut rng);
            // one subcarrier per slot keeps draws independent
            ph += ch.serving[5].as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>();
            pg += ch.interference[5].as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>();
            n += 4;
        }
        let want_h = db_to_linear(6.0);
        let want_g = db_to_linear(-4.0);
        assert!((ph / n as f64 / want_h - 1.0).abs() < 0.05, "{}", ph / n as f64);
        assert!((pg / n as f64 / want_g - 1.0).abs() < 0.05, "{}", pg / n as f64);
    }

    #[test]
    fn frequency_correlation_decays() {
        // correlation oracle: E[H(f) H*(f + df)] / E|H|^2 over Monte Carlo draws
        let cfg = SlotConfig::new(50, 1, 1).unwrap();
        let profile = TapProfile::epa();
        let sc = scenario(profile.clone(), 0.0, 10.0, None);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        // coherence bandwidth ~ 1 / (5 * rms delay spread)
        let bc = 1.0 / (5.0 * profile.rms_delay_spread_s());
        let lag = (bc / SUBCARRIER_SPACING_HZ).ceil() as usize;
        let mut cross = C64::new(0.0, 0.0);
        let mut power = 0.0;
        for _ in 0..10_000 {
            let ch = draw_channel(&sc, &cfg, &mut rng);
            let a = ch.serving[0][(0, 0)];
            let b = ch.serving[lag][(0, 0)];
            cross += a * b.conj();
            power += a.norm_sqr();
        }
        let rho = cross.norm() / power;
        assert!(rho < 0.9, "lag {lag}: {rho}");
        // the adjacent subcarrier stays highly correlated
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut cross = C64::new(0.0, 0.0);
        let mut power = 0.0;
        for _ in 0..2_000 {
            let ch = draw_channel(&sc, &cfg, &mut rng);
            cross += ch.serving[0][(0, 0)] * ch.serving[1][(0, 0)].conj();
            power += ch.serving[0][(0, 0)].norm_sqr();
        }
        assert!(cross.norm() / power > 0.99);
    }

    #[test]
    fn noise_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let g = draw_noise(1000, 250, 2, &mut rng);
        let n = (1000 * 250) as f64;
        let mut var = [0.0; 2];
        let mut mean = [C64::new(0.0, 0.0); 2];
        let mut cross = C64::new(0.0, 0.0);
        for re in g.as_slice().chunks(2) {
            for a in 0..2 {
                var[a] += re[a].norm_sqr();
                mean[a] += re[a];
            }
            cross += re[0] * re[1].conj();
        }
        for a in 0..2 {
            assert!((var[a] / n - 1.0).abs() < 0.01);
            assert!((mean[a].re / n).abs() < 0.005 && (mean[a].im / n).abs() < 0.005);
        }
        assert!(cross.norm() / n < 0.01);
    }

    #[test]
    fn identical_seed_identical_realization() {
        let cfg = SlotConfig::new(4, 2, 2).unwrap();
        let sc = scenario(TapProfile::eva(), 3.0, 0.0, Some(OccupancyPattern::Uniform));
        let a = draw_channel(&sc, &cfg, &mut ChaCha8Rng::seed_from_u64(9));
        let b = draw_channel(&sc, &cfg, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn interference_only_on_masked_rbs() {
        let cfg = SlotConfig::new(4, 2, 2).unwrap();
        let sc = scenario(TapProfile::epa(), 20.0, 0.0, Some(OccupancyPattern::Uniform));
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let ch = draw_channel(&sc, &cfg, &mut rng);
        let imp = draw_impairments(&cfg, &ch, &sc.mask(), false, &mut rng);
        let g = &imp.interference_plus_noise;
        for sc_idx in 0..cfg.num_sc() {
            let rb = sc_idx / SC_PER_RB;
            let p: f64 = g.re(sc_idx, 3).iter().map(|z| z.norm_sqr()).sum();
            assert_eq!(p > 0.0, rb % 2 == 0);
        }
    }
}
