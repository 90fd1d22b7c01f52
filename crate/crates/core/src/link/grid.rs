//! Slot geometry, the resource grid and the type-1 DMRS layout.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::numerics::C64;

pub const SC_PER_RB: usize = 12;
pub const SYMBOLS_PER_SLOT: usize = 14;
/// Comb-2 positions per RB per DMRS symbol.
pub const DMRS_PER_RB_SYMBOL: usize = 6;
/// Largest layer count the comb codes keep orthogonal.
pub const MAX_LAYERS: usize = DMRS_PER_RB_SYMBOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum SlotConfigError {
    #[error("number of resource blocks must be at least 1")]
    NoResourceBlocks,
    #[error("layer count {0} outside 1..={max}", max = MAX_LAYERS)]
    Layers(usize),
    #[error("receive antenna count {0} outside 1..=8")]
    RxAntennas(usize),
    #[error("layer count {layers} exceeds receive antennas {rx}")]
    LayersExceedRx { layers: usize, rx: usize },
    #[error("interferer layer count {0} outside 1..=8")]
    InterfererLayers(usize),
    #[error("DMRS symbols must be distinct and within 0..14")]
    DmrsSymbols,
}

/// Per-slot transmission geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotConfig {
    pub num_rb: usize,
    pub num_layers: usize,
    pub num_rx: usize,
    /// Spatial streams sent by the interfering transmitter.
    pub num_interferer_layers: usize,
    pub dmrs_symbols: [usize; 2],
}

impl SlotConfig {
    pub fn new(num_rb: usize, num_rx: usize, num_layers: usize) -> Result<Self, SlotConfigError> {
        let cfg = Self {
            num_rb,
            num_layers,
            num_rx,
            num_interferer_layers: num_layers,
            dmrs_symbols: [2, 11],
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_interferer_layers(mut self, layers: usize) -> Result<Self, SlotConfigError> {
        self.num_interferer_layers = layers;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), SlotConfigError> {
        if self.num_rb == 0 {
            return Err(SlotConfigError::NoResourceBlocks);
        }
        if self.num_layers == 0 || self.num_layers > MAX_LAYERS {
            return Err(SlotConfigError::Layers(self.num_layers));
        }
        if self.num_rx == 0 || self.num_rx > 8 {
            return Err(SlotConfigError::RxAntennas(self.num_rx));
        }
        if self.num_layers > self.num_rx {
            return Err(SlotConfigError::LayersExceedRx {
                layers: self.num_layers,
                rx: self.num_rx,
            });
        }
        if self.num_interferer_layers == 0 || self.num_interferer_layers > 8 {
            return Err(SlotConfigError::InterfererLayers(self.num_interferer_layers));
        }
        let [a, b] = self.dmrs_symbols;
        if a == b || a >= SYMBOLS_PER_SLOT || b >= SYMBOLS_PER_SLOT {
            return Err(SlotConfigError::DmrsSymbols);
        }
        Ok(())
    }

    #[inline]
    pub fn num_sc(&self) -> usize {
        self.num_rb * SC_PER_RB
    }

    #[inline]
    pub fn is_dmrs_symbol(&self, sym: usize) -> bool {
        self.dmrs_symbols.contains(&sym)
    }

    /// Symbols carrying data (every non-DMRS symbol, all subcarriers).
    pub fn data_symbols(&self) -> impl Iterator<Item = usize> + '_ {
        (0..SYMBOLS_PER_SLOT).filter(move |s| !self.is_dmrs_symbol(*s))
    }

    pub fn data_res_per_slot(&self) -> usize {
        (SYMBOLS_PER_SLOT - 2) * self.num_sc()
    }

    pub fn dmrs_res_per_rb(&self) -> usize {
        2 * DMRS_PER_RB_SYMBOL
    }

    pub fn dmrs_res_per_slot(&self) -> usize {
        self.dmrs_res_per_rb() * self.num_rb
    }

    /// DMRS positions of one RB as (subcarrier, symbol), in pilot index order.
    pub fn dmrs_positions(&self, rb: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.dmrs_symbols.iter().flat_map(move |&sym| {
            (0..DMRS_PER_RB_SYMBOL).map(move |c| (rb * SC_PER_RB + 2 * c, sym))
        })
    }
}

/// Complex samples indexed by (subcarrier, symbol, port).
///
/// A port is a receive antenna for received grids and a layer for
/// transmitted ones. The port vector of one RE is contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceGrid {
    num_sc: usize,
    num_sym: usize,
    ports: usize,
    data: Vec<C64>,
}

impl ResourceGrid {
    pub fn zeros(num_sc: usize, num_sym: usize, ports: usize) -> Self {
        Self {
            num_sc,
            num_sym,
            ports,
            data: vec![C64::new(0.0, 0.0); num_sc * num_sym * ports],
        }
    }

    #[inline]
    pub fn num_sc(&self) -> usize {
        self.num_sc
    }

    #[inline]
    pub fn num_sym(&self) -> usize {
        self.num_sym
    }

    #[inline]
    pub fn ports(&self) -> usize {
        self.ports
    }

    #[inline]
    fn offset(&self, sc: usize, sym: usize) -> usize {
        debug_assert!(sc < self.num_sc && sym < self.num_sym);
        (sym * self.num_sc + sc) * self.ports
    }

    #[inline]
    pub fn get(&self, sc: usize, sym: usize, port: usize) -> C64 {
        self.data[self.offset(sc, sym) + port]
    }

    #[inline]
    pub fn set(&mut self, sc: usize, sym: usize, port: usize, v: C64) {
        let o = self.offset(sc, sym);
        self.data[o + port] = v;
    }

    /// Port vector at one RE.
    #[inline]
    pub fn re(&self, sc: usize, sym: usize) -> &[C64] {
        let o = self.offset(sc, sym);
        &self.data[o..o + self.ports]
    }

    #[inline]
    pub fn re_mut(&mut self, sc: usize, sym: usize) -> &mut [C64] {
        let o = self.offset(sc, sym);
        let p = self.ports;
        &mut self.data[o..o + p]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Known DMRS pilot for `layer` at pilot index `k` (0..12) of `rb`.
///
/// A unit-modulus QPSK base sequence times a length-2 cover across the two
/// DMRS symbols and a length-3 DFT cover over the comb index. Layer `l` uses
/// time cover `l % 2` and frequency cover `l / 2`, so up to six layers stay
/// orthogonal over any three adjacent comb positions of both symbols.
pub fn dmrs_pilot(rb: usize, k: usize, layer: usize) -> C64 {
    let comb = k % DMRS_PER_RB_SYMBOL;
    let second_symbol = k >= DMRS_PER_RB_SYMBOL;
    let base = base_qpsk(rb * 2 * DMRS_PER_RB_SYMBOL + k);
    let td = if layer % 2 == 1 && second_symbol { -1.0 } else { 1.0 };
    let phase = 2.0 * core::f64::consts::PI * ((layer / 2) * (comb % FD_COVER)) as f64 / FD_COVER as f64;
    base * C64::new(td * phase.cos(), td * phase.sin())
}

/// Length of the frequency-domain cover.
pub const FD_COVER: usize = 3;

fn base_qpsk(n: usize) -> C64 {
    // xorshift-style scramble of the pilot index; fixed for all slots
    let mut x = (n as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^= x >> 31;
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let re = if x & 1 == 0 { s } else { -s };
    let im = if x & 2 == 0 { s } else { -s };
    C64::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_rb_has_twelve_dmrs_res() {
        let cfg = SlotConfig::new(1, 2, 2).unwrap();
        assert_eq!(cfg.dmrs_positions(0).count(), 12);
        assert_eq!(cfg.dmrs_res_per_slot(), 12);
        let cfg = SlotConfig::new(20, 4, 4).unwrap();
        assert_eq!(cfg.dmrs_res_per_slot(), 12 * 20);
        assert_eq!(cfg.data_res_per_slot(), 12 * 240);
    }

    #[test]
    fn dmrs_on_even_subcarriers_of_symbols_2_and_11() {
        let cfg = SlotConfig::new(2, 2, 1).unwrap();
        for (sc, sym) in cfg.dmrs_positions(1) {
            assert!(sc >= 12 && sc < 24 && sc % 2 == 0);
            assert!(sym == 2 || sym == 11);
        }
    }

    #[test]
    fn pilot_covers_are_orthogonal() {
        // over each half RB (three comb positions in both DMRS symbols)
        for l in 0..MAX_LAYERS {
            for m in 0..MAX_LAYERS {
                for half in 0..2 {
                    let s: C64 = (0..2)
                        .flat_map(|sym| (0..3).map(move |c| sym * 6 + half * 3 + c))
                        .map(|k| dmrs_pilot(3, k, l) * dmrs_pilot(3, k, m).conj())
                        .sum();
                    let want = if l == m { 6.0 } else { 0.0 };
                    assert!((s - C64::new(want, 0.0)).norm() < 1e-12, "{l} {m} {s}");
                }
            }
        }
    }

    #[test]
    fn pilots_have_unit_power() {
        for k in 0..12 {
            assert!((dmrs_pilot(5, k, 2).norm_sqr() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn config_validation() {
        assert_eq!(SlotConfig::new(0, 2, 2), Err(SlotConfigError::NoResourceBlocks));
        assert!(matches!(SlotConfig::new(4, 2, 4), Err(SlotConfigError::LayersExceedRx { .. })));
        let mut cfg = SlotConfig::new(4, 2, 2).unwrap();
        cfg.dmrs_symbols = [3, 3];
        assert_eq!(cfg.validate(), Err(SlotConfigError::DmrsSymbols));
    }
}
