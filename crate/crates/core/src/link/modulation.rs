//! Gray-mapped square QAM and max-log soft demapping.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::numerics::C64;

/// Square QAM with per-dimension Gray-coded PAM.
///
/// Even bits of a symbol select the in-phase level, odd bits the
/// quadrature level, with the sign bit first.
#[derive(Debug, Clone)]
pub struct Qam {
    bits_per_symbol: usize,
    bits_per_dim: usize,
    /// PAM amplitude (already normalized) for each per-dimension bit pattern.
    levels: Vec<f64>,
}

impl Qam {
    pub fn new(bits_per_symbol: u8) -> Self {
        assert!(matches!(bits_per_symbol, 2 | 4 | 6 | 8), "unsupported QAM order");
        let m = bits_per_symbol as usize / 2;
        let avg_power = 2.0 * ((1u64 << (2 * m)) as f64 - 1.0) / 3.0;
        let scale = 1.0 / avg_power.sqrt();
        let levels = (0..1usize << m)
            .map(|pattern| pam_level(pattern, m) * scale)
            .collect();
        Self {
            bits_per_symbol: bits_per_symbol as usize,
            bits_per_dim: m,
            levels,
        }
    }

    #[inline]
    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    /// Maps `bits_per_symbol` bits (0/1) to one symbol.
    pub fn map(&self, bits: &[u8]) -> C64 {
        debug_assert_eq!(bits.len(), self.bits_per_symbol);
        let (mut pi, mut pq) = (0usize, 0usize);
        for j in 0..self.bits_per_dim {
            pi = (pi << 1) | bits[2 * j] as usize;
            pq = (pq << 1) | bits[2 * j + 1] as usize;
        }
        C64::new(self.levels[pi], self.levels[pq])
    }

    /// Every constellation point, in bit-pattern order.
    pub fn points(&self) -> Vec<C64> {
        let mut bits = alloc::vec![0u8; self.bits_per_symbol];
        (0..1usize << self.bits_per_symbol)
            .map(|p| {
                for (j, b) in bits.iter_mut().enumerate() {
                    *b = ((p >> (self.bits_per_symbol - 1 - j)) & 1) as u8;
                }
                self.map(&bits)
            })
            .collect()
    }

    /// Max-log LLRs of one symbol estimate with complex noise variance
    /// `noise_var`, appended to `out`. Positive values favour bit 0.
    pub fn demap(&self, r: C64, noise_var: f64, out: &mut Vec<f64>) {
        let start = out.len();
        out.resize(start + self.bits_per_symbol, 0.0);
        let inv = 1.0 / noise_var;
        self.demap_dim(r.re, inv, &mut out[start..], 0);
        self.demap_dim(r.im, inv, &mut out[start..], 1);
    }

    fn demap_dim(&self, x: f64, inv: f64, out: &mut [f64], parity: usize) {
        let m = self.bits_per_dim;
        let mut best0 = [f64::INFINITY; 4];
        let mut best1 = [f64::INFINITY; 4];
        for (pattern, &lvl) in self.levels.iter().enumerate() {
            let d = (x - lvl) * (x - lvl);
            for j in 0..m {
                if (pattern >> (m - 1 - j)) & 1 == 0 {
                    if d < best0[j] {
                        best0[j] = d;
                    }
                } else if d < best1[j] {
                    best1[j] = d;
                }
            }
        }
        for j in 0..m {
            out[2 * j + parity] = (best1[j] - best0[j]) * inv;
        }
    }
}

// (1-2c0)(2^{m-1} - (1-2c1)(2^{m-2} - ...)), the usual NR Gray PAM
fn pam_level(pattern: usize, m: usize) -> f64 {
    let sign = |j: usize| 1.0 - 2.0 * ((pattern >> (m - 1 - j)) & 1) as f64;
    let mut v = sign(m - 1);
    for j in (0..m - 1).rev() {
        v = sign(j) * ((1u64 << (m - 1 - j)) as f64 - v);
    }
    v
}
