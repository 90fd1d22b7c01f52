use alloc::vec::Vec;


use super::fec::{decode_block, CodingPlan};
use super::grid::{ResourceGrid, SlotConfig};
use super::mcs::McsEntry;
use super::modulation::Qam;
use crate::numerics::{hermitian_projection, hpd_inverse, ComplexMatrix, C64};

/// CRC flag and soft-output statistics of one decoded slot.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub crc_pass: bool,
    pub decoded_bits: Vec<u8>,
    pub mean_abs_llr: f64,
}

/// Linear MMSE filter for one subcarrier, assuming unit noise.
struct MmseFilter {
    /// Rows already divided by the per-layer gain (unbiased output).
    weights: ComplexMatrix,
    /// Post-equalization noise variance per layer.
    noise_var: Vec<f64>,
}

fn mmse_filter(h: &ComplexMatrix) -> MmseFilter {
    let m = h.cols();
    let hh = h.conj_transpose();
    let mut gram = hh.matmul(h).expect("shapes");
    for l in 0..m {
        gram[(l, l)] += C64::new(1.0, 0.0);
    }
    let gram = hermitian_projection(&gram).expect("square");
    let inv = hpd_inverse(&gram).expect("gram + I is positive definite");
    let mut weights = inv.matmul(&hh).expect("shapes");
    let mut noise_var = Vec::with_capacity(m);
    for l in 0..m {
        // gain mu = 1 - [ (H^H H + I)^-1 ]_ll
        let mu = (1.0 - inv[(l, l)].re).clamp(1e-12, 1.0 - 1e-15);
        for c in 0..weights.cols() {
            weights[(l, c)] /= mu;
        }
        noise_var.push((1.0 - mu) / mu);
    }
    MmseFilter { weights, noise_var }
}

/// MMSE equalization, max-log demapping, and transport-block decoding.
///
/// `rx` and `channel` are the (whitened) received grid and the per-subcarrier
/// channel; post-whitening noise is taken as unit variance.
pub fn detect_and_decode(
    rx: &ResourceGrid,
    channel: &[ComplexMatrix],
    mcs: &McsEntry,
    cfg: &SlotConfig,
    plan: &CodingPlan,
) -> DecodeResult {
    let qam = Qam::new(mcs.modulation_order);
    let filters: Vec<MmseFilter> = channel.iter().map(mmse_filter).collect();
    let m = cfg.num_layers;
    let mut llrs = Vec::with_capacity(plan.coded_bits);
    let mut xhat = alloc::vec![C64::new(0.0, 0.0); m];
    for (sc, sym) in super::data_res(cfg) {
        let f = &filters[sc];
        let y = rx.re(sc, sym);
        for (l, x) in xhat.iter_mut().enumerate() {
            let mut s = C64::new(0.0, 0.0);
            for (n, yn) in y.iter().enumerate() {
                s += f.weights[(l, n)] * yn;
            }
            *x = s;
        }
        for l in 0..m {
            qam.demap(xhat[l], f.noise_var[l], &mut llrs);
        }
    }
    debug_assert_eq!(llrs.len(), plan.coded_bits);
    let mean_abs_llr = llrs.iter().map(|l| l.abs()).sum::<f64>() / llrs.len().max(1) as f64;
    let block = decode_block(plan, &llrs);
    DecodeResult {
        crc_pass: block.crc_pass,
        decoded_bits: block.payload,
        mean_abs_llr,
    }
}
