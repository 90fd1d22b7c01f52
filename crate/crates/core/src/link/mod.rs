//! Per-slot transmit and receive chain around the whitening stage.

pub mod fec;
pub mod grid;
pub mod mcs;
pub mod modulation;

mod detect;
mod estimate;

use alloc::vec::Vec;

pub use detect::{detect_and_decode, DecodeResult};
pub use estimate::{estimate_channel, ChannelEstimate, DmrsResiduals, EstimationMode};
pub use fec::CodingPlan;
pub use grid::{ResourceGrid, SlotConfig, SC_PER_RB, SYMBOLS_PER_SLOT};
pub use mcs::{McsEntry, McsTable};
pub use modulation::Qam;

use grid::dmrs_pilot;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinkError {
    #[error("payload of {given} bits does not match transport capacity of {capacity} bits")]
    PayloadTooLarge { given: usize, capacity: usize },
    #[error("slot cannot carry any payload at this MCS")]
    NoCapacity,
}

/// Coded bits carried by one slot.
pub fn coded_bits_per_slot(cfg: &SlotConfig, mcs: &McsEntry) -> usize {
    cfg.data_res_per_slot() * cfg.num_layers * mcs.modulation_order as usize
}

pub fn coding_plan(cfg: &SlotConfig, mcs: &McsEntry) -> Result<CodingPlan, LinkError> {
    CodingPlan::new(coded_bits_per_slot(cfg, mcs), mcs.code_rate).ok_or(LinkError::NoCapacity)
}

/// Transmitted slot: one grid port per layer.
#[derive(Debug, Clone)]
pub struct TxSlot {
    pub grid: ResourceGrid,
    pub plan: CodingPlan,
}

/// Data REs in mapping order: symbol-major, then subcarrier.
pub(crate) fn data_res(cfg: &SlotConfig) -> impl Iterator<Item = (usize, usize)> + '_ {
    cfg.data_symbols().flat_map(move |sym| (0..cfg.num_sc()).map(move |sc| (sc, sym)))
}

/// Maps DMRS pilots and the coded payload onto the slot grid.
///
/// Coded bits fill QAM symbols layer-first within each data RE.
pub fn build_tx_slot(cfg: &SlotConfig, mcs: &McsEntry, payload: &[u8]) -> Result<TxSlot, LinkError> {
    let plan = coding_plan(cfg, mcs)?;
    if payload.len() != plan.payload_bits {
        return Err(LinkError::PayloadTooLarge {
            given: payload.len(),
            capacity: plan.payload_bits,
        });
    }
    let mut grid = ResourceGrid::zeros(cfg.num_sc(), SYMBOLS_PER_SLOT, cfg.num_layers);
    for rb in 0..cfg.num_rb {
        for (k, (sc, sym)) in cfg.dmrs_positions(rb).enumerate() {
            for l in 0..cfg.num_layers {
                grid.set(sc, sym, l, dmrs_pilot(rb, k, l));
            }
        }
    }
    let coded = fec::encode_block(&plan, payload);
    let qam = Qam::new(mcs.modulation_order);
    let q = qam.bits_per_symbol();
    let mut chunks = coded.chunks_exact(q);
    for (sc, sym) in data_res(cfg) {
        for l in 0..cfg.num_layers {
            let bits = chunks.next().expect("capacity matches data REs");
            grid.set(sc, sym, l, qam.map(bits));
        }
    }
    debug_assert!(chunks.next().is_none());
    Ok(TxSlot { grid, plan })
}

/// Random payload of the planned size.
pub fn random_payload<R: rand::Rng + ?Sized>(plan: &CodingPlan, rng: &mut R) -> Vec<u8> {
    let mut out = Vec::with_capacity(plan.payload_bits);
    while out.len() < plan.payload_bits {
        let w: u64 = rng.random();
        let take = (plan.payload_bits - out.len()).min(64);
        out.extend((0..take).map(|i| ((w >> i) & 1) as u8));
    }
    out
}
