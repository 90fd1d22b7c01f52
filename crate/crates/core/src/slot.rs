//! One simulated slot end to end: draw, receive, estimate, then whiten and
//! decode under any number of whitening options from the same observation.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{draw_channel, draw_impairments, receive, ChannelRealization, Scenario};
use crate::iw::{estimate_rb_covariance, whiten_slot, CovarianceSet, IwError, IwOption, WhitenReport};
use crate::link::{
    build_tx_slot, coding_plan, detect_and_decode, estimate_channel, random_payload, ChannelEstimate, CodingPlan,
    EstimationMode, LinkError, ResourceGrid, SlotConfig,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SlotError {
    #[error("scenario has {scenario} RBs but the slot config has {config}")]
    RbMismatch { scenario: usize, config: usize },
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error(transparent)]
    Iw(#[from] IwError),
}

/// Random stream for slot `slot` of a scenario seeded with `seed`.
///
/// The stream depends only on the pair, so every SNR point and every
/// whitening option of a scenario sees the same draws.
pub fn slot_rng(seed: u64, slot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(slot);
    rng
}

/// Everything the receiver has after channel estimation.
#[derive(Debug, Clone)]
pub struct SlotObservation {
    pub cfg: SlotConfig,
    pub plan: CodingPlan,
    pub payload: Vec<u8>,
    pub channel: ChannelRealization,
    pub rx: ResourceGrid,
    pub estimate: ChannelEstimate,
    pub covariance: CovarianceSet,
}

/// Draws and receives slot `slot` of `scenario`.
pub fn observe_slot(
    scenario: &Scenario,
    cfg: &SlotConfig,
    mode: EstimationMode,
    slot: u64,
) -> Result<SlotObservation, SlotError> {
    if scenario.num_rb != cfg.num_rb {
        return Err(SlotError::RbMismatch {
            scenario: scenario.num_rb,
            config: cfg.num_rb,
        });
    }
    let mut rng = slot_rng(scenario.seed, slot);
    let plan = coding_plan(cfg, &scenario.mcs)?;
    let channel = draw_channel(scenario, cfg, &mut rng);
    let payload = random_payload(&plan, &mut rng);
    let tx = build_tx_slot(cfg, &scenario.mcs, &payload)?;
    let imp = draw_impairments(cfg, &channel, &scenario.mask(), true, &mut rng);
    let rx = receive(cfg, &tx.grid, &channel, &imp);
    let truth = matches!(mode, EstimationMode::Genie).then_some(channel.serving.as_slice());
    let estimate = estimate_channel(&rx, cfg, mode, truth);
    let covariance = estimate_rb_covariance(&estimate.residuals)?;
    Ok(SlotObservation {
        cfg: *cfg,
        plan,
        payload,
        channel,
        rx,
        estimate,
        covariance,
    })
}

/// Decoding outcome under one whitening option.
#[derive(Debug, Clone)]
pub struct OptionOutcome {
    pub option: IwOption,
    /// CRC passed and the payload matches what was sent.
    pub success: bool,
    pub crc_pass: bool,
    pub report: WhitenReport,
}

impl SlotObservation {
    pub fn decode(&self, option: IwOption, mcs: &crate::link::McsEntry) -> Result<OptionOutcome, SlotError> {
        let (w, report) = whiten_slot(&self.rx, &self.estimate.per_sc, &self.covariance, option)?;
        let res = detect_and_decode(&w.grid, &w.channel, mcs, &self.cfg, &self.plan);
        Ok(OptionOutcome {
            option,
            success: res.crc_pass && res.decoded_bits == self.payload,
            crc_pass: res.crc_pass,
            report,
        })
    }

    /// Success flags for the three options in complexity order.
    pub fn crc_triple(&self, mcs: &crate::link::McsEntry) -> Result<[bool; 3], SlotError> {
        let mut out = [false; 3];
        for o in IwOption::ALL {
            out[o.index()] = self.decode(o, mcs)?.success;
        }
        Ok(out)
    }
}
