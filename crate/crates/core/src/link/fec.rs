//! Transport-block coding: CRC-16, a terminated K=7 (133, 171) convolutional
//! code with soft-decision Viterbi decoding, rate matching by puncturing or
//! repetition, and a fixed bit interleaver.

use alloc::vec;
use alloc::vec::Vec;

use crc::{Crc, CRC_16_IBM_3740};
#[cfg(not(feature = "std"))]
use num_traits::Float;

pub const CRC_BITS: usize = 16;
pub const CONSTRAINT_LENGTH: usize = 7;
pub const TAIL_BITS: usize = CONSTRAINT_LENGTH - 1;
const NUM_STATES: usize = 1 << TAIL_BITS;
const POLY_A: u32 = 0o133;
const POLY_B: u32 = 0o171;
/// Saturation applied to channel LLRs before decoding.
pub const LLR_CLIP: f64 = 50.0;

const CRC16: Crc<u16> = Crc::<u16>::new(&CRC_16_IBM_3740);

/// Sizes of one coded transport block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodingPlan {
    /// Payload bits (multiple of 8).
    pub payload_bits: usize,
    /// Coded bits carried by the slot.
    pub coded_bits: usize,
}

impl CodingPlan {
    /// Largest byte-aligned payload whose rate after CRC is at most `code_rate`.
    pub fn new(coded_bits: usize, code_rate: f64) -> Option<Self> {
        let with_crc = (code_rate * coded_bits as f64).floor() as usize;
        let payload = with_crc.checked_sub(CRC_BITS)? / 8 * 8;
        if payload == 0 {
            return None;
        }
        Some(Self {
            payload_bits: payload,
            coded_bits,
        })
    }

    /// Length of the unpunctured mother codeword.
    pub fn mother_bits(&self) -> usize {
        2 * (self.payload_bits + CRC_BITS + TAIL_BITS)
    }

    pub fn effective_rate(&self) -> f64 {
        (self.payload_bits + CRC_BITS) as f64 / self.coded_bits as f64
    }
}

fn pack_bytes(bits: &[u8]) -> Vec<u8> {
    bits.chunks(8)
        .map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | (b & 1)))
        .collect()
}

pub fn crc16(bits: &[u8]) -> u16 {
    debug_assert_eq!(bits.len() % 8, 0);
    CRC16.checksum(&pack_bytes(bits))
}

/// Payload followed by its CRC, most significant bit first.
pub fn attach_crc(payload: &[u8]) -> Vec<u8> {
    let crc = crc16(payload);
    let mut out = Vec::with_capacity(payload.len() + CRC_BITS);
    out.extend_from_slice(payload);
    out.extend((0..CRC_BITS).rev().map(|i| ((crc >> i) & 1) as u8));
    out
}

/// True when the trailing 16 bits match the CRC of the rest.
pub fn check_crc(block: &[u8]) -> bool {
    if block.len() < CRC_BITS {
        return false;
    }
    let (payload, tail) = block.split_at(block.len() - CRC_BITS);
    let rx = tail.iter().fold(0u16, |acc, &b| (acc << 1) | b as u16);
    crc16(payload) == rx
}

#[inline]
fn parity(x: u32) -> u8 {
    (x.count_ones() & 1) as u8
}

/// Rate-1/2 encoding with six zero tail bits; output interleaves (A, B).
pub fn conv_encode(bits: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(2 * (bits.len() + TAIL_BITS));
    let mut state = 0u32;
    for &b in bits.iter().chain(core::iter::repeat_n(&0u8, TAIL_BITS)) {
        let reg = ((b as u32) << TAIL_BITS) | state;
        out.push(parity(reg & POLY_A));
        out.push(parity(reg & POLY_B));
        state = reg >> 1;
    }
    out
}

/// Soft-decision Viterbi decoder for [`conv_encode`].
///
/// `llrs` holds two values per trellis step (tail included), positive
/// meaning bit 0. Returns the information bits without the tail.
pub fn viterbi_decode(llrs: &[f64]) -> Vec<u8> {
    assert!(llrs.len() % 2 == 0 && llrs.len() >= 2 * TAIL_BITS);
    let steps = llrs.len() / 2;
    // Both generators tap the newest and the oldest register bit, so the two
    // branches into a state pair (j, j + 32) from (2j, 2j + 1) carry metrics
    // +x, -x, -x, +x where x depends on the outputs for register 2j alone.
    const HALF: usize = NUM_STATES / 2;
    let mut sign_a = [0.0f64; HALF];
    let mut sign_b = [0.0f64; HALF];
    for j in 0..HALF {
        let reg = (2 * j) as u32;
        sign_a[j] = 1.0 - 2.0 * parity(reg & POLY_A) as f64;
        sign_b[j] = 1.0 - 2.0 * parity(reg & POLY_B) as f64;
    }
    let mut even = [f64::NEG_INFINITY; HALF];
    let mut odd = [f64::NEG_INFINITY; HALF];
    even[0] = 0.0;
    let mut decisions: Vec<u64> = vec![0; steps];
    let mut next = [0.0f64; NUM_STATES];
    let mut pick = [false; NUM_STATES];
    for t in 0..steps {
        let la = llrs[2 * t];
        let lb = llrs[2 * t + 1];
        for j in 0..HALF {
            let x = sign_a[j] * la + sign_b[j] * lb;
            let (m0, m1) = (even[j] + x, odd[j] - x);
            let (n0, n1) = (even[j] - x, odd[j] + x);
            pick[j] = m1 > m0;
            next[j] = if m1 > m0 { m1 } else { m0 };
            pick[j + HALF] = n1 > n0;
            next[j + HALF] = if n1 > n0 { n1 } else { n0 };
        }
        decisions[t] = pick.iter().rev().fold(0u64, |acc, &d| (acc << 1) | d as u64);
        for j in 0..HALF {
            even[j] = next[2 * j];
            odd[j] = next[2 * j + 1];
        }
        if t % 256 == 255 && even[0].is_finite() {
            let top = even[0];
            for m in even.iter_mut().chain(odd.iter_mut()) {
                *m -= top;
            }
        }
    }
    // terminated: trace back from state 0
    let mut bits = vec![0u8; steps];
    let mut ns = 0usize;
    for t in (0..steps).rev() {
        bits[t] = (ns >> (TAIL_BITS - 1)) as u8;
        let x = ((decisions[t] >> ns) & 1) as usize;
        ns = ((ns << 1) & (NUM_STATES - 1)) | x;
    }
    bits.truncate(steps - TAIL_BITS);
    bits
}

/// Position in the mother codeword of each transmitted coded bit.
///
/// When puncturing, both encoder outputs are thinned evenly with a
/// half-period offset between them; when repeating, the mother codeword is
/// read cyclically.
pub fn rate_match_pattern(mother_bits: usize, coded_bits: usize) -> Vec<usize> {
    if coded_bits >= mother_bits {
        return (0..coded_bits).map(|i| i % mother_bits).collect();
    }
    let steps = mother_bits / 2;
    let keep_a = coded_bits.div_ceil(2);
    let keep_b = coded_bits - keep_a;
    let pick = |keep: usize, offset: f64| {
        (0..keep).map(move |i| {
            let pos = ((i as f64 + offset) * steps as f64 / keep as f64).floor() as usize;
            pos.min(steps - 1)
        })
    };
    let mut idx: Vec<usize> = pick(keep_a, 0.0).map(|s| 2 * s).collect();
    idx.extend(pick(keep_b, 0.5).map(|s| 2 * s + 1));
    idx.sort_unstable();
    idx
}

/// Golden-ratio linear permutation of `len` positions.
pub fn interleaver(len: usize) -> Vec<usize> {
    if len <= 1 {
        return (0..len).collect();
    }
    let mut step = ((len as f64) * 0.618_033_988_749_894_8).round() as usize;
    step = step.clamp(1, len - 1);
    while gcd(step, len) != 1 {
        step += 1;
        if step >= len {
            step = 1;
        }
    }
    (0..len).map(|i| (i * step) % len).collect()
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Payload -> CRC -> convolutional code -> rate matching -> interleaving.
pub fn encode_block(plan: &CodingPlan, payload: &[u8]) -> Vec<u8> {
    assert_eq!(payload.len(), plan.payload_bits);
    let mother = conv_encode(&attach_crc(payload));
    let pattern = rate_match_pattern(mother.len(), plan.coded_bits);
    let perm = interleaver(plan.coded_bits);
    let mut out = vec![0u8; plan.coded_bits];
    for (i, &src) in pattern.iter().enumerate() {
        out[perm[i]] = mother[src];
    }
    out
}

/// Outcome of decoding one transport block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecode {
    pub crc_pass: bool,
    pub payload: Vec<u8>,
}

/// Inverse of [`encode_block`] on channel LLRs (positive favours 0).
pub fn decode_block(plan: &CodingPlan, llrs: &[f64]) -> BlockDecode {
    assert_eq!(llrs.len(), plan.coded_bits);
    let mother_len = plan.mother_bits();
    let pattern = rate_match_pattern(mother_len, plan.coded_bits);
    let perm = interleaver(plan.coded_bits);
    let mut mother = vec![0.0f64; mother_len];
    for (i, &dst) in pattern.iter().enumerate() {
        let l = llrs[perm[i]];
        let l = if l.is_nan() { 0.0 } else { l.clamp(-LLR_CLIP, LLR_CLIP) };
        mother[dst] += l;
    }
    let mut bits = viterbi_decode(&mother);
    let crc_pass = check_crc(&bits);
    bits.truncate(plan.payload_bits);
    BlockDecode {
        crc_pass,
        payload: bits,
    }
}
