use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum McsError {
    #[error("unsupported modulation order {0} (expected 2, 4, 6 or 8)")]
    ModulationOrder(u8),
    #[error("code rate {0} outside (0, 1)")]
    CodeRate(f64),
    #[error("spectral efficiency decreases at MCS index {0}")]
    NotMonotone(u8),
    #[error("duplicate or unordered MCS index {0}")]
    IndexOrder(u8),
    #[error("MCS index {0} is not in the table")]
    UnknownIndex(u8),
    #[error("empty MCS table")]
    Empty,
}

/// Modulation order and code rate for one MCS index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McsEntry {
    pub index: u8,
    /// Bits per QAM symbol.
    pub modulation_order: u8,
    pub code_rate: f64,
}

impl McsEntry {
    pub fn new(index: u8, modulation_order: u8, code_rate: f64) -> Result<Self, McsError> {
        if !matches!(modulation_order, 2 | 4 | 6 | 8) {
            return Err(McsError::ModulationOrder(modulation_order));
        }
        if !(code_rate > 0.0 && code_rate < 1.0) {
            return Err(McsError::CodeRate(code_rate));
        }
        Ok(Self {
            index,
            modulation_order,
            code_rate,
        })
    }

    pub fn spectral_efficiency(&self) -> f64 {
        self.modulation_order as f64 * self.code_rate
    }
}

/// Ordered MCS table with non-decreasing spectral efficiency.
#[derive(Debug, Clone, PartialEq)]
pub struct McsTable {
    entries: Vec<McsEntry>,
}

impl McsTable {
    pub fn new(entries: Vec<McsEntry>) -> Result<Self, McsError> {
        if entries.is_empty() {
            return Err(McsError::Empty);
        }
        for w in entries.windows(2) {
            if w[1].index <= w[0].index {
                return Err(McsError::IndexOrder(w[1].index));
            }
            if w[1].spectral_efficiency() < w[0].spectral_efficiency() {
                return Err(McsError::NotMonotone(w[1].index));
            }
        }
        Ok(Self { entries })
    }

    /// The representative subset shipped by default.
    pub fn representative() -> Self {
        let rows: [(u8, u8, f64); 6] = [
            (0, 2, 0.12),
            (5, 2, 0.44),
            (7, 4, 0.33),
            (15, 6, 0.48),
            (19, 6, 0.66),
            (27, 8, 0.89),
        ];
        let entries = rows
            .iter()
            .map(|&(i, q, r)| McsEntry::new(i, q, r).expect("valid shipped entry"))
            .collect();
        Self::new(entries).expect("shipped table is monotone")
    }

    pub fn get(&self, index: u8) -> Result<McsEntry, McsError> {
        self.entries
            .iter()
            .find(|e| e.index == index)
            .copied()
            .ok_or(McsError::UnknownIndex(index))
    }

    pub fn entries(&self) -> &[McsEntry] {
        &self.entries
    }
}

impl Default for McsTable {
    fn default() -> Self {
        Self::representative()
    }
}
