//! Text file formats: tap-profile/MCS config, model files, dataset and
//! result CSVs.

use std::fmt::Write as _;
use std::io::{Read, Write};

use iwsel_core::channel::{OccupancyPattern, TapProfile};
use iwsel_core::iw::IwOption;
use iwsel_core::link::{McsEntry, McsTable};
use iwsel_core::selector::{
    FeatureVector, LabeledSample, MlpModel, Normalization, SampleMeta, NUM_CLASSES, NUM_FEATURES, NUM_HIDDEN,
};

use crate::error::Error;

/// Profiles and MCS entries read from a key/value config file.
///
/// ```text
/// [profile]
/// name = EPA-5
/// delays_ns = 0, 30, 70, 90, 110, 190, 410
/// powers_db = 0, -1, -2, -3, -8, -17.2, -20.8
/// doppler_hz = 5
///
/// [mcs]
/// index = 5
/// modulation = 2
/// rate = 0.44
/// ```
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub profiles: Vec<TapProfile>,
    pub mcs: Vec<McsEntry>,
}

impl ConfigFile {
    pub fn mcs_table(&self) -> Result<Option<McsTable>, Error> {
        if self.mcs.is_empty() {
            return Ok(None);
        }
        McsTable::new(self.mcs.clone())
            .map(Some)
            .map_err(|e| Error::Config(e.to_string()))
    }
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>, Error> {
    v.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("{key}: bad number {s:?}")))
        })
        .collect()
}

fn section_done(kind: &str, kv: &[(String, String)], out: &mut ConfigFile) -> Result<(), Error> {
    let get = |k: &str| {
        kv.iter()
            .find(|(key, _)| key == k)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::Config(format!("[{kind}] missing key {k}")))
    };
    let num = |k: &str| -> Result<f64, Error> {
        get(k)?
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("[{kind}] {k}: not a number")))
    };
    match kind {
        "profile" => {
            let p = TapProfile::from_ns_db(
                get("name")?,
                &parse_list("delays_ns", get("delays_ns")?)?,
                &parse_list("powers_db", get("powers_db")?)?,
                num("doppler_hz")?,
            )
            .map_err(|e| Error::Config(e.to_string()))?;
            out.profiles.push(p);
        }
        "mcs" => {
            let idx = num("index")?;
            let q = num("modulation")?;
            if idx.fract() != 0.0 || !(0.0..=255.0).contains(&idx) || q.fract() != 0.0 || !(0.0..=255.0).contains(&q) {
                return Err(Error::Config("[mcs] index and modulation must be small integers".into()));
            }
            let e = McsEntry::new(idx as u8, q as u8, num("rate")?).map_err(|e| Error::Config(e.to_string()))?;
            out.mcs.push(e);
        }
        other => return Err(Error::Config(format!("unknown section [{other}]"))),
    }
    Ok(())
}

pub fn parse_config(text: &str) -> Result<ConfigFile, Error> {
    let mut out = ConfigFile::default();
    let mut section: Option<String> = None;
    let mut kv: Vec<(String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            if let Some(kind) = section.take() {
                section_done(&kind, &kv, &mut out)?;
            }
            kv.clear();
            section = Some(name.trim().to_string());
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Config(format!("line {}: expected key = value", lineno + 1)));
        };
        if section.is_none() {
            return Err(Error::Config(format!("line {}: key outside a section", lineno + 1)));
        }
        kv.push((k.trim().to_string(), v.trim().to_string()));
    }
    if let Some(kind) = section {
        section_done(&kind, &kv, &mut out)?;
    }
    Ok(out)
}

pub fn read_config(path: &std::path::Path) -> Result<ConfigFile, Error> {
    parse_config(&std::fs::read_to_string(path)?)
}

const MODEL_MAGIC: &str = "iwsel-mlp";

/// Writes the model as self-describing text. Numbers carry 17 significant
/// digits, enough for reading back to give the identical `f64`.
pub fn write_model<W: Write>(model: &MlpModel, mut w: W) -> Result<(), Error> {
    let mut s = String::new();
    writeln!(
        s,
        "{MODEL_MAGIC} v1 layers {NUM_FEATURES} {NUM_HIDDEN} {NUM_CLASSES} hidden sigmoid output softmax"
    )
    .unwrap();
    let line = |label: &str, xs: &[f64]| {
        let mut l = String::from(label);
        for x in xs {
            write!(l, " {x:.16e}").unwrap();
        }
        l
    };
    writeln!(s, "{}", line("mean", &model.norm.mean)).unwrap();
    writeln!(s, "{}", line("std", &model.norm.std)).unwrap();
    let p = model.params();
    let mut off = 0;
    for h in 0..NUM_HIDDEN {
        writeln!(s, "{}", line(&format!("w1 {h}"), &p[off..off + NUM_FEATURES])).unwrap();
        off += NUM_FEATURES;
    }
    writeln!(s, "{}", line("b1", &p[off..off + NUM_HIDDEN])).unwrap();
    off += NUM_HIDDEN;
    for c in 0..NUM_CLASSES {
        writeln!(s, "{}", line(&format!("w2 {c}"), &p[off..off + NUM_HIDDEN])).unwrap();
        off += NUM_HIDDEN;
    }
    writeln!(s, "{}", line("b2", &p[off..off + NUM_CLASSES])).unwrap();
    w.write_all(s.as_bytes())?;
    Ok(())
}

pub fn read_model<R: Read>(mut r: R) -> Result<MlpModel, Error> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Format("empty model file".into()))?;
    let want = format!("{MODEL_MAGIC} v1 layers {NUM_FEATURES} {NUM_HIDDEN} {NUM_CLASSES} hidden sigmoid output softmax");
    if header.trim() != want {
        return Err(Error::Format(format!("unsupported model header {header:?}")));
    }
    let mut take = |label: &str, n: usize| -> Result<Vec<f64>, Error> {
        let line = lines
            .next()
            .ok_or_else(|| Error::Format(format!("model file ends before {label:?}")))?;
        let rest = line
            .strip_prefix(label)
            .ok_or_else(|| Error::Format(format!("expected {label:?}, found {line:?}")))?;
        let xs: Vec<f64> = rest
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| Error::Format(format!("bad number {t:?}"))))
            .collect::<Result<_, _>>()?;
        if xs.len() != n {
            return Err(Error::Format(format!("{label:?}: expected {n} values, found {}", xs.len())));
        }
        Ok(xs)
    };
    let mean = take("mean", NUM_FEATURES)?;
    let std = take("std", NUM_FEATURES)?;
    let mut params = Vec::new();
    for h in 0..NUM_HIDDEN {
        params.extend(take(&format!("w1 {h}"), NUM_FEATURES)?);
    }
    params.extend(take("b1", NUM_HIDDEN)?);
    for c in 0..NUM_CLASSES {
        params.extend(take(&format!("w2 {c}"), NUM_HIDDEN)?);
    }
    params.extend(take("b2", NUM_CLASSES)?);
    let norm = Normalization {
        mean: mean.try_into().expect("length checked"),
        std: std.try_into().expect("length checked"),
    };
    MlpModel::new(norm, params).map_err(|e| Error::Format(e.to_string()))
}

pub const DATASET_HEADER: [&str; 14] = [
    "channel", "occupancy", "snr_db", "sir_db", "mcs", "g1", "g2", "g3", "g4", "g5", "label", "c1", "c2", "c3",
];

pub fn occupancy_label(o: Option<OccupancyPattern>) -> String {
    match o {
        Some(p) => p.id().to_string(),
        None => "none".into(),
    }
}

pub fn parse_occupancy(s: &str) -> Result<Option<OccupancyPattern>, Error> {
    match s.trim() {
        "none" => Ok(None),
        t => t
            .parse::<u8>()
            .ok()
            .and_then(OccupancyPattern::from_id)
            .map(Some)
            .ok_or_else(|| Error::Config(format!("occupancy must be 1, 2, 3 or none, got {t:?}"))),
    }
}

/// `inf` for a disabled interferer, plain decimal otherwise.
pub fn fmt_db(x: f64) -> String {
    format!("{x}")
}

pub fn parse_db(s: &str) -> Result<f64, Error> {
    let t = s.trim();
    t.parse::<f64>()
        .ok()
        .filter(|v| !v.is_nan())
        .ok_or_else(|| Error::Config(format!("bad dB value {t:?}")))
}

pub fn write_dataset<W: Write>(samples: &[LabeledSample], w: W) -> Result<(), Error> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(DATASET_HEADER)?;
    for s in samples {
        let f = s.features;
        let bit = |b: bool| if b { "1" } else { "0" };
        wr.write_record([
            s.meta.channel.clone(),
            occupancy_label(s.meta.occupancy),
            fmt_db(s.meta.snr_db),
            fmt_db(s.meta.sir_db),
            s.meta.mcs.to_string(),
            format!("{}", f.g1),
            format!("{}", f.g2),
            format!("{}", f.g3),
            format!("{}", f.g4),
            format!("{}", f.g5),
            s.label.number().to_string(),
            bit(s.crc[0]).into(),
            bit(s.crc[1]).into(),
            bit(s.crc[2]).into(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_dataset<R: Read>(r: R) -> Result<Vec<LabeledSample>, Error> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header = rd.headers()?.clone();
    if header.iter().ne(DATASET_HEADER.iter().copied()) {
        return Err(Error::Format(format!("dataset header mismatch: {:?}", header)));
    }
    let mut out = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let field = |j: usize| rec.get(j).unwrap_or("");
        let num = |j: usize| -> Result<f64, Error> {
            field(j)
                .parse::<f64>()
                .map_err(|_| Error::Format(format!("row {row}: column {} is not a number", DATASET_HEADER[j])))
        };
        let bit = |j: usize| -> Result<bool, Error> {
            match field(j) {
                "0" => Ok(false),
                "1" => Ok(true),
                _ => Err(Error::Format(format!("row {row}: {} must be 0 or 1", DATASET_HEADER[j]))),
            }
        };
        let crc = [bit(11)?, bit(12)?, bit(13)?];
        let label = field(10)
            .parse::<u8>()
            .ok()
            .and_then(IwOption::from_number)
            .ok_or_else(|| Error::Format(format!("row {row}: label must be 1, 2 or 3")))?;
        let meta = SampleMeta {
            channel: field(0).to_string(),
            occupancy: parse_occupancy(field(1)).map_err(|e| Error::Format(format!("row {row}: {e}")))?,
            snr_db: num(2)?,
            sir_db: num(3)?,
            mcs: field(4)
                .parse()
                .map_err(|_| Error::Format(format!("row {row}: bad mcs")))?,
        };
        let features = FeatureVector::from_array([num(5)?, num(6)?, num(7)?, num(8)?, num(9)?]);
        let sample = LabeledSample::new(features, crc, meta)
            .filter(|s| s.label == label)
            .ok_or_else(|| Error::Format(format!("row {row}: label {} disagrees with c1..c3", label.number())))?;
        out.push(sample);
    }
    Ok(out)
}
