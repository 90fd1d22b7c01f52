//! Learned per-slot choice of whitening option.
//!
//! Five features summarize the slot (three covariance-diagonal powers in dB
//! plus the MCS); a 5-16-3 perceptron with a sigmoid hidden layer and a
//! softmax output maps them to option probabilities.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::OccupancyPattern;
use crate::iw::{CovarianceSet, IwOption};
use crate::link::McsEntry;

pub const NUM_FEATURES: usize = 5;
pub const NUM_HIDDEN: usize = 16;
pub const NUM_CLASSES: usize = 3;
pub const NUM_PARAMS: usize = NUM_HIDDEN * NUM_FEATURES + NUM_HIDDEN + NUM_CLASSES * NUM_HIDDEN + NUM_CLASSES;

/// Floor applied to g2 and g3 relative to g1, in linear power (-60 dB).
pub const FEATURE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum FeatureError {
    #[error("mean diagonal power {0} is not positive")]
    NonPositivePower(f64),
}

/// Per-slot selector input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    /// Mean over antennas of the band-averaged diagonal, dB.
    pub g1: f64,
    /// Largest diagonal entry over antennas and RBs, dB.
    pub g2: f64,
    /// Smallest diagonal entry over antennas and RBs, dB.
    pub g3: f64,
    /// Bits per QAM symbol.
    pub g4: f64,
    /// Code rate.
    pub g5: f64,
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; NUM_FEATURES] {
        [self.g1, self.g2, self.g3, self.g4, self.g5]
    }

    pub fn from_array(a: [f64; NUM_FEATURES]) -> Self {
        Self {
            g1: a[0],
            g2: a[1],
            g3: a[2],
            g4: a[3],
            g5: a[4],
        }
    }
}

fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn extract_features(cov: &CovarianceSet, mcs: &McsEntry) -> Result<FeatureVector, FeatureError> {
    let n = cov.num_rx() as f64;
    let mean = cov.band_diagonal().iter().sum::<f64>() / n;
    if !(mean > 0.0) {
        return Err(FeatureError::NonPositivePower(mean));
    }
    let mut max = f64::NEG_INFINITY;
    let mut min = f64::INFINITY;
    for r in cov.per_rb() {
        for d in r.diagonal() {
            max = max.max(d);
            min = min.min(d);
        }
    }
    let floor = mean * FEATURE_FLOOR;
    Ok(FeatureVector {
        g1: to_db(mean),
        g2: to_db(max.max(floor)),
        g3: to_db(min.max(floor)),
        g4: mcs.modulation_order as f64,
        g5: mcs.code_rate,
    })
}

/// Cheapest option that decoded, or `None` when all three failed.
pub fn generate_label(crc: [bool; 3]) -> Option<IwOption> {
    IwOption::ALL.into_iter().find(|o| crc[o.index()])
}

/// Scenario description carried with each sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMeta {
    pub channel: String,
    pub occupancy: Option<OccupancyPattern>,
    pub snr_db: f64,
    pub sir_db: f64,
    pub mcs: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub features: FeatureVector,
    pub label: IwOption,
    pub crc: [bool; 3],
    pub meta: SampleMeta,
}

impl LabeledSample {
    /// `None` when no option decoded.
    pub fn new(features: FeatureVector, crc: [bool; 3], meta: SampleMeta) -> Option<Self> {
        generate_label(crc).map(|label| Self {
            features,
            label,
            crc,
            meta,
        })
    }
}

/// Per-feature standardization frozen from the training set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalization {
    pub mean: [f64; NUM_FEATURES],
    pub std: [f64; NUM_FEATURES],
}

impl Normalization {
    pub fn identity() -> Self {
        Self {
            mean: [0.0; NUM_FEATURES],
            std: [1.0; NUM_FEATURES],
        }
    }

    /// Sample mean and standard deviation; a constant feature gets unit std.
    pub fn fit(features: &[FeatureVector]) -> Self {
        let k = features.len().max(1) as f64;
        let mut mean = [0.0; NUM_FEATURES];
        for f in features {
            for (m, x) in mean.iter_mut().zip(f.to_array()) {
                *m += x / k;
            }
        }
        let mut std = [0.0; NUM_FEATURES];
        for f in features {
            for ((s, m), x) in std.iter_mut().zip(mean).zip(f.to_array()) {
                *s += (x - m) * (x - m) / k;
            }
        }
        for s in &mut std {
            *s = s.sqrt();
            if !(*s > 1e-12) {
                *s = 1.0;
            }
        }
        Self { mean, std }
    }

    pub fn apply(&self, f: &FeatureVector) -> [f64; NUM_FEATURES] {
        let mut x = f.to_array();
        for i in 0..NUM_FEATURES {
            x[i] = (x[i] - self.mean[i]) / self.std[i];
        }
        x
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("expected {NUM_PARAMS} parameters, got {0}")]
    ParamCount(usize),
    #[error("normalization std must be positive and finite")]
    BadNormalization,
}

/// 5-16-3 network: `softmax(W2 sigmoid(W1 x + b1) + b2)` on standardized `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub norm: Normalization,
    /// `w1 (16x5), b1 (16), w2 (3x16), b2 (3)`, matrices row-major.
    params: Vec<f64>,
}

const W1: usize = 0;
const B1: usize = W1 + NUM_HIDDEN * NUM_FEATURES;
const W2: usize = B1 + NUM_HIDDEN;
const B2: usize = W2 + NUM_CLASSES * NUM_HIDDEN;

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn softmax(z: [f64; NUM_CLASSES]) -> [f64; NUM_CLASSES] {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e = z.map(|v| (v - m).exp());
    let s: f64 = e.iter().sum();
    e.map(|v| v / s)
}

struct Activations {
    hidden: [f64; NUM_HIDDEN],
    probs: [f64; NUM_CLASSES],
}

impl MlpModel {
    pub fn new(norm: Normalization, params: Vec<f64>) -> Result<Self, ModelError> {
        if params.len() != NUM_PARAMS {
            return Err(ModelError::ParamCount(params.len()));
        }
        if norm.std.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(ModelError::BadNormalization);
        }
        Ok(Self { norm, params })
    }

    pub fn zeros(norm: Normalization) -> Self {
        Self::new(norm, vec![0.0; NUM_PARAMS]).expect("valid shape")
    }

    /// Uniform in `[-0.5, 0.5] / sqrt(fan_in)` per layer; biases too.
    pub fn random<R: Rng + ?Sized>(norm: Normalization, rng: &mut R) -> Self {
        let mut params = vec![0.0; NUM_PARAMS];
        for (i, p) in params.iter_mut().enumerate() {
            let fan_in = if i < W2 { NUM_FEATURES } else { NUM_HIDDEN };
            *p = (rng.random::<f64>() - 0.5) / (fan_in as f64).sqrt();
        }
        Self::new(norm, params).expect("valid shape")
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn w1(&self, h: usize, i: usize) -> f64 {
        self.params[W1 + h * NUM_FEATURES + i]
    }

    pub fn b1(&self, h: usize) -> f64 {
        self.params[B1 + h]
    }

    pub fn w2(&self, c: usize, h: usize) -> f64 {
        self.params[W2 + c * NUM_HIDDEN + h]
    }

    pub fn b2(&self, c: usize) -> f64 {
        self.params[B2 + c]
    }

    fn activations(&self, x: &[f64; NUM_FEATURES]) -> Activations {
        let mut hidden = [0.0; NUM_HIDDEN];
        for (h, out) in hidden.iter_mut().enumerate() {
            let row = &self.params[W1 + h * NUM_FEATURES..W1 + (h + 1) * NUM_FEATURES];
            let z: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.b1(h);
            *out = sigmoid(z);
        }
        let mut logits = [0.0; NUM_CLASSES];
        for (c, out) in logits.iter_mut().enumerate() {
            let row = &self.params[W2 + c * NUM_HIDDEN..W2 + (c + 1) * NUM_HIDDEN];
            *out = row.iter().zip(&hidden).map(|(w, v)| w * v).sum::<f64>() + self.b2(c);
        }
        Activations {
            hidden,
            probs: softmax(logits),
        }
    }

    /// Probabilities of IWNRB, IWNBW and IWRB.
    pub fn forward(&self, f: &FeatureVector) -> [f64; NUM_CLASSES] {
        self.activations(&self.norm.apply(f)).probs
    }

    pub fn select(&self, f: &FeatureVector) -> IwOption {
        argmax_option(self.forward(f))
    }

    /// Mean cross-entropy over `samples` and its gradient.
    pub fn loss_and_grad(&self, samples: &[LabeledSample]) -> (f64, Vec<f64>) {
        let inputs: Vec<([f64; NUM_FEATURES], usize)> =
            samples.iter().map(|s| (self.norm.apply(&s.features), s.label.index())).collect();
        self.loss_and_grad_inputs(&inputs)
    }

    fn loss_and_grad_inputs(&self, inputs: &[([f64; NUM_FEATURES], usize)]) -> (f64, Vec<f64>) {
        let k = inputs.len() as f64;
        let mut loss = 0.0;
        let mut grad = vec![0.0; NUM_PARAMS];
        for (x, z) in inputs {
            let a = self.activations(x);
            loss -= a.probs[*z].max(f64::MIN_POSITIVE).ln();
            let mut dlogit = a.probs;
            dlogit[*z] -= 1.0;
            let mut dhidden = [0.0; NUM_HIDDEN];
            for c in 0..NUM_CLASSES {
                grad[B2 + c] += dlogit[c];
                for h in 0..NUM_HIDDEN {
                    grad[W2 + c * NUM_HIDDEN + h] += dlogit[c] * a.hidden[h];
                    dhidden[h] += dlogit[c] * self.w2(c, h);
                }
            }
            for h in 0..NUM_HIDDEN {
                let dz = dhidden[h] * a.hidden[h] * (1.0 - a.hidden[h]);
                grad[B1 + h] += dz;
                for i in 0..NUM_FEATURES {
                    grad[W1 + h * NUM_FEATURES + i] += dz * x[i];
                }
            }
        }
        for g in &mut grad {
            *g /= k;
        }
        (loss / k, grad)
    }
}

/// Largest probability, ties going to the cheaper option.
pub fn argmax_option(p: [f64; NUM_CLASSES]) -> IwOption {
    let mut best = 0;
    for c in 1..NUM_CLASSES {
        if p[c] > p[best] {
            best = c;
        }
    }
    IwOption::ALL[best]
}

pub fn select_option(model: &MlpModel, cov: &CovarianceSet, mcs: &McsEntry) -> Result<IwOption, FeatureError> {
    Ok(model.select(&extract_features(cov, mcs)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub max_iterations: usize,
    /// Stop once the gradient's Euclidean norm falls below this.
    pub grad_tolerance: f64,
    pub history: usize,
    /// Armijo sufficient-decrease constant.
    pub armijo_c1: f64,
    /// Step halvings before a line search gives up.
    pub max_backtracks: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            grad_tolerance: 1e-6,
            history: 10,
            armijo_c1: 1e-4,
            max_backtracks: 40,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if !(self.grad_tolerance > 0.0) || self.max_iterations == 0 || self.history == 0 {
            return Err(TrainError::BadConfig);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TrainError {
    #[error("training set has no samples labelled {0}")]
    DegenerateDataset(IwOption),
    #[error("tolerance must be positive and iteration and history counts at least 1")]
    BadConfig,
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub model: MlpModel,
    pub initial_loss: f64,
    pub final_loss: f64,
    pub iterations: usize,
    pub converged: bool,
    /// The last line search found no sufficient decrease; the model is the
    /// best iterate reached.
    pub line_search_failed: bool,
    /// Loss after each accepted step, starting with the initial loss.
    pub loss_history: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Full-batch L-BFGS with Armijo backtracking on the mean cross-entropy.
pub fn train(samples: &[LabeledSample], cfg: &TrainConfig) -> Result<TrainReport, TrainError> {
    cfg.validate()?;
    for o in IwOption::ALL {
        if !samples.iter().any(|s| s.label == o) {
            return Err(TrainError::DegenerateDataset(o));
        }
    }
    let feats: Vec<FeatureVector> = samples.iter().map(|s| s.features).collect();
    let norm = Normalization::fit(&feats);
    let inputs: Vec<([f64; NUM_FEATURES], usize)> =
        samples.iter().map(|s| (norm.apply(&s.features), s.label.index())).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model = MlpModel::random(norm, &mut rng);

    let (mut loss, mut grad) = model.loss_and_grad_inputs(&inputs);
    let initial_loss = loss;
    let mut history = vec![loss];
    let mut pairs: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut line_search_failed = false;

    while iterations < cfg.max_iterations {
        if dot(&grad, &grad).sqrt() < cfg.grad_tolerance {
            converged = true;
            break;
        }
        let mut dir = two_loop(&grad, &pairs);
        if dot(&dir, &grad) >= 0.0 {
            pairs.clear();
            dir = grad.iter().map(|g| -g).collect();
        }
        let slope = dot(&dir, &grad);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..=cfg.max_backtracks {
            let trial: Vec<f64> = model.params.iter().zip(&dir).map(|(p, d)| p + step * d).collect();
            let cand = MlpModel {
                norm,
                params: trial,
            };
            let (l, g) = cand.loss_and_grad_inputs(&inputs);
            if l.is_finite() && l <= loss + cfg.armijo_c1 * step * slope {
                accepted = Some((cand, l, g));
                break;
            }
            step *= 0.5;
        }
        let Some((cand, l, g)) = accepted else {
            if pairs.is_empty() {
                line_search_failed = true;
                break;
            }
            // retry from steepest descent with fresh curvature memory
            pairs.clear();
            continue;
        };
        let s: Vec<f64> = cand.params.iter().zip(&model.params).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() {
            if pairs.len() == cfg.history {
                pairs.remove(0);
            }
            pairs.push((s, y, 1.0 / sy));
        }
        model = cand;
        loss = l;
        grad = g;
        history.push(loss);
        iterations += 1;
    }
    Ok(TrainReport {
        model,
        initial_loss,
        final_loss: loss,
        iterations,
        converged,
        line_search_failed,
        loss_history: history,
    })
}

/// `-H g` with the L-BFGS inverse-Hessian approximation.
fn two_loop(grad: &[f64], pairs: &[(Vec<f64>, Vec<f64>, f64)]) -> Vec<f64> {
    let mut q = grad.to_vec();
    let mut alphas = Vec::with_capacity(pairs.len());
    for (s, y, rho) in pairs.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = pairs.last() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in &mut q {
            *qi *= gamma;
        }
    }
    for ((s, y, rho), a) in pairs.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::HermitianMatrix;

    fn meta() -> SampleMeta {
        SampleMeta {
            channel: "EPA-5".into(),
            occupancy: Some(OccupancyPattern::Uniform),
            snr_db: 10.0,
            sir_db: 0.0,
            mcs: 5,
        }
    }

    fn sample(f: [f64; 5], label: IwOption) -> LabeledSample {
        let mut crc = [false; 3];
        crc[label.index()] = true;
        LabeledSample::new(FeatureVector::from_array(f), crc, meta()).unwrap()
    }

    fn diag_cov(diags: &[&[f64]]) -> CovarianceSet {
        let per_rb = diags.iter().map(|d| HermitianMatrix::from_real_diagonal(d).unwrap()).collect();
        CovarianceSet::from_matrices(per_rb, vec![12; diags.len()]).unwrap()
    }

    #[test]
    fn uniform_diagonal_features() {
        let cov = diag_cov(&[&[1.0; 4]]);
        let f = extract_features(&cov, &McsEntry::new(7, 4, 0.5).unwrap()).unwrap();
        assert_eq!(f.to_array(), [0.0, 0.0, 0.0, 4.0, 0.5]);
    }

    #[test]
    fn two_rb_features() {
        let cov = diag_cov(&[&[1.0, 1.0], &[3.0, 3.0]]);
        let f = extract_features(&cov, &McsEntry::new(7, 4, 0.5).unwrap()).unwrap();
        assert!((f.g1 - to_db(2.0)).abs() < 1e-12);
        assert!((f.g2 - to_db(3.0)).abs() < 1e-12);
        assert!((f.g3 - to_db(1.0)).abs() < 1e-12);
    }

    #[test]
    fn zero_power_is_rejected_and_low_power_is_floored() {
        let mcs = McsEntry::new(0, 2, 0.12).unwrap();
        assert!(extract_features(&diag_cov(&[&[0.0, 0.0]]), &mcs).is_err());
        let f = extract_features(&diag_cov(&[&[2.0, 0.0]]), &mcs).unwrap();
        assert!((f.g3 - (f.g1 - 60.0)).abs() < 1e-9);
    }

    #[test]
    fn labels() {
        assert_eq!(generate_label([true, true, true]), Some(IwOption::Nrb));
        assert_eq!(generate_label([false, false, true]), Some(IwOption::Rb));
        assert_eq!(generate_label([false, true, false]), Some(IwOption::Nbw));
        assert_eq!(generate_label([false, false, false]), None);
    }

    #[test]
    fn zero_model_is_uniform() {
        let m = MlpModel::zeros(Normalization::identity());
        let p = m.forward(&FeatureVector::from_array([3.0, -1.0, 2.0, 4.0, 0.5]));
        for v in p {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        let data = vec![sample([0.0; 5], IwOption::Nrb), sample([1.0; 5], IwOption::Rb)];
        let (loss, _) = m.loss_and_grad(&data);
        assert!((loss - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn tie_break_prefers_cheaper_option() {
        assert_eq!(argmax_option([0.2, 0.5, 0.3]), IwOption::Nbw);
        assert_eq!(argmax_option([0.4, 0.4, 0.2]), IwOption::Nrb);
        assert_eq!(argmax_option([0.2, 0.4, 0.4]), IwOption::Nbw);
        // equal logits through the network
        assert_eq!(MlpModel::zeros(Normalization::identity()).select(&FeatureVector::from_array([1.0; 5])), IwOption::Nrb);
    }

    #[test]
    fn forward_matches_straight_line_evaluator() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let norm = Normalization {
                mean: core::array::from_fn(|_| rng.random::<f64>() * 4.0 - 2.0),
                std: core::array::from_fn(|_| rng.random::<f64>() + 0.5),
            };
            let params: Vec<f64> = (0..NUM_PARAMS).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
            let m = MlpModel::new(norm, params.clone()).unwrap();
            let f: [f64; 5] = core::array::from_fn(|_| rng.random::<f64>() * 20.0 - 10.0);
            let got = m.forward(&FeatureVector::from_array(f));

            // independent evaluation straight from the flat parameter list
            let x: Vec<f64> = (0..5).map(|i| (f[i] - norm.mean[i]) / norm.std[i]).collect();
            let mut idx = 0;
            let mut w1 = [[0.0; 5]; 16];
            for row in w1.iter_mut() {
                for v in row.iter_mut() {
                    *v = params[idx];
                    idx += 1;
                }
            }
            let b1: Vec<f64> = params[idx..idx + 16].to_vec();
            idx += 16;
            let mut w2 = [[0.0; 16]; 3];
            for row in w2.iter_mut() {
                for v in row.iter_mut() {
                    *v = params[idx];
                    idx += 1;
                }
            }
            let b2 = &params[idx..idx + 3];
            let h: Vec<f64> = (0..16)
                .map(|j| {
                    let mut z = b1[j];
                    for i in 0..5 {
                        z += w1[j][i] * x[i];
                    }
                    1.0 / (1.0 + (-z).exp())
                })
                .collect();
            let o: Vec<f64> = (0..3)
                .map(|c| {
                    let mut z = b2[c];
                    for j in 0..16 {
                        z += w2[c][j] * h[j];
                    }
                    z
                })
                .collect();
            let lse = o.iter().map(|v| v.exp()).sum::<f64>().ln();
            for c in 0..3 {
                let want = (o[c] - lse).exp();
                assert!((got[c] - want).abs() < 1e-12, "{} {}", got[c], want);
            }
        }
    }

    fn random_dataset(n: usize, seed: u64) -> Vec<LabeledSample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let f: [f64; 5] = core::array::from_fn(|_| rng.random::<f64>() * 10.0 - 5.0);
                sample(f, IwOption::ALL[rng.random_range(0..3)])
            })
            .collect()
    }

    #[test]
    fn gradient_matches_central_differences() {
        let data = random_dataset(50, 4);
        let feats: Vec<FeatureVector> = data.iter().map(|s| s.features).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let norm = Normalization::fit(&feats);
        let params: Vec<f64> = (0..NUM_PARAMS).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let m = MlpModel::new(norm, params.clone()).unwrap();
        let (_, grad) = m.loss_and_grad(&data);
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for i in 0..NUM_PARAMS {
            let mut p = params.clone();
            p[i] += h;
            let up = MlpModel::new(norm, p.clone()).unwrap().loss_and_grad(&data).0;
            p[i] -= 2.0 * h;
            let down = MlpModel::new(norm, p).unwrap().loss_and_grad(&data).0;
            let fd = (up - down) / (2.0 * h);
            let rel = (fd - grad[i]).abs() / fd.abs().max(grad[i].abs()).max(1e-6);
            worst = worst.max(rel);
        }
        assert!(worst <= 1e-4, "{worst}");
    }

    #[test]
    fn perfect_fit_has_zero_loss_and_output_gradient() {
        let mut params = vec![0.0; NUM_PARAMS];
        params[B2] = 800.0;
        let m = MlpModel::new(Normalization::identity(), params).unwrap();
        let (loss, grad) = m.loss_and_grad(&[sample([0.0; 5], IwOption::Nrb)]);
        assert_eq!(loss, 0.0);
        assert!(grad[W2..].iter().all(|g| *g == 0.0));
    }

    #[test]
    fn simplex_outputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = MlpModel::random(Normalization::identity(), &mut rng);
        for _ in 0..10_000 {
            let f: [f64; 5] = core::array::from_fn(|_| rng.random::<f64>() * 200.0 - 100.0);
            let p = m.forward(&FeatureVector::from_array(f));
            assert!(p.iter().all(|v| *v >= 0.0));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    fn separable(n: usize) -> Vec<LabeledSample> {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        (0..n)
            .map(|i| {
                let class = i % 3;
                // g1 bands -20..-8, -4..4, 8..20 with margin between them
                let g1 = match class {
                    0 => -20.0 + 12.0 * rng.random::<f64>(),
                    1 => -4.0 + 8.0 * rng.random::<f64>(),
                    _ => 8.0 + 12.0 * rng.random::<f64>(),
                };
                let g2 = g1 + 3.0 * rng.random::<f64>();
                let g3 = g1 - 3.0 * rng.random::<f64>();
                sample([g1, g2, g3, 2.0 * (1 + rng.random_range(0..4)) as f64, rng.random()], IwOption::ALL[class])
            })
            .collect()
    }

    #[test]
    fn separable_set_is_learned() {
        let data = separable(300);
        let rep = train(&data, &TrainConfig::default()).unwrap();
        let correct = data.iter().filter(|s| rep.model.select(&s.features) == s.label).count();
        assert!(correct as f64 / 300.0 >= 0.99, "{correct}");
        assert!(rep.final_loss < rep.initial_loss);
        assert!(rep.loss_history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn training_is_deterministic() {
        let data = random_dataset(90, 8);
        let cfg = TrainConfig {
            max_iterations: 40,
            ..TrainConfig::default()
        };
        let a = train(&data, &cfg).unwrap();
        let b = train(&data, &cfg).unwrap();
        assert_eq!(a.model, b.model);
        assert!(a.final_loss <= a.initial_loss);
    }

    #[test]
    fn missing_class_is_degenerate() {
        let data = vec![sample([0.0; 5], IwOption::Nrb), sample([1.0; 5], IwOption::Nbw)];
        assert_eq!(train(&data, &TrainConfig::default()).unwrap_err(), TrainError::DegenerateDataset(IwOption::Rb));
    }

    #[test]
    fn constant_feature_gets_unit_std() {
        let n = Normalization::fit(&[FeatureVector::from_array([1.0, 2.0, 0.0, 4.0, 0.5]), FeatureVector::from_array([3.0, 2.0, 0.0, 4.0, 0.5])]);
        assert_eq!(n.mean, [2.0, 2.0, 0.0, 4.0, 0.5]);
        assert_eq!(n.std, [1.0, 1.0, 1.0, 1.0, 1.0]);
    }
}
