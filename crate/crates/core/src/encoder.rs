//! Classical encoders `θ = f_φ(λ)` mapping Hamiltonian parameters to circuit
//! parameters, with exact reverse-mode derivatives with respect to `φ`.
//!
//! Three families share one flat weight vector `φ`:
//!
//! * `Mlp`: `θ = W₂ · dropout(tanh(W₁ λ + b₁)) + b₂`, laid out as
//!   `[W₁ (h×p, row-major), b₁ (h), W₂ (m×h, row-major), b₂ (m)]`.
//! * `Affine`: `θ = W λ + b`, laid out as `[W (m×p), b (m)]`.
//! * `Direct`: `θ = φ`; the input is ignored (plain VQE).
//!
//! Dropout is inverted dropout on the hidden activations and only runs in
//! training mode, so evaluation is deterministic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{ensure, Error, Result};

pub const INIT_MEAN: f64 = 0.0;
pub const INIT_STD: f64 = 0.1;

const CHECKPOINT_MAGIC: &str = "nnvqe-encoder";
const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncoderKind {
    Mlp,
    Affine,
    Direct,
}

impl fmt::Display for EncoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EncoderKind::Mlp => "mlp",
            EncoderKind::Affine => "affine",
            EncoderKind::Direct => "direct",
        })
    }
}

impl FromStr for EncoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mlp" => Ok(EncoderKind::Mlp),
            "affine" => Ok(EncoderKind::Affine),
            "direct" => Ok(EncoderKind::Direct),
            other => Err(Error::Parse(format!("unknown encoder kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncoderSpec {
    pub kind: EncoderKind,
    pub input_dim: usize,
    /// Ignored unless `kind` is `Mlp`.
    pub hidden_dim: usize,
    pub output_dim: usize,
    /// Ignored unless `kind` is `Mlp`.
    pub dropout_rate: f64,
    pub seed: u64,
}

impl EncoderSpec {
    pub fn mlp(input_dim: usize, hidden_dim: usize, output_dim: usize, dropout_rate: f64, seed: u64) -> Self {
        Self { kind: EncoderKind::Mlp, input_dim, hidden_dim, output_dim, dropout_rate, seed }
    }

    pub fn affine(input_dim: usize, output_dim: usize, seed: u64) -> Self {
        Self { kind: EncoderKind::Affine, input_dim, hidden_dim: 0, output_dim, dropout_rate: 0.0, seed }
    }

    pub fn direct(input_dim: usize, output_dim: usize, seed: u64) -> Self {
        Self { kind: EncoderKind::Direct, input_dim, hidden_dim: 0, output_dim, dropout_rate: 0.0, seed }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.input_dim >= 1, Config, "encoder input dimension must be at least 1");
        ensure!(self.output_dim >= 1, Config, "encoder output dimension must be at least 1");
        if self.kind == EncoderKind::Mlp {
            ensure!(self.hidden_dim >= 1, Config, "MLP hidden width must be at least 1");
            ensure!(
                (0.0..1.0).contains(&self.dropout_rate),
                Config,
                "dropout rate must lie in [0, 1), got {}",
                self.dropout_rate
            );
        }
        Ok(())
    }

    /// Length of the flat weight vector `φ`.
    pub fn n_weights(&self) -> usize {
        let (p, h, m) = (self.input_dim, self.hidden_dim, self.output_dim);
        match self.kind {
            EncoderKind::Mlp => (p + 1) * h + (h + 1) * m,
            EncoderKind::Affine => (p + 1) * m,
            EncoderKind::Direct => m,
        }
    }
}

/// Identifies the dropout mask of one training forward pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DropoutKey {
    pub seed: u64,
    pub point: usize,
    pub epoch: usize,
}

impl DropoutKey {
    fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        // Stream 0 is reserved for weight initialization.
        rng.set_stream((1 << 63) | ((self.point as u64 & 0x7fff_ffff) << 32) | (self.epoch as u64 & 0xffff_ffff));
        rng
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Eval,
    Train(DropoutKey),
}

/// Intermediates of a training-mode forward pass, consumed by `backward`.
#[derive(Clone, Debug, PartialEq)]
pub struct ForwardCache {
    kind: EncoderKind,
    pub input: Vec<f64>,
    pub pre_activations: Vec<f64>,
    pub activations: Vec<f64>,
    /// Entries are `0` or `1/(1 − rate)`.
    pub mask: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Encoder {
    spec: EncoderSpec,
    weights: Vec<f64>,
}

impl Encoder {
    /// Draws every weight and bias i.i.d. from `N(0, 0.1²)` using `spec.seed`.
    pub fn init(spec: EncoderSpec) -> Result<Self> {
        spec.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let normal = Normal::new(INIT_MEAN, INIT_STD).expect("valid normal parameters");
        let weights = (0..spec.n_weights()).map(|_| normal.sample(&mut rng)).collect();
        Ok(Self { spec, weights })
    }

    pub fn from_weights(spec: EncoderSpec, weights: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        ensure!(
            weights.len() == spec.n_weights(),
            Structural,
            "{} encoder expects {} weights, got {}",
            spec.kind,
            spec.n_weights(),
            weights.len()
        );
        Ok(Self { spec, weights })
    }

    pub fn spec(&self) -> &EncoderSpec {
        &self.spec
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn set_weights(&mut self, weights: &[f64]) -> Result<()> {
        ensure!(weights.len() == self.weights.len(), Structural, "weight vector length mismatch");
        self.weights.copy_from_slice(weights);
        Ok(())
    }

    pub(crate) fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    fn check_input(&self, lambda: &[f64]) -> Result<()> {
        ensure!(
            lambda.len() == self.spec.input_dim,
            Structural,
            "encoder takes {} inputs, got {}",
            self.spec.input_dim,
            lambda.len()
        );
        Ok(())
    }

    /// Eval-mode `θ = f_φ(λ)`.
    pub fn predict(&self, lambda: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward(lambda, Mode::Eval)?.0)
    }

    /// Returns `θ` and, in training mode, the cache needed by `backward`.
    pub fn forward(&self, lambda: &[f64], mode: Mode) -> Result<(Vec<f64>, Option<ForwardCache>)> {
        self.check_input(lambda)?;
        let (p, h, m) = (self.spec.input_dim, self.spec.hidden_dim, self.spec.output_dim);
        let w = &self.weights;
        let train = matches!(mode, Mode::Train(_));
        let cache = |pre: Vec<f64>, act: Vec<f64>, mask: Vec<f64>| ForwardCache {
            kind: self.spec.kind,
            input: lambda.to_vec(),
            pre_activations: pre,
            activations: act,
            mask,
        };
        match self.spec.kind {
            EncoderKind::Direct => {
                let theta = w.clone();
                Ok((theta, train.then(|| cache(vec![], vec![], vec![]))))
            }
            EncoderKind::Affine => {
                let (weight, bias) = w.split_at(m * p);
                let theta = affine(weight, bias, lambda);
                Ok((theta, train.then(|| cache(vec![], vec![], vec![]))))
            }
            EncoderKind::Mlp => {
                let (w1, rest) = w.split_at(h * p);
                let (b1, rest) = rest.split_at(h);
                let (w2, b2) = rest.split_at(m * h);
                let pre = affine(w1, b1, lambda);
                let act: Vec<f64> = pre.iter().map(|z| z.tanh()).collect();
                let mask = match mode {
                    Mode::Train(key) if self.spec.dropout_rate > 0.0 => {
                        let rate = self.spec.dropout_rate;
                        let keep = 1.0 / (1.0 - rate);
                        let mut rng = key.rng();
                        (0..h).map(|_| if rng.random::<f64>() < rate { 0.0 } else { keep }).collect()
                    }
                    _ => vec![1.0; h],
                };
                let hidden: Vec<f64> = act.iter().zip(&mask).map(|(a, k)| a * k).collect();
                let theta = affine(w2, b2, &hidden);
                Ok((theta, train.then(|| cache(pre, act, mask))))
            }
        }
    }

    /// `dφ = (∂θ/∂φ)ᵀ dθ` through the recorded forward pass.
    pub fn backward(&self, cache: &ForwardCache, d_theta: &[f64]) -> Result<Vec<f64>> {
        let (p, h, m) = (self.spec.input_dim, self.spec.hidden_dim, self.spec.output_dim);
        ensure!(
            cache.kind == self.spec.kind && cache.input.len() == p,
            Usage,
            "forward cache was produced by a different encoder"
        );
        ensure!(d_theta.len() == m, Structural, "upstream gradient has length {}, expected {m}", d_theta.len());
        let mut d_phi = vec![0.0; self.spec.n_weights()];
        match self.spec.kind {
            EncoderKind::Direct => d_phi.copy_from_slice(d_theta),
            EncoderKind::Affine => {
                let (dw, db) = d_phi.split_at_mut(m * p);
                outer_into(dw, d_theta, &cache.input);
                db.copy_from_slice(d_theta);
            }
            EncoderKind::Mlp => {
                ensure!(
                    cache.activations.len() == h && cache.mask.len() == h,
                    Usage,
                    "forward cache was produced by a different encoder"
                );
                let w2 = &self.weights[(p + 1) * h..(p + 1) * h + m * h];
                let hidden: Vec<f64> = cache.activations.iter().zip(&cache.mask).map(|(a, k)| a * k).collect();
                let mut d_pre = vec![0.0; h];
                for (j, d) in d_pre.iter_mut().enumerate() {
                    let d_hidden: f64 = (0..m).map(|k| w2[k * h + j] * d_theta[k]).sum();
                    let a = cache.activations[j];
                    *d = d_hidden * cache.mask[j] * (1.0 - a * a);
                }
                let (dw1, rest) = d_phi.split_at_mut(h * p);
                let (db1, rest) = rest.split_at_mut(h);
                let (dw2, db2) = rest.split_at_mut(m * h);
                outer_into(dw1, &d_pre, &cache.input);
                db1.copy_from_slice(&d_pre);
                outer_into(dw2, d_theta, &hidden);
                db2.copy_from_slice(d_theta);
            }
        }
        Ok(d_phi)
    }

    /// Versioned text checkpoint; floats use the shortest exact representation.
    pub fn to_checkpoint(&self) -> String {
        let s = &self.spec;
        let mut out = format!(
            "{CHECKPOINT_MAGIC} {CHECKPOINT_VERSION}\nkind {}\ninput_dim {}\nhidden_dim {}\noutput_dim {}\ndropout_rate {:?}\nseed {}\nweights {}\n",
            s.kind, s.input_dim, s.hidden_dim, s.output_dim, s.dropout_rate, s.seed,
            self.weights.len()
        );
        for w in &self.weights {
            out.push_str(&format!("{w:?}\n"));
        }
        out
    }

    pub fn from_checkpoint(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let mut next = |key: &str| -> Result<(usize, String)> {
            let (no, line) = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("checkpoint ended before `{key}`")))?;
            let mut parts = line.split_whitespace();
            match (parts.next(), parts.next(), parts.next()) {
                (Some(k), Some(v), None) if k == key => Ok((no + 1, v.to_string())),
                _ => Err(Error::Parse(format!("line {}: expected `{key} <value>`", no + 1))),
            }
        };
        let (_, version) = next(CHECKPOINT_MAGIC)?;
        ensure!(
            version == CHECKPOINT_VERSION.to_string(),
            Parse,
            "unsupported checkpoint version {version}"
        );
        fn parse<T: FromStr>((line, v): (usize, String)) -> Result<T> {
            v.parse().map_err(|_| Error::Parse(format!("line {line}: cannot parse {v:?}")))
        }
        let kind: EncoderKind = next("kind")?.1.parse()?;
        let spec = EncoderSpec {
            kind,
            input_dim: parse(next("input_dim")?)?,
            hidden_dim: parse(next("hidden_dim")?)?,
            output_dim: parse(next("output_dim")?)?,
            dropout_rate: parse(next("dropout_rate")?)?,
            seed: parse(next("seed")?)?,
        };
        let count: usize = parse(next("weights")?)?;
        let weights = lines
            .by_ref()
            .take(count)
            .map(|(no, l)| parse((no + 1, l.trim().to_string())))
            .collect::<Result<Vec<f64>>>()?;
        ensure!(weights.len() == count, Parse, "checkpoint lists {count} weights, found {}", weights.len());
        ensure!(lines.next().is_none(), Parse, "trailing data after weights");
        Self::from_weights(spec, weights)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_checkpoint())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_checkpoint(&fs::read_to_string(path)?)
    }
}

/// `W x + b` with `W` row-major `(b.len() × x.len())`.
fn affine(weight: &[f64], bias: &[f64], x: &[f64]) -> Vec<f64> {
    let cols = x.len();
    bias.iter()
        .enumerate()
        .map(|(r, b)| b + weight[r * cols..(r + 1) * cols].iter().zip(x).map(|(w, v)| w * v).sum::<f64>())
        .collect()
}

/// `out = u vᵀ`, row-major.
fn outer_into(out: &mut [f64], u: &[f64], v: &[f64]) {
    for (r, ur) in u.iter().enumerate() {
        for (c, vc) in v.iter().enumerate() {
            out[r * v.len() + c] = ur * vc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_counts() {
        assert_eq!(EncoderSpec::mlp(1, 20, 74, 0.3, 0).n_weights(), 2 * 20 + 21 * 74);
        assert_eq!(EncoderSpec::affine(2, 10, 0).n_weights(), 30);
        assert_eq!(Encoder::init(EncoderSpec::direct(1, 216, 3)).unwrap().weights().len(), 216);
    }

    #[test]
    fn init_is_seeded() {
        let spec = EncoderSpec::mlp(1, 5, 7, 0.2, 11);
        assert_eq!(Encoder::init(spec.clone()).unwrap(), Encoder::init(spec.clone()).unwrap());
        let other = EncoderSpec { seed: 12, ..spec };
        assert_ne!(Encoder::init(other).unwrap().weights(), Encoder::init(EncoderSpec::mlp(1, 5, 7, 0.2, 11)).unwrap().weights());
    }

    #[test]
    fn init_statistics() {
        let e = Encoder::init(EncoderSpec::direct(1, 10_000, 5)).unwrap();
        let n = e.weights().len() as f64;
        let mean = e.weights().iter().sum::<f64>() / n;
        let std = (e.weights().iter().map(|w| (w - mean).powi(2)).sum::<f64>() / n).sqrt();
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((std - 0.1).abs() < 0.01, "std {std}");
    }

    #[test]
    fn zero_weights_give_zero_theta() {
        let spec = EncoderSpec::mlp(2, 4, 3, 0.0, 0);
        let e = Encoder::from_weights(spec.clone(), vec![0.0; spec.n_weights()]).unwrap();
        assert_eq!(e.predict(&[0.7, -1.2]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn hand_set_mlp_cancels() {
        // W1 = [1, −1]ᵀ, b1 = 0, W2 = [0.5, 0.5], b2 = 0.1.
        let spec = EncoderSpec::mlp(1, 2, 1, 0.0, 0);
        let e = Encoder::from_weights(spec, vec![1.0, -1.0, 0.0, 0.0, 0.5, 0.5, 0.1]).unwrap();
        let theta = e.predict(&[0.3]).unwrap();
        assert!((theta[0] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn eval_is_deterministic_and_cacheless() {
        let e = Encoder::init(EncoderSpec::mlp(1, 8, 4, 0.5, 2)).unwrap();
        let (a, cache) = e.forward(&[0.4], Mode::Eval).unwrap();
        assert!(cache.is_none());
        assert_eq!(a, e.predict(&[0.4]).unwrap());
    }

    #[test]
    fn dropout_mask_values() {
        let e = Encoder::init(EncoderSpec::mlp(1, 64, 2, 0.25, 2)).unwrap();
        let key = DropoutKey { seed: 9, point: 3, epoch: 4 };
        let (_, cache) = e.forward(&[0.4], Mode::Train(key)).unwrap();
        let cache = cache.unwrap();
        assert!(cache.mask.iter().all(|&k| k == 0.0 || (k - 1.0 / 0.75).abs() < 1e-15));
        assert!(cache.mask.contains(&0.0));
        let (_, again) = e.forward(&[0.4], Mode::Train(key)).unwrap();
        assert_eq!(again.unwrap().mask, cache.mask);
    }

    #[test]
    fn backward_trivial_cases() {
        let e = Encoder::init(EncoderSpec::mlp(1, 3, 2, 0.1, 4)).unwrap();
        let key = DropoutKey { seed: 1, point: 0, epoch: 0 };
        let (_, cache) = e.forward(&[0.5], Mode::Train(key)).unwrap();
        let d = e.backward(cache.as_ref().unwrap(), &[0.0, 0.0]).unwrap();
        assert!(d.iter().all(|&x| x == 0.0));

        let direct = Encoder::init(EncoderSpec::direct(1, 3, 4)).unwrap();
        let (_, cache) = direct.forward(&[0.5], Mode::Train(key)).unwrap();
        assert_eq!(direct.backward(cache.as_ref().unwrap(), &[1.0, -2.0, 3.5]).unwrap(), vec![1.0, -2.0, 3.5]);
    }

    #[test]
    fn backward_rejects_foreign_cache() {
        let a = Encoder::init(EncoderSpec::affine(1, 3, 0)).unwrap();
        let b = Encoder::init(EncoderSpec::mlp(1, 3, 3, 0.0, 0)).unwrap();
        let key = DropoutKey { seed: 1, point: 0, epoch: 0 };
        let (_, cache) = a.forward(&[0.5], Mode::Train(key)).unwrap();
        assert!(matches!(b.backward(cache.as_ref().unwrap(), &[0.0; 3]), Err(Error::Usage(_))));
    }

    #[test]
    fn checkpoint_rejects_garbage() {
        assert!(matches!(Encoder::from_checkpoint("hello"), Err(Error::Parse(_))));
        let e = Encoder::init(EncoderSpec::affine(1, 2, 0)).unwrap();
        let text = e.to_checkpoint().replace("nnvqe-encoder 1", "nnvqe-encoder 9");
        assert!(matches!(Encoder::from_checkpoint(&text), Err(Error::Parse(_))));
        let truncated: String = e.to_checkpoint().lines().take(9).collect::<Vec<_>>().join("\n");
        assert!(matches!(Encoder::from_checkpoint(&truncated), Err(Error::Parse(_))));
    }

    #[test]
    fn invalid_specs() {
        assert!(matches!(Encoder::init(EncoderSpec::mlp(1, 3, 2, 1.0, 0)), Err(Error::Config(_))));
        assert!(matches!(Encoder::init(EncoderSpec::mlp(0, 3, 2, 0.0, 0)), Err(Error::Config(_))));
        assert!(matches!(Encoder::init(EncoderSpec::mlp(1, 0, 2, 0.0, 0)), Err(Error::Config(_))));
    }
}
