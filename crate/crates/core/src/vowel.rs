//! Vowel formant extraction (LPC, Burg method) and per-category ellipses.
//!
//! The pipeline mirrors the reference extractor's conventions: resample to
//! twice the formant ceiling, pre-emphasize from 50 Hz, slide a 25 ms
//! Gaussian window at 6.25 ms steps, fit prediction coefficients of order
//! 2 * max_formants by the Burg method, and read formants off the complex
//! roots of the prediction polynomial. A token's F1/F2 is the arithmetic
//! mean of the two lowest retained formants over the frames of the vowel
//! interval.

use crate::audio::{pre_emphasis, resample, AudioBuffer, AudioError};
use crate::textgrid::Interval;
use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VowelError {
    #[error("degenerate analysis frame (all-zero or constant)")]
    DegenerateFrame,

    #[error("polynomial root finding did not converge")]
    RootFindingFailure,

    #[error("interval of {interval_s} s is shorter than the {window_s} s analysis window")]
    TooShort { interval_s: f64, window_s: f64 },

    #[error("no analysis frame yielded at least two formants")]
    NoVoicedFrames,

    #[error("invalid formant config: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Audio(#[from] AudioError),
}

/// Analysis settings, defaulting to the reference extractor's values.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FormantConfig {
    pub max_formants: usize,
    pub ceiling_hz: f64,
    pub window_length_s: f64,
    pub time_step_s: f64,
    pub pre_emphasis_from_hz: f64,
    /// Fraction of the vowel interval, centered on its midpoint, that is
    /// analyzed. 1.0 measures the full interval.
    pub central_fraction: f64,
}

impl Default for FormantConfig {
    fn default() -> Self {
        Self {
            max_formants: 5,
            ceiling_hz: 5000.0,
            window_length_s: 0.025,
            time_step_s: 0.00625,
            pre_emphasis_from_hz: 50.0,
            central_fraction: 1.0,
        }
    }
}

impl FormantConfig {
    pub fn validate(&self) -> Result<(), VowelError> {
        let err = |msg: String| Err(VowelError::InvalidConfig(msg));
        if !(2..=7).contains(&self.max_formants) {
            return err(format!("max_formants must be in [2, 7], got {}", self.max_formants));
        }
        if !(self.ceiling_hz.is_finite() && self.ceiling_hz > 0.0) {
            return err(format!("ceiling_hz must be positive, got {}", self.ceiling_hz));
        }
        if !(self.window_length_s.is_finite() && self.window_length_s > 0.0) {
            return err(format!("window_length_s must be positive, got {}", self.window_length_s));
        }
        if !(self.time_step_s.is_finite() && self.time_step_s > 0.0) {
            return err(format!("time_step_s must be positive, got {}", self.time_step_s));
        }
        if !(self.pre_emphasis_from_hz.is_finite() && self.pre_emphasis_from_hz >= 0.0) {
            return err(format!(
                "pre_emphasis_from_hz must be non-negative, got {}",
                self.pre_emphasis_from_hz
            ));
        }
        if !(self.central_fraction > 0.0 && self.central_fraction <= 1.0) {
            return err(format!(
                "central_fraction must be in (0, 1], got {}",
                self.central_fraction
            ));
        }
        Ok(())
    }

    pub fn lpc_order(&self) -> usize {
        2 * self.max_formants
    }
}

/// Gaussian analysis window with edge value exp(-12), normalized so the
/// edges sit at zero.
pub fn gaussian_window(len: usize) -> Vec<f64> {
    let edge = (-12.0f64).exp();
    let imid = 0.5 * (len as f64 + 1.0);
    (1..=len)
        .map(|i| {
            let x = (i as f64 - imid) / (len as f64 + 1.0);
            ((-48.0 * x * x).exp() - edge) / (1.0 - edge)
        })
        .collect()
}

/// Burg-method prediction coefficients for the positive convention
/// `x[n] ~ a[0] x[n-1] + a[1] x[n-2] + ...`.
///
/// The caller must supply `frame.len() > order`. A frame with no energy
/// or no variation is rejected as degenerate. If the lattice recursion
/// hits a zero denominator, the remaining coefficients stay zero, which
/// matches the reference implementation.
pub fn lpc_burg(frame: &[f64], order: usize) -> Result<Vec<f64>, VowelError> {
    let n = frame.len();
    assert!(n > order, "frame length {n} must exceed order {order}");
    let p: f64 = frame.iter().map(|x| x * x).sum();
    if p <= 0.0 || frame.iter().all(|x| *x == frame[0]) {
        return Err(VowelError::DegenerateFrame);
    }

    let mut a = vec![0.0f64; order];
    let mut aa = vec![0.0f64; order];
    let mut b1 = vec![0.0f64; n];
    let mut b2 = vec![0.0f64; n];
    let mut xms = p / n as f64;
    b1[..n - 1].copy_from_slice(&frame[..n - 1]);
    b2[..n - 1].copy_from_slice(&frame[1..]);

    for i in 1..=order {
        let mut num = 0.0;
        let mut den = 0.0;
        for t in 0..(n - i) {
            num += b1[t] * b2[t];
            den += b1[t] * b1[t] + b2[t] * b2[t];
        }
        if den <= 0.0 {
            break;
        }
        let k = 2.0 * num / den;
        a[i - 1] = k;
        xms *= 1.0 - k * k;
        for j in 1..i {
            a[j - 1] = aa[j - 1] - k * aa[i - j - 1];
        }
        if i < order {
            aa[..i].copy_from_slice(&a[..i]);
            for t in 0..(n - i - 1) {
                b1[t] -= aa[i - 1] * b2[t];
                b2[t] = b2[t + 1] - aa[i - 1] * b1[t + 1];
            }
        }
    }
    let _ = xms;
    Ok(a)
}

/// One resonance read off a complex root pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Formant {
    pub frequency_hz: f64,
    pub bandwidth_hz: f64,
}

/// Formants from prediction coefficients: roots of
/// `z^m - a[0] z^(m-1) - ... - a[m-1]` via companion-matrix eigenvalues.
/// Roots outside the unit circle are reflected inside; upper-half-plane
/// roots become `f = atan2(im, re) * rate / (2 pi)` with bandwidth
/// `-ln|z| * rate / pi`. Retained: 50 < f < nyquist - 50 and bandwidth
/// < 400 Hz, sorted ascending by frequency.
pub fn formants_from_lpc(coeffs: &[f64], sample_rate: f64) -> Result<Vec<Formant>, VowelError> {
    let m = coeffs.len();
    if m == 0 || coeffs.iter().all(|c| *c == 0.0) {
        return Ok(Vec::new());
    }
    let companion = DMatrix::from_fn(m, m, |r, c| {
        if r == 0 {
            coeffs[c]
        } else if c == r - 1 {
            1.0
        } else {
            0.0
        }
    });
    let schur = nalgebra::linalg::Schur::try_new(companion, 1e-12, 200 * m)
        .ok_or(VowelError::RootFindingFailure)?;
    let eigenvalues = schur.complex_eigenvalues();

    let nyquist = sample_rate / 2.0;
    let mut formants = Vec::new();
    for root in eigenvalues.iter() {
        let mut z: Complex<f64> = *root;
        let norm_sq = z.norm_sqr();
        if norm_sq > 1.0 {
            z /= norm_sq;
        }
        if z.im <= 0.0 {
            continue;
        }
        let frequency_hz = z.im.atan2(z.re) * sample_rate / (2.0 * PI);
        let bandwidth_hz = -z.norm().ln() * sample_rate / PI;
        if frequency_hz > 50.0 && frequency_hz < nyquist - 50.0 && bandwidth_hz < 400.0 {
            formants.push(Formant {
                frequency_hz,
                bandwidth_hz,
            });
        }
    }
    formants.sort_by(|a, b| a.frequency_hz.partial_cmp(&b.frequency_hz).unwrap());
    Ok(formants)
}

/// One measured vowel: mean F1/F2 over the interval's analysis frames.
#[derive(Debug, Clone, PartialEq)]
pub struct VowelToken {
    pub vowel: String,
    pub f1_hz: f64,
    pub f2_hz: f64,
    pub interval: Interval,
    pub file: String,
    pub model: String,
}

/// Measure one vowel interval.
///
/// The segment (optionally narrowed to `central_fraction`) is resampled
/// to `2 * ceiling_hz`, pre-emphasized, and analyzed frame by frame.
/// Frames yielding fewer than two retained formants are skipped; the
/// token is the mean of the rest.
pub fn measure_vowel(
    audio: &AudioBuffer,
    interval: &Interval,
    cfg: &FormantConfig,
    file: &str,
    model: &str,
) -> Result<VowelToken, VowelError> {
    cfg.validate()?;
    let (start, end) = if cfg.central_fraction < 1.0 {
        let mid = 0.5 * (interval.xmin + interval.xmax);
        let half = 0.5 * interval.duration() * cfg.central_fraction;
        (mid - half, mid + half)
    } else {
        (interval.xmin, interval.xmax)
    };
    if end - start < cfg.window_length_s {
        return Err(VowelError::TooShort {
            interval_s: end - start,
            window_s: cfg.window_length_s,
        });
    }

    let segment = crate::audio::extract_segment(audio, start, end)?;
    let target_rate = 2.0 * cfg.ceiling_hz;
    let resampled = resample(&segment, target_rate)?;
    let emphasized = pre_emphasis(&resampled, cfg.pre_emphasis_from_hz)?;

    let rate = emphasized.sample_rate;
    let window_len = (cfg.window_length_s * rate).round() as usize;
    let step = ((cfg.time_step_s * rate).round() as usize).max(1);
    let order = cfg.lpc_order();
    if window_len <= order {
        return Err(VowelError::InvalidConfig(format!(
            "window of {window_len} samples cannot support LPC order {order}"
        )));
    }
    if emphasized.samples.len() < window_len {
        return Err(VowelError::TooShort {
            interval_s: end - start,
            window_s: cfg.window_length_s,
        });
    }

    let window = gaussian_window(window_len);
    let mut sum_f1 = 0.0;
    let mut sum_f2 = 0.0;
    let mut frames_used = 0usize;
    let mut offset = 0usize;
    while offset + window_len <= emphasized.samples.len() {
        let frame: Vec<f64> = emphasized.samples[offset..offset + window_len]
            .iter()
            .zip(&window)
            .map(|(s, w)| s * w)
            .collect();
        offset += step;
        let coeffs = match lpc_burg(&frame, order) {
            Ok(c) => c,
            Err(VowelError::DegenerateFrame) => continue,
            Err(e) => return Err(e),
        };
        let formants = formants_from_lpc(&coeffs, rate)?;
        if formants.len() < 2 {
            continue;
        }
        sum_f1 += formants[0].frequency_hz;
        sum_f2 += formants[1].frequency_hz;
        frames_used += 1;
    }
    if frames_used == 0 {
        return Err(VowelError::NoVoicedFrames);
    }
    Ok(VowelToken {
        vowel: interval.text.trim().to_string(),
        f1_hz: sum_f1 / frames_used as f64,
        f2_hz: sum_f2 / frames_used as f64,
        interval: interval.clone(),
        file: file.to_string(),
        model: model.to_string(),
    })
}

/// Dispersion ellipse of one vowel category under one model.
/// Axis order is (F2, F1) to match vowel-chart convention.
#[derive(Debug, Clone, PartialEq)]
pub struct VowelEllipse {
    pub vowel: String,
    pub model: String,
    /// (mean F2, mean F1) in Hz.
    pub center: (f64, f64),
    /// (population std F2, population std F1) in Hz; the drawn axis is
    /// twice this. Zero when n < 2 (center-only marker).
    pub semi_axes: (f64, f64),
    pub n: usize,
}

/// Group tokens by (vowel, model) and compute center and semi-axes with
/// the two-pass textbook formulas, so results agree exactly with a
/// reference implementation on identical data.
pub fn build_ellipses(tokens: &[VowelToken]) -> Vec<VowelEllipse> {
    let mut groups: BTreeMap<(String, String), Vec<&VowelToken>> = BTreeMap::new();
    for token in tokens {
        groups
            .entry((token.vowel.clone(), token.model.clone()))
            .or_default()
            .push(token);
    }
    groups
        .into_iter()
        .map(|((vowel, model), members)| {
            let n = members.len();
            let mean = |get: &dyn Fn(&VowelToken) -> f64| -> f64 {
                members.iter().map(|t| get(t)).sum::<f64>() / n as f64
            };
            let std = |get: &dyn Fn(&VowelToken) -> f64, mean: f64| -> f64 {
                (members
                    .iter()
                    .map(|t| {
                        let d = get(t) - mean;
                        d * d
                    })
                    .sum::<f64>()
                    / n as f64)
                    .sqrt()
            };
            let mean_f2 = mean(&|t| t.f2_hz);
            let mean_f1 = mean(&|t| t.f1_hz);
            VowelEllipse {
                vowel,
                model,
                center: (mean_f2, mean_f1),
                semi_axes: (std(&|t| t.f2_hz, mean_f2), std(&|t| t.f1_hz, mean_f1)),
                n,
            }
        })
        .collect()
}

/// CSV with one row per token: file, model, vowel, f1_hz, f2_hz,
/// t_start, t_end.
pub fn tokens_to_csv(tokens: &[VowelToken]) -> Result<String, VowelError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let map_err = |e: csv::Error| VowelError::InvalidConfig(e.to_string());
    writer
        .write_record(["file", "model", "vowel", "f1_hz", "f2_hz", "t_start", "t_end"])
        .map_err(map_err)?;
    for t in tokens {
        writer
            .write_record([
                t.file.as_str(),
                t.model.as_str(),
                t.vowel.as_str(),
                &format!("{}", t.f1_hz),
                &format!("{}", t.f2_hz),
                &format!("{}", t.interval.xmin),
                &format!("{}", t.interval.xmax),
            ])
            .map_err(map_err)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| VowelError::InvalidConfig(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| VowelError::InvalidConfig(e.to_string()))
}
