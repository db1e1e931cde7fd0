//! End-to-end formant recovery on synthetic vowels with known resonances,
//! plus the exact-statistics oracle for ellipse construction.

use aligneval_core::audio::AudioBuffer;
use aligneval_core::textgrid::Interval;
use aligneval_core::vowel::{build_ellipses, measure_vowel, FormantConfig, VowelToken};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::collections::HashMap;
use std::f64::consts::PI;

/// Source-filter vowel synthesis: a 122 Hz pulse train with a small
/// aspiration floor, glottal-like spectral tilt (one real pole at 50 Hz,
/// which the analysis pre-emphasis undoes), resonators at the two target
/// formants plus fixed higher resonances near 3.4 and 4.4 kHz so the LPC
/// pole budget is spent on real structure, and measurement noise 40 dB
/// down. Pure noise excitation is not enough here: its random spectral
/// dips occasionally wipe out one formant for a whole analysis frame.
fn synth_vowel(seed: u64, rate: f64, f1: f64, f2: f64, dur_s: f64) -> AudioBuffer {
    let n = (rate * dur_s).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tilt = (-2.0 * PI * 50.0 / rate).exp();
    let res = |freq: f64, bw: f64| {
        let r = (-PI * bw / rate).exp();
        (2.0 * r * (2.0 * PI * freq / rate).cos(), -r * r)
    };
    let stages = [
        res(f1, 80.0),
        res(f2, 120.0),
        res(3400.0, 300.0),
        res(4400.0, 350.0),
    ];
    let period = rate / 122.0;
    let mut next_pulse = 0.0f64;
    let mut signal = vec![0.0f64; n];
    let mut prev_tilt = 0.0;
    for (i, s) in signal.iter_mut().enumerate() {
        let mut src = 0.03 * rng.random_range(-1.0f64..1.0);
        if i as f64 >= next_pulse {
            src += 1.0;
            next_pulse += period;
        }
        let t = src + tilt * prev_tilt;
        prev_tilt = t;
        *s = t;
    }
    for (b, c) in stages {
        let mut out = vec![0.0f64; n];
        for i in 0..n {
            out[i] = signal[i]
                + b * if i >= 1 { out[i - 1] } else { 0.0 }
                + c * if i >= 2 { out[i - 2] } else { 0.0 };
        }
        signal = out;
    }
    let rms = (signal.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    let noise_amp = rms / 10f64.powf(40.0 / 20.0);
    let samples: Vec<f64> = signal
        .iter()
        .map(|v| (v + noise_amp * rng.random_range(-1.0..1.0)) / (rms * 8.0))
        .collect();
    AudioBuffer::new(rate, samples)
}

#[test]
fn synthetic_vowel_formants_recovered_within_five_percent() {
    let cfg = FormantConfig::default();
    for (seed, (f1, f2)) in [(1u64, (700.0, 1200.0)), (2, (500.0, 1500.0)), (3, (300.0, 2300.0))]
    {
        let audio = synth_vowel(seed, 16_000.0, f1, f2, 0.25);
        let interval = Interval::new(0.025, 0.225, "a");
        let token = measure_vowel(&audio, &interval, &cfg, "synth.wav", "m").unwrap();
        let d1 = (token.f1_hz - f1).abs() / f1;
        let d2 = (token.f2_hz - f2).abs() / f2;
        assert!(
            d1 < 0.05 && d2 < 0.05,
            "target ({f1}, {f2}) got ({:.1}, {:.1})",
            token.f1_hz,
            token.f2_hz
        );
        assert!(token.f1_hz < token.f2_hz);
    }
}

#[test]
fn formants_are_invariant_under_amplitude_scaling() {
    let cfg = FormantConfig::default();
    let audio = synth_vowel(9, 16_000.0, 700.0, 1200.0, 0.25);
    let interval = Interval::new(0.025, 0.225, "a");
    let base = measure_vowel(&audio, &interval, &cfg, "f", "m").unwrap();

    let scaled = AudioBuffer::new(
        audio.sample_rate,
        audio.samples.iter().map(|s| s * 3.7).collect(),
    );
    let gained = measure_vowel(&scaled, &interval, &cfg, "f", "m").unwrap();
    assert!((gained.f1_hz - base.f1_hz).abs() / base.f1_hz < 0.001);
    assert!((gained.f2_hz - base.f2_hz).abs() / base.f2_hz < 0.001);
}

#[test]
fn central_fraction_narrows_the_analysed_span() {
    let cfg = FormantConfig {
        central_fraction: 0.5,
        ..FormantConfig::default()
    };
    let audio = synth_vowel(4, 16_000.0, 700.0, 1200.0, 0.25);
    // Full interval is 0.2 s; the central half (0.1 s) still fits frames.
    let interval = Interval::new(0.025, 0.225, "a");
    let token = measure_vowel(&audio, &interval, &cfg, "f", "m").unwrap();
    assert!((token.f1_hz - 700.0).abs() / 700.0 < 0.05);

    // With fraction 0.5 a 0.04 s interval leaves 0.02 s, under the window.
    let short = Interval::new(0.1, 0.14, "a");
    assert!(measure_vowel(&audio, &short, &cfg, "f", "m").is_err());
}

fn random_tokens(seed: u64, n: usize) -> Vec<VowelToken> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f1_dist = Normal::new(500.0, 50.0).unwrap();
    let f2_dist = Normal::new(1500.0, 150.0).unwrap();
    let vowels = ["a", "i", "u"];
    let models = ["m1", "m2"];
    (0..n)
        .map(|i| VowelToken {
            vowel: vowels[rng.random_range(0..vowels.len())].into(),
            model: models[rng.random_range(0..models.len())].into(),
            f1_hz: f1_dist.sample(&mut rng),
            f2_hz: f2_dist.sample(&mut rng),
            interval: Interval::new(i as f64, i as f64 + 0.1, "v"),
            file: "f".into(),
        })
        .collect()
}

#[test]
fn ellipses_equal_reference_statistics_exactly() {
    let tokens = random_tokens(17, 100);
    let ellipses = build_ellipses(&tokens);

    // Independent reference: group with a HashMap, then textbook two-pass
    // mean and population std in token order.
    let mut groups: HashMap<(String, String), Vec<(f64, f64)>> = HashMap::new();
    for t in &tokens {
        groups
            .entry((t.vowel.clone(), t.model.clone()))
            .or_default()
            .push((t.f2_hz, t.f1_hz));
    }
    assert_eq!(ellipses.len(), groups.len());
    for e in &ellipses {
        let members = &groups[&(e.vowel.clone(), e.model.clone())];
        let n = members.len() as f64;
        let mean_f2 = members.iter().map(|m| m.0).sum::<f64>() / n;
        let mean_f1 = members.iter().map(|m| m.1).sum::<f64>() / n;
        let std_f2 = (members.iter().map(|m| (m.0 - mean_f2) * (m.0 - mean_f2)).sum::<f64>() / n)
            .sqrt();
        let std_f1 = (members.iter().map(|m| (m.1 - mean_f1) * (m.1 - mean_f1)).sum::<f64>() / n)
            .sqrt();
        assert_eq!(e.n, members.len());
        assert_eq!(e.center.0.to_bits(), mean_f2.to_bits());
        assert_eq!(e.center.1.to_bits(), mean_f1.to_bits());
        assert_eq!(e.semi_axes.0.to_bits(), std_f2.to_bits());
        assert_eq!(e.semi_axes.1.to_bits(), std_f1.to_bits());
    }
}
