//! Fixture builders shared by the CLI integration tests: a minimal PCM16
//! WAV encoder, TextGrid constructors, a two-resonator vowel synthesizer
//! and a handle on the compiled binary.

#![allow(dead_code)] // each test target uses its own subset

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;

use aligneval_core::audio::AudioBuffer;
use aligneval_core::textgrid::{serialize, Interval, IntervalTier, TextGrid, Tier};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// The binary under test.
pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_aligneval"))
}

/// Mono 16-bit PCM RIFF bytes.
pub fn pcm16_wav(rate: u32, samples: &[i16]) -> Vec<u8> {
    let data_len = samples.len() * 2;
    let mut b = Vec::with_capacity(44 + data_len);
    b.extend_from_slice(b"RIFF");
    b.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    b.extend_from_slice(b"WAVE");
    b.extend_from_slice(b"fmt ");
    b.extend_from_slice(&16u32.to_le_bytes());
    b.extend_from_slice(&1u16.to_le_bytes()); // PCM
    b.extend_from_slice(&1u16.to_le_bytes()); // mono
    b.extend_from_slice(&rate.to_le_bytes());
    b.extend_from_slice(&(rate * 2).to_le_bytes());
    b.extend_from_slice(&2u16.to_le_bytes());
    b.extend_from_slice(&16u16.to_le_bytes());
    b.extend_from_slice(b"data");
    b.extend_from_slice(&(data_len as u32).to_le_bytes());
    for s in samples {
        b.extend_from_slice(&s.to_le_bytes());
    }
    b
}

/// A WAV of `n` samples of low-level deterministic filler, for tests that
/// only care about the duration in the header.
pub fn filler_wav(rate: u32, n: usize) -> Vec<u8> {
    let samples: Vec<i16> = (0..n).map(|i| ((i * 37) % 1024) as i16 - 512).collect();
    pcm16_wav(rate, &samples)
}

/// Quantize a normalized buffer to PCM16 bytes.
pub fn wav_from_audio(audio: &AudioBuffer) -> Vec<u8> {
    let samples: Vec<i16> = audio
        .samples
        .iter()
        .map(|v| (v * 32767.0).round().clamp(-32768.0, 32767.0) as i16)
        .collect();
    pcm16_wav(audio.sample_rate as u32, &samples)
}

/// An interval tier spanning the given triples.
pub fn itier(name: &str, intervals: &[(f64, f64, &str)]) -> IntervalTier {
    let xmin = intervals.first().map(|iv| iv.0).unwrap_or(0.0);
    let xmax = intervals.last().map(|iv| iv.1).unwrap_or(1.0);
    IntervalTier {
        name: name.into(),
        xmin,
        xmax,
        intervals: intervals
            .iter()
            .map(|&(a, b, t)| Interval::new(a, b, t))
            .collect(),
    }
}

pub fn tier(name: &str, intervals: &[(f64, f64, &str)]) -> Tier {
    Tier::Interval(itier(name, intervals))
}

/// A grid whose bounds cover all of its tiers.
pub fn grid(tiers: Vec<Tier>) -> TextGrid {
    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for t in &tiers {
        let (a, b) = match t {
            Tier::Interval(it) => (it.xmin, it.xmax),
            Tier::Point(pt) => (pt.xmin, pt.xmax),
        };
        xmin = xmin.min(a);
        xmax = xmax.max(b);
    }
    TextGrid { xmin, xmax, tiers }
}

pub fn write_grid(path: &Path, g: &TextGrid) {
    std::fs::write(path, serialize(g)).unwrap();
}

/// Source-filter synthesis with exactly two resonances: a 122 Hz pulse
/// train with a small aspiration floor, glottal-like tilt (one real pole
/// at 50 Hz, undone by the analysis pre-emphasis), resonators at the two
/// target formants, and white measurement noise `snr_db` below the
/// signal. Analysis of this signal should cap `max_formants` near 3 so
/// the pole budget matches the actual spectral structure.
pub fn synth_two_resonator(
    seed: u64,
    rate: f64,
    f1: f64,
    f2: f64,
    dur_s: f64,
    snr_db: f64,
) -> AudioBuffer {
    let n = (rate * dur_s).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tilt = (-2.0 * PI * 50.0 / rate).exp();
    let res = |freq: f64, bw: f64| {
        let r = (-PI * bw / rate).exp();
        (2.0 * r * (2.0 * PI * freq / rate).cos(), -r * r)
    };
    let stages = [res(f1, 80.0), res(f2, 120.0)];
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
    let noise_amp = rms / 10f64.powf(snr_db / 20.0);
    let samples: Vec<f64> = signal
        .iter()
        .map(|v| (v + noise_amp * rng.random_range(-1.0..1.0)) / (rms * 8.0))
        .collect();
    AudioBuffer::new(rate, samples)
}

/// Paths of a small two-file evaluation corpus written under `root`:
/// gold grids with word and phone tiers, hypothesis grids with shifted
/// phone onsets (one beyond 100 ms), WAVs, and a manifest.
pub struct EvalFixture {
    pub manifest: PathBuf,
    pub gold_dir: PathBuf,
    pub hyp_dir: PathBuf,
}

pub fn build_eval_fixture(root: &Path) -> EvalFixture {
    let audio_dir = root.join("audio");
    let gold_dir = root.join("gold");
    let hyp_dir = root.join("hyp");
    for d in [&audio_dir, &gold_dir, &hyp_dir] {
        std::fs::create_dir_all(d).unwrap();
    }

    std::fs::write(audio_dir.join("rec_a.wav"), filler_wav(8000, 4800)).unwrap();
    std::fs::write(audio_dir.join("rec_b.wav"), filler_wav(16000, 9600)).unwrap();

    // rec_a: two words, five phones over 0.6 s.
    let gold_a = grid(vec![
        tier("words", &[(0.0, 0.3, "warri"), (0.3, 0.6, "bon")]),
        tier(
            "phones",
            &[
                (0.0, 0.1, "w"),
                (0.1, 0.2, "a"),
                (0.2, 0.3, "r"),
                (0.3, 0.45, "b"),
                (0.45, 0.6, "o"),
            ],
        ),
    ]);
    // Hypothesis onsets drift late by 10 ms except the gross 150 ms miss
    // on the last phone. Interval edges stay inside [0, 0.6].
    let hyp_a = grid(vec![tier(
        "phones",
        &[
            (0.0, 0.11, "w"),
            (0.11, 0.21, "a"),
            (0.21, 0.31, "r"),
            (0.31, 0.6, "b"),
            (0.6, 0.75, "o"),
        ],
    )]);
    // rec_b: five phones, onsets early by 20 ms.
    let gold_b = grid(vec![
        tier("words", &[(0.0, 0.25, "nga"), (0.25, 0.6, "mo")]),
        tier(
            "phones",
            &[
                (0.0, 0.1, "ŋ"),
                (0.1, 0.25, "a"),
                (0.25, 0.4, "m"),
                (0.4, 0.6, "o"),
            ],
        ),
    ]);
    let hyp_b = grid(vec![tier(
        "phones",
        &[
            (0.0, 0.08, "ŋ"),
            (0.08, 0.23, "a"),
            (0.23, 0.38, "m"),
            (0.38, 0.6, "o"),
        ],
    )]);
    write_grid(&gold_dir.join("rec_a.TextGrid"), &gold_a);
    write_grid(&gold_dir.join("rec_b.TextGrid"), &gold_b);
    write_grid(&hyp_dir.join("rec_a.TextGrid"), &hyp_a);
    write_grid(&hyp_dir.join("rec_b.TextGrid"), &hyp_b);

    let manifest = root.join("manifest.csv");
    std::fs::write(
        &manifest,
        "audio,textgrid,language,split\n\
         audio/rec_a.wav,gold/rec_a.TextGrid,Kunbarlang,test\n\
         audio/rec_b.wav,gold/rec_b.TextGrid,Kunbarlang,test\n",
    )
    .unwrap();

    EvalFixture {
        manifest,
        gold_dir,
        hyp_dir,
    }
}
