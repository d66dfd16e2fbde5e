//! Tone recognition over magnitude spectra.
//!
//! A reference tone is a unit vector with equal mass on a fundamental bin
//! k_t and its first n_h harmonic multiples. Recognition ranks all 48
//! references (octaves 2–5, twelve semitones each) by a chosen measure:
//! squared norm distance, the F functional, or the frame measures Δ/∇.
//! More harmonics in the references means fewer wrong-octave hits for
//! instruments that excite harmonics strongly; the frame measures keep the
//! ranking stable when broadband noise is sprinkled on the spectrum.

pub mod spectrum;
pub mod wav;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frame::{Frame, FrameError};
use crate::signal::{inner, Signal, SignalError};
pub use spectrum::{magnitude_spectrum, Spectrum, TimeSignal, SAMPLE_RATE, SPECTRUM_BINS};
pub use wav::{load_wav, parse_wav, save_wav, wav_bytes, WavError};

#[derive(Debug, Error, PartialEq)]
pub enum ToneError {
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("expected exactly {SAMPLE_RATE} samples, got {got}")]
    WrongSampleCount { got: usize },
    #[error("sample {index} outside [-1, 1]")]
    SampleOutOfRange { index: usize },
    #[error("expected exactly {SPECTRUM_BINS} magnitudes, got {got}")]
    WrongBinCount { got: usize },
    #[error("magnitude at bin {bin} is negative or not finite")]
    NegativeMagnitude { bin: usize },
    #[error("octave {0} outside the supported range 2..=5")]
    OctaveOutOfRange(i32),
    #[error("harmonic bin {bin} exceeds the Nyquist bin {SPECTRUM_BINS}")]
    HarmonicAboveNyquist { bin: usize },
    #[error("cannot recognize with {0:?} without a frame")]
    MissingFrame(ToneMeasure),
    #[error("noise covers {got} bins but the spectrum has {SPECTRUM_BINS}")]
    NoiseCountTooLarge { got: usize },
    #[error("noise amplitude must be finite and nonnegative")]
    BadNoiseAmplitude,
    #[error("synthesized waveform is identically zero")]
    ZeroWaveform,
    #[error("cannot parse {0:?} as a tone name")]
    UnknownTone(String),
}

/// The twelve semitone classes of an octave.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PitchClass {
    C,
    CSharp,
    D,
    DSharp,
    E,
    F,
    FSharp,
    G,
    GSharp,
    A,
    ASharp,
    B,
}

impl PitchClass {
    pub const ALL: [PitchClass; 12] = [
        PitchClass::C,
        PitchClass::CSharp,
        PitchClass::D,
        PitchClass::DSharp,
        PitchClass::E,
        PitchClass::F,
        PitchClass::FSharp,
        PitchClass::G,
        PitchClass::GSharp,
        PitchClass::A,
        PitchClass::ASharp,
        PitchClass::B,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PitchClass::C => "C",
            PitchClass::CSharp => "C#",
            PitchClass::D => "D",
            PitchClass::DSharp => "D#",
            PitchClass::E => "E",
            PitchClass::F => "F",
            PitchClass::FSharp => "F#",
            PitchClass::G => "G",
            PitchClass::GSharp => "G#",
            PitchClass::A => "A",
            PitchClass::ASharp => "A#",
            PitchClass::B => "B",
        }
    }

    /// Semitones above C within the octave.
    fn index(self) -> i32 {
        Self::ALL.iter().position(|p| *p == self).unwrap() as i32
    }
}

/// A named tone in octaves 2..=5 with its fundamental frequency bin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ToneId {
    pub pitch_class: PitchClass,
    pub octave: i32,
}

impl ToneId {
    pub const LOWEST_OCTAVE: i32 = 2;
    pub const HIGHEST_OCTAVE: i32 = 5;

    pub fn new(pitch_class: PitchClass, octave: i32) -> Result<Self, ToneError> {
        if !(Self::LOWEST_OCTAVE..=Self::HIGHEST_OCTAVE).contains(&octave) {
            return Err(ToneError::OctaveOutOfRange(octave));
        }
        Ok(Self {
            pitch_class,
            octave,
        })
    }

    /// Fundamental bin k_t = round(440 · 2^(s/12)), s = semitones from A4.
    ///
    /// Rounding to nearest reproduces the whole equal-temperament table
    /// 65, 69, 73, …, 932, 988 (truncation would give B5 = 987).
    pub fn fundamental_bin(&self) -> usize {
        let s = (self.octave - 4) * 12 + (self.pitch_class.index() - 9);
        (440.0 * (2f64).powf(s as f64 / 12.0)).round() as usize
    }

    /// All 48 tones of octaves 2..=5, in ascending fundamental order.
    pub fn all() -> Vec<ToneId> {
        let mut out = Vec::with_capacity(48);
        for octave in Self::LOWEST_OCTAVE..=Self::HIGHEST_OCTAVE {
            for pitch_class in PitchClass::ALL {
                out.push(ToneId {
                    pitch_class,
                    octave,
                });
            }
        }
        out
    }
}

impl fmt::Display for ToneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.pitch_class.name(), self.octave)
    }
}

impl FromStr for ToneId {
    type Err = ToneError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim().replace('♯', "#");
        let err = || ToneError::UnknownTone(s.to_string());
        let split = text
            .find(|c: char| c.is_ascii_digit() || c == '-')
            .ok_or_else(err)?;
        let (name, octave) = text.split_at(split);
        let pitch_class = *PitchClass::ALL
            .iter()
            .find(|p| p.name().eq_ignore_ascii_case(name))
            .ok_or_else(err)?;
        let octave: i32 = octave.parse().map_err(|_| err())?;
        ToneId::new(pitch_class, octave)
    }
}

impl Serialize for ToneId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ToneId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// One reference tone: a unit spectrum with n_h+1 equal nonzero bins.
#[derive(Clone, Debug)]
pub struct ReferenceTone {
    pub id: ToneId,
    spectrum: Signal,
}

impl ReferenceTone {
    pub fn spectrum(&self) -> &Signal {
        &self.spectrum
    }
}

/// The 48 reference tones O^t for a fixed harmonic count n_h.
#[derive(Clone, Debug)]
pub struct ReferenceToneSet {
    n_h: usize,
    tones: Vec<ReferenceTone>,
}

impl ReferenceToneSet {
    /// Each reference carries 1/√(n_h+1) at bins k_t, 2k_t, …, (n_h+1)k_t.
    /// Errors when the top harmonic of the highest tone would pass Nyquist.
    pub fn new(n_h: usize) -> Result<Self, ToneError> {
        let highest = ToneId::new(PitchClass::B, 5).unwrap().fundamental_bin();
        if (n_h + 1) * highest > SPECTRUM_BINS {
            return Err(ToneError::HarmonicAboveNyquist {
                bin: (n_h + 1) * highest,
            });
        }
        let weight = 1.0 / ((n_h + 1) as f64).sqrt();
        let tones = ToneId::all()
            .into_iter()
            .map(|id| {
                let mut entries = vec![0.0; SPECTRUM_BINS];
                let k = id.fundamental_bin();
                for j in 1..=(n_h + 1) {
                    entries[j * k - 1] = weight;
                }
                ReferenceTone {
                    id,
                    spectrum: Signal::new(entries).unwrap(),
                }
            })
            .collect();
        Ok(Self { n_h, tones })
    }

    pub fn harmonics(&self) -> usize {
        self.n_h
    }

    pub fn tones(&self) -> &[ReferenceTone] {
        &self.tones
    }

    pub fn get(&self, id: ToneId) -> &ReferenceTone {
        self.tones.iter().find(|t| t.id == id).unwrap()
    }
}

/// How an input spectrum is compared against the reference tones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ToneMeasure {
    /// ‖f − O^t‖².
    SqNorm,
    /// ‖f‖‖O^t‖ − |⟨f,O^t⟩| (equals 1 − ⟨f,O^t⟩ on normalized input).
    F,
    /// Frame measure Δ(f, O^t); needs a frame over the spectrum space.
    Delta,
    /// Frame measure ∇(f, O^t); needs a frame over the spectrum space.
    Nabla,
}

/// Rank every reference tone by the measure, ascending; the first entry is
/// the recognized tone. Ties break by ascending fundamental bin.
///
/// The squared norm is evaluated as ‖f‖² + ‖O‖² − 2⟨f,O⟩ so that references
/// with identical overlap produce bitwise-equal values and fall into the
/// deterministic tie order regardless of where their bins sit.
pub fn recognize(
    f: &Spectrum,
    refs: &ReferenceToneSet,
    measure: ToneMeasure,
    frame: Option<&Frame>,
) -> Result<Vec<(ToneId, f64)>, ToneError> {
    let frame = match measure {
        ToneMeasure::Delta | ToneMeasure::Nabla => {
            Some(frame.ok_or(ToneError::MissingFrame(measure))?)
        }
        _ => None,
    };
    let signal = f.as_signal();
    let norm = signal.norm();
    let norm_sq = signal.norm_sq();

    let mut ranked: Vec<(ToneId, f64)> = refs
        .tones()
        .iter()
        .map(|tone| {
            let o = tone.spectrum();
            let value = match measure {
                ToneMeasure::SqNorm => (norm_sq + o.norm_sq() - 2.0 * inner(signal, o)?).max(0.0),
                ToneMeasure::F => norm * o.norm() - inner(signal, o)?.abs(),
                ToneMeasure::Delta => frame.unwrap().delta(signal, o)?,
                ToneMeasure::Nabla => frame.unwrap().nabla(signal, o)?,
            };
            Ok((tone.id, value))
        })
        .collect::<Result<_, ToneError>>()?;

    ranked.sort_by(|a, b| {
        a.1.total_cmp(&b.1)
            .then(a.0.fundamental_bin().cmp(&b.0.fundamental_bin()))
    });
    Ok(ranked)
}

/// Add seeded uniform [0, amplitude) noise to the first `count` bins.
/// The result is not renormalized.
pub fn add_spectral_noise(
    f: &Spectrum,
    count: usize,
    amplitude: f64,
    seed: u64,
) -> Result<Spectrum, ToneError> {
    if count > SPECTRUM_BINS {
        return Err(ToneError::NoiseCountTooLarge { got: count });
    }
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(ToneError::BadNoiseAmplitude);
    }
    if amplitude == 0.0 || count == 0 {
        return Ok(f.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut magnitudes = f.magnitudes().to_vec();
    for m in magnitudes.iter_mut().take(count) {
        *m += rng.random_range(0.0..amplitude);
    }
    Spectrum::from_magnitudes(magnitudes, false)
}

/// Synthesize one second of Σ_h a_h · sin(2π · h·k_t · t), peak-normalized
/// to 0.9. Stands in for instrument recordings in tests and demos: harmonic
/// h·k_t completes an integer number of cycles, so its spectral mass lands
/// exactly in bin h·k_t.
pub fn synth_tone(k_t: usize, harmonic_amplitudes: &[f64]) -> Result<TimeSignal, ToneError> {
    if k_t == 0 {
        return Err(ToneError::HarmonicAboveNyquist { bin: 0 });
    }
    let top = harmonic_amplitudes.len() * k_t;
    if harmonic_amplitudes.is_empty() || top > SPECTRUM_BINS {
        return Err(ToneError::HarmonicAboveNyquist { bin: top });
    }
    let mut samples = vec![0.0; SAMPLE_RATE];
    for (h, amp) in harmonic_amplitudes.iter().enumerate() {
        let freq = ((h + 1) * k_t) as f64;
        for (i, s) in samples.iter_mut().enumerate() {
            *s += amp * (std::f64::consts::TAU * freq * i as f64 / SAMPLE_RATE as f64).sin();
        }
    }
    let peak = samples.iter().map(|s| s.abs()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(ToneError::ZeroWaveform);
    }
    let gain = 0.9 / peak;
    for s in samples.iter_mut() {
        *s *= gain;
    }
    TimeSignal::new(samples)
}
