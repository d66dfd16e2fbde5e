//! One-second audio at 44.1 kHz and its magnitude spectrum.
//!
//! Fixing the duration to exactly one second makes bin n of the DFT sit at
//! n Hz, so the 22050 retained magnitudes (DC dropped, up to Nyquist) index
//! directly by frequency.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::ToneError;
use crate::signal::Signal;

/// Samples per second, and the fixed length of a [`TimeSignal`].
pub const SAMPLE_RATE: usize = 44_100;
/// Retained spectrum bins 1..=22050; bin n is n Hz.
pub const SPECTRUM_BINS: usize = SAMPLE_RATE / 2;

/// Exactly one second of mono audio: 44100 samples in [−1, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSignal {
    samples: Vec<f64>,
}

impl TimeSignal {
    pub fn new(samples: Vec<f64>) -> Result<Self, ToneError> {
        if samples.len() != SAMPLE_RATE {
            return Err(ToneError::WrongSampleCount { got: samples.len() });
        }
        for (index, s) in samples.iter().enumerate() {
            if !s.is_finite() || s.abs() > 1.0 {
                return Err(ToneError::SampleOutOfRange { index });
            }
        }
        Ok(Self { samples })
    }

    /// Zero-pad shorter inputs to one second, truncate longer ones.
    pub fn from_padded(mut samples: Vec<f64>) -> Result<Self, ToneError> {
        samples.resize(SAMPLE_RATE, 0.0);
        Self::new(samples)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
}

/// Nonnegative DFT magnitudes over bins 1..=22050.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    data: Signal,
    normalized: bool,
}

impl Spectrum {
    /// Wrap raw magnitudes (bin 1 first), optionally scaling to unit norm.
    pub fn from_magnitudes(magnitudes: Vec<f64>, normalize: bool) -> Result<Self, ToneError> {
        if magnitudes.len() != SPECTRUM_BINS {
            return Err(ToneError::WrongBinCount {
                got: magnitudes.len(),
            });
        }
        if let Some(bin) = magnitudes.iter().position(|m| !m.is_finite() || *m < 0.0) {
            return Err(ToneError::NegativeMagnitude { bin: bin + 1 });
        }
        let mut data = Signal::new(magnitudes)?;
        let mut normalized = false;
        if normalize {
            let n = data.norm();
            if n > 0.0 {
                data = data.scaled(1.0 / n);
                normalized = true;
            }
        }
        Ok(Self { data, normalized })
    }

    pub fn magnitudes(&self) -> &[f64] {
        self.data.entries()
    }

    pub fn as_signal(&self) -> &Signal {
        &self.data
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Magnitude at a 1-based bin (bin n = n Hz).
    pub fn magnitude(&self, bin: usize) -> f64 {
        self.data.entries()[bin - 1]
    }

    /// 1-based bin holding the largest magnitude (lowest bin wins ties).
    pub fn dominant_bin(&self) -> usize {
        let e = self.data.entries();
        let mut best = 0;
        for (i, m) in e.iter().enumerate() {
            if *m > e[best] {
                best = i;
            }
        }
        best + 1
    }

    /// CSV rows "bin,magnitude" with a header, for plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin,magnitude\n");
        for (i, m) in self.data.entries().iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, m));
        }
        out
    }
}

/// 44100-point DFT magnitudes of a one-second signal, bins 1..=22050.
pub fn magnitude_spectrum(t: &TimeSignal, normalize: bool) -> Spectrum {
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(SAMPLE_RATE);
    let mut buf: Vec<Complex<f64>> = t.samples().iter().map(|s| Complex::new(*s, 0.0)).collect();
    fft.process(&mut buf);
    let magnitudes: Vec<f64> = buf[1..=SPECTRUM_BINS].iter().map(|c| c.norm()).collect();
    Spectrum::from_magnitudes(magnitudes, normalize).unwrap()
}
