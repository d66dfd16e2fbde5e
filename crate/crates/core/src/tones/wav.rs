//! Minimal RIFF/WAVE reader and writer for the one format the pipeline
//! accepts: PCM integer 16-bit little-endian at 44100 Hz, mono or stereo.

use std::fs;
use std::path::Path;

use super::spectrum::{TimeSignal, SAMPLE_RATE};
use super::ToneError;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WavError {
    #[error("io: {0}")]
    Io(String),
    #[error("not a RIFF file")]
    NotRiff,
    #[error("RIFF file is not WAVE")]
    NotWave,
    #[error("missing {0:?} chunk")]
    MissingChunk(&'static str),
    #[error("chunk {0:?} extends past end of file")]
    Truncated(String),
    #[error("unsupported encoding {0} (only PCM = 1)")]
    UnsupportedEncoding(u16),
    #[error("unsupported bit depth {0} (only 16)")]
    UnsupportedBitDepth(u16),
    #[error("unsupported sample rate {0} (only 44100)")]
    UnsupportedSampleRate(u32),
    #[error("unsupported channel count {0} (only 1 or 2)")]
    UnsupportedChannels(u16),
    #[error("{0}")]
    Samples(String),
}

impl From<ToneError> for WavError {
    fn from(e: ToneError) -> Self {
        WavError::Samples(e.to_string())
    }
}

fn u16_le(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_le(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

struct Format {
    encoding: u16,
    channels: u16,
    sample_rate: u32,
    bits: u16,
}

/// Read a WAV file into a one-second mono signal.
///
/// Stereo channels are averaged; shorter recordings are zero-padded to one
/// second and longer ones truncated to the first second. Samples scale to
/// [−1, 1] by division with 32768.
pub fn load_wav(path: &Path) -> Result<TimeSignal, WavError> {
    let bytes = fs::read(path).map_err(|e| WavError::Io(e.to_string()))?;
    parse_wav(&bytes)
}

pub fn parse_wav(bytes: &[u8]) -> Result<TimeSignal, WavError> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" {
        return Err(WavError::NotRiff);
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(WavError::NotWave);
    }

    let mut fmt: Option<Format> = None;
    let mut data: Option<&[u8]> = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_le(bytes, pos + 4) as usize;
        let body = pos + 8;
        if body + size > bytes.len() {
            return Err(WavError::Truncated(
                String::from_utf8_lossy(id).into_owned(),
            ));
        }
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(WavError::Truncated("fmt ".into()));
                }
                fmt = Some(Format {
                    encoding: u16_le(bytes, body),
                    channels: u16_le(bytes, body + 2),
                    sample_rate: u32_le(bytes, body + 4),
                    bits: u16_le(bytes, body + 14),
                });
            }
            b"data" => data = Some(&bytes[body..body + size]),
            _ => {} // LIST, fact, cue, ... are skipped
        }
        // chunks are word-aligned
        pos = body + size + (size & 1);
    }

    let fmt = fmt.ok_or(WavError::MissingChunk("fmt "))?;
    if fmt.encoding != 1 {
        return Err(WavError::UnsupportedEncoding(fmt.encoding));
    }
    if fmt.bits != 16 {
        return Err(WavError::UnsupportedBitDepth(fmt.bits));
    }
    if fmt.sample_rate != SAMPLE_RATE as u32 {
        return Err(WavError::UnsupportedSampleRate(fmt.sample_rate));
    }
    if fmt.channels == 0 || fmt.channels > 2 {
        return Err(WavError::UnsupportedChannels(fmt.channels));
    }
    let data = data.ok_or(WavError::MissingChunk("data"))?;

    let channels = fmt.channels as usize;
    let frame_bytes = 2 * channels;
    let frames = (data.len() / frame_bytes).min(SAMPLE_RATE);
    let mut samples = Vec::with_capacity(SAMPLE_RATE);
    for frame in 0..frames {
        let mut acc = 0.0;
        for ch in 0..channels {
            let at = frame * frame_bytes + 2 * ch;
            let v = i16::from_le_bytes([data[at], data[at + 1]]);
            acc += v as f64 / 32768.0;
        }
        samples.push(acc / channels as f64);
    }
    Ok(TimeSignal::from_padded(samples)?)
}

/// Write a one-second mono PCM16 WAV file.
pub fn save_wav(path: &Path, t: &TimeSignal) -> Result<(), WavError> {
    fs::write(path, wav_bytes(t)).map_err(|e| WavError::Io(e.to_string()))
}

pub fn wav_bytes(t: &TimeSignal) -> Vec<u8> {
    let data_len = (SAMPLE_RATE * 2) as u32;
    let mut out = Vec::with_capacity(44 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&(SAMPLE_RATE as u32).to_le_bytes());
    out.extend_from_slice(&(SAMPLE_RATE as u32 * 2).to_le_bytes()); // byte rate
    out.extend_from_slice(&2u16.to_le_bytes()); // block align
    out.extend_from_slice(&16u16.to_le_bytes()); // bits
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for s in t.samples() {
        let v = (s * 32767.0).round().clamp(-32768.0, 32767.0) as i16;
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Hand-rolled WAV bytes with arbitrary header fields.
    fn wav_with(encoding: u16, channels: u16, rate: u32, bits: u16, frames: &[i16]) -> Vec<u8> {
        let data_len = (frames.len() * 2) as u32;
        let mut out = Vec::new();
        out.extend_from_slice(b"RIFF");
        out.extend_from_slice(&(36 + data_len).to_le_bytes());
        out.extend_from_slice(b"WAVE");
        out.extend_from_slice(b"fmt ");
        out.extend_from_slice(&16u32.to_le_bytes());
        out.extend_from_slice(&encoding.to_le_bytes());
        out.extend_from_slice(&channels.to_le_bytes());
        out.extend_from_slice(&rate.to_le_bytes());
        out.extend_from_slice(&(rate * channels as u32 * 2).to_le_bytes());
        out.extend_from_slice(&(channels * 2).to_le_bytes());
        out.extend_from_slice(&bits.to_le_bytes());
        out.extend_from_slice(b"data");
        out.extend_from_slice(&data_len.to_le_bytes());
        for v in frames {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    #[test]
    fn silence_round_trips_to_zero_signal() {
        let bytes = wav_with(1, 1, 44100, 16, &vec![0i16; SAMPLE_RATE]);
        let t = parse_wav(&bytes).unwrap();
        assert!(t.samples().iter().all(|s| *s == 0.0));
    }

    #[test]
    fn short_files_are_zero_padded() {
        let bytes = wav_with(1, 1, 44100, 16, &vec![1000i16; 22050]);
        let t = parse_wav(&bytes).unwrap();
        assert!((t.samples()[0] - 1000.0 / 32768.0).abs() < 1e-12);
        assert!(t.samples()[22050..].iter().all(|s| *s == 0.0));
    }

    #[test]
    fn long_files_are_truncated() {
        let bytes = wav_with(1, 1, 44100, 16, &vec![-100i16; SAMPLE_RATE + 5000]);
        let t = parse_wav(&bytes).unwrap();
        assert_eq!(t.samples().len(), SAMPLE_RATE);
    }

    #[test]
    fn stereo_channels_are_averaged() {
        let mut frames = Vec::new();
        for _ in 0..100 {
            frames.push(16384i16); // left
            frames.push(-16384i16); // right
        }
        let bytes = wav_with(1, 2, 44100, 16, &frames);
        let t = parse_wav(&bytes).unwrap();
        assert_eq!(t.samples()[0], 0.0);
    }

    #[test]
    fn error_kinds_are_distinct() {
        assert_eq!(parse_wav(b"JUNKJUNKJUNK").unwrap_err(), WavError::NotRiff);
        let mut bytes = wav_with(1, 1, 44100, 16, &[0i16; 4]);
        bytes[8..12].copy_from_slice(b"AVI ");
        assert_eq!(parse_wav(&bytes).unwrap_err(), WavError::NotWave);
        assert_eq!(
            parse_wav(&wav_with(3, 1, 44100, 16, &[0i16; 4])).unwrap_err(),
            WavError::UnsupportedEncoding(3)
        );
        assert_eq!(
            parse_wav(&wav_with(1, 1, 48000, 16, &[0i16; 4])).unwrap_err(),
            WavError::UnsupportedSampleRate(48000)
        );
        assert_eq!(
            parse_wav(&wav_with(1, 1, 44100, 8, &[0i16; 4])).unwrap_err(),
            WavError::UnsupportedBitDepth(8)
        );
        assert_eq!(
            parse_wav(&wav_with(1, 6, 44100, 16, &[0i16; 4])).unwrap_err(),
            WavError::UnsupportedChannels(6)
        );
        // data chunk promising more bytes than the file holds
        let mut bytes = wav_with(1, 1, 44100, 16, &[0i16; 4]);
        let at = bytes.len() - 12;
        bytes[at..at + 4].copy_from_slice(&1000u32.to_le_bytes());
        assert!(matches!(
            parse_wav(&bytes).unwrap_err(),
            WavError::Truncated(_)
        ));
    }

    #[test]
    fn write_then_read_recovers_samples_to_quantization() {
        let samples: Vec<f64> = (0..SAMPLE_RATE)
            .map(|i| 0.5 * (std::f64::consts::TAU * 440.0 * i as f64 / SAMPLE_RATE as f64).sin())
            .collect();
        let t = TimeSignal::new(samples.clone()).unwrap();
        let back = parse_wav(&wav_bytes(&t)).unwrap();
        for (a, b) in back.samples().iter().zip(&samples) {
            assert!((a - b).abs() <= 1.0 / 32768.0);
        }
    }
}
