//! Minimal RIFF/WAVE reader and writer.
//!
//! Reads PCM 16-bit (`fmt ` tag 1) and IEEE float 32-bit (tag 3), including
//! the WAVE_FORMAT_EXTENSIBLE wrapper around either. Unknown chunks are
//! skipped. Stereo is folded to mono by channel mean.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::AudioBuffer;
use crate::{Error, Result};

const FORMAT_PCM: u16 = 1;
const FORMAT_FLOAT: u16 = 3;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

/// Sample encoding used by [`write_wav`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavEncoding {
    Pcm16,
    Float32,
}

#[derive(Debug)]
struct FmtChunk {
    format_tag: u16,
    channels: u16,
    sample_rate: u32,
    bits_per_sample: u16,
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

pub fn load_wav(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let malformed = |reason: &str| Error::MalformedWav {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };

    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(malformed("missing RIFF/WAVE signature"));
    }

    let mut fmt: Option<FmtChunk> = None;
    let mut data: Option<&[u8]> = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_at(&bytes, pos + 4) as usize;
        let body_start = pos + 8;
        // Truncated data chunks are common in the wild; clip to what exists.
        let body_end = body_start.saturating_add(size).min(bytes.len());
        let body = &bytes[body_start..body_end];
        match id {
            b"fmt " => {
                if body.len() < 16 {
                    return Err(malformed("fmt chunk shorter than 16 bytes"));
                }
                let mut format_tag = u16_at(body, 0);
                if format_tag == FORMAT_EXTENSIBLE {
                    if body.len() < 26 {
                        return Err(malformed("extensible fmt chunk too short"));
                    }
                    format_tag = u16_at(body, 24);
                }
                fmt = Some(FmtChunk {
                    format_tag,
                    channels: u16_at(body, 2),
                    sample_rate: u32_at(body, 4),
                    bits_per_sample: u16_at(body, 14),
                });
            }
            b"data" => data = Some(body),
            _ => {}
        }
        pos = body_start.saturating_add(size + (size & 1));
    }

    let fmt = fmt.ok_or_else(|| malformed("no fmt chunk"))?;
    let data = data.ok_or_else(|| malformed("no data chunk"))?;
    if fmt.sample_rate == 0 {
        return Err(malformed("sample rate is zero"));
    }
    let supported = matches!(
        (fmt.format_tag, fmt.bits_per_sample),
        (FORMAT_PCM, 16) | (FORMAT_FLOAT, 32)
    ) && (fmt.channels == 1 || fmt.channels == 2);
    if !supported {
        return Err(Error::UnsupportedWav {
            path: path.to_path_buf(),
            format_tag: fmt.format_tag,
            bits_per_sample: fmt.bits_per_sample,
            channels: fmt.channels,
        });
    }

    let channels = fmt.channels as usize;
    let bytes_per_sample = (fmt.bits_per_sample / 8) as usize;
    let frame_bytes = channels * bytes_per_sample;
    let n_frames = data.len() / frame_bytes;
    let mut samples = Vec::with_capacity(n_frames);
    for f in 0..n_frames {
        let mut acc = 0.0;
        for c in 0..channels {
            let at = f * frame_bytes + c * bytes_per_sample;
            let v = if fmt.format_tag == FORMAT_PCM {
                i16::from_le_bytes([data[at], data[at + 1]]) as f64 / 32768.0
            } else {
                let v = f32::from_le_bytes([data[at], data[at + 1], data[at + 2], data[at + 3]]);
                if !v.is_finite() {
                    return Err(malformed("non-finite float sample"));
                }
                (v as f64).clamp(-1.0, 1.0)
            };
            acc += v;
        }
        samples.push(if channels == 1 { acc } else { acc / channels as f64 });
    }

    Ok(AudioBuffer {
        samples,
        sample_rate: fmt.sample_rate,
        source_path: path.display().to_string(),
    })
}

/// Writes mono audio. PCM16 quantises `round(x * 32768)` clamped to the i16
/// range, so values that are exact multiples of 1/32768 survive a round trip.
pub fn write_wav(
    path: impl AsRef<Path>,
    samples: &[f64],
    sample_rate: u32,
    encoding: WavEncoding,
) -> Result<()> {
    let path = path.as_ref();
    let (format_tag, bits): (u16, u16) = match encoding {
        WavEncoding::Pcm16 => (FORMAT_PCM, 16),
        WavEncoding::Float32 => (FORMAT_FLOAT, 32),
    };
    let block_align = bits / 8;
    let data_len = samples.len() as u32 * block_align as u32;

    let mut out = Vec::with_capacity(44 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&format_tag.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&sample_rate.to_le_bytes());
    out.extend_from_slice(&(sample_rate * block_align as u32).to_le_bytes());
    out.extend_from_slice(&block_align.to_le_bytes());
    out.extend_from_slice(&bits.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for &s in samples {
        match encoding {
            WavEncoding::Pcm16 => {
                let q = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
                out.extend_from_slice(&q.to_le_bytes());
            }
            WavEncoding::Float32 => out.extend_from_slice(&(s as f32).to_le_bytes()),
        }
    }

    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&out).map_err(|e| Error::io(path, e))
}
