use std::f64::consts::PI;

use super::AudioBuffer;

/// Windowed, overlapping analysis frames, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSequence {
    pub frames: Vec<Vec<f64>>,
    pub frame_len: usize,
    pub hop: usize,
    pub sample_rate: u32,
}

impl FrameSequence {
    pub fn num_frames(&self) -> usize {
        self.frames.len()
    }
}

/// Periodic Hamming window `0.54 - 0.46 cos(2 pi n / len)`.
pub fn hamming_periodic(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| 0.54 - 0.46 * (2.0 * PI * n as f64 / len as f64).cos())
        .collect()
}

fn frame_count(signal_len: usize, frame_len: usize, hop: usize) -> usize {
    if signal_len < frame_len {
        0
    } else {
        (signal_len - frame_len) / hop + 1
    }
}

/// Unwindowed frames; the trailing partial frame is dropped.
pub fn frame_signal_raw(samples: &[f64], frame_len: usize, hop: usize) -> Vec<Vec<f64>> {
    assert!(frame_len >= 2, "frame_len must be at least 2");
    assert!(hop > 0 && hop <= frame_len, "hop must be in 1..=frame_len");
    (0..frame_count(samples.len(), frame_len, hop))
        .map(|i| samples[i * hop..i * hop + frame_len].to_vec())
        .collect()
}

/// Frames `buffer` and applies a periodic Hamming window to each frame.
///
/// # Panics
/// If `frame_len < 2` or `hop` is outside `1..=frame_len`.
pub fn frame_signal(buffer: &AudioBuffer, frame_len: usize, hop: usize) -> FrameSequence {
    let window = hamming_periodic(frame_len);
    let frames = frame_signal_raw(&buffer.samples, frame_len, hop)
        .into_iter()
        .map(|mut f| {
            f.iter_mut().zip(&window).for_each(|(s, w)| *s *= w);
            f
        })
        .collect();
    FrameSequence {
        frames,
        frame_len,
        hop,
        sample_rate: buffer.sample_rate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_second_frame_count() {
        let buf = AudioBuffer::new(vec![0.1; 16000], 16000);
        assert_eq!(frame_signal(&buf, 400, 160).num_frames(), 98);
    }

    #[test]
    fn constant_signal_frames_are_the_window() {
        let buf = AudioBuffer::new(vec![1.0; 1000], 16000);
        let fs = frame_signal(&buf, 400, 160);
        let w = hamming_periodic(400);
        for f in &fs.frames {
            assert_eq!(f, &w);
        }
    }

    #[test]
    fn tiling_covers_signal() {
        let samples: Vec<f64> = (0..800).map(|i| i as f64).collect();
        let raw = frame_signal_raw(&samples, 400, 400);
        assert_eq!(raw.len(), 2);
        assert_eq!(raw.concat(), samples);
    }

    #[test]
    fn short_signal_gives_no_frames() {
        let buf = AudioBuffer::new(vec![0.0; 399], 16000);
        assert_eq!(frame_signal(&buf, 400, 160).num_frames(), 0);
    }

    proptest! {
        #[test]
        fn count_formula(len in 0usize..5000, frame_len in 2usize..600, hop_frac in 0.0f64..1.0) {
            let hop = 1 + ((frame_len - 1) as f64 * hop_frac) as usize;
            let raw = frame_signal_raw(&vec![0.0; len], frame_len, hop);
            let expected = if len >= frame_len { (len - frame_len) / hop + 1 } else { 0 };
            prop_assert_eq!(raw.len(), expected);
            prop_assert!(raw.iter().all(|f| f.len() == frame_len));
        }
    }
}
