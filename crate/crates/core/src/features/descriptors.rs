use super::cepstral::LOG_FLOOR;
use crate::signal_io::Spectrum;

/// Shape statistics of one magnitude spectrum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SpectralDescriptors {
    /// Hz.
    pub centroid: f64,
    /// Hz.
    pub spread: f64,
    /// Normalised Shannon entropy of the power distribution, in `[0, 1]`.
    pub entropy: f64,
    pub flux: f64,
    /// Hz.
    pub rolloff: f64,
    /// Geometric over arithmetic mean of power, in `[0, 1]`.
    pub flatness: f64,
    pub skewness: f64,
}

/// Computes the seven descriptors. Centroid, spread and skewness weight bins
/// by magnitude; entropy, rolloff and flatness use power. An all-zero
/// spectrum yields all zeros.
pub fn spectral_descriptors(
    spectrum: &Spectrum,
    prev: Option<&Spectrum>,
    rolloff_fraction: f64,
) -> SpectralDescriptors {
    let s = &spectrum.magnitudes;
    let f = &spectrum.bin_freqs;
    let mag_sum: f64 = s.iter().sum();
    let pow_sum: f64 = s.iter().map(|v| v * v).sum();

    let flux = prev.map_or(0.0, |p| {
        s.iter()
            .zip(&p.magnitudes)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    });

    if mag_sum <= 0.0 || pow_sum <= 0.0 {
        return SpectralDescriptors {
            flux,
            ..Default::default()
        };
    }

    let centroid = f.iter().zip(s).map(|(fk, sk)| fk * sk).sum::<f64>() / mag_sum;
    let var = f
        .iter()
        .zip(s)
        .map(|(fk, sk)| (fk - centroid).powi(2) * sk)
        .sum::<f64>()
        / mag_sum;
    let spread = var.sqrt();
    let skewness = if spread > 0.0 {
        f.iter()
            .zip(s)
            .map(|(fk, sk)| (fk - centroid).powi(3) * sk)
            .sum::<f64>()
            / (spread.powi(3) * mag_sum)
    } else {
        0.0
    };

    let entropy = if s.len() > 1 {
        -s.iter()
            .map(|v| v * v / pow_sum)
            .filter(|&p| p > 0.0)
            .map(|p| p * p.ln())
            .sum::<f64>()
            / (s.len() as f64).ln()
    } else {
        0.0
    };

    let target = rolloff_fraction * pow_sum;
    let mut cum = 0.0;
    let mut rolloff = *f.last().unwrap_or(&0.0);
    for (fk, sk) in f.iter().zip(s) {
        cum += sk * sk;
        if cum >= target {
            rolloff = *fk;
            break;
        }
    }

    let n = s.len() as f64;
    let log_mean = s.iter().map(|v| (v * v + LOG_FLOOR).ln()).sum::<f64>() / n;
    let flatness = (log_mean.exp() / (pow_sum / n)).min(1.0);

    SpectralDescriptors {
        centroid,
        spread,
        entropy,
        flux,
        rolloff,
        flatness,
        skewness,
    }
}
