use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// The seven emotion labels, in canonical order. The order doubles as the
/// deterministic tie-break everywhere a vote is split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Emotion {
    #[serde(rename = "ANG")]
    Anger,
    #[serde(rename = "DIS")]
    Disgust,
    #[serde(rename = "FEA")]
    Fear,
    #[serde(rename = "HAP")]
    Happiness,
    #[serde(rename = "NEU")]
    Neutral,
    #[serde(rename = "PS")]
    PleasantSurprise,
    #[serde(rename = "SAD")]
    Sadness,
}

impl Emotion {
    pub const COUNT: usize = 7;
    pub const ALL: [Emotion; 7] = [
        Emotion::Anger,
        Emotion::Disgust,
        Emotion::Fear,
        Emotion::Happiness,
        Emotion::Neutral,
        Emotion::PleasantSurprise,
        Emotion::Sadness,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Emotion> {
        Self::ALL.get(i).copied()
    }

    pub fn code(self) -> &'static str {
        match self {
            Emotion::Anger => "ANG",
            Emotion::Disgust => "DIS",
            Emotion::Fear => "FEA",
            Emotion::Happiness => "HAP",
            Emotion::Neutral => "NEU",
            Emotion::PleasantSurprise => "PS",
            Emotion::Sadness => "SAD",
        }
    }

    /// CREMA-D filename emotion codes (no pleasant surprise there).
    pub fn from_crema_code(code: &str) -> Option<Emotion> {
        match code {
            "ANG" => Some(Emotion::Anger),
            "DIS" => Some(Emotion::Disgust),
            "FEA" => Some(Emotion::Fear),
            "HAP" => Some(Emotion::Happiness),
            "NEU" => Some(Emotion::Neutral),
            "SAD" => Some(Emotion::Sadness),
            _ => None,
        }
    }

    /// TESS filename emotion words, case-insensitive.
    pub fn from_tess_word(word: &str) -> Option<Emotion> {
        match word.to_ascii_lowercase().as_str() {
            "angry" => Some(Emotion::Anger),
            "disgust" => Some(Emotion::Disgust),
            "fear" => Some(Emotion::Fear),
            "happy" => Some(Emotion::Happiness),
            "neutral" => Some(Emotion::Neutral),
            "ps" | "pleasant_surprise" | "pleasant_surprised" => Some(Emotion::PleasantSurprise),
            "sad" => Some(Emotion::Sadness),
            _ => None,
        }
    }

    /// Label of the highest score; ties go to the earliest label.
    pub fn argmax(scores: &[f64; 7]) -> Emotion {
        let mut best = 0;
        for i in 1..7 {
            if scores[i] > scores[best] {
                best = i;
            }
        }
        Emotion::ALL[best]
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Emotion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("PS") {
            return Ok(Emotion::PleasantSurprise);
        }
        Emotion::from_crema_code(&s.to_ascii_uppercase())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown emotion label `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_and_codes() {
        let codes: Vec<_> = Emotion::ALL.iter().map(|e| e.code()).collect();
        assert_eq!(codes, ["ANG", "DIS", "FEA", "HAP", "NEU", "PS", "SAD"]);
        for (i, e) in Emotion::ALL.iter().enumerate() {
            assert_eq!(e.index(), i);
            assert_eq!(e.code().parse::<Emotion>().unwrap(), *e);
        }
        assert!(Emotion::Anger < Emotion::Sadness);
    }

    #[test]
    fn tess_words() {
        assert_eq!(Emotion::from_tess_word("Pleasant_Surprised"), Some(Emotion::PleasantSurprise));
        assert_eq!(Emotion::from_tess_word("ANGRY"), Some(Emotion::Anger));
        assert_eq!(Emotion::from_tess_word("calm"), None);
    }

    #[test]
    fn argmax_ties_go_first() {
        assert_eq!(Emotion::argmax(&[0.0, 2.0, 2.0, 0.0, 0.0, 0.0, 0.0]), Emotion::Disgust);
        assert_eq!(Emotion::argmax(&[0.0; 7]), Emotion::Anger);
    }
}
