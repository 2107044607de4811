use serde::{Deserialize, Serialize};

use super::stats::TextStats;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ReadabilityScores {
    pub ari: f64,
    pub coleman_liau: f64,
    pub dale_chall: f64,
    pub flesch_kincaid: f64,
    pub flesch_reading: f64,
    pub gunning_fog: f64,
    pub linsear: f64,
    pub lix: f64,
}

impl ReadabilityScores {
    pub const METRICS: [&'static str; 8] = [
        "ari",
        "coleman_liau",
        "dale_chall",
        "flesch_kincaid",
        "flesch_reading",
        "gunning_fog",
        "linsear",
        "lix",
    ];

    pub fn values(&self) -> [f64; 8] {
        [
            self.ari,
            self.coleman_liau,
            self.dale_chall,
            self.flesch_kincaid,
            self.flesch_reading,
            self.gunning_fog,
            self.linsear,
            self.lix,
        ]
    }

    pub fn from_values(v: [f64; 8]) -> Self {
        ReadabilityScores {
            ari: v[0],
            coleman_liau: v[1],
            dale_chall: v[2],
            flesch_kincaid: v[3],
            flesch_reading: v[4],
            gunning_fog: v[5],
            linsear: v[6],
            lix: v[7],
        }
    }
}

/// Evaluates the eight formulas. Linsear Write uses the whole text rather than
/// a 100-word sample.
pub fn compute_readability(s: &TextStats) -> Result<ReadabilityScores> {
    if s.words == 0 {
        return Err(Error::UndefinedScore("no words"));
    }
    if s.sentences == 0 {
        return Err(Error::UndefinedScore("no sentences"));
    }
    let words = s.words as f64;
    let sentences = s.sentences as f64;
    let wps = words / sentences;
    let spw = s.syllables as f64 / words;

    let ari = 4.71 * (s.characters as f64 / words) + 0.5 * wps - 21.43;

    let l = 100.0 * s.letters as f64 / words;
    let sp = 100.0 * sentences / words;
    let coleman_liau = 0.0588 * l - 0.296 * sp - 15.8;

    let difficult_pct = 100.0 * s.difficult_words as f64 / words;
    let mut dale_chall = 0.1579 * difficult_pct + 0.0496 * wps;
    if difficult_pct > 5.0 {
        dale_chall += 3.6365;
    }

    let flesch_reading = 206.835 - 1.015 * wps - 84.6 * spw;
    let flesch_kincaid = 0.39 * wps + 11.8 * spw - 15.59;
    let gunning_fog = 0.4 * (wps + 100.0 * s.complex_words as f64 / words);

    let r = (s.easy_words as f64 + 3.0 * s.complex_words as f64) / sentences;
    let linsear = if r > 20.0 { r / 2.0 } else { (r - 2.0) / 2.0 };

    let lix = wps + 100.0 * s.long_words as f64 / words;

    Ok(ReadabilityScores {
        ari,
        coleman_liau,
        dale_chall,
        flesch_kincaid,
        flesch_reading,
        gunning_fog,
        linsear,
        lix,
    })
}
