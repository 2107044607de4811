//! Kruskal-Wallis H test with mid-ranks and tie correction, judged against
//! chi-squared critical values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Significance {
    #[serde(rename = "none")]
    None,
    #[serde(rename = "0.05")]
    P05,
    #[serde(rename = "0.01")]
    P01,
    #[serde(rename = "0.001")]
    P001,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KruskalResult {
    /// Tie-corrected statistic.
    #[serde(rename = "H")]
    pub h: f64,
    pub df: usize,
    pub significant_at: Significance,
}

// Upper-tail chi-squared quantiles at 0.05, 0.01, 0.001.
const CHI2_TABLE: [[f64; 3]; 10] = [
    [3.841, 6.635, 10.828],
    [5.991, 9.210, 13.816],
    [7.815, 11.345, 16.266],
    [9.488, 13.277, 18.467],
    [11.070, 15.086, 20.515],
    [12.592, 16.812, 22.458],
    [14.067, 18.475, 24.322],
    [15.507, 20.090, 26.124],
    [16.919, 21.666, 27.877],
    [18.307, 23.209, 29.588],
];

/// Critical values at 0.05 / 0.01 / 0.001. Exact table up to 10 degrees of
/// freedom, Wilson-Hilferty approximation beyond.
pub fn chi2_critical(df: usize) -> [f64; 3] {
    assert!(df >= 1, "df must be positive");
    if df <= CHI2_TABLE.len() {
        return CHI2_TABLE[df - 1];
    }
    let k = df as f64;
    let z = [1.644_853_6, 2.326_347_9, 3.090_232_3];
    z.map(|z| {
        let a = 2.0 / (9.0 * k);
        k * (1.0 - a + z * a.sqrt()).powi(3)
    })
}

pub fn significance(h: f64, df: usize) -> Significance {
    let [c05, c01, c001] = chi2_critical(df);
    if h > c001 {
        Significance::P001
    } else if h > c01 {
        Significance::P01
    } else if h > c05 {
        Significance::P05
    } else {
        Significance::None
    }
}

/// Mid-ranks (1-based) of `values`, plus the tie term Σ(t³ − t).
fn mid_ranks(values: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        let t = (j - i) as f64;
        ties += t * t * t - t;
        i = j;
    }
    (ranks, ties)
}

pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<KruskalResult> {
    if groups.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "Kruskal-Wallis needs at least 2 groups, got {}",
            groups.len()
        )));
    }
    if groups.iter().any(Vec::is_empty) {
        return Err(Error::InvalidInput("empty group".into()));
    }
    if groups.iter().flatten().any(|v| v.is_nan()) {
        return Err(Error::InvalidInput("NaN in Kruskal-Wallis input".into()));
    }
    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    let n = all.len() as f64;
    let (ranks, ties) = mid_ranks(&all);
    let df = groups.len() - 1;

    let correction = 1.0 - ties / (n * n * n - n);
    if correction <= 0.0 {
        return Ok(KruskalResult {
            h: 0.0,
            df,
            significant_at: Significance::None,
        });
    }

    let mut offset = 0;
    let mut sum = 0.0;
    for g in groups {
        let r: f64 = ranks[offset..offset + g.len()].iter().sum();
        sum += r * r / g.len() as f64;
        offset += g.len();
    }
    let h = (12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0)) / correction;
    let h = h.max(0.0);
    Ok(KruskalResult {
        h,
        df,
        significant_at: significance(h, df),
    })
}
