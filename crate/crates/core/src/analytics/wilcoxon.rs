//! Two-sided Wilcoxon signed-rank test for paired samples.
//!
//! Differences are `after - before`. Zero differences are dropped, tied
//! absolute differences get mid-ranks. Up to [`EXACT_LIMIT`] non-zero pairs the
//! p-value is exact (full sign-flip null distribution); above that a normal
//! approximation with tie-corrected variance and continuity correction is used.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

pub const EXACT_LIMIT: usize = 20;
const MAX_EXACT: usize = 62;

pub const CONVENTIONS: &str = "two-sided; d = after - before; zero differences dropped; \
mid-ranks for tied |d|; exact sign-flip distribution for n <= 20, otherwise normal \
approximation with tie-corrected variance and 0.5 continuity correction; all-zero input gives p = 1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedObservation {
    pub unit: String,
    pub before: f64,
    pub after: f64,
}

impl PairedObservation {
    pub fn new(unit: impl Into<String>, before: f64, after: f64) -> Self {
        PairedObservation {
            unit: unit.into(),
            before,
            after,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Exact,
    NormalApproximation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    pub n_pairs: usize,
    /// Pairs left after dropping zero differences.
    pub n_effective: usize,
    /// Sum of ranks of positive differences.
    pub w_plus: f64,
    /// Sum of ranks of negative differences.
    pub w_minus: f64,
    /// min(W+, W-).
    pub statistic: f64,
    pub p_value: f64,
    pub method: Method,
    pub ties: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub significant: Option<bool>,
    pub conventions: String,
}

/// A test request as read from a file or an HTTP body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonRequest {
    pub pairs: Vec<PairedObservation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
}

impl WilcoxonRequest {
    pub fn run(&self) -> Result<WilcoxonResult> {
        wilcoxon_signed_rank_with(&self.pairs, self.alpha, self.method)
    }
}

/// Ranked non-zero differences: sign and doubled mid-rank (always an integer).
pub(crate) struct SignedRanks {
    pub positive: Vec<bool>,
    pub doubled_ranks: Vec<u64>,
    pub tie_sizes: Vec<usize>,
}

pub(crate) fn signed_ranks(diffs: &[f64]) -> SignedRanks {
    let mut nz: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    nz.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let n = nz.len();
    let mut doubled_ranks = vec![0u64; n];
    let mut tie_sizes = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && nz[j + 1].abs() == nz[i].abs() {
            j += 1;
        }
        // positions i..=j (0-based) share the mid-rank ((i+1)+(j+1))/2
        let doubled = (i + 1 + j + 1) as u64;
        for r in &mut doubled_ranks[i..=j] {
            *r = doubled;
        }
        if j > i {
            tie_sizes.push(j - i + 1);
        }
        i = j + 1;
    }
    SignedRanks {
        positive: nz.iter().map(|d| *d > 0.0).collect(),
        doubled_ranks,
        tie_sizes,
    }
}

/// Exact two-sided p: share of the 2^n sign assignments whose W+ lies at
/// least as far from its mean as the observed one. Counts subset sums of
/// doubled ranks by dynamic programming.
fn exact_p(ranks: &SignedRanks) -> f64 {
    let n = ranks.doubled_ranks.len();
    let total: u64 = ranks.doubled_ranks.iter().sum();
    let observed: u64 = ranks
        .doubled_ranks
        .iter()
        .zip(&ranks.positive)
        .filter(|(_, p)| **p)
        .map(|(r, _)| *r)
        .sum();
    let mut counts = vec![0u64; total as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in &ranks.doubled_ranks {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] != 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let dev = |s: u64| (2 * s).abs_diff(total);
    let threshold = dev(observed);
    let extreme: u64 = counts
        .iter()
        .enumerate()
        .filter(|(s, _)| dev(*s as u64) >= threshold)
        .map(|(_, c)| *c)
        .sum();
    (extreme as f64 / 2f64.powi(n as i32)).min(1.0)
}

fn normal_p(ranks: &SignedRanks, w_plus: f64) -> f64 {
    let n = ranks.doubled_ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let tie_adj: f64 = ranks
        .tie_sizes
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum::<f64>()
        / 48.0;
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_adj;
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
    erfc(z / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

/// Runs the test, choosing the exact method for up to 20 non-zero pairs.
pub fn wilcoxon_signed_rank(pairs: &[PairedObservation], alpha: Option<f64>) -> Result<WilcoxonResult> {
    wilcoxon_signed_rank_with(pairs, alpha, None)
}

/// Same as [`wilcoxon_signed_rank`], optionally forcing the method.
pub fn wilcoxon_signed_rank_with(
    pairs: &[PairedObservation],
    alpha: Option<f64>,
    method: Option<Method>,
) -> Result<WilcoxonResult> {
    if pairs.is_empty() {
        return Err(Error::NoObservations);
    }
    if let Some(p) = pairs
        .iter()
        .find(|p| !p.before.is_finite() || !p.after.is_finite() || !(p.after - p.before).is_finite())
    {
        return Err(Error::NonFinite(p.unit.clone()));
    }
    let diffs: Vec<f64> = pairs.iter().map(|p| p.after - p.before).collect();
    let ranks = signed_ranks(&diffs);
    let n = ranks.doubled_ranks.len();

    let (mut w_plus, mut w_minus) = (0.0, 0.0);
    for (r, pos) in ranks.doubled_ranks.iter().zip(&ranks.positive) {
        let rank = *r as f64 / 2.0;
        if *pos {
            w_plus += rank;
        } else {
            w_minus += rank;
        }
    }

    let method = method.unwrap_or(if n <= EXACT_LIMIT {
        Method::Exact
    } else {
        Method::NormalApproximation
    });
    let (p_value, method) = if n == 0 {
        (1.0, Method::Exact)
    } else {
        match method {
            // counts of sign patterns must fit in a u64
            Method::Exact if n <= MAX_EXACT => (exact_p(&ranks), Method::Exact),
            _ => (normal_p(&ranks, w_plus), Method::NormalApproximation),
        }
    };

    Ok(WilcoxonResult {
        n_pairs: pairs.len(),
        n_effective: n,
        w_plus,
        w_minus,
        statistic: w_plus.min(w_minus),
        p_value,
        method,
        ties: !ranks.tie_sizes.is_empty(),
        alpha,
        significant: alpha.map(|a| p_value <= a),
        conventions: CONVENTIONS.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(diffs: &[f64]) -> Vec<PairedObservation> {
        diffs
            .iter()
            .enumerate()
            .map(|(i, d)| PairedObservation::new(format!("u{i}"), 10.0, 10.0 + d))
            .collect()
    }

    #[test]
    fn test_all_zero_convention() {
        let r = wilcoxon_signed_rank(&pairs(&[0.0, 0.0, 0.0]), Some(0.05)).unwrap();
        assert_eq!(r.n_effective, 0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.method, Method::Exact);
        assert_eq!(r.significant, Some(false));
    }

    #[test]
    fn test_midranks() {
        let r = signed_ranks(&[1.0, -2.0, 2.0, 0.0, 3.0]);
        assert_eq!(r.doubled_ranks, vec![2, 5, 5, 8]);
        assert_eq!(r.tie_sizes, vec![2]);
    }

    #[test]
    fn test_small_known_values() {
        // one positive difference: both sign patterns are equally extreme
        let r = wilcoxon_signed_rank(&pairs(&[1.5]), None).unwrap();
        assert_eq!(r.p_value, 1.0);
        // five positive distinct differences: only ++++ and ---- are as extreme
        let r = wilcoxon_signed_rank(&pairs(&[1.0, 2.0, 3.0, 4.0, 5.0]), None).unwrap();
        assert_eq!(r.w_plus, 15.0);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 2.0 / 32.0);
    }

    #[test]
    fn test_errors() {
        assert!(matches!(wilcoxon_signed_rank(&[], None), Err(Error::NoObservations)));
        let bad = vec![PairedObservation::new("x", f64::NAN, 1.0)];
        assert!(matches!(wilcoxon_signed_rank(&bad, None), Err(Error::NonFinite(_))));
    }

    #[test]
    fn test_method_switch() {
        let d: Vec<f64> = (1..=21).map(f64::from).collect();
        let r = wilcoxon_signed_rank(&pairs(&d[..20]), None).unwrap();
        assert_eq!(r.method, Method::Exact);
        let r = wilcoxon_signed_rank(&pairs(&d), None).unwrap();
        assert_eq!(r.method, Method::NormalApproximation);
    }
}
