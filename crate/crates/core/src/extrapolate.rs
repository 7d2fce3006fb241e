//! Sequence acceleration for per-level diagnostics.

/// Aitken Δ² limit of the last three terms. Returns the last term when the
/// second difference vanishes (the sequence is already arithmetic or flat)
/// and `None` for fewer than three terms.
pub fn aitken(seq: &[f64]) -> Option<f64> {
    if seq.len() < 3 {
        return None;
    }
    let k = seq.len();
    let (a, b, c) = (seq[k - 3], seq[k - 2], seq[k - 1]);
    let d1 = b - a;
    let d2 = c - b;
    let dd = d2 - d1;
    if dd.abs() <= 1e-15 * (a.abs() + b.abs() + c.abs()) || !dd.is_finite() {
        return Some(c);
    }
    Some(c - d2 * d2 / dd)
}

/// Geometric ratio of successive increments, `(Δ_last / Δ_first)^(1/(k-1))`
/// over the `k` increments of `seq`. `None` when an increment is zero or the
/// increments change sign.
pub fn increment_ratio(seq: &[f64]) -> Option<f64> {
    if seq.len() < 3 {
        return None;
    }
    let inc: Vec<f64> = seq.windows(2).map(|w| w[1] - w[0]).collect();
    let first = inc[0];
    let last = inc[inc.len() - 1];
    if first == 0.0 || last == 0.0 || inc.iter().any(|&d| d.signum() != first.signum()) {
        return None;
    }
    Some((last / first).powf(1.0 / (inc.len() - 1) as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aitken_is_exact_on_geometric_tails() {
        let seq: Vec<f64> = (0..5).map(|n| 2.0 + 0.5f64.powi(n)).collect();
        assert!((aitken(&seq).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(aitken(&[1.0, 2.0]), None);
        assert_eq!(aitken(&[1.0, 2.0, 3.0]), Some(3.0));
    }

    #[test]
    fn increment_ratio_of_geometric_sequence() {
        let seq = [1.0, 0.9, 0.89, 0.889];
        assert!((increment_ratio(&seq).unwrap() - 0.1).abs() < 1e-12);
        assert_eq!(increment_ratio(&[1.0, 1.0, 0.5]), None);
    }
}
