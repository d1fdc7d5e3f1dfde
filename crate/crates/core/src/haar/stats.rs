//! Goodness-of-fit primitives.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Survival function of the Kolmogorov distribution, `P(K > λ)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample Kolmogorov–Smirnov test. Returns `(D, p-value)`; `samples` is sorted in place.
pub fn ks_test(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let d = samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    let sn = n.sqrt();
    // Stephens' small-sample correction
    let p = kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
    (d, p)
}

/// Pearson statistic `Σ (o − e)² / e` over bins with `e > 0`.
pub fn pearson(observed: &[f64], expected: &[f64]) -> f64 {
    observed
        .iter()
        .zip(expected)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&o, &e)| (o - e) * (o - e) / e)
        .sum()
}

/// Upper tail `P(χ²_dof > x)`.
pub fn chi2_survival(x: f64, dof: usize) -> f64 {
    match ChiSquared::new(dof as f64) {
        Ok(d) => 1.0 - d.cdf(x),
        Err(_) => f64::NAN,
    }
}

/// Deviation of a χ² statistic from its mean in units of its standard deviation.
pub fn chi2_sigma(x: f64, dof: usize) -> f64 {
    let k = dof as f64;
    (x - k) / (2.0 * k).sqrt()
}

/// Greedy merge of consecutive bins until every group expects at least `min_expected`.
/// The remainder joins the last group. Returns `(observed, expected, members)`.
pub fn merge_bins(observed: &[f64], expected: &[f64], min_expected: f64) -> (Vec<f64>, Vec<f64>, Vec<Vec<usize>>) {
    let mut obs = Vec::new();
    let mut exp = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    let (mut o_acc, mut e_acc, mut m_acc) = (0.0, 0.0, Vec::new());
    for (i, (&o, &e)) in observed.iter().zip(expected).enumerate() {
        o_acc += o;
        e_acc += e;
        m_acc.push(i);
        if e_acc >= min_expected {
            obs.push(o_acc);
            exp.push(e_acc);
            members.push(std::mem::take(&mut m_acc));
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    if !m_acc.is_empty() {
        if let (Some(lo), Some(le), Some(lm)) = (obs.last_mut(), exp.last_mut(), members.last_mut()) {
            *lo += o_acc;
            *le += e_acc;
            lm.extend(m_acc);
        } else {
            obs.push(o_acc);
            exp.push(e_acc);
            members.push(m_acc);
        }
    }
    (obs, exp, members)
}
