//! Statistical harnesses comparing Haar-sampled spectral forms with the closed-form densities.

use super::report::{GofReport, HistogramRow};
use super::stats::{chi2_sigma, chi2_survival, kolmogorov_survival, ks_test, merge_bins, pearson};
use super::{normalizer, HaarError, Result};
use crate::coset::{
    solve_minor_quadratic, spectral_form, CosetError, CosetTuple, MinorRoots, PartialForm, BORDERLINE_TOL,
};
use crate::linalg::{det4, sym_eigenvalues_desc};
use crate::parallel::{map_chunks, McConfig};
use crate::su2::{eigen_angle_cdf, UnitQuaternion};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const MIN_SAMPLES: usize = 10_000;

/// Minimum expected count per merged histogram bin.
const MIN_EXPECTED: f64 = 20.0;

/// Half-width of the default interior cube around `ζ = 0` for the n = 4 check.
/// Every corner keeps the smallest eigenvalue at `1 − 3·0.32 = 0.04`.
pub const DEFAULT_BOX_HALF_WIDTH: f64 = 0.32;

/// KS scaled-statistic cutoff at level 0.001.
const KS_LAMBDA_001: f64 = 1.9495;

/// Draws `(s₁₂, s₁₃, s₂₃)`.
pub type N3Sampler = fn(&mut ChaCha8Rng) -> [f64; 3];

pub fn haar_n3_sampler(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let g1 = UnitQuaternion::haar_sample(rng);
    let g2 = UnitQuaternion::haar_sample(rng);
    let g3 = UnitQuaternion::haar_sample(rng);
    [g1.inner(g2), g1.inner(g3), g2.inner(g3)]
}

fn det3_unit(x: f64, y: f64, z: f64) -> f64 {
    1.0 + 2.0 * x * y * z - x * x - y * y - z * z
}

/// Rejection sampler for density `∝ det^{1/2}` on the 3×3 PSD body (a negative control).
pub fn det_sqrt_sampler(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let x = rng.random_range(-1.0..1.0);
        let y = rng.random_range(-1.0..1.0);
        let z = rng.random_range(-1.0..1.0);
        let d = det3_unit(x, y, z);
        if d >= 0.0 && rng.random::<f64>() < d.sqrt() {
            return [x, y, z];
        }
    }
}

/// Volume of the PSD body inside each cell of a `b³` grid over `[-1, 1]³`, cells
/// indexed `ix·b² + iy·b + iz`. For fixed `(x, y)` the admissible `z` form the interval
/// `xy ± √((1−x²)(1−y²))`, so only `(x, y)` is discretized, at `sub²` midpoints per cell.
pub fn n3_cell_volumes(b: usize, sub: usize) -> Vec<f64> {
    let w = 2.0 / b as f64;
    let h = w / sub as f64;
    let mut vol = vec![0.0; b * b * b];
    for ix in 0..b {
        for iy in 0..b {
            for sx in 0..sub {
                let x = -1.0 + ix as f64 * w + (sx as f64 + 0.5) * h;
                for sy in 0..sub {
                    let y = -1.0 + iy as f64 * w + (sy as f64 + 0.5) * h;
                    let r = ((1.0 - x * x) * (1.0 - y * y)).sqrt();
                    let (zlo, zhi) = (x * y - r, x * y + r);
                    for iz in 0..b {
                        let z0 = -1.0 + iz as f64 * w;
                        let len = (zhi.min(z0 + w) - zlo.max(z0)).max(0.0);
                        vol[(ix * b + iy) * b + iz] += len * h * h;
                    }
                }
            }
        }
    }
    vol
}

fn cell_of(s: f64, b: usize) -> usize {
    (((s + 1.0) / 2.0 * b as f64).floor() as isize).clamp(0, b as isize - 1) as usize
}

pub fn verify_uniform_n3(sample_count: usize, bins_per_axis: usize, cfg: &McConfig) -> Result<GofReport> {
    verify_uniform_n3_with(haar_n3_sampler, sample_count, bins_per_axis, cfg)
}

/// χ² test of a sampler's `(s₁₂, s₁₃, s₂₃)` histogram against the uniform law on the
/// PSD body. Passes when the statistic is within 3σ of its mean.
pub fn verify_uniform_n3_with(
    sampler: N3Sampler,
    sample_count: usize,
    bins_per_axis: usize,
    cfg: &McConfig,
) -> Result<GofReport> {
    if sample_count < MIN_SAMPLES {
        return Err(HaarError::InsufficientSamples {
            got: sample_count,
            min: MIN_SAMPLES,
        });
    }
    let b = bins_per_axis.max(1);
    let cells = b * b * b;
    let partial = map_chunks(sample_count, cfg, |count, rng| {
        let mut h = vec![0u64; cells];
        for _ in 0..count {
            let [x, y, z] = sampler(rng);
            h[(cell_of(x, b) * b + cell_of(y, b)) * b + cell_of(z, b)] += 1;
        }
        h
    });
    let mut observed = vec![0.0; cells];
    for h in partial {
        for (o, c) in observed.iter_mut().zip(h) {
            *o += c as f64;
        }
    }
    let vol = n3_cell_volumes(b, 64);
    let total: f64 = vol.iter().sum();
    let expected: Vec<f64> = vol.iter().map(|v| sample_count as f64 * v / total).collect();
    let (obs, exp, _) = merge_bins(&observed, &expected, MIN_EXPECTED);
    let dof = obs.len().saturating_sub(1).max(1);
    let chi2 = pearson(&obs, &exp);
    let sigma = chi2_sigma(chi2, dof);

    let mut r = GofReport::new(
        "haar-n3",
        "chi2",
        sample_count,
        format!(
            "{b}^3 grid on [-1,1]^3, {} bins after merging to expected >= {MIN_EXPECTED}",
            obs.len()
        ),
    );
    r.statistic = chi2;
    r.p_value = Some(chi2_survival(chi2, dof));
    r.sigma_deviation = Some(sigma);
    r.check("chi2_sigma", sigma, 3.0);
    r.histogram = obs
        .iter()
        .zip(&exp)
        .enumerate()
        .map(|(bin_id, (&observed, &expected))| HistogramRow {
            bin_id,
            expected,
            observed,
        })
        .collect();
    Ok(r)
}

/// Axis-aligned box in `(s₁₂, s₁₃, s₁₄, s₂₃, s₂₄, s₃₄)`, half-open `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box6 {
    pub lo: [f64; 6],
    pub hi: [f64; 6],
}

fn gram4(s: &[f64; 6]) -> [[f64; 4]; 4] {
    [
        [1.0, s[0], s[1], s[2]],
        [s[0], 1.0, s[3], s[4]],
        [s[1], s[3], 1.0, s[5]],
        [s[2], s[4], s[5], 1.0],
    ]
}

impl Box6 {
    pub fn cube(center: [f64; 6], half_width: f64) -> Self {
        Self {
            lo: center.map(|c| c - half_width),
            hi: center.map(|c| c + half_width),
        }
    }

    pub fn default_interior() -> Self {
        Self::cube([0.0; 6], DEFAULT_BOX_HALF_WIDTH)
    }

    /// Three boxes away from the PSD boundary: the default cube and two slabs shifted
    /// along `s₁₂` and `s₃₄`. Each holds roughly 0.08% to 0.16% of the Haar mass.
    pub fn reference_set() -> [Self; 3] {
        let mut up = Self::cube([0.0; 6], 0.28);
        up.lo[0] = -0.1;
        up.hi[0] = 0.5;
        let mut down = Self::cube([0.0; 6], 0.28);
        down.lo[5] = -0.5;
        down.hi[5] = 0.1;
        [Self::default_interior(), up, down]
    }

    pub fn contains(&self, s: &[f64; 6]) -> bool {
        (0..6).all(|k| self.lo[k] <= s[k] && s[k] < self.hi[k])
    }

    pub fn volume(&self) -> f64 {
        (0..6).map(|k| self.hi[k] - self.lo[k]).product()
    }

    /// The box must stay a distance away from the PSD boundary. The PSD body is convex,
    /// so checking the 64 corners suffices.
    pub fn validate(&self) -> Result<()> {
        for k in 0..6 {
            let (lo, hi) = (self.lo[k], self.hi[k]);
            if !(lo.is_finite() && hi.is_finite() && lo < hi && lo >= -1.0 && hi <= 1.0) {
                return Err(HaarError::InvalidBox(format!(
                    "axis {k}: [{lo}, {hi}) is not a subinterval of [-1, 1]"
                )));
            }
        }
        for mask in 0..64u32 {
            let s: [f64; 6] = std::array::from_fn(|k| if mask >> k & 1 == 1 { self.hi[k] } else { self.lo[k] });
            let g = gram4(&s);
            let m = DMatrix::from_fn(4, 4, |i, j| g[i][j]);
            let min = sym_eigenvalues_desc(m)[3];
            if min <= BORDERLINE_TOL {
                return Err(HaarError::InvalidBox(format!(
                    "corner {mask} has smallest eigenvalue {min:e}, inside the excluded boundary shell"
                )));
            }
        }
        Ok(())
    }
}

/// Bounded test functions supported on a box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    Indicator(Box6),
    /// `∏ sin²(π (s − lo)/(hi − lo))`, continuous and vanishing on the box boundary.
    Bump(Box6),
}

impl TestFunction {
    pub fn support(&self) -> &Box6 {
        match self {
            TestFunction::Indicator(b) | TestFunction::Bump(b) => b,
        }
    }

    pub fn eval(&self, s: &[f64; 6]) -> f64 {
        let b = self.support();
        if !b.contains(s) {
            return 0.0;
        }
        match self {
            TestFunction::Indicator(_) => 1.0,
            TestFunction::Bump(b) => (0..6)
                .map(|k| (PI * (s[k] - b.lo[k]) / (b.hi[k] - b.lo[k])).sin().powi(2))
                .product(),
        }
    }

    fn label(&self) -> &'static str {
        match self {
            TestFunction::Indicator(_) => "indicator",
            TestFunction::Bump(_) => "bump",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub points_per_axis: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { points_per_axis: 12 }
    }
}

/// Tensor midpoint rule for `∫_box f·det^{-1/2}` (unnormalized).
fn quadrature(f: &TestFunction, q: QuadratureSpec, cfg: &McConfig) -> f64 {
    let b = *f.support();
    let k = q.points_per_axis.max(1);
    let node = |axis: usize, i: usize| b.lo[axis] + (i as f64 + 0.5) * (b.hi[axis] - b.lo[axis]) / k as f64;
    let slice = |i0: usize| {
        let mut sum = 0.0;
        let total = k.pow(5);
        for flat in 0..total {
            let mut rest = flat;
            let mut s = [0.0; 6];
            s[0] = node(0, i0);
            for axis in (1..6).rev() {
                s[axis] = node(axis, rest % k);
                rest /= k;
            }
            let w = f.eval(&s);
            if w != 0.0 {
                sum += w / det4(gram4(&s)).sqrt();
            }
        }
        sum
    };
    let slices: Vec<f64> = if cfg.threads == 1 {
        (0..k).map(slice).collect()
    } else {
        (0..k).into_par_iter().map(slice).collect()
    };
    slices.iter().sum::<f64>() * b.volume() / k.pow(6) as f64
}

fn sample_s6(rng: &mut ChaCha8Rng) -> [f64; 6] {
    let g: [UnitQuaternion; 4] = std::array::from_fn(|_| UnitQuaternion::haar_sample(rng));
    [
        g[0].inner(g[1]),
        g[0].inner(g[2]),
        g[0].inner(g[3]),
        g[1].inner(g[2]),
        g[1].inner(g[3]),
        g[2].inner(g[3]),
    ]
}

/// Per function: `(Σ f, Σ f²)` over Haar samples.
fn mc_moments(functions: &[TestFunction], sample_count: usize, cfg: &McConfig) -> Vec<(f64, f64)> {
    let m = functions.len();
    let partial = map_chunks(sample_count, cfg, |count, rng| {
        let mut acc = vec![(0.0, 0.0); m];
        for _ in 0..count {
            let s = sample_s6(rng);
            for (a, f) in acc.iter_mut().zip(functions) {
                let v = f.eval(&s);
                a.0 += v;
                a.1 += v * v;
            }
        }
        acc
    });
    let mut acc = vec![(0.0, 0.0); m];
    for p in partial {
        for (a, b) in acc.iter_mut().zip(p) {
            a.0 += b.0;
            a.1 += b.1;
        }
    }
    acc
}

/// Compares the Monte Carlo mean of each `f(ζ)` with `c₄ ∫ f·det^{-1/2}`; passes when
/// every relative error is at most `rel_tol`.
pub fn verify_weighted_n4(
    sample_count: usize,
    functions: &[TestFunction],
    quad: QuadratureSpec,
    rel_tol: f64,
    cfg: &McConfig,
) -> Result<GofReport> {
    if sample_count < MIN_SAMPLES {
        return Err(HaarError::InsufficientSamples {
            got: sample_count,
            min: MIN_SAMPLES,
        });
    }
    if functions.is_empty() {
        return Err(HaarError::InvalidBox("no test functions supplied".into()));
    }
    for f in functions {
        f.support().validate()?;
    }
    let c4 = normalizer(4)?;
    let n = sample_count as f64;
    let moments = mc_moments(functions, sample_count, cfg);
    let mut r = GofReport::new(
        "haar-n4",
        "max_relative_error",
        sample_count,
        format!(
            "{} test function(s), midpoint rule with {}^6 nodes",
            functions.len(),
            quad.points_per_axis
        ),
    );
    let mut worst: f64 = 0.0;
    let mut worst_sigma: f64 = 0.0;
    for (i, (f, (s1, s2))) in functions.iter().zip(moments).enumerate() {
        let exact = c4 * quadrature(f, quad, cfg);
        let mean = s1 / n;
        let se = ((s2 / n - mean * mean).max(0.0) / n).sqrt();
        let rel = (mean - exact) / exact;
        worst = worst.max(rel.abs());
        if se > 0.0 {
            worst_sigma = worst_sigma.max(((mean - exact) / se).abs());
        }
        r.check(&format!("{}_{i}_relative_error", f.label()), rel, rel_tol);
    }
    r.statistic = worst;
    r.sigma_deviation = Some(worst_sigma);
    Ok(r)
}

/// Estimates `c₄` as `P(ζ ∈ box) / ∫_box det^{-1/2}`. Returns the estimate and its standard error.
pub fn estimate_normalizer_n4(
    b: &Box6,
    sample_count: usize,
    quad: QuadratureSpec,
    cfg: &McConfig,
) -> Result<(f64, f64)> {
    b.validate()?;
    let f = TestFunction::Indicator(*b);
    let (hits, _) = mc_moments(std::slice::from_ref(&f), sample_count, cfg)[0];
    let p = hits / sample_count as f64;
    let integral = quadrature(&f, quad, cfg);
    let se = (p * (1.0 - p) / sample_count as f64).sqrt();
    Ok((p / integral, se / integral))
}

/// For `j = 5, 6` (1-based), which root of the minor quadratic `s₄ⱼ` realizes:
/// `Some(0)` lower, `Some(1)` upper, `None` when the roots are closer than the
/// excluded boundary shell.
pub fn branch_labels(t: &CosetTuple) -> std::result::Result<Vec<Option<usize>>, CosetError> {
    let n = t.len();
    let f = spectral_form(t);
    let pf = PartialForm::from(&f);
    (4..n.min(6))
        .map(|j| {
            Ok(match solve_minor_quadratic(&pf, 3, j) {
                Ok(MinorRoots::Two(lo, hi)) if hi - lo > BORDERLINE_TOL => {
                    Some(MinorRoots::Two(lo, hi).closest(f.get(3, j)))
                }
                Ok(_) | Err(CosetError::ComplexRoots { .. }) | Err(CosetError::DegenerateQuadratic { .. }) => None,
                Err(e) => return Err(e),
            })
        })
        .collect()
}

/// Tests that the lower and upper roots are equally likely (per `j`) and, for `n ≥ 6`,
/// that the choices for `j = 5` and `j = 6` are independent.
pub fn verify_branch_equiprobability(n: usize, sample_count: usize, cfg: &McConfig) -> Result<GofReport> {
    if n < 5 {
        return Err(HaarError::TooShort { n, min: 5 });
    }
    if sample_count < MIN_SAMPLES {
        return Err(HaarError::InsufficientSamples {
            got: sample_count,
            min: MIN_SAMPLES,
        });
    }
    // table[a][b]: label of j = 5 is a, of j = 6 is b; n = 5 uses column 0
    let partial = map_chunks(
        sample_count,
        cfg,
        |count, rng| -> std::result::Result<([[u64; 2]; 2], u64), CosetError> {
            let mut table = [[0u64; 2]; 2];
            let mut excluded = 0;
            for _ in 0..count {
                let t = CosetTuple::random(n, rng)?;
                let labels = branch_labels(&t)?;
                match (labels.first().copied().flatten(), labels.get(1).copied()) {
                    (Some(a), None) => table[a][0] += 1,
                    (Some(a), Some(Some(b))) => table[a][b] += 1,
                    _ => excluded += 1,
                }
            }
            Ok((table, excluded))
        },
    );
    let mut table = [[0u64; 2]; 2];
    let mut excluded = 0;
    for p in partial {
        let (t, e) = p?;
        for a in 0..2 {
            for b in 0..2 {
                table[a][b] += t[a][b];
            }
        }
        excluded += e;
    }
    let [[a, b], [c, d]] = table.map(|r| r.map(|x| x as f64));
    let used = a + b + c + d;
    let z = |k: f64| (k - used / 2.0) / (used / 4.0).sqrt();
    let mut r = GofReport::new(
        "haar-branch",
        if n >= 6 { "independence_chi2" } else { "marginal_z" },
        sample_count,
        format!(
            "n = {n}, {} classified, {excluded} excluded (root gap <= {BORDERLINE_TOL:e})",
            used as u64
        ),
    );
    let z5 = z(c + d);
    r.check("marginal_upper_j5_z", z5, 3.0);
    if n >= 6 {
        let z6 = z(b + d);
        r.check("marginal_upper_j6_z", z6, 3.0);
        let denom = (a + b) * (c + d) * (a + c) * (b + d);
        let chi2 = if denom > 0.0 {
            used * (a * d - b * c).powi(2) / denom
        } else {
            f64::NAN
        };
        r.statistic = chi2;
        r.p_value = Some(chi2_survival(chi2, 1));
        r.sigma_deviation = Some(chi2_sigma(chi2, 1));
        r.check("independence_chi2_sigma", chi2_sigma(chi2, 1), 3.0);
        r.histogram = [a, b, c, d]
            .iter()
            .enumerate()
            .map(|(bin_id, &observed)| HistogramRow {
                bin_id,
                expected: used / 4.0,
                observed,
            })
            .collect();
    } else {
        r.statistic = z5;
        r.sigma_deviation = Some(z5);
        r.histogram = [a, c]
            .iter()
            .enumerate()
            .map(|(bin_id, &observed)| HistogramRow {
                bin_id,
                expected: used / 2.0,
                observed,
            })
            .collect();
    }
    Ok(r)
}

/// Pair law of two Haar elements: the eigen-angle of `g₁⁻¹g₂` follows `(2/π) sin²φ`
/// (KS test) and `s₁₂` has mean zero (within 4σ, variance 1/4).
pub fn verify_pair_law(sample_count: usize, cfg: &McConfig) -> Result<GofReport> {
    if sample_count < MIN_SAMPLES {
        return Err(HaarError::InsufficientSamples {
            got: sample_count,
            min: MIN_SAMPLES,
        });
    }
    let partial = map_chunks(sample_count, cfg, |count, rng| {
        (0..count)
            .map(|_| {
                let g1 = UnitQuaternion::haar_sample(rng);
                let g2 = UnitQuaternion::haar_sample(rng);
                (g1.inverse().compose(g2).eigen_angle(), g1.inner(g2))
            })
            .collect::<Vec<_>>()
    });
    let pairs: Vec<(f64, f64)> = partial.into_iter().flatten().collect();
    let n = pairs.len() as f64;
    let mean = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let mean_z = mean / (0.25 / n).sqrt();
    let mut angles: Vec<f64> = pairs.into_iter().map(|p| p.0).collect();
    let (d, p) = ks_test(&mut angles, eigen_angle_cdf);
    let sn = n.sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    let mut r = GofReport::new(
        "haar-pair",
        "ks_d",
        sample_count,
        "eigen-angle CDF (phi - sin(phi)cos(phi))/pi".into(),
    );
    r.statistic = d;
    r.p_value = Some(p);
    r.sigma_deviation = Some(mean_z);
    r.check("ks_lambda", lambda, KS_LAMBDA_001);
    r.check("s12_mean_z", mean_z, 4.0);
    debug_assert!((kolmogorov_survival(KS_LAMBDA_001) - 0.001).abs() < 1e-4);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset::{normalize_leading, reflection_conjugator};

    #[test]
    fn cell_volumes_sum_to_body_volume() {
        let v = n3_cell_volumes(10, 64);
        let total: f64 = v.iter().sum();
        assert!((total - PI * PI / 2.0).abs() < 1e-3, "{total}");
        // the central cell is entirely inside
        assert!((v[(5 * 10 + 5) * 10 + 5] - 0.008).abs() < 1e-12);
    }

    #[test]
    fn n3_small_run_passes_and_control_fails() {
        let cfg = McConfig::new(80);
        let ok = verify_uniform_n3(200_000, 6, &cfg).unwrap();
        assert!(ok.pass, "{ok:?}");
        assert!(ok.is_consistent());
        let bad = verify_uniform_n3_with(det_sqrt_sampler, 200_000, 6, &cfg).unwrap();
        assert!(!bad.pass);
        assert!(bad.sigma_deviation.unwrap() > 10.0);
    }

    #[test]
    fn rejects_small_sample_counts() {
        let cfg = McConfig::new(1);
        assert!(matches!(
            verify_uniform_n3(9_999, 10, &cfg),
            Err(HaarError::InsufficientSamples { .. })
        ));
        assert!(matches!(
            verify_branch_equiprobability(6, 10, &cfg),
            Err(HaarError::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn boxes_touching_the_boundary_are_rejected() {
        assert!(Box6::default_interior().validate().is_ok());
        assert!(Box6::reference_set().iter().all(|b| b.validate().is_ok()));
        assert!(Box6::cube([0.0; 6], 0.34).validate().is_err());
        assert!(Box6::cube([0.9; 6], 0.05).validate().is_err());
    }

    #[test]
    fn bump_vanishes_on_boundary() {
        let b = Box6::default_interior();
        let f = TestFunction::Bump(b);
        assert!((f.eval(&[0.0; 6]) - 1.0).abs() < 1e-15);
        assert_eq!(f.eval(&b.lo), 0.0);
    }

    #[test]
    fn quadrature_is_resolution_stable() {
        let f = TestFunction::Indicator(Box6::default_interior());
        let cfg = McConfig::new(0);
        let a = quadrature(&f, QuadratureSpec { points_per_axis: 6 }, &cfg);
        let b = quadrature(&f, QuadratureSpec { points_per_axis: 10 }, &cfg);
        assert!(((a - b) / b).abs() < 5e-3);
    }

    #[test]
    fn labels_flip_under_reflection() {
        let mut rng = crate::parallel::stream_rng(81, 0);
        let mut checked = 0;
        for _ in 0..200 {
            let t = normalize_leading(&CosetTuple::random(6, &mut rng).unwrap());
            let Some(h) = reflection_conjugator(t.get(1), t.get(2)) else {
                continue;
            };
            let mut els = t.elements().to_vec();
            els[4] = els[4].transpose().conjugate(h);
            let flipped = CosetTuple::new(els).unwrap();
            let (a, b) = (branch_labels(&t).unwrap(), branch_labels(&flipped).unwrap());
            if let (Some(x), Some(y)) = (a[0], b[0]) {
                assert_eq!(x + y, 1);
                assert_eq!(a[1], b[1]);
                checked += 1;
            }
        }
        assert!(checked > 190);
    }

    #[test]
    fn branch_and_pair_small_runs() {
        let cfg = McConfig::new(82);
        let r = verify_branch_equiprobability(6, 20_000, &cfg).unwrap();
        assert!(r.pass, "{r:?}");
        let r5 = verify_branch_equiprobability(5, 20_000, &cfg).unwrap();
        assert_eq!(r5.histogram.len(), 2);
        assert!(r5.pass);
        let p = verify_pair_law(50_000, &cfg).unwrap();
        assert!(p.pass, "{p:?}");
    }

    #[test]
    fn normalizer_estimate_agrees() {
        let cfg = McConfig::new(83).with_threads(0);
        let (c, se) =
            estimate_normalizer_n4(&Box6::default_interior(), 1_000_000, QuadratureSpec::default(), &cfg).unwrap();
        let exact = normalizer(4).unwrap();
        assert!((c - exact).abs() < 4.0 * se, "{c} vs {exact} (se {se})");
    }
}
