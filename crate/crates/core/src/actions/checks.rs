//! Randomized verification of the actions: matrix oracle vs closed forms, Artin
//! conditions, braid relations, and the kernel element.

use serde::{Deserialize, Serialize};

use super::forms::oracle_form;
use super::{
    act_tuple, form_braid, form_braid_general, form_invert, form_left_multiply, ActionError, GeneratorToken, GroupWord,
    Result, SignRule,
};
use crate::coset::{equivalent, normalize_leading, sheet, CosetError, CosetTuple, SheetedForm};
use crate::haar::GofComponent;
use crate::parallel::{map_chunks, McConfig};
use crate::su2::UnitQuaternion;

/// Tolerance for matrix identities (product preservation, conjugacy classes).
const MATRIX_TOL: f64 = 1e-10;

/// Outcome of a randomized check. `pass` holds iff every component passes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub trials: usize,
    pub components: Vec<GofComponent>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub(crate) fn new(name: &str, trials: usize) -> Self {
        Self {
            name: name.into(),
            trials,
            components: Vec::new(),
            pass: false,
            permutation: None,
            notes: Vec::new(),
        }
    }

    /// Records `value ≤ threshold` (values are nonnegative deviations or counts).
    pub(crate) fn check(&mut self, name: &str, value: f64, threshold: f64) {
        self.components.push(GofComponent {
            name: name.into(),
            value,
            threshold,
            pass: value <= threshold,
        });
        self.pass = self.components.iter().all(|c| c.pass);
    }
}

fn random_normalized(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Result<CosetTuple> {
    Ok(normalize_leading(&CosetTuple::random(n, rng)?))
}

fn product(t: &CosetTuple) -> UnitQuaternion {
    t.tail().iter().fold(UnitQuaternion::IDENTITY, |acc, g| acc.compose(*g))
}

/// Runs `trial` over `trials` random normalized tuples and folds the results.
fn run_trials<T, F>(n: usize, trials: usize, cfg: &McConfig, trial: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(CosetTuple) -> Result<T> + Sync + Send,
{
    let chunks = map_chunks(trials, cfg, |count, rng| {
        (0..count)
            .map(|_| trial(random_normalized(n, rng)?))
            .collect::<Result<Vec<T>>>()
    });
    Ok(chunks
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect())
}

/// Artin conditions for `w`: every output slot is conjugate to some input slot (the
/// matching gives `ξ`), and the product `g₂⋯gₙ` is unchanged.
pub fn artin_check(w: &GroupWord, n: usize, trials: usize, cfg: &McConfig) -> Result<CheckReport> {
    w.validate(n)?;
    let outcomes = run_trials(n, trials, cfg, |t| {
        let out = act_tuple(&t, w)?;
        let before: Vec<f64> = t.tail().iter().map(|g| g.a_re).collect();
        let mut used = vec![false; before.len()];
        let mut xi = Vec::with_capacity(before.len());
        let mut conjugacy_ok = true;
        for g in out.tail() {
            let best = (0..before.len())
                .filter(|&i| !used[i])
                .min_by(|&a, &b| (before[a] - g.a_re).abs().total_cmp(&(before[b] - g.a_re).abs()));
            match best {
                Some(i) if (before[i] - g.a_re).abs() <= MATRIX_TOL => {
                    used[i] = true;
                    xi.push(i + 2);
                }
                _ => {
                    conjugacy_ok = false;
                    xi.push(0);
                }
            }
        }
        Ok((conjugacy_ok, xi, product(&out).max_abs_diff(product(&t))))
    })?;
    let mut r = CheckReport::new("artin", trials);
    let conj_fail = outcomes.iter().filter(|o| !o.0).count();
    let first = outcomes.first().map(|o| o.1.clone());
    let xi_mismatch = outcomes.iter().filter(|o| Some(&o.1) != first.as_ref()).count();
    let worst = outcomes.iter().map(|o| o.2).fold(0.0, f64::max);
    r.check("conjugacy_failures", conj_fail as f64, 0.0);
    r.check("permutation_inconsistencies", xi_mismatch as f64, 0.0);
    r.check("product_deviation", worst, MATRIX_TOL);
    if let (Some(xi), Some(expected)) = (&first, w.underlying_permutation(n)) {
        let differs = usize::from(*xi != expected);
        r.check("permutation_vs_word", differs as f64, 0.0);
    }
    if !w.is_braid() {
        r.notes.push("word contains non-braid tokens".into());
    }
    r.permutation = first;
    Ok(r)
}

/// Counts trials on which `lhs` and `rhs` give inequivalent cosets.
pub fn check_word_pair(
    lhs: &GroupWord,
    rhs: &GroupWord,
    n: usize,
    trials: usize,
    cfg: &McConfig,
) -> Result<CheckReport> {
    lhs.validate(n)?;
    rhs.validate(n)?;
    let name = format!("{lhs} = {rhs}");
    let outcomes = run_trials(n, trials, cfg, |t| {
        pair_outcome(&act_tuple(&t, lhs)?, &act_tuple(&t, rhs)?)
    })?;
    let mut r = CheckReport::new(&name, trials);
    record_pair(&mut r, &name, &outcomes);
    Ok(r)
}

/// `(equivalent, borderline)` for two tuples.
fn pair_outcome(a: &CosetTuple, b: &CosetTuple) -> Result<(bool, bool)> {
    match equivalent(a, b) {
        Ok(e) => Ok((e, false)),
        Err(CosetError::Borderline { .. }) => Ok((false, true)),
        Err(e) => Err(e.into()),
    }
}

fn record_pair(r: &mut CheckReport, name: &str, outcomes: &[(bool, bool)]) {
    let fails = outcomes.iter().filter(|o| !o.0).count();
    let borderline = outcomes.iter().filter(|o| o.1).count();
    r.check(&format!("{name}: inequivalent"), fails as f64, 0.0);
    if borderline > 0 {
        r.notes.push(format!("{name}: {borderline} borderline comparisons"));
    }
}

fn sigma(k: usize) -> GeneratorToken {
    GeneratorToken::BraidSigma(k, 1)
}

/// Both braid relations on every applicable index pair, checked with [`equivalent`].
pub fn verify_braid_relations(n: usize, trials: usize, cfg: &McConfig) -> Result<CheckReport> {
    if n < 4 {
        return Err(ActionError::Index(format!("braid relations need n >= 4, got {n}")));
    }
    let kmax = n - 2;
    let mut pairs = Vec::new();
    for j in 1..kmax {
        pairs.push((
            GroupWord::new(vec![sigma(j), sigma(j + 1), sigma(j)]),
            GroupWord::new(vec![sigma(j + 1), sigma(j), sigma(j + 1)]),
        ));
    }
    for i in 1..=kmax {
        for j in i + 2..=kmax {
            pairs.push((
                GroupWord::new(vec![sigma(i), sigma(j)]),
                GroupWord::new(vec![sigma(j), sigma(i)]),
            ));
        }
    }
    let outcomes = run_trials(n, trials, cfg, |t| {
        pairs
            .iter()
            .map(|(l, r)| pair_outcome(&act_tuple(&t, l)?, &act_tuple(&t, r)?))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut r = CheckReport::new("braid-relations", trials);
    for (p, (lhs, rhs)) in pairs.iter().enumerate() {
        let column: Vec<(bool, bool)> = outcomes.iter().map(|o| o[p]).collect();
        record_pair(&mut r, &format!("{lhs} = {rhs}"), &column);
    }
    Ok(r)
}

/// The square of the half twist on all `n − 1` free generators acts trivially.
pub fn verify_kernel_element(n: usize, trials: usize, cfg: &McConfig) -> Result<CheckReport> {
    if n < 3 {
        return Err(ActionError::Index(format!("kernel element needs n >= 3, got {n}")));
    }
    let w = GroupWord::full_twist_squared(n - 1);
    let outcomes = run_trials(n, trials, cfg, |t| pair_outcome(&act_tuple(&t, &w)?, &t))?;
    let mut r = CheckReport::new("kernel", trials);
    record_pair(&mut r, &w.to_string(), &outcomes);
    Ok(r)
}

/// Closed-form maps against `ζ` of the matrix action on random tuples, plus agreement
/// between the θ sign rule and the reconstructed representative.
pub fn verify_actions_oracle(n: usize, trials: usize, cfg: &McConfig) -> Result<CheckReport> {
    if n < 4 {
        return Err(ActionError::Index(format!("the oracle suite needs n >= 4, got {n}")));
    }
    const NAMES: [&str; 6] = [
        "invert",
        "left_multiply_theta",
        "left_multiply_oracle",
        "braid_in_place",
        "braid_general",
        "sheet",
    ];
    let outcomes = run_trials(n, trials, cfg, |t| {
        let sf = SheetedForm::of_tuple(&t);
        let f = sf.form();
        let mut dev = [0.0f64; 6];
        dev[0] = form_invert(f, 2)?.max_abs_diff(&oracle_form(&t, GeneratorToken::Invert(2))?);
        let lm = GeneratorToken::LeftMultiply(2, 3);
        let want = oracle_form(&t, lm.clone())?;
        let theta = form_left_multiply(&sf, 2, 3, SignRule::Theta)?;
        let oracle = form_left_multiply(&sf, 2, 3, SignRule::Oracle)?;
        dev[1] = theta.form.form().max_abs_diff(&want);
        dev[2] = oracle.form.form().max_abs_diff(&want);
        let mut sheet_mismatch = usize::from(theta.form.sheet() != sheet(&act_tuple(&t, &GroupWord::new(vec![lm]))?));
        for k in 1..=n - 2 {
            let want = oracle_form(&t, sigma(k))?;
            let lemma = form_braid(&sf, k, SignRule::Theta)?;
            let general = form_braid_general(&sf, k, SignRule::Theta)?;
            dev[3] = dev[3].max(lemma.form.form().max_abs_diff(&want));
            dev[4] = dev[4].max(general.form.form().max_abs_diff(&want));
            sheet_mismatch +=
                usize::from(general.form.sheet() != sheet(&act_tuple(&t, &GroupWord::new(vec![sigma(k)]))?));
        }
        dev[5] = sheet_mismatch as f64;
        let (mut decided, mut agreed) = (0usize, 0usize);
        for (a, b) in theta.branches.iter().zip(&oracle.branches) {
            if a.sin_theta_diff.is_some_and(|s| s.abs() > 1e-6) {
                decided += 1;
                agreed += usize::from(a.sign == b.sign);
            }
        }
        Ok((dev, decided, agreed))
    })?;
    let mut r = CheckReport::new("actions-oracle", trials);
    let worst = |i: usize| outcomes.iter().map(|o| o.0[i]).fold(0.0, f64::max);
    r.check(NAMES[0], worst(0), 1e-10);
    for (i, name) in NAMES.iter().enumerate().take(5).skip(1) {
        r.check(name, worst(i), 1e-8);
    }
    r.check("sheet_mismatches", outcomes.iter().map(|o| o.0[5]).sum(), 0.0);
    let decided: usize = outcomes.iter().map(|o| o.1).sum();
    let agreed: usize = outcomes.iter().map(|o| o.2).sum();
    let disagreement = if decided == 0 {
        0.0
    } else {
        1.0 - agreed as f64 / decided as f64
    };
    r.check("sign_rule_disagreement", disagreement, 1e-3);
    r.notes.push(format!(
        "{agreed}/{decided} sign decisions agree with the reconstructed representative"
    ));
    Ok(r)
}
