//! Nielsen and braid actions on normalized tuples, and their closed forms on spectral forms.

mod checks;
mod forms;
mod word;

pub use checks::{
    artin_check, check_word_pair, verify_actions_oracle, verify_braid_relations, verify_kernel_element, CheckReport,
};
pub use forms::{
    form_act, form_apply_token, form_braid, form_braid_general, form_invert, form_invert_sheeted, form_left_multiply,
    ActionPath, BranchInfo, FormAction, SignRule, RADICAND_CLAMP,
};
pub use word::{GeneratorToken, GroupWord};

use crate::coset::{normalize_leading, CosetError, CosetTuple};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ActionError {
    #[error("token {token}: {message}")]
    Parse { token: usize, message: String },
    #[error("index error: {0}")]
    Index(String),
    #[error("radicand {value:e} is negative beyond tolerance")]
    NegativeDiscriminant { value: f64 },
    #[error(transparent)]
    Coset(#[from] CosetError),
}

pub type Result<T> = std::result::Result<T, ActionError>;

/// Applies one token to a normalized element list in place (0-based storage).
fn apply_token(g: &mut [crate::su2::UnitQuaternion], token: &GeneratorToken) {
    match token {
        GeneratorToken::Permute(sigma) => {
            let old = g.to_vec();
            for (i, &k) in sigma.iter().enumerate() {
                g[i + 1] = old[k - 1];
            }
        }
        GeneratorToken::Invert(k) => g[k - 1] = g[k - 1].inverse(),
        GeneratorToken::LeftMultiply(j, k) => g[k - 1] = g[j - 1].compose(g[k - 1]),
        GeneratorToken::BraidSigma(k, e) => {
            let (x, y) = (g[*k], g[k + 1]);
            let (nx, ny) = if *e > 0 {
                (x.compose(y).compose(x.inverse()), x)
            } else {
                (y, y.inverse().compose(x).compose(y))
            };
            g[*k] = nx;
            g[k + 1] = ny;
        }
    }
}

/// Applies the word's tokens left to right. The input is first normalized to a leading
/// identity, which does not change its coset.
pub fn act_tuple(t: &CosetTuple, w: &GroupWord) -> Result<CosetTuple> {
    w.validate(t.len())?;
    let mut g = normalize_leading(t).into_elements();
    for token in &w.tokens {
        apply_token(&mut g, token);
    }
    Ok(CosetTuple::new(g)?)
}
