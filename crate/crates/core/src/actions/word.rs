//! Generator tokens, words, and their textual syntax.
//!
//! ```text
//!     perm:2,4,3,5   new positions 2..n take the listed old positions
//!     inv:2          g₂ ← g₂⁻¹
//!     lmul:2,3       g₃ ← g₂·g₃
//!     s1, s2^-1      braid generators σ₁, σ₂⁻¹
//! ```
//!
//! Positions are 1-based tuple positions; position 1 holds the pinned identity. Braid
//! generators are numbered over the free generators `c_i = g_{i+1}`, so `σ_k` acts on
//! tuple positions `k + 1` and `k + 2`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

use super::{ActionError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GeneratorToken {
    Permute(Vec<usize>),
    Invert(usize),
    /// `LeftMultiply(j, k)`: `g_k ← g_j·g_k`.
    LeftMultiply(usize, usize),
    /// `BraidSigma(k, ±1)`.
    BraidSigma(usize, i8),
}

impl GeneratorToken {
    pub fn is_braid(&self) -> bool {
        matches!(self, GeneratorToken::BraidSigma(..))
    }

    /// Checks indices against a tuple of length `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        let position = |k: usize| {
            if (2..=n).contains(&k) {
                Ok(())
            } else {
                Err(ActionError::Index(format!("position {k} outside 2..={n} in `{self}`")))
            }
        };
        match self {
            GeneratorToken::Permute(sigma) => {
                let mut seen = vec![false; n + 1];
                if sigma.len() != n.saturating_sub(1) {
                    return Err(ActionError::Index(format!(
                        "`{self}` lists {} positions, expected {}",
                        sigma.len(),
                        n - 1
                    )));
                }
                for &k in sigma {
                    position(k)?;
                    if std::mem::replace(&mut seen[k], true) {
                        return Err(ActionError::Index(format!("`{self}` repeats position {k}")));
                    }
                }
                Ok(())
            }
            GeneratorToken::Invert(k) => position(*k),
            GeneratorToken::LeftMultiply(j, k) => {
                position(*j)?;
                position(*k)?;
                if j == k {
                    return Err(ActionError::Index(format!("`{self}` multiplies a position by itself")));
                }
                Ok(())
            }
            GeneratorToken::BraidSigma(k, e) => {
                if *e != 1 && *e != -1 {
                    return Err(ActionError::Index(format!("braid exponent {e} is not ±1")));
                }
                if *k < 1 || *k + 2 > n {
                    return Err(ActionError::Index(format!(
                        "braid generator s{k} needs 1 <= k <= {} for n = {n}",
                        n as isize - 2
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn inverse(&self) -> Option<Self> {
        match self {
            GeneratorToken::Invert(k) => Some(GeneratorToken::Invert(*k)),
            GeneratorToken::BraidSigma(k, e) => Some(GeneratorToken::BraidSigma(*k, -e)),
            GeneratorToken::Permute(sigma) => {
                let mut inv = vec![0; sigma.len()];
                for (i, &k) in sigma.iter().enumerate() {
                    *inv.get_mut(k.checked_sub(2)?)? = i + 2;
                }
                Some(GeneratorToken::Permute(inv))
            }
            GeneratorToken::LeftMultiply(..) => None,
        }
    }
}

impl fmt::Display for GeneratorToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorToken::Permute(sigma) => {
                let list: Vec<String> = sigma.iter().map(|k| k.to_string()).collect();
                write!(f, "perm:{}", list.join(","))
            }
            GeneratorToken::Invert(k) => write!(f, "inv:{k}"),
            GeneratorToken::LeftMultiply(j, k) => write!(f, "lmul:{j},{k}"),
            GeneratorToken::BraidSigma(k, 1) => write!(f, "s{k}"),
            GeneratorToken::BraidSigma(k, e) => write!(f, "s{k}^{e}"),
        }
    }
}

fn parse_index(s: &str, token: &str) -> std::result::Result<usize, String> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| format!("`{s}` is not a position in `{token}`"))
}

fn parse_list(s: &str, token: &str) -> std::result::Result<Vec<usize>, String> {
    s.split(',').map(|x| parse_index(x, token)).collect()
}

fn parse_token(token: &str) -> std::result::Result<GeneratorToken, String> {
    if let Some(rest) = token.strip_prefix("perm:") {
        return Ok(GeneratorToken::Permute(parse_list(rest, token)?));
    }
    if let Some(rest) = token.strip_prefix("inv:") {
        return Ok(GeneratorToken::Invert(parse_index(rest, token)?));
    }
    if let Some(rest) = token.strip_prefix("lmul:") {
        let v = parse_list(rest, token)?;
        let [j, k] = v[..] else {
            return Err(format!("`{token}` needs exactly two positions"));
        };
        return Ok(GeneratorToken::LeftMultiply(j, k));
    }
    if let Some(rest) = token.strip_prefix('s') {
        let (k, e) = match rest.split_once('^') {
            Some((k, "-1")) => (k, -1),
            Some((k, "1")) => (k, 1),
            Some((_, e)) => return Err(format!("exponent `{e}` in `{token}` is not 1 or -1")),
            None => (rest, 1),
        };
        if k.is_empty() || !k.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("`{token}` is not a braid generator"));
        }
        return Ok(GeneratorToken::BraidSigma(parse_index(k, token)?, e));
    }
    Err(format!("unknown token `{token}`"))
}

impl FromStr for GeneratorToken {
    type Err = ActionError;

    fn from_str(s: &str) -> Result<Self> {
        parse_token(s).map_err(|message| ActionError::Parse { token: 0, message })
    }
}

/// Tokens applied left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GroupWord {
    pub tokens: Vec<GeneratorToken>,
}

impl GroupWord {
    pub fn new(tokens: Vec<GeneratorToken>) -> Self {
        Self { tokens }
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn is_braid(&self) -> bool {
        self.tokens.iter().all(GeneratorToken::is_braid)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        self.tokens.iter().try_for_each(|t| t.validate(n))
    }

    /// `self` followed by `other`.
    pub fn then(mut self, other: &GroupWord) -> Self {
        self.tokens.extend(other.tokens.iter().cloned());
        self
    }

    pub fn pow(&self, k: usize) -> Self {
        Self::new(
            self.tokens
                .iter()
                .cloned()
                .cycle()
                .take(self.tokens.len() * k)
                .collect(),
        )
    }

    pub fn inverse(&self) -> Option<Self> {
        self.tokens
            .iter()
            .rev()
            .map(GeneratorToken::inverse)
            .collect::<Option<Vec<_>>>()
            .map(Self::new)
    }

    /// The permutation of positions `2..=n` induced by the braid tokens: entry `i` is the
    /// original position now found at position `i + 2`. `None` if the word has other tokens.
    pub fn underlying_permutation(&self, n: usize) -> Option<Vec<usize>> {
        let mut perm: Vec<usize> = (2..=n).collect();
        for t in &self.tokens {
            let GeneratorToken::BraidSigma(k, _) = t else {
                return None;
            };
            if *k < 1 || *k + 2 > n {
                return None;
            }
            perm.swap(k - 1, *k);
        }
        Some(perm)
    }

    /// `((σ₁…σ_{k−1})(σ₁…σ_{k−2})…σ₁)²`, the square of the half twist on `k` strands.
    pub fn full_twist_squared(k: usize) -> Self {
        let mut half = Vec::new();
        for top in (1..k).rev() {
            half.extend((1..=top).map(|i| GeneratorToken::BraidSigma(i, 1)));
        }
        Self::new(half).pow(2)
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.tokens.iter().map(|t| t.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for GroupWord {
    type Err = ActionError;

    fn from_str(s: &str) -> Result<Self> {
        s.split_whitespace()
            .enumerate()
            .map(|(i, tok)| parse_token(tok).map_err(|message| ActionError::Parse { token: i + 1, message }))
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

impl Serialize for GroupWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use GeneratorToken::*;

    #[test]
    fn parses_every_token_kind() {
        let w: GroupWord = "perm:2,4,3,5 inv:2  lmul:2,3\ts1 s2^-1 s3^1".parse().unwrap();
        assert_eq!(
            w.tokens,
            vec![
                Permute(vec![2, 4, 3, 5]),
                Invert(2),
                LeftMultiply(2, 3),
                BraidSigma(1, 1),
                BraidSigma(2, -1),
                BraidSigma(3, 1)
            ]
        );
        assert_eq!(w.to_string(), "perm:2,4,3,5 inv:2 lmul:2,3 s1 s2^-1 s3");
        assert_eq!("".parse::<GroupWord>().unwrap(), GroupWord::default());
    }

    #[test]
    fn reports_bad_token_position() {
        for (text, at) in [
            ("s1 x2", 2),
            ("inv:", 1),
            ("s1 s2 lmul:2", 3),
            ("s2^3", 1),
            ("s", 1),
            ("s-1", 1),
        ] {
            match text.parse::<GroupWord>() {
                Err(ActionError::Parse { token, .. }) => assert_eq!(token, at, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn validation() {
        assert!(Permute(vec![2, 4, 3, 5]).validate(5).is_ok());
        assert!(Permute(vec![2, 2, 3, 5]).validate(5).is_err());
        assert!(Permute(vec![2, 3, 4]).validate(5).is_err());
        assert!(Invert(1).validate(5).is_err());
        assert!(LeftMultiply(3, 3).validate(5).is_err());
        assert!(BraidSigma(3, 1).validate(5).is_ok());
        assert!(BraidSigma(4, 1).validate(5).is_err());
        assert!(BraidSigma(0, 1).validate(5).is_err());
    }

    #[test]
    fn kernel_word_shape() {
        assert_eq!(GroupWord::full_twist_squared(2).to_string(), "s1 s1");
        assert_eq!(GroupWord::full_twist_squared(3).to_string(), "s1 s2 s1 s1 s2 s1");
        assert_eq!(GroupWord::full_twist_squared(4).tokens.len(), 12);
        assert_eq!(
            GroupWord::full_twist_squared(4).underlying_permutation(5),
            Some(vec![2, 3, 4, 5])
        );
    }

    #[test]
    fn permutation_of_single_generator() {
        let w: GroupWord = "s2".parse().unwrap();
        assert_eq!(w.underlying_permutation(5), Some(vec![2, 4, 3, 5]));
        assert_eq!("inv:2".parse::<GroupWord>().unwrap().underlying_permutation(5), None);
    }

    #[test]
    fn inverse_words() {
        let w: GroupWord = "perm:3,4,2 s1 inv:2".parse().unwrap();
        assert_eq!(w.inverse().unwrap().to_string(), "inv:2 s1^-1 perm:4,2,3");
        assert!("lmul:2,3".parse::<GroupWord>().unwrap().inverse().is_none());
    }

    #[test]
    fn serde_as_string() {
        let w: GroupWord = "s1 inv:3".parse().unwrap();
        let j = serde_json::to_string(&w).unwrap();
        assert_eq!(j, "\"s1 inv:3\"");
        assert_eq!(serde_json::from_str::<GroupWord>(&j).unwrap(), w);
    }
}
