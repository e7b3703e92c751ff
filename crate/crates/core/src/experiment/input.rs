use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::seq::Sequence;

/// Largest sequence a generator will build.
pub const MAX_GENERATED_LEN: usize = 1_000_000;

/// Starting arrangement for a simulation. Generated inputs start from the
/// reversed (fully inverted) arrangement.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSpec {
    /// An explicit comma-separated list.
    Explicit(Sequence),
    /// `descending:N` → `(N, N−1, …, 1)`.
    Descending(usize),
    /// `binary:NA,NB` → `NB` twos followed by `NA` ones.
    Binary { n_a: usize, n_b: usize },
    /// `outlier:N` → one `2` followed by `N − 1` ones.
    Outlier(usize),
}

impl InputSpec {
    /// Parses a generator string (`descending:N`, `binary:NA,NB`, `outlier:N`).
    pub fn parse_generator(s: &str) -> Result<Self> {
        let (name, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("generator {s:?} has no ':'")))?;
        let count = |t: &str| -> Result<usize> {
            let v: usize = t
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("invalid count {t:?} in generator {s:?}")))?;
            if v > MAX_GENERATED_LEN {
                return Err(Error::Config(format!(
                    "generator length {v} exceeds {MAX_GENERATED_LEN}"
                )));
            }
            Ok(v)
        };
        let spec = match name.trim() {
            "descending" => InputSpec::Descending(count(arg)?),
            "outlier" => InputSpec::Outlier(count(arg)?),
            "binary" => {
                let (na, nb) = arg
                    .split_once(',')
                    .ok_or_else(|| Error::Config(format!("binary generator needs NA,NB: {s:?}")))?;
                InputSpec::Binary {
                    n_a: count(na)?,
                    n_b: count(nb)?,
                }
            }
            other => return Err(Error::Config(format!("unknown generator {other:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            InputSpec::Explicit(_) => true,
            InputSpec::Descending(n) => n >= 1,
            InputSpec::Outlier(n) => n >= 2,
            InputSpec::Binary { n_a, n_b } => {
                n_a >= 1 && n_b >= 1 && n_a + n_b <= MAX_GENERATED_LEN
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("degenerate generator {self}")))
        }
    }

    pub fn initial(&self) -> Sequence {
        let v: Vec<f64> = match *self {
            InputSpec::Explicit(ref s) => return s.clone(),
            InputSpec::Descending(n) => (1..=n).rev().map(|x| x as f64).collect(),
            InputSpec::Binary { n_a, n_b } => std::iter::repeat_n(2.0, n_b)
                .chain(std::iter::repeat_n(1.0, n_a))
                .collect(),
            InputSpec::Outlier(n) => std::iter::once(2.0)
                .chain(std::iter::repeat_n(1.0, n - 1))
                .collect(),
        };
        Sequence::from_vec_unchecked(v)
    }
}

impl fmt::Display for InputSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputSpec::Explicit(s) => write!(f, "{s}"),
            InputSpec::Descending(n) => write!(f, "descending:{n}"),
            InputSpec::Binary { n_a, n_b } => write!(f, "binary:{n_a},{n_b}"),
            InputSpec::Outlier(n) => write!(f, "outlier:{n}"),
        }
    }
}

impl FromStr for InputSpec {
    type Err = Error;

    /// Generator strings contain ':'; anything else is an explicit list.
    fn from_str(s: &str) -> Result<Self> {
        if s.contains(':') {
            InputSpec::parse_generator(s)
        } else {
            Ok(InputSpec::Explicit(s.parse()?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators() {
        let d: InputSpec = "descending:4".parse().unwrap();
        assert_eq!(d.initial().join(","), "4,3,2,1");
        let b: InputSpec = "binary:2,3".parse().unwrap();
        assert_eq!(b.initial().join(""), "22211");
        let o: InputSpec = "outlier:4".parse().unwrap();
        assert_eq!(o.initial().join(""), "2111");
        let e: InputSpec = "3, 1,2".parse().unwrap();
        assert_eq!(e.initial().join(","), "3,1,2");
        assert_eq!(b.to_string(), "binary:2,3");
    }

    #[test]
    fn bad_generators() {
        for s in [
            "descending:",
            "descending:0",
            "descending:-3",
            "outlier:1",
            "binary:3",
            "binary:0,2",
            "spiral:4",
            "descending:99999999999",
            ":",
        ] {
            assert!(s.parse::<InputSpec>().is_err(), "{s}");
        }
    }
}
