//! Polynomial expansion of RGB responses for the regression estimators.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Exponents of one monomial `R^r G^g B^b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term(pub [u8; 3]);

impl Term {
    pub const R: Term = Term([1, 0, 0]);
    pub const G: Term = Term([0, 1, 0]);
    pub const B: Term = Term([0, 0, 1]);

    #[inline]
    pub fn eval(&self, rgb: &[f64]) -> f64 {
        let mut v = 1.0;
        for (&e, &x) in self.0.iter().zip(rgb) {
            for _ in 0..e {
                v *= x;
            }
        }
        v
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (letter, &e) in ['R', 'G', 'B'].iter().zip(&self.0) {
            match e {
                0 => {}
                1 => write!(f, "{letter}")?,
                _ => write!(f, "{letter}{e}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Term {
    type Err = Error;

    /// `R`, `G2`, `RG2`, `R2G2B2`, ... Repeated letters add their exponents.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("bad polynomial term {s:?}"));
        let mut exps = [0u8; 3];
        let mut chars = s.trim().chars().peekable();
        if chars.peek().is_none() {
            return Err(bad());
        }
        while let Some(c) = chars.next() {
            let slot = match c.to_ascii_uppercase() {
                'R' => 0,
                'G' => 1,
                'B' => 2,
                _ => return Err(bad()),
            };
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            let e: u8 = if digits.is_empty() { 1 } else { digits.parse().map_err(|_| bad())? };
            exps[slot] = exps[slot].checked_add(e).ok_or_else(bad)?;
        }
        if exps == [0, 0, 0] {
            return Err(bad());
        }
        Ok(Term(exps))
    }
}

/// An ordered list of monomials; always starts with `R, G, B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyCombo {
    terms: Vec<Term>,
}

/// Named combos; each matches one row of the polynomial comparison table.
pub const PRESETS: &[(&str, &str)] = &[
    ("linear3", "R,G,B"),
    ("cross6", "R,G,B,RG,GB,BR"),
    ("sq6", "R,G,B,R2,G2,B2"),
    ("cube6", "R,G,B,R3,G3,B3"),
    ("mixed6", "R,G,B,RG2,GB2,BR2"),
    ("cross7", "R,G,B,RG,GB,BR,R2G2B2"),
    ("cross9", "R,G,B,RG,BG,BR,RG2,GB2,BR2"),
    ("full12", "R,G,B,RG,BG,RB,R2,G2,B2,RG2,GB2,BR2"),
    ("full12sq", "R,G,B,RG,BG,RB,R2,G2,B2,R2G2,G2B2,B2R2"),
];

impl PolyCombo {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        if terms.len() < 3 || terms[..3] != [Term::R, Term::G, Term::B] {
            return Err(Error::InvalidInput(
                "a polynomial combo must start with the terms R, G, B".into(),
            ));
        }
        for (i, t) in terms.iter().enumerate() {
            if terms[..i].contains(t) {
                return Err(Error::InvalidInput(format!("duplicate polynomial term {t}")));
            }
        }
        Ok(Self { terms })
    }

    pub fn linear() -> Self {
        Self {
            terms: vec![Term::R, Term::G, Term::B],
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, spec)| spec.parse().expect("presets parse"))
            .ok_or_else(|| Error::InvalidInput(format!("unknown combo preset {name:?}")))
    }

    /// Preset name, if this combo is one of the presets.
    pub fn preset_name(&self) -> Option<&'static str> {
        PRESETS
            .iter()
            .find(|(_, spec)| spec.parse::<PolyCombo>().map(|c| &c == self).unwrap_or(false))
            .map(|(n, _)| *n)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_linear(&self) -> bool {
        self.terms.len() == 3
    }

    /// Whether every term of `self` also appears in `other`.
    pub fn is_subset_of(&self, other: &PolyCombo) -> bool {
        self.terms.iter().all(|t| other.terms.contains(t))
    }

    #[inline]
    pub fn expand_into(&self, rgb: &[f64], out: &mut [f64]) {
        for (o, t) in out.iter_mut().zip(&self.terms) {
            *o = t.eval(rgb);
        }
    }

    pub fn expand(&self, rgb: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.terms.len()];
        self.expand_into(rgb, &mut out);
        out
    }
}

impl FromStr for PolyCombo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let terms = s
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<Term>>>()?;
        Self::new(terms)
    }
}

impl fmt::Display for PolyCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}
