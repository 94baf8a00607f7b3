//! Sparse truncated series in `t_n^alpha`, `s_k`, `hbar` and the Novikov `q`.

use crate::exactnum::{fmt_rat, int, parse_rat, Rat};
use num::{One, Zero};
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarId {
    T { level: u32, alpha: u8 },
    S(u32),
    Hbar,
    Q,
}

pub fn t(level: u32, alpha: usize) -> VarId {
    VarId::T { level, alpha: alpha as u8 }
}

impl VarId {
    pub fn is_t(&self) -> bool {
        matches!(self, VarId::T { .. })
    }

    pub fn is_s(&self) -> bool {
        matches!(self, VarId::S(_))
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarId::T { level, alpha } => write!(f, "t{}_{}", *alpha as usize + 1, level),
            VarId::S(k) => write!(f, "s{k}"),
            VarId::Hbar => write!(f, "hbar"),
            VarId::Q => write!(f, "q"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FockError {
    #[error("incompatible truncations")]
    Truncation,
    #[error("cannot parse `{0}`")]
    Parse(String),
}

/// Sorted list of `(variable, exponent)` with nonzero exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<(VarId, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: VarId) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn pow(v: VarId, e: i32) -> Self {
        if e == 0 {
            Self::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (VarId, i32)>) -> Self {
        pairs
            .into_iter()
            .fold(Self::one(), |acc, (v, e)| acc.mul(&Self::pow(v, e)))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(VarId, i32)] {
        &self.0
    }

    pub fn exp(&self, v: VarId) -> i32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(&v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &o.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if e != 0 {
                        out.push((a[i].0, e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `d/dv` of the monomial as `(exponent, remaining monomial)`, or `None`
    /// if `v` does not occur.
    pub fn derive(&self, v: VarId) -> Option<(i32, Monomial)> {
        let i = self.0.binary_search_by(|(w, _)| w.cmp(&v)).ok()?;
        let e = self.0[i].1;
        let mut out = self.0.clone();
        if e == 1 {
            out.remove(i);
        } else {
            out[i].1 -= 1;
        }
        Some((e, Monomial(out)))
    }

    /// Removes `v` entirely, returning its exponent.
    pub fn take(&self, v: VarId) -> (i32, Monomial) {
        match self.0.binary_search_by(|(w, _)| w.cmp(&v)) {
            Ok(i) => {
                let mut out = self.0.clone();
                let (_, e) = out.remove(i);
                (e, Monomial(out))
            }
            Err(_) => (0, self.clone()),
        }
    }

    pub fn t_degree(&self) -> i32 {
        self.0.iter().filter(|(v, _)| v.is_t()).map(|(_, e)| e).sum()
    }

    pub fn s_degree(&self) -> i32 {
        self.0.iter().filter(|(v, _)| v.is_s()).map(|(_, e)| e).sum()
    }

    pub fn hbar(&self) -> i32 {
        self.exp(VarId::Hbar)
    }

    pub fn q(&self) -> i32 {
        self.exp(VarId::Q)
    }

    pub fn max_level(&self) -> Option<u32> {
        self.0
            .iter()
            .filter_map(|(v, _)| match v {
                VarId::T { level, .. } => Some(*level),
                _ => None,
            })
            .max()
    }

    pub fn max_s_index(&self) -> Option<u32> {
        self.0
            .iter()
            .filter_map(|(v, _)| match v {
                VarId::S(k) => Some(*k),
                _ => None,
            })
            .max()
    }

    /// Only the t-part.
    pub fn t_part(&self) -> Monomial {
        Monomial(self.0.iter().filter(|(v, _)| v.is_t()).copied().collect())
    }

    /// Only the s-part.
    pub fn s_part(&self) -> Monomial {
        Monomial(self.0.iter().filter(|(v, _)| v.is_s()).copied().collect())
    }

    /// Product of factorials of the exponents of t and s variables.
    pub fn factorial_weight(&self) -> Rat {
        self.0
            .iter()
            .filter(|(v, _)| v.is_t() || v.is_s())
            .map(|(_, e)| crate::exactnum::factorial_rat(*e as u64))
            .fold(Rat::one(), |a, b| a * b)
    }

    /// Expand into a list of variables with repetition (t and s only).
    pub fn expand(&self) -> Vec<VarId> {
        self.0
            .iter()
            .filter(|(v, _)| v.is_t() || v.is_s())
            .flat_map(|&(v, e)| std::iter::repeat(v).take(e.max(0) as usize))
            .collect()
    }

    pub fn parse(s: &str) -> Result<Monomial, FockError> {
        let s = s.trim();
        if s == "1" {
            return Ok(Self::one());
        }
        let err = || FockError::Parse(s.to_string());
        let mut m = Self::one();
        for factor in s.split('*') {
            let (base, e) = match factor.split_once('^') {
                Some((b, e)) => (b, e.parse::<i32>().map_err(|_| err())?),
                None => (factor, 1),
            };
            let v = if base == "hbar" {
                VarId::Hbar
            } else if base == "q" {
                VarId::Q
            } else if let Some(k) = base.strip_prefix('s') {
                VarId::S(k.parse().map_err(|_| err())?)
            } else if let Some(rest) = base.strip_prefix('t') {
                let (a, l) = rest.split_once('_').ok_or_else(err)?;
                let a: usize = a.parse().map_err(|_| err())?;
                if a == 0 {
                    return Err(err());
                }
                t(l.parse().map_err(|_| err())?, a - 1)
            } else {
                return Err(err());
            };
            m = m.mul(&Self::pow(v, e));
        }
        Ok(m)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Truncation policy. The hbar window is `[-2, 2 * genus_max - 2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Truncation {
    pub t_deg: u32,
    pub max_level: u32,
    pub s_deg: u32,
    pub s_max_index: u32,
    pub genus_max: u32,
    pub q_max: u32,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { t_deg: 2, max_level: 6, s_deg: 2, s_max_index: 4, genus_max: 2, q_max: 2 }
    }
}

impl Truncation {
    pub fn meet(&self, o: &Truncation) -> Truncation {
        Truncation {
            t_deg: self.t_deg.min(o.t_deg),
            max_level: self.max_level.min(o.max_level),
            s_deg: self.s_deg.min(o.s_deg),
            s_max_index: self.s_max_index.min(o.s_max_index),
            genus_max: self.genus_max.min(o.genus_max),
            q_max: self.q_max.min(o.q_max),
        }
    }

    pub fn hbar_max(&self) -> i32 {
        2 * self.genus_max as i32 - 2
    }

    pub fn admits(&self, m: &Monomial) -> bool {
        let (mut td, mut sd) = (0u32, 0u32);
        for &(v, e) in m.factors() {
            match v {
                VarId::T { level, .. } => {
                    if level > self.max_level || e < 0 {
                        return false;
                    }
                    td += e as u32;
                }
                VarId::S(k) => {
                    if k > self.s_max_index || e < 0 {
                        return false;
                    }
                    sd += e as u32;
                }
                VarId::Hbar => {
                    if e < -2 || e > self.hbar_max() {
                        return false;
                    }
                }
                VarId::Q => {
                    if e < 0 || e as u32 > self.q_max {
                        return false;
                    }
                }
            }
        }
        td <= self.t_deg && sd <= self.s_deg
    }
}

/// `t~ = t - delta`: the variable together with its constant shift.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    pub var: VarId,
    pub constant: Rat,
}

/// `t~_n^alpha = t_n^alpha - delta_{n,1} delta_{alpha,1}`.
pub fn dilaton_shift(v: VarId) -> Affine {
    let constant = match v {
        VarId::T { level: 1, alpha: 0 } => -Rat::one(),
        VarId::T { .. } => Rat::zero(),
        other => panic!("dilaton shift of non-t variable {other}"),
    };
    Affine { var: v, constant }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    terms: HashMap<Monomial, Rat>,
    trunc: Truncation,
}

impl Series {
    pub fn zero(trunc: Truncation) -> Self {
        Series { terms: HashMap::new(), trunc }
    }

    pub fn constant(c: Rat, trunc: Truncation) -> Self {
        let mut s = Self::zero(trunc);
        s.add_term(Monomial::one(), c);
        s
    }

    pub fn monomial(m: Monomial, c: Rat, trunc: Truncation) -> Self {
        let mut s = Self::zero(trunc);
        s.add_term(m, c);
        s
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rat)>, trunc: Truncation) -> Self {
        let mut s = Self::zero(trunc);
        for (m, c) in terms {
            s.add_term(m, c);
        }
        s
    }

    pub fn truncation(&self) -> Truncation {
        self.trunc
    }

    /// Adds `c * m`, dropping it if outside the truncation.
    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() || !self.trunc.admits(&m) {
            return;
        }
        use std::collections::hash_map::Entry;
        match self.terms.entry(m) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    /// Terms sorted by monomial.
    pub fn sorted_terms(&self) -> Vec<(Monomial, Rat)> {
        let mut v: Vec<_> = self.terms.iter().map(|(m, c)| (m.clone(), c.clone())).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    pub fn coefficient_of(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn truncate(&self, trunc: Truncation) -> Series {
        let trunc = self.trunc.meet(&trunc);
        Series::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), c.clone())), trunc)
    }

    pub fn scale(&self, c: &Rat) -> Series {
        if c.is_zero() {
            return Series::zero(self.trunc);
        }
        Series {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
            trunc: self.trunc,
        }
    }

    pub fn add(&self, o: &Series) -> Series {
        let mut out = self.truncate(o.trunc);
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Series) -> Series {
        self.add(&o.scale(&-Rat::one()))
    }

    /// Strict addition: errors unless both operands carry the same truncation.
    pub fn try_add(&self, o: &Series) -> Result<Series, FockError> {
        if self.trunc != o.trunc {
            return Err(FockError::Truncation);
        }
        Ok(self.add(o))
    }

    pub fn add_assign(&mut self, o: &Series) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, o: &Series, c: &Rat) {
        if c.is_zero() {
            return;
        }
        for (m, a) in &o.terms {
            self.add_term(m.clone(), a * c);
        }
    }

    pub fn mul(&self, o: &Series) -> Series {
        let trunc = self.trunc.meet(&o.trunc);
        let mut out = Series::zero(trunc);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// Multiplies every term by `c * m`.
    pub fn mul_monomial(&self, m: &Monomial, c: &Rat) -> Series {
        let mut out = Series::zero(self.trunc);
        for (ma, ca) in &self.terms {
            out.add_term(ma.mul(m), ca * c);
        }
        out
    }

    /// Partial derivative in a t or s variable.
    pub fn derive(&self, v: VarId) -> Series {
        let mut out = Series::zero(self.trunc);
        for (m, c) in &self.terms {
            if let Some((e, rest)) = m.derive(v) {
                out.add_term(rest, c * int(e as i64));
            }
        }
        out
    }

    /// Sets `v = 0`.
    pub fn at_zero(&self, v: VarId) -> Series {
        let mut out = Series::zero(self.trunc);
        for (m, c) in &self.terms {
            if m.exp(v) == 0 {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// Keeps only terms with the given hbar exponent and removes hbar.
    pub fn hbar_slice(&self, e: i32) -> Series {
        let mut out = Series::zero(self.trunc);
        for (m, c) in &self.terms {
            let (he, rest) = m.take(VarId::Hbar);
            if he == e {
                out.add_term(rest, c.clone());
            }
        }
        out
    }

    pub fn filter(&self, pred: impl Fn(&Monomial) -> bool) -> Series {
        Series {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| pred(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
            trunc: self.trunc,
        }
    }

    pub fn to_text(&self) -> String {
        self.sorted_terms()
            .iter()
            .map(|(m, c)| format!("{m}; {}\n", fmt_rat(c)))
            .collect()
    }

    pub fn from_text(text: &str, trunc: Truncation) -> Result<Series, FockError> {
        let mut s = Series::zero(trunc);
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (m, c) = line.split_once(';').ok_or_else(|| FockError::Parse(line.into()))?;
            let c = parse_rat(c).map_err(|_| FockError::Parse(line.into()))?;
            s.add_term(Monomial::parse(m)?, c);
        }
        Ok(s)
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .sorted_terms()
            .iter()
            .map(|(m, c)| format!("({})*{m}", fmt_rat(c)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use proptest::prelude::*;

    fn tr(d: u32) -> Truncation {
        Truncation { t_deg: d, ..Default::default() }
    }

    #[test]
    fn multiplication_and_truncation() {
        let a = Series::monomial(Monomial::var(t(0, 0)), int(1), tr(2));
        let sq = a.mul(&a);
        assert_eq!(sq.coefficient_of(&Monomial::pow(t(0, 0), 2)), int(1));
        let b = Series::monomial(Monomial::pow(t(0, 0), 2), int(1), tr(2));
        assert!(b.mul(&b).is_zero());
        assert_eq!(Series::zero(tr(2)).coefficient_of(&Monomial::var(t(3, 1))), int(0));
    }

    #[test]
    fn strict_add() {
        let a = Series::constant(int(1), tr(2));
        let b = Series::constant(int(1), tr(3));
        assert_eq!(a.try_add(&b), Err(FockError::Truncation));
        assert_eq!(a.add(&b).truncation(), tr(2));
        assert!(a.try_add(&a.scale(&int(-1))).unwrap().is_zero());
    }

    #[test]
    fn dilaton() {
        assert_eq!(dilaton_shift(t(1, 0)).constant, int(-1));
        assert_eq!(dilaton_shift(t(0, 0)).constant, int(0));
        assert_eq!(dilaton_shift(t(3, 1)).constant, int(0));
    }

    #[test]
    fn text_roundtrip() {
        let m = Monomial::from_pairs([(t(2, 1), 2), (VarId::S(1), 1), (VarId::Hbar, -2), (VarId::Q, 1)]);
        assert_eq!(m.to_string(), "t2_2^2*s1*hbar^-2*q");
        assert_eq!(Monomial::parse(&m.to_string()).unwrap(), m);
        let s = Series::from_terms([(m, rat(-3, 7)), (Monomial::one(), int(2))], tr(3));
        assert_eq!(Series::from_text(&s.to_text(), tr(3)).unwrap(), s);
        assert!(Monomial::parse("t0_1").is_err());
    }

    #[test]
    fn derivative() {
        let m = Monomial::from_pairs([(t(0, 0), 3), (t(1, 0), 1)]);
        let s = Series::monomial(m, int(1), tr(4));
        let d = s.derive(t(0, 0));
        assert_eq!(d.coefficient_of(&Monomial::from_pairs([(t(0, 0), 2), (t(1, 0), 1)])), int(3));
    }

    fn arb_series() -> impl Strategy<Value = Series> {
        let var = prop_oneof![
            (0u32..3, 0usize..2).prop_map(|(l, a)| t(l, a)),
            (1u32..3).prop_map(VarId::S),
            Just(VarId::Q),
        ];
        let mono = proptest::collection::vec((var, 1i32..3), 0..3).prop_map(Monomial::from_pairs);
        proptest::collection::vec((mono, -5i64..5), 0..5).prop_map(|v| {
            Series::from_terms(
                v.into_iter().map(|(m, c)| (m, int(c))),
                Truncation { t_deg: 3, max_level: 6, s_deg: 3, s_max_index: 4, genus_max: 2, q_max: 3 },
            )
        })
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_series(), b in arb_series(), c in arb_series()) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
        }

        #[test]
        fn truncate_homomorphism(a in arb_series(), b in arb_series()) {
            let small = Truncation { t_deg: 2, max_level: 1, s_deg: 1, s_max_index: 4, genus_max: 2, q_max: 1 };
            let lhs = a.mul(&b).truncate(small);
            let rhs = a.truncate(small).mul(&b.truncate(small));
            prop_assert_eq!(&lhs, &rhs);
            prop_assert_eq!(lhs.truncate(small), lhs);
        }
    }
}
