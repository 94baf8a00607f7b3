//! Vector fields on the big phase space: `tau_+`, `T`, `Q`, the Euler,
//! dilaton and `L_0` fields, and evaluation of `<<W_1 .. W_k>>_g`.

mod identities;

pub use identities::{identity_suite, IdentityResidue};

use crate::correlators::{CorrError, HodgePotential, Oracle};
use crate::diffop::PotentialSource;
use crate::exactnum::{int, Rat};
use crate::fock::{dilaton_shift, t, Monomial, Series, Truncation, VarId};
use crate::model::TargetModel;
use num::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// `sum f_{n,a}(t) tau_n(phi_a)` with truncated series coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    terms: BTreeMap<(u32, usize), Series>,
    trunc: Truncation,
}

impl VectorField {
    pub fn zero(trunc: Truncation) -> Self {
        VectorField { terms: BTreeMap::new(), trunc }
    }

    /// `tau_k(phi_a)`.
    pub fn basis(k: u32, a: usize, trunc: Truncation) -> Self {
        let mut w = Self::zero(trunc);
        w.add_term(k as i64, a, Series::constant(Rat::one(), trunc));
        w
    }

    /// `tau_k(v)` for a cohomology class given by its coordinates.
    pub fn of_class(k: i64, class: &[Rat], trunc: Truncation) -> Self {
        let mut w = Self::zero(trunc);
        for (a, c) in class.iter().enumerate() {
            w.add_term(k, a, Series::constant(c.clone(), trunc));
        }
        w
    }

    /// `tau_k(phi^a)`.
    pub fn dual_basis(m: &TargetModel, k: u32, a: usize, trunc: Truncation) -> Self {
        Self::of_class(k as i64, &dual_class(m, a), trunc)
    }

    pub fn truncation(&self) -> Truncation {
        self.trunc
    }

    /// Adds `f tau_level(phi_a)`; negative levels are the zero field.
    pub fn add_term(&mut self, level: i64, a: usize, f: Series) {
        if level < 0 || f.is_zero() {
            return;
        }
        let key = (level as u32, a);
        let merged = match self.terms.remove(&key) {
            Some(old) => old.add(&f),
            None => f.truncate(self.trunc),
        };
        if !merged.is_zero() {
            self.terms.insert(key, merged);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, k: u32, a: usize) -> Series {
        self.terms.get(&(k, a)).cloned().unwrap_or_else(|| Series::zero(self.trunc))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u32, usize), &Series)> {
        self.terms.iter()
    }

    pub fn add(&self, o: &VectorField) -> VectorField {
        let mut out = self.clone();
        for (&(k, a), f) in &o.terms {
            out.add_term(k as i64, a, f.clone());
        }
        out
    }

    pub fn sub(&self, o: &VectorField) -> VectorField {
        self.add(&o.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> VectorField {
        let mut out = Self::zero(self.trunc);
        for (&(k, a), f) in &self.terms {
            out.add_term(k as i64, a, f.scale(c));
        }
        out
    }

    pub fn mul_series(&self, s: &Series) -> VectorField {
        let mut out = Self::zero(self.trunc);
        for (&(k, a), f) in &self.terms {
            out.add_term(k as i64, a, f.mul(s));
        }
        out
    }

    /// Value at `t = 0` (and `q = 0`).
    pub fn at_origin(&self) -> BTreeMap<(u32, usize), Rat> {
        self.terms
            .iter()
            .map(|(&key, f)| (key, f.coefficient_of(&Monomial::one())))
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(k, a), s)| format!("({s}) tau_{k}(phi_{})", a + 1))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Coordinates of `phi^a`.
pub fn dual_class(m: &TargetModel, a: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); m.n];
    for (b, c) in m.dual(a) {
        v[b] = c;
    }
    v
}

/// Coordinates of `c_1 ∪ v`.
pub fn c1_cup(m: &TargetModel, v: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); m.n];
    for (a, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (b, cc) in m.c1_times(a) {
            out[b] += c * cc;
        }
    }
    out
}

/// Coordinates of `c_1^j ∪ v`.
pub fn c1_power_cup(m: &TargetModel, j: u32, v: &[Rat]) -> Vec<Rat> {
    (0..j).fold(v.to_vec(), |acc, _| c1_cup(m, &acc))
}

pub fn unit_class(m: &TargetModel, a: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); m.n];
    v[a] = Rat::one();
    v
}

/// `int_X u ∪ v`.
pub fn pairing(m: &TargetModel, u: &[Rat], v: &[Rat]) -> Rat {
    let mut acc = Rat::zero();
    for a in 0..m.n {
        for b in 0..m.n {
            if !u[a].is_zero() && !v[b].is_zero() {
                acc += &u[a] * &v[b] * &m.eta[a][b];
            }
        }
    }
    acc
}

/// `t~_k^a` as a series.
pub fn t_tilde(k: u32, a: usize, trunc: Truncation) -> Series {
    let v = t(k, a);
    let mut s = Series::monomial(Monomial::var(v), Rat::one(), trunc);
    s.add_term(Monomial::one(), dilaton_shift(v).constant);
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shift {
    Plus,
    Minus,
}

/// `tau_+^k` or `tau_-^k`; fields pushed below level 0 vanish.
pub fn tau_shift(w: &VectorField, dir: Shift, k: u32) -> VectorField {
    let mut out = VectorField::zero(w.trunc);
    for (&(n, a), f) in &w.terms {
        let lvl = match dir {
            Shift::Plus => n as i64 + k as i64,
            Shift::Minus => n as i64 - k as i64,
        };
        out.add_term(lvl, a, f.clone());
    }
    out
}

/// `Q(W) = sum f_{n,a} ((n + b_a) tau_n(phi_a) + tau_{n-1}(c_1 ∪ phi_a))`.
pub fn q_op(m: &TargetModel, w: &VectorField) -> VectorField {
    let mut out = VectorField::zero(w.trunc);
    for (&(n, a), f) in &w.terms {
        out.add_term(n as i64, a, f.scale(&(int(n as i64) + m.b_lower(a))));
        for (b, c) in m.c1_times(a) {
            out.add_term(n as i64 - 1, b, f.scale(&c));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Special {
    Euler,
    Dilaton,
    L0,
}

/// The Euler field `X`, the dilaton field `D` and the field `L_0`, with levels
/// up to the truncation's `max_level` (higher `t~` vanish in the quotient).
pub fn special_field(m: &TargetModel, which: Special, trunc: Truncation) -> VectorField {
    let b1 = m.b_lower(0);
    let mut w = VectorField::zero(trunc);
    for n in 0..=trunc.max_level {
        for a in 0..m.n {
            let tt = t_tilde(n, a, trunc);
            let ba = m.b_lower(a);
            let (diag, shift) = match which {
                Special::Euler => (-(int(n as i64) + &ba - &b1 - Rat::one()), -Rat::one()),
                Special::Dilaton => (-Rat::one(), Rat::zero()),
                Special::L0 => (int(n as i64) + &ba, Rat::one()),
            };
            w.add_term(n as i64, a, tt.scale(&diag));
            if !shift.is_zero() {
                for (b, c) in m.c1_times(a) {
                    w.add_term(n as i64 - 1, b, tt.scale(&(&c * &shift)));
                }
            }
        }
    }
    w
}

/// `pi(tau_n(phi_a)) = delta_{n,0} phi_a`, as small-phase-space coordinates.
pub fn pi(w: &VectorField) -> Vec<Series> {
    let n = w.terms.keys().map(|&(_, a)| a + 1).max().unwrap_or(0);
    let mut out = vec![Series::zero(w.trunc); n];
    for (&(k, a), f) in &w.terms {
        if k == 0 {
            out[a] = out[a].add(f);
        }
    }
    out
}

/// Brackets `<<...>>_g` over one oracle at a fixed truncation.
pub struct BigPhase<'a> {
    oracle: &'a Oracle,
    pot: HodgePotential<'a>,
    trunc: Truncation,
}

impl<'a> BigPhase<'a> {
    /// Descendant brackets only: the `s` directions are truncated away.
    pub fn new(oracle: &'a Oracle, trunc: Truncation) -> Self {
        let trunc = Truncation { s_deg: 0, ..trunc };
        BigPhase { oracle, pot: HodgePotential::new(oracle, trunc.genus_max), trunc }
    }

    pub fn model(&self) -> &TargetModel {
        &self.oracle.model
    }

    pub fn trunc(&self) -> Truncation {
        self.trunc
    }

    pub fn genus_max(&self) -> u32 {
        self.pot.genus_max()
    }

    /// `F_g`.
    pub fn potential(&self, g: u32) -> Result<Series, CorrError> {
        self.pot.derivative(g, &[], &self.trunc)
    }

    /// `<<tau_{k_1}(phi_{a_1}) ..>>_g`; negative levels give zero.
    pub fn bb(&self, g: i64, ins: &[(i64, usize)]) -> Result<Series, CorrError> {
        if g < 0 || ins.iter().any(|&(k, _)| k < 0) {
            return Ok(Series::zero(self.trunc));
        }
        let dirs: Vec<VarId> = ins.iter().map(|&(k, a)| t(k as u32, a)).collect();
        self.pot.derivative(g as u32, &dirs, &self.trunc)
    }

    /// `<<tau_k(u) ..>>_g` with classes given by coordinates.
    pub fn bb_classes(&self, g: i64, ins: &[(i64, &[Rat])]) -> Result<Series, CorrError> {
        let fields: Vec<VectorField> = ins.iter().map(|(k, v)| VectorField::of_class(*k, v, self.trunc)).collect();
        let refs: Vec<&VectorField> = fields.iter().collect();
        self.bracket(g, &refs)
    }

    /// `<<W_1 .. W_k>>_g`, multilinear in the fields.
    pub fn bracket(&self, g: i64, fields: &[&VectorField]) -> Result<Series, CorrError> {
        let mut out = Series::zero(self.trunc);
        if g < 0 {
            return Ok(out);
        }
        let lists: Vec<Vec<(&(u32, usize), &Series)>> = fields.iter().map(|w| w.iter().collect()).collect();
        if lists.iter().any(|l| l.is_empty()) {
            return Ok(out);
        }
        let mut idx = vec![0usize; lists.len()];
        loop {
            let mut coeff = Series::constant(Rat::one(), self.trunc);
            let mut ins = Vec::with_capacity(lists.len());
            for (l, &i) in lists.iter().zip(&idx) {
                let (&(k, a), f) = l[i];
                coeff = coeff.mul(f);
                ins.push((k as i64, a));
            }
            if !coeff.is_zero() {
                out.add_assign(&coeff.mul(&self.bb(g, &ins)?));
            }
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    return Ok(out);
                }
                idx[pos] += 1;
                if idx[pos] < lists[pos].len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    /// `T(W) = tau_+(W) - sum_a <<W phi^a>>_0 phi_a`.
    pub fn t_op(&self, w: &VectorField) -> Result<VectorField, CorrError> {
        let m = self.model();
        let mut out = tau_shift(w, Shift::Plus, 1);
        for a in 0..m.n {
            let dual = VectorField::dual_basis(m, 0, a, self.trunc);
            let c = self.bracket(0, &[w, &dual])?;
            out.add_term(0, a, c.scale(&-Rat::one()));
        }
        Ok(out)
    }

    pub fn t_pow(&self, w: &VectorField, k: u32) -> Result<VectorField, CorrError> {
        let mut acc = w.clone();
        for _ in 0..k {
            acc = self.t_op(&acc)?;
        }
        Ok(acc)
    }

    /// `A ∙ B = sum_a <<A B phi^a>>_0 phi_a`.
    pub fn quantum_product(&self, a: &VectorField, b: &VectorField) -> Result<VectorField, CorrError> {
        let m = self.model();
        let mut out = VectorField::zero(self.trunc);
        for c in 0..m.n {
            let dual = VectorField::dual_basis(m, 0, c, self.trunc);
            out.add_term(0, c, self.bracket(0, &[a, b, &dual])?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn tr() -> Truncation {
        Truncation { t_deg: 2, max_level: 6, genus_max: 2, q_max: 2, ..Default::default() }
    }

    #[test]
    fn tau_shifts() {
        let w = VectorField::basis(0, 0, tr());
        assert_eq!(tau_shift(&w, Shift::Plus, 1), VectorField::basis(1, 0, tr()));
        assert!(tau_shift(&w, Shift::Minus, 1).is_zero());
        let three = tau_shift(&tau_shift(&tau_shift(&w, Shift::Plus, 1), Shift::Plus, 1), Shift::Plus, 1);
        assert_eq!(tau_shift(&w, Shift::Plus, 3), three);
    }

    #[test]
    fn q_examples() {
        let pt = TargetModel::point();
        for n in 0..4 {
            let w = VectorField::basis(n, 0, tr());
            assert_eq!(q_op(&pt, &w), w.scale(&(int(n as i64) + rat(1, 2))));
        }
        let p1 = TargetModel::p1();
        assert!(q_op(&p1, &VectorField::basis(0, 0, tr())).is_zero());
        let want = VectorField::basis(1, 0, tr()).add(&VectorField::basis(0, 1, tr()).scale(&int(2)));
        assert_eq!(q_op(&p1, &VectorField::basis(1, 0, tr())), want);
    }

    #[test]
    fn special_fields_at_origin() {
        let pt = TargetModel::point();
        let d = special_field(&pt, Special::Dilaton, tr()).at_origin();
        assert_eq!(d, BTreeMap::from([((1, 0), int(1))]));
        assert!(special_field(&pt, Special::Euler, tr()).at_origin().is_empty());
        let p1 = TargetModel::p1();
        let l0 = special_field(&p1, Special::L0, tr()).at_origin();
        assert_eq!(l0, BTreeMap::from([((0, 1), int(-2)), ((1, 0), int(-1))]));
    }

    #[test]
    fn t_of_tau0_on_point() {
        let o = Oracle::new(TargetModel::point(), 0);
        let bp = BigPhase::new(&o, tr());
        let w = bp.t_op(&VectorField::basis(0, 0, tr())).unwrap();
        assert_eq!(w.at_origin(), BTreeMap::from([((1, 0), int(1))]));
        assert!(bp.t_op(&VectorField::zero(tr())).unwrap().is_zero());
    }

    #[test]
    fn pi_keeps_level_zero() {
        let w = VectorField::basis(0, 1, tr()).add(&VectorField::basis(2, 0, tr()));
        let p = pi(&w);
        assert_eq!(p.len(), 2);
        assert!(p[0].is_zero());
        assert_eq!(p[1], Series::constant(int(1), tr()));
    }
}
