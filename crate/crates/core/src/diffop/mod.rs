//! Normal-ordered differential operators on the Fock ring.
//!
//! A term is `coeff * monomial * d_{v_1} ... d_{v_k}` where the monomial may
//! contain `t`, `s`, `hbar` and `q`, and the derivative multiset is over `t`
//! and `s` variables. Monomials are written in the shifted coordinates
//! `t~ = t - delta_{n,1} delta_{alpha,1}`; since `d/dt~ = d/dt`, composition does
//! not see the shift. It is applied only when acting on potentials.

mod action;
mod build;
mod quantize;

pub use action::{connected_action, PotentialSource};
pub use build::*;
pub use quantize::*;

use crate::exactnum::{fmt_rat, int, Rat};
use crate::fock::{Monomial, VarId};
use num::{One, Zero};
use std::collections::HashMap;

/// Sorted multiset of derivative variables.
pub type Derivs = Vec<VarId>;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiffOp {
    terms: HashMap<(Monomial, Derivs), Rat>,
}

/// Largest t-level appearing in a term, in either factor.
pub fn term_level(m: &Monomial, d: &[VarId]) -> u32 {
    let dl = d
        .iter()
        .filter_map(|v| match v {
            VarId::T { level, .. } => Some(*level),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    dl.max(m.max_level().unwrap_or(0))
}

/// Falling-factorial coefficient of `d^k x^e`.
fn falling(e: i32, k: i32) -> Rat {
    (0..k).fold(Rat::one(), |acc, i| acc * int((e - i) as i64))
}

fn binom_small(n: usize, k: usize) -> Rat {
    Rat::from_integer(crate::exactnum::binomial(n as i64, k as i64))
}

/// Groups a sorted derivative list into `(var, multiplicity)`.
fn grouped(d: &[VarId]) -> Vec<(VarId, usize)> {
    let mut out: Vec<(VarId, usize)> = Vec::new();
    for v in d {
        match out.last_mut() {
            Some((w, c)) if w == v => *c += 1,
            _ => out.push((*v, 1)),
        }
    }
    out
}

impl DiffOp {
    pub fn zero() -> Self {
        DiffOp::default()
    }

    pub fn scalar(c: Rat) -> Self {
        let mut op = DiffOp::zero();
        op.add_term(Monomial::one(), vec![], c);
        op
    }

    pub fn identity() -> Self {
        Self::scalar(Rat::one())
    }

    pub fn multiplication(m: Monomial, c: Rat) -> Self {
        let mut op = DiffOp::zero();
        op.add_term(m, vec![], c);
        op
    }

    pub fn derivative(v: VarId) -> Self {
        let mut op = DiffOp::zero();
        op.add_term(Monomial::one(), vec![v], Rat::one());
        op
    }

    pub fn add_term(&mut self, m: Monomial, mut d: Derivs, c: Rat) {
        if c.is_zero() {
            return;
        }
        d.sort();
        use std::collections::hash_map::Entry;
        match self.terms.entry((m, d)) {
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

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &Derivs, &Rat)> {
        self.terms.iter().map(|((m, d), c)| (m, d, c))
    }

    pub fn coefficient(&self, m: &Monomial, d: &[VarId]) -> Rat {
        let mut d = d.to_vec();
        d.sort();
        self.terms.get(&(m.clone(), d)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn sorted_terms(&self) -> Vec<(Monomial, Derivs, Rat)> {
        let mut v: Vec<_> = self
            .terms
            .iter()
            .map(|((m, d), c)| (m.clone(), d.clone(), c.clone()))
            .collect();
        v.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        v
    }

    pub fn scale(&self, c: &Rat) -> DiffOp {
        let mut out = DiffOp::zero();
        for ((m, d), a) in &self.terms {
            out.add_term(m.clone(), d.clone(), a * c);
        }
        out
    }

    pub fn add_assign_scaled(&mut self, o: &DiffOp, c: &Rat) {
        for ((m, d), a) in &o.terms {
            self.add_term(m.clone(), d.clone(), a * c);
        }
    }

    pub fn add(&self, o: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        out.add_assign_scaled(o, &Rat::one());
        out
    }

    pub fn sub(&self, o: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        out.add_assign_scaled(o, &-Rat::one());
        out
    }

    /// Multiplies every term on the left by `c * m`.
    pub fn mul_monomial(&self, m: &Monomial, c: &Rat) -> DiffOp {
        let mut out = DiffOp::zero();
        for ((mm, d), a) in &self.terms {
            out.add_term(m.mul(mm), d.clone(), a * c);
        }
        out
    }

    pub fn filter(&self, pred: impl Fn(&Monomial, &Derivs) -> bool) -> DiffOp {
        DiffOp {
            terms: self
                .terms
                .iter()
                .filter(|((m, d), _)| pred(m, d))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Terms whose every t-level is at most `level` and s-degree at most `s_deg`.
    pub fn window(&self, level: u32, s_deg: i32) -> DiffOp {
        self.filter(|m, d| term_level(m, d) <= level && m.s_degree() <= s_deg)
    }

    pub fn max_derivs(&self) -> usize {
        self.terms.keys().map(|(_, d)| d.len()).max().unwrap_or(0)
    }

    pub fn hbar_exponents_even(&self) -> bool {
        self.terms.keys().all(|(m, _)| m.hbar() % 2 == 0)
    }

    /// The part of `A o B` in which at least one derivative of `A` hits `B`'s
    /// monomial. Pairs whose combined s-degree exceeds `s_cap` are skipped.
    fn contractions(a: &DiffOp, b: &DiffOp, s_cap: Option<i32>) -> DiffOp {
        let mut index: HashMap<VarId, Vec<usize>> = HashMap::new();
        let bterms: Vec<(&Monomial, &Derivs, &Rat)> = b.iter().collect();
        for (i, (m, _, _)) in bterms.iter().enumerate() {
            for (v, _) in m.factors() {
                if v.is_t() || v.is_s() {
                    index.entry(*v).or_default().push(i);
                }
            }
        }
        let mut out = DiffOp::zero();
        let mut seen: Vec<usize> = Vec::new();
        for ((ma, da), ca) in &a.terms {
            if da.is_empty() {
                continue;
            }
            let groups = grouped(da);
            seen.clear();
            for (v, _) in &groups {
                if let Some(ix) = index.get(v) {
                    seen.extend_from_slice(ix);
                }
            }
            seen.sort_unstable();
            seen.dedup();
            let sa = ma.s_degree();
            for &i in &seen {
                let (mb, db, cb) = bterms[i];
                if let Some(cap) = s_cap {
                    if sa + mb.s_degree() > cap {
                        continue;
                    }
                }
                // Enumerate sub-multisets E of da, E != empty.
                let ranges: Vec<usize> = groups
                    .iter()
                    .map(|(v, k)| (*k).min(mb.exp(*v).max(0) as usize))
                    .collect();
                let mut choice = vec![0usize; groups.len()];
                loop {
                    // advance odometer
                    let mut pos = 0;
                    loop {
                        if pos == groups.len() {
                            break;
                        }
                        if choice[pos] < ranges[pos] {
                            choice[pos] += 1;
                            break;
                        }
                        choice[pos] = 0;
                        pos += 1;
                    }
                    if pos == groups.len() {
                        break;
                    }
                    let mut coeff = ca * cb;
                    let mut mono = mb.clone();
                    let mut rest: Derivs = Vec::new();
                    for (gi, (v, k)) in groups.iter().enumerate() {
                        let e = choice[gi];
                        if e > 0 {
                            coeff *= binom_small(*k, e) * falling(mono.exp(*v), e as i32);
                            mono = mono.mul(&Monomial::pow(*v, -(e as i32)));
                        }
                        for _ in e..*k {
                            rest.push(*v);
                        }
                    }
                    rest.extend_from_slice(db);
                    out.add_term(ma.mul(&mono), rest, coeff);
                }
            }
        }
        out
    }

    /// Normal-ordered product `A o B`.
    pub fn compose(&self, o: &DiffOp) -> DiffOp {
        let mut out = Self::contractions(self, o, None);
        for ((ma, da), ca) in &self.terms {
            for ((mb, db), cb) in &o.terms {
                let mut d = da.clone();
                d.extend_from_slice(db);
                out.add_term(ma.mul(mb), d, ca * cb);
            }
        }
        out
    }

    pub fn commutator(&self, o: &DiffOp) -> DiffOp {
        self.commutator_capped(o, None)
    }

    /// `[A, B]`, dropping products whose s-degree would exceed `s_cap`.
    pub fn commutator_capped(&self, o: &DiffOp, s_cap: Option<i32>) -> DiffOp {
        let mut out = Self::contractions(self, o, s_cap);
        out.add_assign_scaled(&Self::contractions(o, self, s_cap), &-Rat::one());
        out
    }

    /// One term per line: `coeff | monomial | derivs`.
    pub fn dump(&self) -> String {
        self.sorted_terms()
            .iter()
            .map(|(m, d, c)| {
                let ds: Vec<String> = d.iter().map(|v| format!("d{v}")).collect();
                format!("{} | {} | {}\n", fmt_rat(c), m, if ds.is_empty() { "1".into() } else { ds.join("*") })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::t;

    fn t0() -> VarId {
        t(0, 0)
    }

    #[test]
    fn leibniz() {
        let d = DiffOp::derivative(t0());
        let x = DiffOp::multiplication(Monomial::var(t0()), int(1));
        let mut want = DiffOp::zero();
        want.add_term(Monomial::var(t0()), vec![t0()], int(1));
        want.add_term(Monomial::one(), vec![], int(1));
        assert_eq!(d.compose(&x), want);
        assert_eq!(d.commutator(&x), DiffOp::identity());
        assert_eq!(DiffOp::identity().compose(&want), want);
        assert!(want.commutator(&want).is_zero());
    }

    #[test]
    fn leibniz_with_hbar() {
        let d = DiffOp::derivative(t0());
        let q = Monomial::from_pairs([(t0(), 2), (VarId::Hbar, -2)]);
        let x = DiffOp::multiplication(q.clone(), crate::exactnum::rat(1, 2));
        let got = d.compose(&x);
        assert_eq!(got.coefficient(&q, &[t0()]), crate::exactnum::rat(1, 2));
        let lin = Monomial::from_pairs([(t0(), 1), (VarId::Hbar, -2)]);
        assert_eq!(got.coefficient(&lin, &[]), int(1));
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn double_contraction() {
        // [d0 d0, t0^2] = 4 t0 d0 + 2
        let mut dd = DiffOp::zero();
        dd.add_term(Monomial::one(), vec![t0(), t0()], int(1));
        let sq = DiffOp::multiplication(Monomial::pow(t0(), 2), int(1));
        let c = dd.commutator(&sq);
        assert_eq!(c.coefficient(&Monomial::var(t0()), &[t0()]), int(4));
        assert_eq!(c.coefficient(&Monomial::one(), &[]), int(2));
        assert_eq!(c.len(), 2);
    }
}
