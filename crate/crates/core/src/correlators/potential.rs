//! Truncated derivatives of the genus-`g` Hodge potential.

use super::{CorrError, CorrelatorKey, Oracle};
use crate::diffop::PotentialSource;
use crate::exactnum::Rat;
use crate::fock::{t, Monomial, Series, Truncation, VarId};
use num::Zero;
use parking_lot::RwLock;
use std::collections::HashMap;

type CacheKey = (u32, Vec<VarId>, Truncation);

/// `F^E_g = <exp(sum t tau); exp(sum s_k ch_{2k-1})>_g`, read from an oracle.
pub struct HodgePotential<'a> {
    oracle: &'a Oracle,
    genus_max: u32,
    cache: RwLock<HashMap<CacheKey, Series>>,
}

/// Multisets of size at most `deg` drawn from `vars`, as monomials.
fn monomials(vars: &[VarId], deg: u32) -> Vec<Monomial> {
    fn rec(vars: &[VarId], start: usize, left: u32, cur: Monomial, out: &mut Vec<Monomial>) {
        out.push(cur.clone());
        if left == 0 {
            return;
        }
        for i in start..vars.len() {
            rec(vars, i, left - 1, cur.mul(&Monomial::var(vars[i])), out);
        }
    }
    let mut out = Vec::new();
    rec(vars, 0, deg, Monomial::one(), &mut out);
    out
}

impl<'a> HodgePotential<'a> {
    pub fn new(oracle: &'a Oracle, genus_max: u32) -> Self {
        let genus_max = if oracle.model.has_novikov() { 0 } else { genus_max };
        HodgePotential { oracle, genus_max, cache: RwLock::new(HashMap::new()) }
    }

    pub fn oracle(&self) -> &Oracle {
        self.oracle
    }

    fn compute(&self, g: u32, dirs: &[VarId], trunc: &Truncation) -> Result<Series, CorrError> {
        let m = &self.oracle.model;
        let mut tdirs = Vec::new();
        let mut sdirs = Vec::new();
        for v in dirs {
            match *v {
                VarId::T { level, alpha } => tdirs.push((level, alpha as usize)),
                VarId::S(k) => sdirs.push(2 * k - 1),
                other => return Err(CorrError::Unsupported(format!("derivative in {other}"))),
            }
        }
        let tvars: Vec<VarId> = (0..=trunc.max_level)
            .flat_map(|l| (0..m.n).map(move |a| t(l, a)))
            .collect();
        let svars: Vec<VarId> = (1..=trunc.s_max_index).map(VarId::S).collect();
        let tms = monomials(&tvars, trunc.t_deg);
        let sms = monomials(&svars, trunc.s_deg);
        let mut out = Series::zero(*trunc);
        for tm in &tms {
            let mut ins = tdirs.clone();
            for v in tm.expand() {
                if let VarId::T { level, alpha } = v {
                    ins.push((level, alpha as usize));
                }
            }
            let n = ins.len() as i64;
            let deg: i64 = ins.iter().map(|&(k, a)| k as i64 + m.hol_deg[a]).sum();
            for sm in &sms {
                let mut hodge = sdirs.clone();
                for v in sm.expand() {
                    if let VarId::S(k) = v {
                        hodge.push(2 * k - 1);
                    }
                }
                let hdeg: i64 = hodge.iter().map(|&h| h as i64).sum();
                // solve the dimension rule for the curve degree
                let rhs0 = (1 - g as i64) * (m.d - 3) + n;
                let excess = deg + hdeg - rhs0;
                let d = match m.novikov {
                    None if excess == 0 => 0,
                    None => continue,
                    Some(c) => {
                        if excess < 0 || excess % c != 0 || excess / c > trunc.q_max as i64 {
                            continue;
                        }
                        (excess / c) as u32
                    }
                };
                let key = CorrelatorKey::new(&m.name, g, d, &ins, &hodge);
                let v = self.oracle.value(&key)?;
                if v.is_zero() {
                    continue;
                }
                let weight = tm.factorial_weight() * sm.factorial_weight();
                let mono = tm.mul(sm).mul(&Monomial::pow(VarId::Q, d as i32));
                out.add_term(mono, v / weight);
            }
        }
        Ok(out)
    }
}

impl PotentialSource for HodgePotential<'_> {
    fn derivative(&self, g: u32, dirs: &[VarId], trunc: &Truncation) -> Result<Series, CorrError> {
        let mut dirs = dirs.to_vec();
        dirs.sort();
        let key = (g, dirs, *trunc);
        if let Some(s) = self.cache.read().get(&key) {
            return Ok(s.clone());
        }
        let s = self.compute(g, &key.1, trunc)?;
        self.cache.write().insert(key, s.clone());
        Ok(s)
    }

    fn genus_max(&self) -> u32 {
        self.genus_max
    }
}

/// `<<tau_{k_1}(phi_{a_1}) ...>>_g` as a truncated series in `t` (and `q`).
pub fn double_bracket(o: &Oracle, g: u32, fields: &[(u32, usize)], trunc: &Truncation) -> Result<Series, CorrError> {
    let dirs: Vec<VarId> = fields.iter().map(|&(k, a)| t(k, a)).collect();
    let tr = Truncation { s_deg: 0, ..*trunc };
    HodgePotential::new(o, trunc.genus_max).derivative(g, &dirs, &tr)
}

/// Convenience: the coefficient of the empty monomial.
pub fn constant_term(s: &Series) -> Rat {
    s.coefficient_of(&Monomial::one())
}
