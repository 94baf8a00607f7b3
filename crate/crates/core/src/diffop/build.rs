use super::{term_level, DiffOp};
use crate::exactnum::{factorial_rat, hodge_weight, int, sign, Rat};
use crate::fock::{t, Monomial, VarId};
use crate::model::{ChernVariant, TargetModel};
use crate::symfun::{e_check, e_hat, iterated_delta};
use num::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OpError {
    #[error("operator index n = {0} is below -1")]
    IndexBelowMinusOne(i64),
}

/// Which terms a constructor emits. `mult` bounds levels of multiplication
/// variables, `deriv` bounds derivative levels (`None` = unbounded), `s_index`
/// bounds the `k` of the `s_k` that appear.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelCap {
    pub mult: u32,
    pub deriv: Option<u32>,
    pub s_index: u32,
}

impl LevelCap {
    /// Every level at most `c`. Only `s_k` with `2k - 1 <= c + 1` can reach
    /// such terms.
    pub fn uniform(c: u32) -> Self {
        LevelCap { mult: c, deriv: Some(c), s_index: c / 2 + 1 }
    }

    /// Multiplication levels at most `c`, derivatives unbounded. For action
    /// on potentials truncated at level `c`.
    pub fn mult_only(c: u32, s_index: u32) -> Self {
        LevelCap { mult: c, deriv: None, s_index }
    }

    fn deriv_ok(&self, level: i64) -> bool {
        level >= 0 && self.deriv.is_none_or(|d| level <= d as i64)
    }
}

fn w_k(k: u32) -> Rat {
    hodge_weight(k)
}

/// `L_{n;k_1..k_m}` without the `t_0 t_0` and constant terms: the
/// first-order and second-order parts with iterated differences applied.
pub fn ln_core(m: &TargetModel, n: i64, ks: &[u32], cap: &LevelCap) -> DiffOp {
    let shifts: Vec<i64> = ks.iter().map(|&k| 2 * k as i64 - 1).collect();
    let big_k: i64 = shifts.iter().sum();
    let mut op = DiffOp::zero();
    for j in 0..=(n + 1) {
        let mixed = m.chern_power(j as u32, ChernVariant::Mixed);
        let raised = m.chern_power(j as u32, ChernVariant::Raised);
        for a in 0..m.n {
            let eh = iterated_delta(&shifts, &e_hat(n + 1 - j, n, m, a));
            if !eh.is_zero() {
                for r in 0..=cap.mult as i64 {
                    let lvl = r + big_k + n - j;
                    if !cap.deriv_ok(lvl) {
                        continue;
                    }
                    let c = eh.eval_int(r);
                    if c.is_zero() {
                        continue;
                    }
                    for b in 0..m.n {
                        if mixed[a][b].is_zero() {
                            continue;
                        }
                        op.add_term(
                            Monomial::var(t(r as u32, a)),
                            vec![t(lvl as u32, b)],
                            &c * &mixed[a][b],
                        );
                    }
                }
            }
            let ec = iterated_delta(&shifts, &e_check(n + 1 - j, n, m, a));
            if ec.is_zero() {
                continue;
            }
            let top = big_k + n - j - 1;
            for s in 0..=top {
                let other = top - s;
                if !cap.deriv_ok(s) || !cap.deriv_ok(other) {
                    continue;
                }
                let c = ec.eval_int(-s - 1) * sign(s) * crate::exactnum::rat(-1, 2);
                if c.is_zero() {
                    continue;
                }
                for b in 0..m.n {
                    if raised[a][b].is_zero() {
                        continue;
                    }
                    op.add_term(
                        Monomial::pow(VarId::Hbar, 2),
                        vec![t(s as u32, a), t(other as u32, b)],
                        &c * &raised[a][b],
                    );
                }
            }
        }
    }
    op
}

/// `(1 / 2 hbar^2) sum (C^{n+1} eta)_{ab} t_0^a t_0^b`.
pub fn ln_quadratic(m: &TargetModel, n: i64) -> DiffOp {
    let low = m.chern_power((n + 1) as u32, ChernVariant::Lowered);
    let mut op = DiffOp::zero();
    for a in 0..m.n {
        for b in 0..m.n {
            if low[a][b].is_zero() {
                continue;
            }
            let mono = Monomial::from_pairs([(t(0, a), 1), (t(0, b), 1), (VarId::Hbar, -2)]);
            op.add_term(mono, vec![], &low[a][b] * crate::exactnum::rat(1, 2));
        }
    }
    op
}

fn check_n(n: i64) -> Result<(), OpError> {
    if n < -1 {
        Err(OpError::IndexBelowMinusOne(n))
    } else {
        Ok(())
    }
}

/// `L_{n;empty}`: `L_n` without its constant.
pub fn build_ln_bare(m: &TargetModel, n: i64, cap: &LevelCap) -> Result<DiffOp, OpError> {
    check_n(n)?;
    Ok(ln_core(m, n, &[], cap).add(&ln_quadratic(m, n)))
}

pub fn build_ln(m: &TargetModel, n: i64, cap: &LevelCap) -> Result<DiffOp, OpError> {
    let mut op = build_ln_bare(m, n, cap)?;
    if n == 0 {
        op.add_term(Monomial::one(), vec![], m.l0_constant());
    }
    Ok(op)
}

/// Nondecreasing tuples of length `len` with entries in `1..=kmax`.
pub fn multisets(len: usize, kmax: u32) -> Vec<Vec<u32>> {
    fn rec(len: usize, lo: u32, kmax: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for k in lo..=kmax {
            cur.push(k);
            rec(len, k, kmax, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(len, 1, kmax, &mut Vec::new(), &mut out);
    out
}

/// `prod_k (mult_k)!` for a sorted tuple.
pub fn aut(ks: &[u32]) -> Rat {
    let mut out = Rat::one();
    let mut i = 0;
    while i < ks.len() {
        let mut j = i;
        while j < ks.len() && ks[j] == ks[i] {
            j += 1;
        }
        out *= factorial_rat((j - i) as u64);
        i = j;
    }
    out
}

pub fn s_monomial(ks: &[u32]) -> Monomial {
    Monomial::from_pairs(ks.iter().map(|&k| (VarId::S(k), 1)))
}

/// Closed form of `L_n^E` through s-degree `s_cap`.
pub fn build_lne(m: &TargetModel, n: i64, s_cap: u32, cap: &LevelCap) -> Result<DiffOp, OpError> {
    let mut op = build_ln(m, n, cap)?;
    if n == -1 {
        if s_cap >= 1 && cap.s_index >= 1 {
            op.add_term(Monomial::var(VarId::S(1)), vec![], &m.cd_integral / int(24));
        }
        return Ok(op);
    }
    let mmax = (n + 1).min(s_cap as i64) as usize;
    for len in 1..=mmax {
        for ks in multisets(len, cap.s_index) {
            // sum over orderings of (-1)^m/m! prod w s = (-1)^m / aut * prod w s
            let mut c = sign(len as i64) / aut(&ks);
            for &k in &ks {
                c *= w_k(k);
            }
            if c.is_zero() {
                continue;
            }
            let core = ln_core(m, n, &ks, cap);
            op.add_assign_scaled(&core.mul_monomial(&s_monomial(&ks), &Rat::one()), &c);
        }
    }
    Ok(op)
}

/// Quantized `z^{2k-1}`:
/// `-sum t~_n^a d_{n+2k-1,a} + (hbar^2/2) sum_i (-1)^i eta^{ab} d_{i,a} d_{2k-2-i,b}`.
pub fn zhat(m: &TargetModel, k: u32, cap: &LevelCap) -> DiffOp {
    let shift = 2 * k as i64 - 1;
    let mut op = DiffOp::zero();
    for a in 0..m.n {
        for r in 0..=cap.mult as i64 {
            if cap.deriv_ok(r + shift) {
                op.add_term(Monomial::var(t(r as u32, a)), vec![t((r + shift) as u32, a)], -Rat::one());
            }
        }
    }
    let top = 2 * k as i64 - 2;
    for i in 0..=top {
        if !cap.deriv_ok(i) || !cap.deriv_ok(top - i) {
            continue;
        }
        for a in 0..m.n {
            for b in 0..m.n {
                let e = &m.eta_inv[a][b];
                if e.is_zero() {
                    continue;
                }
                op.add_term(
                    Monomial::pow(VarId::Hbar, 2),
                    vec![t(i as u32, a), t((top - i) as u32, b)],
                    e * sign(i) * crate::exactnum::rat(1, 2),
                );
            }
        }
    }
    op
}

/// `D_{2l-1} = -d/ds_l + (B_{2l}/(2l)!) zhat_l`.
pub fn build_fp(m: &TargetModel, l: u32, cap: &LevelCap) -> DiffOp {
    let mut op = zhat(m, l, cap).scale(&w_k(l));
    op.add_term(Monomial::one(), vec![VarId::S(l)], -Rat::one());
    op
}

/// `[..[L, zhat_{k_1}], .., zhat_{k_m}]`.
pub fn nested_bracket(m: &TargetModel, l: &DiffOp, ks: &[u32], cap: &LevelCap) -> DiffOp {
    let mut acc = l.clone();
    for &k in ks {
        acc = acc.commutator(&zhat(m, k, cap));
        acc = acc.filter(|mm, d| cap_admits(cap, mm, d));
    }
    acc
}

fn cap_admits(cap: &LevelCap, m: &Monomial, d: &[VarId]) -> bool {
    match cap.deriv {
        Some(c) => term_level(m, d) <= c.max(cap.mult),
        None => m.max_level().unwrap_or(0) <= cap.mult,
    }
}

/// `exp(Z) L_n exp(-Z)` with `Z = sum_k (B_{2k}/(2k)!) s_k zhat_k`, expanded
/// as `sum_j ad_Z^j(L_n) / j!` through s-degree `s_cap`.
pub fn bch_lne(m: &TargetModel, n: i64, s_cap: u32, cap: &LevelCap) -> Result<DiffOp, OpError> {
    let l = build_ln(m, n, cap)?;
    let mut z = DiffOp::zero();
    for k in 1..=cap.s_index {
        z.add_assign_scaled(&zhat(m, k, cap).mul_monomial(&Monomial::var(VarId::S(k)), &Rat::one()), &w_k(k));
    }
    let mut total = l.clone();
    let mut term = l;
    for j in 1..=s_cap {
        term = z
            .commutator_capped(&term, Some(s_cap as i32))
            .filter(|mm, d| cap_admits(cap, mm, d) && mm.s_degree() <= s_cap as i32);
        total.add_assign_scaled(&term, &(Rat::one() / factorial_rat(j as u64)));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn pt() -> TargetModel {
        TargetModel::point()
    }

    #[test]
    fn point_l0_constant() {
        let l0 = build_ln(&pt(), 0, &LevelCap::uniform(6)).unwrap();
        assert_eq!(l0.coefficient(&Monomial::one(), &[]), rat(1, 16));
        assert!(build_ln(&pt(), -2, &LevelCap::uniform(6)).is_err());
    }

    #[test]
    fn point_l_minus_one() {
        let cap = LevelCap::uniform(5);
        let l = build_ln(&pt(), -1, &cap).unwrap();
        let mut want = DiffOp::zero();
        for r in 1..=5 {
            want.add_term(Monomial::var(t(r, 0)), vec![t(r - 1, 0)], int(1));
        }
        want.add_term(Monomial::from_pairs([(t(0, 0), 2), (VarId::Hbar, -2)]), vec![], rat(1, 2));
        assert_eq!(l, want);
    }

    #[test]
    fn p1_l0_chern_term() {
        let l = build_ln(&TargetModel::p1(), 0, &LevelCap::uniform(4)).unwrap();
        assert_eq!(l.coefficient(&Monomial::var(t(1, 0)), &[t(0, 1)]), int(2));
        assert_eq!(l.coefficient(&Monomial::var(t(0, 0)), &[t(0, 1)]), int(0));
        let q = Monomial::from_pairs([(t(0, 0), 2), (VarId::Hbar, -2)]);
        assert_eq!(l.coefficient(&q, &[]), int(1));
    }

    #[test]
    fn lne_examples() {
        let cap = LevelCap::uniform(8);
        for m in [pt(), TargetModel::p1()] {
            let diff = build_lne(&m, -1, 2, &cap).unwrap().sub(&build_ln(&m, -1, &cap).unwrap());
            let mut want = DiffOp::zero();
            want.add_term(Monomial::var(VarId::S(1)), vec![], &m.euler / int(24));
            assert_eq!(diff, want);
            let l0 = build_lne(&m, 0, 2, &cap).unwrap();
            for k in 1..=3u32 {
                let sh = 2 * k - 1;
                for a in 0..m.n {
                    let mono = Monomial::from_pairs([(t(1, a), 1), (VarId::S(k), 1)]);
                    let want = -int(sh as i64) * hodge_weight(k);
                    assert_eq!(l0.coefficient(&mono, &[t(1 + sh, a)]), want);
                }
            }
        }
        let l1 = build_lne(&pt(), 1, 2, &cap).unwrap();
        for k in 1..=3u32 {
            for r in 0..3u32 {
                let mono = Monomial::from_pairs([(t(r, 0), 1), (VarId::S(k), 1)]);
                let want = -hodge_weight(k)
                    * int(2 * (2 * k as i64 - 1))
                    * (int(r as i64) + rat(1, 2) + int(k as i64));
                assert_eq!(l1.coefficient(&mono, &[t(r + 2 * k, 0)]), want);
            }
        }
    }

    #[test]
    fn fp_operator_shape() {
        let cap = LevelCap::uniform(6);
        let d1 = build_fp(&pt(), 1, &cap);
        assert_eq!(d1.coefficient(&Monomial::one(), &[VarId::S(1)]), int(-1));
        assert_eq!(d1.coefficient(&Monomial::var(t(2, 0)), &[t(3, 0)]), rat(-1, 12));
        assert_eq!(d1.coefficient(&Monomial::pow(VarId::Hbar, 2), &[t(0, 0), t(0, 0)]), rat(1, 24));
        let z2 = zhat(&pt(), 2, &cap);
        let h2 = Monomial::pow(VarId::Hbar, 2);
        assert_eq!(z2.coefficient(&h2, &[t(0, 0), t(2, 0)]), int(1));
        assert_eq!(z2.coefficient(&h2, &[t(1, 0), t(1, 0)]), rat(-1, 2));
    }

    #[test]
    fn constructors_even_hbar_and_two_derivs() {
        let cap = LevelCap::uniform(6);
        for m in [pt(), TargetModel::p1()] {
            for n in -1..=2 {
                let op = build_lne(&m, n, 2, &cap).unwrap();
                assert!(op.hbar_exponents_even());
                assert!(op.max_derivs() <= 2);
            }
        }
    }

    #[test]
    fn multiset_enumeration() {
        assert_eq!(multisets(2, 2), vec![vec![1, 1], vec![1, 2], vec![2, 2]]);
        assert_eq!(aut(&[1, 1, 2]), int(2));
    }
}
