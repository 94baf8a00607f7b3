//! `Psi^E_{g,n}` from the closed formula in terms of `F^E` and from the
//! action of `L_n^E` on the partition function.

use super::ConstraintError;
use crate::bigphase::t_tilde;
use crate::correlators::{HodgePotential, Oracle};
use crate::diffop::{aut, build_lne, connected_action, multisets, s_monomial, LevelCap, PotentialSource};
use crate::exactnum::{hodge_weight, int, rat, sign, Rat};
use crate::fock::{t, Monomial, Series, Truncation, VarId};
use crate::model::ChernVariant;
use crate::symfun::{e_check, e_hat, iterated_delta};
use num::{One, Zero};

/// Which `m` (number of `s` prefactors) to keep in the formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    All,
    /// `m = 0`: the plain operator acting on `F^E`.
    Plain,
    /// `m >= 1`: terms carrying `w_k s_k` prefactors.
    Shifted,
}

impl Part {
    fn keeps(self, m: usize) -> bool {
        match self {
            Part::All => true,
            Part::Plain => m == 0,
            Part::Shifted => m > 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsiRequest {
    pub genus: u32,
    pub n: i64,
    /// Sorted multiset of `k_i >= 1`.
    pub profile: Vec<u32>,
    pub trunc: Truncation,
}

impl PsiRequest {
    pub fn new(genus: u32, n: i64, profile: &[u32], trunc: Truncation) -> Self {
        let mut profile = profile.to_vec();
        profile.sort_unstable();
        PsiRequest { genus, n, profile, trunc }
    }

    /// Truncation whose `s` variables are exactly those the profile needs.
    fn s_trunc(&self) -> Truncation {
        Truncation {
            s_deg: self.profile.len() as u32,
            s_max_index: self.profile.last().copied().unwrap_or(0),
            ..self.trunc
        }
    }

    fn validate(&self, pot: &HodgePotential) -> Result<(), ConstraintError> {
        if self.n < -1 {
            return Err(ConstraintError::Unsupported(format!("n = {} < -1", self.n)));
        }
        if self.profile.contains(&0) {
            return Err(ConstraintError::Unsupported("profile entries must be >= 1".into()));
        }
        if self.genus > pot.genus_max() {
            return Err(ConstraintError::Unsupported(format!(
                "genus {} beyond oracle support (max {})",
                self.genus,
                pot.genus_max()
            )));
        }
        Ok(())
    }
}

/// The full `Psi^E_{g,n}(t, s)` within `trunc`, restricted to `part`.
pub fn psi_full(o: &Oracle, g: u32, n: i64, trunc: &Truncation, part: Part) -> Result<Series, ConstraintError> {
    let pot = HodgePotential::new(o, trunc.genus_max.max(g));
    PsiRequest::new(g, n, &[], *trunc).validate(&pot)?;
    let m = &o.model;
    let mut out = Series::zero(*trunc);
    let mmax = trunc.s_deg.min((n + 1).max(0) as u32) as usize;
    for len in 0..=mmax {
        if !part.keeps(len) {
            continue;
        }
        let ks_list = if len == 0 { vec![vec![]] } else { multisets(len, trunc.s_max_index) };
        for ks in ks_list {
            let mut c = sign(len as i64) / aut(&ks);
            for &k in &ks {
                c *= hodge_weight(k);
            }
            let br = braces(&pot, g, n, &ks, trunc)?;
            out.add_assign(&br.mul_monomial(&s_monomial(&ks), &c));
        }
    }
    if part.keeps(0) {
        if g == 0 {
            let low = m.chern_power((n + 1) as u32, ChernVariant::Lowered);
            for a in 0..m.n {
                for b in 0..m.n {
                    if !low[a][b].is_zero() {
                        let mono = Monomial::var(t(0, a)).mul(&Monomial::var(t(0, b)));
                        out.add_term(mono, &low[a][b] / int(2));
                    }
                }
            }
        }
        if g == 1 && n == 0 {
            out.add_term(Monomial::one(), m.l0_constant());
        }
    }
    if part.keeps(1) && g == 1 && n == -1 && trunc.s_deg >= 1 && trunc.s_max_index >= 1 {
        out.add_term(Monomial::var(VarId::S(1)), &m.cd_integral / int(24));
    }
    Ok(out)
}

/// The braced expression multiplying `prod w_{k_i} s_{k_i}`.
fn braces(pot: &HodgePotential, g: u32, n: i64, ks: &[u32], tr: &Truncation) -> Result<Series, ConstraintError> {
    let m = &pot.oracle().model;
    let shifts: Vec<i64> = ks.iter().map(|&k| 2 * k as i64 - 1).collect();
    let big_s: i64 = shifts.iter().sum();
    let d = |g: u32, dirs: &[VarId]| pot.derivative(g, dirs, tr);
    let mut out = Series::zero(*tr);
    for j in 0..=n + 1 {
        let mixed = m.chern_power(j as u32, ChernVariant::Mixed);
        let raised = m.chern_power(j as u32, ChernVariant::Raised);
        for a in 0..m.n {
            let poly = iterated_delta(&shifts, &e_hat(n + 1 - j, n, m, a));
            for r in 0..=tr.max_level {
                let c = poly.eval_int(r as i64);
                let level = big_s + r as i64 + n - j;
                if c.is_zero() || level < 0 {
                    continue;
                }
                let tt = t_tilde(r, a, *tr);
                for b in 0..m.n {
                    if mixed[a][b].is_zero() {
                        continue;
                    }
                    let f = d(g, &[t(level as u32, b)])?;
                    out.add_assign(&tt.mul(&f).scale(&(&c * &mixed[a][b])));
                }
            }
        }
        let top = big_s - 1 + n - j;
        for b in 0..m.n {
            let poly = iterated_delta(&shifts, &e_check(n + 1 - j, n, m, b));
            for s in 0..=top.max(-1) {
                let c = sign(s) * poly.eval_int(-s - 1);
                if c.is_zero() {
                    continue;
                }
                for b2 in 0..m.n {
                    if raised[b][b2].is_zero() {
                        continue;
                    }
                    let coef = -(&c * &raised[b][b2]) / int(2);
                    let (u, v) = (t(s as u32, b), t((top - s) as u32, b2));
                    let mut quad = Series::zero(*tr);
                    for g1 in 0..=g {
                        quad.add_assign(&d(g1, &[u])?.mul(&d(g - g1, &[v])?));
                    }
                    if g >= 1 {
                        quad.add_assign(&d(g - 1, &[u, v])?);
                    }
                    out.add_scaled(&quad, &coef);
                }
            }
        }
    }
    Ok(out)
}

/// Coefficient of `s^K` times `aut(K)`, as a series in `t` and `q` within `tr`.
pub fn extract_profile(full: &Series, profile: &[u32], tr: &Truncation) -> Series {
    let want = s_monomial(profile);
    let mut out = Series::zero(Truncation { s_deg: 0, ..*tr });
    let a = aut(profile);
    for (mono, c) in full.iter() {
        if mono.s_part() == want {
            out.add_term(mono.t_part().mul(&Monomial::pow(VarId::Q, mono.q())), c * &a);
        }
    }
    out
}

/// `Psi^E_{g,n;k_1..k_m}` from the closed formula.
pub fn psi_series(o: &Oracle, req: &PsiRequest) -> Result<Series, ConstraintError> {
    psi_part(o, req, Part::All)
}

pub fn psi_part(o: &Oracle, req: &PsiRequest, part: Part) -> Result<Series, ConstraintError> {
    let pot = HodgePotential::new(o, req.trunc.genus_max.max(req.genus));
    req.validate(&pot)?;
    let full = psi_full(o, req.genus, req.n, &req.s_trunc(), part)?;
    Ok(extract_profile(&full, &req.profile, &req.trunc))
}

/// The same residue read off `D^{-1} L_n^E D` at `hbar^{2g-2}`.
pub fn psi_operator(o: &Oracle, req: &PsiRequest) -> Result<Series, ConstraintError> {
    let pot = HodgePotential::new(o, req.trunc.genus_max.max(req.genus));
    req.validate(&pot)?;
    let tr = Truncation { genus_max: req.genus.max(1), ..req.s_trunc() };
    let cap = LevelCap::mult_only(tr.max_level, tr.s_max_index);
    let op = build_lne(&o.model, req.n, tr.s_deg, &cap)?;
    let full = connected_action(&op, &pot, &tr)?.hbar_slice(2 * req.genus as i32 - 2);
    Ok(extract_profile(&full, &req.profile, &req.trunc))
}

/// `-(1/6) sum_a b_a <<(c_1 phi_a) phi^a>>_0`-type combinations used by the
/// genus-1 split: returns `(Psi', Psi'', Psi)` as predicted in closed form.
pub fn genus1_split_prediction(o: &Oracle, trunc: &Truncation) -> Result<[Series; 3], ConstraintError> {
    use crate::bigphase::{c1_cup, dual_class, unit_class, BigPhase};
    let bp = BigPhase::new(o, *trunc);
    let m = &o.model;
    let tr = bp.trunc();
    let (mut p1, mut p2, mut total) = (Series::zero(tr), Series::zero(tr), Series::zero(tr));
    for a in 0..m.n {
        let b = m.b_lower(a);
        let u = unit_class(m, a);
        let du = dual_class(m, a);
        let cu = c1_cup(m, &u);
        let cdu = c1_cup(m, &du);
        let t1 = bp.bb_classes(0, &[(1, &u), (0, &du)])?;
        let x = bp.bb_classes(0, &[(0, &u), (0, &cdu)])?;
        let y = bp.bb_classes(0, &[(0, &cu), (0, &du)])?;
        p1.add_scaled(&t1, &(&b * rat(1, 6)));
        p1.add_scaled(&x, &rat(1, 12));
        p2.add_scaled(&t1, &(-&b * rat(1, 6)));
        p2.add_scaled(&y, &(-(int(2) * &b + Rat::one()) * rat(1, 12)));
        total.add_scaled(&y, &(-&b * rat(1, 6)));
    }
    Ok([p1, p2, total])
}
