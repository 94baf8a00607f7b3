//! Descendant-only forms of the constraints: the genus-0 Hodge family, the
//! `L~_{n+1}` equations and the large-`k_1` higher-genus equation.

use super::ConstraintError;
use crate::bigphase::{c1_power_cup, dual_class, q_op, t_tilde, unit_class, BigPhase, VectorField};
use crate::exactnum::{int, sign, Rat};
use crate::fock::Series;
use crate::symfun::{e_check, e_hat, iterated_delta};
use num::Zero;

/// `-sum_j sum_{r,a} (prod Delta e^_{n+1-j}(n,a))(r) t~_r^a <<tau_{S+r+n-j}(c_1^j phi_a)>>_0
///  + 1/2 sum_j sum_{s,b} (-1)^s (prod Delta e'_{n+1-j}(n,b))(-s-1)
///    <<tau_s(phi_b)>>_0 <<tau_{S-s-1+n-j}(c_1^j phi^b)>>_0`, `j = 0..n`.
pub fn genus0_family(bp: &BigPhase, n: i64, ks: &[u32]) -> Result<Series, ConstraintError> {
    if n < 1 || ks.is_empty() || ks.contains(&0) {
        return Err(ConstraintError::Unsupported("the genus-0 family needs n, m, k_i >= 1".into()));
    }
    let m = bp.model();
    let tr = bp.trunc();
    let shifts: Vec<i64> = ks.iter().map(|&k| 2 * k as i64 - 1).collect();
    let big_s: i64 = shifts.iter().sum();
    let mut out = Series::zero(tr);
    for j in 0..=n {
        for a in 0..m.n {
            let cls = c1_power_cup(m, j as u32, &unit_class(m, a));
            let poly = iterated_delta(&shifts, &e_hat(n + 1 - j, n, m, a));
            for r in 0..=tr.max_level {
                let c = poly.eval_int(r as i64);
                if c.is_zero() {
                    continue;
                }
                let bb = bp.bb_classes(0, &[(big_s + r as i64 + n - j, &cls)])?;
                out.add_scaled(&t_tilde(r, a, tr).mul(&bb), &-c);
            }
            let dual = c1_power_cup(m, j as u32, &dual_class(m, a));
            let poly = iterated_delta(&shifts, &e_check(n + 1 - j, n, m, a));
            for s in 0..=big_s - 1 + n - j {
                let c = sign(s) * poly.eval_int(-s - 1);
                if c.is_zero() {
                    continue;
                }
                let left = bp.bb(0, &[(s, a)])?;
                let right = bp.bb_classes(0, &[(big_s - s - 1 + n - j, &dual)])?;
                out.add_scaled(&left.mul(&right), &(c / int(2)));
            }
        }
    }
    Ok(out)
}

/// `-sum_j sum_{r,a} e^_{n-j}(n-1,a)(r+1) t~_r^a <<tau_{1+r+n-j}(c_1^j phi_a)>>_0
///  + 1/2 sum_j sum_{s,a} (-1)^s e'_{n-j}(n-1,a)(-s) <<tau_s(phi_a)>>_0 <<tau_{n-j-s}(c_1^j phi^a)>>_0`.
pub fn ehx_tilde(bp: &BigPhase, n: i64) -> Result<Series, ConstraintError> {
    if n < 0 {
        return Err(ConstraintError::Unsupported("the L~ equation needs n >= 0".into()));
    }
    let m = bp.model();
    let tr = bp.trunc();
    let mut out = Series::zero(tr);
    for j in 0..=n {
        for a in 0..m.n {
            let cls = c1_power_cup(m, j as u32, &unit_class(m, a));
            let poly = e_hat(n - j, n - 1, m, a);
            for r in 0..=tr.max_level {
                let c = poly.eval_int(r as i64 + 1);
                if c.is_zero() {
                    continue;
                }
                let bb = bp.bb_classes(0, &[(1 + r as i64 + n - j, &cls)])?;
                out.add_scaled(&t_tilde(r, a, tr).mul(&bb), &-c);
            }
            let dual = c1_power_cup(m, j as u32, &dual_class(m, a));
            let poly = e_check(n - j, n - 1, m, a);
            for s in 0..=n - j {
                let c = sign(s) * poly.eval_int(-s);
                if c.is_zero() {
                    continue;
                }
                let left = bp.bb(0, &[(s, a)])?;
                let right = bp.bb_classes(0, &[(n - j - s, &dual)])?;
                out.add_scaled(&left.mul(&right), &(c / int(2)));
            }
        }
    }
    Ok(out)
}

/// `sum (r+k_1+b_a) t~_r^a <<tau_{r+2k_1}(phi_a)>>_g + sum t~_r^a <<tau_{r+2k_1-1}(c_1 phi_a)>>_g
///  + 1/2 sum_{g_1+g_2=g} sum_j (-1)^j <<tau_{2k_1-1-j}(phi^a)>>_{g_1} <<Q(tau_j phi_a)>>_{g_2}
///  + 1/2 sum_j (-1)^j <<tau_{2k_1-1-j}(phi^a) Q(tau_j phi_a)>>_{g-1}`.
pub fn higher_genus_display(bp: &BigPhase, g: u32, k1: u32) -> Result<Series, ConstraintError> {
    let m = bp.model();
    let tr = bp.trunc();
    let g = g as i64;
    let k1 = k1 as i64;
    let mut out = Series::zero(tr);
    for a in 0..m.n {
        let c1a = c1_power_cup(m, 1, &unit_class(m, a));
        for r in 0..=tr.max_level {
            let tt = t_tilde(r, a, tr);
            let w = int(r as i64 + k1) + m.b_lower(a);
            out.add_scaled(&tt.mul(&bp.bb(g, &[(r as i64 + 2 * k1, a)])?), &w);
            out.add_assign(&tt.mul(&bp.bb_classes(g, &[(r as i64 + 2 * k1 - 1, &c1a)])?));
        }
        for j in 0..=2 * k1 - 1 {
            let dual = VectorField::of_class(2 * k1 - 1 - j, &dual_class(m, a), tr);
            let qf = q_op(m, &VectorField::basis(j as u32, a, tr));
            let half = sign(j) / int(2);
            for g1 in 0..=g {
                let l = bp.bracket(g1, &[&dual])?;
                if l.is_zero() {
                    continue;
                }
                out.add_scaled(&l.mul(&bp.bracket(g - g1, &[&qf])?), &half);
            }
            out.add_scaled(&bp.bracket(g - 1, &[&dual, &qf])?, &half);
        }
    }
    Ok(out)
}

/// Factor relating the higher-genus display to `Psi^E_{g,1;k_1}` once every
/// `F_{g';k_1}` vanishes: `Psi = -2(2k_1-1) w_{k_1} * display`.
pub fn higher_genus_factor(k1: u32) -> Rat {
    -int(2 * (2 * k1 as i64 - 1)) * crate::exactnum::hodge_weight(k1)
}
