//! `D^{-1} A D` for `D = exp(sum_g hbar^{2g-2} F_g)`, coefficient by coefficient.

use super::DiffOp;
use crate::correlators::CorrError;
use crate::exactnum::{binomial, Rat};
use crate::fock::{dilaton_shift, Monomial, Series, Truncation, VarId};
use num::Zero;

/// Supplies derivatives of the genus-`g` potential in the given directions
/// (`t` or `s` variables), as series in `t`, `s`, `q`.
pub trait PotentialSource {
    fn derivative(&self, g: u32, dirs: &[VarId], trunc: &Truncation) -> Result<Series, CorrError>;
    fn genus_max(&self) -> u32;
}

/// Expands a monomial in shifted coordinates into ordinary `t` variables.
fn unshift(m: &Monomial, trunc: Truncation) -> Series {
    let mut acc = Series::constant(Rat::from_integer(1.into()), Truncation { t_deg: u32::MAX, ..trunc });
    let mut plain = Monomial::one();
    for &(v, e) in m.factors() {
        if v.is_t() {
            let a = dilaton_shift(v);
            if a.constant.is_zero() {
                plain = plain.mul(&Monomial::pow(v, e));
            } else {
                // (t + c)^e = sum_i C(e,i) t^i c^{e-i}
                let mut s = Series::zero(acc.truncation());
                for i in 0..=e {
                    let c = Rat::from_integer(binomial(e as i64, i as i64))
                        * num::pow::pow(a.constant.clone(), (e - i) as usize);
                    s.add_term(Monomial::pow(v, i), c);
                }
                acc = acc.mul(&s);
            }
        } else {
            plain = plain.mul(&Monomial::pow(v, e));
        }
    }
    acc.mul_monomial(&plain, &Rat::from_integer(1.into())).truncate(trunc)
}

/// The series `sum_g hbar^{2g-2} Psi_g` with `Psi_g` the `hbar^{2g-2}`
/// coefficient of `D^{-1} A D`, within `trunc` (its `genus_max` sets the
/// hbar window). Operators with more than two derivatives are rejected.
pub fn connected_action(a: &DiffOp, pot: &dyn PotentialSource, trunc: &Truncation) -> Result<Series, CorrError> {
    let hmax = trunc.hbar_max();
    let gmax = pot.genus_max().min(trunc.genus_max) as i32;
    let mut out = Series::zero(*trunc);
    for (m, d, c) in a.iter() {
        let (h, rest) = m.take(VarId::Hbar);
        let pre = unshift(&rest, Truncation { t_deg: trunc.t_deg + 2, ..*trunc });
        let mut add = |g_exp: i32, s: &Series| {
            let e = h + g_exp;
            if e < -2 || e > hmax {
                return;
            }
            let hs = Monomial::pow(VarId::Hbar, e);
            out.add_assign(&pre.mul(s).mul_monomial(&hs, c));
        };
        match d.len() {
            0 => add(0, &Series::constant(Rat::from_integer(1.into()), *trunc)),
            1 => {
                for g in 0..=gmax {
                    let e = 2 * g - 2;
                    if h + e < -2 || h + e > hmax {
                        continue;
                    }
                    add(e, &pot.derivative(g as u32, d, trunc)?);
                }
            }
            2 => {
                for g in 0..=gmax {
                    let e = 2 * g - 2;
                    // hbar^2 * d d F_g contributes to exponent 2g-2 + h
                    if h + e >= -2 && h + e <= hmax {
                        add(e, &pot.derivative(g as u32, d, trunc)?);
                    }
                }
                for g1 in 0..=gmax {
                    for g2 in 0..=gmax {
                        let e = 2 * g1 + 2 * g2 - 4;
                        if h + e < -2 || h + e > hmax {
                            continue;
                        }
                        let f1 = pot.derivative(g1 as u32, &d[..1], trunc)?;
                        let f2 = pot.derivative(g2 as u32, &d[1..], trunc)?;
                        add(e, &f1.mul(&f2));
                    }
                }
            }
            k => return Err(CorrError::Unsupported(format!("operator term with {k} derivatives"))),
        }
    }
    Ok(out)
}
