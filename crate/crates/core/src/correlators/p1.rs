//! Genus-0 descendant invariants of P^1 by string, divisor and the genus-0
//! topological recursion, starting from `<tau_0(w) tau_0(w)>_{0,1}`.
//!
//! Basis index 0 is the unit, 1 is the point class `w`.

use super::{labeled_splits, CorrError, CorrelatorKey, Insertion, Oracle, Provenance};
use super::point::genus_zero_point_closed;
use crate::exactnum::{int, Rat};
use num::Zero;

const UNIT: usize = 0;
const OMEGA: usize = 1;

fn val(o: &Oracle, d: u32, ins: &[Insertion]) -> Result<Rat, CorrError> {
    o.value(&CorrelatorKey::new(&o.model.name, 0, d, ins, &[]))
}

/// `w * phi_a` as a basis index.
fn omega_times(a: usize) -> Option<usize> {
    (a == UNIT).then_some(OMEGA)
}

/// `sum_j <.. tau_{k_j - 1}(w * phi_j) ..>` over insertions with positive level.
fn divisor_tail(o: &Oracle, d: u32, ins: &[Insertion]) -> Result<Rat, CorrError> {
    let mut acc = Rat::zero();
    for j in 0..ins.len() {
        let (k, a) = ins[j];
        if k == 0 {
            continue;
        }
        if let Some(b) = omega_times(a) {
            let mut r = ins.to_vec();
            r[j] = (k - 1, b);
            acc += val(o, d, &r)?;
        }
    }
    Ok(acc)
}

pub(super) fn genus_zero(o: &Oracle, key: &CorrelatorKey) -> Result<(Rat, Provenance), CorrError> {
    let d = key.degree;
    let ins = key.insertions.clone();
    let n = ins.len();
    if d == 0 {
        let omegas = ins.iter().filter(|&&(_, a)| a == OMEGA).count();
        if n < 3 || omegas != 1 {
            return Ok((Rat::zero(), Provenance::DimensionZero));
        }
        let levels: Vec<u32> = ins.iter().map(|&(k, _)| k).collect();
        return Ok((genus_zero_point_closed(&levels), Provenance::Reconstruction));
    }
    if d == 1 && ins == [(0, OMEGA), (0, OMEGA)] {
        return Ok((o.seeds.p1_seed.clone(), Provenance::Seed));
    }
    let max_level = ins.iter().map(|&(k, _)| k).max().unwrap_or(0);
    let v = if n >= 3 && max_level > 0 {
        trr(o, d, &ins)?
    } else if let Some(pos) = ins.iter().position(|&x| x == (0, UNIT)) {
        // string
        let mut rest = ins.clone();
        rest.remove(pos);
        let mut acc = Rat::zero();
        for j in 0..rest.len() {
            if rest[j].0 > 0 {
                let mut r = rest.clone();
                r[j].0 -= 1;
                acc += val(o, d, &r)?;
            }
        }
        acc
    } else if n >= 3 {
        // all primary: forward divisor on a tau_0(w)
        let pos = ins
            .iter()
            .position(|&x| x == (0, OMEGA))
            .ok_or_else(|| CorrError::Irreducible(key.to_string()))?;
        let mut rest = ins.clone();
        rest.remove(pos);
        int(d as i64) * val(o, d, &rest)? + divisor_tail(o, d, &rest)?
    } else {
        // reverse divisor: <X> = (<tau_0(w) X> - tail) / d
        let mut more = ins.clone();
        more.push((0, OMEGA));
        (val(o, d, &more)? - divisor_tail(o, d, &ins)?) / int(d as i64)
    };
    Ok((v, Provenance::Reconstruction))
}

/// `<tau_{a+1}(x) y z R>_d = sum <tau_a(x) R_1 phi_e>_{d1} eta^{ef} <phi_f y z R_2>_{d2}`.
fn trr(o: &Oracle, d: u32, ins: &[Insertion]) -> Result<Rat, CorrError> {
    let mut ins = ins.to_vec();
    let top = (0..ins.len()).max_by_key(|&i| (ins[i].0, std::cmp::Reverse(i))).expect("nonempty");
    let x = ins.remove(top);
    let y = ins.remove(0);
    let z = ins.remove(0);
    let rest = ins;
    let mut acc = Rat::zero();
    for (r1, r2) in labeled_splits(&rest) {
        for d1 in 0..=d {
            for e in 0..o.model.n {
                for (f, eta) in o.model.dual(e) {
                    let mut left = r1.clone();
                    left.push((x.0 - 1, x.1));
                    left.push((0, e));
                    let l = val(o, d1, &left)?;
                    if l.is_zero() {
                        continue;
                    }
                    let mut right = r2.clone();
                    right.extend([(0, f), y, z]);
                    acc += l * eta * val(o, d - d1, &right)?;
                }
            }
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use crate::model::TargetModel;

    fn oracle() -> Oracle {
        Oracle::new(TargetModel::p1(), 2)
    }

    #[test]
    fn one_point_invariants() {
        // <tau_{2d-2}(w)>_{0,d} = 1/(d!)^2; <tau_1(1)>_{0,1} = -2 <>_{0,1}
        let o = oracle();
        assert_eq!(val(&o, 1, &[(0, OMEGA)]).unwrap(), int(1));
        assert_eq!(val(&o, 2, &[(2, OMEGA)]).unwrap(), rat(1, 4));
        assert_eq!(val(&o, 1, &[(1, UNIT)]).unwrap(), int(-2));
    }

    #[test]
    fn divisor_consistency() {
        let o = oracle();
        for d in 1..=2u32 {
            for k in 0..4u32 {
                for a in 0..2usize {
                    let x = [(k, a), (2 * d - k.min(2 * d), OMEGA)];
                    let mut with = x.to_vec();
                    with.push((0, OMEGA));
                    let lhs = val(&o, d, &with).unwrap();
                    let rhs = int(d as i64) * val(&o, d, &x).unwrap() + divisor_tail(&o, d, &x).unwrap();
                    assert_eq!(lhs, rhs, "{x:?} d={d}");
                }
            }
        }
    }

    #[test]
    fn dilaton_consistency() {
        // <tau_1(1) X>_{0,d} = (n - 2) <X>_{0,d}
        let o = oracle();
        let cases: Vec<Vec<Insertion>> = vec![
            vec![(0, OMEGA), (0, OMEGA)],
            vec![(1, OMEGA), (0, OMEGA), (0, OMEGA)],
            vec![(2, OMEGA)],
            vec![(0, OMEGA), (3, UNIT), (1, OMEGA)],
        ];
        for d in 1..=2 {
            for x in &cases {
                let mut with = x.clone();
                with.push((1, UNIT));
                let want = int(x.len() as i64 - 2) * val(&o, d, x).unwrap();
                assert_eq!(val(&o, d, &with).unwrap(), want, "{x:?} d={d}");
            }
        }
    }
}
