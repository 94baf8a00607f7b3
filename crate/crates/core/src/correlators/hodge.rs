//! Hodge integrals from descendants by solving `D_{2l-1} D^E = 0` for one
//! Chern character at a time.

use super::{labeled_splits, CorrError, CorrelatorKey, Oracle};
use crate::exactnum::{hodge_weight, rat, sign, Rat};
use num::Zero;

fn val(o: &Oracle, g: i64, d: u32, ins: &[(u32, usize)], h: &[u32]) -> Result<Rat, CorrError> {
    if g < 0 {
        return Ok(Rat::zero());
    }
    o.value(&CorrelatorKey::new(&o.model.name, g as u32, d, ins, h))
}

/// Removes `ch_{2l-1}` at position `which` of the Hodge list.
pub(super) fn fp_reduce(o: &Oracle, key: &CorrelatorKey, which: usize) -> Result<Rat, CorrError> {
    let mut h = key.hodge.clone();
    let idx = h.remove(which);
    let l = (idx + 1) / 2;
    let g = key.genus as i64;
    let d = key.degree;
    let ins = &key.insertions;
    let shift = 2 * l - 1;

    let mut acc = Rat::zero();
    for i in 0..ins.len() {
        let mut r = ins.clone();
        r[i].0 += shift;
        acc -= val(o, g, d, &r, &h)?;
    }
    // t~_1^1 = t_1^1 - 1
    let mut with_unit = ins.clone();
    with_unit.push((2 * l, 0));
    acc += val(o, g, d, &with_unit, &h)?;

    let mut quad = Rat::zero();
    let top = 2 * l as i64 - 2;
    for i in 0..=top {
        let j = top - i;
        for a in 0..o.model.n {
            for (b, eta) in o.model.dual(a) {
                let mut inner = Rat::zero();
                let mut both = ins.clone();
                both.push((i as u32, a));
                both.push((j as u32, b));
                inner += val(o, g - 1, d, &both, &h)?;
                for (i1, i2) in labeled_splits(ins) {
                    for (h1, h2) in labeled_splits(&h) {
                        for g1 in 0..=g {
                            for d1 in 0..=d {
                                let mut left = i1.clone();
                                left.push((i as u32, a));
                                let lv = val(o, g1, d1, &left, &h1)?;
                                if lv.is_zero() {
                                    continue;
                                }
                                let mut right = i2.clone();
                                right.push((j as u32, b));
                                inner += lv * val(o, g - g1, d - d1, &right, &h2)?;
                            }
                        }
                    }
                }
                quad += sign(i) * eta * inner;
            }
        }
    }
    acc += quad * rat(1, 2);
    Ok(hodge_weight(l) * acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TargetModel;

    #[test]
    fn elimination_order_is_irrelevant() {
        let o = Oracle::new(TargetModel::point(), 0);
        let keys = [
            CorrelatorKey::new("point", 2, 0, &[(2, 0)], &[1, 1]),
            CorrelatorKey::new("point", 2, 0, &[(0, 0)], &[1, 3]),
            CorrelatorKey::new("point", 2, 0, &[], &[1, 1, 1]),
            CorrelatorKey::new("point", 2, 0, &[(1, 0)], &[3, 1]),
            CorrelatorKey::new("point", 3, 0, &[(1, 0), (3, 0)], &[1, 5]),
        ];
        for k in keys {
            let a = o.fp_reduce_at(&k, 0).unwrap();
            let b = o.fp_reduce_at(&k, k.hodge.len() - 1).unwrap();
            assert_eq!(a, b, "{k}");
            assert_eq!(o.value(&k).unwrap(), a);
        }
    }

    #[test]
    fn vanishing_ranges() {
        // ch_5 has degree 5 > 3g - 3 + n in these cases; reduction must agree.
        let o = Oracle::new(TargetModel::point(), 0);
        for (g, ins, h) in [
            (2u32, vec![(0u32, 0usize); 3], vec![5u32]),
            (1, vec![(0, 0); 3], vec![3]),
            (1, vec![(0, 0); 5], vec![5]),
        ] {
            let k = CorrelatorKey::new("point", g, 0, &ins, &h);
            assert_eq!(o.fp_reduce_at(&k, 0).unwrap(), Rat::zero(), "{k}");
        }
    }

    #[test]
    fn unstable_genus_two_value() {
        // M_2 without marked points is stable, so <ch_3>_2 is reached directly.
        let o = Oracle::new(TargetModel::point(), 0);
        let k = CorrelatorKey::new("point", 2, 0, &[], &[3]);
        let v = o.value(&k).unwrap();
        assert_eq!(v, o.fp_reduce_at(&k, 0).unwrap());
    }
}
