//! Psi-class intersection numbers of the point via the DVV recursion.

use super::{labeled_splits, CorrError, CorrelatorKey, Oracle, Provenance};
use crate::exactnum::{double_factorial, factorial_rat, rat, Rat};
use num::{One, Zero};

fn df(n: i64) -> Rat {
    Rat::from_integer(double_factorial(n))
}

fn key(o: &Oracle, g: u32, levels: &[u32]) -> CorrelatorKey {
    let ins: Vec<(u32, usize)> = levels.iter().map(|&k| (k, 0)).collect();
    CorrelatorKey::new(&o.model.name, g, 0, &ins, &[])
}

fn val(o: &Oracle, g: i64, levels: &[u32]) -> Result<Rat, CorrError> {
    if g < 0 {
        return Ok(Rat::zero());
    }
    o.value(&key(o, g as u32, levels))
}

/// Eliminates the largest insertion `tau_{k+1}`. Called only for keys that
/// satisfy the dimension rule.
pub(super) fn dvv(o: &Oracle, key: &CorrelatorKey) -> Result<(Rat, Provenance), CorrError> {
    let g = key.genus as i64;
    let mut levels: Vec<u32> = key.insertions.iter().map(|&(k, _)| k).collect();
    let n = levels.len();
    if (g == 0 && n < 3) || (g == 1 && n == 0) {
        return Ok((Rat::zero(), Provenance::DimensionZero));
    }
    if g == 0 && levels == [0, 0, 0] {
        return Ok((o.seeds.tau0_cubed.clone(), Provenance::Seed));
    }
    if g == 1 && levels == [1] {
        return Ok((o.seeds.tau1_genus1.clone(), Provenance::Seed));
    }
    levels.sort_unstable();
    let top = levels.pop().expect("nonempty");
    if top == 0 {
        return Err(CorrError::Irreducible(key.to_string()));
    }
    let k = (top - 1) as i64;
    let others = levels;
    let mut acc = Rat::zero();
    for j in 0..others.len() {
        let a = others[j] as i64;
        let mut rest = others.clone();
        rest.remove(j);
        rest.push((a + k) as u32);
        acc += df(2 * a + 2 * k + 1) / df(2 * a - 1) * val(o, g, &rest)?;
    }
    let mut quad = Rat::zero();
    for b in 0..k {
        let c = k - 1 - b;
        let w = df(2 * b + 1) * df(2 * c + 1);
        let mut two = others.clone();
        two.push(b as u32);
        two.push(c as u32);
        let mut inner = val(o, g - 1, &two)?;
        for (i, j) in labeled_splits(&others) {
            for g1 in 0..=g {
                let mut left = i.clone();
                left.push(b as u32);
                let mut right = j.clone();
                right.push(c as u32);
                let l = val(o, g1, &left)?;
                if l.is_zero() {
                    continue;
                }
                inner += l * val(o, g - g1, &right)?;
            }
        }
        quad += w * inner;
    }
    acc += quad * rat(1, 2);
    Ok((acc / df(2 * k + 3), Provenance::Dvv))
}

/// `<prod tau_{k_i}>_0 = (n-3)! / prod k_i!` when `sum k = n - 3`.
pub fn genus_zero_point_closed(levels: &[u32]) -> Rat {
    let n = levels.len() as i64;
    if n < 3 || levels.iter().map(|&k| k as i64).sum::<i64>() != n - 3 {
        return Rat::zero();
    }
    let denom = levels.iter().fold(Rat::one(), |acc, &k| acc * factorial_rat(k as u64));
    factorial_rat((n - 3) as u64) / denom
}

/// Multinomial form used as an independent check of the genus-0 recursion.
pub fn dvv_multinomial(levels: &[u32]) -> Rat {
    genus_zero_point_closed(levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;
    use crate::model::TargetModel;

    fn compositions(n: usize, total: u32) -> Vec<Vec<u32>> {
        if n == 0 {
            return if total == 0 { vec![vec![]] } else { vec![] };
        }
        let mut out = Vec::new();
        for first in 0..=total {
            for mut rest in compositions(n - 1, total - first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }

    #[test]
    fn genus_zero_matches_multinomial() {
        let o = Oracle::new(TargetModel::point(), 0);
        for n in 3..=7usize {
            for ks in compositions(n, n as u32 - 3) {
                assert_eq!(val(&o, 0, &ks).unwrap(), genus_zero_point_closed(&ks), "{ks:?}");
            }
        }
    }

    #[test]
    fn top_intersections() {
        // <tau_{3g-2}>_g = 1 / (24^g g!)
        let o = Oracle::new(TargetModel::point(), 0);
        for g in 1..=3u32 {
            let want = Rat::one() / (num::pow::pow(int(24), g as usize) * factorial_rat(g as u64));
            assert_eq!(val(&o, g as i64, &[3 * g - 2]).unwrap(), want);
        }
    }

    #[test]
    fn string_and_dilaton() {
        let o = Oracle::new(TargetModel::point(), 0);
        for g in 0..=2i64 {
            for ks in compositions(3, (3 * g) as u32) {
                let base = val(&o, g, &ks).unwrap();
                // dilaton: <tau_1 X>_g = (2g - 2 + n) <X>_g
                let mut with1 = ks.clone();
                with1.push(1);
                assert_eq!(val(&o, g, &with1).unwrap(), int(2 * g - 2 + 3) * &base);
            }
            for ks in compositions(3, (3 * g + 1) as u32) {
                // string: <tau_0 X>_g = sum_j <.. tau_{k_j - 1} ..>_g
                let mut with0 = ks.clone();
                with0.push(0);
                let mut want = Rat::zero();
                for j in 0..ks.len() {
                    if ks[j] > 0 {
                        let mut r = ks.clone();
                        r[j] -= 1;
                        want += val(&o, g, &r).unwrap();
                    }
                }
                assert_eq!(val(&o, g, &with0).unwrap(), want, "{ks:?} g={g}");
            }
        }
    }

    #[test]
    fn genus_one_small() {
        let o = Oracle::new(TargetModel::point(), 0);
        assert_eq!(val(&o, 1, &[0, 2]).unwrap(), rat(1, 24));
        assert_eq!(val(&o, 1, &[1, 1]).unwrap(), rat(1, 24));
        assert_eq!(val(&o, 2, &[4]).unwrap(), rat(1, 1152));
        assert_eq!(val(&o, 2, &[2, 3]).unwrap(), rat(29, 5760));
    }
}
