//! Genus-0/1/g identities on the big phase space, evaluated as truncated
//! series. Every entry is `lhs - rhs`, which must vanish coefficient-wise.

use super::{
    c1_cup, dual_class, pairing, pi, q_op, special_field, t_tilde, tau_shift, unit_class, BigPhase, Shift, Special,
    VectorField,
};
use crate::correlators::{CorrError, Oracle};
use crate::exactnum::{int, rat, sign, Rat};
use crate::fock::{t, Monomial, Series, Truncation};
use crate::model::{ChernVariant, TargetModel};
use num::{One, Zero};
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResidue {
    pub family: &'static str,
    pub label: String,
    pub residue: Series,
}

type Out = Result<Vec<IdentityResidue>, CorrError>;
type Family = (&'static str, fn(&BigPhase) -> Out);

const FAMILIES: &[Family] = &[
    ("quasi_homogeneity", quasi_homogeneity),
    ("quasi_homogeneity_d1", quasi_d1),
    ("quasi_homogeneity_d2", quasi_d2),
    ("quasi_homogeneity_d3", quasi_d3),
    ("fp_genus0", fp_genus0),
    ("fp_genus0_d1", fp_d1),
    ("fp_genus0_d2", fp_d2),
    ("fp_genus0_d3", fp_d3),
    ("genus1_trr", genus1_trr),
    ("generalized_genus0_trr", generalized_trr),
    ("tau_t_contraction", contraction),
    ("q_pairing_vanishes", q_pairing_vanishes),
    ("euler_q_pairing", euler_q_pairing),
    ("dilaton_equation", dilaton_equation),
    ("l0_equation", l0_equation),
    ("t_power_l0", t_power_l0),
    ("t_power_dilaton", t_power_dilaton),
    ("q_t_exchange", q_t_exchange),
    ("genus0_trr_t_form", trr_t_form),
    ("dilaton_l0_rearrangement", rearrangement),
    ("t_power_expansion", t_power_expansion),
];

pub fn family_names() -> Vec<&'static str> {
    FAMILIES.iter().map(|(n, _)| *n).collect()
}

/// Runs every identity family (concurrently) on the point through genus 2 or
/// on a Novikov target in genus 0, at `trunc`.
pub fn identity_suite(oracle: &Oracle, trunc: Truncation) -> Out {
    identity_families(oracle, trunc, &family_names())
}

pub fn identity_families(oracle: &Oracle, trunc: Truncation, names: &[&str]) -> Out {
    let bp = BigPhase::new(oracle, trunc);
    let chosen: Vec<&Family> = FAMILIES.iter().filter(|(n, _)| names.contains(n)).collect();
    let parts: Vec<Out> = chosen.par_iter().map(|(_, f)| f(&bp)).collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn res(family: &'static str, label: String, residue: Series) -> IdentityResidue {
    IdentityResidue { family, label, residue }
}

fn model<'b>(bp: &'b BigPhase) -> &'b TargetModel {
    bp.model()
}

fn genera(bp: &BigPhase) -> Vec<i64> {
    (0..=bp.genus_max() as i64).collect()
}

fn basis(bp: &BigPhase, k: u32, a: usize) -> VectorField {
    VectorField::basis(k, a, bp.trunc())
}

fn cls(bp: &BigPhase, k: i64, v: &[Rat]) -> VectorField {
    VectorField::of_class(k, v, bp.trunc())
}

fn dual(bp: &BigPhase, k: i64, a: usize) -> VectorField {
    cls(bp, k, &dual_class(model(bp), a))
}

/// `tau_{k-1}(c_1 ∪ phi_a)`.
fn c1_lowered(bp: &BigPhase, k: i64, a: usize) -> VectorField {
    cls(bp, k - 1, &c1_cup(model(bp), &unit_class(model(bp), a)))
}

fn tvar(bp: &BigPhase, k: u32, a: usize) -> Series {
    Series::monomial(Monomial::var(t(k, a)), Rat::one(), bp.trunc())
}

fn konst(bp: &BigPhase, c: Rat) -> Series {
    Series::constant(c, bp.trunc())
}

fn br(bp: &BigPhase, g: i64, fields: &[&VectorField]) -> Result<Series, CorrError> {
    bp.bracket(g, fields)
}

/// `sum_b C_{ab} t_0^b`.
fn c_t0(bp: &BigPhase, a: usize) -> Series {
    let c = model(bp).chern_power(1, ChernVariant::Lowered);
    let mut s = Series::zero(bp.trunc());
    for (b, cab) in c[a].iter().enumerate() {
        s.add_scaled(&tvar(bp, 0, b), cab);
    }
    s
}

/// `sum_{ab} C_{ab} t_0^a t_0^b`.
fn c_t0_t0(bp: &BigPhase) -> Series {
    let mut s = Series::zero(bp.trunc());
    for a in 0..model(bp).n {
        s.add_assign(&tvar(bp, 0, a).mul(&c_t0(bp, a)));
    }
    s
}

fn c_lowered(m: &TargetModel, a: usize, b: usize) -> Rat {
    m.chern_power(1, ChernVariant::Lowered)[a][b].clone()
}

/// Insertion triples for the derivative identities.
fn index_tuples(m: &TargetModel, len: usize, max_level: u32) -> Vec<Vec<(u32, usize)>> {
    let atoms: Vec<(u32, usize)> = (0..=max_level).flat_map(|k| (0..m.n).map(move |a| (k, a))).collect();
    let mut out = vec![vec![]];
    for _ in 0..len {
        let mut next = Vec::new();
        for prefix in &out {
            for &x in &atoms {
                if prefix.last().is_some_and(|&p| p > x) {
                    continue;
                }
                let mut v: Vec<(u32, usize)> = prefix.clone();
                v.push(x);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

fn label(ins: &[(u32, usize)]) -> String {
    ins.iter().map(|&(k, a)| format!("tau_{k}(phi_{})", a + 1)).collect::<Vec<_>>().join(" ")
}

fn quasi_homogeneity(bp: &BigPhase) -> Out {
    let m = model(bp);
    let x = special_field(m, Special::Euler, bp.trunc());
    let mut out = Vec::new();
    for g in genera(bp) {
        let mut r = br(bp, g, &[&x])?;
        r = r.sub(&bp.potential(g as u32)?.scale(&int((3 - m.d) * (1 - g))));
        if g == 0 {
            r = r.sub(&c_t0_t0(bp).scale(&rat(1, 2)));
        }
        if g == 1 {
            r = r.add(&konst(bp, m.c1cd1_integral.clone() / int(24)));
        }
        out.push(res("quasi_homogeneity", format!("g={g}"), r));
    }
    Ok(out)
}

/// `(m + b_a + b_1 + 1)` and friends: the weight of one insertion under `X`.
fn weight(m: &TargetModel, ins: &[(u32, usize)]) -> Rat {
    ins.iter().fold(Rat::zero(), |acc, &(k, a)| acc + int(k as i64) + m.b_lower(a))
}

/// `sum_i <<.. tau_{k_i - 1}(c_1 ∪ phi_{a_i}) ..>>_0`.
fn c1_terms(bp: &BigPhase, ins: &[(u32, usize)]) -> Result<Series, CorrError> {
    let mut acc = Series::zero(bp.trunc());
    for i in 0..ins.len() {
        let mut fields: Vec<VectorField> = ins.iter().map(|&(k, a)| basis(bp, k, a)).collect();
        fields[i] = c1_lowered(bp, ins[i].0 as i64, ins[i].1);
        let refs: Vec<&VectorField> = fields.iter().collect();
        acc.add_assign(&br(bp, 0, &refs)?);
    }
    Ok(acc)
}

fn quasi_derivative(bp: &BigPhase, len: usize, family: &'static str) -> Out {
    let m = model(bp);
    let x = special_field(m, Special::Euler, bp.trunc());
    let shift = match len {
        1 => rat(3 - m.d, 2),
        2 => Rat::zero(),
        _ => -rat(3 - m.d, 2),
    };
    let max_level = if len == 1 { 3 } else { 2 };
    let mut out = Vec::new();
    for ins in index_tuples(m, len, max_level) {
        let fields: Vec<VectorField> = ins.iter().map(|&(k, a)| basis(bp, k, a)).collect();
        let mut refs: Vec<&VectorField> = vec![&x];
        refs.extend(fields.iter());
        let lhs = br(bp, 0, &refs)?;
        let plain: Vec<&VectorField> = fields.iter().collect();
        let mut rhs = br(bp, 0, &plain)?.scale(&(weight(m, &ins) + &shift));
        rhs.add_assign(&c1_terms(bp, &ins)?);
        match len {
            1 if ins[0].0 == 0 => rhs.add_assign(&c_t0(bp, ins[0].1)),
            2 if ins[0].0 == 0 && ins[1].0 == 0 => rhs.add_assign(&konst(bp, c_lowered(m, ins[0].1, ins[1].1))),
            _ => {}
        }
        out.push(res(family, label(&ins), lhs.sub(&rhs)));
    }
    Ok(out)
}

fn quasi_d1(bp: &BigPhase) -> Out {
    quasi_derivative(bp, 1, "quasi_homogeneity_d1")
}

fn quasi_d2(bp: &BigPhase) -> Out {
    quasi_derivative(bp, 2, "quasi_homogeneity_d2")
}

fn quasi_d3(bp: &BigPhase) -> Out {
    quasi_derivative(bp, 3, "quasi_homogeneity_d3")
}

/// `sum_{r,a} t~_r^a <<tau_{r+2k-1}(phi_a) extra>>_0`.
fn tilde_sum(bp: &BigPhase, k1: u32, extra: &[VectorField]) -> Result<Series, CorrError> {
    let m = model(bp);
    let mut acc = Series::zero(bp.trunc());
    for r in 0..=bp.trunc().max_level {
        for a in 0..m.n {
            let f = basis(bp, r + 2 * k1 - 1, a);
            let mut refs: Vec<&VectorField> = vec![&f];
            refs.extend(extra.iter());
            acc.add_assign(&t_tilde(r, a, bp.trunc()).mul(&br(bp, 0, &refs)?));
        }
    }
    Ok(acc)
}

/// `sum_{i=0}^{2k-2} sum_a (-1)^i <<tau_i(phi_a) extra>>_0 <<tau_{2k-2-i}(phi^a) other>>_0`.
fn split_sum(bp: &BigPhase, k1: u32, extra: &[VectorField], other: &[VectorField]) -> Result<Series, CorrError> {
    let m = model(bp);
    let mut acc = Series::zero(bp.trunc());
    for i in 0..=(2 * k1 - 2) {
        for a in 0..m.n {
            let f = basis(bp, i, a);
            let mut left: Vec<&VectorField> = vec![&f];
            left.extend(extra.iter());
            let l = br(bp, 0, &left)?;
            if l.is_zero() {
                continue;
            }
            let d = dual(bp, (2 * k1 - 2 - i) as i64, a);
            let mut right: Vec<&VectorField> = vec![&d];
            right.extend(other.iter());
            acc.add_scaled(&l.mul(&br(bp, 0, &right)?), &sign(i as i64));
        }
    }
    Ok(acc)
}

fn fp_genus0(bp: &BigPhase) -> Out {
    let mut out = Vec::new();
    for k1 in 1..=2u32 {
        let r = tilde_sum(bp, k1, &[])?.scale(&-Rat::one()).add(&split_sum(bp, k1, &[], &[])?.scale(&rat(1, 2)));
        out.push(res("fp_genus0", format!("k1={k1}"), r));
    }
    Ok(out)
}

fn fp_derivative(bp: &BigPhase, len: usize, family: &'static str) -> Out {
    let m = model(bp);
    let mut out = Vec::new();
    for k1 in 1..=2u32 {
        for ins in index_tuples(m, len, 2) {
            let fields: Vec<VectorField> = ins.iter().map(|&(k, a)| basis(bp, k, a)).collect();
            let lhs = tilde_sum(bp, k1, &fields)?;
            let mut rhs = split_sum(bp, k1, &fields, &[])?;
            if len == 1 {
                let (k, a) = ins[0];
                rhs = rhs.sub(&bp.bb(0, &[((k + 2 * k1 - 1) as i64, a)])?);
            }
            out.push(res(family, format!("k1={k1} {}", label(&ins)), lhs.sub(&rhs)));
        }
    }
    Ok(out)
}

fn fp_d1(bp: &BigPhase) -> Out {
    fp_derivative(bp, 1, "fp_genus0_d1")
}

fn fp_d2(bp: &BigPhase) -> Out {
    fp_derivative(bp, 2, "fp_genus0_d2")
}

fn fp_d3(bp: &BigPhase) -> Out {
    fp_derivative(bp, 3, "fp_genus0_d3")
}

fn generalized_trr(bp: &BigPhase) -> Out {
    let m = model(bp);
    let mut out = Vec::new();
    for k1 in 1..=2u32 {
        for ins in index_tuples(m, 2, 2) {
            for l in 0..=2u32 {
                for e in 0..m.n {
                    let fields: Vec<VectorField> = ins.iter().map(|&(k, a)| basis(bp, k, a)).collect();
                    let top = basis(bp, l + 2 * k1 - 1, e);
                    let lhs = br(bp, 0, &[&top, &fields[0], &fields[1]])?;
                    let rhs = split_sum(bp, k1, &fields, &[basis(bp, l, e)])?;
                    let lab = format!("k1={k1} tau_{l}(phi_{}) {}", e + 1, label(&ins));
                    out.push(res("generalized_genus0_trr", lab, lhs.sub(&rhs)));
                }
            }
        }
    }
    Ok(out)
}

fn genus1_trr(bp: &BigPhase) -> Out {
    let m = model(bp);
    if bp.genus_max() < 1 {
        return Ok(vec![]);
    }
    let mut out = Vec::new();
    for s in 1..=4u32 {
        for b in 0..m.n {
            let lhs = bp.bb(1, &[(s as i64, b)])?;
            let mut rhs = Series::zero(bp.trunc());
            let x = basis(bp, s - 1, b);
            for a in 0..m.n {
                let d = dual(bp, 0, a);
                rhs.add_assign(&br(bp, 0, &[&x, &d])?.mul(&bp.bb(1, &[(0, a)])?));
                let p = basis(bp, 0, a);
                rhs.add_scaled(&br(bp, 0, &[&x, &p, &d])?, &rat(1, 24));
            }
            out.push(res("genus1_trr", format!("tau_{s}(phi_{})", b + 1), lhs.sub(&rhs)));
        }
    }
    Ok(out)
}

/// One- and two-point functionals `P(W)`.
#[derive(Clone, Copy)]
enum Functional {
    One(i64),
    TwoWithTau1(i64),
}

impl Functional {
    fn eval(self, bp: &BigPhase, w: &VectorField) -> Result<Series, CorrError> {
        match self {
            Functional::One(g) => br(bp, g, &[w]),
            Functional::TwoWithTau1(g) => br(bp, g, &[w, &basis(bp, 1, 0)]),
        }
    }

    fn name(self) -> String {
        match self {
            Functional::One(g) => format!("<<.>>_{g}"),
            Functional::TwoWithTau1(g) => format!("<<. tau_1(phi_1)>>_{g}"),
        }
    }
}

fn contraction(bp: &BigPhase) -> Out {
    let m = model(bp);
    let mut pairs = vec![(Functional::One(0), Functional::One(0)), (Functional::TwoWithTau1(0), Functional::One(0))];
    if bp.genus_max() >= 1 {
        pairs.push((Functional::One(0), Functional::One(1)));
        pairs.push((Functional::TwoWithTau1(0), Functional::One(1)));
        pairs.push((Functional::One(1), Functional::TwoWithTau1(1)));
    }
    let mut out = Vec::new();
    for (p, q) in pairs {
        for mm in 0..=4u32 {
            let mut r = Series::zero(bp.trunc());
            for j in 0..=mm {
                for a in 0..m.n {
                    let s = sign(j as i64);
                    let plain = p.eval(bp, &basis(bp, j, a))?.mul(&q.eval(bp, &dual(bp, (mm - j) as i64, a))?);
                    let tj = bp.t_pow(&basis(bp, 0, a), j)?;
                    let tmj = bp.t_pow(&dual(bp, 0, a), mm - j)?;
                    let via_t = p.eval(bp, &tj)?.mul(&q.eval(bp, &tmj)?);
                    r.add_scaled(&plain.sub(&via_t), &s);
                }
            }
            out.push(res("tau_t_contraction", format!("P={} Q={} m={mm}", p.name(), q.name()), r));
        }
    }
    Ok(out)
}

/// `sum_{j=0}^{2l-1} sum_a (-1)^j <<tau_{2l-1-j}(phi^a) Q(tau_j(phi_a)) extra>>_0`.
fn q_pairing(bp: &BigPhase, l: u32, extra: &[&VectorField]) -> Result<Series, CorrError> {
    let m = model(bp);
    let mut acc = Series::zero(bp.trunc());
    for j in 0..2 * l {
        for a in 0..m.n {
            let d = dual(bp, (2 * l - 1 - j) as i64, a);
            let q = q_op(m, &basis(bp, j, a));
            let mut refs: Vec<&VectorField> = vec![&d, &q];
            refs.extend(extra.iter().copied());
            acc.add_scaled(&br(bp, 0, &refs)?, &sign(j as i64));
        }
    }
    Ok(acc)
}

fn q_pairing_vanishes(bp: &BigPhase) -> Out {
    let mut out = Vec::new();
    for l in 2..=3u32 {
        out.push(res("q_pairing_vanishes", format!("l={l}"), q_pairing(bp, l, &[])?));
    }
    Ok(out)
}

/// The `X`-insertion step: both the expansion through `Q` and `pi` and the
/// final multiple `2l`.
fn euler_q_pairing(bp: &BigPhase) -> Out {
    let m = model(bp);
    let x = special_field(m, Special::Euler, bp.trunc());
    let mut out = Vec::new();
    for l in 2..=3u32 {
        let lhs = q_pairing(bp, l, &[&x])?;
        let mut expanded = Series::zero(bp.trunc());
        for j in 0..2 * l {
            for a in 0..m.n {
                let s = sign(j as i64);
                let d = dual(bp, (2 * l - 1 - j) as i64, a);
                let q = q_op(m, &basis(bp, j, a));
                expanded.add_scaled(&br(bp, 0, &[&q_op(m, &d), &q])?, &s);
                expanded.add_scaled(&br(bp, 0, &[&d, &q_op(m, &q)])?, &s);
                if 2 * l - 1 == j {
                    let c1_dual = c1_cup(m, &dual_class(m, a));
                    let pq: Vec<Rat> = pi(&q).iter().map(|f| f.coefficient_of(&Monomial::one())).collect();
                    let mut pv = vec![Rat::zero(); m.n];
                    for (i, c) in pq.into_iter().enumerate() {
                        pv[i] = c;
                    }
                    expanded.add_scaled(&konst(bp, pairing(m, &c1_dual, &pv)), &s);
                }
            }
        }
        out.push(res("euler_q_pairing", format!("l={l} expansion"), lhs.sub(&expanded)));
        let multiple = q_pairing(bp, l, &[])?.scale(&int(2 * l as i64));
        out.push(res("euler_q_pairing", format!("l={l} multiple"), lhs.sub(&multiple)));
    }
    Ok(out)
}

fn dilaton_equation(bp: &BigPhase) -> Out {
    let m = model(bp);
    let d = special_field(m, Special::Dilaton, bp.trunc());
    let mut out = Vec::new();
    for g in genera(bp) {
        let mut r = br(bp, g, &[&d])?.sub(&bp.potential(g as u32)?.scale(&int(2 * g - 2)));
        if g == 1 {
            r = r.sub(&konst(bp, m.euler.clone() / int(24)));
        }
        out.push(res("dilaton_equation", format!("g={g}"), r));
    }
    Ok(out)
}

fn l0_equation(bp: &BigPhase) -> Out {
    let m = model(bp);
    let l0 = special_field(m, Special::L0, bp.trunc());
    let mut out = Vec::new();
    for g in genera(bp) {
        let mut r = br(bp, g, &[&l0])?;
        if g == 0 {
            r = r.add(&c_t0_t0(bp).scale(&rat(1, 2)));
        }
        if g == 1 {
            r = r.add(&konst(bp, m.l0_constant()));
        }
        out.push(res("l0_equation", format!("g={g}"), r));
    }
    Ok(out)
}

fn field_residue(family: &'static str, label: String, w: &VectorField) -> Vec<IdentityResidue> {
    if w.is_zero() {
        return vec![res(family, label, Series::zero(w.truncation()))];
    }
    w.iter().map(|(&(k, a), f)| res(family, format!("{label} tau_{k}(phi_{})", a + 1), f.clone())).collect()
}

fn t_power_l0(bp: &BigPhase) -> Out {
    let m = model(bp);
    let l0 = special_field(m, Special::L0, bp.trunc());
    let mut out = Vec::new();
    for l in 1..=2u32 {
        let mut rhs = tau_shift(&l0, Shift::Plus, 2 * l);
        for i in 0..2 * l {
            for a in 0..m.n {
                let mut coef = br(bp, 0, &[&q_op(m, &basis(bp, i, a))])?;
                if i == 0 {
                    coef.add_assign(&c_t0(bp, a));
                }
                let f = dual(bp, (2 * l - 1 - i) as i64, a).mul_series(&coef.scale(&sign(i as i64)));
                rhs = rhs.add(&f);
            }
        }
        let diff = bp.t_pow(&l0, 2 * l)?.sub(&rhs);
        out.extend(field_residue("t_power_l0", format!("l={l}"), &diff));
    }
    Ok(out)
}

fn t_power_dilaton(bp: &BigPhase) -> Out {
    let m = model(bp);
    let d = special_field(m, Special::Dilaton, bp.trunc());
    let mut out = Vec::new();
    for l in 1..=2u32 {
        let mut rhs = tau_shift(&d, Shift::Plus, 2 * l);
        for i in 0..2 * l {
            for a in 0..m.n {
                let coef = br(bp, 0, &[&dual(bp, i as i64, a)])?.scale(&sign(i as i64));
                rhs = rhs.add(&basis(bp, 2 * l - 1 - i, a).mul_series(&coef));
            }
        }
        let diff = bp.t_pow(&d, 2 * l)?.sub(&rhs);
        out.extend(field_residue("t_power_dilaton", format!("l={l}"), &diff));
    }
    Ok(out)
}

/// `(Q T^k - T^k Q)(W) = k T^k(W) + T^{k-1}(X ∙ W)`.
fn q_t_exchange(bp: &BigPhase) -> Out {
    let m = model(bp);
    let x = special_field(m, Special::Euler, bp.trunc());
    let mut out = Vec::new();
    for k in 1..=2u32 {
        for n in 0..=2u32 {
            for a in 0..m.n {
                let w = basis(bp, n, a);
                let lhs = q_op(m, &bp.t_pow(&w, k)?).sub(&bp.t_pow(&q_op(m, &w), k)?);
                let xw = bp.quantum_product(&x, &w)?;
                let rhs = bp.t_pow(&w, k)?.scale(&int(k as i64)).add(&bp.t_pow(&xw, k - 1)?);
                out.extend(field_residue("q_t_exchange", format!("k={k} W=tau_{n}(phi_{})", a + 1), &lhs.sub(&rhs)));
            }
        }
    }
    Ok(out)
}

fn trr_t_form(bp: &BigPhase) -> Out {
    let m = model(bp);
    let mut out = Vec::new();
    for n in 0..=3u32 {
        for a in 0..m.n {
            let tw = bp.t_op(&basis(bp, n, a))?;
            for rest in index_tuples(m, 2, 3) {
                let f0 = basis(bp, rest[0].0, rest[0].1);
                let f1 = basis(bp, rest[1].0, rest[1].1);
                let r = br(bp, 0, &[&tw, &f0, &f1])?;
                out.push(res("genus0_trr_t_form", format!("T(tau_{n}(phi_{})) {}", a + 1, label(&rest)), r));
            }
        }
    }
    Ok(out)
}

fn rearrangement(bp: &BigPhase) -> Out {
    let m = model(bp);
    let mut out = Vec::new();
    for g in 1..=bp.genus_max() as i64 {
        for l in 1..=2u32 {
            let mut lhs = Series::zero(bp.trunc());
            let mut rhs = Series::zero(bp.trunc());
            for j in 0..2 * l {
                for a in 0..m.n {
                    let s = sign(j as i64);
                    let d = dual(bp, (2 * l - 1 - j) as i64, a);
                    let q = q_op(m, &basis(bp, j, a));
                    let dg = br(bp, g, &[&d])?;
                    let q0 = br(bp, 0, &[&q])?;
                    lhs.add_scaled(&dg.mul(&q0), &(&s * rat(1, 2)));
                    lhs.add_scaled(&br(bp, 0, &[&d])?.mul(&br(bp, g, &[&q])?), &(&s * rat(1, 2)));
                    let tj0 = bp.bb(0, &[(j as i64, a)])?;
                    rhs.add_scaled(&tj0.mul(&dg), &(&s * int(-(l as i64))));
                    rhs.add_scaled(&dg.mul(&q0), &s);
                }
            }
            out.push(res("dilaton_l0_rearrangement", format!("g={g} l={l}"), lhs.sub(&rhs)));
        }
    }
    Ok(out)
}

fn t_power_expansion(bp: &BigPhase) -> Out {
    let m = model(bp);
    let mut out = Vec::new();
    for k in 1..=3u32 {
        for n in 0..=2u32 {
            for a in 0..m.n {
                let w = basis(bp, n, a);
                let mut rhs = tau_shift(&w, Shift::Plus, k);
                for i in 0..k {
                    for b in 0..m.n {
                        let c = br(bp, 0, &[&w, &dual(bp, i as i64, b)])?.scale(&-sign(i as i64));
                        rhs = rhs.add(&basis(bp, k - 1 - i, b).mul_series(&c));
                    }
                }
                let diff = bp.t_pow(&w, k)?.sub(&rhs);
                out.extend(field_residue("t_power_expansion", format!("k={k} W=tau_{n}(phi_{})", a + 1), &diff));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlators::Seeds;

    fn tr(genus_max: u32) -> Truncation {
        Truncation { t_deg: 2, max_level: 6, s_deg: 0, genus_max, q_max: 2, ..Default::default() }
    }

    fn failures(v: &[IdentityResidue]) -> Vec<String> {
        v.iter().filter(|r| !r.residue.is_zero()).map(|r| format!("{} {}: {}", r.family, r.label, r.residue)).collect()
    }

    #[test]
    fn point_suite_vanishes() {
        let o = Oracle::new(TargetModel::point(), 0);
        let v = identity_suite(&o, tr(2)).unwrap();
        assert!(v.len() > 100);
        let bad = failures(&v);
        assert!(bad.is_empty(), "{}", bad.join("\n"));
    }

    #[test]
    fn p1_suite_vanishes() {
        let o = Oracle::new(TargetModel::p1(), 2);
        let v = identity_suite(&o, tr(0)).unwrap();
        let bad = failures(&v);
        assert!(bad.is_empty(), "{}", bad.join("\n"));
    }

    #[test]
    fn perturbed_seed_is_detected() {
        let seeds = Seeds { tau0_cubed: int(2), ..Seeds::default() };
        let o = Oracle::with_seeds(TargetModel::point(), 0, seeds);
        let v = identity_families(&o, tr(1), &["dilaton_equation", "genus0_trr_t_form"]).unwrap();
        assert!(!failures(&v).is_empty());
    }
}
