//! Quadratic Hamiltonians of linear maps on Laurent polynomials and their
//! quantization.
//!
//! A vector is `sum c z^r phi_a` with `r` of either sign. Darboux basis:
//! `q_{n,a} = z^n phi_a` and `p_{m,b} = phi^b (-z)^{-m-1}`, with
//! `Omega(p_{m,b}, q_{m,b}) = 1`.

use super::DiffOp;
use crate::exactnum::{int, rat, sign, Rat};
use crate::fock::{t, Monomial, VarId};
use crate::model::TargetModel;
use num::{One, Zero};
use std::collections::BTreeMap;

/// `(power of z, basis index) -> coefficient`.
pub type LoopVec = BTreeMap<(i64, usize), Rat>;

#[derive(Debug, Clone, PartialEq)]
pub enum SymplecticSymbol {
    Zero,
    /// Multiplication by `z^i`.
    ZPow(i64),
    /// `l_n = l_0 (z l_0)^n` for `n >= 0`, `l_{-1} = z^{-1}`.
    Ln(i64),
    /// `{A, B} = A o B - B o A`.
    Bracket(Box<SymplecticSymbol>, Box<SymplecticSymbol>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuantizeError {
    #[error("symbol is not infinitesimally symplectic on ({0}, {1})")]
    NotSymplectic(String, String),
}

fn push(v: &mut LoopVec, key: (i64, usize), c: Rat) {
    if c.is_zero() {
        return;
    }
    let e = v.entry(key).or_insert_with(Rat::zero);
    *e += c;
    if e.is_zero() {
        v.remove(&key);
    }
}

fn l0(m: &TargetModel, v: &LoopVec) -> LoopVec {
    let mut out = LoopVec::new();
    for (&(r, a), c) in v {
        push(&mut out, (r, a), c * (int(r) + m.b_lower(a)));
        for (b, cc) in m.c1_times(a) {
            push(&mut out, (r - 1, b), c * cc);
        }
    }
    out
}

fn zpow(i: i64, v: &LoopVec) -> LoopVec {
    v.iter().map(|(&(r, a), c)| ((r + i, a), c.clone())).collect()
}

impl SymplecticSymbol {
    pub fn bracket(a: SymplecticSymbol, b: SymplecticSymbol) -> Self {
        SymplecticSymbol::Bracket(Box::new(a), Box::new(b))
    }

    pub fn apply(&self, m: &TargetModel, v: &LoopVec) -> LoopVec {
        match self {
            SymplecticSymbol::Zero => LoopVec::new(),
            SymplecticSymbol::ZPow(i) => zpow(*i, v),
            SymplecticSymbol::Ln(n) if *n < 0 => zpow(-1, v),
            SymplecticSymbol::Ln(n) => {
                let mut w = l0(m, v);
                for _ in 0..*n {
                    w = l0(m, &zpow(1, &w));
                }
                w
            }
            SymplecticSymbol::Bracket(a, b) => {
                let mut ab = a.apply(m, &b.apply(m, v));
                for (k, c) in b.apply(m, &a.apply(m, v)) {
                    push(&mut ab, k, -c);
                }
                ab
            }
        }
    }
}

/// Darboux coordinate label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    Q(u32, usize),
    P(u32, usize),
}

impl Coord {
    fn label(&self) -> (u32, usize) {
        match self {
            Coord::Q(l, a) | Coord::P(l, a) => (*l, *a),
        }
    }

    fn is_p(&self) -> bool {
        matches!(self, Coord::P(..))
    }
}

/// Quadratic form in Darboux coordinates: sorted coordinate pair -> coefficient.
pub type Quadratic = BTreeMap<(Coord, Coord), Rat>;

fn basis_vector(m: &TargetModel, c: Coord) -> LoopVec {
    let mut v = LoopVec::new();
    match c {
        Coord::Q(n, a) => push(&mut v, (n as i64, a), Rat::one()),
        Coord::P(mm, b) => {
            // phi^b (-z)^{-m-1} = (-1)^{m+1} sum_g eta^{bg} z^{-m-1} phi_g
            let s = sign(mm as i64 + 1);
            for (g, e) in m.dual(b) {
                push(&mut v, (-(mm as i64) - 1, g), &s * e);
            }
        }
    }
    v
}

/// `Omega(v, e)` for a basis vector `e`.
fn omega_with_basis(m: &TargetModel, v: &LoopVec, e: Coord) -> Rat {
    match e {
        // coefficient of p_{n,a} in v
        Coord::Q(n, a) => {
            // z^{-n-1} phi_g = (-1)^{n+1} sum_b eta_{gb} p_{n,b}
            let mut acc = Rat::zero();
            for g in 0..m.n {
                if let Some(c) = v.get(&(-(n as i64) - 1, g)) {
                    acc += c * &m.eta[g][a] * sign(n as i64 + 1);
                }
            }
            acc
        }
        // minus the coefficient of q_{n,a} in v
        Coord::P(n, a) => -v.get(&(n as i64, a)).cloned().unwrap_or_else(Rat::zero),
    }
}

fn window(m: &TargetModel, cap: u32) -> Vec<Coord> {
    let mut out = Vec::new();
    for l in 0..=cap {
        for a in 0..m.n {
            out.push(Coord::Q(l, a));
            out.push(Coord::P(l, a));
        }
    }
    out
}

/// Checks `Omega(A e_i, e_j) + Omega(e_i, A e_j) = 0` on window basis pairs.
pub fn check_symplectic(sym: &SymplecticSymbol, m: &TargetModel, cap: u32) -> Result<(), QuantizeError> {
    let basis = window(m, cap);
    let images: Vec<LoopVec> = basis.iter().map(|&c| sym.apply(m, &basis_vector(m, c))).collect();
    for (i, &ei) in basis.iter().enumerate() {
        for (j, &ej) in basis.iter().enumerate() {
            let lhs = omega_with_basis(m, &images[i], ej);
            let rhs = -omega_with_basis(m, &images[j], ei);
            if lhs + rhs != Rat::zero() {
                return Err(QuantizeError::NotSymplectic(format!("{ei:?}"), format!("{ej:?}")));
            }
        }
    }
    Ok(())
}

/// `h_A(f) = (1/2) Omega(A f, f)` restricted to window coordinates.
pub fn hamiltonian(sym: &SymplecticSymbol, m: &TargetModel, cap: u32) -> Quadratic {
    let basis = window(m, cap);
    let mut h = Quadratic::new();
    for &ei in &basis {
        let img = sym.apply(m, &basis_vector(m, ei));
        if img.is_empty() {
            continue;
        }
        for &ej in &basis {
            let c = omega_with_basis(m, &img, ej);
            if c.is_zero() {
                continue;
            }
            let key = if ei <= ej { (ei, ej) } else { (ej, ei) };
            let e = h.entry(key).or_insert_with(Rat::zero);
            *e += c * rat(1, 2);
        }
    }
    h.retain(|_, c| !c.is_zero());
    h
}

fn tvar(c: Coord) -> VarId {
    let (l, a) = c.label();
    t(l, a)
}

/// `qq -> qq/hbar^2`, `qp -> q d`, `pp -> hbar^2 d d`.
pub fn quantize_quadratic(h: &Quadratic) -> DiffOp {
    let mut op = DiffOp::zero();
    for (&(a, b), c) in h {
        match (a.is_p(), b.is_p()) {
            (false, false) => {
                let mono = Monomial::from_pairs([(tvar(a), 1), (tvar(b), 1), (VarId::Hbar, -2)]);
                op.add_term(mono, vec![], c.clone());
            }
            (false, true) => op.add_term(Monomial::var(tvar(a)), vec![tvar(b)], c.clone()),
            (true, false) => op.add_term(Monomial::var(tvar(b)), vec![tvar(a)], c.clone()),
            (true, true) => {
                op.add_term(Monomial::pow(VarId::Hbar, 2), vec![tvar(a), tvar(b)], c.clone())
            }
        }
    }
    op
}

pub fn quantize(sym: &SymplecticSymbol, m: &TargetModel, cap: u32) -> Result<DiffOp, QuantizeError> {
    check_symplectic(sym, m, cap)?;
    Ok(quantize_quadratic(&hamiltonian(sym, m, cap)))
}

/// Cocycle value on Darboux monomials: `C(p_a p_b, q_c q_d)` is 2 when all
/// four labels agree, 1 when `{a,b} = {c,d}` with `a != b`, and antisymmetric.
pub fn cocycle_monomial(x: (Coord, Coord), y: (Coord, Coord)) -> Rat {
    let pp = |p: (Coord, Coord)| p.0.is_p() && p.1.is_p();
    let qq = |p: (Coord, Coord)| !p.0.is_p() && !p.1.is_p();
    let table = |p: (Coord, Coord), q: (Coord, Coord)| -> Rat {
        let (a, b) = (p.0.label(), p.1.label());
        let (c, d) = (q.0.label(), q.1.label());
        if a == b && c == d && a == c {
            int(2)
        } else if a != b && ((a == c && b == d) || (a == d && b == c)) {
            int(1)
        } else {
            int(0)
        }
    };
    if pp(x) && qq(y) {
        table(x, y)
    } else if qq(x) && pp(y) {
        -table(y, x)
    } else {
        int(0)
    }
}

pub fn cocycle(hf: &Quadratic, hg: &Quadratic) -> Rat {
    let mut acc = Rat::zero();
    for (x, cx) in hf {
        for (y, cy) in hg {
            let c = cocycle_monomial(*x, *y);
            if !c.is_zero() {
                acc += cx * cy * c;
            }
        }
    }
    acc
}
