//! Cohomological data of a target: grading, pairing, Chern matrix.
//!
//! Matrices use row convention: `chern[a][b]` is the coefficient of `phi_b` in
//! `c_1 * phi_a`. Basis indices are 0-based here and 1-based in user-facing text.

use crate::exactnum::{fmt_rat, int, parse_rat, Rat};
use num::{One, Zero};
use std::collections::HashMap;
use std::fmt;

pub type Matrix = Vec<Vec<Rat>>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("unknown model `{0}`")]
    Unknown(String),
    #[error("basis index {0} out of range")]
    Index(usize),
    #[error("line {line}: {msg}")]
    Config { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChernVariant {
    Mixed,
    Raised,
    Lowered,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetModel {
    pub name: String,
    pub n: usize,
    pub d: i64,
    pub hol_deg: Vec<i64>,
    pub eta: Matrix,
    pub eta_inv: Matrix,
    pub chern: Matrix,
    pub euler: Rat,
    pub cd_integral: Rat,
    pub c1cd1_integral: Rat,
    /// `<c_1, A>` for the unit Novikov degree, if the model has curve classes.
    pub novikov: Option<i64>,
}

pub fn zeros(n: usize) -> Matrix {
    vec![vec![Rat::zero(); n]; n]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rat::one();
    }
    m
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let k = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![Rat::zero(); cols]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..cols {
                if !b[l][j].is_zero() {
                    out[i][j] += &a[i][l] * &b[l][j];
                }
            }
        }
    }
    out
}

pub fn transpose(a: &Matrix) -> Matrix {
    let n = a.len();
    let m = a.first().map_or(0, |r| r.len());
    (0..m).map(|j| (0..n).map(|i| a[i][j].clone()).collect()).collect()
}

pub fn is_symmetric(a: &Matrix) -> bool {
    *a == transpose(a)
}

/// Gauss-Jordan inverse; `None` if singular.
pub fn invert(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut m: Matrix = a.clone();
    let mut inv = identity(n);
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let p = m[col][col].clone();
        for j in 0..n {
            m[col][j] = &m[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in 0..n {
                    let a = &m[col][j] * &f;
                    m[r][j] -= a;
                    let b = &inv[col][j] * &f;
                    inv[r][j] -= b;
                }
            }
        }
    }
    Some(inv)
}

impl TargetModel {
    pub fn point() -> Self {
        TargetModel {
            name: "point".into(),
            n: 1,
            d: 0,
            hol_deg: vec![0],
            eta: identity(1),
            eta_inv: identity(1),
            chern: zeros(1),
            euler: int(1),
            cd_integral: int(1),
            c1cd1_integral: int(0),
            novikov: None,
        }
    }

    pub fn p1() -> Self {
        let eta = vec![vec![int(0), int(1)], vec![int(1), int(0)]];
        let chern = vec![vec![int(0), int(2)], vec![int(0), int(0)]];
        TargetModel {
            name: "p1".into(),
            n: 2,
            d: 1,
            hol_deg: vec![0, 1],
            eta_inv: eta.clone(),
            eta,
            chern,
            euler: int(2),
            cd_integral: int(2),
            c1cd1_integral: int(2),
            novikov: Some(2),
        }
    }

    pub fn builtin(name: &str) -> Result<Self, ModelError> {
        match name {
            "point" | "pt" => Ok(Self::point()),
            "p1" | "P1" => Ok(Self::p1()),
            other => Err(ModelError::Unknown(other.to_string())),
        }
    }

    pub fn has_novikov(&self) -> bool {
        self.novikov.is_some()
    }

    /// `(b_alpha, b^alpha)` with `b_alpha = p_alpha - (d-1)/2`.
    pub fn b_values(&self, alpha: usize) -> Result<(Rat, Rat), ModelError> {
        if alpha >= self.n {
            return Err(ModelError::Index(alpha));
        }
        let b = int(self.hol_deg[alpha]) - Rat::new((self.d - 1).into(), 2.into());
        let bu = Rat::one() - &b;
        Ok((b, bu))
    }

    pub fn b_lower(&self, alpha: usize) -> Rat {
        self.b_values(alpha).expect("basis index").0
    }

    pub fn b_upper(&self, alpha: usize) -> Rat {
        self.b_values(alpha).expect("basis index").1
    }

    /// Eigenvalue of the grading operator on `phi_alpha`: `p_alpha - d/2`.
    pub fn mu(&self, alpha: usize) -> Rat {
        int(self.hol_deg[alpha]) - Rat::new(self.d.into(), 2.into())
    }

    /// Mixed: `C^j`. Lowered: `C^j eta`. Raised: `eta^{-1} C^j`, which is the
    /// pairing `<c_1^j phi^a, phi^b>` and is symmetric.
    pub fn chern_power(&self, j: u32, variant: ChernVariant) -> Matrix {
        let mut m = identity(self.n);
        for _ in 0..j {
            m = mat_mul(&m, &self.chern);
        }
        match variant {
            ChernVariant::Mixed => m,
            ChernVariant::Lowered => mat_mul(&m, &self.eta),
            ChernVariant::Raised => mat_mul(&self.eta_inv, &m),
        }
    }

    /// Index of `phi^alpha` expressed in the basis: `phi^alpha = sum_b eta^{alpha b} phi_b`.
    pub fn dual(&self, alpha: usize) -> Vec<(usize, Rat)> {
        (0..self.n)
            .filter(|&b| !self.eta_inv[alpha][b].is_zero())
            .map(|b| (b, self.eta_inv[alpha][b].clone()))
            .collect()
    }

    /// `c_1 * phi_alpha` as a combination of basis elements.
    pub fn c1_times(&self, alpha: usize) -> Vec<(usize, Rat)> {
        (0..self.n)
            .filter(|&b| !self.chern[alpha][b].is_zero())
            .map(|b| (b, self.chern[alpha][b].clone()))
            .collect()
    }

    /// Constant of `L_0`: `(1/24) * ((3-d)/2 * int c_d - int c_1 c_{d-1})`.
    pub fn l0_constant(&self) -> Rat {
        (Rat::new((3 - self.d).into(), 2.into()) * &self.cd_integral - &self.c1cd1_integral)
            / int(24)
    }

    pub fn validate(&self) -> Result<(), String> {
        let n = self.n;
        let square = |m: &Matrix| m.len() == n && m.iter().all(|r| r.len() == n);
        if self.hol_deg.len() != n || !square(&self.eta) || !square(&self.chern) {
            return Err("dimensions do not match N".into());
        }
        if self.hol_deg.first() != Some(&0) {
            return Err("p_1 must be 0".into());
        }
        if !is_symmetric(&self.eta) {
            return Err("eta is not symmetric".into());
        }
        match invert(&self.eta) {
            Some(inv) if inv == self.eta_inv => {}
            Some(_) => return Err("eta_inv is not the inverse of eta".into()),
            None => return Err("eta is singular".into()),
        }
        for a in 0..n {
            for b in 0..n {
                if !self.eta[a][b].is_zero() && self.hol_deg[a] + self.hol_deg[b] != self.d {
                    return Err(format!("eta[{}][{}] violates the grading", a + 1, b + 1));
                }
                if !self.chern[a][b].is_zero() && self.hol_deg[b] != self.hol_deg[a] + 1 {
                    return Err(format!("chern[{}][{}] violates the grading", a + 1, b + 1));
                }
            }
        }
        if !is_symmetric(&mat_mul(&self.chern, &self.eta)) {
            return Err("chern * eta is not symmetric".into());
        }
        Ok(())
    }

    /// Parses the `key = value` config format. Matrices are row-major with
    /// rows separated by `;`.
    pub fn from_config(text: &str) -> Result<Self, ModelError> {
        let mut fields: HashMap<String, (usize, String)> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ModelError::Config {
                line: i + 1,
                msg: "expected `key = value`".into(),
            })?;
            fields.insert(k.trim().to_string(), (i + 1, v.trim().to_string()));
        }
        let last_line = text.lines().count().max(1);
        let get = |k: &str| {
            fields.get(k).cloned().ok_or(ModelError::Config {
                line: last_line,
                msg: format!("missing key `{k}`"),
            })
        };
        let cfg = |line: usize, msg: String| ModelError::Config { line, msg };
        let scalar = |k: &str| -> Result<Rat, ModelError> {
            let (line, v) = get(k)?;
            parse_rat(&v).map_err(|e| cfg(line, e.to_string()))
        };
        let integer = |k: &str| -> Result<i64, ModelError> {
            let (line, v) = get(k)?;
            v.parse().map_err(|_| cfg(line, format!("`{k}` must be an integer")))
        };
        let matrix = |k: &str| -> Result<(usize, Matrix), ModelError> {
            let (line, v) = get(k)?;
            let m = v
                .split(';')
                .map(|row| {
                    row.split_whitespace()
                        .map(parse_rat)
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Matrix, _>>()
                .map_err(|e| cfg(line, e.to_string()))?;
            Ok((line, m))
        };

        let name = get("name")?.1;
        let n = integer("N")? as usize;
        let d = integer("d")?;
        let (hline, hv) = get("hol_deg")?;
        let hol_deg = hv
            .split_whitespace()
            .map(|x| x.parse::<i64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| cfg(hline, "hol_deg must be integers".into()))?;
        let (eline, eta) = matrix("eta")?;
        let (_, chern) = matrix("chern")?;
        let novikov = match fields.get("novikov") {
            Some((line, v)) if v != "none" => Some(
                v.parse::<i64>()
                    .map_err(|_| cfg(*line, "novikov must be an integer or `none`".into()))?,
            ),
            _ => None,
        };
        let eta_inv = if eta.len() == n && eta.iter().all(|r| r.len() == n) {
            invert(&eta).ok_or_else(|| cfg(eline, "eta is singular".into()))?
        } else {
            return Err(cfg(eline, "eta must be N x N".into()));
        };
        let model = TargetModel {
            name,
            n,
            d,
            hol_deg,
            eta,
            eta_inv,
            chern,
            euler: scalar("euler")?,
            cd_integral: scalar("cd_integral")?,
            c1cd1_integral: scalar("c1cd1_integral")?,
            novikov,
        };
        model.validate().map_err(|msg| cfg(eline, msg))?;
        Ok(model)
    }

    pub fn to_config(&self) -> String {
        let mat = |m: &Matrix| {
            m.iter()
                .map(|r| r.iter().map(fmt_rat).collect::<Vec<_>>().join(" "))
                .collect::<Vec<_>>()
                .join(" ; ")
        };
        let degs: Vec<String> = self.hol_deg.iter().map(|p| p.to_string()).collect();
        format!(
            "name = {}\nN = {}\nd = {}\nhol_deg = {}\neta = {}\nchern = {}\neuler = {}\ncd_integral = {}\nc1cd1_integral = {}\nnovikov = {}\n",
            self.name,
            self.n,
            self.d,
            degs.join(" "),
            mat(&self.eta),
            mat(&self.chern),
            fmt_rat(&self.euler),
            fmt_rat(&self.cd_integral),
            fmt_rat(&self.c1cd1_integral),
            self.novikov.map_or("none".to_string(), |v| v.to_string()),
        )
    }
}

impl fmt::Display for TargetModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: N={} d={} chi={} novikov={}",
            self.name,
            self.n,
            self.d,
            fmt_rat(&self.euler),
            self.novikov.map_or("-".to_string(), |v| v.to_string())
        )
    }
}
