//! Exact exponent algebra for the toroidal degeneration of a principally
//! polarized abelian variety.
//!
//! Everything here is integer arithmetic. Monomials in the toroidal
//! coordinates `T_ij` (with `i <= j`) and the torus characters `w_i` are
//! represented by their exponent vectors; multiplying monomials is adding
//! exponents. Arithmetic is checked: an overflow is an error, never a wrap.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

pub mod audit;
mod matrix;

pub use matrix::IntMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("invalid dimension g = {0}")]
    InvalidDimension(usize),
    #[error("invalid polarization degree d = {0}")]
    InvalidDegree(u64),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("star vector entries must lie in {{-1, 0, 1}} and share a sign")]
    InvalidStarVector,
    #[error("coordinate {coordinate}: T^{t_exp} w^{w_exp} is not in the chart ring")]
    NotInChartRing {
        coordinate: usize,
        t_exp: i64,
        w_exp: i64,
    },
    #[error("chart membership needs a restricted monomial; T_{i}{j} has exponent {exp}", i = .pair.0 + 1, j = .pair.1 + 1)]
    OffDiagonalExponent { pair: (usize, usize), exp: i64 },
    #[error("integer overflow in exponent arithmetic")]
    Overflow,
    #[error("dual-basis exponent matrix disagrees with the coordinate-change matrix")]
    DualBasisMismatch,
}

pub type Result<T> = core::result::Result<T, LatticeError>;

/// Number of index pairs `(i, j)` with `i <= j < g`.
pub const fn pair_count(g: usize) -> usize {
    g * (g + 1) / 2
}

/// Position of the unordered pair `{i, j}` in the upper-triangular,
/// row-major layout used by [`MonomialExponents`].
pub fn pair_index(g: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    debug_assert!(j < g);
    // rows 0..i hold sum_{r<i} (g - r) entries
    i * g - i * i.saturating_sub(1) / 2 + (j - i)
}

/// Enumerates index pairs `(i, j)`, `i <= j`, in storage order.
pub fn pairs(g: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..g).flat_map(move |i| (i..g).map(move |j| (i, j)))
}

fn check_dim(g: usize) -> Result<()> {
    if g == 0 {
        Err(LatticeError::InvalidDimension(g))
    } else {
        Ok(())
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(LatticeError::LengthMismatch { expected, found })
    }
}

#[inline]
fn mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(LatticeError::Overflow)
}

#[inline]
fn add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(LatticeError::Overflow)
}

#[inline]
fn sub(a: i64, b: i64) -> Result<i64> {
    a.checked_sub(b).ok_or(LatticeError::Overflow)
}

/// A character exponent `alpha` in `{0, ±1}^g` that is componentwise
/// nonnegative or componentwise nonpositive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StarVector(Vec<i8>);

impl StarVector {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        let in_range = entries.iter().all(|e| (-1..=1).contains(e));
        let nonneg = entries.iter().all(|&e| e >= 0);
        let nonpos = entries.iter().all(|&e| e <= 0);
        if in_range && (nonneg || nonpos) {
            Ok(Self(entries))
        } else {
            Err(LatticeError::InvalidStarVector)
        }
    }

    pub fn zero(g: usize) -> Self {
        Self(vec![0; g])
    }

    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&e| e >= 0)
    }

    fn get(&self, i: usize) -> i64 {
        i64::from(self.0[i])
    }
}

impl fmt::Display for StarVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Exponent data of a monomial `prod T_ij^{t_ij} * prod w_i^{w_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialExponents {
    g: usize,
    t: Vec<i64>,
    w: Vec<i64>,
}

impl MonomialExponents {
    pub fn one(g: usize) -> Self {
        Self {
            g,
            t: vec![0; pair_count(g)],
            w: vec![0; g],
        }
    }

    pub fn from_parts(g: usize, t: Vec<i64>, w: Vec<i64>) -> Result<Self> {
        check_dim(g)?;
        check_len(pair_count(g), t.len())?;
        check_len(g, w.len())?;
        Ok(Self { g, t, w })
    }

    pub fn g(&self) -> usize {
        self.g
    }

    /// Exponent of `T_ij`; `(i, j)` and `(j, i)` name the same variable.
    pub fn t(&self, i: usize, j: usize) -> i64 {
        self.t[pair_index(self.g, i, j)]
    }

    pub fn set_t(&mut self, i: usize, j: usize, exp: i64) {
        let k = pair_index(self.g, i, j);
        self.t[k] = exp;
    }

    pub fn w(&self, i: usize) -> i64 {
        self.w[i]
    }

    pub fn t_exponents(&self) -> &[i64] {
        &self.t
    }

    pub fn w_exponents(&self) -> &[i64] {
        &self.w
    }

    /// `(i, j, exponent)` triples in storage order.
    pub fn t_entries(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        pairs(self.g)
            .zip(self.t.iter())
            .map(|((i, j), &e)| (i, j, e))
    }

    pub fn is_one(&self) -> bool {
        self.t.iter().chain(self.w.iter()).all(|&e| e == 0)
    }

    /// True when no off-diagonal `T_ij` occurs.
    pub fn is_restricted(&self) -> bool {
        self.t_entries().all(|(i, j, e)| i == j || e == 0)
    }

    pub fn all_nonnegative(&self) -> bool {
        self.t.iter().chain(self.w.iter()).all(|&e| e >= 0)
    }

    /// Product of monomials.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        check_len(self.g, other.g)?;
        let t = self
            .t
            .iter()
            .zip(&other.t)
            .map(|(&a, &b)| add(a, b))
            .collect::<Result<Vec<_>>>()?;
        let w = self
            .w
            .iter()
            .zip(&other.w)
            .map(|(&a, &b)| add(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { g: self.g, t, w })
    }

    /// `k`-th power.
    pub fn checked_pow(&self, k: i64) -> Result<Self> {
        let t = self
            .t
            .iter()
            .map(|&a| mul(a, k))
            .collect::<Result<Vec<_>>>()?;
        let w = self
            .w
            .iter()
            .map(|&a| mul(a, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { g: self.g, t, w })
    }

    fn reset(&mut self, g: usize) {
        self.g = g;
        self.t.clear();
        self.t.resize(pair_count(g), 0);
        self.w.clear();
        self.w.resize(g, 0);
    }
}

impl fmt::Display for MonomialExponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, j, e) in self.t_entries().filter(|e| e.2 != 0) {
            if !first {
                write!(f, "·")?;
            }
            first = false;
            write!(f, "T{}{}^{}", i + 1, j + 1, e)?;
        }
        for (i, &e) in self.w.iter().enumerate().filter(|e| *e.1 != 0) {
            if !first {
                write!(f, "·")?;
            }
            first = false;
            write!(f, "w{}^{}", i + 1, e)?;
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Every star vector of length `g`, each once: the `2^g` nonnegative ones
/// (zero first) followed by the `2^g - 1` nonzero nonpositive ones.
pub fn enumerate_star(g: usize) -> Result<Vec<StarVector>> {
    check_dim(g)?;
    if g >= 62 {
        return Err(LatticeError::Overflow);
    }
    let n = 1usize << g;
    let mut out = Vec::with_capacity(2 * n - 1);
    for sign in [1i8, -1] {
        let start = if sign == 1 { 0 } else { 1 };
        for mask in start..n {
            let entries = (0..g)
                .map(|i| if mask >> i & 1 == 1 { sign } else { 0 })
                .collect();
            out.push(StarVector(entries));
        }
    }
    Ok(out)
}

/// Exponents of the character `X^{Phi(y)}` evaluated at the period `z`:
/// `T_ii^{y_i z_i}` and `T_ij^{(y_i - y_j)(z_i - z_j)}` for `i < j`.
pub fn pairing_exponents(y: &[i64], z: &[i64]) -> Result<MonomialExponents> {
    let mut out = MonomialExponents::one(y.len());
    pairing_exponents_into(y, z, &mut out)?;
    Ok(out)
}

/// Buffer-reusing form of [`pairing_exponents`].
pub fn pairing_exponents_into(y: &[i64], z: &[i64], out: &mut MonomialExponents) -> Result<()> {
    check_dim(y.len())?;
    check_len(y.len(), z.len())?;
    let g = y.len();
    out.reset(g);
    let mut k = 0;
    for i in 0..g {
        out.t[k] = mul(y[i], z[i])?;
        k += 1;
        for j in i + 1..g {
            out.t[k] = mul(sub(y[i], y[j])?, sub(z[i], z[j])?)?;
            k += 1;
        }
    }
    Ok(())
}

/// Exponents of `X^{Phi(y) + alpha}(y)`: `T_ii^{y_i (y_i + alpha_i)}` and
/// `T_ij^{(y_i - y_j)(y_i - y_j + alpha_i - alpha_j)}`.
pub fn shifted_self_pairing(y: &[i64], alpha: &StarVector) -> Result<MonomialExponents> {
    let mut out = MonomialExponents::one(y.len());
    shifted_self_pairing_into(y, alpha, &mut out)?;
    Ok(out)
}

pub fn shifted_self_pairing_into(
    y: &[i64],
    alpha: &StarVector,
    out: &mut MonomialExponents,
) -> Result<()> {
    check_dim(y.len())?;
    check_len(y.len(), alpha.len())?;
    let g = y.len();
    out.reset(g);
    let mut k = 0;
    for i in 0..g {
        out.t[k] = mul(y[i], add(y[i], alpha.get(i))?)?;
        k += 1;
        for j in i + 1..g {
            let dy = sub(y[i], y[j])?;
            let da = alpha.get(i) - alpha.get(j);
            out.t[k] = mul(dy, add(dy, da)?)?;
            k += 1;
        }
    }
    Ok(())
}

/// The generator `M_{beta,z}` of the chart ring `R_alpha`.
///
/// Restricted form: `T_i^{z_i (z_i + beta_i)} w_i^{2 z_i + beta_i - alpha_i}`.
/// The unrestricted form also carries
/// `T_ij^{(z_i - z_j)(z_i - z_j + beta_i - beta_j)}` for `i < j`.
pub fn chart_monomial(
    alpha: &StarVector,
    beta: &StarVector,
    z: &[i64],
    restricted: bool,
) -> Result<MonomialExponents> {
    let mut out = MonomialExponents::one(z.len());
    chart_monomial_into(alpha, beta, z, restricted, &mut out)?;
    Ok(out)
}

pub fn chart_monomial_into(
    alpha: &StarVector,
    beta: &StarVector,
    z: &[i64],
    restricted: bool,
    out: &mut MonomialExponents,
) -> Result<()> {
    check_dim(z.len())?;
    check_len(z.len(), alpha.len())?;
    check_len(z.len(), beta.len())?;
    let g = z.len();
    out.reset(g);
    let mut k = 0;
    for i in 0..g {
        out.t[k] = mul(z[i], add(z[i], beta.get(i))?)?;
        k += 1;
        for j in i + 1..g {
            if !restricted {
                let dz = sub(z[i], z[j])?;
                out.t[k] = mul(dz, add(dz, beta.get(i) - beta.get(j))?)?;
            }
            k += 1;
        }
        out.w[i] = sub(add(mul(2, z[i])?, beta.get(i))?, alpha.get(i))?;
    }
    Ok(())
}

/// Nonnegative exponents `(a, b, c)` with `X^a Y^b T^c` equal to one
/// coordinate factor of a chart monomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChartExponents {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

/// Writes one factor `T_i^{t_exp} w_i^{w_exp}` in the chart generators
///
/// ```text
///   alpha >= 0:  X = T^{alpha_i} w,  Y = w^{-1}
///   alpha <= 0:  X = w,              Y = T^{-alpha_i} w^{-1}
/// ```
///
/// choosing the representative with `min(a, b) = 0`.
pub fn chart_factor(alpha_i: i8, t_exp: i64, w_exp: i64) -> Option<ChartExponents> {
    let (x_t, y_t) = if alpha_i >= 0 {
        (i64::from(alpha_i), 0)
    } else {
        (0, -i64::from(alpha_i))
    };
    let (a, b) = if w_exp >= 0 {
        (w_exp, 0)
    } else {
        (0, w_exp.checked_neg()?)
    };
    let c = t_exp
        .checked_sub(a.checked_mul(x_t)?)?
        .checked_sub(b.checked_mul(y_t)?)?;
    (c >= 0).then_some(ChartExponents { a, b, c })
}

/// Expresses a restricted chart monomial in the polynomial generators
/// `X_i, Y_i, T_i` of the chart ring for `alpha`, coordinate by coordinate.
pub fn express_in_chart(alpha: &StarVector, m: &MonomialExponents) -> Result<Vec<ChartExponents>> {
    check_len(alpha.len(), m.g())?;
    if let Some((i, j, exp)) = m.t_entries().find(|&(i, j, e)| i != j && e != 0) {
        return Err(LatticeError::OffDiagonalExponent { pair: (i, j), exp });
    }
    (0..m.g())
        .map(|i| {
            let (t_exp, w_exp) = (m.t(i, i), m.w(i));
            chart_factor(alpha.entries()[i], t_exp, w_exp).ok_or(LatticeError::NotInChartRing {
                coordinate: i,
                t_exp,
                w_exp,
            })
        })
        .collect()
}

/// Multiplies chart exponents back into a restricted monomial.
pub fn chart_product(alpha: &StarVector, factors: &[ChartExponents]) -> Result<MonomialExponents> {
    check_len(alpha.len(), factors.len())?;
    let g = factors.len();
    let mut out = MonomialExponents::one(g);
    for (i, f) in factors.iter().enumerate() {
        let ai = alpha.get(i);
        let (x_t, y_t) = if ai >= 0 { (ai, 0) } else { (0, -ai) };
        let t = add(add(mul(f.a, x_t)?, mul(f.b, y_t)?)?, f.c)?;
        out.set_t(i, i, t);
        out.w[i] = sub(f.a, f.b)?;
    }
    Ok(out)
}

/// The coordinate change between the torus coordinates `t_ij` and the
/// toroidal coordinates `T_ij` of the principal cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToroidalChange {
    pub g: usize,
    /// Row/column labels, `(i, j)` with `i <= j`.
    pub index: Vec<(usize, usize)>,
    /// Row `(i, j)` gives the exponents of `log T_ij` in the `log t_kl`.
    pub exponent_matrix: IntMatrix,
    /// Row `(i, j)` expresses `n'_ij = n_ii + n_jj - n_ij` in the standard basis.
    pub basis_change: IntMatrix,
}

pub fn toroidal_exponent_matrix(g: usize) -> Result<ToroidalChange> {
    check_dim(g)?;
    let n = pair_count(g);
    let index: Vec<_> = pairs(g).collect();
    let mut exponent = IntMatrix::zeros(n, n);
    for (row, &(i, j)) in index.iter().enumerate() {
        if i == j {
            for k in 0..g {
                exponent[(row, pair_index(g, k, i))] = 1;
            }
        } else {
            exponent[(row, pair_index(g, i, j))] = -1;
        }
    }
    let mut basis = IntMatrix::zeros(n, n);
    for (row, &(i, j)) in index.iter().enumerate() {
        basis[(row, pair_index(g, i, i))] += 1;
        basis[(row, pair_index(g, j, j))] += 1;
        basis[(row, pair_index(g, i, j))] -= 1;
    }
    // Dual bases transform by the transpose: log t = B^T log T. Together
    // with the involution this has to coincide with the exponent matrix.
    if basis.transpose() != exponent {
        return Err(LatticeError::DualBasisMismatch);
    }
    Ok(ToroidalChange {
        g,
        index,
        exponent_matrix: exponent,
        basis_change: basis,
    })
}

/// One period `r_i` of the degenerating torus: for each torus coordinate
/// `w_k`, the `T`-monomial by which `r_i` multiplies it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodGenerator {
    pub components: Vec<MonomialExponents>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodLattice {
    pub g: usize,
    pub d: u64,
    pub generators: Vec<PeriodGenerator>,
    /// Coefficients of the generators on the principal basis `r_1, ..., r_g`.
    pub coefficients: IntMatrix,
}

impl PeriodLattice {
    /// Index of this lattice in the principal period lattice.
    pub fn index(&self) -> Result<i64> {
        self.coefficients.determinant().map(i64::abs)
    }
}

/// Period lattice `<r_1, ..., r_{g-1}, r_g^d>` with
/// `r_i = (T_1i^{-1}, ..., prod_k T_ki, ..., T_gi^{-1})`.
pub fn period_lattice(g: usize, d: u64) -> Result<PeriodLattice> {
    check_dim(g)?;
    if d == 0 {
        return Err(LatticeError::InvalidDegree(d));
    }
    let power = i64::try_from(d).map_err(|_| LatticeError::Overflow)?;
    let mut generators = Vec::with_capacity(g);
    for i in 0..g {
        let components = (0..g)
            .map(|k| {
                let mut m = MonomialExponents::one(g);
                if k == i {
                    for l in 0..g {
                        m.set_t(l, i, 1);
                    }
                } else {
                    m.set_t(k, i, -1);
                }
                if i + 1 == g {
                    m.checked_pow(power)
                } else {
                    Ok(m)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        generators.push(PeriodGenerator { components });
    }
    let mut coefficients = IntMatrix::identity(g);
    coefficients[(g - 1, g - 1)] = power;
    Ok(PeriodLattice {
        g,
        d,
        generators,
        coefficients,
    })
}
