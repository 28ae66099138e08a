use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::point::ApPoint;
use super::sections::{bit, c_of_mask, glue_normalize, shifted_arg};
use super::{DegenerationModel, Result};
use crate::theta::{vartheta_vector, VarthetaVector};

/// What a row of a [`FamilyMatrix`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyRow {
    /// The value vector `phi(P)`.
    Value,
    /// The derivative along the elliptic direction.
    Derivative,
    /// Shift by `epsilon * tau_{beta,g}` for a zero coordinate `beta`.
    Shift { beta: usize, epsilon: i8 },
    /// The direction of a finite coordinate `beta`.
    Direction { beta: usize },
    /// `vartheta(z + r tau'')` for the mask `r`.
    Theta { r: u32 },
    /// `vartheta'(z + r tau'')`.
    ThetaDerivative { r: u32 },
    /// `vartheta(z + epsilon tau_{beta,g} + r tau'')`.
    ThetaShift { r: u32, beta: usize, epsilon: i8 },
}

/// Rows of vectors in `C^d` with their provenance and error bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMatrix {
    pub rows: Vec<Vec<Complex64>>,
    pub labels: Vec<FamilyRow>,
    /// Absolute error bound of each row.
    pub errors: Vec<f64>,
    /// More rows than columns, so independence cannot hold.
    pub exceeds_degree: bool,
}

impl FamilyMatrix {
    fn new() -> Self {
        Self {
            rows: Vec::new(),
            labels: Vec::new(),
            errors: Vec::new(),
            exceeds_degree: false,
        }
    }

    fn push(&mut self, label: FamilyRow, row: Vec<Complex64>, error: f64) {
        self.rows.push(row);
        self.labels.push(label);
        self.errors.push(error);
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.rows.first().map_or(0, Vec::len))
    }
}

fn line(model: &DegenerationModel, z: Complex64, tol: f64, deriv: bool) -> Result<VarthetaVector> {
    Ok(vartheta_vector(
        model.tau_g(),
        z,
        model.d(),
        tol,
        deriv,
        model.theta_config(),
    )?)
}

/// Masks `r` in `S` vanishing on `zeroed`.
fn masks_avoiding(h: usize, zeroed: &[usize]) -> impl Iterator<Item = u32> + '_ {
    (0..1u32 << h).filter(move |&r| zeroed.iter().all(|&i| !bit(r, i)))
}

/// The `g + h + 1` vectors spanning the projective image of the tangent
/// space of `A_p` at `P` under `phi`, for `P` on the stratum `h`.
///
/// With `Z` the zero coordinates of the normalized point and `L` the
/// finite nonzero ones, sums run over `r` in `S` with `r_Z = 0` and carry
/// the weight `c_r prod_{l in L} u_l^{r_l} v_l^{1 - r_l}`:
/// the value row, the `vartheta'` row, rows at `z + eps tau_{beta,g}`
/// with the extra factor `prod_{j in L} t_{beta j}^{eps r_j}` for each
/// `beta` in `Z`, and rows restricted to `r_beta = 1` for each `beta` in `L`.
pub fn tangent_family(model: &DegenerationModel, p: &ApPoint, tol: f64) -> Result<FamilyMatrix> {
    let p = glue_normalize(model, p)?;
    let h = model.g() - 1;
    let zeros = p.special().to_vec();
    let finite = p.finite().to_vec();
    let coords = p.coords();
    let z = p.z();

    let masks: Vec<u32> = masks_avoiding(h, &zeros).collect();
    let weight = |r: u32| {
        finite.iter().fold(c_of_mask(model, r), |w, &l| {
            w * if bit(r, l) { coords[l].u } else { coords[l].v }
        })
    };
    let base: Vec<VarthetaVector> = masks
        .iter()
        .map(|&r| line(model, shifted_arg(model, z, r), tol, true))
        .collect::<Result<_>>()?;

    let d = model.d() as usize;
    let mut out = FamilyMatrix::new();
    let accumulate = |terms: &mut dyn Iterator<Item = (Complex64, &[Complex64], f64)>| {
        let mut row = vec![Complex64::new(0.0, 0.0); d];
        let mut err = 0.0;
        for (w, vals, e) in terms {
            for (acc, x) in row.iter_mut().zip(vals) {
                *acc += w * x;
            }
            err += w.norm() * e;
        }
        (row, err)
    };

    let (row, err) = accumulate(
        &mut masks
            .iter()
            .zip(&base)
            .map(|(&r, v)| (weight(r), &v.values[..], v.value_error())),
    );
    out.push(FamilyRow::Value, row, err);
    let (row, err) = accumulate(
        &mut masks
            .iter()
            .zip(&base)
            .map(|(&r, v)| (weight(r), &v.derivatives[..], v.derivative_error())),
    );
    out.push(FamilyRow::Derivative, row, err);

    for &beta in &zeros {
        for epsilon in [-1i8, 1] {
            let shift = model.tau_dprime(beta) * f64::from(epsilon);
            let shifted: Vec<VarthetaVector> = masks
                .iter()
                .map(|&r| line(model, shifted_arg(model, z + shift, r), tol, false))
                .collect::<Result<_>>()?;
            let factor = |r: u32| {
                finite
                    .iter()
                    .filter(|&&j| bit(r, j))
                    .fold(Complex64::new(1.0, 0.0), |f, &j| {
                        let t = model.nome(beta, j);
                        f * if epsilon > 0 { t } else { t.inv() }
                    })
            };
            let (row, err) = accumulate(
                &mut masks
                    .iter()
                    .zip(&shifted)
                    .map(|(&r, v)| (weight(r) * factor(r), &v.values[..], v.value_error())),
            );
            out.push(FamilyRow::Shift { beta, epsilon }, row, err);
        }
    }

    for &beta in &finite {
        let (row, err) = accumulate(
            &mut masks
                .iter()
                .zip(&base)
                .filter(|(&r, _)| bit(r, beta))
                .map(|(&r, v)| (weight(r), &v.values[..], v.value_error())),
        );
        out.push(FamilyRow::Direction { beta }, row, err);
    }
    out.exceeds_degree = out.rows.len() > d;
    Ok(out)
}

/// The `2^{g-h} (h+1)` vectors `vartheta(z + r tau'')`, `vartheta'(z + r tau'')`
/// and `vartheta(z + eps tau_{beta,g} + r tau'')` over `r` in `S` with
/// `r_0 = ... = r_{h-1} = 0`, `beta < h`, `eps = -1, 1`.
pub fn theta_vector_family(
    model: &DegenerationModel,
    z: Complex64,
    h: usize,
    tol: f64,
) -> Result<FamilyMatrix> {
    let n = model.g() - 1;
    if h > n {
        return Err(super::DegenerationError::InvalidPoint(
            "stratum exceeds g - 1",
        ));
    }
    let zeroed: Vec<usize> = (0..h).collect();
    let mut out = FamilyMatrix::new();
    for r in masks_avoiding(n, &zeroed) {
        let at = shifted_arg(model, z, r);
        let v = line(model, at, tol, true)?;
        out.push(FamilyRow::Theta { r }, v.values.clone(), v.value_error());
        out.push(
            FamilyRow::ThetaDerivative { r },
            v.derivatives.clone(),
            v.derivative_error(),
        );
        for beta in 0..h {
            for epsilon in [-1i8, 1] {
                let s = line(
                    model,
                    at + model.tau_dprime(beta) * f64::from(epsilon),
                    tol,
                    false,
                )?;
                let err = s.value_error();
                out.push(FamilyRow::ThetaShift { r, beta, epsilon }, s.values, err);
            }
        }
    }
    out.exceeds_degree = out.rows.len() > model.d() as usize;
    Ok(out)
}
