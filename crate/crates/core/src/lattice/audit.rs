//! Exhaustive verification of the lattice identities over bounded boxes.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditBounds {
    /// Largest `g` for the box-enumerated checks.
    pub max_g: usize,
    /// Vector entries range over `[-entry_bound, entry_bound]`.
    pub entry_bound: i64,
    /// Largest `g` for the star-cardinality check.
    pub star_max_g: usize,
    /// Largest `g` for the toroidal-involution and dual-basis check.
    pub involution_max_g: usize,
}

impl Default for AuditBounds {
    fn default() -> Self {
        Self {
            max_g: 5,
            entry_bound: 3,
            star_max_g: 10,
            involution_max_g: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditCheck {
    pub name: &'static str,
    pub cases: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
}

impl AuditCheck {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            cases: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

/// Advances `v` through `[-b, b]^n` in odometer order; false after the last point.
fn advance(v: &mut [i64], b: i64) -> bool {
    for x in v.iter_mut() {
        if *x < b {
            *x += 1;
            return true;
        }
        *x = -b;
    }
    false
}

fn for_each_point(g: usize, b: i64, mut f: impl FnMut(&[i64]) -> Result<()>) -> Result<()> {
    let mut v = vec![-b; g];
    loop {
        f(&v)?;
        if !advance(&mut v, b) {
            return Ok(());
        }
    }
}

pub fn star_cardinality(max_g: usize) -> Result<AuditCheck> {
    let mut check = AuditCheck::new("star-cardinality");
    for g in 1..=max_g {
        let star = enumerate_star(g)?;
        let mut sorted = star.clone();
        sorted.sort();
        sorted.dedup();
        let expected = (1usize << (g + 1)) - 1;
        let ok = star.len() == expected && sorted.len() == expected;
        check.record(ok, || format!("g={g}: {} vectors", star.len()));
    }
    Ok(check)
}

/// `X^{Phi(y)}(z) = X^{Phi(z)}(y)` for all `y, z` in the box.
pub fn pairing_symmetry(max_g: usize, b: i64) -> Result<AuditCheck> {
    let mut check = AuditCheck::new("pairing-symmetry");
    for g in 1..=max_g {
        let mut yz = MonomialExponents::one(g);
        let mut zy = MonomialExponents::one(g);
        let mut z = vec![0; g];
        for_each_point(g, b, |y| {
            // each unordered pair once, the diagonal included
            z.copy_from_slice(y);
            loop {
                pairing_exponents_into(y, &z, &mut yz)?;
                pairing_exponents_into(&z, y, &mut zy)?;
                check.record(yz == zy, || format!("y={y:?} z={z:?}"));
                if !advance(&mut z, b) {
                    break;
                }
            }
            Ok(())
        })?;
    }
    Ok(check)
}

/// `X^{Phi(y)}(y)` has nonnegative exponents, all zero only at `y = 0`.
pub fn pairing_definiteness(max_g: usize, b: i64) -> Result<AuditCheck> {
    let mut check = AuditCheck::new("pairing-definiteness");
    for g in 1..=max_g {
        let mut m = MonomialExponents::one(g);
        for_each_point(g, b, |y| {
            pairing_exponents_into(y, y, &mut m)?;
            let zero = y.iter().all(|&x| x == 0);
            let ok = m.all_nonnegative() && (m.is_one() == zero);
            check.record(ok, || format!("y={y:?}: {m}"));
            Ok(())
        })?;
    }
    Ok(check)
}

/// `X^{Phi(y) + alpha}(y)` has nonnegative exponents for every star vector.
pub fn shifted_positivity(max_g: usize, b: i64) -> Result<AuditCheck> {
    let mut check = AuditCheck::new("shifted-positivity");
    for g in 1..=max_g {
        let star = enumerate_star(g)?;
        let mut m = MonomialExponents::one(g);
        for_each_point(g, b, |y| {
            for alpha in &star {
                shifted_self_pairing_into(y, alpha, &mut m)?;
                check.record(m.all_nonnegative(), || {
                    format!("y={y:?} alpha={alpha}: {m}")
                });
            }
            Ok(())
        })?;
    }
    Ok(check)
}

/// Every restricted chart monomial `M_{beta,z}` lies in the chart ring of
/// `alpha`, and its chart expression multiplies back to it exactly.
pub fn chart_completeness(max_g: usize, b: i64) -> Result<AuditCheck> {
    let mut check = AuditCheck::new("chart-completeness");
    for g in 1..=max_g {
        let star = enumerate_star(g)?;
        let mut m = MonomialExponents::one(g);
        for alpha in &star {
            for beta in &star {
                for_each_point(g, b, |z| {
                    chart_monomial_into(alpha, beta, z, true, &mut m)?;
                    let mut ok = m.is_restricted();
                    for (i, &ai) in alpha.entries().iter().enumerate() {
                        let (t, w) = (m.t(i, i), m.w(i));
                        ok &= match chart_factor(ai, t, w) {
                            Some(f) => {
                                let ai = i64::from(ai);
                                let (xt, yt) = if ai >= 0 { (ai, 0) } else { (0, -ai) };
                                f.a * f.b == 0 && f.a - f.b == w && f.a * xt + f.b * yt + f.c == t
                            }
                            None => false,
                        };
                    }
                    check.record(ok, || format!("alpha={alpha} beta={beta} z={z:?}: {m}"));
                    Ok(())
                })?;
            }
        }
    }
    Ok(check)
}

/// The toroidal coordinate change squares to the identity and equals the
/// transpose of the basis change.
pub fn toroidal_involution(max_g: usize) -> Result<AuditCheck> {
    let mut check = AuditCheck::new("toroidal-involution");
    for g in 1..=max_g {
        let (ok, detail) = match toroidal_exponent_matrix(g) {
            Ok(t) => {
                let sq = t.exponent_matrix.checked_mul(&t.exponent_matrix)?;
                let dual = t.basis_change.transpose() == t.exponent_matrix;
                (sq == IntMatrix::identity(pair_count(g)) && dual, "M^2 != I")
            }
            Err(LatticeError::DualBasisMismatch) => (false, "dual basis mismatch"),
            Err(e) => return Err(e),
        };
        check.record(ok, || format!("g={g}: {detail}"));
    }
    Ok(check)
}

/// Index of the period lattice is `d`, and each generator acts by
/// the expected `T`-monomials.
pub fn period_lattice_index(max_g: usize, max_d: u64) -> Result<AuditCheck> {
    let mut check = AuditCheck::new("period-lattice-index");
    for g in 1..=max_g {
        for d in 1..=max_d {
            let p = period_lattice(g, d)?;
            let idx = p.index()?;
            let ok = idx == d as i64 && p.generators.len() == g;
            check.record(ok, || format!("g={g} d={d}: index {idx}"));
        }
    }
    Ok(check)
}

/// Runs every check within `bounds`.
pub fn run(bounds: &AuditBounds) -> Result<Vec<AuditCheck>> {
    Ok(vec![
        star_cardinality(bounds.star_max_g)?,
        pairing_symmetry(bounds.max_g, bounds.entry_bound)?,
        pairing_definiteness(bounds.max_g, bounds.entry_bound)?,
        shifted_positivity(bounds.max_g, bounds.entry_bound)?,
        chart_completeness(bounds.max_g, bounds.entry_bound)?,
        toroidal_involution(bounds.involution_max_g)?,
        period_lattice_index(bounds.max_g, 16)?,
    ])
}
