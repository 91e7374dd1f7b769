//! Hurwitz zeta by Euler-Maclaurin, spectral zeta functions of descending
//! arithmetic progressions with signed multiplicities, their regularized
//! determinants, and the comparison with archimedean Gamma factors.

use std::collections::BTreeMap;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arch::ConeModel;
use crate::error::{Error, Result};
use crate::gamma::{ln_gamma, ln_gamma_c};
use crate::scalar::{Field, Real};

type C64 = Complex<f64>;

// B_2, B_4, ..., B_30
const BERNOULLI: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

const EM_TERMS: usize = 12;

fn direct_terms<T: Real>(z: Complex<T>, q: Complex<T>) -> usize {
    let zn = z.norm().to_f64().unwrap_or(0.0);
    let shift = (-q.re.to_f64().unwrap_or(0.0)).max(0.0);
    (20.0 + zn + shift).ceil() as usize
}

fn check_shift<T: Real>(q: Complex<T>) -> Result<()> {
    if q.re > T::zero() && q.re.is_finite() && q.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidShift(format!("{q}")))
    }
}

/// `sum_{n >= 0} (n + q)^{-z}`, analytically continued, `Re q > 0`.
pub fn hurwitz_zeta<T: Real>(z: Complex<T>, q: Complex<T>) -> Result<Complex<T>> {
    check_shift(q)?;
    let one = Complex::new(T::one(), T::zero());
    if z == one {
        return Err(Error::Pole("Hurwitz zeta at z = 1"));
    }
    let n = direct_terms(z, q);
    let mut sum = Complex::new(T::zero(), T::zero());
    for k in 0..n {
        let base = q + T::from_usize(k).expect("small index");
        sum = sum + (-z * base.ln()).exp();
    }
    let a = q + T::from_usize(n).expect("small index");
    let ln_a = a.ln();
    let a_neg_z = (-z * ln_a).exp();
    sum = sum + a * a_neg_z / (z - one) + a_neg_z * T::lit(0.5);
    // sum_k B_{2k}/(2k)! (z)_{2k-1} a^{-z-2k+1}
    let inv_a2 = (a * a).inv();
    let mut poch = z; // (z)_{2k-1}
    let mut fact = T::lit(2.0); // (2k)!
    let mut power = a_neg_z / a; // a^{-z-2k+1}
    for (k, b) in BERNOULLI.iter().take(EM_TERMS).enumerate() {
        let kk = T::from_usize(2 * k + 2).expect("small index");
        if k > 0 {
            let lo = z + (kk - T::lit(3.0));
            poch = poch * lo * (lo + T::one());
            fact = fact * kk * (kk - T::one());
            power = power * inv_a2;
        }
        sum = sum + poch * power * (T::lit(*b) / fact);
    }
    Ok(sum)
}

pub fn hurwitz_zeta_real(z: f64, q: f64) -> Result<f64> {
    Ok(hurwitz_zeta(Complex::new(z, 0.0), Complex::new(q, 0.0))?.re)
}

/// `d/dz zeta_H(z, q)` at `z = 0` by differentiating the Euler-Maclaurin
/// continuation term by term.
pub fn hurwitz_dz_at_0_complex<T: Real>(q: Complex<T>) -> Result<Complex<T>> {
    check_shift(q)?;
    let zero = Complex::new(T::zero(), T::zero());
    let n = direct_terms(zero, q);
    let mut sum = zero;
    for k in 0..n {
        sum = sum - (q + T::from_usize(k).expect("small index")).ln();
    }
    let a = q + T::from_usize(n).expect("small index");
    let ln_a = a.ln();
    sum = sum + a * ln_a - a - ln_a * T::lit(0.5);
    let inv_a2 = (a * a).inv();
    let mut power = a.inv(); // a^{1-2k}
    for (k, b) in BERNOULLI.iter().take(EM_TERMS).enumerate() {
        if k > 0 {
            power = power * inv_a2;
        }
        let kk = T::from_usize(2 * k + 2).expect("small index");
        sum = sum + power * (T::lit(*b) / (kk * (kk - T::one())));
    }
    Ok(sum)
}

pub fn hurwitz_dz_at_0<T: Real>(q: T) -> Result<T> {
    Ok(hurwitz_dz_at_0_complex(Complex::new(q, T::zero()))?.re)
}

/// Closed form `ln Gamma(q) - ln(2 pi) / 2` of the same derivative.
pub fn lerch_dz_at_0<T: Real>(q: Complex<T>) -> Result<Complex<T>> {
    check_shift(q)?;
    let two_pi = T::PI() + T::PI();
    Ok(ln_gamma(q)? - two_pi.ln() * T::lit(0.5))
}

/// A descending progression `top, top - 1, top - 2, ...` of eigenvalues,
/// each with signed multiplicity `mult`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Family {
    pub top: f64,
    pub mult: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralMultiplicities {
    families: Vec<Family>,
    scale: f64,
}

impl SpectralMultiplicities {
    /// Families with equal tops are merged; zero multiplicities dropped.
    pub fn new(families: impl IntoIterator<Item = Family>, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Config(format!("spectral scale must be positive, got {scale}")));
        }
        let mut merged: Vec<Family> = Vec::new();
        for f in families {
            if !f.top.is_finite() {
                return Err(Error::Config("non-finite eigenvalue".into()));
            }
            match merged.iter_mut().find(|m| m.top == f.top) {
                Some(m) => m.mult += f.mult,
                None => merged.push(f),
            }
        }
        merged.retain(|f| f.mult != 0);
        merged.sort_by(|a, b| b.top.total_cmp(&a.top));
        Ok(Self { families: merged, scale })
    }

    /// Scale `1/(2 pi)` of the spectral zeta function in the determinant
    /// formula.
    pub fn with_two_pi_scale(families: impl IntoIterator<Item = Family>) -> Result<Self> {
        Self::new(families, 1.0 / (2.0 * std::f64::consts::PI))
    }

    pub fn empty() -> Self {
        Self { families: Vec::new(), scale: 1.0 }
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.families.is_empty() {
            return Ok(other.clone());
        }
        if other.families.is_empty() {
            return Ok(self.clone());
        }
        if self.scale != other.scale {
            return Err(Error::Config("cannot merge spectra with different scales".into()));
        }
        Self::new(self.families.iter().chain(&other.families).copied(), self.scale)
    }

    fn shifts(&self, s: C64) -> Result<Vec<(C64, f64)>> {
        self.families
            .iter()
            .map(|f| {
                let q = s - f.top;
                if q.re <= 0.0 {
                    Err(Error::Pole("spectral zeta: an eigenvalue is not below s"))
                } else {
                    Ok((q, f.mult as f64))
                }
            })
            .collect()
    }
}

/// `sum_families m sum_{n >= 0} ((s - top + n) scale)^{-z}`.
pub fn spectral_zeta(mults: &SpectralMultiplicities, s: C64, z: C64) -> Result<C64> {
    let ln_c = mults.scale.ln();
    let mut out = C64::new(0.0, 0.0);
    for (q, m) in mults.shifts(s)? {
        out += (-z * ln_c).exp() * hurwitz_zeta(z, q)? * m;
    }
    Ok(out)
}

/// `d/dz spectral_zeta` at `z = 0` through the Euler-Maclaurin derivative.
pub fn spectral_zeta_dz_at_0(mults: &SpectralMultiplicities, s: C64) -> Result<C64> {
    let ln_c = mults.scale.ln();
    let mut out = C64::new(0.0, 0.0);
    for (q, m) in mults.shifts(s)? {
        // zeta_H(0, q) = 1/2 - q
        out += (hurwitz_dz_at_0_complex(q)? - (C64::new(0.5, 0.0) - q) * ln_c) * m;
    }
    Ok(out)
}

/// The same derivative from the Lerch closed form.
pub fn spectral_zeta_dz_at_0_lerch(mults: &SpectralMultiplicities, s: C64) -> Result<C64> {
    let ln_c = mults.scale.ln();
    let mut out = C64::new(0.0, 0.0);
    for (q, m) in mults.shifts(s)? {
        out += (lerch_dz_at_0(q)? - (C64::new(0.5, 0.0) - q) * ln_c) * m;
    }
    Ok(out)
}

/// The same derivative by a central difference in `z` with step `h`.
pub fn spectral_zeta_dz_at_0_fd(mults: &SpectralMultiplicities, s: C64, h: f64) -> Result<C64> {
    let plus = spectral_zeta(mults, s, C64::new(h, 0.0))?;
    let minus = spectral_zeta(mults, s, C64::new(-h, 0.0))?;
    Ok((plus - minus) / (2.0 * h))
}

/// `exp(-d/dz spectral_zeta(s, z)|_{z=0})`.
pub fn regularized_det(mults: &SpectralMultiplicities, s: C64) -> Result<C64> {
    Ok((-spectral_zeta_dz_at_0(mults, s)?).exp())
}

/// Determinant through the three independent derivative paths.
#[derive(Clone, Debug, PartialEq)]
pub struct DetPaths {
    pub euler_maclaurin: C64,
    pub lerch: C64,
    pub finite_difference: C64,
}

pub const FD_STEP: f64 = 1e-5;

pub fn regularized_det_paths(mults: &SpectralMultiplicities, s: C64) -> Result<DetPaths> {
    Ok(DetPaths {
        euler_maclaurin: (-spectral_zeta_dz_at_0(mults, s)?).exp(),
        lerch: (-spectral_zeta_dz_at_0_lerch(mults, s)?).exp(),
        finite_difference: (-spectral_zeta_dz_at_0_fd(mults, s, FD_STEP)?).exp(),
    })
}

/// One factor `Gamma_C(s - shift)^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LFactor {
    pub shift: i64,
    pub exponent: i64,
}

/// A product of `Gamma_C` factors.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LFactorSpec {
    pub factors: Vec<LFactor>,
}

impl LFactorSpec {
    pub fn new(factors: Vec<LFactor>) -> Result<Self> {
        if factors.iter().any(|f| f.exponent == 0) {
            return Err(Error::Config("L-factor exponents must be nonzero".into()));
        }
        Ok(Self { factors })
    }

    pub fn single(shift: i64, exponent: i64) -> Self {
        Self { factors: vec![LFactor { shift, exponent }] }
    }

    pub fn ln_value(&self, s: C64) -> Result<C64> {
        let mut out = C64::new(0.0, 0.0);
        for f in &self.factors {
            out += ln_gamma_c(s - f.shift as f64)? * f.exponent as f64;
        }
        Ok(out)
    }

    pub fn value(&self, s: C64) -> Result<C64> {
        Ok(self.ln_value(s)?.exp())
    }

    /// Product with `other^sign`.
    pub fn combine(&self, other: &Self, sign: i64) -> Self {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().map(|f| LFactor { shift: f.shift, exponent: sign * f.exponent }));
        Self { factors }
    }
}

/// Archimedean factors of `H^0`, `H^1`, `H^2` of a curve at a complex place.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LFactorTable {
    pub h0: LFactorSpec,
    pub h1: LFactorSpec,
    pub h2: LFactorSpec,
}

impl LFactorTable {
    /// `Gamma_C(s)`, `Gamma_C(s)^{2g}`, `Gamma_C(s - 1)`.
    pub fn standard(genus: usize) -> Self {
        Self {
            h0: LFactorSpec::single(0, 1),
            h1: LFactorSpec::single(0, 2 * genus as i64),
            h2: LFactorSpec::single(1, 1),
        }
    }

    /// `L(H^1) / (L(H^0) L(H^2))`.
    pub fn ratio(&self) -> LFactorSpec {
        self.h1.combine(&self.h0, -1).combine(&self.h2, -1)
    }
}

/// Per-eigenvalue traces `Tr(sigma_2(-id) Pi(lambda))` on `H^-` and the
/// families inferred from them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelMultiplicities {
    pub traces: BTreeMap<i64, i64>,
    pub multiplicities: SpectralMultiplicities,
}

/// Reads the signed multiplicities of `P_- Phi` weighted by
/// `a = sigma_2(-id)` off the archimedean model.
pub fn multiplicities_from_model(model: &ConeModel) -> Result<ModelMultiplicities> {
    let basis = model.sigma_stable_basis();
    let minus_id = [[-1i64, 0], [0, -1]].map(|r| r.map(<crate::Rational as Field>::from_int));
    let a = model.sigma2_matrix(&basis, &minus_id)?;
    let labels = model.basis();
    let (p_min, _) = model.window();
    let mut traces: BTreeMap<i64, i64> = BTreeMap::new();
    for (i, &g) in basis.iter().enumerate() {
        let (pc, _) = labels[g];
        if !pc.is_minus() {
            continue;
        }
        let entry = a.get(i, i);
        let v: i64 = num_traits::ToPrimitive::to_i64(&entry.to_integer()).ok_or(Error::Overflow("trace"))?;
        *traces.entry(pc.phi()).or_insert(0) += v;
    }
    // lambdas at the lower edge lose tower partners and are not reliable
    traces.retain(|&l, _| l > p_min);
    if traces.is_empty() {
        return Err(Error::Unstabilized);
    }
    let mut families = Vec::new();
    let mut running = 0i64;
    let mut stable_run = 0;
    for (&lambda, &t) in traces.iter().rev() {
        let residual = t - running;
        if residual != 0 {
            families.push(Family { top: lambda as f64, mult: residual });
            running = t;
            stable_run = 0;
        } else {
            stable_run += 1;
        }
    }
    if stable_run < 2 {
        return Err(Error::Unstabilized);
    }
    Ok(ModelMultiplicities { traces, multiplicities: SpectralMultiplicities::with_two_pi_scale(families)? })
}

/// Window used for the model side of the determinant comparison.
pub fn default_model(genus: usize) -> Result<ConeModel> {
    ConeModel::new(genus, -5, 5)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CValue {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for CValue {
    fn from(c: C64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorizationRow {
    pub s: CValue,
    pub lhs: CValue,
    pub rhs_model: CValue,
    pub rhs_table: CValue,
    pub ratio_to_table: CValue,
    pub abs_err: f64,
    pub rel_err: f64,
    /// Relative deviation of the finite-difference determinant.
    pub fd_rel_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorizationReport {
    pub genus: usize,
    pub families: Vec<Family>,
    pub traces: BTreeMap<i64, i64>,
    pub l_factors: LFactorTable,
    pub rows: Vec<FactorizationRow>,
    pub max_rel_err: f64,
}

impl FactorizationReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.rows.iter().all(|r| r.rel_err < tolerance)
    }
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

/// Compares `det^{-1}` of the model spectrum with the `Gamma_C` product
/// implied by the same multiplicities and with the factor table.
pub fn factorization_report(genus: usize, samples: &[C64], table: Option<LFactorTable>) -> Result<FactorizationReport> {
    let model = default_model(genus)?;
    let mm = multiplicities_from_model(&model)?;
    let mults = mm.multiplicities.clone();
    let table = table.unwrap_or_else(|| LFactorTable::standard(genus));
    let tabulated = table.ratio();
    let implied = LFactorSpec {
        factors: mults.families().iter().map(|f| LFactor { shift: f.top as i64, exponent: f.mult }).collect(),
    };
    let rows = samples
        .par_iter()
        .map(|&s| -> Result<FactorizationRow> {
            let paths = regularized_det_paths(&mults, s)?;
            let lhs = paths.euler_maclaurin.inv();
            let rhs_model = implied.value(s)?;
            let rhs_table = tabulated.value(s)?;
            Ok(FactorizationRow {
                s: s.into(),
                lhs: lhs.into(),
                rhs_model: rhs_model.into(),
                rhs_table: rhs_table.into(),
                ratio_to_table: (lhs / rhs_table).into(),
                abs_err: (lhs - rhs_model).norm(),
                rel_err: rel(lhs, rhs_model),
                fd_rel_err: rel(paths.finite_difference, paths.euler_maclaurin),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_rel_err = rows.iter().map(|r| r.rel_err).fold(0.0, f64::max);
    Ok(FactorizationReport { genus, families: mults.families().to_vec(), traces: mm.traces, l_factors: table, rows, max_rel_err })
}
