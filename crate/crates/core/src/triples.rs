//! Finite sections of the two spectral triples: the archimedean one
//! (`sigma_2` acting on the graded model, Dirac operator `Phi`) and the
//! dynamical one (Cuntz-Krieger isometries and evaluation representations
//! acting on cylinder functions and on periodic-orbit classes, Dirac
//! operator "multiplication by the weight").
//!
//! Cylinder functions of level `n` are functions of the first `n + 1`
//! letters; level `-1` is the line of constants. All dynamical inner
//! products are taken with respect to the Parry measure, which gives every
//! level-`n` cylinder the same mass.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::arch::ConeModel;
use crate::error::{Error, Result};
use crate::linalg::{lanczos_norm, spectral_norm, Matrix};
use crate::scalar::Field;
use crate::schottky::{reduce_word, Alphabet, H3Point, ProjPoint, ReducedWord, SchottkyGroup};
use crate::{Caps, Rational};

/// A finite section of an operator with labelled bases.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedOperator<F: Field> {
    pub name: String,
    /// Description of the domain truncation, e.g. `level 2 cylinders`.
    pub domain: String,
    pub codomain: String,
    pub col_labels: Vec<String>,
    pub row_labels: Vec<String>,
    pub matrix: Matrix<F>,
}

impl<F: Field> TruncatedOperator<F> {
    pub fn new(
        name: impl Into<String>,
        domain: impl Into<String>,
        codomain: impl Into<String>,
        col_labels: Vec<String>,
        row_labels: Vec<String>,
        matrix: Matrix<F>,
    ) -> Result<Self> {
        if matrix.cols() != col_labels.len() {
            return Err(Error::DimensionMismatch { expected: col_labels.len(), found: matrix.cols() });
        }
        if matrix.rows() != row_labels.len() {
            return Err(Error::DimensionMismatch { expected: row_labels.len(), found: matrix.rows() });
        }
        Ok(Self {
            name: name.into(),
            domain: domain.into(),
            codomain: codomain.into(),
            col_labels,
            row_labels,
            matrix,
        })
    }

    pub fn is_exact(&self) -> bool {
        F::EXACT
    }

    pub fn to_f64(&self) -> TruncatedOperator<f64> {
        let m = &self.matrix;
        TruncatedOperator {
            name: self.name.clone(),
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            col_labels: self.col_labels.clone(),
            row_labels: self.row_labels.clone(),
            matrix: Matrix::from_fn(m.rows(), m.cols(), |r, c| m.get(r, c).to_f64()),
        }
    }

    /// Largest singular value for the Euclidean norm of the labelled bases.
    pub fn norm(&self) -> f64 {
        spectral_norm(&self.matrix.to_f64())
    }

    pub fn entry_strings(&self) -> Vec<Vec<String>> {
        (0..self.matrix.rows())
            .map(|r| (0..self.matrix.cols()).map(|c| format_entry(self.matrix.get(r, c))).collect())
            .collect()
    }

    /// CSV with a header row of column labels; the first column holds row
    /// labels.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Config(format!("csv: {e}"));
        let mut header = vec![format!("{} [{} -> {}]", self.name, self.domain, self.codomain)];
        header.extend(self.col_labels.iter().cloned());
        w.write_record(&header).map_err(io)?;
        for r in 0..self.matrix.rows() {
            let mut rec = vec![self.row_labels[r].clone()];
            rec.extend((0..self.matrix.cols()).map(|c| format_entry(self.matrix.get(r, c))));
            w.write_record(&rec).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Config(format!("csv: {e}")))
    }
}

/// Exact entries print as reduced fractions, floating ones in scientific
/// notation with 15 digits.
pub fn format_entry<F: Field>(v: &F) -> String {
    if F::EXACT {
        v.to_string()
    } else {
        format!("{:.15e}", v.to_f64())
    }
}

fn level_dim(alphabet: &Alphabet, level: isize) -> u128 {
    alphabet.count_words((level + 1) as usize)
}

fn level_labels(alphabet: &Alphabet, level: isize) -> Vec<String> {
    let len = (level + 1) as usize;
    (0..level_dim(alphabet, level) as usize)
        .map(|i| ReducedWord::from_trusted(alphabet.word_at(len, i)).display(alphabet))
        .collect()
}

fn check_level(alphabet: &Alphabet, level: isize, caps: &Caps) -> Result<usize> {
    if level < -1 {
        return Err(Error::DimensionMismatch { expected: 0, found: 0 });
    }
    let d = level_dim(alphabet, level);
    caps.check_dim(d)?;
    Ok(d as usize)
}

/// Parry mass of a single level-`n` cylinder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ParryWeight {
    pub genus: usize,
    pub level: isize,
}

impl ParryWeight {
    pub fn new(genus: usize, level: isize) -> Result<Self> {
        Alphabet::new(genus)?;
        if level < -1 {
            return Err(Error::DimensionMismatch { expected: 0, found: 0 });
        }
        Ok(Self { genus, level })
    }

    /// `(2g)^{-1} (2g-1)^{-n}`, and `1` for the constants at level `-1`.
    pub fn weight<F: Field>(&self) -> F {
        if self.level < 0 {
            return F::one();
        }
        let b = 2 * self.genus as i64 - 1;
        let mut den = F::from_int(2 * self.genus as i64);
        for _ in 0..self.level {
            den = den * F::from_int(b);
        }
        F::one() / den
    }

    pub fn total_mass<F: Field>(&self) -> F {
        let al = Alphabet::new(self.genus).expect("validated genus");
        F::from_int(level_dim(&al, self.level) as i64) * self.weight::<F>()
    }

    /// Each cylinder's mass equals the sum over its admissible extensions.
    pub fn refines_consistently(&self) -> bool {
        let al = Alphabet::new(self.genus).expect("validated genus");
        let next = ParryWeight { genus: self.genus, level: self.level + 1 };
        let ext = if self.level < 0 { al.size() } else { al.size() - 1 };
        self.weight::<Rational>() == next.weight::<Rational>() * Rational::from_int(ext as i64)
    }
}

/// Rational core `R_i` of the Koopman isometry from level `m` to `m + 1`:
/// `(R_i xi)(a_0 ... a_{m+1}) = [a_0 = g_i] xi(a_1 ... a_{m+1})`.
/// `i` is 0-based.
pub fn koopman_core<F: Field>(alphabet: &Alphabet, i: usize, m: isize, caps: &Caps) -> Result<Matrix<F>> {
    alphabet.check_symbol(i)?;
    let cols = check_level(alphabet, m, caps)?;
    let rows = check_level(alphabet, m + 1, caps)?;
    let len = (m + 2) as usize;
    let mut mat = Matrix::zeros(rows, cols);
    for r in 0..rows {
        let w = alphabet.word_at(len, r);
        if w[0] == i {
            mat.set(r, alphabet.index_of(&w[1..]), F::one());
        }
    }
    Ok(mat)
}

/// `c_m` with `S_j S_j^* = c_m R_j R_j^T` for the Parry adjoint of the
/// isometry leaving level `m`.
pub fn parry_projection_factor<F: Field>(genus: usize, m: isize) -> F {
    let b = F::from_int(2 * genus as i64 - 1);
    let w_in = ParryWeight { genus, level: m }.weight::<F>();
    let w_out = ParryWeight { genus, level: m + 1 }.weight::<F>();
    b * w_out / w_in
}

/// Normalized Koopman isometry `S_i` (1-based `i`) from level `n` to
/// `n + 1`, scale `(2g-1)^{1/2}` included.
pub fn s_i_koopman(alphabet: &Alphabet, i: usize, n: usize, caps: &Caps) -> Result<TruncatedOperator<f64>> {
    let idx = one_based(alphabet, i)?;
    let core = koopman_core::<f64>(alphabet, idx, n as isize, caps)?;
    let scale = ((alphabet.size() - 1) as f64).sqrt();
    TruncatedOperator::new(
        format!("S_{i} (koopman)"),
        format!("level {n} cylinders"),
        format!("level {} cylinders", n + 1),
        level_labels(alphabet, n as isize),
        level_labels(alphabet, n as isize + 1),
        core.scale(&scale),
    )
}

fn one_based(alphabet: &Alphabet, i: usize) -> Result<usize> {
    if i == 0 || i > alphabet.size() {
        return Err(Error::SymbolOutOfRange { index: i, size: alphabet.size() });
    }
    Ok(i - 1)
}

/// The literal operator `(S_i h)(a_0 ... a_n) = h(g_i^{-1} a_0 ... a_{n-1})
/// [a_0 != g_i]` on level-`n` functions (1-based `i`).
pub fn s_i_literal<F: Field>(alphabet: &Alphabet, i: usize, n: usize, caps: &Caps) -> Result<TruncatedOperator<F>> {
    let idx = one_based(alphabet, i)?;
    let dim = check_level(alphabet, n as isize, caps)?;
    let inv = alphabet.inverse_of(idx);
    let mut mat = Matrix::zeros(dim, dim);
    for r in 0..dim {
        let w = alphabet.word_at(n + 1, r);
        if w[0] == idx {
            continue;
        }
        let mut src = Vec::with_capacity(n + 1);
        src.push(inv);
        src.extend_from_slice(&w[..n]);
        mat.set(r, alphabet.index_of(&src), F::one());
    }
    let labels = level_labels(alphabet, n as isize);
    TruncatedOperator::new(
        format!("S_{i} (literal)"),
        format!("level {n} cylinders"),
        format!("level {n} cylinders"),
        labels.clone(),
        labels,
        mat,
    )
}

/// Inclusion of level-`(n-1)` functions into level `n` (forget the last
/// letter).
pub fn lift_matrix<F: Field>(alphabet: &Alphabet, n: usize, caps: &Caps) -> Result<Matrix<F>> {
    let rows = check_level(alphabet, n as isize, caps)?;
    let cols = check_level(alphabet, n as isize - 1, caps)?;
    let mut mat = Matrix::zeros(rows, cols);
    for r in 0..rows {
        let w = alphabet.word_at(n + 1, r);
        mat.set(r, alphabet.index_of(&w[..n]), F::one());
    }
    Ok(mat)
}

/// Residuals of the Cuntz-Krieger relations on one level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CkLevelRow {
    pub level: isize,
    /// `max |sum_j S_j S_j^* - 1|`.
    pub sum_residual: f64,
    /// `max_i max |S_i^* S_i - sum_j A_ij S_j S_j^*|`.
    pub ck_residual: f64,
    /// `S_i^* S_i` is an idempotent for every `i`.
    pub initial_projections: bool,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CkReport {
    pub genus: usize,
    pub rows: Vec<CkLevelRow>,
    pub minimal_exact_level: Option<isize>,
    /// Residual with `A` replaced by the all-ones matrix (must be nonzero).
    pub negative_control_residual: f64,
    /// `literal S_i = L R_{i^-1}^T` with `L` the lift from level `n-1`, i.e.
    /// `(2g-1)^{1/2} L S_{i^-1}^*`, checked on every level `>= 1`.
    pub literal_dictionary_holds: bool,
    pub all_pass: bool,
}

fn max_abs<F: Field>(m: &Matrix<F>) -> f64 {
    m.max_abs_entry()
}

/// Checks both relations for the normalized family on each level in
/// `levels` (the level of the space the relations act on; `S_j S_j^*` uses
/// the isometries arriving from the level below).
pub fn ck_relations_check<F: Field>(genus: usize, levels: &[isize], caps: &Caps) -> Result<CkReport> {
    let al = Alphabet::new(genus)?;
    let n_sym = al.size();
    let tm = crate::schottky::transition_matrix(&al);
    let mut rows = Vec::new();
    let mut negative = 0.0f64;
    let mut dictionary = true;
    for &level in levels {
        if level < 0 {
            return Err(Error::DimensionMismatch { expected: 0, found: 0 });
        }
        let below = level - 1;
        let dim = check_level(&al, level, caps)?;
        let c: F = parry_projection_factor(genus, below);
        // projections S_j S_j^* = c R_j R_j^T on `level`
        let projections = (0..n_sym)
            .into_par_iter()
            .map(|j| -> Result<Matrix<F>> {
                let r = koopman_core::<F>(&al, j, below, caps)?;
                Ok(r.mul(&r.transpose())?.scale(&c))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut sum = Matrix::zeros(dim, dim);
        for p in &projections {
            sum = sum.add(p)?;
        }
        let sum_residual = max_abs(&sum.sub(&Matrix::identity(dim))?);
        let mut ck_residual = 0.0f64;
        let mut initial_projections = true;
        for i in 0..n_sym {
            // S_i^* S_i = R_i^T R_i (the scale cancels for m >= 0)
            let r = koopman_core::<F>(&al, i, level, caps)?;
            let c_up: F = parry_projection_factor(genus, level);
            let b = F::from_int(n_sym as i64 - 1);
            let ss = r.transpose().mul(&r)?.scale(&(c_up / b.clone() * b));
            initial_projections &= ss.mul(&ss)? == ss;
            let mut rhs = Matrix::zeros(dim, dim);
            let mut all_ones = Matrix::zeros(dim, dim);
            for (j, p) in projections.iter().enumerate() {
                if tm.get(i, j) == 1 {
                    rhs = rhs.add(p)?;
                }
                all_ones = all_ones.add(p)?;
            }
            ck_residual = ck_residual.max(max_abs(&ss.sub(&rhs)?));
            negative = negative.max(max_abs(&ss.sub(&all_ones)?));
        }
        if level >= 1 {
            for i in 1..=n_sym {
                let lit = s_i_literal::<F>(&al, i, level as usize, caps)?.matrix;
                let inv = al.inverse_of(i - 1);
                let r = koopman_core::<F>(&al, inv, level - 1, caps)?;
                let l = lift_matrix::<F>(&al, level as usize, caps)?;
                dictionary &= lit == l.mul(&r.transpose())?;
            }
        }
        let exact = sum_residual == 0.0 && ck_residual == 0.0 && initial_projections;
        rows.push(CkLevelRow { level, sum_residual, ck_residual, initial_projections, exact });
    }
    let minimal_exact_level = rows.iter().find(|r| r.exact).map(|r| r.level);
    let all_pass = rows.iter().filter(|r| r.level >= 1).all(|r| r.exact) && negative > 0.0 && dictionary;
    Ok(CkReport {
        genus,
        rows,
        minimal_exact_level,
        negative_control_residual: negative,
        literal_dictionary_holds: dictionary,
        all_pass,
    })
}

/// A bounded function on hyperbolic space, used by the evaluation
/// representations. Must be pure.
pub type H3Function<'a> = &'a (dyn Fn(&H3Point<f64>) -> f64 + Sync);

/// A function of an orbit point and a boundary point.
pub type BundleFunction<'a> = &'a (dyn Fn(&H3Point<f64>, &ProjPoint<f64>) -> f64 + Sync);

fn orbit_points(group: &SchottkyGroup<f64>, n: usize, caps: &Caps) -> Result<Vec<H3Point<f64>>> {
    let al = *group.alphabet();
    let dim = check_level(&al, n as isize, caps)?;
    (0..dim)
        .into_par_iter()
        .map(|i| group.orbit_point(&ReducedWord::from_trusted(al.word_at(n + 1, i))))
        .collect()
}

/// `rho(f)`: multiplication by `f((a_0 ... a_n) x_0)` on level-`n`
/// functions.
pub fn rho_cohomology(f: H3Function<'_>, group: &SchottkyGroup<f64>, n: usize, caps: &Caps) -> Result<TruncatedOperator<f64>> {
    let al = *group.alphabet();
    let values: Vec<f64> = orbit_points(group, n, caps)?.iter().map(f).collect();
    let labels = level_labels(&al, n as isize);
    TruncatedOperator::new("rho(f)", format!("level {n} cylinders"), format!("level {n} cylinders"), labels.clone(), labels, Matrix::diagonal(values))
}

/// Exact variant for a function of group words (a function on the orbit
/// `Gamma x_0` that is read off the reduced word).
pub fn rho_cohomology_words<F: Field>(
    f: &(dyn Fn(&ReducedWord) -> F + Sync),
    alphabet: &Alphabet,
    n: usize,
    caps: &Caps,
) -> Result<TruncatedOperator<F>> {
    let dim = check_level(alphabet, n as isize, caps)?;
    let values = (0..dim).map(|i| f(&ReducedWord::from_trusted(alphabet.word_at(n + 1, i)))).collect();
    let labels = level_labels(alphabet, n as isize);
    TruncatedOperator::new("rho(f)", format!("level {n} cylinders"), format!("level {n} cylinders"), labels.clone(), labels, Matrix::diagonal(values))
}

/// `f o g_i^{-1}` for a function of group words (0-based `i`).
pub fn translate_word_function<'a, F: Field>(
    f: &'a (dyn Fn(&ReducedWord) -> F + Sync),
    alphabet: Alphabet,
    i: usize,
) -> impl Fn(&ReducedWord) -> F + Sync + 'a {
    move |w: &ReducedWord| {
        let mut letters = vec![alphabet.inverse_of(i)];
        letters.extend_from_slice(w.letters());
        f(&reduce_word(&alphabet, &letters).expect("symbols in range"))
    }
}

/// `max |S_i rho(f) S_i^* - rho(f o g_i^{-1}) S_i S_i^*|` on level `n + 1`
/// for a word function, exact over `F` (0-based `i`).
pub fn covariance_residual<F: Field>(
    f: &(dyn Fn(&ReducedWord) -> F + Sync),
    alphabet: &Alphabet,
    i: usize,
    n: usize,
    caps: &Caps,
) -> Result<f64> {
    let r = koopman_core::<F>(alphabet, i, n as isize, caps)?;
    let c: F = parry_projection_factor(alphabet.genus(), n as isize);
    let rho_n = rho_cohomology_words(f, alphabet, n, caps)?.matrix;
    let lhs = r.mul(&rho_n)?.mul(&r.transpose())?.scale(&c);
    let shifted = translate_word_function(f, *alphabet, i);
    let rho_up = rho_cohomology_words(&shifted, alphabet, n + 1, caps)?.matrix;
    let rhs = rho_up.mul(&r.mul(&r.transpose())?.scale(&c))?;
    Ok(lhs.sub(&rhs)?.max_abs_entry())
}

/// Same residual for a function on hyperbolic space, through the orbit
/// points (floating point).
pub fn covariance_residual_h3(f: H3Function<'_>, group: &SchottkyGroup<f64>, i: usize, n: usize, caps: &Caps) -> Result<f64> {
    let al = *group.alphabet();
    let r = koopman_core::<f64>(&al, i, n as isize, caps)?;
    let rho_n = rho_cohomology(f, group, n, caps)?.matrix;
    let lhs = r.mul(&rho_n)?.mul(&r.transpose())?;
    let g_inv = group.symbol(al.inverse_of(i)).clone();
    let shifted = move |x: &H3Point<f64>| f(&g_inv.apply_h3(x).expect("isometry keeps t > 0"));
    let rho_up = rho_cohomology(&shifted, group, n + 1, caps)?.matrix;
    let rhs = rho_up.mul(&r.mul(&r.transpose())?)?;
    Ok(lhs.sub(&rhs)?.max_abs_entry())
}

/// `rho(f)` on `gr_{2p} W`: the class `[g_k, p]` is multiplied by
/// `f(g_k^p x_0, attracting fixed point of g_k)`.
pub fn rho_homology(f: BundleFunction<'_>, group: &SchottkyGroup<f64>, p: i64) -> Result<TruncatedOperator<f64>> {
    if p < 1 {
        return Err(Error::WeightOutOfRange(p));
    }
    let al = *group.alphabet();
    let mut values = Vec::with_capacity(al.size());
    let mut labels = Vec::with_capacity(al.size());
    for k in al.symbols() {
        let word = ReducedWord::from_trusted(vec![k; p as usize]);
        let x = group.orbit_point(&word)?;
        let (attracting, _) = group.symbol(k).fixed_points()?;
        values.push(f(&x, &attracting));
        labels.push(format!("[{}^{}]", al.label(k), p));
    }
    TruncatedOperator::new("rho(f)", format!("gr_{} W", 2 * p), format!("gr_{} W", 2 * p), labels.clone(), labels, Matrix::diagonal(values))
}

/// `D~` on level-`n` functions: weight `-k` on the level-`k` martingale
/// differences, i.e. `D~ = -n + sum_{k<n} E_k` with `E_k` the conditional
/// expectation onto level-`k` functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiracTilde {
    alphabet: Alphabet,
    level: usize,
}

impl DiracTilde {
    pub fn new(alphabet: Alphabet, level: usize, caps: &Caps) -> Result<Self> {
        check_level(&alphabet, level as isize, caps)?;
        Ok(Self { alphabet, level })
    }

    pub fn dim(&self) -> usize {
        level_dim(&self.alphabet, self.level as isize) as usize
    }

    fn block(&self, k: usize) -> usize {
        (self.alphabet.size() - 1).pow((self.level - k) as u32)
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.level;
        let mut out: Vec<f64> = v.iter().map(|x| -(n as f64) * x).collect();
        for k in 0..n {
            let b = self.block(k);
            for (chunk, o) in v.chunks(b).zip(out.chunks_mut(b)) {
                let mean = chunk.iter().sum::<f64>() / b as f64;
                o.iter_mut().for_each(|x| *x += mean);
            }
        }
        out
    }

    pub fn matrix<F: Field>(&self) -> Matrix<F> {
        let dim = self.dim();
        let n = self.level;
        let mut m = Matrix::diagonal(vec![F::from_int(-(n as i64)); dim]);
        for k in 0..n {
            let b = self.block(k);
            let w = F::one() / F::from_int(b as i64);
            for r in 0..dim {
                let start = r / b * b;
                for c in start..start + b {
                    let v = m.get(r, c).clone() + w.clone();
                    m.set(r, c, v);
                }
            }
        }
        m
    }
}

/// `D` on `gr_{2p} W`, `p = 1..=p_max`: multiplication by `p`.
pub fn dirac_homology<F: Field>(genus: usize, p_max: i64) -> Matrix<F> {
    Matrix::diagonal((1..=p_max).flat_map(|p| std::iter::repeat_n(F::from_int(p), 2 * genus)).collect())
}

/// `|| D_out op - op D_in ||`.
pub fn dirac_commutator_norm(d_out: &Matrix<f64>, op: &TruncatedOperator<f64>, d_in: &Matrix<f64>) -> Result<f64> {
    let c = d_out.mul(&op.matrix)?.sub(&op.matrix.mul(d_in)?)?;
    Ok(spectral_norm(&c.to_f64()))
}

/// `|| [Phi, sigma_2(m)] ||` on the `sigma`-stable part of a window.
pub fn phi_sigma2_commutator_norm(genus: usize, p_min: i64, p_max: i64, m: &[[f64; 2]; 2]) -> Result<f64> {
    let model = ConeModel::new(genus, p_min, p_max)?;
    let basis = model.sigma_stable_basis();
    let phi = model.phi_matrix::<f64>(&basis)?;
    let s = model.sigma2_matrix(&basis, m)?;
    Ok(spectral_norm(&phi.commutator(&s)?.to_f64()))
}

fn koopman_apply(al: &Alphabet, i: usize, n: usize, v: &[f64]) -> Vec<f64> {
    // (R_i v)(a_0 ... a_{n+1}) = [a_0 = i] v(a_1 ... a_{n+1}); rows with
    // a_0 = i form one contiguous block
    let rows = al.count_words(n + 2) as usize;
    let mut out = vec![0.0; rows];
    let block = rows / al.size();
    for r in i * block..(i + 1) * block {
        let w = al.word_at(n + 2, r);
        out[r] = v[al.index_of(&w[1..])];
    }
    out
}

fn koopman_apply_t(al: &Alphabet, i: usize, n: usize, v: &[f64]) -> Vec<f64> {
    let cols = al.count_words(n + 1) as usize;
    let rows = v.len();
    let mut out = vec![0.0; cols];
    let block = rows / al.size();
    for r in i * block..(i + 1) * block {
        let w = al.word_at(n + 2, r);
        out[al.index_of(&w[1..])] += v[r];
    }
    out
}

/// `|| [D~, S_i] ||` on level-`n` functions for the Parry norms (1-based
/// `i`), by Lanczos on the matrix-free commutator.
pub fn koopman_commutator_norm(alphabet: &Alphabet, i: usize, n: usize, caps: &Caps) -> Result<f64> {
    let idx = one_based(alphabet, i)?;
    let d_in = DiracTilde::new(*alphabet, n, caps)?;
    let d_out = DiracTilde::new(*alphabet, n + 1, caps)?;
    let al = *alphabet;
    // Parry norms turn S_i = (2g-1)^{1/2} R_i into the Euclidean norm of R_i
    let apply = |v: &[f64]| {
        let a = d_out.apply(&koopman_apply(&al, idx, n, v));
        let b = koopman_apply(&al, idx, n, &d_in.apply(v));
        a.iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<_>>()
    };
    let apply_t = |v: &[f64]| {
        let a = koopman_apply_t(&al, idx, n, &d_out.apply(v));
        let b = d_in.apply(&koopman_apply_t(&al, idx, n, v));
        a.iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<_>>()
    };
    Ok(lanczos_norm(d_in.dim(), apply, apply_t))
}

/// `|| [D~, rho(f)] ||` on level-`n` functions.
pub fn rho_commutator_norm(f: H3Function<'_>, group: &SchottkyGroup<f64>, n: usize, caps: &Caps) -> Result<f64> {
    let al = *group.alphabet();
    let d = DiracTilde::new(al, n, caps)?;
    let values: Vec<f64> = orbit_points(group, n, caps)?.iter().map(f).collect();
    let apply = |v: &[f64]| {
        let fv: Vec<f64> = v.iter().zip(&values).map(|(x, y)| x * y).collect();
        let a = d.apply(&fv);
        let b = d.apply(v);
        a.iter().zip(b.iter().zip(&values)).map(|(x, (y, fy))| x - fy * y).collect::<Vec<_>>()
    };
    let apply_t = |v: &[f64]| apply(v).into_iter().map(|x| -x).collect::<Vec<_>>();
    Ok(lanczos_norm(d.dim(), apply, apply_t))
}

/// Functions on hyperbolic space used for the stabilization checks:
/// powers of `1 / cosh d(x, x_0)` for the base point `x_0 = (0, 0, 1)`.
pub fn shipped_test_functions() -> Vec<(&'static str, fn(&H3Point<f64>) -> f64)> {
    fn sech(x: &H3Point<f64>) -> f64 {
        2.0 * x.t / (1.0 + x.x1 * x.x1 + x.x2 * x.x2 + x.t * x.t)
    }
    fn sech2(x: &H3Point<f64>) -> f64 {
        sech(x).powi(2)
    }
    fn damped_height(x: &H3Point<f64>) -> f64 {
        sech(x) * x.x1.cos()
    }
    vec![("sech_d", sech), ("sech_d_squared", sech2), ("sech_d_cos_x1", damped_height)]
}

/// Commutator norms on the windows `H_{<= n} = sum_{k <= n} L^2(level k)`.
/// `S_i` maps the level-`k` summand to level `k + 1`, `rho(f)` and `D~` act
/// summand by summand, so the window norm is the largest block norm inside
/// the window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilizationRow {
    pub operator: String,
    pub levels: Vec<usize>,
    /// Norm of the block arriving at level `n` (for `S_i`) or acting on it.
    pub block_norms: Vec<f64>,
    pub window_norms: Vec<f64>,
    pub max_relative_change: f64,
}

impl StabilizationRow {
    /// `blocks[k]` is the block norm at level `k`, `k = 0..=max(levels)`.
    fn from_blocks(operator: String, levels: &[usize], blocks: &[f64]) -> Self {
        let window = |n: usize| blocks[..=n].iter().copied().fold(0.0, f64::max);
        let window_norms: Vec<f64> = levels.iter().map(|&n| window(n)).collect();
        let max_relative_change = window_norms
            .windows(2)
            .map(|w| (w[1] - w[0]).abs() / w[1].abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        Self {
            operator,
            levels: levels.to_vec(),
            block_norms: levels.iter().map(|&n| blocks[n]).collect(),
            window_norms,
            max_relative_change,
        }
    }
}

pub fn koopman_stabilization(alphabet: &Alphabet, levels: &[usize], caps: &Caps) -> Result<Vec<StabilizationRow>> {
    let top = levels.iter().copied().max().unwrap_or(0);
    (1..=alphabet.size())
        .map(|i| {
            // nothing arrives at level 0
            let blocks = (0..=top)
                .into_par_iter()
                .map(|k| if k > 0 { koopman_commutator_norm(alphabet, i, k - 1, caps) } else { Ok(0.0) })
                .collect::<Result<Vec<_>>>()?;
            Ok(StabilizationRow::from_blocks(format!("[D~, S_{i}]"), levels, &blocks))
        })
        .collect()
}

pub fn rho_stabilization(group: &SchottkyGroup<f64>, levels: &[usize], caps: &Caps) -> Result<Vec<StabilizationRow>> {
    let top = levels.iter().copied().max().unwrap_or(0);
    shipped_test_functions()
        .into_iter()
        .map(|(name, f)| {
            let blocks = (0..=top)
                .into_par_iter()
                .map(|k| rho_commutator_norm(&f, group, k, caps))
                .collect::<Result<Vec<_>>>()?;
            Ok(StabilizationRow::from_blocks(format!("[D~, rho({name})]"), levels, &blocks))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummabilityRow {
    pub radius: u64,
    pub partial_sum: f64,
    /// `S(R) - S(R-1)`.
    pub successive_difference: f64,
    /// Upper bound for the remainder `sum_{|lambda| > R}`, infinite for `z <= 1`.
    pub tail_bound: f64,
    /// `S(R) / ln R`.
    pub ratio_to_log: f64,
}

/// `S(R) = sum_{|lambda| <= R} mult(lambda) (1 + lambda^2)^{-z/2}`.
/// `mult_bound` bounds the multiplicities (for the tail estimate).
pub fn summability_profile(mult: &dyn Fn(i64) -> u64, mult_bound: u64, z: f64, radii: &[u64]) -> Result<Vec<SummabilityRow>> {
    if !(z > 0.0) {
        return Err(Error::Config(format!("summability exponent must be positive, got {z}")));
    }
    let term = |l: i64| mult(l) as f64 * (1.0 + (l as f64) * (l as f64)).powf(-z / 2.0);
    let mut sorted: Vec<u64> = radii.to_vec();
    sorted.sort_unstable();
    let mut out = Vec::with_capacity(radii.len());
    let mut sum = term(0);
    let mut r_done = 0u64;
    for &r in &sorted {
        let mut last = 0.0;
        while r_done < r {
            r_done += 1;
            let l = r_done as i64;
            last = term(l) + term(-l);
            sum += last;
        }
        let tail_bound = if z > 1.0 { 2.0 * mult_bound as f64 * (r as f64).powf(1.0 - z) / (z - 1.0) } else { f64::INFINITY };
        let ratio_to_log = if r > 1 { sum / (r as f64).ln() } else { f64::NAN };
        out.push(SummabilityRow { radius: r, partial_sum: sum, successive_difference: last, tail_bound, ratio_to_log });
    }
    Ok(out)
}

/// `Phi` multiplicities of the model as a summability source.
pub fn phi_multiplicity_source(genus: usize) -> impl Fn(i64) -> u64 {
    move |l| crate::arch::phi_multiplicity(genus, l) as u64
}

/// `(max - min) / (max + min)` of the `S(R)/ln R` column.
pub fn log_ratio_spread(rows: &[SummabilityRow]) -> f64 {
    let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.ratio_to_log), hi.max(r.ratio_to_log)));
    (hi - lo) / (hi + lo)
}

/// Spectrum of `D~` on level `n` (sorted eigenvalues of the exact matrix).
pub fn dirac_tilde_spectrum(alphabet: &Alphabet, n: usize, caps: &Caps) -> Result<Vec<f64>> {
    let d = DiracTilde::new(*alphabet, n, caps)?;
    let m = d.matrix::<f64>().to_f64();
    let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Diagonal operator on an anonymous basis `b0, b1, ...`.
pub fn diagonal_operator(values: Vec<f64>) -> TruncatedOperator<f64> {
    let labels: Vec<String> = (0..values.len()).map(|i| format!("b{i}")).collect();
    TruncatedOperator { name: "diag".into(), domain: "basis".into(), codomain: "basis".into(), col_labels: labels.clone(), row_labels: labels, matrix: Matrix::diagonal(values) }
}
