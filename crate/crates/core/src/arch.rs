//! Finite graded model of the archimedean cohomology `H^q(X*)`, `q = 0..3`,
//! of a genus-`g` curve, truncated to a weight window `[p_min, p_max]`.
//!
//! Every graded piece `gr_{2p} H^q(X*)` is a copy of `H^0`, `H^1` or `H^2`
//! of the curve (dimensions `1, 2g, 1`), carrying a formal twist. The
//! operators `N`, `l`, `sigma_2`, `delta`, `omega`, `F_infinity` and the
//! Dirac operator `Phi` act piece-wise with identity coordinates. The
//! canonical graded basis is declared orthonormal.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{sign_pow, Field};

/// Cohomology group of the curve underlying a graded piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Source {
    H0,
    H1,
    H2,
}

impl Source {
    pub fn degree(self) -> i64 {
        match self {
            Source::H0 => 0,
            Source::H1 => 1,
            Source::H2 => 2,
        }
    }

    /// `j = degree - 1`, the weight of the Lefschetz `sl_2`.
    pub fn j_grading(self) -> i64 {
        self.degree() - 1
    }

    pub fn dim(self, genus: usize) -> usize {
        match self {
            Source::H1 => 2 * genus,
            _ => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Source::H0 => "H0",
            Source::H1 => "H1",
            Source::H2 => "H2",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// `gr_{2p} H^q(X*)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GradedPiece {
    pub q: u8,
    pub p: i64,
    pub source: Source,
}

impl GradedPiece {
    /// The piece at `(q, p)` if the weight decomposition has one there.
    pub fn at(q: u8, p: i64) -> Option<Self> {
        let source = match q {
            0 if p <= 0 => Source::H0,
            1 if p <= 0 => Source::H1,
            1 => Source::H0,
            2 if p <= 1 => Source::H2,
            2 => Source::H1,
            3 if p >= 2 => Source::H2,
            _ => return None,
        };
        Some(Self { q, p, source })
    }

    pub fn new(q: u8, p: i64, source: Source) -> Result<Self> {
        match Self::at(q, p) {
            Some(piece) if piece.source == source => Ok(piece),
            _ => Err(Error::NoSuchPiece { q, p, source_label: source.label() }),
        }
    }

    /// Pieces `H^q(X_C, R(p))` of the first summand, as opposed to the
    /// shifted `H^{q-1}(X_C, R(p-1))` of the second.
    pub fn is_first_summand(&self) -> bool {
        self.source.degree() == self.q as i64
    }

    /// Exponent `e` of the formal factor `(2 pi i)^e`.
    pub fn twist(&self) -> i64 {
        if self.is_first_summand() {
            self.p
        } else {
            self.p - 1
        }
    }

    pub fn j_grading(&self) -> i64 {
        self.source.j_grading()
    }

    pub fn dim(&self, genus: usize) -> usize {
        self.source.dim(genus)
    }

    /// Membership in `H^-`; the complement in the model is `H^+`.
    pub fn is_minus(&self) -> bool {
        self.is_first_summand()
    }

    pub fn phi(&self) -> i64 {
        phi(self)
    }

    /// Image under `delta_q` (for `H^-` pieces) or `delta^{-1}` (for `H^+`).
    pub fn dual(&self) -> Self {
        if self.is_minus() {
            Self::at(self.q + 1, self.q as i64 + 1 - self.p).expect("delta target exists")
        } else {
            let q = self.q - 1;
            Self::at(q, q as i64 + 1 - self.p).expect("delta source exists")
        }
    }

    /// Partner in the two-dimensional `sl_2` tower, for `H0`/`H2` pieces.
    pub fn tower_partner(&self) -> Option<Self> {
        match self.source {
            Source::H0 => Self::at(self.q + 2, self.p + 1),
            Source::H2 if self.q >= 2 => Self::at(self.q - 2, self.p - 1),
            _ => None,
        }
        .filter(|t| t.source != Source::H1)
    }

    pub fn label(&self) -> String {
        format!("q{}p{}{}", self.q, self.p, self.source)
    }
}

/// Dirac operator on a piece: `p` if `q >= 2p`, else `p - 1`.
pub fn phi(piece: &GradedPiece) -> i64 {
    if piece.q as i64 >= 2 * piece.p {
        piece.p
    } else {
        piece.p - 1
    }
}

/// Multiplicity of the eigenvalue `lambda` of `Phi` on the untruncated model.
pub fn phi_multiplicity(genus: usize, lambda: i64) -> usize {
    (0u8..=3)
        .flat_map(|q| [lambda, lambda + 1].map(move |p| (q, p)))
        .filter_map(|(q, p)| GradedPiece::at(q, p))
        .filter(|piece| piece.phi() == lambda)
        .map(|piece| piece.dim(genus))
        .sum()
}

/// A vector inside one graded piece.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedElement<F> {
    piece: GradedPiece,
    coords: Vec<F>,
}

impl<F: Field> GradedElement<F> {
    pub fn new(genus: usize, piece: GradedPiece, coords: Vec<F>) -> Result<Self> {
        let dim = piece.dim(genus);
        if coords.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: coords.len() });
        }
        Ok(Self { piece, coords })
    }

    pub fn zero(genus: usize, piece: GradedPiece) -> Self {
        Self { piece, coords: vec![F::zero(); piece.dim(genus)] }
    }

    /// Basis vector `e_k` (0-based) of a piece.
    pub fn basis(genus: usize, piece: GradedPiece, k: usize) -> Result<Self> {
        let mut x = Self::zero(genus, piece);
        let dim = x.coords.len();
        let slot = x.coords.get_mut(k).ok_or(Error::DimensionMismatch { expected: dim, found: k + 1 })?;
        *slot = F::one();
        Ok(x)
    }

    pub fn piece(&self) -> &GradedPiece {
        &self.piece
    }

    pub fn coords(&self) -> &[F] {
        &self.coords
    }

    pub fn twist(&self) -> i64 {
        self.piece.twist()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_negligible())
    }

    pub fn scale(&self, s: &F) -> Self {
        Self { piece: self.piece, coords: self.coords.iter().map(|c| c.clone() * s.clone()).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.piece != other.piece {
            return Err(Error::NoSuchPiece { q: other.piece.q, p: other.piece.p, source_label: other.piece.source.label() });
        }
        Ok(Self {
            piece: self.piece,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.clone() + b.clone()).collect(),
        })
    }

    fn moved(&self, piece: GradedPiece) -> Self {
        Self { piece, coords: self.coords.clone() }
    }
}

/// One row of the model dump.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PieceInfo {
    pub q: u8,
    pub p: i64,
    pub source: Source,
    pub dim: usize,
    pub phi: i64,
    pub twist: i64,
    pub j: i64,
    pub side: &'static str,
}

/// The truncated model with its global basis (pieces ordered by `(q, p)`).
#[derive(Clone, Debug, PartialEq)]
pub struct ConeModel {
    genus: usize,
    p_min: i64,
    p_max: i64,
    pieces: Vec<GradedPiece>,
    offsets: BTreeMap<(u8, i64), usize>,
    dim: usize,
}

pub fn build_cone_model(genus: usize, p_min: i64, p_max: i64) -> Result<ConeModel> {
    ConeModel::new(genus, p_min, p_max)
}

impl ConeModel {
    pub fn new(genus: usize, p_min: i64, p_max: i64) -> Result<Self> {
        if genus < 2 {
            return Err(Error::InvalidGenus(genus));
        }
        if p_min > -1 || p_max < 2 {
            return Err(Error::InvalidWindow { p_min, p_max });
        }
        let mut pieces = Vec::new();
        let mut offsets = BTreeMap::new();
        let mut dim = 0;
        for q in 0u8..=3 {
            for p in p_min..=p_max {
                if let Some(piece) = GradedPiece::at(q, p) {
                    offsets.insert((q, p), dim);
                    dim += piece.dim(genus);
                    pieces.push(piece);
                }
            }
        }
        Ok(Self { genus, p_min, p_max, pieces, offsets, dim })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn window(&self) -> (i64, i64) {
        (self.p_min, self.p_max)
    }

    pub fn pieces(&self) -> &[GradedPiece] {
        &self.pieces
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains(&self, q: u8, p: i64) -> bool {
        self.offsets.contains_key(&(q, p))
    }

    /// The piece at `(q, p)`; distinguishes "outside the window" from "not
    /// part of the weight decomposition".
    pub fn piece(&self, q: u8, p: i64) -> Result<GradedPiece> {
        match GradedPiece::at(q, p) {
            None => Err(Error::NoSuchPiece { q, p, source_label: "none" }),
            Some(_) if p < self.p_min || p > self.p_max => Err(Error::OutsideWindow { q, p }),
            Some(piece) => Ok(piece),
        }
    }

    fn check(&self, piece: &GradedPiece) -> Result<()> {
        self.piece(piece.q, piece.p).map(|_| ())
    }

    pub fn offset(&self, piece: &GradedPiece) -> Result<usize> {
        self.offsets.get(&(piece.q, piece.p)).copied().ok_or(Error::OutsideWindow { q: piece.q, p: piece.p })
    }

    /// Global basis index of `e_k` in `piece`.
    pub fn index(&self, piece: &GradedPiece, k: usize) -> Result<usize> {
        Ok(self.offset(piece)? + k)
    }

    /// `(piece, k)` for every global basis index.
    pub fn basis(&self) -> Vec<(GradedPiece, usize)> {
        self.pieces.iter().flat_map(|pc| (0..pc.dim(self.genus)).map(move |k| (*pc, k))).collect()
    }

    pub fn basis_labels(&self) -> Vec<String> {
        self.basis().iter().map(|(pc, k)| format!("{}e{}", pc.label(), k + 1)).collect()
    }

    pub fn element<F: Field>(&self, q: u8, p: i64, coords: Vec<F>) -> Result<GradedElement<F>> {
        GradedElement::new(self.genus, self.piece(q, p)?, coords)
    }

    pub fn basis_element<F: Field>(&self, q: u8, p: i64, k: usize) -> Result<GradedElement<F>> {
        GradedElement::basis(self.genus, self.piece(q, p)?, k)
    }

    /// Global coordinate vector of an element.
    pub fn embed<F: Field>(&self, x: &GradedElement<F>) -> Result<Vec<F>> {
        let off = self.offset(x.piece())?;
        let mut v = vec![F::zero(); self.dim];
        for (k, c) in x.coords().iter().enumerate() {
            v[off + k] = c.clone();
        }
        Ok(v)
    }

    pub fn dump(&self) -> Vec<PieceInfo> {
        self.pieces
            .iter()
            .map(|pc| PieceInfo {
                q: pc.q,
                p: pc.p,
                source: pc.source,
                dim: pc.dim(self.genus),
                phi: pc.phi(),
                twist: pc.twist(),
                j: pc.j_grading(),
                side: if pc.is_minus() { "H-" } else { "H+" },
            })
            .collect()
    }

    /// Multiplicities of `Phi` on the truncated model.
    pub fn phi_spectrum(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for pc in &self.pieces {
            *out.entry(pc.phi()).or_insert(0) += pc.dim(self.genus);
        }
        out
    }

    /// Global indices of pieces whose `sl_2` tower lies in the window.
    pub fn sigma_stable_basis(&self) -> Vec<usize> {
        self.closed_basis(|pc| pc.source == Source::H1 || pc.tower_partner().is_some_and(|t| self.contains(t.q, t.p)))
    }

    /// Global indices of pieces whose `delta`-partner lies in the window.
    pub fn omega_closed_basis(&self) -> Vec<usize> {
        self.closed_basis(|pc| {
            let d = pc.dual();
            self.contains(d.q, d.p)
        })
    }

    fn closed_basis(&self, keep: impl Fn(&GradedPiece) -> bool) -> Vec<usize> {
        let mut out = Vec::new();
        for pc in self.pieces.iter().filter(|pc| keep(pc)) {
            let off = self.offsets[&(pc.q, pc.p)];
            out.extend(off..off + pc.dim(self.genus));
        }
        out
    }

    fn locate(&self, idx: usize) -> (GradedPiece, usize) {
        let pc = *self
            .pieces
            .iter()
            .rev()
            .find(|pc| self.offsets[&(pc.q, pc.p)] <= idx)
            .expect("index inside model");
        (pc, idx - self.offsets[&(pc.q, pc.p)])
    }

    /// Builds a matrix on the sub-basis `basis` column by column from a
    /// piece-wise linear map returning `(target piece, k, value)` triples.
    fn operator_on<F: Field>(
        &self,
        basis: &[usize],
        image: impl Fn(GradedPiece, usize) -> Result<Vec<(GradedPiece, usize, F)>>,
    ) -> Result<Matrix<F>> {
        let pos: BTreeMap<usize, usize> = basis.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let mut m = Matrix::zeros(basis.len(), basis.len());
        for (col, &g) in basis.iter().enumerate() {
            let (pc, k) = self.locate(g);
            for (tp, tk, v) in image(pc, k)? {
                let gi = self.index(&tp, tk)?;
                let row = *pos.get(&gi).ok_or(Error::OutsideWindow { q: tp.q, p: tp.p })?;
                m.set(row, col, v);
            }
        }
        Ok(m)
    }

    pub fn full_basis(&self) -> Vec<usize> {
        (0..self.dim).collect()
    }

    /// `Phi` as a diagonal matrix on a sub-basis.
    pub fn phi_matrix<F: Field>(&self, basis: &[usize]) -> Result<Matrix<F>> {
        self.operator_on(basis, |pc, k| Ok(vec![(pc, k, F::from_int(pc.phi()))]))
    }

    /// Degree `q` of the `delta_q`-block containing each basis vector.
    pub fn block_degree_matrix<F: Field>(&self, basis: &[usize]) -> Result<Matrix<F>> {
        self.operator_on(basis, |pc, k| {
            let q = if pc.is_minus() { pc.q } else { pc.q - 1 };
            Ok(vec![(pc, k, F::from_int(q as i64))])
        })
    }

    pub fn sigma2_matrix<F: Field>(&self, basis: &[usize], m: &[[F; 2]; 2]) -> Result<Matrix<F>> {
        check_det(m)?;
        self.operator_on(basis, |pc, k| sigma2_image(self, pc, k, m))
    }

    pub fn omega_matrix<F: Field>(&self, basis: &[usize]) -> Result<Matrix<F>> {
        self.operator_on(basis, |pc, k| Ok(vec![(pc.dual(), k, F::one())]))
    }

    pub fn f_infinity_matrix<F: Field>(&self, basis: &[usize]) -> Result<Matrix<F>> {
        let g = self.genus;
        self.operator_on(basis, |pc, k| Ok(vec![(pc, iota(g, pc, k), sign_pow(pc.twist()))]))
    }

    pub fn lefschetz_matrix<F: Field>(&self, basis: &[usize]) -> Result<Matrix<F>> {
        self.operator_on(basis, |pc, k| {
            Ok(match lefschetz_target(&pc) {
                Some(t) => vec![(t, k, F::one())],
                None => vec![],
            })
        })
    }
}

fn check_det<F: Field>(m: &[[F; 2]; 2]) -> Result<()> {
    let det = m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone();
    let dev = det.clone() - F::one();
    let ok = if F::EXACT { dev.is_zero() } else { dev.to_f64().abs() < 1e-12 };
    if ok {
        Ok(())
    } else {
        Err(Error::BadDeterminant(format!("{:?}", det)))
    }
}

/// Coordinate involution: `e_k <-> e_{k+g}` on `H1` pieces.
fn iota(genus: usize, pc: GradedPiece, k: usize) -> usize {
    if pc.source == Source::H1 {
        (k + genus) % (2 * genus)
    } else {
        k
    }
}

fn lefschetz_target(pc: &GradedPiece) -> Option<GradedPiece> {
    match pc.source {
        Source::H0 => pc.tower_partner(),
        _ => None,
    }
}

/// `sigma_2(m) e` for a basis vector, tower basis ordered `(j=+1, j=-1)`.
fn sigma2_image<F: Field>(model: &ConeModel, pc: GradedPiece, k: usize, m: &[[F; 2]; 2]) -> Result<Vec<(GradedPiece, usize, F)>> {
    if pc.source == Source::H1 {
        return Ok(vec![(pc, k, F::one())]);
    }
    let partner = pc.tower_partner().ok_or(Error::NoSuchPiece { q: pc.q, p: pc.p, source_label: pc.source.label() })?;
    model.check(&partner)?;
    let (top, bottom, col) = if pc.source == Source::H2 { (pc, partner, 0) } else { (partner, pc, 1) };
    Ok(vec![(top, 0, m[0][col].clone()), (bottom, 0, m[1][col].clone())])
}

/// `N`: lowers the weight by one inside a summand of the weight
/// decomposition (identity on coordinates, twist decreases by one). It
/// vanishes where the next piece down belongs to the other summand; `None`
/// stands for the zero vector.
pub fn monodromy_n<F: Field>(model: &ConeModel, x: &GradedElement<F>) -> Result<Option<GradedElement<F>>> {
    let pc = x.piece();
    model.check(pc)?;
    match GradedPiece::at(pc.q, pc.p - 1) {
        Some(t) if t.source == pc.source => {
            model.check(&t)?;
            Ok(Some(x.moved(t)))
        }
        _ => Ok(None),
    }
}

/// `l`: `H0`-pieces onto the `H2` tower partner at weight `p + 1`, zero on
/// `H1` and `H2` pieces.
pub fn lefschetz_l<F: Field>(model: &ConeModel, x: &GradedElement<F>) -> Result<Option<GradedElement<F>>> {
    model.check(x.piece())?;
    match lefschetz_target(x.piece()) {
        Some(t) => {
            model.check(&t)?;
            Ok(Some(x.moved(t)))
        }
        None => Ok(None),
    }
}

/// `sigma_2(m) x`, returned piece by piece (one piece for `H1`, the two
/// tower pieces otherwise, top first).
pub fn sigma2<F: Field>(model: &ConeModel, m: &[[F; 2]; 2], x: &GradedElement<F>) -> Result<Vec<GradedElement<F>>> {
    check_det(m)?;
    let pc = *x.piece();
    model.check(&pc)?;
    if pc.source == Source::H1 {
        return Ok(vec![x.clone()]);
    }
    let c = x.coords()[0].clone();
    let mut out = Vec::new();
    for (t, _, v) in sigma2_image(model, pc, 0, m)? {
        out.push(GradedElement { piece: t, coords: vec![v * c.clone()] });
    }
    Ok(out)
}

/// `delta_q`: `(q, p) -> (q + 1, q + 1 - p)` on `H^-` pieces.
pub fn duality_delta<F: Field>(model: &ConeModel, x: &GradedElement<F>) -> Result<GradedElement<F>> {
    let pc = x.piece();
    model.check(pc)?;
    if !pc.is_minus() {
        return Err(Error::NoSuchPiece { q: pc.q, p: pc.p, source_label: "H-" });
    }
    let t = pc.dual();
    model.check(&t)?;
    Ok(x.moved(t))
}

pub fn duality_delta_inverse<F: Field>(model: &ConeModel, y: &GradedElement<F>) -> Result<GradedElement<F>> {
    let pc = y.piece();
    model.check(pc)?;
    if pc.is_minus() {
        return Err(Error::NoSuchPiece { q: pc.q, p: pc.p, source_label: "H+" });
    }
    let t = pc.dual();
    model.check(&t)?;
    Ok(y.moved(t))
}

/// `omega = [[0, delta^{-1}], [delta, 0]]`.
pub fn omega_involution<F: Field>(model: &ConeModel, x: &GradedElement<F>) -> Result<GradedElement<F>> {
    if x.piece().is_minus() {
        duality_delta(model, x)
    } else {
        duality_delta_inverse(model, x)
    }
}

/// `F_infinity = (-1)^twist o iota`.
pub fn f_infinity_arch<F: Field>(model: &ConeModel, x: &GradedElement<F>) -> Result<GradedElement<F>> {
    let pc = *x.piece();
    model.check(&pc)?;
    let g = model.genus();
    let s: F = sign_pow(pc.twist());
    let mut coords = vec![F::zero(); x.coords().len()];
    for (k, c) in x.coords().iter().enumerate() {
        coords[iota(g, pc, k)] = c.clone() * s.clone();
    }
    Ok(GradedElement { piece: pc, coords })
}

/// Outcome of the `omega` identities on one window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmegaReport {
    pub genus: usize,
    pub p_min: i64,
    pub p_max: i64,
    pub checked_dim: usize,
    pub omega_squared_is_id: bool,
    pub omega_self_adjoint: bool,
    /// `Phi + omega Phi omega = q id` on each `delta_q` block.
    pub block_identity: bool,
    /// `Phi omega + omega Phi = q omega`, the same statement multiplied by `omega`.
    pub anticommutator_is_q_omega: bool,
    /// The unmodified reading `Phi omega + omega Phi = q id`.
    pub anticommutator_is_q_id: bool,
    pub omega_commutes_with_sigma2: bool,
}

/// Checks the `omega` identities exactly on all `omega`-closed pieces
/// whose weight lies in `[p_lo, p_hi]`, using a window wide enough to
/// contain their partners.
pub fn omega_report<F: Field>(genus: usize, p_lo: i64, p_hi: i64) -> Result<OmegaReport> {
    let p_min = (p_lo - 3).min(-1);
    let p_max = (p_hi + 3).max(4).max(4 - p_lo);
    let model = ConeModel::new(genus, p_min.min(-p_hi - 1), p_max)?;
    let closed = model.omega_closed_basis();
    let stable: std::collections::BTreeSet<usize> = model.sigma_stable_basis().into_iter().collect();
    let basis: Vec<usize> = closed
        .into_iter()
        .filter(|&i| {
            let (pc, _) = model.locate(i);
            let d = pc.dual();
            (p_lo..=p_hi).contains(&pc.p) || (p_lo..=p_hi).contains(&d.p)
        })
        .filter(|i| stable.contains(i))
        .collect();
    // close under omega and sigma towers
    let basis = close_basis(&model, basis);
    let n = basis.len();
    let id = Matrix::<F>::identity(n);
    let omega = model.omega_matrix::<F>(&basis)?;
    let phi = model.phi_matrix::<F>(&basis)?;
    let q = model.block_degree_matrix::<F>(&basis)?;
    let w2 = omega.mul(&omega)?;
    let block = phi.add(&omega.mul(&phi)?.mul(&omega)?)?;
    let anti = phi.mul(&omega)?.add(&omega.mul(&phi)?)?;
    let q_omega = q.mul(&omega)?;
    let one = F::one();
    let m = [[F::from_int(2), one.clone()], [one.clone(), one.clone()]];
    let sigma = model.sigma2_matrix(&basis, &m)?;
    Ok(OmegaReport {
        genus,
        p_min: p_lo,
        p_max: p_hi,
        checked_dim: n,
        omega_squared_is_id: w2 == id,
        omega_self_adjoint: omega.transpose() == omega,
        block_identity: block == q,
        anticommutator_is_q_omega: anti == q_omega,
        anticommutator_is_q_id: anti == q,
        omega_commutes_with_sigma2: omega.commutator(&sigma)?.is_zero(),
    })
}

/// Smallest superset of `basis` closed under `delta` and tower partners.
fn close_basis(model: &ConeModel, basis: Vec<usize>) -> Vec<usize> {
    let g = model.genus();
    let mut set: std::collections::BTreeSet<usize> = basis.into_iter().collect();
    loop {
        let mut added = Vec::new();
        for &i in &set {
            let (pc, k) = model.locate(i);
            let mut partners = vec![(pc.dual(), k)];
            if let Some(t) = pc.tower_partner() {
                partners.push((t, 0));
            }
            for (t, tk) in partners {
                if let Ok(j) = model.index(&t, tk.min(t.dim(g) - 1)) {
                    if !set.contains(&j) {
                        added.push(j);
                    }
                }
            }
        }
        if added.is_empty() {
            return set.into_iter().collect();
        }
        set.extend(added);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    type Q = Rational;

    fn q(v: i64) -> Q {
        Q::from_int(v)
    }

    #[test]
    fn piece_table() {
        let m = build_cone_model(2, -3, 3).unwrap();
        assert_eq!(m.piece(1, 0).unwrap().dim(2), 4);
        assert!(matches!(m.piece(0, 1), Err(Error::NoSuchPiece { .. })));
        assert_eq!(m.piece(3, 2).unwrap().dim(2), 1);
        assert!(matches!(m.piece(0, -4), Err(Error::OutsideWindow { .. })));
        assert!(build_cone_model(2, 0, 3).is_err());
        assert!(build_cone_model(2, -1, 1).is_err());
        for pc in m.pieces() {
            assert_eq!(pc.j_grading(), pc.source.degree() - 1);
        }
    }

    #[test]
    fn phi_cases() {
        assert_eq!(phi(&GradedPiece::at(0, -3).unwrap()), -3);
        assert_eq!(phi(&GradedPiece::at(2, 1).unwrap()), 1);
        assert_eq!(phi(&GradedPiece::at(2, 3).unwrap()), 2);
        for q in 0..=3u8 {
            for p in -5..=5 {
                if let Some(pc) = GradedPiece::at(q, p) {
                    assert_eq!(pc.phi(), pc.twist());
                }
            }
        }
    }

    #[test]
    fn phi_multiplicities_match_window_interior() {
        for g in [2, 3] {
            let m = build_cone_model(g, -8, 8).unwrap();
            let spec = m.phi_spectrum();
            for lambda in -6..=6 {
                assert_eq!(spec[&lambda], phi_multiplicity(g, lambda), "g={g} lambda={lambda}");
            }
            assert_eq!(phi_multiplicity(g, -1), 2 * g + 2);
            assert_eq!(phi_multiplicity(g, 0), 2 * g + 3);
            assert_eq!(phi_multiplicity(g, 1), 2 * g + 3);
            assert_eq!(phi_multiplicity(g, 2), 2 * g + 2);
        }
    }

    #[test]
    fn monodromy_and_lefschetz() {
        let m = build_cone_model(2, -3, 4).unwrap();
        let x = m.element(1, 0, vec![q(1), q(2), q(3), q(4)]).unwrap();
        let nx = monodromy_n(&m, &x).unwrap().unwrap();
        assert_eq!(nx.piece().p, -1);
        assert_eq!(nx.twist(), x.twist() - 1);
        assert_eq!(nx.coords(), x.coords());
        // second-summand tower (1,2) -> (1,1) -> 0
        let y = m.basis_element::<Q>(1, 2, 0).unwrap();
        let ny = monodromy_n(&m, &y).unwrap().unwrap();
        assert!(monodromy_n(&m, &ny).unwrap().is_none());
        // boundary error
        let z = m.basis_element::<Q>(0, -3, 0).unwrap();
        assert!(matches!(monodromy_n(&m, &z), Err(Error::OutsideWindow { .. })));

        let h0 = m.basis_element::<Q>(0, -1, 0).unwrap();
        let lh0 = lefschetz_l(&m, &h0).unwrap().unwrap();
        assert_eq!((lh0.piece().q, lh0.piece().p, lh0.piece().source), (2, 0, Source::H2));
        assert_eq!(lh0.twist(), h0.twist() + 1);
        assert!(lefschetz_l(&m, &lh0).unwrap().is_none());
        assert!(lefschetz_l(&m, &x).unwrap().is_none());
    }

    #[test]
    fn l_and_n_commute_in_the_interior() {
        let m = build_cone_model(2, -4, 5).unwrap();
        for pc in m.pieces() {
            if pc.p <= -3 || pc.p >= 4 {
                continue;
            }
            let x = GradedElement::<Q>::basis(2, *pc, 0).unwrap();
            let ln = monodromy_n(&m, &x).unwrap().and_then(|y| lefschetz_l(&m, &y).unwrap());
            let nl = lefschetz_l(&m, &x).unwrap().and_then(|y| monodromy_n(&m, &y).unwrap());
            assert_eq!(ln, nl, "{pc:?}");
        }
    }

    #[test]
    fn sigma2_examples() {
        let m = build_cone_model(2, -3, 4).unwrap();
        let b = Q::from_ratio(3, 1);
        let diag = [[b.clone(), q(0)], [q(0), q(1) / b.clone()]];
        let h0 = m.basis_element::<Q>(0, -1, 0).unwrap();
        let img = sigma2(&m, &diag, &h0).unwrap();
        assert_eq!(img[1].coords()[0], Q::from_ratio(1, 3));
        assert!(img[0].is_zero());
        let minus = [[q(-1), q(0)], [q(0), q(-1)]];
        let h1 = m.basis_element::<Q>(1, 0, 2).unwrap();
        assert_eq!(sigma2(&m, &minus, &h1).unwrap()[0], h1);
        assert_eq!(sigma2(&m, &minus, &h0).unwrap()[1].coords()[0], q(-1));
        let bad = [[q(2), q(0)], [q(0), q(1)]];
        assert!(matches!(sigma2(&m, &bad, &h0), Err(Error::BadDeterminant(_))));
    }

    #[test]
    fn sigma2_is_multiplicative_and_differentiates_to_l() {
        let m = build_cone_model(2, -3, 4).unwrap();
        let basis = m.sigma_stable_basis();
        let a = [[q(2), q(3)], [q(1), q(2)]];
        let b = [[q(1), q(0)], [q(5), q(1)]];
        let ab = [[q(2 + 15), q(3)], [q(1 + 10), q(2)]];
        let sa = m.sigma2_matrix(&basis, &a).unwrap();
        let sb = m.sigma2_matrix(&basis, &b).unwrap();
        assert_eq!(sa.mul(&sb).unwrap(), m.sigma2_matrix(&basis, &ab).unwrap());
        // exact derivative: sigma2(u_t) = id + t l for the unipotent family
        let t = Q::from_ratio(1, 7);
        let u = [[q(1), t.clone()], [q(0), q(1)]];
        let su = m.sigma2_matrix(&basis, &u).unwrap();
        let diff = su.sub(&Matrix::identity(basis.len())).unwrap().scale(&(q(1) / t));
        assert_eq!(diff, m.lefschetz_matrix(&basis).unwrap());
    }

    #[test]
    fn delta_examples() {
        let m = build_cone_model(2, -3, 4).unwrap();
        let x = m.basis_element::<Q>(1, 0, 0).unwrap();
        let d = duality_delta(&m, &x).unwrap();
        assert_eq!((d.piece().q, d.piece().p), (2, 2));
        let d0 = duality_delta(&m, &m.basis_element::<Q>(0, 0, 0).unwrap()).unwrap();
        assert_eq!((d0.piece().q, d0.piece().p), (1, 1));
        let d2 = duality_delta(&m, &m.basis_element::<Q>(2, 1, 0).unwrap()).unwrap();
        assert_eq!((d2.piece().q, d2.piece().p), (3, 2));
        assert_eq!(omega_involution(&m, &d).unwrap(), x);
        let far = m.basis_element::<Q>(2, -3, 0).unwrap();
        assert!(matches!(duality_delta(&m, &far), Err(Error::OutsideWindow { .. })));
    }

    #[test]
    fn omega_identities() {
        for g in [2, 3] {
            let r = omega_report::<Q>(g, -6, 6).unwrap();
            assert!(r.omega_squared_is_id && r.omega_self_adjoint);
            assert!(r.block_identity && r.anticommutator_is_q_omega);
            assert!(!r.anticommutator_is_q_id);
            assert!(r.omega_commutes_with_sigma2);
        }
    }

    #[test]
    fn anticommutator_on_single_vectors() {
        let m = build_cone_model(2, -3, 4).unwrap();
        for (qq, p) in [(1u8, 0i64), (2, 1)] {
            let x = m.basis_element::<Q>(qq, p, 0).unwrap();
            let wx = omega_involution(&m, &x).unwrap();
            // (Phi w + w Phi) x = (phi(wx) + phi(x)) wx
            let s = wx.piece().phi() + x.piece().phi();
            assert_eq!(s, qq as i64);
        }
    }

    #[test]
    fn f_infinity_examples_and_relations() {
        let m = build_cone_model(2, -3, 4).unwrap();
        let h0 = m.basis_element::<Q>(0, 0, 0).unwrap();
        assert_eq!(f_infinity_arch(&m, &h0).unwrap(), h0);
        let e1 = m.basis_element::<Q>(1, 0, 0).unwrap();
        assert_eq!(f_infinity_arch(&m, &e1).unwrap(), m.basis_element(1, 0, 2).unwrap());
        let e1m = m.basis_element::<Q>(1, -1, 0).unwrap();
        assert_eq!(f_infinity_arch(&m, &e1m).unwrap(), m.basis_element::<Q>(1, -1, 2).unwrap().scale(&q(-1)));
        // involution, commutes with Phi, anticommutes with N, (-1)^q with delta_q
        for pc in m.pieces() {
            for k in 0..pc.dim(2) {
                let x = GradedElement::<Q>::basis(2, *pc, k).unwrap();
                let fx = f_infinity_arch(&m, &x).unwrap();
                assert_eq!(f_infinity_arch(&m, &fx).unwrap(), x);
                if let Ok(Some(nx)) = monodromy_n(&m, &x) {
                    let lhs = f_infinity_arch(&m, &nx).unwrap();
                    let rhs = monodromy_n(&m, &fx).unwrap().unwrap();
                    assert_eq!(lhs, rhs.scale(&q(-1)));
                }
                if pc.is_minus() {
                    if let Ok(dx) = duality_delta(&m, &x) {
                        let lhs = f_infinity_arch(&m, &dx).unwrap();
                        let rhs = duality_delta(&m, &fx).unwrap();
                        assert_eq!(lhs, rhs.scale(&sign_pow(pc.q as i64)));
                    }
                }
            }
        }
    }

    #[test]
    fn commutator_norm_is_window_independent() {
        let mat = [[2.0, 3.0], [1.0, 2.0]];
        let mut norms = Vec::new();
        for w in 2..6 {
            let model = build_cone_model(2, -w, w + 1).unwrap();
            let basis = model.sigma_stable_basis();
            let phi = model.phi_matrix::<f64>(&basis).unwrap();
            let s = model.sigma2_matrix(&basis, &mat).unwrap();
            norms.push(crate::linalg::spectral_norm(&phi.commutator(&s).unwrap().to_f64()));
        }
        assert!(norms.iter().all(|n| *n == 3.0), "{norms:?}");
    }
}
