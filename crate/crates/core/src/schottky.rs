//! Reduced words over the free generators of a Schottky group, the
//! transition matrix of the associated subshift, and the action of group
//! elements on hyperbolic 3-space and on the Riemann sphere.

use std::fmt;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::Caps;

/// The `2g` symbols `g_1, ..., g_{2g}` with `g_{i+g} = g_i^{-1}`.
///
/// Symbols are stored 0-based; symbol `i` is printed as `g{i+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    genus: usize,
}

impl Alphabet {
    pub fn new(genus: usize) -> Result<Self> {
        if genus < 2 {
            return Err(Error::InvalidGenus(genus));
        }
        Ok(Self { genus })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// Number of symbols, `2g`.
    pub fn size(&self) -> usize {
        2 * self.genus
    }

    pub fn symbols(&self) -> impl Iterator<Item = usize> {
        0..self.size()
    }

    pub fn inverse_of(&self, i: usize) -> usize {
        (i + self.genus) % self.size()
    }

    pub fn label(&self, i: usize) -> String {
        format!("g{}", i + 1)
    }

    pub fn check_symbol(&self, i: usize) -> Result<()> {
        if i < self.size() {
            Ok(())
        } else {
            Err(Error::SymbolOutOfRange { index: i, size: self.size() })
        }
    }

    pub fn can_follow(&self, prev: usize, next: usize) -> bool {
        next != self.inverse_of(prev)
    }

    /// Number of admissible words of length `len`.
    pub fn count_words(&self, len: usize) -> u128 {
        if len == 0 {
            return 1;
        }
        let s = self.size() as u128;
        s * (s - 1).pow(len as u32 - 1)
    }

    /// Position of an admissible word among all admissible words of the same
    /// length in lexicographic order.
    pub fn index_of(&self, letters: &[usize]) -> usize {
        let branch = self.size() - 1;
        let mut idx = 0usize;
        for (pos, &a) in letters.iter().enumerate() {
            if pos == 0 {
                idx = a;
            } else {
                let forbidden = self.inverse_of(letters[pos - 1]);
                let r = if a < forbidden { a } else { a - 1 };
                idx = idx * branch + r;
            }
        }
        idx
    }

    /// Inverse of [`Alphabet::index_of`].
    pub fn word_at(&self, len: usize, mut idx: usize) -> Vec<usize> {
        if len == 0 {
            return Vec::new();
        }
        let branch = self.size() - 1;
        let mut digits = vec![0usize; len];
        for d in (1..len).rev() {
            digits[d] = idx % branch;
            idx /= branch;
        }
        digits[0] = idx;
        let mut out = Vec::with_capacity(len);
        out.push(digits[0]);
        for d in 1..len {
            let forbidden = self.inverse_of(out[d - 1]);
            let r = digits[d];
            out.push(if r < forbidden { r } else { r + 1 });
        }
        out
    }
}

/// An admissible (freely reduced) finite word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ReducedWord {
    letters: Vec<usize>,
}

impl ReducedWord {
    pub fn empty() -> Self {
        Self { letters: Vec::new() }
    }

    /// Validates symbol range and admissibility.
    pub fn new(alphabet: &Alphabet, letters: Vec<usize>) -> Result<Self> {
        for (i, &a) in letters.iter().enumerate() {
            alphabet.check_symbol(a)?;
            if i > 0 && !alphabet.can_follow(letters[i - 1], a) {
                return Err(Error::NotAdmissible(i));
            }
        }
        Ok(Self { letters })
    }

    pub(crate) fn from_trusted(letters: Vec<usize>) -> Self {
        Self { letters }
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Admissible also across the junction last letter -> first letter.
    pub fn is_cyclically_admissible(&self, alphabet: &Alphabet) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&f), Some(&l)) => alphabet.can_follow(l, f),
            _ => true,
        }
    }

    pub fn inverse(&self, alphabet: &Alphabet) -> Self {
        Self { letters: self.letters.iter().rev().map(|&a| alphabet.inverse_of(a)).collect() }
    }

    pub fn display(&self, alphabet: &Alphabet) -> String {
        if self.letters.is_empty() {
            return "e".to_string();
        }
        self.letters.iter().map(|&a| alphabet.label(a)).collect::<Vec<_>>().join(".")
    }
}

/// Free reduction of an arbitrary letter sequence.
pub fn reduce_word(alphabet: &Alphabet, letters: &[usize]) -> Result<ReducedWord> {
    let mut stack: Vec<usize> = Vec::with_capacity(letters.len());
    for &a in letters {
        alphabet.check_symbol(a)?;
        match stack.last() {
            Some(&top) if a == alphabet.inverse_of(top) => {
                stack.pop();
            }
            _ => stack.push(a),
        }
    }
    Ok(ReducedWord { letters: stack })
}

/// All admissible words with exactly `len` letters, lexicographic.
pub fn enumerate_admissible(alphabet: &Alphabet, len: usize, caps: &Caps) -> Result<Vec<ReducedWord>> {
    let count = alphabet.count_words(len);
    caps.check_words(count)?;
    Ok((0..count as usize).map(|i| ReducedWord { letters: alphabet.word_at(len, i) }).collect())
}

/// 0/1 adjacency matrix: `entries[i][j] = 1` iff `g_j` may follow `g_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMatrix {
    entries: Vec<Vec<u8>>,
}

impl TransitionMatrix {
    pub fn entries(&self) -> &[Vec<u8>] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[i][j]
    }

    /// Matrix power as exact integers.
    pub fn power(&self, k: u32) -> Vec<Vec<u128>> {
        let n = self.dim();
        let mut acc: Vec<Vec<u128>> = (0..n).map(|i| (0..n).map(|j| (i == j) as u128).collect()).collect();
        for _ in 0..k {
            acc = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).map(|l| acc[i][l] * self.entries[l][j] as u128).sum())
                        .collect()
                })
                .collect();
        }
        acc
    }

    pub fn trace_power(&self, k: u32) -> u128 {
        let p = self.power(k);
        (0..self.dim()).map(|i| p[i][i]).sum()
    }
}

pub fn transition_matrix(alphabet: &Alphabet) -> TransitionMatrix {
    let n = alphabet.size();
    TransitionMatrix {
        entries: (0..n).map(|i| (0..n).map(|j| alphabet.can_follow(i, j) as u8).collect()).collect(),
    }
}

/// A point `(x1, x2, t)` of the upper half-space model, `t > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct H3Point<T> {
    pub x1: T,
    pub x2: T,
    pub t: T,
}

impl<T: Real> H3Point<T> {
    pub fn new(x1: T, x2: T, t: T) -> Result<Self> {
        if !(t > T::zero()) || !t.is_finite() {
            return Err(Error::NotInUpperHalfSpace(format!("{t}")));
        }
        Ok(Self { x1, x2, t })
    }

    pub fn origin() -> Self {
        Self { x1: T::zero(), x2: T::zero(), t: T::one() }
    }

    pub fn z(&self) -> Complex<T> {
        Complex::new(self.x1, self.x2)
    }
}

/// Hyperbolic distance in the upper half-space model.
pub fn hyperbolic_distance<T: Real>(p: &H3Point<T>, q: &H3Point<T>) -> T {
    let dz = (p.z() - q.z()).norm_sqr();
    let dt = p.t - q.t;
    let arg = T::one() + (dz + dt * dt) / (T::lit(2.0) * p.t * q.t);
    arg.max(T::one()).acosh()
}

/// A point of the Riemann sphere as a homogeneous pair `(z : w)`, scaled so
/// the coordinate of larger modulus equals 1; infinity is `(1 : 0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjPoint<T> {
    z: Complex<T>,
    w: Complex<T>,
}

impl<T: Real> ProjPoint<T> {
    pub fn new(z: Complex<T>, w: Complex<T>) -> Option<Self> {
        let (nz, nw) = (z.norm(), w.norm());
        if nz == T::zero() && nw == T::zero() {
            return None;
        }
        Some(if nz >= nw {
            Self { z: Complex::one(), w: w / z }
        } else {
            Self { z: z / w, w: Complex::one() }
        })
    }

    pub fn finite(z: Complex<T>) -> Self {
        Self::new(z, Complex::one()).expect("w = 1")
    }

    pub fn infinity() -> Self {
        Self { z: Complex::one(), w: Complex::zero() }
    }

    pub fn coords(&self) -> (Complex<T>, Complex<T>) {
        (self.z, self.w)
    }

    pub fn is_infinity(&self) -> bool {
        self.w.norm() <= T::tolerance()
    }

    pub fn to_affine(&self) -> Option<Complex<T>> {
        if self.w.is_zero() {
            None
        } else {
            Some(self.z / self.w)
        }
    }

    /// Chordal distance on the sphere.
    pub fn chordal_distance(&self, other: &Self) -> T {
        let num = (self.z * other.w - other.z * self.w).norm();
        let den = (self.z.norm_sqr() + self.w.norm_sqr()).sqrt() * (other.z.norm_sqr() + other.w.norm_sqr()).sqrt();
        num / den
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.chordal_distance(other) <= tol
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MobiusKind {
    Identity,
    Parabolic,
    Elliptic,
    Loxodromic,
}

/// An element of SL(2, C), acting on the sphere and on H^3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobiusElement<T> {
    m: [[Complex<T>; 2]; 2],
}

impl<T: Real> MobiusElement<T> {
    /// Normalizes to determinant 1.
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() <= T::tolerance() || !det.norm().is_finite() {
            return Err(Error::BadDeterminant(format!("{det}")));
        }
        let s = det.sqrt();
        let out = Self { m: [[a / s, b / s], [c / s, d / s]] };
        let resid = (out.det() - Complex::one()).norm();
        if resid > T::lit(1e3) * T::epsilon() * (T::one() + out.frobenius_sq()) {
            return Err(Error::BadDeterminant(format!("{}", out.det())));
        }
        Ok(out)
    }

    pub fn real(a: T, b: T, c: T, d: T) -> Result<Self> {
        let r = |x: T| Complex::new(x, T::zero());
        Self::new(r(a), r(b), r(c), r(d))
    }

    /// `diag(lambda, 1/lambda)`
    pub fn diagonal(lambda: Complex<T>) -> Result<Self> {
        Self::new(lambda, Complex::zero(), Complex::zero(), lambda.inv())
    }

    pub fn identity() -> Self {
        Self { m: [[Complex::one(), Complex::zero()], [Complex::zero(), Complex::one()]] }
    }

    pub fn entries(&self) -> [[Complex<T>; 2]; 2] {
        self.m
    }

    pub fn det(&self) -> Complex<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    fn frobenius_sq(&self) -> T {
        self.m.iter().flatten().map(|x| x.norm_sqr()).fold(T::zero(), |a, b| a + b)
    }

    pub fn trace(&self) -> Complex<T> {
        self.m[0][0] + self.m[1][1]
    }

    pub fn inverse(&self) -> Self {
        let [[a, b], [c, d]] = self.m;
        Self { m: [[d, -b], [-c, a]] }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let a = &self.m;
        let b = &rhs.m;
        let mut m = [[Complex::zero(); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self { m }
    }

    /// Rescale by `det^{-1/2}` to remove accumulated drift.
    pub fn renormalized(&self) -> Self {
        let s = self.det().sqrt();
        Self { m: self.m.map(|row| row.map(|x| x / s)) }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(), |acc, _| acc.mul(self)).renormalized()
    }

    pub fn kind(&self) -> MobiusKind {
        let tol = T::lit(1e-9).max(T::tolerance());
        let tr = self.trace();
        let tr2 = tr * tr;
        let four = T::lit(4.0);
        if tr2.im.abs() > tol || tr2.re > four + tol || tr2.re < -tol {
            return MobiusKind::Loxodromic;
        }
        if (tr2.re - four).abs() <= tol {
            let off = self.m[0][1].norm() + self.m[1][0].norm() + (self.m[0][0] - self.m[1][1]).norm();
            return if off <= tol { MobiusKind::Identity } else { MobiusKind::Parabolic };
        }
        MobiusKind::Elliptic
    }

    pub fn is_loxodromic(&self) -> bool {
        self.kind() == MobiusKind::Loxodromic
    }

    fn require_loxodromic(&self) -> Result<()> {
        if self.is_loxodromic() {
            Ok(())
        } else {
            let tr = self.trace();
            Err(Error::NotLoxodromic { trace_sq: format!("{}", tr * tr) })
        }
    }

    /// Eigenvalues ordered so the first has modulus `>= 1`.
    fn eigenvalues(&self) -> (Complex<T>, Complex<T>) {
        let tr = self.trace();
        let two = T::lit(2.0);
        let disc = (tr * tr - Complex::new(T::lit(4.0), T::zero())).sqrt();
        let l1 = (tr + disc) / two;
        let l2 = (tr - disc) / two;
        // use the product relation for the small one to avoid cancellation
        if l1.norm() >= l2.norm() {
            (l1, l1.inv())
        } else {
            (l2, l2.inv())
        }
    }

    fn eigenvector(&self, lambda: Complex<T>) -> ProjPoint<T> {
        let [[a, b], [c, d]] = self.m;
        let v1 = (b, lambda - a);
        let v2 = (lambda - d, c);
        let n1 = v1.0.norm_sqr() + v1.1.norm_sqr();
        let n2 = v2.0.norm_sqr() + v2.1.norm_sqr();
        let (z, w) = if n1 >= n2 { v1 } else { v2 };
        ProjPoint::new(z, w).expect("nonzero eigenvector")
    }

    /// `(attracting, repelling)` fixed points.
    pub fn fixed_points(&self) -> Result<(ProjPoint<T>, ProjPoint<T>)> {
        self.require_loxodromic()?;
        let (big, small) = self.eigenvalues();
        Ok((self.eigenvector(big), self.eigenvector(small)))
    }

    /// Displacement along the invariant axis, `2 ln |lambda|`.
    pub fn translation_length(&self) -> Result<T> {
        self.require_loxodromic()?;
        let (big, _) = self.eigenvalues();
        Ok(T::lit(2.0) * big.norm().ln())
    }

    pub fn apply_sphere(&self, p: &ProjPoint<T>) -> ProjPoint<T> {
        let (z, w) = p.coords();
        let [[a, b], [c, d]] = self.m;
        ProjPoint::new(a * z + b * w, c * z + d * w).expect("invertible map")
    }

    /// Poincaré extension to the upper half-space.
    pub fn apply_h3(&self, p: &H3Point<T>) -> Result<H3Point<T>> {
        if !(p.t > T::zero()) {
            return Err(Error::NotInUpperHalfSpace(format!("{}", p.t)));
        }
        let [[a, b], [c, d]] = self.m;
        let z = p.z();
        let t2 = p.t * p.t;
        let czd = c * z + d;
        let den = czd.norm_sqr() + c.norm_sqr() * t2;
        let num = (a * z + b) * czd.conj() + a * c.conj() * t2;
        let image = num / den;
        let t = p.t / den;
        if !(image.re.is_finite() && image.im.is_finite() && t.is_finite()) || t <= T::zero() {
            return Err(Error::Overflow("mobius_on_h3"));
        }
        Ok(H3Point { x1: image.re, x2: image.im, t })
    }
}

pub fn mobius_on_h3<T: Real>(m: &MobiusElement<T>, pt: &H3Point<T>) -> Result<H3Point<T>> {
    m.apply_h3(pt)
}

pub fn fixed_points<T: Real>(m: &MobiusElement<T>) -> Result<(ProjPoint<T>, ProjPoint<T>)> {
    m.fixed_points()
}

pub fn translation_length<T: Real>(m: &MobiusElement<T>) -> Result<T> {
    m.translation_length()
}

/// A marked Schottky group: `g` loxodromic generators and a base point.
#[derive(Clone, Debug)]
pub struct SchottkyGroup<T> {
    alphabet: Alphabet,
    generators: Vec<MobiusElement<T>>,
    inverses: Vec<MobiusElement<T>>,
    base_point: H3Point<T>,
}

impl<T: Real> SchottkyGroup<T> {
    pub fn new(generators: Vec<MobiusElement<T>>, base_point: H3Point<T>) -> Result<Self> {
        let alphabet = Alphabet::new(generators.len())?;
        for g in &generators {
            g.require_loxodromic()?;
        }
        if !(base_point.t > T::zero()) {
            return Err(Error::NotInUpperHalfSpace(format!("{}", base_point.t)));
        }
        let inverses = generators.iter().map(|g| g.inverse()).collect();
        Ok(Self { alphabet, generators, inverses, base_point })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn base_point(&self) -> &H3Point<T> {
        &self.base_point
    }

    pub fn generators(&self) -> &[MobiusElement<T>] {
        &self.generators
    }

    /// Matrix of symbol `i` (generator or inverse).
    pub fn symbol(&self, i: usize) -> &MobiusElement<T> {
        let g = self.alphabet.genus();
        if i < g {
            &self.generators[i]
        } else {
            &self.inverses[i - g]
        }
    }

    pub fn word_to_mobius(&self, w: &ReducedWord) -> MobiusElement<T> {
        w.letters()
            .iter()
            .fold(MobiusElement::identity(), |acc, &a| acc.mul(self.symbol(a)))
            .renormalized()
    }

    /// `w . x_0`
    pub fn orbit_point(&self, w: &ReducedWord) -> Result<H3Point<T>> {
        self.word_to_mobius(w).apply_h3(&self.base_point)
    }
}

impl SchottkyGroup<f64> {
    /// Two loxodromics with multiplier 100: `z -> 100 z` and its conjugate
    /// with fixed points `-1, 1`. The paired isometric circles are disjoint,
    /// so the group is Schottky.
    pub fn default_genus2() -> Self {
        let lambda = 10.0f64;
        let (ch, sh) = ((lambda + 1.0 / lambda) / 2.0, (lambda - 1.0 / lambda) / 2.0);
        let g1 = MobiusElement::real(lambda, 0.0, 0.0, 1.0 / lambda).expect("det 1");
        let g2 = MobiusElement::real(ch, sh, sh, ch).expect("det 1");
        Self::new(vec![g1, g2], H3Point::origin()).expect("valid default group")
    }
}

pub fn word_to_mobius<T: Real>(group: &SchottkyGroup<T>, w: &ReducedWord) -> MobiusElement<T> {
    group.word_to_mobius(w)
}

/// A sampled limit point with the word that produced it.
#[derive(Clone, Debug)]
pub struct LimitPoint<T> {
    pub point: ProjPoint<T>,
    pub word: ReducedWord,
}

impl<T> LimitPoint<T> {
    pub fn word_length(&self) -> usize {
        self.word.len()
    }
}

/// Attracting fixed points of all admissible words of length `1..=depth`,
/// ordered by length and then lexicographically.
pub fn limit_set_sample<T: Real>(group: &SchottkyGroup<T>, depth: usize, caps: &Caps) -> Result<Vec<LimitPoint<T>>> {
    let alphabet = group.alphabet();
    let total: u128 = (1..=depth).map(|k| alphabet.count_words(k)).sum();
    caps.check_words(total)?;
    let mut out = Vec::with_capacity(total as usize);
    for len in 1..=depth {
        for w in enumerate_admissible(alphabet, len, caps)? {
            let (attr, _) = group.word_to_mobius(&w).fixed_points()?;
            out.push(LimitPoint { point: attr, word: w });
        }
    }
    Ok(out)
}

impl fmt::Display for H3Point<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x1, self.x2, self.t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn alpha2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn genus_one_rejected() {
        assert_eq!(Alphabet::new(1), Err(Error::InvalidGenus(1)));
    }

    #[test]
    fn transition_matrix_genus2() {
        let a = transition_matrix(&alpha2());
        // zeros exactly at (1,3),(2,4),(3,1),(4,2) in 1-based labels
        for i in 0..4 {
            for j in 0..4 {
                let zero = matches!((i, j), (0, 2) | (1, 3) | (2, 0) | (3, 1));
                assert_eq!(a.get(i, j), (!zero) as u8, "({i},{j})");
            }
            assert_eq!(a.entries()[i].iter().map(|&x| x as u32).sum::<u32>(), 3);
            assert_eq!(a.get(i, i), 1);
        }
    }

    #[test]
    fn reduce_examples() {
        let al = alpha2();
        assert!(reduce_word(&al, &[0, 2]).unwrap().is_empty());
        assert_eq!(reduce_word(&al, &[0, 1]).unwrap().letters(), &[0, 1]);
        assert_eq!(reduce_word(&al, &[0, 1, 3, 0]).unwrap().letters(), &[0, 0]);
        assert!(matches!(reduce_word(&al, &[4]), Err(Error::SymbolOutOfRange { .. })));
    }

    #[test]
    fn enumerate_counts() {
        let al = alpha2();
        assert_eq!(enumerate_admissible(&al, 1, &caps()).unwrap().len(), 4);
        assert_eq!(enumerate_admissible(&al, 2, &caps()).unwrap().len(), 12);
        let zero = enumerate_admissible(&al, 0, &caps()).unwrap();
        assert_eq!(zero, vec![ReducedWord::empty()]);
        let tight = Caps { max_words: 10, ..Caps::default() };
        assert!(matches!(enumerate_admissible(&al, 2, &tight), Err(Error::ResourceCap { .. })));
    }

    #[test]
    fn enumeration_is_lexicographic_and_indexed() {
        let al = Alphabet::new(3).unwrap();
        let words = enumerate_admissible(&al, 3, &caps()).unwrap();
        for (i, w) in words.iter().enumerate() {
            assert!(ReducedWord::new(&al, w.letters().to_vec()).is_ok());
            assert_eq!(al.index_of(w.letters()), i);
        }
        assert!(words.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn word_evaluation() {
        let g1 = MobiusElement::real(2.0, 0.0, 0.0, 0.5).unwrap();
        let g2 = MobiusElement::real(2.0, 1.0, 1.0, 1.0).unwrap();
        let grp = SchottkyGroup::new(vec![g1, g2], H3Point::origin()).unwrap();
        let al = *grp.alphabet();
        assert_eq!(grp.word_to_mobius(&ReducedWord::empty()), MobiusElement::identity());
        let m = grp.word_to_mobius(&ReducedWord::new(&al, vec![0, 0]).unwrap());
        let e = m.entries();
        assert!((e[0][0] - C::new(4.0, 0.0)).norm() < 1e-14);
        assert!((e[1][1] - C::new(0.25, 0.0)).norm() < 1e-14);
        assert!(e[0][1].norm() < 1e-14 && e[1][0].norm() < 1e-14);
    }

    #[test]
    fn h3_action_examples() {
        let o = H3Point::<f64>::origin();
        assert_eq!(MobiusElement::identity().apply_h3(&o).unwrap(), o);
        let p = MobiusElement::real(2.0, 0.0, 0.0, 0.5).unwrap().apply_h3(&o).unwrap();
        assert!((p.t - 4.0).abs() < 1e-14 && p.x1.abs() < 1e-14 && p.x2.abs() < 1e-14);
        let q = MobiusElement::real(1.0, 1.0, 0.0, 1.0).unwrap().apply_h3(&o).unwrap();
        assert!((q.x1 - 1.0).abs() < 1e-14 && (q.t - 1.0).abs() < 1e-14);
        assert!(H3Point::new(0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn fixed_point_examples() {
        let (a, r) = MobiusElement::real(2.0, 0.0, 0.0, 0.5).unwrap().fixed_points().unwrap();
        assert!(a.is_infinity());
        assert!(r.to_affine().unwrap().norm() < 1e-15);
        let (a, r) = MobiusElement::real(2.0, 1.0, 1.0, 1.0).unwrap().fixed_points().unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((a.to_affine().unwrap() - C::new(phi, 0.0)).norm() < 1e-12);
        assert!((r.to_affine().unwrap() - C::new(1.0 - phi, 0.0)).norm() < 1e-12);
        assert!(MobiusElement::<f64>::identity().fixed_points().is_err());
        assert_eq!(MobiusElement::<f64>::identity().kind(), MobiusKind::Identity);
        assert_eq!(MobiusElement::real(1.0, 1.0, 0.0, 1.0).unwrap().kind(), MobiusKind::Parabolic);
    }

    #[test]
    fn translation_length_examples() {
        let l = MobiusElement::real(2.0, 0.0, 0.0, 0.5).unwrap().translation_length().unwrap();
        assert!((l - 2.0 * 2f64.ln()).abs() < 1e-14);
        // the axis of diag(2,1/2) is the vertical line through (0,0)
        let o = H3Point::origin();
        let img = MobiusElement::real(2.0, 0.0, 0.0, 0.5).unwrap().apply_h3(&o).unwrap();
        assert!((hyperbolic_distance(&o, &img) - l).abs() < 1e-12);
        let l3 = MobiusElement::real(3.0, 0.0, 0.0, 1.0 / 3.0).unwrap().translation_length().unwrap();
        assert!((l3 - 2.0 * 3f64.ln()).abs() < 1e-14);
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let elliptic = MobiusElement::real(c, -s, s, c).unwrap();
        assert_eq!(elliptic.kind(), MobiusKind::Elliptic);
        assert!(elliptic.translation_length().is_err());
    }

    #[test]
    fn limit_set_examples() {
        let g1 = MobiusElement::real(2.0, 0.0, 0.0, 0.5).unwrap();
        let g2 = MobiusElement::real(2.0, 1.0, 1.0, 1.0).unwrap();
        let grp = SchottkyGroup::new(vec![g1, g2], H3Point::origin()).unwrap();
        let pts = limit_set_sample(&grp, 1, &caps()).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let has = |p: ProjPoint<f64>| pts.iter().any(|lp| lp.point.approx_eq(&p, 1e-10));
        assert!(has(ProjPoint::infinity()));
        assert!(has(ProjPoint::finite(C::new(0.0, 0.0))));
        assert!(has(ProjPoint::finite(C::new(phi, 0.0))));
        assert!(has(ProjPoint::finite(C::new(1.0 - phi, 0.0))));
        let depth4 = limit_set_sample(&SchottkyGroup::default_genus2(), 4, &caps()).unwrap();
        assert!(depth4.len() <= 2 * (4 + 12 + 36 + 108));
    }

    #[test]
    fn limit_set_conjugation_equivariance() {
        let grp = SchottkyGroup::default_genus2();
        let al = *grp.alphabet();
        let n = 4;
        let pts = limit_set_sample(&grp, n, &caps()).unwrap();
        for lp in pts.iter().filter(|lp| lp.word_length() < n) {
            for i in al.symbols() {
                let mut letters = vec![i];
                letters.extend_from_slice(lp.word.letters());
                letters.push(al.inverse_of(i));
                let conj = reduce_word(&al, &letters).unwrap();
                if conj.is_empty() || conj.len() > n {
                    continue;
                }
                let image = grp.symbol(i).apply_sphere(&lp.point);
                let found = pts.iter().find(|q| q.word == conj).expect("conjugated word sampled");
                assert!(found.point.approx_eq(&image, 1e-9), "{}", conj.display(&al));
            }
        }
    }
}
