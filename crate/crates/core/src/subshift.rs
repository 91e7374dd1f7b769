//! Cylinder functions on the one-sided subshift of reduced words, the
//! coinvariant model of the first cohomology of the mapping torus, periodic
//! orbits and the homology/cohomology pairing.
//!
//! A level-`n` cylinder function depends on the first `n + 1` letters. The
//! filtration piece `F_n` is realized as level-`n` functions modulo
//! coboundaries `f o T - f`; all ranks are computed by exact elimination.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SparseEchelon, SparseRow};
use crate::scalar::Field;
use crate::schottky::{enumerate_admissible, Alphabet, ReducedWord};
use crate::Caps;

/// A value carrying a formal Hodge-Tate twist `(2 pi i)^twist`.
#[derive(Clone, Debug, PartialEq)]
pub struct Twisted<F> {
    pub value: F,
    pub twist: i64,
}

/// Function of the first `level + 1` letters with coefficients in `F`.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderFunction<F> {
    alphabet: Alphabet,
    level: usize,
    coeffs: BTreeMap<ReducedWord, F>,
    twist: i64,
}

impl<F: Field> CylinderFunction<F> {
    pub fn zero(alphabet: Alphabet, level: usize) -> Self {
        Self { alphabet, level, coeffs: BTreeMap::new(), twist: 0 }
    }

    /// Indicator of the cylinder of sequences starting with `word`.
    pub fn indicator(alphabet: Alphabet, word: &ReducedWord) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::NotAdmissible(0));
        }
        let mut f = Self::zero(alphabet, word.len() - 1);
        f.coeffs.insert(word.clone(), F::one());
        Ok(f)
    }

    pub fn constant(alphabet: Alphabet, level: usize, c: F, caps: &Caps) -> Result<Self> {
        let mut f = Self::zero(alphabet, level);
        if !c.is_negligible() {
            for w in enumerate_admissible(&alphabet, level + 1, caps)? {
                f.coeffs.insert(w, c.clone());
            }
        }
        Ok(f)
    }

    pub fn from_values(alphabet: Alphabet, level: usize, values: impl IntoIterator<Item = (ReducedWord, F)>) -> Result<Self> {
        let mut f = Self::zero(alphabet, level);
        for (w, v) in values {
            f.set(w, v)?;
        }
        Ok(f)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn twist(&self) -> i64 {
        self.twist
    }

    pub fn with_twist(mut self, twist: i64) -> Self {
        self.twist = twist;
        self
    }

    pub fn coeffs(&self) -> &BTreeMap<ReducedWord, F> {
        &self.coeffs
    }

    pub fn set(&mut self, w: ReducedWord, v: F) -> Result<()> {
        if w.len() != self.level + 1 {
            return Err(Error::DimensionMismatch { expected: self.level + 1, found: w.len() });
        }
        ReducedWord::new(&self.alphabet, w.letters().to_vec())?;
        if v.is_negligible() {
            self.coeffs.remove(&w);
        } else {
            self.coeffs.insert(w, v);
        }
        Ok(())
    }

    /// Value on any sequence whose first `level + 1` letters are given by
    /// `letters` (extra letters are ignored).
    pub fn eval(&self, letters: &[usize]) -> F {
        if letters.len() <= self.level {
            return F::zero();
        }
        let key = ReducedWord::from_trusted(letters[..=self.level].to_vec());
        self.coeffs.get(&key).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|v| v.is_negligible())
    }

    /// The same function viewed at a higher level.
    pub fn lift(&self, level: usize) -> Result<Self> {
        if level < self.level {
            return Err(Error::DimensionMismatch { expected: self.level, found: level });
        }
        let mut out = Self { alphabet: self.alphabet, level, coeffs: BTreeMap::new(), twist: self.twist };
        for (w, v) in &self.coeffs {
            for ext in extensions(&self.alphabet, w.letters(), level + 1) {
                out.coeffs.insert(ReducedWord::from_trusted(ext), v.clone());
            }
        }
        Ok(out)
    }

    fn combine(&self, other: &Self, sign: F) -> Result<Self> {
        let level = self.level.max(other.level);
        let a = self.lift(level)?;
        let b = other.lift(level)?;
        let mut coeffs = a.coeffs;
        for (w, v) in b.coeffs {
            let e = coeffs.remove(&w).unwrap_or_else(F::zero) + sign.clone() * v;
            if !e.is_negligible() {
                coeffs.insert(w, e);
            }
        }
        Ok(Self { alphabet: self.alphabet, level, coeffs, twist: self.twist })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, F::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -F::one())
    }

    pub fn scale(&self, s: &F) -> Self {
        let mut out = self.clone();
        out.coeffs = self
            .coeffs
            .iter()
            .map(|(w, v)| (w.clone(), v.clone() * s.clone()))
            .filter(|(_, v)| !v.is_negligible())
            .collect();
        out
    }

    /// Coordinates at `level` (lifting first) as a sparse row indexed by the
    /// lexicographic position of words of length `level + 1`.
    pub fn to_row(&self, level: usize) -> Result<SparseRow<F>> {
        let lifted = self.lift(level)?;
        Ok(SparseRow::new(
            lifted.coeffs.iter().map(|(w, v)| (self.alphabet.index_of(w.letters()), v.clone())).collect(),
        ))
    }

    /// Dense coordinate vector at the function's own level.
    pub fn to_dense(&self) -> Vec<F> {
        let n = self.alphabet.count_words(self.level + 1) as usize;
        let mut v = vec![F::zero(); n];
        for (w, c) in &self.coeffs {
            v[self.alphabet.index_of(w.letters())] = c.clone();
        }
        v
    }

    pub fn from_dense(alphabet: Alphabet, level: usize, values: &[F]) -> Self {
        let coeffs = values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_negligible())
            .map(|(i, v)| (ReducedWord::from_trusted(alphabet.word_at(level + 1, i)), v.clone()))
            .collect();
        Self { alphabet, level, coeffs, twist: 0 }
    }
}

/// All admissible extensions of `prefix` to length `len`.
fn extensions(alphabet: &Alphabet, prefix: &[usize], len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![prefix.to_vec()];
    for _ in prefix.len()..len {
        let mut next = Vec::with_capacity(out.len() * (alphabet.size() - 1));
        for w in out {
            for a in alphabet.symbols() {
                if w.last().is_none_or(|&l| alphabet.can_follow(l, a)) {
                    let mut e = w.clone();
                    e.push(a);
                    next.push(e);
                }
            }
        }
        out = next;
    }
    out
}

/// `f o T`, where `T` drops the first letter.
pub fn shift_pullback<F: Field>(f: &CylinderFunction<F>) -> CylinderFunction<F> {
    let al = f.alphabet;
    let mut out = CylinderFunction { alphabet: al, level: f.level + 1, coeffs: BTreeMap::new(), twist: f.twist };
    for (w, v) in &f.coeffs {
        let first = w.letters()[0];
        for a in al.symbols().filter(|&a| al.can_follow(a, first)) {
            let mut letters = Vec::with_capacity(w.len() + 1);
            letters.push(a);
            letters.extend_from_slice(w.letters());
            out.coeffs.insert(ReducedWord::from_trusted(letters), v.clone());
        }
    }
    out
}

/// `f o T - f` at level `f.level() + 1`.
pub fn coboundary<F: Field>(f: &CylinderFunction<F>) -> CylinderFunction<F> {
    shift_pullback(f).sub(f).expect("levels are compatible")
}

fn block_len(al: &Alphabet, prefix_len: usize, level: usize) -> usize {
    (al.size() - 1).pow((level + 1 - prefix_len) as u32)
}

/// Row of the indicator of the cylinder `[prefix]` at `level`: a contiguous
/// block in lexicographic order.
fn cylinder_row<F: Field>(al: &Alphabet, prefix: &[usize], level: usize, sign: i64, out: &mut Vec<(usize, F)>) {
    let len = block_len(al, prefix.len(), level);
    let start = al.index_of(prefix) * len;
    out.extend((start..start + len).map(|c| (c, F::from_int(sign))));
}

/// Coboundary of the indicator of `[u]`, as a row at `level >= |u|`.
fn coboundary_row<F: Field>(al: &Alphabet, u: &[usize], level: usize) -> SparseRow<F> {
    let mut entries = Vec::new();
    let mut shifted = Vec::with_capacity(u.len() + 1);
    for a in al.symbols().filter(|&a| al.can_follow(a, u[0])) {
        shifted.clear();
        shifted.push(a);
        shifted.extend_from_slice(u);
        cylinder_row(al, &shifted, level, 1, &mut entries);
    }
    cylinder_row(al, u, level, -1, &mut entries);
    SparseRow::new(entries)
}

fn check_width(al: &Alphabet, level: usize, caps: &Caps) -> Result<usize> {
    let width = al.count_words(level + 1);
    caps.check_dim(width)?;
    Ok(width as usize)
}

fn coboundary_echelon<F: Field>(al: &Alphabet, source_level: usize, level: usize, caps: &Caps) -> Result<SparseEchelon<F>> {
    let width = check_width(al, level, caps)?;
    let mut ech = SparseEchelon::new(width);
    for idx in 0..al.count_words(source_level + 1) as usize {
        let u = al.word_at(source_level + 1, idx);
        ech.insert(coboundary_row(al, &u, level));
    }
    Ok(ech)
}

/// Basis of `span{ f o T - f : f of level m }` embedded at level `max(n, m + 1)`.
pub fn coboundary_space<F: Field>(
    alphabet: &Alphabet,
    n: usize,
    m: usize,
    caps: &Caps,
) -> Result<Vec<CylinderFunction<F>>> {
    let level = n.max(m + 1);
    let width = check_width(alphabet, level, caps)?;
    let mut ech = SparseEchelon::new(width);
    let mut basis = Vec::new();
    for w in enumerate_admissible(alphabet, m + 1, caps)? {
        let f = coboundary(&CylinderFunction::<F>::indicator(*alphabet, &w)?).lift(level)?;
        if ech.insert(f.to_row(level)?) {
            basis.push(f);
        }
    }
    Ok(basis)
}

/// `2g (2g-1)^{n-1} (2g-2) + 1` for `n >= 1`, and `2g` for `n = 0`.
pub fn rank_formula(genus: usize, n: usize) -> u128 {
    let s = 2 * genus as u128;
    if n == 0 {
        s
    } else {
        s * (s - 1).pow(n as u32 - 1) * (s - 2) + 1
    }
}

/// Result of the stabilized rank computation for `F_n`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct RankResult {
    pub genus: usize,
    pub n: usize,
    pub rank: usize,
    /// First coboundary source level at which the rank reached its final value.
    pub stabilization_m: usize,
    /// Rank of level-`n` functions modulo level-`m` coboundaries, `m = 0, 1, ...`.
    pub history: Vec<usize>,
}

/// Dimension of level-`n` functions modulo coboundaries of level-`m`
/// functions, computed at level `max(n, m + 1)`.
pub fn quotient_rank<F: Field>(alphabet: &Alphabet, n: usize, m: usize, caps: &Caps) -> Result<usize> {
    let level = n.max(m + 1);
    let mut ech = coboundary_echelon::<F>(alphabet, m, level, caps)?;
    let r_b = ech.rank();
    for idx in 0..alphabet.count_words(n + 1) as usize {
        let v = alphabet.word_at(n + 1, idx);
        let mut entries = Vec::new();
        cylinder_row(alphabet, &v, level, 1, &mut entries);
        ech.insert(SparseRow::new(entries));
    }
    Ok(ech.rank() - r_b)
}

/// Rank of `F_n`: increase the coboundary source level until the quotient
/// rank is unchanged for two consecutive values.
pub fn rank_f<F: Field>(alphabet: &Alphabet, n: usize, caps: &Caps) -> Result<RankResult> {
    let mut history: Vec<usize> = Vec::new();
    for m in 0.. {
        let r = quotient_rank::<F>(alphabet, n, m, caps)?;
        if let Some(&prev) = history.last() {
            if prev == r {
                history.push(r);
                return Ok(RankResult { genus: alphabet.genus(), n, rank: r, stabilization_m: m - 1, history });
            }
        }
        history.push(r);
    }
    unreachable!("loop only exits by return or error")
}

/// `rank F_n - rank F_{n-1}` (and `rank F_0` for `n = 0`).
pub fn gr_dimension<F: Field>(alphabet: &Alphabet, n: usize, caps: &Caps) -> Result<usize> {
    let top = rank_f::<F>(alphabet, n, caps)?.rank;
    if n == 0 {
        return Ok(top);
    }
    Ok(top - rank_f::<F>(alphabet, n - 1, caps)?.rank)
}

/// A class in the coinvariants, represented by a cylinder function.
#[derive(Clone, Debug, PartialEq)]
pub struct CoinvariantClass<F> {
    representative: CylinderFunction<F>,
}

impl<F: Field> CoinvariantClass<F> {
    pub fn new(representative: CylinderFunction<F>) -> Self {
        Self { representative }
    }

    pub fn representative(&self) -> &CylinderFunction<F> {
        &self.representative
    }

    pub fn level(&self) -> usize {
        self.representative.level
    }

    pub fn twist(&self) -> i64 {
        self.representative.twist
    }

    /// Equality modulo coboundaries. Level-`L` functions meet the coboundary
    /// space exactly in the coboundaries of level-`(L-1)` functions, so the
    /// check is done there.
    pub fn is_equivalent(&self, other: &Self, caps: &Caps) -> Result<bool> {
        let diff = self.representative.sub(&other.representative)?;
        if diff.is_zero() {
            return Ok(true);
        }
        let level = diff.level;
        if level == 0 {
            return Ok(false);
        }
        let ech = coboundary_echelon::<F>(&self.representative.alphabet, level - 1, level, caps)?;
        Ok(ech.contains(diff.to_row(level)?))
    }
}

/// `chi_{n,k}`: the class of the indicator of sequences beginning with
/// `g_k` repeated `n` times. `k` is 1-based.
pub fn chi_class<F: Field>(alphabet: &Alphabet, n: usize, k: usize) -> Result<CoinvariantClass<F>> {
    if k == 0 || k > alphabet.size() || n == 0 {
        return Err(Error::SymbolOutOfRange { index: k, size: alphabet.size() });
    }
    let w = ReducedWord::new(alphabet, vec![k - 1; n])?;
    Ok(CoinvariantClass::new(CylinderFunction::indicator(*alphabet, &w)?))
}

/// Rank of the images of `classes` (all of level `<= n`) in
/// `Gr_n = F_n / F_{n-1}`.
pub fn gr_rank<F: Field>(alphabet: &Alphabet, n: usize, classes: &[CoinvariantClass<F>], caps: &Caps) -> Result<usize> {
    let level = n;
    let width = check_width(alphabet, level, caps)?;
    let mut ech = if n == 0 { SparseEchelon::new(width) } else { coboundary_echelon::<F>(alphabet, n - 1, level, caps)? };
    if n > 0 {
        for idx in 0..alphabet.count_words(n) as usize {
            let v = alphabet.word_at(n, idx);
            let mut entries = Vec::new();
            cylinder_row(alphabet, &v, level, 1, &mut entries);
            ech.insert(SparseRow::new(entries));
        }
    }
    let base = ech.rank();
    for c in classes {
        ech.insert(c.representative.to_row(level)?);
    }
    Ok(ech.rank() - base)
}

/// A periodic orbit: a primitive cyclically admissible word traversed
/// `traversal` times.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbitClass {
    cyclic_word: ReducedWord,
    traversal: usize,
    twist: i64,
}

fn minimal_rotation(letters: &[usize]) -> Vec<usize> {
    let n = letters.len();
    (0..n)
        .map(|r| (0..n).map(|i| letters[(r + i) % n]).collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

fn primitive_period(letters: &[usize]) -> usize {
    let n = letters.len();
    (1..=n).find(|&d| n % d == 0 && (0..n).all(|i| letters[i] == letters[i % d])).unwrap_or(n)
}

impl OrbitClass {
    /// Orbit of the periodic sequence `word word word ...`, repeated
    /// `traversal` times; normalized to a primitive word in minimal rotation.
    pub fn new(alphabet: &Alphabet, word: &ReducedWord, traversal: usize) -> Result<Self> {
        if word.is_empty() || traversal == 0 {
            return Err(Error::NotAdmissible(0));
        }
        ReducedWord::new(alphabet, word.letters().to_vec())?;
        if !word.is_cyclically_admissible(alphabet) {
            return Err(Error::NotAdmissible(word.len()));
        }
        let d = primitive_period(word.letters());
        let prim = minimal_rotation(&word.letters()[..d]);
        Ok(Self {
            cyclic_word: ReducedWord::from_trusted(prim),
            traversal: traversal * (word.len() / d),
            twist: 0,
        })
    }

    /// The orbit of the fixed point `g_k g_k g_k ...` traversed `traversal`
    /// times; `k` is 1-based.
    pub fn power_of_generator(alphabet: &Alphabet, k: usize, traversal: usize) -> Result<Self> {
        alphabet.check_symbol(k.wrapping_sub(1))?;
        Self::new(alphabet, &ReducedWord::from_trusted(vec![k - 1]), traversal)
    }

    pub fn cyclic_word(&self) -> &ReducedWord {
        &self.cyclic_word
    }

    pub fn primitive_period(&self) -> usize {
        self.cyclic_word.len()
    }

    pub fn traversal(&self) -> usize {
        self.traversal
    }

    pub fn twist(&self) -> i64 {
        self.twist
    }

    pub fn with_twist(mut self, twist: i64) -> Self {
        self.twist = twist;
        self
    }

    /// Total period `primitive_period * traversal`.
    pub fn period(&self) -> usize {
        self.primitive_period() * self.traversal
    }
}

/// All periodic orbits of total period `period`, in lexicographic order of
/// their canonical words. The number of periodic points is
/// `sum(primitive_period)`.
pub fn enumerate_periodic(alphabet: &Alphabet, period: usize, caps: &Caps) -> Result<Vec<OrbitClass>> {
    if period == 0 {
        return Err(Error::NotAdmissible(0));
    }
    let mut out = Vec::new();
    for w in enumerate_admissible(alphabet, period, caps)? {
        if !w.is_cyclically_admissible(alphabet) {
            continue;
        }
        if minimal_rotation(w.letters()) != w.letters() {
            continue;
        }
        out.push(OrbitClass::new(alphabet, &w, 1)?);
    }
    Ok(out)
}

pub fn periodic_point_count(orbits: &[OrbitClass]) -> u128 {
    orbits.iter().map(|o| o.primitive_period() as u128).sum()
}

/// `(2g-1)^N + g + (-1)^N (g-1)`.
pub fn periodic_count_formula(genus: usize, period: usize) -> i128 {
    let g = genus as i128;
    let sign = if period % 2 == 0 { 1 } else { -1 };
    (2 * g - 1).pow(period as u32) + g + sign * (g - 1)
}

/// Pairing of a cylinder function with a periodic orbit: the sum of the
/// function over the points of the orbit, times the traversal count.
pub fn pair_function<F: Field>(f: &CylinderFunction<F>, o: &OrbitClass) -> Twisted<F> {
    let word = o.cyclic_word.letters();
    let l = word.len();
    let mut buf = vec![0usize; f.level + 1];
    let mut total = F::zero();
    for r in 0..l {
        for (i, b) in buf.iter_mut().enumerate() {
            *b = word[(r + i) % l];
        }
        total = total + f.eval(&buf);
    }
    Twisted { value: total * F::from_int(o.traversal as i64), twist: f.twist + o.twist }
}

pub fn pair<F: Field>(c: &CoinvariantClass<F>, o: &OrbitClass) -> Twisted<F> {
    pair_function(&c.representative, o)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum DynKind {
    /// `gr V` inside dynamical cohomology, weights `p <= 0`.
    Cohomology,
    /// `gr W` inside dynamical homology, weights `p >= 1`.
    Homology,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DynBasis<F> {
    Cohomology(Vec<CoinvariantClass<F>>),
    Homology(Vec<OrbitClass>),
}

/// A graded piece of `V` or `W` with its canonical `2g`-element basis.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedDynSpace<F> {
    pub kind: DynKind,
    pub weight: i64,
    pub twist: i64,
    pub basis: DynBasis<F>,
}

impl<F: Field> GradedDynSpace<F> {
    pub fn dim(&self) -> usize {
        match &self.basis {
            DynBasis::Cohomology(b) => b.len(),
            DynBasis::Homology(b) => b.len(),
        }
    }
}

/// `gr_{2p} V`, spanned by `(2 pi i)^p chi_{-p+1,k}`.
pub fn v_space<F: Field>(alphabet: &Alphabet, p: i64) -> Result<GradedDynSpace<F>> {
    if p > 0 {
        return Err(Error::WeightOutOfRange(p));
    }
    let n = (1 - p) as usize;
    let basis = (1..=alphabet.size())
        .map(|k| {
            chi_class::<F>(alphabet, n, k)
                .map(|c| CoinvariantClass::new(c.representative.with_twist(p)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GradedDynSpace { kind: DynKind::Cohomology, weight: p, twist: p, basis: DynBasis::Cohomology(basis) })
}

/// `gr_{2p} W`, spanned by `(2 pi i)^p [g_k, traversal p]`.
pub fn w_space<F: Field>(alphabet: &Alphabet, p: i64) -> Result<GradedDynSpace<F>> {
    if p < 1 {
        return Err(Error::WeightOutOfRange(p));
    }
    let basis = (1..=alphabet.size())
        .map(|k| OrbitClass::power_of_generator(alphabet, k, p as usize).map(|o| o.with_twist(p)))
        .collect::<Result<Vec<_>>>()?;
    Ok(GradedDynSpace { kind: DynKind::Homology, weight: p, twist: p, basis: DynBasis::Homology(basis) })
}

/// Matrix `[<v_i, w_j>]` between a `V` piece and a `W` piece, with the
/// total formal twist.
pub fn pairing_matrix<F: Field>(v: &GradedDynSpace<F>, w: &GradedDynSpace<F>) -> Result<(Matrix<F>, i64)> {
    match (&v.basis, &w.basis) {
        (DynBasis::Cohomology(cs), DynBasis::Homology(os)) => {
            let m = Matrix::from_fn(cs.len(), os.len(), |i, j| pair(&cs[i], &os[j]).value);
            Ok((m, v.twist + w.twist))
        }
        _ => Err(Error::Config("pairing needs a cohomology piece and a homology piece".into())),
    }
}

/// Reported rank of the homology filtration piece `K_N` next to a computed
/// orbit-span rank.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct KRankRow {
    pub genus: usize,
    pub n: usize,
    pub rank_reference: u128,
    /// Rank of the pairing matrix between orbits of period `<= N + 1` and
    /// level-`N` cylinder indicators.
    pub orbit_span_rank: usize,
}

pub fn k_rank_reference(genus: usize, n: usize) -> u128 {
    let b = 2 * genus as u128 - 1;
    if n % 2 == 0 {
        b.pow(n as u32) + 1
    } else {
        b.pow(n as u32) + b
    }
}

pub fn k_rank_report<F: Field>(alphabet: &Alphabet, n: usize, caps: &Caps) -> Result<KRankRow> {
    let words = enumerate_admissible(alphabet, n + 1, caps)?;
    let mut ech = SparseEchelon::<F>::new(words.len());
    for period in 1..=n + 1 {
        for o in enumerate_periodic(alphabet, period, caps)? {
            let row = words
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    let f = CylinderFunction::<F>::indicator(*alphabet, w).expect("nonempty");
                    (i, pair_function(&f, &o).value)
                })
                .collect();
            ech.insert(SparseRow::new(row));
        }
    }
    Ok(KRankRow { genus: alphabet.genus(), n, rank_reference: k_rank_reference(alphabet.genus(), n), orbit_span_rank: ech.rank() })
}
