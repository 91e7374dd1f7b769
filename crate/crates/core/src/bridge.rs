//! The isomorphisms `U`, `U~` between the archimedean model and the
//! dynamical spaces `V`, `W`, the duality `D` induced by the
//! homology/cohomology pairing, and the commutativity check of the square
//!
//! ```text
//!   gr_{2p} H^1      --delta_1-->  gr_{2(2-p)} H^2
//!      | U                             | U~
//!   gr_{2p} V        ----D------>  gr_{2(1-p)} W
//! ```

use rayon::prelude::*;
use serde::Serialize;

use crate::arch::{duality_delta, f_infinity_arch, ConeModel, GradedElement, Source};
use crate::error::{Error, Result};
use crate::scalar::{sign_pow, Field};
use crate::schottky::Alphabet;
use crate::subshift::{
    chi_class, pair_function, pairing_matrix, v_space, w_space, CylinderFunction, DynKind, OrbitClass,
};

/// Genus, weight range and the basis correspondence `e_k <-> g_k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BridgeConfig {
    pub genus: usize,
    pub p_min: i64,
    pub p_max: i64,
    /// `correspondence[k]` is the Schottky symbol matched with `e_k`.
    pub correspondence: Vec<usize>,
}

impl BridgeConfig {
    pub fn new(genus: usize, p_min: i64, p_max: i64) -> Result<Self> {
        Self::with_correspondence(genus, p_min, p_max, (0..2 * genus).collect())
    }

    /// Validates that the correspondence is a bijection intertwining
    /// `k <-> k + g` with symbol inversion.
    pub fn with_correspondence(genus: usize, p_min: i64, p_max: i64, correspondence: Vec<usize>) -> Result<Self> {
        let alphabet = Alphabet::new(genus)?;
        if p_min > p_max || p_max > 0 {
            return Err(Error::InvalidWindow { p_min, p_max });
        }
        let n = alphabet.size();
        if correspondence.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: correspondence.len() });
        }
        let mut seen = vec![false; n];
        for (k, &s) in correspondence.iter().enumerate() {
            alphabet.check_symbol(s)?;
            if std::mem::replace(&mut seen[s], true) {
                return Err(Error::Config(format!("symbol {} matched twice", alphabet.label(s))));
            }
            if correspondence[(k + genus) % n] != alphabet.inverse_of(s) {
                return Err(Error::Config("correspondence does not intertwine the involutions".into()));
            }
        }
        Ok(Self { genus, p_min, p_max, correspondence })
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.genus).expect("validated genus")
    }

    /// Arch window covering `[p_min, 2 - p_min]`.
    pub fn arch_model(&self) -> Result<ConeModel> {
        ConeModel::new(self.genus, self.p_min.min(-1), (2 - self.p_min).max(2))
    }
}

/// A vector in `gr_{2p} V` or `gr_{2p} W`, in the canonical basis, with the
/// formal twist `(2 pi i)^twist` of the basis elements.
#[derive(Clone, Debug, PartialEq)]
pub struct DynElement<F> {
    pub kind: DynKind,
    pub weight: i64,
    pub twist: i64,
    pub coords: Vec<F>,
}

impl<F: Field> DynElement<F> {
    /// Coefficients by Schottky symbol (0-based).
    pub fn coords(&self) -> &[F] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_negligible())
    }

    pub fn scale(&self, s: &F) -> Self {
        Self { coords: self.coords.iter().map(|c| c.clone() * s.clone()).collect(), ..self.clone() }
    }

    /// Cohomology side: `sum_k c_k chi_{1-p, k}` with its twist.
    pub fn cylinder_representative(&self, alphabet: &Alphabet) -> Result<CylinderFunction<F>> {
        if self.kind != DynKind::Cohomology {
            return Err(Error::Config("not a cohomology element".into()));
        }
        let n = (1 - self.weight) as usize;
        let mut f = CylinderFunction::zero(*alphabet, n - 1);
        for (k, c) in self.coords.iter().enumerate() {
            let chi = chi_class::<F>(alphabet, n, k + 1)?;
            f = f.add(&chi.representative().scale(c))?;
        }
        Ok(f.with_twist(self.twist))
    }

    /// Homology side: `(coefficient, orbit)` terms.
    pub fn orbit_terms(&self, alphabet: &Alphabet) -> Result<Vec<(F, OrbitClass)>> {
        if self.kind != DynKind::Homology {
            return Err(Error::Config("not a homology element".into()));
        }
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_negligible())
            .map(|(k, c)| {
                OrbitClass::power_of_generator(alphabet, k + 1, self.weight as usize)
                    .map(|o| (c.clone(), o.with_twist(self.twist)))
            })
            .collect()
    }
}

fn relabel<F: Field>(cfg: &BridgeConfig, coords: &[F]) -> Vec<F> {
    let mut out = vec![F::zero(); coords.len()];
    for (k, c) in coords.iter().enumerate() {
        out[cfg.correspondence[k]] = c.clone();
    }
    out
}

/// `U: gr_{2p} H^1 -> gr_{2p} V`, `e_k -> (2 pi i)^p chi_{1-p,k}`.
pub fn map_u<F: Field>(cfg: &BridgeConfig, x: &GradedElement<F>) -> Result<DynElement<F>> {
    let pc = x.piece();
    if pc.q != 1 || pc.source != Source::H1 {
        return Err(Error::NoSuchPiece { q: pc.q, p: pc.p, source_label: "H1 in degree 1" });
    }
    if pc.p > 0 || pc.p < cfg.p_min {
        return Err(Error::WeightOutOfRange(pc.p));
    }
    Ok(DynElement { kind: DynKind::Cohomology, weight: pc.p, twist: pc.twist(), coords: relabel(cfg, x.coords()) })
}

/// `U~: gr_{2p'} H^2 -> gr_{2(p'-1)} W`, `e_k -> (2 pi i)^{p'-1} [g_k, p'-1]`.
pub fn map_u_tilde<F: Field>(cfg: &BridgeConfig, y: &GradedElement<F>) -> Result<DynElement<F>> {
    let pc = y.piece();
    if pc.q != 2 || pc.source != Source::H1 {
        return Err(Error::NoSuchPiece { q: pc.q, p: pc.p, source_label: "H1 in degree 2" });
    }
    if pc.p < 2 || pc.p > 2 - cfg.p_min {
        return Err(Error::WeightOutOfRange(pc.p));
    }
    Ok(DynElement { kind: DynKind::Homology, weight: pc.p - 1, twist: pc.twist(), coords: relabel(cfg, y.coords()) })
}

/// `D: gr_{2p} V -> gr_{2(1-p)} W`, basis to basis.
pub fn duality_dyn<F: Field>(v: &DynElement<F>) -> Result<DynElement<F>> {
    if v.kind != DynKind::Cohomology || v.weight > 0 {
        return Err(Error::WeightOutOfRange(v.weight));
    }
    let w = 1 - v.weight;
    Ok(DynElement { kind: DynKind::Homology, weight: w, twist: w, coords: v.coords.clone() })
}

/// Orientation reversal: `k -> k + g` on symbols, times `(-1)^twist`.
pub fn f_infinity_dyn<F: Field>(genus: usize, v: &DynElement<F>) -> DynElement<F> {
    let n = v.coords.len();
    let s: F = sign_pow(v.twist);
    let mut coords = vec![F::zero(); n];
    for (k, c) in v.coords.iter().enumerate() {
        coords[(k + genus) % n] = c.clone() * s.clone();
    }
    DynElement { coords, ..v.clone() }
}

/// Pairing of a `V` element with a `W` element through representatives.
pub fn pair_elements<F: Field>(alphabet: &Alphabet, v: &DynElement<F>, w: &DynElement<F>) -> Result<(F, i64)> {
    let f = v.cylinder_representative(alphabet)?;
    let mut total = F::zero();
    let mut twist = v.twist + w.twist;
    for (c, o) in w.orbit_terms(alphabet)? {
        let t = pair_function(&f, &o);
        total = total + c * t.value;
        twist = t.twist;
    }
    Ok((total, twist))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagramRow {
    pub p: i64,
    /// 1-based basis index.
    pub k: usize,
    /// `D(U(e_k))` as (weight, twist, coefficients).
    pub via_u: (i64, i64, Vec<String>),
    /// `U~(delta_1(e_k))`.
    pub via_delta: (i64, i64, Vec<String>),
    pub commutes: bool,
    pub u_equivariant: bool,
    pub u_tilde_equivariant: bool,
    /// `D F = -F D`: `F_infinity` acts by `-1` on the twist-one pairing value.
    pub d_anti_equivariant: bool,
    /// Pairing of `U(e_k)` with `D(U(e_k))`.
    pub pairing: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagramReport {
    pub genus: usize,
    pub p_min: i64,
    pub p_max: i64,
    pub rows: Vec<DiagramRow>,
    /// Pairing matrix of `gr V` against `gr W` is `(1-p) id` for every `p`.
    pub pairing_matrices_scalar: bool,
    pub first_failure: Option<(i64, usize)>,
    pub all_pass: bool,
}

fn show<F: Field>(v: &DynElement<F>) -> (i64, i64, Vec<String>) {
    (v.weight, v.twist, v.coords.iter().map(|c| format!("{c:?}")).collect())
}

fn check_one<F: Field>(cfg: &BridgeConfig, model: &ConeModel, p: i64, k: usize) -> Result<DiagramRow> {
    let g = cfg.genus;
    let alphabet = cfg.alphabet();
    let x = model.basis_element::<F>(1, p, k)?;
    let u = map_u(cfg, &x)?;
    let via_u = duality_dyn(&u)?;
    let dx = duality_delta(model, &x)?;
    let via_delta = map_u_tilde(cfg, &dx)?;

    let fx = f_infinity_arch(model, &x)?;
    let u_equivariant = map_u(cfg, &fx)? == f_infinity_dyn(g, &u);
    let fdx = f_infinity_arch(model, &dx)?;
    let u_tilde_equivariant = map_u_tilde(cfg, &fdx)? == f_infinity_dyn(g, &via_delta);
    let d_anti_equivariant = duality_dyn(&f_infinity_dyn(g, &u))? == f_infinity_dyn(g, &via_u).scale(&-F::one());

    let (value, twist) = pair_elements(&alphabet, &u, &via_u)?;
    Ok(DiagramRow {
        p,
        k: k + 1,
        commutes: via_u == via_delta,
        via_u: show(&via_u),
        via_delta: show(&via_delta),
        u_equivariant,
        u_tilde_equivariant,
        d_anti_equivariant,
        pairing: format!("{value:?} (2 pi i)^{twist}"),
    })
}

/// Checks the square on every basis vector for `p` in the configured range.
pub fn check_diagram<F: Field>(cfg: &BridgeConfig) -> Result<DiagramReport> {
    let model = cfg.arch_model()?;
    let alphabet = cfg.alphabet();
    let n = 2 * cfg.genus;
    let jobs: Vec<(i64, usize)> = (cfg.p_min..=cfg.p_max).flat_map(|p| (0..n).map(move |k| (p, k))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(p, k)| check_one::<F>(cfg, &model, p, k))
        .collect::<Result<Vec<_>>>()?;
    let mut pairing_matrices_scalar = true;
    for p in cfg.p_min..=cfg.p_max {
        let v = v_space::<F>(&alphabet, p)?;
        let w = w_space::<F>(&alphabet, 1 - p)?;
        let (m, twist) = pairing_matrix(&v, &w)?;
        let expected = crate::linalg::Matrix::<F>::identity(n).scale(&F::from_int(1 - p));
        pairing_matrices_scalar &= m == expected && twist == 1;
    }
    let first_failure = rows
        .iter()
        .find(|r| !(r.commutes && r.u_equivariant && r.u_tilde_equivariant && r.d_anti_equivariant))
        .map(|r| (r.p, r.k));
    Ok(DiagramReport {
        genus: cfg.genus,
        p_min: cfg.p_min,
        p_max: cfg.p_max,
        all_pass: first_failure.is_none() && pairing_matrices_scalar,
        rows,
        pairing_matrices_scalar,
        first_failure,
    })
}
