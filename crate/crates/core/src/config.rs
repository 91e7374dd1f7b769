//! TOML configuration: Schottky generators and the archimedean factor
//! table.
//!
//! Schottky config schema:
//!
//! ```toml
//! genus = 2
//! base_point = [0.0, 0.0, 1.0]      # (x1, x2, t), t > 0
//!
//! [[generators]]                     # exactly `genus` entries
//! matrix = [[[10.0, 0.0], [0.0, 0.0]],
//!           [[0.0, 0.0],  [0.1, 0.0]]]   # [[a, b], [c, d]], each [re, im]
//! ```
//!
//! Factor table schema (each list may hold several factors
//! `Gamma_C(s - shift)^exponent`):
//!
//! ```toml
//! [h0]
//! factors = [{ shift = 0, exponent = 1 }]
//! [h1]
//! factors = [{ shift = 0, exponent = 4 }]
//! [h2]
//! factors = [{ shift = 1, exponent = 1 }]
//! ```

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schottky::{H3Point, MobiusElement, SchottkyGroup};
use crate::zeta::LFactorTable;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub matrix: [[[f64; 2]; 2]; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchottkyConfig {
    pub genus: usize,
    pub base_point: [f64; 3],
    pub generators: Vec<GeneratorConfig>,
}

impl SchottkyConfig {
    /// The configuration of [`SchottkyGroup::default_genus2`].
    pub fn default_genus2() -> Self {
        let lambda = 10.0f64;
        let (ch, sh) = ((lambda + 1.0 / lambda) / 2.0, (lambda - 1.0 / lambda) / 2.0);
        let real = |a: f64, b: f64, c: f64, d: f64| GeneratorConfig {
            matrix: [[[a, 0.0], [b, 0.0]], [[c, 0.0], [d, 0.0]]],
        };
        Self {
            genus: 2,
            base_point: [0.0, 0.0, 1.0],
            generators: vec![real(lambda, 0.0, 0.0, 1.0 / lambda), real(ch, sh, sh, ch)],
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("schottky config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("schottky config: {e}")))
    }

    /// Validates genus, determinants, loxodromy and the base point.
    pub fn to_group(&self) -> Result<SchottkyGroup<f64>> {
        if self.generators.len() != self.genus {
            return Err(Error::Config(format!(
                "genus {} but {} generators",
                self.genus,
                self.generators.len()
            )));
        }
        let gens = self
            .generators
            .iter()
            .map(|g| {
                let e = |r: usize, c: usize| Complex::new(g.matrix[r][c][0], g.matrix[r][c][1]);
                MobiusElement::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
            })
            .collect::<Result<Vec<_>>>()?;
        let [x1, x2, t] = self.base_point;
        SchottkyGroup::new(gens, H3Point::new(x1, x2, t)?)
    }
}

pub fn load_l_factors(path: &Path) -> Result<LFactorTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    l_factors_from_toml_str(&text)
}

pub fn l_factors_from_toml_str(text: &str) -> Result<LFactorTable> {
    let table: LFactorTable = toml::from_str(text).map_err(|e| Error::Config(format!("factor table: {e}")))?;
    for spec in [&table.h0, &table.h1, &table.h2] {
        if spec.factors.iter().any(|f| f.exponent == 0) {
            return Err(Error::Config("factor table: exponents must be nonzero".into()));
        }
    }
    Ok(table)
}
