//! Plain-text model specifications (TOML).
//!
//! ```toml
//! kind = "conformal"
//! amplitude = 0.1
//! width = 0.5
//!
//! [model]
//! kind = "product"
//!
//! [[model.factors]]
//! kind = "fubini_study"
//! complex_dim = 1
//! c = 1.0
//!
//! [[model.factors]]
//! kind = "fubini_study"
//! complex_dim = 1
//! c = 1.0
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn one() -> f64 {
    1.0
}

fn default_amplitude() -> f64 {
    0.1
}

fn default_width() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    RoundSphere {
        dim: usize,
        #[serde(default = "one")]
        radius: f64,
    },
    FlatTorus {
        dim: usize,
        #[serde(default)]
        twist: f64,
    },
    FubiniStudy {
        complex_dim: usize,
        c: f64,
    },
    ComplexHyperbolic {
        complex_dim: usize,
        c: f64,
    },
    Product {
        factors: Vec<ModelSpec>,
    },
    Scaled {
        lambda: f64,
        model: Box<ModelSpec>,
    },
    Conformal {
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        #[serde(default = "default_width")]
        width: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
        model: Box<ModelSpec>,
    },
}

impl ModelSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("model spec serializes")
    }

    pub fn fubini_study(complex_dim: usize, c: f64) -> Self {
        ModelSpec::FubiniStudy { complex_dim, c }
    }

    pub fn complex_hyperbolic(complex_dim: usize, c: f64) -> Self {
        ModelSpec::ComplexHyperbolic { complex_dim, c }
    }

    pub fn round_sphere(dim: usize, radius: f64) -> Self {
        ModelSpec::RoundSphere { dim, radius }
    }

    pub fn flat_torus(dim: usize) -> Self {
        ModelSpec::FlatTorus { dim, twist: 0.0 }
    }

    pub fn product(factors: Vec<ModelSpec>) -> Self {
        ModelSpec::Product { factors }
    }

    pub fn scaled(lambda: f64, model: ModelSpec) -> Self {
        ModelSpec::Scaled {
            lambda,
            model: Box::new(model),
        }
    }

    pub fn conformal(amplitude: f64, width: f64, model: ModelSpec) -> Self {
        ModelSpec::Conformal {
            amplitude,
            width,
            center: None,
            model: Box::new(model),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ModelSpec::RoundSphere { dim, .. } | ModelSpec::FlatTorus { dim, .. } => *dim,
            ModelSpec::FubiniStudy { complex_dim, .. }
            | ModelSpec::ComplexHyperbolic { complex_dim, .. } => 2 * complex_dim,
            ModelSpec::Product { factors } => factors.iter().map(ModelSpec::dim).sum(),
            ModelSpec::Scaled { model, .. } | ModelSpec::Conformal { model, .. } => model.dim(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        match self {
            ModelSpec::RoundSphere { dim, radius } => {
                if *dim < 2 {
                    return bad(format!("sphere dimension {dim} < 2"));
                }
                if !(*radius > 0.0) {
                    return bad(format!("sphere radius {radius} must be positive"));
                }
            }
            ModelSpec::FlatTorus { dim, twist } => {
                if *dim < 1 {
                    return bad("torus dimension must be positive".into());
                }
                if *twist != 0.0 && (*dim < 4 || dim % 2 != 0) {
                    return bad("twisted J needs an even torus dimension ≥ 4".into());
                }
            }
            ModelSpec::FubiniStudy { complex_dim, c } => {
                if *complex_dim < 1 {
                    return bad("complex dimension must be ≥ 1".into());
                }
                if !(*c > 0.0) {
                    return bad(format!("fubini_study needs c > 0, got {c}"));
                }
            }
            ModelSpec::ComplexHyperbolic { complex_dim, c } => {
                if *complex_dim < 1 {
                    return bad("complex dimension must be ≥ 1".into());
                }
                if !(*c < 0.0) {
                    return bad(format!("complex_hyperbolic needs c < 0, got {c}"));
                }
            }
            ModelSpec::Product { factors } => {
                if factors.len() < 2 {
                    return bad("product needs at least two factors".into());
                }
                for f in factors {
                    f.validate()?;
                }
                let with_j: Vec<bool> = factors.iter().map(ModelSpec::has_j).collect();
                if with_j.iter().any(|&b| b) && !with_j.iter().all(|&b| b) {
                    return bad("product factors must all carry J or none".into());
                }
            }
            ModelSpec::Scaled { lambda, model } => {
                if !(*lambda > 0.0) {
                    return bad(format!("scale factor {lambda} must be positive"));
                }
                model.validate()?;
            }
            ModelSpec::Conformal {
                amplitude,
                width,
                center,
                model,
            } => {
                model.validate()?;
                if !amplitude.is_finite() || !(*width > 0.0) {
                    return bad("bump needs finite amplitude and positive width".into());
                }
                if let Some(c) = center {
                    if c.len() != model.dim() {
                        return bad("bump center has wrong dimension".into());
                    }
                }
            }
        }
        Ok(())
    }

    fn has_j(&self) -> bool {
        match self {
            ModelSpec::RoundSphere { .. } => false,
            ModelSpec::FlatTorus { dim, .. } => dim % 2 == 0,
            ModelSpec::FubiniStudy { .. } | ModelSpec::ComplexHyperbolic { .. } => true,
            ModelSpec::Product { factors } => factors.iter().all(ModelSpec::has_j),
            ModelSpec::Scaled { model, .. } | ModelSpec::Conformal { model, .. } => model.has_j(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_conformal() {
        let text = r#"
kind = "conformal"
amplitude = 0.1
width = 0.5

[model]
kind = "product"

[[model.factors]]
kind = "fubini_study"
complex_dim = 1
c = 1.0

[[model.factors]]
kind = "fubini_study"
complex_dim = 1
c = 1.0
"#;
        let spec = ModelSpec::from_toml(text).unwrap();
        assert_eq!(spec.dim(), 4);
        spec.validate().unwrap();
        let back = ModelSpec::from_toml(&spec.to_toml()).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ModelSpec::fubini_study(2, -1.0).validate().is_err());
        assert!(ModelSpec::complex_hyperbolic(2, 1.0).validate().is_err());
        assert!(ModelSpec::scaled(0.0, ModelSpec::flat_torus(2)).validate().is_err());
        assert!(ModelSpec::from_toml("kind = \"klein_bottle\"").is_err());
    }
}
