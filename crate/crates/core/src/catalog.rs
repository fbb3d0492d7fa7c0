//! Annotated class models and the JSON catalog file that stores them.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basis::{BasisId, LSBasis};
use crate::detect::DeterminingPointSpec;
use crate::error::{Error, Result};
use crate::space::{SymbolVector, Transform};

pub const CATALOG_VERSION: u32 = 1;

/// A class average together with its determining-point annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedModel {
    pub class_id: String,
    pub average: SymbolVector,
    pub annotations: Vec<DeterminingPointSpec>,
    pub sample_count: usize,
    pub slant_deg: f64,
}

impl AnnotatedModel {
    pub fn new(class_id: impl Into<String>, average: SymbolVector, sample_count: usize) -> Self {
        Self {
            class_id: class_id.into(),
            average,
            annotations: Vec::new(),
            sample_count,
            slant_deg: 0.0,
        }
    }

    pub fn with_annotations(mut self, annotations: Vec<DeterminingPointSpec>) -> Self {
        self.annotations = annotations;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |message: String| Error::InvalidModel {
            class_id: self.class_id.clone(),
            message,
        };
        if let Some(a) = self.annotations.iter().find(|a| !(0.0..=1.0).contains(&a.s)) {
            return Err(invalid(format!("annotation s = {} outside [0, 1]", a.s)));
        }
        if !self.slant_deg.is_finite() || self.slant_deg.abs() >= 90.0 {
            return Err(invalid(format!("slant {} must lie in (-90, 90)", self.slant_deg)));
        }
        Ok(())
    }
}

/// Models sharing one basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    basis: Arc<LSBasis>,
    models: Vec<AnnotatedModel>,
}

#[derive(Serialize, Deserialize)]
struct CatalogFile {
    version: u32,
    basis: BasisId,
    models: Vec<ModelRecord>,
}

#[derive(Serialize, Deserialize)]
struct ModelRecord {
    class_id: String,
    sample_count: usize,
    coeffs: CoeffRecord,
    transform: Transform,
    annotations: Vec<DeterminingPointSpec>,
    #[serde(default)]
    slant_deg: f64,
}

#[derive(Serialize, Deserialize)]
struct CoeffRecord {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl Catalog {
    pub fn new(basis: Arc<LSBasis>) -> Self {
        Self {
            basis,
            models: Vec::new(),
        }
    }

    pub fn from_models(basis: Arc<LSBasis>, models: Vec<AnnotatedModel>) -> Result<Self> {
        let mut cat = Self::new(basis);
        for m in models {
            if cat.get(&m.class_id).is_some() {
                return Err(Error::DuplicateClass(m.class_id));
            }
            cat.check(&m)?;
            cat.models.push(m);
        }
        Ok(cat)
    }

    fn check(&self, model: &AnnotatedModel) -> Result<()> {
        if model.average.basis().id() != self.basis.id() {
            return Err(Error::BasisMismatch {
                expected: self.basis.id(),
                found: model.average.basis().id(),
            });
        }
        model.validate()
    }

    pub fn basis(&self) -> &Arc<LSBasis> {
        &self.basis
    }

    pub fn models(&self) -> &[AnnotatedModel] {
        &self.models
    }

    pub fn get(&self, class_id: &str) -> Option<&AnnotatedModel> {
        self.models.iter().find(|m| m.class_id == class_id)
    }

    /// Inserts a model, replacing any model with the same class id in place.
    pub fn upsert(&mut self, model: AnnotatedModel) -> Result<()> {
        self.check(&model)?;
        match self.models.iter_mut().find(|m| m.class_id == model.class_id) {
            Some(slot) => *slot = model,
            None => self.models.push(model),
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let file = CatalogFile {
            version: CATALOG_VERSION,
            basis: self.basis.id(),
            models: self
                .models
                .iter()
                .map(|m| ModelRecord {
                    class_id: m.class_id.clone(),
                    sample_count: m.sample_count,
                    coeffs: CoeffRecord {
                        x: m.average.x_coeffs().to_vec(),
                        y: m.average.y_coeffs().to_vec(),
                    },
                    transform: m.average.transform,
                    annotations: m.annotations.clone(),
                    slant_deg: m.slant_deg,
                })
                .collect(),
        };
        // serde_json prints the shortest decimal that reads back to the same f64
        serde_json::to_string_pretty(&file).expect("catalogs always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CatalogFile = serde_json::from_str(text).map_err(|e| Error::parse(&e))?;
        if file.version != CATALOG_VERSION {
            return Err(Error::CatalogVersion(file.version));
        }
        let BasisId { degree, mu } = file.basis;
        if file.basis.validate().is_err() {
            return Err(Error::UnknownBasis { degree, mu });
        }
        let basis = LSBasis::shared(degree, mu)?;
        let mut seen = HashSet::new();
        let mut models = Vec::with_capacity(file.models.len());
        for rec in file.models {
            if !seen.insert(rec.class_id.clone()) {
                return Err(Error::DuplicateClass(rec.class_id));
            }
            if rec.coeffs.x.len() != basis.len() || rec.coeffs.y.len() != basis.len() {
                return Err(Error::InvalidModel {
                    class_id: rec.class_id,
                    message: format!(
                        "expected {} coefficients per coordinate, found {} and {}",
                        basis.len(),
                        rec.coeffs.x.len(),
                        rec.coeffs.y.len()
                    ),
                });
            }
            let mut coeffs = rec.coeffs.x;
            coeffs.extend(rec.coeffs.y);
            let average = SymbolVector::from_parts(
                Arc::clone(&basis),
                coeffs,
                rec.transform,
                Some(rec.class_id.clone()),
            )
            .map_err(|e| Error::InvalidModel {
                class_id: rec.class_id.clone(),
                message: e.to_string(),
            })?;
            models.push(AnnotatedModel {
                class_id: rec.class_id,
                average,
                annotations: rec.annotations,
                sample_count: rec.sample_count,
                slant_deg: rec.slant_deg,
            });
        }
        Catalog::from_models(basis, models)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Writes to a temporary file in the target directory, then renames it
    /// over `path`, so readers never see a partial file.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(self.to_json().as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(path).map_err(|e| Error::Io(e.error))?;
        Ok(())
    }
}
