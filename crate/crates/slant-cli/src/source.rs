//! Loading an immersion and the complex structure a command runs under.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use serde_json::{json, Value};
use slant::cxstruct::{self, j_alpha_2m};
use slant::dsl::ImmersionConfig;
use slant::exterior::j0_block;
use slant::jets::catalog;
use slant::{ComplexStructure, GeomError, Immersion};

/// Exit 2 for bad input, 3 for invariants violated or numerics failing on valid input.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, message) = match self {
            CliError::Config(m) => ("config", m),
            CliError::Numeric(m) => ("numeric", m),
        };
        json!({"error": {"kind": kind, "message": message}})
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        if e.is_config() || matches!(e, GeomError::InsufficientSamples { .. }) {
            CliError::Config(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// The structure in the ambient dimension of the surface.
#[derive(Clone, Debug)]
pub enum Structure {
    Four(ComplexStructure),
    General(DMatrix<f64>),
}

pub struct Source {
    pub imm: Immersion,
    pub kind: &'static str,
    pub id: String,
    pub params: BTreeMap<String, f64>,
    pub structure_id: String,
    pub structure: Structure,
}

impl Source {
    pub fn describe(&self) -> Value {
        let d = self.imm.domain;
        json!({
            "kind": self.kind,
            "id": self.id,
            "params": self.params,
            "ambient_dim": self.imm.ambient_dim,
            "domain": [[d.u.0, d.u.1], [d.v.0, d.v.1]],
            "periods": self.imm.periods,
        })
    }

    pub fn describe_structure(&self) -> Value {
        match &self.structure {
            Structure::Four(j) => {
                let mut v = serde_json::to_value(j).expect("structure serializes");
                v["id"] = json!(self.structure_id);
                v["zeta_eta"] = json!(cxstruct::zeta_of(j).to_eta());
                v
            }
            Structure::General(m) => json!({
                "id": self.structure_id,
                "matrix": (0..m.nrows()).map(|r| m.row(r).iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>(),
            }),
        }
    }

    pub fn four(&self) -> Option<&ComplexStructure> {
        match &self.structure {
            Structure::Four(j) => Some(j),
            Structure::General(_) => None,
        }
    }
}

/// Parse repeated "--param a=1,b=2" values into one map.
pub fn merge_params(items: &[String]) -> CliResult<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for item in items {
        out.extend(catalog::parse_params(item)?);
    }
    Ok(out)
}

fn structure_for(dim: usize, id: &str) -> CliResult<Structure> {
    match dim {
        4 => Ok(Structure::Four(cxstruct::by_id(id)?)),
        _ => {
            if id == "J0" {
                return Ok(Structure::General(j0_block(dim)));
            }
            if let Some(a) = id.strip_prefix("Jalpha:") {
                let alpha: f64 = a
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad angle in '{id}'")))?;
                return Ok(Structure::General(j_alpha_2m(dim, alpha)?));
            }
            Err(CliError::Config(format!(
                "structure '{id}' is only defined on E^4; use J0 or Jalpha:<radians> in dimension {dim}"
            )))
        }
    }
}

/// Load from exactly one of a catalog spec or a config path.
pub fn load(
    catalog_spec: Option<&str>,
    config: Option<&str>,
    params: &[String],
    j: Option<&str>,
) -> CliResult<Source> {
    let overrides = merge_params(params)?;
    let (imm, kind, id, params, default_j) = match (catalog_spec, config) {
        (Some(spec), None) => {
            let (e, p) = catalog::resolve(spec, &overrides)?;
            let imm = catalog::build(e.id, &p)?;
            let dj = e.structure_id(&p).unwrap_or_else(|| "J0".into());
            (imm, "catalog", e.id.to_string(), p, dj)
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{path}: {e}")))?;
            let mut cfg = ImmersionConfig::from_json(&text).map_err(CliError::Config)?;
            for (k, v) in &overrides {
                if !cfg.params.contains_key(k) {
                    return Err(CliError::Config(format!("config '{}' has no parameter '{k}'", cfg.name)));
                }
                cfg.params.insert(k.clone(), *v);
            }
            let imm = Immersion::from_config(&cfg)?;
            (imm, "config", cfg.name.clone(), cfg.params.clone(), "J0".to_string())
        }
        _ => return Err(CliError::Config("give exactly one of --catalog or --config".into())),
    };
    let structure_id = j.map(str::to_string).unwrap_or(default_j);
    let structure = structure_for(imm.ambient_dim, &structure_id)?;
    Ok(Source {
        imm,
        kind,
        id,
        params,
        structure_id,
        structure,
    })
}
