//! JSON surface of the CLI: jet bundles, field jets, fixtures and series,
//! plus the `@file` / inline-JSON / bare-name argument convention.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use gl2flat::hflat::HJet;
use gl2flat::jets::{FieldJet, Fixture, Jet2Scalar};
use gl2flat::linalg::{MatN, Subspace};
use gl2flat::taylor::SeriesSolution;

/// Reads an argument that is either a bare fixture name (`zero`), an inline
/// JSON object, or `@path` to a JSON file.
pub fn read_spec_arg(arg: &str) -> Result<String> {
    if let Some(path) = arg.strip_prefix('@') {
        return std::fs::read_to_string(path).with_context(|| format!("reading {path}"));
    }
    Ok(arg.to_string())
}

pub fn parse_fixture(arg: &str) -> Result<Fixture> {
    let text = read_spec_arg(arg)?;
    let trimmed = text.trim();
    let json = if trimmed.starts_with('{') {
        trimmed.to_string()
    } else {
        // Bare name shorthand for parameterless fixtures.
        format!("{{\"name\":\"{trimmed}\"}}")
    };
    let fixture: Fixture = serde_json::from_str(&json)
        .with_context(|| format!("parsing fixture description {json}"))?;
    Ok(fixture)
}

#[derive(Debug, Deserialize)]
pub struct JetScalarDto {
    pub value: f64,
    pub grad: [f64; 4],
    #[serde(default)]
    pub hess: Option<[[f64; 4]; 4]>,
}

/// Field-jet JSON: Hessians are optional; operations that differentiate
/// first-derivative coefficients require them.
#[derive(Debug, Deserialize)]
pub struct FieldJetDto {
    pub base_point: [f64; 4],
    pub a: JetScalarDto,
    pub b: JetScalarDto,
    pub c: JetScalarDto,
    pub d: JetScalarDto,
}

impl FieldJetDto {
    pub fn to_jet(&self) -> Result<(FieldJet, bool)> {
        let mut jet = FieldJet::zero(self.base_point);
        let mut has_hessians = true;
        for (slot, dto) in [(0, &self.a), (1, &self.b), (2, &self.c), (3, &self.d)] {
            let hess = match dto.hess {
                Some(h) => h,
                None => {
                    has_hessians = false;
                    [[0.0; 4]; 4]
                }
            };
            *jet.field_mut(slot) = Jet2Scalar::new(dto.value, dto.grad, hess)
                .map_err(|e| anyhow!("field {slot}: {e}"))?;
        }
        Ok((jet, has_hessians))
    }
}

pub fn parse_field_jet(arg: &str) -> Result<(FieldJet, bool)> {
    let text = read_spec_arg(arg)?;
    let dto: FieldJetDto = serde_json::from_str(&text).context("parsing field-jet JSON")?;
    dto.to_jet()
}

/// Bundle for the Spencer test: a group-valued 1-jet and an algebra basis.
#[derive(Debug, Deserialize)]
pub struct SpencerBundleDto {
    pub h: MatN,
    pub dh: Vec<MatN>,
    pub g_basis: Vec<MatN>,
}

pub fn parse_spencer_bundle(arg: &str) -> Result<(HJet, Subspace)> {
    let text = read_spec_arg(arg)?;
    let dto: SpencerBundleDto = serde_json::from_str(&text).context("parsing jet bundle JSON")?;
    let n = dto.h.n();
    let jet = HJet::new(dto.h, dto.dh).map_err(|e| anyhow!("jet bundle: {e}"))?;
    let g = Subspace::new(n, dto.g_basis).map_err(|e| anyhow!("algebra basis: {e}"))?;
    Ok((jet, g))
}

/// Comma-separated reals, e.g. `--xi 1,0,0,0`.
pub fn parse_reals<const N: usize>(arg: &str) -> Result<[f64; N]> {
    let parts: Vec<&str> = arg.split(',').collect();
    if parts.len() != N {
        bail!("expected {N} comma-separated values, got {}", parts.len());
    }
    let mut out = [0.0; N];
    for (slot, raw) in out.iter_mut().zip(&parts) {
        *slot = raw
            .trim()
            .parse::<f64>()
            .with_context(|| format!("parsing `{raw}` as a real"))?;
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct SeriesTermDto {
    index: Vec<u8>,
    coeff: f64,
}

#[derive(Debug, Serialize)]
pub struct SeriesDto {
    order: usize,
    a: Vec<SeriesTermDto>,
    b: Vec<SeriesTermDto>,
    c: Vec<SeriesTermDto>,
    d: Vec<SeriesTermDto>,
}

impl SeriesDto {
    pub fn from_solution(s: &SeriesSolution) -> SeriesDto {
        let dump = |i: usize| -> Vec<SeriesTermDto> {
            s.fields[i]
                .iter_nonzero()
                .map(|(m, c)| SeriesTermDto {
                    index: m.to_vec(),
                    coeff: c,
                })
                .collect()
        };
        SeriesDto {
            order: s.order,
            a: dump(0),
            b: dump(1),
            c: dump(2),
            d: dump(3),
        }
    }
}

/// Resolves an output path against the directory override, when set.
pub fn resolve_out(path: &str) -> std::path::PathBuf {
    let p = std::path::PathBuf::from(path);
    if p.is_relative() {
        if let Ok(dir) = std::env::var("GL2FLAT_OUT") {
            return std::path::PathBuf::from(dir).join(p);
        }
    }
    p
}

pub fn write_json<T: Serialize>(path: &str, value: &T) -> Result<()> {
    let full = resolve_out(path);
    if let Some(parent) = full.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(&full, text).with_context(|| format!("writing {}", full.display()))?;
    Ok(())
}

/// Plain numeric CSV table; fields never need quoting here.
pub fn write_csv(path: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let full = resolve_out(path);
    if let Some(parent) = full.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(&full, text).with_context(|| format!("writing {}", full.display()))?;
    Ok(())
}
