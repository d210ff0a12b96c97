//! JSON interchange for the documented schemas: DGA models (optionally with
//! a finite-group coefficient block), free-Lie presentations, configuration
//! paths, Lie-valued one-forms, and finite groups.
//!
//! Conventions shared by every schema:
//!
//! * Rational numbers are `"p/q"` strings (`"3"`, `"-5/2"`); Gaussian
//!   rationals are either a bare `"p/q"` (imaginary part zero) or
//!   `{"re": "p/q", "im": "p/q"}`.
//! * Floating complex numbers (path coordinates only) are `[re, im]` pairs.
//! * Loaders reject unknown fields, so typos surface as schema errors with
//!   the offending location, not as silently ignored data.
//!
//! Parse errors carry serde's line/column diagnostics; semantic errors name
//! the offending entity. Both map to "malformed input" at the CLI boundary.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;
use thiserror::Error;

use crate::bar::{BarError, CoefficientCoalgebra, DgaBasisElem, DgaModel};
use crate::freelie::{BracketExpr, Generator, GradedLie, LieError, LiePresentation};
use crate::groups::{FiniteGroup, GroupError};
use crate::linalg::SparseVec;
use crate::rational::{parse_rat, CRat, Rat};
use crate::transport::{PathSegment, PiecewisePath, ScalarOneForm, TransportError};

#[derive(Debug, Error)]
pub enum InterchangeError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON in {path}: {message}")]
    Json { path: String, message: String },
    #[error("schema error in {path}: {message}")]
    Schema { path: String, message: String },
    #[error(transparent)]
    Bar(#[from] BarError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Transport(#[from] TransportError),
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, InterchangeError> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| InterchangeError::Io {
        path: display.clone(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| InterchangeError::Json {
        path: display,
        // serde_json's Display already carries "at line L column C".
        message: e.to_string(),
    })
}

fn schema_err<T>(path: &Path, message: impl Into<String>) -> Result<T, InterchangeError> {
    Err(InterchangeError::Schema { path: path.display().to_string(), message: message.into() })
}

fn rat_field(path: &Path, s: &str, what: &str) -> Result<Rat, InterchangeError> {
    parse_rat(s)
        .map_err(|e| InterchangeError::Schema {
            path: path.display().to_string(),
            message: format!("{what}: {e}"),
        })
}

// ---------------------------------------------------------------------------
// Gaussian rationals.
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(untagged)]
enum CRatJson {
    Real(String),
    Complex { re: String, im: String },
}

fn crat_field(path: &Path, v: &CRatJson, what: &str) -> Result<CRat, InterchangeError> {
    match v {
        CRatJson::Real(s) => Ok(CRat::from_rat(rat_field(path, s, what)?)),
        CRatJson::Complex { re, im } => Ok(CRat::new(
            rat_field(path, re, &format!("{what} (re)"))?,
            rat_field(path, im, &format!("{what} (im)"))?,
        )),
    }
}

// ---------------------------------------------------------------------------
// DGA models.
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DgaJson {
    #[serde(default)]
    name: Option<String>,
    basis: Vec<DgaBasisJson>,
    unit: String,
    #[serde(default)]
    d: BTreeMap<String, Vec<TermJson>>,
    #[serde(default)]
    product: BTreeMap<String, Vec<TermJson>>,
    /// Optional: augmentation values per degree-zero label; must agree with
    /// the canonical augmentation of a connected model.
    #[serde(default)]
    augmentations: BTreeMap<String, String>,
    #[serde(default)]
    coefficients: Option<CoefficientsJson>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DgaBasisJson {
    label: String,
    degree: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    coeff: String,
    label: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientsJson {
    group: GroupJson,
    /// action[g][i] = T_g(basis element i) as a term list.
    action: Vec<Vec<Vec<TermJson>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupJson {
    #[serde(default)]
    name: Option<String>,
    elements: Vec<String>,
    table: Vec<Vec<usize>>,
}

fn term_list(
    path: &Path,
    terms: &[TermJson],
    index: &HashMap<&str, usize>,
    what: &str,
) -> Result<SparseVec, InterchangeError> {
    let mut out = SparseVec::new();
    for t in terms {
        let Some(&i) = index.get(t.label.as_str()) else {
            return schema_err(path, format!("{what}: unknown basis label {:?}", t.label));
        };
        let c = rat_field(path, &t.coeff, &format!("{what}: coefficient of {:?}", t.label))?;
        let entry = out.entry(i).or_insert_with(|| crate::rational::rat_i64(0));
        *entry += c;
        if num_traits::Zero::is_zero(entry) {
            out.remove(&i);
        }
    }
    Ok(out)
}

fn group_from_json(g: &GroupJson) -> Result<FiniteGroup, InterchangeError> {
    Ok(FiniteGroup::from_table(
        g.name.clone().unwrap_or_else(|| "group".into()),
        g.elements.clone(),
        g.table.clone(),
    )?)
}

/// Load a DGA model and, if a coefficient block is present, its validated
/// coefficient coalgebra.
pub fn load_dga(
    path: &Path,
) -> Result<(DgaModel, Option<CoefficientCoalgebra>), InterchangeError> {
    let raw: DgaJson = read_json(path)?;
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, b) in raw.basis.iter().enumerate() {
        if index.insert(b.label.as_str(), i).is_some() {
            return schema_err(path, format!("duplicate basis label {:?}", b.label));
        }
    }
    let Some(&unit) = index.get(raw.unit.as_str()) else {
        return schema_err(path, format!("unit label {:?} not in basis", raw.unit));
    };
    let basis: Vec<DgaBasisElem> = raw
        .basis
        .iter()
        .map(|b| DgaBasisElem { label: b.label.clone(), degree: b.degree })
        .collect();

    let mut d = vec![SparseVec::new(); basis.len()];
    for (label, terms) in &raw.d {
        let Some(&i) = index.get(label.as_str()) else {
            return schema_err(path, format!("d: unknown basis label {label:?}"));
        };
        d[i] = term_list(path, terms, &index, &format!("d({label})"))?;
    }

    let mut products: HashMap<(usize, usize), SparseVec> = HashMap::new();
    for (key, terms) in &raw.product {
        let Some((a, b)) = key.split_once('*') else {
            return schema_err(path, format!("product key {key:?} must look like \"a*b\""));
        };
        let (a, b) = (a.trim(), b.trim());
        let Some(&i) = index.get(a) else {
            return schema_err(path, format!("product {key:?}: unknown label {a:?}"));
        };
        let Some(&j) = index.get(b) else {
            return schema_err(path, format!("product {key:?}: unknown label {b:?}"));
        };
        if products.insert((i, j), term_list(path, terms, &index, &format!("product {key}"))?).is_some()
        {
            return schema_err(path, format!("product {key:?} specified twice"));
        }
    }

    let model = DgaModel::new(
        raw.name.unwrap_or_else(|| "model".into()),
        basis,
        unit,
        d,
        products,
    )?;

    // Optional augmentation block: connected models force ε(unit) = 1 and
    // ε = 0 in positive degree; reject anything else.
    for (label, value) in &raw.augmentations {
        let Some(&i) = index.get(label.as_str()) else {
            return schema_err(path, format!("augmentations: unknown label {label:?}"));
        };
        let v = rat_field(path, value, &format!("augmentation of {label:?}"))?;
        let expected = if i == model.unit {
            crate::rational::rat_i64(1)
        } else {
            crate::rational::rat_i64(0)
        };
        if v != expected {
            return schema_err(
                path,
                format!("augmentation of {label:?} must be {expected} for a connected model"),
            );
        }
    }

    let coalg = match raw.coefficients {
        None => None,
        Some(cj) => {
            let group = group_from_json(&cj.group)?;
            if cj.action.len() != group.order() {
                return schema_err(
                    path,
                    format!(
                        "coefficients.action has {} entries for a group of order {}",
                        cj.action.len(),
                        group.order()
                    ),
                );
            }
            let mut t = Vec::with_capacity(cj.action.len());
            for (g, rows) in cj.action.iter().enumerate() {
                if rows.len() != model.dim() {
                    return schema_err(
                        path,
                        format!(
                            "coefficients.action[{g}] has {} rows for a model of dimension {}",
                            rows.len(),
                            model.dim()
                        ),
                    );
                }
                let mut maps = Vec::with_capacity(rows.len());
                for (i, terms) in rows.iter().enumerate() {
                    maps.push(term_list(
                        path,
                        terms,
                        &index,
                        &format!("coefficients.action[{g}][{i}]"),
                    )?);
                }
                t.push(maps);
            }
            Some(CoefficientCoalgebra::new(&model, group, t)?)
        }
    };
    Ok((model, coalg))
}

/// Load a bare finite group (multiplication-table schema).
pub fn load_group(path: &Path) -> Result<FiniteGroup, InterchangeError> {
    let raw: GroupJson = read_json(path)?;
    group_from_json(&raw)
}

// ---------------------------------------------------------------------------
// Lie presentations.
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LieJson {
    generators: Vec<GeneratorJson>,
    #[serde(default)]
    relations: Vec<Vec<LieTermJson>>,
    truncation: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorJson {
    name: String,
    degree: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LieTermJson {
    coefficient: String,
    word: WordJson,
}

/// A bracket word: a generator name, or a nested two-element array.
#[derive(Deserialize)]
#[serde(untagged)]
enum WordJson {
    Gen(String),
    Br(Box<[WordJson; 2]>),
}

fn word_to_expr(w: &WordJson) -> BracketExpr {
    match w {
        WordJson::Gen(name) => BracketExpr::gen(name),
        WordJson::Br(pair) => BracketExpr::br(word_to_expr(&pair[0]), word_to_expr(&pair[1])),
    }
}

pub fn load_lie_presentation(path: &Path) -> Result<LiePresentation, InterchangeError> {
    let raw: LieJson = read_json(path)?;
    if raw.truncation == 0 {
        return schema_err(path, "truncation must be ≥ 1");
    }
    let generators: Vec<Generator> = raw
        .generators
        .iter()
        .map(|g| Generator::new(g.name.clone(), g.degree))
        .collect();
    let mut relations = Vec::with_capacity(raw.relations.len());
    for (k, rel) in raw.relations.iter().enumerate() {
        let mut terms = Vec::with_capacity(rel.len());
        for t in rel {
            let c = rat_field(path, &t.coefficient, &format!("relation {k}"))?;
            terms.push((c, word_to_expr(&t.word)));
        }
        relations.push(terms);
    }
    Ok(LiePresentation { generators, relations, truncation: raw.truncation })
}

// ---------------------------------------------------------------------------
// Paths.
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PathJson {
    dimension: usize,
    segments: Vec<SegmentJson>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
enum SegmentJson {
    #[serde(rename = "polynomial")]
    Polynomial {
        /// coeffs[k] = polynomial coefficients of coordinate k, constant
        /// first, each a [re, im] pair.
        coeffs: Vec<Vec<[f64; 2]>>,
    },
    #[serde(rename = "arc")]
    Arc {
        coordinate: usize,
        center: [f64; 2],
        radius: f64,
        theta0: f64,
        theta1: f64,
    },
}

/// Load a piecewise path. Arc segments carry no resting-coordinate data in
/// the schema; the loader infers it from the previous segment's endpoint,
/// which is why a multi-coordinate path may not begin with an arc.
pub fn load_path(path: &Path) -> Result<PiecewisePath, InterchangeError> {
    let raw: PathJson = read_json(path)?;
    let dim = raw.dimension;
    if dim == 0 {
        return schema_err(path, "dimension must be ≥ 1");
    }
    let mut segments = Vec::with_capacity(raw.segments.len());
    let mut current: Option<Vec<Complex64>> = None;
    for (k, seg) in raw.segments.iter().enumerate() {
        let built = match seg {
            SegmentJson::Polynomial { coeffs } => {
                if coeffs.len() != dim {
                    return schema_err(
                        path,
                        format!(
                            "segment {k}: {} coordinate polynomials for dimension {dim}",
                            coeffs.len()
                        ),
                    );
                }
                let coeffs: Vec<Vec<Complex64>> = coeffs
                    .iter()
                    .map(|poly| poly.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
                    .collect();
                PathSegment::Polynomial { coeffs }
            }
            SegmentJson::Arc { coordinate, center, radius, theta0, theta1 } => {
                if *coordinate >= dim {
                    return schema_err(
                        path,
                        format!("segment {k}: arc coordinate {coordinate} out of range"),
                    );
                }
                let rest = match &current {
                    Some(prev) => prev.clone(),
                    None if dim == 1 => vec![Complex64::new(0.0, 0.0)],
                    None => {
                        return schema_err(
                            path,
                            format!(
                                "segment {k}: a multi-coordinate path may not begin with an arc \
                                 (resting coordinates are inferred from the previous segment)"
                            ),
                        )
                    }
                };
                PathSegment::Arc {
                    coordinate: *coordinate,
                    center: Complex64::new(center[0], center[1]),
                    radius: *radius,
                    theta0: *theta0,
                    theta1: *theta1,
                    rest,
                }
            }
        };
        current = Some(built.end());
        segments.push(built);
    }
    Ok(PiecewisePath::new(segments)?)
}

// ---------------------------------------------------------------------------
// Lie-valued one-forms.
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FormFileJson {
    terms: Vec<FormTermJson>,
}

// No deny_unknown_fields here: serde cannot combine it with flatten.
#[derive(Deserialize)]
struct FormTermJson {
    #[serde(flatten)]
    letter: LetterJson,
    /// Lie coefficient as a term list over basis labels of the target Lie
    /// algebra (generator names in weight one, bracket labels above).
    coefficient: Vec<TermJson>,
}

#[derive(Deserialize)]
#[serde(tag = "kind")]
enum LetterJson {
    #[serde(rename = "dlog")]
    DLog { affine: AffineJson },
    #[serde(rename = "poly")]
    Poly { coordinate: usize, coefficients: Vec<CRatJson> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AffineJson {
    constant: CRatJson,
    gradient: Vec<CRatJson>,
}

/// Load a Lie-valued one-form whose coefficients live in `lie`; validation
/// of letter dimensions against a path happens at transport time.
pub fn load_form(
    path: &Path,
    lie: &GradedLie,
) -> Result<crate::transport::LieValuedOneForm, InterchangeError> {
    let raw: FormFileJson = read_json(path)?;
    let mut labels: HashMap<&str, usize> = HashMap::new();
    for (i, l) in lie.labels.iter().enumerate() {
        labels.insert(l.as_str(), i);
    }
    let mut terms = Vec::with_capacity(raw.terms.len());
    for (k, t) in raw.terms.iter().enumerate() {
        let letter = match &t.letter {
            LetterJson::DLog { affine } => {
                let constant = crat_field(path, &affine.constant, &format!("term {k} constant"))?;
                let gradient = affine
                    .gradient
                    .iter()
                    .enumerate()
                    .map(|(j, c)| crat_field(path, c, &format!("term {k} gradient[{j}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                ScalarOneForm::DLog { constant, gradient }
            }
            LetterJson::Poly { coordinate, coefficients } => {
                let coefficients = coefficients
                    .iter()
                    .enumerate()
                    .map(|(j, c)| crat_field(path, c, &format!("term {k} coefficient[{j}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                ScalarOneForm::Poly { coordinate: *coordinate, coefficients }
            }
        };
        let mut x = SparseVec::new();
        for entry in &t.coefficient {
            let Some(&i) = labels.get(entry.label.as_str()) else {
                return schema_err(
                    path,
                    format!("term {k}: unknown Lie basis label {:?}", entry.label),
                );
            };
            let c = rat_field(path, &entry.coeff, &format!("term {k}: coefficient"))?;
            let slot = x.entry(i).or_insert_with(|| crate::rational::rat_i64(0));
            *slot += c;
            if num_traits::Zero::is_zero(slot) {
                x.remove(&i);
            }
        }
        terms.push((letter, x));
    }
    Ok(crate::transport::LieValuedOneForm { terms })
}

// ---------------------------------------------------------------------------
// Writers.
// ---------------------------------------------------------------------------

fn term_list_json(v: &SparseVec, labels: &[String]) -> serde_json::Value {
    serde_json::Value::Array(
        v.iter()
            .map(|(&i, c)| {
                serde_json::json!({"coeff": c.to_string(), "label": labels[i]})
            })
            .collect(),
    )
}

/// Emit a model (and optional coefficient block) in the input schema, so that
/// loading the result reproduces the model: load ∘ emit is the identity up to
/// the forced completions the loader performs anyway.
pub fn dga_to_json(model: &DgaModel, coalg: Option<&CoefficientCoalgebra>) -> serde_json::Value {
    let labels: Vec<String> = model.basis.iter().map(|b| b.label.clone()).collect();
    let basis: Vec<serde_json::Value> = model
        .basis
        .iter()
        .map(|b| serde_json::json!({"label": b.label, "degree": b.degree}))
        .collect();
    let mut d = serde_json::Map::new();
    for (i, v) in model.d.iter().enumerate() {
        if !v.is_empty() {
            d.insert(labels[i].clone(), term_list_json(v, &labels));
        }
    }
    // One representative per unordered pair, skipping the forced unit rows;
    // completion restores the rest on load.
    let mut product = serde_json::Map::new();
    let ordered: BTreeMap<(usize, usize), &SparseVec> = model
        .product
        .iter()
        .filter(|(&(i, j), _)| i <= j && i != model.unit && j != model.unit)
        .map(|(&k, v)| (k, v))
        .collect();
    for ((i, j), v) in ordered {
        product.insert(format!("{}*{}", labels[i], labels[j]), term_list_json(v, &labels));
    }
    let mut out = serde_json::json!({
        "name": model.name,
        "basis": basis,
        "unit": labels[model.unit],
        "d": d,
        "product": product,
    });
    if let Some(c) = coalg {
        let action: Vec<serde_json::Value> = c
            .t
            .iter()
            .map(|rows| {
                serde_json::Value::Array(
                    rows.iter().map(|v| term_list_json(v, &labels)).collect(),
                )
            })
            .collect();
        out["coefficients"] = serde_json::json!({
            "group": {
                "name": c.group.name,
                "elements": c.group.elements,
                "table": c.group.mult,
            },
            "action": action,
        });
    }
    out
}
