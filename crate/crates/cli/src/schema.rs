//! JSON schemas: hypergroup spec files, measures, symbolic functions,
//! polynomials, and the report types. Exact rationals travel as `"p/q"`
//! strings (plain integers allowed), floats as JSON numbers; a complex
//! scalar is `{"re": …, "im": …}`.

use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use polyhg::functions::Term;
use polyhg::hypergroup::{Recurrence1D, RecurrenceCoeffs};
use polyhg::multiindex::MultiIndex;
use polyhg::{HFunction, Hypergroup, Measure, MultiPoly, Rational, Scalar};

use crate::CliError;

pub fn parse_rational(s: &str) -> Result<Rational, CliError> {
    Rational::from_str(s.trim()).map_err(|e| CliError::Usage(format!("bad rational {s:?}: {e}")))
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// One real number: `"p/q"` (exact) or a JSON number (float).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumJson {
    Exact(String),
    Float(f64),
}

/// A scalar: a real [`NumJson`] or a `{re, im}` pair.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Real(NumJson),
    Complex { re: NumJson, im: NumJson },
}

impl ScalarJson {
    pub fn to_scalar(&self) -> Result<Scalar, CliError> {
        match self {
            ScalarJson::Real(NumJson::Exact(s)) => Ok(Scalar::from_rational(parse_rational(s)?)),
            ScalarJson::Real(NumJson::Float(x)) => Ok(Scalar::from_f64(*x)),
            ScalarJson::Complex { re, im } => match (re, im) {
                (NumJson::Exact(re), NumJson::Exact(im)) => {
                    Ok(Scalar::from_parts(parse_rational(re)?, parse_rational(im)?))
                }
                _ => Ok(Scalar::from_f64_parts(num_value(re)?, num_value(im)?)),
            },
        }
    }

    pub fn from_scalar(s: &Scalar) -> ScalarJson {
        match s {
            Scalar::Exact(z) => {
                if let Some(re) = s.as_real_rational() {
                    ScalarJson::Real(NumJson::Exact(format_rational(re)))
                } else {
                    ScalarJson::Complex {
                        re: NumJson::Exact(format_rational(&z.re)),
                        im: NumJson::Exact(format_rational(&z.im)),
                    }
                }
            }
            Scalar::Float(z) => {
                if z.im == 0.0 {
                    ScalarJson::Real(NumJson::Float(z.re))
                } else {
                    ScalarJson::Complex {
                        re: NumJson::Float(z.re),
                        im: NumJson::Float(z.im),
                    }
                }
            }
        }
    }
}

fn num_value(n: &NumJson) -> Result<f64, CliError> {
    match n {
        NumJson::Float(x) => Ok(*x),
        NumJson::Exact(s) => Ok(Scalar::from_rational(parse_rational(s)?).to_complex64().re),
    }
}

/// Parses a comma-separated scalar list from the command line; each token
/// is exact when it parses as `p/q` or an integer, float otherwise.
pub fn parse_point(s: &str) -> Result<Vec<Scalar>, CliError> {
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            if let Ok(r) = Rational::from_str(tok) {
                Ok(Scalar::from_rational(r))
            } else {
                tok.parse::<f64>()
                    .map(Scalar::from_f64)
                    .map_err(|_| CliError::Usage(format!("bad scalar {tok:?}")))
            }
        })
        .collect()
}

pub fn parse_element(s: &str, dim: usize) -> Result<MultiIndex, CliError> {
    let entries: Vec<u32> = s
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u32>()
                .map_err(|_| CliError::Usage(format!("bad natural number {tok:?}")))
        })
        .collect::<Result<_, _>>()?;
    if entries.len() != dim {
        return Err(CliError::Usage(format!(
            "element {s:?} has {} coordinates, hypergroup dimension is {dim}",
            entries.len()
        )));
    }
    Ok(MultiIndex::new(entries))
}

/// Hypergroup spec file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum HypergroupSpec {
    Chebyshev {
        dim: usize,
    },
    Recurrence1d {
        a: Vec<String>,
        b: Vec<String>,
        c: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail: Option<TailSpec>,
    },
    Product {
        factors: Vec<HypergroupSpec>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TailSpec {
    pub a: String,
    pub b: String,
    pub c: String,
    pub from: usize,
}

impl HypergroupSpec {
    pub fn build(&self, certify_up_to: usize) -> Result<Arc<Hypergroup>, CliError> {
        match self {
            HypergroupSpec::Chebyshev { dim } => {
                if *dim == 0 {
                    return Err(CliError::Usage("dimension must be at least 1".into()));
                }
                Ok(Hypergroup::chebyshev_certified(*dim, certify_up_to))
            }
            HypergroupSpec::Recurrence1d { a, b, c, tail } => {
                if a.len() != b.len() || a.len() != c.len() {
                    return Err(CliError::Usage(
                        "recurrence arrays a, b, c must have equal length".into(),
                    ));
                }
                let prefix_len = match tail {
                    Some(t) => {
                        if t.from > a.len() {
                            return Err(CliError::Usage(format!(
                                "tail starts at {} but only {} explicit coefficients given",
                                t.from,
                                a.len()
                            )));
                        }
                        t.from
                    }
                    None => a.len(),
                };
                let mut prefix = Vec::with_capacity(prefix_len);
                for i in 0..prefix_len {
                    prefix.push(RecurrenceCoeffs::new(
                        parse_rational(&a[i])?,
                        parse_rational(&b[i])?,
                        parse_rational(&c[i])?,
                    ));
                }
                let tail = tail
                    .as_ref()
                    .map(|t| {
                        Ok::<_, CliError>(RecurrenceCoeffs::new(
                            parse_rational(&t.a)?,
                            parse_rational(&t.b)?,
                            parse_rational(&t.c)?,
                        ))
                    })
                    .transpose()?;
                let rec = Recurrence1D::new(prefix, tail).map_err(CliError::from_parse)?;
                Hypergroup::from_recurrence(rec, certify_up_to).map_err(CliError::from_core)
            }
            HypergroupSpec::Product { factors } => {
                if factors.is_empty() {
                    return Err(CliError::Usage("product needs at least one factor".into()));
                }
                let mut built = factors
                    .iter()
                    .map(|f| f.build(certify_up_to))
                    .collect::<Result<Vec<_>, _>>()?;
                let mut acc = built.remove(0);
                for next in built {
                    acc = Hypergroup::product(&acc, &next);
                }
                Ok(acc)
            }
        }
    }
}

/// Measure file: a list of weighted points.
pub type MeasureJson = Vec<MeasureEntry>;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureEntry {
    pub point: Vec<u32>,
    pub re: NumJson,
    pub im: NumJson,
}

pub fn measure_from_json(json: &MeasureJson, hg: &Arc<Hypergroup>) -> Result<Measure, CliError> {
    let mut weights = Vec::with_capacity(json.len());
    for entry in json {
        if entry.point.len() != hg.dim() {
            return Err(CliError::Usage(format!(
                "measure point {:?} does not match dimension {}",
                entry.point,
                hg.dim()
            )));
        }
        let w = ScalarJson::Complex {
            re: entry.re.clone(),
            im: entry.im.clone(),
        }
        .to_scalar()?;
        weights.push((MultiIndex::new(entry.point.clone()), w));
    }
    Ok(Measure::from_weights(hg.clone(), weights))
}

pub fn measure_to_json(m: &Measure) -> MeasureJson {
    m.weights()
        .map(|(x, w)| {
            let (re, im) = match ScalarJson::from_scalar(w) {
                ScalarJson::Real(re) => (
                    re,
                    match w {
                        Scalar::Exact(_) => NumJson::Exact("0".into()),
                        Scalar::Float(_) => NumJson::Float(0.0),
                    },
                ),
                ScalarJson::Complex { re, im } => (re, im),
            };
            MeasureEntry {
                point: x.entries().to_vec(),
                re,
                im,
            }
        })
        .collect()
}

/// Symbolic function file: a list of `(coeff, alpha, lambda)` terms.
pub type HFunctionJson = Vec<TermJson>;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: ScalarJson,
    pub alpha: Vec<u32>,
    pub lambda: Vec<ScalarJson>,
}

pub fn hfunction_from_json(
    json: &HFunctionJson,
    hg: &Arc<Hypergroup>,
) -> Result<HFunction, CliError> {
    let dim = hg.dim();
    let mut terms = Vec::with_capacity(json.len());
    for t in json {
        if t.alpha.len() != dim || t.lambda.len() != dim {
            return Err(CliError::Usage(format!(
                "term with alpha {:?} does not match dimension {dim}",
                t.alpha
            )));
        }
        terms.push(Term {
            coeff: t.coeff.to_scalar()?,
            order: MultiIndex::new(t.alpha.clone()),
            point: t
                .lambda
                .iter()
                .map(ScalarJson::to_scalar)
                .collect::<Result<_, _>>()?,
        });
    }
    Ok(HFunction::from_terms(hg.clone(), terms))
}

pub fn hfunction_to_json(f: &HFunction) -> HFunctionJson {
    f.terms()
        .iter()
        .map(|t| TermJson {
            coeff: ScalarJson::from_scalar(&t.coeff),
            alpha: t.order.entries().to_vec(),
            lambda: t.point.iter().map(ScalarJson::from_scalar).collect(),
        })
        .collect()
}

/// Polynomial file, used by `fourier --invert` and `synth --pdo`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyJson {
    pub dim: usize,
    pub terms: Vec<PolyTermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyTermJson {
    pub alpha: Vec<u32>,
    pub coeff: ScalarJson,
}

pub fn poly_from_json(json: &PolyJson) -> Result<MultiPoly, CliError> {
    let mut p = MultiPoly::zero(json.dim);
    for t in &json.terms {
        if t.alpha.len() != json.dim {
            return Err(CliError::Usage(format!(
                "polynomial term {:?} does not match dim {}",
                t.alpha, json.dim
            )));
        }
        p.add_term(MultiIndex::new(t.alpha.clone()), t.coeff.to_scalar()?);
    }
    Ok(p)
}

pub fn poly_to_json(p: &MultiPoly) -> PolyJson {
    PolyJson {
        dim: p.dim(),
        terms: p
            .terms()
            .map(|(alpha, c)| PolyTermJson {
                alpha: alpha.entries().to_vec(),
                coeff: ScalarJson::from_scalar(c),
            })
            .collect(),
    }
}
