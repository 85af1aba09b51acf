//! JSON documents for distributions, piecewise functions and reducer queries.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::distributions::{standardizer_by_name, Distribution};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::reducers::ReducerQuery;
use crate::tail_functions::{Direction, Form, KnotRule, PiecewiseFunction, QuantileDifference};

fn default_standardizer() -> String {
    "normal".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DistributionDoc {
    Discrete {
        atoms: Vec<(f64, f64)>,
    },
    Empirical {
        values: Vec<f64>,
    },
    Uniform01,
    Uniform {
        lower: f64,
        upper: f64,
    },
    #[serde(rename = "ls")]
    LocationScale {
        mu: f64,
        sigma: f64,
        #[serde(default = "default_standardizer")]
        standardizer: String,
    },
    #[serde(rename = "exp_ls")]
    ExpLocationScale {
        mu: f64,
        sigma: f64,
        #[serde(default = "default_standardizer")]
        standardizer: String,
    },
}

fn standardizer(name: &str) -> Result<std::sync::Arc<dyn crate::distributions::Standardizer>> {
    standardizer_by_name(name).ok_or_else(|| Error::Parse(format!("unknown standardizer {name:?}")))
}

impl DistributionDoc {
    pub fn build(&self) -> Result<Distribution> {
        match self {
            DistributionDoc::Discrete { atoms } => Distribution::discrete(atoms),
            DistributionDoc::Empirical { values } => Distribution::empirical(values),
            DistributionDoc::Uniform01 => Ok(Distribution::uniform01()),
            DistributionDoc::Uniform { lower, upper } => Distribution::uniform(*lower, *upper),
            DistributionDoc::LocationScale {
                mu,
                sigma,
                standardizer: s,
            } => Distribution::location_scale(*mu, *sigma, standardizer(s)?),
            DistributionDoc::ExpLocationScale {
                mu,
                sigma,
                standardizer: s,
            } => Distribution::exp_location_scale(*mu, *sigma, standardizer(s)?),
        }
    }
}

impl From<&Distribution> for DistributionDoc {
    fn from(d: &Distribution) -> Self {
        match d {
            Distribution::Discrete(d) => DistributionDoc::Discrete {
                atoms: d.atoms().collect(),
            },
            Distribution::Uniform { lower, upper } if *lower == 0.0 && *upper == 1.0 => {
                DistributionDoc::Uniform01
            }
            Distribution::Uniform { lower, upper } => DistributionDoc::Uniform {
                lower: *lower,
                upper: *upper,
            },
            Distribution::LocationScale { mu, sigma, w } => DistributionDoc::LocationScale {
                mu: *mu,
                sigma: *sigma,
                standardizer: w.name().to_string(),
            },
            Distribution::ExpLocationScale { mu, sigma, w } => DistributionDoc::ExpLocationScale {
                mu: *mu,
                sigma: *sigma,
                standardizer: w.name().to_string(),
            },
        }
    }
}

pub fn parse_distribution(json: &str) -> Result<Distribution> {
    let doc: DistributionDoc =
        serde_json::from_str(json).map_err(|e| Error::Parse(format!("distribution: {e}")))?;
    doc.build()
}

/// An extended real written as a number or as `"inf"`, `"+inf"`, `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtNumber(pub ExtReal);

impl Serialize for ExtNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExtNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(ExtNumber(ExtReal::Finite(x))),
            Raw::Text(t) => match t.trim() {
                "inf" | "+inf" | "infinity" | "+infinity" => Ok(ExtNumber(ExtReal::PosInf)),
                "-inf" | "-infinity" => Ok(ExtNumber(ExtReal::NegInf)),
                other => other
                    .parse::<f64>()
                    .map(|x| ExtNumber(ExtReal::Finite(x)))
                    .map_err(|_| serde::de::Error::custom(format!("not a number: {other:?}"))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Closure {
    Open,
    Closed,
    ClosedOpen,
    OpenClosed,
}

impl Closure {
    fn left_closed(self) -> bool {
        matches!(self, Closure::Closed | Closure::ClosedOpen)
    }

    fn right_closed(self) -> bool {
        matches!(self, Closure::Closed | Closure::OpenClosed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FormDoc {
    Affine {
        a: f64,
        b: f64,
    },
    ExpAffine {
        a: f64,
        b: f64,
        c: f64,
    },
    Constant {
        v: f64,
    },
    QuantileDifference {
        mu1: f64,
        sigma1: f64,
        mu2: f64,
        sigma2: f64,
        #[serde(default = "default_standardizer")]
        standardizer: String,
        #[serde(default)]
        negate_value: bool,
        #[serde(default)]
        negate_arg: bool,
    },
}

impl FormDoc {
    pub fn build(&self) -> Result<Form> {
        Ok(match self {
            FormDoc::Affine { a, b } => Form::affine(*a, *b),
            FormDoc::ExpAffine { a, b, c } => Form::exp_affine(*a, *b, *c),
            FormDoc::Constant { v } => Form::constant(*v),
            FormDoc::QuantileDifference {
                mu1,
                sigma1,
                mu2,
                sigma2,
                standardizer: s,
                negate_value,
                negate_arg,
            } => {
                let mut q = QuantileDifference::new(*mu1, *sigma1, *mu2, *sigma2, standardizer(s)?);
                q.negate_value = *negate_value;
                q.negate_arg = *negate_arg;
                Form::QuantileDifference(q)
            }
        })
    }
}

impl From<&Form> for FormDoc {
    fn from(f: &Form) -> Self {
        match f {
            Form::Affine { a, b } => FormDoc::Affine { a: *a, b: *b },
            Form::ExpAffine { a, b, c } => FormDoc::ExpAffine {
                a: *a,
                b: *b,
                c: *c,
            },
            Form::Constant { v } => FormDoc::Constant { v: *v },
            Form::QuantileDifference(q) => FormDoc::QuantileDifference {
                mu1: q.mu1,
                sigma1: q.sigma1,
                mu2: q.mu2,
                sigma2: q.sigma2,
                standardizer: q.w.name().to_string(),
                negate_value: q.negate_value,
                negate_arg: q.negate_arg,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentDoc {
    pub interval: (ExtNumber, ExtNumber, Closure),
    pub form: FormDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<String>,
}

/// A piecewise function. A closed segment end gives the knot the segment's
/// limit there; `breakpoint_values` overrides it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionDoc {
    pub domain: (ExtNumber, ExtNumber),
    pub segments: Vec<SegmentDoc>,
    #[serde(default)]
    pub breakpoint_values: BTreeMap<String, f64>,
}

impl FunctionDoc {
    pub fn build(&self) -> Result<PiecewiseFunction> {
        if self.segments.is_empty() {
            return Err(Error::InvalidFunction("no segments".into()));
        }
        let mut segs = self.segments.clone();
        segs.sort_by(|a, b| {
            a.interval
                .0
                 .0
                .partial_cmp(&b.interval.0 .0)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let (lo, hi) = (self.domain.0 .0, self.domain.1 .0);
        if segs[0].interval.0 .0 != lo || segs.last().unwrap().interval.1 .0 != hi {
            return Err(Error::InvalidFunction(format!(
                "segments do not span the domain [{lo}, {hi}]"
            )));
        }
        for w in segs.windows(2) {
            if w[0].interval.1 .0 != w[1].interval.0 .0 {
                return Err(Error::InvalidFunction(format!(
                    "segments leave a gap or overlap between {} and {}",
                    w[0].interval.1 .0, w[1].interval.0 .0
                )));
            }
        }
        let mut given = Vec::with_capacity(self.breakpoint_values.len());
        for (k, v) in &self.breakpoint_values {
            let x: f64 = k
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("breakpoint key {k:?} is not a number")))?;
            given.push((x, *v));
        }
        let value_at = |x: ExtReal| {
            given
                .iter()
                .find(|(g, _)| ExtReal::Finite(*g) == x)
                .map(|(_, v)| *v)
        };
        for (g, _) in &given {
            let k = ExtReal::Finite(*g);
            if !(k == lo || k == hi || segs.iter().any(|s| s.interval.1 .0 == k)) {
                return Err(Error::InvalidFunction(format!(
                    "breakpoint {g} is not a segment end"
                )));
            }
        }

        let start_closed = value_at(lo).is_some() || segs[0].interval.2.left_closed();
        let mut b = PiecewiseFunction::builder(lo, start_closed);
        if let Some(v) = value_at(lo) {
            b = b.at_knot(KnotRule::Value(v));
        }
        let n = segs.len();
        for (i, s) in segs.iter().enumerate() {
            let form = s.form.build()?;
            let end = s.interval.1 .0;
            b = match &s.direction {
                Some(d) => {
                    let d = Direction::parse(d)
                        .ok_or_else(|| Error::Parse(format!("unknown direction {d:?}")))?;
                    b.piece_with(form, d, end)
                }
                None => b.piece(form, end),
            };
            let left_closed = s.interval.2.right_closed();
            let right_closed = i + 1 < n && segs[i + 1].interval.2.left_closed();
            let rule = match value_at(end) {
                Some(v) => KnotRule::Value(v),
                None if left_closed && right_closed => KnotRule::Continuous,
                None if left_closed => KnotRule::FromLeft,
                None if right_closed => KnotRule::FromRight,
                None if i + 1 == n => KnotRule::Excluded,
                None => {
                    return Err(Error::InvalidFunction(format!(
                        "no value at breakpoint {end}: close a segment there or give a breakpoint value"
                    )))
                }
            };
            b = b.at_knot(rule);
        }
        let end_closed = value_at(hi).is_some() || segs[n - 1].interval.2.right_closed();
        b.build(end_closed)
    }
}

impl From<&PiecewiseFunction> for FunctionDoc {
    fn from(f: &PiecewiseFunction) -> Self {
        let knots = f.knots();
        let segments = f
            .pieces()
            .iter()
            .enumerate()
            .map(|(i, p)| SegmentDoc {
                interval: (ExtNumber(knots[i]), ExtNumber(knots[i + 1]), Closure::Open),
                form: FormDoc::from(&p.form),
                direction: Some(p.direction.as_str().to_string()),
            })
            .collect();
        let breakpoint_values = knots
            .iter()
            .zip(f.knot_values())
            .filter_map(|(k, v)| Some((format!("{}", k.finite()?), (*v)?)))
            .collect();
        FunctionDoc {
            domain: (ExtNumber(f.inf_domain()), ExtNumber(f.sup_domain())),
            segments,
            breakpoint_values,
        }
    }
}

pub fn parse_function(json: &str) -> Result<PiecewiseFunction> {
    let doc: FunctionDoc =
        serde_json::from_str(json).map_err(|e| Error::Parse(format!("function: {e}")))?;
    doc.build()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducerQueryDoc {
    pub liability: DistributionDoc,
    pub hedger: DistributionDoc,
    pub price: f64,
    pub p: f64,
}

impl ReducerQueryDoc {
    pub fn build(&self) -> Result<ReducerQuery> {
        ReducerQuery::new(
            self.liability.build()?,
            self.hedger.build()?,
            self.price,
            self.p,
        )
    }
}

impl From<&ReducerQuery> for ReducerQueryDoc {
    fn from(q: &ReducerQuery) -> Self {
        ReducerQueryDoc {
            liability: DistributionDoc::from(&q.liability),
            hedger: DistributionDoc::from(&q.hedger),
            price: q.price,
            p: q.p,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::QuantileSide;
    use crate::oracle::corpus::{gen_piecewise, RandomCorpusConfig};
    use crate::tail_functions::{classify_tail, TailKind};

    #[test]
    fn distributions_from_json() {
        let d = parse_distribution(r#"{"type":"discrete","atoms":[[1,0.25],[3,0.75]]}"#).unwrap();
        assert_eq!(
            d.quantile(0.5, QuantileSide::Left).unwrap(),
            ExtReal::Finite(3.0)
        );
        let d =
            parse_distribution(r#"{"type":"exp_ls","mu":0,"sigma":0.3,"standardizer":"normal"}"#)
                .unwrap();
        assert_eq!(d, Distribution::lognormal(0.0, 0.3).unwrap());
        assert_eq!(
            parse_distribution(r#"{"type":"uniform01"}"#).unwrap(),
            Distribution::uniform01()
        );
        assert!(matches!(
            parse_distribution(r#"{"type":"exp_ls","mu":0,"sigma":0.3,"standardizer":"vg"}"#),
            Err(Error::Parse(_))
        ));
        let e = parse_distribution(r#"{"type":"empirical","values":[2,1,2]}"#).unwrap();
        let back = serde_json::to_string(&DistributionDoc::from(&e)).unwrap();
        assert_eq!(parse_distribution(&back).unwrap(), e);
    }

    #[test]
    fn straddle_from_json() {
        let f = parse_function(
            r#"{"domain":[0,"inf"],"segments":[
                {"interval":[0,10,"closed_open"],"form":{"kind":"affine","a":-1,"b":10},"direction":"nonincreasing"},
                {"interval":[10,"inf","closed_open"],"form":{"kind":"affine","a":1,"b":-10},"direction":"nondecreasing"}]}"#,
        )
        .unwrap();
        let c = classify_tail(&f);
        assert_eq!(
            (c.kind, c.threshold),
            (TailKind::NonDecreasingUpper, ExtReal::Finite(20.0))
        );
        assert_eq!(c.boundary_value, Some(ExtReal::Finite(10.0)));
    }

    #[test]
    fn breakpoint_values_override() {
        let f = parse_function(
            r#"{"domain":[0,2],"segments":[
                {"interval":[0,1,"closed_open"],"form":{"kind":"constant","v":0}},
                {"interval":[1,2,"open"],"form":{"kind":"constant","v":1}}],
                "breakpoint_values":{"1":5}}"#,
        )
        .unwrap();
        assert_eq!(f.eval(1.0), Some(5.0));
        assert_eq!(f.eval(2.0), None);
        assert!(parse_function(
            r#"{"domain":[0,2],"segments":[
                {"interval":[0,1,"open"],"form":{"kind":"constant","v":0}},
                {"interval":[1,2,"open"],"form":{"kind":"constant","v":1}}]}"#
        )
        .is_err());
    }

    #[test]
    fn functions_round_trip() {
        let cfg = RandomCorpusConfig {
            count: 60,
            ..Default::default()
        };
        for f in gen_piecewise(&cfg) {
            let json = serde_json::to_string(&FunctionDoc::from(&f)).unwrap();
            assert_eq!(parse_function(&json).unwrap(), f, "{json}");
        }
    }

    #[test]
    fn reducer_query_json() {
        let q: ReducerQueryDoc = serde_json::from_str(
            r#"{"liability":{"type":"exp_ls","mu":0,"sigma":0.3},"hedger":{"type":"exp_ls","mu":0,"sigma":0.2},"price":1.0,"p":0.95}"#,
        )
        .unwrap();
        let q = q.build().unwrap();
        assert_eq!(q.price, 1.0);
        assert_eq!(ReducerQueryDoc::from(&q).build().unwrap(), q);
    }
}
