//! File formats: channel, scheme and `p(u, x)` inputs, region files, and
//! canonical JSON output.
//!
//! Probabilities may be JSON numbers, decimal strings (`"0.125"`,
//! `"1e-3"`) or rational strings (`"1/3"`). They are read exactly, each
//! distribution is checked to sum to one within [`MASS_TOLERANCE`], then
//! renormalized exactly before conversion to floats.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::polytope::{LinearInequality, LinearSystem, RateRegion};
use crate::probability::{Alphabet, AuxScheme, Channel, JointPmf, MASS_TOLERANCE};

/// Significant digits of every float written by the toolkit.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// `v` rounded to [`SIGNIFICANT_DIGITS`], with `-0` mapped to `0`.
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return if v == 0.0 { 0.0 } else { v };
    }
    let r: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v).parse().unwrap_or(v);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Shortest text that reads back as `round_sig(v)`.
pub fn fmt_float(v: f64) -> String {
    format!("{}", round_sig(v))
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_sig).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with floats rounded; field order follows the serializer.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value).map_err(|e| Error::Internal(format!("serialization failed: {e}")))?;
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Internal(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Parses one probability entry exactly.
pub fn parse_rational(v: &Value) -> Result<BigRational> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.trim().to_string(),
        other => return Err(Error::malformed(format!("expected a probability, found {other}"))),
    };
    parse_rational_str(&text)
}

pub fn parse_rational_str(text: &str) -> Result<BigRational> {
    if let Some((num, den)) = text.split_once('/') {
        let n = parse_decimal(num.trim())?;
        let d = parse_decimal(den.trim())?;
        if d.is_zero() {
            return Err(Error::malformed(format!("zero denominator in {text:?}")));
        }
        return Ok(n / d);
    }
    parse_decimal(text)
}

fn parse_decimal(text: &str) -> Result<BigRational> {
    let bad = || Error::malformed(format!("cannot read {text:?} as a number"));
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (text, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse::<BigInt>().map_err(|_| bad())? / 10;
    let scale = exp - frac_part.len() as i32;
    if scale.abs() > 400 {
        return Err(bad());
    }
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(digits);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -r } else { r })
}

fn rational_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn flatten(v: &Value, out: &mut Vec<Value>) {
    match v {
        Value::Array(a) => a.iter().for_each(|x| flatten(x, out)),
        other => out.push(other.clone()),
    }
}

/// Exact masses of one distribution, checked and renormalized.
pub fn read_distribution(v: &Value, len: usize, what: &str) -> Result<Vec<f64>> {
    let mut flat = Vec::new();
    flatten(v, &mut flat);
    if flat.len() != len {
        return Err(Error::malformed(format!("{what} has {} entries, expected {len}", flat.len())));
    }
    let exact: Vec<BigRational> = flat.iter().map(parse_rational).collect::<Result<_>>()?;
    if let Some(i) = exact.iter().position(|p| p.is_negative()) {
        return Err(Error::malformed(format!("{what} entry {i} is negative")));
    }
    let total: BigRational = exact.iter().fold(BigRational::zero(), |a, b| a + b);
    let total_f = total.to_f64().unwrap_or(f64::NAN);
    if !((total_f - 1.0).abs() <= MASS_TOLERANCE) {
        return Err(Error::malformed(format!("{what} sums to {total_f}, not 1")));
    }
    if total.is_one() {
        return Ok(exact.iter().map(|p| p.to_f64().unwrap_or(f64::NAN)).collect());
    }
    Ok(exact.iter().map(|p| (p / &total).to_f64().unwrap_or(f64::NAN)).collect())
}

fn field<'a>(obj: &'a Value, key: &str, what: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::malformed(format!("{what} is missing \"{key}\"")))
}

fn size_field(obj: &Value, key: &str, what: &str) -> Result<usize> {
    field(obj, key, what)?
        .as_u64()
        .filter(|&n| n > 0)
        .map(|n| n as usize)
        .ok_or_else(|| Error::malformed(format!("{what} field \"{key}\" must be a positive integer")))
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::malformed(format!("invalid JSON: {e}")))
}

/// `{"x_size", "y1_size", "y2_size", "kernel"}` with one row-major
/// `y1 x y2` array (flat or nested) per input letter.
pub fn channel_from_json(text: &str) -> Result<Channel> {
    let v = parse_json(text)?;
    let nx = size_field(&v, "x_size", "channel")?;
    let m1 = size_field(&v, "y1_size", "channel")?;
    let m2 = size_field(&v, "y2_size", "channel")?;
    let kernel = field(&v, "kernel", "channel")?
        .as_array()
        .ok_or_else(|| Error::malformed("channel kernel must be an array"))?;
    if kernel.len() != nx {
        return Err(Error::malformed(format!("channel kernel has {} rows, expected {nx}", kernel.len())));
    }
    let rows = kernel
        .iter()
        .enumerate()
        .map(|(x, row)| read_distribution(row, m1 * m2, &format!("kernel row {x}")))
        .collect::<Result<Vec<_>>>()?;
    Channel::from_rows(nx, m1, m2, rows)
}

pub fn channel_to_json(ch: &Channel) -> Result<String> {
    let kernel: Vec<Vec<f64>> = ch.rows().iter().map(|r| r.mass().to_vec()).collect();
    let v = serde_json::json!({
        "x_size": ch.x_size(),
        "y1_size": ch.y1_size(),
        "y2_size": ch.y2_size(),
        "kernel": kernel,
    });
    to_canonical_json(&v)
}

/// `{"u_sizes": [a, b, c], "joint": [...], "gamma": [...]}`.
pub fn scheme_from_json(text: &str, x_size: usize) -> Result<AuxScheme> {
    let v = parse_json(text)?;
    let sizes = field(&v, "u_sizes", "scheme")?
        .as_array()
        .filter(|a| a.len() == 3)
        .ok_or_else(|| Error::malformed("scheme \"u_sizes\" must have three entries"))?;
    let sizes: Vec<usize> = sizes
        .iter()
        .map(|s| s.as_u64().filter(|&n| n > 0).map(|n| n as usize))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::malformed("scheme sizes must be positive integers"))?;
    let cells: usize = sizes.iter().product();
    let mass = read_distribution(field(&v, "joint", "scheme")?, cells, "scheme joint")?;
    let mut gamma = Vec::new();
    flatten(field(&v, "gamma", "scheme")?, &mut gamma);
    let gamma: Vec<usize> = gamma
        .iter()
        .map(|g| g.as_u64().map(|n| n as usize))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::malformed("scheme gamma entries must be nonnegative integers"))?;
    if gamma.len() != cells {
        return Err(Error::malformed(format!("scheme gamma has {} entries, expected {cells}", gamma.len())));
    }
    if let Some(g) = gamma.iter().find(|&&g| g >= x_size) {
        return Err(Error::AlphabetMismatch(format!("gamma maps to input {g}, but the channel has {x_size} inputs")));
    }
    let axes = ["U0", "U1", "U2"].iter().zip(&sizes).map(|(n, &s)| Alphabet::indexed(*n, s)).collect();
    AuxScheme::new(JointPmf::new(axes, mass)?, gamma, x_size)
}

#[derive(Serialize)]
struct SchemeDump<'a> {
    u_sizes: [usize; 3],
    joint: &'a [f64],
    gamma: &'a [usize],
}

pub fn scheme_to_value(s: &AuxScheme) -> Result<Value> {
    let dump = SchemeDump { u_sizes: s.u_sizes(), joint: s.aux_joint().mass(), gamma: s.gamma() };
    serde_json::to_value(dump).map_err(|e| Error::Internal(e.to_string()))
}

/// `{"u_size": k, "joint": [...]}` with `joint` row-major over `(u, x)`.
pub fn ux_from_json(text: &str, x_size: usize) -> Result<JointPmf> {
    let v = parse_json(text)?;
    let nu = size_field(&v, "u_size", "p(u,x) file")?;
    if let Some(nx) = v.get("x_size") {
        if nx.as_u64() != Some(x_size as u64) {
            return Err(Error::AlphabetMismatch(format!("p(u,x) file has x_size {nx}, channel has {x_size}")));
        }
    }
    let mass = read_distribution(field(&v, "joint", "p(u,x) file")?, nu * x_size, "p(u,x)")?;
    JointPmf::new(vec![Alphabet::indexed("U", nu), Alphabet::indexed("X", x_size)], mass)
}

pub fn ux_to_value(j: &JointPmf) -> Value {
    let shape = j.shape();
    serde_json::json!({ "u_size": shape[0], "x_size": shape[1], "joint": j.mass() })
}

/// `{"variables", "inequalities": [{"coeffs": {name: "p/q"}, "rhs"}]}`
/// plus `"provenance"` when known. Zero coefficients are omitted.
pub fn system_to_value(sys: &LinearSystem, provenance: Option<&str>) -> Value {
    let ineqs: Vec<Value> = sys
        .inequalities()
        .iter()
        .map(|ineq| {
            let mut coeffs = Map::new();
            for (name, c) in sys.variables().iter().zip(&ineq.coeffs) {
                if !c.is_zero() {
                    coeffs.insert(name.clone(), Value::String(rational_string(c)));
                }
            }
            serde_json::json!({ "coeffs": coeffs, "rhs": ineq.rhs })
        })
        .collect();
    let mut out = Map::new();
    out.insert("variables".into(), serde_json::json!(sys.variables()));
    out.insert("inequalities".into(), Value::Array(ineqs));
    if let Some(p) = provenance {
        out.insert("provenance".into(), Value::String(p.into()));
    }
    Value::Object(out)
}

pub fn region_to_value(r: &RateRegion) -> Value {
    system_to_value(r.system(), r.provenance())
}

pub fn system_from_value(v: &Value) -> Result<(LinearSystem, Option<String>)> {
    let vars: Vec<String> = field(v, "variables", "region")?
        .as_array()
        .and_then(|a| a.iter().map(|s| s.as_str().map(String::from)).collect::<Option<Vec<_>>>())
        .ok_or_else(|| Error::malformed("region \"variables\" must be an array of names"))?;
    let mut sys = LinearSystem::new(vars.clone());
    let ineqs = field(v, "inequalities", "region")?
        .as_array()
        .ok_or_else(|| Error::malformed("\"inequalities\" must be an array"))?;
    for (k, ineq) in ineqs.iter().enumerate() {
        let coeffs = field(ineq, "coeffs", "inequality")?
            .as_object()
            .ok_or_else(|| Error::malformed(format!("inequality {k} coeffs must be an object")))?;
        let rhs = parse_rational(field(ineq, "rhs", "inequality")?)?.to_f64().unwrap_or(f64::NAN);
        if !rhs.is_finite() {
            return Err(Error::malformed(format!("inequality {k} has a non-finite rhs")));
        }
        let mut row = vec![BigRational::zero(); vars.len()];
        for (name, c) in coeffs {
            let i = vars
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::malformed(format!("inequality {k} uses undeclared variable {name}")))?;
            row[i] = parse_rational(c)?;
        }
        sys.push(LinearInequality { coeffs: row, rhs })?;
    }
    let provenance = v.get("provenance").and_then(|p| p.as_str()).map(String::from);
    Ok((sys, provenance))
}

pub fn region_from_json(text: &str) -> Result<RateRegion> {
    let (sys, provenance) = system_from_value(&parse_json(text)?)?;
    let r = RateRegion::new(sys)?;
    Ok(match provenance {
        Some(p) => r.with_provenance(p),
        None => r,
    })
}

/// Reads a file, mapping I/O failures to [`Error::Malformed`].
pub fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::malformed(format!("cannot read {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_and_decimals() {
        let r = |s: &str| parse_rational_str(s).unwrap();
        assert_eq!(r("1/3"), BigRational::new(1.into(), 3.into()));
        assert_eq!(r("0.125"), BigRational::new(1.into(), 8.into()));
        assert_eq!(r("1e-3"), BigRational::new(1.into(), 1000.into()));
        assert_eq!(r("2.5E1"), BigRational::from_integer(25.into()));
        assert_eq!(r(".5"), BigRational::new(1.into(), 2.into()));
        for bad in ["", "abc", "1/0", "1..2", "--1", "."] {
            assert!(parse_rational_str(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn rounding_is_twelve_digits() {
        assert_eq!(fmt_float(0.918295834054489), "0.918295834054");
        assert_eq!(fmt_float(-0.0), "0");
        assert_eq!(fmt_float(2.0), "2");
        assert_eq!(fmt_float(1e-13 - 1e-13), "0");
    }

    #[test]
    fn channel_round_trip_with_nested_rows() {
        let text = r#"{"x_size":2,"y1_size":2,"y2_size":1,"kernel":[[["1"],["0"]],[["1/4"],[0.75]]]}"#;
        let ch = channel_from_json(text).unwrap();
        assert_eq!(*ch.prob(1, 0, 0), 0.25);
        let back = channel_from_json(&channel_to_json(&ch).unwrap()).unwrap();
        assert_eq!(back, ch);
    }

    #[test]
    fn bad_rows_are_malformed() {
        let text = r#"{"x_size":1,"y1_size":2,"y2_size":1,"kernel":[["0.5","0.6"]]}"#;
        assert!(matches!(channel_from_json(text), Err(Error::Malformed(_))));
        let text = r#"{"x_size":1,"y1_size":2,"y2_size":1,"kernel":[["1.5","-0.5"]]}"#;
        assert!(matches!(channel_from_json(text), Err(Error::Malformed(_))));
        assert!(matches!(channel_from_json("{"), Err(Error::Malformed(_))));
    }

    #[test]
    fn near_unit_rows_are_renormalized() {
        let text = r#"{"x_size":1,"y1_size":2,"y2_size":1,"kernel":[["0.3333333333","0.6666666667"]]}"#;
        let ch = channel_from_json(text).unwrap();
        assert_eq!(ch.prob(0, 0, 0) + ch.prob(0, 1, 0), 1.0);
    }

    #[test]
    fn gamma_out_of_range_is_a_mismatch() {
        let text = r#"{"u_sizes":[2,1,1],"joint":["1/2","1/2"],"gamma":[0,2]}"#;
        assert!(matches!(scheme_from_json(text, 2), Err(Error::AlphabetMismatch(_))));
        let s = scheme_from_json(r#"{"u_sizes":[2,1,1],"joint":["1/2","1/2"],"gamma":[0,1]}"#, 2).unwrap();
        let back = scheme_from_json(&to_canonical_json(&scheme_to_value(&s).unwrap()).unwrap(), 2).unwrap();
        assert_eq!(back.gamma(), s.gamma());
    }

    #[test]
    fn region_json_round_trip() {
        let mut sys = LinearSystem::new(crate::polytope::RATE_VARS);
        sys.add_le(&[("R1", 2), ("R2", 1)], 1.5).unwrap();
        sys.add_le(&[("R3", 1)], 0.25).unwrap();
        let r = RateRegion::new(sys).unwrap().with_provenance("test");
        let text = to_canonical_json(&region_to_value(&r)).unwrap();
        assert!(text.contains("\"R1\": \"2\""));
        let back = region_from_json(&text).unwrap();
        assert_eq!(back.provenance(), Some("test"));
        assert_eq!(back.system(), r.system());
    }
}
