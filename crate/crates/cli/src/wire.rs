//! JSON encodings. Exact numbers travel as strings (`"4/9"`); inputs accept
//! either strings or JSON numbers, and numbers are read from their decimal
//! text so `0.1` means exactly one tenth.

use barydecomp_core::bounds::{Func1D, PiecewisePoly};
use barydecomp_core::caratheodory::ReductionND;
use barydecomp_core::convexity::TabulatedFunction;
use barydecomp_core::error::Error;
use barydecomp_core::interval::IntervalE;
use barydecomp_core::pointmass1d::{Decomposition1D, System1D};
use barydecomp_core::rational::{from_f64, parse_rational, to_f64, Ext, Rational};
use serde_json::{json, Value};

/// Failure while handling a request.
#[derive(Debug)]
pub enum CliError {
    /// Input does not match the verb's schema (exit 1).
    Schema(String),
    /// The operation rejected well-formed input (exit 2).
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn schema<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Schema(msg.into()))
}

pub fn field<'a>(v: &'a Value, key: &str) -> CliResult<&'a Value> {
    match v.get(key) {
        Some(x) if !x.is_null() => Ok(x),
        _ => schema(format!("missing field `{key}`")),
    }
}

pub fn opt_field<'a>(v: &'a Value, key: &str) -> Option<&'a Value> {
    v.get(key).filter(|x| !x.is_null())
}

pub fn array<'a>(v: &'a Value, what: &str) -> CliResult<&'a Vec<Value>> {
    v.as_array()
        .map_or_else(|| schema(format!("`{what}` must be an array")), Ok)
}

fn number_text(v: &Value, what: &str) -> CliResult<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => schema(format!("`{what}` must be a number or a numeric string")),
    }
}

pub fn rational(v: &Value, what: &str) -> CliResult<Rational> {
    let text = number_text(v, what)?;
    parse_rational(&text).map_err(|_| CliError::Schema(format!("`{what}`: cannot parse `{text}`")))
}

pub fn real(v: &Value, what: &str) -> CliResult<f64> {
    if let Value::Number(n) = v {
        if let Some(x) = n.as_f64() {
            return Ok(x);
        }
    }
    Ok(to_f64(&rational(v, what)?))
}

pub fn rationals(v: &Value, what: &str) -> CliResult<Vec<Rational>> {
    array(v, what)?.iter().map(|x| rational(x, what)).collect()
}

pub fn uint(v: &Value, what: &str) -> CliResult<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .map_or_else(|| schema(format!("`{what}` must be a non-negative integer")), Ok)
}

pub fn boolean(v: Option<&Value>, what: &str, default: bool) -> CliResult<bool> {
    match v {
        None => Ok(default),
        Some(Value::Bool(b)) => Ok(*b),
        Some(_) => schema(format!("`{what}` must be a boolean")),
    }
}

pub fn rat_json(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn rats_json<'a>(rs: impl IntoIterator<Item = &'a Rational>) -> Value {
    Value::Array(rs.into_iter().map(rat_json).collect())
}

/// Floats that are not finite are emitted as strings (`"inf"`, `"NaN"`).
pub fn real_json(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(x.to_string()), Value::Number)
}

fn ext(v: &Value, what: &str) -> CliResult<Ext> {
    let text = number_text(v, what)?;
    text.parse::<Ext>()
        .map_err(|_| CliError::Schema(format!("`{what}`: cannot parse `{text}`")))
}

pub fn interval(v: &Value) -> CliResult<IntervalE> {
    if v.get("empty").and_then(Value::as_bool) == Some(true) {
        return Ok(IntervalE::empty());
    }
    let lo = ext(field(v, "lo")?, "lo")?;
    let hi = ext(field(v, "hi")?, "hi")?;
    let lo_closed = boolean(opt_field(v, "lo_closed"), "lo_closed", lo.is_finite())?;
    let hi_closed = boolean(opt_field(v, "hi_closed"), "hi_closed", hi.is_finite())?;
    Ok(IntervalE::new(lo, hi, lo_closed, hi_closed)?)
}

pub fn intervals(v: &Value, what: &str) -> CliResult<Vec<IntervalE>> {
    array(v, what)?.iter().map(interval).collect()
}

pub fn interval_json(i: &IntervalE) -> Value {
    match i.bounds() {
        None => json!({ "empty": true }),
        Some(b) => json!({
            "lo": b.lo().to_string(),
            "hi": b.hi().to_string(),
            "lo_closed": b.lo_closed(),
            "hi_closed": b.hi_closed(),
        }),
    }
}

pub fn system(v: &Value, what: &str) -> CliResult<System1D> {
    let points = array(v, what)?
        .iter()
        .map(|p| Ok((rational(field(p, "pos")?, "pos")?, rational(field(p, "mass")?, "mass")?)))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(System1D::new(points)?)
}

pub fn decomposition_json(d: &Decomposition1D) -> Value {
    let components: Vec<Value> = d
        .components
        .iter()
        .map(|c| {
            json!({
                "w": rat_json(&c.weight),
                "left": [rat_json(&c.left_pos), rat_json(&c.left_frac)],
                "right": [rat_json(&c.right_pos), rat_json(&c.right_frac)],
            })
        })
        .collect();
    json!({
        "barycenter": rat_json(&d.barycenter),
        "fixed_mass_at_c": rat_json(&d.fixed_mass_at_c),
        "total_mass": rat_json(&d.source_total_mass),
        "components": components,
    })
}

pub fn reduction_json<T>(r: &ReductionND<T>, emit: impl Fn(&T) -> Value) -> Value {
    Value::Array(
        r.components
            .iter()
            .map(|c| {
                json!({
                    "varpi": emit(&c.varpi),
                    "weights": c.weights.iter().map(&emit).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

pub fn poly(v: &Value) -> CliResult<PiecewisePoly> {
    let breaks = rationals(field(v, "breaks")?, "breaks")?;
    let pieces = array(field(v, "pieces")?, "pieces")?
        .iter()
        .map(|p| rationals(p, "pieces"))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(PiecewisePoly::new(breaks, pieces)?)
}

/// Derivative coefficients of each piece.
fn derivative_pieces(p: &PiecewisePoly) -> Vec<Vec<f64>> {
    p.pieces()
        .iter()
        .map(|c| {
            c.iter()
                .enumerate()
                .skip(1)
                .map(|(j, a)| j as f64 * to_f64(a))
                .collect()
        })
        .collect()
}

/// A piecewise polynomial as a [`Func1D`]; NaN outside its support.
pub fn poly_func(p: PiecewisePoly) -> Func1D {
    let breaks: Vec<f64> = p.breaks().iter().map(to_f64).collect();
    let deriv = derivative_pieces(&p);
    let (pe, px) = (p.clone(), p);
    Func1D::new("poly", move |x| pe.eval_f64(x).unwrap_or(f64::NAN), false)
        .with_deriv(move |x| {
            let k = breaks.partition_point(|t| *t <= x).clamp(1, deriv.len());
            deriv[k - 1].iter().rev().fold(0.0, |acc, c| acc * x + c)
        })
        .with_exact(move |x| px.eval(x))
}

/// A registry name or `{"breaks", "pieces"}` literal. `convex` sets the
/// convexity claim for polynomial literals (registry entries carry their own).
pub fn func(v: &Value) -> CliResult<Func1D> {
    match v {
        Value::String(name) => Ok(Func1D::named(name)?),
        Value::Object(_) => {
            let mut f = poly_func(poly(v)?);
            f.convexity_claim = boolean(opt_field(v, "convex"), "convex", false)?;
            Ok(f)
        }
        _ => schema("function must be a registry name or a piecewise polynomial"),
    }
}

/// `f(x)` as a rational: the exact evaluator when `exact` and available,
/// otherwise the float value converted exactly.
pub fn func_value(f: &Func1D, x: &Rational, exact: bool) -> Option<Rational> {
    if exact {
        if let Some(v) = f.eval_exact(x) {
            return Some(v);
        }
    }
    from_f64(f.eval(to_f64(x))).ok()
}

/// `{"domain", "values"}`, or `{"domain", "function"}` to tabulate a registry
/// function.
pub fn tabulated(v: &Value, exact: bool) -> CliResult<TabulatedFunction> {
    let domain = rationals(field(v, "domain")?, "domain")?;
    if let Some(fv) = opt_field(v, "function") {
        let f = func(fv)?;
        let values = domain
            .iter()
            .map(|x| {
                func_value(&f, x, exact)
                    .ok_or_else(|| CliError::Domain(Error::MissingValue(x.to_string())))
            })
            .collect::<CliResult<Vec<_>>>()?;
        return Ok(TabulatedFunction::new(domain, values)?);
    }
    let values = rationals(field(v, "values")?, "values")?;
    Ok(TabulatedFunction::new(domain, values)?)
}

pub fn checks_json(checks: &[(String, bool)]) -> Value {
    Value::Array(
        checks
            .iter()
            .map(|(name, pass)| json!({ "name": name, "pass": pass }))
            .collect(),
    )
}

