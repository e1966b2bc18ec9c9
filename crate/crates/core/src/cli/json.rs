//! JSON encodings of the library's values. Integers are JSON numbers when they
//! fit in `i64` and decimal strings otherwise; rationals are `[num, den]`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::adele::{AdelicMatrix, LevelMatrix, RatMatrix};
use crate::error::{Error, Result};
use crate::galois::GaloisShadow;
use crate::qforms::{QuadForm, QuadPoint, UnimodularMap};
use crate::shimura::{LevelPoint, PointEqWitness};

pub fn int(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

pub fn parse_int(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from))
            .ok_or_else(|| Error::invalid(format!("not an integer: {n}"))),
        Value::String(s) => s.parse().map_err(|_| Error::invalid(format!("not an integer: {s:?}"))),
        _ => Err(Error::invalid(format!("expected integer, got {v}"))),
    }
}

pub fn parse_u64(v: &Value) -> Result<u64> {
    parse_int(v)?.to_u64().ok_or_else(|| Error::invalid(format!("expected nonnegative 64-bit integer, got {v}")))
}

pub fn parse_i64(v: &Value) -> Result<i64> {
    parse_int(v)?.to_i64().ok_or_else(|| Error::invalid(format!("integer out of range: {v}")))
}

pub fn rational(x: &BigRational) -> Value {
    json!([int(x.numer()), int(x.denom())])
}

pub fn parse_rational(v: &Value) -> Result<BigRational> {
    match v {
        Value::Array(a) if a.len() == 2 => {
            let d = parse_int(&a[1])?;
            if d.is_zero() {
                return Err(Error::invalid("zero denominator"));
            }
            Ok(BigRational::new(parse_int(&a[0])?, d))
        }
        Value::Number(_) | Value::String(_) => Ok(BigRational::from_integer(parse_int(v)?)),
        _ => Err(Error::invalid(format!("expected [num, den], got {v}"))),
    }
}

fn array4<'a>(v: &'a Value, what: &str) -> Result<&'a [Value]> {
    match v.as_array() {
        Some(a) if a.len() == 4 => Ok(a),
        _ => Err(Error::invalid(format!("{what}: expected an array of 4 entries"))),
    }
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::invalid(format!("missing field {key:?}")))
}

pub fn rat_matrix(m: &RatMatrix) -> Value {
    Value::Array(m.entries().iter().map(rational).collect())
}

pub fn parse_rat_matrix(v: &Value) -> Result<RatMatrix> {
    let a = array4(v, "rational matrix")?;
    Ok(RatMatrix::new([
        parse_rational(&a[0])?,
        parse_rational(&a[1])?,
        parse_rational(&a[2])?,
        parse_rational(&a[3])?,
    ]))
}

pub fn unimodular(g: &UnimodularMap) -> Value {
    Value::Array(g.entries().iter().map(int).collect())
}

pub fn parse_unimodular(v: &Value) -> Result<UnimodularMap> {
    let a = array4(v, "unimodular matrix")?;
    UnimodularMap::new(parse_int(&a[0])?, parse_int(&a[1])?, parse_int(&a[2])?, parse_int(&a[3])?)
}

/// Entries in `[0, N)`.
pub fn level_matrix(g: &LevelMatrix) -> Value {
    json!(g.entries())
}

pub fn parse_level_matrix(v: &Value, n: u64) -> Result<LevelMatrix> {
    let a = array4(v, "matrix mod N")?;
    LevelMatrix::new([parse_i64(&a[0])?, parse_i64(&a[1])?, parse_i64(&a[2])?, parse_i64(&a[3])?], n)
}

pub fn quad_point(t: &QuadPoint) -> Value {
    json!({"m": t.m(), "p": rational(t.p()), "q": rational(t.q())})
}

pub fn parse_quad_point(v: &Value) -> Result<QuadPoint> {
    QuadPoint::new(parse_u64(field(v, "m")?)?, parse_rational(field(v, "p")?)?, parse_rational(field(v, "q")?)?)
}

pub fn quad_form(f: &QuadForm) -> Value {
    let (a, b, c) = f.coeffs();
    json!([int(a), int(b), int(c)])
}

pub fn adelic(a: &AdelicMatrix) -> Value {
    json!({"r": rat_matrix(a.r()), "delta": a.delta(), "s": unimodular(a.s()), "level": a.level()})
}

pub fn parse_adelic(v: &Value) -> Result<AdelicMatrix> {
    AdelicMatrix::new(
        parse_rat_matrix(field(v, "r")?)?,
        parse_u64(field(v, "delta")?)?,
        parse_unimodular(field(v, "s")?)?,
        parse_u64(field(v, "level")?)?,
    )
}

pub fn point(p: &LevelPoint) -> Value {
    json!({"tau": quad_point(p.tau()), "a": adelic(p.a()), "level": p.level()})
}

/// A point is `{"tau", "a", "level"}` or the shorthand `{"tau", "u", "level"}`
/// with an optional rational part `"r"`.
pub fn parse_point(v: &Value) -> Result<LevelPoint> {
    let tau = parse_quad_point(field(v, "tau")?)?;
    let n = parse_u64(field(v, "level")?)?;
    if n == 0 {
        return Err(Error::invalid("level must be positive"));
    }
    if let Some(a) = v.get("a") {
        let a = parse_adelic(a)?;
        if a.level() != n {
            return Err(Error::invalid("adelic matrix level differs from point level"));
        }
        return LevelPoint::new(tau, a);
    }
    let u = match v.get("u") {
        Some(u) => parse_level_matrix(u, n)?,
        None => LevelMatrix::identity(n),
    };
    let r = match v.get("r") {
        Some(r) => parse_rat_matrix(r)?,
        None => RatMatrix::identity(),
    };
    if let Some(p) = r.obstruction_at(n) {
        return Err(Error::PrecisionObstruction(p));
    }
    LevelPoint::new(tau, AdelicMatrix::with_unit(r, &u))
}

pub fn witness(w: &PointEqWitness) -> Value {
    json!({"q": rat_matrix(&w.q), "m": rat_matrix(&w.m), "automorph": unimodular(&w.automorph)})
}

pub fn shadow(s: &GaloisShadow) -> Value {
    json!({
        "level": s.level(),
        "support": s.support(),
        "branch": s.branch(),
        "det": s.det(),
        "components": s.components().iter().map(level_matrix).collect::<Vec<_>>(),
    })
}

pub fn parse_shadow(v: &Value) -> Result<GaloisShadow> {
    let n = parse_u64(field(v, "level")?)?;
    let support = field(v, "support")?
        .as_array()
        .ok_or_else(|| Error::invalid("support must be an array"))?
        .iter()
        .map(parse_u64)
        .collect::<Result<Vec<_>>>()?;
    let branch = match parse_i64(field(v, "branch")?)? {
        1 => 1,
        -1 => -1,
        b => return Err(Error::invalid(format!("branch must be ±1, got {b}"))),
    };
    let comps = field(v, "components")?
        .as_array()
        .ok_or_else(|| Error::invalid("components must be an array"))?
        .iter()
        .map(|c| parse_level_matrix(c, n))
        .collect::<Result<Vec<_>>>()?;
    GaloisShadow::new(n, support, comps, branch)
}
