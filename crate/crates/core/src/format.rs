//! Display formatting shared by the profilers and the label writer.

use serde::Serialize;
use serde_json::{Number, Value};

/// `100·part/whole` with `decimals` fractional digits and a trailing `%`,
/// rounded half away from zero in exact integer arithmetic. An empty whole
/// renders as zero.
pub fn percent(part: u64, whole: u64, decimals: u32) -> String {
    let scale = 10u128.pow(decimals);
    let scaled = if whole == 0 {
        0
    } else {
        let num = part as u128 * 100 * scale;
        let den = whole as u128;
        (2 * num + den) / (2 * den)
    };
    if decimals == 0 {
        return format!("{scaled}%");
    }
    format!(
        "{}.{:0width$}%",
        scaled / scale,
        scaled % scale,
        width = decimals as usize
    )
}

/// Rounds to six fractional digits, the precision labels carry on disk.
pub fn round6(x: f64) -> f64 {
    format!("{x:.6}").parse().unwrap_or(x)
}

/// Rounds a probability vector to multiples of 1e-6 that still sum to one,
/// distributing the leftover micro-units by largest remainder (ties to the
/// lower index).
pub fn round_simplex(p: &[f64]) -> Vec<f64> {
    const UNITS: f64 = 1e6;
    let scaled: Vec<f64> = p.iter().map(|x| x * UNITS).collect();
    let mut floors: Vec<i64> = scaled.iter().map(|x| x.floor() as i64).collect();
    let deficit = UNITS as i64 - floors.iter().sum::<i64>();
    if deficit > 0 {
        let mut order: Vec<usize> = (0..p.len()).collect();
        order.sort_by(|&a, &b| {
            let ra = scaled[a] - scaled[a].floor();
            let rb = scaled[b] - scaled[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &i in order.iter().cycle().take(deficit as usize) {
            floors[i] += 1;
        }
    }
    floors.into_iter().map(|u| u as f64 / UNITS).collect()
}

fn canonical_number(n: &Number) -> Number {
    if n.is_i64() || n.is_u64() {
        return n.clone();
    }
    let x = round6(n.as_f64().unwrap_or(0.0));
    if x.fract() == 0.0 && x.abs() < 9.0e15 {
        Number::from(x as i64)
    } else {
        Number::from_f64(x).unwrap_or_else(|| Number::from(0))
    }
}

fn canonicalize(value: &mut Value) {
    match value {
        Value::Number(n) => *n = canonical_number(n),
        Value::Array(items) => items.iter_mut().for_each(canonicalize),
        Value::Object(map) => map.values_mut().for_each(canonicalize),
        _ => {}
    }
}

/// Canonical JSON text: keys in declaration order, two-space indent, LF
/// line endings, a trailing newline, and numbers rounded to at most six
/// fractional digits with integral values written without a fraction.
pub fn to_canonical_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut v = serde_json::to_value(value)?;
    canonicalize(&mut v);
    let mut out = serde_json::to_string_pretty(&v)?;
    out.push('\n');
    Ok(out)
}
