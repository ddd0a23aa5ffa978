//! Grid flags: comma lists and `start:stop:step` ranges.

use num_complex::Complex64;

/// Expands "a,b,c" and "start:stop:step" items (mixable, comma-separated).
pub fn reals(spec: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim) {
        if item.contains(':') {
            let parts: Vec<&str> = item.split(':').collect();
            if parts.len() != 3 {
                return Err(format!("range '{item}' must be start:stop:step"));
            }
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("'{s}' in '{item}' is not a number"));
            let (a, b, h) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            if h.is_nan() || h <= 0.0 || b < a {
                return Err(format!("range '{item}' needs step > 0 and stop >= start"));
            }
            // Index-based so that 0.3:0.7:0.2 yields exactly three points.
            let count = ((b - a) / h + 1e-9).floor() as usize;
            out.extend((0..=count).map(|i| a + i as f64 * h));
        } else {
            out.push(item.parse::<f64>().map_err(|_| format!("'{item}' is not a number"))?);
        }
    }
    if out.is_empty() {
        return Err("empty grid".into());
    }
    Ok(out)
}

pub fn sizes(spec: &str) -> Result<Vec<usize>, String> {
    reals(spec)?
        .into_iter()
        .map(|v| if v >= 1.0 && v.fract() == 0.0 { Ok(v as usize) } else { Err(format!("N must be a positive integer, got {v}")) })
        .collect()
}

/// Non-negative integers, e.g. correction orders.
pub fn orders(spec: &str) -> Result<Vec<usize>, String> {
    reals(spec)?
        .into_iter()
        .map(|v| if v >= 0.0 && v.fract() == 0.0 { Ok(v as usize) } else { Err(format!("expected a non-negative integer, got {v}")) })
        .collect()
}

/// Parses "1", "-0.5", "2i", "1+0.5i", "1-2i", "1e-3+1e-2i".
pub fn complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("'{s}' is not a complex number");
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not an exponent sign or the leading sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |v: &str| match v {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => v.parse::<f64>().map_err(|_| bad()),
    };
    match split {
        Some(k) => Ok(Complex64::new(body[..k].parse::<f64>().map_err(|_| bad())?, imag(&body[k..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

/// Complex list; purely real entries may also use range syntax.
pub fn complexes(spec: &str) -> Result<Vec<Complex64>, String> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim) {
        if item.contains(':') {
            out.extend(reals(item)?.into_iter().map(|v| Complex64::new(v, 0.0)));
        } else {
            out.push(complex(item)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(sizes("8,16,32").unwrap(), vec![8, 16, 32]);
        let xs = reals("0.3:0.7:0.2").unwrap();
        assert_eq!(xs.len(), 3);
        assert!((xs[2] - 0.7).abs() < 1e-15);
        assert_eq!(sizes("4:8:2,12").unwrap(), vec![4, 6, 8, 12]);
        assert_eq!(orders("0:2:1").unwrap(), vec![0, 1, 2]);
        assert!(sizes("0").is_err() && sizes("2.5").is_err() && reals("1:0:1").is_err() && reals("a").is_err());
    }

    #[test]
    fn complex_forms() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(complex("2").unwrap(), c(2.0, 0.0));
        assert_eq!(complex("1+0.5i").unwrap(), c(1.0, 0.5));
        assert_eq!(complex("1-2i").unwrap(), c(1.0, -2.0));
        assert_eq!(complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(complex("0.5i").unwrap(), c(0.0, 0.5));
        assert_eq!(complex("1e-3+1e-2i").unwrap(), c(1e-3, 1e-2));
        assert_eq!(complex("-1e-3-2e+1i").unwrap(), c(-1e-3, -20.0));
        assert!(complex("1+").is_err() && complex("x").is_err());
        assert_eq!(complexes("1,2+i,0:1:0.5").unwrap().len(), 5);
    }
}
