//! Value parsers for angles and complex pairs.

/// Radians, either a plain number or a multiple of pi: `0.5`, `pi`, `-pi/2`,
/// `3pi/4`, `0.25*pi`.
pub fn angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let value = match t.find("pi") {
        None => number(&t)?,
        Some(at) => {
            let coeff = t[..at].trim_end_matches('*');
            let coeff = match coeff {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => number(c)?,
            };
            let rest = &t[at + 2..];
            let denom = match rest.strip_prefix('/') {
                Some(d) => number(d)?,
                None if rest.is_empty() => 1.0,
                None => return Err(format!("cannot parse angle {s:?}")),
            };
            if denom == 0.0 {
                return Err(format!("zero denominator in angle {s:?}"));
            }
            coeff * std::f64::consts::PI / denom
        }
    };
    finite(value, s)
}

/// A complex number written `re,im`.
pub fn complex_pair(s: &str) -> Result<(f64, f64), String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected re,im but got {s:?}"))?;
    Ok((
        finite(number(re.trim())?, s)?,
        finite(number(im.trim())?, s)?,
    ))
}

pub fn finite_f64(s: &str) -> Result<f64, String> {
    finite(number(s.trim())?, s)
}

fn number(s: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .map_err(|_| format!("cannot parse number {s:?}"))
}

fn finite(x: f64, src: &str) -> Result<f64, String> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("value {src:?} is not finite"))
    }
}
