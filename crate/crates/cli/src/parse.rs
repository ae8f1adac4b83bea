use anyhow::{anyhow, bail, Context, Result};
use corrlift::{Signal, C64};

/// Parses `a`, `bi`, `a+bi` or `a-bi` (also `i`, `-i`, `a+i`).
pub fn parse_complex(s: &str) -> Result<C64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        bail!("empty complex literal");
    }
    let real = |p: &str| {
        p.parse::<f64>()
            .with_context(|| format!("bad number `{p}` in `{s}`"))
    };
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return Ok(C64::new(real(&t)?, 0.0));
    };
    // last sign that is not the leading one and not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (real(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => real(v)?,
    };
    Ok(C64::new(re, im))
}

/// `re+imi` with both parts in shortest round-trip form.
pub fn format_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:?}{}{:?}i", z.re, sign, z.im.abs())
}

/// Comma-separated complex literals.
pub fn parse_signal(s: &str) -> Result<Signal> {
    let coeffs = s
        .split(',')
        .map(parse_complex)
        .collect::<Result<Vec<_>>>()?;
    Signal::new(coeffs).map_err(|e| anyhow!("invalid signal `{s}`: {e}"))
}

pub fn format_signal(x: &Signal) -> String {
    x.coeffs()
        .iter()
        .map(|z| format_complex(*z))
        .collect::<Vec<_>>()
        .join(",")
}

/// Comma-separated dB values; `inf` selects the noiseless setting.
pub fn parse_snr_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| {
            let v = v.trim();
            let x: f64 = v.parse().with_context(|| format!("bad rSNR value `{v}`"))?;
            if x.is_nan() || x == f64::NEG_INFINITY {
                bail!("rSNR value `{v}` out of range");
            }
            Ok(x)
        })
        .collect()
}
