//! C99-style hexadecimal floats (`0x1.8p+1`), exact in both directions.

pub fn format(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sign = if x.is_sign_negative() { "-" } else { "" };
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if exp == 0 && frac == 0 {
        return format!("{}0x0p+0", sign);
    }
    let (lead, e) = if exp == 0 { (0, -1022) } else { (1, exp - 1023) };
    let mut digits = format!("{:013x}", frac);
    while digits.ends_with('0') {
        digits.pop();
    }
    if digits.is_empty() {
        format!("{}0x{}p{:+}", sign, lead, e)
    } else {
        format!("{}0x{}.{}p{:+}", sign, lead, digits, e)
    }
}

fn scale2(mut x: f64, mut e: i64) -> f64 {
    while e > 0 {
        let k = e.min(1000);
        x *= f64::from_bits(((1023 + k) as u64) << 52);
        e -= k;
    }
    while e < 0 {
        let k = (-e).min(1000);
        x *= f64::from_bits(((1023 - k) as u64) << 52);
        e += k;
    }
    x
}

pub fn parse(s: &str) -> Option<f64> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let value = match body {
        "inf" => f64::INFINITY,
        "nan" => f64::NAN,
        _ => {
            let body = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X"))?;
            let (mant, exp) = body.split_once(['p', 'P'])?;
            let exp: i64 = exp.parse().ok()?;
            let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
            if int.is_empty() && frac.is_empty() || int.len() + frac.len() > 15 {
                return None;
            }
            let digits = format!("{}{}", int, frac);
            let m = u64::from_str_radix(&digits, 16).ok()?;
            if m >> 53 != 0 {
                return None;
            }
            scale2(m as f64, exp - 4 * frac.len() as i64)
        }
    };
    Some(if neg { -value } else { value })
}
