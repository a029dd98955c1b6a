/// Formats `x` with 12 significant digits, in fixed notation when the
/// magnitude is between `1e-4` and `1e15` and in scientific notation otherwise.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.00000000000".to_string();
    }
    // Rounding to 12 digits can carry into the next decade, so the exponent is
    // read back from the rounded scientific form.
    let sci = format!("{x:.11e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-4..15).contains(&exp) {
        format!("{:.*}", (11 - exp) as usize, x)
    } else {
        sci
    }
}

/// Parses a decimal number; only finite values are accepted.
pub fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a decimal number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}
