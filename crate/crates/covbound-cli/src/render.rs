use clap::ValueEnum;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// 9 significant digits for table mode; JSON and CSV keep full round-trip
/// precision through the default f64 formatting.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..=12).contains(&exp) {
        format!("{x:.8e}")
    } else {
        let decimals = (8 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_sig9(0.0), "0");
        assert_eq!(fmt_sig9(0.322_842_712_474_619), "0.322842712");
        assert_eq!(fmt_sig9(5.298317366548036), "5.29831737");
        assert_eq!(fmt_sig9(200.0), "200.000000");
        assert_eq!(fmt_sig9(-0.04), "-0.0400000000");
        assert_eq!(fmt_sig9(1.5e-9), "1.50000000e-9");
    }
}
