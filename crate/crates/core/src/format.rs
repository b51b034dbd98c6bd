//! Decimal rendering and answer parsing, integer arithmetic only.

use crate::error::{Error, ParseAnswerError};
use crate::model::{pow10, ticks_to_value, ExactValue, InstrumentSpec, TickPosition};
use crate::Rational;

/// Renders a position in the display unit with exactly
/// `display_decimals` fraction digits, e.g. `"12.3"` or `"350"`.
pub fn format_value(spec: &InstrumentSpec, pos: TickPosition) -> Result<String, Error> {
    let value = ticks_to_value(spec, pos)?.value();
    let decimals = spec.display_decimals();
    let scale = pow10(decimals).expect("validated decimals");
    let scaled = value * Rational::from_integer(scale);
    debug_assert!(scaled.is_integer(), "spec validation guarantees exact decimals");
    Ok(fixed_decimal(scaled.to_integer(), decimals))
}

/// `units / 10^decimals` as text with exactly `decimals` fraction digits.
fn fixed_decimal(units: i64, decimals: u32) -> String {
    if decimals == 0 {
        return units.to_string();
    }
    let scale = pow10(decimals).expect("validated decimals");
    format!(
        "{}.{:0width$}",
        units / scale,
        units % scale,
        width = decimals as usize
    )
}

/// Shortest exact decimal for a terminating rational: `0.1`, `0.01`,
/// `10`, `0.5`. Returns `None` when the expansion does not terminate.
pub fn trimmed_decimal(value: Rational) -> Option<String> {
    let mut decimals = 0u32;
    let mut scaled = value;
    while !scaled.is_integer() {
        decimals += 1;
        if decimals > 18 {
            return None;
        }
        scaled = value * Rational::from_integer(pow10(decimals)?);
    }
    let text = fixed_decimal(scaled.to_integer(), decimals);
    Some(if text.contains('.') {
        text.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        text
    })
}

/// Parses a student answer in the instrument's display unit.
///
/// Grammar after trimming whitespace: `[0-9]+(\.[0-9]+)?`. Values finer
/// than the least count are accepted; grading decides whether they match.
pub fn parse_answer(spec: &InstrumentSpec, text: &str) -> Result<ExactValue, ParseAnswerError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseAnswerError::Empty);
    }
    let offset = text.len() - text.trim_start().len();
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (s, None),
    };
    if let Some((at, found)) = s
        .char_indices()
        .find(|(i, c)| !(c.is_ascii_digit() || (*c == '.' && *i == int_part.len())))
    {
        return Err(ParseAnswerError::Unexpected {
            found,
            at: offset + at,
        });
    }
    if int_part.is_empty() || frac_part.is_some_and(str::is_empty) {
        return Err(ParseAnswerError::DanglingPoint);
    }
    // Trailing fraction zeros carry no value; dropping them keeps "12.3000…0" in range.
    let frac = frac_part.unwrap_or("").trim_end_matches('0');
    let int = int_part.trim_start_matches('0');
    let digits = format!("{int}{frac}");
    let numer: i64 = if digits.is_empty() {
        0
    } else {
        digits.parse().map_err(|_| ParseAnswerError::TooLong)?
    };
    let denom = pow10(frac.len() as u32).ok_or(ParseAnswerError::TooLong)?;
    Ok(ExactValue::new(Rational::new(numer, denom), spec.display_unit()))
}
