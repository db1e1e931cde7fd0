//! TextGrid parser: encoding sniff, token scanner, structural validation.
//!
//! The scanner treats the file as a stream of value tokens (numbers and
//! quoted strings) separated by layout words (`xmin`, `=`, `item [1]:`).
//! Long and short formats differ only in which layout words appear, so one
//! token walk parses both. The parser never panics on arbitrary bytes;
//! every malformed input maps to a typed error.

use super::{
    Interval, IntervalTier, Point, PointTier, TextGrid, TextGridError, Tier,
    CONTIGUITY_TOLERANCE_S,
};

/// Parse a TextGrid from raw file bytes.
pub fn parse(bytes: &[u8]) -> Result<TextGrid, TextGridError> {
    let text = decode(bytes)?;
    Parser::new(&text).parse_grid()
}

/// Decode file bytes: UTF-8 first, UTF-16 on a byte-order mark, Latin-1
/// as the last resort (it accepts any byte, mapping it to U+0000..U+00FF).
fn decode(bytes: &[u8]) -> Result<String, TextGridError> {
    if let Ok(s) = std::str::from_utf8(bytes) {
        return Ok(s.strip_prefix('\u{feff}').unwrap_or(s).to_string());
    }
    if let Some(rest) = bytes.strip_prefix(&[0xFE, 0xFF]) {
        return decode_utf16(rest, true);
    }
    if let Some(rest) = bytes.strip_prefix(&[0xFF, 0xFE]) {
        return decode_utf16(rest, false);
    }
    Ok(bytes.iter().map(|&b| b as char).collect())
}

fn decode_utf16(bytes: &[u8], big_endian: bool) -> Result<String, TextGridError> {
    if bytes.len() % 2 != 0 {
        return Err(TextGridError::Encoding(
            "UTF-16 stream has an odd number of bytes".into(),
        ));
    }
    let units = bytes.chunks_exact(2).map(|pair| {
        if big_endian {
            u16::from_be_bytes([pair[0], pair[1]])
        } else {
            u16::from_le_bytes([pair[0], pair[1]])
        }
    });
    char::decode_utf16(units)
        .collect::<Result<String, _>>()
        .map_err(|e| TextGridError::Encoding(format!("invalid UTF-16: {e}")))
}

#[derive(Debug, PartialEq)]
enum Token {
    Number(f64),
    Str(String),
    /// Layout word such as `xmin`, `=`, `intervals [1]:`, `<exists>`.
    Word,
    /// The `<absent>` flag Praat writes for a TextGrid without tiers.
    Absent,
}

struct Parser<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    /// Count of value tokens consumed, for error context.
    consumed: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            chars: text.chars().peekable(),
            consumed: 0,
        }
    }

    fn next_token(&mut self) -> Result<Option<Token>, TextGridError> {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.chars.next();
                continue;
            }
            self.consumed += 1;
            if c == '"' {
                return self.quoted_string().map(Some);
            }
            let mut word = String::new();
            while let Some(&c) = self.chars.peek() {
                if c.is_whitespace() {
                    break;
                }
                word.push(c);
                self.chars.next();
            }
            if word == "<absent>" {
                return Ok(Some(Token::Absent));
            }
            if word.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+' || c == '.') {
                if let Ok(x) = word.parse::<f64>() {
                    if x.is_finite() {
                        return Ok(Some(Token::Number(x)));
                    }
                }
            }
            return Ok(Some(Token::Word));
        }
        Ok(None)
    }

    /// Read a quoted string starting at the opening `"`. A doubled `""`
    /// inside is an escaped quote; the string may span multiple lines.
    fn quoted_string(&mut self) -> Result<Token, TextGridError> {
        self.chars.next(); // opening quote
        let mut value = String::new();
        loop {
            match self.chars.next() {
                Some('"') => {
                    if self.chars.peek() == Some(&'"') {
                        self.chars.next();
                        value.push('"');
                    } else {
                        return Ok(Token::Str(value));
                    }
                }
                Some(c) => value.push(c),
                None => {
                    return Err(TextGridError::MalformedValue {
                        expected: "closing quote",
                        context: self.context(),
                    })
                }
            }
        }
    }

    fn context(&self) -> String {
        format!("near value {}", self.consumed)
    }

    /// Next number, skipping layout words.
    fn next_number(&mut self, what: &'static str) -> Result<f64, TextGridError> {
        match self.next_number_or_absent(what)? {
            Some(x) => Ok(x),
            None => Err(TextGridError::MalformedValue {
                expected: what,
                context: format!("found <absent> {}", self.context()),
            }),
        }
    }

    /// Next number, or `None` when the `<absent>` flag is found first.
    fn next_number_or_absent(
        &mut self,
        what: &'static str,
    ) -> Result<Option<f64>, TextGridError> {
        loop {
            match self.next_token()? {
                Some(Token::Number(x)) => return Ok(Some(x)),
                Some(Token::Absent) => return Ok(None),
                Some(Token::Word) => continue,
                Some(Token::Str(_)) => {
                    return Err(TextGridError::MalformedValue {
                        expected: what,
                        context: format!("found quoted text {}", self.context()),
                    })
                }
                None => {
                    return Err(TextGridError::MalformedValue {
                        expected: what,
                        context: format!("found end of file {}", self.context()),
                    })
                }
            }
        }
    }

    /// Next quoted string, skipping layout words.
    fn next_string(&mut self, what: &'static str) -> Result<String, TextGridError> {
        loop {
            match self.next_token()? {
                Some(Token::Str(s)) => return Ok(s),
                Some(Token::Word) => continue,
                Some(Token::Number(_)) | Some(Token::Absent) => {
                    return Err(TextGridError::MalformedValue {
                        expected: what,
                        context: format!("found a bare value {}", self.context()),
                    })
                }
                None => {
                    return Err(TextGridError::MalformedValue {
                        expected: what,
                        context: format!("found end of file {}", self.context()),
                    })
                }
            }
        }
    }

    fn next_count(&mut self, what: &'static str) -> Result<usize, TextGridError> {
        let x = self.next_number(what)?;
        count_to_usize(x, what, self.context())
    }

    fn parse_grid(&mut self) -> Result<TextGrid, TextGridError> {
        let file_type = self.next_string("file type declaration").map_err(|_| {
            TextGridError::MalformedHeader("missing `File type = \"ooTextFile\"`".into())
        })?;
        if file_type != "ooTextFile" {
            return Err(TextGridError::MalformedHeader(format!(
                "file type is {file_type:?}, expected \"ooTextFile\""
            )));
        }
        let class = self.next_string("object class declaration").map_err(|_| {
            TextGridError::MalformedHeader("missing `Object class = \"TextGrid\"`".into())
        })?;
        if class != "TextGrid" {
            return Err(TextGridError::MalformedHeader(format!(
                "object class is {class:?}, expected \"TextGrid\""
            )));
        }

        let xmin = self.next_number("grid start time")?;
        let xmax = self.next_number("grid end time")?;
        check_time_pair(xmin, xmax, "grid", false)?;

        let mut tiers = Vec::new();
        if let Some(count) = self.next_number_or_absent("tier count")? {
            let count = count_to_usize(count, "tier count", self.context())?;
            for _ in 0..count {
                tiers.push(self.parse_tier(xmin, xmax)?);
            }
        }
        Ok(TextGrid { xmin, xmax, tiers })
    }

    fn parse_tier(&mut self, grid_xmin: f64, grid_xmax: f64) -> Result<Tier, TextGridError> {
        let class = self.next_string("tier class")?;
        let name = self.next_string("tier name")?;
        let xmin = self.next_number("tier start time")?;
        let xmax = self.next_number("tier end time")?;
        check_time_pair(xmin, xmax, "tier", false)?;
        let (xmin, xmax) = clamp_tier_to_grid(&name, xmin, xmax, grid_xmin, grid_xmax)?;

        match class.as_str() {
            "IntervalTier" => {
                let count = self.next_count("interval count")?;
                let mut intervals = Vec::with_capacity(count.min(4096));
                for i in 0..count {
                    let ixmin = self.next_number("interval start time")?;
                    let ixmax = self.next_number("interval end time")?;
                    let text = self.next_string("interval text")?;
                    check_time_pair(ixmin, ixmax, "interval", true).map_err(|_| {
                        TextGridError::InvalidStructure(format!(
                            "tier {name:?}: interval {} has invalid times [{ixmin}, {ixmax}]",
                            i + 1
                        ))
                    })?;
                    intervals.push(Interval {
                        xmin: ixmin,
                        xmax: ixmax,
                        text,
                    });
                }
                let mut tier = IntervalTier {
                    name,
                    xmin,
                    xmax,
                    intervals,
                };
                normalize_interval_tier(&mut tier)?;
                Ok(Tier::Interval(tier))
            }
            "TextTier" => {
                let count = self.next_count("point count")?;
                let mut points = Vec::with_capacity(count.min(4096));
                for i in 0..count {
                    let time = self.next_number("point time")?;
                    let mark = self.next_string("point mark")?;
                    if !time.is_finite() || time < 0.0 {
                        return Err(TextGridError::InvalidStructure(format!(
                            "tier {name:?}: point {} has invalid time {time}",
                            i + 1
                        )));
                    }
                    points.push(Point { time, mark });
                }
                Ok(Tier::Point(PointTier {
                    name,
                    xmin,
                    xmax,
                    points,
                }))
            }
            other => Err(TextGridError::MalformedValue {
                expected: "tier class \"IntervalTier\" or \"TextTier\"",
                context: format!("got {other:?}"),
            }),
        }
    }
}

fn count_to_usize(x: f64, what: &'static str, context: String) -> Result<usize, TextGridError> {
    if x < 0.0 || x.fract() != 0.0 || x > 1e8 {
        return Err(TextGridError::MalformedValue {
            expected: what,
            context: format!("got {x} {context}"),
        });
    }
    Ok(x as usize)
}

/// Times must be finite, non-negative and ordered. Zero-length spans are
/// rejected for intervals (`strict`), tolerated for grid and tier headers.
fn check_time_pair(
    xmin: f64,
    xmax: f64,
    what: &str,
    strict: bool,
) -> Result<(), TextGridError> {
    if !xmin.is_finite() || !xmax.is_finite() || xmin < 0.0 {
        return Err(TextGridError::InvalidStructure(format!(
            "{what} times [{xmin}, {xmax}] must be finite and non-negative"
        )));
    }
    let ordered = if strict { xmin < xmax } else { xmin <= xmax };
    if !ordered {
        return Err(TextGridError::InvalidStructure(format!(
            "{what} times [{xmin}, {xmax}] are not increasing"
        )));
    }
    Ok(())
}

/// Tiers must lie inside the grid range; mismatches within tolerance are
/// snapped to the grid's boundary values.
fn clamp_tier_to_grid(
    name: &str,
    xmin: f64,
    xmax: f64,
    grid_xmin: f64,
    grid_xmax: f64,
) -> Result<(f64, f64), TextGridError> {
    let xmin = snap(xmin, grid_xmin);
    let xmax = snap(xmax, grid_xmax);
    if xmin < grid_xmin || xmax > grid_xmax {
        return Err(TextGridError::InvalidStructure(format!(
            "tier {name:?} range [{xmin}, {xmax}] exceeds grid range [{grid_xmin}, {grid_xmax}]"
        )));
    }
    Ok((xmin, xmax))
}

fn snap(value: f64, target: f64) -> f64 {
    if (value - target).abs() <= CONTIGUITY_TOLERANCE_S {
        target
    } else {
        value
    }
}

/// Enforce the contiguity contract: the first interval starts at the tier
/// start, each interval starts where the previous one ended, the last ends
/// at the tier end. Mismatches within tolerance are snapped (the left
/// interval's end wins); larger ones are errors.
fn normalize_interval_tier(tier: &mut IntervalTier) -> Result<(), TextGridError> {
    if tier.intervals.is_empty() {
        return Ok(());
    }

    let first = &mut tier.intervals[0];
    first.xmin = snap(first.xmin, tier.xmin);
    if first.xmin != tier.xmin {
        return Err(TextGridError::NonContiguousTier {
            tier: tier.name.clone(),
            index: 0,
            gap_s: first.xmin - tier.xmin,
        });
    }

    for i in 1..tier.intervals.len() {
        let prev_xmax = tier.intervals[i - 1].xmax;
        let cur = &mut tier.intervals[i];
        cur.xmin = snap(cur.xmin, prev_xmax);
        if cur.xmin != prev_xmax {
            return Err(TextGridError::NonContiguousTier {
                tier: tier.name.clone(),
                index: i,
                gap_s: cur.xmin - prev_xmax,
            });
        }
    }

    let n = tier.intervals.len();
    let last = &mut tier.intervals[n - 1];
    last.xmax = snap(last.xmax, tier.xmax);
    if last.xmax != tier.xmax {
        return Err(TextGridError::NonContiguousTier {
            tier: tier.name.clone(),
            index: n,
            gap_s: tier.xmax - last.xmax,
        });
    }

    // Snapping moves boundaries by at most the tolerance; re-check that no
    // interval collapsed.
    for (i, iv) in tier.intervals.iter().enumerate() {
        if iv.xmin >= iv.xmax {
            return Err(TextGridError::InvalidStructure(format!(
                "tier {:?}: interval {} collapsed after boundary snapping",
                tier.name,
                i + 1
            )));
        }
    }
    Ok(())
}
