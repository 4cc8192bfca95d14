//! Parsing of system, point and neighborhood literals.

use sensilab_core::systems::{symbolic_eval, SymbolicPoint, DEFAULT_RULE_DEPTH};
use sensilab_core::{
    CircleCoord, Dyadic, Dynamics, Error, MorseShift, NeighborhoodSpec, ParseError, Precision, Result, Rotation,
    SkewProduct, TorusPoint,
};

/// A system named on the command line.
pub enum AnySystem {
    Rotation(Rotation),
    Skew(SkewProduct),
    Morse(MorseShift),
}

/// Runs `$body` with `$s` bound to the concrete system.
#[macro_export]
macro_rules! with_system {
    ($sys:expr, $s:ident => $body:expr) => {
        match $sys {
            $crate::literals::AnySystem::Rotation($s) => $body,
            $crate::literals::AnySystem::Skew($s) => $body,
            $crate::literals::AnySystem::Morse($s) => $body,
        }
    };
}

/// `rotation:<alpha>`, `skew:<d>:<alpha>` or `morse`.
pub fn parse_system(text: &str, prec: Precision, scan_radius: u32) -> Result<AnySystem> {
    if text == "morse" {
        return Ok(AnySystem::Morse(MorseShift::new(scan_radius)));
    }
    if let Some(alpha) = text.strip_prefix("rotation:") {
        let a = CircleCoord::parse(alpha, prec).map_err(|e| e.offset_within(text, "rotation:".len()))?;
        return Ok(AnySystem::Rotation(Rotation::new(a)));
    }
    if let Some(rest) = text.strip_prefix("skew:") {
        let offset = "skew:".len();
        let (d, alpha) = rest
            .split_once(':')
            .ok_or_else(|| ParseError::new(text, text.len(), "expected skew:<d>:<alpha>"))?;
        let dim: usize = d
            .parse()
            .map_err(|_| ParseError::new(text, offset, "expected a dimension"))?;
        let a = CircleCoord::parse(alpha, prec).map_err(|e| e.offset_within(text, offset + d.len() + 1))?;
        return SkewProduct::new(a, dim).map(AnySystem::Skew).map_err(|e| match e {
            Error::Usage(m) | Error::Unsupported(m) => ParseError::new(text, offset, m).into(),
            other => other,
        });
    }
    Err(ParseError::new(text, 0, "expected rotation:<alpha>, skew:<d>:<alpha> or morse").into())
}

/// Per-system literal syntax.
pub trait Literal: Dynamics {
    fn parse_point(&self, text: &str) -> Result<Self::Point, ParseError>;

    /// Column names and values of one orbit row.
    fn columns(&self) -> Vec<String>;
    fn row(&self, p: &Self::Point) -> Result<Vec<String>>;
}

fn float(c: CircleCoord) -> String {
    format!("{:.17}", c.to_f64())
}

impl Literal for Rotation {
    fn parse_point(&self, text: &str) -> Result<CircleCoord, ParseError> {
        CircleCoord::parse(text, self.alpha.precision())
    }

    fn columns(&self) -> Vec<String> {
        vec!["x_raw".into(), "x".into()]
    }

    fn row(&self, p: &CircleCoord) -> Result<Vec<String>> {
        Ok(vec![p.to_string(), float(*p)])
    }
}

impl Literal for SkewProduct {
    fn parse_point(&self, text: &str) -> Result<TorusPoint, ParseError> {
        let p = TorusPoint::parse(text, self.alpha.precision())?;
        if p.dim() != self.dim {
            return Err(ParseError::new(
                text,
                0,
                format!("expected {} coordinates, found {}", self.dim, p.dim()),
            ));
        }
        Ok(p)
    }

    fn columns(&self) -> Vec<String> {
        (1..=self.dim)
            .flat_map(|i| [format!("x{i}_raw"), format!("x{i}")])
            .collect()
    }

    fn row(&self, p: &TorusPoint) -> Result<Vec<String>> {
        Ok((0..p.dim())
            .flat_map(|i| [p.coord(i).to_string(), float(p.coord(i))])
            .collect())
    }
}

/// Symbols shown per orbit row.
const MORSE_ROW_SYMBOLS: i64 = 16;

impl Literal for MorseShift {
    fn parse_point(&self, text: &str) -> Result<SymbolicPoint, ParseError> {
        SymbolicPoint::parse(text)
    }

    fn columns(&self) -> Vec<String> {
        vec!["symbol".into(), format!("word_0_{}", MORSE_ROW_SYMBOLS - 1)]
    }

    fn row(&self, p: &SymbolicPoint) -> Result<Vec<String>> {
        let word = (0..MORSE_ROW_SYMBOLS)
            .map(|i| symbolic_eval(p, i, DEFAULT_RULE_DEPTH).map(|s| char::from(b'0' + s)))
            .collect::<Result<String>>()?;
        Ok(vec![word[..1].to_string(), word])
    }
}

/// `ball:<point>:<radius>` or `cyl:<r>:<symbols>`; radii round to the grid
/// of `bits` when given as decimals.
pub fn parse_neighborhood<S: Literal>(system: &S, text: &str, bits: u32) -> Result<NeighborhoodSpec<S::Point>> {
    if let Some(rest) = text.strip_prefix("ball:") {
        let offset = "ball:".len();
        let (point, radius) = rest
            .rsplit_once(':')
            .ok_or_else(|| ParseError::new(text, text.len(), "expected ball:<point>:<radius>"))?;
        let center = system
            .parse_point(point)
            .map_err(|e| e.offset_within(text, offset))?;
        let (r, _) = Dyadic::parse_with_precision(radius, bits)
            .map_err(|e| e.offset_within(text, offset + point.len() + 1))?;
        if r.is_zero() {
            return Err(ParseError::new(text, offset + point.len() + 1, "radius must be positive").into());
        }
        return Ok(NeighborhoodSpec::Ball { center, radius: r });
    }
    if let Some(rest) = text.strip_prefix("cyl:") {
        let offset = "cyl:".len();
        let (r, symbols) = rest
            .split_once(':')
            .ok_or_else(|| ParseError::new(text, text.len(), "expected cyl:<r>:<symbols>"))?;
        let radius: u32 = r
            .parse()
            .map_err(|_| ParseError::new(text, offset, "expected a cylinder radius"))?;
        let sym_offset = offset + r.len() + 1;
        let mut out = Vec::with_capacity(symbols.len());
        for (i, c) in symbols.char_indices() {
            match c {
                '0' => out.push(0),
                '1' => out.push(1),
                _ => return Err(ParseError::new(text, sym_offset + i, "expected 0 or 1").into()),
            }
        }
        if out.len() as u64 != 2 * radius as u64 + 1 {
            return Err(ParseError::new(
                text,
                sym_offset,
                format!("expected {} symbols for radius {radius}", 2 * radius as u64 + 1),
            )
            .into());
        }
        return Ok(NeighborhoodSpec::Cylinder { radius, symbols: out });
    }
    Err(ParseError::new(text, 0, "expected ball:<point>:<radius> or cyl:<r>:<symbols>").into())
}
