//! Space and residue spec strings.
//!
//! ```text
//! space   := kind "(" kv ("," kv)* ")"
//! kind    := "Sp" | "O" | "U"
//! kv      := ("n=" int) | ("q=" int) | ("corank=" int)
//! residue := ("point" | "line" | "subspace(d=" int ")" | "max") [":upper" | ":lower"]
//! ```
//!
//! A full spec is a space optionally followed by whitespace and a residue.

use std::fmt;

use polproj_core::forms::{FormSpec, Kind};
use polproj_core::polar::Side;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    Sp,
    O,
    U,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceSpec {
    pub kind: SpaceKind,
    pub n: u64,
    pub q: u64,
    pub corank: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidueKind {
    Point,
    Line,
    /// Projective dimension.
    Subspace(u64),
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidueSpec {
    pub kind: ResidueKind,
    pub side: Option<Side>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spec {
    pub space: SpaceSpec,
    pub residue: Option<ResidueSpec>,
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            SpaceKind::Sp => "Sp",
            SpaceKind::O => "O",
            SpaceKind::U => "U",
        };
        write!(f, "{k}(n={},q={}", self.n, self.q)?;
        if let Some(c) = self.corank {
            write!(f, ",corank={c}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for ResidueSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ResidueKind::Point => f.write_str("point")?,
            ResidueKind::Line => f.write_str("line")?,
            ResidueKind::Subspace(d) => write!(f, "subspace(d={d})")?,
            ResidueKind::Max => f.write_str("max")?,
        }
        match self.side {
            Some(Side::Upper) => f.write_str(":upper"),
            Some(Side::Lower) => f.write_str(":lower"),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Spec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.space)?;
        if let Some(r) = &self.residue {
            write!(f, " {r}")?;
        }
        Ok(())
    }
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, msg: impl Into<String>) -> CliError {
        CliError::Parse { pos: self.pos, msg: msg.into() }
    }
    fn rest(&self) -> &'a str {
        &self.s[self.pos..]
    }
    fn eat(&mut self, lit: &str) -> bool {
        if self.rest().starts_with(lit) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }
    fn expect(&mut self, lit: &str) -> Result<(), CliError> {
        if self.eat(lit) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{lit}'")))
        }
    }
    fn int(&mut self) -> Result<u64, CliError> {
        let digits = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return Err(self.err("expected an integer"));
        }
        let v = self.rest()[..digits].parse().map_err(|_| self.err("integer out of range"))?;
        self.pos += digits;
        Ok(v)
    }
    fn skip_ws(&mut self) -> bool {
        let n = self.rest().len() - self.rest().trim_start().len();
        self.pos += n;
        n > 0
    }
}

fn parse_space(c: &mut Cursor) -> Result<SpaceSpec, CliError> {
    let kind = if c.eat("Sp") {
        SpaceKind::Sp
    } else if c.eat("O") {
        SpaceKind::O
    } else if c.eat("U") {
        SpaceKind::U
    } else {
        return Err(c.err("expected space kind 'Sp', 'O' or 'U'"));
    };
    c.expect("(")?;
    let (mut n, mut q, mut corank) = (None, None, None);
    loop {
        let at = c.pos;
        let slot = if c.eat("n=") {
            &mut n
        } else if c.eat("q=") {
            &mut q
        } else if c.eat("corank=") {
            &mut corank
        } else {
            return Err(c.err("expected 'n=', 'q=' or 'corank='"));
        };
        if slot.is_some() {
            return Err(CliError::Parse { pos: at, msg: "duplicate key".into() });
        }
        *slot = Some(c.int()?);
        if c.eat(")") {
            break;
        }
        c.expect(",")?;
    }
    let n = n.ok_or_else(|| c.err("missing 'n='"))?;
    let q = q.ok_or_else(|| c.err("missing 'q='"))?;
    Ok(SpaceSpec { kind, n, q, corank })
}

fn parse_residue(c: &mut Cursor) -> Result<ResidueSpec, CliError> {
    let kind = if c.eat("point") {
        ResidueKind::Point
    } else if c.eat("line") {
        ResidueKind::Line
    } else if c.eat("max") {
        ResidueKind::Max
    } else if c.eat("subspace(d=") {
        let d = c.int()?;
        c.expect(")")?;
        ResidueKind::Subspace(d)
    } else {
        return Err(c.err("expected 'point', 'line', 'subspace(d=..)' or 'max'"));
    };
    let side = if c.eat(":upper") {
        Some(Side::Upper)
    } else if c.eat(":lower") {
        Some(Side::Lower)
    } else if c.rest().starts_with(':') {
        return Err(c.err("expected ':upper' or ':lower'"));
    } else {
        None
    };
    Ok(ResidueSpec { kind, side })
}

/// Parse a space, optionally followed by a residue.
pub fn parse_spec(text: &str) -> Result<Spec, CliError> {
    let mut c = Cursor { s: text, pos: 0 };
    c.skip_ws();
    let space = parse_space(&mut c)?;
    let ws = c.skip_ws();
    let residue = if c.rest().is_empty() {
        None
    } else if ws {
        Some(parse_residue(&mut c)?)
    } else {
        return Err(c.err("expected whitespace before the residue"));
    };
    c.skip_ws();
    if !c.rest().is_empty() {
        return Err(c.err("unexpected trailing input"));
    }
    Ok(Spec { space, residue })
}

/// `q=<int>`, the field spec of the conic check.
pub fn parse_field_spec(text: &str) -> Result<u64, CliError> {
    let mut c = Cursor { s: text.trim(), pos: 0 };
    c.expect("q=")?;
    let q = c.int()?;
    if !c.rest().is_empty() {
        return Err(c.err("unexpected trailing input"));
    }
    Ok(q)
}

impl SpaceSpec {
    /// Validate and build the form.
    pub fn to_form(&self) -> Result<FormSpec, CliError> {
        let sem = |m: String| Err(CliError::Semantic(m));
        let rank = self.n as usize;
        if rank == 0 {
            return sem("n must be at least 1".into());
        }
        let (kind, corank) = match (self.kind, self.corank) {
            (SpaceKind::Sp, None) => (Kind::Symplectic, 0),
            (SpaceKind::Sp, Some(_)) => return sem("Sp takes no corank".into()),
            (SpaceKind::O, None) => return sem("O needs corank 1 or 2".into()),
            (SpaceKind::O, Some(0)) => return sem("O corank=0 is top-thin, type D, out of scope".into()),
            (SpaceKind::O, Some(c @ (1 | 2))) => (Kind::Quadratic, c as usize),
            (SpaceKind::O, Some(c)) => return sem(format!("O corank {c} not in {{1,2}}")),
            (SpaceKind::U, c) => match c.unwrap_or(0) {
                c @ (0 | 1) => (Kind::Hermitian, c as usize),
                c => return sem(format!("U corank {c} not in {{0,1}}")),
            },
        };
        FormSpec::from_params(kind, rank, self.q, corank).map_err(|e| CliError::Semantic(e.to_string()))
    }
}

impl ResidueSpec {
    /// Vector dimension of the residue's node in a space of rank `rank`, and
    /// its side (maximals default to lower, others to upper).
    pub fn level_side(&self, rank: usize) -> Result<(usize, Side), CliError> {
        let level = match self.kind {
            ResidueKind::Point => 1,
            ResidueKind::Line => 2,
            ResidueKind::Subspace(d) => d as usize + 1,
            ResidueKind::Max => rank,
        };
        if level > rank {
            return Err(CliError::Semantic(format!("{self}: dimension exceeds the rank {rank}")));
        }
        let side = self.side.unwrap_or(if level == rank { Side::Lower } else { Side::Upper });
        if side == Side::Upper && level == rank {
            return Err(CliError::Semantic(format!("{self}: a maximal subspace has an empty upper residue")));
        }
        if side == Side::Lower && level == 1 {
            return Err(CliError::Semantic(format!("{self}: a point has an empty lower residue")));
        }
        Ok((level, side))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let s = parse_spec("Sp(n=3,q=2) point:upper").unwrap();
        assert_eq!(s.space, SpaceSpec { kind: SpaceKind::Sp, n: 3, q: 2, corank: None });
        assert_eq!(s.residue, Some(ResidueSpec { kind: ResidueKind::Point, side: Some(Side::Upper) }));
        let f = s.space.to_form().unwrap();
        assert_eq!(f.classical_name(), "W(5,2)");

        let e = parse_spec("O(n=3,q=2,corank=2) point:upper").unwrap().space.to_form().unwrap();
        assert_eq!(e.n(), 8);
        assert_eq!(e.classical_name(), "Q-(7,2)");

        let bad = parse_spec("O(n=3,q=3,corank=0)").unwrap().space.to_form();
        assert!(matches!(bad, Err(CliError::Semantic(m)) if m.contains("top-thin")));
    }

    #[test]
    fn error_positions() {
        match parse_spec("Sp(n=3;q=2)") {
            Err(CliError::Parse { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("{other:?}"),
        }
        match parse_spec("Sp(n=3,q=2) plane") {
            Err(CliError::Parse { pos, .. }) => assert_eq!(pos, 12),
            other => panic!("{other:?}"),
        }
        assert!(parse_spec("Sp(n=3,n=2)").is_err());
        assert!(parse_spec("Sp(q=2)").is_err());
        assert!(parse_spec("X(n=3,q=2)").is_err());
    }

    #[test]
    fn residue_levels() {
        let r = |t: &str| parse_spec(&format!("Sp(n=3,q=2) {t}")).unwrap().residue.unwrap();
        assert_eq!(r("max").level_side(3).unwrap(), (3, Side::Lower));
        assert_eq!(r("subspace(d=1)").level_side(3).unwrap(), (2, Side::Upper));
        assert_eq!(r("line:lower").level_side(3).unwrap(), (2, Side::Lower));
        assert!(r("max:upper").level_side(3).is_err());
        assert!(r("point:lower").level_side(3).is_err());
        assert!(r("subspace(d=3)").level_side(3).is_err());
    }
}
