//! Ring-spec expressions: `Z(m) | GF(q) | ZChain(p,k) | PChain(q,k) | Mat(n, S) | Prod(S, ...) | Table(path)`.

use super::RingError;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingSpec {
    Z(u64),
    GF(u64),
    ZChain(u64, u32),
    PChain(u64, u32),
    Mat(usize, Box<RingSpec>),
    Prod(Vec<RingSpec>),
    Table(String),
}

impl RingSpec {
    pub fn parse(text: &str) -> Result<RingSpec, RingError> {
        let mut p = Parser { src: text, pos: 0 };
        let spec = p.spec()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.error("trailing input"));
        }
        Ok(spec)
    }

    /// Number of elements, if determined by the expression alone (not for `Table`).
    /// `None` on overflow as well.
    pub fn order(&self) -> Option<u128> {
        match self {
            RingSpec::Z(m) | RingSpec::GF(m) => Some(*m as u128),
            RingSpec::ZChain(p, k) | RingSpec::PChain(p, k) => (*p as u128).checked_pow(*k),
            RingSpec::Mat(n, s) => {
                let exp = u32::try_from(n.checked_mul(*n)?).ok()?;
                s.order()?.checked_pow(exp)
            }
            RingSpec::Prod(parts) => parts
                .iter()
                .try_fold(1u128, |acc, s| acc.checked_mul(s.order()?)),
            RingSpec::Table(_) => None,
        }
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Z(m) => write!(f, "Z({m})"),
            RingSpec::GF(q) => write!(f, "GF({q})"),
            RingSpec::ZChain(p, k) => write!(f, "ZChain({p},{k})"),
            RingSpec::PChain(q, k) => write!(f, "PChain({q},{k})"),
            RingSpec::Mat(n, s) => write!(f, "Mat({n},{s})"),
            RingSpec::Prod(parts) => {
                f.write_str("Prod(")?;
                for (i, s) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{s}")?;
                }
                f.write_str(")")
            }
            RingSpec::Table(path) => write!(f, "Table({path})"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> RingError {
        RingError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
            spec: self.src.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn expect(&mut self, ch: char) -> Result<(), RingError> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(ch) {
            self.pos += ch.len_utf8();
            Ok(())
        } else {
            Err(self.error(&format!("expected '{ch}'")))
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn ident(&mut self) -> Result<&str, RingError> {
        self.skip_ws();
        let start = self.pos;
        let len = self.src[start..]
            .find(|c: char| !c.is_ascii_alphanumeric())
            .unwrap_or(self.src.len() - start);
        if len == 0 {
            return Err(self.error("expected a constructor name"));
        }
        self.pos += len;
        Ok(&self.src[start..start + len])
    }

    fn number(&mut self) -> Result<u64, RingError> {
        self.skip_ws();
        let start = self.pos;
        let len = self.src[start..]
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(self.src.len() - start);
        if len == 0 {
            return Err(self.error("expected a number"));
        }
        self.pos += len;
        self.src[start..start + len]
            .parse()
            .map_err(|_| self.error("number out of range"))
    }

    fn spec(&mut self) -> Result<RingSpec, RingError> {
        let start = self.pos;
        let name = self.ident()?.to_string();
        self.expect('(')?;
        let spec = match name.as_str() {
            "Z" => RingSpec::Z(self.number()?),
            "GF" => RingSpec::GF(self.number()?),
            "ZChain" | "PChain" => {
                let a = self.number()?;
                self.expect(',')?;
                let k = self.number()?;
                let k = u32::try_from(k).map_err(|_| self.error("exponent out of range"))?;
                if name == "ZChain" {
                    RingSpec::ZChain(a, k)
                } else {
                    RingSpec::PChain(a, k)
                }
            }
            "Mat" => {
                let n = self.number()? as usize;
                self.expect(',')?;
                RingSpec::Mat(n, Box::new(self.spec()?))
            }
            "Prod" => {
                let mut parts = vec![self.spec()?];
                while self.peek() == Some(',') {
                    self.expect(',')?;
                    parts.push(self.spec()?);
                }
                RingSpec::Prod(parts)
            }
            "Table" => {
                self.skip_ws();
                let rest = &self.src[self.pos..];
                let len = rest.find(')').ok_or_else(|| self.error("unterminated Table("))?;
                let path = rest[..len].trim().to_string();
                if path.is_empty() {
                    return Err(self.error("empty table path"));
                }
                self.pos += len;
                RingSpec::Table(path)
            }
            _ => {
                self.pos = start;
                return Err(self.error(&format!("unknown constructor {name:?}")));
            }
        };
        self.expect(')')?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_specs() {
        let s = RingSpec::parse(" Prod( Mat(2, ZChain(2,2)) , Z(9) )").unwrap();
        assert_eq!(
            s,
            RingSpec::Prod(vec![
                RingSpec::Mat(2, Box::new(RingSpec::ZChain(2, 2))),
                RingSpec::Z(9)
            ])
        );
        assert_eq!(s.to_string(), "Prod(Mat(2,ZChain(2,2)),Z(9))");
        assert_eq!(s.order(), Some(256 * 9));
        assert_eq!(
            RingSpec::parse("Table(fixtures/fq_xy.json)").unwrap(),
            RingSpec::Table("fixtures/fq_xy.json".into())
        );
    }

    #[test]
    fn rejects_malformed_specs() {
        for bad in ["Z", "Z(4", "Q(3)", "Mat(2)", "Prod()", "Z(4) x", "ZChain(2)", "Table()"] {
            assert!(RingSpec::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn order_overflow_is_none() {
        assert_eq!(RingSpec::parse("Mat(20,GF(256))").unwrap().order(), None);
    }
}
