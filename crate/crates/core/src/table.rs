//! Published primitive polynomials for `p < 50`, with the frequency-channel
//! range `m` each one serves.

use crate::ff_poly::{minimal_r, satisfies_condition_g, FpPoly, PolyError, Prime};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableRow {
    pub m_min: u64,
    pub m_max: u64,
    pub p: u64,
    pub r: u32,
    pub poly: &'static str,
}

pub const PRIMITIVE_TABLE: [TableRow; 18] = [
    TableRow {
        m_min: 33,
        m_max: 64,
        p: 2,
        r: 6,
        poly: "x^6+x^5+x^3+x^2+1",
    },
    TableRow {
        m_min: 4,
        m_max: 9,
        p: 3,
        r: 2,
        poly: "x^2-x-1",
    },
    TableRow {
        m_min: 10,
        m_max: 27,
        p: 3,
        r: 3,
        poly: "x^3+2x^2+x+1",
    },
    TableRow {
        m_min: 28,
        m_max: 81,
        p: 3,
        r: 4,
        poly: "x^4+2x+2",
    },
    TableRow {
        m_min: 26,
        m_max: 125,
        p: 5,
        r: 3,
        poly: "x^3+4x^2+x+2",
    },
    TableRow {
        m_min: 50,
        m_max: 343,
        p: 7,
        r: 3,
        poly: "x^3+5x+2",
    },
    TableRow {
        m_min: 8,
        m_max: 49,
        p: 7,
        r: 2,
        poly: "x^2+6x+3",
    },
    TableRow {
        m_min: 12,
        m_max: 121,
        p: 11,
        r: 2,
        poly: "x^2+3x+6",
    },
    TableRow {
        m_min: 14,
        m_max: 169,
        p: 13,
        r: 2,
        poly: "x^2+4x+2",
    },
    TableRow {
        m_min: 18,
        m_max: 289,
        p: 17,
        r: 2,
        poly: "x^2+15x+12",
    },
    TableRow {
        m_min: 20,
        m_max: 361,
        p: 19,
        r: 2,
        poly: "x^2+12x+2",
    },
    TableRow {
        m_min: 24,
        m_max: 529,
        p: 23,
        r: 2,
        poly: "x^2+10x+10",
    },
    TableRow {
        m_min: 30,
        m_max: 841,
        p: 29,
        r: 2,
        poly: "x^2+22x+19",
    },
    TableRow {
        m_min: 32,
        m_max: 961,
        p: 31,
        r: 2,
        poly: "x^2+16x+3",
    },
    TableRow {
        m_min: 38,
        m_max: 1369,
        p: 37,
        r: 2,
        poly: "x^2+12x+19",
    },
    TableRow {
        m_min: 42,
        m_max: 1681,
        p: 41,
        r: 2,
        poly: "x^2+9x+29",
    },
    TableRow {
        m_min: 44,
        m_max: 1849,
        p: 43,
        r: 2,
        poly: "x^2+25x+26",
    },
    TableRow {
        m_min: 48,
        // 47^2; anything above needs degree 3.
        m_max: 2209,
        p: 47,
        r: 2,
        poly: "x^2+14x+10",
    },
];

/// An owned table row, e.g. read from a user-supplied file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    pub m_min: u64,
    pub m_max: u64,
    pub p: u64,
    pub r: u32,
    pub poly: String,
}

impl From<TableRow> for TableEntry {
    fn from(row: TableRow) -> Self {
        TableEntry {
            m_min: row.m_min,
            m_max: row.m_max,
            p: row.p,
            r: row.r,
            poly: row.poly.to_string(),
        }
    }
}

/// Outcome of checking one table row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowCheck {
    pub entry: TableEntry,
    pub poly: FpPoly,
    pub degree_ok: bool,
    pub condition_g: bool,
    /// Every `m` in the row's range has `minimal_r(p, m) == r`.
    pub m_range_ok: bool,
}

impl RowCheck {
    pub fn passed(&self) -> bool {
        self.degree_ok && self.condition_g && self.m_range_ok
    }
}

impl TableRow {
    pub fn prime(&self) -> Result<Prime, PolyError> {
        Prime::new(self.p)
    }

    pub fn parse_poly(&self) -> Result<FpPoly, PolyError> {
        FpPoly::parse(self.prime()?, self.poly)
    }

    pub fn check(&self) -> Result<RowCheck, PolyError> {
        TableEntry::from(*self).check()
    }
}

impl TableEntry {
    /// `minimal_r` is monotone in `m`, so checking both ends covers the range.
    pub fn check(&self) -> Result<RowCheck, PolyError> {
        let p = Prime::new(self.p)?;
        let poly = FpPoly::parse(p, &self.poly)?;
        let degree_ok = poly.degree() == Some(self.r as usize) && poly.is_monic();
        let condition_g = degree_ok && satisfies_condition_g(&poly)?;
        let m_range_ok = self.m_min >= 1
            && self.m_min <= self.m_max
            && minimal_r(p, self.m_min)? == self.r
            && minimal_r(p, self.m_max)? == self.r;
        Ok(RowCheck {
            entry: self.clone(),
            poly,
            degree_ok,
            condition_g,
            m_range_ok,
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("expected header `m_min,m_max,p,r,poly`")]
    Header,
    #[error("row {row}: {reason}")]
    Row { row: usize, reason: String },
}

/// Reads a table in CSV form with header `m_min,m_max,p,r,poly`; lines
/// starting with `#` are skipped.
pub fn read_table<R: std::io::Read>(input: R) -> Result<Vec<TableEntry>, TableError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    if rdr
        .headers()?
        .iter()
        .ne(["m_min", "m_max", "p", "r", "poly"])
    {
        return Err(TableError::Header);
    }
    let mut out = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = idx + 1;
        let num = |k: usize| -> Result<u64, TableError> {
            rec[k].parse().map_err(|e| TableError::Row {
                row,
                reason: format!("`{}`: {e}", &rec[k]),
            })
        };
        out.push(TableEntry {
            m_min: num(0)?,
            m_max: num(1)?,
            p: num(2)?,
            r: u32::try_from(num(3)?).map_err(|e| TableError::Row {
                row,
                reason: e.to_string(),
            })?,
            poly: rec[4].to_string(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_rows() {
        for poly in ["x^2-x-1", "x^2+6x+3", "x^2+14x+10"] {
            let row = PRIMITIVE_TABLE.iter().find(|r| r.poly == poly).unwrap();
            assert!(row.check().unwrap().passed(), "{poly}");
        }
    }

    #[test]
    fn read_and_reject() {
        let text =
            "m_min,m_max,p,r,poly\n# comment\n4,9,3,2,x^2-x-1\n4,9,3,2,x^2+1\n10,27,3,2,x^2-x-1\n";
        let rows = read_table(text.as_bytes()).unwrap();
        assert_eq!(rows.len(), 3);
        let checks: Vec<bool> = rows.iter().map(|r| r.check().unwrap().passed()).collect();
        assert_eq!(checks, vec![true, false, false]);
        assert!(matches!(
            read_table("a,b\n".as_bytes()),
            Err(TableError::Header)
        ));
        assert!(read_table("m_min,m_max,p,r,poly\nx,9,3,2,x\n".as_bytes()).is_err());
    }
}
