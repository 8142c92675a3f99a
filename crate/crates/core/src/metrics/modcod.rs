//! DVB-S2X MODCOD lookup: SINR in dB to spectral efficiency in information bits per symbol.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Embedded table, sorted by required SINR.
pub const MODCOD_CSV: &str = include_str!("../../data/modcod_dvbs2x.csv");

/// The 31 modes with their published efficiency and required SINR, in listing order.
pub const DVB_S2X_ROWS: [(&str, f64, f64); 31] = [
    ("QPSK_2/9", 0.434, -2.85),
    ("QPSK_13/45", 0.567, -2.03),
    ("QPSK_9/20", 0.889, 0.22),
    ("QPSK_11/20", 1.088, 1.45),
    ("8APSK_5/9-L", 1.647, 4.73),
    ("8APSK_26/45-L", 1.713, 5.13),
    ("8PSK_23/36", 1.896, 6.12),
    ("8PSK_25/36", 2.062, 7.02),
    ("8PSK_13/18", 2.145, 7.49),
    ("16APSK_1/2-L", 1.972, 5.97),
    ("16APSK_8/15-L", 2.104, 6.55),
    ("16APSK_5/9-L", 2.193, 6.84),
    ("16APSK_26/45", 2.281, 7.51),
    ("16APSK_3/5", 2.370, 7.80),
    ("16APSK_3/5-L", 2.370, 7.41),
    ("16APSK_28/45", 2.458, 8.10),
    ("16APSK_23/36", 2.524, 8.38),
    ("16APSK_2/3-L", 2.635, 8.43),
    ("16APSK_25/36", 2.745, 9.27),
    ("16APSK_13/18", 2.856, 9.71),
    ("16APSK_7/9", 3.077, 10.65),
    ("16APSK_77/90", 3.386, 11.99),
    ("32APSK_2/3-L", 3.289, 11.10),
    ("32APSK_32/45", 3.510, 11.75),
    ("32APSK_7/9", 3.841, 13.05),
    ("64APSK_32/45-L", 4.206, 13.98),
    ("64APSK_11/15", 4.338, 14.81),
    ("64APSK_7/9", 4.603, 15.47),
    ("64APSK_4/5", 4.735, 15.87),
    ("64APSK_5/6", 4.933, 16.55),
    ("128APSK_3/4", 5.163, 17.73),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModcodRow {
    pub mode: String,
    pub efficiency_bps: f64,
    pub required_sinr_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModcodTable {
    rows: Vec<ModcodRow>,
}

impl ModcodTable {
    /// Sorts rows by required SINR (stable, so listing order breaks ties).
    pub fn new(mut rows: Vec<ModcodRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Format("MODCOD table is empty".into()));
        }
        for r in &rows {
            if !r.required_sinr_db.is_finite() || !(r.efficiency_bps > 0.0) {
                return Err(Error::Format(format!("invalid MODCOD row {r:?}")));
            }
        }
        rows.sort_by(|a, b| a.required_sinr_db.total_cmp(&b.required_sinr_db));
        Ok(Self { rows })
    }

    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["mode", "efficiency_bps", "required_sinr_db"] {
            return Err(Error::Format(format!("unexpected MODCOD header {headers:?}")));
        }
        let rows = rdr
            .deserialize()
            .collect::<std::result::Result<Vec<ModcodRow>, _>>()?;
        Self::new(rows)
    }

    /// The embedded DVB-S2X table.
    pub fn dvb_s2x() -> Self {
        Self::from_csv(MODCOD_CSV.as_bytes()).expect("embedded MODCOD table is valid")
    }

    pub fn rows(&self) -> &[ModcodRow] {
        &self.rows
    }

    /// Mode with the largest efficiency whose required SINR is at most `sinr_db`.
    ///
    /// Among equally efficient modes the one with the higher requirement is reported.
    /// `None` means outage.
    pub fn lookup(&self, sinr_db: f64) -> Option<&ModcodRow> {
        self.rows
            .iter()
            .take_while(|r| r.required_sinr_db <= sinr_db)
            .max_by(|a, b| {
                a.efficiency_bps
                    .total_cmp(&b.efficiency_bps)
                    .then(a.required_sinr_db.total_cmp(&b.required_sinr_db))
            })
    }

    /// Efficiency in bits/symbol, 0 in outage.
    pub fn efficiency(&self, sinr_db: f64) -> f64 {
        self.lookup(sinr_db).map_or(0.0, |r| r.efficiency_bps)
    }

    /// Rows that the lookup never returns at their own threshold because a mode with a
    /// lower requirement is more efficient.
    pub fn dominated(&self) -> Vec<&ModcodRow> {
        self.rows
            .iter()
            .filter(|r| self.efficiency(r.required_sinr_db) > r.efficiency_bps)
            .collect()
    }
}

impl Default for ModcodTable {
    fn default() -> Self {
        Self::dvb_s2x()
    }
}

/// Efficiency under the embedded table.
pub fn modcod_efficiency(sinr_db: f64) -> f64 {
    thread_local! {
        static TABLE: ModcodTable = ModcodTable::dvb_s2x();
    }
    TABLE.with(|t| t.efficiency(sinr_db))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_csv_matches_listing() {
        let t = ModcodTable::dvb_s2x();
        assert_eq!(t.rows().len(), 31);
        let mut listed: Vec<ModcodRow> = DVB_S2X_ROWS
            .iter()
            .map(|&(m, e, s)| ModcodRow {
                mode: m.to_string(),
                efficiency_bps: e,
                required_sinr_db: s,
            })
            .collect();
        listed.sort_by(|a, b| a.required_sinr_db.total_cmp(&b.required_sinr_db));
        assert_eq!(t.rows(), listed.as_slice());
    }

    #[test]
    fn reference_lookups() {
        assert_eq!(modcod_efficiency(7.80), 2.370);
        assert_eq!(modcod_efficiency(-3.0), 0.0);
        assert_eq!(modcod_efficiency(-2.86), 0.0);
        assert_eq!(modcod_efficiency(-2.85), 0.434);
        assert_eq!(modcod_efficiency(17.73), 5.163);
        assert_eq!(modcod_efficiency(25.0), 5.163);
        assert_eq!(ModcodTable::dvb_s2x().lookup(7.80).unwrap().mode, "16APSK_3/5");
    }

    #[test]
    fn dominated_modes() {
        let t = ModcodTable::dvb_s2x();
        let names: Vec<&str> = t.dominated().iter().map(|r| r.mode.as_str()).collect();
        assert_eq!(
            names,
            ["8PSK_23/36", "8PSK_25/36", "8PSK_13/18", "16APSK_26/45", "16APSK_77/90"]
        );
    }

    #[test]
    fn rejects_bad_csv() {
        assert!(ModcodTable::from_csv("a,b,c\nx,1,2\n".as_bytes()).is_err());
        assert!(ModcodTable::from_csv("mode,efficiency_bps,required_sinr_db\n".as_bytes()).is_err());
        assert!(ModcodTable::from_csv("mode,efficiency_bps,required_sinr_db\nX,abc,1\n".as_bytes()).is_err());
    }
}
