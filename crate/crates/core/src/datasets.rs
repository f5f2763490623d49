//! Bundled data sets.

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;

/// A numeric data set with an optional group label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub data: DataMatrix,
    pub groups: Option<Vec<&'static str>>,
    pub note: &'static str,
}

impl Dataset {
    /// Distinct group labels in order of first appearance.
    pub fn group_names(&self) -> Vec<&'static str> {
        let mut names = Vec::new();
        for g in self.groups.iter().flatten() {
            if !names.contains(g) {
                names.push(*g);
            }
        }
        names
    }

    /// Rows belonging to `group`.
    pub fn group(&self, group: &str) -> Result<DataMatrix> {
        let groups = self
            .groups
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument(format!("{} has no groups", self.name)))?;
        let rows: Vec<&[f64]> = groups
            .iter()
            .zip(self.data.rows())
            .filter(|(g, _)| **g == group)
            .map(|(_, r)| r)
            .collect();
        if rows.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "{} has no group '{group}'",
                self.name
            )));
        }
        DataMatrix::from_rows(&rows)
    }
}

const TOOTH_VC: [[f64; 10]; 3] = [
    [4.2, 11.5, 7.3, 5.8, 6.4, 10.0, 11.2, 11.2, 5.2, 7.0],
    [16.5, 16.5, 15.2, 17.3, 22.5, 17.3, 13.6, 14.5, 18.8, 15.5],
    [23.6, 18.5, 33.9, 25.5, 26.4, 32.5, 26.7, 21.5, 23.3, 29.5],
];
const TOOTH_OJ: [[f64; 10]; 3] = [
    [15.2, 21.5, 17.6, 9.7, 14.5, 10.0, 8.2, 9.4, 16.5, 9.7],
    [19.7, 23.3, 23.6, 26.4, 20.0, 25.2, 25.8, 21.2, 14.5, 27.3],
    [25.5, 26.4, 22.4, 24.5, 24.8, 30.9, 26.4, 27.3, 29.4, 23.0],
];
const DOSES: [f64; 3] = [0.5, 1.0, 2.0];

/// Odontoblast length (`len`) against vitamin C dose (`dose`, mg/day) in 60
/// guinea pigs, grouped by delivery method (`VC` ascorbic acid, `OJ` orange
/// juice), 30 per group. Row order follows the classical R data set.
pub fn toothgrowth() -> Dataset {
    let mut rows = Vec::with_capacity(60);
    let mut groups = Vec::with_capacity(60);
    for (label, table) in [("VC", &TOOTH_VC), ("OJ", &TOOTH_OJ)] {
        for (dose, lens) in DOSES.iter().zip(table.iter()) {
            for &len in lens {
                rows.push([len, *dose]);
                groups.push(label);
            }
        }
    }
    Dataset {
        name: "ToothGrowth",
        columns: vec!["len", "dose"],
        data: DataMatrix::from_rows(&rows).expect("static data is valid"),
        groups: Some(groups),
        note: "C. I. Bliss (1952), The Statistics of Bioassay; as distributed with R's datasets package",
    }
}

/// Looks a bundled data set up by name (case-insensitive).
pub fn by_name(name: &str) -> Result<Dataset> {
    match name.to_ascii_lowercase().as_str() {
        "toothgrowth" => Ok(toothgrowth()),
        other => Err(Error::InvalidArgument(format!("unknown data set '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toothgrowth_shape() {
        let t = toothgrowth();
        assert_eq!(t.data.nrows(), 60);
        assert_eq!(t.data.ncols(), 2);
        assert_eq!(t.group_names(), vec!["VC", "OJ"]);
        let vc = t.group("VC").unwrap();
        let oj = t.group("OJ").unwrap();
        assert_eq!((vc.nrows(), oj.nrows()), (30, 30));
        assert_eq!(vc.row(0), &[4.2, 0.5]);
        assert_eq!(oj.row(29), &[23.0, 2.0]);
        let mean = |m: &DataMatrix| m.column_mean()[0];
        assert!((mean(&vc) - 16.963_333).abs() < 1e-5);
        assert!((mean(&oj) - 20.663_333).abs() < 1e-5);
        assert!(t.group("XX").is_err());
        assert!(by_name("toothGrowth").is_ok());
    }
}
