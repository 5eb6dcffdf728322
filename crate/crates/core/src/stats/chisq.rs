use super::{ContingencyTable, StatsError};

/// Pearson χ² with `E_ij = row_i · col_j / total`, computed after empty rows
/// and columns are dropped. Works on averaged (non-integer) tables.
pub fn chi_square_stat(t: &ContingencyTable) -> Result<f64, StatsError> {
    let t = t.compact();
    if t.rows() < 2 || t.cols() < 2 {
        return Err(StatsError::DegenerateTable {
            rows: t.rows(),
            cols: t.cols(),
        });
    }
    let rows = t.row_sums();
    let cols = t.col_sums();
    let total: f64 = rows.iter().sum();
    let mut chi = 0.0;
    for (row, r) in t.cells.iter().zip(&rows) {
        for (o, c) in row.iter().zip(&cols) {
            let e = r * c / total;
            chi += (o - e) * (o - e) / e;
        }
    }
    Ok(chi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi(cells: &[&[f64]]) -> Result<f64, StatsError> {
        chi_square_stat(&ContingencyTable::from_cells(
            cells.iter().map(|r| r.to_vec()).collect(),
        ))
    }

    #[test]
    fn known_values() {
        assert_eq!(chi(&[&[10.0, 10.0], &[10.0, 10.0]]).unwrap(), 0.0);
        assert_eq!(chi(&[&[20.0, 0.0], &[0.0, 20.0]]).unwrap(), 40.0);
        assert_eq!(chi(&[&[15.0, 5.0], &[5.0, 15.0]]).unwrap(), 10.0);
    }

    #[test]
    fn empty_rows_and_columns_ignored() {
        let a = chi(&[&[15.0, 0.0, 5.0], &[0.0, 0.0, 0.0], &[5.0, 0.0, 15.0]]).unwrap();
        assert_eq!(a, 10.0);
    }

    #[test]
    fn degenerate() {
        assert_eq!(
            chi(&[&[1.0, 2.0], &[0.0, 0.0]]),
            Err(StatsError::DegenerateTable { rows: 1, cols: 2 })
        );
        assert!(chi(&[&[1.0, 0.0], &[3.0, 0.0]]).is_err());
        assert!(chi(&[]).is_err());
    }
}
