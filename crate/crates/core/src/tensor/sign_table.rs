use crate::{Error, Result};

/// `2^(N-1)` sign patterns over `N` parties whose row products over any
/// proper nonempty column subset cancel, while the product over all columns
/// is `+1` in every row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignTable {
    parties: usize,
    rows: Vec<Vec<i8>>,
}

impl SignTable {
    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn rows(&self) -> &[Vec<i8>] {
        &self.rows
    }

    /// Sum over rows of the product of the selected columns.
    pub fn column_product_sum(&self, columns: &[usize]) -> i64 {
        self.rows
            .iter()
            .map(|row| columns.iter().map(|&c| row[c] as i64).product::<i64>())
            .sum()
    }

    /// Check the parity and cancellation invariants over every column subset.
    pub fn is_valid(&self) -> bool {
        let n = self.parties;
        if self.rows.len() != 1 << (n - 1) {
            return false;
        }
        if self
            .rows
            .iter()
            .any(|r| r.len() != n || r.iter().filter(|&&s| s == -1).count() % 2 != 0)
        {
            return false;
        }
        (1u64..(1 << n)).all(|mask| {
            let cols: Vec<usize> = (0..n).filter(|&c| mask >> c & 1 == 1).collect();
            let sum = self.column_product_sum(&cols);
            if cols.len() == n {
                sum == self.rows.len() as i64
            } else {
                sum == 0
            }
        })
    }
}

/// Column `c` (`0 <= c < N-1`) alternates blocks of `2^(N-2-c)` plus signs
/// and minus signs; the last column makes the number of minus signs in each
/// row even.
pub fn sign_table(parties: usize) -> Result<SignTable> {
    if parties < 2 {
        return Err(Error::InvalidParameter(format!(
            "sign table needs at least 2 parties, got {parties}"
        )));
    }
    if parties > 31 {
        return Err(Error::InvalidParameter(format!("{parties} parties is too many rows")));
    }
    let free = parties - 1;
    let rows = (0..1usize << free)
        .map(|r| {
            let mut row: Vec<i8> = (0..free)
                .map(|c| if r >> (free - 1 - c) & 1 == 0 { 1 } else { -1 })
                .collect();
            let parity: i8 = row.iter().product();
            row.push(parity);
            row
        })
        .collect();
    Ok(SignTable { parties, rows })
}
