use num_complex::Complex64;

use crate::spectrum::{SemiclassicalPrediction, SpectrumReport};

/// One row of an eigenvalue table: `λₙ` next to `μₙ⁰` and `νₙ⁰`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub n: usize,
    pub lambda: Option<Complex64>,
    pub mu0: Option<Complex64>,
    pub nu0: Option<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub rows: Vec<TableRow>,
}

pub const TABLE_CSV_HEADER: &str = "n,re_lambda,im_lambda,re_mu0,im_mu0,re_nu0,im_nu0";

impl SpectrumTable {
    pub fn new(report: &SpectrumReport, prediction: Option<&SemiclassicalPrediction>) -> Self {
        let rows = (0..report.requested)
            .map(|n| TableRow {
                n,
                lambda: report.eigenvalues.get(n).map(|e| e.value),
                mu0: prediction.and_then(|p| p.mu.get(n).copied()),
                nu0: prediction.and_then(|p| p.nu.get(n).copied()),
            })
            .collect();
        Self { rows }
    }

    /// CSV with [`TABLE_CSV_HEADER`]; missing entries are empty fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(TABLE_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.n.to_string());
            for z in [r.lambda, r.mu0, r.nu0] {
                match z {
                    Some(z) => out.push_str(&format!(",{},{}", fmt17(z.re), fmt17(z.im))),
                    None => out.push_str(",,"),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Fixed-width text layout, one row per `n`.
    pub fn to_text(&self) -> String {
        let cell = |z: Option<Complex64>| match z {
            Some(z) if z.im.abs() >= 1e4 => format!("{:.2} {} {:.4e}i", z.re, if z.im < 0.0 { '-' } else { '+' }, z.im.abs()),
            Some(z) => format!("{:.4} {} {:.4}i", z.re, if z.im < 0.0 { '-' } else { '+' }, z.im.abs()),
            None => "-".to_string(),
        };
        let mut out = format!("{:>3}  {:>26}  {:>26}  {:>26}\n", "n", "lambda_n", "mu_n^0", "nu_n^0");
        for r in &self.rows {
            out.push_str(&format!("{:>3}  {:>26}  {:>26}  {:>26}\n", r.n, cell(r.lambda), cell(r.mu0), cell(r.nu0)));
        }
        out
    }
}

/// 17 significant digits in scientific notation; round-trips every finite `f64`.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}
