//! CSV tables for results, written atomically with round-trippable floats.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::bailout::{FiniteInfusion, InfusionPlan};
use crate::equilibrium::EquilibriumResult;
use crate::error::{Error, Result};
use crate::graphon::{BlockGraphon, CutoffVector, SpilloverMatrix};
use crate::model::{BlockSpec, FiniteNetwork};
use crate::Side;

/// `printf("%.17g")`: 17 significant digits, trailing zeros dropped,
/// scientific notation outside `1e-4 ≤ |x| < 1e17`.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let fixed = format!("{:.*}", (16 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn side_label(side: Side) -> &'static str {
    side.as_str()
}

/// A header plus string rows, optionally preceded by a `# ...` comment line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub comment: Option<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            comment: None,
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_comment(mut self, comment: impl Into<String>) -> Self {
        self.comment = Some(comment.into());
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        if let Some(c) = &self.comment {
            writeln!(buf, "# {c}")?;
        }
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&self.header)?;
            for r in &self.rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        Ok(buf)
    }

    /// Write through a temporary file in the target directory, then rename.
    pub fn write_atomic(&self, path: &Path) -> Result<()> {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        fs::create_dir_all(dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(&self.to_bytes()?)?;
        tmp.as_file().sync_all()?;
        tmp.persist(path).map_err(|e| Error::Io(e.error))?;
        Ok(())
    }
}

/// `values.csv`.
pub fn values_table(net: &FiniteNetwork, endowments: &[f64], eq: &EquilibriumResult) -> Table {
    let mut t = Table::new([
        "firm_index",
        "label",
        "block",
        "endowment",
        "value",
        "solvent",
        "side",
    ]);
    let labels = net.labels();
    for i in 0..net.n() {
        t.push(vec![
            i.to_string(),
            fmt_g17(labels[i]),
            (net.block_of()[i] + 1).to_string(),
            fmt_g17(endowments[i]),
            fmt_g17(eq.values.values[i]),
            u8::from(eq.solvency.is_solvent(i)).to_string(),
            side_label(eq.side).into(),
        ]);
    }
    t
}

/// `cutoffs.csv`.
pub fn cutoffs_table(cutoffs: &CutoffVector, side: Side) -> Table {
    let mut t = Table::new(["block", "x_star", "interior", "side"]);
    for (k, (&x, &i)) in cutoffs.x.iter().zip(&cutoffs.interior).enumerate() {
        t.push(vec![
            (k + 1).to_string(),
            fmt_g17(x),
            u8::from(i).to_string(),
            side_label(side).into(),
        ]);
    }
    t
}

/// `spillover.csv`: one row per block with `b_1 … b_m`, then `rho`, `stable`.
pub fn spillover_table(b: &SpilloverMatrix) -> Table {
    let m = b.b.nrows();
    let mut header = vec!["block".to_string()];
    header.extend((1..=m).map(|l| format!("b_{l}")));
    header.extend(["rho".to_string(), "stable".to_string()]);
    let mut t = Table::new(header);
    for k in 0..m {
        let mut row = vec![(k + 1).to_string()];
        row.extend((0..m).map(|l| fmt_g17(b.b[(k, l)])));
        row.push(fmt_g17(b.rho));
        row.push(u8::from(b.stable).to_string());
        t.push(row);
    }
    t
}

/// `plan.csv`.
pub fn plan_table(plan: &InfusionPlan) -> Table {
    let mut t = Table::new([
        "block",
        "x_star",
        "y",
        "delta",
        "e_hat",
        "support_lo",
        "support_hi",
        "lambda_star",
        "budget_used",
    ]);
    for (k, b) in plan.blocks.iter().enumerate() {
        t.push(vec![
            (k + 1).to_string(),
            fmt_g17(b.x_star),
            fmt_g17(b.y),
            fmt_g17(b.delta),
            fmt_g17(b.e_hat),
            fmt_g17(b.support_lo),
            fmt_g17(b.support_hi),
            fmt_g17(plan.lambda_star),
            fmt_g17(plan.budget_used),
        ]);
    }
    t
}

/// `infusion.csv`.
pub fn infusion_table(spec: &BlockSpec, lift: &FiniteInfusion) -> Table {
    let n = lift.iota.len();
    let labels = crate::model::firm_labels(n);
    let mut t = Table::new(["firm_index", "label", "block", "iota"]);
    for (i, (&x, &v)) in labels.iter().zip(&lift.iota).enumerate() {
        t.push(vec![
            i.to_string(),
            fmt_g17(x),
            (spec.block_of_label(x) + 1).to_string(),
            fmt_g17(v),
        ]);
    }
    t
}

/// Dense row-major matrix export.
pub fn matrix_table(entries: &nalgebra::DMatrix<f64>) -> Table {
    let mut t = Table::new((0..entries.ncols()).map(|j| format!("c{j}")));
    for i in 0..entries.nrows() {
        t.push(
            (0..entries.ncols())
                .map(|j| fmt_g17(entries[(i, j)]))
                .collect(),
        );
    }
    t
}

/// Edge list of a sampled network (`source` holds shares of `target`).
pub fn edges_table(net: &FiniteNetwork) -> Table {
    let mut t = Table::new(["source", "target"]);
    for i in 0..net.n() {
        for j in 0..net.n() {
            if net.edge(i, j) {
                t.push(vec![i.to_string(), j.to_string()]);
            }
        }
    }
    t
}

/// Graphon block summary used alongside cutoffs.
pub fn graphon_table(graphon: &BlockGraphon) -> Table {
    let m = graphon.m();
    let mut header = vec!["block".to_string(), "t_lo".to_string(), "t_hi".to_string()];
    header.extend((1..=m).map(|l| format!("T_{l}")));
    let mut t = Table::new(header);
    for k in 0..m {
        let (lo, hi) = graphon.interval(k);
        let mut row = vec![(k + 1).to_string(), fmt_g17(lo), fmt_g17(hi)];
        row.extend((0..m).map(|l| fmt_g17(graphon.cross_shares()[(k, l)])));
        t.push(row);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        assert_eq!(fmt_g17(0.5), "0.5");
        assert_eq!(fmt_g17(5.0 / 6.0), "0.83333333333333337");
        assert_eq!(fmt_g17(2.0), "2");
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(fmt_g17(1e20), "1e+20");
        assert_eq!(fmt_g17(-1.5), "-1.5");
        assert_eq!(fmt_g17(0.0), "0");
        assert_eq!(fmt_g17(123456.0), "123456");
    }

    #[test]
    fn g17_round_trips() {
        for x in [
            1.0 / 3.0,
            std::f64::consts::PI,
            1e-300,
            6.02e23,
            -7.0 / 15.0,
        ] {
            assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn atomic_write_with_comment() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut t = Table::new(["a", "b"]).with_comment("seeds=2");
        t.push(vec!["1".into(), fmt_g17(0.25)]);
        t.write_atomic(&path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, "# seeds=2\na,b\n1,0.25\n");
    }
}
