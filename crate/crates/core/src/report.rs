//! CSV tables and gnuplot scripts.
//!
//! Every table has a header row, `.` decimals and `\n` line ends. Floats are
//! written in shortest round-trip form, so identical inputs give
//! byte-identical files.
//!
//! | table | columns |
//! |---|---|
//! | trajectory | `t,y,S,I` |
//! | evolving frame | `t,x,S,I` with `x = ρ(t)·y` |
//! | period summary | `m,sup_I,L1_I,S_closure_defect` |
//! | disease-free orbit | `t,y,S` |
//! | eigenfunction | `t,y,Phi` |
//! | R0 report | `key,value` |
//! | sweep | `index,parameter,value,R0` |
//! | limit | `kind,parameter,R0,target,relative_gap` |
//! | stability | `name,R0,classification,predicted,agrees,sup_I_horizon,late_min_sup_I,extinction_period` |
//! | reproduction | `quantity,paper,computed,abs_gap,tolerance,pass` |

use crate::analysis::{LimitReport, StabilityVerdict, SweepTable};
use crate::model::{EvolutionRate, Grid1D, PeriodicOrbit};
use crate::pde::{PeriodSummary, Snapshot};
use crate::r0::{BoundsResult, LambdaStarConvention, R0Result};

struct Table(csv::Writer<Vec<u8>>);

impl Table {
    fn new(header: &[&str]) -> Self {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(header).expect("in-memory write");
        Self(w)
    }

    fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.0.write_record(fields).expect("in-memory write");
    }

    fn finish(self) -> String {
        String::from_utf8(self.0.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

/// Fixed-frame table from simulation snapshots.
pub fn trajectory_csv(snapshots: &[Snapshot], grid: &Grid1D) -> String {
    let mut t = Table::new(&["t", "y", "S", "I"]);
    for snap in snapshots {
        for (j, y) in grid.points().enumerate() {
            t.row([num(snap.t), num(y), num(snap.s[j]), num(snap.i[j])]);
        }
    }
    t.finish()
}

/// Snapshots pushed forward to the evolving domain.
pub fn evolving_frame_csv(snapshots: &[Snapshot], grid: &Grid1D, rho: &EvolutionRate) -> String {
    let mut t = Table::new(&["t", "x", "S", "I"]);
    for snap in snapshots {
        let r = rho.value(snap.t);
        for (j, y) in grid.points().enumerate() {
            t.row([num(snap.t), num(r * y), num(snap.s[j]), num(snap.i[j])]);
        }
    }
    t.finish()
}

pub fn period_summary_csv(periods: &[PeriodSummary]) -> String {
    let mut t = Table::new(&["m", "sup_I", "L1_I", "S_closure_defect"]);
    for p in periods {
        t.row([
            p.period.to_string(),
            num(p.sup_i),
            num(p.l1_i),
            num(p.s_closure_defect),
        ]);
    }
    t.finish()
}

fn orbit_csv(orbit: &PeriodicOrbit, grid: &Grid1D, value: &str, stride: usize) -> String {
    let mut t = Table::new(&["t", "y", value]);
    let stride = stride.max(1);
    for (m, (time, slice)) in orbit.times.iter().zip(&orbit.slices).enumerate() {
        if m % stride != 0 && m + 1 != orbit.slices.len() {
            continue;
        }
        for (j, y) in grid.points().enumerate() {
            t.row([num(*time), num(y), num(slice[j])]);
        }
    }
    t.finish()
}

/// Disease-free orbit, every `stride`-th time slice plus the last.
pub fn dfe_csv(orbit: &PeriodicOrbit, grid: &Grid1D, stride: usize) -> String {
    orbit_csv(orbit, grid, "S", stride)
}

pub fn eigenfunction_csv(orbit: &PeriodicOrbit, grid: &Grid1D, stride: usize) -> String {
    orbit_csv(orbit, grid, "Phi", stride)
}

/// Everything reported for one R0 computation.
#[derive(Debug, Clone)]
pub struct R0Summary {
    pub source: String,
    pub convention: LambdaStarConvention,
    pub result: R0Result,
    pub bounds: BoundsResult,
    /// `R0 = β̂/(λ*·mean ρ⁻²)`, when β is constant and γ separable.
    pub closed_form: Option<f64>,
    /// Floquet exponent of the threshold problem; has the sign of `1 − R0`.
    pub lambda0: f64,
    /// R0 from the backward (adjoint) period map, when computed.
    pub adjoint: Option<f64>,
}

impl R0Summary {
    /// R0 lies within the bounds (with relative slack 1e-9).
    pub fn within_bounds(&self) -> bool {
        let slack = 1e-9 * self.result.value.abs();
        self.result.value >= self.bounds.lower - slack
            && self.result.value <= self.bounds.upper + slack
    }

    pub fn sign_relation_holds(&self) -> bool {
        let r0 = self.result.value;
        (1.0 - r0).signum() == self.lambda0.signum() || (r0 - 1.0).abs() < 1e-8
    }
}

pub fn r0_report_csv(s: &R0Summary) -> String {
    let mut t = Table::new(&["key", "value"]);
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let rows: Vec<(&str, String)> = vec![
        ("source", s.source.clone()),
        ("lambda_star_convention", s.convention.as_str().to_string()),
        ("r0", num(s.result.value)),
        ("bracket_low", num(s.result.bracket.0)),
        ("bracket_high", num(s.result.bracket.1)),
        ("defect", num(s.result.defect)),
        ("iterations", s.result.iterations.to_string()),
        ("method", format!("{:?}", s.result.method).to_lowercase()),
        ("closed_form", opt(s.closed_form)),
        ("adjoint_r0", opt(s.adjoint)),
        ("bound_lower", num(s.bounds.lower)),
        ("bound_upper", num(s.bounds.upper)),
        ("int_min_beta", num(s.bounds.int_min_beta)),
        ("int_max_beta", num(s.bounds.int_max_beta)),
        ("int_min_gamma", num(s.bounds.int_min_gamma)),
        ("int_max_gamma", num(s.bounds.int_max_gamma)),
        ("within_bounds", s.within_bounds().to_string()),
        ("lambda0", num(s.lambda0)),
        ("sign_relation", s.sign_relation_holds().to_string()),
    ];
    for (k, v) in rows {
        t.row([k.to_string(), v]);
    }
    t.finish()
}

pub fn bounds_csv(source: &str, b: &BoundsResult) -> String {
    let mut t = Table::new(&[
        "source",
        "int_min_beta",
        "int_max_gamma",
        "lower",
        "int_max_beta",
        "int_min_gamma",
        "upper",
    ]);
    t.row([
        source.to_string(),
        num(b.int_min_beta),
        num(b.int_max_gamma),
        num(b.lower),
        num(b.int_max_beta),
        num(b.int_min_gamma),
        num(b.upper),
    ]);
    t.finish()
}

pub fn sweep_csv(table: &SweepTable) -> String {
    let mut t = Table::new(&["index", "parameter", "value", "R0"]);
    for (k, (v, r)) in table.values.iter().zip(&table.r0).enumerate() {
        t.row([
            k.to_string(),
            table.parameter.name().to_string(),
            num(*v),
            num(*r),
        ]);
    }
    t.finish()
}

/// One-line verdict record accompanying [`sweep_csv`].
pub fn sweep_verdict_csv(table: &SweepTable) -> String {
    let mut t = Table::new(&["parameter", "verdict", "expected", "passed"]);
    t.row([
        table.parameter.name().to_string(),
        table.verdict.to_string(),
        table
            .expected
            .as_ref()
            .map(|e| e.to_string())
            .unwrap_or_else(|| "none".into()),
        table.passed().to_string(),
    ]);
    t.finish()
}

pub fn limit_csv(reports: &[LimitReport]) -> String {
    let mut t = Table::new(&["kind", "parameter", "R0", "target", "relative_gap"]);
    for r in reports {
        for ((p, r0), gap) in r.samples.iter().zip(&r.gaps) {
            t.row([
                r.kind.name().to_string(),
                num(*p),
                num(*r0),
                num(r.target),
                num(*gap),
            ]);
        }
    }
    t.finish()
}

pub fn stability_csv(rows: &[(String, StabilityVerdict)]) -> String {
    let mut t = Table::new(&[
        "name",
        "R0",
        "classification",
        "predicted",
        "agrees",
        "sup_I_horizon",
        "late_min_sup_I",
        "extinction_period",
    ]);
    for (name, v) in rows {
        t.row([
            name.clone(),
            num(v.r0),
            v.classification.to_string(),
            v.predicted()
                .map(|p| p.to_string())
                .unwrap_or_else(|| "near-threshold".into()),
            v.agrees().map(|a| a.to_string()).unwrap_or_default(),
            num(v.decay_metric),
            num(v.persistence_floor),
            v.extinction_period
                .map(|p| p.to_string())
                .unwrap_or_default(),
        ]);
    }
    t.finish()
}

/// A computed quantity compared with a reference value.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub quantity: String,
    pub reference: f64,
    pub computed: f64,
    pub tolerance: f64,
}

impl Comparison {
    pub fn gap(&self) -> f64 {
        (self.computed - self.reference).abs()
    }

    pub fn passed(&self) -> bool {
        self.gap() <= self.tolerance
    }
}

pub fn comparison_csv(rows: &[Comparison]) -> String {
    let mut t = Table::new(&[
        "quantity",
        "paper",
        "computed",
        "abs_gap",
        "tolerance",
        "pass",
    ]);
    for c in rows {
        t.row([
            c.quantity.clone(),
            num(c.reference),
            num(c.computed),
            num(c.gap()),
            num(c.tolerance),
            c.passed().to_string(),
        ]);
    }
    t.finish()
}

/// gnuplot script plotting `sup_I` per period on a log scale.
pub fn sup_i_plot_script(summary_csv: &str, output_png: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set terminal pngcairo size 900,600\n\
         set output '{output_png}'\n\
         set logscale y\n\
         set xlabel 'period m'\n\
         set ylabel 'sup_y I'\n\
         plot '{summary_csv}' using 1:2 skip 1 with linespoints title 'sup I'\n"
    )
}

/// gnuplot script for a space-time surface of one column of a `t,<space>,S,I` table.
pub fn surface_plot_script(
    table_csv: &str,
    space_label: &str,
    column: usize,
    value: &str,
    output_png: &str,
) -> String {
    format!(
        "set datafile separator ','\n\
         set terminal pngcairo size 900,700\n\
         set output '{output_png}'\n\
         set xlabel '{space_label}'\n\
         set ylabel 't'\n\
         set title '{value}'\n\
         set view map\n\
         set dgrid3d 80,80\n\
         splot '{table_csv}' using 2:1:{column} skip 1 with pm3d notitle\n"
    )
}
