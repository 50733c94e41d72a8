//! CSV reports: `#`-prefixed metadata, a fixed header, one row per (parameter, resolution).

use std::fmt::Write as _;

pub const COLUMNS: [&str; 27] = [
    "scenario",
    "param",
    "phi",
    "across",
    "around",
    "dofs",
    "K",
    "L",
    "beta",
    "B",
    "m",
    "bound",
    "lambda1",
    "lambda2",
    "multiplicity",
    "residual",
    "iterations",
    "eps_disc",
    "ratio",
    "nu1",
    "energy",
    "norm2",
    "rayleigh",
    "limit",
    "pass_lower",
    "pass_upper",
    "runtime",
];

/// One spectrum computation. Unavailable quantities are NaN and inapplicable checks `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub scenario: String,
    /// Scenario parameter: ε, R, δ or b; NaN when the scenario has none.
    pub param: f64,
    pub phi: f64,
    pub across: usize,
    pub around: usize,
    pub dofs: usize,
    pub k: f64,
    pub l: f64,
    pub beta: f64,
    pub big_b: f64,
    pub m: f64,
    pub bound: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub multiplicity: usize,
    pub residual: f64,
    pub iterations: usize,
    pub eps_disc: f64,
    pub ratio: f64,
    pub nu1: f64,
    /// Numerator and denominator of the scenario's explicit test function.
    pub energy: f64,
    pub norm2: f64,
    pub rayleigh: f64,
    /// Closed-form value the scenario is compared with (ε/δ³, 2ε/C, the thin-annulus limit).
    pub limit: f64,
    pub pass_lower: Option<bool>,
    pub pass_upper: Option<bool>,
    pub runtime: f64,
}

impl Row {
    pub fn new(scenario: &str) -> Self {
        Row {
            scenario: scenario.into(),
            param: f64::NAN,
            phi: f64::NAN,
            across: 0,
            around: 0,
            dofs: 0,
            k: f64::NAN,
            l: f64::NAN,
            beta: f64::NAN,
            big_b: f64::NAN,
            m: f64::NAN,
            bound: f64::NAN,
            lambda1: f64::NAN,
            lambda2: f64::NAN,
            multiplicity: 0,
            residual: f64::NAN,
            iterations: 0,
            eps_disc: f64::NAN,
            ratio: f64::NAN,
            nu1: f64::NAN,
            energy: f64::NAN,
            norm2: f64::NAN,
            rayleigh: f64::NAN,
            limit: f64::NAN,
            pass_lower: None,
            pass_upper: None,
            runtime: 0.0,
        }
    }

    pub fn passes(&self) -> bool {
        self.pass_lower != Some(false) && self.pass_upper != Some(false)
    }

    fn write_csv(&self, out: &mut String) {
        let f = |x: f64| format!("{x:.16e}");
        let b = |x: Option<bool>| match x {
            Some(true) => "true",
            Some(false) => "false",
            None => "na",
        };
        let fields = [
            self.scenario.clone(),
            f(self.param),
            f(self.phi),
            self.across.to_string(),
            self.around.to_string(),
            self.dofs.to_string(),
            f(self.k),
            f(self.l),
            f(self.beta),
            f(self.big_b),
            f(self.m),
            f(self.bound),
            f(self.lambda1),
            f(self.lambda2),
            self.multiplicity.to_string(),
            f(self.residual),
            self.iterations.to_string(),
            f(self.eps_disc),
            f(self.ratio),
            f(self.nu1),
            f(self.energy),
            f(self.norm2),
            f(self.rayleigh),
            f(self.limit),
            b(self.pass_lower).into(),
            b(self.pass_upper).into(),
            f(self.runtime),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub meta: Vec<(String, String)>,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.into(), value.to_string()));
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(Row::passes)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out.push_str(&COLUMNS.join(","));
        out.push('\n');
        for row in &self.rows {
            row.write_csv(&mut out);
        }
        out
    }

    /// Gnuplot script plotting `lambda1` and `bound` (and `nu1` when present) against `x`.
    pub fn gnuplot(&self, csv_path: &str, x: &str) -> String {
        let col = |name: &str| COLUMNS.iter().position(|c| *c == name).expect("known column") + 1;
        let mut s = String::new();
        let _ = writeln!(s, "set datafile separator ','");
        let _ = writeln!(s, "set datafile commentschars '#'");
        let _ = writeln!(s, "set key autotitle columnhead");
        let _ = writeln!(s, "set xlabel '{x}'");
        let _ = writeln!(s, "set ylabel 'eigenvalue'");
        let _ = writeln!(s, "set grid");
        let mut plots = vec![
            format!("'{csv_path}' using {}:{} with linespoints title 'lambda1'", col(x), col("lambda1")),
            format!("'{csv_path}' using {}:{} with lines title 'lower bound'", col(x), col("bound")),
        ];
        if self.rows.iter().any(|r| r.nu1.is_finite()) {
            plots.push(format!("'{csv_path}' using {}:{} with linespoints title 'nu1'", col(x), col("nu1")));
        }
        let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
        s
    }
}
