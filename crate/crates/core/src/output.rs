//! Deterministic artifact writers: CSV with 17 significant digits and
//! minimal native SVG line plots.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::dynamics::Trajectory;
use crate::spectral::Domain;

/// Fixed scientific format: 1 + 16 digits, so every f64 round-trips.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Generic numeric table.
pub fn write_table_csv<W: Write>(mut w: W, headers: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
    writeln!(w, "{}", headers.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Long format: one line per (snapshot, grid point, component).
pub fn write_trajectory_csv<W: Write>(mut w: W, domain: &Domain, traj: &Trajectory) -> io::Result<()> {
    let d = domain.dim();
    let mut header = vec!["t".to_string()];
    header.extend((0..d).map(|a| format!("i{a}")));
    header.push("comp".into());
    header.push("value".into());
    writeln!(w, "{}", header.join(","))?;
    let mut line = String::new();
    for (t, state) in traj.times.iter().zip(&traj.states) {
        let t = fmt_f64(*t);
        for (p, y) in state.u.points().enumerate() {
            let idx = domain.multi_index(p);
            for (c, value) in y.iter().enumerate() {
                line.clear();
                line.push_str(&t);
                for i in &idx[..d] {
                    let _ = write!(line, ",{i}");
                }
                let _ = write!(line, ",{c},{}", fmt_f64(*value));
                writeln!(w, "{line}")?;
            }
        }
    }
    Ok(())
}

pub fn write_energy_csv<W: Write>(w: W, traj: &Trajectory) -> io::Result<()> {
    let rows: Vec<Vec<f64>> = traj
        .times
        .iter()
        .zip(&traj.energies)
        .map(|(&t, e)| vec![t, e.kinetic, e.elastic, e.adhesive, e.total])
        .collect();
    write_table_csv(w, &["t", "kinetic", "elastic", "adhesive", "total"], &rows)
}

/// One row of an ε study. `l2_cauchy_dist` compares with the previous
/// (larger) ε and is NaN on the first row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonRow {
    pub eps: f64,
    pub sup_w_dist: f64,
    pub sup_grad_dist: f64,
    pub l2_cauchy_dist: f64,
}

pub fn write_epsilon_csv<W: Write>(w: W, rows: &[EpsilonRow]) -> io::Result<()> {
    let rows: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| vec![r.eps, r.sup_w_dist, r.sup_grad_dist, r.l2_cauchy_dist])
        .collect();
    write_table_csv(w, &["eps", "sup_W_dist", "sup_grad_dist", "l2_cauchy_dist"], &rows)
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 60.0;

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Line plot with linear or log₁₀ axes and an optional dashed horizontal
/// threshold line.
#[derive(Debug, Clone, Default)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub threshold: Option<f64>,
    pub log_x: bool,
    pub log_y: bool,
}

impl LinePlot {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        LinePlot {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            ..Default::default()
        }
    }

    pub fn with_series(mut self, label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        self.series.push(Series {
            label: label.into(),
            points,
        });
        self
    }

    pub fn with_threshold(mut self, y: f64) -> Self {
        self.threshold = Some(y);
        self
    }

    pub fn log_axes(mut self, log_x: bool, log_y: bool) -> Self {
        self.log_x = log_x;
        self.log_y = log_y;
        self
    }

    fn tx(&self, x: f64) -> Option<f64> {
        let x = if self.log_x { x.log10() } else { x };
        x.is_finite().then_some(x)
    }

    fn ty(&self, y: f64) -> Option<f64> {
        let y = if self.log_y { y.log10() } else { y };
        y.is_finite().then_some(y)
    }

    pub fn render(&self) -> String {
        let mut pts: Vec<(f64, f64)> = Vec::new();
        for s in &self.series {
            pts.extend(s.points.iter().filter_map(|&(x, y)| Some((self.tx(x)?, self.ty(y)?))));
        }
        let threshold = self.threshold.and_then(|y| self.ty(y));
        let (mut x0, mut x1) = min_max(pts.iter().map(|p| p.0));
        let (mut y0, mut y1) = min_max(pts.iter().map(|p| p.1).chain(threshold));
        widen(&mut x0, &mut x1);
        widen(&mut y0, &mut y1);
        let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
        let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
        let _ = writeln!(
            svg,
            r#"<path d="M{l} {t} L{l} {b} L{r} {b}" fill="none" stroke="black"/>"#
        );
        for (i, frac) in [0.0, 0.5, 1.0].iter().enumerate() {
            let xv = x0 + frac * (x1 - x0);
            let yv = y0 + frac * (y1 - y0);
            let anchor = ["start", "middle", "end"][i];
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{}" text-anchor="{anchor}">{}</text>"#,
                px(xv),
                b + 16.0,
                tick(xv, self.log_x)
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
                l - 4.0,
                py(yv) + 4.0,
                tick(yv, self.log_y)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 16.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        if let Some(y) = threshold {
            let _ = writeln!(
                svg,
                r##"<line x1="{l}" y1="{0:.2}" x2="{r}" y2="{0:.2}" stroke="#444444" stroke-dasharray="6 4"/>"##,
                py(y)
            );
        }
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let mut d = String::new();
            for (x, y) in s.points.iter().filter_map(|&(x, y)| Some((self.tx(x)?, self.ty(y)?))) {
                let _ = write!(d, "{}{:.2} {:.2} ", if d.is_empty() { "M" } else { "L" }, px(x), py(y));
            }
            if !d.is_empty() {
                let _ = writeln!(
                    svg,
                    r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                    d.trim_end()
                );
            }
            let ly = t + 16.0 * i as f64;
            let _ = writeln!(
                svg,
                r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
                r - 140.0,
                r - 120.0,
                r - 115.0,
                ly + 4.0,
                escape(&s.label)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn widen(lo: &mut f64, hi: &mut f64) {
    if !lo.is_finite() || !hi.is_finite() {
        *lo = 0.0;
        *hi = 1.0;
    } else if *hi - *lo <= 1e-12 * lo.abs().max(hi.abs()).max(1e-300) {
        let pad = if *lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
        *lo -= pad;
        *hi += pad;
    }
}

fn tick(v: f64, log: bool) -> String {
    if log {
        format!("1e{v:.1}")
    } else {
        format!("{v:.3e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{EnergyBreakdown, FieldState};
    use crate::spectral::Field;

    #[test]
    fn csv_numbers_round_trip() {
        for &x in &[0.1, 1.0 / 3.0, -2.5e-300, 123456.789, f64::MIN_POSITIVE] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn trajectory_and_energy_schemas() {
        let dom = Domain::periodic(1.0, vec![1.0, 1.0], vec![2, 2]).unwrap();
        let u = Field::from_fn(&dom, 2, |x, o| {
            o[0] = x[0];
            o[1] = x[1];
        });
        let traj = Trajectory {
            times: vec![0.0],
            states: vec![FieldState {
                u: u.clone(),
                v: u,
                t: 0.0,
            }],
            energies: vec![EnergyBreakdown::new(1.0, 2.0, 3.0)],
            dt: 0.1,
            steps: 0,
        };
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &dom, &traj).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,i0,i1,comp,value");
        assert_eq!(lines.len(), 1 + 4 * 2);
        assert!(lines.iter().skip(1).all(|l| l.split(',').count() == 5));

        let mut buf = Vec::new();
        write_energy_csv(&mut buf, &traj).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,kinetic,elastic,adhesive,total\n"));
        assert!(text.contains("6.0000000000000000e0"));
    }

    #[test]
    fn epsilon_schema() {
        let mut buf = Vec::new();
        let row = EpsilonRow {
            eps: 0.1,
            sup_w_dist: 0.05,
            sup_grad_dist: 0.1,
            l2_cauchy_dist: f64::NAN,
        };
        write_epsilon_csv(&mut buf, &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("eps,sup_W_dist,sup_grad_dist,l2_cauchy_dist\n"));
        assert!(text.trim_end().ends_with("NaN"));
    }

    #[test]
    fn svg_is_deterministic_and_well_formed() {
        let plot = LinePlot::new("max |u|", "t", "value")
            .with_series("run", vec![(0.0, 0.1), (1.0, 0.3), (2.0, f64::NAN)])
            .with_threshold(1.0);
        let a = plot.render();
        assert_eq!(a, plot.render());
        assert!(a.starts_with("<svg") && a.trim_end().ends_with("</svg>"));
        assert!(a.contains("stroke-dasharray"));
        assert!(!a.contains("NaN"));
        // empty and log plots still render
        let empty = LinePlot::new("", "", "").log_axes(true, true).render();
        assert!(empty.contains("</svg>"));
    }
}
