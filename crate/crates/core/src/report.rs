//! SVG layout frames and a self-contained HTML report.
//!
//! Drawing convention: origin at the bottom-left, the open front (max Y)
//! at the top of the picture.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geometry::{Footprint, TOL};
use crate::model::{CostBreakdown, Instance, Solution};
use crate::validator::validate;

const SCALE: f64 = 8.0;
const MARGIN: f64 = 24.0;
const STATIC: &str = "#2f6fdb";
const ARRIVING: &str = "#2e9e44";
const DEPARTING: &str = "#d23c3c";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameStatus {
    Static,
    /// Rolls in at this frame's time.
    Arriving,
    /// Rolls out at this frame's time.
    PreDeparture,
}

impl FrameStatus {
    fn color(self) -> &'static str {
        match self {
            FrameStatus::Static => STATIC,
            FrameStatus::Arriving => ARRIVING,
            FrameStatus::PreDeparture => DEPARTING,
        }
    }

    fn name(self) -> &'static str {
        match self {
            FrameStatus::Static => "static",
            FrameStatus::Arriving => "arriving",
            FrameStatus::PreDeparture => "pre-departure",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parked {
    pub id: String,
    pub rect: Footprint,
    pub status: FrameStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameSpec {
    pub time: f64,
    pub parked: Vec<Parked>,
}

/// Frames at t = 0 and at every distinct movement time of the plan.
pub fn frames(instance: &Instance, solution: &Solution) -> Result<Vec<FrameSpec>> {
    let report = validate(instance, solution)?;
    if !report.feasible {
        return Err(Error::InfeasibleSolution(Box::new(report)));
    }
    let rows = solution.aligned(instance)?;
    let mut times = vec![0.0];
    for (spec, a) in rows.iter().filter(|(_, a)| a.accept) {
        if !spec.is_current() {
            times.push(a.roll_in);
        }
        times.push(a.roll_out);
    }
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() <= TOL);

    Ok(times
        .into_iter()
        .map(|t| {
            let parked = rows
                .iter()
                .filter(|(_, a)| a.accept)
                .filter_map(|(spec, a)| {
                    let current = spec.is_current();
                    let arriving = !current && (a.roll_in - t).abs() <= TOL;
                    let leaving = (a.roll_out - t).abs() <= TOL;
                    let inside = (current || a.roll_in < t) && t < a.roll_out;
                    let status = if arriving {
                        FrameStatus::Arriving
                    } else if leaving {
                        FrameStatus::PreDeparture
                    } else if inside {
                        FrameStatus::Static
                    } else {
                        return None;
                    };
                    Some(Parked { id: spec.id.clone(), rect: a.footprint(spec), status })
                })
                .collect();
            FrameSpec { time: t, parked }
        })
        .collect())
}

pub fn frame_file_name(k: usize, time: f64) -> String {
    format!("frame_{k:02}_{time:.2}.svg")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// One frame as an SVG 1.1 document.
pub fn frame_svg(instance: &Instance, frame: &FrameSpec) -> String {
    let h = &instance.hangar;
    let (w, l) = (h.hw * SCALE, h.hl * SCALE);
    let px = |x: f64| MARGIN + x * SCALE;
    let py = |y: f64| MARGIN + (h.hl - y) * SCALE;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.2}" height="{:.2}" viewBox="0 0 {:.2} {:.2}">"#,
        w + 2.0 * MARGIN,
        l + 2.0 * MARGIN + 16.0,
        w + 2.0 * MARGIN,
        l + 2.0 * MARGIN + 16.0
    );
    let _ = writeln!(s, r#"<title>t = {:.2} h</title>"#, frame.time);
    let _ = writeln!(
        s,
        r##"<rect class="hangar" x="{:.2}" y="{:.2}" width="{w:.2}" height="{l:.2}" fill="#f7f7f4" stroke="#333" stroke-width="2"/>"##,
        px(0.0),
        py(h.hl)
    );
    let _ = writeln!(
        s,
        r##"<line class="exit" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#f0a020" stroke-width="4" stroke-dasharray="10 6"/>"##,
        px(0.0),
        py(h.hl),
        px(h.hw),
        py(h.hl)
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">exit</text>"#,
        px(h.hw / 2.0),
        py(h.hl) - 6.0
    );
    let half = h.buffer / 2.0;
    for p in &frame.parked {
        let r = &p.rect;
        let color = p.status.color();
        let _ = writeln!(
            s,
            r#"<rect class="halo" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{color}" fill-opacity="0.12" stroke="{color}" stroke-dasharray="4 3"/>"#,
            px(r.x - half),
            py(r.y + r.l + half),
            (r.w + h.buffer) * SCALE,
            (r.l + h.buffer) * SCALE
        );
        let _ = writeln!(
            s,
            r#"<rect class="aircraft {}" data-id="{}" data-x="{:.2}" data-y="{:.2}" data-w="{:.2}" data-l="{:.2}" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{color}" fill-opacity="0.55" stroke="{color}"/>"#,
            p.status.name(),
            escape(&p.id),
            r.x,
            r.y,
            r.w,
            r.l,
            px(r.x),
            py(r.y + r.l),
            r.w * SCALE,
            r.l * SCALE
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            px(r.x + r.w / 2.0),
            py(r.y + r.l / 2.0) + 4.0,
            escape(&p.id)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="13">t = {:.2} h</text>"#,
        MARGIN,
        l + 2.0 * MARGIN + 8.0,
        frame.time
    );
    s.push_str("</svg>\n");
    s
}

/// Writes one SVG per frame into `out_dir` and returns the paths in
/// frame order.
pub fn render_frames(instance: &Instance, solution: &Solution, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let frames = frames(instance, solution)?;
    fs::create_dir_all(out_dir).map_err(|source| Error::Io { path: out_dir.to_path_buf(), source })?;
    let mut paths = Vec::with_capacity(frames.len());
    for (k, f) in frames.iter().enumerate() {
        let path = out_dir.join(frame_file_name(k, f.time));
        fs::write(&path, frame_svg(instance, f)).map_err(|source| Error::Io { path: path.clone(), source })?;
        paths.push(path);
    }
    Ok(paths)
}

fn gantt_svg(instance: &Instance, solution: &Solution) -> Result<String> {
    let rows: Vec<_> = solution.aligned(instance)?.into_iter().filter(|(_, a)| a.accept).collect();
    let end = rows.iter().map(|(_, a)| a.roll_out).fold(1.0, f64::max);
    let (label_w, plot_w, row_h) = (90.0, 720.0, 22.0);
    let tx = |t: f64| label_w + t / end * plot_w;
    let height = row_h * rows.len() as f64 + 40.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.2}" height="{height:.2}" viewBox="0 0 {:.2} {height:.2}">"#,
        label_w + plot_w + 20.0,
        label_w + plot_w + 20.0
    );
    for (k, (spec, a)) in rows.iter().enumerate() {
        let y = 10.0 + k as f64 * row_h;
        let start = if spec.is_current() { 0.0 } else { a.roll_in };
        let color = if spec.is_current() { STATIC } else { ARRIVING };
        let _ = writeln!(
            s,
            r#"<text x="4" y="{:.2}" font-family="sans-serif" font-size="12">{}</text>"#,
            y + 14.0,
            escape(&spec.id)
        );
        let _ = writeln!(
            s,
            r#"<rect class="bar" data-id="{}" data-in="{start:.2}" data-out="{:.2}" x="{:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{color}" fill-opacity="0.7"/>"#,
            escape(&spec.id),
            a.roll_out,
            tx(start),
            (tx(a.roll_out) - tx(start)).max(1.0),
            row_h - 6.0
        );
        if !spec.is_current() && spec.etd > a.roll_in {
            let _ = writeln!(
                s,
                r#"<line class="etd" x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{:.2}" stroke="{DEPARTING}" stroke-width="2"/>"#,
                tx(spec.etd.min(end)),
                tx(spec.etd.min(end)),
                y + row_h - 6.0
            );
        }
    }
    let axis_y = 10.0 + rows.len() as f64 * row_h + 4.0;
    let _ = writeln!(
        s,
        r##"<line x1="{label_w:.2}" y1="{axis_y:.2}" x2="{:.2}" y2="{axis_y:.2}" stroke="#333"/>"##,
        label_w + plot_w
    );
    for k in 0..=4 {
        let t = end * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{t:.1} h</text>"#,
            tx(t),
            axis_y + 16.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// The HTML report as a string. Frames are embedded only for feasible
/// plans.
pub fn report_html(instance: &Instance, solution: &Solution, cost: &CostBreakdown) -> Result<String> {
    let rows = solution.aligned(instance)?;
    let mut s = String::new();
    s.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    let _ = writeln!(s, "<title>Hangar plan {}</title>", escape(&instance.label));
    s.push_str(
        "<style>\nbody{font-family:sans-serif;margin:24px;color:#222}\n\
         table{border-collapse:collapse;margin-bottom:20px}\n\
         td,th{border:1px solid #bbb;padding:3px 8px;text-align:right}\n\
         th{background:#eee}\ntd:first-child,th:first-child{text-align:left}\n\
         .frames{display:flex;flex-wrap:wrap;gap:12px}\n.frames figure{margin:0}\n</style>\n</head>\n<body>\n",
    );
    let _ = writeln!(s, "<h1>Hangar plan {}</h1>", escape(&instance.label));
    let _ = writeln!(
        s,
        "<p>Hangar {:.2} m &times; {:.2} m, buffer {:.2} m. Provenance: {:?}.</p>",
        instance.hangar.hw, instance.hangar.hl, instance.hangar.buffer, solution.provenance
    );

    s.push_str("<h2>Cost</h2>\n<table class=\"cost\">\n<tr><th>Term</th><th>Value</th></tr>\n");
    for (name, v) in [
        ("Rejection", cost.rejection),
        ("Arrival delay", cost.arrival_delay),
        ("Departure delay", cost.departure_delay),
        ("Positioning", cost.positioning),
        ("Total", cost.total),
    ] {
        let _ = writeln!(s, "<tr><td>{name}</td><td>{v:.4}</td></tr>");
    }
    s.push_str("</table>\n");

    s.push_str(
        "<h2>Accepted</h2>\n<table class=\"accepted\">\n<tr><th>Aircraft</th><th>Kind</th><th>X</th><th>Y</th>\
         <th>Roll-in</th><th>Roll-out</th><th>Arrival delay</th><th>Departure delay</th></tr>\n",
    );
    for (spec, a) in rows.iter().filter(|(_, a)| a.accept) {
        let kind = if spec.is_current() { "current" } else { "future" };
        let _ = writeln!(
            s,
            "<tr><td>{}</td><td>{kind}</td><td>{:.2}</td><td>{:.2}</td><td>{:.2}</td><td>{:.2}</td><td>{:.2}</td><td>{:.2}</td></tr>",
            escape(&spec.id),
            a.x,
            a.y,
            a.roll_in,
            a.roll_out,
            a.d_arr,
            a.d_dep
        );
    }
    s.push_str("</table>\n");

    s.push_str("<h2>Rejected</h2>\n<table class=\"rejected\">\n<tr><th>Aircraft</th><th>Rejection penalty</th></tr>\n");
    for (spec, _) in rows.iter().filter(|(_, a)| !a.accept) {
        let _ = writeln!(s, "<tr><td>{}</td><td>{:.2}</td></tr>", escape(&spec.id), spec.rejection_penalty());
    }
    s.push_str("</table>\n");

    s.push_str("<h2>Timeline</h2>\n");
    s.push_str(&gantt_svg(instance, solution)?);

    s.push_str("<h2>Layout</h2>\n");
    match frames(instance, solution) {
        Ok(frames) => {
            s.push_str("<div class=\"frames\">\n");
            for f in &frames {
                let _ = writeln!(s, "<figure>\n{}<figcaption>t = {:.2} h</figcaption>\n</figure>", frame_svg(instance, f), f.time);
            }
            s.push_str("</div>\n");
        }
        Err(Error::InfeasibleSolution(r)) => {
            let _ = writeln!(s, "<p>Layout frames omitted: the plan has {} violation(s).</p>", r.violations.len());
        }
        Err(e) => return Err(e),
    }
    s.push_str("</body>\n</html>\n");
    Ok(s)
}

pub fn render_report(instance: &Instance, solution: &Solution, cost: &CostBreakdown, out_file: &Path) -> Result<()> {
    let html = report_html(instance, solution, cost)?;
    if let Some(dir) = out_file.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    }
    fs::write(out_file, html).map_err(|source| Error::Io { path: out_file.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AircraftSpec, Assignment, HangarConfig, Provenance};

    fn one() -> (Instance, Solution) {
        let f = AircraftSpec::future("f1", 30.0, 30.0, 10.0, 200.0, 100.0, 1000.0, 10.0, 20.0);
        let a = Assignment::accepted(&f, 5.0, 5.0, 10.0, 110.0);
        let i = Instance { hangar: HangarConfig::default(), current: vec![], future: vec![f], label: "one".into() };
        let s = Solution { instance_label: "one".into(), assignments: vec![a], provenance: Provenance::Manual };
        (i, s)
    }

    #[test]
    fn empty_instance_single_frame() {
        let i = Instance { hangar: HangarConfig::default(), current: vec![], future: vec![], label: "e".into() };
        let s = Solution { instance_label: "e".into(), assignments: vec![], provenance: Provenance::Manual };
        let f = frames(&i, &s).unwrap();
        assert_eq!(f.len(), 1);
        assert!(f[0].parked.is_empty());
    }

    #[test]
    fn one_aircraft_three_frames() {
        let (i, s) = one();
        let f = frames(&i, &s).unwrap();
        assert_eq!(f.iter().map(|f| f.time).collect::<Vec<_>>(), vec![0.0, 10.0, 110.0]);
        assert!(f[0].parked.is_empty());
        assert_eq!(f[1].parked[0].status, FrameStatus::Arriving);
        assert_eq!(f[2].parked[0].status, FrameStatus::PreDeparture);
        assert_eq!(frame_file_name(2, 110.0), "frame_02_110.00.svg");
    }

    #[test]
    fn svg_flips_y_and_keeps_data() {
        let (i, s) = one();
        let svg = frame_svg(&i, &frames(&i, &s).unwrap()[1]);
        assert!(svg.contains(r#"data-x="5.00" data-y="5.00" data-w="30.00" data-l="30.00""#));
        // y = 5 with length 30 ends at 35; top edge of the picture is hl = 60.
        assert!(svg.contains(&format!(r#"y="{:.2}""#, MARGIN + 25.0 * SCALE)));
        assert!(svg.contains(r#"class="exit""#));
    }

    #[test]
    fn infeasible_plan_has_no_frames_but_a_report() {
        let (i, mut s) = one();
        s.assignments[0].x = 50.0;
        assert!(matches!(frames(&i, &s), Err(Error::InfeasibleSolution(_))));
        let cost = crate::cost::evaluate_cost(&i, &s).unwrap();
        let html = report_html(&i, &s, &cost).unwrap();
        assert!(html.contains("Layout frames omitted"));
    }
}
