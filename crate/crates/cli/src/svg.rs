//! Deterministic SVG rendering of embedded trajectories: one polyline per
//! run with per-snapshot markers colored from red (first epoch) to blue
//! (last epoch).

use std::collections::BTreeMap;

use sgdpaths::equivalence::SnapshotId;

use crate::{CliError, CliResult};

pub struct PlotSpec {
    pub width: u32,
    pub height: u32,
}

const MARGIN: f64 = 50.0;
const MARKER_RADIUS: f64 = 3.0;

fn fmt_px(v: f64) -> String {
    format!("{v:.2}")
}

/// Red (fraction 0) to blue (fraction 1).
fn epoch_color(fraction: f64) -> String {
    let f = fraction.clamp(0.0, 1.0);
    let red = (255.0 * (1.0 - f)).round() as u8;
    let blue = (255.0 * f).round() as u8;
    format!("rgb({red},0,{blue})")
}

/// Render coordinates (first two columns) to a standalone SVG document.
/// An empty coordinate list yields a valid SVG with axes only.
pub fn render(points: &[(SnapshotId, Vec<f64>)], spec: &PlotSpec) -> CliResult<String> {
    if spec.width == 0 || spec.height == 0 {
        return Err(CliError::input("plot dimensions must be positive"));
    }
    for (id, coords) in points {
        if coords.len() < 2 {
            return Err(CliError::input(format!(
                "snapshot {id} has {} coordinates; plotting needs at least 2",
                coords.len()
            )));
        }
    }

    let w = f64::from(spec.width);
    let h = f64::from(spec.height);
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" \
         viewBox=\"0 0 {} {}\">\n",
        spec.width, spec.height, spec.width, spec.height
    ));
    svg.push_str(&format!(
        "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
        spec.width, spec.height
    ));
    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"#444\" stroke-width=\"1\"/>\n",
        m = fmt_px(MARGIN),
        b = fmt_px(h - MARGIN),
        r = fmt_px(w - MARGIN),
    ));
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"#444\" stroke-width=\"1\"/>\n",
        m = fmt_px(MARGIN),
        t = fmt_px(MARGIN),
        b = fmt_px(h - MARGIN),
    ));

    if !points.is_empty() {
        let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
        for (_, c) in points {
            min_x = min_x.min(c[0]);
            max_x = max_x.max(c[0]);
            min_y = min_y.min(c[1]);
            max_y = max_y.max(c[1]);
        }
        // 5% padding; degenerate spans widen to 1 so a single point lands
        // mid-plot.
        let pad = |lo: &mut f64, hi: &mut f64| {
            if *hi - *lo <= 0.0 {
                *lo -= 0.5;
                *hi += 0.5;
            }
            let span = *hi - *lo;
            *lo -= 0.05 * span;
            *hi += 0.05 * span;
        };
        pad(&mut min_x, &mut max_x);
        pad(&mut min_y, &mut max_y);

        let to_px_x = |v: f64| MARGIN + (v - min_x) / (max_x - min_x) * (w - 2.0 * MARGIN);
        let to_px_y = |v: f64| h - MARGIN - (v - min_y) / (max_y - min_y) * (h - 2.0 * MARGIN);

        let min_epoch = points.iter().map(|(id, _)| id.epoch).min().expect("non-empty");
        let max_epoch = points.iter().map(|(id, _)| id.epoch).max().expect("non-empty");
        let epoch_fraction = |epoch: u64| {
            if max_epoch == min_epoch {
                0.0
            } else {
                (epoch - min_epoch) as f64 / (max_epoch - min_epoch) as f64
            }
        };

        // Group by run; BTreeMap keeps output order independent of input
        // order.
        let mut runs: BTreeMap<u32, Vec<(u64, f64, f64)>> = BTreeMap::new();
        for (id, c) in points {
            runs.entry(id.run).or_default().push((id.epoch, c[0], c[1]));
        }
        for series in runs.values_mut() {
            series.sort_by_key(|(epoch, _, _)| *epoch);
        }

        for (run, series) in &runs {
            let path: Vec<String> = series
                .iter()
                .map(|(_, x, y)| format!("{},{}", fmt_px(to_px_x(*x)), fmt_px(to_px_y(*y))))
                .collect();
            svg.push_str(&format!(
                "<polyline data-run=\"{run}\" points=\"{}\" fill=\"none\" \
                 stroke=\"#999\" stroke-width=\"1\"/>\n",
                path.join(" ")
            ));
            for (epoch, x, y) in series {
                svg.push_str(&format!(
                    "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>\n",
                    fmt_px(to_px_x(*x)),
                    fmt_px(to_px_y(*y)),
                    MARKER_RADIUS,
                    epoch_color(epoch_fraction(*epoch)),
                ));
            }
        }
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_yields_axes_only_svg() {
        let svg = render(&[], &PlotSpec { width: 200, height: 100 }).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<line").count(), 2);
        assert!(!svg.contains("circle"));
    }

    #[test]
    fn endpoint_marker_colors_are_red_and_blue() {
        let points = vec![
            (SnapshotId::new(0, 0), vec![0.0, 0.0]),
            (SnapshotId::new(0, 1), vec![1.0, 1.0]),
        ];
        let svg = render(&points, &PlotSpec { width: 400, height: 300 }).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.contains("rgb(255,0,0)"), "first epoch must be red");
        assert!(svg.contains("rgb(0,0,255)"), "last epoch must be blue");
    }

    #[test]
    fn output_is_deterministic_and_order_independent() {
        let a = vec![
            (SnapshotId::new(0, 0), vec![0.0, 0.0]),
            (SnapshotId::new(1, 0), vec![1.0, 0.5]),
            (SnapshotId::new(0, 1), vec![0.5, 1.0]),
        ];
        let mut b = a.clone();
        b.reverse();
        let spec = PlotSpec { width: 300, height: 300 };
        assert_eq!(render(&a, &spec).unwrap(), render(&b, &spec).unwrap());
    }

    #[test]
    fn short_coordinate_rows_rejected() {
        let points = vec![(SnapshotId::new(0, 0), vec![1.0])];
        assert!(render(&points, &PlotSpec { width: 100, height: 100 }).is_err());
    }
}
