//! Artifact files: trajectory CSV with a JSON sidecar, pretty JSON, and a
//! minimal SVG line chart.
//!
//! CSV layout is `n,x_1,...,x_N`; floats use the shortest decimal that
//! parses back to the same double.

use crate::dynamics::{State, Trajectory, TrajectoryMeta};
use crate::error::{Error, Result};
use crate::SCHEMA_VERSION;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

/// Shortest round-trip decimal, switching to exponent form when shorter.
pub fn format_f64(v: f64) -> String {
    let plain = v.to_string();
    let exp = format!("{v:e}");
    if exp.len() < plain.len() {
        exp
    } else {
        plain
    }
}

pub fn write_states_csv<W: Write>(states: &[State], out: W) -> Result<()> {
    let n = states.first().map_or(0, |s| s.x.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["n".to_string()];
    header.extend((1..=n).map(|i| format!("x_{i}")));
    w.write_record(&header)?;
    let mut row = Vec::with_capacity(n + 1);
    for s in states {
        row.clear();
        row.push(s.n.to_string());
        row.extend(s.x.iter().map(|v| format_f64(*v)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_states_csv<R: Read>(input: R) -> Result<Vec<State>> {
    let mut r = csv::Reader::from_reader(input);
    let width = r.headers()?.len();
    if width < 2 {
        return Err(Error::InvalidConfig(
            "trajectory CSV needs n and at least one coordinate".into(),
        ));
    }
    let mut states = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let parse_err = |field: &str| Error::InvalidConfig(format!("bad CSV field `{field}`"));
        let n = rec[0].parse::<u64>().map_err(|_| parse_err(&rec[0]))?;
        let x = rec
            .iter()
            .skip(1)
            .map(|f| f.parse::<f64>().map_err(|_| parse_err(f)))
            .collect::<Result<Vec<_>>>()?;
        states.push(State { n, x });
    }
    Ok(states)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Sidecar {
    schema_version: u32,
    meta: TrajectoryMeta,
    min_coordinate: f64,
}

/// `t.csv` → `t.csv.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    let mut s = csv_path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes the CSV and its metadata sidecar.
pub fn write_trajectory(traj: &Trajectory, csv_path: &Path) -> Result<()> {
    write_states_csv(&traj.states, std::io::BufWriter::new(std::fs::File::create(csv_path)?))?;
    write_json(
        &sidecar_path(csv_path),
        &Sidecar {
            schema_version: SCHEMA_VERSION,
            meta: traj.meta.clone(),
            min_coordinate: traj.min_coordinate,
        },
    )
}

pub fn read_trajectory(csv_path: &Path) -> Result<Trajectory> {
    let states = read_states_csv(std::io::BufReader::new(std::fs::File::open(csv_path)?))?;
    let side: Sidecar = read_json(&sidecar_path(csv_path))?;
    Ok(Trajectory {
        meta: side.meta,
        states,
        min_coordinate: side.min_coordinate,
    })
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json_string(value)?)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Coordinates against recorded index, one polyline per player.
pub fn trajectory_svg(traj: &Trajectory) -> String {
    let (w, h, pad) = (640.0, 400.0, 40.0);
    let states = &traj.states;
    let dim = traj.dim();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let ymax = states
        .iter()
        .flat_map(|s| s.x.iter().copied())
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max)
        .max(1e-12);
    let last = states.len().saturating_sub(1).max(1) as f64;
    let _ = writeln!(
        svg,
        r#"<path d="M{pad} {pad} V{} H{}" stroke="black" fill="none"/>"#,
        h - pad,
        w - pad
    );
    let _ = writeln!(
        svg,
        r#"<text x="{pad}" y="{}" font-size="12">{ymax:.3}</text>"#,
        pad - 8.0
    );
    for i in 0..dim {
        let mut pts = String::new();
        for (k, s) in states.iter().enumerate() {
            let px = pad + (w - 2.0 * pad) * k as f64 / last;
            let py = h - pad - (h - 2.0 * pad) * s.x[i] / ymax;
            let _ = write!(pts, "{px:.2},{py:.2} ");
        }
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" stroke="{}" fill="none"/>"#,
            pts.trim_end(),
            PALETTE[i % PALETTE.len()]
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="12" fill="{}">x_{}</text>"#,
            w - pad + 4.0,
            pad + 14.0 * i as f64,
            PALETTE[i % PALETTE.len()],
            i + 1
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_svg(traj: &Trajectory, path: &Path) -> Result<()> {
    std::fs::write(path, trajectory_svg(traj))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::TrajectoryKind;

    fn sample() -> Trajectory {
        Trajectory {
            meta: TrajectoryMeta {
                game: "g".into(),
                kind: TrajectoryKind::Dgap,
                config: serde_json::json!({"k": 1}),
            },
            states: vec![
                State {
                    n: 0,
                    x: vec![0.1, 1.0 / 3.0],
                },
                State {
                    n: 5,
                    x: vec![std::f64::consts::PI, 1e-300],
                },
            ],
            min_coordinate: 1e-300,
        }
    }

    #[test]
    fn float_format_is_short_and_exact() {
        for v in [0.0, 1.0, 0.1, 1e-300, 1.5e20, 123456.789, -2.5e-7, f64::MIN_POSITIVE] {
            let s = format_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            assert!(s.len() <= v.to_string().len());
        }
        assert_eq!(format_f64(1e-300), "1e-300");
        assert_eq!(format_f64(0.25), "0.25");
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_states_csv(&sample().states, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "n,x_1,x_2\n0,0.1,0.3333333333333333\n5,3.141592653589793,1e-300\n"
        );
    }

    #[test]
    fn round_trip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let t = sample();
        write_trajectory(&t, &path).unwrap();
        assert_eq!(read_trajectory(&path).unwrap(), t);
    }

    #[test]
    fn malformed_csv_is_an_error() {
        assert!(read_states_csv("n,x_1\n0,abc\n".as_bytes()).is_err());
        assert!(read_states_csv("n\n0\n".as_bytes()).is_err());
    }

    #[test]
    fn svg_has_one_line_per_player() {
        let svg = trajectory_svg(&sample());
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }
}
