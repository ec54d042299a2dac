//! Run results and their CSV / JSON / gnuplot serializations.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavepacket::{write_frames_csv, WavepacketFrame};

/// One named scalar time series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub t: Vec<f64>,
    pub values: Vec<f64>,
}

impl Series {
    pub fn new(name: impl Into<String>, t: Vec<f64>, values: Vec<f64>) -> Self {
        Self { name: name.into(), t, values }
    }
}

/// A named stack of density frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameStack {
    pub name: String,
    pub frames: Vec<WavepacketFrame>,
}

/// Everything a figure or scenario run produces.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunOutput {
    pub id: String,
    pub series: Vec<Series>,
    pub stacks: Vec<FrameStack>,
    pub summary: BTreeMap<String, f64>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl RunOutput {
    pub fn new(id: impl Into<String>) -> Self {
        Self { id: id.into(), ..Self::default() }
    }

    pub fn series(&self, name: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.name == name)
    }

    pub fn stack(&self, name: &str) -> Option<&FrameStack> {
        self.stacks.iter().find(|s| s.name == name)
    }

    pub fn scalar(&self, name: &str) -> Option<f64> {
        self.summary.get(name).copied()
    }

    pub(crate) fn put(&mut self, name: &str, v: f64) {
        self.summary.insert(name.to_string(), v);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Long-format CSV `t,observable,value`.
pub fn write_series_csv<W: Write>(series: &[Series], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "observable", "value"])?;
    for s in series {
        for (t, v) in s.t.iter().zip(&s.values) {
            w.write_record([t.to_string().as_str(), &s.name, &v.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_series_csv`]; series keep their first-seen order.
pub fn read_series_csv<R: std::io::Read>(input: R) -> Result<Vec<Series>> {
    let mut r = csv::Reader::from_reader(input);
    let mut out: Vec<Series> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let bad = || Error::Config(format!("malformed series row {rec:?}"));
        let t: f64 = rec.get(0).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let name = rec.get(1).ok_or_else(bad)?;
        let v: f64 = rec.get(2).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        match out.iter_mut().find(|s| s.name == name) {
            Some(s) => {
                s.t.push(t);
                s.values.push(v);
            }
            None => out.push(Series::new(name, vec![t], vec![v])),
        }
    }
    Ok(out)
}

fn write_summary_csv<W: Write>(summary: &BTreeMap<String, f64>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["quantity", "value"])?;
    for (k, v) in summary {
        w.write_record([k.as_str(), &v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn create(path: &Path) -> Result<std::io::BufWriter<fs::File>> {
    Ok(std::io::BufWriter::new(fs::File::create(path)?))
}

/// Write a run into `dir`; returns the created paths.
pub fn write_output(run: &RunOutput, dir: &Path, format: Format, gnuplot: bool) -> Result<Vec<PathBuf>> {
    if gnuplot && format != Format::Csv {
        return Err(Error::Config("--gnuplot scripts read CSV files; use --format csv".into()));
    }
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    match format {
        Format::Json => {
            let p = dir.join(format!("{}.json", run.id));
            let mut f = create(&p)?;
            serde_json::to_writer_pretty(&mut f, run)?;
            f.write_all(b"\n")?;
            f.flush()?;
            written.push(p);
        }
        Format::Csv => {
            if !run.series.is_empty() {
                let p = dir.join(format!("{}_series.csv", run.id));
                write_series_csv(&run.series, create(&p)?)?;
                written.push(p);
            }
            for s in &run.stacks {
                let p = dir.join(format!("{}_{}_frames.csv", run.id, s.name));
                write_frames_csv(&s.frames, create(&p)?)?;
                written.push(p);
            }
            let p = dir.join(format!("{}_summary.csv", run.id));
            write_summary_csv(&run.summary, create(&p)?)?;
            written.push(p);
            if gnuplot {
                let p = dir.join(format!("{}.gp", run.id));
                fs::write(&p, gnuplot_script(run))?;
                written.push(p);
            }
        }
    }
    Ok(written)
}

/// A script that plots every series and every frame stack of `run` from the CSVs
/// next to it.
pub fn gnuplot_script(run: &RunOutput) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\nset key autotitle columnhead\nset term pngcairo size 1000,700\n");
    if !run.series.is_empty() {
        s.push_str(&format!("set output '{}_series.png'\nset xlabel 't'\nplot \\\n", run.id));
        let lines: Vec<String> = run
            .series
            .iter()
            .map(|se| {
                format!(
                    "  '{id}_series.csv' using 1:(strcol(2) eq '{n}' ? $3 : NaN) with lines title '{n}'",
                    id = run.id,
                    n = se.name
                )
            })
            .collect();
        s.push_str(&lines.join(", \\\n"));
        s.push('\n');
    }
    for st in &run.stacks {
        s.push_str(&format!(
            "set output '{id}_{n}.png'\nset xlabel 'Q'\nset ylabel 't'\nset zlabel 'P'\nset hidden3d\n\
             splot '{id}_{n}_frames.csv' using 2:1:3 with points pt 0 title '{n}'\nunset hidden3d\nunset ylabel\nunset zlabel\n",
            id = run.id,
            n = st.name
        ));
    }
    s
}
