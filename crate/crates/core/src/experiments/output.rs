//! CSV and JSON artifacts.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::observables::ObservableRecord;
use crate::spectral::{SpectrumField, WaveField};

#[derive(Serialize)]
struct WaveRow {
    x: f64,
    re: f64,
    im: f64,
    density: f64,
}

#[derive(Serialize)]
struct SpectrumRow {
    k: i64,
    re: f64,
    im: f64,
    magnitude: f64,
}

/// Serializes `rows` with a header line.
pub fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `x, re, im, density`.
pub fn write_wave_field(path: &Path, field: &WaveField) -> Result<()> {
    let grid = field.grid();
    write_rows(
        path,
        field.values().iter().enumerate().map(|(j, z)| WaveRow {
            x: grid.node(j),
            re: z.re,
            im: z.im,
            density: z.norm_sqr(),
        }),
    )
}

/// Columns `k, re, im, magnitude`, in increasing `k`.
pub fn write_spectrum(path: &Path, spec: &SpectrumField) -> Result<()> {
    write_rows(
        path,
        spec.iter().map(|(k, c)| SpectrumRow {
            k,
            re: c.re,
            im: c.im,
            magnitude: c.norm(),
        }),
    )
}

/// Columns `t, mass, energy, sup_norm, sigma_norm`.
pub fn write_series(path: &Path, series: &[ObservableRecord]) -> Result<()> {
    write_rows(path, series.iter())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Collects the files written by one run inside its own directory.
pub struct ArtifactDir {
    root: PathBuf,
    written: Vec<String>,
}

impl ArtifactDir {
    pub fn create(parent: &Path, name: &str) -> Result<Self> {
        let root = parent.join(name);
        std::fs::create_dir_all(&root)?;
        Ok(ArtifactDir {
            root,
            written: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn claim(&mut self, file: &str) -> PathBuf {
        self.written.push(file.to_string());
        self.root.join(file)
    }

    pub fn wave_field(&mut self, file: &str, field: &WaveField) -> Result<()> {
        let path = self.claim(file);
        write_wave_field(&path, field)
    }

    pub fn spectrum(&mut self, file: &str, spec: &SpectrumField) -> Result<()> {
        let path = self.claim(file);
        write_spectrum(&path, spec)
    }

    pub fn series(&mut self, file: &str, series: &[ObservableRecord]) -> Result<()> {
        let path = self.claim(file);
        write_series(&path, series)
    }

    pub fn rows<T: Serialize>(&mut self, file: &str, rows: impl IntoIterator<Item = T>) -> Result<()> {
        let path = self.claim(file);
        write_rows(&path, rows)
    }

    pub fn files(&self) -> &[String] {
        &self.written
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{forward_dft, GridSpec};
    use num_complex::Complex64;

    #[test]
    fn csv_headers_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridSpec::periodic_2pi(4).unwrap();
        let u = WaveField::from_fn(g, |x| Complex64::new(1.0, x));
        let p = dir.path().join("u.csv");
        write_wave_field(&p, &u).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,re,im,density");
        assert_eq!(lines[1], "0.0,1.0,0.0,1.0");
        assert_eq!(lines.len(), 5);
        assert!(text.ends_with('\n'));

        let p = dir.path().join("s.csv");
        write_spectrum(&p, &forward_dft(&u)).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("k,re,im,magnitude\n-2,"));

        let p = dir.path().join("t.csv");
        let rec = ObservableRecord {
            t: 0.5,
            mass: 1.0,
            energy: 2.0,
            sup_norm: 3.0,
            sigma_norm: 4.0,
        };
        write_series(&p, &[rec]).unwrap();
        assert_eq!(
            std::fs::read_to_string(&p).unwrap(),
            "t,mass,energy,sup_norm,sigma_norm\n0.5,1.0,2.0,3.0,4.0\n"
        );
    }
}
