//! Spectra as CSV: header `wavelength,s1,s2,...`, one row per band.

use std::io::{Read, Write};
use std::path::Path;

use super::{create, open};
use crate::error::{Error, Result};
use crate::spectral::{Spectrum, WavelengthGrid};

fn csv_err(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => unreachable!(),
        }
    } else {
        Error::CorruptFile(format!("spectra csv: {e}"))
    }
}

pub fn write_spectra_csv_to(w: impl Write, spectra: &[Spectrum]) -> Result<()> {
    let first = spectra.first().ok_or(Error::InvalidInput("no spectra to write".into()))?;
    let grid = *first.grid();
    for s in spectra {
        grid.ensure_same(s.grid())?;
    }
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["wavelength".to_string()];
    header.extend((1..=spectra.len()).map(|i| format!("s{i}")));
    out.write_record(&header).map_err(csv_err)?;
    let mut row = Vec::with_capacity(spectra.len() + 1);
    for b in 0..grid.count() {
        row.clear();
        // `{}` on f64 is the shortest representation that parses back exactly
        row.push(format!("{}", grid.wavelength(b)));
        row.extend(spectra.iter().map(|s| format!("{}", s.values()[b])));
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_spectra_csv_from(r: impl Read) -> Result<Vec<Spectrum>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(r);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    if headers.get(0) != Some("wavelength") || headers.len() < 2 {
        return Err(Error::CorruptFile("spectra csv: header must be wavelength,s1,...".into()));
    }
    let columns = headers.len() - 1;
    let mut wavelengths = Vec::new();
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); columns];
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != headers.len() {
            return Err(Error::CorruptFile(format!("spectra csv: ragged row {}", line + 2)));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::CorruptFile(format!("spectra csv: bad number {s:?} on row {}", line + 2)))
        };
        wavelengths.push(parse(&rec[0])?);
        for (c, col) in values.iter_mut().enumerate() {
            col.push(parse(&rec[c + 1])?);
        }
    }
    if wavelengths.len() < 2 {
        return Err(Error::CorruptFile("spectra csv: need at least 2 bands".into()));
    }
    let start = wavelengths[0];
    let step = wavelengths[1] - wavelengths[0];
    let grid = WavelengthGrid::new(start, step, wavelengths.len())
        .map_err(|e| Error::CorruptFile(format!("spectra csv: {e}")))?;
    for (i, &wl) in wavelengths.iter().enumerate() {
        if (wl - grid.wavelength(i)).abs() > 1e-9 * wl.abs().max(1.0) {
            return Err(Error::CorruptFile(format!("spectra csv: non-uniform wavelength {wl}")));
        }
    }
    values.into_iter().map(|v| Spectrum::new(grid, v)).collect()
}

pub fn write_spectra_csv(path: impl AsRef<Path>, spectra: &[Spectrum]) -> Result<()> {
    write_spectra_csv_to(create(path.as_ref())?, spectra)
}

pub fn read_spectra_csv(path: impl AsRef<Path>) -> Result<Vec<Spectrum>> {
    read_spectra_csv_from(open(path.as_ref())?)
}
