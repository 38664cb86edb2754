//! Text camera description.
//!
//! ```text
//! CAMSPEC 1
//! grid <start_nm> <step_nm> <bands>
//! channels <M>
//! sensitivity <N values>        (M lines, one per channel)
//! illuminant <N values>
//! noise none | noise gaussian <seed> <M sigmas>
//! ```
//!
//! Tokens are whitespace separated; `#` starts a comment. The white-point
//! scaling is recomputed on load.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use super::{create, open};
use crate::camera::{CameraSpec, NoiseKind, NoiseModel};
use crate::error::{Error, Result};
use crate::spectral::WavelengthGrid;

pub const CAMERA_MAGIC: &str = "CAMSPEC";

struct Tokens<'a> {
    inner: Box<dyn Iterator<Item = &'a str> + 'a>,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let inner = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(|l| l.split_whitespace());
        Self { inner: Box::new(inner) }
    }

    fn next(&mut self, what: &str) -> Result<&'a str> {
        self.inner
            .next()
            .ok_or_else(|| Error::CorruptFile(format!("camera: expected {what}, found end of file")))
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        let t = self.next(kw)?;
        if t != kw {
            return Err(Error::CorruptFile(format!("camera: expected {kw:?}, found {t:?}")));
        }
        Ok(())
    }

    fn parse<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let t = self.next(what)?;
        t.parse()
            .map_err(|_| Error::CorruptFile(format!("camera: bad {what} {t:?}")))
    }

    fn floats(&mut self, n: usize, what: &str) -> Result<Vec<f64>> {
        (0..n).map(|_| self.parse::<f64>(what)).collect()
    }
}

pub fn parse_camera(text: &str) -> Result<CameraSpec> {
    let mut t = Tokens::new(text);
    t.keyword(CAMERA_MAGIC)?;
    let version: u32 = t.parse("version")?;
    if version != 1 {
        return Err(Error::UnsupportedFormat(format!("camera version {version}")));
    }
    t.keyword("grid")?;
    let start = t.parse("grid start")?;
    let step = t.parse("grid step")?;
    let bands: usize = t.parse("band count")?;
    let grid = WavelengthGrid::new(start, step, bands).map_err(|e| Error::CorruptFile(format!("camera: {e}")))?;
    t.keyword("channels")?;
    let m: usize = t.parse("channel count")?;
    if m == 0 {
        return Err(Error::CorruptFile("camera: zero channels".into()));
    }
    let mut s = DMatrix::zeros(m, bands);
    for i in 0..m {
        t.keyword("sensitivity")?;
        let row = t.floats(bands, "sensitivity")?;
        for (j, v) in row.into_iter().enumerate() {
            s[(i, j)] = v;
        }
    }
    t.keyword("illuminant")?;
    let illuminant = t.floats(bands, "illuminant")?;
    t.keyword("noise")?;
    let noise = match t.next("noise kind")? {
        "none" => NoiseModel::none(m),
        "gaussian" => {
            let seed = t.parse("noise seed")?;
            NoiseModel::gaussian(t.floats(m, "noise sigma")?, seed)?
        }
        other => return Err(Error::CorruptFile(format!("camera: unknown noise kind {other:?}"))),
    };
    if let Ok(extra) = t.next("end") {
        return Err(Error::CorruptFile(format!("camera: unexpected trailing token {extra:?}")));
    }
    CameraSpec::new(grid, s, illuminant, noise)
}

pub fn format_camera(cam: &CameraSpec) -> String {
    let g = cam.grid();
    let mut out = String::new();
    let join = |v: &mut dyn Iterator<Item = f64>| v.map(|x| format!("{x}")).collect::<Vec<_>>().join(" ");
    writeln!(out, "{CAMERA_MAGIC} 1").unwrap();
    writeln!(out, "grid {} {} {}", g.start_nm(), g.step_nm(), g.count()).unwrap();
    writeln!(out, "channels {}", cam.channels()).unwrap();
    for i in 0..cam.channels() {
        writeln!(out, "sensitivity {}", join(&mut cam.sensitivities().row(i).iter().copied())).unwrap();
    }
    writeln!(out, "illuminant {}", join(&mut cam.illuminant().iter().copied())).unwrap();
    match cam.noise().kind() {
        NoiseKind::None => writeln!(out, "noise none").unwrap(),
        NoiseKind::AdditiveGaussian => writeln!(
            out,
            "noise gaussian {} {}",
            cam.noise().seed(),
            join(&mut cam.noise().sigma().iter().copied())
        )
        .unwrap(),
    }
    out
}

pub fn write_camera(path: impl AsRef<Path>, cam: &CameraSpec) -> Result<()> {
    let mut w = create(path.as_ref())?;
    w.write_all(format_camera(cam).as_bytes())?;
    w.flush()?;
    Ok(())
}

pub fn read_camera(path: impl AsRef<Path>) -> Result<CameraSpec> {
    let mut text = String::new();
    open(path.as_ref())?.read_to_string(&mut text)?;
    parse_camera(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_roundtrip() {
        let g = WavelengthGrid::default();
        for cam in [
            CameraSpec::gaussian_rgb(&g),
            CameraSpec::colorimetric(&g),
            CameraSpec::gaussian_rgb(&g).with_noise(NoiseModel::gaussian(vec![0.01, 0.02, 0.03], 9).unwrap()).unwrap(),
        ] {
            let back = parse_camera(&format_camera(&cam)).unwrap();
            assert_eq!(back.system_matrix(), cam.system_matrix());
            assert_eq!(back.noise(), cam.noise());
        }
    }

    #[test]
    fn hand_written_file() {
        let text = "CAMSPEC 1 # two-band toy\ngrid 500 100 2\nchannels 1\nsensitivity 1 1\nilluminant 2 2\nnoise none\n";
        let cam = parse_camera(text).unwrap();
        assert_eq!(cam.system_matrix().as_slice(), &[0.5, 0.5]);
        assert!(matches!(parse_camera("CAMSPEC 1\ngrid 500 100"), Err(Error::CorruptFile(_))));
        assert!(matches!(parse_camera(&format!("{text} extra")), Err(Error::CorruptFile(_))));
    }
}
