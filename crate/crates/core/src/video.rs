//! Streaming spectral-video generation.
//!
//! ```text
//! source -> decode (skip decision) -> worker pool (estimate_cube) -> ordered emit -> sink
//! ```
//!
//! The skip decision compares each frame with the last frame sent for
//! estimation, so it depends only on the input sequence. Skipped frames
//! re-emit the previous spectral frame. At most `in_flight` frames are
//! between decode and emit at any time, which bounds memory independently of
//! video length. Output is identical for any worker count.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use crossbeam_channel::{bounded, Receiver, Sender};

use crate::error::{Error, Result};
use crate::estimators::EstimationModel;
use crate::io::{read_ppm_raw, RawImage, RawVideoReader, SpectralVideoWriter};
use crate::spectral::{RgbImage, SpectralCube};

/// `raw / (2^bit_depth - 1)` for 8- or 16-bit interleaved RGB.
pub fn normalize_rgb(height: usize, width: usize, raw: &[u32], bit_depth: u32) -> Result<RgbImage> {
    if bit_depth != 8 && bit_depth != 16 {
        return Err(Error::InvalidInput(format!("bit depth {bit_depth}, expected 8 or 16")));
    }
    let max = (1u32 << bit_depth) - 1;
    let scale = 1.0 / max as f64;
    let values = raw
        .iter()
        .map(|&v| {
            if v > max {
                Err(Error::BadPixelValue { value: v, max })
            } else {
                Ok(v as f64 * scale)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    RgbImage::new(height, width, values)
}

pub fn normalize_raw(raw: &RawImage) -> Result<RgbImage> {
    RgbImage::new(raw.height, raw.width, raw.data.iter().map(|&v| v as f64 / 255.0).collect())
}

/// `1 - mean |a - b|` over all channel values.
pub fn frame_similarity(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    a.ensure_same_shape(b)?;
    let diffs: Vec<f64> = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).collect();
    Ok(1.0 - crate::metrics::mean(&diffs))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SkipPolicy {
    None,
    /// Skip a frame whose similarity to the last estimated frame is at least `threshold`.
    Similarity { threshold: f64 },
}

impl SkipPolicy {
    pub fn similarity(threshold: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(Error::InvalidInput(format!("skip threshold {threshold} not in [0, 1]")));
        }
        Ok(SkipPolicy::Similarity { threshold })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub skip: SkipPolicy,
    /// Estimation workers; 0 means one.
    pub workers: usize,
    /// Frames allowed between decode and emit.
    pub in_flight: usize,
    /// Fixed pause after decoding each frame.
    pub frame_delay: Option<Duration>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            skip: SkipPolicy::None,
            workers: 1,
            in_flight: 4,
            frame_delay: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PipelineStats {
    pub frames_in: usize,
    pub frames_estimated: usize,
    pub frames_skipped: usize,
    /// Estimation time per output frame; 0 for skipped frames.
    pub per_frame_ms: Vec<f64>,
    pub throughput_fps: f64,
}

pub trait FrameSink {
    fn push(&mut self, index: usize, frame: &SpectralCube) -> Result<()>;
}

impl FrameSink for Vec<SpectralCube> {
    fn push(&mut self, _index: usize, frame: &SpectralCube) -> Result<()> {
        Vec::push(self, frame.clone());
        Ok(())
    }
}

impl<W: std::io::Write + std::io::Seek> FrameSink for SpectralVideoWriter<W> {
    fn push(&mut self, _index: usize, frame: &SpectralCube) -> Result<()> {
        SpectralVideoWriter::push(self, frame)
    }
}

/// Counts frames and keeps the last one; for throughput runs.
#[derive(Debug, Default)]
pub struct DiscardSink {
    pub frames: usize,
}

impl FrameSink for DiscardSink {
    fn push(&mut self, _index: usize, _frame: &SpectralCube) -> Result<()> {
        self.frames += 1;
        Ok(())
    }
}

enum Job {
    Estimate(usize, RgbImage),
    Skip(usize),
    Failed(usize, Error),
}

enum Done {
    Estimated(usize, SpectralCube, f64),
    Skipped(usize),
    Failed(usize, Error),
}

fn frame_error(index: usize, source: Error) -> Error {
    Error::Frame {
        index,
        source: Box::new(source),
    }
}

fn decode_stage<I>(
    frames: I,
    skip: SkipPolicy,
    delay: Option<Duration>,
    jobs: Sender<Job>,
    tokens: Receiver<()>,
) where
    I: Iterator<Item = Result<RgbImage>>,
{
    let mut last_estimated: Option<RgbImage> = None;
    for (index, frame) in frames.enumerate() {
        if tokens.recv().is_err() {
            return;
        }
        let job = match frame {
            Err(e) => Job::Failed(index, e),
            Ok(rgb) => {
                let decision = match (&skip, &last_estimated) {
                    (SkipPolicy::Similarity { threshold }, Some(prev)) => {
                        frame_similarity(&rgb, prev).map(|s| s >= *threshold)
                    }
                    (_, Some(prev)) => prev.ensure_same_shape(&rgb).map(|_| false),
                    (_, None) => Ok(false),
                };
                match decision {
                    Err(e) => Job::Failed(index, e),
                    Ok(true) => Job::Skip(index),
                    Ok(false) => {
                        last_estimated = Some(rgb.clone());
                        Job::Estimate(index, rgb)
                    }
                }
            }
        };
        let failed = matches!(job, Job::Failed(..));
        if jobs.send(job).is_err() || failed {
            return;
        }
        if let Some(d) = delay {
            thread::sleep(d);
        }
    }
}

fn worker_stage(model: &EstimationModel, jobs: Receiver<Job>, done: Sender<Done>) {
    for job in jobs {
        let out = match job {
            Job::Estimate(i, rgb) => {
                let t0 = Instant::now();
                match model.estimate_cube(&rgb) {
                    Ok(cube) => Done::Estimated(i, cube, t0.elapsed().as_secs_f64() * 1e3),
                    Err(e) => Done::Failed(i, e),
                }
            }
            Job::Skip(i) => Done::Skipped(i),
            Job::Failed(i, e) => Done::Failed(i, e),
        };
        if done.send(out).is_err() {
            return;
        }
    }
}

/// Estimate every frame of `frames` into `sink`, in input order.
pub fn process_video<I>(
    frames: I,
    model: &EstimationModel,
    config: &PipelineConfig,
    sink: &mut dyn FrameSink,
) -> Result<PipelineStats>
where
    I: IntoIterator<Item = Result<RgbImage>>,
    I::IntoIter: Send,
{
    if !model.is_fitted() {
        return Err(Error::ModelNotFitted);
    }
    let workers = config.workers.max(1);
    let in_flight = config.in_flight.max(workers);
    let frames = frames.into_iter();
    let start = Instant::now();

    thread::scope(|s| {
        let (job_tx, job_rx) = bounded::<Job>(in_flight);
        let (done_tx, done_rx) = bounded::<Done>(in_flight);
        let (token_tx, token_rx) = bounded::<()>(in_flight);
        for _ in 0..in_flight {
            token_tx.send(()).expect("capacity");
        }
        let (skip, delay) = (config.skip, config.frame_delay);
        s.spawn(move || decode_stage(frames, skip, delay, job_tx, token_rx));
        for _ in 0..workers {
            let (jobs, done) = (job_rx.clone(), done_tx.clone());
            s.spawn(move || worker_stage(model, jobs, done));
        }
        drop(job_rx);
        drop(done_tx);

        let mut stats = PipelineStats::default();
        let mut pending: BTreeMap<usize, Done> = BTreeMap::new();
        let mut previous: Option<Arc<SpectralCube>> = None;
        let mut next = 0usize;
        for msg in done_rx.iter() {
            let idx = match &msg {
                Done::Estimated(i, ..) | Done::Skipped(i) | Done::Failed(i, _) => *i,
            };
            pending.insert(idx, msg);
            while let Some(msg) = pending.remove(&next) {
                match msg {
                    Done::Estimated(i, cube, ms) => {
                        let cube = Arc::new(cube);
                        sink.push(i, &cube).map_err(|e| frame_error(i, e))?;
                        previous = Some(cube);
                        stats.frames_estimated += 1;
                        stats.per_frame_ms.push(ms);
                    }
                    Done::Skipped(i) => {
                        let prev = previous.as_ref().expect("first frame is never skipped");
                        sink.push(i, prev).map_err(|e| frame_error(i, e))?;
                        stats.frames_skipped += 1;
                        stats.per_frame_ms.push(0.0);
                    }
                    Done::Failed(i, e) => return Err(frame_error(i, e)),
                }
                stats.frames_in += 1;
                next += 1;
                // the decoder may have finished; a closed token channel is fine
                let _ = token_tx.send(());
            }
        }
        let secs = start.elapsed().as_secs_f64();
        stats.throughput_fps = if secs > 0.0 { stats.frames_in as f64 / secs } else { f64::INFINITY };
        Ok(stats)
    })
}

/// Sorted `frame_NNNNNN.ppm` files of a directory.
pub fn ppm_frame_paths(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<(u64, PathBuf)> = Vec::new();
    for entry in fs::read_dir(dir.as_ref())? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        if let Some(num) = name.strip_prefix("frame_").and_then(|r| r.strip_suffix(".ppm")) {
            if let Ok(n) = num.parse::<u64>() {
                paths.push((n, path));
            }
        }
    }
    paths.sort();
    Ok(paths.into_iter().map(|(_, p)| p).collect())
}

pub fn ppm_path(dir: impl AsRef<Path>, index: usize) -> PathBuf {
    dir.as_ref().join(format!("frame_{index:06}.ppm"))
}

/// Frames of a PPM directory, read lazily.
pub fn ppm_frames(dir: impl AsRef<Path>) -> Result<impl Iterator<Item = Result<RgbImage>> + Send> {
    let paths = ppm_frame_paths(dir)?;
    Ok(paths.into_iter().map(|p| {
        let mut r = std::io::BufReader::new(fs::File::open(&p)?);
        normalize_raw(&read_ppm_raw(&mut r)?)
    }))
}

/// Frames of an `SPVR` raw video, read lazily.
pub fn raw_video_frames(path: impl AsRef<Path>) -> Result<impl Iterator<Item = Result<RgbImage>> + Send> {
    Ok(RawVideoReader::open(path)?.map(|f| f.and_then(|raw| normalize_raw(&raw))))
}
