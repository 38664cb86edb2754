use std::fmt;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};

use spectracast::datagen::{generate_scene, SceneRecipe, VideoGenerator};
use spectracast::estimators::{EstimationModel, TrainingSet};
use spectracast::io::{self, CubeEncoding, RawImage, RawVideoWriter, Report, SpectralVideoReader, SpectralVideoWriter};
use spectracast::metrics::{evaluate_cube, highlight_mask, MetricReport};
use spectracast::search::{sample_training, sampling_seed, search_representative};
use spectracast::video::{self as pipeline, PipelineConfig, SkipPolicy};
use spectracast::{CameraSpec, ColorimetryTables, MethodKind, MethodSpec, PolyCombo, SpectralCube, WavelengthGrid};

use crate::{
    BandViewArgs, Command, DatagenArgs, Encoding, EstimateArgs, EvaluateArgs, FitArgs, MethodArgs,
    RenderArgs, ReportArg, SampleArgs, SearchArgs, VideoArgs,
};

/// A user-supplied configuration that cannot run; exits with code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// 2 for configuration errors anywhere in the chain, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    use spectracast::Error as E;
    let is_config = err.chain().any(|c| {
        c.is::<ConfigError>()
            || matches!(
                c.downcast_ref::<E>(),
                Some(E::MissingPriorKnowledge { .. } | E::InvalidInput(_) | E::BadBasisCount { .. })
            )
    });
    if is_config {
        2
    } else {
        1
    }
}

pub fn run(command: Command, threads: Option<usize>) -> Result<()> {
    if threads == Some(0) {
        return Err(config_error("--threads must be at least 1"));
    }
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let threads = threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    match command {
        Command::Datagen(a) => datagen(a),
        Command::Sample(a) => sample(a),
        Command::Render(a) => render(a),
        Command::Fit(a) => fit(a),
        Command::Estimate(a) => estimate(a),
        Command::Video(a) => video(a, threads),
        Command::Evaluate(a) => evaluate(a),
        Command::SearchTrain(a) => search(a, threads),
        Command::BandView(a) => band_view(a),
    }
}

fn emit(report: &Report, arg: &ReportArg) -> Result<()> {
    print!("{report}");
    if let Some(path) = &arg.report {
        report.write(path).with_context(|| format!("writing report {}", path.display()))?;
    }
    Ok(())
}

fn num(v: f64) -> String {
    format!("{v:.12e}")
}

fn shown(p: &Path) -> String {
    p.display().to_string()
}

fn encoding(e: Encoding) -> CubeEncoding {
    match e {
        Encoding::F32 => CubeEncoding::F32,
        Encoding::F64 => CubeEncoding::F64,
    }
}

fn load_camera(spec: &str, grid: &WavelengthGrid) -> Result<CameraSpec> {
    match spec {
        "gaussian" => Ok(CameraSpec::gaussian_rgb(grid)),
        "colorimetric" => Ok(CameraSpec::colorimetric(grid)),
        path => {
            let cam = io::read_camera(path).with_context(|| format!("reading camera {path}"))?;
            if cam.grid() != grid {
                return Err(config_error(format!(
                    "camera {path} is defined on {}, data uses {grid}",
                    cam.grid()
                )));
            }
            Ok(cam)
        }
    }
}

fn read_cube(path: &Path) -> Result<SpectralCube> {
    io::read_cube(path).with_context(|| format!("reading cube {}", path.display()))
}

fn magic(path: &Path) -> Result<[u8; 4]> {
    let mut buf = [0u8; 4];
    std::fs::File::open(path)
        .and_then(|mut f| f.read_exact(&mut buf))
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(buf)
}

fn parse_size(s: &str) -> Result<(usize, usize)> {
    let bad = || config_error(format!("size {s:?} is not WIDTHxHEIGHT"));
    let (w, h) = s.split_once('x').ok_or_else(bad)?;
    let (w, h): (usize, usize) = (w.parse().map_err(|_| bad())?, h.parse().map_err(|_| bad())?);
    if w == 0 || h == 0 {
        return Err(bad());
    }
    Ok((w, h))
}

fn method_kind(name: &str) -> Result<MethodKind> {
    MethodKind::ALL.into_iter().find(|k| k.name() == name).ok_or_else(|| {
        let names: Vec<&str> = MethodKind::ALL.iter().map(|k| k.name()).collect();
        config_error(format!("unknown method {name:?}; expected one of {}", names.join(", ")))
    })
}

fn method_spec(args: &MethodArgs) -> Result<MethodSpec> {
    let kind = method_kind(&args.method)?;
    let mut spec = MethodSpec::new(kind);
    let combo = match (&args.combo, &args.combo_terms) {
        (Some(name), _) => Some(PolyCombo::preset(name).map_err(|e| config_error(e.to_string()))?),
        (_, Some(terms)) => Some(terms.parse::<PolyCombo>().map_err(|e| config_error(e.to_string()))?),
        _ => None,
    };
    if let Some(c) = combo {
        if !kind.uses_combo() && !c.is_linear() {
            return Err(config_error(format!("{} does not take a polynomial combo", kind.name())));
        }
        spec = spec.with_combo(c);
    }
    if let Some(d) = args.basis {
        spec = spec.with_basis_count(d);
    }
    spec.basis_search_from = args.basis_from;
    Ok(spec)
}

fn echo_method(report: &mut Report, spec: &MethodSpec) {
    report.config("method", spec.kind.name());
    if spec.kind.uses_combo() {
        report.config("combo", &spec.combo);
    }
    if matches!(spec.kind, MethodKind::Linear | MethodKind::ImaiBerns | MethodKind::ShiHealey) {
        report.config("basis", spec.basis_count);
    }
    if let Some(d0) = spec.basis_search_from {
        report.config("basis_from", d0);
    }
}

fn datagen(a: DatagenArgs) -> Result<()> {
    let (width, height) = parse_size(&a.size)?;
    let recipe = SceneRecipe {
        height,
        width,
        grid: WavelengthGrid::default(),
        n_materials: a.materials,
        smoothness_sigma_nm: a.smoothness,
        highlight_fraction: a.highlight_fraction,
        highlight_gain: a.highlight_gain,
        red_bias: a.red_bias,
        jitter: a.jitter,
        seed: a.seed,
    };
    let mut report = Report::new("datagen");
    report
        .config("size", format!("{width}x{height}"))
        .config("grid", recipe.grid)
        .config("seed", a.seed)
        .config("materials", a.materials)
        .config("highlight_fraction", a.highlight_fraction)
        .config("highlight_gain", a.highlight_gain)
        .config("smoothness_nm", a.smoothness)
        .config("red_bias", a.red_bias)
        .config("jitter", a.jitter);
    match a.frames {
        None => {
            let scene = generate_scene(&recipe)?;
            io::write_cube(&a.out, &scene.cube, encoding(a.encoding))?;
            if let Some(mask) = &a.mask {
                let values: Vec<f64> = scene.highlight_mask.iter().map(|&m| f64::from(u8::from(m))).collect();
                io::write_map(mask, height, width, &values)?;
            }
            report.config("output", shown(&a.out));
            report.result("highlight_pixels", scene.highlight_mask.iter().filter(|&&m| m).count());
        }
        Some(0) => return Err(config_error("--frames must be at least 1")),
        Some(n) => {
            let video = VideoGenerator::new(&recipe, n, a.drift)?;
            let mut writer = SpectralVideoWriter::create(&a.out, width, height, recipe.grid)?;
            let mut masks = Vec::with_capacity(n * height * width);
            for t in 0..n {
                writer.push(&video.frame(t))?;
                masks.extend(video.mask(t).into_iter().map(|m| f64::from(u8::from(m))));
            }
            writer.finish()?;
            if let Some(mask) = &a.mask {
                io::write_map(mask, n * height, width, &masks)?;
            }
            report
                .config("frames", n)
                .config("drift_px_per_frame", a.drift)
                .config("output", shown(&a.out));
            report.result("highlight_pixels_per_frame", recipe.highlight_count());
        }
    }
    emit(&report, &a.report)
}

fn sample(a: SampleArgs) -> Result<()> {
    let mut report = Report::new("sample");
    report
        .config("camera", &a.camera.camera)
        .config("fraction", a.fraction)
        .config("seed", a.seed);
    let mut sets = Vec::new();
    let mut camera: Option<CameraSpec> = None;
    for (i, path) in a.cubes.iter().enumerate() {
        let cube = read_cube(path)?;
        let cam = match &camera {
            Some(c) => c.clone(),
            None => load_camera(&a.camera.camera, cube.grid())?,
        };
        let name = stem(path);
        let ts = sample_training(&cube, &cam, a.fraction, sampling_seed(a.seed, i, 0), &name)
            .with_context(|| format!("sampling {}", path.display()))?;
        report.config(format!("cube.{i}"), shown(path));
        sets.push(ts);
        camera = Some(cam);
    }
    let refs: Vec<&TrainingSet> = sets.iter().collect();
    let ts = TrainingSet::union(&refs)?;
    io::write_training(&a.out, &ts)?;
    report.config("output", shown(&a.out));
    report.result("samples", ts.len()).result("channels", ts.channels());
    emit(&report, &a.report)
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| shown(path), |s| s.to_string_lossy().into_owned())
}

fn render(a: RenderArgs) -> Result<()> {
    let mut report = Report::new("render");
    report
        .config("input", shown(&a.input))
        .config("camera", &a.camera.camera)
        .config("output", shown(&a.out));
    let head = magic(&a.input)?;
    if &head == io::SPECTRAL_VIDEO_MAGIC {
        let reader = SpectralVideoReader::open(&a.input)?;
        let cam = load_camera(&a.camera.camera, &reader.grid)?;
        let mut writer = RawVideoWriter::create(&a.out, reader.width, reader.height)?;
        let (mut frames, mut clipped) = (0usize, 0usize);
        for frame in reader {
            let rendered = cam.render_rgb_cube(&frame?)?;
            writer.push(&RawImage::from_rgb(&rendered.image))?;
            frames += 1;
            clipped += rendered.clipped;
        }
        writer.finish()?;
        report.result("frames", frames).result("clipped_values", clipped);
    } else {
        let cube = read_cube(&a.input)?;
        let cam = load_camera(&a.camera.camera, cube.grid())?;
        let rendered = cam.render_rgb_cube(&cube)?;
        io::write_ppm(&a.out, &rendered.image)?;
        report.result("clipped_values", rendered.clipped);
    }
    emit(&report, &a.report)
}

fn fit(a: FitArgs) -> Result<()> {
    let spec = method_spec(&a.method)?;
    let mut report = Report::new("fit");
    echo_method(&mut report, &spec);

    let mut grid = None;
    let training = match &a.train {
        Some(p) => {
            report.config("train", shown(p));
            let ts = io::read_training(p).with_context(|| format!("reading training set {}", p.display()))?;
            grid = Some(*ts.grid());
            Some(ts)
        }
        None => None,
    };
    let csv = match &a.reflectances {
        Some(p) => {
            report.config("reflectances", shown(p));
            let spectra = io::read_spectra_csv(p).with_context(|| format!("reading spectra {}", p.display()))?;
            let first = spectra.first().ok_or_else(|| config_error(format!("{} holds no spectra", p.display())))?;
            grid = Some(*first.grid());
            let mut r = nalgebra::DMatrix::zeros(first.grid().count(), spectra.len());
            for (j, s) in spectra.iter().enumerate() {
                r.column_mut(j).copy_from_slice(s.values());
            }
            Some(r)
        }
        None => None,
    };
    let reflectances = training.as_ref().map(|t| t.reflectances().clone()).or(csv);

    let missing_reflectance = reflectances.is_none();
    let mut missing: Vec<String> = spec
        .missing_requirements(a.camera.is_some(), training.is_some())
        .iter()
        .map(|r| format!("\"{r}\""))
        .collect();
    if missing_reflectance {
        missing.insert(0, "\"Reflectance\"".into());
    }
    if !missing.is_empty() {
        return Err(config_error(format!(
            "{} requires prior knowledge of {} (supply {})",
            spec.kind.name(),
            missing.join(", "),
            hint(&spec, missing_reflectance, a.camera.is_none())
        )));
    }
    let grid = grid.expect("reflectances present");
    let camera = match &a.camera {
        Some(c) => {
            report.config("camera", c);
            Some(load_camera(c, &grid)?)
        }
        None => None,
    };
    let model = match &training {
        Some(ts) => spec.fit(ts, camera.as_ref())?,
        None => spec.fit_from_reflectances(reflectances.as_ref().unwrap(), camera.as_ref().unwrap())?,
    };
    io::write_model(&a.out, &model)?;
    report.config("output", shown(&a.out));
    summarize_model(&mut report, &model);
    emit(&report, &a.report)
}

/// Which flags satisfy the missing requirements.
fn hint(spec: &MethodSpec, need_reflectance: bool, need_camera: bool) -> String {
    let mut flags = Vec::new();
    if need_reflectance {
        flags.push(if spec.kind.needs_camera() { "--train or --reflectances" } else { "--train" });
    } else if !spec.kind.needs_camera() {
        flags.push("--train (paired RGB values)");
    }
    if need_camera && spec.kind.needs_camera() {
        flags.push("--camera");
    }
    flags.join(" and ")
}

fn summarize_model(report: &mut Report, model: &EstimationModel) {
    report.result("terms", model.term_count());
    if let Some(d) = &model.diagnostics {
        report.result("samples", d.samples).result("condition", format!("{:.6e}", d.condition));
    }
}

fn read_model(path: &Path) -> Result<EstimationModel> {
    io::read_model(path).with_context(|| format!("reading model {}", path.display()))
}

fn estimate(a: EstimateArgs) -> Result<()> {
    let model = read_model(&a.model)?;
    let image = io::read_ppm(&a.image).with_context(|| format!("reading image {}", a.image.display()))?;
    let cube = model.estimate_cube_par(&image)?;
    io::write_cube(&a.out, &cube, encoding(a.encoding))?;
    let mut report = Report::new("estimate");
    report
        .config("model", shown(&a.model))
        .config("method", model.kind().name())
        .config("image", shown(&a.image))
        .config("output", shown(&a.out));
    report.result("pixels", cube.pixel_count()).result("bands", cube.bands());
    emit(&report, &a.report)
}

fn video(a: VideoArgs, threads: usize) -> Result<()> {
    let model = read_model(&a.model)?;
    let skip = match a.skip_threshold {
        Some(t) => SkipPolicy::similarity(t).map_err(|e| config_error(e.to_string()))?,
        None => SkipPolicy::None,
    };
    let workers = a.workers.unwrap_or(threads);
    if workers == 0 {
        return Err(config_error("--workers must be at least 1"));
    }
    let config = PipelineConfig {
        skip,
        workers,
        in_flight: a.in_flight.unwrap_or(2 * workers),
        frame_delay: a.frame_delay_ms.map(Duration::from_millis),
    };
    let mut report = Report::new("video");
    report
        .config("model", shown(&a.model))
        .config("method", model.kind().name())
        .config("input", shown(&a.input))
        .config("output", shown(&a.out))
        .config("skip_threshold", a.skip_threshold.map_or("none".into(), |t| t.to_string()))
        .config("workers", config.workers)
        .config("in_flight", config.in_flight)
        .config("frame_delay_ms", a.frame_delay_ms.unwrap_or(0));

    let stats = if a.input.is_dir() {
        let first = pipeline::ppm_frame_paths(&a.input)?
            .into_iter()
            .next()
            .ok_or_else(|| config_error(format!("no frame_*.ppm files in {}", a.input.display())))?;
        let probe = io::read_ppm(&first)?;
        run_pipeline(pipeline::ppm_frames(&a.input)?, probe.height(), probe.width(), &model, &config, &a.out)?
    } else {
        let reader = io::RawVideoReader::open(&a.input)?;
        let (h, w) = (reader.height, reader.width);
        drop(reader);
        run_pipeline(pipeline::raw_video_frames(&a.input)?, h, w, &model, &config, &a.out)?
    };
    report
        .result("frames_in", stats.frames_in)
        .result("frames_estimated", stats.frames_estimated)
        .result("frames_skipped", stats.frames_skipped)
        .result("throughput_fps", format!("{:.3}", stats.throughput_fps));
    report.row(vec!["frame".into(), "estimate_ms".into()]);
    for (i, ms) in stats.per_frame_ms.iter().enumerate() {
        report.row(vec![i.to_string(), format!("{ms:.3}")]);
    }
    emit(&report, &a.report)
}

fn run_pipeline<I>(
    frames: I,
    height: usize,
    width: usize,
    model: &EstimationModel,
    config: &PipelineConfig,
    out: &PathBuf,
) -> Result<pipeline::PipelineStats>
where
    I: Iterator<Item = spectracast::Result<spectracast::RgbImage>> + Send,
{
    let mut writer = SpectralVideoWriter::create(out, width, height, *model.grid())?;
    let stats = pipeline::process_video(frames, model, config, &mut writer)?;
    writer.finish()?;
    Ok(stats)
}

fn mask_values(values: &[f64]) -> Vec<bool> {
    values.iter().map(|&v| v > 0.5).collect()
}

fn add_partition(report: &MetricReport, r: &mut Report, mask: &[bool], prefix: &str) -> Result<()> {
    let (masked, rest) = report.partition(mask)?;
    for (side, p) in [("masked", &masked), ("unmasked", &rest)] {
        r.result(format!("{prefix}{side}.pixels"), p.pixels)
            .result(format!("{prefix}{side}.mean_rmse"), num(p.rmse))
            .result(format!("{prefix}{side}.mean_gfc"), num(p.gfc))
            .result(format!("{prefix}{side}.mean_delta_e"), num(p.delta_e));
    }
    Ok(())
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let mut report = Report::new("evaluate");
    report
        .config("truth", shown(&a.truth))
        .config("estimate", shown(&a.estimate))
        .config("mask", a.mask.as_ref().map_or("none".into(), |p| shown(p)));
    let mask = match &a.mask {
        Some(p) => Some(io::read_map(p).with_context(|| format!("reading mask {}", p.display()))?),
        None => None,
    };
    if &magic(&a.truth)? == io::SPECTRAL_VIDEO_MAGIC {
        if a.rmse_map.is_some() || a.highlight_map.is_some() {
            return Err(config_error("--rmse-map and --highlight-map apply to single cubes"));
        }
        evaluate_video(&a, mask, &mut report)?;
    } else {
        let truth = read_cube(&a.truth)?;
        let est = read_cube(&a.estimate)?;
        let tables = ColorimetryTables::load(truth.grid());
        let metrics = evaluate_cube(&truth, &est, &tables)?;
        for (k, v) in metrics.entries() {
            report.result(k, v);
        }
        if let Some((h, w, values)) = &mask {
            if (*h, *w) != (truth.height(), truth.width()) {
                return Err(config_error(format!("mask is {w}x{h}, cube is {}x{}", truth.width(), truth.height())));
            }
            add_partition(&metrics, &mut report, &mask_values(values), "")?;
        }
        let (h, w) = (truth.height(), truth.width());
        if let Some(p) = &a.rmse_map {
            io::write_map(p, h, w, &metrics.per_pixel_rmse)?;
        }
        if let Some(p) = &a.highlight_map {
            let flags: Vec<f64> = highlight_mask(&metrics.per_pixel_rmse)
                .into_iter()
                .map(|m| f64::from(u8::from(m)))
                .collect();
            io::write_map(p, h, w, &flags)?;
        }
    }
    emit(&report, &a.report)
}

fn evaluate_video(a: &EvaluateArgs, mask: Option<(usize, usize, Vec<f64>)>, report: &mut Report) -> Result<()> {
    let truth = SpectralVideoReader::open(&a.truth)?;
    let est = SpectralVideoReader::open(&a.estimate)?;
    if (truth.width, truth.height, truth.frames) != (est.width, est.height, est.frames) {
        bail!(
            "videos differ: truth {}x{}x{} frames, estimate {}x{}x{} frames",
            truth.width,
            truth.height,
            truth.frames,
            est.width,
            est.height,
            est.frames
        );
    }
    let (h, w, n) = (truth.height, truth.width, truth.frames);
    if let Some((mh, mw, _)) = &mask {
        if (*mh, *mw) != (n * h, w) {
            return Err(config_error(format!("mask is {mw}x{mh}, expected {w}x{} ({n} stacked frames)", n * h)));
        }
    }
    let tables = ColorimetryTables::load(&truth.grid);
    let mut header = vec!["frame", "mean_rmse", "mean_gfc", "mean_delta_e"];
    if mask.is_some() {
        header.extend(["unmasked_rmse", "unmasked_gfc", "unmasked_delta_e"]);
    }
    report.row(header.into_iter().map(String::from).collect());
    let mut sums = [0.0f64; 6];
    for (t, (tf, ef)) in truth.zip(est).enumerate() {
        let (tf, ef) = (tf?, ef?);
        let m = evaluate_cube(&tf, &ef, &tables).with_context(|| format!("frame {t}"))?;
        let mut row = vec![t.to_string(), num(m.mean_rmse), num(m.mean_gfc), num(m.mean_delta_e)];
        sums[0] += m.mean_rmse;
        sums[1] += m.mean_gfc;
        sums[2] += m.mean_delta_e;
        if let Some((_, _, values)) = &mask {
            let frame_mask = mask_values(&values[t * h * w..(t + 1) * h * w]);
            let (_, rest) = m.partition(&frame_mask)?;
            for (i, v) in [rest.rmse, rest.gfc, rest.delta_e].into_iter().enumerate() {
                sums[3 + i] += v;
                row.push(num(v));
            }
        }
        report.row(row);
    }
    let nf = n as f64;
    report
        .result("frames", n)
        .result("mean_rmse", num(sums[0] / nf))
        .result("mean_gfc", num(sums[1] / nf))
        .result("mean_delta_e", num(sums[2] / nf));
    if mask.is_some() {
        report
            .result("unmasked.mean_rmse", num(sums[3] / nf))
            .result("unmasked.mean_gfc", num(sums[4] / nf))
            .result("unmasked.mean_delta_e", num(sums[5] / nf));
    }
    Ok(())
}

fn search(a: SearchArgs, threads: usize) -> Result<()> {
    let spec = method_spec(&a.method)?;
    if a.fractions.is_empty() {
        return Err(config_error("--fractions needs at least one value"));
    }
    let cubes: Vec<SpectralCube> = a.cubes.iter().map(|p| read_cube(p)).collect::<Result<_>>()?;
    let names: Vec<String> = a.cubes.iter().map(|p| stem(p)).collect();
    let camera = load_camera(&a.camera.camera, cubes[0].grid())?;
    let images: Vec<&SpectralCube> = cubes.iter().collect();
    let outcome = search_representative(&images, &names, &camera, &a.fractions, a.seed, &spec)?;
    io::write_training(&a.out, &outcome.winner.training)?;

    let mut report = Report::new("search-train");
    echo_method(&mut report, &spec);
    report
        .config("camera", &a.camera.camera)
        .config(
            "fractions",
            a.fractions.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(","),
        )
        .config("seed", a.seed)
        .config("threads", threads)
        .config("output", shown(&a.out));
    for (i, p) in a.cubes.iter().enumerate() {
        report.config(format!("cube.{i}"), shown(p));
    }
    report
        .result("winner", &outcome.winner.id)
        .result("winner_score", num(outcome.winner.score.unwrap_or(f64::NAN)))
        .result("winner_samples", outcome.winner.training.len());
    report.row(vec!["step".into(), "candidate".into(), "samples".into(), "score".into()]);
    let rows = outcome
        .step1
        .iter()
        .flatten()
        .map(|c| ("1", c))
        .chain(outcome.step2.iter().map(|c| ("2", c)))
        .chain(outcome.step3.iter().map(|c| ("3", c)));
    for (step, c) in rows {
        report.row(vec![
            step.into(),
            c.id.clone(),
            c.training.len().to_string(),
            c.score.map_or("nan".into(), num),
        ]);
    }
    emit(&report, &a.report)
}

fn band_view(a: BandViewArgs) -> Result<()> {
    let cube = read_cube(&a.cube)?;
    let grid = *cube.grid();
    let band = match (a.nm, a.band) {
        (Some(nm), _) => grid
            .band_of(nm)
            .ok_or_else(|| config_error(format!("{nm} nm is outside {grid}")))?,
        (None, Some(b)) if b < grid.count() => b,
        (None, Some(b)) => return Err(config_error(format!("band {b} out of range for {} bands", grid.count()))),
        (None, None) => unreachable!("clap requires --nm or --band"),
    };
    io::write_gray_ppm(&a.out, cube.height(), cube.width(), &cube.band(band))?;
    println!("band {band} ({} nm) -> {}", grid.wavelength(band), a.out.display());
    Ok(())
}
