use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use curvedither::baselines::{gaussian_dither, lpf_gaussian_dither, BaselineConfig};
use curvedither::blut::{partition, probability_index, slopes, Blut, Region};
use curvedither::image::{quantize_codewords, Channel, PlanarImage};
use curvedither::inject::{inject_frame, to_hdr, ChromaPolicy, InjectionConfig, DEFAULT_CHROMA_K};
use curvedither::markov::MarkovParams;
use curvedither::metrics::{banding_index_with_reference, BandingOptions, BandingReport};
use curvedither::pattern::{build_bank, load_bank, save_bank, BankConfig};
use curvedither::pnm::{atomic_write, load_image, save_hdr, save_image, stem_of};
use curvedither::rng::derive_seed;
use curvedither::synth::ramp_image;
use curvedither::{transition_probability, PROBABILITY_COUNT};
use serde::Serialize;

use crate::{BlutInspectArgs, ChromaMode, CliError, Command, DemoArgs, GenbankArgs, InjectArgs, MeasureArgs, Method, QuantizeArgs};

type Result<T> = std::result::Result<T, CliError>;

fn at<T>(r: curvedither::Result<T>, path: &Path) -> Result<T> {
    r.map_err(|e| CliError::from(e).at(path))
}

pub(crate) fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Genbank(a) => genbank(&a),
        Command::Quantize(a) => quantize(&a),
        Command::Inject(a) => inject(&a),
        Command::BlutInspect(a) => blut_inspect(&a),
        Command::Measure(a) => measure(&a),
        Command::Demo(a) => demo(&a),
    }
}

fn genbank(a: &GenbankArgs) -> Result<()> {
    let cfg = BankConfig {
        block_side: a.block_side,
        site_count: a.sites,
        variants: a.variants,
        params: MarkovParams {
            mu0: a.mu0,
            sigma0: a.sigma0,
            mu1: a.mu1,
            sigma1: a.sigma1,
            ..MarkovParams::default()
        },
        master_seed: a.seed,
    };
    let bank = build_bank(&cfg)?;
    at(save_bank(&bank, &a.out), &a.out)?;
    println!(
        "wrote {} blocks of {}x{} to {}",
        bank.blocks().len(),
        cfg.block_side,
        cfg.block_side,
        a.out.display()
    );
    Ok(())
}

fn quantize(a: &QuantizeArgs) -> Result<()> {
    let img = at(load_image(&stem_of(&a.input)), &a.input)?;
    let q = quantize_codewords(&img, a.drop_bits)?;
    at(save_image(&stem_of(&a.out), &q), &a.out)?;
    Ok(())
}

fn baseline_frame(q: &PlanarImage, method: Method, gain: f64, chroma: ChromaMode, seed: u64) -> Result<PlanarImage> {
    if !(gain.is_finite() && gain >= 0.0) {
        return Err(CliError::Validation(format!("gain {gain} must be finite and non-negative")));
    }
    let base = BaselineConfig::default();
    let planes = Channel::ALL.map(|ch| {
        let scale = match (ch, chroma) {
            (Channel::Y, _) => 1.0,
            (_, ChromaMode::Off) => 0.0,
            (_, ChromaMode::Fixed) => 0.5,
        };
        let cfg = BaselineConfig {
            sigma: base.sigma * gain * scale,
            seed: derive_seed(seed, &[ch as u64]),
            ..base
        };
        let plane = q.plane(ch);
        match method {
            Method::Gaussian => gaussian_dither(plane, q.bit_depth(), &cfg),
            _ => lpf_gaussian_dither(plane, q.bit_depth(), &cfg),
        }
    });
    let [y, cb, cr] = planes;
    Ok(PlanarImage::new(q.bit_depth(), [y?, cb?, cr?])?)
}

fn load_blut(path: &Option<PathBuf>, why: &str) -> Result<Blut> {
    let path = path
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("--blut is required {why}")))?;
    at(Blut::load(path), path)
}

fn inject(a: &InjectArgs) -> Result<()> {
    let q = at(load_image(&stem_of(&a.input)), &a.input)?;
    let d = match a.method {
        Method::Curved => {
            let bank_path = a
                .bank
                .as_ref()
                .ok_or_else(|| CliError::Usage("--bank is required for --method curved".into()))?;
            let blut = load_blut(&a.blut, "for --method curved")?;
            let bank = at(load_bank(bank_path), bank_path)?;
            let chroma = match a.chroma {
                ChromaMode::Off => ChromaPolicy::Off,
                ChromaMode::Fixed => ChromaPolicy::Fixed {
                    k: DEFAULT_CHROMA_K,
                    gain: 0.5 * a.gain,
                },
            };
            let cfg = InjectionConfig {
                chroma,
                frame_index: a.frame,
                tile_offset_seed: a.seed,
                ..InjectionConfig::with_gain(a.gain)
            };
            inject_frame(&q, &blut, &bank, &cfg)?
        }
        method => baseline_frame(&q, method, a.gain, a.chroma, derive_seed(a.seed, &[a.frame]))?,
    };
    let hdr = match &a.emit_hdr {
        Some(stem) => Some((stem, to_hdr(&d, &load_blut(&a.blut, "for --emit-hdr")?)?)),
        None => None,
    };
    at(save_image(&stem_of(&a.out), &d), &a.out)?;
    if let Some((stem, hdr)) = hdr {
        at(save_hdr(&stem_of(stem), &hdr), stem)?;
    }
    Ok(())
}

fn blut_inspect(a: &BlutInspectArgs) -> Result<()> {
    let blut = at(Blut::load(&a.blut), &a.blut)?;
    let part = partition(&blut, blut.highlight_threshold())?;
    let sl = slopes(&blut, &part);
    let mut out = String::new();
    writeln!(out, "y0: {}", part.y0).unwrap();
    writeln!(out, "y1: {}", part.y1).unwrap();
    writeln!(out, "yh: {}", part.yh).unwrap();
    writeln!(out, "highlight_threshold: {}", blut.highlight_threshold()).unwrap();
    for r in Region::ALL {
        let (s, e) = part.span(r);
        writeln!(out, "region {}: [{s}, {e})", r.name()).unwrap();
    }
    writeln!(out, "max_slope: {}", sl.max_slope()).unwrap();
    if sl.max_slope() > 0.0 {
        let mut bins = [0usize; PROBABILITY_COUNT];
        for t in part.y0..part.y1 {
            bins[probability_index(sl.slope(t), sl.max_slope())?] += 1;
        }
        for (k, n) in bins.iter().enumerate() {
            writeln!(out, "bin {k} (p={}): {n}", transition_probability(k)).unwrap();
        }
    } else {
        writeln!(out, "flat over mid/high: no luma noise would be injected").unwrap();
    }
    print!("{out}");
    Ok(())
}

#[derive(Serialize)]
struct ChannelReport {
    channel: &'static str,
    #[serde(flatten)]
    report: BandingReport,
}

#[derive(Serialize)]
struct MeasureReport {
    input: String,
    reference: Option<String>,
    channels: Vec<ChannelReport>,
}

fn channel_reports(img: &PlanarImage, reference: Option<&PlanarImage>) -> Vec<ChannelReport> {
    let opts = BandingOptions::default();
    Channel::ALL
        .iter()
        .map(|&ch| ChannelReport {
            channel: ch.suffix(),
            report: banding_index_with_reference(img.plane(ch), reference.map(|r| r.plane(ch)), &opts),
        })
        .collect()
}

const CSV_HEADER: [&str; 8] = [
    "image",
    "channel",
    "step_count",
    "step_energy",
    "distinct_codewords",
    "noise_power",
    "threshold",
    "quant_step",
];

fn csv_bytes(rows: &[(String, &ChannelReport)]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(err)?;
    for (image, c) in rows {
        let r = &c.report;
        w.write_record([
            image.clone(),
            c.channel.to_string(),
            r.step_count.to_string(),
            r.step_energy.to_string(),
            r.distinct_codewords.to_string(),
            r.noise_power.to_string(),
            r.threshold.to_string(),
            r.quant_step.to_string(),
        ])
        .map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn same_shape(a: &PlanarImage, b: &PlanarImage) -> Result<()> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(CliError::Validation(format!(
            "reference is {}x{}, image is {}x{}",
            b.width(),
            b.height(),
            a.width(),
            a.height()
        )));
    }
    Ok(())
}

fn measure(a: &MeasureArgs) -> Result<()> {
    let img = at(load_image(&stem_of(&a.input)), &a.input)?;
    let reference = match &a.reference {
        Some(p) => {
            let r = at(load_image(&stem_of(p)), p)?;
            same_shape(&img, &r)?;
            Some(r)
        }
        None => None,
    };
    let report = MeasureReport {
        input: a.input.display().to_string(),
        reference: a.reference.as_ref().map(|p| p.display().to_string()),
        channels: channel_reports(&img, reference.as_ref()),
    };
    if let Some(path) = &a.csv {
        let rows: Vec<_> = report.channels.iter().map(|c| (report.input.clone(), c)).collect();
        at(atomic_write(path, &csv_bytes(&rows)?), path)?;
    }
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(())
}

const DEMO_WIDTH: usize = 1024;
const DEMO_HEIGHT: usize = 64;

fn demo(a: &DemoArgs) -> Result<()> {
    fs::create_dir_all(&a.out).map_err(|e| CliError::from(e).at(&a.out))?;
    let at = |name: &str| -> PathBuf { a.out.join(name) };

    let ramp = ramp_image(DEMO_WIDTH, DEMO_HEIGHT, 10)?;
    let q = quantize_codewords(&ramp, 2)?;
    let blut = Blut::linear();
    let bank = build_bank(&BankConfig {
        variants: 2,
        master_seed: a.seed,
        ..BankConfig::default()
    })?;
    blut.save(&at("blut.json"))?;
    save_bank(&bank, &at("bank.cmgn"))?;
    save_image(&at("ramp"), &ramp)?;
    save_image(&at("quantized"), &q)?;

    let cfg = InjectionConfig {
        tile_offset_seed: a.seed,
        ..InjectionConfig::default()
    };
    let curved = inject_frame(&q, &blut, &bank, &cfg)?;
    save_hdr(&at("curved_hdr"), &to_hdr(&curved, &blut)?)?;
    let outputs = [
        ("curved", curved),
        ("gaussian", baseline_frame(&q, Method::Gaussian, 1.0, ChromaMode::Fixed, a.seed)?),
        ("lpf_gaussian", baseline_frame(&q, Method::LpfGaussian, 1.0, ChromaMode::Fixed, a.seed)?),
    ];

    let mut reports = vec![("quantized".to_string(), channel_reports(&q, None))];
    for (name, img) in &outputs {
        save_image(&at(name), img)?;
        reports.push((name.to_string(), channel_reports(img, Some(&q))));
    }
    let rows: Vec<(String, &ChannelReport)> = reports
        .iter()
        .flat_map(|(name, rs)| rs.iter().map(move |r| (name.clone(), r)))
        .collect();
    atomic_write(&at("metrics.csv"), &csv_bytes(&rows)?)?;

    println!("{:<14} {:>10} {:>9} {:>12}", "image", "steps", "distinct", "noise_power");
    for (name, rs) in &reports {
        let y = &rs[0].report;
        println!("{name:<14} {:>10} {:>9} {:>12.4}", y.step_count, y.distinct_codewords, y.noise_power);
    }
    println!("outputs in {}", a.out.display());
    Ok(())
}
