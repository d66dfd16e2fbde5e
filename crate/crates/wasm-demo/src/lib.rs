//! Browser bindings for the interactive demo page.
//!
//! Each export takes plain numbers/strings and returns one JSON document,
//! so the page needs no framework — `www/index.html` renders the results
//! with a few dozen lines of vanilla JS. Errors come back as
//! `{"error": "..."}` instead of exceptions.

use wasm_bindgen::prelude::*;

use clustering_machine::frame::{Frame, FrameMeasure};
use clustering_machine::machine::{ClusteringMachine, OrthonormalSet};
use clustering_machine::signal::{dissimilarity_f, norm_ball_member, sq_distance, Signal};
use clustering_machine::tones::{
    add_spectral_noise, magnitude_spectrum, recognize, synth_tone, ReferenceToneSet, ToneMeasure,
    SPECTRUM_BINS,
};
use serde_json::json;

fn or_error(result: Result<serde_json::Value, String>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

/// Projector scores, verdict, and reference comparisons for one RGB color.
#[wasm_bindgen]
pub fn classify_color(r: f64, g: f64, b: f64, theta_hi: f64, theta_lo: f64) -> String {
    or_error(classify_color_impl(r, g, b, theta_hi, theta_lo))
}

fn classify_color_impl(
    r: f64,
    g: f64,
    b: f64,
    theta_hi: f64,
    theta_lo: f64,
) -> Result<serde_json::Value, String> {
    let color = Signal::new(vec![r, g, b]).map_err(|e| e.to_string())?;
    let machine = ClusteringMachine::new(
        OrthonormalSet::canonical(3),
        vec![vec![0], vec![1], vec![2]],
        vec!["R".into(), "G".into(), "B".into()],
    )
    .unwrap();
    let scores = machine.project_scores(&color).map_err(|e| e.to_string())?;
    let verdict = machine
        .classify(&color, theta_hi, theta_lo)
        .map_err(|e| e.to_string())?;

    let references = [
        ("R", Signal::basis_vector(3, 0).unwrap()),
        ("G", Signal::basis_vector(3, 1).unwrap()),
        ("B", Signal::basis_vector(3, 2).unwrap()),
        ("purple", Signal::new(vec![0.6, 0.0, 0.6]).unwrap()),
        ("dark green", Signal::new(vec![0.0, 0.8, 0.2]).unwrap()),
    ];
    let comparisons: Vec<_> = references
        .iter()
        .map(|(name, p)| {
            json!({
                "name": name,
                "sq_distance": sq_distance(p, &color).unwrap(),
                "dissimilarity_f": dissimilarity_f(p, &color).unwrap(),
            })
        })
        .collect();

    Ok(json!({
        "scores": machine.labels().iter().zip(&scores.scores)
            .map(|(l, q)| json!({ "label": l, "score": q })).collect::<Vec<_>>(),
        "total": scores.total,
        "norm_sq": scores.input_norm_sq,
        "verdict": verdict,
        "references": comparisons,
    }))
}

/// Synthesize a harmonic tone, optionally noise the spectrum, and rank the
/// 48 reference tones under the chosen measure. Returns the top of the
/// ranking plus a prefix of the spectrum for plotting.
#[wasm_bindgen]
pub fn recognize_tone(
    fundamental: u32,
    amplitudes: &str,
    harmonics: u32,
    measure: &str,
    noise_bins: u32,
    noise_amp: f64,
    seed: u32,
) -> String {
    or_error(recognize_tone_impl(
        fundamental,
        amplitudes,
        harmonics,
        measure,
        noise_bins,
        noise_amp,
        seed,
    ))
}

fn recognize_tone_impl(
    fundamental: u32,
    amplitudes: &str,
    harmonics: u32,
    measure: &str,
    noise_bins: u32,
    noise_amp: f64,
    seed: u32,
) -> Result<serde_json::Value, String> {
    let amps = Signal::from_csv_row(amplitudes).map_err(|e| e.to_string())?;
    let measure = match measure {
        "sqnorm" => ToneMeasure::SqNorm,
        "f" | "F" => ToneMeasure::F,
        "delta" => ToneMeasure::Delta,
        "nabla" => ToneMeasure::Nabla,
        other => return Err(format!("unknown measure {other:?}")),
    };

    let tone = synth_tone(fundamental as usize, amps.entries()).map_err(|e| e.to_string())?;
    let mut spectrum = magnitude_spectrum(&tone, true);
    if noise_bins > 0 {
        spectrum = add_spectral_noise(&spectrum, noise_bins as usize, noise_amp, seed as u64)
            .map_err(|e| e.to_string())?;
    }

    let refs = ReferenceToneSet::new(harmonics as usize).map_err(|e| e.to_string())?;
    let frame;
    let frame_ref = match measure {
        ToneMeasure::Delta | ToneMeasure::Nabla => {
            frame = Frame::scaled_pair(SPECTRUM_BINS, 0.5).unwrap();
            Some(&frame)
        }
        _ => None,
    };
    let ranked = recognize(&spectrum, &refs, measure, frame_ref).map_err(|e| e.to_string())?;

    let top_harmonic = amps.dim() as u32 * fundamental;
    let plot_len = ((top_harmonic as f64 * 1.15) as usize)
        .max(noise_bins as usize + 100)
        .clamp(1200, SPECTRUM_BINS);
    let plot: Vec<f64> = spectrum.magnitudes()[..plot_len]
        .iter()
        .map(|m| (m * 1e6).round() / 1e6)
        .collect();

    Ok(json!({
        "recognized": ranked[0].0.to_string(),
        "ranking": ranked.iter().take(8)
            .map(|(id, v)| json!({ "tone": id.to_string(), "value": v }))
            .collect::<Vec<_>>(),
        "spectrum": plot,
        "marker_bins": (1..=amps.dim()).map(|h| h * fundamental as usize)
            .collect::<Vec<_>>(),
    }))
}

/// The noise-robust cluster experiment: distances and ε-membership of a
/// clean and a noised signal around a center, under the norm and under the
/// Δ/∇ measures of the scaled-pair frame of matching dimension.
#[wasm_bindgen]
pub fn frame_membership(center: &str, signal: &str, noise: &str, epsilon: f64) -> String {
    or_error(frame_membership_impl(center, signal, noise, epsilon))
}

fn frame_membership_impl(
    center: &str,
    signal: &str,
    noise: &str,
    epsilon: f64,
) -> Result<serde_json::Value, String> {
    let center = Signal::from_csv_row(center).map_err(|e| e.to_string())?;
    let signal = Signal::from_csv_row(signal).map_err(|e| e.to_string())?;
    let noise = Signal::from_csv_row(noise).map_err(|e| e.to_string())?;
    let noised = signal.add(&noise).map_err(|e| e.to_string())?;
    let frame = Frame::scaled_pair(center.dim(), 0.5).map_err(|e| e.to_string())?;

    let describe = |f: &Signal| -> Result<serde_json::Value, String> {
        let report = frame.dissimilarity(f, &center).map_err(|e| e.to_string())?;
        Ok(json!({
            "norm_distance": sq_distance(&center, f).map_err(|e| e.to_string())?.sqrt(),
            "delta": report.delta,
            "nabla": report.nabla,
            "member": {
                "norm": norm_ball_member(&center, f, epsilon).map_err(|e| e.to_string())?,
                "delta": frame.cluster_member(&center, f, epsilon, FrameMeasure::Delta)
                    .map_err(|e| e.to_string())?,
                "nabla": frame.cluster_member(&center, f, epsilon, FrameMeasure::Nabla)
                    .map_err(|e| e.to_string())?,
            },
        }))
    };

    Ok(json!({
        "epsilon": epsilon,
        "frame_bound": frame.bounds().0,
        "clean": describe(&signal)?,
        "noised": describe(&noised)?,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn color_export_matches_the_known_scores() {
        let v: serde_json::Value =
            serde_json::from_str(&classify_color(0.95, 0.1, 0.1, 0.9, 0.05)).unwrap();
        assert_eq!(v["scores"][0]["score"], 0.9025);
        assert_eq!(v["verdict"]["case"], "Probable");
        let err: serde_json::Value =
            serde_json::from_str(&classify_color(f64::NAN, 0.0, 0.0, 0.9, 0.05)).unwrap();
        assert!(err["error"].is_string());
    }

    #[test]
    fn tone_export_recognizes_and_plots() {
        let v: serde_json::Value =
            serde_json::from_str(&recognize_tone(110, "1,2,1", 2, "sqnorm", 0, 0.0, 0)).unwrap();
        assert_eq!(v["recognized"], "A2");
        assert_eq!(v["marker_bins"], serde_json::json!([110, 220, 330]));
        assert!(v["spectrum"].as_array().unwrap().len() >= 1200);

        let v: serde_json::Value =
            serde_json::from_str(&recognize_tone(110, "1,2,1", 0, "f", 0, 0.0, 0)).unwrap();
        assert_eq!(v["recognized"], "A3");

        let noised = recognize_tone(110, "1,2,1", 2, "delta", 1000, 0.1, 7);
        let v: serde_json::Value = serde_json::from_str(&noised).unwrap();
        assert_eq!(v["recognized"], "A2");
        assert_eq!(
            noised,
            recognize_tone(110, "1,2,1", 2, "delta", 1000, 0.1, 7)
        );

        let err: serde_json::Value =
            serde_json::from_str(&recognize_tone(12000, "1,1", 2, "sqnorm", 0, 0.0, 0)).unwrap();
        assert!(err["error"].is_string());
    }

    #[test]
    fn membership_export_reproduces_the_noise_scenario() {
        let v: serde_json::Value =
            serde_json::from_str(&frame_membership("1,2,3", "1.1,2,3", "0,0.1,0", 0.1)).unwrap();
        assert_eq!(v["clean"]["member"]["norm"], true);
        assert_eq!(v["noised"]["member"]["norm"], false);
        assert_eq!(v["noised"]["member"]["delta"], true);
        assert_eq!(v["noised"]["member"]["nabla"], true);
        assert!((v["noised"]["delta"].as_f64().unwrap() - 0.1).abs() < 1e-12);
        assert!((v["noised"]["nabla"].as_f64().unwrap() - 0.08).abs() < 1e-12);
    }
}
