mod common;

use std::fs;
use std::path::Path;

use egodyn::dataset_io::{read_results, read_sequence, write_sequence, SequenceMeta, WriteOptions, MASK_DIR};
use egodyn::{simulate, CameraIntrinsics, Error};
use image::{GrayImage, ImageBuffer, Luma};
use tempfile::TempDir;

use common::{static_sphere, still_scene};

const W: u32 = 48;
const H: u32 = 36;

/// A five-frame sequence with one sphere in view.
fn sequence() -> TempDir {
    let mut spec = still_scene(vec![static_sphere(1, 2.0, 0.2, 0.3)], 1.25);
    spec.intrinsics = CameraIntrinsics::from_hfov(W, H, 90.0, 10.0).unwrap();
    spec.duration = 4.0 / 24.0;
    let dir = tempfile::tempdir().unwrap();
    let meta = SequenceMeta::from_spec(&spec);
    write_sequence(simulate(spec).unwrap(), meta, dir.path(), WriteOptions::default()).unwrap();
    dir
}

fn write_mask(path: &Path, w: u32, h: u32, value: u8) {
    GrayImage::from_pixel(w, h, Luma([value])).save(path).unwrap();
}

#[test]
fn clean_sequence_reads_back() {
    let dir = sequence();
    let seq = read_sequence(dir.path()).unwrap();
    assert_eq!(seq.len(), 5);
    seq.validate().unwrap();
    let f = seq.read_frame(3).unwrap();
    assert_eq!(f.truth.frame_index, 3);
    assert!(f.mask.data().contains(&1));
}

#[test]
fn missing_frame_names_the_file() {
    let dir = sequence();
    fs::remove_file(dir.path().join("depth/00002.png")).unwrap();
    match read_sequence(dir.path()) {
        Err(Error::MissingFile(p)) => assert!(p.ends_with("depth/00002.png")),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn extra_frame_is_a_count_mismatch() {
    let dir = sequence();
    fs::copy(dir.path().join("mask/00000.png"), dir.path().join("mask/00005.png")).unwrap();
    assert!(matches!(read_sequence(dir.path()), Err(Error::CountMismatch { .. })));
}

#[test]
fn meta_frame_list_must_match_count() {
    let dir = sequence();
    let path = dir.path().join("meta.json");
    let mut meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    meta["frame_count"] = 4.into();
    fs::write(&path, meta.to_string()).unwrap();
    assert!(matches!(read_sequence(dir.path()), Err(Error::CountMismatch { .. })));
}

#[test]
fn wrong_resolution_is_reported_on_read() {
    let dir = sequence();
    write_mask(&dir.path().join(MASK_DIR).join("00001.png"), W / 2, H / 2, 0);
    let seq = read_sequence(dir.path()).unwrap();
    seq.read_frame(0).unwrap();
    match seq.read_frame(1) {
        Err(Error::ResolutionMismatch { expected, actual, .. }) => {
            assert_eq!(expected, (W, H));
            assert_eq!(actual, (W / 2, H / 2));
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(seq.validate().is_err());
}

#[test]
fn mask_ids_above_six_are_rejected() {
    let dir = sequence();
    write_mask(&dir.path().join(MASK_DIR).join("00004.png"), W, H, 7);
    let seq = read_sequence(dir.path()).unwrap();
    match seq.read_mask(4) {
        Err(Error::IdOutOfRange { id, path }) => {
            assert_eq!(id, 7);
            assert!(path.ends_with("00004.png"));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn depth_beyond_max_range_is_rejected() {
    let dir = sequence();
    let img: ImageBuffer<Luma<u16>, Vec<u16>> = ImageBuffer::from_pixel(W, H, Luma([10_001]));
    img.save(dir.path().join("depth/00000.png")).unwrap();
    let seq = read_sequence(dir.path()).unwrap();
    assert!(matches!(seq.read_depth(0), Err(Error::DepthOutOfRange { value: 10_001, .. })));
}

#[test]
fn eight_bit_depth_is_malformed() {
    let dir = sequence();
    write_mask(&dir.path().join("depth/00000.png"), W, H, 3);
    let seq = read_sequence(dir.path()).unwrap();
    assert!(seq.read_depth(0).is_err());
}

#[test]
fn unsupported_format_version() {
    let dir = sequence();
    let path = dir.path().join("meta.json");
    let text = fs::read_to_string(&path).unwrap().replace("\"format_version\": 1", "\"format_version\": 9");
    fs::write(&path, text).unwrap();
    assert!(matches!(read_sequence(dir.path()), Err(Error::Malformed { .. })));
}

#[test]
fn results_out_of_order_are_malformed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.jsonl");
    let line = |i: usize| format!("{{\"frame_index\":{i},\"estimates\":[],\"diagnostics\":{{\"dropped_points\":0,\"filtered_outliers\":0,\"noise_cells\":0}}}}\n");
    fs::write(&path, line(0) + &line(1)).unwrap();
    assert_eq!(read_results(&path).unwrap().len(), 2);
    fs::write(&path, line(1) + &line(0)).unwrap();
    assert!(read_results(&path).is_err());
}
