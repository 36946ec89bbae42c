use std::fs;

use joint_select::closed_form::RegionPoint;
use joint_select::experiment::config::{Experiment, ExperimentConfig};
use joint_select::experiment::figures::{
    mallows_anchor_svg, region_svg, rum_anchor_svg, rum_contour_svg,
};
use joint_select::experiment::{
    read_csv_rows, run_figure_mallows_anchoring, run_figure_rum_anchoring, run_figure_rum_contour,
    run_region_figure, FigureDataset, FigureMeta, MallowsAnchorRow,
};
use quick_xml::events::Event;
use quick_xml::Reader;

fn small(e: Experiment) -> ExperimentConfig {
    ExperimentConfig {
        n: 4,
        trials: 400,
        batches: 2,
        resolution: 5,
        ..ExperimentConfig::defaults_for(e)
    }
}

/// Parses the whole document and returns the element names seen.
fn well_formed(svg: &str) -> Vec<String> {
    let mut reader = Reader::from_str(svg);
    let mut names = Vec::new();
    let mut depth = 0i32;
    loop {
        match reader.read_event().expect("well-formed XML") {
            Event::Start(e) => {
                depth += 1;
                names.push(String::from_utf8(e.name().as_ref().to_vec()).unwrap());
            }
            Event::Empty(e) => names.push(String::from_utf8(e.name().as_ref().to_vec()).unwrap()),
            Event::End(_) => depth -= 1,
            Event::Eof => break,
            _ => {}
        }
    }
    assert_eq!(depth, 0);
    names
}

fn self_contained(svg: &str) {
    let names = well_formed(svg);
    assert_eq!(names[0], "svg");
    for banned in ["image", "use", "script", "foreignObject"] {
        assert!(!names.iter().any(|n| n == banned), "{banned}");
    }
    assert!(!svg.contains("href"));
    assert!(!svg.contains("url("));
}

#[test]
fn all_charts_are_valid_standalone_svg() {
    self_contained(&mallows_anchor_svg(
        &run_figure_mallows_anchoring(&small(Experiment::MallowsAnchor)).unwrap(),
    ));
    self_contained(&rum_anchor_svg(
        &run_figure_rum_anchoring(&small(Experiment::RumAnchor)).unwrap(),
    ));
    let contour = ExperimentConfig {
        n: 10,
        ..small(Experiment::RumContour)
    };
    self_contained(&rum_contour_svg(&run_figure_rum_contour(&contour).unwrap()));
    self_contained(&region_svg(
        &run_region_figure(&small(Experiment::Region)).unwrap(),
    ));
}

#[test]
fn saved_dataset_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(Experiment::MallowsAnchor);
    let ds = run_figure_mallows_anchoring(&cfg).unwrap();
    ds.save(dir.path(), "fig").unwrap();
    let rows: Vec<MallowsAnchorRow> =
        read_csv_rows(fs::File::open(dir.path().join("fig.csv")).unwrap()).unwrap();
    assert_eq!(rows, ds.rows);
    let meta: FigureMeta =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fig.meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta, ds.meta);
    assert_eq!(meta.seed, Some(cfg.seed));
    assert_eq!(meta.parameters["trials"], "400");
    let back: FigureDataset<MallowsAnchorRow> =
        serde_json::from_str(&ds.to_json().unwrap()).unwrap();
    assert_eq!(back, ds);
}

#[test]
fn datasets_are_reproducible() {
    let cfg = small(Experiment::RumAnchor);
    let a = run_figure_rum_anchoring(&cfg)
        .unwrap()
        .to_csv_string()
        .unwrap();
    let b = run_figure_rum_anchoring(&cfg)
        .unwrap()
        .to_csv_string()
        .unwrap();
    assert_eq!(a, b);
    let other = ExperimentConfig {
        seed: cfg.seed + 1,
        ..cfg
    };
    assert_ne!(
        a,
        run_figure_rum_anchoring(&other)
            .unwrap()
            .to_csv_string()
            .unwrap()
    );
}

#[test]
fn region_dataset_matches_closed_form() {
    let ds = run_region_figure(&small(Experiment::Region)).unwrap();
    assert_eq!(ds.rows.len(), 25);
    assert_eq!(ds.meta.seed, None);
    for r in &ds.rows {
        assert_eq!(*r, RegionPoint::at(r.phi_a, r.phi_h));
    }
}

#[test]
fn contour_diagonal_zero_noise_is_certain() {
    let cfg = ExperimentConfig {
        grid_lo: 1e-9,
        grid_hi: 1e-9,
        resolution: 1,
        trials: 200,
        ..small(Experiment::RumContour)
    };
    let ds = run_figure_rum_contour(&cfg).unwrap();
    assert_eq!(ds.rows.len(), 1);
    assert_eq!(ds.rows[0].p_joint, 1.0);
}
