use qdm_demo::{lgst_error, snd_phases, window_scan};

#[test]
fn window_scan_crosses_the_edge() {
    let v = window_scan(2, 4, 31).unwrap();
    let f_max = v["f_max"].as_f64().unwrap();
    let points = v["points"].as_array().unwrap();
    assert_eq!(points.len(), 31);
    for p in points {
        let f = p["f"].as_f64().unwrap();
        assert!(p["max_dev"].as_f64().unwrap() < 1e-9);
        if f <= f_max {
            assert_eq!(p["physical"], true, "F = {f}");
        }
    }
    assert_eq!(points.last().unwrap()["physical"], false);
}

#[test]
fn snd_phases_reports_approximant() {
    let v = snd_phases(3, 11, 2).unwrap();
    assert_eq!(v["snd_after"], true);
    assert!(v["distance"].as_f64().unwrap() <= v["bound"].as_f64().unwrap());
    assert_eq!(v["approx_phases"].as_array().unwrap().len(), 3);
    assert!(snd_phases(9, 1, 2).is_err());
}

#[test]
fn lgst_error_shrinks_with_shots() {
    let v = lgst_error(2, 5, &[100, 1_000_000]).unwrap();
    let rows = v["rows"].as_array().unwrap();
    let coarse = rows[0]["max_dev"].as_f64().unwrap();
    let fine = rows[1]["max_dev"].as_f64().unwrap();
    assert!(fine < coarse, "{fine} vs {coarse}");
    assert!(fine < 1e-2);
}
