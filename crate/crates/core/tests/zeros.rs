mod common;

use std::io::Read;

use common::criteria::{load_dataset, HP_FILE};
use common::data_dir;
use mertens_core::rug::Rational;
use mertens_core::zeros::{damped_weight, parse_zero_str, write_zero_file};
use mertens_core::{parse_zero_file, take_top, weight_dataset, Mode};

fn fixture_text() -> String {
    let f = std::fs::File::open(data_dir().join(HP_FILE)).unwrap();
    let mut s = String::new();
    flate2::read::GzDecoder::new(f).read_to_string(&mut s).unwrap();
    s
}

#[test]
fn first_zero_matches_the_oracle_fixture() {
    let zeros = parse_zero_file(data_dir().join(HP_FILE), 50).unwrap();
    let z = &zeros[0];
    assert_eq!(z.gamma.as_str(), "14.134725141734693790457251983562470270784257115699");
    assert_eq!(z.alpha.as_str(), "0.089141521385034499198773386648160956446312155975646");
    assert_eq!(z.psi.as_str(), "1.6933111152043717401634055101673890219514861942563");
    assert_eq!(z.precision_digits, 50);
    // 14950 zeros below height 14000 (N(T) from the Riemann-von Mangoldt formula gives 14950.6)
    assert_eq!(zeros.len(), 14950);
}

#[test]
fn hstr_ordering_of_low_zeros_follows_alpha() {
    let zeros = parse_zero_file(data_dir().join(HP_FILE), 50).unwrap();
    let low = &zeros[..100];
    let cutoff = low[99].gamma.to_f64() + 0.5;
    let ds = weight_dataset(low, Mode::Hstr, cutoff).unwrap();
    let mut by_alpha = low.to_vec();
    by_alpha.sort_by(|a, b| b.alpha.value().cmp(a.alpha.value()));
    let got: Vec<&str> = ds.zeros.iter().map(|z| z.gamma().as_str()).collect();
    let want: Vec<&str> = by_alpha.iter().map(|z| z.gamma.as_str()).collect();
    assert_eq!(got, want);
}

#[test]
fn top_hp_zero_is_the_first_one() {
    let ds = load_dataset(HP_FILE, Mode::Hp, 14000.0).unwrap();
    let top = take_top(&ds, 120).unwrap();
    assert_eq!(top.len(), 120);
    assert!(top[0].gamma().as_str().starts_with("14.1347251417"));
    for w in top.windows(2) {
        assert!(w[0].alpha_star >= w[1].alpha_star);
    }
    assert!(take_top(&ds, ds.len() + 1).is_err());
}

#[test]
fn weights_agree_at_doubled_precision() {
    let ds = load_dataset(HP_FILE, Mode::Hp, 14000.0).unwrap();
    for z in ds.zeros.iter().step_by(97) {
        let p = z.alpha_star.prec();
        let fine = damped_weight(&z.base, &Mode::Hp.damping(), 2 * p);
        let rel = ((fine.to_f64() - z.alpha_star_f64()) / fine.to_f64()).abs();
        assert!(rel < 1e-40f64.max(f64::EPSILON), "relative change {rel}");
        assert!(z.alpha_star <= *z.base.alpha.value());
        assert!(z.alpha_star > 0);
    }
}

#[test]
fn fixture_round_trips_through_the_writer() {
    let text = fixture_text();
    let head: String = text.lines().take(300).map(|l| format!("{l}\n")).collect();
    let zeros = parse_zero_str(&head, 50).unwrap();
    let mut out = Vec::new();
    write_zero_file(&mut out, &["round trip"], &zeros).unwrap();
    let again = parse_zero_str(std::str::from_utf8(&out).unwrap(), 50).unwrap();
    assert_eq!(zeros, again);
    let data_lines: Vec<&str> = head.lines().filter(|l| !l.starts_with('#')).collect();
    let written: Vec<&str> = std::str::from_utf8(&out)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .collect();
    assert_eq!(data_lines, written);
}

#[test]
fn qn_weights_are_undamped() {
    let zeros = parse_zero_file(data_dir().join(HP_FILE), 50).unwrap();
    let ds = weight_dataset(&zeros[..50], Mode::Qn, 100.0).unwrap();
    for z in &ds.zeros {
        let a = z.base.alpha.value();
        let gap = ((z.alpha_star.to_rational().unwrap() - a) / a).abs();
        assert!(gap <= Rational::from((1, 1u64 << 60)) >> (z.alpha_star.prec() - 64));
    }
}
