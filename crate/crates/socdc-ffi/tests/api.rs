use std::ffi::{CStr, CString};
use std::ptr;

use socdc_ffi::*;

const FIX_A0: [f64; 16] = [1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0];
const FIX_A1: [f64; 16] = [
    -1.0, 0.0, 0.0, -0.5, 0.0, -1.0, 0.0, -0.25, 0.0, 0.0, 0.5, 0.0, -0.5, -0.25, 0.0, 0.0,
];
const FIX_H: [f64; 4] = [0.0, 0.0, 0.0, 1.0];

fn last_error() -> String {
    let p = socdc_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn fix_a() -> *mut SocdcInstance {
    let mut inst = ptr::null_mut();
    let st = unsafe {
        socdc_instance_new(4, FIX_A0.as_ptr(), FIX_A1.as_ptr(), FIX_H.as_ptr(), ptr::null(), &mut inst)
    };
    assert_eq!(st, SocdcStatus::Ok);
    inst
}

#[test]
fn worked_example_round_trip() {
    let inst = fix_a();
    assert_eq!(unsafe { socdc_instance_dim(inst) }, 4);
    let mut cut = ptr::null_mut();
    assert_eq!(unsafe { socdc_build_cut(inst, &mut cut) }, SocdcStatus::Ok);
    unsafe {
        assert!((socdc_cut_s(cut) - 0.5).abs() < 1e-12);
        assert_eq!(socdc_cut_dim(cut), 4);
        assert!(!socdc_cut_is_halfspace(cut));
        assert_eq!(socdc_cut_verdict(cut), SocdcVerdict::Verified);

        let mut a_s = [0.0; 16];
        assert_eq!(socdc_cut_as(cut, a_s.as_mut_ptr(), 16), SocdcStatus::Ok);
        let expect = [0.0, 0.0, 0.0, -2.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 6.0, 0.0, -2.0, -1.0, 0.0, -4.0];
        for (x, e) in a_s.iter().zip(expect) {
            assert!((x - e / 8.0).abs() < 1e-12);
        }

        let mut b = [0.0; 4];
        assert_eq!(socdc_cut_bs(cut, b.as_mut_ptr(), 4), SocdcStatus::Ok);
        let r = b[0] / 2.0;
        assert!(r > 0.0);
        for (x, e) in b.iter().zip([2.0, 1.0, 0.0, 5.0]) {
            assert!((x - r * e).abs() < 1e-10);
        }

        let k = socdc_cut_bs_cols(cut);
        let mut big = vec![0.0; 4 * k];
        assert_eq!(socdc_cut_big_bs(cut, big.as_mut_ptr(), big.len()), SocdcStatus::Ok);
        // A_s = B Bᵀ - b bᵀ.
        for i in 0..4 {
            for j in 0..4 {
                let bb: f64 = (0..k).map(|c| big[i * k + c] * big[j * k + c]).sum();
                assert!((bb - b[i] * b[j] - a_s[i * 4 + j]).abs() < 1e-12);
            }
        }

        let mut inside = false;
        let xbar = [0.5, 0.0, 0.0, 1.0];
        assert_eq!(socdc_cut_contains(cut, xbar.as_ptr(), 4, 0.0, &mut inside), SocdcStatus::Ok);
        assert!(inside);
        let neg = [-0.5, 0.0, 0.0, -1.0];
        assert_eq!(socdc_cut_contains(cut, neg.as_ptr(), 4, 0.0, &mut inside), SocdcStatus::Ok);
        assert!(!inside);

        let mut json = ptr::null_mut();
        assert_eq!(socdc_cut_to_json(cut, &mut json), SocdcStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        socdc_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["s"].as_f64().unwrap(), socdc_cut_s(cut));

        socdc_cut_free(cut);
        socdc_instance_free(inst);
    }
}

#[test]
fn json_instances_and_halfspace_cut() {
    let text = CString::new(r#"{"version": "1", "A0": [[1, 0], [0, -1]], "A1": [[-2, 1], [1, 0]]}"#).unwrap();
    let mut inst = ptr::null_mut();
    unsafe {
        assert_eq!(socdc_instance_from_json(text.as_ptr(), &mut inst), SocdcStatus::Ok);
        let mut cut = ptr::null_mut();
        assert_eq!(socdc_build_cut(inst, &mut cut), SocdcStatus::Ok);
        assert!(socdc_cut_is_halfspace(cut));
        assert_eq!(socdc_cut_verdict(cut), SocdcVerdict::Failed);
        let k = socdc_cut_bs_cols(cut);
        let mut big = vec![1.0; 2 * k];
        assert_eq!(socdc_cut_big_bs(cut, big.as_mut_ptr(), big.len()), SocdcStatus::Ok);
        assert!(big.iter().all(|v| *v == 0.0));
        let mut inside = false;
        for (x, want) in [([1.0, 2.0], true), ([2.0, 1.0], false)] {
            assert_eq!(socdc_cut_contains(cut, x.as_ptr(), 2, 0.0, &mut inside), SocdcStatus::Ok);
            assert_eq!(inside, want);
        }
        socdc_cut_free(cut);
        socdc_instance_free(inst);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut inst = ptr::null_mut();
        let st = socdc_instance_new(4, ptr::null(), FIX_A1.as_ptr(), ptr::null(), ptr::null(), &mut inst);
        assert_eq!(st, SocdcStatus::NullPointer);
        assert!(inst.is_null());
        assert!(last_error().contains("a0"));

        let bad = CString::new("{not json").unwrap();
        assert_eq!(socdc_instance_from_json(bad.as_ptr(), &mut inst), SocdcStatus::InvalidInput);
        assert!(!last_error().is_empty());

        let nan = [f64::NAN; 16];
        let st = socdc_instance_new(4, nan.as_ptr(), FIX_A1.as_ptr(), ptr::null(), ptr::null(), &mut inst);
        assert_eq!(st, SocdcStatus::InvalidInput);

        // Condition 3 fails: A1 vanishes on Null(A0).
        let a0 = [1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0];
        let a1 = [0.0, 1.0, -1.0, 1.0, 0.0, 0.0, -1.0, 0.0, 0.0];
        let h = [0.0, 0.0, 1.0];
        assert_eq!(socdc_instance_new(3, a0.as_ptr(), a1.as_ptr(), h.as_ptr(), ptr::null(), &mut inst), SocdcStatus::Ok);
        let mut cut = ptr::null_mut();
        assert_eq!(socdc_build_cut(inst, &mut cut), SocdcStatus::ConditionFailed);
        assert!(cut.is_null());
        assert!(last_error().starts_with("Cond3Failed"));
        socdc_instance_free(inst);

        let inst = fix_a();
        assert!(socdc_last_error_message().is_null());
        let mut cut = ptr::null_mut();
        assert_eq!(socdc_build_cut(inst, &mut cut), SocdcStatus::Ok);
        let mut small = [0.0; 4];
        assert_eq!(socdc_cut_as(cut, small.as_mut_ptr(), 4), SocdcStatus::BufferTooSmall);
        let x = [1.0, 0.0];
        let mut inside = false;
        assert_eq!(socdc_cut_contains(cut, x.as_ptr(), 2, 0.0, &mut inside), SocdcStatus::InvalidInput);
        socdc_cut_free(cut);
        socdc_instance_free(inst);

        assert!(socdc_cut_s(ptr::null()).is_nan());
        assert_eq!(socdc_build_cut(ptr::null(), &mut cut), SocdcStatus::NullPointer);
        socdc_cut_free(ptr::null_mut());
        socdc_instance_free(ptr::null_mut());
        socdc_string_free(ptr::null_mut());
    }
}

#[test]
fn errors_are_per_thread() {
    unsafe {
        let mut inst = ptr::null_mut();
        socdc_instance_new(0, ptr::null(), ptr::null(), ptr::null(), ptr::null(), &mut inst);
    }
    assert!(!socdc_last_error_message().is_null());
    std::thread::spawn(|| assert!(socdc_last_error_message().is_null())).join().unwrap();
}

#[test]
fn options_and_trs() {
    let mut opts = socdc_options_default();
    assert!(opts.tol > 0.0);
    opts.seed = 3;
    let q = [-1.0, 0.0, 0.0, 1.0];
    let g = [0.0, 0.5];
    let mut value = 0.0;
    let mut y = [0.0; 2];
    let st = unsafe { socdc_trs_solve(2, q.as_ptr(), g.as_ptr(), &opts, &mut value, y.as_mut_ptr()) };
    assert_eq!(st, SocdcStatus::Ok, "{}", last_error());
    assert!((value + 1.125).abs() < 1e-7, "{value}");
    assert!((y[1] + 0.25).abs() < 1e-6);
    assert!((y[0] * y[0] + y[1] * y[1] - 1.0).abs() < 1e-6);

    let v = unsafe { CStr::from_ptr(socdc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
