use std::ffi::{CStr, CString};
use std::ptr;

use pda_workbench_ffi::*;

fn last_error() -> String {
    let p = pda_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn parse(text: &str) -> (PdaStatus, *mut PdaHandle) {
    let c = CString::new(text).unwrap();
    let mut h = ptr::null_mut();
    let status = unsafe { pda_parse(c.as_ptr(), &mut h) };
    (status, h)
}

#[test]
fn construct_params_and_text() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(pda_construct_partition(3, 2, &mut h), PdaStatus::Ok);
        let mut p = PdaParams::default();
        assert_eq!(pda_params(h, &mut p), PdaStatus::Ok);
        assert_eq!(p, PdaParams { users: 9, rows: 9, stars: 3, symbols: 18 });
        assert_eq!(pda_verify(h), PdaStatus::Ok);
        assert!(pda_last_error().is_null());

        let mut text = ptr::null_mut();
        assert_eq!(pda_to_text(h, &mut text), PdaStatus::Ok);
        let owned = CStr::from_ptr(text).to_str().unwrap().to_owned();
        assert!(owned.starts_with("PDA 9 9\n"));
        pda_string_free(text);
        pda_free(h);

        let (status, again) = parse(&owned);
        assert_eq!(status, PdaStatus::Ok);
        assert_eq!(pda_verify(again), PdaStatus::Ok);
        pda_free(again);
    }
}

#[test]
fn other_families() {
    unsafe {
        let mut h = ptr::null_mut();
        let mut p = PdaParams::default();
        assert_eq!(pda_construct_bipartite(5, 2, 1, &mut h), PdaStatus::Ok);
        pda_params(h, &mut p);
        assert_eq!((p.users, p.rows, p.stars, p.symbols), (10, 5, 2, 10));
        pda_free(h);
        assert_eq!(pda_construct_grouping(5, 2, 1, 2, &mut h), PdaStatus::Ok);
        pda_params(h, &mut p);
        assert_eq!((p.users, p.symbols), (20, 20));
        pda_free(h);
        assert_eq!(pda_construct_mn(4, 2, &mut h), PdaStatus::Ok);
        pda_params(h, &mut p);
        assert_eq!((p.users, p.rows, p.stars, p.symbols), (4, 6, 3, 4));
        pda_free(h);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(pda_construct_bipartite(3, 2, 1, &mut h), PdaStatus::InvalidArgument);
        assert!(last_error().contains("a + b < m"));
        assert!(h.is_null());
        assert_eq!(pda_construct_mn(4, 2, ptr::null_mut()), PdaStatus::NullPointer);
        assert_eq!(pda_parse(ptr::null(), &mut h), PdaStatus::NullPointer);
        assert_eq!(pda_verify(ptr::null()), PdaStatus::NullPointer);
    }
    let (status, _) = parse("PDA 2 2\n1 *\n");
    assert_eq!(status, PdaStatus::ParseError);
    assert!(last_error().contains("line"));
    let (status, h) = parse("PDA 2 2\n1 1\n* *\n");
    assert_eq!(status, PdaStatus::Ok);
    unsafe {
        assert_eq!(pda_verify(h), PdaStatus::VerificationFailed);
        assert!(last_error().contains("C3"));
        let mut p = PdaParams::default();
        assert_eq!(pda_params(h, &mut p), PdaStatus::Ok);
        let mut n = 0;
        assert_eq!(pda_simulate(h, 2, ptr::null(), 8, 0, &mut n), PdaStatus::VerificationFailed);
        pda_free(h);
    }
    let (_, h) = parse("PDA 2 2\n1 *\n2 2\n");
    unsafe {
        let mut p = PdaParams::default();
        assert_eq!(pda_params(h, &mut p), PdaStatus::Malformed);
        pda_free(h);
    }
}

#[test]
fn bounds_with_witness() {
    let (_, h) = parse("PDA 4 6\n1 2 3 * 7 8\n4 5 * 3 9 10\n6 * 5 2 11 *\n* 6 4 1 * 11\n");
    unsafe {
        let mut b = PdaBound::default();
        let mut w = [0usize; 6];
        assert_eq!(pda_bound_exact(h, 20, 1_000_000, &mut b, w.as_mut_ptr(), w.len()), PdaStatus::Ok);
        assert_eq!(b, PdaBound { value: 11, rate_num: 11, rate_den: 4, exact: true });
        assert_eq!(w, [1, 5, 2, 6, 3, 4]);
        assert_eq!(pda_bound_exact(h, 20, 1_000_000, &mut b, w.as_mut_ptr(), 3), PdaStatus::InvalidArgument);
        assert_eq!(pda_bound_greedy(h, &mut b, ptr::null_mut(), 0), PdaStatus::Ok);
        assert!(b.value <= 11 && !b.exact);
        assert_eq!(pda_bound_exact(h, 3, 1_000_000, &mut b, ptr::null_mut(), 0), PdaStatus::BudgetExceeded);
        assert!(!b.exact);
        pda_free(h);
    }
}

#[test]
fn simulate_and_search() {
    unsafe {
        let mut h = ptr::null_mut();
        pda_construct_mn(4, 2, &mut h);
        let mut n = 0;
        let d = [1usize, 2, 3, 4];
        assert_eq!(pda_simulate(h, 4, d.as_ptr(), 64, 9, &mut n), PdaStatus::Ok);
        assert_eq!(n, 4);
        assert_eq!(pda_simulate(h, 6, ptr::null(), 16, 9, &mut n), PdaStatus::Ok);
        let zero = [0usize; 4];
        assert_eq!(pda_simulate(h, 4, zero.as_ptr(), 8, 0, &mut n), PdaStatus::InvalidArgument);
        pda_free(h);

        let mut b = PdaBound::default();
        assert_eq!(pda_search(4, 6, 3, 10_000_000, &mut b), PdaStatus::Ok);
        assert_eq!(b, PdaBound { value: 4, rate_num: 2, rate_den: 3, exact: true });
        assert_eq!(pda_search(4, 6, 3, 10, &mut b), PdaStatus::BudgetExceeded);
    }
}

#[test]
fn free_accepts_null() {
    unsafe {
        pda_free(ptr::null_mut());
        pda_string_free(ptr::null_mut());
    }
}
