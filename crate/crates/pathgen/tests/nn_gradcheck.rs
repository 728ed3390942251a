//! Finite-difference checks for every differentiable op's backward pass.

use ndarray::Array2;
use pathgen::nn::{finite_difference, max_relative_error, Tape, Var};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn randn(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.random::<f64>() * 2.0 - 1.0)
}

/// Builds the loss twice: once for analytic gradients, then per input for
/// central differences. `f` must be a pure function of the inputs.
fn check<F>(name: &str, inputs: &[Array2<f64>], tol: f64, f: F)
where
    F: Fn(&Tape, &[Var]) -> Var,
{
    let tape = Tape::new();
    let vars: Vec<Var> = inputs.iter().map(|a| tape.leaf(a.clone())).collect();
    let loss = f(&tape, &vars);
    let grads = tape.backward(loss);
    for (i, input) in inputs.iter().enumerate() {
        let analytic = grads
            .get(vars[i])
            .cloned()
            .unwrap_or_else(|| Array2::zeros(input.dim()));
        let fd = finite_difference(
            |x| {
                let mut probe: Vec<Array2<f64>> = inputs.to_vec();
                probe[i] = x.clone();
                let t = Tape::new();
                let vs: Vec<Var> = probe.iter().map(|a| t.leaf(a.clone())).collect();
                t.scalar(f(&t, &vs))
            },
            input,
            1e-5,
        );
        let err = max_relative_error(&analytic, &fd, 1e-4);
        assert!(
            err < tol,
            "{name}: gradient mismatch on input {i}, max rel err {err:.3e}"
        );
    }
}

/// Reduce any output to a scalar through a fixed projection so all entries
/// influence the loss unevenly.
fn project(tape: &Tape, v: Var, rng_seed: u64) -> Var {
    let (r, c) = tape.shape(v);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let w = tape.constant(randn(&mut rng, r, c));
    let prod = tape.mul(v, w);
    tape.sum_all(prod)
}

#[test]
fn elementwise_ops() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = randn(&mut rng, 3, 4);
    let b = randn(&mut rng, 3, 4);
    check("add", &[a.clone(), b.clone()], 1e-6, |t, v| {
        project(t, t.add(v[0], v[1]), 10)
    });
    check("sub", &[a.clone(), b.clone()], 1e-6, |t, v| {
        project(t, t.sub(v[0], v[1]), 11)
    });
    check("mul", &[a.clone(), b.clone()], 1e-6, |t, v| {
        project(t, t.mul(v[0], v[1]), 12)
    });
    check("scale", &[a.clone()], 1e-6, |t, v| {
        project(t, t.scale(v[0], -2.5), 13)
    });
    check("add_scalar", &[a.clone()], 1e-6, |t, v| {
        project(t, t.add_scalar(v[0], 0.7), 14)
    });
    check("exp", &[a.clone()], 1e-6, |t, v| project(t, t.exp(v[0]), 15));
    check("square", &[a.clone()], 1e-6, |t, v| {
        project(t, t.square(v[0]), 16)
    });
    check("silu", &[a.clone()], 1e-6, |t, v| project(t, t.silu(v[0]), 17));
    check("gelu", &[a.clone()], 1e-6, |t, v| project(t, t.gelu(v[0]), 18));
    check("tanh", &[a.clone()], 1e-6, |t, v| project(t, t.tanh(v[0]), 19));
    let pos = a.mapv(|x| x.abs() + 0.5);
    check("ln", &[pos], 1e-6, |t, v| project(t, t.ln(v[0]), 20));
}

#[test]
fn matmul_and_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = randn(&mut rng, 4, 3);
    let w = randn(&mut rng, 3, 5);
    let bias = randn(&mut rng, 1, 5);
    check("matmul", &[x.clone(), w.clone()], 1e-6, |t, v| {
        project(t, t.matmul(v[0], v[1]), 21)
    });
    check("linear", &[x.clone(), w, bias.clone()], 1e-6, |t, v| {
        project(t, t.linear(v[0], v[1], v[2]), 22)
    });
    let row = randn(&mut rng, 1, 3);
    check("add_row", &[x, row], 1e-6, |t, v| {
        project(t, t.add_row(v[0], v[1]), 23)
    });
}

#[test]
fn reductions_and_slices() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = randn(&mut rng, 5, 4);
    check("sum_all", &[x.clone()], 1e-6, |t, v| t.sum_all(v[0]));
    check("mean_all", &[x.clone()], 1e-6, |t, v| t.mean_all(v[0]));
    check("slice_rows", &[x.clone()], 1e-6, |t, v| {
        project(t, t.slice_rows(v[0], 1, 4), 30)
    });
    check("slice_cols", &[x.clone()], 1e-6, |t, v| {
        project(t, t.slice_cols(v[0], 0, 2), 31)
    });
    check("gather_rows", &[x.clone()], 1e-6, |t, v| {
        project(t, t.gather_rows(v[0], vec![0, 2, 2, 4]), 32)
    });
    let src = randn(&mut rng, 2, 4);
    check("scatter_add_rows", &[x.clone(), src], 1e-6, |t, v| {
        project(t, t.scatter_add_rows(v[0], v[1], vec![1, 3]), 33)
    });
    let keep = vec![true, true, false, true, false, true];
    let packed = randn(&mut rng, 6, 3); // B=2, L=3
    check("masked_mean_rows", &[packed], 1e-6, move |t, v| {
        project(t, t.masked_mean_rows(v[0], keep.clone(), 2), 34)
    });
}

#[test]
fn layer_norm_backward() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x = randn(&mut rng, 4, 6);
    let gain = randn(&mut rng, 1, 6).mapv(|v| v + 1.5);
    let bias = randn(&mut rng, 1, 6);
    check("layer_norm", &[x, gain, bias], 1e-5, |t, v| {
        project(t, t.layer_norm(v[0], v[1], v[2]), 40)
    });
}

#[test]
fn cross_entropy_backward() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let logits = randn(&mut rng, 5, 7);
    let targets = vec![3, 0, 6, 2, 1];
    let mask = vec![true, true, false, true, true];
    check("softmax_ce", &[logits], 1e-6, move |t, v| {
        t.softmax_cross_entropy(v[0], targets.clone(), mask.clone())
    });
}

#[test]
fn attention_backward() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let b = 2;
    let l = 4;
    let d = 6; // 2 heads * 3
    let q = randn(&mut rng, b * l, d);
    let k = randn(&mut rng, b * l, d);
    let v = randn(&mut rng, b * l, d);
    let pad = vec![false, false, false, true, false, false, true, true];
    for causal in [false, true] {
        let pad = pad.clone();
        check(
            "attention",
            &[q.clone(), k.clone(), v.clone()],
            1e-5,
            move |t, vars| {
                let out = t.attention(vars[0], vars[1], vars[2], 2, b, pad.clone(), causal);
                // zero out pad query rows the way a loss mask would
                let keep = t.constant(Array2::from_shape_fn((b * l, d), |(i, _)| {
                    if pad[i] {
                        0.0
                    } else {
                        1.0
                    }
                }));
                let masked = t.mul(out, keep);
                project(t, masked, 50 + causal as u64)
            },
        );
    }
}

#[test]
fn conv_ops_backward() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let b = 2;
    let c_in = 3;
    let c_out = 4;
    let k = 3;
    for (len, stride) in [(6, 1), (7, 1), (6, 2), (7, 2)] {
        let x = randn(&mut rng, b * c_in, len);
        let w = randn(&mut rng, c_out, c_in * k);
        let bias = randn(&mut rng, c_out, 1);
        check(
            &format!("conv1d len={len} stride={stride}"),
            &[x, w, bias],
            1e-5,
            move |t, v| {
                project(
                    t,
                    t.conv1d(v[0], v[1], v[2], b, c_in, k, stride),
                    60 + len as u64 + stride as u64,
                )
            },
        );
    }
    let x = randn(&mut rng, 4, 5);
    check("upsample2", &[x.clone()], 1e-6, |t, v| {
        project(t, t.upsample2(v[0]), 70)
    });
    check("crop_cols", &[x], 1e-6, |t, v| {
        project(t, t.crop_cols(v[0], 3), 71)
    });
    let a = randn(&mut rng, 2 * 3, 5);
    let b2 = randn(&mut rng, 2 * 2, 5);
    check("concat_channels", &[a, b2], 1e-6, |t, v| {
        project(t, t.concat_channels(v[0], v[1], 2), 72)
    });
    let x = randn(&mut rng, 2 * 3, 4);
    check("channels_to_rows", &[x], 1e-6, |t, v| {
        project(t, t.channels_to_rows(v[0], 2), 73)
    });
}

#[test]
fn film_backward() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let b = 2;
    let c = 3;
    let x = randn(&mut rng, b * c, 5);
    let w = randn(&mut rng, b, c);
    let s = randn(&mut rng, b, c);
    check("film", &[x, w, s], 1e-6, |t, v| {
        project(t, t.film(v[0], v[1], v[2], 2), 80)
    });
}

#[test]
fn composite_graph_with_shared_inputs() {
    // One input feeding two branches must accumulate both contributions.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x = randn(&mut rng, 3, 3);
    check("shared input", &[x], 1e-6, |t, v| {
        let a = t.silu(v[0]);
        let b = t.square(v[0]);
        let sum = t.add(a, b);
        project(t, sum, 90)
    });
}
