//! Differentiable ops. Each method records one tape node; fused ops
//! (attention, conv, losses) keep the tape small and the backward passes
//! hand-derived. Every backward here is covered by a finite-difference test.

use ndarray::{concatenate, s, Array1, Array2, Axis};

use super::tape::{Tape, Var};

const MASK_NEG: f64 = -1e30;

impl Tape {
    fn value(&self, v: Var) -> Array2<f64> {
        self.array(v)
    }

    pub fn add(&self, a: Var, b: Var) -> Var {
        let out = {
            let nodes = self.nodes.borrow();
            &nodes[a.0].value + &nodes[b.0].value
        };
        self.push(
            out,
            Some(Box::new(move |g| {
                vec![(a.0, g.clone()), (b.0, g.clone())]
            })),
        )
    }

    pub fn sub(&self, a: Var, b: Var) -> Var {
        let out = {
            let nodes = self.nodes.borrow();
            &nodes[a.0].value - &nodes[b.0].value
        };
        self.push(
            out,
            Some(Box::new(move |g| {
                vec![(a.0, g.clone()), (b.0, g.mapv(|x| -x))]
            })),
        )
    }

    pub fn mul(&self, a: Var, b: Var) -> Var {
        let (av, bv) = {
            let nodes = self.nodes.borrow();
            (nodes[a.0].value.clone(), nodes[b.0].value.clone())
        };
        let out = &av * &bv;
        self.push(
            out,
            Some(Box::new(move |g| {
                vec![(a.0, g * &bv), (b.0, g * &av)]
            })),
        )
    }

    pub fn neg(&self, a: Var) -> Var {
        self.scale(a, -1.0)
    }

    pub fn scale(&self, a: Var, c: f64) -> Var {
        let out = self.value(a).mapv(|x| x * c);
        self.push(out, Some(Box::new(move |g| vec![(a.0, g.mapv(|x| x * c))])))
    }

    pub fn add_scalar(&self, a: Var, c: f64) -> Var {
        let out = self.value(a).mapv(|x| x + c);
        self.push(out, Some(Box::new(move |g| vec![(a.0, g.clone())])))
    }

    pub fn exp(&self, a: Var) -> Var {
        let out = self.value(a).mapv(f64::exp);
        let saved = out.clone();
        self.push(out, Some(Box::new(move |g| vec![(a.0, g * &saved)])))
    }

    pub fn ln(&self, a: Var) -> Var {
        let av = self.value(a);
        let out = av.mapv(f64::ln);
        self.push(out, Some(Box::new(move |g| vec![(a.0, g / &av)])))
    }

    pub fn square(&self, a: Var) -> Var {
        let av = self.value(a);
        let out = av.mapv(|x| x * x);
        self.push(
            out,
            Some(Box::new(move |g| vec![(a.0, g * &av.mapv(|x| 2.0 * x))])),
        )
    }

    pub fn silu(&self, a: Var) -> Var {
        let av = self.value(a);
        let out = av.mapv(|x| x * sigmoid(x));
        self.push(
            out,
            Some(Box::new(move |g| {
                let d = av.mapv(|x| {
                    let s = sigmoid(x);
                    s * (1.0 + x * (1.0 - s))
                });
                vec![(a.0, g * &d)]
            })),
        )
    }

    pub fn gelu(&self, a: Var) -> Var {
        let av = self.value(a);
        let out = av.mapv(gelu_tanh);
        self.push(
            out,
            Some(Box::new(move |g| {
                vec![(a.0, g * &av.mapv(gelu_tanh_grad))]
            })),
        )
    }

    pub fn tanh(&self, a: Var) -> Var {
        let out = self.value(a).mapv(f64::tanh);
        let saved = out.clone();
        self.push(
            out,
            Some(Box::new(move |g| {
                vec![(a.0, g * &saved.mapv(|y| 1.0 - y * y))]
            })),
        )
    }

    pub fn matmul(&self, a: Var, b: Var) -> Var {
        let (av, bv) = {
            let nodes = self.nodes.borrow();
            (nodes[a.0].value.clone(), nodes[b.0].value.clone())
        };
        let out = av.dot(&bv);
        self.push(
            out,
            Some(Box::new(move |g| {
                vec![(a.0, g.dot(&bv.t())), (b.0, av.t().dot(g))]
            })),
        )
    }

    /// `x @ w + bias`, bias a `(1, out)` row broadcast over rows of `x`.
    pub fn linear(&self, x: Var, w: Var, bias: Var) -> Var {
        let (xv, wv, bv) = {
            let nodes = self.nodes.borrow();
            (
                nodes[x.0].value.clone(),
                nodes[w.0].value.clone(),
                nodes[bias.0].value.clone(),
            )
        };
        let out = xv.dot(&wv) + &bv;
        self.push(
            out,
            Some(Box::new(move |g| {
                let db = g.sum_axis(Axis(0)).insert_axis(Axis(0));
                vec![(x.0, g.dot(&wv.t())), (w.0, xv.t().dot(g)), (bias.0, db)]
            })),
        )
    }

    /// Broadcast-add a `(1, d)` row to every row of `x`.
    pub fn add_row(&self, x: Var, row: Var) -> Var {
        let out = {
            let nodes = self.nodes.borrow();
            &nodes[x.0].value + &nodes[row.0].value
        };
        self.push(
            out,
            Some(Box::new(move |g| {
                let dr = g.sum_axis(Axis(0)).insert_axis(Axis(0));
                vec![(x.0, g.clone()), (row.0, dr)]
            })),
        )
    }

    pub fn sum_all(&self, a: Var) -> Var {
        let av = self.value(a);
        let dim = av.dim();
        let out = Array2::from_elem((1, 1), av.sum());
        self.push(
            out,
            Some(Box::new(move |g| {
                vec![(a.0, Array2::from_elem(dim, g[(0, 0)]))]
            })),
        )
    }

    pub fn mean_all(&self, a: Var) -> Var {
        let n = {
            let (r, c) = self.shape(a);
            (r * c) as f64
        };
        let s = self.sum_all(a);
        self.scale(s, 1.0 / n)
    }

    /// Rows `from..to` of `x`.
    pub fn slice_rows(&self, x: Var, from: usize, to: usize) -> Var {
        let xv = self.value(x);
        let dim = xv.dim();
        let out = xv.slice(s![from..to, ..]).to_owned();
        self.push(
            out,
            Some(Box::new(move |g| {
                let mut dx = Array2::zeros(dim);
                dx.slice_mut(s![from..to, ..]).assign(g);
                vec![(x.0, dx)]
            })),
        )
    }

    /// Columns `from..to` of `x`.
    pub fn slice_cols(&self, x: Var, from: usize, to: usize) -> Var {
        let xv = self.value(x);
        let dim = xv.dim();
        let out = xv.slice(s![.., from..to]).to_owned();
        self.push(
            out,
            Some(Box::new(move |g| {
                let mut dx = Array2::zeros(dim);
                dx.slice_mut(s![.., from..to]).assign(g);
                vec![(x.0, dx)]
            })),
        )
    }

    /// Row gather: output row `j` is `x` row `idx[j]`. Duplicate indices
    /// accumulate in the backward scatter.
    pub fn gather_rows(&self, x: Var, idx: Vec<usize>) -> Var {
        let xv = self.value(x);
        let dim = xv.dim();
        let mut out = Array2::zeros((idx.len(), dim.1));
        for (j, &i) in idx.iter().enumerate() {
            out.row_mut(j).assign(&xv.row(i));
        }
        self.push(
            out,
            Some(Box::new(move |g| {
                let mut dx = Array2::zeros(dim);
                for (j, &i) in idx.iter().enumerate() {
                    let mut r = dx.row_mut(i);
                    r += &g.row(j);
                }
                vec![(x.0, dx)]
            })),
        )
    }

    /// Token embedding lookup: rows of `table` selected by `ids`.
    pub fn embedding(&self, table: Var, ids: Vec<usize>) -> Var {
        self.gather_rows(table, ids)
    }

    /// `base` with `src` row `j` added onto row `idx[j]`.
    pub fn scatter_add_rows(&self, base: Var, src: Var, idx: Vec<usize>) -> Var {
        let mut out = self.value(base);
        let srcv = self.value(src);
        for (j, &i) in idx.iter().enumerate() {
            let mut r = out.row_mut(i);
            r += &srcv.row(j);
        }
        let src_cols = srcv.ncols();
        self.push(
            out,
            Some(Box::new(move |g| {
                let mut dsrc = Array2::zeros((idx.len(), src_cols));
                for (j, &i) in idx.iter().enumerate() {
                    dsrc.row_mut(j).assign(&g.row(i));
                }
                vec![(base.0, g.clone()), (src.0, dsrc)]
            })),
        )
    }

    /// Per-sample mean over unmasked rows of a `(B*L, d)` packed batch.
    /// `keep[i]` marks rows that participate. Every sample must keep at
    /// least one row.
    pub fn masked_mean_rows(&self, x: Var, keep: Vec<bool>, batch: usize) -> Var {
        let xv = self.value(x);
        let (rows, d) = xv.dim();
        assert_eq!(rows % batch, 0);
        assert_eq!(keep.len(), rows);
        let l = rows / batch;
        let mut out = Array2::zeros((batch, d));
        let mut counts = vec![0usize; batch];
        for b in 0..batch {
            for i in 0..l {
                if keep[b * l + i] {
                    counts[b] += 1;
                    let mut r = out.row_mut(b);
                    r += &xv.row(b * l + i);
                }
            }
            assert!(counts[b] > 0, "sample {b} has no unmasked rows");
            let mut r = out.row_mut(b);
            r /= counts[b] as f64;
        }
        self.push(
            out,
            Some(Box::new(move |g| {
                let mut dx = Array2::zeros((rows, d));
                for b in 0..batch {
                    for i in 0..l {
                        if keep[b * l + i] {
                            let scaled = g.row(b).mapv(|v| v / counts[b] as f64);
                            dx.row_mut(b * l + i).assign(&scaled);
                        }
                    }
                }
                vec![(x.0, dx)]
            })),
        )
    }

    /// Row-wise layer normalization with learned gain and bias (`(1, d)`).
    pub fn layer_norm(&self, x: Var, gain: Var, bias: Var) -> Var {
        const EPS: f64 = 1e-5;
        let (xv, gv) = {
            let nodes = self.nodes.borrow();
            (nodes[x.0].value.clone(), nodes[gain.0].value.clone())
        };
        let bv = self.value(bias);
        let (n, d) = xv.dim();
        let mut xhat = Array2::zeros((n, d));
        let mut inv_std = Array1::zeros(n);
        for i in 0..n {
            let row = xv.row(i);
            let mean = row.mean().unwrap();
            let var = row.mapv(|v| (v - mean) * (v - mean)).mean().unwrap();
            let inv = 1.0 / (var + EPS).sqrt();
            inv_std[i] = inv;
            xhat.row_mut(i).assign(&row.mapv(|v| (v - mean) * inv));
        }
        let out = &xhat * &gv + &bv;
        let xhat_saved = xhat;
        self.push(
            out,
            Some(Box::new(move |g| {
                let (n, d) = g.dim();
                let mut dx = Array2::zeros((n, d));
                let dgain_rows = g * &xhat_saved;
                for i in 0..n {
                    let dxhat = &g.row(i).to_owned() * &gv.row(0).to_owned();
                    let m1 = dxhat.mean().unwrap();
                    let m2 = (&dxhat * &xhat_saved.row(i)).mean().unwrap();
                    let xh = xhat_saved.row(i);
                    let row =
                        (&dxhat - m1 - &xh.mapv(|v| v * m2)).mapv(|v| v * inv_std[i]);
                    dx.row_mut(i).assign(&row);
                }
                let dgain = dgain_rows.sum_axis(Axis(0)).insert_axis(Axis(0));
                let dbias = g.sum_axis(Axis(0)).insert_axis(Axis(0));
                vec![(x.0, dx), (gain.0, dgain), (bias.0, dbias)]
            })),
        )
    }

    /// Mean cross-entropy of `logits` rows against integer `targets`,
    /// averaged over rows with `mask[i] = true`. Masked rows contribute
    /// exactly zero loss and zero gradient.
    pub fn softmax_cross_entropy(&self, logits: Var, targets: Vec<usize>, mask: Vec<bool>) -> Var {
        let lv = self.value(logits);
        let (n, _) = lv.dim();
        assert_eq!(targets.len(), n);
        assert_eq!(mask.len(), n);
        let count = mask.iter().filter(|&&m| m).count().max(1) as f64;
        let probs = softmax_rows(&lv);
        let mut total = 0.0;
        for i in 0..n {
            if mask[i] {
                total -= probs[(i, targets[i])].max(1e-300).ln();
            }
        }
        let out = Array2::from_elem((1, 1), total / count);
        self.push(
            out,
            Some(Box::new(move |g| {
                let scale = g[(0, 0)] / count;
                let mut dl = probs.clone();
                for i in 0..dl.nrows() {
                    if mask[i] {
                        dl[(i, targets[i])] -= 1.0;
                        let mut r = dl.row_mut(i);
                        r *= scale;
                    } else {
                        dl.row_mut(i).fill(0.0);
                    }
                }
                vec![(logits.0, dl)]
            })),
        )
    }

    /// Multi-head self-attention over a `(B*L, d)` packed batch.
    ///
    /// `pad[i]` marks key positions that must not be attended to; `causal`
    /// additionally forbids attending to later positions. Output is the
    /// head-concatenated context, same shape as the inputs.
    pub fn attention(
        &self,
        q: Var,
        k: Var,
        v: Var,
        heads: usize,
        batch: usize,
        pad: Vec<bool>,
        causal: bool,
    ) -> Var {
        let (qv, kv, vv) = {
            let nodes = self.nodes.borrow();
            (
                nodes[q.0].value.clone(),
                nodes[k.0].value.clone(),
                nodes[v.0].value.clone(),
            )
        };
        let (rows, d) = qv.dim();
        assert_eq!(rows % batch, 0);
        assert_eq!(d % heads, 0);
        let l = rows / batch;
        let dh = d / heads;
        let scale = 1.0 / (dh as f64).sqrt();
        let mut out = Array2::zeros((rows, d));
        let mut saved_p: Vec<Array2<f64>> = Vec::with_capacity(batch * heads);
        for b in 0..batch {
            for h in 0..heads {
                let (r0, r1) = (b * l, (b + 1) * l);
                let (c0, c1) = (h * dh, (h + 1) * dh);
                let qh = qv.slice(s![r0..r1, c0..c1]);
                let kh = kv.slice(s![r0..r1, c0..c1]);
                let vh = vv.slice(s![r0..r1, c0..c1]);
                let mut scores = qh.dot(&kh.t());
                scores *= scale;
                for i in 0..l {
                    for j in 0..l {
                        if pad[b * l + j] || (causal && j > i) {
                            scores[(i, j)] = MASK_NEG;
                        }
                    }
                }
                let p = softmax_rows(&scores);
                let oh = p.dot(&vh);
                out.slice_mut(s![r0..r1, c0..c1]).assign(&oh);
                saved_p.push(p);
            }
        }
        self.push(
            out,
            Some(Box::new(move |g| {
                let mut dq = Array2::zeros((rows, d));
                let mut dk = Array2::zeros((rows, d));
                let mut dv = Array2::zeros((rows, d));
                for b in 0..batch {
                    for h in 0..heads {
                        let (r0, r1) = (b * l, (b + 1) * l);
                        let (c0, c1) = (h * dh, (h + 1) * dh);
                        let p = &saved_p[b * heads + h];
                        let go = g.slice(s![r0..r1, c0..c1]);
                        let qh = qv.slice(s![r0..r1, c0..c1]);
                        let kh = kv.slice(s![r0..r1, c0..c1]);
                        let vh = vv.slice(s![r0..r1, c0..c1]);
                        dv.slice_mut(s![r0..r1, c0..c1])
                            .assign(&p.t().dot(&go));
                        let dp = go.dot(&vh.t());
                        // softmax backward per row
                        let mut ds = Array2::zeros((l, l));
                        for i in 0..l {
                            let pi = p.row(i);
                            let dpi = dp.row(i);
                            let dot: f64 = pi.iter().zip(dpi.iter()).map(|(a, b)| a * b).sum();
                            for j in 0..l {
                                ds[(i, j)] = pi[j] * (dpi[j] - dot);
                            }
                        }
                        ds *= scale;
                        dq.slice_mut(s![r0..r1, c0..c1]).assign(&ds.dot(&kh));
                        dk.slice_mut(s![r0..r1, c0..c1]).assign(&ds.t().dot(&qh));
                    }
                }
                vec![(q.0, dq), (k.0, dk), (v.0, dv)]
            })),
        )
    }

    /// 1-D convolution over a `(B*Cin, L)` packed batch via im2col.
    ///
    /// `w` has shape `(Cout, Cin*k)` (kernel fastest), `bias` `(Cout, 1)`.
    /// Same-padding with `pad = (k-1)/2`; `stride` 1 keeps length, 2 halves
    /// it (rounding up).
    #[allow(clippy::too_many_arguments)]
    pub fn conv1d(
        &self,
        x: Var,
        w: Var,
        bias: Var,
        batch: usize,
        c_in: usize,
        k: usize,
        stride: usize,
    ) -> Var {
        let (xv, wv, bv) = {
            let nodes = self.nodes.borrow();
            (
                nodes[x.0].value.clone(),
                nodes[w.0].value.clone(),
                nodes[bias.0].value.clone(),
            )
        };
        let (rows, len) = xv.dim();
        assert_eq!(rows, batch * c_in);
        let c_out = wv.nrows();
        assert_eq!(wv.ncols(), c_in * k);
        let pad = (k - 1) / 2;
        let l_out = (len + 2 * pad - k) / stride + 1;
        let mut out = Array2::zeros((batch * c_out, l_out));
        let mut cols_all: Vec<Array2<f64>> = Vec::with_capacity(batch);
        for b in 0..batch {
            let mut cols = Array2::zeros((c_in * k, l_out));
            for c in 0..c_in {
                let xrow = xv.row(b * c_in + c);
                for dk in 0..k {
                    for o in 0..l_out {
                        let pos = (o * stride + dk) as isize - pad as isize;
                        if pos >= 0 && (pos as usize) < len {
                            cols[(c * k + dk, o)] = xrow[pos as usize];
                        }
                    }
                }
            }
            let y = wv.dot(&cols) + &bv; // bias broadcasts over columns
            out.slice_mut(s![b * c_out..(b + 1) * c_out, ..]).assign(&y);
            cols_all.push(cols);
        }
        self.push(
            out,
            Some(Box::new(move |g| {
                let mut dw = Array2::zeros(wv.dim());
                let mut db = Array2::zeros(bv.dim());
                let mut dx = Array2::zeros((rows, len));
                for b in 0..batch {
                    let gy = g.slice(s![b * c_out..(b + 1) * c_out, ..]);
                    dw += &gy.dot(&cols_all[b].t());
                    db += &gy.sum_axis(Axis(1)).insert_axis(Axis(1));
                    let dcols = wv.t().dot(&gy); // (Cin*k, Lout)
                    for c in 0..c_in {
                        for dk in 0..k {
                            for o in 0..l_out {
                                let pos = (o * stride + dk) as isize - pad as isize;
                                if pos >= 0 && (pos as usize) < len {
                                    dx[(b * c_in + c, pos as usize)] += dcols[(c * k + dk, o)];
                                }
                            }
                        }
                    }
                }
                vec![(x.0, dx), (w.0, dw), (bias.0, db)]
            })),
        )
    }

    /// Nearest-neighbor 2x upsample along columns.
    pub fn upsample2(&self, x: Var) -> Var {
        let xv = self.value(x);
        let (rows, len) = xv.dim();
        let mut out = Array2::zeros((rows, len * 2));
        for o in 0..len {
            out.column_mut(2 * o).assign(&xv.column(o));
            out.column_mut(2 * o + 1).assign(&xv.column(o));
        }
        self.push(
            out,
            Some(Box::new(move |g| {
                let mut dx = Array2::zeros((rows, len));
                for o in 0..len {
                    let merged = &g.column(2 * o) + &g.column(2 * o + 1);
                    dx.column_mut(o).assign(&merged);
                }
                vec![(x.0, dx)]
            })),
        )
    }

    /// Keep the first `new_len` columns; gradient zero-pads the rest.
    pub fn crop_cols(&self, x: Var, new_len: usize) -> Var {
        self.slice_cols(x, 0, new_len)
    }

    /// Per-sample channel concatenation of two `(B*C, L)` packed batches.
    pub fn concat_channels(&self, a: Var, b: Var, batch: usize) -> Var {
        let (av, bv) = {
            let nodes = self.nodes.borrow();
            (nodes[a.0].value.clone(), nodes[b.0].value.clone())
        };
        let ca = av.nrows() / batch;
        let cb = bv.nrows() / batch;
        let len = av.ncols();
        assert_eq!(bv.ncols(), len);
        let mut out = Array2::zeros((batch * (ca + cb), len));
        for s_b in 0..batch {
            out.slice_mut(s![s_b * (ca + cb)..s_b * (ca + cb) + ca, ..])
                .assign(&av.slice(s![s_b * ca..(s_b + 1) * ca, ..]));
            out.slice_mut(s![s_b * (ca + cb) + ca..(s_b + 1) * (ca + cb), ..])
                .assign(&bv.slice(s![s_b * cb..(s_b + 1) * cb, ..]));
        }
        self.push(
            out,
            Some(Box::new(move |g| {
                let mut da = Array2::zeros((batch * ca, len));
                let mut db = Array2::zeros((batch * cb, len));
                for s_b in 0..batch {
                    da.slice_mut(s![s_b * ca..(s_b + 1) * ca, ..])
                        .assign(&g.slice(s![s_b * (ca + cb)..s_b * (ca + cb) + ca, ..]));
                    db.slice_mut(s![s_b * cb..(s_b + 1) * cb, ..])
                        .assign(&g.slice(s![s_b * (ca + cb) + ca..(s_b + 1) * (ca + cb), ..]));
                }
                vec![(a.0, da), (b.0, db)]
            })),
        )
    }

    /// Permutes a `(B*C, L)` channel-major packed batch into `(B*L, C)`
    /// position-major layout (one row per sequence position).
    pub fn channels_to_rows(&self, x: Var, batch: usize) -> Var {
        let xv = self.value(x);
        let (rows, len) = xv.dim();
        assert_eq!(rows % batch, 0);
        let c = rows / batch;
        let mut out = Array2::zeros((batch * len, c));
        for b in 0..batch {
            for ch in 0..c {
                for pos in 0..len {
                    out[(b * len + pos, ch)] = xv[(b * c + ch, pos)];
                }
            }
        }
        self.push(
            out,
            Some(Box::new(move |g| {
                let mut dx = Array2::zeros((rows, len));
                for b in 0..batch {
                    for ch in 0..c {
                        for pos in 0..len {
                            dx[(b * c + ch, pos)] = g[(b * len + pos, ch)];
                        }
                    }
                }
                vec![(x.0, dx)]
            })),
        )
    }

    /// Scale-shift modulation `(1 + w) * x + s` on a `(B*C, L)` packed batch,
    /// with per-sample `(B, C)` scale and shift broadcast along length.
    pub fn film(&self, x: Var, w: Var, shift: Var, batch: usize) -> Var {
        let (xv, wv, sv) = {
            let nodes = self.nodes.borrow();
            (
                nodes[x.0].value.clone(),
                nodes[w.0].value.clone(),
                nodes[shift.0].value.clone(),
            )
        };
        let (rows, len) = xv.dim();
        let c = rows / batch;
        assert_eq!(wv.dim(), (batch, c));
        assert_eq!(sv.dim(), (batch, c));
        let mut out = Array2::zeros((rows, len));
        for b in 0..batch {
            for ch in 0..c {
                let row = xv
                    .row(b * c + ch)
                    .mapv(|v| (1.0 + wv[(b, ch)]) * v + sv[(b, ch)]);
                out.row_mut(b * c + ch).assign(&row);
            }
        }
        self.push(
            out,
            Some(Box::new(move |g| {
                let mut dx = Array2::zeros((rows, len));
                let mut dw = Array2::zeros((batch, c));
                let mut ds = Array2::zeros((batch, c));
                for b in 0..batch {
                    for ch in 0..c {
                        let grow = g.row(b * c + ch);
                        dx.row_mut(b * c + ch)
                            .assign(&grow.mapv(|v| v * (1.0 + wv[(b, ch)])));
                        dw[(b, ch)] = grow
                            .iter()
                            .zip(xv.row(b * c + ch).iter())
                            .map(|(a, b)| a * b)
                            .sum();
                        ds[(b, ch)] = grow.sum();
                    }
                }
                vec![(x.0, dx), (w.0, dw), (shift.0, ds)]
            })),
        )
    }
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

const GELU_C: f64 = 0.7978845608028654; // sqrt(2/pi)

fn gelu_tanh(x: f64) -> f64 {
    0.5 * x * (1.0 + (GELU_C * (x + 0.044715 * x * x * x)).tanh())
}

fn gelu_tanh_grad(x: f64) -> f64 {
    let inner = GELU_C * (x + 0.044715 * x * x * x);
    let t = inner.tanh();
    let dinner = GELU_C * (1.0 + 3.0 * 0.044715 * x * x);
    0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * dinner
}

/// Row-wise softmax with max subtraction.
pub fn softmax_rows(x: &Array2<f64>) -> Array2<f64> {
    let mut out = x.clone();
    for mut row in out.rows_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| (v - max).exp());
        let sum: f64 = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
    out
}

/// Row-wise log-softmax.
pub fn log_softmax_rows(x: &Array2<f64>) -> Array2<f64> {
    let mut out = x.clone();
    for mut row in out.rows_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = row.iter().map(|v| (v - max).exp()).sum::<f64>().ln() + max;
        row.mapv_inplace(|v| v - lse);
    }
    out
}

/// Fixed sinusoidal position encoding table of shape `(len, dim)`.
pub fn sinusoidal_positions(len: usize, dim: usize) -> Array2<f64> {
    let mut pe = Array2::zeros((len, dim));
    for pos in 0..len {
        for i in 0..dim / 2 {
            let rate = 1.0 / 10000f64.powf(2.0 * i as f64 / dim as f64);
            pe[(pos, 2 * i)] = (pos as f64 * rate).sin();
            pe[(pos, 2 * i + 1)] = (pos as f64 * rate).cos();
        }
    }
    pe
}

/// Sinusoidal timestep embedding `(1, dim)` in the DDPM style.
pub fn timestep_embedding(t: f64, dim: usize) -> Array2<f64> {
    let half = dim / 2;
    let mut emb = Array2::zeros((1, dim));
    for i in 0..half {
        let freq = (-(10000f64.ln()) * i as f64 / (half.max(2) - 1) as f64).exp();
        emb[(0, i)] = (t * freq).sin();
        emb[(0, half + i)] = (t * freq).cos();
    }
    emb
}

/// Stack per-sample timestep embeddings into a `(B, dim)` matrix.
pub fn timestep_embedding_batch(ts: &[f64], dim: usize) -> Array2<f64> {
    let rows: Vec<Array2<f64>> = ts.iter().map(|&t| timestep_embedding(t, dim)).collect();
    let views: Vec<_> = rows.iter().map(|r| r.view()).collect();
    concatenate(Axis(0), &views).expect("uniform embedding width")
}
