#ifndef FIRECAST_TAPE_HPP
#define FIRECAST_TAPE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "firecast/gemm.hpp"
#include "firecast/tensor.hpp"

namespace firecast {

/// Reverse-mode differentiation tape. Ops append a value node plus a
/// backward closure; backward() replays closures in reverse creation
/// order, which is a valid topological order because parents always
/// precede children. Single-owner: one tape per training step.
///
/// All reductions (scatter_sum, col2im, gradient accumulation) run in a
/// fixed index order, so forward and backward are bit-reproducible.
template <class T>
class Tape {
public:
    using Id = int32_t;

    Id leaf(Tensor<T> v) { return push(std::move(v), nullptr); }

    const Tensor<T>& val(Id id) const { return nodes_[static_cast<size_t>(id)].value; }

    /// Gradient buffer (zeros if the node was never reached).
    const Tensor<T>& grad(Id id) {
        auto& n = nodes_[static_cast<size_t>(id)];
        if (!n.has_grad) {
            n.grad = Tensor<T>::zeros(n.value.shape);
            n.has_grad = true;
        }
        return n.grad;
    }

    size_t size() const { return nodes_.size(); }

    // ---- element-wise ----

    Id add(Id a, Id b) {
        const auto& x = val(a);
        const auto& y = val(b);
        require(x.shape == y.shape, "add: shape mismatch");
        Tensor<T> out = x;
        for (int64_t i = 0; i < out.numel(); ++i) out.data[i] += y.data[i];
        return push(std::move(out), [a, b](Tape& t, Id self) {
            const auto& g = t.g(self);
            auto& ga = t.gbuf(a);
            auto& gb = t.gbuf(b);
            for (int64_t i = 0; i < g.numel(); ++i) {
                ga.data[i] += g.data[i];
                gb.data[i] += g.data[i];
            }
        });
    }

    Id mul(Id a, Id b) {
        const auto& x = val(a);
        const auto& y = val(b);
        require(x.shape == y.shape, "mul: shape mismatch");
        Tensor<T> out = x;
        for (int64_t i = 0; i < out.numel(); ++i) out.data[i] *= y.data[i];
        return push(std::move(out), [a, b](Tape& t, Id self) {
            const auto& g = t.g(self);
            const auto& xv = t.val(a);
            const auto& yv = t.val(b);
            auto& ga = t.gbuf(a);
            auto& gb = t.gbuf(b);
            for (int64_t i = 0; i < g.numel(); ++i) {
                ga.data[i] += g.data[i] * yv.data[i];
                gb.data[i] += g.data[i] * xv.data[i];
            }
        });
    }

    /// scale * x + shift, scalar coefficients.
    Id affine(Id a, T scale, T shift) {
        Tensor<T> out = val(a);
        for (auto& v : out.data) v = scale * v + shift;
        return push(std::move(out), [a, scale](Tape& t, Id self) {
            const auto& g = t.g(self);
            auto& ga = t.gbuf(a);
            for (int64_t i = 0; i < g.numel(); ++i) ga.data[i] += scale * g.data[i];
        });
    }

    Id sub(Id a, Id b) { return add(a, affine(b, T(-1), T(0))); }

    Id sigmoid(Id a) {
        Tensor<T> out = val(a);
        for (auto& v : out.data) v = sig(v);
        return push(std::move(out), [a](Tape& t, Id self) {
            const auto& g = t.g(self);
            const auto& y = t.val(self);
            auto& ga = t.gbuf(a);
            for (int64_t i = 0; i < g.numel(); ++i)
                ga.data[i] += g.data[i] * y.data[i] * (T(1) - y.data[i]);
        });
    }

    Id tanh_(Id a) {
        Tensor<T> out = val(a);
        for (auto& v : out.data) v = std::tanh(v);
        return push(std::move(out), [a](Tape& t, Id self) {
            const auto& g = t.g(self);
            const auto& y = t.val(self);
            auto& ga = t.gbuf(a);
            for (int64_t i = 0; i < g.numel(); ++i)
                ga.data[i] += g.data[i] * (T(1) - y.data[i] * y.data[i]);
        });
    }

    /// x * sigmoid(x)
    Id silu(Id a) {
        Tensor<T> out = val(a);
        for (auto& v : out.data) v = v * sig(v);
        return push(std::move(out), [a](Tape& t, Id self) {
            const auto& g = t.g(self);
            const auto& x = t.val(a);
            auto& ga = t.gbuf(a);
            for (int64_t i = 0; i < g.numel(); ++i) {
                T s = sig(x.data[i]);
                ga.data[i] += g.data[i] * s * (T(1) + x.data[i] * (T(1) - s));
            }
        });
    }

    Id relu(Id a) {
        Tensor<T> out = val(a);
        for (auto& v : out.data) v = v > T(0) ? v : T(0);
        return push(std::move(out), [a](Tape& t, Id self) {
            const auto& g = t.g(self);
            const auto& x = t.val(a);
            auto& ga = t.gbuf(a);
            for (int64_t i = 0; i < g.numel(); ++i)
                if (x.data[i] > T(0)) ga.data[i] += g.data[i];
        });
    }

    /// Inverted dropout with a caller-supplied seed; identity when !train.
    Id dropout(Id a, double p, uint64_t seed, bool train) {
        if (!train || p <= 0.0) return affine(a, T(1), T(0));
        require(p < 1.0, "dropout: p must be < 1");
        const auto& x = val(a);
        auto keep = std::make_shared<std::vector<uint8_t>>(x.data.size());
        Rng rng(seed);
        T scale = T(1.0 / (1.0 - p));
        Tensor<T> out = x;
        for (size_t i = 0; i < out.data.size(); ++i) {
            (*keep)[i] = rng.uniform() >= p ? 1 : 0;
            out.data[i] = (*keep)[i] ? out.data[i] * scale : T(0);
        }
        return push(std::move(out), [a, keep, scale](Tape& t, Id self) {
            const auto& g = t.g(self);
            auto& ga = t.gbuf(a);
            for (int64_t i = 0; i < g.numel(); ++i)
                if ((*keep)[static_cast<size_t>(i)]) ga.data[i] += g.data[i] * scale;
        });
    }

    // ---- linear algebra ----

    /// x:[N,I] w:[I,O] b:[O] (b may be -1 for none) -> [N,O]
    Id linear(Id x, Id w, Id b = -1) {
        const auto& xv = val(x);
        const auto& wv = val(w);
        require(xv.ndim() == 2 && wv.ndim() == 2, "linear: need 2-d operands");
        int64_t n = xv.dim(0), in = xv.dim(1), out_f = wv.dim(1);
        require(wv.dim(0) == in, "linear: inner dim mismatch " + shape_str(xv.shape) +
                                     " x " + shape_str(wv.shape));
        Tensor<T> out = Tensor<T>::zeros({n, out_f});
        gemm(false, false, n, out_f, in, T(1), xv.ptr(), in, wv.ptr(), out_f, T(0),
             out.ptr(), out_f);
        if (b >= 0) {
            const auto& bv = val(b);
            require(bv.numel() == out_f, "linear: bias size mismatch");
            for (int64_t i = 0; i < n; ++i)
                for (int64_t j = 0; j < out_f; ++j) out.data[i * out_f + j] += bv.data[j];
        }
        return push(std::move(out), [x, w, b, n, in, out_f](Tape& t, Id self) {
            const auto& g = t.g(self);
            const auto& xv2 = t.val(x);
            const auto& wv2 = t.val(w);
            auto& gx = t.gbuf(x);
            auto& gw = t.gbuf(w);
            // dX += dY * W^T ; dW += X^T * dY
            gemm(false, true, n, in, out_f, T(1), g.ptr(), out_f, wv2.ptr(), out_f,
                 T(1), gx.ptr(), in);
            gemm(true, false, in, out_f, n, T(1), xv2.ptr(), in, g.ptr(), out_f, T(1),
                 gw.ptr(), out_f);
            if (b >= 0) {
                auto& gb = t.gbuf(b);
                for (int64_t i = 0; i < n; ++i)
                    for (int64_t j = 0; j < out_f; ++j)
                        gb.data[j] += g.data[i * out_f + j];
            }
        });
    }

    /// Per-row layer normalization with learned scale/shift.
    /// x:[N,F] gamma:[F] beta:[F]
    Id layer_norm(Id x, Id gamma, Id beta, T eps = T(1e-5)) {
        const auto& xv = val(x);
        require(xv.ndim() == 2, "layer_norm: need [N,F]");
        int64_t n = xv.dim(0), f = xv.dim(1);
        const auto& gv = val(gamma);
        const auto& bv = val(beta);
        require(gv.numel() == f && bv.numel() == f, "layer_norm: param size mismatch");
        Tensor<T> out = Tensor<T>::zeros({n, f});
        auto xhat = std::make_shared<std::vector<T>>(static_cast<size_t>(n * f));
        auto inv_s = std::make_shared<std::vector<T>>(static_cast<size_t>(n));
        for (int64_t i = 0; i < n; ++i) {
            const T* row = xv.ptr() + i * f;
            T mu = 0;
            for (int64_t j = 0; j < f; ++j) mu += row[j];
            mu /= T(f);
            T var = 0;
            for (int64_t j = 0; j < f; ++j) var += (row[j] - mu) * (row[j] - mu);
            var /= T(f);
            T is = T(1) / std::sqrt(var + eps);
            (*inv_s)[static_cast<size_t>(i)] = is;
            for (int64_t j = 0; j < f; ++j) {
                T xh = (row[j] - mu) * is;
                (*xhat)[static_cast<size_t>(i * f + j)] = xh;
                out.data[i * f + j] = gv.data[j] * xh + bv.data[j];
            }
        }
        return push(std::move(out),
                    [x, gamma, beta, n, f, xhat, inv_s](Tape& t, Id self) {
            const auto& g = t.g(self);
            const auto& gv2 = t.val(gamma);
            auto& gx = t.gbuf(x);
            auto& gg = t.gbuf(gamma);
            auto& gb = t.gbuf(beta);
            for (int64_t i = 0; i < n; ++i) {
                const T* grow = g.ptr() + i * f;
                const T* xh = xhat->data() + i * f;
                T m1 = 0, m2 = 0;  // mean(dxhat), mean(dxhat*xhat)
                for (int64_t j = 0; j < f; ++j) {
                    T dxh = grow[j] * gv2.data[j];
                    m1 += dxh;
                    m2 += dxh * xh[j];
                    gg.data[j] += grow[j] * xh[j];
                    gb.data[j] += grow[j];
                }
                m1 /= T(f);
                m2 /= T(f);
                T is = (*inv_s)[static_cast<size_t>(i)];
                for (int64_t j = 0; j < f; ++j) {
                    T dxh = grow[j] * gv2.data[j];
                    gx.data[i * f + j] += is * (dxh - m1 - xh[j] * m2);
                }
            }
        });
    }

    /// Non-overlapping-patch 3D convolution (kernel == stride).
    /// x:[Tt,C,H,W]  w:[Co,kt,C,kh,kw]  b:[Co], strides (kt,kh,kw).
    /// Output [Co,T',H',W'], with the time axis squeezed when T' == 1.
    Id conv3d_patch(Id x, Id w, Id b, int64_t kt, int64_t kh, int64_t kw) {
        const auto& xv = val(x);
        const auto& wv = val(w);
        require(xv.ndim() == 4, "conv3d: input must be [T,C,H,W]");
        int64_t tt = xv.dim(0), c = xv.dim(1), h = xv.dim(2), wdt = xv.dim(3);
        require(wv.ndim() == 5 && wv.dim(1) == kt && wv.dim(2) == c &&
                    wv.dim(3) == kh && wv.dim(4) == kw,
                "conv3d: weight must be [Co," + std::to_string(kt) + ",C,kh,kw]");
        require(tt % kt == 0 && h % kh == 0 && wdt % kw == 0,
                "conv3d: dims not divisible by stride");
        int64_t co = wv.dim(0);
        int64_t to = tt / kt, ho = h / kh, wo = wdt / kw;
        int64_t gsp = ho * wo;             // spatial patches per output time step
        int64_t kcols = kt * c * kh * kw;  // patch size
        const auto& bv = val(b);
        require(bv.numel() == co, "conv3d: bias size mismatch");

        // One im2col + GEMM per output time step.
        auto cols = std::make_shared<std::vector<T>>(
            static_cast<size_t>(to * kcols * gsp));
        Tensor<T> out = Tensor<T>::zeros(to == 1 ? Shape{co, ho, wo}
                                                 : Shape{co, to, ho, wo});
        for (int64_t ot = 0; ot < to; ++ot) {
            T* colbase = cols->data() + ot * kcols * gsp;
            im2col(xv.ptr(), ot, tt, c, h, wdt, kt, kh, kw, ho, wo, colbase);
            // y[Co, gsp] = W[Co, kcols] * cols[kcols, gsp]
            std::vector<T> y(static_cast<size_t>(co * gsp));
            gemm(false, false, co, gsp, kcols, T(1), wv.ptr(), kcols, colbase, gsp,
                 T(0), y.data(), gsp);
            for (int64_t oc = 0; oc < co; ++oc)
                for (int64_t gpos = 0; gpos < gsp; ++gpos) {
                    T v = y[oc * gsp + gpos] + bv.data[oc];
                    if (to == 1)
                        out.data[oc * gsp + gpos] = v;
                    else
                        out.data[(oc * to + ot) * gsp + gpos] = v;
                }
        }
        return push(std::move(out), [x, w, b, kt, kh, kw, tt, c, h, wdt, co, to, ho,
                                     wo, gsp, kcols, cols](Tape& t, Id self) {
            const auto& g = t.g(self);
            const auto& wv2 = t.val(w);
            auto& gx = t.gbuf(x);
            auto& gw = t.gbuf(w);
            auto& gb = t.gbuf(b);
            for (int64_t ot = 0; ot < to; ++ot) {
                std::vector<T> gy(static_cast<size_t>(co * gsp));
                for (int64_t oc = 0; oc < co; ++oc)
                    for (int64_t gpos = 0; gpos < gsp; ++gpos) {
                        T gv = (to == 1) ? g.data[oc * gsp + gpos]
                                         : g.data[(oc * to + ot) * gsp + gpos];
                        gy[oc * gsp + gpos] = gv;
                        gb.data[oc] += gv;
                    }
                const T* colbase = cols->data() + ot * kcols * gsp;
                // dW += dY * cols^T ; dcols = W^T * dY
                gemm(false, true, co, kcols, gsp, T(1), gy.data(), gsp, colbase, gsp,
                     T(1), gw.ptr(), kcols);
                std::vector<T> gcols(static_cast<size_t>(kcols * gsp));
                gemm(true, false, kcols, gsp, co, T(1), wv2.ptr(), kcols, gy.data(),
                     gsp, T(0), gcols.data(), gsp);
                col2im_add(gcols.data(), ot, tt, c, h, wdt, kt, kh, kw, ho, wo,
                           gx.ptr());
            }
        });
    }

    /// Zero-padded "same" 2D convolution, odd kernel.
    /// x:[Ci,H,W]  w:[Co,Ci,kh,kw]  b:[Co] (or -1) -> [Co,H,W]
    Id conv2d_same(Id x, Id w, Id b = -1) {
        const auto& xv = val(x);
        const auto& wv = val(w);
        require(xv.ndim() == 3 && wv.ndim() == 4 && wv.dim(1) == xv.dim(0),
                "conv2d: shape mismatch");
        int64_t ci = xv.dim(0), h = xv.dim(1), wd = xv.dim(2);
        int64_t co = wv.dim(0), kh = wv.dim(2), kw = wv.dim(3);
        require(kh % 2 == 1 && kw % 2 == 1, "conv2d: kernel must be odd");
        int64_t ph = kh / 2, pw = kw / 2;
        Tensor<T> out = Tensor<T>::zeros({co, h, wd});
        for (int64_t oc = 0; oc < co; ++oc) {
            T bias = b >= 0 ? val(b).data[oc] : T(0);
            for (int64_t y = 0; y < h; ++y)
                for (int64_t xx = 0; xx < wd; ++xx) {
                    T acc = bias;
                    for (int64_t ic = 0; ic < ci; ++ic)
                        for (int64_t dy = 0; dy < kh; ++dy) {
                            int64_t sy = y + dy - ph;
                            if (sy < 0 || sy >= h) continue;
                            for (int64_t dx = 0; dx < kw; ++dx) {
                                int64_t sx = xx + dx - pw;
                                if (sx < 0 || sx >= wd) continue;
                                acc += xv.data[(ic * h + sy) * wd + sx] *
                                       wv.data[((oc * ci + ic) * kh + dy) * kw + dx];
                            }
                        }
                    out.data[(oc * h + y) * wd + xx] = acc;
                }
        }
        return push(std::move(out),
                    [x, w, b, ci, h, wd, co, kh, kw, ph, pw](Tape& t, Id self) {
            const auto& g = t.g(self);
            const auto& xv2 = t.val(x);
            const auto& wv2 = t.val(w);
            auto& gx = t.gbuf(x);
            auto& gw = t.gbuf(w);
            for (int64_t oc = 0; oc < co; ++oc)
                for (int64_t y = 0; y < h; ++y)
                    for (int64_t xx = 0; xx < wd; ++xx) {
                        T go = g.data[(oc * h + y) * wd + xx];
                        if (b >= 0) t.gbuf(b).data[oc] += go;
                        for (int64_t ic = 0; ic < ci; ++ic)
                            for (int64_t dy = 0; dy < kh; ++dy) {
                                int64_t sy = y + dy - ph;
                                if (sy < 0 || sy >= h) continue;
                                for (int64_t dx = 0; dx < kw; ++dx) {
                                    int64_t sx = xx + dx - pw;
                                    if (sx < 0 || sx >= wd) continue;
                                    gx.data[(ic * h + sy) * wd + sx] +=
                                        go * wv2.data[((oc * ci + ic) * kh + dy) * kw + dx];
                                    gw.data[((oc * ci + ic) * kh + dy) * kw + dx] +=
                                        go * xv2.data[(ic * h + sy) * wd + sx];
                                }
                            }
                    }
        });
    }

    // ---- graph ops ----

    /// x:[V,F], idx:[E] -> [E,F]; row e is x[idx[e]].
    Id gather_rows(Id x, std::vector<int32_t> idx) {
        const auto& xv = val(x);
        require(xv.ndim() == 2, "gather_rows: need [V,F]");
        int64_t f = xv.dim(1), v = xv.dim(0);
        auto e = static_cast<int64_t>(idx.size());
        Tensor<T> out = Tensor<T>::zeros({e, f});
        for (int64_t i = 0; i < e; ++i) {
            require(idx[static_cast<size_t>(i)] >= 0 && idx[static_cast<size_t>(i)] < v,
                    "gather_rows: index out of range");
            const T* src = xv.ptr() + int64_t(idx[static_cast<size_t>(i)]) * f;
            std::copy(src, src + f, out.ptr() + i * f);
        }
        auto sh = std::make_shared<std::vector<int32_t>>(std::move(idx));
        return push(std::move(out), [x, sh, f](Tape& t, Id self) {
            const auto& g = t.g(self);
            auto& gx = t.gbuf(x);
            for (size_t i = 0; i < sh->size(); ++i) {
                T* dst = gx.ptr() + int64_t((*sh)[i]) * f;
                const T* src = g.ptr() + int64_t(i) * f;
                for (int64_t j = 0; j < f; ++j) dst[j] += src[j];
            }
        });
    }

    /// messages:[E,F], targets:[E] -> [out_size,F]; out[i] = sum of rows
    /// with target i, accumulated in edge-list order.
    Id scatter_sum(Id m, std::vector<int32_t> targets, int64_t out_size) {
        const auto& mv = val(m);
        require(mv.ndim() == 2, "scatter_sum: need [E,F]");
        require(static_cast<int64_t>(targets.size()) == mv.dim(0),
                "scatter_sum: target list length mismatch");
        int64_t f = mv.dim(1);
        Tensor<T> out = Tensor<T>::zeros({out_size, f});
        for (size_t e = 0; e < targets.size(); ++e) {
            require(targets[e] >= 0 && int64_t(targets[e]) < out_size,
                    "scatter_sum: index out of range");
            T* dst = out.ptr() + int64_t(targets[e]) * f;
            const T* src = mv.ptr() + int64_t(e) * f;
            for (int64_t j = 0; j < f; ++j) dst[j] += src[j];
        }
        auto sh = std::make_shared<std::vector<int32_t>>(std::move(targets));
        return push(std::move(out), [m, sh, f](Tape& t, Id self) {
            const auto& g = t.g(self);
            auto& gm = t.gbuf(m);
            for (size_t e = 0; e < sh->size(); ++e) {
                const T* src = g.ptr() + int64_t((*sh)[e]) * f;
                T* dst = gm.ptr() + int64_t(e) * f;
                for (int64_t j = 0; j < f; ++j) dst[j] += src[j];
            }
        });
    }

    // ---- layout ----

    Id concat_cols(const std::vector<Id>& parts) {
        require(!parts.empty(), "concat_cols: empty list");
        int64_t n = val(parts[0]).dim(0);
        int64_t ftot = 0;
        for (Id p : parts) {
            require(val(p).ndim() == 2 && val(p).dim(0) == n,
                    "concat_cols: row count mismatch");
            ftot += val(p).dim(1);
        }
        Tensor<T> out = Tensor<T>::zeros({n, ftot});
        int64_t off = 0;
        for (Id p : parts) {
            const auto& pv = val(p);
            int64_t f = pv.dim(1);
            for (int64_t i = 0; i < n; ++i)
                std::copy(pv.ptr() + i * f, pv.ptr() + (i + 1) * f,
                          out.ptr() + i * ftot + off);
            off += f;
        }
        auto ps = std::make_shared<std::vector<Id>>(parts);
        return push(std::move(out), [ps, n, ftot](Tape& t, Id self) {
            const auto& g = t.g(self);
            int64_t off2 = 0;
            for (Id p : *ps) {
                auto& gp = t.gbuf(p);
                int64_t f = gp.dim(1);
                for (int64_t i = 0; i < n; ++i)
                    for (int64_t j = 0; j < f; ++j)
                        gp.data[i * f + j] += g.data[i * ftot + off2 + j];
                off2 += f;
            }
        });
    }

    /// [C,H,W] -> [H*W, C]
    Id chw_to_rows(Id x) {
        const auto& xv = val(x);
        require(xv.ndim() == 3, "chw_to_rows: need [C,H,W]");
        int64_t c = xv.dim(0), hw = xv.dim(1) * xv.dim(2);
        Tensor<T> out = Tensor<T>::zeros({hw, c});
        for (int64_t ch = 0; ch < c; ++ch)
            for (int64_t g = 0; g < hw; ++g) out.data[g * c + ch] = xv.data[ch * hw + g];
        return push(std::move(out), [x, c, hw](Tape& t, Id self) {
            const auto& g = t.g(self);
            auto& gx = t.gbuf(x);
            for (int64_t ch = 0; ch < c; ++ch)
                for (int64_t i = 0; i < hw; ++i)
                    gx.data[ch * hw + i] += g.data[i * c + ch];
        });
    }

    /// [H*W, C] -> [C,H,W]
    Id rows_to_chw(Id x, int64_t h, int64_t w) {
        const auto& xv = val(x);
        require(xv.ndim() == 2 && xv.dim(0) == h * w, "rows_to_chw: shape mismatch");
        int64_t c = xv.dim(1), hw = h * w;
        Tensor<T> out = Tensor<T>::zeros({c, h, w});
        for (int64_t g = 0; g < hw; ++g)
            for (int64_t ch = 0; ch < c; ++ch) out.data[ch * hw + g] = xv.data[g * c + ch];
        return push(std::move(out), [x, c, hw](Tape& t, Id self) {
            const auto& g = t.g(self);
            auto& gx = t.gbuf(x);
            for (int64_t i = 0; i < hw; ++i)
                for (int64_t ch = 0; ch < c; ++ch)
                    gx.data[i * c + ch] += g.data[ch * hw + i];
        });
    }

    /// [r*r*C, H, W] -> [C, r*H, r*W]; out[c, r*y+dy, r*x+dx] =
    /// in[c*r*r + dy*r + dx, y, x]. Pure permutation.
    Id pixel_shuffle(Id x, int64_t r) {
        const auto& xv = val(x);
        require(xv.ndim() == 3, "pixel_shuffle: need [C,H,W]");
        require(xv.dim(0) % (r * r) == 0, "pixel_shuffle: channels not divisible by r^2");
        int64_t c = xv.dim(0) / (r * r), h = xv.dim(1), w = xv.dim(2);
        Tensor<T> out = Tensor<T>::zeros({c, r * h, r * w});
        for (int64_t ch = 0; ch < c; ++ch)
            for (int64_t dy = 0; dy < r; ++dy)
                for (int64_t dx = 0; dx < r; ++dx) {
                    int64_t ic = ch * r * r + dy * r + dx;
                    for (int64_t y = 0; y < h; ++y)
                        for (int64_t xx = 0; xx < w; ++xx)
                            out.data[(ch * r * h + r * y + dy) * r * w + r * xx + dx] =
                                xv.data[(ic * h + y) * w + xx];
                }
        return push(std::move(out), [x, r, c, h, w](Tape& t, Id self) {
            const auto& g = t.g(self);
            auto& gx = t.gbuf(x);
            for (int64_t ch = 0; ch < c; ++ch)
                for (int64_t dy = 0; dy < r; ++dy)
                    for (int64_t dx = 0; dx < r; ++dx) {
                        int64_t ic = ch * r * r + dy * r + dx;
                        for (int64_t y = 0; y < h; ++y)
                            for (int64_t xx = 0; xx < w; ++xx)
                                gx.data[(ic * h + y) * w + xx] +=
                                    g.data[(ch * r * h + r * y + dy) * r * w + r * xx + dx];
                    }
        });
    }

    Id reshape(Id x, Shape s) {
        const auto& xv = val(x);
        require(shape_numel(s) == xv.numel(), "reshape: element count mismatch");
        Tensor<T> out(std::move(s), xv.data);
        return push(std::move(out), [x](Tape& t, Id self) {
            const auto& g = t.g(self);
            auto& gx = t.gbuf(x);
            for (int64_t i = 0; i < g.numel(); ++i) gx.data[i] += g.data[i];
        });
    }

    // ---- reductions / losses ----

    Id sum(Id x) {
        const auto& xv = val(x);
        T s = 0;
        for (T v : xv.data) s += v;
        return push(Tensor<T>({1}, {s}), [x](Tape& t, Id self) {
            T g0 = t.g(self).data[0];
            auto& gx = t.gbuf(x);
            for (auto& v : gx.data) v += g0;
        });
    }

    Id mean_all(Id x) {
        int64_t n = val(x).numel();
        return affine(sum(x), T(1) / T(n), T(0));
    }

    /// Masked mean binary cross-entropy in the numerically stable logit
    /// form: max(z,0) - z*y + log(1+exp(-|z|)).
    Id bce_with_logits(Id logits, const Tensor<T>& target,
                       const std::vector<uint8_t>& mask) {
        const auto& z = val(logits);
        require(z.numel() == target.numel(), "bce: target shape mismatch");
        require(static_cast<int64_t>(mask.size()) == z.numel(), "bce: mask size mismatch");
        int64_t nmask = 0;
        for (uint8_t m : mask) nmask += m ? 1 : 0;
        require(nmask > 0, "bce: empty mask");
        T acc = 0;
        for (int64_t i = 0; i < z.numel(); ++i) {
            if (!mask[static_cast<size_t>(i)]) continue;
            T zi = z.data[i], yi = target.data[i];
            acc += std::max(zi, T(0)) - zi * yi + std::log1p(std::exp(-std::abs(zi)));
        }
        acc /= T(nmask);
        auto msk = std::make_shared<std::vector<uint8_t>>(mask);
        auto tgt = std::make_shared<Tensor<T>>(target);
        return push(Tensor<T>({1}, {acc}),
                    [logits, msk, tgt, nmask](Tape& t, Id self) {
            T g0 = t.g(self).data[0];
            const auto& z2 = t.val(logits);
            auto& gz = t.gbuf(logits);
            T inv = g0 / T(nmask);
            for (int64_t i = 0; i < z2.numel(); ++i)
                if ((*msk)[static_cast<size_t>(i)])
                    gz.data[i] += inv * (sig(z2.data[i]) - tgt->data[i]);
        });
    }

    /// Mean of sigmoid(logits) over mask; the attribution scalarization.
    Id mean_sigmoid(Id logits, const std::vector<uint8_t>& mask) {
        const auto& z = val(logits);
        require(static_cast<int64_t>(mask.size()) == z.numel(),
                "mean_sigmoid: mask size mismatch");
        int64_t nmask = 0;
        for (uint8_t m : mask) nmask += m ? 1 : 0;
        require(nmask > 0, "mean_sigmoid: empty mask");
        T acc = 0;
        for (int64_t i = 0; i < z.numel(); ++i)
            if (mask[static_cast<size_t>(i)]) acc += sig(z.data[i]);
        acc /= T(nmask);
        auto msk = std::make_shared<std::vector<uint8_t>>(mask);
        return push(Tensor<T>({1}, {acc}), [logits, msk, nmask](Tape& t, Id self) {
            T g0 = t.g(self).data[0];
            const auto& z2 = t.val(logits);
            auto& gz = t.gbuf(logits);
            T inv = g0 / T(nmask);
            for (int64_t i = 0; i < z2.numel(); ++i)
                if ((*msk)[static_cast<size_t>(i)]) {
                    T s = sig(z2.data[i]);
                    gz.data[i] += inv * s * (T(1) - s);
                }
        });
    }

    // ---- backward ----

    void backward(Id loss) {
        require(loss >= 0 && static_cast<size_t>(loss) < nodes_.size(),
                "backward: bad loss id");
        require(val(loss).numel() == 1, "backward: loss must be scalar");
        gbuf(loss).data[0] = T(1);
        for (Id i = loss; i >= 0; --i) {
            auto& n = nodes_[static_cast<size_t>(i)];
            if (n.has_grad && n.back) n.back(*this, i);
        }
    }

private:
    struct Node {
        Tensor<T> value;
        Tensor<T> grad;
        bool has_grad = false;
        std::function<void(Tape&, Id)> back;
    };

    std::vector<Node> nodes_;

    static T sig(T v) { return T(1) / (T(1) + std::exp(-v)); }

    Id push(Tensor<T> v, std::function<void(Tape&, Id)> back) {
        nodes_.push_back(Node{std::move(v), {}, false, std::move(back)});
        return static_cast<Id>(nodes_.size() - 1);
    }

    const Tensor<T>& g(Id id) { return grad(id); }

    Tensor<T>& gbuf(Id id) {
        auto& n = nodes_[static_cast<size_t>(id)];
        if (!n.has_grad) {
            n.grad = Tensor<T>::zeros(n.value.shape);
            n.has_grad = true;
        }
        return n.grad;
    }

    // cols layout [kcols, gsp]; column index g = y*wo + x.
    static void im2col(const T* x, int64_t ot, int64_t tt, int64_t c, int64_t h,
                       int64_t w, int64_t kt, int64_t kh, int64_t kw, int64_t ho,
                       int64_t wo, T* cols) {
        (void)tt;
        int64_t gsp = ho * wo;
        for (int64_t dt = 0; dt < kt; ++dt)
            for (int64_t ic = 0; ic < c; ++ic)
                for (int64_t dy = 0; dy < kh; ++dy)
                    for (int64_t dx = 0; dx < kw; ++dx) {
                        int64_t k = ((dt * c + ic) * kh + dy) * kw + dx;
                        const T* plane = x + ((ot * kt + dt) * c + ic) * h * w;
                        for (int64_t oy = 0; oy < ho; ++oy)
                            for (int64_t ox = 0; ox < wo; ++ox)
                                cols[k * gsp + oy * wo + ox] =
                                    plane[(oy * kh + dy) * w + ox * kw + dx];
                    }
    }

    static void col2im_add(const T* cols, int64_t ot, int64_t tt, int64_t c,
                           int64_t h, int64_t w, int64_t kt, int64_t kh, int64_t kw,
                           int64_t ho, int64_t wo, T* gx) {
        (void)tt;
        int64_t gsp = ho * wo;
        for (int64_t dt = 0; dt < kt; ++dt)
            for (int64_t ic = 0; ic < c; ++ic)
                for (int64_t dy = 0; dy < kh; ++dy)
                    for (int64_t dx = 0; dx < kw; ++dx) {
                        int64_t k = ((dt * c + ic) * kh + dy) * kw + dx;
                        T* plane = gx + ((ot * kt + dt) * c + ic) * h * w;
                        for (int64_t oy = 0; oy < ho; ++oy)
                            for (int64_t ox = 0; ox < wo; ++ox)
                                plane[(oy * kh + dy) * w + ox * kw + dx] +=
                                    cols[k * gsp + oy * wo + ox];
                    }
    }
};

}  // namespace firecast

#endif  // FIRECAST_TAPE_HPP
