#ifndef FIRECAST_ATTRIBUTION_HPP
#define FIRECAST_ATTRIBUTION_HPP

/// Integrated Gradients attribution with right-Riemann quadrature and a
/// per-variable aggregation into normalized importance shares.

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "firecast/common.hpp"
#include "firecast/data.hpp"
#include "firecast/io.hpp"
#include "firecast/model.hpp"
#include "firecast/tape.hpp"

namespace firecast {

template <class T>
struct IgResult {
    Tensor<T> attributions;  // same shape as x
    T f_x = 0;               // scalar output at x
    T f_baseline = 0;        // scalar output at the baseline
    int steps = 0;

    /// |sum(IG) - (F(x) - F(x'))|, the completeness defect.
    T completeness_residual() const {
        T s = 0;
        for (T v : attributions.data) s += v;
        return std::abs(s - (f_x - f_baseline));
    }
};

/// IG_i = (x_i - x'_i) * (1/m) * sum_{k=1..m} dF(x' + (k/m)(x - x'))/dx_i
/// (right-Riemann approximation of the path integral). `forward` maps
/// (tape, input leaf id) to a scalar tape id; it is also used to evaluate
/// F at x and at the baseline for the completeness bookkeeping.
template <class T, class ForwardFn>
IgResult<T> integrated_gradients(ForwardFn&& forward, const Tensor<T>& x,
                                 const Tensor<T>& baseline, int m) {
    require(x.shape == baseline.shape, "integrated_gradients: baseline shape");
    require(m >= 1, "integrated_gradients: m must be >= 1");

    auto eval = [&](const Tensor<T>& point, Tensor<T>* grad_out) -> T {
        Tape<T> t;
        auto xid = t.leaf(point);
        auto f = forward(t, xid);
        require(t.val(f).numel() == 1, "integrated_gradients: F must be scalar");
        T fv = t.val(f).data[0];
        require(std::isfinite(double(fv)),
                "integrated_gradients: non-finite output");
        if (grad_out) {
            t.backward(f);
            *grad_out = t.grad(xid);
            for (T g : grad_out->data)
                require(std::isfinite(double(g)),
                        "integrated_gradients: non-finite gradient");
        }
        return fv;
    };

    IgResult<T> res;
    res.steps = m;
    res.attributions = Tensor<T>::zeros(x.shape);
    res.f_baseline = eval(baseline, nullptr);
    for (int k = 1; k <= m; ++k) {
        T a = T(k) / T(m);
        Tensor<T> point = baseline;
        for (int64_t i = 0; i < x.numel(); ++i)
            point.data[i] += a * (x.data[i] - baseline.data[i]);
        Tensor<T> grad = Tensor<T>::zeros(x.shape);
        T fv = eval(point, &grad);
        if (k == m) res.f_x = fv;
        for (int64_t i = 0; i < x.numel(); ++i)
            res.attributions.data[i] += grad.data[i];
    }
    for (int64_t i = 0; i < x.numel(); ++i)
        res.attributions.data[i] *= (x.data[i] - baseline.data[i]) / T(m);
    return res;
}

/// Attribution shares per variable: each named channel's share is its total
/// |IG| mass divided by the named channels' total. Channels flagged
/// positional are excluded from that normalization and reported separately
/// as a fraction of the grand total.
struct AttributionReport {
    bool valid = false;
    std::string note;
    std::map<std::string, double> shares;  // over named variables, sums to 1
    double positional_share = 0.0;         // fraction of grand total |IG|
    int steps = 0;
    std::string baseline_desc;
    double completeness_residual = 0.0;

    io::json to_json() const {
        io::json j;
        j["valid"] = valid;
        if (!note.empty()) j["note"] = note;
        j["shares"] = shares;
        j["positional_share"] = positional_share;
        j["steps"] = steps;
        j["baseline"] = baseline_desc;
        j["completeness_residual"] = completeness_residual;
        return j;
    }
};

/// `attr` has shape [ts, C, H, W]; `channel_names[c]` names channel c and
/// `positional[c]` marks channels excluded from the normalization (their
/// names are ignored). Channels sharing a name pool together.
template <class T>
AttributionReport aggregate_by_variable(
    const Tensor<T>& attr, const std::vector<std::string>& channel_names,
    const std::vector<uint8_t>& positional) {
    require(attr.ndim() == 4, "aggregate_by_variable: need [ts,C,H,W]");
    int64_t c = attr.dim(1);
    require(static_cast<int64_t>(channel_names.size()) == c,
            "aggregate_by_variable: channel name count");
    require(static_cast<int64_t>(positional.size()) == c,
            "aggregate_by_variable: positional flag count");

    std::map<std::string, double> mass;
    double named_total = 0.0, pos_total = 0.0;
    int64_t hw = attr.dim(2) * attr.dim(3);
    for (int64_t ts = 0; ts < attr.dim(0); ++ts)
        for (int64_t ch = 0; ch < c; ++ch) {
            double s = 0.0;
            const T* p = attr.data.data() + (ts * c + ch) * hw;
            for (int64_t i = 0; i < hw; ++i) s += std::abs(double(p[i]));
            if (positional[static_cast<size_t>(ch)]) {
                pos_total += s;
            } else {
                mass[channel_names[static_cast<size_t>(ch)]] += s;
                named_total += s;
            }
        }

    AttributionReport rep;
    if (named_total == 0.0) {
        rep.valid = false;
        rep.note = "all-zero attributions over named channels";
        return rep;
    }
    rep.valid = true;
    for (auto& [name, m] : mass) rep.shares[name] = m / named_total;
    double grand = named_total + pos_total;
    rep.positional_share = grand > 0.0 ? pos_total / grand : 0.0;
    return rep;
}

/// The standard input layout: channels 0..10 are the cube variables
/// (including lsm), channels 11..13 the positional encodings.
inline void input_channel_layout(std::vector<std::string>& names,
                                 std::vector<uint8_t>& positional) {
    auto vars = cube_variable_names();
    names.clear();
    positional.clear();
    for (int c = 0; c < kDynamicInputs + 1; ++c) {
        names.push_back(vars[static_cast<size_t>(c)]);
        positional.push_back(0);
    }
    for (const char* n : {"pos_coslat", "pos_sinlon", "pos_coslon"}) {
        names.push_back(n);
        positional.push_back(1);
    }
}

/// End-to-end attribution for a FireCastNet checkpoint at 64-bit: zero
/// baseline, m steps, F = mean sigmoid probability over `mask`.
inline AttributionReport attribute_sample(const FireCastNetConfig& cfg,
                                          const MeshContext<double>& ctx,
                                          const ParamStore<double>& ps,
                                          const Tensor<double>& x, int m,
                                          const std::vector<uint8_t>& mask) {
    auto forward = [&](Tape<double>& t, Tape<double>::Id xid) {
        TapeParams<double> p(t, ps);
        auto logits = firecastnet_forward(t, cfg, ctx, p, xid);
        return t.mean_sigmoid(logits, mask);
    };
    Tensor<double> baseline = Tensor<double>::zeros(x.shape);
    IgResult<double> ig = integrated_gradients(forward, x, baseline, m);

    std::vector<std::string> names;
    std::vector<uint8_t> positional;
    input_channel_layout(names, positional);
    AttributionReport rep = aggregate_by_variable(ig.attributions, names,
                                                  positional);
    rep.steps = m;
    rep.baseline_desc = "zero";
    rep.completeness_residual = double(ig.completeness_residual());
    return rep;
}

}  // namespace firecast

#endif  // FIRECAST_ATTRIBUTION_HPP
