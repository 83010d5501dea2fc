#ifndef FIRECAST_TRAINING_HPP
#define FIRECAST_TRAINING_HPP

/// Masked BCE loss, AdamW with decoupled weight decay, SGDR warm-restart
/// scheduling, and the seeded epoch loop with best-checkpoint retention.

#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "firecast/common.hpp"
#include "firecast/data.hpp"
#include "firecast/eval.hpp"
#include "firecast/model.hpp"
#include "firecast/tape.hpp"

namespace firecast {

struct TrainConfig {
    int epochs = 50;
    double base_lr = 1e-3;
    double weight_decay = 1e-7;
    std::vector<int> sgdr_cycles{10, 40};
    int batch_size = 1;
    uint64_t seed = 0;

    void validate() const {
        require(epochs >= 1, "train config: epochs must be >= 1");
        require(base_lr > 0.0, "train config: base_lr must be positive");
        require(weight_decay >= 0.0, "train config: negative weight decay");
        require(batch_size >= 1, "train config: batch_size must be >= 1");
        require(!sgdr_cycles.empty(), "train config: no SGDR cycles");
        int total = 0;
        for (int c : sgdr_cycles) {
            require(c >= 1, "train config: SGDR cycle length must be >= 1");
            total += c;
        }
        require(total <= epochs,
                "train config: SGDR cycle lengths sum beyond epoch count");
    }
};

/// Mean over masked cells of the stable-form binary cross-entropy
/// max(z,0) - z*y + log(1+exp(-|z|)); value-only counterpart of
/// Tape::bce_with_logits.
template <class T>
double bce_loss(const Tensor<T>& logits, const Tensor<T>& target,
                const std::vector<uint8_t>& mask) {
    require(logits.numel() == target.numel(), "bce_loss: shape mismatch");
    require(static_cast<int64_t>(mask.size()) == logits.numel(),
            "bce_loss: mask size mismatch");
    double acc = 0.0;
    int64_t n = 0;
    for (int64_t i = 0; i < logits.numel(); ++i) {
        if (!mask[static_cast<size_t>(i)]) continue;
        double z = logits.data[i], y = target.data[i];
        acc += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
        ++n;
    }
    require(n > 0, "bce_loss: empty mask");
    return acc / double(n);
}

/// SGDR: eta = eta_min + (eta_max - eta_min)/2 * (1 + cos(pi*T_cur/T_i)),
/// sampled per epoch, restarting at each cycle boundary. Epochs past the
/// configured cycles repeat the last cycle length.
inline double sgdr_lr(int epoch, const std::vector<int>& cycles,
                      double eta_max = 1e-3, double eta_min = 0.0) {
    require(epoch >= 0, "sgdr_lr: negative epoch");
    require(!cycles.empty(), "sgdr_lr: no cycles");
    int start = 0;
    int len = 0;
    for (int c : cycles) {
        if (epoch < start + c) {
            len = c;
            break;
        }
        start += c;
    }
    if (len == 0) {
        // past the listed cycles: keep restarting with the last length
        len = cycles.back();
        start += ((epoch - start) / len) * len;
    }
    double frac = double(epoch - start) / double(len);
    return eta_min + 0.5 * (eta_max - eta_min) * (1.0 + std::cos(kPi * frac));
}

/// AdamW with decoupled weight decay:
///   theta <- theta - lr * m_hat/(sqrt(v_hat)+eps) - lr * lambda * theta.
/// Moment buffers align with the ParamStore entry order.
template <class T>
class AdamW {
public:
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    double weight_decay = 0.0;

    explicit AdamW(const ParamStore<T>& ps, double wd = 0.0)
        : weight_decay(wd) {
        for (const auto& e : ps.entries()) {
            m_.emplace_back(e.value.data.size(), T(0));
            v_.emplace_back(e.value.data.size(), T(0));
        }
    }

    int64_t step_count() const { return step_; }

    /// One update over all parameters. `grads` must align with the store's
    /// entry order. A non-finite gradient rejects the whole step (no state
    /// is modified) with a diagnostic naming the parameter.
    void step(ParamStore<T>& ps, const std::vector<Tensor<T>>& grads,
              double lr) {
        auto& entries = ps.entries();
        require(grads.size() == entries.size(), "adamw_step: gradient count");
        for (size_t p = 0; p < entries.size(); ++p) {
            require(grads[p].numel() == entries[p].value.numel(),
                    "adamw_step: gradient shape for " + entries[p].name);
            for (T g : grads[p].data)
                require(std::isfinite(double(g)),
                        "adamw_step: non-finite gradient in " + entries[p].name +
                            "; step rejected");
        }
        ++step_;
        T b1 = T(beta1), b2 = T(beta2);
        T c1 = T(1) - T(std::pow(beta1, double(step_)));
        T c2 = T(1) - T(std::pow(beta2, double(step_)));
        for (size_t p = 0; p < entries.size(); ++p) {
            auto& theta = entries[p].value.data;
            const auto& g = grads[p].data;
            auto& m = m_[p];
            auto& v = v_[p];
            for (size_t i = 0; i < theta.size(); ++i) {
                m[i] = b1 * m[i] + (T(1) - b1) * g[i];
                v[i] = b2 * v[i] + (T(1) - b2) * g[i] * g[i];
                T mhat = m[i] / c1;
                T vhat = v[i] / c2;
                theta[i] -= T(lr) * (mhat / (std::sqrt(vhat) + T(eps))) +
                            T(lr) * T(weight_decay) * theta[i];
            }
        }
    }

private:
    int64_t step_ = 0;
    std::vector<std::vector<T>> m_, v_;
};

// ---- epoch loop ----

struct EpochRecord {
    int epoch = 0;
    double lr = 0.0;
    double train_loss = 0.0;
    double val_auprc = 0.0;
    bool val_auprc_valid = false;
};

struct TrainResult {
    std::vector<EpochRecord> log;
    int best_epoch = -1;
    double best_val_auprc = -1.0;
    ParamStore<float> best_params;
    double initial_loss = 0.0;  // first-batch loss before any update
};

namespace detail {

inline Tensor<float> forward_logits(const FireCastNetConfig& cfg,
                                    const MeshContext<float>& ctx,
                                    const ParamStore<float>& ps,
                                    const Tensor<float>& x) {
    Tape<float> t;
    TapeParams<float> p(t, ps);
    auto logits = firecastnet_forward(t, cfg, ctx, p, t.leaf(x));
    return t.val(logits);
}

}  // namespace detail

/// Validation AUPRC: pool sigmoid scores against binary targets over the
/// mask across all validation samples.
inline ApResult validation_auprc(const FireCastNetConfig& cfg,
                                 const MeshContext<float>& ctx,
                                 const ParamStore<float>& ps,
                                 const DatacubeSlab& cube,
                                 const Tensor<float>& pos,
                                 const std::vector<SampleIdx>& val,
                                 const std::vector<uint8_t>& mask) {
    std::vector<double> scores;
    std::vector<uint8_t> labels;
    for (const auto& s : val) {
        Tensor<float> x = make_input(cube, s, pos);
        Tensor<float> z = detail::forward_logits(cfg, ctx, ps, x);
        Tensor<float> y = make_target(cube, s);
        for (int64_t i = 0; i < z.numel(); ++i) {
            if (!mask[static_cast<size_t>(i)]) continue;
            scores.push_back(1.0 / (1.0 + std::exp(-double(z.data[i]))));
            labels.push_back(y.data[i] > 0.5f ? 1 : 0);
        }
    }
    if (scores.empty()) return {false, 0.0, "empty validation pool"};
    return average_precision(scores, labels);
}

/// Seeded epoch loop: per-epoch shuffled batches, masked BCE, AdamW with the
/// SGDR learning rate, per-epoch validation AUPRC, best-checkpoint retention.
/// All randomness derives from tc.seed. `log_stream`, when set, receives one
/// JSON line per epoch.
inline TrainResult train_loop(const FireCastNetConfig& cfg,
                              ParamStore<float>& ps,
                              const MeshContext<float>& ctx,
                              const DatacubeSlab& cube,
                              const std::vector<SampleIdx>& train,
                              const std::vector<SampleIdx>& val,
                              const TrainConfig& tc,
                              const std::vector<uint8_t>& loss_mask,
                              std::ostream* log_stream = nullptr) {
    tc.validate();
    require(!train.empty(), "train_loop: no training samples");
    require(static_cast<int64_t>(loss_mask.size()) == cube.h() * cube.w(),
            "train_loop: mask size mismatch");
    bool any = false;
    for (uint8_t m : loss_mask) any |= (m != 0);
    require(any, "train_loop: loss mask covers zero cells");

    Tensor<float> pos = positional_channels(cube.grid);
    AdamW<float> opt(ps, tc.weight_decay);
    Rng rng(tc.seed);

    TrainResult res;
    bool first_batch = true;
    for (int epoch = 0; epoch < tc.epochs; ++epoch) {
        double lr = sgdr_lr(epoch, tc.sgdr_cycles, tc.base_lr, 0.0);
        std::vector<SampleIdx> order = train;
        Rng erng = rng.fork(uint64_t(epoch) + 1);
        erng.shuffle(order);

        double epoch_loss = 0.0;
        int64_t batches = 0;
        for (size_t b0 = 0; b0 < order.size();
             b0 += static_cast<size_t>(tc.batch_size)) {
            size_t b1 = std::min(order.size(),
                                 b0 + static_cast<size_t>(tc.batch_size));
            std::vector<Tensor<float>> grads;
            double batch_loss = 0.0;
            for (size_t s = b0; s < b1; ++s) {
                Tape<float> t;
                TapeParams<float> p(t, ps);
                Tensor<float> x = make_input(cube, order[s], pos);
                auto logits = firecastnet_forward(t, cfg, ctx, p, t.leaf(x));
                Tensor<float> y = make_target(cube, order[s]);
                auto loss = t.bce_with_logits(logits, y, loss_mask);
                double lv = double(t.val(loss).data[0]);
                require(std::isfinite(lv),
                        "train_loop: non-finite loss at epoch " +
                            std::to_string(epoch) + " batch " +
                            std::to_string(batches));
                batch_loss += lv;
                t.backward(loss);
                // fixed-order gradient averaging across the batch
                size_t pi = 0;
                for (const auto& name : p.order()) {
                    const Tensor<float>& g = t.grad(p.id(name));
                    if (s == b0) {
                        grads.push_back(g);
                    } else {
                        for (int64_t i = 0; i < g.numel(); ++i)
                            grads[pi].data[i] += g.data[i];
                    }
                    ++pi;
                }
            }
            double inv = 1.0 / double(b1 - b0);
            if (b1 - b0 > 1)
                for (auto& g : grads)
                    for (auto& v : g.data) v *= float(inv);
            batch_loss *= inv;
            if (first_batch) {
                res.initial_loss = batch_loss;
                first_batch = false;
            }
            opt.step(ps, grads, lr);
            epoch_loss += batch_loss;
            ++batches;
        }
        epoch_loss /= double(batches);

        ApResult vap = val.empty()
                           ? ApResult{false, 0.0, "no validation samples"}
                           : validation_auprc(cfg, ctx, ps, cube, pos, val,
                                              loss_mask);
        EpochRecord rec{epoch, lr, epoch_loss,
                        vap.valid ? vap.value : 0.0, vap.valid};
        res.log.push_back(rec);
        if (log_stream) {
            io::json j;
            j["epoch"] = epoch;
            j["lr"] = lr;
            j["train_loss"] = epoch_loss;
            j["val_auprc"] = vap.valid ? io::json(vap.value) : io::json(nullptr);
            (*log_stream) << j.dump() << "\n";
            log_stream->flush();
        }
        if (vap.valid ? vap.value > res.best_val_auprc
                      : res.best_epoch < 0) {
            res.best_epoch = epoch;
            res.best_val_auprc = vap.valid ? vap.value : -1.0;
            res.best_params = ps;
        }
    }
    if (res.best_epoch < 0) {
        res.best_epoch = tc.epochs - 1;
        res.best_params = ps;
    }
    return res;
}

}  // namespace firecast

#endif  // FIRECAST_TRAINING_HPP
