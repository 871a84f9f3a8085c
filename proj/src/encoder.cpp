#include "tsc/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "tsc/rng.hpp"

namespace tsc {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y += M * x
void matvec_add(const Matrix& m, const double* x, double* y) {
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* row = m.a.data() + r * m.cols;
        double acc = 0.0;
        for (std::size_t c = 0; c < m.cols; ++c) {
            acc += row[c] * x[c];
        }
        y[r] += acc;
    }
}

// y += M^T * x
void matvec_transpose_add(const Matrix& m, const double* x, double* y) {
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* row = m.a.data() + r * m.cols;
        const double xr = x[r];
        if (xr == 0.0) {
            continue;
        }
        for (std::size_t c = 0; c < m.cols; ++c) {
            y[c] += row[c] * xr;
        }
    }
}

// M += a * b^T
void outer_add(Matrix& m, const double* a, const double* b) {
    for (std::size_t r = 0; r < m.rows; ++r) {
        double* row = m.a.data() + r * m.cols;
        const double ar = a[r];
        if (ar == 0.0) {
            continue;
        }
        for (std::size_t c = 0; c < m.cols; ++c) {
            row[c] += ar * b[c];
        }
    }
}

void glorot_fill(Matrix& m, std::mt19937_64& gen) {
    const double limit = std::sqrt(6.0 / static_cast<double>(m.rows + m.cols));
    for (double& v : m.a) {
        v = rng::uniform(gen, -limit, limit);
    }
}

// Post-activation gate values and states for one step of one direction.
struct CellStep {
    Vector i, f, g, o, c, h;
};

// Runs one LSTM cell over the tokens; step s consumes position
// reverse ? K-1-s : s. States start at zero.
std::vector<CellStep> run_cell(const Matrix& wx, const Matrix& wh, const Vector& b,
                               const ComponentSequence& cs, bool reverse) {
    const std::size_t k = cs.size();
    const std::size_t h_dim = wh.cols;
    std::vector<CellStep> trace(k);
    Vector h(h_dim, 0.0);
    Vector c(h_dim, 0.0);
    Vector pre(4 * h_dim, 0.0);

    for (std::size_t s = 0; s < k; ++s) {
        const std::size_t pos = reverse ? k - 1 - s : s;
        const Vector& x = cs.tokens[pos];
        std::copy(b.begin(), b.end(), pre.begin());
        matvec_add(wx, x.data(), pre.data());
        matvec_add(wh, h.data(), pre.data());

        CellStep& step = trace[s];
        step.i.resize(h_dim);
        step.f.resize(h_dim);
        step.g.resize(h_dim);
        step.o.resize(h_dim);
        step.c.resize(h_dim);
        step.h.resize(h_dim);
        for (std::size_t j = 0; j < h_dim; ++j) {
            step.i[j] = sigmoid(pre[j]);
            step.f[j] = sigmoid(pre[h_dim + j]);
            step.g[j] = std::tanh(pre[2 * h_dim + j]);
            step.o[j] = sigmoid(pre[3 * h_dim + j]);
            step.c[j] = step.f[j] * c[j] + step.i[j] * step.g[j];
            step.h[j] = step.o[j] * std::tanh(step.c[j]);
        }
        c = step.c;
        h = step.h;
    }
    return trace;
}

// Backpropagation through time for one cell. dh_steps[s] is the downstream
// gradient on the hidden state of step s. Gradients accumulate into the
// wx/wh/b slots of `grads`; returns nothing else because inputs are data.
void bptt_cell(const Matrix& wh, const ComponentSequence& cs, bool reverse,
               const std::vector<CellStep>& trace, const std::vector<Vector>& dh_steps,
               Matrix& g_wx, Matrix& g_wh, Vector& g_b) {
    const std::size_t k = cs.size();
    const std::size_t h_dim = wh.cols;
    Vector dh_next(h_dim, 0.0);
    Vector dc_next(h_dim, 0.0);
    Vector dpre(4 * h_dim, 0.0);

    for (std::size_t s = k; s-- > 0;) {
        const CellStep& step = trace[s];
        const Vector* c_prev = s > 0 ? &trace[s - 1].c : nullptr;
        const Vector* h_prev = s > 0 ? &trace[s - 1].h : nullptr;
        const std::size_t pos = reverse ? k - 1 - s : s;

        for (std::size_t j = 0; j < h_dim; ++j) {
            const double dh = dh_steps[s][j] + dh_next[j];
            const double tc = std::tanh(step.c[j]);
            const double dod = dh * tc;
            double dc = dc_next[j] + dh * step.o[j] * (1.0 - tc * tc);
            const double cp = c_prev != nullptr ? (*c_prev)[j] : 0.0;
            const double dfd = dc * cp;
            const double did = dc * step.g[j];
            const double dgd = dc * step.i[j];
            dpre[j] = did * step.i[j] * (1.0 - step.i[j]);
            dpre[h_dim + j] = dfd * step.f[j] * (1.0 - step.f[j]);
            dpre[2 * h_dim + j] = dgd * (1.0 - step.g[j] * step.g[j]);
            dpre[3 * h_dim + j] = dod * step.o[j] * (1.0 - step.o[j]);
            dc_next[j] = dc * step.f[j];
        }

        outer_add(g_wx, dpre.data(), cs.tokens[pos].data());
        if (h_prev != nullptr) {
            outer_add(g_wh, dpre.data(), h_prev->data());
        }
        for (std::size_t j = 0; j < 4 * h_dim; ++j) {
            g_b[j] += dpre[j];
        }
        std::fill(dh_next.begin(), dh_next.end(), 0.0);
        matvec_transpose_add(wh, dpre.data(), dh_next.data());
    }
}

void check_dims(const EncoderParams& p, const ComponentSequence& cs) {
    if (cs.size() == 0) {
        throw DimensionMismatchError("empty token sequence");
    }
    if (cs.padded_length() != p.input_len) {
        throw DimensionMismatchError("token length " + std::to_string(cs.padded_length()) +
                                     " does not match encoder input length " +
                                     std::to_string(p.input_len));
    }
}

Vector softmax_of(const Vector& logits) {
    Vector probs(logits.size());
    const double mx = *std::max_element(logits.begin(), logits.end());
    double denom = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        probs[i] = std::exp(logits[i] - mx);
        denom += probs[i];
    }
    for (double& v : probs) {
        v /= denom;
    }
    return probs;
}

Vector classifier_logits(const EncoderParams& p, const Vector& feature) {
    if (feature.size() != 2 * p.hidden) {
        throw DimensionMismatchError("feature size does not match classifier input");
    }
    Vector logits = p.cls_b;
    matvec_add(p.cls_w, feature.data(), logits.data());
    return logits;
}

// Shared forward pass keeping the cell traces for backpropagation.
struct FullTrace {
    std::vector<CellStep> fwd; // step s = position s
    std::vector<CellStep> bwd; // step s = position K-1-s
    Vector u;                  // [h_fwd last ; h_bwd last]
    Vector dense_pre;
    Vector feature;
};

FullTrace run_forward(const EncoderParams& p, const ComponentSequence& cs) {
    check_dims(p, cs);
    FullTrace t;
    t.fwd = run_cell(p.fwd_wx, p.fwd_wh, p.fwd_b, cs, false);
    t.bwd = run_cell(p.bwd_wx, p.bwd_wh, p.bwd_b, cs, true);
    const std::size_t h_dim = p.hidden;
    t.u.resize(2 * h_dim);
    std::copy(t.fwd.back().h.begin(), t.fwd.back().h.end(), t.u.begin());
    std::copy(t.bwd.back().h.begin(), t.bwd.back().h.end(),
              t.u.begin() + static_cast<std::ptrdiff_t>(h_dim));
    t.dense_pre = p.dense_b;
    matvec_add(p.dense_w, t.u.data(), t.dense_pre.data());
    t.feature.resize(2 * h_dim);
    for (std::size_t j = 0; j < 2 * h_dim; ++j) {
        t.feature[j] = std::max(t.dense_pre[j], 0.0);
    }
    return t;
}

double mae_from_trace(const EncoderParams& p, const FullTrace& trace,
                      const ComponentSequence& original, const MaskPlan& plan) {
    const std::size_t k = original.size();
    const std::size_t h_dim = p.hidden;
    double loss = 0.0;
    for (std::size_t m : plan.masked_indices) {
        if (m >= k) {
            throw IndexOutOfRangeError("mask index out of range");
        }
        Vector z(2 * h_dim);
        std::copy(trace.fwd[m].h.begin(), trace.fwd[m].h.end(), z.begin());
        const std::size_t bwd_step = k - 1 - m;
        std::copy(trace.bwd[bwd_step].h.begin(), trace.bwd[bwd_step].h.end(),
                  z.begin() + static_cast<std::ptrdiff_t>(h_dim));
        Vector pred = p.recon_b;
        matvec_add(p.recon_w, z.data(), pred.data());
        const std::size_t len = original.true_lengths[m];
        double se = 0.0;
        for (std::size_t j = 0; j < len; ++j) {
            const double d = pred[j] - original.tokens[m][j];
            se += d * d;
        }
        loss += se / static_cast<double>(len);
    }
    return loss / static_cast<double>(plan.masked_indices.size());
}

} // namespace

EncoderParams::EncoderParams(std::size_t input_len_, std::size_t hidden_, std::size_t classes_,
                             std::uint64_t seed)
    : input_len(input_len_), hidden(hidden_), classes(classes_) {
    if (input_len == 0 || hidden == 0 || classes == 0) {
        throw InvalidArgumentError("encoder dimensions must be positive");
    }
    fwd_wx = Matrix(4 * hidden, input_len);
    fwd_wh = Matrix(4 * hidden, hidden);
    fwd_b = Vector(4 * hidden, 0.0);
    bwd_wx = Matrix(4 * hidden, input_len);
    bwd_wh = Matrix(4 * hidden, hidden);
    bwd_b = Vector(4 * hidden, 0.0);
    dense_w = Matrix(2 * hidden, 2 * hidden);
    dense_b = Vector(2 * hidden, 0.0);
    recon_w = Matrix(input_len, 2 * hidden);
    recon_b = Vector(input_len, 0.0);
    cls_w = Matrix(classes, 2 * hidden);
    cls_b = Vector(classes, 0.0);

    std::mt19937_64 gen(seed);
    glorot_fill(fwd_wx, gen);
    glorot_fill(fwd_wh, gen);
    glorot_fill(bwd_wx, gen);
    glorot_fill(bwd_wh, gen);
    glorot_fill(dense_w, gen);
    glorot_fill(recon_w, gen);
    glorot_fill(cls_w, gen);
    // forget-gate bias of 1 keeps early memory open
    std::fill(fwd_b.begin() + static_cast<std::ptrdiff_t>(hidden),
              fwd_b.begin() + static_cast<std::ptrdiff_t>(2 * hidden), 1.0);
    std::fill(bwd_b.begin() + static_cast<std::ptrdiff_t>(hidden),
              bwd_b.begin() + static_cast<std::ptrdiff_t>(2 * hidden), 1.0);
}

EncoderParams EncoderParams::zeros_like(const EncoderParams& shape) {
    EncoderParams z;
    z.input_len = shape.input_len;
    z.hidden = shape.hidden;
    z.classes = shape.classes;
    z.fwd_wx = Matrix(shape.fwd_wx.rows, shape.fwd_wx.cols);
    z.fwd_wh = Matrix(shape.fwd_wh.rows, shape.fwd_wh.cols);
    z.fwd_b = Vector(shape.fwd_b.size(), 0.0);
    z.bwd_wx = Matrix(shape.bwd_wx.rows, shape.bwd_wx.cols);
    z.bwd_wh = Matrix(shape.bwd_wh.rows, shape.bwd_wh.cols);
    z.bwd_b = Vector(shape.bwd_b.size(), 0.0);
    z.dense_w = Matrix(shape.dense_w.rows, shape.dense_w.cols);
    z.dense_b = Vector(shape.dense_b.size(), 0.0);
    z.recon_w = Matrix(shape.recon_w.rows, shape.recon_w.cols);
    z.recon_b = Vector(shape.recon_b.size(), 0.0);
    z.cls_w = Matrix(shape.cls_w.rows, shape.cls_w.cols);
    z.cls_b = Vector(shape.cls_b.size(), 0.0);
    return z;
}

std::size_t EncoderParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& [name, view] : tensor_views()) {
        n += view.size();
    }
    return n;
}

std::vector<std::pair<const char*, std::span<double>>> EncoderParams::tensor_views() {
    return {
        {"fwd_wx", fwd_wx.a},  {"fwd_wh", fwd_wh.a},   {"fwd_b", fwd_b},
        {"bwd_wx", bwd_wx.a},  {"bwd_wh", bwd_wh.a},   {"bwd_b", bwd_b},
        {"dense_w", dense_w.a}, {"dense_b", dense_b},  {"recon_w", recon_w.a},
        {"recon_b", recon_b},  {"cls_w", cls_w.a},     {"cls_b", cls_b},
    };
}

std::vector<std::pair<const char*, std::span<const double>>> EncoderParams::tensor_views()
    const {
    return {
        {"fwd_wx", fwd_wx.a},  {"fwd_wh", fwd_wh.a},   {"fwd_b", fwd_b},
        {"bwd_wx", bwd_wx.a},  {"bwd_wh", bwd_wh.a},   {"bwd_b", bwd_b},
        {"dense_w", dense_w.a}, {"dense_b", dense_b},  {"recon_w", recon_w.a},
        {"recon_b", recon_b},  {"cls_w", cls_w.a},     {"cls_b", cls_b},
    };
}

void TrainConfig::validate() const {
    if (max_epochs == 0 || batch_size == 0) {
        throw InvalidArgumentError("max_epochs and batch_size must be positive");
    }
    if (patience == 0 || patience >= max_epochs) {
        throw InvalidArgumentError("patience must lie in [1, max_epochs)");
    }
    if (learning_rate <= 0.0 || grad_clip <= 0.0 || adam_eps <= 0.0) {
        throw InvalidArgumentError("learning_rate, grad_clip and adam_eps must be positive");
    }
    if (beta1 <= 0.0 || beta1 >= 1.0 || beta2 <= 0.0 || beta2 >= 1.0) {
        throw InvalidArgumentError("adam betas must lie in (0, 1)");
    }
    if (mask_ratio <= 0.0 || mask_ratio >= 1.0) {
        throw InvalidArgumentError("mask_ratio must lie in (0, 1)");
    }
}

EncoderOutput forward_features(const EncoderParams& p, const ComponentSequence& cs) {
    const FullTrace t = run_forward(p, cs);
    EncoderOutput out;
    out.feature = t.feature;
    const std::size_t k = cs.size();
    const std::size_t h_dim = p.hidden;
    out.position_features.resize(k);
    for (std::size_t pos = 0; pos < k; ++pos) {
        Vector z(2 * h_dim);
        std::copy(t.fwd[pos].h.begin(), t.fwd[pos].h.end(), z.begin());
        const std::size_t bwd_step = k - 1 - pos;
        std::copy(t.bwd[bwd_step].h.begin(), t.bwd[bwd_step].h.end(),
                  z.begin() + static_cast<std::ptrdiff_t>(h_dim));
        out.position_features[pos] = std::move(z);
    }
    return out;
}

double mae_loss(const EncoderParams& p, const ComponentSequence& masked,
                const ComponentSequence& original, const MaskPlan& plan) {
    if (masked.size() != original.size()) {
        throw DimensionMismatchError("masked and original token counts differ");
    }
    const FullTrace t = run_forward(p, masked);
    return mae_from_trace(p, t, original, plan);
}

double ce_loss(const EncoderParams& p, const Vector& feature, int label) {
    if (label < 0 || static_cast<std::size_t>(label) >= p.classes) {
        throw LabelOutOfRangeError(label, p.classes);
    }
    const Vector logits = classifier_logits(p, feature);
    const double mx = *std::max_element(logits.begin(), logits.end());
    double denom = 0.0;
    for (double v : logits) {
        denom += std::exp(v - mx);
    }
    return mx + std::log(denom) - logits[static_cast<std::size_t>(label)];
}

Classification classify(const EncoderParams& p, const ComponentSequence& cs) {
    const EncoderOutput out = forward_features(p, cs);
    Classification result;
    result.probabilities = softmax_of(classifier_logits(p, out.feature));
    result.label = 0;
    for (std::size_t i = 1; i < result.probabilities.size(); ++i) {
        if (result.probabilities[i] > result.probabilities[static_cast<std::size_t>(result.label)]) {
            result.label = static_cast<int>(i);
        }
    }
    return result;
}

LossReport backward(const EncoderParams& p, std::span<const LabeledSequence> batch,
                    std::span<const MaskPlan> plans, double lambda1, double lambda2,
                    EncoderParams& grads) {
    if (batch.empty() || batch.size() != plans.size()) {
        throw InvalidArgumentError("batch and mask plans must be non-empty and aligned");
    }
    grads = EncoderParams::zeros_like(p);
    const std::size_t h_dim = p.hidden;
    const double inv_batch = 1.0 / static_cast<double>(batch.size());

    LossReport report;
    for (std::size_t bi = 0; bi < batch.size(); ++bi) {
        const LabeledSequence& item = batch[bi];
        const MaskPlan& plan = plans[bi];
        const std::size_t k = item.sequence.size();

        // Masked pass: reconstruction loss and, when weighted, its gradients.
        const ComponentSequence masked = apply_mask(item.sequence, plan);
        const FullTrace mt = run_forward(p, masked);
        report.mae += mae_from_trace(p, mt, item.sequence, plan) * inv_batch;

        if (lambda1 != 0.0) {
            std::vector<Vector> dh_fwd(k, Vector(h_dim, 0.0));
            std::vector<Vector> dh_bwd(k, Vector(h_dim, 0.0)); // per backward step
            const double mask_scale =
                lambda1 * inv_batch / static_cast<double>(plan.masked_indices.size());
            for (std::size_t m : plan.masked_indices) {
                Vector z(2 * h_dim);
                std::copy(mt.fwd[m].h.begin(), mt.fwd[m].h.end(), z.begin());
                const std::size_t bwd_step = k - 1 - m;
                std::copy(mt.bwd[bwd_step].h.begin(), mt.bwd[bwd_step].h.end(),
                          z.begin() + static_cast<std::ptrdiff_t>(h_dim));
                Vector pred = p.recon_b;
                matvec_add(p.recon_w, z.data(), pred.data());

                const std::size_t len = item.sequence.true_lengths[m];
                Vector dpred(p.input_len, 0.0);
                const double scale = mask_scale * 2.0 / static_cast<double>(len);
                for (std::size_t j = 0; j < len; ++j) {
                    dpred[j] = scale * (pred[j] - item.sequence.tokens[m][j]);
                }
                outer_add(grads.recon_w, dpred.data(), z.data());
                for (std::size_t j = 0; j < p.input_len; ++j) {
                    grads.recon_b[j] += dpred[j];
                }
                Vector dz(2 * h_dim, 0.0);
                matvec_transpose_add(p.recon_w, dpred.data(), dz.data());
                for (std::size_t j = 0; j < h_dim; ++j) {
                    dh_fwd[m][j] += dz[j];
                    dh_bwd[bwd_step][j] += dz[h_dim + j];
                }
            }
            bptt_cell(p.fwd_wx, p.fwd_wh, masked, false, mt.fwd, dh_fwd, grads.fwd_wx,
                      grads.fwd_wh, grads.fwd_b);
            bptt_cell(p.bwd_wx, p.bwd_wh, masked, true, mt.bwd, dh_bwd, grads.bwd_wx,
                      grads.bwd_wh, grads.bwd_b);
        }

        // Unmasked pass: the classification loss, matching inference inputs.
        const FullTrace ut = run_forward(p, item.sequence);
        const Vector logits = classifier_logits(p, ut.feature);
        if (item.label < 0 || static_cast<std::size_t>(item.label) >= p.classes) {
            throw LabelOutOfRangeError(item.label, p.classes);
        }
        const Vector probs = softmax_of(logits);
        {
            const double mx = *std::max_element(logits.begin(), logits.end());
            double denom = 0.0;
            for (double v : logits) {
                denom += std::exp(v - mx);
            }
            report.ce +=
                (mx + std::log(denom) - logits[static_cast<std::size_t>(item.label)]) * inv_batch;
        }

        if (lambda2 != 0.0) {
            Vector dlogits(p.classes);
            for (std::size_t j = 0; j < p.classes; ++j) {
                dlogits[j] = lambda2 * inv_batch *
                             (probs[j] - (static_cast<std::size_t>(item.label) == j ? 1.0 : 0.0));
            }
            outer_add(grads.cls_w, dlogits.data(), ut.feature.data());
            for (std::size_t j = 0; j < p.classes; ++j) {
                grads.cls_b[j] += dlogits[j];
            }
            Vector dfeature(2 * h_dim, 0.0);
            matvec_transpose_add(p.cls_w, dlogits.data(), dfeature.data());
            Vector dpre(2 * h_dim);
            for (std::size_t j = 0; j < 2 * h_dim; ++j) {
                dpre[j] = ut.dense_pre[j] > 0.0 ? dfeature[j] : 0.0;
            }
            outer_add(grads.dense_w, dpre.data(), ut.u.data());
            for (std::size_t j = 0; j < 2 * h_dim; ++j) {
                grads.dense_b[j] += dpre[j];
            }
            Vector du(2 * h_dim, 0.0);
            matvec_transpose_add(p.dense_w, dpre.data(), du.data());

            std::vector<Vector> dh_fwd(k, Vector(h_dim, 0.0));
            std::vector<Vector> dh_bwd(k, Vector(h_dim, 0.0));
            for (std::size_t j = 0; j < h_dim; ++j) {
                dh_fwd[k - 1][j] = du[j];           // final forward step
                dh_bwd[k - 1][j] = du[h_dim + j];   // final backward step (position 0)
            }
            bptt_cell(p.fwd_wx, p.fwd_wh, item.sequence, false, ut.fwd, dh_fwd, grads.fwd_wx,
                      grads.fwd_wh, grads.fwd_b);
            bptt_cell(p.bwd_wx, p.bwd_wh, item.sequence, true, ut.bwd, dh_bwd, grads.bwd_wx,
                      grads.bwd_wh, grads.bwd_b);
        }
    }

    for (const auto& [name, view] : grads.tensor_views()) {
        for (double v : view) {
            if (!std::isfinite(v)) {
                throw NonFiniteGradientError(std::string("non-finite gradient in ") + name);
            }
        }
    }
    report.total = lambda1 * report.mae + lambda2 * report.ce;
    return report;
}

namespace {

struct AdamState {
    EncoderParams m;
    EncoderParams v;
    std::size_t step = 0;
};

void adam_update(EncoderParams& params, EncoderParams& grads, AdamState& state,
                 const TrainConfig& cfg) {
    // global-norm clip
    double norm_sq = 0.0;
    for (const auto& [name, view] : grads.tensor_views()) {
        for (double g : view) {
            norm_sq += g * g;
        }
    }
    const double norm = std::sqrt(norm_sq);
    if (norm > cfg.grad_clip) {
        const double scale = cfg.grad_clip / norm;
        for (auto& [name, view] : grads.tensor_views()) {
            for (double& g : view) {
                g *= scale;
            }
        }
    }

    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    auto pv = params.tensor_views();
    auto gv = grads.tensor_views();
    auto mv = state.m.tensor_views();
    auto vv = state.v.tensor_views();
    for (std::size_t ti = 0; ti < pv.size(); ++ti) {
        auto& pspan = pv[ti].second;
        auto& gspan = gv[ti].second;
        auto& mspan = mv[ti].second;
        auto& vspan = vv[ti].second;
        for (std::size_t j = 0; j < pspan.size(); ++j) {
            mspan[j] = cfg.beta1 * mspan[j] + (1.0 - cfg.beta1) * gspan[j];
            vspan[j] = cfg.beta2 * vspan[j] + (1.0 - cfg.beta2) * gspan[j] * gspan[j];
            const double m_hat = mspan[j] / bc1;
            const double v_hat = vspan[j] / bc2;
            pspan[j] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
        }
    }
}

} // namespace

TrainResult train(const std::vector<LabeledSequence>& train_items,
                  const std::vector<LabeledSequence>& val_items, const TrainConfig& cfg,
                  const LossSchedule& schedule) {
    cfg.validate();
    if (train_items.empty()) {
        throw EmptyTrainingSetError();
    }
    if (val_items.empty()) {
        throw InvalidArgumentError("training requires a held-out validation set");
    }
    const std::size_t input_len = train_items.front().sequence.padded_length();
    std::size_t classes = 0;
    for (const auto& item : train_items) {
        if (item.label < 0) {
            throw InvalidArgumentError("training labels must be non-negative");
        }
        classes = std::max(classes, static_cast<std::size_t>(item.label) + 1);
    }
    for (const auto& item : val_items) {
        classes = std::max(classes, static_cast<std::size_t>(item.label) + 1);
    }
    classes = std::max<std::size_t>(classes, 2);

    EncoderParams params(input_len, 160, classes, cfg.seed);
    AdamState adam{EncoderParams::zeros_like(params), EncoderParams::zeros_like(params), 0};
    EncoderParams grads = EncoderParams::zeros_like(params);

    // Fixed validation masks keep the early-stopping metric comparable
    // across epochs.
    std::vector<MaskPlan> val_plans;
    val_plans.reserve(val_items.size());
    for (std::size_t i = 0; i < val_items.size(); ++i) {
        val_plans.push_back(
            plan_mask(val_items[i].sequence.size(), cfg.mask_ratio, rng::mix(cfg.seed, 0, i)));
    }

    TrainResult result;
    result.params = params;
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0;
    std::size_t stall = 0;

    std::vector<std::size_t> order(train_items.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const auto [lambda1, lambda2] = schedule.active(epoch);
        if (epoch == schedule.phase_boundary + 1) {
            // the monitored loss is not comparable across the weight change
            best_val = std::numeric_limits<double>::infinity();
            stall = 0;
        }

        std::mt19937_64 shuffle_gen(rng::mix(cfg.seed, epoch, 0x5u));
        rng::shuffle(shuffle_gen, order);

        double epoch_mae = 0.0;
        double epoch_ce = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, order.size());
            std::vector<LabeledSequence> batch;
            std::vector<MaskPlan> plans;
            batch.reserve(end - start);
            plans.reserve(end - start);
            for (std::size_t i = start; i < end; ++i) {
                const std::size_t item = order[i];
                batch.push_back(train_items[item]);
                plans.push_back(plan_mask(train_items[item].sequence.size(), cfg.mask_ratio,
                                          rng::mix(cfg.seed, epoch, item + 1)));
            }
            const LossReport r = backward(params, batch, plans, lambda1, lambda2, grads);
            adam_update(params, grads, adam, cfg);
            epoch_mae += r.mae * static_cast<double>(batch.size());
            epoch_ce += r.ce * static_cast<double>(batch.size());
            seen += batch.size();
        }
        epoch_mae /= static_cast<double>(seen);
        epoch_ce /= static_cast<double>(seen);

        double val_mae = 0.0;
        double val_ce = 0.0;
        for (std::size_t i = 0; i < val_items.size(); ++i) {
            const ComponentSequence masked = apply_mask(val_items[i].sequence, val_plans[i]);
            const FullTrace mt = run_forward(params, masked);
            val_mae += mae_from_trace(params, mt, val_items[i].sequence, val_plans[i]);
            const FullTrace ut = run_forward(params, val_items[i].sequence);
            const Vector logits = classifier_logits(params, ut.feature);
            const double mx = *std::max_element(logits.begin(), logits.end());
            double denom = 0.0;
            for (double v : logits) {
                denom += std::exp(v - mx);
            }
            val_ce += mx + std::log(denom) - logits[static_cast<std::size_t>(val_items[i].label)];
        }
        val_mae /= static_cast<double>(val_items.size());
        val_ce /= static_cast<double>(val_items.size());
        const double val_total = lambda1 * val_mae + lambda2 * val_ce;

        result.log.push_back(TrainLogEntry{epoch, epoch_mae, epoch_ce,
                                           lambda1 * epoch_mae + lambda2 * epoch_ce, val_total,
                                           lambda1, lambda2});

        if (val_total < best_val) {
            best_val = val_total;
            best_epoch = epoch;
            result.params = params;
            stall = 0;
        } else if (epoch > schedule.phase_boundary) {
            ++stall;
            if (stall >= cfg.patience) {
                break;
            }
        }
    }

    result.best_epoch = best_epoch;
    result.best_val = best_val;
    return result;
}

namespace {

constexpr char kCheckpointMagic[8] = {'T', 'S', 'C', 'E', 'N', 'C', '0', '1'};

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
    }
}

void put_f64(std::string& out, double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof(bits));
    put_u64(out, bits);
}

struct Reader {
    const std::string& bytes;
    std::size_t pos = 0;

    std::uint64_t u64() {
        if (pos + 8 > bytes.size()) {
            throw Error("checkpoint truncated");
        }
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + static_cast<std::size_t>(i)]))
                 << (8 * i);
        }
        pos += 8;
        return v;
    }

    double f64() {
        const std::uint64_t bits = u64();
        double v = 0.0;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }
};

} // namespace

void save_checkpoint(const std::string& path, const EncoderParams& params,
                     const TrainConfig& config) {
    std::string payload(kCheckpointMagic, sizeof(kCheckpointMagic));
    put_u64(payload, params.input_len);
    put_u64(payload, params.hidden);
    put_u64(payload, params.classes);
    put_u64(payload, config.max_epochs);
    put_u64(payload, config.patience);
    put_u64(payload, config.batch_size);
    put_u64(payload, config.seed);
    put_f64(payload, config.learning_rate);
    put_f64(payload, config.beta1);
    put_f64(payload, config.beta2);
    put_f64(payload, config.adam_eps);
    put_f64(payload, config.grad_clip);
    put_f64(payload, config.mask_ratio);
    for (const auto& [name, view] : params.tensor_views()) {
        put_u64(payload, view.size());
        for (double v : view) {
            put_f64(payload, v);
        }
    }
    put_u64(payload, fnv1a64(payload));

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write checkpoint " + path);
    }
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open checkpoint " + path);
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < sizeof(kCheckpointMagic) + 8 ||
        std::memcmp(bytes.data(), kCheckpointMagic, sizeof(kCheckpointMagic)) != 0) {
        throw Error("not a checkpoint file: " + path);
    }
    const std::string body = bytes.substr(0, bytes.size() - 8);
    Reader tail{bytes, bytes.size() - 8};
    if (tail.u64() != fnv1a64(body)) {
        throw Error("checkpoint checksum mismatch: " + path);
    }

    Reader r{bytes, sizeof(kCheckpointMagic)};
    const std::uint64_t input_len = r.u64();
    const std::uint64_t hidden = r.u64();
    const std::uint64_t classes = r.u64();
    Checkpoint ck;
    ck.config.max_epochs = r.u64();
    ck.config.patience = r.u64();
    ck.config.batch_size = r.u64();
    ck.config.seed = r.u64();
    ck.config.learning_rate = r.f64();
    ck.config.beta1 = r.f64();
    ck.config.beta2 = r.f64();
    ck.config.adam_eps = r.f64();
    ck.config.grad_clip = r.f64();
    ck.config.mask_ratio = r.f64();

    ck.params = EncoderParams(input_len, hidden, classes, 0);
    for (auto& [name, view] : ck.params.tensor_views()) {
        const std::uint64_t count = r.u64();
        if (count != view.size()) {
            throw Error(std::string("checkpoint tensor ") + name + " has wrong size");
        }
        for (double& v : view) {
            v = r.f64();
        }
    }
    return ck;
}

} // namespace tsc
