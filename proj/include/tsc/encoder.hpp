#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsc/tokenizer.hpp"
#include "tsc/types.hpp"

namespace tsc {

/// Dense row-major matrix; the model is small enough that hand-rolled loops
/// in double precision beat pulling in a linear-algebra dependency.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

using Vector = std::vector<double>;

/// All trainable weights: one LSTM cell per direction (gates stacked i, f, g,
/// o), the 2H dense layer with rectified-linear activation, the linear
/// reconstruction head and the linear classifier head.
struct EncoderParams {
    std::size_t input_len = 0; // L
    std::size_t hidden = 0;    // H per direction
    std::size_t classes = 0;   // C

    Matrix fwd_wx, fwd_wh; // 4H x L, 4H x H
    Vector fwd_b;          // 4H
    Matrix bwd_wx, bwd_wh;
    Vector bwd_b;
    Matrix dense_w; // 2H x 2H
    Vector dense_b;
    Matrix recon_w; // L x 2H
    Vector recon_b;
    Matrix cls_w; // C x 2H
    Vector cls_b;

    EncoderParams() = default;
    /// Glorot-uniform weights, zero biases, forget-gate bias 1.
    EncoderParams(std::size_t input_len, std::size_t hidden, std::size_t classes,
                  std::uint64_t seed);
    static EncoderParams zeros_like(const EncoderParams& shape);

    std::size_t parameter_count() const;
    /// Flat views over every tensor in a fixed order; the shared iteration
    /// used by the optimizer, gradient clipping and the checkpoint format.
    std::vector<std::pair<const char*, std::span<double>>> tensor_views();
    std::vector<std::pair<const char*, std::span<const double>>> tensor_views() const;
};

/// Phased loss weights: (lambda1, lambda2) = (1, 0) through the boundary
/// epoch, then (2, 1).
struct LossSchedule {
    std::size_t phase_boundary = 100;
    double lambda1_pre = 1.0;
    double lambda2_pre = 0.0;
    double lambda1_post = 2.0;
    double lambda2_post = 1.0;

    std::pair<double, double> active(std::size_t epoch) const {
        return epoch <= phase_boundary ? std::make_pair(lambda1_pre, lambda2_pre)
                                       : std::make_pair(lambda1_post, lambda2_post);
    }
};

struct TrainConfig {
    std::size_t max_epochs = 250;
    std::size_t patience = 20;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double grad_clip = 5.0;
    std::size_t batch_size = 16;
    std::uint64_t seed = 0;
    double mask_ratio = 0.15;

    void validate() const;
};

struct LossReport {
    double mae = 0.0;   // masked reconstruction error
    double ce = 0.0;    // cross-entropy
    double total = 0.0; // lambda1 * mae + lambda2 * ce
};

/// Feature representations from one pass over a token sequence.
struct EncoderOutput {
    /// Classification feature: [h_fwd at position K-1 ; h_bwd at position 0]
    /// through the rectified-linear dense layer.
    Vector feature;
    /// Per-position [h_fwd_t ; h_bwd_t], the reconstruction inputs.
    std::vector<Vector> position_features;
};

EncoderOutput forward_features(const EncoderParams& p, const ComponentSequence& cs);

/// Mean over masked positions of the mean squared reconstruction error over
/// each token's unpadded samples. `original` supplies the targets.
double mae_loss(const EncoderParams& p, const ComponentSequence& masked,
                const ComponentSequence& original, const MaskPlan& plan);

/// Softmax cross-entropy of the classifier head on a dense feature.
double ce_loss(const EncoderParams& p, const Vector& feature, int label);

struct Classification {
    int label = 0;
    Vector probabilities;
};

Classification classify(const EncoderParams& p, const ComponentSequence& cs);

struct LabeledSequence {
    ComponentSequence sequence;
    int label = 0;
};

/// Exact gradients of lambda1 * L_mae + lambda2 * L_ce, averaged over the
/// batch, written into `grads` (same shapes as `p`). The reconstruction loss
/// backpropagates through a masked pass; the cross-entropy loss through an
/// unmasked pass, matching what classify() sees at inference time. Throws
/// NonFiniteGradientError when any gradient diverges.
LossReport backward(const EncoderParams& p, std::span<const LabeledSequence> batch,
                    std::span<const MaskPlan> plans, double lambda1, double lambda2,
                    EncoderParams& grads);

struct TrainLogEntry {
    std::size_t epoch = 0;
    double mae = 0.0;
    double ce = 0.0;
    double total = 0.0;
    double val_total = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

struct TrainResult {
    EncoderParams params; // best validation loss within the final phase
    std::vector<TrainLogEntry> log;
    std::size_t best_epoch = 0;
    double best_val = 0.0;
};

/// Adaptive-moment training with per-epoch re-masking, deterministic
/// shuffling, gradient-norm clipping and validation-based early stopping
/// after the schedule's phase boundary.
TrainResult train(const std::vector<LabeledSequence>& train_items,
                  const std::vector<LabeledSequence>& val_items, const TrainConfig& cfg,
                  const LossSchedule& schedule);

struct Checkpoint {
    EncoderParams params;
    TrainConfig config;
};

/// Versioned binary container with a checksum; save -> load -> save is
/// byte-identical.
void save_checkpoint(const std::string& path, const EncoderParams& params,
                     const TrainConfig& config);
Checkpoint load_checkpoint(const std::string& path);

} // namespace tsc
