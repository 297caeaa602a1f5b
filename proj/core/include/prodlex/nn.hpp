#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "prodlex/rng.hpp"

namespace prodlex::nn {

/// Training configuration of one stacked-LSTM classifier. `weight_other` /
/// `weight_product` rescale the per-label loss contributions (label 0 /
/// label 1 respectively).
struct Hyperparams {
    int hidden_units = 50;
    int num_layers = 1;
    double dropout_p = 0.1;
    double learning_rate = 0.1;
    int epochs = 50;
    double weight_other = 1.0;
    double weight_product = 1.0;
    std::uint64_t seed = 1;

    Eigen::Vector2d label_weights() const { return {weight_other, weight_product}; }
    void validate() const;  // throws prodlex::Error on out-of-range fields
};

/// Defaults from the character-level name classifier configuration.
Hyperparams charname_defaults();
/// Defaults from the embedding-based tagger configuration.
Hyperparams tagger_defaults();

struct GateParams {
    Eigen::MatrixXd w_in;   // hidden x in_dim
    Eigen::MatrixXd w_rec;  // hidden x hidden
    Eigen::VectorXd bias;   // hidden
};

struct LstmLayerParams {
    GateParams input, forget, cell, output;

    int in_dim() const { return static_cast<int>(input.w_in.cols()); }
    int hidden() const { return static_cast<int>(input.w_in.rows()); }
};

/// Stacked LSTM with a linear projection onto label logits.
struct LstmModel {
    std::vector<LstmLayerParams> layers;
    Eigen::MatrixXd proj_w;  // num_labels x hidden
    Eigen::VectorXd proj_b;  // num_labels
    Hyperparams hyper;

    int in_dim() const { return layers.front().in_dim(); }
    int hidden() const { return layers.front().hidden(); }
    int num_labels() const { return static_cast<int>(proj_w.rows()); }
};

/// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
Eigen::MatrixXd init_matrix(int rows, int cols, int fan_in, Rng& rng);

/// Fresh model: uniform fan-in scaled weights, zero biases except the
/// forget-gate bias, which starts at 1.
LstmModel make_lstm(int in_dim, int num_labels, const Hyperparams& hyper, Rng& rng);

struct LayerStep {
    Eigen::VectorXd x;  // layer input after dropout
    Eigen::VectorXd i, f, g, o, c, h;
};

struct LayerTrace {
    std::vector<LayerStep> steps;
    std::vector<Eigen::VectorXd> drop_mask;  // empty when dropout off
};

struct ForwardCache {
    std::vector<LayerTrace> layers;
    bool train_mode = false;
    int steps() const {
        return layers.empty() ? 0 : static_cast<int>(layers.front().steps.size());
    }
};

/// Runs the stacked LSTM over `inputs`. Inverted dropout is applied to each
/// layer's input (including the first) when `train_mode`; `rng` is required
/// in that case iff dropout_p > 0. Returns the top layer's hidden state per
/// step. Throws on dimension mismatch or non-finite input.
std::vector<Eigen::VectorXd> lstm_forward(const LstmModel& model,
                                          std::span<const Eigen::VectorXd> inputs,
                                          bool train_mode, Rng* rng, ForwardCache* cache);

struct LstmGrads {
    std::vector<LstmLayerParams> layers;  // same shapes as the model's layers
    Eigen::MatrixXd proj_w;
    Eigen::VectorXd proj_b;
};

LstmGrads zero_grads(const LstmModel& model);

/// Backpropagation through time. `dh_top[t]` is the loss gradient w.r.t. the
/// top-layer hidden state at step t. Fills the LSTM layer gradients of `out`
/// (projection gradients are the head's job) and returns gradients w.r.t.
/// the raw inputs. Throws when the cache does not match the model.
std::vector<Eigen::VectorXd> lstm_backward(const LstmModel& model, const ForwardCache& cache,
                                           std::span<const Eigen::VectorXd> dh_top,
                                           LstmGrads& out);

/// Numerically stable log-softmax (max subtraction).
Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits);

/// Chain rule through log_softmax: gradient w.r.t. the logits.
Eigen::VectorXd log_softmax_backward(const Eigen::VectorXd& logprobs,
                                     const Eigen::VectorXd& dlogprobs);

struct NllResult {
    double loss = 0.0;
    std::vector<Eigen::VectorXd> dlogprobs;
};

/// Class-weighted negative log likelihood, averaged over steps:
/// loss = (1/T) * sum_t -w(y_t) * logprob_t[y_t].
NllResult weighted_nll(std::span<const Eigen::VectorXd> logprobs, std::span<const int> targets,
                       const Eigen::VectorXd& weights);

/// Clips the global L2 norm of all gradients (layers + projection + an
/// optional external contribution `extra_sq_norm`, e.g. embedding grads)
/// to `clip_norm`, then applies one SGD step. Returns the scale factor so
/// callers can apply the same clipping to external parameters.
/// Throws on non-finite gradients.
double sgd_step(LstmModel& model, const LstmGrads& grads, double learning_rate,
                double clip_norm, double extra_sq_norm = 0.0);

double grad_sq_norm(const LstmGrads& grads);

/// How the per-step hidden states feed the projection / loss.
enum class HeadMode {
    PerStep,    // one target per step (sequence tagging)
    FinalStep,  // single target, logits from the last hidden state
    MeanPool,   // single target, logits from the mean of hidden states
};

struct HeadLossResult {
    double loss = 0.0;
    LstmGrads grads;
    std::vector<Eigen::VectorXd> dinputs;
};

/// Forward + loss + full backward for one sample under the given head.
/// For PerStep, `targets` has one label per input step; otherwise exactly one.
HeadLossResult lstm_loss_and_grads(const LstmModel& model,
                                   std::span<const Eigen::VectorXd> inputs,
                                   std::span<const int> targets,
                                   const Eigen::VectorXd& weights, HeadMode mode,
                                   bool train_mode, Rng* rng);

/// Loss only, dropout off. Used by the finite-difference checks.
double lstm_loss(const LstmModel& model, std::span<const Eigen::VectorXd> inputs,
                 std::span<const int> targets, const Eigen::VectorXd& weights, HeadMode mode);

struct GradCheckReport {
    double max_rel_error = 0.0;
    int trials = 0;
    long long coordinates = 0;
};

/// Central finite differences over every parameter coordinate (and the
/// inputs) of randomly drawn small configurations: 1-3 layers, hidden <= 8,
/// <= 6 steps, both label-weight settings, all head modes, dropout 0.
/// Relative error is |ga - gfd| / max(1e-8, |ga| + |gfd|).
GradCheckReport grad_check(int trials, double epsilon, std::uint64_t seed);

}  // namespace prodlex::nn
