#include "prodlex/nn.hpp"

#include <cmath>

#include "prodlex/error.hpp"

namespace prodlex::nn {

namespace {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

Eigen::VectorXd gate_preact(const GateParams& p, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& h_prev) {
    Eigen::VectorXd z = p.bias;
    z.noalias() += p.w_in * x;
    z.noalias() += p.w_rec * h_prev;
    return z;
}

void require(bool ok, const char* message) {
    if (!ok) throw Error(message);
}

}  // namespace

void Hyperparams::validate() const {
    require(hidden_units >= 1, "hyperparams: hidden_units must be >= 1");
    require(num_layers >= 1, "hyperparams: num_layers must be >= 1");
    require(dropout_p >= 0.0 && dropout_p < 1.0, "hyperparams: dropout_p must be in [0, 1)");
    require(learning_rate > 0.0, "hyperparams: learning_rate must be positive");
    require(epochs >= 1, "hyperparams: epochs must be >= 1");
    require(weight_other > 0.0 && weight_product > 0.0,
            "hyperparams: loss weights must be positive");
}

Hyperparams charname_defaults() {
    Hyperparams h;
    h.hidden_units = 50;
    h.num_layers = 1;
    h.dropout_p = 0.1;
    h.learning_rate = 0.1;
    h.epochs = 50;
    h.weight_other = 1.0;
    h.weight_product = 1.0;
    return h;
}

Hyperparams tagger_defaults() {
    Hyperparams h;
    h.hidden_units = 70;
    h.num_layers = 3;
    h.dropout_p = 0.1;
    h.learning_rate = 0.01;
    h.epochs = 50;
    h.weight_other = 1.0 / 25.0;
    h.weight_product = 1.0;
    return h;
}

Eigen::MatrixXd init_matrix(int rows, int cols, int fan_in, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(-bound, bound);
    }
    return m;
}

LstmModel make_lstm(int in_dim, int num_labels, const Hyperparams& hyper, Rng& rng) {
    hyper.validate();
    require(in_dim >= 1, "make_lstm: in_dim must be >= 1");
    require(num_labels >= 2, "make_lstm: num_labels must be >= 2");
    LstmModel model;
    model.hyper = hyper;
    const int hidden = hyper.hidden_units;
    for (int l = 0; l < hyper.num_layers; ++l) {
        const int in = l == 0 ? in_dim : hidden;
        LstmLayerParams layer;
        for (GateParams* gate : {&layer.input, &layer.forget, &layer.cell, &layer.output}) {
            gate->w_in = init_matrix(hidden, in, in, rng);
            gate->w_rec = init_matrix(hidden, hidden, hidden, rng);
            gate->bias = Eigen::VectorXd::Zero(hidden);
        }
        layer.forget.bias.setOnes();  // open forget gates at the start
        model.layers.push_back(std::move(layer));
    }
    model.proj_w = init_matrix(num_labels, hidden, hidden, rng);
    model.proj_b = Eigen::VectorXd::Zero(num_labels);
    return model;
}

std::vector<Eigen::VectorXd> lstm_forward(const LstmModel& model,
                                          std::span<const Eigen::VectorXd> inputs,
                                          bool train_mode, Rng* rng, ForwardCache* cache) {
    require(!model.layers.empty(), "lstm_forward: model has no layers");
    const int T = static_cast<int>(inputs.size());
    const int hidden = model.hidden();
    const double p = model.hyper.dropout_p;
    const bool dropping = train_mode && p > 0.0;
    require(!dropping || rng != nullptr, "lstm_forward: dropout requires an rng");
    for (const auto& x : inputs) {
        require(static_cast<int>(x.size()) == model.in_dim(),
                "lstm_forward: input dimension mismatch");
        require(x.allFinite(), "lstm_forward: non-finite input");
    }

    ForwardCache local;
    ForwardCache& fc = cache ? *cache : local;
    fc.layers.assign(model.layers.size(), LayerTrace{});
    fc.train_mode = train_mode;

    std::vector<Eigen::VectorXd> layer_in(inputs.begin(), inputs.end());
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const auto& lp = model.layers[l];
        auto& trace = fc.layers[l];
        trace.steps.resize(T);
        if (dropping) trace.drop_mask.resize(T);

        Eigen::VectorXd h = Eigen::VectorXd::Zero(hidden);
        Eigen::VectorXd c = Eigen::VectorXd::Zero(hidden);
        for (int t = 0; t < T; ++t) {
            auto& step = trace.steps[t];
            step.x = std::move(layer_in[t]);
            if (dropping) {
                Eigen::VectorXd mask(step.x.size());
                const double keep_scale = 1.0 / (1.0 - p);
                for (Eigen::Index k = 0; k < mask.size(); ++k) {
                    mask[k] = rng->bernoulli(p) ? 0.0 : keep_scale;
                }
                trace.drop_mask[t] = mask;
                step.x = step.x.cwiseProduct(mask);
            }
            step.i = gate_preact(lp.input, step.x, h).unaryExpr([](double v) { return sigmoid(v); });
            step.f = gate_preact(lp.forget, step.x, h).unaryExpr([](double v) { return sigmoid(v); });
            step.g = gate_preact(lp.cell, step.x, h).array().tanh();
            step.o = gate_preact(lp.output, step.x, h).unaryExpr([](double v) { return sigmoid(v); });
            step.c = step.f.cwiseProduct(c) + step.i.cwiseProduct(step.g);
            step.h = step.o.cwiseProduct(step.c.array().tanh().matrix());
            h = step.h;
            c = step.c;
        }
        layer_in.resize(T);
        for (int t = 0; t < T; ++t) layer_in[t] = trace.steps[t].h;
    }
    return layer_in;
}

LstmGrads zero_grads(const LstmModel& model) {
    LstmGrads g;
    for (const auto& layer : model.layers) {
        LstmLayerParams z;
        for (auto [src, dst] :
             {std::pair{&layer.input, &z.input}, std::pair{&layer.forget, &z.forget},
              std::pair{&layer.cell, &z.cell}, std::pair{&layer.output, &z.output}}) {
            dst->w_in = Eigen::MatrixXd::Zero(src->w_in.rows(), src->w_in.cols());
            dst->w_rec = Eigen::MatrixXd::Zero(src->w_rec.rows(), src->w_rec.cols());
            dst->bias = Eigen::VectorXd::Zero(src->bias.size());
        }
        g.layers.push_back(std::move(z));
    }
    g.proj_w = Eigen::MatrixXd::Zero(model.proj_w.rows(), model.proj_w.cols());
    g.proj_b = Eigen::VectorXd::Zero(model.proj_b.size());
    return g;
}

std::vector<Eigen::VectorXd> lstm_backward(const LstmModel& model, const ForwardCache& cache,
                                           std::span<const Eigen::VectorXd> dh_top,
                                           LstmGrads& out) {
    require(cache.layers.size() == model.layers.size(), "lstm_backward: stale cache");
    const int T = cache.steps();
    require(static_cast<int>(dh_top.size()) == T, "lstm_backward: gradient count mismatch");
    require(out.layers.size() == model.layers.size(), "lstm_backward: bad gradient container");
    const int hidden = model.hidden();
    for (const auto& dh : dh_top) {
        require(static_cast<int>(dh.size()) == hidden, "lstm_backward: gradient dim mismatch");
    }

    std::vector<Eigen::VectorXd> dh_from_above(dh_top.begin(), dh_top.end());
    for (int l = static_cast<int>(model.layers.size()) - 1; l >= 0; --l) {
        const auto& lp = model.layers[l];
        const auto& trace = cache.layers[l];
        require(static_cast<int>(trace.steps.size()) == T, "lstm_backward: stale cache");
        auto& lg = out.layers[l];
        require(lg.input.w_in.rows() == lp.input.w_in.rows() &&
                    lg.input.w_in.cols() == lp.input.w_in.cols(),
                "lstm_backward: gradient shape mismatch");

        std::vector<Eigen::VectorXd> dx(T);
        const Eigen::VectorXd zero = Eigen::VectorXd::Zero(hidden);
        Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(hidden);
        Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(hidden);
        for (int t = T - 1; t >= 0; --t) {
            const auto& s = trace.steps[t];
            const Eigen::VectorXd tc = s.c.array().tanh();
            Eigen::VectorXd dh = dh_from_above[t] + dh_next;

            Eigen::VectorXd d_o =
                dh.cwiseProduct(tc).cwiseProduct(s.o.cwiseProduct(Eigen::VectorXd::Ones(hidden) - s.o));
            Eigen::VectorXd dc =
                dh.cwiseProduct(s.o).cwiseProduct((1.0 - tc.array().square()).matrix()) + dc_next;

            const Eigen::VectorXd& c_prev = t > 0 ? trace.steps[t - 1].c : zero;
            Eigen::VectorXd d_i = dc.cwiseProduct(s.g).cwiseProduct(
                s.i.cwiseProduct(Eigen::VectorXd::Ones(hidden) - s.i));
            Eigen::VectorXd d_f = dc.cwiseProduct(c_prev).cwiseProduct(
                s.f.cwiseProduct(Eigen::VectorXd::Ones(hidden) - s.f));
            Eigen::VectorXd d_g =
                dc.cwiseProduct(s.i).cwiseProduct((1.0 - s.g.array().square()).matrix());
            dc_next = dc.cwiseProduct(s.f);

            const Eigen::VectorXd& h_prev = t > 0 ? trace.steps[t - 1].h : zero;

            lg.input.w_in.noalias() += d_i * s.x.transpose();
            lg.input.w_rec.noalias() += d_i * h_prev.transpose();
            lg.input.bias += d_i;
            lg.forget.w_in.noalias() += d_f * s.x.transpose();
            lg.forget.w_rec.noalias() += d_f * h_prev.transpose();
            lg.forget.bias += d_f;
            lg.cell.w_in.noalias() += d_g * s.x.transpose();
            lg.cell.w_rec.noalias() += d_g * h_prev.transpose();
            lg.cell.bias += d_g;
            lg.output.w_in.noalias() += d_o * s.x.transpose();
            lg.output.w_rec.noalias() += d_o * h_prev.transpose();
            lg.output.bias += d_o;

            Eigen::VectorXd dxt = lp.input.w_in.transpose() * d_i;
            dxt.noalias() += lp.forget.w_in.transpose() * d_f;
            dxt.noalias() += lp.cell.w_in.transpose() * d_g;
            dxt.noalias() += lp.output.w_in.transpose() * d_o;
            if (!trace.drop_mask.empty()) dxt = dxt.cwiseProduct(trace.drop_mask[t]);
            dx[t] = std::move(dxt);

            dh_next = lp.input.w_rec.transpose() * d_i;
            dh_next.noalias() += lp.forget.w_rec.transpose() * d_f;
            dh_next.noalias() += lp.cell.w_rec.transpose() * d_g;
            dh_next.noalias() += lp.output.w_rec.transpose() * d_o;
        }
        dh_from_above = std::move(dx);
    }
    return dh_from_above;
}

Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits) {
    const double m = logits.maxCoeff();
    const double lse = std::log((logits.array() - m).exp().sum());
    return (logits.array() - m - lse).matrix();
}

Eigen::VectorXd log_softmax_backward(const Eigen::VectorXd& logprobs,
                                     const Eigen::VectorXd& dlogprobs) {
    const double total = dlogprobs.sum();
    return dlogprobs - (logprobs.array().exp() * total).matrix();
}

NllResult weighted_nll(std::span<const Eigen::VectorXd> logprobs, std::span<const int> targets,
                       const Eigen::VectorXd& weights) {
    require(logprobs.size() == targets.size(), "weighted_nll: step count mismatch");
    require(!logprobs.empty(), "weighted_nll: no steps");
    NllResult result;
    const double inv_t = 1.0 / static_cast<double>(logprobs.size());
    result.dlogprobs.reserve(logprobs.size());
    for (std::size_t t = 0; t < logprobs.size(); ++t) {
        const int y = targets[t];
        require(y >= 0 && y < logprobs[t].size(), "weighted_nll: label out of range");
        require(y < weights.size(), "weighted_nll: label out of range");
        const double w = weights[y];
        result.loss += -w * logprobs[t][y] * inv_t;
        Eigen::VectorXd d = Eigen::VectorXd::Zero(logprobs[t].size());
        d[y] = -w * inv_t;
        result.dlogprobs.push_back(std::move(d));
    }
    return result;
}

double grad_sq_norm(const LstmGrads& grads) {
    double sq = 0.0;
    for (const auto& layer : grads.layers) {
        for (const GateParams* g : {&layer.input, &layer.forget, &layer.cell, &layer.output}) {
            sq += g->w_in.squaredNorm() + g->w_rec.squaredNorm() + g->bias.squaredNorm();
        }
    }
    sq += grads.proj_w.squaredNorm() + grads.proj_b.squaredNorm();
    return sq;
}

double sgd_step(LstmModel& model, const LstmGrads& grads, double learning_rate,
                double clip_norm, double extra_sq_norm) {
    require(grads.layers.size() == model.layers.size(), "sgd_step: gradient shape mismatch");
    bool finite = std::isfinite(extra_sq_norm);
    for (const auto& layer : grads.layers) {
        for (const GateParams* g : {&layer.input, &layer.forget, &layer.cell, &layer.output}) {
            finite = finite && g->w_in.allFinite() && g->w_rec.allFinite() && g->bias.allFinite();
        }
    }
    finite = finite && grads.proj_w.allFinite() && grads.proj_b.allFinite();
    if (!finite) throw Error("sgd_step: non-finite gradients, training aborted");

    const double norm = std::sqrt(grad_sq_norm(grads) + extra_sq_norm);
    double scale = 1.0;
    if (clip_norm > 0.0 && norm > clip_norm) scale = clip_norm / norm;
    const double step = learning_rate * scale;

    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        auto& mp = model.layers[l];
        const auto& gp = grads.layers[l];
        for (auto [m, g] : {std::pair{&mp.input, &gp.input}, std::pair{&mp.forget, &gp.forget},
                            std::pair{&mp.cell, &gp.cell}, std::pair{&mp.output, &gp.output}}) {
            m->w_in -= step * g->w_in;
            m->w_rec -= step * g->w_rec;
            m->bias -= step * g->bias;
        }
    }
    model.proj_w -= step * grads.proj_w;
    model.proj_b -= step * grads.proj_b;
    return scale;
}

namespace {

struct HeadForward {
    std::vector<Eigen::VectorXd> hs;
    std::vector<Eigen::VectorXd> logprobs;  // one per step (PerStep) or exactly one
    Eigen::VectorXd pooled;                 // MeanPool only
    ForwardCache cache;
};

HeadForward head_forward(const LstmModel& model, std::span<const Eigen::VectorXd> inputs,
                         HeadMode mode, bool train_mode, Rng* rng) {
    require(!inputs.empty(), "lstm head: empty input sequence");
    HeadForward fwd;
    fwd.hs = lstm_forward(model, inputs, train_mode, rng, &fwd.cache);
    switch (mode) {
        case HeadMode::PerStep:
            for (const auto& h : fwd.hs) {
                fwd.logprobs.push_back(log_softmax(model.proj_w * h + model.proj_b));
            }
            break;
        case HeadMode::FinalStep:
            fwd.logprobs.push_back(log_softmax(model.proj_w * fwd.hs.back() + model.proj_b));
            break;
        case HeadMode::MeanPool: {
            fwd.pooled = Eigen::VectorXd::Zero(model.hidden());
            for (const auto& h : fwd.hs) fwd.pooled += h;
            fwd.pooled /= static_cast<double>(fwd.hs.size());
            fwd.logprobs.push_back(log_softmax(model.proj_w * fwd.pooled + model.proj_b));
            break;
        }
    }
    return fwd;
}

}  // namespace

HeadLossResult lstm_loss_and_grads(const LstmModel& model,
                                   std::span<const Eigen::VectorXd> inputs,
                                   std::span<const int> targets,
                                   const Eigen::VectorXd& weights, HeadMode mode,
                                   bool train_mode, Rng* rng) {
    auto fwd = head_forward(model, inputs, mode, train_mode, rng);
    auto nll = weighted_nll(fwd.logprobs, targets, weights);

    HeadLossResult result;
    result.loss = nll.loss;
    result.grads = zero_grads(model);

    const int T = static_cast<int>(inputs.size());
    std::vector<Eigen::VectorXd> dh_top(T, Eigen::VectorXd::Zero(model.hidden()));
    switch (mode) {
        case HeadMode::PerStep:
            for (int t = 0; t < T; ++t) {
                Eigen::VectorXd dlogits = log_softmax_backward(fwd.logprobs[t], nll.dlogprobs[t]);
                result.grads.proj_w.noalias() += dlogits * fwd.hs[t].transpose();
                result.grads.proj_b += dlogits;
                dh_top[t] = model.proj_w.transpose() * dlogits;
            }
            break;
        case HeadMode::FinalStep: {
            Eigen::VectorXd dlogits = log_softmax_backward(fwd.logprobs[0], nll.dlogprobs[0]);
            result.grads.proj_w.noalias() += dlogits * fwd.hs.back().transpose();
            result.grads.proj_b += dlogits;
            dh_top[T - 1] = model.proj_w.transpose() * dlogits;
            break;
        }
        case HeadMode::MeanPool: {
            Eigen::VectorXd dlogits = log_softmax_backward(fwd.logprobs[0], nll.dlogprobs[0]);
            result.grads.proj_w.noalias() += dlogits * fwd.pooled.transpose();
            result.grads.proj_b += dlogits;
            Eigen::VectorXd dpool = model.proj_w.transpose() * dlogits;
            for (int t = 0; t < T; ++t) dh_top[t] = dpool / static_cast<double>(T);
            break;
        }
    }
    result.dinputs = lstm_backward(model, fwd.cache, dh_top, result.grads);
    return result;
}

double lstm_loss(const LstmModel& model, std::span<const Eigen::VectorXd> inputs,
                 std::span<const int> targets, const Eigen::VectorXd& weights, HeadMode mode) {
    auto fwd = head_forward(model, inputs, mode, false, nullptr);
    return weighted_nll(fwd.logprobs, targets, weights).loss;
}

namespace {

// Visits every parameter coordinate of the model.
template <typename Fn>
void for_each_param(LstmModel& model, Fn&& fn) {
    for (auto& layer : model.layers) {
        for (GateParams* g : {&layer.input, &layer.forget, &layer.cell, &layer.output}) {
            for (Eigen::Index k = 0; k < g->w_in.size(); ++k) fn(g->w_in.data()[k]);
            for (Eigen::Index k = 0; k < g->w_rec.size(); ++k) fn(g->w_rec.data()[k]);
            for (Eigen::Index k = 0; k < g->bias.size(); ++k) fn(g->bias.data()[k]);
        }
    }
    for (Eigen::Index k = 0; k < model.proj_w.size(); ++k) fn(model.proj_w.data()[k]);
    for (Eigen::Index k = 0; k < model.proj_b.size(); ++k) fn(model.proj_b.data()[k]);
}

template <typename Fn>
void for_each_grad(const LstmGrads& grads, Fn&& fn) {
    for (const auto& layer : grads.layers) {
        for (const GateParams* g : {&layer.input, &layer.forget, &layer.cell, &layer.output}) {
            for (Eigen::Index k = 0; k < g->w_in.size(); ++k) fn(g->w_in.data()[k]);
            for (Eigen::Index k = 0; k < g->w_rec.size(); ++k) fn(g->w_rec.data()[k]);
            for (Eigen::Index k = 0; k < g->bias.size(); ++k) fn(g->bias.data()[k]);
        }
    }
    for (Eigen::Index k = 0; k < grads.proj_w.size(); ++k) fn(grads.proj_w.data()[k]);
    for (Eigen::Index k = 0; k < grads.proj_b.size(); ++k) fn(grads.proj_b.data()[k]);
}

double rel_error(double a, double b) {
    return std::abs(a - b) / std::max(1e-8, std::abs(a) + std::abs(b));
}

}  // namespace

GradCheckReport grad_check(int trials, double epsilon, std::uint64_t seed) {
    GradCheckReport report;
    report.trials = trials;
    Rng rng(seed);
    for (int trial = 0; trial < trials; ++trial) {
        Hyperparams hyper;
        hyper.num_layers = 1 + static_cast<int>(rng.below(3));
        hyper.hidden_units = 2 + static_cast<int>(rng.below(7));
        hyper.dropout_p = 0.0;  // finite differences need a deterministic loss
        if (rng.bernoulli(0.5)) {
            hyper.weight_other = 1.0 / 25.0;
            hyper.weight_product = 1.0;
        }
        const int in_dim = 1 + static_cast<int>(rng.below(5));
        const int steps = 1 + static_cast<int>(rng.below(6));
        const auto mode = static_cast<HeadMode>(rng.below(3));

        Rng init_rng(derive_seed(seed, trial + 1));
        LstmModel model = make_lstm(in_dim, 2, hyper, init_rng);
        for_each_param(model, [&](double& v) { v = rng.uniform(-0.5, 0.5); });

        std::vector<Eigen::VectorXd> inputs(steps);
        for (auto& x : inputs) {
            x.resize(in_dim);
            for (int k = 0; k < in_dim; ++k) x[k] = rng.uniform(-1.0, 1.0);
        }
        std::vector<int> targets;
        const int n_targets = mode == HeadMode::PerStep ? steps : 1;
        for (int t = 0; t < n_targets; ++t) targets.push_back(static_cast<int>(rng.below(2)));
        const Eigen::VectorXd weights = hyper.label_weights();

        auto analytic =
            lstm_loss_and_grads(model, inputs, targets, weights, mode, false, nullptr);

        std::vector<double> analytic_flat;
        for_each_grad(analytic.grads, [&](double v) { analytic_flat.push_back(v); });
        for (const auto& d : analytic.dinputs) {
            for (Eigen::Index k = 0; k < d.size(); ++k) analytic_flat.push_back(d[k]);
        }

        std::size_t idx = 0;
        auto check_coord = [&](double& v) {
            const double saved = v;
            v = saved + epsilon;
            const double up = lstm_loss(model, inputs, targets, weights, mode);
            v = saved - epsilon;
            const double down = lstm_loss(model, inputs, targets, weights, mode);
            v = saved;
            const double fd = (up - down) / (2.0 * epsilon);
            report.max_rel_error = std::max(report.max_rel_error, rel_error(analytic_flat[idx], fd));
            ++idx;
            ++report.coordinates;
        };
        for_each_param(model, check_coord);
        for (auto& x : inputs) {
            for (Eigen::Index k = 0; k < x.size(); ++k) check_coord(x[k]);
        }
    }
    return report;
}

}  // namespace prodlex::nn
