#include "survey/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace survey {

namespace {
constexpr double kProbFloor = 1e-12;
constexpr double kNormFloor = 1e-12;
}  // namespace

FeatureMap::FeatureMap(int c, int h, int w, double fill)
    : C(c), H(h), W(w), values(static_cast<std::size_t>(c) * h * w, fill) {
    if (c < 1 || h < 1 || w < 1)
        throw std::invalid_argument("FeatureMap: dimensions must be >= 1");
}

FeatureMap upsample_nearest(const FeatureMap& f, int factor) {
    if (factor < 1) throw std::invalid_argument("upsample_nearest: factor must be >= 1");
    FeatureMap out(f.C, f.H * factor, f.W * factor);
    for (int c = 0; c < f.C; ++c)
        for (int i = 0; i < out.H; ++i)
            for (int j = 0; j < out.W; ++j)
                out.at(c, i, j) = f.at(c, i / factor, j / factor);
    return out;
}

FeatureMap downsum(const FeatureMap& f, int factor) {
    if (factor < 1) throw std::invalid_argument("downsum: factor must be >= 1");
    if (f.H % factor != 0 || f.W % factor != 0)
        throw std::invalid_argument("downsum: dimensions not divisible by factor");
    FeatureMap out(f.C, f.H / factor, f.W / factor);
    for (int c = 0; c < f.C; ++c)
        for (int i = 0; i < f.H; ++i)
            for (int j = 0; j < f.W; ++j)
                out.at(c, i / factor, j / factor) += f.at(c, i, j);
    return out;
}

namespace {

void require_same_shape(const FeatureMap& a, const FeatureMap& b, const FeatureMap& c,
                        const char* who) {
    if (!a.same_shape(b) || !a.same_shape(c))
        throw std::invalid_argument(std::string(who) + ": shape mismatch");
}

}  // namespace

LossResult loss_mse(const FeatureMap& p3, const FeatureMap& p4u, const FeatureMap& p5u) {
    require_same_shape(p3, p4u, p5u, "loss_mse");
    LossResult r;
    r.grad_p3 = FeatureMap(p3.C, p3.H, p3.W);
    r.grad_p4 = FeatureMap(p3.C, p3.H, p3.W);
    r.grad_p5 = FeatureMap(p3.C, p3.H, p3.W);

    const double norm = 1.0 / (static_cast<double>(p3.H) * p3.W);
    double acc = 0.0;
    for (std::size_t n = 0; n < p3.size(); ++n) {
        const double d34 = p3.values[n] - p4u.values[n];
        const double d45 = p4u.values[n] - p5u.values[n];
        acc += d34 * d34 + d45 * d45;
        r.grad_p3.values[n] = 2.0 * norm * d34;
        r.grad_p4.values[n] = 2.0 * norm * (-d34 + d45);
        r.grad_p5.values[n] = -2.0 * norm * d45;
    }
    r.value = acc * norm;
    return r;
}

namespace {

// Channel softmax at one spatial location, numerically stabilized.
void softmax_at(const FeatureMap& f, int i, int j, std::vector<double>& out) {
    const int C = f.C;
    double mx = f.at(0, i, j);
    for (int c = 1; c < C; ++c) mx = std::max(mx, f.at(c, i, j));
    double sum = 0.0;
    for (int c = 0; c < C; ++c) {
        out[c] = std::exp(f.at(c, i, j) - mx);
        sum += out[c];
    }
    for (int c = 0; c < C; ++c) out[c] /= sum;
}

// KL(p || q) with probabilities floored at kProbFloor before the logs.
// g_p and g_q receive dKL/dp and dKL/dq (before the softmax Jacobian).
double kl_with_grads(const std::vector<double>& p, const std::vector<double>& q,
                     std::vector<double>& g_p, std::vector<double>& g_q) {
    const std::size_t C = p.size();
    double kl = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
        const double pc = std::max(p[c], kProbFloor);
        const double qc = std::max(q[c], kProbFloor);
        kl += pc * std::log(pc / qc);
        g_p[c] = std::log(pc / qc) + 1.0;
        g_q[c] = -pc / qc;
    }
    return kl;
}

// Pull a gradient w.r.t. softmax outputs back to the logits:
// (J^T g)_c = p_c (g_c - sum_k p_k g_k).
void softmax_backward(const std::vector<double>& p, const std::vector<double>& g,
                      std::vector<double>& out) {
    double dot = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) dot += p[c] * g[c];
    for (std::size_t c = 0; c < p.size(); ++c) out[c] = p[c] * (g[c] - dot);
}

}  // namespace

LossResult loss_kl(const FeatureMap& p3, const FeatureMap& p4u, const FeatureMap& p5u) {
    require_same_shape(p3, p4u, p5u, "loss_kl");
    if (p3.C < 2) throw std::invalid_argument("loss_kl: needs C >= 2");

    LossResult r;
    r.grad_p3 = FeatureMap(p3.C, p3.H, p3.W);
    r.grad_p4 = FeatureMap(p3.C, p3.H, p3.W);
    r.grad_p5 = FeatureMap(p3.C, p3.H, p3.W);

    const int C = p3.C;
    const double norm = 1.0 / (static_cast<double>(p3.H) * p3.W);
    std::vector<double> s3(C), s4(C), s5(C), gp(C), gq(C), glog(C);
    double acc = 0.0;

    for (int i = 0; i < p3.H; ++i) {
        for (int j = 0; j < p3.W; ++j) {
            softmax_at(p3, i, j, s3);
            softmax_at(p4u, i, j, s4);
            softmax_at(p5u, i, j, s5);

            // KL(S[p3] || S[p4u])
            acc += kl_with_grads(s3, s4, gp, gq);
            softmax_backward(s3, gp, glog);
            for (int c = 0; c < C; ++c) r.grad_p3.at(c, i, j) += norm * glog[c];
            softmax_backward(s4, gq, glog);
            for (int c = 0; c < C; ++c) r.grad_p4.at(c, i, j) += norm * glog[c];

            // KL(S[p4u] || S[p5u])
            acc += kl_with_grads(s4, s5, gp, gq);
            softmax_backward(s4, gp, glog);
            for (int c = 0; c < C; ++c) r.grad_p4.at(c, i, j) += norm * glog[c];
            softmax_backward(s5, gq, glog);
            for (int c = 0; c < C; ++c) r.grad_p5.at(c, i, j) += norm * glog[c];
        }
    }
    r.value = acc * norm;
    return r;
}

namespace {

// 1 - cos(a,b) at one location, with gradients. Dead-feature convention:
// both norms below the floor -> contribution 0; exactly one below -> 1.
// Gradients vanish in both degenerate cases.
double one_minus_cos(const FeatureMap& a, const FeatureMap& b, int i, int j,
                     std::vector<double>& ga, std::vector<double>& gb) {
    const int C = a.C;
    double dot = 0.0, na2 = 0.0, nb2 = 0.0;
    for (int c = 0; c < C; ++c) {
        const double av = a.at(c, i, j), bv = b.at(c, i, j);
        dot += av * bv;
        na2 += av * av;
        nb2 += bv * bv;
    }
    const double na = std::sqrt(na2), nb = std::sqrt(nb2);
    std::fill(ga.begin(), ga.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
    if (na < kNormFloor && nb < kNormFloor) return 0.0;
    if (na < kNormFloor || nb < kNormFloor) return 1.0;

    const double inv = 1.0 / (na * nb);
    const double cosv = dot * inv;
    for (int c = 0; c < C; ++c) {
        const double av = a.at(c, i, j), bv = b.at(c, i, j);
        // d(1-cos)/da = -( b/(|a||b|) - cos * a/|a|^2 )
        ga[c] = -(bv * inv - cosv * av / na2);
        gb[c] = -(av * inv - cosv * bv / nb2);
    }
    return 1.0 - cosv;
}

}  // namespace

LossResult loss_cos(const FeatureMap& p3, const FeatureMap& p4u, const FeatureMap& p5u) {
    require_same_shape(p3, p4u, p5u, "loss_cos");
    LossResult r;
    r.grad_p3 = FeatureMap(p3.C, p3.H, p3.W);
    r.grad_p4 = FeatureMap(p3.C, p3.H, p3.W);
    r.grad_p5 = FeatureMap(p3.C, p3.H, p3.W);

    const int C = p3.C;
    const double norm = 1.0 / (static_cast<double>(p3.H) * p3.W);
    std::vector<double> ga(C), gb(C);
    double acc = 0.0;

    for (int i = 0; i < p3.H; ++i) {
        for (int j = 0; j < p3.W; ++j) {
            acc += one_minus_cos(p3, p4u, i, j, ga, gb);
            for (int c = 0; c < C; ++c) {
                r.grad_p3.at(c, i, j) += norm * ga[c];
                r.grad_p4.at(c, i, j) += norm * gb[c];
            }
            acc += one_minus_cos(p4u, p5u, i, j, ga, gb);
            for (int c = 0; c < C; ++c) {
                r.grad_p4.at(c, i, j) += norm * ga[c];
                r.grad_p5.at(c, i, j) += norm * gb[c];
            }
        }
    }
    r.value = acc * norm;
    return r;
}

LossResult consistency_loss(const FeatureMap& p3, const FeatureMap& p4, const FeatureMap& p5,
                            const TriLossWeights& w, TriLossBreakdown* breakdown) {
    if (w.alpha < 0 || w.beta < 0 || w.gamma < 0)
        throw std::invalid_argument("consistency_loss: weights must be nonnegative");
    if (p4.C != p3.C || p5.C != p3.C || p4.H * 2 != p3.H || p4.W * 2 != p3.W ||
        p5.H * 4 != p3.H || p5.W * 4 != p3.W)
        throw std::invalid_argument("consistency_loss: incompatible pyramid shapes");

    const FeatureMap p4u = upsample_nearest(p4, 2);
    const FeatureMap p5u = upsample_nearest(p5, 4);

    const LossResult mse = loss_mse(p3, p4u, p5u);
    const LossResult kl = loss_kl(p3, p4u, p5u);
    const LossResult cos = loss_cos(p3, p4u, p5u);
    if (breakdown) *breakdown = {mse.value, kl.value, cos.value};

    LossResult r;
    r.value = w.alpha * mse.value + w.beta * kl.value + w.gamma * cos.value;

    FeatureMap g3(p3.C, p3.H, p3.W), g4u(p3.C, p3.H, p3.W), g5u(p3.C, p3.H, p3.W);
    for (std::size_t n = 0; n < g3.size(); ++n) {
        g3.values[n] = w.alpha * mse.grad_p3.values[n] + w.beta * kl.grad_p3.values[n] +
                       w.gamma * cos.grad_p3.values[n];
        g4u.values[n] = w.alpha * mse.grad_p4.values[n] + w.beta * kl.grad_p4.values[n] +
                        w.gamma * cos.grad_p4.values[n];
        g5u.values[n] = w.alpha * mse.grad_p5.values[n] + w.beta * kl.grad_p5.values[n] +
                        w.gamma * cos.grad_p5.values[n];
    }
    r.grad_p3 = std::move(g3);
    r.grad_p4 = downsum(g4u, 2);
    r.grad_p5 = downsum(g5u, 4);
    return r;
}

double grad_check(const LossFn& fn, std::vector<FeatureMap> inputs, double step,
                  std::size_t max_coords, std::uint64_t seed) {
    if (!(step > 0.0)) throw std::invalid_argument("grad_check: step must be positive");
    const LossResult base = fn(inputs);
    if (!std::isfinite(base.value)) throw std::runtime_error("grad_check: non-finite loss");
    const FeatureMap* grads[3] = {&base.grad_p3, &base.grad_p4, &base.grad_p5};

    Rng rng(seed);
    double max_rel = 0.0;
    for (std::size_t input_idx = 0; input_idx < inputs.size() && input_idx < 3; ++input_idx) {
        const std::size_t n = inputs[input_idx].size();
        std::vector<std::size_t> coords;
        if (n <= max_coords) {
            coords.resize(n);
            std::iota(coords.begin(), coords.end(), 0);
        } else {
            const std::size_t sample = std::max<std::size_t>(200, max_coords);
            coords.reserve(sample);
            for (std::size_t s = 0; s < sample; ++s) coords.push_back(rng.index(n));
        }
        for (std::size_t idx : coords) {
            double& v = inputs[input_idx].values[idx];
            const double orig = v;
            v = orig + step;
            const double up = fn(inputs).value;
            v = orig - step;
            const double dn = fn(inputs).value;
            v = orig;
            const double numeric = (up - dn) / (2.0 * step);
            const double analytic = grads[input_idx]->values[idx];
            const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
            max_rel = std::max(max_rel, std::fabs(analytic - numeric) / denom);
        }
    }
    return max_rel;
}

std::vector<double> channel_mean_heatmap(const FeatureMap& f) {
    std::vector<double> heat(static_cast<std::size_t>(f.H) * f.W, 0.0);
    for (int c = 0; c < f.C; ++c)
        for (int i = 0; i < f.H; ++i)
            for (int j = 0; j < f.W; ++j) heat[static_cast<std::size_t>(i) * f.W + j] += f.at(c, i, j);
    for (double& v : heat) v /= f.C;

    const auto [mn_it, mx_it] = std::minmax_element(heat.begin(), heat.end());
    const double mn = *mn_it, mx = *mx_it;
    if (mx - mn < 1e-300) {
        std::fill(heat.begin(), heat.end(), 0.0);
    } else {
        for (double& v : heat) v = (v - mn) / (mx - mn);
    }
    return heat;
}

}  // namespace survey
