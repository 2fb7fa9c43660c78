#include "cte/snn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cte {

float surrogate_gradient(float v, const LIFParams& params) {
    return std::max(0.0f, 1.0f - std::abs(v - params.v_th));
}

float spike_activation(float v, const LIFParams& params, SpikeMode mode) {
    const float u = v - params.v_th;
    if (mode == SpikeMode::Hard) return u >= 0.0f ? 1.0f : 0.0f;
    if (u <= -1.0f) return 0.0f;
    if (u >= 1.0f) return 1.0f;
    if (u <= 0.0f) return 0.5f * (1.0f + u) * (1.0f + u);
    return 1.0f - 0.5f * (1.0f - u) * (1.0f - u);
}

void lif_step(LifState& state, std::span<const float> input, const LIFParams& params,
              SpikeMode mode) {
    if (input.size() != state.v.size()) throw DimensionError("lif_step: size mismatch");
    for (std::size_t i = 0; i < input.size(); ++i) {
        float v = params.decay * state.v[i] * (1.0f - state.s[i]) + input[i];
        state.v[i] = v;
        state.s[i] = spike_activation(v, params, mode);
    }
}

namespace {

std::size_t conv_w_count(const NetworkShape& s) {
    return static_cast<std::size_t>(s.conv_channels) * s.in_channels * 9;
}

// ---- scalar-generic network core -------------------------------------
// The same code runs the float production path and the double path used by
// the finite-difference gradient check.

template <typename S>
S surrogate(S v, S v_th) {
    S a = v - v_th;
    if (a < S(0)) a = -a;
    a = S(1) - a;
    return a > S(0) ? a : S(0);
}

template <typename S>
S spike_fn(S v, S v_th, SpikeMode mode) {
    const S u = v - v_th;
    if (mode == SpikeMode::Hard) return u >= S(0) ? S(1) : S(0);
    if (u <= S(-1)) return S(0);
    if (u >= S(1)) return S(1);
    if (u <= S(0)) return S(0.5) * (S(1) + u) * (S(1) + u);
    return S(1) - S(0.5) * (S(1) - u) * (S(1) - u);
}

template <typename S>
struct ParamView {
    std::span<const S> conv_w, conv_b, fc1_w, fc1_b, fc2_w, fc2_b;
};

template <typename S>
struct GradView {
    std::span<S> conv_w, conv_b, fc1_w, fc1_b, fc2_w, fc2_b;
};

// Active input cells of one time slice, indexed in_ch*H*W + y*W + x.
struct SparseFrame {
    std::vector<int> cells;
};

void collect_frames(const SpikeTensor& spikes, std::vector<SparseFrame>& frames) {
    const int C = spikes.channels, T = spikes.t_bins, hw = spikes.height * spikes.width;
    frames.assign(T, {});
    for (int c = 0; c < C; ++c)
        for (int t = 0; t < T; ++t) {
            const std::uint8_t* p =
                spikes.data.data() + (static_cast<std::size_t>(c) * T + t) * hw;
            for (int i = 0; i < hw; ++i)
                if (p[i]) frames[t].cells.push_back(c * hw + i);
        }
}

// A[oc][y][x] += w[oc][ic][dy][dx] scattered from each active (ic,yy,xx)
// with y = yy+1-dy, x = xx+1-dx (3x3 kernel, pad 1).
template <typename S>
void conv_forward(const SparseFrame& frame, const NetworkShape& s, const ParamView<S>& p,
                  std::vector<S>& act) {
    const int H = s.height, W = s.width, hw = H * W;
    for (int oc = 0; oc < s.conv_channels; ++oc) {
        S* out = act.data() + static_cast<std::size_t>(oc) * hw;
        const S b = p.conv_b[oc];
        for (int i = 0; i < hw; ++i) out[i] = b;
    }
    for (int cell : frame.cells) {
        const int ic = cell / hw, yy = (cell % hw) / W, xx = cell % W;
        for (int oc = 0; oc < s.conv_channels; ++oc) {
            const S* w = p.conv_w.data() + (static_cast<std::size_t>(oc) * s.in_channels + ic) * 9;
            S* out = act.data() + static_cast<std::size_t>(oc) * hw;
            for (int dy = 0; dy < 3; ++dy) {
                const int y = yy + 1 - dy;
                if (y < 0 || y >= H) continue;
                for (int dx = 0; dx < 3; ++dx) {
                    const int x = xx + 1 - dx;
                    if (x < 0 || x >= W) continue;
                    out[y * W + x] += w[dy * 3 + dx];
                }
            }
        }
    }
}

template <typename S>
void conv_backward(const SparseFrame& frame, const NetworkShape& s, std::span<const S> delta,
                   GradView<S>& g) {
    const int H = s.height, W = s.width, hw = H * W;
    for (int oc = 0; oc < s.conv_channels; ++oc) {
        const S* d = delta.data() + static_cast<std::size_t>(oc) * hw;
        S acc = S(0);
        for (int i = 0; i < hw; ++i) acc += d[i];
        g.conv_b[oc] += acc;
    }
    for (int cell : frame.cells) {
        const int ic = cell / hw, yy = (cell % hw) / W, xx = cell % W;
        for (int oc = 0; oc < s.conv_channels; ++oc) {
            S* gw = g.conv_w.data() + (static_cast<std::size_t>(oc) * s.in_channels + ic) * 9;
            const S* d = delta.data() + static_cast<std::size_t>(oc) * hw;
            for (int dy = 0; dy < 3; ++dy) {
                const int y = yy + 1 - dy;
                if (y < 0 || y >= H) continue;
                for (int dx = 0; dx < 3; ++dx) {
                    const int x = xx + 1 - dx;
                    if (x < 0 || x >= W) continue;
                    gw[dy * 3 + dx] += d[y * W + x];
                }
            }
        }
    }
}

template <typename S>
std::vector<S> forward_core(const std::vector<SparseFrame>& frames, const NetworkShape& s,
                            const ParamView<S>& p, const LIFParams& lif, SpikeMode mode) {
    const int T = static_cast<int>(frames.size());
    const int n1 = s.conv_units(), n2 = s.hidden;
    const S v_th = S(lif.v_th), decay = S(lif.decay);

    std::vector<S> v1(n1, S(0)), s1(n1, S(0)), v2(n2, S(0)), s2(n2, S(0));
    std::vector<S> act(n1), cur2(n2);
    std::vector<S> scores(s.classes, S(0));

    for (int t = 0; t < T; ++t) {
        conv_forward(frames[t], s, p, act);
        for (int i = 0; i < n1; ++i) {
            S v = decay * v1[i] * (S(1) - s1[i]) + act[i];
            v1[i] = v;
            s1[i] = spike_fn(v, v_th, mode);
        }
        std::copy(p.fc1_b.begin(), p.fc1_b.end(), cur2.begin());
        for (int i = 0; i < n1; ++i) {
            const S si = s1[i];
            if (si == S(0)) continue;
            const S* row = p.fc1_w.data() + static_cast<std::size_t>(i) * n2;
            for (int j = 0; j < n2; ++j) cur2[j] += si * row[j];
        }
        for (int j = 0; j < n2; ++j) {
            S v = decay * v2[j] * (S(1) - s2[j]) + cur2[j];
            v2[j] = v;
            s2[j] = spike_fn(v, v_th, mode);
        }
        for (int k = 0; k < s.classes; ++k) scores[k] += p.fc2_b[k];
        for (int j = 0; j < n2; ++j) {
            const S sj = s2[j];
            if (sj == S(0)) continue;
            const S* row = p.fc2_w.data() + static_cast<std::size_t>(j) * s.classes;
            for (int k = 0; k < s.classes; ++k) scores[k] += sj * row[k];
        }
    }
    return scores;
}

template <typename S>
S cross_entropy(std::span<const S> scores, int label, std::vector<S>& probs) {
    const S mx = *std::max_element(scores.begin(), scores.end());
    probs.resize(scores.size());
    S sum = S(0);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        probs[i] = std::exp(scores[i] - mx);
        sum += probs[i];
    }
    for (auto& v : probs) v /= sum;
    return -std::log(std::max(probs[label], S(1e-30)));
}

template <typename S>
struct CoreResult {
    S loss = S(0);
    int predicted = 0;
};

// Forward with recorded traces, then backward through time. Gradients are
// accumulated into g.
template <typename S>
CoreResult<S> backward_core(const std::vector<SparseFrame>& frames, int label,
                            const NetworkShape& s, const ParamView<S>& p, const LIFParams& lif,
                            SpikeMode mode, GradView<S>& g) {
    const int T = static_cast<int>(frames.size());
    const int n1 = s.conv_units(), n2 = s.hidden;
    const S v_th = S(lif.v_th), decay = S(lif.decay);

    std::vector<S> v1(static_cast<std::size_t>(T) * n1), s1(static_cast<std::size_t>(T) * n1);
    std::vector<S> v2(static_cast<std::size_t>(T) * n2), s2(static_cast<std::size_t>(T) * n2);
    std::vector<S> act(n1), cur2(n2);
    std::vector<S> scores(s.classes, S(0));

    for (int t = 0; t < T; ++t) {
        S* v1t = v1.data() + static_cast<std::size_t>(t) * n1;
        S* s1t = s1.data() + static_cast<std::size_t>(t) * n1;
        const S* v1p = t ? v1t - n1 : nullptr;
        const S* s1p = t ? s1t - n1 : nullptr;
        conv_forward(frames[t], s, p, act);
        for (int i = 0; i < n1; ++i) {
            S v = (t ? decay * v1p[i] * (S(1) - s1p[i]) : S(0)) + act[i];
            v1t[i] = v;
            s1t[i] = spike_fn(v, v_th, mode);
        }
        std::copy(p.fc1_b.begin(), p.fc1_b.end(), cur2.begin());
        for (int i = 0; i < n1; ++i) {
            const S si = s1t[i];
            if (si == S(0)) continue;
            const S* row = p.fc1_w.data() + static_cast<std::size_t>(i) * n2;
            for (int j = 0; j < n2; ++j) cur2[j] += si * row[j];
        }
        S* v2t = v2.data() + static_cast<std::size_t>(t) * n2;
        S* s2t = s2.data() + static_cast<std::size_t>(t) * n2;
        const S* v2p = t ? v2t - n2 : nullptr;
        const S* s2p = t ? s2t - n2 : nullptr;
        for (int j = 0; j < n2; ++j) {
            S v = (t ? decay * v2p[j] * (S(1) - s2p[j]) : S(0)) + cur2[j];
            v2t[j] = v;
            s2t[j] = spike_fn(v, v_th, mode);
        }
        for (int k = 0; k < s.classes; ++k) scores[k] += p.fc2_b[k];
        for (int j = 0; j < n2; ++j) {
            const S sj = s2t[j];
            if (sj == S(0)) continue;
            const S* row = p.fc2_w.data() + static_cast<std::size_t>(j) * s.classes;
            for (int k = 0; k < s.classes; ++k) scores[k] += sj * row[k];
        }
    }

    std::vector<S> probs;
    CoreResult<S> result;
    result.loss = cross_entropy<S>(scores, label, probs);
    result.predicted =
        static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());

    // dL/dscores is shared by every time step
    std::vector<S> dscores(probs);
    dscores[label] -= S(1);
    for (int k = 0; k < s.classes; ++k) g.fc2_b[k] += S(T) * dscores[k];

    std::vector<S> ds2_base(n2);
    for (int j = 0; j < n2; ++j) {
        const S* row = p.fc2_w.data() + static_cast<std::size_t>(j) * s.classes;
        S acc = S(0);
        for (int k = 0; k < s.classes; ++k) acc += row[k] * dscores[k];
        ds2_base[j] = acc;
    }

    std::vector<S> dv1_next(n1, S(0)), dv2_next(n2, S(0)), dv1(n1), dv2(n2);

    for (int t = T - 1; t >= 0; --t) {
        const S* v1t = v1.data() + static_cast<std::size_t>(t) * n1;
        const S* s1t = s1.data() + static_cast<std::size_t>(t) * n1;
        const S* v2t = v2.data() + static_cast<std::size_t>(t) * n2;
        const S* s2t = s2.data() + static_cast<std::size_t>(t) * n2;

        for (int j = 0; j < n2; ++j) {
            // reset path: v2[t+1] depends on s2[t] through -decay*v2[t]
            const S ds = ds2_base[j] - decay * v2t[j] * dv2_next[j];
            dv2[j] = ds * surrogate(v2t[j], v_th) + dv2_next[j] * decay * (S(1) - s2t[j]);
        }
        for (int j = 0; j < n2; ++j) {
            const S sj = s2t[j];
            if (sj == S(0)) continue;
            S* gw = g.fc2_w.data() + static_cast<std::size_t>(j) * s.classes;
            for (int k = 0; k < s.classes; ++k) gw[k] += sj * dscores[k];
        }
        for (int j = 0; j < n2; ++j) g.fc1_b[j] += dv2[j];
        for (int i = 0; i < n1; ++i) {
            const S si = s1t[i];
            if (si == S(0)) continue;
            S* gw = g.fc1_w.data() + static_cast<std::size_t>(i) * n2;
            for (int j = 0; j < n2; ++j) gw[j] += si * dv2[j];
        }
        // layer 1: the fc1 backward dot is only needed where the surrogate
        // is non-zero
        for (int i = 0; i < n1; ++i) {
            const S sg = surrogate(v1t[i], v_th);
            S d = dv1_next[i] * decay * (S(1) - s1t[i]);
            if (sg != S(0)) {
                const S* row = p.fc1_w.data() + static_cast<std::size_t>(i) * n2;
                S dot = S(0);
                for (int j = 0; j < n2; ++j) dot += row[j] * dv2[j];
                d += (dot - decay * v1t[i] * dv1_next[i]) * sg;
            }
            dv1[i] = d;
        }
        conv_backward<S>(frames[t], s, dv1, g);
        std::swap(dv1, dv1_next);
        std::swap(dv2, dv2_next);
    }
    return result;
}

ParamView<float> view_of(const NetworkParams& p) {
    return {p.conv_w, p.conv_b, p.fc1_w, p.fc1_b, p.fc2_w, p.fc2_b};
}

GradView<float> view_of(Gradients& g) {
    return {g.conv_w, g.conv_b, g.fc1_w, g.fc1_b, g.fc2_w, g.fc2_b};
}

void check_input(const SpikeTensor& spikes, const NetworkShape& s) {
    if (spikes.channels != s.in_channels || spikes.height != s.height || spikes.width != s.width)
        throw DimensionError("snn: input tensor does not match network shape");
}

void fill_uniform(std::vector<float>& w, std::size_t fan_in, std::mt19937_64& rng) {
    const float bound = 1.0f / std::sqrt(static_cast<float>(fan_in));
    std::uniform_real_distribution<float> dist(-bound, bound);
    for (auto& v : w) v = dist(rng);
}

}  // namespace

NetworkParams NetworkParams::init(const NetworkShape& shape, std::uint64_t seed) {
    NetworkParams p;
    p.shape = shape;
    std::mt19937_64 rng(seed);
    p.conv_w.resize(conv_w_count(shape));
    p.conv_b.assign(shape.conv_channels, 0.0f);
    p.fc1_w.resize(static_cast<std::size_t>(shape.conv_units()) * shape.hidden);
    p.fc1_b.assign(shape.hidden, 0.0f);
    p.fc2_w.resize(static_cast<std::size_t>(shape.hidden) * shape.classes);
    p.fc2_b.assign(shape.classes, 0.0f);
    fill_uniform(p.conv_w, static_cast<std::size_t>(shape.in_channels) * 9, rng);
    fill_uniform(p.fc1_w, shape.conv_units(), rng);
    fill_uniform(p.fc2_w, shape.hidden, rng);
    return p;
}

std::size_t NetworkParams::parameter_count() const {
    return conv_w.size() + conv_b.size() + fc1_w.size() + fc1_b.size() + fc2_w.size() +
           fc2_b.size();
}

Gradients::Gradients(const NetworkShape& s)
    : conv_w(conv_w_count(s), 0.0f),
      conv_b(s.conv_channels, 0.0f),
      fc1_w(static_cast<std::size_t>(s.conv_units()) * s.hidden, 0.0f),
      fc1_b(s.hidden, 0.0f),
      fc2_w(static_cast<std::size_t>(s.hidden) * s.classes, 0.0f),
      fc2_b(s.classes, 0.0f) {}

void Gradients::zero() {
    for (auto* v : {&conv_w, &conv_b, &fc1_w, &fc1_b, &fc2_w, &fc2_b})
        std::fill(v->begin(), v->end(), 0.0f);
}

void Gradients::add_scaled(const Gradients& other, float scale) {
    auto add = [scale](std::vector<float>& a, const std::vector<float>& b) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += scale * b[i];
    };
    add(conv_w, other.conv_w);
    add(conv_b, other.conv_b);
    add(fc1_w, other.fc1_w);
    add(fc1_b, other.fc1_b);
    add(fc2_w, other.fc2_w);
    add(fc2_b, other.fc2_b);
}

std::vector<float> forward(const SpikeTensor& spikes, const NetworkParams& params,
                           const LIFParams& lif, SpikeMode mode) {
    check_input(spikes, params.shape);
    std::vector<SparseFrame> frames;
    collect_frames(spikes, frames);
    return forward_core<float>(frames, params.shape, view_of(params), lif, mode);
}

BackwardResult backward(const SpikeTensor& spikes, int label, const NetworkParams& params,
                        const LIFParams& lif, SpikeMode mode, Gradients& grads) {
    check_input(spikes, params.shape);
    if (label < 0 || label >= params.shape.classes)
        throw DataError("backward: label out of range");
    std::vector<SparseFrame> frames;
    collect_frames(spikes, frames);
    auto gv = view_of(grads);
    auto r = backward_core<float>(frames, label, params.shape, view_of(params), lif, mode, gv);
    return {r.loss, r.predicted};
}

// ---- flat double-precision path (gradient checker) -------------------

namespace {

struct FlatLayout {
    std::size_t conv_w, conv_b, fc1_w, fc1_b, fc2_w, fc2_b, total;
};

FlatLayout layout_of(const NetworkShape& s) {
    FlatLayout l{};
    l.conv_w = 0;
    l.conv_b = l.conv_w + conv_w_count(s);
    l.fc1_w = l.conv_b + s.conv_channels;
    l.fc1_b = l.fc1_w + static_cast<std::size_t>(s.conv_units()) * s.hidden;
    l.fc2_w = l.fc1_b + s.hidden;
    l.fc2_b = l.fc2_w + static_cast<std::size_t>(s.hidden) * s.classes;
    l.total = l.fc2_b + s.classes;
    return l;
}

ParamView<double> flat_view(std::span<const double> flat, const NetworkShape& s,
                            const FlatLayout& l) {
    return {flat.subspan(l.conv_w, l.conv_b - l.conv_w),
            flat.subspan(l.conv_b, l.fc1_w - l.conv_b),
            flat.subspan(l.fc1_w, l.fc1_b - l.fc1_w),
            flat.subspan(l.fc1_b, l.fc2_w - l.fc1_b),
            flat.subspan(l.fc2_w, l.fc2_b - l.fc2_w),
            flat.subspan(l.fc2_b, s.classes)};
}

}  // namespace

std::size_t flat_param_count(const NetworkShape& shape) { return layout_of(shape).total; }

double loss_f64(const SpikeTensor& spikes, int label, std::span<const double> flat,
                const NetworkShape& shape, const LIFParams& lif, SpikeMode mode) {
    check_input(spikes, shape);
    const auto l = layout_of(shape);
    if (flat.size() != l.total) throw DimensionError("loss_f64: flat size mismatch");
    std::vector<SparseFrame> frames;
    collect_frames(spikes, frames);
    auto scores = forward_core<double>(frames, shape, flat_view(flat, shape, l), lif, mode);
    std::vector<double> probs;
    return cross_entropy<double>(scores, label, probs);
}

std::vector<double> gradient_f64(const SpikeTensor& spikes, int label,
                                 std::span<const double> flat, const NetworkShape& shape,
                                 const LIFParams& lif, SpikeMode mode) {
    check_input(spikes, shape);
    const auto l = layout_of(shape);
    if (flat.size() != l.total) throw DimensionError("gradient_f64: flat size mismatch");
    std::vector<SparseFrame> frames;
    collect_frames(spikes, frames);
    std::vector<double> grad(l.total, 0.0);
    std::span<double> g(grad);
    GradView<double> gv{g.subspan(l.conv_w, l.conv_b - l.conv_w),
                        g.subspan(l.conv_b, l.fc1_w - l.conv_b),
                        g.subspan(l.fc1_w, l.fc1_b - l.fc1_w),
                        g.subspan(l.fc1_b, l.fc2_w - l.fc1_b),
                        g.subspan(l.fc2_w, l.fc2_b - l.fc2_w),
                        g.subspan(l.fc2_b, shape.classes)};
    backward_core<double>(frames, label, shape, flat_view(flat, shape, l), lif, mode, gv);
    return grad;
}

std::vector<double> flatten_params(const NetworkParams& params) {
    std::vector<double> out;
    out.reserve(params.parameter_count());
    for (const auto* blob : {&params.conv_w, &params.conv_b, &params.fc1_w, &params.fc1_b,
                             &params.fc2_w, &params.fc2_b})
        for (float f : *blob) out.push_back(f);
    return out;
}

// ---- optimizer and training loop -------------------------------------

void AdamW::step(NetworkParams& params, const Gradients& grads, float lr, float weight_decay) {
    ++steps;
    const float bc1 = 1.0f - std::pow(beta1, static_cast<float>(steps));
    const float bc2 = 1.0f - std::pow(beta2, static_cast<float>(steps));
    auto update = [&](std::vector<float>& w, std::vector<float>& mv, std::vector<float>& vv,
                      const std::vector<float>& g, bool decay_this) {
        for (std::size_t i = 0; i < w.size(); ++i) {
            mv[i] = beta1 * mv[i] + (1.0f - beta1) * g[i];
            vv[i] = beta2 * vv[i] + (1.0f - beta2) * g[i] * g[i];
            float delta = (mv[i] / bc1) / (std::sqrt(vv[i] / bc2) + eps);
            if (decay_this) delta += weight_decay * w[i];
            w[i] -= lr * delta;
        }
    };
    update(params.conv_w, m.conv_w, v.conv_w, grads.conv_w, true);
    update(params.conv_b, m.conv_b, v.conv_b, grads.conv_b, false);
    update(params.fc1_w, m.fc1_w, v.fc1_w, grads.fc1_w, true);
    update(params.fc1_b, m.fc1_b, v.fc1_b, grads.fc1_b, false);
    update(params.fc2_w, m.fc2_w, v.fc2_w, grads.fc2_w, true);
    update(params.fc2_b, m.fc2_b, v.fc2_b, grads.fc2_b, false);
}

namespace {

double grad_norm(const Gradients& g) {
    double acc = 0.0;
    for (const auto* v : {&g.conv_w, &g.conv_b, &g.fc1_w, &g.fc1_b, &g.fc2_w, &g.fc2_b})
        for (float x : *v) acc += static_cast<double>(x) * x;
    return std::sqrt(acc);
}

}  // namespace

TrainResult train(std::span<const SpikeTensor> train_x, std::span<const std::uint8_t> train_y,
                  std::span<const SpikeTensor> val_x, std::span<const std::uint8_t> val_y,
                  const NetworkShape& shape, const TrainConfig& cfg) {
    if (train_x.empty() || train_x.size() != train_y.size())
        throw DimensionError("train: empty or mismatched dataset");
    if (cfg.lr < 0.0f || cfg.batch_size < 1 || cfg.epochs < 0)
        throw ConfigError("train: invalid config");

    TrainResult result;
    result.params = NetworkParams::init(shape, cfg.seed);
    AdamW opt(shape);
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);

    std::vector<std::size_t> order(train_x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    const int n_threads =
#ifdef _OPENMP
        omp_get_max_threads();
#else
        1;
#endif
    std::vector<Gradients> thread_grads(n_threads, Gradients(shape));
    Gradients batch_grads(shape);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0.0;
        std::size_t correct = 0;

        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            for (auto& g : thread_grads) g.zero();
            double batch_loss = 0.0;
            std::size_t batch_correct = 0;

#pragma omp parallel for schedule(static) reduction(+ : batch_loss, batch_correct)
            for (std::size_t i = start; i < end; ++i) {
                const int tid =
#ifdef _OPENMP
                    omp_get_thread_num();
#else
                    0;
#endif
                auto r = backward(train_x[order[i]], train_y[order[i]], result.params, cfg.lif,
                                  SpikeMode::Hard, thread_grads[tid]);
                batch_loss += r.loss;
                if (r.predicted == train_y[order[i]]) ++batch_correct;
            }
            // fixed-order reduction so results do not depend on scheduling
            batch_grads.zero();
            const float scale = 1.0f / static_cast<float>(end - start);
            for (const auto& g : thread_grads) batch_grads.add_scaled(g, scale);

            if (!std::isfinite(batch_loss))
                throw DivergenceError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                      " batch " + std::to_string(start / cfg.batch_size) +
                                      " (lr=" + std::to_string(cfg.lr) +
                                      ", grad_norm=" + std::to_string(grad_norm(batch_grads)) +
                                      ")");
            opt.step(result.params, batch_grads, cfg.lr, cfg.weight_decay);
            loss_sum += batch_loss;
            correct += batch_correct;
        }

        EpochMetrics em;
        em.epoch = epoch;
        em.train_loss = loss_sum / static_cast<double>(train_x.size());
        em.train_acc = static_cast<double>(correct) / static_cast<double>(train_x.size());
        em.val_acc = val_x.empty() ? 0.0 : evaluate(result.params, val_x, val_y, cfg.lif).accuracy;
        result.metrics.push_back(em);
    }
    return result;
}

EvalResult evaluate(const NetworkParams& params, std::span<const SpikeTensor> x,
                    std::span<const std::uint8_t> y, const LIFParams& lif) {
    if (x.empty() || x.size() != y.size()) throw DimensionError("evaluate: bad dataset");
    std::size_t correct = 0, spikes = 0;
#pragma omp parallel for schedule(static) reduction(+ : correct, spikes)
    for (std::size_t i = 0; i < x.size(); ++i) {
        auto scores = forward(x[i], params, lif, SpikeMode::Hard);
        const int pred =
            static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
        if (pred == y[i]) ++correct;
        spikes += x[i].count();
    }
    return {static_cast<double>(correct) / x.size(), static_cast<double>(spikes) / x.size()};
}

// ---- checkpoint serialization ----------------------------------------

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(v & 0xff);
    out.push_back((v >> 8) & 0xff);
    out.push_back((v >> 16) & 0xff);
    out.push_back((v >> 24) & 0xff);
}

void put_f32(std::vector<std::uint8_t>& out, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(out, bits);
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
    return b[off] | (std::uint32_t(b[off + 1]) << 8) | (std::uint32_t(b[off + 2]) << 16) |
           (std::uint32_t(b[off + 3]) << 24);
}

float get_f32(std::span<const std::uint8_t> b, std::size_t off) {
    std::uint32_t bits = get_u32(b, off);
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
}

}  // namespace

std::vector<std::uint8_t> write_checkpoint(const NetworkParams& params, const LIFParams& lif) {
    std::vector<std::uint8_t> out = {'C', 'T', 'N', '1'};
    put_u32(out, 1);  // version
    const auto& s = params.shape;
    for (int v : {s.in_channels, s.height, s.width, s.conv_channels, s.hidden, s.classes})
        put_u32(out, static_cast<std::uint32_t>(v));
    put_f32(out, lif.v_th);
    put_f32(out, lif.decay);
    for (const auto* blob : {&params.conv_w, &params.conv_b, &params.fc1_w, &params.fc1_b,
                             &params.fc2_w, &params.fc2_b})
        for (float f : *blob) put_f32(out, f);
    return out;
}

Checkpoint read_checkpoint(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 40) throw LengthError("checkpoint: truncated header");
    if (!(bytes[0] == 'C' && bytes[1] == 'T' && bytes[2] == 'N' && bytes[3] == '1'))
        throw FormatError("checkpoint: bad magic");
    if (get_u32(bytes, 4) != 1) throw FormatError("checkpoint: unsupported version");
    NetworkShape s;
    s.in_channels = static_cast<int>(get_u32(bytes, 8));
    s.height = static_cast<int>(get_u32(bytes, 12));
    s.width = static_cast<int>(get_u32(bytes, 16));
    s.conv_channels = static_cast<int>(get_u32(bytes, 20));
    s.hidden = static_cast<int>(get_u32(bytes, 24));
    s.classes = static_cast<int>(get_u32(bytes, 28));
    Checkpoint ck;
    ck.lif.v_th = get_f32(bytes, 32);
    ck.lif.decay = get_f32(bytes, 36);
    ck.params = NetworkParams::init(s, 0);
    std::size_t off = 40;
    for (auto* blob : {&ck.params.conv_w, &ck.params.conv_b, &ck.params.fc1_w, &ck.params.fc1_b,
                       &ck.params.fc2_w, &ck.params.fc2_b}) {
        if (off + blob->size() * 4 > bytes.size()) throw LengthError("checkpoint: truncated blob");
        for (auto& f : *blob) {
            f = get_f32(bytes, off);
            off += 4;
        }
    }
    if (off != bytes.size()) throw FormatError("checkpoint: trailing bytes");
    return ck;
}

}  // namespace cte
