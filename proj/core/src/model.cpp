#include "cdrb/model.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "cdrb/rng.hpp"

namespace cdrb {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using MapM = Eigen::Map<Mat>;
using MapCM = Eigen::Map<const Mat>;

// All reductions and products run on Eigen-owned storage (or fixed offsets
// into it), never directly on caller memory: Eigen's kernels pick their
// vector split from runtime pointer alignment, so arithmetic on arbitrary
// heap addresses would make results depend on where the caller's buffers
// happen to live. Boundary copies are elementwise and therefore exact.

constexpr double kGeluC0 = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluC1 = 0.044715;

double gelu(double x) {
    return 0.5 * x * (1.0 + std::tanh(kGeluC0 * (x + kGeluC1 * x * x * x)));
}

double gelu_grad(double x) {
    const double u = kGeluC0 * (x + kGeluC1 * x * x * x);
    const double th = std::tanh(u);
    const double du = kGeluC0 * (1.0 + 3.0 * kGeluC1 * x * x);
    return 0.5 * (1.0 + th) + 0.5 * x * (1.0 - th * th) * du;
}

// Tensor order in the flat parameter array. mlp:
//   W1 (hidden x in), b1, [Wl (hidden x hidden), bl] x (depth-1),
//   Wo (out x hidden), bo, Emb (embed x steps+1)
// tcn:
//   Wc1 (ch x in_ch*kernel), bc1, [Wcl (ch x ch*kernel), bcl] x (depth-1),
//   Wh (entry x ch), bh, Emb (embed x steps+1)
struct TensorSpec {
    std::size_t offset;
    std::size_t rows, cols;
};

std::vector<TensorSpec> layout(const NetConfig& cfg) {
    std::vector<TensorSpec> t;
    std::size_t off = 0;
    const auto add = [&](std::size_t r, std::size_t c) {
        t.push_back({off, r, c});
        off += r * c;
    };
    const std::size_t n = cfg.input_size();
    const std::size_t e = cfg.embed_dim;
    if (cfg.backbone == Backbone::mlp) {
        const std::size_t h = cfg.hidden;
        add(h, n + e);
        add(h, 1);
        for (int l = 1; l < cfg.depth; ++l) {
            add(h, h);
            add(h, 1);
        }
        add(n, h);
        add(n, 1);
    } else {
        const std::size_t c = cfg.channels;
        const std::size_t d = cfg.entry_dim;
        const std::size_t k = cfg.kernel;
        add(c, (d + e) * k);
        add(c, 1);
        for (int l = 1; l < cfg.depth; ++l) {
            add(c, c * k);
            add(c, 1);
        }
        add(d, c);
        add(d, 1);
    }
    add(e, cfg.diffusion_steps + 1);
    return t;
}

MapCM view(const Vec& p, const TensorSpec& s) {
    return MapCM(p.data() + s.offset, s.rows, s.cols);
}
MapM view(Vec& p, const TensorSpec& s) {
    return MapM(p.data() + s.offset, s.rows, s.cols);
}
MapM view(std::vector<double>& p, const TensorSpec& s) {
    return MapM(p.data() + s.offset, s.rows, s.cols);
}

// Unpack one column per batch item from a flat row of k indices.
Mat embed_columns(const MapCM& emb, std::span<const int> ks, const NetConfig& cfg) {
    Mat out(emb.rows(), static_cast<Eigen::Index>(ks.size()));
    for (std::size_t b = 0; b < ks.size(); ++b) {
        const int k = ks[b];
        if (k < 0 || k > cfg.diffusion_steps)
            throw ConfigError("RestorationNet: step index " + std::to_string(k) +
                              " outside [0, " + std::to_string(cfg.diffusion_steps) + "]");
        out.col(b) = emb.col(k);
    }
    return out;
}

// im2col with zero padding, per batch item: columns of `cols` are (item, pos)
// pairs in item-major order, rows are (channel, tap) pairs in channel-major
// order. `input` is ch x (L*B) with item-contiguous column blocks.
void im2col(const Mat& input, int L, int B, int K, Mat& cols) {
    const int ch = static_cast<int>(input.rows());
    const int pad = (K - 1) / 2;
    cols.setZero(static_cast<Eigen::Index>(ch) * K, static_cast<Eigen::Index>(L) * B);
    for (int b = 0; b < B; ++b)
        for (int p = 0; p < L; ++p) {
            const Eigen::Index col = static_cast<Eigen::Index>(b) * L + p;
            for (int j = 0; j < K; ++j) {
                const int src = p + j - pad;
                if (src < 0 || src >= L) continue;
                cols.block(static_cast<Eigen::Index>(j) * ch, col, ch, 1) =
                    input.col(static_cast<Eigen::Index>(b) * L + src);
            }
        }
}

// Adjoint of im2col: scatter-add column gradients back onto the input grid.
void col2im(const Mat& dcols, int L, int B, int K, Mat& dinput) {
    const int ch = static_cast<int>(dinput.rows());
    const int pad = (K - 1) / 2;
    dinput.setZero();
    for (int b = 0; b < B; ++b)
        for (int p = 0; p < L; ++p) {
            const Eigen::Index col = static_cast<Eigen::Index>(b) * L + p;
            for (int j = 0; j < K; ++j) {
                const int src = p + j - pad;
                if (src < 0 || src >= L) continue;
                dinput.col(static_cast<Eigen::Index>(b) * L + src) +=
                    dcols.block(static_cast<Eigen::Index>(j) * ch, col, ch, 1);
            }
        }
}

struct ForwardCache {
    Mat h0;                 // mlp: (n+e) x B
    std::vector<Mat> z, a;  // pre/post activation per layer
    std::vector<Mat> cols;  // tcn: im2col matrices per layer
    Mat y;                  // out x B (mlp) or entry x (L*B) (tcn)
};

void mlp_forward(const NetConfig& cfg, const Vec& P, const std::vector<TensorSpec>& ts,
                 const Mat& x, std::span<const int> ks, ForwardCache& fc) {
    const Eigen::Index B = x.cols();
    const std::size_t emb_idx = ts.size() - 1;

    fc.h0.resize(x.rows() + cfg.embed_dim, B);
    fc.h0.topRows(x.rows()) = x;
    fc.h0.bottomRows(cfg.embed_dim) = embed_columns(view(P, ts[emb_idx]), ks, cfg);

    fc.z.resize(cfg.depth);
    fc.a.resize(cfg.depth);
    const Mat* prev = &fc.h0;
    for (int l = 0; l < cfg.depth; ++l) {
        const MapCM W = view(P, ts[2 * l]);
        const MapCM b = view(P, ts[2 * l + 1]);
        fc.z[l].noalias() = W * (*prev);
        fc.z[l].colwise() += b.col(0);
        fc.a[l] = fc.z[l].unaryExpr([](double v) { return gelu(v); });
        prev = &fc.a[l];
    }
    const MapCM Wo = view(P, ts[2 * cfg.depth]);
    const MapCM bo = view(P, ts[2 * cfg.depth + 1]);
    fc.y.noalias() = Wo * (*prev);
    fc.y.colwise() += bo.col(0);
    fc.y += x;
}

void tcn_forward(const NetConfig& cfg, const Vec& P, const std::vector<TensorSpec>& ts,
                 const Mat& x, std::span<const int> ks, ForwardCache& fc) {
    const int B = static_cast<int>(x.cols());
    const int L = cfg.horizon + 1;
    const int d = cfg.entry_dim;
    const std::size_t emb_idx = ts.size() - 1;

    // Reshape each flattened trajectory into d x L and broadcast the step
    // embedding to every position: h0 is (d+e) x (L*B).
    const Mat emb = embed_columns(view(P, ts[emb_idx]), ks, cfg);
    fc.h0.resize(d + cfg.embed_dim, static_cast<Eigen::Index>(L) * B);
    for (int b = 0; b < B; ++b) {
        MapCM item(x.col(b).data(), d, L);
        fc.h0.block(0, static_cast<Eigen::Index>(b) * L, d, L) = item;
        fc.h0.block(d, static_cast<Eigen::Index>(b) * L, cfg.embed_dim, L).colwise() =
            emb.col(b);
    }

    fc.z.resize(cfg.depth);
    fc.a.resize(cfg.depth);
    fc.cols.resize(cfg.depth);
    const Mat* prev = &fc.h0;
    for (int l = 0; l < cfg.depth; ++l) {
        const MapCM W = view(P, ts[2 * l]);
        const MapCM b = view(P, ts[2 * l + 1]);
        im2col(*prev, L, B, cfg.kernel, fc.cols[l]);
        fc.z[l].noalias() = W * fc.cols[l];
        fc.z[l].colwise() += b.col(0);
        fc.a[l] = fc.z[l].unaryExpr([](double v) { return gelu(v); });
        prev = &fc.a[l];
    }
    const MapCM Wh = view(P, ts[2 * cfg.depth]);
    const MapCM bh = view(P, ts[2 * cfg.depth + 1]);
    fc.y.noalias() = Wh * (*prev);
    fc.y.colwise() += bh.col(0);
    fc.y += fc.h0.topRows(d);
}

}  // namespace

Backbone backbone_from_string(std::string_view s) {
    if (s == "mlp") return Backbone::mlp;
    if (s == "tcn") return Backbone::tcn;
    throw ConfigError("unknown backbone '" + std::string(s) + "' (mlp|tcn)");
}

std::string to_string(Backbone b) { return b == Backbone::mlp ? "mlp" : "tcn"; }

void NetConfig::validate() const {
    if (horizon < 1) throw ConfigError("NetConfig: horizon must be at least 1");
    if (entry_dim < 1) throw ConfigError("NetConfig: entry_dim must be positive");
    if (diffusion_steps < 1) throw ConfigError("NetConfig: diffusion_steps must be positive");
    if (hidden < 1) throw ConfigError("NetConfig: hidden must be positive");
    if (depth < 1) throw ConfigError("NetConfig: depth must be positive");
    if (embed_dim < 1) throw ConfigError("NetConfig: embed_dim must be positive");
    if (channels < 1) throw ConfigError("NetConfig: channels must be positive");
    if (kernel < 1 || kernel % 2 == 0)
        throw ConfigError("NetConfig: kernel must be odd and positive");
}

std::size_t param_count(const NetConfig& cfg) {
    std::size_t total = 0;
    for (const TensorSpec& t : layout(cfg)) total += t.rows * t.cols;
    return total;
}

RestorationNet RestorationNet::init(const NetConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    RestorationNet net;
    net.cfg = cfg;
    const std::vector<TensorSpec> ts = layout(cfg);
    net.params.assign(param_count(cfg), 0.0);

    // Weight matrices: scaled normal, std 1/sqrt(fan_in). Output head and
    // all biases stay zero so the net is the identity at init. Embeddings
    // get a moderate scale so step conditioning is visible from step one.
    const Rng root(seed);
    const std::size_t head_w = ts.size() - 3;
    for (std::size_t i = 0; i + 1 < ts.size(); i += 2) {
        if (i == head_w) continue;
        Rng r = root.stream("weight", i);
        MapM W = view(net.params, ts[i]);
        const double scale = 1.0 / std::sqrt(static_cast<double>(W.cols()));
        for (Eigen::Index c = 0; c < W.cols(); ++c)
            for (Eigen::Index rr = 0; rr < W.rows(); ++rr) W(rr, c) = scale * r.normal();
    }
    {
        Rng r = root.stream("embed");
        MapM E = view(net.params, ts.back());
        for (Eigen::Index c = 0; c < E.cols(); ++c)
            for (Eigen::Index rr = 0; rr < E.rows(); ++rr) E(rr, c) = 0.1 * r.normal();
    }
    return net;
}

std::vector<double> RestorationNet::forward(std::span<const double> noisy, int k) const {
    const int ks[1] = {k};
    return forward_batch(noisy, ks);
}

std::vector<double> RestorationNet::forward_batch(std::span<const double> noisy,
                                                  std::span<const int> ks) const {
    const std::size_t n = cfg.input_size();
    const std::size_t B = ks.size();
    if (B == 0) throw ConfigError("RestorationNet: empty batch");
    if (noisy.size() != n * B) throw ConfigError("RestorationNet: input size mismatch");

    const std::vector<TensorSpec> ts = layout(cfg);
    const Vec P = Eigen::Map<const Vec>(params.data(), static_cast<Eigen::Index>(params.size()));
    const Mat x = MapCM(noisy.data(), n, B);
    ForwardCache fc;
    if (cfg.backbone == Backbone::mlp)
        mlp_forward(cfg, P, ts, x, ks, fc);
    else
        tcn_forward(cfg, P, ts, x, ks, fc);

    std::vector<double> out(n * B);
    if (cfg.backbone == Backbone::mlp) {
        MapM(out.data(), n, B) = fc.y;
    } else {
        const int L = cfg.horizon + 1;
        for (std::size_t b = 0; b < B; ++b)
            MapM(out.data() + b * n, cfg.entry_dim, L) =
                fc.y.block(0, static_cast<Eigen::Index>(b) * L, cfg.entry_dim, L);
    }
    return out;
}

double RestorationNet::loss_and_grad(std::span<const double> noisy,
                                     std::span<const double> clean,
                                     std::span<const int> ks,
                                     std::vector<double>& grad) const {
    const std::size_t n = cfg.input_size();
    const std::size_t B = ks.size();
    if (B == 0) throw ConfigError("RestorationNet: empty batch");
    if (noisy.size() != n * B || clean.size() != n * B)
        throw ConfigError("RestorationNet: batch size mismatch");

    const std::vector<TensorSpec> ts = layout(cfg);
    const Vec P = Eigen::Map<const Vec>(params.data(), static_cast<Eigen::Index>(params.size()));
    const Mat x = MapCM(noisy.data(), n, B);
    Vec G = Vec::Zero(static_cast<Eigen::Index>(params.size()));
    ForwardCache fc;

    const std::size_t emb_idx = ts.size() - 1;
    double loss = 0.0;

    if (cfg.backbone == Backbone::mlp) {
        mlp_forward(cfg, P, ts, x, ks, fc);
        MapCM t(clean.data(), n, B);
        Mat dy = fc.y - t;
        loss = dy.squaredNorm() / static_cast<double>(n * B);
        dy *= 2.0 / static_cast<double>(n * B);

        const Mat& last = cfg.depth > 0 ? fc.a[cfg.depth - 1] : fc.h0;
        view(G, ts[2 * cfg.depth]).noalias() = dy * last.transpose();
        view(G, ts[2 * cfg.depth + 1]).col(0) = dy.rowwise().sum();
        Mat da = view(P, ts[2 * cfg.depth]).transpose() * dy;
        for (int l = cfg.depth - 1; l >= 0; --l) {
            const Mat dz =
                da.array() * fc.z[l].unaryExpr([](double v) { return gelu_grad(v); }).array();
            const Mat& below = l > 0 ? fc.a[l - 1] : fc.h0;
            view(G, ts[2 * l]).noalias() = dz * below.transpose();
            view(G, ts[2 * l + 1]).col(0) = dz.rowwise().sum();
            da.noalias() = view(P, ts[2 * l]).transpose() * dz;
        }
        // da is now d(loss)/d(h0); its embedding rows scatter into the table.
        MapM demb = view(G, ts[emb_idx]);
        for (std::size_t b = 0; b < B; ++b)
            demb.col(ks[b]) += da.block(n, b, cfg.embed_dim, 1);
    } else {
        tcn_forward(cfg, P, ts, x, ks, fc);
        const int L = cfg.horizon + 1;
        const int d = cfg.entry_dim;
        Mat t(d, static_cast<Eigen::Index>(L) * B);
        for (std::size_t b = 0; b < B; ++b)
            t.block(0, static_cast<Eigen::Index>(b) * L, d, L) =
                MapCM(clean.data() + b * n, d, L);
        Mat dy = fc.y - t;
        loss = dy.squaredNorm() / static_cast<double>(n * B);
        dy *= 2.0 / static_cast<double>(n * B);

        const Mat& last = fc.a[cfg.depth - 1];
        view(G, ts[2 * cfg.depth]).noalias() = dy * last.transpose();
        view(G, ts[2 * cfg.depth + 1]).col(0) = dy.rowwise().sum();
        Mat da = view(P, ts[2 * cfg.depth]).transpose() * dy;
        Mat dinput;
        for (int l = cfg.depth - 1; l >= 0; --l) {
            const Mat dz =
                da.array() * fc.z[l].unaryExpr([](double v) { return gelu_grad(v); }).array();
            view(G, ts[2 * l]).noalias() = dz * fc.cols[l].transpose();
            view(G, ts[2 * l + 1]).col(0) = dz.rowwise().sum();
            const Mat dcols = view(P, ts[2 * l]).transpose() * dz;
            const Mat& below = l > 0 ? fc.a[l - 1] : fc.h0;
            dinput.resize(below.rows(), below.cols());
            col2im(dcols, L, static_cast<int>(B), cfg.kernel, dinput);
            da = std::move(dinput);
        }
        // Embedding rows of da accumulate per item across positions. The
        // residual path only touches h0's entry rows, which carry no params.
        MapM demb = view(G, ts[emb_idx]);
        for (std::size_t b = 0; b < B; ++b)
            demb.col(ks[b]) +=
                da.block(d, static_cast<Eigen::Index>(b) * L, cfg.embed_dim, L).rowwise().sum();
    }

    grad.resize(params.size());
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = G[static_cast<Eigen::Index>(i)];

    if (!std::isfinite(loss))
        throw NumericError("RestorationNet: non-finite loss (batch of " +
                           std::to_string(B) + ", k[0]=" + std::to_string(ks[0]) + ")");
    return loss;
}

OptimizerState OptimizerState::init(std::size_t n, double lr) {
    OptimizerState o;
    o.lr = lr;
    o.m.assign(n, 0.0);
    o.v.assign(n, 0.0);
    return o;
}

void adam_step(OptimizerState& opt, std::vector<double>& params,
               const std::vector<double>& grad) {
    if (params.size() != grad.size() || params.size() != opt.m.size())
        throw ConfigError("adam_step: shape mismatch");
    opt.step += 1;
    const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
    const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        opt.m[i] = opt.beta1 * opt.m[i] + (1.0 - opt.beta1) * grad[i];
        opt.v[i] = opt.beta2 * opt.v[i] + (1.0 - opt.beta2) * grad[i] * grad[i];
        const double mhat = opt.m[i] / bc1;
        const double vhat = opt.v[i] / bc2;
        params[i] -= opt.lr * mhat / (std::sqrt(vhat) + opt.eps);
    }
}

}  // namespace cdrb
