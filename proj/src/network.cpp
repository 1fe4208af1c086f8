#include "pinnlab/network.hpp"

#include <cmath>
#include <cstring>
#include <functional>
#include <memory>
#include <optional>

#include "pinnlab/errors.hpp"
#include "pinnlab/kernels.hpp"
#include "pinnlab/rng.hpp"

namespace pinnlab {

const char* arch_name(ArchKind k) {
    switch (k) {
        case ArchKind::Vanilla: return "vanilla";
        case ArchKind::ResNet: return "resnet";
        case ArchKind::ModifiedMlp: return "modified_mlp";
        case ArchKind::Dm: return "dm";
        case ArchKind::Sdm: return "sdm";
    }
    return "?";
}

ArchKind arch_from_name(const std::string& s) {
    if (s == "vanilla") return ArchKind::Vanilla;
    if (s == "resnet") return ArchKind::ResNet;
    if (s == "modified_mlp") return ArchKind::ModifiedMlp;
    if (s == "dm") return ArchKind::Dm;
    if (s == "sdm") return ArchKind::Sdm;
    throw ConfigError("unknown architecture: " + s);
}

const char* multiplier_mode_name(MultiplierMode m) {
    return m == MultiplierMode::HiddenOutputs ? "hidden_outputs" : "activations";
}

MultiplierMode multiplier_mode_from_name(const std::string& s) {
    if (s == "hidden_outputs") return MultiplierMode::HiddenOutputs;
    if (s == "activations") return MultiplierMode::Activations;
    throw ConfigError("unknown multiplier mode: " + s);
}

static void validate(const NetworkConfig& cfg) {
    if (cfg.input_dim < 1 || cfg.width < 1 || cfg.hidden_layers < 1 ||
        cfg.output_dim < 1)
        throw ConfigError("network dimensions must be positive");
    if (cfg.skip_stride < 1)
        throw ConfigError("skip_stride must be >= 1");
}

// Linear blocks in construction order: hidden layers, output layer, then
// (ModifiedMlp) the two encoders. Each entry is {fan_in, fan_out}.
static std::vector<std::array<long, 2>> linear_dims(const NetworkConfig& cfg) {
    std::vector<std::array<long, 2>> dims;
    dims.push_back({cfg.input_dim, cfg.width});
    for (int k = 1; k < cfg.hidden_layers; ++k)
        dims.push_back({cfg.width, cfg.width});
    dims.push_back({cfg.width, cfg.output_dim});
    if (cfg.kind == ArchKind::ModifiedMlp) {
        dims.push_back({cfg.input_dim, cfg.width});
        dims.push_back({cfg.input_dim, cfg.width});
    }
    return dims;
}

long param_count(const NetworkConfig& cfg) {
    validate(cfg);
    long total = 0;
    for (auto [fin, fout] : linear_dims(cfg)) total += fin * fout + fout;
    return total;
}

NetworkParams init_network(const NetworkConfig& cfg, std::uint64_t seed) {
    validate(cfg);
    NetworkParams p;
    p.config = cfg;
    Rng rng(seed);
    auto make_layer = [&](long fin, long fout) {
        Layer l;
        l.W = Tensor::uninit({fin, fout});
        const double sigma = std::sqrt(2.0 / static_cast<double>(fin + fout));
        for (std::size_t i = 0; i < l.W.size(); ++i)
            l.W[i] = sigma * rng.normal();
        l.b = Tensor::zeros({fout});
        return l;
    };
    const auto dims = linear_dims(cfg);
    const std::size_t n_main = static_cast<std::size_t>(cfg.hidden_layers) + 1;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        Layer l = make_layer(dims[i][0], dims[i][1]);
        if (i < n_main)
            p.layers.push_back(std::move(l));
        else
            p.encoders.push_back(std::move(l));
    }
    return p;
}

std::vector<ParamView> param_layout(const NetworkConfig& cfg) {
    validate(cfg);
    std::vector<ParamView> views;
    std::size_t off = 0;
    const auto dims = linear_dims(cfg);
    const std::size_t n_main = static_cast<std::size_t>(cfg.hidden_layers) + 1;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        const std::string base =
            i < n_main ? "layers." + std::to_string(i)
                       : "encoders." + std::to_string(i - n_main);
        const auto fin = dims[i][0], fout = dims[i][1];
        views.push_back({base + ".W", {fin, fout}, off,
                         static_cast<std::size_t>(fin * fout)});
        off += static_cast<std::size_t>(fin * fout);
        views.push_back({base + ".b", {fout}, off, static_cast<std::size_t>(fout)});
        off += static_cast<std::size_t>(fout);
    }
    return views;
}

static void for_each_tensor(const NetworkParams& p,
                            const std::function<void(const Tensor&)>& fn) {
    for (const auto& l : p.layers) {
        fn(l.W);
        fn(l.b);
    }
    for (const auto& l : p.encoders) {
        fn(l.W);
        fn(l.b);
    }
}

void flatten_params(const NetworkParams& p, double* out) {
    std::size_t off = 0;
    for_each_tensor(p, [&](const Tensor& t) {
        std::memcpy(out + off, t.data(), t.size() * sizeof(double));
        off += t.size();
    });
}

void unflatten_params(NetworkParams& p, const double* in) {
    std::size_t off = 0;
    auto take = [&](Tensor& t) {
        std::memcpy(t.data(), in + off, t.size() * sizeof(double));
        off += t.size();
    };
    for (auto& l : p.layers) {
        take(l.W);
        take(l.b);
    }
    for (auto& l : p.encoders) {
        take(l.W);
        take(l.b);
    }
}

Tensor normalize_inputs(const Tensor& X, const Domain& d) {
    if (X.shape().size() != 2)
        throw ShapeError("normalize_inputs: X must be [n, d]");
    const auto n = X.shape()[0];
    const auto dim = X.shape()[1];
    if (static_cast<std::size_t>(dim) != d.bounds.size())
        throw ShapeError("normalize_inputs: domain rank mismatch");
    for (auto [lo, hi] : d.bounds)
        if (!(hi > lo)) throw ConfigError("domain bounds must have hi > lo");
    Tensor Y = Tensor::uninit({n, dim});
    for (std::int64_t j = 0; j < dim; ++j) {
        const double lo = d.bounds[static_cast<std::size_t>(j)][0];
        const double range = d.bounds[static_cast<std::size_t>(j)][1] - lo;
        for (std::int64_t i = 0; i < n; ++i) {
            const double x = X.at(i, j);
            if (x < lo || x > lo + range)
                throw ConfigError("normalize_inputs: sample outside domain");
            // 2*((x-lo)/range)-1 maps lo -> -1 and hi -> +1 exactly.
            Y.at(i, j) = 2.0 * ((x - lo) / range) - 1.0;
        }
    }
    return Y;
}

// ---- backends ------------------------------------------------------------

namespace {

namespace k = kernels;

struct TapeBk {
    Tape& tape;
    using V = ValueId;
    static V none() { return -1; }
    V leaf(Tensor t) { return tape.leaf(std::move(t), false); }
    V matmul(V a, V b) { return tape.matmul(a, b); }
    V bias_add(V a, V b) { return tape.bias_add(a, b); }
    V add(V a, V b) { return tape.add(a, b); }
    V sub(V a, V b) { return tape.sub(a, b); }
    V mul(V a, V b) { return tape.mul(a, b); }
    V tanh(V a) { return tape.tanh(a); }
    V mul_add(V a, V b, V c, V d) { return tape.mul_add(a, b, c, d); }
    V leibniz2(V a, V b, V c, V d, V e, V f) {
        return tape.leibniz2(a, b, c, d, e, f);
    }
    V dtanh_mul(V t, V b) { return tape.dtanh_mul(t, b); }
    V d2tanh_mul(V t, V b, V c) { return tape.d2tanh_mul(t, b, c); }
    const Tensor& val(V v) const { return tape.value(v); }
};

struct EvalBk {
    using V = std::shared_ptr<const Tensor>;
    static V none() { return nullptr; }
    static V wrap(Tensor t) { return std::make_shared<const Tensor>(std::move(t)); }
    V leaf(Tensor t) { return wrap(std::move(t)); }
    V matmul(V a, V b) {
        Tensor y = Tensor::uninit({a->shape()[0], b->shape()[1]});
        k::matmul(y.data(), a->data(), b->data(), a->shape()[0], a->shape()[1],
                  b->shape()[1]);
        return wrap(std::move(y));
    }
    V bias_add(V a, V b) {
        Tensor y = Tensor::uninit(a->shape());
        k::bias_add(y.data(), a->data(), b->data(), a->shape()[0], a->shape()[1]);
        return wrap(std::move(y));
    }
    V add(V a, V b) {
        Tensor y = Tensor::uninit(a->shape());
        k::add(y.data(), a->data(), b->data(), y.size());
        return wrap(std::move(y));
    }
    V sub(V a, V b) {
        Tensor y = Tensor::uninit(a->shape());
        k::sub(y.data(), a->data(), b->data(), y.size());
        return wrap(std::move(y));
    }
    V mul(V a, V b) {
        Tensor y = Tensor::uninit(a->shape());
        k::mul(y.data(), a->data(), b->data(), y.size());
        return wrap(std::move(y));
    }
    V tanh(V a) {
        Tensor y = Tensor::uninit(a->shape());
        k::tanh(y.data(), a->data(), y.size());
        return wrap(std::move(y));
    }
    V mul_add(V a, V b, V c, V d) {
        Tensor y = Tensor::uninit(a->shape());
        k::mul_add(y.data(), a->data(), b->data(), c->data(), d->data(),
                   y.size());
        return wrap(std::move(y));
    }
    V leibniz2(V a, V b, V c, V d, V e, V f) {
        Tensor y = Tensor::uninit(a->shape());
        k::leibniz2(y.data(), a->data(), b->data(), c->data(), d->data(),
                    e->data(), f->data(), y.size());
        return wrap(std::move(y));
    }
    V dtanh_mul(V t, V b) {
        Tensor y = Tensor::uninit(t->shape());
        k::dtanh_mul(y.data(), t->data(), b->data(), y.size());
        return wrap(std::move(y));
    }
    V d2tanh_mul(V t, V b, V c) {
        Tensor y = Tensor::uninit(t->shape());
        k::d2tanh_mul(y.data(), t->data(), b->data(), c->data(), y.size());
        return wrap(std::move(y));
    }
    const Tensor& val(V v) const { return *v; }
};

/// Architecture composition, written once and instantiated for the taped and
/// untaped backends so both produce identical operation sequences.
template <class B>
struct Composer {
    B& bk;
    const NetworkConfig& cfg;
    std::span<const DirSpec> dirs;
    using V = typename B::V;

    struct Dual {
        V v{};
        std::vector<V> d1, d2;
    };

    std::vector<V> layer_vals; // per-layer value channels, for diagnostics

    bool ord2(std::size_t i) const { return dirs[i].order == 2; }

    Dual input(const Tensor& X, const Domain& dom) {
        Dual h;
        h.v = bk.leaf(normalize_inputs(X, dom));
        const auto n = X.shape()[0];
        const auto d = X.shape()[1];
        for (const auto& s : dirs) {
            if (s.dim < 0 || s.dim >= d)
                throw ConfigError("derivative direction out of range");
            if (s.order != 1 && s.order != 2)
                throw ConfigError("derivative order must be 1 or 2");
            Tensor d1 = Tensor::zeros({n, d});
            const auto& b = dom.bounds[static_cast<std::size_t>(s.dim)];
            const double sc = 2.0 / (b[1] - b[0]); // normalization chain factor
            for (std::int64_t r = 0; r < n; ++r) d1.at(r, s.dim) = sc;
            h.d1.push_back(bk.leaf(std::move(d1)));
            h.d2.push_back(s.order == 2 ? bk.leaf(Tensor::zeros({n, d}))
                                        : B::none());
        }
        return h;
    }

    Dual affine(const Dual& h, const V& W, const V& b) {
        Dual z;
        z.v = bk.bias_add(bk.matmul(h.v, W), b);
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            z.d1.push_back(bk.matmul(h.d1[i], W));
            z.d2.push_back(ord2(i) ? bk.matmul(h.d2[i], W) : B::none());
        }
        return z;
    }

    Dual activate(const Dual& z) {
        Dual a;
        a.v = bk.tanh(z.v);
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            a.d1.push_back(bk.dtanh_mul(a.v, z.d1[i]));
            a.d2.push_back(ord2(i) ? bk.d2tanh_mul(a.v, z.d1[i], z.d2[i])
                                   : B::none());
        }
        return a;
    }

    Dual dmul(const Dual& a, const Dual& q) {
        Dual y;
        y.v = bk.mul(a.v, q.v);
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            y.d1.push_back(bk.mul_add(a.d1[i], q.v, a.v, q.d1[i]));
            y.d2.push_back(ord2(i) ? bk.leibniz2(a.d2[i], q.v, a.d1[i],
                                                 q.d1[i], a.v, q.d2[i])
                                   : B::none());
        }
        return y;
    }

    Dual dadd(const Dual& a, const Dual& b) {
        Dual y;
        y.v = bk.add(a.v, b.v);
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            y.d1.push_back(bk.add(a.d1[i], b.d1[i]));
            y.d2.push_back(ord2(i) ? bk.add(a.d2[i], b.d2[i]) : B::none());
        }
        return y;
    }

    Dual dsub(const Dual& a, const Dual& b) {
        Dual y;
        y.v = bk.sub(a.v, b.v);
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            y.d1.push_back(bk.sub(a.d1[i], b.d1[i]));
            y.d2.push_back(ord2(i) ? bk.sub(a.d2[i], b.d2[i]) : B::none());
        }
        return y;
    }

    /// Ws/Bs: hidden layers then output layer; enc: U then V (ModifiedMlp).
    Dual build(const Tensor& X, const Domain& dom, std::span<const V> Ws,
               std::span<const V> Bs, std::span<const V> encW,
               std::span<const V> encB) {
        const int L = cfg.hidden_layers;
        Dual in = input(X, dom);
        Dual h;

        switch (cfg.kind) {
            case ArchKind::Vanilla: {
                h = activate(affine(in, Ws[0], Bs[0]));
                layer_vals.push_back(h.v);
                for (int l = 1; l < L; ++l) {
                    h = activate(affine(h, Ws[static_cast<std::size_t>(l)],
                                        Bs[static_cast<std::size_t>(l)]));
                    layer_vals.push_back(h.v);
                }
                break;
            }
            case ArchKind::ResNet: {
                h = activate(affine(in, Ws[0], Bs[0]));
                layer_vals.push_back(h.v);
                for (int l = 1; l < L; ++l) {
                    Dual a = activate(affine(h, Ws[static_cast<std::size_t>(l)],
                                             Bs[static_cast<std::size_t>(l)]));
                    h = dadd(h, a);
                    layer_vals.push_back(h.v);
                }
                break;
            }
            case ArchKind::ModifiedMlp: {
                Dual U = activate(affine(in, encW[0], encB[0]));
                Dual Ve = activate(affine(in, encW[1], encB[1]));
                Dual D = dsub(Ve, U); // (1-Z)U + ZV == U + Z*(V-U)
                h = in;
                for (int l = 0; l < L; ++l) {
                    Dual Z = activate(affine(h, Ws[static_cast<std::size_t>(l)],
                                             Bs[static_cast<std::size_t>(l)]));
                    h = dadd(U, dmul(Z, D));
                    layer_vals.push_back(h.v);
                }
                break;
            }
            case ArchKind::Dm: {
                h = activate(affine(in, Ws[0], Bs[0]));
                layer_vals.push_back(h.v);
                Dual q = h; // running product; after layer 1, H1 == A1
                for (int l = 1; l < L; ++l) {
                    Dual a = activate(affine(h, Ws[static_cast<std::size_t>(l)],
                                             Bs[static_cast<std::size_t>(l)]));
                    Dual hn = dmul(a, q);
                    if (cfg.multiplier_mode == MultiplierMode::HiddenOutputs) {
                        q = dmul(q, hn);
                    } else {
                        // product of activations: Q_k = Q_{k-1}*A_k = H_k
                        q = hn;
                    }
                    h = hn;
                    layer_vals.push_back(h.v);
                }
                break;
            }
            case ArchKind::Sdm: {
                const int s = cfg.skip_stride;
                std::vector<std::optional<Dual>> prod(static_cast<std::size_t>(s));
                auto fold = [&](int layer, const Dual& c) {
                    auto& slot = prod[static_cast<std::size_t>(layer % s)];
                    slot = slot ? dmul(*slot, c) : c;
                };
                h = activate(affine(in, Ws[0], Bs[0]));
                layer_vals.push_back(h.v);
                fold(1, h); // H1 == A1 in either mode
                for (int l = 2; l <= L; ++l) {
                    const Dual& m = *prod[static_cast<std::size_t>((l - 1) % s)];
                    Dual a = activate(affine(h, Ws[static_cast<std::size_t>(l - 1)],
                                             Bs[static_cast<std::size_t>(l - 1)]));
                    Dual hn = dadd(h, dmul(a, m));
                    fold(l, cfg.multiplier_mode == MultiplierMode::HiddenOutputs
                                ? hn
                                : a);
                    h = hn;
                    layer_vals.push_back(h.v);
                }
                break;
            }
        }

        Dual out = affine(h, Ws[static_cast<std::size_t>(L)],
                          Bs[static_cast<std::size_t>(L)]);
        layer_vals.push_back(out.v);
        return out;
    }

    /// Locates the first layer with non-finite values (diagnosis on failure).
    [[noreturn]] void raise_divergence() {
        for (std::size_t i = 0; i < layer_vals.size(); ++i) {
            if (!bk.val(layer_vals[i]).all_finite()) {
                throw DivergenceError("non-finite values in forward pass at layer " +
                                          std::to_string(i + 1),
                                      static_cast<long>(i + 1));
            }
        }
        throw DivergenceError(
            "non-finite derivative channel in forward pass (values finite)", 0);
    }
};

void check_forward_args(const NetworkParams& p, const Tensor& X,
                        const Domain& dom) {
    if (X.shape().size() != 2 || X.shape()[1] != p.config.input_dim)
        throw ShapeError("forward: X must be [n, input_dim]");
    if (dom.bounds.size() != static_cast<std::size_t>(p.config.input_dim))
        throw ShapeError("forward: domain rank mismatch");
    const std::size_t want =
        static_cast<std::size_t>(p.config.hidden_layers) + 1 +
        (p.config.kind == ArchKind::ModifiedMlp ? 2 : 0);
    if (p.layers.size() + p.encoders.size() != want)
        throw ConfigError("forward: parameter list does not match config");
}

} // namespace

// ---- public entry points -------------------------------------------------

TapedNet::TapedNet(Tape& tape, const NetworkParams& params)
    : tape_(&tape), params_(&params) {
    validate(params.config);
    auto reg = [&](const Tensor& t) {
        param_ids_.push_back(tape_->leaf(t, true));
    };
    for (const auto& l : params.layers) {
        reg(l.W);
        reg(l.b);
    }
    for (const auto& l : params.encoders) {
        reg(l.W);
        reg(l.b);
    }
}

TapedForward TapedNet::run(const Tensor& X, const Domain& domain,
                           std::span<const DirSpec> dirs) {
    check_forward_args(*params_, X, domain);
    TapeBk bk{*tape_};
    Composer<TapeBk> comp{bk, params_->config, dirs, {}};

    const std::size_t L1 = params_->layers.size();
    std::vector<ValueId> Ws(L1), Bs(L1);
    for (std::size_t i = 0; i < L1; ++i) {
        Ws[i] = param_ids_[2 * i];
        Bs[i] = param_ids_[2 * i + 1];
    }
    std::vector<ValueId> eW, eB;
    for (std::size_t i = 0; i < params_->encoders.size(); ++i) {
        eW.push_back(param_ids_[2 * L1 + 2 * i]);
        eB.push_back(param_ids_[2 * L1 + 2 * i + 1]);
    }

    auto out = comp.build(X, domain, Ws, Bs, eW, eB);
    if (!tape_->value(out.v).all_finite()) comp.raise_divergence();

    TapedForward r;
    r.u = out.v;
    r.d1 = std::move(out.d1);
    r.d2 = std::move(out.d2);
    return r;
}

Tensor eval_forward(const NetworkParams& params, const Tensor& X,
                    const Domain& domain) {
    check_forward_args(params, X, domain);
    EvalBk bk;
    Composer<EvalBk> comp{bk, params.config, {}, {}};

    auto alias = [](const Tensor& t) {
        return std::shared_ptr<const Tensor>(&t, [](const Tensor*) {});
    };
    std::vector<EvalBk::V> Ws, Bs, eW, eB;
    for (const auto& l : params.layers) {
        Ws.push_back(alias(l.W));
        Bs.push_back(alias(l.b));
    }
    for (const auto& l : params.encoders) {
        eW.push_back(alias(l.W));
        eB.push_back(alias(l.b));
    }

    auto out = comp.build(X, domain, Ws, Bs, eW, eB);
    if (!out.v->all_finite()) comp.raise_divergence();
    return Tensor(*out.v);
}

} // namespace pinnlab
