#include "pinnlab/problems.hpp"

#include <cmath>

#include "pinnlab/errors.hpp"
#include "pinnlab/math_util.hpp"
#include "pinnlab/references.hpp"
#include "pinnlab/rng.hpp"
#include "pinnlab/sampling.hpp"

namespace pinnlab {

const char* problem_name(ProblemKind k) {
    switch (k) {
        case ProblemKind::AllenCahn: return "allen_cahn";
        case ProblemKind::Helmholtz: return "helmholtz";
        case ProblemKind::Burgers: return "burgers";
        case ProblemKind::Convection: return "convection";
    }
    return "?";
}

ProblemKind problem_from_name(const std::string& s) {
    if (s == "allen_cahn") return ProblemKind::AllenCahn;
    if (s == "helmholtz") return ProblemKind::Helmholtz;
    if (s == "burgers") return ProblemKind::Burgers;
    if (s == "convection") return ProblemKind::Convection;
    throw ConfigError("unknown problem: " + s);
}

double allen_cahn_ic(double x) { return x * x * cospi(x); }
double burgers_ic(double x) { return -sinpi(x); }
double convection_ic(double x) { return std::sin(x); }

double convection_exact(double x, double t, double beta) {
    // Arg reduction keeps the periodic identity u(t,0) == u(t,2pi) exact.
    return std::sin(std::fmod(x, kTwoPi) - beta * t);
}

double helmholtz_exact(double x, double y, int a1, int a2) {
    return sinpi(a1 * x) * sinpi(a2 * y);
}

double helmholtz_source(double x, double y, double k, int a1, int a2) {
    const double c = k * k - kPi * kPi * (a1 * a1 + a2 * a2);
    return c * helmholtz_exact(x, y, a1, a2);
}

namespace {

// Sub-stream tags for per-set sampling seeds.
enum : std::uint64_t { kInterior = 0, kInitial = 1, kBoundary = 2 };

Tensor column_pair(const std::vector<double>& a, double b_fill, bool a_first) {
    const auto n = static_cast<std::int64_t>(a.size());
    Tensor X = Tensor::uninit({n, 2});
    for (std::int64_t i = 0; i < n; ++i) {
        const double v = a[static_cast<std::size_t>(i)];
        X.at(i, 0) = a_first ? v : b_fill;
        X.at(i, 1) = a_first ? b_fill : v;
    }
    return X;
}

Tensor apply_ic(const std::vector<double>& xs, double (*fn)(double)) {
    const auto n = static_cast<std::int64_t>(xs.size());
    Tensor g = Tensor::uninit({n, 1});
    for (std::int64_t i = 0; i < n; ++i)
        g[static_cast<std::size_t>(i)] = fn(xs[static_cast<std::size_t>(i)]);
    return g;
}

ValueId weighted_total(Tape& t, const ProblemConfig& cfg, ValueId r,
                       ValueId ic, ValueId bc) {
    ValueId total = t.scale(r, cfg.w_residual);
    if (ic >= 0) total = t.add(total, t.scale(ic, cfg.w_initial));
    if (bc >= 0) total = t.add(total, t.scale(bc, cfg.w_boundary));
    return total;
}

ValueId mean_sq(Tape& t, ValueId v) { return t.mean(t.square(v)); }

// ---- Allen-Cahn ----------------------------------------------------------

class AllenCahnProblem final : public Problem {
public:
    explicit AllenCahnProblem(const ProblemConfig& cfg) : Problem(cfg) {}
    const char* name() const override { return "allen_cahn"; }

    Domain domain() const override { return Domain{{{-1.0, 1.0}, {0.0, 1.0}}}; }

    std::vector<DirSpec> residual_dirs() const override {
        return {{0, 2}, {1, 1}}; // u_xx, u_t
    }

    SampleSets sample(std::uint64_t seed) const override {
        SampleSets s;
        s.interior =
            latin_hypercube(cfg_.n_interior, domain(), derive_seed(seed, kInterior));
        auto xs = lhs_1d(cfg_.n_initial, -1.0, 1.0, derive_seed(seed, kInitial));
        s.initial = column_pair(xs, 0.0, true);
        auto ts = lhs_1d(cfg_.n_boundary, 0.0, 1.0, derive_seed(seed, kBoundary));
        s.boundary_a = column_pair(ts, -1.0, false);
        s.boundary_b = column_pair(ts, 1.0, false);
        return s;
    }

    LossParts losses(Tape& t, TapedNet& net, const SampleSets& s) const override {
        const Domain dom = domain();
        const auto dirs = residual_dirs();
        auto in = net.run(s.interior, dom, dirs);
        ValueId u = in.u, uxx = in.d2[0], ut = in.d1[1];
        // r = u_t - d*u_xx + 5(u^3 - u)
        ValueId cube = t.mul(t.square(u), u);
        ValueId r = t.add(t.sub(ut, t.scale(uxx, cfg_.diffusivity)),
                          t.scale(t.sub(cube, u), 5.0));
        LossParts lp;
        lp.residual = mean_sq(t, r);

        auto ic = net.run(s.initial, dom, {});
        std::vector<double> xs(static_cast<std::size_t>(cfg_.n_initial));
        for (std::size_t i = 0; i < xs.size(); ++i)
            xs[i] = s.initial.at(static_cast<std::int64_t>(i), 0);
        ValueId g = t.leaf(apply_ic(xs, &allen_cahn_ic), false);
        lp.initial = mean_sq(t, t.sub(ic.u, g));

        // Periodic matching of value and x-derivative across x = -1 / +1.
        const DirSpec bdirs[] = {{0, 1}};
        auto bm = net.run(s.boundary_a, dom, bdirs);
        auto bp = net.run(s.boundary_b, dom, bdirs);
        lp.boundary = t.add(mean_sq(t, t.sub(bp.u, bm.u)),
                            mean_sq(t, t.sub(bp.d1[0], bm.d1[0])));

        lp.total = weighted_total(t, cfg_, lp.residual, lp.initial, lp.boundary);
        return lp;
    }

    Tensor reference_grid(const std::vector<double>& a0,
                          const std::vector<double>& a1) const override {
        AllenCahnReference::Options opts;
        opts.diffusivity = cfg_.diffusivity;
        return AllenCahnReference::solve_grid(a0, a1, opts);
    }
};

// ---- Helmholtz -----------------------------------------------------------

class HelmholtzProblem final : public Problem {
public:
    explicit HelmholtzProblem(const ProblemConfig& cfg) : Problem(cfg) {}
    const char* name() const override { return "helmholtz"; }

    Domain domain() const override { return Domain{{{-1.0, 1.0}, {-1.0, 1.0}}}; }

    std::vector<DirSpec> residual_dirs() const override {
        return {{0, 2}, {1, 2}};
    }

    SampleSets sample(std::uint64_t seed) const override {
        SampleSets s;
        s.interior =
            latin_hypercube(cfg_.n_interior, domain(), derive_seed(seed, kInterior));
        // Dirichlet boundary: distribute points over the four edges.
        const std::int64_t base = cfg_.n_boundary / 4;
        const std::int64_t rem = cfg_.n_boundary % 4;
        Tensor B = Tensor::uninit({cfg_.n_boundary, 2});
        std::int64_t row = 0;
        for (int e = 0; e < 4; ++e) {
            const std::int64_t ne = base + (e < rem ? 1 : 0);
            if (ne == 0) continue;
            auto free_coord =
                lhs_1d(ne, -1.0, 1.0, derive_seed(seed, kBoundary + static_cast<std::uint64_t>(e)));
            for (std::int64_t i = 0; i < ne; ++i, ++row) {
                const double f = free_coord[static_cast<std::size_t>(i)];
                switch (e) {
                    case 0: B.at(row, 0) = -1.0; B.at(row, 1) = f; break;
                    case 1: B.at(row, 0) = 1.0;  B.at(row, 1) = f; break;
                    case 2: B.at(row, 0) = f;    B.at(row, 1) = -1.0; break;
                    default: B.at(row, 0) = f;   B.at(row, 1) = 1.0; break;
                }
            }
        }
        s.boundary = std::move(B);
        return s;
    }

    LossParts losses(Tape& t, TapedNet& net, const SampleSets& s) const override {
        const Domain dom = domain();
        const auto dirs = residual_dirs();
        auto in = net.run(s.interior, dom, dirs);
        ValueId u = in.u, uxx = in.d2[0], uyy = in.d2[1];

        const auto n = s.interior.shape()[0];
        Tensor q = Tensor::uninit({n, 1});
        for (std::int64_t i = 0; i < n; ++i)
            q[static_cast<std::size_t>(i)] =
                helmholtz_source(s.interior.at(i, 0), s.interior.at(i, 1),
                                 cfg_.helm_k, cfg_.helm_a1, cfg_.helm_a2);
        ValueId qid = t.leaf(std::move(q), false);

        ValueId r = t.sub(
            t.add(t.add(uxx, uyy), t.scale(u, cfg_.helm_k * cfg_.helm_k)), qid);
        LossParts lp;
        lp.residual = mean_sq(t, r);

        auto b = net.run(s.boundary, dom, {});
        lp.boundary = mean_sq(t, b.u);

        lp.total = weighted_total(t, cfg_, lp.residual, -1, lp.boundary);
        return lp;
    }

    Tensor reference_grid(const std::vector<double>& a0,
                          const std::vector<double>& a1) const override {
        const auto n0 = static_cast<std::int64_t>(a0.size());
        const auto n1 = static_cast<std::int64_t>(a1.size());
        Tensor R = Tensor::uninit({n0 * n1, 1});
        for (std::int64_t i = 0; i < n0; ++i)
            for (std::int64_t j = 0; j < n1; ++j)
                R[static_cast<std::size_t>(i * n1 + j)] =
                    helmholtz_exact(a0[static_cast<std::size_t>(i)],
                                    a1[static_cast<std::size_t>(j)],
                                    cfg_.helm_a1, cfg_.helm_a2);
        return R;
    }
};

// ---- Burgers -------------------------------------------------------------

class BurgersProblem final : public Problem {
public:
    explicit BurgersProblem(const ProblemConfig& cfg) : Problem(cfg) {}
    const char* name() const override { return "burgers"; }

    Domain domain() const override { return Domain{{{-1.0, 1.0}, {0.0, 1.0}}}; }

    std::vector<DirSpec> residual_dirs() const override {
        return {{0, 2}, {1, 1}};
    }

    SampleSets sample(std::uint64_t seed) const override {
        SampleSets s;
        s.interior =
            latin_hypercube(cfg_.n_interior, domain(), derive_seed(seed, kInterior));
        auto xs = lhs_1d(cfg_.n_initial, -1.0, 1.0, derive_seed(seed, kInitial));
        s.initial = column_pair(xs, 0.0, true);
        // Dirichlet u=0 at both ends, sampled at shared times.
        auto ts = lhs_1d(cfg_.n_boundary, 0.0, 1.0, derive_seed(seed, kBoundary));
        Tensor B = Tensor::uninit({2 * cfg_.n_boundary, 2});
        for (std::int64_t i = 0; i < cfg_.n_boundary; ++i) {
            B.at(i, 0) = -1.0;
            B.at(i, 1) = ts[static_cast<std::size_t>(i)];
            B.at(cfg_.n_boundary + i, 0) = 1.0;
            B.at(cfg_.n_boundary + i, 1) = ts[static_cast<std::size_t>(i)];
        }
        s.boundary = std::move(B);
        return s;
    }

    LossParts losses(Tape& t, TapedNet& net, const SampleSets& s) const override {
        const Domain dom = domain();
        const auto dirs = residual_dirs();
        auto in = net.run(s.interior, dom, dirs);
        ValueId u = in.u, ux = in.d1[0], uxx = in.d2[0], ut = in.d1[1];
        // r = u_t + u*u_x - nu*u_xx
        ValueId r =
            t.sub(t.add(ut, t.mul(u, ux)), t.scale(uxx, cfg_.viscosity));
        LossParts lp;
        lp.residual = mean_sq(t, r);

        auto ic = net.run(s.initial, dom, {});
        std::vector<double> xs(static_cast<std::size_t>(cfg_.n_initial));
        for (std::size_t i = 0; i < xs.size(); ++i)
            xs[i] = s.initial.at(static_cast<std::int64_t>(i), 0);
        ValueId g = t.leaf(apply_ic(xs, &burgers_ic), false);
        lp.initial = mean_sq(t, t.sub(ic.u, g));

        auto b = net.run(s.boundary, dom, {});
        lp.boundary = mean_sq(t, b.u);

        lp.total = weighted_total(t, cfg_, lp.residual, lp.initial, lp.boundary);
        return lp;
    }

    Tensor reference_grid(const std::vector<double>& a0,
                          const std::vector<double>& a1) const override {
        BurgersReference ref(cfg_.viscosity);
        return ref.grid(a0, a1);
    }
};

// ---- Convection ----------------------------------------------------------

class ConvectionProblem final : public Problem {
public:
    explicit ConvectionProblem(const ProblemConfig& cfg) : Problem(cfg) {}
    const char* name() const override { return "convection"; }

    Domain domain() const override { return Domain{{{0.0, kTwoPi}, {0.0, 1.0}}}; }

    std::vector<DirSpec> residual_dirs() const override {
        return {{0, 1}, {1, 1}};
    }

    SampleSets sample(std::uint64_t seed) const override {
        SampleSets s;
        s.interior =
            latin_hypercube(cfg_.n_interior, domain(), derive_seed(seed, kInterior));
        auto xs = lhs_1d(cfg_.n_initial, 0.0, kTwoPi, derive_seed(seed, kInitial));
        s.initial = column_pair(xs, 0.0, true);
        auto ts = lhs_1d(cfg_.n_boundary, 0.0, 1.0, derive_seed(seed, kBoundary));
        s.boundary_a = column_pair(ts, 0.0, false);
        s.boundary_b = column_pair(ts, kTwoPi, false);
        return s;
    }

    LossParts losses(Tape& t, TapedNet& net, const SampleSets& s) const override {
        const Domain dom = domain();
        const auto dirs = residual_dirs();
        auto in = net.run(s.interior, dom, dirs);
        ValueId r = t.add(in.d1[1], t.scale(in.d1[0], cfg_.beta));
        LossParts lp;
        lp.residual = mean_sq(t, r);

        auto ic = net.run(s.initial, dom, {});
        std::vector<double> xs(static_cast<std::size_t>(cfg_.n_initial));
        for (std::size_t i = 0; i < xs.size(); ++i)
            xs[i] = s.initial.at(static_cast<std::int64_t>(i), 0);
        ValueId g = t.leaf(apply_ic(xs, &convection_ic), false);
        lp.initial = mean_sq(t, t.sub(ic.u, g));

        // Periodic value matching across x = 0 / 2pi.
        auto ba = net.run(s.boundary_a, dom, {});
        auto bb = net.run(s.boundary_b, dom, {});
        lp.boundary = mean_sq(t, t.sub(bb.u, ba.u));

        lp.total = weighted_total(t, cfg_, lp.residual, lp.initial, lp.boundary);
        return lp;
    }

    Tensor reference_grid(const std::vector<double>& a0,
                          const std::vector<double>& a1) const override {
        const auto n0 = static_cast<std::int64_t>(a0.size());
        const auto n1 = static_cast<std::int64_t>(a1.size());
        Tensor R = Tensor::uninit({n0 * n1, 1});
        for (std::int64_t i = 0; i < n0; ++i)
            for (std::int64_t j = 0; j < n1; ++j)
                R[static_cast<std::size_t>(i * n1 + j)] =
                    convection_exact(a0[static_cast<std::size_t>(i)],
                                     a1[static_cast<std::size_t>(j)], cfg_.beta);
        return R;
    }
};

} // namespace

std::unique_ptr<Problem> Problem::make(const ProblemConfig& cfg) {
    if (cfg.n_interior < 1) throw ConfigError("n_interior must be >= 1");
    switch (cfg.kind) {
        case ProblemKind::AllenCahn:
            return std::make_unique<AllenCahnProblem>(cfg);
        case ProblemKind::Helmholtz:
            return std::make_unique<HelmholtzProblem>(cfg);
        case ProblemKind::Burgers:
            return std::make_unique<BurgersProblem>(cfg);
        case ProblemKind::Convection:
            return std::make_unique<ConvectionProblem>(cfg);
    }
    throw ConfigError("unknown problem kind");
}

} // namespace pinnlab
