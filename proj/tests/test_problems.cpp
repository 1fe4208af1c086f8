#include <doctest.h>

#include <cmath>
#include <vector>

#include "pinnlab/problems.hpp"
#include "pinnlab/tape.hpp"

using namespace pinnlab;

namespace {

ProblemConfig small_cfg(ProblemKind k) {
    ProblemConfig cfg;
    cfg.kind = k;
    cfg.n_interior = 64;
    cfg.n_initial = 16;
    cfg.n_boundary = 20;
    return cfg;
}

NetworkParams zero_net(const Problem& p) {
    NetworkConfig nc;
    nc.kind = ArchKind::Vanilla;
    nc.input_dim = 2;
    nc.hidden_layers = 2;
    nc.width = 8;
    auto params = init_network(nc, 1);
    for (auto& l : params.layers) {
        l.W.fill(0.0);
        l.b.fill(0.0);
    }
    (void)p;
    return params;
}

double scalar(Tape& t, ValueId id) {
    REQUIRE(id >= 0);
    const Tensor& v = t.value(id);
    REQUIRE(v.size() == 1);
    return v[0];
}

} // namespace

TEST_CASE("closed forms hit their pinned values") {
    CHECK(allen_cahn_ic(0.5) == 0.0);          // cos(pi/2) is exactly zero
    CHECK(allen_cahn_ic(0.0) == 0.0);
    CHECK(allen_cahn_ic(-1.0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(burgers_ic(1.0) == 0.0);             // sin(pi) is exactly zero
    CHECK(burgers_ic(-1.0) == 0.0);
    CHECK(burgers_ic(0.5) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(convection_ic(0.0) == 0.0);

    CHECK(helmholtz_exact(0.5, 0.125, 1, 4) == 1.0);
    const double q = helmholtz_source(0.5, 0.125, 1.0, 1, 4);
    CHECK(q == doctest::Approx(1.0 - 17.0 * kPi * kPi).epsilon(1e-14));
}

TEST_CASE("helmholtz source is consistent with the manufactured solution") {
    // r = u_xx + u_yy + k^2 u - q must vanish; with u = sin(a1 pi x) sin(a2
    // pi y) analytically u_xx+u_yy = -(a1^2+a2^2) pi^2 u, so q must equal
    // (k^2 - (a1^2+a2^2) pi^2) u up to roundoff.
    const double k = 1.0;
    const int a1 = 1, a2 = 4;
    const double factor = k * k - (a1 * a1 + a2 * a2) * kPi * kPi;
    double worst = 0.0;
    for (double x = -1.0; x <= 1.0; x += 0.125)
        for (double y = -1.0; y <= 1.0; y += 0.125) {
            const double r = factor * helmholtz_exact(x, y, a1, a2) -
                             helmholtz_source(x, y, k, a1, a2);
            worst = std::max(worst, std::abs(r));
        }
    CHECK(worst <= 1e-10);
}

TEST_CASE("convection exact solution is the traveling wave") {
    const double beta = 30.0;
    double worst = 0.0;
    for (double x = 0.0; x <= kTwoPi; x += 0.37)
        for (double t = 0.0; t <= 1.0; t += 0.11)
            worst = std::max(worst, std::abs(convection_exact(x, t, beta) -
                                             std::sin(x - beta * t)));
    CHECK(worst <= 1e-12);

    // Exact spatial periodicity at the domain edges, any t.
    for (double t = 0.0; t <= 1.0; t += 0.05)
        CHECK(convection_exact(0.0, t, beta) ==
              convection_exact(kTwoPi, t, beta));

    // t = 0 recovers the initial condition bitwise.
    for (double x = 0.1; x < kTwoPi; x += 0.7)
        CHECK(convection_exact(x, 0.0, beta) ==
              doctest::Approx(convection_ic(x)).epsilon(1e-15));
}

TEST_CASE("sample sets have the documented structure") {
    SUBCASE("allen_cahn pairs periodic boundary rows") {
        auto p = Problem::make(small_cfg(ProblemKind::AllenCahn));
        auto s = p->sample(4);
        CHECK(s.interior.shape()[0] == 64);
        CHECK(s.interior.shape()[1] == 2);
        CHECK(s.initial.shape()[0] == 16);
        REQUIRE(s.boundary_a.shape()[0] == 20);
        REQUIRE(s.boundary_b.shape()[0] == 20);
        for (std::int64_t i = 0; i < 20; ++i) {
            CHECK(s.boundary_a.at(i, 0) == -1.0);
            CHECK(s.boundary_b.at(i, 0) == 1.0);
            CHECK(s.boundary_a.at(i, 1) == s.boundary_b.at(i, 1));
        }
        for (std::int64_t i = 0; i < 16; ++i) {
            CHECK(s.initial.at(i, 1) == 0.0);
            CHECK(s.initial.at(i, 0) > -1.0);
            CHECK(s.initial.at(i, 0) < 1.0);
        }
        CHECK_FALSE(s.boundary.defined());
    }
    SUBCASE("convection pairs x=0 with x=2pi") {
        auto p = Problem::make(small_cfg(ProblemKind::Convection));
        auto s = p->sample(4);
        for (std::int64_t i = 0; i < 20; ++i) {
            CHECK(s.boundary_a.at(i, 0) == 0.0);
            CHECK(s.boundary_b.at(i, 0) == kTwoPi);
            CHECK(s.boundary_a.at(i, 1) == s.boundary_b.at(i, 1));
        }
    }
    SUBCASE("burgers stacks both Dirichlet walls") {
        auto p = Problem::make(small_cfg(ProblemKind::Burgers));
        auto s = p->sample(4);
        REQUIRE(s.boundary.shape()[0] == 40);
        for (std::int64_t i = 0; i < 40; ++i) {
            const double x = s.boundary.at(i, 0);
            CHECK((x == -1.0 || x == 1.0));
            CHECK(s.boundary.at(i, 1) > 0.0);
            CHECK(s.boundary.at(i, 1) <= 1.0);
        }
        CHECK_FALSE(s.boundary_a.defined());
    }
    SUBCASE("helmholtz covers all four edges, no initial set") {
        auto p = Problem::make(small_cfg(ProblemKind::Helmholtz));
        auto s = p->sample(4);
        CHECK_FALSE(s.initial.defined());
        REQUIRE(s.boundary.shape()[0] == 20);
        int on_edge[4] = {0, 0, 0, 0};
        for (std::int64_t i = 0; i < 20; ++i) {
            const double x = s.boundary.at(i, 0);
            const double y = s.boundary.at(i, 1);
            if (x == -1.0) on_edge[0]++;
            else if (x == 1.0) on_edge[1]++;
            else if (y == -1.0) on_edge[2]++;
            else if (y == 1.0) on_edge[3]++;
            else FAIL("boundary point off every edge");
        }
        for (int c : on_edge) CHECK(c == 5);
    }
    SUBCASE("sampling is seed-deterministic per problem") {
        auto p = Problem::make(small_cfg(ProblemKind::Burgers));
        auto s1 = p->sample(7);
        auto s2 = p->sample(7);
        auto s3 = p->sample(8);
        bool same = true, differs = false;
        for (std::int64_t i = 0; i < s1.interior.size(); ++i) {
            same = same && s1.interior[i] == s2.interior[i];
            differs = differs || s1.interior[i] != s3.interior[i];
        }
        CHECK(same);
        CHECK(differs);
    }
}

TEST_CASE("zero network isolates each loss term") {
    // With u == 0 every derivative vanishes, so residual and matching-type
    // boundary terms are exactly zero and the data terms reduce to means of
    // the squared targets, which we recompute by hand.
    SUBCASE("convection") {
        auto p = Problem::make(small_cfg(ProblemKind::Convection));
        auto params = zero_net(*p);
        auto s = p->sample(11);
        Tape tape;
        TapedNet net(tape, params);
        auto parts = p->losses(tape, net, s);

        CHECK(scalar(tape, parts.residual) == 0.0);
        CHECK(scalar(tape, parts.boundary) == 0.0);
        double acc = 0.0;
        for (std::int64_t i = 0; i < 16; ++i) {
            const double g = convection_ic(s.initial.at(i, 0));
            acc += g * g;
        }
        CHECK(scalar(tape, parts.initial) ==
              doctest::Approx(acc / 16.0).epsilon(1e-14));
    }
    SUBCASE("burgers") {
        auto p = Problem::make(small_cfg(ProblemKind::Burgers));
        auto params = zero_net(*p);
        auto s = p->sample(11);
        Tape tape;
        TapedNet net(tape, params);
        auto parts = p->losses(tape, net, s);
        CHECK(scalar(tape, parts.residual) == 0.0);
        CHECK(scalar(tape, parts.boundary) == 0.0);
        double acc = 0.0;
        for (std::int64_t i = 0; i < 16; ++i) {
            const double g = burgers_ic(s.initial.at(i, 0));
            acc += g * g;
        }
        CHECK(scalar(tape, parts.initial) ==
              doctest::Approx(acc / 16.0).epsilon(1e-14));
    }
    SUBCASE("allen_cahn with its loss weights") {
        auto cfg = small_cfg(ProblemKind::AllenCahn);
        cfg.w_initial = 100.0;
        auto p = Problem::make(cfg);
        auto params = zero_net(*p);
        auto s = p->sample(11);
        Tape tape;
        TapedNet net(tape, params);
        auto parts = p->losses(tape, net, s);

        CHECK(scalar(tape, parts.residual) == 0.0);
        CHECK(scalar(tape, parts.boundary) == 0.0);
        double acc = 0.0;
        for (std::int64_t i = 0; i < 16; ++i) {
            const double g = allen_cahn_ic(s.initial.at(i, 0));
            acc += g * g;
        }
        const double ic = scalar(tape, parts.initial);
        CHECK(ic == doctest::Approx(acc / 16.0).epsilon(1e-14));
        // Weighted decomposition holds exactly as computed.
        CHECK(scalar(tape, parts.total) == 100.0 * ic);
    }
    SUBCASE("helmholtz keeps the source term") {
        auto p = Problem::make(small_cfg(ProblemKind::Helmholtz));
        auto params = zero_net(*p);
        auto s = p->sample(11);
        Tape tape;
        TapedNet net(tape, params);
        auto parts = p->losses(tape, net, s);

        CHECK(parts.initial == -1);
        CHECK(scalar(tape, parts.boundary) == 0.0);
        double acc = 0.0;
        for (std::int64_t i = 0; i < 64; ++i) {
            const double q = helmholtz_source(s.interior.at(i, 0),
                                              s.interior.at(i, 1), 1.0, 1, 4);
            acc += q * q;
        }
        CHECK(scalar(tape, parts.residual) ==
              doctest::Approx(acc / 64.0).epsilon(1e-13));
        CHECK(scalar(tape, parts.total) ==
              doctest::Approx(scalar(tape, parts.residual) +
                              scalar(tape, parts.boundary))
                  .epsilon(1e-15));
    }
}

TEST_CASE("reference grids follow the row-major axis convention") {
    std::vector<double> xs{-0.75, 0.0, 0.5};
    std::vector<double> ys{-1.0, 0.25, 0.5, 1.0};
    auto p = Problem::make(small_cfg(ProblemKind::Helmholtz));
    Tensor R = p->reference_grid(xs, ys);
    REQUIRE(R.size() == 12);
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ys.size(); ++j)
            CHECK(R[i * ys.size() + j] ==
                  doctest::Approx(helmholtz_exact(xs[i], ys[j], 1, 4))
                      .epsilon(1e-15));

    std::vector<double> ts{0.0, 0.3, 1.0};
    auto pc = Problem::make(small_cfg(ProblemKind::Convection));
    Tensor Rc = pc->reference_grid(xs, ts); // xs reused as convection x
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ts.size(); ++j)
            CHECK(Rc[i * ts.size() + j] ==
                  convection_exact(xs[i], ts[j], 30.0));
}

TEST_CASE("problem names round-trip") {
    for (ProblemKind k : {ProblemKind::AllenCahn, ProblemKind::Helmholtz,
                          ProblemKind::Burgers, ProblemKind::Convection})
        CHECK(problem_from_name(problem_name(k)) == k);
    CHECK_THROWS(problem_from_name("poisson"));
}
