#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "smrm/convkernel.hpp"
#include "smrm/direct.hpp"
#include "smrm/errors.hpp"
#include "smrm/iterative.hpp"
#include "smrm/model.hpp"
#include "smrm/reproduce.hpp"

using namespace smrm;

namespace {

Vec random_pmf(std::mt19937_64& gen, std::size_t k) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vec v(k);
    double sum = 0.0;
    for (auto& x : v) sum += (x = u(gen));
    for (auto& x : v) x /= sum;
    return v;
}

// random conforming system: substochastic A with strictly positive goal mass
ReachabilitySystem random_system(std::mt19937_64& gen, std::size_t m, std::size_t k,
                                 std::size_t support) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ReachabilitySystem sys;
    sys.k = k;
    sys.a.assign(m * m, 0.0);
    sys.g = Hypermatrix(k, m, m);
    sys.h = Hypervector(k, m);
    sys.h_prob_weight.assign(m, 0.0);
    sys.g_tail_mass.assign(m * m, 0.0);
    sys.h_tail_mass.assign(m, 0.0);
    sys.reach_prob_one = true;
    for (std::size_t s = 0; s < m; ++s) sys.s_question.push_back("s" + std::to_string(s));
    sys.s_index.resize(m);
    for (std::size_t i = 0; i < m; ++i) sys.s_index[i] = i;

    for (std::size_t i = 0; i < m; ++i) {
        Vec row(m + 1);
        double sum = 0.0;
        for (auto& x : row) sum += (x = u(gen) + 0.01);
        for (auto& x : row) x /= sum;
        for (std::size_t j = 0; j < m; ++j) {
            sys.a[i * m + j] = row[j];
            Vec pmf = random_pmf(gen, support);
            pmf.resize(k, 0.0);
            sys.g.set_slice(i, j, pmf);
        }
        Vec pmf = random_pmf(gen, support);
        pmf.resize(k, 0.0);
        for (auto& x : pmf) x *= row[m];
        sys.h.set_row(i, pmf);
        sys.h_prob_weight[i] = row[m];
    }
    return sys;
}

double max_abs_diff(const Vec& a, const Vec& b) {
    double res = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) res = std::max(res, std::abs(a[i] - b[i]));
    return res;
}

double max_abs_diff(const Hypervector& a, const Hypervector& b) { return a.max_abs_diff(b); }

} // namespace

TEST_CASE("gauss_reduce") {
    SUBCASE("1x1 system is unchanged") {
        Hypermatrix acal(4, 1, 1);
        acal.set_slice(0, 0, {1.0, -0.2, -0.1, 0.0});
        Hypervector h(4, 1);
        h.set_row(0, {0.5, 0.25, 0.0, 0.0});
        const Hypermatrix before = acal;
        const Hypervector hb = h;
        gauss_reduce(acal, h);
        for (std::size_t r = 0; r < 4; ++r) {
            CHECK(acal.slice(0, 0)[r] == before.slice(0, 0)[r]);
            CHECK(h.row(0)[r] == hb.row(0)[r]);
        }
    }
    SUBCASE("2x2 elimination zeroes the lower-left slice") {
        // rows: a f0 + b f1 = h0; c f0 + d f1 = h1
        const std::size_t k = 6;
        Hypermatrix acal(k, 2, 2);
        Hypervector h(k, 2);
        const Vec a{1.0, -0.1, -0.05, 0.0, 0.0, 0.0};
        const Vec b{-0.3, -0.1, 0.0, 0.0, 0.0, 0.0};
        const Vec c{-0.2, -0.15, 0.0, 0.0, 0.0, 0.0};
        const Vec d{1.0, -0.25, 0.0, 0.0, 0.0, 0.0};
        acal.set_slice(0, 0, a);
        acal.set_slice(0, 1, b);
        acal.set_slice(1, 0, c);
        acal.set_slice(1, 1, d);
        h.set_row(0, {0.4, 0.1, 0.0, 0.0, 0.0, 0.0});
        h.set_row(1, {0.3, 0.2, 0.0, 0.0, 0.0, 0.0});
        const Vec h0 = h.row_vec(0);
        const Vec h1 = h.row_vec(1);

        gauss_reduce(acal, h);
        for (std::size_t r = 0; r < k; ++r) CHECK(acal.slice(1, 0)[r] == 0.0);

        const Vec sigma = deconv_k(c, a, k);
        const Vec d_expect = [&] {
            Vec v = d;
            const Vec cb = conv_k(b, sigma, k);
            for (std::size_t r = 0; r < k; ++r) v[r] -= cb[r];
            return v;
        }();
        const Vec h1_expect = [&] {
            Vec v = h1;
            const Vec ch = conv_k(h0, sigma, k);
            for (std::size_t r = 0; r < k; ++r) v[r] -= ch[r];
            return v;
        }();
        CHECK(max_abs_diff(acal.slice_vec(1, 1), d_expect) <= 1e-14);
        CHECK(max_abs_diff(h.row_vec(1), h1_expect) <= 1e-14);
    }
    SUBCASE("zeroth slice follows scalar gaussian elimination") {
        std::mt19937_64 gen(3);
        const auto sys = random_system(gen, 3, 16, 8);
        Hypermatrix acal = build_acal(sys);
        // scalar elimination on the zeroth-value matrix
        double a0[3][3];
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) a0[i][j] = acal.slice(i, j)[0];
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t i = j + 1; i < 3; ++i) {
                const double factor = a0[i][j] / a0[j][j];
                for (std::size_t l = j; l < 3; ++l) a0[i][l] -= factor * a0[j][l];
            }
        Hypervector h = sys.h;
        gauss_reduce(acal, h);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                CHECK(acal.slice(i, j)[0] == doctest::Approx(a0[i][j]).epsilon(1e-12));
        // pivots stay away from zero
        for (std::size_t l = 0; l < 3; ++l) CHECK(std::abs(acal.slice(l, l)[0]) > 1e-8);
    }
}

TEST_CASE("back_substitute") {
    SUBCASE("diagonal delta system returns h") {
        const std::size_t k = 5;
        Hypermatrix upper(k, 2, 2);
        upper.set_slice(0, 0, delta_vec(k));
        upper.set_slice(1, 1, delta_vec(k));
        Hypervector h(k, 2);
        h.set_row(0, {0.1, 0.2, 0.3, 0.0, 0.0});
        h.set_row(1, {0.4, 0.0, 0.0, 0.1, 0.0});
        const auto f = back_substitute(upper, h);
        CHECK(max_abs_diff(f, h) <= 1e-15);
    }
    SUBCASE("2x2 worked example") {
        const std::size_t k = 8;
        std::mt19937_64 gen(5);
        const Vec a = [&] {
            Vec v = random_pmf(gen, k);
            v[0] += 1.0;
            return v;
        }();
        const Vec b = random_pmf(gen, k);
        const Vec d = [&] {
            Vec v = random_pmf(gen, k);
            v[0] += 1.0;
            return v;
        }();
        Hypermatrix upper(k, 2, 2);
        upper.set_slice(0, 0, a);
        upper.set_slice(0, 1, b);
        upper.set_slice(1, 1, d);
        Hypervector h(k, 2);
        const Vec h0 = random_pmf(gen, k);
        const Vec h1 = random_pmf(gen, k);
        h.set_row(0, h0);
        h.set_row(1, h1);

        const auto f = back_substitute(upper, h);
        const Vec f1 = deconv_k(h1, d, k);
        Vec rhs = h0;
        const Vec c = conv_k(b, f1, k);
        for (std::size_t r = 0; r < k; ++r) rhs[r] -= c[r];
        const Vec f0 = deconv_k(rhs, a, k);
        CHECK(max_abs_diff(f.row_vec(1), f1) <= 1e-12);
        CHECK(max_abs_diff(f.row_vec(0), f0) <= 1e-12);
    }
    SUBCASE("one-state self-loop agrees with the power method") {
        // f = deconv(h, delta - p*G)
        Smrm m;
        m.states = {"s", "goal"};
        m.transition_probs = {{0.5, 0.5}, {0.0, 1.0}};
        m.rewards[{0, 0}] = ExplicitLattice{{0.0, 1.0}};
        m.rewards[{0, 1}] = ExplicitLattice{{0.0, 1.0}};
        m.rewards[{1, 1}] = DiracZero{};
        m.target_set = {1};
        const auto sys = preprocess(m, 32);
        const auto ge = solve_ge(sys);
        IterationConfig cfg;
        cfg.epsilon = 1e-14;
        const auto power = solve_power_exact(sys, cfg);
        CHECK(max_abs_diff(ge.solution, power.solution) <= 1e-9);
    }
}

TEST_CASE("solve_ge") {
    SUBCASE("h-only chain returns the reward pmf") {
        Smrm m;
        m.states = {"s0", "goal"};
        m.transition_probs = {{0.0, 1.0}, {0.0, 1.0}};
        m.rewards[{0, 1}] = Geometric{0.5};
        m.rewards[{1, 1}] = DiracZero{};
        m.target_set = {1};
        const auto sys = preprocess(m, 16);
        const auto report = solve_ge(sys);
        CHECK(report.termination == Termination::Direct);
        CHECK(report.iterations == 0);
        const auto pmf = density_of(Geometric{0.5}, 16);
        CHECK(max_abs_diff(report.solution.row_vec(0), pmf) <= 1e-12);
    }
    SUBCASE("toy model matches the exact power method") {
        const auto sys = preprocess(toy_model(), 150);
        const auto ge = solve_ge(sys);
        IterationConfig cfg;
        cfg.epsilon = 1e-16;
        cfg.max_iterations = 5000;
        const auto power = solve_power_exact(sys, cfg);
        CHECK(power.termination == Termination::Converged);
        CHECK(max_abs_diff(ge.solution, power.solution) <= 1e-7);
    }
    SUBCASE("3-state random model matches path enumeration") {
        std::mt19937_64 gen(11);
        Smrm m;
        m.states = {"a", "b", "c", "goal"};
        m.transition_probs.assign(4, Vec(4, 0.0));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (std::size_t i = 0; i < 3; ++i) {
            Vec row(4);
            double sum = 0.0;
            for (auto& x : row) sum += (x = u(gen) + 0.05);
            for (std::size_t j = 0; j < 4; ++j) m.transition_probs[i][j] = row[j] / sum;
            for (std::size_t j = 0; j < 4; ++j) {
                Vec pmf = random_pmf(gen, 8);
                m.rewards[{i, j}] = ExplicitLattice{pmf};
            }
        }
        m.transition_probs[3][3] = 1.0;
        m.rewards[{3, 3}] = DiracZero{};
        m.target_set = {3};

        const std::size_t k = 48;
        const auto sys = preprocess(m, k);
        const auto ge = solve_ge(sys);

        oracles::PathEnumerator oracle(m, k);
        for (std::size_t i = 0; i < 3; ++i) {
            const auto expect = oracle.unbounded(i, 1e-10);
            CHECK(max_abs_diff(ge.solution.row_vec(i), expect) <= 1e-8);
        }
    }
    SUBCASE("residual stays below the default tolerance") {
        std::mt19937_64 gen(13);
        const auto sys = random_system(gen, 4, 64, 16);
        const auto report = solve_ge(sys);
        CHECK(report.residual <= 1e-6);
    }
    SUBCASE("solution set preserved under row convolution") {
        std::mt19937_64 gen(17);
        const auto sys = random_system(gen, 3, 32, 8);
        const auto base = solve_ge(sys);

        Hypermatrix acal = build_acal(sys);
        Hypervector h = sys.h;
        const Vec mult{0.5, 0.3, 0.2};
        for (std::size_t j = 0; j < 3; ++j)
            acal.set_slice(1, j, conv_k(acal.slice_vec(1, j), mult, sys.k));
        h.set_row(1, conv_k(h.row_vec(1), mult, sys.k));
        gauss_reduce(acal, h);
        const auto f = back_substitute(acal, h);
        CHECK(max_abs_diff(f, base.solution) <= 1e-8);
    }
}

TEST_CASE("solve_lu_approx") {
    SUBCASE("acyclic one-state system is exact at zero padding") {
        Smrm m;
        m.states = {"s0", "goal"};
        m.transition_probs = {{0.0, 1.0}, {0.0, 1.0}};
        m.rewards[{0, 1}] = Binomial{6, 0.4};
        m.rewards[{1, 1}] = DiracZero{};
        m.target_set = {1};
        const auto sys = preprocess(m, 16);
        const auto report = solve_lu_approx(sys, 0);
        const auto pmf = density_of(Binomial{6, 0.4}, 16);
        CHECK(max_abs_diff(report.solution.row_vec(0), pmf) <= 1e-12);
    }
    SUBCASE("error against elimination shrinks with padding on the toy model") {
        const auto sys = preprocess(toy_model(), 150);
        const auto ge = solve_ge(sys);
        const auto lu_short = solve_lu_approx(sys, 450);   // total length 600
        const auto lu_long = solve_lu_approx(sys, 2100);   // total length 2250
        const double err_short = max_abs_diff(lu_short.solution, ge.solution);
        const double err_long = max_abs_diff(lu_long.solution, ge.solution);
        CHECK(err_long <= err_short);
        CHECK(err_long < 1e-3);
    }
    SUBCASE("large padding reproduces elimination on a short dag") {
        // a -> b -> c -> goal, longest path 3 edges
        Smrm m;
        m.states = {"a", "b", "c", "goal"};
        m.transition_probs = {{0.0, 1.0, 0.0, 0.0},
                              {0.0, 0.0, 1.0, 0.0},
                              {0.0, 0.0, 0.0, 1.0},
                              {0.0, 0.0, 0.0, 1.0}};
        std::mt19937_64 gen(19);
        m.rewards[{0, 1}] = ExplicitLattice{random_pmf(gen, 16)};
        m.rewards[{1, 2}] = ExplicitLattice{random_pmf(gen, 16)};
        m.rewards[{2, 3}] = ExplicitLattice{random_pmf(gen, 16)};
        m.rewards[{3, 3}] = DiracZero{};
        m.target_set = {3};
        const std::size_t k = 16;
        const auto sys = preprocess(m, k);
        const auto ge = solve_ge(sys);
        const auto lu = solve_lu_approx(sys, 2 * k); // covers the 3-edge convolution length
        CHECK(max_abs_diff(lu.solution, ge.solution) <= 1e-9);
    }
    SUBCASE("singular slice is reported with its frequency") {
        // two states exchanging all mass with zero-reward loops leave
        // I - A o C singular at every frequency
        ReachabilitySystem sys;
        const std::size_t k = 4;
        sys.k = k;
        sys.s_question = {"x", "y"};
        sys.s_index = {0, 1};
        sys.a = {0.0, 1.0, 1.0, 0.0};
        sys.g = Hypermatrix(k, 2, 2);
        sys.g.set_slice(0, 1, delta_vec(k));
        sys.g.set_slice(1, 0, delta_vec(k));
        sys.h = Hypervector(k, 2);
        sys.h_prob_weight.assign(2, 0.0);
        sys.g_tail_mass.assign(4, 0.0);
        sys.h_tail_mass.assign(2, 0.0);
        CHECK_THROWS_AS(solve_lu_approx(sys, 0), SingularSliceMatrix);
        try {
            solve_lu_approx(sys, 0);
        } catch (const SingularSliceMatrix& e) {
            CHECK(e.tau == 0);
        }
    }
}
