#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "smrm/benchgen.hpp"
#include "smrm/modelfile.hpp"
#include "smrm/errors.hpp"
#include "smrm/iterative.hpp"
#include "smrm/reproduce.hpp"

using namespace smrm;

TEST_CASE("rng determinism") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c(42), d(43);
    CHECK(c.next_u64() != d.next_u64());
    Rng base(7);
    Rng s1 = base.split(1), s2 = base.split(2);
    CHECK(s1.next_u64() != s2.next_u64());
}

TEST_CASE("gen_mc_uniform") {
    Rng rng(1234);
    const auto chain = gen_mc_uniform(8, rng);
    REQUIRE(chain.a.size() == 8);
    REQUIRE(chain.b.size() == 8);
    SUBCASE("rows sum to one") {
        for (std::size_t i = 0; i < 8; ++i) {
            double sum = chain.b[i];
            for (double v : chain.a[i]) sum += v;
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("entries are probabilities above the offset floor") {
        for (const auto& row : chain.p)
            for (double v : row) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
    }
    SUBCASE("fixed seed reproduces the frozen regression vector") {
        Rng r2(99);
        const auto c2 = gen_mc_uniform(3, r2);
        // frozen from this generator's reference run
        const Vec expect_row0 = {0.16689768455894041, 0.069037729209915646, 0.4185147542902064};
        const Vec expect_b = {0.34554983194093752, 0.36268446711876218, 0.31840118268208967};
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(c2.a[0][j] == doctest::Approx(expect_row0[j]).epsilon(1e-15));
            CHECK(c2.b[j] == doctest::Approx(expect_b[j]).epsilon(1e-15));
        }
    }
}

TEST_CASE("gen_mc_block") {
    Rng rng(5678);
    const auto chain = gen_mc_block(12, rng);
    SUBCASE("columns of the combined matrix are normalized or zero") {
        const std::size_t rows = chain.p.size();
        const std::size_t cols = chain.p[0].size();
        for (std::size_t c = 0; c < cols; ++c) {
            double sum = 0.0;
            for (std::size_t r = 0; r < rows; ++r) sum += chain.p[r][c];
            CHECK((sum == 0.0 || std::abs(sum - 1.0) <= 1e-9));
        }
    }
    SUBCASE("entries stay in [0,1]") {
        for (const auto& row : chain.p)
            for (double v : row) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0 + 1e-12);
            }
    }
    SUBCASE("fixed seed reproduces the frozen regression vector") {
        Rng r2(2001);
        const auto c2 = gen_mc_block(16, r2);
        const Vec expect_row1 = {0.13636363636363635, 0.10000000000000001, 0.050000000000000003,
                                 0.125, 0.055555555555555552, 0.041666666666666664,
                                 0.090909090909090912, 0.055555555555555552};
        for (std::size_t j = 0; j < expect_row1.size(); ++j)
            CHECK(c2.a[1][j] == doctest::Approx(expect_row1[j]).epsilon(1e-15));
        double total = 0.0;
        for (const auto& row : c2.p)
            for (double v : row) total += v;
        CHECK(total == doctest::Approx(15.999999999999979).epsilon(1e-12));
    }
}

TEST_CASE("gen_mc_npass") {
    Rng rng(777);
    const auto chain = gen_mc_npass(10, rng);
    SUBCASE("row sums never exceed one") {
        for (std::size_t i = 0; i < 10; ++i) {
            double sum = chain.b[i];
            for (double v : chain.a[i]) sum += v;
            CHECK(sum <= 1.0 + 1e-9);
        }
    }
    SUBCASE("at least one state reaches the goal directly") {
        double direct = 0.0;
        for (double v : chain.b) direct += v;
        CHECK(direct > 0.0);
    }
    SUBCASE("fixed seed reproduces the frozen regression vector") {
        Rng r2(2001);
        const auto c2 = gen_mc_npass(8, r2);
        const Vec expect_row0 = {0.009470737222849638, 0.00022975424660260486,
                                 2.6112461861210647e-05, 0.090863594379954005,
                                 0.0039021622146987486, 0.00075925775390796812,
                                 0.010223598623273683, 0.88452478309685212};
        for (std::size_t j = 0; j < 8; ++j)
            CHECK(c2.a[0][j] == doctest::Approx(expect_row0[j]).epsilon(1e-15));
        CHECK(c2.b[7] == doctest::Approx(0.68224511194419979).epsilon(1e-15));
    }
}

TEST_CASE("gen_mc_sparse") {
    SUBCASE("near-10% fill at 100 states") {
        Rng rng(2024);
        const auto chain = gen_mc_sparse(100, rng);
        std::size_t nonzero = 0, total = 0;
        for (const auto& row : chain.p)
            for (double v : row) {
                ++total;
                nonzero += v != 0.0;
            }
        const double frac = static_cast<double>(nonzero) / static_cast<double>(total);
        CHECK(frac >= 0.07);
        CHECK(frac <= 0.13);
    }
    SUBCASE("rows normalized or entirely zero") {
        Rng rng(11);
        const auto chain = gen_mc_sparse(40, rng);
        for (std::size_t i = 0; i < 40; ++i) {
            double sum = chain.b[i];
            for (double v : chain.a[i]) sum += v;
            CHECK((std::abs(sum - 1.0) <= 1e-9 || sum <= 1.0 + 1e-9));
        }
    }
    SUBCASE("fixed seed reproduces the frozen regression vector") {
        Rng r2(2001);
        const auto c2 = gen_mc_sparse(16, r2);
        CHECK(c2.a[2][1] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(c2.b[0] == doctest::Approx(0.23279843521860769).epsilon(1e-15));
        CHECK(c2.b[6] == doctest::Approx(0.63486750160618011).epsilon(1e-15));
        double total = 0.0;
        for (const auto& row : c2.p)
            for (double v : row) total += v;
        CHECK(total == doctest::Approx(16.0).epsilon(1e-12));
    }
}

TEST_CASE("system_from_chain produces solvable systems") {
    Rng rng(31337);
    const auto chain = gen_mc_uniform(6, rng);
    const auto sys = system_from_chain(chain, 128, "geometric", 0.3, 0.6, rng);
    IterationConfig cfg;
    const auto report = solve_power_exact(sys, cfg);
    CHECK(report.termination == Termination::Converged);
    for (std::size_t s = 0; s < sys.size(); ++s) {
        double mass = 0.0;
        for (std::size_t r = 0; r < sys.k; ++r) {
            CHECK(report.solution.row(s)[r] >= -1e-12);
            mass += report.solution.row(s)[r];
        }
        CHECK(mass <= 1.0 + 1e-9);
    }
}

TEST_CASE("sample_reward") {
    Rng rng(4242);
    SUBCASE("exponential matches its mean") {
        double acc = 0.0;
        const int n = 20000;
        for (int i = 0; i < n; ++i) acc += sample_reward(Exponential{2.0}, rng);
        CHECK(acc / n == doctest::Approx(0.5).epsilon(0.05));
    }
    SUBCASE("lattice draws stay on support and match the mean") {
        double acc = 0.0;
        const int n = 20000;
        for (int i = 0; i < n; ++i) {
            const double v = sample_reward(Binomial{20, 0.3}, rng);
            CHECK(v >= 0.0);
            CHECK(v <= 20.0);
            acc += v;
        }
        CHECK(acc / n == doctest::Approx(6.0).epsilon(0.05));
    }
    SUBCASE("uniform mixture stays within its pieces") {
        const UniformMixture mix{{{0.5, 1.0, 2.0}, {0.5, 5.0, 6.0}}};
        for (int i = 0; i < 200; ++i) {
            const double v = sample_reward(mix, rng);
            CHECK(((v >= 1.0 && v < 2.0) || (v >= 5.0 && v < 6.0)));
        }
    }
}

TEST_CASE("sample_traces") {
    SUBCASE("start inside the target yields an empty trace") {
        const auto m = toy_model();
        Rng rng(5);
        const auto traces = sample_traces(m, 4, 10, 1e9, rng);
        for (const auto& t : traces) {
            CHECK(t.path.empty());
            CHECK(t.cumulated_reward == 0.0);
            CHECK(t.terminated_by == Trace::End::ReachedGoal);
        }
    }
    SUBCASE("deterministic chain accumulates the exact sum") {
        Smrm m;
        m.states = {"a", "b", "goal"};
        m.transition_probs = {{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}};
        m.rewards[{0, 1}] = ExplicitLattice{{0.0, 0.0, 1.0}}; // reward 2
        m.rewards[{1, 2}] = ExplicitLattice{{0.0, 0.0, 0.0, 1.0}}; // reward 3
        m.rewards[{2, 2}] = DiracZero{};
        m.target_set = {2};
        Rng rng(6);
        const auto traces = sample_traces(m, 0, 5, 1e9, rng);
        for (const auto& t : traces) {
            CHECK(t.cumulated_reward == 5.0);
            CHECK(t.path.size() == 2);
        }
    }
    SUBCASE("fixed seed reproduces") {
        const auto m = toy_model();
        Rng r1(77), r2(77);
        const auto t1 = sample_traces(m, 0, 50, 150.0, r1);
        const auto t2 = sample_traces(m, 0, 50, 150.0, r2);
        REQUIRE(t1.size() == t2.size());
        for (std::size_t i = 0; i < t1.size(); ++i)
            CHECK(t1[i].cumulated_reward == t2[i].cumulated_reward);
    }
    SUBCASE("bound-terminated traces are flagged") {
        const auto m = toy_model();
        Rng rng(13);
        const auto traces = sample_traces(m, 0, 200, 120.0, rng);
        bool saw_bound = false;
        for (const auto& t : traces) {
            if (t.terminated_by == Trace::End::RewardBound) {
                saw_bound = true;
                CHECK(t.cumulated_reward >= 120.0);
            }
        }
        CHECK(saw_bound); // two hops of mean 50 regularly cross 120
    }
}

TEST_CASE("generated chains serialize through the model format") {
    Rng rng(909);
    const auto chain = gen_mc_uniform(5, rng);
    const auto model = smrm_from_chain(chain, "geometric", 0.3, 0.6, rng);
    CHECK(validate(model).empty());

    std::ostringstream out;
    write_model(out, model);
    std::istringstream in(out.str());
    const auto back = parse_model(in);
    CHECK(back.states == model.states);
    for (std::size_t s = 0; s < model.num_states(); ++s)
        for (std::size_t t = 0; t < model.num_states(); ++t)
            CHECK(back.prob(s, t) == model.prob(s, t));
}

TEST_CASE("traces dump as csv") {
    Smrm m;
    m.states = {"a", "goal"};
    m.transition_probs = {{0.0, 1.0}, {0.0, 1.0}};
    m.rewards[{0, 1}] = ExplicitLattice{{0.0, 1.0}};
    m.rewards[{1, 1}] = DiracZero{};
    m.target_set = {1};
    Rng rng(3);
    const auto traces = sample_traces(m, 0, 2, 100.0, rng);
    std::ostringstream out;
    write_traces_csv(out, traces, m.states);
    const std::string text = out.str();
    CHECK(text.find("trace,terminated_by,cumulated_reward,path") != std::string::npos);
    CHECK(text.find("reached-goal,1,\"goal\"") != std::string::npos);
}

TEST_CASE("empirical_density") {
    SUBCASE("all-zero rewards give a delta") {
        std::vector<Trace> traces(4);
        const auto d = empirical_density(traces, 4);
        CHECK(d == Vec{1.0, 0.0, 0.0, 0.0});
    }
    SUBCASE("half at one, half at two") {
        std::vector<Trace> traces(4);
        traces[0].cumulated_reward = 1.0;
        traces[1].cumulated_reward = 1.0;
        traces[2].cumulated_reward = 2.0;
        traces[3].cumulated_reward = 2.0;
        const auto d = empirical_density(traces, 4);
        CHECK(d == Vec{0.0, 0.5, 0.5, 0.0});
    }
    SUBCASE("bound-terminated traces contribute no mass") {
        std::vector<Trace> traces(2);
        traces[0].cumulated_reward = 1.0;
        traces[1].cumulated_reward = 3.0;
        traces[1].terminated_by = Trace::End::RewardBound;
        const auto d = empirical_density(traces, 5);
        double sum = 0.0;
        for (double v : d) sum += v;
        CHECK(sum == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("toy model sampling agrees with the solver") {
        const auto m = toy_model();
        Rng rng(2718);
        const auto traces = sample_traces(m, 0, 10000, 150.0, rng);
        const auto emp = empirical_density(traces, 150);

        const auto sys = preprocess(m, 150);
        IterationConfig cfg;
        cfg.epsilon = 1e-12;
        const auto f = solve_power_exact(sys, cfg).solution.row_vec(0);
        double err = 0.0;
        for (std::size_t r = 0; r < 150; ++r) err = std::max(err, std::abs(emp[r] - f[r]));
        CHECK(err <= 0.02);
    }
}
