#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "copulasim/dealio.hpp"
#include "copulasim/errors.hpp"
#include "copulasim/fixtures.hpp"
#include "copulasim/generator.hpp"
#include "oracles.hpp"

using namespace copulasim;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("copulasim_test_" + std::to_string(::getpid()) +
                                            "_" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("derive_cooccurrence inverts the pair identity on the study tables") {
    auto cooc = derive_cooccurrence(fixtures::marginals(), fixtures::pair_counts());
    // integer oracle: n_u * n_v - pairs(u,v)
    CHECK(cooc(6, 7) == 4162 * 1986 - 8264816);  // SaaS x AI = 916
    CHECK(cooc(6, 7) == 916);
    CHECK(cooc(0, 2) == 8833 * 3003 - 26522684);  // F_first x G_CA = 2815
    CHECK(cooc(0, 2) == 2815);
    CHECK(cooc(0, 1) == 0);  // founder mutual exclusivity
    for (int g1 = 2; g1 < 6; ++g1)
        for (int g2 = 2; g2 < 6; ++g2)
            if (g1 != g2) CHECK(cooc(g1, g2) == 0);
    // geography bucket counts implied by the tables
    CHECK(cooc(0, 2) + cooc(0, 3) == 4064);
    CHECK(cooc(1, 2) + cooc(1, 3) == 245);
    CHECK(cooc(0, 4) + cooc(0, 5) == 4769);
    CHECK(cooc(1, 4) + cooc(1, 5) == 177);
}

TEST_CASE("derive_cooccurrence rejects inconsistent tables") {
    MarginalCounts m = fixtures::marginals();
    PairCountTable p = fixtures::pair_counts();
    p(6, 7) = p(7, 6) = 4162LL * 1986LL + 5;  // would imply negative co-occurrence
    CHECK_THROWS_AS(derive_cooccurrence(m, p), inconsistent_tables_error);

    PairCountTable q = fixtures::pair_counts();
    q(3, 4) = q(3, 4) + 1;  // asymmetric
    CHECK_THROWS_AS(derive_cooccurrence(m, q), inconsistent_tables_error);

    PairCountTable d = fixtures::pair_counts();
    d(1, 1) += 2;  // diagonal != n(n-1)
    CHECK_THROWS_AS(derive_cooccurrence(m, d), inconsistent_tables_error);
}

TEST_CASE("generate_population: degenerate two-deal request") {
    MarginalCounts m;
    m.n = {0, 2, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0};
    PairCountTable p{};
    for (int u = 0; u < 12; ++u)
        for (int v = 0; v < 12; ++v)
            p(u, v) = u == v ? m.n[u] * (m.n[u] - 1) : m.n[u] * m.n[v] - (u == 1 && v == 2   ? 2
                                                                          : u == 2 && v == 1 ? 2
                                                                                             : 0);
    auto cooc = derive_cooccurrence(m, p);
    auto deals = generate_population(m, cooc, 1);
    REQUIRE(deals.size() == 2);
    for (const auto& d : deals) {
        CHECK(d.founder == FounderType::Repeat);
        CHECK(d.geo == Geography::CA);
        CHECK(d.markets.empty());
    }
}

TEST_CASE("generate_population reproduces the full study tables exactly") {
    auto marg = fixtures::marginals();
    auto pairs = fixtures::pair_counts();
    auto cooc = derive_cooccurrence(marg, pairs);
    auto deals = generate_population(marg, cooc, 42, fixtures::generator_targets());
    REQUIRE(deals.size() == 9255);

    PopulationCounts pc = count_population(deals);
    for (int u = 0; u < 12; ++u) {
        CHECK(pc.marginals.n[u] == marg.n[u]);
        for (int v = 0; v < 12; ++v) CHECK(pc.pairs(u, v) == pairs(u, v));
    }
    CHECK(pc.hot_first == 5397);
    CHECK(pc.hot_repeat == 299);

    // bucket report mirrors the published conditional counts
    auto rows = bucket_report(deals);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].count_first == 8833);
    CHECK(rows[0].count_repeat == 422);
    CHECK(rows[1].count_first == 4064);
    CHECK(rows[1].count_repeat == 245);
    CHECK(rows[2].count_first == 4769);
    CHECK(rows[2].count_repeat == 177);
    CHECK(rows[3].count_first == 5397);
    CHECK(rows[3].count_repeat == 299);
    CHECK(rows[4].count_first == 3436);
    CHECK(rows[4].count_repeat == 123);
    CHECK(rows[3].count_first + rows[4].count_first == 8833);

    // probability bounds
    for (const auto& d : deals) {
        CHECK(d.p.value() >= 0.05);
        CHECK(d.p.value() <= 0.20);
    }

    // the population stays inside the latent feasibility envelope of the
    // shipped covariance fixture
    ModelParams params = fixtures::model_params();
    double kmax = 0.0;
    for (const auto& d : deals) {
        AttributeVector e = encode(d);
        kmax = std::max(kmax, latent_covariance(e, e, params));
    }
    CHECK(kmax < 0.99);
}

TEST_CASE("generator determinism and seed independence of counts") {
    auto marg = fixtures::marginals();
    auto cooc = derive_cooccurrence(marg, fixtures::pair_counts());
    auto targets = fixtures::generator_targets();
    auto a = generate_population(marg, cooc, 7, targets);
    auto b = generate_population(marg, cooc, 7, targets);
    CHECK(a == b);
    auto c = generate_population(marg, cooc, 8, targets);
    CHECK(a != c);
    PopulationCounts pa = count_population(a), pcc = count_population(c);
    for (int u = 0; u < 12; ++u)
        for (int v = 0; v < 12; ++v) CHECK(pa.pairs(u, v) == pcc.pairs(u, v));
}

TEST_CASE("brute-force pair identity on a small generated population") {
    MarginalCounts m;
    m.n = {20, 10, 8, 7, 10, 5, 6, 5, 0, 4, 0, 0};
    // build a consistent small co-occurrence by generating deals directly:
    // start from an arbitrary assignment, count it, then re-generate.
    std::vector<Deal> seed_pop;
    for (int i = 0; i < 30; ++i) {
        Deal d;
        d.founder = i < 20 ? FounderType::FirstTime : FounderType::Repeat;
        d.geo = static_cast<Geography>(i % 4 == 3 ? (i % 8 == 7 ? 3 : 2) : i % 4);
        if (i % 5 == 0) d.markets.add(Market::SaaS);
        if (i % 6 == 1) d.markets.add(Market::AI);
        if (i % 7 == 2) d.markets.add(Market::Consumer);
        d.p = Probability(0.1);
        d.id = "s" + std::to_string(i);
        seed_pop.push_back(d);
    }
    PopulationCounts target = count_population(seed_pop);
    auto deals = generate_population(target.marginals, target.cooc, 3);
    PopulationCounts got = count_population(deals);
    for (int u = 0; u < 12; ++u)
        for (int v = 0; v < 12; ++v) {
            CHECK(got.pairs(u, v) == target.pairs(u, v));
            // double-loop oracle on the regenerated population
            CHECK(got.pairs(u, v) == oracles::brute_force_pairs(deals, u, v));
        }
}

TEST_CASE("assign_probability ranges and nudges") {
    Deal d;
    d.founder = FounderType::FirstTime;
    d.geo = Geography::OtherUS;
    d.markets.add(Market::Health);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 100000; ++i) {
        double p = assign_probability(d, 5, static_cast<std::uint64_t>(i)).value();
        lo = std::min(lo, p);
        hi = std::max(hi, p);
    }
    CHECK(lo >= 0.05);
    CHECK(hi <= 0.12);

    Deal r;
    r.founder = FounderType::Repeat;
    r.geo = Geography::CA;
    r.markets.add(Market::SaaS);
    r.markets.add(Market::AI);
    lo = 1.0;
    hi = 0.0;
    for (int i = 0; i < 100000; ++i) {
        double p = assign_probability(r, 5, static_cast<std::uint64_t>(i)).value();
        lo = std::min(lo, p);
        hi = std::max(hi, p);
    }
    // base >= 0.12 plus both nudges applied once, capped at 0.20
    CHECK(lo >= 0.14);
    CHECK(lo < 0.1425);
    CHECK(hi == doctest::Approx(0.20).epsilon(1e-9));
}

TEST_CASE("deal file round trip") {
    TempDir tmp;
    auto marg = fixtures::marginals();
    auto cooc = derive_cooccurrence(marg, fixtures::pair_counts());
    auto deals = generate_population(marg, cooc, 11, fixtures::generator_targets());
    deals[0].outcome = 1;
    deals[1].outcome = 0;
    std::string path = tmp.file("deals.csv");
    save_deals(deals, path);
    auto back = load_deals(path);
    CHECK(back == deals);
}

TEST_CASE("deal file parse errors carry line numbers") {
    TempDir tmp;
    std::string path = tmp.file("bad.csv");
    {
        std::ofstream out(path);
        out << "id,founder,geo,markets,p,outcome\n";
        out << "d1,Repeat,CA,SaaS,0.1,\n";
        out << "d2,Repeat,CA;NY,SaaS,0.1,\n";  // geography not one-hot
    }
    try {
        load_deals(path);
        FAIL("expected parse error");
    } catch (const parse_error& e) {
        CHECK(e.line() == 3);
    }

    {
        std::ofstream out(path);
        out << "id,founder,geo,markets,p,outcome\n";
        out << "d1,Repeat,CA,SaaS,0.1,\n";
        out << "d1,Repeat,NY,,0.1,\n";  // duplicate id
    }
    CHECK_THROWS_AS(load_deals(path), parse_error);

    {
        std::ofstream out(path);
        out << "id,founder,geo,markets,p,outcome\n";
    }
    CHECK(load_deals(path).empty());
}

TEST_CASE("fixture table files round trip") {
    TempDir tmp;
    save_marginals(fixtures::marginals(), tmp.file("marg.csv"));
    auto m = load_marginals(tmp.file("marg.csv"));
    CHECK(m.n == fixtures::marginals().n);
    save_pair_counts(fixtures::pair_counts(), tmp.file("pairs.csv"));
    auto p = load_pair_counts(tmp.file("pairs.csv"));
    CHECK(p.c == fixtures::pair_counts().c);
    fixtures::save_sigma(fixtures::sigma_table(), tmp.file("sigma.csv"));
    auto s = fixtures::load_sigma(tmp.file("sigma.csv"));
    for (int u = 0; u < 12; ++u)
        for (int v = 0; v < 12; ++v) CHECK(s(u, v) == fixtures::sigma_table()(u, v));
}
